//! SC simulation against the union bound of the constructed codes.

use polarforge::{select_info_set, simulate, sweep_all, ChannelPreset, Modes, PolarCode, Target, DEFAULT_EPS};

fn code_for(preset: &ChannelPreset, m: u32, budget: f64) -> PolarCode {
    let sweep = sweep_all(&preset.sandwich::<f64>(2).unwrap(), 16, DEFAULT_EPS, m, Modes::UPPER).unwrap();
    let built = select_info_set(&sweep.bounds, Target::Budget(budget)).unwrap();
    PolarCode::from_construction(&built).unwrap().with_union_bound(built.union_bound)
}

#[test]
fn bler_respects_union_bound() {
    for preset in [ChannelPreset::Bsc(0.05), ChannelPreset::Bec(0.3)] {
        for budget in [1e-2, 1e-1] {
            let code = code_for(&preset, 8, budget);
            let report = simulate(&code, &preset, 20_000, 11).unwrap();
            let bound = code.union_bound().unwrap();
            assert_eq!(report.union_bound, Some(bound));
            assert!(
                report.wilson_lower_95 <= bound,
                "{preset} k={}: BLER {} (Wilson lower {}) above union bound {bound}",
                code.k(),
                report.estimated_bler,
                report.wilson_lower_95
            );
        }
    }
}

#[test]
fn same_seed_same_report() {
    let preset = ChannelPreset::Bsc(0.11);
    let code = code_for(&preset, 7, 1e-1);
    assert_eq!(simulate(&code, &preset, 3_000, 5).unwrap(), simulate(&code, &preset, 3_000, 5).unwrap());
}

#[test]
fn awgn_simulation_runs() {
    let preset: ChannelPreset = "awgn:0.5".parse().unwrap();
    let sweep = sweep_all(&preset.sandwich::<f64>(64).unwrap(), 16, DEFAULT_EPS, 7, Modes::UPPER).unwrap();
    let built = select_info_set(&sweep.bounds, Target::Budget(1e-1)).unwrap();
    let code = PolarCode::new(built.n, &built.frozen_set).unwrap();
    let report = simulate(&code, &preset, 5_000, 3).unwrap();
    assert!(report.wilson_lower_95 <= built.union_bound);
    assert_eq!(report.union_bound, None);
}
