//! Command-line front end: polar code construction, bit-channel bounds,
//! AWGN quantization and SC simulation.

use clap::{Args, Parser, Subcommand, ValueEnum};
use polarforge::construct::{classify, dimension_bounds, log2_length, max_dimension_lower};
use polarforge::io::{format_sci, read_bounds_tsv, read_frozen, write_bounds_tsv, write_frozen};
use polarforge::quantize::{degrade_awgn, upgrade_awgn};
use polarforge::{
    select_info_set, simulate, sweep_all, Channel, ChannelPreset, ChannelSandwich, ConstructionResult, Error, Modes,
    PolarCode, Target,
};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "polarforge", version, about = "Polar code construction with provable bit-channel bounds")]
struct Cli {
    /// Worker threads, 0 for one per core. Falls back to POLARFORGE_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select an information set and write the frozen set and bounds.
    Construct(ConstructArgs),
    /// Write bit-channel bounds for every index as TSV.
    Bounds(BoundsArgs),
    /// Quantize a binary-input AWGN channel and report capacity bounds.
    Quantize(QuantizeArgs),
    /// Estimate the block error rate of a code under SC decoding.
    Simulate(SimulateArgs),
}

#[derive(Args, Clone)]
struct SweepArgs {
    /// `bsc:<p>`, `bec:<e>`, `awgn:<sigma2>`, or a channel file.
    channel: String,
    /// Code length, a power of two.
    #[arg(long)]
    n: usize,
    /// Output alphabet size kept after every merge.
    #[arg(long, default_value_t = 16)]
    mu: usize,
    /// LR closeness threshold of the upgrading merge.
    #[arg(long, default_value_t = polarforge::DEFAULT_EPS)]
    eps: f64,
    /// Output alphabet size of the initial AWGN quantization.
    #[arg(long, default_value_t = 2000)]
    quant_mu: usize,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct TargetArgs {
    /// Code dimension.
    #[arg(long)]
    k: Option<usize>,
    /// Block-error budget for the summed upper bounds.
    #[arg(long)]
    budget: Option<f64>,
    /// Per-channel error threshold: select every channel whose upper bound
    /// is at most this value.
    #[arg(long)]
    pe_threshold: Option<f64>,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    #[command(flatten)]
    target: TargetArgs,
    /// Output prefix; writes `<out>.frozen` and `<out>.tsv`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    /// Bound families to compute.
    #[arg(long, value_enum, default_value_t = ModeArg::All)]
    modes: ModeArg,
    /// Output file, stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    All,
    Upper,
    Lower,
}

#[derive(Args)]
struct QuantizeArgs {
    /// `awgn:<sigma2>`.
    channel: String,
    /// Output alphabet size.
    #[arg(long, default_value_t = 2000)]
    mu: usize,
    /// Which approximations to build.
    #[arg(long, value_enum, default_value_t = Side::Both)]
    side: Side,
    /// Output prefix; writes `<out>.degraded.bms` and/or `<out>.upgraded.bms`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    Degrade,
    Upgrade,
    Both,
}

#[derive(Args)]
struct SimulateArgs {
    /// `bsc:<p>`, `bec:<e>` or `awgn:<sigma2>`.
    channel: String,
    /// Frozen-set file to simulate.
    #[arg(long)]
    frozen: PathBuf,
    /// Bounds file used to report the union bound of the code.
    #[arg(long)]
    bounds: Option<PathBuf>,
    /// Number of transmitted blocks.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// RNG seed; equal seeds give identical reports.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// Failure carrying the process exit code.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
    Consistency(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Consistency(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Consistency(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) => CliError::Io(e.to_string()),
            Error::Consistency(_) => CliError::Consistency(e.to_string()),
            Error::InvalidArgument(_) | Error::Precondition(_) | Error::TooLarge(_) => CliError::Usage(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn parse_preset(s: &str) -> CliResult<ChannelPreset> {
    Ok(s.parse::<ChannelPreset>()?)
}

/// A preset, or else a channel file.
fn load_channel(spec: &str, quant_mu: usize) -> CliResult<ChannelSandwich> {
    let kind = spec.split_once(':').map(|(k, _)| k.to_ascii_lowercase());
    if matches!(kind.as_deref(), Some("bsc" | "bec" | "awgn")) {
        return Ok(parse_preset(spec)?.sandwich(quant_mu)?);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::Usage(format!("`{spec}` is neither a channel preset nor an existing file")));
    }
    Ok(Channel::from_text(&read_file(path)?)?.into())
}

fn run_sweep(args: &SweepArgs, modes: Modes) -> CliResult<polarforge::Sweep<f64>> {
    let m = log2_length(args.n)?;
    let base = load_channel(&args.channel, args.quant_mu)?;
    Ok(sweep_all(&base, args.mu, args.eps, m, modes)?)
}

fn construct(args: ConstructArgs) -> CliResult<()> {
    let sweep = run_sweep(&args.sweep, Modes::ALL)?;
    let bounds = &sweep.bounds;
    let t = &args.target;
    let result = if let Some(k) = t.k {
        select_info_set(bounds, Target::Dimension(k))?
    } else if let Some(budget) = t.budget {
        select_info_set(bounds, Target::Budget(budget))?
    } else {
        let threshold = t.pe_threshold.expect("one target is required");
        let c = classify(bounds, threshold);
        println!("good\t{}", c.good.len());
        println!("bad\t{}", c.bad.len());
        println!("undecided\t{}", c.undecided.len());
        select_info_set(bounds, Target::Dimension(c.good.len()))?
    };
    write_file(&with_suffix(&args.out, ".frozen"), &write_frozen(&result))?;
    write_file(&with_suffix(&args.out, ".tsv"), &write_bounds_tsv(bounds, sweep.mu))?;
    report(&result, bounds, t.budget);
    Ok(())
}

fn report(result: &ConstructionResult, bounds: &[polarforge::Bounds], budget: Option<f64>) {
    println!("n\t{}", result.n);
    println!("k\t{}", result.k);
    println!("rate\t{:.6}", result.rate());
    println!("union_bound\t{}", format_sci(result.union_bound));
    println!("lower_bound_sum\t{}", format_sci(result.lower_bound_sum));
    let d = dimension_bounds(bounds, result.k);
    println!("degraded_sum\t{}", format_sci(d.degraded));
    if let Some(b) = budget {
        let k_max = max_dimension_lower(bounds, b);
        println!("k_max_lower\t{k_max}");
        println!("rate_max_lower\t{:.6}", k_max as f64 / result.n as f64);
    }
}

fn bounds(args: BoundsArgs) -> CliResult<()> {
    let modes = match args.modes {
        ModeArg::All => Modes::ALL,
        ModeArg::Upper => Modes::UPPER,
        ModeArg::Lower => Modes::LOWER,
    };
    let sweep = run_sweep(&args.sweep, modes)?;
    let text = write_bounds_tsv(&sweep.bounds, sweep.mu);
    match args.out {
        Some(path) => write_file(&path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn quantize(args: QuantizeArgs) -> CliResult<()> {
    let spec = match parse_preset(&args.channel)? {
        ChannelPreset::Awgn(spec) => spec,
        other => return Err(CliError::Usage(format!("quantize needs an awgn channel, got {other}"))),
    };
    let mut sides: Vec<(&str, Channel)> = Vec::new();
    if args.side != Side::Upgrade {
        sides.push(("degraded", degrade_awgn(&spec, args.mu)?));
    }
    if args.side != Side::Degrade {
        sides.push(("upgraded", upgrade_awgn(&spec, args.mu)?));
    }
    println!("sigma2\t{}", spec.sigma2);
    println!("mu\t{}", args.mu);
    for (name, ch) in &sides {
        println!("{name}_pairs\t{}", ch.len());
        println!("{name}_capacity\t{}", format_sci(ch.capacity()));
    }
    if let [(_, d), (_, u)] = sides.as_slice() {
        println!("capacity_gap\t{}", format_sci(u.capacity() - d.capacity()));
    }
    if let Some(prefix) = args.out {
        for (name, ch) in &sides {
            write_file(&with_suffix(&prefix, &format!(".{name}.bms")), &ch.to_text())?;
        }
    }
    Ok(())
}

fn simulate_cmd(args: SimulateArgs) -> CliResult<()> {
    let preset = parse_preset(&args.channel)?;
    let (n, _, frozen) = read_frozen(&read_file(&args.frozen)?)?;
    let mut code = PolarCode::new(n, &frozen)?;
    if let Some(path) = &args.bounds {
        let (_, bounds) = read_bounds_tsv(&read_file(path)?)?;
        if bounds.len() != n {
            return Err(CliError::Io(format!("bounds file has {} rows, code length is {n}", bounds.len())));
        }
        let ub = code.info_set().iter().map(|&i| bounds[i].pe_upper).sum();
        code = code.with_union_bound(ub);
    }
    let rep = simulate(&code, &preset, args.trials, args.seed)?;
    println!("channel\tn\tk\ttrials\tblock_errors\tbler\twilson_lower_95\twilson_upper_95\tunion_bound\tfrozen");
    println!(
        "{preset}\t{n}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        code.k(),
        rep.trials,
        rep.block_errors,
        format_sci(rep.estimated_bler),
        format_sci(rep.wilson_lower_95),
        format_sci(rep.wilson_upper_95),
        rep.union_bound.map_or_else(|| "NA".to_string(), format_sci),
        args.frozen.display(),
    );
    Ok(())
}

fn thread_count(flag: Option<usize>) -> CliResult<usize> {
    match flag {
        Some(t) => Ok(t),
        None => match std::env::var("POLARFORGE_THREADS") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("POLARFORGE_THREADS must be an integer, got `{v}`"))),
            Err(_) => Ok(0),
        },
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let threads = thread_count(cli.threads)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    match cli.command {
        Command::Construct(a) => construct(a),
        Command::Bounds(a) => bounds(a),
        Command::Quantize(a) => quantize(a),
        Command::Simulate(a) => simulate_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(CliError::from(Error::InvalidArgument("x".into())).code(), 2);
        assert_eq!(CliError::from(Error::TooLarge("x".into())).code(), 2);
        assert_eq!(CliError::from(Error::InvalidInput("x".into())).code(), 3);
        assert_eq!(CliError::from(Error::Consistency("x".into())).code(), 4);
    }

    #[test]
    fn suffixed_paths() {
        assert_eq!(with_suffix(Path::new("/tmp/run"), ".tsv"), PathBuf::from("/tmp/run.tsv"));
    }
}
