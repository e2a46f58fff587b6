//! Doubly-linked list threaded through an array-backed indexed min-heap.
//!
//! Nodes are appended in likelihood-ratio order and never reordered, so the
//! list always reflects LR order. The heap is keyed by the capacity change of
//! the merge a node stands for; a node may sit in the list without being in
//! the heap (upgrading keeps the two outermost pairs out of it). Equal keys are
//! broken by node id, i.e. the leftmost candidate wins.

use crate::real::Real;

const NIL: usize = usize::MAX;

#[derive(Clone, Debug)]
struct Node<T, P> {
    payload: P,
    key: T,
    left: usize,
    right: usize,
    /// Position in the heap array, `NIL` when not queued.
    h: usize,
    alive: bool,
}

#[derive(Clone, Debug)]
pub struct MergeWorkspace<T, P> {
    nodes: Vec<Node<T, P>>,
    heap: Vec<usize>,
    head: usize,
    tail: usize,
    live: usize,
}

impl<T: Real, P> MergeWorkspace<T, P> {
    pub fn with_capacity(n: usize) -> Self {
        MergeWorkspace {
            nodes: Vec::with_capacity(n),
            heap: Vec::with_capacity(n),
            head: NIL,
            tail: NIL,
            live: 0,
        }
    }

    /// Number of nodes still in the list.
    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// Number of nodes queued in the heap.
    pub fn queued(&self) -> usize {
        self.heap.len()
    }

    /// Appends a node at the right end of the list; `key == None` keeps it out
    /// of the heap.
    pub fn insert_rightmost(&mut self, payload: P, key: Option<T>) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            payload,
            key: key.unwrap_or_else(T::zero),
            left: self.tail,
            right: NIL,
            h: NIL,
            alive: true,
        });
        if self.tail != NIL {
            self.nodes[self.tail].right = id;
        } else {
            self.head = id;
        }
        self.tail = id;
        self.live += 1;
        if key.is_some() {
            self.heap_push(id);
        }
        id
    }

    /// The queued node with the smallest key.
    #[inline]
    pub fn get_min(&self) -> Option<usize> {
        self.heap.first().copied()
    }

    /// Removes the minimum from both the heap and the list.
    pub fn remove_min(&mut self) -> Option<usize> {
        let id = self.get_min()?;
        self.remove(id);
        Some(id)
    }

    /// Unlinks a node from the list and, if queued, from the heap.
    pub fn remove(&mut self, id: usize) {
        debug_assert!(self.nodes[id].alive);
        if self.nodes[id].h != NIL {
            self.heap_remove(id);
        }
        let Node { left, right, .. } = self.nodes[id];
        if left != NIL {
            self.nodes[left].right = right;
        } else {
            self.head = right;
        }
        if right != NIL {
            self.nodes[right].left = left;
        } else {
            self.tail = left;
        }
        let n = &mut self.nodes[id];
        n.left = NIL;
        n.right = NIL;
        n.alive = false;
        self.live -= 1;
    }

    /// Replaces the key of a node and restores the heap property; `None`
    /// dequeues it.
    pub fn value_updated(&mut self, id: usize, key: Option<T>) {
        match key {
            Some(k) => {
                self.nodes[id].key = k;
                if self.nodes[id].h == NIL {
                    self.heap_push(id);
                } else {
                    let pos = self.nodes[id].h;
                    self.sift_up(pos);
                    let pos = self.nodes[id].h;
                    self.sift_down(pos);
                }
            }
            None => {
                if self.nodes[id].h != NIL {
                    self.heap_remove(id);
                }
            }
        }
    }

    pub fn key(&self, id: usize) -> Option<T> {
        (self.nodes[id].h != NIL).then(|| self.nodes[id].key)
    }

    #[inline]
    pub fn left(&self, id: usize) -> Option<usize> {
        let l = self.nodes[id].left;
        (l != NIL).then_some(l)
    }

    #[inline]
    pub fn right(&self, id: usize) -> Option<usize> {
        let r = self.nodes[id].right;
        (r != NIL).then_some(r)
    }

    pub fn head(&self) -> Option<usize> {
        (self.head != NIL).then_some(self.head)
    }

    pub fn tail(&self) -> Option<usize> {
        (self.tail != NIL).then_some(self.tail)
    }

    #[inline]
    pub fn payload(&self, id: usize) -> &P {
        &self.nodes[id].payload
    }

    #[inline]
    pub fn payload_mut(&mut self, id: usize) -> &mut P {
        &mut self.nodes[id].payload
    }

    /// Node ids in list order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let mut cur = self.head;
        std::iter::from_fn(move || {
            if cur == NIL {
                None
            } else {
                let id = cur;
                cur = self.nodes[id].right;
                Some(id)
            }
        })
    }

    /// Checks heap order, position back-pointers and list linkage. The list
    /// must visit live nodes in increasing id order, which is LR order.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (pos, &id) in self.heap.iter().enumerate() {
            if self.nodes[id].h != pos {
                return Err(format!("node {id} records heap slot {} but sits at {pos}", self.nodes[id].h));
            }
            if !self.nodes[id].alive {
                return Err(format!("dead node {id} still queued"));
            }
            if pos > 0 && self.less(id, self.heap[(pos - 1) / 2]) {
                return Err(format!("heap order violated at slot {pos}"));
            }
        }
        let mut count = 0;
        let mut prev = NIL;
        for id in self.iter() {
            if self.nodes[id].left != prev {
                return Err(format!("broken back link at node {id}"));
            }
            if prev != NIL && prev >= id {
                return Err(format!("list out of order at node {id}"));
            }
            prev = id;
            count += 1;
        }
        if prev != self.tail {
            return Err("tail pointer mismatch".into());
        }
        if count != self.live {
            return Err(format!("list holds {count} nodes, expected {}", self.live));
        }
        Ok(())
    }

    #[inline]
    fn less(&self, x: usize, y: usize) -> bool {
        let (kx, ky) = (self.nodes[x].key, self.nodes[y].key);
        kx < ky || (kx == ky && x < y) || (kx.is_nan() && !ky.is_nan())
    }

    fn heap_push(&mut self, id: usize) {
        let pos = self.heap.len();
        self.heap.push(id);
        self.nodes[id].h = pos;
        self.sift_up(pos);
    }

    fn heap_remove(&mut self, id: usize) {
        let pos = self.nodes[id].h;
        let last = self.heap.len() - 1;
        self.swap(pos, last);
        self.heap.pop();
        self.nodes[id].h = NIL;
        if pos < self.heap.len() {
            self.sift_up(pos);
            let moved = self.heap[pos];
            let pos = self.nodes[moved].h;
            self.sift_down(pos);
        }
    }

    #[inline]
    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        let (a, b) = (self.heap[i], self.heap[j]);
        self.nodes[a].h = i;
        self.nodes[b].h = j;
    }

    fn sift_up(&mut self, mut pos: usize) {
        while pos > 0 {
            let parent = (pos - 1) / 2;
            if self.less(self.heap[pos], self.heap[parent]) {
                self.swap(pos, parent);
                pos = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut pos: usize) {
        let n = self.heap.len();
        loop {
            let l = 2 * pos + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let child = if r < n && self.less(self.heap[r], self.heap[l]) { r } else { l };
            if self.less(self.heap[child], self.heap[pos]) {
                self.swap(pos, child);
                pos = child;
            } else {
                break;
            }
        }
    }
}
