//! Exact small-n searches for optimal gate counts, and a constructive
//! rewriter for CZ stages.
//!
//! Tableaux with `n ≤ 4` fit in a `u64` (2n rows of 2n bits), so gates act
//! on the packed key as word-parallel column operations.

use std::collections::{BTreeMap, HashMap};

use crate::clifford::{Circuit, Gate, SymplecticMat};
use crate::f2linalg::BinMatrix;
use crate::phasepoly::{canonicalize, extract_descr};
use crate::{Error, Result};

pub const MAX_SEARCH_QUBITS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GateKind {
    H,
    P,
    Cnot,
    Cz,
    Swap,
}

impl GateKind {
    pub fn is_two_qubit(self) -> bool {
        matches!(self, GateKind::Cnot | GateKind::Cz | GateKind::Swap)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpec {
    pub n: usize,
    /// Gate kind → cost (0 or 1).
    pub alphabet: BTreeMap<GateKind, u8>,
    pub target: SymplecticMat,
    /// Give up once the answer is known to exceed this.
    pub max_cost: u32,
    pub max_states: usize,
}

impl SearchSpec {
    /// Two-qubit gates cost 1, single-qubit gates 0.
    pub fn new(kinds: &[GateKind], target: SymplecticMat) -> Self {
        SearchSpec {
            n: target.n(),
            alphabet: kinds.iter().map(|&k| (k, k.is_two_qubit() as u8)).collect(),
            target,
            max_cost: 24,
            max_states: 40_000_000,
        }
    }

    pub fn with_cost(mut self, kind: GateKind, cost: u8) -> Self {
        self.alphabet.insert(kind, cost);
        self
    }
}

// Column operations on a packed tableau.
#[derive(Clone, Copy, Debug)]
enum ColOp {
    // col dst ^= col src
    Add(u32, u32),
    Swap(u32, u32),
}

#[derive(Clone, Copy, Debug)]
struct Packed {
    w: u32,
    rep: u64,
}

impl Packed {
    fn new(n: usize) -> Self {
        let w = 2 * n as u32;
        let rep = (0..w).fold(0u64, |r, i| r | 1 << (i * w));
        Packed { w, rep }
    }

    fn key(&self, m: &SymplecticMat) -> u64 {
        let mat = m.matrix();
        (0..self.w as usize).fold(0, |k, i| k | mat.row_mask(i) << (i as u32 * self.w))
    }

    #[cfg(test)]
    fn unkey(&self, key: u64) -> SymplecticMat {
        let w = self.w as usize;
        let mask = (1u64 << w) - 1;
        let rows: Vec<u64> = (0..w).map(|i| key >> (i * w) & mask).collect();
        SymplecticMat::new(BinMatrix::from_row_masks(w, &rows)).expect("packed key is symplectic")
    }

    fn apply(&self, mut key: u64, ops: &[ColOp]) -> u64 {
        for op in ops {
            match *op {
                ColOp::Add(src, dst) => key ^= (key >> src & self.rep) << dst,
                ColOp::Swap(a, b) => {
                    let x = (key >> a ^ key >> b) & self.rep;
                    key ^= x << a | x << b;
                }
            }
        }
        key
    }
}

fn moves(n: usize, alphabet: &BTreeMap<GateKind, u8>) -> Vec<(Vec<ColOp>, u8)> {
    let n32 = n as u32;
    let mut out = vec![];
    for (&kind, &cost) in alphabet {
        for a in 0..n32 {
            match kind {
                GateKind::H => out.push((vec![ColOp::Swap(a, n32 + a)], cost)),
                GateKind::P => out.push((vec![ColOp::Add(a, n32 + a)], cost)),
                _ => {}
            }
            for b in 0..n32 {
                if a == b {
                    continue;
                }
                match kind {
                    GateKind::Cnot => out.push((vec![ColOp::Add(a, b), ColOp::Add(n32 + b, n32 + a)], cost)),
                    GateKind::Cz if a < b => {
                        out.push((vec![ColOp::Add(a, n32 + b), ColOp::Add(b, n32 + a)], cost))
                    }
                    GateKind::Swap if a < b => {
                        out.push((vec![ColOp::Swap(a, b), ColOp::Swap(n32 + a, n32 + b)], cost))
                    }
                    _ => {}
                }
            }
        }
    }
    out
}

// One direction of the search: every state at cost ≤ depth is in `dist`,
// and `frontier` holds exactly those at cost == depth.
struct Side {
    dist: HashMap<u64, u32>,
    frontier: Vec<u64>,
    depth: u32,
}

impl Side {
    fn new(start: u64, p: Packed, mv: &[(Vec<ColOp>, u8)]) -> Self {
        let mut s = Side { dist: HashMap::from([(start, 0)]), frontier: vec![start], depth: 0 };
        s.close(p, mv);
        s
    }

    fn close(&mut self, p: Packed, mv: &[(Vec<ColOp>, u8)]) {
        let mut i = 0;
        while i < self.frontier.len() {
            let s = self.frontier[i];
            for (ops, _) in mv.iter().filter(|(_, c)| *c == 0) {
                let t = p.apply(s, ops);
                if let std::collections::hash_map::Entry::Vacant(e) = self.dist.entry(t) {
                    e.insert(self.depth);
                    self.frontier.push(t);
                }
            }
            i += 1;
        }
    }

    fn expand(&mut self, p: Packed, mv: &[(Vec<ColOp>, u8)]) {
        let old = std::mem::take(&mut self.frontier);
        self.depth += 1;
        for s in old {
            for (ops, _) in mv.iter().filter(|(_, c)| *c == 1) {
                let t = p.apply(s, ops);
                if let std::collections::hash_map::Entry::Vacant(e) = self.dist.entry(t) {
                    e.insert(self.depth);
                    self.frontier.push(t);
                }
            }
        }
        self.close(p, mv);
    }

    fn meet(&self, other: &Side) -> Option<u32> {
        self.frontier.iter().filter_map(|s| other.dist.get(s)).map(|d| d + self.depth).min()
    }
}

fn validate(spec: &SearchSpec) -> Result<()> {
    if spec.n > MAX_SEARCH_QUBITS || spec.n == 0 {
        return Err(Error::UnsupportedSize(spec.n));
    }
    if spec.target.n() != spec.n {
        return Err(Error::DimensionMismatch(format!("target on {} qubits", spec.target.n())));
    }
    if spec.alphabet.is_empty() {
        return Err(Error::InvalidGate("empty gate alphabet".into()));
    }
    if let Some((k, c)) = spec.alphabet.iter().find(|(_, c)| **c > 1) {
        return Err(Error::InvalidGate(format!("cost {c} for {k:?} is not 0 or 1")));
    }
    Ok(())
}

/// Minimal total cost of a word over the alphabet whose tableau is the
/// target, by bidirectional layered 0-1 breadth-first search.
pub fn optimal_cost(spec: &SearchSpec) -> Result<u32> {
    validate(spec)?;
    let p = Packed::new(spec.n);
    let mv = moves(spec.n, &spec.alphabet);
    // Every alphabet gate is its own inverse on tableaux (P³ ≡ P), so the
    // backward side uses the same moves.
    let mut fwd = Side::new(p.key(&SymplecticMat::identity(spec.n)), p, &mv);
    let mut bwd = Side::new(p.key(&spec.target), p, &mv);
    let mut best = fwd.meet(&bwd);
    loop {
        if let Some(b) = best {
            if b <= fwd.depth + bwd.depth {
                return Ok(b);
            }
        }
        if fwd.frontier.is_empty() || bwd.frontier.is_empty() {
            return best.ok_or(Error::Unreachable);
        }
        if fwd.depth + bwd.depth >= spec.max_cost || fwd.dist.len() + bwd.dist.len() > spec.max_states {
            return Err(Error::SearchBudgetExceeded);
        }
        let (grow, other) = if fwd.frontier.len() <= bwd.frontier.len() {
            (&mut fwd, &bwd)
        } else {
            (&mut bwd, &fwd)
        };
        grow.expand(p, &mv);
        let m = grow.meet(other);
        best = match (best, m) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
}

/// Largest CNOT distance from the identity in GL(n, F₂), by a full BFS over
/// packed `n×n` matrices. Practical up to `n = 5`.
pub fn gl_diameter(n: usize) -> Result<u32> {
    if n == 0 || n > 5 {
        return Err(Error::UnsupportedSize(n));
    }
    let row = (1u64 << n) - 1;
    let id = (0..n).fold(0u64, |k, i| k | 1 << (i * n + i));
    let mut dist = vec![u8::MAX; 1 << (n * n)];
    dist[id as usize] = 0;
    let mut frontier = vec![id];
    let mut depth = 0u8;
    while !frontier.is_empty() {
        let mut next = vec![];
        for &s in &frontier {
            for c in 0..n {
                let r = s >> (c * n) & row;
                for t in 0..n {
                    if t != c {
                        let u = s ^ r << (t * n);
                        if dist[u as usize] == u8::MAX {
                            dist[u as usize] = depth + 1;
                            next.push(u);
                        }
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        depth += 1;
        frontier = next;
    }
    Ok(depth as u32)
}

fn hollow_symmetric(n: usize, edges: u64) -> BinMatrix {
    let mut b = BinMatrix::zeros(n, n);
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if edges >> bit & 1 == 1 {
                b.set(i, j, true);
                b.set(j, i, true);
            }
            bit += 1;
        }
    }
    b
}

/// All `2^(n(n−1)/2)` hollow symmetric matrices.
pub fn all_cz_targets(n: usize) -> impl Iterator<Item = BinMatrix> {
    let e = n * n.saturating_sub(1) / 2;
    (0..1u64 << e).map(move |m| hollow_symmetric(n, m))
}

fn all_invertible(n: usize) -> Vec<BinMatrix> {
    (0..1u64 << (n * n))
        .map(|k| BinMatrix::from_fn(n, n, |i, j| k >> (i * n + j) & 1 == 1))
        .filter(|a| a.rank() == n)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Worst case over all targets, each by exact search.
    Exact,
    /// `n(n−1)/2`.
    ClosedForm,
    /// Worst case of optimize_cz_stage over all targets; not an optimum.
    Constructive,
    /// Copied from the CNOT-only column: P and CZ gates never shorten a
    /// linear stage.
    FromCnotOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Entry {
    pub value: u32,
    pub provenance: Provenance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Table1Row {
    pub n: usize,
    pub cz_only: Entry,
    pub cz_full: Entry,
    pub c_cnot: Entry,
    pub c_full: Entry,
}

impl Table1Row {
    pub fn values(&self) -> (u32, u32, u32, u32) {
        (self.cz_only.value, self.cz_full.value, self.c_cnot.value, self.c_full.value)
    }
}

fn worst<I: IntoIterator<Item = SymplecticMat>>(targets: I, kinds: &[GateKind], cz_counts: bool) -> Result<u32> {
    let mut w = 0;
    for t in targets {
        let mut spec = SearchSpec::new(kinds, t);
        if cz_counts {
            spec = spec.with_cost(GateKind::Cz, 1);
        }
        w = w.max(optimal_cost(&spec)?);
    }
    Ok(w)
}

fn exact(value: u32) -> Entry {
    Entry { value, provenance: Provenance::Exact }
}

/// Worst-case gate counts for CZ and CNOT stages.
pub fn table1_row(n: usize) -> Result<Table1Row> {
    use GateKind::*;
    if !(2..=5).contains(&n) {
        return Err(Error::UnsupportedSize(n));
    }
    let full = [P, Cz, Cnot];
    let cz_stage = |b: BinMatrix| SymplecticMat::from_b(&b).expect("hollow symmetric");
    let closed = (n * (n - 1) / 2) as u32;

    let cz_only = if n <= 4 {
        exact(worst(all_cz_targets(n).map(cz_stage), &[Cz], true)?)
    } else {
        Entry { value: closed, provenance: Provenance::ClosedForm }
    };
    let cz_full = if n <= 4 {
        exact(worst(all_cz_targets(n).map(cz_stage), &full, false)?)
    } else {
        let value = all_cz_targets(n)
            .map(|b| optimize_cz_stage(&b).map(|c| c.two_qubit_count() as u32))
            .try_fold(0, |w, c| c.map(|c| w.max(c)))?;
        Entry { value, provenance: Provenance::Constructive }
    };
    let c_cnot = exact(gl_diameter(n)?);
    let c_full = if n <= 3 {
        let targets = all_invertible(n).into_iter().map(|a| SymplecticMat::from_a(&a).expect("invertible"));
        exact(worst(targets, &full, false)?)
    } else {
        Entry { value: c_cnot.value, provenance: Provenance::FromCnotOnly }
    };
    Ok(Table1Row { n, cz_only, cz_full, c_cnot, c_full })
}

/// A {P, CZ, CNOT} circuit for the CZ stage `b`, using the rewrite
/// `CZ(u,v)·Π_t CZ(u,t)CZ(v,t) = P(u)P(v)·CNOT(u,v)·P†(v)·Π_t CZ(v,t)·CNOT(u,v)`
/// greedily on the pair with the most common neighbours.
pub fn optimize_cz_stage(b: &BinMatrix) -> Result<Circuit> {
    if !b.is_square() || !b.is_symmetric() || (0..b.rows()).any(|i| b.get(i, i)) {
        return Err(Error::NotHollowSymmetric);
    }
    let n = b.rows();
    let mut adj: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| b.get(i, j)).collect()).collect();
    let mut c = Circuit::new(n);
    loop {
        // gain = edges removed − gates spent
        let mut pick = None;
        let mut best = 0i64;
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                let common = (0..n).filter(|&t| t != u && t != v && adj[u][t] && adj[v][t]).count() as i64;
                let gain = common - 2 + adj[u][v] as i64;
                if gain > best {
                    best = gain;
                    pick = Some((u, v));
                }
            }
        }
        let Some((u, v)) = pick else { break };
        let pair = adj[u][v];
        if pair {
            c.push(Gate::P(u, 1));
            c.push(Gate::P(v, 1));
            adj[u][v] = false;
            adj[v][u] = false;
        }
        c.push(Gate::Cnot(u, v));
        if pair {
            c.push(Gate::P(v, 3));
        }
        for t in 0..n {
            if t != u && t != v && adj[u][t] && adj[v][t] {
                c.push(Gate::Cz(v, t));
                for s in [u, v] {
                    adj[s][t] = false;
                    adj[t][s] = false;
                }
            }
        }
        c.push(Gate::Cnot(u, v));
    }
    for i in 0..n {
        for j in i + 1..n {
            if adj[i][j] {
                c.push(Gate::Cz(i, j));
            }
        }
    }
    Ok(c)
}

/// Exact unitary equality of two H-free circuits, global phase included.
pub fn phase_exact_equiv(c1: &Circuit, c2: &Circuit) -> Result<bool> {
    let d1 = extract_descr(c1)?;
    let d2 = extract_descr(c2)?;
    if d1.n != d2.n {
        return Ok(false);
    }
    let (d1, d2) = (canonicalize(&d1), canonicalize(&d2));
    Ok(d1.g == d2.g && d1.poly == d2.poly)
}
