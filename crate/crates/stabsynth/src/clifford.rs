//! Gates, circuits and their symplectic tableaux.
//!
//! A tableau is `[[A,B],[C,D]]` (2n×2n) with no sign column. Gates act as
//! column operations, i.e. by right multiplication, in circuit order.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::f2linalg::BinMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    H(usize),
    /// Phase gate raised to a power in 1..=3 (2 is Z, 3 is P†).
    P(usize, u8),
    Cnot(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
}

impl Gate {
    /// `P^power` on `q`, or `None` when the power vanishes mod 4.
    pub fn phase(q: usize, power: u32) -> Option<Gate> {
        match power % 4 {
            0 => None,
            k => Some(Gate::P(q, k as u8)),
        }
    }

    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(q) | Gate::P(q, _) => (q, None),
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::Swap(a, b) => (a, Some(b)),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits().1.is_some()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let (a, b) = self.qubits();
        for q in std::iter::once(a).chain(b) {
            if q >= n {
                return Err(Error::InvalidQubit { qubit: q, n });
            }
        }
        if b == Some(a) {
            return Err(Error::InvalidGate(format!("{self} acts twice on qubit {a}")));
        }
        if let Gate::P(_, k) = *self {
            if !(1..=3).contains(&k) {
                return Err(Error::InvalidGate(format!("phase power {k}")));
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::P(q, k) => Gate::P(q, 4 - k),
            g => g,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::P(q, 1) => write!(f, "P {q}"),
            Gate::P(q, 2) => write!(f, "Z {q}"),
            Gate::P(q, _) => write!(f, "PDG {q}"),
            Gate::Cnot(c, t) => write!(f, "CNOT {c} {t}"),
            Gate::Cz(a, b) => write!(f, "CZ {a} {b}"),
            Gate::Swap(a, b) => write!(f, "SWAP {a} {b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit { n, gates: vec![] }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.validate(n)?;
        }
        Ok(Circuit { n, gates })
    }

    /// Appends a gate. Panics on an invalid gate; use [`Circuit::from_gates`]
    /// for untrusted input.
    pub fn push(&mut self, g: Gate) {
        if let Err(e) = g.validate(self.n) {
            panic!("{e}");
        }
        self.gates.push(g);
    }

    pub fn append(&mut self, other: &Circuit) {
        assert_eq!(self.n, other.n);
        self.gates.extend_from_slice(&other.gates);
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    pub fn has_hadamard(&self) -> bool {
        self.gates.iter().any(|g| matches!(g, Gate::H(_)))
    }

    pub fn to_symplectic(&self) -> SymplecticMat {
        circuit_to_symplectic(self)
    }
}

/// The binary symplectic matrix of a stabilizer operation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymplecticMat {
    n: usize,
    m: BinMatrix,
}

impl fmt::Debug for SymplecticMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymplecticMat n={}\n{}", self.n, self.m)
    }
}

pub fn j_matrix(n: usize) -> BinMatrix {
    BinMatrix::from_fn(2 * n, 2 * n, |i, j| i + n == j || j + n == i)
}

/// True iff `mᵗ J m = J`.
pub fn is_symplectic(m: &BinMatrix) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("symplectic test needs a square matrix".into()));
    }
    if m.rows() % 2 == 1 {
        return Err(Error::OddDimension(m.rows()));
    }
    let j = j_matrix(m.rows() / 2);
    Ok(m.transpose().dot(&j).dot(m) == j)
}

impl SymplecticMat {
    pub fn new(m: BinMatrix) -> Result<Self> {
        if !is_symplectic(&m)? {
            return Err(Error::NotSymplectic);
        }
        Ok(SymplecticMat { n: m.rows() / 2, m })
    }

    pub fn identity(n: usize) -> Self {
        SymplecticMat { n, m: BinMatrix::identity(2 * n) }
    }

    pub fn from_blocks(a: &BinMatrix, b: &BinMatrix, c: &BinMatrix, d: &BinMatrix) -> Result<Self> {
        Self::new(BinMatrix::from_blocks(a, b, c, d))
    }

    /// `diag(A, A⁻ᵗ)`: the tableau of a CNOT circuit whose wire map is `Aᵗ`.
    pub fn from_a(a: &BinMatrix) -> Result<Self> {
        let n = a.rows();
        let d = a.invert()?.transpose();
        Self::from_blocks(a, &BinMatrix::zeros(n, n), &BinMatrix::zeros(n, n), &d)
    }

    /// Tableau of a CNOT circuit that computes `x -> g x` on the wires.
    pub fn from_wire_map(g: &BinMatrix) -> Result<Self> {
        Self::from_a(&g.transpose())
    }

    /// `[[I, B], [0, I]]`: the tableau of a P/CZ layer with symmetric `B`.
    pub fn from_b(b: &BinMatrix) -> Result<Self> {
        let n = b.rows();
        let (i, z) = (BinMatrix::identity(n), BinMatrix::zeros(n, n));
        Self::from_blocks(&i, b, &z, &i)
    }

    /// Tableau of the qubit permutation sending the state of qubit `j` to `p[j]`.
    pub fn permutation(p: &[usize]) -> Self {
        let pt = BinMatrix::permutation(p).transpose();
        let z = BinMatrix::zeros(p.len(), p.len());
        SymplecticMat { n: p.len(), m: BinMatrix::from_blocks(&pt, &z, &z, &pt) }
    }

    /// Hadamards on the qubits in `set`.
    pub fn hadamards(n: usize, set: &[usize]) -> Self {
        let mut s = Self::identity(n);
        for &q in set {
            s.apply(Gate::H(q));
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &BinMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> BinMatrix {
        self.m
    }

    pub fn a(&self) -> BinMatrix {
        self.m.submatrix(0, 0, self.n, self.n)
    }

    pub fn b(&self) -> BinMatrix {
        self.m.submatrix(0, self.n, self.n, self.n)
    }

    pub fn c(&self) -> BinMatrix {
        self.m.submatrix(self.n, 0, self.n, self.n)
    }

    pub fn d(&self) -> BinMatrix {
        self.m.submatrix(self.n, self.n, self.n, self.n)
    }

    /// The lower n×2n half `[C | D]`.
    pub fn lower_half(&self) -> BinMatrix {
        self.m.submatrix(self.n, 0, self.n, 2 * self.n)
    }

    /// `self · other`: run `self` first, then `other`.
    pub fn compose(&self, other: &SymplecticMat) -> SymplecticMat {
        assert_eq!(self.n, other.n);
        SymplecticMat { n: self.n, m: self.m.dot(&other.m) }
    }

    /// `J Mᵗ J`
    pub fn inverse(&self) -> SymplecticMat {
        let j = j_matrix(self.n);
        SymplecticMat { n: self.n, m: j.dot(&self.m.transpose()).dot(&j) }
    }

    pub fn is_identity(&self) -> bool {
        self.m.is_identity()
    }

    /// Right-multiplies by the tableau of `g`, in place.
    pub fn apply(&mut self, g: Gate) {
        let n = self.n;
        match g {
            Gate::H(k) => self.m.swap_cols(k, n + k),
            Gate::P(k, pow) => {
                if pow % 2 == 1 {
                    self.m.add_col(k, n + k);
                }
            }
            Gate::Cnot(c, t) => {
                self.m.add_col(c, t);
                self.m.add_col(n + t, n + c);
            }
            Gate::Cz(a, b) => {
                self.apply(Gate::H(b));
                self.apply(Gate::Cnot(a, b));
                self.apply(Gate::H(b));
            }
            Gate::Swap(a, b) => {
                self.apply(Gate::Cnot(a, b));
                self.apply(Gate::Cnot(b, a));
                self.apply(Gate::Cnot(a, b));
            }
        }
    }

    /// The six block identities that together are equivalent to symplecticity.
    pub fn block_conditions(m: &BinMatrix) -> [bool; 6] {
        let n = m.rows() / 2;
        let a = m.submatrix(0, 0, n, n);
        let b = m.submatrix(0, n, n, n);
        let c = m.submatrix(n, 0, n, n);
        let d = m.submatrix(n, n, n, n);
        let t = |x: &BinMatrix| x.transpose();
        let i = BinMatrix::identity(n);
        let sum = |x: BinMatrix, y: BinMatrix| x.add(&y).unwrap();
        [
            t(&a).dot(&c).is_symmetric(),
            sum(t(&a).dot(&d), t(&c).dot(&b)) == i,
            t(&b).dot(&d).is_symmetric(),
            a.dot(&t(&b)).is_symmetric(),
            sum(a.dot(&t(&d)), b.dot(&t(&c))) == i,
            c.dot(&t(&d)).is_symmetric(),
        ]
    }
}

pub fn apply_gate_right(m: &SymplecticMat, g: Gate) -> Result<SymplecticMat> {
    g.validate(m.n)?;
    let mut out = m.clone();
    out.apply(g);
    Ok(out)
}

pub fn circuit_to_symplectic(c: &Circuit) -> SymplecticMat {
    let mut m = SymplecticMat::identity(c.n);
    for &g in &c.gates {
        m.apply(g);
    }
    m
}

/// Greedy in-order layering that counts only two-qubit gates. A SWAP counts
/// as the three CNOTs it stands for.
pub fn two_qubit_depth(c: &Circuit) -> usize {
    let mut level = vec![0usize; c.n];
    for g in &c.gates {
        if let (a, Some(b)) = g.qubits() {
            let cost = if matches!(g, Gate::Swap(..)) { 3 } else { 1 };
            let d = level[a].max(level[b]) + cost;
            level[a] = d;
            level[b] = d;
        }
    }
    level.into_iter().max().unwrap_or(0)
}

pub fn is_lnn_legal(c: &Circuit) -> bool {
    c.gates.iter().all(|g| match g.qubits() {
        (a, Some(b)) => a.abs_diff(b) == 1,
        _ => true,
    })
}

/// CNOT circuit computing the wire map `x -> g x`, by Gaussian elimination.
///
/// Elimination clears below the diagonal first, then above it, so an upper
/// unitriangular `g` only produces CNOTs whose control is the higher index.
pub fn cnot_synthesis(g: &BinMatrix) -> Result<Circuit> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch("wire map must be square".into()));
    }
    let n = g.rows();
    let mut w = g.clone();
    // row ops: row t ^= row c, recorded as (c, t)
    let mut ops = vec![];
    let mut add = |w: &mut BinMatrix, c: usize, t: usize| {
        w.add_row(c, t);
        ops.push(Gate::Cnot(c, t));
    };
    for j in 0..n {
        if !w.get(j, j) {
            let p = (j + 1..n).find(|&i| w.get(i, j)).ok_or(Error::SingularMatrix)?;
            add(&mut w, p, j);
        }
        for i in j + 1..n {
            if w.get(i, j) {
                add(&mut w, j, i);
            }
        }
    }
    for j in (0..n).rev() {
        for i in 0..j {
            if w.get(i, j) {
                add(&mut w, j, i);
            }
        }
    }
    ops.reverse();
    Ok(Circuit { n, gates: ops })
}

/// The wire map `x -> g x` of a circuit made of CNOT and SWAP gates.
pub fn wire_map(c: &Circuit) -> Result<BinMatrix> {
    let mut g = BinMatrix::identity(c.n);
    for gate in &c.gates {
        match *gate {
            Gate::Cnot(a, b) => g.add_row(a, b),
            Gate::Swap(a, b) => g.swap_rows(a, b),
            _ => return Err(Error::InvalidGate(format!("{gate} is not a wire permutation or CNOT"))),
        }
    }
    Ok(g)
}

/// Inverse of a qubit permutation given as `p[j]` = destination of qubit `j`.
pub fn perm_inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (j, &t) in p.iter().enumerate() {
        inv[t] = j;
    }
    inv
}

/// `first` followed by `then`.
pub fn perm_then(first: &[usize], then: &[usize]) -> Vec<usize> {
    first.iter().map(|&t| then[t]).collect()
}

/// SWAP circuit that moves the state of qubit `j` to qubit `p[j]`.
pub fn permutation_circuit(p: &[usize]) -> Circuit {
    let n = p.len();
    let mut c = Circuit::new(n);
    // at[pos] = qubit whose state currently sits at pos
    let mut at: Vec<usize> = (0..n).collect();
    let src = perm_inverse(p);
    for t in 0..n {
        let s = at.iter().position(|&q| q == src[t]).unwrap();
        if s != t {
            c.gates.push(Gate::Swap(s, t));
            at.swap(s, t);
        }
    }
    c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subgroup {
    /// CNOT circuits: `B = C = 0`.
    Cn,
    /// CNOT circuits whose `A` is lower unitriangular (every target above its control).
    CDown,
    /// `A = D = I`, `C = 0`, `B` symmetric: P and CZ layers.
    B0,
    /// `C = 0` with `A` lower triangular.
    Borel,
}

pub fn classify_subgroup(m: &SymplecticMat) -> BTreeSet<Subgroup> {
    let mut tags = BTreeSet::new();
    let (a, b, c, d) = (m.a(), m.b(), m.c(), m.d());
    if !c.is_zero() {
        return tags;
    }
    let lower = a.is_lower_triangular();
    if lower {
        tags.insert(Subgroup::Borel);
    }
    if b.is_zero() {
        tags.insert(Subgroup::Cn);
        if lower {
            tags.insert(Subgroup::CDown);
        }
    }
    if a.is_identity() && d.is_identity() {
        tags.insert(Subgroup::B0);
    }
    tags
}

pub fn random_clifford_word(n: usize, length: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds = if n >= 2 { 4 } else { 2 };
    let mut c = Circuit::new(n);
    if n == 0 {
        return c;
    }
    for _ in 0..length {
        let g = match rng.gen_range(0..kinds) {
            0 => Gate::H(rng.gen_range(0..n)),
            1 => Gate::P(rng.gen_range(0..n), 1),
            k => {
                let a = rng.gen_range(0..n);
                let b = (a + rng.gen_range(1..n)) % n;
                if k == 2 {
                    Gate::Cnot(a, b)
                } else {
                    Gate::Cz(a, b)
                }
            }
        };
        c.gates.push(g);
    }
    c
}

pub fn invert_circuit(c: &Circuit) -> Circuit {
    Circuit { n: c.n, gates: c.gates.iter().rev().map(Gate::inverse).collect() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StageTag {
    H,
    P,
    C,
    Cz,
}

impl fmt::Display for StageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StageTag::H => "H",
            StageTag::P => "P",
            StageTag::C => "C",
            StageTag::Cz => "CZ",
        })
    }
}

impl std::str::FromStr for StageTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" => Ok(StageTag::H),
            "P" => Ok(StageTag::P),
            "C" => Ok(StageTag::C),
            "CZ" => Ok(StageTag::Cz),
            _ => Err(Error::InvalidGate(format!("unknown stage tag {s}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredCircuit {
    pub n: usize,
    pub stages: Vec<(StageTag, Circuit)>,
}

impl LayeredCircuit {
    pub fn new(n: usize) -> Self {
        LayeredCircuit { n, stages: vec![] }
    }

    pub fn push(&mut self, tag: StageTag, c: Circuit) {
        assert_eq!(c.n, self.n);
        self.stages.push((tag, c));
    }

    pub fn tags(&self) -> Vec<StageTag> {
        self.stages.iter().map(|(t, _)| *t).collect()
    }

    pub fn flatten(&self) -> Circuit {
        let mut out = Circuit::new(self.n);
        for (_, c) in &self.stages {
            out.append(c);
        }
        out
    }

    pub fn to_symplectic(&self) -> SymplecticMat {
        circuit_to_symplectic(&self.flatten())
    }

    /// Checks that every stage only holds gates of its kind, with at most one
    /// gate per qubit in H and P stages.
    pub fn validate(&self) -> Result<()> {
        for (tag, c) in &self.stages {
            let mut seen = vec![false; self.n];
            for g in &c.gates {
                g.validate(self.n)?;
                let ok = match (tag, g) {
                    (StageTag::H, Gate::H(q)) | (StageTag::P, Gate::P(q, _)) => {
                        !std::mem::replace(&mut seen[*q], true)
                    }
                    (StageTag::C, Gate::Cnot(..)) | (StageTag::Cz, Gate::Cz(..)) => true,
                    _ => false,
                };
                if !ok {
                    return Err(Error::Internal(format!("gate {g} not allowed in {tag} stage")));
                }
            }
        }
        Ok(())
    }
}
