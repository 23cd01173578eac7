//! Synthesis on a linear nearest-neighbour chain.
//!
//! The central piece is a CNOT network of depth `2n+2` that reverses the
//! qubit order while every wire passes through interval parities
//! `x_j ⊕ … ⊕ x_k`. Dropping Phase gates on those wires gives a CZ stage
//! followed by a reversal (`CZ-hat`). Two of them, with the reversals
//! cancelling, plus depth-`5n` CNOT stages give the full pipeline.

use std::collections::BTreeMap;
use std::fmt;

use crate::clifford::{invert_circuit, wire_map, Circuit, Gate, SymplecticMat, StageTag};
use crate::f2linalg::BinMatrix;
use crate::phasepoly::{extract_descr, reduce_to_quadratic, PhaseDescr};
use crate::synthesis::seven_stage;
use crate::{Error, Result};

/// The parity `x_j ⊕ x_{j+1} ⊕ … ⊕ x_k`, 1-based and inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntervalFunc {
    pub j: usize,
    pub k: usize,
}

impl IntervalFunc {
    pub fn new(j: usize, k: usize) -> Option<Self> {
        (1 <= j && j <= k).then_some(IntervalFunc { j, k })
    }

    pub fn single(j: usize) -> Self {
        IntervalFunc { j, k: j }
    }

    pub fn is_single(self) -> bool {
        self.j == self.k
    }

    /// Bit `i` stands for `x_{i+1}`. Needs `k ≤ 64`.
    pub fn mask(self) -> u64 {
        let hi = if self.k == 64 { u64::MAX } else { (1u64 << self.k) - 1 };
        hi & !((1u64 << (self.j - 1)) - 1)
    }

    pub fn from_mask(m: u64) -> Option<Self> {
        if m == 0 {
            return None;
        }
        let lo = m.trailing_zeros() as usize;
        let hi = 63 - m.leading_zeros() as usize;
        (m.count_ones() as usize == hi - lo + 1).then_some(IntervalFunc { j: lo + 1, k: hi + 1 })
    }

    // Sum of two parities that is again an interval. Only called on wire pairs
    // the network guarantees to be compatible.
    fn xor(self, o: IntervalFunc) -> IntervalFunc {
        let (a, b) = if self.j <= o.j { (self, o) } else { (o, self) };
        if a.k + 1 == b.j {
            IntervalFunc { j: a.j, k: b.k }
        } else if a.j == b.j {
            IntervalFunc { j: a.k.min(b.k) + 1, k: a.k.max(b.k) }
        } else if a.k == b.k {
            IntervalFunc { j: a.j, k: b.j - 1 }
        } else {
            panic!("{a} + {b} is not an interval")
        }
    }
}

impl fmt::Display for IntervalFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.j, self.k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReversalNetwork {
    pub n: usize,
    /// Depth-2 blocks, alternating S₁ and S₂. A pair of them is one `S`.
    pub stages: Vec<Circuit>,
    /// `wire_trace[t][w]`: the parity on wire `w` after `t` applications of `S`,
    /// for `t = 0..=n/2`.
    pub wire_trace: Vec<Vec<IntervalFunc>>,
}

impl ReversalNetwork {
    pub fn circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.n);
        for s in &self.stages {
            c.append(s);
        }
        c
    }
}

fn s_block(n: usize, second: bool) -> Circuit {
    let mut c = Circuit::new(n);
    for start in [0, 1] {
        // S₁ points the even-started layer downwards, S₂ upwards; the odd
        // layer goes the other way.
        let down = (start == 0) != second;
        for i in (start..n.saturating_sub(1)).step_by(2) {
            c.gates.push(if down { Gate::Cnot(i, i + 1) } else { Gate::Cnot(i + 1, i) });
        }
    }
    c
}

/// The two index patterns `(Pj, Pk)` of length `2n−3` (odd n) or `2n−2`
/// (even n). Defined for `n ≥ 3`.
pub fn patterns(n: usize) -> (Vec<usize>, Vec<usize>) {
    assert!(n >= 3);
    let pairs = |it: &mut dyn Iterator<Item = usize>| it.flat_map(|v| [v, v]).collect::<Vec<_>>();
    let mut pj;
    let mut pk;
    if n % 2 == 1 {
        pj = vec![n - 1];
        pj.extend(pairs(&mut (2..=n - 3).rev().step_by(2)));
        pj.extend([1, 1]);
        pj.extend(pairs(&mut (3..=n - 2).step_by(2)));
        pk = pairs(&mut (3..=n).step_by(2));
        pk.extend(pairs(&mut (4..=n - 1).rev().step_by(2)));
        pk.push(2);
    } else {
        pj = vec![n];
        pj.extend(pairs(&mut (2..=n - 2).rev().step_by(2)));
        pj.extend([1, 1]);
        pj.extend(pairs(&mut (3..=n - 3).step_by(2)));
        pj.push(n - 1);
        pk = pairs(&mut (3..=n - 1).step_by(2));
        pk.extend([n, n]);
        pk.extend(pairs(&mut (2..=n - 2).rev().step_by(2)));
    }
    (pj, pk)
}

/// Closed-form content of 1-based wire `i` after `t ≥ 1` applications of `S`.
fn pattern_interval(pj: &[usize], pk: &[usize], n: usize, t: usize, i: usize) -> IntervalFunc {
    let off = if n % 2 == 1 { n - 1 } else { n };
    IntervalFunc { j: pj[off + i - 2 * t - 1], k: pk[2 * t + i - 3] }
}

pub fn reversal_network(n: usize) -> ReversalNetwork {
    let blocks = if n < 2 { 0 } else { n + 1 };
    let stages: Vec<Circuit> = (0..blocks).map(|b| s_block(n, b % 2 == 1)).collect();
    let mut wires: Vec<IntervalFunc> = (1..=n).map(IntervalFunc::single).collect();
    let mut wire_trace = vec![wires.clone()];
    for (b, s) in stages.iter().enumerate() {
        for g in &s.gates {
            if let Gate::Cnot(c, t) = *g {
                wires[t] = wires[t].xor(wires[c]);
            }
        }
        if b % 2 == 1 && wire_trace.len() <= n / 2 {
            wire_trace.push(wires.clone());
        }
    }
    if n >= 3 {
        let (pj, pk) = patterns(n);
        for (t, row) in wire_trace.iter().enumerate().skip(1) {
            for (w, iv) in row.iter().enumerate() {
                debug_assert_eq!(*iv, pattern_interval(&pj, &pk, n, t, w + 1));
            }
        }
    }
    ReversalNetwork { n, stages, wire_trace }
}

/// Returns the network split after its first `S`, with all phases in the
/// second part.
fn czhat_split(n: usize, quad: &PhaseDescr) -> Result<(Circuit, Circuit)> {
    if quad.n != n {
        return Err(Error::DimensionMismatch(format!("phase on {} qubits, expected {n}", quad.n)));
    }
    if !quad.is_quadratic() {
        return Err(Error::NotQuadratic);
    }
    if !quad.g.is_identity() {
        return Err(Error::NonIdentityLinearPart);
    }
    // Over y_j = x_1 ⊕ … ⊕ x_j every quadratic term is an interval:
    // y_j ↦ [1,j] and y_j ⊕ y_k ↦ [j+1,k].
    let mut over_y = PhaseDescr::identity(n);
    for (f, &u) in &quad.poly {
        over_y.add_term(f.mask() ^ (f.mask() >> 1), u);
    }
    let mut pending: BTreeMap<IntervalFunc, u8> = BTreeMap::new();
    for (f, &u) in &reduce_to_quadratic(&over_y).poly {
        let mut x = f.mask();
        let mut s = 1;
        while s < 64 {
            x ^= x >> s;
            s <<= 1;
        }
        let iv = IntervalFunc::from_mask(x)
            .ok_or_else(|| Error::Internal(format!("y-term {f} is not an interval")))?;
        pending.insert(iv, u);
    }

    let net = reversal_network(n);
    let mut head = Circuit::new(n);
    let mut tail = Circuit::new(n);
    for (b, s) in net.stages.iter().enumerate() {
        if b < 2 {
            head.append(s);
        } else {
            tail.append(s);
        }
        let t = (b + 1) / 2;
        if b % 2 == 1 && t < net.wire_trace.len() {
            for (w, iv) in net.wire_trace[t].iter().enumerate() {
                if iv.is_single() {
                    continue;
                }
                if let Some(u) = pending.remove(iv) {
                    tail.gates.extend(Gate::phase(w, u as u32));
                }
            }
        }
    }
    // Single literals go at the end, where x_j sits on wire n−j.
    let singles: Vec<(IntervalFunc, u8)> =
        pending.iter().filter(|(iv, _)| iv.is_single()).map(|(iv, u)| (*iv, *u)).collect();
    for (iv, u) in singles {
        pending.remove(&iv);
        tail.gates.extend(Gate::phase(n - iv.j, u as u32));
    }
    if let Some(iv) = pending.keys().next() {
        return Err(Error::Internal(format!("interval {iv} never appears in the network")));
    }
    Ok((head, tail))
}

/// A circuit applying the phase `quad` and then reversing the qubit order.
pub fn czhat_synthesize(n: usize, quad: &PhaseDescr) -> Result<Circuit> {
    let (mut head, tail) = czhat_split(n, quad)?;
    head.append(&tail);
    Ok(head)
}

// Kutin–Moulton–Smithline. Rows are bit masks; `ops` collects (c, t) with
// row t ^= row c.
fn kms(g: &BinMatrix) -> Result<Vec<(usize, usize)>> {
    let n = g.rows();
    let inv: Vec<u64> = (0..n).map(|i| g.row_mask(i)).collect();
    let mut mat: Vec<u64> = {
        let gi = g.invert()?;
        (0..n).map(|i| gi.row_mask(i)).collect()
    };
    let mut ops = vec![];
    to_north_west(n, &mut mat, &inv, &mut ops);
    north_west_to_identity(n, &mut mat, &mut ops);
    Ok(ops)
}

fn bit(r: u64, j: usize) -> bool {
    r >> j & 1 == 1
}

fn row_op(mat: &mut [u64], ops: &mut Vec<(usize, usize)>, c: usize, t: usize) {
    mat[t] ^= mat[c];
    ops.push((c, t));
}

// column dst ^= column src
fn col_op(mat: &mut [u64], src: usize, dst: usize) {
    for r in mat.iter_mut() {
        if bit(*r, src) {
            *r ^= 1 << dst;
        }
    }
}

fn lower_triangular(n: usize, mat: &[u64], inv: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let mut m = mat.to_vec();
    let mut ops = vec![];
    for i in (0..n).rev() {
        let first = 63 - m[i].leading_zeros() as usize;
        for j in 0..first {
            if bit(m[i], j) {
                col_op(&mut m, first, j);
            }
        }
        for k in (0..i).rev() {
            if bit(m[k], first) {
                row_op(&mut m, &mut ops, i, k);
            }
        }
    }
    let mut mat_t = mat.to_vec();
    let mut inv_t = inv.to_vec();
    for &(a, b) in &ops {
        mat_t[b] ^= mat_t[a];
        col_op(&mut inv_t, b, a);
    }
    (mat_t, inv_t)
}

fn in_span(label_t: &[usize], inv_t: &[u64], row: u64, k: usize) -> bool {
    let w = inv_t.iter().enumerate().filter(|(l, _)| bit(row, *l)).fold(0, |acc, (_, r)| acc ^ r);
    !bit(w, label_t[k])
}

// Odd-even sort passes until two consecutive passes are idle.
fn odd_even(n: usize, mut step: impl FnMut(usize) -> bool) {
    let mut first = 0;
    let mut idle = 0;
    while idle < 2 {
        let mut busy = false;
        for i in (first..n.saturating_sub(1)).step_by(2) {
            busy |= step(i);
        }
        idle = if busy { 0 } else { idle + 1 };
        first ^= 1;
    }
}

fn to_north_west(n: usize, mat: &mut [u64], inv: &[u64], ops: &mut Vec<(usize, usize)>) {
    let (mat_t, inv_t) = lower_triangular(n, mat, inv);
    let mut label: Vec<usize> =
        (0..n).map(|i| (0..n).find(|&j| bit(mat_t[i], n - 1 - j)).unwrap()).collect();
    let mut label_t = vec![0; n];
    for (i, &l) in label.iter().enumerate() {
        label_t[l] = i;
    }
    odd_even(n, |i| {
        if label[i] <= label[i + 1] {
            return false;
        }
        let k = label[i + 1];
        if in_span(&label_t, &inv_t, mat[i + 1], k) {
        } else if in_span(&label_t, &inv_t, mat[i + 1] ^ mat[i], k) {
            row_op(mat, ops, i, i + 1);
        } else if in_span(&label_t, &inv_t, mat[i], k) {
            row_op(mat, ops, i + 1, i);
            row_op(mat, ops, i, i + 1);
        }
        label.swap(i, i + 1);
        true
    });
}

fn north_west_to_identity(n: usize, mat: &mut [u64], ops: &mut Vec<(usize, usize)>) {
    let mut label: Vec<usize> = (0..n).rev().collect();
    odd_even(n, |i| {
        if label[i] <= label[i + 1] {
            return false;
        }
        if !bit(mat[i], label[i + 1]) {
            row_op(mat, ops, i + 1, i);
        }
        row_op(mat, ops, i, i + 1);
        row_op(mat, ops, i + 1, i);
        label.swap(i, i + 1);
        true
    });
}

fn lnn_from_wire_map(g: &BinMatrix) -> Result<Circuit> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch("linear map must be square".into()));
    }
    let n = g.rows();
    if n > 64 {
        return Err(Error::TooManyQubits(n));
    }
    // The sort would route the identity through two reversals.
    if g.is_identity() {
        return Ok(Circuit::new(n));
    }
    let gates = kms(g)?.into_iter().map(|(c, t)| Gate::Cnot(c, t)).collect();
    Ok(Circuit { n, gates })
}

/// Nearest-neighbour CNOT circuit of depth at most `5n` whose tableau has
/// linear part (A block) `a`.
pub fn c_stage_lnn(a: &BinMatrix) -> Result<Circuit> {
    lnn_from_wire_map(&a.transpose())
}

fn reverse_qubits(c: &Circuit) -> Circuit {
    let r = |q: usize| c.n - 1 - q;
    let gates = c
        .gates
        .iter()
        .map(|g| match *g {
            Gate::H(q) => Gate::H(r(q)),
            Gate::P(q, u) => Gate::P(r(q), u),
            Gate::Cnot(a, b) => Gate::Cnot(r(a), r(b)),
            Gate::Cz(a, b) => Gate::Cz(r(a), r(b)),
            Gate::Swap(a, b) => Gate::Swap(r(a), r(b)),
        })
        .collect();
    Circuit { n: c.n, gates }
}

fn negated(d: &PhaseDescr) -> PhaseDescr {
    let mut out = PhaseDescr::identity(d.n);
    for (f, &u) in &d.poly {
        out.add_term(f.mask(), 4 - u);
    }
    out
}

/// Nearest-neighbour circuit for any tableau, in two-qubit depth at most
/// `14n − 4`.
///
/// Starting from `-C-CZ-P-H-P-CZ-C-`, the first CZ is rewritten as CZ-hat
/// followed by a reversal. Pushing that reversal through the middle turns the
/// second CZ into a CZ-hat as well, and the two reversals cancel. The outer
/// `S` block of each CZ-hat carries no phases, so it is merged into the
/// neighbouring CNOT stage.
pub fn pipeline_lnn(m: &SymplecticMat) -> Result<Circuit> {
    let n = m.n();
    let l = seven_stage(m)?;
    let expected = [StageTag::C, StageTag::Cz, StageTag::P, StageTag::H, StageTag::P, StageTag::Cz, StageTag::C];
    if l.tags() != expected {
        return Err(Error::Internal(format!("unexpected stage layout {:?}", l.tags())));
    }
    let st = |i: usize| &l.stages[i].1;

    if st(1).is_empty() && st(5).is_empty() {
        let mut out = lnn_from_wire_map(&wire_map(st(0))?)?;
        for i in 2..=4 {
            out.append(st(i));
        }
        out.append(&lnn_from_wire_map(&wire_map(st(6))?)?);
        return check_tableau(out, m);
    }

    let (head1, tail1) = czhat_split(n, &extract_descr(st(1))?)?;
    // CZ-hat(q∘rev) = CZ-hat(−q)⁻¹, whose first S block ends up last.
    let (head2, tail2) = czhat_split(n, &negated(&extract_descr(st(5))?))?;

    let g1 = wire_map(&head1)?.dot(&wire_map(st(0))?);
    let g2 = wire_map(st(6))?.dot(&wire_map(&invert_circuit(&head2))?);

    let mut out = lnn_from_wire_map(&g1)?;
    out.append(&tail1);
    for i in 2..=4 {
        out.append(&reverse_qubits(st(i)));
    }
    out.append(&invert_circuit(&tail2));
    out.append(&lnn_from_wire_map(&g2)?);
    check_tableau(out, m)
}

fn check_tableau(c: Circuit, m: &SymplecticMat) -> Result<Circuit> {
    if c.to_symplectic() != *m {
        return Err(Error::Internal("nearest-neighbour circuit does not recompose".into()));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{is_lnn_legal, two_qubit_depth};
    use crate::phasepoly::phase_evaluate;
    use crate::synthesis::random_symplectic;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn iv(j: usize, k: usize) -> IntervalFunc {
        IntervalFunc::new(j, k).unwrap()
    }

    fn reversal_map(n: usize) -> BinMatrix {
        BinMatrix::from_fn(n, n, |i, j| i + j == n - 1)
    }

    #[test]
    fn interval_masks() {
        assert_eq!(iv(2, 4).mask(), 0b1110);
        assert_eq!(IntervalFunc::from_mask(0b1110), Some(iv(2, 4)));
        assert_eq!(IntervalFunc::from_mask(0b1010), None);
        assert_eq!(iv(1, 64).mask(), u64::MAX);
        assert_eq!(iv(3, 5).xor(iv(1, 2)), iv(1, 5));
        assert_eq!(iv(1, 5).xor(iv(1, 2)), iv(3, 5));
        assert_eq!(iv(1, 5).xor(iv(4, 5)), iv(1, 3));
    }

    #[test]
    fn block_lists() {
        let s1 = s_block(7, false);
        assert_eq!(
            s1.gates,
            [(0, 1), (2, 3), (4, 5), (2, 1), (4, 3), (6, 5)].map(|(c, t)| Gate::Cnot(c, t)).to_vec()
        );
        let s2 = s_block(6, true);
        assert_eq!(s2.gates, [(1, 0), (3, 2), (5, 4), (1, 2), (3, 4)].map(|(c, t)| Gate::Cnot(c, t)).to_vec());
    }

    #[test]
    fn small_networks() {
        let r1 = reversal_network(1);
        assert!(r1.stages.is_empty());
        assert_eq!(r1.wire_trace, vec![vec![iv(1, 1)]]);

        let r4 = reversal_network(4);
        let c = r4.circuit();
        assert_eq!(two_qubit_depth(&c), 10);
        assert_eq!(wire_map(&c).unwrap(), reversal_map(4));
    }

    #[test]
    fn fig2_patterns() {
        let (pj, pk) = patterns(7);
        assert_eq!(pj, vec![6, 4, 4, 2, 2, 1, 1, 3, 3, 5, 5]);
        assert_eq!(pk, vec![3, 3, 5, 5, 7, 7, 6, 6, 4, 4, 2]);
        let (pj, pk) = patterns(4);
        assert_eq!(pj, vec![4, 2, 2, 1, 1, 3]);
        assert_eq!(pk, vec![3, 3, 4, 4, 2, 2]);
    }

    #[test]
    fn czhat_examples() {
        let c = czhat_synthesize(3, &PhaseDescr::identity(3)).unwrap();
        assert_eq!(c, reversal_network(3).circuit());

        let mut q = PhaseDescr::identity(2);
        q.add_term(0b11, 1);
        let c = czhat_synthesize(2, &q).unwrap();
        assert_eq!(c.gates.iter().filter(|g| matches!(g, Gate::P(..))).count(), 1);
        assert!(c.gates.contains(&Gate::P(1, 1)));

        let mut bad = PhaseDescr::identity(3);
        bad.add_term(0b111, 1);
        assert_eq!(czhat_synthesize(3, &bad), Err(Error::NotQuadratic));
        let mut bad = PhaseDescr::identity(2);
        bad.g = reversal_map(2);
        assert_eq!(czhat_synthesize(2, &bad), Err(Error::NonIdentityLinearPart));
    }

    #[test]
    fn czhat_full_quad() {
        let n = 7;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut q = PhaseDescr::identity(n);
        for j in 0..n {
            q.add_term(1 << j, rng.gen_range(1..4));
            for k in j + 1..n {
                q.add_term(1 << j | 1 << k, rng.gen_range(1..4));
            }
        }
        let c = czhat_synthesize(n, &q).unwrap();
        assert!(is_lnn_legal(&c));
        assert!(two_qubit_depth(&c) <= 2 * n + 2);
        let d = extract_descr(&c).unwrap();
        assert_eq!(d.g, reversal_map(n));
        for x in 0..1u64 << n {
            assert_eq!(phase_evaluate(&d, x).0, phase_evaluate(&q, x).0);
        }
    }

    #[test]
    fn kms_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=9 {
            for _ in 0..30 {
                let a = loop {
                    let a = BinMatrix::from_fn(n, n, |_, _| rng.gen());
                    if a.rank() == n {
                        break a;
                    }
                };
                let c = c_stage_lnn(&a).unwrap();
                assert!(is_lnn_legal(&c));
                assert!(two_qubit_depth(&c) <= 5 * n);
                assert_eq!(c.to_symplectic().a(), a);
            }
        }
        assert!(c_stage_lnn(&BinMatrix::identity(4)).unwrap().is_empty());
        assert_eq!(c_stage_lnn(&BinMatrix::zeros(2, 2)), Err(Error::SingularMatrix));
    }

    #[test]
    fn pipeline_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert!(pipeline_lnn(&SymplecticMat::identity(3)).unwrap().is_empty());
        for n in 1..=6 {
            for _ in 0..10 {
                let m = random_symplectic(n, &mut rng);
                let c = pipeline_lnn(&m).unwrap();
                assert!(is_lnn_legal(&c));
                assert!(two_qubit_depth(&c) <= 14 * n - 4, "n={n}");
                assert_eq!(c.to_symplectic(), m);
            }
        }
    }
}
