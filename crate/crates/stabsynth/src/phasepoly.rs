//! Phase polynomials of circuits over {P, CNOT, CZ}.
//!
//! Such a circuit maps `|x⟩` to `i^{p(x)} |g x⟩`, where `p` is a Z4-weighted
//! sum of parities of `x` and `g` is an invertible linear map. Folding a long
//! {P, CNOT} word means computing `(p, g)`, lowering `p` to terms of weight at
//! most two, and emitting one P, one CZ and one CNOT stage.

use std::collections::BTreeMap;
use std::fmt;

use crate::clifford::{cnot_synthesis, Circuit, Gate, LayeredCircuit, StageTag};
use crate::error::{Error, Result};
use crate::f2linalg::BinMatrix;

/// Extraction is exponential in the worst case, so it is capped.
pub const MAX_QUBITS: usize = 24;

/// A nonzero parity `x_{j1} ⊕ x_{j2} ⊕ ...`, stored as a bitmask over the inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearFunc(u64);

impl LinearFunc {
    pub fn new(mask: u64) -> Option<Self> {
        (mask != 0).then_some(LinearFunc(mask))
    }

    pub fn single(j: usize) -> Self {
        LinearFunc(1 << j)
    }

    pub fn pair(j: usize, k: usize) -> Self {
        assert_ne!(j, k);
        LinearFunc((1 << j) | (1 << k))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    pub fn eval(self, x: u64) -> u8 {
        ((self.0 & x).count_ones() & 1) as u8
    }
}

impl fmt::Display for LinearFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> =
            (0..64).filter(|j| self.0 >> j & 1 == 1).map(|j| format!("x{j}")).collect();
        f.write_str(&vars.join("+"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseDescr {
    pub n: usize,
    /// Nonzero Z4 coefficients only.
    pub poly: BTreeMap<LinearFunc, u8>,
    pub g: BinMatrix,
}

impl PhaseDescr {
    pub fn identity(n: usize) -> Self {
        PhaseDescr { n, poly: BTreeMap::new(), g: BinMatrix::identity(n) }
    }

    /// Adds `u·f` to the polynomial, mod 4. A zero mask is a constant-zero
    /// parity and is ignored.
    pub fn add_term(&mut self, mask: u64, u: u8) {
        let Some(f) = LinearFunc::new(mask) else { return };
        let e = self.poly.entry(f).or_insert(0);
        *e = (*e + u) % 4;
        if *e == 0 {
            self.poly.remove(&f);
        }
    }

    pub fn coeff(&self, mask: u64) -> u8 {
        LinearFunc::new(mask).and_then(|f| self.poly.get(&f).copied()).unwrap_or(0)
    }

    pub fn is_quadratic(&self) -> bool {
        self.poly.keys().all(|f| f.weight() <= 2)
    }
}

pub fn extract_descr(c: &Circuit) -> Result<PhaseDescr> {
    if c.n > MAX_QUBITS {
        return Err(Error::TooManyQubits(c.n));
    }
    let mut d = PhaseDescr::identity(c.n);
    let mut wires: Vec<u64> = (0..c.n).map(|i| 1 << i).collect();
    for g in &c.gates {
        match *g {
            Gate::H(_) => return Err(Error::HadamardNotSupported),
            Gate::P(q, u) => d.add_term(wires[q], u),
            Gate::Cnot(a, b) => wires[b] ^= wires[a],
            Gate::Cz(a, b) => {
                d.add_term(wires[a], 1);
                d.add_term(wires[b], 1);
                d.add_term(wires[a] ^ wires[b], 3);
            }
            Gate::Swap(a, b) => wires.swap(a, b),
        }
    }
    d.g = BinMatrix::from_row_masks(c.n, &wires);
    Ok(d)
}

/// Returns `(phase, g x)` where the amplitude picks up `i^phase`.
pub fn phase_evaluate(d: &PhaseDescr, x: u64) -> (u8, u64) {
    let phase = d.poly.iter().fold(0u32, |acc, (f, &u)| acc + u as u32 * f.eval(x) as u32);
    ((phase % 4) as u8, d.g.apply(x))
}

/// Rewrites every term of weight ≥ 3 using
/// `a+b+c+(a⊕b)+(a⊕c)+(b⊕c)+(a⊕b⊕c) ≡ 0 (mod 4)`, where `a` and `b` are the two
/// lowest variables of the term and `c` the rest.
pub fn reduce_to_quadratic(d: &PhaseDescr) -> PhaseDescr {
    let mut out = d.clone();
    let top = out.poly.keys().map(|f| f.weight()).max().unwrap_or(0);
    for s in (3..=top).rev() {
        let heavy: Vec<(LinearFunc, u8)> =
            out.poly.iter().filter(|(f, _)| f.weight() == s).map(|(f, u)| (*f, *u)).collect();
        for (f, u) in heavy {
            out.poly.remove(&f);
            let m = f.mask();
            let a = m & m.wrapping_neg();
            let b = (m ^ a) & (m ^ a).wrapping_neg();
            let c = m ^ a ^ b;
            let v = (3 * u) % 4;
            for t in [a, b, c, a ^ b, a ^ c, b ^ c] {
                out.add_term(t, v);
            }
        }
    }
    out
}

/// A unique representative of the phase function: terms of weight ≤ 2, with
/// pair coefficients in {0,1}. Uses `2(x_j⊕x_k) ≡ 2x_j + 2x_k (mod 4)`.
pub fn canonicalize(d: &PhaseDescr) -> PhaseDescr {
    let mut out = reduce_to_quadratic(d);
    let pairs: Vec<(LinearFunc, u8)> = out
        .poly
        .iter()
        .filter(|(f, u)| f.weight() == 2 && **u >= 2)
        .map(|(f, u)| (*f, *u))
        .collect();
    for (f, u) in pairs {
        out.poly.remove(&f);
        out.add_term(f.mask(), u - 2);
        let m = f.mask();
        let lo = m & m.wrapping_neg();
        out.add_term(lo, 2);
        out.add_term(m ^ lo, 2);
    }
    out
}

/// Stage orders for a folded {P, CNOT, CZ} circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PczcOrder {
    PCzC,
    CPCz,
    CzPC,
    CCzP,
}

impl PczcOrder {
    pub const ALL: [PczcOrder; 4] = [PczcOrder::PCzC, PczcOrder::CPCz, PczcOrder::CzPC, PczcOrder::CCzP];

    pub fn tags(self) -> [StageTag; 3] {
        use StageTag::*;
        match self {
            PczcOrder::PCzC => [P, Cz, C],
            PczcOrder::CPCz => [C, P, Cz],
            PczcOrder::CzPC => [Cz, P, C],
            PczcOrder::CCzP => [C, Cz, P],
        }
    }

    fn linear_first(self) -> bool {
        matches!(self, PczcOrder::CPCz | PczcOrder::CCzP)
    }
}

impl fmt::Display for PczcOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.tags();
        write!(f, "{}-{}-{}", t[0], t[1], t[2])
    }
}

impl std::str::FromStr for PczcOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PczcOrder::ALL
            .into_iter()
            .find(|o| o.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidGate(format!("unknown stage order {s}")))
    }
}

/// Rewrites the phase over the outputs `y = g x`, so it can follow the CNOT stage.
fn over_outputs(d: &PhaseDescr) -> Result<PhaseDescr> {
    let ginv_t = d.g.invert()?.transpose();
    let mut out = PhaseDescr { n: d.n, poly: BTreeMap::new(), g: d.g.clone() };
    for (f, &u) in &d.poly {
        // f(x) = f(g⁻¹ y) = (f·g⁻¹)·y
        let mut m = 0u64;
        for i in 0..d.n {
            if (f.mask() & ginv_t.row_mask(i)).count_ones() & 1 == 1 {
                m |= 1 << i;
            }
        }
        out.add_term(m, u);
    }
    Ok(reduce_to_quadratic(&out))
}

/// One P stage and one CZ stage realizing a quadratic phase on the current wires.
fn phase_stages(d: &PhaseDescr) -> (Circuit, Circuit) {
    let n = d.n;
    let mut power = vec![0u32; n];
    let mut cz = Circuit::new(n);
    for (f, &u) in &d.poly {
        let m = f.mask();
        let j = m.trailing_zeros() as usize;
        if f.weight() == 1 {
            power[j] += u as u32;
            continue;
        }
        let k = (m ^ (1 << j)).trailing_zeros() as usize;
        if u == 2 {
            power[j] += 2;
            power[k] += 2;
        } else {
            power[j] += u as u32;
            power[k] += u as u32;
            cz.gates.push(Gate::Cz(j, k));
        }
    }
    let p = Circuit { n, gates: (0..n).filter_map(|q| Gate::phase(q, power[q])).collect() };
    (p, cz)
}

pub fn synthesize_pczc(d: &PhaseDescr, order: PczcOrder) -> Result<LayeredCircuit> {
    if !d.is_quadratic() {
        return Err(Error::NotQuadratic);
    }
    let c = cnot_synthesis(&d.g)?;
    let phase = if order.linear_first() { over_outputs(d)? } else { d.clone() };
    let (p, cz) = phase_stages(&phase);
    let mut out = LayeredCircuit::new(d.n);
    for tag in order.tags() {
        let stage = match tag {
            StageTag::P => p.clone(),
            StageTag::Cz => cz.clone(),
            _ => c.clone(),
        };
        out.push(tag, stage);
    }
    Ok(out)
}

pub fn fold(c: &Circuit, order: PczcOrder) -> Result<LayeredCircuit> {
    let d = reduce_to_quadratic(&extract_descr(c)?);
    synthesize_pczc(&d, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circ(n: usize, g: Vec<Gate>) -> Circuit {
        Circuit::from_gates(n, g).unwrap()
    }

    fn terms(d: &PhaseDescr) -> Vec<(u64, u8)> {
        d.poly.iter().map(|(f, u)| (f.mask(), *u)).collect()
    }

    #[test]
    fn extract_examples() {
        let d = extract_descr(&circ(2, vec![Gate::P(0, 1)])).unwrap();
        assert_eq!(terms(&d), vec![(0b01, 1)]);
        assert!(d.g.is_identity());

        let d = extract_descr(&circ(2, vec![Gate::Cz(0, 1)])).unwrap();
        assert_eq!(terms(&d), vec![(0b01, 1), (0b10, 1), (0b11, 3)]);

        let d = extract_descr(&circ(2, vec![Gate::Cnot(0, 1), Gate::P(1, 1)])).unwrap();
        assert_eq!(terms(&d), vec![(0b11, 1)]);
        assert_eq!(d.g, BinMatrix::from_rows(&[[1, 0], [1, 1]]));

        assert_eq!(
            extract_descr(&circ(1, vec![Gate::H(0)])),
            Err(Error::HadamardNotSupported)
        );
    }

    #[test]
    fn evaluate_examples() {
        let d = extract_descr(&circ(3, vec![Gate::P(0, 1)])).unwrap();
        assert_eq!(phase_evaluate(&d, 0), (0, 0));
        assert_eq!(phase_evaluate(&d, 1), (1, 1));
        let d = extract_descr(&circ(3, vec![Gate::Cz(0, 1)])).unwrap();
        assert_eq!(phase_evaluate(&d, 0b011), (2, 0b011));
    }

    #[test]
    fn six_term_rewrite() {
        let mut d = PhaseDescr::identity(3);
        d.add_term(0b111, 1);
        let r = reduce_to_quadratic(&d);
        assert_eq!(
            terms(&r),
            vec![(0b001, 3), (0b010, 3), (0b011, 3), (0b100, 3), (0b101, 3), (0b110, 3)]
        );
        assert_eq!(reduce_to_quadratic(&r), r);
    }

    #[test]
    fn identity_on_three_bits() {
        for x in 0u8..8 {
            let (a, b, c) = (x & 1, x >> 1 & 1, x >> 2 & 1);
            let s = a + b + c + (a ^ b) + (a ^ c) + (b ^ c) + (a ^ b ^ c);
            assert_eq!(s % 4, 0);
        }
    }

    #[test]
    fn synthesis_rules() {
        let mut d = PhaseDescr::identity(2);
        d.add_term(0b01, 1);
        let l = synthesize_pczc(&d, PczcOrder::PCzC).unwrap();
        assert_eq!(l.stages[0].1.gates, vec![Gate::P(0, 1)]);
        assert!(l.stages[1].1.is_empty() && l.stages[2].1.is_empty());

        let d = extract_descr(&circ(2, vec![Gate::Cz(0, 1)])).unwrap();
        let l = synthesize_pczc(&d, PczcOrder::PCzC).unwrap();
        assert!(l.stages[0].1.is_empty());
        assert_eq!(l.stages[1].1.gates, vec![Gate::Cz(0, 1)]);

        let mut d = PhaseDescr::identity(2);
        d.add_term(0b11, 2);
        let l = synthesize_pczc(&d, PczcOrder::PCzC).unwrap();
        assert_eq!(l.stages[0].1.gates, vec![Gate::P(0, 2), Gate::P(1, 2)]);
        assert!(l.stages[1].1.is_empty());

        let mut d = PhaseDescr::identity(3);
        d.add_term(0b111, 1);
        assert_eq!(synthesize_pczc(&d, PczcOrder::PCzC), Err(Error::NotQuadratic));
    }

    #[test]
    fn every_order_folds_exactly() {
        let c = circ(
            3,
            vec![
                Gate::P(0, 1),
                Gate::Cnot(0, 1),
                Gate::P(1, 3),
                Gate::Cnot(1, 2),
                Gate::Cnot(2, 0),
                Gate::P(0, 1),
                Gate::P(2, 2),
            ],
        );
        let want = extract_descr(&c).unwrap();
        for order in PczcOrder::ALL {
            let l = fold(&c, order).unwrap();
            l.validate().unwrap();
            assert_eq!(l.tags(), order.tags().to_vec());
            let got = extract_descr(&l.flatten()).unwrap();
            for x in 0..8 {
                assert_eq!(phase_evaluate(&got, x), phase_evaluate(&want, x), "{order} x={x}");
            }
            assert_eq!(canonicalize(&got), canonicalize(&want));
        }
    }

    #[test]
    fn order_names_roundtrip() {
        for o in PczcOrder::ALL {
            assert_eq!(o.to_string().parse::<PczcOrder>().unwrap(), o);
        }
    }
}
