//! Bruhat decomposition of the symplectic group and the layered forms built on it.
//!
//! Every tableau factors as `W1 · H_S · Π · W2` with `W1`, `W2` in the Borel
//! subgroup (`C = 0`, `A` lower triangular), `H_S` Hadamards on a set `S` and
//! `Π` a qubit permutation. `S` and `Π` depend only on the double coset.
//!
//! The elimination below works with upper-triangular Borel elements, so the
//! input is conjugated by the qubit reversal first and the factors are
//! conjugated back at the end.

use rand::Rng;

use crate::clifford::{
    classify_subgroup, cnot_synthesis, perm_inverse, perm_then, permutation_circuit, Circuit, Gate,
    LayeredCircuit, StageTag, Subgroup, SymplecticMat,
};
use crate::error::{Error, Result};
use crate::f2linalg::{lpl_decompose, lpu_decompose, symmetric_udu, BinMatrix};
use crate::phasepoly::{fold, PczcOrder};

/// `lower = L · σ · [[I_k, 0, D1, D2], [0, 0, 0, I]] · diag(τ, τ) · diag(U, U⁻ᵗ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticLpu {
    /// Lower unitriangular.
    pub l: BinMatrix,
    /// Permutation matrix.
    pub sigma: BinMatrix,
    pub k: usize,
    /// k×k, symmetric.
    pub d1: BinMatrix,
    /// k×(n−k).
    pub d2: BinMatrix,
    /// Permutation matrix.
    pub tau: BinMatrix,
    /// Upper unitriangular.
    pub u: BinMatrix,
}

impl SymplecticLpu {
    /// The middle n×2n factor `[[I_k, 0, D1, D2], [0, 0, 0, I]]`.
    pub fn core(&self) -> BinMatrix {
        let n = self.l.rows();
        let k = self.k;
        BinMatrix::from_fn(n, 2 * n, |i, j| match (i < k, j < n) {
            (true, true) => i == j,
            (true, false) if j - n < k => self.d1.get(i, j - n),
            (true, false) => self.d2.get(i, j - n - k),
            (false, true) => false,
            (false, false) => i == j - n,
        })
    }

    pub fn recompose(&self) -> BinMatrix {
        let n = self.l.rows();
        let z = BinMatrix::zeros(n, n);
        let tt = BinMatrix::from_blocks(&self.tau, &z, &z, &self.tau);
        let uinv_t = self.u.invert().expect("U is unitriangular").transpose();
        let uu = BinMatrix::from_blocks(&self.u, &z, &z, &uinv_t);
        self.l.dot(&self.sigma).dot(&self.core()).dot(&tt).dot(&uu)
    }
}

/// Embeds `m` into the identity on the index set `idx` (sorted).
fn embed(n: usize, idx: &[usize], m: &BinMatrix) -> BinMatrix {
    let mut out = BinMatrix::identity(n);
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            out.set(i, j, m.get(a, b));
        }
    }
    out
}

/// Factors the lower half `[C | D]` of a symplectic matrix.
///
/// LPU of `C` first, which leaves `[P | M]`. On the rows and columns that
/// `P` leaves empty, `M` is invertible; an LPL of that block finishes it.
pub fn symplectic_lpu(lower: &BinMatrix) -> Result<SymplecticLpu> {
    let n = lower.rows();
    if lower.cols() != 2 * n {
        return Err(Error::DimensionMismatch(format!(
            "lower half must be n x 2n, got {}x{}",
            n,
            lower.cols()
        )));
    }
    let rank = lower.rank();
    if rank != n {
        return Err(Error::RankDeficient(rank, n));
    }
    let c = lower.submatrix(0, 0, n, n);
    let d = lower.submatrix(0, n, n, n);
    if !c.dot(&d.transpose()).is_symmetric() {
        return Err(Error::NotSymplecticHalf);
    }

    let (l1p, p1, u1p) = lpu_decompose(&c)?;
    let l1 = l1p.invert()?;
    let u1 = u1p.invert()?;
    // right block after L1·[C|D]·diag(U1, U1⁻ᵗ)
    let m1 = l1.dot(&d).dot(&u1p.transpose());

    let mut used_r = vec![false; n];
    let mut used_c = vec![false; n];
    for &(i, j) in &p1.entries {
        used_r[i] = true;
        used_c[j] = true;
    }
    let free_r: Vec<usize> = (0..n).filter(|&i| !used_r[i]).collect();
    let free_c: Vec<usize> = (0..n).filter(|&j| !used_c[j]).collect();
    let m = free_r.len();
    let sub = BinMatrix::from_fn(m, m, |a, b| m1.get(free_r[a], free_c[b]));
    let (l2a, p2, l2b) = lpl_decompose(&sub)?;
    if p2.rank() != m {
        return Err(Error::Internal("free block of the lower half is singular".into()));
    }
    let ea = embed(n, &free_r, &l2a.invert()?);
    let x = embed(n, &free_c, &l2b.invert()?);
    let l = ea.dot(&l1);
    let u = u1.dot(&x.invert()?.transpose());
    let m2 = ea.dot(&m1).dot(&x);

    let k = p1.rank();
    let mut row_order: Vec<usize> = p1.entries.iter().map(|e| e.0).collect();
    let mut col_order: Vec<usize> = p1.entries.iter().map(|e| e.1).collect();
    row_order.extend(&free_r);
    for &(a, b) in &p2.entries {
        debug_assert_eq!(a, col_order.len() - k);
        col_order.push(free_c[b]);
    }
    let t = BinMatrix::from_fn(n, n, |i, j| m2.get(row_order[i], col_order[j]));
    let out = SymplecticLpu {
        l: l.invert()?,
        sigma: BinMatrix::permutation(&row_order),
        k,
        d1: t.submatrix(0, 0, k, k),
        d2: t.submatrix(0, k, k, n - k),
        tau: BinMatrix::permutation(&col_order).transpose(),
        u: u.invert()?,
    };
    if out.recompose() != *lower {
        return Err(Error::Internal("symplectic LPU does not recompose".into()));
    }
    Ok(out)
}

fn diag(a: &BinMatrix, d: &BinMatrix) -> BinMatrix {
    let n = a.rows();
    BinMatrix::from_blocks(a, &BinMatrix::zeros(n, n), &BinMatrix::zeros(n, n), d)
}

fn sym(m: BinMatrix) -> Result<SymplecticMat> {
    SymplecticMat::new(m).map_err(|_| Error::Internal("factor is not symplectic".into()))
}

/// Tableau of the qubit reversal; conjugating by it swaps lower and upper
/// triangular Borel subgroups.
fn reversal(n: usize) -> SymplecticMat {
    SymplecticMat::permutation(&(0..n).rev().collect::<Vec<_>>())
}

/// `M = W1 · w · W2` with `W1`, `W2` upper Borel and `w` a Weyl element.
fn bruhat_upper(m: &SymplecticMat) -> Result<(SymplecticMat, SymplecticMat, SymplecticMat)> {
    let n = m.n();
    let f = symplectic_lpu(&m.lower_half())?;
    let k = f.k;
    let l_inv = f.l.invert()?;
    let u_inv = f.u.invert()?;
    let sig = diag(&f.sigma, &f.sigma);
    let tau = diag(&f.tau, &f.tau);

    // M1 = Σ⁻¹ · diag(Lᵗ, L⁻¹) · M · diag(U⁻¹, Uᵗ) · T⁻¹ has lower half [[I_k,0,D1,D2],[0,0,0,I]].
    let m1 = sig
        .transpose()
        .dot(&diag(&f.l.transpose(), &l_inv))
        .dot(m.matrix())
        .dot(&diag(&u_inv, &f.u.transpose()))
        .dot(&tau.transpose());
    if m1.submatrix(n, 0, n, 2 * n) != f.core() {
        return Err(Error::Internal("step 1 did not reach the LPU core".into()));
    }

    let a = m1.submatrix(0, 0, n, n);
    let a1 = a.submatrix(0, 0, k, k);
    let a2 = a.submatrix(0, k, k, n - k);
    let a3 = a.submatrix(k, 0, n - k, k);
    let a4 = a.submatrix(k, k, n - k, n - k);
    if !a2.is_zero() || !a4.is_identity() || !a1.is_symmetric() {
        return Err(Error::Internal("unexpected upper half after step 1".into()));
    }
    let z = BinMatrix::zeros(n - k, n - k);
    let s2 = SymplecticMat::from_b(&BinMatrix::from_blocks(&a1, &a3.transpose(), &a3, &z))?;
    let m2 = s2.matrix().dot(&m1);

    let b = m2.submatrix(0, n, n, n);
    let b3 = b.submatrix(k, 0, n - k, k);
    let b4 = b.submatrix(k, k, n - k, n - k);
    let sigma3 = BinMatrix::from_blocks(&f.d1, &f.d2, &b3, &b4);
    if !sigma3.is_symmetric() {
        return Err(Error::Internal("step 3 clearing matrix is not symmetric".into()));
    }
    let s3 = SymplecticMat::from_b(&sigma3)?;
    let hk = SymplecticMat::hadamards(n, &(0..k).collect::<Vec<_>>());
    if m2.dot(s3.matrix()) != *hk.matrix() {
        return Err(Error::Internal("step 3 did not reach the Hadamard layer".into()));
    }

    // M = diag(L⁻ᵗ, L)·Σ·S2·H_k·S3·T·diag(U, U⁻ᵗ); the permutations are moved
    // through S2 and S3, which stay in B⁰.
    let w1 = diag(&l_inv.transpose(), &f.l).dot(&sig).dot(s2.matrix()).dot(&sig.transpose());
    let w = sig.dot(hk.matrix()).dot(&tau);
    let w2 = tau.transpose().dot(s3.matrix()).dot(&tau).dot(&diag(&f.u, &u_inv.transpose()));
    Ok((sym(w1)?, sym(w)?, sym(w2)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruhatFactors {
    pub w1: SymplecticMat,
    /// Qubits carrying a Hadamard in the Weyl element, ascending.
    pub hadamards: Vec<usize>,
    /// Qubit permutation applied after the Hadamards: qubit `j` moves to `pi[j]`.
    pub pi: Vec<usize>,
    pub w2: SymplecticMat,
}

impl BruhatFactors {
    pub fn k(&self) -> usize {
        self.hadamards.len()
    }

    pub fn weyl(&self) -> SymplecticMat {
        SymplecticMat::hadamards(self.pi.len(), &self.hadamards)
            .compose(&SymplecticMat::permutation(&self.pi))
    }

    pub fn recompose(&self) -> SymplecticMat {
        self.w1.compose(&self.weyl()).compose(&self.w2)
    }
}

pub fn bruhat_decompose(m: &SymplecticMat) -> Result<BruhatFactors> {
    let n = m.n();
    let r = reversal(n);
    let (w1, w, w2) = bruhat_upper(&r.compose(m).compose(&r))?;
    let conj = |x: &SymplecticMat| r.compose(x).compose(&r);
    let (w1, w, w2) = (conj(&w1), conj(&w), conj(&w2));

    let wm = w.matrix();
    let hadamards: Vec<usize> = (0..n).filter(|&q| (n..2 * n).any(|j| wm.get(q, j))).collect();
    let perm = SymplecticMat::hadamards(n, &hadamards).compose(&w);
    let pi: Vec<usize> = (0..n)
        .map(|j| (0..n).find(|&c| perm.matrix().get(j, c)))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Internal("Weyl element is not H·permutation".into()))?;
    let out = BruhatFactors { w1, hadamards, pi, w2 };
    if SymplecticMat::permutation(&out.pi) != perm || out.recompose() != *m {
        return Err(Error::Internal("Bruhat factors do not recompose".into()));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `-C-P-C-P-`
    Left,
    /// `-P-C-P-C-`
    Right,
}

/// A Borel element as four stages: C stages by their `A` block, P stages by
/// the diagonal of their `B` block.
struct BorelParts {
    tags: [StageTag; 4],
    mats: [BinMatrix; 4],
}

/// Splits a symmetric `x` as `L·E·Lᵗ + Λ` with `L` lower unitriangular and
/// `E`, `Λ` diagonal. `E` is either `I` or, when `x` is diagonal, zero.
fn lower_udu(x: &BinMatrix) -> Result<(BinMatrix, BinMatrix, BinMatrix)> {
    let n = x.rows();
    if x.is_diagonal() {
        return Ok((BinMatrix::identity(n), BinMatrix::zeros(n, n), x.clone()));
    }
    let (u, lam) = symmetric_udu(&x.reversed())?;
    Ok((u.reversed(), BinMatrix::identity(n), lam.reversed()))
}

fn borel_parts(w: &SymplecticMat, side: Side) -> Result<BorelParts> {
    if !classify_subgroup(w).contains(&Subgroup::Borel) {
        return Err(Error::NotBorel);
    }
    let a = w.a();
    let a_inv = a.invert()?;
    Ok(match side {
        Side::Left => {
            // w = C(A)·[[I, A⁻¹B], [0, I]]
            let (l, e, lam) = lower_udu(&a_inv.dot(&w.b()))?;
            BorelParts {
                tags: [StageTag::C, StageTag::P, StageTag::C, StageTag::P],
                mats: [a.dot(&l), e, l.invert()?, lam],
            }
        }
        Side::Right => {
            // w = [[I, B·Aᵗ], [0, I]]·C(A)
            let (l, e, lam) = lower_udu(&w.b().dot(&a.transpose()))?;
            let l_inv = l.invert()?;
            BorelParts {
                tags: [StageTag::P, StageTag::C, StageTag::P, StageTag::C],
                mats: [lam, l, e, l_inv.dot(&a)],
            }
        }
    })
}

/// CNOT circuit whose tableau is `diag(a, a⁻ᵗ)`.
fn c_stage(a: &BinMatrix) -> Result<Circuit> {
    cnot_synthesis(&a.transpose())
}

fn p_stage(lam: &BinMatrix) -> Circuit {
    let n = lam.rows();
    Circuit { n, gates: (0..n).filter(|&q| lam.get(q, q)).map(|q| Gate::P(q, 1)).collect() }
}

fn emit(parts: &BorelParts, n: usize) -> Result<LayeredCircuit> {
    let mut out = LayeredCircuit::new(n);
    for (tag, m) in parts.tags.iter().zip(&parts.mats) {
        let c = if *tag == StageTag::C { c_stage(m)? } else { p_stage(m) };
        out.push(*tag, c);
    }
    Ok(out)
}

pub fn borel_factor(w: &SymplecticMat, side: Side) -> Result<LayeredCircuit> {
    emit(&borel_parts(w, side)?, w.n())
}

/// `-C-P-C-P-H-P-C-P-C-`. When the Bruhat permutation is not the identity it
/// is absorbed into the first C stage after the Hadamards, so that stage is
/// a permuted C↓ element.
pub fn nine_stage(m: &SymplecticMat) -> Result<LayeredCircuit> {
    let n = m.n();
    let f = bruhat_decompose(m)?;
    let mut out = borel_factor(&f.w1, Side::Left)?;
    out.push(StageTag::H, Circuit { n, gates: f.hadamards.iter().map(|&q| Gate::H(q)).collect() });

    // Π·P(Λ)·C(L) = P(QΛQᵗ)·C(QL) where Q is the A block of Π.
    let mut parts = borel_parts(&f.w2, Side::Right)?;
    let q = SymplecticMat::permutation(&f.pi).a();
    parts.mats[0] = q.dot(&parts.mats[0]).dot(&q.transpose());
    parts.mats[1] = q.dot(&parts.mats[1]);
    out.stages.extend(emit(&parts, n)?.stages);
    check_recomposition(&out, m)?;
    Ok(out)
}

/// `-C-CZ-P-H-P-CZ-C-`: both Borel sides are written as {P, CNOT} circuits
/// and folded. Z gates are dropped since they do not change the tableau.
pub fn seven_stage(m: &SymplecticMat) -> Result<LayeredCircuit> {
    let n = m.n();
    let f = bruhat_decompose(m)?;
    let left = fold(&borel_factor(&f.w1, Side::Left)?.flatten(), PczcOrder::CCzP)?;
    let mut right = permutation_circuit(&f.pi);
    right.append(&borel_factor(&f.w2, Side::Right)?.flatten());
    let right = fold(&right, PczcOrder::PCzC)?;

    let mut out = LayeredCircuit::new(n);
    out.stages.extend(left.stages);
    out.push(StageTag::H, Circuit { n, gates: f.hadamards.iter().map(|&q| Gate::H(q)).collect() });
    out.stages.extend(right.stages);
    for (tag, c) in &mut out.stages {
        if *tag == StageTag::P {
            c.gates.retain(|g| !matches!(g, Gate::P(_, 2)));
        }
    }
    check_recomposition(&out, m)?;
    Ok(out)
}

fn check_recomposition(l: &LayeredCircuit, m: &SymplecticMat) -> Result<()> {
    l.validate()?;
    if l.to_symplectic() != *m {
        return Err(Error::Internal("layered circuit does not recompose".into()));
    }
    Ok(())
}

/// The double coset `B·w·B` of a tableau, with `w = σ · (1 ⊗ H^{⊗k}) · τ`
/// (Hadamards on the last `k` qubits).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruhatCell {
    pub k: usize,
    pub sigma: Vec<usize>,
    pub tau: Vec<usize>,
}

impl BruhatCell {
    /// The permutation `σ·τ` (σ first).
    pub fn pi(&self) -> Vec<usize> {
        perm_then(&self.sigma, &self.tau)
    }

    pub fn representative(&self) -> SymplecticMat {
        let n = self.sigma.len();
        let last: Vec<usize> = (n - self.k..n).collect();
        SymplecticMat::permutation(&self.sigma)
            .compose(&SymplecticMat::hadamards(n, &last))
            .compose(&SymplecticMat::permutation(&self.tau))
    }
}

/// `σ` is chosen to send the Hadamard qubits, in order, to the last `k` slots
/// and the others, in order, to the first `n − k`.
pub fn weyl_cell(m: &SymplecticMat) -> Result<BruhatCell> {
    let f = bruhat_decompose(m)?;
    let n = m.n();
    let k = f.k();
    let mut sigma = vec![0; n];
    let mut next = 0;
    for (q, slot) in sigma.iter_mut().enumerate() {
        if !f.hadamards.contains(&q) {
            *slot = next;
            next += 1;
        }
    }
    for (i, &q) in f.hadamards.iter().enumerate() {
        sigma[q] = n - k + i;
    }
    let tau = perm_then(&perm_inverse(&sigma), &f.pi);
    Ok(BruhatCell { k, sigma, tau })
}

/// A uniformly random Borel element: `C(A)·[[I, X], [0, I]]` with `A` lower
/// unitriangular and `X` symmetric.
pub fn random_borel<R: Rng>(n: usize, rng: &mut R) -> SymplecticMat {
    let a = BinMatrix::from_fn(n, n, |i, j| i == j || (j < i && rng.gen()));
    let mut x = BinMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            if rng.gen() {
                x.set(i, j, true);
                x.set(j, i, true);
            }
        }
    }
    SymplecticMat::from_a(&a)
        .expect("unitriangular")
        .compose(&SymplecticMat::from_b(&x).expect("symmetric"))
}

/// A random tableau from a random Bruhat cell. Not uniform over the group.
pub fn random_symplectic<R: Rng>(n: usize, rng: &mut R) -> SymplecticMat {
    let hs: Vec<usize> = (0..n).filter(|_| rng.gen()).collect();
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.gen_range(0..=i));
    }
    random_borel(n, rng)
        .compose(&SymplecticMat::hadamards(n, &hs))
        .compose(&SymplecticMat::permutation(&p))
        .compose(&random_borel(n, rng))
}
