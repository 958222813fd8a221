//! Jordan decomposition of a projector pair, feasibility and explicit
//! construction of overlap-constrained optimal pairs, and the closed-form
//! block spectrum of s₁P₁ + s₂P₂.
//!
//! Any two projectors decompose the space into minimal invariant blocks of
//! dimension at most two. One-dimensional blocks are labeled by which
//! projectors act on them; each two-dimensional block carries a principal
//! cosine in (0,1), and the nonzero singular values of P₁P₂ are exactly the
//! `both` ones and those cosines.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::tensor::{max_abs, singular_values, HermitianOperator, Spectrum};

/// Cosine threshold separating 1D block classes from genuine 2D blocks.
const SPLIT_TOL: f64 = 1e-8;

/// Which projectors act on a one-dimensional invariant block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockLabel {
    Both,
    Only1,
    Only2,
    Neither,
}

/// A two-dimensional invariant block: an orthonormal frame (u, w) with
/// P₁ = uu† and P₂ = vv† for v = cos·u + sin·w.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoDBlock {
    pub frame: (DVector<Complex64>, DVector<Complex64>),
    pub cosine: f64,
}

impl TwoDBlock {
    /// Eigenvalues of (s₁P₁ + s₂P₂) restricted to the block:
    /// ½((s₁+s₂) ± √((s₁−s₂)² + 4 s₁ s₂ cos²)).
    pub fn eigenvalues(&self, s1: f64, s2: f64) -> (f64, f64) {
        let root = ((s1 - s2).powi(2) + 4.0 * s1 * s2 * self.cosine * self.cosine).sqrt();
        (0.5 * ((s1 + s2) + root), 0.5 * ((s1 + s2) - root))
    }

    fn p2_vector(&self) -> DVector<Complex64> {
        let sine = (1.0 - self.cosine * self.cosine).max(0.0).sqrt();
        &self.frame.0 * Complex64::new(self.cosine, 0.0)
            + &self.frame.1 * Complex64::new(sine, 0.0)
    }
}

/// Minimal invariant blocks of a projector pair.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanDecomposition {
    pub dim: usize,
    pub one_d: Vec<(DVector<Complex64>, BlockLabel)>,
    pub two_d: Vec<TwoDBlock>,
}

impl JordanDecomposition {
    /// Reassemble (P₁, P₂) from the blocks.
    pub fn reconstruct(&self) -> (HermitianOperator, HermitianOperator) {
        let mut p1 = DMatrix::<Complex64>::zeros(self.dim, self.dim);
        let mut p2 = DMatrix::<Complex64>::zeros(self.dim, self.dim);
        let add_rank1 = |m: &mut DMatrix<Complex64>, v: &DVector<Complex64>| {
            for r in 0..v.len() {
                for c in 0..v.len() {
                    m[(r, c)] += v[r] * v[c].conj();
                }
            }
        };
        for (v, label) in &self.one_d {
            match label {
                BlockLabel::Both => {
                    add_rank1(&mut p1, v);
                    add_rank1(&mut p2, v);
                }
                BlockLabel::Only1 => add_rank1(&mut p1, v),
                BlockLabel::Only2 => add_rank1(&mut p2, v),
                BlockLabel::Neither => {}
            }
        }
        for block in &self.two_d {
            add_rank1(&mut p1, &block.frame.0);
            add_rank1(&mut p2, &block.p2_vector());
        }
        (
            HermitianOperator::from_hermitian_unchecked(p1),
            HermitianOperator::from_hermitian_unchecked(p2),
        )
    }

    /// tr∣P₁P₂∣ = (number of `both` blocks) + (sum of cosines).
    pub fn overlap(&self) -> f64 {
        let both = self
            .one_d
            .iter()
            .filter(|(_, l)| *l == BlockLabel::Both)
            .count() as f64;
        both + self.two_d.iter().map(|b| b.cosine).sum::<f64>()
    }

    pub fn count_label(&self, label: BlockLabel) -> usize {
        self.one_d.iter().filter(|(_, l)| *l == label).count()
    }

    pub fn cosines(&self) -> Vec<f64> {
        self.two_d.iter().map(|b| b.cosine).collect()
    }
}

fn check_projector(p: &HermitianOperator, tol: f64) -> Result<usize> {
    let sq = p.matrix() * p.matrix();
    if max_abs(&(sq - p.matrix())) > tol {
        return Err(Error::NotProjector);
    }
    let rank = p.trace().round();
    if (p.trace() - rank).abs() > tol * p.dim() as f64 {
        return Err(Error::NotProjector);
    }
    Ok(rank as usize)
}

/// Orthonormal columns spanning the range of a projector.
fn support_frame(p: &HermitianOperator, rank: usize) -> Result<DMatrix<Complex64>> {
    if rank == 0 {
        return Ok(DMatrix::zeros(p.dim(), 0));
    }
    let (vals, vecs) = crate::tensor::hermitian_eigen(p)?;
    debug_assert!(vals[rank - 1] > 0.5);
    Ok(vecs.columns(0, rank).into_owned())
}

/// Extend `taken` (orthonormal columns) by vectors drawn from `candidates`,
/// Gram-Schmidt style, until `count` new orthonormal vectors are found.
fn complete_against(
    taken: &[DVector<Complex64>],
    candidates: impl Iterator<Item = DVector<Complex64>>,
    count: usize,
) -> Vec<DVector<Complex64>> {
    let mut basis: Vec<DVector<Complex64>> = taken.to_vec();
    let mut new = Vec::with_capacity(count);
    for cand in candidates {
        if new.len() == count {
            break;
        }
        let mut v = cand;
        for b in &basis {
            let coeff: Complex64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
            v -= b * coeff;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            v /= Complex64::new(norm, 0.0);
            basis.push(v.clone());
            new.push(v);
        }
    }
    debug_assert_eq!(new.len(), count);
    new
}

/// Jordan decomposition via principal angles: SVD of G₁†G₂ for orthonormal
/// support frames G₁, G₂. Cosines within `SPLIT_TOL` of 1 collapse to shared
/// one-dimensional blocks, those within `SPLIT_TOL` of 0 split into
/// orthogonal ones.
pub fn jordan_blocks(
    p1: &HermitianOperator,
    p2: &HermitianOperator,
    tol: f64,
) -> Result<JordanDecomposition> {
    if p1.dim() != p2.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", p1.dim(), p2.dim())));
    }
    let dim = p1.dim();
    let r1 = check_projector(p1, tol)?;
    let r2 = check_projector(p2, tol)?;
    let g1 = support_frame(p1, r1)?;
    let g2 = support_frame(p2, r2)?;

    let mut one_d: Vec<(DVector<Complex64>, BlockLabel)> = Vec::new();
    let mut two_d: Vec<TwoDBlock> = Vec::new();
    let m = r1.min(r2);

    let mut principal_a: Vec<DVector<Complex64>> = Vec::new();
    let mut principal_b: Vec<DVector<Complex64>> = Vec::new();
    if m > 0 {
        let overlap = g1.adjoint() * &g2;
        let svd = overlap.svd(true, true);
        let u = svd.u.as_ref().expect("requested");
        let vt = svd.v_t.as_ref().expect("requested");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_unstable_by(|&i, &j| {
            svd.singular_values[j].total_cmp(&svd.singular_values[i])
        });
        for &idx in &order {
            let sigma = svd.singular_values[idx].clamp(0.0, 1.0);
            let a = &g1 * u.column(idx);
            let b = &g2 * vt.row(idx).adjoint();
            principal_a.push(a.clone());
            principal_b.push(b.clone());
            if sigma >= 1.0 - SPLIT_TOL {
                one_d.push((a, BlockLabel::Both));
            } else if sigma <= SPLIT_TOL {
                one_d.push((a, BlockLabel::Only1));
                one_d.push((b, BlockLabel::Only2));
            } else {
                // w = (b − σa)/sin, with the relative phase fixed so that
                // ⟨a∣b⟩ = σ ≥ 0 by the SVD construction
                let sine = (1.0 - sigma * sigma).sqrt();
                let w = (&b - &a * Complex64::new(sigma, 0.0)) / Complex64::new(sine, 0.0);
                two_d.push(TwoDBlock { frame: (a, w), cosine: sigma });
            }
        }
    }

    // support directions beyond the principal pairs
    if r1 > m {
        let cols = (0..r1).map(|c| g1.column(c).into_owned());
        for v in complete_against(&principal_a, cols, r1 - m) {
            one_d.push((v, BlockLabel::Only1));
        }
    }
    if r2 > m {
        let cols = (0..r2).map(|c| g2.column(c).into_owned());
        for v in complete_against(&principal_b, cols, r2 - m) {
            one_d.push((v, BlockLabel::Only2));
        }
    }

    // the rest of the space belongs to neither projector
    let used: Vec<DVector<Complex64>> = one_d
        .iter()
        .map(|(v, _)| v.clone())
        .chain(two_d.iter().flat_map(|b| [b.frame.0.clone(), b.frame.1.clone()]))
        .collect();
    let remaining = dim - used.len();
    if remaining > 0 {
        let identity = (0..dim).map(|i| {
            DVector::from_fn(dim, |r, _| {
                if r == i {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                }
            })
        });
        for v in complete_against(&used, identity, remaining) {
            one_d.push((v, BlockLabel::Neither));
        }
    }

    // deterministic block order: both, 2D by descending cosine, only1,
    // only2, neither
    let rank_of = |l: BlockLabel| match l {
        BlockLabel::Both => 0,
        BlockLabel::Only1 => 2,
        BlockLabel::Only2 => 3,
        BlockLabel::Neither => 4,
    };
    one_d.sort_by_key(|(_, l)| rank_of(*l));
    two_d.sort_by(|a, b| b.cosine.total_cmp(&a.cosine));

    Ok(JordanDecomposition { dim, one_d, two_d })
}

/// Rank-and-overlap constraint on projector pairs: rank(P₁) = r₁,
/// rank(P₂) = r₂ and tr∣P₁P₂∣ ≤ c, inside a d-dimensional space.
/// Construction requires c ≤ min(r₁, r₂); beyond that the overlap bound is
/// vacuous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapConstraint {
    pub d: usize,
    pub r1: usize,
    pub r2: usize,
    pub c: f64,
}

impl OverlapConstraint {
    pub fn new(d: usize, r1: usize, r2: usize, c: f64) -> Result<OverlapConstraint> {
        if r1 > d || r2 > d {
            return Err(Error::RankOutOfRange { rank: r1.max(r2), dim: d });
        }
        if c < 0.0 {
            return Err(Error::InvalidParameter("overlap bound must be >= 0".into()));
        }
        if c > r1.min(r2) as f64 {
            return Err(Error::InvalidParameter(format!(
                "overlap bound c={c} exceeds min(r1,r2)={}",
                r1.min(r2)
            )));
        }
        Ok(OverlapConstraint { d, r1, r2, c })
    }

    /// Whether the constrained set is nonempty.
    pub fn is_feasible(&self) -> bool {
        feasible(self.d, self.r1, self.r2, self.c)
    }
}

/// Nonemptiness criterion for the constrained set: r₁ + r₂ − d ≤ ⌊c⌋.
/// Valid for any c ≥ 0.
pub fn feasible(d: usize, r1: usize, r2: usize, c: f64) -> bool {
    if c < 0.0 {
        return false;
    }
    r1 as i64 + r2 as i64 - d as i64 <= c.floor() as i64
}

fn basis_vector(dim: usize, i: usize) -> DVector<Complex64> {
    DVector::from_fn(dim, |r, _| if r == i { Complex64::ONE } else { Complex64::ZERO })
}

/// Decomposition with the given block structure placed on consecutive
/// computational basis vectors (shared blocks first), optionally rotated by
/// a unitary.
fn build_decomposition(
    d: usize,
    shared: usize,
    cosines: &[f64],
    only1: usize,
    only2: usize,
    basis: Option<&DMatrix<Complex64>>,
) -> JordanDecomposition {
    let column = |i: usize| -> DVector<Complex64> {
        match basis {
            Some(u) => u.column(i).into_owned(),
            None => basis_vector(d, i),
        }
    };
    let mut one_d = Vec::new();
    let mut two_d = Vec::new();
    let mut next = 0;
    for _ in 0..shared {
        one_d.push((column(next), BlockLabel::Both));
        next += 1;
    }
    for &cos in cosines {
        two_d.push(TwoDBlock { frame: (column(next), column(next + 1)), cosine: cos });
        next += 2;
    }
    for _ in 0..only1 {
        one_d.push((column(next), BlockLabel::Only1));
        next += 1;
    }
    for _ in 0..only2 {
        one_d.push((column(next), BlockLabel::Only2));
        next += 1;
    }
    while next < d {
        one_d.push((column(next), BlockLabel::Neither));
        next += 1;
    }
    JordanDecomposition { dim: d, one_d, two_d }
}

/// The pair that is maximal in the alignment ordering on the constrained
/// set: ⌊c⌋ shared directions, one residual block of cosine c − ⌊c⌋ when c
/// is not an integer, and orthogonal remainders. Satisfies tr∣P₁P₂∣ = c and
/// commutes exactly when c is an integer. Blocks sit on consecutive
/// computational basis vectors, shared ones first.
pub fn optimal_pair(
    constraint: &OverlapConstraint,
) -> Result<(HermitianOperator, HermitianOperator)> {
    Ok(optimal_decomposition(constraint)?.reconstruct())
}

/// Block structure of the optimal pair; spectra of s₁P₁ + s₂P₂ follow from
/// [`pair_spectrum`] without dense linear algebra.
pub fn optimal_decomposition(constraint: &OverlapConstraint) -> Result<JordanDecomposition> {
    if !constraint.is_feasible() {
        return Err(Error::Infeasible);
    }
    let whole = constraint.c.floor() as usize;
    let frac = constraint.c - constraint.c.floor();
    let has_frac = frac > 0.0;
    let pairs = usize::from(has_frac);
    let cosines: Vec<f64> = if has_frac { vec![frac] } else { vec![] };
    Ok(build_decomposition(
        constraint.d,
        whole,
        &cosines,
        constraint.r1 - whole - pairs,
        constraint.r2 - whole - pairs,
        None,
    ))
}

/// Eigenvalues of s₁P₁ + s₂P₂ assembled from the block structure:
/// s₁+s₂ on shared blocks, s₁ or s₂ on exclusive ones, zero on untouched
/// ones, and the closed-form pair on each 2D block.
pub fn pair_spectrum(dec: &JordanDecomposition, s1: f64, s2: f64) -> Result<Spectrum> {
    if s1 < 0.0 || s2 < 0.0 {
        return Err(Error::InvalidParameter(
            "combination coefficients must be >= 0".into(),
        ));
    }
    let mut values = Vec::with_capacity(dec.dim);
    for (_, label) in &dec.one_d {
        values.push(match label {
            BlockLabel::Both => s1 + s2,
            BlockLabel::Only1 => s1,
            BlockLabel::Only2 => s2,
            BlockLabel::Neither => 0.0,
        });
    }
    for block in &dec.two_d {
        let (hi, lo) = block.eigenvalues(s1, s2);
        values.push(hi);
        values.push(lo);
    }
    Ok(Spectrum::from_unsorted(values))
}

/// Random member of the constrained set: a random admissible block
/// structure (integer shared part, a few 2D blocks with total cosine within
/// the budget) rotated by a random unitary.
pub fn random_feasible_decomposition<R: Rng + ?Sized>(
    constraint: &OverlapConstraint,
    rng: &mut R,
) -> Result<JordanDecomposition> {
    if !constraint.is_feasible() {
        return Err(Error::Infeasible);
    }
    let (d, r1, r2, c) = (constraint.d, constraint.r1, constraint.r2, constraint.c);
    let shared_min = (r1 as i64 + r2 as i64 - d as i64).max(0) as usize;
    let shared_max = (c.floor() as usize).min(r1.min(r2));
    let shared = rng.random_range(shared_min..=shared_max);
    let max_pairs = r1.min(r2) - shared;
    let pairs = rng.random_range(0..=max_pairs);
    let mut cosines: Vec<f64> = (0..pairs)
        .map(|_| rng.random::<f64>().clamp(1e-6, 1.0 - 1e-6))
        .collect();
    let budget = c - shared as f64;
    let total: f64 = cosines.iter().sum();
    if total > budget {
        let shrink = budget / total * rng.random::<f64>();
        for v in &mut cosines {
            *v = (*v * shrink).clamp(0.0, 1.0 - 1e-6);
        }
    }
    cosines.retain(|&v| v > 1e-9);
    let pairs = cosines.len();
    let u = crate::sample::random_unitary(d, rng);
    Ok(build_decomposition(
        d,
        shared,
        &cosines,
        r1 - shared - pairs,
        r2 - shared - pairs,
        Some(&u),
    ))
}

/// Multiset of singular values of P₁P₂ predicted by a decomposition: ones
/// from shared blocks, the cosines, zeros elsewhere.
pub fn predicted_product_singular_values(dec: &JordanDecomposition) -> Vec<f64> {
    let mut sv = vec![1.0; dec.count_label(BlockLabel::Both)];
    sv.extend(dec.cosines());
    sv.resize(dec.dim, 0.0);
    sv.sort_unstable_by(|a, b| b.total_cmp(a));
    sv
}
