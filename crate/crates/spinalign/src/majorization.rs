//! The majorization preorder on real vectors and self-adjoint operators,
//! with constructive witnesses: T-transforms, unjust transfers, transfer
//! chains, box-simplex majorants, and the doubling isotone map.
//!
//! x ⪰ y iff every prefix sum of x sorted descending dominates the matching
//! prefix sum of y, with equal totals. Prefix comparisons use an absolute
//! tolerance scaled by max(1, ‖x‖₁) since eigensolver noise accumulates in
//! the partial sums.

use rand::Rng;

use crate::error::{Error, Result};
use crate::tensor::{hermitian_eigen, HermitianOperator, max_abs};

/// Default tolerance for majorization comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Eigenvalue gap below which spectra are treated as degenerate when
/// searching for a common ordered eigenbasis.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// Move `amount` from entry `giver` to entry `receiver`. Unjust when the
/// receiver already holds at least as much as the giver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transfer {
    pub receiver: usize,
    pub giver: usize,
    pub amount: f64,
}

impl Transfer {
    pub fn new(receiver: usize, giver: usize, amount: f64) -> Result<Transfer> {
        if receiver == giver {
            return Err(Error::InvalidParameter(
                "transfer endpoints must be distinct".into(),
            ));
        }
        if amount < 0.0 {
            return Err(Error::InvalidParameter("transfer amount must be >= 0".into()));
        }
        Ok(Transfer { receiver, giver, amount })
    }
}

/// Two-coordinate convex mixing map: entries i, j are replaced by their
/// t-mixtures. t = 0 is the identity, t = 1 the transposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTransform {
    pub i: usize,
    pub j: usize,
    pub t: f64,
}

impl TTransform {
    pub fn new(i: usize, j: usize, t: f64) -> Result<TTransform> {
        if i == j {
            return Err(Error::InvalidParameter(
                "T-transform endpoints must be distinct".into(),
            ));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter("T-transform mix must lie in [0,1]".into()));
        }
        Ok(TTransform { i, j, t })
    }
}

fn l1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// Absolute comparison tolerance scaled by max(1, ‖x‖₁).
pub fn effective_tol(x: &[f64], tol: f64) -> f64 {
    tol * f64::max(1.0, l1(x))
}

fn sorted_desc(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_unstable_by(|a, b| b.total_cmp(a));
    v
}

/// Whether x majorizes y: prefix sums of x↓ dominate those of y↓ and the
/// totals agree, all within the scaled tolerance.
pub fn majorizes(x: &[f64], y: &[f64], tol: f64) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "vector lengths {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let eff = effective_tol(x, tol);
    let xs = sorted_desc(x);
    let ys = sorted_desc(y);
    let mut px = 0.0;
    let mut py = 0.0;
    for k in 0..xs.len() {
        px += xs[k];
        py += ys[k];
        if k + 1 < xs.len() && px < py - eff {
            return Ok(false);
        }
    }
    Ok((px - py).abs() <= eff)
}

/// First prefix index (1-based) where x↓ fails to dominate y↓, with the gap,
/// or None when x ⪰ y. A total-sum mismatch reports index = len.
pub fn majorization_violation(x: &[f64], y: &[f64], tol: f64) -> Result<Option<(usize, f64)>> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "vector lengths {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let eff = effective_tol(x, tol);
    let xs = sorted_desc(x);
    let ys = sorted_desc(y);
    let mut px = 0.0;
    let mut py = 0.0;
    for k in 0..xs.len() {
        px += xs[k];
        py += ys[k];
        if k + 1 < xs.len() && px < py - eff {
            return Ok(Some((k + 1, py - px)));
        }
    }
    if (px - py).abs() > eff {
        return Ok(Some((xs.len(), (px - py).abs())));
    }
    Ok(None)
}

/// Spectral majorization of self-adjoint operators.
pub fn operator_majorizes(
    a: &HermitianOperator,
    b: &HermitianOperator,
    tol: f64,
) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", a.dim(), b.dim())));
    }
    majorizes(a.spectrum()?.values(), b.spectrum()?.values(), tol)
}

/// Apply a T-transform; all entries other than i, j are untouched.
pub fn apply_t_transform(x: &[f64], tr: &TTransform) -> Result<Vec<f64>> {
    if tr.i >= x.len() || tr.j >= x.len() {
        return Err(Error::IndexOutOfRange(tr.i.max(tr.j)));
    }
    let mut out = x.to_vec();
    let (a, b) = (x[tr.i], x[tr.j]);
    out[tr.i] = (1.0 - tr.t) * a + tr.t * b;
    out[tr.j] = (1.0 - tr.t) * b + tr.t * a;
    Ok(out)
}

/// Apply a transfer; the boolean reports whether it was unjust
/// (receiver at least as large as giver before the move).
pub fn apply_transfer(x: &[f64], tr: &Transfer) -> Result<(Vec<f64>, bool)> {
    if tr.receiver >= x.len() || tr.giver >= x.len() {
        return Err(Error::IndexOutOfRange(tr.receiver.max(tr.giver)));
    }
    let unjust = x[tr.receiver] >= x[tr.giver];
    let mut out = x.to_vec();
    out[tr.receiver] += tr.amount;
    out[tr.giver] -= tr.amount;
    Ok((out, unjust))
}

/// Unjust-transfer witness of a T-transform: the transfer takes the sorted
/// image pair back to the sorted source pair. Receiver/giver index the
/// larger/smaller entry of the transformed vector.
pub fn transfer_of_ttransform(x: &[f64], tr: &TTransform) -> Result<Transfer> {
    let y = apply_t_transform(x, tr)?;
    let (hi_x, _) = if x[tr.i] >= x[tr.j] { (x[tr.i], x[tr.j]) } else { (x[tr.j], x[tr.i]) };
    let (recv, give) = if y[tr.i] >= y[tr.j] { (tr.i, tr.j) } else { (tr.j, tr.i) };
    let amount = hi_x - y[recv];
    Transfer::new(recv, give, amount.max(0.0))
}

/// T-transform witness of an unjust transfer on y, using
/// t̃ = ε / ((y_recv − y_give) + 2ε). Errors when the transfer is not unjust.
pub fn ttransform_of_transfer(y: &[f64], tr: &Transfer) -> Result<TTransform> {
    if tr.receiver >= y.len() || tr.giver >= y.len() {
        return Err(Error::IndexOutOfRange(tr.receiver.max(tr.giver)));
    }
    let gap = y[tr.receiver] - y[tr.giver];
    if gap < 0.0 {
        return Err(Error::NotUnjust);
    }
    let denom = gap + 2.0 * tr.amount;
    let t = if denom <= 0.0 { 0.0 } else { tr.amount / denom };
    TTransform::new(tr.receiver, tr.giver, t)
}

/// Greedy chain of at most len−1 T-transforms taking x to y up to
/// permutation. Each step fixes the largest index where the sorted vectors
/// still differ. Requires x ⪰ y.
pub fn transfer_chain(x: &[f64], y: &[f64], tol: f64) -> Result<Vec<TTransform>> {
    if !majorizes(x, y, tol)? {
        return Err(Error::NotComparable);
    }
    let eff = effective_tol(x, tol);
    // Track (value, original index) sorted descending; T-transform indices
    // refer to original coordinates so the chain replays on the raw input.
    let mut work: Vec<(f64, usize)> = x.iter().copied().zip(0..).collect();
    work.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
    let target = sorted_desc(y);
    let m = x.len();
    let mut chain = Vec::new();
    for _ in 0..m.saturating_sub(1) {
        // largest j with work_j > target_j
        let Some(j) = (0..m).rev().find(|&k| work[k].0 > target[k] + eff) else {
            break;
        };
        // smallest k > j with work_k < target_k
        let Some(k) = ((j + 1)..m).find(|&k| work[k].0 < target[k] - eff) else {
            break;
        };
        let delta = (work[j].0 - target[j]).min(target[k] - work[k].0);
        let t = delta / (work[j].0 - work[k].0);
        chain.push(TTransform { i: work[j].1, j: work[k].1, t });
        work[j].0 -= delta;
        work[k].0 += delta;
        // pin the satisfied coordinate exactly to avoid drift
        if (work[j].0 - target[j]).abs() <= (work[k].0 - target[k]).abs() {
            work[j].0 = target[j];
        } else {
            work[k].0 = target[k];
        }
    }
    Ok(chain)
}

/// Apply `count` random T-transforms; the composite action is a random
/// doubly-stochastic matrix.
pub fn apply_random_t_transforms<R: Rng + ?Sized>(
    x: &[f64],
    count: usize,
    rng: &mut R,
) -> Vec<f64> {
    let mut out = x.to_vec();
    let m = out.len();
    if m < 2 {
        return out;
    }
    for _ in 0..count {
        let i = rng.random_range(0..m);
        let mut j = rng.random_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let t: f64 = rng.random();
        let tr = TTransform { i, j, t };
        out = apply_t_transform(&out, &tr).expect("indices in range");
    }
    out
}

/// The majorant (1,…,1, e−⌊e⌋, 0,…,0) of the box-simplex slice
/// S_e = { x ∈ [0,1]^m : Σx = e }.
pub fn majorant_box_simplex(m: usize, e: f64) -> Result<Vec<f64>> {
    if e < 0.0 || e > m as f64 {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= e <= m, got e={e}, m={m}"
        )));
    }
    let whole = e.floor() as usize;
    let frac = e - e.floor();
    let mut out = vec![0.0; m];
    for v in out.iter_mut().take(whole.min(m)) {
        *v = 1.0;
    }
    if whole < m && frac > 0.0 {
        out[whole] = frac;
    }
    Ok(out)
}

/// The doubling map v ↦ (t + g(v₁),…,t + g(v_m)) ⊕ (t − g(v₁),…,t − g(v_m)).
/// For convex non-negative g this preserves majorization; the caller owns
/// the convexity contract.
pub fn isotone_map<F: Fn(f64) -> f64>(v: &[f64], t: f64, g: F) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * v.len());
    let gs: Vec<f64> = v.iter().map(|&x| g(x)).collect();
    out.extend(gs.iter().map(|gv| t + gv));
    out.extend(gs.iter().map(|gv| t - gv));
    out
}

/// Whether the operators share one ordered eigenbasis realizing all their
/// spectra in descending order. Requires vanishing pairwise commutators,
/// then searches for a simultaneous descending ordering of the common
/// eigenbasis, recursing through eigenspaces that are degenerate up to
/// [`DEGENERACY_GAP`].
pub fn perfectly_aligned(ops: &[HermitianOperator], tol: f64) -> Result<bool> {
    if ops.len() <= 1 {
        return Ok(true);
    }
    let dim = ops[0].dim();
    if ops.iter().any(|o| o.dim() != dim) {
        return Err(Error::DimensionMismatch(
            "operators must act on the same space".into(),
        ));
    }
    for (k, a) in ops.iter().enumerate() {
        for b in &ops[k + 1..] {
            let scale = f64::max(1.0, max_abs(a.matrix()) * max_abs(b.matrix()));
            if crate::tensor::commutator_max_norm(a.matrix(), b.matrix()) > tol * scale {
                return Ok(false);
            }
        }
    }

    // Common eigenbasis: refine blocks operator by operator.
    let mut frames: Vec<nalgebra::DMatrix<num_complex::Complex64>> =
        vec![nalgebra::DMatrix::identity(dim, dim)];
    for op in ops {
        let mut next = Vec::new();
        for frame in &frames {
            let k = frame.ncols();
            if k == 1 {
                next.push(frame.clone());
                continue;
            }
            let small = HermitianOperator::with_tol(
                frame.adjoint() * op.matrix() * frame,
                1e-7,
            )?;
            let (vals, vecs) = hermitian_eigen(&small)?;
            let mut start = 0;
            for idx in 1..=k {
                if idx == k || vals[idx - 1] - vals[idx] > DEGENERACY_GAP {
                    let group = vecs.columns(start, idx - start);
                    next.push(frame * group);
                    start = idx;
                }
            }
        }
        frames = next;
    }

    // Diagonal tuple per basis vector.
    let mut tuples: Vec<Vec<f64>> = Vec::with_capacity(dim);
    for frame in &frames {
        for col in 0..frame.ncols() {
            let v = frame.column(col).into_owned();
            tuples.push(ops.iter().map(|op| op.expectation(&v)).collect());
        }
    }

    // A valid ordering exists iff the tuples form a chain in the
    // componentwise order; sort fuzzily, then verify every coordinate.
    let cmp_tol = DEGENERACY_GAP;
    tuples.sort_by(|u, v| {
        for (a, b) in u.iter().zip(v.iter()) {
            if a > &(b + cmp_tol) {
                return std::cmp::Ordering::Less;
            }
            if b > &(a + cmp_tol) {
                return std::cmp::Ordering::Greater;
            }
        }
        std::cmp::Ordering::Equal
    });
    for op_idx in 0..ops.len() {
        for w in tuples.windows(2) {
            if w[0][op_idx] < w[1][op_idx] - cmp_tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use crate::tensor::{kron, Spectrum};
    use approx::assert_relative_eq;

    #[test]
    fn majorizes_basic_cases() {
        assert!(majorizes(&[0.7, 0.3], &[0.5, 0.5], DEFAULT_TOL).unwrap());
        assert!(!majorizes(&[0.5, 0.5], &[0.7, 0.3], DEFAULT_TOL).unwrap());
        assert!(majorizes(&[0.5, 0.3, 0.2], &[0.4, 0.4, 0.2], DEFAULT_TOL).unwrap());
        assert!(majorizes(&[1.0, 0.0], &[1.0, 0.0], DEFAULT_TOL).unwrap());
        assert!(majorizes(&[0.3, 0.7], &[0.5, 0.5], DEFAULT_TOL).unwrap());
        assert!(majorizes(&[1.0], &[1.0], DEFAULT_TOL).unwrap());
        assert!(majorizes(&[], &[], DEFAULT_TOL).unwrap());
        assert!(majorizes(&[1.0, 0.0], &[0.5], DEFAULT_TOL).is_err());
        // unequal totals are never comparable
        assert!(!majorizes(&[1.0, 0.0], &[0.5, 0.4], DEFAULT_TOL).unwrap());
    }

    #[test]
    fn operator_majorization_pure_beats_mixed() {
        let pure = HermitianOperator::from_real_diagonal(&[1.0, 0.0, 0.0]);
        let mixed = HermitianOperator::from_real_diagonal(&[1.0 / 3.0; 3]);
        assert!(operator_majorizes(&pure, &mixed, DEFAULT_TOL).unwrap());
        assert!(!operator_majorizes(&mixed, &pure, DEFAULT_TOL).unwrap());
        assert!(operator_majorizes(&pure, &pure, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn mixed_unitary_outputs_are_majorized() {
        let mut rng = sample::seeded_rng(23);
        for _ in 0..20 {
            let a = sample::random_density(4, &mut rng);
            let weights = sample::dirichlet_uniform(3, &mut rng);
            let mut mixed = HermitianOperator::zeros(4);
            for &w in &weights {
                let u = sample::random_unitary(4, &mut rng);
                let rot = HermitianOperator::from_hermitian_unchecked(
                    &u * a.matrix() * u.adjoint(),
                );
                mixed.add_scaled(&rot, w).unwrap();
            }
            assert!(operator_majorizes(&a, &mixed, DEFAULT_TOL).unwrap());
        }
    }

    #[test]
    fn t_transform_action() {
        let tr = TTransform::new(0, 1, 0.25).unwrap();
        let y = apply_t_transform(&[1.0, 0.0], &tr).unwrap();
        assert_eq!(y, vec![0.75, 0.25]);
        let id = TTransform::new(0, 1, 0.0).unwrap();
        assert_eq!(apply_t_transform(&[0.3, 0.9], &id).unwrap(), vec![0.3, 0.9]);
        let swap = TTransform::new(0, 1, 1.0).unwrap();
        assert_eq!(apply_t_transform(&[0.3, 0.9], &swap).unwrap(), vec![0.9, 0.3]);
        assert!(TTransform::new(0, 0, 0.5).is_err());
        assert!(TTransform::new(0, 1, 1.5).is_err());
        assert!(apply_t_transform(&[1.0], &tr).is_err());
    }

    #[test]
    fn transfer_action_and_unjust_flag() {
        let tr = Transfer::new(0, 1, 0.1).unwrap();
        let (y, unjust) = apply_transfer(&[0.7, 0.3], &tr).unwrap();
        assert_relative_eq!(y[0], 0.8, epsilon = 1e-15);
        assert_relative_eq!(y[1], 0.2, epsilon = 1e-15);
        assert!(unjust);
        let (y, unjust) = apply_transfer(&[0.3, 0.7], &tr).unwrap();
        assert!((y[0] - 0.4).abs() < 1e-15 && (y[1] - 0.6).abs() < 1e-15);
        assert!(!unjust);
        let zero = Transfer::new(0, 1, 0.0).unwrap();
        let (y, unjust) = apply_transfer(&[0.5, 0.5], &zero).unwrap();
        assert_eq!(y, vec![0.5, 0.5]);
        assert!(unjust);
    }

    #[test]
    fn witness_conversions_round_trip() {
        // T-transform with t = 0.25 on (1, 0): transfer amount 0.25
        let tr = TTransform::new(0, 1, 0.25).unwrap();
        let x = [1.0, 0.0];
        let w = transfer_of_ttransform(&x, &tr).unwrap();
        assert_relative_eq!(w.amount, 0.25, epsilon = 1e-15);
        let y = apply_t_transform(&x, &tr).unwrap();
        let (back, unjust) = apply_transfer(&y, &w).unwrap();
        assert!(unjust);
        let mut back_sorted = back.clone();
        back_sorted.sort_by(|a, b| b.total_cmp(a));
        assert_relative_eq!(back_sorted[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(back_sorted[1], 0.0, epsilon = 1e-12);

        // reverse direction: y = (0.6, 0.4), amount 0.2 gives t = 1/3
        let w = Transfer::new(0, 1, 0.2).unwrap();
        let t = ttransform_of_transfer(&[0.6, 0.4], &w).unwrap();
        assert_relative_eq!(t.t, 1.0 / 3.0, epsilon = 1e-15);
        let (x2, _) = apply_transfer(&[0.6, 0.4], &w).unwrap();
        let y2 = apply_t_transform(&x2, &t).unwrap();
        assert_relative_eq!(y2[0], 0.6, epsilon = 1e-12);
        assert_relative_eq!(y2[1], 0.4, epsilon = 1e-12);

        // zero-mix T-transform produces a zero transfer
        let tr0 = TTransform::new(0, 1, 0.0).unwrap();
        let w0 = transfer_of_ttransform(&[0.8, 0.2], &tr0).unwrap();
        assert_eq!(w0.amount, 0.0);

        // non-unjust transfers are rejected in the reverse direction
        let bad = Transfer::new(1, 0, 0.2).unwrap();
        assert_eq!(ttransform_of_transfer(&[0.6, 0.4], &bad).unwrap_err(), Error::NotUnjust);
    }

    #[test]
    fn witness_round_trip_randomized() {
        let mut rng = sample::seeded_rng(77);
        for _ in 0..200 {
            let x: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
            let i = rng.random_range(0..4);
            let mut j = rng.random_range(0..3);
            if j >= i {
                j += 1;
            }
            let tr = TTransform { i, j, t: rng.random() };
            let y = apply_t_transform(&x, &tr).unwrap();
            let w = transfer_of_ttransform(&x, &tr).unwrap();
            let (back, _) = apply_transfer(&y, &w).unwrap();
            let mut bs = back;
            bs.sort_by(|a, b| b.total_cmp(a));
            let xs = sorted_desc(&x);
            for (a, b) in bs.iter().zip(xs.iter()) {
                assert_relative_eq!(a, b, epsilon = 1e-12);
            }
            // and the inverse direction reproduces y↓ from x↓
            let mut ys = y.clone();
            ys.sort_by(|a, b| b.total_cmp(a));
            let w_sorted = Transfer::new(0, 1, w.amount).unwrap();
            let pair = vec![ys[0].max(ys[1]), ys[0].min(ys[1])];
            let t2 = ttransform_of_transfer(&pair, &w_sorted).unwrap();
            let (x_pair, _) = apply_transfer(&pair, &w_sorted).unwrap();
            let y_pair = apply_t_transform(&x_pair, &t2).unwrap();
            assert_relative_eq!(y_pair[0], pair[0], epsilon = 1e-12);
            assert_relative_eq!(y_pair[1], pair[1], epsilon = 1e-12);
        }
    }

    fn replay(x: &[f64], chain: &[TTransform]) -> Vec<f64> {
        let mut v = x.to_vec();
        for tr in chain {
            v = apply_t_transform(&v, tr).unwrap();
        }
        v
    }

    #[test]
    fn transfer_chain_known_cases() {
        // identical vectors: empty chain
        let chain = transfer_chain(&[0.5, 0.5], &[0.5, 0.5], DEFAULT_TOL).unwrap();
        assert!(chain.is_empty());

        // (1,0,0) -> uniform needs at most two transforms
        let x = [1.0, 0.0, 0.0];
        let y = [1.0 / 3.0; 3];
        let chain = transfer_chain(&x, &y, DEFAULT_TOL).unwrap();
        assert!(chain.len() <= 2);
        let out = sorted_desc(&replay(&x, &chain));
        for (a, b) in out.iter().zip(y.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }

        // single transform with t = 1/2 fixes (0.5,0.3,0.2) -> (0.4,0.4,0.2)
        let chain = transfer_chain(&[0.5, 0.3, 0.2], &[0.4, 0.4, 0.2], DEFAULT_TOL).unwrap();
        assert_eq!(chain.len(), 1);
        assert_eq!((chain[0].i, chain[0].j), (0, 1));
        assert_relative_eq!(chain[0].t, 0.5, epsilon = 1e-12);

        // incomparable pairs are rejected
        assert_eq!(
            transfer_chain(&[0.5, 0.5], &[0.7, 0.3], DEFAULT_TOL).unwrap_err(),
            Error::NotComparable
        );
    }

    #[test]
    fn transfer_chain_replays_on_random_comparable_pairs() {
        let mut rng = sample::seeded_rng(4);
        for _ in 0..200 {
            let x = sample::dirichlet_uniform(6, &mut rng);
            let y = apply_random_t_transforms(&x, 4, &mut rng);
            assert!(majorizes(&x, &y, DEFAULT_TOL).unwrap());
            let chain = transfer_chain(&x, &y, DEFAULT_TOL).unwrap();
            assert!(chain.len() <= 5);
            let out = sorted_desc(&replay(&x, &chain));
            let ys = sorted_desc(&y);
            for (a, b) in out.iter().zip(ys.iter()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn robin_hood_moves_down_the_order() {
        let mut rng = sample::seeded_rng(6);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..5).map(|_| rng.random::<f64>()).collect();
            let i = rng.random_range(0..5);
            let mut j = rng.random_range(0..4);
            if j >= i {
                j += 1;
            }
            let tr = TTransform { i, j, t: rng.random() };
            let y = apply_t_transform(&x, &tr).unwrap();
            assert!(majorizes(&x, &y, 1e-12).unwrap());
        }
    }

    #[test]
    fn doubly_stochastic_outputs_are_majorized() {
        let mut rng = sample::seeded_rng(8);
        for _ in 0..200 {
            let x: Vec<f64> = (0..6).map(|_| rng.random::<f64>()).collect();
            let y = apply_random_t_transforms(&x, 10, &mut rng);
            assert!(majorizes(&x, &y, DEFAULT_TOL).unwrap());
        }
    }

    #[test]
    fn transitivity_on_constructed_triples() {
        let mut rng = sample::seeded_rng(10);
        for _ in 0..200 {
            let x = sample::dirichlet_uniform(5, &mut rng);
            let y = apply_random_t_transforms(&x, 3, &mut rng);
            let z = apply_random_t_transforms(&y, 3, &mut rng);
            assert!(majorizes(&x, &y, DEFAULT_TOL).unwrap());
            assert!(majorizes(&y, &z, DEFAULT_TOL).unwrap());
            assert!(majorizes(&x, &z, DEFAULT_TOL).unwrap());
        }
    }

    #[test]
    fn antisymmetry_up_to_permutation() {
        let mut rng = sample::seeded_rng(12);
        for _ in 0..200 {
            let x = sample::dirichlet_uniform(5, &mut rng);
            let mut y = x.clone();
            // random permutation via Fisher-Yates
            for i in (1..y.len()).rev() {
                let j = rng.random_range(0..=i);
                y.swap(i, j);
            }
            assert!(majorizes(&x, &y, DEFAULT_TOL).unwrap());
            assert!(majorizes(&y, &x, DEFAULT_TOL).unwrap());
            // mutual majorization of distinct vectors implies equal sorted forms
            let xs = sorted_desc(&x);
            let ys = sorted_desc(&y);
            for (a, b) in xs.iter().zip(ys.iter()) {
                assert_relative_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn box_simplex_majorant_values() {
        assert_eq!(majorant_box_simplex(4, 2.5).unwrap(), vec![1.0, 1.0, 0.5, 0.0]);
        assert_eq!(majorant_box_simplex(3, 3.0).unwrap(), vec![1.0, 1.0, 1.0]);
        assert_eq!(majorant_box_simplex(5, 0.0).unwrap(), vec![0.0; 5]);
        assert!(majorant_box_simplex(2, 2.5).is_err());
    }

    #[test]
    fn box_simplex_majorant_dominates_samples() {
        let mut rng = sample::seeded_rng(14);
        for &e in &[0.7, 1.0, 2.5, 3.9] {
            let maj = majorant_box_simplex(5, e).unwrap();
            for _ in 0..250 {
                let x = sample::random_box_simplex_point(5, e, &mut rng).unwrap();
                assert!(majorizes(&maj, &x, 1e-9).unwrap());
            }
        }
    }

    #[test]
    fn isotone_map_values_and_sum() {
        assert_eq!(isotone_map(&[0.4, 0.1], 1.0, |_| 0.0), vec![1.0, 1.0, 1.0, 1.0]);
        let out = isotone_map(&[1.0, 0.0], 1.0, |x| x);
        assert_eq!(out, vec![2.0, 1.0, 0.0, 1.0]);
        let total: f64 = out.iter().sum();
        assert_relative_eq!(total, 4.0, epsilon = 1e-15);
    }

    #[test]
    fn isotone_map_preserves_majorization() {
        let mut rng = sample::seeded_rng(16);
        let g = |x: f64| (0.3 + 1.7 * x * x).sqrt();
        for _ in 0..1000 {
            let v = sample::dirichlet_uniform(4, &mut rng);
            let w = apply_random_t_transforms(&v, 3, &mut rng);
            let gv = isotone_map(&v, 0.9, g);
            let gw = isotone_map(&w, 0.9, g);
            assert!(majorizes(&gv, &gw, 1e-9).unwrap());
        }
    }

    #[test]
    fn perfect_alignment_examples() {
        let d = HermitianOperator::from_real_diagonal(&[1.0, 0.5, 1.0 / 3.0]);
        let q1 = HermitianOperator::from_real_diagonal(&[1.0, 0.0, 0.0]);
        assert!(perfectly_aligned(&[d.clone(), q1.clone()], 1e-9).unwrap());

        let dd = HermitianOperator::from_hermitian_unchecked(kron(d.matrix(), d.matrix()));
        let dq = HermitianOperator::from_hermitian_unchecked(kron(d.matrix(), q1.matrix()));
        assert!(!perfectly_aligned(&[dd, dq], 1e-9).unwrap());

        let single = HermitianOperator::from_real_diagonal(&[0.2, 0.8]);
        assert!(perfectly_aligned(&[single], 1e-9).unwrap());
    }

    #[test]
    fn perfect_alignment_is_basis_independent() {
        let mut rng = sample::seeded_rng(19);
        let u = sample::random_unitary(4, &mut rng);
        let spec_a = [0.5, 0.3, 0.15, 0.05];
        let spec_b = [0.9, 0.05, 0.03, 0.02];
        let rot = |spec: &[f64]| {
            let d = HermitianOperator::from_real_diagonal(spec);
            HermitianOperator::from_hermitian_unchecked(&u * d.matrix() * u.adjoint())
        };
        assert!(perfectly_aligned(&[rot(&spec_a), rot(&spec_b)], 1e-9).unwrap());
        // non-commuting pair is never aligned
        let p1 = HermitianOperator::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0]);
        let v = sample::random_pure_state(4, &mut rng);
        let p2 = HermitianOperator::pure_projector(&v);
        assert!(!perfectly_aligned(&[p1, p2], 1e-9).unwrap());
    }

    #[test]
    fn perfect_alignment_saturates_spectral_additivity() {
        // aligned tuples: λ(Σ pᵢ Sᵢ) = Σ pᵢ λ(Sᵢ)
        let mut rng = sample::seeded_rng(31);
        for _ in 0..50 {
            let u = sample::random_unitary(4, &mut rng);
            let specs: Vec<Spectrum> =
                (0..3).map(|_| sample::random_state_spectrum(4, &mut rng)).collect();
            let ops: Vec<HermitianOperator> = specs
                .iter()
                .map(|s| {
                    let d = HermitianOperator::from_real_diagonal(s.values());
                    HermitianOperator::from_hermitian_unchecked(&u * d.matrix() * u.adjoint())
                })
                .collect();
            assert!(perfectly_aligned(&ops, 1e-9).unwrap());
            let p = sample::dirichlet_uniform(3, &mut rng);
            let mut mix = HermitianOperator::zeros(4);
            let mut spec_mix = vec![0.0; 4];
            for (op, (&w, s)) in ops.iter().zip(p.iter().zip(specs.iter())) {
                mix.add_scaled(op, w).unwrap();
                for (acc, v) in spec_mix.iter_mut().zip(s.values()) {
                    *acc += w * v;
                }
            }
            let got = mix.spectrum().unwrap();
            for (a, b) in got.values().iter().zip(spec_mix.iter()) {
                assert_relative_eq!(a, b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn degenerate_spectra_still_align() {
        // identical degenerate blocks rotated together stay aligned
        let mut rng = sample::seeded_rng(37);
        let u = sample::random_unitary(4, &mut rng);
        let a = HermitianOperator::from_real_diagonal(&[0.4, 0.4, 0.1, 0.1]);
        let b = HermitianOperator::from_real_diagonal(&[0.7, 0.1, 0.1, 0.1]);
        let rot = |h: &HermitianOperator| {
            HermitianOperator::from_hermitian_unchecked(&u * h.matrix() * u.adjoint())
        };
        assert!(perfectly_aligned(&[rot(&a), rot(&b)], 1e-9).unwrap());
    }
}
