//! Dense complex linear algebra over n-fold qudit tensor spaces.
//!
//! Everything here fixes one indexing convention: site 1 is the most
//! significant digit, so the basis index of ∣t₁…t_n⟩ is Σᵢ (tᵢ−1)·d^(n−i).
//! Subsets of sites are bit masks with bit (i−1) standing for site i.
//! Lifting an operator from a subset of sites to the full space and taking
//! partial traces both respect this convention, which makes every assembled
//! operator bit-for-bit reproducible.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance for construction-time checks.
pub const HERMITICITY_TOL: f64 = 1e-9;

/// Default cap on the full tensor-space dimension d^n.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// A subset of sites `1..=n`, stored as a bit mask with bit (i−1) ↔ site i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subset(pub u32);

impl Subset {
    /// The empty subset.
    pub const EMPTY: Subset = Subset(0);

    /// The full set `[n]`.
    pub fn full(n: usize) -> Subset {
        Subset(((1u64 << n) - 1) as u32)
    }

    /// Build from 1-based site indices; errors on sites outside `1..=n`.
    pub fn from_sites(sites: &[usize], n: usize) -> Result<Subset> {
        let mut mask = 0u32;
        for &s in sites {
            if s == 0 || s > n {
                return Err(Error::IndexOutOfRange(s));
            }
            mask |= 1 << (s - 1);
        }
        Ok(Subset(mask))
    }

    /// Number of sites in the subset.
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Whether the 1-based site `i` belongs to the subset.
    pub fn contains(self, site: usize) -> bool {
        site >= 1 && (self.0 >> (site - 1)) & 1 == 1
    }

    /// Complement within `[n]`.
    pub fn complement(self, n: usize) -> Subset {
        Subset(Self::full(n).0 & !self.0)
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Ascending 1-based site indices.
    pub fn sites(self) -> Vec<usize> {
        (1..=32).filter(|&i| self.contains(i)).collect()
    }

    /// All subsets of `[n]` in mask order (∅ first).
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        (0..(1u64 << n)).map(|m| Subset(m as u32))
    }
}

impl std::fmt::Display for Subset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, s) in self.sites().iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// Uniform qudit register: local dimension `d` over `n` sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteLayout {
    d: usize,
    n: usize,
}

impl SiteLayout {
    pub fn new(d: usize, n: usize) -> Result<SiteLayout> {
        if d < 1 || n < 1 || n > 32 {
            return Err(Error::InvalidParameter(format!(
                "layout requires d >= 1 and 1 <= n <= 32, got d={d}, n={n}"
            )));
        }
        d.checked_pow(n as u32).ok_or_else(|| {
            Error::InvalidParameter(format!("d^n overflows for d={d}, n={n}"))
        })?;
        Ok(SiteLayout { d, n })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Full-space dimension d^n.
    pub fn dim(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    /// Dimension of the factor carried by `sub`: d^|sub|.
    pub fn sub_dim(&self, sub: Subset) -> usize {
        self.d.pow(sub.len() as u32)
    }

    /// Digits (0-based, site 1 first) of a full-space basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for i in (0..self.n).rev() {
            out[i] = index % self.d;
            index /= self.d;
        }
        out
    }

    /// Basis index from 0-based digits, site 1 most significant.
    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &t| acc * self.d + t)
    }

    /// Positional weight of each site in the full index: weight[i] = d^(n−1−i).
    fn site_weights(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.d.pow((self.n - 1 - i) as u32)).collect()
    }
}

/// Real vector in non-increasing order: eigenvalues or singular values with
/// multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    /// Sorts the entries non-increasingly.
    pub fn from_unsorted(mut values: Vec<f64>) -> Spectrum {
        values.sort_unstable_by(|a, b| b.total_cmp(a));
        Spectrum(values)
    }

    /// Accepts an already non-increasing vector; errors otherwise.
    pub fn from_sorted(values: Vec<f64>) -> Result<Spectrum> {
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "spectrum entries must be non-increasing".into(),
            ));
        }
        Ok(Spectrum(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Sum of the `k` largest entries.
    pub fn top_k_sum(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.0.len() {
            return Err(Error::IndexOutOfRange(k));
        }
        Ok(self.0[..k].iter().sum())
    }

    /// Whether the entries form a probability vector within `tol`.
    pub fn is_probability(&self, tol: f64) -> bool {
        (self.sum() - 1.0).abs() <= tol && self.0.iter().all(|&v| v >= -tol)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for Spectrum {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Dense complex self-adjoint operator. Construction symmetrizes inputs that
/// are self-adjoint within tolerance and rejects anything farther away.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: DMatrix<Complex64>,
}

impl HermitianOperator {
    /// Checks ‖M − M†‖_max ≤ `HERMITICITY_TOL`, then stores (M + M†)/2.
    pub fn new(mat: DMatrix<Complex64>) -> Result<HermitianOperator> {
        Self::with_tol(mat, HERMITICITY_TOL)
    }

    /// Same as [`HermitianOperator::new`] with an explicit tolerance.
    pub fn with_tol(mat: DMatrix<Complex64>, tol: f64) -> Result<HermitianOperator> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "expected square matrix, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let adj = mat.adjoint();
        let dev = (&mat - &adj).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > tol {
            return Err(Error::NotHermitian);
        }
        let sym = (mat + adj).map(|z| z * 0.5);
        Ok(HermitianOperator { mat: sym })
    }

    /// Wraps a matrix that is Hermitian by construction (sums of Hermitian
    /// parts with real coefficients). Not exposed outside the crate.
    pub(crate) fn from_hermitian_unchecked(mat: DMatrix<Complex64>) -> HermitianOperator {
        HermitianOperator { mat }
    }

    /// Real diagonal operator.
    pub fn from_real_diagonal(diag: &[f64]) -> HermitianOperator {
        let n = diag.len();
        let mut mat = DMatrix::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            mat[(i, i)] = Complex64::new(v, 0.0);
        }
        HermitianOperator { mat }
    }

    /// Rank-1 projector ∣v⟩⟨v∣ onto a unit vector.
    pub fn pure_projector(v: &DVector<Complex64>) -> HermitianOperator {
        let n = v.len();
        let mat = DMatrix::from_fn(n, n, |r, c| v[r] * v[c].conj());
        HermitianOperator { mat }
    }

    pub fn zeros(dim: usize) -> HermitianOperator {
        HermitianOperator { mat: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> HermitianOperator {
        HermitianOperator { mat: DMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    /// Trace (real by self-adjointness).
    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn scaled(&self, f: f64) -> HermitianOperator {
        HermitianOperator { mat: self.mat.map(|z| z * f) }
    }

    /// self ← self + f·other. Real coefficients keep self-adjointness.
    pub fn add_scaled(&mut self, other: &HermitianOperator, f: f64) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        self.mat += other.mat.map(|z| z * f);
        Ok(())
    }

    /// Eigenvalues in non-increasing order.
    pub fn spectrum(&self) -> Result<Spectrum> {
        hermitian_spectrum(self)
    }

    /// Smallest eigenvalue; handy for PSD checks.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let s = self.spectrum()?;
        Ok(s[s.len() - 1])
    }

    /// ⟨v∣ self ∣v⟩ (real).
    pub fn expectation(&self, v: &DVector<Complex64>) -> f64 {
        let mv = &self.mat * v;
        v.iter().zip(mv.iter()).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

/// Largest entry magnitude of a complex matrix.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// ‖AB − BA‖_max.
pub fn commutator_max_norm(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    max_abs(&(a * b - b * a))
}

/// Kronecker product with the row-major block convention matching
/// [`SiteLayout`] (left factor most significant).
pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

/// Eigenvalues of a self-adjoint operator, non-increasing with multiplicity.
pub fn hermitian_spectrum(h: &HermitianOperator) -> Result<Spectrum> {
    if h.dim() == 0 {
        return Ok(Spectrum(vec![]));
    }
    if h.dim() == 1 {
        return Ok(Spectrum(vec![h.mat[(0, 0)].re]));
    }
    let eig = nalgebra::SymmetricEigen::try_new(h.mat.clone(), f64::EPSILON, 0)
        .ok_or(Error::DecompositionFailed)?;
    Ok(Spectrum::from_unsorted(eig.eigenvalues.iter().copied().collect()))
}

/// Eigendecomposition of a self-adjoint operator: (eigenvalues descending,
/// matching eigenvector columns).
pub fn hermitian_eigen(h: &HermitianOperator) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    if h.dim() == 1 {
        return Ok((vec![h.mat[(0, 0)].re], DMatrix::identity(1, 1)));
    }
    let eig = nalgebra::SymmetricEigen::try_new(h.mat.clone(), f64::EPSILON, 0)
        .ok_or(Error::DecompositionFailed)?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_unstable_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let dim = h.dim();
    let vectors = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Singular values in non-increasing order.
pub fn singular_values(a: &DMatrix<Complex64>) -> Spectrum {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Spectrum(vec![]);
    }
    let svd = a.clone().svd(false, false);
    Spectrum::from_unsorted(svd.singular_values.iter().copied().collect())
}

/// Sum of all singular values.
pub fn trace_norm(a: &DMatrix<Complex64>) -> f64 {
    singular_values(a).sum()
}

/// Largest singular value.
pub fn operator_norm(a: &DMatrix<Complex64>) -> f64 {
    let s = singular_values(a);
    if s.is_empty() {
        0.0
    } else {
        s[0]
    }
}

/// Embed an operator `r` living on the sites of `sub` into the full space,
/// placing diag(q) on every complement site. Entry-level form:
/// out[(s,t)] = r[(s_I,t_I)] · Π_{j∉I} δ_{s_j t_j} q_{s_j}.
pub fn lift_matrix(
    layout: &SiteLayout,
    sub: Subset,
    r: &DMatrix<Complex64>,
    q: &[f64],
) -> Result<DMatrix<Complex64>> {
    if q.len() != layout.d() {
        return Err(Error::BadTermDimension(format!(
            "complement factor has {} entries, local dimension is {}",
            q.len(),
            layout.d()
        )));
    }
    let sub_dim = layout.sub_dim(sub);
    if r.nrows() != sub_dim || r.ncols() != sub_dim {
        return Err(Error::BadTermDimension(format!(
            "operator on {sub} must have dimension {sub_dim}, got {}x{}",
            r.nrows(),
            r.ncols()
        )));
    }
    let n = layout.n();
    let d = layout.d();
    let weights = layout.site_weights();
    let in_sites: Vec<usize> = (0..n).filter(|i| sub.contains(i + 1)).collect();
    let out_sites: Vec<usize> = (0..n).filter(|i| !sub.contains(i + 1)).collect();
    let comp_dim = layout.dim() / sub_dim;

    // Positional offsets of each inner/complement digit in the full index.
    let mut out = DMatrix::zeros(layout.dim(), layout.dim());
    let mut comp_digits = vec![0usize; out_sites.len()];
    for comp in 0..comp_dim {
        let mut rem = comp;
        for k in (0..out_sites.len()).rev() {
            comp_digits[k] = rem % d;
            rem /= d;
        }
        let comp_offset: usize = comp_digits
            .iter()
            .zip(&out_sites)
            .map(|(&t, &i)| t * weights[i])
            .sum();
        let q_factor: f64 = comp_digits.iter().map(|&t| q[t]).product();
        if q_factor == 0.0 {
            continue;
        }
        let mut row_digits = vec![0usize; in_sites.len()];
        for rr in 0..sub_dim {
            let mut rem = rr;
            for k in (0..in_sites.len()).rev() {
                row_digits[k] = rem % d;
                rem /= d;
            }
            let row_offset: usize = row_digits
                .iter()
                .zip(&in_sites)
                .map(|(&t, &i)| t * weights[i])
                .sum();
            let mut col_digits = vec![0usize; in_sites.len()];
            for cc in 0..sub_dim {
                let rv = r[(rr, cc)];
                if rv == Complex64::ZERO {
                    continue;
                }
                let mut rem = cc;
                for k in (0..in_sites.len()).rev() {
                    col_digits[k] = rem % d;
                    rem /= d;
                }
                let col_offset: usize = col_digits
                    .iter()
                    .zip(&in_sites)
                    .map(|(&t, &i)| t * weights[i])
                    .sum();
                out[(comp_offset + row_offset, comp_offset + col_offset)] = rv * q_factor;
            }
        }
    }
    Ok(out)
}

/// Self-adjoint variant of [`lift_matrix`] for state factors: builds
/// ρ ⊗ Q^{⊗I^c} with Q = diag(q) placed at the true site positions.
pub fn lift(
    layout: &SiteLayout,
    sub: Subset,
    r: &HermitianOperator,
    q: &Spectrum,
) -> Result<HermitianOperator> {
    let m = lift_matrix(layout, sub, r.matrix(), q.values())?;
    Ok(HermitianOperator::from_hermitian_unchecked(m))
}

/// Embed `r` on the sites of `sub` with arbitrary per-site complement
/// factors (ascending site order). Used by product machinery where the
/// complement factors need not be diagonal.
pub fn lift_with_factors(
    layout: &SiteLayout,
    sub: Subset,
    r: &DMatrix<Complex64>,
    factors: &[DMatrix<Complex64>],
) -> Result<DMatrix<Complex64>> {
    let n = layout.n();
    let d = layout.d();
    let sub_dim = layout.sub_dim(sub);
    if r.nrows() != sub_dim || r.ncols() != sub_dim {
        return Err(Error::BadTermDimension(format!(
            "operator on {sub} must have dimension {sub_dim}, got {}x{}",
            r.nrows(),
            r.ncols()
        )));
    }
    let out_sites: Vec<usize> = (0..n).filter(|i| !sub.contains(i + 1)).collect();
    if factors.len() != out_sites.len() {
        return Err(Error::BadTermDimension(format!(
            "expected {} complement factors, got {}",
            out_sites.len(),
            factors.len()
        )));
    }
    if factors.iter().any(|f| f.nrows() != d || f.ncols() != d) {
        return Err(Error::BadTermDimension(
            "complement factors must be d x d".into(),
        ));
    }
    let dim = layout.dim();
    let in_sites: Vec<usize> = (0..n).filter(|i| sub.contains(i + 1)).collect();
    let out = DMatrix::from_fn(dim, dim, |s, t| {
        let sd = layout.digits(s);
        let td = layout.digits(t);
        let r_row = in_sites.iter().fold(0, |acc, &i| acc * d + sd[i]);
        let r_col = in_sites.iter().fold(0, |acc, &i| acc * d + td[i]);
        let mut v = r[(r_row, r_col)];
        for (k, &i) in out_sites.iter().enumerate() {
            v *= factors[k][(sd[i], td[i])];
        }
        v
    });
    Ok(out)
}

/// Partial trace onto the sites in `keep`, preserving the trace.
pub fn partial_trace(
    layout: &SiteLayout,
    h: &HermitianOperator,
    keep: Subset,
) -> Result<HermitianOperator> {
    if h.dim() != layout.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator dimension {} does not match layout dimension {}",
            h.dim(),
            layout.dim()
        )));
    }
    let dims = vec![layout.d(); layout.n()];
    let m = partial_trace_mixed(&dims, h.matrix(), keep)?;
    Ok(HermitianOperator::from_hermitian_unchecked(m))
}

/// Mixed-radix partial trace: site `i` has dimension `dims[i-1]`.
pub fn partial_trace_mixed(
    dims: &[usize],
    m: &DMatrix<Complex64>,
    keep: Subset,
) -> Result<DMatrix<Complex64>> {
    let n = dims.len();
    let full_dim: usize = dims.iter().product();
    if m.nrows() != full_dim || m.ncols() != full_dim {
        return Err(Error::DimensionMismatch(format!(
            "operator dimension {} does not match site dimensions (product {})",
            m.nrows(),
            full_dim
        )));
    }
    if keep.0 >= (1u64 << n) as u32 && !keep.is_subset_of(Subset::full(n)) {
        return Err(Error::IndexOutOfRange(keep.0 as usize));
    }
    let keep_sites: Vec<usize> = (0..n).filter(|i| keep.contains(i + 1)).collect();
    let trace_sites: Vec<usize> = (0..n).filter(|i| !keep.contains(i + 1)).collect();
    // weights[i] = product of dims of sites after i
    let mut weights = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        weights[i] = weights[i + 1] * dims[i + 1];
    }
    let keep_dim: usize = keep_sites.iter().map(|&i| dims[i]).product();
    let trace_dim: usize = trace_sites.iter().map(|&i| dims[i]).product();
    let mut out = DMatrix::zeros(keep_dim, keep_dim);
    let offset_of = |sites: &[usize], mut idx: usize| -> usize {
        let mut off = 0;
        for &i in sites.iter().rev() {
            off += (idx % dims[i]) * weights[i];
            idx /= dims[i];
        }
        off
    };
    for t in 0..trace_dim {
        let t_off = offset_of(&trace_sites, t);
        for a in 0..keep_dim {
            let a_off = offset_of(&keep_sites, a) + t_off;
            for b in 0..keep_dim {
                let b_off = offset_of(&keep_sites, b) + t_off;
                out[(a, b)] += m[(a_off, b_off)];
            }
        }
    }
    Ok(out)
}
