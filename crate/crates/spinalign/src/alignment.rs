//! Spin alignment problem instances, alignment operators, the conjectured
//! optimizer, and the sampled alignment preorder.
//!
//! An instance fixes (d, n, μ, Q) with Q diagonal in the computational basis
//! and its spectrum non-increasing; the problem is unitarily covariant per
//! site, so this loses no generality and makes ∣q₁⟩ the first basis vector.
//! An alignment operator is Σ_I μ_I ρ_I ⊗ Q^{⊗I^c}; the conjectured
//! optimizer uses ρ_I = ∣q₁⟩⟨q₁∣^{⊗I}.
//!
//! The alignment preorder quantifies over all probability measures, which no
//! sampler can decide; verdicts are therefore `MoreAlignedOnSamples` (never
//! "proved"), while any single violation is a hard counterexample.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::majorization::majorization_violation;
use crate::sample;
use crate::tensor::{
    lift, partial_trace, HermitianOperator, SiteLayout, Spectrum, Subset, DEFAULT_DIM_CAP,
};

/// One spin alignment problem family: local dimension, site count, the
/// spectrum of Q, and the measure μ on subsets of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    layout: SiteLayout,
    qspec: Spectrum,
    mu: BTreeMap<Subset, f64>,
    cap: usize,
}

impl ProblemInstance {
    pub fn new(
        d: usize,
        n: usize,
        qspec: Spectrum,
        mu: Vec<(Subset, f64)>,
    ) -> Result<ProblemInstance> {
        Self::with_cap(d, n, qspec, mu, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(
        d: usize,
        n: usize,
        qspec: Spectrum,
        mu: Vec<(Subset, f64)>,
        cap: usize,
    ) -> Result<ProblemInstance> {
        let layout = SiteLayout::new(d, n)?;
        if layout.dim() > cap {
            return Err(Error::CapExceeded { dim: layout.dim(), cap });
        }
        if qspec.len() != d {
            return Err(Error::BadTermDimension(format!(
                "Q spectrum has {} entries, local dimension is {d}",
                qspec.len()
            )));
        }
        if !qspec.is_probability(1e-9) {
            return Err(Error::InvalidParameter(
                "Q spectrum must be a probability vector".into(),
            ));
        }
        let mut map = BTreeMap::new();
        let mut total = 0.0;
        for (sub, w) in mu {
            if !sub.is_subset_of(Subset::full(n)) {
                return Err(Error::IndexOutOfRange(sub.0 as usize));
            }
            if w < -1e-12 {
                return Err(Error::InvalidParameter("mu weights must be >= 0".into()));
            }
            total += w;
            if w > 0.0 && map.insert(sub, w).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "duplicate subset {sub} in mu"
                )));
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "mu weights must sum to 1, got {total}"
            )));
        }
        if map.is_empty() {
            return Err(Error::InvalidParameter("mu has empty support".into()));
        }
        Ok(ProblemInstance { layout, qspec, mu: map, cap })
    }

    pub fn layout(&self) -> &SiteLayout {
        &self.layout
    }

    pub fn d(&self) -> usize {
        self.layout.d()
    }

    pub fn n(&self) -> usize {
        self.layout.n()
    }

    /// Full tensor-space dimension d^n.
    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn qspec(&self) -> &Spectrum {
        &self.qspec
    }

    /// Largest eigenvalue of Q.
    pub fn q_top(&self) -> f64 {
        self.qspec[0]
    }

    /// The measure μ restricted to its support, in subset-mask order.
    pub fn mu(&self) -> &BTreeMap<Subset, f64> {
        &self.mu
    }

    /// Support of μ in subset-mask order.
    pub fn support(&self) -> Vec<Subset> {
        self.mu.keys().copied().collect()
    }
}

/// Map from subsets in supp(μ) to density operators on those sites.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTuple(BTreeMap<Subset, HermitianOperator>);

impl StateTuple {
    pub fn new(map: BTreeMap<Subset, HermitianOperator>) -> StateTuple {
        StateTuple(map)
    }

    pub fn get(&self, sub: Subset) -> Option<&HermitianOperator> {
        self.0.get(&sub)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Subset, &HermitianOperator)> {
        self.0.iter()
    }

    /// Tuple of pure random states, one per subset in supp(μ).
    pub fn random_pure<R: rand::Rng + ?Sized>(inst: &ProblemInstance, rng: &mut R) -> StateTuple {
        let mut map = BTreeMap::new();
        for sub in inst.support() {
            let dim = inst.layout().sub_dim(sub);
            let v = sample::random_pure_state(dim, rng);
            map.insert(sub, HermitianOperator::pure_projector(&v));
        }
        StateTuple(map)
    }

    /// Tuple of random full-rank mixed states.
    pub fn random_mixed<R: rand::Rng + ?Sized>(inst: &ProblemInstance, rng: &mut R) -> StateTuple {
        let mut map = BTreeMap::new();
        for sub in inst.support() {
            let dim = inst.layout().sub_dim(sub);
            map.insert(sub, sample::random_density(dim, rng));
        }
        StateTuple(map)
    }

    /// Checks coverage of supp(μ), dimensions, positivity and unit traces.
    pub fn validate_for(&self, inst: &ProblemInstance, tol: f64) -> Result<()> {
        for sub in inst.support() {
            let rho = self
                .get(sub)
                .ok_or_else(|| Error::MissingTupleEntry(sub.to_string()))?;
            let want = inst.layout().sub_dim(sub);
            if rho.dim() != want {
                return Err(Error::BadTermDimension(format!(
                    "state on {sub} has dimension {}, expected {want}",
                    rho.dim()
                )));
            }
            if (rho.trace() - 1.0).abs() > tol {
                return Err(Error::InvalidParameter(format!(
                    "state on {sub} has trace {}",
                    rho.trace()
                )));
            }
            if rho.min_eigenvalue()? < -tol {
                return Err(Error::InvalidParameter(format!(
                    "state on {sub} is not positive semi-definite"
                )));
            }
        }
        Ok(())
    }
}

/// The conjectured optimal tuple: ρ_I = ∣q₁⟩⟨q₁∣^{⊗I}, the projector onto
/// the all-ones basis string (index 0 in each factor space).
pub fn conjectured_tuple(inst: &ProblemInstance) -> StateTuple {
    let mut map = BTreeMap::new();
    for sub in inst.support() {
        let dim = inst.layout().sub_dim(sub);
        let mut diag = vec![0.0; dim];
        diag[0] = 1.0;
        map.insert(sub, HermitianOperator::from_real_diagonal(&diag));
    }
    StateTuple::new(map)
}

/// The unweighted lifted summands ρ_I ⊗ Q^{⊗I^c}, in subset-mask order over
/// supp(μ).
pub fn lifted_terms(inst: &ProblemInstance, tuple: &StateTuple) -> Result<Vec<HermitianOperator>> {
    let mut terms = Vec::with_capacity(inst.mu().len());
    for sub in inst.support() {
        let rho = tuple
            .get(sub)
            .ok_or_else(|| Error::MissingTupleEntry(sub.to_string()))?;
        terms.push(lift(inst.layout(), sub, rho, inst.qspec())?);
    }
    Ok(terms)
}

/// The alignment operator Σ_I μ_I ρ_I ⊗ Q^{⊗I^c}.
pub fn build_alignment_operator(
    inst: &ProblemInstance,
    tuple: &StateTuple,
) -> Result<HermitianOperator> {
    let mut out = HermitianOperator::zeros(inst.dim());
    for sub in inst.support() {
        let rho = tuple
            .get(sub)
            .ok_or_else(|| Error::MissingTupleEntry(sub.to_string()))?;
        let term = lift(inst.layout(), sub, rho, inst.qspec())?;
        out.add_scaled(&term, inst.mu()[&sub])?;
    }
    Ok(out)
}

/// The largest possible top eigenvalue of any alignment operator of the
/// instance: Σ_I μ_I λ₁(Q)^{|I^c|}, attained by the conjectured tuple.
pub fn top_eigenvalue_bound(inst: &ProblemInstance) -> f64 {
    let q1 = inst.q_top();
    inst.mu()
        .iter()
        .map(|(sub, w)| w * q1.powi((inst.n() - sub.len()) as i32))
        .sum()
}

/// How the probability simplex is sampled when testing the alignment
/// preorder: all vertices and the uniform point are always included, then
/// `dirichlet` flat-Dirichlet draws (sample i seeded with seed+i), then any
/// caller-supplied extra points.
#[derive(Debug, Clone)]
pub struct SamplingPlan {
    pub dirichlet: usize,
    pub seed: u64,
    pub extra_points: Vec<Vec<f64>>,
}

impl SamplingPlan {
    pub fn new(seed: u64) -> SamplingPlan {
        SamplingPlan { dirichlet: 64, seed, extra_points: Vec::new() }
    }

    pub fn with_dirichlet(mut self, n: usize) -> SamplingPlan {
        self.dirichlet = n;
        self
    }

    pub fn with_extra_point(mut self, p: Vec<f64>) -> SamplingPlan {
        self.extra_points.push(p);
        self
    }
}

/// A sampled failure of the alignment preorder: at measure `weights` the
/// prefix sum of order `prefix_index` fell short by `gap`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationWitness {
    pub weights: Vec<f64>,
    pub prefix_index: usize,
    pub gap: f64,
    pub sample_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlignmentOutcome {
    MoreAlignedOnSamples,
    Violated(ViolationWitness),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentVerdict {
    pub outcome: AlignmentOutcome,
    pub samples_checked: usize,
}

impl AlignmentVerdict {
    pub fn is_violation(&self) -> bool {
        matches!(self.outcome, AlignmentOutcome::Violated(_))
    }
}

/// Sampled test of "tuple A is more aligned than tuple B": the mixture under
/// A must spectrally majorize the mixture under B at every sampled measure.
/// Requires matching per-index spectra. The witness with the lowest sample
/// index wins, so the verdict is deterministic.
pub fn more_aligned(
    a: &[HermitianOperator],
    b: &[HermitianOperator],
    plan: &SamplingPlan,
    tol: f64,
) -> Result<AlignmentVerdict> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "tuple lengths {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let dim = a[0].dim();
    if a.iter().chain(b.iter()).any(|op| op.dim() != dim) {
        return Err(Error::DimensionMismatch(
            "tuple members must share one space".into(),
        ));
    }
    for (x, y) in a.iter().zip(b.iter()) {
        let sx = x.spectrum()?;
        let sy = y.spectrum()?;
        let eff = crate::majorization::effective_tol(sx.values(), tol);
        if sx
            .values()
            .iter()
            .zip(sy.values())
            .any(|(u, v)| (u - v).abs() > eff)
        {
            return Err(Error::SpectraMismatch);
        }
    }

    let ell = a.len();
    let mut samples: Vec<Vec<f64>> = Vec::with_capacity(ell + 1 + plan.dirichlet);
    for i in 0..ell {
        let mut v = vec![0.0; ell];
        v[i] = 1.0;
        samples.push(v);
    }
    samples.push(vec![1.0 / ell as f64; ell]);
    samples.extend(plan.extra_points.iter().cloned());
    for i in 0..plan.dirichlet {
        let mut rng = sample::seeded_rng(plan.seed.wrapping_add(i as u64));
        samples.push(sample::dirichlet_uniform(ell, &mut rng));
    }

    for (idx, p) in samples.iter().enumerate() {
        if p.len() != ell {
            return Err(Error::DimensionMismatch(format!(
                "sample point has {} weights for {ell} terms",
                p.len()
            )));
        }
        let mut mix_a = HermitianOperator::zeros(dim);
        let mut mix_b = HermitianOperator::zeros(dim);
        for i in 0..ell {
            mix_a.add_scaled(&a[i], p[i])?;
            mix_b.add_scaled(&b[i], p[i])?;
        }
        let sa = mix_a.spectrum()?;
        let sb = mix_b.spectrum()?;
        if let Some((k, gap)) = majorization_violation(sa.values(), sb.values(), tol)? {
            return Ok(AlignmentVerdict {
                outcome: AlignmentOutcome::Violated(ViolationWitness {
                    weights: p.clone(),
                    prefix_index: k,
                    gap,
                    sample_index: idx,
                }),
                samples_checked: idx + 1,
            });
        }
    }
    Ok(AlignmentVerdict {
        outcome: AlignmentOutcome::MoreAlignedOnSamples,
        samples_checked: samples.len(),
    })
}

/// Replace Q by the flattened state Q̃ with λ₁ = λ₂ and push the removed
/// ∣q₁⟩⟨q₁∣ weight into the measure:
/// μ̃_K = Σ_{I⊆K} μ_I ε^{|K∖I|} (1−ε)^{|K^c|} with ε = λ₁(Q) − λ₂(Q).
/// With `conserve` set, the rebuilt conjectured-tuple operator is checked to
/// reproduce the original within 1e-10 before returning.
pub fn reduce_flat_top(inst: &ProblemInstance, conserve: bool) -> Result<ProblemInstance> {
    let q = inst.qspec();
    if q.len() < 2 || q[1] <= 1e-12 {
        return Err(Error::InvalidParameter(
            "flat-top reduction needs rank(Q) >= 2".into(),
        ));
    }
    let eps = q[0] - q[1];
    if eps == 0.0 {
        return Ok(inst.clone());
    }
    let scale = 1.0 / (1.0 - eps);
    let mut flat = vec![q[1] * scale, q[1] * scale];
    flat.extend(q.values()[2..].iter().map(|v| v * scale));
    let qflat = Spectrum::from_sorted(flat)?;

    let n = inst.n();
    let mut mu_new: Vec<(Subset, f64)> = Vec::new();
    for k_mask in Subset::all(n) {
        let mut w = 0.0;
        for (&i_mask, &mu_i) in inst.mu() {
            if i_mask.is_subset_of(k_mask) {
                let grown = k_mask.len() - i_mask.len();
                let outside = n - k_mask.len();
                w += mu_i * eps.powi(grown as i32) * (1.0 - eps).powi(outside as i32);
            }
        }
        if w > 0.0 {
            mu_new.push((k_mask, w));
        }
    }
    // binomial expansion keeps the total at 1 up to roundoff
    let total: f64 = mu_new.iter().map(|(_, w)| w).sum();
    if (total - 1.0).abs() > 1e-13 {
        for (_, w) in &mut mu_new {
            *w /= total;
        }
    }
    let reduced = ProblemInstance::with_cap(inst.d(), n, qflat, mu_new, inst.cap())?;

    if conserve {
        let before = build_alignment_operator(inst, &conjectured_tuple(inst))?;
        let after = build_alignment_operator(&reduced, &conjectured_tuple(&reduced))?;
        let dev = crate::tensor::max_abs(&(before.matrix() - after.matrix()));
        if dev > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "flat-top reduction failed to conserve the operator (deviation {dev:.2e})"
            )));
        }
    }
    Ok(reduced)
}

/// Output of the n-fold product of qudit depolarizing channels with per-site
/// retention parameters, applied site by site.
pub fn depolarizing_output(
    layout: &SiteLayout,
    site_params: &[f64],
    rho: &HermitianOperator,
) -> Result<HermitianOperator> {
    validate_depolarizing_inputs(layout, site_params, rho)?;
    let uniform = Spectrum::from_sorted(vec![1.0 / layout.d() as f64; layout.d()])?;
    let mut out = rho.clone();
    for site in 1..=layout.n() {
        let keep = Subset(Subset::full(layout.n()).0 & !(1 << (site - 1)));
        let traced = partial_trace(layout, &out, keep)?;
        let replaced = lift(layout, keep, &traced, &uniform)?;
        let q = site_params[site - 1];
        let mut next = out.scaled(q);
        next.add_scaled(&replaced, 1.0 - q)?;
        out = next;
    }
    Ok(out)
}

/// The same channel output assembled as an alignment operator:
/// Σ_I ν_I ρ_I ⊗ (𝟙/d)^{⊗I^c} with ν_I = Π_{i∈I} qᵢ Π_{j∉I} (1−qⱼ) and ρ_I
/// the marginals of the input.
pub fn depolarizing_alignment_sum(
    layout: &SiteLayout,
    site_params: &[f64],
    rho: &HermitianOperator,
) -> Result<HermitianOperator> {
    validate_depolarizing_inputs(layout, site_params, rho)?;
    let uniform = Spectrum::from_sorted(vec![1.0 / layout.d() as f64; layout.d()])?;
    let n = layout.n();
    let mut out = HermitianOperator::zeros(layout.dim());
    for sub in Subset::all(n) {
        let mut weight = 1.0;
        for site in 1..=n {
            let q = site_params[site - 1];
            weight *= if sub.contains(site) { q } else { 1.0 - q };
        }
        if weight == 0.0 {
            continue;
        }
        let marginal = partial_trace(layout, rho, sub)?;
        let term = lift(layout, sub, &marginal, &uniform)?;
        out.add_scaled(&term, weight)?;
    }
    Ok(out)
}

fn validate_depolarizing_inputs(
    layout: &SiteLayout,
    site_params: &[f64],
    rho: &HermitianOperator,
) -> Result<()> {
    if site_params.len() != layout.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} site parameters for {} sites",
            site_params.len(),
            layout.n()
        )));
    }
    if site_params.iter().any(|q| !(0.0..=1.0).contains(q)) {
        return Err(Error::InvalidParameter(
            "depolarizing parameters must lie in [0,1]".into(),
        ));
    }
    if rho.dim() != layout.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs layout dimension {}",
            rho.dim(),
            layout.dim()
        )));
    }
    Ok(())
}

/// Sampled check that sorting the free factors cannot hurt alignment when
/// the fixed factors commute: (Cᵢ ⊗ Aᵢ↓)ᵢ is more aligned than (Cᵢ ⊗ Aᵢ)ᵢ
/// for simultaneously diagonalizable PSD Cᵢ. Aᵢ↓ is diag(λ(Aᵢ)) in the
/// distinguished basis.
pub fn commuting_factor_check(
    c_list: &[HermitianOperator],
    a_list: &[HermitianOperator],
    plan: &SamplingPlan,
    tol: f64,
) -> Result<AlignmentVerdict> {
    if c_list.len() != a_list.len() || c_list.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "tuple lengths {} vs {}",
            c_list.len(),
            a_list.len()
        )));
    }
    for (i, ci) in c_list.iter().enumerate() {
        if ci.min_eigenvalue()? < -tol {
            return Err(Error::InvalidParameter(format!(
                "commuting factor {i} is not positive semi-definite"
            )));
        }
        for cj in &c_list[i + 1..] {
            let scale = f64::max(
                1.0,
                crate::tensor::max_abs(ci.matrix()) * crate::tensor::max_abs(cj.matrix()),
            );
            if crate::tensor::commutator_max_norm(ci.matrix(), cj.matrix()) > tol * scale {
                return Err(Error::NonCommuting);
            }
        }
    }
    let mut sorted_tuple = Vec::with_capacity(a_list.len());
    let mut plain_tuple = Vec::with_capacity(a_list.len());
    for (c, a) in c_list.iter().zip(a_list) {
        let spec = a.spectrum()?;
        let a_sorted = HermitianOperator::from_real_diagonal(spec.values());
        sorted_tuple.push(HermitianOperator::from_hermitian_unchecked(
            crate::tensor::kron(c.matrix(), a_sorted.matrix()),
        ));
        plain_tuple.push(HermitianOperator::from_hermitian_unchecked(
            crate::tensor::kron(c.matrix(), a.matrix()),
        ));
    }
    more_aligned(&sorted_tuple, &plain_tuple, plan, tol)
}

/// Decompose every mixed state of the tuple into eigenvectors and enumerate
/// all pure selections. By linearity some selection scores at least as well
/// as the mixture for any convex objective.
pub fn pure_refinements(inst: &ProblemInstance, tuple: &StateTuple) -> Result<Vec<StateTuple>> {
    let support = inst.support();
    let mut choices: Vec<Vec<DVector<Complex64>>> = Vec::new();
    for sub in &support {
        let rho = tuple
            .get(*sub)
            .ok_or_else(|| Error::MissingTupleEntry(sub.to_string()))?;
        let (vals, vecs) = crate::tensor::hermitian_eigen(rho)?;
        let mut vectors = Vec::new();
        for (i, &v) in vals.iter().enumerate() {
            if v > 1e-12 {
                vectors.push(vecs.column(i).into_owned());
            }
        }
        choices.push(vectors);
    }
    let mut combos: Vec<Vec<usize>> = vec![vec![]];
    for opts in &choices {
        let mut next = Vec::new();
        for base in combos {
            for k in 0..opts.len() {
                let mut with = base.clone();
                with.push(k);
                next.push(with);
            }
        }
        combos = next;
    }
    let mut out = Vec::with_capacity(combos.len());
    for combo in combos {
        let mut map = BTreeMap::new();
        for ((sub, opts), &k) in support.iter().zip(&choices).zip(&combo) {
            map.insert(*sub, HermitianOperator::pure_projector(&opts[k]));
        }
        out.push(StateTuple::new(map));
    }
    Ok(out)
}
