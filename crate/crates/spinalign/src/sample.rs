//! Seeded random sampling of states, unitaries, projectors and measures.
//!
//! Pure states come from normalized complex Gaussian vectors, projectors and
//! unitaries from QR factorizations of Gaussian frames. Everything is
//! deterministic for a fixed seed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::tensor::{HermitianOperator, Spectrum};

/// The crate-wide seeded generator.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian entry.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Unit vector drawn from the rotation-invariant measure.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<Complex64> {
    loop {
        let mut v = DVector::from_fn(dim, |_, _| complex_gaussian(rng));
        let norm = v.norm();
        if norm > 1e-12 {
            v /= Complex64::new(norm, 0.0);
            return v;
        }
    }
}

/// Haar-like random unitary: QR of a Gaussian matrix with the phases of the
/// R diagonal absorbed into Q.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = gaussian_matrix(dim, dim, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::ONE };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Rank-`rank` projector from an orthonormalized Gaussian frame.
pub fn random_projector<R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> Result<HermitianOperator> {
    if rank < 1 || rank > dim {
        return Err(Error::RankOutOfRange { rank, dim });
    }
    let frame = random_frame(dim, rank, rng);
    Ok(HermitianOperator::from_hermitian_unchecked(&frame * frame.adjoint()))
}

/// Orthonormal `dim x k` frame with Haar-like distribution.
pub fn random_frame<R: Rng + ?Sized>(dim: usize, k: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = gaussian_matrix(dim, k, rng);
    g.qr().q()
}

/// Random full-rank density operator G G† / tr(G G†).
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator {
    let g = gaussian_matrix(dim, dim, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    HermitianOperator::from_hermitian_unchecked(m.map(|z| z / tr))
}

/// Random self-adjoint operator (G + G†)/2 with Gaussian G.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator {
    let g = gaussian_matrix(dim, dim, rng);
    let m = (&g + g.adjoint()).map(|z| z * 0.5);
    HermitianOperator::from_hermitian_unchecked(m)
}

/// Uniform point of the probability simplex (flat Dirichlet), via
/// normalized exponential draws.
pub fn dirichlet_uniform<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let draws: Vec<f64> = (0..len)
            .map(|_| {
                let u: f64 = rng.random();
                -(1.0 - u).ln()
            })
            .collect();
        let total: f64 = draws.iter().sum();
        if total > 1e-12 {
            return draws.iter().map(|x| x / total).collect();
        }
    }
}

/// Random state spectrum: a sorted uniform simplex point.
pub fn random_state_spectrum<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Spectrum {
    Spectrum::from_unsorted(dirichlet_uniform(dim, rng))
}

/// Random point of S_e = { x ∈ [0,1]^m : Σx = e }: scaled flat-Dirichlet
/// draw with entries above 1 clipped and the remaining mass redistributed.
pub fn random_box_simplex_point<R: Rng + ?Sized>(m: usize, e: f64, rng: &mut R) -> Result<Vec<f64>> {
    if e < 0.0 || e > m as f64 {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= e <= m, got e={e}, m={m}"
        )));
    }
    let mut x: Vec<f64> = dirichlet_uniform(m, rng).iter().map(|v| v * e).collect();
    // Redistribute clipped excess until every entry fits in [0,1]. Entries
    // pinned at 1 never move again, so this terminates within m+1 passes.
    for _ in 0..=m {
        let mut excess = 0.0;
        let mut free_mass = 0.0;
        for v in &mut x {
            if *v >= 1.0 {
                excess += *v - 1.0;
                *v = 1.0;
            } else {
                free_mass += *v;
            }
        }
        if excess <= 1e-15 {
            break;
        }
        if free_mass <= 1e-15 {
            // all free entries are ~0: spread the excess uniformly
            let slack: Vec<usize> = (0..m).filter(|&i| x[i] < 1.0).collect();
            if slack.is_empty() {
                break;
            }
            let add = excess / slack.len() as f64;
            for i in slack {
                x[i] += add;
            }
            continue;
        }
        let scale = (free_mass + excess) / free_mass;
        for v in &mut x {
            if *v < 1.0 {
                *v *= scale;
            }
        }
    }
    Ok(x)
}
