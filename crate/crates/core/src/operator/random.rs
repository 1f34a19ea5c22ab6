//! Seeded random instance generators.
//!
//! Spectra are drawn above a floor and conjugated by a Haar-random unitary.
//! The plain functions use stream 0 of `seed`; the `*_with` variants draw from
//! a caller-supplied stream.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{c64, CMatrix, Density, Hermitian, Positive};
use crate::error::{Error, Result};
use crate::rng::substream;

/// Complex Ginibre matrix with i.i.d. standard normal real and imaginary parts.
pub fn ginibre_with<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase correction.
pub fn unitary_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let g = ginibre_with(rng, dim, dim);
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn hermitian_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Hermitian {
    assert!(dim >= 1, "dimension must be positive");
    let g = ginibre_with(rng, dim, dim);
    let h = (&g + g.adjoint()) * c64(0.5, 0.0);
    Hermitian::new(h).expect("symmetrized matrix is Hermitian")
}

pub fn hermitian(dim: usize, seed: u64) -> Hermitian {
    hermitian_with(&mut substream(seed, 0), dim)
}

fn with_spectrum<R: Rng + ?Sized>(rng: &mut R, spectrum: &[f64]) -> CMatrix {
    let u = unitary_with(rng, spectrum.len());
    &u * super::diag(spectrum) * u.adjoint()
}

/// Density matrix whose eigenvalues are `min_eig + (1 - dim·min_eig)·w` with
/// `w` uniform on the probability simplex.
pub fn density_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, min_eig: f64) -> Result<Density> {
    if dim == 0 {
        return Err(Error::Parameter("dimension must be positive".into()));
    }
    if !(min_eig > 0.0 && min_eig * dim as f64 <= 1.0) {
        return Err(Error::Parameter(format!(
            "min_eig {min_eig} infeasible for a {dim}-dimensional density matrix"
        )));
    }
    let exp: Vec<f64> = (0..dim)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = exp.iter().sum();
    let slack = 1.0 - dim as f64 * min_eig;
    let spectrum: Vec<f64> = exp.iter().map(|e| min_eig + slack * e / total).collect();
    let m = with_spectrum(rng, &spectrum);
    let tr = m.trace().re;
    Density::new(m / c64(tr, 0.0))
}

pub fn density(dim: usize, seed: u64, min_eig: f64) -> Result<Density> {
    density_with(&mut substream(seed, 0), dim, min_eig)
}

/// Positive definite operator with eigenvalues uniform in `[min_eig, min_eig + 1)`.
pub fn positive_definite_with<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    min_eig: f64,
) -> Result<Positive> {
    if dim == 0 {
        return Err(Error::Parameter("dimension must be positive".into()));
    }
    if !(min_eig > 0.0 && min_eig.is_finite()) {
        return Err(Error::Parameter(format!("min_eig {min_eig} must be positive")));
    }
    let spectrum: Vec<f64> = (0..dim).map(|_| min_eig + rng.random::<f64>()).collect();
    Positive::definite(with_spectrum(rng, &spectrum))
}

pub fn positive_definite(dim: usize, seed: u64, min_eig: f64) -> Result<Positive> {
    positive_definite_with(&mut substream(seed, 0), dim, min_eig)
}

/// Positive definite operator with log-spectrum spread: eigenvalues
/// `exp(spread·g)` for standard normal `g`.
pub fn log_normal_positive_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, spread: f64) -> Positive {
    let spectrum: Vec<f64> = (0..dim)
        .map(|_| (spread * rng.sample::<f64, _>(StandardNormal)).exp())
        .collect();
    Positive::definite(with_spectrum(rng, &spectrum)).expect("exponential spectrum is positive")
}

/// Positive definite test operator drawn from one of several spectral
/// profiles: a uniform spectrum, a log-normal spectrum, a nearly rank-deficient
/// spectrum, and a small perturbation of a multiple of the identity.
pub fn sample_definite_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Positive {
    match rng.random_range(0..4u8) {
        0 => positive_definite_with(rng, dim, 0.05).expect("valid floor"),
        1 => {
            let spread = rng.random_range(0.1..2.0);
            log_normal_positive_with(rng, dim, spread)
        }
        2 => {
            let floor = 10f64.powf(rng.random_range(-4.0..-1.0));
            positive_definite_with(rng, dim, floor).expect("valid floor")
        }
        _ => {
            let spread = rng.random_range(1e-3..0.1);
            log_normal_positive_with(rng, dim, spread)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{identity, max_abs_diff};

    #[test]
    fn density_respects_floor() {
        for seed in 0..20 {
            let rho = density(2, seed, 0.4).unwrap();
            let e = rho.eigen();
            assert!(e.min() >= 0.4 - 1e-12 && e.max() <= 0.6 + 1e-12);
        }
    }

    #[test]
    fn determinism() {
        let a = density(3, 77, 0.05).unwrap();
        let b = density(3, 77, 0.05).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        assert_eq!(hermitian(4, 3), hermitian(4, 3));
    }

    #[test]
    fn batch_traces() {
        let mut rng = substream(2024, 1);
        for _ in 0..1000 {
            let rho = density_with(&mut rng, 3, 0.05).unwrap();
            assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn infeasible_floor() {
        assert!(matches!(density(2, 0, 0.6), Err(Error::Parameter(_))));
        assert!(matches!(density(2, 0, 0.0), Err(Error::Parameter(_))));
        assert!(positive_definite(2, 0, -1.0).is_err());
    }

    #[test]
    fn unitary_is_unitary() {
        let u = unitary_with(&mut substream(5, 0), 5);
        assert!(max_abs_diff(&(u.adjoint() * &u), &identity(5)) < 1e-12);
    }
}
