//! σ-weighted non-commutative `L_p` calculus.
//!
//! For a faithful state σ, `Γ_σ^s(X) = σ^{s/2} X σ^{s/2}` and
//! `‖X‖_{p,σ} = tr[|Γ_σ^{1/p}(X)|^p]^{1/p}` for every real `p ≠ 0`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::operator::{
    self, c64, check_square, eigh, eigh_jacobi, eigvalsh_jacobi, hermiticity_residual, max_abs, random,
    trace_product, CMatrix, Density, Eigen, Positive, C64,
};
use crate::rng::substream;

/// Tolerance used by the inequality checks in this module.
pub const INEQ_TOL: f64 = 1e-9;

/// Hölder conjugate `p/(p-1)`; `+∞` at `p = 1`.
pub fn holder_conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// Exponent pair `(p, p̂)` with `1/p + 1/p̂ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PExponent {
    pub p: f64,
    pub hat_p: f64,
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        check_exponent(p)?;
        Ok(PExponent { p, hat_p: holder_conjugate(p) })
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p == 0.0 || !p.is_finite() {
        return Err(Error::UnsupportedExponent(p));
    }
    Ok(())
}

/// A faithful reference state with its cached spectral decomposition.
#[derive(Debug, Clone)]
pub struct WeightedSpace {
    sigma: Density,
    eig: Eigen,
    dim: usize,
}

impl WeightedSpace {
    pub fn new(sigma: Density) -> Result<Self> {
        sigma.require_definite("reference state σ")?;
        let eig = sigma.eigen().clone();
        let dim = sigma.dim();
        Ok(WeightedSpace { sigma, eig, dim })
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        Self::new(Density::from_diagonal(values)?)
    }

    /// Maximally mixed reference state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::from_diagonal(&vec![1.0 / dim as f64; dim])
    }

    pub fn sigma(&self) -> &Density {
        &self.sigma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigen(&self) -> &Eigen {
        &self.eig
    }

    pub fn s_min(&self) -> f64 {
        self.eig.min()
    }

    /// `σ^s`.
    pub fn sigma_pow(&self, s: f64) -> CMatrix {
        if s == 0.0 {
            return operator::identity(self.dim);
        }
        self.eig.map(|x| x.powf(s))
    }

    /// `log σ`.
    pub fn log_sigma(&self) -> CMatrix {
        self.eig.map(f64::ln)
    }

    pub(crate) fn check(&self, x: &CMatrix, what: &str) -> Result<()> {
        check_square(x, what)?;
        if x.nrows() != self.dim {
            return Err(Error::Dimension(format!(
                "{what} has dimension {}, reference state has {}",
                x.nrows(),
                self.dim
            )));
        }
        Ok(())
    }

    /// `V† X V` where `σ = V diag(s) V†`.
    pub fn to_eigenbasis(&self, x: &CMatrix) -> CMatrix {
        self.eig.vectors.adjoint() * x * &self.eig.vectors
    }

    /// `V X V†`.
    pub fn from_eigenbasis(&self, x: &CMatrix) -> CMatrix {
        &self.eig.vectors * x * self.eig.vectors.adjoint()
    }

    /// `Γ_σ^s` in the eigenbasis of σ: entrywise scaling by `(s_i s_j)^{s/2}`.
    pub fn scale_eigenbasis(&self, x: &CMatrix, s: f64) -> CMatrix {
        if s == 0.0 {
            return x.clone();
        }
        let f: Vec<f64> = self.eig.values.iter().map(|v| v.powf(s / 2.0)).collect();
        CMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] * (f[i] * f[j]))
    }

    /// `Γ_σ^s(X) = σ^{s/2} X σ^{s/2}`.
    pub fn gamma_power(&self, x: &CMatrix, s: f64) -> CMatrix {
        if s == 0.0 {
            return x.clone();
        }
        self.from_eigenbasis(&self.scale_eigenbasis(&self.to_eigenbasis(x), s))
    }

    /// `Γ_σ(X)`.
    pub fn gamma(&self, x: &CMatrix) -> CMatrix {
        self.gamma_power(x, 1.0)
    }
}

fn is_hermitian(m: &CMatrix) -> bool {
    hermiticity_residual(m) <= 1e-12 * max_abs(m).max(1.0)
}

fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c64(0.5, 0.0)
}

/// Singular values of `Y`; for Hermitian `Y` these are `|λ|`.
pub(crate) fn singular_values(y: &CMatrix) -> Result<Vec<f64>> {
    if is_hermitian(y) {
        Ok(eigvalsh_jacobi(y)?.into_iter().map(f64::abs).collect())
    } else {
        Ok(y.clone().svd(false, false).singular_values.iter().copied().collect())
    }
}

/// `|Y|^r`, with `|Y| = (Y†Y)^{1/2}`.
pub(crate) fn abs_power(y: &CMatrix, r: f64) -> Result<CMatrix> {
    let (e, scale) = if is_hermitian(y) {
        (eigh_jacobi(y)?, 1.0)
    } else {
        (eigh(&(y.adjoint() * y))?, 0.5)
    };
    let mut out = Vec::with_capacity(e.values.len());
    for &v in e.values.iter() {
        let a = if scale == 1.0 { v.abs() } else { v.max(0.0) };
        let val = if a == 0.0 && r > 0.0 { 0.0 } else { a.powf(r * scale) };
        if !val.is_finite() {
            return Err(Error::Domain(format!(
                "power {r} of a singular operator (singular value {:e})",
                a.powf(scale)
            )));
        }
        out.push(val);
    }
    Ok(e.with_values(&out))
}

/// Rejects `X` that is not positive definite; negative exponents need it.
fn require_definite(x: &CMatrix, what: &str) -> Result<()> {
    if !is_hermitian(x) {
        return Err(Error::Domain(format!(
            "{what} must be positive definite for a negative exponent (not Hermitian)"
        )));
    }
    let min = eigh(&symmetrize(x))?.min();
    if min <= 0.0 {
        return Err(Error::Domain(format!(
            "{what} must be positive definite for a negative exponent (min eigenvalue {min:e})"
        )));
    }
    Ok(())
}

/// `‖X‖_{p,σ}^p = tr|Γ_σ^{1/p}(X)|^p`.
pub fn weighted_norm_pow(w: &WeightedSpace, x: &CMatrix, p: f64) -> Result<f64> {
    check_exponent(p)?;
    w.check(x, "X")?;
    if p < 0.0 {
        require_definite(x, "X")?;
    }
    let y = w.scale_eigenbasis(&w.to_eigenbasis(x), 1.0 / p);
    let sv = singular_values(&y)?;
    let mut acc = 0.0;
    for s in sv {
        if s == 0.0 {
            if p < 0.0 {
                return Err(Error::Domain("singular Γ^{1/p}(X) with p < 0".into()));
            }
            continue;
        }
        acc += s.powf(p);
    }
    Ok(acc)
}

/// `‖X‖_{p,σ}` for finite `p ≠ 0`.
pub fn weighted_norm(w: &WeightedSpace, x: &CMatrix, p: f64) -> Result<f64> {
    Ok(weighted_norm_pow(w, x, p)?.powf(1.0 / p))
}

/// `‖X‖_{p,σ}` extended to `p = +∞` (operator norm, Γ^0 is the identity).
pub(crate) fn weighted_norm_ext(w: &WeightedSpace, x: &CMatrix, p: f64) -> Result<f64> {
    if p == f64::INFINITY {
        w.check(x, "X")?;
        return Ok(singular_values(x)?.into_iter().fold(0.0, f64::max));
    }
    weighted_norm(w, x, p)
}

/// Power operator `I_{q,p}(X) = Γ_σ^{-1/q}(|Γ_σ^{1/p}(X)|^{p/q})`.
pub fn power_operator(w: &WeightedSpace, x: &CMatrix, q: f64, p: f64) -> Result<CMatrix> {
    check_exponent(p)?;
    check_exponent(q)?;
    w.check(x, "X")?;
    let y = w.scale_eigenbasis(&w.to_eigenbasis(x), 1.0 / p);
    let m = abs_power(&y, p / q)?;
    Ok(w.from_eigenbasis(&w.scale_eigenbasis(&m, -1.0 / q)))
}

/// `⟨X, Y⟩_σ = tr(X† Γ_σ(Y))`.
pub fn inner_sigma(w: &WeightedSpace, x: &CMatrix, y: &CMatrix) -> C64 {
    trace_product(&x.adjoint(), &w.gamma(y))
}

/// `⟨X, Y⟩_{1,σ} = tr(σ X† Y)`.
pub fn inner_one_sigma(w: &WeightedSpace, x: &CMatrix, y: &CMatrix) -> C64 {
    trace_product(w.sigma().matrix(), &(x.adjoint() * y))
}

fn require_below_one(p: f64) -> Result<()> {
    if !(p < 1.0) || p == 0.0 {
        return Err(Error::Parameter(format!("exponent {p} must satisfy p < 1, p ≠ 0")));
    }
    Ok(())
}

/// `⟨X,Y⟩_σ − ‖X‖_{p,σ}‖Y‖_{p̂,σ}` for `p < 1`; non-negative by reverse Hölder.
pub fn check_reverse_holder(w: &WeightedSpace, x: &Positive, y: &Positive, p: f64) -> Result<f64> {
    require_below_one(p)?;
    if !y.is_definite() {
        return Err(Error::Parameter("Y must be positive definite".into()));
    }
    let lhs = inner_sigma(w, x.matrix(), y.matrix()).re;
    let nx = weighted_norm(w, x.matrix(), p)?;
    let ny = weighted_norm(w, y.matrix(), holder_conjugate(p))?;
    Ok(lhs - nx * ny)
}

/// `‖X+Y‖_{p,σ} − ‖X‖_{p,σ} − ‖Y‖_{p,σ}` for `p < 1`.
///
/// For `p < 1` the quasi-norm is superadditive on positive operators, so the
/// margin is non-negative.
pub fn check_reverse_minkowski(
    w: &WeightedSpace,
    x: &Positive,
    y: &Positive,
    p: f64,
) -> Result<f64> {
    require_below_one(p)?;
    let sum = x.matrix() + y.matrix();
    Ok(weighted_norm(w, &sum, p)?
        - weighted_norm(w, x.matrix(), p)?
        - weighted_norm(w, y.matrix(), p)?)
}

/// Outcome of [`holder_variational_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct HolderVariational {
    pub norm: f64,
    /// Largest `|⟨X,Y⟩_σ| / ‖Y‖_{p̂,σ}` over the random samples.
    pub sampled_sup: f64,
    /// Ratio at the optimizer `Y* = I_{p̂,p}(X)`; `None` when `X` is not definite.
    pub attained: Option<f64>,
    pub pass: bool,
}

/// Samples the duality `‖X‖_{p,σ} = sup_Y |⟨X,Y⟩_σ| / ‖Y‖_{p̂,σ}` for `p ≥ 1`.
pub fn holder_variational_check(
    w: &WeightedSpace,
    x: &CMatrix,
    p: f64,
    sample_count: usize,
    seed: u64,
) -> Result<HolderVariational> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Parameter(format!("exponent {p} must lie in [1, ∞)")));
    }
    w.check(x, "X")?;
    let hat = holder_conjugate(p);
    let norm = weighted_norm(w, x, p)?;
    let ratio = |y: &CMatrix| -> Result<f64> {
        let d = weighted_norm_ext(w, y, hat)?;
        Ok(inner_sigma(w, x, y).norm() / d)
    };
    let mut rng = substream(seed, 0);
    let mut sup = 0.0_f64;
    for _ in 0..sample_count {
        let y = random::ginibre_with(&mut rng, w.dim(), w.dim());
        let scale: f64 = rng.random_range(0.1..10.0);
        sup = sup.max(ratio(&(y * c64(scale, 0.0)))?);
    }
    let definite = Positive::definite(x.clone()).is_ok();
    let attained = if definite {
        let y_star = if p == 1.0 {
            operator::identity(w.dim())
        } else {
            power_operator(w, x, hat, p)?
        };
        Some(ratio(&y_star)?)
    } else {
        None
    };
    let tol = INEQ_TOL * norm.max(1.0);
    let pass = sup <= norm + tol && attained.is_none_or(|a| (a - norm).abs() <= tol);
    Ok(HolderVariational { norm, sampled_sup: sup, attained, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{diag, identity, max_abs_diff};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn conjugate_exponent() {
        let e = PExponent::new(3.0).unwrap();
        assert!(close(1.0 / e.p + 1.0 / e.hat_p, 1.0, 1e-12));
        assert!(PExponent::new(1.0).unwrap().hat_p.is_infinite());
        assert!(matches!(PExponent::new(0.0), Err(Error::UnsupportedExponent(_))));
    }

    #[test]
    fn gamma_power_cases() {
        let w = WeightedSpace::from_diagonal(&[0.25, 0.75]).unwrap();
        let x = random::hermitian(2, 3).into_matrix();
        assert_eq!(w.gamma_power(&x, 0.0), x);
        assert!(max_abs_diff(&w.gamma(&identity(2)), &diag(&[0.25, 0.75])) < 1e-15);
        let lhs = w.gamma_power(&w.gamma_power(&x, 0.3), -1.7);
        assert!(max_abs_diff(&lhs, &w.gamma_power(&x, -1.4)) < 1e-9);
        let m = WeightedSpace::maximally_mixed(3).unwrap();
        let y = random::hermitian(3, 4).into_matrix();
        let expect = &y * c64(3f64.powf(-0.6), 0.0);
        assert!(max_abs_diff(&m.gamma_power(&y, 0.6), &expect) < 1e-12);
    }

    #[test]
    fn norm_examples() {
        let w = WeightedSpace::from_diagonal(&[0.25, 0.75]).unwrap();
        for p in [-2.0, -0.5, 0.3, 1.0, 2.0, 4.0] {
            assert!(close(weighted_norm(&w, &identity(2), p).unwrap(), 1.0, 1e-12));
        }
        let n = weighted_norm(&w, &diag(&[2.0, 1.0]), 2.0).unwrap();
        assert!(close(n, 1.75f64.sqrt(), 1e-12));
        let m = WeightedSpace::maximally_mixed(2).unwrap();
        assert!(close(weighted_norm(&m, &diag(&[1.0, 4.0]), -1.0).unwrap(), 1.6, 1e-12));
        assert!(matches!(
            weighted_norm(&w, &identity(2), 0.0),
            Err(Error::UnsupportedExponent(_))
        ));
        assert!(matches!(weighted_norm(&w, &diag(&[1.0, 0.0]), -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn two_norm_matches_inner_product() {
        let sigma = random::density(3, 8, 0.05).unwrap();
        let w = WeightedSpace::new(sigma).unwrap();
        let x = random::ginibre_with(&mut substream(1, 0), 3, 3);
        let n2 = weighted_norm(&w, &x, 2.0).unwrap();
        assert!(close(n2 * n2, inner_sigma(&w, &x, &x).re, 1e-10));
        let nd = weighted_norm(&w, &x.adjoint(), 2.0).unwrap();
        assert!(close(n2, nd, 1e-12));
    }

    #[test]
    fn power_operator_examples() {
        let w = WeightedSpace::new(random::density(3, 2, 0.05).unwrap()).unwrap();
        let x = random::positive_definite(3, 5, 0.1).unwrap();
        let back = power_operator(&w, x.matrix(), 1.7, 1.7).unwrap();
        assert!(max_abs_diff(&back, x.matrix()) < 1e-10);

        let m = WeightedSpace::maximally_mixed(2).unwrap();
        let y = power_operator(&m, &diag(&[4.0, 1.0]), 1.0, 2.0).unwrap();
        assert!(max_abs_diff(&y, &diag(&[16.0, 1.0])) < 1e-12);

        let z = random::ginibre_with(&mut substream(9, 0), 3, 3);
        let direct = power_operator(&w, &z, 0.5, 2.0).unwrap();
        let composed =
            power_operator(&w, &power_operator(&w, &z, 1.0, 2.0).unwrap(), 0.5, 1.0).unwrap();
        assert!(max_abs_diff(&direct, &composed) < 1e-9);
        let lhs = weighted_norm_pow(&w, &direct, 0.5).unwrap();
        assert!(close(lhs, weighted_norm_pow(&w, &z, 2.0).unwrap(), 1e-9 * lhs.max(1.0)));
    }

    #[test]
    fn inner_products() {
        let w = WeightedSpace::from_diagonal(&[0.2, 0.3, 0.5]).unwrap();
        assert!(close(inner_sigma(&w, &identity(3), &identity(3)).re, 1.0, 1e-15));
        let x = diag(&[1.0, -2.0, 3.0]);
        let y = diag(&[0.5, 4.0, 1.0]);
        let classical = 0.2 * 0.5 + 0.3 * -8.0 + 0.5 * 3.0;
        assert!(close(inner_sigma(&w, &x, &y).re, classical, 1e-14));
        assert!(close(inner_one_sigma(&w, &x, &y).re, classical, 1e-14));
        let a = random::positive_definite(3, 1, 0.01).unwrap();
        let b = random::positive_definite(3, 2, 0.01).unwrap();
        assert!(inner_sigma(&w, a.matrix(), b.matrix()).re >= 0.0);
    }

    #[test]
    fn reverse_holder_equality_cases() {
        let w = WeightedSpace::new(random::density(2, 4, 0.1).unwrap()).unwrap();
        let id = Positive::definite(identity(2)).unwrap();
        assert!(check_reverse_holder(&w, &id, &id, 0.5).unwrap().abs() < 1e-12);
        let x = random::positive_definite(2, 6, 0.1).unwrap();
        for p in [-1.0, 0.4] {
            let y = Positive::definite(power_operator(&w, x.matrix(), holder_conjugate(p), p).unwrap())
                .unwrap();
            assert!(check_reverse_holder(&w, &x, &y, p).unwrap().abs() < 1e-9);
        }
        assert!(matches!(check_reverse_holder(&w, &x, &x, 1.5), Err(Error::Parameter(_))));
    }

    #[test]
    fn reverse_minkowski_direction() {
        let w = WeightedSpace::maximally_mixed(2).unwrap();
        let x = Positive::definite(diag(&[1.0, 1e-6])).unwrap();
        let y = Positive::definite(diag(&[1e-6, 1.0])).unwrap();
        let margin = check_reverse_minkowski(&w, &x, &y, 0.5).unwrap();
        assert!(margin > 0.4);
        let x2 = random::positive_definite(2, 3, 0.1).unwrap();
        let cx = Positive::definite(x2.matrix() * c64(2.5, 0.0)).unwrap();
        assert!(check_reverse_minkowski(&w, &x2, &cx, -1.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn holder_variational() {
        let w = WeightedSpace::new(random::density(3, 11, 0.05).unwrap()).unwrap();
        let r = holder_variational_check(&w, &identity(3), 3.0, 200, 1).unwrap();
        assert!(r.pass && close(r.norm, 1.0, 1e-12));
        let x = random::positive_definite(3, 12, 0.1).unwrap();
        for p in [1.0, 2.0, 3.5] {
            let r = holder_variational_check(&w, x.matrix(), p, 1000, 2).unwrap();
            assert!(r.pass, "{r:?}");
            assert!((r.attained.unwrap() - r.norm).abs() <= 1e-9);
        }
    }
}
