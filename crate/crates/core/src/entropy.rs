//! Entropy functionals, divergences and Dirichlet forms.
//!
//! All values are in nats.

use crate::error::{Error, Result};
use crate::operator::{eigh, trace_product, CMatrix, Density, C64};
use crate::par::{batch_min, BatchMin};
use crate::semigroup::LindbladGenerator;
use crate::weighted::{
    holder_conjugate, inner_sigma, power_operator, weighted_norm, weighted_norm_pow, WeightedSpace,
};

/// Imaginary residue tolerated in traces that are real in exact arithmetic.
pub const IMAG_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    pub value: f64,
    pub p: f64,
    /// `‖X‖_{p,σ}^p`.
    pub normalization: f64,
}

fn real_part(z: C64, what: &str) -> Result<f64> {
    if z.im.abs() > IMAG_TOL * z.re.abs().max(1.0) {
        return Err(Error::Contract(format!(
            "{what} has imaginary residue {:e} (real part {:e})",
            z.im, z.re
        )));
    }
    Ok(z.re)
}

/// `Ent_{p,σ}(X)` for positive definite `X`.
///
/// With `Y = Γ_σ^{1/p}(X)` and `N = tr Y^p`, this is
/// `tr[Y^p log Y^p] − tr[Y^p log σ] − N log N`.
pub fn ent_p(w: &WeightedSpace, x: &CMatrix, p: f64) -> Result<EntropyReport> {
    if p == 0.0 || !p.is_finite() {
        return Err(Error::UnsupportedExponent(p));
    }
    w.check(x, "X")?;
    let y = w.scale_eigenbasis(&w.to_eigenbasis(x), 1.0 / p);
    let y = (&y + y.adjoint()) * C64::new(0.5, 0.0);
    let e = eigh(&y)?;
    if e.min() <= 0.0 {
        return Err(Error::Domain(format!(
            "entropy needs a positive definite argument (eigenvalue {:e} of Γ^(1/p)(X))",
            e.min()
        )));
    }
    let pow: Vec<f64> = e.values.iter().map(|m| m.powf(p)).collect();
    let n: f64 = pow.iter().sum();
    let self_term: f64 = e.values.iter().zip(&pow).map(|(m, mp)| mp * p * m.ln()).sum();
    let yp = e.with_values(&pow);
    let cross: f64 = w
        .eigen()
        .values
        .iter()
        .enumerate()
        .map(|(i, s)| yp[(i, i)].re * s.ln())
        .sum();
    Ok(EntropyReport { value: self_term - cross - n * n.ln(), p, normalization: n })
}

/// `Ent_{p,σ}(X)` for positive semidefinite `X` and `p > 0`, with `0 log 0 = 0`.
pub(crate) fn ent_p_semidefinite(w: &WeightedSpace, x: &CMatrix, p: f64) -> Result<f64> {
    if p <= 0.0 || !p.is_finite() {
        return Err(Error::UnsupportedExponent(p));
    }
    w.check(x, "X")?;
    let y = w.scale_eigenbasis(&w.to_eigenbasis(x), 1.0 / p);
    let y = (&y + y.adjoint()) * C64::new(0.5, 0.0);
    let e = eigh(&y)?;
    let top = e.max().abs().max(f64::MIN_POSITIVE);
    if e.min() < -crate::operator::CLIP_TOL * top.max(1.0) {
        return Err(Error::Domain(format!(
            "entropy needs a positive semidefinite argument (eigenvalue {:e})",
            e.min()
        )));
    }
    let pow: Vec<f64> = e.values.iter().map(|m| m.max(0.0).powf(p)).collect();
    let n: f64 = pow.iter().sum();
    if n == 0.0 {
        return Ok(0.0);
    }
    let self_term: f64 = pow.iter().filter(|&&mp| mp > 0.0).map(|mp| mp * mp.ln()).sum();
    let yp = e.with_values(&pow);
    let cross: f64 = w
        .eigen()
        .values
        .iter()
        .enumerate()
        .map(|(i, s)| yp[(i, i)].re * s.ln())
        .sum();
    Ok(self_term - cross - n * n.ln())
}

/// Umegaki relative entropy `D(ρ‖σ) = tr ρ log ρ − tr ρ log σ`.
pub fn relative_entropy(rho: &Density, sigma: &Density) -> Result<f64> {
    sigma.require_definite("σ")?;
    crate::operator::check_same_dim(rho.matrix(), sigma.matrix(), "ρ and σ")?;
    let er = rho.eigen();
    let neg_entropy: f64 = er.values.iter().filter(|&&l| l > 0.0).map(|l| l * l.ln()).sum();
    let log_sigma = sigma.eigen().map(f64::ln);
    let cross = real_part(trace_product(rho.matrix(), &log_sigma), "tr ρ log σ")?;
    Ok(neg_entropy - cross)
}

/// Von Neumann entropy `−tr ρ log ρ`.
pub fn von_neumann_entropy(rho: &Density) -> f64 {
    -rho.eigen().values.iter().filter(|&&l| l > 0.0).map(|l| l * l.ln()).sum::<f64>()
}

/// Rényi divergence `D_{1−p}(ρ‖σ) = −(1/p) ln tr(σ^p ρ^{1−p})` for `p ∈ (0,1)`.
pub fn renyi_divergence(rho: &Density, sigma: &Density, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Parameter(format!("Rényi parameter {p} outside (0, 1)")));
    }
    crate::operator::check_same_dim(rho.matrix(), sigma.matrix(), "ρ and σ")?;
    let a = sigma.positive().pow(p)?;
    let b = rho.positive().pow(1.0 - p)?;
    let t = real_part(trace_product(&a, &b), "tr σ^p ρ^(1-p)")?;
    Ok(-t.ln() / p)
}

/// `d/dp ‖X‖_{p,σ}` via the entropy identity
/// `(1/p²)‖X‖_p^{1−p}(½Ent_p(I_{p,p}(X)) + ½Ent_p(I_{p,p}(X†)))`.
pub fn norm_derivative_p(w: &WeightedSpace, x: &CMatrix, p: f64) -> Result<f64> {
    let norm = weighted_norm(w, x, p)?;
    if norm == 0.0 {
        return Err(Error::Domain("norm derivative at X = 0".into()));
    }
    let a = ent_p(w, &power_operator(w, x, p, p)?, p)?.value;
    let b = ent_p(w, &power_operator(w, &x.adjoint(), p, p)?, p)?.value;
    Ok(norm.powf(1.0 - p) * 0.5 * (a + b) / (p * p))
}

/// Relative gap between [`norm_derivative_p`] and a five-point central
/// difference of `p ↦ ‖X‖_{p,σ}` with step `h`. The denominator is floored at
/// `1e-3·‖X‖_{p,σ}` so near-stationary points do not amplify rounding.
pub fn norm_derivative_fd_error(w: &WeightedSpace, x: &CMatrix, p: f64, h: f64) -> Result<f64> {
    let f = |q: f64| weighted_norm(w, x, q);
    let fd = (f(p - 2.0 * h)? - 8.0 * f(p - h)? + 8.0 * f(p + h)? - f(p + 2.0 * h)?) / (12.0 * h);
    let an = norm_derivative_p(w, x, p)?;
    Ok((fd - an).abs() / an.abs().max(1e-3 * f(p)?))
}

/// Dirichlet form `ℰ_{p,ℒ}(X) = (p p̂/4)⟨I_{p̂,p}(X), ℒ(X)⟩_σ`.
///
/// At `p = 1` the limit `¼ tr[Γ_σ(ℒX)(log Γ_σ(X) − log σ)]` is used.
pub fn dirichlet_form(l: &LindbladGenerator, x: &CMatrix, p: f64) -> Result<f64> {
    if p == 0.0 || !p.is_finite() {
        return Err(Error::UnsupportedExponent(p));
    }
    l.require_reversible()?;
    let w = l.space();
    w.check(x, "X")?;
    let lx = l.apply(x);
    if p == 1.0 {
        return dirichlet_one(w, x, &lx);
    }
    let hat = holder_conjugate(p);
    let ip = power_operator(w, x, hat, p)?;
    let v = inner_sigma(w, &ip, &lx);
    Ok(p * hat / 4.0 * real_part(v, "Dirichlet pairing")?)
}

fn dirichlet_one(w: &WeightedSpace, x: &CMatrix, lx: &CMatrix) -> Result<f64> {
    let gx = w.scale_eigenbasis(&w.to_eigenbasis(x), 1.0);
    let gx = (&gx + gx.adjoint()) * C64::new(0.5, 0.0);
    let e = eigh(&gx)?;
    if e.min() <= 0.0 {
        return Err(Error::Domain(format!(
            "ℰ_1 needs a positive definite argument (eigenvalue {:e})",
            e.min()
        )));
    }
    let mut log_diff = e.map(f64::ln);
    for (i, s) in w.eigen().values.iter().enumerate() {
        log_diff[(i, i)] -= C64::new(s.ln(), 0.0);
    }
    let glx = w.scale_eigenbasis(&w.to_eigenbasis(lx), 1.0);
    Ok(0.25 * real_part(trace_product(&glx, &log_diff), "ℰ_1 trace")?)
}

/// `ℰ_{p,ℒ}(I_{p,2}(Z))` evaluated as `(p p̂/4)⟨I_{p̂,2}(Z), ℒ I_{p,2}(Z)⟩_σ`,
/// which avoids forming `Γ_σ^{1/p}` of an already transformed operator.
pub fn dirichlet_form_at_power(l: &LindbladGenerator, z: &CMatrix, p: f64) -> Result<f64> {
    if p == 0.0 || !p.is_finite() {
        return Err(Error::UnsupportedExponent(p));
    }
    l.require_reversible()?;
    let w = l.space();
    let x = power_operator(w, z, p, 2.0)?;
    if p == 1.0 {
        return dirichlet_one(w, &x, &l.apply(&x));
    }
    let hat = holder_conjugate(p);
    let dual = power_operator(w, z, hat, 2.0)?;
    let v = inner_sigma(w, &dual, &l.apply(&x));
    Ok(p * hat / 4.0 * real_part(v, "Dirichlet pairing")?)
}

/// `Var_σ(X) = ‖X‖²_{2,σ} − |tr(σX)|²`.
pub fn variance_sigma(w: &WeightedSpace, x: &CMatrix) -> Result<f64> {
    w.check(x, "X")?;
    let n2 = weighted_norm_pow(w, x, 2.0)?;
    let mean = trace_product(w.sigma().matrix(), x);
    Ok(n2 - mean.norm_sqr())
}

/// `½(Ent₁(X) + Ent₁(Y)) − Ent₁(½(X+Y))`, non-negative by convexity.
pub fn ent1_convexity_margin(w: &WeightedSpace, x: &CMatrix, y: &CMatrix) -> Result<f64> {
    let mid = (x + y) * C64::new(0.5, 0.0);
    Ok(0.5 * (ent_p(w, x, 1.0)?.value + ent_p(w, y, 1.0)?.value) - ent_p(w, &mid, 1.0)?.value)
}

/// Minimum convexity margin over random definite pairs.
pub fn ent1_convexity_check(w: &WeightedSpace, sample_count: usize, seed: u64) -> Result<BatchMin> {
    batch_min(sample_count, seed, |rng, _| {
        let x = crate::operator::random::sample_definite_with(rng, w.dim());
        let y = crate::operator::random::sample_definite_with(rng, w.dim());
        ent1_convexity_margin(w, x.matrix(), y.matrix())
    })
}
