//! Log-Sobolev constants and the inequality verification engine.
//!
//! Estimates of `α_p` are upper bounds: they are the best ratio
//! `ℰ_p(X)/Ent_p(X)` found, never a certified infimum. Verification routines
//! sample the inequalities and report the smallest margin seen.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::entropy::{dirichlet_form, dirichlet_form_at_power, ent_p, ent_p_semidefinite};
use crate::error::{Error, Result};
use crate::operator::random::{
    density_with, ginibre_with, hermitian_with, positive_definite_with, sample_definite_with,
};
use crate::operator::{
    diag, eigh, hermitian_fn, hermiticity_residual, kron_all, CMatrix, Density, Positive, C64,
    CLIP_TOL,
};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::par::{batch_min, map_ordered, BatchMin};
use crate::rng::{child_stream, substream, StreamRng};
use crate::semigroup::{evolve, simple_generator, spectral_gap, tensor_sum, LindbladGenerator};
use crate::weighted::{
    holder_conjugate, inner_sigma, power_operator, weighted_norm, WeightedSpace, INEQ_TOL,
};

pub const DEFAULT_ENT_FLOOR: f64 = 1e-6;
/// Estimation range for `p`; outside it `Γ_σ^{1/p}` loses too much precision.
pub const ESTIMATE_P_MIN: f64 = 0.05;
pub const ESTIMATE_P_MAX: f64 = 2.0;
/// Relative tolerance of the Stroock-Varopoulos monotonicity check.
pub const SV_TOL: f64 = 1e-8;
/// Tolerance of the block-matrix lemmas.
pub const LEMMA_TOL: f64 = 1e-8;
/// Sampled ratios with `Ent_p(X) ≤ ENT_SKIP·‖X‖_p^p` are skipped as 0/0.
const ENT_SKIP: f64 = 1e-10;
/// Parameters beyond this magnitude make `e^H` overflow-prone.
const PARAM_BOUND: f64 = 30.0;

#[derive(Debug, Clone)]
pub struct LsiOptions {
    pub starts: usize,
    pub max_iter: usize,
    pub seed: u64,
    pub ent_floor: f64,
    /// Random candidates evaluated for the sampled floor.
    pub samples: usize,
}

impl Default for LsiOptions {
    fn default() -> Self {
        LsiOptions { starts: 32, max_iter: 2000, seed: 0, ent_floor: DEFAULT_ENT_FLOOR, samples: 512 }
    }
}

#[derive(Debug, Clone)]
pub struct LsiEstimate {
    pub p: f64,
    pub value: f64,
    pub witness: Positive,
    pub sampled_floor: f64,
    /// Best ratio over operators commuting with σ.
    pub diagonal_value: f64,
    pub starts: usize,
    pub converged: bool,
}

/// `ℰ_p(X)/Ent_p(X)`, or `None` when the entropy is numerically zero.
pub fn lsi_ratio(l: &LindbladGenerator, x: &CMatrix, p: f64) -> Result<Option<f64>> {
    let ent = ent_p(l.space(), x, p)?;
    if ent.value <= ENT_SKIP * ent.normalization.abs() {
        return Ok(None);
    }
    Ok(Some(dirichlet_form(l, x, p)? / ent.value))
}

#[derive(Clone)]
struct Candidate {
    value: f64,
    h: CMatrix,
    converged: bool,
}

fn full_hermitian(theta: &[f64], d: usize) -> CMatrix {
    let mut h = CMatrix::zeros(d, d);
    let mut tr = 0.0;
    for i in 0..d - 1 {
        h[(i, i)] = C64::new(theta[i], 0.0);
        tr += theta[i];
    }
    h[(d - 1, d - 1)] = C64::new(-tr, 0.0);
    let mut k = d - 1;
    for i in 0..d {
        for j in i + 1..d {
            let z = C64::new(theta[k], theta[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    h
}

fn full_params(h: &CMatrix) -> Vec<f64> {
    let d = h.nrows();
    let mut theta: Vec<f64> = (0..d - 1).map(|i| h[(i, i)].re).collect();
    for i in 0..d {
        for j in i + 1..d {
            theta.push(h[(i, j)].re);
            theta.push(h[(i, j)].im);
        }
    }
    theta
}

fn diagonal_hermitian(w: &WeightedSpace, theta: &[f64]) -> CMatrix {
    let mut v = theta.to_vec();
    v.push(-theta.iter().sum::<f64>());
    w.from_eigenbasis(&diag(&v))
}

fn traceless(mut h: CMatrix) -> CMatrix {
    let d = h.nrows();
    let shift = h.trace() / C64::new(d as f64, 0.0);
    for i in 0..d {
        h[(i, i)] -= shift;
    }
    h
}

fn random_generator_h(rng: &mut StreamRng, w: &WeightedSpace, diagonal: bool) -> CMatrix {
    let d = w.dim();
    let h = if diagonal {
        let theta: Vec<f64> = (0..d - 1).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        diagonal_hermitian(w, &theta)
    } else {
        traceless(hermitian_with(rng, d).into_matrix())
    };
    let norm = h.norm();
    let target = (rng.random_range(0.1f64.ln()..3.0f64.ln())).exp();
    if norm > 0.0 {
        h * C64::new(target / norm, 0.0)
    } else {
        h
    }
}

/// Ratio at `X = I_{p,2}(e^H)`, using `Ent_p(I_{p,2}(Z)) = Ent_2(Z)`.
fn ratio_of_h(l: &LindbladGenerator, h: &CMatrix, p: f64, ent_floor: f64) -> Option<f64> {
    let z = hermitian_fn(h, f64::exp).ok()?;
    let ent = ent_p(l.space(), &z, 2.0).ok()?;
    if !(ent.value >= ent_floor * ent.normalization) {
        return None;
    }
    let e = dirichlet_form_at_power(l, &z, p).ok()?;
    let r = e / ent.value;
    r.is_finite().then_some(r)
}

fn objective(l: &LindbladGenerator, h: &CMatrix, p: f64, ent_floor: f64) -> f64 {
    ratio_of_h(l, h, p, ent_floor).unwrap_or(f64::INFINITY)
}

/// Estimates `α_p(ℒ)` by multi-start simplex search over `X = I_{p,2}(e^H)`
/// with traceless Hermitian `H`, plus a search restricted to `H` commuting
/// with σ.
pub fn lsi_constant_estimate(l: &LindbladGenerator, p: f64, opts: &LsiOptions) -> Result<LsiEstimate> {
    if !(ESTIMATE_P_MIN..=ESTIMATE_P_MAX).contains(&p) {
        return Err(Error::Parameter(format!(
            "estimation supports p in [{ESTIMATE_P_MIN}, {ESTIMATE_P_MAX}], got {p}; use the p ↔ p̂ duality"
        )));
    }
    if opts.starts == 0 {
        return Err(Error::Parameter("at least one start is required".into()));
    }
    l.require_reversible()?;
    let w = l.space();
    let d = w.dim();
    let floor = opts.ent_floor;

    let sample_ids: Vec<usize> = (0..opts.samples).collect();
    let mut sampled: Vec<Candidate> = map_ordered(&sample_ids, |&i| {
        let mut rng = substream(child_stream(opts.seed, 1), i as u64);
        let h = random_generator_h(&mut rng, w, i % 2 == 1);
        Candidate { value: objective(l, &h, p, floor), h, converged: false }
    })
    .into_iter()
    .filter(|c| c.value.is_finite())
    .collect();
    sampled.sort_by(|a, b| a.value.total_cmp(&b.value));
    let sampled_floor = sampled.first().map_or(f64::INFINITY, |c| c.value);

    let nm = NelderMeadOptions { max_iter: opts.max_iter, ..Default::default() };
    let seeded = sampled.len().min(opts.starts / 4);
    let start_ids: Vec<usize> = (0..opts.starts).collect();
    let full_runs: Vec<Candidate> = map_ordered(&start_ids, |&k| {
        let h0 = if k < seeded {
            sampled[k].h.clone()
        } else {
            let mut rng = substream(child_stream(opts.seed, 2), k as u64);
            random_generator_h(&mut rng, w, false)
        };
        let step = 0.25 * h0.norm().max(0.4);
        let f = |theta: &[f64]| {
            if theta.iter().any(|v| v.abs() > PARAM_BOUND) {
                return f64::INFINITY;
            }
            objective(l, &full_hermitian(theta, d), p, floor)
        };
        let r = nelder_mead(f, &full_params(&h0), step, &nm);
        Candidate { value: r.value, h: full_hermitian(&r.x, d), converged: r.converged }
    });

    let diag_ids: Vec<usize> = (0..(opts.starts / 4).max(4)).collect();
    let diag_runs: Vec<Candidate> = map_ordered(&diag_ids, |&k| {
        let mut rng = substream(child_stream(opts.seed, 3), k as u64);
        let theta0: Vec<f64> = (0..d - 1)
            .map(|_| rng.random_range(0.2..2.0) * if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let f = |theta: &[f64]| {
            if theta.iter().any(|v| v.abs() > PARAM_BOUND) {
                return f64::INFINITY;
            }
            objective(l, &diagonal_hermitian(w, theta), p, floor)
        };
        let r = nelder_mead(f, &theta0, 0.3, &nm);
        Candidate { value: r.value, h: diagonal_hermitian(w, &r.x), converged: r.converged }
    });
    let diagonal_value = diag_runs.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);

    let best = full_runs
        .iter()
        .chain(diag_runs.iter())
        .chain(sampled.first())
        .filter(|c| c.value.is_finite())
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .cloned()
        .ok_or_else(|| {
            Error::Estimation(format!(
                "all {} starts and {} samples were rejected (Ent below floor {floor:e} or non-finite)",
                opts.starts, opts.samples
            ))
        })?;

    let z = hermitian_fn(&best.h, f64::exp)?;
    let x = power_operator(w, &z, p, 2.0)?;
    let x = (&x + x.adjoint()) * C64::new(0.5, 0.0);
    Ok(LsiEstimate {
        p,
        value: best.value,
        witness: Positive::definite(x)?,
        sampled_floor,
        diagonal_value,
        starts: opts.starts,
        converged: best.converged,
    })
}

/// Maps a witness for `α_p` to the corresponding operator for `α_{p̂}`,
/// `I_{p̂,2}(I_{2,p}(X))`, and evaluates its ratio directly at `p̂`.
pub fn lsi_dual_ratio(l: &LindbladGenerator, x: &CMatrix, p: f64) -> Result<Option<f64>> {
    let w = l.space();
    let hat = holder_conjugate(p);
    if !hat.is_finite() {
        return Err(Error::UnsupportedExponent(p));
    }
    let z = power_operator(w, x, 2.0, p)?;
    let xh = power_operator(w, &z, hat, 2.0)?;
    let xh = (&xh + xh.adjoint()) * C64::new(0.5, 0.0);
    lsi_ratio(l, &xh, hat)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DualityReport {
    pub p: f64,
    pub p_hat: f64,
    pub estimate: f64,
    pub dual_witness_ratio: f64,
    pub dual_sampled_floor: f64,
    pub pass: bool,
}

/// Cross-checks `α_p = α_{p̂}`: the mapped witness must reproduce the estimate
/// at `p̂` within `rel_tol`, and no `p̂` sample may fall more than `rel_tol`
/// below it.
pub fn lsi_duality_check(
    l: &LindbladGenerator,
    est: &LsiEstimate,
    sample_count: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<DualityReport> {
    let p_hat = holder_conjugate(est.p);
    let dual = lsi_dual_ratio(l, est.witness.matrix(), est.p)?.unwrap_or(f64::INFINITY);
    let floor = lsi_verify(l, p_hat, 0.0, sample_count, seed, &[])?.value;
    let pass = (dual - est.value).abs() <= rel_tol * est.value && floor >= est.value * (1.0 - rel_tol);
    Ok(DualityReport {
        p: est.p,
        p_hat,
        estimate: est.value,
        dual_witness_ratio: dual,
        dual_sampled_floor: floor,
        pass,
    })
}

fn commuting_sample(rng: &mut StreamRng, w: &WeightedSpace) -> CMatrix {
    let spread = rng.random_range(0.05..2.0);
    let v: Vec<f64> = (0..w.dim())
        .map(|_| (spread * rng.sample::<f64, _>(StandardNormal)).exp())
        .collect();
    w.from_eigenbasis(&diag(&v))
}

/// Smallest sampled `ℰ_p(X)/Ent_p(X)` over random definite `X` and the given
/// probes. The log-Sobolev inequality with constant `β` passes iff the result
/// is at least `β − 1e-9`.
pub fn lsi_verify(
    l: &LindbladGenerator,
    p: f64,
    beta: f64,
    sample_count: usize,
    seed: u64,
    probes: &[CMatrix],
) -> Result<BatchMin> {
    if !beta.is_finite() {
        return Err(Error::Parameter(format!("β must be finite, got {beta}")));
    }
    l.require_reversible()?;
    let w = l.space();
    let mut out = batch_min(sample_count, seed, |rng, i| {
        let x = if i % 3 == 2 {
            commuting_sample(rng, w)
        } else {
            sample_definite_with(rng, w.dim()).matrix().clone()
        };
        Ok(lsi_ratio(l, &x, p)?.unwrap_or(f64::INFINITY))
    })?;
    for (j, x) in probes.iter().enumerate() {
        let v = lsi_ratio(l, x, p)?.unwrap_or(f64::INFINITY);
        if v < out.value {
            out.value = v;
            out.index = sample_count + j;
        }
        out.count += 1;
    }
    Ok(out)
}

/// `(1 − 2s)/log(1/s − 1)` for the smallest eigenvalue `s` of σ, the
/// 2-log-Sobolev constant of the simple generator. Equals `½` at `s = ½`.
pub fn alpha2_simple_exact(sigma: &Density) -> Result<f64> {
    sigma.require_definite("σ")?;
    let x = 1.0 - 2.0 * sigma.eigen().min();
    // log((1−s)/s) = 2 atanh(1 − 2s); the quotient is smooth through x = 0.
    if x.abs() < 1e-8 {
        return Ok(0.5 - x * x / 6.0);
    }
    Ok(x / (2.0 * x.atanh()))
}

/// `λ(ℒ)·α₂` of the simple generator with the same σ, a lower bound on
/// `α₂(ℒ)` for reversible qubit generators and their tensor sums.
pub fn alpha2_gap_lower_bound(l: &LindbladGenerator) -> Result<f64> {
    if l.dim() != 2 {
        return Err(Error::Parameter(format!(
            "the gap bound applies to qubit generators, got dimension {}",
            l.dim()
        )));
    }
    l.require_reversible()?;
    Ok(spectral_gap(l)? * alpha2_simple_exact(l.sigma())?)
}

#[derive(Debug, Clone, Serialize)]
pub struct SvReport {
    pub p_grid: Vec<f64>,
    /// `ℰ_p(I_{p,2}(X))` along the grid.
    pub values: Vec<f64>,
    /// Largest increase between consecutive grid points.
    pub max_violation: f64,
    pub pass: bool,
}

/// Checks that `p ↦ ℰ_p(I_{p,2}(X))` is non-increasing on an ascending grid.
pub fn sv_monotonicity_check(l: &LindbladGenerator, x: &CMatrix, p_grid: &[f64]) -> Result<SvReport> {
    l.require_strongly_reversible()?;
    if p_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Parameter("p grid must be strictly ascending".into()));
    }
    if let Some(p) = p_grid.iter().find(|p| !(**p > 0.0 && **p <= 2.0)) {
        return Err(Error::Parameter(format!("grid point {p} outside (0, 2]")));
    }
    let w = l.space();
    w.check(x, "X")?;
    if eigh(x)?.min() <= 0.0 || hermiticity_residual(x) > 1e-10 * x.norm().max(1.0) {
        return Err(Error::Domain("X must be positive definite".into()));
    }
    let values = p_grid
        .iter()
        .map(|&p| dirichlet_form_at_power(l, x, p))
        .collect::<Result<Vec<_>>>()?;
    let max_violation = values.windows(2).map(|v| v[1] - v[0]).fold(f64::NEG_INFINITY, f64::max);
    let scale = 1.0 + values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let pass = values.len() < 2 || max_violation <= SV_TOL * scale;
    Ok(SvReport { p_grid: p_grid.to_vec(), values, max_violation, pass })
}

/// `(1/4α)·log((p−1)/(q−1))` for forward (`1 ≤ q ≤ p`) or reverse
/// (`p ≤ q < 1`) hypercontractivity.
pub fn hc_time_threshold(alpha: f64, p: f64, q: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("constant must be positive, got {alpha}")));
    }
    if !(p.is_finite() && q.is_finite()) {
        return Err(Error::Parameter(format!("exponents must be finite, got p = {p}, q = {q}")));
    }
    if p == q {
        return Ok(0.0);
    }
    let forward = q >= 1.0 && p > q;
    let reverse = q < 1.0 && p < q;
    if !(forward || reverse) {
        return Err(Error::Parameter(format!(
            "need 1 ≤ q ≤ p or p ≤ q < 1, got p = {p}, q = {q}"
        )));
    }
    if q == 1.0 {
        return Err(Error::Parameter("threshold is infinite at q = 1 < p".into()));
    }
    let ratio = (p - 1.0) / (q - 1.0);
    if !(ratio >= 1.0) {
        return Err(Error::Parameter(format!("log argument {ratio} is below 1")));
    }
    Ok(ratio.ln() / (4.0 * alpha))
}

fn sample_unit(rng: &mut StreamRng, w: &WeightedSpace, q: f64) -> Result<CMatrix> {
    let x = sample_definite_with(rng, w.dim()).matrix().clone();
    let n = weighted_norm(w, &x, q)?;
    Ok(x * C64::new(1.0 / n, 0.0))
}

/// Smallest `‖X‖_q − ‖Φ_t X‖_p` over random definite `X` normalized to
/// `‖X‖_q = 1`.
pub fn hc_check(
    l: &LindbladGenerator,
    p: f64,
    q: f64,
    t: f64,
    sample_count: usize,
    seed: u64,
) -> Result<BatchMin> {
    if !(1.0 <= q && q <= p) {
        return Err(Error::Parameter(format!("forward check needs 1 ≤ q ≤ p, got p = {p}, q = {q}")));
    }
    let w = l.space();
    batch_min(sample_count, seed, |rng, _| {
        let x = sample_unit(rng, w, q)?;
        Ok(1.0 - weighted_norm(w, &evolve(l, t, &x)?, p)?)
    })
}

/// Smallest `‖Φ_t X‖_p − ‖X‖_q` over random definite `X` normalized to
/// `‖X‖_q = 1`.
pub fn reverse_hc_check(
    l: &LindbladGenerator,
    p: f64,
    q: f64,
    t: f64,
    sample_count: usize,
    seed: u64,
) -> Result<BatchMin> {
    if !(p <= q && q < 1.0) {
        return Err(Error::Parameter(format!("reverse check needs p ≤ q < 1, got p = {p}, q = {q}")));
    }
    let w = l.space();
    batch_min(sample_count, seed, |rng, _| {
        let x = sample_unit(rng, w, q)?;
        Ok(weighted_norm(w, &evolve(l, t, &x)?, p)? - 1.0)
    })
}

/// `(1−p)(1−q) ≥ e^{−4α₁t}`, with a relative slack of `1e-12` for
/// boundary pairs computed in floating point.
pub fn reverse_holder_hc_condition(alpha1: f64, p: f64, q: f64, t: f64) -> bool {
    p <= 1.0 && q <= 1.0 && (1.0 - p) * (1.0 - q) >= (-4.0 * alpha1 * t).exp() * (1.0 - 1e-12)
}

/// Smallest `⟨X, Φ_t(Y)⟩_σ − ‖X‖_p‖Y‖_q` over random definite `X, Y`
/// normalized to unit norms.
pub fn reverse_holder_hc_check(
    l: &LindbladGenerator,
    p: f64,
    q: f64,
    t: f64,
    sample_count: usize,
    seed: u64,
) -> Result<BatchMin> {
    if !(p <= 1.0 && q <= 1.0) {
        return Err(Error::Parameter(format!("need p, q ≤ 1, got p = {p}, q = {q}")));
    }
    let w = l.space();
    batch_min(sample_count, seed, |rng, _| {
        let x = sample_unit(rng, w, p)?;
        let y = sample_unit(rng, w, q)?;
        Ok(inner_sigma(w, &x, &evolve(l, t, &y)?).re - 1.0)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HcKind {
    Forward,
    Reverse,
    ReverseHolder,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepCell {
    pub p: f64,
    pub q: f64,
    pub t: f64,
    /// Time from which the inequality is guaranteed.
    pub threshold: f64,
    pub margin: f64,
    /// Whether `t` meets the threshold, so the cell carries a contract.
    pub contract: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub kind: HcKind,
    pub alpha: f64,
    pub cells: Vec<SweepCell>,
    /// Index of the smallest margin.
    pub worst: Option<usize>,
}

impl SweepReport {
    pub fn pass(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }
}

/// Runs one check per `(p, q, t)` cell. Cells with `t` below the threshold
/// for constant `alpha` are exploratory and always pass.
pub fn hc_sweep(
    l: &LindbladGenerator,
    alpha: f64,
    kind: HcKind,
    grid: &[(f64, f64, f64)],
    sample_count: usize,
    seed: u64,
) -> Result<SweepReport> {
    let mut cells = Vec::with_capacity(grid.len());
    for (i, &(p, q, t)) in grid.iter().enumerate() {
        let cell_seed = child_stream(seed, i as u64);
        let (threshold, margin) = match kind {
            HcKind::Forward => {
                (hc_time_threshold(alpha, p, q)?, hc_check(l, p, q, t, sample_count, cell_seed)?.value)
            }
            HcKind::Reverse => (
                hc_time_threshold(alpha, p, q)?,
                reverse_hc_check(l, p, q, t, sample_count, cell_seed)?.value,
            ),
            HcKind::ReverseHolder => {
                let threshold = ((1.0 - p) * (1.0 - q)).recip().ln() / (4.0 * alpha);
                let m = reverse_holder_hc_check(l, p, q, t, sample_count, cell_seed)?.value;
                (threshold.max(0.0), m)
            }
        };
        let contract = match kind {
            HcKind::ReverseHolder => reverse_holder_hc_condition(alpha, p, q, t),
            _ => t >= threshold,
        };
        let pass = !contract || margin >= -INEQ_TOL;
        cells.push(SweepCell { p, q, t, threshold, margin, contract, pass });
    }
    let worst = (0..cells.len()).min_by(|&a, &b| cells[a].margin.total_cmp(&cells[b].margin));
    Ok(SweepReport { kind, alpha, cells, worst })
}

/// Smallest `ℰ_1(X)/Ent_1(X)` for the tensor sum of simple generators with
/// the given invariant states. Every fourth sample is a product operator and
/// every fourth commutes with the product state.
pub fn alpha1_tensor_check(sigmas: &[Density], sample_count: usize, seed: u64) -> Result<BatchMin> {
    let gens = sigmas.iter().map(simple_generator).collect::<Result<Vec<_>>>()?;
    let k = tensor_sum(&gens)?;
    let w = k.space();
    batch_min(sample_count, seed, |rng, i| {
        let x = match i % 4 {
            2 => kron_all(
                &sigmas
                    .iter()
                    .map(|s| sample_definite_with(rng, s.dim()).matrix().clone())
                    .collect::<Vec<_>>(),
            ),
            3 => commuting_sample(rng, w),
            _ => sample_definite_with(rng, w.dim()).matrix().clone(),
        };
        Ok(lsi_ratio(&k, &x, 1.0)?.unwrap_or(f64::INFINITY))
    })
}

fn block_of(x: &CMatrix, m: usize, i: usize, j: usize) -> CMatrix {
    x.view((i * m, j * m), (m, m)).into_owned()
}

/// RHS − LHS of the block-matrix entropy inequality for
/// `X = [[A, C], [C†, B]]` on `ℂ² ⊗ ℂ^m` with `σ = diag(θ, 1−θ)`.
pub fn block_entropy_inequality_check(
    a: &CMatrix,
    b: &CMatrix,
    c: &CMatrix,
    theta: f64,
    rho: &Density,
) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Parameter(format!("θ must lie in (0, 1), got {theta}")));
    }
    let m = rho.dim();
    for (name, blk) in [("A", a), ("B", b), ("C", c)] {
        if blk.shape() != (m, m) {
            return Err(Error::Dimension(format!(
                "block {name} is {}x{}, expected {m}x{m}",
                blk.nrows(),
                blk.ncols()
            )));
        }
    }
    let mut x = CMatrix::zeros(2 * m, 2 * m);
    x.view_mut((0, 0), (m, m)).copy_from(a);
    x.view_mut((0, m), (m, m)).copy_from(c);
    x.view_mut((m, 0), (m, m)).copy_from(&c.adjoint());
    x.view_mut((m, m), (m, m)).copy_from(b);
    let scale = x.norm().max(1.0);
    if hermiticity_residual(&x) > 1e-10 * scale {
        return Err(Error::Parameter("A and B must be Hermitian".into()));
    }
    let ex = eigh(&x)?;
    if ex.min() < -CLIP_TOL * scale {
        return Err(Error::Parameter(format!(
            "block matrix is not positive semidefinite (eigenvalue {:e})",
            ex.min()
        )));
    }

    let sigma = Density::from_diagonal(&[theta, 1.0 - theta])?;
    let ws = WeightedSpace::new(sigma.clone())?;
    let wr = WeightedSpace::new(rho.clone())?;
    let wsr = WeightedSpace::new(sigma.tensor(rho)?)?;

    let na = weighted_norm(&wr, a, 2.0)?;
    let nb = weighted_norm(&wr, b, 2.0)?;
    let nc = weighted_norm(&wr, c, 2.0)?;
    let ncd = weighted_norm(&wr, &c.adjoint(), 2.0)?;
    let mm = CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(na, 0.0), C64::new(nc, 0.0), C64::new(ncd, 0.0), C64::new(nb, 0.0)],
    );
    let em = eigh(&((&mm + mm.adjoint()) * C64::new(0.5, 0.0)))?;
    if em.min() < -1e-10 * em.max().abs().max(1.0) {
        return Err(Error::Contract(format!("norm matrix M is not PSD (eigenvalue {:e})", em.min())));
    }

    let i22c = power_operator(&wr, c, 2.0, 2.0)?;
    let i22cd = power_operator(&wr, &c.adjoint(), 2.0, 2.0)?;
    let rhs = ent_p_semidefinite(&ws, &mm, 2.0)?
        + theta * ent_p_semidefinite(&wr, a, 2.0)?
        + (1.0 - theta) * ent_p_semidefinite(&wr, b, 2.0)?
        + (theta * (1.0 - theta)).sqrt()
            * (ent_p_semidefinite(&wr, &i22c, 2.0)? + ent_p_semidefinite(&wr, &i22cd, 2.0)?);
    let lhs = ent_p_semidefinite(&wsr, &x, 2.0)?;
    Ok(rhs - lhs)
}

/// Smallest block-inequality margin over random PSD `X = GG†` of random rank
/// and random definite `ρ` of dimension `m`.
pub fn block_entropy_inequality_batch(m: usize, theta: f64, sample_count: usize, seed: u64) -> Result<BatchMin> {
    batch_min(sample_count, seed, |rng, _| {
        let rho = density_with(rng, m, 0.05 / m as f64)?;
        let rank = rng.random_range(1..=2 * m);
        let g = ginibre_with(rng, 2 * m, rank);
        let x = &g * g.adjoint();
        let x = &x * C64::new(1.0 / x.trace().re, 0.0);
        block_entropy_inequality_check(
            &block_of(&x, m, 0, 0),
            &block_of(&x, m, 1, 1),
            &block_of(&x, m, 0, 1),
            theta,
            &rho,
        )
    })
}

/// `⟨C,𝒦C⟩_ρ + ⟨C†,𝒦C†⟩_ρ − ℰ₂(I_{2,2}(C)) − ℰ₂(I_{2,2}(C†))` for a
/// ρ-reversible `𝒦`.
pub fn lemma_2positive_check(c: &CMatrix, k: &LindbladGenerator) -> Result<f64> {
    k.require_reversible()?;
    let w = k.space();
    w.check(c, "C")?;
    let pair = |y: &CMatrix| inner_sigma(w, y, &k.apply(y)).re;
    let cd = c.adjoint();
    let pc = power_operator(w, c, 2.0, 2.0)?;
    let pcd = power_operator(w, &cd, 2.0, 2.0)?;
    Ok(pair(c) + pair(&cd) - pair(&pc) - pair(&pcd))
}

/// Smallest 2-positivity margin over random general, anti-Hermitian and
/// positive `C`.
pub fn lemma_2positive_batch(k: &LindbladGenerator, sample_count: usize, seed: u64) -> Result<BatchMin> {
    let d = k.dim();
    batch_min(sample_count, seed, |rng, i| {
        let c = match i % 3 {
            0 => ginibre_with(rng, d, d),
            1 => {
                let g = ginibre_with(rng, d, d);
                &g - g.adjoint()
            }
            _ => positive_definite_with(rng, d, 1e-3)?.matrix().clone(),
        };
        lemma_2positive_check(&c, k)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{identity, random};
    use crate::semigroup::{davies_qubit_generator, tensor_power};

    fn sigma_q() -> Density {
        Density::from_diagonal(&[0.25, 0.75]).unwrap()
    }

    fn quick() -> LsiOptions {
        LsiOptions { starts: 8, samples: 128, seed: 3, ..Default::default() }
    }

    #[test]
    fn closed_form_values() {
        let a = |s: f64| alpha2_simple_exact(&Density::from_diagonal(&[s, 1.0 - s]).unwrap()).unwrap();
        assert!((a(0.25) - 0.5 / 3f64.ln()).abs() < 1e-14);
        assert!((a(0.1) - 0.8 / 9f64.ln()).abs() < 1e-14);
        assert!((a(0.4) - 0.2 / 1.5f64.ln()).abs() < 1e-14);
        assert_eq!(a(0.5), 0.5);
        for eps in [1e-3, 1e-5, 1e-6, 1e-7, 1e-9] {
            assert!((a(0.5 - eps) - 0.5).abs() < 2.0 * eps * eps + 1e-15);
        }
    }

    #[test]
    fn estimate_matches_closed_form_and_witness() {
        let l = simple_generator(&sigma_q()).unwrap();
        let est = lsi_constant_estimate(&l, 2.0, &quick()).unwrap();
        let exact = 0.5 / 3f64.ln();
        assert!(est.value <= est.sampled_floor + 1e-6);
        assert!((est.value - exact).abs() / exact < 0.02, "{} vs {exact}", est.value);
        assert!(est.value >= exact - 1e-9);
        let re = lsi_ratio(&l, est.witness.matrix(), 2.0).unwrap().unwrap();
        assert!((re - est.value).abs() < 1e-8);
    }

    #[test]
    fn witness_reevaluates_at_other_p() {
        let l = simple_generator(&sigma_q()).unwrap();
        for p in [0.5, 1.0, 1.5] {
            let est = lsi_constant_estimate(&l, p, &quick()).unwrap();
            let re = lsi_ratio(&l, est.witness.matrix(), p).unwrap().unwrap();
            assert!((re - est.value).abs() < 1e-8 * est.value.max(1.0), "p = {p}: {re} vs {}", est.value);
        }
    }

    #[test]
    fn duality_witness_maps_back() {
        let l = simple_generator(&sigma_q()).unwrap();
        let est = lsi_constant_estimate(&l, 0.5, &quick()).unwrap();
        let rep = lsi_duality_check(&l, &est, 500, 4, 0.03).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn verify_trivial_and_counterexample() {
        let l = simple_generator(&sigma_q()).unwrap();
        assert!(lsi_verify(&l, 2.0, 0.0, 200, 1, &[]).unwrap().passes(0.0, INEQ_TOL));
        let est = lsi_constant_estimate(&l, 2.0, &quick()).unwrap();
        let beta = alpha2_simple_exact(&sigma_q()).unwrap();
        assert!(lsi_verify(&l, 2.0, beta, 500, 2, &[]).unwrap().passes(beta, INEQ_TOL));
        let witness = [est.witness.matrix().clone()];
        let r = lsi_verify(&l, 2.0, 0.46, 100, 2, &witness).unwrap();
        assert!(!r.passes(0.46, INEQ_TOL));
        assert_eq!(r.index, 100);
    }

    #[test]
    fn gap_bound_for_simple_and_davies() {
        let s = sigma_q();
        let l = simple_generator(&s).unwrap();
        assert!((alpha2_gap_lower_bound(&l).unwrap() - alpha2_simple_exact(&s).unwrap()).abs() < 1e-9);
        let dv = davies_qubit_generator(&s, 0.7, 0.3).unwrap();
        let b = alpha2_gap_lower_bound(&dv).unwrap();
        assert!(lsi_verify(&dv, 2.0, b, 300, 5, &[]).unwrap().passes(b, INEQ_TOL));
        let two = tensor_power(&l, 2).unwrap();
        assert!(matches!(alpha2_gap_lower_bound(&two), Err(Error::Parameter(_))));
    }

    #[test]
    fn thresholds() {
        assert_eq!(hc_time_threshold(0.3, 3.0, 3.0).unwrap(), 0.0);
        assert!((hc_time_threshold(0.5, 4.0, 2.0).unwrap() - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!((hc_time_threshold(0.25, -1.0, 0.5).unwrap() - 4f64.ln()).abs() < 1e-15);
        assert!(hc_time_threshold(0.5, 2.0, 4.0).is_err());
        assert!(hc_time_threshold(0.5, 0.7, 0.5).is_err());
        assert!(hc_time_threshold(0.5, 2.0, 1.0).is_err());
        assert!(hc_time_threshold(0.0, 4.0, 2.0).is_err());
    }

    #[test]
    fn hypercontractivity_at_threshold() {
        let l = simple_generator(&Density::from_diagonal(&[0.5, 0.5]).unwrap()).unwrap();
        let t = hc_time_threshold(0.5, 4.0, 2.0).unwrap();
        assert!(hc_check(&l, 4.0, 2.0, t, 300, 1).unwrap().passes(0.0, INEQ_TOL));
        assert!(hc_check(&l, 2.0, 2.0, 0.0, 100, 1).unwrap().passes(0.0, INEQ_TOL));
        let d = simple_generator(&sigma_q()).unwrap();
        let t = hc_time_threshold(0.25, -1.0, 0.5).unwrap();
        assert!(reverse_hc_check(&d, -1.0, 0.5, t, 300, 2).unwrap().passes(0.0, INEQ_TOL));
    }

    #[test]
    fn reverse_holder_hc_boundary() {
        let l = simple_generator(&sigma_q()).unwrap();
        let p = 0.05;
        let q = 1.0 - (-1.0f64).exp() / (1.0 - p);
        assert!(reverse_holder_hc_condition(0.25, p, q, 1.0));
        assert!(!reverse_holder_hc_condition(0.25, p, q, 0.9));
        assert!(reverse_holder_hc_check(&l, p, q, 1.0, 300, 3).unwrap().passes(0.0, INEQ_TOL));
    }

    #[test]
    fn sweep_labels_exploratory_cells() {
        let l = simple_generator(&sigma_q()).unwrap();
        let a = alpha2_simple_exact(&sigma_q()).unwrap();
        let t = hc_time_threshold(a, 4.0, 2.0).unwrap();
        let rep = hc_sweep(&l, a, HcKind::Forward, &[(4.0, 2.0, t), (4.0, 2.0, 0.9 * t)], 100, 1).unwrap();
        assert!(rep.cells[0].contract && !rep.cells[1].contract);
        assert!(rep.pass());
        assert_eq!(rep.worst, Some(1));
    }

    #[test]
    fn sv_simple() {
        let l = simple_generator(&sigma_q()).unwrap();
        let grid = [0.1, 0.5, 1.0, 1.5, 2.0];
        let r = sv_monotonicity_check(&l, &identity(2), &grid).unwrap();
        assert!(r.pass && r.values.iter().all(|v| v.abs() < 1e-12));
        let x = random::positive_definite(2, 9, 0.1).unwrap();
        assert!(sv_monotonicity_check(&l, x.matrix(), &grid).unwrap().pass);
        assert!(sv_monotonicity_check(&l, x.matrix(), &[1.0, 0.5]).is_err());
    }

    #[test]
    fn alpha1_bound() {
        let s2 = Density::from_diagonal(&[0.3, 0.7]).unwrap();
        let r = alpha1_tensor_check(&[sigma_q(), s2], 400, 1).unwrap();
        assert!(r.passes(0.25, INEQ_TOL), "{r:?}");
    }

    #[test]
    fn block_lemma_cases() {
        let rho = random::density(2, 4, 0.1).unwrap();
        let i = identity(2);
        let z = CMatrix::zeros(2, 2);
        assert!(block_entropy_inequality_check(&i, &i, &z, 0.3, &rho).unwrap().abs() < 1e-12);
        let a = random::positive_definite(2, 5, 0.1).unwrap().matrix().clone();
        assert!(block_entropy_inequality_check(&a, &a, &z, 0.3, &rho).unwrap().abs() < 1e-8);
        let bad = diag(&[1.0, 1.0]) * C64::new(3.0, 0.0);
        assert!(block_entropy_inequality_check(&i, &i, &bad, 0.3, &rho).is_err());
        assert!(block_entropy_inequality_batch(2, 0.2, 200, 1).unwrap().passes(0.0, LEMMA_TOL));
        assert!(block_entropy_inequality_batch(3, 0.5, 200, 2).unwrap().passes(0.0, LEMMA_TOL));
    }

    #[test]
    fn two_positive_lemma() {
        let l = simple_generator(&sigma_q()).unwrap();
        let c = random::positive_definite(2, 1, 0.1).unwrap().matrix().clone();
        assert!(lemma_2positive_check(&c, &l).unwrap().abs() < 1e-10);
        assert!(lemma_2positive_batch(&l, 300, 2).unwrap().passes(0.0, LEMMA_TOL));
        let dv = davies_qubit_generator(&sigma_q(), 1.0, 0.5).unwrap();
        assert!(lemma_2positive_batch(&dv, 300, 3).unwrap().passes(0.0, LEMMA_TOL));
    }
}
