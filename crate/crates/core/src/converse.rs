//! Strong-converse bounds for asymmetric hypothesis testing and
//! classical-quantum channel coding, with exact oracles to compare against.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::{relative_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::operator::random::{positive_definite_with, unitary_with};
use crate::operator::{
    diag, eigh, identity, kron_all, max_abs, trace_product, CMatrix, Density, MatrixDoc, Positive,
    C64, MAX_DIM,
};
use crate::par::{batch_min, BatchMin};

/// Eigenvalue tolerance for test operators `0 ≤ T ≤ I`.
pub const TEST_CLIP_TOL: f64 = 1e-10;
/// Eigenvalues of `ρⁿ − λσⁿ` within this (relative) tolerance span the
/// randomized part of a Neyman-Pearson test.
pub const NP_KERNEL_TOL: f64 = 1e-9;
pub const POVM_TOL: f64 = 1e-9;

/// Operator norm of `ρσ^{-1}`.
pub fn gamma_infinity(rho: &Density, sigma: &Density) -> Result<f64> {
    sigma.require_definite("σ")?;
    crate::operator::check_same_dim(rho.matrix(), sigma.matrix(), "ρ and σ")?;
    let prod = rho.matrix() * sigma.eigen().map(f64::recip);
    let sv = prod.singular_values();
    Ok(sv.iter().fold(0.0_f64, |a, &b| a.max(b)))
}

fn power_dim(d: usize, n: usize) -> Result<usize> {
    let total = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(d));
    match total {
        Some(t) if t <= MAX_DIM && n >= 1 => Ok(t),
        _ if n == 0 => Err(Error::Parameter("n must be at least 1".into())),
        _ => Err(Error::Resource(format!("{d}^{n} exceeds {MAX_DIM}"))),
    }
}

#[derive(Debug, Clone)]
pub struct HypothesisInstance {
    pub rho: Density,
    pub sigma: Density,
    pub n: usize,
    pub gamma: f64,
    /// `D(ρ‖σ)` in nats.
    pub rel_ent: f64,
}

impl HypothesisInstance {
    pub fn new(rho: Density, sigma: Density, n: usize) -> Result<Self> {
        rho.require_definite("ρ")?;
        sigma.require_definite("σ")?;
        power_dim(rho.dim(), n)?;
        let gamma = gamma_infinity(&rho, &sigma)?;
        let rel_ent = relative_entropy(&rho, &sigma)?;
        Ok(HypothesisInstance { rho, sigma, n, gamma, rel_ent })
    }

    /// The norm bound is at least the largest eigenvalue of
    /// `σ^{-1/2}ρσ^{-1/2}`, which is at least 1; smaller values indicate a
    /// numerical problem.
    pub fn gamma_below_one(&self) -> bool {
        self.gamma < 1.0 - 1e-10
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        power_dim(self.rho.dim(), n)?;
        Ok(HypothesisInstance { n, ..self.clone() })
    }

    pub fn rho_n(&self) -> Result<Density> {
        self.rho.tensor_power(self.n)
    }

    pub fn sigma_n(&self) -> Result<Density> {
        self.sigma.tensor_power(self.n)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub rho: MatrixDoc,
    pub sigma: MatrixDoc,
    pub n: usize,
}

impl InstanceDoc {
    pub fn build(&self) -> Result<HypothesisInstance> {
        HypothesisInstance::new(
            Density::new(self.rho.to_matrix()?)?,
            Density::new(self.sigma.to_matrix()?)?,
            self.n,
        )
    }

    pub fn parse(text: &str) -> Result<HypothesisInstance> {
        serde_json::from_str::<InstanceDoc>(text)?.build()
    }
}

/// A test `0 ≤ T ≤ I` with its error probabilities
/// `α = tr((I−T)ρⁿ)` and `β = tr(Tσⁿ)`.
#[derive(Debug, Clone)]
pub struct QuantumTest {
    t: CMatrix,
    pub alpha: f64,
    pub beta: f64,
}

impl QuantumTest {
    /// Clips eigenvalues within `1e-10` of `[0, 1]`; anything further out is
    /// rejected.
    pub fn new(t: CMatrix, rho_n: &Density, sigma_n: &Density) -> Result<Self> {
        crate::operator::check_same_dim(&t, rho_n.matrix(), "test and ρⁿ")?;
        crate::operator::check_same_dim(&t, sigma_n.matrix(), "test and σⁿ")?;
        let e = eigh(&t)?;
        if e.min() < -TEST_CLIP_TOL || e.max() > 1.0 + TEST_CLIP_TOL {
            return Err(Error::Domain(format!(
                "test spectrum [{:e}, {}] leaves [0, 1]",
                e.min(),
                e.max()
            )));
        }
        let t = e.map(|v| v.clamp(0.0, 1.0));
        let alpha = (1.0 - trace_product(&t, rho_n.matrix()).re).clamp(0.0, 1.0);
        let beta = trace_product(&t, sigma_n.matrix()).re.clamp(0.0, 1.0);
        Ok(QuantumTest { t, alpha, beta })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.t
    }
}

/// Lower bound on `log tr(σⁿTₙ)`:
/// `−nD − 2√(nγ log(1/τ)) + log τ` with `τ = tr(ρⁿTₙ)`; `−∞` at `τ = 0`.
pub fn qht_bound_rhs(inst: &HypothesisInstance, trace_rho_t: f64) -> Result<f64> {
    if !(0.0..=1.0 + TEST_CLIP_TOL).contains(&trace_rho_t) {
        return Err(Error::Parameter(format!("tr(ρⁿT) = {trace_rho_t} outside [0, 1]")));
    }
    if trace_rho_t == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let tau = trace_rho_t.min(1.0);
    let n = inst.n as f64;
    let log_inv = -tau.ln();
    Ok(-n * inst.rel_ent - 2.0 * (n * inst.gamma * log_inv).sqrt() + tau.ln())
}

/// `(1−ε)·exp(−nD − 2√(nγ log(1/(1−ε))))`.
pub fn beta_lower_bound(inst: &HypothesisInstance, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Parameter(format!("ε must lie in (0, 1), got {epsilon}")));
    }
    Ok(qht_bound_rhs(inst, 1.0 - epsilon)?.exp())
}

/// `(√(γ + r − D) − √γ)²`, the exponent in `αₙ ≥ 1 − e^{−nf}` for tests
/// with `βₙ ≤ e^{−nr}`.
pub fn strong_converse_exponent_f(gamma: f64, r: f64, d: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Parameter(format!("γ must be positive, got {gamma}")));
    }
    if !(r >= d) {
        return Err(Error::Parameter(format!("rate {r} below D = {d}")));
    }
    let x = r - d;
    // (√(γ+x) − √γ)² = x²/(√(γ+x) + √γ)² avoids cancellation for small x.
    let s = (gamma + x).sqrt() + gamma.sqrt();
    Ok(x * x / (s * s))
}

/// Exact `β_{n,ε} = min{tr(Tσⁿ) : tr((I−T)ρⁿ) ≤ ε}` together with the
/// optimal randomized threshold test.
pub fn np_oracle(inst: &HypothesisInstance, epsilon: f64) -> Result<(f64, QuantumTest)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Parameter(format!("ε must lie in (0, 1), got {epsilon}")));
    }
    let rho_n = inst.rho_n()?;
    let sigma_n = inst.sigma_n()?;
    let (rn, sn) = (rho_n.matrix(), sigma_n.matrix());
    let alpha_at = |lambda: f64| -> Result<f64> {
        let e = eigh(&(rn - sn * C64::new(lambda, 0.0)))?;
        let pos: Vec<f64> = e.values.iter().map(|&v| if v > 0.0 { 1.0 } else { 0.0 }).collect();
        Ok(1.0 - trace_product(&e.with_values(&pos), rn).re)
    };
    // ρⁿ − λσⁿ ≤ 0 once λ reaches the top eigenvalue of σ^{-n/2}ρⁿσ^{-n/2}.
    let mut hi = inst.gamma.powi(inst.n as i32).max(1.0) * 1.01;
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if alpha_at(mid)? > epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let diff = rn - sn * C64::new(lambda, 0.0);
    let e = eigh(&diff)?;
    let tol = NP_KERNEL_TOL * (1.0 + lambda);
    let pos: Vec<f64> = e.values.iter().map(|&v| if v > tol { 1.0 } else { 0.0 }).collect();
    let zero: Vec<f64> = e.values.iter().map(|&v| if v.abs() <= tol { 1.0 } else { 0.0 }).collect();
    let p_pos = e.with_values(&pos);
    let p_zero = e.with_values(&zero);
    let kept = trace_product(&p_pos, rn).re;
    let in_kernel = trace_product(&p_zero, rn).re;
    let c = if in_kernel > 0.0 { ((1.0 - epsilon - kept) / in_kernel).clamp(0.0, 1.0) } else { 0.0 };
    let t = &p_pos + &p_zero * C64::new(c, 0.0);
    let test = QuantumTest::new(t, &rho_n, &sigma_n)?;
    Ok((test.beta, test))
}

/// Smallest `log βₙ(T) − RHS` over random tests `T = U diag(u) U†`, half of
/// them projectors.
pub fn qht_random_test_check(inst: &HypothesisInstance, sample_count: usize, seed: u64) -> Result<BatchMin> {
    let rho_n = inst.rho_n()?;
    let sigma_n = inst.sigma_n()?;
    let dim = rho_n.dim();
    batch_min(sample_count, seed, |rng, i| {
        let u = unitary_with(rng, dim);
        let spectrum: Vec<f64> = (0..dim)
            .map(|_| if i % 2 == 0 { rng.random::<f64>() } else { f64::from(rng.random::<bool>() as u8) })
            .collect();
        let t = &u * diag(&spectrum) * u.adjoint();
        let test = QuantumTest::new(t, &rho_n, &sigma_n)?;
        let tau = 1.0 - test.alpha;
        if tau <= 0.0 || test.beta <= 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(test.beta.ln() - qht_bound_rhs(inst, tau)?)
    })
}

/// `tr(B^{1/2}AB^{1/2})^r − tr(B^{r/2}A^rB^{r/2})`, non-negative for
/// `r ∈ [0, 1]`.
pub fn alt_check(a: &Positive, b: &Positive, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Parameter(format!("r must lie in [0, 1], got {r}")));
    }
    crate::operator::check_same_dim(a.matrix(), b.matrix(), "A and B")?;
    let bh = b.sqrt();
    let inner = &bh * a.matrix() * &bh;
    let inner = Positive::semidefinite((&inner + inner.adjoint()) * C64::new(0.5, 0.0))?;
    let lhs: f64 = inner.eigen().values.iter().map(|v| v.max(0.0).powf(r)).sum();
    let br = b.pow(r / 2.0)?;
    let rhs = (&br * a.pow(r)? * &br).trace().re;
    Ok(lhs - rhs)
}

/// Smallest ALT margin over random definite pairs.
pub fn alt_batch(dim: usize, r: f64, sample_count: usize, seed: u64) -> Result<BatchMin> {
    batch_min(sample_count, seed, |rng, _| {
        let a = crate::operator::random::sample_definite_with(rng, dim);
        let b = crate::operator::random::sample_definite_with(rng, dim);
        alt_check(&a, &b, r)
    })
}

/// A memoryless classical-quantum channel `x ↦ ρ_x` on a finite alphabet
/// indexed `0..k`.
#[derive(Debug, Clone)]
pub struct CqChannel {
    outputs: Vec<Density>,
}

impl CqChannel {
    pub fn new(outputs: Vec<Density>) -> Result<Self> {
        let first = outputs
            .first()
            .ok_or_else(|| Error::Parameter("channel needs at least one output".into()))?;
        for o in &outputs {
            crate::operator::check_same_dim(first.matrix(), o.matrix(), "channel outputs")?;
        }
        Ok(CqChannel { outputs })
    }

    pub fn outputs(&self) -> &[Density] {
        &self.outputs
    }

    pub fn alphabet_size(&self) -> usize {
        self.outputs.len()
    }

    pub fn dim(&self) -> usize {
        self.outputs[0].dim()
    }

    /// `ρ_{x₁} ⊗ … ⊗ ρ_{xₙ}`.
    pub fn codeword_state(&self, xn: &[usize]) -> Result<Density> {
        power_dim(self.dim(), xn.len())?;
        let factors = xn
            .iter()
            .map(|&x| {
                self.outputs
                    .get(x)
                    .map(|o| o.matrix().clone())
                    .ok_or_else(|| Error::Parameter(format!("symbol {x} outside the alphabet")))
            })
            .collect::<Result<Vec<_>>>()?;
        Density::new(kron_all(&factors))
    }

    /// `W ⊗ W'` on the product alphabet, with symbol `(x, y) ↦ x·|Y| + y`.
    pub fn product(&self, other: &CqChannel) -> Result<CqChannel> {
        let mut outputs = Vec::with_capacity(self.alphabet_size() * other.alphabet_size());
        for a in &self.outputs {
            for b in &other.outputs {
                outputs.push(a.tensor(b)?);
            }
        }
        CqChannel::new(outputs)
    }
}

/// Holevo quantity `H(Σ_x P(x)ρ_x) − Σ_x P(x)H(ρ_x)` of an ensemble.
pub fn mutual_information(states: &[Density], probs: &[f64]) -> Result<f64> {
    if states.len() != probs.len() || states.is_empty() {
        return Err(Error::Dimension(format!(
            "{} states against {} probabilities",
            states.len(),
            probs.len()
        )));
    }
    if probs.iter().any(|&p| !(p >= 0.0)) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
        return Err(Error::Parameter("probabilities must be non-negative and sum to 1".into()));
    }
    let d = states[0].dim();
    let mut avg = CMatrix::zeros(d, d);
    let mut cond = 0.0;
    for (s, &p) in states.iter().zip(probs) {
        crate::operator::check_same_dim(states[0].matrix(), s.matrix(), "ensemble states")?;
        if p > 0.0 {
            avg += s.matrix() * C64::new(p, 0.0);
            cond += p * von_neumann_entropy(s);
        }
    }
    Ok(von_neumann_entropy(&Density::new(avg)?) - cond)
}

/// `I(X;B)` for input distribution `P` on the channel alphabet.
pub fn channel_mutual_information(channel: &CqChannel, probs: &[f64]) -> Result<f64> {
    mutual_information(channel.outputs(), probs)
}

/// `I(Xⁿ;Bⁿ)` for uniformly chosen messages; repeated codewords share a
/// classical symbol.
pub fn code_mutual_information(channel: &CqChannel, codewords: &[Vec<usize>]) -> Result<f64> {
    if codewords.is_empty() {
        return Err(Error::Parameter("code has no codewords".into()));
    }
    let mut distinct: Vec<&Vec<usize>> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let w = 1.0 / codewords.len() as f64;
    for cw in codewords {
        match distinct.iter().position(|d| *d == cw) {
            Some(i) => weights[i] += w,
            None => {
                distinct.push(cw);
                weights.push(w);
            }
        }
    }
    let states = distinct
        .iter()
        .map(|cw| channel.codeword_state(cw))
        .collect::<Result<Vec<_>>>()?;
    mutual_information(&states, &weights)
}

/// A code `(|M|, xⁿ(·), Π)` with its decoding performance.
#[derive(Debug, Clone)]
pub struct CqCode {
    pub channel: CqChannel,
    pub codewords: Vec<Vec<usize>>,
    pub povm: Vec<CMatrix>,
    pub p_max: f64,
    pub completeness_residual: f64,
}

impl CqCode {
    /// Validates the POVM and computes `p_max` exactly.
    pub fn new(channel: CqChannel, codewords: Vec<Vec<usize>>, povm: Vec<CMatrix>) -> Result<Self> {
        let n = code_length(&codewords)?;
        if povm.len() != codewords.len() {
            return Err(Error::Dimension(format!(
                "{} POVM elements for {} messages",
                povm.len(),
                codewords.len()
            )));
        }
        let dim = power_dim(channel.dim(), n)?;
        let mut sum = CMatrix::zeros(dim, dim);
        for (m, e) in povm.iter().enumerate() {
            crate::operator::check_same_dim(e, &sum, "POVM element")?;
            let ev = eigh(e)?;
            if ev.min() < -POVM_TOL {
                return Err(Error::Domain(format!("POVM element {m} has eigenvalue {:e}", ev.min())));
            }
            sum += e;
        }
        let completeness_residual = max_abs(&(sum - identity(dim)));
        if completeness_residual > POVM_TOL {
            return Err(Error::Contract(format!(
                "POVM completeness residual {completeness_residual:e} exceeds {POVM_TOL:e}"
            )));
        }
        let mut p_max: f64 = 0.0;
        for (cw, e) in codewords.iter().zip(&povm) {
            let state = channel.codeword_state(cw)?;
            p_max = p_max.max(1.0 - trace_product(e, state.matrix()).re);
        }
        Ok(CqCode { channel, codewords, povm, p_max: p_max.clamp(0.0, 1.0), completeness_residual })
    }

    pub fn messages(&self) -> usize {
        self.codewords.len()
    }

    pub fn block_length(&self) -> usize {
        self.codewords[0].len()
    }

    /// `log|M|/n` in nats.
    pub fn rate(&self) -> f64 {
        (self.messages() as f64).ln() / self.block_length() as f64
    }
}

fn code_length(codewords: &[Vec<usize>]) -> Result<usize> {
    let n = codewords
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Parameter("code has no codewords".into()))?;
    if n == 0 || codewords.iter().any(|c| c.len() != n) {
        return Err(Error::Parameter("codewords must share a positive length".into()));
    }
    Ok(n)
}

/// Pretty-good-measurement decoder `Π_m = S^{-1/2}ρ_mS^{-1/2}` with
/// `S = Σ_m ρ_m`; the projector onto `ker S` is added to `Π_0`.
pub fn pgm_decoder(channel: &CqChannel, codewords: &[Vec<usize>]) -> Result<CqCode> {
    let n = code_length(codewords)?;
    let dim = power_dim(channel.dim(), n)?;
    let states = codewords
        .iter()
        .map(|cw| channel.codeword_state(cw))
        .collect::<Result<Vec<_>>>()?;
    let mut s = CMatrix::zeros(dim, dim);
    for st in &states {
        s += st.matrix();
    }
    let e = eigh(&s)?;
    let cut = 1e-12 * e.max().max(1.0);
    let s_inv_half = e.map(|v| if v > cut { v.powf(-0.5) } else { 0.0 });
    let kernel = e.map(|v| if v > cut { 0.0 } else { 1.0 });
    let mut povm: Vec<CMatrix> = states
        .iter()
        .map(|st| {
            let m = &s_inv_half * st.matrix() * &s_inv_half;
            (&m + m.adjoint()) * C64::new(0.5, 0.0)
        })
        .collect();
    povm[0] += kernel;
    CqCode::new(channel.clone(), codewords.to_vec(), povm)
}

/// `log|M| − 2√(d n log(1/(1−ε))) − log(1/(1−ε))`; `−∞` at `ε = 1`.
pub fn cq_converse_bound(messages: usize, d: usize, n: usize, epsilon: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Parameter(format!("ε must lie in [0, 1], got {epsilon}")));
    }
    if epsilon == 1.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let l = -(1.0 - epsilon).ln();
    Ok((messages as f64).ln() - 2.0 * (d as f64 * n as f64 * l).sqrt() - l)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CqReport {
    pub messages: usize,
    pub n: usize,
    pub p_max: f64,
    pub information: f64,
    pub bound: f64,
    /// `information − bound`; `+∞` when the bound is vacuous.
    pub margin: f64,
    pub vacuous: bool,
}

/// Compares `I(Xⁿ;Bⁿ)` under uniform messages with the converse bound at
/// `ε = p_max`.
pub fn cq_converse_check(code: &CqCode) -> Result<CqReport> {
    let n = code.block_length();
    let information = code_mutual_information(&code.channel, &code.codewords)?;
    let bound = cq_converse_bound(code.messages(), code.channel.dim(), n, code.p_max)?;
    let vacuous = bound == f64::NEG_INFINITY;
    Ok(CqReport {
        messages: code.messages(),
        n,
        p_max: code.p_max,
        information,
        bound,
        margin: if vacuous { f64::INFINITY } else { information - bound },
        vacuous,
    })
}

/// Random faithful qubit outputs for a binary alphabet.
pub fn random_binary_qubit_channel<R: Rng + ?Sized>(rng: &mut R) -> Result<CqChannel> {
    let a = positive_definite_with(rng, 2, 0.02)?;
    let b = positive_definite_with(rng, 2, 0.02)?;
    let norm = |p: Positive| Density::new(p.matrix() / p.matrix().trace());
    CqChannel::new(vec![norm(a)?, norm(b)?])
}

/// Uniformly random codewords over the alphabet.
pub fn random_codewords<R: Rng + ?Sized>(rng: &mut R, alphabet: usize, n: usize, messages: usize) -> Vec<Vec<usize>> {
    (0..messages).map(|_| (0..n).map(|_| rng.random_range(0..alphabet)).collect()).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DecoderDoc {
    Named(String),
    Povm(Vec<MatrixDoc>),
}

/// `{"alphabet": [...], "outputs": [...], "codewords": [[...]], "decoder": "pgm" | [...]}`.
/// Codeword entries are alphabet labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeDoc {
    pub alphabet: Vec<serde_json::Value>,
    pub outputs: Vec<MatrixDoc>,
    pub codewords: Vec<Vec<serde_json::Value>>,
    pub decoder: DecoderDoc,
}

impl CodeDoc {
    pub fn build(&self) -> Result<CqCode> {
        if self.alphabet.len() != self.outputs.len() {
            return Err(Error::Document(format!(
                "{} alphabet labels for {} outputs",
                self.alphabet.len(),
                self.outputs.len()
            )));
        }
        let outputs = self
            .outputs
            .iter()
            .map(|m| Density::new(m.to_matrix()?))
            .collect::<Result<Vec<_>>>()?;
        let channel = CqChannel::new(outputs)?;
        let codewords = self
            .codewords
            .iter()
            .map(|cw| {
                cw.iter()
                    .map(|label| {
                        self.alphabet.iter().position(|a| a == label).ok_or_else(|| {
                            Error::Document(format!("codeword symbol {label} is not in the alphabet"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        match &self.decoder {
            DecoderDoc::Named(name) if name == "pgm" => pgm_decoder(&channel, &codewords),
            DecoderDoc::Named(name) => Err(Error::Document(format!("unknown decoder \"{name}\""))),
            DecoderDoc::Povm(elems) => {
                let povm = elems.iter().map(MatrixDoc::to_matrix).collect::<Result<Vec<_>>>()?;
                CqCode::new(channel, codewords, povm)
            }
        }
    }

    pub fn parse(text: &str) -> Result<CqCode> {
        serde_json::from_str::<CodeDoc>(text)?.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{qubit_rotation, random};
    use crate::rng::substream;

    fn pair() -> HypothesisInstance {
        HypothesisInstance::new(
            Density::from_diagonal(&[0.5, 0.5]).unwrap(),
            Density::from_diagonal(&[0.25, 0.75]).unwrap(),
            1,
        )
        .unwrap()
    }

    #[test]
    fn gamma_values() {
        let s = Density::from_diagonal(&[0.25, 0.75]).unwrap();
        assert!((gamma_infinity(&s, &s).unwrap() - 1.0).abs() < 1e-12);
        assert!((pair().gamma - 2.0).abs() < 1e-12);
        for seed in 0..20 {
            let r = random::density(3, seed, 0.02).unwrap();
            let s = random::density(3, seed + 100, 0.02).unwrap();
            let g = gamma_infinity(&r, &s).unwrap();
            let sih = s.eigen().map(|v| v.powf(-0.5));
            let radius = eigh(&(&sih * r.matrix() * &sih)).unwrap().max();
            assert!(g >= radius - 1e-10 && radius >= 1.0 - 1e-10);
        }
    }

    #[test]
    fn bound_formulas() {
        let inst = pair().with_n(3).unwrap();
        assert!((qht_bound_rhs(&inst, 1.0).unwrap() + 3.0 * inst.rel_ent).abs() < 1e-15);
        assert_eq!(qht_bound_rhs(&inst, 0.0).unwrap(), f64::NEG_INFINITY);
        let s = Density::from_diagonal(&[0.25, 0.75]).unwrap();
        let same = HypothesisInstance::new(s.clone(), s, 2).unwrap();
        let eps: f64 = 0.1;
        let l = -(1.0 - eps).ln();
        let expect = (1.0 - eps).ln() - 2.0 * (2.0 * l).sqrt();
        assert!((qht_bound_rhs(&same, 1.0 - eps).unwrap() - expect).abs() < 1e-12);
        assert!(beta_lower_bound(&same, eps).unwrap() <= 1.0 - eps);
        let tiny = beta_lower_bound(&inst, 1e-12).unwrap();
        assert!((tiny - (-3.0 * inst.rel_ent).exp()).abs() < 1e-5);
    }

    #[test]
    fn exponent_f() {
        assert_eq!(strong_converse_exponent_f(2.0, 0.3, 0.3).unwrap(), 0.0);
        let f = strong_converse_exponent_f(2.0, 1.3, 0.3).unwrap();
        assert!((f - (5.0 - 2.0 * 6f64.sqrt())).abs() < 1e-14);
        assert!(strong_converse_exponent_f(2.0, 0.2, 0.3).is_err());
        assert!(strong_converse_exponent_f(2.0, 1.0, 0.3).unwrap() < f);
    }

    #[test]
    fn np_oracle_trivial_and_classical() {
        let s = Density::from_diagonal(&[0.25, 0.75]).unwrap();
        let same = HypothesisInstance::new(s.clone(), s, 2).unwrap();
        let (b, t) = np_oracle(&same, 0.1).unwrap();
        assert!((b - 0.9).abs() < 1e-9 && (t.alpha - 0.1).abs() < 1e-9);
        // ρ = (.5,.5), σ = (.25,.75): reject outcome 1 (ratio 2/3) first.
        let (b, t) = np_oracle(&pair(), 0.1).unwrap();
        assert!((t.alpha - 0.1).abs() < 1e-9);
        assert!((b - (0.25 + 0.8 * 0.75)).abs() < 1e-9);
        assert!(np_oracle(&pair(), 0.0).is_err());
    }

    #[test]
    fn np_dominates_bound() {
        let s = Density::new(crate::operator::conjugate(
            &qubit_rotation(std::f64::consts::PI / 8.0),
            &diag(&[0.25, 0.75]),
        ))
        .unwrap();
        let rot = HypothesisInstance::new(Density::from_diagonal(&[0.5, 0.5]).unwrap(), s, 1).unwrap();
        for inst in [pair(), rot] {
            for n in 1..=4 {
                let inst = inst.with_n(n).unwrap();
                for eps in [0.05, 0.1, 0.3] {
                    let (b, t) = np_oracle(&inst, eps).unwrap();
                    assert!(t.alpha <= eps + 1e-9);
                    assert!(b >= beta_lower_bound(&inst, eps).unwrap());
                }
                assert!(qht_random_test_check(&inst, 100, n as u64).unwrap().passes(0.0, 1e-8));
            }
        }
    }

    #[test]
    fn alt_cases() {
        let a = random::positive_definite(3, 1, 0.1).unwrap();
        let b = random::positive_definite(3, 2, 0.1).unwrap();
        assert!(alt_check(&a, &b, 1.0).unwrap().abs() < 1e-10);
        let ca = Positive::definite(diag(&[0.3, 1.2, 2.0])).unwrap();
        let cb = Positive::definite(diag(&[1.5, 0.2, 0.7])).unwrap();
        assert!(alt_check(&ca, &cb, 0.4).unwrap().abs() < 1e-10);
        assert!(alt_batch(3, 0.3, 500, 3).unwrap().passes(0.0, 1e-9));
    }

    fn orthogonal_channel() -> CqChannel {
        CqChannel::new(vec![
            Density::from_diagonal(&[1.0, 0.0]).unwrap(),
            Density::from_diagonal(&[0.0, 1.0]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn information_cases() {
        let ch = orthogonal_channel();
        assert!((channel_mutual_information(&ch, &[0.5, 0.5]).unwrap() - 2f64.ln()).abs() < 1e-12);
        let prod = ch.product(&ch).unwrap();
        let i2 = channel_mutual_information(&prod, &[0.25; 4]).unwrap();
        assert!((i2 - 2.0 * 2f64.ln()).abs() < 1e-12);
        let r = random::density(2, 3, 0.1).unwrap();
        let same = CqChannel::new(vec![r.clone(), r]).unwrap();
        assert!(channel_mutual_information(&same, &[0.3, 0.7]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn pgm_cases() {
        let ch = orthogonal_channel();
        let code = pgm_decoder(&ch, &[vec![0], vec![1]]).unwrap();
        assert!(code.p_max < 1e-12);
        let rep = cq_converse_check(&code).unwrap();
        assert!(rep.margin.abs() < 1e-12);
        let r = random_binary_qubit_channel(&mut substream(1, 0)).unwrap();
        let code = pgm_decoder(&r, &[vec![0, 1], vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap();
        assert!((code.p_max - 0.75).abs() < 1e-9);
        let single = pgm_decoder(&r, &[vec![1, 0]]).unwrap();
        let rep = cq_converse_check(&single).unwrap();
        assert!(rep.information.abs() < 1e-12 && rep.margin >= 0.0);
        let mut rng = substream(2, 0);
        let cw = random_codewords(&mut rng, 2, 3, 4);
        let code = pgm_decoder(&r, &cw).unwrap();
        assert!(code.completeness_residual <= POVM_TOL);
        assert!(cq_converse_check(&code).unwrap().margin >= -1e-8);
    }

    #[test]
    fn code_doc_round_trip() {
        let text = r#"{
            "alphabet": ["a", "b"],
            "outputs": [{"dim": 2, "re": [[0.9, 0.0], [0.0, 0.1]]},
                        {"dim": 2, "re": [[0.2, 0.0], [0.0, 0.8]]}],
            "codewords": [["a", "b"], ["b", "a"]],
            "decoder": "pgm"
        }"#;
        let code = CodeDoc::parse(text).unwrap();
        assert_eq!(code.codewords, vec![vec![0, 1], vec![1, 0]]);
        assert!(CodeDoc::parse(&text.replace("\"pgm\"", "\"ml\"")).is_err());
        let inst = InstanceDoc::parse(
            r#"{"rho": {"dim": 2, "re": [[0.5, 0], [0, 0.5]]}, "sigma": {"dim": 2, "re": [[0.25, 0], [0, 0.75]]}, "n": 2}"#,
        )
        .unwrap();
        assert_eq!(inst.n, 2);
    }
}
