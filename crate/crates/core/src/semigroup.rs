//! Lindblad generators and the quantum Markov semigroups `Φ_t = e^{-tℒ}`.
//!
//! Superoperators act on column-major vectorizations, so
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)` and the Hilbert-Schmidt adjoint of a
//! representation is its conjugate transpose. Generators follow the sign
//! convention `ℒ(I) = 0` with `ℒ` positive on reversible instances, so the
//! Heisenberg-picture GKLS generator is `-ℒ`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{
    self, c64, eigh_superop, identity, kron, max_abs, max_abs_diff, random, CMatrix, Density, Eigen,
    MatrixDoc, C64, MAX_DIM,
};
use crate::par::{batch_min, BatchMin};
use crate::weighted::{weighted_norm, WeightedSpace};

/// Residual accepted for `ℒ(I) = 0` and `ℒ*(σ) = 0`.
pub const FIXED_POINT_TOL: f64 = 1e-9;
/// Relative tolerance of the reversibility tests.
pub const REVERSIBLE_TOL: f64 = 1e-8;
/// Relative singular-value threshold used to count the kernel dimension.
pub const KERNEL_TOL: f64 = 1e-8;
/// Commutator bound `‖[J, σ^{-1} ⊗ σᵀ]‖` for the Kraus decomposition.
pub const CHOI_COMMUTATOR_TOL: f64 = 1e-6;

/// Linear map on `d × d` matrices stored as a `d² × d²` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    rep: CMatrix,
}

fn vec_of(x: &CMatrix) -> DVector<C64> {
    DVector::from_column_slice(x.as_slice())
}

fn unvec(v: &DVector<C64>, d: usize) -> CMatrix {
    CMatrix::from_column_slice(d, d, v.as_slice())
}

impl Superoperator {
    pub fn from_rep(dim: usize, rep: CMatrix) -> Result<Self> {
        let n = dim * dim;
        if rep.nrows() != n || rep.ncols() != n {
            return Err(Error::Dimension(format!(
                "superoperator on {dim}x{dim} matrices needs a {n}x{n} representation, got {}x{}",
                rep.nrows(),
                rep.ncols()
            )));
        }
        Ok(Superoperator { dim, rep })
    }

    /// Representation of the linear map `f`, built column by column.
    pub fn from_fn(dim: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        let n = dim * dim;
        let mut rep = CMatrix::zeros(n, n);
        for k in 0..n {
            let mut e = CMatrix::zeros(dim, dim);
            e[(k % dim, k / dim)] = c64(1.0, 0.0);
            let col = f(&e);
            rep.column_mut(k).copy_from_slice(col.as_slice());
        }
        Superoperator { dim, rep }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rep(&self) -> &CMatrix {
        &self.rep
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        unvec(&(&self.rep * vec_of(x)), self.dim)
    }

    /// Hilbert-Schmidt adjoint.
    pub fn adjoint(&self) -> Superoperator {
        Superoperator { dim: self.dim, rep: self.rep.adjoint() }
    }

    pub fn compose(&self, other: &Superoperator) -> Superoperator {
        Superoperator { dim: self.dim, rep: &self.rep * &other.rep }
    }
}

/// Superoperator `X ↦ A X B` as `Bᵀ ⊗ A`.
fn sandwich(a: &CMatrix, b: &CMatrix) -> CMatrix {
    kron(&b.transpose(), a)
}

/// `ℒ = -Σ_k γ_k (J_k† X J_k − ½{J_k†J_k, X})`.
pub fn gkls_generator(dim: usize, jumps: &[(CMatrix, f64)]) -> Superoperator {
    let id = identity(dim);
    let n = dim * dim;
    let mut rep = CMatrix::zeros(n, n);
    for (j, rate) in jumps {
        let jd = j.adjoint();
        let jdj = &jd * j;
        let term = sandwich(&jd, j) - (sandwich(&jdj, &id) + sandwich(&id, &jdj)) * c64(0.5, 0.0);
        rep -= term * c64(*rate, 0.0);
    }
    Superoperator { dim, rep }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Simple,
    Davies,
    TensorSum,
    Custom,
}

/// Spectral data of `G^{1/2} rep G^{-1/2}` for a reversible generator, where
/// `G = (σ^{1/2})ᵀ ⊗ σ^{1/2}` is the Gram matrix of `⟨·,·⟩_σ`.
#[derive(Debug)]
struct SymmetricForm {
    eig: Eigen,
    g_half: CMatrix,
    g_half_inv: CMatrix,
}

#[derive(Debug, Default)]
struct Caches {
    symmetric: OnceLock<std::result::Result<SymmetricForm, String>>,
    propagators: Mutex<HashMap<u64, Arc<CMatrix>>>,
}

/// A primitive Lindblad generator with stationary state σ.
#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    op: Superoperator,
    space: WeightedSpace,
    kind: GeneratorKind,
    factor_dims: Vec<usize>,
    reversible: bool,
    strongly_reversible: bool,
    params: serde_json::Value,
    caches: Arc<Caches>,
}

fn gram_sigma(w: &WeightedSpace, s: f64) -> CMatrix {
    let half = w.sigma_pow(s);
    kron(&half.transpose(), &half)
}

fn scale_of(m: &CMatrix) -> f64 {
    max_abs(m).max(1.0)
}

fn reversible_residual(op: &Superoperator, w: &WeightedSpace) -> f64 {
    let g = gram_sigma(w, 0.5);
    let g_inv = gram_sigma(w, -0.5);
    max_abs_diff(&(&g * op.rep() * g_inv), &op.rep().adjoint()) / scale_of(op.rep())
}

fn strong_residual(op: &Superoperator, w: &WeightedSpace) -> f64 {
    let g1 = kron(&w.sigma().matrix().transpose(), &identity(w.dim()));
    max_abs_diff(&(&g1 * op.rep()), &(op.rep().adjoint() * &g1)) / scale_of(op.rep())
}

impl LindbladGenerator {
    /// Validates unitality, stationarity of σ and primitivity.
    fn build(
        op: Superoperator,
        sigma: Density,
        kind: GeneratorKind,
        factor_dims: Vec<usize>,
        params: serde_json::Value,
    ) -> Result<Self> {
        let space = WeightedSpace::new(sigma)?;
        if space.dim() != op.dim() {
            return Err(Error::Dimension(format!(
                "generator acts on dimension {}, σ has dimension {}",
                op.dim(),
                space.dim()
            )));
        }
        let scale = scale_of(op.rep());
        let unital = max_abs(&op.apply(&identity(op.dim()))) / scale;
        if unital > FIXED_POINT_TOL {
            return Err(Error::Contract(format!("ℒ(I) ≠ 0 (residual {unital:e})")));
        }
        let stat = max_abs(&op.adjoint().apply(space.sigma().matrix())) / scale;
        if stat > FIXED_POINT_TOL {
            return Err(Error::Contract(format!("ℒ*(σ) ≠ 0 (residual {stat:e})")));
        }
        let kernel = kernel_dimension(&op);
        if kernel != 1 {
            return Err(Error::Contract(format!(
                "generator is not primitive: kernel dimension {kernel}"
            )));
        }
        let reversible = reversible_residual(&op, &space) <= REVERSIBLE_TOL;
        let strongly_reversible = strong_residual(&op, &space) <= REVERSIBLE_TOL;
        Ok(LindbladGenerator {
            op,
            space,
            kind,
            factor_dims,
            reversible,
            strongly_reversible,
            params,
            caches: Arc::new(Caches::default()),
        })
    }

    /// Generator from an explicit `d² × d²` representation.
    pub fn custom(sigma: Density, rep: CMatrix) -> Result<Self> {
        let d = sigma.dim();
        let op = Superoperator::from_rep(d, rep)?;
        Self::build(op, sigma, GeneratorKind::Custom, vec![d], serde_json::Value::Null)
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn superoperator(&self) -> &Superoperator {
        &self.op
    }

    pub fn rep(&self) -> &CMatrix {
        self.op.rep()
    }

    pub fn space(&self) -> &WeightedSpace {
        &self.space
    }

    pub fn sigma(&self) -> &Density {
        self.space.sigma()
    }

    /// Local dimensions of the tensor factors (a single entry unless built by
    /// [`tensor_sum`]).
    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn params(&self) -> &serde_json::Value {
        &self.params
    }

    pub fn is_reversible(&self) -> bool {
        self.reversible
    }

    pub fn is_strongly_reversible(&self) -> bool {
        self.strongly_reversible
    }

    /// `ℒ(X)`.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        self.op.apply(x)
    }

    pub fn require_reversible(&self) -> Result<()> {
        if !self.reversible {
            return Err(Error::Contract("generator is not σ-reversible".into()));
        }
        Ok(())
    }

    pub fn require_strongly_reversible(&self) -> Result<()> {
        if !self.strongly_reversible {
            return Err(Error::Contract("generator is not strongly σ-reversible".into()));
        }
        Ok(())
    }

    fn symmetric(&self) -> Result<&SymmetricForm> {
        self.require_reversible()?;
        let r = self.caches.symmetric.get_or_init(|| {
            let g_half = gram_sigma(&self.space, 0.25);
            let g_half_inv = gram_sigma(&self.space, -0.25);
            let h = &g_half * self.rep() * &g_half_inv;
            let h = (&h + h.adjoint()) * c64(0.5, 0.0);
            eigh_superop(&h)
                .map(|eig| SymmetricForm { eig, g_half, g_half_inv })
                .map_err(|e| e.to_string())
        });
        r.as_ref().map_err(|e| Error::Decomposition(e.clone()))
    }

    /// Eigenvalues of ℒ in ascending order (reversible generators only).
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        Ok(self.symmetric()?.eig.values.iter().copied().collect())
    }

    /// Representation of `Φ_t = e^{-tℒ}`, cached per `t`.
    pub fn propagator(&self, t: f64) -> Result<Arc<CMatrix>> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Parameter(format!("time {t} must be finite and non-negative")));
        }
        if let Some(p) = self.caches.propagators.lock().expect("cache lock").get(&t.to_bits()) {
            return Ok(p.clone());
        }
        let p = if self.reversible {
            let s = self.symmetric()?;
            let decay = s.eig.map(|x| (-t * x).exp());
            &s.g_half_inv * decay * &s.g_half
        } else {
            (self.rep() * c64(-t, 0.0)).exp()
        };
        let p = Arc::new(p);
        let mut cache = self.caches.propagators.lock().expect("cache lock");
        if cache.len() > 256 {
            cache.clear();
        }
        cache.insert(t.to_bits(), p.clone());
        Ok(p)
    }

    pub fn generator_doc(&self) -> GeneratorDoc {
        GeneratorDoc {
            kind: self.kind,
            sigma: MatrixDoc::from_matrix(self.sigma().matrix()),
            params: self.params.clone(),
            rep: (self.kind == GeneratorKind::Custom).then(|| rep_doc(self.rep())),
        }
    }
}

/// Number of singular values of the representation below the kernel
/// threshold.
pub fn kernel_dimension(op: &Superoperator) -> usize {
    let sv = op.rep().clone().svd(false, false).singular_values;
    let top = sv.iter().copied().fold(0.0_f64, f64::max).max(1.0);
    sv.iter().filter(|&&s| s < KERNEL_TOL * top).count()
}

/// Simple (generalized depolarizing) generator `ℒ(X) = X − tr(σX) I`.
pub fn simple_generator(sigma: &Density) -> Result<LindbladGenerator> {
    sigma.require_definite("σ")?;
    let d = sigma.dim();
    let s = sigma.matrix().clone();
    let op = Superoperator::from_fn(d, |x| {
        let tr = operator::trace_product(&s, x);
        x - identity(d) * tr
    });
    LindbladGenerator::build(
        op,
        sigma.clone(),
        GeneratorKind::Simple,
        vec![d],
        serde_json::json!({}),
    )
}

/// Qubit generator with jumps between the eigenvectors of σ and dephasing in
/// that basis.
///
/// With `σ = s₀|0⟩⟨0| + s₁|1⟩⟨1|`, the jump `|1⟩⟨0|` has rate `γ₁₀`, the jump
/// `|0⟩⟨1|` has the balanced rate `γ₀₁ = γ₁₀ s₀/s₁`, and `Z` has rate
/// `dephase`. The spectral gap is `min(γ₀₁ + γ₁₀, (γ₀₁ + γ₁₀)/2 + 2·dephase)`.
pub fn davies_qubit_generator(
    sigma: &Density,
    gamma10: f64,
    dephase: f64,
) -> Result<LindbladGenerator> {
    sigma.require_definite("σ")?;
    if sigma.dim() != 2 {
        return Err(Error::Parameter(format!(
            "Davies qubit generator needs a qubit state, got dimension {}",
            sigma.dim()
        )));
    }
    if !(gamma10 >= 0.0 && gamma10.is_finite()) || !(dephase >= 0.0 && dephase.is_finite()) {
        return Err(Error::Parameter(format!(
            "rates must be finite and non-negative (γ₁₀ = {gamma10}, dephase = {dephase})"
        )));
    }
    let e = sigma.eigen();
    let (s0, s1) = (e.values[0], e.values[1]);
    let gamma01 = gamma10 * s0 / s1;
    let v = &e.vectors;
    let ket = |i: usize| v.column(i).into_owned();
    let lower = &ket(0) * ket(1).adjoint();
    let raise = &ket(1) * ket(0).adjoint();
    let z = &ket(0) * ket(0).adjoint() - &ket(1) * ket(1).adjoint();
    let op = gkls_generator(2, &[(lower, gamma01), (raise, gamma10), (z, dephase)]);
    LindbladGenerator::build(
        op,
        sigma.clone(),
        GeneratorKind::Davies,
        vec![2],
        serde_json::json!({ "gamma10": gamma10, "gamma01": gamma01, "dephase": dephase }),
    )
}

/// Expected spectral gap of [`davies_qubit_generator`].
pub fn davies_qubit_gap(sigma: &Density, gamma10: f64, dephase: f64) -> f64 {
    let e = sigma.eigen();
    let total = gamma10 * (1.0 + e.values[0] / e.values[1]);
    total.min(total / 2.0 + 2.0 * dephase)
}

/// Embeds a generator acting on factor `which` of a product space.
fn embed(rep: &CMatrix, dims: &[usize], which: usize) -> CMatrix {
    let total: usize = dims.iter().product();
    let n = total * total;
    let d = dims[which];
    let stride: usize = dims[which + 1..].iter().product();
    let mut out = CMatrix::zeros(n, n);
    for c in 0..total {
        let ci = (c / stride) % d;
        for r in 0..total {
            let ri = (r / stride) % d;
            let row = r + c * total;
            let local_row = ri + ci * d;
            for b in 0..d {
                let c2 = c + b * stride - ci * stride;
                for a in 0..d {
                    let v = rep[(local_row, a + b * d)];
                    if v == c64(0.0, 0.0) {
                        continue;
                    }
                    let r2 = r + a * stride - ri * stride;
                    out[(row, r2 + c2 * total)] += v;
                }
            }
        }
    }
    out
}

/// `𝒦_n = Σ_i I^{⊗(i−1)} ⊗ ℒ_i ⊗ I^{⊗(n−i)}` with stationary state `⊗_i σ_i`.
pub fn tensor_sum(gens: &[LindbladGenerator]) -> Result<LindbladGenerator> {
    if gens.is_empty() {
        return Err(Error::Parameter("tensor sum of an empty list".into()));
    }
    if gens.len() == 1 {
        return Ok(gens[0].clone());
    }
    let dims: Vec<usize> = gens.iter().flat_map(|g| g.factor_dims().to_vec()).collect();
    let blocks: Vec<usize> = gens.iter().map(|g| g.dim()).collect();
    let total = blocks.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
    let total = match total {
        Some(t) if t <= MAX_DIM => t,
        _ => {
            return Err(Error::Resource(format!(
                "tensor sum dimension {blocks:?} exceeds {MAX_DIM}"
            )))
        }
    };
    let mut rep = CMatrix::zeros(total * total, total * total);
    for (i, g) in gens.iter().enumerate() {
        rep += embed(g.rep(), &blocks, i);
    }
    let sigma = Density::new(operator::kron_all(
        &gens.iter().map(|g| g.sigma().matrix().clone()).collect::<Vec<_>>(),
    ))?;
    let params = serde_json::json!({
        "factors": gens.iter().map(|g| serde_json::to_value(g.generator_doc()).unwrap_or_default()).collect::<Vec<_>>()
    });
    LindbladGenerator::build(
        Superoperator::from_rep(total, rep)?,
        sigma,
        GeneratorKind::TensorSum,
        dims,
        params,
    )
}

/// `n`-fold tensor sum of copies of `gen`.
pub fn tensor_power(gen: &LindbladGenerator, n: usize) -> Result<LindbladGenerator> {
    tensor_sum(&vec![gen.clone(); n])
}

/// `Φ_t(X)`.
pub fn evolve(l: &LindbladGenerator, t: f64, x: &CMatrix) -> Result<CMatrix> {
    l.space().check(x, "X")?;
    let p = l.propagator(t)?;
    Ok(unvec(&(p.as_ref() * vec_of(x)), l.dim()))
}

/// Hilbert-Schmidt adjoint `ℒ*` (the Schrödinger-picture generator).
pub fn adjoint_generator(l: &LindbladGenerator) -> Superoperator {
    l.superoperator().adjoint()
}

/// `Γ_σ ∘ ℒ ∘ Γ_σ^{-1} = ℒ*` up to relative tolerance `1e-8`.
pub fn check_reversible(op: &Superoperator, w: &WeightedSpace) -> bool {
    op.dim() == w.dim() && reversible_residual(op, w) <= REVERSIBLE_TOL
}

/// Self-adjointness of ℒ under `⟨X, Y⟩_{1,σ} = tr(σX†Y)`.
pub fn check_strongly_reversible(op: &Superoperator, w: &WeightedSpace) -> bool {
    op.dim() == w.dim() && strong_residual(op, w) <= REVERSIBLE_TOL
}

/// `‖ℒ∘Δ_σ − Δ_σ∘ℒ‖` with `Δ_σ(X) = σXσ^{-1}`, relative to `‖ℒ‖`.
pub fn modular_commutator(l: &LindbladGenerator) -> f64 {
    let s = l.sigma().matrix();
    let s_inv = l.space().sigma_pow(-1.0);
    let delta = sandwich(s, &s_inv);
    let r = l.rep();
    max_abs_diff(&(r * &delta), &(&delta * r)) / scale_of(r)
}

/// Smallest non-zero eigenvalue of a primitive reversible generator.
pub fn spectral_gap(l: &LindbladGenerator) -> Result<f64> {
    let spec = l.spectrum()?;
    if spec.len() < 2 {
        return Err(Error::Contract("generator on a one-dimensional space has no gap".into()));
    }
    let top = spec.iter().fold(0.0_f64, |a, &b| a.max(b.abs())).max(1.0);
    let small = spec.iter().filter(|&&x| x.abs() < KERNEL_TOL * top).count();
    if small != 1 {
        return Err(Error::Contract(format!(
            "generator is not primitive: {small} eigenvalues near zero"
        )));
    }
    Ok(spec[1])
}

/// Kraus operator `R_k` with modular weight `ω_k`: `σ R_k = ω_k R_k σ`.
#[derive(Debug, Clone)]
pub struct KrausPair {
    pub r: CMatrix,
    pub omega: f64,
}

/// Choi matrix `J = Σ_{ij} Φ_t(|i⟩⟨j|) ⊗ |i⟩⟨j|`.
pub fn choi_matrix(l: &LindbladGenerator, t: f64) -> Result<CMatrix> {
    let d = l.dim();
    let p = l.propagator(t)?;
    let mut j = CMatrix::zeros(d * d, d * d);
    for jj in 0..d {
        for ii in 0..d {
            let col = p.column(ii + jj * d);
            for b in 0..d {
                for a in 0..d {
                    j[(a * d + ii, b * d + jj)] = col[a + b * d];
                }
            }
        }
    }
    Ok(j)
}

/// Kraus decomposition `Φ_t(X) = Σ_k R_k X R_k†` whose operators are
/// eigenvectors of the modular operator.
///
/// `J` commutes with `S = σ^{-1} ⊗ σᵀ`, whose eigenvectors are `u_a ⊗ ū_b`
/// with eigenvalue `s_b/s_a`. `J` is diagonalized inside each eigenspace of
/// `S`, which resolves degenerate joint eigenspaces.
pub fn choi_kraus_decomposition(l: &LindbladGenerator, t: f64) -> Result<Vec<KrausPair>> {
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("time {t} must be positive")));
    }
    l.require_strongly_reversible()?;
    let d = l.dim();
    let j = choi_matrix(l, t)?;
    let s_inv = l.space().sigma_pow(-1.0);
    let s_mat = kron(&s_inv, &l.sigma().matrix().transpose());
    let comm = max_abs_diff(&(&j * &s_mat), &(&s_mat * &j)) / (max_abs(&j) * max_abs(&s_mat));
    if comm > CHOI_COMMUTATOR_TOL {
        return Err(Error::Contract(format!(
            "Choi matrix does not commute with σ^-1 ⊗ σᵀ (residual {comm:e})"
        )));
    }
    let e = l.sigma().eigen();
    let mut pairs: Vec<(usize, usize, f64)> = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            pairs.push((a, b, e.values[a] / e.values[b]));
        }
    }
    pairs.sort_by(|x, y| x.2.total_cmp(&y.2));
    let mut groups: Vec<Vec<(usize, usize, f64)>> = Vec::new();
    for p in pairs {
        match groups.last_mut() {
            Some(g) if (p.2 - g[0].2).abs() <= 1e-9 * g[0].2.max(1.0) => g.push(p),
            _ => groups.push(vec![p]),
        }
    }
    let jmax = max_abs(&j).max(1.0);
    let mut out = Vec::new();
    for g in groups {
        let m = g.len();
        let mut basis = CMatrix::zeros(d * d, m);
        for (k, &(a, b, _)) in g.iter().enumerate() {
            for i in 0..d {
                for jj in 0..d {
                    basis[(i * d + jj, k)] = e.vectors[(i, a)] * e.vectors[(jj, b)].conj();
                }
            }
        }
        let block = basis.adjoint() * &j * &basis;
        let be = eigh_superop(&block)?;
        let omega = g.iter().map(|p| p.2).sum::<f64>() / m as f64;
        for k in 0..m {
            let lam = be.values[k];
            if lam < -1e-9 * jmax {
                return Err(Error::Contract(format!(
                    "Choi matrix has negative eigenvalue {lam:e}: Φ_t is not completely positive"
                )));
            }
            if lam <= 1e-14 * jmax {
                continue;
            }
            let v = &basis * be.vectors.column(k);
            let r = CMatrix::from_fn(d, d, |row, col| v[row * d + col] * lam.sqrt());
            out.push(KrausPair { r, omega });
        }
    }
    Ok(out)
}

/// Residuals of the Kraus structure: commutation weights, completeness and
/// reconstruction of `Φ_t` on `probes`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausResiduals {
    pub commutation: f64,
    pub completeness: f64,
    pub reconstruction: f64,
}

pub fn kraus_residuals(
    l: &LindbladGenerator,
    t: f64,
    pairs: &[KrausPair],
    probes: &[CMatrix],
) -> Result<KrausResiduals> {
    let d = l.dim();
    let s = l.sigma().matrix();
    let mut commutation = 0.0_f64;
    let mut sum = CMatrix::zeros(d, d);
    for k in pairs {
        let lhs = s * &k.r;
        let rhs = &k.r * s * c64(k.omega, 0.0);
        commutation = commutation.max(max_abs_diff(&lhs, &rhs));
        sum += &k.r * k.r.adjoint();
    }
    let completeness = max_abs_diff(&sum, &identity(d));
    let mut reconstruction = 0.0_f64;
    for x in probes {
        let mut y = CMatrix::zeros(d, d);
        for k in pairs {
            y += &k.r * x * k.r.adjoint();
        }
        reconstruction = reconstruction.max(max_abs_diff(&y, &evolve(l, t, x)?));
    }
    Ok(KrausResiduals { commutation, completeness, reconstruction })
}

/// Smallest eigenvalue of the Choi matrix of `Φ_t`, relative to its largest.
pub fn choi_min_eigenvalue(l: &LindbladGenerator, t: f64) -> Result<f64> {
    let j = choi_matrix(l, t)?;
    let e = eigh_superop(&j)?;
    Ok(e.min() / e.max().abs().max(1e-300))
}

/// Minimum contractivity margin over sampled definite `X` and `t ∈ t_grid`.
///
/// For `p ≥ 1` the margin is `‖X‖_p − ‖Φ_t X‖_p`; for `p < 1` it is
/// `‖Φ_t X‖_p − ‖X‖_p`. Both are non-negative for contractive semigroups.
pub fn contractivity_check(
    l: &LindbladGenerator,
    p: f64,
    t_grid: &[f64],
    sample_count: usize,
    seed: u64,
) -> Result<BatchMin> {
    let w = l.space();
    for &t in t_grid {
        l.propagator(t)?;
    }
    batch_min(sample_count, seed, |rng, _| {
        let x = random::sample_definite_with(rng, l.dim());
        let nx = weighted_norm(w, x.matrix(), p)?;
        let mut worst = f64::INFINITY;
        for &t in t_grid {
            let y = evolve(l, t, x.matrix())?;
            let ny = weighted_norm(w, &y, p)?;
            let m = if p >= 1.0 { nx - ny } else { ny - nx };
            worst = worst.min(m / nx.max(1.0));
        }
        Ok(worst)
    })
}

/// Generator JSON document.
///
/// `{"kind": "simple" | "davies" | "tensor_sum" | "custom", "sigma": <matrix>,
/// "params": {...}, "rep": <matrix, custom only>}`. Davies parameters are
/// `gamma10` and `dephase`; tensor sums list `factors` as nested documents.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorDoc {
    pub kind: GeneratorKind,
    pub sigma: MatrixDoc,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep: Option<MatrixDoc>,
}

fn rep_doc(rep: &CMatrix) -> MatrixDoc {
    MatrixDoc::from_matrix(rep)
}

fn param_f64(params: &serde_json::Value, key: &str) -> Result<f64> {
    params
        .get(key)
        .and_then(|v| v.as_f64())
        .ok_or_else(|| Error::Document(format!("missing numeric parameter \"{key}\"")))
}

impl GeneratorDoc {
    pub fn build(&self) -> Result<LindbladGenerator> {
        let sigma = Density::new(self.sigma.to_matrix()?)?;
        match self.kind {
            GeneratorKind::Simple => simple_generator(&sigma),
            GeneratorKind::Davies => {
                let g = param_f64(&self.params, "gamma10")?;
                let k = self.params.get("dephase").and_then(|v| v.as_f64()).unwrap_or(0.0);
                davies_qubit_generator(&sigma, g, k)
            }
            GeneratorKind::TensorSum => {
                let factors = self
                    .params
                    .get("factors")
                    .and_then(|v| v.as_array())
                    .ok_or_else(|| Error::Document("tensor_sum needs \"factors\"".into()))?;
                let gens = factors
                    .iter()
                    .map(|f| serde_json::from_value::<GeneratorDoc>(f.clone())?.build())
                    .collect::<Result<Vec<_>>>()?;
                tensor_sum(&gens)
            }
            GeneratorKind::Custom => {
                let rep = self
                    .rep
                    .as_ref()
                    .ok_or_else(|| Error::Document("custom generator needs \"rep\"".into()))?;
                LindbladGenerator::custom(sigma, rep.to_matrix_limited(MAX_DIM * MAX_DIM)?)
            }
        }
    }

    pub fn parse(text: &str) -> Result<LindbladGenerator> {
        let doc: GeneratorDoc = serde_json::from_str(text)?;
        doc.build()
    }
}
