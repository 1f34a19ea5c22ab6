//! Dense complex Hermitian linear algebra used by every other module.
//!
//! All matrices are dense `nalgebra` matrices over `Complex<f64>`. Hermitian
//! inputs are symmetrized on construction, and positive operators clip
//! eigenvalues in `[-1e-10, 0)` to zero so that fractional powers downstream
//! never see tiny negative eigenvalues. Logarithms are natural throughout.

mod json;
pub mod random;
mod tensor;

pub use json::MatrixDoc;
pub use tensor::{kron, kron_all, partial_trace};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Largest Hilbert-space dimension handled anywhere in the crate.
pub const MAX_DIM: usize = 64;
/// Largest side of a dense superoperator or Choi matrix that is decomposed,
/// i.e. Hilbert-space dimension up to 32.
pub const MAX_SUPEROP_DIM: usize = 1024;
/// Hermiticity residual accepted after symmetrization.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues within this distance below zero are clipped to zero.
pub const CLIP_TOL: f64 = 1e-10;
/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-10;

const EIG_EPS: f64 = 1e-15;
const EIG_MAX_ITER: usize = 10_000;

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| c64(v, 0.0)),
    ))
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// `tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub(crate) fn check_square(m: &CMatrix, what: &str) -> Result<usize> {
    check_square_limited(m, what, MAX_DIM)
}

fn check_square_limited(m: &CMatrix, what: &str, limit: usize) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "{what} is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Err(Error::Dimension(format!("{what} has dimension 0")));
    }
    if m.nrows() > limit {
        return Err(Error::Resource(format!(
            "{what} has dimension {} > {limit}",
            m.nrows()
        )));
    }
    Ok(m.nrows())
}

pub(crate) fn check_same_dim(a: &CMatrix, b: &CMatrix, what: &str) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!(
            "{what}: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}

/// Spectral decomposition `M = V diag(values) V†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    /// `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        self.map_complex(|x| c64(f(x), 0.0))
    }

    pub fn map_complex(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let fj = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// `V diag(values) V†` for replacement eigenvalues.
    pub fn with_values(&self, values: &[f64]) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            for i in 0..n {
                scaled[(i, j)] *= values[j];
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|x| x)
    }
}

/// Eigendecomposition of a (numerically) Hermitian matrix. The input is
/// symmetrized before decomposition.
pub fn eigh(m: &CMatrix) -> Result<Eigen> {
    eigh_limited(m, MAX_DIM)
}

/// [`eigh`] for superoperator-sized matrices up to [`MAX_SUPEROP_DIM`].
pub(crate) fn eigh_superop(m: &CMatrix) -> Result<Eigen> {
    eigh_limited(m, MAX_SUPEROP_DIM)
}

fn eigh_limited(m: &CMatrix, limit: usize) -> Result<Eigen> {
    let dim = check_square_limited(m, "matrix", limit)?;
    let sym = (m + m.adjoint()) * c64(0.5, 0.0);
    let decomposition = nalgebra::linalg::SymmetricEigen::try_new(sym, EIG_EPS, EIG_MAX_ITER)
        .ok_or_else(|| {
            Error::Decomposition(format!(
                "Hermitian eigensolver did not converge: dim {dim}, frobenius norm {:.3e}, max entry {:.3e}, hermiticity residual {:.3e}",
                m.norm(),
                max_abs(m),
                hermiticity_residual(m)
            ))
        })?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| decomposition.eigenvalues[a].total_cmp(&decomposition.eigenvalues[b]));
    let values = DVector::from_iterator(dim, order.iter().map(|&k| decomposition.eigenvalues[k]));
    let mut vectors = CMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &decomposition.eigenvectors.column(src));
    }
    Ok(Eigen { values, vectors })
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.
pub fn eigvalsh_jacobi(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(eigh_jacobi(m)?.values.iter().copied().collect())
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations,
/// ascending.
///
/// Off-diagonal entries are annihilated until `|a_ij| ≤ ε·√|a_ii a_jj|`, so
/// for definite matrices of the form `DAD` with diagonal `D` the eigenvalues
/// carry relative accuracy governed by `A` rather than by the spread of `D`.
/// Slower than [`eigh`]; meant for small, strongly graded inputs.
pub fn eigh_jacobi(m: &CMatrix) -> Result<Eigen> {
    let n = check_square(m, "matrix")?;
    let mut a = (m + m.adjoint()) * c64(0.5, 0.0);
    let mut vecs = identity(n);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                if r == 0.0 || r <= f64::EPSILON * (app * aqq).abs().sqrt() {
                    continue;
                }
                rotated = true;
                let phase = apq / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                // V = [[c, s], [−s·ph̄, c·ph̄]] with ph = a_pq/|a_pq|; A ← V†AV.
                let v = [[c64(c, 0.0), c64(s, 0.0)], [-phase.conj() * s, phase.conj() * c]];
                for k in 0..n {
                    let (x, y) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = x * v[0][0] + y * v[1][0];
                    a[(k, q)] = x * v[0][1] + y * v[1][1];
                    let (x, y) = (vecs[(k, p)], vecs[(k, q)]);
                    vecs[(k, p)] = x * v[0][0] + y * v[1][0];
                    vecs[(k, q)] = x * v[0][1] + y * v[1][1];
                }
                for k in 0..n {
                    let (x, y) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = v[0][0].conj() * x + v[1][0].conj() * y;
                    a[(q, k)] = v[0][1].conj() * x + v[1][1].conj() * y;
                }
                a[(p, q)] = c64(0.0, 0.0);
                a[(q, p)] = c64(0.0, 0.0);
            }
        }
        if !rotated {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
            let values = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)].re));
            let vectors = CMatrix::from_fn(n, n, |r, c| vecs[(r, order[c])]);
            return Ok(Eigen { values, vectors });
        }
    }
    Err(Error::Decomposition(format!("Jacobi eigenvalue iteration did not converge (dim {n})")))
}

/// Applies `f` to the spectrum of a Hermitian matrix. Non-finite results are
/// reported as a domain error naming the offending eigenvalue.
pub fn hermitian_fn(m: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let e = eigh(m)?;
    apply_checked(&e, f)
}

fn apply_checked(e: &Eigen, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let mut mapped = Vec::with_capacity(e.values.len());
    for &x in e.values.iter() {
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::Domain(format!(
                "matrix function undefined at eigenvalue {x:e}"
            )));
        }
        mapped.push(y);
    }
    Ok(e.with_values(&mapped))
}

/// `|M| = (M† M)^{1/2}`.
pub fn abs(m: &CMatrix) -> Result<CMatrix> {
    hermitian_fn(&(m.adjoint() * m), |x| x.max(0.0).sqrt())
}

/// Self-adjoint operator. Construction symmetrizes `(M + M†)/2` and then
/// asserts the residual of the input was at most [`HERMITIAN_TOL`] relative
/// to its scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian(CMatrix);

impl Hermitian {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m, "Hermitian operator")?;
        let residual = hermiticity_residual(&m);
        if residual > HERMITIAN_TOL * max_abs(&m).max(1.0) {
            return Err(Error::Domain(format!(
                "matrix is not Hermitian (residual {residual:.3e})"
            )));
        }
        Ok(Hermitian((&m + m.adjoint()) * c64(0.5, 0.0)))
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        Self::new(diag(values))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn eig(&self) -> Result<Eigen> {
        eigh(&self.0)
    }
}

/// Positive semidefinite (or definite) operator with its cached spectrum.
#[derive(Debug, Clone)]
pub struct Positive {
    op: Hermitian,
    eig: Eigen,
    strict: bool,
}

impl Positive {
    /// Semidefinite operator; eigenvalues in `[-CLIP_TOL, 0)` are clipped.
    pub fn semidefinite(m: CMatrix) -> Result<Self> {
        Self::build(m, false)
    }

    /// Definite operator: every eigenvalue must be at least `CLIP_TOL`.
    pub fn definite(m: CMatrix) -> Result<Self> {
        Self::build(m, true)
    }

    fn build(m: CMatrix, strict: bool) -> Result<Self> {
        let herm = Hermitian::new(m)?;
        let mut eig = herm.eig()?;
        let min = eig.min();
        if min < -CLIP_TOL {
            return Err(Error::Domain(format!(
                "operator is not positive semidefinite (min eigenvalue {min:e})"
            )));
        }
        if strict && min < CLIP_TOL {
            return Err(Error::Domain(format!(
                "operator is not positive definite (min eigenvalue {min:e})"
            )));
        }
        let clipped = eig.values.iter().any(|&x| x < 0.0);
        if clipped {
            eig.values.iter_mut().for_each(|x| *x = x.max(0.0));
        }
        let op = if clipped {
            Hermitian(eig.reconstruct())
        } else {
            herm
        };
        let strict = strict || eig.min() >= CLIP_TOL;
        Ok(Positive { op, eig, strict })
    }

    pub fn is_definite(&self) -> bool {
        self.strict
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn hermitian(&self) -> &Hermitian {
        &self.op
    }

    pub fn eigen(&self) -> &Eigen {
        &self.eig
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig.min()
    }

    /// `A^s`. Negative exponents require a definite operator.
    pub fn pow(&self, s: f64) -> Result<CMatrix> {
        if s == 0.0 {
            return Ok(identity(self.dim()));
        }
        if s < 0.0 && !self.strict {
            return Err(Error::Domain(format!(
                "negative power {s} of a singular operator (min eigenvalue {:e})",
                self.eig.min()
            )));
        }
        Ok(self.eig.map(|x| if x == 0.0 { 0.0 } else { x.powf(s) }))
    }

    pub fn log(&self) -> Result<CMatrix> {
        apply_checked(&self.eig, f64::ln)
    }

    pub fn sqrt(&self) -> CMatrix {
        self.eig.map(f64::sqrt)
    }
}

/// `V diag(f(λ)) V†` for a positive operator, evaluated on the clipped
/// spectrum.
pub fn mat_fn(a: &Positive, f: impl Fn(f64) -> f64) -> Result<Hermitian> {
    Ok(Hermitian(apply_checked(&a.eig, f)?))
}

/// Unit-trace positive operator.
#[derive(Debug, Clone)]
pub struct Density(Positive);

impl Density {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::check(Positive::semidefinite(m)?)
    }

    /// Faithful state: all eigenvalues at least `CLIP_TOL`.
    pub fn definite(m: CMatrix) -> Result<Self> {
        Self::check(Positive::definite(m)?)
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        Self::new(diag(values))
    }

    fn check(p: Positive) -> Result<Self> {
        let tr = p.matrix().trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::Domain(format!("density matrix has trace {tr}")));
        }
        Ok(Density(p))
    }

    pub fn positive(&self) -> &Positive {
        &self.0
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn is_definite(&self) -> bool {
        self.0.is_definite()
    }

    pub fn eigen(&self) -> &Eigen {
        self.0.eigen()
    }

    pub fn require_definite(&self, what: &str) -> Result<()> {
        if !self.is_definite() {
            return Err(Error::Parameter(format!(
                "{what} must be faithful (min eigenvalue {:e})",
                self.0.min_eigenvalue()
            )));
        }
        Ok(())
    }

    /// `ρ ⊗ τ`.
    pub fn tensor(&self, other: &Density) -> Result<Density> {
        Density::new(kron(self.matrix(), other.matrix()))
    }

    /// `ρ^{⊗n}`.
    pub fn tensor_power(&self, n: usize) -> Result<Density> {
        let dim = self.dim().checked_pow(n as u32).unwrap_or(usize::MAX);
        if n == 0 || dim > MAX_DIM {
            return Err(Error::Resource(format!(
                "tensor power {n} of a {}-dimensional state",
                self.dim()
            )));
        }
        let mats = vec![self.matrix().clone(); n];
        Density::new(kron_all(&mats))
    }
}

/// Conjugates by the unitary `U`: `U M U†`.
pub fn conjugate(u: &CMatrix, m: &CMatrix) -> CMatrix {
    u * m * u.adjoint()
}

/// Real rotation `exp(-i θ Y)` on a qubit, i.e. `[[cos θ, -sin θ], [sin θ, cos θ]]`.
pub fn qubit_rotation(theta: f64) -> CMatrix {
    let (s, c) = theta.sin_cos();
    CMatrix::from_row_slice(2, 2, &[c64(c, 0.0), c64(-s, 0.0), c64(s, 0.0), c64(c, 0.0)])
}
