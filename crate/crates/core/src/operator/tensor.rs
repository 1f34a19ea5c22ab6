use super::{check_square, CMatrix, C64};
use crate::error::{Error, Result};

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `A_1 ⊗ A_2 ⊗ ... ⊗ A_n`.
pub fn kron_all(factors: &[CMatrix]) -> CMatrix {
    let mut it = factors.iter();
    let first = it.next().expect("kron_all needs at least one factor").clone();
    it.fold(first, |acc, f| acc.kronecker(f))
}

/// Mixed-radix digits of `index` for subsystem dimensions `dims`
/// (first subsystem most significant).
pub(crate) fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

pub(crate) fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

/// Partial trace of `x` over every subsystem not listed in `keep`.
/// Kept subsystems appear in ascending order in the result.
pub fn partial_trace(x: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let dim = check_square(x, "partial trace input")?;
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != dim {
        return Err(Error::Dimension(format!(
            "subsystem dimensions {dims:?} do not multiply to {dim}"
        )));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&k) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::Dimension(format!(
            "subsystem {k} out of range for {} subsystems",
            dims.len()
        )));
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();

    let mut out = CMatrix::from_element(out_dim, out_dim, C64::new(0.0, 0.0));
    let mut rd = vec![0; dims.len()];
    let mut cd = vec![0; dims.len()];
    let mut rk = vec![0; keep.len()];
    let mut ck = vec![0; keep.len()];
    for r in 0..dim {
        digits(r, dims, &mut rd);
        for c in 0..dim {
            digits(c, dims, &mut cd);
            if traced.iter().any(|&t| rd[t] != cd[t]) {
                continue;
            }
            for (slot, &k) in keep.iter().enumerate() {
                rk[slot] = rd[k];
                ck[slot] = cd[k];
            }
            let (i, j) = (compose(&rk, &kept_dims), compose(&ck, &kept_dims));
            out[(i, j)] += x[(r, c)];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{identity, max_abs_diff, random};

    #[test]
    fn kron_of_identities() {
        assert!(max_abs_diff(&kron(&identity(2), &identity(2)), &identity(4)) == 0.0);
    }

    #[test]
    fn partial_trace_of_product() {
        let rho = random::density(2, 1, 0.1).unwrap();
        let tau = random::positive_definite(3, 2, 0.1).unwrap();
        let x = kron(rho.matrix(), tau.matrix());
        let a = partial_trace(&x, &[2, 3], &[0]).unwrap();
        let expected = rho.matrix() * tau.matrix().trace();
        assert!(max_abs_diff(&a, &expected) < 1e-12);
        let b = partial_trace(&x, &[2, 3], &[1]).unwrap();
        assert!(max_abs_diff(&b, tau.matrix()) < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let x = random::hermitian(6, 9).into_matrix();
        for keep in [[0usize].as_slice(), &[1], &[0, 1], &[]] {
            let r = partial_trace(&x, &[2, 3], keep).unwrap();
            assert!((r.trace() - x.trace()).norm() <= 1e-12);
        }
    }

    #[test]
    fn partial_trace_matches_direct_summation() {
        // direct double-loop oracle for a 2x3 system, tracing out the qubit
        let x = random::hermitian(6, 13).into_matrix();
        let mut oracle = CMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                for a in 0..2 {
                    oracle[(i, j)] += x[(a * 3 + i, a * 3 + j)];
                }
            }
        }
        let got = partial_trace(&x, &[2, 3], &[1]).unwrap();
        assert!(max_abs_diff(&got, &oracle) < 1e-14);
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let x = identity(6);
        assert!(matches!(
            partial_trace(&x, &[2, 2], &[0]),
            Err(Error::Dimension(_))
        ));
    }
}
