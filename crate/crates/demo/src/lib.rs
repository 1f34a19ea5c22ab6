//! wasm-bindgen entry points for the static page in `www/`.
//!
//! Every export returns a flat `Float64Array`; the layouts are documented
//! per function.

use wasm_bindgen::prelude::*;

use qlsi::converse::{beta_lower_bound, np_oracle, HypothesisInstance};
use qlsi::lsi::{alpha2_simple_exact, hc_check, hc_time_threshold, lsi_constant_estimate, reverse_hc_check, LsiOptions};
use qlsi::operator::{conjugate, qubit_rotation, Density};
use qlsi::semigroup::simple_generator;

fn js(e: qlsi::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn qubit(s: f64) -> qlsi::Result<Density> {
    Density::from_diagonal(&[s, 1.0 - s])
}

/// Pairs `[s, closed form, numerical estimate]` for each `s` in `s_values`
/// (smallest eigenvalue of σ, in `(0, ½]`).
#[wasm_bindgen]
pub fn alpha2_profile(s_values: &[f64], starts: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    let opts = LsiOptions { starts, seed, max_iter: 600, samples: 64, ..LsiOptions::default() };
    let mut out = Vec::with_capacity(3 * s_values.len());
    for &s in s_values {
        let sigma = qubit(s).map_err(js)?;
        let exact = alpha2_simple_exact(&sigma).map_err(js)?;
        let l = simple_generator(&sigma).map_err(js)?;
        let est = lsi_constant_estimate(&l, 2.0, &opts).map_err(js)?;
        out.extend([s, exact, est.value]);
    }
    Ok(out)
}

/// Triples `[n, β exact, lower bound]` for `n = 1..=n_max`. ρ has spectrum
/// `(r, 1−r)` in a basis rotated by `theta` against the eigenbasis of
/// σ = diag(s, 1−s).
#[wasm_bindgen]
pub fn qht_curve(r: f64, s: f64, theta: f64, eps: f64, n_max: usize) -> Result<Vec<f64>, JsError> {
    let u = qubit_rotation(theta);
    let rho = Density::new(conjugate(&u, qubit(r).map_err(js)?.matrix())).map_err(js)?;
    let base = HypothesisInstance::new(rho, qubit(s).map_err(js)?, 1).map_err(js)?;
    let mut out = Vec::with_capacity(3 * n_max);
    for n in 1..=n_max {
        let inst = base.with_n(n).map_err(js)?;
        let (beta, _) = np_oracle(&inst, eps).map_err(js)?;
        out.extend([n as f64, beta, beta_lower_bound(&inst, eps).map_err(js)?]);
    }
    Ok(out)
}

/// Pairs `[t/t*, worst margin]` for the simple qubit semigroup, where `t*` is
/// the threshold time for `(p, q)`. Forward pairs (`1 < q ≤ p`) use the
/// closed-form 2-log-Sobolev constant; reverse pairs (`p ≤ q < 1`) use ¼.
#[wasm_bindgen]
pub fn hc_margin_curve(
    s: f64,
    p: f64,
    q: f64,
    factors: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    let sigma = qubit(s).map_err(js)?;
    let l = simple_generator(&sigma).map_err(js)?;
    let forward = q >= 1.0;
    let alpha = if forward { alpha2_simple_exact(&sigma).map_err(js)? } else { 0.25 };
    let threshold = hc_time_threshold(alpha, p, q).map_err(js)?;
    let mut out = Vec::with_capacity(2 * factors.len());
    for &f in factors {
        let t = f * threshold;
        let m = if forward { hc_check(&l, p, q, t, samples, seed) } else { reverse_hc_check(&l, p, q, t, samples, seed) };
        out.extend([f, m.map_err(js)?.value]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_tracks_closed_form() {
        let v = alpha2_profile(&[0.2, 0.5], 4, 1).map_err(|_| ()).unwrap();
        for c in v.chunks(3) {
            assert!((c[1] - c[2]).abs() < 1e-3 * c[1], "{c:?}");
        }
    }

    #[test]
    fn qht_exact_dominates_bound() {
        let v = qht_curve(0.3, 0.2, 0.4, 0.1, 4).map_err(|_| ()).unwrap();
        assert_eq!(v.len(), 12);
        assert!(v.chunks(3).all(|c| c[1] >= c[2]));
    }

    #[test]
    fn hc_margin_nonnegative_past_threshold() {
        let v = hc_margin_curve(0.25, 4.0, 2.0, &[1.0, 1.5], 50, 3).map_err(|_| ()).unwrap();
        assert!(v.chunks(2).all(|c| c[1] >= -1e-9), "{v:?}");
        let v = hc_margin_curve(0.25, -1.0, 0.5, &[1.0], 50, 3).map_err(|_| ()).unwrap();
        assert!(v[1] >= -1e-9, "{v:?}");
    }
}
