//! Commutative reference implementations written from scratch on plain
//! slices, used as oracles for diagonal inputs.

#![allow(dead_code)]

pub mod classical {
    /// `(Σ π_i |f_i|^p)^{1/p}`.
    pub fn norm(pi: &[f64], f: &[f64], p: f64) -> f64 {
        pi.iter().zip(f).map(|(w, x)| w * x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }

    /// `E[|f|^p log |f|^p] − E|f|^p log E|f|^p`.
    pub fn ent(pi: &[f64], f: &[f64], p: f64) -> f64 {
        let fp: Vec<f64> = f.iter().map(|x| x.abs().powf(p)).collect();
        let n: f64 = pi.iter().zip(&fp).map(|(w, y)| w * y).sum();
        let s: f64 = pi.iter().zip(&fp).map(|(w, y)| w * y * y.ln()).sum();
        s - n * n.ln()
    }

    pub fn mean(pi: &[f64], f: &[f64]) -> f64 {
        pi.iter().zip(f).map(|(w, x)| w * x).sum()
    }

    /// `T_t f = e^{−t} f + (1 − e^{−t}) E_π f`.
    pub fn simple_semigroup(pi: &[f64], f: &[f64], t: f64) -> Vec<f64> {
        let m = mean(pi, f);
        f.iter().map(|x| (-t).exp() * x + (1.0 - (-t).exp()) * m).collect()
    }

    /// `(p p̂ / 4) E[f^{p−1} (f − E f)]` for the simple generator `f − E f`;
    /// at `p = 1` the limit `¼ E[(f − E f) log f]`.
    pub fn simple_dirichlet(pi: &[f64], f: &[f64], p: f64) -> f64 {
        let m = mean(pi, f);
        if p == 1.0 {
            return pi.iter().zip(f).map(|(w, x)| w * (x - m) * x.ln()).sum::<f64>() / 4.0;
        }
        let hat = p / (p - 1.0);
        let pair: f64 = pi.iter().zip(f).map(|(w, x)| w * x.powf(p - 1.0) * (x - m)).sum();
        p * hat / 4.0 * pair
    }

    pub fn relative_entropy(p: &[f64], q: &[f64]) -> f64 {
        p.iter().zip(q).filter(|(a, _)| **a > 0.0).map(|(a, b)| a * (a / b).ln()).sum()
    }

    /// `max_x P(x)/Q(x)`.
    pub fn gamma(p: &[f64], q: &[f64]) -> f64 {
        p.iter().zip(q).map(|(a, b)| a / b).fold(0.0, f64::max)
    }

    fn product(p: &[f64], n: usize) -> Vec<f64> {
        let mut out = vec![1.0];
        for _ in 0..n {
            out = out.iter().flat_map(|a| p.iter().map(move |b| a * b)).collect();
        }
        out
    }

    /// Optimal type-II error with type-I error at most `eps`: outcomes are
    /// accepted in decreasing likelihood-ratio order, the last one partially.
    pub fn np_beta(p: &[f64], q: &[f64], n: usize, eps: f64) -> f64 {
        let pn = product(p, n);
        let qn = product(q, n);
        let mut idx: Vec<usize> = (0..pn.len()).collect();
        idx.sort_by(|&a, &b| (pn[b] * qn[a]).total_cmp(&(pn[a] * qn[b])));
        let need = 1.0 - eps;
        let mut got = 0.0;
        let mut beta = 0.0;
        for i in idx {
            if got >= need {
                break;
            }
            let take = ((need - got) / pn[i]).min(1.0);
            got += take * pn[i];
            beta += take * qn[i];
        }
        beta
    }

    /// `(1−ε) exp(−nD(P‖Q) − 2√(n γ log(1/(1−ε))))`.
    pub fn strong_converse_bound(p: &[f64], q: &[f64], n: usize, eps: f64) -> f64 {
        let n = n as f64;
        (1.0 - eps)
            * (-n * relative_entropy(p, q) - 2.0 * (n * gamma(p, q) * (1.0 / (1.0 - eps)).ln()).sqrt()).exp()
    }

    /// Two-point log-Sobolev constant `(1−2s)/log(1/s − 1)`.
    pub fn alpha2_two_point(s: f64) -> f64 {
        (1.0 - 2.0 * s) / (1.0 / s - 1.0).ln()
    }

    /// `W(y|x)` for codeword `x` of a memoryless channel with rows `w[a]`.
    pub fn codeword_law(w: &[Vec<f64>], x: &[usize]) -> Vec<f64> {
        let mut out = vec![1.0];
        for &a in x {
            out = out.iter().flat_map(|u| w[a].iter().map(move |v| u * v)).collect();
        }
        out
    }

    /// `I(M; Y)` for uniform messages sent through codewords.
    pub fn code_information(w: &[Vec<f64>], codewords: &[Vec<usize>]) -> f64 {
        let laws: Vec<Vec<f64>> = codewords.iter().map(|c| codeword_law(w, c)).collect();
        let m = laws.len() as f64;
        let out: Vec<f64> = (0..laws[0].len()).map(|y| laws.iter().map(|l| l[y]).sum::<f64>() / m).collect();
        laws.iter().map(|l| relative_entropy(l, &out)).sum::<f64>() / m
    }

    /// Largest message error under the pretty good measurement
    /// `E_m(y) = W(y|x_m) / Σ_k W(y|x_k)`.
    pub fn pgm_max_error(w: &[Vec<f64>], codewords: &[Vec<usize>]) -> f64 {
        let laws: Vec<Vec<f64>> = codewords.iter().map(|c| codeword_law(w, c)).collect();
        let tot: Vec<f64> = (0..laws[0].len()).map(|y| laws.iter().map(|l| l[y]).sum()).collect();
        laws.iter()
            .enumerate()
            .map(|(m, l)| {
                let ok: f64 = (0..l.len())
                    .map(|y| {
                        if tot[y] > 0.0 {
                            l[y] * l[y] / tot[y]
                        } else if m == 0 {
                            l[y]
                        } else {
                            0.0
                        }
                    })
                    .sum();
                1.0 - ok
            })
            .fold(0.0, f64::max)
    }
}
