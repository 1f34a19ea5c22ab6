use super::config::{ExperimentConfig, Suite};
use super::report::ReportRow;
use crate::converse::{
    beta_lower_bound, cq_converse_check, np_oracle, pgm_decoder, qht_random_test_check,
    random_binary_qubit_channel, random_codewords, alt_batch, HypothesisInstance,
};
use crate::entropy::{ent1_convexity_check, ent_p, norm_derivative_fd_error};
use crate::error::{Error, Result};
use crate::lsi::{
    alpha2_gap_lower_bound, alpha2_simple_exact, hc_sweep, hc_time_threshold, lsi_constant_estimate,
    lsi_verify, sv_monotonicity_check, HcKind, LsiOptions, SV_TOL,
};
use crate::operator::random::{ginibre_with, sample_definite_with};
use crate::par::{batch_min, map_ordered, BatchMin};
use crate::rng::{child_stream, substream};
use crate::semigroup::{
    choi_kraus_decomposition, contractivity_check, kraus_residuals, spectral_gap, LindbladGenerator,
};
use crate::weighted::{check_reverse_holder, check_reverse_minkowski, holder_variational_check, INEQ_TOL};

const FD_TOL: f64 = 1e-5;
const FD_STEP: f64 = 1e-3;
const KRAUS_TOL: f64 = 1e-8;
const CONVERSE_TOL: f64 = 1e-8;
const KRAUS_PROBES: usize = 8;

pub fn run_suite(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    match cfg.suite {
        Suite::Norms => norms(cfg),
        Suite::Entropy => entropy(cfg),
        Suite::Semigroup => semigroup(cfg),
        Suite::LsiEstimate => lsi_estimate(cfg),
        Suite::LsiVerify => lsi_verify_suite(cfg),
        Suite::Sv => sv(cfg),
        Suite::Hc | Suite::Rhc => hc(cfg),
        Suite::Qht => qht(cfg),
        Suite::Cq => cq(cfg),
    }
}

fn batch_row(suite: Suite, cell: String, check: &str, b: BatchMin, tol: f64) -> ReportRow {
    ReportRow::new(suite, cell, check).value(b.value).contract(b.value, tol).witness(b.index)
}

fn norms(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let l = cfg.generator()?;
    let w = l.space();
    let d = l.dim();
    let tol = cfg.tolerance_or(INEQ_TOL);
    let s = cfg.suite;
    let mut rows = Vec::new();
    for (i, &p) in cfg.p_grid.iter().enumerate() {
        let seed = child_stream(cfg.seed, i as u64);
        let cell = format!("p={p}");
        if p < 1.0 && p != 0.0 {
            let holder = batch_min(cfg.samples, child_stream(seed, 0), |rng, _| {
                let x = sample_definite_with(rng, d);
                let y = sample_definite_with(rng, d);
                check_reverse_holder(w, &x, &y, p)
            })?;
            rows.push(batch_row(s, cell.clone(), "reverse-holder", holder, tol));
            let mink = batch_min(cfg.samples, child_stream(seed, 1), |rng, _| {
                let x = sample_definite_with(rng, d);
                let y = sample_definite_with(rng, d);
                check_reverse_minkowski(w, &x, &y, p)
            })?;
            rows.push(batch_row(s, cell.clone(), "reverse-minkowski", mink, tol));
            if p > 0.0 {
                let alt = alt_batch(d, p, cfg.samples, child_stream(seed, 2))?;
                rows.push(batch_row(s, cell, "araki-lieb-thirring", alt, tol));
            }
        } else if p >= 1.0 {
            let mut rng = substream(seed, 3);
            let x = sample_definite_with(&mut rng, d).matrix().clone();
            let h = holder_variational_check(w, &x, p, cfg.samples, child_stream(seed, 4))?;
            let scale = h.norm.max(f64::MIN_POSITIVE);
            rows.push(
                ReportRow::new(s, cell.clone(), "holder-duality-sup")
                    .value(h.sampled_sup)
                    .contract((h.norm - h.sampled_sup) / scale, tol),
            );
            if let Some(a) = h.attained {
                rows.push(
                    ReportRow::new(s, cell, "holder-duality-attained")
                        .value(a)
                        .contract(-(a - h.norm).abs() / scale, tol),
                );
            }
        } else {
            return Err(Error::UnsupportedExponent(p));
        }
    }
    Ok(rows)
}

fn entropy(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let l = cfg.generator()?;
    let w = l.space();
    let d = l.dim();
    let s = cfg.suite;
    let mut rows = Vec::new();
    for (i, &p) in cfg.p_grid.iter().enumerate() {
        let seed = child_stream(cfg.seed, i as u64);
        let cell = format!("p={p}");
        if p != 0.0 && (p - 2.0 * FD_STEP) * (p + 2.0 * FD_STEP) > 0.0 {
            let fd = batch_min(cfg.samples, child_stream(seed, 0), |rng, _| {
                let x = sample_definite_with(rng, d);
                Ok(-norm_derivative_fd_error(w, x.matrix(), p, FD_STEP)?)
            })?;
            rows.push(batch_row(s, cell.clone(), "norm-derivative", fd, cfg.tolerance_or(FD_TOL)));
        }
        let nonneg = batch_min(cfg.samples, child_stream(seed, 1), |rng, _| {
            let x = sample_definite_with(rng, d);
            let e = ent_p(w, x.matrix(), p)?;
            Ok(e.value / e.normalization)
        })?;
        rows.push(batch_row(s, cell, "entropy-nonnegative", nonneg, cfg.tolerance_or(INEQ_TOL)));
    }
    let conv = ent1_convexity_check(w, cfg.samples, child_stream(cfg.seed, u64::MAX))?;
    rows.push(batch_row(s, "p=1".into(), "ent1-convexity", conv, cfg.tolerance_or(INEQ_TOL)));
    Ok(rows)
}

fn semigroup(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let l = cfg.generator()?;
    let s = cfg.suite;
    let mut rows = Vec::new();
    rows.push(ReportRow::new(s, "generator", "spectral-gap").value(spectral_gap(&l)?));
    for (i, &p) in cfg.p_grid.iter().enumerate() {
        let b = contractivity_check(&l, p, &cfg.t_grid, cfg.samples, child_stream(cfg.seed, i as u64))?;
        rows.push(batch_row(s, format!("p={p}"), "contractivity", b, cfg.tolerance_or(INEQ_TOL)));
    }
    if l.is_strongly_reversible() {
        let mut rng = substream(cfg.seed, u64::MAX);
        let probes: Vec<_> = (0..KRAUS_PROBES).map(|_| ginibre_with(&mut rng, l.dim(), l.dim())).collect();
        let tol = cfg.tolerance_or(KRAUS_TOL);
        for &t in &cfg.t_grid {
            let pairs = choi_kraus_decomposition(&l, t)?;
            let r = kraus_residuals(&l, t, &pairs, &probes)?;
            let cell = format!("t={t}");
            for (check, v) in [
                ("kraus-commutation", r.commutation),
                ("kraus-completeness", r.completeness),
                ("kraus-reconstruction", r.reconstruction),
            ] {
                rows.push(ReportRow::new(s, cell.clone(), check).value(v).contract(-v, tol).at(t, check));
            }
        }
    }
    Ok(rows)
}

/// Closed-form α₂ when the generator is a tensor sum of qubit simple
/// generators.
fn alpha2_closed_form(cfg: &ExperimentConfig) -> Result<Option<f64>> {
    let Some(states) = cfg.generator.as_ref().and_then(|g| g.simple_factors()) else {
        return Ok(None);
    };
    if states.iter().any(|s| s.dim() != 2) {
        return Ok(None);
    }
    let mut best = f64::INFINITY;
    for s in &states {
        best = best.min(alpha2_simple_exact(s)?);
    }
    Ok(Some(best))
}

fn lsi_estimate(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let l = cfg.generator()?;
    let s = cfg.suite;
    let exact = alpha2_closed_form(cfg)?;
    let mut rows = Vec::new();
    for (i, &p) in cfg.p_grid.iter().enumerate() {
        let defaults = LsiOptions::default();
        let opts = LsiOptions {
            starts: cfg.starts.unwrap_or(defaults.starts),
            max_iter: cfg.max_iter.unwrap_or(defaults.max_iter),
            seed: child_stream(cfg.seed, i as u64),
            samples: cfg.samples,
            ..defaults
        };
        let est = lsi_constant_estimate(&l, p, &opts)?;
        let cell = format!("p={p}");
        rows.push(
            ReportRow::new(s, cell.clone(), "lsi-estimate")
                .value(est.value)
                .contract(est.sampled_floor - est.value, 0.0)
                .at(p, "estimate"),
        );
        rows.push(ReportRow::new(s, cell.clone(), "lsi-sampled-floor").value(est.sampled_floor).at(p, "sampled"));
        if let (Some(a), true) = (exact, p == 2.0) {
            let rel = (est.value - a) / a;
            rows.push(
                ReportRow::new(s, cell, "alpha2-closed-form")
                    .value(a)
                    .contract(-rel.abs(), cfg.tolerance_or(0.02))
                    .at(p, "closed-form"),
            );
        }
    }
    Ok(rows)
}

fn lsi_verify_suite(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let l = cfg.generator()?;
    let beta = cfg.beta.expect("validated");
    let tol = cfg.tolerance_or(INEQ_TOL);
    let mut rows = Vec::new();
    for (i, &p) in cfg.p_grid.iter().enumerate() {
        let b = lsi_verify(&l, p, beta, cfg.samples, child_stream(cfg.seed, i as u64), &[])?;
        rows.push(
            ReportRow::new(cfg.suite, format!("p={p}"), "log-sobolev")
                .value(b.value)
                .contract(b.value - beta, tol)
                .witness(b.index),
        );
    }
    Ok(rows)
}

fn sv(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let l = cfg.generator()?;
    let d = l.dim();
    let grid = &cfg.p_grid;
    let tol = cfg.tolerance_or(SV_TOL);
    let b = batch_min(cfg.samples, cfg.seed, |rng, _| {
        let x = sample_definite_with(rng, d).matrix().clone();
        let r = sv_monotonicity_check(&l, &x, grid)?;
        let scale = 1.0 + r.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        Ok(-r.max_violation.max(0.0) / scale)
    })?;
    let mut rows = vec![batch_row(cfg.suite, format!("p={}..{}", grid[0], grid[grid.len() - 1]), "stroock-varopoulos", b, tol)];
    let mut rng = substream(cfg.seed, b.index as u64);
    let witness = sample_definite_with(&mut rng, d).matrix().clone();
    let r = sv_monotonicity_check(&l, &witness, grid)?;
    for (&p, &v) in r.p_grid.iter().zip(&r.values) {
        rows.push(ReportRow::new(cfg.suite, format!("p={p}"), "dirichlet-at-power").value(v).at(p, "worst-sample"));
    }
    Ok(rows)
}

fn default_alpha(cfg: &ExperimentConfig, l: &LindbladGenerator) -> Result<f64> {
    if let Some(a) = cfg.alpha {
        return Ok(a);
    }
    if cfg.suite == Suite::Rhc && cfg.generator.as_ref().and_then(|g| g.simple_factors()).is_some() {
        return Ok(0.25);
    }
    if let Some(a) = alpha2_closed_form(cfg)? {
        return Ok(a);
    }
    if l.dim() == 2 {
        return alpha2_gap_lower_bound(l);
    }
    Err(Error::Document(format!("suite {} needs `alpha` for this generator", cfg.suite.name())))
}

fn hc(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let l = cfg.generator()?;
    let alpha = default_alpha(cfg, &l)?;
    let tol = cfg.tolerance_or(INEQ_TOL);
    let (kind, check) = match cfg.suite {
        Suite::Hc => (HcKind::Forward, "hypercontractivity"),
        _ => (HcKind::Reverse, "reverse-hypercontractivity"),
    };
    let valid = |p: f64, q: f64| match kind {
        HcKind::Forward => p == q && q >= 1.0 || q > 1.0 && p > q,
        _ => q < 1.0 && p <= q,
    };
    let mut grid = Vec::new();
    for &p in &cfg.p_grid {
        for &q in &cfg.q_grid {
            if !valid(p, q) {
                continue;
            }
            if cfg.t_grid.is_empty() {
                let th = hc_time_threshold(alpha, p, q)?;
                grid.extend(cfg.t_factors.iter().map(|f| (p, q, f * th)));
            } else {
                grid.extend(cfg.t_grid.iter().map(|&t| (p, q, t)));
            }
        }
    }
    grid.dedup();
    if grid.is_empty() {
        return Err(Error::Document("no admissible (p, q) pairs in the grids".into()));
    }
    let mut rows = sweep_rows(cfg, &l, alpha, kind, check, &grid, cfg.seed, tol)?;
    if cfg.suite == Suite::Rhc && cfg.reverse_holder {
        let mut pairs = Vec::new();
        for &p in cfg.p_grid.iter().filter(|&&p| p < 1.0) {
            for &q in cfg.q_grid.iter().filter(|&&q| q < 1.0) {
                let th = (((1.0 - p) * (1.0 - q)).recip().ln() / (4.0 * alpha)).max(0.0);
                if cfg.t_grid.is_empty() {
                    pairs.extend(cfg.t_factors.iter().map(|f| (p, q, f * th)));
                } else {
                    pairs.extend(cfg.t_grid.iter().map(|&t| (p, q, t)));
                }
            }
        }
        pairs.dedup();
        rows.extend(sweep_rows(
            cfg,
            &l,
            alpha,
            HcKind::ReverseHolder,
            "reverse-holder-hypercontractivity",
            &pairs,
            child_stream(cfg.seed, u64::MAX),
            tol,
        )?);
    }
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
fn sweep_rows(
    cfg: &ExperimentConfig,
    l: &LindbladGenerator,
    alpha: f64,
    kind: HcKind,
    check: &str,
    grid: &[(f64, f64, f64)],
    seed: u64,
    tol: f64,
) -> Result<Vec<ReportRow>> {
    let report = hc_sweep(l, alpha, kind, grid, cfg.samples, seed)?;
    Ok(report
        .cells
        .iter()
        .map(|c| {
            let row = ReportRow::new(cfg.suite, format!("p={},q={},t={}", c.p, c.q, c.t), check)
                .value(c.margin)
                .at(c.t, format!("p={},q={}", c.p, c.q));
            if c.contract {
                row.contract(c.margin, tol)
            } else {
                row.exploratory(c.margin)
            }
        })
        .collect())
}

fn qht(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let base = cfg.instance.as_ref().expect("validated").build(&cfg.base_dir)?;
    let tol = cfg.tolerance_or(CONVERSE_TOL);
    let cells: Vec<(usize, usize, f64)> = cfg
        .n_grid
        .iter()
        .flat_map(|&n| cfg.eps_grid.iter().map(move |&e| (n, e)))
        .enumerate()
        .map(|(i, (n, e))| (i, n, e))
        .collect();
    let per_cell = map_ordered(&cells, |&(i, n, eps)| -> Result<Vec<ReportRow>> {
        qht_cell(cfg, &base, n, eps, child_stream(cfg.seed, i as u64), tol)
    });
    let mut rows = Vec::new();
    for r in per_cell {
        rows.extend(r?);
    }
    Ok(rows)
}

fn qht_cell(
    cfg: &ExperimentConfig,
    base: &HypothesisInstance,
    n: usize,
    eps: f64,
    seed: u64,
    tol: f64,
) -> Result<Vec<ReportRow>> {
    let s = cfg.suite;
    let inst = base.with_n(n)?;
    let cell = format!("n={n},eps={eps}");
    let (beta, _) = np_oracle(&inst, eps)?;
    let lb = beta_lower_bound(&inst, eps)?;
    let x = n as f64;
    let mut rows = vec![
        ReportRow::new(s, cell.clone(), "qht-exact-beta")
            .value(beta)
            .contract((beta - lb) / beta.max(f64::MIN_POSITIVE), tol)
            .at(x, format!("exact eps={eps}")),
        ReportRow::new(s, cell.clone(), "qht-beta-lower-bound").value(lb).at(x, format!("bound eps={eps}")),
    ];
    if cfg.samples > 0 {
        let b = qht_random_test_check(&inst, cfg.samples, seed)?;
        rows.push(batch_row(s, cell, "qht-random-tests", b, tol));
    }
    Ok(rows)
}

fn cq(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let tol = cfg.tolerance_or(CONVERSE_TOL);
    let cells: Vec<(u64, usize, usize)> = cfg
        .n_grid
        .iter()
        .flat_map(|&n| cfg.messages_grid.iter().map(move |&m| (n, m)))
        .enumerate()
        .map(|(i, (n, m))| (i as u64, n, m))
        .collect();
    let per_cell = map_ordered(&cells, |&(i, n, m)| -> Result<ReportRow> {
        let cell_seed = child_stream(cfg.seed, i);
        let b = batch_min(cfg.codes_per_cell, cell_seed, |rng, _| {
            let channel = random_binary_qubit_channel(rng)?;
            let words = random_codewords(rng, 2, n, m);
            let code = pgm_decoder(&channel, &words)?;
            Ok(cq_converse_check(&code)?.margin)
        })?;
        Ok(batch_row(cfg.suite, format!("n={n},M={m}"), "cq-converse", b, tol).at(n as f64, format!("M={m}")))
    });
    per_cell.into_iter().collect()
}
