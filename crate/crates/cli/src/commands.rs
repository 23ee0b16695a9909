use std::io::Write;

use indirect_coulomb::bound_constants::{beta, BoundParameters, TheoremConstants};
use indirect_coulomb::density::{gaussian_g, gaussian_g_over_l, gaussian_l, DensityProfile};
use indirect_coulomb::manybody::{tightness_scan_scaled, CoefficientScale, ScanReport, WaveFunctionSpec};
use indirect_coulomb::stability::{empirical_stability_sweep, SweepReport};
use serde::Serialize;

use crate::config::{BoundConfig, ConstantsConfig, GaussianExampleConfig, StabilityConfig};
use crate::RunError;

/// Outcome of a command: the rendered document and whether an inequality
/// was violated.
pub struct Output {
    pub body: Vec<u8>,
    pub violation: bool,
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, RunError> {
    w.into_inner().map_err(|e| RunError::Io(e.to_string()))
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn json<T: Serialize>(value: &T) -> Result<Vec<u8>, RunError> {
    let mut body = serde_json::to_vec_pretty(value).map_err(|e| RunError::Io(e.to_string()))?;
    body.write_all(b"\n").map_err(|e| RunError::Io(e.to_string()))?;
    Ok(body)
}

pub fn constants(cfg: &ConstantsConfig) -> Result<Output, RunError> {
    let mut w = csv_writer();
    w.write_record([
        "gamma", "epsilon", "alpha", "delta", "C_gamma", "C_delta", "beta", "b_tilde_sq", "a_tilde_sq",
    ])
    .map_err(io)?;
    for &g in &cfg.gamma {
        for &e in &cfg.epsilon {
            let tc = TheoremConstants::for_exponents(g, e)?;
            let p = tc.params;
            w.write_record([
                num(g),
                num(e),
                num(p.alpha()),
                num(p.delta()),
                num(p.c_gamma()),
                num(p.c_delta()),
                num(beta::<f64>()),
                num(tc.b_tilde_sq),
                num(tc.a_tilde_sq),
            ])
            .map_err(io)?;
        }
    }
    Ok(Output {
        body: finish_csv(w)?,
        violation: false,
    })
}

fn io(e: csv::Error) -> RunError {
    RunError::Io(e.to_string())
}

pub fn gaussian_example(cfg: &GaussianExampleConfig) -> Result<Output, RunError> {
    let mut w = csv_writer();
    w.write_record([
        "N",
        "gamma",
        "L_closed",
        "L_quadrature",
        "G_closed",
        "G_quadrature",
        "G_over_L_closed",
        "G_over_L_quadrature",
    ])
    .map_err(io)?;
    let cells: Vec<(f64, f64)> = cfg
        .n
        .iter()
        .flat_map(|&n| cfg.gamma.iter().map(move |&g| (n, g)))
        .collect();
    let rows: Vec<Result<[f64; 8], RunError>> = {
        use rayon::prelude::*;
        cells
            .par_iter()
            .map(|&(n, g)| {
                if !(n > 0.0) {
                    return Err(RunError::Usage(format!("particle number must be positive, got {n}")));
                }
                // ε does not enter L or G
                let p = BoundParameters::new(g, 1.0)?;
                let rho = DensityProfile::normalized_gaussian(n, cfg.a, [0.0, 0.0])?;
                let c = n * cfg.a / std::f64::consts::PI;
                let (lc, gc) = (gaussian_l(c, cfg.a), gaussian_g(c, cfg.a, &p));
                let lq = rho.evaluate_l()?.value;
                let gq = rho.evaluate_g(&p)?.value;
                Ok([n, g, lc, lq, gc, gq, gaussian_g_over_l(n, &p)?, gq / lq])
            })
            .collect()
    };
    for row in rows {
        w.write_record(row?.map(num)).map_err(io)?;
    }
    Ok(Output {
        body: finish_csv(w)?,
        violation: false,
    })
}

/// Spreads one base seed over the specs.
fn spec_seed(base: u64, index: usize) -> u64 {
    base ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn build_specs(cfg: &BoundConfig, seed: Option<u64>) -> Result<Vec<WaveFunctionSpec<f64>>, RunError> {
    let seed = seed.or(cfg.seed);
    cfg.specs
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let spec = d.build::<f64>()?;
            Ok(match seed {
                Some(s) => spec.with_seed(spec_seed(s, i)),
                None => spec,
            })
        })
        .collect()
}

fn run_scan(cfg: &BoundConfig, seed: Option<u64>, beta_scale: f64) -> Result<ScanReport<f64>, RunError> {
    if cfg.specs.is_empty() || cfg.gamma.is_empty() || cfg.epsilon.is_empty() {
        return Err(RunError::Usage("specs, gamma and epsilon must be nonempty".into()));
    }
    let specs = build_specs(cfg, seed)?;
    let scale = CoefficientScale {
        b_tilde_sq: beta_scale,
        a_tilde_sq: 1.0,
    };
    let report = tightness_scan_scaled(&specs, &cfg.gamma, &cfg.epsilon, scale)?;
    for row in report.rows.iter().filter(|r| !r.passes) {
        log::error!(
            "bound violated for spec {} (N = {}) at gamma = {}, epsilon = {}: slack {} (stderr {})",
            row.spec,
            row.n,
            row.gamma,
            row.epsilon,
            row.slack,
            row.stderr
        );
    }
    Ok(report)
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    passed: bool,
    violations: usize,
    cells: &'a [indirect_coulomb::manybody::ScanRow<f64>],
    best: &'a [indirect_coulomb::manybody::BestCell<f64>],
    skipped: &'a [(usize, f64, f64, String)],
}

pub fn verify_bound(cfg: &BoundConfig, seed: Option<u64>, beta_scale: f64) -> Result<Output, RunError> {
    let report = run_scan(cfg, seed, beta_scale)?;
    let violations = report.rows.iter().filter(|r| !r.passes).count();
    let body = json(&VerifyReport {
        passed: violations == 0,
        violations,
        cells: &report.rows,
        best: &report.best,
        skipped: &report.skipped,
    })?;
    Ok(Output {
        body,
        violation: violations > 0,
    })
}

pub fn scan(cfg: &BoundConfig, seed: Option<u64>, beta_scale: f64) -> Result<Output, RunError> {
    let report = run_scan(cfg, seed, beta_scale)?;
    let mut w = csv_writer();
    w.write_record(["gamma", "epsilon", "N", "lhs", "rhs", "slack", "ratio", "stderr"])
        .map_err(io)?;
    for r in &report.rows {
        w.write_record([
            num(r.gamma),
            num(r.epsilon),
            r.n.to_string(),
            num(r.lhs),
            num(r.rhs),
            num(r.slack),
            opt(r.ratio),
            num(r.stderr),
        ])
        .map_err(io)?;
    }
    for b in &report.best {
        log::info!(
            "spec {}: best ratio {} at gamma = {}, epsilon = {}",
            b.spec,
            b.ratio,
            b.gamma,
            b.epsilon
        );
    }
    Ok(Output {
        body: finish_csv(w)?,
        violation: !report.passed(),
    })
}

#[derive(Serialize)]
struct StabilityOutput<'a> {
    gamma: f64,
    epsilon: f64,
    a_tilde_sq: f64,
    b_tilde_sq: f64,
    passed: bool,
    #[serde(flatten)]
    report: &'a SweepReport<f64>,
}

pub fn stability_sweep(cfg: &StabilityConfig) -> Result<Output, RunError> {
    let tc = TheoremConstants::for_exponents(cfg.gamma, cfg.epsilon)?;
    let a_tilde_sq = cfg.a_tilde_sq.unwrap_or(tc.a_tilde_sq);
    let b_tilde_sq = cfg.b_tilde_sq.unwrap_or(tc.b_tilde_sq);
    let corpus = cfg
        .corpus
        .iter()
        .map(|d| d.build::<f64>())
        .collect::<Result<Vec<_>, _>>()?;
    let configs = cfg
        .configs
        .iter()
        .map(|d| d.build::<f64>())
        .collect::<Result<Vec<_>, _>>()?;
    let report = empirical_stability_sweep(&corpus, &configs, &tc.params, a_tilde_sq, b_tilde_sq)?;
    for case in report.cases.iter().filter(|c| c.violation) {
        log::error!(
            "xi = {} < 0 for profile {}, config {}",
            case.breakdown.xi,
            case.profile,
            case.config
        );
    }
    let body = json(&StabilityOutput {
        gamma: cfg.gamma,
        epsilon: cfg.epsilon,
        a_tilde_sq,
        b_tilde_sq,
        passed: report.passed(),
        report: &report,
    })?;
    Ok(Output {
        body,
        violation: !report.passed(),
    })
}
