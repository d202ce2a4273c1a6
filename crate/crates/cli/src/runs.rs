//! The four run modes behind the subcommands.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anosovq_core::anosov::{
    anosov_directions, certify, classify_gap, floquet_reduction, monodromy,
    quasiperiodic_direction_field, GapClass,
};
use anosovq_core::cat::{
    build_cat_coefficient_map, cat_anosov_directions, classify_inner, verify_cat_anosov,
    CatSystem, DerivationClass, RATIONALITY_TOL,
};
use anosovq_core::cocycle::IntegratorConfig;
use anosovq_core::hull::{flow, DrivingSpec, HullPoint};
use anosovq_core::lyapunov::{classical_lyapunov, direction_profile, LyapunovEstimate};
use anosovq_core::{Complex64, Error as CoreError};

use crate::config::RunConfig;
use crate::output::{
    emit, to_json, CatDirectionOut, CatReportOut, CertificateOut, ComplexOut, DirectionOut,
    LyapunovReportOut, ProfileEntryOut, ScanRow, SCAN_HEADER,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

/// Estimator-side hyperbolicity call: resolvable growth above the regression
/// noise and above the finite-window rate resolution.
fn looks_hyperbolic(est: &LyapunovEstimate) -> bool {
    est.value > 3.0 * est.slope_stderr
}

fn classification_label(
    cfg: &RunConfig,
    spec: &DrivingSpec,
    theta: &HullPoint,
    integrator: &IntegratorConfig,
    classical: Option<&LyapunovEstimate>,
) -> &'static str {
    if cfg.dimension == 1 {
        let Ok(period) = cfg.period() else {
            return "unresolved";
        };
        match monodromy(spec, theta, period, integrator) {
            Ok(m) => classify_gap(&m).as_str(),
            Err(CoreError::Parabolic { .. }) => "parabolic",
            Err(_) => "unresolved",
        }
    } else {
        match classical {
            Some(est) if looks_hyperbolic(est) => "hyperbolic",
            Some(_) => "elliptic",
            None => "unresolved",
        }
    }
}

pub fn run_lyapunov(cfg: &RunConfig, out: Option<&std::path::Path>) -> Result<i32, String> {
    let spec = cfg.spec()?;
    let theta = cfg.theta0()?;
    let integrator = cfg.integrator();

    let flowed = flow(&theta, cfg.t0, spec.omega()).map_err(|e| e.to_string())?;
    let classical =
        classical_lyapunov(&spec, &flowed, cfg.horizon, &integrator).map_err(|e| e.to_string())?;
    let profile = direction_profile(
        &spec,
        &theta,
        cfg.t0,
        cfg.directions,
        cfg.horizon,
        &integrator,
    )
    .map_err(|e| e.to_string())?;
    let lambda_bar = profile
        .exponents
        .iter()
        .map(|e| e.value)
        .fold(f64::NEG_INFINITY, f64::max);

    let classification =
        classification_label(cfg, &spec, &theta, &integrator, Some(&classical));
    let report = LyapunovReportOut {
        e: spec.spectral_parameter(),
        lambda_c: classical.value,
        lambda_c_stderr: classical.slope_stderr,
        lambda_bar,
        classification: classification.to_string(),
        stable_direction: profile
            .stable_index
            .map(|i| DirectionOut::from(&profile.directions[i])),
        profile: profile
            .directions
            .iter()
            .zip(profile.exponents.iter())
            .enumerate()
            .map(|(i, (d, est))| ProfileEntryOut {
                alpha_x: d.alpha_x().to_vec(),
                alpha_p: d.alpha_p().to_vec(),
                exponent: est.value,
                stderr: est.slope_stderr,
                stable: Some(i) == profile.stable_index,
            })
            .collect(),
        horizon: cfg.horizon,
        t0: cfg.t0,
        seed: cfg.seed,
    };
    emit(out, &to_json(&report))?;
    Ok(EXIT_OK)
}

fn scan_row(cfg: &RunConfig, e: f64, warnings: &Mutex<Vec<String>>) -> ScanRow {
    let integrator = cfg.integrator();
    let warn = |msg: String| warnings.lock().unwrap().push(msg);

    let spec = match cfg.spec_at(e) {
        Ok(s) => s,
        Err(msg) => {
            warn(format!("E = {e}: {msg}"));
            return ScanRow {
                e,
                lambda_c: None,
                lambda_bar: None,
                classification: "unresolved",
                residual: None,
            };
        }
    };
    let theta = match cfg.theta0() {
        Ok(t) => t,
        Err(msg) => {
            warn(format!("E = {e}: {msg}"));
            return ScanRow {
                e,
                lambda_c: None,
                lambda_bar: None,
                classification: "unresolved",
                residual: None,
            };
        }
    };

    let classical = match classical_lyapunov(&spec, &theta, cfg.horizon, &integrator) {
        Ok(est) => Some(est),
        Err(err) => {
            warn(format!("E = {e}: classical exponent failed: {err}"));
            None
        }
    };
    let mut classification =
        classification_label(cfg, &spec, &theta, &integrator, classical.as_ref());

    // a generic start vector must not decay; a clearly negative slope marks
    // an untrustworthy row
    if let Some(est) = &classical {
        if est.value < -(2.0 * est.slope_stderr + 1e-6) {
            warn(format!(
                "E = {e}: generic growth estimate {} below -2·stderr; row unresolved",
                est.value
            ));
            classification = "unresolved";
        }
    }

    let lambda_bar = match direction_profile(
        &spec,
        &theta,
        cfg.t0,
        cfg.directions,
        cfg.horizon,
        &integrator,
    ) {
        Ok(profile) => Some(
            profile
                .exponents
                .iter()
                .map(|e| e.value)
                .fold(f64::NEG_INFINITY, f64::max),
        ),
        Err(err) => {
            warn(format!("E = {e}: direction profile failed: {err}"));
            None
        }
    };

    // consistency residual |Re λ₊ − λ_c| on hyperbolic periodic rows
    let residual = if cfg.dimension == 1 && classification == "hyperbolic" {
        match (cfg.period(), &classical) {
            (Ok(period), Some(est)) => monodromy(&spec, &theta, period, &integrator)
                .ok()
                .map(|m| (m.lambda_plus.re - est.value).abs()),
            _ => None,
        }
    } else {
        None
    };

    ScanRow {
        e,
        lambda_c: classical.as_ref().map(|est| est.value),
        lambda_bar,
        classification,
        residual,
    }
}

pub fn run_scan(
    cfg: &RunConfig,
    out: Option<&std::path::Path>,
    threads: usize,
) -> Result<i32, String> {
    let grid = cfg.grid()?;
    let warnings = Mutex::new(Vec::new());
    let rows: Mutex<Vec<Option<ScanRow>>> = Mutex::new(vec![None; grid.len()]);
    let next = AtomicUsize::new(0);
    let workers = threads.max(1).min(grid.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= grid.len() {
                    break;
                }
                let row = scan_row(cfg, grid[idx], &warnings);
                rows.lock().unwrap()[idx] = Some(row);
            });
        }
    });

    let mut csv = String::from(SCAN_HEADER);
    csv.push('\n');
    for row in rows.into_inner().unwrap() {
        csv.push_str(&row.expect("every row computed").to_csv());
        csv.push('\n');
    }
    emit(out, &csv)?;

    let mut warnings = warnings.into_inner().unwrap();
    warnings.sort();
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    if !warnings.is_empty() {
        eprintln!("scan finished with {} warning(s)", warnings.len());
    }
    Ok(EXIT_OK)
}

/// Sample-aligned `(t0, t)` pairs for a periodic certificate.
fn periodic_pairs(period: f64) -> Vec<(f64, f64)> {
    let quarter = period / 4.0;
    let mut pairs = Vec::new();
    for &t0 in &[0.0, quarter] {
        for &dt in &[quarter, period, 2.0 * period, 5.0 * period] {
            pairs.push((t0, t0 + dt));
        }
    }
    pairs
}

pub fn run_anosov(cfg: &RunConfig, out: Option<&std::path::Path>) -> Result<i32, String> {
    let spec = cfg.spec()?;
    let theta = cfg.theta0()?;
    let integrator = cfg.integrator();

    let (cert, pairs) = if cfg.dimension == 1 {
        let period = cfg.period()?;
        let mono = match monodromy(&spec, &theta, period, &integrator) {
            Ok(m) => m,
            Err(err @ (CoreError::Parabolic { .. } | CoreError::Elliptic { .. })) => {
                eprintln!("anosov: no exponential dichotomy: {err}");
                return Ok(EXIT_PRECONDITION);
            }
            Err(err) => return Err(err.to_string()),
        };
        if classify_gap(&mono) != GapClass::Hyperbolic {
            eprintln!(
                "anosov: spec is {} (tr M = {}): no exponential dichotomy",
                classify_gap(&mono).as_str(),
                mono.trace()
            );
            return Ok(EXIT_PRECONDITION);
        }
        let frame = floquet_reduction(&spec, &theta, period, cfg.period_samples, &integrator)
            .map_err(|e| e.to_string())?;
        let field = anosov_directions(&frame).map_err(|e| e.to_string())?;
        let tolerance = cfg.tolerance.unwrap_or(1e-6);
        let pairs = periodic_pairs(period);
        let cert = certify(
            &spec,
            &theta,
            &field,
            frame.lambda_plus,
            &pairs,
            tolerance,
            GapClass::Hyperbolic,
            &integrator,
        )
        .map_err(|e| e.to_string())?;
        (cert, pairs)
    } else {
        // quasi-periodic route: finite-horizon fields on an orbit grid
        let delta = 0.25;
        let grid: Vec<HullPoint> = (0..cfg.period_samples)
            .map(|j| flow(&theta, j as f64 * delta, spec.omega()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let quasi = match quasiperiodic_direction_field(&spec, &grid, cfg.horizon, &integrator) {
            Ok(q) => q,
            Err(err @ CoreError::NonHyperbolic { .. }) => {
                eprintln!("anosov: {err}");
                return Ok(EXIT_PRECONDITION);
            }
            Err(err) => return Err(err.to_string()),
        };
        let span = (cfg.period_samples - 1) as f64 * delta;
        let reach = span.min(5.0);
        // grid-aligned pairs confined to the sampled orbit span
        let on_grid = |t: f64| (t / delta).floor() * delta;
        let q = on_grid(span / 4.0);
        let pairs = vec![
            (0.0, reach),
            (q, (q + 5.0).min(span)),
            (0.0, on_grid(reach / 2.0)),
        ];
        let tolerance = cfg.tolerance.unwrap_or(1e-2);
        let cert = certify(
            &spec,
            &theta,
            &quasi.field,
            Complex64::new(quasi.lambda, 0.0),
            &pairs,
            tolerance,
            GapClass::Hyperbolic,
            &integrator,
        )
        .map_err(|e| e.to_string())?;
        (cert, pairs)
    };

    let report = CertificateOut {
        lambda_plus: cert.lambda_plus.into(),
        classification: cert.classification.as_str().to_string(),
        residual_max: cert.residual_max,
        grid: cert.grid,
        tolerance: cert.tolerance,
        verdict: if cert.verdict { "pass" } else { "fail" }.to_string(),
        lambda_minus: cert.lambda_minus.into(),
        residuals: cert.residuals.clone(),
        pairs,
        seed: cfg.seed,
    };
    let pass = cert.verdict;
    emit(out, &to_json(&report))?;
    Ok(if pass { EXIT_OK } else { EXIT_VERIFICATION })
}

pub fn run_catmap(cfg: &RunConfig, out: Option<&std::path::Path>) -> Result<i32, String> {
    let sys = CatSystem::new(cfg.cat_t).map_err(|e| e.to_string())?;
    let map = build_cat_coefficient_map(&sys);
    let dirs = cat_anosov_directions(&sys);
    let verified = verify_cat_anosov(&map, &dirs);

    let mut directions = Vec::with_capacity(4);
    for (d, residual) in dirs.iter().zip(verified.residuals.iter()) {
        let derivation = match classify_inner(&d.direction, RATIONALITY_TOL)
            .map_err(|e| e.to_string())?
        {
            DerivationClass::Inner => "inner",
            DerivationClass::Outer => "outer",
            DerivationClass::Undecidable => "undecidable",
        };
        directions.push(CatDirectionOut {
            alpha_x: d.direction.alpha_x().to_vec(),
            alpha_p: d.direction.alpha_p().to_vec(),
            exponent: ComplexOut {
                re: d.exponent,
                im: 0.0,
            },
            residual: *residual,
            derivation: derivation.to_string(),
        });
    }
    let report = CatReportOut {
        lambda: verified.upper_exponent,
        directions,
        verdict: if verified.verdict { "pass" } else { "fail" }.to_string(),
        t_kick: sys.t_kick(),
        seed: cfg.seed,
    };
    let pass = verified.verdict;
    emit(out, &to_json(&report))?;
    Ok(if pass { EXIT_OK } else { EXIT_VERIFICATION })
}
