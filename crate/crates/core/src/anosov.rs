//! Floquet reduction, Anosov direction fields, and relation residuals.
//!
//! For periodic driving, the one-period propagator `M = F(T, 0; θ)` decides
//! everything: `|tr M| > 2` gives an exponential dichotomy, and the reduction
//! frame `g(t) = F(t, 0; θ) g(0) exp(−t Λ)` with `g(0)` the eigenvector
//! matrix of `M` and `Λ = diag(λ₊, −λ₊)` conjugates the cocycle to constant
//! coefficients. Negative Floquet multipliers are handled through the complex
//! branch `Im λ₊ = π/T`, which makes the frame complex with a phase
//! `e^{−iπt/T}` but keeps it `T`-periodic.
//!
//! The stable/unstable coefficient fields come from the rows of `g⁻¹`:
//!
//! ```text
//! a₋ = ( g₂₂/det g, −g₁₂/det g )      a₊ = ( −g₂₁/det g, g₁₁/det g )
//! ```
//!
//! in stacked `(α_p, α_x)` components, and satisfy the conjugation relation
//! `(F(t,t₀;θ)⁻¹)ᵀ a_±(φ^{t₀}θ) = e^{λ_±(t−t₀)} a_±(φ^{t}θ)` exactly;
//! [`anosov_residual`] measures how well the integrated cocycle reproduces
//! it. For quasi-periodic driving no reduction is constructed — the fields
//! are estimated by finite-horizon forward/adjoint iteration and certified
//! with a looser tolerance.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::cocycle::{integrate_mat2, IntegratorConfig, OrbitDriving};
use crate::error::{Error, Result};
use crate::hull::{flow, DrivingSpec, FrequencyVector, HullPoint};
use crate::lyapunov::{self, classical_lyapunov};
use crate::mat2::{self, Mat2, Vec2};
use crate::math;
use crate::weyl::SymplecticMatrix;

/// Width of the parabolic band in `|tr M|` around 2.
pub const PARABOLIC_TOL: f64 = 1e-8;

type CMat2 = [[Complex64; 2]; 2];
type CVec2 = [Complex64; 2];

/// One-period propagator with its Floquet data.
#[derive(Debug, Clone)]
pub struct MonodromyData {
    /// `M = F(period, 0; θ)`.
    pub m: SymplecticMatrix,
    pub period: f64,
    /// `(μ₊, μ₋)` sorted by modulus, `μ₊μ₋ = det M ≈ 1`.
    pub multipliers: (Complex64, Complex64),
    /// `λ₊ = log(μ₊)/period`; `Im λ₊ = π/period` exactly when `μ₊ < 0`.
    pub lambda_plus: Complex64,
}

impl MonodromyData {
    pub fn trace(&self) -> f64 {
        self.m.entry(0, 0) + self.m.entry(1, 1)
    }
}

/// Spectral-gap classification of a periodic spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapClass {
    Hyperbolic,
    Elliptic,
    Parabolic,
}

impl GapClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            GapClass::Hyperbolic => "hyperbolic",
            GapClass::Elliptic => "elliptic",
            GapClass::Parabolic => "parabolic",
        }
    }
}

fn check_periodic(spec: &DrivingSpec, period: f64) -> Result<()> {
    if spec.dim() != 1 {
        return Err(Error::NonPeriodic("hull dimension exceeds 1"));
    }
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidParameter("period must be positive"));
    }
    let omega = spec.omega().components()[0];
    let autonomous = spec
        .potential()
        .terms()
        .iter()
        .all(|t| t.k[0] as f64 * omega == 0.0);
    if autonomous {
        return Ok(());
    }
    let tau = 2.0 * core::f64::consts::PI;
    if (omega.abs() * period - tau).abs() > 1e-9 * tau {
        return Err(Error::NonPeriodic("period does not equal 2π/ω"));
    }
    Ok(())
}

/// One-period propagator and Floquet multipliers; refuses parabolic specs
/// (`|tr M| = 2` within tolerance), for which no reduction exists.
pub fn monodromy(
    spec: &DrivingSpec,
    theta: &HullPoint,
    period: f64,
    cfg: &IntegratorConfig,
) -> Result<MonodromyData> {
    cfg.validate(spec)?;
    check_periodic(spec, period)?;
    let driving = OrbitDriving::new(spec, theta)?;
    let m = integrate_mat2(&driving, 0.0, period, cfg)?;
    let tr = m[0][0] + m[1][1];
    let det = mat2::det(&m);
    if (tr.abs() - 2.0).abs() <= PARABOLIC_TOL {
        return Err(Error::Parabolic { trace: tr });
    }
    let (mu_plus, mu_minus, lambda_plus) = if tr.abs() > 2.0 {
        let sq = math::sqrt(tr * tr - 4.0);
        let mu = 0.5 * (tr + tr.signum() * sq);
        let lam = Complex64::new(
            math::ln(mu.abs()) / period,
            if mu < 0.0 {
                core::f64::consts::PI / period
            } else {
                0.0
            },
        );
        (
            Complex64::new(mu, 0.0),
            Complex64::new(det / mu, 0.0),
            lam,
        )
    } else {
        let im = 0.5 * math::sqrt(4.0 - tr * tr);
        let mu = Complex64::new(0.5 * tr, im);
        let arg = math::atan2(im, 0.5 * tr);
        (
            mu,
            mu.conj(),
            Complex64::new(0.0, arg / period),
        )
    };
    Ok(MonodromyData {
        m: SymplecticMatrix::new_unchecked(
            1,
            alloc::vec![m[0][0], m[0][1], m[1][0], m[1][1]],
        )?,
        period,
        multipliers: (mu_plus, mu_minus),
        lambda_plus,
    })
}

/// Hyperbolic iff `|tr M| > 2 + tol`, elliptic iff `< 2 − tol`, parabolic in
/// the band between (`tol` = [`PARABOLIC_TOL`]).
pub fn classify_gap(m: &MonodromyData) -> GapClass {
    let tr = m.trace().abs();
    if tr > 2.0 + PARABOLIC_TOL {
        GapClass::Hyperbolic
    } else if tr < 2.0 - PARABOLIC_TOL {
        GapClass::Elliptic
    } else {
        GapClass::Parabolic
    }
}

/// Periodic reduction frame: samples of `g(t)` over one period.
#[derive(Debug, Clone)]
pub struct ReductionFrame {
    pub theta0: HullPoint,
    pub omega: FrequencyVector,
    pub period: f64,
    pub lambda_plus: Complex64,
    /// `(t_k, g(t_k))` at `n_samples + 1` equally spaced times in
    /// `[0, period]`; the final sample witnesses periodicity.
    pub samples: Vec<(f64, CMat2)>,
}

fn cmat_from_real(m: &Mat2) -> CMat2 {
    [
        [Complex64::new(m[0][0], 0.0), Complex64::new(m[0][1], 0.0)],
        [Complex64::new(m[1][0], 0.0), Complex64::new(m[1][1], 0.0)],
    ]
}

fn cmat_mul(a: &CMat2, b: &CMat2) -> CMat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn cmat_det(m: &CMat2) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn cmat_diff_inf(a: &CMat2, b: &CMat2) -> f64 {
    let mut max = 0.0_f64;
    for i in 0..2 {
        for j in 0..2 {
            max = max.max((a[i][j] - b[i][j]).norm());
        }
    }
    max
}

fn rmat_apply_cvec(m: &Mat2, v: &CVec2) -> CVec2 {
    [
        v[0] * m[0][0] + v[1] * m[0][1],
        v[0] * m[1][0] + v[1] * m[1][1],
    ]
}

fn cvec_norm(v: &CVec2) -> f64 {
    math::sqrt(v[0].norm_sqr() + v[1].norm_sqr())
}

/// Unit eigenvector of a real 2×2 matrix for a real eigenvalue, with the
/// first significant component positive.
fn real_eigenvector(m: &Mat2, mu: f64) -> Vec2 {
    // (M − μ)v = 0: rows give v ∝ (m01, μ − m00) or (μ − m11, m10)
    let cand1 = [m[0][1], mu - m[0][0]];
    let cand2 = [mu - m[1][1], m[1][0]];
    let v = if mat2::norm(&cand1) >= mat2::norm(&cand2) {
        cand1
    } else {
        cand2
    };
    let n = mat2::norm(&v);
    let v = mat2::scale(&v, 1.0 / n);
    let sign = if v[0].abs() > 1e-12 {
        v[0].signum()
    } else {
        v[1].signum()
    };
    mat2::scale(&v, sign)
}

/// Floquet reduction for a hyperbolic periodic spec: `g(0)` is the
/// (unstable-first) eigenvector matrix of the monodromy and
/// `g(t_k) = F(t_k, 0; θ) g(0) exp(−t_k Λ)`.
pub fn floquet_reduction(
    spec: &DrivingSpec,
    theta: &HullPoint,
    period: f64,
    n_samples: usize,
    cfg: &IntegratorConfig,
) -> Result<ReductionFrame> {
    if n_samples < 2 {
        return Err(Error::InvalidParameter("need at least 2 frame samples"));
    }
    let mono = monodromy(spec, theta, period, cfg)?;
    if classify_gap(&mono) != GapClass::Hyperbolic {
        return Err(Error::Elliptic { trace: mono.trace() });
    }
    let m = [
        [mono.m.entry(0, 0), mono.m.entry(0, 1)],
        [mono.m.entry(1, 0), mono.m.entry(1, 1)],
    ];
    let mu_plus = mono.multipliers.0.re;
    let mu_minus = mono.multipliers.1.re;
    let v_unstable = real_eigenvector(&m, mu_plus);
    let v_stable = real_eigenvector(&m, mu_minus);
    let angle = mat2::ray_angle(&v_unstable, &v_stable);
    if angle < 1e-6 {
        return Err(Error::IllConditioned { angle });
    }
    let g0: CMat2 = [
        [
            Complex64::new(v_unstable[0], 0.0),
            Complex64::new(v_stable[0], 0.0),
        ],
        [
            Complex64::new(v_unstable[1], 0.0),
            Complex64::new(v_stable[1], 0.0),
        ],
    ];

    let driving = OrbitDriving::new(spec, theta)?;
    let lambda = mono.lambda_plus;
    let mut samples = Vec::with_capacity(n_samples + 1);
    samples.push((0.0, g0));
    let mut acc = mat2::IDENTITY;
    for k in 1..=n_samples {
        let t_prev = period * (k - 1) as f64 / n_samples as f64;
        let t_k = period * k as f64 / n_samples as f64;
        let seg = integrate_mat2(&driving, t_prev, t_k, cfg)?;
        acc = mat2::mul(&seg, &acc);
        let phase_plus = (-lambda * t_k).exp();
        let phase_minus = (lambda * t_k).exp();
        let scaled: CMat2 = [
            [g0[0][0] * phase_plus, g0[0][1] * phase_minus],
            [g0[1][0] * phase_plus, g0[1][1] * phase_minus],
        ];
        let g_k = cmat_mul(&cmat_from_real(&acc), &scaled);
        samples.push((t_k, g_k));
    }
    for (idx, (_, g)) in samples.iter().enumerate() {
        if cmat_det(g).norm() < 1e-10 {
            return Err(Error::SingularFrame { index: idx });
        }
    }
    let residual = cmat_diff_inf(&samples[n_samples].1, &samples[0].1);
    if residual > 1e-6 {
        return Err(Error::FrameNotPeriodic { residual });
    }
    Ok(ReductionFrame {
        theta0: theta.clone(),
        omega: spec.omega().clone(),
        period,
        lambda_plus: lambda,
        samples,
    })
}

/// Sampled stable/unstable coefficient fields on the hull.
#[derive(Debug, Clone)]
pub struct DirectionField {
    pub points: Vec<HullPoint>,
    /// Stable field `a₋`, stacked `(α_p, α_x)` components per point.
    pub minus: Vec<CVec2>,
    /// Unstable field `a₊`.
    pub plus: Vec<CVec2>,
}

impl DirectionField {
    /// Index of the sample nearest to `theta` in the torus metric.
    pub fn nearest(&self, theta: &HullPoint) -> Result<usize> {
        if self.points.is_empty() {
            return Err(Error::MissingSample);
        }
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = p.distance(theta);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        Ok(best)
    }
}

/// Extract the direction fields from a reduction frame:
/// `a₋ = (g₂₂, −g₁₂)/det g`, `a₊ = (−g₂₁, g₁₁)/det g` at each frame sample.
pub fn anosov_directions(frame: &ReductionFrame) -> Result<DirectionField> {
    let n = frame.samples.len() - 1; // final sample duplicates t = 0
    let mut points = Vec::with_capacity(n);
    let mut minus = Vec::with_capacity(n);
    let mut plus = Vec::with_capacity(n);
    for (idx, (t_k, g)) in frame.samples.iter().take(n).enumerate() {
        let det = cmat_det(g);
        if det.norm() < 1e-10 {
            return Err(Error::SingularFrame { index: idx });
        }
        points.push(flow(&frame.theta0, *t_k, &frame.omega)?);
        minus.push([g[1][1] / det, -g[0][1] / det]);
        plus.push([-g[1][0] / det, g[0][0] / det]);
    }
    Ok(DirectionField {
        points,
        minus,
        plus,
    })
}

/// Direct comparison of the conjugation relation multiplies every rounding
/// error by `e^{|Re λ·Δt|}` (the growing mode lives in the propagator even
/// when the tested direction decays). Beyond this threshold each sign is
/// checked in its expanding orientation — the decaying field from `t` back
/// to `t₀` — with magnitudes compared in log space, which keeps the check
/// conditioned and overflow-free at any span.
pub const LOG_COMPARISON_THRESHOLD: f64 = 12.0;

/// One orientation of the relation
/// `(F(t_to, t_from)⁻¹)ᵀ a(φ^{t_from}θ) = e^{λ(t_to−t_from)} a(φ^{t_to}θ)`;
/// the caller arranges `Re λ·(t_to − t_from) ≥ 0`.
fn one_sided_residual(
    driving: &OrbitDriving,
    cfg: &IntegratorConfig,
    lambda: Complex64,
    t_from: f64,
    t_to: f64,
    a_from: &CVec2,
    a_to: &CVec2,
) -> Result<f64> {
    let dt = t_to - t_from;
    let log_scale = lambda.re * dt;
    let residual = if log_scale <= LOG_COMPARISON_THRESHOLD {
        let f = integrate_mat2(driving, t_from, t_to, cfg)?;
        let push = mat2::j_conjugate(&f);
        let moved = rmat_apply_cvec(&push, a_from);
        let factor = (lambda * dt).exp();
        let target_norm = cvec_norm(a_to);
        let diff = [moved[0] - factor * a_to[0], moved[1] - factor * a_to[1]];
        cvec_norm(&diff) / target_norm
    } else {
        // renormalized propagation; compare the magnitude in log space and
        // the phased ray separately
        let k = math::ceil(dt.abs() / cfg.renorm_interval).max(1.0) as usize;
        let step = dt / k as f64;
        let mut c = *a_from;
        let mut log_acc = 0.0;
        for j in 0..k {
            let a = t_from + j as f64 * step;
            let seg = integrate_mat2(driving, a, a + step, cfg)?;
            let push = mat2::j_conjugate(&seg);
            c = rmat_apply_cvec(&push, &c);
            let n = cvec_norm(&c);
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::NonFinite("field propagation"));
            }
            log_acc += math::ln(n);
            c = [c[0] / n, c[1] / n];
        }
        // log_acc = ln‖B(t_to, t_from) a_from‖, compared with
        // Re λ·Δt + ln‖a_to‖
        let target_norm = cvec_norm(a_to);
        let log_mismatch = (log_acc - log_scale - math::ln(target_norm)).abs();
        let phase = Complex64::new(0.0, lambda.im * dt).exp();
        let that = [
            a_to[0] * (phase / target_norm),
            a_to[1] * (phase / target_norm),
        ];
        let dir_mismatch = cvec_norm(&[c[0] - that[0], c[1] - that[1]]);
        log_mismatch.max(dir_mismatch)
    };
    if !residual.is_finite() {
        return Err(Error::NonFinite("anosov residual"));
    }
    Ok(residual)
}

/// Relation residual
/// `‖(F⁻¹)ᵀ a_±(φ^{t₀}θ) − e^{λ_±(t−t₀)} a_±(φ^{t}θ)‖ / ‖a_±(φ^{t}θ)‖`,
/// maximized over both signs. Field values are looked up at the nearest
/// sample; `lambdas = (λ₋, λ₊)`. Spans with
/// `|Re λ (t−t₀)| >` [`LOG_COMPARISON_THRESHOLD`] are verified in the
/// expanding orientation with log-space magnitudes.
pub fn anosov_residual(
    spec: &DrivingSpec,
    theta: &HullPoint,
    field: &DirectionField,
    lambdas: (Complex64, Complex64),
    t0: f64,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    cfg.validate(spec)?;
    let theta_t0 = flow(theta, t0, spec.omega())?;
    let theta_t = flow(theta, t, spec.omega())?;
    let i0 = field.nearest(&theta_t0)?;
    let i1 = field.nearest(&theta_t)?;
    let driving = OrbitDriving::new(spec, theta)?;
    let dt = t - t0;

    let mut worst = 0.0_f64;
    for (lambda, start, target) in [
        (lambdas.0, field.minus[i0], field.minus[i1]),
        (lambdas.1, field.plus[i0], field.plus[i1]),
    ] {
        let residual = if lambda.re * dt >= 0.0 {
            one_sided_residual(&driving, cfg, lambda, t0, t, &start, &target)?
        } else {
            // decaying span: the same relation read from t back to t₀ is
            // expanding, where it is numerically verifiable
            one_sided_residual(&driving, cfg, lambda, t, t0, &target, &start)?
        };
        worst = worst.max(residual);
    }
    Ok(worst)
}

/// Verification certificate for a direction field.
#[derive(Debug, Clone)]
pub struct AnosovCertificate {
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub classification: GapClass,
    /// One residual per checked `(t₀, t)` pair.
    pub residuals: Vec<f64>,
    pub residual_max: f64,
    pub tolerance: f64,
    pub verdict: bool,
    /// Number of field samples.
    pub grid: usize,
}

/// Run [`anosov_residual`] over a family of `(t₀, t)` pairs and aggregate.
pub fn certify(
    spec: &DrivingSpec,
    theta: &HullPoint,
    field: &DirectionField,
    lambda_plus: Complex64,
    pairs: &[(f64, f64)],
    tolerance: f64,
    classification: GapClass,
    cfg: &IntegratorConfig,
) -> Result<AnosovCertificate> {
    let lambda_minus = -lambda_plus;
    let mut residuals = Vec::with_capacity(pairs.len());
    let mut max = 0.0_f64;
    for &(t0, t) in pairs {
        let r = anosov_residual(
            spec,
            theta,
            field,
            (lambda_minus, lambda_plus),
            t0,
            t,
            cfg,
        )?;
        max = max.max(r);
        residuals.push(r);
    }
    Ok(AnosovCertificate {
        lambda_plus,
        lambda_minus,
        classification,
        residuals,
        residual_max: max,
        tolerance,
        verdict: max <= tolerance,
        grid: field.points.len(),
    })
}

/// Finite-horizon dichotomy estimate for quasi-periodic driving.
#[derive(Debug, Clone)]
pub struct QuasiDichotomy {
    pub field: DirectionField,
    /// Classical exponent estimate; the field exponents are `±lambda`.
    pub lambda: f64,
    pub lambda_stderr: f64,
}

fn forward_unstable(
    driving: &OrbitDriving,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec2> {
    // renormalized product of segment pushforwards; the dominant column is
    // the unstable coefficient direction at the endpoint, with no
    // probe-vector dependence
    let mut product = mat2::IDENTITY;
    lyapunov::for_each_segment(driving, 0.0, horizon, cfg, |seg, _| {
        let push = mat2::j_conjugate(seg);
        product = mat2::mul(&push, &product);
        let n = mat2::frobenius(&product);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::NonFinite("unstable-direction estimate"));
        }
        for row in product.iter_mut() {
            row[0] /= n;
            row[1] /= n;
        }
        Ok(())
    })?;
    Ok(mat2::dominant_column(&product))
}

fn canonical_sign(v: Vec2) -> Vec2 {
    let sign = if v[0].abs() > 1e-12 {
        v[0].signum()
    } else {
        v[1].signum()
    };
    mat2::scale(&v, sign)
}

/// Estimate the Anosov direction fields on a grid of hull points for a
/// quasi-periodic spec (`d ≥ 2`): `a₊(θ)` is the image of a generic
/// coefficient vector pushed forward from `φ^{−h}(θ)`, `a₋(θ)` the limit ray
/// of the adjoint chain over `[0, h]` at `θ`. Both must be stable under
/// horizon halving (angle ≤ 1e-4). The exponents are assigned as
/// `±λ_c` (real); finite-horizon estimation cannot resolve an imaginary
/// part, which certificates must treat as a caveat.
pub fn quasiperiodic_direction_field(
    spec: &DrivingSpec,
    theta_grid: &[HullPoint],
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<QuasiDichotomy> {
    if spec.dim() < 2 {
        return Err(Error::InvalidParameter(
            "quasi-periodic estimator needs hull dimension ≥ 2",
        ));
    }
    if theta_grid.is_empty() {
        return Err(Error::MissingSample);
    }
    cfg.validate(spec)?;
    let est = classical_lyapunov(spec, &theta_grid[0], horizon, cfg)?;
    if est.value <= 3.0 * est.slope_stderr {
        return Err(Error::NonHyperbolic {
            lambda: est.value,
            stderr: est.slope_stderr,
        });
    }

    let mut points = Vec::with_capacity(theta_grid.len());
    let mut minus = Vec::with_capacity(theta_grid.len());
    let mut plus = Vec::with_capacity(theta_grid.len());
    for theta in theta_grid {
        // unstable: push forward from the past into θ
        let base_full = flow(theta, -horizon, spec.omega())?;
        let drv_full = OrbitDriving::new(spec, &base_full)?;
        let u_full = forward_unstable(&drv_full, horizon, cfg)?;
        let base_half = flow(theta, -horizon / 2.0, spec.omega())?;
        let drv_half = OrbitDriving::new(spec, &base_half)?;
        let u_half = forward_unstable(&drv_half, horizon / 2.0, cfg)?;
        let angle = mat2::ray_angle(&u_full, &u_half);
        if angle > 1e-4 {
            return Err(Error::HorizonTooShort { angle });
        }

        // stable: adjoint chain anchored at θ
        let drv = OrbitDriving::new(spec, theta)?;
        let (_, s_full) = lyapunov::adjoint_pass(&drv, 0.0, horizon, cfg)?;
        let (_, s_half) = lyapunov::adjoint_pass(&drv, 0.0, horizon / 2.0, cfg)?;
        let angle = mat2::ray_angle(&s_full, &s_half);
        if angle > 1e-4 {
            return Err(Error::HorizonTooShort { angle });
        }

        let u = canonical_sign(u_full);
        let s = canonical_sign(s_full);
        points.push(theta.clone());
        plus.push([Complex64::new(u[0], 0.0), Complex64::new(u[1], 0.0)]);
        minus.push([Complex64::new(s[0], 0.0), Complex64::new(s[1], 0.0)]);
    }
    Ok(QuasiDichotomy {
        field: DirectionField {
            points,
            minus,
            plus,
        },
        lambda: est.value,
        lambda_stderr: est.slope_stderr,
    })
}
