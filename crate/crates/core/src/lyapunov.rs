//! Classical and quantum Lyapunov exponent estimators.
//!
//! All estimators integrate the classical cocycle in `renorm_interval`-length
//! segments, renormalize the propagated vector after each segment, and keep
//! the accumulated growth in log space, so horizons are not limited by
//! floating-point range. The limsup in the exponent definitions is estimated
//! as the least-squares slope of the log amplitude over the tail window
//! `[horizon/2, horizon]`; `slope_stderr` quantifies convergence.
//!
//! Three propagated quantities appear:
//!
//! - classical phase vectors, `z ↦ F z`, for the classical exponent;
//! - coefficient vectors under the Heisenberg conjugation
//!   `U(t,t₀) L U†(t,t₀)`, `c ↦ (F⁻¹)ᵀ c = J F J⁻¹ c`, whose commutator norm
//!   with a Weyl label gives the quantum exponent along a direction;
//! - the reversed-transpose (adjoint) chain `F_1ᵀ ⋯ F_Kᵀ w`, whose limit ray
//!   is the stable coefficient direction at the start time and whose growth
//!   rate estimates the magnitude of the stable exponent without being
//!   contaminated by the growing mode.
//!
//! Forward propagation of the stable direction itself is only trustworthy up
//! to `t* ≈ 0.8·ln(1/ε)/(2λ)`; past that, rounding injects the growing mode.
//! The stable entry of a [`DirectionProfile`] therefore always comes from the
//! adjoint chain.

use alloc::vec;
use alloc::vec::Vec;

use crate::cocycle::{integrate_mat2, IntegratorConfig, OrbitDriving};
use crate::error::{Error, Result};
use crate::hull::{flow, DrivingSpec, HullPoint};
use crate::mat2::{self, Mat2, Vec2};
use crate::math;
use crate::weyl::{Direction, WeylLabel};

/// Relative floor below which a commutator sample is treated as a zero
/// crossing and dropped from the regression.
const SIGMA_DROP_REL: f64 = 1e-3;

/// Minimum usable samples in a regression window.
const MIN_SAMPLES: usize = 10;

/// Deterministic generic probe vector (unit norm).
pub(crate) const PROBE: Vec2 = [0.6, 0.8];

/// Finite-horizon exponent estimate with its regression diagnostics.
#[derive(Debug, Clone)]
pub struct LyapunovEstimate {
    /// Regression slope over the tail window, 1/time units.
    pub value: f64,
    /// Total propagation horizon.
    pub horizon: f64,
    /// Regression window as elapsed-time offsets `(t_lo, t_hi)`,
    /// `t_lo ≥ horizon/2`.
    pub window: (f64, f64),
    /// Standard error of the regression slope.
    pub slope_stderr: f64,
    /// `(elapsed time, log amplitude)` samples, monotone in time.
    pub samples: Vec<(f64, f64)>,
}

/// Exponents of a family of unit directions, with the stable direction
/// appended when the spec is resolvably hyperbolic.
#[derive(Debug, Clone)]
pub struct DirectionProfile {
    pub t0: f64,
    pub directions: Vec<Direction>,
    pub exponents: Vec<LyapunovEstimate>,
    /// Index of the stable direction within `directions`, when present.
    pub stable_index: Option<usize>,
}

/// Least-squares slope and its standard error over samples whose abscissa
/// falls inside `window`.
fn fit_tail(samples: &[(f64, f64)], window: (f64, f64)) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|(t, _)| *t >= window.0 - 1e-9 && *t <= window.1 + 1e-9)
        .collect();
    let m = pts.len();
    if m < MIN_SAMPLES {
        return Err(Error::DegenerateRegression { samples: m });
    }
    let mf = m as f64;
    let tbar = pts.iter().map(|(t, _)| t).sum::<f64>() / mf;
    let ybar = pts.iter().map(|(_, y)| y).sum::<f64>() / mf;
    let sxx: f64 = pts.iter().map(|(t, _)| (t - tbar) * (t - tbar)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateRegression { samples: m });
    }
    let sxy: f64 = pts.iter().map(|(t, y)| (t - tbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * tbar;
    let ss_res: f64 = pts
        .iter()
        .map(|(t, y)| {
            let r = y - (intercept + slope * t);
            r * r
        })
        .sum();
    let stderr = math::sqrt(ss_res / (mf - 2.0) / sxx);
    if !slope.is_finite() || !stderr.is_finite() {
        return Err(Error::NonFinite("regression"));
    }
    Ok((slope, stderr))
}

/// Segment plan covering `[t_start, t_start + horizon]` in near-uniform
/// pieces no longer than `renorm_interval`.
fn segment_count(horizon: f64, cfg: &IntegratorConfig) -> Result<usize> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidParameter("horizon must be positive"));
    }
    let k = math::ceil(horizon / cfg.renorm_interval);
    if k > 1e7 {
        return Err(Error::InvalidParameter("horizon too long for the given renorm interval"));
    }
    Ok((k as usize).max(1))
}

/// Drive `visit(segment_matrix, elapsed_end_time)` over consecutive segments.
pub(crate) fn for_each_segment(
    driving: &OrbitDriving,
    t_start: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
    mut visit: impl FnMut(&Mat2, f64) -> Result<()>,
) -> Result<()> {
    let k = segment_count(horizon, cfg)?;
    let dt = horizon / k as f64;
    for j in 1..=k {
        let a = t_start + (j - 1) as f64 * dt;
        let b = t_start + j as f64 * dt;
        let seg = integrate_mat2(driving, a, b, cfg)?;
        visit(&seg, j as f64 * dt)?;
    }
    Ok(())
}

/// Renormalized log-amplitude samples of `z ↦ F z` along the orbit.
fn classical_samples(
    driving: &OrbitDriving,
    t_start: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<(f64, f64)>> {
    let mut z = PROBE;
    let mut log_acc = 0.0;
    let mut samples = vec![(0.0, 0.0)];
    for_each_segment(driving, t_start, horizon, cfg, |seg, elapsed| {
        z = mat2::apply(seg, &z);
        let n = mat2::norm(&z);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::NonFinite("classical propagation"));
        }
        log_acc += math::ln(n);
        z = mat2::scale(&z, 1.0 / n);
        samples.push((elapsed, log_acc));
        Ok(())
    })?;
    Ok(samples)
}

/// Classical Lyapunov exponent: slope of `(1/2)·ln(|p|² + |q|²)` over the
/// tail window, with per-segment renormalization in log space.
///
/// Callers should allow `horizon ≥ 20 · max(1, 1/λ_expected)` for the tail
/// regression to settle.
pub fn classical_lyapunov(
    spec: &DrivingSpec,
    theta: &HullPoint,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<LyapunovEstimate> {
    cfg.validate(spec)?;
    let driving = OrbitDriving::new(spec, theta)?;
    let samples = classical_samples(&driving, 0.0, horizon, cfg)?;
    let window = (horizon / 2.0, horizon);
    let (slope, stderr) = fit_tail(&samples, window)?;
    Ok(LyapunovEstimate {
        value: slope,
        horizon,
        window,
        slope_stderr: stderr,
        samples,
    })
}

/// `σ(c, β)` on stacked `(c_p, c_x)` coefficient pairs.
#[inline(always)]
fn sigma2(c: &Vec2, beta: &Vec2) -> f64 {
    // σ(a, b) = a_x·b_p − a_p·b_x with stacked (p, x) pairs
    c[1] * beta[0] - c[0] * beta[1]
}

struct SigmaTrack {
    c: Vec2,
    log_acc: f64,
    samples: Vec<(f64, f64)>,
}

/// Propagate several coefficient directions through the Heisenberg
/// conjugation `c ↦ J F J⁻¹ c` in one pass, sampling the commutator log-norm
/// `ln|σ(c, β)|` per direction.
fn pushforward_pass(
    driving: &OrbitDriving,
    t_start: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
    dirs: &[Vec2],
    beta: &Vec2,
) -> Result<Vec<SigmaTrack>> {
    let beta_norm = mat2::norm(beta);
    let mut tracks: Vec<SigmaTrack> = dirs
        .iter()
        .map(|d| {
            let n = mat2::norm(d);
            let c = mat2::scale(d, 1.0 / n);
            let mut tr = SigmaTrack {
                c,
                log_acc: 0.0,
                samples: Vec::new(),
            };
            let s = sigma2(&tr.c, beta).abs();
            if s >= SIGMA_DROP_REL * beta_norm {
                tr.samples.push((0.0, math::ln(s)));
            }
            tr
        })
        .collect();
    for_each_segment(driving, t_start, horizon, cfg, |seg, elapsed| {
        let push = mat2::j_conjugate(seg);
        for tr in tracks.iter_mut() {
            tr.c = mat2::apply(&push, &tr.c);
            let n = mat2::norm(&tr.c);
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::NonFinite("coefficient propagation"));
            }
            tr.log_acc += math::ln(n);
            tr.c = mat2::scale(&tr.c, 1.0 / n);
            let s = sigma2(&tr.c, beta).abs();
            if s >= SIGMA_DROP_REL * beta_norm {
                tr.samples.push((elapsed, tr.log_acc + math::ln(s)));
            }
        }
        Ok(())
    })?;
    Ok(tracks)
}

fn stacked2(a: &Direction) -> Result<Vec2> {
    if a.n() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: a.n(),
        });
    }
    Ok([a.alpha_p()[0], a.alpha_x()[0]])
}

/// Quantum Lyapunov exponent along direction `a`, probed against the Weyl
/// label `β`: slope of `ln ‖[L_a(t₀, t), W(β)]‖ = ln |σ(c(t), β)|` over the
/// tail window, where `c(t)` is the pushforward-evolved coefficient vector.
///
/// Samples where the commutator passes through zero are dropped; if every
/// sample in the window vanishes the label is degenerate for this direction
/// and [`Error::ZeroCommutator`] is returned.
pub fn quantum_lyapunov_along(
    spec: &DrivingSpec,
    theta: &HullPoint,
    a: &Direction,
    beta: &WeylLabel,
    t0: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<LyapunovEstimate> {
    cfg.validate(spec)?;
    let c0 = stacked2(a)?;
    if mat2::norm(&c0) == 0.0 {
        return Err(Error::InvalidParameter("direction must be nonzero"));
    }
    let b = stacked2(beta.as_direction())?;
    if mat2::norm(&b) == 0.0 {
        return Err(Error::ZeroCommutator);
    }
    let driving = OrbitDriving::new(spec, theta)?;
    let tracks = pushforward_pass(&driving, t0, horizon, cfg, &[c0], &b)?;
    let track = &tracks[0];
    let window = (horizon / 2.0, horizon);
    let in_window = track
        .samples
        .iter()
        .filter(|(t, _)| *t >= window.0 - 1e-9)
        .count();
    if in_window == 0 {
        return Err(Error::ZeroCommutator);
    }
    let (slope, stderr) = fit_tail(&track.samples, window)?;
    Ok(LyapunovEstimate {
        value: slope,
        horizon,
        window,
        slope_stderr: stderr,
        samples: track.samples.clone(),
    })
}

/// Adjoint-chain pass: integrate segments over `[t_start, t_start+horizon]`,
/// then accumulate the renormalized product `F_1ᵀ ⋯ F_Kᵀ` in reverse segment
/// order. Returns the log-growth samples (abscissa = reversed elapsed time)
/// and the dominant column of the product, which converges to the stable
/// coefficient direction at `t_start` with no probe-vector dependence.
pub(crate) fn adjoint_pass(
    driving: &OrbitDriving,
    t_start: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<(Vec<(f64, f64)>, Vec2)> {
    let mut segments: Vec<Mat2> = Vec::new();
    for_each_segment(driving, t_start, horizon, cfg, |seg, _| {
        segments.push(*seg);
        Ok(())
    })?;
    let k = segments.len();
    let dt = horizon / k as f64;
    let mut product = mat2::IDENTITY;
    let mut log_acc = 0.0;
    let mut samples = vec![(0.0, 0.0)];
    for (idx, seg) in segments.iter().rev().enumerate() {
        product = mat2::mul_transpose_left(seg, &product);
        let n = mat2::frobenius(&product);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::NonFinite("adjoint propagation"));
        }
        log_acc += math::ln(n);
        for row in product.iter_mut() {
            row[0] /= n;
            row[1] /= n;
        }
        samples.push(((idx + 1) as f64 * dt, log_acc));
    }
    Ok((samples, mat2::dominant_column(&product)))
}

fn hyperbolicity_check(
    spec: &DrivingSpec,
    theta: &HullPoint,
    t0: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<LyapunovEstimate> {
    let flowed = flow(theta, t0, spec.omega())?;
    let est = classical_lyapunov(spec, &flowed, horizon, cfg)?;
    if est.value <= 3.0 * est.slope_stderr {
        return Err(Error::NonHyperbolic {
            lambda: est.value,
            stderr: est.slope_stderr,
        });
    }
    Ok(est)
}

/// Stable coefficient direction at `t₀`: the unit direction whose pushforward
/// coefficient norm decays. Computed as the limit ray of the adjoint chain
/// (power iteration on the transposed finite-horizon cocycle); errors if the
/// spec is not resolvably hyperbolic or if the ray has not converged between
/// `horizon/2` and `horizon`.
pub fn stable_direction(
    spec: &DrivingSpec,
    theta: &HullPoint,
    t0: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<Direction> {
    cfg.validate(spec)?;
    hyperbolicity_check(spec, theta, t0, horizon, cfg)?;
    let driving = OrbitDriving::new(spec, theta)?;
    let (_, full) = adjoint_pass(&driving, t0, horizon, cfg)?;
    let (_, half) = adjoint_pass(&driving, t0, horizon / 2.0, cfg)?;
    let angle = mat2::ray_angle(&full, &half);
    if angle > 1e-6 {
        return Err(Error::HorizonTooShort { angle });
    }
    Direction::from_stacked(&[full[0], full[1]])?.canonical_unit()
}

/// Exponents of `count` equally spaced unit directions, with the stable
/// direction and its (adjoint-estimated) exponent appended when the spec is
/// hyperbolic. The sampled grid is rotated by `π/(2·count)` if a grid
/// direction falls on the stable ray, so that exactly one profile entry
/// carries the stable exponent.
pub fn direction_profile(
    spec: &DrivingSpec,
    theta: &HullPoint,
    t0: f64,
    count: usize,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<DirectionProfile> {
    if count < 4 {
        return Err(Error::InvalidParameter("direction count must be ≥ 4"));
    }
    cfg.validate(spec)?;
    let beta = WeylLabel::scalar(1.0, 1.0).expect("default label");
    let b = stacked2(beta.as_direction())?;
    let driving = OrbitDriving::new(spec, theta)?;

    let stable = match hyperbolicity_check(spec, theta, t0, horizon, cfg) {
        Ok(_) => {
            let (samples, v) = adjoint_pass(&driving, t0, horizon, cfg)?;
            let (_, half) = adjoint_pass(&driving, t0, horizon / 2.0, cfg)?;
            let angle = mat2::ray_angle(&v, &half);
            if angle > 1e-6 {
                return Err(Error::HorizonTooShort { angle });
            }
            Some((samples, v))
        }
        Err(Error::NonHyperbolic { .. }) => None,
        Err(e) => return Err(e),
    };

    // Unit directions on the circle; stacked angle measured from the α_p
    // axis. If a sampled ray lands on the stable ray, rotate the whole grid
    // so exactly one profile entry is stable (π/(2·count) clears the stable
    // ray for even and odd counts alike).
    let tau = 2.0 * core::f64::consts::PI;
    let mut offset = 0.0;
    if let Some((_, v)) = &stable {
        let spacing = tau / count as f64;
        let collision = (0..count).any(|j| {
            let psi = spacing * j as f64;
            let dir = [math::cos(psi), math::sin(psi)];
            mat2::ray_angle(&dir, v) < spacing * 1e-2
        });
        if collision {
            offset = core::f64::consts::PI / (2.0 * count as f64);
        }
    }
    let grid: Vec<Vec2> = (0..count)
        .map(|j| {
            let psi = offset + tau * j as f64 / count as f64;
            [math::cos(psi), math::sin(psi)]
        })
        .collect();

    let tracks = pushforward_pass(&driving, t0, horizon, cfg, &grid, &b)?;
    let window = (horizon / 2.0, horizon);
    let mut directions = Vec::with_capacity(count + 1);
    let mut exponents = Vec::with_capacity(count + 1);
    for (dir, track) in grid.iter().zip(tracks.iter()) {
        let (slope, stderr) = fit_tail(&track.samples, window)?;
        directions.push(Direction::from_stacked(&[dir[0], dir[1]])?);
        exponents.push(LyapunovEstimate {
            value: slope,
            horizon,
            window,
            slope_stderr: stderr,
            samples: track.samples.clone(),
        });
    }

    let stable_index = if let Some((adj_samples, v)) = stable {
        // Stable exponent = −(growth rate of the adjoint chain); store the
        // negated log samples so the stored slope matches the value.
        let negated: Vec<(f64, f64)> = adj_samples.iter().map(|&(t, y)| (t, -y)).collect();
        let (slope, stderr) = fit_tail(&negated, window)?;
        directions.push(Direction::from_stacked(&[v[0], v[1]])?.canonical_unit()?);
        exponents.push(LyapunovEstimate {
            value: slope,
            horizon,
            window,
            slope_stderr: stderr,
            samples: negated,
        });
        Some(directions.len() - 1)
    } else {
        None
    };

    Ok(DirectionProfile {
        t0,
        directions,
        exponents,
        stable_index,
    })
}

/// Upper quantum Lyapunov exponent: the supremum of the directional exponents,
/// taken over a 16-direction profile (plus the stable direction).
pub fn upper_lyapunov(
    spec: &DrivingSpec,
    theta: &HullPoint,
    t0: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let profile = direction_profile(spec, theta, t0, 16, horizon, cfg)?;
    Ok(profile
        .exponents
        .iter()
        .map(|e| e.value)
        .fold(f64::NEG_INFINITY, f64::max))
}
