//! Integration of the classical linear system behind the driven oscillator.
//!
//! The propagator `F(t, t₀; θ)` of
//!
//! ```text
//! d/dt (p, q)ᵀ = [[0, V(φ^t(θ)) − E], [1, 0]] (p, q)ᵀ
//! ```
//!
//! is integrated with fixed-step classical RK4 on the fundamental matrix.
//! Fixed steps keep exponent estimates reproducible and give clean
//! order-of-convergence tests; backward integration uses a negated time
//! increment instead of matrix inversion. Only the scalar oscillator (one
//! degree of freedom) is integrated; the produced matrices have `n = 1`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hull::{flow, DrivingSpec, HullPoint};
use crate::mat2::{self, Mat2};
use crate::math;
use crate::weyl::SymplecticMatrix;

/// Fixed-step RK4 configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    /// Integration step, time units.
    pub step: f64,
    /// Segment length between renormalizations (and between log samples) in
    /// the long-horizon estimators.
    pub renorm_interval: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            renorm_interval: 1.0,
        }
    }
}

impl IntegratorConfig {
    /// Shorthand for a config with a non-default sampling interval.
    pub fn with_renorm_interval(renorm_interval: f64) -> Self {
        Self {
            renorm_interval,
            ..Self::default()
        }
    }

    /// Check the config against the spec's stiffness bound:
    /// `step · max|f| ≤ 0.1`.
    pub fn validate(&self, spec: &DrivingSpec) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidParameter("step must be positive"));
        }
        if !(self.renorm_interval > 0.0 && self.renorm_interval.is_finite()) {
            return Err(Error::InvalidParameter("renorm_interval must be positive"));
        }
        if self.step > self.renorm_interval {
            return Err(Error::InvalidParameter("step must not exceed renorm_interval"));
        }
        let f_bound = spec.f_bound();
        if self.step * f_bound.max(1.0) > 0.1 + 1e-12 {
            return Err(Error::StabilityGuard {
                step: self.step,
                f_bound,
            });
        }
        Ok(())
    }
}

/// Propagator over `[t₀, t₁]` at hull point `θ`, `F(t₁, t₀; θ)`.
#[derive(Debug, Clone)]
pub struct CocycleSegment {
    pub f: SymplecticMatrix,
    pub t0: f64,
    pub t1: f64,
    pub theta: HullPoint,
}

/// Stiffness evaluated along one orbit, reduced to scalar phases so the inner
/// loop never touches the hull types.
#[derive(Debug, Clone)]
pub(crate) struct OrbitDriving {
    /// `c − E`
    base: f64,
    /// `(k·θ₀, k·ω, a, b)` per mode
    terms: Vec<(f64, f64, f64, f64)>,
}

impl OrbitDriving {
    pub(crate) fn new(spec: &DrivingSpec, theta: &HullPoint) -> Result<Self> {
        if spec.dim() != theta.dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.dim(),
                got: theta.dim(),
            });
        }
        let omega = spec.omega().components();
        let terms = spec
            .potential()
            .terms()
            .iter()
            .map(|t| {
                let phase0: f64 = t
                    .k
                    .iter()
                    .zip(theta.angles().iter())
                    .map(|(&k, &th)| k as f64 * th)
                    .sum();
                let freq: f64 = t
                    .k
                    .iter()
                    .zip(omega.iter())
                    .map(|(&k, &w)| k as f64 * w)
                    .sum();
                (phase0, freq, t.a, t.b)
            })
            .collect();
        Ok(Self {
            base: spec.potential().constant() - spec.spectral_parameter(),
            terms,
        })
    }

    /// `V(φ^t(θ)) − E`, the off-diagonal entry of the system matrix.
    #[inline(always)]
    pub(crate) fn g(&self, t: f64) -> f64 {
        let mut acc = self.base;
        for &(phase0, freq, a, b) in &self.terms {
            let phase = phase0 + freq * t;
            acc += a * math::cos(phase) + b * math::sin(phase);
        }
        acc
    }
}

/// One RK4 step of the fundamental matrix `Φ' = A(t)Φ` with
/// `A = [[0, g], [1, 0]]`.
#[inline(always)]
fn rk4_step(driving: &OrbitDriving, t: f64, h: f64, phi: &Mat2) -> Mat2 {
    #[inline(always)]
    fn a_mul(g: f64, m: &Mat2) -> Mat2 {
        [[g * m[1][0], g * m[1][1]], [m[0][0], m[0][1]]]
    }
    let g0 = driving.g(t);
    let gh = driving.g(t + 0.5 * h);
    let g1 = driving.g(t + h);

    let k1 = a_mul(g0, phi);
    let p2 = [
        [phi[0][0] + 0.5 * h * k1[0][0], phi[0][1] + 0.5 * h * k1[0][1]],
        [phi[1][0] + 0.5 * h * k1[1][0], phi[1][1] + 0.5 * h * k1[1][1]],
    ];
    let k2 = a_mul(gh, &p2);
    let p3 = [
        [phi[0][0] + 0.5 * h * k2[0][0], phi[0][1] + 0.5 * h * k2[0][1]],
        [phi[1][0] + 0.5 * h * k2[1][0], phi[1][1] + 0.5 * h * k2[1][1]],
    ];
    let k3 = a_mul(gh, &p3);
    let p4 = [
        [phi[0][0] + h * k3[0][0], phi[0][1] + h * k3[0][1]],
        [phi[1][0] + h * k3[1][0], phi[1][1] + h * k3[1][1]],
    ];
    let k4 = a_mul(g1, &p4);

    let w = h / 6.0;
    [
        [
            phi[0][0] + w * (k1[0][0] + 2.0 * (k2[0][0] + k3[0][0]) + k4[0][0]),
            phi[0][1] + w * (k1[0][1] + 2.0 * (k2[0][1] + k3[0][1]) + k4[0][1]),
        ],
        [
            phi[1][0] + w * (k1[1][0] + 2.0 * (k2[1][0] + k3[1][0]) + k4[1][0]),
            phi[1][1] + w * (k1[1][1] + 2.0 * (k2[1][1] + k3[1][1]) + k4[1][1]),
        ],
    ]
}

/// Raw fundamental-matrix integration over `[t0, t1]`; `t1 < t0` integrates
/// backward with a negated increment.
pub(crate) fn integrate_mat2(
    driving: &OrbitDriving,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<Mat2> {
    if !(t0.is_finite() && t1.is_finite()) {
        return Err(Error::NonFinite("integration endpoints"));
    }
    let length = t1 - t0;
    if length == 0.0 {
        return Ok(mat2::IDENTITY);
    }
    let nsteps = math::ceil(length.abs() / cfg.step).max(1.0);
    if nsteps > 1e12 {
        return Err(Error::InvalidParameter("interval too long for the given step"));
    }
    let nsteps = nsteps as u64;
    let h = length / nsteps as f64;
    let mut phi = mat2::IDENTITY;
    for k in 0..nsteps {
        let t = t0 + k as f64 * h;
        phi = rk4_step(driving, t, h, &phi);
    }
    if !phi.iter().flatten().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("integrated propagator"));
    }
    Ok(phi)
}

fn to_symplectic(m: Mat2) -> SymplecticMatrix {
    SymplecticMatrix::new_unchecked(1, alloc::vec![m[0][0], m[0][1], m[1][0], m[1][1]])
        .expect("2x2 buffer")
}

/// Integrate the cocycle `F(t₁, t₀; θ)` for the given driving.
pub fn integrate_cocycle(
    spec: &DrivingSpec,
    theta: &HullPoint,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<CocycleSegment> {
    cfg.validate(spec)?;
    let driving = OrbitDriving::new(spec, theta)?;
    let phi = integrate_mat2(&driving, t0, t1, cfg)?;
    Ok(CocycleSegment {
        f: to_symplectic(phi),
        t0,
        t1,
        theta: theta.clone(),
    })
}

/// `F(t, t₁; θ) F(t₁, t₀; θ) = F(t, t₀; θ)`: multiply segments with matching
/// interior endpoint and hull point.
pub fn compose(later: &CocycleSegment, earlier: &CocycleSegment) -> Result<CocycleSegment> {
    let scale = 1.0_f64.max(later.t0.abs()).max(earlier.t1.abs());
    if (later.t0 - earlier.t1).abs() > 1e-9 * scale {
        return Err(Error::EndpointMismatch {
            expected: earlier.t1,
            got: later.t0,
        });
    }
    if later.theta.distance(&earlier.theta) > 1e-12 {
        return Err(Error::HullMismatch);
    }
    Ok(CocycleSegment {
        f: later.f.matmul(&earlier.f)?,
        t0: earlier.t0,
        t1: later.t1,
        theta: earlier.theta.clone(),
    })
}

/// `‖F(t+τ, t₀+τ; θ) − F(t, t₀; φ^τ(θ))‖_∞`: the skew-shift covariance
/// residual of the integrated cocycle.
pub fn skew_shift_residual(
    spec: &DrivingSpec,
    theta: &HullPoint,
    t: f64,
    t0: f64,
    tau: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let shifted = integrate_cocycle(spec, theta, t0 + tau, t + tau, cfg)?;
    let moved_theta = flow(theta, tau, spec.omega())?;
    let moved = integrate_cocycle(spec, &moved_theta, t0, t, cfg)?;
    let residual = shifted
        .f
        .entries()
        .iter()
        .zip(moved.f.entries().iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::symplectic_deviation;

    fn max_diff(f: &SymplecticMatrix, reference: &Mat2) -> f64 {
        let e = f.entries();
        let r = [reference[0][0], reference[0][1], reference[1][0], reference[1][1]];
        e.iter()
            .zip(r.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn free_oracle(t: f64) -> Mat2 {
        [[1.0, 0.0], [t, 1.0]]
    }

    fn cosh_oracle(t: f64) -> Mat2 {
        [[t.cosh(), t.sinh()], [t.sinh(), t.cosh()]]
    }

    fn rotation_oracle(t: f64) -> Mat2 {
        [[t.cos(), -t.sin()], [t.sin(), t.cos()]]
    }

    #[test]
    fn free_particle_shear() {
        let spec = DrivingSpec::constant(0.0);
        let theta = HullPoint::origin(1);
        let cfg = IntegratorConfig::default();
        for &t in &[0.5, 1.0, 7.3] {
            let seg = integrate_cocycle(&spec, &theta, 0.0, t, &cfg).unwrap();
            assert!(max_diff(&seg.f, &free_oracle(t)) < 1e-11, "t = {t}");
        }
    }

    #[test]
    fn constant_hyperbolic_closed_form() {
        let spec = DrivingSpec::constant(-1.0);
        let theta = HullPoint::origin(1);
        let cfg = IntegratorConfig::default();
        for &t in &[0.5, 2.0, 5.0] {
            let seg = integrate_cocycle(&spec, &theta, 0.0, t, &cfg).unwrap();
            let scale = t.cosh();
            assert!(
                max_diff(&seg.f, &cosh_oracle(t)) < 1e-11 * scale,
                "t = {t}"
            );
        }
    }

    #[test]
    fn constant_elliptic_closed_form() {
        let spec = DrivingSpec::constant(1.0);
        let theta = HullPoint::origin(1);
        let cfg = IntegratorConfig::default();
        for &t in &[0.5, core::f64::consts::FRAC_PI_2, 11.0] {
            let seg = integrate_cocycle(&spec, &theta, 0.0, t, &cfg).unwrap();
            assert!(max_diff(&seg.f, &rotation_oracle(t)) < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn zero_length_is_identity() {
        let spec = DrivingSpec::mathieu(1.0, 0.3);
        let theta = HullPoint::origin(1);
        let seg =
            integrate_cocycle(&spec, &theta, 2.0, 2.0, &IntegratorConfig::default()).unwrap();
        assert_eq!(max_diff(&seg.f, &mat2::IDENTITY), 0.0);
    }

    #[test]
    fn fourth_order_convergence() {
        let spec = DrivingSpec::constant(-1.0);
        let theta = HullPoint::origin(1);
        let t = 2.0;
        let err = |step: f64| {
            let cfg = IntegratorConfig {
                step,
                renorm_interval: 1.0,
            };
            let seg = integrate_cocycle(&spec, &theta, 0.0, t, &cfg).unwrap();
            max_diff(&seg.f, &cosh_oracle(t))
        };
        let ratio = err(2e-2) / err(1e-2);
        assert!(
            (12.0..20.0).contains(&ratio),
            "expected ≈16x error reduction, got {ratio}"
        );
    }

    #[test]
    fn composition_examples() {
        let spec = DrivingSpec::constant(0.0);
        let theta = HullPoint::origin(1);
        let cfg = IntegratorConfig::default();
        let first = integrate_cocycle(&spec, &theta, 0.0, 1.2, &cfg).unwrap();
        let second = integrate_cocycle(&spec, &theta, 1.2, 3.0, &cfg).unwrap();
        let trivial = integrate_cocycle(&spec, &theta, 3.0, 3.0, &cfg).unwrap();

        let composed = compose(&second, &first).unwrap();
        assert!(max_diff(&composed.f, &free_oracle(3.0)) < 1e-10);
        let with_identity = compose(&trivial, &composed).unwrap();
        assert!(max_diff(&with_identity.f, &free_oracle(3.0)) < 1e-10);
    }

    #[test]
    fn composition_matches_direct_integration() {
        let spec = DrivingSpec::mathieu(0.6, 1.4);
        let theta = HullPoint::new(alloc::vec![0.7]).unwrap();
        let cfg = IntegratorConfig::default();
        let first = integrate_cocycle(&spec, &theta, 0.0, 4.3, &cfg).unwrap();
        let second = integrate_cocycle(&spec, &theta, 4.3, 9.1, &cfg).unwrap();
        let direct = integrate_cocycle(&spec, &theta, 0.0, 9.1, &cfg).unwrap();
        let composed = compose(&second, &first).unwrap();
        let diff = composed
            .f
            .entries()
            .iter()
            .zip(direct.f.entries().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-8, "composition vs direct differ by {diff}");
    }

    #[test]
    fn composition_rejects_mismatches() {
        let spec = DrivingSpec::constant(0.0);
        let theta = HullPoint::origin(1);
        let cfg = IntegratorConfig::default();
        let a = integrate_cocycle(&spec, &theta, 0.0, 1.0, &cfg).unwrap();
        let b = integrate_cocycle(&spec, &theta, 2.0, 3.0, &cfg).unwrap();
        assert!(matches!(
            compose(&b, &a),
            Err(Error::EndpointMismatch { .. })
        ));

        let other = HullPoint::new(alloc::vec![1.0]).unwrap();
        let c = integrate_cocycle(&spec, &other, 1.0, 2.0, &cfg).unwrap();
        assert!(matches!(compose(&c, &a), Err(Error::HullMismatch)));
    }

    #[test]
    fn skew_shift_residuals() {
        let cfg = IntegratorConfig::default();
        let theta = HullPoint::new(alloc::vec![0.3]).unwrap();

        let constant = DrivingSpec::constant(-0.7);
        let r0 = skew_shift_residual(&constant, &theta, 3.0, 0.0, 0.0, &cfg).unwrap();
        assert_eq!(r0, 0.0);
        let rc = skew_shift_residual(&constant, &theta, 3.0, 0.0, 2.9, &cfg).unwrap();
        assert!(rc < 1e-10, "autonomous residual {rc}");

        let mathieu = DrivingSpec::mathieu(0.5, 0.25);
        let rm = skew_shift_residual(&mathieu, &theta, 10.0, 0.0, 1.3, &cfg).unwrap();
        assert!(rm < 1e-7, "Mathieu skew residual {rm}");
    }

    #[test]
    fn symplectic_and_unimodular() {
        let theta = HullPoint::origin(1);
        let cfg = IntegratorConfig::default();

        // hyperbolic point: check while ‖F‖²·ε stays below the tolerance
        let tongue = DrivingSpec::mathieu(1.0, 0.25);
        let seg = integrate_cocycle(&tongue, &theta, 0.0, 8.0, &cfg).unwrap();
        let e = seg.f.entries();
        let det = e[0] * e[3] - e[1] * e[2];
        assert!(symplectic_deviation(&seg.f) < 1e-8, "tongue deviation");
        assert!((det - 1.0).abs() < 1e-8, "tongue det {det}");

        // elliptic point: propagator stays bounded out to horizon 100
        let elliptic = DrivingSpec::mathieu(1.0, 2.0);
        let seg = integrate_cocycle(&elliptic, &theta, 0.0, 100.0, &cfg).unwrap();
        let e = seg.f.entries();
        let det = e[0] * e[3] - e[1] * e[2];
        assert!(symplectic_deviation(&seg.f) < 1e-7, "elliptic deviation");
        assert!((det - 1.0).abs() < 1e-8, "elliptic det {det}");
    }

    #[test]
    fn backward_integration_inverts_forward() {
        let spec = DrivingSpec::mathieu(0.8, 1.1);
        let theta = HullPoint::new(alloc::vec![2.0]).unwrap();
        let cfg = IntegratorConfig::default();
        let fwd = integrate_cocycle(&spec, &theta, 0.0, 6.0, &cfg).unwrap();
        let bwd = integrate_cocycle(&spec, &theta, 6.0, 0.0, &cfg).unwrap();
        let prod = bwd.f.matmul(&fwd.f).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (prod.entry(i, j) - expect).abs() < 1e-7,
                    "entry ({i},{j}) = {}",
                    prod.entry(i, j)
                );
            }
        }
    }

    #[test]
    fn stability_guard_fires() {
        let spec = DrivingSpec::constant(-400.0);
        let theta = HullPoint::origin(1);
        let cfg = IntegratorConfig::default();
        assert!(matches!(
            integrate_cocycle(&spec, &theta, 0.0, 1.0, &cfg),
            Err(Error::StabilityGuard { .. })
        ));
    }
}
