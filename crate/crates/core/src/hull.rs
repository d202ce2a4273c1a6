//! Driving data: trigonometric potentials on a torus hull `T^d` and the
//! linear flow `φ^t(θ) = θ + ωt`.
//!
//! Hulls are finite-dimensional tori; a trigonometric polynomial covers
//! periodic and quasi-periodic driving and approximates almost-periodic
//! driving to any accuracy. The effective oscillator stiffness along an orbit
//! is `f(φ^t(θ)) = E − V(φ^t(θ))`.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::math;

/// Point on the torus hull, stored as angles in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HullPoint {
    angles: Vec<f64>,
}

impl HullPoint {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidParameter("hull dimension must be ≥ 1"));
        }
        if !angles.iter().all(|a| a.is_finite()) {
            return Err(Error::NonFinite("hull angles"));
        }
        Ok(Self {
            angles: angles.iter().map(|&a| math::rem_euclid(a, TAU)).collect(),
        })
    }

    /// Origin of a `d`-dimensional hull.
    pub fn origin(d: usize) -> Self {
        Self {
            angles: alloc::vec![0.0; d.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Torus metric: max over components of the wrapped angular distance.
    pub fn distance(&self, other: &HullPoint) -> f64 {
        self.angles
            .iter()
            .zip(other.angles.iter())
            .map(|(&a, &b)| {
                let d = math::rem_euclid(a - b, TAU);
                d.min(TAU - d)
            })
            .fold(0.0, f64::max)
    }
}

/// Frequency vector of the hull translation flow, in radians per unit time.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyVector {
    omega: Vec<f64>,
}

impl FrequencyVector {
    pub fn new(omega: Vec<f64>) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::InvalidParameter("frequency dimension must be ≥ 1"));
        }
        if !omega.iter().all(|w| w.is_finite()) {
            return Err(Error::NonFinite("frequencies"));
        }
        Ok(Self { omega })
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.omega
    }
}

/// One Fourier mode of a potential: multi-index `k` with cosine and sine
/// amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigTerm {
    pub k: Vec<i32>,
    pub a: f64,
    pub b: f64,
}

/// Real trigonometric polynomial on the hull:
/// `V(θ) = c + Σ_k a_k cos(k·θ) + b_k sin(k·θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    constant: f64,
    terms: Vec<TrigTerm>,
    dim: usize,
}

impl TrigPolynomial {
    pub fn new(dim: usize, constant: f64, terms: Vec<TrigTerm>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("potential dimension must be ≥ 1"));
        }
        if !constant.is_finite() {
            return Err(Error::NonFinite("potential constant"));
        }
        for (i, t) in terms.iter().enumerate() {
            if t.k.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: t.k.len(),
                });
            }
            if !t.a.is_finite() || !t.b.is_finite() {
                return Err(Error::NonFinite("potential amplitudes"));
            }
            for prev in &terms[..i] {
                if prev.k == t.k {
                    return Err(Error::InvalidParameter("duplicate multi-index in potential"));
                }
            }
        }
        Ok(Self {
            constant,
            terms,
            dim,
        })
    }

    /// The zero potential on a `d`-dimensional hull.
    pub fn zero(dim: usize) -> Self {
        Self {
            constant: 0.0,
            terms: Vec::new(),
            dim: dim.max(1),
        }
    }

    /// `2q cos(θ)` on the circle: the Mathieu-type driving used throughout the
    /// tests and docs.
    pub fn mathieu(q: f64) -> Self {
        Self {
            constant: 0.0,
            terms: alloc::vec![TrigTerm {
                k: alloc::vec![1],
                a: 2.0 * q,
                b: 0.0,
            }],
            dim: 1,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    /// `|c| + Σ √(a² + b²)`: a bound on `max_θ |V(θ)|`.
    pub fn amplitude_bound(&self) -> f64 {
        self.constant.abs()
            + self
                .terms
                .iter()
                .map(|t| math::hypot(t.a, t.b))
                .sum::<f64>()
    }
}

/// Driving specification: potential `V`, spectral parameter `E`, and hull
/// frequencies. Defines `f(φ^t(θ)) = E − V(φ^t(θ))`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivingSpec {
    v: TrigPolynomial,
    e: f64,
    omega: FrequencyVector,
}

impl DrivingSpec {
    pub fn new(v: TrigPolynomial, e: f64, omega: FrequencyVector) -> Result<Self> {
        if v.dim() != omega.dim() {
            return Err(Error::DimensionMismatch {
                expected: v.dim(),
                got: omega.dim(),
            });
        }
        if !e.is_finite() {
            return Err(Error::NonFinite("spectral parameter E"));
        }
        Ok(Self { v, e, omega })
    }

    /// Constant driving `f ≡ E` (zero potential, unit frequency on a circle).
    pub fn constant(e: f64) -> Self {
        Self {
            v: TrigPolynomial::zero(1),
            e,
            omega: FrequencyVector { omega: alloc::vec![1.0] },
        }
    }

    /// Mathieu-type spec: `V = 2q cos θ`, `ω = 1` on the circle.
    pub fn mathieu(q: f64, e: f64) -> Self {
        Self {
            v: TrigPolynomial::mathieu(q),
            e,
            omega: FrequencyVector { omega: alloc::vec![1.0] },
        }
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }

    pub fn potential(&self) -> &TrigPolynomial {
        &self.v
    }

    pub fn spectral_parameter(&self) -> f64 {
        self.e
    }

    pub fn omega(&self) -> &FrequencyVector {
        &self.omega
    }

    /// Bound on `max_θ |f(θ)| = |E − V(θ)|`, used by the stability guard.
    pub fn f_bound(&self) -> f64 {
        (self.e - self.v.constant()).abs()
            + self
                .v
                .terms()
                .iter()
                .map(|t| math::hypot(t.a, t.b))
                .sum::<f64>()
    }
}

/// Hull translation flow: `(θ + ωt) mod 2π` componentwise.
pub fn flow(theta: &HullPoint, t: f64, omega: &FrequencyVector) -> Result<HullPoint> {
    if theta.dim() != omega.dim() {
        return Err(Error::DimensionMismatch {
            expected: theta.dim(),
            got: omega.dim(),
        });
    }
    HullPoint::new(
        theta
            .angles
            .iter()
            .zip(omega.omega.iter())
            .map(|(&a, &w)| a + w * t)
            .collect(),
    )
}

/// Evaluate `V(θ) = c + Σ a_k cos(k·θ) + b_k sin(k·θ)`.
pub fn evaluate_potential(v: &TrigPolynomial, theta: &HullPoint) -> Result<f64> {
    if v.dim() != theta.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            got: theta.dim(),
        });
    }
    let mut acc = v.constant;
    for term in &v.terms {
        let phase: f64 = term
            .k
            .iter()
            .zip(theta.angles.iter())
            .map(|(&k, &th)| k as f64 * th)
            .sum();
        acc += term.a * math::cos(phase) + term.b * math::sin(phase);
    }
    Ok(acc)
}

/// Effective stiffness `f(θ) = E − V(θ)`.
pub fn evaluate_f(spec: &DrivingSpec, theta: &HullPoint) -> Result<f64> {
    Ok(spec.e - evaluate_potential(&spec.v, theta)?)
}
