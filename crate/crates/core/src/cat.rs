//! The configurational quantum cat system.
//!
//! A particle on the unit 2-torus is kicked once per period `T` so that its
//! configuration space is mapped by Arnold's cat map `C = [[2, 1], [1, 1]]`.
//! In the limit of instantaneous kicks the one-period propagator factorizes
//! into a dilation and a free flight,
//! `U_F = e^{−iT p̂²/2} · D`, with `D† x̂ D = C x̂` and `D† p̂ D = C⁻¹ p̂`.
//! Conjugating the position and momentum operators by `U_F` gives
//!
//! ```text
//! U_F x̂ U_F† = C⁻¹ x̂ − T C⁻¹ p̂        U_F p̂ U_F† = C p̂
//! ```
//!
//! (the sign of the `T` term follows from `[x̂, p̂²] = 2i p̂`; building the map
//! with `+T` instead corresponds to composing with the *reversed* free flight
//! — see [`flight_drift_deviation`]). On the coefficients of a linear
//! observable `L = α_x·x̂ + α_p·p̂` the conjugation acts as the 4×4 map
//!
//! ```text
//! α_x ↦ C⁻¹ α_x        α_p ↦ −T C⁻¹ α_x + C α_p
//! ```
//!
//! which has two contracting and two expanding eigen-directions with
//! exponents `∓λ`, `λ = ln((3+√5)/2)`: the cat system satisfies exact quantum
//! Anosov relations, and its upper Lyapunov exponent equals `λ`.
//!
//! On the torus the Weyl algebra only contains labels with `β_x ∈ 2πZ²`; a
//! derivation direction is *inner* exactly when some rescaling of its `α_x`
//! block lands on that lattice, which [`classify_inner`] decides with a
//! continued-fraction rationality test.

use crate::error::{Error, Result};
use crate::math;
use crate::weyl::Direction;

/// Maximum denominator certified by the rationality test.
pub const Q_MAX: u64 = 1_000_000;

/// Default tolerance for the rationality test.
pub const RATIONALITY_TOL: f64 = 1e-9;

/// Arnold's cat map and the kick period.
#[derive(Debug, Clone, PartialEq)]
pub struct CatSystem {
    t_kick: f64,
    lambda: f64,
}

/// `C = [[2, 1], [1, 1]]`.
pub const CAT_MATRIX: [[f64; 2]; 2] = [[2.0, 1.0], [1.0, 1.0]];
/// `C⁻¹ = [[1, −1], [−1, 2]]`.
pub const CAT_INVERSE: [[f64; 2]; 2] = [[1.0, -1.0], [-1.0, 2.0]];
/// `C² − Id = [[4, 3], [3, 1]]`.
pub const CAT_SQUARED_MINUS_ID: [[f64; 2]; 2] = [[4.0, 3.0], [3.0, 1.0]];

impl CatSystem {
    /// Build the canonical cat system with kick period `t_kick` (time units).
    /// `t_kick = 0` is the degenerate no-flight limit; the Anosov directions
    /// remain eigenvectors there.
    pub fn new(t_kick: f64) -> Result<Self> {
        if !(t_kick.is_finite() && t_kick >= 0.0) {
            return Err(Error::InvalidParameter("kick period must be finite and ≥ 0"));
        }
        Ok(Self {
            t_kick,
            lambda: math::ln((3.0 + math::sqrt(5.0)) / 2.0),
        })
    }

    pub fn t_kick(&self) -> f64 {
        self.t_kick
    }

    /// `λ = ln((3+√5)/2) > 0`, the log of the larger eigenvalue of `C`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `e^{+λ} = (3+√5)/2`.
    pub fn multiplier_plus(&self) -> f64 {
        (3.0 + math::sqrt(5.0)) / 2.0
    }

    /// `e^{−λ} = (3−√5)/2`.
    pub fn multiplier_minus(&self) -> f64 {
        (3.0 - math::sqrt(5.0)) / 2.0
    }

    /// Unit eigenvector `v = (1, μ−2)/‖·‖` of `C` for eigenvalue `μ`; the
    /// first component is positive by construction.
    pub fn eigenvector(&self, mu: f64) -> [f64; 2] {
        let raw = [1.0, mu - 2.0];
        let n = math::hypot(raw[0], raw[1]);
        [raw[0] / n, raw[1] / n]
    }
}

/// 4×4 real map acting on stacked coefficients `(α_x ∈ R²; α_p ∈ R²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMap {
    m: [[f64; 4]; 4],
}

impl CoefficientMap {
    pub fn matrix(&self) -> &[[f64; 4]; 4] {
        &self.m
    }

    pub fn apply(&self, v: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, row) in self.m.iter().enumerate() {
            out[i] = row.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// Apply to a two-degree-of-freedom [`Direction`].
    pub fn apply_direction(&self, d: &Direction) -> Result<Direction> {
        let v = stack_xp(d)?;
        let out = self.apply(&v);
        Direction::new(alloc::vec![out[0], out[1]], alloc::vec![out[2], out[3]])
    }
}

fn stack_xp(d: &Direction) -> Result<[f64; 4]> {
    if d.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: d.n(),
        });
    }
    let x = d.alpha_x();
    let p = d.alpha_p();
    Ok([x[0], x[1], p[0], p[1]])
}

fn block_map(t_term: f64) -> [[f64; 4]; 4] {
    // [[C⁻¹, 0], [t_term·C⁻¹, C]] on stacked (α_x; α_p)
    let ci = CAT_INVERSE;
    let c = CAT_MATRIX;
    [
        [ci[0][0], ci[0][1], 0.0, 0.0],
        [ci[1][0], ci[1][1], 0.0, 0.0],
        [t_term * ci[0][0], t_term * ci[0][1], c[0][0], c[0][1]],
        [t_term * ci[1][0], t_term * ci[1][1], c[1][0], c[1][1]],
    ]
}

/// Coefficient action of `A ↦ U_F A U_F†`:
/// `α_x' = C⁻¹ α_x`, `α_p' = −T C⁻¹ α_x + C α_p`.
pub fn build_cat_coefficient_map(sys: &CatSystem) -> CoefficientMap {
    CoefficientMap {
        m: block_map(-sys.t_kick),
    }
}

/// The `+T` variant of the coefficient map. It is the conjugation by
/// `e^{+iT p̂²/2} D` (reversed free flight) rather than by `U_F`, so it is a
/// perfectly symplectic map that nevertheless fails the cat-map Anosov
/// relations; kept as the regression lock for the sign of the `T` term.
pub fn plus_sign_variant_map(sys: &CatSystem) -> CoefficientMap {
    CoefficientMap {
        m: block_map(sys.t_kick),
    }
}

/// Build the coefficient map by composing the exact factor actions: first the
/// dilation (`α_x ↦ C⁻¹α_x`, `α_p ↦ Cα_p`), then the forward free flight
/// (`α_x ↦ α_x`, `α_p ↦ α_p − Tα_x`). This is the derivation oracle for the
/// sign of the `T` term.
pub fn kick_flight_composition(sys: &CatSystem) -> CoefficientMap {
    let ci = CAT_INVERSE;
    let c = CAT_MATRIX;
    let dilation = [
        [ci[0][0], ci[0][1], 0.0, 0.0],
        [ci[1][0], ci[1][1], 0.0, 0.0],
        [0.0, 0.0, c[0][0], c[0][1]],
        [0.0, 0.0, c[1][0], c[1][1]],
    ];
    let t = sys.t_kick;
    let flight = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-t, 0.0, 1.0, 0.0],
        [0.0, -t, 0.0, 1.0],
    ];
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = (0..4).map(|k| flight[i][k] * dilation[k][j]).sum();
        }
    }
    CoefficientMap { m }
}

/// Drift-sign deviation of a coefficient map from the kick-flight
/// composition, measured in the kick frame: with `B` the momentum-from-
/// position block of the map, returns `‖C·B + T·Id‖_∞`.
///
/// The correct map has `B = −T C⁻¹` and deviation `0`; the `+T` variant
/// deviates by exactly `2T`. Structure checks cannot separate the two signs —
/// both variants are conjugations by unitaries and both induced phase maps
/// are exactly symplectic — so the drift of the free-flight factor is the
/// discriminating observable.
pub fn flight_drift_deviation(map: &CoefficientMap, sys: &CatSystem) -> f64 {
    let b = [
        [map.m[2][0], map.m[2][1]],
        [map.m[3][0], map.m[3][1]],
    ];
    let c = CAT_MATRIX;
    let mut max_dev: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let cb = c[i][0] * b[0][j] + c[i][1] * b[1][j];
            let target = if i == j { -sys.t_kick } else { 0.0 };
            max_dev = max_dev.max((cb - target).abs());
        }
    }
    max_dev
}

/// Phase-space map induced by a coefficient map through the pullback
/// identity: reorder the blocks to stacked `(α_p; α_x)` and transpose. For
/// the correct map this is `[[C, 0], [−T C⁻¹, C⁻¹]]` in stacked `(p; x)`.
pub fn induced_phase_map(map: &CoefficientMap) -> [[f64; 4]; 4] {
    // P swaps the two 2-blocks; phase = (P·M·P)ᵀ
    let perm = [2usize, 3, 0, 1];
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[j][i] = map.m[perm[i]][perm[j]];
        }
    }
    out
}

/// `‖Gᵀ J G − J‖_∞` for a 4×4 phase map in stacked `(p; x)` ordering.
pub fn symplectic_deviation4(g: &[[f64; 4]; 4]) -> f64 {
    let jmat = |i: usize, j: usize| -> f64 {
        if i < 2 && j == i + 2 {
            -1.0
        } else if i >= 2 && j == i - 2 {
            1.0
        } else {
            0.0
        }
    };
    let mut max_dev: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            // (Gᵀ J G)_{ij} = Σ_k G_{ki} (J G)_{kj}; J G swaps row blocks
            let mut acc = 0.0;
            for k in 0..2 {
                acc += g[k][i] * -g[k + 2][j] + g[k + 2][i] * g[k][j];
            }
            max_dev = max_dev.max((acc - jmat(i, j)).abs());
        }
    }
    max_dev
}

/// One Anosov direction of the cat system with its exact exponent.
#[derive(Debug, Clone)]
pub struct CatDirection {
    pub direction: Direction,
    /// `λ_i` in `U_F L U_F† = e^{λ_i} L`; real for the cat system.
    pub exponent: f64,
}

fn mat2_apply(m: &[[f64; 2]; 2], v: &[f64; 2]) -> [f64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// The four Anosov directions: `α₁ = (0, v₋)` and `α₂ = ((C²−Id)v₊, Tv₊)`
/// contract with `e^{−λ}`, `α₃ = (0, v₊)` and `α₄ = ((C²−Id)v₋, Tv₋)` expand
/// with `e^{+λ}`.
pub fn cat_anosov_directions(sys: &CatSystem) -> [CatDirection; 4] {
    let v_plus = sys.eigenvector(sys.multiplier_plus());
    let v_minus = sys.eigenvector(sys.multiplier_minus());
    let lam = sys.lambda;
    let t = sys.t_kick;

    let make = |alpha_x: [f64; 2], alpha_p: [f64; 2], exponent: f64| CatDirection {
        direction: Direction::new(
            alloc::vec![alpha_x[0], alpha_x[1]],
            alloc::vec![alpha_p[0], alpha_p[1]],
        )
        .expect("finite coefficients"),
        exponent,
    };

    let cx_plus = mat2_apply(&CAT_SQUARED_MINUS_ID, &v_plus);
    let cx_minus = mat2_apply(&CAT_SQUARED_MINUS_ID, &v_minus);
    [
        make([0.0, 0.0], v_minus, -lam),
        make(cx_plus, [t * v_plus[0], t * v_plus[1]], -lam),
        make([0.0, 0.0], v_plus, lam),
        make(cx_minus, [t * v_minus[0], t * v_minus[1]], lam),
    ]
}

/// Residual report of the cat-map Anosov relations.
#[derive(Debug, Clone)]
pub struct CatReport {
    /// Per-direction relative residuals `‖M α_i − e^{λ_i} α_i‖ / ‖α_i‖`.
    pub residuals: [f64; 4],
    /// Pass iff every residual is ≤ `1e-10`.
    pub verdict: bool,
    /// Upper Lyapunov exponent `λ̄ = max |λ_i|`.
    pub upper_exponent: f64,
}

/// Check `M α_i = e^{λ_i} α_i` for the four directions.
pub fn verify_cat_anosov(map: &CoefficientMap, dirs: &[CatDirection; 4]) -> CatReport {
    let mut residuals = [0.0; 4];
    let mut upper: f64 = 0.0;
    for (i, d) in dirs.iter().enumerate() {
        let v = stack_xp(&d.direction).expect("cat directions have n = 2");
        let image = map.apply(&v);
        let factor = math::exp(d.exponent);
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..4 {
            let r = image[k] - factor * v[k];
            num += r * r;
            den += v[k] * v[k];
        }
        residuals[i] = math::sqrt(num / den);
        upper = upper.max(d.exponent.abs());
    }
    CatReport {
        residuals,
        verdict: residuals.iter().all(|r| *r <= 1e-10),
        upper_exponent: upper,
    }
}

/// Inner/outer classification of the derivation `δ_α` on the torus algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivationClass {
    /// Some rescaling of `α_x` lies on `2πZ²`: the derivation is a commutator
    /// with an algebra element.
    Inner,
    /// `α_x` components have an irrational ratio (certified up to `Q_MAX`).
    Outer,
    /// Nearly rational, but only with denominator beyond `Q_MAX`.
    Undecidable,
}

/// Decide whether `c·α_x ∈ 2πZ²` for some scalar `c ≠ 0`, i.e. whether the
/// component ratio is rational. Tested via the continued-fraction expansion
/// of the ratio: a convergent `p/q` certifies rationality when
/// `q²·|r − p/q| ≤ tol` (well beyond the generic `1/q²` approximation rate),
/// truncated at denominator [`Q_MAX`].
pub fn classify_inner(a: &Direction, tol: f64) -> Result<DerivationClass> {
    if a.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: a.n(),
        });
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter("tolerance must be positive"));
    }
    let x = a.alpha_x();
    let scale = a.norm().max(1.0);
    let zero = |v: f64| v.abs() <= tol * scale;
    if zero(x[0]) && zero(x[1]) {
        return Ok(DerivationClass::Inner);
    }
    // Ratio of the smaller component to the larger one, so |r| ≤ 1.
    let (num, den) = if x[0].abs() >= x[1].abs() {
        (x[1], x[0])
    } else {
        (x[0], x[1])
    };
    let r = (num / den).abs();

    // Continued-fraction convergents of r.
    let mut rem = r;
    let (mut p_prev, mut q_prev) = (1u128, 0u128);
    let (mut p, mut q) = (0u128, 1u128); // a₀ = 0 since r ∈ [0, 1)
    if r >= 1.0 {
        // r == 1.0 exactly: equal components
        return Ok(DerivationClass::Inner);
    }
    for _ in 0..64 {
        let err = (r - p as f64 / q as f64).abs();
        if err * (q as f64) * (q as f64) <= tol {
            return Ok(if q <= Q_MAX as u128 {
                DerivationClass::Inner
            } else {
                DerivationClass::Undecidable
            });
        }
        if q > Q_MAX as u128 {
            return Ok(DerivationClass::Outer);
        }
        // next partial quotient
        if rem <= 0.0 {
            break;
        }
        let inv = 1.0 / rem;
        if !inv.is_finite() || inv >= 1e18 {
            break;
        }
        let quot = inv as u128;
        rem = inv - quot as f64;
        let p_next = quot * p + p_prev;
        let q_next = quot * q + q_prev;
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
    }
    let err = (r - p as f64 / q as f64).abs();
    if err * (q as f64) * (q as f64) <= tol {
        Ok(if q <= Q_MAX as u128 {
            DerivationClass::Inner
        } else {
            DerivationClass::Undecidable
        })
    } else {
        Ok(DerivationClass::Outer)
    }
}
