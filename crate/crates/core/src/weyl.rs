//! Exact algebra of linear observables and Weyl labels.
//!
//! A coefficient vector `α = (α_x, α_p) ∈ R^{2n}` labels the linear observable
//! `L_α = α_x·x̂ + α_p·p̂`, and a label `β` names the Weyl operator `W(β)`. The
//! commutator `[L_α, W(β)] = −σ(α, β) W(β)` together with `‖W(β)‖ = 1` reduces
//! every operator norm used by the exponent estimators to the symplectic form
//! `σ(α, β) = α_x·β_p − α_p·β_x`.
//!
//! Matrices act on stacked phase coordinates `(p₁..p_n, x₁..x_n)`; coefficient
//! vectors are stacked the same way internally. The Heisenberg pullback
//! `U†(t,t₀) L_α U(t,t₀)` acts on stacked coefficients as `Fᵀ`, and the
//! conjugation in the opposite order acts as `(F⁻¹)ᵀ`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default tolerance for the symplectic-deviation invariant of a matrix.
pub const TOL_SYMP: f64 = 1e-8;

/// Coefficient vector of a linear observable `L_α = α_x·x̂ + α_p·p̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    n: usize,
    alpha_x: Vec<f64>,
    alpha_p: Vec<f64>,
}

impl Direction {
    /// Build a direction from its position and momentum coefficient blocks.
    pub fn new(alpha_x: Vec<f64>, alpha_p: Vec<f64>) -> Result<Self> {
        if alpha_x.is_empty() || alpha_x.len() != alpha_p.len() {
            return Err(Error::DimensionMismatch {
                expected: alpha_x.len().max(1),
                got: alpha_p.len(),
            });
        }
        if !alpha_x.iter().chain(alpha_p.iter()).all(|v| v.is_finite()) {
            return Err(Error::NonFinite("direction coefficients"));
        }
        Ok(Self {
            n: alpha_x.len(),
            alpha_x,
            alpha_p,
        })
    }

    /// One degree of freedom, from scalar coefficients.
    pub fn scalar(alpha_x: f64, alpha_p: f64) -> Result<Self> {
        Self::new(vec![alpha_x], vec![alpha_p])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha_x(&self) -> &[f64] {
        &self.alpha_x
    }

    pub fn alpha_p(&self) -> &[f64] {
        &self.alpha_p
    }

    /// Stacked coefficient vector `(α_p; α_x)`, matching the `(p; x)` phase
    /// ordering on which [`SymplecticMatrix`] acts.
    pub fn to_stacked(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.n);
        out.extend_from_slice(&self.alpha_p);
        out.extend_from_slice(&self.alpha_x);
        out
    }

    /// Inverse of [`Direction::to_stacked`].
    pub fn from_stacked(stacked: &[f64]) -> Result<Self> {
        if stacked.is_empty() || stacked.len() % 2 != 0 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: stacked.len(),
            });
        }
        let n = stacked.len() / 2;
        Self::new(stacked[n..].to_vec(), stacked[..n].to_vec())
    }

    /// Euclidean norm of the full coefficient vector.
    pub fn norm(&self) -> f64 {
        crate::math::sqrt(
            self.alpha_x
                .iter()
                .chain(self.alpha_p.iter())
                .map(|v| v * v)
                .sum(),
        )
    }

    /// Scale every coefficient by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            alpha_x: self.alpha_x.iter().map(|v| v * s).collect(),
            alpha_p: self.alpha_p.iter().map(|v| v * s).collect(),
        }
    }

    /// Unit-normalized copy with the first nonzero stacked component positive.
    pub fn canonical_unit(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NonFinite("direction normalization"));
        }
        let stacked = self.to_stacked();
        let sign = stacked
            .iter()
            .find(|v| v.abs() > 1e-14 * norm)
            .map_or(1.0, |v| if *v < 0.0 { -1.0 } else { 1.0 });
        Ok(self.scaled(sign / norm))
    }
}

/// Label `β` of the Weyl operator `W(β)`; same coefficient layout as a
/// [`Direction`]. For torus configuration spaces the position block must lie
/// in `2πZ^n`; use [`WeylLabel::torus`] to construct such labels.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylLabel(Direction);

impl WeylLabel {
    pub fn new(beta_x: Vec<f64>, beta_p: Vec<f64>) -> Result<Self> {
        Ok(Self(Direction::new(beta_x, beta_p)?))
    }

    /// One degree of freedom, from scalar coefficients.
    pub fn scalar(beta_x: f64, beta_p: f64) -> Result<Self> {
        Ok(Self(Direction::scalar(beta_x, beta_p)?))
    }

    /// Label with `β_x = 2π·k`, as required on a torus configuration space.
    pub fn torus(k: &[i64], beta_p: Vec<f64>) -> Result<Self> {
        let beta_x = k
            .iter()
            .map(|&ki| 2.0 * core::f64::consts::PI * ki as f64)
            .collect();
        Ok(Self(Direction::new(beta_x, beta_p)?))
    }

    pub fn as_direction(&self) -> &Direction {
        &self.0
    }
}

impl From<Direction> for WeylLabel {
    fn from(d: Direction) -> Self {
        Self(d)
    }
}

/// Real `2n×2n` matrix acting on stacked `(p; x)` phase coordinates.
///
/// The constructor enforces `‖Fᵀ J F − J‖_∞ ≤ tol` with
/// `J = [[0, −I], [I, 0]]`; integrated cocycles stay far below the default
/// tolerance on segment lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    n: usize,
    entries: Vec<f64>, // row-major, dimension 2n×2n
}

impl SymplecticMatrix {
    /// Validate and wrap a row-major `2n×2n` entry buffer.
    pub fn new(n: usize, entries: Vec<f64>, tol: f64) -> Result<Self> {
        let m = Self::new_unchecked(n, entries)?;
        let dev = symplectic_deviation(&m);
        if !dev.is_finite() || dev > tol {
            return Err(Error::InvalidParameter(
                "matrix is not symplectic within tolerance",
            ));
        }
        Ok(m)
    }

    /// Wrap entries without the symplecticity check (shape is still checked).
    pub fn new_unchecked(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive"));
        }
        if entries.len() != 4 * n * n {
            return Err(Error::DimensionMismatch {
                expected: 4 * n * n,
                got: entries.len(),
            });
        }
        if !entries.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let dim = 2 * n;
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Full matrix dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim() + col]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: rhs.n,
            });
        }
        let dim = self.dim();
        let mut out = vec![0.0; dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let a = self.entries[i * dim + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..dim {
                    out[i * dim + j] += a * rhs.entries[k * dim + j];
                }
            }
        }
        Ok(Self {
            n: self.n,
            entries: out,
        })
    }

    pub fn transpose(&self) -> Self {
        let dim = self.dim();
        let mut out = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                out[j * dim + i] = self.entries[i * dim + j];
            }
        }
        Self {
            n: self.n,
            entries: out,
        }
    }

    /// Inverse through the symplectic identity `F⁻¹ = J⁻¹ Fᵀ J`; exact up to
    /// the symplectic deviation of `F`, with no elimination step.
    pub fn symplectic_inverse(&self) -> Self {
        // J⁻¹ Fᵀ J reshuffles the four n×n blocks of Fᵀ:
        //   [[A, B], [C, D]] ↦ [[Dᵀ, −Bᵀ], [−Cᵀ, Aᵀ]]
        let n = self.n;
        let dim = 2 * n;
        let mut out = vec![0.0; dim * dim];
        for i in 0..n {
            for j in 0..n {
                out[i * dim + j] = self.entries[(n + j) * dim + n + i]; // Dᵀ
                out[i * dim + n + j] = -self.entries[j * dim + n + i]; // −Bᵀ
                out[(n + i) * dim + j] = -self.entries[(n + j) * dim + i]; // −Cᵀ
                out[(n + i) * dim + n + j] = self.entries[j * dim + i]; // Aᵀ
            }
        }
        Self { n, entries: out }
    }

    fn apply_stacked(&self, v: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        let mut out = vec![0.0; dim];
        for i in 0..dim {
            let mut acc = 0.0;
            for j in 0..dim {
                acc += self.entries[i * dim + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    fn apply_transpose_stacked(&self, v: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        let mut out = vec![0.0; dim];
        for j in 0..dim {
            let vj = v[j];
            if vj == 0.0 {
                continue;
            }
            for i in 0..dim {
                out[i] += self.entries[j * dim + i] * vj;
            }
        }
        out
    }
}

/// `σ(a, b) = α_x·β_p − α_p·β_x`, the symplectic form on coefficient vectors.
pub fn symplectic_form(a: &Direction, b: &Direction) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            got: b.n,
        });
    }
    Ok(sigma_raw(a, b))
}

#[inline]
fn sigma_raw(a: &Direction, b: &Direction) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.n {
        acc += a.alpha_x[i] * b.alpha_p[i] - a.alpha_p[i] * b.alpha_x[i];
    }
    acc
}

/// `‖[L_a, W(β)]‖ = |σ(a, β)|`, using `‖W(β)‖ = 1`. Shares the arithmetic
/// path of [`symplectic_form`] exactly.
pub fn commutator_norm(a: &Direction, beta: &WeylLabel) -> Result<f64> {
    symplectic_form(a, beta.as_direction()).map(f64::abs)
}

/// Coefficients of `U†(t,t₀) L_a U(t,t₀)`: stacked `(α_p; α_x) ↦ Fᵀ (α_p; α_x)`.
pub fn apply_pullback(f: &SymplecticMatrix, a: &Direction) -> Result<Direction> {
    if f.n != a.n {
        return Err(Error::DimensionMismatch {
            expected: f.n,
            got: a.n,
        });
    }
    Direction::from_stacked(&f.apply_transpose_stacked(&a.to_stacked()))
}

/// Coefficients of `U(t,t₀) L_a U†(t,t₀)`: stacked coefficients transform by
/// `(F⁻¹)ᵀ = J F J⁻¹`; inverse of [`apply_pullback`].
pub fn apply_pushforward(f: &SymplecticMatrix, a: &Direction) -> Result<Direction> {
    if f.n != a.n {
        return Err(Error::DimensionMismatch {
            expected: f.n,
            got: a.n,
        });
    }
    // J F J⁻¹ v computed as J (F (J⁻¹ v)): with v = (v_p; v_x),
    // J⁻¹ v = (v_x; −v_p) and J u = (−u_x; u_p).
    let n = f.n;
    let v = a.to_stacked();
    let mut jinv_v = Vec::with_capacity(2 * n);
    jinv_v.extend_from_slice(&v[n..]);
    jinv_v.extend(v[..n].iter().map(|p| -p));
    let u = f.apply_stacked(&jinv_v);
    let mut out = Vec::with_capacity(2 * n);
    out.extend(u[n..].iter().map(|x| -x));
    out.extend_from_slice(&u[..n]);
    Direction::from_stacked(&out)
}

/// `‖Fᵀ J F − J‖_∞` with `J = [[0, −I], [I, 0]]` in `(p; x)` ordering.
pub fn symplectic_deviation(f: &SymplecticMatrix) -> f64 {
    let n = f.n;
    let dim = 2 * n;
    // (Fᵀ J F)_{ij} = Σ_k F_{ki} (J F)_{kj}; J F swaps and negates row blocks.
    let mut max_dev: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = 0.0;
            for k in 0..n {
                // rows of J F: row k is −(row n+k of F), row n+k is row k of F
                acc += f.entries[k * dim + i] * -f.entries[(n + k) * dim + j]
                    + f.entries[(n + k) * dim + i] * f.entries[k * dim + j];
            }
            let j_ij = if i < n && j == n + i {
                -1.0
            } else if i >= n && j == i - n {
                1.0
            } else {
                0.0
            };
            let dev = (acc - j_ij).abs();
            if dev > max_dev {
                max_dev = dev;
            }
        }
    }
    max_dev
}
