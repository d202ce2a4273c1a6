//! Small fixed-size helpers for the 2×2 real cocycle inner loops.
//!
//! Matrices act on stacked phase vectors `(p; x)` and are stored row-major.

pub(crate) type Mat2 = [[f64; 2]; 2];
pub(crate) type Vec2 = [f64; 2];

pub(crate) const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

#[inline(always)]
pub(crate) fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
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

#[inline(always)]
pub(crate) fn apply(m: &Mat2, v: &Vec2) -> Vec2 {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// Conjugation `J m J⁻¹` with `J = [[0,−1],[1,0]]`. For a symplectic `m` this
/// equals `(m⁻¹)ᵀ`, the coefficient pushforward, without any division.
#[inline(always)]
pub(crate) fn j_conjugate(m: &Mat2) -> Mat2 {
    [[m[1][1], -m[1][0]], [-m[0][1], m[0][0]]]
}

/// `aᵀ · b`.
#[inline(always)]
pub(crate) fn mul_transpose_left(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[1][0] * b[1][0],
            a[0][0] * b[0][1] + a[1][0] * b[1][1],
        ],
        [
            a[0][1] * b[0][0] + a[1][1] * b[1][0],
            a[0][1] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

#[inline(always)]
pub(crate) fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

#[inline(always)]
pub(crate) fn frobenius(m: &Mat2) -> f64 {
    crate::math::sqrt(
        m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1],
    )
}

/// Column of larger norm; for a numerically rank-one product this is the
/// dominant image direction, independent of any probe vector.
#[inline(always)]
pub(crate) fn dominant_column(m: &Mat2) -> Vec2 {
    let c0 = [m[0][0], m[1][0]];
    let c1 = [m[0][1], m[1][1]];
    if norm(&c0) >= norm(&c1) {
        c0
    } else {
        c1
    }
}

#[inline(always)]
pub(crate) fn norm(v: &Vec2) -> f64 {
    crate::math::hypot(v[0], v[1])
}

#[inline(always)]
pub(crate) fn scale(v: &Vec2, s: f64) -> Vec2 {
    [v[0] * s, v[1] * s]
}

/// Angle between the rays spanned by `a` and `b`, ignoring orientation.
pub(crate) fn ray_angle(a: &Vec2, b: &Vec2) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let c = ((a[0] * b[0] + a[1] * b[1]) / (na * nb)).abs();
    crate::math::acos(c.min(1.0))
}
