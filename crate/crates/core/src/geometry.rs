//! Small fixed-size linear algebra for 3D isometries, and classification of
//! single symmetry elements of O(3).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("matrix is not orthogonal (max |QᵀQ - I| = {deviation:e})")]
    NonOrthogonal { deviation: f64 },
    #[error("frame difference vectors do not span 3-space")]
    DegenerateFrame,
    #[error("non-finite coordinate")]
    NonFinite,
}

/// A vector (or point) in 3-space.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

/// Points and vectors share a representation.
pub type Point3<T> = Vec3<T>;

impl<T: Real> Vec3<T> {
    #[inline]
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn from_f64(x: f64, y: f64, z: f64) -> Self {
        Self::new(T::lit(x), T::lit(y), T::lit(z))
    }

    pub fn e_x() -> Self {
        Self::new(T::one(), T::zero(), T::zero())
    }

    pub fn e_y() -> Self {
        Self::new(T::zero(), T::one(), T::zero())
    }

    pub fn e_z() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    #[inline]
    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    #[inline]
    pub fn distance(self, o: Self) -> T {
        (self - o).norm()
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    /// Unit vector in the same direction, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > T::epsilon() {
            Some(self.scale(n.recip()))
        } else {
            None
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn max_abs_diff(self, o: Self) -> T {
        (self.x - o.x).abs().max((self.y - o.y).abs()).max((self.z - o.z).abs())
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Total lexicographic order on (x, y, z). Coordinates are finite.
    pub fn lex_cmp(&self, o: &Self) -> Ordering {
        cmp_real(self.x, o.x).then_with(|| cmp_real(self.y, o.y)).then_with(|| cmp_real(self.z, o.z))
    }

    /// Flips the sign so that the first component larger than `tol` in
    /// magnitude is positive.
    pub fn canonical_direction(self, tol: T) -> Self {
        for c in self.to_array() {
            if c.abs() > tol {
                return if c < T::zero() { -self } else { self };
            }
        }
        self
    }

    pub fn cast<U: Real>(self) -> Vec3<U> {
        Vec3::new(U::lit(self.x.as_f64()), U::lit(self.y.as_f64()), U::lit(self.z.as_f64()))
    }
}

pub(crate) fn cmp_real<T: Real>(a: T, b: T) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T: Real> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl<T: Real> fmt::Display for Vec3<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Row-major 3×3 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3<T> {
    pub m: [[T; 3]; 3],
}

impl<T: Real> Mat3<T> {
    pub const fn from_rows(m: [[T; 3]; 3]) -> Self {
        Self { m }
    }

    pub fn from_rows_f64(m: [[f64; 3]; 3]) -> Self {
        Self { m: m.map(|r| r.map(T::lit)) }
    }

    pub fn from_cols(a: Vec3<T>, b: Vec3<T>, c: Vec3<T>) -> Self {
        Self { m: [[a.x, b.x, c.x], [a.y, b.y, c.y], [a.z, b.z, c.z]] }
    }

    pub fn identity() -> Self {
        Self::diag(T::one(), T::one(), T::one())
    }

    pub fn diag(a: T, b: T, c: T) -> Self {
        let z = T::zero();
        Self { m: [[a, z, z], [z, b, z], [z, z, c]] }
    }

    pub fn col(&self, j: usize) -> Vec3<T> {
        Vec3::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.m;
        Self { m: [[m[0][0], m[1][0], m[2][0]], [m[0][1], m[1][1], m[2][1]], [m[0][2], m[1][2], m[2][2]]] }
    }

    pub fn det(&self) -> T {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn trace(&self) -> T {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    /// Inverse via the adjugate; `None` when singular to working precision.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.abs() <= T::min_positive_value() || !d.is_finite() {
            return None;
        }
        let m = &self.m;
        let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        let adj = [
            [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)],
            [-c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2)],
            [c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1)],
        ];
        let inv = d.recip();
        Some(Self { m: adj.map(|r| r.map(|v| v * inv)) })
    }

    pub fn mul_vec(&self, v: Vec3<T>) -> Vec3<T> {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.m[i][j] - o.m[i][j]).abs());
            }
        }
        worst
    }

    pub fn scale(&self, s: T) -> Self {
        Self { m: self.m.map(|r| r.map(|v| v * s)) }
    }

    fn add_mat(&self, o: &Self) -> Self {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = out.m[i][j] + o.m[i][j];
            }
        }
        out
    }

    /// `max |MᵀM - I|`.
    pub fn orthogonality_error(&self) -> T {
        (self.transpose() * *self).max_abs_diff(&Self::identity())
    }

    /// Nearest orthogonal matrix (orthogonal polar factor) by Newton
    /// iteration `X ← (X + X⁻ᵀ)/2`.
    pub fn nearest_orthogonal(&self) -> Option<Self> {
        let half = T::lit(0.5);
        let mut x = *self;
        for _ in 0..64 {
            let inv_t = x.inverse()?.transpose();
            let next = x.add_mat(&inv_t).scale(half);
            let delta = next.max_abs_diff(&x);
            x = next;
            if delta <= T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        Some(x)
    }

    /// Rotation by `angle` about the unit vector `axis` (right-hand rule).
    pub fn rotation(axis: Vec3<T>, angle: T) -> Self {
        let u = axis.normalized().unwrap_or_else(Vec3::e_z);
        let (s, c) = angle.sin_cos();
        let t = T::one() - c;
        Self {
            m: [
                [c + u.x * u.x * t, u.x * u.y * t - u.z * s, u.x * u.z * t + u.y * s],
                [u.y * u.x * t + u.z * s, c + u.y * u.y * t, u.y * u.z * t - u.x * s],
                [u.z * u.x * t - u.y * s, u.z * u.y * t + u.x * s, c + u.z * u.z * t],
            ],
        }
    }

    /// Reflection in the plane through the origin with the given normal.
    pub fn reflection(normal: Vec3<T>) -> Self {
        let n = normal.normalized().unwrap_or_else(Vec3::e_z);
        let two = T::lit(2.0);
        let mut out = Self::identity();
        let nv = n.to_array();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = out.m[i][j] - two * nv[i] * nv[j];
            }
        }
        out
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = [[T::zero(); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j] + self.m[i][2] * o.m[2][j];
            }
        }
        Self { m: out }
    }
}

impl<T: Real> Mul<Vec3<T>> for Mat3<T> {
    type Output = Vec3<T>;
    fn mul(self, v: Vec3<T>) -> Vec3<T> {
        self.mul_vec(v)
    }
}

/// Tolerances used throughout the crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceContext<T> {
    /// Absolute tolerance for distance comparisons.
    pub geom_tol: T,
    /// Angular tolerance in radians for order detection.
    pub angle_tol: T,
    /// Largest rotation order recognised as commensurate.
    pub max_rotation_order: u32,
    /// Relative point-matching tolerance; the absolute value used for a
    /// cluster of radius ρ is `match_rel · max(1, ρ)`.
    pub match_rel: T,
    /// Two orthogonal maps are the same element iff their max-norm difference
    /// is below this.
    pub dedup_tol: T,
}

impl<T: Real> Default for ToleranceContext<T> {
    fn default() -> Self {
        let geom = T::lit(T::DEFAULT_GEOM_TOL);
        Self {
            geom_tol: geom,
            angle_tol: T::lit(T::DEFAULT_ANGLE_TOL),
            max_rotation_order: 24,
            match_rel: T::lit(1e-7).max(geom * T::lit(10.0)),
            dedup_tol: T::lit(1e-6).max(geom * T::lit(10.0)),
        }
    }
}

impl<T: Real> ToleranceContext<T> {
    pub fn new(geom_tol: T, angle_tol: T, max_rotation_order: u32) -> Result<Self, String> {
        let ctx = Self { geom_tol, angle_tol, max_rotation_order, ..Self::default() };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.geom_tol > T::zero() && self.angle_tol > T::zero() && self.match_rel > T::zero()) {
            return Err("tolerances must be strictly positive".into());
        }
        if self.max_rotation_order < 2 {
            return Err("max rotation order must be at least 2".into());
        }
        Ok(())
    }

    /// Absolute matching tolerance for clusters of radius `rho`.
    pub fn match_tol(&self, rho: T) -> T {
        self.match_rel * rho.max(T::one())
    }

    /// Tolerance on `max |QᵀQ - I|` for accepting a matrix as orthogonal.
    pub fn ortho_tol(&self) -> T {
        self.geom_tol.sqrt()
    }
}

/// An element of O(3).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthogonalMap<T> {
    q: Mat3<T>,
}

impl<T: Real> OrthogonalMap<T> {
    /// Validates orthogonality, then snaps to the nearest orthogonal matrix.
    pub fn new(q: Mat3<T>, ctx: &ToleranceContext<T>) -> Result<Self, GeometryError> {
        let dev = q.orthogonality_error();
        if !dev.is_finite() || dev > ctx.ortho_tol() {
            return Err(GeometryError::NonOrthogonal { deviation: dev.as_f64() });
        }
        let q = q.nearest_orthogonal().ok_or(GeometryError::NonOrthogonal { deviation: dev.as_f64() })?;
        Ok(Self { q })
    }

    pub(crate) fn new_unchecked(q: Mat3<T>) -> Self {
        Self { q }
    }

    pub fn identity() -> Self {
        Self { q: Mat3::identity() }
    }

    pub fn matrix(&self) -> &Mat3<T> {
        &self.q
    }

    /// +1 or -1.
    pub fn det_sign(&self) -> i32 {
        if self.q.det() >= T::zero() {
            1
        } else {
            -1
        }
    }

    pub fn is_proper(&self) -> bool {
        self.det_sign() == 1
    }

    pub fn inverse(&self) -> Self {
        Self { q: self.q.transpose() }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { q: self.q * other.q }
    }

    pub fn apply(&self, v: Vec3<T>) -> Vec3<T> {
        self.q.mul_vec(v)
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.q.max_abs_diff(&other.q) < tol
    }

    /// `u · self · uᵀ`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        Self { q: u.q * self.q * u.q.transpose() }
    }

    pub fn kind(&self, ctx: &ToleranceContext<T>) -> ElementKind<T> {
        classify_orthogonal(&self.q, ctx)
    }
}

/// `p ↦ Q·p + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry<T> {
    pub q: OrthogonalMap<T>,
    pub t: Vec3<T>,
}

impl<T: Real> Isometry<T> {
    pub fn identity() -> Self {
        Self { q: OrthogonalMap::identity(), t: Vec3::zero() }
    }

    pub fn translation(t: Vec3<T>) -> Self {
        Self { q: OrthogonalMap::identity(), t }
    }

    /// The map `p ↦ center + Q·(p - center)`.
    pub fn about(q: OrthogonalMap<T>, center: Point3<T>) -> Self {
        Self { q, t: center - q.apply(center) }
    }

    pub fn apply(&self, p: Point3<T>) -> Point3<T> {
        self.q.apply(p) + self.t
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { q: self.q.compose(&other.q), t: self.q.apply(other.t) + self.t }
    }

    pub fn inverse(&self) -> Self {
        let qi = self.q.inverse();
        Self { q: qi, t: -qi.apply(self.t) }
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.q.approx_eq(&other.q, tol) && self.t.max_abs_diff(other.t) < tol
    }
}

/// Geometric kind of a single element of O(3).
///
/// Axes and normals are unit vectors normalised so that their first
/// non-negligible component is positive; `power` is the `k` in the angle
/// `2πk/order` measured about that normalised axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ElementKind<T> {
    Identity,
    Inversion,
    Rotation {
        order: u32,
        power: u32,
        axis: Vec3<T>,
    },
    Reflection {
        normal: Vec3<T>,
    },
    /// Reflection in the plane ⊥ `axis` composed with a rotation by
    /// `2π·power/order` about `axis`; `order ≥ 3`.
    Rotoreflection {
        order: u32,
        power: u32,
        axis: Vec3<T>,
    },
    /// Angle not within `angle_tol` of `2πk/n` for any `n ≤ max_rotation_order`.
    GenericRotation {
        angle: T,
        axis: Vec3<T>,
        proper: bool,
    },
}

impl<T: Real> ElementKind<T> {
    pub fn rotation_order(&self) -> Option<u32> {
        match self {
            ElementKind::Rotation { order, .. } => Some(*order),
            _ => None,
        }
    }

    pub fn axis(&self) -> Option<Vec3<T>> {
        match self {
            ElementKind::Rotation { axis, .. }
            | ElementKind::Rotoreflection { axis, .. }
            | ElementKind::GenericRotation { axis, .. } => Some(*axis),
            ElementKind::Reflection { normal } => Some(*normal),
            _ => None,
        }
    }

    pub fn short_name(&self) -> String {
        match self {
            ElementKind::Identity => "E".into(),
            ElementKind::Inversion => "i".into(),
            ElementKind::Rotation { order, power, .. } => {
                if *power == 1 {
                    format!("C{order}")
                } else {
                    format!("C{order}^{power}")
                }
            }
            ElementKind::Reflection { .. } => "σ".into(),
            ElementKind::Rotoreflection { order, power, .. } => {
                if *power == 1 {
                    format!("S{order}")
                } else {
                    format!("S{order}^{power}")
                }
            }
            ElementKind::GenericRotation { angle, proper, .. } => {
                format!("{}({})", if *proper { "R" } else { "S" }, angle)
            }
        }
    }
}

/// Classifies an orthogonal matrix as a symmetry element.
pub fn classify_element<T: Real>(q: &Mat3<T>, ctx: &ToleranceContext<T>) -> Result<ElementKind<T>, GeometryError> {
    let map = OrthogonalMap::new(*q, ctx)?;
    Ok(classify_orthogonal(map.matrix(), ctx))
}

fn classify_orthogonal<T: Real>(q: &Mat3<T>, ctx: &ToleranceContext<T>) -> ElementKind<T> {
    let proper = q.det() >= T::zero();
    let r = if proper { *q } else { q.scale(-T::one()) };
    let (theta, axis) = rotation_angle_axis(&r);
    let two_pi = T::TAU();
    let tol = ctx.angle_tol;

    if proper {
        if theta <= tol {
            return ElementKind::Identity;
        }
        let axis = axis.expect("nontrivial rotation has an axis");
        let (alpha, axis) = normalise_angle_axis(theta, axis);
        return match commensurate(alpha, ctx) {
            Some((order, power)) => ElementKind::Rotation { order, power, axis },
            None => ElementKind::GenericRotation { angle: alpha, axis, proper: true },
        };
    }

    // q = -r: reflection in the plane ⊥ u after rotating by θ + π about u.
    if theta <= tol {
        return ElementKind::Inversion;
    }
    let axis = axis.expect("nontrivial rotation has an axis");
    if (T::PI() - theta).abs() <= tol {
        return ElementKind::Reflection { normal: axis.canonical_direction(T::lit(1e-9)) };
    }
    let phi = theta + T::PI();
    let phi = if phi >= two_pi { phi - two_pi } else { phi };
    let (alpha, axis) = normalise_angle_axis(phi, axis);
    match commensurate(alpha, ctx) {
        Some((order, power)) => ElementKind::Rotoreflection { order, power, axis },
        None => ElementKind::GenericRotation { angle: alpha, axis, proper: false },
    }
}

/// Angle in `[0, π]` and axis (if defined) of a proper rotation.
fn rotation_angle_axis<T: Real>(r: &Mat3<T>) -> (T, Option<Vec3<T>>) {
    let m = &r.m;
    let half = T::lit(0.5);
    let w = Vec3::new(m[2][1] - m[1][2], m[0][2] - m[2][0], m[1][0] - m[0][1]).scale(half);
    let cos = (r.trace() - T::one()) * half;
    let sin = w.norm();
    let theta = sin.atan2(cos);
    if sin > T::lit(1e-6) {
        return (theta, w.normalized());
    }
    if cos > T::zero() {
        // Near identity.
        return (theta, w.normalized());
    }
    // Near a half-turn: R + I ≈ 2uuᵀ, take its largest column; the skew part
    // fixes the sign when it is not negligible.
    let rp = r.add_mat(&Mat3::identity());
    let mut best = rp.col(0);
    for j in 1..3 {
        let c = rp.col(j);
        if c.norm_squared() > best.norm_squared() {
            best = c;
        }
    }
    let mut u = best.normalized();
    if let Some(axis) = u {
        if axis.dot(w) < T::zero() {
            u = Some(-axis);
        }
    }
    (theta, u)
}

/// Rewrites a rotation by `angle ∈ [0, 2π)` about `axis` in terms of the
/// canonical axis direction.
fn normalise_angle_axis<T: Real>(angle: T, axis: Vec3<T>) -> (T, Vec3<T>) {
    let canon = axis.canonical_direction(T::lit(1e-9));
    if canon.dot(axis) < T::zero() {
        (T::TAU() - angle, canon)
    } else {
        (angle, canon)
    }
}

/// Smallest `n ≤ max_rotation_order` with `alpha ≈ 2πk/n`.
fn commensurate<T: Real>(alpha: T, ctx: &ToleranceContext<T>) -> Option<(u32, u32)> {
    let two_pi = T::TAU();
    for n in 2..=ctx.max_rotation_order {
        let nf = T::from_u32(n)?;
        let k = (alpha * nf / two_pi).round();
        let k_int = k.to_u32()?;
        if k_int == 0 || k_int >= n {
            continue;
        }
        if (alpha - two_pi * k / nf).abs() <= ctx.angle_tol {
            return Some((n, k_int));
        }
    }
    None
}

/// Orthogonal map taking the vectors `a` to `b` (both relative to their
/// centers), if the two triples are congruent within `tol`.
///
/// The `a` vectors must be linearly independent.
pub(crate) fn frame_map<T: Real>(a: [Vec3<T>; 3], b: [Vec3<T>; 3], tol: T) -> Option<Mat3<T>> {
    for i in 0..3 {
        for j in i..3 {
            if (a[i].dot(a[j]) - b[i].dot(b[j])).abs() > tol * (T::one() + a[i].norm() + a[j].norm()) {
                return None;
            }
        }
    }
    let am = Mat3::from_cols(a[0], a[1], a[2]);
    let bm = Mat3::from_cols(b[0], b[1], b[2]);
    let q = bm * am.inverse()?;
    q.nearest_orthogonal()
}

/// Relative volume test: `|det(a)| ≤ tol · |a₀||a₁||a₂|`.
pub(crate) fn is_degenerate_frame<T: Real>(a: [Vec3<T>; 3], tol: T) -> bool {
    let vol = Mat3::from_cols(a[0], a[1], a[2]).det().abs();
    let scale = a[0].norm() * a[1].norm() * a[2].norm();
    scale <= T::min_positive_value() || vol <= tol * scale
}

/// Unique isometry mapping the quadruple `src` pointwise onto `dst`, or
/// `None` when the two quadruples are not congruent within `geom_tol`.
///
/// The first point of each quadruple plays the role of a cluster center.
pub fn frame_isometry<T: Real>(
    src: [Point3<T>; 4],
    dst: [Point3<T>; 4],
    ctx: &ToleranceContext<T>,
) -> Result<Option<Isometry<T>>, GeometryError> {
    if src.iter().chain(dst.iter()).any(|p| !p.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    let a = [src[1] - src[0], src[2] - src[0], src[3] - src[0]];
    let b = [dst[1] - dst[0], dst[2] - dst[0], dst[3] - dst[0]];
    if is_degenerate_frame(a, ctx.ortho_tol()) {
        return Err(GeometryError::DegenerateFrame);
    }
    let Some(q) = frame_map(a, b, ctx.geom_tol) else {
        return Ok(None);
    };
    let q = OrthogonalMap::new_unchecked(q);
    let iso = Isometry { q, t: dst[0] - q.apply(src[0]) };
    let ok = src.iter().zip(dst.iter()).all(|(s, d)| iso.apply(*s).distance(*d) <= ctx.geom_tol * T::lit(10.0));
    Ok(ok.then_some(iso))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn ctx() -> ToleranceContext<f64> {
        ToleranceContext::default()
    }

    #[test]
    fn identity_and_inversion() {
        assert_eq!(classify_element(&Mat3::<f64>::identity(), &ctx()).unwrap(), ElementKind::Identity);
        let inv = Mat3::diag(-1.0, -1.0, -1.0);
        assert_eq!(classify_element(&inv, &ctx()).unwrap(), ElementKind::Inversion);
    }

    #[test]
    fn mirror_z() {
        let k = classify_element(&Mat3::diag(1.0, 1.0, -1.0), &ctx()).unwrap();
        match k {
            ElementKind::Reflection { normal } => assert!(normal.max_abs_diff(Vec3::e_z()) < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn s8_generator() {
        let (s, c) = FRAC_PI_4.sin_cos();
        let q = Mat3::from_rows([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, -1.0]]);
        match classify_element(&q, &ctx()).unwrap() {
            ElementKind::Rotoreflection { order, power, axis } => {
                assert_eq!((order, power), (8, 1));
                assert!(axis.max_abs_diff(Vec3::e_z()) < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn seven_fold_rotation() {
        let q = Mat3::rotation(Vec3::e_z(), 2.0 * PI / 7.0);
        match classify_element(&q, &ctx()).unwrap() {
            ElementKind::Rotation { order, power, axis } => {
                assert_eq!((order, power), (7, 1));
                assert!(axis.max_abs_diff(Vec3::e_z()) < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let mut small = ctx();
        small.max_rotation_order = 6;
        assert!(matches!(classify_element(&q, &small).unwrap(), ElementKind::GenericRotation { .. }));
    }

    #[test]
    fn negative_axis_flips_power() {
        let q = Mat3::rotation(-Vec3::e_z(), 2.0 * PI / 5.0);
        assert_eq!(
            classify_element(&q, &ctx()).unwrap(),
            ElementKind::Rotation { order: 5, power: 4, axis: Vec3::e_z() }
        );
    }

    #[test]
    fn half_turn_axis_found() {
        let axis = Vec3::new(1.0, 1.0, 0.0).normalized().unwrap();
        let q = Mat3::rotation(axis, PI);
        match classify_element(&q, &ctx()).unwrap() {
            ElementKind::Rotation { order: 2, power: 1, axis: a } => assert!(a.max_abs_diff(axis) < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_non_orthogonal() {
        let q = Mat3::diag(1.0, 1.0, 1.1);
        assert!(matches!(classify_element(&q, &ctx()), Err(GeometryError::NonOrthogonal { .. })));
    }

    #[test]
    fn two_mirrors_make_a_rotation() {
        for (theta, order) in [(FRAC_PI_2, 2), (PI / 3.0, 3), (FRAC_PI_4, 4)] {
            let n1 = Vec3::e_x();
            let n2 = Vec3::new(theta.cos(), theta.sin(), 0.0);
            let q = Mat3::reflection(n2) * Mat3::reflection(n1);
            let kind = classify_element(&q, &ctx()).unwrap();
            assert_eq!(kind.rotation_order(), Some(order), "theta = {theta}");
        }
    }

    #[test]
    fn frame_isometry_cases() {
        let c = ctx();
        let src = [Vec3::zero(), Vec3::e_x(), Vec3::e_y(), Vec3::e_z()];
        let id = frame_isometry(src, src, &c).unwrap().unwrap();
        assert!(id.approx_eq(&Isometry::identity(), 1e-12));

        let shift = Vec3::new(1.0, 0.0, 0.0);
        let dst = src.map(|p| p + shift);
        let t = frame_isometry(src, dst, &c).unwrap().unwrap();
        assert!(t.approx_eq(&Isometry::translation(shift), 1e-12));

        let rot = Mat3::rotation(Vec3::e_z(), FRAC_PI_2);
        let dst = src.map(|p| rot * p);
        let g = frame_isometry(src, dst, &c).unwrap().unwrap();
        assert!(g.q.matrix().max_abs_diff(&rot) < 1e-9);

        let squashed = [Vec3::zero(), Vec3::e_x(), Vec3::e_y(), Vec3::new(0.0, 0.0, 2.0)];
        assert!(frame_isometry(src, squashed, &c).unwrap().is_none());

        let flat = [Vec3::zero(), Vec3::e_x(), Vec3::e_y(), Vec3::new(1.0, 1.0, 0.0)];
        assert_eq!(frame_isometry(flat, flat, &c), Err(GeometryError::DegenerateFrame));
    }

    #[test]
    fn nearest_orthogonal_repairs_drift() {
        let mut q = Mat3::rotation(Vec3::new(1.0, 2.0, 3.0), 0.7);
        q.m[0][1] += 1e-8;
        let p = q.nearest_orthogonal().unwrap();
        assert!(p.orthogonality_error() < 1e-14);
        assert!(p.max_abs_diff(&q) < 1e-7);
    }
}
