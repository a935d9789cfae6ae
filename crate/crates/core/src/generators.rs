//! Constructors for the concrete point sets used throughout: the cubic
//! lattice, hexagonal lattices and bi-lattices, the layered C4v set, and
//! square antiprisms.
//!
//! All generators clip to a closed box (boundary points included) and emit
//! points in lexicographic order of (z, y, x), so clipping a larger patch to
//! a smaller box reproduces the smaller patch bit-for-bit.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::geometry::{cmp_real, Mat3, Point3, Vec3};
use crate::patch::{Aabb, PatchError, PointPatch};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("shift vector must be orthogonal to the hexagonal plane and not a lattice vector")]
    InvalidShift,
    #[error("antiprism with b = 0 is a flat octagon")]
    DegenerateAntiprism,
    #[error(transparent)]
    Patch(#[from] PatchError),
}

fn clip_tol<T: Real>(b: &Aabb<T>) -> T {
    let scale = (0..3).map(|a| b.lo[a].abs().max(b.hi[a].abs())).fold(T::one(), T::max);
    T::lit(1e-12) * scale
}

fn sort_zyx<T: Real>(pts: &mut [Point3<T>]) {
    pts.sort_by(|a, b| cmp_real(a.z, b.z).then(cmp_real(a.y, b.y)).then(cmp_real(a.x, b.x)));
}

fn int_range<T: Real>(lo: T, hi: T, step: T, offset: T) -> std::ops::RangeInclusive<i64> {
    let a = ((lo - offset) / step).floor().to_i64().unwrap_or(0) - 1;
    let b = ((hi - offset) / step).ceil().to_i64().unwrap_or(0) + 1;
    a..=b
}

/// All integer points of `bx`.
pub fn cubic_lattice<T: Real>(bx: Aabb<T>) -> Result<PointPatch<T>, GeneratorError> {
    integer_points(bx, |_| true)
}

/// `{(x, y, z) ∈ ℤ³ | z ≢ 0 (mod 3)}` clipped to `bx`. Its cluster group at
/// radius 2R is C4v.
pub fn c4v_example<T: Real>(bx: Aabb<T>) -> Result<PointPatch<T>, GeneratorError> {
    integer_points(bx, |z| z.rem_euclid(3) != 0)
}

fn integer_points<T: Real>(bx: Aabb<T>, keep_layer: impl Fn(i64) -> bool) -> Result<PointPatch<T>, GeneratorError> {
    let tol = clip_tol(&bx);
    let one = T::one();
    let mut pts = Vec::new();
    for k in int_range(bx.lo.z, bx.hi.z, one, T::zero()) {
        if !keep_layer(k) {
            continue;
        }
        for j in int_range(bx.lo.y, bx.hi.y, one, T::zero()) {
            for i in int_range(bx.lo.x, bx.hi.x, one, T::zero()) {
                let p = Vec3::new(T::from_i64(i).unwrap(), T::from_i64(j).unwrap(), T::from_i64(k).unwrap());
                if bx.contains(p, tol) {
                    pts.push(p);
                }
            }
        }
    }
    sort_zyx(&mut pts);
    Ok(PointPatch::new(pts, bx, None)?)
}

/// Lattice with Gram matrix `[[λ, λ/2, 0], [λ/2, λ, 0], [0, 0, μ]]`:
/// hexagonal layers of side √λ stacked at spacing √μ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HexLatticeSpec<T> {
    pub lambda: T,
    pub mu: T,
}

impl<T: Real> HexLatticeSpec<T> {
    pub fn new(lambda: T, mu: T) -> Result<Self, GeneratorError> {
        if !(lambda > T::zero() && mu > T::zero() && lambda.is_finite() && mu.is_finite()) {
            return Err(GeneratorError::InvalidSpec("lambda and mu must be positive".into()));
        }
        Ok(Self { lambda, mu })
    }

    /// `a₁ = (√λ, 0, 0)`, `a₂ = (√λ/2, √(3λ)/2, 0)`, `a₃ = (0, 0, √μ)`.
    pub fn basis(&self) -> [Vec3<T>; 3] {
        let s = self.lambda.sqrt();
        let half = T::lit(0.5);
        [
            Vec3::new(s, T::zero(), T::zero()),
            Vec3::new(s * half, s * T::lit(3.0).sqrt() * half, T::zero()),
            Vec3::new(T::zero(), T::zero(), self.mu.sqrt()),
        ]
    }

    pub fn gram(&self) -> Mat3<T> {
        let b = self.basis();
        let mut g = Mat3::identity();
        for i in 0..3 {
            for j in 0..3 {
                g.m[i][j] = b[i].dot(b[j]);
            }
        }
        g
    }

    pub fn min_distance(&self) -> T {
        self.lambda.sqrt().min(self.mu.sqrt())
    }
}

/// `Γ ∪ (Γ + t)` with Γ hexagonal and `t` orthogonal to the layers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiLatticeSpec<T> {
    pub hex: HexLatticeSpec<T>,
    pub t: Vec3<T>,
}

impl<T: Real> BiLatticeSpec<T> {
    pub fn new(hex: HexLatticeSpec<T>, t: Vec3<T>) -> Result<Self, GeneratorError> {
        let tol = T::lit(1e-12);
        if t.x.abs() > tol || t.y.abs() > tol {
            return Err(GeneratorError::InvalidShift);
        }
        let h = hex.mu.sqrt();
        let frac = (t.z / h) - (t.z / h).round();
        if frac.abs() <= tol {
            return Err(GeneratorError::InvalidShift);
        }
        Ok(Self { hex, t: Vec3::new(T::zero(), T::zero(), t.z) })
    }

    /// The two alternating layer spacings, smaller first.
    pub fn layer_spacings(&self) -> (T, T) {
        let h = self.hex.mu.sqrt();
        let s = self.t.z - (self.t.z / h).floor() * h;
        (s.min(h - s), s.max(h - s))
    }

    pub fn min_distance(&self) -> T {
        self.hex.lambda.sqrt().min(self.layer_spacings().0)
    }
}

fn hex_points<T: Real>(spec: &HexLatticeSpec<T>, shift: T, bx: &Aabb<T>, out: &mut Vec<Point3<T>>) {
    let tol = clip_tol(bx);
    let [a1, a2, a3] = spec.basis();
    let s = a1.x;
    let half = T::lit(0.5);
    for k in int_range(bx.lo.z, bx.hi.z, a3.z, shift) {
        let z = a3.z * T::from_i64(k).unwrap() + shift;
        for j in int_range(bx.lo.y, bx.hi.y, a2.y, T::zero()) {
            let jf = T::from_i64(j).unwrap();
            let y = a2.y * jf;
            let off = s * half * jf;
            for i in int_range(bx.lo.x, bx.hi.x, s, off) {
                let p = Vec3::new(s * T::from_i64(i).unwrap() + off, y, z);
                if bx.contains(p, tol) {
                    out.push(p);
                }
            }
        }
    }
}

pub fn hex_lattice<T: Real>(spec: &HexLatticeSpec<T>, bx: Aabb<T>) -> Result<PointPatch<T>, GeneratorError> {
    let mut pts = Vec::new();
    hex_points(spec, T::zero(), &bx, &mut pts);
    sort_zyx(&mut pts);
    Ok(PointPatch::new(pts, bx, None)?)
}

pub fn hex_bilattice<T: Real>(spec: &BiLatticeSpec<T>, bx: Aabb<T>) -> Result<PointPatch<T>, GeneratorError> {
    let mut pts = Vec::new();
    hex_points(&spec.hex, T::zero(), &bx, &mut pts);
    hex_points(&spec.hex, spec.t.z, &bx, &mut pts);
    sort_zyx(&mut pts);
    Ok(PointPatch::new(pts, bx, None)?)
}

/// Vertices of the square antiprism generated from `(a, 0, b)` by the
/// rotoreflection of order 8 about the z-axis.
pub fn antiprism_points<T: Real>(a: T, b: T) -> Result<[Point3<T>; 8], GeneratorError> {
    if !(a > T::zero()) || !b.is_finite() {
        return Err(GeneratorError::InvalidSpec("antiprism needs a > 0".into()));
    }
    if b == T::zero() {
        return Err(GeneratorError::DegenerateAntiprism);
    }
    let d = a / T::SQRT_2();
    let z = T::zero();
    Ok([
        Vec3::new(a, z, b),
        Vec3::new(-a, z, b),
        Vec3::new(z, a, b),
        Vec3::new(z, -a, b),
        Vec3::new(d, d, -b),
        Vec3::new(d, -d, -b),
        Vec3::new(-d, d, -b),
        Vec3::new(-d, -d, -b),
    ])
}

/// Uniformly rescales a patch (points, trusted box, declared R) so that its
/// minimal interpoint distance becomes `1`, given the current value.
pub fn rescale_to_unit<T: Real>(patch: &PointPatch<T>, current_min: T) -> Result<PointPatch<T>, GeneratorError> {
    if !(current_min > T::zero()) {
        return Err(GeneratorError::InvalidSpec("minimal distance must be positive".into()));
    }
    let s = current_min.recip();
    let pts = patch.points().iter().map(|p| p.scale(s)).collect();
    let b = patch.trusted_box();
    let bx = Aabb::new(b.lo.scale(s), b.hi.scale(s))?;
    Ok(PointPatch::new(pts, bx, patch.declared_r().map(|r| r * s))?)
}

/// Which point set to generate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Cubic,
    Hex,
    HexBilattice,
    C4v,
    Antiprism,
}

impl std::str::FromStr for GeneratorKind {
    type Err = GeneratorError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            "cubic" => Self::Cubic,
            "hex" => Self::Hex,
            "hex_bilattice" => Self::HexBilattice,
            "c4v" => Self::C4v,
            "antiprism" => Self::Antiprism,
            other => return Err(GeneratorError::InvalidSpec(format!("unknown kind '{other}'"))),
        })
    }
}

/// Generator configuration as read from `key = value` lines.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub kind: GeneratorKind,
    pub lambda: f64,
    pub mu: f64,
    pub t_z: Option<f64>,
    pub a: f64,
    pub b: f64,
    pub box_lo: [f64; 3],
    pub box_hi: [f64; 3],
    /// Rescale so the minimal distance is 1.
    pub normalize: bool,
}

impl GeneratorConfig {
    pub fn new(kind: GeneratorKind) -> Self {
        Self {
            kind,
            lambda: 1.0,
            mu: 1.0,
            t_z: None,
            a: 0.75f64.sqrt(),
            b: 0.5,
            box_lo: [-4.0; 3],
            box_hi: [4.0; 3],
            normalize: false,
        }
    }

    /// Parses `key = value` lines; `#` starts a comment. Unknown keys are
    /// rejected.
    pub fn parse(text: &str) -> Result<Self, GeneratorError> {
        let mut map = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| GeneratorError::InvalidSpec(format!("line {}: expected key = value", no + 1)))?;
            map.insert(k.trim().to_string(), (no + 1, v.trim().to_string()));
        }
        let kind: GeneratorKind =
            map.remove("kind").ok_or_else(|| GeneratorError::InvalidSpec("missing 'kind'".into()))?.1.parse()?;
        let mut cfg = Self::new(kind);
        for (key, (line, val)) in map {
            let num = |v: &str| -> Result<f64, GeneratorError> {
                v.parse::<f64>().map_err(|_| GeneratorError::InvalidSpec(format!("line {line}: bad number '{v}'")))
            };
            let triple = |v: &str| -> Result<[f64; 3], GeneratorError> {
                let xs: Vec<f64> = v.split_whitespace().map(num).collect::<Result<_, _>>()?;
                xs.try_into().map_err(|_| GeneratorError::InvalidSpec(format!("line {line}: expected three numbers")))
            };
            match key.as_str() {
                "lambda" => cfg.lambda = num(&val)?,
                "mu" => cfg.mu = num(&val)?,
                "t_z" => cfg.t_z = Some(num(&val)?),
                "a" => cfg.a = num(&val)?,
                "b" => cfg.b = num(&val)?,
                "box_lo" => cfg.box_lo = triple(&val)?,
                "box_hi" => cfg.box_hi = triple(&val)?,
                "normalize" => {
                    cfg.normalize = val
                        .parse()
                        .map_err(|_| GeneratorError::InvalidSpec(format!("line {line}: expected true or false")))?
                }
                other => return Err(GeneratorError::InvalidSpec(format!("line {line}: unknown key '{other}'"))),
            }
        }
        Ok(cfg)
    }

    /// Builds the patch; also returns the analytic minimal interpoint
    /// distance of the result.
    pub fn build(&self) -> Result<(PointPatch<f64>, f64), GeneratorError> {
        let bx = Aabb::new(Vec3::from_array(self.box_lo), Vec3::from_array(self.box_hi))?;
        let (patch, min_d) = match self.kind {
            GeneratorKind::Cubic => (cubic_lattice(bx)?, 1.0),
            GeneratorKind::C4v => (c4v_example(bx)?, 1.0),
            GeneratorKind::Hex => {
                let spec = HexLatticeSpec::new(self.lambda, self.mu)?;
                (hex_lattice(&spec, bx)?, spec.min_distance())
            }
            GeneratorKind::HexBilattice => {
                let hex = HexLatticeSpec::new(self.lambda, self.mu)?;
                let t = self.t_z.ok_or_else(|| GeneratorError::InvalidSpec("hex_bilattice needs t_z".into()))?;
                let spec = BiLatticeSpec::new(hex, Vec3::new(0.0, 0.0, t))?;
                (hex_bilattice(&spec, bx)?, spec.min_distance())
            }
            GeneratorKind::Antiprism => {
                let verts = antiprism_points(self.a, self.b)?;
                let circum = verts[0].norm();
                let mut pts = vec![Vec3::zero()];
                pts.extend(verts);
                let edge = pairwise_min(&pts);
                (PointPatch::new(pts, Aabb::cube(-circum, circum)?, None)?, edge)
            }
        };
        if self.normalize && (min_d - 1.0).abs() > 0.0 {
            Ok((rescale_to_unit(&patch, min_d)?, 1.0))
        } else {
            Ok((patch, min_d))
        }
    }
}

fn pairwise_min(pts: &[Point3<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.min(pts[i].distance(pts[j]));
        }
    }
    best
}
