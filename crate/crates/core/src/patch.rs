//! Finite patches of Delone sets: packing and covering parameters, clusters
//! and shells.
//!
//! An infinite Delone set is represented by the points it has inside an
//! axis-aligned *trusted box*. Every radius-dependent query checks that the
//! ball it looks at lies inside that box and fails otherwise, so a cluster is
//! never silently truncated at the patch boundary.

use std::cmp::Ordering;

use thiserror::Error;

use crate::geometry::{cmp_real, Mat3, Point3, ToleranceContext, Vec3};
use crate::scalar::Real;
use crate::spatial::SpatialHash;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PatchError {
    #[error("no points")]
    NoPoints,
    #[error("need at least two points")]
    TooFewPoints,
    #[error("non-finite coordinate at point {index}")]
    NonFinite { index: usize },
    #[error("invalid trusted box")]
    InvalidBox,
    #[error("packing violation: points {first} and {second} are {distance} apart")]
    PackingViolation { first: usize, second: usize, distance: f64 },
    #[error("center {center} is not a point of the patch")]
    CenterNotInPatch { center: String },
    #[error("margin violation: ball of radius {radius} around {center} leaves the trusted box")]
    MarginViolation { center: String, radius: f64 },
    #[error("trusted box too small for an empty-ball search")]
    BoxTooSmall,
}

/// Closed axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb<T> {
    pub lo: Point3<T>,
    pub hi: Point3<T>,
}

impl<T: Real> Aabb<T> {
    pub fn new(lo: Point3<T>, hi: Point3<T>) -> Result<Self, PatchError> {
        let ok = lo.is_finite() && hi.is_finite() && (0..3).all(|a| lo[a] <= hi[a]);
        if ok {
            Ok(Self { lo, hi })
        } else {
            Err(PatchError::InvalidBox)
        }
    }

    /// The cube `[lo, hi]³`.
    pub fn cube(lo: T, hi: T) -> Result<Self, PatchError> {
        Self::new(Vec3::new(lo, lo, lo), Vec3::new(hi, hi, hi))
    }

    pub fn bounding(points: &[Point3<T>]) -> Option<Self> {
        let first = *points.first()?;
        let (mut lo, mut hi) = (first, first);
        for p in points {
            lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        Some(Self { lo, hi })
    }

    pub fn contains(&self, p: Point3<T>, tol: T) -> bool {
        (0..3).all(|a| p[a] >= self.lo[a] - tol && p[a] <= self.hi[a] + tol)
    }

    /// `B_c(r) ⊆ box`, up to `tol`.
    pub fn contains_ball(&self, c: Point3<T>, r: T, tol: T) -> bool {
        (0..3).all(|a| c[a] - r >= self.lo[a] - tol && c[a] + r <= self.hi[a] + tol)
    }

    /// Box shrunk by `m` on every side; `None` if it becomes empty.
    pub fn shrink(&self, m: T) -> Option<Self> {
        let d = Vec3::new(m, m, m);
        let (lo, hi) = (self.lo + d, self.hi - d);
        (0..3).all(|a| lo[a] <= hi[a]).then_some(Self { lo, hi })
    }

    pub fn width(&self, axis: usize) -> T {
        self.hi[axis] - self.lo[axis]
    }
}

/// A finite set of points standing in for an infinite Delone set inside
/// `trusted_box`.
#[derive(Clone, Debug)]
pub struct PointPatch<T> {
    points: Vec<Point3<T>>,
    trusted_box: Aabb<T>,
    declared_r: Option<T>,
    index: SpatialHash<T>,
}

impl<T: Real> PointPatch<T> {
    pub fn new(points: Vec<Point3<T>>, trusted_box: Aabb<T>, declared_r: Option<T>) -> Result<Self, PatchError> {
        if points.is_empty() {
            return Err(PatchError::NoPoints);
        }
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(PatchError::NonFinite { index });
        }
        let index = SpatialHash::new(&points, T::one());
        Ok(Self { points, trusted_box, declared_r, index })
    }

    /// Patch whose trusted box is the bounding box of the points.
    pub fn from_points(points: Vec<Point3<T>>) -> Result<Self, PatchError> {
        let b = Aabb::bounding(&points).ok_or(PatchError::NoPoints)?;
        Self::new(points, b, None)
    }

    pub fn points(&self) -> &[Point3<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn trusted_box(&self) -> &Aabb<T> {
        &self.trusted_box
    }

    pub fn declared_r(&self) -> Option<T> {
        self.declared_r
    }

    pub fn with_declared_r(mut self, r: Option<T>) -> Self {
        self.declared_r = r;
        self
    }

    pub fn index(&self) -> &SpatialHash<T> {
        &self.index
    }

    /// Applies `p ↦ m·p + t` to every point (m orthogonal).
    ///
    /// When `m` is a signed permutation the trusted box maps exactly onto an
    /// axis-aligned box. Otherwise the new trusted box is the cube inscribed
    /// in the image of the old box's inscribed ball.
    pub fn transformed(&self, m: &Mat3<T>, t: Vec3<T>) -> Result<Self, PatchError> {
        let pts: Vec<_> = self.points.iter().map(|p| m.mul_vec(*p) + t).collect();
        let b = &self.trusted_box;
        let signed_perm =
            m.m.iter().flatten().all(|v| v.abs() < T::epsilon() || (v.abs() - T::one()).abs() < T::epsilon());
        let new_box = if signed_perm {
            let (p, q) = (m.mul_vec(b.lo) + t, m.mul_vec(b.hi) + t);
            Aabb::new(
                Vec3::new(p.x.min(q.x), p.y.min(q.y), p.z.min(q.z)),
                Vec3::new(p.x.max(q.x), p.y.max(q.y), p.z.max(q.z)),
            )?
        } else {
            let half = T::lit(0.5);
            let centre = m.mul_vec((b.lo + b.hi).scale(half)) + t;
            let inner = (0..3).map(|a| b.width(a) * half).fold(T::infinity(), T::min) / T::lit(3.0).sqrt();
            let r = Vec3::new(inner, inner, inner);
            Aabb::new(centre - r, centre + r)?
        };
        Self::new(pts, new_box, self.declared_r)
    }

    /// Index of the patch point within `tol` of `p`.
    pub fn locate(&self, p: Point3<T>, tol: T) -> Option<usize> {
        self.index.find(&self.points, p, tol)
    }

    /// Whether the closed ball `B_c(ρ)` lies in the trusted box.
    pub fn is_usable(&self, c: Point3<T>, rho: T, ctx: &ToleranceContext<T>) -> bool {
        self.trusted_box.contains_ball(c, rho, ctx.geom_tol)
    }

    /// Indices of points whose ρ-ball fits inside the trusted box, in
    /// lexicographic order of the points.
    pub fn usable_centers(&self, rho: T, ctx: &ToleranceContext<T>) -> Vec<usize> {
        let mut idx: Vec<usize> =
            (0..self.points.len()).filter(|&i| self.is_usable(self.points[i], rho, ctx)).collect();
        idx.sort_by(|&a, &b| self.points[a].lex_cmp(&self.points[b]).then(a.cmp(&b)));
        idx
    }

    /// Checks the packing invariant: all pairwise distances ≥ 1 - geom_tol.
    pub fn validate(&self, ctx: &ToleranceContext<T>) -> Result<(), PatchError> {
        let limit = T::one() - ctx.geom_tol;
        for (i, p) in self.points.iter().enumerate() {
            let mut bad = None;
            self.index.for_each_within(&self.points, *p, limit, |j| {
                if j != i && bad.is_none() {
                    bad = Some(j);
                }
            });
            if let Some(j) = bad {
                let (first, second) = (i.min(j), i.max(j));
                return Err(PatchError::PackingViolation {
                    first,
                    second,
                    distance: self.points[first].distance(self.points[second]).as_f64(),
                });
            }
        }
        Ok(())
    }

    fn center_index(&self, center: Point3<T>, ctx: &ToleranceContext<T>) -> Result<usize, PatchError> {
        self.locate(center, ctx.geom_tol).ok_or_else(|| PatchError::CenterNotInPatch { center: center.to_string() })
    }

    fn check_margin(&self, c: Point3<T>, rho: T, ctx: &ToleranceContext<T>) -> Result<(), PatchError> {
        if self.is_usable(c, rho, ctx) {
            Ok(())
        } else {
            Err(PatchError::MarginViolation { center: c.to_string(), radius: rho.as_f64() })
        }
    }

    /// The cluster `C_x(ρ)` at the patch point nearest `center`.
    pub fn cluster(&self, center: Point3<T>, rho: T, ctx: &ToleranceContext<T>) -> Result<Cluster<T>, PatchError> {
        let i = self.center_index(center, ctx)?;
        self.cluster_at(i, rho, ctx)
    }

    /// The cluster of radius ρ at point index `i`.
    pub fn cluster_at(&self, i: usize, rho: T, ctx: &ToleranceContext<T>) -> Result<Cluster<T>, PatchError> {
        let c = self.points[i];
        self.check_margin(c, rho, ctx)?;
        let mut members: Vec<Point3<T>> = self
            .index
            .within(&self.points, c, rho + ctx.geom_tol)
            .into_iter()
            .filter(|&j| j != i)
            .map(|j| self.points[j])
            .collect();
        sort_by_distance(&mut members, c);
        members.insert(0, c);
        Ok(Cluster { center: c, radius: rho, members })
    }

    /// The shell `H_x(ρ)`: points at distance ρ (within `geom_tol`) from the
    /// center. For ρ = 0 this is just the center.
    pub fn shell(&self, center: Point3<T>, rho: T, ctx: &ToleranceContext<T>) -> Result<Vec<Point3<T>>, PatchError> {
        let i = self.center_index(center, ctx)?;
        let c = self.points[i];
        self.check_margin(c, rho, ctx)?;
        if rho <= ctx.geom_tol {
            return Ok(vec![c]);
        }
        let mut out: Vec<Point3<T>> = self
            .index
            .within(&self.points, c, rho + ctx.geom_tol)
            .into_iter()
            .filter(|&j| j != i && (self.points[j].distance(c) - rho).abs() <= ctx.geom_tol)
            .map(|j| self.points[j])
            .collect();
        sort_by_distance(&mut out, c);
        Ok(out)
    }
}

fn sort_by_distance<T: Real>(pts: &mut [Point3<T>], c: Point3<T>) {
    pts.sort_by(|a, b| cmp_real((*a - c).norm_squared(), (*b - c).norm_squared()).then_with(|| a.lex_cmp(b)));
}

/// `C_x(ρ)`: the center, the radius and the member points (center first,
/// then by distance from the center).
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster<T> {
    pub center: Point3<T>,
    pub radius: T,
    pub members: Vec<Point3<T>>,
}

impl<T: Real> Cluster<T> {
    /// Builds a cluster from arbitrary points; the center is added if absent.
    /// Fails if a point lies outside the closed ball.
    pub fn new(
        center: Point3<T>,
        radius: T,
        points: Vec<Point3<T>>,
        ctx: &ToleranceContext<T>,
    ) -> Result<Self, PatchError> {
        let mut members: Vec<Point3<T>> = Vec::with_capacity(points.len() + 1);
        for p in points {
            if !p.is_finite() {
                return Err(PatchError::NonFinite { index: members.len() });
            }
            if p.distance(center) <= ctx.geom_tol {
                continue;
            }
            if p.distance(center) > radius + ctx.geom_tol {
                return Err(PatchError::MarginViolation { center: center.to_string(), radius: radius.as_f64() });
            }
            members.push(p);
        }
        sort_by_distance(&mut members, center);
        members.insert(0, center);
        Ok(Self { center, radius, members })
    }

    /// Cluster whose radius is the largest member distance.
    pub fn from_points(
        center: Point3<T>,
        points: Vec<Point3<T>>,
        ctx: &ToleranceContext<T>,
    ) -> Result<Self, PatchError> {
        let radius = points.iter().map(|p| p.distance(center)).fold(T::zero(), T::max);
        Self::new(center, radius, points, ctx)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Member positions relative to the center, center excluded.
    pub fn offsets(&self) -> Vec<Vec3<T>> {
        self.members[1..].iter().map(|p| *p - self.center).collect()
    }

    /// Sorted distances of the non-center members to the center.
    pub fn distance_profile(&self) -> Vec<T> {
        let mut d: Vec<T> = self.members[1..].iter().map(|p| p.distance(self.center)).collect();
        d.sort_by(|a, b| cmp_real(*a, *b));
        d
    }

    /// Dimension of the affine hull (0..=3).
    pub fn affine_dim(&self, ctx: &ToleranceContext<T>) -> usize {
        affine_rank(&self.offsets(), ctx.ortho_tol())
    }

    pub fn is_full_dimensional(&self, ctx: &ToleranceContext<T>) -> bool {
        self.affine_dim(ctx) == 3
    }
}

/// Rank of a set of vectors by greedy volume growth with relative tolerance.
pub(crate) fn affine_rank<T: Real>(v: &[Vec3<T>], rel_tol: T) -> usize {
    let Some(a) = v
        .iter()
        .copied()
        .filter(|x| x.norm() > T::epsilon())
        .max_by(|a, b| cmp_real(a.norm_squared(), b.norm_squared()))
    else {
        return 0;
    };
    let unit = |x: Vec3<T>| x.scale(x.norm().recip());
    let au = unit(a);
    let Some((b, sb)) = v
        .iter()
        .filter(|x| x.norm() > T::epsilon())
        .map(|x| (unit(*x), au.cross(unit(*x)).norm()))
        .max_by(|x, y| cmp_real(x.1, y.1))
    else {
        return 1;
    };
    if sb <= rel_tol {
        return 1;
    }
    let n = au.cross(b).scale(sb.recip());
    let best = v.iter().filter(|x| x.norm() > T::epsilon()).map(|x| unit(*x).dot(n).abs()).fold(T::zero(), T::max);
    if best <= rel_tol {
        2
    } else {
        3
    }
}

/// Minimal pairwise distance of the patch (its packing diameter 2r).
pub fn packing_diameter<T: Real>(patch: &PointPatch<T>) -> Result<T, PatchError> {
    let pts = patch.points();
    if pts.len() < 2 {
        return Err(PatchError::TooFewPoints);
    }
    let reach = T::lit(2.0);
    let mut best = T::infinity();
    for (i, p) in pts.iter().enumerate() {
        patch.index().for_each_within(pts, *p, reach, |j| {
            if j > i {
                best = best.min(pts[j].distance(*p));
            }
        });
    }
    if best.is_finite() {
        return Ok(best);
    }
    // Sparse patch: no pair within reach of the grid search.
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.min(pts[i].distance(pts[j]));
        }
    }
    Ok(best)
}

/// How a covering radius was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoveringMethod {
    /// Circumcenter of an empty tetrahedron of patch points (a Voronoi vertex).
    Voronoi,
    /// Grid estimate; within `h·√3` of the true value.
    Grid,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoveringRadius<T> {
    pub radius: T,
    /// Center of a largest empty ball.
    pub center: Point3<T>,
    pub method: CoveringMethod,
}

/// Default spacing of the grid used to bracket the covering radius.
pub const COVERING_GRID_STEP: f64 = 0.25;

/// Radius of the largest empty ball whose closed ball lies in the trusted
/// box (equivalently: centered in the box shrunk by that radius).
///
/// A coarse grid brackets the answer; the maximum is then located exactly
/// among circumcenters of empty tetrahedra of patch points (Voronoi
/// vertices). Falls back to the grid estimate only if no Voronoi vertex is
/// admissible.
pub fn covering_radius<T: Real>(
    patch: &PointPatch<T>,
    ctx: &ToleranceContext<T>,
) -> Result<CoveringRadius<T>, PatchError> {
    let h = T::lit(COVERING_GRID_STEP);
    let samples = grid_samples(patch, h)?;
    let lower = samples
        .iter()
        .filter(|s| s.admissible)
        .max_by(|a, b| cmp_real(a.dist, b.dist))
        .ok_or(PatchError::BoxTooSmall)?;
    let lower_r = lower.dist;
    let slack = h * T::lit(3.0).sqrt() * T::lit(0.5);
    let region = patch.trusted_box.shrink(lower_r - slack).unwrap_or(patch.trusted_box);
    let upper_r =
        samples.iter().filter(|s| region.contains(s.at, T::zero())).map(|s| s.dist).fold(lower_r, T::max) + slack;

    let best = best_voronoi_vertex(patch, lower_r, upper_r, ctx);
    Ok(match best {
        Some((radius, center)) if radius >= lower_r - ctx.geom_tol => {
            CoveringRadius { radius, center, method: CoveringMethod::Voronoi }
        }
        _ => CoveringRadius { radius: lower_r, center: lower.at, method: CoveringMethod::Grid },
    })
}

/// Grid-only estimate of the covering radius at spacing `h`.
pub fn covering_radius_grid<T: Real>(patch: &PointPatch<T>, h: T) -> Result<CoveringRadius<T>, PatchError> {
    let samples = grid_samples(patch, h)?;
    let best = samples
        .iter()
        .filter(|s| s.admissible)
        .max_by(|a, b| cmp_real(a.dist, b.dist))
        .ok_or(PatchError::BoxTooSmall)?;
    Ok(CoveringRadius { radius: best.dist, center: best.at, method: CoveringMethod::Grid })
}

struct Sample<T> {
    at: Point3<T>,
    dist: T,
    admissible: bool,
}

fn grid_samples<T: Real>(patch: &PointPatch<T>, h: T) -> Result<Vec<Sample<T>>, PatchError> {
    let b = patch.trusted_box;
    let steps: Vec<usize> = (0..3).map(|a| (b.width(a) / h).ceil().to_usize().unwrap_or(0).max(1)).collect();
    if (0..3).any(|a| b.width(a) <= T::zero()) {
        return Err(PatchError::BoxTooSmall);
    }
    let coord = |a: usize, i: usize| {
        if i == steps[a] {
            b.hi[a]
        } else {
            b.lo[a] + h * T::from_usize(i).unwrap_or_else(T::zero)
        }
    };
    let mut out = Vec::with_capacity((steps[0] + 1) * (steps[1] + 1) * (steps[2] + 1));
    for i in 0..=steps[0] {
        for j in 0..=steps[1] {
            for k in 0..=steps[2] {
                let at = Vec3::new(coord(0, i), coord(1, j), coord(2, k));
                let (_, dist) = patch.index().nearest(patch.points(), at).ok_or(PatchError::NoPoints)?;
                let admissible = b.contains_ball(at, dist, T::zero());
                out.push(Sample { at, dist, admissible });
            }
        }
    }
    Ok(out)
}

/// Largest admissible empty circumsphere with radius in `[lower, upper]`.
fn best_voronoi_vertex<T: Real>(
    patch: &PointPatch<T>,
    lower: T,
    upper: T,
    ctx: &ToleranceContext<T>,
) -> Option<(T, Point3<T>)> {
    let pts = patch.points();
    let b = patch.trusted_box;
    let tol = ctx.geom_tol;
    let reach = upper * T::lit(2.0) + tol;
    // Only points within `upper` of a candidate center matter, and candidate
    // centers lie in the box shrunk by `lower`.
    let zone = b
        .shrink(lower)
        .map(|z| Aabb { lo: z.lo - Vec3::new(upper, upper, upper), hi: z.hi + Vec3::new(upper, upper, upper) })?;
    let relevant: Vec<usize> = (0..pts.len()).filter(|&i| zone.contains(pts[i], tol)).collect();

    let per_point: Vec<Option<(T, Point3<T>)>> = {
        use rayon::prelude::*;
        relevant
            .par_iter()
            .map(|&i| {
                let p = pts[i];
                let nbrs: Vec<usize> = patch.index().within(pts, p, reach).into_iter().filter(|&j| j > i).collect();
                let mut best: Option<(T, Point3<T>)> = None;
                for (x, &j) in nbrs.iter().enumerate() {
                    for (y, &k) in nbrs.iter().enumerate().skip(x + 1) {
                        if pts[j].distance(pts[k]) > reach {
                            continue;
                        }
                        for &l in nbrs.iter().skip(y + 1) {
                            if pts[j].distance(pts[l]) > reach || pts[k].distance(pts[l]) > reach {
                                continue;
                            }
                            let Some(c) = circumcenter(p, pts[j], pts[k], pts[l]) else { continue };
                            let r = c.distance(p);
                            if r < lower - tol || r > upper + tol {
                                continue;
                            }
                            if best.is_some_and(|(br, bc)| !beats(r, c, br, bc)) {
                                continue;
                            }
                            if !b.contains_ball(c, r, tol) {
                                continue;
                            }
                            let nearest = patch.index().nearest(pts, c).map_or(T::zero(), |(_, d)| d);
                            if nearest < r - tol {
                                continue;
                            }
                            best = Some((r, c));
                        }
                    }
                }
                best
            })
            .collect()
    };
    per_point.into_iter().flatten().fold(None, |acc: Option<(T, Point3<T>)>, cand| match acc {
        Some((ar, ac)) if !beats(cand.0, cand.1, ar, ac) => Some((ar, ac)),
        _ => Some(cand),
    })
}

/// Larger radius wins; equal radii fall back to the lexicographically
/// smaller center.
fn beats<T: Real>(r: T, c: Point3<T>, br: T, bc: Point3<T>) -> bool {
    match cmp_real(r, br) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => c.lex_cmp(&bc) == Ordering::Less,
    }
}

fn circumcenter<T: Real>(a: Point3<T>, b: Point3<T>, c: Point3<T>, d: Point3<T>) -> Option<Point3<T>> {
    let (u, v, w) = (b - a, c - a, d - a);
    let m = Mat3::from_rows([u.to_array(), v.to_array(), w.to_array()]);
    let scale = u.norm() * v.norm() * w.norm();
    if m.det().abs() <= T::lit(1e-9) * scale {
        return None;
    }
    let half = T::lit(0.5);
    let rhs = Vec3::new(u.norm_squared() * half, v.norm_squared() * half, w.norm_squared() * half);
    Some(a + m.inverse()?.mul_vec(rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn ctx() -> ToleranceContext<f64> {
        ToleranceContext::default()
    }

    fn z3(half: f64) -> PointPatch<f64> {
        generators::cubic_lattice(Aabb::cube(-half, half).unwrap()).unwrap()
    }

    #[test]
    fn packing_of_unit_lattice() {
        assert_eq!(packing_diameter(&z3(2.0)).unwrap(), 1.0);
    }

    #[test]
    fn packing_violation_reported() {
        let p = PointPatch::from_points(vec![Vec3::zero(), Vec3::new(0.9f64, 0.0, 0.0)]).unwrap();
        assert!((packing_diameter(&p).unwrap() - 0.9).abs() < 1e-15);
        assert!(matches!(p.validate(&ctx()), Err(PatchError::PackingViolation { first: 0, second: 1, .. })));
        let single = PointPatch::from_points(vec![Vec3::<f64>::zero()]).unwrap();
        assert_eq!(packing_diameter(&single), Err(PatchError::TooFewPoints));
    }

    #[test]
    fn sparse_packing_falls_back() {
        let p =
            PointPatch::from_points(vec![Vec3::zero(), Vec3::new(7.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 5.0)]).unwrap();
        assert_eq!(packing_diameter(&p).unwrap(), 5.0);
    }

    #[test]
    fn covering_radius_of_unit_lattice() {
        let cr = covering_radius(&z3(3.0), &ctx()).unwrap();
        assert_eq!(cr.method, CoveringMethod::Voronoi);
        assert!((cr.radius - 3f64.sqrt() / 2.0).abs() < 1e-9, "{}", cr.radius);
    }

    #[test]
    fn clusters_of_unit_lattice() {
        let p = z3(3.0);
        let c = ctx();
        let o = Vec3::zero();
        assert_eq!(p.cluster(o, 1.0, &c).unwrap().len(), 7);
        assert_eq!(p.cluster(o, 0.5, &c).unwrap().len(), 1);
        assert_eq!(p.cluster(o, 2f64.sqrt(), &c).unwrap().len(), 19);
        assert_eq!(p.shell(o, 1.0, &c).unwrap().len(), 6);
        assert!(p.shell(o, 1.2, &c).unwrap().is_empty());
        assert_eq!(p.shell(o, 0.0, &c).unwrap(), vec![o]);
    }

    #[test]
    fn cluster_errors() {
        let p = z3(2.0);
        let c = ctx();
        assert!(matches!(p.cluster(Vec3::new(0.5, 0.0, 0.0), 1.0, &c), Err(PatchError::CenterNotInPatch { .. })));
        assert!(matches!(p.cluster(Vec3::new(2.0, 0.0, 0.0), 1.0, &c), Err(PatchError::MarginViolation { .. })));
        assert!(matches!(p.shell(Vec3::new(0.0, 0.0, 1.0), 1.5, &c), Err(PatchError::MarginViolation { .. })));
    }

    #[test]
    fn cluster_is_union_of_shells() {
        let p = z3(3.0);
        let c = ctx();
        let cl = p.cluster(Vec3::zero(), 2.0, &c).unwrap();
        let mut radii: Vec<f64> = cl.distance_profile();
        radii.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let total: usize = radii.iter().map(|&r| p.shell(Vec3::zero(), r, &c).unwrap().len()).sum();
        assert_eq!(total + 1, cl.len());
    }

    #[test]
    fn affine_dimension() {
        let c = ctx();
        let line = Cluster::from_points(Vec3::zero(), vec![Vec3::e_x(), -Vec3::e_x()], &c).unwrap();
        assert_eq!(line.affine_dim(&c), 1);
        let plane = Cluster::from_points(Vec3::zero(), vec![Vec3::e_x(), Vec3::e_y()], &c).unwrap();
        assert_eq!(plane.affine_dim(&c), 2);
        let solid = Cluster::from_points(Vec3::zero(), vec![Vec3::e_x(), Vec3::e_y(), Vec3::e_z()], &c).unwrap();
        assert_eq!(solid.affine_dim(&c), 3);
        let point = Cluster::from_points(Vec3::zero(), vec![], &c).unwrap();
        assert_eq!(point.affine_dim(&c), 0);
    }

    #[test]
    fn usable_centers_shrink_with_radius() {
        let p = z3(3.0);
        let c = ctx();
        let small = p.usable_centers(1.0, &c);
        let large = p.usable_centers(2.0, &c);
        assert_eq!(small.len(), 125);
        assert_eq!(large.len(), 27);
        assert!(large.iter().all(|i| small.contains(i)));
    }
}
