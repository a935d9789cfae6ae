//! Cluster equivalence (center-preserving congruence) and the cluster
//! counting function N(ρ).

use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{frame_map, Isometry, Mat3, OrthogonalMap, ToleranceContext, Vec3};
use crate::patch::{Cluster, PatchError, PointPatch};
use crate::scalar::Real;
use crate::spatial::SpatialHash;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquivalenceError {
    #[error("cluster radii differ: {a} vs {b}")]
    RadiusMismatch { a: f64, b: f64 },
    #[error("margin violation: no center has a ball of radius {rho} inside the trusted box")]
    NoUsableCenters { rho: f64 },
    #[error(transparent)]
    Patch(#[from] PatchError),
}

/// How many nearest members are considered when picking the frame.
const FRAME_POOL: usize = 12;

/// Frame of a cluster as indices into its offsets; fewer than three for
/// lower-dimensional clusters.
struct Frame {
    idx: Vec<usize>,
}

fn choose_frame<T: Real>(offsets: &[Vec3<T>], rel: T) -> Frame {
    if offsets.is_empty() {
        return Frame { idx: vec![] };
    }
    let pick = |pool: usize| -> Vec<usize> {
        let pool = &offsets[..pool.min(offsets.len())];
        let mut idx = vec![0];
        let a1 = pool[0];
        let cross = |i: usize| a1.cross(pool[i]).norm() / (a1.norm() * pool[i].norm());
        let best2 = (1..pool.len()).map(|i| (i, cross(i))).fold(None, |acc: Option<(usize, T)>, (i, v)| match acc {
            Some((_, bv)) if bv >= v => acc,
            _ => Some((i, v)),
        });
        let Some((i2, s2)) = best2 else { return idx };
        if s2 <= rel {
            return idx;
        }
        idx.push(i2);
        let a2 = pool[i2];
        let vol = |i: usize| Mat3::from_cols(a1, a2, pool[i]).det().abs() / (a1.norm() * a2.norm() * pool[i].norm());
        let best3 =
            (1..pool.len()).filter(|&i| i != i2).map(|i| (i, vol(i))).fold(None, |acc: Option<(usize, T)>, (i, v)| {
                match acc {
                    Some((_, bv)) if bv >= v => acc,
                    _ => Some((i, v)),
                }
            });
        if let Some((i3, s3)) = best3 {
            if s3 > rel {
                idx.push(i3);
            }
        }
        idx
    };
    let near = pick(FRAME_POOL);
    if near.len() == 3 || offsets.len() <= FRAME_POOL {
        return Frame { idx: near };
    }
    Frame { idx: pick(offsets.len()) }
}

/// Any unit vector orthogonal to `v`.
fn orthogonal_unit<T: Real>(v: Vec3<T>) -> Vec3<T> {
    let e = if v.x.abs() <= v.y.abs() && v.x.abs() <= v.z.abs() {
        Vec3::e_x()
    } else if v.y.abs() <= v.z.abs() {
        Vec3::e_y()
    } else {
        Vec3::e_z()
    };
    let w = v.cross(e);
    w.scale(w.norm().recip())
}

/// Completes a rank-1 or rank-2 frame to three independent vectors.
/// `flip` selects the handedness of the completion.
fn complete<T: Real>(f: &[Vec3<T>], flip: bool) -> [Vec3<T>; 3] {
    let s = if flip { -T::one() } else { T::one() };
    match f {
        [a] => {
            let u = orthogonal_unit(*a).scale(a.norm());
            let w = a.cross(u).scale(s / a.norm());
            [*a, u, w]
        }
        [a, b] => {
            let c = a.cross(*b);
            let c = c.scale(s * (a.norm() * b.norm()).sqrt() / c.norm());
            [*a, *b, c]
        }
        [a, b, c] => [*a, *b, *c],
        _ => unreachable!(),
    }
}

struct Target<'a, T> {
    offsets: &'a [Vec3<T>],
    hash: SpatialHash<T>,
}

impl<'a, T: Real> Target<'a, T> {
    fn new(offsets: &'a [Vec3<T>]) -> Self {
        Self { offsets, hash: SpatialHash::new(offsets, T::one()) }
    }

    /// Whether `q` maps every source offset onto a distinct target offset.
    fn verifies(&self, src: &[Vec3<T>], q: &Mat3<T>, tol: T) -> bool {
        let mut used = vec![false; self.offsets.len()];
        for p in src {
            match self.hash.find(self.offsets, q.mul_vec(*p), tol) {
                Some(j) if !used[j] => used[j] = true,
                _ => return false,
            }
        }
        true
    }
}

fn profiles_match<T: Real>(a: &[T], b: &[T], tol: T) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (*x - *y).abs() <= tol)
}

/// Orthogonal maps `Q` with `Q(a - a.center) = b - b.center` as sets.
/// With `all = false` stops at the first one found.
pub(crate) fn orthogonal_matches<T: Real>(
    a: &Cluster<T>,
    b: &Cluster<T>,
    ctx: &ToleranceContext<T>,
    all: bool,
) -> Vec<Mat3<T>> {
    let tol = ctx.match_tol(a.radius.max(b.radius));
    if a.len() != b.len() || !profiles_match(&a.distance_profile(), &b.distance_profile(), tol) {
        return vec![];
    }
    let oa = a.offsets();
    let ob = b.offsets();
    if oa.is_empty() {
        return vec![Mat3::identity()];
    }
    let frame = choose_frame(&oa, ctx.ortho_tol());
    let fa: Vec<Vec3<T>> = frame.idx.iter().map(|&i| oa[i]).collect();
    let target = Target::new(&ob);
    let candidates: Vec<Vec<usize>> = fa
        .iter()
        .map(|v| {
            let n = v.norm();
            (0..ob.len()).filter(|&j| (ob[j].norm() - n).abs() <= tol).collect()
        })
        .collect();
    let flips: &[bool] = if fa.len() == 3 { &[false] } else { &[false, true] };

    let mut out: Vec<Mat3<T>> = Vec::new();
    let mut chosen = vec![0usize; fa.len()];
    let push = |q: Mat3<T>, out: &mut Vec<Mat3<T>>| {
        if !out.iter().any(|m| m.max_abs_diff(&q) < ctx.dedup_tol) {
            out.push(q);
        }
    };
    // Depth-first over image choices, pruning on pairwise distances.
    fn walk<T: Real>(
        depth: usize,
        fa: &[Vec3<T>],
        ob: &[Vec3<T>],
        cands: &[Vec<usize>],
        chosen: &mut Vec<usize>,
        tol: T,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if depth == fa.len() {
            return visit(chosen);
        }
        for &j in &cands[depth] {
            let ok = (0..depth)
                .all(|k| chosen[k] != j && ((fa[depth] - fa[k]).norm() - (ob[j] - ob[chosen[k]]).norm()).abs() <= tol);
            if ok {
                chosen[depth] = j;
                if walk(depth + 1, fa, ob, cands, chosen, tol, visit) {
                    return true;
                }
            }
        }
        false
    }
    let mut visit = |img: &[usize]| -> bool {
        let fb: Vec<Vec3<T>> = img.iter().map(|&j| ob[j]).collect();
        for &flip in flips {
            let src = complete(&fa, false);
            let dst = complete(&fb, flip);
            if let Some(q) = frame_map(src, dst, tol) {
                if target.verifies(&oa, &q, tol) {
                    push(q, &mut out);
                    if !all {
                        return true;
                    }
                }
            }
        }
        false
    };
    walk(0, &fa, &ob, &candidates, &mut chosen, tol, &mut visit);
    out
}

/// An isometry `g` with `g(a.center) = b.center` and `g(a) = b` as sets, if
/// one exists.
pub fn cluster_isometry<T: Real>(
    a: &Cluster<T>,
    b: &Cluster<T>,
    ctx: &ToleranceContext<T>,
) -> Result<Option<Isometry<T>>, EquivalenceError> {
    if (a.radius - b.radius).abs() > ctx.match_tol(a.radius.max(b.radius)) {
        return Err(EquivalenceError::RadiusMismatch { a: a.radius.as_f64(), b: b.radius.as_f64() });
    }
    Ok(orthogonal_matches(a, b, ctx, false).into_iter().next().map(|q| {
        let q = OrthogonalMap::new_unchecked(q);
        Isometry { q, t: b.center - q.apply(a.center) }
    }))
}

/// Partition of the usable ρ-clusters of a patch into equivalence classes.
#[derive(Clone, Debug)]
pub struct ClusterClassDecomposition<T> {
    pub rho: T,
    /// One cluster per class, centered at the lexicographically smallest
    /// center of that class.
    pub class_representatives: Vec<Cluster<T>>,
    /// Patch indices of the usable centers, in lexicographic order.
    pub centers: Vec<usize>,
    /// Class index of each entry of `centers`.
    pub assignment: Vec<usize>,
}

impl<T: Real> ClusterClassDecomposition<T> {
    /// N(ρ).
    pub fn n(&self) -> usize {
        self.class_representatives.len()
    }

    pub fn class_of(&self, patch_index: usize) -> Option<usize> {
        self.centers.iter().position(|&c| c == patch_index).map(|k| self.assignment[k])
    }

    /// Class sizes in class order.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.n()];
        for &a in &self.assignment {
            s[a] += 1;
        }
        s
    }
}

/// N(ρ) over all usable centers of the patch.
pub fn cluster_classes<T: Real>(
    patch: &PointPatch<T>,
    rho: T,
    ctx: &ToleranceContext<T>,
) -> Result<ClusterClassDecomposition<T>, EquivalenceError> {
    let centers = patch.usable_centers(rho, ctx);
    cluster_classes_among(patch, rho, &centers, ctx)
}

/// As [`cluster_classes`] restricted to the given patch indices, which are
/// processed in lexicographic order of their points.
pub fn cluster_classes_among<T: Real>(
    patch: &PointPatch<T>,
    rho: T,
    centers: &[usize],
    ctx: &ToleranceContext<T>,
) -> Result<ClusterClassDecomposition<T>, EquivalenceError> {
    if centers.is_empty() {
        return Err(EquivalenceError::NoUsableCenters { rho: rho.as_f64() });
    }
    let mut centers = centers.to_vec();
    let pts = patch.points();
    centers.sort_by(|&a, &b| pts[a].lex_cmp(&pts[b]).then(a.cmp(&b)));
    centers.dedup();
    let clusters: Vec<Cluster<T>> =
        centers.par_iter().map(|&i| patch.cluster_at(i, rho, ctx)).collect::<Result<_, _>>()?;
    let profiles: Vec<Vec<T>> = clusters.par_iter().map(|c| c.distance_profile()).collect();
    let tol = ctx.match_tol(rho);

    let mut assignment: Vec<Option<usize>> = vec![None; centers.len()];
    let mut reps: Vec<usize> = Vec::new();
    // Each round: the first unassigned center founds a class, then every
    // remaining center is tested against it in parallel.
    while let Some(first) = assignment.iter().position(Option::is_none) {
        let class = reps.len();
        reps.push(first);
        assignment[first] = Some(class);
        let rep = &clusters[first];
        let rep_profile = &profiles[first];
        let hits: Vec<usize> = (first + 1..centers.len())
            .into_par_iter()
            .filter(|&k| {
                assignment[k].is_none()
                    && profiles_match(&profiles[k], rep_profile, tol)
                    && !orthogonal_matches(rep, &clusters[k], ctx, false).is_empty()
            })
            .collect();
        for k in hits {
            assignment[k] = Some(class);
        }
    }
    Ok(ClusterClassDecomposition {
        rho,
        class_representatives: reps.iter().map(|&k| clusters[k].clone()).collect(),
        centers,
        assignment: assignment.into_iter().map(|a| a.unwrap()).collect(),
    })
}

/// Maximal pointwise error of `g` applied to `a` against `b`.
pub fn matching_error<T: Real>(g: &Isometry<T>, a: &Cluster<T>, b: &Cluster<T>) -> T {
    a.members
        .iter()
        .map(|p| {
            let q = g.apply(*p);
            b.members.iter().map(|m| m.distance(q)).fold(T::infinity(), T::min)
        })
        .fold(T::zero(), T::max)
}
