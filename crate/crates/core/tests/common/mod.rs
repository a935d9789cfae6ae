#![allow(dead_code)]

use std::f64::consts::TAU;

use delone::antiprism_opt::{lemma1_objective, p_y_vertices, Lemma1Params, FEAS_TOL, PAIR_FILTER};
use delone::equivalence::{cluster_classes_among, cluster_isometry, matching_error};
use delone::generators::antiprism_points;
use delone::geometry::{Isometry, Mat3, OrthogonalMap, ToleranceContext, Vec3};
use delone::patch::{Aabb, Cluster, PointPatch};
use delone::point_group::{omega, stabilizer, tower_height, PointGroup};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type P = Vec3<f64>;

pub fn ctx() -> ToleranceContext<f64> {
    ToleranceContext::default()
}

pub fn orth(m: Mat3<f64>) -> OrthogonalMap<f64> {
    OrthogonalMap::new(m, &ctx()).unwrap()
}

/// Uniform-ish random element of O(3) from a unit quaternion and a sign.
pub fn random_orthogonal() -> impl Strategy<Value = OrthogonalMap<f64>> {
    (-1.0..1.0f64, 0.0..TAU, 0.0..TAU, any::<bool>()).prop_map(|(u, t1, t2, improper)| {
        let r = (1.0 - u * u).sqrt();
        let axis = Vec3::new(r * t1.cos(), r * t1.sin(), u);
        let m = Mat3::rotation(axis, t2);
        orth(if improper { m.scale(-1.0) } else { m })
    })
}

pub fn random_isometry() -> impl Strategy<Value = Isometry<f64>> {
    (random_orthogonal(), -5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64)
        .prop_map(|(q, x, y, z)| Isometry { q, t: Vec3::new(x, y, z) })
}

/// Lattice bases with varying symmetry: cubic, tetragonal, hexagonal,
/// orthorhombic, body-centred and a generic one.
pub fn lattice_basis() -> impl Strategy<Value = [P; 3]> {
    (0usize..6, 1.0..1.6f64, 1.0..1.6f64, 0.0..0.45f64).prop_map(|(kind, s, t, w)| match kind {
        0 => [Vec3::e_x(), Vec3::e_y(), Vec3::e_z()],
        1 => [Vec3::e_x(), Vec3::e_y(), Vec3::new(0.0, 0.0, s)],
        2 => [Vec3::e_x(), Vec3::new(0.5, 3f64.sqrt() / 2.0, 0.0), Vec3::new(0.0, 0.0, s)],
        3 => [Vec3::e_x(), Vec3::new(0.0, s, 0.0), Vec3::new(0.0, 0.0, t)],
        4 => [Vec3::new(s, 0.0, 0.0), Vec3::new(0.0, s, 0.0), Vec3::new(s / 2.0, s / 2.0, s / 2.0)],
        _ => [Vec3::e_x(), Vec3::new(w, s, 0.0), Vec3::new(w / 2.0, w / 3.0, t)],
    })
}

/// Lattice points with integer coordinates in `[-k, k]³`, clipped to the
/// ball of radius `reach`.
pub fn lattice_points(basis: &[P; 3], k: i32, reach: f64) -> Vec<P> {
    let mut out = vec![];
    for i in -k..=k {
        for j in -k..=k {
            for l in -k..=k {
                let p = basis[0].scale(i as f64) + basis[1].scale(j as f64) + basis[2].scale(l as f64);
                if p.norm() <= reach {
                    out.push(p);
                }
            }
        }
    }
    out
}

pub fn lattice_cluster(basis: &[P; 3], rho: f64) -> Cluster<f64> {
    Cluster::new(Vec3::zero(), rho, lattice_points(basis, 8, rho + 1e-6), &ctx()).unwrap()
}

pub fn apply_all(g: &Isometry<f64>, pts: &[P]) -> Vec<P> {
    pts.iter().map(|p| g.apply(*p)).collect()
}

pub fn moved_cluster(g: &Isometry<f64>, c: &Cluster<f64>) -> Cluster<f64> {
    Cluster::new(g.apply(c.center), c.radius, apply_all(g, &c.members), &ctx()).unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg.into()))
    }
}

// Cluster-group monotonicity.

pub fn monotonicity_input() -> impl Strategy<Value = ([P; 3], f64, f64, OrthogonalMap<f64>)> {
    (lattice_basis(), 1.7..2.6f64, 0.0..1.0f64, random_orthogonal()).prop_map(|(b, r1, f, u)| (b, r1, r1 + f, u))
}

pub fn check_monotonicity((basis, rho, rho2, u): ([P; 3], f64, f64, OrthogonalMap<f64>)) -> Result<(), TestCaseError> {
    let g = Isometry { q: u, t: Vec3::zero() };
    let small = moved_cluster(&g, &lattice_cluster(&basis, rho));
    let large = moved_cluster(&g, &lattice_cluster(&basis, rho2));
    let c = ctx();
    let s_small = stabilizer(&small, &c).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let s_large = stabilizer(&large, &c).map_err(|e| TestCaseError::fail(e.to_string()))?;
    ensure(
        s_large.is_subset_of(&s_small, c.dedup_tol),
        format!("S({rho2}) = {} not inside S({rho}) = {}", s_large.label(), s_small.label()),
    )
}

// N(ρ) non-decreasing for a fixed set of centers.

pub fn counting_input() -> impl Strategy<Value = ([P; 3], u64, f64, f64, f64)> {
    (lattice_basis(), any::<u64>(), prop_oneof![Just(0.0), 0.0..0.08f64], 1.7..2.0f64, 0.0..0.5f64)
        .prop_map(|(b, seed, jitter, r1, d)| (b, seed, jitter, r1, r1 + d))
}

/// Lattice points in `[-h, h]³` with a deterministic pseudo-random jitter
/// applied away from the origin's orbit.
pub fn jittered_patch(basis: &[P; 3], h: f64, seed: u64, jitter: f64) -> PointPatch<f64> {
    let mut state = seed | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let bx = Aabb::cube(-h, h).unwrap();
    let pts: Vec<P> = lattice_points(basis, 10, f64::INFINITY)
        .into_iter()
        .filter(|p| bx.contains(*p, 1e-12))
        .map(|p| p + Vec3::new(next(), next(), next()).scale(jitter))
        .collect();
    PointPatch::new(pts, bx, None).unwrap()
}

pub fn check_counting((basis, seed, jitter, rho, rho2): ([P; 3], u64, f64, f64, f64)) -> Result<(), TestCaseError> {
    let c = ctx();
    let patch = jittered_patch(&basis, 4.0, seed, jitter);
    let mut centers = patch.usable_centers(rho2, &c);
    centers.truncate(12);
    if centers.is_empty() {
        return Ok(());
    }
    let n1 = cluster_classes_among(&patch, rho, &centers, &c).map_err(|e| TestCaseError::fail(e.to_string()))?.n();
    let n2 = cluster_classes_among(&patch, rho2, &centers, &c).map_err(|e| TestCaseError::fail(e.to_string()))?.n();
    ensure(n1 <= n2, format!("N({rho}) = {n1} > N({rho2}) = {n2}"))?;
    if jitter == 0.0 {
        ensure(n2 == 1, format!("lattice patch gave N({rho2}) = {n2}"))?;
    }
    Ok(())
}

// Equivalence-relation laws.

pub fn random_cluster() -> impl Strategy<Value = Cluster<f64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 4..14).prop_filter_map("too close", |raw| {
        let mut pts: Vec<P> = vec![Vec3::zero()];
        for (x, y, z) in raw {
            let p = Vec3::new(x, y, z).scale(2.0);
            if p.norm() <= 2.0 && pts.iter().all(|q| q.distance(p) > 0.3) {
                pts.push(p);
            }
        }
        if pts.len() < 5 {
            return None;
        }
        Cluster::new(Vec3::zero(), 2.0, pts, &ctx()).ok()
    })
}

pub fn laws_input() -> impl Strategy<Value = (Cluster<f64>, Isometry<f64>, Isometry<f64>, usize, (f64, f64, f64))> {
    (random_cluster(), random_isometry(), random_isometry(), any::<usize>(), (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64))
}

pub fn check_laws(
    (a, g, h, k, d): (Cluster<f64>, Isometry<f64>, Isometry<f64>, usize, (f64, f64, f64)),
) -> Result<(), TestCaseError> {
    let c = ctx();
    let tol = c.match_tol(a.radius);
    let b = moved_cluster(&g, &a);
    let cc = moved_cluster(&h, &b);
    let iso =
        |x: &Cluster<f64>, y: &Cluster<f64>| cluster_isometry(x, y, &c).map_err(|e| TestCaseError::fail(e.to_string()));
    let refl = iso(&a, &a)?;
    ensure(refl.is_some(), "not reflexive")?;
    for (x, y) in [(&a, &b), (&b, &a), (&b, &cc), (&a, &cc), (&cc, &a)] {
        match iso(x, y)? {
            Some(m) => ensure(matching_error(&m, x, y) <= tol, "returned isometry does not match")?,
            None => return Err(TestCaseError::fail("congruent clusters reported inequivalent")),
        }
    }
    // A non-center member moved off its orbit breaks equivalence.
    let i = 1 + k % (a.members.len() - 1);
    let mut pts = a.members.clone();
    let dir = Vec3::new(d.0, d.1, d.2);
    let dir = dir.normalized().unwrap_or(Vec3::e_x());
    pts[i] = pts[i] - pts[i].scale(0.1) + dir.scale(0.05);
    if let Ok(a2) = Cluster::new(Vec3::zero(), 2.0, pts, &c) {
        let fwd = iso(&a2, &b)?.is_some();
        let back = iso(&b, &a2)?.is_some();
        ensure(fwd == back, "equivalence not symmetric")?;
        if let Some(m) = iso(&a2, &b)? {
            ensure(matching_error(&m, &a2, &b) <= tol, "returned isometry does not match")?;
        }
    }
    Ok(())
}

// Conjugacy of stabilizers of equivalent clusters.

pub fn conjugacy_input() -> impl Strategy<Value = ([P; 3], f64, Isometry<f64>)> {
    (lattice_basis(), 1.7..2.6f64, random_isometry())
}

pub fn check_conjugacy((basis, rho, g): ([P; 3], f64, Isometry<f64>)) -> Result<(), TestCaseError> {
    let c = ctx();
    let a = lattice_cluster(&basis, rho);
    let b = moved_cluster(&g, &a);
    let sa = stabilizer(&a, &c).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let sb = stabilizer(&b, &c).map_err(|e| TestCaseError::fail(e.to_string()))?;
    ensure(sa.label() == sb.label(), format!("labels {} vs {}", sa.label(), sb.label()))?;
    let conj =
        PointGroup::from_elements(b.center, sa.conjugated(&g.q), &c).map_err(|e| TestCaseError::fail(e.to_string()))?;
    ensure(conj.same_elements(&sb, c.dedup_tol), "S_b is not g S_a g^-1")
}

// lemma1_objective against an independent 64-pair scan.

pub fn lemma1_input() -> impl Strategy<Value = (f64, f64)> {
    let (lo, hi) = delone::antiprism_opt::lemma1_phi_range();
    (lo..=hi, 0.0..TAU)
}

pub fn check_lemma1_brute((phi, psi): (f64, f64)) -> Result<(), TestCaseError> {
    let p = Lemma1Params::from_angles(phi, psi);
    let f = lemma1_objective(&p, PAIR_FILTER, FEAS_TOL).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let px = antiprism_points(p.a, p.b).unwrap();
    let py = p_y_vertices(&p, FEAS_TOL).unwrap();
    let mut all = Vec::with_capacity(64);
    for u in px {
        for v in py {
            let (dx, dy, dz) = (u.x - v.x, u.y - v.y, u.z - v.z);
            all.push((dx * dx + dy * dy + dz * dz).sqrt());
        }
    }
    ensure(all.len() == 64, "expected 64 pairs")?;
    let brute = all.into_iter().filter(|d| *d >= 0.01).fold(f64::INFINITY, f64::min);
    ensure((f - brute).abs() <= 1e-12, format!("objective {f} vs brute force {brute}"))
}

// tower_height ≤ Ω(|G|) + 1.

pub const GROUP_KINDS: &[&str] = &["C", "S", "Cnh", "Cnv", "D", "Dnh", "Dnd", "T", "Td", "Th", "O", "Oh", "I", "Ih"];

fn rot(axis: P, n: u32) -> Mat3<f64> {
    Mat3::rotation(axis, TAU / n as f64)
}

/// Generators of a finite point group of the given family.
pub fn group_generators(kind: &str, n: u32) -> Vec<Mat3<f64>> {
    let z = Vec3::e_z();
    let x = Vec3::e_x();
    let sigma_z = Mat3::reflection(z);
    let c3 = rot(Vec3::new(1.0, 1.0, 1.0), 3);
    let c2z = rot(z, 2);
    let inv = Mat3::identity().scale(-1.0);
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let c5 = rot(Vec3::new(0.0, 1.0, phi), 5);
    match kind {
        "C" => vec![rot(z, n)],
        "S" => vec![rot(z, n) * sigma_z],
        "Cnh" => vec![rot(z, n), sigma_z],
        "Cnv" => vec![rot(z, n), Mat3::reflection(x)],
        "D" => vec![rot(z, n), rot(x, 2)],
        "Dnh" => vec![rot(z, n), rot(x, 2), sigma_z],
        "Dnd" => vec![rot(z, 2 * n) * sigma_z, rot(x, 2)],
        "T" => vec![c2z, c3],
        "Td" => vec![c2z, c3, Mat3::reflection(Vec3::new(1.0, -1.0, 0.0))],
        "Th" => vec![c2z, c3, inv],
        "O" => vec![rot(z, 4), c3],
        "Oh" => vec![rot(z, 4), c3, inv],
        "I" => vec![c5, c3],
        "Ih" => vec![c5, c3, inv],
        _ => unreachable!(),
    }
}

pub fn tower_input() -> impl Strategy<Value = (usize, u32, OrthogonalMap<f64>)> {
    (0..GROUP_KINDS.len(), 1u32..=8, random_orthogonal())
}

pub fn check_tower((k, n, u): (usize, u32, OrthogonalMap<f64>)) -> Result<(), TestCaseError> {
    let c = ctx();
    let gens: Vec<OrthogonalMap<f64>> = group_generators(GROUP_KINDS[k], n)
        .into_iter()
        .map(|m| orth(*u.matrix() * m * u.matrix().transpose()))
        .collect();
    let g = PointGroup::generate(Vec3::zero(), &gens, &c)
        .map_err(|e| TestCaseError::fail(format!("{} n={n}: {e}", GROUP_KINDS[k])))?;
    let h = tower_height(&g, &c).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let bound = omega(g.order() as u64) + 1;
    ensure(h <= bound, format!("{}: tower {h} > {bound}", g.label()))
}
