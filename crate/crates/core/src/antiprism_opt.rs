//! The two square-antiprism extremal problems.
//!
//! Problem 1: `x = 0` and `y = (a, 0, b)` are points whose unit-circumradius
//! clusters are square antiprisms `P_x` and `P_y` sharing the vertex pair.
//! Maximise the smallest distance between a vertex of `P_x` and a vertex of
//! `P_y`, ignoring pairs closer than a filter radius.
//!
//! Problem 2: maximise `|zu₁| + |zu₂| − 1 − √(a²+b²)` for
//! `z = (a, 0, b)`, `u₁ = (x, y, 1−b)`, `u₂ = (y, −x, 1−b)`.
//!
//! Both feasible sets are parametrised over a unit cube and searched by a
//! deterministic grid of projected Nelder-Mead starts.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::generators::antiprism_points;
use crate::geometry::{Point3, Vec3};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AntiprismError {
    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),
    #[error("division by zero: b = 0")]
    DivisionByZero,
    #[error("no start converged within the iteration budget")]
    BudgetExhausted,
}

/// Default absolute tolerance on constraint residuals.
pub const FEAS_TOL: f64 = 1e-9;
/// Default exclusion radius for vertex pairs in problem 1.
pub const PAIR_FILTER: f64 = 0.01;

fn k_ratio<T: Real>() -> T {
    T::lit(3.0) / (T::SQRT_2() - T::one())
}

/// `y = (a, 0, b)` and the unit vector `(x, y, z)` from `y` to the
/// opposite-base vertex of `P_y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma1Params<T> {
    pub a: T,
    pub b: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Lemma1Params<T> {
    /// Largest constraint violation.
    pub fn residual(&self) -> T {
        let Self { a, b, x, y, z } = *self;
        let one = T::one();
        let zero = T::zero();
        [
            (a * a + b * b - one).abs(),
            (b * b - a * a).max(zero),
            (-(a * a * (one - T::SQRT_2()) + T::lit(3.0) * b * b)).max(zero),
            (x * x + y * y + z * z - one).abs(),
            (a * x + b * z - (a * a - b * b)).abs(),
        ]
        .into_iter()
        .fold(zero, T::max)
    }

    fn check(&self, feas_tol: T) -> Result<(), AntiprismError> {
        if self.b == T::zero() {
            return Err(AntiprismError::DivisionByZero);
        }
        let r = self.residual();
        if !(r <= feas_tol) {
            return Err(AntiprismError::InfeasibleParams(format!("constraint residual {r}")));
        }
        Ok(())
    }

    /// `(a, b) = (cos φ, sin φ)`; `(x, y, z)` runs over the circle cut from
    /// the unit sphere by `ax + bz = a² − b²`, parametrised by `ψ`.
    pub fn from_angles(phi: T, psi: T) -> Self {
        let (b, a) = phi.sin_cos();
        let c = a * a - b * b;
        let s = (T::one() - c * c).max(T::zero()).sqrt();
        let e1 = Vec3::new(a, T::zero(), b);
        let e2 = Vec3::new(-b, T::zero(), a);
        let e3 = Vec3::e_y();
        let (sp, cp) = psi.sin_cos();
        let w = e1.scale(c) + (e2.scale(cp) + e3.scale(sp)).scale(s);
        Self { a, b, x: w.x, y: w.y, z: w.z }
    }
}

/// Feasible range of φ for problem 1: `a² ≥ b²` and `a²(1−√2) + 3b² ≥ 0`
/// with `a, b > 0`.
pub fn lemma1_phi_range() -> (f64, f64) {
    let lo = (3.0 / (2.0 + SQRT_2)).sqrt().acos();
    (lo, FRAC_PI_4)
}

/// The eight vertices of `P_y`: `x`, `z`, the two remaining vertices of
/// their base and the four of the opposite base.
pub fn p_y_vertices<T: Real>(p: &Lemma1Params<T>, feas_tol: T) -> Result<[Point3<T>; 8], AntiprismError> {
    p.check(feas_tol)?;
    let Lemma1Params { a, b, x, y, z } = *p;
    let half = T::lit(0.5);
    let r2 = T::SQRT_2();
    let t = Vec3::new((a + x) * half, y * half, (b + z) * half);
    let w = Vec3::new(b * y, a * z - b * x, -a * y).scale(half / b);
    let c = Vec3::new((T::lit(3.0) * a - x) * half, -y * half, (T::lit(3.0) * b - z) * half);
    let v1 = Vec3::new(a + x, y, b + z).scale(half / r2);
    let v2 = w.scale(r2.recip());
    Ok([Vec3::zero(), Vec3::new(a + x, y, b + z), t + w, t - w, c + v1 + v2, c + v1 - v2, c - v1 + v2, c - v1 - v2])
}

/// Smallest distance between a vertex of `P_x` and one of `P_y` among pairs
/// at least `filter` apart.
pub fn lemma1_objective<T: Real>(p: &Lemma1Params<T>, filter: T, feas_tol: T) -> Result<T, AntiprismError> {
    let py = p_y_vertices(p, feas_tol)?;
    let px = antiprism_points(p.a, p.b).map_err(|e| AntiprismError::InfeasibleParams(e.to_string()))?;
    let mut best = T::infinity();
    for u in &px {
        for v in &py {
            let d = u.distance(*v);
            if d >= filter && d < best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// `z = (a, 0, b)` and `u₁ = (x, y, 1 − b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma2Params<T> {
    pub a: T,
    pub b: T,
    pub x: T,
    pub y: T,
}

impl<T: Real> Lemma2Params<T> {
    pub fn residual(&self) -> T {
        let Self { a, b, x, y } = *self;
        let one = T::one();
        let zero = T::zero();
        let half = T::lit(0.5);
        [
            (one - (a * a + b * b)).max(zero),
            (-a).max(zero),
            (-b).max(zero),
            (b - half).max(zero),
            (b * b - a * a).max(zero),
            (-(a * a * (one - T::SQRT_2()) + T::lit(3.0) * b * b)).max(zero),
            (x * x + y * y - a * a).abs(),
            (-x).max(zero),
            (-y).max(zero),
        ]
        .into_iter()
        .fold(zero, T::max)
    }

    pub fn from_polar(a: T, b: T, theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Self { a, b, x: a * c, y: a * s }
    }
}

pub fn lemma2_objective<T: Real>(p: &Lemma2Params<T>, feas_tol: T) -> Result<T, AntiprismError> {
    let r = p.residual();
    if !(r <= feas_tol) {
        return Err(AntiprismError::InfeasibleParams(format!("constraint residual {r}")));
    }
    let Lemma2Params { a, b, x, y } = *p;
    let h = T::one() - b;
    let z = Vec3::new(a, T::zero(), b);
    let u1 = Vec3::new(x, y, h);
    let u2 = Vec3::new(y, -x, h);
    Ok(z.distance(u1) + z.distance(u2) - T::one() - (a * a + b * b).sqrt())
}

/// Search budget and knobs shared by both problems.
#[derive(Clone, Debug, PartialEq)]
pub struct OptBudget {
    /// Seeds per unit-cube axis for the two leading parameters.
    pub grid: (usize, usize),
    /// Seeds along θ in problem 2.
    pub theta_seeds: usize,
    pub max_iters: usize,
    /// Optional restriction of φ in problem 1, intersected with the feasible range.
    pub phi_range: Option<(f64, f64)>,
    pub pair_filter: f64,
    /// Shrinkage of the open constraints of problem 2.
    pub eps: f64,
    pub feas_tol: f64,
}

impl Default for OptBudget {
    fn default() -> Self {
        Self {
            grid: (200, 200),
            theta_seeds: 5,
            max_iters: 400,
            phi_range: None,
            pair_filter: PAIR_FILTER,
            eps: 1e-6,
            feas_tol: FEAS_TOL,
        }
    }
}

/// One local search.
#[derive(Clone, Debug, PartialEq)]
pub struct StartRecord {
    pub seed: Vec<f64>,
    pub end: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationReport<P> {
    pub best_value: f64,
    pub argmax: P,
    /// Unit-cube coordinates of the argmax.
    pub argmax_unit: Vec<f64>,
    pub starts: usize,
    pub converged_starts: usize,
    pub constraint_residual: f64,
    pub start_table: Vec<StartRecord>,
}

impl<P> OptimizationReport<P> {
    /// Largest value reached by a converged start.
    pub fn max_converged_value(&self) -> Option<f64> {
        self.start_table.iter().filter(|s| s.converged).map(|s| s.value).reduce(f64::max)
    }

    /// The start table as CSV; `names` labels the unit-cube coordinates.
    pub fn start_table_csv(&self, names: &[&str]) -> String {
        let mut s = String::from("start");
        for n in names {
            write!(s, ",seed_{n}").unwrap();
        }
        for n in names {
            write!(s, ",end_{n}").unwrap();
        }
        s.push_str(",value,iterations,converged\n");
        for (i, r) in self.start_table.iter().enumerate() {
            write!(s, "{i}").unwrap();
            for v in r.seed.iter().chain(&r.end) {
                write!(s, ",{v}").unwrap();
            }
            writeln!(s, ",{},{},{}", r.value, r.iterations, r.converged).unwrap();
        }
        s
    }
}

struct LocalResult {
    x: Vec<f64>,
    fx: f64,
    iterations: usize,
    converged: bool,
}

/// Nelder-Mead minimisation inside the unit cube. Coordinates flagged in
/// `periodic` wrap around; the others are clamped.
fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], step: f64, max_iters: usize, periodic: &[bool]) -> LocalResult {
    let n = x0.len();
    let project = |v: &mut Vec<f64>| {
        for (i, c) in v.iter_mut().enumerate() {
            *c = if periodic[i] { c.rem_euclid(1.0) } else { c.clamp(0.0, 1.0) };
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += if v[i] + step <= 1.0 || periodic[i] { step } else { -step };
        project(&mut v);
        let fv = f(&v);
        simplex.push((v, fv));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| {
        s.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal).then_with(|| lex(&a.0, &b.0)));
    };
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        order(&mut simplex);
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex[1..].iter().map(|(v, _)| dist_inf(v, &simplex[0].0)).fold(0.0, f64::max);
        if size < 1e-10 || (spread.abs() < 1e-13 && size < 1e-6) {
            converged = true;
            break;
        }
        iterations += 1;
        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for i in 0..n {
                centroid[i] += v[i] / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = (0..n).map(|i| centroid[i] + t * (simplex[n].0[i] - centroid[i])).collect();
            project(&mut p);
            p
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let p = along(-0.5);
                let fp = f(&p);
                (p, fp)
            } else {
                let p = along(0.5);
                let fp = f(&p);
                (p, fp)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for (v, fv) in simplex.iter_mut().skip(1) {
                    let mut p: Vec<f64> = (0..n).map(|i| best[i] + 0.5 * (v[i] - best[i])).collect();
                    project(&mut p);
                    *fv = f(&p);
                    *v = p;
                }
            }
        }
    }
    order(&mut simplex);
    let (x, fx) = simplex.swap_remove(0);
    LocalResult { x, fx, iterations, converged }
}

fn dist_inf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.partial_cmp(y).unwrap_or(Ordering::Equal))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// Cell-centred seeds of an `n₁ × n₂ (× n₃)` grid over the unit cube.
fn seeds(dims: &[usize]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![]];
    for &d in dims {
        out = out
            .into_iter()
            .flat_map(|p| (0..d).map(move |i| [p.clone(), vec![(i as f64 + 0.5) / d as f64]].concat()))
            .collect();
    }
    out
}

/// Runs every start in parallel and picks the best by value, then by
/// lexicographically smaller end point.
fn multistart(
    objective: &(dyn Fn(&[f64]) -> f64 + Sync),
    starts: Vec<Vec<f64>>,
    step: f64,
    budget: &OptBudget,
    periodic: &[bool],
) -> Result<(Vec<StartRecord>, usize), AntiprismError> {
    let neg = |u: &[f64]| -> f64 {
        let v = objective(u);
        if v.is_finite() {
            -v
        } else {
            f64::INFINITY
        }
    };
    let records: Vec<StartRecord> = starts
        .into_par_iter()
        .map(|s| {
            let r = nelder_mead(&neg, &s, step, budget.max_iters, periodic);
            StartRecord { seed: s, end: r.x, value: -r.fx, iterations: r.iterations, converged: r.converged }
        })
        .collect();
    let best = records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.converged && r.value.is_finite())
        .max_by(|(_, a), (_, b)| {
            a.value.partial_cmp(&b.value).unwrap_or(Ordering::Equal).then_with(|| lex(&b.end, &a.end))
        })
        .map(|(i, _)| i)
        .ok_or(AntiprismError::BudgetExhausted)?;
    Ok((records, best))
}

fn lemma1_map(u: &[f64], phi: (f64, f64)) -> Lemma1Params<f64> {
    Lemma1Params::from_angles(phi.0 + u[0] * (phi.1 - phi.0), 2.0 * PI * u[1])
}

/// Maximises the problem 1 objective.
pub fn optimize_lemma1(budget: &OptBudget) -> Result<OptimizationReport<Lemma1Params<f64>>, AntiprismError> {
    let (lo, hi) = lemma1_phi_range();
    let phi = match budget.phi_range {
        Some((a, b)) => (a.max(lo), b.min(hi)),
        None => (lo, hi),
    };
    if !(phi.0 <= phi.1) || budget.grid.0 == 0 || budget.grid.1 == 0 {
        return Err(AntiprismError::InfeasibleParams(format!(
            "empty feasible slice for phi in [{}, {}]",
            phi.0, phi.1
        )));
    }
    let filter = budget.pair_filter;
    let tol = budget.feas_tol;
    let objective = move |u: &[f64]| lemma1_objective(&lemma1_map(u, phi), filter, tol).unwrap_or(f64::NAN);
    let starts = seeds(&[budget.grid.0, budget.grid.1]);
    let step = 0.5 / budget.grid.0.max(budget.grid.1) as f64;
    let n = starts.len();
    let (table, best) = multistart(&objective, starts, step, budget, &[false, true])?;
    let argmax = lemma1_map(&table[best].end, phi);
    Ok(OptimizationReport {
        best_value: table[best].value,
        argmax,
        argmax_unit: table[best].end.clone(),
        starts: n,
        converged_starts: table.iter().filter(|r| r.converged).count(),
        constraint_residual: argmax.residual(),
        start_table: table,
    })
}

/// Box for `(b, a)` in problem 2 at shrinkage `eps`:
/// `b ∈ [b*, ½ − ε]`, `a ∈ [max(b, √(1−b²) + ε), √k·b]`.
fn lemma2_map(u: &[f64], eps: f64) -> Lemma2Params<f64> {
    let k = k_ratio::<f64>();
    let b_star = (1.0 / (1.0 + k)).sqrt() + eps;
    let b = b_star + u[0] * (0.5 - eps - b_star);
    let a_hi = k.sqrt() * b;
    let a_lo = b.max((1.0 - b * b).sqrt() + eps).min(a_hi);
    let a = a_lo + u[1] * (a_hi - a_lo);
    Lemma2Params::from_polar(a, b, u[2] * FRAC_PI_2)
}

/// Maximises the problem 2 objective.
pub fn optimize_lemma2(budget: &OptBudget) -> Result<OptimizationReport<Lemma2Params<f64>>, AntiprismError> {
    if budget.grid.0 == 0 || budget.grid.1 == 0 || budget.theta_seeds == 0 {
        return Err(AntiprismError::InfeasibleParams("empty seed grid".into()));
    }
    let eps = budget.eps;
    let tol = budget.feas_tol;
    let objective = move |u: &[f64]| lemma2_objective(&lemma2_map(u, eps), tol).unwrap_or(f64::NAN);
    let starts = seeds(&[budget.grid.0, budget.grid.1, budget.theta_seeds]);
    let step = 0.5 / budget.grid.0.max(budget.grid.1) as f64;
    let n = starts.len();
    let (table, best) = multistart(&objective, starts, step, budget, &[false, false, false])?;
    let argmax = lemma2_map(&table[best].end, eps);
    Ok(OptimizationReport {
        best_value: table[best].value,
        argmax,
        argmax_unit: table[best].end.clone(),
        starts: n,
        converged_starts: table.iter().filter(|r| r.converged).count(),
        constraint_residual: argmax.residual(),
        start_table: table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ToleranceContext;
    use crate::patch::Cluster;
    use crate::point_group::stabilizer;

    fn witness(psi: f64) -> Lemma1Params<f64> {
        let (lo, hi) = lemma1_phi_range();
        Lemma1Params::from_angles(0.5 * (lo + hi), psi)
    }

    #[test]
    fn phi_range_endpoints() {
        let (lo, hi) = lemma1_phi_range();
        let p = Lemma1Params::from_angles(lo, 0.3);
        assert!(p.residual() < 1e-12);
        let p = Lemma1Params::from_angles(hi, 0.3);
        assert!(p.residual() < 1e-12);
        let p = Lemma1Params::from_angles(hi + 0.01, 0.3);
        assert!(p.residual() > 1e-4);
    }

    #[test]
    fn p_y_is_a_unit_antiprism() {
        for psi in [0.0, 0.7, 2.0, 4.5] {
            let p = witness(psi);
            let v = p_y_vertices(&p, FEAS_TOL).unwrap();
            let y = Vec3::new(p.a, 0.0, p.b);
            for q in v {
                assert!((q.distance(y) - 1.0).abs() < 1e-12);
            }
            assert_eq!(v[0], Vec3::zero());
        }
    }

    #[test]
    fn in_base_offset_is_orthogonal() {
        let p = witness(1.1);
        let (a, b, x, y, z) = (p.a, p.b, p.x, p.y, p.z);
        let w = Vec3::new(b * y, a * z - b * x, -a * y).scale(0.5 / b);
        let yx = Vec3::new(-a, 0.0, -b);
        let yz = Vec3::new(x, y, z);
        assert!(w.dot(yx).abs() < 1e-10 && w.dot(yz).abs() < 1e-10);
        let v = p_y_vertices(&p, FEAS_TOL).unwrap();
        assert!(((v[2] - v[3]).norm() - (v[0] - v[1]).norm()).abs() < 1e-12);
    }

    #[test]
    fn in_base_offsets_are_half_diagonals() {
        let p = witness(2.2);
        let v = p_y_vertices(&p, FEAS_TOL).unwrap();
        let t = (v[0] + v[1]).scale(0.5);
        let half_diag = v[0].distance(v[1]) / 2.0;
        assert!(((v[2] - t).norm() - half_diag).abs() < 1e-12);
        assert!(((v[3] - t).norm() - half_diag).abs() < 1e-12);
    }

    #[test]
    fn feasibility_witness() {
        let (a, b) = (0.75f64.sqrt(), 0.5f64);
        let phi = b.atan2(a);
        let p = Lemma1Params::from_angles(phi, 1.3);
        assert!((p.a - a).abs() < 1e-15 && (p.b - b).abs() < 1e-15);
        assert!((a * p.x + b * p.z - 0.5).abs() < 1e-12);
        let f = lemma1_objective(&p, PAIR_FILTER, FEAS_TOL).unwrap();
        let px = antiprism_points(a, b).unwrap();
        let py = p_y_vertices(&p, FEAS_TOL).unwrap();
        let mut brute = f64::INFINITY;
        for u in &px {
            for v in &py {
                let d = ((u.x - v.x).powi(2) + (u.y - v.y).powi(2) + (u.z - v.z).powi(2)).sqrt();
                if d >= 0.01 {
                    brute = brute.min(d);
                }
            }
        }
        assert!((f - brute).abs() < 1e-12 && f.is_finite());
    }

    #[test]
    fn p_y_cluster_is_d4d() {
        let p = witness(0.9);
        let y = Vec3::new(p.a, 0.0, p.b);
        let c =
            Cluster::new(y, 1.0, p_y_vertices(&p, FEAS_TOL).unwrap().to_vec(), &ToleranceContext::default()).unwrap();
        let g = stabilizer(&c, &ToleranceContext::default()).unwrap();
        assert_eq!(g.label().to_string(), "D4d");
    }

    #[test]
    fn objective_matches_pairwise_brute_force() {
        let p = witness(2.5);
        let px = antiprism_points(p.a, p.b).unwrap();
        let py = p_y_vertices(&p, FEAS_TOL).unwrap();
        let mut d: Vec<f64> =
            px.iter().flat_map(|u| py.iter().map(move |v| u.distance(*v))).filter(|d| *d >= 0.01).collect();
        d.sort_by(f64::total_cmp);
        assert_eq!(lemma1_objective(&p, 0.01, FEAS_TOL).unwrap(), d[0]);
        assert!(d[0] > 0.01);
    }

    #[test]
    fn objective_errors() {
        let mut p = witness(0.0);
        p.x += 0.1;
        assert!(matches!(lemma1_objective(&p, 0.01, FEAS_TOL), Err(AntiprismError::InfeasibleParams(_))));
        p.b = 0.0;
        assert_eq!(lemma1_objective(&p, 0.01, FEAS_TOL), Err(AntiprismError::DivisionByZero));
        let q = Lemma2Params { a: 0.5, b: 0.4, x: 0.5, y: 0.0 };
        assert!(lemma2_objective(&q, FEAS_TOL).is_err());
    }

    #[test]
    fn symmetric_slice() {
        let a = 0.95;
        let b = 0.45;
        let p = Lemma2Params::from_polar(a, b, FRAC_PI_4);
        let z = Vec3::new(a, 0.0, b);
        let d1 = z.distance(Vec3::new(p.x, p.y, 1.0 - b));
        let d2 = z.distance(Vec3::new(p.y, -p.x, 1.0 - b));
        assert!((d1 - d2).abs() < 1e-12);
        let f = lemma2_objective(&p, FEAS_TOL).unwrap();
        assert!((f - (2.0 * d1 - 1.0 - (a * a + b * b).sqrt())).abs() < 1e-12);
        assert!(f < 0.0);
    }

    #[test]
    fn lemma2_map_is_feasible() {
        for u in seeds(&[7, 7, 3]) {
            let p = lemma2_map(&u, 1e-6);
            assert!(p.residual() <= FEAS_TOL, "{u:?} {p:?}");
        }
    }

    #[test]
    fn empty_phi_slice() {
        let budget = OptBudget { phi_range: Some((1.2, 1.2)), ..OptBudget::default() };
        assert!(matches!(optimize_lemma1(&budget), Err(AntiprismError::InfeasibleParams(_))));
    }

    #[test]
    fn small_budgets_run() {
        let budget = OptBudget { grid: (12, 12), theta_seeds: 2, ..OptBudget::default() };
        let r1 = optimize_lemma1(&budget).unwrap();
        assert_eq!(r1.starts, 144);
        assert!(r1.constraint_residual < 1e-9);
        assert!((lemma1_objective(&r1.argmax, 0.01, FEAS_TOL).unwrap() - r1.best_value).abs() < 1e-12);
        let r2 = optimize_lemma2(&budget).unwrap();
        assert!(r2.best_value < 0.0);
        assert!((lemma2_objective(&r2.argmax, FEAS_TOL).unwrap() - r2.best_value).abs() < 1e-12);
        let csv = r2.start_table_csv(&["b", "a", "theta"]);
        assert_eq!(csv.lines().count(), r2.starts + 1);
    }
}
