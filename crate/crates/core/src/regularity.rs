//! Regularity criteria: the local criterion, tower and step bounds, and the
//! table of regularity-radius bounds per 2R-cluster group.

use std::borrow::Cow;
use std::fmt;

use thiserror::Error;

use crate::equivalence::{cluster_classes, EquivalenceError};
use crate::geometry::{Point3, ToleranceContext};
use crate::patch::{covering_radius, PatchError, PointPatch};
use crate::point_group::{omega, stabilizer, GroupError, SchoenfliesLabel};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegularityError {
    #[error("unknown group label '{0}'")]
    UnknownLabel(String),
    #[error("margin violation: no center has a ball of radius {radius} inside the trusted box")]
    MarginViolation { radius: f64 },
    #[error("table csv line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Patch(#[from] PatchError),
    #[error(transparent)]
    Equivalence(EquivalenceError),
}

impl From<EquivalenceError> for RegularityError {
    fn from(e: EquivalenceError) -> Self {
        match e {
            EquivalenceError::NoUsableCenters { rho } => RegularityError::MarginViolation { radius: rho },
            EquivalenceError::Patch(p) => RegularityError::Patch(p),
            other => RegularityError::Equivalence(other),
        }
    }
}

/// Regularity radius entry of the bound table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableBound {
    /// `k·R`.
    Radius(u32),
    /// The group cannot be a 2R-cluster group when N(2R) = 1.
    Impossible,
}

impl fmt::Display for TableBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableBound::Radius(k) => write!(f, "{k}R"),
            TableBound::Impossible => f.write_str("Impossible"),
        }
    }
}

impl std::str::FromStr for TableBound {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "Impossible" {
            return Ok(TableBound::Impossible);
        }
        s.strip_suffix('R')
            .and_then(|k| k.parse().ok())
            .map(TableBound::Radius)
            .ok_or_else(|| format!("bad bound '{s}'"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundTableRow {
    pub label: Cow<'static, str>,
    pub order: u32,
    pub bound: TableBound,
    pub reference: Cow<'static, str>,
}

pub const REF_TOWER: &str = "Tower bound";
pub const REF_ANTIPODAL: &str = "Antipodal regularity";
pub const REF_ROTATION: &str = "Rotation order bound";
pub const REF_S8_D4D: &str = "S8 and D4d exclusion";
pub const REF_TETRAHEDRAL: &str = "Tetrahedral case";
pub const REF_CUBIC: &str = "Cubic case";
pub const REF_ICOSAHEDRAL: &str = "Icosahedral case";

const fn row(label: &'static str, order: u32, bound: TableBound, reference: &'static str) -> BoundTableRow {
    BoundTableRow { label: Cow::Borrowed(label), order, bound, reference: Cow::Borrowed(reference) }
}

use TableBound::{Impossible, Radius as R};

/// Possible 2R-cluster groups with their regularity-radius bounds, row for
/// row as published, including the Th order of 48 and the S10 entry.
pub static BOUND_TABLE: [BoundTableRow; 52] = [
    row("C1", 1, R(4), REF_TOWER),
    row("C2", 2, R(6), REF_TOWER),
    row("C3", 3, R(6), REF_TOWER),
    row("C4", 4, R(8), REF_TOWER),
    row("C5", 5, R(6), REF_TOWER),
    row("C6", 6, R(2), REF_ROTATION),
    row("S1", 2, R(6), REF_TOWER),
    row("S2", 2, R(2), REF_ANTIPODAL),
    row("S3", 6, R(8), REF_TOWER),
    row("S4", 4, R(8), REF_TOWER),
    row("S5", 10, R(8), REF_TOWER),
    row("S6", 6, R(2), REF_ANTIPODAL),
    row("S8", 8, Impossible, REF_S8_D4D),
    row("S10", 10, R(2), REF_TOWER),
    row("S12", 12, R(2), REF_ROTATION),
    row("C1h", 2, R(6), "This is the group S1."),
    row("C2h", 4, R(2), REF_ANTIPODAL),
    row("C3h", 6, R(8), "This is the group S3."),
    row("C4h", 8, R(2), REF_ANTIPODAL),
    row("C5h", 10, R(8), "This is the group S5."),
    row("C6h", 12, R(2), REF_ANTIPODAL),
    row("C1v", 2, R(6), REF_TOWER),
    row("C2v", 4, R(8), REF_TOWER),
    row("C3v", 6, R(8), REF_TOWER),
    row("C4v", 8, R(10), REF_TOWER),
    row("C5v", 10, R(8), REF_TOWER),
    row("C6v", 12, R(2), REF_ROTATION),
    row("D1", 2, R(6), REF_TOWER),
    row("D2", 4, R(8), REF_TOWER),
    row("D3", 6, R(8), REF_TOWER),
    row("D4", 8, R(10), REF_TOWER),
    row("D5", 10, R(8), REF_TOWER),
    row("D6", 12, R(2), REF_ROTATION),
    row("D1h", 4, R(8), REF_TOWER),
    row("D2h", 8, R(2), REF_ANTIPODAL),
    row("D3h", 12, R(10), REF_TOWER),
    row("D4h", 16, R(2), REF_ANTIPODAL),
    row("D5h", 20, R(10), REF_TOWER),
    row("D6h", 24, R(2), REF_ANTIPODAL),
    row("D1d", 4, R(2), REF_ANTIPODAL),
    row("D2d", 8, R(10), REF_TOWER),
    row("D3d", 12, R(2), REF_ANTIPODAL),
    row("D4d", 16, Impossible, REF_S8_D4D),
    row("D5d", 20, R(2), REF_ANTIPODAL),
    row("D6d", 24, R(2), REF_ROTATION),
    row("T", 12, Impossible, REF_TETRAHEDRAL),
    row("Td", 24, R(2), REF_TETRAHEDRAL),
    row("Th", 48, R(2), REF_ANTIPODAL),
    row("O", 24, Impossible, REF_CUBIC),
    row("Oh", 48, R(2), REF_ANTIPODAL),
    row("I", 60, Impossible, REF_ICOSAHEDRAL),
    row("Ih", 120, Impossible, REF_ICOSAHEDRAL),
];

/// Row of the bound table for a label spelled as in the table (`"D4d"`).
pub fn bound_lookup(label: &str) -> Result<&'static BoundTableRow, RegularityError> {
    BOUND_TABLE.iter().find(|r| r.label == label).ok_or_else(|| RegularityError::UnknownLabel(label.to_string()))
}

/// Rows citing the tower bound whose printed radius differs from
/// [`tower_bound_radius`] of the printed order.
pub fn tower_rows_disagreeing() -> Vec<&'static BoundTableRow> {
    BOUND_TABLE
        .iter()
        .filter(|r| r.reference == REF_TOWER && r.bound != TableBound::Radius(tower_bound_radius(r.order as u64)))
        .collect()
}

fn csv_field(s: &str) -> Cow<'_, str> {
    if s.contains([',', '"', '\n']) {
        Cow::Owned(format!("\"{}\"", s.replace('"', "\"\"")))
    } else {
        Cow::Borrowed(s)
    }
}

fn split_csv_line(line: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut chars = line.chars().peekable();
    let mut quoted = false;
    while let Some(c) = chars.next() {
        match (quoted, c) {
            (false, ',') => out.push(std::mem::take(&mut cur)),
            (false, '"') if cur.is_empty() => quoted = true,
            (true, '"') if chars.peek() == Some(&'"') => {
                chars.next();
                cur.push('"');
            }
            (true, '"') => quoted = false,
            (_, c) => cur.push(c),
        }
    }
    if quoted {
        return Err("unterminated quote".into());
    }
    out.push(cur);
    Ok(out)
}

pub const TABLE_CSV_HEADER: &str = "group,order,bound,reference";

/// The table as CSV with a header row.
pub fn table_to_csv(rows: &[BoundTableRow]) -> String {
    let mut s = String::from(TABLE_CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", csv_field(&r.label), r.order, r.bound, csv_field(&r.reference)));
    }
    s
}

pub fn table_from_csv(text: &str) -> Result<Vec<BoundTableRow>, RegularityError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == TABLE_CSV_HEADER => {}
        _ => return Err(RegularityError::Csv { line: 1, message: "missing header".into() }),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let err = |message: String| RegularityError::Csv { line: i + 1, message };
        let f = split_csv_line(line).map_err(err)?;
        if f.len() != 4 {
            return Err(err(format!("expected 4 fields, found {}", f.len())));
        }
        rows.push(BoundTableRow {
            label: Cow::Owned(f[0].clone()),
            order: f[1].parse().map_err(|_| err(format!("bad order '{}'", f[1])))?,
            bound: f[2].parse().map_err(err)?,
            reference: Cow::Owned(f[3].clone()),
        });
    }
    Ok(rows)
}

/// `2(Ω(order) + 2)`, the tower-bound radius in units of R.
pub fn tower_bound_radius(group_order: u64) -> u32 {
    2 * (omega(group_order) + 2)
}

/// `2 sin(π/n)`: side of the regular n-gon relative to its circumradius.
pub fn shtogrin_step_bound<T: Real>(n: u32) -> T {
    assert!(n >= 2, "step bound needs n >= 2");
    T::lit(2.0) * (T::PI() / T::from_u32(n).unwrap()).sin()
}

/// Outcome of the local criterion on a patch.
#[derive(Clone, Debug, PartialEq)]
pub struct CriterionVerdict<T> {
    pub regular: bool,
    pub rho0: T,
    pub r: T,
    pub n_at_rho0_plus_2r: usize,
    pub groups_equal: bool,
    /// The center where the cluster groups were compared.
    pub center: Point3<T>,
    pub group_at_rho0: SchoenfliesLabel,
    pub group_at_rho0_plus_2r: SchoenfliesLabel,
    /// Which condition failed, if any.
    pub witness: Option<String>,
}

/// Checks `N(ρ₀ + 2R) = 1` and `S_x(ρ₀) = S_x(ρ₀ + 2R)` at the
/// lexicographically smallest usable center.
pub fn local_criterion<T: Real>(
    patch: &PointPatch<T>,
    rho0: T,
    r: T,
    ctx: &ToleranceContext<T>,
) -> Result<CriterionVerdict<T>, RegularityError> {
    let rho1 = rho0 + r + r;
    let classes = cluster_classes(patch, rho1, ctx)?;
    let x0 = classes.centers[0];
    let s0 = stabilizer(&patch.cluster_at(x0, rho0, ctx)?, ctx)?;
    let s1 = stabilizer(&patch.cluster_at(x0, rho1, ctx)?, ctx)?;
    let groups_equal = s0.same_elements(&s1, ctx.dedup_tol);
    let n = classes.n();
    let center = patch.points()[x0];
    let witness = if n != 1 {
        let reps = &classes.class_representatives;
        Some(format!("N({})={}: clusters at {} and {} are not equivalent", rho1, n, reps[0].center, reps[1].center))
    } else if !groups_equal {
        Some(format!("cluster group at {center} shrinks from {} to {} between the two radii", s0.label(), s1.label()))
    } else {
        None
    };
    Ok(CriterionVerdict {
        regular: n == 1 && groups_equal,
        rho0,
        r,
        n_at_rho0_plus_2r: n,
        groups_equal,
        center,
        group_at_rho0: s0.label(),
        group_at_rho0_plus_2r: s1.label(),
        witness,
    })
}

/// Where the value of R came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RSource {
    Declared,
    Computed,
}

impl fmt::Display for RSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RSource::Declared => "declared",
            RSource::Computed => "computed",
        })
    }
}

/// The declared R of the patch, or its covering radius.
pub fn resolve_r<T: Real>(patch: &PointPatch<T>, ctx: &ToleranceContext<T>) -> Result<(T, RSource), RegularityError> {
    match patch.declared_r() {
        Some(r) => Ok((r, RSource::Declared)),
        None => Ok((covering_radius(patch, ctx)?.radius, RSource::Computed)),
    }
}

/// Classification of a patch by its 2R-clusters.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioReport<T> {
    pub r: T,
    pub n_2r: usize,
    /// Cluster group of the 2R-clusters when they are mutually equivalent.
    pub label: Option<SchoenfliesLabel>,
    pub group_order: Option<usize>,
    pub table_row: Option<&'static BoundTableRow>,
    /// `None` when the patch is too small for clusters of radius 4R.
    pub criterion: Option<CriterionVerdict<T>>,
}

impl<T: Real> ScenarioReport<T> {
    /// One-line summary, e.g. `N(2R)=1; group=Oh; table_bound=2R; local_criterion=regular`.
    pub fn summary(&self) -> String {
        let group = self.label.map_or_else(|| "none".to_string(), |l| l.to_string());
        let bound = match (&self.label, self.table_row) {
            (None, _) => "none".to_string(),
            (Some(_), Some(row)) => row.bound.to_string(),
            (Some(_), None) => "not listed".to_string(),
        };
        let crit = match &self.criterion {
            Some(v) if v.regular => "regular",
            Some(_) => "not regular",
            None => "insufficient margin",
        };
        let mut s = format!("N(2R)={}; group={group}; table_bound={bound}; local_criterion={crit}", self.n_2r);
        if self.n_2r > 1 {
            s.push_str("; 2R-clusters not mutually equivalent");
        }
        s
    }
}

/// N(2R), the 2R-cluster group and its table bound, and the local criterion
/// at ρ₀ = 2R when the patch is large enough.
pub fn classify_scenario<T: Real>(
    patch: &PointPatch<T>,
    r: T,
    ctx: &ToleranceContext<T>,
) -> Result<ScenarioReport<T>, RegularityError> {
    let two_r = r + r;
    let classes = cluster_classes(patch, two_r, ctx)?;
    let n_2r = classes.n();
    let (label, group_order) = if n_2r == 1 {
        let g = stabilizer(&classes.class_representatives[0], ctx)?;
        (Some(g.label()), Some(g.order()))
    } else {
        (None, None)
    };
    let table_row = label.and_then(|l| bound_lookup(&l.to_string()).ok());
    let criterion = match local_criterion(patch, two_r, r, ctx) {
        Ok(v) => Some(v),
        Err(RegularityError::MarginViolation { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(ScenarioReport { r, n_2r, label, group_order, table_row, criterion })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{c4v_example, cubic_lattice};
    use crate::geometry::Vec3;
    use crate::patch::Aabb;

    fn ctx() -> ToleranceContext<f64> {
        ToleranceContext::default()
    }

    #[test]
    fn table_spot_rows() {
        assert_eq!(bound_lookup("S8").unwrap().bound, TableBound::Impossible);
        assert_eq!(bound_lookup("D4d").unwrap().bound, TableBound::Impossible);
        assert_eq!(bound_lookup("C6").unwrap().bound, TableBound::Radius(2));
        assert_eq!(bound_lookup("D3h").unwrap().bound, TableBound::Radius(10));
        assert_eq!(bound_lookup("C1").unwrap().bound, TableBound::Radius(4));
        assert_eq!(bound_lookup("Th").unwrap().order, 48);
        assert_eq!(bound_lookup("C1h").unwrap().reference, "This is the group S1.");
        assert!(matches!(bound_lookup("C7"), Err(RegularityError::UnknownLabel(_))));
    }

    #[test]
    fn table_labels_parse() {
        for r in BOUND_TABLE.iter() {
            let l: SchoenfliesLabel = r.label.parse().unwrap();
            assert_eq!(l.to_string(), r.label);
            if r.label != "Th" {
                assert_eq!(l.order(), r.order as usize, "{}", r.label);
            }
        }
    }

    #[test]
    fn only_s10_disagrees_with_tower_formula() {
        let rows: Vec<&str> = tower_rows_disagreeing().iter().map(|r| r.label.as_ref()).collect();
        assert_eq!(rows, vec!["S10"]);
    }

    #[test]
    fn csv_round_trip() {
        let csv = table_to_csv(&BOUND_TABLE);
        let back = table_from_csv(&csv).unwrap();
        assert_eq!(back.as_slice(), &BOUND_TABLE[..]);
        assert_eq!(table_to_csv(&back), csv);
        assert!(table_from_csv("nope\n").is_err());
        assert!(table_from_csv(&format!("{TABLE_CSV_HEADER}\nC1,x,4R,a\n")).is_err());
    }

    #[test]
    fn csv_quoting() {
        let rows = vec![row("C1", 1, R(4), "a, \"b\"")];
        assert_eq!(table_from_csv(&table_to_csv(&rows)).unwrap(), rows);
    }

    #[test]
    fn tower_radii() {
        assert_eq!(tower_bound_radius(1), 4);
        assert_eq!(tower_bound_radius(8), 10);
        assert_eq!(tower_bound_radius(48), 14);
    }

    #[test]
    fn step_bounds() {
        let s7: f64 = shtogrin_step_bound(7);
        assert!(s7 > 0.8677 && s7 < 0.8678);
        assert!((shtogrin_step_bound::<f64>(6) - 1.0).abs() <= 1e-15);
        assert!((shtogrin_step_bound::<f64>(4) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cubic_lattice_is_regular() {
        let p = cubic_lattice(Aabb::cube(-4.0, 4.0).unwrap()).unwrap();
        let v = local_criterion(&p, 1.0, 0.75f64.sqrt(), &ctx()).unwrap();
        assert!(v.regular);
        assert_eq!(v.group_at_rho0.to_string(), "Oh");
        assert_eq!(v.witness, None);
    }

    #[test]
    fn hole_breaks_regularity() {
        let z = cubic_lattice(Aabb::cube(-5.0, 5.0).unwrap()).unwrap();
        let pts: Vec<_> = z.points().iter().copied().filter(|p| p.norm() > 0.5).collect();
        let holed = PointPatch::new(pts, *z.trusted_box(), None).unwrap();
        let v = local_criterion(&holed, 1.0, 0.75f64.sqrt(), &ctx()).unwrap();
        assert!(!v.regular);
        assert!(v.n_at_rho0_plus_2r >= 2);
        assert!(v.witness.unwrap().contains("not equivalent"));

        let s = classify_scenario(&holed, 0.75f64.sqrt(), &ctx()).unwrap();
        assert!(s.n_2r >= 2);
        assert_eq!(s.label, None);
        assert!(s.summary().contains("not mutually equivalent"));
    }

    #[test]
    fn margin_violation() {
        let p = cubic_lattice(Aabb::cube(-1.0, 1.0).unwrap()).unwrap();
        assert!(matches!(
            local_criterion(&p, 1.0, 0.75f64.sqrt(), &ctx()),
            Err(RegularityError::MarginViolation { .. })
        ));
    }

    #[test]
    fn cubic_scenario() {
        let p = cubic_lattice(Aabb::cube(-4.0, 4.0).unwrap()).unwrap();
        let s = classify_scenario(&p, 0.75f64.sqrt(), &ctx()).unwrap();
        assert_eq!(s.summary(), "N(2R)=1; group=Oh; table_bound=2R; local_criterion=regular");
    }

    #[test]
    fn c4v_scenario() {
        let r = 1.5f64.sqrt();
        let small = c4v_example(Aabb::cube(-4.5, 4.5).unwrap()).unwrap();
        let s = classify_scenario(&small, r, &ctx()).unwrap();
        assert_eq!(s.n_2r, 1);
        assert_eq!(s.label.unwrap().to_string(), "C4v");
        assert_eq!(s.table_row.unwrap().bound, TableBound::Radius(10));
        assert!(s.criterion.is_none());

        let big = c4v_example(Aabb::cube(-6.5, 6.5).unwrap()).unwrap();
        let v = local_criterion(&big, 2.0 * r, r, &ctx()).unwrap();
        assert!(v.regular, "{v:?}");
        assert_eq!(v.center, Vec3::new(-1.0, -1.0, -1.0));
    }
}
