//! Plain-text point-set files.
//!
//! One point per line as `x y z`; lines starting with `#` are comments. Two
//! comment forms carry metadata:
//!
//! ```text
//! # box lo_x lo_y lo_z hi_x hi_y hi_z
//! # R 0.8660254038
//! ```
//!
//! Writers additionally emit `# min_distance <value>` when known; readers
//! accept it but do not require it.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::Vec3;
use crate::patch::{Aabb, PatchError, PointPatch};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("no points")]
    NoPoints,
    #[error(transparent)]
    Patch(#[from] PatchError),
}

/// Parsed contents of a point-set file.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSetFile {
    pub points: Vec<Vec3<f64>>,
    pub trusted_box: Option<Aabb<f64>>,
    pub declared_r: Option<f64>,
    pub min_distance: Option<f64>,
}

impl PointSetFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut out = PointSetFile { points: Vec::new(), trusted_box: None, declared_r: None, min_distance: None };
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let err = |message: String| ParseError::Line { line: line_no, message };
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let mut words = comment.split_whitespace();
                match words.next() {
                    Some("box") => {
                        let v = numbers(words, line_no)?;
                        if v.len() != 6 {
                            return Err(err("box header needs six numbers".into()));
                        }
                        let b = Aabb::new(Vec3::new(v[0], v[1], v[2]), Vec3::new(v[3], v[4], v[5]))
                            .map_err(|_| err("box has lo > hi".into()))?;
                        out.trusted_box = Some(b);
                    }
                    Some("R") => {
                        let v = numbers(words, line_no)?;
                        match v.as_slice() {
                            [r] if *r > 0.0 => out.declared_r = Some(*r),
                            _ => return Err(err("R header needs one positive number".into())),
                        }
                    }
                    Some("min_distance") => {
                        let v = numbers(words, line_no)?;
                        out.min_distance = v.first().copied();
                    }
                    _ => {}
                }
                continue;
            }
            let v = numbers(line.split_whitespace(), line_no)?;
            if v.len() != 3 {
                return Err(err(format!("expected 3 coordinates, found {}", v.len())));
            }
            out.points.push(Vec3::new(v[0], v[1], v[2]));
        }
        Ok(out)
    }

    /// Patch with the declared box, or the bounding box if none was given.
    pub fn into_patch(self) -> Result<PointPatch<f64>, ParseError> {
        if self.points.is_empty() {
            return Err(ParseError::NoPoints);
        }
        let bx = match self.trusted_box {
            Some(b) => b,
            None => Aabb::bounding(&self.points).ok_or(ParseError::NoPoints)?,
        };
        Ok(PointPatch::new(self.points, bx, self.declared_r)?)
    }
}

fn numbers<'a>(words: impl Iterator<Item = &'a str>, line: usize) -> Result<Vec<f64>, ParseError> {
    words
        .map(|w| {
            let v: f64 = w.parse().map_err(|_| ParseError::Line { line, message: format!("bad number '{w}'") })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(ParseError::Line { line, message: format!("non-finite number '{w}'") })
            }
        })
        .collect()
}

/// Serialises a patch. Coordinates use the shortest round-trip
/// representation so reading the file back is exact.
pub fn write_point_set(patch: &PointPatch<f64>, min_distance: Option<f64>) -> String {
    let mut s = String::new();
    let b = patch.trusted_box();
    writeln!(s, "# box {} {} {} {} {} {}", b.lo.x, b.lo.y, b.lo.z, b.hi.x, b.hi.y, b.hi.z).unwrap();
    if let Some(r) = patch.declared_r() {
        writeln!(s, "# R {r}").unwrap();
    }
    if let Some(d) = min_distance {
        writeln!(s, "# min_distance {d}").unwrap();
    }
    for p in patch.points() {
        writeln!(s, "{} {} {}", p.x, p.y, p.z).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{hex_lattice, HexLatticeSpec};
    use proptest::prelude::*;

    #[test]
    fn headers_and_comments() {
        let f = PointSetFile::parse("# a comment\n# box -1 -1 -1 1 1 1\n# R 0.5\n0 0 0\n\n1 0 0 # trailing\n");
        assert!(f.is_err(), "trailing comment text is not a number");
        let f = PointSetFile::parse("# a comment\n# box -1 -1 -1 1 1 1\n# R 0.5\n0 0 0\n\n1 0 0\n").unwrap();
        assert_eq!(f.points.len(), 2);
        assert_eq!(f.declared_r, Some(0.5));
        assert_eq!(f.trusted_box.unwrap().hi, Vec3::new(1.0, 1.0, 1.0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        match PointSetFile::parse("0 0 0\n1 2\n") {
            Err(ParseError::Line { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        match PointSetFile::parse("# box 1 1 1 0 0 0\n") {
            Err(ParseError::Line { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert_eq!(PointSetFile::parse("# nothing\n").unwrap().into_patch().unwrap_err(), ParseError::NoPoints);
    }

    #[test]
    fn hex_patch_round_trips() {
        let spec = HexLatticeSpec::new(1.0, 1.0).unwrap();
        let p = hex_lattice(&spec, Aabb::cube(-2.0, 2.0).unwrap()).unwrap().with_declared_r(Some(7f64 / 12.0));
        let text = write_point_set(&p, Some(1.0));
        let back = PointSetFile::parse(&text).unwrap();
        assert_eq!(back.min_distance, Some(1.0));
        let q = back.into_patch().unwrap();
        assert_eq!(q.points(), p.points());
        assert_eq!(q.trusted_box(), p.trusted_box());
        assert_eq!(q.declared_r(), p.declared_r());
    }

    proptest! {
        #[test]
        fn arbitrary_points_round_trip(pts in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6, -1e6f64..1e6), 1..40)) {
            let pts: Vec<Vec3<f64>> = pts.into_iter().map(|(x, y, z)| Vec3::new(x, y, z)).collect();
            let patch = PointPatch::from_points(pts).unwrap();
            let back = PointSetFile::parse(&write_point_set(&patch, None)).unwrap().into_patch().unwrap();
            prop_assert_eq!(back.points(), patch.points());
        }
    }
}
