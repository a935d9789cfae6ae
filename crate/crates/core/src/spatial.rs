//! Uniform hash grid for fixed-radius and nearest-point queries.

use std::collections::HashMap;

use crate::geometry::Point3;
use crate::scalar::Real;

type Key = [i64; 3];

/// Hash grid over an external point slice. Cells are cubes of side `cell`;
/// with the packing invariant each cell holds O(1) points.
#[derive(Clone, Debug)]
pub struct SpatialHash<T> {
    cell: T,
    cells: HashMap<Key, Vec<usize>>,
    key_lo: Key,
    key_hi: Key,
}

impl<T: Real> SpatialHash<T> {
    pub fn new(points: &[Point3<T>], cell: T) -> Self {
        let mut cells: HashMap<Key, Vec<usize>> = HashMap::new();
        let mut key_lo = [i64::MAX; 3];
        let mut key_hi = [i64::MIN; 3];
        for (i, p) in points.iter().enumerate() {
            let k = key_of(*p, cell);
            for a in 0..3 {
                key_lo[a] = key_lo[a].min(k[a]);
                key_hi[a] = key_hi[a].max(k[a]);
            }
            cells.entry(k).or_default().push(i);
        }
        Self { cell, cells, key_lo, key_hi }
    }

    pub fn cell_size(&self) -> T {
        self.cell
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Indices of all points with `|p - c| ≤ r`, in ascending index order.
    pub fn within(&self, points: &[Point3<T>], c: Point3<T>, r: T) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_within(points, c, r, |i| out.push(i));
        out.sort_unstable();
        out
    }

    pub fn for_each_within(&self, points: &[Point3<T>], c: Point3<T>, r: T, mut f: impl FnMut(usize)) {
        if self.cells.is_empty() || r < T::zero() {
            return;
        }
        let lo = key_of(c - Point3::new(r, r, r), self.cell);
        let hi = key_of(c + Point3::new(r, r, r), self.cell);
        let lo = [lo[0].max(self.key_lo[0]), lo[1].max(self.key_lo[1]), lo[2].max(self.key_lo[2])];
        let hi = [hi[0].min(self.key_hi[0]), hi[1].min(self.key_hi[1]), hi[2].min(self.key_hi[2])];
        let r2 = r * r;
        for i in lo[0]..=hi[0] {
            for j in lo[1]..=hi[1] {
                for k in lo[2]..=hi[2] {
                    if let Some(bucket) = self.cells.get(&[i, j, k]) {
                        for &idx in bucket {
                            if (points[idx] - c).norm_squared() <= r2 {
                                f(idx);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Any point within `tol` of `c` (the closest one if several).
    pub fn find(&self, points: &[Point3<T>], c: Point3<T>, tol: T) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        self.for_each_within(points, c, tol, |i| {
            let d = (points[i] - c).norm_squared();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        });
        best.map(|(i, _)| i)
    }

    /// Nearest point to `c` and its distance; ties broken by lower index.
    pub fn nearest(&self, points: &[Point3<T>], c: Point3<T>) -> Option<(usize, T)> {
        if self.cells.is_empty() {
            return None;
        }
        let ck = key_of(c, self.cell);
        let max_ring =
            (0..3).map(|a| (ck[a] - self.key_lo[a]).abs().max((self.key_hi[a] - ck[a]).abs())).max().unwrap_or(0);
        let mut best: Option<(usize, T)> = None;
        for ring in 0..=max_ring {
            for_each_ring_key(ck, ring, |k| {
                if let Some(bucket) = self.cells.get(&k) {
                    for &idx in bucket {
                        let d = (points[idx] - c).norm_squared();
                        let better = match best {
                            None => true,
                            Some((bi, bd)) => d < bd || (d == bd && idx < bi),
                        };
                        if better {
                            best = Some((idx, d));
                        }
                    }
                }
            });
            if let Some((_, bd)) = best {
                // Anything in ring + 1 is at least `ring · cell` away.
                let reach = self.cell * T::from_i64(ring).unwrap_or_else(T::zero);
                if bd.sqrt() <= reach {
                    break;
                }
            }
        }
        best.map(|(i, d)| (i, d.sqrt()))
    }
}

fn key_of<T: Real>(p: Point3<T>, cell: T) -> Key {
    let f = |v: T| (v / cell).floor().to_i64().unwrap_or(0);
    [f(p.x), f(p.y), f(p.z)]
}

/// Visits every key at Chebyshev distance exactly `ring` from `c`.
fn for_each_ring_key(c: Key, ring: i64, mut f: impl FnMut(Key)) {
    if ring == 0 {
        f(c);
        return;
    }
    for i in -ring..=ring {
        for j in -ring..=ring {
            let on_face = i.abs() == ring || j.abs() == ring;
            if on_face {
                for k in -ring..=ring {
                    f([c[0] + i, c[1] + j, c[2] + k]);
                }
            } else {
                f([c[0] + i, c[1] + j, c[2] - ring]);
                f([c[0] + i, c[1] + j, c[2] + ring]);
            }
        }
    }
}
