//! Cluster groups: stabilizers of clusters, Schönflies classification, and
//! the subgroup-lattice quantities Ω(|G|) and tower height.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::equivalence::orthogonal_matches;
use crate::geometry::{ElementKind, OrthogonalMap, Point3, ToleranceContext, Vec3};
use crate::patch::Cluster;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("cluster spans only {dim} dimension(s); its cluster group is infinite")]
    LowerDimensionalCluster { dim: usize },
    #[error("element set is not closed under composition")]
    NotAGroup,
    #[error("no Schönflies label fits the element content")]
    UnrecognizedGroup,
    #[error("group of order {order} exceeds the supported maximum of {max}")]
    GroupTooLarge { order: usize, max: usize },
    #[error("unknown group label '{0}'")]
    UnknownLabel(String),
}

/// Largest group order handled by [`tower_height`] (that of Ih).
pub const MAX_TOWER_ORDER: usize = 120;
/// Closure of generators is abandoned past this many elements.
const MAX_GENERATED: usize = 240;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    C,
    S,
    Ch,
    Cv,
    D,
    Dh,
    Dd,
    T,
    Td,
    Th,
    O,
    Oh,
    I,
    Ih,
}

impl Family {
    pub fn is_axial(self) -> bool {
        !matches!(self, Family::T | Family::Td | Family::Th | Family::O | Family::Oh | Family::I | Family::Ih)
    }
}

/// Schönflies symbol; `n` is 0 for the polyhedral families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SchoenfliesLabel {
    pub family: Family,
    pub n: u32,
}

impl SchoenfliesLabel {
    pub fn new(family: Family, n: u32) -> Result<Self, GroupError> {
        let ok = if family.is_axial() { n >= 1 } else { n == 0 };
        if ok {
            Ok(Self { family, n })
        } else {
            Err(GroupError::UnknownLabel(format!("{family:?}{n}")))
        }
    }

    pub const fn axial(family: Family, n: u32) -> Self {
        Self { family, n }
    }

    pub const fn polyhedral(family: Family) -> Self {
        Self { family, n: 0 }
    }

    /// Group order implied by the symbol. Th is the geometric group of order
    /// 24 generated by T and the inversion.
    pub fn order(&self) -> usize {
        let n = self.n as usize;
        match self.family {
            Family::C => n,
            Family::S => {
                if n.is_multiple_of(2) {
                    n
                } else {
                    2 * n
                }
            }
            Family::Ch | Family::Cv | Family::D => 2 * n,
            Family::Dh | Family::Dd => 4 * n,
            Family::T => 12,
            Family::Td | Family::Th | Family::O => 24,
            Family::Oh => 48,
            Family::I => 60,
            Family::Ih => 120,
        }
    }
}

impl fmt::Display for SchoenfliesLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n;
        match self.family {
            Family::C => write!(f, "C{n}"),
            Family::S => write!(f, "S{n}"),
            Family::Ch => write!(f, "C{n}h"),
            Family::Cv => write!(f, "C{n}v"),
            Family::D => write!(f, "D{n}"),
            Family::Dh => write!(f, "D{n}h"),
            Family::Dd => write!(f, "D{n}d"),
            Family::T => f.write_str("T"),
            Family::Td => f.write_str("Td"),
            Family::Th => f.write_str("Th"),
            Family::O => f.write_str("O"),
            Family::Oh => f.write_str("Oh"),
            Family::I => f.write_str("I"),
            Family::Ih => f.write_str("Ih"),
        }
    }
}

impl FromStr for SchoenfliesLabel {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GroupError::UnknownLabel(s.to_string());
        let poly = match s {
            "T" => Some(Family::T),
            "Td" => Some(Family::Td),
            "Th" => Some(Family::Th),
            "O" => Some(Family::O),
            "Oh" => Some(Family::Oh),
            "I" => Some(Family::I),
            "Ih" => Some(Family::Ih),
            _ => None,
        };
        if let Some(f) = poly {
            return Ok(Self::polyhedral(f));
        }
        let mut chars = s.chars();
        let head = chars.next().ok_or_else(bad)?;
        let rest: String = chars.collect();
        let digits: String = rest.chars().take_while(char::is_ascii_digit).collect();
        let suffix = &rest[digits.len()..];
        let n: u32 = digits.parse().map_err(|_| bad())?;
        let family = match (head, suffix) {
            ('C', "") => Family::C,
            ('S', "") => Family::S,
            ('C', "h") => Family::Ch,
            ('C', "v") => Family::Cv,
            ('D', "") => Family::D,
            ('D', "h") => Family::Dh,
            ('D', "d") => Family::Dd,
            _ => return Err(bad()),
        };
        Self::new(family, n).map_err(|_| bad())
    }
}

/// Finite group of orthogonal maps acting about `center`.
#[derive(Clone, Debug)]
pub struct PointGroup<T> {
    pub center: Point3<T>,
    elements: Vec<OrthogonalMap<T>>,
    label: SchoenfliesLabel,
}

fn quantized<T: Real>(m: &OrthogonalMap<T>) -> [i64; 9] {
    let mut k = [0i64; 9];
    for (i, v) in m.matrix().m.iter().flatten().enumerate() {
        k[i] = (v.as_f64() * 1e6).round() as i64;
    }
    k
}

/// Identity first, then proper before improper, then by quantized entries.
fn canonical_cmp<T: Real>(a: &OrthogonalMap<T>, b: &OrthogonalMap<T>) -> Ordering {
    let id = quantized(&OrthogonalMap::<T>::identity());
    let (qa, qb) = (quantized(a), quantized(b));
    (qa != id).cmp(&(qb != id)).then(b.det_sign().cmp(&a.det_sign())).then(qb.cmp(&qa))
}

fn index_of<T: Real>(elements: &[OrthogonalMap<T>], m: &OrthogonalMap<T>, tol: T) -> Option<usize> {
    elements.iter().position(|e| e.approx_eq(m, tol))
}

/// Closes `gens` under composition; fails past [`MAX_GENERATED`] elements.
fn close<T: Real>(gens: &[OrthogonalMap<T>], ctx: &ToleranceContext<T>) -> Result<Vec<OrthogonalMap<T>>, GroupError> {
    let mut out = vec![OrthogonalMap::identity()];
    for g in gens {
        if index_of(&out, g, ctx.dedup_tol).is_none() {
            out.push(*g);
        }
    }
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let p = OrthogonalMap::new_unchecked(
                (*out[i].matrix() * *g.matrix()).nearest_orthogonal().ok_or(GroupError::NotAGroup)?,
            );
            if index_of(&out, &p, ctx.dedup_tol).is_none() {
                out.push(p);
                if out.len() > MAX_GENERATED {
                    return Err(GroupError::GroupTooLarge { order: out.len(), max: MAX_GENERATED });
                }
            }
        }
        i += 1;
    }
    Ok(out)
}

impl<T: Real> PointGroup<T> {
    /// Validates closure and labels the group.
    pub fn from_elements(
        center: Point3<T>,
        elements: Vec<OrthogonalMap<T>>,
        ctx: &ToleranceContext<T>,
    ) -> Result<Self, GroupError> {
        let mut els: Vec<OrthogonalMap<T>> = Vec::with_capacity(elements.len());
        for e in elements {
            if index_of(&els, &e, ctx.dedup_tol).is_none() {
                els.push(e);
            }
        }
        if index_of(&els, &OrthogonalMap::identity(), ctx.dedup_tol).is_none() || !is_closed(&els, ctx) {
            return Err(GroupError::NotAGroup);
        }
        els.sort_by(canonical_cmp);
        let label = schoenflies_of(&els, ctx)?;
        Ok(Self { center, elements: els, label })
    }

    /// The group generated by `gens`.
    pub fn generate(
        center: Point3<T>,
        gens: &[OrthogonalMap<T>],
        ctx: &ToleranceContext<T>,
    ) -> Result<Self, GroupError> {
        let els = close(gens, ctx)?;
        Self::from_elements(center, els, ctx)
    }

    pub fn elements(&self) -> &[OrthogonalMap<T>] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn label(&self) -> SchoenfliesLabel {
        self.label
    }

    pub fn contains(&self, m: &OrthogonalMap<T>, tol: T) -> bool {
        index_of(&self.elements, m, tol).is_some()
    }

    pub fn is_subset_of(&self, other: &Self, tol: T) -> bool {
        self.elements.iter().all(|e| other.contains(e, tol))
    }

    /// Same element set (centers are not compared).
    pub fn same_elements(&self, other: &Self, tol: T) -> bool {
        self.order() == other.order() && self.is_subset_of(other, tol)
    }

    /// `{u·g·uᵀ}` for every element `g`.
    pub fn conjugated(&self, u: &OrthogonalMap<T>) -> Vec<OrthogonalMap<T>> {
        self.elements.iter().map(|e| e.conjugate_by(u)).collect()
    }

    pub fn element_kinds(&self, ctx: &ToleranceContext<T>) -> Vec<ElementKind<T>> {
        self.elements.iter().map(|e| e.kind(ctx)).collect()
    }

    /// Largest proper rotation order, 1 if the group has none.
    pub fn max_rotation_order(&self, ctx: &ToleranceContext<T>) -> u32 {
        self.elements.iter().filter_map(|e| e.kind(ctx).rotation_order()).max().unwrap_or(1)
    }

    /// Rotation axes with their orders, sorted by decreasing order.
    pub fn rotation_axes(&self, ctx: &ToleranceContext<T>) -> Vec<(Vec3<T>, u32)> {
        axes_of(&self.element_kinds(ctx), ctx)
    }
}

fn is_closed<T: Real>(els: &[OrthogonalMap<T>], ctx: &ToleranceContext<T>) -> bool {
    els.iter().all(|a| els.iter().all(|b| index_of(els, &a.compose(b), ctx.dedup_tol).is_some()))
}

fn parallel<T: Real>(a: Vec3<T>, b: Vec3<T>, tol: T) -> bool {
    T::one() - a.dot(b).abs() <= tol
}

fn perpendicular<T: Real>(a: Vec3<T>, b: Vec3<T>, tol: T) -> bool {
    a.dot(b).abs() <= tol
}

fn axes_of<T: Real>(kinds: &[ElementKind<T>], ctx: &ToleranceContext<T>) -> Vec<(Vec3<T>, u32)> {
    let tol = ctx.ortho_tol();
    let mut axes: Vec<(Vec3<T>, u32)> = Vec::new();
    for k in kinds {
        if let ElementKind::Rotation { order, axis, .. } = k {
            match axes.iter_mut().find(|(a, _)| parallel(*a, *axis, tol)) {
                Some(entry) => entry.1 = entry.1.max(*order),
                None => axes.push((*axis, *order)),
            }
        }
    }
    axes.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.lex_cmp(&b.0)));
    axes
}

/// Schönflies symbol of a closed element set. Cs and Ci are reported as S1
/// and S2, and Cnh with odd n as Sn.
fn schoenflies_of<T: Real>(
    els: &[OrthogonalMap<T>],
    ctx: &ToleranceContext<T>,
) -> Result<SchoenfliesLabel, GroupError> {
    let kinds: Vec<ElementKind<T>> = els.iter().map(|e| e.kind(ctx)).collect();
    if kinds.iter().any(|k| matches!(k, ElementKind::GenericRotation { .. })) {
        return Err(GroupError::NotAGroup);
    }
    let tol = ctx.ortho_tol();
    let order = els.len();
    let inversion = kinds.iter().any(|k| matches!(k, ElementKind::Inversion));
    let mirrors: Vec<Vec3<T>> = kinds
        .iter()
        .filter_map(|k| match k {
            ElementKind::Reflection { normal } => Some(*normal),
            _ => None,
        })
        .collect();
    let improper =
        kinds.iter().filter(|k| !matches!(k, ElementKind::Identity | ElementKind::Rotation { .. })).count() > 0;
    let axes = axes_of(&kinds, ctx);
    let rotoreflections: Vec<(Vec3<T>, u32)> = kinds
        .iter()
        .filter_map(|k| match k {
            ElementKind::Rotoreflection { order, axis, .. } => Some((*axis, *order)),
            _ => None,
        })
        .collect();

    use Family as F;
    let label = if axes.is_empty() {
        if inversion {
            SchoenfliesLabel::axial(F::S, 2)
        } else if !mirrors.is_empty() {
            SchoenfliesLabel::axial(F::S, 1)
        } else {
            SchoenfliesLabel::axial(F::C, 1)
        }
    } else if axes.iter().filter(|(_, o)| *o >= 3).count() >= 2 {
        let top = axes[0].1;
        if top == 5 {
            SchoenfliesLabel::polyhedral(if improper { F::Ih } else { F::I })
        } else if top == 4 {
            SchoenfliesLabel::polyhedral(if improper { F::Oh } else { F::O })
        } else if order == 12 {
            SchoenfliesLabel::polyhedral(F::T)
        } else if inversion {
            SchoenfliesLabel::polyhedral(F::Th)
        } else {
            SchoenfliesLabel::polyhedral(F::Td)
        }
    } else {
        let n = axes[0].1;
        let roto_about = |a: Vec3<T>| -> u32 {
            rotoreflections.iter().filter(|(b, _)| parallel(a, *b, tol)).map(|(_, o)| *o).max().unwrap_or(0)
        };
        let principal = axes
            .iter()
            .filter(|(_, o)| *o == n)
            .map(|(a, _)| *a)
            .max_by(|a, b| roto_about(*a).cmp(&roto_about(*b)).then(b.lex_cmp(a)))
            .unwrap();
        let perp_c2 = axes.iter().filter(|(a, o)| o % 2 == 0 && perpendicular(*a, principal, tol)).count();
        let horizontal = mirrors.iter().any(|m| parallel(*m, principal, tol));
        let vertical = mirrors.iter().filter(|m| perpendicular(**m, principal, tol)).count();
        if perp_c2 >= n as usize {
            if horizontal {
                SchoenfliesLabel::axial(F::Dh, n)
            } else if vertical >= n as usize {
                SchoenfliesLabel::axial(F::Dd, n)
            } else {
                SchoenfliesLabel::axial(F::D, n)
            }
        } else if horizontal {
            if n % 2 == 1 {
                SchoenfliesLabel::axial(F::S, n)
            } else {
                SchoenfliesLabel::axial(F::Ch, n)
            }
        } else if vertical >= n as usize {
            SchoenfliesLabel::axial(F::Cv, n)
        } else if roto_about(principal) == 2 * n {
            SchoenfliesLabel::axial(F::S, 2 * n)
        } else {
            SchoenfliesLabel::axial(F::C, n)
        }
    };
    if label.order() != order {
        return Err(GroupError::UnrecognizedGroup);
    }
    Ok(label)
}

/// Schönflies symbol of a group.
pub fn schoenflies<T: Real>(g: &PointGroup<T>, ctx: &ToleranceContext<T>) -> Result<SchoenfliesLabel, GroupError> {
    if !is_closed(&g.elements, ctx) {
        return Err(GroupError::NotAGroup);
    }
    schoenflies_of(&g.elements, ctx)
}

/// The cluster group `S_x(ρ)`: all orthogonal maps about the center that
/// map the cluster onto itself.
pub fn stabilizer<T: Real>(c: &Cluster<T>, ctx: &ToleranceContext<T>) -> Result<PointGroup<T>, GroupError> {
    let dim = c.affine_dim(ctx);
    if dim < 3 {
        return Err(GroupError::LowerDimensionalCluster { dim });
    }
    let maps: Vec<OrthogonalMap<T>> =
        orthogonal_matches(c, c, ctx, true).into_iter().map(OrthogonalMap::new_unchecked).collect();
    let els = close(&maps, ctx)?;
    PointGroup::from_elements(c.center, els, ctx)
}

/// Largest rotation order in the cluster group, 1 if there is none.
pub fn max_rotation_order<T: Real>(c: &Cluster<T>, ctx: &ToleranceContext<T>) -> Result<u32, GroupError> {
    Ok(stabilizer(c, ctx)?.max_rotation_order(ctx))
}

/// Ω(n): number of prime factors of `n` counted with multiplicity.
pub fn omega(n: u64) -> u32 {
    assert!(n >= 1, "omega is defined for n >= 1");
    let mut n = n;
    let mut count = 0;
    let mut p = 2;
    while p * p <= n {
        while n.is_multiple_of(p) {
            n /= p;
            count += 1;
        }
        p += 1;
    }
    if n > 1 {
        count += 1;
    }
    count
}

/// Maximal length of a chain `G = G₀ > G₁ > … > {1}`, counting both ends.
pub fn tower_height<T: Real>(g: &PointGroup<T>, ctx: &ToleranceContext<T>) -> Result<u32, GroupError> {
    tower_height_of(g.elements(), ctx)
}

pub(crate) fn tower_height_of<T: Real>(els: &[OrthogonalMap<T>], ctx: &ToleranceContext<T>) -> Result<u32, GroupError> {
    let n = els.len();
    if n > MAX_TOWER_ORDER {
        return Err(GroupError::GroupTooLarge { order: n, max: MAX_TOWER_ORDER });
    }
    let mut table = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            table[i][j] = index_of(els, &els[i].compose(&els[j]), ctx.dedup_tol).ok_or(GroupError::NotAGroup)?;
        }
    }
    let id = index_of(els, &OrthogonalMap::identity(), ctx.dedup_tol).ok_or(GroupError::NotAGroup)?;

    let bit = |i: usize| 1u128 << i;
    // Subgroup generated by `gens`, by breadth-first multiplication.
    let generated = |gens: &[usize]| -> u128 {
        let mut set = bit(id);
        let mut queue = vec![id];
        while let Some(x) = queue.pop() {
            for &g in gens {
                let y = table[x][g];
                if set & bit(y) == 0 {
                    set |= bit(y);
                    queue.push(y);
                }
            }
        }
        set
    };

    let mut seen: HashSet<u128> = HashSet::new();
    let mut frontier: Vec<(u128, Vec<usize>)> = vec![(bit(id), vec![])];
    seen.insert(bit(id));
    // Every subgroup arises from the trivial one by adjoining elements.
    while let Some((set, gens)) = frontier.pop() {
        for g in 0..n {
            if set & bit(g) != 0 {
                continue;
            }
            let mut ng = gens.clone();
            ng.push(g);
            let s = generated(&ng);
            if seen.insert(s) {
                frontier.push((s, ng));
            }
        }
    }
    let mut subs: Vec<u128> = seen.into_iter().collect();
    subs.sort_by_key(|s| (s.count_ones(), *s));
    let mut height = vec![0u32; subs.len()];
    for i in 0..subs.len() {
        let h = (0..i).filter(|&k| subs[k] & !subs[i] == 0 && subs[k] != subs[i]).map(|k| height[k]).max().unwrap_or(0);
        height[i] = h + 1;
    }
    Ok(height[subs.len() - 1])
}
