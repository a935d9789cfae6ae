//! Local regularity theory for Delone sets in three-space.
//!
//! A finite patch of a Delone set is analysed through its ρ-clusters: the
//! number `N(ρ)` of congruence classes, the symmetry group of each cluster
//! and how those groups shrink as ρ grows. On top of that sit the local
//! regularity criterion, per-group regularity-radius bounds and the two
//! antiprism extremal problems behind the `D4d`/`S8` exclusion.
//!
//! Every geometric routine is generic over [`scalar::Real`] (`f32` or `f64`).
//! The aliases below fix `f64`.

pub mod antiprism_opt;
pub mod equivalence;
pub mod generators;
pub mod geometry;
pub mod io;
pub mod patch;
pub mod point_group;
pub mod regularity;
pub mod scalar;
pub mod spatial;

pub use equivalence::{
    cluster_classes, cluster_classes_among, cluster_isometry, ClusterClassDecomposition, EquivalenceError,
};
pub use geometry::{ElementKind, GeometryError, Mat3, OrthogonalMap, Vec3};
pub use patch::{covering_radius, packing_diameter, Aabb, Cluster, PatchError, PointPatch};
pub use point_group::{
    max_rotation_order, schoenflies, stabilizer, tower_height, GroupError, PointGroup, SchoenfliesLabel,
};
pub use regularity::{
    bound_lookup, classify_scenario, local_criterion, shtogrin_step_bound, RegularityError, BOUND_TABLE,
};
pub use scalar::Real;

pub type Point = geometry::Point3<f64>;
pub type Matrix = Mat3<f64>;
pub type Orthogonal = OrthogonalMap<f64>;
pub type Isometry = geometry::Isometry<f64>;
pub type Tolerances = geometry::ToleranceContext<f64>;
pub type Patch = PointPatch<f64>;
pub type Ball = Cluster<f64>;
pub type Group = PointGroup<f64>;
