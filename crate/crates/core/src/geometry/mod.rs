//! Convex hulls, ruled-surface metrics and support points of the
//! expectation-value sets.

mod hull;
mod ruled;
mod support;

pub use hull::{brute_force_planes, convex_hull, ConvexHull3, HullKind, Plane, HULL_EPS};
pub use ruled::{d_max, project, theta_grid, theta_scan, theta_scan_refined, RuledSurfaceReport};
pub use support::{
    spin_branch_points, support_detail, support_point, surface_sweep, Backend, SupportResult, SweepEntry,
};
