//! Dilated-cube geometry, regions, exact 2-D overlay and Monte Carlo
//! integration.

mod cube;
mod montecarlo;
mod overlay;
mod polygon;
mod region;

pub use cube::{cube_of_point, cube_polytope, cubes_meeting_region, locate_f64, ConvexPolytope, DyadicCube};
pub use montecarlo::{integrate_mc, integrate_mc_affine, sample_unit_cube, McConfig, McEstimate, CHUNK};
pub use overlay::{overlay_cells_2d, OverlayCell, DEFAULT_OVERLAY_BUDGET};
pub use polygon::{ConvexPolygon, Coord, HalfPlane, Point};
pub use region::{ball_volume, ConvexPolygonDoc, Region};
