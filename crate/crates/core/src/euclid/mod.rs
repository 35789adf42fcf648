//! Euclidean geometry kernels: balls and cubes, dyadic cubes, closed-set
//! distances, Whitney decomposition and grid discretization.

pub mod ball;
pub mod closed_set;
pub mod dyadic;
pub mod grid;
pub mod whitney;

pub use ball::{verify_5b, vitali_5b, Ball, BallCoverVerdict, Metric};
pub use closed_set::{dist_to_closed, ClosedSetSpec, RatBox};
pub use dyadic::{dyadic_grid_instance, dyadic_relate, DyadicCube, DyadicRelation};
pub use grid::{grid_instance, GridPointing, Shape};
pub use whitney::{whitney_condition, whitney_decompose, WhitneyCover};
