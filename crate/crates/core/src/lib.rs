//! Maximal-function machinery on finite weighted instances.
//!
//! The crate provides:
//! - finite pointed families with positive weights ([`instance`]),
//! - maximal functions, superlevel checks and the verified weak-type
//!   inequality ([`maximal`]),
//! - the disjoint-sum norm with exact and lower-bound evaluation ([`norm`]),
//! - certified constants via dilation hulls and dyadic conditions
//!   ([`certify`]), with searched lower bounds ([`search`]),
//! - Vitali-type covering selections ([`covering`]),
//! - concrete geometries: Euclidean balls/cubes with dyadic and Whitney
//!   machinery ([`euclid`]), homogeneous trees with admissible trapezoids
//!   ([`tree`]), and Calderón–Zygmund boxes on the affine group ([`axb`]),
//! - JSON/CSV interchange for all of the above ([`io`]).

pub mod axb;
pub mod certify;
pub mod covering;
pub mod error;
pub mod euclid;
pub mod homogeneous;
pub mod instance;
pub mod io;
pub mod maximal;
pub mod norm;
pub mod numeric;
pub mod search;
pub mod tree;

pub use error::{Error, Result};
pub use instance::{build_integral_setfunction, family_union, Instance, SetFunction};
pub use maximal::{hl_ratio, maximal_function, verify_hl_inequality, HlReport, MaximalProfile};
pub use norm::{family_norm, NormKind, NormMode, NormResult};
pub use numeric::{Rational, Scalar};
