//! Analytic continuation: fibers, path tracking, monodromy and local expansions.

mod fiber;
mod monodromy;
mod path;
mod puiseux;
mod track;

pub use fiber::{solve_fiber, Fiber};
pub use monodromy::{
    branch_order, is_irreducible, lasso_system, monodromy, BranchOrder, LassoSystem, MonodromyPermutation, Permutation,
};
pub use path::{PathSpec, Piece, Segment};
pub use puiseux::{puiseux_expand, PuiseuxSeries, PuiseuxTerm};
pub use track::{track, TrackResult, Tracker};

pub(crate) use monodromy::{lasso_system_with, punctures_inside};
pub(crate) use puiseux::local_cycles;
