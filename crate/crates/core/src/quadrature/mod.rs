//! Graded meshes, sampled functions and the weakly singular Laplace
//! convolution.

mod convolve;
mod function;
mod grid;
mod rules;

pub use convolve::{convolve, cumulative_integral, differentiate, Input};
pub use function::{GridFunction, TestFunction};
pub use grid::Grid;
pub use rules::GaussRule;
