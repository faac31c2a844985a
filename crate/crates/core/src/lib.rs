pub mod approx;
pub mod diff;
pub mod error;
pub mod eulerlagrange;
pub mod fracops;
pub mod interp;
pub mod noether;
pub mod presets;
pub mod quadrature;
pub mod solver;
pub mod special;
pub mod symmetry;
pub mod types;
