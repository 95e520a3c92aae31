//! One vertical slice of the gate stack: mesh, carrier statistics, the
//! nonlinear Poisson problem and its self-consistent coupling to a grain.

mod mesh;
mod poisson;
mod semiconductor;
mod slice;
mod tridiag;

pub use mesh::{build_mesh, Doping, Material, Mesh, Stack1D};
pub use poisson::{solve_poisson, ChargeBalance, PoissonOptions, PoissonProblem, PoissonSolution};
pub use semiconductor::{neutral_potential, semiconductor_charge, Carriers};
pub use slice::{OuterOptions, SliceState, StackSolver};
pub use tridiag::solve_tridiagonal;
