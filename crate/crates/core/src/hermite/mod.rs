//! Hermite functions, Gauss–Hermite quadrature and the spectral transforms.

mod basis;
mod field;
pub mod ladder;
mod quadrature;
mod transform;

pub use basis::{eval_basis, hermite_functions, BasisTable};
pub use field::{triangle_len, PhysicalField, SpectralField};
pub use ladder::Axis;
pub use quadrature::{gauss_hermite_rule, QuadratureRule, WeightScale};
pub use transform::{synthesize_on_nodes, to_physical, to_spectral, Grid};
