//! Numerical checks of the linear estimates: interaction virial identities,
//! bilinear and `L⁴` Strichartz bounds, the local elliptic lemma and a
//! discrete `X^{s,b}` diagnostic.

mod bilinear;
mod elliptic;
mod gram;
mod legendre;
mod marginal;
mod strichartz;
mod virial;
mod weight;
mod xsb;

pub use bilinear::{bilinear_integral, bilinear_ratio, time_step_bound, trial_data, RatioRow, RatioTable};
pub use elliptic::{elliptic_constant, h2_identity};
pub use legendre::gauss_legendre;
pub use strichartz::{strichartz_l4, StrichartzReport};
pub use virial::{interaction_i, localized_pair, virial_residuals, InteractionState, Kernel, VirialResiduals};
pub use weight::{rho_m, WeightRhoM};
pub use xsb::{hann, xsb_discrete};

