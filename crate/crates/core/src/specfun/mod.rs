//! Hypergeometric and Legendre functions together with the explicit bounds
//! used for them.

mod gamma;
mod hypergeometric;
mod legendre;
mod strip;

pub use gamma::{
    gamma_complex, gamma_ratio_bounds, gamma_ratio_upper, ln_gamma_real, log_gamma_complex, recip_gamma,
};
pub use hypergeometric::{gauss_value, hyp2f1};
pub use legendre::{
    legendre_p_neg1, legendre_p_neg_order_hyp, legendre_p_negm, legendre_q0, legendre_q_deriv, NegOrderSeries,
    HALF_EXCLUSION,
};
pub(crate) use legendre::near_one;
pub use strip::{c_sigma, p_sigma, StripParameter};
