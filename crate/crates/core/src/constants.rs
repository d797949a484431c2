//! Numerical constants of the modular group computation, in one place.

use std::f64::consts::PI;

/// Volume of `SL₂(Z)\H` with the measure divided by `#(Γ ∩ {±1}) = 2`.
pub const VOL_SL2Z: f64 = PI / 6.0;

/// Spectral gap `(25/64)(1 − 25/64)` from the Kim–Sarnak exponent 7/64.
pub const ETA_KIM_SARNAK: f64 = 975.0 / 4096.0;

/// Selberg's spectral gap `3/16`.
pub const ETA_SELBERG: f64 = 3.0 / 16.0;

/// Distance cut-off `U` used for the lattice count.
pub const COUNT_U: f64 = 17.0;

/// Grid used for the lattice count over `Y₀`.
pub const COUNT_GRID: (usize, usize) = (100, 100);

/// Published bound for `N(z, z, 17)`, `z ∈ Y₀`.
pub const REFERENCE_N_BOUND: f64 = 216.0;

/// Published caps `q⁺ < 69.0`, `q⁻ > −216`.
pub const REFERENCE_Q_PLUS: f64 = 69.0;
pub const REFERENCE_Q_MINUS: f64 = -216.0;

/// Published caps `D⁺ < 18.5`, `D⁻ < 9.61`.
pub const REFERENCE_D_PLUS: f64 = 18.5;
pub const REFERENCE_D_MINUS: f64 = 9.61;

/// Published headline values `A ≈ −2.87·10⁴`, `B ≈ 1.51·10⁴`.
pub const REFERENCE_A: f64 = -2.87e4;
pub const REFERENCE_B: f64 = 1.51e4;

/// Trapezoid and strip parameters of the modular group computation.
pub const REFERENCE_DELTA: f64 = 2.0;
pub const REFERENCE_ALPHA_PLUS: f64 = 0.0366;
pub const REFERENCE_BETA_PLUS: f64 = 2.72;
pub const REFERENCE_SIGMA_PLUS: f64 = 0.306;
pub const REFERENCE_ALPHA_MINUS: f64 = 2.96e-3;
pub const REFERENCE_BETA_MINUS: f64 = 0.668;
pub const REFERENCE_SIGMA_MINUS: f64 = 0.250;

/// Smallest `|c| ≠ 0` over `SL₂(Z)`, the cusp-width datum for the cusp at ∞.
pub const MIN_C_SL2Z: f64 = 1.0;
