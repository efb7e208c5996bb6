//! Numerical Hardy-Stein identities for pure-jump Lévy processes on a
//! periodic grid, with square functions, Fourier multipliers and Monte Carlo
//! checks of the martingale form.

pub mod engine;
pub mod error;
pub mod exponent;
pub mod grid;
pub mod identity;
pub mod measure;
pub mod multiplier;
pub mod quadrature;
pub mod semigroup;
pub mod sim;
pub mod square;
pub mod taylor;
pub mod testfns;

pub use engine::QuadSpec;
pub use error::{Error, Result};
pub use exponent::{char_exponent, hartman_wintner_profile, quadrature_exponent, CharacteristicExponent};
pub use grid::{fourier_forward, fourier_inverse, Grid, GridFunction, Point, Spectrum};
pub use identity::{hardy_stein_rhs, verify_identity, IdentityReport};
pub use measure::{symmetrize, LevyMeasure, MeasureSpec, SymmetrizationResult};
pub use multiplier::{
    adjoint_identity_check, apply_multiplier, lambda_form, multiplier_symbol, symmetrized_form, MultiplierSpec,
    PhiTemplate, SymbolGrid,
};
pub use semigroup::{semigroup_apply, transition_density, ultra_constant, SemigroupOperator, Variant};
pub use sim::{martingale_hardy_stein_mc, sample_path, semigroup_mc_crosscheck, MartingaleSpec, Simulator};
pub use square::{norm_equivalence_report, square_function, SquareFunctionResult, SquareVariant};
pub use taylor::{comparability_scan, f_eps_value, f_value, k_value, TaylorRemainder};
