//! Exact-arithmetic toolkit for cohomology-level birational dynamics:
//! intersection pairings on blowups of projective space, pullback matrices
//! of dominant meromorphic maps, dynamical-degree certification, Siu-ledger
//! bookkeeping with variety pullback, and desk-scale numerical Green
//! potentials with Lelong-number estimation.
//!
//! The core containers are generic over the scalar; the concrete exact
//! types used throughout are the aliases below.

pub mod error;
pub mod scalar;

pub mod lp;
pub mod matrix;
pub mod poly;
pub mod spectral;

pub mod cohomology;
pub mod dynamics;
pub mod green;
pub mod maps;
pub mod monomial;

/// Arbitrary-precision integer.
pub type Int = num_bigint::BigInt;
/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator (the `num-rational` canonical form).
pub type Rat = num_rational::BigRational;
/// Complex double: the scalar of the numerical (non-exact) modules.
pub type C64 = num_complex::Complex<f64>;

/// Exact rational matrix.
pub type RatMatrix = matrix::Matrix<Rat>;
/// Exact integer matrix.
pub type IntMatrix = matrix::Matrix<Int>;
/// Integer-coefficient polynomial, lowest degree first.
pub type IntPoly = poly::Poly<Int>;

pub use error::{CoreError, Result};
pub use lp::{cone_membership, ConeMembership};
pub use matrix::{bareiss_det, LinearSolution, Matrix};
pub use poly::{isolate_real_roots, Poly, RootInterval};
pub use spectral::{char_poly, spectral_radius, RatInterval};

pub use cohomology::{
    blowup_points, blowup_points_named, positivity_obstruction, product_model, projective_space,
    CohomologyClass, CohomologyModel, Positivity, VarietyClass,
};
pub use dynamics::{
    applicability_check_series, dynamical_degree, invariant_class_cesaro, invariant_class_eigen,
    large_topological_degree, siu_pullback, stability_check, SiuLedger,
};
pub use green::{
    extracted_invariant_current, green_potential, lelong_estimate, product_invariant_current,
    GreenParams, HomogeneousLift, HypersurfaceCurrent, Lift64,
};
pub use maps::{builtin, product_map, MapModel};
pub use monomial::{degree_sequence, first_dynamical_degree, is_1_stable, MonomialLift};
