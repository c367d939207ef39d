//! Generalized discriminants, Weierstrass preparation and the towers of
//! distinguished polynomials built from them.

mod symmetric;
mod tower;
mod weierstrass;

pub use symmetric::{
    distinct_root_count_check, distinct_roots_by_gcd, elementary, expand_delta, generalized_discriminant,
    poly_mul, reduce_symmetric, DiscriminantCache, Poly, SymmetricReduction, DEFAULT_DEGREE_CAP,
};
pub use tower::{
    build_tower, certified_zero, first_nonvanishing, validate_tower, ConditionCheck, Tower, TowerLevel,
    TowerOptions, TowerValidation, VanishingCertificate,
};
pub use weierstrass::{weierstrass_prepare, Prepared};
