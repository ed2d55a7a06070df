//! Integral representation of the transition probabilities, generating functions,
//! recurrence classification, characteristic roots and Christoffel–Darboux checks.

mod cd;
mod charpoly;
mod classify;
mod km;
mod quadrature;
mod ratio;

pub use cd::{cd_checks, CdResiduals};
pub use charpoly::{char_poly, CharPoly, Depressed, Root, DIVISION_TOL};
pub use classify::{classify, Classification, Verdict, STABLE_TOL};

pub use km::{
    first_passage_curve_csv, first_passage_fn, generating_fn, km_transition, km_transition_type_i,
    ChainType, KmEngine, RefinedValue, MAX_NODES, REFINE_TOL,
};
pub use quadrature::{gauss_jacobi_rule, jacobi_recurrence, QuadratureRule};
pub use ratio::{neville_at_zero, ratio_asymptotics, RatioEstimate, RatioKind, RATIO_TOL, RICHARDSON_POINTS};
