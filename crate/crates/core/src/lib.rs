//! Numerical laboratory for Coulomb-Sobolev interpolation inequalities.
//!
//! The crate is organized around the pipeline
//! parameters -> trial functions -> quadrature -> inequality reports:
//!
//! * [`params`] — exact-rational algebra for the interpolation exponents
//!   (scaling equations, admissibility, range classification).
//! * [`profiles`] — trial-function representations, truncation operators,
//!   dyadic maximal functions, and the bump-train family.
//! * [`quad`] — quadrature engines for weighted Lebesgue norms, fractional
//!   Sobolev seminorms, and Coulomb double integrals.
//! * [`constants`] — explicit constants: fractional Hardy constants,
//!   remainder constants, Fefferman-de la Llave normalization.
//! * [`inequality`] — ratio evaluation, best-constant search,
//!   counterexample growth scans, Hardy-remainder composite checks.
//! * [`manybody`] — small-N many-body states: one-body densities,
//!   Hoffman-Ostenhof, Lieb-Oxford, and Hardy-Lieb-Thirring reports.
//! * [`suite`] — the verification battery run by `cslab verify`.

pub mod constants;
pub mod inequality;
pub mod manybody;
pub mod numeric;
pub mod params;
pub mod profiles;
pub mod quad;
pub mod suite;
