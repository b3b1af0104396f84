//! Weierstrass mock modular forms on the genus-one modular curves X_0(N),
//! N in {11, 14, 15, 17, 19, 21}, together with the surrounding machinery:
//! truncated q-series arithmetic, period lattices and the completed
//! Weierstrass zeta function, Hecke and Atkin-Lehner operator calculus on
//! cusp expansions, Kloosterman/Bessel coefficient series for
//! Maass-Poincare forms, and evaluators for the orbifold dimension
//! formulas these objects feed.

pub mod coeff;
pub mod context;
pub mod curves;
pub mod dimformula;
pub mod heckealg;
pub mod kloosterman;
pub mod lattice;
pub mod mockform;
pub mod qseries;
pub mod verify;

pub use coeff::Coeff;
pub use qseries::{compose_laurent, LaurentData, QSeries};
