//! Operator calculus on q-expansions and on cusp data.
//!
//! The series-level operators T_m, U_m, B_m act on [`crate::qseries::QSeries`]
//! through their coefficient formulas. The cusp-data layer tracks a
//! harmonic Maass form of weight 0 by its principal parts and constant
//! terms at every cusp of Gamma_0(N) (N square-free), which is exactly the
//! information the dimension-formula pipelines consume, and pushes that
//! data through Hecke operators, U_p, B_d and the Atkin-Lehner
//! involutions. Constant terms are exact rational vectors over the formal
//! basis {1, c_E(0), c_{E,Q}(0)}.

mod cusp;
mod series_ops;
mod symconst;

pub use cusp::{
    poincare_principal_part, zhat_cusp_data, CuspData, HeckeAlgError, OpAtom, OperatorWord,
    SlotExpansion,
};
pub use series_ops::{apply_b, apply_hecke, apply_u};
pub use symconst::{ConstSym, SymbolicConstant};
