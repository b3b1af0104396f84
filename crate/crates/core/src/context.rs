//! Per-level bundle shared by the verification suites and the CLI.

use num_complex::Complex64;

use crate::heckealg::ConstSym;
use crate::mockform::{MockFormError, MockModularForm};

/// Everything one level needs, built once: curve model, newform stream,
/// period lattice, mock-form q-expansion and the numeric cusp constants.
pub struct LevelData {
    pub mock: MockModularForm,
}

impl LevelData {
    /// Default build: q-expansion to order 44 and newform coefficients to
    /// 9000, enough for direct evaluation down to heights around 1e-3.
    pub fn build(level: u32) -> Result<Self, MockFormError> {
        Ok(LevelData {
            mock: MockModularForm::build(level, 44, 9000)?,
        })
    }

    pub fn level(&self) -> u32 {
        self.mock.level
    }

    /// Numeric substitution for the formal constant basis.
    pub fn constant_values(&self) -> impl Fn(u32) -> Complex64 + '_ {
        move |q| self.mock.cusp_constant_value(q)
    }

    /// Evaluate a symbolic constant with this level's numbers.
    pub fn eval_symbolic(&self, s: &crate::heckealg::SymbolicConstant) -> Complex64 {
        s.eval(&self.constant_values())
    }
}

/// Pretty name of a constant symbol for reports.
pub fn symbol_name(sym: ConstSym) -> String {
    sym.to_string()
}
