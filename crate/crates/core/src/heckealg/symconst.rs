//! Exact rational vectors over the formal constant basis
//! {1, c_E(0), c_{E,Q}(0) : Q || N}.
//!
//! `CuspConstant(1)` stands for c_E(0), the constant term of the
//! completed Weierstrass mock modular form at infinity, and
//! `CuspConstant(Q)` for the constant of its W_Q image. Keeping these
//! formal through the operator pipelines separates the exact divisor-sum
//! combinatorics from floating-point substitution, which happens only at
//! the very end.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;

use crate::coeff::{rat, rat_to_c64, Coeff};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConstSym {
    /// The rational unit 1.
    One,
    /// Constant term of Zhat_E | W_Q at infinity; Q = 1 is c_E(0) itself.
    CuspConstant(u32),
}

impl fmt::Display for ConstSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstSym::One => write!(f, "1"),
            ConstSym::CuspConstant(1) => write!(f, "c_E(0)"),
            ConstSym::CuspConstant(q) => write!(f, "c_E,{q}(0)"),
        }
    }
}

/// A rational-linear combination of constant symbols.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolicConstant {
    terms: BTreeMap<ConstSym, BigRational>,
}

impl SymbolicConstant {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(r: BigRational) -> Self {
        Self::from_terms([(ConstSym::One, r)])
    }

    pub fn symbol(sym: ConstSym) -> Self {
        Self::from_terms([(sym, rat(1, 1))])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (ConstSym, BigRational)>) -> Self {
        let mut map = BTreeMap::new();
        for (s, r) in terms {
            if !Coeff::is_zero(&r) {
                let e = map.entry(s).or_insert_with(|| rat(0, 1));
                *e = &*e + &r;
            }
        }
        map.retain(|_, r| !Coeff::is_zero(r));
        SymbolicConstant { terms: map }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.terms.clone();
        for (s, r) in &rhs.terms {
            let e = out.entry(*s).or_insert_with(|| rat(0, 1));
            *e = &*e + r;
        }
        out.retain(|_, r| !Coeff::is_zero(r));
        SymbolicConstant { terms: out }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&rat(-1, 1)))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if Coeff::is_zero(c) {
            return Self::zero();
        }
        SymbolicConstant {
            terms: self.terms.iter().map(|(s, r)| (*s, r * c)).collect(),
        }
    }

    /// Coefficient of a basis symbol.
    pub fn coefficient(&self, sym: ConstSym) -> BigRational {
        self.terms.get(&sym).cloned().unwrap_or_else(|| rat(0, 1))
    }

    pub fn iter(&self) -> impl Iterator<Item = (ConstSym, &BigRational)> {
        self.terms.iter().map(|(s, r)| (*s, r))
    }

    /// Substitute numeric values for the cusp-constant symbols.
    pub fn eval(&self, values: &impl Fn(u32) -> Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, r) in &self.terms {
            let factor = match s {
                ConstSym::One => Complex64::new(1.0, 0.0),
                ConstSym::CuspConstant(q) => values(*q),
            };
            acc += rat_to_c64(r) * factor;
        }
        acc
    }
}

impl fmt::Display for SymbolicConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (s, r) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match s {
                ConstSym::One => write!(f, "{r}")?,
                _ => write!(f, "({r})*{s}")?,
            }
        }
        Ok(())
    }
}
