//! Truncated q-series on fractional exponent grids.
//!
//! A [`QSeries`] stores coefficients at exponents n/h for an explicit grid
//! denominator h, together with a validity window `[e_min, e_max)` (scaled
//! by h). Coefficients at exponents past `e_max` are *undefined* rather
//! than zero: asking for one is an error. Arithmetic propagates windows
//! pessimistically, so a truncation bug surfaces as a loud
//! `OutsideWindow` instead of a silently wrong coefficient.
//!
//! Exponents may be negative (principal parts of polar expansions live
//! here) and grids mix by taking the lcm of the denominators.

use std::collections::BTreeMap;

use num_integer::Integer;
use thiserror::Error;

use crate::coeff::Coeff;

/// Sentinel for a window that is exact to all orders (constants, finite
/// polynomials entered as exact data). Kept far from `i64::MAX` so window
/// arithmetic can add two of them without overflow.
pub const WINDOW_MAX: i64 = i64::MAX / 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QSeriesError {
    #[error(
        "coefficient at exponent {num}/{den} is outside the valid window (e_max = {emax}/{den})"
    )]
    OutsideWindow { num: i64, den: i64, emax: i64 },
    #[error("series has no invertible leading coefficient")]
    NonUnitLeading,
    #[error("operation needs a finite truncation window")]
    UnboundedWindow,
    #[error("resulting validity window is empty")]
    EmptyWindow,
    #[error("composition requires strictly positive leading exponent")]
    NonpositiveLeadingExponent,
    #[error("invalid grid denominator {0}")]
    InvalidGrid(i64),
}

/// Truncated series `sum c(e) q^(e/h)` valid on `e in [e_min, e_max)`.
#[derive(Clone, Debug)]
pub struct QSeries<T: Coeff> {
    h: i64,
    emin: i64,
    emax: i64,
    coeffs: BTreeMap<i64, T>,
}

impl<T: Coeff> QSeries<T> {
    /// Build a series from `(scaled_exponent, coefficient)` terms; the
    /// scaled exponent n stands for q^(n/h).
    pub fn from_terms(
        h: i64,
        emax: i64,
        terms: impl IntoIterator<Item = (i64, T)>,
    ) -> Result<Self, QSeriesError> {
        if h <= 0 {
            return Err(QSeriesError::InvalidGrid(h));
        }
        let mut coeffs = BTreeMap::new();
        for (e, c) in terms {
            if e >= emax {
                return Err(QSeriesError::OutsideWindow {
                    num: e,
                    den: h,
                    emax,
                });
            }
            if !c.is_zero() {
                coeffs.insert(e, c);
            }
        }
        let emin = coeffs.keys().next().copied().unwrap_or(emax);
        Ok(QSeries {
            h,
            emin,
            emax,
            coeffs,
        })
    }

    /// Zero series on the integer grid, exact to all orders.
    pub fn zero() -> Self {
        QSeries {
            h: 1,
            emin: WINDOW_MAX,
            emax: WINDOW_MAX,
            coeffs: BTreeMap::new(),
        }
    }

    /// Constant series, exact to all orders.
    pub fn constant(c: T) -> Self {
        let mut coeffs = BTreeMap::new();
        let emin = if c.is_zero() {
            WINDOW_MAX
        } else {
            coeffs.insert(0, c);
            0
        };
        QSeries {
            h: 1,
            emin,
            emax: WINDOW_MAX,
            coeffs,
        }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    /// `c * q^(num/h)` exact to all orders.
    pub fn monomial(h: i64, num: i64, c: T) -> Self {
        QSeries::from_terms(h, WINDOW_MAX, [(num, c)]).expect("monomial")
    }

    pub fn grid(&self) -> i64 {
        self.h
    }

    /// Scaled minimum exponent: everything below is known to vanish.
    pub fn emin(&self) -> i64 {
        self.emin
    }

    /// Scaled truncation bound (exclusive).
    pub fn emax(&self) -> i64 {
        self.emax
    }

    pub fn is_zero_series(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Iterate stored `(scaled_exponent, coefficient)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    /// Coefficient at exponent `num/den`. Exponents below the window are
    /// genuinely zero; at or past `e_max` they are undefined.
    pub fn coeff(&self, num: i64, den: i64) -> Result<T, QSeriesError> {
        assert!(den > 0, "exponent denominator must be positive");
        // Bring num/den onto this grid if possible; off-grid exponents
        // within the window are zero.
        let g = den.gcd(&self.h);
        let scale = self.h / g;
        if num % (den / g) != 0 {
            // Exponent not on any refinement of our grid that we track.
            // It is zero when inside the window.
            let approx = (num as i128 * self.h as i128) / den as i128;
            if approx >= self.emax as i128 {
                return Err(QSeriesError::OutsideWindow {
                    num,
                    den,
                    emax: self.emax,
                });
            }
            return Ok(T::zero());
        }
        let e = num / (den / g) * scale;
        if e >= self.emax {
            return Err(QSeriesError::OutsideWindow {
                num,
                den,
                emax: self.emax,
            });
        }
        Ok(self.coeffs.get(&e).cloned().unwrap_or_else(T::zero))
    }

    /// Constant term (exponent zero).
    pub fn constant_term(&self) -> Result<T, QSeriesError> {
        self.coeff(0, 1)
    }

    fn normalized(mut self) -> Self {
        self.coeffs.retain(|_, c| !c.is_zero());
        self.emin = self.coeffs.keys().next().copied().unwrap_or(self.emax);
        self
    }

    /// Refine the grid to a multiple of the current one.
    pub fn rescaled(&self, new_h: i64) -> Self {
        assert!(new_h > 0 && new_h % self.h == 0, "grid must refine");
        let k = new_h / self.h;
        if k == 1 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, c)| (e * k, c.clone()))
            .collect();
        QSeries {
            h: new_h,
            emin: sat_mul(self.emin, k),
            emax: sat_mul(self.emax, k),
            coeffs,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let h = self.h.lcm(&rhs.h);
        let a = self.rescaled(h);
        let b = rhs.rescaled(h);
        let emax = a.emax.min(b.emax);
        let mut coeffs = a.coeffs;
        coeffs.retain(|e, _| *e < emax);
        for (e, c) in b.coeffs {
            if e < emax {
                let entry = coeffs.entry(e).or_insert_with(T::zero);
                *entry = entry.add(&c);
            }
        }
        QSeries {
            h,
            emin: a.emin.min(b.emin).min(emax),
            emax,
            coeffs,
        }
        .normalized()
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(e, c)| (*e, c.neg())).collect();
        QSeries {
            h: self.h,
            emin: self.emin,
            emax: self.emax,
            coeffs,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return QSeries {
                h: self.h,
                emin: self.emax,
                emax: self.emax,
                coeffs: BTreeMap::new(),
            };
        }
        let coeffs = self.coeffs.iter().map(|(e, v)| (*e, v.mul(c))).collect();
        QSeries {
            h: self.h,
            emin: self.emin,
            emax: self.emax,
            coeffs,
        }
        .normalized()
    }

    /// Multiply exponents by k > 0 (the B_k substitution q -> q^k).
    pub fn stretch_exponents(&self, k: i64) -> Self {
        assert!(k > 0);
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, c)| (e * k, c.clone()))
            .collect();
        QSeries {
            h: self.h,
            emin: sat_mul(self.emin, k),
            emax: sat_mul(self.emax, k),
            coeffs,
        }
    }

    /// Cauchy product with window `min(Ea + emin_b, Eb + emin_a)`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let h = self.h.lcm(&rhs.h);
        let a = self.rescaled(h);
        let b = rhs.rescaled(h);
        let emax = sat_add(a.emax, b.emin).min(sat_add(b.emax, a.emin));
        let mut coeffs: BTreeMap<i64, T> = BTreeMap::new();
        for (ea, ca) in &a.coeffs {
            for (eb, cb) in &b.coeffs {
                let e = ea + eb;
                if e < emax {
                    let entry = coeffs.entry(e).or_insert_with(T::zero);
                    *entry = entry.add(&ca.mul(cb));
                }
            }
        }
        QSeries {
            h,
            emin: sat_add(a.emin, b.emin).min(emax),
            emax,
            coeffs,
        }
        .normalized()
    }

    /// Restrict the window to `new_emax` (scaled).
    pub fn truncated(&self, new_emax: i64) -> Self {
        let emax = self.emax.min(new_emax);
        let mut coeffs = self.coeffs.clone();
        coeffs.retain(|e, _| *e < emax);
        QSeries {
            h: self.h,
            emin: self.emin.min(emax),
            emax,
            coeffs,
        }
        .normalized()
    }

    /// Multiplicative inverse by leading-term factorization and geometric
    /// expansion. Requires a finite window and a unit leading coefficient.
    pub fn invert(&self) -> Result<Self, QSeriesError> {
        if self.coeffs.is_empty() {
            return Err(QSeriesError::NonUnitLeading);
        }
        if self.emax >= WINDOW_MAX {
            return Err(QSeriesError::UnboundedWindow);
        }
        let (&e0, c0) = self.coeffs.iter().next().unwrap();
        let c0_inv = c0.inv().ok_or(QSeriesError::NonUnitLeading)?;
        // f = c0 q^{e0} (1 + g); 1/f = c0^{-1} q^{-e0} sum (-g)^k.
        // The relative window of (1 + g) is emax - e0.
        let rel_window = self.emax - e0;
        if rel_window <= 0 {
            return Err(QSeriesError::EmptyWindow);
        }
        let mut g_terms: BTreeMap<i64, T> = BTreeMap::new();
        for (e, c) in &self.coeffs {
            if *e != e0 {
                g_terms.insert(e - e0, c.mul(&c0_inv));
            }
        }
        let g = QSeries {
            h: self.h,
            emin: g_terms.keys().next().copied().unwrap_or(rel_window),
            emax: rel_window,
            coeffs: g_terms,
        };
        let mut acc = QSeries::from_terms(self.h, rel_window, [(0, T::one())])?;
        let mut term = acc.clone();
        let neg_g = g.neg();
        loop {
            term = term.mul(&neg_g).truncated(rel_window);
            if term.is_zero_series() {
                break;
            }
            acc = acc.add(&term);
        }
        // Shift back: window of the inverse is [-e0, emax - 2 e0).
        let inv_emax = self.emax - 2 * e0;
        let coeffs = acc
            .coeffs
            .into_iter()
            .map(|(e, c)| (e - e0, c.mul(&c0_inv)))
            .filter(|(e, _)| *e < inv_emax)
            .collect();
        Ok(QSeries {
            h: self.h,
            emin: -e0,
            emax: inv_emax,
            coeffs,
        }
        .normalized())
    }

    /// Termwise q d/dq.
    pub fn derivative_qddq(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, c)| (*e, c.mul(&T::from_ratio(*e, self.h))))
            .collect();
        QSeries {
            h: self.h,
            emin: self.emin,
            emax: self.emax,
            coeffs,
        }
        .normalized()
    }

    /// Principal part: the strictly negative exponents plus the constant
    /// term, reported separately. Needs the window to reach past zero.
    pub fn principal_part(&self) -> Result<PrincipalPart<T>, QSeriesError> {
        if self.emax <= 0 {
            return Err(QSeriesError::OutsideWindow {
                num: 0,
                den: 1,
                emax: self.emax,
            });
        }
        let negative = QSeries {
            h: self.h,
            emin: self.emin.min(0),
            emax: 0,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| **e < 0)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
        .normalized();
        Ok(PrincipalPart {
            strictly_negative: negative,
            constant: self.coeffs.get(&0).cloned().unwrap_or_else(T::zero),
        })
    }

    /// Map coefficients into another ring.
    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> QSeries<U> {
        let coeffs = self.coeffs.iter().map(|(e, c)| (*e, f(c))).collect();
        QSeries {
            h: self.h,
            emin: self.emin,
            emax: self.emax,
            coeffs,
        }
        .normalized()
    }

    /// True when `self - rhs` vanishes identically on the common window.
    pub fn agrees_with(&self, rhs: &Self) -> bool {
        self.sub(rhs).is_zero_series()
    }
}

/// Output of [`QSeries::principal_part`].
#[derive(Clone, Debug)]
pub struct PrincipalPart<T: Coeff> {
    pub strictly_negative: QSeries<T>,
    pub constant: T,
}

impl<T: Coeff> PrincipalPart<T> {
    /// The principal part as one series valid up to (and including) the
    /// constant term.
    pub fn series(&self) -> QSeries<T> {
        let h = self.strictly_negative.grid();
        self.strictly_negative
            .clone()
            .with_emax_pub(1)
            .add(&QSeries::from_terms(h, 1, [(0, self.constant.clone())]).expect("const"))
    }
}

impl<T: Coeff> QSeries<T> {
    fn with_emax_pub(mut self, emax: i64) -> Self {
        self.emax = emax;
        self
    }
}

/// One-variable Laurent data `c_{-1}/z + sum_{k>=0} c_k z^k`, used to
/// compose lattice functions with q-expansions.
#[derive(Clone, Debug)]
pub struct LaurentData<T: Coeff> {
    coeffs: BTreeMap<i64, T>,
}

impl<T: Coeff> LaurentData<T> {
    pub fn new(terms: impl IntoIterator<Item = (i64, T)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            assert!(k >= -1, "Laurent data limited to a simple pole");
            if !c.is_zero() {
                coeffs.insert(k, c);
            }
        }
        LaurentData { coeffs }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }
}

/// Compose Laurent data with a series of strictly positive leading
/// exponent and unit leading coefficient:
/// `L(s) = c_{-1} s^{-1} + sum_k c_k s^k`, consistently truncated.
pub fn compose_laurent<T: Coeff>(
    ell: &LaurentData<T>,
    s: &QSeries<T>,
) -> Result<QSeries<T>, QSeriesError> {
    if s.emax >= WINDOW_MAX {
        return Err(QSeriesError::UnboundedWindow);
    }
    if s.is_zero_series() || s.emin <= 0 {
        return Err(QSeriesError::NonpositiveLeadingExponent);
    }
    let e0 = s.emin;
    let has_pole = ell.coeffs.contains_key(&-1);
    // s^{-1} is valid on [-e0, emax - 2 e0); positive powers only widen.
    let window = if has_pole { s.emax - 2 * e0 } else { s.emax };
    if window <= -e0 {
        return Err(QSeriesError::EmptyWindow);
    }
    let mut acc = QSeries::<T> {
        h: s.h,
        emin: window,
        emax: window,
        coeffs: BTreeMap::new(),
    };
    if let Some(c) = ell.coeffs.get(&-1) {
        acc = acc.add(&s.invert()?.scale(c));
    }
    if let Some(c) = ell.coeffs.get(&0) {
        acc = acc.add(&QSeries::from_terms(s.h, window, [(0, c.clone())])?);
    }
    let mut power = s.truncated(window);
    let mut k = 1i64;
    loop {
        if let Some(c) = ell.coeffs.get(&k) {
            acc = acc.add(&power.scale(c));
        }
        if ell.coeffs.range(k + 1..).next().is_none() {
            break;
        }
        // Powers beyond the window contribute nothing.
        if sat_mul(e0, k + 1) >= window {
            break;
        }
        power = power.mul(s).truncated(window);
        k += 1;
    }
    Ok(acc.with_emax_pub(window).normalized())
}

fn sat_add(a: i64, b: i64) -> i64 {
    a.saturating_add(b).min(WINDOW_MAX)
}

fn sat_mul(a: i64, k: i64) -> i64 {
    a.saturating_mul(k).clamp(-WINDOW_MAX, WINDOW_MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;
    use num_rational::BigRational;

    type RS = QSeries<BigRational>;

    fn q_pow(e: i64) -> RS {
        RS::monomial(1, e, rat(1, 1))
    }

    #[test]
    fn add_cancellation() {
        // (q^-1 + 2q) + (-q^-1 + q) = 3q
        let a = q_pow(-1).add(&q_pow(1).scale(&rat(2, 1)));
        let b = q_pow(-1).neg().add(&q_pow(1));
        let s = a.add(&b);
        assert_eq!(s.coeff(1, 1).unwrap(), rat(3, 1));
        assert_eq!(s.coeff(-1, 1).unwrap(), rat(0, 1));
        assert_eq!(s.emin(), 1, "leading zeros are trimmed");
    }

    #[test]
    fn add_identity() {
        let f = q_pow(-2).add(&q_pow(5).scale(&rat(7, 3)));
        let s = f.add(&RS::zero());
        assert!(s.agrees_with(&f));
        assert_eq!(s.emax(), f.emax());
    }

    #[test]
    fn add_mixed_grids() {
        // q^{1/11} + q on grids h=11 and h=1.
        let a = RS::monomial(11, 1, rat(1, 1));
        let b = q_pow(1);
        let s = a.add(&b);
        assert_eq!(s.grid(), 11);
        assert_eq!(s.coeff(1, 11).unwrap(), rat(1, 1));
        assert_eq!(s.coeff(1, 1).unwrap(), rat(1, 1));
    }

    #[test]
    fn mul_simple_pole() {
        let s = q_pow(-1).mul(&q_pow(1));
        assert_eq!(s.constant_term().unwrap(), rat(1, 1));
    }

    #[test]
    fn geometric_inverse() {
        // (1 - q) * (1 + q + q^2 + ...) = 1 up to truncation.
        let order = 30;
        let one_minus_q = RS::one().sub(&q_pow(1)).truncated(order);
        let geom = RS::from_terms(1, order, (0..order).map(|e| (e, rat(1, 1)))).unwrap();
        let prod = one_minus_q.mul(&geom);
        assert!(prod.agrees_with(&RS::one()));
        // And inversion reproduces the geometric series.
        let inv = one_minus_q.invert().unwrap();
        assert!(inv.agrees_with(&geom));
    }

    #[test]
    fn invert_window_bookkeeping() {
        let f = q_pow(1).add(&q_pow(2)).truncated(10);
        let inv = f.invert().unwrap();
        assert_eq!(inv.emin(), -1);
        assert_eq!(inv.emax(), 10 - 2);
        let prod = f.mul(&inv);
        assert!(prod.agrees_with(&RS::one()));
        assert!(f.coeff(10, 1).is_err(), "coefficient past window errors");
    }

    #[test]
    fn compose_pole_only() {
        // L = 1/z, s = q  ->  q^{-1}
        let ell = LaurentData::new([(-1, rat(1, 1))]);
        let s = q_pow(1).truncated(20);
        let c = compose_laurent(&ell, &s).unwrap();
        assert_eq!(c.coeff(-1, 1).unwrap(), rat(1, 1));
        assert!(c.iter().count() == 1);
    }

    #[test]
    fn compose_constant_term_is_minus_half_a2() {
        // L = 1/z, s = q + (a2/2) q^2 + ...  ->  q^{-1} - a2/2 + O(q)
        let a2 = rat(-2, 1); // the level 11 value
        let s = q_pow(1)
            .add(&q_pow(2).scale(&(a2.clone() * rat(1, 2))))
            .add(&q_pow(3).scale(&rat(-1, 3)))
            .truncated(12);
        let ell = LaurentData::new([(-1, rat(1, 1))]);
        let c = compose_laurent(&ell, &s).unwrap();
        assert_eq!(c.constant_term().unwrap(), -a2 * rat(1, 2));
    }

    #[test]
    fn compose_monomial_substitution() {
        // L = 1/z - 3 z^3, s = q  ->  q^{-1} - 3 q^3
        let ell = LaurentData::new([(-1, rat(1, 1)), (3, rat(-3, 1))]);
        let s = q_pow(1).truncated(20);
        let c = compose_laurent(&ell, &s).unwrap();
        assert_eq!(c.coeff(-1, 1).unwrap(), rat(1, 1));
        assert_eq!(c.coeff(3, 1).unwrap(), rat(-3, 1));
        assert_eq!(c.coeff(2, 1).unwrap(), rat(0, 1));
    }

    #[test]
    fn principal_part_examples() {
        let f = q_pow(-1)
            .add(&RS::constant(rat(5, 1)))
            .add(&q_pow(1).scale(&rat(7, 1)));
        let pp = f.principal_part().unwrap();
        assert_eq!(pp.constant, rat(5, 1));
        assert_eq!(pp.strictly_negative.coeff(-1, 1).unwrap(), rat(1, 1));
        assert!(pp.strictly_negative.coeff(-2, 1).unwrap().is_zero());

        let holo = q_pow(2).add(&RS::constant(rat(3, 1)));
        let pp = holo.principal_part().unwrap();
        assert!(pp.strictly_negative.is_zero_series());
        assert_eq!(pp.constant, rat(3, 1));
    }

    #[test]
    fn principal_part_fractional_grid() {
        // q^{-3/11} + q^{2/11} -> q^{-3/11}
        let f = RS::monomial(11, -3, rat(1, 1)).add(&RS::monomial(11, 2, rat(1, 1)));
        let pp = f.principal_part().unwrap();
        assert_eq!(pp.strictly_negative.coeff(-3, 11).unwrap(), rat(1, 1));
        assert!(pp.constant.is_zero());
        assert!(pp.strictly_negative.coeff(2, 11).is_err());
    }

    #[test]
    fn composition_times_s_is_one() {
        let s = q_pow(1)
            .add(&q_pow(2).scale(&rat(5, 7)))
            .add(&q_pow(4).scale(&rat(-3, 2)))
            .truncated(25);
        let ell = LaurentData::new([(-1, rat(1, 1))]);
        let c = compose_laurent(&ell, &s).unwrap();
        assert!(c.mul(&s).agrees_with(&RS::one()));
    }

    #[test]
    fn derivative_qddq_works_on_grids() {
        let f = RS::monomial(11, 3, rat(5, 1));
        let d = f.derivative_qddq();
        assert_eq!(d.coeff(3, 11).unwrap(), rat(15, 11));
    }
}
