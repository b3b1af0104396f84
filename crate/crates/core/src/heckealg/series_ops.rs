//! Coefficient-level Hecke operators on truncated series.

use crate::coeff::Coeff;
use crate::curves::gcd;
use crate::qseries::{QSeries, QSeriesError, WINDOW_MAX};

/// d^(k-1) as a ring element.
fn power_ratio<T: Coeff>(d: i64, k: i64) -> T {
    let e = k - 1;
    if e >= 0 {
        T::from_ratio(d.pow(e as u32), 1)
    } else {
        T::from_ratio(1, d.pow((-e) as u32))
    }
}

/// The m-th Hecke operator in level N and weight k on an integer-grid
/// expansion: b(n) = sum_{d | gcd(m,n), gcd(d,N)=1} d^(k-1) a(m n / d^2).
/// The validity window shrinks to floor(E_max / m).
pub fn apply_hecke<T: Coeff>(
    f: &QSeries<T>,
    m: u32,
    level: u32,
    weight: i64,
) -> Result<QSeries<T>, QSeriesError> {
    assert!(m >= 1);
    if f.grid() != 1 {
        return Err(QSeriesError::InvalidGrid(f.grid()));
    }
    let m_i = m as i64;
    let emax = if f.emax() >= WINDOW_MAX {
        WINDOW_MAX
    } else {
        f.emax().div_euclid(m_i)
    };
    let emin = if f.emin() >= WINDOW_MAX {
        WINDOW_MAX
    } else {
        f.emin().min(0) * m_i
    };
    if emax <= emin {
        return Err(QSeriesError::EmptyWindow);
    }
    let mut terms: Vec<(i64, T)> = Vec::new();
    for n in emin..emax {
        let mut acc = T::zero();
        let g = if n == 0 {
            m_i
        } else {
            gcd(m as u64, n.unsigned_abs()) as i64
        };
        for d in 1..=g {
            if g % d != 0 || gcd(d as u64, level as u64) != 1 {
                continue;
            }
            let idx = m_i * n / (d * d);
            let a = f.coeff(idx, 1)?;
            if !a.is_zero() {
                acc = acc.add(&power_ratio::<T>(d, weight).mul(&a));
            }
        }
        if !acc.is_zero() {
            terms.push((n, acc));
        }
    }
    QSeries::from_terms(1, emax, terms)
}

/// (f|U_m): keep coefficients whose scaled exponent is divisible by m and
/// divide the exponent.
pub fn apply_u<T: Coeff>(f: &QSeries<T>, m: u32) -> QSeries<T> {
    assert!(m >= 1);
    let m_i = m as i64;
    let emax = if f.emax() >= WINDOW_MAX {
        WINDOW_MAX
    } else {
        // coefficient at x needs m x < emax
        f.emax().div_euclid(m_i) + if f.emax().rem_euclid(m_i) == 0 { 0 } else { 1 }
    };
    let terms = f
        .iter()
        .filter(|(e, _)| e % m_i == 0)
        .map(|(e, c)| (e / m_i, c.clone()));
    QSeries::from_terms(f.grid(), emax, terms).expect("U window")
}

/// (f|B_m)(tau) = f(m tau): exponents are multiplied by m.
pub fn apply_b<T: Coeff>(f: &QSeries<T>, m: u32) -> QSeries<T> {
    assert!(m >= 1);
    f.stretch_exponents(m as i64)
}
