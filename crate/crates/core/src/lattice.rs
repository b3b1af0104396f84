//! Period lattices of the embedded curves and the completed Weierstrass
//! zeta function.
//!
//! Periods come from the arithmetic-geometric mean applied to the roots of
//! 4x^3 - g2 x - g3. The real period is pi / M(sqrt(e1-e3), sqrt(e1-e2)),
//! which follows from Gauss's evaluation of int dt / sqrt(t(t^2+pt+q)) and
//! holds for one real root as well once the AGM takes the right square
//! root branch at every step. The second generator is certified rather
//! than trusted: a candidate basis is accepted only when the weight 4 and
//! 6 Eisenstein series of the candidate lattice reproduce g2/60 and g3/140
//! through the (independent) E4/E6 q-expansions.
//!
//! Quasi-periods are eta_i = 2 zeta(omega_i / 2), where zeta is evaluated
//! by its Laurent series after argument halving through the duplication
//! law. The completion constants (s, c) making
//! zeta_hat(z) = zeta(z) - s z - c conj(z) lattice-periodic solve the
//! 2x2 system s omega_i + c conj(omega_i) = eta_i; c must come out as
//! pi / covolume, which is asserted.

use num_complex::Complex64;
use thiserror::Error;

use crate::coeff::rat_to_f64;
use crate::curves::EllipticCurveModel;

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("AGM did not converge")]
    AgmNonConvergence,
    #[error("no period basis passed the Eisenstein round-trip certificate")]
    NoCertifiedBasis,
    #[error("evaluation point within {0:e} of a lattice point")]
    TooCloseToLattice(f64),
    #[error("quasi-period system is singular")]
    SingularSystem,
    #[error("completion constant check failed: |c - pi/A| = {0:e}")]
    CompletionMismatch(f64),
    #[error("Legendre relation residual {0:e} too large")]
    LegendreFailure(f64),
    #[error("n_max must be at least 2")]
    BadLaurentOrder,
}

/// Period lattice with quasi-periods, Laurent data and completion
/// constants of the completed zeta function.
#[derive(Debug, Clone)]
pub struct PeriodLattice {
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub eta1: Complex64,
    pub eta2: Complex64,
    /// Covolume |Im(conj(omega1) omega2)|.
    pub covolume: f64,
    pub g2: f64,
    pub g3: f64,
    /// G_4, G_6, ... indexed so that `g_coeffs[k]` is G_{2k+4}.
    g_coeffs: Vec<f64>,
    /// Completion coefficient of z; equals G_2^*(Lambda).
    pub g2_star: Complex64,
    /// Completion coefficient of conj(z); equals pi / covolume.
    pub zbar_coeff: f64,
    /// Shortest nonzero lattice vector length.
    pub lambda_min: f64,
}

impl PeriodLattice {
    /// G_{2n} for n >= 2 from the stored Laurent data.
    pub fn eisenstein(&self, n: usize) -> f64 {
        assert!(n >= 2, "Eisenstein weight starts at 4");
        self.g_coeffs[n - 2]
    }

    pub fn laurent_order(&self) -> usize {
        self.g_coeffs.len() + 1
    }

    /// Real period (omega1 is real by construction).
    pub fn real_period(&self) -> f64 {
        self.omega1.re
    }

    /// The completion constants (s, c) with
    /// zeta_hat(z) = zeta(z) - s z - c conj(z); s is G_2^*(Lambda) and
    /// c equals pi over the covolume.
    pub fn completion_constants(&self) -> (Complex64, f64) {
        (self.g2_star, self.zbar_coeff)
    }

    /// G_4 .. G_{2 n_max} recomputed from this lattice's invariants.
    pub fn eisenstein_g2n(&self, n_max: usize) -> Result<Vec<f64>, LatticeError> {
        eisenstein_g2n(self.g2, self.g3, n_max)
    }
}

/// G_4 .. G_{2 n_max} by the differential-equation recursion. Writing
/// wp = z^-2 + sum_{k>=1} c_k z^{2k}, the seeds are c_1 = g2/20,
/// c_2 = g3/28 and wp'' = 6 wp^2 - g2/2 forces
/// c_k = 3/((2k+3)(k-2)) sum_{m=1}^{k-2} c_m c_{k-1-m} for k >= 3;
/// G_{2k+2} = c_k / (2k+1).
pub fn eisenstein_g2n(g2: f64, g3: f64, n_max: usize) -> Result<Vec<f64>, LatticeError> {
    if n_max < 2 {
        return Err(LatticeError::BadLaurentOrder);
    }
    let kmax = n_max - 1; // c_1 .. c_kmax give G_4 .. G_{2 n_max}
    let mut c = vec![0.0f64; kmax + 1];
    if kmax >= 1 {
        c[1] = g2 / 20.0;
    }
    if kmax >= 2 {
        c[2] = g3 / 28.0;
    }
    for k in 3..=kmax {
        let mut s = 0.0;
        for m in 1..=(k - 2) {
            s += c[m] * c[k - 1 - m];
        }
        c[k] = 3.0 * s / (((2 * k + 3) * (k - 2)) as f64);
    }
    Ok((1..=kmax).map(|k| c[k] / (2 * k + 1) as f64).collect())
}

/// Right-choice complex AGM.
fn agm(mut a: Complex64, mut b: Complex64) -> Result<Complex64, LatticeError> {
    for _ in 0..64 {
        if (a - b).norm() <= 4e-16 * a.norm().max(b.norm()) {
            return Ok((a + b) / 2.0);
        }
        let a1 = (a + b) / 2.0;
        let mut b1 = (a * b).sqrt();
        // Pick the branch with |a1 - b1| <= |a1 + b1|, ties toward
        // Im(b1/a1) > 0.
        let d_plus = (a1 - b1).norm();
        let d_minus = (a1 + b1).norm();
        if d_plus > d_minus || (d_plus == d_minus && (b1 / a1).im < 0.0) {
            b1 = -b1;
        }
        a = a1;
        b = b1;
    }
    Err(LatticeError::AgmNonConvergence)
}

/// Roots of 4x^3 - g2 x - g3, Newton-polished.
fn cubic_roots(g2: f64, g3: f64) -> [Complex64; 3] {
    // Depressed monic form x^3 + p x + q with p = -g2/4, q = -g3/4.
    let p = -g2 / 4.0;
    let q = -g3 / 4.0;
    let disc = -4.0 * p * p * p - 27.0 * q * q;
    let mut roots = if disc >= 0.0 {
        // Three real roots; trigonometric form.
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        [0usize, 1, 2].map(|k| Complex64::new(m * (theta - 2.0 * PI * k as f64 / 3.0).cos(), 0.0))
    } else {
        // One real root via Cardano, then the conjugate pair.
        let half_q = q / 2.0;
        let rad = (half_q * half_q + p * p * p / 27.0).sqrt();
        let u = (-half_q + rad).cbrt();
        let v = if u.abs() > 1e-300 {
            -p / (3.0 * u)
        } else {
            0.0
        };
        let r0 = u + v;
        // Remaining quadratic x^2 + r0 x + (r0^2 + p).
        let disc2 = Complex64::new(r0 * r0 - 4.0 * (r0 * r0 + p), 0.0).sqrt();
        [
            Complex64::new(r0, 0.0),
            (-Complex64::new(r0, 0.0) + disc2) / 2.0,
            (-Complex64::new(r0, 0.0) - disc2) / 2.0,
        ]
    };
    // Newton polish on 4x^3 - g2 x - g3.
    for r in roots.iter_mut() {
        for _ in 0..8 {
            let f = 4.0 * *r * *r * *r - g2 * *r - g3;
            let df = 12.0 * *r * *r - g2;
            if df.norm() < 1e-300 {
                break;
            }
            *r -= f / df;
        }
    }
    roots
}

/// E4 and E6 at tau via q-expansions after SL2(Z) reduction; returns
/// (E4(tau), E6(tau)) with the automorphy factors already applied, i.e.
/// the honest values at the given tau.
fn eisenstein_e4_e6(mut tau: Complex64) -> (Complex64, Complex64) {
    let mut j = Complex64::new(1.0, 0.0);
    for _ in 0..256 {
        let n = tau.re.round();
        tau.re -= n;
        if tau.norm() >= 1.0 - 1e-14 {
            break;
        }
        j *= tau;
        tau = -1.0 / tau;
    }
    let q = (Complex64::new(0.0, 2.0 * PI) * tau).exp();
    let mut e4 = Complex64::new(1.0, 0.0);
    let mut e6 = Complex64::new(1.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    for n in 1..64i64 {
        qn *= q;
        let (s3, s5) = sigma_3_5(n as u64);
        e4 += 240.0 * s3 as f64 * qn;
        e6 -= 504.0 * s5 as f64 * qn;
    }
    let j4 = j.powi(4);
    let j6 = j.powi(6);
    (e4 / j4, e6 / j6)
}

fn sigma_3_5(n: u64) -> (u64, u64) {
    let mut s3 = 0;
    let mut s5 = 0;
    for d in crate::curves::divisors(n) {
        s3 += d.pow(3);
        s5 += d.pow(5);
    }
    (s3, s5)
}

/// G_4 and G_6 of the lattice spanned by a basis, through the modular
/// E4/E6 q-expansions. Independent of the Laurent recursion, so it serves
/// as the round-trip certificate for candidate period bases.
pub fn eisenstein_g4_g6_from_basis(
    omega1: Complex64,
    omega2: Complex64,
) -> Option<(Complex64, Complex64)> {
    if omega1.norm() < 1e-12 {
        return None;
    }
    let tau = omega2 / omega1;
    if tau.im <= 1e-12 {
        return None;
    }
    let (e4, e6) = eisenstein_e4_e6(tau);
    let g4 = PI.powi(4) / 45.0 * e4 / omega1.powi(4);
    let g6 = 2.0 * PI.powi(6) / 945.0 * e6 / omega1.powi(6);
    Some((g4, g6))
}

/// Certificate: the candidate basis reproduces g2 and g3 through the
/// weight 4/6 Eisenstein q-series.
fn certify_basis(omega1: Complex64, omega2: Complex64, g2: f64, g3: f64) -> bool {
    let Some((g4, g6)) = eisenstein_g4_g6_from_basis(omega1, omega2) else {
        return false;
    };
    let r2 = (60.0 * g4 - g2).norm() / g2.abs().max(1.0);
    let r3 = (140.0 * g6 - g3).norm() / g3.abs().max(1.0);
    r2 < 1e-9 && r3 < 1e-9
}

/// Compute the period lattice of the short model y^2 = 4x^3 - g2 x - g3.
pub fn compute_periods(model: &EllipticCurveModel) -> Result<PeriodLattice, LatticeError> {
    let (g2r, g3r) = model.short_invariants();
    let g2 = rat_to_f64(&g2r);
    let g3 = rat_to_f64(&g3r);
    let roots = cubic_roots(g2, g3);

    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut certified: Option<(Complex64, Complex64)> = None;
    'outer: for perm in perms {
        let (e1, e2, e3) = (roots[perm[0]], roots[perm[1]], roots[perm[2]]);
        let sa = (e1 - e3).sqrt();
        let sb = (e1 - e2).sqrt();
        let sc = (e2 - e3).sqrt();
        let Ok(m1) = agm(sa, sb) else { continue };
        let Ok(m2) = agm(sa, sc) else { continue };
        if m1.norm() < 1e-12 || m2.norm() < 1e-12 {
            continue;
        }
        let w_a = Complex64::new(PI, 0.0) / m1;
        let w_b = Complex64::new(0.0, PI) / m2;
        // In the rhombic (one real root) case the two AGM values can be a
        // conjugate pair of lattice vectors whose sum is the real period,
        // so real-period candidates include the sum and difference.
        for first in [w_a, w_b, w_a + w_b, w_a - w_b] {
            if first.norm() < 1e-12 || first.im.abs() > 1e-9 * first.norm() {
                continue;
            }
            let omega1 = Complex64::new(first.re.abs(), 0.0);
            for second in [w_a, w_b, (omega1 + w_a) / 2.0, (omega1 + w_b) / 2.0] {
                let mut omega2 = second;
                if (omega2 / omega1).im.abs() < 1e-12 {
                    continue;
                }
                if (omega2 / omega1).im < 0.0 {
                    omega2 = -omega2;
                }
                // Reduce the real part of tau.
                let shift = (omega2 / omega1).re.round();
                omega2 -= shift * omega1;
                if certify_basis(omega1, omega2, g2, g3) {
                    certified = Some((omega1, omega2));
                    break 'outer;
                }
            }
        }
    }
    let (omega1, omega2) = certified.ok_or(LatticeError::NoCertifiedBasis)?;

    let covolume = (omega1.conj() * omega2).im.abs();
    let mut lambda_min = f64::INFINITY;
    for m in -3i64..=3 {
        for n in -3i64..=3 {
            if m == 0 && n == 0 {
                continue;
            }
            let v = m as f64 * omega1 + n as f64 * omega2;
            lambda_min = lambda_min.min(v.norm());
        }
    }

    let g_coeffs = eisenstein_g2n(g2, g3, 40)?;
    let mut lattice = PeriodLattice {
        omega1,
        omega2,
        eta1: Complex64::new(0.0, 0.0),
        eta2: Complex64::new(0.0, 0.0),
        covolume,
        g2,
        g3,
        g_coeffs,
        g2_star: Complex64::new(0.0, 0.0),
        zbar_coeff: 0.0,
        lambda_min,
    };

    // Quasi-periods eta_i = 2 zeta(omega_i / 2) before any eta-shifted
    // reduction is available.
    lattice.eta1 = 2.0 * eval_pz_zeta(&lattice, omega1 / 2.0, 0)?.2;
    lattice.eta2 = 2.0 * eval_pz_zeta(&lattice, omega2 / 2.0, 0)?.2;

    let legendre = lattice.eta1 * omega2 - lattice.eta2 * omega1;
    let residual = (legendre.norm() - 2.0 * PI).abs();
    if residual > 1e-10 * (1.0 + legendre.norm()) {
        return Err(LatticeError::LegendreFailure(residual));
    }

    // Completion constants from s omega_i + c conj(omega_i) = eta_i.
    let det = omega1 * omega2.conj() - omega1.conj() * omega2;
    if det.norm() < 1e-14 {
        return Err(LatticeError::SingularSystem);
    }
    let s = (lattice.eta1 * omega2.conj() - lattice.eta2 * omega1.conj()) / det;
    let c = (omega1 * lattice.eta2 - omega2 * lattice.eta1) / det;
    let c_expected = PI / covolume;
    let c_err = (c - c_expected).norm();
    if c_err > 1e-9 * c_expected.max(1.0) {
        return Err(LatticeError::CompletionMismatch(c_err));
    }
    lattice.g2_star = s;
    lattice.zbar_coeff = c.re;
    Ok(lattice)
}

/// Reduce z modulo the lattice into the centered fundamental cell;
/// returns (reduced point, m, n) with z = z_red + m omega1 + n omega2.
pub(crate) fn lattice_reduce(l: &PeriodLattice, z: Complex64) -> (Complex64, i64, i64) {
    let det = l.omega1.re * l.omega2.im - l.omega1.im * l.omega2.re;
    let a = (z.re * l.omega2.im - z.im * l.omega2.re) / det;
    let b = (l.omega1.re * z.im - l.omega1.im * z.re) / det;
    let m = a.round() as i64;
    let n = b.round() as i64;
    (z - m as f64 * l.omega1 - n as f64 * l.omega2, m, n)
}

/// Laurent evaluation of (wp, wp', zeta) inside the convergence disk.
fn laurent_base(l: &PeriodLattice, z: Complex64) -> (Complex64, Complex64, Complex64) {
    let z2 = z * z;
    let mut p = 1.0 / z2;
    let mut pp = -2.0 / (z2 * z);
    let mut zeta = 1.0 / z;
    // wp = z^-2 + sum c_k z^{2k}, c_k = (2k+1) G_{2k+2}.
    let mut zpow = z; // z^{2k-1}
    for (idx, g) in l.g_coeffs.iter().enumerate() {
        let k = idx as i64 + 1;
        let c_k = (2 * k + 1) as f64 * g;
        zpow = zpow * z2; // now z^{2k+1}
        let term_z = g * zpow; // G_{2k+2} z^{2k+1}
        zeta -= term_z;
        p += c_k * zpow / z;
        pp += c_k * (2 * k) as f64 * zpow / z2;
    }
    (p, pp, zeta)
}

/// (wp, wp', zeta) at z by halving into the Laurent disk and doubling
/// back with the duplication law; `extra_halvings` forces additional
/// steps, which the duplication-consistency check exercises.
pub(crate) fn eval_pz_zeta(
    l: &PeriodLattice,
    z: Complex64,
    extra_halvings: u32,
) -> Result<(Complex64, Complex64, Complex64), LatticeError> {
    if z.norm() < 1e-8 * l.lambda_min {
        return Err(LatticeError::TooCloseToLattice(z.norm()));
    }
    let radius = 0.45 * l.lambda_min;
    let mut k = 0u32;
    let mut base = z;
    while base.norm() >= radius {
        base /= 2.0;
        k += 1;
    }
    for _ in 0..extra_halvings {
        base /= 2.0;
        k += 1;
    }
    let (mut p, mut pp, mut zeta) = laurent_base(l, base);
    for _ in 0..k {
        // s = wp'' / (2 wp') with wp'' = 6 wp^2 - g2/2.
        if pp.norm() < 1e-280 {
            return Err(LatticeError::TooCloseToLattice(pp.norm()));
        }
        let s = (6.0 * p * p - l.g2 / 2.0) / (2.0 * pp);
        let zeta2 = 2.0 * zeta + s;
        let p2 = s * s - 2.0 * p;
        let pp2 = s * (6.0 * p - 2.0 * s * s) - pp;
        p = p2;
        pp = pp2;
        zeta = zeta2;
    }
    Ok((p, pp, zeta))
}

/// Weierstrass zeta at z, reduced through the lattice with eta-shifts.
pub fn weierstrass_zeta_eval(l: &PeriodLattice, z: Complex64) -> Result<Complex64, LatticeError> {
    weierstrass_zeta_eval_inner(l, z, 0)
}

pub(crate) fn weierstrass_zeta_eval_inner(
    l: &PeriodLattice,
    z: Complex64,
    extra_halvings: u32,
) -> Result<Complex64, LatticeError> {
    let (zr, m, n) = lattice_reduce(l, z);
    if zr.norm() < 1e-8 {
        return Err(LatticeError::TooCloseToLattice(zr.norm()));
    }
    let (_, _, zeta) = eval_pz_zeta(l, zr, extra_halvings)?;
    Ok(zeta + m as f64 * l.eta1 + n as f64 * l.eta2)
}

/// Completed zeta: zeta(z) - s z - c conj(z); lattice-periodic.
pub fn completed_zeta_eval(l: &PeriodLattice, z: Complex64) -> Result<Complex64, LatticeError> {
    let zeta = weierstrass_zeta_eval(l, z)?;
    Ok(zeta - l.g2_star * z - l.zbar_coeff * z.conj())
}

/// Weierstrass wp at z (used by the eta and invariance diagnostics).
pub fn weierstrass_p_eval(l: &PeriodLattice, z: Complex64) -> Result<Complex64, LatticeError> {
    let (zr, _, _) = lattice_reduce(l, z);
    if zr.norm() < 1e-8 {
        return Err(LatticeError::TooCloseToLattice(zr.norm()));
    }
    Ok(eval_pz_zeta(l, zr, 0)?.0)
}

/// Truncated lattice sum  sum' omega^{-2n}  with a crude but safe tail
/// bound; the independent oracle for the higher Laurent coefficients.
pub fn eisenstein_direct_sum(l: &PeriodLattice, two_n: u32, index_bound: i64) -> (Complex64, f64) {
    let mut acc = Complex64::new(0.0, 0.0);
    // Sum in growing shells so cancellation happens early.
    for shell in 1..=index_bound {
        let mut shell_sum = Complex64::new(0.0, 0.0);
        for m in -shell..=shell {
            for n in -shell..=shell {
                if m.abs().max(n.abs()) != shell {
                    continue;
                }
                let w = m as f64 * l.omega1 + n as f64 * l.omega2;
                shell_sum += w.powi(-(two_n as i32));
            }
        }
        acc += shell_sum;
    }
    // Everything outside the ball of radius r contributes at most about
    // 2 pi / covolume * r^{2-2n} / (2n-2), padded by 4.
    let r = index_bound as f64 * l.lambda_min * 0.5;
    let tail = 4.0 * 2.0 * PI / l.covolume * r.powi(2 - two_n as i32) / (2.0 * two_n as f64 - 2.0);
    (acc, tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{l_value_at_1, newform_coefficients, EllipticCurveModel, LEVELS};

    fn lattice_for(level: u32) -> PeriodLattice {
        let m = EllipticCurveModel::for_level(level).unwrap();
        compute_periods(&m).unwrap()
    }

    #[test]
    fn eisenstein_recursion_seeds() {
        let g = eisenstein_g2n(120.0, 280.0, 5).unwrap();
        assert!((g[0] - 2.0).abs() < 1e-12); // g2/60
        assert!((g[1] - 2.0).abs() < 1e-12); // g3/140
                                             // G8 = 3/7 G4^2 and G10 = 5/11 G4 G6.
        assert!((g[2] - 3.0 / 7.0 * g[0] * g[0]).abs() < 1e-12);
        assert!((g[3] - 5.0 / 11.0 * g[0] * g[1]).abs() < 1e-12);
    }

    #[test]
    fn lemniscatic_period() {
        // g2 = 4, g3 = 0: omega1 is the lemniscate constant 2.62205755...
        let roots = cubic_roots(4.0, 0.0);
        let mut re: Vec<f64> = roots.iter().map(|r| r.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[2] - 1.0).abs() < 1e-12);
        assert!((re[0] + 1.0).abs() < 1e-12);
        let m = agm(Complex64::new(2f64.sqrt(), 0.0), Complex64::new(1.0, 0.0)).unwrap();
        let omega = PI / m.re;
        assert!((omega - 2.6220575542921198).abs() < 1e-12);
    }

    #[test]
    fn all_levels_construct() {
        for level in LEVELS {
            let l = lattice_for(level);
            assert!(l.covolume > 0.0, "level {level}");
            assert!(l.real_period() > 0.0);
            assert!((l.omega2 / l.omega1).im > 0.0);
        }
    }

    #[test]
    fn level_11_real_period() {
        let l = lattice_for(11);
        assert!((l.real_period() - 1.2692093042795).abs() < 1e-6);
        // L(E,1)/omega1 should be the rational 1/5.
        let m = EllipticCurveModel::for_level(11).unwrap();
        let nf = newform_coefficients(&m, 300).unwrap();
        let lv = l_value_at_1(&nf).unwrap();
        let ratio = lv.value / l.real_period();
        assert!((ratio - 0.2).abs() < 1e-9, "ratio {ratio}");
    }

    #[test]
    fn legendre_relation_all_levels() {
        for level in LEVELS {
            let l = lattice_for(level);
            let leg = l.eta1 * l.omega2 - l.eta2 * l.omega1;
            assert!(
                (leg.norm() - 2.0 * PI).abs() < 1e-10,
                "level {level}: {leg}"
            );
        }
    }

    #[test]
    fn completion_constant_is_pi_over_covolume() {
        for level in LEVELS {
            let l = lattice_for(level);
            assert!((l.zbar_coeff - PI / l.covolume).abs() < 1e-9);
            // For our conjugation-stable lattices G_2^* is real.
            assert!(l.g2_star.im.abs() < 1e-9, "level {level}");
        }
    }

    #[test]
    fn zeta_oddness_and_quasi_periodicity() {
        let l = lattice_for(11);
        let z = Complex64::new(0.31, 0.17);
        let a = weierstrass_zeta_eval(&l, z).unwrap();
        let b = weierstrass_zeta_eval(&l, -z).unwrap();
        assert!((a + b).norm() < 1e-11);
        let c = weierstrass_zeta_eval(&l, z + l.omega1).unwrap();
        assert!((c - a - l.eta1).norm() < 1e-10);
        // zeta(omega1/2) = eta1/2 by oddness plus quasi-periodicity.
        let h = weierstrass_zeta_eval(&l, l.omega1 / 2.0).unwrap();
        assert!((h - l.eta1 / 2.0).norm() < 1e-10);
    }

    #[test]
    fn completed_zeta_periodicity_level_11() {
        use rand::{Rng, SeedableRng};
        let l = lattice_for(11);
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let z = Complex64::new(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8));
            if lattice_reduce(&l, z).0.norm() < 1e-3 {
                continue;
            }
            let v = completed_zeta_eval(&l, z).unwrap();
            for w in [l.omega1, l.omega2] {
                let v2 = completed_zeta_eval(&l, z + w).unwrap();
                assert!((v - v2).norm() < 1e-10, "z {z}, w {w}");
            }
        }
    }

    #[test]
    fn duplication_consistency() {
        let l = lattice_for(14);
        let z = Complex64::new(0.4, 0.21);
        let a = weierstrass_zeta_eval_inner(&l, z, 0).unwrap();
        let b = weierstrass_zeta_eval_inner(&l, z, 1).unwrap();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn higher_eisenstein_vs_lattice_sum() {
        let l = lattice_for(11);
        for n in [4u32, 5] {
            let (direct, tail) = eisenstein_direct_sum(&l, 2 * n, 120);
            let stored = l.eisenstein(n as usize);
            assert!(
                (direct.re - stored).abs() < 1e-8 + tail,
                "G_{}: {} vs {}",
                2 * n,
                direct.re,
                stored
            );
            assert!(direct.im.abs() < 1e-10);
        }
    }

    #[test]
    fn round_trip_g2_g3() {
        // The AGM periods must reproduce g2, g3 through the independent
        // E4/E6 route (this also certifies the basis is not a sublattice).
        for level in LEVELS {
            let l = lattice_for(level);
            let (g4, g6) = eisenstein_g4_g6_from_basis(l.omega1, l.omega2).unwrap();
            assert!((60.0 * g4 - l.g2).norm() <= 1e-9 * l.g2.abs().max(1.0));
            assert!((140.0 * g6 - l.g3).norm() <= 1e-9 * l.g3.abs().max(1.0));
        }
    }
}
