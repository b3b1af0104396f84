//! Principal parts and constant terms at every cusp, and their transport
//! through the operator calculus.
//!
//! For square-free N the Atkin-Lehner involutions act transitively on the
//! cusps of Gamma_0(N), so cusps are indexed by exact divisors Q | N: the
//! slot Q holds the integer-grid expansion data of f|W_Q at infinity
//! (finitely many pole coefficients plus a symbolic constant term). A
//! harmonic Maass form of weight 0 with no pole in the upper half-plane
//! is determined by this data up to one global additive constant, which
//! is all the dimension-formula pipelines need.
//!
//! Transport rules, each an exact consequence of the Atkin-Lehner
//! relations:
//!   W_R     slot permutation  Q -> (R*Q)/gcd(R,Q)^2,
//!   T_m     (gcd(m,N)=1) slotwise coefficient transform,
//!   U_p     (p | N) slotwise for p not dividing Q, and for Q = p Q0
//!           slot' = (slot[Q0]|U_p)|B_p + (1/p) slot[pQ0]|B_p - (1/p) slot[Q0],
//!   B_d     level M -> Md, slot'[Q] = slot[Q/g]|B_{d/g}, g = gcd(Q, d).
//! T_m with gcd(m,N) > 1 is normalized to a coprime Hecke atom composed
//! with U_{p^a} factors. Anything outside these rules is reported as an
//! error, never approximated.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use crate::coeff::{rat, Coeff};
use crate::curves::{divisors, gcd, prime_factors, sigma};

use super::symconst::{ConstSym, SymbolicConstant};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeckeAlgError {
    #[error("level {0} is not square-free")]
    NotSquareFree(u32),
    #[error("{q} is not an exact divisor of level {n}")]
    NotExactDivisor { q: u32, n: u32 },
    #[error("unsupported operator interaction: {0}")]
    Unsupported(String),
    #[error("cusp data at levels {0} and {1} cannot be combined")]
    LevelMismatch(u32, u32),
    #[error("constant terms requested from data only valid up to additive constants")]
    ConstantsNotTracked,
    #[error("descend consistency check failed at slot {0}")]
    DescendInconsistent(u32),
    #[error("principal part assertion failed: {0}")]
    PrincipalPartMismatch(String),
    #[error("cannot parse operator word at `{0}`")]
    WordParse(String),
}

/// Integer-grid expansion data of f|W_Q at infinity: pole coefficients at
/// strictly negative exponents plus a symbolic constant term.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SlotExpansion {
    pub poles: BTreeMap<i64, BigRational>,
    pub constant: SymbolicConstant,
}

impl SlotExpansion {
    fn add(&self, rhs: &Self) -> Self {
        let mut poles = self.poles.clone();
        for (e, c) in &rhs.poles {
            let entry = poles.entry(*e).or_insert_with(|| rat(0, 1));
            *entry = &*entry + c;
        }
        poles.retain(|_, c| !Coeff::is_zero(c));
        SlotExpansion {
            poles,
            constant: self.constant.add(&rhs.constant),
        }
    }

    fn scale(&self, c: &BigRational) -> Self {
        let mut poles: BTreeMap<i64, BigRational> =
            self.poles.iter().map(|(e, v)| (*e, v * c)).collect();
        poles.retain(|_, v| !Coeff::is_zero(v));
        SlotExpansion {
            poles,
            constant: self.constant.scale(c),
        }
    }

    /// q -> q^k on the expansion.
    fn stretch(&self, k: u32) -> Self {
        SlotExpansion {
            poles: self
                .poles
                .iter()
                .map(|(e, c)| (e * k as i64, c.clone()))
                .collect(),
            constant: self.constant.clone(),
        }
    }

    /// U_m on the expansion: keep exponents divisible by m.
    fn pick_multiples(&self, m: u32) -> Self {
        SlotExpansion {
            poles: self
                .poles
                .iter()
                .filter(|(e, _)| *e % m as i64 == 0)
                .map(|(e, c)| (e / m as i64, c.clone()))
                .collect(),
            constant: self.constant.clone(),
        }
    }

    /// Coefficient transform of T_m for gcd(m, N) = 1, weight 0:
    /// poles via b(n) = sum_{d | gcd(m,|n|)} (1/d) a(m n / d^2), constant
    /// times sigma(m)/m.
    fn hecke_coprime(&self, m: u32) -> Self {
        let mut poles: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (e, c) in &self.poles {
            // a(e) feeds b(n) whenever m n / d^2 = e with d | gcd(m, n):
            // n = e d^2 / m needs d^2 == 0 mod m/gcd... enumerate d | m.
            for d in divisors(m as u64) {
                let d = d as i64;
                if (e * d * d) % m as i64 != 0 {
                    continue;
                }
                let n = e * d * d / m as i64;
                if gcd(m as u64, n.unsigned_abs()) % d.unsigned_abs() != 0 {
                    continue;
                }
                let entry = poles.entry(n).or_insert_with(|| rat(0, 1));
                *entry = &*entry + c * rat(1, d);
            }
        }
        poles.retain(|_, v| !Coeff::is_zero(v));
        SlotExpansion {
            poles,
            constant: self.constant.scale(&rat(sigma(m as u64) as i64, m as i64)),
        }
    }

    fn is_pole_free(&self) -> bool {
        self.poles.is_empty()
    }
}

/// Cusp data of a weight-0 form for Gamma_0(level), level square-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuspData {
    level: u32,
    slots: BTreeMap<u32, SlotExpansion>,
    /// False when the constant terms are only defined up to one global
    /// additive constant (Poincare-series models); principal parts stay
    /// exact either way.
    constants_valid: bool,
}

fn require_square_free(level: u32) -> Result<(), HeckeAlgError> {
    let mut n = level as u64;
    for p in prime_factors(level as u64) {
        let mut count = 0;
        while n % p == 0 {
            n /= p;
            count += 1;
        }
        if count > 1 {
            return Err(HeckeAlgError::NotSquareFree(level));
        }
    }
    Ok(())
}

/// Product of exact divisors in the Atkin-Lehner group: (a*b)/gcd(a,b)^2.
fn al_product(a: u32, b: u32) -> u32 {
    let g = gcd(a as u64, b as u64) as u32;
    a / g * (b / g)
}

impl CuspData {
    pub fn zero(level: u32) -> Result<Self, HeckeAlgError> {
        require_square_free(level)?;
        let slots = divisors(level as u64)
            .into_iter()
            .map(|q| (q as u32, SlotExpansion::default()))
            .collect();
        Ok(CuspData {
            level,
            slots,
            constants_valid: true,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn constants_valid(&self) -> bool {
        self.constants_valid
    }

    pub fn slot(&self, q: u32) -> Result<&SlotExpansion, HeckeAlgError> {
        self.slots
            .get(&q)
            .ok_or(HeckeAlgError::NotExactDivisor { q, n: self.level })
    }

    pub fn slots(&self) -> impl Iterator<Item = (u32, &SlotExpansion)> {
        self.slots.iter().map(|(q, s)| (*q, s))
    }

    /// Constant term at slot q; errors when constants are ambiguous.
    pub fn constant(&self, q: u32) -> Result<&SymbolicConstant, HeckeAlgError> {
        if !self.constants_valid {
            return Err(HeckeAlgError::ConstantsNotTracked);
        }
        Ok(&self.slot(q)?.constant)
    }

    pub fn set_slot(&mut self, q: u32, data: SlotExpansion) {
        self.slots.insert(q, data);
    }

    pub fn mark_constants_ambiguous(&mut self) {
        self.constants_valid = false;
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, HeckeAlgError> {
        if self.level != rhs.level {
            return Err(HeckeAlgError::LevelMismatch(self.level, rhs.level));
        }
        let slots = self
            .slots
            .iter()
            .map(|(q, s)| (*q, s.add(&rhs.slots[q])))
            .collect();
        Ok(CuspData {
            level: self.level,
            slots,
            constants_valid: self.constants_valid && rhs.constants_valid,
        })
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        CuspData {
            level: self.level,
            slots: self.slots.iter().map(|(q, s)| (*q, s.scale(c))).collect(),
            constants_valid: self.constants_valid,
        }
    }

    /// Add a global constant (the function c * 1, constant at all cusps).
    pub fn add_global_constant(&self, c: &SymbolicConstant) -> Self {
        let slots = self
            .slots
            .iter()
            .map(|(q, s)| {
                (
                    *q,
                    SlotExpansion {
                        poles: s.poles.clone(),
                        constant: s.constant.add(c),
                    },
                )
            })
            .collect();
        CuspData {
            level: self.level,
            slots,
            constants_valid: self.constants_valid,
        }
    }

    /// Atkin-Lehner involution W_R: permutes the slots.
    pub fn apply_w(&self, r: u32) -> Result<Self, HeckeAlgError> {
        if r == 0 || self.level % r != 0 {
            return Err(HeckeAlgError::NotExactDivisor {
                q: r,
                n: self.level,
            });
        }
        let slots = self
            .slots
            .keys()
            .map(|q| (*q, self.slots[&al_product(r, *q)].clone()))
            .collect();
        Ok(CuspData {
            level: self.level,
            slots,
            constants_valid: self.constants_valid,
        })
    }

    /// U_p for a prime p dividing the level.
    pub fn apply_u_prime(&self, p: u32) -> Result<Self, HeckeAlgError> {
        if self.level % p != 0 || !crate::curves::is_prime(p as u64) {
            return Err(HeckeAlgError::Unsupported(format!(
                "U_{p} at level {}",
                self.level
            )));
        }
        let mut slots = BTreeMap::new();
        for q in self.slots.keys() {
            let s = if q % p != 0 {
                // U_p commutes with W_Q when p does not divide Q.
                self.slots[q].pick_multiples(p)
            } else {
                let q0 = q / p;
                let a = self.slots[&q0].pick_multiples(p).stretch(p);
                let b = self.slots[q].stretch(p).scale(&rat(1, p as i64));
                let c = self.slots[&q0].scale(&rat(-1, p as i64));
                a.add(&b).add(&c)
            };
            slots.insert(*q, s);
        }
        Ok(CuspData {
            level: self.level,
            slots,
            constants_valid: self.constants_valid,
        })
    }

    /// U_m for m a product of primes dividing the level.
    pub fn apply_u(&self, m: u32) -> Result<Self, HeckeAlgError> {
        let mut out = self.clone();
        let mut rest = m;
        for p in prime_factors(m as u64) {
            if self.level % p as u32 != 0 {
                return Err(HeckeAlgError::Unsupported(format!(
                    "U_{m} at level {}: prime {p} does not divide the level",
                    self.level
                )));
            }
            while rest % p as u32 == 0 {
                out = out.apply_u_prime(p as u32)?;
                rest /= p as u32;
            }
        }
        Ok(out)
    }

    /// B_d: pushes level M data to level M*d (which must be square-free).
    pub fn apply_b(&self, d: u32) -> Result<Self, HeckeAlgError> {
        if d == 0 {
            return Err(HeckeAlgError::Unsupported("B_0".into()));
        }
        let new_level = self.level * d;
        require_square_free(new_level)?;
        let mut slots = BTreeMap::new();
        for q in divisors(new_level as u64) {
            let q = q as u32;
            let g = gcd(q as u64, d as u64) as u32;
            slots.insert(q, self.slots[&(q / g)].stretch(d / g));
        }
        Ok(CuspData {
            level: new_level,
            slots,
            constants_valid: self.constants_valid,
        })
    }

    /// T_m at the ambient level: the coprime part acts slotwise, prime
    /// factors shared with the level become U-powers.
    pub fn apply_t(&self, m: u32) -> Result<Self, HeckeAlgError> {
        let mut coprime = m;
        let mut u_part = 1u32;
        for p in prime_factors(m as u64) {
            if self.level % p as u32 == 0 {
                while coprime % p as u32 == 0 {
                    coprime /= p as u32;
                    u_part *= p as u32;
                }
            }
        }
        let mut out = self.clone();
        if u_part > 1 {
            out = out.apply_u(u_part)?;
        }
        if coprime > 1 {
            let slots = out
                .slots
                .iter()
                .map(|(q, s)| (*q, s.hecke_coprime(coprime)))
                .collect();
            out = CuspData {
                level: out.level,
                slots,
                constants_valid: out.constants_valid,
            };
        }
        Ok(out)
    }

    /// Restrict data known to come from a level-M form down to level M,
    /// asserting the redundancy `slot[Q0 * R] = slot[Q0]|B_R`.
    pub fn descend(&self, m: u32) -> Result<Self, HeckeAlgError> {
        if self.level % m != 0 {
            return Err(HeckeAlgError::NotExactDivisor {
                q: m,
                n: self.level,
            });
        }
        for q in self.slots.keys() {
            let q0 = gcd(*q as u64, m as u64) as u32;
            let r = q / q0;
            if self.slots[q] != self.slots[&q0].stretch(r) {
                return Err(HeckeAlgError::DescendInconsistent(*q));
            }
        }
        let slots = divisors(m as u64)
            .into_iter()
            .map(|q| (q as u32, self.slots[&(q as u32)].clone()))
            .collect();
        Ok(CuspData {
            level: m,
            slots,
            constants_valid: self.constants_valid,
        })
    }

    pub fn apply_atom(&self, atom: &OpAtom) -> Result<Self, HeckeAlgError> {
        match atom {
            OpAtom::Hecke(m) => self.apply_t(*m),
            OpAtom::U(m) => self.apply_u(*m),
            OpAtom::B(d) => self.apply_b(*d),
            OpAtom::W(q) => self.apply_w(*q),
        }
    }

    pub fn apply_word(&self, word: &OperatorWord) -> Result<Self, HeckeAlgError> {
        let mut out = self.clone();
        for atom in &word.atoms {
            out = out.apply_atom(atom)?;
        }
        Ok(out)
    }
}

impl fmt::Display for CuspData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "level {}", self.level)?;
        for (q, s) in &self.slots {
            write!(f, "  cusp W_{q}: ")?;
            if s.poles.is_empty() {
                write!(f, "no poles")?;
            } else {
                let mut first = true;
                for (e, c) in &s.poles {
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    write!(f, "({c}) q^{e}")?;
                }
            }
            if self.constants_valid {
                writeln!(f, ", constant {}", s.constant)?;
            } else {
                writeln!(f, ", constant indeterminate")?;
            }
        }
        Ok(())
    }
}

/// A word in the operator atoms, applied left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpAtom {
    Hecke(u32),
    U(u32),
    B(u32),
    W(u32),
}

impl fmt::Display for OpAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpAtom::Hecke(m) => write!(f, "T{m}"),
            OpAtom::U(m) => write!(f, "U{m}"),
            OpAtom::B(m) => write!(f, "B{m}"),
            OpAtom::W(m) => write!(f, "W{m}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OperatorWord {
    pub atoms: Vec<OpAtom>,
}

impl OperatorWord {
    pub fn new(atoms: Vec<OpAtom>) -> Self {
        OperatorWord { atoms }
    }

    /// Parse a comma-separated word like "W11,T3,B2".
    pub fn parse(s: &str) -> Result<Self, HeckeAlgError> {
        let mut atoms = Vec::new();
        for tok in s.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            let (kind, num) = tok.split_at(1);
            let m: u32 = num
                .parse()
                .map_err(|_| HeckeAlgError::WordParse(tok.to_string()))?;
            if m == 0 {
                return Err(HeckeAlgError::WordParse(tok.to_string()));
            }
            atoms.push(match kind {
                "T" | "t" => OpAtom::Hecke(m),
                "U" | "u" => OpAtom::U(m),
                "B" | "b" => OpAtom::B(m),
                "W" | "w" => OpAtom::W(m),
                _ => return Err(HeckeAlgError::WordParse(tok.to_string())),
            });
        }
        Ok(OperatorWord { atoms })
    }
}

impl fmt::Display for OperatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Cusp data of the completed Weierstrass mock modular form Zhat_E:
/// a simple pole q^{-1} at infinity, constant c_E(0) there, and constant
/// c_{E,Q}(0) at every other cusp.
pub fn zhat_cusp_data(level: u32) -> Result<CuspData, HeckeAlgError> {
    let mut cd = CuspData::zero(level)?;
    for q in divisors(level as u64) {
        let q = q as u32;
        let mut slot = SlotExpansion {
            poles: BTreeMap::new(),
            constant: SymbolicConstant::symbol(ConstSym::CuspConstant(q)),
        };
        if q == 1 {
            slot.poles.insert(-1, rat(1, 1));
        }
        cd.set_slot(q, slot);
    }
    Ok(cd)
}

/// Cusp data of the first Maass-Poincare series P_1 at a given level:
/// simple pole at infinity only, constant terms not pinned down.
pub fn p1_cusp_data(level: u32) -> Result<CuspData, HeckeAlgError> {
    let mut cd = CuspData::zero(level)?;
    let mut slot = SlotExpansion::default();
    slot.poles.insert(-1, rat(1, 1));
    cd.set_slot(1, slot);
    cd.mark_constants_ambiguous();
    Ok(cd)
}

/// The Hecke/Atkin-Lehner combination with principal part q^{-nu} at
/// infinity and no other pole:
/// sum over d | gcd(N, nu) of (nu/d) P_1^{(N/d)} | T_{nu/d} | B_d.
/// The principal part is asserted, the constants stay ambiguous.
pub fn poincare_principal_part(nu: u32, level: u32) -> Result<CuspData, HeckeAlgError> {
    assert!(nu >= 1);
    require_square_free(level)?;
    let mut acc = CuspData::zero(level)?;
    acc.mark_constants_ambiguous();
    let g = gcd(level as u64, nu as u64) as u32;
    for d in divisors(g as u64) {
        let d = d as u32;
        let base = p1_cusp_data(level / d)?;
        let term = base
            .apply_t(nu / d)?
            .apply_b(d)?
            .scale(&rat((nu / d) as i64, 1));
        acc = acc.add(&term)?;
    }
    // Assert the defining principal part.
    let inf = acc.slot(1)?;
    let expected: BTreeMap<i64, BigRational> = [(-(nu as i64), rat(1, 1))].into();
    if inf.poles != expected {
        return Err(HeckeAlgError::PrincipalPartMismatch(format!(
            "slot 1 poles {:?}",
            inf.poles
        )));
    }
    for (q, s) in acc.slots() {
        if q != 1 && !s.is_pole_free() {
            return Err(HeckeAlgError::PrincipalPartMismatch(format!(
                "unexpected pole at slot {q}"
            )));
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ksym(q: u32) -> SymbolicConstant {
        SymbolicConstant::symbol(ConstSym::CuspConstant(q))
    }

    #[test]
    fn w_involution_restores_zhat() {
        for level in [11u32, 14, 15, 21] {
            let z = zhat_cusp_data(level).unwrap();
            for q in divisors(level as u64) {
                let back = z.apply_w(q as u32).unwrap().apply_w(q as u32).unwrap();
                assert_eq!(back, z, "W_{q}^2 at level {level}");
            }
        }
    }

    #[test]
    fn lemma_expansion_prime_case() {
        // -p * Zhat|U_p|W_p = q^{-1} - (p-1) c_E(0) - c_{E,p}(0) + O(q)
        for (level, p) in [(11u32, 11u32), (14, 2), (14, 7), (21, 3)] {
            let z = zhat_cusp_data(level).unwrap();
            let g = z
                .apply_u(p)
                .unwrap()
                .apply_w(p)
                .unwrap()
                .scale(&rat(-(p as i64), 1));
            let inf = g.slot(1).unwrap();
            assert_eq!(inf.poles, [(-1i64, rat(1, 1))].into());
            let expect = ksym(1)
                .scale(&rat(-((p - 1) as i64), 1))
                .add(&ksym(p).scale(&rat(-1, 1)));
            assert_eq!(inf.constant, expect, "level {level}, p {p}");
        }
    }

    #[test]
    fn lemma_expansion_closed_form_powers() {
        // -p^{a+1} Zhat|U_{p^{a+1}}|W_p = q^{-p^a} - (p-1) sigma(p^a) c_E(0) - c_{E,p}(0)
        for (level, p) in [(11u32, 11u32), (14, 2), (15, 3), (21, 7)] {
            for a in 0u32..=2 {
                let z = zhat_cusp_data(level).unwrap();
                let mut g = z;
                for _ in 0..=a {
                    g = g.apply_u(p).unwrap();
                }
                let g = g.apply_w(p).unwrap().scale(&rat(-(p as i64).pow(a + 1), 1));
                let inf = g.slot(1).unwrap();
                let pa = (p as i64).pow(a);
                assert_eq!(
                    inf.poles,
                    [(-pa, rat(1, 1))].into(),
                    "pole, level {level} p {p} a {a}"
                );
                let sig = sigma((p as u64).pow(a)) as i64;
                let expect = ksym(1)
                    .scale(&rat(-((p as i64) - 1) * sig, 1))
                    .add(&ksym(p).scale(&rat(-1, 1)));
                assert_eq!(inf.constant, expect, "level {level} p {p} a {a}");
            }
        }
    }

    #[test]
    fn uw_recursion_identity() {
        // f|U_{p^r}|W_p = f|U_{p^r}|B_p + (1/p) f|U_{p^{r-1}}|W_p|B_p - (1/p) f|U_{p^{r-1}}
        // checked on the infinity slot for the Zhat model.
        for (level, p) in [(14u32, 2u32), (14, 7), (15, 5), (11, 11)] {
            for r in 1u32..=3 {
                let z = zhat_cusp_data(level).unwrap();
                let mut u_r = z.clone();
                for _ in 0..r {
                    u_r = u_r.apply_u(p).unwrap();
                }
                let mut u_r1 = z.clone();
                for _ in 0..r - 1 {
                    u_r1 = u_r1.apply_u(p).unwrap();
                }
                let lhs = u_r.apply_w(p).unwrap();
                let lhs_inf = lhs.slot(1).unwrap().clone();

                let rhs = u_r.slot(1).unwrap().stretch(p).add(
                    &u_r1
                        .apply_w(p)
                        .unwrap()
                        .slot(1)
                        .unwrap()
                        .stretch(p)
                        .scale(&rat(1, p as i64))
                        .add(&u_r1.slot(1).unwrap().scale(&rat(-1, p as i64))),
                );
                assert_eq!(lhs_inf, rhs, "level {level}, p {p}, r {r}");
            }
        }
    }

    #[test]
    fn composite_pipeline_closed_forms() {
        // The two-prime pipeline constants in closed form: with
        // P = p1^{a+1}, R = p2^{b+1},
        //   P R Zhat|U_{p1^{a+1}}|W_{p1}|U_{p2^{b+1}}|W_{p2}
        //     = q^{-p1^a p2^b} + (P-1)(R-1) c_E + (R-1) c_{E,p1}
        //       + (P-1) c_{E,p2} + c_{E,N} + O(q),
        // and the partial words
        //   R   Zhat|U_{p1^{a+1}}|U_{p2^{b+1}}|W_{p2} = (R-1) c_E + c_{E,p2} + ...,
        //   P   Zhat|U_{p1^{a+1}}|W_{p1}|U_{p2^{b+1}} = (P-1) c_E + c_{E,p1} + ...
        // (poles killed in the partial words since p2 divides neither
        // exponent). These pin every mixed-prime transport the composite
        // assembly uses.
        for level in [14u32, 15, 21] {
            let primes = prime_factors(level as u64);
            let (p1, p2) = (primes[0] as u32, primes[1] as u32);
            for a in 0u32..=1 {
                for b in 0u32..=1 {
                    let cap_p = (p1 as i64).pow(a + 1);
                    let cap_r = (p2 as i64).pow(b + 1);
                    let u_blocks = |f: CuspData, p: u32, times: u32| -> CuspData {
                        let mut g = f;
                        for _ in 0..times {
                            g = g.apply_u(p).unwrap();
                        }
                        g
                    };
                    // Full pipeline.
                    let g = u_blocks(zhat_cusp_data(level).unwrap(), p1, a + 1)
                        .apply_w(p1)
                        .unwrap();
                    let g = u_blocks(g, p2, b + 1)
                        .apply_w(p2)
                        .unwrap()
                        .scale(&rat(cap_p * cap_r, 1));
                    let inf = g.slot(1).unwrap();
                    let pole = (p1 as i64).pow(a) * (p2 as i64).pow(b);
                    assert_eq!(
                        inf.poles,
                        [(-pole, rat(1, 1))].into(),
                        "N={level} a={a} b={b}"
                    );
                    let expect = ksym(1)
                        .scale(&rat((cap_p - 1) * (cap_r - 1), 1))
                        .add(&ksym(p1).scale(&rat(cap_r - 1, 1)))
                        .add(&ksym(p2).scale(&rat(cap_p - 1, 1)))
                        .add(&ksym(level));
                    assert_eq!(inf.constant, expect, "full pipeline N={level} a={a} b={b}");
                    for (q, s) in g.slots() {
                        if q != 1 {
                            assert!(s.is_pole_free(), "N={level} slot {q}");
                        }
                    }
                    // Partial word ending in U|W at p2 only.
                    let g = u_blocks(zhat_cusp_data(level).unwrap(), p1, a + 1);
                    let g = u_blocks(g, p2, b + 1)
                        .apply_w(p2)
                        .unwrap()
                        .scale(&rat(cap_r, 1));
                    let inf = g.slot(1).unwrap();
                    assert!(inf.poles.is_empty());
                    let expect = ksym(1).scale(&rat(cap_r - 1, 1)).add(&ksym(p2));
                    assert_eq!(inf.constant, expect, "U..U|W_p2 N={level} a={a} b={b}");
                    // Partial word with the W block at p1 only.
                    let g = u_blocks(zhat_cusp_data(level).unwrap(), p1, a + 1)
                        .apply_w(p1)
                        .unwrap();
                    let g = u_blocks(g, p2, b + 1).scale(&rat(cap_p, 1));
                    let inf = g.slot(1).unwrap();
                    assert!(inf.poles.is_empty());
                    let expect = ksym(1).scale(&rat(cap_p - 1, 1)).add(&ksym(p1));
                    assert_eq!(inf.constant, expect, "U|W_p1|U N={level} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn level_lowering_combination_is_pole_free() {
        // h1 = p1 Zhat|U_{p1} + Zhat|W_{p1} transforms under
        // Gamma_0(N/p1) and has no pole at any cusp, so it is a constant
        // function. Symbolically its slot constants are
        //   slot 1, p1:  p1 c_E(0) + c_{E,p1}(0)
        //   slot p2, N:  p1 c_{E,p2}(0) + c_{E,N}(0)
        // whose numeric equality is a relation between the cusp
        // constants checked by the operators verify suite.
        for level in [14u32, 15, 21] {
            let primes = prime_factors(level as u64);
            for idx in 0..2 {
                let p1 = primes[idx] as u32;
                let p2 = primes[1 - idx] as u32;
                let z = zhat_cusp_data(level).unwrap();
                let h1 = z
                    .apply_u(p1)
                    .unwrap()
                    .scale(&rat(p1 as i64, 1))
                    .add(&z.apply_w(p1).unwrap())
                    .unwrap();
                let near = ksym(1).scale(&rat(p1 as i64, 1)).add(&ksym(p1));
                let far = ksym(p2).scale(&rat(p1 as i64, 1)).add(&ksym(level));
                for (q, s) in h1.slots() {
                    assert!(s.is_pole_free(), "N={level} p1={p1} slot {q}");
                    let expect = if q % p2 == 0 { &far } else { &near };
                    assert_eq!(&s.constant, expect, "N={level} p1={p1} slot {q}");
                }
            }
        }
    }

    #[test]
    fn hecke_atom_on_zhat_w_slot() {
        // Constant of Zhat|W_11|T_m scales by sigma(m)/m.
        let z = zhat_cusp_data(11).unwrap();
        for m in [2u32, 3, 5, 12] {
            let t = z.apply_w(11).unwrap().apply_t(m).unwrap();
            let expect = ksym(11).scale(&rat(sigma(m as u64) as i64, m as i64));
            assert_eq!(t.slot(1).unwrap().constant, expect, "m {m}");
        }
    }

    #[test]
    fn commutation_t_w_and_b_w() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        // Random cusp data at level 14.
        let mut cd = CuspData::zero(14).unwrap();
        for q in [1u32, 2, 7, 14] {
            let mut slot = SlotExpansion::default();
            for e in -6i64..0 {
                if rng.gen_bool(0.6) {
                    slot.poles
                        .insert(e, rat(rng.gen_range(-9..=9), rng.gen_range(1..=3)));
                }
            }
            slot.poles.retain(|_, c| !Coeff::is_zero(c));
            slot.constant = ksym(q).scale(&rat(rng.gen_range(-5..=5), 1));
            cd.set_slot(q, slot);
        }
        // T_m and W_Q commute for gcd(m, Q) = 1 (m may share factors
        // with the level).
        for (m, q) in [(3u32, 2u32), (5, 14), (2, 7), (6, 7)] {
            let a = cd.apply_t(m).unwrap().apply_w(q).unwrap();
            let b = cd.apply_w(q).unwrap().apply_t(m).unwrap();
            assert_eq!(a, b, "T_{m} W_{q}");
        }
        // B_d and W_Q commute for gcd(d, Q) = 1: level 7 data, d = 2.
        let mut low = CuspData::zero(7).unwrap();
        let mut slot = SlotExpansion::default();
        slot.poles.insert(-2, rat(3, 1));
        slot.constant = ksym(1);
        low.set_slot(1, slot);
        let a = low.apply_b(2).unwrap().apply_w(7).unwrap();
        let b = low.apply_w(7).unwrap().apply_b(2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn poincare_principal_parts() {
        // nu = 1: the identity word.
        let p1 = poincare_principal_part(1, 11).unwrap();
        assert_eq!(p1.slot(1).unwrap().poles, [(-1i64, rat(1, 1))].into());

        // nu = 2, N = 11: 2 P_1|T_2 has principal part q^{-2}.
        let p2 = poincare_principal_part(2, 11).unwrap();
        assert_eq!(p2.slot(1).unwrap().poles, [(-2i64, rat(1, 1))].into());

        // nu = 11, N = 11: 11 P_1^{(11)}|T_11 + P_1^{(1)}|B_11.
        let p11 = poincare_principal_part(11, 11).unwrap();
        assert_eq!(p11.slot(1).unwrap().poles, [(-11i64, rat(1, 1))].into());
        assert!(p11.slot(11).unwrap().is_pole_free());
        // Constants must refuse to be read.
        assert!(p11.constant(1).is_err());
    }

    #[test]
    fn word_parsing_round_trip() {
        let w = OperatorWord::parse("W11,T3,B1").unwrap();
        assert_eq!(w.atoms, vec![OpAtom::W(11), OpAtom::Hecke(3), OpAtom::B(1)]);
        assert_eq!(w.to_string(), "W11,T3,B1");
        assert!(OperatorWord::parse("X4").is_err());
    }

    #[test]
    fn unsupported_interactions_fail_loudly() {
        let z = zhat_cusp_data(11).unwrap();
        // U_2 at level 11 has no transport rule here.
        assert!(matches!(z.apply_u(2), Err(HeckeAlgError::Unsupported(_))));
        // B_11 at level 11 would leave the square-free world.
        assert!(matches!(
            z.apply_b(11),
            Err(HeckeAlgError::NotSquareFree(121))
        ));
    }
}
