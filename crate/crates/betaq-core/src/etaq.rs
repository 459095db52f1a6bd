//! Dedekind eta quotients ∏_{δ|N} η(δτ)^{r_δ} as exact q-series, plus the
//! Gordon–Hughes–Newman modularity bookkeeping (weight, mod-24 conditions,
//! cusp orders, nebentypus discriminant).
//!
//! With q = e^{2πiτ}, η(δτ) = q^{δ/24} (q^δ; q^δ)_∞, so a quotient expands to
//! q^{Σ δ r_δ / 24} ∏ (q^δ; q^δ)_∞^{r_δ}. The prefactor exponent must be an
//! integer for the expansion to live in ℤ((q)) — otherwise [`expand`] refuses
//! with [`EtaError::FractionalPrefactor`] rather than silently dropping it.
//!
//! Contents:
//!   EtaQuotient       level + exponent map, parse/display/JSON forms
//!   ModularityReport  everything ghn_check computes
//!   fk_quotient       the central family η(4τ)^{8k−2} η(8τ)⁴ / η(2τ)^{4k}
//!   theta_gf, triangular_gf   direct theta sums used as oracles and
//!                             building blocks (Σ q^{n²}, Σ q^{n(n+1)/2})

use crate::qseries::{euler_product, QSeries};
use rug::Rational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EtaError {
    /// Σ δ r_δ is not divisible by 24, so the q-prefactor is fractional and
    /// there is no expansion with integer exponents.
    #[error("fractional q-prefactor: Σ δ·r_δ = {sum} is not divisible by 24")]
    FractionalPrefactor { sum: i64 },
    /// Every η(δτ) in a level-N quotient needs δ | N.
    #[error("η(δτ) with δ = {delta} does not divide the level {level}")]
    BadDivisor { delta: u32, level: u32 },
    #[error("cannot parse eta quotient: {0}")]
    Parse(String),
}

/// ∏_{δ|N} η(δτ)^{r_δ}, stored as the level N and the map δ ↦ r_δ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaQuotient {
    level: u32,
    factors: BTreeMap<u32, i64>,
}

/// What Gordon–Hughes–Newman says about an eta quotient on Γ₀(N).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularityReport {
    pub level: u32,
    /// k = (1/2) Σ r_δ — a half-integer in general.
    pub weight: Rational,
    /// Σ δ r_δ ≡ 0 (mod 24)
    pub cond_delta: bool,
    /// Σ (N/δ) r_δ ≡ 0 (mod 24)
    pub cond_level: bool,
    /// Vanishing order at the cusp class of each divisor s | N
    /// (s = N is the cusp at infinity; the order there equals the leading
    /// q-exponent of the expansion).
    pub cusp_orders: BTreeMap<u32, Rational>,
    /// All cusp orders ≥ 0.
    pub is_holomorphic: bool,
    /// All cusp orders > 0.
    pub is_cusp_form: bool,
    /// Fundamental discriminant of the nebentypus ((−1)^k ∏ δ^{r_δ} modulo
    /// squares); only defined for integral weight.
    pub character_discriminant: Option<i64>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

impl EtaQuotient {
    pub fn new(level: u32, factors: &[(u32, i64)]) -> Result<Self, EtaError> {
        assert!(level >= 1, "level must be positive");
        let mut map = BTreeMap::new();
        for &(delta, exp) in factors {
            if delta == 0 || level % delta != 0 {
                return Err(EtaError::BadDivisor { delta, level });
            }
            *map.entry(delta).or_insert(0) += exp;
        }
        map.retain(|_, e| *e != 0);
        Ok(EtaQuotient { level, factors: map })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn factors(&self) -> impl Iterator<Item = (u32, i64)> + '_ {
        self.factors.iter().map(|(&d, &e)| (d, e))
    }

    /// Σ δ r_δ / 24 — the exponent of the q-prefactor.
    pub fn prefactor_exponent(&self) -> Result<i64, EtaError> {
        let sum: i64 = self.factors.iter().map(|(&d, &e)| d as i64 * e).sum();
        if sum.rem_euclid(24) != 0 {
            return Err(EtaError::FractionalPrefactor { sum });
        }
        Ok(sum / 24)
    }

    /// q-expansion, known through q^(trunc−1).
    pub fn expand(&self, trunc: i64) -> Result<QSeries, EtaError> {
        let pre = self.prefactor_exponent()?;
        let rel = trunc - pre;
        if rel <= 0 {
            return Ok(QSeries::zero(trunc));
        }
        let mut acc = QSeries::one(rel);
        for (&delta, &exp) in &self.factors {
            acc = acc.mul(&euler_product(delta, rel).pow(exp));
        }
        Ok(acc.shifted(pre))
    }

    /// Pointwise product of two quotients; the level is the lcm.
    pub fn mul(&self, other: &Self) -> Self {
        let level = (self.level as u64 * other.level as u64
            / gcd(self.level as u64, other.level as u64)) as u32;
        let mut factors = self.factors.clone();
        for (&d, &e) in &other.factors {
            *factors.entry(d).or_insert(0) += e;
        }
        factors.retain(|_, e| *e != 0);
        EtaQuotient { level, factors }
    }

    pub fn pow(&self, e: i64) -> Self {
        let mut factors = self.factors.clone();
        if e == 0 {
            factors.clear();
        } else {
            for v in factors.values_mut() {
                *v *= e;
            }
        }
        EtaQuotient { level: self.level, factors }
    }

    /// The Gordon–Hughes–Newman data: weight, the two mod-24 congruences,
    /// the vanishing order at every cusp of Γ₀(N), and the nebentypus.
    ///
    /// Order at the cusp class of s | N:
    ///   (N/24) Σ_δ gcd(s,δ)² r_δ / (gcd(s, N/s) · s · δ).
    pub fn ghn_check(&self) -> ModularityReport {
        let n = self.level as i64;
        let r_sum: i64 = self.factors.values().sum();
        let weight = Rational::from((r_sum, 2));

        let sum_delta: i64 = self.factors.iter().map(|(&d, &e)| d as i64 * e).sum();
        let sum_level: i64 = self
            .factors
            .iter()
            .map(|(&d, &e)| (n / d as i64) * e)
            .sum();

        let mut cusp_orders = BTreeMap::new();
        for s in 1..=self.level {
            if self.level % s != 0 {
                continue;
            }
            let s64 = s as i64;
            let mut order = Rational::new();
            for (&d, &e) in &self.factors {
                let g = gcd(s as u64, d as u64) as i64;
                order += Rational::from((g * g * e, gcd(s as u64, (n / s64) as u64) as i64 * s64 * d as i64));
            }
            order *= Rational::from((n, 24));
            cusp_orders.insert(s, order);
        }
        let is_holomorphic = cusp_orders.values().all(|o| *o >= 0);
        let is_cusp_form = cusp_orders.values().all(|o| *o > 0);

        let character_discriminant = if r_sum % 2 == 0 {
            Some(self.character_discriminant(r_sum / 2))
        } else {
            None
        };

        ModularityReport {
            level: self.level,
            weight,
            cond_delta: sum_delta.rem_euclid(24) == 0,
            cond_level: sum_level.rem_euclid(24) == 0,
            cusp_orders,
            is_holomorphic,
            is_cusp_form,
            character_discriminant,
        }
    }

    // Fundamental discriminant of (−1)^k ∏ δ^{r_δ} mod squares, k integral.
    fn character_discriminant(&self, k: i64) -> i64 {
        // parity of each prime's exponent in ∏ δ^{r_δ}
        let mut parity: BTreeMap<u64, i64> = BTreeMap::new();
        for (&delta, &e) in &self.factors {
            let mut d = delta as u64;
            let mut p = 2;
            while p * p <= d {
                while d % p == 0 {
                    *parity.entry(p).or_insert(0) += e;
                    d /= p;
                }
                p += 1;
            }
            if d > 1 {
                *parity.entry(d).or_insert(0) += e;
            }
        }
        let mut sf: i64 = if k % 2 == 0 { 1 } else { -1 };
        for (p, e) in parity {
            if e.rem_euclid(2) == 1 {
                sf *= p as i64;
            }
        }
        // squarefree d ↦ fundamental discriminant of ℚ(√d)
        if sf.rem_euclid(4) == 1 {
            sf
        } else {
            4 * sf
        }
    }
}

/// η(4τ)^{8k−2} η(8τ)⁴ / η(2τ)^{4k} on Γ₀(8) — the weight-(2k+1) family the
/// whole crate revolves around. Leading term q^{k+1}.
pub fn fk_quotient(k: u32) -> EtaQuotient {
    let k = k as i64;
    EtaQuotient::new(8, &[(4, 8 * k - 2), (8, 4), (2, -4 * k)]).unwrap()
}

/// Σ_{n∈ℤ} q^{n²} = 1 + 2q + 2q⁴ + 2q⁹ + … (the full theta function).
pub fn theta_gf(trunc: i64) -> QSeries {
    let mut coeffs = vec![Rational::new(); trunc.max(0) as usize];
    if trunc > 0 {
        coeffs[0] = Rational::from(1);
        let mut n: i64 = 1;
        while n * n < trunc {
            coeffs[(n * n) as usize] = Rational::from(2);
            n += 1;
        }
    }
    QSeries::new(0, coeffs, trunc)
}

/// Σ_{n≥0} q^{n(n+1)/2} = 1 + q + q³ + q⁶ + … (triangular numbers).
pub fn triangular_gf(trunc: i64) -> QSeries {
    let mut coeffs = vec![Rational::new(); trunc.max(0) as usize];
    let mut n: i64 = 0;
    while n * (n + 1) / 2 < trunc {
        coeffs[(n * (n + 1) / 2) as usize] = Rational::from(1);
        n += 1;
    }
    QSeries::new(0, coeffs, trunc)
}

// --- text and JSON forms ---------------------------------------------------

impl fmt::Display for EtaQuotient {
    /// Compact form, e.g. `4^6*8^4/2^4 @8` for η(4τ)⁶η(8τ)⁴/η(2τ)⁴ on Γ₀(8).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut num = String::new();
        let mut den = String::new();
        for (&d, &e) in &self.factors {
            let (target, mag) = if e > 0 { (&mut num, e) } else { (&mut den, -e) };
            if !target.is_empty() {
                target.push('*');
            }
            if mag == 1 {
                target.push_str(&d.to_string());
            } else {
                target.push_str(&format!("{d}^{mag}"));
            }
        }
        if num.is_empty() {
            num.push('1');
        }
        if den.is_empty() {
            write!(f, "{num} @{}", self.level)
        } else {
            write!(f, "{num}/{den} @{}", self.level)
        }
    }
}

impl FromStr for EtaQuotient {
    type Err = EtaError;

    /// Parse the compact form: factors `δ` or `δ^e` joined by `*` (numerator)
    /// and `/` (denominator), then ` @N` for the level.
    fn from_str(s: &str) -> Result<Self, EtaError> {
        let (body, level) = s
            .rsplit_once('@')
            .ok_or_else(|| EtaError::Parse(format!("missing @level in {s:?}")))?;
        let level: u32 = level
            .trim()
            .parse()
            .map_err(|_| EtaError::Parse(format!("bad level in {s:?}")))?;
        let mut factors = Vec::new();
        let mut sign = 1i64;
        for piece in body.split_inclusive(['*', '/']) {
            let (token, next_sign) = match piece.strip_suffix('*') {
                Some(t) => (t, 1),
                None => match piece.strip_suffix('/') {
                    Some(t) => (t, -1),
                    None => (piece, 1),
                },
            };
            let token = token.trim();
            if token.is_empty() || token == "1" {
                sign = next_sign;
                continue;
            }
            let (delta, exp) = match token.split_once('^') {
                Some((d, e)) => (
                    d.trim()
                        .parse()
                        .map_err(|_| EtaError::Parse(format!("bad factor {token:?}")))?,
                    e.trim()
                        .parse::<i64>()
                        .map_err(|_| EtaError::Parse(format!("bad exponent in {token:?}")))?,
                ),
                None => (
                    token
                        .parse()
                        .map_err(|_| EtaError::Parse(format!("bad factor {token:?}")))?,
                    1,
                ),
            };
            factors.push((delta, sign * exp));
            sign = next_sign;
        }
        EtaQuotient::new(level, &factors)
    }
}

// Wire format: {"level": N, "factors": [{"delta": δ, "exp": r}, ...]}
#[derive(Serialize, Deserialize)]
struct FactorRepr {
    delta: u32,
    exp: i64,
}

#[derive(Serialize, Deserialize)]
struct EtaRepr {
    level: u32,
    factors: Vec<FactorRepr>,
}

impl Serialize for EtaQuotient {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        EtaRepr {
            level: self.level,
            factors: self
                .factors
                .iter()
                .map(|(&d, &e)| FactorRepr { delta: d, exp: e })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EtaQuotient {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = EtaRepr::deserialize(deserializer)?;
        let factors: Vec<(u32, i64)> = repr.factors.iter().map(|f| (f.delta, f.exp)).collect();
        EtaQuotient::new(repr.level, &factors).map_err(|e| D::Error::custom(e.to_string()))
    }
}

impl ModularityReport {
    /// JSON with exact rationals rendered as strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "level": self.level,
            "weight": self.weight.to_string(),
            "cond_delta": self.cond_delta,
            "cond_level": self.cond_level,
            "cusp_orders": self.cusp_orders.iter()
                .map(|(s, o)| (s.to_string(), serde_json::Value::String(o.to_string())))
                .collect::<serde_json::Map<String, serde_json::Value>>(),
            "is_holomorphic": self.is_holomorphic,
            "is_cusp_form": self.is_cusp_form,
            "character_discriminant": self.character_discriminant,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f1_expansion_is_the_twisted_divisor_series() {
        // Σ σ_{χ₋₄;2}(n) q^{2n} = q² + 4q⁴ + 8q⁶ + 16q⁸ + 26q¹⁰ + 32q¹² + …
        let f1 = fk_quotient(1).expand(14).unwrap();
        assert_eq!(f1.leading_exponent(), Some(2));
        for (e, want) in [(2, 1), (4, 4), (6, 8), (8, 16), (10, 26), (12, 32)] {
            assert_eq!(f1.coeff(e).unwrap(), want, "q^{e}");
        }
        for e in (3..14).step_by(2) {
            assert_eq!(f1.coeff(e).unwrap(), 0, "odd exponent {e}");
        }
    }

    #[test]
    fn fk_leading_exponent_is_k_plus_one() {
        for k in 0..=8u32 {
            let f = fk_quotient(k).expand(k as i64 + 6).unwrap();
            assert_eq!(f.leading_exponent(), Some(k as i64 + 1), "k = {k}");
            assert_eq!(f.coeff(k as i64 + 1).unwrap(), 1, "k = {k}");
        }
    }

    #[test]
    fn ghn_report_for_the_central_family() {
        for k in 1..=8u32 {
            let rep = fk_quotient(k).ghn_check();
            assert_eq!(rep.weight, Rational::from((2 * k as i64 + 1, 1)), "k = {k}");
            assert!(rep.cond_delta && rep.cond_level, "k = {k}");
            assert_eq!(rep.cusp_orders[&1], 0);
            assert_eq!(rep.cusp_orders[&2], 0);
            assert_eq!(rep.cusp_orders[&4], k);
            assert_eq!(rep.cusp_orders[&8], k as i64 + 1);
            assert!(rep.is_holomorphic, "k = {k}");
            assert!(!rep.is_cusp_form, "k = {k}"); // order 0 at two cusps
            assert_eq!(rep.character_discriminant, Some(-4), "k = {k}");
        }
    }

    #[test]
    fn ghn_order_at_infinity_matches_expansion() {
        let quotients = [
            fk_quotient(1),
            fk_quotient(3),
            EtaQuotient::new(8, &[(4, 8), (2, -4)]).unwrap(), // F
            EtaQuotient::new(8, &[(8, 8), (4, -4)]).unwrap(), // F₂
            EtaQuotient::new(8, &[(4, 5), (2, -2), (8, -2)]).unwrap(), // θ(2τ)
        ];
        for eq in &quotients {
            let rep = eq.ghn_check();
            let lead = eq.expand(40).unwrap().leading_exponent().unwrap();
            assert_eq!(rep.cusp_orders[&eq.level()], lead, "{eq}");
        }
    }

    #[test]
    fn discriminant_of_eta24_is_trivial() {
        let eta24 = EtaQuotient::new(1, &[(1, 24)]).unwrap();
        let rep = eta24.ghn_check();
        assert_eq!(rep.weight, 12);
        assert!(rep.cond_delta && rep.cond_level);
        assert!(rep.is_cusp_form);
        assert_eq!(rep.cusp_orders[&1], 1);
        assert_eq!(rep.character_discriminant, Some(1));
        // and the expansion is Δ: q − 24q² + 252q³ − 1472q⁴ + …
        let delta = eta24.expand(5).unwrap();
        assert_eq!(delta.coeff(1).unwrap(), 1);
        assert_eq!(delta.coeff(2).unwrap(), -24);
        assert_eq!(delta.coeff(3).unwrap(), 252);
        assert_eq!(delta.coeff(4).unwrap(), -1472);
    }

    #[test]
    fn f_has_order_one_at_the_s4_cusp() {
        let f = EtaQuotient::new(8, &[(4, 8), (2, -4)]).unwrap();
        let rep = f.ghn_check();
        assert_eq!(rep.cusp_orders[&4], 1);
        assert_eq!(rep.weight, 2);
    }

    #[test]
    fn theta_quotient_matches_direct_theta_sum() {
        // η(2τ)⁵ / (η(τ)² η(4τ)²) = Σ q^{n²}
        let theta = EtaQuotient::new(4, &[(2, 5), (1, -2), (4, -2)]).unwrap();
        assert_eq!(theta.expand(50).unwrap(), theta_gf(50));
        // half-integral weight: no nebentypus discriminant
        let rep = theta.ghn_check();
        assert_eq!(rep.weight, Rational::from((1, 2)));
        assert_eq!(rep.character_discriminant, None);
    }

    #[test]
    fn theta2_quotient_matches_rescaled_theta_sum() {
        // η(4τ)⁵ / (η(2τ)² η(8τ)²) = Σ q^{2n²} = 1 + 2q² + 2q⁸ + 2q¹⁸ + …
        let theta2 = EtaQuotient::new(8, &[(4, 5), (2, -2), (8, -2)]).unwrap();
        let s = theta2.expand(40).unwrap();
        assert_eq!(s, theta_gf(20).rescale(2));
        assert_eq!(s.coeff(0).unwrap(), 1);
        assert_eq!(s.coeff(2).unwrap(), 2);
        assert_eq!(s.coeff(8).unwrap(), 2);
        assert_eq!(s.coeff(18).unwrap(), 2);
    }

    #[test]
    fn psi_quotient_has_fractional_prefactor_but_product_form_works() {
        // η(2τ)²/η(τ) carries q^{3/24}: expand must refuse...
        let psi = EtaQuotient::new(2, &[(2, 2), (1, -1)]).unwrap();
        assert_eq!(
            psi.expand(10),
            Err(EtaError::FractionalPrefactor { sum: 3 })
        );
        // ...while the bare product (q²;q²)²/(q;q) is the triangular gf.
        let prod = euler_product(2, 40)
            .pow(2)
            .div(&euler_product(1, 40))
            .unwrap();
        assert_eq!(prod, triangular_gf(40));
    }

    #[test]
    fn bad_divisor_is_rejected() {
        assert_eq!(
            EtaQuotient::new(8, &[(3, 1)]),
            Err(EtaError::BadDivisor { delta: 3, level: 8 })
        );
    }

    #[test]
    fn mul_and_pow_combine_exponent_maps() {
        let f = EtaQuotient::new(8, &[(4, 8), (2, -4)]).unwrap();
        let f2 = EtaQuotient::new(8, &[(8, 8), (4, -4)]).unwrap();
        let prod = f.mul(&f2);
        assert_eq!(prod, EtaQuotient::new(8, &[(4, 4), (2, -4), (8, 8)]).unwrap());
        let sq = f.pow(2);
        assert_eq!(sq, EtaQuotient::new(8, &[(4, 16), (2, -8)]).unwrap());
        // expansion is multiplicative
        let lhs = prod.expand(30).unwrap();
        let rhs = f.expand(30).unwrap().mul(&f2.expand(30).unwrap());
        assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn compact_form_round_trips() {
        let f1 = fk_quotient(1);
        assert_eq!(f1.to_string(), "4^6*8^4/2^4 @8");
        let parsed: EtaQuotient = "4^6*8^4/2^4 @8".parse().unwrap();
        assert_eq!(parsed, f1);
        let with_unit: EtaQuotient = "1/4^2 * 8^8 @8".parse().unwrap();
        // left-to-right: 1, then /4^2, then *8^8
        assert_eq!(with_unit, EtaQuotient::new(8, &[(4, -2), (8, 8)]).unwrap());
        let plain: EtaQuotient = "2 @2".parse().unwrap();
        assert_eq!(plain, EtaQuotient::new(2, &[(2, 1)]).unwrap());
        assert!("4^6 8^4".parse::<EtaQuotient>().is_err());
    }

    #[test]
    fn json_round_trips() {
        let f1 = fk_quotient(1);
        let js = serde_json::to_string(&f1).unwrap();
        assert!(js.contains("\"delta\":4"), "{js}");
        assert!(js.contains("\"exp\":6"), "{js}");
        let back: EtaQuotient = serde_json::from_str(&js).unwrap();
        assert_eq!(back, f1);
    }

    #[test]
    fn report_json_has_exact_rationals() {
        let rep = fk_quotient(2).ghn_check();
        let js = rep.to_json();
        assert_eq!(js["weight"], "5");
        assert_eq!(js["cusp_orders"]["8"], "3");
        assert_eq!(js["character_discriminant"], -4);
    }
}
