//! Eisenstein series for pairs of real Dirichlet characters, and the
//! normalised combinations H_k that mirror the central eta family.
//!
//! For characters χ mod L and ψ mod R the weight-w series is
//!     𝓔_{w,χ,ψ}(τ) = Σ_{n≥1} a(n) q^{n/R},
//!     a(n) = Σ_{d|n} χ(n/d) d^{w−1} Σ_{c | gcd(ℓ,d)} c μ(ℓ/c) ψ⁰(ℓ/c) ψ⁰(d/c),
//! where ℓ = R / cond(ψ) and ψ⁰ is the primitive character inducing ψ
//! (real characters, so ψ̄⁰ = ψ⁰). The q^{1/R} grid is cleared to integer
//! exponents by evaluating at a multiple of τ — see [`EisensteinSpec::series`].
//!
//! Contents:
//!   CharacterTable   real characters as value tables with conductor data
//!   chi_minus4, trivial_character, chi2   the three characters in play
//!   sigma_chi        σ_{χ₋₄;2k}(n), the twisted divisor sum
//!   EisensteinSpec   (weight, χ, ψ) with the parity sanity check
//!   h_k_series       the Eisenstein counterpart of the eta family f_k
//!   eis2_crosscheck  general law vs the two-term divisor-sum collapse

use crate::analytics::euler_number;
use crate::qseries::QSeries;
use rug::ops::Pow;
use rug::{Integer, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EisensteinError {
    /// χ(−1)ψ(−1) must equal (−1)^weight, or the series is identically zero.
    #[error("parity violation: χ(−1)ψ(−1) ≠ (−1)^{weight}")]
    ParityViolation { weight: u32 },
    #[error("character table is not completely multiplicative")]
    NotMultiplicative,
}

/// A real Dirichlet character stored as its value table on 0..modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTable {
    modulus: u32,
    values: Vec<i64>, // in {−1, 0, +1}
    conductor: u32,
    principal: bool,
}

impl CharacterTable {
    /// Validates complete multiplicativity and the coprimality support,
    /// then computes the conductor by scanning divisors of the modulus.
    pub fn new(modulus: u32, values: Vec<i64>) -> Result<Self, EisensteinError> {
        assert!(modulus >= 1 && values.len() == modulus as usize);
        let ok_support = (0..modulus).all(|n| {
            let coprime = gcd(n as u64, modulus as u64) == 1;
            (values[n as usize] != 0) == coprime || modulus == 1
        });
        let ok_mult = (0..modulus).all(|a| {
            (0..modulus).all(|b| {
                values[(a * b % modulus) as usize] == values[a as usize] * values[b as usize]
            })
        });
        if !(ok_support && ok_mult && (modulus == 1 || values[1 % modulus as usize] == 1)) {
            return Err(EisensteinError::NotMultiplicative);
        }
        let conductor = (1..=modulus)
            .filter(|d| modulus % d == 0)
            .find(|&d| {
                // χ factors through (ℤ/d)*: χ(n) = 1 whenever n ≡ 1 (mod d)
                // and gcd(n, modulus) = 1
                (0..modulus)
                    .filter(|&n| n % d == 1 % d && gcd(n as u64, modulus as u64) == 1)
                    .all(|n| values[n as usize] == 1)
            })
            .unwrap_or(modulus);
        let principal = (0..modulus)
            .filter(|&n| gcd(n as u64, modulus as u64) == 1)
            .all(|n| values[n as usize] == 1)
            || modulus == 1;
        Ok(CharacterTable { modulus, values, conductor, principal })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn is_principal(&self) -> bool {
        self.principal
    }

    /// χ(n), for any integer n.
    pub fn value(&self, n: i64) -> i64 {
        self.values[n.rem_euclid(self.modulus as i64) as usize]
    }

    /// ψ⁰(n): the primitive character of modulus cond(ψ) that induces ψ.
    /// For n coprime to the conductor this is ψ(m) for any m ≡ n mod cond
    /// with gcd(m, modulus) = 1.
    pub fn primitive_value(&self, n: i64) -> i64 {
        if self.conductor == 1 {
            return 1;
        }
        let c = self.conductor as i64;
        let mut m = n.rem_euclid(c);
        if gcd(m.unsigned_abs(), self.conductor as u64) != 1 {
            return 0;
        }
        loop {
            if gcd(m.unsigned_abs(), self.modulus as u64) == 1 {
                return self.values[(m % self.modulus as i64) as usize];
            }
            m += c;
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// χ₋₄: the odd character mod 4 (Kronecker symbol of discriminant −4).
pub fn chi_minus4() -> CharacterTable {
    CharacterTable::new(4, vec![0, 1, 0, -1]).unwrap()
}

/// 𝟙: the trivial character (modulus 1).
pub fn trivial_character() -> CharacterTable {
    CharacterTable::new(1, vec![1]).unwrap()
}

/// χ₂: the principal character mod 2 (conductor 1).
pub fn chi2() -> CharacterTable {
    CharacterTable::new(2, vec![0, 1]).unwrap()
}

/// σ_{χ₋₄;p}(n) = Σ_{d|n} χ₋₄(n/d) d^p by direct divisor enumeration.
pub fn sigma_chi(n: u64, p: u32) -> Integer {
    assert!(n >= 1);
    let chi = chi_minus4();
    let mut acc = Integer::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            acc += chi.value((n / d) as i64) * Integer::from(d).pow(p);
            let e = n / d;
            if e != d {
                acc += chi.value(d as i64) * Integer::from(e).pow(p);
            }
        }
        d += 1;
    }
    acc
}

/// The data defining 𝓔_{w,χ,ψ}. Construction enforces the parity condition
/// χ(−1)ψ(−1) = (−1)^w; only nonprincipal χ are supported (the constant
/// term is then 0).
#[derive(Debug, Clone)]
pub struct EisensteinSpec {
    pub weight: u32,
    pub chi: CharacterTable,
    pub psi: CharacterTable,
}

impl EisensteinSpec {
    pub fn new(
        weight: u32,
        chi: CharacterTable,
        psi: CharacterTable,
    ) -> Result<Self, EisensteinError> {
        assert!(
            !chi.is_principal(),
            "only nonprincipal χ supported (constant term would be an L-value)"
        );
        let sign = chi.value(-1) * psi.value(-1);
        let want = if weight % 2 == 0 { 1 } else { -1 };
        if sign != want {
            return Err(EisensteinError::ParityViolation { weight });
        }
        Ok(EisensteinSpec { weight, chi, psi })
    }

    // ℓ = R / cond(ψ)
    fn ell(&self) -> u64 {
        (self.psi.modulus() / self.psi.conductor()) as u64
    }

    /// The coefficient law a(n). Time: O(√n) for the divisor scan.
    pub fn coefficient(&self, n: u64) -> Integer {
        assert!(n >= 1);
        let ell = self.ell();
        let mut acc = Integer::new();
        for d in divisors(n) {
            let chi_part = self.chi.value((n / d) as i64);
            if chi_part == 0 {
                continue;
            }
            // inner sum over c | gcd(ℓ, d)
            let mut inner = Integer::new();
            let g = gcd(ell, d);
            for c in divisors(g) {
                let m = mobius(ell / c);
                if m == 0 {
                    continue;
                }
                inner += Integer::from(c)
                    * (m * self.psi.primitive_value((ell / c) as i64)
                        * self.psi.primitive_value((d / c) as i64));
            }
            if inner != 0 {
                acc += inner * chi_part * Integer::from(d).pow(self.weight - 1);
            }
        }
        acc
    }

    /// 𝓔_{w,χ,ψ}(mτ) as a q-series with integer exponents m·n/R; the scale m
    /// must clear the exponent grid, i.e. R | m. The constant term is zero
    /// (nonprincipal χ).
    pub fn series(&self, scale: u32, trunc: i64) -> QSeries {
        let r = self.psi.modulus();
        assert!(
            scale >= 1 && scale % r == 0,
            "scale {scale} does not clear the q^(n/{r}) grid"
        );
        let step = (scale / r) as i64;
        if trunc <= 0 {
            return QSeries::zero(trunc);
        }
        let mut coeffs = vec![Rational::new(); trunc as usize];
        let mut n = 1i64;
        while step * n < trunc {
            let a = self.coefficient(n as u64);
            if a != 0 {
                coeffs[(step * n) as usize] = Rational::from(a);
            }
            n += 1;
        }
        QSeries::new(0, coeffs, trunc)
    }
}

/// The weight-(2k+1) Eisenstein combination normalised to match the eta
/// family termwise:
///
/// * k odd:  H_k = −(1/E_{2k}) · 𝓔_{2k+1,χ₋₄,𝟙}(2τ)
/// * k even: H_k = (1/(2^{2k} E_{2k})) · (𝓔_{2k+1,χ₋₄,𝟙}(τ) − 2^{2k} 𝓔_{2k+1,χ₋₄,𝟙}(2τ))
pub fn h_k_series(k: u32, trunc: i64) -> QSeries {
    assert!(k >= 1);
    let e2k = euler_number(2 * k).unwrap();
    let spec = EisensteinSpec::new(2 * k + 1, chi_minus4(), trivial_character()).unwrap();
    if k % 2 == 1 {
        let scalar = -Rational::from((Integer::from(1), e2k));
        spec.series(2, trunc).scaled(&scalar)
    } else {
        let two2k = Integer::from(1) << (2 * k);
        let scalar = Rational::from((Integer::from(1), two2k.clone() * &e2k));
        let at_tau = spec.series(1, trunc);
        let at_2tau = spec.series(2, trunc);
        at_tau
            .sub(&at_2tau.scaled(&Rational::from(two2k)))
            .scaled(&scalar)
    }
}

/// Check 𝓔_{2k+1,χ₋₄,χ₂}(2τ) = 2^{2k+1} 𝓔_{2k+1,χ₋₄,𝟙}(2τ) − 𝓔_{2k+1,χ₋₄,𝟙}(τ)
/// coefficientwise below `trunc`. The left side exercises the full
/// μ/ψ⁰ machinery (ℓ = 2); the right side only the plain divisor sums.
pub fn eis2_crosscheck(k: u32, trunc: i64) -> bool {
    let twisted = EisensteinSpec::new(2 * k + 1, chi_minus4(), chi2()).unwrap();
    let plain = EisensteinSpec::new(2 * k + 1, chi_minus4(), trivial_character()).unwrap();
    let lhs = twisted.series(2, trunc);
    let scale = Rational::from(Integer::from(1) << (2 * k + 1));
    let rhs = plain.series(2, trunc).scaled(&scale).sub(&plain.series(1, trunc));
    lhs == rhs
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

fn mobius(n: u64) -> i64 {
    let mut n = n;
    let mut count = 0;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            count += 1;
        }
        p += 1;
    }
    if n > 1 {
        count += 1;
    }
    if count % 2 == 0 { 1 } else { -1 }
}
