//! Eulerian polynomials, their P_k combinations, and the Lambert-series
//! expansions that re-express the Eisenstein combinations H_k.
//!
//! The expansions in play (χ = χ₋₄ throughout):
//!
//! * k odd:  H_k = −(1/E_{2k}) Σ_{n≥1} χ(n) q^{2n} A_{2k}(q^{2n}) / (1−q^{2n})^{2k+1}
//! * k even: H_k = (1/(2^{2k}E_{2k})) Σ_{n≥1} χ(n) q^n P_k(q^n) / (1−q^{2n})^{2k+1}
//!
//! with A_r the Eulerian polynomial and
//! P_k(t) = (1+t)^{2k+1} A_{2k}(t) − 2^{2k} t A_{2k}(t²).
//!
//! Contents:
//!   IntPolynomial    dense integer polynomials (just enough arithmetic)
//!   eulerian_poly    A_r via the finite Worpitzky-type identity
//!   p_k_poly         the weight-(2k+1) numerator for even k
//!   lambert_expand   the sums above as exact q-series
//!   verify_theorem2  Lambert expansion vs Eisenstein series, coefficientwise
//!   verify_classical three classical identities (Ramanujan, Hou–Sun, k=3)

use crate::eisenstein::{chi_minus4, h_k_series};
use crate::etaq::EtaQuotient;
use crate::qseries::{euler_product, QSeries};
use crate::analytics::euler_number;
use rug::ops::Pow;
use rug::{Complete, Integer, Rational};

/// Dense integer polynomial, ascending coefficients, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<Integer>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<Integer>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_ints(ints: &[i64]) -> Self {
        Self::new(ints.iter().map(|&n| Integer::from(n)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Integer {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(&Integer::from(-1)))
    }

    pub fn scaled(&self, c: &Integer) -> Self {
        Self::new(self.coeffs.iter().map(|x| (x * c).complete()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![Integer::new(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += (a * b).complete();
            }
        }
        Self::new(out)
    }

    /// Substitute t ↦ t^m.
    pub fn stretched(&self, m: usize) -> Self {
        if self.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![Integer::new(); (self.coeffs.len() - 1) * m + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * m] = c.clone();
        }
        Self::new(out)
    }

    /// Drop all coefficients above `deg`.
    pub fn truncated(&self, deg: usize) -> Self {
        Self::new(self.coeffs.iter().take(deg + 1).cloned().collect())
    }

    pub fn eval_integer(&self, x: i64) -> Integer {
        let mut acc = Integer::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// True iff coeff(i) == coeff(deg − i) for all i.
    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n / 2).all(|i| self.coeffs[i] == self.coeffs[n - 1 - i])
    }
}

/// The Eulerian polynomial A_r(t) (A_0 = A_1 = 1, A_2 = 1 + t, …), via the
/// exact finite form of Σ_{ℓ≥1} ℓ^r t^{ℓ−1} = A_r(t)/(1−t)^{r+1}:
/// multiplying the first r+1 terms of the sum by (1−t)^{r+1} reproduces A_r
/// through degree r, and A_r has degree max(r−1, 0) < r, so truncating there
/// is exact.
pub fn eulerian_poly(r: u32) -> IntPolynomial {
    let r = r as usize;
    // Σ_{ℓ=1}^{r+1} ℓ^r t^{ℓ−1}
    let powers = IntPolynomial::new(
        (1..=r as u64 + 1)
            .map(|l| Integer::from(l).pow(r as u32))
            .collect(),
    );
    // (1−t)^{r+1} by binomial coefficients
    let one_minus_t = IntPolynomial::new(
        (0..=r + 1)
            .map(|i| {
                let b = Integer::binomial_u(r as u32 + 1, i as u32).complete();
                if i % 2 == 0 { b } else { -b }
            })
            .collect(),
    );
    powers.mul(&one_minus_t).truncated(r)
}

/// P_k(t) = (1+t)^{2k+1} A_{2k}(t) − 2^{2k} t A_{2k}(t²); degree 4k,
/// palindromic, P_k(0) = 1, P_k(1) = 2^{2k}(2k)!.
pub fn p_k_poly(k: u32) -> IntPolynomial {
    let a = eulerian_poly(2 * k);
    let one_plus_t = IntPolynomial::new(
        (0..=2 * k + 1)
            .map(|i| Integer::binomial_u(2 * k + 1, i).complete())
            .collect(),
    );
    let twisted = a
        .stretched(2)
        .mul(&IntPolynomial::from_ints(&[0, 1]))
        .scaled(&(Integer::from(1) << (2 * k)));
    one_plus_t.mul(&a).sub(&twisted)
}

// Add sign · poly-in-q / (1 − q^m)^e to the accumulator, where `monomials`
// are (coefficient, q-exponent) pairs of the numerator and
// (1−x)^{−e} = Σ_j C(j+e−1, e−1) x^j.
fn accumulate_term(
    acc: &mut [Integer],
    sign: i64,
    monomials: &[(Integer, i64)],
    m: i64,
    e: u32,
) {
    let trunc = acc.len() as i64;
    for (c, e0) in monomials {
        if *e0 >= trunc {
            continue;
        }
        let mut j = 0i64;
        loop {
            let idx = e0 + j * m;
            if idx >= trunc {
                break;
            }
            let b = Integer::binomial_u(j as u32 + e - 1, e - 1).complete();
            acc[idx as usize] += b * c * sign;
            j += 1;
        }
    }
}

/// The Lambert expansion of H_k as an exact q-series, known below `trunc`.
pub fn lambert_expand(k: u32, trunc: i64) -> QSeries {
    assert!(k >= 1);
    let chi = chi_minus4();
    let e2k = euler_number(2 * k).unwrap();
    let mut acc = vec![Integer::new(); trunc.max(0) as usize];
    if k % 2 == 1 {
        // Σ χ(n) q^{2n} A_{2k}(q^{2n}) / (1−q^{2n})^{2k+1}, scaled by −1/E_{2k}
        let a = eulerian_poly(2 * k);
        let mut n = 1i64;
        while 2 * n < trunc {
            let s = chi.value(n);
            if s != 0 {
                let monomials: Vec<(Integer, i64)> = a
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (c.clone(), 2 * n * (1 + i as i64)))
                    .collect();
                accumulate_term(&mut acc, s, &monomials, 2 * n, 2 * k + 1);
            }
            n += 1;
        }
        let scale = -Rational::from((Integer::from(1), e2k));
        QSeries::new(0, acc.into_iter().map(Rational::from).collect(), trunc).scaled(&scale)
    } else {
        // Σ χ(n) q^n P_k(q^n) / (1−q^{2n})^{2k+1}, scaled by 1/(2^{2k} E_{2k})
        let p = p_k_poly(k);
        let mut n = 1i64;
        while n < trunc {
            let s = chi.value(n);
            if s != 0 {
                let monomials: Vec<(Integer, i64)> = p
                    .coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c != 0)
                    .map(|(i, c)| (c.clone(), n * (1 + i as i64)))
                    .collect();
                accumulate_term(&mut acc, s, &monomials, 2 * n, 2 * k + 1);
            }
            n += 1;
        }
        let scale = Rational::from((Integer::from(1), (Integer::from(1) << (2 * k)) * e2k));
        QSeries::new(0, acc.into_iter().map(Rational::from).collect(), trunc).scaled(&scale)
    }
}

/// Outcome of a coefficientwise identity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub identity: String,
    pub trunc: i64,
    pub holds: bool,
    /// Lowest exponent where the two sides disagree, if any.
    pub first_mismatch: Option<i64>,
}

impl IdentityReport {
    fn compare(identity: &str, lhs: &QSeries, rhs: &QSeries, trunc: i64) -> Self {
        let first_mismatch = lhs.first_mismatch(rhs);
        IdentityReport {
            identity: identity.to_string(),
            trunc,
            holds: first_mismatch.is_none(),
            first_mismatch,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "identity": self.identity,
            "trunc": self.trunc,
            "holds": self.holds,
            "first_mismatch": self.first_mismatch,
        })
    }
}

/// Lambert expansion vs the Eisenstein series H_k, coefficient by coefficient.
pub fn verify_theorem2(k: u32, trunc: i64) -> IdentityReport {
    let lhs = lambert_expand(k, trunc);
    let rhs = h_k_series(k, trunc);
    IdentityReport::compare(&format!("theorem2[k={k}]"), &lhs, &rhs, trunc)
}

/// The classical identities checked by [`verify_classical`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalIdentity {
    /// Σ_{n≥0} (−1)^n q^n/(1−q^{2n+1}) = (q⁴;q⁴)⁴_∞ / (q²;q²)²_∞
    Ramanujan,
    /// Σ_{n≥0} (−1)^n q^{2n}(1+q^{2n+1})/(1−q^{2n+1})³
    ///   = (q²;q²)⁶_∞ (q⁴;q⁴)⁴_∞ / (q;q)⁴_∞
    HouSun,
    /// The k = 3 specialisation: Lambert sum + 17·g = 61·g + g₂ + 16·g₃
    /// with g the central eta form of index 3 and g₂, g₃ its cusp companions.
    K3,
}

impl ClassicalIdentity {
    pub fn name(&self) -> &'static str {
        match self {
            ClassicalIdentity::Ramanujan => "ramanujan",
            ClassicalIdentity::HouSun => "hou-sun",
            ClassicalIdentity::K3 => "k3",
        }
    }
}

/// Check one of the classical Lambert/eta identities below `trunc`.
pub fn verify_classical(which: ClassicalIdentity, trunc: i64) -> IdentityReport {
    match which {
        ClassicalIdentity::Ramanujan => {
            let mut acc = vec![Integer::new(); trunc.max(0) as usize];
            let mut n = 0i64;
            while n < trunc {
                let sign = if n % 2 == 0 { 1 } else { -1 };
                accumulate_term(&mut acc, sign, &[(Integer::from(1), n)], 2 * n + 1, 1);
                n += 1;
            }
            let lhs = QSeries::new(0, acc.into_iter().map(Rational::from).collect(), trunc);
            // (q⁴;q⁴)²/(q²;q⁴)² = (q⁴;q⁴)⁴/(q²;q²)²
            let rhs = euler_product(4, trunc)
                .pow(4)
                .mul(&euler_product(2, trunc).pow(-2));
            IdentityReport::compare("ramanujan", &lhs, &rhs, trunc)
        }
        ClassicalIdentity::HouSun => {
            let mut acc = vec![Integer::new(); trunc.max(0) as usize];
            let mut n = 0i64;
            while 2 * n < trunc {
                let sign = if n % 2 == 0 { 1 } else { -1 };
                let monomials = [
                    (Integer::from(1), 2 * n),
                    (Integer::from(1), 4 * n + 1),
                ];
                accumulate_term(&mut acc, sign, &monomials, 2 * n + 1, 3);
                n += 1;
            }
            let lhs = QSeries::new(0, acc.into_iter().map(Rational::from).collect(), trunc);
            // (q²;q⁴)²(q⁴;q⁴)⁶/(q;q²)⁴ = (q²;q²)⁶(q⁴;q⁴)⁴/(q;q)⁴
            let rhs = euler_product(2, trunc)
                .pow(6)
                .mul(&euler_product(4, trunc).pow(4))
                .mul(&euler_product(1, trunc).pow(-4));
            IdentityReport::compare("hou-sun", &lhs, &rhs, trunc)
        }
        ClassicalIdentity::K3 => {
            // numerator 1 + 57t + 302t² + 302t³ + 57t⁴ + t⁵ = A_6(t)
            let a6 = eulerian_poly(6);
            let mut acc = vec![Integer::new(); trunc.max(0) as usize];
            let chi = chi_minus4();
            let mut n = 1i64;
            while 2 * n < trunc {
                let s = chi.value(n);
                if s != 0 {
                    let monomials: Vec<(Integer, i64)> = a6
                        .coeffs()
                        .iter()
                        .enumerate()
                        .map(|(i, c)| (c.clone(), 2 * n * (1 + i as i64)))
                        .collect();
                    accumulate_term(&mut acc, s, &monomials, 2 * n, 7);
                }
                n += 1;
            }
            let lambert = QSeries::new(0, acc.into_iter().map(Rational::from).collect(), trunc);

            let g = EtaQuotient::new(8, &[(4, 22), (8, 4), (2, -12)])
                .unwrap()
                .expand(trunc)
                .unwrap();
            let g2 = EtaQuotient::new(8, &[(4, 46), (2, -20), (8, -12)])
                .unwrap()
                .expand(trunc)
                .unwrap();
            let g3 = EtaQuotient::new(8, &[(8, 20), (2, -4), (4, -2)])
                .unwrap()
                .expand(trunc)
                .unwrap();

            let lhs = lambert.add(&g.scaled(&Rational::from(17)));
            let rhs = g
                .scaled(&Rational::from(61))
                .add(&g2)
                .add(&g3.scaled(&Rational::from(16)));
            IdentityReport::compare("k3", &lhs, &rhs, trunc)
        }
    }
}
