//! Truncated formal power series in q over exact big rationals.
//!
//! A [`QSeries`] stores the coefficients of q^offset .. q^(truncation-1)
//! exactly; everything at or beyond `truncation` is *unknown*, not zero.
//! All arithmetic propagates truncation pessimistically so that no operation
//! ever reports a coefficient it cannot actually know:
//!
//! * add/sub: truncation = min of the two truncations
//! * mul:     truncation = min(t_a + lead_b, t_b + lead_a)
//! * inv:     the relative precision (truncation − lead) is preserved
//!
//! Negative exponents are allowed (Laurent tails), which is what `inv` and
//! `pow` with negative exponents produce.
//!
//! Contents:
//!   QSeries         main type, normalised so the lead coefficient is nonzero
//!   QSeriesError    unknown-coefficient / zero-inverse errors
//!   euler_product   (q^δ; q^δ)_∞ via the pentagonal number theorem

use rug::{Complete, Rational};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::min;
use std::fmt;

/// Errors for operations that would otherwise have to lie about coefficients.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QSeriesError {
    /// Asked for a coefficient at or beyond the truncation order.
    #[error("coefficient of q^{exponent} is unknown: series truncated at q^{truncation}")]
    UnknownCoefficient { exponent: i64, truncation: i64 },
    /// The zero series has no multiplicative inverse.
    #[error("cannot invert the zero series")]
    ZeroInverse,
    /// Bad serialized form.
    #[error("invalid series data: {0}")]
    Parse(String),
}

/// A formal Laurent series Σ c_e q^e with exact rational coefficients,
/// known exactly for `offset ≤ e < truncation`.
///
/// Invariants kept by every constructor and operation:
/// * the zero series stores no coefficients and `offset == truncation`;
/// * otherwise `coeffs[0] != 0`, `coeffs.len() == truncation − offset`, and
///   `coeffs[i]` is the coefficient of `q^(offset + i)` (interior zeros are
///   genuine known-zero coefficients).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    offset: i64,
    trunc: i64,
    coeffs: Vec<Rational>,
}

impl QSeries {
    /// Build a series from raw coefficients starting at `offset`.
    /// Coefficients past `trunc` are dropped; missing ones up to `trunc`
    /// are taken to be known zeros. Leading zeros are normalised away.
    pub fn new(offset: i64, coeffs: Vec<Rational>, trunc: i64) -> Self {
        let mut s = QSeries { offset, trunc, coeffs };
        s.normalize();
        s
    }

    /// Series with integer coefficients — convenient for fixtures.
    pub fn from_ints(offset: i64, ints: &[i64], trunc: i64) -> Self {
        Self::new(offset, ints.iter().map(|&n| Rational::from(n)).collect(), trunc)
    }

    /// The zero series, known to be zero below `trunc`.
    pub fn zero(trunc: i64) -> Self {
        QSeries { offset: trunc, trunc, coeffs: Vec::new() }
    }

    /// The constant 1, known up to `trunc`.
    pub fn one(trunc: i64) -> Self {
        Self::monomial(Rational::from(1), 0, trunc)
    }

    /// c · q^e, known up to `trunc`.
    pub fn monomial(c: Rational, e: i64, trunc: i64) -> Self {
        Self::new(e, vec![c], trunc)
    }

    fn normalize(&mut self) {
        // Drop anything at or beyond the truncation order.
        let keep = (self.trunc - self.offset).max(0) as usize;
        self.coeffs.truncate(keep);
        // Leading zeros are not real information: bump the offset past them.
        let lead = self.coeffs.iter().take_while(|c| **c == 0).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.offset += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.offset = self.trunc;
            return;
        }
        // Pad interior known-zeros out to the truncation order.
        let want = (self.trunc - self.offset) as usize;
        self.coeffs.resize(want, Rational::new());
    }

    /// Exponent of the first (nonzero) stored coefficient, `None` for zero.
    pub fn leading_exponent(&self) -> Option<i64> {
        if self.coeffs.is_empty() { None } else { Some(self.offset) }
    }

    /// First exponent at which the series is no longer known.
    pub fn truncation(&self) -> i64 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of q^e. Exponents below the leading term are known zeros;
    /// exponents at or past the truncation are an error, never a silent zero.
    pub fn coeff(&self, e: i64) -> Result<Rational, QSeriesError> {
        if e >= self.trunc {
            return Err(QSeriesError::UnknownCoefficient { exponent: e, truncation: self.trunc });
        }
        if e < self.offset {
            return Ok(Rational::new());
        }
        Ok(self.coeffs[(e - self.offset) as usize].clone())
    }

    /// Iterate over the stored coefficient range as (exponent, coefficient).
    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> {
        let offset = self.offset;
        self.coeffs.iter().enumerate().map(move |(i, c)| (offset + i as i64, c))
    }

    /// Same series with the truncation lowered to `min(trunc, self.trunc)`.
    pub fn truncated(&self, trunc: i64) -> Self {
        let t = min(trunc, self.trunc);
        Self::new(self.offset, self.coeffs.clone(), t)
    }

    // `offset` of the zero series is its truncation; this makes the
    // truncation bookkeeping below uniform across zero and nonzero operands.
    fn lead_or_trunc(&self) -> i64 {
        self.offset
    }

    pub fn add(&self, other: &Self) -> Self {
        let trunc = min(self.trunc, other.trunc);
        let offset = min(self.lead_or_trunc(), other.lead_or_trunc()).min(trunc);
        let mut coeffs = vec![Rational::new(); (trunc - offset) as usize];
        for (e, c) in self.iter().chain(other.iter()) {
            if e < trunc {
                coeffs[(e - offset) as usize] += c;
            }
        }
        Self::new(offset, coeffs, trunc)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| (-c).complete()).collect();
        QSeries { offset: self.offset, trunc: self.trunc, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiply by the scalar c.
    pub fn scaled(&self, c: &Rational) -> Self {
        if *c == 0 {
            return Self::zero(self.trunc);
        }
        let coeffs = self.coeffs.iter().map(|x| (x * c).complete()).collect();
        QSeries { offset: self.offset, trunc: self.trunc, coeffs }
    }

    /// Multiply by q^e (shifts the truncation window along with everything).
    pub fn shifted(&self, e: i64) -> Self {
        QSeries { offset: self.offset + e, trunc: self.trunc + e, coeffs: self.coeffs.clone() }
    }

    /// Schoolbook convolution. The result is known exactly below
    /// min(t_a + lead_b, t_b + lead_a): past that, unknown coefficients of
    /// one factor would contribute.
    ///
    /// Time: O(n²) big-rational operations for n stored coefficients.
    pub fn mul(&self, other: &Self) -> Self {
        let trunc = min(
            self.trunc + other.lead_or_trunc(),
            other.trunc + self.lead_or_trunc(),
        );
        if self.is_zero() || other.is_zero() {
            return Self::zero(trunc);
        }
        let offset = self.offset + other.offset;
        if offset >= trunc {
            return Self::zero(trunc);
        }
        let mut coeffs = vec![Rational::new(); (trunc - offset) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            let room = trunc - self.offset - i as i64 - other.offset;
            if room <= 0 {
                // this and all later rows land entirely past the truncation
                break;
            }
            for (j, b) in self.coeffs_window(other, room as usize) {
                coeffs[i + j] += (a * b).complete();
            }
        }
        Self::new(offset, coeffs, trunc)
    }

    // Nonzero coefficients of `other` with index < emax.
    fn coeffs_window<'a>(
        &self,
        other: &'a Self,
        emax: usize,
    ) -> impl Iterator<Item = (usize, &'a Rational)> {
        other
            .coeffs
            .iter()
            .take(emax)
            .enumerate()
            .filter(|(_, b)| **b != 0)
    }

    /// Multiplicative inverse. Every nonzero series is invertible as a
    /// Laurent series; the relative precision (truncation − lead) carries
    /// over unchanged.
    pub fn inv(&self) -> Result<Self, QSeriesError> {
        if self.is_zero() {
            return Err(QSeriesError::ZeroInverse);
        }
        let p = (self.trunc - self.offset) as usize; // relative precision
        let a0 = &self.coeffs[0];
        let a0_inv = a0.clone().recip();
        let mut b = Vec::with_capacity(p);
        b.push(a0_inv.clone());
        // b_n = -(1/a_0) Σ_{k=1..n} a_k b_{n-k}
        for n in 1..p {
            let mut acc = Rational::new();
            for k in 1..=n {
                let ak = &self.coeffs[k];
                if *ak != 0 {
                    acc += (ak * &b[n - k]).complete();
                }
            }
            acc *= &a0_inv;
            b.push(-acc);
        }
        Ok(Self::new(-self.offset, b, -self.offset + p as i64))
    }

    pub fn div(&self, other: &Self) -> Result<Self, QSeriesError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Integer power by repeated squaring; negative exponents go through
    /// `inv` first. Panics if asked for a nonpositive power of zero.
    pub fn pow(&self, e: i64) -> Self {
        if e < 0 {
            return self
                .inv()
                .expect("nonpositive power of the zero series")
                .pow(-e);
        }
        if e == 0 {
            assert!(!self.is_zero(), "nonpositive power of the zero series");
            // a^0 = 1, known to the same relative precision as a.
            return Self::one(self.trunc - self.offset);
        }
        let mut base = self.clone();
        let mut acc: Option<QSeries> = None;
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(r) => r.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc.unwrap()
    }

    /// Substitute q ↦ q^m: exponents and the truncation order scale by m.
    pub fn rescale(&self, m: u32) -> Self {
        assert!(m >= 1, "rescale factor must be positive");
        let m64 = m as i64;
        if self.is_zero() {
            return Self::zero(self.trunc * m64);
        }
        let mut coeffs = vec![Rational::new(); ((self.trunc - self.offset) * m64) as usize - (m as usize - 1)];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * m as usize] = c.clone();
        }
        Self::new(self.offset * m64, coeffs, self.trunc * m64)
    }

    /// First exponent (below both truncations) where the two series differ.
    pub fn first_mismatch(&self, other: &Self) -> Option<i64> {
        let trunc = min(self.trunc, other.trunc);
        let start = min(self.lead_or_trunc(), other.lead_or_trunc());
        for e in start..trunc {
            if self.coeff(e).unwrap() != other.coeff(e).unwrap() {
                return Some(e);
            }
        }
        None
    }

    /// Equality of every coefficient the two series both know.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_mismatch(other).is_none()
    }
}

/// (q^δ; q^δ)_∞ = ∏_{n≥1} (1 − q^{δn}), truncated at `trunc`, expanded by
/// the pentagonal number theorem: Σ_{g∈ℤ} (−1)^g q^{δ·g(3g−1)/2}.
///
/// Time: O(√(trunc/δ)) nonzero coefficients, so effectively the cost of
/// allocating the coefficient vector.
pub fn euler_product(delta: u32, trunc: i64) -> QSeries {
    assert!(delta >= 1, "euler_product needs δ ≥ 1");
    let d = delta as i64;
    let n = trunc.max(0) as usize;
    let mut coeffs = vec![Rational::new(); n];
    if n > 0 {
        coeffs[0] = Rational::from(1);
    }
    let mut g: i64 = 1;
    loop {
        let e1 = d * g * (3 * g - 1) / 2; // pentagonal g
        let e2 = d * g * (3 * g + 1) / 2; // pentagonal -g
        if e1 >= trunc {
            break;
        }
        let sign = if g % 2 == 1 { -1 } else { 1 };
        coeffs[e1 as usize] = Rational::from(sign);
        if e2 < trunc {
            coeffs[e2 as usize] = Rational::from(sign);
        }
        g += 1;
    }
    QSeries::new(0, coeffs, trunc)
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O(q^{})", self.trunc);
        }
        let mut shown = 0;
        let mut first = true;
        for (e, c) in self.iter() {
            if *c == 0 {
                continue;
            }
            if shown == 16 {
                write!(f, " + ...")?;
                break;
            }
            let (sign, mag) = if *c < 0 {
                ("-", (-c).complete())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            match (mag == 1, e) {
                (true, 0) => write!(f, "1")?,
                (true, _) => write!(f, "q^{}", e)?,
                (false, 0) => write!(f, "{}", mag)?,
                (false, _) => write!(f, "{}*q^{}", mag, e)?,
            }
            shown += 1;
        }
        write!(f, " + O(q^{})", self.trunc)
    }
}

// Wire format: {"offset": i, "truncation": t, "coeffs": ["p/q", ...]} with
// coefficients as exact decimal-free strings, ascending from the offset.
#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    offset: i64,
    truncation: i64,
    coeffs: Vec<String>,
}

impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SeriesRepr {
            offset: self.offset,
            truncation: self.trunc,
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        let mut coeffs = Vec::with_capacity(repr.coeffs.len());
        for s in &repr.coeffs {
            let c: Rational = s
                .trim()
                .parse()
                .map_err(|e| D::Error::custom(format!("bad rational {s:?}: {e}")))?;
            coeffs.push(c);
        }
        Ok(QSeries::new(repr.offset, coeffs, repr.truncation))
    }
}
