//! Number-theoretic and analytic checks: Euler numbers, Dirichlet beta
//! values, the Wallis-type radial limit, representation counts by sums of
//! squares/triangular numbers, and coefficient asymptotics.
//!
//! Contents (exact layer):
//!   euler_number      E_{2k} by exact inversion of the cosh series
//!   beta_odd          β(2k+1) = rational · π^{2k+1}
//!   t_count           #{(a,b,…) : triangular-number representation count}
//!   asymptotic_report coefficient of f_k vs its Eisenstein main term
//!   coefficient_growth_check   observed Deligne-type ratio for f_k − H_k
//!
//! Contents (float layer, MPFR-backed):
//!   wallis_check      (1−q)(q²;q²)⁴_∞/(q;q)²_∞ → π/2 as q → 1⁻
//!   limit_check       Richardson extrapolation of (1−q)^{2k+1} f_k(q)

use crate::basis::t_cusp_series;
use crate::bigfloat::{dec_string, euler_product_pent, pi};
use crate::cm::relative_error;
use crate::eisenstein::h_k_series;
use crate::etaq::{fk_quotient, triangular_gf};
use crate::qseries::QSeries;
use rug::ops::Pow;
use rug::{Complete, Float, Integer, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalyticsError {
    /// Euler numbers in the sech convention are indexed by even integers;
    /// asking for an odd one is a caller bug, not a zero.
    #[error("Euler number index {index} is odd")]
    OddIndex { index: u32 },
}

/// Euler number E_m from sech z = Σ_m E_m z^m / m!, m even.
///
/// Computed by exact series inversion of cosh z = Σ_j z^{2j}/(2j)! in the
/// variable w = z²: if Σ b_j w^j is the inverse then E_{2j} = b_j · (2j)!.
/// E_0 = 1, E_2 = −1, E_4 = 5, E_6 = −61, …
pub fn euler_number(m: u32) -> Result<Integer, AnalyticsError> {
    if m % 2 != 0 {
        return Err(AnalyticsError::OddIndex { index: m });
    }
    let terms = (m / 2 + 1) as usize;
    // cosh coefficients in w: a_j = 1/(2j)!
    let mut factorial = Integer::from(1);
    let mut a = Vec::with_capacity(terms);
    for j in 0..terms {
        if j > 0 {
            factorial *= 2 * j as u32 - 1;
            factorial *= 2 * j as u32;
        }
        a.push(Rational::from((Integer::from(1), factorial.clone())));
    }
    // b = a⁻¹ as a power series, b_0 = 1
    let mut b: Vec<Rational> = Vec::with_capacity(terms);
    b.push(Rational::from(1));
    for n in 1..terms {
        let mut acc = Rational::new();
        for k in 1..=n {
            acc += (&a[k] * &b[n - k]).complete();
        }
        b.push(-acc);
    }
    // E_m = b_{m/2} · m!
    let mut mfact = Integer::from(1);
    for i in 2..=m {
        mfact *= i;
    }
    let e = b[terms - 1].clone() * mfact;
    debug_assert!(e.is_integer());
    Ok(e.numer().clone())
}


/// β(2k+1) as an exact rational multiple of π^{2k+1} plus its float value.
pub struct BetaValue {
    pub k: u32,
    pub rational_part: Rational,
    pub float_value: Float,
}

/// β(2k+1) = ((−1)^k E_{2k} / (4^{k+1}(2k)!)) · π^{2k+1}.
///
/// k = 0, 1, 2 give the classical β(1) = π/4, β(3) = π³/32, β(5) = 5π⁵/1536.
pub fn beta_odd(k: u32, prec: u32) -> BetaValue {
    let e = euler_number(2 * k).unwrap();
    let num = if k % 2 == 0 { e } else { -e };
    let den = Integer::factorial(2 * k).complete() << (2 * k + 2);
    let rational_part = Rational::from((num, den));
    let float_value = Float::with_val(prec, pi(prec + 32).pow(2 * k + 1) * &rational_part);
    BetaValue { k, rational_part, float_value }
}

/// The Wallis-type product (1−q)·(q²;q²)⁴_∞/(q;q)²_∞, which tends to π/2 as
/// q → 1⁻ (and to 1 as q → 0⁺). Evaluated at the precision of `q`.
pub fn wallis_check(q: &Float) -> Float {
    let prec = q.prec();
    let work = prec + 32;
    let qw = Float::with_val(work, q);
    let p1 = euler_product_pent(&qw);
    let p2 = euler_product_pent(&qw.clone().square());
    Float::with_val(prec, Float::with_val(work, 1 - &qw) * p2.pow(4) / p1.square())
}

/// One evaluation point of [`limit_check`].
pub struct LimitRow {
    pub q: Float,
    pub value: Float,
}

/// Radial-limit verification of lim_{q→1⁻} (1−q)^{2k+1} f_k(q).
pub struct LimitReport {
    pub k: u32,
    pub rows: Vec<LimitRow>,
    pub extrapolated: Float,
    pub target: Float,
    pub rel_dev: f64,
    /// The limit restated exactly: π^{2k+1}/2^{4k+3} must coincide with
    /// |(2k)!·β(2k+1)/(2^{2k+1}E_{2k})| as a rational multiple of π^{2k+1}.
    pub identity_exact: bool,
}

impl LimitReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "k": self.k,
            "rows": self.rows.iter().map(|r| serde_json::json!({
                "q": dec_string(&r.q),
                "value": dec_string(&r.value),
            })).collect::<Vec<_>>(),
            "extrapolated": dec_string(&self.extrapolated),
            "target": dec_string(&self.target),
            "rel_dev": format!("{:.3e}", self.rel_dev),
            "identity_exact": self.identity_exact,
        })
    }
}

/// The standard evaluation grid q_j = 1 − 2^{−j}, j = 4..=12.
pub fn limit_grid(prec: u32) -> Vec<Float> {
    (4..=12)
        .map(|j| Float::with_val(prec, 1) - (Float::with_val(prec, 1) >> j))
        .collect()
}

/// f_k(q) numerically: q^{k+1}·(q⁴;q⁴)^{8k−2}_∞ (q⁸;q⁸)⁴_∞ / (q²;q²)^{4k}_∞.
fn fk_float(k: u32, q: &Float) -> Float {
    let q2 = q.clone().square();
    let q4 = q2.clone().square();
    let q8 = q4.clone().square();
    let p2 = euler_product_pent(&q2);
    let p4 = euler_product_pent(&q4);
    let p8 = euler_product_pent(&q8);
    q.clone().pow(k + 1) * p4.pow(8 * k as i32 - 2) * p8.pow(4) / p2.pow(4 * k as i32)
}

/// π^{2k+1}/2^{4k+3} = |(2k)!·β(2k+1)/(2^{2k+1}E_{2k})| reduces, with
/// β(2k+1) = c·π^{2k+1}, to 1/2^{4k+3} = |(2k)!·c/(2^{2k+1}E_{2k})| — an
/// identity between exact rationals.
fn limit_identity_exact(k: u32) -> bool {
    let c = beta_odd(k, 64).rational_part;
    let lhs = Rational::from((Integer::from(1), Integer::from(1) << (4 * k + 3)));
    let rhs_num = c * Integer::factorial(2 * k).complete();
    let rhs_den = Rational::from(euler_number(2 * k).unwrap()) * (Integer::from(1) << (2 * k + 1));
    (rhs_num / rhs_den).abs() == lhs
}

/// Evaluate (1−q)^{2k+1}·f_k(q) along `grid` and extrapolate to q = 1 with
/// a cubic through the four finest points in ε = 1−q (the corrections are a
/// power series in ε up to exponentially small modular terms, so polynomial
/// extrapolation is honest). Compares with π^{2k+1}/2^{4k+3} and checks the
/// exact rational form of the limit.
pub fn limit_check(k: u32, grid: &[Float]) -> LimitReport {
    assert!(k >= 1 && grid.len() >= 2, "need k ≥ 1 and at least two grid points");
    let prec = grid.iter().map(|q| q.prec()).max().unwrap();
    let work = prec + 32;
    let rows: Vec<LimitRow> = grid
        .iter()
        .map(|q| {
            let qw = Float::with_val(work, q);
            let eps = Float::with_val(work, 1 - &qw);
            let v = eps.pow(2 * k + 1) * fk_float(k, &qw);
            LimitRow { q: q.clone(), value: Float::with_val(prec, v) }
        })
        .collect();

    // Neville tableau at ε = 0 over the finest four points
    let take = 4.min(rows.len());
    let pts: Vec<(Float, Float)> = rows[rows.len() - take..]
        .iter()
        .map(|row| {
            let eps = Float::with_val(work, 1 - Float::with_val(work, &row.q));
            (eps, Float::with_val(work, &row.value))
        })
        .collect();
    let mut col: Vec<Float> = pts.iter().map(|p| p.1.clone()).collect();
    for m in 1..take {
        for i in 0..take - m {
            let xi = &pts[i].0;
            let xim = &pts[i + m].0;
            let num = Float::with_val(work, xim * &col[i]) - Float::with_val(work, xi * &col[i + 1]);
            col[i] = num / Float::with_val(work, xim - xi);
        }
    }
    let extrapolated = Float::with_val(prec, &col[0]);
    let target = Float::with_val(prec, pi(work).pow(2 * k + 1) >> (4 * k + 3));
    let rel_dev = relative_error(&extrapolated, &target).to_f64();
    LimitReport {
        k,
        rows,
        extrapolated,
        target,
        rel_dev,
        identity_exact: limit_identity_exact(k),
    }
}

/// Ψ(q)^{4k} Ψ(q²)² to the given truncation — the generating function of
/// t_k, aligned so that [qⁿ] is t_k(n).
fn t_series(k: u32, trunc: i64) -> QSeries {
    let psi = triangular_gf(trunc);
    let psi2 = triangular_gf(trunc / 2 + 1).rescale(2).truncated(trunc);
    psi.pow(4 * k as i64).mul(&psi2.mul(&psi2))
}

/// t_k(n): the number of ordered tuples (n_1,…,n_{4k},a,b) over ℕ (zero
/// included) with n = T_{n_1}+…+T_{n_{4k}}+2(T_a+T_b).
pub fn t_count(k: u32, n: u64) -> Integer {
    assert!(k >= 1);
    let (num, den) = t_series(k, n as i64 + 1)
        .coeff(n as i64)
        .unwrap()
        .into_numer_denom();
    debug_assert_eq!(den, 1);
    num
}

/// t_k(0), …, t_k(n_max) in one pass.
pub fn t_counts(k: u32, n_max: u64) -> Vec<Integer> {
    assert!(k >= 1);
    let series = t_series(k, n_max as i64 + 1);
    (0..=n_max as i64)
        .map(|n| {
            let (num, den) = series.coeff(n).unwrap().into_numer_denom();
            debug_assert_eq!(den, 1);
            num
        })
        .collect()
}

/// One row of [`asymptotic_report`]: exact t_k(n) against the Eisenstein
/// main term [q^{2n+k+1}] H_k, with the cusp remainder.
pub struct AsymptoticRow {
    pub n: u64,
    pub exact: Integer,
    pub main_term: Rational,
    pub ratio: f64,
    pub cusp_coeff: Rational,
}

/// Rows n = 0..=n_max. The main term is always positive on the support of
/// f_k, so the ratio column is well defined.
pub fn asymptotic_report(k: u32, n_max: u64) -> Vec<AsymptoticRow> {
    assert!(k >= 1);
    let top = 2 * n_max as i64 + k as i64 + 2;
    let f = fk_quotient(k).expand(top).unwrap();
    let h = h_k_series(k, top);
    (0..=n_max)
        .map(|n| {
            let e = 2 * n as i64 + k as i64 + 1;
            let (exact, den) = f.coeff(e).unwrap().into_numer_denom();
            debug_assert_eq!(den, 1);
            let main_term = h.coeff(e).unwrap();
            let cusp_coeff = Rational::from(&exact) - &main_term;
            let ratio = Rational::from(&exact).to_f64() / main_term.to_f64();
            AsymptoticRow { n, exact, main_term, ratio, cusp_coeff }
        })
        .collect()
}

/// Observed Deligne-type ratio for the cusp component T = f_k − H_k:
/// C_obs = max_{n ≤ n_max} |[qⁿ]T| / (d(n)·n^k), with the exponent where the
/// maximum is attained. Reported, not asserted: T is a combination of
/// eigenforms, so the literal constant-1 bound need not apply.
pub struct GrowthReport {
    pub k: u32,
    pub n_max: u64,
    pub c_obs: f64,
    pub argmax_n: u64,
}

impl GrowthReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "k": self.k,
            "n_max": self.n_max,
            "c_obs": self.c_obs,
            "argmax_n": self.argmax_n,
        })
    }
}

fn divisor_count(n: u64) -> u64 {
    let mut count = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            count += if d * d == n { 1 } else { 2 };
        }
        d += 1;
    }
    count
}

pub fn coefficient_growth_check(k: u32, n_max: u64) -> GrowthReport {
    assert!(k >= 1);
    let t = t_cusp_series(k, n_max as i64 + 1);
    let mut c_obs = 0.0f64;
    let mut argmax_n = 0u64;
    for (e, c) in t.iter() {
        if *c == 0 {
            continue;
        }
        let n = e as u64;
        let bound = divisor_count(n) as f64 * (n as f64).powi(k as i32);
        let ratio = c.to_f64().abs() / bound;
        if ratio > c_obs {
            c_obs = ratio;
            argmax_n = n;
        }
    }
    GrowthReport { k, n_max, c_obs, argmax_n }
}
