//! Shared arbitrary-precision helpers (MPFR via rug).
//!
//! Everything works at the precision of its input (or the explicit `prec`
//! argument); callers add their own guard bits and round once at the end.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

pub(crate) fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub(crate) fn ln2(prec: u32) -> Float {
    Float::with_val(prec, Constant::Log2)
}

pub(crate) fn sqrt2(prec: u32) -> Float {
    Float::with_val(prec, 2).sqrt()
}

/// Γ(3/4).
pub(crate) fn gamma_three_quarters(prec: u32) -> Float {
    Float::with_val(prec, Rational::from((3, 4))).gamma()
}

/// a = π^{1/4}/Γ(3/4), the constant every CM value is built from.
pub(crate) fn a_const(prec: u32) -> Float {
    pi(prec).root(4) / gamma_three_quarters(prec)
}

/// (q; q)_∞ = Π_{n≥1}(1 − qⁿ) for 0 ≤ q < 1, at the precision of `q`.
pub(crate) fn euler_product_float(q: &Float) -> Float {
    let prec = q.prec();
    assert!(q.is_finite() && *q >= 0 && *q < 1, "need 0 ≤ q < 1");
    let eps = Float::with_val(prec, 1) >> (prec + 16);
    let mut acc = Float::with_val(prec, 1);
    let mut qn = q.clone();
    while qn > eps {
        acc *= Float::with_val(prec, 1 - &qn);
        qn *= q;
    }
    acc
}

/// (q; q)_∞ via the pentagonal-number series
/// 1 + Σ_{g≥1} (−1)^g (q^{g(3g−1)/2} + q^{g(3g+1)/2}) — O(√(prec/(1−q)))
/// terms instead of the raw product's O(prec/(1−q)), which matters when q
/// is close to 1.
///
/// Near q = 1 the value is ≈ e^{−π²/(6x)} with x = −log q while the terms
/// are of order 1, so π²/(6x·log2) bits cancel; that budget is added to the
/// working precision internally and the result is accurate to the precision
/// of `q`.
pub(crate) fn euler_product_pent(q: &Float) -> Float {
    let prec = q.prec();
    assert!(q.is_finite() && *q >= 0 && *q < 1, "need 0 ≤ q < 1");
    let x = -q.to_f64().ln();
    let cancel = if x > 0.0 {
        (std::f64::consts::PI.powi(2) / (6.0 * x * std::f64::consts::LN_2)).ceil() as u32
    } else {
        // q rounds to 1 in f64: outside the supported range
        panic!("q too close to 1 to size the cancellation budget");
    };
    let work = prec + cancel + 32;
    let qw = Float::with_val(work, q);
    let eps = Float::with_val(work, 1) >> (work + 16);
    let mut acc = Float::with_val(work, 1);
    let mut g: u64 = 1;
    loop {
        let e1 = g * (3 * g - 1) / 2;
        let t1 = qw.clone().pow(u32::try_from(e1).unwrap());
        let t2 = qw.clone().pow(u32::try_from(e1 + g).unwrap());
        let done = t1 < eps;
        let term = t1 + t2;
        if g % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
        if done {
            break;
        }
        g += 1;
    }
    Float::with_val(prec, acc)
}

/// Decimal rendering carrying the full stated precision of `x`.
pub(crate) fn dec_string(x: &Float) -> String {
    let digits = (x.prec() as f64 * 0.30103) as usize + 2;
    x.to_string_radix(10, Some(digits))
}

/// Σ_{n∈ℤ} q^{n²} = 1 + 2 Σ_{n≥1} q^{n²} for 0 ≤ q < 1.
pub(crate) fn theta_sum_float(q: &Float) -> Float {
    let prec = q.prec();
    let eps = Float::with_val(prec, 1) >> (prec + 16);
    let mut acc = Float::with_val(prec, 1);
    // q^{n²} from q^{(n−1)²} by two multiplications: n² = (n−1)² + (2n−1)
    let mut cur = q.clone();
    let mut odd = q.clone();
    loop {
        if cur < eps {
            break;
        }
        acc += cur.clone() << 1;
        odd *= Float::with_val(prec, q * q);
        cur *= &odd;
    }
    acc
}

/// Σ_{n≥0} q^{n(n+1)/2} for 0 ≤ q < 1 (the triangular-number theta).
pub(crate) fn psi_sum_float(q: &Float) -> Float {
    let prec = q.prec();
    let eps = Float::with_val(prec, 1) >> (prec + 16);
    let mut acc = Float::with_val(prec, 1);
    let mut cur = Float::with_val(prec, 1);
    let mut step = q.clone();
    loop {
        cur *= &step; // q^{T_n} from q^{T_{n−1}}
        if cur < eps {
            break;
        }
        acc += &cur;
        step *= q;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The pentagonal series and the raw product are independent routes to
    /// (q; q)_∞; they must agree to working precision even where the series
    /// cancels heavily (q = 0.99 loses ≈ 237 bits).
    #[test]
    fn pent_matches_product() {
        for qv in [0.3f64, 0.5, 0.9, 0.99] {
            let q = Float::with_val(160, qv);
            let a = euler_product_float(&q);
            let b = euler_product_pent(&q);
            let rel = (a.clone() - &b).abs() / a;
            assert!(rel.to_f64() < 1e-40, "q = {qv}");
        }
    }

    /// θ(q) = Σ q^{n²} and ψ(q) = Σ q^{n(n+1)/2} against direct powers.
    #[test]
    fn theta_psi_sums_match_direct() {
        let q = Float::with_val(128, 0.4f64);
        let mut theta = Float::with_val(128, 0);
        let mut psi = Float::with_val(128, 0);
        for n in 0u32..200 {
            theta += q.clone().pow(n * n) * if n == 0 { 1 } else { 2 };
            psi += q.clone().pow(n * (n + 1) / 2);
        }
        let t = theta_sum_float(&q);
        let p = psi_sum_float(&q);
        assert!((t - theta).abs().to_f64() < 1e-35);
        assert!((p - psi).abs().to_f64() < 1e-35);
    }
}
