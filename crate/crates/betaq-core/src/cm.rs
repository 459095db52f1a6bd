//! Evaluations at the CM points τ_r = 2^r i.
//!
//! Conventions: q = e^{2πiτ}, so q(τ_r) = e^{−2^{r+1}π}; a = π^{1/4}/Γ(3/4).
//! The chain: the alternating lattice sums L_ℓ pin down η(2^k i) (product
//! lemma), those pin down the generators F(τ_r), F(2τ_r), θ(2τ_r), and the
//! basis decomposition of T = f_k − H_k then gives H_k(τ_r) in closed form.
//! Every closed form has a direct numeric counterpart (eta products, theta
//! sums, or raw q-expansion sums) so the two routes can be compared.
//!
//! Contents:
//!   lattice_sum, lattice_sum_naive          L_ℓ, fast and oracle versions
//!   eta_cm_closed / eta_cm_direct           η(2^k i)
//!   f_cm_*, f2_cm_*, theta2_cm_*            F(τ_r), F(2τ_r), θ(2τ_r)
//!   psi_cm_direct, fk_cm_direct             Ψ(q(τ_r)), f_k(τ_r)
//!   CmContext, hk_cm_closed, hk_cm_direct   H_k(τ_r) both ways
//!
//! All public functions take a target precision `prec` in bits, work with
//! guard bits internally, and round the result to `prec`.

use crate::basis::{build_basis, cusp_conditions, decompose, t_cusp_series};
use crate::bigfloat::{a_const, euler_product_float, ln2, pi, psi_sum_float, theta_sum_float};
use crate::eisenstein::h_k_series;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

const GUARD: u32 = 64;

/// |x − y| / |y| (or |x − y| if y = 0), at the larger of the two precisions.
pub fn relative_error(x: &Float, y: &Float) -> Float {
    let prec = x.prec().max(y.prec());
    let diff = Float::with_val(prec, x - y).abs();
    if y.is_zero() {
        diff
    } else {
        diff / Float::with_val(prec, y).abs()
    }
}

/// L_ℓ = Σ_{m,n≥1} (−1)^m / (n² + 4^{ℓ−1} m²).
///
/// Computed by collapsing the inner sum with
/// Σ_{n≥1} 1/(n²+a²) = (πa·coth(πa) − 1)/(2a²) at a = 2^{ℓ−1}m and splitting
/// coth(x) = 1 + 2/(e^{2x}−1); the elementary parts sum to alternating zeta
/// values and what is left converges like e^{−2π·2^{ℓ−1}m}:
///
///   L_ℓ = −π·log2/2^ℓ + π²/(24·4^{ℓ−1})
///         + Σ_{m≥1} (−1)^m (π/(2^{ℓ−1}m)) / (e^{2π·2^{ℓ−1}m} − 1).
pub fn lattice_sum(ell: u32, prec: u32) -> Float {
    assert!(ell >= 1, "lattice sums are indexed from 1");
    let work = prec + GUARD;
    let pi = pi(work);
    let eps = Float::with_val(work, 1) >> (prec + GUARD / 2);
    let mut acc = -(pi.clone() * ln2(work)) >> ell;
    acc += (pi.clone().square() / 24) >> (2 * (ell - 1));
    let two_pi = pi.clone() << 1;
    let mut m = 1u32;
    loop {
        let a_m = Float::with_val(work, m) << (ell - 1);
        let denom = Float::with_val(work, &two_pi * &a_m).exp() - 1u32;
        let term = Float::with_val(work, &pi / &a_m) / denom;
        let done = term < eps;
        if m % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
        if done {
            break;
        }
        m += 1;
    }
    Float::with_val(prec, acc)
}

/// f64 oracle for [`lattice_sum`]: sums the double series head-on with a
/// midpoint-corrected arctangent tail for the inner sum and iterated
/// averaging of the alternating outer partial sums. Good to ~1e−10.
pub fn lattice_sum_naive(ell: u32) -> f64 {
    assert!(ell >= 1);
    let scale = 2f64.powi(ell as i32 - 1);
    let inner_terms = 4000usize;
    let outer_terms = 1200usize;
    let mut running = 0.0;
    let mut partials = Vec::with_capacity(outer_terms);
    for m in 1..=outer_terms {
        let a = scale * m as f64;
        let a2 = a * a;
        let mut inner = 0.0;
        for n in 1..=inner_terms {
            inner += 1.0 / (n as f64 * n as f64 + a2);
        }
        let edge = inner_terms as f64 + 0.5;
        inner += (std::f64::consts::FRAC_PI_2 - (edge / a).atan()) / a;
        running += if m % 2 == 0 { inner } else { -inner };
        partials.push(running);
    }
    // the outer terms behave like c/m: iterated averaging of the last few
    // partial sums kills the alternating residual to far below f64 noise
    let window = 24.min(partials.len());
    let mut avg: Vec<f64> = partials[partials.len() - window..].to_vec();
    while avg.len() > 1 {
        avg = avg.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    avg[0]
}

/// L_1 .. L_count, each at `work` bits.
fn lattice_values(count: u32, work: u32) -> Vec<Float> {
    (1..=count).map(|l| lattice_sum(l, work)).collect()
}

/// Σ_{m=1}^{upto} 2^m L_m over a precomputed table.
fn weighted_sum(lat: &[Float], upto: u32, work: u32) -> Float {
    let mut s = Float::with_val(work, 0);
    for m in 1..=upto {
        s += lat[m as usize - 1].clone() << m;
    }
    s
}

/// η(2^k i) in closed form:
///
///   η(2^k i) = a / 2^{(k+1)/2} · exp(−π(2^k−1)²/(12·2^k) − (1/2π) Σ_{ℓ=1}^k 2^ℓ L_ℓ).
///
/// k = 0 reduces to the classical η(i) = a/√2.
pub fn eta_cm_closed(k: u32, prec: u32) -> Float {
    let work = prec + GUARD;
    let pi = pi(work);
    let lat = lattice_values(k, work);
    let t = (Integer::from(1) << k) - 1u32;
    let c = Rational::from((Integer::from(&t * &t), Integer::from(12) << k));
    let mut expo = -Float::with_val(work, &pi * &c);
    expo -= weighted_sum(&lat, k, work) / (pi << 1);
    let denom = Float::with_val(work, Integer::from(1) << (k + 1)).sqrt();
    Float::with_val(prec, a_const(work) / denom * expo.exp())
}

/// η(2^k i) from the definition: q^{1/24}(q;q)_∞ at q = e^{−2π·2^k}.
pub fn eta_cm_direct(k: u32, prec: u32) -> Float {
    let work = prec + GUARD;
    let pi = pi(work);
    let q = (-(pi.clone() << (k + 1))).exp();
    let pre = (-(pi << k) / 12u32).exp();
    Float::with_val(prec, pre * euler_product_float(&q))
}

/// Ψ(q) = Σ_{n≥0} q^{n(n+1)/2} at q = e^{−2^{r+1}π}, i.e. at τ = 2^r i.
pub fn psi_cm_direct(r: u32, prec: u32) -> Float {
    let work = prec + GUARD;
    let q = (-(pi(work) << (r + 1))).exp();
    Float::with_val(prec, psi_sum_float(&q))
}

/// F(τ_r) = η(2^{r+2}i)⁸/η(2^{r+1}i)⁴ in closed form:
///   a⁴/2^{2r+8} · exp(−2π(2^{r+1}+2^r−1)/3 − (2/π)Σ_{m≤r+1}2^mL_m − (2^{r+4}/π)L_{r+2}).
pub fn f_cm_closed(r: u32, prec: u32) -> Float {
    let work = prec + GUARD;
    let pi = pi(work);
    let lat = lattice_values(r + 2, work);
    let c = Rational::from((((Integer::from(3) << r) - 1u32) << 1, Integer::from(3)));
    let mut expo = -Float::with_val(work, &pi * &c);
    expo -= (weighted_sum(&lat, r + 1, work) << 1) / &pi;
    expo -= (lat[r as usize + 1].clone() << (r + 4)) / &pi;
    Float::with_val(prec, (a_const(work).pow(4) >> (2 * r + 8)) * expo.exp())
}

/// F(τ_r) from eta products evaluated directly.
pub fn f_cm_direct(r: u32, prec: u32) -> Float {
    let work = prec + GUARD;
    let v = eta_cm_direct(r + 2, work).pow(8) / eta_cm_direct(r + 1, work).pow(4);
    Float::with_val(prec, v)
}

/// F(2τ_r) = η(2^{r+3}i)⁸/η(2^{r+2}i)⁴ in closed form:
///   a⁴/2^{2r+10} · exp(−2π(2^{r+2}+2^{r+1}−1)/3 − (2/π)Σ_{m≤r+2}2^mL_m − (2^{r+5}/π)L_{r+3}).
pub fn f2_cm_closed(r: u32, prec: u32) -> Float {
    let work = prec + GUARD;
    let pi = pi(work);
    let lat = lattice_values(r + 3, work);
    let c = Rational::from((((Integer::from(3) << (r + 1)) - 1u32) << 1, Integer::from(3)));
    let mut expo = -Float::with_val(work, &pi * &c);
    expo -= (weighted_sum(&lat, r + 2, work) << 1) / &pi;
    expo -= (lat[r as usize + 2].clone() << (r + 5)) / &pi;
    Float::with_val(prec, (a_const(work).pow(4) >> (2 * r + 10)) * expo.exp())
}

/// F(2τ_r) from eta products evaluated directly.
pub fn f2_cm_direct(r: u32, prec: u32) -> Float {
    let work = prec + GUARD;
    let v = eta_cm_direct(r + 3, work).pow(8) / eta_cm_direct(r + 2, work).pow(4);
    Float::with_val(prec, v)
}

/// θ(2τ_r) = Σ_{n∈ℤ} q^{2n²} in closed form:
///   a/2^{(r+3)/2} · exp(π/6 − (1/2π)Σ_{m≤r+1}2^mL_m − (3·2^{r+1}/π)L_{r+2} + (2^{r+3}/π)L_{r+3}).
pub fn theta2_cm_closed(r: u32, prec: u32) -> Float {
    let work = prec + GUARD;
    let pi = pi(work);
    let lat = lattice_values(r + 3, work);
    let mut expo = Float::with_val(work, &pi / 6u32);
    expo -= weighted_sum(&lat, r + 1, work) / (pi.clone() << 1);
    expo -= (lat[r as usize + 1].clone() * 3u32 << (r + 1)) / &pi;
    expo += (lat[r as usize + 2].clone() << (r + 3)) / &pi;
    let denom = Float::with_val(work, Integer::from(1) << (r + 3)).sqrt();
    Float::with_val(prec, a_const(work) / denom * expo.exp())
}

/// θ(2τ_r) summed directly: 1 + 2Σ_{n≥1} e^{−2^{r+2}πn²}.
pub fn theta2_cm_direct(r: u32, prec: u32) -> Float {
    let work = prec + GUARD;
    let qq = (-(pi(work) << (r + 2))).exp();
    Float::with_val(prec, theta_sum_float(&qq))
}

/// f_k(τ_r) = η(2^{r+2}i)^{8k−2} η(2^{r+3}i)⁴ / η(2^{r+1}i)^{4k} directly.
pub fn fk_cm_direct(k: u32, r: u32, prec: u32) -> Float {
    let work = prec + GUARD;
    let v = eta_cm_direct(r + 2, work).pow(8 * k as i32 - 2)
        * eta_cm_direct(r + 3, work).pow(4)
        / eta_cm_direct(r + 1, work).pow(4 * k as i32);
    Float::with_val(prec, v)
}

/// Inputs for the closed-form H_k(τ_r): the coefficients α_k, β_k (negated
/// coordinates of T = f_k − H_k in the cusp basis, so that
/// H_k = f_k + Σ α_k(ℓ)·b_ℓ + Σ β_k(ℓ)·b_ℓ) and the lattice values
/// L_1 .. L_{r+3} at working precision.
pub struct CmContext {
    pub k: u32,
    pub r: u32,
    prec: u32,
    alpha: Vec<Rational>,
    beta: Vec<Rational>,
    lattice: Vec<Float>,
}

impl CmContext {
    pub fn new(k: u32, r: u32, prec: u32) -> Self {
        assert!(k >= 1 && r >= 1);
        let trunc = 2 * k as i64 + 16;
        let basis = build_basis(k, trunc);
        let t = t_cusp_series(k, trunc);
        let d = decompose(&t, &basis).expect("f_k − H_k must lie in the basis span");
        let cc = cusp_conditions(&d);
        assert!(cc.all(), "cusp correction must vanish at every cusp: {cc:?}");
        let work = prec + GUARD;
        CmContext {
            k,
            r,
            prec,
            alpha: d.alpha.iter().map(|c| Rational::from(-c)).collect(),
            beta: d.beta.iter().map(|c| Rational::from(-c)).collect(),
            lattice: lattice_values(r + 3, work),
        }
    }

    /// α_k(ℓ) for ℓ = 0..k−1; α_k(0) is always zero.
    pub fn alpha(&self) -> &[Rational] {
        &self.alpha
    }

    /// β_k(ℓ) for ℓ = k..2k (stored from index 0).
    pub fn beta(&self) -> &[Rational] {
        &self.beta
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }
}

/// H_k(τ_r) in closed form:
///
///   a^{4k+2}/2^{(2k+1)(r+3)} · ( e^{−2^{r+1}(k+1)π}/4^{k+1}
///       + Σ_{ℓ=1}^{k−1} α_k(ℓ)/4^ℓ · e^{M(ℓ,r)}
///       + Σ_{ℓ=k}^{2k}  β_k(ℓ)/4^ℓ · e^{M(ℓ,r)} ) · e^{J(k,r)}
///
/// with
///   J(k,r) = π(2k+1)/3 − ((2k+1)/π) Σ_{m=1}^{r+1} 2^m L_m
///            − (2^{r+2}(4k+1)/π) L_{r+2} − (2^{r+4}/π) L_{r+3},
///   M(ℓ,r) = −π·ℓ·2^{r+1} − (2^{r+3}(k−ℓ+1)/π) L_{r+2}
///            + (2^{r+5}(k−ℓ+1)/π) L_{r+3}.
pub fn hk_cm_closed(ctx: &CmContext) -> Float {
    let (k, r) = (ctx.k, ctx.r);
    let work = ctx.prec + GUARD;
    let pi = pi(work);
    let l_r2 = &ctx.lattice[r as usize + 1];
    let l_r3 = &ctx.lattice[r as usize + 2];
    let s = weighted_sum(&ctx.lattice, r + 1, work);

    let mut j = Float::with_val(work, &pi * &Rational::from((2 * k as i64 + 1, 3)));
    j -= s * (2 * k + 1) / &pi;
    j -= (Float::with_val(work, l_r2 * (4 * k as i32 + 1)) << (r + 2)) / &pi;
    j -= (l_r3.clone() << (r + 4)) / &pi;

    // f_k contributes e^{−2^{r+1}(k+1)π}/4^{k+1}
    let mut sum = (-(Float::with_val(work, &pi * (k as i32 + 1)) << (r + 1))).exp() >> (2 * (k + 1));
    for l in 1..=2 * k as usize {
        let coef = if l < k as usize {
            &ctx.alpha[l]
        } else {
            &ctx.beta[l - k as usize]
        };
        if *coef == 0 {
            continue;
        }
        let back = k as i32 - l as i32 + 1;
        let mut m_exp = -(Float::with_val(work, &pi * (l as i32)) << (r + 1));
        m_exp -= (Float::with_val(work, l_r2 * back) << (r + 3)) / &pi;
        m_exp += (Float::with_val(work, l_r3 * back) << (r + 5)) / &pi;
        sum += (m_exp.exp() * coef) >> (2 * l as u32);
    }

    let pref = a_const(work).pow(4 * k as i32 + 2) >> ((2 * k + 1) * (r + 3));
    Float::with_val(ctx.prec, pref * sum * j.exp())
}

/// H_k(τ_r) summed directly from the q-expansion at q = e^{−2^{r+1}π}. The
/// coefficient bound |[qⁿ] H_k| ≤ 2n^{2k+1} makes the tail beyond the chosen
/// cut smaller than 2^{−(prec+32)}.
pub fn hk_cm_direct(k: u32, r: u32, prec: u32) -> Float {
    let work = prec + GUARD;
    let bits_per_step = 2f64.powi(r as i32 + 1) * std::f64::consts::PI / std::f64::consts::LN_2;
    let mut n = 1i64;
    loop {
        let bits = 1.0 + (2.0 * k as f64 + 1.0) * (n as f64).log2() - bits_per_step * n as f64;
        if bits < -(prec as f64 + 48.0) {
            break;
        }
        n += 1;
    }
    let h = h_k_series(k, n + 1);
    let q = (-(pi(work) << (r + 1))).exp();
    let mut acc = Float::with_val(work, 0);
    for (e, c) in h.iter() {
        if *c != 0 {
            acc += q.clone().pow(e as u32) * c;
        }
    }
    Float::with_val(prec, acc)
}

/// Closed-vs-direct comparison of H_k(τ_r), serialized for the CLI.
pub fn cm_report(k: u32, r: u32, prec: u32) -> serde_json::Value {
    let ctx = CmContext::new(k, r, prec);
    let closed = hk_cm_closed(&ctx);
    let direct = hk_cm_direct(k, r, prec);
    let rel = relative_error(&closed, &direct);
    let digits = (prec as f64 * 0.30103) as usize + 2;
    serde_json::json!({
        "k": k,
        "r": r,
        "prec": prec,
        "alpha": ctx.alpha().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "beta": ctx.beta().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "closed": closed.to_string_radix(10, Some(digits)),
        "direct": direct.to_string_radix(10, Some(digits)),
        "rel_err": format!("{:.3e}", rel.to_f64()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigfloat::sqrt2;

    /// Assert relative agreement to 2^{−bits}.
    fn assert_close(x: &Float, y: &Float, bits: u32) {
        let re = relative_error(x, y);
        assert!(
            re < Float::with_val(64, 1) >> bits,
            "relative error {:.3e} exceeds 2^-{bits}",
            re.to_f64()
        );
    }

    #[test]
    fn lattice_sums_match_their_closed_forms() {
        let prec = 320;
        let pi = pi(prec);
        let ln2 = ln2(prec);
        let lnr2 = Float::with_val(prec, sqrt2(prec) - 1).ln();

        let want1 = -(pi.clone().square() / 24u32) - pi.clone() * &ln2 / 8u32;
        assert_close(&lattice_sum(1, prec), &want1, 300);

        let want2 = -(pi.clone().square() * 7u32 / 96u32) - pi.clone() * &ln2 / 32u32
            - pi.clone() * &lnr2 / 8u32;
        assert_close(&lattice_sum(2, prec), &want2, 300);

        let fourth = Float::with_val(prec, 2).root(4).recip();
        let lnq = Float::with_val(prec, 1 - &fourth).ln();
        let want3 = -(pi.clone().square() * 31u32 / 384u32) - pi.clone() * &ln2 * 5u32 / 128u32
            + pi.clone() * &lnr2 / 32u32
            - pi.clone() * &lnq / 8u32;
        assert_close(&lattice_sum(3, prec), &want3, 300);
    }

    #[test]
    fn lattice_naive_oracle_agrees() {
        for ell in 1..=4 {
            let hp = lattice_sum(ell, 96).to_f64();
            let nv = lattice_sum_naive(ell);
            assert!(
                (hp - nv).abs() < 1e-8,
                "ℓ = {ell}: accelerated {hp} vs naive {nv}"
            );
        }
    }

    #[test]
    fn eta_lemma_matches_direct_products() {
        let prec = 288;
        for k in 0..=4 {
            assert_close(&eta_cm_closed(k, prec), &eta_cm_direct(k, prec), 272);
        }
    }

    #[test]
    fn eta_values_match_published_constants() {
        let prec = 288;
        let a = a_const(prec);
        let r2m1 = Float::with_val(prec, sqrt2(prec) - 1);

        // η(2i) = a / 2^{7/8}
        let want = a.clone() / Float::with_val(prec, 1u32 << 7).root(8);
        assert_close(&eta_cm_direct(1, prec), &want, 272);

        // η(4i) = a (√2−1)^{1/4} / 2^{21/16}
        let want = a.clone() * r2m1.clone().root(4)
            / Float::with_val(prec, Integer::from(1) << 21).root(16);
        assert_close(&eta_cm_direct(2, prec), &want, 272);

        // η(8i) = a (√2−1)^{1/8} (1−2^{−1/4})^{1/2} / 2^{53/32}
        let fourth = Float::with_val(prec, 2).root(4).recip();
        let want = a * r2m1.root(8) * Float::with_val(prec, 1 - &fourth).sqrt()
            / Float::with_val(prec, Integer::from(1) << 53).root(32);
        assert_close(&eta_cm_direct(3, prec), &want, 272);
    }

    #[test]
    fn generator_closed_forms_match_direct_evaluation() {
        let prec = 288;
        for r in 1..=2 {
            assert_close(&f_cm_closed(r, prec), &f_cm_direct(r, prec), 260);
            assert_close(&f2_cm_closed(r, prec), &f2_cm_direct(r, prec), 260);
            assert_close(&theta2_cm_closed(r, prec), &theta2_cm_direct(r, prec), 260);
        }
    }

    #[test]
    fn psi_values_and_eta_recursion() {
        let prec = 288;
        let pi = pi(prec);
        let a = a_const(prec);

        // Ψ at τ = 2i equals a·(2−√2)^{1/2}·e^{π/2}/4
        let want = a.clone() * Float::with_val(prec, 2 - sqrt2(prec)).sqrt()
            * Float::with_val(prec, &pi / 2u32).exp()
            / 4u32;
        assert_close(&psi_cm_direct(1, prec), &want, 272);

        // Ψ at τ = 4i equals a·(1−2^{−1/4})·e^{π}/4
        let fourth = Float::with_val(prec, 2).root(4).recip();
        let want = a * Float::with_val(prec, 1 - &fourth) * pi.clone().exp() / 4u32;
        assert_close(&psi_cm_direct(2, prec), &want, 272);

        // η(8i)² = e^{−3π/2} η(2i) Ψ(2i) Ψ(4i) / η(4i)
        let lhs = eta_cm_direct(3, prec).square();
        let rhs = (-(pi * 3u32) / 2u32).exp() * eta_cm_direct(1, prec) * psi_cm_direct(1, prec)
            * psi_cm_direct(2, prec)
            / eta_cm_direct(2, prec);
        assert_close(&lhs, &rhs, 272);
    }

    #[test]
    fn k1_context_has_no_correction_terms() {
        let ctx = CmContext::new(1, 1, 192);
        assert!(ctx.alpha().iter().all(|c| *c == 0));
        assert!(ctx.beta().iter().all(|c| *c == 0));
    }

    #[test]
    fn h1_equals_f1_at_cm_points() {
        for r in 1..=2 {
            let ctx = CmContext::new(1, r, 256);
            assert_close(&hk_cm_closed(&ctx), &fk_cm_direct(1, r, 256), 240);
        }
    }

    #[test]
    fn closed_form_matches_direct_sum() {
        for k in 1..=3 {
            for r in 1..=2 {
                let ctx = CmContext::new(k, r, 256);
                let closed = hk_cm_closed(&ctx);
                let direct = hk_cm_direct(k, r, 256);
                assert_close(&closed, &direct, 240);
            }
        }
    }

    #[test]
    fn report_shape() {
        let js = cm_report(2, 1, 128);
        assert_eq!(js["k"], 2);
        assert_eq!(js["r"], 1);
        let rel: f64 = js["rel_err"].as_str().unwrap().parse().unwrap();
        assert!(rel < 1e-30);
    }
}
