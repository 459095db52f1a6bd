//! End-to-end verification suite.
//!
//! Every headline claim of the crate — the classical Lambert-series
//! identities, the exact collapse at k = 1, the cusp decompositions with
//! their cusp-vanishing conditions, the CM evaluations, the radial limits,
//! and the counting corollary — is packaged as a timed [`CheckResult`].
//! The `acceptance` integration tests and the `betaq suite` subcommand both
//! run these functions, so a green suite means the same thing in CI and on
//! the command line.
//!
//! A check passes only if its mathematical condition holds *and* it finished
//! inside its time budget, where one is declared. The budgets assume an
//! optimized build (`--release`, or the test profile, which is compiled with
//! `opt-level = 2`).

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::analytics::{asymptotic_report, limit_check, limit_grid, t_counts};
use crate::basis::{build_basis, cusp_conditions, decompose, t_cusp_series};
use crate::bigfloat::{a_const, ln2, pi, sqrt2};
use crate::cm::{
    eta_cm_closed, eta_cm_direct, hk_cm_closed, hk_cm_direct, lattice_sum, relative_error,
    CmContext,
};
use crate::eisenstein::{eis2_crosscheck, h_k_series};
use crate::etaq::fk_quotient;
use crate::lambert::{eulerian_poly, lambert_expand, verify_classical, ClassicalIdentity};
use crate::qseries::{euler_product, QSeries};

/// Outcome of one suite check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub seconds: f64,
    pub detail: String,
}

impl CheckResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "id": self.id,
            "name": self.name,
            "pass": self.pass,
            "seconds": format!("{:.3}", self.seconds),
            "detail": self.detail,
        })
    }

    /// One-line report, stable enough to grep in CI logs.
    pub fn summary_line(&self) -> String {
        format!(
            "{} {:>2}  {:<26} {:>7.2}s  {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

fn timed(
    id: u32,
    name: &'static str,
    budget: Option<f64>,
    body: impl FnOnce() -> (bool, String),
) -> CheckResult {
    let start = Instant::now();
    let (ok, mut detail) = body();
    let seconds = start.elapsed().as_secs_f64();
    let mut pass = ok;
    if let Some(b) = budget {
        if seconds >= b {
            pass = false;
            detail.push_str(&format!(" [exceeded {b:.0}s budget]"));
        }
    }
    CheckResult { id, name, pass, seconds, detail }
}

/// Relative agreement to 2^{−bits}, plus the observed error as an f64.
fn within_bits(x: &Float, y: &Float, bits: u32) -> (bool, f64) {
    let re = relative_error(x, y);
    (re < Float::with_val(64, 1) >> bits, re.to_f64())
}

/// Check 1: the Ramanujan Lambert-series identity, coefficient-exact
/// through q^500.
pub fn check_ramanujan() -> CheckResult {
    timed(1, "ramanujan-identity", Some(10.0), || {
        let rep = verify_classical(ClassicalIdentity::Ramanujan, 501);
        match rep.first_mismatch {
            None => (true, "coefficient-exact through q^500".into()),
            Some(e) => (false, format!("first mismatch at q^{e}")),
        }
    })
}

/// Check 2: the Hou–Sun eta-quotient identity, coefficient-exact
/// through q^500.
pub fn check_hou_sun() -> CheckResult {
    timed(2, "hou-sun-identity", Some(10.0), || {
        let rep = verify_classical(ClassicalIdentity::HouSun, 501);
        match rep.first_mismatch {
            None => (true, "coefficient-exact through q^500".into()),
            Some(e) => (false, format!("first mismatch at q^{e}")),
        }
    })
}

/// Check 3: the five-term k = 3 identity, coefficient-exact through q^300.
pub fn check_k3() -> CheckResult {
    timed(3, "k3-identity", Some(30.0), || {
        let rep = verify_classical(ClassicalIdentity::K3, 301);
        match rep.first_mismatch {
            None => (true, "all five terms, coefficient-exact through q^300".into()),
            Some(e) => (false, format!("first mismatch at q^{e}")),
        }
    })
}

/// Check 4: at k = 1 there is no cusp space, so f_1, H_1, and the Lambert
/// expansion are literally the same series.
pub fn check_k1_collapse() -> CheckResult {
    timed(4, "k1-collapse", None, || {
        let trunc = 401;
        let f1 = fk_quotient(1).expand(trunc).expect("f_1 expands");
        let h1 = h_k_series(1, trunc);
        let lam = lambert_expand(1, trunc);
        if f1 == h1 && h1 == lam {
            (true, "f_1 = H_1 = Lambert expansion through q^400".into())
        } else {
            (
                false,
                format!(
                    "f vs H mismatch at {:?}, H vs Lambert mismatch at {:?}",
                    f1.first_mismatch(&h1),
                    h1.first_mismatch(&lam)
                ),
            )
        }
    })
}

/// Check 5: for k = 2..=k_hi the cusp part T = f_k − H_k decomposes in the
/// triangular eta-quotient basis with zero residual, and the three
/// cusp-vanishing conditions hold as exact rational identities.
pub fn check_cusp_decomposition(k_hi: u32) -> CheckResult {
    timed(5, "cusp-decomposition", Some(120.0), move || {
        let trunc = 300;
        for k in 2..=k_hi {
            let t = t_cusp_series(k, trunc);
            let basis = build_basis(k, trunc);
            let d = match decompose(&t, &basis) {
                Ok(d) => d,
                Err(e) => return (false, format!("k = {k}: {e}")),
            };
            let conds = cusp_conditions(&d);
            let rebuilt = d.reconstruct(&basis).agrees_with(&t);
            if !(d.residual_zero && conds.all() && rebuilt) {
                return (
                    false,
                    format!(
                        "k = {k}: residual_zero = {}, conditions = {conds:?}, rebuilt = {rebuilt}",
                        d.residual_zero
                    ),
                );
            }
        }
        (
            true,
            format!("k = 2..={k_hi}: zero residual and exact cusp conditions at q^{trunc}"),
        )
    })
}

/// Check 6: the χ₂-twisted Eisenstein series at 2τ equals
/// 2^{2k+1}𝓔(2τ) − 𝓔(τ) coefficient-exactly.
pub fn check_twisted_crosscheck(k_hi: u32) -> CheckResult {
    timed(6, "twisted-eisenstein-split", None, move || {
        for k in 1..=k_hi {
            if !eis2_crosscheck(k, 200) {
                return (false, format!("k = {k}: twisted split disagrees"));
            }
        }
        (
            true,
            format!("twisted series equals 2^(2k+1)E(2τ) − E(τ) for k ≤ {k_hi} at q^200"),
        )
    })
}

/// Check 7: the accelerated lattice sums L_1, L_2, L_3 match their
/// logarithmic closed forms to 2^{−240} at 256-bit precision.
pub fn check_lattice_closed_forms() -> CheckResult {
    timed(7, "lattice-closed-forms", Some(5.0), || {
        let prec = 256;
        let pi = pi(prec);
        let ln2 = ln2(prec);
        let lnr2 = Float::with_val(prec, sqrt2(prec) - 1).ln();
        let fourth = Float::with_val(prec, 2).root(4).recip();
        let lnq = Float::with_val(prec, 1 - &fourth).ln();

        let closed = [
            -(pi.clone().square() / 24u32) - pi.clone() * &ln2 / 8u32,
            -(pi.clone().square() * 7u32 / 96u32) - pi.clone() * &ln2 / 32u32
                - pi.clone() * &lnr2 / 8u32,
            -(pi.clone().square() * 31u32 / 384u32) - pi.clone() * &ln2 * 5u32 / 128u32
                + pi.clone() * &lnr2 / 32u32
                - pi.clone() * &lnq / 8u32,
        ];
        let mut worst = 0.0f64;
        for (i, want) in closed.iter().enumerate() {
            let ell = i as u32 + 1;
            let (ok, re) = within_bits(&lattice_sum(ell, prec), want, 240);
            worst = worst.max(re);
            if !ok {
                return (false, format!("L_{ell}: relative error {re:.3e}"));
            }
        }
        (true, format!("L_1..L_3 match closed forms; worst rel err {worst:.1e}"))
    })
}

/// Check 8: the power-of-two eta lemma reproduces the direct products for
/// k = 0..4, and the radical closed forms at 2i, 4i, 8i.
pub fn check_eta_lemma() -> CheckResult {
    timed(8, "eta-tower-values", None, || {
        let prec = 256;
        let mut worst = 0.0f64;
        for k in 0..=4u32 {
            let (ok, re) = within_bits(&eta_cm_closed(k, prec), &eta_cm_direct(k, prec), 240);
            worst = worst.max(re);
            if !ok {
                return (false, format!("η(2^{k} i): lemma vs product rel err {re:.3e}"));
            }
        }
        let a = a_const(prec);
        let r2m1 = Float::with_val(prec, sqrt2(prec) - 1);
        let fourth = Float::with_val(prec, 2).root(4).recip();
        let closed = [
            a.clone() / Float::with_val(prec, 1u32 << 7).root(8),
            a.clone() * r2m1.clone().root(4)
                / Float::with_val(prec, Integer::from(1) << 21).root(16),
            a * r2m1.root(8) * Float::with_val(prec, 1 - &fourth).sqrt()
                / Float::with_val(prec, Integer::from(1) << 53).root(32),
        ];
        for (i, want) in closed.iter().enumerate() {
            let k = i as u32 + 1;
            let (ok, re) = within_bits(&eta_cm_closed(k, prec), want, 240);
            worst = worst.max(re);
            if !ok {
                return (false, format!("η(2^{k} i) vs radical value: rel err {re:.3e}"));
            }
        }
        (
            true,
            format!("lemma = product for k ≤ 4, radicals at 2i/4i/8i; worst rel err {worst:.1e}"),
        )
    })
}

/// Check 9: the closed CM formula for H_k(2^r i) agrees with direct
/// summation of the q-expansion to 10^{−15} at 256-bit precision.
pub fn check_cm_closed_vs_direct(k_hi: u32) -> CheckResult {
    timed(9, "cm-closed-vs-direct", Some(30.0), move || {
        let prec = 256;
        let k_top = k_hi.min(3);
        let mut worst = 0.0f64;
        for k in 1..=k_top {
            for r in 1..=2u32 {
                let ctx = CmContext::new(k, r, prec);
                let closed = hk_cm_closed(&ctx);
                let direct = hk_cm_direct(k, r, prec);
                let re = relative_error(&closed, &direct).to_f64();
                worst = worst.max(re);
                if !(re < 1e-15) {
                    return (false, format!("(k, r) = ({k}, {r}): rel err {re:.3e}"));
                }
            }
        }
        (
            true,
            format!("H_k(2^r i) closed = direct for k ≤ {k_top}, r ≤ 2; worst rel err {worst:.1e}"),
        )
    })
}

/// Check 10: Richardson extrapolation of (1−q)^{2k+1} f_k(q) on the grid
/// q = 1 − 2^{−j}, j = 4..12, hits π^{2k+1}/2^{4k+3}, and the constant is
/// also confirmed as an exact rational identity.
pub fn check_radial_limit(k_hi: u32) -> CheckResult {
    timed(10, "radial-limit", None, move || {
        let grid = limit_grid(256);
        let k_top = k_hi.min(3);
        let mut devs = Vec::new();
        for k in 1..=k_top {
            let rep = limit_check(k, &grid);
            let tol = if k == 1 { 1e-3 } else { 1e-2 };
            if !rep.identity_exact {
                return (false, format!("k = {k}: exact constant identity fails"));
            }
            if !(rep.rel_dev < tol) {
                return (
                    false,
                    format!("k = {k}: extrapolation off by {:.3e} (tol {tol:.0e})", rep.rel_dev),
                );
            }
            devs.push(format!("k={k}: {:.1e}", rep.rel_dev));
        }
        (
            true,
            format!("limit = π^(2k+1)/2^(4k+3) exactly; extrapolation devs {}", devs.join(", ")),
        )
    })
}

/// Check 11: the lattice-point counts t_k(n) are the f_k coefficients for
/// n ≤ 100, and the Eisenstein main term is within 5% at n = 500.
pub fn check_tuple_counts(k_hi: u32) -> CheckResult {
    timed(11, "tuple-counts", None, move || {
        let k_top = k_hi.min(3);
        for k in 1..=k_top {
            let counts = t_counts(k, 100);
            let f = fk_quotient(k).expand(2 * 100 + k as i64 + 2).expect("f_k expands");
            for (n, t) in counts.iter().enumerate() {
                let e = 2 * n as i64 + k as i64 + 1;
                let c = f.coeff(e).expect("coefficient known");
                if c != Rational::from(t) {
                    return (false, format!("k = {k}, n = {n}: count {t} vs coefficient {c}"));
                }
            }
        }
        let mut devs = Vec::new();
        for k in 2..=k_top {
            let rows = asymptotic_report(k, 500);
            let last = rows.last().expect("rows are nonempty");
            let dev = (last.ratio - 1.0).abs();
            if !(dev < 0.05) {
                return (false, format!("k = {k}: |t/main − 1| = {dev:.1e} at n = 500"));
            }
            devs.push(format!("k={k}: {dev:.1e}"));
        }
        (
            true,
            format!("t_k(n) = [q^(2n+k+1)] f_k for k ≤ {k_top}, n ≤ 100; n = 500 devs {}", devs.join(", ")),
        )
    })
}

/// Check 12: structural property sweeps — ring axioms on randomized
/// truncated Laurent series, the Eulerian defining identity, the
/// pentagonal-number support of (q; q)_∞, and basis triangularity.
pub fn check_property_suites(k_hi: u32) -> CheckResult {
    timed(12, "algebra-properties", None, move || {
        let mut rng = StdRng::seed_from_u64(0xBE7A_0001);
        for case in 0..200 {
            let a = random_series(&mut rng);
            let b = random_series(&mut rng);
            let c = random_series(&mut rng);
            if !ring_axioms_hold(&a, &b, &c) {
                return (false, format!("ring axioms fail on randomized case {case}"));
            }
        }
        for r in 0..=10u32 {
            if !eulerian_identity_holds(r) {
                return (false, format!("Eulerian identity fails at r = {r}"));
            }
        }
        if !pentagonal_structure_holds() {
            return (false, "pentagonal-number support is wrong".into());
        }
        let k_top = k_hi.min(6);
        for k in 1..=k_top {
            let basis = build_basis(k, 2 * k as i64 + 8);
            for l in 0..basis.len() {
                let el = basis.element(l);
                if el.leading_exponent() != Some(l as i64)
                    || el.coeff(l as i64).expect("lead is known") != 1u32
                {
                    return (false, format!("basis k = {k}: element {l} not monic-triangular"));
                }
            }
        }
        (
            true,
            format!(
                "200 ring-axiom cases, Eulerian r ≤ 10, pentagonal support, triangular bases k ≤ {k_top}"
            ),
        )
    })
}

fn random_series(rng: &mut StdRng) -> QSeries {
    let offset = rng.gen_range(-3i64..=3);
    let len = rng.gen_range(4usize..=10);
    let coeffs = (0..len)
        .map(|_| Rational::from((rng.gen_range(-9i64..=9), rng.gen_range(1i64..=4))))
        .collect();
    QSeries::new(offset, coeffs, offset + len as i64)
}

fn ring_axioms_hold(a: &QSeries, b: &QSeries, c: &QSeries) -> bool {
    let comm_add = a.add(b) == b.add(a);
    let assoc_add = a.add(b).add(c) == a.add(&b.add(c));
    let comm_mul = a.mul(b) == b.mul(a);
    let assoc_mul = a.mul(b).mul(c) == a.mul(&b.mul(c));
    // Cancellation inside b + c can leave the left product knowing more
    // exponents than the right sum, so distributivity is compared on the
    // shared window.
    let distr = a.mul(&b.add(c)).agrees_with(&a.mul(b).add(&a.mul(c)));
    let unit = a.mul(&QSeries::one(a.truncation())).agrees_with(a);
    let inverse = a.sub(a).is_zero();
    comm_add && assoc_add && comm_mul && assoc_mul && distr && unit && inverse
}

/// (1 − t)^{r+1} Σ_{ℓ≥1} ℓ^r t^{ℓ−1} telescopes to the r-th Eulerian
/// polynomial; checked on a window comfortably past its degree.
fn eulerian_identity_holds(r: u32) -> bool {
    let t_max = r as i64 + 16;
    let powers: Vec<Rational> =
        (1..=t_max).map(|ell| Rational::from(Integer::from(ell).pow(r))).collect();
    let sum = QSeries::new(0, powers, t_max);
    let one_minus_t = QSeries::from_ints(0, &[1, -1], t_max);
    let lhs = one_minus_t.pow(r as i64 + 1).mul(&sum);
    let rhs = QSeries::new(
        0,
        eulerian_poly(r).coeffs().iter().map(Rational::from).collect(),
        lhs.truncation(),
    );
    lhs == rhs
}

/// (q; q)_∞ is supported exactly on generalized pentagonal numbers with
/// signs (−1)^g, and rescaling commutes with the product.
fn pentagonal_structure_holds() -> bool {
    let trunc = 500i64;
    let mut coeffs = vec![Rational::new(); trunc as usize];
    coeffs[0] = Rational::from(1);
    let mut g = 1i64;
    loop {
        let e1 = g * (3 * g - 1) / 2;
        if e1 >= trunc {
            break;
        }
        let sign = if g % 2 == 1 { -1 } else { 1 };
        coeffs[e1 as usize] = Rational::from(sign);
        let e2 = e1 + g;
        if e2 < trunc {
            coeffs[e2 as usize] = Rational::from(sign);
        }
        g += 1;
    }
    let expected = QSeries::new(0, coeffs, trunc);
    euler_product(1, trunc) == expected
        && euler_product(2, 400) == euler_product(1, 200).rescale(2)
}

/// Run the full suite in report order. `k_max` caps the per-k sweeps (cusp
/// decompositions and the twisted cross-check go up to min(k_max, 6), the
/// CM/limit/counting checks up to min(k_max, 3)); the fixed-range checks
/// ignore it.
pub fn run_all(k_max: u32) -> Vec<CheckResult> {
    let k_basis = k_max.clamp(2, 6);
    let k_twist = k_max.clamp(1, 6);
    let k_cm = k_max.clamp(1, 3);
    vec![
        check_ramanujan(),
        check_hou_sun(),
        check_k3(),
        check_k1_collapse(),
        check_cusp_decomposition(k_basis),
        check_twisted_crosscheck(k_twist),
        check_lattice_closed_forms(),
        check_eta_lemma(),
        check_cm_closed_vs_direct(k_cm),
        check_radial_limit(k_cm),
        check_tuple_counts(k_cm),
        check_property_suites(k_twist),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The randomized algebra sweep and the small structural checks are
    /// cheap enough to run as a unit test; the heavyweight checks live in
    /// the `acceptance` integration target.
    #[test]
    fn property_check_passes() {
        let r = check_property_suites(4);
        assert!(r.pass, "{}", r.detail);
    }

    #[test]
    fn summary_lines_are_one_per_check() {
        let r = CheckResult {
            id: 3,
            name: "k3-identity",
            pass: true,
            seconds: 1.25,
            detail: "ok".into(),
        };
        let line = r.summary_line();
        assert!(line.starts_with("PASS"));
        assert!(line.contains("k3-identity"));
        assert!(!line.contains('\n'));
    }

    #[test]
    fn budget_overrun_fails_the_check() {
        let r = timed(99, "sleepy", Some(0.0), || (true, "finished".into()));
        assert!(!r.pass);
        assert!(r.detail.contains("budget"));
    }

    #[test]
    fn json_shape_is_stable() {
        let r = check_property_suites(2);
        let v = r.to_json();
        for key in ["id", "name", "pass", "seconds", "detail"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}
