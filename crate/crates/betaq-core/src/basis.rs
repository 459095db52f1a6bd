//! The eta-quotient basis of the weight-(2k+1) space on Γ₀(8) with
//! nebentypus χ₋₄, exact decomposition in it by forward substitution, and
//! the cusp-vanishing conditions in terms of the decomposition coefficients.
//!
//! Building blocks (all level 8):
//!   F  = η(4τ)⁸/η(2τ)⁴         weight 2, leading term q
//!   F₂ = η(8τ)⁸/η(4τ)⁴         weight 2, leading term q²
//!   θ₂ = η(4τ)⁵/(η(2τ)²η(8τ)²)  weight 1/2, leading term 1
//!
//! The 2k+2 basis elements, triangular in the q-expansion (element ℓ starts
//! exactly at q^ℓ with coefficient 1):
//!   ℓ = 0..k−1:   F^ℓ θ₂^{4(k−ℓ)+2}
//!   ℓ = k..2k:    F^{2k−ℓ} F₂^{ℓ−k} θ₂²
//!   ℓ = 2k+1:     F F₂^k / θ₂²  (= η(8τ)^{8k+4}/η(4τ)^{4k+2})
//!
//! Contents:
//!   BasisSet, build_basis     expansions plus their defining eta quotients
//!   Decomposition, decompose  exact coefficients α, β, γ
//!   CuspConditions, cusp_conditions  the three vanishing constraints
//!   t_cusp_series             f_k − H_k, the cusp correction of the family

use crate::eisenstein::h_k_series;
use crate::etaq::{fk_quotient, EtaQuotient};
use crate::qseries::QSeries;
use rug::{Integer, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BasisError {
    /// The input is not a combination of the basis elements: after
    /// subtracting the triangular part a nonzero residual remains.
    #[error("series is not in the spanned space: residual starts at q^{exponent}")]
    NotInSpace { exponent: i64 },
}

/// The basis of M_{2k+1}(8, χ₋₄), expanded to a common truncation.
pub struct BasisSet {
    k: u32,
    trunc: i64,
    elements: Vec<QSeries>,
    quotients: Vec<EtaQuotient>,
}

/// F = η(4τ)⁸/η(2τ)⁴.
pub fn f_quotient() -> EtaQuotient {
    EtaQuotient::new(8, &[(4, 8), (2, -4)]).unwrap()
}

/// F₂ = η(8τ)⁸/η(4τ)⁴.
pub fn f2_quotient() -> EtaQuotient {
    EtaQuotient::new(8, &[(8, 8), (4, -4)]).unwrap()
}

/// θ₂ = θ(2τ) = η(4τ)⁵/(η(2τ)²η(8τ)²).
pub fn theta2_quotient() -> EtaQuotient {
    EtaQuotient::new(8, &[(4, 5), (2, -2), (8, -2)]).unwrap()
}

/// Construct the 2k+2 basis elements at truncation `trunc`.
pub fn build_basis(k: u32, trunc: i64) -> BasisSet {
    assert!(k >= 1, "the space needs weight ≥ 3, i.e. k ≥ 1");
    assert!(trunc > 2 * k as i64 + 1, "truncation must clear the triangular head");
    let f = f_quotient();
    let f2 = f2_quotient();
    let th = theta2_quotient();
    let mut quotients = Vec::with_capacity(2 * k as usize + 2);
    for l in 0..k {
        quotients.push(f.pow(l as i64).mul(&th.pow(4 * (k - l) as i64 + 2)));
    }
    for l in k..=2 * k {
        quotients.push(
            f.pow((2 * k - l) as i64)
                .mul(&f2.pow((l - k) as i64))
                .mul(&th.pow(2)),
        );
    }
    quotients.push(f.mul(&f2.pow(k as i64)).mul(&th.pow(-2)));

    let elements: Vec<QSeries> = quotients
        .iter()
        .enumerate()
        .map(|(l, eq)| {
            let s = eq.expand(trunc).unwrap();
            debug_assert_eq!(s.leading_exponent(), Some(l as i64), "element {l}");
            debug_assert_eq!(s.coeff(l as i64).unwrap(), 1, "element {l} not monic");
            s
        })
        .collect();
    BasisSet { k, trunc, elements, quotients }
}

impl BasisSet {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn truncation(&self) -> i64 {
        self.trunc
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn element(&self, l: usize) -> &QSeries {
        &self.elements[l]
    }

    pub fn quotient(&self, l: usize) -> &EtaQuotient {
        &self.quotients[l]
    }
}

/// Exact coordinates of a series in the basis: indices 0..k−1 are α, the
/// next k+1 are β (indices k..2k), and the last is γ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub k: u32,
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
    pub gamma: Rational,
    /// Always true for a decomposition this module hands out: a nonzero
    /// residual is reported as [`BasisError::NotInSpace`] instead. Kept as a
    /// field because the JSON schema carries it.
    pub residual_zero: bool,
}

impl Decomposition {
    /// Coefficient of basis element ℓ.
    pub fn coefficient(&self, l: usize) -> &Rational {
        let k = self.k as usize;
        if l < k {
            &self.alpha[l]
        } else if l <= 2 * k {
            &self.beta[l - k]
        } else if l == 2 * k + 1 {
            &self.gamma
        } else {
            panic!("basis index {l} out of range for k = {k}")
        }
    }

    /// Σ coefficient(ℓ) · element(ℓ).
    pub fn reconstruct(&self, basis: &BasisSet) -> QSeries {
        let mut acc = QSeries::zero(basis.truncation());
        for l in 0..basis.len() {
            acc = acc.add(&basis.element(l).scaled(self.coefficient(l)));
        }
        acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "k": self.k,
            "alpha": self.alpha.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "beta": self.beta.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "gamma": self.gamma.to_string(),
            "residual_zero": self.residual_zero,
        })
    }
}

/// Solve g = Σ c_ℓ · element(ℓ) by forward substitution: element ℓ is monic
/// with leading exponent exactly ℓ, so c_ℓ is whatever the residual has at
/// q^ℓ. Errors with the first offending exponent if a residual survives.
pub fn decompose(g: &QSeries, basis: &BasisSet) -> Result<Decomposition, BasisError> {
    let k = basis.k as usize;
    assert!(
        g.truncation() > 2 * k as i64 + 1,
        "series truncated too early to read off all coefficients"
    );
    let mut residual = g.clone();
    let mut coeffs = Vec::with_capacity(2 * k + 2);
    for l in 0..2 * k + 2 {
        let c = residual.coeff(l as i64).unwrap();
        if c != 0 {
            residual = residual.sub(&basis.element(l).scaled(&c));
        }
        coeffs.push(c);
    }
    if let Some(e) = residual.leading_exponent() {
        return Err(BasisError::NotInSpace { exponent: e });
    }
    let gamma = coeffs.pop().unwrap();
    let beta = coeffs.split_off(k);
    Ok(Decomposition {
        k: basis.k,
        alpha: coeffs,
        beta,
        gamma,
        residual_zero: true,
    })
}

/// The three linear conditions for a decomposed series to vanish at the
/// cusps other than 1/4 (where everything here already vanishes):
///
/// 1. α(0) = 0 and γ = 0
/// 2. Σ_ℓ α(ℓ)/4^ℓ + Σ_ℓ β(ℓ)/4^ℓ + γ/2^{4k+3} = 0
/// 3. Σ_ℓ (−1)^ℓ α(ℓ)/4^ℓ + Σ_ℓ (−1)^ℓ β(ℓ)/4^ℓ − γ/2^{4k+2} = 0
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CuspConditions {
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
}

impl CuspConditions {
    pub fn all(&self) -> bool {
        self.c1 && self.c2 && self.c3
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({"c1": self.c1, "c2": self.c2, "c3": self.c3})
    }
}

/// Evaluate the cusp conditions exactly from decomposition coefficients.
pub fn cusp_conditions(d: &Decomposition) -> CuspConditions {
    let k = d.k as usize;
    let c1 = d.alpha[0] == 0 && d.gamma == 0;

    let mut plain = Rational::new();
    let mut signed = Rational::new();
    for l in 0..=2 * k {
        let c = d.coefficient(l);
        if *c == 0 {
            continue;
        }
        let term = c.clone() / Rational::from(Integer::from(1) << (2 * l as u32));
        signed += if l % 2 == 0 { term.clone() } else { -term.clone() };
        plain += term;
    }
    let gamma_2 = d.gamma.clone() / Rational::from(Integer::from(1) << (4 * d.k + 3));
    let gamma_3 = d.gamma.clone() / Rational::from(Integer::from(1) << (4 * d.k + 2));
    let c2 = plain + gamma_2 == 0;
    let c3 = signed - gamma_3 == 0;
    CuspConditions { c1, c2, c3 }
}

/// The cusp correction T = f_k − H_k of the central family.
pub fn t_cusp_series(k: u32, trunc: i64) -> QSeries {
    let f = fk_quotient(k).expand(trunc).unwrap();
    f.sub(&h_k_series(k, trunc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basis_is_triangular_and_monic() {
        for k in 1..=6u32 {
            let basis = build_basis(k, 2 * k as i64 + 12);
            assert_eq!(basis.len(), 2 * k as usize + 2);
            for l in 0..basis.len() {
                let e = basis.element(l);
                assert_eq!(e.leading_exponent(), Some(l as i64), "k={k} ℓ={l}");
                assert_eq!(e.coeff(l as i64).unwrap(), 1, "k={k} ℓ={l}");
            }
        }
    }

    #[test]
    fn basis_elements_are_holomorphic_weight_2k_plus_1() {
        for k in 1..=4u32 {
            let basis = build_basis(k, 2 * k as i64 + 6);
            for l in 0..basis.len() {
                let rep = basis.quotient(l).ghn_check();
                assert_eq!(rep.weight, Rational::from((2 * k as i64 + 1, 1)), "k={k} ℓ={l}");
                assert!(rep.cond_delta && rep.cond_level, "k={k} ℓ={l}");
                assert!(rep.is_holomorphic, "k={k} ℓ={l}");
                assert_eq!(rep.character_discriminant, Some(-4), "k={k} ℓ={l}");
            }
        }
    }

    #[test]
    fn last_element_collapses_to_a_pure_quotient() {
        // F F₂^k / θ₂² = η(8τ)^{8k+4}/η(4τ)^{4k+2}: the θ₂ and η(2τ) parts
        // cancel identically in the exponent map
        for k in 1..=5u32 {
            let built = f_quotient()
                .mul(&f2_quotient().pow(k as i64))
                .mul(&theta2_quotient().pow(-2));
            let direct = EtaQuotient::new(
                8,
                &[(8, 8 * k as i64 + 4), (4, -(4 * k as i64 + 2))],
            )
            .unwrap();
            assert_eq!(built, direct, "k = {k}");
        }
    }

    #[test]
    fn unit_vectors_decompose_to_unit_coordinates() {
        let k = 2u32;
        let basis = build_basis(k, 30);
        for l in 0..basis.len() {
            let d = decompose(basis.element(l), &basis).unwrap();
            for j in 0..basis.len() {
                let want = i64::from(j == l);
                assert_eq!(*d.coefficient(j), want, "ℓ={l} j={j}");
            }
            assert!(d.residual_zero);
        }
    }

    #[test]
    fn f1_decomposition_starts_with_zero_alpha() {
        let basis = build_basis(1, 40);
        let f1 = fk_quotient(1).expand(40).unwrap();
        let d = decompose(&f1, &basis).unwrap();
        assert_eq!(d.alpha.len(), 1);
        assert_eq!(d.beta.len(), 2);
        assert_eq!(d.alpha[0], 0);
        // reconstruction is exact by construction; double-check anyway
        assert_eq!(d.reconstruct(&basis), f1);
    }

    #[test]
    fn zero_series_decomposes_to_zero() {
        let basis = build_basis(3, 20);
        let d = decompose(&QSeries::zero(20), &basis).unwrap();
        for l in 0..basis.len() {
            assert_eq!(*d.coefficient(l), 0);
        }
    }

    #[test]
    fn stray_tail_is_not_in_space() {
        let k = 2u32;
        let basis = build_basis(k, 30);
        // no triangular head at all: everything is residual
        let lone = QSeries::monomial(Rational::from(1), 2 * k as i64 + 2, 30);
        assert_eq!(
            decompose(&lone, &basis),
            Err(BasisError::NotInSpace { exponent: 2 * k as i64 + 2 })
        );
        // a valid head plus a stray high term
        let g = basis.element(0).add(&lone);
        assert_eq!(
            decompose(&g, &basis),
            Err(BasisError::NotInSpace { exponent: 2 * k as i64 + 2 })
        );
    }

    #[test]
    fn t_cusp_vanishes_for_k1_and_not_after() {
        assert!(t_cusp_series(1, 120).is_zero());
        for k in 2..=5u32 {
            let t = t_cusp_series(k, 40);
            let lead = t.leading_exponent().unwrap();
            assert!(lead >= 1, "k = {k}: T starts at q^{lead}");
        }
    }

    #[test]
    fn t_cusp_satisfies_all_cusp_conditions() {
        for k in 2..=4u32 {
            let basis = build_basis(k, 60);
            let t = t_cusp_series(k, 60);
            let d = decompose(&t, &basis).unwrap();
            let cc = cusp_conditions(&d);
            assert!(cc.all(), "k = {k}: {cc:?}");
        }
    }

    #[test]
    fn fk_itself_fails_the_cusp_conditions() {
        // f_k has order 0 (nonvanishing) at the cusps 0 and 1/2, so the
        // vanishing conditions cannot all hold
        let basis = build_basis(2, 40);
        let f2 = fk_quotient(2).expand(40).unwrap();
        let d = decompose(&f2, &basis).unwrap();
        let cc = cusp_conditions(&d);
        assert!(!cc.all(), "{cc:?}");
    }

    #[test]
    fn decomposition_json_shape() {
        let basis = build_basis(2, 40);
        let t = t_cusp_series(2, 40);
        let js = decompose(&t, &basis).unwrap().to_json();
        assert_eq!(js["k"], 2);
        assert_eq!(js["residual_zero"], true);
        assert!(js["alpha"].as_array().unwrap().len() == 2);
        assert!(js["beta"].as_array().unwrap().len() == 3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn random_combinations_round_trip(
            k in 1u32..=3,
            nums in proptest::collection::vec((-20i64..=20, 1i64..=7), 14),
        ) {
            let basis = build_basis(k, 2 * k as i64 + 10);
            let coeffs: Vec<Rational> = (0..basis.len())
                .map(|i| Rational::from(nums[i]))
                .collect();
            let mut g = QSeries::zero(basis.truncation());
            for (l, c) in coeffs.iter().enumerate() {
                g = g.add(&basis.element(l).scaled(c));
            }
            let d = decompose(&g, &basis).unwrap();
            for (l, c) in coeffs.iter().enumerate() {
                prop_assert_eq!(d.coefficient(l), c, "ℓ = {}", l);
            }
        }
    }
}
