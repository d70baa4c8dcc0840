//! Exact algebra for the interpolation parameters.
//!
//! All computations here are carried out in arbitrary-precision rational
//! arithmetic so that admissibility boundaries (where the condition value
//! is exactly zero) are classified without floating-point ambiguity.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::str::FromStr;
use thiserror::Error;

/// Arbitrary-precision rational scalar used throughout the parameter algebra.
pub type Rat = BigRational;

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("cannot parse `{0}` as a rational or decimal number")]
    Parse(String),
    #[error("scaling equations are degenerate: p(d+alpha) = 2q(d-sp)")]
    Degenerate,
    #[error("computed interpolation weight is nonpositive: beta1 = {beta1}, beta2 = {beta2}")]
    NegativeBeta { beta1: String, beta2: String },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("scaling equations are violated: {0}")]
    ScalingViolated(String),
    #[error("neither admissibility alternative of the weighted inequality holds")]
    BothConditionsFail,
}

/// Parse a decimal or rational string ("0.25", "1/6", "3") into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, ParamError> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| ParamError::Parse(s.into()))?;
        let d = BigInt::from_str(den.trim()).map_err(|_| ParamError::Parse(s.into()))?;
        if d.is_zero() {
            return Err(ParamError::Parse(s.into()));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_part = BigInt::from_str(if int.is_empty() || int == "-" { "0" } else { int })
            .map_err(|_| ParamError::Parse(s.into()))?;
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParamError::Parse(s.into()));
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = BigInt::from_str(frac).map_err(|_| ParamError::Parse(s.into()))?;
        let mut v = Rat::from(int_part.clone());
        let frac_rat = Rat::new(frac_part, scale);
        if neg {
            v -= frac_rat;
        } else {
            v += frac_rat;
        }
        return Ok(v);
    }
    BigInt::from_str(s)
        .map(Rat::from)
        .map_err(|_| ParamError::Parse(s.into()))
}

pub fn rat_i(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_f64(r: &Rat) -> f64 {
    let n = r.numer();
    let d = r.denom();
    // BigInt -> f64 via string round-trip only for huge values; direct for common sizes.
    let nf = n.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let df = d.to_string().parse::<f64>().unwrap_or(f64::NAN);
    nf / df
}

/// The Gagliardo-Nirenberg parameter tuple (d, s, p, q, alpha, beta1, beta2, gamma).
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet {
    pub d: u32,
    pub s: Rat,
    pub p: Rat,
    pub q: Rat,
    pub alpha: Rat,
    pub beta1: Rat,
    pub beta2: Rat,
    pub gamma: Rat,
}

impl ParamSet {
    /// Build a parameter set, checking ranges and both scaling equations exactly.
    pub fn new(
        d: u32,
        s: Rat,
        p: Rat,
        q: Rat,
        alpha: Rat,
        beta1: Rat,
        beta2: Rat,
        gamma: Rat,
    ) -> Result<Self, ParamError> {
        let ps = ParamSet {
            d,
            s,
            p,
            q,
            alpha,
            beta1,
            beta2,
            gamma,
        };
        ps.validate()?;
        Ok(ps)
    }

    /// Build from (d, s, p, q, alpha, gamma), solving the scaling equations for the betas.
    pub fn from_scaling(
        d: u32,
        s: Rat,
        p: Rat,
        q: Rat,
        alpha: Rat,
        gamma: Rat,
    ) -> Result<Self, ParamError> {
        let (beta1, beta2) = solve_scaling_exponents(d, &s, &p, &q, &alpha, &gamma)?;
        ParamSet::new(d, s, p, q, alpha, beta1, beta2, gamma)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let d = rat_i(self.d as i64);
        if self.d < 1 {
            return Err(ParamError::OutOfRange("d must be >= 1".into()));
        }
        if self.s.is_negative() || self.s > Rat::one() {
            return Err(ParamError::OutOfRange("s must lie in [0, 1]".into()));
        }
        if self.p < Rat::one() || self.q < Rat::one() {
            return Err(ParamError::OutOfRange("p and q must be >= 1".into()));
        }
        if !self.alpha.is_positive() || self.alpha >= d {
            return Err(ParamError::OutOfRange("alpha must lie in (0, d)".into()));
        }
        if self.gamma <= Rat::one() {
            return Err(ParamError::OutOfRange("gamma must be > 1".into()));
        }
        if !self.beta1.is_positive() || !self.beta2.is_positive() {
            return Err(ParamError::OutOfRange("beta1 and beta2 must be > 0".into()));
        }
        let eq1 = &self.beta1 * &self.p + rat_i(2) * &self.beta2 * &self.q;
        if eq1 != Rat::one() {
            return Err(ParamError::ScalingViolated(format!(
                "beta1*p + 2*beta2*q = {eq1} != 1"
            )));
        }
        let eq2 = (&d - &self.s * &self.p) * &self.beta1 + (&d + &self.alpha) * &self.beta2;
        let rhs = &d / &self.gamma;
        if eq2 != rhs {
            return Err(ParamError::ScalingViolated(format!(
                "(d-sp)beta1 + (d+alpha)beta2 = {eq2} != d/gamma = {rhs}"
            )));
        }
        Ok(())
    }

    /// Denominator of the closed-form beta solution: p(d+alpha) - 2q(d-sp).
    pub fn scaling_denominator(&self) -> Rat {
        let d = rat_i(self.d as i64);
        &self.p * (&d + &self.alpha) - rat_i(2) * &self.q * (&d - &self.s * &self.p)
    }
}

/// Solve the two scaling equations for (beta1, beta2).
///
/// Returns `Degenerate` when p(d+alpha) = 2q(d-sp) (then gamma is forced to
/// pd/(d-sp) and the betas are a one-parameter family), and `NegativeBeta`
/// when the solved weights fall outside (0, inf).
pub fn solve_scaling_exponents(
    d: u32,
    s: &Rat,
    p: &Rat,
    q: &Rat,
    alpha: &Rat,
    gamma: &Rat,
) -> Result<(Rat, Rat), ParamError> {
    let dr = rat_i(d as i64);
    if d < 1 || s.is_negative() || s > &Rat::one() || p < &Rat::one() || q < &Rat::one() {
        return Err(ParamError::OutOfRange("d>=1, 0<=s<=1, p,q>=1 required".into()));
    }
    if !alpha.is_positive() || alpha >= &dr {
        return Err(ParamError::OutOfRange("alpha must lie in (0, d)".into()));
    }
    if gamma <= &Rat::one() {
        return Err(ParamError::OutOfRange("gamma must be > 1".into()));
    }
    let denom = p * (&dr + alpha) - rat_i(2) * q * (&dr - s * p);
    if denom.is_zero() {
        return Err(ParamError::Degenerate);
    }
    let beta1 = (gamma * (&dr + alpha) - rat_i(2) * q * &dr) / (gamma * &denom);
    let beta2 = (p * &dr - gamma * (&dr - s * p)) / (gamma * &denom);
    if !beta1.is_positive() || !beta2.is_positive() {
        return Err(ParamError::NegativeBeta {
            beta1: beta1.to_string(),
            beta2: beta2.to_string(),
        });
    }
    Ok((beta1, beta2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Nondegenerate,
    Degenerate,
}

/// Outcome of the direct admissibility test beta1*gamma + beta2*gamma >= 1.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// beta1*gamma + beta2*gamma - 1 as a float.
    pub condition_value: f64,
    /// The same quantity as an exact rational string.
    pub condition_value_exact: String,
    pub branch: Branch,
    /// Agreement between the direct test and the range-classification form.
    pub range_form_agrees: bool,
}

/// Admissible gamma-interval (nondegenerate) or (beta1, beta2)-box (degenerate).
#[derive(Debug, Clone, PartialEq)]
pub enum RangeClassification {
    /// gamma must lie in [lo, hi] (hi = None means unbounded above).
    GammaInterval { lo: Rat, hi: Option<Rat> },
    /// Degenerate case: gamma is forced, beta1 in [beta1_min, 1/p], beta2 in [0, beta2_max].
    BetaBox {
        gamma: Rat,
        beta1_min: Rat,
        beta2_max: Rat,
    },
}

impl RangeClassification {
    /// Whether the given parameter set satisfies this classification.
    pub fn contains(&self, params: &ParamSet) -> bool {
        match self {
            RangeClassification::GammaInterval { lo, hi } => {
                &params.gamma >= lo && hi.as_ref().map_or(true, |h| &params.gamma <= h)
            }
            RangeClassification::BetaBox {
                gamma,
                beta1_min,
                beta2_max,
            } => &params.gamma == gamma && &params.beta1 >= beta1_min && &params.beta2 <= beta2_max,
        }
    }
}

/// Classify the admissible range in the equivalent form of the two range lemmas.
pub fn classify_gamma_range(
    d: u32,
    s: &Rat,
    p: &Rat,
    q: &Rat,
    alpha: &Rat,
) -> Result<RangeClassification, ParamError> {
    let dr = rat_i(d as i64);
    if !alpha.is_positive() || alpha >= &dr {
        return Err(ParamError::OutOfRange("alpha must lie in (0, d)".into()));
    }
    let sp = s * p;
    let denom = p * (&dr + alpha) - rat_i(2) * q * (&dr - &sp);
    let lo_expr = p * (alpha + rat_i(2) * q * s) / (alpha + &sp);
    if denom.is_zero() {
        // Here sp < d is forced and gamma = pd/(d-sp).
        let gamma = p * &dr / (&dr - &sp);
        let beta1_min = alpha * (&dr - &sp) / (p * &dr * (alpha + &sp));
        let beta2_max = s * (&dr - &sp) / (&dr * (alpha + &sp));
        return Ok(RangeClassification::BetaBox {
            gamma,
            beta1_min,
            beta2_max,
        });
    }
    if sp >= dr {
        return Ok(RangeClassification::GammaInterval {
            lo: lo_expr,
            hi: None,
        });
    }
    let sob = p * &dr / (&dr - &sp);
    if denom.is_positive() {
        Ok(RangeClassification::GammaInterval {
            lo: lo_expr,
            hi: Some(sob),
        })
    } else {
        Ok(RangeClassification::GammaInterval {
            lo: sob,
            hi: Some(lo_expr),
        })
    }
}

/// Direct admissibility test, cross-checked against the range classification.
pub fn check_gn_admissible(params: &ParamSet) -> AdmissibilityReport {
    let cond = &params.beta1 * &params.gamma + &params.beta2 * &params.gamma - Rat::one();
    let admissible = !cond.is_negative();
    let denom = params.scaling_denominator();
    let branch = if denom.is_zero() {
        Branch::Degenerate
    } else {
        Branch::Nondegenerate
    };
    let range_form_agrees =
        match classify_gamma_range(params.d, &params.s, &params.p, &params.q, &params.alpha) {
            Ok(cls) => cls.contains(params) == admissible,
            Err(_) => false,
        };
    AdmissibilityReport {
        admissible,
        condition_value: rat_f64(&cond),
        condition_value_exact: cond.to_string(),
        branch,
        range_form_agrees,
    }
}

/// Weighted (Caffarelli-Kohn-Nirenberg type) parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct CknParamSet {
    pub base: ParamSet,
    pub gamma_prime: Rat,
    pub tau_prime: Rat,
    pub a11: Rat,
    pub a12: Rat,
    pub a21: Rat,
    pub a22: Rat,
}

impl CknParamSet {
    pub fn alpha1(&self) -> Rat {
        &self.a11 + &self.a12
    }

    pub fn alpha2(&self) -> Rat {
        &self.a21 + &self.a22
    }

    /// sigma = beta1*p*alpha1 + beta2*q*alpha2.
    pub fn sigma(&self) -> Rat {
        &self.base.beta1 * &self.base.p * self.alpha1()
            + &self.base.beta2 * &self.base.q * self.alpha2()
    }

    /// Check the weighted scaling relation 1/gamma' + tau'/d = 1/gamma + sigma/d
    /// together with gamma >= gamma' >= 1 and gamma > 1.
    pub fn validate(&self) -> Result<(), ParamError> {
        self.base.validate()?;
        if self.gamma_prime < Rat::one() {
            return Err(ParamError::OutOfRange("gamma' must be >= 1".into()));
        }
        if self.base.gamma < self.gamma_prime {
            return Err(ParamError::OutOfRange("gamma >= gamma' required".into()));
        }
        let d = rat_i(self.base.d as i64);
        let lhs = Rat::one() / &self.gamma_prime + &self.tau_prime / &d;
        let rhs = Rat::one() / &self.base.gamma + self.sigma() / &d;
        if lhs != rhs {
            return Err(ParamError::ScalingViolated(format!(
                "1/gamma' + tau'/d = {lhs} != 1/gamma + sigma/d = {rhs}"
            )));
        }
        Ok(())
    }
}

/// Which domain of test functions the weighted inequality applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DomainBranch {
    /// 1/gamma' + tau'/d > 0: compactly supported integrable functions.
    CompactSupport,
    /// 1/gamma' + tau'/d < 0: locally integrable, vanishing near the origin.
    VanishNearZero,
    /// 1/gamma' + tau'/d = 0: the theorem gives no domain prescription.
    Boundary,
}

#[derive(Debug, Clone, Serialize)]
pub struct CknReport {
    pub admissible: bool,
    /// beta1*gamma' + beta2*gamma' >= 1.
    pub first_alternative: bool,
    /// The nondegeneracy + strict admissibility alternative.
    pub second_alternative: bool,
    /// Sign of 1/gamma' + tau'/d; selects the test-function domain.
    pub domain: DomainBranch,
    /// beta1*gamma' + beta2*gamma' - 1.
    pub condition_value: f64,
}

/// Evaluate both admissibility alternatives of the weighted inequality.
pub fn check_ckn_admissible(params: &CknParamSet) -> Result<CknReport, ParamError> {
    params.validate()?;
    let b = &params.base;
    let cond1 = &b.beta1 * &params.gamma_prime + &b.beta2 * &params.gamma_prime - Rat::one();
    let first_alternative = !cond1.is_negative();

    let d = rat_i(b.d as i64);
    let sp = &b.s * &b.p;
    let nondeg = (&sp - &d - self_mul(&params.alpha1(), &b.p)) / &b.p
        + (&b.alpha + &d + self_mul(&params.alpha2(), &b.q)) / (rat_i(2) * &b.q);
    let strict = &b.beta1 * &b.gamma + &b.beta2 * &b.gamma > Rat::one();
    let second_alternative = !nondeg.is_zero() && strict;

    if !first_alternative && !second_alternative {
        return Err(ParamError::BothConditionsFail);
    }

    let sign = Rat::one() / &params.gamma_prime + &params.tau_prime / &d;
    let domain = if sign.is_positive() {
        DomainBranch::CompactSupport
    } else if sign.is_negative() {
        DomainBranch::VanishNearZero
    } else {
        DomainBranch::Boundary
    };

    Ok(CknReport {
        admissible: true,
        first_alternative,
        second_alternative,
        domain,
        condition_value: rat_f64(&cond1),
    })
}

fn self_mul(a: &Rat, b: &Rat) -> Rat {
    a * b
}

/// The section-4 weighted instantiation at (d, s, p = q >= 2):
/// gamma' = (d+sp)p/d, alpha = d-sp, beta1 = (d-sp)/(p(d+sp)), beta2 = s/(d+sp),
/// tau' = -(d-sp)/p, a11 = a12 = -(d-sp)/(2p), a21 = a22 = -(d-sp)/p.
pub fn hardy_instantiation(d: u32, s: &Rat, p: &Rat) -> Result<CknParamSet, ParamError> {
    let dr = rat_i(d as i64);
    let sp = s * p;
    if sp >= dr {
        return Err(ParamError::OutOfRange("sp < d required".into()));
    }
    let gamma_prime = (&dr + &sp) * p / &dr;
    let alpha = &dr - &sp;
    let beta1 = (&dr - &sp) / (p * (&dr + &sp));
    let beta2 = s / (&dr + &sp);
    let gamma = gamma_prime.clone();
    let base = ParamSet::new(
        d,
        s.clone(),
        p.clone(),
        p.clone(),
        alpha,
        beta1,
        beta2,
        gamma,
    )?;
    let tau_prime = -(&dr - &sp) / p;
    let a11 = -(&dr - &sp) / (rat_i(2) * p);
    let a21 = -(&dr - &sp) / p;
    let ckn = CknParamSet {
        base,
        gamma_prime,
        tau_prime,
        a11: a11.clone(),
        a12: a11,
        a21: a21.clone(),
        a22: a21,
    };
    ckn.validate()?;
    Ok(ckn)
}

/// Float view of a parameter set, for the quadrature layer.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ParamSetF {
    pub d: u32,
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma: f64,
}

impl ParamSet {
    pub fn to_f64(&self) -> ParamSetF {
        ParamSetF {
            d: self.d,
            s: rat_f64(&self.s),
            p: rat_f64(&self.p),
            q: rat_f64(&self.q),
            alpha: rat_f64(&self.alpha),
            beta1: rat_f64(&self.beta1),
            beta2: rat_f64(&self.beta2),
            gamma: rat_f64(&self.gamma),
        }
    }
}

/// Float view of a weighted parameter set.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CknParamSetF {
    pub base: ParamSetF,
    pub gamma_prime: f64,
    pub tau_prime: f64,
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl CknParamSet {
    pub fn to_f64(&self) -> CknParamSetF {
        CknParamSetF {
            base: self.base.to_f64(),
            gamma_prime: rat_f64(&self.gamma_prime),
            tau_prime: rat_f64(&self.tau_prime),
            a11: rat_f64(&self.a11),
            a12: rat_f64(&self.a12),
            a21: rat_f64(&self.a21),
            a22: rat_f64(&self.a22),
        }
    }
}

/// The Lions boundary case: d=3, s=1, p=q=2, alpha=2, gamma=3, beta1=beta2=1/6.
pub fn lions_params() -> ParamSet {
    ParamSet::from_scaling(3, rat_i(1), rat_i(2), rat_i(2), rat_i(2), rat_i(3)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rational_and_decimal_strings() {
        assert_eq!(parse_rat("1/6").unwrap(), rat(1, 6));
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rat("3").unwrap(), rat_i(3));
        assert!(parse_rat("x").is_err());
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn lions_case_betas() {
        let (b1, b2) = solve_scaling_exponents(
            3,
            &rat_i(1),
            &rat_i(2),
            &rat_i(2),
            &rat_i(2),
            &rat_i(3),
        )
        .unwrap();
        assert_eq!(b1, rat(1, 6));
        assert_eq!(b2, rat(1, 6));
    }

    #[test]
    fn negative_beta_rejected() {
        // d=3, s=1, p=2, q=3, alpha=2, gamma=3: denominator 4, beta1 = -3/12 < 0.
        let err = solve_scaling_exponents(
            3,
            &rat_i(1),
            &rat_i(2),
            &rat_i(3),
            &rat_i(2),
            &rat_i(3),
        )
        .unwrap_err();
        assert!(matches!(err, ParamError::NegativeBeta { .. }));
    }

    #[test]
    fn degeneracy_detection() {
        // q = 5/2 gives denominator 5; q = 5 gives denominator 0.
        assert!(solve_scaling_exponents(
            3,
            &rat_i(1),
            &rat_i(2),
            &rat(5, 2),
            &rat_i(2),
            &rat_i(4),
        )
        .is_ok());
        let err = solve_scaling_exponents(
            3,
            &rat_i(1),
            &rat_i(2),
            &rat_i(5),
            &rat_i(2),
            &rat_i(4),
        )
        .unwrap_err();
        assert_eq!(err, ParamError::Degenerate);
    }

    #[test]
    fn lions_is_boundary_admissible() {
        let p = lions_params();
        let rep = check_gn_admissible(&p);
        assert!(rep.admissible);
        assert_eq!(rep.condition_value_exact, "0");
        assert!(rep.range_form_agrees);
    }

    #[test]
    fn gamma_2_7_is_inadmissible() {
        let p = ParamSet::from_scaling(3, rat_i(1), rat_i(2), rat_i(2), rat_i(2), rat(27, 10))
            .unwrap();
        assert_eq!(p.beta1, rat(15, 162));
        assert_eq!(p.beta2, rat(33, 162));
        let rep = check_gn_admissible(&p);
        assert!(!rep.admissible);
        let cond = &p.beta1 * &p.gamma + &p.beta2 * &p.gamma - Rat::one();
        assert_eq!(cond, rat(-2, 10));
        assert!(rep.range_form_agrees);
    }

    #[test]
    fn beta2_gamma_alone_implies_admissible() {
        // Monotonicity: if beta2*gamma >= 1 the sum condition holds.
        let p = lions_params();
        let cond = &p.beta1 * &p.gamma + &p.beta2 * &p.gamma;
        assert!(cond >= &p.beta2 * &p.gamma);
    }

    #[test]
    fn gamma_range_lions_family() {
        let cls = classify_gamma_range(3, &rat_i(1), &rat_i(2), &rat_i(2), &rat_i(2)).unwrap();
        assert_eq!(
            cls,
            RangeClassification::GammaInterval {
                lo: rat_i(3),
                hi: Some(rat_i(6)),
            }
        );
    }

    #[test]
    fn gamma_range_supercritical_branch() {
        // d=1, s=1, p=2, q=1, alpha=1/2: sp >= d, interval [2, inf).
        let cls = classify_gamma_range(1, &rat_i(1), &rat_i(2), &rat_i(1), &rat(1, 2)).unwrap();
        assert_eq!(
            cls,
            RangeClassification::GammaInterval {
                lo: rat_i(2),
                hi: None,
            }
        );
    }

    #[test]
    fn degenerate_beta_box() {
        let cls = classify_gamma_range(3, &rat_i(1), &rat_i(2), &rat_i(5), &rat_i(2)).unwrap();
        match cls {
            RangeClassification::BetaBox {
                gamma, beta1_min, ..
            } => {
                assert_eq!(gamma, rat_i(6));
                // alpha (d - sp) / (p d (alpha + sp)) = 2 / 24.
                assert_eq!(beta1_min, rat(1, 12));
            }
            _ => panic!("expected degenerate box"),
        }
    }

    #[test]
    fn hardy_instantiation_d3_half() {
        let ckn = hardy_instantiation(3, &rat(1, 2), &rat_i(2)).unwrap();
        assert_eq!(ckn.gamma_prime, rat(8, 3));
        assert_eq!(ckn.sigma(), ckn.tau_prime);
        let rep = check_ckn_admissible(&ckn).unwrap();
        // beta1*gamma' + beta2*gamma' = (1/4 + 1/8)*8/3 = 1: first alternative with equality.
        assert!(rep.first_alternative);
        assert_eq!(rep.condition_value, 0.0);
        assert_eq!(rep.domain, DomainBranch::CompactSupport);
    }

    #[test]
    fn ckn_reduces_to_gn_with_zero_weights() {
        let base = lions_params();
        let ckn = CknParamSet {
            gamma_prime: base.gamma.clone(),
            base,
            tau_prime: Rat::zero(),
            a11: Rat::zero(),
            a12: Rat::zero(),
            a21: Rat::zero(),
            a22: Rat::zero(),
        };
        let rep = check_ckn_admissible(&ckn).unwrap();
        let gn = check_gn_admissible(&ckn.base);
        assert_eq!(rep.first_alternative, gn.admissible);
    }
}
