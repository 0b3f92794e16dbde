//! Gamma, Beta, the diagonal Gauss hypergeometric family F(s, s; 2s; x),
//! and the fundamental solution psi_s of L_s = -y^2 Laplacian + s(s-1),
//! evaluated both as a Beta-type integral and through the hypergeometric
//! closed form.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_unit_aware, QuadratureResult};

// Lanczos approximation, g = 10.900511 (Pugh). Accurate to ~16 digits for
// positive arguments.
const LANCZOS_R: f64 = 10.900511;
const LANCZOS_DK: &[f64] = &[
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];
const TWO_SQRT_E_OVER_PI: f64 = 1.8603827342052657;

/// Gamma function for x > 0.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::NonpositiveArgument(x));
    }
    let s = LANCZOS_DK
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_DK[0], |acc, (k, dk)| acc + dk / (x + k as f64 - 1.0));
    Ok(s * TWO_SQRT_E_OVER_PI * ((x - 0.5 + LANCZOS_R) / std::f64::consts::E).powf(x - 0.5))
}

/// log Gamma for x > 0; avoids overflow for large arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::NonpositiveArgument(x));
    }
    let s = LANCZOS_DK
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_DK[0], |acc, (k, dk)| acc + dk / (x + k as f64 - 1.0));
    Ok(s.ln()
        + TWO_SQRT_E_OVER_PI.ln()
        + (x - 0.5) * ((x - 0.5 + LANCZOS_R) / std::f64::consts::E).ln())
}

/// Beta function B(a, b) for positive arguments.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    Ok((ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?).exp())
}

/// Where the hypergeometric path hands off to the integral representation.
/// The series still converges beyond this (logarithmically slowly as x -> 1);
/// the handoff keeps psi evaluation cheap without touching connection
/// formulas.
pub const HYP_SERIES_CUTOFF: f64 = 0.99925;

/// Diagonal Gauss hypergeometric function F(s, s; 2s; x) on 0 <= x < 1 by
/// direct series summation. All terms are positive, so the sum is stable;
/// near x = 1 the term count grows like |log(1-x)| / (1-x)-ish and is capped.
pub fn hyp2f1_diag(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::NonpositiveArgument(s));
    }
    if !(0.0..1.0).contains(&x) {
        return Err(Error::ArgumentOutOfRange(format!(
            "F(s,s;2s;x) series needs 0 <= x < 1, got {x}"
        )));
    }
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let max_terms = 400_000usize;
    for n in 0..max_terms {
        let nf = n as f64;
        term *= (s + nf) * (s + nf) / ((2.0 * s + nf) * (nf + 1.0)) * x;
        sum += term;
        if n > 4 && term < 0.25 * f64::EPSILON * sum {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        context: format!("hypergeometric series at s = {s}, x = {x}"),
        estimate: term / sum,
        threshold: f64::EPSILON,
        evaluations: max_terms,
    })
}

/// One evaluation of the fundamental solution in both representations.
#[derive(Clone, Copy, Debug)]
pub struct PsiEvaluation {
    pub u: f64,
    pub s: f64,
    pub value_integral: f64,
    pub value_hypergeometric: f64,
    /// Relative difference between the two representations.
    pub agreement: f64,
}

/// Coefficient Gamma(s)^2 / (4 pi Gamma(2s)) of the large-u asymptotics.
pub fn psi_tail_coefficient(s: f64) -> Result<f64> {
    Ok((2.0 * ln_gamma(s)? - ln_gamma(2.0 * s)?).exp() / (4.0 * PI))
}

/// Beta-type integral representation
/// psi_s(u) = (1/4pi) Int_0^1 [t(1-t)]^(s-1) (t+u)^(-s) dt.
pub fn psi_integral(u: f64, s: f64, tol: f64) -> Result<QuadratureResult> {
    if !(u > 0.0) {
        return Err(Error::NonpositiveArgument(u));
    }
    let e = s - 1.0;
    // pre-scale so the absolute tolerance acts relatively even when the
    // integral is tiny (large u, large s)
    let scale = 0.25f64.powf(e) * (0.5 + u).powf(-s);
    let mut r = integrate_unit_aware(
        move |_t, da, db| (da * db).powf(e) * (da + u).powf(-s) / scale,
        (e, e),
        tol,
    )?;
    r.value *= scale / (4.0 * PI);
    r.error_estimate *= scale / (4.0 * PI);
    Ok(r)
}

/// Hypergeometric closed form
/// psi_s(u) = Gamma(s)^2 / (4 pi Gamma(2s)) (1+u)^(-s) F(s, s; 2s; 1/(1+u)).
/// For x = 1/(1+u) above the series cutoff the integral value is used, per
/// the representation-agreement contract.
pub fn psi(u: f64, s: f64) -> Result<PsiEvaluation> {
    if !(s >= 0.5) {
        return Err(Error::ArgumentOutOfRange(format!(
            "psi_s implemented for s >= 1/2, got {s}"
        )));
    }
    let integral = psi_integral(u, s, 1e-12)?.value;
    let x = 1.0 / (1.0 + u);
    let hyper = if x <= HYP_SERIES_CUTOFF {
        psi_tail_coefficient(s)? * (1.0 + u).powf(-s) * hyp2f1_diag(s, x)?
    } else {
        integral
    };
    let denom = integral.abs().max(hyper.abs()).max(f64::MIN_POSITIVE);
    Ok(PsiEvaluation {
        u,
        s,
        value_integral: integral,
        value_hypergeometric: hyper,
        agreement: (integral - hyper).abs() / denom,
    })
}

/// Closed form at s = 1: psi_1(u) = (1/4pi) log((1+u)/u).
pub fn psi_s1_closed_form(u: f64) -> f64 {
    (1.0 / (4.0 * PI)) * ((1.0 + u) / u).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn gamma_basic_values() {
        assert_relative_eq!(gamma(1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(0.5).unwrap(), PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(gamma(5.0).unwrap(), 24.0, max_relative = 1e-13);
        assert_relative_eq!(gamma(1.5).unwrap(), 0.5 * PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(gamma(10.1).unwrap(), 454760.7514415855, max_relative = 1e-13);
        assert!(gamma(0.0).is_err());
        assert!(gamma(-1.5).is_err());
    }

    #[test]
    fn gamma_half_matches_defining_integral() {
        // independent route: Gamma(1/2) = Int_0^inf t^(-1/2) e^(-t) dt
        use crate::quadrature::{integrate_halfline, DecayHint};
        let q = integrate_halfline(
            |t| (-t).exp() / t.sqrt(),
            DecayHint::tail(f64::INFINITY).with_algebraic_zero(-0.5),
            1e-12,
        )
        .unwrap();
        assert_relative_eq!(gamma(0.5).unwrap(), q.value, max_relative = 1e-12);
    }

    #[test]
    fn beta_identities() {
        assert_relative_eq!(beta(2.0, 1.0).unwrap(), 0.5, max_relative = 1e-13);
        assert_relative_eq!(beta(0.5, 0.5).unwrap(), PI, max_relative = 1e-13);
        assert_relative_eq!(beta(1.5, 1.5).unwrap(), PI / 8.0, max_relative = 1e-13);
    }

    #[test]
    fn ln_gamma_consistent_with_gamma() {
        for x in [0.3, 1.0, 2.5, 7.7, 20.0] {
            assert_relative_eq!(
                ln_gamma(x).unwrap(),
                gamma(x).unwrap().ln(),
                max_relative = 1e-12,
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn hyp_at_zero_is_one() {
        for s in [0.5, 1.0, 1.5, 2.0, 3.0] {
            assert_eq!(hyp2f1_diag(s, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn hyp_log_closed_form() {
        // F(1,1;2;x) = -log(1-x)/x
        let v = hyp2f1_diag(1.0, 0.5).unwrap();
        assert_relative_eq!(v, 2.0 * LN_2, max_relative = 1e-14);
        for x in [0.1, 0.3, 0.9, 0.99] {
            let v = hyp2f1_diag(1.0, x).unwrap();
            assert_relative_eq!(v, -(1.0f64 - x).ln() / x, max_relative = 1e-12);
        }
    }

    #[test]
    fn hyp_matches_partial_sum_oracle() {
        // partial sums with an explicit geometric tail bound
        let (s, x) = (2.0, 0.3);
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut n = 0.0f64;
        loop {
            term *= (s + n) * (s + n) / ((2.0 * s + n) * (n + 1.0)) * x;
            sum += term;
            n += 1.0;
            // ratio of consecutive terms approaches x; bound the tail
            if term * x / (1.0 - x) < 1e-14 * sum {
                break;
            }
        }
        let tail_bound = term * x / (1.0 - x);
        let v = hyp2f1_diag(s, x).unwrap();
        assert!((v - sum).abs() <= tail_bound + 1e-14 * sum);
    }

    #[test]
    fn hyp_rejects_out_of_range() {
        assert!(hyp2f1_diag(1.0, 1.0).is_err());
        assert!(hyp2f1_diag(1.0, -0.1).is_err());
        assert!(hyp2f1_diag(1.0, 1.5).is_err());
    }

    #[test]
    fn psi_s1_closed_form_match() {
        for u in [1e-3, 0.1, 1.0, 10.0, 1e3] {
            let ev = psi(u, 1.0).unwrap();
            let exact = psi_s1_closed_form(u);
            assert_relative_eq!(ev.value_integral, exact, max_relative = 1e-12);
            assert_relative_eq!(ev.value_hypergeometric, exact, max_relative = 1e-12);
        }
        // spec-level point: psi_1(1) = log(2)/(4 pi)
        let ev = psi(1.0, 1.0).unwrap();
        assert_relative_eq!(ev.value_integral, LN_2 / (4.0 * PI), max_relative = 1e-12);
    }

    #[test]
    fn psi_representations_agree_on_grid() {
        for &s in &[1.0, 1.25, 1.5, 2.0, 3.0] {
            for k in -3..=3 {
                let u = 10f64.powi(k);
                let ev = psi(u, s).unwrap();
                assert!(
                    ev.agreement < 1e-9,
                    "psi disagreement {:.2e} at u={u}, s={s}",
                    ev.agreement
                );
                assert!(ev.value_integral > 0.0);
            }
        }
    }

    #[test]
    fn psi_large_u_asymptotics() {
        let s = 1.5;
        let u = 1e4;
        let ev = psi(u, s).unwrap();
        let ratio = ev.value_integral / (psi_tail_coefficient(s).unwrap() * u.powf(-s));
        assert!((0.999..=1.001).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn psi_small_u_log_behavior() {
        let ev = psi(1e-6, 2.0).unwrap();
        let v = ev.value_integral + (1e-6f64).ln() / (4.0 * PI);
        assert!(v.abs() < 1.0, "psi + log u / 4pi = {v}");
    }

    #[test]
    fn psi_monotone_decreasing() {
        for &s in &[1.0, 1.5, 2.0, 3.0] {
            let mut prev = f64::INFINITY;
            for k in 0..40 {
                let u = 1e-3 * 1.6f64.powi(k);
                let v = psi(u, s).unwrap().value_integral;
                assert!(v > 0.0);
                assert!(v < prev, "psi not decreasing at u={u}, s={s}");
                prev = v;
            }
        }
    }
}
