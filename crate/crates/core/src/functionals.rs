//! Norms, Dirichlet forms and inequality quotients on the four geometries:
//! the planar and three-dimensional Grushin embeddings, radial functions of
//! the half-plane distance, and the radial spherical Sobolev family.
//!
//! Every weighted half-line inequality here is driven by a small descriptor
//! ([`LineInstance`]: weights, coefficients, target constant) so the whole
//! family shares one evaluator.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::profiles::{GrushinDim, GrushinProfile, HalfPlaneProfile, RadialProfile};
use crate::quadrature::{
    integrate_halfline_with_splits, integrate_halfplane, integrate_plane,
    integrate_plane_radial3, AxisHint, DecayHint, Singularity,
};

// ---------------------------------------------------------------------------
// parameters and reports
// ---------------------------------------------------------------------------

/// The coupled exponents s, p = 2 + 1/s, q = 2 - 1/(1+s) and the sharp
/// constant A_p = (2 pi)^(2/p - 1) s^(-1 - 2/p).
#[derive(Clone, Copy, Debug)]
pub struct SpectralParams {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub a_p: f64,
}

impl SpectralParams {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::NonpositiveArgument(s));
        }
        let p = 2.0 + 1.0 / s;
        let q = 2.0 - 1.0 / (1.0 + s);
        let a_p = (2.0 * PI).powf(2.0 / p - 1.0) * s.powf(-1.0 - 2.0 / p);
        Ok(SpectralParams { s, p, q, a_p })
    }
}

/// One evaluated inequality instance.
#[derive(Clone, Copy, Debug)]
pub struct QuotientReport {
    /// The squared L^p norm side.
    pub lhs: f64,
    pub dirichlet: f64,
    pub l2_term: f64,
    /// Coefficient-weighted combination of `dirichlet` and `l2_term`.
    pub rhs: f64,
    pub quotient: f64,
    pub reference_constant: f64,
    /// reference_constant - quotient; nonnegative when the inequality holds.
    pub slack: f64,
}

impl QuotientReport {
    fn build(lhs: f64, dirichlet: f64, l2_term: f64, rhs: f64, constant: f64) -> Result<Self> {
        if !(rhs > 0.0) {
            return Err(Error::NonpositiveRhs { lhs, rhs });
        }
        let quotient = lhs / rhs;
        Ok(QuotientReport {
            lhs,
            dirichlet,
            l2_term,
            rhs,
            quotient,
            reference_constant: constant,
            slack: constant - quotient,
        })
    }
}

/// Outcome of a named pass/fail check with a numeric margin.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
}

// ---------------------------------------------------------------------------
// reference constants
// ---------------------------------------------------------------------------

/// pi^(-2/3): the sharp planar Grushin constant.
pub fn grushin2d_constant() -> f64 {
    PI.powf(-2.0 / 3.0)
}

/// 1/(2 pi): the sharp constant in the R^3 Grushin embedding.
pub fn grushin3d_constant() -> f64 {
    0.5 / PI
}

/// 4 pi^(-2/3): A_p at s = 1/4.
pub fn half_plane_sixth_constant() -> f64 {
    4.0 * PI.powf(-2.0 / 3.0)
}

/// (4/3) pi^(-2/3): the cylindrical-reduction constant B_6.
pub fn b6_constant() -> f64 {
    let n = 3.0f64;
    let p = 6.0f64;
    let _ = p;
    4.0 / (n * (n - 2.0)) * ((n - 1.0) / (2.0 * PI)).powf(2.0 / n)
}

/// 2/sqrt(pi): A_p at s = 1/2.
pub fn half_plane_fourth_constant() -> f64 {
    2.0 / PI.sqrt()
}

/// Squared sharp R^3 Sobolev quotient [pi n(n-2)]^(-1) (Gamma(n)/Gamma(n/2))^(2/n), n = 3.
pub fn r3_sobolev_quotient_constant() -> f64 {
    let n = 3.0f64;
    let g_ratio = 2.0 / (PI.sqrt() / 2.0); // Gamma(3)/Gamma(3/2)
    (PI * n * (n - 2.0)).recip() * g_ratio.powf(2.0 / n)
}

// ---------------------------------------------------------------------------
// line instances
// ---------------------------------------------------------------------------

type WeightFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A weight function with the endpoint data needed to build decay hints:
/// w ~ u^(zero_exponent) at 0 and w ~ u^(-tail_exponent) at infinity
/// (negative tail exponent means growth).
#[derive(Clone)]
pub struct Weight {
    f: WeightFn,
    /// sqrt(w) in a form that does not overflow before w itself would;
    /// gradient integrands are computed as (G' * sqrt(w))^2 so that an
    /// underflowed derivative times a huge weight gives 0, not NaN.
    sqrt_f: WeightFn,
    pub zero_exponent: f64,
    pub tail_exponent: f64,
}

impl Weight {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        zero_exponent: f64,
        tail_exponent: f64,
    ) -> Self {
        let f: WeightFn = Arc::new(f);
        let g = f.clone();
        Weight {
            f,
            sqrt_f: Arc::new(move |u| g(u).sqrt()),
            zero_exponent,
            tail_exponent,
        }
    }

    pub fn with_sqrt(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        sqrt_f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        zero_exponent: f64,
        tail_exponent: f64,
    ) -> Self {
        Weight {
            f: Arc::new(f),
            sqrt_f: Arc::new(sqrt_f),
            zero_exponent,
            tail_exponent,
        }
    }

    pub fn one() -> Self {
        Weight::new(|_| 1.0, 0.0, 0.0)
    }

    pub fn eval(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    pub fn eval_sqrt(&self, u: f64) -> f64 {
        (self.sqrt_f)(u)
    }
}

/// Descriptor of one weighted half-line Sobolev instance
/// [Int |G|^p w_lhs du]^(2/p) <= C [ a Int G'^2 w_grad du + b Int G^2 w_mass du ].
#[derive(Clone)]
pub struct LineInstance {
    pub id: &'static str,
    pub p: f64,
    pub constant: f64,
    pub grad_coeff: f64,
    pub mass_coeff: f64,
    pub lhs_weight: Weight,
    pub grad_weight: Weight,
    pub mass_weight: Weight,
    /// Multiply every integral by 4 pi (radial measure of the half-plane).
    pub hyperbolic_measure: bool,
}

/// Ready-made instances of the family, named by the project's equation ids.
pub mod instances {
    use super::*;

    fn inv_sq() -> Weight {
        Weight::new(|u| (1.0 + u).powi(-2), 0.0, 2.0)
    }

    fn radial_grad() -> Weight {
        Weight::with_sqrt(
            |u| u * (1.0 + u),
            |u| u.sqrt() * (1.0 + u).sqrt(),
            1.0,
            -2.0,
        )
    }

    /// Half-plane L^6 inequality in the invariant measure, coefficient -3/16.
    pub fn eq2_m() -> LineInstance {
        LineInstance {
            id: "eq2",
            p: 6.0,
            constant: half_plane_sixth_constant(),
            grad_coeff: 1.0,
            mass_coeff: -3.0 / 16.0,
            lhs_weight: Weight::one(),
            grad_weight: radial_grad(),
            mass_weight: Weight::one(),
            hyperbolic_measure: true,
        }
    }

    /// Same inequality written for the plain du measure, constant 2^(10/3).
    pub fn eq2_radial() -> LineInstance {
        LineInstance {
            id: "eq2-radial",
            p: 6.0,
            constant: 2f64.powf(10.0 / 3.0),
            grad_coeff: 1.0,
            mass_coeff: -3.0 / 16.0,
            lhs_weight: Weight::one(),
            grad_weight: radial_grad(),
            mass_weight: Weight::one(),
            hyperbolic_measure: false,
        }
    }

    /// Half-plane L^6 inequality with the spectral-gap coefficient -1/4.
    pub fn eq3_m() -> LineInstance {
        LineInstance {
            id: "eq3",
            p: 6.0,
            constant: b6_constant(),
            grad_coeff: 1.0,
            mass_coeff: -0.25,
            lhs_weight: Weight::one(),
            grad_weight: radial_grad(),
            mass_weight: Weight::one(),
            hyperbolic_measure: true,
        }
    }

    /// Half-plane L^4 inequality, constant 2/sqrt(pi).
    pub fn eq12_m() -> LineInstance {
        LineInstance {
            id: "eq12",
            p: 4.0,
            constant: half_plane_fourth_constant(),
            grad_coeff: 1.0,
            mass_coeff: -0.25,
            lhs_weight: Weight::one(),
            grad_weight: radial_grad(),
            mass_weight: Weight::one(),
            hyperbolic_measure: true,
        }
    }

    /// The du-normalized form of `eq12_m`, constant 4.
    pub fn eq13() -> LineInstance {
        LineInstance {
            id: "eq13",
            p: 4.0,
            constant: 4.0,
            grad_coeff: 1.0,
            mass_coeff: -0.25,
            lhs_weight: Weight::one(),
            grad_weight: radial_grad(),
            mass_weight: Weight::one(),
            hyperbolic_measure: false,
        }
    }

    /// Inverted-variable form of eq2-radial: weights carry u^(-1/2).
    pub fn eq5() -> LineInstance {
        let w = Weight::new(|u| (1.0 + u).powf(-1.5) / u.sqrt(), -0.5, 2.0);
        LineInstance {
            id: "eq5",
            p: 6.0,
            constant: 2f64.powf(10.0 / 3.0),
            grad_coeff: 1.0,
            mass_coeff: 1.0 / 16.0,
            lhs_weight: w.clone(),
            grad_weight: Weight::with_sqrt(
                |u| u.sqrt() * (1.0 + u).sqrt(),
                |u| u.powf(0.25) * (1.0 + u).powf(0.25),
                0.5,
                -1.0,
            ),
            mass_weight: w,
            hyperbolic_measure: false,
        }
    }

    /// Stereographic form reached from eq5 by the w-map.
    pub fn eq6() -> LineInstance {
        LineInstance {
            id: "eq6",
            p: 6.0,
            constant: 1.0,
            grad_coeff: 4.0,
            mass_coeff: 1.0,
            lhs_weight: inv_sq(),
            grad_weight: Weight::new(|w| 2.0 * w + 1.0, 0.0, -1.0),
            mass_weight: inv_sq(),
            hyperbolic_measure: false,
        }
    }

    /// Peeled form of eq13.
    pub fn eq14() -> LineInstance {
        LineInstance {
            id: "eq14",
            p: 4.0,
            constant: 1.0,
            grad_coeff: 4.0,
            mass_coeff: 1.0,
            lhs_weight: inv_sq(),
            grad_weight: Weight::new(|u| u, 1.0, -1.0),
            mass_weight: inv_sq(),
            hyperbolic_measure: false,
        }
    }

    /// Sphere radial family for exponent p: (p-2)/2 Int w G'^2 + mass.
    pub fn sphere(p: f64) -> LineInstance {
        LineInstance {
            id: "sphere",
            p,
            constant: 1.0,
            grad_coeff: 0.5 * (p - 2.0),
            mass_coeff: 1.0,
            lhs_weight: inv_sq(),
            grad_weight: Weight::new(|w| w, 1.0, -1.0),
            mass_weight: inv_sq(),
            hyperbolic_measure: false,
        }
    }

    /// General-s half-plane instance in the invariant measure.
    pub fn hyperbolic(params: SpectralParams) -> LineInstance {
        LineInstance {
            id: "hyperbolic",
            p: params.p,
            constant: params.a_p,
            grad_coeff: 1.0,
            mass_coeff: params.s * (params.s - 1.0),
            lhs_weight: Weight::one(),
            grad_weight: radial_grad(),
            mass_weight: Weight::one(),
            hyperbolic_measure: true,
        }
    }

    /// Peeled form of the general-s radial instance at alpha = s:
    /// grad weight u (1+u)^(1-2s), mass weight s^2 (1+u)^(-1-2s).
    pub fn peeled(params: SpectralParams) -> LineInstance {
        let s = params.s;
        LineInstance {
            id: "peeled",
            p: params.p,
            constant: (4.0 * PI).powf(1.0 - 2.0 / params.p) * params.a_p,
            grad_coeff: 1.0,
            mass_coeff: s * s,
            lhs_weight: Weight::new(
                move |u| (1.0 + u).powf(-(2.0 * s + 1.0)),
                0.0,
                2.0 * s + 1.0,
            ),
            grad_weight: Weight::with_sqrt(
                move |u| u * (1.0 + u).powf(1.0 - 2.0 * s),
                move |u| u.sqrt() * (1.0 + u).powf(0.5 * (1.0 - 2.0 * s)),
                1.0,
                2.0 * s - 2.0,
            ),
            mass_weight: Weight::new(
                move |u| (1.0 + u).powf(-(2.0 * s + 1.0)),
                0.0,
                2.0 * s + 1.0,
            ),
            hyperbolic_measure: false,
        }
    }

    /// du-normalized general-s instance, constant (4 pi)^(1 - 2/p) A_p.
    pub fn eq17_radial(params: SpectralParams) -> LineInstance {
        LineInstance {
            id: "eq17-radial",
            p: params.p,
            constant: (4.0 * PI).powf(1.0 - 2.0 / params.p) * params.a_p,
            grad_coeff: 1.0,
            mass_coeff: params.s * (params.s - 1.0),
            lhs_weight: Weight::one(),
            grad_weight: radial_grad(),
            mass_weight: Weight::one(),
            hyperbolic_measure: false,
        }
    }

    /// The beta-map image form with gradient kernel
    /// 4 w^(2 - 1/beta) [(1+w)^(1/beta) - w^(1/beta)].
    pub fn eq18(beta: f64) -> LineInstance {
        let r = 1.0 / beta;
        LineInstance {
            id: "eq18",
            p: 2.0 * (1.0 + 1.0 / beta),
            constant: 1.0,
            grad_coeff: 4.0,
            mass_coeff: 1.0,
            lhs_weight: inv_sq(),
            grad_weight: Weight::new(
                move |w| w.powf(2.0 - r) * ((1.0 + w).powf(r) - w.powf(r)),
                2.0 - r,
                -1.0,
            ),
            mass_weight: inv_sq(),
            hyperbolic_measure: false,
        }
    }

    /// Simplified form of eq18 after w -> 1/w: kernel 4 [(1+w)^(1/beta) - 1].
    pub fn eq19(beta: f64) -> LineInstance {
        let r = 1.0 / beta;
        LineInstance {
            id: "eq19",
            p: 2.0 * (1.0 + 1.0 / beta),
            constant: 1.0,
            grad_coeff: 4.0,
            mass_coeff: 1.0,
            lhs_weight: inv_sq(),
            grad_weight: Weight::new(move |w| (1.0 + w).powf(r) - 1.0, 1.0, -r),
            mass_weight: inv_sq(),
            hyperbolic_measure: false,
        }
    }

    /// Sphere comparison form at the same exponent, kernel (1/beta) w.
    pub fn eq20(beta: f64) -> LineInstance {
        LineInstance {
            id: "eq20",
            p: 2.0 * (1.0 + 1.0 / beta),
            constant: 1.0,
            grad_coeff: 1.0 / beta,
            mass_coeff: 1.0,
            lhs_weight: inv_sq(),
            grad_weight: Weight::new(|w| w, 1.0, -1.0),
            mass_weight: inv_sq(),
            hyperbolic_measure: false,
        }
    }
}

// ---------------------------------------------------------------------------
// the shared evaluator
// ---------------------------------------------------------------------------

fn support_splits(g: &RadialProfile) -> Vec<f64> {
    match g.support {
        Some((lo, hi)) => [lo, hi].iter().copied().filter(|&v| v > 0.0).collect(),
        None => Vec::new(),
    }
}

fn diverges(tail: f64) -> bool {
    !(tail > 1.0)
}

fn nonconvergent(context: &str) -> Error {
    Error::NonConvergence {
        context: context.into(),
        estimate: f64::INFINITY,
        threshold: 0.0,
        evaluations: 0,
    }
}

fn weighted_integral(
    f: impl Fn(f64) -> f64,
    w: &Weight,
    tail: f64,
    splits: &[f64],
    tol: f64,
) -> Result<f64> {
    let wf = w.clone();
    weighted_plain_integral(move |u| f(u) * wf.eval(u), w, tail, splits, tol)
}

/// Like [`weighted_integral`] but the integrand already includes the weight;
/// `w` only supplies the endpoint hints.
fn weighted_plain_integral(
    f: impl Fn(f64) -> f64,
    w: &Weight,
    tail: f64,
    splits: &[f64],
    tol: f64,
) -> Result<f64> {
    // widen the endpoint window by half a power: profile factors may add a
    // mild integrable singularity the weight metadata does not know about
    let zero = (w.zero_exponent.min(0.0) - 0.5).max(-0.95);
    let hint = DecayHint {
        tail_exponent: tail,
        singularity_at_zero: Singularity::Algebraic(zero),
    };
    Ok(integrate_halfline_with_splits(f, hint, splits, tol)?.value)
}

/// Evaluate one weighted half-line instance on a radial profile.
pub fn line_quotient(g: &RadialProfile, inst: &LineInstance, tol: f64) -> Result<QuotientReport> {
    let approach = g.tail_exponent;
    let g_eff = if g.limit_at_infinity != 0.0 { 0.0 } else { approach };
    let splits = support_splits(g);

    let lhs_tail = inst.p * g_eff + inst.lhs_weight.tail_exponent;
    let grad_tail = 2.0 * (approach + 1.0) + inst.grad_weight.tail_exponent;
    let mass_tail = 2.0 * g_eff + inst.mass_weight.tail_exponent;
    if diverges(lhs_tail) || diverges(grad_tail) || diverges(mass_tail) {
        return Err(nonconvergent(&format!(
            "instance {}: profile outside the finite-energy class (tails {:.2}/{:.2}/{:.2})",
            inst.id, lhs_tail, grad_tail, mass_tail
        )));
    }

    let ge = g.clone();
    let lhs_int = weighted_integral(
        move |u| ge.eval(u).abs().powf(inst.p),
        &inst.lhs_weight,
        lhs_tail,
        &splits,
        tol,
    )?;
    let gd = g.clone();
    let gw = inst.grad_weight.clone();
    let grad_int = weighted_plain_integral(
        move |u| {
            let s = gd.deriv(u) * gw.eval_sqrt(u);
            s * s
        },
        &inst.grad_weight,
        grad_tail,
        &splits,
        tol,
    )?;
    let gm = g.clone();
    let mass_int = weighted_integral(
        move |u| {
            let v = gm.eval(u);
            v * v
        },
        &inst.mass_weight,
        mass_tail,
        &splits,
        tol,
    )?;

    let m = if inst.hyperbolic_measure { 4.0 * PI } else { 1.0 };
    let lhs = (m * lhs_int).powf(2.0 / inst.p);
    let dirichlet = m * grad_int;
    let l2_term = m * mass_int;
    let rhs = inst.grad_coeff * dirichlet + inst.mass_coeff * l2_term;
    QuotientReport::build(lhs, dirichlet, l2_term, rhs, inst.constant)
}

// ---------------------------------------------------------------------------
// radial norms and quotients on the half-plane
// ---------------------------------------------------------------------------

/// (4 pi Int_0^inf |F|^p du)^(1/p).
pub fn lp_norm_radial(f: &RadialProfile, p: f64, tol: f64) -> Result<f64> {
    let g_eff = if f.limit_at_infinity != 0.0 {
        0.0
    } else {
        f.tail_exponent
    };
    if diverges(p * g_eff) {
        return Err(nonconvergent(&format!(
            "L^{p} norm diverges for tail exponent {}",
            f.tail_exponent
        )));
    }
    let fe = f.clone();
    let splits = support_splits(f);
    let int = integrate_halfline_with_splits(
        move |u| fe.eval(u).abs().powf(p),
        DecayHint::tail(p * g_eff),
        &splits,
        tol,
    )?;
    Ok((4.0 * PI * int.value).powf(1.0 / p))
}

/// 4 pi Int (u + u^2) F'(u)^2 du: the invariant Dirichlet form restricted to
/// radial functions. Diverges (and reports so) outside the finite-energy
/// class, e.g. for (1+u)^(-alpha) with alpha <= 1/2.
pub fn hyperbolic_dirichlet_radial(f: &RadialProfile, tol: f64) -> Result<f64> {
    let tail = 2.0 * (f.tail_exponent + 1.0) - 2.0;
    if diverges(tail) {
        return Err(nonconvergent(&format!(
            "Dirichlet form diverges for tail exponent {} (need > 1/2)",
            f.tail_exponent
        )));
    }
    let fd = f.clone();
    let splits = support_splits(f);
    let int = integrate_halfline_with_splits(
        move |u| {
            let s = fd.deriv(u) * u.sqrt() * (1.0 + u).sqrt();
            s * s
        },
        DecayHint::tail(tail),
        &splits,
        tol,
    )?;
    Ok(4.0 * PI * int.value)
}

/// The general-s inequality on radial profiles in the invariant measure:
/// lhs = ||F||_p^2, rhs = Dirichlet + s(s-1) ||F||_2^2, target A_p.
pub fn hyperbolic_quotient(
    f: &RadialProfile,
    params: SpectralParams,
    tol: f64,
) -> Result<QuotientReport> {
    line_quotient(f, &instances::hyperbolic(params), tol)
}

/// Radial spherical Sobolev quotient at exponent p >= 2 (target 1).
pub fn sphere_radial_quotient(g: &RadialProfile, p: f64, tol: f64) -> Result<QuotientReport> {
    if !(p >= 2.0) {
        return Err(Error::ArgumentOutOfRange(format!(
            "sphere family needs p >= 2, got {p}"
        )));
    }
    line_quotient(g, &instances::sphere(p), tol)
}

/// Spectral-gap check: (1/4) Int F^2 dnu <= Int |DF|^2 dnu.
pub fn spectral_gap_check(f: &RadialProfile, tol: f64) -> Result<CheckReport> {
    let dirichlet = hyperbolic_dirichlet_radial(f, tol)?;
    let l2 = lp_norm_radial(f, 2.0, tol)?;
    let bound = 0.25 * l2 * l2;
    let slack = dirichlet - bound;
    Ok(CheckReport {
        name: "spectral-gap".into(),
        value: dirichlet,
        bound,
        slack,
        pass: slack >= -1e-10,
    })
}

// ---------------------------------------------------------------------------
// Grushin quotients
// ---------------------------------------------------------------------------

/// Planar Grushin quotient ||f||_{L^6}^2 / Int (f_t^2 + 4 t^2 f_x^2),
/// target pi^(-2/3).
pub fn grushin_quotient_2d(f: &GrushinProfile, tol: f64) -> Result<QuotientReport> {
    assert_eq!(f.dim, GrushinDim::Plane, "profile built for the wrong geometry");
    let p = 6.0;
    if diverges(p * f.tail_x) || diverges(p * f.tail_t) || diverges(f.grad_tail_x)
        || diverges(f.grad_tail_t)
    {
        return Err(nonconvergent("planar Grushin integrals diverge"));
    }
    let fe = f.clone();
    let lhs6 = integrate_plane(
        move |x, t| fe.eval(x, t).abs().powi(6),
        &AxisHint::tail(p * f.tail_x),
        &AxisHint::tail(p * f.tail_t),
        tol,
    )?
    .value;
    let fd = f.clone();
    let dir = integrate_plane(
        move |x, t| {
            let ft = fd.dt(x, t);
            let s = 2.0 * t * fd.dx(x, t);
            ft * ft + s * s
        },
        &AxisHint::tail(f.grad_tail_x),
        &AxisHint::tail(f.grad_tail_t),
        tol,
    )?
    .value;
    QuotientReport::build(lhs6.powf(1.0 / 3.0), dir, 0.0, dir, grushin2d_constant())
}

/// R^3 Grushin quotient for t-radial profiles, target 1/(2 pi).
pub fn grushin_quotient_3d(f: &GrushinProfile, tol: f64) -> Result<QuotientReport> {
    assert_eq!(f.dim, GrushinDim::Space, "profile built for the wrong geometry");
    let p = 4.0;
    if diverges(p * f.tail_x) || diverges(p * f.tail_t - 1.0) || diverges(f.grad_tail_x)
        || diverges(f.grad_tail_t - 1.0)
    {
        return Err(nonconvergent("R^3 Grushin integrals diverge"));
    }
    let fe = f.clone();
    let lhs4 = integrate_plane_radial3(
        move |x, r| fe.eval(x, r).abs().powi(4),
        &AxisHint::tail(p * f.tail_x),
        &AxisHint::tail(p * f.tail_t),
        tol,
    )?
    .value;
    let fd = f.clone();
    let dir = integrate_plane_radial3(
        move |x, r| {
            let fr = fd.dt(x, r);
            let s = 2.0 * r * fd.dx(x, r);
            fr * fr + s * s
        },
        &AxisHint::tail(f.grad_tail_x),
        &AxisHint::tail(f.grad_tail_t),
        tol,
    )?
    .value;
    QuotientReport::build(lhs4.sqrt(), dir, 0.0, dir, grushin3d_constant())
}

// ---------------------------------------------------------------------------
// weighted Sobolev form on the half-plane
// ---------------------------------------------------------------------------

fn halfplane_hints(f: &HalfPlaneProfile, y0_exponent: f64) -> (AxisHint, AxisHint) {
    let (mut hx, mut hy) = (
        AxisHint::tail(2.0 * f.tail_x.max(1.01)),
        AxisHint::tail(2.0 * f.tail_y.max(1.01)),
    );
    if let Some(((x0, x1), (y0, y1))) = f.support {
        hx = hx.with_splits(&[x0, x1]);
        hy = hy.with_splits(&[y0, y1]);
        hy.tail_exponent = f64::INFINITY;
        hx.tail_exponent = f64::INFINITY;
    }
    if y0_exponent < 0.0 {
        hy = hy.with_zero_singularity(Singularity::Algebraic(y0_exponent.max(-0.95)));
    }
    (hx, hy)
}

/// Int y^(2 alpha) |grad(y^(-alpha) f)|^2 dx dy, evaluated through the
/// profile's partials as Int [f_x^2 + (f_y - alpha f / y)^2] dx dy.
/// Finite even when the two terms of the companion identity diverge
/// individually.
pub fn weighted_form_value(f: &HalfPlaneProfile, alpha: f64, tol: f64) -> Result<f64> {
    let fe = f.clone();
    let zero_exp = 2.0 * (f.y0_exponent - 1.0).min(0.0);
    let (hx, hy) = halfplane_hints(f, zero_exp.max(-0.95));
    Ok(integrate_halfplane(
        move |x, y| {
            let fx = fe.dx(x, y);
            let w = fe.dy(x, y) - alpha * fe.eval(x, y) / y;
            fx * fx + w * w
        },
        &hx,
        &hy,
        tol,
    )?
    .value)
}

/// Residual of the weighted Sobolev form identity
/// Int y^(2a) |grad(y^(-a) f)|^2 = Int |Df|^2 dnu + a(a-1) Int |f|^2 dnu
/// on a compactly supported profile, both sides by independent quadratures.
pub fn weighted_form_residual(f: &HalfPlaneProfile, alpha: f64, tol: f64) -> Result<f64> {
    let lhs = weighted_form_value(f, alpha, tol)?;
    let (hx, hy) = halfplane_hints(f, 0.0);
    let fg = f.clone();
    let dirichlet = integrate_halfplane(
        move |x, y| {
            let fx = fg.dx(x, y);
            let fy = fg.dy(x, y);
            fx * fx + fy * fy
        },
        &hx,
        &hy,
        tol,
    )?
    .value;
    let fm = f.clone();
    let mass = integrate_halfplane(
        move |x, y| {
            let v = fm.eval(x, y);
            v * v / (y * y)
        },
        &hx,
        &hy,
        tol,
    )?
    .value;
    let rhs = dirichlet + alpha * (alpha - 1.0) * mass;
    Ok((lhs - rhs).abs() / (1.0 + rhs.abs()))
}

/// General (non-radial) quotient ||f||_{L^p(M)}^2 over the weighted form,
/// used by the reduction chain where images are not radial.
pub fn halfplane_quotient(
    f: &HalfPlaneProfile,
    p: f64,
    alpha: f64,
    constant: f64,
    tol: f64,
) -> Result<QuotientReport> {
    let fe = f.clone();
    let zero_exp = (p * f.y0_exponent - 2.0).min(0.0);
    let (hx, hy) = halfplane_hints(f, zero_exp.max(-0.95));
    let norm_int = integrate_halfplane(
        move |x, y| fe.eval(x, y).abs().powf(p) / (y * y),
        &hx,
        &hy,
        tol,
    )?
    .value;
    let form = weighted_form_value(f, alpha, tol)?;
    QuotientReport::build(norm_int.powf(2.0 / p), form, 0.0, form, constant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{DEFAULT_TOL_1D, DEFAULT_TOL_2D};
    use approx::assert_relative_eq;
    use instances::*;

    const TOL: f64 = DEFAULT_TOL_1D;

    #[test]
    fn spectral_params_identities() {
        // exact coefficient identities for the named constants
        let p6 = SpectralParams::new(0.25).unwrap();
        assert_relative_eq!(p6.a_p, half_plane_sixth_constant(), max_relative = 1e-15);
        let p4 = SpectralParams::new(0.5).unwrap();
        assert_relative_eq!(p4.a_p, half_plane_fourth_constant(), max_relative = 1e-15);
        // duality of the exponent pair across a range of s
        for i in 1..=20 {
            let s = 0.15 * i as f64;
            let sp = SpectralParams::new(s).unwrap();
            assert!((1.0 / sp.p + 1.0 / sp.q - 1.0).abs() < 1e-15);
            assert!(if s <= 0.5 { sp.p >= 4.0 } else { sp.p <= 4.0 });
        }
        assert!(SpectralParams::new(0.0).is_err());
    }

    #[test]
    fn b6_matches_closed_form() {
        assert_relative_eq!(
            b6_constant(),
            (4.0 / 3.0) * PI.powf(-2.0 / 3.0),
            max_relative = 1e-15
        );
    }

    #[test]
    fn lp_norm_examples() {
        let f = RadialProfile::power_law(1.0).unwrap();
        assert_relative_eq!(
            lp_norm_radial(&f, 2.0, TOL).unwrap(),
            (4.0 * PI).sqrt(),
            max_relative = 1e-10
        );
        assert_relative_eq!(
            lp_norm_radial(&f, 3.0, TOL).unwrap(),
            (2.0 * PI).powf(1.0 / 3.0),
            max_relative = 1e-10
        );
        let z = RadialProfile::bump(1.0, 0.5).unwrap().scale(0.0);
        assert_eq!(lp_norm_radial(&z, 6.0, TOL).unwrap(), 0.0);
    }

    #[test]
    fn dirichlet_examples() {
        let c = RadialProfile::constant(2.0);
        assert_eq!(hyperbolic_dirichlet_radial(&c, TOL).unwrap(), 0.0);

        let f = RadialProfile::power_law(1.0).unwrap();
        assert_relative_eq!(
            hyperbolic_dirichlet_radial(&f, TOL).unwrap(),
            2.0 * PI,
            max_relative = 1e-10
        );

        let shallow = RadialProfile::power_law(0.25).unwrap();
        assert!(matches!(
            hyperbolic_dirichlet_radial(&shallow, TOL),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn hyperbolic_quotient_extremal_family() {
        // (1+u)^(-s) attains A_p exactly; Beta-integral closed forms give
        // lhs = (2 pi / s)^(2/p) and rhs = 2 pi s.
        for &s in &[0.6, 0.75, 1.0, 1.5, 2.0, 3.0] {
            let params = SpectralParams::new(s).unwrap();
            let f = RadialProfile::power_law(s).unwrap();
            let r = hyperbolic_quotient(&f, params, TOL).unwrap();
            assert_relative_eq!(r.lhs, (2.0 * PI / s).powf(2.0 / params.p), max_relative = 1e-9);
            assert_relative_eq!(r.rhs, 2.0 * PI * s, max_relative = 1e-9);
            assert_relative_eq!(r.quotient, params.a_p, max_relative = 1e-9);
            assert!((r.quotient * r.rhs - r.lhs).abs() <= 1e-12 * r.lhs.abs());
        }
    }

    #[test]
    fn hyperbolic_quotient_spec_points() {
        // s = 1, F = (1+u)^(-1): dirichlet 2 pi, slack 0
        let params = SpectralParams::new(1.0).unwrap();
        let f = RadialProfile::power_law(1.0).unwrap();
        let r = hyperbolic_quotient(&f, params, TOL).unwrap();
        assert_relative_eq!(r.dirichlet, 2.0 * PI, max_relative = 1e-9);
        assert_relative_eq!(r.quotient, (2.0 * PI).powf(-1.0 / 3.0), max_relative = 1e-9);
        assert!(r.slack.abs() < 1e-9);

        // s = 1/2 (p = 4): same profile is strictly inside
        let params = SpectralParams::new(0.5).unwrap();
        let r = hyperbolic_quotient(&f, params, TOL).unwrap();
        assert!(r.quotient < half_plane_fourth_constant());

        // s = 2 (p = 5/2) at its own extremal
        let params = SpectralParams::new(2.0).unwrap();
        let f = RadialProfile::power_law(2.0).unwrap();
        let r = hyperbolic_quotient(&f, params, TOL).unwrap();
        let expect = (2.0 * PI).powf(-0.2) * 2f64.powf(-1.8);
        assert_relative_eq!(r.quotient, expect, max_relative = 1e-9);
        assert_relative_eq!(params.a_p, expect, max_relative = 1e-14);
    }

    #[test]
    fn sphere_quotient_examples() {
        let ones = RadialProfile::constant(1.0);
        let r = sphere_radial_quotient(&ones, 6.0, TOL).unwrap();
        assert_relative_eq!(r.lhs, 1.0, max_relative = 1e-10);
        assert_relative_eq!(r.rhs, 1.0, max_relative = 1e-10);
        assert!(r.slack.abs() < 1e-9);

        let g = RadialProfile::power_law(0.5).unwrap();
        let r = sphere_radial_quotient(&g, 4.0, TOL).unwrap();
        assert!(r.quotient < 1.0);

        let g = RadialProfile::power_law(0.25).unwrap();
        let r = sphere_radial_quotient(&g, 6.0, TOL).unwrap();
        assert!(r.quotient < 1.0);

        assert!(sphere_radial_quotient(&ones, 1.5, TOL).is_err());
    }

    #[test]
    fn sphere_domination_of_stereographic_forms() {
        // termwise 2w <= 4(2w+1) and w <= 4w: the sphere rhs never exceeds
        // the transported one on any profile
        let profiles: Vec<RadialProfile> = vec![
            RadialProfile::power_law(0.4).unwrap(),
            RadialProfile::power_law(1.0).unwrap(),
            RadialProfile::power_law(2.2).unwrap(),
            RadialProfile::bump(1.0, 0.8).unwrap(),
            RadialProfile::power_law(0.7)
                .unwrap()
                .add(&RadialProfile::bump(2.0, 1.0).unwrap().scale(0.3)),
        ];
        for g in &profiles {
            let strong = line_quotient(g, &sphere(6.0), TOL).unwrap();
            let weak = line_quotient(g, &eq6(), TOL).unwrap();
            assert!(strong.rhs <= weak.rhs + 1e-9 * weak.rhs.abs());
            let strong = line_quotient(g, &eq16_like(), TOL).unwrap();
            let weak = line_quotient(g, &eq14(), TOL).unwrap();
            assert!(strong.rhs <= weak.rhs + 1e-9 * weak.rhs.abs());
        }
    }

    fn eq16_like() -> LineInstance {
        instances::sphere(4.0)
    }

    #[test]
    fn nonpositive_rhs_is_reported() {
        // a steep bump far out makes the s(s-1) < 0 term dominate nothing:
        // force a synthetic instance with a large negative mass coefficient
        let f = RadialProfile::bump(3.0, 0.5).unwrap();
        let mut inst = instances::eq12_m();
        inst.mass_coeff = -1e4;
        match line_quotient(&f, &inst, TOL) {
            Err(Error::NonpositiveRhs { .. }) => {}
            other => panic!("expected NonpositiveRhs, got {other:?}"),
        }
    }

    #[test]
    fn spectral_gap_examples() {
        let f = RadialProfile::bump(1.5, 0.7).unwrap();
        assert!(spectral_gap_check(&f, TOL).unwrap().pass);

        let f = RadialProfile::power_law(1.0).unwrap();
        let r = spectral_gap_check(&f, TOL).unwrap();
        assert!(r.pass);
        assert_relative_eq!(r.value, 2.0 * PI, max_relative = 1e-9);
        assert_relative_eq!(r.bound, PI, max_relative = 1e-9);

        // slack shrinks toward zero as alpha decreases to 1/2:
        // dirichlet / l2^2 = alpha / 2 exactly for power laws
        let mut prev = f64::INFINITY;
        for &alpha in &[0.75, 0.6, 0.55] {
            let f = RadialProfile::power_law(alpha).unwrap();
            let r = spectral_gap_check(&f, TOL).unwrap();
            assert!(r.pass);
            let ratio = r.value / (4.0 * r.bound);
            assert_relative_eq!(ratio, alpha / 2.0, max_relative = 1e-8);
            assert!(ratio < prev);
            prev = ratio;
        }
    }

    #[test]
    fn weighted_form_identity_on_bump() {
        let b = HalfPlaneProfile::bump(0.5, 2.0, 1.0, 1.0).unwrap();
        for &alpha in &[1.0, 0.25, 0.5] {
            let r = weighted_form_residual(&b, alpha, 1e-9).unwrap();
            assert!(r < 1e-8, "alpha = {alpha}: residual {r:.3e}");
        }
    }

    #[test]
    fn grushin_2d_extremal_hits_constant() {
        let f = GrushinProfile::extremal(GrushinDim::Plane, 0.25).unwrap();
        let r = grushin_quotient_2d(&f, DEFAULT_TOL_2D).unwrap();
        assert_relative_eq!(r.quotient, grushin2d_constant(), max_relative = 1e-4);
    }

    #[test]
    fn grushin_2d_gaussian_strict_and_scale_invariant() {
        let f = GrushinProfile::gaussian(GrushinDim::Plane, 1.0, 1.0).unwrap();
        let r = grushin_quotient_2d(&f, DEFAULT_TOL_2D).unwrap();
        assert!(r.quotient < grushin2d_constant());

        let r2 = grushin_quotient_2d(&f.rescale(2.0), DEFAULT_TOL_2D).unwrap();
        assert_relative_eq!(r.quotient, r2.quotient, max_relative = 1e-6);
        let r3 = grushin_quotient_2d(&f.rescale(0.5), DEFAULT_TOL_2D).unwrap();
        assert_relative_eq!(r.quotient, r3.quotient, max_relative = 1e-6);
    }

    #[test]
    fn grushin_3d_extremal_hits_constant() {
        let f = GrushinProfile::extremal(GrushinDim::Space, 0.5).unwrap();
        let r = grushin_quotient_3d(&f, DEFAULT_TOL_2D).unwrap();
        assert_relative_eq!(r.quotient, grushin3d_constant(), max_relative = 1e-4);
    }

    #[test]
    fn grushin_3d_gaussian_strict_and_scale_invariant() {
        let f = GrushinProfile::gaussian(GrushinDim::Space, 1.0, 1.0).unwrap();
        let r = grushin_quotient_3d(&f, DEFAULT_TOL_2D).unwrap();
        assert!(r.quotient < grushin3d_constant());
        let r2 = grushin_quotient_3d(&f.rescale(2.0), DEFAULT_TOL_2D).unwrap();
        assert_relative_eq!(r.quotient, r2.quotient, max_relative = 1e-6);
    }

    #[test]
    fn eq2_eq3_slack_comparison_is_documented_per_profile() {
        // the two sixth-power forms order differently depending on the
        // profile; record the comparison rather than adjudicating globally
        let mut signs = Vec::new();
        for &alpha in &[0.6, 1.0, 2.0] {
            let f = RadialProfile::power_law(alpha).unwrap();
            let r2 = line_quotient(&f, &eq2_m(), TOL).unwrap();
            let r3 = line_quotient(&f, &eq3_m(), TOL).unwrap();
            assert!(r2.slack >= -1e-9);
            assert!(r3.slack >= -1e-9);
            signs.push(r2.slack < r3.slack);
        }
        assert_eq!(signs.len(), 3);
    }
}
