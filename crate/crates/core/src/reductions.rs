//! The change-of-variables steps connecting the Grushin embeddings to the
//! half-plane and spherical Sobolev families, each implemented as a profile
//! transform with analytically chained derivatives plus a residual check of
//! the claimed norm/form identity, both sides by independent quadratures.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functionals::{
    b6_constant, halfplane_quotient, instances, line_quotient, r3_sobolev_quotient_constant,
    CheckReport, QuotientReport, SpectralParams,
};
use crate::profiles::{GrushinDim, GrushinProfile, HalfPlaneProfile, RadialProfile};
use crate::quadrature::{
    integrate_halfline_with_splits, integrate_halfplane, integrate_plane,
    integrate_plane_radial3, integrate_real_line, integrate_unit_aware, AxisHint, DecayHint,
    Singularity,
};

/// One verified reduction: residuals of the norm identity and the
/// Dirichlet-form identity between the two coordinate systems.
#[derive(Clone, Debug)]
pub struct ReductionReport {
    pub name: String,
    pub norm_identity_residual: f64,
    pub form_identity_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ReductionReport {
    fn new(name: &str, norm: f64, form: f64, tol: f64) -> Self {
        ReductionReport {
            name: name.into(),
            norm_identity_residual: norm,
            form_identity_residual: form,
            tolerance: tol,
            pass: norm < tol && form < tol,
        }
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

// ---------------------------------------------------------------------------
// Grushin -> half-plane
// ---------------------------------------------------------------------------

/// y = t^2, F(x, y) = y^(1/4) f(x, sqrt(y)). The report verifies the L^6
/// norm identity and that the Grushin form equals four times the weighted
/// Sobolev form at exponent 1/4 on the image.
pub fn grushin2d_to_hyperbolic(
    f: &GrushinProfile,
    tol: f64,
) -> Result<(HalfPlaneProfile, ReductionReport)> {
    assert_eq!(f.dim, GrushinDim::Plane);
    let (fe, fx, ft) = (f.clone(), f.clone(), f.clone());
    let image = HalfPlaneProfile::from_fns(
        move |x, y| y.powf(0.25) * fe.eval(x, y.sqrt()),
        move |x, y| y.powf(0.25) * fx.dx(x, y.sqrt()),
        move |x, y| {
            let t = y.sqrt();
            0.25 * y.powf(-0.75) * ft.eval(x, t) + 0.5 * y.powf(-0.25) * ft.dt(x, t)
        },
        f.tail_x,
        (f.tail_t / 2.0 - 0.25).max(0.1),
        0.25,
    );

    // norm identity: ||f||_L6(R2) = ||F||_L6(M)
    let fa = f.clone();
    let norm_f = integrate_plane(
        move |x, t| fa.eval(x, t).abs().powi(6),
        &AxisHint::tail(6.0 * f.tail_x),
        &AxisHint::tail(6.0 * f.tail_t),
        tol,
    )?
    .value
    .powf(1.0 / 6.0);
    let im = image.clone();
    let norm_im = integrate_halfplane(
        move |x, y| im.eval(x, y).abs().powi(6) / (y * y),
        &AxisHint::tail(6.0 * f.tail_x),
        &AxisHint::tail(3.0 * f.tail_t + 0.5)
            .with_zero_singularity(Singularity::Algebraic(-0.5)),
        tol,
    )?
    .value
    .powf(1.0 / 6.0);

    // form identity: Int (f_t^2 + 4 t^2 f_x^2) = 4 W_{1/4}(F)
    let fd = f.clone();
    let form_f = integrate_plane(
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
    let im = image.clone();
    let form_im = integrate_halfplane(
        move |x, y| {
            let gx = im.dx(x, y);
            let gy = im.dy(x, y) - 0.25 * im.eval(x, y) / y;
            gx * gx + gy * gy
        },
        &AxisHint::tail(f.grad_tail_x),
        &AxisHint::tail(f.grad_tail_t / 2.0 + 0.5)
            .with_zero_singularity(Singularity::Algebraic(-0.5)),
        tol,
    )?
    .value;

    let report = ReductionReport::new(
        "grushin2d-to-halfplane",
        rel_gap(norm_f, norm_im),
        rel_gap(form_f, 4.0 * form_im),
        (tol * 20.0).max(1e-6),
    );
    Ok((image, report))
}

/// y = |t|^2 for t-radial profiles on R^3, F(x, y) = y^(1/2) f(x, sqrt(y)).
/// Norm identity ||f||_L4(R3) = pi^(1/4) ||F||_L4(M); form identity
/// Grushin form = 4 pi W_{1/2}(F).
pub fn grushin3d_to_hyperbolic(
    f: &GrushinProfile,
    tol: f64,
) -> Result<(HalfPlaneProfile, ReductionReport)> {
    assert_eq!(f.dim, GrushinDim::Space);
    let (fe, fx, ft) = (f.clone(), f.clone(), f.clone());
    let image = HalfPlaneProfile::from_fns(
        move |x, y| y.sqrt() * fe.eval(x, y.sqrt()),
        move |x, y| y.sqrt() * fx.dx(x, y.sqrt()),
        move |x, y| {
            let t = y.sqrt();
            0.5 * (ft.eval(x, t) / t + ft.dt(x, t))
        },
        f.tail_x,
        (f.tail_t / 2.0 - 0.5).max(0.1),
        0.5,
    );

    let fa = f.clone();
    let norm_f = integrate_plane_radial3(
        move |x, r| fa.eval(x, r).abs().powi(4),
        &AxisHint::tail(4.0 * f.tail_x),
        &AxisHint::tail(4.0 * f.tail_t),
        tol,
    )?
    .value
    .powf(0.25);
    let im = image.clone();
    let norm_im = PI.powf(0.25)
        * integrate_halfplane(
            move |x, y| im.eval(x, y).abs().powi(4) / (y * y),
            &AxisHint::tail(4.0 * f.tail_x),
            &AxisHint::tail(2.0 * f.tail_t),
            tol,
        )?
        .value
        .powf(0.25);

    let fd = f.clone();
    let form_f = integrate_plane_radial3(
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
    let im = image.clone();
    let form_im = 4.0
        * PI
        * integrate_halfplane(
            move |x, y| {
                let gx = im.dx(x, y);
                let gy = im.dy(x, y) - 0.5 * im.eval(x, y) / y;
                gx * gx + gy * gy
            },
            &AxisHint::tail(f.grad_tail_x),
            &AxisHint::tail(f.grad_tail_t / 2.0),
            tol,
        )?
        .value;

    let report = ReductionReport::new(
        "grushin3d-to-halfplane",
        rel_gap(norm_f, norm_im),
        rel_gap(form_f, form_im),
        (tol * 20.0).max(1e-6),
    );
    Ok((image, report))
}

// ---------------------------------------------------------------------------
// radial transforms
// ---------------------------------------------------------------------------

/// G(u) = (1+u)^alpha F(u) with the chained derivative. Any real alpha.
pub fn peel_power(f: &RadialProfile, alpha: f64) -> RadialProfile {
    let (e1, e2, d) = (f.clone(), f.clone(), f.clone());
    let mut out = RadialProfile::from_fns(
        move |u| (1.0 + u).powf(alpha) * e1.eval(u),
        move |u| {
            (1.0 + u).powf(alpha) * d.deriv(u)
                + alpha * (1.0 + u).powf(alpha - 1.0) * e2.eval(u)
        },
        f.tail_exponent - alpha,
    );
    out.support = f.support;
    out
}

/// Residual between the radial combination
/// Int (u+u^2) F'^2 + s(s-1) Int F^2 and its peeled form at alpha = s:
/// Int u (1+u)^(1-2s) G'^2 + s^2 Int G^2 (1+u)^(-1-2s), G = (1+u)^s F.
pub fn peel_residual(f: &RadialProfile, s: f64, tol: f64) -> Result<f64> {
    let g = peel_power(f, s);
    let params = SpectralParams::new(s)?;
    let radial = line_quotient(f, &instances::eq17_radial(params), tol)?;
    let peeled = line_quotient(&g, &instances::peeled(params), tol)?;
    Ok(rel_gap(radial.rhs, peeled.rhs).max(rel_gap(radial.lhs, peeled.lhs)))
}

/// H(u) = G(1/u) with the chain-rule derivative. The value at u = 0 is the
/// limit of G at infinity, supplied by the decay metadata.
pub fn invert_variable(g: &RadialProfile) -> RadialProfile {
    let limit = g.limit_at_infinity;
    let g0 = g.eval(0.0);
    let (ge, gd) = (g.clone(), g.clone());
    let mut out = RadialProfile::from_fns(
        move |u| {
            if u == 0.0 {
                return limit;
            }
            let v = 1.0 / u;
            if v.is_finite() {
                ge.eval(v)
            } else {
                limit
            }
        },
        move |u| {
            if u == 0.0 {
                return 0.0;
            }
            let v = 1.0 / u;
            if !v.is_finite() {
                return 0.0;
            }
            // sequential divisions: u^2 may underflow where d/u does not
            -gd.deriv(v) / u / u
        },
        1.0,
    );
    out.limit_at_infinity = g0;
    out.support = g.support.and_then(|(lo, hi)| {
        if lo > 0.0 {
            Some((1.0 / hi, 1.0 / lo))
        } else {
            None
        }
    });
    out
}

/// Residual of the inverted-variable identity: the peeled sixth-power
/// instance evaluated on G equals the inverted instance on H = G(1/u).
pub fn inversion_chain_residual(g: &RadialProfile, tol: f64) -> Result<f64> {
    let params = SpectralParams::new(0.25)?;
    let h = invert_variable(g);
    let before = line_quotient(g, &instances::peeled(params), tol)?;
    let after = line_quotient(&h, &instances::eq5(), tol)?;
    Ok(rel_gap(before.lhs, after.lhs).max(rel_gap(before.rhs, after.rhs)))
}

// ---------------------------------------------------------------------------
// the w-map and its beta generalization
// ---------------------------------------------------------------------------

/// w(u) = u + sqrt(u(1+u)), the substitution taking the inverted sixth-power
/// form to its stereographic shape.
pub fn w_map(u: f64) -> f64 {
    u + (u * (1.0 + u)).sqrt()
}

/// Inverse of [`w_map`]: u = w^2 / (1 + 2w).
pub fn w_map_inverse(w: f64) -> f64 {
    w * w / (1.0 + 2.0 * w)
}

/// Transform H(u) into G(w) = H(u(w)) with the chained derivative.
pub fn w_map_transform(h: &RadialProfile) -> RadialProfile {
    let (he, hd) = (h.clone(), h.clone());
    let mut out = RadialProfile::from_fns(
        move |w| he.eval(w_map_inverse(w)),
        move |w| {
            let u = w_map_inverse(w);
            let du = 2.0 * w * (1.0 + w) / ((1.0 + 2.0 * w) * (1.0 + 2.0 * w));
            hd.deriv(u) * du
        },
        h.tail_exponent,
    );
    out.limit_at_infinity = h.limit_at_infinity;
    out.support = h.support.map(|(lo, hi)| (w_map(lo), w_map(hi)));
    out
}

/// Quadrature residual of the measure identity
/// (1+w)^(-2) dw = (1/2) u^(-1/2) (1+u)^(-3/2) du over [0,1] -> [0, w(1)].
pub fn w_map_measure_residual(tol: f64) -> Result<f64> {
    let w1 = w_map(1.0);
    let lhs = integrate_unit_aware(|t, _, _| w1 * (1.0 + w1 * t).powi(-2), (0.0, 0.0), tol)?;
    let rhs = integrate_unit_aware(
        |t, da, _| 0.5 / (da.sqrt() * (1.0 + t).powf(1.5)),
        (-0.5, 0.0),
        tol,
    )?;
    Ok(rel_gap(lhs.value, rhs.value))
}

/// Residual between the inverted sixth-power instance on H and the
/// stereographic instance on its w-map image: both sides of each instance
/// agree up to the exact factor 2^(1/3).
pub fn w_map_chain_residual(h: &RadialProfile, tol: f64) -> Result<f64> {
    let g = w_map_transform(h);
    let five = line_quotient(h, &instances::eq5(), tol)?;
    let six = line_quotient(&g, &instances::eq6(), tol)?;
    let k = 2f64.powf(1.0 / 3.0);
    Ok(rel_gap(five.lhs, k * six.lhs).max(rel_gap(five.rhs, k * six.rhs)))
}

/// The beta-map w/(1+w) = (u/(1+u))^beta, computed through log1p/expm1 so
/// the ratio stays accurate for large u.
pub fn beta_w_map(u: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::NonpositiveExponent(beta));
    }
    if !(u >= 0.0) {
        return Err(Error::ArgumentOutOfRange(format!(
            "beta map needs u >= 0, got {u}"
        )));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    // 1 - rho = -expm1(-beta log1p(1/u)), rho = (u/(1+u))^beta
    let comp = -(-beta * (1.0 / u).ln_1p()).exp_m1();
    Ok((1.0 - comp) / comp)
}

/// Inverse of the beta-map.
pub fn beta_w_map_inverse(w: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::NonpositiveExponent(beta));
    }
    if w == 0.0 {
        return Ok(0.0);
    }
    let comp = -(-(1.0 / w).ln_1p() / beta).exp_m1();
    Ok((1.0 - comp) / comp)
}

/// Transform H(u) to G(w) = H(u(w)) under the beta-map, derivative chained
/// through the measure relation in an overflow-free factorization.
pub fn beta_w_transform(h: &RadialProfile, beta: f64) -> Result<RadialProfile> {
    if !(beta > 0.0) {
        return Err(Error::NonpositiveExponent(beta));
    }
    let (he, hd) = (h.clone(), h.clone());
    let b = beta;
    let limit = h.limit_at_infinity;
    let mut out = RadialProfile::from_fns(
        move |w| {
            let u = beta_w_map_inverse(w, b).unwrap_or(f64::INFINITY);
            if u.is_finite() {
                he.eval(u)
            } else {
                limit
            }
        },
        move |w| {
            if w == 0.0 {
                return 0.0;
            }
            let u = match beta_w_map_inverse(w, b) {
                Ok(u) if u.is_finite() => u,
                _ => return 0.0,
            };
            // du/dw = u(1+u)(1 + 1/u)^beta / (beta (1+w)^2), grouped so each
            // factor stays in range
            let f1 = hd.deriv(u) * u;
            let f2 = (1.0 + u) / (1.0 + w);
            let f3 = (1.0 + 1.0 / u).powf(b) / (b * (1.0 + w));
            f1 * f2 * f3
        },
        h.tail_exponent,
    );
    out.limit_at_infinity = h.limit_at_infinity;
    out.support = match h.support {
        Some((lo, hi)) => Some((beta_w_map(lo, beta)?, beta_w_map(hi, beta)?)),
        None => None,
    };
    Ok(out)
}

/// Quadrature residual of the beta measure identity
/// (1+w)^(-2) dw = beta (1+u)^(-beta-1) u^(beta-1) du over u in [a, b].
pub fn beta_measure_residual(beta: f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let wa = beta_w_map(a, beta)?;
    let wb = beta_w_map(b, beta)?;
    let lhs = integrate_unit_aware(
        move |t, _, _| {
            let w = wa + (wb - wa) * t;
            (wb - wa) * (1.0 + w).powi(-2)
        },
        (0.0, 0.0),
        tol,
    )?;
    let rhs = integrate_unit_aware(
        move |t, _, _| {
            let u = a + (b - a) * t;
            (b - a) * beta * (1.0 + u).powf(-beta - 1.0) * u.powf(beta - 1.0)
        },
        (0.0, 0.0),
        tol,
    )?;
    Ok(rel_gap(lhs.value, rhs.value))
}

/// Gradient kernel of the beta-map image form,
/// w^(2 - 1/beta) [(1+w)^(1/beta) - w^(1/beta)], computed stably.
pub fn beta_grad_kernel(w: f64, beta: f64) -> f64 {
    let r = 1.0 / beta;
    if w == 0.0 {
        return 0.0;
    }
    if w > 1.0 {
        // w^2 expm1(r log1p(1/w))
        w * w * (r * (1.0 / w).ln_1p()).exp_m1()
    } else {
        w.powf(2.0 - r) * ((1.0 + w).powf(r) - w.powf(r))
    }
}

/// Residual of the gradient-kernel identity under the beta-map:
/// Int u^beta (1+u)^(1-beta) H'^2 du
/// = beta Int w^(2-1/beta) [(1+w)^(1/beta) - w^(1/beta)] G'^2 dw.
pub fn beta_grad_kernel_residual(h: &RadialProfile, beta: f64, tol: f64) -> Result<f64> {
    let g = beta_w_transform(h, beta)?;
    let hd = h.clone();
    let lhs = integrate_halfline_with_splits(
        move |u| {
            let s = hd.deriv(u) * u.powf(0.5 * beta) * (1.0 + u).powf(0.5 * (1.0 - beta));
            s * s
        },
        DecayHint::tail(2.0 * (h.tail_exponent + 1.0) - 1.0)
            .with_algebraic_zero((beta - 0.95).min(0.0).max(-0.95)),
        &[],
        tol,
    )?;
    let gd = g.clone();
    let rhs = integrate_halfline_with_splits(
        move |w| {
            let d = gd.deriv(w);
            beta * beta_grad_kernel(w, beta) * d * d
        },
        DecayHint::tail(2.0 * (g.tail_exponent + 1.0) - 1.0).with_algebraic_zero(-0.5),
        &[],
        tol,
    )?;
    Ok(rel_gap(lhs.value, rhs.value))
}

/// Bernoulli gap 4[(1+w)^r - 1] - 4 r w, nonnegative for r >= 1: the
/// pointwise comparison that lets the sphere form dominate the beta-map
/// image form.
pub fn bernoulli_weight_gap(r: f64, w: f64) -> f64 {
    4.0 * (r * w.ln_1p()).exp_m1() - 4.0 * r * w
}

// ---------------------------------------------------------------------------
// stereographic matching
// ---------------------------------------------------------------------------

/// Polar angle theta = arccos((1-w)/(1+w)), computed as
/// 2 asin(sqrt(w/(1+w))) for accuracy near w = 0.
pub fn stereographic_theta(w: f64) -> f64 {
    2.0 * (w / (1.0 + w)).sqrt().asin()
}

/// Inverse: w = tan^2(theta/2).
pub fn stereographic_w(theta: f64) -> f64 {
    let t = (0.5 * theta).tan();
    t * t
}

/// Residual of the radial-derivative matching
/// Int w G'(w)^2 dw = (1/2) Int (dG/dtheta)^2 sin(theta) dtheta.
pub fn stereographic_matching_residual(g: &RadialProfile, tol: f64) -> Result<f64> {
    let gd = g.clone();
    let lhs = integrate_halfline_with_splits(
        move |w| {
            let s = gd.deriv(w) * w.sqrt();
            s * s
        },
        DecayHint::tail(2.0 * (g.tail_exponent + 1.0) - 1.0),
        &[],
        tol,
    )?;
    let gd = g.clone();
    let rhs = integrate_unit_aware(
        move |t, _da, db| {
            // theta = pi t; sin(theta) = sin(pi db) stays accurate near pi
            let theta = PI * t;
            let w = stereographic_w(theta);
            if !w.is_finite() {
                return 0.0;
            }
            let half = 0.5 * theta;
            let sec2 = 1.0 / (half.cos() * half.cos());
            let dw_dtheta = half.tan() * sec2;
            let dgdtheta = gd.deriv(w) * dw_dtheta;
            let sin_theta = (PI * db).sin();
            0.5 * dgdtheta * dgdtheta * sin_theta * PI
        },
        (0.0, -0.5),
        tol,
    )?;
    Ok(rel_gap(lhs.value, rhs.value))
}

// ---------------------------------------------------------------------------
// cylindrical reduction of the R^3 Sobolev inequality
// ---------------------------------------------------------------------------

/// Outcome of the cylindrical reduction: the half-plane image, the two
/// quotients, and the identity residuals.
#[derive(Clone, Debug)]
pub struct CylindricalReduction {
    pub image: HalfPlaneProfile,
    pub report: ReductionReport,
    pub r3_quotient: QuotientReport,
    pub halfplane_quotient: QuotientReport,
}

/// g(t, y) = y^(1/2) f(sqrt(t^2 + y^2)) for f radial on R^3 (n = 3, p = 6).
/// Verifies the norm identity ||f||_6 = (2 pi)^(1/6) ||g||_L6(M), the form
/// identity Int |grad f|^2 = 2 pi W_{1/2}(g), and reports both Sobolev
/// quotients against their constants.
pub fn rn_cylindrical_reduction(f: &RadialProfile, tol: f64) -> Result<CylindricalReduction> {
    let (fe, f1, f2) = (f.clone(), f.clone(), f.clone());
    let image = HalfPlaneProfile::from_fns(
        move |t, y| y.sqrt() * fe.eval((t * t + y * y).sqrt()),
        move |t, y| {
            let rho = (t * t + y * y).sqrt();
            y.sqrt() * f1.deriv(rho) * t / rho
        },
        move |t, y| {
            let rho = (t * t + y * y).sqrt();
            0.5 * f2.eval(rho) / y.sqrt() + y.sqrt() * f2.deriv(rho) * y / rho
        },
        f.tail_exponent - 0.5,
        f.tail_exponent - 0.5,
        0.5,
    );

    // R^3 radial integrals (independent one-dimensional route)
    let fa = f.clone();
    let sixth = integrate_halfline_with_splits(
        move |r| r * r * fa.eval(r).abs().powi(6),
        DecayHint::tail(6.0 * f.tail_exponent - 2.0),
        &[],
        tol,
    )?
    .value;
    let fa = f.clone();
    let grad3 = integrate_halfline_with_splits(
        move |r| {
            let d = r * fa.deriv(r);
            d * d
        },
        DecayHint::tail(2.0 * f.tail_exponent),
        &[],
        tol,
    )?
    .value;
    let norm_f6 = (4.0 * PI * sixth).powf(1.0 / 6.0);
    let dirichlet3 = 4.0 * PI * grad3;
    let q3 = norm_f6 * norm_f6 / dirichlet3;
    let r3_quotient = QuotientReport {
        lhs: norm_f6 * norm_f6,
        dirichlet: dirichlet3,
        l2_term: 0.0,
        rhs: dirichlet3,
        quotient: q3,
        reference_constant: r3_sobolev_quotient_constant(),
        slack: r3_sobolev_quotient_constant() - q3,
    };

    // half-plane side: 2D quadratures through the image profile
    let im = image.clone();
    let norm_g6 = integrate_halfplane(
        move |t, y| im.eval(t, y).abs().powi(6) / (y * y),
        &AxisHint::tail(6.0 * f.tail_exponent - 3.0),
        &AxisHint::tail(6.0 * f.tail_exponent - 4.0),
        tol,
    )?
    .value
    .powf(1.0 / 6.0);
    let im = image.clone();
    let form_g = integrate_halfplane(
        move |t, y| {
            let gt = im.dx(t, y);
            let gy = im.dy(t, y) - 0.5 * im.eval(t, y) / y;
            gt * gt + gy * gy
        },
        &AxisHint::tail(2.0 * f.tail_exponent + 1.0),
        &AxisHint::tail(2.0 * f.tail_exponent),
        tol,
    )?
    .value;

    let hp_q = norm_g6 * norm_g6 / form_g;
    let halfplane_q = QuotientReport {
        lhs: norm_g6 * norm_g6,
        dirichlet: form_g,
        l2_term: 0.0,
        rhs: form_g,
        quotient: hp_q,
        reference_constant: b6_constant(),
        slack: b6_constant() - hp_q,
    };

    let report = ReductionReport::new(
        "r3-cylindrical",
        rel_gap(norm_f6, (2.0 * PI).powf(1.0 / 6.0) * norm_g6),
        rel_gap(dirichlet3, 2.0 * PI * form_g),
        (tol * 20.0).max(1e-6),
    );
    Ok(CylindricalReduction {
        image,
        report,
        r3_quotient,
        halfplane_quotient: halfplane_q,
    })
}

/// General-profile quotient on the half-plane with the spectral-limit
/// combination, exposed for chain tests: ||g||_p^2 / W_alpha(g).
pub fn halfplane_sobolev_quotient(
    g: &HalfPlaneProfile,
    p: f64,
    alpha: f64,
    constant: f64,
    tol: f64,
) -> Result<QuotientReport> {
    halfplane_quotient(g, p, alpha, constant, tol)
}

// ---------------------------------------------------------------------------
// Plancherel power identity on the line
// ---------------------------------------------------------------------------

/// Grid parameters for the Fourier-side check.
#[derive(Clone, Debug)]
pub struct FourierGrid {
    /// Half-width L of the periodization interval [-L, L).
    pub half_width: f64,
    /// Sample spacing; 1/(2h) bounds the usable frequencies.
    pub spacing: f64,
    /// Frequencies kept: |xi| <= xi_max.
    pub xi_max: f64,
    /// Decay tail of |f|^6 for the continuum side (f64::INFINITY when
    /// super-algebraic).
    pub sixth_power_tail: f64,
}

impl FourierGrid {
    /// Suitable for unit-scale Gaussians: boundary values below 1e-12.
    pub fn gaussian() -> Self {
        FourierGrid {
            half_width: 10.0,
            spacing: 1.0 / 16.0,
            xi_max: 2.5,
            sixth_power_tail: f64::INFINITY,
        }
    }

    /// Suitable for unit-scale algebraic tails like (1+x^2)^(-1); the width
    /// is capped and the explicit periodization supplies the tail mass.
    pub fn algebraic() -> Self {
        FourierGrid {
            half_width: 600.0,
            spacing: 1.0 / 12.0,
            xi_max: 5.0,
            sixth_power_tail: 12.0,
        }
    }
}

/// Check Int |f|^6 dx = Int |f~ * f~ * f~|^2 dxi on a periodized uniform
/// grid: the left side by continuum quadrature, the right side by direct
/// DFT and two linear convolutions.
pub fn plancherel_power_check(
    f: impl Fn(f64) -> f64,
    grid: &FourierGrid,
    tol: f64,
) -> Result<CheckReport> {
    let l = grid.half_width;
    let h = grid.spacing;
    let n = (2.0 * l / h).round() as usize;

    // periodized samples
    let mut samples = vec![0.0f64; n];
    for (j, s) in samples.iter_mut().enumerate() {
        let x = -l + j as f64 * h;
        let mut total = f(x);
        let mut k = 1.0;
        loop {
            let add = f(x + 2.0 * l * k) + f(x - 2.0 * l * k);
            total += add;
            if add.abs() <= 1e-16 * total.abs().max(1e-300) || k > 4096.0 {
                break;
            }
            k += 1.0;
        }
        *s = total;
    }

    // Fourier samples c_k = h sum f_per(x_j) e^{2 pi i xi_k x_j}, xi_k = k/(2L)
    let m = (grid.xi_max * 2.0 * l).ceil() as i64;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); (2 * m + 1) as usize];
    for k in -m..=m {
        let xi = k as f64 / (2.0 * l);
        let step = Complex64::from_polar(1.0, 2.0 * PI * xi * h);
        let mut z = Complex64::from_polar(1.0, 2.0 * PI * xi * (-l));
        let mut acc = Complex64::new(0.0, 0.0);
        for &s in &samples {
            acc += s * z;
            z *= step;
        }
        coeffs[(k + m) as usize] = h * acc;
    }

    // two linear convolutions with the Delta-xi measure factor
    let dxi = 1.0 / (2.0 * l);
    let conv = |a: &[Complex64], b: &[Complex64]| -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai.norm_sqr() < 1e-64 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] += ai * bj;
            }
        }
        for v in &mut out {
            *v *= dxi;
        }
        out
    };
    let c2 = conv(&coeffs, &coeffs);
    let c3 = conv(&c2, &coeffs);
    let rhs: f64 = c3.iter().map(|z| z.norm_sqr()).sum::<f64>() * dxi;

    // continuum left side by an independent quadrature route
    let lhs = integrate_real_line(
        |x| f(x).abs().powi(6),
        grid.sixth_power_tail,
        grid.sixth_power_tail,
        &[0.0],
        tol.min(1e-10),
    )?
    .value;

    let residual = rel_gap(lhs, rhs);
    if residual > tol {
        return Err(Error::GridTooCoarse {
            residual,
            tolerance: tol,
        });
    }
    Ok(CheckReport {
        name: "plancherel-power".into(),
        value: rhs,
        bound: lhs,
        slack: lhs - rhs,
        pass: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{grushin_quotient_2d, grushin_quotient_3d};
    use crate::quadrature::DEFAULT_TOL_2D;
    use approx::assert_relative_eq;

    const TOL: f64 = 1e-10;

    #[test]
    fn grushin2d_reduction_extremal() {
        let f = GrushinProfile::extremal(GrushinDim::Plane, 0.25).unwrap();
        let (image, report) = grushin2d_to_hyperbolic(&f, DEFAULT_TOL_2D).unwrap();
        assert!(report.pass, "residuals {report:?}");
        assert!(report.norm_identity_residual < 1e-6);
        // image value: F(x,y) = y^(1/4) [(1+y)^2 + x^2]^(-1/4)
        let v = image.eval(1.0, 2.0);
        let expect = 2f64.powf(0.25) * ((1.0 + 2.0f64).powi(2) + 1.0).powf(-0.25);
        assert_relative_eq!(v, expect, max_relative = 1e-13);
    }

    #[test]
    fn grushin2d_reduction_gaussian_and_zero() {
        let f = GrushinProfile::gaussian(GrushinDim::Plane, 1.0, 1.0).unwrap();
        let (_, report) = grushin2d_to_hyperbolic(&f, DEFAULT_TOL_2D).unwrap();
        assert!(report.norm_identity_residual < 1e-6);
        assert!(report.form_identity_residual < 1e-6);

        let z = f.scale(0.0);
        let (_, report) = grushin2d_to_hyperbolic(&z, DEFAULT_TOL_2D).unwrap();
        assert_eq!(report.norm_identity_residual, 0.0);
    }

    #[test]
    fn grushin3d_reduction_extremal_and_gaussian() {
        let f = GrushinProfile::extremal(GrushinDim::Space, 0.5).unwrap();
        let (_, report) = grushin3d_to_hyperbolic(&f, DEFAULT_TOL_2D).unwrap();
        assert!(report.norm_identity_residual < 1e-4);
        assert!(report.form_identity_residual < 1e-4);

        let f = GrushinProfile::gaussian(GrushinDim::Space, 1.0, 1.0).unwrap();
        let (_, report) = grushin3d_to_hyperbolic(&f, DEFAULT_TOL_2D).unwrap();
        assert!(report.norm_identity_residual < 1e-6);
        assert!(report.form_identity_residual < 1e-6);
    }

    #[test]
    fn thm1_chain_consistency() {
        // Grushin quotient equals a quarter of the half-plane quotient of
        // the image, across distinct even-in-t profiles
        let profiles = vec![
            GrushinProfile::extremal(GrushinDim::Plane, 0.25).unwrap(),
            GrushinProfile::gaussian(GrushinDim::Plane, 1.0, 1.0).unwrap(),
            GrushinProfile::gaussian(GrushinDim::Plane, 0.5, 2.0).unwrap(),
        ];
        for f in &profiles {
            let q_g = grushin_quotient_2d(f, DEFAULT_TOL_2D).unwrap().quotient;
            let (image, _) = grushin2d_to_hyperbolic(f, DEFAULT_TOL_2D).unwrap();
            let q_m = halfplane_sobolev_quotient(
                &image,
                6.0,
                0.25,
                4.0 * PI.powf(-2.0 / 3.0),
                DEFAULT_TOL_2D,
            )
            .unwrap()
            .quotient;
            assert!(
                (4.0 * q_g - q_m).abs() / q_m < 1e-5,
                "chain residual {:.2e}",
                (4.0 * q_g - q_m).abs() / q_m
            );
        }
    }

    #[test]
    fn thm3_chain_consistency() {
        let profiles = vec![
            GrushinProfile::extremal(GrushinDim::Space, 0.5).unwrap(),
            GrushinProfile::gaussian(GrushinDim::Space, 1.0, 1.0).unwrap(),
            GrushinProfile::gaussian(GrushinDim::Space, 2.0, 0.7).unwrap(),
        ];
        for f in &profiles {
            let q_g = grushin_quotient_3d(f, DEFAULT_TOL_2D).unwrap().quotient;
            let (image, _) = grushin3d_to_hyperbolic(f, DEFAULT_TOL_2D).unwrap();
            let q_m =
                halfplane_sobolev_quotient(&image, 4.0, 0.5, 2.0 / PI.sqrt(), DEFAULT_TOL_2D)
                    .unwrap()
                    .quotient;
            // ||f||_4^2 = sqrt(pi) ||F||_4^2 and Form = 4 pi W give the
            // exact conversion 4 sqrt(pi)
            assert!(
                (4.0 * PI.sqrt() * q_g - q_m).abs() / q_m < 1e-5,
                "chain residual {:.2e}",
                (4.0 * PI.sqrt() * q_g - q_m).abs() / q_m
            );
        }
    }

    #[test]
    fn peel_examples() {
        let f = RadialProfile::power_law(0.25).unwrap();
        let g = peel_power(&f, 0.25);
        for u in [0.0, 0.7, 3.0, 50.0] {
            assert_relative_eq!(g.eval(u), 1.0, max_relative = 1e-14);
        }

        let f = RadialProfile::power_law(1.0).unwrap();
        let g = peel_power(&f, 0.25);
        for u in [0.0, 1.0, 9.0] {
            assert_relative_eq!(g.eval(u), (1.0 + u).powf(-0.75), max_relative = 1e-14);
            assert_relative_eq!(
                g.deriv(u),
                -0.75 * (1.0 + u).powf(-1.75),
                max_relative = 1e-13
            );
        }

        // round trip
        let back = peel_power(&g, -0.25);
        for u in [0.5, 2.0, 11.0] {
            assert_relative_eq!(back.eval(u), f.eval(u), max_relative = 1e-12);
            assert_relative_eq!(back.deriv(u), f.deriv(u), max_relative = 1e-12);
        }
    }

    #[test]
    fn peel_identity_residuals() {
        for (s, alpha) in [(0.25, 1.0), (0.5, 0.75), (1.0, 1.5)] {
            let f = RadialProfile::power_law(alpha).unwrap();
            let r = peel_residual(&f, s, TOL).unwrap();
            assert!(r < 1e-8, "peel residual {r:.2e} at s={s}, alpha={alpha}");
        }
        let bump = RadialProfile::bump(1.5, 1.0).unwrap();
        assert!(peel_residual(&bump, 0.25, TOL).unwrap() < 1e-8);
    }

    #[test]
    fn invert_examples() {
        let g = RadialProfile::power_law(1.0).unwrap();
        let h = invert_variable(&g);
        for u in [0.25, 0.5, 2.0, 8.0] {
            assert_relative_eq!(h.eval(u), u / (1.0 + u), max_relative = 1e-13);
        }
        assert_eq!(h.eval(0.0), 0.0);

        // involution
        let hh = invert_variable(&h);
        for u in [0.5, 2.0] {
            assert_relative_eq!(hh.eval(u), g.eval(u), max_relative = 1e-13);
        }
    }

    #[test]
    fn inversion_chain() {
        let g = RadialProfile::power_law(0.75).unwrap();
        let r = inversion_chain_residual(&g, TOL).unwrap();
        assert!(r < 1e-8, "inversion chain residual {r:.2e}");
    }

    #[test]
    fn w_map_points_and_identity() {
        assert_eq!(w_map(0.0), 0.0);
        let u = 3.0;
        let w = w_map(u);
        assert_relative_eq!((u / (1.0 + u)).sqrt(), w / (1.0 + w), max_relative = 1e-14);
        assert_relative_eq!(
            (u / (1.0 + u)).sqrt(),
            3f64.sqrt() / 2.0,
            max_relative = 1e-14
        );
        for u in [0.1, 1.0, 7.3, 120.0] {
            assert_relative_eq!(w_map_inverse(w_map(u)), u, max_relative = 1e-12);
        }
    }

    #[test]
    fn w_map_measure_identity() {
        let r = w_map_measure_residual(1e-12).unwrap();
        assert!(r < 1e-10, "measure residual {r:.2e}");
    }

    #[test]
    fn chain_radial_to_stereographic() {
        // full chain on three profiles: radial -> peeled -> inverted -> w-map
        let params = SpectralParams::new(0.25).unwrap();
        let profiles = vec![
            RadialProfile::power_law(1.0).unwrap(),
            RadialProfile::power_law(0.75).unwrap(),
            RadialProfile::bump(1.0, 0.8).unwrap(),
        ];
        for f in &profiles {
            let radial = line_quotient(f, &instances::eq2_radial(), TOL).unwrap();
            let g = peel_power(f, 0.25);
            let peeled = line_quotient(&g, &instances::peeled(params), TOL).unwrap();
            assert!(rel_gap(radial.lhs, peeled.lhs) < 1e-6);
            assert!(rel_gap(radial.rhs, peeled.rhs) < 1e-6);

            let h = invert_variable(&g);
            let five = line_quotient(&h, &instances::eq5(), TOL).unwrap();
            assert!(rel_gap(peeled.lhs, five.lhs) < 1e-6);
            assert!(rel_gap(peeled.rhs, five.rhs) < 1e-6);

            let r = w_map_chain_residual(&h, TOL).unwrap();
            assert!(r < 1e-6, "w-map chain residual {r:.2e}");
        }
    }

    #[test]
    fn beta_map_points() {
        for u in [0.0, 1.0, 10.0] {
            assert_relative_eq!(
                beta_w_map(u, 1.0).unwrap(),
                u,
                max_relative = 1e-13,
                epsilon = 1e-15
            );
        }
        // beta = 2, u = 1: rho = 1/4, w = 1/3
        assert_relative_eq!(
            beta_w_map(1.0, 2.0).unwrap(),
            1.0 / 3.0,
            max_relative = 1e-13
        );
        for u in [0.3, 2.0, 40.0] {
            for beta in [0.25, 0.5, 1.0, 2.0] {
                let w = beta_w_map(u, beta).unwrap();
                assert_relative_eq!(
                    beta_w_map_inverse(w, beta).unwrap(),
                    u,
                    max_relative = 1e-11
                );
            }
        }
        assert!(beta_w_map(1.0, 0.0).is_err());
        assert!(beta_w_map(-1.0, 1.0).is_err());
    }

    #[test]
    fn beta_measure_identity() {
        for beta in [0.5, 1.0, 2.0, 4.0] {
            let r = beta_measure_residual(beta, 1.0, 2.0, 1e-12).unwrap();
            assert!(r < 1e-10, "beta measure residual {r:.2e} at beta={beta}");
        }
    }

    #[test]
    fn beta_grad_kernel_identity() {
        let h = RadialProfile::power_law(1.5).unwrap();
        for beta in [0.5, 1.0, 2.0] {
            let r = beta_grad_kernel_residual(&h, beta, TOL).unwrap();
            assert!(r < 1e-7, "kernel residual {r:.2e} at beta={beta}");
        }
    }

    #[test]
    fn bernoulli_gap_nonnegative() {
        for &r in &[1.0, 2.0, 4.0] {
            assert_eq!(bernoulli_weight_gap(r, 0.0), 0.0);
            let mut w = 1e-6;
            while w <= 1e4 {
                let gap = bernoulli_weight_gap(r, w);
                assert!(gap >= -1e-12 * (1.0 + w), "gap {gap:.2e} at r={r}, w={w}");
                w *= 1.9;
            }
        }
        // and the integral comparison it implies, on sampled profiles
        for beta in [1.0, 0.5, 0.25] {
            let g = RadialProfile::power_law(1.2).unwrap();
            let strong = line_quotient(&g, &instances::eq20(beta), TOL).unwrap();
            let weak = line_quotient(&g, &instances::eq19(beta), TOL).unwrap();
            assert!(
                weak.rhs >= strong.rhs - 1e-9 * strong.rhs.abs(),
                "beta = {beta}: {} vs {}",
                weak.rhs,
                strong.rhs
            );
        }
    }

    #[test]
    fn stereographic_points() {
        assert_eq!(stereographic_theta(0.0), 0.0);
        assert_relative_eq!(stereographic_theta(1.0), PI / 2.0, max_relative = 1e-14);
        for w in [0.2, 1.0, 5.0, 100.0] {
            assert_relative_eq!(
                stereographic_w(stereographic_theta(w)),
                w,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn stereographic_matching() {
        let g = RadialProfile::power_law(0.5).unwrap();
        let r = stereographic_matching_residual(&g, 1e-11).unwrap();
        assert!(r < 1e-8, "matching residual {r:.2e}");
    }

    #[test]
    fn cylindrical_reduction_aubin_talenti() {
        // f = (1 + r^2)^(-1/2): the sharp R^3 profile
        let f = RadialProfile::from_fns(
            |r| (1.0 + r * r).powf(-0.5),
            |r| -r * (1.0 + r * r).powf(-1.5),
            1.0,
        );
        let red = rn_cylindrical_reduction(&f, DEFAULT_TOL_2D).unwrap();
        assert!(red.report.pass, "{:?}", red.report);
        assert_relative_eq!(
            red.r3_quotient.quotient,
            r3_sobolev_quotient_constant(),
            max_relative = 1e-6
        );
        assert_relative_eq!(
            red.halfplane_quotient.quotient,
            b6_constant(),
            max_relative = 1e-4
        );
    }

    #[test]
    fn cylindrical_reduction_gaussian_strict() {
        let f = RadialProfile::from_fns(
            |r| (-r * r).exp(),
            |r| -2.0 * r * (-r * r).exp(),
            f64::INFINITY,
        );
        let red = rn_cylindrical_reduction(&f, DEFAULT_TOL_2D).unwrap();
        assert!(red.report.pass);
        assert!(red.r3_quotient.quotient < r3_sobolev_quotient_constant());
        assert!(red.halfplane_quotient.quotient < b6_constant());
    }

    #[test]
    fn plancherel_gaussian() {
        let r =
            plancherel_power_check(|x| (-x * x).exp(), &FourierGrid::gaussian(), 1e-6).unwrap();
        assert!(r.pass);
        let residual = rel_gap(r.value, r.bound);
        assert!(residual < 1e-6, "gaussian residual {residual:.2e}");
    }

    #[test]
    fn plancherel_zero() {
        let r = plancherel_power_check(|_| 0.0, &FourierGrid::gaussian(), 1e-6).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.bound, 0.0);
    }

    #[test]
    fn plancherel_lorentzian_loose() {
        let r = plancherel_power_check(|x| 1.0 / (1.0 + x * x), &FourierGrid::algebraic(), 1e-4)
            .unwrap();
        assert!(r.pass);
    }

    #[test]
    fn plancherel_too_coarse_is_an_error() {
        let grid = FourierGrid {
            half_width: 3.0,
            spacing: 0.5,
            xi_max: 1.0,
            sixth_power_tail: 12.0,
        };
        let out = plancherel_power_check(|x| 1.0 / (1.0 + x * x), &grid, 1e-6);
        assert!(matches!(out, Err(Error::GridTooCoarse { .. })));
    }
}
