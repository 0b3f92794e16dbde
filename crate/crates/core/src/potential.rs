//! The operator L_s = -y^2 Laplacian + s(s-1), its fundamental solution as
//! a tabulated kernel, the fractional integral I_s as a half-plane
//! convolution, the inversion identity L_s(I_s G) = G, the Young-inequality
//! bound, and the sharp HLS quotient.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::functionals::{lp_norm_radial, CheckReport, QuotientReport, SpectralParams};
use crate::interp::MonotoneCubic;
use crate::profiles::{radial_second_derivative, RadialProfile};
use crate::quadrature::{
    integrate_halfplane, integrate_unit_aware, AxisHint, Singularity,
};
use crate::reductions::w_map;
use crate::specialfn::{hyp2f1_diag, psi_integral, psi_tail_coefficient};

/// Euler-Lagrange data: B (1+u)^(-s) solves the radial equation with
/// c = s^2 B^(-1/s).
#[derive(Clone, Copy, Debug)]
pub struct OperatorParams {
    pub s: f64,
    pub b: f64,
    pub c: f64,
}

impl OperatorParams {
    pub fn euler_lagrange(s: f64, b: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::NonpositiveArgument(s));
        }
        if !(b > 0.0) {
            return Err(Error::NonpositiveArgument(b));
        }
        Ok(OperatorParams {
            s,
            b,
            c: s * s * b.powf(-1.0 / s),
        })
    }
}

/// Radial action of L_s: -(d/du)[u(1+u) F'] + s(s-1) F
/// = -(1+2u) F' - u(1+u) F'' + s(s-1) F.
pub fn apply_ls_radial(f: &RadialProfile, s: f64, u: f64) -> f64 {
    let d1 = f.deriv(u);
    let d2 = radial_second_derivative(f, u);
    -(1.0 + 2.0 * u) * d1 - u * (1.0 + u) * d2 + s * (s - 1.0) * f.eval(u)
}

// ---------------------------------------------------------------------------
// kernel table
// ---------------------------------------------------------------------------

/// Tabulated fundamental solution psi_s over sixteen decades of u, cubic
/// Hermite in (log u, log psi) with analytic slopes, plus the asymptotic
/// branches outside the table.
pub struct PsiKernel {
    pub s: f64,
    table: MonotoneCubic,
    u_lo: f64,
    u_hi: f64,
    /// psi(u_lo) for the logarithmic continuation below the table.
    psi_lo: f64,
    tail_coeff: f64,
}

impl PsiKernel {
    pub fn build(s: f64) -> Result<Self> {
        if !(s >= 0.5) {
            return Err(Error::ArgumentOutOfRange(format!(
                "kernel table needs s >= 1/2, got {s}"
            )));
        }
        let (u_lo, u_hi) = (1e-8f64, 1e8f64);
        let n = 1600usize;
        let step = (u_hi / u_lo).ln() / (n - 1) as f64;
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        let mut ds = Vec::with_capacity(n);
        for i in 0..n {
            let lu = u_lo.ln() + i as f64 * step;
            let u = lu.exp();
            let psi = psi_integral(u, s, 1e-12)?.value;
            // d psi/du by its own integral representation
            let e = s - 1.0;
            let scale = 0.25f64.powf(e) * (0.5 + u).powf(-s - 1.0);
            let dpsi = -s / (4.0 * PI)
                * scale
                * integrate_unit_aware(
                    move |_t, da, db| (da * db).powf(e) * (da + u).powf(-s - 1.0) / scale,
                    (e, e),
                    1e-12,
                )?
                .value;
            xs.push(lu);
            ys.push(psi.ln());
            // d log psi / d log u
            ds.push(u * dpsi / psi);
        }
        let psi_lo = ys[0].exp();
        Ok(PsiKernel {
            s,
            table: MonotoneCubic::with_slopes(xs, ys, ds),
            u_lo,
            u_hi,
            psi_lo,
            tail_coeff: psi_tail_coefficient(s)?,
        })
    }

    pub fn eval(&self, u: f64) -> f64 {
        if u < self.u_lo {
            // psi ~ -(1/4pi) log u + const near zero; the log singularity is
            // integrable, so a node landing exactly on it is capped at the
            // smallest representable separation
            let u = u.max(1e-320);
            return self.psi_lo + (self.u_lo / u).ln() / (4.0 * PI);
        }
        if u > self.u_hi {
            if !u.is_finite() {
                return 0.0;
            }
            let x = 1.0 / (1.0 + u);
            let series = hyp2f1_diag(self.s, x).unwrap_or(1.0);
            return self.tail_coeff * (1.0 + u).powf(-self.s) * series;
        }
        self.table.eval(u.ln()).exp()
    }
}

// ---------------------------------------------------------------------------
// fractional integral
// ---------------------------------------------------------------------------

/// Point on the imaginary axis at squared distance u0 from the origin:
/// y0 = 1 + 2 w(u0) with w the half-plane stereographic variable.
pub fn axis_point_at(u0: f64) -> (f64, f64) {
    (0.0, 1.0 + 2.0 * w_map(u0))
}

/// (I_s G)(z) = Int_M psi_s(d^2(z, w)) G(d^2(w, i)) dnu(w), evaluated at an
/// arbitrary base point z = (zx, zy) by half-plane quadrature with splits at
/// the kernel's logarithmic singularity.
pub fn fractional_integral_at(
    kernel: &PsiKernel,
    g: &RadialProfile,
    zx: f64,
    zy: f64,
    tol: f64,
) -> Result<f64> {
    let s = kernel.s;
    let g_tail = if g.limit_at_infinity != 0.0 {
        0.0
    } else {
        g.tail_exponent
    };
    let q = SpectralParams::new(if s > 0.5 { s } else { 0.51 })?.q;
    if !(g_tail * q > 1.0) && g.support.is_none() {
        return Err(Error::NonConvergence {
            context: format!("fractional integral needs G in L^q (tail {g_tail}, q {q:.3})"),
            estimate: f64::INFINITY,
            threshold: tol,
            evaluations: 0,
        });
    }

    let sigma_x = 2.0 * s + (2.0 * g_tail).min(12.0);
    let hint_x = AxisHint::tail(sigma_x).with_splits(&[0.0, zx]);
    let zero_y = (s + g_tail - 2.0).min(0.0).max(-0.9);
    let sigma_y = s + g_tail + 1.0;
    let hint_y = AxisHint::tail(sigma_y)
        .with_splits(&[1.0, zy])
        .with_zero_singularity(Singularity::Algebraic(zero_y));

    let ge = g.clone();
    let psi = |u: f64| kernel.eval(u);
    let r = integrate_halfplane(
        move |x, y| {
            let dx = x - zx;
            let dy = y - zy;
            let d2 = (dx * dx + dy * dy) / (4.0 * y * zy);
            let ux = x * x + (y - 1.0) * (y - 1.0);
            let uw = ux / (4.0 * y);
            let gv = ge.eval(uw);
            if gv == 0.0 {
                return 0.0;
            }
            let num = psi(d2) * gv;
            if num == 0.0 {
                0.0
            } else {
                num / y / y
            }
        },
        &hint_x,
        &hint_y,
        tol,
    )?;
    Ok(r.value)
}

/// Radial evaluation of I_s G at squared distance u0 from the origin.
pub fn fractional_integral(
    kernel: &PsiKernel,
    g: &RadialProfile,
    u0: f64,
    tol: f64,
) -> Result<f64> {
    let (zx, zy) = axis_point_at(u0);
    fractional_integral_at(kernel, g, zx, zy, tol)
}

/// Tabulate I_s G on a grid uniform in u/(1+u) and wrap it as a radial
/// profile with the algebraic tail u^(-s).
pub fn tabulate_fractional_integral(
    kernel: &PsiKernel,
    g: &RadialProfile,
    points: usize,
    v_max: f64,
    tol: f64,
) -> Result<RadialProfile> {
    let mut us = Vec::with_capacity(points);
    let mut vals = Vec::with_capacity(points);
    for i in 0..points {
        let v = v_max * i as f64 / (points - 1) as f64;
        let u = v / (1.0 - v);
        us.push(u);
        vals.push(fractional_integral(kernel, g, u, tol)?);
    }
    Ok(RadialProfile::from_table(us, vals, kernel.s))
}

/// Max normalized residual of L_s(I_s G) = G over the grid, with I_s G
/// tabulated locally and differentiated by five-point stencils.
pub fn inversion_residual(
    kernel: &PsiKernel,
    g: &RadialProfile,
    grid: &[f64],
    tol: f64,
) -> Result<f64> {
    let s = kernel.s;
    let mut worst: f64 = 0.0;
    for &u in grid {
        let h = 0.05 * (1.0 + u);
        let mut f = [0.0; 5];
        for (k, fk) in f.iter_mut().enumerate() {
            let uk = u + (k as f64 - 2.0) * h;
            *fk = fractional_integral(kernel, g, uk.max(1e-9), tol)?;
        }
        let d1 = (-f[4] + 8.0 * f[3] - 8.0 * f[1] + f[0]) / (12.0 * h);
        let d2 = (-f[4] + 16.0 * f[3] - 30.0 * f[2] + 16.0 * f[1] - f[0]) / (12.0 * h * h);
        let ls = -(1.0 + 2.0 * u) * d1 - u * (1.0 + u) * d2 + s * (s - 1.0) * f[2];
        let res = (ls - g.eval(u)).abs() / (1.0 + g.eval(u).abs());
        worst = worst.max(res);
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Young bound and the sharp HLS quotient
// ---------------------------------------------------------------------------

/// The weighted kernel norm || y^(1/p) psi_s ||_{L^{p/2}(M)} together with
/// the one-dimensional integrability witness Int y^(s-1)(1+y)^(-2s) dy.
pub struct YoungBound {
    pub report: CheckReport,
    pub kernel_norm: f64,
    pub kernel_witness: f64,
}

/// Young's inequality bound ||G * psi_s||_p <= ||G||_q ||y^(1/p) psi_s||_{p/2}.
pub fn young_bound_check(
    kernel: &PsiKernel,
    g: &RadialProfile,
    tol: f64,
) -> Result<YoungBound> {
    let s = kernel.s;
    let params = SpectralParams::new(s)?;
    let (p, q) = (params.p, params.q);

    // kernel norm: Int y^(1/2) psi^(p/2)(u(x,y)) y^(-2) dx dy, both factors
    // radializing around the origin i
    let psi = |u: f64| kernel.eval(u);
    let hint_x = AxisHint::tail(2.0 * s + 1.0).with_splits(&[0.0]);
    let hint_y = AxisHint::tail(s + 2.0)
        .with_splits(&[1.0])
        .with_zero_singularity(Singularity::Algebraic((s - 1.0).min(0.0).max(-0.9)));
    let kernel_int = integrate_halfplane(
        move |x, y| {
            let u = (x * x + (y - 1.0) * (y - 1.0)) / (4.0 * y);
            let v = psi(u).powf(0.5 * p);
            if v == 0.0 {
                0.0
            } else {
                v * y.sqrt() / y / y
            }
        },
        &hint_x,
        &hint_y,
        tol,
    )?
    .value;
    let kernel_norm = kernel_int.powf(2.0 / p);

    // the one-dimensional integrability witness behind the finiteness claim
    let witness = crate::quadrature::integrate_halfline_with_splits(
        move |y| y.powf(s - 1.0) * (1.0 + y).powf(-2.0 * s),
        crate::quadrature::DecayHint::tail(s + 1.0)
            .with_algebraic_zero((s - 1.0).min(0.0).max(-0.9)),
        &[],
        tol,
    )?
    .value;

    let tab = tabulate_fractional_integral(kernel, g, 41, 0.995, tol.max(1e-5))?;
    let lhs = lp_norm_radial(&tab, p, tol.max(1e-7))?;
    let gq = lp_norm_radial(g, q, tol.max(1e-9))?;
    let rhs = gq * kernel_norm;

    let slack = rhs - lhs;
    Ok(YoungBound {
        report: CheckReport {
            name: "young-bound".into(),
            value: lhs,
            bound: rhs,
            slack,
            pass: lhs <= rhs * (1.0 + 1e-6) + 1e-12,
        },
        kernel_norm,
        kernel_witness: witness,
    })
}

/// The sharp HLS quotient ||I_s G||_p / ||G||_q against A_p.
pub fn hls_quotient(kernel: &PsiKernel, g: &RadialProfile, tol: f64) -> Result<QuotientReport> {
    let params = SpectralParams::new(kernel.s)?;
    let tab = tabulate_fractional_integral(kernel, g, 41, 0.995, tol)?;
    let lhs_norm = lp_norm_radial(&tab, params.p, (tol * 0.1).max(1e-8))?;
    let g_norm = lp_norm_radial(g, params.q, (tol * 0.01).max(1e-10))?;
    let quotient = lhs_norm / g_norm;
    Ok(QuotientReport {
        lhs: lhs_norm,
        dirichlet: 0.0,
        l2_term: g_norm,
        rhs: g_norm,
        quotient,
        reference_constant: params.a_p,
        slack: params.a_p - quotient,
    })
}

/// Residual between the dual quadratic form Int F (L_s F) dnu and the
/// Dirichlet + s(s-1) mass combination, evaluated at F = (1+u)^(-s).
pub fn duality_residual(s: f64, tol: f64) -> Result<f64> {
    let params = SpectralParams::new(s)?;
    let f = RadialProfile::power_law(s)?;
    // Int F (L_s F) dnu with the measure factor 4 pi
    let fe = f.clone();
    let form = crate::quadrature::integrate_halfline_with_splits(
        move |u| fe.eval(u) * apply_ls_radial(&fe, s, u),
        crate::quadrature::DecayHint::tail(2.0 * s + 1.0),
        &[],
        tol,
    )?
    .value
        * 4.0
        * PI;
    let quotient = crate::functionals::hyperbolic_quotient(&f, params, tol)?;
    Ok((form - quotient.rhs).abs() / quotient.rhs.abs())
}

/// Numeric positivity of the quadratic form Int F (L_s F) dnu for s >= 1.
pub fn ls_form_value(f: &RadialProfile, s: f64, tol: f64) -> Result<f64> {
    let fe = f.clone();
    let splits: Vec<f64> = match f.support {
        Some((lo, hi)) => [lo, hi].iter().copied().filter(|&v| v > 0.0).collect(),
        None => Vec::new(),
    };
    Ok(crate::quadrature::integrate_halfline_with_splits(
        move |u| fe.eval(u) * apply_ls_radial(&fe, s, u),
        crate::quadrature::DecayHint::tail(2.0 * (f.tail_exponent + 1.0) - 2.0),
        &splits,
        tol,
    )?
    .value
        * 4.0
        * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::sync::OnceLock;

    fn kernel_s1() -> &'static PsiKernel {
        static K: OnceLock<PsiKernel> = OnceLock::new();
        K.get_or_init(|| PsiKernel::build(1.0).unwrap())
    }

    fn kernel_s2() -> &'static PsiKernel {
        static K: OnceLock<PsiKernel> = OnceLock::new();
        K.get_or_init(|| PsiKernel::build(2.0).unwrap())
    }

    #[test]
    fn ls_on_power_law() {
        // L_s (1+u)^(-s) = s^2 (1+u)^(-s-1)
        let f = RadialProfile::power_law(2.0).unwrap();
        let v = apply_ls_radial(&f, 2.0, 1.0);
        assert_relative_eq!(v, 4.0 / 8.0, max_relative = 1e-12);

        let c = RadialProfile::constant(3.0);
        let v = apply_ls_radial(&c, 2.0, 0.7);
        assert_relative_eq!(v, 2.0 * 3.0, max_relative = 1e-13);

        let f = RadialProfile::power_law(1.0).unwrap();
        let v = apply_ls_radial(&f, 1.0, 0.0);
        assert_relative_eq!(v, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn kernel_table_matches_direct_values() {
        let k = kernel_s1();
        for u in [1e-6, 1e-3, 0.1, 1.0, 10.0, 1e3, 1e6] {
            let exact = crate::specialfn::psi_s1_closed_form(u);
            assert_relative_eq!(k.eval(u), exact, max_relative = 1e-7);
        }
        // outside the table
        let exact = crate::specialfn::psi_s1_closed_form(1e10);
        assert_relative_eq!(k.eval(1e10), exact, max_relative = 1e-9);
        let exact = crate::specialfn::psi_s1_closed_form(1e-10);
        assert_relative_eq!(k.eval(1e-10), exact, max_relative = 1e-6);
    }

    #[test]
    fn fractional_integral_of_narrow_bump() {
        // unit-mass narrow bump at the origin: I_s G is close to psi_s
        let k = kernel_s1();
        let bump = RadialProfile::bump(0.05, 0.05).unwrap();
        let be = bump.clone();
        let mass = crate::quadrature::integrate_halfline_with_splits(
            move |u| be.eval(u),
            crate::quadrature::DecayHint::tail(f64::INFINITY),
            &[0.0, 0.1],
            1e-12,
        )
        .unwrap()
        .value
            * 4.0
            * PI;
        let g = bump.scale(1.0 / mass);
        let v = fractional_integral(k, &g, 1.0, 1e-6).unwrap();
        let psi1 = crate::specialfn::psi_s1_closed_form(1.0);
        assert!(
            (v - psi1).abs() / psi1 < 0.02,
            "delta approximation off: {v} vs {psi1}"
        );
    }

    #[test]
    fn fractional_integral_radiality() {
        let k = kernel_s1();
        let g = RadialProfile::power_law(2.0).unwrap();
        let u0 = 1.5;
        let on_axis = fractional_integral(k, &g, u0, 1e-6).unwrap();
        // another point at the same distance: x = 2 sqrt(u0), y = 1
        let off_axis =
            fractional_integral_at(k, &g, 2.0 * u0.sqrt(), 1.0, 1e-6).unwrap();
        assert!(
            (on_axis - off_axis).abs() / on_axis < 1e-5,
            "radiality violated: {on_axis} vs {off_axis}"
        );
    }

    #[test]
    fn fractional_integral_of_zero() {
        let k = kernel_s1();
        let z = RadialProfile::bump(1.0, 0.5).unwrap().scale(0.0);
        let v = fractional_integral(k, &z, 1.0, 1e-7).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn fractional_integral_closed_form_family() {
        // I_s[(1+u)^(-1-s)] = s^(-2) (1+u)^(-s) from the Euler-Lagrange
        // identity; spot-check at s = 1
        let k = kernel_s1();
        let g = RadialProfile::power_law(2.0).unwrap();
        for u0 in [0.0, 0.5, 2.0] {
            let v = fractional_integral(k, &g, u0, 1e-6).unwrap();
            let expect = (1.0 + u0).powi(-1);
            assert!(
                (v - expect).abs() / expect < 1e-4,
                "u0={u0}: {v} vs {expect}"
            );
        }
    }

    #[test]
    fn monotone_decrease_preserved() {
        let k = kernel_s1();
        let g = RadialProfile::power_law(3.0).unwrap();
        let tab = tabulate_fractional_integral(k, &g, 21, 0.97, 1e-5).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..30 {
            let u = 0.05 * (i as f64) * (1.0 + 0.3 * i as f64);
            let v = tab.eval(u);
            assert!(v <= prev * (1.0 + 1e-9), "not decreasing at u={u}");
            prev = v;
        }
    }

    #[test]
    fn inversion_identity_smoke() {
        let k = kernel_s1();
        let g = RadialProfile::power_law(3.0).unwrap();
        let r = inversion_residual(k, &g, &[0.5, 1.0, 2.0], 1e-6).unwrap();
        assert!(r < 1e-3, "inversion residual {r:.2e}");
    }

    #[test]
    fn young_bound_on_power_law() {
        let k = kernel_s1();
        let g = RadialProfile::power_law(2.0).unwrap();
        let out = young_bound_check(k, &g, 1e-5).unwrap();
        assert!(out.report.pass, "{:?}", out.report);
        // witness at s = 1: Int (1+y)^(-2) dy = 1
        assert_relative_eq!(out.kernel_witness, 1.0, max_relative = 1e-9);
        assert!(out.kernel_norm.is_finite() && out.kernel_norm > 0.0);

        let z = g.scale(0.0);
        let out = young_bound_check(k, &z, 1e-5).unwrap();
        assert!(out.report.pass);
        assert_eq!(out.report.value, 0.0);
    }

    #[test]
    fn hls_quotient_extremal_s1() {
        let k = kernel_s1();
        let params = SpectralParams::new(1.0).unwrap();
        let g = RadialProfile::power_law(2.0).unwrap();
        let r = hls_quotient(k, &g, 1e-5).unwrap();
        assert!(
            (r.quotient - params.a_p).abs() / params.a_p < 1e-3,
            "quotient {} vs A_p {}",
            r.quotient,
            params.a_p
        );
    }

    #[test]
    fn hls_quotient_bump_strict() {
        let k = kernel_s1();
        let params = SpectralParams::new(1.0).unwrap();
        let g = RadialProfile::bump(0.5, 0.4).unwrap();
        let r = hls_quotient(k, &g, 1e-4).unwrap();
        assert!(r.quotient < params.a_p);
    }

    #[test]
    fn duality_matches_quadratic_form() {
        let r = duality_residual(2.0, 1e-10).unwrap();
        assert!(r < 1e-6, "duality residual {r:.2e}");
        // closed form: both sides are 2 pi s at the extremal
        let params = SpectralParams::new(2.0).unwrap();
        let f = RadialProfile::power_law(2.0).unwrap();
        let q = crate::functionals::hyperbolic_quotient(&f, params, 1e-10).unwrap();
        assert_relative_eq!(q.rhs, 4.0 * PI, max_relative = 1e-9);
    }

    #[test]
    fn ls_form_positive_on_bumps() {
        for (c, w) in [(1.0, 0.5), (2.0, 1.0), (0.7, 0.3)] {
            let f = RadialProfile::bump(c, w).unwrap();
            let v = ls_form_value(&f, 1.0, 1e-9).unwrap();
            assert!(v >= 0.0, "form value {v} negative");
            let v2 = ls_form_value(&f, 2.0, 1e-9).unwrap();
            assert!(v2 >= 0.0);
        }
    }

    #[test]
    fn inversion_identity_s2() {
        let k = kernel_s2();
        let g = RadialProfile::power_law(3.0).unwrap();
        let r = inversion_residual(k, &g, &[1.0], 1e-6).unwrap();
        assert!(r < 1e-3, "s=2 inversion residual {r:.2e}");
    }
}
