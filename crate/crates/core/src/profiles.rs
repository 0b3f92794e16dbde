//! Closed-form function families used as test inputs and extremal
//! candidates. Every profile carries analytic derivatives and decay
//! metadata so the functionals can assemble quadrature hints without
//! numerical differentiation near singular weights.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::quadrature::{differentiate, second_derivative};

type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

// ---------------------------------------------------------------------------
// radial profiles F(u), u = squared distance to the origin
// ---------------------------------------------------------------------------

/// A radial function of u >= 0 with analytic first (and optionally second)
/// derivative. `tail_exponent` describes |F - limit| ~ u^(-tail) at infinity.
#[derive(Clone)]
pub struct RadialProfile {
    eval: Fn1,
    deriv: Fn1,
    deriv2: Option<Fn1>,
    pub tail_exponent: f64,
    pub limit_at_infinity: f64,
    pub support: Option<(f64, f64)>,
}

impl RadialProfile {
    pub fn from_fns(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        tail_exponent: f64,
    ) -> Self {
        RadialProfile {
            eval: Arc::new(eval),
            deriv: Arc::new(deriv),
            deriv2: None,
            tail_exponent,
            limit_at_infinity: 0.0,
            support: None,
        }
    }

    pub fn with_second_derivative(
        mut self,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.deriv2 = Some(Arc::new(d2));
        self
    }

    pub fn with_limit(mut self, limit: f64) -> Self {
        self.limit_at_infinity = limit;
        self
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = Some((lo, hi));
        self
    }

    /// (1+u)^(-alpha), the workhorse family: extremals, epsilon scans.
    pub fn power_law(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::NonpositiveExponent(alpha));
        }
        Ok(RadialProfile::from_fns(
            move |u| (1.0 + u).powf(-alpha),
            move |u| -alpha * (1.0 + u).powf(-alpha - 1.0),
            alpha,
        )
        .with_second_derivative(move |u| alpha * (alpha + 1.0) * (1.0 + u).powf(-alpha - 2.0)))
    }

    /// Smooth compactly supported bump centered at `center`, value 1 there,
    /// identically zero outside [center - width, center + width].
    pub fn bump(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::NonpositiveWidth(width));
        }
        let (c, w) = (center, width);
        let val = move |u: f64| {
            let xi = (u - c) / w;
            if xi.abs() >= 1.0 {
                0.0
            } else {
                (1.0 - 1.0 / (1.0 - xi * xi)).exp()
            }
        };
        let der = move |u: f64| {
            let xi = (u - c) / w;
            if xi.abs() >= 1.0 {
                0.0
            } else {
                let q = 1.0 - xi * xi;
                (1.0 - 1.0 / q).exp() * (-2.0 * xi / (q * q)) / w
            }
        };
        let der2 = move |u: f64| {
            let xi = (u - c) / w;
            if xi.abs() >= 1.0 {
                0.0
            } else {
                let q = 1.0 - xi * xi;
                let b = (1.0 - 1.0 / q).exp();
                let g = -2.0 * xi / (q * q);
                b * (g * g + (-2.0 / (q * q) - 8.0 * xi * xi / (q * q * q))) / (w * w)
            }
        };
        Ok(RadialProfile::from_fns(val, der, f64::INFINITY)
            .with_second_derivative(der2)
            .with_support(c - w, c + w))
    }

    pub fn constant(c: f64) -> Self {
        RadialProfile::from_fns(move |_| c, |_| 0.0, f64::INFINITY)
            .with_second_derivative(|_| 0.0)
            .with_limit(c)
    }

    /// Interpolated profile from tabulated values on an increasing u-grid,
    /// with an algebraic tail C u^(-sigma) matched at the last node.
    pub fn from_table(us: Vec<f64>, values: Vec<f64>, tail_exponent: f64) -> Self {
        let u_max = *us.last().unwrap();
        let v_last = *values.last().unwrap();
        let tail_coeff = v_last * u_max.powf(tail_exponent);
        let interp = Arc::new(MonotoneCubic::new(us, values));
        let interp2 = interp.clone();
        RadialProfile {
            eval: Arc::new(move |u| {
                if u <= u_max {
                    interp.eval(u)
                } else {
                    tail_coeff * u.powf(-tail_exponent)
                }
            }),
            deriv: Arc::new(move |u| {
                if u <= u_max {
                    interp2.deriv(u)
                } else {
                    -tail_exponent * tail_coeff * u.powf(-tail_exponent - 1.0)
                }
            }),
            deriv2: None,
            tail_exponent,
            limit_at_infinity: 0.0,
            support: None,
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        (self.eval)(u)
    }

    pub fn deriv(&self, u: f64) -> f64 {
        (self.deriv)(u)
    }

    pub fn deriv2(&self, u: f64) -> f64 {
        match &self.deriv2 {
            Some(d2) => d2(u),
            None => {
                let d = self.deriv.clone();
                differentiate(move |v| d(v), u)
            }
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        let (e, d) = (self.eval.clone(), self.deriv.clone());
        let d2 = self.deriv2.clone();
        RadialProfile {
            eval: Arc::new(move |u| c * e(u)),
            deriv: Arc::new(move |u| c * d(u)),
            deriv2: d2.map(|f| -> Fn1 { Arc::new(move |u| c * f(u)) }),
            tail_exponent: self.tail_exponent,
            limit_at_infinity: c * self.limit_at_infinity,
            support: self.support,
        }
    }

    pub fn add(&self, other: &RadialProfile) -> Self {
        let (e1, d1) = (self.eval.clone(), self.deriv.clone());
        let (e2, d2) = (other.eval.clone(), other.deriv.clone());
        let dd = match (self.deriv2.clone(), other.deriv2.clone()) {
            (Some(a), Some(b)) => Some(Arc::new(move |u: f64| a(u) + b(u)) as Fn1),
            _ => None,
        };
        let support = match (self.support, other.support) {
            (Some((a, b)), Some((c, d))) => Some((a.min(c), b.max(d))),
            _ => None,
        };
        RadialProfile {
            eval: Arc::new(move |u| e1(u) + e2(u)),
            deriv: Arc::new(move |u| d1(u) + d2(u)),
            deriv2: dd,
            tail_exponent: self.tail_exponent.min(other.tail_exponent),
            limit_at_infinity: self.limit_at_infinity + other.limit_at_infinity,
            support,
        }
    }

    /// Max relative mismatch between the stored derivative and a numerical
    /// one over the given points.
    pub fn derivative_consistency(&self, points: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for &u in points {
            let e = self.eval.clone();
            let numeric = differentiate(move |v| e(v), u);
            let analytic = self.deriv(u);
            let denom = analytic.abs().max(1e-12);
            worst = worst.max((numeric - analytic).abs() / denom);
        }
        worst
    }
}

// ---------------------------------------------------------------------------
// Grushin profiles f(x, t)
// ---------------------------------------------------------------------------

/// Which Grushin geometry a profile lives on: the plane (x, t) in R^2, or
/// R^3 with t interpreted as the radius of the two transverse coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrushinDim {
    Plane,
    Space,
}

/// A function f(x, t) with analytic partial derivatives and per-axis decay
/// exponents; `grad_tail_*` describe the decay of the Grushin Dirichlet
/// integrand f_t^2 + 4 t^2 f_x^2 along each axis.
#[derive(Clone)]
pub struct GrushinProfile {
    pub dim: GrushinDim,
    eval: Fn2,
    dx: Fn2,
    dt: Fn2,
    pub tail_x: f64,
    pub tail_t: f64,
    pub grad_tail_x: f64,
    pub grad_tail_t: f64,
}

impl GrushinProfile {
    /// The extremal family [(1 + t^2)^2 + x^2]^(-gamma).
    pub fn extremal(dim: GrushinDim, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::NonpositiveExponent(gamma));
        }
        let g = gamma;
        let d = |x: f64, t: f64| {
            let a = 1.0 + t * t;
            a * a + x * x
        };
        Ok(GrushinProfile {
            dim,
            eval: Arc::new(move |x, t| d(x, t).powf(-g)),
            dx: Arc::new(move |x, t| -2.0 * g * x * d(x, t).powf(-g - 1.0)),
            dt: Arc::new(move |x, t| {
                -4.0 * g * t * (1.0 + t * t) * d(x, t).powf(-g - 1.0)
            }),
            tail_x: 2.0 * gamma,
            tail_t: 4.0 * gamma,
            grad_tail_x: 4.0 * gamma + 2.0,
            grad_tail_t: 8.0 * gamma + 2.0,
        })
    }

    /// exp(-a x^2 - b t^2); even in t, so admissible on both geometries.
    pub fn gaussian(dim: GrushinDim, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !(b > 0.0) {
            return Err(Error::NonpositiveExponent(a.min(b)));
        }
        let f = move |x: f64, t: f64| (-a * x * x - b * t * t).exp();
        Ok(GrushinProfile {
            dim,
            eval: Arc::new(f),
            dx: Arc::new(move |x, t| -2.0 * a * x * f(x, t)),
            dt: Arc::new(move |x, t| -2.0 * b * t * f(x, t)),
            tail_x: f64::INFINITY,
            tail_t: f64::INFINITY,
            grad_tail_x: f64::INFINITY,
            grad_tail_t: f64::INFINITY,
        })
    }

    /// Anisotropic rescale f(lambda^2 x, lambda t) that leaves the Grushin
    /// quotient invariant.
    pub fn rescale(&self, lambda: f64) -> Self {
        let l = lambda;
        let (e, dx, dt) = (self.eval.clone(), self.dx.clone(), self.dt.clone());
        GrushinProfile {
            dim: self.dim,
            eval: Arc::new(move |x, t| e(l * l * x, l * t)),
            dx: Arc::new(move |x, t| l * l * dx(l * l * x, l * t)),
            dt: Arc::new(move |x, t| l * dt(l * l * x, l * t)),
            tail_x: self.tail_x,
            tail_t: self.tail_t,
            grad_tail_x: self.grad_tail_x,
            grad_tail_t: self.grad_tail_t,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        let (e, dx, dt) = (self.eval.clone(), self.dx.clone(), self.dt.clone());
        GrushinProfile {
            dim: self.dim,
            eval: Arc::new(move |x, t| c * e(x, t)),
            dx: Arc::new(move |x, t| c * dx(x, t)),
            dt: Arc::new(move |x, t| c * dt(x, t)),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &GrushinProfile) -> Self {
        assert_eq!(self.dim, other.dim);
        let (e1, dx1, dt1) = (self.eval.clone(), self.dx.clone(), self.dt.clone());
        let (e2, dx2, dt2) = (other.eval.clone(), other.dx.clone(), other.dt.clone());
        GrushinProfile {
            dim: self.dim,
            eval: Arc::new(move |x, t| e1(x, t) + e2(x, t)),
            dx: Arc::new(move |x, t| dx1(x, t) + dx2(x, t)),
            dt: Arc::new(move |x, t| dt1(x, t) + dt2(x, t)),
            tail_x: self.tail_x.min(other.tail_x),
            tail_t: self.tail_t.min(other.tail_t),
            grad_tail_x: self.grad_tail_x.min(other.grad_tail_x),
            grad_tail_t: self.grad_tail_t.min(other.grad_tail_t),
        }
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        (self.eval)(x, t)
    }

    pub fn dx(&self, x: f64, t: f64) -> f64 {
        (self.dx)(x, t)
    }

    pub fn dt(&self, x: f64, t: f64) -> f64 {
        (self.dt)(x, t)
    }

    /// Max relative mismatch of both partials against central differences.
    pub fn partial_consistency(&self, points: &[(f64, f64)]) -> f64 {
        let mut worst: f64 = 0.0;
        for &(x, t) in points {
            let e = self.eval.clone();
            let nx = differentiate(move |v| e(v, t), x);
            let e = self.eval.clone();
            let nt = differentiate(move |v| e(x, v), t);
            for (num, ana) in [(nx, self.dx(x, t)), (nt, self.dt(x, t))] {
                let denom = ana.abs().max(1e-9);
                worst = worst.max((num - ana).abs() / denom);
            }
        }
        worst
    }
}

// ---------------------------------------------------------------------------
// half-plane profiles F(x, y), y > 0
// ---------------------------------------------------------------------------

/// A function on the upper half-plane with analytic partials. Carries the
/// decay data the half-plane quadratures need: algebraic tails in x and y
/// and the power behavior F ~ y^(y0_exponent) as y -> 0.
#[derive(Clone)]
pub struct HalfPlaneProfile {
    eval: Fn2,
    dx: Fn2,
    dy: Fn2,
    pub tail_x: f64,
    pub tail_y: f64,
    pub y0_exponent: f64,
    pub support: Option<((f64, f64), (f64, f64))>,
}

impl HalfPlaneProfile {
    pub fn from_fns(
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        dx: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        dy: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        tail_x: f64,
        tail_y: f64,
        y0_exponent: f64,
    ) -> Self {
        HalfPlaneProfile {
            eval: Arc::new(eval),
            dx: Arc::new(dx),
            dy: Arc::new(dy),
            tail_x,
            tail_y,
            y0_exponent,
            support: None,
        }
    }

    /// Product bump supported on [x0-wx, x0+wx] x [y0-wy, y0+wy]; the
    /// support must stay inside the open half-plane.
    pub fn bump(x0: f64, y0: f64, wx: f64, wy: f64) -> Result<Self> {
        if !(wx > 0.0) || !(wy > 0.0) {
            return Err(Error::NonpositiveWidth(wx.min(wy)));
        }
        if y0 - wy <= 0.0 {
            return Err(Error::ArgumentOutOfRange(format!(
                "bump support [{}, {}] leaves the open half-plane",
                y0 - wy,
                y0 + wy
            )));
        }
        let b = move |xi: f64| {
            if xi.abs() >= 1.0 {
                0.0
            } else {
                (1.0 - 1.0 / (1.0 - xi * xi)).exp()
            }
        };
        let db = move |xi: f64| {
            if xi.abs() >= 1.0 {
                0.0
            } else {
                let q = 1.0 - xi * xi;
                (1.0 - 1.0 / q).exp() * (-2.0 * xi / (q * q))
            }
        };
        let mut p = HalfPlaneProfile::from_fns(
            move |x, y| b((x - x0) / wx) * b((y - y0) / wy),
            move |x, y| db((x - x0) / wx) / wx * b((y - y0) / wy),
            move |x, y| b((x - x0) / wx) * db((y - y0) / wy) / wy,
            f64::INFINITY,
            f64::INFINITY,
            0.0,
        );
        p.support = Some(((x0 - wx, x0 + wx), (y0 - wy, y0 + wy)));
        Ok(p)
    }

    /// Lift a radial profile to the half-plane through u = d^2(z, i).
    pub fn radial_lift(f: &RadialProfile) -> Self {
        let (e, d1, d2) = (f.eval.clone(), f.deriv.clone(), f.deriv.clone());
        let u_of = |x: f64, y: f64| (x * x + (y - 1.0) * (y - 1.0)) / (4.0 * y);
        HalfPlaneProfile::from_fns(
            move |x, y| e(u_of(x, y)),
            move |x, y| d1(u_of(x, y)) * x / (2.0 * y),
            move |x, y| {
                let u = u_of(x, y);
                d2(u) * ((y - 1.0) / (2.0 * y) - u / y)
            },
            2.0 * f.tail_exponent,
            f.tail_exponent,
            f.tail_exponent,
        )
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    pub fn dx(&self, x: f64, y: f64) -> f64 {
        (self.dx)(x, y)
    }

    pub fn dy(&self, x: f64, y: f64) -> f64 {
        (self.dy)(x, y)
    }

    pub fn partial_consistency(&self, points: &[(f64, f64)]) -> f64 {
        let mut worst: f64 = 0.0;
        for &(x, y) in points {
            let e = self.eval.clone();
            let nx = differentiate(move |v| e(v, y), x);
            let e = self.eval.clone();
            let ny = differentiate(move |v| e(x, v), y);
            for (num, ana) in [(nx, self.dx(x, y)), (ny, self.dy(x, y))] {
                let denom = ana.abs().max(1e-9);
                worst = worst.max((num - ana).abs() / denom);
            }
        }
        worst
    }
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile")
            .field("tail_exponent", &self.tail_exponent)
            .field("limit_at_infinity", &self.limit_at_infinity)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

impl std::fmt::Debug for GrushinProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GrushinProfile")
            .field("dim", &self.dim)
            .field("tail_x", &self.tail_x)
            .field("tail_t", &self.tail_t)
            .finish_non_exhaustive()
    }
}

impl std::fmt::Debug for HalfPlaneProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HalfPlaneProfile")
            .field("tail_x", &self.tail_x)
            .field("tail_y", &self.tail_y)
            .field("y0_exponent", &self.y0_exponent)
            .finish_non_exhaustive()
    }
}

/// Second derivative of a radial profile via Richardson extrapolation when
/// no analytic one is stored; exposed for the operator module.
pub fn radial_second_derivative(f: &RadialProfile, u: f64) -> f64 {
    match &f.deriv2 {
        Some(d2) => d2(u),
        None => {
            let e = f.eval.clone();
            second_derivative(move |v| e(v), u)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn power_law_values() {
        let f = RadialProfile::power_law(1.0).unwrap();
        assert_relative_eq!(f.eval(1.0), 0.5, max_relative = 1e-15);
        assert_relative_eq!(f.deriv(1.0), -0.25, max_relative = 1e-15);
        assert_eq!(RadialProfile::power_law(2.5).unwrap().eval(0.0), 1.0);
        assert!(RadialProfile::power_law(0.0).is_err());
        assert!(RadialProfile::power_law(-1.0).is_err());
    }

    #[test]
    fn power_law_derivative_consistency() {
        let f = RadialProfile::power_law(0.25).unwrap();
        assert!(f.derivative_consistency(&[0.1, 1.0, 10.0]) < 1e-6);
        let f = RadialProfile::power_law(3.0).unwrap();
        assert!(f.derivative_consistency(&[0.1, 1.0, 10.0]) < 1e-6);
    }

    #[test]
    fn power_law_strictly_decreasing() {
        let f = RadialProfile::power_law(0.7).unwrap();
        let mut prev = f.eval(0.0);
        for i in 1..50 {
            let v = f.eval(i as f64 * 0.37);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn bump_shape() {
        let f = RadialProfile::bump(2.0, 0.5).unwrap();
        assert_relative_eq!(f.eval(2.0), 1.0, max_relative = 1e-15);
        assert_eq!(f.eval(2.5), 0.0);
        assert_eq!(f.eval(7.0), 0.0);
        assert_eq!(f.eval(1.4), 0.0);
        assert!(f.eval(2.2) > 0.0);
        // derivative consistency at center + width/2
        let e = f.clone();
        let num = differentiate(move |v| e.eval(v), 2.25);
        assert_relative_eq!(num, f.deriv(2.25), max_relative = 1e-6);
        assert!(RadialProfile::bump(1.0, 0.0).is_err());
    }

    #[test]
    fn bump_second_derivative_consistent() {
        let f = RadialProfile::bump(2.0, 0.7).unwrap();
        let e = f.clone();
        let num = second_derivative(move |v| e.eval(v), 2.3);
        assert_relative_eq!(num, f.deriv2(2.3), max_relative = 1e-5);
    }

    #[test]
    fn grushin_extremal_values() {
        let f = GrushinProfile::extremal(GrushinDim::Plane, 0.25).unwrap();
        assert_eq!(f.eval(0.0, 0.0), 1.0);
        assert_relative_eq!(f.eval(0.0, 1.0), 2f64.powf(-0.5), max_relative = 1e-15);

        let f = GrushinProfile::extremal(GrushinDim::Plane, 0.5).unwrap();
        assert_relative_eq!(f.dx(1.0, 0.0), -2f64.powf(-1.5), max_relative = 1e-15);
        assert!(GrushinProfile::extremal(GrushinDim::Plane, 0.0).is_err());
    }

    #[test]
    fn grushin_partials_match_finite_differences() {
        let pts = [(0.3, 0.7), (1.5, -0.4), (2.0, 1.0), (-0.8, 2.0)];
        for p in [
            GrushinProfile::extremal(GrushinDim::Plane, 0.25).unwrap(),
            GrushinProfile::extremal(GrushinDim::Space, 0.5).unwrap(),
            GrushinProfile::gaussian(GrushinDim::Plane, 1.0, 1.0).unwrap(),
            GrushinProfile::gaussian(GrushinDim::Plane, 0.5, 2.0)
                .unwrap()
                .rescale(2.0),
        ] {
            assert!(p.partial_consistency(&pts) < 1e-6);
        }
    }

    #[test]
    fn halfplane_bump_support() {
        let b = HalfPlaneProfile::bump(0.0, 2.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(b.eval(0.0, 2.0), 1.0, max_relative = 1e-15);
        assert_eq!(b.eval(0.0, 3.2), 0.0);
        assert_eq!(b.eval(1.5, 2.0), 0.0);
        assert!(HalfPlaneProfile::bump(0.0, 1.0, 1.0, 1.5).is_err());
        assert!(b.partial_consistency(&[(0.2, 2.1), (-0.4, 1.7)]) < 1e-6);
    }

    #[test]
    fn radial_lift_partials() {
        let f = RadialProfile::power_law(1.5).unwrap();
        let lift = HalfPlaneProfile::radial_lift(&f);
        assert!(lift.partial_consistency(&[(0.5, 1.5), (2.0, 0.7), (-1.0, 3.0)]) < 1e-6);
        // value at i is F(0)
        assert_relative_eq!(lift.eval(0.0, 1.0), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn table_profile_tracks_data() {
        let us: Vec<f64> = (0..150).map(|i| i as f64 * 0.1).collect();
        let vals: Vec<f64> = us.iter().map(|u| (1.0 + u).powi(-2)).collect();
        let f = RadialProfile::from_table(us, vals, 2.0);
        for u in [0.1, 1.3, 5.0, 13.7] {
            assert_relative_eq!(f.eval(u), (1.0 + u).powi(-2), max_relative = 1e-4);
        }
        // tail model continues past the grid
        assert!(f.eval(100.0) > 0.0);
        assert!(f.eval(100.0) < f.eval(14.0));
    }
}
