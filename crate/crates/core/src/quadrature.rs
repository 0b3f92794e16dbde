//! Adaptive numerical integration on [0,1], [0,inf), the real line, the
//! plane, and the half-plane, plus Richardson-extrapolated differentiation.
//!
//! The base rule is double-exponential (tanh-sinh) quadrature with level
//! doubling; a panel that fails to settle is bisected and retried. Half-line
//! integrals are compactified with u = v/(1-v) and split at u = 1 so that
//! each panel carries at most one singular endpoint. Abscissas near an
//! endpoint are generated as distances to that endpoint, which keeps
//! integrands like u^(-1/2) or log(u) accurate down to the underflow limit.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

pub const DEFAULT_TOL_1D: f64 = 1e-10;
pub const DEFAULT_TOL_2D: f64 = 1e-7;
pub const DEFAULT_BUDGET_1D: i64 = 1_000_000;
pub const DEFAULT_BUDGET_2D: i64 = 10_000_000;

const MAX_LEVEL: u32 = 11;
const MIN_LEVEL: u32 = 2;
const MAX_SPLIT_DEPTH: u32 = 7;

/// Outcome of a quadrature call.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    fn zero() -> Self {
        QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 1,
        }
    }

    fn merge(self, other: Self) -> Self {
        QuadratureResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

/// Endpoint behavior of an integrand at u = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Singularity {
    None,
    Logarithmic,
    /// Integrand ~ u^e with e > -1.
    Algebraic(f64),
}

impl Singularity {
    /// Effective algebraic exponent used to size the node window.
    fn exponent(self) -> f64 {
        match self {
            Singularity::None => 0.0,
            Singularity::Logarithmic => -0.1,
            Singularity::Algebraic(e) => e,
        }
    }
}

/// Declared behavior of a half-line integrand: algebraic decay u^(-sigma) at
/// infinity and the type of (integrable) singularity at zero.
#[derive(Clone, Copy, Debug)]
pub struct DecayHint {
    pub tail_exponent: f64,
    pub singularity_at_zero: Singularity,
}

impl DecayHint {
    pub fn tail(tail_exponent: f64) -> Self {
        DecayHint {
            tail_exponent,
            singularity_at_zero: Singularity::None,
        }
    }

    pub fn with_log_zero(mut self) -> Self {
        self.singularity_at_zero = Singularity::Logarithmic;
        self
    }

    pub fn with_algebraic_zero(mut self, exponent: f64) -> Self {
        self.singularity_at_zero = Singularity::Algebraic(exponent);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tail_exponent > 1.0) {
            return Err(Error::InvalidHint(format!(
                "tail exponent {} does not give an integrable tail (need > 1)",
                self.tail_exponent
            )));
        }
        if let Singularity::Algebraic(e) = self.singularity_at_zero {
            if !(e > -1.0) {
                return Err(Error::InvalidHint(format!(
                    "endpoint exponent {e} is not integrable (need > -1)"
                )));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// tanh-sinh nodes
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
struct Node {
    /// Distance from the nearer endpoint of the unit panel [-1, 1].
    delta: f64,
    /// Weight excluding the step factor h.
    weight: f64,
}

fn make_node(t: f64) -> Option<Node> {
    let sh = FRAC_PI_2 * t.sinh();
    // 1 - tanh(sh) computed without cancellation
    let delta = 2.0 / (1.0 + (2.0 * sh).exp());
    let ch = sh.cosh();
    if !ch.is_finite() {
        return None;
    }
    let weight = FRAC_PI_2 * t.cosh() / (ch * ch);
    if delta <= 0.0 || weight < 1e-310 || !weight.is_finite() {
        return None;
    }
    Some(Node { delta, weight })
}

/// Nodes new at `level` (t = odd multiples of 2^-level for level > 0, all
/// positive integers for level 0), for positive t only; callers mirror.
fn level_nodes(level: u32, tmax_q: u32) -> Arc<Vec<Node>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<Vec<Node>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((level, tmax_q))
        .or_insert_with(|| {
            let tmax = tmax_q as f64 * 0.5;
            let h = 0.5f64.powi(level as i32);
            let mut nodes = Vec::new();
            let mut j: u64 = 1;
            let step = if level == 0 { 1 } else { 2 };
            loop {
                let t = j as f64 * h;
                if t > tmax {
                    break;
                }
                if let Some(n) = make_node(t) {
                    nodes.push(n);
                }
                j += step;
            }
            Arc::new(nodes)
        })
        .clone()
}

fn quantize_tmax(min_exponent: f64) -> u32 {
    // Window width so that w * delta^e is below 1e-17 at the edge.
    let e = (1.0 + min_exponent).clamp(0.05, 1.0);
    let arg = 40.0 / (PI * e);
    let tmax = arg.asinh().clamp(3.6, 6.9);
    (tmax / 0.5).ceil() as u32
}

// ---------------------------------------------------------------------------
// single panel driver
// ---------------------------------------------------------------------------

/// Integrand on a finite panel. Receives (x, dist_to_a, dist_to_b); the
/// distances stay accurate when x is double-exponentially close to an end.
type PanelFn<'a> = &'a mut dyn FnMut(f64, f64, f64) -> f64;

struct PanelCfg {
    tmax_q: u32,
    /// Absolute error target for the panel.
    threshold: f64,
    /// Relative error target; acceptance is the laxer of the two.
    rel: f64,
}

fn ts_panel(
    f: PanelFn,
    a: f64,
    b: f64,
    cfg: &PanelCfg,
    budget: &mut i64,
    depth: u32,
) -> Result<QuadratureResult> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut evals = 0usize;

    let mut eval = |x: f64, da: f64, db: f64, budget: &mut i64| -> Result<f64> {
        *budget -= 1;
        if *budget < 0 {
            return Err(Error::NonConvergence {
                context: "evaluation budget exhausted".into(),
                estimate: f64::INFINITY,
                threshold: cfg.threshold,
                evaluations: evals,
            });
        }
        evals += 1;
        let v = f(x, da, db);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonConvergence {
                context: format!("integrand non-finite at x = {x:.6e}"),
                estimate: f64::INFINITY,
                threshold: cfg.threshold,
                evaluations: evals,
            })
        }
    };

    // t = 0 node
    let mut sum = FRAC_PI_2 * eval(mid, mid - a, b - mid, budget)?;
    let mut prev_value = f64::NAN;
    let mut prev_diff = f64::INFINITY;
    let mut value = sum; // h = 1 initially; updated below

    for level in 0..=MAX_LEVEL {
        let h = 0.5f64.powi(level as i32);
        let nodes = level_nodes(level, cfg.tmax_q);
        let mut new_sum = 0.0;
        let mut edge_mass = 0.0;
        let n = nodes.len();
        for (i, node) in nodes.iter().enumerate() {
            let d = node.delta * half;
            if d <= 0.0 {
                continue;
            }
            let xr = b - d;
            let xl = a + d;
            let fr = eval(xr, (b - a) - d, d, budget)?;
            let fl = eval(xl, d, (b - a) - d, budget)?;
            let contrib = node.weight * (fr + fl);
            new_sum += contrib;
            if i + 3 >= n {
                edge_mass += node.weight * (fr.abs() + fl.abs());
            }
        }
        sum += new_sum;
        value = h * sum * half;

        if level >= MIN_LEVEL {
            let diff = (value - prev_value).abs();
            let guard = h * edge_mass * half.abs();
            let floor = 8.0 * f64::EPSILON * value.abs();
            // a single small diff can be a coincidence on structure the
            // level has not resolved; require the previous diff to back it
            let est = diff.max(1e-2 * prev_diff) + 2.0 * guard + floor;
            if est <= cfg.threshold || est <= cfg.rel * value.abs() {
                return Ok(QuadratureResult {
                    value,
                    error_estimate: est.max(floor),
                    evaluations: evals,
                });
            }
            prev_diff = diff;
        }
        prev_value = value;
    }

    // Did not settle at max level: bisect unless the panel is already tiny.
    let scale = a.abs().max(b.abs()).max(1.0);
    if depth < MAX_SPLIT_DEPTH && (b - a).abs() > 1e-13 * scale {
        let sub = PanelCfg {
            tmax_q: cfg.tmax_q,
            threshold: 0.5 * cfg.threshold,
            rel: cfg.rel,
        };
        let left = ts_panel(f, a, mid, &sub, budget, depth + 1)?;
        let right = ts_panel(f, mid, b, &sub, budget, depth + 1)?;
        let mut out = left.merge(right);
        out.evaluations += evals;
        return Ok(out);
    }

    Err(Error::NonConvergence {
        context: format!("panel [{a:.6e}, {b:.6e}] did not settle"),
        estimate: (value - prev_value).abs(),
        threshold: cfg.threshold,
        evaluations: evals,
    })
}

// ---------------------------------------------------------------------------
// panel plans over standard domains
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
enum Panel {
    /// [a, b] with endpoint exponents (for node-window sizing only).
    Finite { a: f64, b: f64, ea: f64, eb: f64 },
    /// [c, inf) with integrand ~ x^(-sigma); mapped to x = c + t/(1-t).
    TailRight { c: f64, sigma: f64 },
    /// (-inf, c]; mapped to x = c - t/(1-t).
    TailLeft { c: f64, sigma: f64 },
}

fn eval_panel(
    panel: Panel,
    f: &mut dyn FnMut(f64) -> f64,
    threshold: f64,
    rel: f64,
    budget: &mut i64,
) -> Result<QuadratureResult> {
    match panel {
        Panel::Finite { a, b, ea, eb } => {
            let cfg = PanelCfg {
                tmax_q: quantize_tmax(ea.min(eb)),
                threshold,
                rel,
            };
            let mut g = |x: f64, _da: f64, _db: f64| f(x);
            ts_panel(&mut g, a, b, &cfg, budget, 0)
        }
        Panel::TailRight { c, sigma } => {
            let cfg = PanelCfg {
                tmax_q: quantize_tmax((sigma - 2.0).min(0.0)),
                threshold,
                rel,
            };
            let mut g = |_t: f64, _da: f64, db: f64| {
                // t = 1 - db; x = c + t/(1-t) with 1 - t = db exact
                let x = c + (1.0 - db) / db;
                if !x.is_finite() {
                    return 0.0;
                }
                let v = f(x);
                if v == 0.0 {
                    0.0
                } else {
                    // sequential divisions: db^2 may underflow where v/db does not
                    v / db / db
                }
            };
            ts_panel(&mut g, 0.0, 1.0, &cfg, budget, 0)
        }
        Panel::TailLeft { c, sigma } => {
            let cfg = PanelCfg {
                tmax_q: quantize_tmax((sigma - 2.0).min(0.0)),
                threshold,
                rel,
            };
            let mut g = |_t: f64, _da: f64, db: f64| {
                let x = c - (1.0 - db) / db;
                if !x.is_finite() {
                    return 0.0;
                }
                let v = f(x);
                if v == 0.0 {
                    0.0
                } else {
                    v / db / db
                }
            };
            ts_panel(&mut g, 0.0, 1.0, &cfg, budget, 0)
        }
    }
}

fn run_panels(
    panels: &[Panel],
    f: &mut dyn FnMut(f64) -> f64,
    tol: f64,
    rel: f64,
    budget: &mut i64,
) -> Result<QuadratureResult> {
    let per_panel = tol / panels.len() as f64;
    let mut total = QuadratureResult::zero();
    total.evaluations = 0;
    for &p in panels {
        total = total.merge(eval_panel(p, f, per_panel, rel, budget)?);
    }
    if total.evaluations == 0 {
        total.evaluations = 1;
    }
    Ok(total)
}

fn halfline_panels(hint: &DecayHint, splits: &[f64]) -> Vec<Panel> {
    let mut pts: Vec<f64> = splits
        .iter()
        .copied()
        .filter(|&s| s.is_finite() && s > 0.0)
        .collect();
    pts.push(1.0);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup_by(|x, y| (*x - *y).abs() < 1e-12 * (1.0 + y.abs()));

    let mut panels = Vec::new();
    let mut lo = 0.0;
    let mut e_lo = hint.singularity_at_zero.exponent();
    for &p in &pts {
        panels.push(Panel::Finite {
            a: lo,
            b: p,
            ea: e_lo,
            eb: 0.0,
        });
        lo = p;
        e_lo = 0.0;
    }
    panels.push(Panel::TailRight {
        c: lo,
        sigma: hint.tail_exponent,
    });
    panels
}

fn realline_panels(tail_neg: f64, tail_pos: f64, splits: &[f64]) -> Vec<Panel> {
    let mut pts: Vec<f64> = splits.iter().copied().filter(|s| s.is_finite()).collect();
    if pts.is_empty() {
        pts.push(0.0);
    }
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup_by(|x, y| (*x - *y).abs() < 1e-12 * (1.0 + y.abs()));

    let mut panels = vec![Panel::TailLeft {
        c: pts[0],
        sigma: tail_neg,
    }];
    for w in pts.windows(2) {
        panels.push(Panel::Finite {
            a: w[0],
            b: w[1],
            ea: 0.0,
            eb: 0.0,
        });
    }
    panels.push(Panel::TailRight {
        c: *pts.last().unwrap(),
        sigma: tail_pos,
    });
    panels
}

// ---------------------------------------------------------------------------
// public 1-D entry points
// ---------------------------------------------------------------------------

/// Integrate f over [0, inf). The hint declares the algebraic tail and the
/// endpoint behavior at zero; a non-integrable hint is rejected up front.
pub fn integrate_halfline(
    f: impl Fn(f64) -> f64,
    hint: DecayHint,
    tol: f64,
) -> Result<QuadratureResult> {
    integrate_halfline_with_splits(f, hint, &[], tol)
}

/// Same as [`integrate_halfline`] with extra interior split points (support
/// edges, known kinks).
pub fn integrate_halfline_with_splits(
    f: impl Fn(f64) -> f64,
    hint: DecayHint,
    splits: &[f64],
    tol: f64,
) -> Result<QuadratureResult> {
    hint.validate()?;
    let panels = halfline_panels(&hint, splits);
    let mut budget = DEFAULT_BUDGET_1D;
    let mut g = |x: f64| f(x);
    run_panels(&panels, &mut g, tol, tol, &mut budget)
}

/// Integrate f over [0, 1]. Integrable endpoint singularities of algebraic
/// or logarithmic type are handled by the double-exponential rule.
pub fn integrate_unit(f: impl Fn(f64) -> f64, tol: f64) -> Result<QuadratureResult> {
    integrate_unit_aware(|t, _, _| f(t), (-0.9, -0.9), tol)
}

/// [0, 1] rule for integrands that need accurate distances to the endpoints
/// (e.g. [t(1-t)]^(s-1) near t = 1). `exponents` declares the endpoint
/// behavior at t = 0 and t = 1.
pub fn integrate_unit_aware(
    f: impl Fn(f64, f64, f64) -> f64,
    exponents: (f64, f64),
    tol: f64,
) -> Result<QuadratureResult> {
    if !(exponents.0 > -1.0) || !(exponents.1 > -1.0) {
        return Err(Error::InvalidHint(format!(
            "endpoint exponents {:?} not integrable",
            exponents
        )));
    }
    let cfg = PanelCfg {
        tmax_q: quantize_tmax(exponents.0.min(exponents.1)),
        threshold: tol,
        rel: tol,
    };
    let mut budget = DEFAULT_BUDGET_1D;
    let mut g = |x: f64, da: f64, db: f64| f(x, da, db);
    ts_panel(&mut g, 0.0, 1.0, &cfg, &mut budget, 0)
}

/// Integrate f over the whole real line with algebraic tails on each side.
pub fn integrate_real_line(
    f: impl Fn(f64) -> f64,
    tail_neg: f64,
    tail_pos: f64,
    splits: &[f64],
    tol: f64,
) -> Result<QuadratureResult> {
    if !(tail_neg > 1.0) || !(tail_pos > 1.0) {
        return Err(Error::InvalidHint(format!(
            "line tails ({tail_neg}, {tail_pos}) not integrable"
        )));
    }
    let panels = realline_panels(tail_neg, tail_pos, splits);
    let mut budget = DEFAULT_BUDGET_1D;
    let mut g = |x: f64| f(x);
    run_panels(&panels, &mut g, tol, tol, &mut budget)
}

// ---------------------------------------------------------------------------
// 2-D drivers
// ---------------------------------------------------------------------------

/// Tail and split data for one axis of a planar integral.
#[derive(Clone, Debug)]
pub struct AxisHint {
    /// Integrand ~ |x|^(-sigma) as |x| -> inf along this axis.
    pub tail_exponent: f64,
    /// Interior split points (support edges, kinks).
    pub splits: Vec<f64>,
    /// Behavior at the zero endpoint for half-line axes.
    pub singularity_at_zero: Singularity,
}

impl AxisHint {
    pub fn tail(tail_exponent: f64) -> Self {
        AxisHint {
            tail_exponent,
            splits: Vec::new(),
            singularity_at_zero: Singularity::None,
        }
    }

    pub fn with_splits(mut self, splits: &[f64]) -> Self {
        self.splits = splits.to_vec();
        self
    }

    pub fn with_zero_singularity(mut self, s: Singularity) -> Self {
        self.singularity_at_zero = s;
        self
    }
}

fn nested_2d(
    outer_panels: Vec<Panel>,
    inner_panels: Vec<Panel>,
    f: &dyn Fn(f64, f64) -> f64,
    outer_weight: &dyn Fn(f64) -> f64,
    tol: f64,
) -> Result<QuadratureResult> {
    let mut budget = DEFAULT_BUDGET_2D;
    let inner_threshold = tol / 40.0;
    let inner_rel = tol / 4.0;
    let mut inner_evals = 0usize;
    let mut inner_failure: Option<Error> = None;

    let result = {
        let mut outer_fn = |y: f64| -> f64 {
            if inner_failure.is_some() {
                return f64::NAN;
            }
            let w = outer_weight(y);
            if w == 0.0 {
                return 0.0;
            }
            let mut g = |x: f64| f(x, y);
            match run_panels(&inner_panels, &mut g, inner_threshold, inner_rel, &mut budget) {
                Ok(r) => {
                    inner_evals += r.evaluations;
                    w * r.value
                }
                Err(e) => {
                    inner_failure = Some(e);
                    f64::NAN
                }
            }
        };
        let mut outer_budget = DEFAULT_BUDGET_1D;
        run_panels(&outer_panels, &mut outer_fn, tol, tol, &mut outer_budget)
    };

    if let Some(e) = inner_failure {
        return Err(e);
    }
    let mut out = result?;
    out.evaluations += inner_evals;
    // Inner calls are held to inner_threshold each; fold that into the bound.
    out.error_estimate += tol * 0.25;
    Ok(out)
}

/// Integrate f(x, t) over the plane R^2.
pub fn integrate_plane(
    f: impl Fn(f64, f64) -> f64,
    hint_x: &AxisHint,
    hint_t: &AxisHint,
    tol: f64,
) -> Result<QuadratureResult> {
    for h in [hint_x, hint_t] {
        if !(h.tail_exponent > 1.0) {
            return Err(Error::InvalidHint(format!(
                "plane axis tail {} not integrable",
                h.tail_exponent
            )));
        }
    }
    let outer = realline_panels(hint_t.tail_exponent, hint_t.tail_exponent, &hint_t.splits);
    let inner = realline_panels(hint_x.tail_exponent, hint_x.tail_exponent, &hint_x.splits);
    nested_2d(outer, inner, &|x, t| f(x, t), &|_| 1.0, tol)
}

/// Integrate 2*pi*r*f(x, r) over (x, r) in R x [0, inf): the volume integral
/// of an R^3 function that is radial in its last two coordinates.
pub fn integrate_plane_radial3(
    f: impl Fn(f64, f64) -> f64,
    hint_x: &AxisHint,
    hint_r: &AxisHint,
    tol: f64,
) -> Result<QuadratureResult> {
    if !(hint_x.tail_exponent > 1.0) || !(hint_r.tail_exponent > 2.0) {
        return Err(Error::InvalidHint(
            "radial-3d hints give a non-integrable tail".into(),
        ));
    }
    let hint = DecayHint {
        tail_exponent: hint_r.tail_exponent - 1.0,
        singularity_at_zero: Singularity::None,
    };
    let outer = halfline_panels(&hint, &hint_r.splits);
    let inner = realline_panels(hint_x.tail_exponent, hint_x.tail_exponent, &hint_x.splits);
    nested_2d(outer, inner, &|x, r| f(x, r), &|r| 2.0 * PI * r, tol)
}

/// Integrate f(x, y) over the half-plane R x (0, inf), dx dy.
pub fn integrate_halfplane(
    f: impl Fn(f64, f64) -> f64,
    hint_x: &AxisHint,
    hint_y: &AxisHint,
    tol: f64,
) -> Result<QuadratureResult> {
    if !(hint_x.tail_exponent > 1.0) || !(hint_y.tail_exponent > 1.0) {
        return Err(Error::InvalidHint(
            "half-plane hints give a non-integrable tail".into(),
        ));
    }
    let hint = DecayHint {
        tail_exponent: hint_y.tail_exponent,
        singularity_at_zero: hint_y.singularity_at_zero,
    };
    let outer = halfline_panels(&hint, &hint_y.splits);
    let inner = realline_panels(hint_x.tail_exponent, hint_x.tail_exponent, &hint_x.splits);
    nested_2d(outer, inner, &|x, y| f(x, y), &|_| 1.0, tol)
}

// ---------------------------------------------------------------------------
// differentiation
// ---------------------------------------------------------------------------

/// First derivative by central differences with Richardson extrapolation.
/// Best-effort: returns the extrapolant with the smallest internal estimate.
pub fn differentiate(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h0 = 0.1 * (1.0 + x.abs());
    richardson(|h| (f(x + h) - f(x - h)) / (2.0 * h), h0)
}

/// Second derivative by the same scheme.
pub fn second_derivative(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h0 = 0.15 * (1.0 + x.abs());
    let fx = f(x);
    richardson(|h| (f(x + h) - 2.0 * fx + f(x - h)) / (h * h), h0)
}

fn richardson(d: impl Fn(f64) -> f64, h0: f64) -> f64 {
    const LEVELS: usize = 6;
    let mut table = [[0.0f64; LEVELS]; LEVELS];
    let mut best = f64::NAN;
    let mut best_err = f64::INFINITY;
    for i in 0..LEVELS {
        let h = h0 * 0.5f64.powi(i as i32);
        table[i][0] = d(h);
        for j in 1..=i {
            let k = 4.0f64.powi(j as i32);
            table[i][j] = (k * table[i][j - 1] - table[i - 1][j - 1]) / (k - 1.0);
            let err = (table[i][j] - table[i][j - 1]).abs()
                + (table[i][j] - table[i - 1][j - 1]).abs();
            if err < best_err {
                best_err = err;
                best = table[i][j];
            }
        }
    }
    if best.is_nan() {
        table[0][0]
    } else {
        best
    }
}
