//! Sharpness verification: Euler-Lagrange residuals, epsilon-family limit
//! scans with Richardson extrapolation, bounded derivative-free quotient
//! maximization, and the randomized soundness sweep across every inequality
//! instance.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functionals::{
    grushin2d_constant, grushin3d_constant, grushin_quotient_2d, grushin_quotient_3d, instances,
    line_quotient, sphere_radial_quotient, SpectralParams,
};
use crate::potential::{apply_ls_radial, hls_quotient, PsiKernel};
use crate::profiles::{GrushinDim, GrushinProfile, RadialProfile};

/// One epsilon-family scan: quotients along the grid and the Richardson
/// extrapolation of their limit.
#[derive(Clone, Debug)]
pub struct ScanResult {
    pub parameters: Vec<f64>,
    pub quotients: Vec<f64>,
    pub extrapolated_limit: f64,
    /// Algebraic order fitted from the last three points.
    pub fitted_order: f64,
    pub target: f64,
    pub relative_gap: f64,
}

/// Richardson extrapolation on a constant-ratio decreasing grid, fitting
/// the algebraic order from the last three points.
pub fn richardson_extrapolate(params: &[f64], values: &[f64]) -> Result<(f64, f64)> {
    if params.len() < 3 || params.len() != values.len() {
        return Err(Error::ArgumentOutOfRange(
            "extrapolation needs at least three grid points".into(),
        ));
    }
    let n = params.len();
    let (e1, e2, e3) = (params[n - 3], params[n - 2], params[n - 1]);
    let rho = e3 / e2;
    if !(rho > 0.0 && rho < 1.0) || ((e2 / e1) - rho).abs() > 0.05 * rho {
        return Err(Error::ArgumentOutOfRange(
            "extrapolation grid must decrease at a fixed ratio".into(),
        ));
    }
    let (q1, q2, q3) = (values[n - 3], values[n - 2], values[n - 1]);
    let d1 = q2 - q1;
    let d2 = q3 - q2;
    if d2 == 0.0 {
        return Ok((q3, f64::INFINITY));
    }
    let order = (d1 / d2).abs().ln() / (1.0 / rho).ln();
    let factor = rho.powf(-order) - 1.0;
    Ok((q3 + d2 / factor, order))
}

fn run_scan(
    grid: &[f64],
    target: f64,
    mut quotient: impl FnMut(f64) -> Result<f64>,
) -> Result<ScanResult> {
    let mut quotients = Vec::with_capacity(grid.len());
    for &eps in grid {
        quotients.push(quotient(eps)?);
    }
    let (limit, order) = richardson_extrapolate(grid, &quotients)?;
    Ok(ScanResult {
        parameters: grid.to_vec(),
        quotients,
        extrapolated_limit: limit,
        fitted_order: order,
        target,
        relative_gap: (limit - target).abs() / target.abs(),
    })
}

/// Scan H = (1+u)^(-eps) in the inverted sixth-power form as eps -> 0;
/// the quotients rise to the sharp constant 2^(10/3).
pub fn epsilon_scan_eq5(grid: &[f64], tol: f64) -> Result<ScanResult> {
    for &e in grid {
        if !(e > 0.0 && e <= 0.25) {
            return Err(Error::ArgumentOutOfRange(format!(
                "eq5 scan needs eps in (0, 1/4], got {e}"
            )));
        }
    }
    let inst = instances::eq5();
    run_scan(grid, 2f64.powf(10.0 / 3.0), |eps| {
        let h = RadialProfile::power_law(eps)?;
        Ok(line_quotient(&h, &inst, tol)?.quotient)
    })
}

/// Scan F = (1+u)^(-eps) for eps decreasing toward 1/2 in the du-normalized
/// fourth-power form; the quotients rise to 4. The scan refuses eps at or
/// below the 0.51 floor where the individual integrals blow up.
pub fn epsilon_scan_thm4(grid: &[f64], tol: f64) -> Result<ScanResult> {
    for &e in grid {
        if !(e > 0.51 && e <= 1.0) {
            return Err(Error::ArgumentOutOfRange(format!(
                "thm4 scan needs eps in (0.51, 1], got {e}"
            )));
        }
    }
    let inst = instances::eq13();
    run_scan(grid, 4.0, |eps| {
        let f = RadialProfile::power_law(eps)?;
        Ok(line_quotient(&f, &inst, tol)?.quotient)
    })
}

/// The same family in the invariant-measure fourth-power form; quotients
/// approach 2/sqrt(pi) with the same trend.
pub fn epsilon_scan_thm4_invariant(grid: &[f64], tol: f64) -> Result<ScanResult> {
    for &e in grid {
        if !(e > 0.51 && e <= 1.0) {
            return Err(Error::ArgumentOutOfRange(format!(
                "thm4 scan needs eps in (0.51, 1], got {e}"
            )));
        }
    }
    let inst = instances::eq12_m();
    run_scan(grid, 2.0 / std::f64::consts::PI.sqrt(), |eps| {
        let f = RadialProfile::power_law(eps)?;
        Ok(line_quotient(&f, &inst, tol)?.quotient)
    })
}

/// Euler-Lagrange residual: max over the grid of |L_s F - c F^(p-1)| with
/// p = 2 + 1/s.
pub fn ode_residual(f: &RadialProfile, s: f64, c: f64, grid: &[f64]) -> f64 {
    let p = 2.0 + 1.0 / s;
    grid.iter()
        .map(|&u| {
            let ls = apply_ls_radial(f, s, u);
            let rhs = c * f.eval(u).abs().powf(p - 1.0);
            (ls - rhs).abs()
        })
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// bounded derivative-free maximization
// ---------------------------------------------------------------------------

/// Maximize a quotient over a box: coarse deterministic grid seeding, then
/// Nelder-Mead refinement with bound clamping (golden-section in one
/// dimension). Evaluation failures inside the box count as -inf.
pub fn maximize_quotient(
    objective: impl Fn(&[f64]) -> Result<f64>,
    bounds: &[(f64, f64)],
    budget: usize,
) -> Result<(Vec<f64>, f64)> {
    assert!(!bounds.is_empty() && bounds.len() <= 3, "at most 3 parameters");
    let mut evals = 0usize;
    let mut best_x = vec![0.0; bounds.len()];
    let mut best_v = f64::NEG_INFINITY;
    let mut eval = |x: &[f64], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        if *evals > budget {
            return Err(Error::BudgetExhausted(format!(
                "maximizer exceeded {budget} evaluations"
            )));
        }
        Ok(objective(x).unwrap_or(f64::NEG_INFINITY))
    };

    // deterministic coarse grid
    let per_dim = match bounds.len() {
        1 => 9,
        2 => 6,
        _ => 4,
    };
    let mut idx = vec![0usize; bounds.len()];
    loop {
        let x: Vec<f64> = idx
            .iter()
            .zip(bounds)
            .map(|(&i, &(lo, hi))| lo + (hi - lo) * (i as f64 + 0.5) / per_dim as f64)
            .collect();
        let v = eval(&x, &mut evals)?;
        if v > best_v {
            best_v = v;
            best_x = x;
        }
        let mut d = 0;
        loop {
            idx[d] += 1;
            if idx[d] < per_dim {
                break;
            }
            idx[d] = 0;
            d += 1;
            if d == bounds.len() {
                break;
            }
        }
        if d == bounds.len() {
            break;
        }
    }

    if bounds.len() == 1 {
        // golden-section around the best grid cell
        let (lo, hi) = bounds[0];
        let cell = (hi - lo) / per_dim as f64;
        let mut a = (best_x[0] - 1.2 * cell).max(lo);
        let mut b = (best_x[0] + 1.2 * cell).min(hi);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = b - phi * (b - a);
        let mut x2 = a + phi * (b - a);
        let mut f1 = eval(&[x1], &mut evals)?;
        let mut f2 = eval(&[x2], &mut evals)?;
        while (b - a) > 1e-7 * (hi - lo) {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = eval(&[x2], &mut evals)?;
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = eval(&[x1], &mut evals)?;
            }
        }
        let xm = 0.5 * (a + b);
        let fm = eval(&[xm], &mut evals)?;
        let (bx, bv) = if fm >= f1.max(f2) {
            (xm, fm)
        } else if f1 >= f2 {
            (x1, f1)
        } else {
            (x2, f2)
        };
        if bv > best_v {
            return Ok((vec![bx], bv));
        }
        return Ok((best_x, best_v));
    }

    // Nelder-Mead from the best grid node
    let n = bounds.len();
    let clamp = |x: &mut Vec<f64>| {
        for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
            *v = v.clamp(lo, hi);
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((best_x.clone(), best_v));
    for d in 0..n {
        let mut x = best_x.clone();
        let span = bounds[d].1 - bounds[d].0;
        x[d] += 0.08 * span;
        clamp(&mut x);
        let v = eval(&x, &mut evals)?;
        simplex.push((x, v));
    }
    for _ in 0..200 {
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let spread = simplex[0].1 - simplex[n].1;
        if spread.abs() < 1e-10 * (1.0 + simplex[0].1.abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|(x, _)| x[d]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let mut refl: Vec<f64> = centroid
            .iter()
            .zip(&worst.0)
            .map(|(c, w)| c + (c - w))
            .collect();
        clamp(&mut refl);
        let fr = eval(&refl, &mut evals)?;
        if fr > simplex[0].1 {
            let mut exp: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + 2.0 * (c - w))
                .collect();
            clamp(&mut exp);
            let fe = eval(&exp, &mut evals)?;
            simplex[n] = if fe > fr { (exp, fe) } else { (refl, fr) };
        } else if fr > simplex[n - 1].1 {
            simplex[n] = (refl, fr);
        } else {
            let mut con: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + 0.5 * (w - c))
                .collect();
            clamp(&mut con);
            let fc = eval(&con, &mut evals)?;
            if fc > worst.1 {
                simplex[n] = (con, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let mut x: Vec<f64> = best
                        .iter()
                        .zip(&entry.0)
                        .map(|(b, v)| 0.5 * (b + v))
                        .collect();
                    clamp(&mut x);
                    let fv = eval(&x, &mut evals)?;
                    *entry = (x, fv);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    Ok((simplex[0].0.clone(), simplex[0].1))
}

// ---------------------------------------------------------------------------
// soundness sweep
// ---------------------------------------------------------------------------

/// Outcome of a randomized no-counterexample sweep for one inequality.
#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub instance: String,
    pub samples: usize,
    /// Max over the sweep of (quotient - constant)/constant.
    pub worst_relative_excess: f64,
    pub pass: bool,
}

fn random_radial(rng: &mut ChaCha8Rng, min_alpha: f64, max_alpha: f64) -> RadialProfile {
    let alpha = rng.gen_range(min_alpha..max_alpha);
    let mut f = RadialProfile::power_law(alpha).unwrap();
    if rng.gen_bool(0.5) {
        let c = rng.gen_range(0.05..1.0);
        let center = rng.gen_range(0.2..4.0);
        let width = rng.gen_range(0.2..1.5);
        f = f.add(&RadialProfile::bump(center, width).unwrap().scale(c));
    }
    if rng.gen_bool(0.3) {
        f = f.scale(rng.gen_range(0.2..3.0));
    }
    f
}

fn random_grushin(rng: &mut ChaCha8Rng, dim: GrushinDim, gamma_star: f64) -> GrushinProfile {
    let choice: u32 = rng.gen_range(0..3);
    let f = match choice {
        0 => {
            let a = 10f64.powf(rng.gen_range(-0.7..0.7));
            let b = 10f64.powf(rng.gen_range(-0.7..0.7));
            GrushinProfile::gaussian(dim, a, b).unwrap()
        }
        1 => {
            // extremal family away from its flat top: the equality point is
            // verified separately, the sweep probes the strict region
            let lo = gamma_star * 0.6;
            let hi = gamma_star * 2.2;
            let mut gamma = rng.gen_range(lo..hi);
            if (gamma - gamma_star).abs() < 0.16 * gamma_star {
                gamma = gamma_star * 2.2 + (gamma - gamma_star);
            }
            GrushinProfile::extremal(dim, gamma.max(0.31 * gamma_star)).unwrap()
        }
        _ => {
            let a = GrushinProfile::gaussian(dim, 1.0, rng.gen_range(0.4..2.5)).unwrap();
            let b = GrushinProfile::gaussian(dim, rng.gen_range(0.4..2.5), 1.0).unwrap();
            a.add(&b.scale(rng.gen_range(0.1..1.0)))
        }
    };
    if rng.gen_bool(0.4) {
        f.rescale(rng.gen_range(0.5..2.0))
    } else {
        f
    }
}

/// Sweep the planar Grushin inequality over random admissible profiles.
pub fn sweep_grushin_2d(samples: usize, seed: u64, tol: f64) -> Result<SweepOutcome> {
    let profiles: Vec<GrushinProfile> = {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| random_grushin(&mut rng, GrushinDim::Plane, 0.25))
            .collect()
    };
    let c = grushin2d_constant();
    let worst = profiles
        .par_iter()
        .map(|f| {
            grushin_quotient_2d(f, tol)
                .map(|r| (r.quotient - c) / c)
                .unwrap_or(f64::NEG_INFINITY)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(SweepOutcome {
        instance: "eq1".into(),
        samples,
        worst_relative_excess: worst,
        pass: worst <= 1e-6,
    })
}

/// Sweep the R^3 Grushin inequality.
pub fn sweep_grushin_3d(samples: usize, seed: u64, tol: f64) -> Result<SweepOutcome> {
    let profiles: Vec<GrushinProfile> = {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| random_grushin(&mut rng, GrushinDim::Space, 0.5))
            .collect()
    };
    let c = grushin3d_constant();
    let worst = profiles
        .par_iter()
        .map(|f| {
            grushin_quotient_3d(f, tol)
                .map(|r| (r.quotient - c) / c)
                .unwrap_or(f64::NEG_INFINITY)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(SweepOutcome {
        instance: "eq11".into(),
        samples,
        worst_relative_excess: worst,
        pass: worst <= 1e-6,
    })
}

/// Sweep one weighted half-line instance over random radial profiles.
pub fn sweep_line_instance(
    id: &str,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<SweepOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (inst, min_alpha, max_alpha) = match id {
        "eq2" => (instances::eq2_m(), 0.55, 4.0),
        "eq3" => (instances::eq3_m(), 0.55, 4.0),
        "eq12" => (instances::eq12_m(), 0.55, 4.0),
        "eq17" => (
            instances::hyperbolic(SpectralParams::new(0.25)?),
            0.55,
            4.0,
        ),
        "eq7" => (instances::sphere(6.0), 0.05, 2.5),
        other => {
            return Err(Error::ArgumentOutOfRange(format!(
                "unknown sweep instance {other}"
            )))
        }
    };
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let f = random_radial(&mut rng, min_alpha, max_alpha);
        let q = line_quotient(&f, &inst, tol)?;
        worst = worst.max((q.quotient - inst.constant) / inst.constant);
    }
    Ok(SweepOutcome {
        instance: id.to_string(),
        samples,
        worst_relative_excess: worst,
        pass: worst <= 1e-6,
    })
}

/// Sweep the HLS inequality at s = 1 over random profiles in L^q. The
/// equality point a = 1 + s is excluded (it is verified separately); the
/// sweep must keep a real margin because the two-dimensional stack only
/// measures the quotient to ~1e-4.
pub fn sweep_hls(samples: usize, seed: u64, tol: f64) -> Result<SweepOutcome> {
    let kernel = PsiKernel::build(1.0)?;
    let params = SpectralParams::new(1.0)?;
    let draws: Vec<RadialProfile> = {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    let center = rng.gen_range(0.2..3.0);
                    let width = rng.gen_range(0.15..0.9) * (0.5 + center);
                    RadialProfile::bump(center, width.min(center + 0.4)).unwrap()
                } else {
                    let mut a: f64 = rng.gen_range(0.9..3.5);
                    if (a - 2.0).abs() < 0.3 {
                        a += if a < 2.0 { -0.3 } else { 0.3 };
                    }
                    RadialProfile::power_law(a).unwrap()
                }
            })
            .collect()
    };
    let worst = draws
        .par_iter()
        .map(|g| {
            hls_quotient(&kernel, g, tol)
                .map(|r| (r.quotient - params.a_p) / params.a_p)
                .unwrap_or(f64::NEG_INFINITY)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(SweepOutcome {
        instance: "eq25".into(),
        samples,
        worst_relative_excess: worst,
        pass: worst <= 1e-6,
    })
}
