//! Audits: multistart minimization of `dz(X)` off a tube around the torus,
//! finite-difference checks of the gradient of `H`, the full versus reduced
//! flow comparison, and the Reeb identity on random samples.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contact::{ContactField, ReebResiduals};
use crate::error::FlowError;
use crate::flow::{integrate_with, Direction, Dopri5Options, ReducedField};
use crate::hamiltonian::{check_h_conditions, HCheckConfig, HReport, Hamiltonian, HamiltonianStack};
use crate::point::{squared_radii, torus_distance, Point};
use crate::profiles::{verify_reference, ConstraintReport, ProfileGrid};
use crate::sampling::{rng, shell_point, torus_point, BoxRegion, Halton};

use rand::Rng;

/// `dz(X)` at a Cartesian point.
pub fn dz_x<H: Hamiltonian + ?Sized>(ham: &H, p: &[f64]) -> f64 {
    let u = squared_radii(p);
    ham.radial(&u, p[p.len() - 1]).vertical_rate(&u)
}

/// Push `p` to the nearest point (coordinate-wise in the max metric) with
/// torus distance at least `tube`.
pub fn project_out_of_tube(p: &mut [f64], tube: f64) {
    let n = p.len() / 2;
    let z = p[2 * n];
    let mut worst = (z.abs(), n);
    for j in 0..n {
        let d = (p[2 * j].hypot(p[2 * j + 1]) - 1.0).abs();
        if d > worst.0 {
            worst = (d, j);
        }
    }
    if worst.0 >= tube {
        return;
    }
    let (_, k) = worst;
    if k == n {
        p[2 * n] = if z < 0.0 { -tube } else { tube };
    } else {
        let r = p[2 * k].hypot(p[2 * k + 1]);
        let target = if r < 1.0 { 1.0 - tube } else { 1.0 + tube };
        p[2 * k] *= target / r;
        p[2 * k + 1] *= target / r;
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimizeConfig {
    /// Feasible box; contains the support box.
    pub region: BoxRegion,
    /// Box the starts are drawn from. Outside it `dz(X) = 1` identically,
    /// which [`minimize_tubes`] re-checks by sampling.
    pub start_region: BoxRegion,
    pub starts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Central-difference step for the gradient of `dz(X)`.
    pub fd_step: f64,
}

impl MinimizeConfig {
    pub fn new(n: usize, r_star: f64, z_full: f64) -> Self {
        Self {
            region: BoxRegion::slab(n, r_star, z_full),
            start_region: BoxRegion::slab(n, 2.5, z_full),
            starts: 1000,
            seed: 1,
            max_iters: 400,
            fd_step: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub min_value: f64,
    pub argmin: Point,
    pub starts: usize,
    pub converged_fraction: f64,
    pub tube_radius: f64,
    pub low_confidence: bool,
    pub seed: u64,
    /// Feasible points with `dz(X) <= 0`; must be empty.
    pub counterexamples: Vec<Vec<f64>>,
    pub evaluations: usize,
}

struct Descent {
    x: Vec<f64>,
    f: f64,
    converged: bool,
    evaluations: usize,
    counterexamples: Vec<Vec<f64>>,
}

fn local_descent<H: Hamiltonian + ?Sized>(
    ham: &H,
    start: &[f64],
    tube: f64,
    cfg: &MinimizeConfig,
) -> Descent {
    let dim = start.len();
    let mut evaluations = 0usize;
    let mut counterexamples = Vec::new();
    let feasible = |x: &mut Vec<f64>| {
        cfg.region.clamp(x);
        project_out_of_tube(x, tube);
    };
    let eval = |x: &[f64], evals: &mut usize, bad: &mut Vec<Vec<f64>>| {
        *evals += 1;
        let v = dz_x(ham, x);
        if !(v > 0.0) && torus_distance(x) >= tube && bad.len() < 16 {
            bad.push(x.to_vec());
        }
        v
    };
    let grad = |x: &[f64], evals: &mut usize| {
        let mut g = vec![0.0; dim];
        let mut q = x.to_vec();
        for i in 0..dim {
            let h = cfg.fd_step * x[i].abs().max(1.0);
            q[i] = x[i] + h;
            let fp = dz_x(ham, &q);
            q[i] = x[i] - h;
            let fm = dz_x(ham, &q);
            q[i] = x[i];
            g[i] = (fp - fm) / (2.0 * h);
        }
        *evals += 2 * dim;
        g
    };

    let mut x = start.to_vec();
    feasible(&mut x);
    let mut f = eval(&x, &mut evaluations, &mut counterexamples);
    let mut g = grad(&x, &mut evaluations);
    let mut alpha = 1.0f64;
    let mut converged = false;
    let mut quiet = 0;
    for _ in 0..cfg.max_iters {
        if g.iter().all(|v| *v == 0.0) {
            converged = true;
            break;
        }
        let mut a = alpha;
        let mut accepted = None;
        for _ in 0..40 {
            let mut xn: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - a * gi).collect();
            feasible(&mut xn);
            let decrease: f64 = g.iter().zip(xn.iter().zip(&x)).map(|(gi, (a1, b1))| gi * (a1 - b1)).sum();
            let fnew = eval(&xn, &mut evaluations, &mut counterexamples);
            if fnew <= f + 1e-4 * decrease.min(0.0) {
                accepted = Some((xn, fnew));
                break;
            }
            a *= 0.5;
        }
        let Some((xn, fnew)) = accepted else {
            converged = true;
            break;
        };
        let gn = grad(&xn, &mut evaluations);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a1, b1)| a1 - b1).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a1, b1)| a1 - b1).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a1, b1)| a1 * b1).sum();
        let ss: f64 = s.iter().map(|v| v * v).sum();
        alpha = if sy > 0.0 { (ss / sy).clamp(1e-10, 1e3) } else { (2.0 * a).min(1e3) };
        let step = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let df = f - fnew;
        x = xn;
        f = fnew;
        g = gn;
        if step < 1e-12 || df <= 1e-16 + 1e-13 * f.abs() {
            quiet += 1;
            if quiet >= 3 {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    Descent {
        x,
        f,
        converged,
        evaluations,
        counterexamples,
    }
}

fn minimize_with_starts<H: Hamiltonian + ?Sized>(
    ham: &H,
    tube: f64,
    cfg: &MinimizeConfig,
    starts: &[Vec<f64>],
) -> OptimizationResult {
    let runs: Vec<Descent> = starts.par_iter().map(|s| local_descent(ham, s, tube, cfg)).collect();
    let mut best = 0usize;
    for (i, r) in runs.iter().enumerate() {
        if r.f < runs[best].f {
            best = i;
        }
    }
    let converged = runs.iter().filter(|r| r.converged).count();
    let converged_fraction = converged as f64 / runs.len().max(1) as f64;
    OptimizationResult {
        min_value: runs[best].f,
        argmin: Point::new(runs[best].x.clone()),
        starts: runs.len(),
        converged_fraction,
        tube_radius: tube,
        low_confidence: converged_fraction < 0.9,
        seed: cfg.seed,
        counterexamples: runs.iter().flat_map(|r| r.counterexamples.iter().cloned()).collect(),
        evaluations: runs.iter().map(|r| r.evaluations).sum(),
    }
}

fn halton_starts(cfg: &MinimizeConfig) -> Vec<Vec<f64>> {
    let mut h = Halton::new(cfg.start_region.dim(), cfg.seed);
    (0..cfg.starts).map(|_| cfg.start_region.scale(&h.next_point())).collect()
}

/// Multistart projected descent of `dz(X)` over the region minus the tube.
pub fn minimize_dz_x<H: Hamiltonian + ?Sized>(
    ham: &H,
    tube_radius: f64,
    cfg: &MinimizeConfig,
) -> Result<OptimizationResult, FlowError> {
    if !(tube_radius > 0.0 && tube_radius < 1.0) {
        return Err(FlowError::InvalidArgument(format!("tube radius {tube_radius} must lie in (0, 1)")));
    }
    if cfg.starts == 0 {
        return Err(FlowError::InvalidArgument("need at least one start".into()));
    }
    Ok(minimize_with_starts(ham, tube_radius, cfg, &halton_starts(cfg)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TubeSweep {
    pub results: Vec<OptimizationResult>,
    /// Slope of `log min` against `log radius`.
    pub exponent: f64,
    pub all_positive: bool,
    pub decreasing: bool,
    pub counterexamples: usize,
    /// Largest `|dz(X) - 1|` on samples of the feasible box outside the start box.
    pub flat_deviation: f64,
    pub flat_samples: usize,
    pub passed: bool,
}

/// Minima for a decreasing list of tube radii; each radius also warm-starts
/// from the previous argmin.
pub fn minimize_tubes<H: Hamiltonian + ?Sized>(
    ham: &H,
    radii: &[f64],
    cfg: &MinimizeConfig,
) -> Result<TubeSweep, FlowError> {
    let base = halton_starts(cfg);
    let mut results: Vec<OptimizationResult> = Vec::new();
    for &tube in radii {
        if !(tube > 0.0 && tube < 1.0) {
            return Err(FlowError::InvalidArgument(format!("tube radius {tube} must lie in (0, 1)")));
        }
        let mut starts = base.clone();
        if let Some(prev) = results.last() {
            starts.push(prev.argmin.as_slice().to_vec());
        }
        results.push(minimize_with_starts(ham, tube, cfg, &starts));
    }
    let all_positive = results.iter().all(|r| r.min_value > 0.0);
    let decreasing = results.windows(2).all(|w| w[1].min_value < w[0].min_value);
    let counterexamples = results.iter().map(|r| r.counterexamples.len()).sum();
    let (flat_deviation, flat_samples) = flat_outside_starts(ham, cfg, 10_000);
    let exponent = power_law_exponent(
        &results.iter().map(|r| r.tube_radius).collect::<Vec<_>>(),
        &results.iter().map(|r| r.min_value).collect::<Vec<_>>(),
    );
    Ok(TubeSweep {
        passed: all_positive && decreasing && counterexamples == 0 && flat_deviation < 1e-12,
        results,
        exponent,
        all_positive,
        decreasing,
        counterexamples,
        flat_deviation,
        flat_samples,
    })
}

fn flat_outside_starts<H: Hamiltonian + ?Sized>(ham: &H, cfg: &MinimizeConfig, samples: usize) -> (f64, usize) {
    let mut r = rng(cfg.seed ^ 0x5eed);
    let mut worst = 0.0f64;
    let mut used = 0usize;
    for _ in 0..samples * 4 {
        if used == samples {
            break;
        }
        let p = cfg.region.uniform(&mut r);
        if cfg.start_region.contains(&p) {
            continue;
        }
        used += 1;
        let d = (dz_x(ham, &p) - 1.0).abs();
        if d > worst || d.is_nan() {
            worst = d;
        }
    }
    (worst, used)
}

/// Least-squares slope of `ln y` on `ln x`; NaN with fewer than two usable points.
pub fn power_law_exponent(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FdAudit {
    pub points: usize,
    pub step: f64,
    pub max_rel_error: f64,
    pub at: Vec<f64>,
    /// Step outside `[1e-7, 1e-3]`: the result is dominated by rounding or truncation.
    pub flagged: bool,
    pub tolerance: f64,
    pub passed: bool,
}

/// Analytic gradient of `H` against central differences at random points,
/// axis points, and torus points. Relative error is
/// `|grad - fd|_inf / max(|grad|_inf, 1)`.
pub fn gradient_fd_audit<H: Hamiltonian + ?Sized>(ham: &H, points: usize, step: f64, seed: u64) -> FdAudit {
    let n = ham.n();
    let dim = 2 * n + 1;
    let mut r = rng(seed);
    let bulk = BoxRegion::slab(n, 3.0, 2.5);
    let pts: Vec<Vec<f64>> = (0..points)
        .map(|i| match i % 4 {
            0 => torus_point(n, &mut r).into_vec(),
            1 => {
                let mut p = bulk.uniform(&mut r);
                let j = r.gen_range(0..n);
                p[2 * j] = 0.0;
                p[2 * j + 1] = 0.0;
                p
            }
            2 => shell_point(n, 1e-3, 0.3, &mut r).into_vec(),
            _ => bulk.uniform(&mut r),
        })
        .collect();
    let errs: Vec<f64> = pts
        .par_iter()
        .map(|p| {
            let a = ham.gradient(p).as_vector();
            let mut q = p.clone();
            let mut worst = 0.0f64;
            let mut scale = 1.0f64;
            for i in 0..dim {
                q[i] = p[i] + step;
                let fp = ham.value(&q);
                q[i] = p[i] - step;
                let fm = ham.value(&q);
                q[i] = p[i];
                let fd = (fp - fm) / (2.0 * step);
                worst = worst.max((a[i] - fd).abs());
                scale = scale.max(a[i].abs());
            }
            worst / scale
        })
        .collect();
    let mut best = (0.0f64, Vec::new());
    for (e, p) in errs.iter().zip(&pts) {
        if *e > best.0 || e.is_nan() {
            best = (*e, p.clone());
        }
    }
    let tolerance = 1e-6;
    let flagged = !(1e-7..=1e-3).contains(&step);
    FdAudit {
        points,
        step,
        max_rel_error: best.0,
        at: best.1,
        flagged,
        tolerance,
        passed: !flagged && best.0 < tolerance,
    }
}

pub const INTEGRATION_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductionAudit {
    pub pairs: usize,
    pub t_span: f64,
    pub tol: f64,
    pub integration_tol: f64,
    pub max_deviation: f64,
    pub at_start: Vec<f64>,
    pub at_time: f64,
    pub limit: f64,
    pub passed: bool,
}

/// Integrate each start with the full field and its `(r, z)` shadow with
/// the reduced field; compare `(r_1, ..., r_n, z)` at common output times.
/// Both integrations run at local tolerance `tol * INTEGRATION_MARGIN` so
/// that the comparison measures the reduction rather than the global error
/// of the integrator.
pub fn reduction_audit<H: Hamiltonian + Clone>(
    ham: &H,
    starts: &[Point],
    t_span: f64,
    tol: f64,
) -> Result<ReductionAudit, FlowError> {
    let full = ContactField::new(ham.clone());
    let reduced = ReducedField::new(ham.clone());
    let opts = Dopri5Options::with_tol(tol * INTEGRATION_MARGIN);
    let count = (t_span / 0.25).ceil().max(1.0) as usize;
    let times: Vec<f64> = (1..=count).map(|k| t_span * k as f64 / count as f64).collect();
    let rows: Vec<Result<(f64, f64), FlowError>> = starts
        .par_iter()
        .map(|p| {
            let n = p.n();
            let a = integrate_with(&full, p.as_slice(), &times, Direction::Forward, &opts)?;
            let mut rs = p.radii();
            rs.extend(std::iter::repeat(0.0).take(n));
            rs.push(p.z());
            let b = integrate_with(&reduced, &rs, &times, Direction::Forward, &opts)?;
            let mut worst = (0.0f64, 0.0f64);
            for (sa, sb) in a.samples.iter().zip(&b.samples) {
                let mut d = (sa.state[2 * n] - sb.state[2 * n]).abs();
                for j in 0..n {
                    let r = sa.state[2 * j].hypot(sa.state[2 * j + 1]);
                    d = d.max((r - sb.state[j]).abs());
                }
                if d > worst.0 {
                    worst = (d, sa.t);
                }
            }
            Ok(worst)
        })
        .collect();
    let mut best = (0.0f64, Vec::new(), 0.0f64);
    for (row, p) in rows.into_iter().zip(starts) {
        let (d, t) = row?;
        if d > best.0 {
            best = (d, p.as_slice().to_vec(), t);
        }
    }
    let limit = 10.0 * tol;
    Ok(ReductionAudit {
        pairs: starts.len(),
        t_span,
        tol,
        integration_tol: tol * INTEGRATION_MARGIN,
        max_deviation: best.0,
        at_start: best.1,
        at_time: best.2,
        limit,
        passed: best.0 < limit,
    })
}

/// Random starts for the reduction audit: uniform in a box around the
/// torus with one on the cylinder and one outside the support.
pub fn reduction_starts(n: usize, count: usize, seed: u64) -> Vec<Point> {
    let mut r = rng(seed);
    let region = BoxRegion::slab(n, 2.0, 2.0);
    (0..count)
        .map(|i| match i {
            0 => Point::from_polar(&vec![1.0; n], &vec![0.3; n], -0.5),
            1 => Point::from_polar(&vec![9.0; n], &vec![0.0; n], 0.5),
            _ => Point::new(region.uniform(&mut r)),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReebAudit {
    pub samples: usize,
    pub half_width: f64,
    pub max: ReebResiduals,
    pub at: Vec<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

/// Reeb residuals of `X` for `alpha_st / H` at uniform points of a cube.
pub fn reeb_audit<H: Hamiltonian>(field: &ContactField<H>, samples: usize, half_width: f64, seed: u64) -> ReebAudit {
    let region = BoxRegion::cube(2 * field.n() + 1, half_width);
    let mut r = rng(seed);
    let pts: Vec<Vec<f64>> = (0..samples).map(|_| region.uniform(&mut r)).collect();
    let res: Vec<ReebResiduals> = pts.par_iter().map(|p| field.reeb_residuals(p)).collect();
    let mut max = ReebResiduals { alpha: 0.0, d_alpha: 0.0 };
    let mut at = Vec::new();
    for (q, p) in res.iter().zip(&pts) {
        let worse = q.alpha.max(q.d_alpha) > max.alpha.max(max.d_alpha) || q.alpha.is_nan() || q.d_alpha.is_nan();
        max.alpha = max.alpha.max(q.alpha);
        max.d_alpha = max.d_alpha.max(q.d_alpha);
        if worse {
            at = p.clone();
        }
    }
    let tolerance = 1e-9;
    ReebAudit {
        samples,
        half_width,
        passed: max.alpha < tolerance && max.d_alpha < tolerance && !max.alpha.is_nan() && !max.d_alpha.is_nan(),
        max,
        at,
        tolerance,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AuditConfig {
    pub profile_grid: ProfileGrid,
    pub h_samples: usize,
    pub reeb_samples: usize,
    pub reeb_half_width: f64,
    pub tube_radii: Vec<f64>,
    pub starts: usize,
    pub fd_points: usize,
    pub fd_step: f64,
    pub reduction_pairs: usize,
    pub reduction_t_span: f64,
    pub reduction_tol: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            profile_grid: ProfileGrid::default(),
            h_samples: 10_000,
            reeb_samples: 100_000,
            reeb_half_width: 10.0,
            tube_radii: vec![0.3, 0.1, 0.03, 0.01],
            starts: 1000,
            fd_points: 1000,
            fd_step: 1e-5,
            reduction_pairs: 20,
            reduction_t_span: 50.0,
            reduction_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditReport {
    pub seed: u64,
    pub profiles: ConstraintReport,
    pub hamiltonian: HReport,
    pub reeb: ReebAudit,
    pub dz_x: TubeSweep,
    pub gradient: FdAudit,
    pub reduction: ReductionAudit,
    pub passed: bool,
}

/// The full audit battery for one Hamiltonian.
pub fn run_audit(stack: &HamiltonianStack, cfg: &AuditConfig, seed: u64) -> Result<AuditReport, FlowError> {
    let k = *stack.constants();
    let profiles = verify_reference(&k, cfg.profile_grid).map_err(|e| FlowError::InvalidArgument(e.to_string()))?;
    let hamiltonian = check_h_conditions(
        stack,
        &HCheckConfig {
            samples: cfg.h_samples,
            tube_radii: cfg.tube_radii.clone(),
            seed,
        },
    );
    let field = ContactField::new(stack.clone());
    let reeb = reeb_audit(&field, cfg.reeb_samples, cfg.reeb_half_width, seed);
    let mcfg = MinimizeConfig {
        starts: cfg.starts,
        seed,
        ..MinimizeConfig::new(stack.n(), k.r_star(), k.z_full)
    };
    let dz_x = minimize_tubes(stack, &cfg.tube_radii, &mcfg)?;
    let gradient = gradient_fd_audit(stack, cfg.fd_points, cfg.fd_step, seed);
    let starts = reduction_starts(stack.n(), cfg.reduction_pairs, seed);
    let reduction = reduction_audit(stack, &starts, cfg.reduction_t_span, cfg.reduction_tol)?;
    let passed = profiles.passed && hamiltonian.passed && reeb.passed && dz_x.passed && gradient.passed && reduction.passed;
    Ok(AuditReport {
        seed,
        profiles,
        hamiltonian,
        reeb,
        dz_x,
        gradient,
        reduction,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::ConstantHamiltonian;
    use crate::profiles::ProfileConstants;

    fn stack() -> HamiltonianStack {
        HamiltonianStack::reference(ProfileConstants::default()).unwrap()
    }

    #[test]
    fn projection_leaves_tube() {
        let mut p = vec![1.0, 0.0, 0.0, 1.0, 0.001];
        project_out_of_tube(&mut p, 0.1);
        assert!((torus_distance(&p) - 0.1).abs() < 1e-12);
        let mut p = vec![1.05, 0.0, 0.0, 1.0, 0.001];
        project_out_of_tube(&mut p, 0.1);
        assert!((p[0] - 1.1).abs() < 1e-12);
        let mut q = vec![3.0, 0.0, 0.0, 1.0, 0.0];
        project_out_of_tube(&mut q, 0.1);
        assert_eq!(q, vec![3.0, 0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn dz_x_vanishes_on_torus() {
        let s = stack();
        let mut r = rng(3);
        for _ in 0..100 {
            let p = torus_point(2, &mut r);
            assert!(dz_x(&s, p.as_slice()).abs() < 1e-10);
        }
    }

    #[test]
    fn power_law_recovers_exponent() {
        let x = [0.3, 0.1, 0.03, 0.01];
        let y: Vec<f64> = x.iter().map(|v: &f64| 0.7 * v.powf(2.0)).collect();
        assert!((power_law_exponent(&x, &y) - 2.0).abs() < 1e-12);
        assert!(power_law_exponent(&[1.0], &[1.0]).is_nan());
    }

    #[test]
    fn fd_audit_constant_is_exact() {
        let a = gradient_fd_audit(&ConstantHamiltonian { n: 2, value: 1.0 }, 50, 1e-5, 1);
        assert_eq!(a.max_rel_error, 0.0);
        assert!(a.passed);
    }

    #[test]
    fn fd_audit_flags_tiny_step() {
        let a = gradient_fd_audit(&stack(), 50, 1e-12, 1);
        assert!(a.flagged);
        assert!(!a.passed);
    }

    #[test]
    fn minimizer_is_deterministic() {
        let cfg = MinimizeConfig {
            starts: 40,
            ..MinimizeConfig::new(2, 8.0, 2.0)
        };
        let a = minimize_dz_x(&stack(), 0.1, &cfg).unwrap();
        let b = minimize_dz_x(&stack(), 0.1, &cfg).unwrap();
        assert_eq!(a.min_value.to_bits(), b.min_value.to_bits());
        assert!(a.min_value > 0.0);
        assert!(torus_distance(a.argmin.as_slice()) >= 0.1 - 1e-12);
    }

    #[test]
    fn minimizer_rejects_bad_tube() {
        let cfg = MinimizeConfig::new(2, 8.0, 2.0);
        assert!(minimize_dz_x(&stack(), 0.0, &cfg).is_err());
    }
}
