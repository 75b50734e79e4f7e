//! Orbit-level experiments: classification, rotation number on the torus,
//! the periodic-orbit scan, and the hyperplane sweep.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::FlowError;
use crate::point::torus_distance;
use crate::sampling::{BoxRegion, Halton};

use super::field::VectorField;
use super::integrator::{run, Dopri5Options, Flow, StepRecord};
use super::Direction;

/// Dense samples per accepted step used when watching for events.
const DENSE_PROBES: usize = 8;

fn probe_points(step: &StepRecord, mut f: impl FnMut(f64, &[f64])) {
    let mut buf = vec![0.0; step.y0.len()];
    for k in 1..DENSE_PROBES {
        let t = step.t0 + (step.t1 - step.t0) * k as f64 / DENSE_PROBES as f64;
        step.eval(t, &mut buf);
        f(t, &buf);
    }
    f(step.t1, step.y1);
}

/// Root of `g` along the step by bisection on dense output, given a sign
/// change between `ta` and `tb`.
fn bisect_event(step: &StepRecord, mut ta: f64, mut tb: f64, g: impl Fn(&[f64]) -> f64) -> (f64, Vec<f64>) {
    let mut buf = vec![0.0; step.y0.len()];
    step.eval(ta, &mut buf);
    let ga = g(&buf);
    for _ in 0..80 {
        let tm = 0.5 * (ta + tb);
        step.eval(tm, &mut buf);
        let gm = g(&buf);
        if (gm > 0.0) == (ga > 0.0) {
            ta = tm;
        } else {
            tb = tm;
        }
        if (tb - ta).abs() < 1e-14 * tb.abs().max(1.0) {
            break;
        }
    }
    step.eval(tb, &mut buf);
    (tb, buf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitClass {
    OnTorus,
    ForwardTrapped,
    BackwardTrapped,
    BiEscaping,
    HorizonInconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub horizon: f64,
    /// Region an orbit must stay in to count as trapped.
    pub region: BoxRegion,
    /// Height beyond which an exit counts as an escape.
    pub z_full: f64,
    pub eps_t: f64,
    pub opts: Dopri5Options,
}

impl ClassifyConfig {
    pub fn new(n: usize, r_star: f64, z_full: f64) -> Self {
        Self {
            horizon: 500.0,
            region: BoxRegion::slab(n, r_star, z_full),
            z_full,
            eps_t: 1e-6,
            opts: Dopri5Options::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionEvidence {
    pub direction: Direction,
    /// Signed time reached.
    pub t_end: f64,
    pub final_state: Vec<f64>,
    pub final_z: f64,
    pub start_torus_distance: f64,
    pub final_torus_distance: f64,
    pub max_torus_distance: f64,
    /// First time the orbit left the region, with the height there.
    pub exit_time: Option<f64>,
    pub exit_z: Option<f64>,
    /// Time from which the flow is an exact translation forever.
    pub escape_time: Option<f64>,
}

impl DirectionEvidence {
    fn stayed(&self) -> bool {
        self.exit_time.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitVerdict {
    pub class: OrbitClass,
    pub start: Vec<f64>,
    pub horizon: f64,
    pub eps_t: f64,
    pub forward: DirectionEvidence,
    pub backward: DirectionEvidence,
}

fn watch_direction<F: VectorField + ?Sized>(
    field: &F,
    start: &[f64],
    direction: Direction,
    cfg: &ClassifyConfig,
) -> Result<DirectionEvidence, FlowError> {
    let mut max_dist = torus_distance(start);
    let mut exit: Option<(f64, f64)> = None;
    if !cfg.region.contains(start) {
        exit = Some((0.0, start[start.len() - 1]));
    }
    let summary = run(field, start, cfg.horizon, direction, &cfg.opts, &[], |step| {
        probe_points(step, |t, p| {
            max_dist = max_dist.max(torus_distance(p));
            if exit.is_none() && !cfg.region.contains(p) {
                exit = Some((t, p[p.len() - 1]));
            }
        });
        Flow::Continue
    })?;
    let state = summary.state;
    let z = state[state.len() - 1];
    Ok(DirectionEvidence {
        direction,
        t_end: summary.t_end,
        final_z: z,
        start_torus_distance: torus_distance(start),
        final_torus_distance: torus_distance(&state),
        max_torus_distance: max_dist,
        exit_time: exit.map(|e| e.0),
        exit_z: exit.map(|e| e.1),
        escape_time: summary.escape.map(|e| e.t),
        final_state: state,
    })
}

/// Horizon-based classification of the orbit through `start`.
///
/// - on-torus: within `eps_t` of the torus over the horizon in both directions;
/// - forward-trapped: forward orbit stays in the region, backward orbit leaves it below `-z_full`;
/// - backward-trapped: the mirror statement;
/// - bi-escaping: both directions leave the region;
/// - otherwise horizon-inconclusive.
pub fn classify_orbit<F: VectorField + ?Sized>(
    field: &F,
    start: &[f64],
    cfg: &ClassifyConfig,
) -> Result<OrbitVerdict, FlowError> {
    if !(cfg.horizon > 0.0) {
        return Err(FlowError::InvalidArgument(format!("horizon {} must be positive", cfg.horizon)));
    }
    let forward = watch_direction(field, start, Direction::Forward, cfg)?;
    let backward = watch_direction(field, start, Direction::Backward, cfg)?;
    let below = |e: &DirectionEvidence| e.exit_z.is_some_and(|z| z < -cfg.z_full) || e.final_z < -cfg.z_full;
    let above = |e: &DirectionEvidence| e.exit_z.is_some_and(|z| z > cfg.z_full) || e.final_z > cfg.z_full;
    let class = if forward.max_torus_distance < cfg.eps_t && backward.max_torus_distance < cfg.eps_t {
        OrbitClass::OnTorus
    } else if forward.stayed() && !backward.stayed() && below(&backward) {
        OrbitClass::ForwardTrapped
    } else if backward.stayed() && !forward.stayed() && above(&forward) {
        OrbitClass::BackwardTrapped
    } else if !forward.stayed() && !backward.stayed() {
        OrbitClass::BiEscaping
    } else {
        OrbitClass::HorizonInconclusive
    };
    Ok(OrbitVerdict {
        class,
        start: start.to_vec(),
        horizon: cfg.horizon,
        eps_t: cfg.eps_t,
        forward,
        backward,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationEstimate {
    /// Unwrapped `theta_2` advance over unwrapped `theta_1` advance.
    pub rho: f64,
    /// Number of `theta_1` revolutions.
    pub horizon: u64,
    pub error_bound: f64,
    pub time: f64,
    pub max_drift: f64,
    pub steps: usize,
}

fn angle(p: &[f64], j: usize) -> f64 {
    p[2 * j + 1].atan2(p[2 * j])
}

fn unwrap_near(reference: f64, wrapped: f64) -> f64 {
    reference + (wrapped - reference + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI
}

/// Rotation number of the orbit through a point of the torus after
/// `revolutions` full turns of `theta_1`. Aborts if the orbit drifts more
/// than `10 eps_t` from the torus.
pub fn rotation_number<F: VectorField + ?Sized>(
    field: &F,
    start: &[f64],
    revolutions: u64,
    eps_t: f64,
    opts: &Dopri5Options,
) -> Result<RotationEstimate, FlowError> {
    if start.len() < 5 {
        return Err(FlowError::InvalidArgument("rotation number needs n >= 2".into()));
    }
    if revolutions == 0 {
        return Err(FlowError::InvalidArgument("revolutions must be positive".into()));
    }
    let d0 = torus_distance(start);
    if d0 > eps_t {
        return Err(FlowError::InvalidArgument(format!(
            "start is {d0:e} from the torus, more than eps_t = {eps_t:e}"
        )));
    }
    let limit = 10.0 * eps_t;
    let target = TAU * revolutions as f64;
    let th0 = [angle(start, 0), angle(start, 1)];
    let mut unwrapped = th0;
    let mut max_drift = d0;
    let mut steps = 0usize;
    let mut result: Option<(f64, f64, f64)> = None;
    let mut drift: Option<(f64, f64)> = None;
    run(field, start, f64::INFINITY, Direction::Forward, opts, &[], |step| {
        steps += 1;
        let d = torus_distance(step.y1);
        max_drift = max_drift.max(d);
        if d > limit {
            drift = Some((step.t1, d));
            return Flow::Stop;
        }
        let next = [
            unwrap_near(unwrapped[0], angle(step.y1, 0)),
            unwrap_near(unwrapped[1], angle(step.y1, 1)),
        ];
        if next[0] - th0[0] >= target {
            let base = unwrapped;
            let (t, p) = bisect_event(step, step.t0, step.t1, |p| {
                unwrap_near(base[0], angle(p, 0)) - th0[0] - target
            });
            let a1 = unwrap_near(base[0], angle(&p, 0)) - th0[0];
            let a2 = unwrap_near(base[1], angle(&p, 1)) - th0[1];
            result = Some((t, a1, a2));
            return Flow::Stop;
        }
        unwrapped = next;
        Flow::Continue
    })?;
    if let Some((t, d)) = drift {
        return Err(FlowError::TorusDrift { t, distance: d, limit });
    }
    let (time, a1, a2) = result.ok_or_else(|| FlowError::InvalidArgument("theta_1 does not advance".into()))?;
    Ok(RotationEstimate {
        rho: a2 / a1,
        horizon: revolutions,
        error_bound: 2.0 / revolutions as f64,
        time,
        max_drift,
        steps,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanConfig {
    pub region: BoxRegion,
    /// Grid points per axis (cell centres).
    pub per_axis: usize,
    pub horizon: f64,
    pub return_tol: f64,
    pub t_min: f64,
    /// Starts closer than this to the torus are dropped.
    pub tube: f64,
    /// Low-discrepancy starts drawn from `focus_region`, where `H` is not
    /// identically 1; dropped inside the tube like grid starts.
    pub focus_starts: usize,
    pub focus_region: BoxRegion,
    pub seed: u64,
    /// Additional starts, scanned even inside the tube.
    pub extra_starts: Vec<Vec<f64>>,
    pub opts: Dopri5Options,
    /// Recurrences kept per start.
    pub max_hits: usize,
}

impl ScanConfig {
    pub fn new(n: usize) -> Self {
        Self {
            region: BoxRegion::cube(2 * n + 1, 4.0),
            per_axis: 4,
            horizon: 200.0,
            return_tol: 1e-4,
            t_min: 0.5,
            tube: 1e-6,
            focus_starts: 1000,
            focus_region: BoxRegion::slab(n, 2.5, 2.0),
            seed: 1,
            extra_starts: Vec::new(),
            opts: Dopri5Options::with_tol(1e-9),
            max_hits: 8,
        }
    }

    pub fn grid(&self) -> Vec<Vec<f64>> {
        let dim = self.region.dim();
        let total = self.per_axis.pow(dim as u32);
        (0..total)
            .map(|mut idx| {
                (0..dim)
                    .map(|a| {
                        let k = idx % self.per_axis;
                        idx /= self.per_axis;
                        let lo = self.region.lo[a];
                        let w = (self.region.hi[a] - lo) / self.per_axis as f64;
                        lo + (k as f64 + 0.5) * w
                    })
                    .collect()
            })
            .collect()
    }

    pub fn focus(&self) -> Vec<Vec<f64>> {
        let mut h = Halton::new(self.focus_region.dim(), self.seed);
        (0..self.focus_starts).map(|_| self.focus_region.scale(&h.next_point())).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recurrence {
    pub start_index: usize,
    pub start: Vec<f64>,
    pub t: f64,
    pub distance: f64,
    /// The start lies within the tube: quasi-periodic motion on the torus, not a periodic orbit.
    pub on_torus: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartOutcome {
    pub index: usize,
    pub start: Vec<f64>,
    pub z_gain: f64,
    /// Closest return to the start after `t_min`.
    pub closest_return: f64,
    pub closest_return_t: f64,
    pub hits: Vec<Recurrence>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanReport {
    pub config: ScanConfig,
    pub starts: usize,
    pub excluded: usize,
    /// Recurrences from starts off the torus; the expected list is empty.
    pub recurrences: Vec<Recurrence>,
    /// Recurrences flagged on-torus, quasi-periodic.
    pub torus_recurrences: Vec<Recurrence>,
    pub min_z_gain: f64,
    pub min_z_gain_start: Vec<f64>,
    pub min_return_distance: f64,
    pub failures: Vec<(usize, String)>,
}

impl ScanReport {
    pub fn passed(&self) -> bool {
        self.recurrences.is_empty() && self.min_z_gain > 0.0 && self.failures.is_empty()
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn scan_one<F: VectorField + ?Sized>(field: &F, index: usize, start: &[f64], cfg: &ScanConfig) -> StartOutcome {
    let on_torus = torus_distance(start) < cfg.tube;
    let mut hits: Vec<Recurrence> = Vec::new();
    let mut closest = (f64::INFINITY, f64::NAN);
    // a new hit needs the orbit to have left the return ball since the last one
    let mut armed = false;
    let mut last_hit = f64::NEG_INFINITY;
    let mut buf = vec![0.0; start.len()];
    let mut probes = [(0.0f64, 0.0f64); DENSE_PROBES + 1];
    let res = run(field, start, cfg.horizon, Direction::Forward, &cfg.opts, &[], |step| {
        let h = step.t1 - step.t0;
        for (k, slot) in probes.iter_mut().enumerate() {
            let t = step.t0 + h * k as f64 / DENSE_PROBES as f64;
            match k {
                0 => buf.copy_from_slice(step.y0),
                DENSE_PROBES => buf.copy_from_slice(step.y1),
                _ => step.eval(t, &mut buf),
            }
            *slot = (t, dist(&buf, start));
        }
        let (kmin, &(tp, dp)) = probes
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .expect("probes are nonempty");
        // the distance moves by at most the chord between neighbouring probes
        let chord = dist(step.y0, step.y1);
        let (mut tm, mut dm) = (tp, dp);
        if dp < cfg.return_tol + chord {
            let lo = probes[kmin.saturating_sub(1)].0;
            let hi = probes[(kmin + 1).min(DENSE_PROBES)].0;
            let (tg, dg) = golden_min(step, start, lo, hi);
            if dg < dm {
                (tm, dm) = (tg, dg);
            }
        }
        if tm > cfg.t_min {
            if dm < closest.0 {
                closest = (dm, tm);
            }
            if dm < cfg.return_tol && armed && hits.len() < cfg.max_hits {
                hits.push(Recurrence {
                    start_index: index,
                    start: start.to_vec(),
                    t: tm,
                    distance: dm,
                    on_torus,
                });
                armed = false;
                last_hit = tm;
            }
        }
        if probes.iter().any(|&(t, d)| t > last_hit && d > 2.0 * cfg.return_tol) {
            armed = true;
        }
        Flow::Continue
    });
    match res {
        Ok(summary) => StartOutcome {
            index,
            start: start.to_vec(),
            z_gain: summary.state[start.len() - 1] - start[start.len() - 1],
            closest_return: closest.0,
            closest_return_t: closest.1,
            hits,
            error: None,
        },
        Err(e) => StartOutcome {
            index,
            start: start.to_vec(),
            z_gain: f64::NAN,
            closest_return: closest.0,
            closest_return_t: closest.1,
            hits,
            error: Some(e.to_string()),
        },
    }
}

fn golden_min(step: &StepRecord, start: &[f64], mut a: f64, mut b: f64) -> (f64, f64) {
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let mut buf = vec![0.0; start.len()];
    let mut f = |t: f64| {
        step.eval(t, &mut buf);
        dist(&buf, start)
    };
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Integrate forward from every grid start (and the extra starts) and record
/// returns to within `return_tol` of the start after `t_min`.
pub fn scan_periodic<F: VectorField + ?Sized>(field: &F, cfg: &ScanConfig) -> ScanReport {
    let mut candidates = cfg.grid();
    candidates.extend(cfg.focus());
    let total = candidates.len();
    let mut starts: Vec<Vec<f64>> = candidates.into_iter().filter(|p| torus_distance(p) >= cfg.tube).collect();
    let excluded = total - starts.len();
    starts.extend(cfg.extra_starts.iter().cloned());

    let outcomes: Vec<StartOutcome> = starts
        .par_iter()
        .enumerate()
        .map(|(i, s)| scan_one(field, i, s, cfg))
        .collect();

    let mut report = ScanReport {
        config: cfg.clone(),
        starts: outcomes.len(),
        excluded,
        recurrences: Vec::new(),
        torus_recurrences: Vec::new(),
        min_z_gain: f64::INFINITY,
        min_z_gain_start: Vec::new(),
        min_return_distance: f64::INFINITY,
        failures: Vec::new(),
    };
    for o in outcomes {
        if let Some(e) = o.error {
            report.failures.push((o.index, e));
            continue;
        }
        let on_torus = torus_distance(&o.start) < cfg.tube;
        if !on_torus {
            if o.z_gain < report.min_z_gain || report.min_z_gain_start.is_empty() {
                report.min_z_gain = o.z_gain;
                report.min_z_gain_start = o.start.clone();
            }
            report.min_return_distance = report.min_return_distance.min(o.closest_return);
        }
        for h in o.hits {
            if h.on_torus {
                report.torus_recurrences.push(h);
            } else {
                report.recurrences.push(h);
            }
        }
    }
    report
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    /// The hyperplane is `z = -z0`.
    pub z0: f64,
    pub rho: Vec<f64>,
    pub horizon: f64,
    pub opts: Dopri5Options,
}

impl SweepConfig {
    /// `steps` values from `rho_max` down to `rho_min`, inclusive.
    pub fn linear(z0: f64, rho_min: f64, rho_max: f64, steps: usize, horizon: f64) -> Self {
        let rho = if steps <= 1 {
            vec![rho_max]
        } else {
            (0..steps)
                .map(|k| rho_max - (rho_max - rho_min) * k as f64 / (steps - 1) as f64)
                .collect()
        };
        Self {
            z0,
            rho,
            horizon,
            opts: Dopri5Options::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub rho: f64,
    /// Time to reach `z > 0`, if within the horizon.
    pub crossing_time: Option<f64>,
    pub final_z: f64,
    /// Largest `|r_j - rho|` along the orbit before the crossing.
    pub max_radial_change: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// Crossing times finite and strictly increasing as `rho` decreases over
    /// the rows with `rho >= rho_floor`.
    pub fn monotone_down_to(&self, rho_floor: f64) -> bool {
        let mut rows: Vec<&SweepRow> = self.rows.iter().filter(|r| r.rho >= rho_floor).collect();
        rows.sort_by(|a, b| b.rho.total_cmp(&a.rho));
        rows.iter().all(|r| r.crossing_time.is_some())
            && rows.windows(2).all(|w| w[1].crossing_time > w[0].crossing_time)
    }

    pub fn row(&self, rho: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| (r.rho - rho).abs() < 1e-12)
    }
}

fn sweep_one<F: VectorField + ?Sized>(field: &F, rho: f64, cfg: &SweepConfig) -> SweepRow {
    let dim = field.dim();
    let n = (dim - 1) / 2;
    let mut start = vec![0.0; dim];
    for j in 0..n {
        start[2 * j] = rho;
    }
    start[dim - 1] = -cfg.z0;
    let mut crossing = None;
    let mut max_dr = 0.0f64;
    let res = run(field, &start, cfg.horizon, Direction::Forward, &cfg.opts, &[], |step| {
        let z1 = step.y1[dim - 1];
        for j in 0..n {
            let r = step.y1[2 * j].hypot(step.y1[2 * j + 1]);
            max_dr = max_dr.max((r - rho).abs());
        }
        if z1 > 0.0 {
            let (t, _) = bisect_event(step, step.t0, step.t1, |p| p[dim - 1]);
            crossing = Some(t);
            return Flow::Stop;
        }
        Flow::Continue
    });
    match res {
        Ok(s) => SweepRow {
            rho,
            crossing_time: crossing,
            final_z: s.state[dim - 1],
            max_radial_change: max_dr,
            error: None,
        },
        Err(e) => SweepRow {
            rho,
            crossing_time: None,
            final_z: f64::NAN,
            max_radial_change: max_dr,
            error: Some(e.to_string()),
        },
    }
}

/// Starts on `z = -z0` with all `r_j = rho`; time to reach `z > 0`.
pub fn hyperplane_sweep<F: VectorField + ?Sized>(field: &F, cfg: &SweepConfig) -> SweepReport {
    let rows = cfg.rho.par_iter().map(|&rho| sweep_one(field, rho, cfg)).collect();
    SweepReport {
        config: cfg.clone(),
        rows,
    }
}
