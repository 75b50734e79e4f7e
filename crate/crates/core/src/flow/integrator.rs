//! Dormand-Prince 5(4) with the standard fourth-order continuous extension.
//!
//! The driver integrates in elapsed time `tau >= 0`; backward runs use the
//! field `-X` and report signed times `t = -tau`. Whenever the field declares
//! free flight the state is advanced exactly by `±len ∂_z` instead of stepping.

use crate::error::FlowError;

use super::field::VectorField;
use super::Direction;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Dopri5Options {
    /// Mixed absolute/relative local error target per step.
    pub tol: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            h_max: 0.5,
            h_min: 1e-13,
            h_init: None,
            max_steps: 50_000_000,
        }
    }
}

impl Dopri5Options {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StepKind {
    /// Accepted Runge-Kutta step with its normalized error estimate (<= 1).
    Numerical { h: f64, error: f64 },
    /// Exact translation along `∂_z`.
    FreeFlight,
}

/// One accepted step, with dense output over it.
pub struct StepRecord<'a> {
    pub kind: StepKind,
    /// Signed start time.
    pub t0: f64,
    /// Signed end time.
    pub t1: f64,
    pub y0: &'a [f64],
    pub y1: &'a [f64],
    dense: &'a [f64],
}

impl StepRecord<'_> {
    /// State at fraction `theta` in `[0, 1]` of the step.
    pub fn eval_fraction(&self, theta: f64, out: &mut [f64]) {
        let dim = self.y0.len();
        let th1 = 1.0 - theta;
        for i in 0..dim {
            let r1 = self.dense[i];
            let r2 = self.dense[dim + i];
            let r3 = self.dense[2 * dim + i];
            let r4 = self.dense[3 * dim + i];
            let r5 = self.dense[4 * dim + i];
            out[i] = r1 + theta * (r2 + th1 * (r3 + theta * (r4 + th1 * r5)));
        }
    }

    /// State at signed time `t` in `[t0, t1]`.
    pub fn eval(&self, t: f64, out: &mut [f64]) {
        let span = self.t1 - self.t0;
        let theta = if span == 0.0 { 1.0 } else { (t - self.t0) / span };
        self.eval_fraction(theta.clamp(0.0, 1.0), out);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Escape {
    /// Signed time from which the flow is pure translation.
    pub t: f64,
    pub state: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    /// Signed final time.
    pub t_end: f64,
    pub state: Vec<f64>,
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub escape: Option<Escape>,
    pub stopped_by_observer: bool,
}

fn rms_norm(v: &[f64], y0: &[f64], y1: &[f64], tol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..v.len() {
        let sc = tol + tol * y0[i].abs().max(y1[i].abs());
        let r = v[i] / sc;
        acc += r * r;
    }
    (acc / v.len() as f64).sqrt()
}

/// Integrate `field` from `start` for elapsed time `t_span` (may be infinite
/// when the observer stops the run), landing exactly on every elapsed time in
/// `stops` (ascending).
pub fn run<F: VectorField + ?Sized>(
    field: &F,
    start: &[f64],
    t_span: f64,
    direction: Direction,
    opts: &Dopri5Options,
    stops: &[f64],
    mut observer: impl FnMut(&StepRecord) -> Flow,
) -> Result<RunSummary, FlowError> {
    let dim = field.dim();
    if start.len() != dim {
        return Err(FlowError::InvalidArgument(format!(
            "start has {} coordinates, field expects {dim}",
            start.len()
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(FlowError::InvalidArgument(format!("tol = {} must be positive", opts.tol)));
    }
    if !(t_span >= 0.0) {
        return Err(FlowError::InvalidArgument(format!("t_span = {t_span} must be >= 0")));
    }
    if start.iter().any(|v| !v.is_finite()) {
        return Err(FlowError::NonFinite { t: 0.0 });
    }

    let sign = direction.sign();
    let tol = opts.tol;
    let mut y = start.to_vec();
    let mut y1 = vec![0.0; dim];
    let mut ytmp = vec![0.0; dim];
    let mut k = vec![vec![0.0; dim]; 7];
    let mut errv = vec![0.0; dim];
    let mut dense = vec![0.0; 5 * dim];
    let mut evaluations = 0usize;

    let mut eval = |p: &[f64], out: &mut [f64], evals: &mut usize| {
        field.eval(p, out);
        *evals += 1;
        if sign < 0.0 {
            for v in out.iter_mut() {
                *v = -*v;
            }
        }
    };

    let mut tau = 0.0f64;
    let mut need_k1 = true;
    let mut h_prop = opts.h_init.unwrap_or(0.0);
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut escape: Option<Escape> = None;
    let mut stop_idx = 0usize;
    let mut stopped = false;

    while tau < t_span {
        while stop_idx < stops.len() && stops[stop_idx] <= tau {
            stop_idx += 1;
        }
        let target = if stop_idx < stops.len() {
            stops[stop_idx].min(t_span)
        } else {
            t_span
        };

        let ff = field.free_flight(&y, direction);
        if ff > 1e-12 {
            if ff.is_infinite() && escape.is_none() {
                escape = Some(Escape {
                    t: sign * tau,
                    state: y.clone(),
                });
            }
            let len = ff.min(target - tau);
            if len.is_infinite() {
                // escaped with nothing left to observe
                break;
            }
            y1.copy_from_slice(&y);
            y1[dim - 1] += sign * len;
            dense.iter_mut().for_each(|v| *v = 0.0);
            dense[..dim].copy_from_slice(&y);
            for i in 0..dim {
                dense[dim + i] = y1[i] - y[i];
            }
            let t_next = if len == target - tau { target } else { tau + len };
            let rec = StepRecord {
                kind: StepKind::FreeFlight,
                t0: sign * tau,
                t1: sign * t_next,
                y0: &y,
                y1: &y1,
                dense: &dense,
            };
            let flow = observer(&rec);
            tau = t_next;
            std::mem::swap(&mut y, &mut y1);
            need_k1 = true;
            if flow == Flow::Stop {
                stopped = true;
                break;
            }
            continue;
        }

        if need_k1 {
            let (head, _) = k.split_at_mut(1);
            eval(&y, &mut head[0], &mut evaluations);
            if head[0].iter().any(|v| !v.is_finite()) {
                return Err(FlowError::NonFinite { t: sign * tau });
            }
            need_k1 = false;
            if h_prop <= 0.0 {
                h_prop = initial_step(&mut eval, &y, &k[0], tol, opts.h_max, &mut evaluations);
            }
        }

        let mut h = h_prop.min(opts.h_max);
        let clipped = h >= target - tau;
        if clipped {
            h = target - tau;
        }

        // attempt until accepted
        let err = loop {
            if h < opts.h_min && h < target - tau {
                return Err(FlowError::StepUnderflow {
                    t: sign * tau,
                    h,
                    state: y.clone(),
                });
            }
            for i in 0..dim {
                ytmp[i] = y[i] + h * A21 * k[0][i];
            }
            eval(&ytmp, &mut k[1], &mut evaluations);
            for i in 0..dim {
                ytmp[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i]);
            }
            eval(&ytmp, &mut k[2], &mut evaluations);
            for i in 0..dim {
                ytmp[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
            }
            eval(&ytmp, &mut k[3], &mut evaluations);
            for i in 0..dim {
                ytmp[i] = y[i]
                    + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
            }
            eval(&ytmp, &mut k[4], &mut evaluations);
            for i in 0..dim {
                ytmp[i] = y[i]
                    + h * (A61 * k[0][i]
                        + A62 * k[1][i]
                        + A63 * k[2][i]
                        + A64 * k[3][i]
                        + A65 * k[4][i]);
            }
            eval(&ytmp, &mut k[5], &mut evaluations);
            for i in 0..dim {
                y1[i] = y[i]
                    + h * (A71 * k[0][i]
                        + A73 * k[2][i]
                        + A74 * k[3][i]
                        + A75 * k[4][i]
                        + A76 * k[5][i]);
            }
            eval(&y1, &mut k[6], &mut evaluations);
            for i in 0..dim {
                errv[i] = h
                    * (E1 * k[0][i]
                        + E3 * k[2][i]
                        + E4 * k[3][i]
                        + E5 * k[4][i]
                        + E6 * k[5][i]
                        + E7 * k[6][i]);
            }
            let err = rms_norm(&errv, &y, &y1, tol);
            if err <= 1.0 {
                break err;
            }
            rejected += 1;
            let fac = if err.is_finite() {
                (0.9 * err.powf(-0.2)).max(0.2)
            } else {
                0.1
            };
            h *= fac;
        };

        for i in 0..dim {
            let ydiff = y1[i] - y[i];
            let bspl = h * k[0][i] - ydiff;
            dense[i] = y[i];
            dense[dim + i] = ydiff;
            dense[2 * dim + i] = bspl;
            dense[3 * dim + i] = ydiff - h * k[6][i] - bspl;
            dense[4 * dim + i] = h
                * (D1 * k[0][i]
                    + D3 * k[2][i]
                    + D4 * k[3][i]
                    + D5 * k[4][i]
                    + D6 * k[5][i]
                    + D7 * k[6][i]);
        }
        let landed = h == target - tau;
        let t_next = if landed { target } else { tau + h };
        let rec = StepRecord {
            kind: StepKind::Numerical { h, error: err },
            t0: sign * tau,
            t1: sign * t_next,
            y0: &y,
            y1: &y1,
            dense: &dense,
        };
        let flow = observer(&rec);
        accepted += 1;
        tau = t_next;
        std::mem::swap(&mut y, &mut y1);
        let (k1, rest) = k.split_at_mut(1);
        k1[0].copy_from_slice(&rest[5]);

        let grow = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
        let next = h * grow;
        h_prop = if clipped { next.max(h_prop) } else { next };

        if flow == Flow::Stop {
            stopped = true;
            break;
        }
        if accepted >= opts.max_steps {
            return Err(FlowError::StepBudget {
                t: sign * tau,
                max_steps: opts.max_steps,
            });
        }
    }

    Ok(RunSummary {
        t_end: sign * tau,
        state: y,
        accepted,
        rejected,
        evaluations,
        escape,
        stopped_by_observer: stopped,
    })
}

fn initial_step(
    eval: &mut impl FnMut(&[f64], &mut [f64], &mut usize),
    y: &[f64],
    f0: &[f64],
    tol: f64,
    h_max: f64,
    evals: &mut usize,
) -> f64 {
    let dim = y.len();
    let norm = |v: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..dim {
            let r = v[i] / (tol + tol * y[i].abs());
            acc += r * r;
        }
        (acc / dim as f64).sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(h_max);
    let y1: Vec<f64> = (0..dim).map(|i| y[i] + h0 * f0[i]).collect();
    let mut f1 = vec![0.0; dim];
    eval(&y1, &mut f1, evals);
    let diff: Vec<f64> = (0..dim).map(|i| f1[i] - f0[i]).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(h_max)
}

/// Classical fixed-step fourth-order Runge-Kutta; cross-check path.
pub fn rk4_run<F: VectorField + ?Sized>(
    field: &F,
    start: &[f64],
    t_span: f64,
    direction: Direction,
    h: f64,
    mut observer: impl FnMut(f64, &[f64]),
) -> Result<Vec<f64>, FlowError> {
    if !(h > 0.0) {
        return Err(FlowError::InvalidArgument(format!("step {h} must be positive")));
    }
    let dim = field.dim();
    let sign = direction.sign();
    let steps = (t_span / h).ceil().max(1.0) as usize;
    let h = t_span / steps as f64;
    let mut y = start.to_vec();
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];
    observer(0.0, &y);
    for step in 0..steps {
        field.eval(&y, &mut k1);
        for i in 0..dim {
            tmp[i] = y[i] + 0.5 * sign * h * k1[i];
        }
        field.eval(&tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = y[i] + 0.5 * sign * h * k2[i];
        }
        field.eval(&tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = y[i] + sign * h * k3[i];
        }
        field.eval(&tmp, &mut k4);
        for i in 0..dim {
            y[i] += sign * h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(FlowError::NonFinite {
                t: sign * h * (step + 1) as f64,
            });
        }
        observer(sign * h * (step + 1) as f64, &y);
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// y' = A y with a rotation-plus-decay block and a linear z; exact solution known.
    struct Linear;
    impl VectorField for Linear {
        fn dim(&self) -> usize {
            3
        }
        fn eval(&self, p: &[f64], out: &mut [f64]) {
            out[0] = -0.1 * p[0] - p[1];
            out[1] = p[0] - 0.1 * p[1];
            out[2] = 1.0;
        }
    }

    fn exact(t: f64) -> [f64; 3] {
        let d = (-0.1 * t).exp();
        [d * t.cos(), d * t.sin(), t]
    }

    #[test]
    fn dopri_matches_exact_solution() {
        let opts = Dopri5Options::with_tol(1e-10);
        let sum = run(&Linear, &[1.0, 0.0, 0.0], 10.0, Direction::Forward, &opts, &[], |_| Flow::Continue).unwrap();
        let want = exact(10.0);
        for i in 0..3 {
            assert!((sum.state[i] - want[i]).abs() < 1e-8, "{:?} vs {want:?}", sum.state);
        }
        assert_eq!(sum.t_end, 10.0);
    }

    #[test]
    fn dense_output_is_accurate() {
        let opts = Dopri5Options { tol: 1e-9, h_max: 0.5, ..Default::default() };
        let mut worst = 0.0f64;
        let mut out = [0.0; 3];
        run(&Linear, &[1.0, 0.0, 0.0], 5.0, Direction::Forward, &opts, &[], |rec| {
            for k in 1..10 {
                let t = rec.t0 + (rec.t1 - rec.t0) * k as f64 / 10.0;
                rec.eval(t, &mut out);
                let want = exact(t);
                for i in 0..3 {
                    worst = worst.max((out[i] - want[i]).abs());
                }
            }
            Flow::Continue
        })
        .unwrap();
        assert!(worst < 1e-7, "{worst}");
    }

    #[test]
    fn backward_run_reports_negative_times() {
        let opts = Dopri5Options::with_tol(1e-10);
        let mut last = 0.0;
        let sum = run(&Linear, &[1.0, 0.0, 0.0], 3.0, Direction::Backward, &opts, &[], |rec| {
            assert!(rec.t1 < rec.t0);
            last = rec.t1;
            Flow::Continue
        })
        .unwrap();
        assert_eq!(sum.t_end, -3.0);
        assert_eq!(last, -3.0);
        let want = exact(-3.0);
        for i in 0..3 {
            assert!((sum.state[i] - want[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn lands_on_stop_times() {
        let opts = Dopri5Options::with_tol(1e-8);
        let stops = [0.3, 1.0, 2.5];
        let mut ends = Vec::new();
        run(&Linear, &[1.0, 0.0, 0.0], 3.0, Direction::Forward, &opts, &stops, |rec| {
            ends.push(rec.t1);
            Flow::Continue
        })
        .unwrap();
        for s in stops {
            assert!(ends.contains(&s), "{s} not hit");
        }
    }

    #[test]
    fn rk4_agrees_with_dopri() {
        let y = rk4_run(&Linear, &[1.0, 0.0, 0.0], 5.0, Direction::Forward, 1e-3, |_, _| {}).unwrap();
        let want = exact(5.0);
        for i in 0..3 {
            assert!((y[i] - want[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let opts = Dopri5Options { tol: 0.0, ..Default::default() };
        assert!(run(&Linear, &[1.0, 0.0, 0.0], 1.0, Direction::Forward, &opts, &[], |_| Flow::Continue).is_err());
        let opts = Dopri5Options::default();
        assert!(run(&Linear, &[1.0, 0.0], 1.0, Direction::Forward, &opts, &[], |_| Flow::Continue).is_err());
        assert!(run(&Linear, &[f64::NAN, 0.0, 0.0], 1.0, Direction::Forward, &opts, &[], |_| Flow::Continue).is_err());
    }

    struct Blowup;
    impl VectorField for Blowup {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, p: &[f64], out: &mut [f64]) {
            out[0] = p[0] * p[0];
        }
    }

    #[test]
    fn singular_field_reports_underflow() {
        // y' = y^2 from y = 1 blows up at t = 1
        let opts = Dopri5Options::with_tol(1e-10);
        let res = run(&Blowup, &[1.0], 2.0, Direction::Forward, &opts, &[], |_| Flow::Continue);
        assert!(matches!(res, Err(FlowError::StepUnderflow { .. }) | Err(FlowError::NonFinite { .. })), "{res:?}");
    }
}
