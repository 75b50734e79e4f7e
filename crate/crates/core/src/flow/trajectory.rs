use serde::{Deserialize, Serialize};

use crate::error::FlowError;
use crate::hamiltonian::Hamiltonian;
use crate::point::{torus_distance, ReducedPoint};

use super::field::{ReducedField, VectorField};
use super::integrator::{rk4_run, run, Dopri5Options, Escape, Flow, StepKind};
use super::Direction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// Signed time.
    pub t: f64,
    pub state: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepMeta {
    pub t: f64,
    pub kind: StepKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateLayout {
    /// `[x_1, y_1, ..., x_n, y_n, z]`
    Cartesian,
    /// `[r_1, ..., r_n, theta_1, ..., theta_n, z]`
    Reduced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub direction: Direction,
    pub layout: StateLayout,
    pub tol: f64,
    pub samples: Vec<Sample>,
    /// One entry per accepted step, ending at `t`.
    pub steps: Vec<StepMeta>,
    pub escape: Option<Escape>,
    pub rejected: usize,
    pub evaluations: usize,
}

impl Trajectory {
    pub fn start(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least the start sample")
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn z(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.state[s.state.len() - 1]).collect()
    }

    pub fn dim(&self) -> usize {
        self.samples[0].state.len()
    }

    pub fn n(&self) -> usize {
        (self.dim() - 1) / 2
    }

    /// Planar radii of a sample.
    pub fn radii(&self, i: usize) -> Vec<f64> {
        let s = &self.samples[i].state;
        let n = self.n();
        match self.layout {
            StateLayout::Cartesian => (0..n).map(|j| s[2 * j].hypot(s[2 * j + 1])).collect(),
            StateLayout::Reduced => s[..n].to_vec(),
        }
    }

    /// `(r_1, ..., r_n, z)` of a sample.
    pub fn shadow(&self, i: usize) -> Vec<f64> {
        let mut v = self.radii(i);
        v.push(self.samples[i].state[self.dim() - 1]);
        v
    }

    pub fn torus_distance(&self, i: usize) -> f64 {
        match self.layout {
            StateLayout::Cartesian => torus_distance(&self.samples[i].state),
            StateLayout::Reduced => {
                let v = self.shadow(i);
                let z = v[v.len() - 1].abs();
                v[..v.len() - 1].iter().fold(z, |m, r| m.max((r - 1.0).abs()))
            }
        }
    }

    pub fn max_torus_distance(&self) -> f64 {
        (0..self.samples.len()).map(|i| self.torus_distance(i)).fold(0.0, f64::max)
    }

    /// Times strictly monotone in the stated direction.
    pub fn time_monotone(&self) -> bool {
        let sign = self.direction.sign();
        self.samples.windows(2).all(|w| sign * (w[1].t - w[0].t) > 0.0)
    }
}

struct Recorder {
    samples: Vec<Sample>,
    steps: Vec<StepMeta>,
}

impl Recorder {
    fn new(start: &[f64]) -> Self {
        Self {
            samples: vec![Sample {
                t: 0.0,
                state: start.to_vec(),
            }],
            steps: Vec::new(),
        }
    }

    fn finish(
        self,
        direction: Direction,
        layout: StateLayout,
        tol: f64,
        summary: super::RunSummary,
    ) -> Trajectory {
        Trajectory {
            direction,
            layout,
            tol,
            samples: self.samples,
            steps: self.steps,
            escape: summary.escape,
            rejected: summary.rejected,
            evaluations: summary.evaluations,
        }
    }
}

/// Integrate and record every accepted step endpoint.
pub fn integrate<F: VectorField + ?Sized>(
    field: &F,
    start: &[f64],
    t_span: f64,
    direction: Direction,
    opts: &Dopri5Options,
) -> Result<Trajectory, FlowError> {
    let mut rec = Recorder::new(start);
    let summary = run(field, start, t_span, direction, opts, &[], |step| {
        rec.samples.push(Sample {
            t: step.t1,
            state: step.y1.to_vec(),
        });
        rec.steps.push(StepMeta {
            t: step.t1,
            kind: step.kind,
        });
        Flow::Continue
    })?;
    Ok(rec.finish(direction, StateLayout::Cartesian, opts.tol, summary))
}

/// Integrate and record the state exactly at the given elapsed times
/// (ascending, nonnegative) only.
pub fn integrate_with<F: VectorField + ?Sized>(
    field: &F,
    start: &[f64],
    times: &[f64],
    direction: Direction,
    opts: &Dopri5Options,
) -> Result<Trajectory, FlowError> {
    if times.windows(2).any(|w| w[1] <= w[0]) || times.iter().any(|t| !(*t >= 0.0)) {
        return Err(FlowError::InvalidArgument("output times must be ascending and >= 0".into()));
    }
    let t_span = times.last().copied().unwrap_or(0.0);
    let sign = direction.sign();
    let mut rec = Recorder::new(start);
    let mut next = times.iter().position(|t| *t > 0.0).unwrap_or(times.len());
    let summary = run(field, start, t_span, direction, opts, times, |step| {
        rec.steps.push(StepMeta {
            t: step.t1,
            kind: step.kind,
        });
        while next < times.len() && sign * step.t1 >= times[next] {
            let mut out = vec![0.0; step.y0.len()];
            if sign * step.t1 == times[next] {
                out.copy_from_slice(step.y1);
            } else {
                step.eval(sign * times[next], &mut out);
            }
            rec.samples.push(Sample {
                t: sign * times[next],
                state: out,
            });
            next += 1;
        }
        Flow::Continue
    })?;
    Ok(rec.finish(direction, StateLayout::Cartesian, opts.tol, summary))
}

/// Integrate the symmetry-reduced system from `(r, z)` with all angles 0.
pub fn integrate_reduced<H: Hamiltonian>(
    field: &ReducedField<H>,
    start: &ReducedPoint,
    t_span: f64,
    direction: Direction,
    opts: &Dopri5Options,
) -> Result<Trajectory, FlowError> {
    if start.r.iter().any(|r| !(*r >= 0.0)) {
        return Err(FlowError::InvalidArgument("reduced radii must be >= 0".into()));
    }
    let n = start.r.len();
    let mut state = start.r.clone();
    state.extend(std::iter::repeat(0.0).take(n));
    state.push(start.z);
    let mut traj = integrate(field, &state, t_span, direction, opts)?;
    traj.layout = StateLayout::Reduced;
    Ok(traj)
}

/// Fixed-step classical RK4 trajectory.
pub fn rk4_trajectory<F: VectorField + ?Sized>(
    field: &F,
    start: &[f64],
    t_span: f64,
    direction: Direction,
    h: f64,
) -> Result<Trajectory, FlowError> {
    let mut samples = Vec::new();
    let mut steps = Vec::new();
    let mut prev = 0.0f64;
    rk4_run(field, start, t_span, direction, h, |t, y| {
        if !samples.is_empty() {
            steps.push(StepMeta {
                t,
                kind: StepKind::Numerical {
                    h: (t - prev).abs(),
                    error: f64::NAN,
                },
            });
        }
        prev = t;
        samples.push(Sample { t, state: y.to_vec() });
    })?;
    let evaluations = 4 * steps.len();
    Ok(Trajectory {
        direction,
        layout: StateLayout::Cartesian,
        tol: f64::NAN,
        samples,
        steps,
        escape: None,
        rejected: 0,
        evaluations,
    })
}
