use crate::contact::ContactField;
use crate::hamiltonian::{Hamiltonian, SupportBox};
use crate::point::squared_radii;

use super::Direction;

/// An autonomous vector field on R^dim whose last coordinate is `z`.
pub trait VectorField: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, p: &[f64], out: &mut [f64]);

    /// Time for which the flow from `p` in `direction` is exactly the
    /// translation `p + t ∂_z` (forward time); `INFINITY` if forever, `0.0`
    /// if the point is not in such a region.
    fn free_flight(&self, _p: &[f64], _direction: Direction) -> f64 {
        0.0
    }
}

/// Free-flight time for a field equal to `∂_z` outside `support`, given the
/// largest planar squared radius and the height.
fn support_free_flight(support: &SupportBox, max_u: f64, z: f64, direction: Direction) -> f64 {
    if max_u > support.r_star * support.r_star {
        return f64::INFINITY;
    }
    let zf = support.z_full;
    match direction {
        Direction::Forward if z >= zf => f64::INFINITY,
        Direction::Forward if z <= -zf => -zf - z,
        Direction::Backward if z <= -zf => f64::INFINITY,
        Direction::Backward if z >= zf => z - zf,
        _ => 0.0,
    }
}

impl<H: Hamiltonian> VectorField for ContactField<H> {
    fn dim(&self) -> usize {
        2 * self.n() + 1
    }

    fn eval(&self, p: &[f64], out: &mut [f64]) {
        self.velocity_into(p, out);
    }

    fn free_flight(&self, p: &[f64], direction: Direction) -> f64 {
        match self.hamiltonian().support() {
            Some(support) => {
                let max_u = squared_radii(p).into_iter().fold(0.0, f64::max);
                support_free_flight(&support, max_u, p[p.len() - 1], direction)
            }
            None => 0.0,
        }
    }
}

/// Symmetry-reduced flow on `[r_1, ..., r_n, theta_1, ..., theta_n, z]`:
/// `r_j' = r_j H_z / 2`, `theta_j' = 2 H_{u_j}`, `z' = H - sum_j u_j H_{u_j}`.
/// The angles ride along and do not feed back.
#[derive(Debug, Clone)]
pub struct ReducedField<H> {
    ham: H,
}

impl<H: Hamiltonian> ReducedField<H> {
    pub fn new(ham: H) -> Self {
        Self { ham }
    }

    pub fn hamiltonian(&self) -> &H {
        &self.ham
    }
}

impl<H: Hamiltonian> VectorField for ReducedField<H> {
    fn dim(&self) -> usize {
        2 * self.ham.n() + 1
    }

    fn eval(&self, p: &[f64], out: &mut [f64]) {
        let n = self.ham.n();
        let u: Vec<f64> = p[..n].iter().map(|r| r * r).collect();
        let g = self.ham.radial(&u, p[2 * n]);
        for j in 0..n {
            out[j] = 0.5 * p[j] * g.dz;
            out[n + j] = 2.0 * g.du[j];
        }
        out[2 * n] = g.vertical_rate(&u);
    }

    fn free_flight(&self, p: &[f64], direction: Direction) -> f64 {
        let n = self.ham.n();
        match self.ham.support() {
            Some(support) => {
                let max_u = p[..n].iter().map(|r| r * r).fold(0.0, f64::max);
                support_free_flight(&support, max_u, p[2 * n], direction)
            }
            None => 0.0,
        }
    }
}

/// Test double: `sum_j rate_j ∂_{theta_j} + vertical ∂_z` on R^{2n+1}.
#[derive(Debug, Clone)]
pub struct AngularField {
    pub rates: Vec<f64>,
    pub vertical: f64,
}

impl AngularField {
    pub fn new(rates: Vec<f64>) -> Self {
        Self { rates, vertical: 0.0 }
    }
}

impl VectorField for AngularField {
    fn dim(&self) -> usize {
        2 * self.rates.len() + 1
    }

    fn eval(&self, p: &[f64], out: &mut [f64]) {
        for (j, w) in self.rates.iter().enumerate() {
            out[2 * j] = -w * p[2 * j + 1];
            out[2 * j + 1] = w * p[2 * j];
        }
        out[2 * self.rates.len()] = self.vertical;
    }
}
