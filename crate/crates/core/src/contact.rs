//! Standard contact geometry on R^{2n+1} and the contact vector field of `H`.
//!
//! With `alpha_st = dz + ½ sum_j (x_j dy_j - y_j dx_j)` and the frame
//! `e_j = ∂x_j + (y_j/2) ∂z`, `f_j = ∂y_j - (x_j/2) ∂z` of `ker alpha_st`, the
//! contact vector field of `H` is `X = H ∂z + Y` where
//!
//! ```text
//! Y = sum_j (x_j H_z / 2 - H_{y_j}) e_j + (y_j H_z / 2 + H_{x_j}) f_j.
//! ```
//!
//! `X` is the Reeb field of `alpha_st / H`; [`ContactField::reeb_residuals`]
//! measures how far a numerical `X` is from satisfying that.

use serde::{Deserialize, Serialize};

use crate::hamiltonian::{vertical_rate_cartesian, HGradient, Hamiltonian};
use crate::point::{squared_radii, Point};

/// A tangent vector in point layout `(dx_1, dy_1, ..., dz)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TangentVector {
    pub components: Vec<f64>,
}

impl TangentVector {
    pub fn zero(n: usize) -> Self {
        Self {
            components: vec![0.0; 2 * n + 1],
        }
    }

    pub fn dz(&self) -> f64 {
        self.components[self.components.len() - 1]
    }

    /// `∂_z` at any point of R^{2n+1}.
    pub fn reeb_standard(n: usize) -> Self {
        let mut v = Self::zero(n);
        v.components[2 * n] = 1.0;
        v
    }
}

/// `alpha_st(p)(v)`.
pub fn alpha_st(p: &[f64], v: &[f64]) -> f64 {
    let n = p.len() / 2;
    let mut acc = v[2 * n];
    for j in 0..n {
        acc += 0.5 * (p[2 * j] * v[2 * j + 1] - p[2 * j + 1] * v[2 * j]);
    }
    acc
}

/// `d alpha_st (v, w) = sum_j dx_j ∧ dy_j (v, w)`.
pub fn d_alpha_st(v: &[f64], w: &[f64]) -> f64 {
    let n = v.len() / 2;
    (0..n)
        .map(|j| v[2 * j] * w[2 * j + 1] - v[2 * j + 1] * w[2 * j])
        .sum()
}

/// `(e_1, f_1, ..., e_n, f_n)` at `p`.
pub fn frame(p: &[f64]) -> Vec<TangentVector> {
    let n = p.len() / 2;
    let mut out = Vec::with_capacity(2 * n);
    for j in 0..n {
        let mut e = TangentVector::zero(n);
        e.components[2 * j] = 1.0;
        e.components[2 * n] = 0.5 * p[2 * j + 1];
        let mut f = TangentVector::zero(n);
        f.components[2 * j + 1] = 1.0;
        f.components[2 * n] = -0.5 * p[2 * j];
        out.push(e);
        out.push(f);
    }
    out
}

/// The `ker alpha_st` component `Y` of the contact vector field.
pub fn y_field(p: &[f64], grad: &HGradient) -> TangentVector {
    let n = p.len() / 2;
    let mut out = TangentVector::zero(n);
    let v = &mut out.components;
    let mut vertical = 0.0;
    for j in 0..n {
        let (x, y) = (p[2 * j], p[2 * j + 1]);
        let a = 0.5 * x * grad.dz - grad.dy[j];
        let b = 0.5 * y * grad.dz + grad.dx[j];
        v[2 * j] = a;
        v[2 * j + 1] = b;
        vertical += a * 0.5 * y - b * 0.5 * x;
    }
    v[2 * n] = vertical;
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReebResiduals {
    /// `|alpha(X) - 1|` for `alpha = alpha_st / H`.
    pub alpha: f64,
    /// `max_b |d alpha(X, b)|` over the contact frame and `∂_z`.
    pub d_alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub point: Point,
    pub h: f64,
    pub x: TangentVector,
    pub dz_x: f64,
    pub reeb_residuals: ReebResiduals,
}

/// The contact vector field `X_H` of a Hamiltonian.
#[derive(Debug, Clone)]
pub struct ContactField<H> {
    ham: H,
}

impl<H: Hamiltonian> ContactField<H> {
    pub fn new(ham: H) -> Self {
        Self { ham }
    }

    pub fn hamiltonian(&self) -> &H {
        &self.ham
    }

    pub fn n(&self) -> usize {
        self.ham.n()
    }

    /// `X(p)` written into `out`; the allocation-light path used by the integrators.
    pub fn velocity_into(&self, p: &[f64], out: &mut [f64]) {
        let n = p.len() / 2;
        let u = squared_radii(p);
        let g = self.ham.radial(&u, p[2 * n]);
        for j in 0..n {
            let (x, y) = (p[2 * j], p[2 * j + 1]);
            let ang = 2.0 * g.du[j];
            let rad = 0.5 * g.dz;
            out[2 * j] = rad * x - ang * y;
            out[2 * j + 1] = rad * y + ang * x;
        }
        out[2 * n] = g.vertical_rate(&u);
    }

    pub fn x_vector(&self, p: &[f64]) -> (HGradient, TangentVector) {
        let grad = self.ham.gradient(p);
        let mut x = y_field(p, &grad);
        let n = p.len() / 2;
        x.components[2 * n] += grad.h;
        (grad, x)
    }

    pub fn x_field(&self, p: &Point) -> FieldSample {
        let (grad, x) = self.x_vector(p.as_slice());
        let reeb_residuals = residuals_from(p.as_slice(), &grad, &x);
        FieldSample {
            point: p.clone(),
            h: grad.h,
            dz_x: x.dz(),
            x,
            reeb_residuals,
        }
    }

    pub fn reeb_residuals(&self, p: &[f64]) -> ReebResiduals {
        let (grad, x) = self.x_vector(p);
        residuals_from(p, &grad, &x)
    }

    /// Same residuals with `d alpha` from central differences of the
    /// coefficients of `alpha_st / H`; cross-check path only.
    pub fn reeb_residuals_fd(&self, p: &[f64], step: f64) -> ReebResiduals {
        let dim = p.len();
        let n = dim / 2;
        let coeffs = |q: &[f64]| -> Vec<f64> {
            let h = self.ham.value(q);
            let mut c = vec![0.0; dim];
            for j in 0..n {
                c[2 * j] = -0.5 * q[2 * j + 1] / h;
                c[2 * j + 1] = 0.5 * q[2 * j] / h;
            }
            c[2 * n] = 1.0 / h;
            c
        };
        // jac[i][k] = ∂_i alpha_k
        let mut jac = vec![vec![0.0; dim]; dim];
        for i in 0..dim {
            let mut hi = p.to_vec();
            let mut lo = p.to_vec();
            hi[i] += step;
            lo[i] -= step;
            let (ch, cl) = (coeffs(&hi), coeffs(&lo));
            for k in 0..dim {
                jac[i][k] = (ch[k] - cl[k]) / (2.0 * step);
            }
        }
        let (_, x) = self.x_vector(p);
        let c = coeffs(p);
        let alpha_x: f64 = c.iter().zip(&x.components).map(|(a, b)| a * b).sum();
        let mut basis = frame(p);
        basis.push(TangentVector::reeb_standard(n));
        let mut worst = 0.0f64;
        for b in &basis {
            let mut acc = 0.0;
            for i in 0..dim {
                for k in 0..dim {
                    acc += (jac[i][k] - jac[k][i]) * x.components[i] * b.components[k];
                }
            }
            worst = worst.max(acc.abs());
        }
        ReebResiduals {
            alpha: (alpha_x - 1.0).abs(),
            d_alpha: worst,
        }
    }
}

/// `d(alpha_st / H) = (H d alpha_st - dH ∧ alpha_st) / H^2` evaluated on `(X, b)`.
fn residuals_from(p: &[f64], grad: &HGradient, x: &TangentVector) -> ReebResiduals {
    let n = p.len() / 2;
    let dh = grad.as_vector();
    let dh_on = |v: &[f64]| -> f64 { dh.iter().zip(v).map(|(a, b)| a * b).sum() };
    let h = grad.h;
    let xv = &x.components;
    let alpha_x = alpha_st(p, xv);
    let dh_x = dh_on(xv);
    let mut basis = frame(p);
    basis.push(TangentVector::reeb_standard(n));
    let mut worst = 0.0f64;
    for b in &basis {
        let bv = &b.components;
        let val = (h * d_alpha_st(xv, bv) - (dh_x * alpha_st(p, bv) - dh_on(bv) * alpha_x)) / (h * h);
        worst = worst.max(val.abs());
    }
    ReebResiduals {
        alpha: (alpha_x / h - 1.0).abs(),
        d_alpha: worst,
    }
}

/// `dz(X)` computed from `H` and its gradient, independent of the assembled vector.
pub fn dz_x_from_gradient(p: &[f64], grad: &HGradient) -> f64 {
    vertical_rate_cartesian(p, grad)
}
