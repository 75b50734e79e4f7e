//! The positive Hamiltonian
//!
//! ```text
//! H_0 = sum_j (w_j / 2) exp(f_z(u_j)),   H_1 = exp(g(H_0)),   H = (1 - h(z)) H_1 + h(z),
//! ```
//!
//! with `u_j = x_j^2 + y_j^2`, weights `w = (1, s)` for n = 2, and its gradient.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::ProfileError;
use crate::point::{squared_radii, torus_distance, Point};
use crate::profiles::{FProfile, GProfile, HProfile, ProfileConstants, ProfileFamily};
use crate::sampling::{rng, shell_point, torus_point};
use rand::Rng;

pub type Radial = SmallVec<[f64; 4]>;

/// Weights `w_1 = 1, w_2, ..., w_n` of the planar summands.
///
/// For n = 2 this is `(1, s)`. For larger n the tail is built from `s` and the
/// fractional parts of `sqrt(2), sqrt(3), sqrt(7), ...`, rescaled so that
/// `w_2 + ... + w_n = s`; the torus value `(sum w)/2` then stays `(1+s)/2`.
pub fn torus_weights(s: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "need n >= 2");
    if n == 2 {
        return vec![1.0, s];
    }
    let mut raw = vec![s];
    let mut m = 2u32;
    while raw.len() < n - 1 {
        let root = (m as f64).sqrt();
        if root.fract() != 0.0 && m != 5 {
            raw.push(root.fract());
        }
        m += 1;
    }
    let total: f64 = raw.iter().sum();
    let mut w = vec![1.0];
    w.extend(raw.iter().map(|v| v * s / total));
    w
}

/// The region outside of which `H` is identically one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportBox {
    pub r_star: f64,
    pub z_full: f64,
}

impl SupportBox {
    /// Inside means `r_j <= r_star` for all j and `|z| <= z_full`.
    pub fn contains(&self, p: &[f64]) -> bool {
        let n = p.len() / 2;
        if p[2 * n].abs() > self.z_full {
            return false;
        }
        let r2 = self.r_star * self.r_star;
        (0..n).all(|j| p[2 * j] * p[2 * j] + p[2 * j + 1] * p[2 * j + 1] <= r2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialCoords {
    pub u: Vec<f64>,
    pub z: f64,
}

impl RadialCoords {
    pub fn of(p: &Point) -> Self {
        Self {
            u: p.squared_radii(),
            z: p.z(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct H0Jet {
    pub value: f64,
    pub d_du: Radial,
    pub d_dz: f64,
}

/// `H` with its partials in `(u_1, ..., u_n, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGradient {
    pub h: f64,
    pub du: Radial,
    pub dz: f64,
}

impl RadialGradient {
    pub fn constant(n: usize, h: f64) -> Self {
        Self {
            h,
            du: SmallVec::from_elem(0.0, n),
            dz: 0.0,
        }
    }

    /// `H - sum_j u_j H_{u_j}`, the z-speed of the contact vector field.
    pub fn vertical_rate(&self, u: &[f64]) -> f64 {
        self.h - u.iter().zip(&self.du).map(|(u, d)| u * d).sum::<f64>()
    }

    pub fn cartesian(&self, p: &[f64]) -> HGradient {
        let n = self.du.len();
        let dx = (0..n).map(|j| 2.0 * p[2 * j] * self.du[j]).collect();
        let dy = (0..n).map(|j| 2.0 * p[2 * j + 1] * self.du[j]).collect();
        HGradient {
            h: self.h,
            dx,
            dy,
            dz: self.dz,
            du: self.du.to_vec(),
        }
    }
}

/// Full gradient of `H` at a Cartesian point, with the radial form alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HGradient {
    pub h: f64,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub dz: f64,
    pub du: Vec<f64>,
}

impl HGradient {
    /// `(H_{x_1}, H_{y_1}, ..., H_z)` in point layout.
    pub fn as_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.dx.len() + 1);
        for (x, y) in self.dx.iter().zip(&self.dy) {
            v.push(*x);
            v.push(*y);
        }
        v.push(self.dz);
        v
    }
}

/// A rotationally symmetric positive function on R^{2n+1}.
pub trait Hamiltonian: Sync {
    fn n(&self) -> usize;

    /// Value and partials at squared radii `u` and height `z`. Non-finite
    /// input yields non-finite output.
    fn radial(&self, u: &[f64], z: f64) -> RadialGradient;

    /// Compact region outside of which `H = 1`, if known.
    fn support(&self) -> Option<SupportBox> {
        None
    }

    fn gradient(&self, p: &[f64]) -> HGradient {
        self.radial(&squared_radii(p), p[p.len() - 1]).cartesian(p)
    }

    fn value(&self, p: &[f64]) -> f64 {
        self.radial(&squared_radii(p), p[p.len() - 1]).h
    }
}

/// Constant Hamiltonian; its contact vector field is a multiple of `∂_z`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantHamiltonian {
    pub n: usize,
    pub value: f64,
}

impl Hamiltonian for ConstantHamiltonian {
    fn n(&self) -> usize {
        self.n
    }
    fn radial(&self, _u: &[f64], _z: f64) -> RadialGradient {
        RadialGradient::constant(self.n, self.value)
    }
}

/// The reference Hamiltonian assembled from the profile family.
#[derive(Debug, Clone)]
pub struct HamiltonianStack {
    profiles: ProfileFamily,
    weights: Vec<f64>,
    torus_value: f64,
    support: SupportBox,
}

impl HamiltonianStack {
    pub fn new(constants: ProfileConstants, n: usize) -> Result<Self, ProfileError> {
        if n < 2 {
            return Err(ProfileError::Constants(format!("dimension n = {n} must be >= 2")));
        }
        constants.validate()?;
        let weights = torus_weights(constants.s, n);
        let w_min = weights.iter().cloned().fold(f64::INFINITY, f64::min);
        if constants.c <= 2.0 / w_min {
            return Err(ProfileError::Constants(format!(
                "c = {} must exceed 2/min(w) = {} for n = {n}",
                constants.c,
                2.0 / w_min
            )));
        }
        let torus_value = weights.iter().sum::<f64>() / 2.0;
        let profiles = ProfileFamily::with_window(constants, torus_value, w_min * constants.c / 2.0)?;
        Ok(Self {
            profiles,
            weights,
            torus_value,
            support: SupportBox {
                r_star: constants.r_star(),
                z_full: constants.z_full,
            },
        })
    }

    pub fn reference(constants: ProfileConstants) -> Result<Self, ProfileError> {
        Self::new(constants, 2)
    }

    pub fn constants(&self) -> &ProfileConstants {
        &self.profiles.constants
    }

    pub fn profiles(&self) -> &ProfileFamily {
        &self.profiles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Value of `H` on the torus, `(sum_j w_j)/2`.
    pub fn torus_value(&self) -> f64 {
        self.torus_value
    }

    pub fn support_box(&self) -> SupportBox {
        self.support
    }

    pub fn eval_h0(&self, rc: &RadialCoords) -> Result<H0Jet, ProfileError> {
        let mut value = 0.0;
        let mut d_dz = 0.0;
        let mut d_du = Radial::with_capacity(rc.u.len());
        for (w, &u) in self.weights.iter().zip(&rc.u) {
            let f = self.profiles.f.eval(rc.z, u)?;
            let term = 0.5 * w * f.value.exp();
            value += term;
            d_du.push(term * f.df_dt);
            d_dz += term * f.df_dz;
        }
        Ok(H0Jet { value, d_du, d_dz })
    }

    pub fn eval_h(&self, p: &Point) -> HGradient {
        self.gradient(p.as_slice())
    }

    fn try_radial(&self, u: &[f64], z: f64) -> Result<RadialGradient, ProfileError> {
        let n = self.weights.len();
        let cut = self.profiles.h.eval(z);
        if cut.value == 1.0 {
            return Ok(RadialGradient::constant(n, 1.0));
        }
        let h0 = self.eval_h0(&RadialCoords { u: u.to_vec(), z })?;
        let g = self.profiles.g.eval(h0.value)?;
        let h1 = g.value.exp();
        let scale = (1.0 - cut.value) * h1 * g.dg_dt;
        Ok(RadialGradient {
            h: (1.0 - cut.value) * h1 + cut.value,
            du: h0.d_du.iter().map(|d| scale * d).collect(),
            dz: scale * h0.d_dz + cut.dh_dz * (1.0 - h1),
        })
    }
}

impl Hamiltonian for HamiltonianStack {
    fn n(&self) -> usize {
        self.weights.len()
    }

    fn radial(&self, u: &[f64], z: f64) -> RadialGradient {
        self.try_radial(u, z).unwrap_or_else(|_| RadialGradient {
            h: f64::NAN,
            du: SmallVec::from_elem(f64::NAN, u.len()),
            dz: f64::NAN,
        })
    }

    fn support(&self) -> Option<SupportBox> {
        Some(self.support)
    }
}

/// `H - ½ sum_j (x_j H_{x_j} + y_j H_{y_j})` from a Cartesian gradient.
pub fn vertical_rate_cartesian(p: &[f64], grad: &HGradient) -> f64 {
    let mut acc = 0.0;
    for j in 0..grad.dx.len() {
        acc += p[2 * j] * grad.dx[j] + p[2 * j + 1] * grad.dy[j];
    }
    grad.h - 0.5 * acc
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HCheckConfig {
    /// Samples per family (torus, cylinder, exterior, bulk).
    pub samples: usize,
    /// Exclusion-tube radii for the (H-iv) trend, decreasing.
    pub tube_radii: Vec<f64>,
    pub seed: u64,
}

impl Default for HCheckConfig {
    fn default() -> Self {
        Self {
            samples: 100_000,
            tube_radii: vec![0.3, 0.1, 0.03, 0.01],
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Deviation {
    pub max: f64,
    pub at: Vec<f64>,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TubeMinimum {
    pub tube_radius: f64,
    pub min: f64,
    pub at: Vec<f64>,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PositivityReport {
    pub tube_minima: Vec<TubeMinimum>,
    /// max |H - ½ sum(x H_x + y H_y)| on sampled torus points.
    pub on_torus: f64,
    pub at_origin: f64,
    /// Minima strictly positive, strictly decreasing as the tube shrinks, and
    /// bounded by the smallest radius.
    pub trend_ok: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HReport {
    pub constants: ProfileConstants,
    pub n: usize,
    pub support: SupportBox,
    pub seed: u64,
    pub torus_identities: Deviation,
    pub cylinder: Deviation,
    pub exterior: Deviation,
    pub positivity: PositivityReport,
    pub min_h: f64,
    pub passed: bool,
}

fn track(dev: &mut (f64, Vec<f64>), value: f64, at: &[f64]) {
    if value > dev.0 || value.is_nan() {
        *dev = (value, at.to_vec());
    }
}

/// Sampled audit of the four Hamiltonian conditions.
pub fn check_h_conditions(stack: &HamiltonianStack, cfg: &HCheckConfig) -> HReport {
    let n = stack.n();
    let k = *stack.constants();
    let support = stack.support_box();
    let t0 = stack.torus_value();
    let mut r = rng(cfg.seed);
    let m = cfg.samples.max(1);

    // (H-i) on the torus: H = t0, H_{x_j} = w_j x_j, H_{y_j} = w_j y_j, H_z = 0.
    let torus: Vec<Point> = (0..m).map(|_| torus_point(n, &mut r)).collect();
    let torus_dev = torus
        .par_iter()
        .map(|p| {
            let g = stack.eval_h(p);
            let mut worst = (g.h - t0).abs().max(g.dz.abs());
            for j in 0..n {
                let w = stack.weights()[j];
                worst = worst
                    .max((g.dx[j] - w * p.x(j)).abs())
                    .max((g.dy[j] - w * p.y(j)).abs());
            }
            let expr = vertical_rate_cartesian(p.as_slice(), &g).abs();
            (worst, expr, p.as_slice().to_vec())
        })
        .collect::<Vec<_>>();
    let mut t_i = (0.0, Vec::new());
    let mut on_torus = 0.0f64;
    for (w, e, p) in &torus_dev {
        track(&mut t_i, *w, p);
        on_torus = on_torus.max(*e);
    }

    // (H-ii) on the cylinder over the torus with |z| <= z_flat.
    let cyl: Vec<Point> = (0..m)
        .map(|_| {
            let angles: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..std::f64::consts::TAU)).collect();
            Point::from_polar(&vec![1.0; n], &angles, r.gen_range(-k.z_flat..=k.z_flat))
        })
        .collect();
    let mut t_ii = (0.0, Vec::new());
    for (d, p) in cyl
        .par_iter()
        .map(|p| ((stack.value(p.as_slice()) - t0).abs(), p))
        .collect::<Vec<_>>()
    {
        track(&mut t_ii, d, p.as_slice());
    }

    // (H-iii) outside the support box: one r_j beyond r_star, or |z| beyond z_full.
    let ext: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut radii: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..2.0 * support.r_star)).collect();
            let angles: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..std::f64::consts::TAU)).collect();
            let mut z = r.gen_range(-support.z_full - 5.0..=support.z_full + 5.0);
            if i % 2 == 0 {
                let j = r.gen_range(0..n);
                radii[j] = r.gen_range(support.r_star..=2.0 * support.r_star);
            } else {
                let mag = r.gen_range(support.z_full..=support.z_full + 5.0);
                z = if r.gen::<bool>() { mag } else { -mag };
            }
            Point::from_polar(&radii, &angles, z).into_vec()
        })
        .filter(|p| !support.contains(p))
        .collect();
    let mut t_iii = (0.0, Vec::new());
    for (d, p) in ext
        .par_iter()
        .map(|p| {
            let g = stack.gradient(p);
            let grad_max = g.as_vector().iter().fold(0.0f64, |a, v| a.max(v.abs()));
            ((g.h - 1.0).abs().max(grad_max), p)
        })
        .collect::<Vec<_>>()
    {
        track(&mut t_iii, d, p);
    }

    // (H-iv) bulk samples plus shells at every tube scale.
    let bulk_box = crate::sampling::BoxRegion::slab(n, support.r_star + 1.0, support.z_full + 1.0);
    let mut bulk: Vec<Vec<f64>> = (0..m).map(|_| bulk_box.uniform(&mut r)).collect();
    for &rad in &cfg.tube_radii {
        for _ in 0..m / cfg.tube_radii.len().max(1) {
            bulk.push(shell_point(n, rad, 2.0 * rad, &mut r).into_vec());
        }
    }
    let evaluated: Vec<(f64, f64, f64)> = bulk
        .par_iter()
        .map(|p| {
            let g = stack.gradient(p);
            (torus_distance(p), vertical_rate_cartesian(p, &g), g.h)
        })
        .collect();
    let mut min_h = f64::INFINITY;
    let mut tube_minima: Vec<TubeMinimum> = cfg
        .tube_radii
        .iter()
        .map(|&rad| TubeMinimum {
            tube_radius: rad,
            min: f64::INFINITY,
            at: Vec::new(),
            samples: 0,
        })
        .collect();
    for ((dist, expr, h), p) in evaluated.iter().zip(&bulk) {
        min_h = min_h.min(*h);
        for tm in tube_minima.iter_mut() {
            if *dist >= tm.tube_radius {
                tm.samples += 1;
                if *expr < tm.min {
                    tm.min = *expr;
                    tm.at = p.clone();
                }
            }
        }
    }
    for p in torus.iter().chain(&cyl) {
        min_h = min_h.min(stack.value(p.as_slice()));
    }
    let origin = vec![0.0; 2 * n + 1];
    let at_origin = vertical_rate_cartesian(&origin, &stack.gradient(&origin));
    let positive = tube_minima.iter().all(|t| t.min > 0.0);
    let decreasing = tube_minima.windows(2).all(|w| w[1].min < w[0].min);
    let bounded = tube_minima
        .last()
        .map(|t| t.min <= t.tube_radius)
        .unwrap_or(true);
    let trend_ok = positive && decreasing && bounded;
    let positivity = PositivityReport {
        passed: trend_ok && on_torus <= 1e-10 && at_origin > 0.0,
        tube_minima,
        on_torus,
        at_origin,
        trend_ok,
    };

    let dev = |(max, at): (f64, Vec<f64>), tol: f64, samples: usize| Deviation {
        passed: max <= tol,
        max,
        at,
        tolerance: tol,
        samples,
    };
    let torus_identities = dev(t_i, 1e-9, torus.len());
    let cylinder = dev(t_ii, 1e-10, cyl.len());
    let exterior = dev(t_iii, 1e-12, ext.len());
    let passed = torus_identities.passed
        && cylinder.passed
        && exterior.passed
        && positivity.passed
        && min_h > 0.0;
    HReport {
        constants: k,
        n,
        support,
        seed: cfg.seed,
        torus_identities,
        cylinder,
        exterior,
        positivity,
        min_h,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::BoxRegion;

    fn stack() -> HamiltonianStack {
        HamiltonianStack::reference(ProfileConstants::default()).unwrap()
    }

    #[test]
    fn h0_on_the_torus_and_cylinder() {
        let st = stack();
        let s = st.constants().s;
        let v = st.eval_h0(&RadialCoords { u: vec![1.0, 1.0], z: 0.0 }).unwrap();
        assert!((v.value - (1.0 + s) / 2.0).abs() < 1e-15);
        assert!((v.value - 0.809_016_994_374_947_4).abs() < 1e-12);
        let v5 = st.eval_h0(&RadialCoords { u: vec![1.0, 1.0], z: 5.0 }).unwrap();
        assert!((v5.value - (1.0 + s) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn h0_exceeds_zero_threshold_far_out() {
        let st = stack();
        let k = st.constants();
        let v = st.eval_h0(&RadialCoords { u: vec![1e4, 1.0], z: 0.0 }).unwrap();
        assert!(v.value > k.s * k.c / 2.0);
    }

    #[test]
    fn gradient_on_torus() {
        let st = stack();
        let s = st.constants().s;
        let g = st.eval_h(&Point::new(vec![1.0, 0.0, 1.0, 0.0, 0.0]));
        assert!((g.h - (1.0 + s) / 2.0).abs() < 1e-15);
        let want = [1.0, 0.0, s, 0.0, 0.0];
        for (a, b) in g.as_vector().iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{:?}", g.as_vector());
        }
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let g2 = st.eval_h(&Point::new(vec![r, r, 0.0, 1.0, 0.0]));
        assert!((g2.h - g.h).abs() < 1e-15);
        assert!((g2.dx[0] - r).abs() < 1e-12 && (g2.dy[0] - r).abs() < 1e-12);
        assert!(g2.dx[1].abs() < 1e-12 && (g2.dy[1] - s).abs() < 1e-12);
    }

    #[test]
    fn trivial_far_above() {
        let st = stack();
        let g = st.eval_h(&Point::new(vec![0.0, 0.0, 0.0, 0.0, 10.0]));
        assert_eq!(g.h, 1.0);
        assert!(g.as_vector().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn identically_one_beyond_r_star() {
        let st = stack();
        let r_star = st.support_box().r_star;
        let mut r = rng(5);
        for _ in 0..1000 {
            let z = r.gen_range(-2.0..2.0);
            let rr = r_star * (1.0 + r.gen_range(0.0..1.0));
            let other = r.gen_range(0.0..3.0);
            let p = Point::from_polar(&[rr, other], &[0.3, 1.1], z);
            let g = st.eval_h(&p);
            assert!((g.h - 1.0).abs() < 1e-12);
            let q = Point::from_polar(&[other, rr], &[0.3, 1.1], z);
            assert!((st.eval_h(&q).h - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let st = stack();
        let mut r = rng(11);
        let bx = BoxRegion::slab(2, 4.0, 3.0);
        let step = 1e-5;
        for i in 0..1000 {
            let mut p = bx.uniform(&mut r);
            if i % 10 == 0 {
                // on a coordinate axis u_j = 0
                let j = (i / 10) % 2;
                p[2 * j] = 0.0;
                p[2 * j + 1] = 0.0;
            }
            let g = st.gradient(&p).as_vector();
            let scale = g.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            for k in 0..5 {
                let mut hi = p.clone();
                let mut lo = p.clone();
                hi[k] += step;
                lo[k] -= step;
                let fd = (st.value(&hi) - st.value(&lo)) / (2.0 * step);
                assert!((fd - g[k]).abs() / scale < 1e-6, "component {k} at {p:?}: {} vs {fd}", g[k]);
            }
        }
    }

    #[test]
    fn depends_only_on_radii() {
        let st = stack();
        let mut r = rng(2);
        for _ in 0..500 {
            let radii = [r.gen_range(0.0..3.0), r.gen_range(0.0..3.0)];
            let z = r.gen_range(-2.5..2.5);
            let a = Point::from_polar(&radii, &[r.gen_range(0.0..6.3), r.gen_range(0.0..6.3)], z);
            let b = Point::from_polar(&radii, &[r.gen_range(0.0..6.3), r.gen_range(0.0..6.3)], z);
            assert!((st.eval_h(&a).h - st.eval_h(&b).h).abs() < 1e-12);
        }
    }

    #[test]
    fn vertical_rate_forms_agree() {
        let st = stack();
        let mut r = rng(3);
        let bx = BoxRegion::slab(2, 3.0, 3.0);
        for _ in 0..500 {
            let p = bx.uniform(&mut r);
            let u = squared_radii(&p);
            let rg = st.radial(&u, p[4]);
            let cart = vertical_rate_cartesian(&p, &rg.cartesian(&p));
            assert!((cart - rg.vertical_rate(&u)).abs() < 1e-12);
        }
    }

    #[test]
    fn vertical_rate_at_origin_is_h() {
        let st = stack();
        let o = [0.0; 5];
        let g = st.gradient(&o);
        assert!(g.h > 0.0);
        assert_eq!(vertical_rate_cartesian(&o, &g), g.h);
    }

    #[test]
    fn weights_for_higher_dimensions() {
        let s = ProfileConstants::default().s;
        assert_eq!(torus_weights(s, 2), vec![1.0, s]);
        for n in 3..6 {
            let w = torus_weights(s, n);
            assert_eq!(w.len(), n);
            assert!((w[1..].iter().sum::<f64>() - s).abs() < 1e-15);
            assert!(w.iter().all(|v| *v > 0.0 && *v <= 1.0));
        }
        // the default c is too small for the n = 3 weights
        assert!(HamiltonianStack::new(ProfileConstants::default(), 3).is_err());
        let k = ProfileConstants { c: 12.0, ..Default::default() };
        let st = HamiltonianStack::new(k, 3).unwrap();
        assert!((st.torus_value() - (1.0 + s) / 2.0).abs() < 1e-15);
        let g = st.gradient(&[1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        assert!((g.dx[0] - 1.0).abs() < 1e-12);
        assert!((g.dy[1] - st.weights()[1]).abs() < 1e-12);
        assert!((g.dx[2] - st.weights()[2]).abs() < 1e-12);
    }

    #[test]
    fn condition_audit_passes_on_defaults() {
        let st = stack();
        let report = check_h_conditions(&st, &HCheckConfig { samples: 20_000, ..Default::default() });
        assert!(report.torus_identities.passed, "{:?}", report.torus_identities);
        assert!(report.cylinder.passed, "{:?}", report.cylinder);
        assert!(report.exterior.passed, "{:?}", report.exterior);
        assert!(report.positivity.passed, "{:?}", report.positivity);
        assert!(report.min_h > 0.0);
        assert!(report.passed);
    }
}
