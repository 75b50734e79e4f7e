//! The scalar profile families behind the Hamiltonian.
//!
//! * `f(z, t)`: a z-family of functions of the squared radius `t = r^2` that
//!   vanish at `t = 1`, grow strictly slower than `log` except for the single
//!   tangency at `(z, t) = (0, 1)`, and eventually exceed `log c` uniformly in `z`.
//! * `g(t)`: equal to `log t` near the torus value of `H_0`, increasing with
//!   `g' <= 1/t`, and identically zero from a knot below `s c / 2` onwards.
//! * `h(z)`: a cutoff in `z`, zero on `[-z_flat, z_flat]` and one for `|z| >= z_full`.
//!
//! The reference `f` is
//!
//! ```text
//! f(z, t) = ∫_1^t tau(u) (1 - d(z, u)) / u du,
//! d(z, u) = ((u - 1)^2 + z^2) / (2 (1 + (u - 1)^2 + z^2)),
//! ```
//!
//! with `tau` a smooth step from 0 on `[0, 1/4]` to 1 on `[3/4, inf)`. On the
//! range where `tau = 1` the integrand is `1/(2u) + 1/(2u p(u))` with
//! `p(u) = (u - 1)^2 + 1 + z^2`, which has an elementary antiderivative; only the
//! ramp `[1/4, 3/4]` needs quadrature.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ProfileError;
use crate::quadrature::{smoothstep, smoothstep_deriv, GaussLegendre};

const RAMP_LO: f64 = 0.25;
const RAMP_HI: f64 = 0.75;
const RULE_ORDER: usize = 24;

/// Constants shared by the three profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileConstants {
    /// Irrational rotation weight in (0, 1).
    pub s: f64,
    /// Growth constant, `c > 2/s`.
    pub c: f64,
    /// Half-width of the window around `(1+s)/2` on which `g = log`.
    pub delta_g: f64,
    /// `h = 0` on `[-z_flat, z_flat]`.
    pub z_flat: f64,
    /// `h = 1` for `|z| >= z_full`.
    pub z_full: f64,
}

impl Default for ProfileConstants {
    fn default() -> Self {
        Self {
            s: (5f64.sqrt() - 1.0) / 2.0,
            c: 8.0,
            delta_g: 0.05,
            z_flat: 1.0,
            z_full: 2.0,
        }
    }
}

impl ProfileConstants {
    pub fn validate(&self) -> Result<(), ProfileError> {
        let bad = |msg: String| Err(ProfileError::Constants(msg));
        let finite = [self.s, self.c, self.delta_g, self.z_flat, self.z_full]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return bad("all constants must be finite".into());
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return bad(format!("s = {} must lie in (0, 1)", self.s));
        }
        if self.c <= 2.0 / self.s {
            return bad(format!("c = {} must exceed 2/s = {}", self.c, 2.0 / self.s));
        }
        if self.delta_g <= 0.0 || self.torus_value() + self.delta_g >= self.s * self.c / 2.0 {
            return bad(format!(
                "delta_g = {} must be positive with (1+s)/2 + delta_g < s c / 2",
                self.delta_g
            ));
        }
        if self.torus_value() + self.delta_g >= 1.0 {
            return bad("(1+s)/2 + delta_g must stay below 1 for an increasing g".into());
        }
        if !(self.z_flat >= 1.0 && self.z_flat < self.z_full) {
            return bad(format!(
                "need 1 <= z_flat < z_full, got z_flat = {}, z_full = {}",
                self.z_flat, self.z_full
            ));
        }
        Ok(())
    }

    /// `(1+s)/2`, the value of `H` on the torus for n = 2.
    pub fn torus_value(&self) -> f64 {
        (1.0 + self.s) / 2.0
    }

    /// Squared radius beyond which `f(z, t) > log c` for every `z`.
    ///
    /// For `t >= 1` the reference integrand is at least `1/(2u)`, strictly for
    /// finite `z`, so `f(z, t) > log(t)/2` and `t = c^2` already suffices.
    pub fn t_star(&self) -> f64 {
        self.c * self.c
    }

    /// `sqrt(t_star)`: outside `r_j >= r_star` the Hamiltonian is identically one.
    pub fn r_star(&self) -> f64 {
        self.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FValue {
    pub value: f64,
    pub df_dt: f64,
    pub df_dz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GValue {
    pub value: f64,
    pub dg_dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HValue {
    pub value: f64,
    pub dh_dz: f64,
}

pub trait FProfile: Sync {
    fn eval(&self, z: f64, t: f64) -> Result<FValue, ProfileError>;
}

pub trait GProfile: Sync {
    fn eval(&self, t: f64) -> Result<GValue, ProfileError>;
}

pub trait HProfile: Sync {
    fn eval(&self, z: f64) -> HValue;
}

/// Reference `f`; independent of the constants.
#[derive(Debug, Clone)]
pub struct ReferenceF {
    rule: GaussLegendre,
}

impl Default for ReferenceF {
    fn default() -> Self {
        Self {
            rule: GaussLegendre::new(RULE_ORDER),
        }
    }
}

/// The ramp `tau`.
pub fn ramp(u: f64) -> f64 {
    smoothstep((u - RAMP_LO) / (RAMP_HI - RAMP_LO))
}

pub fn ramp_deriv(u: f64) -> f64 {
    smoothstep_deriv((u - RAMP_LO) / (RAMP_HI - RAMP_LO)) / (RAMP_HI - RAMP_LO)
}

/// `d(z, u)`, the defect of `t f_t` from one where `tau = 1`.
pub fn log_defect(z: f64, u: f64) -> f64 {
    let q = (u - 1.0) * (u - 1.0) + z * z;
    0.5 * q / (1.0 + q)
}

impl ReferenceF {
    /// `F(t) - F(1)` on `t >= 3/4`, and its derivative in `a = 1 + z^2`.
    fn closed(t: f64, a: f64) -> (f64, f64) {
        let w = t - 1.0;
        let sa = a.sqrt();
        let p = w * w + a;
        let big_a = 1.0 / (1.0 + a);
        let atan_term = (w / sa).atan();
        let b = t.ln() - 0.5 * (w * w / a).ln_1p() + atan_term / sa;
        let db_da =
            -0.5 / p + 0.5 / a - 0.5 * atan_term / (a * sa) - w / (2.0 * a * p);
        let value = 0.5 * t.ln() + 0.5 * big_a * b;
        let dvalue_da = 0.5 * (-big_a * big_a * b + big_a * db_da);
        (value, dvalue_da)
    }

    /// `∫_lo^{3/4} tau(u) (1 - d)/u du` and `∫_lo^{3/4} tau(u) z / (u p^2) du`.
    fn ramp_integrals(&self, lo: f64, z: f64, a: f64) -> (f64, f64) {
        if lo >= RAMP_HI {
            return (0.0, 0.0);
        }
        self.rule.integrate_pair(lo, RAMP_HI, |u| {
            let w = u - 1.0;
            let p = w * w + a;
            let tau_over_u = ramp(u) / u;
            (tau_over_u * 0.5 * (1.0 + 1.0 / p), tau_over_u * z / (p * p))
        })
    }
}

impl FProfile for ReferenceF {
    fn eval(&self, z: f64, t: f64) -> Result<FValue, ProfileError> {
        if !(t >= 0.0) || !t.is_finite() || !z.is_finite() {
            return Err(ProfileError::Domain { profile: "f", t });
        }
        let a = 1.0 + z * z;
        let defect = log_defect(z, t);
        if t >= RAMP_HI {
            let (value, dv_da) = Self::closed(t, a);
            return Ok(FValue {
                value,
                df_dt: (1.0 - defect) / t,
                df_dz: 2.0 * z * dv_da,
            });
        }
        let (base, dbase_da) = Self::closed(RAMP_HI, a);
        let (ramp_value, ramp_dz) = self.ramp_integrals(t.max(RAMP_LO), z, a);
        let df_dt = if t <= RAMP_LO {
            0.0
        } else {
            ramp(t) * (1.0 - defect) / t
        };
        Ok(FValue {
            value: base - ramp_value,
            df_dt,
            df_dz: 2.0 * z * dbase_da + ramp_dz,
        })
    }
}

/// Reference `g`: `log` up to `center + delta`, then `g' = kappa(t)/t` with a
/// smooth cutoff `kappa` falling from 1 to 0 over `[t_a, t_k]`, where the knot
/// `t_k` is placed so that `g(t_k) = 0` exactly.
#[derive(Debug, Clone)]
pub struct ReferenceG {
    center: f64,
    delta: f64,
    zero_threshold: f64,
    t_a: f64,
    knot: f64,
    rule: GaussLegendre,
}

impl ReferenceG {
    /// `center` is the torus value of `H_0`, `zero_threshold` the value (`s c / 2`
    /// for n = 2) from which `g` must vanish.
    pub fn new(center: f64, delta: f64, zero_threshold: f64) -> Result<Self, ProfileError> {
        let t_a = center + delta;
        if !(center > 0.0 && delta > 0.0 && t_a < 1.0 && t_a < zero_threshold) {
            return Err(ProfileError::Constants(format!(
                "g window [{}, {}] must lie in (0, 1) and below {}",
                center - delta,
                t_a,
                zero_threshold
            )));
        }
        let rule = GaussLegendre::new(RULE_ORDER);
        let target = -t_a.ln();
        let climb = |len: f64| {
            rule.integrate(0.0, 1.0, |x| (1.0 - smoothstep(x)) / (t_a + len * x)) * len
        };
        let mut lo = 0.0;
        let mut hi = zero_threshold - t_a;
        if climb(hi) < target {
            return Err(ProfileError::KnotSearch {
                limit: zero_threshold,
            });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if climb(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let len = 0.5 * (lo + hi);
        Ok(Self {
            center,
            delta,
            zero_threshold,
            t_a,
            knot: t_a + len,
            rule,
        })
    }

    pub fn knot(&self) -> f64 {
        self.knot
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn zero_threshold(&self) -> f64 {
        self.zero_threshold
    }

    fn cutoff(&self, t: f64) -> f64 {
        1.0 - smoothstep((t - self.t_a) / (self.knot - self.t_a))
    }
}

impl GProfile for ReferenceG {
    fn eval(&self, t: f64) -> Result<GValue, ProfileError> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(ProfileError::Domain { profile: "g", t });
        }
        if t <= self.t_a {
            return Ok(GValue {
                value: t.ln(),
                dg_dt: 1.0 / t,
            });
        }
        if t >= self.knot {
            return Ok(GValue {
                value: 0.0,
                dg_dt: 0.0,
            });
        }
        let climb = self.rule.integrate(self.t_a, t, |u| self.cutoff(u) / u);
        Ok(GValue {
            value: self.t_a.ln() + climb,
            dg_dt: self.cutoff(t) / t,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ReferenceH {
    z_flat: f64,
    z_full: f64,
}

impl ReferenceH {
    pub fn new(z_flat: f64, z_full: f64) -> Self {
        Self { z_flat, z_full }
    }
}

impl HProfile for ReferenceH {
    fn eval(&self, z: f64) -> HValue {
        let width = self.z_full - self.z_flat;
        let x = (z.abs() - self.z_flat) / width;
        HValue {
            value: smoothstep(x),
            dh_dz: z.signum() * smoothstep_deriv(x) / width,
        }
    }
}

/// The reference triple `(f, g, h)` together with its constants.
#[derive(Debug, Clone)]
pub struct ProfileFamily {
    pub constants: ProfileConstants,
    pub f: ReferenceF,
    pub g: ReferenceG,
    pub h: ReferenceH,
}

impl ProfileFamily {
    /// The n = 2 family: `g` is logarithmic around `(1+s)/2` and vanishes from `s c / 2`.
    pub fn reference(constants: ProfileConstants) -> Result<Self, ProfileError> {
        constants.validate()?;
        Self::with_window(
            constants,
            constants.torus_value(),
            constants.s * constants.c / 2.0,
        )
    }

    /// Family with an explicit `g` window, used for n > 2 weights.
    pub fn with_window(
        constants: ProfileConstants,
        center: f64,
        zero_threshold: f64,
    ) -> Result<Self, ProfileError> {
        constants.validate()?;
        Ok(Self {
            constants,
            f: ReferenceF::default(),
            g: ReferenceG::new(center, constants.delta_g, zero_threshold)?,
            h: ReferenceH::new(constants.z_flat, constants.z_full),
        })
    }
}

/// Sampling density for [`verify_profiles`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileGrid {
    pub nz: usize,
    pub nt: usize,
}

impl Default for ProfileGrid {
    fn default() -> Self {
        Self { nz: 200, nt: 200 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the audited quantity (see `note`).
    pub worst: f64,
    /// Sample achieving `worst`: `[z, t]` for f, `[t]` for g, `[z]` for h.
    pub at: Vec<f64>,
    pub note: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub constants: ProfileConstants,
    pub grid: ProfileGrid,
    pub t_star: f64,
    pub conditions: Vec<ConditionCheck>,
    pub passed: bool,
}

impl ConstraintReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionCheck> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

/// Radius of the exclusion ball around `(z, t) = (0, 1)` for the strictness test.
pub const TANGENCY_BALL: f64 = 1e-3;

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

struct Extreme {
    value: f64,
    at: Vec<f64>,
}

impl Extreme {
    fn max() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            at: Vec::new(),
        }
    }
    fn min() -> Self {
        Self {
            value: f64::INFINITY,
            at: Vec::new(),
        }
    }
    fn push_max(&mut self, v: f64, at: &[f64]) {
        if v > self.value || v.is_nan() && !self.value.is_nan() {
            self.value = v;
            self.at = at.to_vec();
        }
    }
    fn push_min(&mut self, v: f64, at: &[f64]) {
        if v < self.value || v.is_nan() && !self.value.is_nan() {
            self.value = v;
            self.at = at.to_vec();
        }
    }
}

/// Audit the three profile conditions on a grid.
///
/// `g_center` and `g_zero` describe the `g` window being audited (for the
/// reference n = 2 family these are `(1+s)/2` and `s c / 2`).
pub fn verify_profiles<F: FProfile, G: GProfile, H: HProfile>(
    constants: &ProfileConstants,
    f: &F,
    g: &G,
    h: &H,
    g_center: f64,
    g_zero: f64,
    grid: ProfileGrid,
) -> ConstraintReport {
    let mut conditions = Vec::new();
    if let Err(e) = constants.validate() {
        conditions.push(ConditionCheck {
            name: "constants".into(),
            passed: false,
            worst: f64::NAN,
            at: vec![],
            note: e.to_string(),
        });
    }

    let t_star = constants.t_star();
    let z_max = constants.z_full + 2.0;
    let zs = linspace(-z_max, z_max, grid.nz.max(2));
    let ts = linspace(0.0, 4.0 * t_star, grid.nt.max(2));
    let dz = zs[1] - zs[0];
    let dt = ts[1] - ts[0];
    let log_c = constants.c.ln();

    // (i): f(z, 1) = 0 along the whole z grid.
    let mut cond_i = Extreme::max();
    let mut domain_failures = 0usize;
    for &z in &zs {
        match f.eval(z, 1.0) {
            Ok(v) => cond_i.push_max(v.value.abs(), &[z, 1.0]),
            Err(_) => domain_failures += 1,
        }
    }
    conditions.push(ConditionCheck {
        name: "f(i) f(z,1)=0".into(),
        passed: domain_failures == 0 && cond_i.value <= 1e-12,
        worst: cond_i.value,
        at: cond_i.at,
        note: "max |f(z,1)| over the z grid; tolerance 1e-12".into(),
    });

    // Grid rows in parallel; each row reports its local extremes.
    struct Row {
        tf_max: Extreme,
        strict_viol: Extreme,
        growth_min: Extreme,
        nonfinite: Vec<Vec<f64>>,
    }
    let rows: Vec<Row> = zs
        .par_iter()
        .map(|&z| {
            let mut row = Row {
                tf_max: Extreme::max(),
                strict_viol: Extreme::max(),
                growth_min: Extreme::min(),
                nonfinite: Vec::new(),
            };
            for &t in &ts {
                let v = match f.eval(z, t) {
                    Ok(v) => v,
                    Err(_) => {
                        row.nonfinite.push(vec![z, t]);
                        continue;
                    }
                };
                if !(v.value.is_finite() && v.df_dt.is_finite() && v.df_dz.is_finite()) {
                    row.nonfinite.push(vec![z, t]);
                    continue;
                }
                let tf = t * v.df_dt;
                row.tf_max.push_max(tf, &[z, t]);
                if z.hypot(t - 1.0) > TANGENCY_BALL {
                    row.strict_viol.push_max(tf, &[z, t]);
                }
                if t >= t_star {
                    row.growth_min.push_min(v.value - log_c, &[z, t]);
                }
            }
            row
        })
        .collect();

    let mut tf_max = Extreme::max();
    let mut strict = Extreme::max();
    let mut growth = Extreme::min();
    let mut nonfinite = Vec::new();
    for row in rows {
        tf_max.push_max(row.tf_max.value, &row.tf_max.at);
        strict.push_max(row.strict_viol.value, &row.strict_viol.at);
        growth.push_min(row.growth_min.value, &row.growth_min.at);
        nonfinite.extend(row.nonfinite);
    }
    let near_tangency = tf_max.at.len() == 2
        && tf_max.at[0].abs() <= dz * (1.0 + 1e-9)
        && (tf_max.at[1] - 1.0).abs() <= dt * (1.0 + 1e-9);
    conditions.push(ConditionCheck {
        name: "f(ii) t*df_dt<=1".into(),
        passed: tf_max.value <= 1.0 + 1e-12 && strict.value < 1.0,
        worst: tf_max.value,
        at: tf_max.at.clone(),
        note: format!(
            "max t*df_dt over the grid; strict maximum outside a {TANGENCY_BALL:e} ball around (0,1) is {}",
            strict.value
        ),
    });
    conditions.push(ConditionCheck {
        name: "f(ii) maximum at tangency".into(),
        passed: near_tangency,
        worst: tf_max.value,
        at: tf_max.at,
        note: format!("argmax must lie within one cell (dz = {dz}, dt = {dt}) of (0, 1)"),
    });
    conditions.push(ConditionCheck {
        name: "f(iii) f>log c beyond T*".into(),
        passed: growth.value > 0.0,
        worst: growth.value,
        at: growth.at,
        note: format!("min of f - log c over grid points with t >= T* = {t_star}"),
    });
    conditions.push(ConditionCheck {
        name: "f finite".into(),
        passed: nonfinite.is_empty(),
        worst: nonfinite.len() as f64,
        at: nonfinite.first().cloned().unwrap_or_default(),
        note: "count of grid samples with a domain error or non-finite output".into(),
    });

    // g audits on (0, 2 g_zero].
    let ng = grid.nt.max(2);
    let g_ts: Vec<f64> = (0..ng)
        .map(|k| 2.0 * g_zero * (k + 1) as f64 / ng as f64)
        .collect();
    let g_vals: Vec<Result<GValue, ProfileError>> = g_ts.iter().map(|&t| g.eval(t)).collect();
    let mut mono = Extreme::min();
    let mut slope = Extreme::min();
    let mut zero_region = Extreme::max();
    let mut g_fail = 0usize;
    for k in 0..ng {
        let t = g_ts[k];
        match &g_vals[k] {
            Ok(v) => {
                slope.push_min(1.0 / t - v.dg_dt, &[t]);
                if t >= g_zero {
                    zero_region.push_max(v.value.abs().max(v.dg_dt.abs()), &[t]);
                }
                if k + 1 < ng {
                    if let Ok(next) = &g_vals[k + 1] {
                        mono.push_min(next.value - v.value, &[t]);
                    }
                }
            }
            Err(_) => g_fail += 1,
        }
    }
    let mut window = Extreme::max();
    let delta = constants.delta_g;
    for t in linspace(g_center - delta, g_center + delta, ng) {
        match g.eval(t) {
            Ok(v) => window.push_max((v.value - t.ln()).abs().max((v.dg_dt - 1.0 / t).abs()), &[t]),
            Err(_) => g_fail += 1,
        }
    }
    conditions.push(ConditionCheck {
        name: "g monotone".into(),
        passed: g_fail == 0 && mono.value >= 0.0,
        worst: mono.value,
        at: mono.at,
        note: "min of g(t_{k+1}) - g(t_k) over consecutive samples".into(),
    });
    conditions.push(ConditionCheck {
        name: "g(i) log window".into(),
        passed: g_fail == 0 && window.value <= 1e-12,
        worst: window.value,
        at: window.at,
        note: format!("max deviation of (g, g') from (log t, 1/t) on |t - {g_center}| <= {delta}"),
    });
    conditions.push(ConditionCheck {
        name: "g(ii) zero beyond sc/2".into(),
        passed: g_fail == 0 && zero_region.value == 0.0,
        worst: zero_region.value,
        at: zero_region.at,
        note: format!("max of |g|, |g'| for t >= {g_zero}"),
    });
    conditions.push(ConditionCheck {
        name: "g(iii) g'<=1/t".into(),
        passed: g_fail == 0 && slope.value >= -1e-12,
        worst: slope.value,
        at: slope.at,
        note: "min of 1/t - g'(t) over the g grid".into(),
    });

    // h audits on the same z grid plus the window edges.
    let mut hz: Vec<f64> = zs.clone();
    hz.extend([
        -constants.z_flat,
        constants.z_flat,
        -constants.z_full,
        constants.z_full,
        constants.z_full + 5.0,
    ]);
    let mut flat = Extreme::max();
    let mut full = Extreme::max();
    let mut range = Extreme::max();
    for &z in &hz {
        let v = h.eval(z);
        range.push_max((-v.value).max(v.value - 1.0), &[z]);
        if z.abs() <= constants.z_flat {
            flat.push_max(v.value.abs().max(v.dh_dz.abs()), &[z]);
        }
        if z.abs() >= constants.z_full {
            full.push_max((v.value - 1.0).abs().max(v.dh_dz.abs()), &[z]);
        }
    }
    conditions.push(ConditionCheck {
        name: "h(i) flat window".into(),
        passed: flat.value == 0.0,
        worst: flat.value,
        at: flat.at,
        note: "max of |h|, |h'| on [-z_flat, z_flat]".into(),
    });
    conditions.push(ConditionCheck {
        name: "h(ii) one for large |z|".into(),
        passed: full.value == 0.0,
        worst: full.value,
        at: full.at,
        note: "max of |h - 1|, |h'| for |z| >= z_full".into(),
    });
    conditions.push(ConditionCheck {
        name: "h range".into(),
        passed: range.value <= 0.0,
        worst: range.value,
        at: range.at,
        note: "max excursion of h outside [0, 1]".into(),
    });

    let passed = conditions.iter().all(|c| c.passed);
    ConstraintReport {
        constants: *constants,
        grid,
        t_star,
        conditions,
        passed,
    }
}

/// [`verify_profiles`] on the reference n = 2 family.
pub fn verify_reference(
    constants: &ProfileConstants,
    grid: ProfileGrid,
) -> Result<ConstraintReport, ProfileError> {
    let fam = ProfileFamily::reference(*constants)?;
    Ok(verify_profiles(
        constants,
        &fam.f,
        &fam.g,
        &fam.h,
        constants.torus_value(),
        constants.s * constants.c / 2.0,
        grid,
    ))
}
