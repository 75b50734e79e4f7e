//! Deterministic sample generators shared by the audits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::point::Point;

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut acc = 0.0;
    while index > 0 {
        acc += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    acc
}

/// Halton sequence in `[0, 1)^dim` with a seeded Cranley-Patterson rotation.
#[derive(Debug, Clone)]
pub struct Halton {
    shift: Vec<f64>,
    index: u64,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim <= PRIMES.len(), "Halton dimension {dim} exceeds {}", PRIMES.len());
        let mut r = rng(seed);
        let shift = (0..dim).map(|_| r.gen::<f64>()).collect();
        Self { shift, index: 1 }
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let i = self.index;
        self.index += 1;
        self.shift
            .iter()
            .enumerate()
            .map(|(k, s)| (radical_inverse(i, PRIMES[k]) + s).fract())
            .collect()
    }
}

/// Axis-aligned box in Cartesian coordinates.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoxRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxRegion {
    pub fn cube(dim: usize, half_width: f64) -> Self {
        Self {
            lo: vec![-half_width; dim],
            hi: vec![half_width; dim],
        }
    }

    /// `[-planar, planar]^{2n} x [-vertical, vertical]`.
    pub fn slab(n: usize, planar: f64, vertical: f64) -> Self {
        let mut lo = vec![-planar; 2 * n + 1];
        let mut hi = vec![planar; 2 * n + 1];
        lo[2 * n] = -vertical;
        hi[2 * n] = vertical;
        Self { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Map a unit-cube sample into the box.
    pub fn scale(&self, unit: &[f64]) -> Vec<f64> {
        unit.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(u, (lo, hi))| lo + u * (hi - lo))
            .collect()
    }

    pub fn clamp(&self, p: &mut [f64]) {
        for (v, (lo, hi)) in p.iter_mut().zip(self.lo.iter().zip(&self.hi)) {
            *v = v.clamp(*lo, *hi);
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    pub fn uniform(&self, r: &mut impl Rng) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(lo, hi)| r.gen_range(*lo..=*hi))
            .collect()
    }
}

/// Uniformly random angles on the torus `{r_j = 1, z = 0}`.
pub fn torus_point(n: usize, r: &mut impl Rng) -> Point {
    let angles: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..std::f64::consts::TAU)).collect();
    Point::from_polar(&vec![1.0; n], &angles, 0.0)
}

/// Random point whose torus distance (max-metric) lies in `[lo, hi]`.
pub fn shell_point(n: usize, lo: f64, hi: f64, r: &mut impl Rng) -> Point {
    let mut dev: Vec<f64> = (0..=n).map(|_| r.gen_range(-hi..=hi)).collect();
    let k = r.gen_range(0..=n);
    let mag = r.gen_range(lo..=hi);
    dev[k] = if r.gen::<bool>() { mag } else { -mag };
    let radii: Vec<f64> = dev[..n].iter().map(|d| (1.0 + d).max(0.0)).collect();
    let angles: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..std::f64::consts::TAU)).collect();
    Point::from_polar(&radii, &angles, dev[n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::torus_distance;

    #[test]
    fn halton_is_in_unit_cube_and_deterministic() {
        let mut a = Halton::new(5, 3);
        let mut b = Halton::new(5, 3);
        for _ in 0..100 {
            let p = a.next_point();
            assert_eq!(p, b.next_point());
            assert!(p.iter().all(|v| (0.0..1.0).contains(v)));
        }
    }

    #[test]
    fn unshifted_radical_inverse() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn shell_points_respect_bounds() {
        let mut r = rng(1);
        for _ in 0..1000 {
            let p = shell_point(2, 0.01, 0.02, &mut r);
            let d = torus_distance(p.as_slice());
            assert!(d >= 0.01 - 1e-12 && d <= 0.02 + 1e-12, "{d}");
        }
    }
}
