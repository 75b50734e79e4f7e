use serde::{Deserialize, Serialize};

/// A point of R^{2n+1} in Cartesian coordinates, stored as
/// `[x1, y1, x2, y2, ..., xn, yn, z]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Panics unless the length is odd and at least 3.
    pub fn new(coords: Vec<f64>) -> Self {
        assert!(
            coords.len() >= 3 && coords.len() % 2 == 1,
            "a point of R^(2n+1) needs an odd number (>= 3) of coordinates, got {}",
            coords.len()
        );
        Self { coords }
    }

    pub fn try_new(coords: Vec<f64>) -> Option<Self> {
        (coords.len() >= 3 && coords.len() % 2 == 1).then_some(Self { coords })
    }

    pub fn origin(n: usize) -> Self {
        Self::new(vec![0.0; 2 * n + 1])
    }

    /// Point with the given polar data `(r_j, theta_j)` and height `z`.
    pub fn from_polar(radii: &[f64], angles: &[f64], z: f64) -> Self {
        assert_eq!(radii.len(), angles.len());
        let mut coords = Vec::with_capacity(2 * radii.len() + 1);
        for (r, th) in radii.iter().zip(angles) {
            coords.push(r * th.cos());
            coords.push(r * th.sin());
        }
        coords.push(z);
        Self::new(coords)
    }

    pub fn n(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn x(&self, j: usize) -> f64 {
        self.coords[2 * j]
    }

    pub fn y(&self, j: usize) -> f64 {
        self.coords[2 * j + 1]
    }

    pub fn z(&self) -> f64 {
        self.coords[self.coords.len() - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coords
    }

    pub fn squared_radii(&self) -> Vec<f64> {
        squared_radii(&self.coords)
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.x(j).hypot(self.y(j))).collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.y(j).atan2(self.x(j))).collect()
    }

    pub fn reduced(&self) -> ReducedPoint {
        ReducedPoint::new(self.radii(), self.z())
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.coords
    }
}

/// Symmetry-reduced state `(r_1, ..., r_n, z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedPoint {
    pub r: Vec<f64>,
    pub z: f64,
}

impl ReducedPoint {
    pub fn new(r: Vec<f64>, z: f64) -> Self {
        Self { r, z }
    }

    /// Lift to the Cartesian point with all angles zero.
    pub fn lift(&self) -> Point {
        Point::from_polar(&self.r, &vec![0.0; self.r.len()], self.z)
    }
}

/// `u_j = x_j^2 + y_j^2` of a Cartesian state slice.
pub fn squared_radii(coords: &[f64]) -> Vec<f64> {
    let n = coords.len() / 2;
    (0..n)
        .map(|j| coords[2 * j] * coords[2 * j] + coords[2 * j + 1] * coords[2 * j + 1])
        .collect()
}

/// Distance from a Cartesian state to the torus `{r_j = 1, z = 0}` in the
/// product max-metric `max(|r_1 - 1|, ..., |r_n - 1|, |z|)`.
pub fn torus_distance(coords: &[f64]) -> f64 {
    let n = coords.len() / 2;
    let mut d = coords[2 * n].abs();
    for j in 0..n {
        let r = coords[2 * j].hypot(coords[2 * j + 1]);
        d = d.max((r - 1.0).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_round_trip() {
        let p = Point::from_polar(&[1.5, 0.25], &[0.3, -2.0], 0.7);
        let r = p.radii();
        let th = p.angles();
        assert!((r[0] - 1.5).abs() < 1e-15 && (r[1] - 0.25).abs() < 1e-15);
        assert!((th[0] - 0.3).abs() < 1e-15 && (th[1] + 2.0).abs() < 1e-15);
        assert_eq!(p.z(), 0.7);
        assert_eq!(p.n(), 2);
    }

    #[test]
    fn torus_distance_uses_max_metric() {
        assert_eq!(torus_distance(&[1.0, 0.0, 0.0, 1.0, 0.0]), 0.0);
        assert!((torus_distance(&[1.2, 0.0, 0.0, 0.9, -0.05]) - 0.2).abs() < 1e-15);
        assert!((torus_distance(&[1.0, 0.0, 1.0, 0.0, -0.5]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_even_dimension() {
        assert!(Point::try_new(vec![0.0; 4]).is_none());
        assert!(Point::try_new(vec![0.0; 1]).is_none());
    }
}
