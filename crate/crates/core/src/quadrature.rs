//! Fixed-order Gauss-Legendre rules and the polynomial smooth step used by
//! every profile.

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on P_n from the Chebyshev-like initial guess.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integral of `f` over [a, b]. Works for a > b with the usual sign flip.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Two integrands sharing the same nodes.
    pub fn integrate_pair(
        &self,
        a: f64,
        b: f64,
        mut f: impl FnMut(f64) -> (f64, f64),
    ) -> (f64, f64) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let (mut s0, mut s1) = (0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let (v0, v1) = f(mid + half * x);
            s0 += w * v0;
            s1 += w * v1;
        }
        (s0 * half, s1 * half)
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Septic smooth step: 0 for x <= 0, 1 for x >= 1, C^3 at both ends.
pub fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let x4 = x * x * x * x;
        x4 * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)))
    }
}

pub fn smoothstep_deriv(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        let w = x * (1.0 - x);
        140.0 * w * w * w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        let rule = GaussLegendre::new(12);
        // degree 23 is the exactness limit
        let got = rule.integrate(-0.3, 1.7, |x| x.powi(22) - 3.0 * x.powi(5));
        let exact = |x: f64| x.powi(23) / 23.0 - 0.5 * x.powi(6);
        let want = exact(1.7) - exact(-0.3);
        assert!((got - want).abs() < 1e-12 * want.abs());
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for n in [1, 2, 5, 24, 40] {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "order {n}: {s}");
        }
    }

    #[test]
    fn smoothstep_endpoints_and_derivative() {
        assert_eq!(smoothstep(-1.0), 0.0);
        assert_eq!(smoothstep(2.0), 1.0);
        assert!((smoothstep(0.5) - 0.5).abs() < 1e-15);
        for k in 1..100 {
            let x = k as f64 / 100.0;
            let fd = (smoothstep(x + 1e-6) - smoothstep(x - 1e-6)) / 2e-6;
            assert!((fd - smoothstep_deriv(x)).abs() < 1e-8);
        }
    }
}
