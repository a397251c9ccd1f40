//! Gauss-Legendre quadrature with nodes and weights computed at runtime by
//! Newton iteration on the Legendre polynomial, so any order is available.

/// Nodes and weights of the `order`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// # Panics
    /// Panics if `order` is zero.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be at least 1");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess for the i-th positive root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            // Odd rules have a node at the origin; fix rounding drift.
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `f` over `[a, b]` by affine change of variable.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(self.weights.iter()) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// Legendre polynomial `P_n(x)` and its derivative by the three-term
/// recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(5);
        // Degree 9 is the highest a 5-point rule handles exactly.
        let got = rule.integrate(0.0, 1.0, |x| x.powi(9));
        assert!((got - 0.1).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for order in [1, 2, 8, 33, 64, 128] {
            let rule = GaussLegendre::new(order);
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 2.0).abs() < 1e-12, "order {order}: {total}");
        }
    }

    #[test]
    fn oscillatory_integral_matches_closed_form() {
        let rule = GaussLegendre::new(64);
        let t = 17.0;
        let got = rule.integrate(0.0, std::f64::consts::PI, |x| (t * x).cos());
        let want = (t * std::f64::consts::PI).sin() / t;
        assert!((got - want).abs() < 1e-12);
    }
}
