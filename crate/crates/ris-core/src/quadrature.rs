//! Gauss-Legendre quadrature.
//!
//! Nodes are the roots of the Legendre polynomial P_n, found by Newton
//! iteration from the Tricomi initial guess; weights follow from the
//! derivative at each root. Rules are cached per order because the coupling
//! integrals re-use a small set of orders very many times during fitting.

use std::collections::HashMap;
use std::ops::{Add, Mul};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// A Gauss-Legendre rule of fixed order on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Evaluates P_n(x) and its derivative by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

impl GaussLegendre {
    /// Computes the rule of order `n` (`n >= 1`).
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("quadrature order must be at least 1"));
        }
        if n == 1 {
            return Ok(Self {
                nodes: vec![0.0],
                weights: vec![2.0],
            });
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n / 2;
        for i in 0..half {
            // Tricomi's estimate for the i-th root (counted from +1).
            let mut x =
                (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() <= 1e-15 * x.abs().max(1.0) {
                    let (p, d) = legendre_with_derivative(n, x);
                    dp = d;
                    x -= p / d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = x;
            weights[i] = w;
            nodes[n - 1 - i] = -x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            let (_, dp) = legendre_with_derivative(n, 0.0);
            nodes[half] = 0.0;
            weights[half] = 2.0 / (dp * dp);
        }
        Ok(Self { nodes, weights })
    }

    /// Rule order.
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `f` over [a, b].
    pub fn integrate<T, F>(&self, a: f64, b: f64, f: F) -> T
    where
        T: Copy + Default + Add<Output = T>,
        f64: Mul<T, Output = T>,
        F: Fn(f64) -> T,
    {
        let mid = 0.5 * (a + b);
        let scale = 0.5 * (b - a);
        let mut acc = T::default();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + (scale * w) * f(mid + scale * x);
        }
        acc
    }
}

/// Returns the cached rule of order `n`, computing it on first use.
pub fn cached_rule(n: usize) -> Result<Arc<GaussLegendre>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(GaussLegendre::new(n)?);
    cache
        .lock()
        .unwrap()
        .entry(n)
        .or_insert_with(|| Arc::clone(&rule));
    Ok(rule)
}
