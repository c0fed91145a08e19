//! Mollified landmark distance `f~_L = f_L * phi`, with `phi` a normalized
//! C-infinity bump of radius `beta * alpha`.
//!
//! The convolution is evaluated with a fixed tensor Gauss-Legendre rule whose
//! weights are nonnegative and normalized to one, so the discrete value is a
//! weighted average of `f_L` over points strictly inside the kernel ball:
//! `|f~_L - f_L| < beta * alpha` and `f~_L` stays 1-Lipschitz.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{LandmarkSet, Point};

use super::FeatureSize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothingConfig {
    pub alpha: f64,
    pub beta: f64,
    pub kernel_radius: f64,
    /// Gauss-Legendre points per axis.
    pub order: usize,
}

impl SmoothingConfig {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::ParameterOutOfRange {
                    name,
                    value: v,
                    range: "(0, 1)",
                });
            }
        }
        Ok(Self {
            alpha,
            beta,
            kernel_radius: alpha * beta,
            order: 0,
        })
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    fn order_for(&self, dim: usize) -> usize {
        match (self.order, dim) {
            (0, 0..=2) => 10,
            (0, 3) => 6,
            (0, _) => 4,
            (n, _) => n,
        }
    }
}

/// `exp(-1 / (1 - s^2))` for `s < 1`, zero beyond.
fn bump(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n(x), p0 = P_{n-1}(x)
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Precomputed quadrature of a normalized bump kernel.
#[derive(Debug, Clone)]
pub struct Mollifier {
    dim: usize,
    offsets: Vec<f64>,
    weights: Vec<f64>,
}

impl Mollifier {
    pub fn new(dim: usize, radius: f64, order: usize) -> Self {
        let (nodes, gw) = gauss_legendre(order);
        let mut offsets = Vec::new();
        let mut weights = Vec::new();
        for code in 0..order.pow(dim as u32) {
            let mut c = code;
            let mut w = 1.0;
            let mut r2 = 0.0;
            let mut y = Vec::with_capacity(dim);
            for _ in 0..dim {
                let j = c % order;
                c /= order;
                w *= gw[j];
                r2 += nodes[j] * nodes[j];
                y.push(nodes[j] * radius);
            }
            let k = w * bump(r2.sqrt());
            if k > 0.0 {
                offsets.extend(y);
                weights.push(k);
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self {
            dim,
            offsets,
            weights,
        }
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    /// Largest distance of a quadrature node from the kernel center.
    pub fn support_radius(&self) -> f64 {
        self.offsets
            .chunks_exact(self.dim)
            .map(|y| y.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Discrete convolution `sum_i w_i f(x + y_i)`.
    pub fn apply(&self, f: impl Fn(&[f64]) -> f64, x: &[f64]) -> f64 {
        let mut z = vec![0.0; self.dim];
        let mut acc = 0.0;
        for (y, w) in self.offsets.chunks_exact(self.dim).zip(&self.weights) {
            for k in 0..self.dim {
                z[k] = x[k] + y[k];
            }
            acc += w * f(&z);
        }
        acc
    }
}

/// `f~_L` as a reusable feature-size function.
#[derive(Debug, Clone)]
pub struct SmoothedLandmarks {
    landmarks: LandmarkSet,
    config: SmoothingConfig,
    mollifier: Mollifier,
}

impl SmoothedLandmarks {
    pub fn new(landmarks: LandmarkSet, config: SmoothingConfig) -> Self {
        let dim = landmarks.dim();
        let mollifier = Mollifier::new(dim, config.kernel_radius, config.order_for(dim));
        Self {
            landmarks,
            config,
            mollifier,
        }
    }

    pub fn config(&self) -> &SmoothingConfig {
        &self.config
    }

    pub fn landmarks(&self) -> &LandmarkSet {
        &self.landmarks
    }

    /// `f~_L(x)`; defined only outside `L^beta`.
    pub fn value_checked(&self, x: &Point) -> Result<f64> {
        if x.dim() != self.landmarks.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.landmarks.dim(),
                found: x.dim(),
            });
        }
        let f = self.landmarks.distance_unchecked(x.coords());
        if f <= self.config.beta {
            return Err(Error::InsideExclusion {
                distance: f,
                beta: self.config.beta,
            });
        }
        Ok(self.value(x.coords()))
    }
}

impl FeatureSize for SmoothedLandmarks {
    fn dim(&self) -> usize {
        self.landmarks.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.mollifier
            .apply(|z| self.landmarks.distance_unchecked(z), x)
    }
}

pub fn smoothed_landmark_distance(
    x: &Point,
    landmarks: &LandmarkSet,
    config: &SmoothingConfig,
) -> Result<f64> {
    SmoothedLandmarks::new(landmarks.clone(), *config).value_checked(x)
}
