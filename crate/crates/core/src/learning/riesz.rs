use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{LearningError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Cos,
    Sin,
}

fn cos_wave(t: f64) -> f64 {
    if t < 0.5 {
        1.0 - 4.0 * t
    } else {
        4.0 * t - 3.0
    }
}

fn sin_wave(t: f64) -> f64 {
    if t < 0.25 {
        4.0 * t
    } else if t < 0.75 {
        2.0 - 4.0 * t
    } else {
        4.0 * t - 4.0
    }
}

/// `C_j(t) = C(jt - floor(jt))`, likewise `S_j`. The base waves are the
/// triangle waves `C(t) = 1 - 4t` on `[0, 1/2)`, `4t - 3` on `[1/2, 1]` and
/// `S(t) = 4t`, `2 - 4t`, `4t - 4` on the quarters `[0, 1/4)`, `[1/4, 3/4)`,
/// `[3/4, 1]`.
pub fn riesz_eval(kind: BasisKind, j: u32, t: f64) -> f64 {
    let s = j as f64 * t;
    let frac = if j == 0 { t } else { s - s.floor() };
    match kind {
        BasisKind::Cos => cos_wave(frac),
        BasisKind::Sin => sin_wave(frac),
    }
}

/// `f(x) = sum_i f_i((Ux)_i)` with `f_i = sum_lambda a_{i,lambda} C_lambda + b_{i,lambda} S_lambda`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RieszTarget {
    pub dictionary: Vec<u32>,
    /// `d x K` cosine coefficients.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    /// Row-major orthogonal `d x d` matrix.
    pub u: Vec<Vec<f64>>,
    pub magnitude: f64,
}

impl RieszTarget {
    pub fn new(dictionary: Vec<u32>, a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, u: Vec<Vec<f64>>, magnitude: f64) -> Result<Self> {
        let d = u.len();
        let k = dictionary.len();
        if d == 0 || k == 0 {
            return Err(LearningError::InvalidInput("empty dictionary or dimension".into()));
        }
        if dictionary.contains(&0) {
            return Err(LearningError::InvalidInput("frequencies must be positive".into()));
        }
        if u.iter().any(|r| r.len() != d) || a.len() != d || b.len() != d || a.iter().chain(&b).any(|r| r.len() != k) {
            return Err(LearningError::ShapeMismatch("coefficient or rotation shape".into()));
        }
        if a.iter().chain(&b).flatten().any(|c| !(c.abs() <= magnitude)) {
            return Err(LearningError::InvalidInput(format!("coefficient above magnitude {magnitude}")));
        }
        let um = DMatrix::from_fn(d, d, |i, j| u[i][j]);
        let err = (um.transpose() * &um - DMatrix::identity(d, d)).abs().max();
        if err > 1e-10 {
            return Err(LearningError::InvalidInput(format!("U is not orthogonal (error {err:e})")));
        }
        Ok(Self { dictionary, a, b, u, magnitude })
    }

    /// Coefficients uniform in `[-M, M]`, `U` from the QR factorization of a
    /// standard Gaussian matrix.
    pub fn random<R: Rng + ?Sized>(d: usize, dictionary: Vec<u32>, magnitude: f64, rng: &mut R) -> Result<Self> {
        let k = dictionary.len();
        let mut coeffs = || -> Vec<Vec<f64>> {
            (0..d).map(|_| (0..k).map(|_| rng.random_range(-magnitude..=magnitude)).collect()).collect()
        };
        let (a, b) = (coeffs(), coeffs());
        let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let q = g.qr().q();
        let u = (0..d).map(|i| (0..d).map(|j| q[(i, j)]).collect()).collect();
        Self::new(dictionary, a, b, u, magnitude)
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn lambda_star(&self) -> u32 {
        self.dictionary.iter().copied().max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let d = self.dim();
        if x.len() != d {
            return Err(LearningError::ShapeMismatch(format!("input of length {}, expected {d}", x.len())));
        }
        let mut total = 0.0;
        for i in 0..d {
            let t: f64 = self.u[i].iter().zip(x).map(|(u, v)| u * v).sum();
            for (l, &j) in self.dictionary.iter().enumerate() {
                total += self.a[i][l] * riesz_eval(BasisKind::Cos, j, t) + self.b[i][l] * riesz_eval(BasisKind::Sin, j, t);
            }
        }
        Ok(total)
    }
}
