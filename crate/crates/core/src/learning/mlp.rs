use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{LearningError, Result};

/// One affine map `x -> A x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl Layer {
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.a.iter().zip(&self.b).map(|(row, bi)| row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + bi).collect()
    }
}

/// ReLU network `x -> A_L relu(... relu(A_0 x + b_0) ...) + b_L`.
///
/// The ReLU is applied after every layer but the last, so the depth `L`
/// (number of ReLU layers) is one less than the number of affine maps.
#[derive(Debug, Clone, PartialEq)]
pub struct ReluMlp {
    layers: Vec<Layer>,
    width: usize,
    weight_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpDocument {
    pub layers: Vec<Layer>,
    #[serde(rename = "B")]
    pub weight_bound: f64,
    #[serde(rename = "W")]
    pub width: usize,
}

impl ReluMlp {
    /// Checks shapes (scalar output, consistent chaining), widths `<= width`
    /// and entries bounded by `weight_bound`.
    pub fn new(layers: Vec<Layer>, width: usize, weight_bound: f64) -> Result<Self> {
        let shape = |msg: String| Err(LearningError::ShapeMismatch(msg));
        if layers.is_empty() {
            return shape("network has no layers".into());
        }
        let mut fan_in = layers[0].a.first().map_or(0, Vec::len);
        if fan_in == 0 {
            return shape("zero input dimension".into());
        }
        for (l, layer) in layers.iter().enumerate() {
            if layer.a.is_empty() || layer.a.len() != layer.b.len() {
                return shape(format!("layer {l}: {} rows, {} biases", layer.a.len(), layer.b.len()));
            }
            if layer.a.iter().any(|r| r.len() != fan_in) {
                return shape(format!("layer {l}: expected {fan_in} columns"));
            }
            if l + 1 < layers.len() && layer.a.len() > width {
                return shape(format!("layer {l} has {} units, width is {width}", layer.a.len()));
            }
            let worst = layer.a.iter().flatten().chain(&layer.b).fold(0.0f64, |m, v| m.max(v.abs()));
            if !(worst <= weight_bound) {
                return Err(LearningError::InvalidInput(format!("layer {l} has entry {worst} above bound {weight_bound}")));
            }
            fan_in = layer.a.len();
        }
        if fan_in != 1 {
            return shape(format!("output dimension {fan_in}, expected 1"));
        }
        Ok(Self { layers, width, weight_bound })
    }

    /// Uniform weights and biases in `[-B, B]`, hidden widths uniform in
    /// `1..=width`.
    pub fn random<R: Rng + ?Sized>(d: usize, width: usize, depth: usize, weight_bound: f64, rng: &mut R) -> Self {
        let mut dims = vec![d];
        dims.extend((0..depth).map(|_| rng.random_range(1..=width)));
        dims.push(1);
        let layers = dims
            .windows(2)
            .map(|w| Layer {
                a: (0..w[1]).map(|_| (0..w[0]).map(|_| rng.random_range(-weight_bound..=weight_bound)).collect()).collect(),
                b: (0..w[1]).map(|_| rng.random_range(-weight_bound..=weight_bound)).collect(),
            })
            .collect();
        Self::new(layers, width.max(d), weight_bound).expect("random network satisfies its own constraints")
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].a[0].len()
    }

    /// Number of ReLU layers.
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn weight_bound(&self) -> f64 {
        self.weight_bound
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.input_dim() {
            return Err(LearningError::ShapeMismatch(format!("input of length {}, expected {}", x.len(), self.input_dim())));
        }
        let mut h = x.to_vec();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            h = layer.apply(&h);
            if l < last {
                h.iter_mut().for_each(|v| *v = v.max(0.0));
            }
        }
        Ok(h[0])
    }

    /// `B L W^2` as stated for the class of width-`W`, depth-`L` networks
    /// with entries bounded by `B`.
    ///
    /// This is not an upper bound on the Lipschitz constant in general: a
    /// chain of scalar layers with weight `B` has slope `B^{L+1}`.
    pub fn lip_bound(&self) -> f64 {
        self.weight_bound * self.depth() as f64 * (self.width * self.width) as f64
    }

    /// `72 K (ceil(Lambda*) + 2) B + 1`, the discretized form for width 6.
    pub fn corollary_lip_bound(k_dict: usize, lambda_star: f64, weight_bound: f64) -> f64 {
        72.0 * k_dict as f64 * (lambda_star.ceil() + 2.0) * weight_bound + 1.0
    }

    pub fn to_document(&self) -> MlpDocument {
        MlpDocument { layers: self.layers.clone(), weight_bound: self.weight_bound, width: self.width }
    }

    pub fn from_document(doc: MlpDocument) -> Result<Self> {
        Self::new(doc.layers, doc.width, doc.weight_bound)
    }
}

/// Depth `2 K (ceil(Lambda*) + 2)` used for width 6.
pub fn corollary_depth(k_dict: usize, lambda_star: f64) -> usize {
    2 * k_dict * (lambda_star.ceil() as usize + 2)
}

/// Depth `2 (ceil(Lambda*) + 2) floor(K / floor((W - 2) / 4))` for general
/// width `W >= 6`.
pub fn general_depth(k_dict: usize, lambda_star: f64, width: usize) -> Option<usize> {
    let per = width.checked_sub(2)? / 4;
    (per > 0).then(|| 2 * (lambda_star.ceil() as usize + 2) * (k_dict / per))
}
