//! Serializable network architecture descriptions.

use serde::{Deserialize, Serialize};

use crate::NnError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
    Sigmoid,
    None,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    z
                } else {
                    0.0
                }
            }
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::None => z,
        }
    }

    /// Derivative expressed through the post-activation value.
    #[inline]
    pub fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
            Activation::Sigmoid => y * (1.0 - y),
            Activation::None => 1.0,
        }
    }

    /// Derivative at a pre-activation point (reference fallback for
    /// attribution multipliers).
    #[inline]
    pub fn derivative_at(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => {
                let y = z.tanh();
                1.0 - y * y
            }
            Activation::Sigmoid => {
                let y = 1.0 / (1.0 + (-z).exp());
                y * (1.0 - y)
            }
            Activation::None => 1.0,
        }
    }
}

/// One architecture element. Convolution and pooling layers, when present,
/// must precede the dense section; the final layer is the dense softmax head
/// with one unit per class and no activation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LayerSpec {
    Dense {
        units: usize,
        activation: Activation,
    },
    Conv1d {
        filters: usize,
        #[serde(default = "default_kernel")]
        kernel: usize,
        #[serde(default = "default_stride")]
        stride: usize,
        #[serde(default = "default_padding")]
        padding: usize,
        activation: Activation,
    },
    Flatten,
    /// Non-overlapping max pooling (window = stride = size). Kept for the
    /// hyperparameter sweeps; rejected for the final models.
    MaxPool1d { size: usize },
    /// Non-overlapping average pooling.
    AvgPool1d { size: usize },
}

fn default_kernel() -> usize {
    3
}
fn default_stride() -> usize {
    1
}
fn default_padding() -> usize {
    1
}

impl LayerSpec {
    pub fn conv(filters: usize) -> Self {
        LayerSpec::Conv1d {
            filters,
            kernel: 3,
            stride: 1,
            padding: 1,
            activation: Activation::Relu,
        }
    }

    pub fn dense_relu(units: usize) -> Self {
        LayerSpec::Dense {
            units,
            activation: Activation::Relu,
        }
    }

    pub fn head(classes: usize) -> Self {
        LayerSpec::Dense {
            units: classes,
            activation: Activation::None,
        }
    }
}

/// Complete architecture: input width, ordered layers, class count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub input_dim: usize,
    pub layers: Vec<LayerSpec>,
    pub classes: usize,
}

impl NetworkSpec {
    pub fn new(input_dim: usize, layers: Vec<LayerSpec>, classes: usize) -> Result<Self, NnError> {
        let spec = Self {
            input_dim,
            layers,
            classes,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Same layers on a different input width (measurement-reduction resizes
    /// only the input layer).
    pub fn with_input_dim(&self, input_dim: usize) -> Result<Self, NnError> {
        Self::new(input_dim, self.layers.clone(), self.classes)
    }

    pub fn validate(&self) -> Result<(), NnError> {
        if self.input_dim == 0 {
            return Err(NnError::BadSpec("input_dim must be positive".into()));
        }
        if self.classes < 2 {
            return Err(NnError::BadSpec("need at least two classes".into()));
        }
        if self.layers.is_empty() {
            return Err(NnError::BadSpec("no layers".into()));
        }
        let mut seen_dense = false;
        for layer in &self.layers {
            match layer {
                LayerSpec::Dense { units, .. } => {
                    if *units == 0 {
                        return Err(NnError::BadSpec("dense layer with zero units".into()));
                    }
                    seen_dense = true;
                }
                LayerSpec::Conv1d {
                    filters,
                    kernel,
                    stride,
                    ..
                } => {
                    if seen_dense {
                        return Err(NnError::BadSpec(
                            "convolution layers must precede the dense section".into(),
                        ));
                    }
                    if *filters == 0 || *kernel == 0 || *stride == 0 {
                        return Err(NnError::BadSpec("conv parameters must be positive".into()));
                    }
                }
                LayerSpec::MaxPool1d { size } | LayerSpec::AvgPool1d { size } => {
                    if seen_dense {
                        return Err(NnError::BadSpec(
                            "pooling layers must precede the dense section".into(),
                        ));
                    }
                    if *size == 0 {
                        return Err(NnError::BadSpec("pool size must be positive".into()));
                    }
                }
                LayerSpec::Flatten => {}
            }
        }
        match self.layers.last() {
            Some(LayerSpec::Dense {
                units,
                activation: Activation::None,
            }) if *units == self.classes => Ok(()),
            _ => Err(NnError::BadSpec(format!(
                "final layer must be a linear dense head with {} units",
                self.classes
            ))),
        }
    }
}
