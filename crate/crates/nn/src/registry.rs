//! Named reference architectures and their training defaults.
//!
//! Where the sources disagreed on an architecture, the registry ships both
//! variants; the non-default one carries a note that lands in run metadata.

use crate::spec::{LayerSpec, NetworkSpec};
use crate::train::TrainConfig;
use crate::NnError;

#[derive(Debug, Clone)]
pub struct ArchInfo {
    pub name: &'static str,
    pub classes: usize,
    pub description: &'static str,
    pub variant_note: Option<&'static str>,
}

const ARCHS: &[ArchInfo] = &[
    ArchInfo {
        name: "2q-pure-cnn",
        classes: 2,
        description: "1D CNN (4,8,8,8 filters, k3 s1 p1) + dense 64 for two-qubit pure states",
        variant_note: None,
    },
    ArchInfo {
        name: "3q-pure-cnn",
        classes: 6,
        description: "1D CNN (32,16,8,8,8 filters) + dense 128,64 for three-qubit pure states",
        variant_note: None,
    },
    ArchInfo {
        name: "3q-pure-cnn-deep",
        classes: 6,
        description: "variant: 1D CNN (4 + seven 8-filter layers) + dense 128,64",
        variant_note: Some("alternate published layout; default is 3q-pure-cnn"),
    },
    ArchInfo {
        name: "2q-mixed-dnn",
        classes: 2,
        description: "DNN 256,64 for two-qubit mixed states",
        variant_note: None,
    },
    ArchInfo {
        name: "2q-mixed-cnn",
        classes: 2,
        description: "variant: 1D CNN (64 filters, k9 s1 p4) + dense 256,64",
        variant_note: Some("CNN comparison baseline; default is 2q-mixed-dnn"),
    },
    ArchInfo {
        name: "3q-mixed-dnn",
        classes: 2,
        description: "DNN with a single 8-unit hidden layer for three-qubit mixed states",
        variant_note: None,
    },
    ArchInfo {
        name: "3q-mixed-dnn-wide",
        classes: 2,
        description: "variant: DNN with one 82-unit hidden layer",
        variant_note: Some("alternate published layout; default is 3q-mixed-dnn"),
    },
];

pub fn registry_names() -> Vec<&'static str> {
    ARCHS.iter().map(|a| a.name).collect()
}

pub fn arch_info(name: &str) -> Result<&'static ArchInfo, NnError> {
    ARCHS
        .iter()
        .find(|a| a.name == name)
        .ok_or_else(|| NnError::UnknownArchitecture(name.to_string()))
}

/// Builds the named architecture for a given input width (measurement
/// reduction trains the same stack on fewer inputs).
pub fn registry_spec(name: &str, input_dim: usize) -> Result<NetworkSpec, NnError> {
    let layers = match name {
        "2q-pure-cnn" => conv_stack(&[4, 8, 8, 8], &[64], 2),
        "3q-pure-cnn" => conv_stack(&[32, 16, 8, 8, 8], &[128, 64], 6),
        "3q-pure-cnn-deep" => conv_stack(&[4, 8, 8, 8, 8, 8, 8, 8], &[128, 64], 6),
        "2q-mixed-dnn" => dense_stack(&[256, 64], 2),
        "2q-mixed-cnn" => {
            let mut layers = vec![LayerSpec::Conv1d {
                filters: 64,
                kernel: 9,
                stride: 1,
                padding: 4,
                activation: crate::spec::Activation::Relu,
            }];
            layers.push(LayerSpec::Flatten);
            layers.extend([256, 64].iter().map(|&u| LayerSpec::dense_relu(u)));
            layers.push(LayerSpec::head(2));
            layers
        }
        "3q-mixed-dnn" => dense_stack(&[8], 2),
        "3q-mixed-dnn-wide" => dense_stack(&[82], 2),
        other => return Err(NnError::UnknownArchitecture(other.to_string())),
    };
    let classes = arch_info(name)?.classes;
    NetworkSpec::new(input_dim, layers, classes)
}

fn conv_stack(filters: &[usize], hidden: &[usize], classes: usize) -> Vec<LayerSpec> {
    let mut layers: Vec<LayerSpec> = filters.iter().map(|&f| LayerSpec::conv(f)).collect();
    layers.push(LayerSpec::Flatten);
    layers.extend(hidden.iter().map(|&u| LayerSpec::dense_relu(u)));
    layers.push(LayerSpec::head(classes));
    layers
}

fn dense_stack(hidden: &[usize], classes: usize) -> Vec<LayerSpec> {
    let mut layers: Vec<LayerSpec> = hidden.iter().map(|&u| LayerSpec::dense_relu(u)).collect();
    layers.push(LayerSpec::head(classes));
    layers
}

/// Training defaults: two phases at 1e-3 then 1e-4, batch 64. Pure-state
/// CNNs run 100+50 epochs; mixed-state DNNs run 50+10.
pub fn default_train_config(name: &str, seed: u64) -> Result<TrainConfig, NnError> {
    arch_info(name)?;
    let phases = if name.contains("pure") {
        vec![(1e-3, 100), (1e-4, 50)]
    } else {
        vec![(1e-3, 50), (1e-4, 10)]
    };
    Ok(TrainConfig::new(phases, 64, seed))
}
