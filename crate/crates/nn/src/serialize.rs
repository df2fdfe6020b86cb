//! Model files: a JSON header followed by the raw little-endian f64
//! parameter blob.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::network::Network;
use crate::spec::NetworkSpec;
use crate::train::EpochStats;
use crate::NnError;

const MAGIC: &[u8; 8] = b"ENTMODL1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelHeader {
    pub spec: NetworkSpec,
    pub input_columns: Option<Vec<usize>>,
    pub order_invariant_first: bool,
    #[serde(default)]
    pub registry_name: Option<String>,
    #[serde(default)]
    pub variant_note: Option<String>,
    #[serde(default)]
    pub train_seed: Option<u64>,
    #[serde(default)]
    pub final_train_acc: Option<f64>,
    #[serde(default)]
    pub final_test_acc: Option<f64>,
}

/// Saves a model. History, when given, is embedded in the header.
pub fn save_model(
    path: &Path,
    net: &Network,
    header_extra: ModelHeader,
) -> Result<(), NnError> {
    let header = ModelHeader {
        spec: net.spec().clone(),
        input_columns: net.input_columns.clone(),
        order_invariant_first: net.order_invariant_first,
        ..header_extra
    };
    let json = serde_json::to_vec(&header)?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(json.len() as u64).to_le_bytes())?;
    w.write_all(&json)?;
    w.write_all(&(net.params.len() as u64).to_le_bytes())?;
    for p in &net.params {
        w.write_all(&p.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<(Network, ModelHeader), NnError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(NnError::BadModelFile("bad magic".into()));
    }
    let json_len = read_u64(&mut r)? as usize;
    let mut json = vec![0u8; json_len];
    r.read_exact(&mut json)?;
    let header: ModelHeader = serde_json::from_slice(&json)?;
    let n_params = read_u64(&mut r)? as usize;
    let mut net = Network::from_spec(&header.spec, 0)?;
    if net.params.len() != n_params {
        return Err(NnError::BadModelFile(format!(
            "parameter count {} does not match spec ({})",
            n_params,
            net.params.len()
        )));
    }
    let mut buf = [0u8; 8];
    for p in &mut net.params {
        r.read_exact(&mut buf)?;
        *p = f64::from_le_bytes(buf);
    }
    net.input_columns = header.input_columns.clone();
    net.order_invariant_first = header.order_invariant_first;
    Ok((net, header))
}

fn read_u64(r: &mut impl Read) -> Result<u64, NnError> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

/// Writes per-epoch training history as CSV.
pub fn write_history_csv(path: &Path, history: &[EpochStats]) -> Result<(), NnError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "epoch,train_acc,test_acc,train_loss,test_loss")?;
    for s in history {
        writeln!(
            w,
            "{},{},{},{},{}",
            s.epoch, s.train_acc, s.test_acc, s.train_loss, s.test_loss
        )?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::LayerSpec;

    #[test]
    fn save_load_round_trip_is_exact() {
        let spec = NetworkSpec::new(
            6,
            vec![LayerSpec::dense_relu(5), LayerSpec::head(2)],
            2,
        )
        .unwrap();
        let mut net = Network::from_spec(&spec, 77).unwrap();
        net.input_columns = Some(vec![0, 2, 4, 6, 8, 10]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.bin");
        save_model(
            &path,
            &net,
            ModelHeader {
                spec: spec.clone(),
                input_columns: None,
                order_invariant_first: false,
                registry_name: Some("test".into()),
                variant_note: None,
                train_seed: Some(77),
                final_train_acc: Some(0.5),
                final_test_acc: Some(0.5),
            },
        )
        .unwrap();
        let (loaded, header) = load_model(&path).unwrap();
        assert_eq!(loaded.params, net.params);
        assert_eq!(loaded.spec(), net.spec());
        assert_eq!(loaded.input_columns, net.input_columns);
        assert_eq!(header.registry_name.as_deref(), Some("test"));
    }
}
