//! JSON circuit files.
//!
//! ```json
//! {
//!   "version": 1,
//!   "dims": [4],
//!   "p": 0.1,
//!   "layers": [
//!     [{"targets": [0, 1], "name": "CNOT"}],
//!     [{"targets": [1], "name": "RY", "params": [0.5]}]
//!   ]
//! }
//! ```
//!
//! A gate may carry `"matrix"`, a row-major nested array of `[re, im]`
//! pairs; when present it overrides `name`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Circuit, Gate, GateKind, NamedGate};
use crate::error::{Error, Result};
use crate::lattice::Lattice;

pub const CIRCUIT_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitFile {
    version: u32,
    dims: Vec<usize>,
    p: f64,
    layers: Vec<Vec<GateRecord>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateRecord {
    targets: Vec<usize>,
    name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<[f64; 2]>>>,
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let file: CircuitFile = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    if file.version != CIRCUIT_FORMAT_VERSION {
        return Err(Error::InvalidCircuit(format!(
            "unsupported format version {} (expected {CIRCUIT_FORMAT_VERSION})",
            file.version
        )));
    }
    let lattice = Lattice::new(&file.dims)?;
    let mut layers = Vec::with_capacity(file.layers.len());
    for (li, records) in file.layers.into_iter().enumerate() {
        let mut layer = Vec::with_capacity(records.len());
        for (gi, rec) in records.into_iter().enumerate() {
            layer.push(gate_from_record(rec).map_err(|msg| {
                Error::InvalidCircuit(format!("layer {li}, gate {gi}: {msg}"))
            })?);
        }
        layers.push(layer);
    }
    Circuit::new(lattice, layers, file.p)
}

fn gate_from_record(rec: GateRecord) -> std::result::Result<Gate, String> {
    match rec.matrix {
        Some(rows) => {
            let dim = rows.len();
            if rows.iter().any(|r| r.len() != dim) {
                return Err("matrix is not square".into());
            }
            if dim != 1 << rec.targets.len() {
                return Err(format!("{dim}x{dim} matrix does not match {} targets", rec.targets.len()));
            }
            let data = rows.iter().flatten().map(|&[re, im]| Complex64::new(re, im)).collect();
            Ok(Gate::unitary(rec.name, &rec.targets, data))
        }
        None => {
            let g = NamedGate::from_name(&rec.name, &rec.params)
                .ok_or_else(|| format!("unknown gate {:?} with {} params", rec.name, rec.params.len()))?;
            if g.arity() != rec.targets.len() {
                return Err(format!("{} expects {} targets, got {}", g.name(), g.arity(), rec.targets.len()));
            }
            Ok(Gate::named(g, &rec.targets))
        }
    }
}

fn record_of(gate: &Gate) -> GateRecord {
    match gate.kind() {
        GateKind::Named(g) => GateRecord {
            targets: gate.targets().to_vec(),
            name: g.name().to_string(),
            params: g.params(),
            matrix: None,
        },
        GateKind::Matrix { label } => {
            let dim = 1 << gate.targets().len();
            let rows = gate
                .matrix()
                .chunks(dim)
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect();
            GateRecord { targets: gate.targets().to_vec(), name: label.clone(), params: Vec::new(), matrix: Some(rows) }
        }
    }
}

/// Serialize to the file format, one layer per line.
pub fn serialize_circuit(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str(&format!("{{\n  \"version\": {CIRCUIT_FORMAT_VERSION},\n"));
    out.push_str(&format!("  \"dims\": {},\n", serde_json::to_string(circuit.lattice().dims()).unwrap()));
    out.push_str(&format!("  \"p\": {},\n", serde_json::to_string(&circuit.p()).unwrap()));
    out.push_str("  \"layers\": [");
    for (li, layer) in circuit.layers().iter().enumerate() {
        out.push_str(if li == 0 { "\n    [" } else { ",\n    [" });
        let gates: Vec<String> =
            layer.iter().map(|g| serde_json::to_string(&record_of(g)).unwrap()).collect();
        out.push_str(&gates.join(", "));
        out.push(']');
    }
    if circuit.depth() > 0 {
        out.push_str("\n  ");
    }
    out.push_str("]\n}\n");
    out
}

/// Hex SHA-256 of the canonical serialization.
pub fn circuit_hash(circuit: &Circuit) -> String {
    hex::encode(Sha256::digest(serialize_circuit(circuit).as_bytes()))
}
