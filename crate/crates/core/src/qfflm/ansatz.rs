use serde::{Deserialize, Serialize};

use super::circuit::{Angle, Circuit, Op};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectra::EncodingSpec;
use crate::statevector::MAX_QUBITS;

/// Version tag written into serialized ansatz documents.
pub const ANSATZ_VERSION: &str = "ansatz-v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// `W₂ V(x) W₁` with variable `m` encoded on its own block of `N` qubits.
    Parallel,
    /// An initial trainable module followed by `blocks` reuploading blocks.
    /// Each block alternates encoding layers and trainable modules, with as
    /// many encoding layers as it takes to fit all variables.
    Serial { blocks: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entangler {
    /// `CNOT(s, s+1)` for consecutive qubits.
    #[default]
    Line,
    /// The line plus the wrap-around `CNOT(n, 1)`.
    Ring,
}

/// Trainable single-qubit rotation of one layer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rotation {
    /// `RZ(θ_z) RY(θ_y)` with parameters ordered `[θ_z, θ_y]`.
    #[default]
    Yz,
    /// `Rot(θ₁, θ₂, θ₃) = RZ(θ₁) RY(θ₂) RZ(θ₃)`.
    Rot,
}

impl Rotation {
    pub fn params(self) -> usize {
        match self {
            Rotation::Yz => 2,
            Rotation::Rot => 3,
        }
    }
}

/// Gate carrying data in serial encoding layers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodingGate {
    /// One feature per gate, `RZ(β x)`.
    #[default]
    Rz,
    /// Three features per gate, `Rot(β x_a, β x_b, β x_c)`.
    Rot,
}

impl EncodingGate {
    pub fn features(self) -> usize {
        match self {
            EncodingGate::Rz => 1,
            EncodingGate::Rot => 3,
        }
    }
}

/// Full description of a layered variational circuit.
///
/// For [`Topology::Parallel`], `qubits` is the count per variable and each
/// encoding spec has one weight per qubit. For [`Topology::Serial`],
/// `qubits` is the register size and each encoding spec has one weight per
/// block. `encoding` holds one spec shared by every variable or one per
/// variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub variables: usize,
    pub qubits: usize,
    pub layers: usize,
    pub topology: Topology,
    #[serde(default)]
    pub entangler: Entangler,
    #[serde(default)]
    pub rotation: Rotation,
    #[serde(default)]
    pub encoding_gate: EncodingGate,
    pub encoding: Vec<EncodingSpec>,
    /// 1-based measured qubit; the last qubit when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured_qubit: Option<usize>,
}

impl AnsatzSpec {
    /// Parallel ansatz with the 2-parameter rotation and a CNOT line.
    pub fn parallel(variables: usize, qubits: usize, layers: usize, encoding: EncodingSpec) -> Self {
        Self {
            variables,
            qubits,
            layers,
            topology: Topology::Parallel,
            entangler: Entangler::Line,
            rotation: Rotation::Yz,
            encoding_gate: EncodingGate::Rz,
            encoding: vec![encoding],
            measured_qubit: None,
        }
    }

    /// Parallel ansatz with weights `3^(n-1)` on each variable.
    pub fn parallel_exponential(variables: usize, qubits: usize, layers: usize) -> Result<Self> {
        Ok(Self::parallel(variables, qubits, layers, EncodingSpec::exponential(qubits)?))
    }

    /// Serial reuploading ansatz.
    pub fn serial(
        variables: usize,
        qubits: usize,
        layers: usize,
        blocks: usize,
        encoding_gate: EncodingGate,
        block_weights: EncodingSpec,
    ) -> Self {
        Self {
            variables,
            qubits,
            layers,
            topology: Topology::Serial { blocks },
            entangler: Entangler::Line,
            rotation: Rotation::Rot,
            encoding_gate,
            encoding: vec![block_weights],
            measured_qubit: None,
        }
    }

    /// Six qubits, 36 Coulomb features, three blocks of two `Rot`-encoding
    /// layers each. Block weights are `(1, 3, 9)` or `(1, 1, 1)`.
    pub fn molecular_preset(layers: usize, exponential: bool) -> Self {
        let w = if exponential { vec![1, 3, 9] } else { vec![1, 1, 1] };
        Self::serial(36, 6, layers, 3, EncodingGate::Rot, EncodingSpec::new(w).expect("valid"))
    }

    /// Eight qubits, eight features, three blocks of one `RZ` layer each, with
    /// `Rot` trainable rotations and ring entanglers.
    pub fn housing_preset(layers: usize, exponential: bool) -> Self {
        let w = if exponential { vec![1, 3, 9] } else { vec![1, 1, 1] };
        let mut s =
            Self::serial(8, 8, layers, 3, EncodingGate::Rz, EncodingSpec::new(w).expect("valid"));
        s.entangler = Entangler::Ring;
        s
    }

    pub fn total_qubits(&self) -> usize {
        match self.topology {
            Topology::Parallel => self.variables.saturating_mul(self.qubits),
            Topology::Serial { .. } => self.qubits,
        }
    }

    pub fn measured(&self) -> usize {
        self.measured_qubit.unwrap_or(self.total_qubits())
    }

    /// Encoding layers per serial block.
    pub fn layers_per_block(&self) -> usize {
        let slots = self.qubits * self.encoding_gate.features();
        if slots == 0 {
            return 0;
        }
        self.variables.div_ceil(slots)
    }

    /// Number of trainable modules `W`.
    pub fn trainable_modules(&self) -> usize {
        match self.topology {
            Topology::Parallel => 2,
            Topology::Serial { blocks } => 1 + blocks * self.layers_per_block(),
        }
    }

    /// Trainable parameter count `N_tp`.
    pub fn param_count(&self) -> usize {
        self.trainable_modules() * self.layers * self.total_qubits() * self.rotation.params()
    }

    pub fn encoding_for(&self, var: usize) -> &EncodingSpec {
        if self.encoding.len() == 1 {
            &self.encoding[0]
        } else {
            &self.encoding[var]
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_structure()?;
        let n = self.total_qubits();
        if n > MAX_QUBITS {
            return Err(Error::capacity(format!(
                "{n} qubits exceeds the simulator cap of {MAX_QUBITS}"
            )));
        }
        Ok(())
    }

    /// Checks everything except the simulator's qubit cap.
    pub fn validate_structure(&self) -> Result<()> {
        if self.variables == 0 || self.qubits == 0 {
            return Err(Error::arg("variables and qubits must be at least 1"));
        }
        let n = self.total_qubits();
        if self.encoding.len() != 1 && self.encoding.len() != self.variables {
            return Err(Error::arg(format!(
                "{} encoding specs for {} variables",
                self.encoding.len(),
                self.variables
            )));
        }
        let expected = match self.topology {
            Topology::Parallel => self.qubits,
            Topology::Serial { blocks } => {
                if blocks == 0 {
                    return Err(Error::arg("serial topology needs at least one block"));
                }
                blocks
            }
        };
        for (i, e) in self.encoding.iter().enumerate() {
            if e.len() != expected {
                return Err(Error::arg(format!(
                    "encoding spec {} has {} weights, expected {expected}",
                    i + 1,
                    e.len()
                )));
            }
        }
        if let Some(q) = self.measured_qubit {
            if q == 0 || q > n {
                return Err(Error::Index(format!("measured qubit {q} outside 1..={n}")));
            }
        }
        Ok(())
    }

    /// Lowers the spec to a flat circuit. Parameters are numbered by module,
    /// then layer, then qubit, then rotation slot.
    pub fn compile<T: Real>(&self) -> Result<Circuit<T>> {
        self.validate()?;
        let ops = self.lower()?;
        Circuit::new(self.total_qubits(), self.variables, self.param_count(), self.measured(), ops)
    }

    /// The operation list of [`compile`](Self::compile), available past the
    /// simulator's qubit cap for counting.
    pub fn lower<T: Real>(&self) -> Result<Vec<Op<T>>> {
        self.validate_structure()?;
        let mut b = Builder { ops: Vec::new(), next_param: 0, n: self.total_qubits() };
        match self.topology {
            Topology::Parallel => {
                self.trainable_module(&mut b);
                for m in 0..self.variables {
                    for (j, &w) in self.encoding_for(m).weights().iter().enumerate() {
                        b.ops.push(Op::Rz {
                            qubit: m * self.qubits + j + 1,
                            angle: Angle::Data { var: m, weight: w },
                        });
                    }
                }
                self.trainable_module(&mut b);
            }
            Topology::Serial { blocks } => {
                self.trainable_module(&mut b);
                for block in 0..blocks {
                    for layer in 0..self.layers_per_block() {
                        self.serial_encoding_layer(&mut b, block, layer);
                        self.trainable_module(&mut b);
                    }
                }
            }
        }
        debug_assert_eq!(b.next_param, self.param_count());
        Ok(b.ops)
    }

    fn trainable_module<T: Real>(&self, b: &mut Builder<T>) {
        for _ in 0..self.layers {
            for q in 1..=b.n {
                let p = b.next_param;
                match self.rotation {
                    Rotation::Yz => {
                        b.ops.push(Op::Ry { qubit: q, angle: Angle::Param(p + 1) });
                        b.ops.push(Op::Rz { qubit: q, angle: Angle::Param(p) });
                    }
                    Rotation::Rot => {
                        b.ops.push(Op::Rz { qubit: q, angle: Angle::Param(p + 2) });
                        b.ops.push(Op::Ry { qubit: q, angle: Angle::Param(p + 1) });
                        b.ops.push(Op::Rz { qubit: q, angle: Angle::Param(p) });
                    }
                }
                b.next_param += self.rotation.params();
            }
            for s in 1..b.n {
                b.ops.push(Op::Cnot { control: s, target: s + 1 });
            }
            if self.entangler == Entangler::Ring && b.n >= 2 {
                b.ops.push(Op::Cnot { control: b.n, target: 1 });
            }
        }
    }

    /// Encoding layer `layer` of block `block`: qubit `q` takes features
    /// `(layer·n + q - 1)·f ..` where `f` is the features per gate. Slots past
    /// the last variable are left empty.
    fn serial_encoding_layer<T: Real>(&self, b: &mut Builder<T>, block: usize, layer: usize) {
        let f = self.encoding_gate.features();
        for q in 1..=b.n {
            let first = (layer * b.n + q - 1) * f;
            let slot = |j: usize| -> Option<Angle<T>> {
                let var = first + j;
                (var < self.variables).then(|| Angle::Data {
                    var,
                    weight: self.encoding_for(var).weights()[block],
                })
            };
            match self.encoding_gate {
                EncodingGate::Rz => {
                    if let Some(a) = slot(0) {
                        b.ops.push(Op::Rz { qubit: q, angle: a });
                    }
                }
                EncodingGate::Rot => {
                    // Rot(a, b, c) applies RZ(c) first.
                    if let Some(a) = slot(2) {
                        b.ops.push(Op::Rz { qubit: q, angle: a });
                    }
                    if let Some(a) = slot(1) {
                        b.ops.push(Op::Ry { qubit: q, angle: a });
                    }
                    if let Some(a) = slot(0) {
                        b.ops.push(Op::Rz { qubit: q, angle: a });
                    }
                }
            }
        }
    }

    /// JSON document with a `version` tag.
    pub fn to_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        v.as_object_mut()
            .expect("struct serializes to an object")
            .insert("version".into(), ANSATZ_VERSION.into());
        Ok(serde_json::to_string_pretty(&v)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut v: serde_json::Value = serde_json::from_str(text)?;
        let obj = v
            .as_object_mut()
            .ok_or_else(|| Error::Validation("ansatz document must be an object".into()))?;
        match obj.remove("version") {
            Some(serde_json::Value::String(s)) if s == ANSATZ_VERSION => {}
            other => {
                return Err(Error::Validation(format!(
                    "ansatz version must be \"{ANSATZ_VERSION}\", found {other:?}"
                )))
            }
        }
        let spec: Self = serde_json::from_value(v)?;
        spec.validate()?;
        Ok(spec)
    }
}

struct Builder<T> {
    ops: Vec<Op<T>>,
    next_param: usize,
    n: usize,
}
