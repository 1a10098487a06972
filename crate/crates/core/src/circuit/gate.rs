use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

const UNITARY_TOL: f64 = 1e-9;

/// Gates that can be referred to by name in circuit files.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NamedGate {
    H,
    X,
    Y,
    Z,
    S,
    T,
    Cz,
    Cnot,
    Swap,
    Rz(f64),
    Ry(f64),
}

impl NamedGate {
    pub fn arity(&self) -> usize {
        match self {
            NamedGate::Cz | NamedGate::Cnot | NamedGate::Swap => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NamedGate::H => "H",
            NamedGate::X => "X",
            NamedGate::Y => "Y",
            NamedGate::Z => "Z",
            NamedGate::S => "S",
            NamedGate::T => "T",
            NamedGate::Cz => "CZ",
            NamedGate::Cnot => "CNOT",
            NamedGate::Swap => "SWAP",
            NamedGate::Rz(_) => "RZ",
            NamedGate::Ry(_) => "RY",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            NamedGate::Rz(t) | NamedGate::Ry(t) => vec![t],
            _ => Vec::new(),
        }
    }

    /// Look a gate up by (case-insensitive) name and parameter list.
    pub fn from_name(name: &str, params: &[f64]) -> Option<Self> {
        let upper = name.to_ascii_uppercase();
        let gate = match (upper.as_str(), params) {
            ("H", []) => NamedGate::H,
            ("X", []) => NamedGate::X,
            ("Y", []) => NamedGate::Y,
            ("Z", []) => NamedGate::Z,
            ("S", []) => NamedGate::S,
            ("T", []) => NamedGate::T,
            ("CZ", []) => NamedGate::Cz,
            ("CNOT" | "CX", []) => NamedGate::Cnot,
            ("SWAP", []) => NamedGate::Swap,
            ("RZ", [t]) => NamedGate::Rz(*t),
            ("RY", [t]) => NamedGate::Ry(*t),
            _ => return None,
        };
        Some(gate)
    }

    /// Row-major unitary. For two-qubit gates the first target is the more
    /// significant bit; CNOT is controlled on the first target.
    pub fn matrix(&self) -> Vec<Complex64> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
        match *self {
            NamedGate::H => {
                let h = c(FRAC_1_SQRT_2, 0.0);
                vec![h, h, h, -h]
            }
            NamedGate::X => vec![z, o, o, z],
            NamedGate::Y => vec![z, c(0.0, -1.0), c(0.0, 1.0), z],
            NamedGate::Z => vec![o, z, z, -o],
            NamedGate::S => vec![o, z, z, c(0.0, 1.0)],
            NamedGate::T => vec![o, z, z, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
            NamedGate::Rz(t) => vec![
                Complex64::from_polar(1.0, -t / 2.0),
                z,
                z,
                Complex64::from_polar(1.0, t / 2.0),
            ],
            NamedGate::Ry(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                vec![c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]
            }
            NamedGate::Cz => diag4([o, o, o, -o]),
            NamedGate::Cnot => permutation4([0, 1, 3, 2]),
            NamedGate::Swap => permutation4([0, 2, 1, 3]),
        }
    }
}

fn diag4(d: [Complex64; 4]) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(0.0, 0.0); 16];
    for (i, v) in d.into_iter().enumerate() {
        m[i * 4 + i] = v;
    }
    m
}

/// Matrix with `m[perm[c]][c] = 1`.
fn permutation4(perm: [usize; 4]) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(0.0, 0.0); 16];
    for (col, &row) in perm.iter().enumerate() {
        m[row * 4 + col] = Complex64::new(1.0, 0.0);
    }
    m
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    Named(NamedGate),
    /// Explicit matrix; the label is kept only for round-tripping files.
    Matrix { label: String },
}

/// A one- or two-qubit gate together with its unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    targets: Vec<usize>,
    kind: GateKind,
    matrix: Vec<Complex64>,
}

impl Gate {
    pub fn named(gate: NamedGate, targets: &[usize]) -> Self {
        Self { targets: targets.to_vec(), kind: GateKind::Named(gate), matrix: gate.matrix() }
    }

    /// Gate given by an explicit row-major `2^k x 2^k` matrix.
    pub fn unitary(label: impl Into<String>, targets: &[usize], matrix: Vec<Complex64>) -> Self {
        Self { targets: targets.to_vec(), kind: GateKind::Matrix { label: label.into() }, matrix }
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    /// Largest entry of `|U†U - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }

    pub(crate) fn is_unitary(&self) -> bool {
        self.matrix.len() == 1 << (2 * self.targets.len()) && self.unitarity_deviation() <= UNITARY_TOL
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GateKind::Named(g) => write!(f, "{}{:?}", g.name(), self.targets),
            GateKind::Matrix { label } => write!(f, "{label}{:?}", self.targets),
        }
    }
}

pub fn unitarity_deviation(m: &[Complex64]) -> f64 {
    let dim = (m.len() as f64).sqrt() as usize;
    if dim * dim != m.len() {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                acc += m[k * dim + i].conj() * m[k * dim + j];
            }
            if i == j {
                acc -= 1.0;
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}
