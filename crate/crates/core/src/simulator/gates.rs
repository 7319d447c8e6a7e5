use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    RY,
    RZ,
    CRY,
    CRZ,
    X,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::RY | GateKind::RZ | GateKind::X => 1,
            GateKind::CRY | GateKind::CRZ => 2,
        }
    }

    pub fn is_parameterized(self) -> bool {
        !matches!(self, GateKind::X)
    }

    pub fn is_controlled(self) -> bool {
        matches!(self, GateKind::CRY | GateKind::CRZ)
    }
}

/// One gate of a circuit. For controlled kinds `targets[0]` is the control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub angle: Option<f64>,
}

impl GateOp {
    pub fn ry(qubit: usize, angle: f64) -> Self {
        Self::rotation(GateKind::RY, vec![qubit], angle)
    }

    pub fn rz(qubit: usize, angle: f64) -> Self {
        Self::rotation(GateKind::RZ, vec![qubit], angle)
    }

    pub fn cry(control: usize, target: usize, angle: f64) -> Self {
        Self::rotation(GateKind::CRY, vec![control, target], angle)
    }

    pub fn crz(control: usize, target: usize, angle: f64) -> Self {
        Self::rotation(GateKind::CRZ, vec![control, target], angle)
    }

    pub fn x(qubit: usize) -> Self {
        Self {
            kind: GateKind::X,
            targets: vec![qubit],
            angle: None,
        }
    }

    fn rotation(kind: GateKind, targets: Vec<usize>, angle: f64) -> Self {
        Self {
            kind,
            targets,
            angle: Some(angle),
        }
    }

    pub fn arity(&self) -> usize {
        self.kind.arity()
    }

    /// Checks arity, angle presence and that every target is distinct and
    /// below `n_qubits`.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.targets.len() != self.kind.arity() {
            return Err(Error::Index(format!(
                "{:?} expects {} target(s), got {}",
                self.kind,
                self.kind.arity(),
                self.targets.len()
            )));
        }
        if let Some(&q) = self.targets.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::Index(format!(
                "qubit {q} out of range for a {n_qubits}-qubit state"
            )));
        }
        if self.targets.len() == 2 && self.targets[0] == self.targets[1] {
            return Err(Error::Index(format!(
                "control and target coincide on qubit {}",
                self.targets[0]
            )));
        }
        match (self.kind.is_parameterized(), self.angle) {
            (true, None) => Err(Error::Argument(format!("{:?} requires an angle", self.kind))),
            (true, Some(a)) if !a.is_finite() => {
                Err(Error::Argument(format!("{:?} angle is not finite", self.kind)))
            }
            _ => Ok(()),
        }
    }

    /// The 2x2 matrix acting on the (target) qubit, row-major.
    pub fn target_matrix(&self) -> [[Complex64; 2]; 2] {
        let theta = self.angle.unwrap_or(0.0);
        match self.kind {
            GateKind::RY | GateKind::CRY => ry_matrix(theta),
            GateKind::RZ | GateKind::CRZ => rz_matrix(theta),
            GateKind::X => pauli_matrix(Pauli::X),
        }
    }
}

/// `exp(-i theta Y / 2)`.
pub fn ry_matrix(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// `exp(-i theta Z / 2)`.
pub fn rz_matrix(theta: f64) -> [[Complex64; 2]; 2] {
    let zero = Complex64::new(0.0, 0.0);
    [
        [Complex64::from_polar(1.0, -theta / 2.0), zero],
        [zero, Complex64::from_polar(1.0, theta / 2.0)],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
}

pub fn pauli_matrix(p: Pauli) -> [[Complex64; 2]; 2] {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match p {
        Pauli::I => [[l, o], [o, l]],
        Pauli::X => [[o, l], [l, o]],
        Pauli::Y => [[o, -i], [i, o]],
        Pauli::Z => [[l, o], [o, -l]],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_rejects_bad_targets() {
        assert!(GateOp::ry(2, 0.1).validate(2).is_err());
        assert!(GateOp::cry(1, 1, 0.1).validate(3).is_err());
        assert!(GateOp::cry(0, 1, 0.1).validate(2).is_ok());
        let bad = GateOp {
            kind: GateKind::RZ,
            targets: vec![0],
            angle: None,
        };
        assert!(matches!(bad.validate(1), Err(Error::Argument(_))));
        let wrong_arity = GateOp {
            kind: GateKind::CRZ,
            targets: vec![0],
            angle: Some(0.0),
        };
        assert!(matches!(wrong_arity.validate(2), Err(Error::Index(_))));
    }

    #[test]
    fn rotation_matrices_are_unitary() {
        for theta in [-2.0, 0.0, 0.3, 3.1] {
            for m in [ry_matrix(theta), rz_matrix(theta)] {
                for r in 0..2 {
                    for c in 0..2 {
                        let dot: Complex64 = (0..2).map(|k| m[k][r].conj() * m[k][c]).sum();
                        let expect = if r == c { 1.0 } else { 0.0 };
                        assert!((dot.re - expect).abs() < 1e-14 && dot.im.abs() < 1e-14);
                    }
                }
            }
        }
    }
}
