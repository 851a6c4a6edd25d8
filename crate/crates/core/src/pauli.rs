//! Single-qubit Paulis and bitmask Pauli frames over a small register.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NONTRIVIAL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn has_x(&self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn has_z(&self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// Pauli operator on up to 32 qubits, stored as X/Z component bitmasks.
/// Phases are not tracked; every consumer works with |amplitude|^2 quantities
/// that are insensitive to a branch-global phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PauliFrame {
    pub x: u32,
    pub z: u32,
}

impl PauliFrame {
    pub fn identity() -> Self {
        PauliFrame::default()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn insert(&mut self, qubit: u8, p: Pauli) {
        if p.has_x() {
            self.x ^= 1 << qubit;
        }
        if p.has_z() {
            self.z ^= 1 << qubit;
        }
    }

    pub fn pauli_at(&self, qubit: u8) -> Pauli {
        match ((self.x >> qubit) & 1, (self.z >> qubit) & 1) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            (0, 1) => Pauli::Z,
            _ => unreachable!(),
        }
    }

    /// Conjugate through a Hadamard on `qubit`: X <-> Z.
    pub fn apply_h(&mut self, qubit: u8) {
        let m = 1u32 << qubit;
        let xb = self.x & m;
        let zb = self.z & m;
        self.x = (self.x & !m) | zb;
        self.z = (self.z & !m) | xb;
    }

    /// Conjugate through CNOT(control, target): X_c -> X_c X_t, Z_t -> Z_c Z_t.
    pub fn apply_cnot(&mut self, control: u8, target: u8) {
        if (self.x >> control) & 1 == 1 {
            self.x ^= 1 << target;
        }
        if (self.z >> target) & 1 == 1 {
            self.z ^= 1 << control;
        }
    }

    /// Drop all components on `qubit` (measured / discarded).
    pub fn clear(&mut self, qubit: u8) {
        let m = !(1u32 << qubit);
        self.x &= m;
        self.z &= m;
    }

    pub fn x_on(&self, qubit: u8) -> bool {
        (self.x >> qubit) & 1 == 1
    }

    pub fn z_on(&self, qubit: u8) -> bool {
        (self.z >> qubit) & 1 == 1
    }
}
