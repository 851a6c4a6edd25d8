//! Reference engine: dense state-vector simulation of one fault pattern with
//! post-selection. Projections never renormalize; the squared norm of the
//! surviving branch is the pattern's acceptance weight.

use crate::circuit::{Circuit, Disposition, FaultPattern, FrameBase, StepOp, MAX_QUBITS};
use crate::dense::SQRT_HALF;
use crate::pauli::Pauli;
use crate::steane;
use num_complex::Complex64;

/// Dense amplitudes over the currently live qubits. Measured qubits are
/// projected onto the demanded outcome and dropped from the register, so the
/// vector never exceeds 2^12 amplitudes under workspace reuse.
pub struct BranchState {
    amps: Vec<Complex64>,
    positions: [Option<u8>; MAX_QUBITS as usize],
    live: u8,
}

impl BranchState {
    pub fn empty() -> Self {
        BranchState {
            amps: vec![Complex64::ONE],
            positions: [None; MAX_QUBITS as usize],
            live: 0,
        }
    }

    /// Start from an explicit state on the given qubits (qubit `qs[i]` is bit
    /// `i` of the amplitude index).
    pub fn with_state(qs: &[u8], amps: Vec<Complex64>) -> Self {
        assert_eq!(amps.len(), 1 << qs.len());
        let mut positions = [None; MAX_QUBITS as usize];
        for (i, &q) in qs.iter().enumerate() {
            positions[q as usize] = Some(i as u8);
        }
        BranchState { amps, positions, live: qs.len() as u8 }
    }

    fn pos(&self, q: u8) -> u8 {
        self.positions[q as usize].expect("operation on a dead qubit")
    }

    pub fn add_qubit(&mut self, q: u8) {
        assert!(self.positions[q as usize].is_none(), "qubit re-initialized while live");
        self.positions[q as usize] = Some(self.live);
        self.live += 1;
        self.amps.resize(1 << self.live, Complex64::ZERO);
    }

    pub fn h(&mut self, q: u8) {
        let pos = self.pos(q);
        crate::dense::apply_h(&mut self.amps, pos);
    }

    pub fn cnot(&mut self, c: u8, t: u8) {
        let (pc, pt) = (self.pos(c), self.pos(t));
        crate::dense::apply_cnot(&mut self.amps, pc, pt);
    }

    pub fn pauli(&mut self, q: u8, p: Pauli) {
        let pos = self.pos(q);
        crate::dense::apply_pauli(&mut self.amps, pos, p);
    }

    fn drop_position(&mut self, q: u8) -> u8 {
        let pos = self.pos(q);
        self.positions[q as usize] = None;
        for slot in self.positions.iter_mut().flatten() {
            if *slot > pos {
                *slot -= 1;
            }
        }
        self.live -= 1;
        pos
    }

    fn insert_bit(j: usize, pos: u8, b: usize) -> usize {
        let low = j & ((1 << pos) - 1);
        let high = j >> pos;
        (high << (pos + 1)) | (b << pos) | low
    }

    /// Project onto the Z-basis outcome and remove the qubit.
    pub fn measure_drop_z(&mut self, q: u8, outcome: u8) {
        let pos = self.drop_position(q);
        let n = 1usize << self.live;
        let mut out = vec![Complex64::ZERO; n];
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = self.amps[Self::insert_bit(j, pos, outcome as usize)];
        }
        self.amps = out;
    }

    /// Project onto the X-basis outcome (0 -> |+>, 1 -> |->) and remove the
    /// qubit.
    pub fn measure_drop_x(&mut self, q: u8, outcome: u8) {
        let pos = self.drop_position(q);
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        let n = 1usize << self.live;
        let mut out = vec![Complex64::ZERO; n];
        for (j, slot) in out.iter_mut().enumerate() {
            let a = self.amps[Self::insert_bit(j, pos, 0)];
            let b = self.amps[Self::insert_bit(j, pos, 1)];
            *slot = (a + sign * b) * SQRT_HALF;
        }
        self.amps = out;
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Gather amplitudes into the given qubit order (qubit `order[i]` becomes
    /// bit `i`).
    pub fn extract(&self, order: &[u8]) -> Vec<Complex64> {
        assert_eq!(order.len() as u8, self.live, "register does not match output qubits");
        let n = 1usize << order.len();
        let mut out = vec![Complex64::ZERO; n];
        for (j, slot) in out.iter_mut().enumerate() {
            let mut idx = 0usize;
            for (i, &q) in order.iter().enumerate() {
                if (j >> i) & 1 == 1 {
                    idx |= 1 << self.pos(q);
                }
            }
            *slot = self.amps[idx];
        }
        out
    }
}

/// Simulate the circuit with the pattern's Paulis inserted after their steps
/// (before the readout for measurement locations). Returns the acceptance
/// weight and the unnormalized final state over `circuit.output_qubits`.
pub fn run_pattern(c: &Circuit, pattern: &FaultPattern) -> (f64, Option<Vec<Complex64>>) {
    let mut state = match c.frame_base {
        FrameBase::Encoded { alpha, beta } => {
            BranchState::with_state(&[0, 1, 2, 3, 4, 5, 6], steane::logical_state(alpha, beta))
        }
        _ => BranchState::empty(),
    };

    for (step_idx, step) in c.steps.iter().enumerate() {
        let chosen = step.location.and_then(|loc| {
            pattern
                .choices
                .iter()
                .find(|&&(l, _)| l == loc)
                .map(|&(l, e)| &c.locations[l].events[e])
        });
        let _ = step_idx;
        match &step.op {
            StepOp::Init(q) => {
                state.add_qubit(*q);
                if let Some(ev) = chosen {
                    for &(q, p) in &ev.paulis {
                        state.pauli(q, p);
                    }
                }
            }
            StepOp::Hadamard(q) => {
                state.h(*q);
                if let Some(ev) = chosen {
                    for &(q, p) in &ev.paulis {
                        state.pauli(q, p);
                    }
                }
            }
            StepOp::Cnot { control, target } => {
                state.cnot(*control, *target);
                if let Some(ev) = chosen {
                    for &(q, p) in &ev.paulis {
                        state.pauli(q, p);
                    }
                }
            }
            StepOp::Recovery { qubit, pauli } => {
                state.pauli(*qubit, *pauli);
                if let Some(ev) = chosen {
                    for &(q, p) in &ev.paulis {
                        state.pauli(q, p);
                    }
                }
            }
            StepOp::InputMixture => {
                if let Some(ev) = chosen {
                    for &(q, p) in &ev.paulis {
                        state.pauli(q, p);
                    }
                }
            }
            StepOp::MeasureZ { qubit, disp } | StepOp::MeasureX { qubit, disp } => {
                // Measurement noise strikes before the ideal readout.
                if let Some(ev) = chosen {
                    for &(q, p) in &ev.paulis {
                        state.pauli(q, p);
                    }
                }
                let outcome = match disp {
                    Disposition::Postselect { outcome, .. } => *outcome,
                    Disposition::Record { .. } => {
                        unreachable!("recorded measurements are not used by these protocols")
                    }
                };
                if matches!(step.op, StepOp::MeasureZ { .. }) {
                    state.measure_drop_z(*qubit, outcome);
                } else {
                    state.measure_drop_x(*qubit, outcome);
                }
                if state.norm_sq() == 0.0 {
                    return (0.0, None);
                }
            }
        }
    }

    let weight = state.norm_sq();
    if weight == 0.0 {
        return (0.0, None);
    }
    (weight, Some(state.extract(&c.output_qubits)))
}
