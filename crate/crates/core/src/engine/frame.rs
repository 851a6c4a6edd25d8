//! Pauli-frame fast path.
//!
//! All gates are Clifford and all faults are Pauli, so a pattern's branch
//! equals a residual Pauli applied to the ideal conditional branch with some
//! readout outcomes flipped. For the GHZ-ancilla blocks every readout string
//! carries the same 1/(2*sqrt(2)) amplitude and projects the data by the
//! string's parity, so the ideal branches reduce to stabilizer sign
//! projectors applied to the input state.

use crate::circuit::{Circuit, Disposition, FaultPattern, FrameBase, ReadoutRole, StepOp};
use crate::dense;
use crate::pauli::PauliFrame;
use crate::steane;
use num_complex::Complex64;

const GHZ_BLOCK_AMP: f64 = 0.5 * dense::SQRT_HALF; // 1 / (2 sqrt 2)

/// Propagate the pattern's Paulis through the circuit. Returns the residual
/// frame on the surviving qubits and the per-block readout flip parities, or
/// `None` if a deterministic verification readout is flipped.
pub fn propagate(c: &Circuit, pattern: &FaultPattern) -> Option<(PauliFrame, Vec<u8>)> {
    let mut frame = PauliFrame::identity();
    let mut block_flips = vec![0u8; c.blocks.len()];

    for step in &c.steps {
        let chosen = step.location.and_then(|loc| {
            pattern
                .choices
                .iter()
                .find(|&&(l, _)| l == loc)
                .map(|&(l, e)| &c.locations[l].events[e])
        });
        match &step.op {
            StepOp::Init(q) => {
                frame.clear(*q);
            }
            StepOp::Hadamard(q) => frame.apply_h(*q),
            StepOp::Cnot { control, target } => frame.apply_cnot(*control, *target),
            StepOp::Recovery { .. } | StepOp::InputMixture => {}
            StepOp::MeasureZ { qubit, disp } | StepOp::MeasureX { qubit, disp } => {
                if let Some(ev) = chosen {
                    for &(q, p) in &ev.paulis {
                        frame.insert(q, p);
                    }
                }
                let flipped = if matches!(step.op, StepOp::MeasureZ { .. }) {
                    frame.x_on(*qubit)
                } else {
                    frame.z_on(*qubit)
                };
                frame.clear(*qubit);
                match disp {
                    Disposition::Postselect { role: ReadoutRole::Verification, .. } => {
                        if flipped {
                            return None;
                        }
                    }
                    Disposition::Postselect { role: ReadoutRole::Block { block, .. }, .. } => {
                        if flipped {
                            block_flips[*block] ^= 1;
                        }
                    }
                    Disposition::Record { .. } => {
                        unreachable!("recorded measurements are not used by these protocols")
                    }
                }
                continue;
            }
        }
        // Noise strikes after the step for non-measurement operations.
        if let Some(ev) = chosen {
            for &(q, p) in &ev.paulis {
                frame.insert(q, p);
            }
        }
    }
    Some((frame, block_flips))
}

/// Reconstruct the pattern's unnormalized final state from the frame data.
pub fn run_pattern(c: &Circuit, pattern: &FaultPattern) -> (f64, Option<Vec<Complex64>>) {
    let Some((frame, block_flips)) = propagate(c, pattern) else {
        return (0.0, None);
    };

    // Effective stabilizer sign per block: demanded readout parity combined
    // with the pattern's flips.
    let mut base: Vec<Complex64> = match c.frame_base {
        FrameBase::Ghz4 => {
            let mut v = vec![Complex64::ZERO; 16];
            v[0b0000] = Complex64::new(dense::SQRT_HALF, 0.0);
            v[0b1111] = Complex64::new(dense::SQRT_HALF, 0.0);
            v
        }
        FrameBase::Encoded { alpha, beta } => {
            // The input is syndrome-definite with every stabilizer at +1; a
            // block whose effective sign is -1 annihilates the branch.
            for (b, block) in c.blocks.iter().enumerate() {
                if block.demanded_parity ^ block_flips[b] != 0 {
                    return (0.0, None);
                }
            }
            steane::logical_state(alpha, beta)
        }
        FrameBase::DataZero => {
            // |0..0> input: X-stabilizer signs are free, but the two repeats
            // of one syndrome must agree or the projectors annihilate.
            let mut sign: [Option<u8>; 3] = [None; 3];
            for (b, block) in c.blocks.iter().enumerate() {
                let s = block.demanded_parity ^ block_flips[b];
                match sign[block.stab] {
                    None => sign[block.stab] = Some(s),
                    Some(prev) if prev == s => {}
                    Some(_) => return (0.0, None),
                }
            }
            let mut v = vec![Complex64::ZERO; steane::DATA_DIM];
            v[0] = Complex64::ONE;
            for (stab, s) in sign.iter().enumerate() {
                if let Some(s) = s {
                    project_x_sign(&mut v, steane::STAB_MASKS[stab] as usize, *s);
                }
            }
            v
        }
    };

    // Ideal branch includes the recovery; the residual frame rides on top.
    for &(q, p) in &c.recoveries {
        let bit = c.output_qubits.iter().position(|&oq| oq == q).unwrap();
        dense::apply_pauli(&mut base, bit as u8, p);
    }
    for (bit, &q) in c.output_qubits.iter().enumerate() {
        let p = frame.pauli_at(q);
        dense::apply_pauli(&mut base, bit as u8, p);
    }

    let amp = GHZ_BLOCK_AMP.powi(c.ghz_block_count() as i32);
    if (amp - 1.0).abs() > f64::EPSILON {
        for a in &mut base {
            *a *= amp;
        }
    }
    let weight = dense::norm_sq(&base);
    if weight == 0.0 {
        return (0.0, None);
    }
    (weight, Some(base))
}

/// Apply (I + (-1)^sign X_mask) / 2 in place.
fn project_x_sign(v: &mut [Complex64], mask: usize, sign: u8) {
    let s = if sign == 0 { 1.0 } else { -1.0 };
    for i in 0..v.len() {
        let j = i ^ mask;
        if i < j {
            let a = v[i];
            let b = v[j];
            v[i] = (a + s * b) * 0.5;
            v[j] = (b + s * a) * 0.5;
        }
    }
}
