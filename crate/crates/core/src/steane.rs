//! [[7,1,3]] code assets: stabilizer tables, logical states, the
//! encoder/decoder convention, the syndrome-to-recovery map, and the fidelity
//! functionals evaluated on final states.

use crate::dense;
use crate::pauli::Pauli;
use num_complex::Complex64;

/// Stabilizer supports (0-based qubits). The same supports generate both the
/// X-type and Z-type stabilizers. Row order and bit significance are fixed so
/// that a single error on qubit `q` (1-based) yields syndrome bits
/// `s_i = [q in r_i]` with `q = s1 + 2 s2 + 4 s3`.
pub const STAB_SUPPORTS: [[u8; 4]; 3] = [[0, 2, 4, 6], [1, 2, 5, 6], [3, 4, 5, 6]];

/// Bitmask form of the supports.
pub const STAB_MASKS: [u32; 3] = [0b101_0101, 0b110_0110, 0b111_1000];

/// Logical X and Z supports (qubits 1..3, 0-based 0..2).
pub const LOGICAL_MASK: u32 = 0b000_0111;

pub const DATA_QUBITS: u8 = 7;
pub const DATA_DIM: usize = 1 << DATA_QUBITS;

/// The eight codewords of the even coset (bitmask form), generated by the
/// stabilizer supports.
pub fn even_codewords() -> [u32; 8] {
    let mut out = [0u32; 8];
    for (i, slot) in out.iter_mut().enumerate() {
        let mut m = 0u32;
        for (bit, mask) in STAB_MASKS.iter().enumerate() {
            if (i >> bit) & 1 == 1 {
                m ^= mask;
            }
        }
        *slot = m;
    }
    out
}

/// `cos(alpha)|0_L> + e^{i beta} sin(alpha)|1_L>` as a dense 128-amplitude
/// vector.
pub fn logical_state(alpha: f64, beta: f64) -> Vec<Complex64> {
    let mut v = vec![Complex64::ZERO; DATA_DIM];
    let a0 = Complex64::new(alpha.cos(), 0.0) / Complex64::new(8f64.sqrt(), 0.0);
    let a1 = Complex64::from_polar(alpha.sin(), beta) / Complex64::new(8f64.sqrt(), 0.0);
    for c in even_codewords() {
        v[c as usize] += a0;
        v[(c ^ LOGICAL_MASK) as usize] += a1;
    }
    v
}

/// Single-qubit state `cos(alpha)|0> + e^{i beta} sin(alpha)|1>`.
pub fn logical_target(alpha: f64, beta: f64) -> [Complex64; 2] {
    [
        Complex64::new(alpha.cos(), 0.0),
        Complex64::from_polar(alpha.sin(), beta),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    H(u8),
    Cnot(u8, u8),
}

/// Noiseless encoder circuit. Input qubit 0 carries the state to encode; the
/// other six start in |0>. Fans the seed onto qubits {0,5,6} and then builds
/// the stabilizer cosets from generator qubits 2, 1, 3.
///
/// The convention fixes the decoder frame: the logical-X representative is
/// X0 X5 X6 and the logical-Z representative is Z0 Z1 Z2, which is what the
/// reported single-qubit fidelities depend on.
pub fn encoder_gates() -> Vec<Gate> {
    use Gate::*;
    vec![
        Cnot(0, 5),
        Cnot(0, 6),
        H(2),
        Cnot(2, 0),
        Cnot(2, 4),
        Cnot(2, 6),
        H(1),
        Cnot(1, 2),
        Cnot(1, 5),
        Cnot(1, 6),
        H(3),
        Cnot(3, 4),
        Cnot(3, 5),
        Cnot(3, 6),
    ]
}

/// Noiseless decoder: exact inverse gate sequence (H and CNOT are involutions).
pub fn decoder_gates() -> Vec<Gate> {
    encoder_gates().into_iter().rev().collect()
}

pub fn apply_gates(v: &mut [Complex64], gates: &[Gate]) {
    for g in gates {
        match *g {
            Gate::H(q) => dense::apply_h(v, q),
            Gate::Cnot(c, t) => dense::apply_cnot(v, c, t),
        }
    }
}

/// Recovery Pauli string for measured syndromes. `bit` names the qubit hit by
/// an X error (bit-flip syndrome, from the Z-type stabilizers), `phase` the
/// qubit hit by a Z error. Zero triples map to no recovery on that channel.
pub fn syndrome_to_recovery(bit: [u8; 3], phase: [u8; 3]) -> Vec<(u8, Pauli)> {
    let mut out = Vec::new();
    let bq = bit[0] + 2 * bit[1] + 4 * bit[2];
    if bq != 0 {
        out.push((bq - 1, Pauli::X));
    }
    let pq = phase[0] + 2 * phase[1] + 4 * phase[2];
    if pq != 0 {
        out.push((pq - 1, Pauli::Z));
    }
    out
}

/// Z-type syndrome of a basis string: bit i set iff the string has odd parity
/// over support r_i.
pub fn z_syndrome_of_string(s: u32) -> u8 {
    let mut syn = 0u8;
    for (i, m) in STAB_MASKS.iter().enumerate() {
        if (s & m).count_ones() % 2 == 1 {
            syn |= 1 << i;
        }
    }
    syn
}

/// Project a 128-vector onto the joint stabilizer eigenspace with bit-flip
/// syndrome `b` (Z-type stabilizers) and phase-flip syndrome `t` (X-type),
/// in place and without renormalizing.
pub fn project_syndrome(v: &mut [Complex64], b: u8, t: u8) {
    // Z-type projectors are diagonal: filter strings by their parity pattern.
    for (i, a) in v.iter_mut().enumerate() {
        if z_syndrome_of_string(i as u32) != b {
            *a = Complex64::ZERO;
        }
    }
    // X-type projectors (I + (-1)^{t_i} X_{r_i}) / 2 applied sequentially.
    for (i, m) in STAB_MASKS.iter().enumerate() {
        let sign = if (t >> i) & 1 == 1 { -1.0 } else { 1.0 };
        let mask = *m as usize;
        for idx in 0..v.len() {
            let j = idx ^ mask;
            if idx < j {
                let a = v[idx];
                let bb = v[j];
                v[idx] = (a + sign * bb) * 0.5;
                v[j] = (bb + sign * a) * 0.5;
            }
        }
    }
}

/// Fidelity measures evaluated on unnormalized final states. All are linear
/// in the density operator, so per-pattern values can be accumulated
/// independently.
#[derive(Debug, Clone)]
pub enum FidelityFunctional {
    /// |<target|phi>|^2 on the seven data qubits.
    SevenQubit { target: Vec<Complex64> },
    /// Noiselessly decode, trace out qubits 2..7, overlap with a 1-qubit target.
    OneQubit { target: [Complex64; 2] },
    /// One round of perfect error correction, then overlap with the target.
    AfterPerfectQec { projected_targets: Vec<Vec<Complex64>> },
    /// |<target|phi>|^2 on the four Shor-state qubits (16-dim).
    ShorState { target: Vec<Complex64> },
    /// Squared norm of the code-space component: the acceptance weight of a
    /// perfect syndrome measurement post-selected on the zero syndrome.
    CodeSpaceWeight { basis: [Vec<Complex64>; 2] },
}

impl FidelityFunctional {
    pub fn seven_qubit(target: Vec<Complex64>) -> Self {
        FidelityFunctional::SevenQubit { target }
    }

    pub fn one_qubit(target: [Complex64; 2]) -> Self {
        FidelityFunctional::OneQubit { target }
    }

    /// Precomputes the 64 vectors `Pi_s R_s^dag |target>`; the functional is
    /// then a sum of squared overlaps.
    pub fn after_perfect_qec(target: &[Complex64]) -> Self {
        let mut projected_targets = Vec::with_capacity(64);
        for s in 0..64u8 {
            let b = s & 0b111;
            let t = (s >> 3) & 0b111;
            let mut w = target.to_vec();
            for (q, p) in syndrome_to_recovery(
                [b & 1, (b >> 1) & 1, (b >> 2) & 1],
                [t & 1, (t >> 1) & 1, (t >> 2) & 1],
            ) {
                dense::apply_pauli(&mut w, q, p);
            }
            project_syndrome(&mut w, b, t);
            projected_targets.push(w);
        }
        FidelityFunctional::AfterPerfectQec { projected_targets }
    }

    pub fn shor_state() -> Self {
        let mut target = vec![Complex64::ZERO; 16];
        target[0b0000] = Complex64::new(dense::SQRT_HALF, 0.0);
        target[0b1111] = Complex64::new(dense::SQRT_HALF, 0.0);
        FidelityFunctional::ShorState { target }
    }

    pub fn code_space_weight() -> Self {
        FidelityFunctional::CodeSpaceWeight {
            basis: [logical_state(0.0, 0.0), logical_state(std::f64::consts::FRAC_PI_2, 0.0)],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FidelityFunctional::SevenQubit { .. } => "seven_qubit",
            FidelityFunctional::OneQubit { .. } => "one_qubit",
            FidelityFunctional::AfterPerfectQec { .. } => "after_perfect_qec",
            FidelityFunctional::ShorState { .. } => "shor_state",
            FidelityFunctional::CodeSpaceWeight { .. } => "code_space_weight",
        }
    }

    /// Value on an unnormalized pure state.
    pub fn value(&self, phi: &[Complex64]) -> f64 {
        match self {
            FidelityFunctional::SevenQubit { target } | FidelityFunctional::ShorState { target } => {
                debug_assert_eq!(phi.len(), target.len());
                dense::inner(target, phi).norm_sqr()
            }
            FidelityFunctional::OneQubit { target } => {
                debug_assert_eq!(phi.len(), DATA_DIM);
                let mut w = phi.to_vec();
                apply_gates(&mut w, &decoder_gates());
                let mut acc = 0.0;
                for j in 0..(DATA_DIM / 2) {
                    let amp = target[0].conj() * w[j << 1] + target[1].conj() * w[(j << 1) | 1];
                    acc += amp.norm_sqr();
                }
                acc
            }
            FidelityFunctional::AfterPerfectQec { projected_targets } => projected_targets
                .iter()
                .map(|w| dense::inner(w, phi).norm_sqr())
                .sum(),
            FidelityFunctional::CodeSpaceWeight { basis } => {
                basis.iter().map(|b| dense::inner(b, phi).norm_sqr()).sum()
            }
        }
    }
}
