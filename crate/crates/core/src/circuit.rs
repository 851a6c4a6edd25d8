//! Circuit IR with attached fault locations, builders for every protocol
//! fragment, and the fault-pattern enumerator.
//!
//! The error model: every noisy step is followed by a Pauli drawn per
//! involved qubit with probabilities `p_x, p_y, p_z` (identity with
//! `1 - p_x - p_y - p_z`); initialization noise acts after an ideal `|0>`
//! preparation and measurement noise right before an ideal readout. CNOT
//! noise is independent on the two qubits. Storage is noiseless.

use crate::pauli::Pauli;
use crate::poly::Monomial;
use crate::steane::STAB_SUPPORTS;
use std::fmt::Write as _;

pub const MAX_QUBITS: u8 = 12;

/// Data qubits are 0..=6; Shor ancillas 7..=10; the verification check qubit
/// (and the single-ancilla qubit) reuse 11 and 7 respectively.
pub const SHOR_ANCILLA: [u8; 4] = [7, 8, 9, 10];
pub const CHECK_QUBIT: u8 = 11;
pub const SINGLE_ANCILLA: u8 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyndromeKind {
    BitFlip,
    PhaseFlip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AncillaKind {
    Shor { n_verifications: u8, second_pair: (u8, u8) },
    Single,
}

impl AncillaKind {
    pub fn shor(n_verifications: u8) -> Self {
        // Default second verification rechecks the pair used by the first.
        AncillaKind::Shor { n_verifications, second_pair: (0, 3) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseProfile {
    pub shor_noisy: bool,
    pub qec_noisy: bool,
}

impl NoiseProfile {
    pub fn all_noisy() -> Self {
        NoiseProfile { shor_noisy: true, qec_noisy: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyndromeCase {
    AllZero,
    Fixed { bit: [u8; 3], phase: [u8; 3] },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Disposition {
    Postselect { outcome: u8, role: ReadoutRole },
    Record { label: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadoutRole {
    /// Deterministic parity check; a flipped outcome kills the branch.
    Verification,
    /// One of the readouts whose parity defines a syndrome bit.
    Block { block: usize, position: u8 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOp {
    Init(u8),
    Hadamard(u8),
    Cnot { control: u8, target: u8 },
    MeasureZ { qubit: u8, disp: Disposition },
    MeasureX { qubit: u8, disp: Disposition },
    /// Conditional recovery Pauli appended by the fixed-syndrome protocols.
    Recovery { qubit: u8, pauli: Pauli },
    /// The mixed-state input of the error-correction experiments: identity
    /// with weight `1 - 7(p_x+p_y+p_z)`, else one Pauli on one data qubit.
    InputMixture,
}

/// One fault event: a joint nontrivial Pauli assignment on the step's qubits
/// with its probability monomial. `p0_extra` counts trivial single-qubit
/// factors (a CNOT event `(X, I)` has probability `p_x p_0`).
#[derive(Debug, Clone)]
pub struct Event {
    pub paulis: Vec<(u8, Pauli)>,
    pub monomial: Monomial,
    pub p0_extra: u8,
}

#[derive(Debug, Clone)]
pub struct FaultLocation {
    pub id: usize,
    pub step: usize,
    pub events: Vec<Event>,
    /// Single-qubit noise factors at this location (1 for single-qubit steps,
    /// 2 for CNOT). The mixture location is special-cased.
    pub units: u32,
    pub is_mixture: bool,
}

#[derive(Debug, Clone)]
pub struct Step {
    pub op: StepOp,
    pub noisy: bool,
    pub location: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Block {
    pub stab: usize,
    pub kind: SyndromeKind,
    pub demanded_parity: u8,
    /// GHZ-ancilla blocks carry a 1/(2 sqrt 2) ideal amplitude per readout
    /// string; single-ancilla blocks carry none.
    pub ghz: bool,
    pub coupling_steps: Vec<usize>,
    pub readout_steps: Vec<usize>,
}

/// Ideal base state the Pauli-frame path reconstructs final states from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameBase {
    /// Four-qubit GHZ fragment (no syndrome blocks).
    Ghz4,
    /// Seven data qubits from all-|0> inits, projected by the block outcomes.
    DataZero,
    /// Perfectly encoded logical state (syndrome-definite).
    Encoded { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone)]
pub struct Circuit {
    pub steps: Vec<Step>,
    pub locations: Vec<FaultLocation>,
    pub blocks: Vec<Block>,
    pub frame_base: FrameBase,
    /// Live qubits at the end, in functional bit order.
    pub output_qubits: Vec<u8>,
    pub recoveries: Vec<(u8, Pauli)>,
    pub verification_count: usize,
    pub total_units: u32,
    pub mixture_location: Option<usize>,
}

impl Circuit {
    pub fn ghz_block_count(&self) -> usize {
        self.blocks.iter().filter(|b| b.ghz).count()
    }

    /// Line-oriented debug dump, one step per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            match &step.op {
                StepOp::Init(q) => write!(out, "INIT q{q}").unwrap(),
                StepOp::Hadamard(q) => write!(out, "H q{q}").unwrap(),
                StepOp::Cnot { control, target } => {
                    write!(out, "CNOT q{control} q{target}").unwrap()
                }
                StepOp::MeasureZ { qubit, disp } => {
                    write!(out, "MZ q{qubit} {}", dump_disp(disp)).unwrap()
                }
                StepOp::MeasureX { qubit, disp } => {
                    write!(out, "MX q{qubit} {}", dump_disp(disp)).unwrap()
                }
                StepOp::Recovery { qubit, pauli } => {
                    write!(out, "RECOVER {pauli} q{qubit}").unwrap()
                }
                StepOp::InputMixture => write!(out, "INPUT-MIXTURE q0..q6").unwrap(),
            }
            if let Some(loc) = step.location {
                write!(out, " # loc={loc}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

fn dump_disp(d: &Disposition) -> String {
    match d {
        Disposition::Postselect { outcome, .. } => format!("postselect={outcome}"),
        Disposition::Record { label } => format!("record={label}"),
    }
}

struct Builder {
    steps: Vec<Step>,
    locations: Vec<FaultLocation>,
    blocks: Vec<Block>,
    recoveries: Vec<(u8, Pauli)>,
    verification_count: usize,
    total_units: u32,
    mixture_location: Option<usize>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            steps: Vec::new(),
            locations: Vec::new(),
            blocks: Vec::new(),
            recoveries: Vec::new(),
            verification_count: 0,
            total_units: 0,
            mixture_location: None,
        }
    }

    fn push(&mut self, op: StepOp, noisy: bool) -> usize {
        let step_idx = self.steps.len();
        let location = if noisy {
            let loc_id = self.locations.len();
            let loc = match &op {
                StepOp::Cnot { control, target } => FaultLocation {
                    id: loc_id,
                    step: step_idx,
                    events: cnot_events(*control, *target),
                    units: 2,
                    is_mixture: false,
                },
                StepOp::InputMixture => FaultLocation {
                    id: loc_id,
                    step: step_idx,
                    events: mixture_events(),
                    units: 0,
                    is_mixture: true,
                },
                StepOp::Init(q)
                | StepOp::Hadamard(q)
                | StepOp::MeasureZ { qubit: q, .. }
                | StepOp::MeasureX { qubit: q, .. }
                | StepOp::Recovery { qubit: q, .. } => FaultLocation {
                    id: loc_id,
                    step: step_idx,
                    events: single_qubit_events(*q),
                    units: 1,
                    is_mixture: false,
                },
            };
            if loc.is_mixture {
                self.mixture_location = Some(loc_id);
            } else {
                self.total_units += loc.units;
            }
            self.locations.push(loc);
            Some(loc_id)
        } else {
            None
        };
        self.steps.push(Step { op, noisy, location });
        step_idx
    }

    /// GHZ chain on the four Shor-ancilla qubits plus the requested parity
    /// verifications through the check qubit. No final Hadamards here: the
    /// phase-flip blocks couple the bare GHZ form directly.
    fn ghz_fragment(
        &mut self,
        anc: [u8; 4],
        check: u8,
        n_verifications: u8,
        second_pair: (u8, u8),
        noisy: bool,
    ) {
        for q in anc {
            self.push(StepOp::Init(q), noisy);
        }
        self.push(StepOp::Hadamard(anc[0]), noisy);
        for w in anc.windows(2) {
            self.push(StepOp::Cnot { control: w[0], target: w[1] }, noisy);
        }
        let pairs = [(0u8, 3u8), second_pair];
        for &(a, b) in pairs.iter().take(n_verifications as usize) {
            self.push(StepOp::Init(check), noisy);
            self.push(StepOp::Cnot { control: anc[a as usize], target: check }, noisy);
            self.push(StepOp::Cnot { control: anc[b as usize], target: check }, noisy);
            self.push(
                StepOp::MeasureZ {
                    qubit: check,
                    disp: Disposition::Postselect { outcome: 0, role: ReadoutRole::Verification },
                },
                noisy,
            );
            self.verification_count += 1;
        }
    }

    fn syndrome_block(
        &mut self,
        kind: SyndromeKind,
        stab: usize,
        ancilla: AncillaKind,
        demanded_parity: u8,
        shor_noisy: bool,
        ec_noisy: bool,
    ) {
        assert!(stab < 3, "stabilizer index out of range");
        let support = STAB_SUPPORTS[stab];
        let block_idx = self.blocks.len();
        let mut coupling_steps = Vec::new();
        let mut readout_steps = Vec::new();

        match ancilla {
            AncillaKind::Shor { n_verifications, second_pair } => {
                self.ghz_fragment(SHOR_ANCILLA, CHECK_QUBIT, n_verifications, second_pair, shor_noisy);
                if kind == SyndromeKind::BitFlip {
                    // Completing Hadamards of the Shor state. The phase-flip
                    // blocks avoid them by reversing the coupling CNOTs.
                    for q in SHOR_ANCILLA {
                        self.push(StepOp::Hadamard(q), ec_noisy);
                    }
                }
                for (i, &d) in support.iter().enumerate() {
                    let a = SHOR_ANCILLA[i];
                    let op = match kind {
                        SyndromeKind::BitFlip => StepOp::Cnot { control: d, target: a },
                        SyndromeKind::PhaseFlip => StepOp::Cnot { control: a, target: d },
                    };
                    coupling_steps.push(self.push(op, ec_noisy));
                }
                for (i, &a) in SHOR_ANCILLA.iter().enumerate() {
                    let outcome = if i == 0 { demanded_parity } else { 0 };
                    let disp = Disposition::Postselect {
                        outcome,
                        role: ReadoutRole::Block { block: block_idx, position: i as u8 },
                    };
                    let op = match kind {
                        SyndromeKind::BitFlip => StepOp::MeasureZ { qubit: a, disp },
                        SyndromeKind::PhaseFlip => StepOp::MeasureX { qubit: a, disp },
                    };
                    readout_steps.push(self.push(op, ec_noisy));
                }
                self.blocks.push(Block {
                    stab,
                    kind,
                    demanded_parity,
                    ghz: true,
                    coupling_steps,
                    readout_steps,
                });
            }
            AncillaKind::Single => {
                let a = SINGLE_ANCILLA;
                self.push(StepOp::Init(a), ec_noisy);
                if kind == SyndromeKind::PhaseFlip {
                    self.push(StepOp::Hadamard(a), ec_noisy);
                }
                for &d in support.iter() {
                    let op = match kind {
                        SyndromeKind::BitFlip => StepOp::Cnot { control: d, target: a },
                        SyndromeKind::PhaseFlip => StepOp::Cnot { control: a, target: d },
                    };
                    coupling_steps.push(self.push(op, ec_noisy));
                }
                let disp = Disposition::Postselect {
                    outcome: demanded_parity,
                    role: ReadoutRole::Block { block: block_idx, position: 0 },
                };
                let op = match kind {
                    SyndromeKind::BitFlip => StepOp::MeasureZ { qubit: a, disp },
                    SyndromeKind::PhaseFlip => StepOp::MeasureX { qubit: a, disp },
                };
                readout_steps.push(self.push(op, ec_noisy));
                self.blocks.push(Block {
                    stab,
                    kind,
                    demanded_parity,
                    ghz: false,
                    coupling_steps,
                    readout_steps,
                });
            }
        }
    }

    fn finish(self, frame_base: FrameBase, output_qubits: Vec<u8>) -> Circuit {
        Circuit {
            steps: self.steps,
            locations: self.locations,
            blocks: self.blocks,
            frame_base,
            output_qubits,
            recoveries: self.recoveries,
            verification_count: self.verification_count,
            total_units: self.total_units,
            mixture_location: self.mixture_location,
        }
    }
}

fn single_qubit_events(q: u8) -> Vec<Event> {
    vec![
        Event { paulis: vec![(q, Pauli::X)], monomial: Monomial::PX, p0_extra: 0 },
        Event { paulis: vec![(q, Pauli::Y)], monomial: Monomial::PY, p0_extra: 0 },
        Event { paulis: vec![(q, Pauli::Z)], monomial: Monomial::PZ, p0_extra: 0 },
    ]
}

fn pauli_monomial(p: Pauli) -> Monomial {
    match p {
        Pauli::X => Monomial::PX,
        Pauli::Y => Monomial::PY,
        Pauli::Z => Monomial::PZ,
        Pauli::I => Monomial::ONE,
    }
}

/// The 15 nontrivial events of a CNOT location: all pairs `(a, b) != (I, I)`
/// with probability `p_a p_b`, where an identity factor contributes one power
/// of `p_0` accounted at pattern-probability time.
fn cnot_events(control: u8, target: u8) -> Vec<Event> {
    let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let mut events = Vec::with_capacity(15);
    for a in all {
        for b in all {
            if a == Pauli::I && b == Pauli::I {
                continue;
            }
            let mut paulis = Vec::new();
            let mut p0_extra = 0;
            match a {
                Pauli::I => p0_extra += 1,
                p => paulis.push((control, p)),
            }
            match b {
                Pauli::I => p0_extra += 1,
                p => paulis.push((target, p)),
            }
            events.push(Event {
                paulis,
                monomial: pauli_monomial(a).mul(&pauli_monomial(b)),
                p0_extra,
            });
        }
    }
    events
}

/// The 21 events of the mixed-state input: one Pauli on one data qubit, each
/// with probability `p_a`; the identity carries `1 - 7(p_x + p_y + p_z)`.
fn mixture_events() -> Vec<Event> {
    let mut events = Vec::with_capacity(21);
    for q in 0..7u8 {
        for p in Pauli::NONTRIVIAL {
            events.push(Event { paulis: vec![(q, p)], monomial: pauli_monomial(p), p0_extra: 0 });
        }
    }
    events
}

/// Standalone noisy Shor-state construction (the GHZ form, no completing
/// Hadamards), as used for the Shor fidelity experiment.
pub fn build_ghz_fragment_circuit(n_verifications: u8, second_pair: (u8, u8)) -> Circuit {
    assert!(n_verifications <= 2);
    assert!(second_pair.0 < 4 && second_pair.1 < 4 && second_pair.0 != second_pair.1);
    let mut b = Builder::new();
    // Standalone fragment: ancillas live on qubits 0..3, check on 4.
    b.ghz_fragment([0, 1, 2, 3], 4, n_verifications, second_pair, true);
    b.finish(FrameBase::Ghz4, vec![0, 1, 2, 3])
}

/// Fault-tolerant logical-zero encoding: seven noisy initializations followed
/// by the three phase-flip syndromes, each measured twice, conditioned on
/// every outcome being zero. No bit-flip blocks.
pub fn build_encoding_circuit(ancilla: AncillaKind) -> Circuit {
    let mut b = Builder::new();
    for q in 0..7u8 {
        b.push(StepOp::Init(q), true);
    }
    for stab in 0..3 {
        for _ in 0..2 {
            b.syndrome_block(SyndromeKind::PhaseFlip, stab, ancilla, 0, true, true);
        }
    }
    b.finish(FrameBase::DataZero, (0..7).collect())
}

#[derive(Debug, Clone, Copy)]
pub struct QecParams {
    pub order_first: SyndromeKind,
    pub ancilla: AncillaKind,
    pub case: SyndromeCase,
    pub alpha: f64,
    pub beta: f64,
    pub profile: NoiseProfile,
}

/// Full error-correction protocol on a perfectly encoded input carrying the
/// single-error input mixture: six syndromes, each measured twice, in the
/// requested order, with post-selection per the syndrome case and the
/// corresponding noisy recovery appended for nonzero syndromes.
pub fn build_qec_circuit(params: &QecParams) -> Circuit {
    let (bit_syn, phase_syn) = match params.case {
        SyndromeCase::AllZero => ([0u8; 3], [0u8; 3]),
        SyndromeCase::Fixed { bit, phase } => {
            assert!(bit.iter().chain(phase.iter()).all(|&b| b <= 1), "invalid syndrome triple");
            (bit, phase)
        }
    };
    let mut b = Builder::new();
    b.push(StepOp::InputMixture, true);

    let kinds = match params.order_first {
        SyndromeKind::BitFlip => [SyndromeKind::BitFlip, SyndromeKind::PhaseFlip],
        SyndromeKind::PhaseFlip => [SyndromeKind::PhaseFlip, SyndromeKind::BitFlip],
    };
    for kind in kinds {
        for stab in 0..3 {
            let parity = match kind {
                SyndromeKind::BitFlip => bit_syn[stab],
                SyndromeKind::PhaseFlip => phase_syn[stab],
            };
            for _ in 0..2 {
                b.syndrome_block(
                    kind,
                    stab,
                    params.ancilla,
                    parity,
                    params.profile.shor_noisy,
                    params.profile.qec_noisy,
                );
            }
        }
    }
    for (q, p) in crate::steane::syndrome_to_recovery(bit_syn, phase_syn) {
        b.push(StepOp::Recovery { qubit: q, pauli: p }, params.profile.qec_noisy);
        b.recoveries.push((q, p));
    }
    b.finish(FrameBase::Encoded { alpha: params.alpha, beta: params.beta }, (0..7).collect())
}

/// A fault pattern: chosen events at distinct locations, in location order.
#[derive(Debug, Clone, Default)]
pub struct FaultPattern {
    pub choices: Vec<(usize, usize)>,
}

impl FaultPattern {
    pub fn order(&self) -> usize {
        self.choices.len()
    }

    pub fn monomial(&self, c: &Circuit) -> Monomial {
        let mut m = Monomial::ONE;
        for &(l, e) in &self.choices {
            m = m.mul(&c.locations[l].events[e].monomial);
        }
        m
    }
}

/// Visit the empty pattern and every pattern with nontrivial events at
/// `1..=max_order` distinct locations. Visitation order is deterministic;
/// patterns whose probability monomial exceeds the truncation degree are
/// still yielded (their truncated probability is zero).
pub fn for_each_pattern<F: FnMut(&FaultPattern)>(c: &Circuit, max_order: u8, mut f: F) {
    let pat = FaultPattern::default();
    f(&pat);
    if max_order == 0 {
        return;
    }
    let mut pat = pat;
    for l1 in 0..c.locations.len() {
        enumerate_from(c, max_order, l1, &mut pat, &mut f);
    }
}

/// Patterns whose first (lowest-index) chosen location is `l1`; used to chunk
/// the stream for parallel consumption.
pub fn for_each_pattern_rooted<F: FnMut(&FaultPattern)>(c: &Circuit, max_order: u8, l1: usize, mut f: F) {
    let mut pat = FaultPattern::default();
    enumerate_from(c, max_order, l1, &mut pat, &mut f);
}

fn enumerate_from<F: FnMut(&FaultPattern)>(
    c: &Circuit,
    k: u8,
    l: usize,
    pat: &mut FaultPattern,
    f: &mut F,
) {
    for e in 0..c.locations[l].events.len() {
        pat.choices.push((l, e));
        f(pat);
        if (pat.choices.len() as u8) < k {
            for l2 in (l + 1)..c.locations.len() {
                enumerate_from(c, k, l2, pat, f);
            }
        }
        pat.choices.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_fragment_location_counts() {
        let c0 = build_ghz_fragment_circuit(0, (0, 3));
        assert_eq!(c0.locations.len(), 8); // 4 init, 1 H, 3 CNOT
        assert_eq!(c0.total_units, 11);

        let c1 = build_ghz_fragment_circuit(1, (0, 3));
        assert_eq!(c1.locations.len(), 12); // adds init, 2 CNOT, measurement
        assert_eq!(c1.verification_count, 1);

        let c2a = build_ghz_fragment_circuit(2, (0, 3));
        let c2b = build_ghz_fragment_circuit(2, (1, 2));
        assert_eq!(c2a.locations.len(), 16);
        // fragments differ only in the two extra CNOT endpoints
        let diff: Vec<(&StepOp, &StepOp)> = c2a
            .steps
            .iter()
            .zip(&c2b.steps)
            .filter(|(a, b)| a.op != b.op)
            .map(|(a, b)| (&a.op, &b.op))
            .collect();
        assert_eq!(diff.len(), 2);
        for (a, b) in diff {
            assert!(matches!(a, StepOp::Cnot { .. }));
            assert!(matches!(b, StepOp::Cnot { .. }));
        }
    }

    #[test]
    fn first_order_pattern_count_matches_event_count() {
        // Shor fragment, no verification: 5x3 + 3x15 = 60 first-order patterns
        let c = build_ghz_fragment_circuit(0, (0, 3));
        let mut orders = [0usize; 3];
        for_each_pattern(&c, 1, |p| orders[p.order()] += 1);
        assert_eq!(orders[0], 1);
        assert_eq!(orders[1], 60);
    }

    #[test]
    fn second_order_pattern_counts() {
        let c = build_ghz_fragment_circuit(0, (0, 3));
        let mut orders = [0usize; 3];
        for_each_pattern(&c, 2, |p| orders[p.order()] += 1);
        assert_eq!(orders[0], 1);
        assert_eq!(orders[1], 60);
        // pairs of events at distinct locations: sum over l < l' of e_l * e_l'
        let per_loc = [3usize, 3, 3, 3, 3, 15, 15, 15];
        let mut pairs = 0;
        for i in 0..per_loc.len() {
            for j in (i + 1)..per_loc.len() {
                pairs += per_loc[i] * per_loc[j];
            }
        }
        assert_eq!(orders[2], pairs);
    }

    #[test]
    fn encoding_conditioning_counts() {
        let shor = build_encoding_circuit(AncillaKind::shor(1));
        assert_eq!(shor.verification_count, 6);
        let block_readouts: usize = shor.blocks.iter().map(|b| b.readout_steps.len()).sum();
        assert_eq!(block_readouts, 24);
        assert_eq!(shor.blocks.len(), 6);
        assert!(shor.blocks.iter().all(|b| b.kind == SyndromeKind::PhaseFlip));

        let single = build_encoding_circuit(AncillaKind::Single);
        assert_eq!(single.verification_count, 0);
        let block_readouts: usize = single.blocks.iter().map(|b| b.readout_steps.len()).sum();
        assert_eq!(block_readouts, 6);
    }

    #[test]
    fn qec_bitflip_block_couples_data7_to_ancilla11() {
        // 1-based: the C7NOT11 gate of the second syndrome bit. 0-based: the
        // last coupling of the stab-1 bit blocks is CNOT q6 -> q10.
        let c = build_qec_circuit(&QecParams {
            order_first: SyndromeKind::BitFlip,
            ancilla: AncillaKind::shor(1),
            case: SyndromeCase::AllZero,
            alpha: 0.0,
            beta: 0.0,
            profile: NoiseProfile::all_noisy(),
        });
        let b2 = c.blocks.iter().find(|b| b.kind == SyndromeKind::BitFlip && b.stab == 1).unwrap();
        let last = *b2.coupling_steps.last().unwrap();
        assert_eq!(c.steps[last].op, StepOp::Cnot { control: 6, target: 10 });
    }

    #[test]
    fn fixed_syndrome_appends_recovery_on_qubit_4() {
        // bit syndrome (0,0,1) names 1-based qubit 4, 0-based qubit 3
        let c = build_qec_circuit(&QecParams {
            order_first: SyndromeKind::BitFlip,
            ancilla: AncillaKind::shor(1),
            case: SyndromeCase::Fixed { bit: [0, 0, 1], phase: [0, 0, 0] },
            alpha: 0.3,
            beta: 0.1,
            profile: NoiseProfile::all_noisy(),
        });
        let last = c.steps.last().unwrap();
        assert_eq!(last.op, StepOp::Recovery { qubit: 3, pauli: Pauli::X });
        assert!(last.noisy);
        assert_eq!(c.recoveries, vec![(3, Pauli::X)]);
    }

    #[test]
    fn deterministic_construction() {
        let a = build_encoding_circuit(AncillaKind::shor(2));
        let b = build_encoding_circuit(AncillaKind::shor(2));
        assert_eq!(a.dump(), b.dump());
        assert_eq!(a.locations.len(), b.locations.len());
        assert_eq!(a.total_units, b.total_units);
    }

    #[test]
    fn dump_format_shape() {
        let c = build_ghz_fragment_circuit(1, (0, 3));
        let dump = c.dump();
        let lines: Vec<&str> = dump.lines().collect();
        assert_eq!(lines[0], "INIT q0 # loc=0");
        assert!(lines.iter().any(|l| l.starts_with("CNOT q0 q1")));
        assert!(lines.iter().any(|l| l.starts_with("MZ q4 postselect=0")));
    }
}
