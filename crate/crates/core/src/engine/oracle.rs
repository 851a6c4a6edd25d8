//! Numeric density-matrix oracle: evolves the full density operator through
//! every location's complete Kraus channel at fixed numeric rates and applies
//! the conditioning projectors. Independent of the series engine; used to
//! cross-validate it.
//!
//! Unentangled subsystems are kept as separate tensor factors, so ancilla
//! construction runs on a 32-dimensional matrix and only the coupling steps
//! touch the joint data+ancilla space.

use crate::circuit::{Circuit, Disposition, FrameBase, StepOp};
use crate::pauli::Pauli;
use crate::steane::{self, FidelityFunctional};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("acceptance probability is zero; conditional fidelity undefined")]
    ZeroAcceptance,
}

#[derive(Debug, Clone, Copy)]
pub struct Rates {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl Rates {
    pub fn uniform(p: f64) -> Self {
        Rates { px: p, py: p, pz: p }
    }

    fn p0(&self) -> f64 {
        1.0 - self.px - self.py - self.pz
    }
}

/// One tensor factor: a density matrix over the qubits listed in `qubits`
/// (qubit `qubits[i]` is bit `i` of the row/column index).
struct Factor {
    data: Vec<Complex64>,
    dim: usize,
    qubits: Vec<u8>,
}

impl Factor {
    fn fresh_qubit(q: u8) -> Self {
        let mut data = vec![Complex64::ZERO; 4];
        data[0] = Complex64::ONE;
        Factor { data, dim: 2, qubits: vec![q] }
    }

    fn from_pure(qs: &[u8], amps: &[Complex64]) -> Self {
        let dim = amps.len();
        let mut data = vec![Complex64::ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = amps[r] * amps[c].conj();
            }
        }
        Factor { data, dim, qubits: qs.to_vec() }
    }

    fn pos(&self, q: u8) -> u8 {
        self.qubits.iter().position(|&x| x == q).expect("qubit not in factor") as u8
    }

    /// rho -> (other tensor self); other's qubits become the high bits.
    fn kron(self, other: Factor) -> Factor {
        let dim = self.dim * other.dim;
        let mut data = vec![Complex64::ZERO; dim * dim];
        for ro in 0..other.dim {
            for co in 0..other.dim {
                let v = other.data[ro * other.dim + co];
                if v == Complex64::ZERO {
                    continue;
                }
                for ri in 0..self.dim {
                    let row = (ro * self.dim + ri) * dim + co * self.dim;
                    let src = ri * self.dim;
                    for ci in 0..self.dim {
                        data[row + ci] = v * self.data[src + ci];
                    }
                }
            }
        }
        let mut qubits = self.qubits;
        qubits.extend(other.qubits);
        Factor { data, dim, qubits }
    }

    fn apply_h(&mut self, q: u8) {
        let m = 1usize << self.pos(q);
        let dim = self.dim;
        let s = crate::dense::SQRT_HALF;
        for r in 0..dim {
            if r & m == 0 {
                for c in 0..dim {
                    let a = self.data[r * dim + c];
                    let b = self.data[(r | m) * dim + c];
                    self.data[r * dim + c] = (a + b) * s;
                    self.data[(r | m) * dim + c] = (a - b) * s;
                }
            }
        }
        for r in 0..dim {
            let row = r * dim;
            for c in 0..dim {
                if c & m == 0 {
                    let a = self.data[row + c];
                    let b = self.data[row + (c | m)];
                    self.data[row + c] = (a + b) * s;
                    self.data[row + (c | m)] = (a - b) * s;
                }
            }
        }
    }

    fn apply_cnot(&mut self, ctl: u8, tgt: u8) {
        let cm = 1usize << self.pos(ctl);
        let tm = 1usize << self.pos(tgt);
        let dim = self.dim;
        let map = |i: usize| if i & cm != 0 { i ^ tm } else { i };
        for r in 0..dim {
            let mr = map(r);
            for c in 0..dim {
                let mc = map(c);
                if (mr, mc) > (r, c) {
                    self.data.swap(r * dim + c, mr * dim + mc);
                }
            }
        }
    }

    fn apply_pauli_gate(&mut self, q: u8, p: Pauli) {
        let m = 1usize << self.pos(q);
        let dim = self.dim;
        match p {
            Pauli::I => {}
            Pauli::X | Pauli::Y => {
                for r in 0..dim {
                    let mr = r ^ m;
                    for c in 0..dim {
                        let mc = c ^ m;
                        if (mr, mc) > (r, c) {
                            self.data.swap(r * dim + c, mr * dim + mc);
                        }
                    }
                }
                if p == Pauli::Y {
                    // X rho X and Y rho Y differ by (-1)^{r_q + c_q}.
                    for r in 0..dim {
                        for c in 0..dim {
                            if (r & m != 0) != (c & m != 0) {
                                self.data[r * dim + c] = -self.data[r * dim + c];
                            }
                        }
                    }
                }
            }
            Pauli::Z => {
                for r in 0..dim {
                    for c in 0..dim {
                        if (r & m != 0) != (c & m != 0) {
                            self.data[r * dim + c] = -self.data[r * dim + c];
                        }
                    }
                }
            }
        }
    }

    /// Single-qubit Pauli channel in place over index quadruples:
    /// `rho -> p0 rho + px X rho X + py Y rho Y + pz Z rho Z`.
    fn pauli_channel(&mut self, q: u8, rates: &Rates) {
        let m = 1usize << self.pos(q);
        let dim = self.dim;
        let same = rates.p0() + rates.pz;
        let swap = rates.px + rates.py;
        let same_m = rates.p0() - rates.pz;
        let swap_m = rates.px - rates.py;
        for r in 0..dim {
            if r & m != 0 {
                continue;
            }
            let rm = r | m;
            for c in 0..dim {
                if c & m != 0 {
                    continue;
                }
                let cm = c | m;
                let a = self.data[r * dim + c];
                let b = self.data[rm * dim + cm];
                self.data[r * dim + c] = same * a + swap * b;
                self.data[rm * dim + cm] = same * b + swap * a;
                let x = self.data[r * dim + cm];
                let y = self.data[rm * dim + c];
                self.data[r * dim + cm] = same_m * x + swap_m * y;
                self.data[rm * dim + c] = same_m * y + swap_m * x;
            }
        }
    }

    fn insert_bit(j: usize, pos: u8, b: usize) -> usize {
        let low = j & ((1 << pos) - 1);
        let high = j >> pos;
        (high << (pos + 1)) | (b << pos) | low
    }

    fn drop_qubit(&mut self, q: u8) -> u8 {
        let pos = self.pos(q);
        self.qubits.remove(pos as usize);
        pos
    }

    fn measure_drop_z(&mut self, q: u8, outcome: u8) {
        let pos = self.drop_qubit(q);
        let new_dim = self.dim / 2;
        let mut out = vec![Complex64::ZERO; new_dim * new_dim];
        for r in 0..new_dim {
            let ri = Self::insert_bit(r, pos, outcome as usize);
            for c in 0..new_dim {
                let ci = Self::insert_bit(c, pos, outcome as usize);
                out[r * new_dim + c] = self.data[ri * self.dim + ci];
            }
        }
        self.data = out;
        self.dim = new_dim;
    }

    fn measure_drop_x(&mut self, q: u8, outcome: u8) {
        let pos = self.drop_qubit(q);
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        let new_dim = self.dim / 2;
        let mut out = vec![Complex64::ZERO; new_dim * new_dim];
        for r in 0..new_dim {
            let r0 = Self::insert_bit(r, pos, 0);
            let r1 = Self::insert_bit(r, pos, 1);
            for c in 0..new_dim {
                let c0 = Self::insert_bit(c, pos, 0);
                let c1 = Self::insert_bit(c, pos, 1);
                out[r * new_dim + c] = 0.5
                    * (self.data[r0 * self.dim + c0]
                        + sign * self.data[r0 * self.dim + c1]
                        + sign * self.data[r1 * self.dim + c0]
                        + self.data[r1 * self.dim + c1]);
            }
        }
        self.data = out;
        self.dim = new_dim;
    }

    fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }
}

/// Density operator as a product of independent tensor factors plus the
/// scalar weight of fully measured subsystems.
struct FactoredDensity {
    factors: Vec<Factor>,
    scalar: f64,
}

impl FactoredDensity {
    fn new() -> Self {
        FactoredDensity { factors: Vec::new(), scalar: 1.0 }
    }

    fn factor_of(&self, q: u8) -> Option<usize> {
        self.factors.iter().position(|f| f.qubits.contains(&q))
    }

    fn add_qubit(&mut self, q: u8) {
        assert!(self.factor_of(q).is_none(), "qubit re-initialized while live");
        self.factors.push(Factor::fresh_qubit(q));
    }

    /// Ensure both qubits live in one factor; returns its index.
    fn entangle(&mut self, a: u8, b: u8) -> usize {
        let fa = self.factor_of(a).expect("dead qubit");
        let fb = self.factor_of(b).expect("dead qubit");
        if fa == fb {
            return fa;
        }
        let (lo, hi) = (fa.min(fb), fa.max(fb));
        let high = self.factors.remove(hi);
        let low = self.factors.remove(lo);
        self.factors.insert(lo, low.kron(high));
        lo
    }

    fn with_qubit<R>(&mut self, q: u8, f: impl FnOnce(&mut Factor) -> R) -> R {
        let i = self.factor_of(q).expect("dead qubit");
        f(&mut self.factors[i])
    }

    fn measure_drop(&mut self, q: u8, outcome: u8, x_basis: bool) {
        let i = self.factor_of(q).expect("dead qubit");
        if x_basis {
            self.factors[i].measure_drop_x(q, outcome);
        } else {
            self.factors[i].measure_drop_z(q, outcome);
        }
        if self.factors[i].qubits.is_empty() {
            self.scalar *= self.factors[i].data[0].re;
            self.factors.remove(i);
        }
    }

    fn trace(&self) -> f64 {
        self.scalar * self.factors.iter().map(|f| f.trace()).product::<f64>()
    }

    /// Merge everything and reorder to the given qubit order.
    fn into_matrix(mut self, order: &[u8]) -> (Vec<Complex64>, f64) {
        while self.factors.len() > 1 {
            let high = self.factors.pop().unwrap();
            let low = self.factors.pop().unwrap();
            self.factors.push(low.kron(high));
        }
        let f = self.factors.pop().expect("no live qubits at extraction");
        assert_eq!(f.qubits.len(), order.len(), "register does not match output qubits");
        let dim = f.dim;
        let map = |j: usize| -> usize {
            let mut idx = 0usize;
            for (i, &q) in order.iter().enumerate() {
                if (j >> i) & 1 == 1 {
                    idx |= 1 << f.pos(q);
                }
            }
            idx
        };
        let mut out = vec![Complex64::ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                out[r * dim + c] = f.data[map(r) * dim + map(c)];
            }
        }
        (out, self.scalar)
    }
}

/// Functional value on a density matrix, by linear extension of the
/// pure-state definition.
fn functional_on_density(f: &FidelityFunctional, rho: &[Complex64], dim: usize) -> f64 {
    let quad = |t: &[Complex64]| -> f64 {
        let mut acc = Complex64::ZERO;
        for r in 0..dim {
            if t[r] == Complex64::ZERO {
                continue;
            }
            let row = r * dim;
            for c in 0..dim {
                acc += t[r].conj() * rho[row + c] * t[c];
            }
        }
        acc.re
    };
    match f {
        FidelityFunctional::SevenQubit { target } | FidelityFunctional::ShorState { target } => {
            quad(target)
        }
        FidelityFunctional::AfterPerfectQec { projected_targets } => {
            projected_targets.iter().map(|t| quad(t)).sum()
        }
        FidelityFunctional::CodeSpaceWeight { basis } => basis.iter().map(|t| quad(t)).sum(),
        FidelityFunctional::OneQubit { target } => {
            // decode rho, then overlap the first qubit with the target while
            // tracing the rest
            let mut work = rho.to_vec();
            for g in steane::decoder_gates() {
                apply_gate_rho(&mut work, dim, g);
            }
            let mut acc = Complex64::ZERO;
            for j in 0..dim / 2 {
                let r0 = j << 1;
                let r1 = (j << 1) | 1;
                acc += target[0].conj() * work[r0 * dim + r0] * target[0];
                acc += target[0].conj() * work[r0 * dim + r1] * target[1];
                acc += target[1].conj() * work[r1 * dim + r0] * target[0];
                acc += target[1].conj() * work[r1 * dim + r1] * target[1];
            }
            acc.re
        }
    }
}

fn apply_gate_rho(rho: &mut [Complex64], dim: usize, g: steane::Gate) {
    match g {
        steane::Gate::H(q) => {
            let m = 1usize << q;
            let s = crate::dense::SQRT_HALF;
            for r in 0..dim {
                if r & m == 0 {
                    for c in 0..dim {
                        let a = rho[r * dim + c];
                        let b = rho[(r | m) * dim + c];
                        rho[r * dim + c] = (a + b) * s;
                        rho[(r | m) * dim + c] = (a - b) * s;
                    }
                }
            }
            for r in 0..dim {
                let row = r * dim;
                for c in 0..dim {
                    if c & m == 0 {
                        let a = rho[row + c];
                        let b = rho[row + (c | m)];
                        rho[row + c] = (a + b) * s;
                        rho[row + (c | m)] = (a - b) * s;
                    }
                }
            }
        }
        steane::Gate::Cnot(ctl, tgt) => {
            let cm = 1usize << ctl;
            let tm = 1usize << tgt;
            let map = |i: usize| if i & cm != 0 { i ^ tm } else { i };
            for r in 0..dim {
                let mr = map(r);
                for c in 0..dim {
                    let mc = map(c);
                    if (mr, mc) > (r, c) {
                        rho.swap(r * dim + c, mr * dim + mc);
                    }
                }
            }
        }
    }
}

/// The exact single-error input mixture of the error-correction experiments,
/// applied to the data factor.
fn mixture_channel(factor: &mut Factor, rates: &Rates) {
    let s = rates.px + rates.py + rates.pz;
    let original = factor.data.clone();
    for v in factor.data.iter_mut() {
        *v *= 1.0 - 7.0 * s;
    }
    for q in 0..7u8 {
        for (p, rate) in [(Pauli::X, rates.px), (Pauli::Y, rates.py), (Pauli::Z, rates.pz)] {
            if rate == 0.0 {
                continue;
            }
            let mut term = Factor {
                data: original.clone(),
                dim: factor.dim,
                qubits: factor.qubits.clone(),
            };
            term.apply_pauli_gate(q, p);
            for (dst, src) in factor.data.iter_mut().zip(&term.data) {
                *dst += rate * src;
            }
        }
    }
}

/// Evolve the circuit's full density matrix at the given rates and return
/// `(acceptance probability, conditional value per functional)`.
pub fn density_oracle(
    c: &Circuit,
    rates: Rates,
    functionals: &[FidelityFunctional],
) -> Result<(f64, Vec<f64>), OracleError> {
    let mut rho = FactoredDensity::new();
    if let FrameBase::Encoded { alpha, beta } = c.frame_base {
        rho.factors.push(Factor::from_pure(
            &[0, 1, 2, 3, 4, 5, 6],
            &steane::logical_state(alpha, beta),
        ));
    }

    for step in &c.steps {
        let noisy = step.noisy;
        match &step.op {
            StepOp::Init(q) => {
                rho.add_qubit(*q);
                if noisy {
                    rho.with_qubit(*q, |f| f.pauli_channel(*q, &rates));
                }
            }
            StepOp::Hadamard(q) => {
                rho.with_qubit(*q, |f| {
                    f.apply_h(*q);
                    if noisy {
                        f.pauli_channel(*q, &rates);
                    }
                });
            }
            StepOp::Cnot { control, target } => {
                let i = rho.entangle(*control, *target);
                let f = &mut rho.factors[i];
                f.apply_cnot(*control, *target);
                if noisy {
                    f.pauli_channel(*control, &rates);
                    f.pauli_channel(*target, &rates);
                }
            }
            StepOp::Recovery { qubit, pauli } => {
                rho.with_qubit(*qubit, |f| {
                    f.apply_pauli_gate(*qubit, *pauli);
                    if noisy {
                        f.pauli_channel(*qubit, &rates);
                    }
                });
            }
            StepOp::InputMixture => {
                rho.with_qubit(0, |f| mixture_channel(f, &rates));
            }
            StepOp::MeasureZ { qubit, disp } | StepOp::MeasureX { qubit, disp } => {
                if noisy {
                    rho.with_qubit(*qubit, |f| f.pauli_channel(*qubit, &rates));
                }
                let outcome = match disp {
                    Disposition::Postselect { outcome, .. } => *outcome,
                    Disposition::Record { .. } => {
                        unreachable!("recorded measurements are not used by these protocols")
                    }
                };
                rho.measure_drop(*qubit, outcome, matches!(step.op, StepOp::MeasureX { .. }));
            }
        }
    }

    let acceptance = rho.trace();
    if acceptance <= 0.0 {
        return Err(OracleError::ZeroAcceptance);
    }
    let (out, scalar) = rho.into_matrix(&c.output_qubits);
    let dim = 1usize << c.output_qubits.len();
    let values = functionals
        .iter()
        .map(|f| scalar * functional_on_density(f, &out, dim) / acceptance)
        .collect();
    Ok((acceptance, values))
}
