//! In-place gate application on dense complex amplitude vectors.
//!
//! Basis convention: qubit `q` is bit `q` of the amplitude index (qubit 0 is
//! the least significant bit).

use crate::pauli::Pauli;
use num_complex::Complex64;

pub const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub fn apply_h(v: &mut [Complex64], q: u8) {
    let m = 1usize << q;
    for i in 0..v.len() {
        if i & m == 0 {
            let a = v[i];
            let b = v[i | m];
            v[i] = (a + b) * SQRT_HALF;
            v[i | m] = (a - b) * SQRT_HALF;
        }
    }
}

pub fn apply_cnot(v: &mut [Complex64], control: u8, target: u8) {
    let cm = 1usize << control;
    let tm = 1usize << target;
    for i in 0..v.len() {
        if i & cm != 0 && i & tm == 0 {
            v.swap(i, i | tm);
        }
    }
}

pub fn apply_pauli(v: &mut [Complex64], q: u8, p: Pauli) {
    let m = 1usize << q;
    match p {
        Pauli::I => {}
        Pauli::X => {
            for i in 0..v.len() {
                if i & m == 0 {
                    v.swap(i, i | m);
                }
            }
        }
        Pauli::Z => {
            for (i, a) in v.iter_mut().enumerate() {
                if i & m != 0 {
                    *a = -*a;
                }
            }
        }
        Pauli::Y => {
            let im = Complex64::new(0.0, 1.0);
            for i in 0..v.len() {
                if i & m == 0 {
                    let a = v[i];
                    let b = v[i | m];
                    v[i] = -im * b;
                    v[i | m] = im * a;
                }
            }
        }
    }
}

/// Apply an X-type operator with the given support mask (index permutation).
pub fn apply_x_mask(v: &mut [Complex64], mask: usize) {
    for i in 0..v.len() {
        let j = i ^ mask;
        if i < j {
            v.swap(i, j);
        }
    }
}

/// Apply a Z-type operator with the given support mask (diagonal signs).
pub fn apply_z_mask(v: &mut [Complex64], mask: usize) {
    for (i, a) in v.iter_mut().enumerate() {
        if (i & mask).count_ones() % 2 == 1 {
            *a = -*a;
        }
    }
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}
