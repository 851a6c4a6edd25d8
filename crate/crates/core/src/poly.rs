//! Truncated trivariate polynomial arithmetic over the error rates
//! `(p_x, p_y, p_z)`, including the power-series quotient used to normalize
//! post-selected fidelities.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Coefficient comparisons below this magnitude are treated as zero.
pub const COEFF_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("division by a polynomial that is zero up to the truncation degree")]
    DivisionByZero,
    #[error("numerator has nonzero terms below the divisor's lowest order")]
    InconsistentSeries,
}

/// Exponent triple for `p_x^ex p_y^ey p_z^ez`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub ex: u8,
    pub ey: u8,
    pub ez: u8,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { ex: 0, ey: 0, ez: 0 };
    pub const PX: Monomial = Monomial { ex: 1, ey: 0, ez: 0 };
    pub const PY: Monomial = Monomial { ex: 0, ey: 1, ez: 0 };
    pub const PZ: Monomial = Monomial { ex: 0, ey: 0, ez: 1 };

    pub fn new(ex: u8, ey: u8, ez: u8) -> Self {
        Monomial { ex, ey, ez }
    }

    pub fn degree(&self) -> u8 {
        self.ex + self.ey + self.ez
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::new(self.ex + other.ex, self.ey + other.ey, self.ez + other.ez)
    }

    /// Ordering used for serialized output: total degree, then
    /// lexicographically with `p_x` before `p_y` before `p_z`.
    fn sort_key(&self) -> (u8, u8, u8, u8) {
        (self.degree(), self.ez, self.ey, self.ex)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        for (name, e) in [("p_x", self.ex), ("p_y", self.ey), ("p_z", self.ez)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// Polynomial in `(p_x, p_y, p_z)` with all monomials of total degree greater
/// than `max_degree` discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedPoly {
    max_degree: u8,
    terms: BTreeMap<Monomial, f64>,
}

impl TruncatedPoly {
    pub fn zero(max_degree: u8) -> Self {
        TruncatedPoly { max_degree, terms: BTreeMap::new() }
    }

    pub fn constant(max_degree: u8, c: f64) -> Self {
        let mut p = Self::zero(max_degree);
        p.add_term(Monomial::ONE, c);
        p
    }

    pub fn one(max_degree: u8) -> Self {
        Self::constant(max_degree, 1.0)
    }

    pub fn monomial(max_degree: u8, m: Monomial, c: f64) -> Self {
        let mut p = Self::zero(max_degree);
        p.add_term(m, c);
        p
    }

    /// `(1 - p_x - p_y - p_z)^n` truncated at the polynomial degree.
    ///
    /// Expanded directly from the multinomial theorem so large `n` stay exact.
    pub fn p0_power(max_degree: u8, n: u32) -> Self {
        let mut p = Self::zero(max_degree);
        for j in 0u32..=max_degree as u32 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let c_nj = binomial(n, j);
            if c_nj == 0.0 {
                continue;
            }
            // (p_x + p_y + p_z)^j expanded.
            for ex in 0..=j {
                for ey in 0..=(j - ex) {
                    let ez = j - ex - ey;
                    let multi = multinomial3(j, ex, ey, ez);
                    p.add_term(
                        Monomial::new(ex as u8, ey as u8, ez as u8),
                        sign * c_nj * multi,
                    );
                }
            }
        }
        p
    }

    pub fn max_degree(&self) -> u8 {
        self.max_degree
    }

    pub fn add_term(&mut self, m: Monomial, c: f64) {
        if m.degree() > self.max_degree || c == 0.0 {
            return;
        }
        let entry = self.terms.entry(m).or_insert(0.0);
        *entry += c;
        if entry.abs() < COEFF_EPS {
            self.terms.remove(&m);
        }
    }

    pub fn coeff(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.coeff(&Monomial::ONE)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.abs() < COEFF_EPS)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &f64)> {
        self.terms.iter()
    }

    /// Terms sorted by total degree then lexicographically, the order used in
    /// every serialized report.
    pub fn sorted_terms(&self) -> Vec<(Monomial, f64)> {
        let mut v: Vec<(Monomial, f64)> = self.terms.iter().map(|(m, c)| (*m, *c)).collect();
        v.sort_by_key(|(m, _)| m.sort_key());
        v
    }

    pub fn add(&self, other: &TruncatedPoly) -> TruncatedPoly {
        assert_eq!(self.max_degree, other.max_degree, "mismatched max degree");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, *c);
        }
        out
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &TruncatedPoly, scale: f64) {
        assert_eq!(self.max_degree, other.max_degree, "mismatched max degree");
        if scale == 0.0 {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(*m, c * scale);
        }
    }

    pub fn scale(&self, s: f64) -> TruncatedPoly {
        let mut out = Self::zero(self.max_degree);
        for (m, c) in &self.terms {
            out.add_term(*m, c * s);
        }
        out
    }

    /// Product with all monomials of total degree above the truncation bound
    /// discarded.
    pub fn mul(&self, other: &TruncatedPoly) -> TruncatedPoly {
        assert_eq!(self.max_degree, other.max_degree, "mismatched max degree");
        let mut out = Self::zero(self.max_degree);
        for (ma, ca) in &self.terms {
            if ma.degree() > self.max_degree {
                continue;
            }
            for (mb, cb) in &other.terms {
                if ma.degree() + mb.degree() > self.max_degree {
                    continue;
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// Multiply by a single monomial (truncating), cheaper than `mul`.
    pub fn mul_monomial(&self, m: Monomial, c: f64) -> TruncatedPoly {
        let mut out = Self::zero(self.max_degree);
        for (ma, ca) in &self.terms {
            out.add_term(ma.mul(&m), ca * c);
        }
        out
    }

    /// Power-series quotient `self / divisor`.
    ///
    /// When the divisor's constant term vanishes, both series must share a
    /// common lowest total order `m`; the quotient is then computed to degree
    /// `max_degree - m` (the conditional fidelity of a rare event is a ratio
    /// of the leading parts).
    pub fn series_quotient(&self, divisor: &TruncatedPoly) -> Result<TruncatedPoly, PolyError> {
        assert_eq!(self.max_degree, divisor.max_degree, "mismatched max degree");
        let k = self.max_degree;
        let d_low = divisor.lowest_order().ok_or(PolyError::DivisionByZero)?;
        if let Some(n_low) = self.lowest_order() {
            if n_low < d_low {
                return Err(PolyError::InconsistentSeries);
            }
        } else {
            return Ok(Self::zero(k));
        }

        // Homogeneous layers of numerator and divisor.
        let n_layers = self.layers();
        let d_layers = divisor.layers();
        let lead = &d_layers[d_low as usize];

        let q_max = k - d_low;
        let mut q_layers: Vec<BTreeMap<Monomial, f64>> = vec![BTreeMap::new(); q_max as usize + 1];
        for t in 0..=q_max {
            // residual = n_{d_low+t} - sum_{j<t} q_j * d_{d_low+t-j}
            let mut residual = n_layers[(d_low + t) as usize].clone();
            for j in 0..t {
                let d_layer = &d_layers[(d_low + t - j) as usize];
                for (mq, cq) in &q_layers[j as usize] {
                    for (md, cd) in d_layer {
                        let m = mq.mul(md);
                        let e = residual.entry(m).or_insert(0.0);
                        *e -= cq * cd;
                    }
                }
            }
            q_layers[t as usize] = divide_homogeneous(&residual, lead, t)?;
        }

        let mut q = Self::zero(k);
        for layer in &q_layers {
            for (m, c) in layer {
                q.add_term(*m, *c);
            }
        }
        // The construction must reproduce the numerator when multiplied back.
        let check = q.mul(divisor);
        for deg in d_low..=k {
            for (m, c) in check.layers()[deg as usize].iter() {
                if (c - self.coeff(m)).abs() > 1e-9 {
                    return Err(PolyError::InconsistentSeries);
                }
            }
            for (m, c) in self.layers()[deg as usize].iter() {
                if (c - check.coeff(m)).abs() > 1e-9 {
                    return Err(PolyError::InconsistentSeries);
                }
            }
        }
        Ok(q)
    }

    pub fn evaluate(&self, px: f64, py: f64, pz: f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                c * px.powi(m.ex as i32) * py.powi(m.ey as i32) * pz.powi(m.ez as i32)
            })
            .sum()
    }

    pub fn approx_eq(&self, other: &TruncatedPoly, tol: f64) -> bool {
        let mut keys: Vec<Monomial> = self.terms.keys().copied().collect();
        keys.extend(other.terms.keys().copied());
        keys.sort();
        keys.dedup();
        keys.iter().all(|m| (self.coeff(m) - other.coeff(m)).abs() <= tol)
    }

    /// Re-truncate to a lower maximum degree.
    pub fn truncated(&self, max_degree: u8) -> TruncatedPoly {
        let mut out = Self::zero(max_degree);
        for (m, c) in &self.terms {
            out.add_term(*m, *c);
        }
        out
    }

    /// Round coefficients to 12 significant digits (stable report output).
    pub fn rounded(&self) -> TruncatedPoly {
        let mut out = Self::zero(self.max_degree);
        for (m, c) in &self.terms {
            out.add_term(*m, round_sig(*c, 12));
        }
        out
    }

    fn lowest_order(&self) -> Option<u8> {
        self.terms
            .iter()
            .filter(|(_, c)| c.abs() >= COEFF_EPS)
            .map(|(m, _)| m.degree())
            .min()
    }

    fn layers(&self) -> Vec<BTreeMap<Monomial, f64>> {
        let mut layers = vec![BTreeMap::new(); self.max_degree as usize + 1];
        for (m, c) in &self.terms {
            layers[m.degree() as usize].insert(*m, *c);
        }
        layers
    }

    pub fn to_json_terms(&self) -> Vec<PolyTerm> {
        self.sorted_terms()
            .into_iter()
            .map(|(m, c)| PolyTerm { m: [m.ex, m.ey, m.ez], c })
            .collect()
    }

    pub fn from_json_terms(max_degree: u8, terms: &[PolyTerm]) -> TruncatedPoly {
        let mut p = Self::zero(max_degree);
        for t in terms {
            p.add_term(Monomial::new(t.m[0], t.m[1], t.m[2]), t.c);
        }
        p
    }
}

/// Serialized polynomial term: `{"m":[ex,ey,ez],"c":coefficient}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyTerm {
    pub m: [u8; 3],
    pub c: f64,
}

impl fmt::Display for TruncatedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.sorted_terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (i, (m, c)) in terms.iter().enumerate() {
            let mag = format_coeff(c.abs());
            let sign = if *c < 0.0 { "-" } else if i > 0 { "+" } else { "" };
            if i > 0 {
                out.push(' ');
            }
            if !sign.is_empty() {
                out.push_str(sign);
            }
            if m.degree() == 0 {
                out.push_str(&mag);
            } else if (c.abs() - 1.0).abs() < 1e-12 {
                out.push_str(&format!("{m}"));
            } else {
                out.push_str(&format!("{mag} {m}"));
            }
        }
        write!(f, "{out}")
    }
}

fn format_coeff(c: f64) -> String {
    if (c - c.round()).abs() < 1e-9 && c.abs() < 1e15 {
        format!("{}", c.round() as i64)
    } else {
        let s = format!("{c:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mag = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits - 1 - mag);
    (x * factor).round() / factor
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn multinomial3(j: u32, a: u32, b: u32, c: u32) -> f64 {
    debug_assert_eq!(a + b + c, j);
    binomial(j, a) * binomial(j - a, b)
}

/// Exact division of a homogeneous polynomial by the divisor's leading layer,
/// producing a homogeneous quotient of degree `deg`. Long division on the
/// graded-lex leading term; a nonzero remainder means the series do not divide.
fn divide_homogeneous(
    numerator: &BTreeMap<Monomial, f64>,
    lead: &BTreeMap<Monomial, f64>,
    deg: u8,
) -> Result<BTreeMap<Monomial, f64>, PolyError> {
    let _ = deg;
    let mut rem: BTreeMap<Monomial, f64> = numerator
        .iter()
        .filter(|(_, c)| c.abs() >= COEFF_EPS)
        .map(|(m, c)| (*m, *c))
        .collect();
    let mut quotient = BTreeMap::new();
    let (lm, lc) = lead
        .iter()
        .filter(|(_, c)| c.abs() >= COEFF_EPS)
        .next_back()
        .ok_or(PolyError::DivisionByZero)?;

    while let Some((&rm, &rc)) = rem.iter().filter(|(_, c)| c.abs() >= COEFF_EPS).next_back() {
        // rm must be divisible by lm.
        if rm.ex < lm.ex || rm.ey < lm.ey || rm.ez < lm.ez {
            return Err(PolyError::InconsistentSeries);
        }
        let qm = Monomial::new(rm.ex - lm.ex, rm.ey - lm.ey, rm.ez - lm.ez);
        let qc = rc / lc;
        *quotient.entry(qm).or_insert(0.0) += qc;
        for (dm, dc) in lead {
            let m = qm.mul(dm);
            let e = rem.entry(m).or_insert(0.0);
            *e -= qc * dc;
            if e.abs() < COEFF_EPS {
                rem.remove(&m);
            }
        }
    }
    Ok(quotient)
}
