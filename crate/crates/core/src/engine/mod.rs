//! Per-pattern simulation, deterministic parallel series accumulation, and
//! the numeric density-matrix oracle.

pub mod frame;
pub mod oracle;
pub mod statevector;

use crate::circuit::{for_each_pattern_rooted, Circuit, FaultPattern};
use crate::poly::{Monomial, PolyError, TruncatedPoly};
use crate::steane::FidelityFunctional;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnginePath {
    StateVector,
    PauliFrame,
    /// Run both engines per pattern and track their largest disagreement.
    Both,
}

impl EnginePath {
    pub fn name(&self) -> &'static str {
        match self {
            EnginePath::StateVector => "statevector",
            EnginePath::PauliFrame => "pauliframe",
            EnginePath::Both => "both",
        }
    }
}

/// Numerator/denominator series of a post-selected experiment. The
/// denominator carries the acceptance probability; each numerator carries one
/// fidelity functional.
#[derive(Debug, Clone)]
pub struct SeriesAccumulation {
    pub denominator: TruncatedPoly,
    pub numerators: Vec<TruncatedPoly>,
    pub pattern_count: u64,
    pub accepted_count: u64,
    pub max_path_deviation: f64,
}

impl SeriesAccumulation {
    fn new(k: u8, n_functionals: usize) -> Self {
        SeriesAccumulation {
            denominator: TruncatedPoly::zero(k),
            numerators: vec![TruncatedPoly::zero(k); n_functionals],
            pattern_count: 0,
            accepted_count: 0,
            max_path_deviation: 0.0,
        }
    }

    fn merge(&mut self, other: &SeriesAccumulation) {
        self.denominator = self.denominator.add(&other.denominator);
        for (a, b) in self.numerators.iter_mut().zip(&other.numerators) {
            *a = a.add(b);
        }
        self.pattern_count += other.pattern_count;
        self.accepted_count += other.accepted_count;
        self.max_path_deviation = self.max_path_deviation.max(other.max_path_deviation);
    }
}

/// Precomputed probability polynomials: the no-fault weight is a power of
/// `p_0 = 1 - p_x - p_y - p_z` per remaining single-qubit noise factor, times
/// the exact `1 - 7(p_x+p_y+p_z)` factor when the input mixture is present
/// and unchosen.
struct ProbCache {
    p0: Vec<TruncatedPoly>,
    p0_with_mixture: Vec<TruncatedPoly>,
    has_mixture: bool,
}

impl ProbCache {
    fn new(c: &Circuit, k: u8) -> Self {
        let n = c.total_units as usize;
        let p0: Vec<TruncatedPoly> =
            (0..=n).map(|e| TruncatedPoly::p0_power(k, e as u32)).collect();
        let has_mixture = c.mixture_location.is_some();
        let p0_with_mixture = if has_mixture {
            let mut mix = TruncatedPoly::one(k);
            mix.add_term(Monomial::PX, -7.0);
            mix.add_term(Monomial::PY, -7.0);
            mix.add_term(Monomial::PZ, -7.0);
            p0.iter().map(|p| p.mul(&mix)).collect()
        } else {
            Vec::new()
        };
        ProbCache { p0, p0_with_mixture, has_mixture }
    }

    fn probability(&self, c: &Circuit, pattern: &FaultPattern) -> TruncatedPoly {
        let mut consumed = 0u32;
        let mut mixture_chosen = false;
        let mut monomial = Monomial::ONE;
        for &(l, e) in &pattern.choices {
            let loc = &c.locations[l];
            let ev = &loc.events[e];
            if loc.is_mixture {
                mixture_chosen = true;
            } else {
                consumed += loc.units - ev.p0_extra as u32;
            }
            monomial = monomial.mul(&ev.monomial);
        }
        let exponent = (c.total_units - consumed) as usize;
        let base = if self.has_mixture && !mixture_chosen {
            &self.p0_with_mixture[exponent]
        } else {
            &self.p0[exponent]
        };
        base.mul_monomial(monomial, 1.0)
    }
}

/// Acceptance weight and functional values of a single pattern.
pub fn eval_pattern(
    c: &Circuit,
    pattern: &FaultPattern,
    functionals: &[FidelityFunctional],
    path: EnginePath,
) -> (f64, Vec<f64>, f64) {
    let run = |sv: bool| {
        if sv {
            statevector::run_pattern(c, pattern)
        } else {
            frame::run_pattern(c, pattern)
        }
    };
    match path {
        EnginePath::StateVector | EnginePath::PauliFrame => {
            let (w, state) = run(path == EnginePath::StateVector);
            let values = values_of(functionals, state.as_deref());
            (w, values, 0.0)
        }
        EnginePath::Both => {
            let (w_sv, state_sv) = run(true);
            let (w_fr, state_fr) = run(false);
            let v_sv = values_of(functionals, state_sv.as_deref());
            let v_fr = values_of(functionals, state_fr.as_deref());
            let mut dev = (w_sv - w_fr).abs();
            for (a, b) in v_sv.iter().zip(&v_fr) {
                dev = dev.max((a - b).abs());
            }
            (w_sv, v_sv, dev)
        }
    }
}

fn values_of(functionals: &[FidelityFunctional], state: Option<&[num_complex::Complex64]>) -> Vec<f64> {
    match state {
        None => vec![0.0; functionals.len()],
        Some(phi) => functionals.iter().map(|f| f.value(phi)).collect(),
    }
}

/// Enumerate all fault patterns to the given order and accumulate the
/// acceptance-probability series and one numerator per functional.
///
/// The pattern stream is partitioned by the pattern's lowest chosen location;
/// chunk results are merged in fixed order so the reduction is bitwise
/// deterministic for any worker count.
pub fn accumulate_series(
    c: &Circuit,
    max_order: u8,
    functionals: &[FidelityFunctional],
    path: EnginePath,
    workers: usize,
) -> SeriesAccumulation {
    accumulate_series_with_progress(c, max_order, functionals, path, workers, None)
}

/// As [`accumulate_series`], advancing `progress` by the number of patterns
/// processed so a caller can report patterns-processed/total from another
/// thread.
pub fn accumulate_series_with_progress(
    c: &Circuit,
    max_order: u8,
    functionals: &[FidelityFunctional],
    path: EnginePath,
    workers: usize,
    progress: Option<&std::sync::atomic::AtomicU64>,
) -> SeriesAccumulation {
    use std::sync::atomic::Ordering;
    assert!(max_order <= 3, "enumeration order capped at 3");
    let k = max_order;
    let cache = ProbCache::new(c, k);

    let mut total = SeriesAccumulation::new(k, functionals.len());
    // Empty pattern first.
    let empty = FaultPattern::default();
    accumulate_one(c, &empty, &cache, functionals, path, &mut total);

    if max_order == 0 || c.locations.is_empty() {
        return total;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("failed to build worker pool");
    let partials: Vec<SeriesAccumulation> = pool.install(|| {
        (0..c.locations.len())
            .into_par_iter()
            .map(|root| {
                let mut acc = SeriesAccumulation::new(k, functionals.len());
                for_each_pattern_rooted(c, max_order, root, |pat| {
                    accumulate_one(c, pat, &cache, functionals, path, &mut acc);
                });
                if let Some(counter) = progress {
                    counter.fetch_add(acc.pattern_count, Ordering::Relaxed);
                }
                acc
            })
            .collect()
    });
    for p in &partials {
        total.merge(p);
    }
    total
}

/// Number of patterns [`accumulate_series`] will visit at the given order.
pub fn pattern_total(c: &Circuit, max_order: u8) -> u64 {
    // Order-o pattern counts are elementary symmetric sums of the per-location
    // event counts; compute them with the standard DP.
    let k = max_order as usize;
    let mut sums = vec![0f64; k + 1];
    sums[0] = 1.0;
    for loc in &c.locations {
        let e = loc.events.len() as f64;
        for o in (1..=k).rev() {
            sums[o] += sums[o - 1] * e;
        }
    }
    sums.iter().sum::<f64>() as u64
}

fn accumulate_one(
    c: &Circuit,
    pattern: &FaultPattern,
    cache: &ProbCache,
    functionals: &[FidelityFunctional],
    path: EnginePath,
    acc: &mut SeriesAccumulation,
) {
    acc.pattern_count += 1;
    // The truncated probability of a pattern whose base monomial exceeds the
    // expansion order is identically zero; skip the simulation.
    if pattern.monomial(c).degree() > acc.denominator.max_degree() {
        return;
    }
    let prob = cache.probability(c, pattern);
    let (weight, values, dev) = eval_pattern(c, pattern, functionals, path);
    acc.max_path_deviation = acc.max_path_deviation.max(dev);
    if weight > 0.0 {
        acc.accepted_count += 1;
        acc.denominator.add_scaled(&prob, weight);
        for (num, v) in acc.numerators.iter_mut().zip(&values) {
            num.add_scaled(&prob, *v);
        }
    }
}

/// Sum of all pattern probabilities; equals 1 exactly up to the truncation
/// degree (used by the normalization property test).
pub fn probability_sum(c: &Circuit, max_order: u8) -> TruncatedPoly {
    let cache = ProbCache::new(c, max_order);
    let mut total = TruncatedPoly::zero(max_order);
    crate::circuit::for_each_pattern(c, max_order, |pat| {
        total = total.add(&cache.probability(c, pat));
    });
    total
}

/// Post-selected fidelity series: numerator over denominator, with the
/// common-lowest-order rule for rare-event conditioning.
pub fn conditional_fidelity(
    acc: &SeriesAccumulation,
    functional_index: usize,
) -> Result<TruncatedPoly, PolyError> {
    acc.numerators[functional_index].series_quotient(&acc.denominator)
}


/// First-order patterns with nonzero acceptance, with their residual weight
/// and values; used to inspect which fault classes feed a conditioned
/// syndrome.
pub fn accepted_first_order(
    c: &Circuit,
    functionals: &[FidelityFunctional],
) -> Vec<(FaultPattern, f64, Vec<f64>)> {
    let mut out = Vec::new();
    crate::circuit::for_each_pattern(c, 1, |pat| {
        if pat.order() != 1 || pat.monomial(c).degree() != 1 {
            return;
        }
        let (w, values, _) = eval_pattern(c, pat, functionals, EnginePath::PauliFrame);
        if w > 0.0 {
            out.push((pat.clone(), w, values));
        }
    });
    out
}
