//! Acceptance suite: every reproduction target runs at its stated tolerance
//! and prints one pass/fail line per criterion (run with `--nocapture` to see
//! all of them).

use std::sync::OnceLock;

use steane_ft::circuit::{
    build_encoding_circuit, build_ghz_fragment_circuit, build_qec_circuit, AncillaKind,
    NoiseProfile, QecParams, SyndromeCase, SyndromeKind,
};
use steane_ft::engine::oracle::{density_oracle, Rates};
use steane_ft::engine::{accumulate_series, probability_sum, EnginePath};
use steane_ft::experiments::{
    self, encoding_experiment, mixed_noise_experiment, nonzero_syndrome_experiment,
    qec_experiment, shor_fidelity_experiment, ConditioningMode, FidelityReport, MixedNoiseVariant,
    RunParams,
};
use steane_ft::pauli::Pauli;
use steane_ft::poly::Monomial;
use steane_ft::steane::{self, FidelityFunctional};

const TOL: f64 = 1e-6;
const PI: f64 = std::f64::consts::PI;

/// (alpha, beta) sample points for the trigonometric table formulas.
const SAMPLES: [(f64, f64); 4] =
    [(0.0, 0.0), (PI / 4.0, 0.0), (PI / 8.0, PI / 3.0), (PI / 3.0, PI / 7.0)];

struct Criterion {
    name: &'static str,
    lines: Vec<(String, bool, bool)>,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Criterion { name, lines: Vec::new() }
    }

    fn check(&mut self, label: impl Into<String>, pass: bool) {
        self.lines.push((label.into(), pass, false));
    }

    fn check_coeff(&mut self, label: impl Into<String>, computed: f64, expected: f64) {
        let label = label.into();
        let pass = (computed - expected).abs() <= TOL;
        self.lines.push((
            format!("{label}: expected {expected}, computed {computed:.9}"),
            pass,
            false,
        ));
    }

    fn advisory(&mut self, label: impl Into<String>, computed: f64, expected: f64) {
        let pass = (computed - expected).abs() <= TOL;
        self.lines.push((
            format!("{}: expected {expected}, computed {computed:.9}", label.into()),
            pass,
            true,
        ));
    }

    fn finish(self) {
        let hard_fail: Vec<&(String, bool, bool)> =
            self.lines.iter().filter(|(_, pass, advisory)| !pass && !advisory).collect();
        let status = if hard_fail.is_empty() { "PASS" } else { "FAIL" };
        println!("{}: {status}", self.name);
        for (label, pass, advisory) in &self.lines {
            let mark = match (pass, advisory) {
                (true, _) => "ok",
                (false, true) => "ADVISORY-MISMATCH",
                (false, false) => "FAIL",
            };
            println!("    [{mark}] {label}");
        }
        assert!(
            hard_fail.is_empty(),
            "{} failed {} hard check(s)",
            self.name,
            hard_fail.len()
        );
    }
}

fn workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(4)
}

fn run(k: u8) -> RunParams {
    RunParams {
        max_order: k,
        conditioning: ConditioningMode::ExactZero,
        path: EnginePath::PauliFrame,
        workers: workers(),
        progress: None,
    }
}

fn coeff(report: &FidelityReport, measure: &str, m: Monomial) -> f64 {
    report.measure(measure).expect("measure present").coeff(&m)
}

fn first_order(report: &FidelityReport, measure: &str) -> (f64, f64, f64, f64) {
    let p = report.measure(measure).expect("measure present");
    (
        p.constant_term(),
        p.coeff(&Monomial::PX),
        p.coeff(&Monomial::PY),
        p.coeff(&Monomial::PZ),
    )
}

fn encoding_reports_k2() -> &'static [(&'static str, AncillaKind, FidelityReport)] {
    static CACHE: OnceLock<Vec<(&'static str, AncillaKind, FidelityReport)>> = OnceLock::new();
    CACHE.get_or_init(|| {
        [
            ("no_verifications", AncillaKind::shor(0)),
            ("one_verification", AncillaKind::shor(1)),
            ("two_verifications", AncillaKind::shor(2)),
            ("single_ancilla", AncillaKind::Single),
        ]
        .into_iter()
        .map(|(name, anc)| (name, anc, encoding_experiment(anc, &run(2))))
        .collect()
    })
}

#[test]
fn criterion_01_shor_state_fidelities() {
    let mut cr = Criterion::new("criterion 1 (shor-state fidelities)");
    let expected = [
        (0u8, -10.0, -11.0, -7.0),
        (1, -5.0, -6.0, -10.0),
        (2, -5.0, -6.0, -13.0),
    ];
    for (n, ex, ey, ez) in expected {
        let rep = shor_fidelity_experiment(n, (0, 3), &run(1));
        let (c0, px, py, pz) = first_order(&rep, "shor_fidelity");
        cr.check_coeff(format!("verif={n} constant"), c0, 1.0);
        cr.check_coeff(format!("verif={n} p_x"), px, ex);
        cr.check_coeff(format!("verif={n} p_y"), py, ey);
        cr.check_coeff(format!("verif={n} p_z"), pz, ez);
    }
    cr.finish();
}

#[test]
fn criterion_02_encoding_seven_qubit() {
    let mut cr = Criterion::new("criterion 2 (encoding 7-qubit fidelities)");
    let expected = [
        ("no_verifications", -85.0, -37.0, -12.0),
        ("one_verification", -55.0, -19.0, -12.0),
        ("two_verifications", -55.0, -19.0, -12.0),
        ("single_ancilla", -49.0, -19.0, -12.0),
    ];
    for (scenario, ex, ey, ez) in expected {
        let rep = &encoding_reports_k2()
            .iter()
            .find(|(name, _, _)| *name == scenario)
            .unwrap()
            .2;
        let (c0, px, py, pz) = first_order(rep, "seven_qubit");
        cr.check_coeff(format!("{scenario} constant"), c0, 1.0);
        cr.check_coeff(format!("{scenario} p_x"), px, ex);
        cr.check_coeff(format!("{scenario} p_y"), py, ey);
        cr.check_coeff(format!("{scenario} p_z"), pz, ez);
    }
    // shor(1) and shor(2) rows are identical at first order
    let one = encoding_reports_k2().iter().find(|(n, _, _)| *n == "one_verification").unwrap();
    let two = encoding_reports_k2().iter().find(|(n, _, _)| *n == "two_verifications").unwrap();
    for m in [Monomial::PX, Monomial::PY, Monomial::PZ] {
        cr.check(
            format!("shor(1) == shor(2) at {m}"),
            (coeff(&one.2, "seven_qubit", m) - coeff(&two.2, "seven_qubit", m)).abs() <= TOL,
        );
    }
    cr.finish();
}

#[test]
fn criterion_03_encoding_one_qubit() {
    let mut cr = Criterion::new("criterion 3 (encoding 1-qubit fidelities)");
    let expected = [
        ("no_verifications", -25.0, -11.0),
        ("one_verification", -19.0, -7.0),
        ("two_verifications", -19.0, -7.0),
        ("single_ancilla", -15.0, -7.0),
    ];
    for (scenario, ex, ey) in expected {
        let rep = &encoding_reports_k2()
            .iter()
            .find(|(name, _, _)| *name == scenario)
            .unwrap()
            .2;
        let (c0, px, py, pz) = first_order(rep, "one_qubit");
        cr.check_coeff(format!("{scenario} constant"), c0, 1.0);
        // zero first-order p_z coefficient is the hard requirement
        cr.check_coeff(format!("{scenario} p_z"), pz, 0.0);
        // exact weights are decoder-convention advisory
        cr.advisory(format!("{scenario} p_x (advisory)"), px, ex);
        cr.advisory(format!("{scenario} p_y (advisory)"), py, ey);
    }
    cr.finish();
}

#[test]
fn criterion_04_after_perfect_qec() {
    let mut cr = Criterion::new("criterion 4 (after-perfect-QEC, K=2)");
    let m2 = [
        Monomial::new(2, 0, 0),
        Monomial::new(1, 1, 0),
        Monomial::new(0, 2, 0),
        Monomial::new(0, 0, 2),
        Monomial::new(1, 0, 1),
        Monomial::new(0, 1, 1),
    ];

    for (scenario, second_order) in [
        ("no_verifications", Some([-92.0, -74.0, -14.0])),
        ("one_verification", None),
        ("two_verifications", None),
        ("single_ancilla", Some([-26.0, -6.0, 0.0])),
    ] {
        let rep = &encoding_reports_k2()
            .iter()
            .find(|(name, _, _)| *name == scenario)
            .unwrap()
            .2;
        let poly = rep.measure("after_perfect_qec").unwrap();
        cr.check_coeff(format!("{scenario} constant"), poly.constant_term(), 1.0);
        for m in [Monomial::PX, Monomial::PY, Monomial::PZ] {
            cr.check_coeff(format!("{scenario} first order {m}"), poly.coeff(&m), 0.0);
        }
        match second_order {
            None => {
                for m in m2 {
                    cr.check_coeff(format!("{scenario} {m}"), poly.coeff(&m), 0.0);
                }
            }
            Some([xx, xy, yy]) => {
                cr.check_coeff(format!("{scenario} p_x^2"), poly.coeff(&m2[0]), xx);
                cr.check_coeff(format!("{scenario} p_x p_y"), poly.coeff(&m2[1]), xy);
                cr.check_coeff(format!("{scenario} p_y^2"), poly.coeff(&m2[2]), yy);
            }
        }
    }

    // Oracle scaling for shor(1): one noiseless zero-syndrome projection after
    // encoding leaves no loss below third order.
    let c = build_encoding_circuit(AncillaKind::shor(1));
    let f = [
        FidelityFunctional::seven_qubit(steane::logical_state(0.0, 0.0)),
        FidelityFunctional::code_space_weight(),
    ];
    let mut losses = Vec::new();
    for p in [1e-2, 3e-3, 1e-3] {
        let (_, vals) = density_oracle(&c, Rates::uniform(p), &f).unwrap();
        losses.push((p, 1.0 - vals[0] / vals[1]));
    }
    let slope = (losses[0].1 / losses[2].1).log10() / (losses[0].0 / losses[2].0).log10();
    cr.check(format!("oracle slope of (1-F) for shor(1): {slope:.3} >= 2.8"), slope >= 2.8);
    cr.finish();
}

fn table2_reports() -> &'static [(&'static str, AncillaKind, FidelityReport)] {
    static CACHE: OnceLock<Vec<(&'static str, AncillaKind, FidelityReport)>> = OnceLock::new();
    CACHE.get_or_init(|| {
        [
            ("no_verifications", AncillaKind::shor(0)),
            ("one_verification", AncillaKind::shor(1)),
            ("two_verifications", AncillaKind::shor(2)),
            ("single_ancilla", AncillaKind::Single),
        ]
        .into_iter()
        .map(|(name, anc)| {
            (name, anc, qec_experiment(SyndromeKind::BitFlip, anc, 0.0, 0.0, &run(1)))
        })
        .collect()
    })
}

#[test]
fn criterion_05_qec_bit_first() {
    let mut cr = Criterion::new("criterion 5 (QEC all-zero, bit-first)");
    let expected = [
        ("no_verifications", -85.0, -25.0, -7.0),
        ("one_verification", -55.0, -7.0, -7.0),
        ("two_verifications", -55.0, -7.0, -7.0),
        ("single_ancilla", -49.0, -7.0, -7.0),
    ];
    for (scenario, ex, ey, ez) in expected {
        let rep = &table2_reports().iter().find(|(n, _, _)| *n == scenario).unwrap().2;
        let (c0, px, py, pz) = first_order(rep, "seven_qubit");
        cr.check_coeff(format!("{scenario} 7q constant"), c0, 1.0);
        cr.check_coeff(format!("{scenario} 7q p_x"), px, ex);
        cr.check_coeff(format!("{scenario} 7q p_y"), py, ey);
        cr.check_coeff(format!("{scenario} 7q p_z"), pz, ez);
    }

    // 1-qubit rows against the trigonometric formulas at the sample points;
    // the universal -(3/2)(1-a) p_z term is hard, p_x/p_y weights advisory.
    let table2 = load_expectations("table2");
    for (scenario, anc) in [
        ("no_verifications", AncillaKind::shor(0)),
        ("one_verification", AncillaKind::shor(1)),
        ("two_verifications", AncillaKind::shor(2)),
        ("single_ancilla", AncillaKind::Single),
    ] {
        for (alpha, beta) in SAMPLES {
            let rep = qec_experiment(SyndromeKind::BitFlip, anc, alpha, beta, &run(1));
            let a = (4.0 * alpha).cos();
            let pz = coeff(&rep, "one_qubit", Monomial::PZ);
            cr.check_coeff(
                format!("{scenario} 1q p_z at ({alpha:.3},{beta:.3})"),
                pz,
                -1.5 * (1.0 - a),
            );
            let cmp = experiments::compare_to_expected(
                &rep,
                &table2.rows,
                scenario,
                alpha,
                beta,
                TOL,
            );
            for row in cmp.rows.iter().filter(|r| r.measure == "one_qubit") {
                if row.monomial == Monomial::PX || row.monomial == Monomial::PY {
                    cr.advisory(
                        format!(
                            "{scenario} 1q {} at ({alpha:.3},{beta:.3}) (advisory)",
                            row.monomial
                        ),
                        row.computed,
                        row.expected,
                    );
                }
            }
        }
    }

    // The alpha-dependence claim is tied to the p_z terms: at alpha in
    // {0, pi/2} the first-order p_z contribution vanishes and at alpha = pi/4
    // it peaks. Sample alpha on a grid at a fixed small p_z-dominated rate.
    let rate = 1e-3;
    let fidelity_at = |alpha: f64| -> f64 {
        let rep = qec_experiment(SyndromeKind::BitFlip, AncillaKind::shor(1), alpha, 0.0, &run(1));
        rep.measure("one_qubit").unwrap().evaluate(0.0, 0.0, rate)
    };
    let grid: Vec<f64> = (0..=8).map(|i| i as f64 * PI / 16.0).collect();
    let values: Vec<f64> = grid.iter().map(|&a| fidelity_at(a)).collect();
    let at_0 = values[0];
    let at_quarter = values[4];
    let at_half = values[8];
    cr.check(
        "1q fidelity maximal at alpha in {0, pi/2}, minimal at pi/4 (p_z-dominated rates)",
        values.iter().all(|&v| v <= at_0.max(at_half) + 1e-12 && v >= at_quarter - 1e-12),
    );
    cr.finish();
}

#[test]
fn criterion_06_qec_phase_first() {
    let mut cr = Criterion::new("criterion 6 (QEC all-zero, phase-first)");
    let expected = [
        ("no_verifications", AncillaKind::shor(0), -61.0, -25.0, -55.0),
        ("one_verification", AncillaKind::shor(1), -31.0, -7.0, -55.0),
        ("two_verifications", AncillaKind::shor(2), -31.0, -7.0, -55.0),
        ("single_ancilla", AncillaKind::Single, -7.0, -7.0, -49.0),
    ];
    let mut single_row = (0.0, 0.0, 0.0);
    for (scenario, anc, ex, ey, ez) in expected {
        let rep = qec_experiment(SyndromeKind::PhaseFlip, anc, 0.0, 0.0, &run(1));
        let (c0, px, py, pz) = first_order(&rep, "seven_qubit");
        if scenario == "single_ancilla" {
            single_row = (px, py, pz);
        }
        cr.check_coeff(format!("{scenario} 7q constant"), c0, 1.0);
        cr.check_coeff(format!("{scenario} 7q p_x"), px, ex);
        cr.check_coeff(format!("{scenario} 7q p_y"), py, ey);
        cr.check_coeff(format!("{scenario} 7q p_z"), pz, ez);
    }

    // Order-swap property for the single ancilla: p_x and p_z trade places
    // against the bit-first row while p_y is unchanged.
    let bit = &table2_reports().iter().find(|(n, _, _)| *n == "single_ancilla").unwrap().2;
    let (_, bx, by, bz) = first_order(bit, "seven_qubit");
    cr.check_coeff("swap: phase-first p_x == bit-first p_z", single_row.0, bz);
    cr.check_coeff("swap: phase-first p_z == bit-first p_x", single_row.2, bx);
    cr.check_coeff("swap: p_y unchanged", single_row.1, by);

    // 1-qubit p_z term -(27/2)(1-a) for the Shor-state columns.
    for (alpha, beta) in SAMPLES {
        let rep =
            qec_experiment(SyndromeKind::PhaseFlip, AncillaKind::shor(1), alpha, beta, &run(1));
        let a = (4.0 * alpha).cos();
        cr.check_coeff(
            format!("shor(1) 1q p_z at ({alpha:.3},{beta:.3})"),
            coeff(&rep, "one_qubit", Monomial::PZ),
            -13.5 * (1.0 - a),
        );
    }
    cr.finish();
}

#[test]
fn criterion_07_mixed_noise() {
    let mut cr = Criterion::new("criterion 7 (mixed noise, table 4)");
    // Noisy Shor states + perfect error correction: 1 - 24 p_x for both
    // orders, with no first-order p_y or p_z terms.
    for order in [SyndromeKind::BitFlip, SyndromeKind::PhaseFlip] {
        let rep =
            mixed_noise_experiment(MixedNoiseVariant::NoisyShorPerfectQec, order, 0.0, 0.0, &run(1));
        let (c0, px, py, pz) = first_order(&rep, "seven_qubit");
        let name = if order == SyndromeKind::BitFlip { "bit-first" } else { "phase-first" };
        cr.check_coeff(format!("noisy-shor {name} 7q constant"), c0, 1.0);
        cr.check_coeff(format!("noisy-shor {name} 7q p_x"), px, -24.0);
        cr.check_coeff(format!("noisy-shor {name} 7q p_y"), py, 0.0);
        cr.check_coeff(format!("noisy-shor {name} 7q p_z"), pz, 0.0);
    }

    // Perfect Shor states + noisy error correction: rows as printed.
    for (order, name, ex, ey, ez) in [
        (SyndromeKind::BitFlip, "bit-first", -31.0, -7.0, -7.0),
        (SyndromeKind::PhaseFlip, "phase-first", -7.0, -7.0, -55.0),
    ] {
        let rep =
            mixed_noise_experiment(MixedNoiseVariant::PerfectShorNoisyQec, order, 0.0, 0.0, &run(1));
        let (c0, px, py, pz) = first_order(&rep, "seven_qubit");
        cr.check_coeff(format!("perfect-shor {name} 7q constant"), c0, 1.0);
        cr.check_coeff(format!("perfect-shor {name} 7q p_x"), px, ex);
        cr.check_coeff(format!("perfect-shor {name} 7q p_y"), py, ey);
        cr.check_coeff(format!("perfect-shor {name} 7q p_z"), pz, ez);
    }

    // 1-qubit rows at the sample points (convention-sensitive, advisory).
    let table4 = load_expectations("table4");
    for (variant, order, scenario) in [
        (MixedNoiseVariant::NoisyShorPerfectQec, SyndromeKind::BitFlip, "noisy_shor_perfect_qec_bit_first"),
        (MixedNoiseVariant::NoisyShorPerfectQec, SyndromeKind::PhaseFlip, "noisy_shor_perfect_qec_phase_first"),
        (MixedNoiseVariant::PerfectShorNoisyQec, SyndromeKind::BitFlip, "perfect_shor_noisy_qec_bit_first"),
        (MixedNoiseVariant::PerfectShorNoisyQec, SyndromeKind::PhaseFlip, "perfect_shor_noisy_qec_phase_first"),
    ] {
        for (alpha, beta) in SAMPLES {
            let rep = mixed_noise_experiment(variant, order, alpha, beta, &run(1));
            let cmp =
                experiments::compare_to_expected(&rep, &table4.rows, scenario, alpha, beta, TOL);
            for row in cmp.rows.iter().filter(|r| r.measure == "one_qubit") {
                cr.advisory(
                    format!("{scenario} 1q {} at ({alpha:.3},{beta:.3}) (advisory)", row.monomial),
                    row.computed,
                    row.expected,
                );
            }
        }
    }
    cr.finish();
}

#[test]
fn criterion_08_nonzero_syndrome() {
    let mut cr = Criterion::new("criterion 8 (nonzero syndrome 001)");
    let alpha = PI / 8.0;
    let beta = PI / 5.0;

    // Syndrome-measurement order is not pinned for this scenario; the driver
    // default resolves it to phase-first (see the decisions record). Both
    // orders are computed and reported.
    let phase = nonzero_syndrome_experiment([0, 0, 1], alpha, beta, SyndromeKind::PhaseFlip, &run(1));
    let bit = nonzero_syndrome_experiment([0, 0, 1], alpha, beta, SyndromeKind::BitFlip, &run(1));

    let leading7 = phase.leading.iter().find(|(n, _)| n == "seven_qubit").unwrap().1;
    let leading7_bit = bit.leading.iter().find(|(n, _)| n == "seven_qubit").unwrap().1;
    cr.check(
        format!("leading 7q conditional fidelity {leading7:.6} within [0.35, 0.65] (phase-first)"),
        (0.35..=0.65).contains(&leading7),
    );
    // Frozen engine regression values for both orders.
    cr.check(
        format!("phase-first leading constant {leading7:.6} == 5/12"),
        (leading7 - 5.0 / 12.0).abs() < 1e-9,
    );
    cr.check(
        format!("bit-first leading constant {leading7_bit:.6} == 1/4 (reported)"),
        (leading7_bit - 0.25).abs() < 1e-9,
    );

    // The contributing first-order set must include a fault on data qubit 7
    // (0-based 6) at or after the C7-NOT11 coupling of the second syndrome's
    // blocks.
    for (name, outcome, order) in
        [("phase-first", &phase, SyndromeKind::PhaseFlip), ("bit-first", &bit, SyndromeKind::BitFlip)]
    {
        let c = build_qec_circuit(&QecParams {
            order_first: order,
            ancilla: AncillaKind::shor(1),
            case: SyndromeCase::Fixed { bit: [0, 0, 1], phase: [0, 0, 0] },
            alpha,
            beta,
            profile: NoiseProfile::all_noisy(),
        });
        let c7not11_step = c
            .blocks
            .iter()
            .filter(|b| b.kind == SyndromeKind::BitFlip && b.stab == 1)
            .map(|b| *b.coupling_steps.last().unwrap())
            .min()
            .unwrap();
        let found = outcome.contributing.iter().any(|p| {
            p.step >= c7not11_step && p.paulis.iter().any(|&(q, pl)| q == 6 && pl == Pauli::X)
        });
        cr.check(
            format!("{name}: qubit-7 fault class at/after C7-NOT11 present ({} classes)", outcome.contributing.len()),
            found,
        );
    }
    cr.finish();
}

#[test]
fn criterion_09_property_suites() {
    let mut cr = Criterion::new("criterion 9 (property suites)");

    // Pattern-probability normalization: the truncated sum is the constant 1
    // as a polynomial; evaluated at p = 1e-3 the deviation stays below 1e-8.
    let enc = build_encoding_circuit(AncillaKind::shor(1));
    let total = probability_sum(&enc, 2);
    let dev = (total.evaluate(1e-3, 1e-3, 1e-3) - 1.0).abs();
    cr.check(format!("normalization deviation {dev:.2e} < 1e-8 (K=2)"), dev < 1e-8);

    // Engine path equivalence on every pattern of the criterion-1 and
    // criterion-2 scenarios.
    let mut max_dev: f64 = 0.0;
    for n in 0..=2u8 {
        let c = build_ghz_fragment_circuit(n, (0, 3));
        let f = [FidelityFunctional::shor_state()];
        let acc = accumulate_series(&c, 2, &f, EnginePath::Both, workers());
        max_dev = max_dev.max(acc.max_path_deviation);
    }
    for anc in [
        AncillaKind::shor(0),
        AncillaKind::shor(1),
        AncillaKind::shor(2),
        AncillaKind::Single,
    ] {
        let c = build_encoding_circuit(anc);
        let f = [
            FidelityFunctional::seven_qubit(steane::logical_state(0.0, 0.0)),
            FidelityFunctional::one_qubit(steane::logical_target(0.0, 0.0)),
            FidelityFunctional::code_space_weight(),
        ];
        let k = if anc == AncillaKind::Single { 2 } else { 1 };
        let acc = accumulate_series(&c, k, &f, EnginePath::Both, workers());
        max_dev = max_dev.max(acc.max_path_deviation);
    }
    cr.check(
        format!("state-vector / Pauli-frame max deviation {max_dev:.2e} <= 1e-9"),
        max_dev <= 1e-9,
    );

    // Perfect-QEC projector completeness to 1e-12.
    let mut complete = true;
    for i in 0..steane::DATA_DIM {
        let mut v = vec![num_complex::Complex64::ZERO; steane::DATA_DIM];
        v[i] = num_complex::Complex64::ONE;
        let total: f64 = (0..64u8)
            .map(|s| {
                let mut w = v.clone();
                steane::project_syndrome(&mut w, s & 0b111, (s >> 3) & 0b111);
                steane_ft::dense::norm_sq(&w)
            })
            .sum();
        if (total - 1.0).abs() > 1e-12 {
            complete = false;
        }
    }
    cr.check("projector completeness over 64 syndromes (1e-12)", complete);

    // All 21 single-qubit errors are corrected exactly.
    let psi = steane::logical_state(0.77, 0.31);
    let f = FidelityFunctional::after_perfect_qec(&psi);
    let mut corrected = true;
    for q in 0..7u8 {
        for p in Pauli::NONTRIVIAL {
            let mut e = psi.clone();
            steane_ft::dense::apply_pauli(&mut e, q, p);
            if (f.value(&e) - 1.0).abs() > 1e-12 {
                corrected = false;
            }
        }
    }
    cr.check("all 21 single-qubit errors corrected (1e-12)", corrected);

    // Deterministic byte-identical JSON across 1, 4 and 8 workers.
    let emit_with = |w: usize| {
        let params = RunParams {
            max_order: 1,
            conditioning: ConditioningMode::ExactZero,
            path: EnginePath::PauliFrame,
            workers: w,
            progress: None,
        };
        let rep = qec_experiment(SyndromeKind::BitFlip, AncillaKind::shor(1), 0.3, 0.7, &params);
        steane_ft::report::emit_json(&rep)
    };
    let j1 = emit_with(1);
    let j4 = emit_with(4);
    let j8 = emit_with(8);
    cr.check("byte-identical JSON across 1, 4, 8 workers", j1 == j4 && j4 == j8);
    cr.finish();
}

#[test]
fn criterion_10_oracle_cross_validation() {
    let mut cr = Criterion::new("criterion 10 (oracle cross-validation)");
    let points = [1e-2, 3e-3, 1e-3];

    // Criterion-1 scenarios at K=2: the residual against the oracle scales as
    // p^3; check the mid point against a five-fold envelope fitted over the
    // decade.
    for n in 0..=2u8 {
        let c = build_ghz_fragment_circuit(n, (0, 3));
        let f = [FidelityFunctional::shor_state()];
        let acc = accumulate_series(&c, 2, &f, EnginePath::PauliFrame, workers());
        let fid = acc.numerators[0].series_quotient(&acc.denominator).unwrap();
        let diffs: Vec<(f64, f64)> = points
            .iter()
            .map(|&p| {
                let (_, vals) = density_oracle(&c, Rates::uniform(p), &f).unwrap();
                (p, (vals[0] - fid.evaluate(p, p, p)).abs())
            })
            .collect();
        cr.check(
            format!("shor verif={n}: residual within 5x fitted p^3 envelope"),
            envelope_ok(&diffs, 3),
        );
    }

    // Criterion-5 scenarios at K=1: p^2 envelope.
    for (name, anc) in
        [("shor(1)", AncillaKind::shor(1)), ("single", AncillaKind::Single)]
    {
        let c = build_qec_circuit(&QecParams {
            order_first: SyndromeKind::BitFlip,
            ancilla: anc,
            case: SyndromeCase::AllZero,
            alpha: 0.0,
            beta: 0.0,
            profile: NoiseProfile::all_noisy(),
        });
        let f = [FidelityFunctional::seven_qubit(steane::logical_state(0.0, 0.0))];
        let acc = accumulate_series(&c, 1, &f, EnginePath::PauliFrame, workers());
        let fid = acc.numerators[0].series_quotient(&acc.denominator).unwrap();
        let diffs: Vec<(f64, f64)> = points
            .iter()
            .map(|&p| {
                let (_, vals) = density_oracle(&c, Rates::uniform(p), &f).unwrap();
                (p, (vals[0] - fid.evaluate(p, p, p)).abs())
            })
            .collect();
        cr.check(
            format!("qec bit-first {name}: residual within 5x fitted p^2 envelope"),
            envelope_ok(&diffs, 2),
        );
    }
    cr.finish();
}

/// Fit `diff = C p^order` over the sampled decade (geometric-mean estimate)
/// and require the mid point to sit within five times the fitted envelope.
fn envelope_ok(diffs: &[(f64, f64)], order: i32) -> bool {
    if diffs.iter().all(|(_, d)| *d < 1e-13) {
        return true;
    }
    let log_c: f64 = diffs
        .iter()
        .map(|(p, d)| (d.max(1e-300) / p.powi(order)).ln())
        .sum::<f64>()
        / diffs.len() as f64;
    let c_fit = log_c.exp();
    diffs.iter().all(|&(p, d)| d <= 5.0 * c_fit * p.powi(order))
}

fn load_expectations(table: &str) -> experiments::ExpectationFile {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("expectations")
        .join(format!("{table}.json"));
    experiments::ExpectationFile::load(&path).expect("expectation file loads")
}
