//! Acceptance suite: one test per acceptance criterion, each printing a
//! PASS line (run with `--nocapture` to see them). Fixture criteria drive
//! the real binary; corpus criteria exercise the library on deterministic
//! seeded inputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::LazyLock;
use std::time::{Duration, Instant};

use gnta_core::certs;
use gnta_core::linalg::{RationalMatrix, RationalVector};
use gnta_core::lp::{self, FarkasCertificate, FeasOutcome, IntOutcome, LpProblem};
use gnta_core::parser::{parse, SourceProgram};
use gnta_core::program::{LassoProgram, LinearRelation};
use gnta_core::rational::Rational;
use gnta_core::smtlib;
use gnta_core::synth::{self, FixedPointOutcome, SynthConfig, SynthOutcome};
use gnta_core::witness::{RecurrenceSet, SetInequality};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gnta"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn load_fixture_program(name: &str) -> LassoProgram {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    parse(&SourceProgram::new(text, name)).unwrap().program
}

fn assert_under_a_second(elapsed: Duration, what: &str) {
    assert!(
        elapsed < Duration::from_secs(1),
        "{what} took {elapsed:?}, budget is 1s"
    );
}

/// xorshift64*: deterministic corpus generation, stable across platforms.
struct Rng(u64);

impl Rng {
    fn new(seed: u64) -> Self {
        Rng(seed.max(1))
    }

    fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }
}

/// Mostly-sparse small coefficients.
fn coefficient(rng: &mut Rng) -> i64 {
    match rng.below(10) {
        0..=4 => 0,
        5..=6 => 1,
        7..=8 => -1,
        _ => {
            if rng.chance(1, 2) {
                2
            } else {
                -2
            }
        }
    }
}

fn relation_from_rows(n: usize, rows: Vec<(Vec<i64>, i64)>) -> LinearRelation {
    let m = rows.len();
    let mut data = Vec::with_capacity(m * 2 * n);
    let mut bounds = Vec::with_capacity(m);
    for (coeffs, bound) in rows {
        data.extend(coeffs.iter().map(|&c| Rational::from_int(c)));
        bounds.push(Rational::from_int(bound));
    }
    LinearRelation::new(
        n,
        RationalMatrix::new(m, 2 * n, data),
        RationalVector::new(bounds),
        vec![false; m],
    )
    .expect("generator builds well-formed rows")
}

/// A random loop relation: a few deterministic-update equality pairs plus a
/// few general guard rows, at most 8 rows total, all non-strict.
fn random_loop(rng: &mut Rng, n: usize) -> LinearRelation {
    let mut rows: Vec<(Vec<i64>, i64)> = Vec::new();
    for j in 0..n {
        if rows.len() + 2 <= 8 && rng.chance(1, 2) {
            let update: Vec<i64> = (0..n).map(|_| rng.int_in(-2, 2)).collect();
            let offset = rng.int_in(-2, 2);
            let mut row = vec![0i64; 2 * n];
            for (i, &c) in update.iter().enumerate() {
                row[i] = -c;
            }
            row[n + j] = 1;
            let negated: Vec<i64> = row.iter().map(|&v| -v).collect();
            rows.push((row, offset));
            rows.push((negated, -offset));
        }
    }
    let guards = rng.int_in(0, 2);
    for _ in 0..guards {
        if rows.len() < 8 {
            rows.push((
                (0..2 * n).map(|_| coefficient(rng)).collect(),
                rng.int_in(-3, 4),
            ));
        }
    }
    if rows.is_empty() {
        rows.push((
            (0..2 * n).map(|_| coefficient(rng)).collect(),
            rng.int_in(-3, 4),
        ));
    }
    relation_from_rows(n, rows)
}

fn random_program(rng: &mut Rng) -> LassoProgram {
    let n = rng.int_in(1, 3) as usize;
    let names: Vec<String> = ["a", "b", "c"][..n].iter().map(|s| s.to_string()).collect();
    let loop_rel = random_loop(rng, n);
    let stem = if rng.chance(1, 5) {
        let m = rng.int_in(1, 2) as usize;
        let rows: Vec<(Vec<i64>, i64)> = (0..m)
            .map(|_| {
                (
                    (0..2 * n).map(|_| coefficient(rng)).collect(),
                    rng.int_in(-3, 4),
                )
            })
            .collect();
        Some(relation_from_rows(n, rows))
    } else {
        None
    };
    LassoProgram::new(names, stem, loop_rel).expect("unique names")
}

fn corpus(seed: u64, count: usize) -> Vec<LassoProgram> {
    let mut rng = Rng::new(seed);
    (0..count).map(|_| random_program(&mut rng)).collect()
}

/// The shared 500-program corpus with its synthesis outcomes, computed once
/// for the three corpus criteria.
static CORPUS_RUNS: LazyLock<Vec<(LassoProgram, synth::SynthReport)>> = LazyLock::new(|| {
    corpus(0x5eed_0001, 500)
        .into_iter()
        .map(|prog| {
            let report = synth::synthesize(&prog, &SynthConfig::default());
            (prog, report)
        })
        .collect()
});

fn random_lp(rng: &mut Rng) -> LpProblem {
    let k = rng.int_in(1, 5) as usize;
    let m = rng.int_in(0, 12) as usize;
    let mut p = LpProblem::new(k);
    for _ in 0..m {
        let coeffs: Vec<Rational> = (0..k)
            .map(|_| Rational::from_int(coefficient(rng)))
            .collect();
        let bound = Rational::new(rng.int_in(-5, 5), rng.int_in(1, 2));
        p.push_row(RationalVector::new(coeffs), bound);
    }
    p
}

#[test]
fn acceptance_01_counting_end_to_end() {
    let started = Instant::now();
    let out = run(&["prove", fixture("counting.lasso").to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0), "prove must exit 0");
    let v = json_of(&out);
    assert_eq!(v["outcome"]["status"], "nonterminating");
    assert_eq!(v["outcome"]["lambda"], "1");

    // The checked-in certificate is validated and unrolled by the tool; the
    // first five states are pinned exactly.
    let check = run(&[
        "check",
        fixture("counting.lasso").to_str().unwrap(),
        fixture("counting.cert.json").to_str().unwrap(),
    ]);
    assert_eq!(check.status.code(), Some(0), "paper certificate must check");
    let sim = run(&[
        "simulate",
        fixture("counting.lasso").to_str().unwrap(),
        fixture("counting.cert.json").to_str().unwrap(),
        "4",
    ]);
    assert_eq!(sim.status.code(), Some(0));
    let lines: Vec<String> = String::from_utf8_lossy(&sim.stdout)
        .lines()
        .map(|l| l.trim().to_string())
        .collect();
    assert_eq!(
        lines,
        vec!["7/1 8/1", "7/1 8/1", "8/1 9/1", "9/1 10/1", "10/1 11/1"],
        "witness prefix must match exactly"
    );
    assert_under_a_second(started.elapsed(), "criterion 1");
    println!("ACCEPTANCE 1 PASS: counting fixture proves nonterminating with lambda 1 and the exact 5-state prefix");
}

#[test]
fn acceptance_02_multiplicative_negative_with_certificates() {
    let started = Instant::now();
    let out = run(&[
        "prove",
        fixture("multiplicative.lasso").to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(2), "prove must exit 2 (unknown)");
    let v = json_of(&out);
    assert_eq!(v["outcome"]["status"], "unknown");
    let attempts = v["outcome"]["perLambda"].as_array().unwrap();
    let lambdas: Vec<&str> = attempts
        .iter()
        .map(|a| a["lambda"].as_str().unwrap())
        .collect();
    assert!(lambdas.contains(&"2") && lambdas.contains(&"3"), "eigen candidates tried");
    assert_eq!(attempts.len(), 10, "eigen candidates plus deduplicated grid");

    // Re-encode each candidate system and verify the reported Farkas
    // certificate exactly.
    let prog = load_fixture_program("multiplicative.lasso");
    for attempt in attempts {
        let lambda: Rational = attempt["lambda"].as_str().unwrap().parse().unwrap();
        let problem = synth::encode_fixed_lambda(&prog, &lambda).unwrap();
        let multipliers: Vec<Rational> = attempt["farkas"]
            .as_array()
            .expect("every attempt carries a certificate")
            .iter()
            .map(|s| s.as_str().unwrap().parse().unwrap())
            .collect();
        let cert = FarkasCertificate::new(RationalVector::new(multipliers));
        assert!(
            cert.verify(&problem),
            "certificate for lambda {lambda} failed exact verification"
        );
    }
    assert_under_a_second(started.elapsed(), "criterion 2");
    println!("ACCEPTANCE 2 PASS: multiplicative fixture is unknown with exact Farkas certificates for all 10 candidates");
}

#[test]
fn acceptance_03_strict_halving_closure_canary() {
    let started = Instant::now();
    let rejected = run(&["prove", fixture("strict_halving.lasso").to_str().unwrap()]);
    assert_eq!(rejected.status.code(), Some(1), "strict rows need --closure");
    let stderr = String::from_utf8_lossy(&rejected.stderr);
    assert!(stderr.contains("--closure"), "guidance must mention --closure");

    let out = run(&[
        "prove",
        fixture("strict_halving.lasso").to_str().unwrap(),
        "--closure",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(2), "closure result is not a proof");
    let v = json_of(&out);
    assert_eq!(v["closureApplied"], true);
    let note = &v["outcome"]["closure"];
    assert_eq!(note["gnta"]["x1"][0], "0", "the closure fixed point is 0");
    assert_eq!(note["strictRecheckValid"], false);
    assert_under_a_second(started.elapsed(), "criterion 3");
    println!("ACCEPTANCE 3 PASS: closure finds the fixed point 0 and the strict re-check rejects it; without --closure the input is rejected with guidance");
}

#[test]
fn acceptance_04_soundness_over_random_corpus() {
    let mut found = 0usize;
    for (i, (prog, report)) in CORPUS_RUNS.iter().enumerate() {
        if let SynthOutcome::Found { gnta, .. } = &report.outcome {
            found += 1;
            let witness = certs::unroll_witness(gnta, 1000);
            let check = certs::verify_execution(prog, &witness, None).unwrap();
            assert!(
                check.valid(),
                "program #{i}: 1000-step unroll failed: {:?}",
                check.failures()
            );
        }
    }
    assert!(found >= 50, "corpus too easy to be meaningful: only {found} found");
    println!("ACCEPTANCE 4 PASS: {found}/500 programs produced certificates; every 1000-step unroll verified exactly");
}

#[test]
fn acceptance_05_fixed_point_implies_found() {
    let mut fixed_point_cases = 0usize;
    for (i, (prog, report)) in CORPUS_RUNS.iter().enumerate() {
        if prog.stem().is_some() {
            continue; // the trivial-certificate claim is for loop programs
        }
        if let FixedPointOutcome::Found(_) = synth::find_fixed_point(prog.loop_rel()).unwrap() {
            fixed_point_cases += 1;
            assert!(
                matches!(report.outcome, SynthOutcome::Found { .. }),
                "program #{i} has a loop fixed point but synthesis missed it"
            );
        }
    }
    assert!(
        fixed_point_cases >= 50,
        "corpus exercised too few fixed-point cases: {fixed_point_cases}"
    );
    println!("ACCEPTANCE 5 PASS: all {fixed_point_cases} fixed-point-feasible loop programs were proven");
}

#[test]
fn acceptance_06_lp_oracle_equivalence() {
    let mut rng = Rng::new(0x5eed_0002);
    let mut infeasible = 0usize;
    for i in 0..1000 {
        let p = random_lp(&mut rng);
        let fm = lp::fourier_motzkin_feasible_with_cap(&p, 1_000_000)
            .unwrap_or_else(|e| panic!("oracle blew the cap on instance #{i}: {e}"));
        match lp::solve_feasibility(&p) {
            FeasOutcome::Feasible(point) => {
                assert!(fm, "instance #{i}: simplex feasible, oracle disagrees");
                assert!(p.is_satisfied_by(&point));
            }
            FeasOutcome::Infeasible(cert) => {
                assert!(!fm, "instance #{i}: simplex infeasible, oracle disagrees");
                assert!(cert.verify(&p), "instance #{i}: invalid Farkas certificate");
                infeasible += 1;
            }
        }
    }
    assert!(infeasible >= 100, "too few infeasible instances: {infeasible}");
    println!("ACCEPTANCE 6 PASS: 1000 random LPs agree with the elimination oracle ({infeasible} infeasible, all certificates exact)");
}

#[test]
fn acceptance_07_recurrence_sets_over_corpus_and_halving_regression() {
    let mut checked = 0usize;
    for (i, (prog, report)) in CORPUS_RUNS.iter().enumerate() {
        if let SynthOutcome::Found { gnta, .. } = &report.outcome {
            let set = certs::build_recurrence_set(gnta);
            let rec = certs::verify_recurrence_set(prog, &set, Some(gnta), 8).unwrap();
            assert!(rec.valid(), "program #{i}: recurrence refuted: {rec:?}");
            checked += 1;
        }
    }
    assert!(checked >= 50);

    // Scalar halving fixture: the corrected contraction cap gives S = [0, 4].
    let text = "vars: x\nloop:\n x <= 5\n x' = 1/2 x\n";
    let prog = parse(&SourceProgram::new(text, "<halving>")).unwrap().program;
    let gnta = gnta_core::witness::Gnta::new(
        RationalVector::from_ints(&[4]),
        RationalVector::from_ints(&[4]),
        RationalVector::from_ints(&[-2]),
        Rational::new(1, 2),
    );
    assert!(certs::check_gnta(&prog, &gnta).unwrap().valid());
    let set = certs::build_recurrence_set(&gnta);
    for member in [0i64, 1, 2, 3, 4] {
        assert!(set.contains(&RationalVector::from_ints(&[member])));
    }
    assert!(!set.contains(&RationalVector::from_ints(&[5])));
    assert!(!set.contains(&RationalVector::from_ints(&[-1])));
    let rec = certs::verify_recurrence_set(&prog, &set, Some(&gnta), 8).unwrap();
    assert!(rec.valid(), "corrected bound must verify: {rec:?}");

    // Regression: the verbatim cap collapses S to the singleton {4}, which
    // is not closed under the halving loop.
    let y = &gnta.y;
    let x1 = &gnta.x1;
    let inv_gap = (Rational::one() - &gnta.lambda).recip();
    let verbatim_cap = y.dot(&x1.add(&y.scale(&inv_gap)));
    let verbatim = RecurrenceSet {
        inequalities: vec![
            SetInequality {
                normal: y.clone(),
                bound: y.dot(x1),
            },
            SetInequality {
                normal: y.scale(&-Rational::one()),
                bound: -(y.dot(x1) + &verbatim_cap),
            },
        ],
        equalities: vec![],
    };
    assert!(verbatim.contains(&RationalVector::from_ints(&[4])));
    assert!(!verbatim.contains(&RationalVector::from_ints(&[2])));
    let rec = certs::verify_recurrence_set(&prog, &verbatim, None, 8).unwrap();
    assert!(!rec.valid(), "verbatim cap must be refuted by sampling");

    println!("ACCEPTANCE 7 PASS: {checked} corpus recurrence sets verified; halving fixture gives [0,4] corrected and a refuted singleton verbatim");
}

#[test]
fn acceptance_08_smt_export_goldens_and_model_import() {
    // Byte-identical exports for the three fixtures.
    for (program, golden, closure) in [
        ("counting.lasso", "counting.smt2", false),
        ("multiplicative.lasso", "multiplicative.smt2", false),
        ("strict_halving.lasso", "strict_halving_closure.smt2", true),
    ] {
        let mut prog = load_fixture_program(program);
        if closure {
            prog = prog.closure().0;
        }
        let script = smtlib::export_qfnra(&prog).unwrap();
        let expected = std::fs::read_to_string(fixture(golden)).unwrap();
        assert_eq!(script.text, expected, "golden mismatch for {golden}");
    }

    // Recorded sat models import into certificates that pass the check.
    let counting = load_fixture_program("counting.lasso");
    let model = std::fs::read_to_string(fixture("counting.model")).unwrap();
    let gnta = smtlib::import_model(&model, &counting).unwrap();
    assert_eq!(gnta.x1, RationalVector::from_ints(&[7, 8]));
    assert_eq!(gnta.lambda, Rational::one());
    assert!(certs::check_gnta(&counting, &gnta).unwrap().valid());

    let halving_closed = load_fixture_program("strict_halving.lasso").closure().0;
    let model = std::fs::read_to_string(fixture("strict_halving_closure.model")).unwrap();
    let gnta = smtlib::import_model(&model, &halving_closed).unwrap();
    assert_eq!(gnta.lambda, Rational::new(1, 2));
    assert!(certs::check_gnta(&halving_closed, &gnta).unwrap().valid());

    // A recorded unsat answer is surfaced as such, never as a certificate.
    let unsat = std::fs::read_to_string(fixture("multiplicative.model")).unwrap();
    let err = smtlib::import_model(&unsat, &load_fixture_program("multiplicative.lasso"));
    assert!(matches!(err, Err(smtlib::SmtError::NotSat(_))));

    println!("ACCEPTANCE 8 PASS: three byte-identical QF_NRA goldens; recorded models import to valid certificates");
}

#[test]
fn acceptance_09_integer_mode() {
    let started = Instant::now();
    let out = run(&[
        "prove",
        fixture("counting.lasso").to_str().unwrap(),
        "--integer",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["mode"], "integer");
    let gnta = &v["outcome"]["gnta"];
    for field in ["x0", "x1", "y"] {
        for entry in gnta[field].as_array().unwrap() {
            let r: Rational = entry.as_str().unwrap().parse().unwrap();
            assert!(r.is_integer(), "{field} entry {r} is fractional");
        }
    }
    let lambda: Rational = gnta["lambda"].as_str().unwrap().parse().unwrap();
    assert!(lambda.is_integer());

    // Forced-fractional system: 2x = 1 has no integer solution.
    let mut forced = LpProblem::new(1);
    forced.push_row(RationalVector::from_ints(&[2]), Rational::one());
    forced.push_row(RationalVector::from_ints(&[-2]), -Rational::one());
    assert_eq!(lp::solve_integer_feasibility(&forced, 64), IntOutcome::Infeasible);

    // And end to end: the forced-fraction program is unknown under --integer.
    let e2e = run(&[
        "prove",
        fixture("forced_fraction.lasso").to_str().unwrap(),
        "--integer",
    ]);
    assert_eq!(e2e.status.code(), Some(2));

    assert_under_a_second(started.elapsed(), "criterion 9");
    println!("ACCEPTANCE 9 PASS: integer mode yields an all-integer certificate; the forced-fractional system is integer-infeasible");
}
