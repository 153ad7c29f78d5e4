//! End-to-end pipeline checks on the worked fixtures: parse, synthesize,
//! certify, unroll, verify, and build recurrence sets.

use gnta_core::certs;
use gnta_core::linalg::RationalVector;
use gnta_core::parser::{parse, SourceProgram};
use gnta_core::program::LassoProgram;
use gnta_core::rational::Rational;
use gnta_core::synth::{self, SynthConfig, SynthOutcome};

const COUNTING: &str = "vars: a b\nloop:\n a >= 7\n a' = b\n b' = b + 1\n";
const DOUBLING_TRIPLING: &str = "vars: a b\nloop:\n a >= 1\n b >= 1\n a' = 2 a\n b' = 3 b\n";
const STRICT_HALVING: &str = "vars: x\nloop:\n x > 0\n x' = 1/2 x\n";
const BOUNDED_HALVING: &str = "vars: x\nloop:\n x <= 5\n x' = 1/2 x\n";

fn program(text: &str) -> LassoProgram {
    parse(&SourceProgram::new(text, "<fixture>")).unwrap().program
}

#[test]
fn counting_program_full_pipeline() {
    let prog = program(COUNTING);
    let report = synth::synthesize(&prog, &SynthConfig::default());
    let (gnta, lambda) = match report.outcome {
        SynthOutcome::Found { gnta, lambda } => (gnta, lambda),
        other => panic!("expected found, got {other:?}"),
    };
    assert_eq!(lambda, Rational::one());
    assert!(certs::check_gnta(&prog, &gnta).unwrap().valid());

    for steps in [2, 10, 1000] {
        let witness = certs::unroll_witness(&gnta, steps);
        assert_eq!(witness.states().len(), steps + 1);
        assert!(
            certs::verify_execution(&prog, &witness, None).unwrap().valid(),
            "unroll of {steps} steps failed"
        );
    }
    let set = certs::build_recurrence_set(&gnta);
    let rec = certs::verify_recurrence_set(&prog, &set, Some(&gnta), 8).unwrap();
    assert!(rec.valid(), "recurrence check failed: {rec:?}");
}

#[test]
fn doubling_tripling_is_unknown_with_certificates() {
    let prog = program(DOUBLING_TRIPLING);
    let report = synth::synthesize(&prog, &SynthConfig::default());
    match report.outcome {
        SynthOutcome::NotFound { attempts } => {
            assert!(!attempts.is_empty());
            let lambdas: Vec<String> = attempts.iter().map(|a| a.lambda.to_string()).collect();
            assert!(lambdas.contains(&"2".to_string()));
            assert!(lambdas.contains(&"3".to_string()));
        }
        other => panic!("expected not-found, got {other:?}"),
    }
    assert!(!report.fixed_point_used);
}

#[test]
fn strict_halving_closure_canary() {
    let prog = program(STRICT_HALVING);

    // Without closure mode the strict loop is rejected outright.
    let rejected = synth::synthesize(&prog, &SynthConfig::default());
    assert_eq!(rejected.outcome, SynthOutcome::StrictRejected);

    // With closure mode the closed loop has the fixed point 0...
    let cfg = SynthConfig {
        closure_mode: true,
        ..SynthConfig::default()
    };
    let report = synth::synthesize(&prog, &cfg);
    assert!(report.closure_applied);
    let gnta = match report.outcome {
        SynthOutcome::Found { gnta, .. } => gnta,
        other => panic!("expected found on the closure, got {other:?}"),
    };
    assert_eq!(gnta.x1, RationalVector::from_ints(&[0]));

    // ...but the witness is not an execution of the strict original.
    let witness = certs::unroll_witness(&gnta, 10);
    let strict_check =
        certs::verify_execution(&prog, &witness, Some(prog.loop_rel())).unwrap();
    assert!(!strict_check.valid(), "closure witness must fail the strict re-check");
}

#[test]
fn bounded_halving_admits_both_witness_shapes() {
    let prog = program(BOUNDED_HALVING);

    // Default pipeline takes the fixed-point shortcut.
    let with_shortcut = synth::synthesize(&prog, &SynthConfig::default());
    assert!(with_shortcut.fixed_point_used);
    match with_shortcut.outcome {
        SynthOutcome::Found { gnta, lambda } => {
            assert_eq!(lambda, Rational::one());
            assert!(gnta.y.is_zero());
        }
        other => panic!("expected found, got {other:?}"),
    }

    // With the shortcut disabled and λ pinned to 1/2, a contracting witness
    // appears and its recurrence set verifies.
    let cfg = SynthConfig {
        use_fixed_point_shortcut: false,
        use_eigen_candidates: false,
        lambda_grid: vec![Rational::new(1, 2)],
        ..SynthConfig::default()
    };
    let report = synth::synthesize(&prog, &cfg);
    let gnta = match report.outcome {
        SynthOutcome::Found { gnta, lambda } => {
            assert_eq!(lambda, Rational::new(1, 2));
            gnta
        }
        other => panic!("expected found, got {other:?}"),
    };
    let witness = certs::unroll_witness(&gnta, 200);
    assert!(certs::verify_execution(&prog, &witness, None).unwrap().valid());
    let set = certs::build_recurrence_set(&gnta);
    let rec = certs::verify_recurrence_set(&prog, &set, Some(&gnta), 8).unwrap();
    assert!(rec.valid(), "recurrence check failed: {rec:?}");
}

#[test]
fn integer_mode_keeps_counting_witness_integral() {
    let prog = program(COUNTING);
    let cfg = SynthConfig {
        integer_mode: true,
        ..SynthConfig::default()
    };
    let report = synth::synthesize(&prog, &cfg);
    match report.outcome {
        SynthOutcome::Found { gnta, .. } => {
            assert!(gnta.is_integral());
            assert!(certs::check_gnta(&prog, &gnta).unwrap().valid());
        }
        other => panic!("expected found, got {other:?}"),
    }
}
