//! `gnta` — nontermination prover for conjunctive linear lasso programs.
//!
//! Subcommands: `prove` searches for a geometric nontermination certificate
//! and reports it with a witness prefix and a verified recurrence set;
//! `check` re-validates an externally supplied certificate; `simulate`
//! unrolls a certificate into explicit states and verifies the execution.
//!
//! Exit codes: 0 proven/valid, 1 input error, 2 unknown, 3 invalid
//! certificate.

mod report;

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use gnta_core::certs;
use gnta_core::parser::{self, ParseDiagnostic, Severity, SourceProgram};
use gnta_core::program::LassoProgram;
use gnta_core::rational::Rational;
use gnta_core::smtlib;
use gnta_core::synth::{self, SynthConfig, SynthOutcome};
use gnta_core::witness::Gnta;

use report::{
    witness_states, JsonClosureNote, JsonDiagnostic, JsonGnta, JsonLambdaAttempt, JsonOutcome,
    JsonRecurrenceCheck, JsonRecurrenceSet, JsonReport, JsonTiming,
};

const EXIT_PROVEN: u8 = 0;
const EXIT_INPUT_ERROR: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_INVALID_CERT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "gnta",
    version,
    about = "Nontermination prover for conjunctive linear lasso programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a geometric nontermination certificate
    Prove(ProveArgs),
    /// Check a certificate file against a program (exit 0 iff valid)
    Check {
        /// Program path (`-` for standard input)
        program: PathBuf,
        /// Certificate JSON path
        certificate: PathBuf,
    },
    /// Unroll a certificate into explicit states and verify the execution
    Simulate {
        /// Program path (`-` for standard input)
        program: PathBuf,
        /// Certificate JSON path
        certificate: PathBuf,
        /// Number of loop steps to unroll (prints steps+1 states)
        #[arg(default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        steps: u32,
    },
}

#[derive(Args)]
struct ProveArgs {
    /// Program path (`-` for standard input)
    program: PathBuf,
    /// Comma-separated positive rationals replacing the default λ grid
    #[arg(long, value_name = "L1,L2,...")]
    lambda: Option<String>,
    /// Skip the eigenvalue-derived λ candidates
    #[arg(long)]
    no_eigen: bool,
    /// Restrict the certificate to integer values (branch-and-bound)
    #[arg(long)]
    integer: bool,
    /// Search on the topological closure of strict relations; any
    /// certificate is re-checked against the strict original
    #[arg(long)]
    closure: bool,
    /// Number of loop steps in the reported witness prefix
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    witness_steps: u32,
    /// Emit the JSON report on stdout
    #[arg(long)]
    json: bool,
    /// Also write the symbolic-λ SMT-LIB2 (QF_NRA) script to this path
    #[arg(long, value_name = "PATH")]
    smt_out: Option<PathBuf>,
    /// Build and verify a recurrence set (default on)
    #[arg(long, overrides_with = "no_recset")]
    recset: bool,
    /// Skip recurrence-set construction
    #[arg(long, overrides_with = "recset")]
    no_recset: bool,
    /// Sample budget for recurrence-set verification
    #[arg(long, default_value_t = 8)]
    samples: u32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Prove(args) => cmd_prove(&args),
        Command::Check {
            program,
            certificate,
        } => cmd_check(&program, &certificate),
        Command::Simulate {
            program,
            certificate,
            steps,
        } => cmd_simulate(&program, &certificate, steps as usize),
    };
    ExitCode::from(code)
}

fn read_source(path: &Path) -> Result<SourceProgram, String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| format!("reading standard input: {e}"))?;
        Ok(SourceProgram::new(text, "<stdin>"))
    } else {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("reading {}: {e}", path.display()))?;
        Ok(SourceProgram::new(text, path.display().to_string()))
    }
}

fn print_diagnostics(origin: &str, diags: &[ParseDiagnostic]) {
    for d in diags {
        eprintln!("{origin}:{d}");
    }
}

fn parse_lambda_list(raw: &str) -> Result<Vec<Rational>, String> {
    let mut out = Vec::new();
    for item in raw.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let r: Rational = item
            .parse()
            .map_err(|e| format!("bad lambda `{item}`: {e}"))?;
        if !r.is_positive() {
            return Err(format!("lambda `{item}` must be positive"));
        }
        out.push(r);
    }
    if out.is_empty() {
        return Err("--lambda needs at least one value".to_string());
    }
    Ok(out)
}

fn digest_hex(text: &str) -> String {
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

struct Phases {
    parse_ms: u64,
    synthesis_ms: u64,
    certification_ms: u64,
    started: Instant,
}

impl Phases {
    fn timing(&self) -> JsonTiming {
        JsonTiming {
            parse_ms: self.parse_ms,
            synthesis_ms: self.synthesis_ms,
            certification_ms: self.certification_ms,
            total_ms: self.started.elapsed().as_millis() as u64,
        }
    }
}

fn cmd_prove(args: &ProveArgs) -> u8 {
    let started = Instant::now();
    let src = match read_source(&args.program) {
        Ok(src) => src,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_INPUT_ERROR;
        }
    };
    let digest = digest_hex(&src.text);
    let mode = if args.integer { "integer" } else { "real" };
    let mut phases = Phases {
        parse_ms: 0,
        synthesis_ms: 0,
        certification_ms: 0,
        started,
    };

    let reject = |diags: Vec<JsonDiagnostic>, phases: &Phases| -> (JsonReport, u8) {
        (
            JsonReport {
                program_digest: digest.clone(),
                mode: mode.to_string(),
                closure_applied: false,
                outcome: JsonOutcome::Rejected { diagnostics: diags },
                timing_ms: Some(phases.timing()),
            },
            EXIT_INPUT_ERROR,
        )
    };

    let parse_started = Instant::now();
    let parsed = match parser::parse(&src) {
        Ok(parsed) => parsed,
        Err(diags) => {
            print_diagnostics(&src.origin, &diags);
            phases.parse_ms = parse_started.elapsed().as_millis() as u64;
            let (report, code) = reject(
                diags.iter().map(JsonDiagnostic::from_diag).collect(),
                &phases,
            );
            emit_report(&report, args.json, &src.origin);
            return code;
        }
    };
    phases.parse_ms = parse_started.elapsed().as_millis() as u64;
    print_diagnostics(&src.origin, &parsed.warnings);
    let prog = parsed.program;

    if prog.has_strict_rows() && !args.closure {
        let position = parsed
            .warnings
            .iter()
            .find(|w| w.severity == Severity::Warning)
            .map(|w| (w.line, w.column))
            .unwrap_or((0, 0));
        let guidance = JsonDiagnostic {
            line: position.0,
            column: position.1,
            severity: "error".to_string(),
            message: "the relation contains strict inequalities; pass --closure to search the \
                      topological closure (certificates are then re-checked against the strict \
                      original)"
                .to_string(),
        };
        eprintln!("{}: error: {}", src.origin, guidance.message);
        let (report, code) = reject(vec![guidance], &phases);
        emit_report(&report, args.json, &src.origin);
        return code;
    }

    let lambda_grid = match &args.lambda {
        None => synth::default_lambda_grid(),
        Some(raw) => match parse_lambda_list(raw) {
            Ok(grid) => grid,
            Err(err) => {
                eprintln!("error: {err}");
                let (report, code) = reject(
                    vec![JsonDiagnostic {
                        line: 0,
                        column: 0,
                        severity: "error".to_string(),
                        message: err,
                    }],
                    &phases,
                );
                emit_report(&report, args.json, &src.origin);
                return code;
            }
        },
    };

    if let Some(smt_path) = &args.smt_out {
        let export_prog = if prog.has_strict_rows() {
            prog.closure().0
        } else {
            prog.clone()
        };
        match smtlib::export_qfnra(&export_prog) {
            Ok(script) => {
                if let Err(e) = fs::write(smt_path, script.text) {
                    eprintln!("error: writing {}: {e}", smt_path.display());
                    return EXIT_INPUT_ERROR;
                }
            }
            Err(e) => {
                eprintln!("error: SMT export failed: {e}");
                return EXIT_INPUT_ERROR;
            }
        }
    }

    let cfg = SynthConfig {
        lambda_grid,
        use_eigen_candidates: !args.no_eigen,
        use_fixed_point_shortcut: true,
        integer_mode: args.integer,
        closure_mode: args.closure,
        bnb_depth_limit: 64,
    };
    let synth_started = Instant::now();
    let synth_report = synth::synthesize(&prog, &cfg);
    phases.synthesis_ms = synth_started.elapsed().as_millis() as u64;

    let cert_started = Instant::now();
    let closure_applied = synth_report.closure_applied;
    let (outcome, code) = match synth_report.outcome {
        SynthOutcome::StrictRejected => {
            // Unreachable: strict rows were rejected above. Kept as a guard.
            let (report, code) = reject(
                vec![JsonDiagnostic {
                    line: 0,
                    column: 0,
                    severity: "error".to_string(),
                    message: "strict rows rejected by the synthesizer".to_string(),
                }],
                &phases,
            );
            emit_report(&report, args.json, &src.origin);
            return code;
        }
        SynthOutcome::Found { gnta, lambda } => {
            build_found_outcome(
                &prog,
                &gnta,
                &lambda,
                closure_applied,
                synth_report.fixed_point_used,
                args,
            )
        }
        SynthOutcome::NotFound { attempts } => (
            JsonOutcome::Unknown {
                per_lambda: attempts.iter().map(JsonLambdaAttempt::from_attempt).collect(),
                closure: None,
            },
            EXIT_UNKNOWN,
        ),
    };
    phases.certification_ms = cert_started.elapsed().as_millis() as u64;

    let report = JsonReport {
        program_digest: digest,
        mode: mode.to_string(),
        closure_applied,
        outcome,
        timing_ms: Some(phases.timing()),
    };
    emit_report(&report, args.json, &src.origin);
    code
}

/// Turns a synthesized certificate into the report outcome: unrolls the
/// witness, re-verifies the execution (against the strict original in
/// closure mode), and builds+verifies the recurrence set. A closure-mode
/// certificate whose witness fails the strict re-check downgrades to
/// `unknown`: it is not a proof for the original program.
fn build_found_outcome(
    prog: &LassoProgram,
    gnta: &Gnta,
    lambda: &Rational,
    closure_applied: bool,
    fixed_point_used: bool,
    args: &ProveArgs,
) -> (JsonOutcome, u8) {
    let witness = certs::unroll_witness(gnta, args.witness_steps as usize);
    let strict_original = closure_applied.then(|| prog.loop_rel());
    let execution = certs::verify_execution(prog, &witness, strict_original)
        .expect("witness dimensions match the program");

    if closure_applied && !execution.valid() {
        let note = JsonClosureNote {
            gnta: JsonGnta::from_gnta(gnta),
            strict_recheck_valid: false,
            first_failure: execution.failures().first().map(|f| f.to_string()),
        };
        return (
            JsonOutcome::Unknown {
                per_lambda: Vec::new(),
                closure: Some(note),
            },
            EXIT_UNKNOWN,
        );
    }
    assert!(
        execution.valid(),
        "synthesized witness failed execution verification: {:?}",
        execution.failures()
    );

    let recset_enabled = !args.no_recset;
    let (recurrence_set, recurrence_check) = if recset_enabled {
        let set = certs::build_recurrence_set(gnta);
        let check = certs::verify_recurrence_set(prog, &set, Some(gnta), args.samples as usize)
            .expect("set dimensions match the program");
        assert!(
            check.valid(),
            "recurrence set construction was refuted: {check:?}"
        );
        (
            Some(JsonRecurrenceSet::from_set(&set)),
            Some(JsonRecurrenceCheck::from_report(&check)),
        )
    } else {
        (None, None)
    };

    (
        JsonOutcome::Nonterminating {
            lambda: lambda.to_string(),
            fixed_point_used,
            gnta: JsonGnta::from_gnta(gnta),
            witness_prefix: witness_states(&witness),
            recurrence_set,
            recurrence_check,
        },
        EXIT_PROVEN,
    )
}

fn emit_report(report: &JsonReport, json: bool, origin: &str) {
    if json {
        let text = serde_json::to_string_pretty(report).expect("report serializes");
        println!("{text}");
    } else {
        print_text_report(report, origin);
    }
}

fn print_text_report(report: &JsonReport, origin: &str) {
    println!("program: {origin}");
    println!("digest:  sha256:{}", report.program_digest);
    println!("mode:    {}", report.mode);
    if report.closure_applied {
        println!("note:    searched the topological closure of the relation");
    }
    match &report.outcome {
        JsonOutcome::Nonterminating {
            lambda,
            fixed_point_used,
            gnta,
            witness_prefix,
            recurrence_set,
            recurrence_check,
        } => {
            println!("result:  NONTERMINATING");
            println!("  lambda = {lambda}");
            if *fixed_point_used {
                println!("  via fixed point (y = 0, lambda = 1)");
            }
            println!("  x0 = ({})", gnta.x0.join(", "));
            println!("  x1 = ({})", gnta.x1.join(", "));
            println!("  y  = ({})", gnta.y.join(", "));
            let rendered: Vec<String> = witness_prefix
                .iter()
                .map(|s| format!("({})", s.join(", ")))
                .collect();
            println!("  witness prefix: {}", rendered.join(" "));
            if let Some(set) = recurrence_set {
                println!(
                    "  recurrence set: {} inequalities, {} equalities",
                    set.ineqs.len(),
                    set.eqs.len()
                );
            }
            if let Some(check) = recurrence_check {
                println!(
                    "  recurrence check: reachable={}, {} samples closed under the loop",
                    check.reachable, check.samples_checked
                );
            }
        }
        JsonOutcome::Unknown {
            per_lambda,
            closure,
        } => {
            println!("result:  UNKNOWN (no certificate for the tried candidates)");
            for attempt in per_lambda {
                match &attempt.farkas {
                    Some(_) => println!(
                        "  lambda {}: infeasible (Farkas certificate verified)",
                        attempt.lambda
                    ),
                    None => println!("  lambda {}: {}", attempt.lambda, attempt.reason),
                }
            }
            if let Some(note) = closure {
                println!(
                    "  closure search found a certificate (x1 = ({}), lambda = {}) but the \
                     witness fails the strict original{}",
                    note.gnta.x1.join(", "),
                    note.gnta.lambda,
                    note.first_failure
                        .as_deref()
                        .map(|f| format!(": {f}"))
                        .unwrap_or_default()
                );
                println!("  not a proof for the original program");
            }
        }
        JsonOutcome::Rejected { diagnostics } => {
            println!("result:  REJECTED");
            for d in diagnostics {
                println!("  {}:{}: {}: {}", d.line, d.column, d.severity, d.message);
            }
        }
    }
}

fn load_program_or_exit(path: &Path) -> Result<LassoProgram, u8> {
    let src = match read_source(path) {
        Ok(src) => src,
        Err(err) => {
            eprintln!("error: {err}");
            return Err(EXIT_INPUT_ERROR);
        }
    };
    match parser::parse(&src) {
        Ok(parsed) => {
            print_diagnostics(&src.origin, &parsed.warnings);
            Ok(parsed.program)
        }
        Err(diags) => {
            print_diagnostics(&src.origin, &diags);
            Err(EXIT_INPUT_ERROR)
        }
    }
}

fn load_certificate_or_exit(path: &Path) -> Result<Gnta, u8> {
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: reading {}: {e}", path.display());
            return Err(EXIT_INPUT_ERROR);
        }
    };
    let json: JsonGnta = match serde_json::from_str(&text) {
        Ok(json) => json,
        Err(e) => {
            eprintln!("error: {}: malformed certificate JSON: {e}", path.display());
            return Err(EXIT_INPUT_ERROR);
        }
    };
    match json.to_gnta() {
        Ok(gnta) => Ok(gnta),
        Err(e) => {
            eprintln!("error: {}: {e:#}", path.display());
            Err(EXIT_INPUT_ERROR)
        }
    }
}

fn cmd_check(program: &Path, certificate: &Path) -> u8 {
    let prog = match load_program_or_exit(program) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let gnta = match load_certificate_or_exit(certificate) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let report = match certs::check_gnta(&prog, &gnta) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT_ERROR;
        }
    };
    if report.valid() {
        println!("certificate valid");
        EXIT_PROVEN
    } else {
        for failure in report.failures() {
            println!("violated: {failure}");
        }
        EXIT_INVALID_CERT
    }
}

fn cmd_simulate(program: &Path, certificate: &Path, steps: usize) -> u8 {
    let prog = match load_program_or_exit(program) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let gnta = match load_certificate_or_exit(certificate) {
        Ok(g) => g,
        Err(code) => return code,
    };
    if gnta.n() != prog.n() {
        eprintln!(
            "error: certificate has {} variables, program has {}",
            gnta.n(),
            prog.n()
        );
        return EXIT_INPUT_ERROR;
    }
    let witness = certs::unroll_witness(&gnta, steps);
    for state in witness.states() {
        let line: Vec<String> = state.iter().map(|r| r.to_ratio_string()).collect();
        println!("{}", line.join(" "));
    }
    let report = certs::verify_execution(&prog, &witness, None)
        .expect("dimensions checked above");
    if report.valid() {
        EXIT_PROVEN
    } else {
        let first = &report.failures()[0];
        println!(
            "invalid execution: first violation at state index {}: {first}",
            first.step.unwrap_or(0)
        );
        EXIT_INVALID_CERT
    }
}
