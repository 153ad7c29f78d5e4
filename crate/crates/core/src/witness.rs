//! Certificate data: geometric nontermination arguments, unrolled witness
//! prefixes, polyhedral recurrence sets, and check reports.

use crate::linalg::RationalVector;
use crate::rational::Rational;

/// A geometric nontermination argument `(x0, x1, y, λ)`: a finite
/// representation of the infinite execution `x0, x1, x1+y, x1+(1+λ)y, …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gnta {
    pub x0: RationalVector,
    pub x1: RationalVector,
    pub y: RationalVector,
    pub lambda: Rational,
}

impl Gnta {
    pub fn new(x0: RationalVector, x1: RationalVector, y: RationalVector, lambda: Rational) -> Self {
        Gnta { x0, x1, y, lambda }
    }

    pub fn n(&self) -> usize {
        self.x1.dim()
    }

    pub fn is_integral(&self) -> bool {
        self.x0.is_integral()
            && self.x1.is_integral()
            && self.y.is_integral()
            && self.lambda.is_integer()
    }
}

/// A finite prefix of states of an (alleged) infinite execution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessPrefix {
    states: Vec<RationalVector>,
}

impl WitnessPrefix {
    pub fn from_states(states: Vec<RationalVector>) -> Self {
        assert!(states.len() >= 2, "witness prefix needs at least two states");
        WitnessPrefix { states }
    }

    pub fn states(&self) -> &[RationalVector] {
        &self.states
    }
}

/// Half-space `normal·x ≥ bound` of a recurrence set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetInequality {
    pub normal: RationalVector,
    pub bound: Rational,
}

/// Hyperplane `normal·x = value` of a recurrence set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetEquality {
    pub normal: RationalVector,
    pub value: Rational,
}

/// A polyhedral recurrence set: some member is reachable through the stem and
/// every member has a loop successor inside the set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceSet {
    pub inequalities: Vec<SetInequality>,
    pub equalities: Vec<SetEquality>,
}

impl RecurrenceSet {
    /// Exact membership test.
    pub fn contains(&self, x: &RationalVector) -> bool {
        self.inequalities
            .iter()
            .all(|ineq| ineq.normal.dot(x) >= ineq.bound)
            && self.equalities.iter().all(|eq| eq.normal.dot(x) == eq.value)
    }
}

/// Which certificate condition a failure belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    /// λ > 0
    Domain,
    /// (x0, x1) in the stem relation
    Init,
    /// (x1, x1 + y) in the loop relation
    Point,
    /// (y, λy) in the homogeneous loop relation
    Ray,
    /// a stem step of an unrolled execution
    StemStep,
    /// a loop step of an unrolled execution
    LoopStep,
}

impl std::fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConstraintKind::Domain => "domain",
            ConstraintKind::Init => "init",
            ConstraintKind::Point => "point",
            ConstraintKind::Ray => "ray",
            ConstraintKind::StemStep => "stem-step",
            ConstraintKind::LoopStep => "loop-step",
        };
        f.write_str(s)
    }
}

/// One violated constraint with the exact values on both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckFailure {
    pub kind: ConstraintKind,
    pub row: usize,
    /// State index the failure occurred at, for execution checks.
    pub step: Option<usize>,
    pub lhs: Rational,
    pub rhs: Rational,
    pub strict: bool,
}

impl std::fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let op = if self.strict { "<" } else { "<=" };
        match self.step {
            Some(step) => write!(
                f,
                "{} at step {} row {}: {} {} {} does not hold",
                self.kind, step, self.row, self.lhs, op, self.rhs
            ),
            None => write!(
                f,
                "{} row {}: {} {} {} does not hold",
                self.kind, self.row, self.lhs, op, self.rhs
            ),
        }
    }
}

/// The outcome of an exact certificate check; valid iff no failures.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    failures: Vec<CheckFailure>,
}

impl CheckReport {
    pub fn valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failures(&self) -> &[CheckFailure] {
        &self.failures
    }

    pub(crate) fn push(&mut self, failure: CheckFailure) {
        self.failures.push(failure);
    }
}

/// Why a sampled point failed the recurrence conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleFailureReason {
    /// The sample is not a member of the set (construction defect).
    NotInSet,
    /// No loop successor of the sample stays inside the set.
    NoSuccessorInSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleFailure {
    pub index: usize,
    pub point: RationalVector,
    pub reason: SampleFailureReason,
}

/// Result of sampling-based recurrence-set verification. Sampling makes this
/// a falsifier, not a proof: `valid` means no sampled point was refuted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceCheckReport {
    pub reachable: bool,
    pub samples_checked: usize,
    pub failures: Vec<SampleFailure>,
}

impl RecurrenceCheckReport {
    pub fn valid(&self) -> bool {
        self.reachable && self.failures.is_empty()
    }
}
