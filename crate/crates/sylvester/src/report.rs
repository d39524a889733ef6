//! Step schedules and the report structure shared by all solvers.

/// Step size rule for the subgradient solvers; `k` counts from 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    /// c / k.
    Harmonic { c: f64 },
    /// c / sqrt(k).
    HarmonicSqrt { c: f64 },
    /// Constant c.
    Constant { c: f64 },
}

impl StepSchedule {
    pub fn step(&self, k: usize) -> f64 {
        assert!(k >= 1, "step index counts from 1");
        match self {
            StepSchedule::Harmonic { c } => c / k as f64,
            StepSchedule::HarmonicSqrt { c } => c / (k as f64).sqrt(),
            StepSchedule::Constant { c } => *c,
        }
    }
}

impl Default for StepSchedule {
    /// The classical divergent-sum, square-summable choice 1/k.
    fn default() -> Self {
        StepSchedule::Harmonic { c: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Iteration budget exhausted.
    MaxIters,
    /// Best value moved less than the stall tolerance over a full window.
    ValueStall,
    /// A zero-objective point was found; nothing to improve.
    FoundZero,
    /// Smoothing parameter fell below its floor (smoothed solver).
    SmoothingExhausted,
    /// The iterate entered the active target set (directional solver).
    MembershipBreak,
}

/// Outcome of a solver run.
///
/// `value_trace[k]` is the running best objective value V_k after k
/// iterations (entry 0 is the value at the start point), so the trace is
/// nonincreasing and ends at `best_value`. The smoothed solver also
/// records the smoothed objective per outer iteration in
/// `smoothed_trace`; other solvers leave it empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub iterations: usize,
    pub value_trace: Vec<f64>,
    pub smoothed_trace: Vec<f64>,
    pub stop_reason: StopReason,
    /// Set when the supplied start point was outside the constraint and
    /// had to be projected.
    pub projected_start: bool,
}
