use serde::Serialize;

use crate::schedule::{compute_b, schedule_length_outer, Schedule, ScheduleError};

/// Constants hidden in the case analysis. All default to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlannerConstants {
    /// `c` in `tau = c ln n / p_i`.
    pub tau_scale: f64,
    /// `kappa` in the first-case threshold `(ln n)^(kappa eps^-2 ln ln n)`.
    pub case1_exponent: f64,
}

impl Default for PlannerConstants {
    fn default() -> Self {
        PlannerConstants { tau_scale: 1.0, case1_exponent: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhaseCase {
    /// Small degree bound: one step per phase.
    Small = 1,
    /// Frequency dominated by the degree growth: `ceil(sqrt(ln tau) / eps)` steps.
    Sqrt = 2,
    /// Large frequency: `ceil(ln tau / ln f)` steps.
    Frequency = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Phase {
    /// First (largest) step of the phase.
    pub start: usize,
    pub len: usize,
    pub case: PhaseCase,
    pub tau: f64,
}

impl Phase {
    /// Last (smallest) step of the phase.
    pub fn end(&self) -> usize {
        self.start + 1 - self.len
    }

    /// `ceil(log2 r) + 2`.
    pub fn rounds(&self) -> usize {
        self.len.next_power_of_two().trailing_zeros() as usize + 2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhasePlan {
    pub k: usize,
    pub phases: Vec<Phase>,
    pub predicted_mpc_rounds: usize,
}

/// Splits steps `k..=0` of the outer schedule into phases.
pub fn plan_phases(
    delta: usize,
    freq: usize,
    eps: f64,
    n: usize,
    constants: &PlannerConstants,
) -> Result<PhasePlan, ScheduleError> {
    plan_with_frequency(delta, freq as f64, eps, n, constants)
}

/// Planner for the size-threshold inner loop in the sub-linear regime, where
/// the frequency is replaced by `ln^2 n / eps^3`.
pub fn plan_phases_hdelta(
    delta: usize,
    eps: f64,
    n: usize,
    constants: &PlannerConstants,
) -> Result<PhasePlan, ScheduleError> {
    let ln_n = (n.max(2) as f64).ln();
    plan_with_frequency(delta, ln_n * ln_n / eps.powi(3), eps, n, constants)
}

fn plan_with_frequency(
    delta: usize,
    freq: f64,
    eps: f64,
    n: usize,
    constants: &PlannerConstants,
) -> Result<PhasePlan, ScheduleError> {
    let k = schedule_length_outer(delta, eps)?;
    let b = compute_b(eps)? as f64;
    let schedule = Schedule::new(eps, k)?;
    let ln_n = (n.max(2) as f64).ln();
    let lnln_n = ln_n.ln();
    let ln_case1 = constants.case1_exponent * lnln_n * lnln_n / (eps * eps);
    let cap = (ln_n.floor() as usize).max(1);

    let mut phases = Vec::new();
    let mut remaining = k + 1;
    let mut i = k;
    loop {
        let tau = constants.tau_scale * ln_n / schedule.p(i);
        let ln_tau = tau.ln().max(0.0);
        let (case, r) = if ln_tau <= ln_case1 {
            (PhaseCase::Small, 1)
        } else {
            let r2 = (ln_tau.sqrt() / eps).ceil().max(1.0);
            if freq <= (1.0 + eps).powf(r2 / b) * ln_n * ln_n {
                (PhaseCase::Sqrt, r2 as usize)
            } else {
                let r3 = if freq > 1.0 { (ln_tau / freq.ln()).ceil() } else { 1.0 };
                (PhaseCase::Frequency, r3.max(1.0) as usize)
            }
        };
        let len = r.clamp(1, cap.min(remaining));
        phases.push(Phase { start: i, len, case, tau });
        remaining -= len;
        if remaining == 0 {
            break;
        }
        i -= len;
    }
    let predicted_mpc_rounds = phases.iter().map(Phase::rounds).sum();
    Ok(PhasePlan { k, phases, predicted_mpc_rounds })
}
