use std::collections::VecDeque;

use rand::Rng;
use serde::Serialize;

use super::planner::{plan_phases, PhaseCase, PhasePlan, PlannerConstants};
use crate::cover::{BucketedRun, Cover};
use crate::instance::SetCoverInstance;
use crate::schedule::ScheduleError;

/// Constant of the high-probability degree-drop check.
pub const DEGREE_DROP_CONSTANT: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseReport {
    pub phase_index: usize,
    pub case: PhaseCase,
    pub r: usize,
    pub start_step: usize,
    pub end_step: usize,
    /// `p` at the first step of the phase.
    pub sampled_prob_start: f64,
    /// `p` at the last step of the phase.
    pub sampled_prob_end: f64,
    /// Uncovered elements when the phase starts.
    pub live_elements: usize,
    /// Uncovered elements whose drawn step lies in the phase.
    pub relevant_elements: usize,
    /// Edges of the relevant subgraph, the space proxy.
    pub relevant_edges: usize,
    /// Largest radius-`r` ball in the relevant subgraph.
    pub max_ball: usize,
    /// Largest uncovered count of a remaining set after the phase.
    pub residual_degree_after: usize,
    pub cumulative_rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MpcReport {
    pub n: usize,
    pub plan: PhasePlan,
    pub phases: Vec<PhaseReport>,
    pub simulated_rounds: usize,
    /// Every phase ended with residual degree at most `C ln n / p_end`.
    pub degree_drop_ok: bool,
}

impl MpcReport {
    fn empty(n: usize) -> Self {
        MpcReport {
            n,
            plan: PhasePlan { k: 0, phases: Vec::new(), predicted_mpc_rounds: 0 },
            phases: Vec::new(),
            simulated_rounds: 0,
            degree_drop_ok: true,
        }
    }
}

/// Runs the bucketed `f`-approximation phase by phase and measures what a
/// round-compressed execution would have to collect. Consumes the RNG exactly
/// like [`crate::cover::f_approx_bucketed`], so covers agree for equal seeds.
pub fn simulate_mpc_f_approx<R: Rng + ?Sized>(
    instance: &SetCoverInstance,
    eps: f64,
    rng: &mut R,
    constants: &PlannerConstants,
) -> Result<(Cover, MpcReport), ScheduleError> {
    let n = instance.num_vertices();
    let mut run = BucketedRun::new(instance, eps, rng)?;
    let Some(schedule) = run.schedule().cloned() else {
        return Ok((run.finish().0, MpcReport::empty(n)));
    };
    let plan = plan_phases(instance.delta(), instance.freq(), eps, n.max(2), constants)?;
    let ln_n = (n.max(2) as f64).ln();
    let mut scratch = BallScratch::new(instance);
    let mut phases = Vec::with_capacity(plan.phases.len());
    let mut cumulative = 0;
    let mut degree_drop_ok = true;

    for (idx, phase) in plan.phases.iter().enumerate() {
        let live_elements = (0..instance.num_elements()).filter(|&t| !run.is_covered(t)).count();
        let relevant: Vec<usize> = (phase.end()..=phase.start)
            .flat_map(|i| run.bucket(i).iter().copied())
            .filter(|&t| !run.is_covered(t))
            .collect();
        let (relevant_edges, max_ball) = scratch.measure(&run, &relevant, phase.len);

        for _ in 0..phase.len {
            run.step();
        }

        let residual_degree_after = (0..instance.num_sets())
            .filter(|&s| !run.is_removed(s))
            .map(|s| instance.set(s).iter().filter(|&&t| !run.is_covered(t)).count())
            .max()
            .unwrap_or(0);
        let p_end = schedule.p(phase.end());
        degree_drop_ok &= residual_degree_after as f64 <= DEGREE_DROP_CONSTANT * ln_n / p_end;
        cumulative += phase.rounds();
        phases.push(PhaseReport {
            phase_index: idx,
            case: phase.case,
            r: phase.len,
            start_step: phase.start,
            end_step: phase.end(),
            sampled_prob_start: schedule.p(phase.start),
            sampled_prob_end: p_end,
            live_elements,
            relevant_elements: relevant.len(),
            relevant_edges,
            max_ball,
            residual_degree_after,
            cumulative_rounds: cumulative,
        });
    }
    debug_assert!(run.next_step().is_none());
    let report = MpcReport { n, simulated_rounds: cumulative, plan, phases, degree_drop_ok };
    Ok((run.finish().0, report))
}

/// Breadth-first search over the bipartite relevant subgraph. Vertices are
/// elements `0..T` followed by sets `T..T+S`.
struct BallScratch {
    num_elements: usize,
    relevant: Vec<bool>,
    seen: Vec<u32>,
    epoch: u32,
    queue: VecDeque<(usize, usize)>,
}

impl BallScratch {
    fn new(instance: &SetCoverInstance) -> Self {
        BallScratch {
            num_elements: instance.num_elements(),
            relevant: vec![false; instance.num_elements()],
            seen: vec![0; instance.num_vertices()],
            epoch: 0,
            queue: VecDeque::new(),
        }
    }

    fn measure(&mut self, run: &BucketedRun<'_>, relevant: &[usize], radius: usize) -> (usize, usize) {
        let inst = run.instance();
        for &t in relevant {
            self.relevant[t] = true;
        }
        let mut sets = Vec::new();
        let mut edges = 0;
        for &t in relevant {
            for &s in inst.element(t) {
                if !run.is_removed(s) {
                    edges += 1;
                    sets.push(s);
                }
            }
        }
        sets.sort_unstable();
        sets.dedup();

        let starts = relevant.iter().copied().chain(sets.iter().map(|&s| self.num_elements + s));
        let mut max_ball = 0;
        for v in starts.collect::<Vec<_>>() {
            max_ball = max_ball.max(self.ball(run, v, radius));
        }
        for &t in relevant {
            self.relevant[t] = false;
        }
        (edges, max_ball)
    }

    fn ball(&mut self, run: &BucketedRun<'_>, start: usize, radius: usize) -> usize {
        let inst = run.instance();
        let ne = self.num_elements;
        self.epoch += 1;
        let epoch = self.epoch;
        self.seen[start] = epoch;
        self.queue.clear();
        self.queue.push_back((start, 0));
        let mut size = 0;
        while let Some((v, d)) = self.queue.pop_front() {
            size += 1;
            if d == radius {
                continue;
            }
            if v < ne {
                for &s in inst.element(v) {
                    if !run.is_removed(s) && self.seen[ne + s] != epoch {
                        self.seen[ne + s] = epoch;
                        self.queue.push_back((ne + s, d + 1));
                    }
                }
            } else {
                for &t in inst.set(v - ne) {
                    if self.relevant[t] && self.seen[t] != epoch {
                        self.seen[t] = epoch;
                        self.queue.push_back((t, d + 1));
                    }
                }
            }
        }
        size
    }
}
