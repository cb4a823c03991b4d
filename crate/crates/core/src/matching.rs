//! Sampling-based hypergraph matching.

use rand::Rng;
use serde::Serialize;

use crate::cover::CostCounters;
use crate::instance::Hypergraph;
use crate::schedule::{validate_eps, AliasTable, Schedule, ScheduleError};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Matching {
    pub edge_ids: Vec<usize>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.edge_ids.len()
    }
}

/// Schedule and bucket sampler for one hypergraph, reusable across runs.
pub struct MatchingSampler<'a> {
    hg: &'a Hypergraph,
    plan: Option<(Schedule, AliasTable)>,
}

impl<'a> MatchingSampler<'a> {
    pub fn new(hg: &'a Hypergraph, eps: f64) -> Result<Self, ScheduleError> {
        validate_eps(eps)?;
        let delta = hg.max_degree();
        let plan = if delta == 0 {
            None
        } else {
            let s = Schedule::outer(delta, eps)?;
            let t = s.bucket_sampler();
            Some((s, t))
        };
        Ok(MatchingSampler { hg, plan })
    }

    /// Every edge draws the step it is first sampled at. In step `i` the
    /// edges whose vertices are all still present form the sample `D`; the
    /// members of `D` that meet no other member of `D` are kept, and every
    /// vertex of `D` is removed.
    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> (Matching, CostCounters) {
        let mut counters = CostCounters::default();
        let Some((schedule, table)) = &self.plan else {
            return (Matching::default(), counters);
        };
        let hg = self.hg;
        let k = schedule.k();
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); k + 1];
        for e in 0..hg.num_edges() {
            buckets[table.sample(rng)].push(e);
        }

        let mut removed = vec![false; hg.num_vertices()];
        let mut uses = vec![0u32; hg.num_vertices()];
        let mut sample = Vec::new();
        let mut kept = Vec::new();
        for i in (0..=k).rev() {
            counters.steps_executed += 1;
            sample.clear();
            for &e in &buckets[i] {
                counters.set_touches += 1;
                counters.edge_touches += hg.edge(e).len() as u64;
                if hg.edge(e).iter().all(|&v| !removed[v]) {
                    sample.push(e);
                }
            }
            for &e in &sample {
                for &v in hg.edge(e) {
                    uses[v] += 1;
                }
            }
            for &e in &sample {
                if hg.edge(e).iter().all(|&v| uses[v] == 1) {
                    kept.push(e);
                }
            }
            for &e in &sample {
                for &v in hg.edge(e) {
                    uses[v] = 0;
                    removed[v] = true;
                }
            }
        }
        (Matching { edge_ids: kept }, counters)
    }
}

/// One run of the sampling matcher.
pub fn hypergraph_matching<R: Rng + ?Sized>(
    hg: &Hypergraph,
    eps: f64,
    rng: &mut R,
) -> Result<(Matching, CostCounters), ScheduleError> {
    Ok(MatchingSampler::new(hg, eps)?.run(rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchingCheck {
    Valid,
    /// A vertex shared by two chosen edges.
    Conflict(usize),
    /// An edge id out of range or listed twice.
    BadEdge(usize),
}

impl MatchingCheck {
    pub fn is_valid(self) -> bool {
        self == MatchingCheck::Valid
    }
}

pub fn verify_matching(hg: &Hypergraph, matching: &Matching) -> MatchingCheck {
    let mut used = vec![false; hg.num_vertices()];
    let mut seen = vec![false; hg.num_edges()];
    for &e in &matching.edge_ids {
        if e >= seen.len() || seen[e] {
            return MatchingCheck::BadEdge(e);
        }
        seen[e] = true;
        for &v in hg.edge(e) {
            if used[v] {
                return MatchingCheck::Conflict(v);
            }
            used[v] = true;
        }
    }
    MatchingCheck::Valid
}
