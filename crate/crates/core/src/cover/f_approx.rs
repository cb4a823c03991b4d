use rand::Rng;

use super::{Cover, CostCounters};
use crate::instance::SetCoverInstance;
use crate::schedule::{Schedule, ScheduleError};

/// Online `f`-approximation: every step samples each uncovered element with
/// probability `p_i` and adds every remaining set containing a sampled one.
pub fn f_approx_online<R: Rng + ?Sized>(
    instance: &SetCoverInstance,
    eps: f64,
    rng: &mut R,
) -> Result<(Cover, CostCounters), ScheduleError> {
    crate::schedule::validate_eps(eps)?;
    let mut counters = CostCounters::default();
    if instance.delta() == 0 {
        return Ok((Cover::default(), counters));
    }
    let schedule = Schedule::outer(instance.delta(), eps)?;
    let mut live: Vec<usize> = (0..instance.num_elements()).collect();
    let mut covered = vec![false; instance.num_elements()];
    let mut removed = vec![false; instance.num_sets()];
    let mut chosen = Vec::new();
    let mut sampled = Vec::new();

    for i in (0..=schedule.k()).rev() {
        counters.steps_executed += 1;
        let p = schedule.p(i);
        sampled.clear();
        for &t in &live {
            counters.element_touches += 1;
            if rng.random::<f64>() < p {
                sampled.push(t);
            }
        }
        for &t in &sampled {
            for &s in instance.element(t) {
                counters.edge_touches += 1;
                if removed[s] {
                    continue;
                }
                removed[s] = true;
                chosen.push(s);
                for &u in instance.set(s) {
                    counters.edge_touches += 1;
                    covered[u] = true;
                }
            }
        }
        if !sampled.is_empty() {
            live.retain(|&t| !covered[t]);
        }
        if live.is_empty() {
            break;
        }
    }
    Ok((Cover { chosen_sets: chosen }, counters))
}

/// Bucketed `f`-approximation driven one step at a time. Every element draws
/// the step it is first sampled at from the bucket distribution, then steps
/// `k..=0` consume their buckets in order.
pub struct BucketedRun<'a> {
    instance: &'a SetCoverInstance,
    schedule: Option<Schedule>,
    /// Elements grouped by drawn step: `order[start[i]..start[i + 1]]`.
    order: Vec<usize>,
    start: Vec<usize>,
    covered: Vec<bool>,
    removed: Vec<bool>,
    chosen: Vec<usize>,
    batch: Vec<usize>,
    counters: CostCounters,
    next_step: Option<usize>,
}

impl<'a> BucketedRun<'a> {
    pub fn new<R: Rng + ?Sized>(instance: &'a SetCoverInstance, eps: f64, rng: &mut R) -> Result<Self, ScheduleError> {
        crate::schedule::validate_eps(eps)?;
        let n = instance.num_elements();
        let mut run = BucketedRun {
            instance,
            schedule: None,
            order: Vec::new(),
            start: vec![0],
            covered: vec![false; n],
            removed: vec![false; instance.num_sets()],
            chosen: Vec::new(),
            batch: Vec::new(),
            counters: CostCounters::default(),
            next_step: None,
        };
        if instance.delta() == 0 {
            return Ok(run);
        }
        let schedule = Schedule::outer(instance.delta(), eps)?;
        let table = schedule.bucket_sampler();
        let k = schedule.k();
        let draws: Vec<usize> = (0..n).map(|_| table.sample(rng)).collect();
        let mut start = vec![0usize; k + 2];
        for &x in &draws {
            start[x + 1] += 1;
        }
        for i in 0..=k {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut order = vec![0; n];
        for (t, &x) in draws.iter().enumerate() {
            order[fill[x]] = t;
            fill[x] += 1;
        }
        run.order = order;
        run.start = start;
        run.next_step = Some(k);
        run.schedule = Some(schedule);
        Ok(run)
    }

    pub fn instance(&self) -> &SetCoverInstance {
        self.instance
    }

    /// `None` for an instance without elements.
    pub fn schedule(&self) -> Option<&Schedule> {
        self.schedule.as_ref()
    }

    /// Elements that drew step `i`.
    pub fn bucket(&self, i: usize) -> &[usize] {
        &self.order[self.start[i]..self.start[i + 1]]
    }

    /// The next step to run, or `None` once step 0 is done.
    pub fn next_step(&self) -> Option<usize> {
        self.next_step
    }

    pub fn is_covered(&self, t: usize) -> bool {
        self.covered[t]
    }

    pub fn is_removed(&self, s: usize) -> bool {
        self.removed[s]
    }

    pub fn chosen(&self) -> &[usize] {
        &self.chosen
    }

    pub fn counters(&self) -> &CostCounters {
        &self.counters
    }

    /// Runs the next step. Returns `false` if none is left.
    pub fn step(&mut self) -> bool {
        let Some(i) = self.next_step else {
            return false;
        };
        self.next_step = i.checked_sub(1);
        self.counters.steps_executed += 1;
        let inst = self.instance;

        self.batch.clear();
        for idx in self.start[i]..self.start[i + 1] {
            let t = self.order[idx];
            self.counters.element_touches += 1;
            if !self.covered[t] {
                self.batch.push(t);
            }
        }
        for &t in &self.batch {
            for &s in inst.element(t) {
                self.counters.edge_touches += 1;
                if self.removed[s] {
                    continue;
                }
                self.removed[s] = true;
                self.chosen.push(s);
                for &u in inst.set(s) {
                    self.counters.edge_touches += 1;
                    self.covered[u] = true;
                }
            }
        }
        true
    }

    pub fn run_to_end(&mut self) {
        while self.step() {}
    }

    pub fn finish(mut self) -> (Cover, CostCounters) {
        self.run_to_end();
        (Cover { chosen_sets: self.chosen }, self.counters)
    }
}

/// Bucketed `f`-approximation in one call.
pub fn f_approx_bucketed<R: Rng + ?Sized>(
    instance: &SetCoverInstance,
    eps: f64,
    rng: &mut R,
) -> Result<(Cover, CostCounters), ScheduleError> {
    Ok(BucketedRun::new(instance, eps, rng)?.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::verify_cover;
    use crate::instance::{generate_random_instance, parse_instance};
    use crate::trials::trial_rng;

    #[test]
    fn single_covering_set() {
        let i = parse_instance("p sc 1 3 3\ne 0 0\ne 0 1\ne 0 2\n").unwrap();
        let mut rng = trial_rng(1, 0);
        let (c, _) = f_approx_online(&i, 0.1, &mut rng).unwrap();
        assert_eq!(c.chosen_sets, vec![0]);
        let (c, k) = f_approx_bucketed(&i, 0.1, &mut rng).unwrap();
        assert_eq!(c.chosen_sets, vec![0]);
        assert!(k.element_touches <= (i.num_elements() + i.num_edges()) as u64);
    }

    #[test]
    fn disjoint_singletons_take_every_set() {
        let i = SetCoverInstance::from_sets(4, (0..4).map(|t| vec![t]).collect()).unwrap();
        let mut rng = trial_rng(2, 0);
        let (mut c, _) = f_approx_online(&i, 0.2, &mut rng).unwrap();
        c.chosen_sets.sort_unstable();
        assert_eq!(c.chosen_sets, vec![0, 1, 2, 3]);
        let (c, _) = f_approx_bucketed(&i, 0.2, &mut rng).unwrap();
        assert_eq!(c.size(), 4);
    }

    #[test]
    fn empty_instance() {
        let i = parse_instance("p sc 0 0 0").unwrap();
        let mut rng = trial_rng(0, 0);
        assert_eq!(f_approx_online(&i, 0.1, &mut rng).unwrap().0.size(), 0);
        assert_eq!(f_approx_bucketed(&i, 0.1, &mut rng).unwrap().0.size(), 0);
    }

    #[test]
    fn bad_eps() {
        let i = parse_instance("p sc 1 1 1\ne 0 0").unwrap();
        let mut rng = trial_rng(0, 0);
        assert!(f_approx_online(&i, 0.9, &mut rng).is_err());
        assert!(f_approx_bucketed(&i, 0.0, &mut rng).is_err());
    }

    #[test]
    fn valid_and_within_work_bounds() {
        let i = generate_random_instance(30, 200, 3, 4).unwrap();
        for t in 0..1000 {
            let mut rng = trial_rng(9, t);
            let (c, k) = f_approx_bucketed(&i, 0.1, &mut rng).unwrap();
            assert!(verify_cover(&i, &c).is_valid());
            assert!(k.edge_touches <= 2 * i.num_edges() as u64);
            assert!(k.element_touches <= (i.num_elements() + i.num_edges()) as u64);
            let (c, _) = f_approx_online(&i, 0.1, &mut rng).unwrap();
            assert!(verify_cover(&i, &c).is_valid());
        }
    }

    #[test]
    fn deterministic_for_a_seed() {
        let i = generate_random_instance(30, 200, 3, 4).unwrap();
        let a = f_approx_bucketed(&i, 0.1, &mut trial_rng(3, 3)).unwrap();
        let b = f_approx_bucketed(&i, 0.1, &mut trial_rng(3, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn buckets_partition_elements() {
        let i = generate_random_instance(10, 50, 2, 1).unwrap();
        let run = BucketedRun::new(&i, 0.25, &mut trial_rng(1, 1)).unwrap();
        let k = run.schedule().unwrap().k();
        let mut all: Vec<usize> = (0..=k).flat_map(|s| run.bucket(s).to_vec()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..50).collect::<Vec<_>>());
    }
}
