//! Adaptive flip graph search.
//!
//! One iteration is a random flip among the active terms followed by every
//! pairwise reduction that becomes available. On top of that walk:
//!
//! * after more than `plus_flag` consecutive iterations without a rank drop,
//!   one random plus transition is applied;
//! * every `general_reduction_period` iterations the general group reduction
//!   is attempted;
//! * a schedule of edge constraints restricts moves to terms supported in a
//!   growing leading sub-box of the factor matrices;
//! * the whole schedule can be repeated, each pass warm-starting from the best
//!   scheme found so far.
//!
//! A run is single threaded and fully determined by its parameters, the
//! initial scheme and the seed. The RNG is xoshiro256++ seeded through
//! SplitMix64 (`rand_xoshiro`), which is part of the reproducibility contract.

mod checkpoint;
mod schedule;
mod walker;

use std::path::Path;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::{box_masks, component_ranks, verify_words, Dims, Scheme};

pub use checkpoint::Checkpoint;
pub use schedule::{constraint_sequence, default_schedule, log_spaced_budgets, unconstrained, Stage};
pub use walker::MoveEvent;

use walker::Walker;

/// Name of the PRNG algorithm, recorded in manifests.
pub const RNG_ALGORITHM: &str = "xoshiro256++ (SplitMix64 seeding)";

/// When plus transitions may fire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlusPolicy {
    Off,
    /// Only in the last (unconstrained) stage of the schedule.
    FinalStage,
    AllStages,
}

/// How often the full scheme is re-verified during a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelfCheck {
    /// After every iteration. Slow; the default in debug builds.
    EveryStep,
    /// Whenever a trace record is taken.
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchParams {
    pub dims: Dims,
    pub seed: u64,
    pub schedule: Vec<Stage>,
    /// Consecutive non-reducing iterations tolerated before a plus transition.
    pub plus_flag: u64,
    pub plus_policy: PlusPolicy,
    /// Number of passes over the schedule.
    pub restarts: u32,
    /// Attempt a general reduction every this many iterations; 0 disables it.
    pub general_reduction_period: u64,
    /// Write a checkpoint every this many iterations when a checkpoint path is
    /// given; 0 disables it.
    pub checkpoint_every: u64,
    pub trace_stride: u64,
    /// Stop as soon as the best rank is at most this.
    pub target_rank: Option<usize>,
    pub self_check: SelfCheck,
}

impl SearchParams {
    /// A single unconstrained stage of `iterations` with default settings.
    pub fn new(dims: Dims, iterations: u64) -> Self {
        Self {
            dims,
            seed: 0,
            schedule: unconstrained(dims, iterations),
            plus_flag: 5_000,
            plus_policy: PlusPolicy::FinalStage,
            restarts: 1,
            general_reduction_period: 1_000,
            checkpoint_every: 0,
            trace_stride: 1_000,
            target_rank: None,
            self_check: if cfg!(debug_assertions) {
                SelfCheck::EveryStep
            } else {
                SelfCheck::Sampled
            },
        }
    }

    /// Edge-constraint schedule with `total` iterations per pass.
    pub fn with_default_schedule(mut self, total: u64) -> Self {
        let d = self.dims;
        self.schedule = default_schedule(d.n, d.m, d.p, total).expect("dims already validated");
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        schedule::validate(self.dims, &self.schedule)?;
        if self.plus_flag == 0 {
            return Err(Error::Params("plus flag must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Params("at least one pass is required".into()));
        }
        if self.trace_stride == 0 {
            return Err(Error::Params("trace stride must be at least 1".into()));
        }
        Ok(())
    }

    pub fn iterations_per_pass(&self) -> u64 {
        self.schedule.iter().map(|s| s.budget).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: u64,
    pub current_rank: usize,
    pub best_rank: usize,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SearchStats {
    pub trace: Vec<TraceRecord>,
    pub iterations: u64,
    pub flips: u64,
    pub pairwise_reductions: u64,
    pub general_reductions: u64,
    pub plus_transitions: u64,
    pub initial_rank: usize,
    pub best_rank: usize,
    /// Iteration at which the best rank was first reached.
    pub best_iteration: u64,
    pub elapsed: Duration,
}

/// Wall-clock time is excluded: two runs are equal when their trajectories are.
impl PartialEq for SearchStats {
    fn eq(&self, o: &Self) -> bool {
        self.trace == o.trace
            && self.iterations == o.iterations
            && self.flips == o.flips
            && self.pairwise_reductions == o.pairwise_reductions
            && self.general_reductions == o.general_reductions
            && self.plus_transitions == o.plus_transitions
            && self.initial_rank == o.initial_rank
            && self.best_rank == o.best_rank
            && self.best_iteration == o.best_iteration
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub best: Scheme,
    pub stats: SearchStats,
}

/// What one iteration did, handed to observers.
pub struct StepView<'a> {
    pub iteration: u64,
    pub pass: u32,
    pub stage: usize,
    pub events: &'a [MoveEvent],
    pub rank: usize,
    pub best_rank: usize,
    search: &'a Search,
}

impl StepView<'_> {
    /// The full current scheme (active terms first).
    pub fn scheme(&self) -> Scheme {
        self.search.current_scheme()
    }

    /// Terms outside the current stage's box, which no move may touch.
    pub fn frozen_len(&self) -> usize {
        self.search.walker.frozen.len()
    }
}

/// A resumable search run.
pub struct Search {
    params: SearchParams,
    rng: Xoshiro256PlusPlus,
    walker: Walker,
    best: Vec<[u64; 3]>,
    stats: SearchStats,
    pass: u32,
    stage: usize,
    stage_iter: u64,
    iteration: u64,
    plus_counter: u64,
    finished: bool,
    events: Vec<MoveEvent>,
}

fn trace_due(it: u64, stride: u64) -> bool {
    if it.is_multiple_of(stride) {
        return true;
    }
    // 1, 2, 5, 10, 20, 50, ... below 10^4
    let mut p = 1;
    while p < 10_000 && p <= it {
        if it == p || it == 2 * p || it == 5 * p {
            return true;
        }
        p *= 10;
    }
    false
}

fn first_stage_containing(params: &SearchParams, words: &[[u64; 3]]) -> usize {
    params
        .schedule
        .iter()
        .position(|st| {
            let masks = box_masks(params.dims, st.constraint);
            words.iter().all(|t| (0..3).all(|s| t[s] & !masks[s] == 0))
        })
        .unwrap_or(params.schedule.len() - 1)
}

impl Search {
    pub fn new(params: SearchParams, initial: &Scheme) -> Result<Self> {
        params.validate()?;
        if initial.dims() != params.dims {
            return Err(Error::Params(format!(
                "initial scheme is {} but the run is for {}",
                initial.dims(),
                params.dims
            )));
        }
        if !initial.verify() {
            return Err(Error::NotAScheme);
        }
        let words = initial.words();
        let walker = Walker::partitioned(params.dims, params.schedule[0].constraint, &words);
        let stats = SearchStats {
            initial_rank: initial.rank(),
            best_rank: initial.rank(),
            ..Default::default()
        };
        Ok(Self {
            rng: Xoshiro256PlusPlus::seed_from_u64(params.seed),
            walker,
            best: words,
            stats,
            pass: 0,
            stage: 0,
            stage_iter: 0,
            iteration: 0,
            plus_counter: 0,
            finished: false,
            events: Vec::new(),
            params,
        })
    }

    pub fn params(&self) -> &SearchParams {
        &self.params
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    pub fn stats(&self) -> &SearchStats {
        &self.stats
    }

    pub fn current_rank(&self) -> usize {
        self.walker.rank()
    }

    pub fn current_scheme(&self) -> Scheme {
        self.walker.scheme()
    }

    pub fn best_scheme(&self) -> Scheme {
        Scheme::from_words(self.params.dims, self.best.iter().copied())
    }

    fn plus_allowed(&self) -> bool {
        match self.params.plus_policy {
            PlusPolicy::Off => false,
            PlusPolicy::AllStages => true,
            PlusPolicy::FinalStage => self.stage + 1 == self.params.schedule.len(),
        }
    }

    /// Moves to the next stage (or pass) with budget left. Returns false when
    /// the run is over.
    fn enter_next_stage(&mut self) -> bool {
        loop {
            if self.stage_iter < self.params.schedule[self.stage].budget {
                return true;
            }
            if self.stage + 1 < self.params.schedule.len() {
                self.stage += 1;
                let all = self.walker.all_words();
                self.walker = Walker::partitioned(
                    self.params.dims,
                    self.params.schedule[self.stage].constraint,
                    &all,
                );
            } else {
                self.pass += 1;
                if self.pass >= self.params.restarts {
                    return false;
                }
                self.stage = first_stage_containing(&self.params, &self.best);
                self.walker = Walker::partitioned(
                    self.params.dims,
                    self.params.schedule[self.stage].constraint,
                    &self.best,
                );
            }
            self.stage_iter = 0;
            self.plus_counter = 0;
        }
    }

    fn finish(&mut self) {
        self.finished = true;
        let last = self.stats.trace.last().map(|r| r.iteration);
        if last != Some(self.iteration) {
            self.record_trace();
        }
    }

    fn record_trace(&mut self) {
        self.stats.trace.push(TraceRecord {
            iteration: self.iteration,
            current_rank: self.walker.rank(),
            best_rank: self.stats.best_rank,
        });
    }

    fn self_check(&self) {
        let all = self.walker.all_words();
        assert!(
            verify_words(self.params.dims, all.iter().copied()),
            "scheme invalid after iteration {}",
            self.iteration
        );
        let s = Scheme::from_words(self.params.dims, all);
        let d = self.params.dims;
        assert_eq!(
            component_ranks(&s),
            (d.n * d.m, d.m * d.p, d.p * d.n),
            "component ranks broken after iteration {}",
            self.iteration
        );
    }

    /// Runs one iteration. Returns `None` once the run is finished.
    pub fn step(&mut self) -> Option<StepView<'_>> {
        if self.finished {
            return None;
        }
        if !self.enter_next_stage() {
            self.finish();
            return None;
        }
        self.iteration += 1;
        self.stage_iter += 1;
        self.stats.iterations = self.iteration;
        self.events.clear();
        let before = self.walker.rank();

        if let Some((s, i, j)) = self.walker.sample_flip(&mut self.rng) {
            self.walker.apply_flip(s, i, j);
            self.events.push(MoveEvent::Flip);
            self.stats.flips += 1;
            self.walker.reduce_pending(&mut self.events);
        }
        let g = self.params.general_reduction_period;
        if g > 0 && self.iteration.is_multiple_of(g) {
            if let Some(e) = self.walker.general_reduction() {
                self.events.push(e);
                self.walker.reduce_pending(&mut self.events);
            }
        }
        for e in &self.events {
            match e {
                MoveEvent::Merge | MoveEvent::Cancel => self.stats.pairwise_reductions += 1,
                MoveEvent::GeneralReduction { .. } => self.stats.general_reductions += 1,
                _ => {}
            }
        }

        let rank = self.walker.rank();
        if rank < before {
            self.plus_counter = 0;
        } else {
            self.plus_counter += 1;
        }
        if rank < self.stats.best_rank {
            self.stats.best_rank = rank;
            self.stats.best_iteration = self.iteration;
            self.best = self.walker.all_words();
        }
        if self.plus_counter > self.params.plus_flag && self.plus_allowed() {
            if self.walker.random_plus(&mut self.rng) {
                self.events.push(MoveEvent::Plus);
                self.stats.plus_transitions += 1;
            }
            self.plus_counter = 0;
        }

        let traced = trace_due(self.iteration, self.params.trace_stride);
        if traced {
            self.record_trace();
        }
        if self.params.self_check == SelfCheck::EveryStep || traced {
            self.self_check();
        }
        if self.params.target_rank.is_some_and(|t| self.stats.best_rank <= t) {
            self.finish();
        }

        Some(StepView {
            iteration: self.iteration,
            pass: self.pass,
            stage: self.stage,
            events: &self.events,
            rank: self.walker.rank(),
            best_rank: self.stats.best_rank,
            search: self,
        })
    }

    /// Runs to completion, calling `observer` after every iteration.
    pub fn run_observed(mut self, mut observer: impl FnMut(&StepView<'_>)) -> SearchOutcome {
        let start = Instant::now();
        while let Some(view) = self.step() {
            observer(&view);
        }
        self.stats.elapsed += start.elapsed();
        self.into_outcome()
    }

    pub fn run(self) -> SearchOutcome {
        self.run_observed(|_| {})
    }

    /// Runs to completion, writing a checkpoint to `path` every
    /// `checkpoint_every` iterations. If a write fails the error carries the
    /// best result found up to that point.
    pub fn run_checkpointed(mut self, path: &Path) -> Result<SearchOutcome> {
        let every = self.params.checkpoint_every;
        let start = Instant::now();
        while let Some(view) = self.step() {
            let it = view.iteration;
            if every > 0 && it % every == 0 && !self.finished {
                if let Err(e) = self.checkpoint().and_then(|c| c.write(path)) {
                    self.stats.elapsed += start.elapsed();
                    return Err(Error::CheckpointWrite {
                        message: e.to_string(),
                        partial: Box::new(self.into_outcome()),
                    });
                }
            }
        }
        self.stats.elapsed += start.elapsed();
        Ok(self.into_outcome())
    }

    pub fn into_outcome(mut self) -> SearchOutcome {
        if !self.finished && self.enter_next_stage() {
            // stopped early by the caller; keep the trace tail honest
            let last = self.stats.trace.last().map(|r| r.iteration);
            if last != Some(self.iteration) {
                self.record_trace();
            }
        } else if !self.finished {
            self.finish();
        }
        SearchOutcome {
            best: self.best_scheme(),
            stats: self.stats,
        }
    }

    /// Snapshot of the complete run state.
    pub fn checkpoint(&self) -> Result<Checkpoint> {
        Checkpoint::capture(self)
    }

    pub fn resume(cp: Checkpoint) -> Result<Self> {
        cp.restore()
    }
}

/// Runs a search to completion.
pub fn run(params: SearchParams, initial: &Scheme) -> Result<SearchOutcome> {
    Ok(Search::new(params, initial)?.run())
}

/// Seed for job `job` of a multi-job run; job 0 keeps the base seed.
pub fn job_seed(seed: u64, job: u64) -> u64 {
    if job == 0 {
        seed
    } else {
        SplitMix64::seed_from_u64(seed ^ job.wrapping_mul(0x9E37_79B9_7F4A_7C15)).next_u64()
    }
}

/// Runs `jobs` independent searches in parallel, job `k` seeded with
/// [`job_seed`]. Results come back in job order; the shared best record is
/// only replaced by a whole finished outcome.
pub fn run_jobs(params: &SearchParams, initial: &Scheme, jobs: usize) -> Result<Vec<SearchOutcome>> {
    let best: Mutex<Option<SearchOutcome>> = Mutex::new(None);
    let results: Vec<Result<SearchOutcome>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs.max(1))
            .map(|k| {
                let p = params.clone().with_seed(job_seed(params.seed, k as u64));
                let best = &best;
                scope.spawn(move || {
                    let out = run(p, initial)?;
                    let mut b = best.lock().unwrap();
                    if b.as_ref().is_none_or(|cur| out.best.rank() < cur.best.rank()) {
                        *b = Some(out.clone());
                    }
                    Ok(out)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("search thread panicked")).collect()
    });
    results.into_iter().collect()
}

/// Lowest-rank outcome, ties going to the earliest job.
pub fn best_of(outcomes: &[SearchOutcome]) -> Option<&SearchOutcome> {
    outcomes.iter().min_by_key(|o| o.best.rank())
}

/// One iteration of the plain random walk restricted to `constraint`: a
/// uniformly random legal flip among active terms, then pairwise reductions
/// until none remain. Returns the scheme unchanged if no flip exists.
pub fn random_search_step<R: Rng + ?Sized>(s: &Scheme, rng: &mut R, constraint: Dims) -> Result<Scheme> {
    if !s.dims().contains(&constraint) {
        return Err(Error::Params(format!("box {constraint} exceeds {}", s.dims())));
    }
    let mut w = Walker::partitioned(s.dims(), constraint, &s.words());
    let Some((slot, i, j)) = w.sample_flip(rng) else {
        return Ok(s.clone());
    };
    w.apply_flip(slot, i, j);
    w.reduce_pending(&mut Vec::new());
    Ok(w.scheme())
}
