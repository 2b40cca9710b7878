//! Balancing clause-group jobs across a fixed array of processing elements.

mod anneal;
mod io;
mod lpt;

pub use anneal::{sa_stage1, sa_stage2, AnnealConfig};
pub use io::{read_schedule_file, schedule_from_text, schedule_to_text, write_schedule_file, SCHEDULE_TAG};
pub use lpt::greedy_lpt;

use crate::compress::OgbcsrModel;
use crate::error::{Error, Result};
use crate::registry::{Named, Registry};

pub const DEFAULT_NUM_PES: usize = 8;

/// One clause group as a unit of PE work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClauseJob {
    pub id: usize,
    pub cost: u64,
}

/// Streamed block count of every group times the window count.
///
/// Members of a group share each block fetch, so a group costs its union
/// block count once per window, not the sum over members.
pub fn jobs_from_model(c: &OgbcsrModel, positions: usize) -> Vec<ClauseJob> {
    c.groups
        .iter()
        .enumerate()
        .map(|(id, g)| ClauseJob {
            id,
            cost: (g.blocks() * positions) as u64,
        })
        .collect()
}

/// Job-to-PE assignment. Job `i` is the `i`-th entry of the job list it
/// was built from; each PE runs its jobs in ascending list order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    num_pes: usize,
    jobs: Vec<ClauseJob>,
    assignment: Vec<usize>,
    per_pe_cost: Vec<u64>,
}

impl Schedule {
    pub fn new(jobs: &[ClauseJob], num_pes: usize, assignment: Vec<usize>) -> Result<Self> {
        if num_pes == 0 {
            return Err(Error::Config("num_pes must be at least 1".into()));
        }
        if assignment.len() != jobs.len() {
            return Err(Error::Mismatch(format!(
                "{} assignments for {} jobs",
                assignment.len(),
                jobs.len()
            )));
        }
        let mut per_pe_cost = vec![0u64; num_pes];
        for (job, &pe) in jobs.iter().zip(&assignment) {
            if pe >= num_pes {
                return Err(Error::Mismatch(format!("job {} assigned to PE {pe} of {num_pes}", job.id)));
            }
            per_pe_cost[pe] += job.cost;
        }
        Ok(Self {
            num_pes,
            jobs: jobs.to_vec(),
            assignment,
            per_pe_cost,
        })
    }

    pub fn num_pes(&self) -> usize {
        self.num_pes
    }

    pub fn jobs(&self) -> &[ClauseJob] {
        &self.jobs
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn pe_of(&self, job: usize) -> usize {
        self.assignment[job]
    }

    pub fn per_pe_cost(&self) -> &[u64] {
        &self.per_pe_cost
    }

    /// Job list positions run by `pe`, in execution order.
    pub fn pe_jobs(&self, pe: usize) -> Vec<usize> {
        (0..self.jobs.len()).filter(|&j| self.assignment[j] == pe).collect()
    }

    pub fn total_cost(&self) -> u64 {
        self.per_pe_cost.iter().sum()
    }

    pub fn makespan(&self) -> u64 {
        self.per_pe_cost.iter().copied().max().unwrap_or(0)
    }

    /// Sum of squared PE loads; orders equal-makespan schedules by spread.
    pub fn sum_sq(&self) -> u128 {
        self.per_pe_cost.iter().map(|&c| (c as u128) * (c as u128)).sum()
    }

    /// Lexicographic quality key, smaller is better.
    pub fn objective(&self) -> (u64, u128) {
        (self.makespan(), self.sum_sq())
    }

    /// `(total, num_pes * makespan)`; a schedule with no work is `(1, 1)`.
    pub fn utilization_exact(&self) -> (u64, u64) {
        let m = self.makespan();
        if m == 0 {
            (1, 1)
        } else {
            (self.total_cost(), self.num_pes as u64 * m)
        }
    }

    pub fn utilization(&self) -> f64 {
        let (n, d) = self.utilization_exact();
        n as f64 / d as f64
    }

    pub(crate) fn relocate(&mut self, job: usize, to: usize) {
        let from = self.assignment[job];
        let c = self.jobs[job].cost;
        self.per_pe_cost[from] -= c;
        self.per_pe_cost[to] += c;
        self.assignment[job] = to;
    }
}

pub trait Scheduler: Named + Send + Sync {
    fn schedule(&self, jobs: &[ClauseJob], num_pes: usize, cfg: &AnnealConfig) -> Result<Schedule>;
}

pub struct Lpt;

impl Named for Lpt {
    fn name(&self) -> &'static str {
        "lpt"
    }
    fn description(&self) -> &'static str {
        "longest job first onto the least loaded PE"
    }
}

impl Scheduler for Lpt {
    fn schedule(&self, jobs: &[ClauseJob], num_pes: usize, _cfg: &AnnealConfig) -> Result<Schedule> {
        greedy_lpt(jobs, num_pes)
    }
}

pub struct AnnealOnce;

impl Named for AnnealOnce {
    fn name(&self) -> &'static str {
        "sa-stage1"
    }
    fn description(&self) -> &'static str {
        "LPT refined by annealed single-job relocations"
    }
}

impl Scheduler for AnnealOnce {
    fn schedule(&self, jobs: &[ClauseJob], num_pes: usize, cfg: &AnnealConfig) -> Result<Schedule> {
        sa_stage1(jobs, num_pes, cfg)
    }
}

pub struct TwoStage;

impl Named for TwoStage {
    fn name(&self) -> &'static str {
        "two-stage"
    }
    fn description(&self) -> &'static str {
        "relocation annealing followed by pairwise swap annealing"
    }
}

impl Scheduler for TwoStage {
    fn schedule(&self, jobs: &[ClauseJob], num_pes: usize, cfg: &AnnealConfig) -> Result<Schedule> {
        let s1 = sa_stage1(jobs, num_pes, cfg)?;
        sa_stage2(&s1, cfg)
    }
}

pub const DEFAULT_SCHEDULER: &str = "two-stage";

pub fn scheduler_registry() -> Registry<dyn Scheduler> {
    let mut r: Registry<dyn Scheduler> = Registry::new("scheduler");
    r.register(Box::new(Lpt)).register(Box::new(AnnealOnce)).register(Box::new(TwoStage));
    r
}
