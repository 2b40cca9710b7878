use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{greedy_lpt, ClauseJob, Schedule};

/// Geometric cooling schedule shared by both stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealConfig {
    /// Starting temperature; `None` means a tenth of the input makespan.
    pub t_initial: Option<f64>,
    pub t_final: f64,
    pub cooling: f64,
    pub iters_per_temp: usize,
    /// Independent chains per stage; the best result wins.
    pub chains: usize,
    pub seed: u64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            t_initial: None,
            t_final: 1e-3,
            cooling: 0.95,
            iters_per_temp: 200,
            chains: 4,
            seed: 0,
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("anneal: {m}")));
        if !(self.t_final > 0.0) {
            return bad("t_final must be positive");
        }
        if let Some(t) = self.t_initial {
            if !(t > self.t_final) {
                return bad("t_initial must exceed t_final");
            }
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return bad("cooling must lie in (0, 1)");
        }
        if self.iters_per_temp == 0 {
            return bad("iters_per_temp must be at least 1");
        }
        if self.chains == 0 {
            return bad("chains must be at least 1");
        }
        Ok(())
    }

    fn start_temp(&self, s: &Schedule) -> f64 {
        self.t_initial.unwrap_or(s.makespan() as f64 / 10.0)
    }
}

#[derive(Clone, Copy)]
enum Move {
    Relocate(usize, usize),
    Swap(usize, usize),
}

fn apply(s: &mut Schedule, m: Move) {
    match m {
        Move::Relocate(j, to) => s.relocate(j, to),
        Move::Swap(a, b) => {
            let (pa, pb) = (s.pe_of(a), s.pe_of(b));
            s.relocate(a, pb);
            s.relocate(b, pa);
        }
    }
}

fn undo(s: &mut Schedule, m: Move, from: usize) {
    match m {
        Move::Relocate(j, _) => s.relocate(j, from),
        Move::Swap(..) => apply(s, m),
    }
}

/// Runs `cfg.chains` independent chains in parallel and keeps the best
/// result; ties go to the lowest chain index. Chain `r` of stage `stage`
/// draws from RNG stream `stage + 2r`.
fn anneal<P>(start: Schedule, cfg: &AnnealConfig, stage: u64, propose: P) -> Schedule
where
    P: Fn(&Schedule, &mut ChaCha8Rng) -> Option<Move> + Sync,
{
    (0..cfg.chains as u64)
        .into_par_iter()
        .map(|r| chain(start.clone(), cfg, stage + 2 * r, &propose))
        .reduce_with(|a, b| if b.objective() < a.objective() { b } else { a })
        .unwrap_or(start)
}

/// One annealing chain; returns the best schedule seen.
fn chain(start: Schedule, cfg: &AnnealConfig, stream: u64, propose: impl Fn(&Schedule, &mut ChaCha8Rng) -> Option<Move>) -> Schedule {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let mut temp = cfg.start_temp(&start);
    let mut best = start.clone();
    let mut cur = start;
    while temp > cfg.t_final {
        for _ in 0..cfg.iters_per_temp {
            let Some(m) = propose(&cur, &mut rng) else { continue };
            let before = cur.objective();
            let from = match m {
                Move::Relocate(j, _) => cur.pe_of(j),
                Move::Swap(..) => 0,
            };
            apply(&mut cur, m);
            let after = cur.objective();
            let accept = if after.0 != before.0 {
                after.0 < before.0 || {
                    let delta = (after.0 - before.0) as f64;
                    rng.random::<f64>() < (-delta / temp).exp()
                }
            } else {
                after.1 <= before.1
            };
            if !accept {
                undo(&mut cur, m, from);
            } else if cur.objective() < best.objective() {
                best = cur.clone();
            }
        }
        temp *= cfg.cooling;
    }
    best
}

/// Stage one: LPT start, moves relocate one job to another PE.
pub fn sa_stage1(jobs: &[ClauseJob], num_pes: usize, cfg: &AnnealConfig) -> Result<Schedule> {
    cfg.validate()?;
    let start = greedy_lpt(jobs, num_pes)?;
    if num_pes < 2 || jobs.is_empty() {
        return Ok(start);
    }
    Ok(anneal(start, cfg, 1, |s, rng| {
        let j = rng.random_range(0..s.jobs().len());
        let mut to = rng.random_range(0..s.num_pes() - 1);
        if to >= s.pe_of(j) {
            to += 1;
        }
        Some(Move::Relocate(j, to))
    }))
}

/// Stage two: pairwise swaps between PEs, keeping per-PE job counts.
///
/// Never returns anything worse than its input since the input is the
/// first best-seen candidate.
pub fn sa_stage2(schedule: &Schedule, cfg: &AnnealConfig) -> Result<Schedule> {
    cfg.validate()?;
    let n = schedule.jobs().len();
    if schedule.num_pes() < 2 || n < 2 {
        return Ok(schedule.clone());
    }
    Ok(anneal(schedule.clone(), cfg, 2, |s, rng| {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        (s.pe_of(a) != s.pe_of(b)).then_some(Move::Swap(a, b))
    }))
}
