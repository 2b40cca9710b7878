use crate::error::Result;

use super::{ClauseJob, Schedule};

/// Longest job first, each onto the currently least-loaded PE.
///
/// Equal costs keep list order; equal loads go to the lowest PE index.
pub fn greedy_lpt(jobs: &[ClauseJob], num_pes: usize) -> Result<Schedule> {
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by(|&a, &b| jobs[b].cost.cmp(&jobs[a].cost).then(a.cmp(&b)));
    let mut loads = vec![0u64; num_pes.max(1)];
    let mut assignment = vec![0usize; jobs.len()];
    for j in order {
        let pe = (0..loads.len()).min_by_key(|&p| (loads[p], p)).unwrap();
        loads[pe] += jobs[j].cost;
        assignment[j] = pe;
    }
    Schedule::new(jobs, num_pes, assignment)
}
