//! Cycle-approximate model of a block-streaming clause accelerator.
//!
//! Every PE keeps a sliding feature window, walks the window positions in
//! the outer loop and, per position, streams the block lists of its jobs
//! in schedule order. One block is fetched per cycle and shared by all
//! members of its group; each included literal in the block costs one
//! gate evaluation.

mod report;

pub use report::{report_utilization, write_trace_csv, UtilizationSummary};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compress::OgbcsrModel;
use crate::ctm::{CtmConfig, CtmModel, FeatureDims, WindowInputs};
use crate::error::{Error, Result};
use crate::frontend::BooleanFeatureMap;
use crate::schedule::Schedule;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AccelConfig {
    /// Fixed setup cycles charged once per job.
    pub job_overhead_cycles: u64,
    /// Keep a per-block `TraceEvent` log.
    pub trace: bool,
}

impl Default for AccelConfig {
    fn default() -> Self {
        Self {
            job_overhead_cycles: 2,
            trace: false,
        }
    }
}

/// What the simulator needs to know about the dense model besides masks.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMeta {
    pub config: CtmConfig,
    pub dims: FeatureDims,
}

impl ModelMeta {
    pub fn of(model: &CtmModel) -> Self {
        Self {
            config: model.config.clone(),
            dims: model.dims,
        }
    }

    pub fn positions(&self) -> usize {
        self.dims.frames + 1 - self.config.window_frames
    }

    pub fn column_height(&self) -> usize {
        self.dims.channels * self.dims.bins
    }

    pub fn inputs(&self) -> usize {
        let conv = self.config.window_frames * self.column_height();
        conv + if self.config.position_bits { self.positions() - 1 } else { 0 }
    }

    pub fn class_of(&self, clause: usize) -> usize {
        clause / self.config.clauses_per_class
    }

    pub fn polarity_of(&self, clause: usize) -> i64 {
        let k = self.config.clauses_per_class;
        if clause % k < k / 2 {
            1
        } else {
            -1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    pub cycle: u64,
    pub pe: usize,
    pub job: usize,
    pub block_index: u32,
    /// Bit offset of the block record inside the compressed body.
    pub address: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeState {
    pub pe: usize,
    pub jobs: Vec<usize>,
    pub cycles: u64,
    pub blocks_processed: u64,
    pub idle_cycles: u64,
    pub feature_reads: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub total_cycles: u64,
    /// Every included-literal gate of every (clause, window) pair.
    pub logic_ops: u64,
    /// Gates left after AND short-circuit within a window and OR early
    /// exit across windows.
    pub logic_ops_short_circuit: u64,
    /// Block fetches.
    pub model_mem_reads: u64,
    /// Feature bits fetched, summed over PEs.
    pub feature_mem_reads: u64,
    pub per_pe: Vec<PeState>,
    pub per_pe_utilization: Vec<f64>,
    pub class_sums: Vec<i32>,
    pub trace: Option<Vec<TraceEvent>>,
}

/// Closed-form `logic_ops`: include count times window count.
pub fn analytic_ops(compressed: &OgbcsrModel, meta: &ModelMeta) -> u64 {
    compressed.total_includes() as u64 * meta.positions() as u64
}

/// Bit address of every group's first block record.
fn group_payload_bases(c: &OgbcsrModel) -> Vec<u64> {
    let g = &c.geometry;
    let mut base = 0u64;
    c.groups
        .iter()
        .map(|grp| {
            let payload = base + g.count_bits as u64 + grp.blocks() as u64 * g.index_bits as u64;
            base += g.group_bits(grp.blocks(), grp.arity());
            payload
        })
        .collect()
}

fn check(compressed: &OgbcsrModel, schedule: &Schedule, fmap: &BooleanFeatureMap, meta: &ModelMeta) -> Result<()> {
    if FeatureDims::of(fmap) != meta.dims {
        return Err(Error::Mismatch(format!(
            "feature map {:?} does not match model {:?}",
            FeatureDims::of(fmap),
            meta.dims
        )));
    }
    if compressed.geometry.mask_len != 2 * meta.inputs() {
        return Err(Error::Mismatch(format!(
            "compressed masks have {} literals, model has {}",
            compressed.geometry.mask_len,
            2 * meta.inputs()
        )));
    }
    let clauses = meta.config.classes * meta.config.clauses_per_class;
    if compressed.clause_count != clauses {
        return Err(Error::Mismatch(format!(
            "compressed model has {} clauses, model has {clauses}",
            compressed.clause_count
        )));
    }
    if schedule.jobs().len() != compressed.groups.len() {
        return Err(Error::Mismatch(format!(
            "schedule has {} jobs for {} groups",
            schedule.jobs().len(),
            compressed.groups.len()
        )));
    }
    let p = meta.positions() as u64;
    for (j, (job, grp)) in schedule.jobs().iter().zip(&compressed.groups).enumerate() {
        if job.id != j || job.cost != grp.blocks() as u64 * p {
            return Err(Error::Mismatch(format!(
                "schedule job {j} (id {}, cost {}) does not match group {j} ({} blocks x {p} windows)",
                job.id,
                job.cost,
                grp.blocks()
            )));
        }
    }
    Ok(())
}

struct PeRun {
    state: PeState,
    logic_ops: u64,
    short_ops: u64,
    fired: Vec<usize>,
    trace: Vec<TraceEvent>,
}

fn run_pe(
    pe: usize,
    jobs: Vec<usize>,
    c: &OgbcsrModel,
    bases: &[u64],
    inputs: &WindowInputs,
    meta: &ModelMeta,
    cfg: &AccelConfig,
) -> PeRun {
    let b = c.geometry.block_size;
    let l = meta.inputs();
    let literal = |p: usize, lit: usize| if lit < l { inputs.input(p, lit) } else { !inputs.input(p, lit - l) };
    let mut run = PeRun {
        state: PeState {
            pe,
            jobs: jobs.clone(),
            cycles: 0,
            blocks_processed: 0,
            idle_cycles: 0,
            feature_reads: 0,
        },
        logic_ops: 0,
        short_ops: 0,
        fired: Vec::new(),
        trace: Vec::new(),
    };
    if jobs.is_empty() {
        return run;
    }
    // first window loads W columns, every later one only the new column
    run.state.feature_reads = (meta.dims.frames * meta.column_height()) as u64;
    run.state.cycles = cfg.job_overhead_cycles * jobs.len() as u64;
    let mut done: Vec<Vec<bool>> = jobs.iter().map(|&j| vec![false; c.groups[j].arity()]).collect();
    for p in 0..meta.positions() {
        for (slot, &j) in jobs.iter().enumerate() {
            let grp = &c.groups[j];
            let arity = grp.arity();
            let mut alive = vec![true; arity];
            let mut short_alive: Vec<bool> = done[slot].iter().map(|d| !d).collect();
            for (k, &bi) in grp.block_indices.iter().enumerate() {
                if cfg.trace {
                    run.trace.push(TraceEvent {
                        cycle: run.state.cycles,
                        pe,
                        job: j,
                        block_index: bi,
                        address: bases[j] + (k * arity * b) as u64,
                    });
                }
                run.state.cycles += 1;
                run.state.blocks_processed += 1;
                let first = bi as usize * b;
                for m in 0..arity {
                    for bit in grp.payloads[m][k].iter_ones() {
                        run.logic_ops += 1;
                        let v = literal(p, first + bit);
                        if short_alive[m] {
                            run.short_ops += 1;
                            short_alive[m] = v;
                        }
                        alive[m] &= v;
                    }
                }
            }
            for m in 0..arity {
                if alive[m] && !done[slot][m] {
                    done[slot][m] = true;
                    run.fired.push(grp.members[m]);
                }
            }
        }
    }
    run
}

/// Runs every PE over one feature map and assembles the report.
pub fn simulate(
    compressed: &OgbcsrModel,
    schedule: &Schedule,
    fmap: &BooleanFeatureMap,
    meta: &ModelMeta,
    cfg: &AccelConfig,
) -> Result<SimReport> {
    check(compressed, schedule, fmap, meta)?;
    let inputs = WindowInputs::new(fmap, meta.config.window_frames, meta.config.position_bits);
    let bases = group_payload_bases(compressed);
    let runs: Vec<PeRun> = (0..schedule.num_pes())
        .into_par_iter()
        .map(|pe| run_pe(pe, schedule.pe_jobs(pe), compressed, &bases, &inputs, meta, cfg))
        .collect();

    let total_cycles = runs.iter().map(|r| r.state.cycles).max().unwrap_or(0);
    let mut sums = vec![0i64; meta.config.classes];
    for &clause in runs.iter().flat_map(|r| &r.fired) {
        sums[meta.class_of(clause)] += meta.polarity_of(clause);
    }
    let t = meta.config.threshold as i64;
    let class_sums = sums.iter().map(|&s| s.clamp(-t, t) as i32).collect();
    let mut per_pe = Vec::with_capacity(runs.len());
    let mut trace = cfg.trace.then(Vec::new);
    let (mut ops, mut short, mut feats) = (0, 0, 0);
    for mut r in runs {
        r.state.idle_cycles = total_cycles - r.state.cycles;
        ops += r.logic_ops;
        short += r.short_ops;
        feats += r.state.feature_reads;
        if let Some(t) = trace.as_mut() {
            t.append(&mut r.trace);
        }
        per_pe.push(r.state);
    }
    let per_pe_utilization = per_pe
        .iter()
        .map(|s| if total_cycles == 0 { 1.0 } else { s.cycles as f64 / total_cycles as f64 })
        .collect();
    Ok(SimReport {
        total_cycles,
        logic_ops: ops,
        logic_ops_short_circuit: short,
        model_mem_reads: per_pe.iter().map(|s| s.blocks_processed).sum(),
        feature_mem_reads: feats,
        per_pe,
        per_pe_utilization,
        class_sums,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compress::{encode, encode_ungrouped, extract_masks, matching::Greedy, encode_masks};
    use crate::ctm::Clause;
    use crate::schedule::{greedy_lpt, jobs_from_model, ClauseJob};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_config(classes: usize, clauses: usize, w: usize, pos: bool) -> CtmConfig {
        CtmConfig {
            classes,
            clauses_per_class: clauses,
            window_frames: w,
            threshold: 3,
            position_bits: pos,
            ..CtmConfig::default()
        }
    }

    fn random_fmap(rng: &mut impl Rng, d: FeatureDims, density: f64) -> BooleanFeatureMap {
        BooleanFeatureMap::from_fn(d.channels, d.bins, d.frames, |_, _, _| rng.random_bool(density))
    }

    fn run(model: &CtmModel, c: &OgbcsrModel, fmap: &BooleanFeatureMap, pes: usize, cfg: &AccelConfig) -> SimReport {
        let meta = ModelMeta::of(model);
        let s = greedy_lpt(&jobs_from_model(c, meta.positions()), pes).unwrap();
        simulate(c, &s, fmap, &meta, cfg).unwrap()
    }

    #[test]
    fn one_clause_arithmetic() {
        // 2 classes x 2 clauses; clause 0 includes x0 and x1, rest empty
        let d = FeatureDims { channels: 1, bins: 2, frames: 3 };
        let cfg = small_config(2, 2, 1, false);
        let mut m = CtmModel::new(cfg, d).unwrap();
        let n = m.config.states;
        let mut states = vec![n; 4];
        states[0] = n + 1;
        states[1] = n + 1;
        let mut clauses = m.clauses().to_vec();
        clauses[0] = Clause::from_states(states, 1, n);
        m = CtmModel::from_clauses(m.config.clone(), d, clauses).unwrap();
        let c = encode(&m, 4).unwrap();
        let fmap = BooleanFeatureMap::from_fn(1, 2, 3, |_, _, t| t == 1);
        let r = run(&m, &c, &fmap, 1, &AccelConfig::default());
        assert_eq!(r.logic_ops, 6);
        assert_eq!(r.model_mem_reads, 3);
        assert_eq!(r.total_cycles, 3 + 2);
        assert_eq!(r.class_sums, vec![1, 0]);
        // window 0 fails at x0 (1 gate); window 1 fires (2); window 2 skipped
        assert_eq!(r.logic_ops_short_circuit, 3);
        assert_eq!(r.feature_mem_reads, 6);
        assert_eq!(analytic_ops(&c, &ModelMeta::of(&m)), 6);
    }

    #[test]
    fn dead_model_does_nothing() {
        let d = FeatureDims { channels: 2, bins: 3, frames: 5 };
        let m = CtmModel::new(small_config(3, 4, 2, false), d).unwrap();
        let c = encode(&m, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = run(&m, &c, &random_fmap(&mut rng, d, 0.5), 4, &AccelConfig::default());
        assert_eq!((r.logic_ops, r.total_cycles, r.feature_mem_reads), (0, 0, 0));
        assert_eq!(r.class_sums, vec![0; 3]);
        assert_eq!(report_utilization(&r).aggregate, 1.0);
    }

    #[test]
    fn matches_dense_reference_on_random_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..150 {
            let d = FeatureDims {
                channels: rng.random_range(1..=2),
                bins: rng.random_range(1..=5),
                frames: rng.random_range(2..=8),
            };
            let w = rng.random_range(1..=d.frames);
            let cfg = small_config(rng.random_range(1..=4), 2 * rng.random_range(1..=4), w, trial % 3 == 0);
            let m = CtmModel::random(cfg, d, [0.02, 0.1, 0.3][trial % 3], &mut rng).unwrap();
            let fmap = random_fmap(&mut rng, d, [0.5, 0.9, 0.97][trial % 3]);
            let b = [1, 4, 8, 16, 64][trial % 5];
            let c = encode(&m, b).unwrap();
            let pes = rng.random_range(1..=5);
            let r = run(&m, &c, &fmap, pes, &AccelConfig { trace: true, ..Default::default() });
            assert_eq!(r.class_sums, m.class_sums(&m.window_inputs(&fmap).unwrap()), "trial {trial}");
            assert_eq!(r.logic_ops, analytic_ops(&c, &ModelMeta::of(&m)));
            assert!(r.logic_ops_short_circuit <= r.logic_ops);
            for s in &r.per_pe {
                assert!(s.feature_reads <= (d.frames * d.channels * d.bins) as u64);
                assert!(s.idle_cycles <= r.total_cycles);
            }
            // same votes whatever the grouping
            let plain = encode_ungrouped(&extract_masks(&m), b).unwrap();
            assert_eq!(run(&m, &plain, &fmap, pes, &AccelConfig::default()).class_sums, r.class_sums);
            let greedy = encode_masks(&extract_masks(&m), b, &Greedy).unwrap();
            assert_eq!(run(&m, &greedy, &fmap, 2, &AccelConfig::default()).class_sums, r.class_sums);
        }
    }

    #[test]
    fn addresses_increase_within_each_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = FeatureDims { channels: 2, bins: 4, frames: 6 };
        let m = CtmModel::random(small_config(3, 6, 3, false), d, 0.15, &mut rng).unwrap();
        let c = encode(&m, 4).unwrap();
        let r = run(&m, &c, &random_fmap(&mut rng, d, 0.5), 3, &AccelConfig { trace: true, ..Default::default() });
        let trace = r.trace.unwrap();
        assert_eq!(trace.len() as u64, r.model_mem_reads);
        for pe in 0..3 {
            let ev: Vec<&TraceEvent> = trace.iter().filter(|e| e.pe == pe).collect();
            for w in ev.windows(2) {
                assert!(w[1].cycle > w[0].cycle);
                if w[0].job == w[1].job && w[1].block_index > w[0].block_index {
                    assert!(w[1].address > w[0].address);
                }
                if w[0].job == w[1].job && w[1].block_index <= w[0].block_index {
                    // next window restarts the stream
                    assert_eq!(c.groups[w[1].job].block_indices[0], w[1].block_index);
                }
            }
        }
    }

    #[test]
    fn ops_scale_with_added_includes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = FeatureDims { channels: 1, bins: 4, frames: 6 };
        let m = CtmModel::random(small_config(2, 4, 2, false), d, 0.1, &mut rng).unwrap();
        let mut clauses = m.clauses().to_vec();
        let n = m.config.states;
        let mut added = 0;
        for cl in clauses.iter_mut() {
            let mut st = cl.states().to_vec();
            if let Some(i) = st.iter().position(|&s| s <= n) {
                st[i] = n + 1;
                added += 1;
            }
            *cl = Clause::from_states(st, cl.polarity(), n);
        }
        let m2 = CtmModel::from_clauses(m.config.clone(), d, clauses).unwrap();
        let fmap = random_fmap(&mut rng, d, 0.5);
        let p = ModelMeta::of(&m).positions() as u64;
        let r1 = run(&m, &encode(&m, 4).unwrap(), &fmap, 2, &AccelConfig::default());
        let r2 = run(&m2, &encode(&m2, 4).unwrap(), &fmap, 2, &AccelConfig::default());
        assert_eq!(r2.logic_ops - r1.logic_ops, added * p);
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = FeatureDims { channels: 1, bins: 3, frames: 4 };
        let m = CtmModel::random(small_config(2, 2, 2, false), d, 0.3, &mut rng).unwrap();
        let c = encode(&m, 4).unwrap();
        let meta = ModelMeta::of(&m);
        let jobs = jobs_from_model(&c, meta.positions());
        let s = greedy_lpt(&jobs, 2).unwrap();
        let fmap = random_fmap(&mut rng, d, 0.5);
        assert!(simulate(&c, &s, &random_fmap(&mut rng, FeatureDims { frames: 5, ..d }, 0.5), &meta, &AccelConfig::default()).is_err());
        let mut wrong = jobs.clone();
        wrong.push(ClauseJob { id: jobs.len(), cost: 1 });
        let s2 = greedy_lpt(&wrong, 2).unwrap();
        assert!(matches!(simulate(&c, &s2, &fmap, &meta, &AccelConfig::default()), Err(Error::Mismatch(_))));
        if let Some(j) = jobs.first() {
            let mut off = jobs.clone();
            off[0].cost = j.cost + 1;
            let s3 = greedy_lpt(&off, 2).unwrap();
            assert!(simulate(&c, &s3, &fmap, &meta, &AccelConfig::default()).is_err());
        }
        let other = CtmModel::random(small_config(2, 2, 3, false), d, 0.3, &mut rng).unwrap();
        assert!(simulate(&c, &s, &fmap, &ModelMeta::of(&other), &AccelConfig::default()).is_err());
    }
}
