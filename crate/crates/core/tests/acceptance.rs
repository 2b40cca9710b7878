//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Each criterion has gated parts, which must hold for this binary to exit
//! zero, and may have parts that are printed and scored but known to be out
//! of reach in this environment (see `known_gap` in the output). A FAIL
//! line is never turned into a PASS by that distinction.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use tsetlin_kws::accel::{analytic_ops, simulate, AccelConfig, ModelMeta};
use tsetlin_kws::compress::matching::{matching_registry, Blossom, Greedy, MatchingStrategy, WeightedEdge};
use tsetlin_kws::compress::{
    body_bits, candidate_edges, decode, encode, encode_masks, encode_ungrouped, extract_masks, sweep_block_size,
    to_block_rows, BlockGeometry, CompressionReport, IncludeMaskSet, Mask, OgbcsrModel,
};
use tsetlin_kws::ctm::{train, CtmConfig, CtmModel, FeatureDims};
use tsetlin_kws::frontend::{
    binarize, mel_filterbank, mfsc, spectral_flux, AudioClip, BooleanFeatureMap, FrameConfig, MelSpectrogram,
    ThresholdState, CLIP_SAMPLES,
};
use tsetlin_kws::schedule::{
    greedy_lpt, jobs_from_model, sa_stage1, sa_stage2, scheduler_registry, AnnealConfig, ClauseJob, Schedule,
};

// pinned tolerances and sizes
const ORACLE_RANDOM_PAIRS: usize = 1000;
const ORACLE_CLIPS: usize = 100;
const ORACLE_RUNTIME_S: f64 = 300.0;
const LOSSLESS_MODELS: usize = 200;
const BLOCK_SIZES: [usize; 5] = [1, 4, 8, 16, 64];
const MATCHING_INSTANCES: usize = 3000;
const MATCHING_MAX_ROWS: usize = 10;
const MATCHING_RUNTIME_S: f64 = 60.0;
const SCHED_INSTANCES: usize = 100;
const SCHED_MIN_GAIN_PP: f64 = 5.0;
const SCHED_SMALL_INSTANCES: usize = 500;
const OPS_MODELS: usize = 100;
const GSC_MIN_ACCURACY: f64 = 0.75;
const TOY_MIN_ACCURACY: f64 = 0.99;
const TOY_EPOCHS: usize = 5;
const FRONTEND_CASES: usize = 1000;
const FILTERBANK_SLACK: f64 = 1e-9;

struct Outcome {
    gated_ok: bool,
    pass: bool,
    detail: String,
    known_gap: Option<String>,
}

impl Outcome {
    fn gated(ok: bool, detail: String) -> Self {
        Self {
            gated_ok: ok,
            pass: ok,
            detail,
            known_gap: None,
        }
    }
}

/// Desk-scale model trained on the synthetic corpus, shared by several criteria.
struct Desk {
    corpus: common::Corpus,
    model: CtmModel,
    accuracy: f64,
}

fn desk() -> Desk {
    let corpus = common::corpus(50, 21);
    let model = common::trained_model(&corpus, CtmConfig::default(), 4, 5);
    let accuracy = model.accuracy(&common::windows(&model, &corpus.test));
    Desk { corpus, model, accuracy }
}

fn random_dims(rng: &mut ChaCha8Rng) -> FeatureDims {
    FeatureDims {
        channels: rng.random_range(1..=2),
        bins: rng.random_range(1..=8),
        frames: rng.random_range(2..=12),
    }
}

fn random_model(rng: &mut ChaCha8Rng) -> CtmModel {
    let dims = random_dims(rng);
    let cfg = CtmConfig {
        classes: rng.random_range(1..=12),
        clauses_per_class: 2 * rng.random_range(1..=8),
        window_frames: rng.random_range(1..=dims.frames),
        threshold: rng.random_range(1..=10),
        position_bits: rng.random_bool(0.25),
        ..CtmConfig::default()
    };
    let p = *[0.0, 0.01, 0.05, 0.2, 0.6].choose(rng).unwrap();
    CtmModel::random(cfg, dims, p, rng).unwrap()
}

fn random_fmap(rng: &mut ChaCha8Rng, d: FeatureDims) -> BooleanFeatureMap {
    let density = rng.random_range(0.05..0.98);
    BooleanFeatureMap::from_fn(d.channels, d.bins, d.frames, |_, _, _| rng.random_bool(density))
}

fn schedule_for(c: &OgbcsrModel, meta: &ModelMeta, pes: usize, name: &str, seed: u64) -> Schedule {
    let jobs = jobs_from_model(c, meta.positions());
    let cfg = AnnealConfig { seed, ..Default::default() };
    scheduler_registry().get(name).unwrap().schedule(&jobs, pes, &cfg).unwrap()
}

fn c1_oracle(desk: &Desk) -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let names = ["lpt", "sa-stage1", "two-stage"];
    let mut random_bad = 0;
    for i in 0..ORACLE_RANDOM_PAIRS {
        let m = random_model(&mut rng);
        let fmap = random_fmap(&mut rng, m.dims);
        let c = encode(&m, BLOCK_SIZES[i % BLOCK_SIZES.len()]).unwrap();
        let meta = ModelMeta::of(&m);
        let s = schedule_for(&c, &meta, rng.random_range(1..=8), names[i % 3], i as u64);
        let sim = simulate(&c, &s, &fmap, &meta, &AccelConfig::default()).unwrap();
        if sim.class_sums != m.class_sums(&m.window_inputs(&fmap).unwrap()) {
            random_bad += 1;
        }
    }
    let m = &desk.model;
    let meta = ModelMeta::of(m);
    let c = encode(m, 16).unwrap();
    let s = schedule_for(&c, &meta, 8, "two-stage", 1);
    let clips: Vec<&BooleanFeatureMap> = desk.corpus.test.iter().chain(&desk.corpus.val).map(|x| &x.0).take(ORACLE_CLIPS).collect();
    let mut clip_bad = 0;
    for f in &clips {
        let sim = simulate(&c, &s, f, &meta, &AccelConfig::default()).unwrap();
        if sim.class_sums != m.class_sums(&m.window_inputs(f).unwrap()) {
            clip_bad += 1;
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let ok = random_bad == 0 && clip_bad == 0 && clips.len() == ORACLE_CLIPS && secs < ORACLE_RUNTIME_S;
    Outcome::gated(
        ok,
        format!(
            "{ORACLE_RANDOM_PAIRS} random pairs: {random_bad} mismatches; {} cached synthetic clips with trained model: {clip_bad} mismatches; {secs:.1}s (limit {ORACLE_RUNTIME_S}s)",
            clips.len()
        ),
    )
}

fn c2_c4_compression(desk: &Desk) -> (Outcome, Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let (mut lossy, mut order_bad, mut stream_bad, mut cases) = (0, 0, 0, 0);
    let mut check = |masks: &IncludeMaskSet, b: usize| {
        cases += 1;
        let exact = encode_masks(masks, b, &Blossom).unwrap();
        let greedy = encode_masks(masks, b, &Greedy).unwrap();
        let plain = encode_ungrouped(masks, b).unwrap();
        for c in [&exact, &greedy, &plain] {
            if decode(c).unwrap() != *masks || OgbcsrModel::from_bytes(&c.to_bytes()).unwrap() != *c {
                lossy += 1;
            }
            if body_bits(c).len() as u64 != c.size_bits() {
                stream_bad += 1;
            }
        }
        if !(exact.size_bits() <= greedy.size_bits() && greedy.size_bits() <= plain.size_bits()) {
            order_bad += 1;
        }
    };
    for _ in 0..LOSSLESS_MODELS {
        let m = random_model(&mut rng);
        let masks = extract_masks(&m);
        for b in BLOCK_SIZES {
            check(&masks, b);
        }
    }
    let trained = extract_masks(&desk.model);
    for b in BLOCK_SIZES {
        check(&trained, b);
    }
    (
        Outcome::gated(lossy == 0, format!("{LOSSLESS_MODELS} random models x B in {BLOCK_SIZES:?} (+ trained model), 3 encoders each: {lossy} lossy roundtrips")),
        Outcome::gated(
            order_bad == 0 && stream_bad == 0,
            format!("{cases} encodings: {order_bad} ordering violations (exact <= greedy <= ungrouped), {stream_bad} streams whose bit length differs from size_bits"),
        ),
    )
}

/// Best total weight over all matchings, by enumeration.
fn brute_matching(n: usize, edges: &[WeightedEdge]) -> i64 {
    let mut w = vec![vec![None; n]; n];
    for &(a, b, x) in edges {
        let best = w[a][b].map_or(x, |y: i64| y.max(x));
        w[a][b] = Some(best);
        w[b][a] = Some(best);
    }
    fn go(free: &mut Vec<bool>, w: &[Vec<Option<i64>>]) -> i64 {
        let Some(i) = free.iter().position(|&f| f) else { return 0 };
        free[i] = false;
        let mut best = go(free, w);
        for j in i + 1..free.len() {
            if let (true, Some(x)) = (free[j], w[i][j]) {
                free[j] = false;
                best = best.max(x + go(free, w));
                free[j] = true;
            }
        }
        free[i] = true;
        best
    }
    go(&mut vec![true; n], &w)
}

/// Weight of a mate vector; `None` when it is not a valid matching.
fn mate_weight(mate: &[Option<usize>], edges: &[WeightedEdge]) -> Option<i64> {
    let mut total = 0;
    for (i, m) in mate.iter().enumerate() {
        if let Some(j) = *m {
            if mate.get(j).copied().flatten() != Some(i) {
                return None;
            }
            if i < j {
                total += edges.iter().filter(|e| (e.0, e.1) == (i, j) || (e.0, e.1) == (j, i)).map(|e| e.2).max()?;
            }
        }
    }
    Some(total)
}

fn c3_matching() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let reg = matching_registry();
    let (exact, greedy): (&dyn MatchingStrategy, &dyn MatchingStrategy) = (reg.get("blossom").unwrap(), reg.get("greedy").unwrap());
    let (mut wrong, mut greedy_above, mut with_edges) = (0, 0, 0);
    for i in 0..MATCHING_INSTANCES {
        let rows = rng.random_range(1..=MATCHING_MAX_ROWS);
        let mask_len = rng.random_range(2..=160);
        let b = *[1usize, 2, 4, 8, 16, 64].choose(&mut rng).unwrap();
        let p = rng.random_range(0.01..0.5);
        let masks: Vec<Mask> = (0..rows).map(|_| (0..mask_len).map(|_| rng.random_bool(p)).collect()).collect();
        let set = IncludeMaskSet::from_masks(mask_len, masks).unwrap();
        let geom = BlockGeometry::new(mask_len, b).unwrap();
        let block_rows = to_block_rows(&set, &geom);
        let mut edges = candidate_edges(&block_rows, &geom);
        if i % 3 == 0 {
            // arbitrary weights too, not only pair savings
            edges = edges.into_iter().map(|(a, b, _)| (a, b, rng.random_range(1..50))).collect();
        }
        with_edges += usize::from(!edges.is_empty());
        let n = block_rows.len();
        let best = brute_matching(n, &edges);
        let e = mate_weight(&exact.solve(n, &edges), &edges);
        let g = mate_weight(&greedy.solve(n, &edges), &edges);
        if e != Some(best) {
            wrong += 1;
        }
        if g.is_none_or(|g| g > e.unwrap_or(i64::MIN)) {
            greedy_above += 1;
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    Outcome::gated(
        wrong == 0 && greedy_above == 0 && secs < MATCHING_RUNTIME_S,
        format!(
            "{MATCHING_INSTANCES} instances <= {MATCHING_MAX_ROWS} rows ({with_edges} with candidate pairs): exact != brute force in {wrong}, greedy above exact or invalid in {greedy_above}; {secs:.1}s"
        ),
    )
}

fn c5_ratio(desk: &Desk) -> Outcome {
    let masks = extract_masks(&desk.model);
    let c = encode(&desk.model, 16).unwrap();
    let r = CompressionReport::new(&c, encode_ungrouped(&masks, 16).unwrap().size_bits());
    let sweep = sweep_block_size(&masks, &BLOCK_SIZES, &Blossom).unwrap();
    let table: Vec<String> = sweep.entries.iter().map(|e| format!("B={}:{:.2}x", e.block_size, e.ratio_vs_mask())).collect();
    let exact_le = sweep.entries.iter().all(|e| e.size_bits <= e.ungrouped_bits);
    Outcome::gated(
        r.ratio_vs_mask() > 1.0 && r.ratio_vs_state() > 1.0 && exact_le,
        format!(
            "trained model (synthetic test acc {:.3}), B=16: {:.2}x vs 1-bit masks, {:.2}x vs 8-bit states, file incl. headers {:.2}x; sweep {} best B={}; reference point 9.84x is model-dependent",
            desk.accuracy,
            r.ratio_vs_mask(),
            r.ratio_vs_state(),
            r.file_ratio_vs_mask(),
            table.join(" "),
            sweep.best_block_size
        ),
    )
}

fn skewed_costs(rng: &mut ChaCha8Rng, n: usize, kind: usize) -> Vec<u64> {
    (0..n)
        .map(|_| match kind {
            // cubed uniform: many small jobs, few large
            0 => (rng.random::<f64>().powi(3) * 1000.0) as u64 + 1,
            // log-uniform over two decades
            1 => (10.0 * (rng.random::<f64>() * 4.6).exp()) as u64,
            // Pareto, shape 1.5
            _ => (10.0 / (1.0 - rng.random::<f64>()).powf(1.0 / 1.5)).min(1e6) as u64,
        })
        .collect()
}

fn brute_makespan(costs: &[u64], pes: usize) -> u64 {
    fn go(i: usize, costs: &[u64], loads: &mut Vec<u64>, best: &mut u64) {
        if i == costs.len() {
            *best = (*best).min(*loads.iter().max().unwrap());
            return;
        }
        for p in 0..loads.len() {
            loads[p] += costs[i];
            go(i + 1, costs, loads, best);
            loads[p] -= costs[i];
        }
    }
    let mut best = u64::MAX;
    go(0, costs, &mut vec![0; pes], &mut best);
    best
}

fn c6_scheduler() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let (mut lpt_u, mut sa_u, mut bound_u) = (0.0, 0.0, 0.0);
    for i in 0..SCHED_INSTANCES {
        let n = rng.random_range(20..=200);
        let pes = rng.random_range(4..=16);
        let costs = skewed_costs(&mut rng, n, i % 3);
        let jobs: Vec<ClauseJob> = costs.iter().enumerate().map(|(id, &cost)| ClauseJob { id, cost }).collect();
        let cfg = AnnealConfig { seed: i as u64, ..Default::default() };
        let lpt = greedy_lpt(&jobs, pes).unwrap();
        let sa = sa_stage2(&sa_stage1(&jobs, pes, &cfg).unwrap(), &cfg).unwrap();
        let total: u64 = costs.iter().sum();
        // no schedule can beat max(largest job, ceil(total / pes))
        let lb = (*costs.iter().max().unwrap()).max(total.div_ceil(pes as u64));
        lpt_u += lpt.utilization();
        sa_u += sa.utilization();
        bound_u += total as f64 / (pes as f64 * lb as f64);
    }
    let k = SCHED_INSTANCES as f64;
    let (lpt_u, sa_u, bound_u) = (lpt_u / k, sa_u / k, bound_u / k);
    let gain_pp = 100.0 * (sa_u - lpt_u);
    let headroom_pp = 100.0 * (bound_u - lpt_u);

    let mut small_bad = 0;
    for i in 0..SCHED_SMALL_INSTANCES {
        let n = rng.random_range(1..=10);
        let pes = rng.random_range(1..=3);
        let costs: Vec<u64> = if i % 2 == 0 { (0..n).map(|_| rng.random_range(1..30)).collect() } else { skewed_costs(&mut rng, n, i % 3) };
        let jobs: Vec<ClauseJob> = costs.iter().enumerate().map(|(id, &cost)| ClauseJob { id, cost }).collect();
        let cfg = AnnealConfig { seed: i as u64, ..Default::default() };
        let sa = sa_stage2(&sa_stage1(&jobs, pes, &cfg).unwrap(), &cfg).unwrap();
        if sa.makespan() != brute_makespan(&costs, pes) {
            small_bad += 1;
        }
    }
    let gated = sa_u >= lpt_u && small_bad == 0;
    let gain_ok = gain_pp >= SCHED_MIN_GAIN_PP;
    Outcome {
        gated_ok: gated,
        pass: gated && gain_ok,
        detail: format!(
            "{SCHED_INSTANCES} skewed instances: mean utilization LPT {lpt_u:.4}, two-stage SA {sa_u:.4} (gain {gain_pp:.2}pp, target {SCHED_MIN_GAIN_PP}pp); \
             {SCHED_SMALL_INSTANCES} small instances: {small_bad} off the brute-force optimum; reference point 12.2% is reported only"
        ),
        known_gap: (!gain_ok).then(|| {
            format!(
                "the utilization upper bound total/(PEs*max(largest job, ceil(total/PEs))) averages {bound_u:.4}, only {headroom_pp:.2}pp above LPT, so no schedule can gain {SCHED_MIN_GAIN_PP}pp on these instances"
            )
        }),
    }
}

fn c7_ops(desk: &Desk) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut bad = 0;
    for i in 0..OPS_MODELS {
        let m = random_model(&mut rng);
        let c = encode(&m, BLOCK_SIZES[i % 5]).unwrap();
        let meta = ModelMeta::of(&m);
        let s = schedule_for(&c, &meta, rng.random_range(1..=6), "lpt", 0);
        let sim = simulate(&c, &s, &random_fmap(&mut rng, m.dims), &meta, &AccelConfig::default()).unwrap();
        if sim.logic_ops != analytic_ops(&c, &meta) {
            bad += 1;
        }
    }
    let m = &desk.model;
    let meta = ModelMeta::of(m);
    let c = encode(m, 16).unwrap();
    let s = schedule_for(&c, &meta, 8, "two-stage", 3);
    let clips: Vec<&BooleanFeatureMap> = desk.corpus.test.iter().map(|x| &x.0).collect();
    let (mut short, mut full) = (0u64, 0u64);
    for f in &clips {
        let r = simulate(&c, &s, f, &meta, &AccelConfig::default()).unwrap();
        full += r.logic_ops;
        short += r.logic_ops_short_circuit;
    }
    let n = clips.len() as f64;
    let (full, short) = (full as f64 / n, short as f64 / n);
    Outcome::gated(
        bad == 0,
        format!(
            "{OPS_MODELS} random models: {bad} analytic/simulated mismatches; trained model per inference: {full:.0} ops pre-short-circuit (10^{:.1}), {short:.0} short-circuited (10^{:.1}); reference point 907k",
            full.log10(),
            short.max(1.0).log10()
        ),
    )
}

fn toy_accuracy() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let dims = FeatureDims { channels: 1, bins: 10, frames: 6 };
    let cfg = CtmConfig {
        classes: 2,
        clauses_per_class: 10,
        window_frames: 3,
        threshold: 4,
        specificity: 3.9,
        ..CtmConfig::default()
    };
    let mut model = CtmModel::new(cfg, dims).unwrap();
    // class 0 turns the lower bins on, class 1 the upper bins; 2% bit noise
    let data: Vec<_> = (0..300)
        .map(|i| {
            let y = i % 2;
            let f = BooleanFeatureMap::from_fn(1, 10, 6, |_, b, _| ((b < 5) == (y == 0)) ^ rng.random_bool(0.02));
            (model.window_inputs(&f).unwrap(), y)
        })
        .collect();
    train(&mut model, &data, &[], TOY_EPOCHS, &mut rng).unwrap();
    model.accuracy(&data)
}

fn gsc_accuracy(root: &Path) -> Result<(f64, String), String> {
    use tsetlin_kws::dataset::{build_manifest, cache_features, load_split, Split};
    let epochs: usize = std::env::var("TKWS_GSC_EPOCHS").ok().and_then(|v| v.parse().ok()).unwrap_or(20);
    let cache = std::env::var("TKWS_GSC_CACHE").map(std::path::PathBuf::from).unwrap_or_else(|_| std::env::temp_dir().join("tkws-gsc-cache"));
    let (m, _) = build_manifest(root, 0).map_err(|e| e.to_string())?;
    cache_features(&m, root, &Default::default(), &cache).map_err(|e| e.to_string())?;
    let load = |s| load_split(&cache, s).map_err(|e| e.to_string());
    let (tr, te) = (load(Split::Train)?, load(Split::Test)?);
    let mut model = CtmModel::new(CtmConfig::default(), FeatureDims::of(&tr[0].1)).map_err(|e| e.to_string())?;
    let w = |d: &[(String, BooleanFeatureMap, usize)]| d.iter().map(|(_, f, y)| (model.window_inputs(f).unwrap(), *y)).collect::<Vec<_>>();
    let (a, b) = (w(&tr), w(&te));
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    train(&mut model, &a, &[], epochs, &mut rng).map_err(|e| e.to_string())?;
    Ok((model.accuracy(&b), format!("{epochs} epochs in {:.0}s", t0.elapsed().as_secs_f64())))
}

fn c8_accuracy() -> Outcome {
    let toy = toy_accuracy();
    let toy_ok = toy >= TOY_MIN_ACCURACY;
    let (gsc_ok, gsc_text, gap) = match std::env::var_os("TKWS_GSC_ROOT") {
        None => (
            false,
            "GSC-12: not run".to_string(),
            Some("Speech Commands is not available in this environment (set TKWS_GSC_ROOT to run the gate)".to_string()),
        ),
        Some(root) => match gsc_accuracy(Path::new(&root)) {
            Ok((acc, how)) => (acc >= GSC_MIN_ACCURACY, format!("GSC-12 test accuracy {acc:.4} ({how}, target {GSC_MIN_ACCURACY})"), None),
            Err(e) => (false, format!("GSC-12 run failed: {e}"), None),
        },
    };
    Outcome {
        gated_ok: toy_ok && (gap.is_some() || gsc_ok),
        pass: toy_ok && gsc_ok,
        detail: format!("2-class toy training accuracy {toy:.4} after {TOY_EPOCHS} epochs (target {TOY_MIN_ACCURACY}); {gsc_text}"),
        known_gap: gap,
    }
}

fn random_frame_config(rng: &mut ChaCha8Rng) -> FrameConfig {
    let fft = *[128usize, 256, 512, 1024].choose(rng).unwrap();
    let fmin = rng.random_range(0.0..2000.0);
    FrameConfig {
        frame_len_samples: rng.random_range(fft / 2..=fft),
        hop_samples: rng.random_range(fft / 4..=fft),
        fft_size: fft,
        mel_bins: rng.random_range(2..=64),
        fmin_hz: fmin,
        fmax_hz: rng.random_range(fmin + 100.0..=8000.0),
    }
}

fn c9_frontend() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let (mut neg_flux, mut causal_bad, mut nondet, mut partition_bad) = (0, 0, 0, 0);
    let small = FrameConfig { fft_size: 256, frame_len_samples: 256, hop_samples: 512, ..FrameConfig::default() };
    for i in 0..FRONTEND_CASES {
        // flux on spectra of random audio and on arbitrary value maps
        let amp = rng.random_range(0.0..20000.0);
        let clip = AudioClip::from_samples(&(0..CLIP_SAMPLES).map(|_| (amp * rng.random_range(-1.0..1.0)) as i16).collect::<Vec<_>>());
        let mel = if i % 4 == 0 {
            mfsc(&clip, &small).unwrap()
        } else {
            let cfg = FrameConfig { mel_bins: rng.random_range(2..=40), ..FrameConfig::default() };
            MelSpectrogram::from_fn(cfg, |_, _| rng.random_range(-30.0..10.0))
        };
        let flux = spectral_flux(&mel);
        neg_flux += flux.values.iter().filter(|&&v| !(v >= 0.0)).count();

        // bits up to frame t never depend on frames after t
        let alpha = rng.random_range(0.01..=1.0);
        let init = |m: &MelSpectrogram, f: &tsetlin_kws::frontend::SpectralFluxMap| {
            (ThresholdState::from_first_frame(&m.frame(0), alpha), ThresholdState::from_first_frame(&f.frame(0), alpha))
        };
        let bits = binarize(&mel, &flux, init(&mel, &flux)).unwrap();
        if binarize(&mel, &flux, init(&mel, &flux)).unwrap() != bits {
            nondet += 1;
        }
        let t = rng.random_range(0..mel.frames);
        let mut later = mel.clone();
        for f in 0..later.bins {
            for u in t + 1..later.frames {
                later.values[f * later.frames + u] = rng.random_range(-30.0..10.0);
            }
        }
        let mut later_flux = flux.clone();
        for f in 0..later_flux.bins {
            for u in t + 1..later_flux.frames {
                later_flux.values[f * later_flux.frames + u] = rng.random_range(0.0..5.0);
            }
        }
        let bits2 = binarize(&later, &later_flux, init(&later, &later_flux)).unwrap();
        let prefix_equal = (0..2).all(|c| (0..mel.bins).all(|f| (0..=t).all(|u| bits.get(c, f, u) == bits2.get(c, f, u))));
        if !prefix_equal {
            causal_bad += 1;
        }

        // overlapping unit-peak triangles never sum above one
        let fb = mel_filterbank(&random_frame_config(&mut rng));
        for k in 0..fb[0].len() {
            let s: f64 = fb.iter().map(|row| row[k]).sum();
            if s > 1.0 + FILTERBANK_SLACK || fb.iter().any(|row| row[k] < 0.0) {
                partition_bad += 1;
            }
        }
    }
    Outcome::gated(
        neg_flux + causal_bad + nondet + partition_bad == 0,
        format!(
            "{FRONTEND_CASES} random cases each: {neg_flux} negative flux values, {causal_bad} causality violations, {nondet} nondeterministic binarizations, {partition_bad} filterbank bins above 1+{FILTERBANK_SLACK}"
        ),
    )
}

fn hash_tree(dir: &Path) -> BTreeMap<String, String> {
    walkdir::WalkDir::new(dir)
        .into_iter()
        .map(Result::unwrap)
        .filter(|e| e.file_type().is_file())
        .map(|e| {
            let digest: String = Sha256::digest(std::fs::read(e.path()).unwrap()).iter().map(|b| format!("{b:02x}")).collect();
            (e.path().strip_prefix(dir).unwrap().to_string_lossy().into_owned(), digest)
        })
        .collect()
}

fn run_pipeline(dir: &Path) -> Result<(), String> {
    std::fs::write(
        dir.join("tkws.toml"),
        "seed = 17\n[ctm]\nclauses_per_class = 16\n[train]\nepochs = 2\n[schedule]\nnum_pes = 4\n",
    )
    .unwrap();
    let steps: [&[&str]; 10] = [
        &["synth", "--out", "data", "--clips-per-word", "5"],
        &["prepare", "--data-root", "data"],
        &["extract", "--data-root", "data"],
        &["train"],
        &["eval"],
        &["compress", "--sweep", "4,16"],
        &["schedule"],
        &["simulate", "--trace", "trace.csv"],
        &["report"],
        &["eval", "--split", "val", "--out", "eval_val.txt"],
    ];
    for args in steps {
        let out = Command::new(common::bin()).args(args).args(["--config", "tkws.toml"]).current_dir(dir).output().unwrap();
        if !out.status.success() {
            return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr).trim()));
        }
    }
    Ok(())
}

fn c10_determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    if let Err(e) = run_pipeline(a.path()).and_then(|_| run_pipeline(b.path())) {
        return Outcome::gated(false, format!("pipeline failed: {e}"));
    }
    let (ha, hb) = (hash_tree(a.path()), hash_tree(b.path()));
    let differing: Vec<&String> = ha.iter().filter(|(k, v)| hb.get(*k) != Some(v)).map(|(k, _)| k).collect();
    let stages = ["manifest.csv", "cache/index.csv", "model.tkm", "model.trace.txt", "eval.txt", "model.ogb", "compress.txt", "schedule.txt", "sim.txt", "trace.csv", "summary.txt"];
    let missing: Vec<&&str> = stages.iter().filter(|s| !ha.contains_key(**s)).collect();
    Outcome::gated(
        differing.is_empty() && missing.is_empty() && ha.len() == hb.len(),
        format!("two seeded CLI runs, {} artifacts hashed (every stage incl. corpus and feature files): {} differ {:?}, missing {:?}", ha.len(), differing.len(), differing, missing),
    )
}

fn main() {
    println!("acceptance report");
    let t0 = Instant::now();
    let desk = desk();
    println!("  shared trained model ready in {:.1}s", t0.elapsed().as_secs_f64());
    let mut results: Vec<(&str, Outcome, f64)> = Vec::new();
    let mut timed = |name: &'static str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let line = status_line(name, &o, t.elapsed().as_secs_f64());
        println!("{line}");
        results.push((name, o, t.elapsed().as_secs_f64()));
    };
    timed("1 oracle equivalence", &|| c1_oracle(&desk));
    let (c2, c4) = c2_c4_compression(&desk);
    timed("2 compression losslessness", &|| Outcome { gated_ok: c2.gated_ok, pass: c2.pass, detail: c2.detail.clone(), known_gap: None });
    timed("3 matching optimality", &c3_matching);
    timed("4 size ordering", &|| Outcome { gated_ok: c4.gated_ok, pass: c4.pass, detail: c4.detail.clone(), known_gap: None });
    timed("5 compression ratio", &|| c5_ratio(&desk));
    timed("6 scheduler quality", &c6_scheduler);
    timed("7 ops accounting", &|| c7_ops(&desk));
    timed("8 accuracy", &c8_accuracy);
    timed("9 frontend properties", &c9_frontend);
    timed("10 determinism", &c10_determinism);

    let passed = results.iter().filter(|r| r.1.pass).count();
    let gated_fail: Vec<&str> = results.iter().filter(|r| !r.1.gated_ok).map(|r| r.0).collect();
    println!(
        "acceptance: {passed}/{} criteria PASS; gated failures: {}; total {:.1}s",
        results.len(),
        if gated_fail.is_empty() { "none".to_string() } else { gated_fail.join(", ") },
        t0.elapsed().as_secs_f64()
    );
    if !gated_fail.is_empty() {
        std::process::exit(1);
    }
}

fn status_line(name: &str, o: &Outcome, secs: f64) -> String {
    let mut s = format!("[{}] criterion {name}: {} ({secs:.1}s)", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    if let Some(g) = &o.known_gap {
        s.push_str(&format!("\n       known_gap: {g}"));
    }
    s
}
