use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tsetlin_kws::accel::{analytic_ops, simulate, write_trace_csv, ModelMeta};
use tsetlin_kws::compress::matching::matching_registry;
use tsetlin_kws::compress::{
    encode_masks, encode_ungrouped, extract_masks, read_ogbcsr_file, sweep_block_size, write_ogbcsr_file,
    CompressionReport, OgbcsrModel,
};
use tsetlin_kws::config::PipelineConfig;
use tsetlin_kws::ctm::{read_model_file, train, write_model_file, CtmModel, FeatureDims, WindowInputs};
use tsetlin_kws::dataset::{
    build_manifest, cache_features, class_name, load_split, read_manifest, synth, write_manifest, Split, NUM_CLASSES,
};
use tsetlin_kws::frontend::{read_feature_file, BooleanFeatureMap};
use tsetlin_kws::schedule::{greedy_lpt, jobs_from_model, read_schedule_file, scheduler_registry, write_schedule_file};
use tsetlin_kws::{Error, Result};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  bad command line (unknown flag, missing value)
  3  missing input file or directory
  4  malformed artifact (bad magic, version, header or body; unsupported audio)
  5  i/o failure
  6  invalid configuration or unknown strategy name
  7  artifacts that do not fit together (shape, schedule or model mismatch)
  8  dataset problem (missing list files, empty classes, failed clips)

Default file names (all overridable) let the stages chain in one directory:
  manifest.csv  cache/  model.tkm  model.trace.txt  eval.txt
  model.ogb  compress.txt  schedule.txt  sim.txt  summary.txt";

#[derive(Parser)]
#[command(name = "tkws", version, about = "Tsetlin machine keyword spotting pipeline", after_help = EXIT_CODES)]
struct Cli {
    /// Pipeline config (TOML); flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the 12-class manifest from a Speech Commands directory.
    Prepare {
        #[arg(long, env = "TKWS_DATA_ROOT")]
        data_root: PathBuf,
        #[arg(long, default_value = "manifest.csv")]
        out: PathBuf,
    },
    /// Extract and cache Boolean feature maps for every manifest entry.
    Extract {
        #[arg(long, env = "TKWS_DATA_ROOT")]
        data_root: PathBuf,
        #[arg(long, default_value = "manifest.csv")]
        manifest: PathBuf,
        #[arg(long, default_value = "cache")]
        out: PathBuf,
    },
    /// Train a model on the cached training split.
    Train {
        #[arg(long, default_value = "cache")]
        cache: PathBuf,
        #[arg(long, default_value = "model.tkm")]
        out: PathBuf,
        #[arg(long)]
        epochs: Option<usize>,
        /// Accuracy trace; defaults to the model path with `.trace.txt`.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Confusion matrix and accuracy on a cached split.
    Eval {
        #[arg(long, default_value = "cache")]
        cache: PathBuf,
        #[arg(long, default_value = "model.tkm")]
        model: PathBuf,
        #[arg(long, default_value = "test")]
        split: Split,
        #[arg(long, default_value = "eval.txt")]
        out: PathBuf,
    },
    /// Encode include masks and report size against both dense baselines.
    Compress {
        #[arg(long, default_value = "model.tkm")]
        model: PathBuf,
        #[arg(long, default_value = "model.ogb")]
        out: PathBuf,
        #[arg(long, default_value = "compress.txt")]
        report: PathBuf,
        #[arg(long)]
        block_size: Option<usize>,
        #[arg(long)]
        matcher: Option<String>,
        /// Also compare these block sizes, e.g. `1,4,8,16,64`.
        #[arg(long, value_delimiter = ',')]
        sweep: Vec<usize>,
    },
    /// Assign compressed clause groups to PEs.
    Schedule {
        #[arg(long, default_value = "model.tkm")]
        model: PathBuf,
        #[arg(long, default_value = "model.ogb")]
        compressed: PathBuf,
        #[arg(long, default_value = "schedule.txt")]
        out: PathBuf,
        #[arg(long)]
        pes: Option<usize>,
        #[arg(long)]
        scheduler: Option<String>,
    },
    /// Run the accelerator model and check it against the dense model.
    Simulate(SimArgs),
    /// Collect the text outputs of earlier stages into one summary.
    Report {
        #[arg(long, default_value = ".")]
        dir: PathBuf,
        #[arg(long, default_value = "summary.txt")]
        out: PathBuf,
    },
    /// Write a small synthetic corpus with the Speech Commands layout.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 30)]
        clips_per_word: usize,
    },
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value = "model.tkm")]
    model: PathBuf,
    #[arg(long, default_value = "model.ogb")]
    compressed: PathBuf,
    #[arg(long, default_value = "schedule.txt")]
    schedule: PathBuf,
    /// A single feature file; otherwise clips come from `--cache`.
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long, default_value = "cache")]
    cache: PathBuf,
    #[arg(long, default_value = "test")]
    split: Split,
    /// Simulate at most this many clips of the split.
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long, default_value = "sim.txt")]
    out: PathBuf,
    /// Block fetch trace of the first clip as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    job_overhead: Option<u64>,
}

fn require(path: &Path, what: &str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::MissingInput(format!("{what} {} not found", path.display())))
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn load_model(path: &Path) -> Result<CtmModel> {
    require(path, "model")?;
    read_model_file(path)
}

fn load_compressed(path: &Path) -> Result<OgbcsrModel> {
    require(path, "compressed model")?;
    read_ogbcsr_file(path)
}

fn load_samples(cache: &Path, split: Split, model: &CtmModel) -> Result<Vec<(WindowInputs, usize)>> {
    require(cache, "feature cache")?;
    load_split(cache, split)?
        .into_iter()
        .map(|(_, f, y)| Ok((model.window_inputs(&f)?, y)))
        .collect()
}

fn header(kind: &str, cfg: &PipelineConfig) -> String {
    format!("# tkws {kind}\n# effective config:\n{}", cfg.echo())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tkws: error[{}]: {e}", e.exit_code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    cfg.schedule.anneal.seed = cfg.seed;
    match cli.cmd {
        Cmd::Prepare { data_root, out } => {
            let (m, stats) = build_manifest(&data_root, cfg.seed)?;
            write_manifest(&out, &m)?;
            println!(
                "manifest: {} entries (train {}, val {}, test {}); listed val {} found {}, listed test {} found {}",
                m.entries.len(),
                m.split(Split::Train).count(),
                m.split(Split::Val).count(),
                m.split(Split::Test).count(),
                stats.listed_val,
                stats.found_val,
                stats.listed_test,
                stats.found_test
            );
            Ok(())
        }
        Cmd::Extract { data_root, manifest, out } => {
            require(&manifest, "manifest")?;
            let m = read_manifest(&manifest)?;
            let s = cache_features(&m, &data_root, &cfg.frontend, &out)?;
            println!("features: {} computed, {} up to date, {} failed", s.computed, s.skipped, s.failures.len());
            for (path, err) in &s.failures {
                eprintln!("  failed {path}: {err}");
            }
            if s.failures.is_empty() {
                Ok(())
            } else {
                Err(Error::Dataset(format!("{} clips failed feature extraction", s.failures.len())))
            }
        }
        Cmd::Train { cache, out, epochs, trace_out } => {
            if let Some(e) = epochs {
                cfg.train.epochs = e;
            }
            require(&cache, "feature cache")?;
            let train_maps = load_split(&cache, Split::Train)?;
            let Some((_, first, _)) = train_maps.first() else {
                return Err(Error::Dataset("training split is empty".into()));
            };
            let mut model = CtmModel::new(cfg.ctm.clone(), FeatureDims::of(first))?;
            let samples: Vec<(WindowInputs, usize)> = train_maps
                .iter()
                .map(|(_, f, y)| Ok((model.window_inputs(f)?, *y)))
                .collect::<Result<_>>()?;
            let heldout = load_samples(&cache, Split::Val, &model)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let trace = train(&mut model, &samples, &heldout, cfg.train.epochs, &mut rng)?;
            write_model_file(&out, &model)?;
            let mut text = header("train trace", &cfg);
            writeln!(text, "train_samples: {}\nval_samples: {}", samples.len(), heldout.len()).unwrap();
            for (i, a) in trace.accuracy.iter().enumerate() {
                writeln!(text, "epoch {} val_accuracy {a:.4}", i + 1).unwrap();
            }
            writeln!(text, "train_accuracy: {:.4}", model.accuracy(&samples)).unwrap();
            writeln!(text, "total_includes: {}", model.total_includes()).unwrap();
            write_text(&trace_out.unwrap_or_else(|| out.with_extension("trace.txt")), &text)?;
            println!("trained {} epochs; last accuracy {:?}", cfg.train.epochs, trace.accuracy.last());
            Ok(())
        }
        Cmd::Eval { cache, model, split, out } => {
            let model = load_model(&model)?;
            let samples = load_samples(&cache, split, &model)?;
            let k = model.config.classes;
            let mut confusion = vec![vec![0usize; k]; k];
            for (x, y) in &samples {
                confusion[*y][model.predict(x)] += 1;
            }
            let hits: usize = (0..k).map(|i| confusion[i][i]).sum();
            let acc = if samples.is_empty() { 0.0 } else { hits as f64 / samples.len() as f64 };
            let mut text = header("eval", &cfg);
            writeln!(text, "# rows: true class, columns: predicted class").unwrap();
            for (i, row) in confusion.iter().enumerate() {
                let name = if k == NUM_CLASSES { class_name(i).to_string() } else { i.to_string() };
                let cells: Vec<String> = row.iter().map(|c| format!("{c:5}")).collect();
                writeln!(text, "{name:>10} {}", cells.join("")).unwrap();
            }
            writeln!(text, "split: {}\nsamples: {}\naccuracy: {acc:.4}", split.as_str(), samples.len()).unwrap();
            write_text(&out, &text)?;
            print!("{}", text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect::<String>());
            Ok(())
        }
        Cmd::Compress { model, out, report, block_size, matcher, sweep } => {
            if let Some(b) = block_size {
                cfg.compress.block_size = b;
            }
            if let Some(m) = matcher {
                cfg.compress.matcher = m;
            }
            let model = load_model(&model)?;
            let registry = matching_registry();
            let matcher = registry.get(&cfg.compress.matcher)?;
            let masks = extract_masks(&model);
            let c = encode_masks(&masks, cfg.compress.block_size, matcher)?;
            let plain = encode_ungrouped(&masks, cfg.compress.block_size)?;
            write_ogbcsr_file(&out, &c)?;
            let r = CompressionReport::new(&c, plain.size_bits());
            let mut text = header("compress", &cfg);
            text.push_str(&r.to_text());
            if !sweep.is_empty() {
                let s = sweep_block_size(&masks, &sweep, matcher)?;
                writeln!(text, "# sweep: block_size size_bits ratio_vs_mask ratio_vs_state").unwrap();
                for e in &s.entries {
                    writeln!(text, "sweep {} {} {:.4} {:.4}", e.block_size, e.size_bits, e.ratio_vs_mask(), e.ratio_vs_state()).unwrap();
                }
                writeln!(text, "best_block_size: {}", s.best_block_size).unwrap();
            }
            write_text(&report, &text)?;
            print!("{}", r.to_text());
            Ok(())
        }
        Cmd::Schedule { model, compressed, out, pes, scheduler } => {
            if let Some(p) = pes {
                cfg.schedule.num_pes = p;
            }
            if let Some(s) = scheduler {
                cfg.schedule.scheduler = s;
            }
            let model = load_model(&model)?;
            let c = load_compressed(&compressed)?;
            let meta = ModelMeta::of(&model);
            let jobs = jobs_from_model(&c, meta.positions());
            let registry = scheduler_registry();
            let s = registry
                .get(&cfg.schedule.scheduler)?
                .schedule(&jobs, cfg.schedule.num_pes, &cfg.schedule.anneal)?;
            let lpt = greedy_lpt(&jobs, cfg.schedule.num_pes)?;
            let comments = vec![
                format!("tkws schedule via {}", cfg.schedule.scheduler),
                format!("lpt_makespan {}", lpt.makespan()),
                format!("lpt_utilization {:.4}", lpt.utilization()),
                format!("effective config:\n{}", cfg.to_toml()),
            ];
            write_schedule_file(&out, &s, &comments)?;
            println!(
                "{} jobs on {} PEs: makespan {} utilization {:.4} (lpt {} / {:.4})",
                jobs.len(),
                s.num_pes(),
                s.makespan(),
                s.utilization(),
                lpt.makespan(),
                lpt.utilization()
            );
            Ok(())
        }
        Cmd::Simulate(a) => simulate_cmd(a, cfg),
        Cmd::Report { dir, out } => {
            let parts = [
                ("train", "model.trace.txt"),
                ("eval", "eval.txt"),
                ("compress", "compress.txt"),
                ("schedule", "schedule.txt"),
                ("simulate", "sim.txt"),
            ];
            let mut text = header("summary", &cfg);
            let mut found = 0;
            for (name, file) in parts {
                let p = dir.join(file);
                writeln!(text, "[{name}]").unwrap();
                match std::fs::read_to_string(&p) {
                    Ok(body) => {
                        found += 1;
                        for l in body.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
                            writeln!(text, "{l}").unwrap();
                        }
                    }
                    Err(_) => writeln!(text, "not found: {}", p.display()).unwrap(),
                }
            }
            if found == 0 {
                return Err(Error::MissingInput(format!("no stage outputs in {}", dir.display())));
            }
            write_text(&out, &text)?;
            print!("{text}");
            Ok(())
        }
        Cmd::Synth { out, clips_per_word } => {
            let sc = synth::SynthConfig {
                clips_per_word,
                seed: cfg.seed,
                ..Default::default()
            };
            synth::synth_corpus(&out, &sc)?;
            println!("synthetic corpus written to {}", out.display());
            Ok(())
        }
    }
}

fn simulate_cmd(a: SimArgs, mut cfg: PipelineConfig) -> Result<()> {
    if let Some(o) = a.job_overhead {
        cfg.accel.job_overhead_cycles = o;
    }
    let model = load_model(&a.model)?;
    let c = load_compressed(&a.compressed)?;
    require(&a.schedule, "schedule")?;
    let schedule = read_schedule_file(&a.schedule)?;
    let maps: Vec<BooleanFeatureMap> = match &a.features {
        Some(f) => {
            require(f, "feature file")?;
            vec![read_feature_file(f)?]
        }
        None => {
            require(&a.cache, "feature cache")?;
            let mut v: Vec<BooleanFeatureMap> = load_split(&a.cache, a.split)?.into_iter().map(|x| x.1).collect();
            v.truncate(a.limit.unwrap_or(usize::MAX));
            v
        }
    };
    if maps.is_empty() {
        return Err(Error::MissingInput("no feature maps to simulate".into()));
    }
    let meta = ModelMeta::of(&model);
    let mut text = header("simulate", &cfg);
    let (mut mismatches, mut ops, mut short, mut cycles) = (0usize, 0u64, 0u64, 0u64);
    for (i, fmap) in maps.iter().enumerate() {
        let mut acfg = cfg.accel.clone();
        acfg.trace = i == 0 && a.trace.is_some();
        let r = simulate(&c, &schedule, fmap, &meta, &acfg)?;
        if r.class_sums != model.class_sums(&model.window_inputs(fmap)?) {
            mismatches += 1;
        }
        ops += r.logic_ops;
        short += r.logic_ops_short_circuit;
        cycles += r.total_cycles;
        if i == 0 {
            writeln!(text, "# first clip").unwrap();
            text.push_str(&r.to_text());
            if let Some(t) = &a.trace {
                write_trace_csv(t, &r)?;
            }
        }
    }
    let n = maps.len() as f64;
    let jobs = schedule.jobs().len() as u64;
    writeln!(text, "# over all simulated clips").unwrap();
    writeln!(text, "clips: {}", maps.len()).unwrap();
    writeln!(text, "analytic_ops: {}", analytic_ops(&c, &meta)).unwrap();
    writeln!(text, "mean_logic_ops: {:.1}", ops as f64 / n).unwrap();
    writeln!(text, "mean_logic_ops_short_circuit: {:.1}", short as f64 / n).unwrap();
    writeln!(text, "mean_total_cycles: {:.1}", cycles as f64 / n).unwrap();
    writeln!(text, "schedule_makespan: {}", schedule.makespan()).unwrap();
    writeln!(text, "schedule_utilization: {:.4}", schedule.utilization()).unwrap();
    writeln!(text, "overhead_bound: {}", jobs * cfg.accel.job_overhead_cycles).unwrap();
    writeln!(text, "oracle_mismatches: {mismatches}").unwrap();
    write_text(&a.out, &text)?;
    print!("{}", text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect::<String>());
    if mismatches > 0 {
        return Err(Error::Mismatch(format!("{mismatches} clips disagree with the dense model")));
    }
    Ok(())
}
