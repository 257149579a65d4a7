use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dimjump_core::code::{build_2d, build_3d, build_inner, CodeTriple};
use dimjump_core::colex::{self, boundary_structure, split_colex, validate, Colex, ColorSet, RegionClass};
use dimjump_core::gf2::BitVec;
use dimjump_core::jump::{Faults, JumpEngine};
use dimjump_core::pauli::{min_weight_logical, DistanceKind, PauliKind, MAX_BRUTE_FORCE_QUBITS};
use dimjump_core::schedule::{self, SwapSchedule};
use dimjump_core::sim::{self, NoiseSpec, SingleShotTarget, TrialStats};
use dimjump_core::{Error, Result};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "dimjump", version, about = "Color codes, dimensional jumps and stack scheduling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect colex files and builtins
    #[command(subcommand)]
    Colex(ColexCmd),
    /// Build color codes
    #[command(subcommand)]
    Code(CodeCmd),
    /// Run dimensional jumps on encoded states
    #[command(subcommand)]
    Jump(JumpCmd),
    /// Monte Carlo and exhaustive simulations
    #[command(subcommand)]
    Simulate(SimCmd),
    /// Stack swap schedules
    #[command(subcommand)]
    Schedule(ScheduleCmd),
}

#[derive(Args, Clone, Serialize)]
#[group(required = true, multiple = false)]
struct Source {
    /// Builtin colex: tri7, tetra15, tri-hex-d3, tri-hex-d5, tri-hex-d7
    #[arg(long)]
    builtin: Option<String>,
    /// Colex JSON file
    #[arg(long)]
    colex: Option<PathBuf>,
}

impl Source {
    fn load(&self) -> Result<Colex> {
        match (&self.builtin, &self.colex) {
            (Some(name), _) => colex::builtin(name),
            (_, Some(path)) => colex::load_unchecked(path),
            _ => unreachable!("clap enforces one source"),
        }
    }

    fn load_valid(&self) -> Result<Colex> {
        let c = self.load()?;
        let rep = validate(&c);
        if !rep.is_valid() {
            return Err(Error::InvalidColex(rep.to_string()));
        }
        Ok(c)
    }
}

#[derive(Subcommand)]
enum ColexCmd {
    /// Check every colex invariant
    Validate(Source),
    /// Sizes and boundary structure
    Info(Source),
    /// SHA-256 of the canonical form
    Hash(Source),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    #[value(name = "2d")]
    #[serde(rename = "2d")]
    TwoD,
    #[value(name = "3d")]
    #[serde(rename = "3d")]
    ThreeD,
    Inner,
}

#[derive(Subcommand)]
enum CodeCmd {
    /// Build a code and print n, k and d
    Build {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Facet for the inner code
        #[arg(long, default_value = "rgb")]
        facet: String,
        /// Print the check matrices
        #[arg(long)]
        matrices: bool,
    },
}

#[derive(Args, Clone, Serialize)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Facet kept by the collapse
    #[arg(long, default_value = "rgb")]
    facet: String,
    /// Qubit error probability (X and Z independently)
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    /// Measurement flip probability
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Disallow repairs ending on the other facets
    #[arg(long)]
    no_facet_boundary: bool,
}

impl RunArgs {
    fn engine(&self) -> Result<(Colex, JumpEngine)> {
        let c = self.source.load_valid()?;
        let facet = parse_colors(&self.facet)?;
        let mut e = JumpEngine::new(&c, facet)?;
        if self.no_facet_boundary {
            e = e.without_facet_boundary();
        }
        Ok((c, e))
    }

    fn noise(&self) -> Result<NoiseSpec> {
        NoiseSpec::new(self.p, self.q, self.seed)
    }
}

#[derive(Subcommand)]
enum JumpCmd {
    /// Collapse encoded 3D states to the facet code
    Collapse {
        #[command(flatten)]
        run: RunArgs,
        /// Measure the 2D stabilizers directly instead of the inner plaquettes
        #[arg(long)]
        ideal: bool,
    },
    /// Grow encoded 2D states into the 3D code
    Blowup {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Blow up then collapse, checking the logical state
    Roundtrip {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Clone, Serialize)]
struct OutArgs {
    /// Output directory (default: $DIMJUMP_OUT_DIR or ./dimjump-out)
    #[arg(long, env = "DIMJUMP_OUT_DIR", default_value = "dimjump-out")]
    out_dir: PathBuf,
    /// Also write a per-trial trace
    #[arg(long)]
    trace: bool,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Target {
    Tetra,
    Inner,
}

#[derive(Subcommand)]
enum SimCmd {
    /// Noisy collapse trials
    Collapse {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Inject every single fault instead of sampling
        #[arg(long)]
        exhaustive: bool,
    },
    /// Noisy single-shot correction trials
    Singleshot {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long, value_enum, default_value = "tetra")]
        target: Target,
    },
    /// Measure the flux-to-support constant K
    MeasureK {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "rgb")]
        facet: String,
        /// Only this facet pair (default: all)
        #[arg(long)]
        pair: Option<String>,
        /// Largest flux length enumerated
        #[arg(long, default_value_t = 4)]
        cap: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Subcommand)]
enum ScheduleCmd {
    /// Compute a swap schedule for an access sequence
    Make {
        #[arg(long)]
        stack: usize,
        /// File of qubit ids in access order
        #[arg(long)]
        sequence: PathBuf,
        #[arg(long, default_value_t = 2)]
        internal_slots: usize,
        /// Write the schedule here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a schedule and check every invariant
    Verify {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        sequence: PathBuf,
    },
}

fn parse_colors(s: &str) -> Result<ColorSet> {
    ColorSet::parse(s).ok_or_else(|| Error::InvalidParameter(format!("\"{s}\" is not a color set")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Colex(c) => colex_cmd(c),
        Command::Code(CodeCmd::Build {
            source,
            kind,
            facet,
            matrices,
        }) => code_build(&source, kind, &facet, matrices),
        Command::Jump(j) => jump_cmd(j),
        Command::Simulate(s) => sim_cmd(s),
        Command::Schedule(s) => schedule_cmd(s),
    }
}

fn colex_cmd(cmd: ColexCmd) -> Result<()> {
    match cmd {
        ColexCmd::Validate(src) => {
            let c = src.load()?;
            let rep = validate(&c);
            if rep.is_valid() {
                println!("{}: valid", c.name);
                Ok(())
            } else {
                Err(Error::InvalidColex(rep.to_string()))
            }
        }
        ColexCmd::Info(src) => {
            let c = src.load_valid()?;
            println!("name: {}", c.name);
            println!("dimension: {}", c.dimension);
            println!("vertices: {}", c.num_vertices);
            println!("edges: {}", c.edges.len());
            println!("plaquettes: {}", c.plaquettes.len());
            println!("cells: {}", c.cells.len());
            let bs = boundary_structure(&c)?;
            for r in &bs.regions {
                let class = match r.class {
                    RegionClass::Free => "free",
                    RegionClass::Frozen => "frozen",
                    RegionClass::Other => "other",
                };
                println!("region {}: {} vertices, {class}", r.colors, r.vertices.len());
            }
            println!("borders: {} ({} odd)", bs.borders.len(), bs.borders.iter().filter(|b| b.odd).count());
            println!("corners: {}", bs.corners.len());
            println!("hash: {}", colex::hash(&c));
            Ok(())
        }
        ColexCmd::Hash(src) => {
            println!("{}", colex::hash(&src.load()?));
            Ok(())
        }
    }
}

fn code_build(source: &Source, kind: Kind, facet: &str, matrices: bool) -> Result<()> {
    let c = source.load_valid()?;
    let code: CodeTriple = match kind {
        Kind::TwoD => build_2d(&c)?,
        Kind::ThreeD => build_3d(&c)?,
        Kind::Inner => build_inner(&split_colex(&c, parse_colors(facet)?)?)?,
    };
    let k = code.logical_qubits()?;
    println!("code: {}", code.kind);
    println!("n={}", code.n);
    println!("k={k}");
    if k > 0 && code.n <= MAX_BRUTE_FORCE_QUBITS {
        match min_weight_logical(&code.s, &code.g, &code.l, DistanceKind::Dressed)? {
            Some(d) => println!("d={d}"),
            None => println!("d=none"),
        }
    } else if k > 0 {
        println!("d=skipped (n > {MAX_BRUTE_FORCE_QUBITS})");
    }
    println!("stabilizer generators: {}", code.s.len());
    println!("gauge generators: {}", code.g.len());
    println!("colex hash: {}", colex::hash(&c));
    if matrices {
        println!("stabilizer:\n{}", code.s.check_matrix_text());
        println!("gauge:\n{}", code.g.check_matrix_text());
    }
    Ok(())
}

fn state_label(kind: PauliKind) -> &'static str {
    match kind {
        PauliKind::Z => "0",
        PauliKind::X => "+",
    }
}

fn jump_cmd(cmd: JumpCmd) -> Result<()> {
    match cmd {
        JumpCmd::Collapse { run, ideal } => {
            let (c, e) = run.engine()?;
            let noise = run.noise()?;
            if ideal && (noise.p_qubit > 0.0 || noise.q_meas > 0.0) {
                return Err(Error::InvalidParameter("--ideal runs without noise".into()));
            }
            print_header("jump collapse", &c, noise.seed);
            let slots = e.measurement_slots().len();
            let n3 = e.split.n3();
            let mut failures = 0;
            for t in 0..run.trials {
                let kind = sim::trial_state(t);
                let s3 = e.encoded3(kind)?;
                let reference = e.reference(&s3)?;
                let mut rng = sim::trial_rng(noise.seed, t);
                let out = if ideal {
                    e.ideal_collapse(&s3, &mut rng)?
                } else {
                    let faults = Faults {
                        qubit_error: sim::sample_qubit_error(noise.p_qubit, n3, &mut rng),
                        flips: sim::sample_measurement_noise(noise.q_meas, slots, &mut rng),
                    };
                    e.collapse_with_faults(&s3, &faults, &mut rng)?
                };
                let flips = e.logical_flips(&out.state, &reference)?;
                let failed = flips.iter().any(|f| f.1);
                failures += failed as u64;
                let sig: Vec<String> = out
                    .records
                    .iter()
                    .map(|r| format!("{}{}:{:?}", r.basis, r.pair, r.sigma))
                    .collect();
                println!(
                    "trial {t} state {} correction {} sigma {} failure {failed}",
                    state_label(kind),
                    out.correction,
                    sig.join(" ")
                );
            }
            println!("logical failures: {failures}/{}", run.trials);
            Ok(())
        }
        JumpCmd::Blowup { run } => {
            let (c, e) = run.engine()?;
            let noise = run.noise()?;
            print_header("jump blowup", &c, noise.seed);
            let dec = e.inner_decoder()?;
            let mut failures = 0;
            for t in 0..run.trials {
                let kind = sim::trial_state(t);
                let mut rng = sim::trial_rng(noise.seed, t);
                let (failed, violated) = blow_up_trial(&e, &dec, kind, &noise, &mut rng)?;
                failures += failed as u64;
                println!(
                    "trial {t} state {} violated stabilizers {} failure {failed}",
                    state_label(kind),
                    violated
                );
            }
            println!("logical failures: {failures}/{}", run.trials);
            Ok(())
        }
        JumpCmd::Roundtrip { run } => {
            let (c, e) = run.engine()?;
            let noise = run.noise()?;
            print_header("jump roundtrip", &c, noise.seed);
            let dec = e.inner_decoder()?;
            let slots = e.measurement_slots().len();
            let mut failures = 0;
            for t in 0..run.trials {
                let kind = sim::trial_state(t);
                let mut rng = sim::trial_rng(noise.seed, t);
                let s2 = e.encoded2(kind)?;
                let reference = e.reference(&e.encoded3(kind)?)?;
                let flips = inner_flips(&dec, &noise, &mut rng);
                let up = e.blow_up(&s2, &dec, &flips, &mut rng)?;
                let faults = Faults {
                    qubit_error: sim::sample_qubit_error(noise.p_qubit, e.split.n3(), &mut rng),
                    flips: sim::sample_measurement_noise(noise.q_meas, slots, &mut rng),
                };
                let down = e.collapse_with_faults(&up.state, &faults, &mut rng)?;
                let failed = e.logical_flips(&down.state, &reference)?.iter().any(|f| f.1);
                failures += failed as u64;
            }
            println!("logical failures: {failures}/{}", run.trials);
            Ok(())
        }
    }
}

fn inner_flips(dec: &dimjump_core::jump::SingleShotDecoder, noise: &NoiseSpec, rng: &mut rand_chacha::ChaCha8Rng) -> [BitVec; 2] {
    [
        sim::sample_measurement_noise(noise.q_meas, dec.num_gauge(), rng),
        sim::sample_measurement_noise(noise.q_meas, dec.num_gauge(), rng),
    ]
}

/// Blow-up of an encoded 2D state with inner qubit noise and gauge flips.
/// Returns (logical failure, violated 3D stabilizers).
fn blow_up_trial(
    e: &JumpEngine,
    dec: &dimjump_core::jump::SingleShotDecoder,
    kind: PauliKind,
    noise: &NoiseSpec,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<(bool, usize)> {
    let s2 = e.encoded2(kind)?;
    let reference = e.reference(&e.encoded3(kind)?)?;
    let flips = inner_flips(dec, noise, rng);
    let mut up = e.blow_up(&s2, dec, &flips, rng)?;
    let inner_err = sim::sample_qubit_error(noise.p_qubit, e.split.n_inner(), rng);
    up.state.apply(&inner_err.embed(e.split.n3(), &e.split.inner_vertices))?;
    let violated = e.violated_stabilizers3(&up.state)?.len();
    let now = e.reference(&up.state)?;
    let failed = reference
        .iter()
        .zip(now.iter())
        .any(|(a, b)| a.1 != dimjump_core::tableau::Expectation::Indeterminate && a.1 != b.1);
    Ok((failed, violated))
}

fn print_header(what: &str, c: &Colex, seed: u64) {
    println!("dimjump {VERSION} {what}");
    println!("colex: {} ({})", c.name, colex::hash(c));
    println!("seed: {seed}");
}

#[derive(Serialize)]
struct Meta<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    colex: &'a str,
    colex_hash: &'a str,
    seed: u64,
    config: &'a C,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    version: &'static str,
    command: &'a str,
    colex: &'a str,
    colex_hash: &'a str,
    facet: &'a str,
    mode: &'a str,
    p: f64,
    q: f64,
    seed: u64,
    trials: u64,
    failures: u64,
    rate: f64,
    ci_low: f64,
    ci_high: f64,
}

#[derive(Serialize)]
struct Summary<'a, C: Serialize> {
    #[serde(flatten)]
    meta: Meta<'a, C>,
    stats: &'a TrialStats,
    failure_rate: f64,
    wilson_3sigma: (f64, f64),
}

/// Z-score of the reported Wilson intervals.
const CI_Z: f64 = 3.0;

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_stats<C: Serialize>(
    out: &OutArgs,
    stem: &str,
    meta: Meta<'_, C>,
    facet: &str,
    mode: &str,
    noise: &NoiseSpec,
    stats: &TrialStats,
) -> Result<()> {
    let (lo, hi) = stats.wilson(CI_Z);
    let row = CsvRow {
        version: VERSION,
        command: meta.command,
        colex: meta.colex,
        colex_hash: meta.colex_hash,
        facet,
        mode,
        p: noise.p_qubit,
        q: noise.q_meas,
        seed: noise.seed,
        trials: stats.trials,
        failures: stats.failures(),
        rate: stats.failure_rate(),
        ci_low: lo,
        ci_high: hi,
    };
    let csv_path = out.out_dir.join(format!("{stem}.csv"));
    sim::write_csv(&csv_path, &[row])?;
    let json_path = out.out_dir.join(format!("{stem}.json"));
    sim::write_json(
        &json_path,
        &Summary {
            meta,
            stats,
            failure_rate: stats.failure_rate(),
            wilson_3sigma: (lo, hi),
        },
    )?;
    println!("wrote {}", csv_path.display());
    println!("wrote {}", json_path.display());
    Ok(())
}

fn print_stats(stats: &TrialStats) {
    let (lo, hi) = stats.wilson(CI_Z);
    println!("trials: {}", stats.trials);
    println!(
        "logical failures: {} (|0>: {}/{}, |+>: {}/{})",
        stats.failures(),
        stats.failures_by_state[0],
        stats.trials_by_state[0],
        stats.failures_by_state[1],
        stats.trials_by_state[1]
    );
    println!("failure rate: {:.6} [{lo:.6}, {hi:.6}]", stats.failure_rate());
    println!("max residual component: {}", stats.max_residual_component);
}

fn sim_cmd(cmd: SimCmd) -> Result<()> {
    match cmd {
        SimCmd::Collapse { run, out, exhaustive } => {
            let (c, e) = run.engine()?;
            let noise = run.noise()?;
            let hash = colex::hash(&c);
            print_header("simulate collapse", &c, noise.seed);
            prepare_out(&out.out_dir)?;
            #[derive(Serialize)]
            struct Config<'a> {
                run: &'a RunArgs,
                workers: usize,
                trace: bool,
                exhaustive: bool,
            }
            let config = Config {
                run: &run,
                workers: out.workers,
                trace: out.trace,
                exhaustive,
            };
            let meta = |command| Meta {
                tool: "dimjump",
                version: VERSION,
                command,
                colex: &c.name,
                colex_hash: &hash,
                seed: noise.seed,
                config: &config,
            };
            if exhaustive {
                let results = sim::exhaustive_single_faults(&e, out.workers)?;
                let failing: Vec<_> = results.iter().filter(|r| r.failure_probability > 0.0).collect();
                for r in &failing {
                    println!(
                        "failing fault: {} on |{}>: probability {:.3}, residual weight {}",
                        r.fault, r.state, r.failure_probability, r.max_residual_weight
                    );
                }
                println!("single faults: {} checked, {} with logical failures", results.len(), failing.len());
                #[derive(Serialize)]
                struct Doc<'a, M: Serialize> {
                    #[serde(flatten)]
                    meta: M,
                    results: &'a [sim::SingleFaultResult],
                }
                let path = out.out_dir.join("collapse-exhaustive.json");
                sim::write_json(
                    &path,
                    &Doc {
                        meta: meta("simulate collapse --exhaustive"),
                        results: &results,
                    },
                )?;
                println!("wrote {}", path.display());
                return Ok(());
            }
            let r = sim::run_collapse_trials(&e, &noise, run.trials, out.workers, out.trace)?;
            print_stats(&r.stats);
            write_stats(&out, "collapse", meta("simulate collapse"), &run.facet, "collapse", &noise, &r.stats)?;
            if out.trace {
                let path = out.out_dir.join("collapse.trace.jsonl");
                sim::write_trace(&path, &meta("simulate collapse"), &r.traces)?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        SimCmd::Singleshot { run, out, target } => {
            let (c, e) = run.engine()?;
            let noise = run.noise()?;
            let hash = colex::hash(&c);
            print_header("simulate singleshot", &c, noise.seed);
            prepare_out(&out.out_dir)?;
            let t = match target {
                Target::Tetra => SingleShotTarget::Tetrahedral,
                Target::Inner => SingleShotTarget::Inner,
            };
            #[derive(Serialize)]
            struct Config<'a> {
                run: &'a RunArgs,
                workers: usize,
                trace: bool,
                target: Target,
            }
            let config = Config {
                run: &run,
                workers: out.workers,
                trace: out.trace,
                target,
            };
            let meta = || Meta {
                tool: "dimjump",
                version: VERSION,
                command: "simulate singleshot",
                colex: &c.name,
                colex_hash: &hash,
                seed: noise.seed,
                config: &config,
            };
            let r = sim::run_single_shot_trials(&e, t, &noise, run.trials, out.workers, out.trace)?;
            print_stats(&r.stats);
            let stem = format!("singleshot-{t}");
            write_stats(&out, &stem, meta(), &run.facet, &t.to_string(), &noise, &r.stats)?;
            if out.trace {
                let path = out.out_dir.join(format!("{stem}.trace.jsonl"));
                sim::write_trace(&path, &meta(), &r.traces)?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        SimCmd::MeasureK {
            source,
            facet,
            pair,
            cap,
            out,
        } => {
            let c = source.load_valid()?;
            let e = JumpEngine::new(&c, parse_colors(&facet)?)?;
            let hash = colex::hash(&c);
            println!("dimjump {VERSION} simulate measure-k");
            println!("colex: {} ({hash})", c.name);
            let report = match &pair {
                Some(p) => sim::measure_k(&e, e.pair_index(parse_colors(p)?)?, cap)?,
                None => sim::measure_k_all(&e, cap)?,
            };
            println!("K_hat: {}", report.k_hat);
            println!("witness: support {} over |gamma| = {}", report.witness.0, report.witness.1);
            println!("closed flux configurations: {}", report.closed);
            prepare_out(&out.out_dir)?;
            #[derive(Serialize)]
            struct Config<'a> {
                facet: &'a str,
                pair: &'a Option<String>,
                cap: usize,
            }
            #[derive(Serialize)]
            struct Doc<'a, C: Serialize> {
                #[serde(flatten)]
                meta: Meta<'a, C>,
                report: &'a sim::KReport,
            }
            let path = out.out_dir.join("measure-k.json");
            sim::write_json(
                &path,
                &Doc {
                    meta: Meta {
                        tool: "dimjump",
                        version: VERSION,
                        command: "simulate measure-k",
                        colex: &c.name,
                        colex_hash: &hash,
                        seed: 0,
                        config: &Config {
                            facet: &facet,
                            pair: &pair,
                            cap,
                        },
                    },
                    report: &report,
                },
            )?;
            println!("wrote {}", path.display());
            Ok(())
        }
    }
}

#[derive(Serialize, serde::Deserialize)]
struct ScheduleHeader {
    tool: String,
    version: String,
    stack_size: usize,
    steps: usize,
    initial: Vec<usize>,
}

#[derive(Serialize, serde::Deserialize)]
struct RoundRecord {
    step: u64,
    round: u8,
    swaps: Vec<(usize, usize)>,
}

fn schedule_cmd(cmd: ScheduleCmd) -> Result<()> {
    match cmd {
        ScheduleCmd::Make {
            stack,
            sequence,
            internal_slots,
            out,
        } => {
            let seq = schedule::parse_sequence(&fs::read_to_string(&sequence)?)?;
            let sch = schedule::schedule(&seq, stack, internal_slots)?;
            let mut text = to_json(&ScheduleHeader {
                tool: "dimjump".into(),
                version: VERSION.into(),
                stack_size: sch.stack_size,
                steps: sch.steps.len(),
                initial: sch.initial.clone(),
            })?;
            text.push('\n');
            for st in &sch.steps {
                for (round, swaps) in [(1u8, &st.round1), (2u8, &st.round2)] {
                    text.push_str(&to_json(&RoundRecord {
                        step: st.step,
                        round,
                        swaps: swaps.clone(),
                    })?);
                    text.push('\n');
                }
            }
            match out {
                Some(path) => {
                    fs::write(&path, text)?;
                    eprintln!("wrote {} ({} steps)", path.display(), sch.steps.len());
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        ScheduleCmd::Verify { schedule: path, sequence } => {
            let seq = schedule::parse_sequence(&fs::read_to_string(&sequence)?)?;
            let sch = read_schedule(&fs::read_to_string(&path)?)?;
            match schedule::verify(&sch, &seq) {
                Ok(()) => {
                    println!("OK: {} steps, 2 swap rounds each", sch.steps.len());
                    Ok(())
                }
                Err(v) => Err(Error::Schedule(format!("step {}: {}", v.step, v.message))),
            }
        }
    }
}

fn read_schedule(text: &str) -> Result<SwapSchedule> {
    let bad = |e: serde_json::Error| Error::Format(format!("schedule file: {e}"));
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: ScheduleHeader = serde_json::from_str(lines.next().ok_or_else(|| Error::Format("empty schedule file".into()))?).map_err(bad)?;
    let mut steps: Vec<schedule::StepSwaps> = Vec::new();
    for line in lines {
        let r: RoundRecord = serde_json::from_str(line).map_err(bad)?;
        if r.round == 1 {
            steps.push(schedule::StepSwaps {
                step: r.step,
                round1: r.swaps,
                round2: Vec::new(),
            });
        } else if r.round == 2 {
            match steps.last_mut() {
                Some(st) if st.step == r.step => st.round2 = r.swaps,
                _ => return Err(Error::Format(format!("round 2 of step {} without round 1", r.step))),
            }
        } else {
            return Err(Error::Format(format!("step {}: unknown round {}", r.step, r.round)));
        }
    }
    if steps.len() != header.steps {
        return Err(Error::Format(format!("header announces {} steps, file has {}", header.steps, steps.len())));
    }
    Ok(SwapSchedule {
        stack_size: header.stack_size,
        initial: header.initial,
        steps,
    })
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string(v).map_err(|e| Error::Format(e.to_string()))
}
