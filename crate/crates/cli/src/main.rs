//! `cf`: orbits, exponents, complexity tables, fractals, certificates,
//! codings and renormalization from the command line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use sadic::algebraic::Alg;
use sadic::automaton::PrefixAutomaton;
use sadic::cf::{directive_sequence, Algorithm, OrbitRecord};
use sadic::combinatorics::complexity;
use sadic::fractal::{approximate, certified_tail, TailKind};
use sadic::interval::Interval;
use sadic::lyapunov::{pisot_report, uniform_simplex, Verdict};
use sadic::presets::Preset;
use sadic::render::{render, save, Overlay, RenderSpec};
use sadic::scalar::{parse_vector, OrbitScalar};
use sadic::seed::{certify_balls, seed_certificate, Ball, ComplexEmbedding, SeedVerdict};
use sadic::torus::{
    ambiguity_rate, exchange_identities, renormalization_figure, CodedStep, DirectiveCoder, SeedCoder, TorusTranslation,
};
use sadic::words::{fixed_point_word, parse_word, DirectiveSequence, Substitution, SubstitutionSet, Tail};
use sadic::worms::Worm;
use sadic::Error;

#[derive(Parser)]
#[command(name = "cf", version, about = "S-adic words, continued fraction algorithms and Rauzy fractals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Directive sequence of a direction, as JSON lines {k, substitution, x}.
    Orbit(OrbitArgs),
    /// Monte-Carlo Lyapunov exponents: CSV per trial and a JSON summary.
    Lyapunov(LyapunovArgs),
    /// Factor complexity table of a fixed point, as CSV.
    Complexity(ComplexityArgs),
    /// Rauzy fractal approximation, as PNG, PPM or CSV.
    Fractal(FractalArgs),
    /// Certifies bounding balls and the seed point of a periodic sequence.
    CertifySeed(CertifyArgs),
    /// Codes a torus orbit by the fractal pieces, as JSON lines {n, letter, certainty}.
    Code(CodeArgs),
    /// Induction and renormalization steps of the Cassaigne torus translation.
    Renormalize(RenormalizeArgs),
    /// Abelianized prefix automaton in DOT.
    Automaton(AutomatonArgs),
    /// Worm of a word, as CSV.
    Worm(WormArgs),
    /// Substitution set in JSON.
    Substitutions(SetArgs),
    /// Lists the builtin presets.
    Presets,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Sturmian,
    Cassaigne,
    Brun,
    ArnouxRauzy,
}

impl From<Algo> for Algorithm {
    fn from(a: Algo) -> Self {
        match a {
            Algo::Sturmian => Algorithm::Sturmian,
            Algo::Cassaigne => Algorithm::Cassaigne,
            Algo::Brun => Algorithm::Brun,
            Algo::ArnouxRauzy => Algorithm::ArnouxRauzy,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Interval,
    Float,
}

/// Where the directive sequence and the direction come from.
#[derive(Args, Clone)]
struct Source {
    /// Builtin preset name or path to a preset JSON file.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_enum)]
    algo: Option<Algo>,
    /// Direction, e.g. "3/10,1/5,1/2" or decimals.
    #[arg(long)]
    x: Option<String>,
    /// Substitution names, e.g. "c0c1".
    #[arg(long)]
    directive: Option<String>,
    /// Repeat the directive forever.
    #[arg(long)]
    periodic: bool,
    /// Substitution set JSON used to read `--directive`.
    #[arg(long)]
    substitutions: Option<PathBuf>,
}

#[derive(Args)]
struct OrbitArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
}

#[derive(Args)]
struct LyapunovArgs {
    #[arg(long, value_enum, default_value = "cassaigne")]
    algo: Algo,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 100_000)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the per-trial CSV here; the JSON summary then goes to stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ComplexityArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Prefix length; defaults to the preset value or 100000.
    #[arg(long)]
    len: Option<usize>,
    /// Which random directive of a seeded preset to use.
    #[arg(long, default_value_t = 0)]
    trial: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TailArg {
    Heuristic,
    Certified,
}

#[derive(Args)]
struct FractalArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    depth: Option<usize>,
    /// Output file; the extension selects PNG, PPM or CSV.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    width: Option<u32>,
    #[arg(long)]
    height: Option<u32>,
    #[arg(long, value_enum, default_value = "heuristic")]
    tail: TailArg,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, default_value = "cassaigne-c0c1")]
    preset: String,
    #[arg(long)]
    depth: Option<usize>,
    /// JSON array of balls {center, radius} replacing the preset's.
    #[arg(long)]
    balls: Option<PathBuf>,
    /// Multiplies every radius.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CodeArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Args)]
struct RenormalizeArgs {
    #[arg(long, default_value = "fig-renormalization")]
    preset: String,
    /// Direction overriding the preset's.
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    /// Directory for the figure and the JSON step reports.
    #[arg(long)]
    render: Option<PathBuf>,
    /// Side of one panel in pixels.
    #[arg(long)]
    panel: Option<u32>,
}

#[derive(Args)]
struct AutomatonArgs {
    #[arg(long, value_enum)]
    algo: Option<Algo>,
    #[arg(long)]
    substitutions: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WormArgs {
    /// The word, e.g. "0102010".
    #[arg(long)]
    word: Option<String>,
    /// Take the prefix of the fixed point of this source instead.
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 100)]
    len: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SetArgs {
    #[arg(long, value_enum)]
    algo: Algo,
}

/// A failed run: exit status and message.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 1, message: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Certification(_) | Error::Coverage(_) => 2,
            Error::Inconclusive { .. } => 3,
            Error::Domain { .. } | Error::NotGrowing(_) | Error::NotPrimitive => 4,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            // The reader went away; nothing left to report.
            return Failure { code: 0, message: String::new() };
        }
        Failure::usage(e.to_string())
    }
}

type Run = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> Run {
    match cmd {
        Command::Orbit(a) => orbit(a),
        Command::Lyapunov(a) => lyapunov(a),
        Command::Complexity(a) => complexity_table(a),
        Command::Fractal(a) => fractal(a),
        Command::CertifySeed(a) => certify(a),
        Command::Code(a) => code(a),
        Command::Renormalize(a) => renormalize(a),
        Command::Automaton(a) => automaton(a),
        Command::Worm(a) => worm(a),
        Command::Substitutions(a) => {
            say(Algorithm::from(a.algo).substitutions().to_json())?;
            Ok(0)
        }
        Command::Presets => {
            for name in Preset::names() {
                let p = Preset::builtin(name)?;
                say(json!({ "name": name, "algorithm": p.algorithm, "description": p.description }))?;
            }
            Ok(0)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn say(line: impl std::fmt::Display) -> Result<(), Failure> {
    writeln!(std::io::stdout().lock(), "{line}")?;
    Ok(())
}

fn json_line<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

/// Direction given as a keyword or values.
enum Direction {
    Rational(Vec<BigRational>),
    Algebraic(Vec<Alg>),
}

impl Direction {
    fn to_f64(&self) -> Vec<f64> {
        let v: Vec<f64> = match self {
            Direction::Rational(q) => q.iter().map(OrbitScalar::to_f64).collect(),
            Direction::Algebraic(a) => a.iter().map(Alg::to_f64).collect(),
        };
        let s: f64 = v.iter().sum();
        v.into_iter().map(|c| c / s).collect()
    }
}

/// Resolved source: algorithm, optional directive and optional direction.
struct Resolved {
    algorithm: Algorithm,
    preset: Option<Preset>,
    sequence: Option<DirectiveSequence>,
    direction: Option<Direction>,
}

fn resolve(src: &Source) -> Result<Resolved, Failure> {
    let preset = src.preset.as_deref().map(Preset::load).transpose()?;
    let algorithm = match (src.algo, &preset) {
        (Some(a), _) => a.into(),
        (None, Some(p)) => p.algorithm,
        (None, None) => return Err(Failure::usage("give --preset or --algo")),
    };
    let direction = match &src.x {
        Some(x) => Some(Direction::Rational(parse_vector(x)?)),
        None => match &preset {
            Some(p) if p.direction.is_some() => match p.direction_rational()? {
                Some(q) => Some(Direction::Rational(q)),
                None => p.direction_algebraic()?.map(Direction::Algebraic),
            },
            _ => None,
        },
    };
    let sequence = match &src.directive {
        Some(d) => {
            let set = match &src.substitutions {
                Some(path) => SubstitutionSet::from_json(&std::fs::read_to_string(path)?)?,
                None => algorithm.substitutions(),
            };
            Some(DirectiveSequence::parse(Arc::new(set), d, src.periodic)?)
        }
        None => match &preset {
            Some(p) if p.directive.is_some() => Some(p.sequence()?),
            _ => None,
        },
    };
    Ok(Resolved { algorithm, preset, sequence, direction })
}

impl Resolved {
    /// The directive sequence, read off the direction's orbit when none was given.
    fn sequence_for(&self, steps: usize) -> Result<DirectiveSequence, Failure> {
        if let Some(s) = &self.sequence {
            // A finite directive that is too short yields to the direction's orbit.
            if s.known_len().is_none_or(|l| l >= steps) || self.direction.is_none() {
                return Ok(s.clone());
            }
        }
        let rec_seq = match self.direction.as_ref().ok_or_else(|| Failure::usage("give --directive or --x"))? {
            Direction::Rational(q) => orbit_sequence(directive_sequence(self.algorithm, q.clone(), steps)?, steps)?,
            Direction::Algebraic(a) => orbit_sequence(directive_sequence(self.algorithm, a.clone(), steps)?, steps)?,
        };
        Ok(rec_seq)
    }

    fn direction_f64(&self) -> Result<Vec<f64>, Failure> {
        Ok(self.direction.as_ref().ok_or_else(|| Failure::usage("this command needs a direction (--x)"))?.to_f64())
    }
}

fn orbit_sequence<T: OrbitScalar>(rec: OrbitRecord<T>, steps: usize) -> Result<DirectiveSequence, Failure> {
    if rec.period.is_none() && rec.len() < steps {
        let exit = rec.exit.as_ref().map(|e| e.reason.clone()).unwrap_or_default();
        return Err(Failure { code: 4, message: format!("orbit stopped after {} steps: {exit}", rec.len()) });
    }
    Ok(rec.directive())
}

fn orbit(a: OrbitArgs) -> Run {
    let r = resolve(&a.source)?;
    let dir = r.direction.as_ref().ok_or_else(|| Failure::usage("orbit needs --x or a preset with a direction"))?;
    let mut out = std::io::stdout().lock();
    let exit = match (dir, a.mode) {
        (Direction::Rational(q), Mode::Exact) => {
            write_orbit(&mut out, &directive_sequence(r.algorithm, q.clone(), a.steps)?, |x| json!(x.to_string()))?
        }
        (Direction::Rational(q), Mode::Interval) => {
            let x: Vec<Interval> = q.iter().map(Interval::from_rational).collect();
            write_orbit(&mut out, &directive_sequence(r.algorithm, x, a.steps)?, |x| json!([x.lo, x.hi]))?
        }
        (Direction::Algebraic(v), Mode::Exact) => {
            write_orbit(&mut out, &directive_sequence(r.algorithm, v.clone(), a.steps)?, |x| {
                let i = x.to_interval();
                json!([i.lo, i.hi])
            })?
        }
        (Direction::Algebraic(v), Mode::Interval) => {
            let x: Vec<Interval> = v.iter().map(Alg::to_interval).collect();
            write_orbit(&mut out, &directive_sequence(r.algorithm, x, a.steps)?, |x| json!([x.lo, x.hi]))?
        }
        (d, Mode::Float) => write_orbit(&mut out, &directive_sequence(r.algorithm, d.to_f64(), a.steps)?, |x| json!(x))?,
    };
    Ok(exit)
}

fn write_orbit<T: OrbitScalar>(out: &mut impl Write, rec: &OrbitRecord<T>, fmt: impl Fn(&T) -> Value) -> Run {
    let names = rec.names();
    for (k, name) in names.iter().enumerate() {
        let x: Vec<Value> = rec.directions[k].iter().map(&fmt).collect();
        let mut line = json!({ "k": k, "substitution": name, "x": x });
        // A boundary tie was broken by convention; downstream results depend on it.
        if rec.ties.contains(&k) {
            line["tie"] = json!(true);
        }
        writeln!(out, "{line}")?;
    }
    match &rec.exit {
        None => Ok(0),
        Some(e) => {
            eprintln!("orbit stopped at step {}: {}", e.step, e.reason);
            Ok(if e.inconclusive { 3 } else { 4 })
        }
    }
}

fn lyapunov(a: LyapunovArgs) -> Run {
    let alg: Algorithm = a.algo.into();
    let dim = alg.alphabet_size();
    let report = pisot_report(alg, |r| uniform_simplex(r, dim), a.trials, a.steps, a.seed);
    let summary = json!({
        "algorithm": report.algorithm,
        "trials": report.trials.len(),
        "steps": a.steps,
        "seed": a.seed,
        "skipped": report.skipped,
        "theta1_mean": report.theta1_mean,
        "theta1_std": report.theta1_std,
        "theta2_mean": report.theta2_mean,
        "theta2_std": report.theta2_std,
        "verdict": report.verdict,
        "note": report.note,
    });
    match &a.csv {
        Some(path) => {
            std::fs::write(path, report.to_csv())?;
            say(&summary)?;
        }
        None => {
            emit(None, &report.to_csv())?;
            eprintln!("{summary}");
        }
    }
    Ok(if report.verdict == Verdict::InsufficientData { 3 } else { 0 })
}

fn complexity_table(a: ComplexityArgs) -> Run {
    let r = resolve(&a.source)?;
    let len = a.len.or(r.preset.as_ref().and_then(|p| p.prefix_length)).unwrap_or(100_000);
    let seq = match &r.preset {
        Some(p) if p.rng_seed.is_some() && r.sequence.is_none() => {
            let all = p.random_directives(400)?;
            all.get(a.trial)
                .cloned()
                .ok_or_else(|| Failure::usage(format!("trial {} out of {}", a.trial, all.len())))?
        }
        _ => r.sequence_for(400)?,
    };
    let word = fixed_point_word(&seq, len, 0)?;
    let table = complexity(&word, a.n);
    if table.short_prefix {
        eprintln!("warning: prefix of length {} is short for n = {}", word.len(), a.n);
    }
    emit(a.out.as_deref(), &table.to_csv())?;
    Ok(0)
}

/// Periodic sequence, its period substitution and the bounding balls of a preset.
fn periodic_setup(p: &Preset) -> Result<(DirectiveSequence, Substitution), Failure> {
    let seq = p.sequence()?;
    let Tail::Periodic(period) = seq.tail() else {
        return Err(Failure::usage(format!("preset {} is not periodic", p.name)));
    };
    let sigma = period
        .iter()
        .map(|&id| seq.set().get(id).clone())
        .reduce(|a, b| a.compose(&b))
        .ok_or_else(|| Failure::usage("empty period"))?;
    Ok((seq, sigma))
}

fn period_automaton(sigma: &Substitution) -> Result<PrefixAutomaton, Failure> {
    Ok(PrefixAutomaton::build(Arc::new(SubstitutionSet::new(sigma.name(), vec![sigma.clone()])?)))
}

fn fractal(a: FractalArgs) -> Run {
    let r = resolve(&a.source)?;
    let depth = a.depth.or(r.preset.as_ref().and_then(|p| p.depth)).unwrap_or(16);
    let seq = r.sequence_for(depth + 16)?;
    let v = r.direction_f64()?;
    let mut f = approximate(&seq, &v, depth)?;
    if let TailArg::Certified = a.tail {
        let p = r.preset.as_ref().ok_or_else(|| Failure::usage("a certified tail needs a preset with balls"))?;
        let balls = p.balls.clone().ok_or_else(|| Failure::usage("preset has no balls"))?;
        let (_, sigma) = periodic_setup(p)?;
        let emb = ComplexEmbedding::new(sigma.matrix())?;
        let cert = certify_balls(&emb, &period_automaton(&sigma)?, 0, &balls, p.depth.unwrap_or(8))?;
        if !cert.is_certified() {
            return Err(Failure { code: 2, message: "bounding balls are not certified".into() });
        }
        // The approximation counts algorithm steps; the balls count periods.
        let period = match seq.tail() {
            Tail::Periodic(p) => p.len(),
            Tail::Unknown => 1,
        };
        f = f.with_tail(certified_tail(&emb, &balls, depth / period), TailKind::Certified);
    }
    let ext = a.out.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    if ext.as_deref() == Some("csv") {
        std::fs::write(&a.out, f.to_csv())?;
    } else {
        let raster = r.preset.as_ref().and_then(|p| p.raster);
        let spec = RenderSpec {
            width: a.width.or(raster.map(|r| r.width)).unwrap_or(512),
            height: a.height.or(raster.map(|r| r.height)).unwrap_or(512),
            ..RenderSpec::default()
        };
        let img = render(&f.planar(), &spec, &Overlay::default())?;
        save(&img, &a.out)?;
    }
    say(json!({
            "out": a.out,
            "depth": depth,
            "points": f.len(),
            "counts": f.counts(),
            "downsampled": f.downsampled,
            "tail_radius": f.tail_radius,
            "tail_kind": f.tail_kind,
    }))?;
    Ok(0)
}

fn certify(a: CertifyArgs) -> Run {
    let p = Preset::load(&a.preset)?;
    let (_, sigma) = periodic_setup(&p)?;
    let balls: Vec<Ball> = match &a.balls {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?).map_err(Error::from)?,
        None => p.balls.clone().ok_or_else(|| Failure::usage("preset has no balls; pass --balls"))?,
    };
    let balls: Vec<Ball> = balls.iter().map(|b| b.scaled(a.scale)).collect();
    let depth = a.depth.or(p.depth).unwrap_or(8);
    let emb = ComplexEmbedding::new(sigma.matrix())?;
    let cert = certify_balls(&emb, &period_automaton(&sigma)?, 0, &balls, depth)?;
    let rep = seed_certificate(&emb, &cert, p.seed_letter.unwrap_or(0), a.threshold.or(p.threshold).unwrap_or(1.5));
    let text = serde_json::to_string_pretty(&rep).expect("serializable");
    match &a.out {
        Some(path) => {
            std::fs::write(path, &text)?;
            say(json!({ "verdict": rep.verdict, "margin": rep.margin, "out": path }))?;
        }
        None => say(&text)?,
    }
    if let Some(why) = &rep.reason {
        eprintln!("{why}");
    }
    Ok(match rep.verdict {
        SeedVerdict::Certified => 0,
        SeedVerdict::Failed => 2,
        SeedVerdict::Inconclusive => 3,
    })
}

fn code(a: CodeArgs) -> Run {
    let r = resolve(&a.source)?;
    let steps = a.steps.or(r.preset.as_ref().and_then(|p| p.steps)).unwrap_or(1000);
    let coded: Vec<CodedStep> = match (&r.preset, &r.direction, a.source.x.is_none()) {
        // A periodic preset with bounding balls: exact orbit, disk refinement.
        (Some(p), Some(Direction::Algebraic(v)), true) if p.balls.is_some() => {
            let depth = a.depth.or(p.coder_depth).unwrap_or(30);
            let (seq, sigma) = periodic_setup(p)?;
            let emb = ComplexEmbedding::new(sigma.matrix())?;
            let aut = period_automaton(&sigma)?;
            let u = fixed_point_word(&seq, steps + 1, p.seed_letter.unwrap_or(0))?;
            let (_, orbit) = exchange_identities(&u, v, steps)?;
            let pts: Vec<Vec<f64>> = orbit[..steps].iter().map(|q| q.iter().map(Alg::to_f64).collect()).collect();
            let coder = SeedCoder::new(&emb, &aut, 0, p.balls.as_ref().expect("checked"), depth);
            coder.code_orbit(&pts)?
        }
        _ => {
            let depth = a.depth.unwrap_or(60);
            let v = r.direction_f64()?;
            let seq = r.sequence_for(depth + 16)?;
            let t = TorusTranslation::new(&v)?;
            DirectiveCoder::new(&seq, &v, depth)?.code_orbit(&t.orbit(&vec![0.0; v.len() - 1], steps))?
        }
    };
    let mut out = std::io::stdout().lock();
    for s in &coded {
        writeln!(out, "{}", json_line(s))?;
    }
    eprintln!("{}", json!({ "steps": coded.len(), "ambiguity_rate": ambiguity_rate(&coded) }));
    Ok(0)
}

fn renormalize(a: RenormalizeArgs) -> Run {
    let p = Preset::load(&a.preset)?;
    if p.algorithm != Algorithm::Cassaigne {
        return Err(Failure::usage("renormalization is implemented for the Cassaigne algorithm"));
    }
    let steps = a.steps.or(p.steps).unwrap_or(2);
    let depth = a.depth.or(p.depth).unwrap_or(24);
    let exact = match &a.x {
        Some(x) => parse_vector(x)?,
        None => p.direction_rational()?.ok_or_else(|| Failure::usage("preset has no rational direction"))?,
    };
    let seq = orbit_sequence(directive_sequence(Algorithm::Cassaigne, exact.clone(), depth + steps + 16)?, depth + steps)?;
    let v = Direction::Rational(exact).to_f64();
    let panel = a.panel.or(p.raster.map(|r| r.width)).unwrap_or(200);
    let (reports, img) = renormalization_figure(&seq, &v, depth, steps, panel)?;
    let mut out = std::io::stdout().lock();
    for r in &reports {
        writeln!(out, "{}", json_line(r))?;
    }
    if let Some(dir) = &a.render {
        std::fs::create_dir_all(dir)?;
        save(&img, &dir.join("renormalization.png"))?;
        std::fs::write(dir.join("steps.json"), serde_json::to_string_pretty(&reports).expect("serializable"))?;
    }
    let bad = reports.iter().position(|r| r.det_error() > 1e-10 || !r.cloud_match);
    Ok(match bad {
        Some(i) => {
            eprintln!("step {i}: determinant identity or cloud match fails");
            2
        }
        None => 0,
    })
}

fn automaton(a: AutomatonArgs) -> Run {
    let set = match (&a.substitutions, a.algo) {
        (Some(path), _) => SubstitutionSet::from_json(&std::fs::read_to_string(path)?)?,
        (None, Some(alg)) => Algorithm::from(alg).substitutions(),
        (None, None) => return Err(Failure::usage("give --algo or --substitutions")),
    };
    emit(a.out.as_deref(), &PrefixAutomaton::build(Arc::new(set)).to_dot())?;
    Ok(0)
}

fn worm(a: WormArgs) -> Run {
    let (word, size) = match &a.word {
        Some(w) => {
            let w = parse_word(w)?;
            let size = w.iter().map(|&c| c as usize + 1).max().unwrap_or(1).max(2);
            (w, size)
        }
        None => {
            let r = resolve(&a.source)?;
            let seq = r.sequence_for(64)?;
            (fixed_point_word(&seq, a.len, 0)?, seq.alphabet_size())
        }
    };
    emit(a.out.as_deref(), &Worm::new(&word, size).to_csv())?;
    Ok(0)
}
