//! Argument parsing and command execution.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use indexmap::IndexMap;
use obsrel_core::channel::{
    verify_broadcasts, verify_measures, verify_nondisturbing, verify_one_side_broadcast, verify_probes,
};
use obsrel_core::joint::{noisy_joint, self_joint};
use obsrel_core::povm::common_eigenbasis;
use obsrel_core::relations::{
    check_compatibility, classify_general_pair, classify_qubit_pair, incompatibility_robustness, validate_joint,
    RelationOptions,
};
use obsrel_core::{
    tol, Certificate, Channel, CheckReport, HierarchyReport, Instrument, JointObservable, Povm,
    ProbabilityDistribution, Relation, SolverOptions, Status, Verdict,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::document::Document;
use crate::error::CliError;
use crate::exit;
use crate::report::{self, number, Report};

#[derive(Debug, Parser)]
#[command(name = "obsrel", version, about = "Decide and certify how pairs of quantum observables can be measured together")]
pub struct Cli {
    /// Tolerance for certificate identities.
    #[arg(long, global = true, value_name = "TOL")]
    pub tol: Option<f64>,
    /// Seed for randomized diagonalization.
    #[arg(long, global = true, env = "OBSREL_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Solver iteration cap.
    #[arg(long, global = true, value_name = "N")]
    pub max_iter: Option<usize>,
    /// Solver residual band: above it, a plateau means infeasible.
    #[arg(long, global = true, value_name = "R")]
    pub band: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Write certificates and constructed documents into this directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub cert_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a document and report its invariants.
    Validate { file: PathBuf },
    /// Decide one relation for a pair of observables.
    Check { relation: RelationArg, a: PathBuf, b: PathBuf },
    /// Decide the whole hierarchy for a pair, or for every pair in a directory.
    Classify(ClassifyArgs),
    /// Largest mixing weight at which a noisy pair stays compatible.
    Robustness(RobustnessArgs),
    /// Build a certificate document.
    #[command(subcommand)]
    Construct(Construct),
    /// Check a certificate document against observables.
    #[command(subcommand)]
    Verify(Verify),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RelationArg {
    Compatible,
    Nondisturbing,
    MutuallyNondisturbing,
    OneSideBroadcastable,
    Broadcastable,
}

impl From<RelationArg> for Relation {
    fn from(r: RelationArg) -> Self {
        match r {
            RelationArg::Compatible => Relation::Compatible,
            RelationArg::Nondisturbing => Relation::Nondisturbing,
            RelationArg::MutuallyNondisturbing => Relation::MutuallyNondisturbing,
            RelationArg::OneSideBroadcastable => Relation::OneSideBroadcastable,
            RelationArg::Broadcastable => Relation::Broadcastable,
        }
    }
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Require two-dimensional observables and use the exact qubit classifier.
    #[arg(long)]
    pub qubit: bool,
    /// Classify every same-dimension pair of observables in this directory.
    #[arg(long, value_name = "DIR", conflicts_with_all = ["a", "b"])]
    pub batch: Option<PathBuf>,
    #[arg(required_unless_present = "batch")]
    pub a: Option<PathBuf>,
    #[arg(required_unless_present = "batch")]
    pub b: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RobustnessArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Width of the final bracket.
    #[arg(long, default_value_t = 1e-3)]
    pub precision: f64,
    /// Trivial observable mixed into A (default: uniform).
    #[arg(long, value_name = "FILE")]
    pub t1: Option<PathBuf>,
    /// Trivial observable mixed into B (default: uniform).
    #[arg(long, value_name = "FILE")]
    pub t2: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Construct {
    /// Joint `J(x, y) = δ_xy A(x)` of an observable with itself.
    SelfJoint { a: PathBuf },
    /// Joint of the half-noisy pair.
    NoisyJoint {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_name = "FILE")]
        t1: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        t2: Option<PathBuf>,
    },
    /// Broadcast channel of commuting commutative observables.
    DiagonalBroadcast {
        #[arg(required = true)]
        observables: Vec<PathBuf>,
    },
    /// Channel, probes and marginals built from a joint observable.
    JointChannel { joint: PathBuf },
    /// Lüders instrument `ρ ↦ √A(x) ρ √A(x)`.
    Luders { a: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    /// The channel broadcasts A (and B).
    Broadcast { channel: PathBuf, a: PathBuf, b: Option<PathBuf> },
    /// The channel broadcasts A to the first output and B to the second.
    OneSide {
        channel: PathBuf,
        a: PathBuf,
        b: PathBuf,
        /// Observable read on the first output instead of A.
        #[arg(long, value_name = "FILE", requires = "probe_b")]
        probe_a: Option<PathBuf>,
        /// Observable read on the second output instead of B.
        #[arg(long, value_name = "FILE", requires = "probe_a")]
        probe_b: Option<PathBuf>,
    },
    /// The instrument measures MEASURED without disturbing OTHER.
    Nondisturb { instrument: PathBuf, measured: PathBuf, other: PathBuf },
    /// The joint observable has A and B as marginals.
    Joint { joint: PathBuf, a: PathBuf, b: PathBuf },
}

/// A finished command: the report, its exit code, and the documents to
/// write when `--cert-dir` is given (relative path, document).
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub code: i32,
    pub documents: Vec<(String, Document)>,
}

/// Parses `args` (program name first), runs the command, writes its output
/// and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let echo = command_echo(args.get(1..).unwrap_or_default());
    match execute(&cli, echo).and_then(|o| emit(&cli, &o).map(|()| o.code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("obsrel: error: {e}");
            exit::USAGE
        }
    }
}

/// Arguments as given, minus the output locations, which do not affect the
/// result.
fn command_echo(args: &[OsString]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args {
        let s = a.to_string_lossy().into_owned();
        if skip {
            skip = false;
            continue;
        }
        if s == "--out" || s == "--cert-dir" {
            skip = true;
            continue;
        }
        if s.starts_with("--out=") || s.starts_with("--cert-dir=") {
            continue;
        }
        out.push(s);
    }
    out
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<(), CliError> {
    if let Some(dir) = &cli.cert_dir {
        for (name, doc) in &outcome.documents {
            let path = dir.join(format!("{name}.json"));
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
            }
            fs::write(&path, doc.to_json() + "\n").map_err(|e| io_error(&path, e))?;
        }
    }
    let text = outcome.report.to_json();
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Runs the parsed command without touching stdout or the filesystem
/// beyond reading inputs.
pub fn execute(cli: &Cli, echo: Vec<String>) -> Result<Outcome, CliError> {
    let opts = relation_options(cli)?;
    let (result, code, documents) = match &cli.command {
        Command::Validate { file } => (validate(file)?, exit::HOLDS, Vec::new()),
        Command::Check { relation, a, b } => check((*relation).into(), a, b, &opts, cli.seed)?,
        Command::Classify(args) => classify(args, &opts, cli.seed)?,
        Command::Robustness(args) => robustness(args, &opts)?,
        Command::Construct(c) => construct(c, &opts, cli.seed)?,
        Command::Verify(v) => verify(v, opts.cert_tol)?,
    };
    Ok(Outcome {
        report: Report::new(echo, cli.seed, result),
        code,
        documents,
    })
}

type Executed = (Value, i32, Vec<(String, Document)>);

fn relation_options(cli: &Cli) -> Result<RelationOptions, CliError> {
    let defaults = SolverOptions::default();
    let cert_tol = cli.tol.unwrap_or(tol::CERT);
    if !(cert_tol.is_finite() && cert_tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive and finite, got {cert_tol}")));
    }
    let solver = SolverOptions {
        max_iter: cli.max_iter.unwrap_or(defaults.max_iter),
        band_upper: cli.band.unwrap_or(defaults.band_upper),
        seed: cli.seed,
        ..defaults
    };
    solver.validate()?;
    Ok(RelationOptions { cert_tol, solver })
}

fn load(path: &Path) -> Result<Document, CliError> {
    Document::read(path)
}

fn load_povm(path: &Path) -> Result<Povm, CliError> {
    load(path)?.to_povm().map_err(|e| e.in_file(path))
}

fn load_channel(path: &Path) -> Result<Channel, CliError> {
    load(path)?.to_channel().map_err(|e| e.in_file(path))
}

fn load_instrument(path: &Path) -> Result<Instrument, CliError> {
    load(path)?.to_instrument().map_err(|e| e.in_file(path))
}

fn load_joint(path: &Path) -> Result<JointObservable, CliError> {
    load(path)?.to_joint().map_err(|e| e.in_file(path))
}

fn load_pair(a: &Path, b: &Path) -> Result<(Povm, Povm), CliError> {
    let (pa, pb) = (load_povm(a)?, load_povm(b)?);
    if pa.dim() != pb.dim() {
        return Err(CliError::Invalid(format!(
            "{} is {}-dimensional but {} is {}-dimensional",
            a.display(),
            pa.dim(),
            b.display(),
            pb.dim()
        )));
    }
    Ok((pa, pb))
}

/// The distribution of a trivial observable file, or the uniform one on
/// `labels`.
fn noise(path: Option<&PathBuf>, labels: &[String]) -> Result<ProbabilityDistribution, CliError> {
    let Some(path) = path else {
        return Ok(ProbabilityDistribution::uniform(labels));
    };
    let p = load_povm(path)?;
    let t = p.is_trivial();
    t.distribution.ok_or_else(|| {
        CliError::Invalid(format!(
            "{}: observable is not trivial (deviation {:e})",
            path.display(),
            t.max_deviation
        ))
    })
}

fn distribution_json(t: &ProbabilityDistribution) -> Value {
    let map: IndexMap<&str, f64> = t.labels().iter().map(String::as_str).zip(t.weights().iter().copied()).collect();
    json!(map)
}

fn shown(path: &Path) -> String {
    path.display().to_string()
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Holds => exit::HOLDS,
        Status::Fails => exit::FAILS,
        Status::Indeterminate => exit::INDETERMINATE,
    }
}

fn check_code(c: &CheckReport) -> i32 {
    if c.passed {
        exit::HOLDS
    } else {
        exit::FAILS
    }
}

/// Certificate documents of a verdict, named after the relation.
fn certificate_documents(v: &Verdict, prefix: &str) -> Vec<(String, Document)> {
    let name = format!("{prefix}{}", v.relation.as_str());
    if v.status != Status::Holds {
        return Vec::new();
    }
    match &v.certificate {
        Some(Certificate::Joint(j)) => vec![(name, Document::from(j))],
        Some(Certificate::Channel(c)) => vec![(name, Document::from(c))],
        Some(Certificate::Instrument { instrument, .. }) => vec![(name, Document::from(instrument))],
        Some(Certificate::InstrumentPair { measure_a, measure_b }) => vec![
            (format!("{name}.measure_a"), Document::from(measure_a)),
            (format!("{name}.measure_b"), Document::from(measure_b)),
        ],
        Some(Certificate::Reason(_)) | None => Vec::new(),
    }
}

fn validate(path: &Path) -> Result<Value, CliError> {
    let doc = load(path)?;
    let located = |e: CliError| e.in_file(path);
    Ok(match &doc {
        Document::Povm(_) => {
            let p = doc.to_povm().map_err(located)?;
            let v = p.validate();
            let c = p.is_commutative();
            let t = p.is_trivial();
            let ic = p.is_informationally_complete();
            json!({
                "file": shown(path),
                "kind": "povm",
                "dim": p.dim(),
                "outcomes": p.outcomes(),
                "valid": v.passed,
                "min_eigenvalue": number(v.min_eigenvalue),
                "normalization_residual": number(v.normalization_residual),
                "hermiticity_residual": number(v.hermiticity_residual),
                "commutative": {
                    "holds": c.commuting,
                    "max_commutator": number(c.max_commutator),
                    "near_boundary": c.near_boundary(),
                },
                "trivial": {
                    "holds": t.trivial,
                    "max_deviation": number(t.max_deviation),
                    "distribution": t.distribution.as_ref().map(distribution_json),
                },
                "informationally_complete": {
                    "holds": ic.complete,
                    "span_dim": ic.span_dim,
                    "required": ic.required,
                    "borderline": ic.borderline,
                },
            })
        }
        Document::Channel(_) => {
            let c = doc.to_channel().map_err(located)?;
            json!({
                "file": shown(path),
                "kind": "channel",
                "valid": true,
                "in_dim": c.in_dim(),
                "out_factors": c.out_factors(),
                "kraus_operators": c.kraus().len(),
                "trace_preservation_residual": number(c.trace_preservation_residual()),
            })
        }
        Document::Instrument(_) => {
            let i = doc.to_instrument().map_err(located)?;
            json!({
                "file": shown(path),
                "kind": "instrument",
                "valid": true,
                "dim": i.dim(),
                "out_dim": i.out_dim(),
                "outcomes": i.outcomes(),
                "trace_preservation_residual": number(i.trace_preservation_residual()),
            })
        }
        Document::Joint(_) => {
            let j = doc.to_joint().map_err(located)?;
            let (min_eig, norm) = j.observable_residuals()?;
            json!({
                "file": shown(path),
                "kind": "joint",
                "valid": true,
                "dim": j.dim(),
                "a_outcomes": j.a_outcomes(),
                "b_outcomes": j.b_outcomes(),
                "min_eigenvalue": number(min_eig),
                "normalization_residual": number(norm),
            })
        }
    })
}

type Classified = Result<(HierarchyReport, &'static str), CliError>;

fn classify_pair(
    a: &Povm,
    b: &Povm,
    force_qubit: bool,
    opts: &RelationOptions,
    seed: u64,
) -> Classified {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if a.dim() == 2 {
        Ok((classify_qubit_pair(a, b, opts, &mut rng)?, "qubit"))
    } else if force_qubit {
        Err(CliError::Usage(format!("--qubit needs two-dimensional observables, found dimension {}", a.dim())))
    } else {
        Ok((classify_general_pair(a, b, opts, &mut rng)?, "general"))
    }
}

fn check(relation: Relation, a_path: &Path, b_path: &Path, opts: &RelationOptions, seed: u64) -> Result<Executed, CliError> {
    let (a, b) = load_pair(a_path, b_path)?;
    let verdict = if relation == Relation::Compatible {
        check_compatibility(&a, &b, opts)?
    } else {
        classify_pair(&a, &b, false, opts, seed)?.0.verdict(relation).clone()
    };
    let result = json!({
        "a": shown(a_path),
        "b": shown(b_path),
        "dim": a.dim(),
        "verdict": report::verdict_json(&verdict),
    });
    Ok((result, status_code(verdict.status), certificate_documents(&verdict, "")))
}

fn hierarchy_code(r: &HierarchyReport) -> i32 {
    if r.verdicts.iter().any(|v| v.status == Status::Indeterminate) {
        exit::INDETERMINATE
    } else {
        exit::HOLDS
    }
}

fn hierarchy_documents(r: &HierarchyReport, prefix: &str) -> Vec<(String, Document)> {
    r.verdicts.iter().flat_map(|v| certificate_documents(v, prefix)).collect()
}

fn classify(args: &ClassifyArgs, opts: &RelationOptions, seed: u64) -> Result<Executed, CliError> {
    if let Some(dir) = &args.batch {
        return classify_batch(dir, args.qubit, opts, seed);
    }
    let (a_path, b_path) = match (&args.a, &args.b) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(CliError::Usage("classify needs two observables or --batch".into())),
    };
    let (a, b) = load_pair(a_path, b_path)?;
    let (report, classifier) = classify_pair(&a, &b, args.qubit, opts, seed)?;
    let mut result = report::hierarchy_json(&report, classifier);
    result["a"] = json!(shown(a_path));
    result["b"] = json!(shown(b_path));
    Ok((result, hierarchy_code(&report), hierarchy_documents(&report, "")))
}

fn classify_batch(dir: &Path, force_qubit: bool, opts: &RelationOptions, seed: u64) -> Result<Executed, CliError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_error(dir, e))?
        .map(|entry| entry.map(|e| e.path()).map_err(|e| io_error(dir, e)))
        .collect::<Result<_, _>>()?;
    paths.retain(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"));
    paths.sort();

    let mut named = Vec::new();
    let mut skipped = Vec::new();
    for path in &paths {
        let doc = load(path)?;
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        if matches!(doc, Document::Povm(_)) {
            named.push((stem, doc.to_povm().map_err(|e| e.in_file(path))?));
        } else {
            skipped.push(json!({ "name": stem, "kind": doc.kind() }));
        }
    }

    let mut pairs = Vec::new();
    for i in 0..named.len() {
        for j in i..named.len() {
            let qubit_ok = !force_qubit || named[i].1.dim() == 2;
            if named[i].1.dim() == named[j].1.dim() && qubit_ok {
                pairs.push((i, j));
            }
        }
    }

    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).clamp(1, pairs.len().max(1));
    let mut results: Vec<(usize, Classified)> = std::thread::scope(|s| {
        let workers: Vec<_> = (0..threads)
            .map(|t| {
                let (pairs, named) = (&pairs, &named);
                s.spawn(move || {
                    pairs
                        .iter()
                        .enumerate()
                        .skip(t)
                        .step_by(threads)
                        .map(|(k, &(i, j))| {
                            let pair_seed = seed.wrapping_add(k as u64);
                            (k, classify_pair(&named[i].1, &named[j].1, force_qubit, opts, pair_seed))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        workers.into_iter().flat_map(|w| w.join().expect("classification worker panicked")).collect()
    });
    results.sort_by_key(|(k, _)| *k);

    let mut entries = Vec::new();
    let mut documents = Vec::new();
    let mut code = exit::HOLDS;
    for (k, res) in results {
        let (i, j) = pairs[k];
        let (report, classifier) = res?;
        let (na, nb) = (&named[i].0, &named[j].0);
        if hierarchy_code(&report) == exit::INDETERMINATE {
            code = exit::INDETERMINATE;
        }
        documents.extend(hierarchy_documents(&report, &format!("{na}__{nb}/")));
        let mut entry = report::hierarchy_json(&report, classifier);
        entry["a"] = json!(na);
        entry["b"] = json!(nb);
        entry["seed"] = json!(seed.wrapping_add(k as u64));
        entries.push(entry);
    }
    let result = json!({
        "directory": shown(dir),
        "observables": named.iter().map(|(n, _)| n).collect::<Vec<_>>(),
        "skipped": skipped,
        "pairs": entries,
    });
    Ok((result, code, documents))
}

fn robustness(args: &RobustnessArgs, opts: &RelationOptions) -> Result<Executed, CliError> {
    let (a, b) = load_pair(&args.a, &args.b)?;
    let t1 = noise(args.t1.as_ref(), a.outcomes())?;
    let t2 = noise(args.t2.as_ref(), b.outcomes())?;
    let r = incompatibility_robustness(&a, &b, &t1, &t2, args.precision, opts)?;
    let result = json!({
        "a": shown(&args.a),
        "b": shown(&args.b),
        "t1": distribution_json(&t1),
        "t2": distribution_json(&t2),
        "robustness": report::robustness_json(&r, args.precision),
    });
    Ok((result, exit::HOLDS, Vec::new()))
}

fn construct(c: &Construct, opts: &RelationOptions, seed: u64) -> Result<Executed, CliError> {
    let tol = opts.cert_tol;
    let mut checks: Vec<(String, CheckReport)> = Vec::new();
    let (name, documents): (&str, Vec<(String, Document)>) = match c {
        Construct::SelfJoint { a } => {
            let a = load_povm(a)?;
            let j = self_joint(&a);
            checks.push(("marginals".into(), validate_joint(&j, &a, &a, tol)?));
            ("self-joint", vec![("joint".into(), Document::from(&j))])
        }
        Construct::NoisyJoint { a, b, t1, t2 } => {
            let (a, b) = load_pair(a, b)?;
            let t1 = noise(t1.as_ref(), a.outcomes())?;
            let t2 = noise(t2.as_ref(), b.outcomes())?;
            let (j, an, bn) = noisy_joint(&a, &b, &t1, &t2)?;
            checks.push(("marginals".into(), validate_joint(&j, &an, &bn, tol)?));
            (
                "noisy-joint",
                vec![
                    ("joint".into(), Document::from(&j)),
                    ("a_noisy".into(), Document::from(&an)),
                    ("b_noisy".into(), Document::from(&bn)),
                ],
            )
        }
        Construct::DiagonalBroadcast { observables } => {
            let set = observables.iter().map(|p| load_povm(p)).collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&Povm> = set.iter().collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let basis = common_eigenbasis(&refs, &mut rng)?;
            let ch = Channel::diagonal_broadcast(&basis.basis);
            for (path, p) in observables.iter().zip(&set) {
                checks.push((format!("broadcasts {}", shown(path)), verify_broadcasts(&ch, p, tol)?));
            }
            ("diagonal-broadcast", vec![("channel".into(), Document::from(&ch))])
        }
        Construct::JointChannel { joint } => {
            let j = load_joint(joint)?;
            let a = Povm::new(j.a_outcomes().to_vec(), j.marginal_a())?;
            let b = Povm::new(j.b_outcomes().to_vec(), j.marginal_b())?;
            let (ch, pa, pb) = Channel::from_joint(&j)?;
            checks.push(("probes".into(), verify_probes(&ch, &pa, &a, &pb, &b, tol)?));
            (
                "joint-channel",
                vec![
                    ("channel".into(), Document::from(&ch)),
                    ("probe_a".into(), Document::from(&pa)),
                    ("probe_b".into(), Document::from(&pb)),
                    ("marginal_a".into(), Document::from(&a)),
                    ("marginal_b".into(), Document::from(&b)),
                ],
            )
        }
        Construct::Luders { a } => {
            let a = load_povm(a)?;
            let i = Instrument::luders(&a)?;
            checks.push(("measures".into(), verify_measures(&i, &a, tol)?));
            ("luders", vec![("instrument".into(), Document::from(&i))])
        }
    };
    let passed = checks.iter().all(|(_, r)| r.passed);
    let checks_json: IndexMap<&str, Value> = checks.iter().map(|(n, r)| (n.as_str(), report::check_json(r))).collect();
    let docs_json: IndexMap<&str, &Document> = documents.iter().map(|(n, d)| (n.as_str(), d)).collect();
    let result = json!({
        "construction": name,
        "passed": passed,
        "checks": checks_json,
        "documents": docs_json,
    });
    Ok((result, if passed { exit::HOLDS } else { exit::FAILS }, documents))
}

fn verify(v: &Verify, tol: f64) -> Result<Executed, CliError> {
    let (name, files, check) = match v {
        Verify::Broadcast { channel, a, b } => {
            let ch = load_channel(channel)?;
            let pa = load_povm(a)?;
            let mut r = verify_broadcasts(&ch, &pa, tol)?;
            let mut files = vec![shown(channel), shown(a)];
            if let Some(b) = b {
                r = r.merge(verify_broadcasts(&ch, &load_povm(b)?, tol)?);
                files.push(shown(b));
            }
            ("broadcast", files, r)
        }
        Verify::OneSide { channel, a, b, probe_a, probe_b } => {
            let ch = load_channel(channel)?;
            let (pa, pb) = load_pair(a, b)?;
            let mut files = vec![shown(channel), shown(a), shown(b)];
            let r = match (probe_a, probe_b) {
                (Some(qa), Some(qb)) => {
                    files.extend([shown(qa), shown(qb)]);
                    verify_probes(&ch, &load_povm(qa)?, &pa, &load_povm(qb)?, &pb, tol)?
                }
                _ => verify_one_side_broadcast(&ch, &pa, &pb, tol)?,
            };
            ("one-side", files, r)
        }
        Verify::Nondisturb { instrument, measured, other } => {
            let inst = load_instrument(instrument)?;
            let (m, o) = load_pair(measured, other)?;
            let r = verify_measures(&inst, &m, tol)?.merge(verify_nondisturbing(&inst, &o, tol)?);
            ("nondisturb", vec![shown(instrument), shown(measured), shown(other)], r)
        }
        Verify::Joint { joint, a, b } => {
            let j = load_joint(joint)?;
            let (pa, pb) = load_pair(a, b)?;
            ("joint", vec![shown(joint), shown(a), shown(b)], validate_joint(&j, &pa, &pb, tol)?)
        }
    };
    let result = json!({
        "verification": name,
        "files": files,
        "check": report::check_json(&check),
    });
    Ok((result, check_code(&check), Vec::new()))
}
