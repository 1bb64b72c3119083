//! Command-line front end. Exit codes: 0 success, 1 verification or
//! classification failure, 2 usage or parse error.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::classify::{certify, decompose_gram, decompose_products, GramForm, GramOutcome, SeparabilityCertificate, Verdict};
use crate::construct::{
    convention_scan, run_pipeline, LambdaMode, OmegaScale, PipelineConfig, ProjectorScale,
    SubtractionChoice,
};
use crate::error::{Error, Result};
use crate::extremal::{extremal_search, extremality_test, spectral_fingerprint, SearchConfig};
use crate::hilbert::{Alpha, SymmetricState, Tolerances};
use crate::horodecki::{rho_db, separability_verdict, HorodeckiParams, RangeSearchConfig};
use crate::io::{basic_certificates, qubit_qudit_certificates, verify_certificates, Certificate, Provenance, RunLog, RunRecord, StateFile};
use crate::linalg::c;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "symppt", version, about = "PPT entangled symmetric multi-qubit states")]
pub struct Cli {
    #[command(flatten)]
    pub tol: TolArgs,
    /// Run log (JSON lines); defaults to `runs.jsonl` next to the outputs.
    #[arg(long, global = true)]
    pub log: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct TolArgs {
    /// key=value file with rank_rel_tol, psd_tol, hermitian_tol, residual_tol.
    #[arg(long, global = true)]
    pub tolerances: Option<PathBuf>,
    #[arg(long, global = true)]
    pub rank_rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub psd_tol: Option<f64>,
    #[arg(long, global = true)]
    pub hermitian_tol: Option<f64>,
    #[arg(long, global = true)]
    pub residual_tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the qubit–qudit state ρ_{d,b}.
    Horodecki {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the filter, lift and subtraction pipeline.
    Construct(ConstructArgs),
    /// Seeded walks from a starting state to extremal states.
    Search {
        #[arg(long, default_value_t = 10)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// A state file or `maximally-mixed-symmetric`.
        #[arg(long, default_value = "maximally-mixed-symmetric")]
        start: String,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 8)]
        candidates: usize,
        #[arg(long, default_value_t = 64)]
        max_steps: usize,
    },
    /// Dimension of the fixed-point solution space.
    TestExtremal {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Rank rules, extremality, edge test and decomposition.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Copy of the input with the new certificates attached.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Separable or Schmidt-rank-two decomposition.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = DecomposeForm::Auto)]
        form: DecomposeForm,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recompute every stored certificate.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long, default_value_t = 5)]
    pub d: usize,
    #[arg(long, default_value_t = 4)]
    pub d_out: usize,
    #[arg(long, default_value_t = 0.5)]
    pub b: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    pub gamma1: f64,
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    pub gamma2: f64,
    /// Comma-separated real filter parameters; overrides gamma1/gamma2.
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,
    /// `auto` or a fixed value.
    #[arg(long, default_value = "auto")]
    pub lambda: String,
    /// `on` (real part 7), `off`, `auto`, `re:<t>` or `alpha:<re>,<im>`.
    #[arg(long, default_value = "on")]
    pub subtract: String,
    #[arg(long, value_enum, default_value_t = OmegaArg::TraceOne)]
    pub omega_scale: OmegaArg,
    #[arg(long, value_enum, default_value_t = ProjectorArg::Bare)]
    pub projector_scale: ProjectorArg,
    /// Print λ* for every scale combination and exit.
    #[arg(long)]
    pub convention_scan: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum OmegaArg {
    Filtered,
    TraceOne,
    Unnormalized,
    DoubledUnnormalized,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ProjectorArg {
    Bare,
    TraceOne,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum DecomposeForm {
    Auto,
    Products,
    A3,
    A4,
}

impl From<OmegaArg> for OmegaScale {
    fn from(a: OmegaArg) -> Self {
        match a {
            OmegaArg::Filtered => OmegaScale::Filtered,
            OmegaArg::TraceOne => OmegaScale::TraceOne,
            OmegaArg::Unnormalized => OmegaScale::Unnormalized,
            OmegaArg::DoubledUnnormalized => OmegaScale::DoubledUnnormalized,
        }
    }
}

impl From<ProjectorArg> for ProjectorScale {
    fn from(a: ProjectorArg) -> Self {
        match a {
            ProjectorArg::Bare => ProjectorScale::Bare,
            ProjectorArg::TraceOne => ProjectorScale::TraceOne,
        }
    }
}

const TOL_KEYS: [&str; 4] = ["rank_rel_tol", "psd_tol", "hermitian_tol", "residual_tol"];

fn set_tol(t: &mut Tolerances, key: &str, v: f64) {
    match key {
        "rank_rel_tol" => t.rank_rel_tol = v,
        "psd_tol" => t.psd_tol = v,
        "hermitian_tol" => t.hermitian_tol = v,
        _ => t.residual_tol = v,
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("{what}: cannot parse {s:?}")))
}

/// Defaults, then `SYMPPT_*` environment variables, then the config file, then flags.
pub fn resolve_tolerances(args: &TolArgs, env: impl Fn(&str) -> Option<String>) -> Result<Tolerances> {
    let mut t = Tolerances::default();
    for key in TOL_KEYS {
        let var = format!("SYMPPT_{}", key.to_uppercase());
        if let Some(v) = env(&var) {
            set_tol(&mut t, key, parse_f64(&v, &var)?);
        }
    }
    if let Some(path) = &args.tolerances {
        let text = std::fs::read_to_string(path)?;
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("line {}: expected key=value", n + 1)))?;
            let k = k.trim();
            if !TOL_KEYS.contains(&k) {
                return Err(Error::Format(format!("line {}: unknown key {k:?}", n + 1)));
            }
            set_tol(&mut t, k, parse_f64(v, k)?);
        }
    }
    for (key, v) in TOL_KEYS.iter().zip([args.rank_rel_tol, args.psd_tol, args.hermitian_tol, args.residual_tol]) {
        if let Some(v) = v {
            set_tol(&mut t, key, v);
        }
    }
    t.validate()?;
    Ok(t)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_)
        | Error::Format(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::Size(_)
        | Error::Boundary(_) => EXIT_USAGE,
        Error::Stage { source, .. } => exit_code(source),
        _ => EXIT_FAILURE,
    }
}

fn print(v: &Value) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(v).expect("serializable");
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn parse_subtraction(s: &str) -> Result<Option<SubtractionChoice>> {
    Ok(match s {
        "off" => None,
        "on" => Some(SubtractionChoice::RealPart(7.0)),
        "auto" => Some(SubtractionChoice::Auto),
        _ => {
            if let Some(t) = s.strip_prefix("re:") {
                Some(SubtractionChoice::RealPart(parse_f64(t, "--subtract")?))
            } else if let Some(a) = s.strip_prefix("alpha:") {
                let (re, im) = a.split_once(',').unwrap_or((a, "0"));
                Some(SubtractionChoice::Alpha(Alpha::finite(
                    parse_f64(re, "--subtract")?,
                    parse_f64(im, "--subtract")?,
                )))
            } else {
                return Err(Error::InvalidParameter(format!("--subtract: unknown value {s:?}")));
            }
        }
    })
}

fn default_log(explicit: &Option<PathBuf>, near: Option<&Path>) -> Option<RunLog> {
    if let Some(p) = explicit {
        return Some(RunLog::new(p));
    }
    near.map(|p| RunLog::new(p.join("runs.jsonl")))
}

fn parent(p: &Path) -> PathBuf {
    match p.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

struct Ctx {
    tol: Tolerances,
    log: Option<RunLog>,
}

impl Ctx {
    fn record(&mut self, command: &str, seed: Option<u64>, stage: &str, ranks: Option<Vec<usize>>, residuals: Vec<f64>, outcome: &str) -> Result<()> {
        if let Some(log) = &mut self.log {
            log.append(RunRecord {
                timestamp_ms: 0,
                command: command.into(),
                seed,
                stage: stage.into(),
                three_rank: ranks,
                residuals,
                outcome: outcome.into(),
            })?;
        }
        Ok(())
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let tol = resolve_tolerances(&cli.tol, |k| std::env::var(k).ok())?;
    let near: Option<PathBuf> = match &cli.command {
        Command::Horodecki { out, .. } => Some(parent(out)),
        Command::Construct(a) => a.out_dir.clone().or_else(|| a.out.as_deref().map(parent)),
        Command::Search { out_dir, .. } => Some(out_dir.clone()),
        Command::TestExtremal { input } | Command::Verify { input } | Command::Decompose { input, .. } => Some(parent(input)),
        Command::Classify { input, out, .. } => Some(out.as_deref().map(parent).unwrap_or_else(|| parent(input))),
    };
    let mut ctx = Ctx {
        tol,
        log: default_log(&cli.log, near.as_deref()),
    };
    match cli.command {
        Command::Horodecki { d, b, out } => cmd_horodecki(&mut ctx, d, b, &out),
        Command::Construct(a) => cmd_construct(&mut ctx, &a),
        Command::Search {
            runs,
            seed,
            start,
            out_dir,
            candidates,
            max_steps,
        } => cmd_search(&mut ctx, runs, seed, &start, &out_dir, candidates, max_steps),
        Command::TestExtremal { input } => cmd_test_extremal(&mut ctx, &input),
        Command::Classify { input, seed, out } => cmd_classify(&mut ctx, &input, seed, out.as_deref()),
        Command::Decompose { input, form, seed } => cmd_decompose(&mut ctx, &input, form, seed),
        Command::Verify { input } => cmd_verify(&mut ctx, &input),
    }
}

fn cmd_horodecki(ctx: &mut Ctx, d: usize, b: f64, out: &Path) -> Result<i32> {
    let p = HorodeckiParams::new(d, b)?;
    let rho = rho_db(&p);
    let verdict = separability_verdict(&p, &RangeSearchConfig::default(), &ctx.tol)?;
    let mut file = StateFile::from_qubit_qudit(
        &rho,
        Provenance {
            command: "horodecki".into(),
            config: json!({ "d": d, "b": b }),
            seed: None,
        },
        &ctx.tol,
    );
    file.metadata.certificates = qubit_qudit_certificates(&rho, &ctx.tol)?;
    let ranks = match &file.metadata.certificates[1] {
        Certificate::Ranks { ranks } => ranks.clone(),
        _ => vec![],
    };
    if b == 0.0 {
        file.metadata.notes.push("b = 0: pure product state, separable".into());
    }
    file.metadata.notes.push(format!("verdict: {verdict:?}"));
    file.write(out)?;
    ctx.record("horodecki", None, "write", Some(ranks.clone()), vec![], "ok")?;
    print(&json!({ "out": out, "ranks": ranks, "verdict": format!("{verdict:?}"), "separable": verdict.is_separable() }));
    Ok(EXIT_OK)
}

fn pipeline_config(a: &ConstructArgs, tol: &Tolerances) -> Result<PipelineConfig> {
    let gammas: Vec<_> = match &a.gammas {
        Some(g) => g.iter().map(|&x| c(x, 0.0)).collect(),
        None => vec![c(a.gamma1, 0.0), c(a.gamma2, 0.0)],
    };
    let lambda = if a.lambda == "auto" {
        LambdaMode::Auto
    } else {
        LambdaMode::Fixed(parse_f64(&a.lambda, "--lambda")?)
    };
    Ok(PipelineConfig {
        d: a.d,
        d_out: a.d_out,
        b: a.b,
        gammas,
        lambda,
        subtraction: parse_subtraction(&a.subtract)?,
        omega_scale: a.omega_scale.into(),
        projector_scale: a.projector_scale.into(),
        seed: a.seed,
        tolerances: *tol,
    })
}

fn cmd_construct(ctx: &mut Ctx, a: &ConstructArgs) -> Result<i32> {
    let cfg = pipeline_config(a, &ctx.tol)?;
    let cfg_json = serde_json::to_value(&cfg)?;
    if a.convention_scan {
        let scan = convention_scan(&cfg)?;
        print(&Value::Array(
            scan.iter()
                .map(|(o, p, l)| json!({ "omega_scale": o, "projector_scale": p, "lambda_star": l }))
                .collect(),
        ));
        return Ok(EXIT_OK);
    }
    let res = match run_pipeline(&cfg) {
        Ok(r) => r,
        Err(e) => {
            ctx.record("construct", Some(cfg.seed), "pipeline", None, vec![], &format!("error: {e}"))?;
            return Err(e);
        }
    };
    let prov = |stage: &str| Provenance {
        command: format!("construct:{stage}"),
        config: cfg_json.clone(),
        seed: Some(cfg.seed),
    };
    let mut final_file = StateFile::from_symmetric(&res.final_state, prov("final"), &ctx.tol);
    final_file.metadata.certificates = basic_certificates(&res.final_state, &ctx.tol)?;
    if let Some(ex) = &res.extremality {
        final_file.metadata.certificates.push(Certificate::Extremal {
            solution_dim: ex.solution_dim,
            entangled: ex.entangled_certificate,
        });
    }
    final_file.metadata.notes = res.notes.clone();
    let summary = json!({
        "config": cfg_json,
        "lambda_star": res.lambda.lambda,
        "lambda_limiting_pt": res.lambda.limiting,
        "subtraction": res.subtraction,
        "stages": res.stages,
        "extremal": res.extremality.as_ref().map(|e| json!({
            "solution_dim": e.solution_dim,
            "is_extremal": e.is_extremal,
            "entangled": e.entangled_certificate,
        })),
        "certified_entangled": res.certified_entangled(),
        "notes": res.notes,
    });
    if let Some(dir) = &a.out_dir {
        for (name, s) in [("omega", &res.omega), ("lifted", &res.lifted)] {
            let mut f = StateFile::from_symmetric(s, prov(name), &ctx.tol);
            f.metadata.certificates = vec![Certificate::Ranks {
                ranks: f.metadata.three_rank.clone().unwrap_or_default(),
            }];
            f.write(&dir.join("states").join(format!("{name}.json")))?;
        }
        final_file.write(&dir.join("states").join("final.json"))?;
        std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    }
    if let Some(out) = &a.out {
        final_file.write(out)?;
    }
    ctx.record(
        "construct",
        Some(cfg.seed),
        "final",
        Some(res.final_ranks().to_vec()),
        res.final_state.ppt_min_eigenvalues(),
        if res.certified_entangled() { "entangled" } else { "uncertified" },
    )?;
    print(&summary);
    Ok(EXIT_OK)
}

fn load_symmetric(path: &Path, tol: &Tolerances) -> Result<(StateFile, SymmetricState)> {
    let f = StateFile::read(path)?;
    let s = f.to_symmetric(tol)?;
    Ok((f, s))
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(ctx: &mut Ctx, runs: u64, seed: u64, start: &str, out_dir: &Path, candidates: usize, max_steps: usize) -> Result<i32> {
    let tol = ctx.tol;
    let start_state = if start == "maximally-mixed-symmetric" {
        SymmetricState::maximally_mixed(4)?
    } else {
        load_symmetric(Path::new(start), &tol)?.1
    };
    let mut cfg = SearchConfig::four_qubit_default();
    cfg.start = start_state;
    cfg.candidates_per_step = candidates;
    cfg.max_steps = max_steps;
    if cfg.start.num_qubits != 4 {
        cfg.policy = crate::extremal::DirectionPolicy::Random;
    }
    std::fs::create_dir_all(out_dir.join("states"))?;
    let mut tally: BTreeMap<String, u64> = BTreeMap::new();
    let mut entangled_ranks: BTreeSet<String> = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut unique = 0u64;
    let mut failures = vec![];
    let (mut enc577, mut cert577) = (0u64, 0u64);
    for i in 0..runs {
        let s = seed.wrapping_add(i);
        let trace = match extremal_search(s, &cfg, &tol) {
            Ok(t) => t,
            Err(e) => {
                failures.push(json!({ "seed": s, "error": e.to_string() }));
                ctx.record("search", Some(s), "walk", None, vec![], &format!("error: {e}"))?;
                continue;
            }
        };
        for st in &trace.steps {
            if st.ranks == [5, 7, 7] && st.state.num_qubits == 4 {
                enc577 += 1;
                if crate::classify::separability_certificate(&st.state, s, &tol)?.is_some() {
                    cert577 += 1;
                }
            }
        }
        let ranks = trace.terminal.ranks.clone();
        let key = format!("{ranks:?}");
        *tally.entry(key.clone()).or_default() += 1;
        let mut outcome = "separable-extremal".to_string();
        if trace.terminal.entangled_certificate {
            entangled_ranks.insert(key);
            outcome = "entangled-extremal".into();
            let fp = spectral_fingerprint(&trace.terminal_state);
            if seen.insert(fp) {
                let mut f = StateFile::from_symmetric(
                    &trace.terminal_state,
                    Provenance {
                        command: "search".into(),
                        config: json!({ "start": start, "candidates": candidates, "max_steps": max_steps }),
                        seed: Some(s),
                    },
                    &tol,
                );
                f.metadata.certificates = basic_certificates(&trace.terminal_state, &tol)?;
                f.metadata.certificates.push(Certificate::Extremal {
                    solution_dim: trace.terminal.solution_dim,
                    entangled: true,
                });
                f.write(&out_dir.join("states").join(format!("extremal-{unique:04}.json")))?;
                unique += 1;
            }
        }
        ctx.record("search", Some(s), "terminal", Some(ranks), trace.terminal.residuals.clone(), &outcome)?;
    }
    let summary = json!({
        "runs": runs,
        "seed": seed,
        "start": start,
        "terminal_three_ranks": tally,
        "entangled_three_ranks": entangled_ranks,
        "unique_entangled": unique,
        "encountered_577": enc577,
        "certified_577": cert577,
        "failures": failures,
    });
    std::fs::write(out_dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    print(&summary);
    Ok(EXIT_OK)
}

fn cmd_test_extremal(ctx: &mut Ctx, input: &Path) -> Result<i32> {
    let (_, s) = load_symmetric(input, &ctx.tol)?;
    let r = extremality_test(&s, &ctx.tol)?;
    ctx.record("test-extremal", None, "extremality", Some(r.ranks.clone()), r.residuals.clone(), &format!("dim {}", r.solution_dim))?;
    print(&json!({
        "solution_dim": r.solution_dim,
        "is_extremal": r.is_extremal,
        "counting_bound_triggered": r.counting_bound_triggered,
        "ranks": r.ranks,
        "entangled_certificate": r.entangled_certificate,
        "composed_dim": r.composed_dim,
        "intersection_dim": r.intersection_dim,
    }));
    Ok(EXIT_OK)
}

fn cmd_classify(ctx: &mut Ctx, input: &Path, seed: u64, out: Option<&Path>) -> Result<i32> {
    let (mut file, s) = load_symmetric(input, &ctx.tol)?;
    let cert = certify(&s, seed, &ctx.tol)?;
    let cl = &cert.classification;
    if let Some(out) = out {
        let mut certs = basic_certificates(&s, &ctx.tol)?;
        if let Some(ex) = &cert.extremality {
            certs.push(Certificate::Extremal {
                solution_dim: ex.solution_dim,
                entangled: ex.entangled_certificate,
            });
        }
        if let Some(d) = &cert.certificate {
            certs.push(Certificate::Separable { decomposition: d.clone() });
        }
        if let Some(v) = cert.edge.as_ref().and_then(|e| e.found_vectors.first()) {
            certs.push(Certificate::ProductVector { vector: v.clone() });
        }
        file.metadata.certificates = certs;
        file.metadata.tolerances = ctx.tol;
        file.write(out)?;
    }
    ctx.record("classify", Some(seed), "certify", Some(cl.three_rank.0.to_vec()), vec![], &format!("{:?}", cl.verdict))?;
    print(&json!({
        "three_rank": cl.three_rank,
        "verdict": cl.verdict,
        "justification": cl.justification,
        "rank_rule": cert.by_ranks.verdict,
        "solution_dim": cert.extremality.as_ref().map(|e| e.solution_dim),
        "edge_vectors": cert.edge.as_ref().map(|e| e.found_vectors.len()),
        "certificate": cert.certificate,
    }));
    Ok(if cl.verdict == Verdict::Inconclusive { EXIT_FAILURE } else { EXIT_OK })
}

fn cmd_decompose(ctx: &mut Ctx, input: &Path, form: DecomposeForm, seed: u64) -> Result<i32> {
    let (_, s) = load_symmetric(input, &ctx.tol)?;
    let mut result: Option<Value> = None;
    if matches!(form, DecomposeForm::Auto | DecomposeForm::Products) {
        if let Some(m) = decompose_products(&s, &ctx.tol)? {
            result = Some(json!({ "separable": true, "decomposition": SeparabilityCertificate::Products(m) }));
        }
    }
    let forms: &[GramForm] = match form {
        DecomposeForm::Auto => &[GramForm::A4, GramForm::A3],
        DecomposeForm::A4 => &[GramForm::A4],
        DecomposeForm::A3 => &[GramForm::A3],
        DecomposeForm::Products => &[],
    };
    for &f in forms {
        if result.is_some() {
            break;
        }
        if let GramOutcome::Decomposed(d) = decompose_gram(&s, f, seed)? {
            let separable = d.is_product_form(1e-8);
            result = Some(json!({ "separable": separable, "decomposition": SeparabilityCertificate::Gram(d) }));
        }
    }
    let ok = result.is_some();
    ctx.record("decompose", Some(seed), "decompose", None, vec![], if ok { "decomposed" } else { "inconclusive" })?;
    print(&result.unwrap_or_else(|| json!({ "inconclusive": true })));
    Ok(if ok { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_verify(ctx: &mut Ctx, input: &Path) -> Result<i32> {
    let file = StateFile::read(input)?;
    let failures = verify_certificates(&file, &ctx.tol)?;
    let ok = failures.is_empty();
    ctx.record("verify", None, "verify", file.metadata.three_rank.clone(), vec![], if ok { "verified" } else { "mismatch" })?;
    print(&json!({
        "verified": ok,
        "certificates": file.metadata.certificates.len(),
        "failures": failures,
    }));
    Ok(if ok { EXIT_OK } else { EXIT_FAILURE })
}
