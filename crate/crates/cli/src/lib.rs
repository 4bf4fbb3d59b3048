//! The `sextor` command line: argument handling, input loading and report
//! emission. Every check lives in `sextor-core`; this crate only wires it up.

use std::io::{Read, Write};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sextor_core::cat::{build_chain, validate_category, FinCategory, ObjId};
use sextor_core::coalgebra::{
    build_coalgebra, check_coalgebra, classify_coalgebra, extract_pretorsion, search_generalized, CoalgebraError,
    CoalgebraStructure,
};
use sextor_core::comonad::{
    check_adjoint_quintuple, check_counit_triangles, coassociator, comultiplication, counit, Mode,
};
use sextor_core::exactness::{canonical_cokernel, canonical_kernel, is_semiexact};
use sextor_core::format::{parse_category, serialize_text_annotated, CategoryFile, NullSpec};
use sextor_core::ideal::{check_ideal, is_closed};
use sextor_core::pretorsion::{
    check_pretorsion, enumerate_pretorsion, is_bihereditary, is_cohereditary, is_hereditary, is_rectangular,
    torsion_assignment, PretorsionTheory,
};
use sextor_core::ses::{build_ses_unchecked, check_characterization, compare_fast_paths, ses_cached};

#[derive(Debug, Parser)]
#[command(
    name = "sextor",
    version,
    about = "Finite categories with null morphisms, short exact sequences and pretorsion theories"
)]
pub struct Cli {
    /// Output format for reports.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Worker threads for parallel checks (0 = one per core).
    #[arg(long, default_value_t = 0, global = true)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    Exact,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Strict => Mode::Strict,
            ModeArg::Exact => Mode::Exact,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the category laws and the declared ideal.
    Validate { file: String },
    /// Canonical kernel and cokernel of every morphism.
    Kernels { file: String },
    #[command(subcommand)]
    Ses(SesCommand),
    #[command(subcommand)]
    Pretorsion(PretorsionCommand),
    /// Print the chain category 1 < 2 < ... < n.
    Chain {
        #[arg(long)]
        n: usize,
    },
    #[command(subcommand)]
    Comonad(ComonadCommand),
    #[command(subcommand)]
    Coalgebra(CoalgebraCommand),
    #[command(subcommand)]
    Adjoints(AdjointsCommand),
}

#[derive(Debug, Subcommand)]
pub enum SesCommand {
    /// Print Ses(C) with its ideal in the category file format.
    Build { file: String },
    /// Semiexactness, kernel constructions and the canonical pretorsion theory of Ses(C).
    Check { file: String },
}

#[derive(Debug, Subcommand)]
pub enum PretorsionCommand {
    /// Every pretorsion theory whose classes are unions of isomorphism classes.
    Enumerate { file: String },
    Check {
        file: String,
        #[arg(long, value_delimiter = ',')]
        torsion: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        free: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ComonadCommand {
    /// Counit triangles, comultiplication and coassociator.
    Check { file: String },
}

#[derive(Debug, clap::Args)]
pub struct TheoryArgs {
    file: String,
    /// Torsion class; together with --free selects one theory, otherwise every
    /// enumerated theory is used.
    #[arg(long, value_delimiter = ',')]
    torsion: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    free: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
}

#[derive(Debug, Subcommand)]
pub enum CoalgebraCommand {
    /// Build the coalgebra of a theory and print its data.
    Build(TheoryArgs),
    /// Check the coalgebra axioms.
    Check(TheoryArgs),
    /// Classify coalgebras and search for ones that are not pretorsion theories.
    Classify(TheoryArgs),
}

#[derive(Debug, Subcommand)]
pub enum AdjointsCommand {
    /// The adjoint string around the middle projection of Ses(C).
    Check { file: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Pass,
    Fail,
    Info,
}

impl Verdict {
    fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Info => "info",
        }
    }

    fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

enum Output {
    Report(Verdict, Value),
    /// A category file, printed verbatim.
    File(String),
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Coalgebra(#[from] CoalgebraError),
    #[error("{0}")]
    Other(String),
}

fn stable() -> bool {
    std::env::var("SEXTOR_STABLE").is_ok_and(|v| v == "1")
}

/// Runs the command line and returns the exit code.
pub fn run<I, S>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let start = Instant::now();
    let result = dispatch(&cli.command, stdin);
    match result {
        Ok(Output::File(text)) => {
            let _ = stdout.write_all(text.as_bytes());
            0
        }
        Ok(Output::Report(verdict, mut body)) => {
            if let Value::Object(map) = &mut body {
                map.insert("verdict".into(), json!(verdict.as_str()));
                if !stable() {
                    map.insert("elapsed_ms".into(), json!(start.elapsed().as_millis() as u64));
                }
            }
            let _ = match cli.format {
                Format::Json => writeln!(stdout, "{}", serde_json::to_string_pretty(&body).expect("json")),
                Format::Text => write!(stdout, "{}", render_text(&body)),
            };
            match verdict {
                Verdict::Fail => 1,
                _ => 0,
            }
        }
        Err(CliError::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn render_text(body: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = body {
        if let Some(v) = map.get("verdict") {
            out.push_str(&format!("verdict: {}\n", v.as_str().unwrap_or_default()));
        }
        for (k, v) in map.iter().filter(|(k, _)| *k != "verdict") {
            match v {
                Value::Array(rows) if !rows.is_empty() && rows.iter().all(Value::is_object) => {
                    out.push_str(&format!("{k}:\n"));
                    for row in rows {
                        let cells: Vec<String> = row
                            .as_object()
                            .into_iter()
                            .flatten()
                            .map(|(c, x)| format!("{c}={}", scalar(x)))
                            .collect();
                        out.push_str(&format!("  {}\n", cells.join("  ")));
                    }
                }
                _ => out.push_str(&format!("{k}: {}\n", scalar(v))),
            }
        }
    }
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn load(path: &str, stdin: &mut dyn Read) -> Result<CategoryFile, CliError> {
    let text = if path == "-" {
        let mut s = String::new();
        stdin
            .read_to_string(&mut s)
            .map_err(|e| CliError::Input(format!("reading standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?
    };
    parse_category(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn resolve(c: &FinCategory, names: &[String]) -> Result<Vec<ObjId>, CliError> {
    let mut out = Vec::new();
    for n in names.iter().filter(|n| !n.is_empty()) {
        out.push(
            c.find_obj(n)
                .ok_or_else(|| CliError::Input(format!("unknown object `{n}`")))?,
        );
    }
    Ok(out)
}

fn names(c: &FinCategory, objs: &[ObjId]) -> Vec<String> {
    objs.iter().map(|&o| c.obj_name(o).to_string()).collect()
}

fn dispatch(cmd: &Command, stdin: &mut dyn Read) -> Result<Output, CliError> {
    match cmd {
        Command::Validate { file } => validate(&load(file, stdin)?),
        Command::Kernels { file } => kernels(&load(file, stdin)?),
        Command::Ses(SesCommand::Build { file }) => ses_build(&load(file, stdin)?),
        Command::Ses(SesCommand::Check { file }) => ses_check(&load(file, stdin)?),
        Command::Pretorsion(PretorsionCommand::Enumerate { file }) => enumerate(&load(file, stdin)?),
        Command::Pretorsion(PretorsionCommand::Check { file, torsion, free }) => {
            let f = load(file, stdin)?;
            let (t, fr) = (resolve(&f.cat, torsion)?, resolve(&f.cat, free)?);
            let r = check_pretorsion(&f.cat, &t, &fr);
            let mut body = serde_json::to_value(&r).expect("json");
            if r.pass {
                let th = PretorsionTheory::new(f.cat.clone(), &t, &fr);
                if let Ok(ta) = torsion_assignment(&th) {
                    body["hereditary"] = json!(is_hereditary(&th, &ta));
                    body["cohereditary"] = json!(is_cohereditary(&th, &ta));
                    body["rectangular"] = json!(is_rectangular(&th, &ta));
                }
            }
            Ok(Output::Report(Verdict::from_pass(r.pass), body))
        }
        Command::Chain { n } => {
            let c = build_chain(*n).map_err(|e| CliError::Input(e.to_string()))?;
            Ok(Output::File(sextor_core::format::serialize_text(&c, &NullSpec::None)))
        }
        Command::Comonad(ComonadCommand::Check { file }) => comonad_check(&load(file, stdin)?),
        Command::Coalgebra(sub) => coalgebra(sub, stdin),
        Command::Adjoints(AdjointsCommand::Check { file }) => {
            let f = load(file, stdin)?;
            let s = build_ses_unchecked(f.null_category()).map_err(|e| CliError::Other(e.to_string()))?;
            let r = check_adjoint_quintuple(&s).map_err(|e| CliError::Other(e.to_string()))?;
            Ok(Output::Report(
                Verdict::from_pass(r.holds()),
                serde_json::to_value(&r).expect("json"),
            ))
        }
    }
}

fn validate(f: &CategoryFile) -> Result<Output, CliError> {
    let c = &f.cat;
    let laws = validate_category(c);
    let ideal = f.ideal();
    let ideal_check = check_ideal(c, &ideal);
    let closed = is_closed(c, &ideal);
    let pass = laws.is_empty() && ideal_check.is_ideal && closed.closed;
    let body = json!({
        "category": c.name(),
        "objects": c.num_objects(),
        "morphisms": c.num_morphisms(),
        "violations": laws.violations,
        "ideal": {
            "members": ideal.members().map(|m| c.mor_name(m)).collect::<Vec<_>>(),
            "is_ideal": ideal_check.is_ideal,
            "counterexample": ideal_check.counterexample.map(|w| json!({
                "outer": c.mor_name(w.outer),
                "inner": c.mor_name(w.inner),
                "composite": c.mor_name(w.composite),
            })),
            "closed": closed.closed,
            "unfactored": closed.witnesses.iter().filter(|(_, w)| w.is_none()).map(|(m, _)| c.mor_name(*m)).collect::<Vec<_>>(),
        },
    });
    Ok(Output::Report(Verdict::from_pass(pass), body))
}

fn kernels(f: &CategoryFile) -> Result<Output, CliError> {
    let nc = f.null_category();
    let c = nc.cat();
    let name = |m: Option<sextor_core::cat::MorId>| m.map_or("MISSING".to_string(), |m| c.mor_name(m).to_string());
    let rows: Vec<Value> = c
        .morphisms()
        .map(|m| {
            json!({
                "morphism": c.mor_name(m),
                "kernel": name(canonical_kernel(&nc, m)),
                "cokernel": name(canonical_cokernel(&nc, m)),
            })
        })
        .collect();
    let semiexact = is_semiexact(&nc).semiexact;
    Ok(Output::Report(
        Verdict::Info,
        json!({ "kernels": rows, "semiexact": semiexact }),
    ))
}

fn ses_build(f: &CategoryFile) -> Result<Output, CliError> {
    let s = build_ses_unchecked(f.null_category()).map_err(|e| CliError::Other(e.to_string()))?;
    let c = s.base_cat();
    let members: Vec<_> = s.null_cat().ideal().members().collect();
    let null = NullSpec::Members(members);
    let text = serialize_text_annotated(s.cat(), &null, |o| {
        let seq = s.object(o);
        Some(format!(
            "{} : {} -> {}, {} : {} -> {}",
            c.mor_name(seq.f),
            c.obj_name(c.dom(seq.f)),
            c.obj_name(c.cod(seq.f)),
            c.mor_name(seq.g),
            c.obj_name(c.dom(seq.g)),
            c.obj_name(c.cod(seq.g))
        ))
    });
    Ok(Output::File(format!(
        "# short exact sequences of {} with the ideal of null middle components\n{text}",
        c.name()
    )))
}

fn ses_check(f: &CategoryFile) -> Result<Output, CliError> {
    let nc = f.null_category();
    let semi = is_semiexact(&nc);
    let s = build_ses_unchecked(nc).map_err(|e| CliError::Other(e.to_string()))?;
    let ses_semi = is_semiexact(s.null_cat());
    let fast = compare_fast_paths(&s);
    let chars = check_characterization(&s);
    let (t, fr) = s.canonical_pretorsion();
    let sc = s.cat_arc();
    let pre = check_pretorsion(&sc, &t, &fr);
    let bih = if pre.pass {
        let th = PretorsionTheory::new(sc.clone(), &t, &fr);
        torsion_assignment(&th)
            .map(|ta| is_bihereditary(&th, &ta))
            .unwrap_or(false)
    } else {
        false
    };
    let pass = semi.semiexact && ses_semi.semiexact && fast.agrees() && chars.holds() && pre.pass && bih;
    let body = json!({
        "base_semiexact": semi.semiexact,
        "objects": s.num_objects(),
        "morphisms": s.cat().num_morphisms(),
        "ses_semiexact": ses_semi,
        "fast_paths": fast,
        "characterization": chars,
        "canonical_pretorsion": pre,
        "canonical_bihereditary": bih,
    });
    Ok(Output::Report(Verdict::from_pass(pass), body))
}

fn enumerate(f: &CategoryFile) -> Result<Output, CliError> {
    let c = &f.cat;
    let entries: Vec<Value> = enumerate_pretorsion(c)
        .into_iter()
        .map(|(t, fr)| {
            let th = PretorsionTheory::new(c.clone(), &t, &fr);
            let r = check_pretorsion(c, &t, &fr);
            let ta = torsion_assignment(&th).ok();
            json!({
                "T": names(c, &t),
                "F": names(c, &fr),
                "t1": r.t1,
                "t2": r.t2,
                "hereditary": ta.as_ref().map(|ta| is_hereditary(&th, ta)),
                "cohereditary": ta.as_ref().map(|ta| is_cohereditary(&th, ta)),
                "rectangular": ta.as_ref().map(|ta| is_rectangular(&th, ta)),
            })
        })
        .collect();
    Ok(Output::Report(
        Verdict::Info,
        json!({ "count": entries.len(), "theories": entries }),
    ))
}

fn comonad_check(f: &CategoryFile) -> Result<Output, CliError> {
    let nc = f.null_category();
    let semi = is_semiexact(&nc);
    if !semi.semiexact {
        return Ok(Output::Report(Verdict::Fail, json!({ "semiexact": semi })));
    }
    let err = |e: sextor_core::comonad::ComonadError| CliError::Other(e.to_string());
    let s = ses_cached(&nc).map_err(|e| CliError::Other(e.to_string()))?;
    let ss = ses_cached(s.null_cat()).map_err(|e| CliError::Other(e.to_string()))?;
    let eps_valid = sextor_core::cat::validate_functor(&counit(&s)).is_empty();
    let delta_valid = sextor_core::cat::validate_functor(&comultiplication(&s, &ss).map_err(err)?).is_empty();
    let triangles = check_counit_triangles(&s, &ss).map_err(err)?;
    let xi = coassociator(&s, &ss).map_err(err)?;
    let pass = eps_valid && delta_valid && triangles.holds() && xi.holds();
    let body = json!({
        "ses_objects": s.num_objects(),
        "ses_morphisms": s.cat().num_morphisms(),
        "counit_functor": eps_valid,
        "comultiplication_functor": delta_valid,
        "triangles": triangles,
        "coassociator": xi,
    });
    Ok(Output::Report(Verdict::from_pass(pass), body))
}

type Theory = (Vec<ObjId>, Vec<ObjId>);

fn theories(f: &CategoryFile, args: &TheoryArgs) -> Result<Vec<Theory>, CliError> {
    match (&args.torsion, &args.free) {
        (Some(t), Some(fr)) => Ok(vec![(resolve(&f.cat, t)?, resolve(&f.cat, fr)?)]),
        (None, None) => Ok(enumerate_pretorsion(&f.cat)),
        _ => Err(CliError::Input("--torsion and --free must be given together".into())),
    }
}

fn coalgebra_data(cs: &CoalgebraStructure) -> Value {
    let c = cs.cat();
    let objects: Vec<Value> = c
        .objects()
        .map(|x| {
            let grid = cs.grid(x);
            json!({
                "object": c.obj_name(x),
                "lambda": cs.s.cat().obj_name(cs.lambda.obj(x)),
                "lambda_delta": grid.map(|row| row.map(|m| c.mor_name(m).to_string())),
            })
        })
        .collect();
    json!({ "mode": cs.mode, "objects": objects })
}

fn coalgebra(sub: &CoalgebraCommand, stdin: &mut dyn Read) -> Result<Output, CliError> {
    let (args, kind) = match sub {
        CoalgebraCommand::Build(a) => (a, 0),
        CoalgebraCommand::Check(a) => (a, 1),
        CoalgebraCommand::Classify(a) => (a, 2),
    };
    let f = load(&args.file, stdin)?;
    let mode: Mode = args.mode.into();
    let mut entries = Vec::new();
    let mut pass = true;
    for (t, fr) in theories(&f, args)? {
        let mut entry = json!({ "T": names(&f.cat, &t), "F": names(&f.cat, &fr) });
        match build_coalgebra(&f.cat, &t, &fr, mode) {
            Ok(cs) => match kind {
                0 => entry["coalgebra"] = coalgebra_data(&cs),
                1 => {
                    let r = check_coalgebra(&cs, mode);
                    let round_trip = extract_pretorsion(&cs) == (t.clone(), fr.clone());
                    pass &= r.pass() && round_trip;
                    entry["pass"] = json!(r.pass());
                    entry["round_trip"] = json!(round_trip);
                    entry["report"] = serde_json::to_value(&r).expect("json");
                }
                _ => {
                    let cl = classify_coalgebra(&cs);
                    entry["classification"] = serde_json::to_value(&cl).expect("json");
                }
            },
            Err(e) => {
                pass = false;
                entry["error"] = json!(e.to_string());
            }
        }
        entries.push(entry);
    }
    let mut body = json!({ "mode": mode, "theories": entries });
    let verdict = match kind {
        0 => Verdict::from_pass(pass),
        1 => Verdict::from_pass(pass),
        _ => {
            if args.torsion.is_none() {
                let search = search_generalized(&f.null_category())?;
                body["generalized_search"] = serde_json::to_value(&search).expect("json");
            }
            if pass {
                Verdict::Info
            } else {
                Verdict::Fail
            }
        }
    };
    Ok(Output::Report(verdict, body))
}
