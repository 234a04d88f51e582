//! The `tek` command line.
//!
//! Every subcommand builds one report. With `--format json` the report is a
//! single JSON object on stdout; with `--format text` it is a few
//! `key = value` lines. The seed is part of every report, and no report
//! contains timings, so output is byte-stable for a fixed seed.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::cohomology::Cocycle;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::intlin::IntMatrix;
use crate::io;
use crate::kaction::{self, FDAction, InvariantHom};
use crate::limits::{self, ConjugacyVerdict, DecoratedBratteli, Obstruction};
use crate::numeric::round_to;
use crate::projrep::{decompose_detailed, regular_class_count, RepContext, Tolerances};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Options shared by all subcommands.
#[derive(Args, Clone, Debug)]
pub struct RunConfig {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Also write the JSON report to `<dir>/<command>.json`.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Unitarity tolerance.
    #[arg(long, global = true)]
    pub tol_unitary: Option<f64>,
    /// Tolerance of the projective multiplication law.
    #[arg(long, global = true)]
    pub tol_mult: Option<f64>,
    /// Integrality tolerance for characters and multiplicities.
    #[arg(long, global = true)]
    pub tol_character: Option<f64>,
    /// Minimal eigenvalue gap for block splitting.
    #[arg(long, global = true)]
    pub tol_gap: Option<f64>,
}

impl RunConfig {
    fn tolerances(&self) -> std::result::Result<Tolerances, String> {
        let mut t = Tolerances::default();
        for (name, val, slot) in [
            ("--tol-unitary", self.tol_unitary, &mut t.unitary),
            ("--tol-mult", self.tol_mult, &mut t.mult),
            ("--tol-character", self.tol_character, &mut t.character),
            ("--tol-gap", self.tol_gap, &mut t.gap),
        ] {
            if let Some(v) = val {
                if !(v.is_finite() && v > 0.0) {
                    return Err(format!("{name} must be a positive number, got {v}"));
                }
                *slot = v;
            }
        }
        Ok(t)
    }
}

#[derive(Parser, Debug)]
#[command(name = "tek", version, about = "Twisted equivariant K-theory of finite group actions on finite-dimensional C*-algebras")]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
struct CocycleChoice {
    /// Cocycle file.
    #[arg(long)]
    cocycle: Option<PathBuf>,
    /// Cohomology class as coordinates over the invariant factors, e.g. `1,0`.
    #[arg(long, value_delimiter = ',', conflicts_with = "cocycle")]
    class: Option<Vec<u64>>,
    /// Use the inverse (complex conjugate) of the chosen cocycle.
    #[arg(long)]
    inverse: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Basic facts about a finite group.
    Group {
        #[arg(long)]
        group: PathBuf,
    },
    /// The Schur multiplier, and the classes of any given representations.
    H2 {
        #[arg(long)]
        group: PathBuf,
        /// Projective representation files to classify.
        #[arg(long)]
        rep: Vec<PathBuf>,
    },
    /// Irreducible projective representations for one cocycle.
    Irreps {
        #[arg(long)]
        group: PathBuf,
        #[command(flatten)]
        cocycle: CocycleChoice,
    },
    /// Decomposes a projective representation into irreducibles.
    Decompose {
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long)]
        rep: PathBuf,
    },
    /// Twisted K_0 of an action, for one class or for all.
    K0 {
        #[arg(long)]
        action: PathBuf,
        #[command(flatten)]
        cocycle: CocycleChoice,
    },
    /// The full invariant of an action.
    Ell {
        #[arg(long)]
        action: PathBuf,
    },
    /// Block sizes of a twisted crossed product.
    Crossed {
        #[arg(long)]
        action: PathBuf,
        #[command(flatten)]
        cocycle: CocycleChoice,
    },
    /// Searches an isomorphism between the invariants of two actions.
    Iso {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Validates an action or a decorated Bratteli diagram.
    Check {
        #[arg(long, conflicts_with = "action", required_unless_present = "action")]
        diagram: Option<PathBuf>,
        #[arg(long)]
        action: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Also report the telescope of the diagram by this step.
        #[arg(long)]
        telescope: Option<usize>,
    },
    /// Decides conjugacy of the limit actions of two diagrams.
    Conjugate {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Graphviz rendering of a diagram.
    Dot {
        #[arg(long)]
        diagram: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Output file; stdout if absent.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Group { .. } => "group",
            Command::H2 { .. } => "h2",
            Command::Irreps { .. } => "irreps",
            Command::Decompose { .. } => "decompose",
            Command::K0 { .. } => "k0",
            Command::Ell { .. } => "ell",
            Command::Crossed { .. } => "crossed",
            Command::Iso { .. } => "iso",
            Command::Check { .. } => "check",
            Command::Conjugate { .. } => "conjugate",
            Command::Dot { .. } => "dot",
        }
    }
}

/// A report: JSON fields plus the text rendering.
struct Report {
    json: Map<String, Value>,
    text: Vec<String>,
    /// Raw output that replaces the text rendering (dot).
    raw: Option<String>,
}

impl Report {
    fn new() -> Self {
        Self { json: Map::new(), text: Vec::new(), raw: None }
    }

    fn put(&mut self, key: &str, v: Value) {
        self.json.insert(key.to_string(), v);
    }

    fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }
}

/// Runs the command line with the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    let tol = match cli.cfg.tolerances() {
        Ok(t) => t,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    let cfg = &cli.cfg;
    let name = cli.cmd.name();
    let outcome = catch_unwind(AssertUnwindSafe(|| dispatch(&cli.cmd, cfg, tol)));
    let result = match outcome {
        Ok(r) => r,
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            Err(Error::NumericalDegeneracy(format!("internal failure: {msg}")))
        }
    };
    let mut head = Map::new();
    head.insert("command".into(), json!(name));
    head.insert("seed".into(), json!(cfg.seed));
    match result {
        Ok(mut rep) => {
            let mut full = head;
            full.append(&mut rep.json);
            let value = Value::Object(full);
            if let Some(dir) = &cfg.out_dir {
                if let Err(e) = write_file(&dir.join(format!("{name}.json")), &pretty(&value)) {
                    return report_error(cfg, name, &e, out, err);
                }
            }
            let _ = match (cfg.format, rep.raw) {
                (Format::Json, _) => writeln!(out, "{}", pretty(&value)),
                (Format::Text, Some(raw)) => write!(out, "{raw}"),
                (Format::Text, None) => {
                    let mut s = format!("seed = {}\n", cfg.seed);
                    for l in &rep.text {
                        s.push_str(l);
                        s.push('\n');
                    }
                    write!(out, "{s}")
                }
            };
            0
        }
        Err(e) => report_error(cfg, name, &e, out, err),
    }
}

fn report_error(cfg: &RunConfig, name: &str, e: &Error, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match cfg.format {
        Format::Json => {
            let v = json!({
                "command": name,
                "seed": cfg.seed,
                "error": { "name": e.name(), "message": e.to_string(), "witness": witness(e) },
            });
            let _ = writeln!(out, "{}", pretty(&v));
        }
        Format::Text => {
            let _ = writeln!(err, "seed = {}\nerror: {}: {}", cfg.seed, e.name(), e);
        }
    }
    1
}

fn witness(e: &Error) -> Value {
    match e {
        Error::InvalidCocycle(g, h, k) => json!({ "g": g, "h": h, "k": k }),
        Error::NotProjective(g, h) | Error::NotRootOfUnity(g, h) => json!({ "g": g, "h": h }),
        Error::ModulusNotEmbeddable(m) => json!({ "modulus": m }),
        Error::NotIntegralMultiplicity { irrep, value } => json!({ "irrep": irrep, "value": value }),
        Error::NotIntegral(v) => json!({ "value": v }),
        Error::BadBookkeeping { level, summand } => json!({ "level": level, "summand": summand }),
        Error::BadEdgeClass { level, from, to } => json!({ "level": level, "from": from, "to": to }),
        Error::GroupMismatch | Error::CocycleMismatch | Error::NotStationary => Value::Null,
        Error::NotAGroup(s)
        | Error::InvalidRepresentation(s)
        | Error::NumericalDegeneracy(s)
        | Error::ClassMismatch(s)
        | Error::CovarianceCheckFailed(s)
        | Error::NotPositive(s)
        | Error::NotContractive(s)
        | Error::NotCompatible(s)
        | Error::DimensionOverflow(s)
        | Error::NoUnitary(s)
        | Error::InvalidInput(s)
        | Error::Io(s) => json!({ "detail": s }),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values always serialize")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn r9(x: f64) -> f64 {
    round_to(x, 1e9)
}

/// A group file, or the `"group"` field of any other file.
fn load_group(path: &Path) -> Result<Arc<FiniteGroup>> {
    let v = io::read_json(path)?;
    match v.get("group") {
        Some(g) => Ok(Arc::new(io::parse_group(g)?)),
        None => Ok(Arc::new(io::parse_group(&v)?)),
    }
}

fn context(group: Arc<FiniteGroup>, cfg: &RunConfig, tol: Tolerances) -> Arc<RepContext> {
    Arc::new(RepContext::with_tolerances(group, cfg.seed, tol))
}

fn choose_cocycle(ctx: &RepContext, choice: &CocycleChoice) -> Result<Option<Cocycle>> {
    let c = match (&choice.cocycle, &choice.class) {
        (Some(p), _) => Some(io::parse_cocycle(&io::read_json(p)?, ctx)?),
        (None, Some(coords)) => Some(io::parse_cocycle(&json!({ "class": coords }), ctx)?),
        (None, None) => None,
    };
    Ok(c.map(|c| if choice.inverse { c.inverse() } else { c }))
}

fn class_str(c: &[u64]) -> String {
    format!("{c:?}")
}

fn load_action(path: &Path, cfg: &RunConfig, tol: Tolerances) -> Result<(Arc<RepContext>, FDAction)> {
    let v = io::read_json(path)?;
    let ctx = context(io::file_group(&v)?, cfg, tol);
    let a = io::parse_action(&v, &ctx)?;
    Ok((ctx, a))
}

fn load_diagram(path: &Path, group: Option<Arc<FiniteGroup>>) -> Result<DecoratedBratteli> {
    let v = io::read_json(path)?;
    let g = io::file_group(&v)?;
    let g = match group {
        Some(h) if *h == *g => h,
        Some(_) => return Err(Error::GroupMismatch),
        None => g,
    };
    io::parse_diagram(&v, g)
}

fn matrix_json(m: &IntMatrix) -> Value {
    json!(m.to_rows())
}

fn hom_json(h: &InvariantHom) -> Value {
    json!({
        "matrices": h.matrices.iter().map(matrix_json).collect::<Vec<_>>(),
        "positive": h.positive,
        "contractive": h.contractive,
        "unital": h.unital,
    })
}

fn dispatch(cmd: &Command, cfg: &RunConfig, tol: Tolerances) -> Result<Report> {
    let mut r = Report::new();
    match cmd {
        Command::Group { group } => {
            let g = load_group(group)?;
            let ab = g.abelianization();
            r.put("group", io::group_to_json(&g));
            r.put("order", json!(g.order()));
            r.put("abelian", json!(g.is_abelian()));
            r.put("exponent", json!(g.exponent()));
            r.put("conjugacy_classes", json!(g.conjugacy_classes().len()));
            r.put("abelianization", json!(ab.factors));
            r.line(format!("order = {}", g.order()));
            r.line(format!("abelian = {}", g.is_abelian()));
            r.line(format!("exponent = {}", g.exponent()));
            r.line(format!("conjugacy classes = {}", g.conjugacy_classes().len()));
            r.line(format!("abelianization = {ab}"));
        }
        Command::H2 { group, rep } => {
            let g = load_group(group)?;
            let ctx = context(g, cfg, tol);
            let basis = ctx.basis();
            let inv = basis.invariant_factors();
            r.put("invariant_factors", json!(inv.factors));
            r.put("num_classes", json!(basis.num_classes()));
            r.line(format!("H2 = {inv}"));
            let mut classes = Vec::new();
            for p in rep {
                let pi = io::parse_rep(&io::read_json(p)?, &ctx)?;
                let coords = basis.class_coordinates(pi.cocycle())?;
                r.line(format!("{}: class {}", p.display(), class_str(&coords)));
                classes.push(json!({ "file": p.display().to_string(), "class": coords, "dim": pi.dim() }));
            }
            if !rep.is_empty() {
                r.put("reps", Value::Array(classes));
            }
        }
        Command::Irreps { group, cocycle } => {
            let g = load_group(group)?;
            let ctx = context(g.clone(), cfg, tol);
            let lambda = choose_cocycle(&ctx, cocycle)?.unwrap_or_else(|| Cocycle::trivial(g));
            let coords = ctx.basis().class_coordinates(&lambda)?;
            let table = ctx.irrep_table(&lambda)?;
            let regular = regular_class_count(&lambda);
            r.put("cocycle", io::cocycle_to_json(&lambda));
            r.put("class", json!(coords));
            r.put("dims", json!(table.dims()));
            r.put("regular_classes", json!(regular));
            r.put("irreps", Value::Array(table.irreps().iter().map(io::rep_to_json).collect()));
            r.line(format!("class = {}", class_str(&coords)));
            r.line(format!("irreps = {}", table.len()));
            r.line(format!("dims = {:?}", table.dims()));
            r.line(format!("regular classes = {regular}"));
        }
        Command::Decompose { group, rep } => {
            let v = io::read_json(rep)?;
            let g = match (group, v.get("group")) {
                (Some(p), _) => load_group(p)?,
                (None, Some(gv)) => Arc::new(io::parse_group(gv)?),
                (None, None) => return Err(Error::InvalidInput("pass --group or give the rep file a \"group\" field".into())),
            };
            let ctx = context(g, cfg, tol);
            let pi = io::parse_rep(&v, &ctx)?;
            let table = ctx.irrep_table(pi.cocycle())?;
            let (x, residual) = decompose_detailed(&pi, &table, &tol)?;
            let coords = ctx.basis().class_coordinates(pi.cocycle())?;
            r.put("cocycle", io::cocycle_to_json(pi.cocycle()));
            r.put("class", json!(coords));
            r.put("dim", json!(pi.dim()));
            r.put("dims", json!(table.dims()));
            r.put("multiplicities", json!(x.coeffs()));
            r.put("residual", json!(r9(residual)));
            r.line(format!("class = {}", class_str(&coords)));
            r.line(format!("dim = {}", pi.dim()));
            r.line(format!("irrep dims = {:?}", table.dims()));
            r.line(format!("multiplicities = {:?}", x.coeffs()));
        }
        Command::K0 { action, cocycle } => {
            let (ctx, a) = load_action(action, cfg, tol)?;
            let basis = ctx.basis();
            let lambdas: Vec<Cocycle> = match choose_cocycle(&ctx, cocycle)? {
                Some(c) => vec![c],
                None => basis.all_classes().iter().map(|c| basis.representative(c)).collect(),
            };
            let mut groups = Vec::new();
            for lambda in &lambdas {
                let k = kaction::k0_lambda(&ctx, &a, lambda)?;
                let coords = basis.class_coordinates(lambda)?;
                r.line(format!(
                    "K0 at {}: rank {} components {:?}{}",
                    class_str(&coords),
                    k.rank(),
                    k.component_ranks(),
                    k.unit().map(|u| format!(" unit {u:?}")).unwrap_or_default()
                ));
                groups.push(json!({
                    "class": coords,
                    "cocycle": io::cocycle_to_json(lambda),
                    "rank": k.rank(),
                    "component_ranks": k.component_ranks(),
                    "unit": k.unit(),
                }));
            }
            r.put("groups", Value::Array(groups));
        }
        Command::Ell { action } => {
            let (ctx, a) = load_action(action, cfg, tol)?;
            let e = kaction::ell_invariant(&ctx, &a)?;
            let basis = ctx.basis();
            let summand_classes: Vec<Vec<u64>> =
                (0..e.num_summands()).map(|j| e.summand_class(j).map(|c| basis.class_at(c))).collect::<Result<_>>()?;
            r.put("unital", json!(e.is_unital()));
            r.put("summand_classes", json!(summand_classes));
            r.put("ranks", json!(e.ranks()));
            r.put("unit", json!(e.unit()));
            let groups: Vec<Value> = e
                .groups()
                .iter()
                .enumerate()
                .map(|(c, k)| {
                    json!({
                        "class": basis.class_at(c),
                        "rank": k.rank(),
                        "component_ranks": k.component_ranks(),
                    })
                })
                .collect();
            r.put("groups", Value::Array(groups));
            r.line(format!("H2 = {}", basis.invariant_factors()));
            r.line(format!("unital = {}", e.is_unital()));
            r.line(format!("summand classes = {summand_classes:?}"));
            for (c, k) in e.groups().iter().enumerate() {
                r.line(format!("K0 at {}: rank {} components {:?}", class_str(&basis.class_at(c)), k.rank(), k.component_ranks()));
            }
            r.line(format!("unit = {:?}", e.unit()));
        }
        Command::Crossed { action, cocycle } => {
            let (ctx, a) = load_action(action, cfg, tol)?;
            let omega = choose_cocycle(&ctx, cocycle)?.unwrap_or_else(|| Cocycle::trivial(ctx.group().clone()));
            let coords = ctx.basis().class_coordinates(&omega)?;
            let blocks = kaction::twisted_crossed_product_with(&a, &omega, cfg.seed, &tol)?;
            r.put("class", json!(coords));
            r.put("blocks", json!(blocks));
            r.line(format!("twist class = {}", class_str(&coords)));
            r.line(format!("blocks = {blocks:?}"));
        }
        Command::Iso { left, right } => {
            let (ctx, a) = load_action(left, cfg, tol)?;
            let vb = io::read_json(right)?;
            if *io::file_group(&vb)? != **ctx.group() {
                return Err(Error::GroupMismatch);
            }
            let b = io::parse_action(&vb, &ctx)?;
            let e1 = kaction::ell_invariant(&ctx, &a)?;
            let e2 = kaction::ell_invariant(&ctx, &b)?;
            let iso = kaction::iso_invariants(&e1, &e2)?;
            let module = kaction::trivial_component_module_iso(&e1, &e2)?;
            r.put("isomorphic", json!(iso.is_some()));
            r.put("trivial_class_module_iso", json!(module));
            r.put("left_ranks", json!(e1.ranks()));
            r.put("right_ranks", json!(e2.ranks()));
            if let Some((f, g)) = &iso {
                r.put("forward", hom_json(f));
                r.put("backward", hom_json(g));
            }
            r.line(format!("isomorphic = {}", iso.is_some()));
            r.line(format!("trivial-class modules isomorphic = {}", module.is_some()));
            r.line(format!("ranks = {:?} vs {:?}", e1.ranks(), e2.ranks()));
        }
        Command::Check { diagram, action, depth, telescope } => {
            if let Some(p) = action {
                let (ctx, a) = load_action(p, cfg, tol)?;
                let basis = ctx.basis();
                let classes: Vec<Vec<u64>> =
                    a.cocycles().iter().map(|c| basis.class_coordinates(c)).collect::<Result<_>>()?;
                r.put("kind", json!("action"));
                r.put("valid", json!(true));
                r.put("sizes", json!(a.sizes()));
                r.put("summand_classes", json!(classes));
                r.put("unital", json!(a.is_unital()));
                r.line("action is valid");
                r.line(format!("sizes = {:?}", a.sizes()));
                r.line(format!("summand classes = {classes:?}"));
            }
            if let Some(p) = diagram {
                let d = load_diagram(p, None)?;
                let ctx = context(d.group.clone(), cfg, tol);
                limits::validate_diagram(&ctx, &d)?;
                let depth = d.available((*depth).max(1));
                let u = limits::unroll(&ctx, &d, depth)?;
                let dims: Vec<Vec<usize>> = (0..u.units.len()).map(|k| u.level_dims(k)).collect();
                r.put("kind", json!("diagram"));
                r.put("valid", json!(true));
                r.put("unital", json!(d.unital));
                r.put("level_dims", json!(dims));
                r.line("diagram is valid");
                for (k, l) in dims.iter().enumerate() {
                    r.line(format!("level {k}: {l:?}"));
                }
                if d.stationary.is_some() {
                    let sr = limits::stable_rank_per_class(&ctx, &d)?;
                    r.put("stable_ranks", json!(sr.iter().map(|s| json!({ "class": s.class, "rank": s.rank })).collect::<Vec<_>>()));
                    for s in &sr {
                        r.line(format!("stable rank at {} = {}", class_str(&s.class), s.rank));
                    }
                }
                if let Some(step) = telescope {
                    if *step == 0 {
                        return Err(Error::InvalidInput("telescope step must be positive".into()));
                    }
                    let t = limits::telescope(&ctx, &d, *step)?;
                    r.put("telescope", io::diagram_to_json(&t));
                    r.line(format!("telescope by {step}: {} listed levels", t.levels.len()));
                }
            }
        }
        Command::Conjugate { left, right, depth } => {
            let l = load_diagram(left, None)?;
            let rt = load_diagram(right, Some(l.group.clone()))?;
            let ctx = context(l.group.clone(), cfg, tol);
            let verdict = limits::decide_conjugacy(&ctx, &l, &rt, *depth, cfg.seed)?;
            r.put("depth", json!(depth));
            r.put("verdict", json!(verdict.tag()));
            r.line(verdict.tag());
            match &verdict {
                ConjugacyVerdict::ConjugateCertified(w) => {
                    let chain = |maps: &[limits::ChainMap]| -> Value {
                        Value::Array(maps.iter().map(|m| json!({ "from": m.from, "to": m.to, "map": hom_json(&m.map) })).collect())
                    };
                    r.put(
                        "witness",
                        json!({
                            "forward": chain(&w.forward),
                            "backward": chain(&w.backward),
                            "repeats": w.repeats,
                            "lifts_verified": w.lifts_verified,
                            "lifts_skipped": w.lifts_skipped,
                            "max_residual": r9(w.max_residual),
                        }),
                    );
                    let steps: Vec<String> = w.forward.iter().map(|m| format!("{}->{}", m.from, m.to)).collect();
                    r.line(format!("forward maps = [{}]", steps.join(", ")));
                    r.line(format!("lifts verified = {}, skipped = {}", w.lifts_verified, w.lifts_skipped));
                }
                ConjugacyVerdict::NotConjugateCertified(o) => {
                    let (j, line) = match o {
                        Obstruction::Unital { left, right } => {
                            (json!({ "kind": "Unital", "left": left, "right": right }), format!("unital: {left} vs {right}"))
                        }
                        Obstruction::StableRank { class, left, right } => (
                            json!({ "kind": "StableRank", "class": class, "left": left, "right": right }),
                            format!("stable rank at {}: {left} vs {right}", class_str(class)),
                        ),
                        Obstruction::FiniteLimit { left_level, right_level } => (
                            json!({ "kind": "FiniteLimit", "left_level": left_level, "right_level": right_level }),
                            format!("non-isomorphic finite limits (levels {left_level} and {right_level})"),
                        ),
                    };
                    r.put("obstruction", j);
                    r.line(line);
                }
                ConjugacyVerdict::Unknown { depth, note } => {
                    r.put("note", json!(note));
                    r.line(format!("undecided at depth {depth}: {note}"));
                }
            }
        }
        Command::Dot { diagram, depth, output } => {
            let d = load_diagram(diagram, None)?;
            let ctx = context(d.group.clone(), cfg, tol);
            limits::validate_diagram(&ctx, &d)?;
            let dot = limits::to_dot(&ctx, &d, *depth)?;
            let target = output.clone().or_else(|| cfg.out_dir.as_ref().map(|d| d.join("diagram.dot")));
            match &target {
                Some(p) => {
                    write_file(p, &dot)?;
                    r.put("output", json!(p.display().to_string()));
                    r.line(format!("wrote {}", p.display()));
                }
                None => r.raw = Some(dot.clone()),
            }
            r.put("dot", json!(dot));
        }
    }
    Ok(r)
}
