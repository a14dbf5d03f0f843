//! The `mia` command line.
//!
//! Exit codes: 0 when every check passes (or a search finds a witness), 1 when
//! a checked property fails, 2 on usage, input or resource errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use mia_core::embedding::{
    embed_algebra_into_complex_of_canonical, embed_into_3frame, equations_hold_in_image, AlgebraEmbedding,
};
use mia_core::frames::{
    canonical_frame, canonical_frame_exhaustive, check_frame_property, complex_algebra,
    embed_frame_into_canonical_of_complex, FrameProperty, RelationSel,
};
use mia_core::io;
use mia_core::logic::{
    formula_pool, modal_equiv, parse, soundness_report, soundness_report_unchecked, underline_model, Model, Schema,
};
use mia_core::mixture::{special_frame, special_relations};
use mia_core::predicates::{parse_predicate_list, AlgebraPredicate, SIGMA_B};
use mia_core::search::{run_search, Candidate, FrameRequirement, SearchMode, SearchSpec, DEFAULT_SEARCH_BUDGET};
use mia_core::{Error, PredicateReport, PsAlgebra, TernaryFrame, Witness};

#[derive(Parser, Debug)]
#[command(name = "mia", version, about = "Check PS-algebras, ternary frames and K# formulas")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Cap on enumerated valuations or search candidates.
    #[arg(long, global = true, env = "MIA_BUDGET")]
    budget: Option<u128>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run algebra predicates.
    CheckAlgebra {
        file: PathBuf,
        /// Comma-separated predicate ids; `sigma`, `sigmaB`, `b-algebra` expand.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Run frame properties, e.g. `wmia,bt1,bt2-on-S`.
    CheckFrame {
        file: PathBuf,
        #[arg(long)]
        props: Option<String>,
    },
    /// The complex algebra of a frame.
    Complex { file: PathBuf },
    /// The canonical frame of an algebra.
    Canonical {
        file: PathBuf,
        /// Quantify over all element pairs instead of atom tables.
        #[arg(long)]
        exhaustive: bool,
    },
    /// The one-relation special frame of a wMIA frame.
    Special { file: PathBuf },
    /// Embed a wMIA into the complex algebra of a special frame.
    Embed {
        file: PathBuf,
        #[arg(long)]
        suite: Option<String>,
    },
    /// Algebra into Cm(Cf(A)), or frame into Cf(Cm(F)).
    EmbedCanonical { file: PathBuf },
    /// Evaluate a formula in a model.
    Mc {
        file: PathBuf,
        #[arg(long)]
        formula: String,
        /// Check truth at this world only.
        #[arg(long)]
        world: Option<String>,
        /// Allow frames that are not wMIA frames.
        #[arg(long)]
        unchecked: bool,
    },
    /// Check every axiom instance over a bounded formula pool.
    Sound {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        vars: usize,
        /// Allow frames that are not wMIA frames.
        #[arg(long)]
        unchecked: bool,
        /// Comma-separated schema ids (default: all).
        #[arg(long)]
        schemas: Option<String>,
    },
    /// Compare global truth over a bounded formula pool.
    Equiv {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        vars: usize,
        /// Second model (default: the underlined model of the first).
        #[arg(long)]
        other: Option<PathBuf>,
    },
    /// Enumerate or sample algebras or frames.
    Search(SearchArgs),
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Search algebras on N atoms.
    #[arg(
        long,
        value_name = "N",
        conflicts_with = "frames",
        required_unless_present = "frames"
    )]
    algebras: Option<usize>,
    /// Search frames on N worlds.
    #[arg(long, value_name = "N")]
    frames: Option<usize>,
    #[arg(long, default_value = "")]
    require: String,
    #[arg(long, default_value = "")]
    forbid: String,
    /// Stop after this many hits.
    #[arg(long)]
    limit: Option<usize>,
    /// `exhaustive`, `stratified:N` or `random:N[:SEED]`.
    #[arg(long, default_value = "exhaustive")]
    mode: String,
    /// Draw number to start from.
    #[arg(long, default_value_t = 0)]
    cursor: u128,
    #[arg(long)]
    override_caps: bool,
    /// Write the run manifest, with timing, to this file.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

struct Outcome {
    code: i32,
    json: Value,
    text: String,
}

impl Outcome {
    fn new(ok: bool, json: Value, text: String) -> Self {
        Outcome {
            code: if ok { 0 } else { 1 },
            json,
            text,
        }
    }
}

/// Runs one command. `args` includes the program name.
pub fn dispatch<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.global.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(Error::Usage(format!("cannot start {t} threads: {e}"))),
        },
        None => run(&cli),
    };
    match result {
        Ok(o) => {
            let body = if cli.global.json {
                io::to_pretty(&o.json)
            } else {
                o.text
            };
            let _ = out.write_all(body.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "mia: {e}");
            2
        }
    }
}

fn read_json(path: &Path) -> mia_core::Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
    io::parse_json(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn read_algebra(path: &Path) -> mia_core::Result<PsAlgebra> {
    io::algebra_from_json(&read_json(path)?)
}

fn read_frame(path: &Path) -> mia_core::Result<TernaryFrame> {
    io::frame_from_json(&read_json(path)?)
}

fn run(cli: &Cli) -> mia_core::Result<Outcome> {
    let budget = cli.global.budget;
    let valuation_budget = budget.unwrap_or(mia_core::logic::DEFAULT_BUDGET);
    match &cli.command {
        Command::CheckAlgebra { file, suite } => {
            let a = read_algebra(file)?;
            let preds = match suite {
                Some(s) => parse_predicate_list(s)?,
                None => AlgebraPredicate::ALL.to_vec(),
            };
            let reports: Vec<PredicateReport> = preds.iter().map(|p| p.check(&a)).collect();
            Ok(report_list(&reports, Some(&a), None))
        }
        Command::CheckFrame { file, props } => {
            let f = read_frame(file)?;
            let reqs = match props {
                Some(p) => mia_core::search::parse_frame_requirements(p)?,
                None => std::iter::once(FrameRequirement::Wmia)
                    .chain(
                        FrameProperty::ALL
                            .iter()
                            .filter(|&&p| p != FrameProperty::WMia)
                            .map(|&p| FrameRequirement::Property(p, RelationSel::R)),
                    )
                    .collect(),
            };
            let mut reports = Vec::new();
            for r in reqs {
                let mut rep = match r {
                    FrameRequirement::Wmia => check_frame_property(&f, FrameProperty::WMia, RelationSel::R)?,
                    FrameRequirement::Special => {
                        let diff = f.r().difference(f.s()).union(&f.s().difference(f.r()));
                        let first = diff.iter().next();
                        match first {
                            Some(t) => PredicateReport::fails("special", Witness::Worlds(t.to_vec())),
                            None => PredicateReport::holds("special"),
                        }
                    }
                    FrameRequirement::Property(p, sel) => check_frame_property(&f, p, sel)?,
                };
                rep.id = r.id();
                reports.push(rep);
            }
            Ok(report_list(&reports, None, Some(&f)))
        }
        Command::Complex { file } => {
            let a = complex_algebra(&read_frame(file)?)?;
            let text = algebra_text(&a);
            Ok(Outcome::new(true, io::algebra_to_json(&a), text))
        }
        Command::Canonical { file, exhaustive } => {
            let a = read_algebra(file)?;
            let f = if *exhaustive {
                canonical_frame_exhaustive(&a)
            } else {
                canonical_frame(&a)
            };
            let text = frame_text(&f);
            Ok(Outcome::new(true, io::frame_to_json(&f), text))
        }
        Command::Special { file } => {
            let f = read_frame(file)?;
            let (r, s) = special_relations(&f)?;
            let equal = r == s;
            let sp = special_frame(&f)?;
            let json = json!({ "frame": io::frame_to_json(&sp), "relations_agree": equal });
            let text = format!(
                "{}relations agree: {}\n",
                frame_text(&sp),
                if equal { "yes" } else { "no" }
            );
            Ok(Outcome::new(equal, json, text))
        }
        Command::Embed { file, suite } => {
            let a = read_algebra(file)?;
            let e = embed_into_3frame(&a)?;
            let suite = match suite {
                Some(s) => parse_predicate_list(s)?,
                None => SIGMA_B.to_vec(),
            };
            let eq = equations_hold_in_image(&e, &suite)?;
            Ok(embedding_outcome(&e, Some(&eq)))
        }
        Command::EmbedCanonical { file } => {
            let v = read_json(file)?;
            if v.get("atoms").is_some() {
                let a = io::algebra_from_json(&v)?;
                let e = embed_algebra_into_complex_of_canonical(&a)?;
                Ok(embedding_outcome(&e, None))
            } else {
                let f = io::frame_from_json(&v)?;
                let e = embed_frame_into_canonical_of_complex(&f)?;
                let json = io::frame_embedding_to_json(&f, &e);
                let mut text = format!(
                    "frame into Cf(Cm(F)): {} worlds into {}\n",
                    f.num_worlds(),
                    e.canonical.num_worlds()
                );
                for (w, &img) in e.map.map.iter().enumerate() {
                    text += &format!("  {} -> {}\n", f.worlds()[w], e.canonical.worlds()[img]);
                }
                text += &format!(
                    "injective: {}\nR preserved: {}\nS preserved: {}\n",
                    yes(e.injective),
                    yes(e.r_preserved),
                    yes(e.s_preserved)
                );
                if let Some(t) = e.failure {
                    text += &format!("first failure: {}\n", f.show_triple(t));
                }
                Ok(Outcome::new(e.verified(), json, text))
            }
        }
        Command::Mc {
            file,
            formula,
            world,
            unchecked,
        } => {
            let m = io::model_from_json(&read_json(file)?, *unchecked)?;
            let phi = parse(formula)?;
            let ext = m.eval(&phi)?;
            let f = m.frame();
            let (ok, scope) = match world {
                Some(w) => {
                    let i = f
                        .world_index(w)
                        .ok_or_else(|| Error::Usage(format!("no world named `{w}`")))?;
                    (ext.atoms().any(|a| a == i), w.clone())
                }
                None => (ext == f.all_worlds(), "every world".to_string()),
            };
            let json = json!({
                "formula": phi.render_sugared(),
                "extension": io::world_set_json(f, ext),
                "world": world,
                "holds": ok,
            });
            let text = format!(
                "{}\nextension: {{{}}}\n{} at {}\n",
                phi.render_sugared(),
                f.world_names(ext).join(", "),
                if ok { "true" } else { "false" },
                scope
            );
            Ok(Outcome::new(ok, json, text))
        }
        Command::Sound {
            file,
            depth,
            vars,
            unchecked,
            schemas,
        } => {
            let f = read_frame(file)?;
            let rep = match (schemas, *unchecked) {
                (None, false) => soundness_report(&f, *depth, *vars, valuation_budget)?,
                (s, unchecked) => {
                    if !unchecked && !f.is_wmia() {
                        return Err(Error::Precondition("frame is not a wMIA frame (S ⊄ R)".into()));
                    }
                    let list: Vec<Schema> = match s {
                        Some(s) => s
                            .split(',')
                            .map(str::trim)
                            .filter(|t| !t.is_empty())
                            .map(str::parse)
                            .collect::<mia_core::Result<_>>()?,
                        None => Schema::ALL.to_vec(),
                    };
                    soundness_report_unchecked(&f, *depth, *vars, valuation_budget, &list)?
                }
            };
            let mut text = format!(
                "pool: {} formulas (depth {}, {} vars), {} valuations\n",
                rep.pool_size, rep.depth, rep.vars, rep.valuations
            );
            for s in &rep.schemas {
                match &s.failure {
                    None => text += &format!("{}: valid ({} instances)\n", s.schema.id(), s.instances),
                    Some(fail) => {
                        text += &format!(
                            "{}: fails\n  instance: {}\n  {}\n",
                            s.schema.id(),
                            fail.instance.render_sugared(),
                            countermodel_text(&f, &fail.valuation, fail.world)
                        )
                    }
                }
            }
            Ok(Outcome::new(rep.all_valid(), io::soundness_json(&f, &rep), text))
        }
        Command::Equiv {
            file,
            depth,
            vars,
            other,
        } => {
            let left = io::model_from_json(&read_json(file)?, false)?;
            let right: Model = match other {
                Some(p) => io::model_from_json(&read_json(p)?, false)?,
                None => underline_model(&left)?,
            };
            for (name, m) in [("first", &left), ("second", &right)] {
                if m.valuation().len() > *vars {
                    return Err(Error::Usage(format!(
                        "{name} model values {} variables but --vars is {vars}",
                        m.valuation().len()
                    )));
                }
            }
            let pad = |m: &Model| -> mia_core::Result<Model> {
                let mut v = m.valuation().to_vec();
                v.resize(*vars, mia_core::WorldSet::ZERO);
                Model::new(m.frame().clone(), v)
            };
            let (left, right) = (pad(&left)?, pad(&right)?);
            let pool = formula_pool(*vars, *depth)?;
            let rep = modal_equiv(&left, &right, &pool)?;
            let json = json!({
                "report": io::report_json(&rep, None, None),
                "pool_size": pool.len(),
                "depth": depth,
                "vars": vars,
            });
            let text = match &rep.witness {
                None => format!("agree on all {} formulas (depth {depth}, {vars} vars)\n", pool.len()),
                Some(w) => format!("disagree: {}\n", witness_text(w, None, None)),
            };
            Ok(Outcome::new(rep.holds, json, text))
        }
        Command::Search(s) => run_search_cmd(s, budget),
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn report_list(reports: &[PredicateReport], a: Option<&PsAlgebra>, f: Option<&TernaryFrame>) -> Outcome {
    let base = a.map(|a| a.base());
    let ok = reports.iter().all(|r| r.holds);
    let json = json!({
        "all_hold": ok,
        "reports": reports.iter().map(|r| io::report_json(r, base, f)).collect::<Vec<_>>(),
    });
    let mut text = String::new();
    for r in reports {
        match &r.witness {
            None if r.holds => text += &format!("{}: holds\n", r.id),
            None => text += &format!("{}: fails\n", r.id),
            Some(w) => text += &format!("{}: fails, witness {}\n", r.id, witness_text(w, a, f)),
        }
    }
    Outcome::new(ok, json, text)
}

fn witness_text(w: &Witness, a: Option<&PsAlgebra>, f: Option<&TernaryFrame>) -> String {
    match w {
        Witness::Elements(es) => {
            let parts: Vec<String> = es
                .iter()
                .map(|&x| match a {
                    Some(a) => a.base().show(x),
                    None => x.bits().to_string(),
                })
                .collect();
            format!("({})", parts.join(", "))
        }
        Witness::Worlds(ws) => {
            let parts: Vec<String> = ws
                .iter()
                .map(|&i| match f {
                    Some(f) => f.worlds()[i].clone(),
                    None => i.to_string(),
                })
                .collect();
            format!("({})", parts.join(", "))
        }
        Witness::Countermodel { valuation, world } => match f {
            Some(f) => countermodel_text(f, valuation, *world),
            None => format!("valuation {valuation:?} at world {world}"),
        },
        Witness::Disagreement { formula, true_in_left } => format!(
            "{formula} is globally true only in the {} model",
            if *true_in_left { "first" } else { "second" }
        ),
    }
}

fn countermodel_text(f: &TernaryFrame, valuation: &[mia_core::WorldSet], world: usize) -> String {
    let parts: Vec<String> = valuation
        .iter()
        .enumerate()
        .map(|(k, v)| format!("p{k} = {{{}}}", f.world_names(*v).join(", ")))
        .collect();
    format!("fails at {} under {}", f.worlds()[world], parts.join("; "))
}

fn algebra_text(a: &PsAlgebra) -> String {
    let b = a.base();
    let names = b.atom_names();
    let mut text = format!("atoms: {}\n", names.join(", "));
    for (label, t) in [("f", a.f_table()), ("g", a.g_table())] {
        for (p, pn) in names.iter().enumerate() {
            for (q, qn) in names.iter().enumerate() {
                text += &format!("{label}({pn}, {qn}) = {}\n", b.show(t.at(p, q)));
            }
        }
    }
    text
}

fn frame_text(f: &TernaryFrame) -> String {
    let list = |rel: &mia_core::TripleSet| rel.iter().map(|t| f.show_triple(t)).collect::<Vec<_>>().join(" ");
    let mut text = format!("worlds ({}): {}\n", f.num_worlds(), f.worlds().join(", "));
    if f.is_special() {
        text += &format!("R = S ({} triples): {}\n", f.r().len(), list(f.r()));
    } else {
        text += &format!("R ({} triples): {}\n", f.r().len(), list(f.r()));
        text += &format!("S ({} triples): {}\n", f.s().len(), list(f.s()));
    }
    text
}

fn embedding_outcome(e: &AlgebraEmbedding, eq: Option<&PredicateReport>) -> Outcome {
    let mut json = io::embedding_to_json(e);
    let mut ok = e.verified();
    if let Some(r) = eq {
        ok &= r.holds;
        json.as_object_mut()
            .expect("object")
            .insert("equations".into(), io::report_json(r, None, None));
    }
    let base = e.source.base();
    let mut text = format!(
        "{} elements into the complex algebra of a {}-world frame\n",
        base.num_elements(),
        e.target.num_worlds()
    );
    for x in base.elements() {
        text += &format!(
            "  {} -> {{{}}}\n",
            base.show(x),
            e.target.world_names(e.image(x)).join(", ")
        );
    }
    text += &format!(
        "injective: {}\nf commutes: {}\ng commutes: {}\n",
        yes(e.injective),
        yes(e.f_commutes),
        yes(e.g_commutes)
    );
    if let Some(r) = eq {
        text += &match &r.witness {
            None => "equations agree in the image: yes\n".to_string(),
            Some(w) => format!("equations agree in the image: no, {}\n", witness_text(w, None, None)),
        };
    }
    Outcome::new(ok, json, text)
}

fn run_search_cmd(s: &SearchArgs, budget: Option<u128>) -> mia_core::Result<Outcome> {
    let mut spec = match (s.algebras, s.frames) {
        (Some(n), None) => SearchSpec::algebras(n, &s.require, &s.forbid)?,
        (None, Some(n)) => SearchSpec::frames(n, &s.require, &s.forbid)?,
        _ => return Err(Error::Usage("give exactly one of --algebras N or --frames N".into())),
    };
    spec.mode = s.mode.parse::<SearchMode>()?;
    spec.limit = s.limit;
    spec.cursor = s.cursor;
    spec.override_caps = s.override_caps;
    spec.budget = budget.unwrap_or(DEFAULT_SEARCH_BUDGET);
    let r = run_search(&spec)?;
    if let Some(path) = &s.manifest {
        fs::write(path, io::to_pretty(&io::manifest_json(&r.manifest, true)))
            .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let hits: Vec<Value> = r
        .hits
        .iter()
        .map(|h| {
            let mut m = Map::new();
            m.insert("draw".into(), json!(h.draw.to_string()));
            m.insert("index".into(), json!(h.index.to_string()));
            match &h.candidate {
                Candidate::Algebra(a) => m.insert("algebra".into(), io::algebra_to_json(a)),
                Candidate::Frame(f) => m.insert("frame".into(), io::frame_to_json(f)),
            };
            Value::Object(m)
        })
        .collect();
    let json = json!({ "hits": hits, "manifest": io::manifest_json(&r.manifest, false) });
    let man = &r.manifest;
    let mut text = String::new();
    for h in &r.hits {
        text += &format!("hit at index {} (draw {})\n", h.index, h.draw);
        text += &match &h.candidate {
            Candidate::Algebra(a) => algebra_text(a),
            Candidate::Frame(f) => frame_text(f),
        };
    }
    text += &format!(
        "examined {} of {} draws ({}), {} hits, cursor {}{}\n",
        man.examined,
        spec.draws(),
        man.mode,
        man.matched,
        man.cursor,
        if man.exhausted { ", exhausted" } else { "" }
    );
    if r.hits.is_empty() && man.exhausted {
        text += "no witness exists in the examined space\n";
    }
    Ok(Outcome::new(!r.hits.is_empty(), json, text))
}
