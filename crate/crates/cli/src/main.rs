//! `abc`: command-line front end for abc-core.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage error or unknown verb,
//! 3 unreadable or malformed input file, 4 capacity exceeded, 5 `verify`
//! found a counterexample.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use abc_core::branch::{assemble, FamilyConfig};
use abc_core::enumerate::brute_force_min;
use abc_core::extremal::{c0, family_search, gamma_bounds, greedy_tree, transition_scan};
use abc_core::graph::{abc_index, degree_sequence, free_code, DegreeSequence, Tree};
use abc_core::lemmas::{sweep, validate_structure, ParamRange, Status, SweepSpec, REGISTRY};
use abc_core::transforms::local_search;
use abc_core::{io, AbcError};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "abc", version, about = "Atom-bond-connectivity index of trees")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format; json unless the verb says otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (also ABC_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for generated inputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// ABC index of a tree file (text or JSON form).
    Index { file: PathBuf },
    /// Exhaustive minimum over all trees of order n.
    Brute {
        n: usize,
        /// List every minimizing tree, not just the first.
        #[arg(long)]
        all_min: bool,
        /// Attach the structural checklist of each listed witness.
        #[arg(long)]
        check_structure: bool,
    },
    /// Greedy tree of a degree sequence, e.g. `abc greedy 4,3,2,2,1,1,1,1,1`.
    Greedy {
        #[arg(value_delimiter = ',', required = true)]
        degrees: Vec<u32>,
    },
    /// Best root-plus-branches tree of order n.
    Family {
        n: usize,
        #[arg(long)]
        unconstrained: bool,
        /// Also write the assembled tree as JSON.
        #[arg(long)]
        emit_tree: Option<PathBuf>,
    },
    /// Bounds on the minimum index for orders from..=to.
    Gamma {
        from: usize,
        to: usize,
        #[arg(long, default_value_t = 1)]
        step: usize,
    },
    /// Family search over orders from..=to (CSV by default).
    Scan { from: usize, to: usize },
    /// Greedy descent over improvement moves.
    LocalSearch {
        /// Tree file; omit with --random.
        file: Option<PathBuf>,
        /// Start from a random tree of this order (uses --seed).
        #[arg(long, conflicts_with = "file")]
        random: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Write one JSON line per accepted move.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Sweep a registered inequality over its parameter box.
    Verify {
        #[arg(required_unless_present = "list")]
        lemma_id: Option<String>,
        /// Print the registry instead.
        #[arg(long)]
        list: bool,
        /// Override a parameter range, `name=a..b` or `name=a..b:step`.
        #[arg(long = "param")]
        params: Vec<String>,
        /// Use the full-size default boxes.
        #[arg(long)]
        full: bool,
    },
    /// Index difference and isomorphism of two tree files.
    Compare { a: PathBuf, b: PathBuf },
    /// Rewrite a tree file, or assemble a family config file, as JSON, text or DOT.
    Export {
        file: PathBuf,
        #[arg(long)]
        dot: bool,
    },
}

/// Input that could not be read or parsed.
#[derive(Debug)]
struct BadFile(String);

impl std::fmt::Display for BadFile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for BadFile {}

/// Formats with 17 significant digits, positional where that stays short.
fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-5..17).contains(&exp) {
        return sci;
    }
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut s = if exp >= 0 {
        let (int, frac) = digits.split_at(exp as usize + 1);
        if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        }
    } else {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    };
    if neg {
        s.insert(0, '-');
    }
    s
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| BadFile(format!("{}: {e}", path.display())).into())
}

fn read_tree(path: &Path) -> Result<Tree> {
    let text = read_file(path)?;
    io::parse_tree(&text).map_err(|e| BadFile(format!("{}: {e}", path.display())).into())
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<()> {
    let mut body = body.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match out {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn json_text(v: &Value) -> String {
    serde_json::to_string(v).expect("values serialize")
}

fn table(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(header.to_vec(), &mut out);
    for r in rows {
        line(r.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

fn tabulate(format: Format, header: &[&str], rows: &[Vec<String>], json_rows: Value) -> Result<String> {
    Ok(match format {
        Format::Json => json_text(&json_rows),
        Format::Csv => table(header, rows)?,
        Format::Text => text_table(header, rows),
    })
}

fn parse_param(s: &str) -> Result<(String, ParamRange)> {
    let bad = || anyhow!("bad --param `{s}`, expected name=a..b or name=a..b:step");
    let (name, range) = s.split_once('=').ok_or_else(bad)?;
    let (range, step) = match range.split_once(':') {
        Some((r, st)) => (r, st.parse::<i64>().map_err(|_| bad())?),
        None => (range, 1),
    };
    let (lo, hi) = match range.split_once("..") {
        Some((a, b)) => (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?),
        None => {
            let v = range.parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if step < 1 {
        return Err(bad());
    }
    Ok((name.to_string(), ParamRange::stepped(lo, hi, step)))
}

fn escalation_enabled() -> bool {
    std::env::var("ABC_ESCALATE").map(|v| v.trim() != "0").unwrap_or(true)
}

fn run(cli: Cli) -> Result<u8> {
    let threads = match cli.threads {
        Some(t) => Some(t),
        None => std::env::var("ABC_THREADS").ok().and_then(|v| v.trim().parse().ok()),
    };
    if let Some(t) = threads.filter(|&t| t > 0) {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let format = cli.format;
    let fmt = |default: Format| format.unwrap_or(default);
    let out = &cli.out;

    match cli.cmd {
        Cmd::Index { file } => {
            let t = read_tree(&file)?;
            let v = abc_index(&t);
            let body = match fmt(Format::Json) {
                Format::Json => json!({"n": t.n(), "abc": v}).to_string(),
                Format::Csv => table(&["n", "abc"], &[vec![t.n().to_string(), num(v)]])?,
                Format::Text => format!("n = {}\nabc = {}", t.n(), num(v)),
            };
            emit(out, &body)?;
        }
        Cmd::Brute { n, all_min, check_structure } => {
            let r = brute_force_min(n)?;
            let shown = if all_min { &r.witnesses[..] } else { &r.witnesses[..1] };
            match fmt(Format::Json) {
                Format::Text => {
                    let mut s = format!("n = {}\nminimum = {}\nwitnesses = {}\nexamined = {}\n", n, num(r.best_value), r.witnesses.len(), r.examined);
                    for w in shown {
                        s.push_str(&io::to_text(w));
                        if check_structure {
                            let c = validate_structure(w);
                            for i in &c.items {
                                let _ = writeln!(s, "  {}: {}", i.name, if !i.applicable { "n/a" } else if i.pass { "pass" } else { "FAIL" });
                            }
                        }
                    }
                    emit(out, &s)?;
                }
                _ => {
                    let ws: Vec<Value> = shown
                        .iter()
                        .map(|w| {
                            let mut v = json!({"tree": io::to_json_value(w), "degrees": degree_sequence(w).map(|d| d.degrees().to_vec()).unwrap_or_default()});
                            if check_structure {
                                v["structure"] = serde_json::to_value(validate_structure(w)).expect("checklist serializes");
                            }
                            v
                        })
                        .collect();
                    let v = json!({"n": n, "value": r.best_value, "witness_count": r.witnesses.len(), "examined": r.examined, "witnesses": ws, "elapsed_ms": r.elapsed_ms as u64});
                    emit(out, &json_text(&v))?;
                }
            }
        }
        Cmd::Greedy { degrees } => {
            let seq = DegreeSequence::new(degrees)?;
            let t = greedy_tree(&seq);
            let v = abc_index(t.tree());
            let body = match fmt(Format::Json) {
                Format::Text => format!("abc = {}\n{}", num(v), io::to_text(t.tree())),
                Format::Csv => table(&["n", "abc"], &[vec![t.n().to_string(), num(v)]])?,
                Format::Json => json_text(&json!({"n": t.n(), "abc": v, "root": t.root(), "tree": io::to_json_value(t.tree())})),
            };
            emit(out, &body)?;
        }
        Cmd::Family { n, unconstrained, emit_tree } => {
            let r = family_search(n, !unconstrained)?;
            if let Some(path) = emit_tree {
                let t = assemble(&r.best_config)?;
                fs::write(&path, io::to_json(t.tree())).with_context(|| format!("writing {}", path.display()))?;
            }
            let body = match fmt(Format::Json) {
                Format::Text => format!(
                    "n = {}\nbest = {}\nr = {}\ns = {}\nroot degree = {}\nconfig = {}\nties = {}{}",
                    n,
                    num(r.best_value),
                    r.r,
                    r.s,
                    r.best_config.root_degree(),
                    r.best_config.to_json(),
                    r.ties.len(),
                    if r.advisory { "\nnote: order below the range of the structural lemmas" } else { "" }
                ),
                _ => json_text(&serde_json::to_value(&r)?),
            };
            emit(out, &body)?;
        }
        Cmd::Gamma { from, to, step } => {
            if step == 0 || from > to {
                bail!("empty range {from}..={to} step {step}");
            }
            let mut rows = Vec::new();
            let mut js = Vec::new();
            for n in (from..=to).step_by(step) {
                let g = gamma_bounds(n)?;
                rows.push(vec![n.to_string(), num(g.lower), num(g.upper)]);
                js.push(json!({"n": n, "lower": g.lower, "upper": g.upper}));
            }
            let body = tabulate(fmt(Format::Json), &["n", "lower", "upper"], &rows, json!({"c0": c0(), "rows": js}))?;
            emit(out, &body)?;
        }
        Cmd::Scan { from, to } => {
            let scan = transition_scan(from, to)?;
            let rows: Vec<Vec<String>> = scan
                .iter()
                .map(|r| vec![r.n.to_string(), r.r.to_string(), r.s.to_string(), num(r.best_value), num(r.lower), num(r.upper)])
                .collect();
            let body = tabulate(fmt(Format::Csv), &["n", "r", "s", "best_value", "lower", "upper"], &rows, serde_json::to_value(&scan)?)?;
            emit(out, &body)?;
        }
        Cmd::LocalSearch { file, random, budget, trace } => {
            let t = match (file, random) {
                (Some(f), _) => read_tree(&f)?,
                (None, Some(n)) if n >= 1 => Tree::random(n, &mut rand::rngs::StdRng::seed_from_u64(cli.seed)),
                _ => bail!("give a tree file or --random <n>"),
            };
            let r = local_search(&t, budget);
            if let Some(path) = trace {
                let mut s = String::new();
                for step in &r.trace {
                    s.push_str(&serde_json::to_string(step)?);
                    s.push('\n');
                }
                fs::write(&path, s).with_context(|| format!("writing {}", path.display()))?;
            }
            let body = match fmt(Format::Json) {
                Format::Text => format!(
                    "initial = {}\nfinal = {}\nmoves = {}\nlocal minimum = {}\n{}",
                    num(r.initial),
                    num(r.value),
                    r.trace.len(),
                    r.local_minimum,
                    io::to_text(&r.tree)
                ),
                _ => json_text(&json!({"initial": r.initial, "value": r.value, "moves": r.trace.len(), "local_minimum": r.local_minimum, "tree": io::to_json_value(&r.tree)})),
            };
            emit(out, &body)?;
        }
        Cmd::Verify { lemma_id, list, params, full } => {
            if list {
                let rows: Vec<Vec<String>> = REGISTRY
                    .iter()
                    .map(|l| vec![l.id.to_string(), l.params.join(" "), l.summary.to_string()])
                    .collect();
                let js: Vec<Value> = REGISTRY
                    .iter()
                    .map(|l| json!({"id": l.id, "params": l.params, "summary": l.summary, "exact": l.exact, "note": l.note}))
                    .collect();
                let body = tabulate(fmt(Format::Json), &["id", "params", "summary"], &rows, Value::Array(js))?;
                emit(out, &body)?;
                return Ok(0);
            }
            let id = lemma_id.expect("clap enforces an id");
            let mut spec = if params.is_empty() {
                SweepSpec::defaults(&id, full)?
            } else {
                let ranges = params.iter().map(|p| parse_param(p)).collect::<Result<Vec<_>>>()?;
                SweepSpec::with_ranges(&id, &ranges)?
            };
            spec.escalate = escalation_enabled();
            let r = sweep(&spec)?;
            let body = match fmt(Format::Json) {
                Format::Text => {
                    let mut s = format!(
                        "{}: {:?}\nevaluations = {}\nmin = {} at {:?}\ncounterexamples = {}\ninconclusive = {}\nescalated = {}\n",
                        r.lemma_id, r.status, r.evaluations, num(r.min_value), r.argmin, r.counterexamples, r.inconclusive, r.escalated
                    );
                    for p in &r.counterexample_points {
                        let _ = writeln!(s, "  {:?} {}", p.params, num(p.value));
                    }
                    if let Some(n) = &r.note {
                        let _ = writeln!(s, "note: {n}");
                    }
                    s
                }
                _ => json_text(&serde_json::to_value(&r)?),
            };
            emit(out, &body)?;
            if r.status == Status::Counterexample {
                return Ok(5);
            }
        }
        Cmd::Compare { a, b } => {
            let (ta, tb) = (read_tree(&a)?, read_tree(&b)?);
            let (va, vb) = (abc_index(&ta), abc_index(&tb));
            let iso = free_code(&ta) == free_code(&tb);
            let same_degrees = ta.n() == tb.n() && degree_sequence(&ta)? == degree_sequence(&tb)?;
            let body = match fmt(Format::Json) {
                Format::Text => format!("a = {}\nb = {}\na - b = {}\nisomorphic = {iso}\nsame degrees = {same_degrees}", num(va), num(vb), num(va - vb)),
                Format::Csv => table(&["abc_a", "abc_b", "difference", "isomorphic"], &[vec![num(va), num(vb), num(va - vb), iso.to_string()]])?,
                Format::Json => json_text(&json!({"abc_a": va, "abc_b": vb, "difference": va - vb, "isomorphic": iso, "same_degree_sequence": same_degrees})),
            };
            emit(out, &body)?;
        }
        Cmd::Export { file, dot } => {
            let text = read_file(&file)?;
            let is_config = serde_json::from_str::<Value>(&text).map(|v| v.get("branches").is_some()).unwrap_or(false);
            let (t, cfg) = if is_config {
                let cfg = FamilyConfig::parse(&text).map_err(|e| BadFile(format!("{}: {e}", file.display())))?;
                (assemble(&cfg)?.into_tree(), Some(cfg))
            } else {
                (io::parse_tree(&text).map_err(|e| BadFile(format!("{}: {e}", file.display())))?, None)
            };
            let body = if dot {
                io::to_dot(&t)
            } else {
                match fmt(Format::Json) {
                    Format::Text => io::to_text(&t),
                    Format::Csv => bail!("export writes json, text or dot"),
                    Format::Json => {
                        let mut v = io::to_json_value(&t);
                        if let Some(cfg) = cfg {
                            v["config"] = cfg.to_json();
                        }
                        v.to_string()
                    }
                }
            };
            emit(out, &body)?;
        }
    }
    Ok(0)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<BadFile>().is_some() {
        return 3;
    }
    match e.downcast_ref::<AbcError>() {
        Some(AbcError::Capacity { .. } | AbcError::SweepTooLarge { .. }) => 4,
        Some(AbcError::UnknownLemma(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
