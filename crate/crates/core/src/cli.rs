//! Command-line front end.
//!
//! [`run`] takes the argument list and returns the exit status with the text
//! for stdout and stderr, so the binary is a thin wrapper and tests can drive
//! the whole thing in-process. JSON goes through `serde_json::Value`, whose
//! keys are sorted, so output is byte-stable and re-serializes identically.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{parse_rational, FrobeniusParams};
use crate::canonical::{canonical_generators, classes_independent, generator_json};
use crate::cobordism::{Movie, MovieReport};
use crate::complex::FilteredComplex;
use crate::diagram::{parse_braid, parse_input, parse_pd, LinkDiagram};
use crate::error::{Error, Result};
use crate::homology::{
    diagram_meta, filtered_homology, filtration_levels_by_subspaces, khovanov_homology, levels_from_persistence,
    params_meta, q_to_f64, HomologyReport, REPORT_VERSION,
};
use crate::spectral::{Cells, Persistence};

#[derive(Parser, Debug)]
#[command(name = "filtkh", version, about = "Filtered sl(2) link homology with exact rational arithmetic")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// `lee`, `bar-natan`, `a:<r>,h:<r>` or `alpha:<r>,beta:<r>`
    #[arg(long, global = true, default_value = "lee")]
    pub params: String,

    /// mirror the diagram before computing
    #[arg(long, global = true)]
    pub mirror: bool,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// last spectral page to print
    #[arg(long, global = true)]
    pub max_page: Option<usize>,

    /// refuse diagrams with more crossings
    #[arg(long, global = true, default_value_t = 16)]
    pub max_crossings: usize,

    /// face id to use as the outer face
    #[arg(long, global = true)]
    pub outer: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

/// Where the diagram comes from: an input file (`-` for stdin), or inline.
#[derive(clap::Args, Debug, Clone)]
pub struct InputArgs {
    /// input file with a `pd:` or `braid:` line
    pub file: Option<PathBuf>,

    /// inline PD code, e.g. "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]"
    #[arg(long, conflicts_with_all = ["file", "braid"])]
    pub pd: Option<String>,

    /// inline braid word with the strand count first, e.g. "2: 1 1 1"
    #[arg(long, conflicts_with = "file")]
    pub braid: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Khovanov homology (the first page)
    Kh(InputArgs),
    /// filtered homology with its filtration profile
    Filtered(InputArgs),
    /// spectral sequence pages
    Ss(InputArgs),
    /// s_min, s_max, s-bar and slice bounds
    S(InputArgs),
    /// canonical generators
    Gens(InputArgs),
    /// maps induced by a movie of moves
    Movie {
        #[command(flatten)]
        input: InputArgs,
        /// movie file, or the moves inline (`;` or newline separated)
        #[arg(long)]
        moves: String,
        /// print the intermediate diagrams with their numbering and stop
        #[arg(long)]
        dry_run: bool,
    },
    /// run the built-in invariant checks
    Selftest,
}

/// Exit status and output of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Resource(_) => 2,
        _ => 1,
    }
}

/// Parses and runs one command line (the first item is the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() { 1 } else { 0 };
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok((code, stdout)) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

pub fn parse_params(text: &str) -> Result<FrobeniusParams> {
    match text.trim() {
        "lee" => return Ok(FrobeniusParams::lee()),
        "bar-natan" => return Ok(FrobeniusParams::bar_natan()),
        _ => {}
    }
    let mut fields = std::collections::BTreeMap::new();
    for part in text.split(',') {
        let (k, v) = part
            .split_once(':')
            .ok_or_else(|| Error::Params(format!("expected `key:value` in `{part}`")))?;
        if fields.insert(k.trim().to_string(), parse_rational(v.trim())?).is_some() {
            return Err(Error::Params(format!("`{}` given twice", k.trim())));
        }
    }
    let keys: Vec<&str> = fields.keys().map(String::as_str).collect();
    match keys.as_slice() {
        ["a", "h"] => FrobeniusParams::from_ah(fields["a"].clone(), fields["h"].clone()),
        ["alpha", "beta"] => FrobeniusParams::from_roots(fields["alpha"].clone(), fields["beta"].clone()),
        _ => Err(Error::Params(format!(
            "`{text}`: use lee, bar-natan, a:<r>,h:<r> or alpha:<r>,beta:<r>"
        ))),
    }
}

fn read_source(path: &PathBuf) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
    }
}

/// `"<strands>: <generators>"`.
fn parse_inline_braid(text: &str) -> Result<LinkDiagram> {
    let (n, word) = text
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("braid `{text}` should look like `2: 1 1 1`")))?;
    let strands = n
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad strand count `{}`", n.trim())))?;
    let word = word
        .split_whitespace()
        .map(|g| g.parse().map_err(|_| Error::Parse(format!("bad braid generator `{g}`"))))
        .collect::<Result<Vec<i64>>>()?;
    parse_braid(&word, strands)
}

fn load_diagram(cli: &Cli, input: &InputArgs) -> Result<LinkDiagram> {
    let d = match (&input.file, &input.pd, &input.braid) {
        (_, Some(pd), _) if pd.trim().is_empty() => return Err(Error::Input("empty PD code".into())),
        (_, Some(pd), _) => parse_pd(pd)?,
        (_, _, Some(b)) => parse_inline_braid(b)?,
        (Some(path), _, _) => parse_input(&read_source(path)?)?.diagram,
        (None, None, None) => return Err(Error::Input("no diagram given (file, --pd or --braid)".into())),
    };
    let d = if cli.outer.is_some() { d.with_outer_hint(cli.outer)? } else { d };
    Ok(if cli.mirror { d.mirror() } else { d })
}

fn build(cli: &Cli, input: &InputArgs) -> Result<FilteredComplex> {
    let p = parse_params(&cli.params)?;
    let d = load_diagram(cli, input)?;
    FilteredComplex::build_capped(&d, &p, cli.max_crossings)
}

fn to_json<T: Serialize>(x: &T) -> String {
    let v: Value = serde_json::to_value(x).expect("serializable report");
    let mut s = serde_json::to_string_pretty(&v).expect("json text");
    s.push('\n');
    s
}

/// Aligned table of bigraded dimensions: one row per `q`, top to bottom,
/// one column per homological degree.
pub fn grid(cells: &Cells) -> String {
    if cells.is_empty() {
        return "(zero)\n".into();
    }
    let rs: Vec<i64> = {
        let mut v: Vec<i64> = cells.keys().map(|k| k.0).collect();
        v.sort();
        v.dedup();
        (v[0]..=*v.last().unwrap()).collect()
    };
    let mut qs: Vec<i64> = cells.keys().map(|k| k.1).collect();
    qs.sort();
    qs.dedup();
    let w = 4;
    let mut out = format!("{:>w$} |", "q\\r");
    for r in &rs {
        let _ = write!(out, "{r:>w$}");
    }
    out.push('\n');
    out.push_str(&"-".repeat(w + 2 + w * rs.len()));
    out.push('\n');
    for q in qs.iter().rev() {
        let _ = write!(out, "{q:>w$} |");
        for r in &rs {
            match cells.get(&(*r, *q)) {
                Some(d) => {
                    let _ = write!(out, "{d:>w$}");
                }
                None => {
                    let _ = write!(out, "{:>w$}", ".");
                }
            }
        }
        out.push('\n');
    }
    out
}

fn header(c: &FilteredComplex) -> String {
    let m = diagram_meta(c);
    let p = params_meta(c);
    format!(
        "diagram: {}\ncrossings {} (n+ {}, n- {}), components {}\nparams: a = {}, h = {} (roots {}, {})\n",
        m.pd, m.crossings, m.n_plus, m.n_minus, m.components, p.a, p.h, p.alpha, p.beta
    )
}

fn execute(cli: &Cli) -> Result<(i32, String)> {
    let json = cli.format == Format::Json;
    let out = match &cli.command {
        Command::Kh(input) => {
            let c = build(cli, input)?;
            let kh = khovanov_homology(&c);
            if json {
                to_json(&json!({
                    "version": REPORT_VERSION,
                    "diagram": diagram_meta(&c),
                    "params": params_meta(&c),
                    "kh": kh.triples(),
                    "total": kh.total(),
                }))
            } else {
                format!("{}Khovanov homology, total {}\n{}", header(&c), kh.total(), grid(&kh.0))
            }
        }
        Command::Filtered(input) => {
            let c = build(cli, input)?;
            let pers = Persistence::compute(&c);
            let s = levels_from_persistence(&c, &pers)?;
            let profiles: Vec<Value> = s
                .profiles
                .iter()
                .map(|(r, prof)| json!({"hdeg": r, "levels": prof.iter().map(|&(k, d)| [k, d as i64]).collect::<Vec<_>>()}))
                .collect();
            if json {
                to_json(&json!({
                    "version": REPORT_VERSION,
                    "diagram": diagram_meta(&c),
                    "params": params_meta(&c),
                    "filtered": s.totals.iter().map(|(&r, &d)| [r, d as i64]).collect::<Vec<_>>(),
                    "total": s.totals.values().sum::<usize>(),
                    "profiles": profiles,
                }))
            } else {
                let mut t = header(&c);
                let _ = writeln!(t, "filtered homology, total {}", s.totals.values().sum::<usize>());
                for (r, d) in &s.totals {
                    let _ = writeln!(t, "  H^{r}: {d}");
                }
                t.push_str("filtration profile (level: dim F^level)\n");
                for (r, prof) in &s.profiles {
                    let mut prev = 0;
                    let jumps: Vec<String> = prof
                        .iter()
                        .filter(|&&(_, d)| {
                            let keep = d != prev;
                            prev = d;
                            keep
                        })
                        .map(|(k, d)| format!("{k}: {d}"))
                        .collect();
                    let _ = writeln!(t, "  r = {r}: {}", jumps.join(", "));
                }
                t
            }
        }
        Command::Ss(input) => {
            let c = build(cli, input)?;
            let pers = Persistence::compute(&c);
            let last = pers.last_page().max(1);
            let upto = cli.max_page.unwrap_or(last).max(1);
            let pages: Vec<_> = (1..=upto).map(|k| pers.page(k)).collect();
            if json {
                to_json(&json!({
                    "version": REPORT_VERSION,
                    "diagram": diagram_meta(&c),
                    "params": params_meta(&c),
                    "last_page": last,
                    "pages": pages.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
                }))
            } else {
                let mut t = header(&c);
                let _ = writeln!(t, "pages stabilise at E_{last}");
                for p in &pages {
                    let _ = writeln!(t, "\nE_{} (total {}){}", p.k, p.total(), if p.collapsed { ", collapsed" } else { "" });
                    t.push_str(&grid(&p.cells));
                }
                t
            }
        }
        Command::S(input) => {
            let c = build(cli, input)?;
            let r = HomologyReport::compute(&c, cli.mirror)?;
            if json {
                to_json(&r)
            } else {
                let mut t = header(&c);
                let _ = writeln!(t, "s_min = {}\ns_max = {}", r.s.smin, r.s.smax);
                if let Some(sb) = r.s.sbar {
                    let _ = writeln!(t, "s_bar = {sb}");
                }
                let _ = writeln!(t, "slice Euler characteristic bound from s_max: {}", r.bounds.chi);
                if let Some(g) = r.bounds.genus {
                    let _ = writeln!(t, "slice genus >= {g}");
                }
                t
            }
        }
        Command::Gens(input) => {
            let c = build(cli, input)?;
            let gens = canonical_generators(&c)?;
            let items: Vec<_> = gens.iter().map(|g| generator_json(&c, g)).collect();
            if json {
                to_json(&json!({
                    "version": REPORT_VERSION,
                    "diagram": diagram_meta(&c),
                    "params": params_meta(&c),
                    "generators": items,
                    "independent": classes_independent(&c, &gens)?,
                }))
            } else {
                let mut t = header(&c);
                let _ = writeln!(t, "{:<8} {:>5} {:>6}  {:<12} idempotents", "state", "hdeg", "qlevel", "vertex");
                for g in &items {
                    let ids: Vec<String> = g.circles.iter().map(|k| format!("{}@{}", k.idempotent, k.edge)).collect();
                    let _ = writeln!(t, "{:<8} {:>5} {:>6}  {:<12} {}", g.state, g.hdeg, g.qlevel, g.vertex, ids.join(" "));
                }
                t
            }
        }
        Command::Movie { input, moves, dry_run } => {
            let d = load_diagram(cli, input)?;
            let text = match std::fs::read_to_string(moves) {
                Ok(t) => t,
                Err(_) => moves.clone(),
            };
            let movie = Movie::parse(d, &text)?;
            if *dry_run {
                movie.dry_run()
            } else {
                let p = parse_params(&cli.params)?;
                let r = MovieReport::compute(&movie, &p, cli.max_crossings)?;
                if json {
                    to_json(&r)
                } else {
                    movie_table(&r)
                }
            }
        }
        Command::Selftest => {
            let results = selftest()?;
            let ok = results.iter().all(|r| r.pass);
            let text = if json {
                to_json(&json!({"version": REPORT_VERSION, "checks": results, "ok": ok}))
            } else {
                let mut t = String::new();
                for r in &results {
                    let _ = writeln!(t, "{} {}", if r.pass { "PASS" } else { "FAIL" }, r.name);
                }
                t
            };
            return Ok((if ok { 0 } else { 1 }, text));
        }
    };
    Ok((0, out))
}

fn movie_table(r: &MovieReport) -> String {
    let mut t = format!("start: {}\nend:   {}\n", r.start, r.end);
    for (k, s) in r.steps.iter().enumerate() {
        let _ = writeln!(
            t,
            "{:>3}. {:<24} chi {:>2}  chain map {}  filtered {}",
            k + 1,
            s.mv,
            s.euler,
            s.chain_map,
            s.filtered
        );
    }
    let _ = writeln!(
        t,
        "euler characteristic {}, degree {}, rank on homology {}",
        r.euler, r.degree, r.homology_rank
    );
    for g in &r.generators {
        let terms: Vec<String> = g.image.iter().map(|(s, c)| format!("({c}) h_{s}")).collect();
        let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        let _ = writeln!(t, "h_{} (r = {}) -> {}", g.state, g.hdeg, rhs);
    }
    t
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

/// Named diagrams checked by `selftest`.
fn selftest_corpus() -> Result<Vec<(&'static str, LinkDiagram)>> {
    Ok(vec![
        ("unknot", parse_pd("O[1]")?),
        ("unknot (kink)", parse_braid(&[1], 2)?),
        ("unlink", parse_pd("O[1] O[2]")?),
        ("Hopf", parse_pd("X[4,1,3,2] X[2,3,1,4]")?),
        ("trefoil", parse_pd("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]")?),
        ("figure-8", parse_pd("X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]")?),
        ("T(2,5)", parse_braid(&[1; 5], 2)?),
    ])
}

/// Invariant checks on the built-in corpus for both presets.
pub fn selftest() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut check = |name: String, pass: bool| out.push(Check { name, pass });
    for (name, d) in selftest_corpus()? {
        for (pname, p) in [("lee", FrobeniusParams::lee()), ("bar-natan", FrobeniusParams::bar_natan())] {
            let c = FilteredComplex::build(&d, &p)?;
            let tag = format!("{name} [{pname}]");
            let dd = c.degrees().all(|r| c.differential(r + 1).mul(&c.differential(r)).is_zero());
            check(format!("{tag}: d^2 = 0"), dd);
            let h = filtered_homology(&c);
            check(
                format!("{tag}: dim H = 2^components"),
                h.values().sum::<usize>() == 1 << d.n_components(),
            );
            let pers = Persistence::compute(&c);
            check(format!("{tag}: E_1 = Kh"), pers.page(1).cells == khovanov_homology(&c).0);
            check(format!("{tag}: E_inf = H"), pers.limit_by_degree() == h);
            let fast = levels_from_persistence(&c, &pers)?;
            check(format!("{tag}: levels agree by both routes"), fast == filtration_levels_by_subspaces(&c)?);
            let gens = canonical_generators(&c)?;
            check(format!("{tag}: canonical classes independent"), classes_independent(&c, &gens)?);
            if d.n_components() == 1 {
                let m = FilteredComplex::build(&d.mirror(), &p)?;
                let sm = levels_from_persistence(&m, &Persistence::compute(&m))?;
                let sum = fast.s_bar().zip(sm.s_bar()).map(|(a, b)| q_to_f64(&(a + b)));
                check(format!("{tag}: s_bar(mirror) = -s_bar"), sum == Some(0.0));
            }
        }
    }
    Ok(out)
}
