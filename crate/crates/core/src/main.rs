//! Command-line front end. Exit codes: 0 success, 1 violation found,
//! 2 usage or input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use bs_tiler::alphabet::Pattern;
use bs_tiler::analysis::{
    cone_completion, entropy_table, height_sequence, minimality_verdict, periodicity_probe, BottomPattern, ProbeOutcome,
    Search,
};
use bs_tiler::checker::{check_pattern, harvest_tables, Tables};
use bs_tiler::codec::{decode, encode, encode_with_paths, on_sheet, sheet_roots, Transducer};
use bs_tiler::group::{multiply, normalize, parse_element, parse_word, rectangle, rectangle_size};
use bs_tiler::render::{csv_string, render_sheet_svg, render_tiling_svg, RenderSpec};
use bs_tiler::robinson::{path_depth, structure_check, RobinsonSystem};
use bs_tiler::substitution::{expanding_eigen, incidence_matrix, normalize_unique_size, EigenData, Substitution};
use bs_tiler::tiling::{grow_window, ChoicePolicy, TilingWindow, Viewport};
use bs_tiler::{Error, Result};

/// Lifting substitution tilings to subshifts of finite type on BS(1,n).
#[derive(Parser)]
#[command(name = "bs-tiler", version, arg_required_else_help = true)]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every random choice.
    #[arg(long, global = true, env = "BS_TILER_SEED", default_value_t = 0)]
    seed: u64,
    /// Group base, overriding substitution files.
    #[arg(long, global = true)]
    n: Option<u32>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Normal form of a word over a, A, t, T.
    Normalize { word: String },
    /// Product of two normal forms `t^i a^j t^-k`.
    Mul { g: String, h: String },
    /// Φ(g) as (x, level).
    Phi { g: String },
    /// Elements of the rectangle R_{k,ℓ}.
    Rect { k: u32, ell: u32 },
    /// Incidence, eigendata and unique-size normalization of a substitution.
    Subst(SubstArgs),
    /// Grows a window around a seed tile of the normalized substitution.
    Grow {
        #[command(flatten)]
        subst: SubstArgs,
        /// Seed tile letter.
        #[arg(long)]
        letter: String,
        /// Rows above the seed.
        #[arg(long, default_value_t = 2)]
        up: usize,
        /// Rows below the seed.
        #[arg(long, default_value_t = 0)]
        down: usize,
        /// Horizontal reach beyond the seed on each side.
        #[arg(long, default_value_t = 12.0)]
        half_width: f64,
        /// Top of the seed tile.
        #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
        y0: f64,
        /// Output file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Encodes a window on R_{k,ℓ}.
    Encode {
        /// Window JSON.
        window: PathBuf,
        /// Support `k,ℓ`.
        #[arg(long, default_value = "6,6")]
        support: String,
        /// Left-border path steps encoded below the support.
        #[arg(long, default_value_t = 16)]
        paths: usize,
        /// Output file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decodes a pattern back into tiles.
    Decode {
        #[command(flatten)]
        system: SystemArgs,
        /// Pattern JSON.
        pattern: PathBuf,
        /// Transducer depth.
        #[arg(long, default_value_t = 16)]
        depth: usize,
    },
    /// Checks a pattern against the local rules; exit 1 on violations.
    Check {
        #[command(flatten)]
        system: SystemArgs,
        /// Pattern JSON.
        pattern: PathBuf,
    },
    /// Counts locally admissible patterns on R_{k,ℓ}.
    Enumerate {
        #[command(flatten)]
        system: SystemArgs,
        /// Support `k,ℓ`.
        #[arg(long)]
        support: String,
        /// Kind assignments visited before the count becomes a lower bound.
        #[arg(long, default_value_t = 20_000)]
        cap: u64,
    },
    /// Entropy table as CSV.
    Entropy {
        #[command(flatten)]
        system: SystemArgs,
        /// Pairs `k,ℓ`.
        #[arg(long, num_args = 1.., required = true)]
        pairs: Vec<String>,
        /// Kind assignments visited per rectangle.
        #[arg(long, default_value_t = 20_000)]
        cap: u64,
    },
    /// Completes the cone above a bottom pattern.
    Cone {
        #[command(flatten)]
        system: SystemArgs,
        /// Base ℓ.
        #[arg(long)]
        ell: u32,
        /// Zone letter.
        #[arg(long)]
        letter: String,
        /// Zone index.
        #[arg(long, default_value_t = 1)]
        index: usize,
        /// Search node budget.
        #[arg(long, default_value_t = 10_000_000)]
        max_nodes: u64,
    },
    /// Searches for an admissible pattern invariant under a period.
    Probe {
        #[command(flatten)]
        system: SystemArgs,
        /// Period `t^i a^j t^-k`.
        #[arg(long)]
        period: String,
        /// Support `k,ℓ`.
        #[arg(long, default_value = "3,4")]
        support: String,
        /// Search node budget.
        #[arg(long, default_value_t = 1_000_000)]
        max_nodes: u64,
    },
    /// Row height sequence, and the minimality verdict with a substitution.
    Heights {
        /// Row height L; taken from the substitution when absent.
        #[arg(long)]
        row_height: Option<f64>,
        /// Substitution JSON.
        #[arg(long)]
        subst: Option<PathBuf>,
        /// Offset y₀.
        #[arg(long, default_value_t = 0.0)]
        offset: f64,
        /// Number of rows.
        #[arg(long, default_value_t = 30)]
        count: usize,
    },
    /// The Robinson hierarchy.
    Robinson {
        #[command(subcommand)]
        cmd: RobinsonCmd,
    },
    /// SVG pictures.
    Render {
        #[command(subcommand)]
        cmd: RenderCmd,
    },
}

#[derive(Subcommand)]
enum RobinsonCmd {
    /// Lifts a σ_R tiling to a pattern on R_{k,ℓ} and verifies it.
    Lift {
        /// Support `k,ℓ`.
        #[arg(long, default_value = "4,5")]
        support: String,
        /// Windows harvested for the tables.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Output file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Checks letter rows, one per line; exit 1 on violations.
    Check {
        /// Rows file.
        rows: PathBuf,
    },
}

#[derive(Subcommand)]
enum RenderCmd {
    /// A window as tiles with their cuts.
    Tiling {
        /// Window JSON.
        window: PathBuf,
        #[command(flatten)]
        view: ViewArgs,
    },
    /// One sheet of a pattern with its decoded tiling.
    Sheet {
        #[command(flatten)]
        system: SystemArgs,
        /// Pattern JSON.
        pattern: PathBuf,
        /// Sheet index.
        #[arg(long, default_value_t = 0)]
        sheet: usize,
        #[command(flatten)]
        view: ViewArgs,
    },
}

#[derive(Args)]
struct SubstArgs {
    /// Substitution JSON.
    #[arg(long)]
    subst: PathBuf,
}

#[derive(Args)]
struct SystemArgs {
    /// Substitution JSON (normalized before use).
    #[arg(long)]
    subst: PathBuf,
    /// Windows harvested for the tables.
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

#[derive(Args)]
struct ViewArgs {
    /// Viewport `x0,x1,y0,y1`; the window or pattern extent when absent.
    #[arg(long, allow_hyphen_values = true)]
    viewport: Option<String>,
    /// Pixels per unit.
    #[arg(long, default_value_t = 40.0)]
    scale: f64,
    /// Omit letter names.
    #[arg(long)]
    no_labels: bool,
    /// Output file.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// A finished command: text or JSON to print, and whether a violation was found.
struct Outcome {
    text: String,
    json: Value,
    violation: bool,
}

impl Outcome {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Outcome { text: text.into(), json, violation: false }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).unwrap_or_default());
            } else if !out.text.is_empty() {
                print!("{}", out.text);
                if !out.text.ends_with('\n') {
                    println!();
                }
            }
            ExitCode::from(if out.violation { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn pair(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::Input(format!("expected `k,ℓ`, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn viewport(s: &str) -> Result<Viewport> {
    let v: Vec<f64> = s.split(',').map(|x| x.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| {
        Error::Input(format!("expected `x0,x1,y0,y1`, got {s:?}"))
    })?;
    match v[..] {
        [x0, x1, y0, y1] => Ok(Viewport { x0, x1, y0, y1 }),
        _ => Err(Error::Input(format!("expected four numbers, got {s:?}"))),
    }
}

fn load_subst(path: &Path, n: Option<u32>) -> Result<Substitution> {
    let mut s = Substitution::from_json(&fs::read_to_string(path)?)?;
    if let Some(n) = n {
        s.n = n;
    }
    Ok(s)
}

fn normalized(path: &Path, n: Option<u32>) -> Result<(Substitution, EigenData)> {
    let s = load_subst(path, n)?;
    let e = expanding_eigen(&s)?;
    normalize_unique_size(&s, &e)
}

fn system(args: &SystemArgs, cli: &Cli) -> Result<(Substitution, EigenData, Tables)> {
    let (s, e) = normalized(&args.subst, cli.n)?;
    let t = harvest_tables(&s, &e, args.samples, cli.seed)?;
    Ok((s, e, t))
}

fn load_pattern(path: &Path, s: &Substitution) -> Result<Pattern> {
    let v: Value = serde_json::from_str(&fs::read_to_string(path)?)?;
    Pattern::from_json(&v, s, s.n)
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<String> {
    match output {
        Some(p) => {
            fs::write(p, text)?;
            Ok(format!("wrote {}\n", p.display()))
        }
        None => Ok(text.to_string()),
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let n = cli.n.unwrap_or(2);
    match &cli.cmd {
        Cmd::Normalize { word } => {
            let g = normalize(&parse_word(word)?, n);
            Ok(Outcome::ok(g.to_string(), json!({ "element": g.to_string(), "i": g.i, "j": g.j.to_string(), "k": g.k })))
        }
        Cmd::Mul { g, h } => {
            let p = multiply(&parse_element(g, n)?, &parse_element(h, n)?)?;
            Ok(Outcome::ok(p.to_string(), json!({ "product": p.to_string() })))
        }
        Cmd::Phi { g } => {
            let (x, level) = parse_element(g, n)?.phi();
            Ok(Outcome::ok(format!("({x}, {level})"), json!({ "x": x.to_string(), "level": level })))
        }
        Cmd::Rect { k, ell } => {
            let r = rectangle(*k, *ell, n);
            let names: Vec<String> = r.iter().map(ToString::to_string).collect();
            let text = format!("|R_{{{k},{ell}}}| = {}\n{}\n", r.len(), names.join("\n"));
            Ok(Outcome::ok(text, json!({ "size": rectangle_size(*k, *ell, n).to_string(), "elements": names })))
        }
        Cmd::Subst(a) => {
            let s = load_subst(&a.subst, cli.n)?;
            let m = incidence_matrix(&s).ok();
            let e = expanding_eigen(&s)?;
            let (_, ne) = normalize_unique_size(&s, &e)?;
            let text = format!(
                "lambda {:.12}\nv {:?}\npower {} scale {} h_box {} h_rule {} w {:?} M {}\n",
                e.lambda,
                e.v,
                ne.power,
                ne.scale(),
                ne.h_box,
                ne.h_rule,
                ne.w,
                ne.m
            );
            Ok(Outcome::ok(text, json!({ "incidence": m, "eigen": e, "normalized": ne })))
        }
        Cmd::Grow { subst, letter, up, down, half_width, y0, output } => {
            let (s, e) = normalized(&subst.subst, cli.n)?;
            let w = grow_window(&s, &e, s.letter(letter)?, *up, *down, *half_width, &ChoicePolicy::Seeded(cli.seed), *y0)?;
            let words: Vec<String> = w.words().iter().map(|r| s.word_string(r)).collect();
            let written = emit(output, &serde_json::to_string(&w)?)?;
            let text = if output.is_some() { format!("{}{written}", words.join("\n") + "\n") } else { written };
            Ok(Outcome::ok(text, json!({ "rows": words })))
        }
        Cmd::Encode { window, support, paths, output } => {
            let w = TilingWindow::from_json(&fs::read_to_string(window)?)?;
            let s = w.generator()?.sigma().clone();
            let (k, ell) = pair(support)?;
            let support = rectangle(k, ell, s.n);
            let p = if *paths == 0 { encode(&w, &support)? } else { encode_with_paths(&w, &support, *paths)? };
            let v = p.to_json(&s);
            let text = emit(output, &serde_json::to_string(&v)?)?;
            Ok(Outcome::ok(text, json!({ "cells": p.len() })))
        }
        Cmd::Decode { system: sa, pattern, depth } => {
            let (s, e, t) = system(sa, cli)?;
            let p = load_pattern(pattern, &s)?;
            let d = decode(&p, &Transducer::derive(&t), &s, &e.v, *depth, |_| true)?;
            let words: Vec<String> = d.window.words().iter().map(|r| s.word_string(r)).collect();
            let text = format!("{}\nlines {} incomplete {} inconsistencies {}\n", words.join("\n"), d.lines.len(), d.incomplete, d.inconsistencies.len());
            let mut out = Outcome::ok(text, json!({ "rows": words, "decoded": d }));
            out.violation = !d.inconsistencies.is_empty();
            Ok(out)
        }
        Cmd::Check { system: sa, pattern } => {
            let (s, _, t) = system(sa, cli)?;
            let p = load_pattern(pattern, &s)?;
            let v = check_pattern(&p, &t)?;
            let text: String = if v.is_empty() { "admissible\n".into() } else { v.iter().map(|x| format!("{x}\n")).collect() };
            let mut out = Outcome::ok(text, json!({ "violations": v }));
            out.violation = !v.is_empty();
            Ok(out)
        }
        Cmd::Enumerate { system: sa, support, cap } => {
            let (_, _, t) = system(sa, cli)?;
            let (k, ell) = pair(support)?;
            let (count, leaves, exact) = Search::new(&t, &rectangle(k, ell, t.n)).count_exact(*cap);
            let text = format!("{count}{}\n", if exact { "" } else { " (lower bound)" });
            Ok(Outcome::ok(text, json!({ "count": count.to_string(), "exact": exact, "leaves": leaves })))
        }
        Cmd::Entropy { system: sa, pairs, cap } => {
            let (_, _, t) = system(sa, cli)?;
            let pairs = pairs.iter().map(|p| pair(p)).collect::<Result<Vec<_>>>()?;
            let rows = entropy_table(&t, &pairs, *cap);
            Ok(Outcome::ok(csv_string(&rows)?, json!(rows)))
        }
        Cmd::Cone { system: sa, ell, letter, index, max_nodes } => {
            let (s, e, t) = system(sa, cli)?;
            let bp = BottomPattern { ell: *ell, letter: s.letter(letter)?, index: *index };
            let c = cone_completion(bp, &t, &e, *max_nodes)?;
            let text = format!(
                "heights {:?} completions {} exhaustive {} fast {:?} unique {}\n",
                c.heights,
                c.completions.len(),
                c.exhaustive,
                c.fast_height,
                c.unique()
            );
            Ok(Outcome::ok(text, serde_json::to_value(&c)?))
        }
        Cmd::Probe { system: sa, period, support, max_nodes } => {
            let (s, _, t) = system(sa, cli)?;
            let g = parse_element(period, s.n)?;
            let (k, ell) = pair(support)?;
            let (text, v) = match periodicity_probe(&t, &g, k, ell, *max_nodes)? {
                ProbeOutcome::Contradiction { nodes } => {
                    (format!("contradiction after {nodes} nodes\n"), json!({ "outcome": "contradiction", "nodes": nodes }))
                }
                ProbeOutcome::Consistent { pattern } => (
                    format!("consistent: {} cells\n", pattern.len()),
                    json!({ "outcome": "consistent", "pattern": pattern.to_json(&s) }),
                ),
                ProbeOutcome::Inconclusive { nodes } => {
                    (format!("inconclusive after {nodes} nodes\n"), json!({ "outcome": "inconclusive", "nodes": nodes }))
                }
            };
            Ok(Outcome::ok(text, v))
        }
        Cmd::Heights { row_height, subst, offset, count } => {
            let eigen = match subst {
                Some(p) => Some(expanding_eigen(&load_subst(p, cli.n)?)?),
                None => None,
            };
            let l = match (row_height, &eigen) {
                (Some(l), _) => *l,
                (None, Some(e)) => e.lambda.ln() / (n as f64).ln(),
                (None, None) => return Err(Error::Input("give --row-height or --subst".into())),
            };
            let h = height_sequence(l, *offset, *count)?;
            let verdict = eigen.as_ref().map(|e| minimality_verdict(e, n)).transpose()?;
            let entries: Vec<String> = h.entries.iter().map(i64::to_string).collect();
            let freqs: Vec<String> = h.frequencies.iter().map(|(k, f)| format!("{k}: {f:.6}")).collect();
            let mut text = format!("{}\n{}\n", entries.join(" "), freqs.join(", "));
            if let Some(v) = &verdict {
                text.push_str(&format!("{v:?}\n"));
            }
            Ok(Outcome::ok(text, json!({ "sequence": h, "verdict": verdict })))
        }
        Cmd::Robinson { cmd: RobinsonCmd::Lift { support, samples, output } } => {
            let sys = RobinsonSystem::new(n, *samples, cli.seed)?;
            let (k, ell) = pair(support)?;
            let (p, truth) = sys.lift_with_tiling(&rectangle(k, ell, n), cli.seed)?;
            let report = sys.verify(&p, Some(&truth))?;
            let written = emit(output, &serde_json::to_string(&p.to_json(&sys.sigma))?)?;
            let text = if output.is_some() {
                format!("cells {} sheets {} tiles {} valid {}\n{written}", report.cells, report.sheets.len(), report.tiles(), report.is_valid())
            } else {
                written
            };
            let mut out = Outcome::ok(text, serde_json::to_value(&report)?);
            out.violation = !report.is_valid();
            Ok(out)
        }
        Cmd::Robinson { cmd: RobinsonCmd::Check { rows } } => {
            let text = fs::read_to_string(rows)?;
            let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
            let r = structure_check(&lines);
            let out_text = if r.is_valid() { "valid\n".to_string() } else { r.violations.iter().map(|v| format!("{v}\n")).collect() };
            let mut out = Outcome::ok(out_text, serde_json::to_value(&r)?);
            out.violation = !r.is_valid();
            Ok(out)
        }
        Cmd::Render { cmd: RenderCmd::Tiling { window, view } } => {
            let w = TilingWindow::from_json(&fs::read_to_string(window)?)?;
            let spec = view_spec(view, w.viewport)?;
            let svg = render_tiling_svg(&w, &spec)?;
            Ok(Outcome::ok(emit(&view.output, &svg)?, json!({ "bytes": svg.len() })))
        }
        Cmd::Render { cmd: RenderCmd::Sheet { system: sa, pattern, sheet, view } } => {
            let (s, e, t) = system(sa, cli)?;
            let p = load_pattern(pattern, &s)?;
            let cells: Vec<_> = p.cells.keys().copied().collect();
            let roots = sheet_roots(&cells);
            let root = *roots.get(*sheet).ok_or_else(|| Error::Input(format!("pattern has {} sheets", roots.len())))?;
            let d = decode(&p, &Transducer::derive(&t), &s, &e.v, path_depth(s.n), |g| on_sheet(g, root)).ok();
            let extent = pattern_extent(&p);
            let mut spec = view_spec(view, extent)?;
            spec.sheet = *sheet;
            let svg = render_sheet_svg(&p, root, &spec, d.as_ref().map(|d| &d.window))?;
            Ok(Outcome::ok(emit(&view.output, &svg)?, json!({ "bytes": svg.len(), "sheets": roots.len() })))
        }
    }
}

fn view_spec(view: &ViewArgs, fallback: Viewport) -> Result<RenderSpec> {
    let vp = match &view.viewport {
        Some(v) => viewport(v)?,
        None => fallback,
    };
    let mut spec = RenderSpec::new(vp, view.scale);
    spec.labels = !view.no_labels;
    spec.validate()?;
    Ok(spec)
}

fn pattern_extent(p: &Pattern) -> Viewport {
    let mut v = Viewport { x0: f64::INFINITY, x1: f64::NEG_INFINITY, y0: f64::INFINITY, y1: f64::NEG_INFINITY };
    for g in p.cells.keys() {
        let b = g.phi_box();
        let x = b.x.to_f64();
        v.x0 = v.x0.min(x);
        v.x1 = v.x1.max(x + b.width.to_f64());
        v.y0 = v.y0.min(b.y as f64 - 1.0);
        v.y1 = v.y1.max(b.y as f64);
    }
    v
}
