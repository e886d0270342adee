//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Every criterion runs to completion and prints its outcome; the process
//! exits non-zero only when a criterion panics.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bs_tiler::alphabet::{project_pi, Kind, Pattern};
use bs_tiler::analysis::{
    bottom_range_formula, cone_completion, entropy_table, height_sequence, minimality_verdict, periodicity_probe,
    small_periods, BottomPattern, MinimalityVerdict, ProbeOutcome,
};
use bs_tiler::checker::{check_pattern, harvest_tables, Tables};
use bs_tiler::codec::{decode, encode_with_paths, sample_window, tile_under, vertical_position, Transducer};
use bs_tiler::group::{folner_ratio, normalize, parse_element, rectangle, Generator, GroupElement};
use bs_tiler::render::{csv_string, render_tiling_svg, RenderSpec};
use bs_tiler::robinson::RobinsonSystem;
use bs_tiler::substitution::{expanding_eigen, normalize_unique_size, ClosedForm, EigenData, Substitution};
use bs_tiler::Error;
use bs_tiler::tiling::{check_unique_size, classify_at, grow_window, make_tile, ChoicePolicy, TilingWindow, Viewport};

type Outcome = Result<String, String>;

fn fib() -> Substitution {
    Substitution::from_strs(&["a", "b"], &[&["aab"], &["ba"]], 2).unwrap()
}

fn robinson() -> Substitution {
    Substitution::from_strs(
        &["A", "B", "C", "D", "E"],
        &[&["DDEDD"], &["DDDDD"], &["DDEDD"], &["BCBCB", "CBCBC"], &["CBABC"]],
        2,
    )
    .unwrap()
}

fn fib_normalized() -> (Substitution, EigenData) {
    let s = fib();
    let e = expanding_eigen(&s).unwrap();
    normalize_unique_size(&s, &e).unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn random_element(rng: &mut ChaCha8Rng, n: u32) -> GroupElement {
    let len = rng.gen_range(0..=30);
    let w: Vec<Generator> = (0..len).map(|_| Generator::ALL[rng.gen_range(0..4)]).collect();
    normalize(&w, n)
}

fn group_layer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let n = rng.gen_range(2..=3);
        let g = random_element(&mut rng, n);
        let h = random_element(&mut rng, n);
        let (x1, y1) = g.phi();
        let (x2, y2) = h.phi();
        ensure(g.mul(&h).phi() == (x1 + x2.scale(y1), y1 + y2), format!("Φ law fails for {g}, {h}"))?;
        ensure(normalize(&g.word(), n) == g, format!("word round trip fails for {g}"))?;
        ensure(parse_element(&g.to_string(), n).ok() == Some(g), format!("text round trip fails for {g}"))?;
    }
    let size = rectangle(2, 4, 2).len();
    ensure(size == 120, format!("|R2,4| = {size}"))?;
    let ratios: Vec<f64> = [(2, 4), (4, 6), (8, 8)]
        .iter()
        .map(|&(k, l)| {
            let (b, s) = folner_ratio(k, l, 2);
            b as f64 / s as f64
        })
        .collect();
    ensure(ratios.windows(2).all(|w| w[1] < w[0]), format!("Følner ratios {ratios:?}"))?;
    Ok(format!("10^4 pairs exact, |R2,4| = 120, Følner {:.3} > {:.3} > {:.3}", ratios[0], ratios[1], ratios[2]))
}

fn eigen_layer() -> Outcome {
    let s = fib();
    let e = expanding_eigen(&s).unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    ensure((e.lambda - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12, format!("λ = {}", e.lambda))?;
    ensure((e.v[0] - phi).abs() < 1e-12 && (e.v[1] - 1.0).abs() < 1e-12, format!("v = {:?}", e.v))?;
    match &e.closed_form {
        Some(ClosedForm::Quadratic { lambda, .. }) => {
            ensure((lambda.value() - e.lambda).abs() < 1e-12, "closed form λ differs")?;
        }
        other => return Err(format!("closed form {other:?}")),
    }
    let (_, n) = normalize_unique_size(&s, &e).unwrap();
    let got = (n.power, n.h_box, n.h_rule, n.w.clone(), n.m);
    ensure(got == (3, 4, 3, vec![3, 2], 21), format!("Fibonacci normalization {got:?}"))?;
    let r = robinson();
    let er = expanding_eigen(&r).unwrap();
    ensure(er.closed_form == Some(ClosedForm::Integer { lambda: 5, v: vec![1; 5] }), format!("σ_R closed form {:?}", er.closed_form))?;
    let (_, nr) = normalize_unique_size(&r, &er).unwrap();
    ensure((nr.power, nr.m) == (2, 25), format!("σ_R normalization ({}, {})", nr.power, nr.m))?;
    Ok("Fibonacci λ, v to 1e-12, σ_R λ = 5, v ≡ 1, normalizations (3,4,3,(3,2),21) and (2,25)".into())
}

fn tiling_layer() -> Outcome {
    let (s, e) = fib_normalized();
    let mut tiles = 0;
    let mut worst = 0f64;
    let mut unique = 0;
    for seed in 0..50u64 {
        let w = grow_window(&s, &e, (seed % 2) as usize, 1, 2, 12.0, &ChoicePolicy::Seeded(seed), 0.1 * seed as f64)
            .map_err(|x| x.to_string())?;
        let t = w.generator().map_err(|x| x.to_string())?;
        for row in &w.rows {
            for tile in &row.tiles {
                let st = make_tile(&s, &t.scale, tile.letter, tile.left, row.top, tile.rule).map_err(|x| x.to_string())?;
                worst = worst.max(st.width_defect());
                tiles += 1;
            }
        }
        let r = check_unique_size(&w).map_err(|x| x.to_string())?;
        ensure(r.violations.is_empty(), format!("seed {seed}: {:?}", r.violations))?;
        unique += r.tiles.len();
    }
    ensure(tiles >= 1000, format!("only {tiles} tiles"))?;
    ensure(worst <= 1e-9, format!("width defect {worst:e}"))?;
    let w = grow_window(&s, &e, 0, 2, 1, 40.0, &ChoicePolicy::Seeded(5), 0.37).map_err(|x| x.to_string())?;
    let t = w.generator().map_err(|x| x.to_string())?;
    let mut classes = BTreeMap::new();
    for level in -10..2i64 {
        let b = 2f64.powi(level as i32);
        for c in 0..40 {
            let content = classify_at(t, -20.0 * b + c as f64 * b, level).map_err(|x| x.to_string())?;
            *classes.entry(content.class).or_insert(0usize) += 1;
        }
    }
    ensure(classes.values().sum::<usize>() == 480 && classes.len() == 5, format!("classes {classes:?}"))?;
    Ok(format!("{tiles} tiles, defect ≤ {worst:.1e}; 480 boxes in 5 classes; {unique} tiles audited on 50 windows"))
}

/// Left edge of the tile corner inside the box of `g`.
fn true_line(w: &TilingWindow, g: &GroupElement) -> Option<f64> {
    let t = w.generator().ok()?;
    let b = g.phi_box();
    let (x0, width) = (b.x.to_f64(), b.width.to_f64());
    let row = t.line_in_level(b.y).ok()??;
    t.tiles(row, x0, x0 + width).into_iter().map(|u| u.left).find(|&l| l >= x0 && l < x0 + width)
}

/// The first `count` sample windows whose encoding on `support` is
/// decidable in floating point, with the number of windows redrawn.
fn encoded_samples(s: &Substitution, e: &EigenData, support: &[GroupElement], depth: usize, count: usize) -> Result<(Vec<(u64, TilingWindow, Pattern)>, usize), String> {
    let mut out = Vec::new();
    let mut redrawn = 0;
    let mut seed = 0;
    while out.len() < count {
        let w = sample_window(s, e, seed).map_err(|x| x.to_string())?;
        match encode_with_paths(&w, support, depth) {
            Ok(p) => out.push((seed, w, p)),
            Err(Error::Ambiguous { .. }) => redrawn += 1,
            Err(x) => return Err(format!("seed {seed}: {x}")),
        }
        seed += 1;
    }
    Ok((out, redrawn))
}

fn codec_round_trip() -> Outcome {
    let (s, e) = fib_normalized();
    let tables = harvest_tables(&s, &e, 200, 1).map_err(|x| x.to_string())?;
    let tr = Transducer::derive(&tables);
    let support = rectangle(6, 6, 2);
    let tol = 2f64.powi(-15);
    let (mut cells, mut lines, mut tiles) = (0usize, 0usize, 0usize);
    let (samples, redrawn) = encoded_samples(&s, &e, &support, 20, 100)?;
    for (seed, w, p) in &samples {
        let (seed, w) = (*seed, w);
        let v = check_pattern(&p, &tables).map_err(|x| x.to_string())?;
        if let Some(first) = v.first() {
            return Err(format!("seed {seed}: {} violations, first {first}", v.len()));
        }
        for g in &support {
            let l = p.get(g).ok_or_else(|| format!("seed {seed}: {g} not encoded"))?;
            let truth = tile_under(&w, g).map_err(|x| x.to_string())?;
            ensure(project_pi(l) == truth, format!("seed {seed}: π at {g} is {} not {truth}", project_pi(l)))?;
            cells += 1;
        }
        let d = decode(&p, &tr, &s, &e.v, 16, |g| support.contains(g)).map_err(|x| x.to_string())?;
        for line in &d.lines {
            let x = true_line(&w, &line.cell).ok_or_else(|| format!("seed {seed}: no corner under {}", line.cell))?;
            let tol = tol * 2f64.powi(line.level as i32).max(1.0);
            ensure((line.position.mid() - x).abs() <= tol, format!("seed {seed}: line at {} off by {:e}", line.cell, (line.position.mid() - x).abs()))?;
            lines += 1;
        }
        let t = w.generator().map_err(|x| x.to_string())?;
        for row in &d.window.rows {
            for tile in &row.tiles {
                let y = row.top - 1e-3;
                let truth = t.tile_at(tile.left + tile.width / 2.0, y).map_err(|x| x.to_string())?;
                ensure(truth.letter == tile.letter, format!("seed {seed}: decoded {} at {}, true {}", tile.letter, tile.left, truth.letter))?;
                ensure((truth.left - tile.left).abs() <= tol * tile.width.max(1.0), format!("seed {seed}: tile edge at {} vs {}", tile.left, truth.left))?;
                tiles += 1;
            }
        }
    }
    ensure(lines > 0 && tiles > 0, "nothing decoded")?;
    Ok(format!(
        "100 windows on R6,6 ({redrawn} redrawn for rounding ties): 0 violations, π exact on {cells} cells, {lines} lines and {tiles} tiles recovered"
    ))
}

fn transducer() -> Outcome {
    let (s, e) = fib_normalized();
    let tables = harvest_tables(&s, &e, 200, 1).map_err(|x| x.to_string())?;
    let tr = Transducer::derive(&tables);
    let want: BTreeSet<Kind> = [Kind::T1, Kind::T2, Kind::M1, Kind::M2, Kind::B1].into_iter().collect();
    ensure(tr.states == want, format!("states {:?}", tr.states))?;
    let support = rectangle(6, 6, 2);
    let mut starts = 0;
    let (samples, redrawn) = encoded_samples(&s, &e, &support, 20, 100)?;
    for (seed, _, p) in &samples {
        for g in support.iter().filter(|g| p.get(g).is_some_and(|l| matches!(l.kind, Kind::T1 | Kind::T2))) {
            let vp = vertical_position(&p, &tr, g, 20).map_err(|x| format!("seed {seed}: {x}"))?;
            ensure(vp.complete && vp.depth == 20, format!("seed {seed}: path from {g} stops at {}", vp.depth))?;
            let last = vp.cells.last().unwrap().phi_box();
            ensure(last.x == vp.lower && last.width == vp.width, format!("seed {seed}: interval mismatch at {g}"))?;
            starts += 1;
        }
    }
    ensure(starts > 0, "no border cells")?;
    Ok(format!("states {{t1,t2,m1,m2,b1}}, {starts} paths unique to depth 20 on 100 windows ({redrawn} redrawn), intervals exact"))
}

fn cone_lemma() -> Outcome {
    let (s, e) = fib_normalized();
    let tables = harvest_tables(&s, &e, 200, 1).map_err(|x| x.to_string())?;
    let (mut admissible, mut unique, mut fast) = (0, 0, 0);
    let mut multiple = Vec::new();
    let mut ranges = Vec::new();
    for letter in 0..s.size() {
        let mut oracle: Vec<u32> = Vec::new();
        for index in 1..=e.m {
            for ell in 2..=64u32 {
                let c = cone_completion(BottomPattern { ell, letter, index }, &tables, &e, u64::MAX).map_err(|x| x.to_string())?;
                ensure(c.exhaustive, "search not exhaustive")?;
                if c.heights.is_empty() {
                    continue;
                }
                admissible += 1;
                if index == 1 {
                    oracle.push(ell);
                }
                if c.unique() {
                    unique += 1;
                } else if multiple.len() < 3 {
                    multiple.push(format!("({ell},{},{index}) heights {:?}", s.alphabet[letter], c.heights));
                }
                if c.fast_path_agrees() {
                    fast += 1;
                }
            }
        }
        let formula = bottom_range_formula(e.h_rule_base(2), e.w[letter]);
        let seen = oracle.first().zip(oracle.last());
        ranges.push(format!("{}: formula [{}, {}] oracle {seen:?}", s.alphabet[letter], formula.0, formula.1));
    }
    let detail = format!(
        "{admissible} admissible bases, {unique} unique, fast path agrees on {fast}; {}; e.g. {}",
        ranges.join(", "),
        multiple.join(", ")
    );
    ensure(admissible > 0 && unique == admissible && fast == admissible, detail.clone())?;
    Ok(detail)
}

fn zero_entropy() -> Outcome {
    let (s, e) = fib_normalized();
    let tables = harvest_tables(&s, &e, 200, 1).map_err(|x| x.to_string())?;
    let rows = entropy_table(&tables, &[(2, 2), (2, 3), (3, 3), (3, 4), (4, 4), (4, 5)], 20_000);
    let ratios: Vec<String> =
        rows.iter().map(|r| format!("R{},{} {:.4}{}", r.k, r.ell, r.ratio, if r.exact { "" } else { "≥" })).collect();
    let detail = ratios.join(", ");
    ensure(rows.iter().all(|r| r.exact), format!("leaf cap reached, lower bounds only: {detail}"))?;
    ensure(rows.windows(2).all(|w| w[1].ratio <= w[0].ratio), format!("not monotone: {detail}"))?;
    ensure(rows.last().unwrap().ratio < rows[0].ratio / 2.0, format!("last not below half the first: {detail}"))?;
    ensure(rows.iter().all(|r| r.bound_holds == Some(true)), format!("boundary bound: {detail}"))?;
    Ok(detail)
}

fn aperiodicity(tables: &Tables) -> Outcome {
    let periods = small_periods(3, 2);
    let mut tally: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for g in &periods {
        let key = match periodicity_probe(tables, g, 3, 4, 50_000).map_err(|x| x.to_string())? {
            ProbeOutcome::Contradiction { .. } => "contradiction",
            ProbeOutcome::Consistent { .. } => "consistent",
            ProbeOutcome::Inconclusive { .. } => "inconclusive",
        };
        tally.entry(key).or_default().push(g.to_string());
    }
    let detail = tally
        .iter()
        .map(|(k, v)| format!("{} {k} (e.g. {})", v.len(), v[0]))
        .collect::<Vec<_>>()
        .join(", ");
    ensure(tally.keys().all(|&k| k == "contradiction"), format!("{} periods: {detail}", periods.len()))?;
    Ok(format!("{} periods: {detail}", periods.len()))
}

fn minimality() -> Outcome {
    let a = height_sequence(7.0 / 3.0, 0.0, 300).map_err(|x| x.to_string())?;
    let b = height_sequence(7.0 / 3.0, 1.0 / 6.0, 300).map_err(|x| x.to_string())?;
    let f = |h: &bs_tiler::analysis::HeightSequence, k: i64| h.frequencies.get(&k).copied().unwrap_or(0.0);
    ensure((f(&a, 3) - 1.0).abs() < 1e-9 && f(&a, 4) == 0.0, format!("offset 0: {:?}", a.frequencies))?;
    ensure(
        (f(&b, 3) - 2.0 / 3.0).abs() < 1e-9 && (f(&b, 4) - 1.0 / 3.0).abs() < 1e-9,
        format!("offset 1/6: {:?}", b.frequencies),
    )?;
    let verdict = |s: &Substitution| minimality_verdict(&expanding_eigen(s).unwrap(), 2).unwrap();
    for word in ["aa", "aaaa"] {
        let s = Substitution::from_strs(&["a"], &[&[word]], 2).unwrap();
        ensure(matches!(verdict(&s), MinimalityVerdict::NonMinimal { .. }), format!("λ = {} not flagged", word.len()))?;
    }
    for (name, s) in [("Fibonacci", fib()), ("σ_R", robinson())] {
        ensure(matches!(verdict(&s), MinimalityVerdict::MinimalExpected { .. }), format!("{name} flagged non-minimal"))?;
    }
    Ok("L = 7/3 frequencies (1, 0) and (2/3, 1/3); λ ∈ {2, 4} non-minimal; Fibonacci, σ_R minimal-expected".into())
}

fn robinson_lift() -> Outcome {
    let mut parts = Vec::new();
    for n in [2, 3] {
        let sys = RobinsonSystem::new(n, 200, 1).map_err(|x| x.to_string())?;
        let (p, t) = sys.lift_with_tiling(&rectangle(4, 5, n), 1).map_err(|x| x.to_string())?;
        let r = sys.verify(&p, Some(&t)).map_err(|x| x.to_string())?;
        ensure(r.is_valid(), format!("n = {n}: {} violations, sheets {:?}", r.violations.len(), r.sheets.iter().filter(|s| !s.structure.is_valid()).count()))?;
        parts.push(format!("n = {n}: {} cells, {} sheets, {} tiles", r.cells, r.sheets.len(), r.tiles()));
    }
    Ok(parts.join("; "))
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run_cli(args: &[&str], dir: &Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bs-tiler")).args(args).current_dir(dir).env_remove("BS_TILER_SEED").output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn rendering_cli(tables: &Tables) -> Outcome {
    let s = fib();
    let e = expanding_eigen(&s).unwrap();
    let w = grow_window(&s, &e, 0, 0, 2, 0.0, &ChoicePolicy::Seeded(1), 0.0).map_err(|x| x.to_string())?;
    let v = w.viewport;
    let spec = RenderSpec::new(Viewport { x0: v.x0 - 0.5, x1: v.x1 + 0.5, y0: v.y0 - 2.0, y1: v.y1 + 0.5 }, 40.0);
    let first = render_tiling_svg(&w, &spec).map_err(|x| x.to_string())?;
    let second = render_tiling_svg(&w, &spec).map_err(|x| x.to_string())?;
    let golden = std::fs::read_to_string(golden_dir().join("fib3.svg")).map_err(|x| x.to_string())?;
    ensure(first == second && first == golden, "fib3.svg differs between runs or from its golden file")?;
    let csv = |t: &Tables| csv_string(&entropy_table(t, &[(0, 0), (0, 1)], 20_000)).map_err(|x| x.to_string());
    ensure(csv(tables)? == csv(tables)?, "entropy CSV differs between runs")?;

    let dir = std::env::temp_dir().join(format!("bs-tiler-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|x| x.to_string())?;
    std::fs::write(dir.join("fib.json"), r#"{"n":2,"alphabet":["a","b"],"rules":{"a":["aab"],"b":["ba"]}}"#)
        .map_err(|x| x.to_string())?;
    std::fs::write(dir.join("good.txt"), "BCBCB\nDDEDD\n").map_err(|x| x.to_string())?;
    std::fs::write(dir.join("bad.txt"), "BBC\n").map_err(|x| x.to_string())?;
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec![], 2),
        (vec!["--help"], 0),
        (vec!["--version"], 0),
        (vec!["frobnicate"], 2),
        (vec!["normalize", "a t"], 0),
        (vec!["normalize", "a x"], 2),
        (vec!["mul", "t^1 a^2 t^0", "t^0 a^1 t^-1"], 0),
        (vec!["phi", "t^1 a^3 t^-2"], 0),
        (vec!["rect", "2", "4"], 0),
        (vec!["subst", "--subst", "fib.json"], 0),
        (vec!["subst", "--subst", "missing.json"], 2),
        (vec!["grow", "--subst", "fib.json", "--letter", "a", "--up", "1", "--down", "1", "--half-width", "4", "-o", "w.json"], 0),
        (vec!["grow", "--subst", "fib.json", "--letter", "z"], 2),
        (vec!["encode", "w.json", "--support", "2,3", "-o", "p.json"], 0),
        (vec!["decode", "--subst", "fib.json", "--samples", "20", "p.json"], 0),
        (vec!["check", "--subst", "fib.json", "--samples", "20", "p.json"], 0),
        (vec!["check", "--subst", "fib.json", "--samples", "20", "twisted.json"], 1),
        (vec!["enumerate", "--subst", "fib.json", "--samples", "20", "--support", "0,0"], 0),
        (vec!["entropy", "--subst", "fib.json", "--samples", "20", "--pairs", "0,0", "0,1", "--cap", "100"], 0),
        (vec!["cone", "--subst", "fib.json", "--samples", "20", "--ell", "12", "--letter", "a"], 0),
        (vec!["probe", "--subst", "fib.json", "--samples", "20", "--period", "t^0 a^1 t^0", "--support", "1,2"], 0),
        (vec!["heights", "--row-height", "2.3333333333333335", "--offset", "0.16666666666666666", "--count", "9"], 0),
        (vec!["heights", "--subst", "fib.json"], 0),
        (vec!["heights", "--row-height", "0.5"], 2),
        (vec!["robinson", "lift", "--support", "2,3", "--samples", "20", "-o", "rp.json"], 0),
        (vec!["robinson", "check", "good.txt"], 0),
        (vec!["robinson", "check", "bad.txt"], 1),
        (vec!["render", "tiling", "w.json", "-o", "t.svg"], 0),
        (vec!["render", "tiling", "w.json", "--viewport", "1,0,0,1"], 2),
        (vec!["render", "sheet", "--subst", "fib.json", "--samples", "20", "p.json", "-o", "s.svg"], 0),
    ];
    let mut failures = Vec::new();
    for (args, want) in &cases {
        if args.first() == Some(&"check") && args.contains(&"twisted.json") {
            twist(&dir).map_err(|x| format!("preparing a violating pattern: {x}"))?;
        }
        let (code, _) = run_cli(args, &dir);
        if code != *want {
            failures.push(format!("`{}` exited {code}, expected {want}", args.join(" ")));
        }
    }
    let (_, text) = run_cli(&["normalize", "a t"], &dir);
    if text.trim() != "t^1 a^2 t^0" {
        failures.push(format!("normalize printed {text:?}"));
    }
    let _ = std::fs::remove_dir_all(&dir);
    ensure(failures.is_empty(), failures.join("; "))?;
    Ok(format!("goldens stable, {} CLI invocations honour the exit-code contract", cases.len() + 1))
}

/// Writes `twisted.json`: the encoded pattern with one `t1` cell turned into `m3`.
fn twist(dir: &Path) -> Result<(), String> {
    let text = std::fs::read_to_string(dir.join("p.json")).map_err(|x| x.to_string())?;
    let mut v: serde_json::Value = serde_json::from_str(&text).map_err(|x| x.to_string())?;
    let cells = v.as_array_mut().ok_or("pattern is not an array")?;
    let top = |c: &serde_json::Value| ["t1", "t2", "t3", "t4"].iter().any(|k| c["letter"]["kind"] == *k);
    let cell = cells.iter_mut().find(|c| top(c)).ok_or("no tile-top cell")?;
    cell["letter"] = serde_json::json!({"kind": "m3", "a": "a", "i": 1});
    std::fs::write(dir.join("twisted.json"), v.to_string()).map_err(|x| x.to_string())
}

fn main() {
    let (s, e) = fib_normalized();
    let tables = &harvest_tables(&s, &e, 200, 1).unwrap();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("group layer", Box::new(group_layer)),
        ("eigen layer", Box::new(eigen_layer)),
        ("tiling layer", Box::new(tiling_layer)),
        ("codec round trip", Box::new(codec_round_trip)),
        ("transducer", Box::new(transducer)),
        ("cone lemma", Box::new(cone_lemma)),
        ("zero entropy trend", Box::new(zero_entropy)),
        ("aperiodicity probes", Box::new(|| aperiodicity(tables))),
        ("minimality dichotomy", Box::new(minimality)),
        ("Robinson lift", Box::new(robinson_lift)),
        ("rendering and CLI", Box::new(|| rendering_cli(tables))),
    ];
    let mut passed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => {
                passed += 1;
                println!("PASS {:>2} {name} [{secs:.1}s]: {detail}", i + 1);
            }
            Err(detail) => println!("FAIL {:>2} {name} [{secs:.1}s]: {detail}", i + 1),
        }
    }
    println!("{passed}/{} criteria pass", criteria.len());
}
