//! The A/B/C/D/E hierarchy: the substitution σ_R, its two structural laws
//! and its lift to BS(1,n) through the general codec.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::Pattern;
use crate::checker::{check_pattern, harvest_tables_with_paths, Tables, Violation};
use crate::codec::{decode, encode_with_paths, on_sheet, sheet_roots, Transducer};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::substitution::{expanding_eigen, normalize_unique_size, EigenData, Substitution};
use crate::tiling::{Row, Scale, Tiling, TilingWindow, Viewport};

/// Letters of σ_R in alphabet order.
pub const LETTERS: [char; 5] = ['A', 'B', 'C', 'D', 'E'];

const B: usize = 1;
const D: usize = 3;

/// The fixed rules of σ_R as strings.
pub const RULES: [&[&str]; 5] = [&["DDEDD"], &["DDDDD"], &["DDEDD"], &["BCBCB", "CBCBC"], &["CBABC"]];

/// σ_R over the group base `n`.
pub fn robinson_substitution_for(n: u32) -> Substitution {
    Substitution::from_strs(&["A", "B", "C", "D", "E"], &RULES, n).expect("σ_R is well formed")
}

/// σ_R over BS(1,2).
pub fn robinson_substitution() -> Substitution {
    robinson_substitution_for(2)
}

/// True for letters of the `{A,B,C}` rows.
pub fn is_abc(c: char) -> bool {
    matches!(c, 'A' | 'B' | 'C')
}

/// True for letters of the `{D,E}` rows.
pub fn is_de(c: char) -> bool {
    matches!(c, 'D' | 'E')
}

fn images(c: char) -> &'static [&'static str] {
    match LETTERS.iter().position(|&l| l == c) {
        Some(i) => RULES[i],
        None => &[],
    }
}

/// True when `lower` is a factor of a concatenation of images of `upper`,
/// starting at position `offset` of that concatenation, with every
/// D-choice free. `'.'` in either word matches anything.
pub fn row_pair_consistent(upper: &str, lower: &str, offset: usize) -> bool {
    let upper: Vec<char> = upper.chars().collect();
    let lower: Vec<char> = lower.chars().collect();
    if offset + lower.len() > 5 * upper.len() {
        return false;
    }
    upper.iter().enumerate().all(|(i, &u)| {
        let lo = (5 * i).max(offset);
        let hi = (5 * i + 5).min(offset + lower.len());
        if lo >= hi || u == '.' {
            return true;
        }
        let seg = &lower[lo - offset..hi - offset];
        images(u).iter().any(|img| {
            let img: Vec<char> = img.chars().collect();
            seg.iter().zip(&img[lo - 5 * i..hi - 5 * i]).all(|(&l, &m)| l == '.' || l == m)
        })
    })
}

/// Outcome of [`structure_check`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    /// Rows examined.
    pub rows: usize,
    /// Law violations, one line each.
    pub violations: Vec<String>,
}

impl StructureReport {
    /// True when no law is violated.
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks consecutive rows against the alternation of `{A,B,C}` rows with
/// `{D,E}` rows and against B at every second position of `{A,B,C}` rows.
/// Positions are indices in each row string; `'.'` marks an unknown cell.
pub fn structure_check<S: AsRef<str>>(rows: &[S]) -> StructureReport {
    let mut violations = Vec::new();
    let mut kinds: Vec<Option<bool>> = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        let row: Vec<char> = row.as_ref().chars().collect();
        if let Some((i, c)) = row.iter().enumerate().find(|(_, &c)| c != '.' && !LETTERS.contains(&c)) {
            violations.push(format!("row {r}: unknown letter {c:?} at {i}"));
        }
        let abc = row.iter().any(|&c| is_abc(c));
        let de = row.iter().any(|&c| is_de(c));
        if abc && de {
            violations.push(format!("row {r}: mixes A/B/C with D/E"));
        }
        kinds.push(match (abc, de) {
            (true, false) => Some(true),
            (false, true) => Some(false),
            _ => None,
        });
        if abc && !de {
            let fits = |c: usize| row.iter().enumerate().all(|(i, &x)| x == '.' || (x == 'B') == (i % 2 == c));
            if !fits(0) && !fits(1) {
                let adjacent = row.windows(2).position(|w| w[0] == 'B' && w[1] == 'B');
                match adjacent {
                    Some(i) => violations.push(format!("row {r}: B adjacent to B at {i}")),
                    None => violations.push(format!("row {r}: B not at every second position")),
                }
            }
        }
    }
    for (r, pair) in kinds.windows(2).enumerate() {
        if let (Some(x), Some(y)) = (pair[0], pair[1]) {
            if x == y {
                violations.push(format!("rows {r} and {}: no alternation", r + 1));
            }
        }
    }
    StructureReport { rows: rows.len(), violations }
}

/// The σ_R rule for a letter at a position of the given parity that keeps
/// B on even positions of the row below.
fn parity_rule(letter: usize, parity: usize) -> usize {
    if letter == D {
        parity
    } else {
        0
    }
}

/// Applies σ_R with parity-consistent choices to a word whose first
/// letter sits at position `start`.
fn apply_parity(s: &Substitution, word: &[usize], start: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(5 * word.len());
    for (i, &c) in word.iter().enumerate() {
        out.extend_from_slice(&s.rules[c][parity_rule(c, (start + i) % 2)]);
    }
    out
}

/// Length of the left-border paths encoded below the support: enough for
/// a vertical line within `2^{-20}`.
pub fn path_depth(n: u32) -> usize {
    (20.0 / (n as f64).log2()).ceil() as usize
}

/// The σ_R-normalized system with its harvested tables.
#[derive(Clone, Debug)]
pub struct RobinsonSystem {
    /// σ_R over the chosen base.
    pub base: Substitution,
    /// The normalized power of σ_R.
    pub sigma: Substitution,
    /// Eigen data of the normalized power.
    pub eigen: EigenData,
    /// Rules of the normalized power by letter and position parity.
    pub parity_rules: Vec<[usize; 2]>,
    /// Local rules.
    pub tables: Tables,
    /// Left-border transducer.
    pub transducer: Transducer,
}

impl RobinsonSystem {
    /// Normalizes σ_R over base `n` and harvests its tables from `samples`
    /// random windows encoded on `R_{4,5}` with three steps of every
    /// left-border path.
    pub fn new(n: u32, samples: usize, seed: u64) -> Result<Self> {
        let base = robinson_substitution_for(n);
        let e = expanding_eigen(&base)?;
        let (sigma, eigen) = normalize_unique_size(&base, &e)?;
        if eigen.power % 2 != 0 {
            return Err(Error::Substitution("σ_R normalized to an odd power".into()));
        }
        let mut parity_rules = Vec::new();
        for x in 0..base.size() {
            let mut pair = [0; 2];
            for (parity, slot) in pair.iter_mut().enumerate() {
                let mut word = vec![x];
                let mut start = parity;
                for _ in 0..eigen.power {
                    word = apply_parity(&base, &word, start);
                    start *= 5;
                }
                *slot = sigma.rules[x]
                    .iter()
                    .position(|img| *img == word)
                    .ok_or_else(|| Error::Substitution("parity image missing from the normalized power".into()))?;
            }
            parity_rules.push(pair);
        }
        let tables = harvest_tables_with_paths(&sigma, &eigen, samples, seed, 4, 5, 3)?;
        let transducer = Transducer::derive(&tables);
        Ok(RobinsonSystem { base, sigma, eigen, parity_rules, tables, transducer })
    }

    /// A tiling whose rows all read `{A,B,C}` words with B on even
    /// positions, covering the boxes of `support` with margin.
    pub fn tiling(&self, support: &[GroupElement], seed: u64) -> Result<Tiling> {
        if support.is_empty() {
            return Err(Error::Input("empty support".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = Scale::new(&self.eigen, self.sigma.n);
        let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for g in support {
            let b = g.phi_box();
            x0 = x0.min(b.x.to_f64());
            x1 = x1.max(b.right().to_f64());
            y1 = y1.max(b.y as f64);
        }
        let top = y1 + 2.0 * scale.height + rng.gen::<f64>();
        let unit = scale.pow(top + scale.height);
        let w = self.eigen.v[B] * unit;
        let hidden_left = x0 - w * (1.0 + rng.gen::<f64>());
        let len = ((x1 - hidden_left) / w).ceil() as usize + 2;
        let mut word = vec![B];
        while word.len() < len + 2 * len.max(8) {
            word = apply_parity(&self.base, &apply_parity(&self.base, &word, 0), 0);
        }
        let start = 2 * rng.gen_range(0..=(word.len() - len) / 2 - 1);
        let hidden = word[start..start + len].to_vec();
        let mut t = Tiling::new(&self.sigma, scale, hidden, hidden_left, top, seed);
        t.parity_rules = Some(self.parity_rules.clone());
        Ok(t)
    }

    /// A window of the tiling holding `rows` rows below the hidden one.
    pub fn window(&self, support: &[GroupElement], seed: u64, rows: i64) -> Result<TilingWindow> {
        let t = self.tiling(support, seed)?;
        let (x0, x1) = t.extent();
        let viewport = Viewport { x0, x1, y0: t.row_top(rows), y1: t.row_top(-1) };
        Ok(TilingWindow::from_tiling(t, -1, rows - 1, viewport, 0))
    }

    /// Encodes a σ_R tiling on `support`, with the tiling used. A placement
    /// whose tile edges fall within rounding of the box grid is redrawn from
    /// the next seed.
    pub fn lift_with_tiling(&self, support: &[GroupElement], seed: u64) -> Result<(Pattern, Tiling)> {
        let mut last = None;
        for attempt in 0..8 {
            let t = self.tiling(support, seed.wrapping_add(attempt))?;
            let (x0, x1) = t.extent();
            let viewport = Viewport { x0, x1, y0: t.row_top(0), y1: t.row_top(-1) };
            let w = TilingWindow::from_tiling(t, 0, 0, viewport, 0);
            match encode_with_paths(&w, support, path_depth(self.sigma.n)) {
                Ok(p) => return Ok((p, w.tiling.expect("generated window"))),
                Err(e @ Error::Ambiguous { .. }) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }

    /// Encodes a σ_R tiling on `support`.
    pub fn lift(&self, support: &[GroupElement], seed: u64) -> Result<Pattern> {
        Ok(self.lift_with_tiling(support, seed)?.0)
    }

    /// Checks a lifted pattern, decodes it sheet by sheet and checks the
    /// structure of every sheet. With `truth`, decoded letters are compared
    /// with the generating tiling.
    pub fn verify(&self, p: &Pattern, truth: Option<&Tiling>) -> Result<LiftReport> {
        let violations = check_pattern(p, &self.tables)?;
        let cells: Vec<GroupElement> = p.cells.keys().copied().collect();
        let mut sheets = Vec::new();
        for root in sheet_roots(&cells) {
            let d = decode(p, &self.transducer, &self.sigma, &self.eigen.v, path_depth(self.sigma.n), |g| on_sheet(g, root))?;
            let mut mismatches = 0;
            let mut tiles = 0;
            for row in &d.window.rows {
                for tile in &row.tiles {
                    tiles += 1;
                    if let Some(t) = truth {
                        let real = t.tile_at(tile.left + tile.width / 2.0, row.top - 1e-3)?;
                        let near = (real.left - tile.left).abs() < 1e-6 * tile.width;
                        if real.letter != tile.letter || !near {
                            mismatches += 1;
                        }
                    }
                }
            }
            let rows = self.sheet_rows(&d.window.rows);
            let structure = structure_check(&rows);
            let mut pairs = Vec::new();
            for (r, pair) in rows.windows(2).enumerate() {
                if !row_pair_consistent_aligned(&pair[0], &pair[1]) {
                    pairs.push(format!("rows {r} and {}: lower row is no image of the upper", r + 1));
                }
            }
            sheets.push(SheetReport {
                root: root.to_string(),
                tiles,
                rows,
                structure,
                pair_violations: pairs,
                mismatches,
                inconsistencies: d.inconsistencies.len(),
            });
        }
        Ok(LiftReport { cells: p.len(), violations, sheets })
    }

    /// Expands decoded rows into aligned σ_R rows, inserting the rows
    /// hidden inside each tile of the normalized power.
    pub fn sheet_rows(&self, rows: &[Row]) -> Vec<String> {
        let power = self.eigen.power as u32;
        let rows: Vec<&Row> = rows.iter().filter(|r| !r.tiles.is_empty()).collect();
        let Some(head) = rows.first() else { return Vec::new() };
        let min_left = rows.iter().map(|r| r.tiles[0].left).fold(f64::INFINITY, f64::min);
        let w0 = head.tiles[0].width;
        let origin = head.tiles[0].left - ((head.tiles[0].left - min_left) / w0 - 1e-6).ceil().max(0.0) * w0;
        let place = |row: &Row, len: usize| -> Vec<char> {
            let w = row.tiles[0].width;
            let mut cells = vec!['.'; len];
            for t in &row.tiles {
                let i = ((t.left - origin) / w).round();
                if i >= 0.0 && (i as usize) < len {
                    cells[i as usize] = LETTERS[t.letter];
                }
            }
            cells
        };
        let height = Scale::new(&self.eigen, self.sigma.n).height;
        let mut out: Vec<String> = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            let w = row.tiles[0].width;
            let len = ((row.tiles.last().unwrap().right() - origin) / w).round() as usize;
            let mut level = place(row, len);
            let next = rows.get(r + 1).filter(|b| (row.top - b.top - height).abs() < 1e-6);
            let below = next.map(|b| place(b, len * 5usize.pow(power)));
            out.push(level.iter().collect());
            for depth in 1..power {
                level = expand_level(&level, below.as_ref(), (power - depth) as usize);
                out.push(level.iter().collect());
            }
            if r + 1 < rows.len() && next.is_none() {
                out.push(String::new());
            }
        }
        out
    }
}

/// Expands a σ_R row one step, choosing each D image to match the known
/// letters `remaining` steps further down.
fn expand_level(level: &[char], below: Option<&Vec<char>>, remaining: usize) -> Vec<char> {
    let span = 5usize.pow(remaining as u32);
    let mut out = Vec::with_capacity(5 * level.len());
    for (i, &c) in level.iter().enumerate() {
        let fits: Vec<&str> = images(c)
            .iter()
            .copied()
            .filter(|img| {
                let Some(cells) = below else { return true };
                img.chars().enumerate().all(|(j, m)| {
                    let lo = (5 * i + j) * span;
                    let seg: String = cells[lo.min(cells.len())..(lo + span).min(cells.len())].iter().collect();
                    !seg.chars().any(|x| x != '.') || descends(m, &seg, remaining)
                })
            })
            .collect();
        match fits.as_slice() {
            [one] => out.extend(one.chars()),
            _ => out.extend(std::iter::repeat('.').take(5)),
        }
    }
    out
}

/// True when `seg` can be the image of `c` after `steps` σ_R steps.
fn descends(c: char, seg: &str, steps: usize) -> bool {
    if steps == 0 {
        return seg.chars().all(|x| x == '.' || x == c);
    }
    let chars: Vec<char> = seg.chars().collect();
    let part = chars.len() / 5;
    if part == 0 {
        return true;
    }
    images(c).iter().any(|img| {
        img.chars().enumerate().all(|(j, m)| {
            let s: String = chars[j * part..(j + 1) * part].iter().collect();
            descends(m, &s, steps - 1)
        })
    })
}

/// Consistency of two aligned rows of [`RobinsonSystem::sheet_rows`]; an
/// empty row marks a gap and is consistent with anything.
fn row_pair_consistent_aligned(upper: &str, lower: &str) -> bool {
    if upper.is_empty() || lower.is_empty() {
        return true;
    }
    let lower: String = lower.chars().take(5 * upper.chars().count()).collect();
    row_pair_consistent(upper, &lower, 0)
}

/// Decoding and structure results of one sheet.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SheetReport {
    /// Level-0 abscissa naming the sheet.
    pub root: String,
    /// Decoded tiles.
    pub tiles: usize,
    /// Aligned σ_R rows.
    pub rows: Vec<String>,
    /// Result of [`structure_check`].
    pub structure: StructureReport,
    /// Row pairs that are no σ_R image of each other.
    pub pair_violations: Vec<String>,
    /// Decoded tiles disagreeing with the generating tiling.
    pub mismatches: usize,
    /// Sheet disagreements found by the decoder.
    pub inconsistencies: usize,
}

/// Outcome of [`RobinsonSystem::verify`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiftReport {
    /// Cells of the pattern.
    pub cells: usize,
    /// Local-rule violations.
    pub violations: Vec<Violation>,
    /// Per-sheet results.
    pub sheets: Vec<SheetReport>,
}

impl LiftReport {
    /// True when the pattern is admissible and every sheet is structurally
    /// valid and faithful.
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
            && self.sheets.iter().all(|s| {
                s.structure.is_valid() && s.pair_violations.is_empty() && s.mismatches == 0 && s.inconsistencies == 0
            })
    }

    /// Total decoded tiles over all sheets.
    pub fn tiles(&self) -> usize {
        self.sheets.iter().map(|s| s.tiles).sum()
    }
}

/// Lifts a σ_R tiling over base `n` to a pattern on `support`.
pub fn lift_robinson(n: u32, support: &[GroupElement], seed: u64) -> Result<Pattern> {
    RobinsonSystem::new(n, 200, seed)?.lift(support, seed)
}

/// Letters used by the rows of a generated window, as σ_R rows.
pub fn window_rows(sys: &RobinsonSystem, w: &TilingWindow) -> Vec<String> {
    sys.sheet_rows(&w.rows)
}

/// Distinct σ_R words of length `len` reachable from `B` with the parity
/// policy, used as a sanity corpus.
pub fn parity_words(len: usize) -> BTreeSet<String> {
    let s = robinson_substitution();
    let mut word = vec![B];
    while word.len() < len + 10 {
        word = apply_parity(&s, &apply_parity(&s, &word, 0), 0);
    }
    word.windows(len).map(|w| w.iter().map(|&c| LETTERS[c]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_examples() {
        assert!(row_pair_consistent("E", "CBABC", 0));
        assert!(row_pair_consistent("D", "BCBCB", 0));
        assert!(row_pair_consistent("D", "CBCBC", 0));
        assert!(!row_pair_consistent("B", "CBABC", 0));
        assert!(row_pair_consistent("AE", "DDC", 3));
    }

    #[test]
    fn structure_examples() {
        assert!(!structure_check(&["BB"]).is_valid());
        assert!(structure_check(&["DDEDD"]).is_valid());
        assert!(structure_check(&["BCBAB", "DDDDD"]).is_valid());
        assert!(!structure_check(&["BCBAB", "BCBCB"]).is_valid());
    }

    #[test]
    fn parity_words_are_structured() {
        for w in parity_words(12) {
            assert!(structure_check(&[w.as_str()]).is_valid(), "{w}");
        }
    }
}
