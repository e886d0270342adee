//! σ-tiles, lazily generated σ-tilings of the plane, finite windows, the
//! content of Φ-boxes and the unique-size audit.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::substitution::{EigenData, Substitution, SubstitutionFile};

/// Absolute tolerance for comparisons, in units of the relevant grid step.
pub const TAU: f64 = 1e-9;

/// Where a coordinate sits relative to a grid value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Strictly below.
    Below,
    /// On the grid value.
    On,
    /// Strictly above.
    Above,
}

/// Compares `value` with `grid` in units of `unit`, failing in the band
/// `(τ, 10τ)`. The unit never drops below `10⁻⁵·(1 + |grid|)`, which keeps
/// accumulated rounding of deep rows inside the `On` band.
pub fn compare(value: f64, grid: f64, unit: f64) -> Result<Side> {
    let unit = unit.max(1e-5 * (1.0 + grid.abs()));
    let d = (value - grid) / unit;
    if d.abs() < TAU {
        Ok(Side::On)
    } else if d.abs() <= 10.0 * TAU {
        Err(Error::Ambiguous { value, grid })
    } else if d < 0.0 {
        Ok(Side::Below)
    } else {
        Ok(Side::Above)
    }
}

/// Scale of the tiles: `n`, `L = log_n λ` and the eigenvector.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scale {
    /// Group base.
    pub n: u32,
    /// Expanding eigenvalue.
    pub lambda: f64,
    /// Tile height `log_n λ`.
    pub height: f64,
    /// Widths at `y = 0`.
    pub v: Vec<f64>,
}

impl Scale {
    /// Scale of a substitution with eigendata, in base `n`.
    pub fn new(eigen: &EigenData, n: u32) -> Self {
        Scale { n, lambda: eigen.lambda, height: eigen.lambda.ln() / (n as f64).ln(), v: eigen.v.clone() }
    }

    /// `n^y`.
    pub fn pow(&self, y: f64) -> f64 {
        (self.n as f64).powf(y)
    }
}

/// A single σ-tile: the `letter`-tile in position `(x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaTile {
    /// Letter.
    pub letter: usize,
    /// Rule index used for the bottom cuts.
    pub rule: usize,
    /// Left edge.
    pub x: f64,
    /// Top edge.
    pub y: f64,
    /// `v(letter)·n^y`.
    pub width: f64,
    /// `log_n λ`.
    pub height: f64,
    /// Widths of the bottom cuts, `v(w_m)·n^y / λ`.
    pub cuts: Vec<f64>,
}

impl SigmaTile {
    /// `|Σ cuts − width|`.
    pub fn width_defect(&self) -> f64 {
        (self.cuts.iter().sum::<f64>() - self.width).abs()
    }

    /// Number of polygon edges: the cut points split the bottom.
    pub fn edge_count(&self) -> usize {
        self.cuts.len() + 3
    }
}

/// Builds the `letter`-tile in position `(x, y)` using rule `rule`.
pub fn make_tile(s: &Substitution, scale: &Scale, letter: usize, x: f64, y: f64, rule: usize) -> Result<SigmaTile> {
    if letter >= s.size() {
        return Err(Error::UnknownLetter(letter.to_string()));
    }
    let img = s.rules[letter].get(rule).ok_or_else(|| Error::RuleIndex { letter: s.alphabet[letter].clone(), index: rule })?;
    let unit = scale.pow(y);
    Ok(SigmaTile {
        letter,
        rule,
        x,
        y,
        width: scale.v[letter] * unit,
        height: scale.height,
        cuts: img.iter().map(|&c| scale.v[c] * unit / scale.lambda).collect(),
    })
}

/// A tile of a generated tiling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tile {
    /// Letter.
    pub letter: usize,
    /// Rule used for its children.
    pub rule: usize,
    /// Row index (`-1` is the hidden parent row).
    pub row: i64,
    /// Left edge.
    pub left: f64,
    /// Width.
    pub width: f64,
    /// 1-based position in the parent's image (0 for the hidden row).
    pub index: usize,
    /// Path from the hidden row: position in the hidden word, then child positions.
    pub path: Vec<u32>,
}

impl Tile {
    /// Right edge.
    pub fn right(&self) -> f64 {
        self.left + self.width
    }

    /// True when the left edge continues into the row above.
    pub fn continues_up(&self) -> bool {
        self.index == 1
    }
}

/// How rule choices are made when a letter has several images.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChoicePolicy {
    /// Pseudo-random, keyed by a seed.
    Seeded(u64),
    /// Explicit choices consumed in order while climbing, then seeded by 0.
    Explicit(Vec<usize>),
}

/// A σ-tiling generated lazily below a hidden parent row.
///
/// Row 0 is `σ(hidden)`; row `r+1` is the image of row `r`. Only rows
/// `r ≥ 0` are tiles whose parents are known.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Tiling {
    /// The substitution.
    pub subst: SubstitutionFile,
    #[serde(skip)]
    sigma: Option<Substitution>,
    /// Tile scale.
    pub scale: Scale,
    /// The hidden parent word.
    pub hidden: Vec<usize>,
    /// Left edge of the hidden word.
    pub hidden_left: f64,
    /// Top edge of row 0.
    pub top: f64,
    /// Rule choices forced along the seed's ancestry, keyed by path.
    pub forced: BTreeMap<String, usize>,
    /// Seed for all other choices.
    pub policy_seed: u64,
    /// The seed's left edge.
    pub anchor: f64,
    /// Path of the seed tile.
    pub anchor_path: Vec<u32>,
    /// Rules chosen by letter and row-position parity, overriding all other
    /// choices. Parity is the sum of the path digits, which matches the
    /// position parity when every image has odd length.
    #[serde(default)]
    pub parity_rules: Option<Vec<[usize; 2]>>,
}

fn path_key(path: &[u32]) -> String {
    path.iter().map(u32::to_string).collect::<Vec<_>>().join(".")
}

impl Tiling {
    /// A tiling below `hidden`, whose left edge is `hidden_left` and whose
    /// row 0 has its top at `top`.
    pub fn new(s: &Substitution, scale: Scale, hidden: Vec<usize>, hidden_left: f64, top: f64, policy_seed: u64) -> Self {
        Tiling {
            subst: s.to_file(),
            sigma: Some(s.clone()),
            scale,
            hidden,
            hidden_left,
            top,
            forced: BTreeMap::new(),
            policy_seed,
            anchor: hidden_left,
            anchor_path: vec![0],
            parity_rules: None,
        }
    }

    /// The substitution as a value.
    pub fn sigma(&self) -> &Substitution {
        self.sigma.as_ref().expect("tiling substitution not loaded")
    }

    /// Rebuilds the cached substitution after deserialization.
    pub fn load(&mut self) -> Result<()> {
        self.sigma = Some(Substitution::from_file(&self.subst)?);
        Ok(())
    }

    /// Group base.
    pub fn n(&self) -> u32 {
        self.scale.n
    }

    /// Top edge of row `r`.
    pub fn row_top(&self, r: i64) -> f64 {
        self.top - r as f64 * self.scale.height
    }

    /// Horizontal extent known at every row.
    pub fn extent(&self) -> (f64, f64) {
        let unit = self.scale.pow(self.row_top(-1));
        let w: f64 = self.hidden.iter().map(|&c| self.scale.v[c] * unit).sum();
        (self.hidden_left, self.hidden_left + w)
    }

    fn rule_for(&self, letter: usize, path: &[u32]) -> usize {
        let count = self.sigma().rules[letter].len();
        if count == 1 {
            return 0;
        }
        if let Some(rules) = &self.parity_rules {
            let parity = path.iter().map(|&p| p as usize).sum::<usize>() % 2;
            return rules[letter][parity];
        }
        if let Some(&r) = self.forced.get(&path_key(path)) {
            return r;
        }
        let mut key = self.policy_seed ^ 0x9e37_79b9_7f4a_7c15;
        for &p in path {
            key = key.rotate_left(17) ^ (p as u64).wrapping_add(0x2545_f491_4f6c_dd1d);
            key = key.wrapping_mul(0x5851_f42d_4c95_7f2d);
        }
        ChaCha8Rng::seed_from_u64(key).gen_range(0..count)
    }

    /// True when the tile at `path` has its left edge on the seed's left edge.
    fn on_anchor(&self, path: &[u32]) -> bool {
        let k = path.len().min(self.anchor_path.len());
        path[..k] == self.anchor_path[..k]
            && path[k..].iter().all(|&c| c == 0)
            && self.anchor_path[k..].iter().all(|&c| c == 0)
    }

    fn hidden_tiles(&self) -> Vec<Tile> {
        let unit = self.scale.pow(self.row_top(-1));
        let mut x = self.hidden_left;
        let mut out = Vec::new();
        for (p, &c) in self.hidden.iter().enumerate() {
            let path = vec![p as u32];
            let rule = self.rule_for(c, &path);
            let width = self.scale.v[c] * unit;
            let left = if self.on_anchor(&path) { self.anchor } else { x };
            out.push(Tile { letter: c, rule, row: -1, left, width, index: 0, path });
            x += width;
        }
        out
    }

    /// Children of `t` meeting `[x0, x1]`; rules are drawn only for those.
    fn children_in(&self, t: &Tile, x0: f64, x1: f64) -> Vec<Tile> {
        let unit = self.scale.pow(self.row_top(t.row + 1));
        let mut x = t.left;
        let mut out = Vec::new();
        for (m, &c) in self.sigma().rules[t.letter][t.rule].iter().enumerate() {
            let mut path = t.path.clone();
            path.push(m as u32);
            if self.on_anchor(&path) {
                x = self.anchor;
            }
            let left = x;
            let width = self.scale.v[c] * unit;
            x += width;
            if left > x1 || left + width < x0 {
                continue;
            }
            let rule = self.rule_for(c, &path);
            out.push(Tile { letter: c, rule, row: t.row + 1, left, width, index: m + 1, path });
        }
        out
    }

    /// Tiles of row `r ≥ -1` meeting the closed interval `[x0, x1]`, left to right.
    pub fn tiles(&self, r: i64, x0: f64, x1: f64) -> Vec<Tile> {
        let keep = |t: &Tile| t.left <= x1 && t.right() >= x0;
        let mut cur: Vec<Tile> = self.hidden_tiles().into_iter().filter(keep).collect();
        for _ in -1..r {
            cur = cur.iter().flat_map(|t| self.children_in(t, x0, x1)).collect();
        }
        cur
    }

    /// The row whose top line lies in the box level `(Y−1, Y]`, if any.
    pub fn line_in_level(&self, level: i64) -> Result<Option<i64>> {
        let h = self.scale.height;
        let r_est = ((self.top - level as f64) / h).floor() as i64;
        for r in (r_est - 1)..=(r_est + 2) {
            if r < -1 {
                continue;
            }
            let y = self.row_top(r);
            let below_top = compare(y, level as f64, 1.0)? != Side::Above;
            let above_bottom = compare(y, (level - 1) as f64, 1.0)? == Side::Above;
            if below_top && above_bottom {
                return Ok(Some(r));
            }
        }
        Ok(None)
    }

    /// The row covering the level `(Y−1, Y]` when no line lies in it.
    pub fn row_covering(&self, level: i64) -> i64 {
        let h = self.scale.height;
        let mut r = ((self.top - level as f64) / h).floor() as i64;
        while self.row_top(r + 1) > (level - 1) as f64 + 0.5 {
            r += 1;
        }
        while self.row_top(r) < level as f64 {
            r -= 1;
        }
        r
    }

    /// The tile containing the point `(x, y)` with tiles read as
    /// `(left, right] × [bottom, top)`.
    pub fn tile_at(&self, x: f64, y: f64) -> Result<Tile> {
        let h = self.scale.height;
        let mut r = ((self.top - y) / h).floor() as i64;
        while self.row_top(r) <= y {
            r -= 1;
        }
        while self.row_top(r + 1) > y {
            r += 1;
        }
        if r < -1 {
            return Err(Error::OutsideWindow(format!("point ({x}, {y}) above the tiling")));
        }
        let (lo, hi) = self.extent();
        if x <= lo || x > hi {
            return Err(Error::OutsideWindow(format!("point ({x}, {y})")));
        }
        let margin = 1e-6 * self.scale.pow(self.row_top(r)) + 1e-9 * (1.0 + x.abs());
        let near = self.tiles(r, x - margin, x + margin);
        for t in &near {
            let unit = t.width.max(1e-300);
            if compare(x, t.left, unit)? == Side::Above && compare(x, t.right(), unit)? != Side::Above {
                return Ok(t.clone());
            }
        }
        // Rounding gap between neighbours: the tile ending nearest to x.
        near.into_iter()
            .filter(|t| t.left < x)
            .min_by(|a, b| (x - a.right()).abs().total_cmp(&(x - b.right()).abs()))
            .ok_or_else(|| Error::OutsideWindow(format!("point ({x}, {y})")))
    }
}

/// The visible part of one row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    /// Row index.
    pub index: i64,
    /// Top edge `y_r`.
    pub top: f64,
    /// Tiles meeting the viewport.
    pub tiles: Vec<Tile>,
}

impl Row {
    /// The row's word.
    pub fn word(&self) -> Vec<usize> {
        self.tiles.iter().map(|t| t.letter).collect()
    }
}

/// A rectangle of the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Viewport {
    /// Left.
    pub x0: f64,
    /// Right.
    pub x1: f64,
    /// Bottom.
    pub y0: f64,
    /// Top.
    pub y1: f64,
}

/// A finite patch of a σ-tiling.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TilingWindow {
    /// Generator of the whole tiling, absent for decoded windows.
    pub tiling: Option<Tiling>,
    /// Visible rectangle.
    pub viewport: Viewport,
    /// Rows meeting the viewport.
    pub rows: Vec<Row>,
    /// Row index of the seed row.
    pub seed_row: i64,
}

impl TilingWindow {
    /// Materializes rows `first..=last` of a tiling inside a viewport.
    pub fn from_tiling(tiling: Tiling, first: i64, last: i64, viewport: Viewport, seed_row: i64) -> Self {
        let eps = 1e-9 * (viewport.x1 - viewport.x0).abs().max(1e-12);
        let rows = (first..=last)
            .map(|r| Row {
                index: r,
                top: tiling.row_top(r),
                tiles: tiling
                    .tiles(r, viewport.x0, viewport.x1)
                    .into_iter()
                    .filter(|t| t.left < viewport.x1 - eps && t.right() > viewport.x0 + eps)
                    .collect(),
            })
            .collect();
        TilingWindow { tiling: Some(tiling), viewport, rows, seed_row }
    }

    /// Reads the JSON form and restores the generator.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut w: TilingWindow = serde_json::from_str(text)?;
        if let Some(t) = w.tiling.as_mut() {
            t.load()?;
        }
        Ok(w)
    }

    /// The generator, or an error for decoded windows.
    pub fn generator(&self) -> Result<&Tiling> {
        self.tiling.as_ref().ok_or_else(|| Error::Input("window has no generator".into()))
    }

    /// Row words, top to bottom.
    pub fn words(&self) -> Vec<Vec<usize>> {
        self.rows.iter().map(Row::word).collect()
    }
}

/// Grows a window around a `seed`-tile: `up` rows above it obtained by
/// desubstitution, `down` rows below by substitution, each row covering
/// `half_width` beyond the seed on both sides. The seed's left edge is at
/// `x = 0` and its top at `y = y0`.
#[allow(clippy::too_many_arguments)]
pub fn grow_window(
    s: &Substitution,
    eigen: &EigenData,
    seed: usize,
    up: usize,
    down: usize,
    half_width: f64,
    policy: &ChoicePolicy,
    y0: f64,
) -> Result<TilingWindow> {
    let scale = Scale::new(eigen, s.n);
    let policy_seed = match policy {
        ChoicePolicy::Seeded(k) => *k,
        ChoicePolicy::Explicit(_) => 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(policy_seed);
    let mut explicit = match policy {
        ChoicePolicy::Explicit(v) => v.clone().into_iter(),
        ChoicePolicy::Seeded(_) => Vec::new().into_iter(),
    };
    let mut pick = |count: usize, rng: &mut ChaCha8Rng| -> usize {
        match explicit.next() {
            Some(c) => c % count,
            None => rng.gen_range(0..count),
        }
    };

    // Climb: (parent letter, rule, child position) for rows up-1..0 and the hidden row.
    let mut chain: Vec<(usize, usize, usize)> = Vec::new();
    let mut cur = seed;
    for step in 0..=up {
        let mut options = Vec::new();
        for (a, imgs) in s.rules.iter().enumerate() {
            for (r, img) in imgs.iter().enumerate() {
                for (c, &l) in img.iter().enumerate() {
                    if l == cur {
                        options.push((a, r, c));
                    }
                }
            }
        }
        if options.is_empty() {
            return Err(Error::DeadEnd(up - step));
        }
        let o = options[pick(options.len(), &mut rng)];
        chain.push(o);
        cur = o.0;
    }
    let top_letter = cur;

    // Row tops: seed row `up` at y0, hidden row at y0 + (up+1)L.
    let top = y0 + up as f64 * scale.height;
    let hidden_unit = scale.pow(top + scale.height);
    let min_v = scale.v.iter().cloned().fold(f64::INFINITY, f64::min);
    let ctx = ((half_width / (min_v * hidden_unit)).ceil() as usize).max(1) + 1;

    // A legal word with `ctx` letters on both sides of the top ancestor.
    let mut word = vec![top_letter];
    let position = loop {
        let spots: Vec<usize> = (ctx..word.len().saturating_sub(ctx)).filter(|&i| word[i] == top_letter).collect();
        if !spots.is_empty() {
            break spots[pick(spots.len(), &mut rng)];
        }
        if word.len() > 1_000_000 {
            return Err(Error::DeadEnd(0));
        }
        word = s.apply_with(&word, |_, count| rng.gen_range(0..count));
    };
    let lo = position - ctx;
    let hidden: Vec<usize> = word[lo..=position + ctx].to_vec();
    let p = ctx;

    // Forced rules along the ancestry, from the hidden row downwards.
    let mut forced = BTreeMap::new();
    let mut anchor_path = vec![p as u32];
    for &(_, rule, child) in chain.iter().rev() {
        forced.insert(path_key(&anchor_path), rule);
        anchor_path.push(child as u32);
    }

    // Left edges, climbing from the seed at x = 0.
    let mut left = 0.0f64;
    for (step, &(a, rule, child)) in chain.iter().enumerate() {
        let row_top_child = y0 + step as f64 * scale.height;
        let unit = scale.pow(row_top_child);
        let before: f64 = s.rules[a][rule][..child].iter().map(|&c| scale.v[c] * unit).sum();
        left -= before;
    }
    let before: f64 = hidden[..p].iter().map(|&c| scale.v[c] * hidden_unit).sum();
    let hidden_left = left - before;

    let mut tiling = Tiling {
        subst: s.to_file(),
        sigma: Some(s.clone()),
        scale: scale.clone(),
        hidden,
        hidden_left,
        top,
        forced,
        policy_seed,
        anchor: 0.0,
        anchor_path,
        parity_rules: None,
    };
    tiling.sigma = Some(s.clone());
    let seed_width = scale.v[seed] * scale.pow(y0);
    let viewport = Viewport {
        x0: -half_width,
        x1: seed_width + half_width,
        y0: y0 - (down as f64 + 1.0) * scale.height,
        y1: top,
    };
    Ok(TilingWindow::from_tiling(tiling, 0, (up + down) as i64, viewport, up as i64))
}

/// Applies `(x, y) ↦ (α + n^β·x, β + y)` to a window.
pub fn shift_window(w: &TilingWindow, alpha: f64, beta: f64) -> TilingWindow {
    let n = w.tiling.as_ref().map(Tiling::n).unwrap_or(2) as f64;
    let f = n.powf(beta);
    let mx = |x: f64| alpha + f * x;
    let mut out = w.clone();
    if let Some(t) = out.tiling.as_mut() {
        t.hidden_left = mx(t.hidden_left);
        t.anchor = mx(t.anchor);
        t.top += beta;
    }
    out.viewport = Viewport { x0: mx(w.viewport.x0), x1: mx(w.viewport.x1), y0: w.viewport.y0 + beta, y1: w.viewport.y1 + beta };
    for row in &mut out.rows {
        row.top += beta;
        for t in &mut row.tiles {
            t.left = mx(t.left);
            t.width *= f;
        }
    }
    out
}

/// Content of a Φ-box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoxClass {
    /// A vertical line only.
    Vertical,
    /// A horizontal line only.
    Horizontal,
    /// A vertical line crossing a horizontal one.
    Cross,
    /// A vertical line starting just below a horizontal one.
    T,
    /// Nothing.
    Empty,
}

impl BoxClass {
    /// Cross or T.
    pub fn is_corner(self) -> bool {
        matches!(self, BoxClass::Cross | BoxClass::T)
    }

    /// Horizontal, Cross or T.
    pub fn has_line(self) -> bool {
        matches!(self, BoxClass::Horizontal | BoxClass::Cross | BoxClass::T)
    }

    /// Vertical, Cross or T.
    pub fn has_vertical(self) -> bool {
        matches!(self, BoxClass::Vertical | BoxClass::Cross | BoxClass::T)
    }
}

/// A vertical line met by a box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerticalWitness {
    /// Its abscissa.
    pub x: f64,
    /// True when it also bounds a tile of the row above the line.
    pub continues: bool,
}

/// The classified content of one Φ-box with its witnesses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxContent {
    /// Class.
    pub class: BoxClass,
    /// Row whose top line lies in the box.
    pub line_row: Option<i64>,
    /// Row providing the verticals.
    pub row: i64,
    /// Verticals inside `[x0, x1)`.
    pub verticals: Vec<VerticalWitness>,
}

/// Classifies the content of the Φ(g)-box `[x, x+n^Y) × (Y−1, Y]`.
pub fn classify_box(t: &Tiling, g: &GroupElement) -> Result<BoxContent> {
    let (x, level) = g.phi();
    classify_at(t, x.to_f64(), level)
}

/// Classifies the box with top-left corner `(x0, level)` of width `n^level`.
pub fn classify_at(t: &Tiling, x0: f64, level: i64) -> Result<BoxContent> {
    let b = (t.n() as f64).powi(level as i32);
    let x1 = x0 + b;
    let (lo, hi) = t.extent();
    if x0 <= lo || x1 >= hi {
        return Err(Error::OutsideWindow(format!("box at ({x0}, {level})")));
    }
    let line = t.line_in_level(level)?;
    let row = match line {
        Some(r) if r < 0 => return Err(Error::OutsideWindow(format!("box at ({x0}, {level}) above the generated rows"))),
        Some(r) => r,
        None => t.row_covering(level),
    };
    let mut verticals = Vec::new();
    for tile in t.tiles(row, x0 - b, x1 + b) {
        let x = tile.left;
        if compare(x, x0, b)? != Side::Below && compare(x, x1, b)? == Side::Below {
            verticals.push(VerticalWitness { x, continues: tile.continues_up() });
        }
    }
    let class = match (line.is_some(), verticals.is_empty()) {
        (true, true) => BoxClass::Horizontal,
        (true, false) if verticals.iter().any(|v| v.continues) => BoxClass::Cross,
        (true, false) => BoxClass::T,
        (false, false) => BoxClass::Vertical,
        (false, true) => BoxClass::Empty,
    };
    Ok(BoxContent { class, line_row: line, row, verticals })
}

/// Box counts of one tile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileAudit {
    /// Row.
    pub row: i64,
    /// Letter.
    pub letter: usize,
    /// Box rows whose top edge lies in `(bottom, top]`.
    pub vertical: i64,
    /// Boxes of the top line's level met by the top edge.
    pub top: i64,
    /// Boxes of the bottom line's level met by the bottom edge.
    pub bottom: i64,
    /// Vertical count predicted from the bottom count, if unambiguous.
    pub predicted: Option<i64>,
}

/// Result of the unique-size audit.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct UniqueSizeReport {
    /// Audited tiles.
    pub tiles: Vec<TileAudit>,
    /// Human-readable violations.
    pub violations: Vec<String>,
    /// Tiles whose bottom count lies on the boundary between both heights.
    pub undetermined: usize,
}

/// `(α, β) = (⌈N/n^h⌉, ⌈N/n^{h+1}⌉)`, the candidate top counts for a
/// bottom count `N`.
pub fn alpha_beta(bottom: i64, h: i64, n: u32) -> (i64, i64) {
    let p = (n as i64).pow(h as u32);
    ((bottom + p - 1) / p, (bottom + p * n as i64 - 1) / (p * n as i64))
}

fn boxes_met(l: f64, r: f64, level: i64, n: u32) -> i64 {
    let b = (n as f64).powi(level as i32);
    ((r / b - 1e-9).ceil() - (l / b + 1e-9).floor()) as i64
}

/// Counts, for every tile of the window fully inside the viewport, the
/// Φ-boxes it meets vertically, on its top and on its bottom.
///
/// Vertical counts must lie in `{h_box, h_box+1}` with `h_box = ⌊log_n λ⌋`;
/// top counts in `(v(a)/n, ⌈v(a)⌉+1]`; the bottom count must predict the
/// vertical count.
pub fn check_unique_size(w: &TilingWindow) -> Result<UniqueSizeReport> {
    let t = w.generator()?;
    let n = t.n();
    let h_box = t.scale.height.floor() as i64;
    let mut report = UniqueSizeReport::default();
    for row in &w.rows {
        let top = row.top;
        let bottom = top - t.scale.height;
        for tile in &row.tiles {
            if tile.left < w.viewport.x0 || tile.right() > w.viewport.x1 {
                continue;
            }
            let vertical = (top + 1e-9).floor() as i64 - (bottom + 1e-9).floor() as i64;
            let top_level = (top - 1e-9).ceil() as i64;
            let bottom_level = (bottom - 1e-9).ceil() as i64;
            let top_count = boxes_met(tile.left, tile.right(), top_level, n);
            let bottom_count = boxes_met(tile.left, tile.right(), bottom_level, n);
            let va = t.scale.v[tile.letter];
            // The bottom edge spans between v·n^{c−1} and v·n^c bottom boxes,
            // c being the vertical count, one more power when the bottom is
            // on a box boundary.
            let threshold = (va * (n as f64).powi(h_box as i32) - 1e-9).ceil();
            let aligned = (bottom - bottom.round()).abs() < 1e-9;
            let shift = if aligned { -1 } else { 0 };
            let predicted = if (bottom_count as f64) < threshold {
                Some(h_box + shift)
            } else if (bottom_count as f64) > threshold + 1.0 {
                Some(h_box + 1 + shift)
            } else {
                report.undetermined += 1;
                None
            };
            let letter = &t.sigma().alphabet[tile.letter];
            if vertical != h_box && vertical != h_box + 1 {
                report.violations.push(format!("row {} {letter}-tile meets {vertical} box rows", row.index));
            }
            if !((top_count as f64) > va / n as f64 && (top_count as f64) <= va.ceil() + 1.0) {
                report.violations.push(format!("row {} {letter}-tile top meets {top_count} boxes", row.index));
            }
            if let Some(p) = predicted {
                if p != vertical {
                    report.violations.push(format!(
                        "row {} {letter}-tile bottom count {bottom_count} predicts {p}, found {vertical}",
                        row.index
                    ));
                }
            }
            report.tiles.push(TileAudit {
                row: row.index,
                letter: tile.letter,
                vertical,
                top: top_count,
                bottom: bottom_count,
                predicted,
            });
        }
    }
    Ok(report)
}
