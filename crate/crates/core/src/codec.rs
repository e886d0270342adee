//! Encoding σ-tiling windows into patterns of `X_σ`, the left-border
//! transducer and decoding patterns back into tiles.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use crate::alphabet::project_pi;
use crate::alphabet::{Family, Kind, Label, Letter, Pattern};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::substitution::{EigenData, Substitution};
use crate::tiling::{
    classify_box, grow_window, shift_window, BoxClass, BoxContent, ChoicePolicy, Row, Tile, Tiling, TilingWindow,
    Viewport,
};

/// Kinds whose box holds the left border of a shaded area.
pub const BORDER_KINDS: [Kind; 5] = [Kind::T1, Kind::T2, Kind::M1, Kind::M2, Kind::B1];

/// Which family of letters a box level receives.
pub fn level_family(t: &Tiling, level: i64) -> Result<Family> {
    if t.line_in_level(level)?.is_some() {
        Ok(Family::Top)
    } else if t.line_in_level(level - 1)?.is_some() {
        Ok(Family::Bottom)
    } else {
        Ok(Family::Middle)
    }
}

/// Memoized box contents of one tiling.
pub struct Encoder<'a> {
    tiling: &'a Tiling,
    boxes: RefCell<HashMap<GroupElement, BoxContent>>,
}

impl<'a> Encoder<'a> {
    /// Encoder over a tiling.
    pub fn new(tiling: &'a Tiling) -> Self {
        Encoder { tiling, boxes: RefCell::new(HashMap::new()) }
    }

    /// The tiling.
    pub fn tiling(&self) -> &Tiling {
        self.tiling
    }

    /// Content of the Φ(g)-box.
    pub fn content(&self, g: &GroupElement) -> Result<BoxContent> {
        if let Some(c) = self.boxes.borrow().get(g) {
            return Ok(c.clone());
        }
        let c = classify_box(self.tiling, g)?;
        self.boxes.borrow_mut().insert(*g, c.clone());
        Ok(c)
    }

    fn class(&self, g: &GroupElement) -> Result<BoxClass> {
        Ok(self.content(g)?.class)
    }

    fn label_at(&self, g: &GroupElement, x: f64, y: f64) -> Result<Label> {
        let tile = self.tiling.tile_at(x, y)?;
        if tile.index == 0 {
            return Err(Error::OutsideWindow(format!("label of {g} comes from the hidden row")));
        }
        Ok(Label::new(tile.letter, tile.index))
    }

    fn single_vertical(&self, g: &GroupElement, c: &BoxContent) -> Result<f64> {
        match c.verticals.as_slice() {
            [v] => Ok(v.x),
            _ => Err(Error::Unencodable(format!("{g}: {} verticals in one box", c.verticals.len()))),
        }
    }

    /// The letter of `g` given by the case lists of the encoding.
    pub fn letter(&self, g: &GroupElement) -> Result<Letter> {
        let (x, level) = g.phi();
        let x = x.to_f64();
        let n = self.tiling.n();
        let b = (n as f64).powi(level as i32);
        let gt = g.mul_t(1);
        let ga = g.mul_a(1);
        let gat = ga.mul_t(1);
        let cg = self.content(g)?;
        let unencodable = || Error::Unencodable(format!("{g}: {:?}", cg.class));
        match level_family(self.tiling, level)? {
            Family::Top => {
                let y = level as f64 - 1.5;
                let primary = self.label_at(g, x + b, y)?;
                if cg.class.is_corner() {
                    match self.class(&gt)? {
                        BoxClass::Empty => {
                            let xv = self.single_vertical(g, &cg)?;
                            Ok(Letter::double(Kind::T1, self.label_at(g, xv, y)?, primary))
                        }
                        BoxClass::Vertical => Ok(Letter::single(Kind::T2, primary)),
                        _ => Err(unencodable()),
                    }
                } else if cg.class == BoxClass::Horizontal {
                    let ca = self.class(&ga)?;
                    if ca == BoxClass::Horizontal {
                        Ok(Letter::single(Kind::T3, primary))
                    } else if ca.is_corner() {
                        match self.class(&gat)? {
                            BoxClass::Empty => Ok(Letter::single(Kind::T3, primary)),
                            BoxClass::Vertical => Ok(Letter::single(Kind::T4, primary)),
                            _ => Err(unencodable()),
                        }
                    } else {
                        Err(unencodable())
                    }
                } else {
                    Err(unencodable())
                }
            }
            Family::Middle => {
                let y = level as f64 - 0.5;
                let primary = self.label_at(g, x + b, y)?;
                match cg.class {
                    BoxClass::Vertical => match self.class(&gt)? {
                        BoxClass::Vertical => Ok(Letter::single(Kind::M1, primary)),
                        BoxClass::Empty => {
                            let xv = self.single_vertical(g, &cg)?;
                            Ok(Letter::double(Kind::M2, self.label_at(g, xv, y)?, primary))
                        }
                        _ => Err(unencodable()),
                    },
                    BoxClass::Empty => match self.class(&ga)? {
                        BoxClass::Vertical => match self.class(&gat)? {
                            BoxClass::Vertical => Ok(Letter::single(Kind::M4, primary)),
                            BoxClass::Empty => Ok(Letter::single(Kind::M5, primary)),
                            _ => Err(unencodable()),
                        },
                        BoxClass::Empty => Ok(Letter::single(Kind::M3, primary)),
                        _ => Err(unencodable()),
                    },
                    _ => Err(unencodable()),
                }
            }
            Family::Bottom => {
                let y = level as f64 - 0.5;
                let primary = self.label_at(g, x + b, y)?;
                for c in 0..n as i128 {
                    if self.class(&gt.mul_a(c))? == BoxClass::Cross {
                        return Ok(Letter::single(Kind::B1, primary));
                    }
                }
                if cg.class != BoxClass::Empty || !matches!(self.class(&gt)?, BoxClass::Horizontal | BoxClass::T) {
                    return Err(unencodable());
                }
                match self.class(&ga)? {
                    BoxClass::Empty => Ok(Letter::single(Kind::B2, primary)),
                    BoxClass::Vertical => Ok(Letter::single(Kind::B3, primary)),
                    _ => Err(unencodable()),
                }
            }
        }
    }

    /// Index of the child box holding the vertical line of `g`, if any.
    pub fn border_child(&self, g: &GroupElement) -> Result<Option<u32>> {
        let c = self.content(g)?;
        let Some(v) = c.verticals.first() else { return Ok(None) };
        let (x, level) = g.phi();
        let n = self.tiling.n() as f64;
        let step = n.powi(level as i32 - 1);
        let d = ((v.x - x.to_f64()) / step + 1e-9).floor();
        Ok(Some(d.clamp(0.0, n - 1.0) as u32))
    }
}

/// Encodes the window on a support.
pub fn encode(w: &TilingWindow, support: &[GroupElement]) -> Result<Pattern> {
    let t = w.generator()?;
    let enc = Encoder::new(t);
    let mut p = Pattern::new();
    for g in support {
        p.cells.insert(*g, enc.letter(g)?);
    }
    Ok(p)
}

/// Encodes the support and, below every border cell, the `depth` boxes of
/// its left-border path together with their siblings.
pub fn encode_with_paths(w: &TilingWindow, support: &[GroupElement], depth: usize) -> Result<Pattern> {
    let t = w.generator()?;
    let enc = Encoder::new(t);
    let n = t.n() as i128;
    let mut p = Pattern::new();
    for g in support {
        p.cells.insert(*g, enc.letter(g)?);
    }
    let starts: Vec<GroupElement> =
        p.cells.iter().filter(|(_, l)| BORDER_KINDS.contains(&l.kind)).map(|(g, _)| *g).collect();
    let mut done: BTreeMap<(GroupElement, u64), usize> = BTreeMap::new();
    for g0 in starts {
        for line in enc.content(&g0)?.verticals {
            let mut g = g0;
            for step in 0..depth {
                let left = depth - step;
                let key = (g, line.x.to_bits());
                if done.get(&key).is_some_and(|&d| d >= left) {
                    break;
                }
                done.insert(key, left);
                let first = g.mul_t(1);
                let mut next = None;
                for c in 0..n {
                    let h = first.mul_a(c);
                    let l = match p.cells.get(&h) {
                        Some(l) => *l,
                        None => {
                            let l = enc.letter(&h)?;
                            p.cells.insert(h, l);
                            l
                        }
                    };
                    let b = h.phi_box();
                    let inside = b.x.to_f64() <= line.x && line.x < b.right().to_f64();
                    if inside && BORDER_KINDS.contains(&l.kind) {
                        next = Some(h);
                    }
                }
                match next {
                    Some(h) => g = h,
                    None => break,
                }
            }
        }
    }
    Ok(p)
}

/// The ℛ-label `π(x_g)` expected from a window: the letter of the tile at Φ(g·a·t).
pub fn tile_under(w: &TilingWindow, g: &GroupElement) -> Result<usize> {
    let t = w.generator()?;
    let (x, level) = g.mul_a(1).mul_t(1).phi();
    let y = if level_family(t, level + 1)? == Family::Top { level as f64 - 0.5 } else { level as f64 + 0.5 };
    Ok(t.tile_at(x.to_f64(), y)?.letter)
}

/// A random window around the region of `R_{6,6}`: seed top in `[-1, 0)`,
/// two rows above the seed, horizontal shift in `[-4, 0)`.
pub fn sample_window(s: &Substitution, eigen: &EigenData, seed: u64) -> Result<TilingWindow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letter = rng.gen_range(0..s.size());
    let y0 = -rng.gen::<f64>();
    let alpha = -4.0 * rng.gen::<f64>();
    let w = grow_window(s, eigen, letter, 2, 0, 12.0, &ChoicePolicy::Seeded(rng.gen()), y0)?;
    Ok(shift_window(&w, alpha, 0.0))
}

/// The left-border transducer.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transducer {
    /// States.
    pub states: BTreeSet<Kind>,
    /// Transitions `(state, child digit c for t·a^c, state)`.
    pub transitions: BTreeSet<(Kind, u32, Kind)>,
    /// States whose moves into a `𝒯` letter need that letter to carry index 1.
    pub first_child: BTreeSet<Kind>,
}

impl Transducer {
    /// The transducer of harvested tables.
    pub fn derive(tables: &crate::checker::Tables) -> Self {
        let mut t = Transducer::from_steps(&tables.steps);
        t.first_child = tables.step_first.iter().filter(|(k, &f)| f && t.states.contains(k)).map(|(k, _)| *k).collect();
        t
    }

    /// Closure of `{t1, t2}` under observed border steps.
    pub fn from_steps(steps: &BTreeSet<(Kind, u32, Kind)>) -> Self {
        let mut states: BTreeSet<Kind> = [Kind::T1, Kind::T2].into_iter().collect();
        loop {
            let before = states.len();
            for &(p, _, c) in steps {
                if states.contains(&p) {
                    states.insert(c);
                }
            }
            if states.len() == before {
                break;
            }
        }
        let transitions = steps.iter().filter(|(p, _, _)| states.contains(p)).copied().collect();
        Transducer { states, transitions, first_child: BTreeSet::new() }
    }

    /// The admissible moves from `g` in a pattern: digits `c` with
    /// `(x_g, c, x_{g·t·a^c})` a transition. `None` when a child is missing.
    pub fn moves(&self, p: &Pattern, g: &GroupElement) -> Option<Vec<(u32, GroupElement)>> {
        let q = p.get(g)?.kind;
        let first = g.mul_t(1);
        let mut out = Vec::new();
        for c in 0..g.n {
            let h = first.mul_a(c as i128);
            let x = p.get(&h)?;
            let guard = x.kind.family() != Family::Top || !self.first_child.contains(&q) || x.primary.index == 1;
            if guard && self.transitions.contains(&(q, c, x.kind)) {
                out.push((c, h));
            }
        }
        Some(out)
    }
}

/// An interval certain to contain the vertical line started at a cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerticalPosition {
    /// Lower end.
    pub lower: Dyadic,
    /// Width `n^{Y−D}`.
    pub width: Dyadic,
    /// Steps taken.
    pub depth: usize,
    /// Digits read.
    pub digits: Vec<u32>,
    /// Cells visited after the start.
    pub cells: Vec<GroupElement>,
    /// False when the path left the pattern before the requested depth.
    pub complete: bool,
}

impl VerticalPosition {
    /// Midpoint as a double.
    pub fn mid(&self) -> f64 {
        self.lower.to_f64() + self.width.to_f64() / 2.0
    }
}

/// Follows the unique transducer path from `g0` for `depth` steps.
///
/// Fails when some step admits no move or more than one.
pub fn vertical_position(p: &Pattern, t: &Transducer, g0: &GroupElement, depth: usize) -> Result<VerticalPosition> {
    let start = p.get(g0).ok_or_else(|| Error::Decode(format!("{g0} not in the pattern")))?;
    if !t.states.contains(&start.kind) {
        return Err(Error::Decode(format!("{g0} carries {}, not a border letter", start.kind)));
    }
    let n = g0.n;
    let (x, level) = g0.phi();
    let b = Dyadic::base_pow(level, n);
    let mut sum = Dyadic::zero(n);
    let mut g = *g0;
    let mut digits = Vec::new();
    let mut cells = Vec::new();
    let mut complete = true;
    for l in 0..depth {
        let Some(moves) = t.moves(p, &g) else {
            complete = false;
            break;
        };
        match moves.as_slice() {
            [(c, h)] => {
                sum = sum + Dyadic::from_int(*c as i128, n).scale(-(l as i64) - 1);
                digits.push(*c);
                cells.push(*h);
                g = *h;
            }
            [] => return Err(Error::Decode(format!("no transducer move at {g}"))),
            _ => return Err(Error::Decode(format!("{} transducer moves at {g}", moves.len()))),
        }
    }
    let d = digits.len() as i64;
    Ok(VerticalPosition { lower: x + b * sum, width: Dyadic::base_pow(level - d, n), depth: digits.len(), digits, cells, complete })
}

/// A vertical line recovered from one border cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodedLine {
    /// Level of the corner cell.
    pub level: i64,
    /// Corner cell.
    pub cell: GroupElement,
    /// Interval.
    pub position: VerticalPosition,
}

/// Output of [`decode`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Decoded {
    /// Reassembled tiles as a window without generator.
    pub window: TilingWindow,
    /// Lines recovered from `t1`/`t2` cells.
    pub lines: Vec<DecodedLine>,
    /// Corners whose paths left the pattern early.
    pub incomplete: usize,
    /// Sheet disagreements.
    pub inconsistencies: Vec<String>,
}

/// Position of `g` in its `a`-coset at its level: `(level, x·n^{-level} mod 1)`.
pub fn coset_key(g: &GroupElement) -> (i64, Dyadic) {
    let (x, level) = g.phi();
    let u = x.scale(-level);
    (level, u - Dyadic::from_int(u.floor(), g.n))
}

/// True when `g` lies on the sheet through the level-0 abscissa `x0`, i.e.
/// `x(g) − x0 ∈ n^{level}ℤ`.
pub fn on_sheet(g: &GroupElement, x0: Dyadic) -> bool {
    let (x, level) = g.phi();
    (x - x0).scale(-level).is_integer()
}

/// One level-0 abscissa per sheet meeting `cells`: sheets are told apart
/// at the highest level present.
pub fn sheet_roots(cells: &[GroupElement]) -> Vec<Dyadic> {
    let Some(top) = cells.iter().map(GroupElement::level).max() else { return Vec::new() };
    let mut roots: Vec<Dyadic> = Vec::new();
    for g in cells.iter().filter(|g| g.level() == top) {
        if !roots.iter().any(|&x0| on_sheet(g, x0)) {
            roots.push(g.phi().0);
        }
    }
    roots
}

/// Decodes a pattern: vertical lines from every `t1`/`t2` cell, then one
/// tile between consecutive corners of each `𝒯`-row.
pub fn decode(
    p: &Pattern,
    t: &Transducer,
    s: &Substitution,
    v: &[f64],
    depth: usize,
    keep: impl Fn(&GroupElement) -> bool,
) -> Result<Decoded> {
    let n = s.n as f64;
    let mut lines = Vec::new();
    let mut incomplete = 0;
    let mut rows: BTreeMap<(i64, Dyadic), Vec<(GroupElement, Letter, VerticalPosition)>> = BTreeMap::new();
    for (g, l) in &p.cells {
        if !matches!(l.kind, Kind::T1 | Kind::T2) || !keep(g) {
            continue;
        }
        let vp = vertical_position(p, t, g, depth)?;
        if !vp.complete {
            incomplete += 1;
            continue;
        }
        lines.push(DecodedLine { level: g.level(), cell: *g, position: vp.clone() });
        rows.entry(coset_key(g)).or_default().push((*g, *l, vp));
    }
    let mut tiles: Vec<(f64, Tile)> = Vec::new();
    let mut inconsistencies = Vec::new();
    for corners in rows.values_mut() {
        corners.sort_by(|a, b| a.2.lower.cmp(&b.2.lower));
        for pair in corners.windows(2) {
            let (g, l, left) = &pair[0];
            let (h, m, right) = &pair[1];
            let steps = ((right.lower - left.lower).to_f64() / n.powi(g.level() as i32)).round() as i128;
            let between_ok = (1..=steps).all(|c| {
                let k = g.mul_a(c);
                k == *h || p.get(&k).is_some_and(|x| matches!(x.kind, Kind::T3 | Kind::T4))
            });
            if !between_ok || g.mul_a(steps) != *h {
                continue;
            }
            if m.kind == Kind::T1 && m.secondary != Some(l.primary) {
                inconsistencies.push(format!("corner {h} disagrees with the tile starting at {g}"));
            }
            let width = right.mid() - left.mid();
            let a = l.primary.letter;
            let top = (width / v[a]).ln() / n.ln();
            tiles.push((
                top,
                Tile { letter: a, rule: 0, row: 0, left: left.mid(), width, index: l.primary.index, path: Vec::new() },
            ));
        }
    }
    // Lines seen from several sheets must agree.
    let mut by_level: BTreeMap<i64, Vec<&DecodedLine>> = BTreeMap::new();
    for l in &lines {
        by_level.entry(l.level).or_default().push(l);
    }
    for ls in by_level.values() {
        for (i, x) in ls.iter().enumerate() {
            for y in &ls[i + 1..] {
                let (xa, xb) = (x.position.lower, x.position.lower + x.position.width);
                let (ya, yb) = (y.position.lower, y.position.lower + y.position.width);
                let near = (x.position.mid() - y.position.mid()).abs() < n.powi(x.level as i32 - 1);
                if near && (xb <= ya || yb <= xa) {
                    inconsistencies.push(format!("lines from {} and {} disagree", x.cell, y.cell));
                }
            }
        }
    }
    tiles.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.left.partial_cmp(&b.1.left).unwrap()));
    let mut out_rows: Vec<Row> = Vec::new();
    for (top, mut tile) in tiles {
        let new_row = out_rows.last().map_or(true, |r| (r.top - top).abs() > 1e-3);
        if new_row {
            out_rows.push(Row { index: out_rows.len() as i64, top, tiles: Vec::new() });
        }
        let r = out_rows.last_mut().unwrap();
        tile.row = r.index;
        if r.tiles.iter().all(|u| (u.left - tile.left).abs() > 1e-9) {
            r.tiles.push(tile);
        }
    }
    for r in &mut out_rows {
        r.tiles.sort_by(|a, b| a.left.partial_cmp(&b.left).unwrap());
    }
    let x0 = out_rows.iter().flat_map(|r| r.tiles.iter().map(|t| t.left)).fold(f64::INFINITY, f64::min);
    let x1 = out_rows.iter().flat_map(|r| r.tiles.iter().map(Tile::right)).fold(f64::NEG_INFINITY, f64::max);
    let y1 = out_rows.first().map_or(0.0, |r| r.top);
    let y0 = out_rows.last().map_or(0.0, |r| r.top);
    let window = TilingWindow { tiling: None, viewport: Viewport { x0, x1, y0, y1 }, rows: out_rows, seed_row: 0 };
    Ok(Decoded { window, lines, incomplete, inconsistencies })
}
