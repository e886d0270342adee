//! The twelve letter kinds of `ℛ = 𝒯 ∪ ℳ ∪ ℬ`, their payloads, the
//! edge-trace model of the pentagonal Wang tiles and patterns.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::substitution::Substitution;

/// Kind of a letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Top-left corner in the right part of the box.
    T1,
    /// Top-left corner in the left child.
    T2,
    /// Horizontal line, no corner nearby.
    T3,
    /// Horizontal line, corner in the left child of the next box.
    T4,
    /// Vertical line in the left child.
    M1,
    /// Vertical line in the right part.
    M2,
    /// Inside a tile.
    M3,
    /// Vertical line in the left child of the next box.
    M4,
    /// Vertical line in the right part of the next box.
    M5,
    /// Bottom of a tile, vertical line below.
    B1,
    /// Bottom of a tile.
    B2,
    /// Bottom of a tile, vertical line in the next box.
    B3,
}

/// Family of a kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `𝒯`.
    Top,
    /// `ℳ`.
    Middle,
    /// `ℬ`.
    Bottom,
}

impl Kind {
    /// All kinds in order.
    pub const ALL: [Kind; 12] = [
        Kind::T1,
        Kind::T2,
        Kind::T3,
        Kind::T4,
        Kind::M1,
        Kind::M2,
        Kind::M3,
        Kind::M4,
        Kind::M5,
        Kind::B1,
        Kind::B2,
        Kind::B3,
    ];

    /// Family.
    pub fn family(self) -> Family {
        match self {
            Kind::T1 | Kind::T2 | Kind::T3 | Kind::T4 => Family::Top,
            Kind::B1 | Kind::B2 | Kind::B3 => Family::Bottom,
            _ => Family::Middle,
        }
    }

    /// True for the kinds carrying a second label.
    pub fn has_secondary(self) -> bool {
        matches!(self, Kind::T1 | Kind::M2)
    }

    /// Position in [`Kind::ALL`].
    pub fn index(self) -> usize {
        Kind::ALL.iter().position(|&k| k == self).unwrap()
    }

    /// Lowercase name.
    pub fn name(self) -> &'static str {
        ["t1", "t2", "t3", "t4", "m1", "m2", "m3", "m4", "m5", "b1", "b2", "b3"][self.index()]
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL.iter().copied().find(|k| k.name() == s).ok_or_else(|| Error::Parse(format!("unknown kind {s:?}")))
    }
}

/// A payload `(letter, index)`: the tile letter and its 1-based position in
/// the parent's image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    /// Letter of the substitution alphabet.
    pub letter: usize,
    /// Index in `1..=M`.
    pub index: usize,
}

impl Label {
    /// Builds a label.
    pub fn new(letter: usize, index: usize) -> Self {
        Label { letter, index }
    }
}

/// A letter of `ℛ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    /// Kind.
    pub kind: Kind,
    /// Label of the rightmost shaded area.
    pub primary: Label,
    /// Label of the left area, for `t1` and `m2` only.
    pub secondary: Option<Label>,
}

impl Letter {
    /// A letter with one label.
    pub fn single(kind: Kind, primary: Label) -> Self {
        Letter { kind, primary, secondary: None }
    }

    /// A letter with two labels, written `kind(b, j, a, i)` with the left
    /// label first.
    pub fn double(kind: Kind, secondary: Label, primary: Label) -> Self {
        Letter { kind, primary, secondary: Some(secondary) }
    }

    /// Checks the payload shape and ranges.
    pub fn validate(&self, alphabet_size: usize, m: usize) -> Result<()> {
        if self.kind.has_secondary() != self.secondary.is_some() {
            return Err(Error::Input(format!("{} letter with wrong number of labels", self.kind)));
        }
        for l in std::iter::once(self.primary).chain(self.secondary) {
            if l.letter >= alphabet_size || l.index == 0 || l.index > m {
                return Err(Error::Input(format!("label ({}, {}) out of range", l.letter, l.index)));
            }
        }
        Ok(())
    }

    /// Label carried by a slot.
    pub fn slot(&self, s: Slot) -> Option<Label> {
        match s {
            Slot::Primary => Some(self.primary),
            Slot::Secondary => self.secondary,
        }
    }

    /// Human form such as `t1(b,2,a,1)` using the alphabet's names.
    pub fn display(&self, s: &Substitution) -> String {
        let l = |x: Label| format!("{},{}", s.alphabet[x.letter], x.index);
        match self.secondary {
            Some(sec) => format!("{}({},{})", self.kind, l(sec), l(self.primary)),
            None => format!("{}({})", self.kind, l(self.primary)),
        }
    }
}

/// Number of letters of `ℛ` once payloads range over `𝒜 × [1, M]`.
pub fn alphabet_size(letters: usize, m: usize) -> u128 {
    let p = (letters * m) as u128;
    2 * p * p + 10 * p
}

/// Every letter of `ℛ` for an alphabet of `letters` letters and indices up to `m`.
pub fn all_letters(letters: usize, m: usize) -> Vec<Letter> {
    let labels: Vec<Label> = (0..letters).flat_map(|a| (1..=m).map(move |i| Label::new(a, i))).collect();
    let mut out = Vec::new();
    for k in Kind::ALL {
        for &p in &labels {
            if k.has_secondary() {
                for &s in &labels {
                    out.push(Letter::double(k, s, p));
                }
            } else {
                out.push(Letter::single(k, p));
            }
        }
    }
    out
}

/// Which label of a letter an area carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    /// The `(a, i)` label.
    Primary,
    /// The `(b, j)` label.
    Secondary,
}

/// A labelled interval on one edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    /// Lower endpoint.
    pub lo: f64,
    /// Upper endpoint.
    pub hi: f64,
    /// Label slot of the area touching the edge.
    pub slot: Slot,
}

/// Traces of a letter on the five edges of the cell `[0,2]×[0,1]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EdgeTrace {
    /// Top edge, `x ∈ [0,2]`.
    pub top: Vec<Trace>,
    /// Left edge, `y ∈ [0,1]`.
    pub left: Vec<Trace>,
    /// Right edge, `y ∈ [0,1]`.
    pub right: Vec<Trace>,
    /// Bottom-left edge, `x ∈ [0,1]`.
    pub bottom_left: Vec<Trace>,
    /// Bottom-right edge, `x ∈ [1,2]`.
    pub bottom_right: Vec<Trace>,
}

/// Shaded polygons of a kind, counter-clockwise, with their slots.
pub fn shaded_regions(kind: Kind) -> Vec<(Vec<(f64, f64)>, Slot)> {
    let rect = |x0: f64, x1: f64, y0: f64, y1: f64| vec![(x0, y0), (x1, y0), (x1, y1), (x0, y1)];
    use Slot::*;
    match kind {
        Kind::T1 => vec![(rect(0.0, 0.5, 0.0, 0.5), Secondary), (rect(1.5, 2.0, 0.0, 0.5), Primary)],
        Kind::T2 => vec![(rect(0.5, 2.0, 0.0, 0.5), Primary)],
        Kind::T3 => vec![(rect(0.0, 2.0, 0.0, 0.5), Primary)],
        Kind::T4 => vec![(rect(0.0, 1.5, 0.0, 0.5), Primary)],
        Kind::M1 => vec![(vec![(0.5, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0)], Primary)],
        Kind::M2 => vec![
            (vec![(1.5, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0)], Primary),
            (vec![(0.0, 0.0), (0.5, 0.0), (0.0, 0.5)], Secondary),
        ],
        Kind::M3 => vec![(rect(0.0, 2.0, 0.0, 1.0), Primary)],
        Kind::M4 => vec![(vec![(0.0, 0.0), (1.5, 0.0), (1.0, 1.0), (0.0, 1.0)], Primary)],
        Kind::M5 => vec![(vec![(0.0, 0.0), (2.0, 0.0), (2.0, 0.5), (1.0, 1.0), (0.0, 1.0)], Primary)],
        Kind::B1 => vec![(rect(1.0, 2.0, 0.5, 1.0), Primary)],
        Kind::B2 => vec![(rect(0.0, 2.0, 0.5, 1.0), Primary)],
        Kind::B3 => vec![(rect(0.0, 1.0, 0.5, 1.0), Primary)],
    }
}

fn edge_intervals(regions: &[(Vec<(f64, f64)>, Slot)], on: impl Fn((f64, f64)) -> Option<f64>, lo: f64, hi: f64) -> Vec<Trace> {
    let mut out = Vec::new();
    for (poly, slot) in regions {
        for k in 0..poly.len() {
            let (p, q) = (poly[k], poly[(k + 1) % poly.len()]);
            if let (Some(a), Some(b)) = (on(p), on(q)) {
                let (a, b) = (a.min(b).max(lo), a.max(b).min(hi));
                if b > a {
                    out.push(Trace { lo: a, hi: b, slot: *slot });
                }
            }
        }
    }
    out.sort_by(|x, y| x.lo.partial_cmp(&y.lo).unwrap());
    out
}

/// Intersects the shaded regions of a letter with the five cell edges.
pub fn edge_traces(kind: Kind) -> EdgeTrace {
    let r = shaded_regions(kind);
    let at = |c: f64, f: fn((f64, f64)) -> f64, g: fn((f64, f64)) -> f64| {
        move |p: (f64, f64)| if (f(p) - c).abs() < 1e-12 { Some(g(p)) } else { None }
    };
    let x = |p: (f64, f64)| p.0;
    let y = |p: (f64, f64)| p.1;
    EdgeTrace {
        top: edge_intervals(&r, at(1.0, y, x), 0.0, 2.0),
        left: edge_intervals(&r, at(0.0, x, y), 0.0, 1.0),
        right: edge_intervals(&r, at(2.0, x, y), 0.0, 1.0),
        bottom_left: edge_intervals(&r, at(0.0, y, x), 0.0, 1.0),
        bottom_right: edge_intervals(&r, at(0.0, y, x), 1.0, 2.0),
    }
}

fn same_traces(x: &[Trace], lx: &Letter, y: &[Trace], ly: &Letter, map: impl Fn(f64) -> f64) -> bool {
    x.len() == y.len()
        && x.iter().zip(y).all(|(p, q)| {
            (map(p.lo) - q.lo).abs() < 1e-12 && (map(p.hi) - q.hi).abs() < 1e-12 && lx.slot(p.slot) == ly.slot(q.slot)
        })
}

/// Rules 1 and 2 for `x` at `g` and `y` at `g·a` in the trace model.
pub fn adjacent_h(x: &Letter, y: &Letter) -> bool {
    x.kind.family() == y.kind.family()
        && same_traces(&edge_traces(x.kind).right, x, &edge_traces(y.kind).left, y, |v| v)
}

/// Rule 1 for `parent` at `g` over `left` at `g·t` and `right` at `g·t·a`
/// (base 2) in the trace model: traces and labels continue downwards.
pub fn adjacent_v(parent: &Letter, left: &Letter, right: &Letter) -> bool {
    let p = edge_traces(parent.kind);
    same_traces(&p.bottom_left, parent, &edge_traces(left.kind).top, left, |v| 2.0 * v)
        && same_traces(&p.bottom_right, parent, &edge_traces(right.kind).top, right, |v| 2.0 * (v - 1.0))
}

/// `π`: the label letter of the rightmost shaded area.
pub fn project_pi(x: &Letter) -> usize {
    x.primary.letter
}

/// A finite pattern: letters on a finite subset of BS(1,n).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pattern {
    /// Assignment.
    pub cells: BTreeMap<GroupElement, Letter>,
}

impl Pattern {
    /// Empty pattern.
    pub fn new() -> Self {
        Pattern::default()
    }

    /// Letter at `g`.
    pub fn get(&self, g: &GroupElement) -> Option<&Letter> {
        self.cells.get(g)
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    /// True for the empty pattern.
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Restriction to a subset.
    pub fn restrict(&self, keep: impl Fn(&GroupElement) -> bool) -> Pattern {
        Pattern { cells: self.cells.iter().filter(|(g, _)| keep(g)).map(|(g, l)| (*g, *l)).collect() }
    }

    /// JSON form using the alphabet's letter names.
    pub fn to_json(&self, s: &Substitution) -> serde_json::Value {
        let cells: Vec<PatternCell> = self
            .cells
            .iter()
            .map(|(g, l)| PatternCell { element: *g, letter: LetterJson::from_letter(l, s) })
            .collect();
        serde_json::to_value(cells).expect("pattern serializes")
    }

    /// Reads the JSON form.
    pub fn from_json(v: &serde_json::Value, s: &Substitution, n: u32) -> Result<Pattern> {
        let cells: Vec<PatternCell> = serde_json::from_value(v.clone())?;
        let mut out = Pattern::new();
        for c in cells {
            let g = GroupElement::new(c.element.i, c.element.j, c.element.k, n)?;
            out.cells.insert(g, c.letter.to_letter(s)?);
        }
        Ok(out)
    }
}

/// One entry of the pattern JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatternCell {
    /// Group element.
    pub element: GroupElement,
    /// Letter.
    pub letter: LetterJson,
}

/// JSON form `{"kind":"t1","a":"a","i":2,"b":"b","j":1}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LetterJson {
    /// Kind name.
    pub kind: Kind,
    /// Primary letter.
    pub a: String,
    /// Primary index.
    pub i: usize,
    /// Secondary letter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    /// Secondary index.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
}

impl LetterJson {
    /// Converts a letter.
    pub fn from_letter(l: &Letter, s: &Substitution) -> Self {
        LetterJson {
            kind: l.kind,
            a: s.alphabet[l.primary.letter].clone(),
            i: l.primary.index,
            b: l.secondary.map(|x| s.alphabet[x.letter].clone()),
            j: l.secondary.map(|x| x.index),
        }
    }

    /// Converts back.
    pub fn to_letter(&self, s: &Substitution) -> Result<Letter> {
        let primary = Label::new(s.letter(&self.a)?, self.i);
        let secondary = match (&self.b, self.j) {
            (Some(b), Some(j)) => Some(Label::new(s.letter(b)?, j)),
            (None, None) => None,
            _ => return Err(Error::Input("secondary label needs both b and j".into())),
        };
        Ok(Letter { kind: self.kind, primary, secondary })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m5_and_t1_traces() {
        let m5 = edge_traces(Kind::M5);
        assert_eq!((m5.right[0].lo, m5.right[0].hi), (0.0, 0.5));
        assert_eq!((m5.top[0].lo, m5.top[0].hi), (0.0, 1.0));
        let t1 = edge_traces(Kind::T1);
        assert_eq!(t1.left[0].slot, Slot::Secondary);
        assert_eq!(t1.right[0].slot, Slot::Primary);
        assert_eq!((t1.bottom_right[0].lo, t1.bottom_right[0].hi), (1.5, 2.0));
        assert!(t1.top.is_empty());
    }

    #[test]
    fn cardinality() {
        assert_eq!(alphabet_size(2, 21), 3948);
        assert_eq!(all_letters(2, 3).len() as u128, alphabet_size(2, 3));
    }
}
