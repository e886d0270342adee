//! Local admissibility of patterns: adjacency tables harvested from encoded
//! windows, shaded-zone dimensions and sheet synchronization.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::{edge_traces, Family, Kind, Label, Letter, Pattern, Slot, Trace};
use crate::codec::{coset_key, encode_with_paths, sample_window, Encoder};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::group::{rectangle, sheet_mates, GroupElement};
use crate::substitution::{EigenData, Substitution};

/// Labels are equal.
pub const EQ: u8 = 1;
/// The second label is a child of the first.
pub const CHILD: u8 = 2;
/// The second label follows the first in a row.
pub const SUCC: u8 = 4;

/// One broken rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Rule number 1 to 5.
    pub rule: u8,
    /// Elements involved.
    pub elements: Vec<GroupElement>,
    /// What went wrong.
    pub witness: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let els: Vec<String> = self.elements.iter().map(ToString::to_string).collect();
        write!(f, "rule {} at [{}]: {}", self.rule, els.join(", "), self.witness)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum TableKind {
    H,
    V,
    S,
}

/// Relations between the labels of the substitution.
#[derive(Clone, Debug)]
struct LabelRelations {
    child: BTreeSet<(usize, usize, usize)>,
    succ_inner: BTreeSet<(usize, usize, usize)>,
    last: BTreeSet<(usize, usize)>,
}

impl LabelRelations {
    fn new(s: &Substitution) -> Self {
        let mut child = BTreeSet::new();
        let mut succ_inner = BTreeSet::new();
        let mut last = BTreeSet::new();
        for (a, imgs) in s.rules.iter().enumerate() {
            for img in imgs {
                for (m, &c) in img.iter().enumerate() {
                    child.insert((a, c, m + 1));
                    if m + 1 < img.len() {
                        succ_inner.insert((c, img[m + 1], m + 1));
                    }
                }
                last.insert((*img.last().unwrap(), img.len()));
            }
        }
        LabelRelations { child, succ_inner, last }
    }

    fn bits(&self, p: Label, q: Label) -> u8 {
        let mut r = 0;
        if p == q {
            r |= EQ;
        }
        if self.child.contains(&(p.letter, q.letter, q.index)) {
            r |= CHILD;
        }
        let inner = q.index == p.index + 1 && self.succ_inner.contains(&(p.letter, q.letter, p.index));
        let across = q.index == 1 && self.last.contains(&(p.letter, p.index));
        if inner || across {
            r |= SUCC;
        }
        r
    }
}

pub(crate) fn slots_of(kinds: &[Option<Kind>]) -> Vec<(usize, Slot)> {
    let mut out = Vec::new();
    for (c, k) in kinds.iter().enumerate() {
        if let Some(k) = k {
            out.push((c, Slot::Primary));
            if k.has_secondary() {
                out.push((c, Slot::Secondary));
            }
        }
    }
    out
}

fn relation_vector(rel: &LabelRelations, cells: &[Option<Letter>]) -> Vec<u8> {
    let kinds: Vec<Option<Kind>> = cells.iter().map(|c| c.map(|l| l.kind)).collect();
    let slots = slots_of(&kinds);
    let labels: Vec<Label> = slots.iter().map(|&(c, s)| cells[c].unwrap().slot(s).unwrap()).collect();
    let mut out = Vec::with_capacity(labels.len() * labels.len());
    for &p in &labels {
        for &q in &labels {
            out.push(rel.bits(p, q));
        }
    }
    out
}

/// Adjacency tables harvested from encoded windows.
#[derive(Clone, Debug)]
pub struct Tables {
    /// Group base.
    pub n: u32,
    /// The normalized substitution.
    pub sigma: Substitution,
    /// Largest index.
    pub m: usize,
    /// Horizontal pairs `(g, g·a)` by kinds, with the relations always seen.
    pub h: BTreeMap<Vec<Kind>, Vec<u8>>,
    /// Vertical tuples `(g, g·t, …, g·t·a^{n−1})`.
    pub v: BTreeMap<Vec<Kind>, Vec<u8>>,
    /// Sheet triples `(g, g·t·a·t⁻¹, g·t·a⁻¹·t⁻¹)`.
    pub s: BTreeMap<Vec<Kind>, Vec<u8>>,
    /// Border steps `(kind, digit, kind)`: the child box holding the vertical line.
    pub steps: BTreeSet<(Kind, u32, Kind)>,
    /// Per source kind of a step into a `𝒯` letter: whether that letter always had index 1.
    pub step_first: BTreeMap<Kind, bool>,
    /// Heights of complete zones seen.
    pub heights: BTreeSet<i64>,
    /// Top widths of complete zones seen, by letter.
    pub widths: BTreeMap<usize, BTreeSet<i64>>,
    /// Height bounds used by rule 3.
    pub height_range: (i64, i64),
    /// Width bounds used by rule 3, by letter.
    pub width_range: Vec<(i64, i64)>,
    /// Windows encoded.
    pub samples: usize,
    rel: LabelRelations,
    cache: RefCell<HashMap<u64, Option<Rc<[(usize, usize, u8)]>>>>,
}

impl Tables {
    fn empty(s: &Substitution, eigen: &EigenData) -> Self {
        let n = s.n;
        let h_rule = eigen.h_rule_base(n);
        let eps = 1e-9;
        let width_range = eigen.v.iter().map(|&va| (((va / n as f64) - eps).ceil() as i64 - 1, (va - eps).ceil() as i64)).collect();
        Tables {
            n,
            sigma: s.clone(),
            m: s.max_image_len(),
            h: BTreeMap::new(),
            v: BTreeMap::new(),
            s: BTreeMap::new(),
            steps: BTreeSet::new(),
            step_first: BTreeMap::new(),
            heights: BTreeSet::new(),
            widths: BTreeMap::new(),
            height_range: (h_rule, h_rule + 1),
            width_range,
            samples: 0,
            rel: LabelRelations::new(s),
            cache: RefCell::new(HashMap::new()),
        }
    }

    fn table(&self, k: TableKind) -> &BTreeMap<Vec<Kind>, Vec<u8>> {
        match k {
            TableKind::H => &self.h,
            TableKind::V => &self.v,
            TableKind::S => &self.s,
        }
    }

    fn observe(&mut self, k: TableKind, cells: &[Letter]) {
        let key: Vec<Kind> = cells.iter().map(|l| l.kind).collect();
        let opt: Vec<Option<Letter>> = cells.iter().map(|&l| Some(l)).collect();
        let r = relation_vector(&self.rel, &opt);
        let table = match k {
            TableKind::H => &mut self.h,
            TableKind::V => &mut self.v,
            TableKind::S => &mut self.s,
        };
        match table.get_mut(&key) {
            Some(req) => req.iter_mut().zip(&r).for_each(|(a, b)| *a &= b),
            None => {
                table.insert(key, r);
            }
        }
    }

    /// Relation bits from label `p` to label `q`.
    pub(crate) fn label_bits(&self, p: Label, q: Label) -> u8 {
        self.rel.bits(p, q)
    }

    /// Number of entries of the three tables.
    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.h.len(), self.v.len(), self.s.len())
    }

    /// Required relations among the present slots of a projected key, or
    /// `None` when no observed tuple projects onto it.
    pub(crate) fn required(&self, k: TableKind, key: &[Option<Kind>]) -> Option<Rc<[(usize, usize, u8)]>> {
        let code = key.iter().fold(k as u64, |acc, x| (acc << 4) | x.map_or(0, |x| x.index() as u64 + 1)) | ((key.len() as u64) << 60);
        if let Some(r) = self.cache.borrow().get(&code) {
            return r.clone();
        }
        let present = slots_of(key);
        let mut acc: Option<Vec<u8>> = None;
        for (full, req) in self.table(k) {
            if full.iter().zip(key).any(|(a, b)| b.is_some_and(|b| b != *a)) {
                continue;
            }
            let full_opt: Vec<Option<Kind>> = full.iter().map(|&x| Some(x)).collect();
            let fs = slots_of(&full_opt);
            let idx: Vec<usize> = present.iter().map(|s| fs.iter().position(|t| t == s).unwrap()).collect();
            let m = fs.len();
            let proj: Vec<u8> = idx.iter().flat_map(|&i| idx.iter().map(move |&j| req[i * m + j])).collect();
            acc = Some(match acc {
                None => proj,
                Some(a) => a.iter().zip(&proj).map(|(x, y)| x & y).collect(),
            });
        }
        let out: Option<Rc<[(usize, usize, u8)]>> = acc.map(|a| {
            let m = present.len();
            (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).filter(|&(i, j)| i != j).map(|(i, j)| (i, j, a[i * m + j])).filter(|x| x.2 != 0).collect()
        });
        self.cache.borrow_mut().insert(code, out.clone());
        out
    }

    /// Checks one tuple; `None` cells are outside the support.
    pub(crate) fn check_tuple(&self, k: TableKind, cells: &[Option<Letter>]) -> std::result::Result<(), (u8, String)> {
        let key: Vec<Option<Kind>> = cells.iter().map(|c| c.map(|l| l.kind)).collect();
        let rule_of = |bits: u8| if k == TableKind::S { 4 } else if bits & CHILD != 0 { 5 } else { 1 };
        let Some(req) = self.required(k, &key) else {
            let names: Vec<String> = key.iter().map(|k| k.map_or("_".to_string(), |k| k.to_string())).collect();
            return Err((if k == TableKind::S { 4 } else { 1 }, format!("kinds ({}) never adjacent", names.join(", "))));
        };
        let kinds: Vec<Option<Kind>> = key;
        let slots = slots_of(&kinds);
        let label = |i: usize| {
            let (c, s) = slots[i];
            cells[c].unwrap().slot(s).unwrap()
        };
        for &(i, j, bits) in req.iter() {
            let have = self.rel.bits(label(i), label(j));
            if have & bits != bits {
                return Err((rule_of(bits & !have), format!("label slots {i},{j}: relation {bits:03b} required, {have:03b} found")));
            }
        }
        Ok(())
    }
}

fn overlap(a: &Trace, lo: f64, hi: f64) -> bool {
    a.lo.max(lo) < a.hi.min(hi) - 1e-12
}

/// A shaded zone found in a pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Zone {
    /// Label of the zone.
    pub label: Label,
    /// Member cells with the slot they contribute.
    pub nodes: Vec<(GroupElement, Slot)>,
    /// Highest level.
    pub top: i64,
    /// Lowest level.
    pub bottom: i64,
    /// True when the zone holds both `𝒯` and `ℬ` cells.
    pub closed: bool,
    /// Top runs per `a`-coset: boxes met by the tile top and whether both ends are seen.
    pub runs: Vec<(usize, bool)>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a] = b;
        }
    }
}

/// Connected shaded zones of a pattern: slots joined across shared edge traces.
pub fn zones(p: &Pattern) -> Vec<Zone> {
    let mut index: HashMap<(GroupElement, Slot), usize> = HashMap::new();
    let mut nodes = Vec::new();
    for (g, l) in &p.cells {
        for s in [Slot::Primary, Slot::Secondary] {
            if l.slot(s).is_some() {
                index.insert((*g, s), nodes.len());
                nodes.push((*g, s));
            }
        }
    }
    let mut uf = UnionFind((0..nodes.len()).collect());
    for (g, l) in &p.cells {
        let tg = edge_traces(l.kind);
        let ga = g.mul_a(1);
        if let Some(r) = p.get(&ga) {
            let tr = edge_traces(r.kind);
            for x in &tg.right {
                for y in &tr.left {
                    if overlap(x, y.lo, y.hi) {
                        uf.union(index[&(*g, x.slot)], index[&(ga, y.slot)]);
                    }
                }
            }
        }
        let n = g.n as f64;
        let bottom: Vec<Trace> = tg.bottom_left.iter().chain(&tg.bottom_right).copied().collect();
        let first = g.mul_t(1);
        for c in 0..g.n {
            let h = first.mul_a(c as i128);
            let Some(child) = p.get(&h) else { continue };
            for y in &edge_traces(child.kind).top {
                let (lo, hi) = ((2.0 * c as f64 + y.lo) / n, (2.0 * c as f64 + y.hi) / n);
                for x in &bottom {
                    if overlap(x, lo, hi) {
                        uf.union(index[&(*g, x.slot)], index[&(h, y.slot)]);
                    }
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..nodes.len() {
        groups.entry(uf.find(i)).or_default().push(i);
    }
    let mut out = Vec::new();
    for members in groups.values() {
        let zn: Vec<(GroupElement, Slot)> = members.iter().map(|&i| nodes[i]).collect();
        let (g0, s0) = zn[0];
        let label = p.get(&g0).unwrap().slot(s0).unwrap();
        let fam = |g: &GroupElement| p.get(g).unwrap().kind.family();
        let top = zn.iter().map(|(g, _)| g.level()).max().unwrap();
        let bottom = zn.iter().map(|(g, _)| g.level()).min().unwrap();
        let closed = zn.iter().any(|(g, _)| fam(g) == Family::Top) && zn.iter().any(|(g, _)| fam(g) == Family::Bottom);
        let mut rows: BTreeMap<(i64, Dyadic), BTreeSet<GroupElement>> = BTreeMap::new();
        for (g, _) in &zn {
            if fam(g) == Family::Top {
                rows.entry(coset_key(g)).or_default().insert(*g);
            }
        }
        let mut runs = Vec::new();
        for cells in rows.values() {
            let mut xs: Vec<(Dyadic, GroupElement)> = cells.iter().map(|g| (g.phi().0, *g)).collect();
            xs.sort();
            let first = xs[0].1;
            let contiguous = xs.iter().enumerate().all(|(m, (_, g))| first.mul_a(m as i128) == *g);
            let last = xs.last().unwrap().1;
            let next = p.get(&last.mul_a(1));
            let ends = p.get(&first.mul_a(-1)).is_some() && next.is_some();
            // A `t2` right after the run holds the tile's top-right corner.
            let extra = usize::from(next.is_some_and(|l| l.kind == Kind::T2));
            runs.push((xs.len() + extra, contiguous && ends));
        }
        out.push(Zone { label, nodes: zn, top, bottom, closed, runs });
    }
    out
}

/// Harvests the tables from `samples` encoded random windows on `R_{k,ℓ}`.
pub fn harvest_tables_on(
    s: &Substitution,
    eigen: &EigenData,
    samples: usize,
    seed: u64,
    k: u32,
    ell: u32,
) -> Result<Tables> {
    harvest(s, eigen, samples, seed, k, ell, None)
}

/// Harvests the tables from `samples` random windows encoded on `R_{k,ℓ}`
/// together with `depth` steps of every left-border path below it.
/// Each sample also translates the support by `a^m`, `|m| ≤ 8`, to meet
/// tiles away from the seed.
pub fn harvest_tables_with_paths(
    s: &Substitution,
    eigen: &EigenData,
    samples: usize,
    seed: u64,
    k: u32,
    ell: u32,
    depth: usize,
) -> Result<Tables> {
    harvest(s, eigen, samples, seed, k, ell, Some(depth))
}

fn harvest(
    s: &Substitution,
    eigen: &EigenData,
    samples: usize,
    seed: u64,
    k: u32,
    ell: u32,
    paths: Option<usize>,
) -> Result<Tables> {
    let mut t = Tables::empty(s, eigen);
    let support = rectangle(k, ell, s.n);
    let mut attempt = 0u64;
    while t.samples < samples {
        let w = sample_window(s, eigen, seed.wrapping_mul(1_000_003).wrapping_add(attempt))?;
        attempt += 1;
        let tiling = w.generator()?;
        let enc = Encoder::new(tiling);
        let mut p = Pattern::new();
        let mut ok = true;
        if let Some(depth) = paths {
            let m = ChaCha8Rng::seed_from_u64(seed ^ attempt.rotate_left(29)).gen_range(-8i128..=8);
            let shift = GroupElement::identity(s.n).mul_a(m);
            let moved: Vec<GroupElement> = support.iter().map(|g| shift.mul(g)).collect();
            match encode_with_paths(&w, &moved, depth) {
                Ok(q) => p = q,
                Err(Error::Ambiguous { .. } | Error::OutsideWindow(_)) => continue,
                Err(e) => return Err(e),
            }
        } else {
            for g in &support {
                match enc.letter(g) {
                    Ok(l) => {
                        p.cells.insert(*g, l);
                    }
                    Err(Error::Ambiguous { .. }) => {
                        ok = false;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        if !ok {
            continue;
        }
        let mut steps = Vec::new();
        for (g, l) in &p.cells {
            let c = match enc.border_child(g) {
                Ok(c) => c,
                Err(Error::Ambiguous { .. } | Error::OutsideWindow(_)) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            };
            if let Some(c) = c {
                if let Some(child) = p.get(&g.mul_t(1).mul_a(c as i128)) {
                    steps.push((l.kind, c, *child));
                }
            }
        }
        if !ok {
            continue;
        }
        observe_pattern(&mut t, &p);
        for (kind, c, child) in steps {
            t.steps.insert((kind, c, child.kind));
            if child.kind.family() == Family::Top {
                let e = t.step_first.entry(kind).or_insert(true);
                *e &= child.primary.index == 1;
            }
        }
        for z in zones(&p) {
            if z.closed {
                t.heights.insert(z.top - z.bottom);
            }
            for &(count, complete) in &z.runs {
                if complete {
                    t.widths.entry(z.label.letter).or_default().insert(count as i64 - 1);
                }
            }
        }
        t.samples += 1;
    }
    Ok(t)
}

/// Harvests the tables on the default support (`R_{3,6}` for n = 2, `R_{1,4}` otherwise).
pub fn harvest_tables(s: &Substitution, eigen: &EigenData, samples: usize, seed: u64) -> Result<Tables> {
    if s.n == 2 {
        harvest_tables_on(s, eigen, samples, seed, 3, 6)
    } else {
        harvest_tables_on(s, eigen, samples, seed, 1, 4)
    }
}

fn observe_pattern(t: &mut Tables, p: &Pattern) {
    for (g, l) in &p.cells {
        if let Some(r) = p.get(&g.mul_a(1)) {
            t.observe(TableKind::H, &[*l, *r]);
        }
        let first = g.mul_t(1);
        let kids: Option<Vec<Letter>> = (0..g.n as i128).map(|c| p.get(&first.mul_a(c)).copied()).collect();
        if let Some(kids) = kids {
            let mut cells = vec![*l];
            cells.extend(kids);
            t.observe(TableKind::V, &cells);
        }
        let (r, lft) = sheet_mates(g);
        if let (Some(a), Some(b)) = (p.get(&r), p.get(&lft)) {
            t.observe(TableKind::S, &[*l, *a, *b]);
        }
    }
}

/// Checks every local rule on a pattern.
pub fn check_pattern(p: &Pattern, t: &Tables) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    let sigma = &t.sigma;
    for (g, l) in &p.cells {
        if g.n != t.n {
            return Err(Error::BaseMismatch(g.n, t.n));
        }
        if let Err(e) = l.validate(sigma.size(), t.m) {
            out.push(Violation { rule: 5, elements: vec![*g], witness: e.to_string() });
        }
    }
    if !out.is_empty() {
        return Ok(out);
    }
    // Rules 1, 2 and 5 on horizontal pairs.
    for (g, l) in &p.cells {
        let ga = g.mul_a(1);
        if let Some(r) = p.get(&ga) {
            if l.kind.family() != r.kind.family() {
                out.push(Violation { rule: 2, elements: vec![*g, ga], witness: format!("{} next to {}", l.kind, r.kind) });
                continue;
            }
            if let Err((rule, w)) = t.check_tuple(TableKind::H, &[Some(*l), Some(*r)]) {
                out.push(Violation { rule, elements: vec![*g, ga], witness: w });
            }
        }
    }
    // Rule 2 along whole a-rows.
    let mut rows: BTreeMap<(i64, Dyadic), BTreeSet<Family>> = BTreeMap::new();
    for (g, l) in &p.cells {
        rows.entry(coset_key(g)).or_default().insert(l.kind.family());
    }
    for (k, f) in &rows {
        if f.len() > 1 {
            let elements: Vec<GroupElement> = p.cells.keys().filter(|g| coset_key(g) == *k).copied().collect();
            out.push(Violation { rule: 2, elements, witness: format!("families {f:?} on one a-row") });
        }
    }
    // Rules 1 and 5 on vertical tuples.
    let mut parents = BTreeSet::new();
    for g in p.cells.keys() {
        parents.insert(*g);
        parents.insert(g.mul_t(-1));
    }
    for g in &parents {
        let first = g.mul_t(1);
        let mut elements = vec![*g];
        elements.extend((0..g.n as i128).map(|c| first.mul_a(c)));
        let cells: Vec<Option<Letter>> = elements.iter().map(|e| p.get(e).copied()).collect();
        if cells.iter().filter(|c| c.is_some()).count() < 2 {
            continue;
        }
        if let Err((rule, w)) = t.check_tuple(TableKind::V, &cells) {
            out.push(Violation { rule, elements, witness: w });
        }
    }
    // Rule 4.
    for (g, l) in &p.cells {
        let (r, lft) = sheet_mates(g);
        let cells = [Some(*l), p.get(&r).copied(), p.get(&lft).copied()];
        if cells.iter().filter(|c| c.is_some()).count() >= 2 {
            if let Err((_, w)) = t.check_tuple(TableKind::S, &cells) {
                out.push(Violation { rule: 4, elements: vec![*g, r, lft], witness: w });
            }
        }
        if t.n == 2 {
            if let Some(w) = sync_implication(l, p.get(&r), p.get(&lft)) {
                out.push(Violation { rule: 4, elements: vec![*g, r, lft], witness: w });
            }
        }
    }
    // Rule 3.
    for z in zones(p) {
        let (lo, hi) = t.height_range;
        let h = z.top - z.bottom;
        if (z.closed && (h < lo || h > hi)) || (!z.closed && h > hi) {
            out.push(Violation {
                rule: 3,
                elements: z.nodes.iter().map(|x| x.0).collect(),
                witness: format!("zone height {h} outside [{lo}, {hi}]"),
            });
        }
        let (wlo, whi) = t.width_range[z.label.letter];
        for &(count, complete) in &z.runs {
            let w = count as i64 - 1;
            if (complete && (w < wlo || w > whi)) || (!complete && w > whi) {
                out.push(Violation {
                    rule: 3,
                    elements: z.nodes.iter().map(|x| x.0).collect(),
                    witness: format!("zone top width {w} outside [{wlo}, {whi}]"),
                });
            }
        }
    }
    Ok(out)
}

/// The four synchronization implications for n = 2. `right` is at
/// `g·t·a·t⁻¹` and `left` at `g·t·a⁻¹·t⁻¹`.
pub(crate) fn sync_implication(x: &Letter, right: Option<&Letter>, left: Option<&Letter>) -> Option<String> {
    let is = |c: Option<&Letter>, k: Kind, lab: Label| c.is_some_and(|c| c.kind == k && c.primary == lab);
    match x.kind {
        Kind::T1 => {
            let sec = x.secondary.unwrap();
            if right.is_some() && !is(right, Kind::T2, x.primary) {
                return Some("t1 without t2 at g·tat⁻¹".into());
            }
            if left.is_some() && !is(left, Kind::T4, sec) {
                return Some("t1 without t4 at g·ta⁻¹t⁻¹".into());
            }
        }
        Kind::B1 | Kind::B3 if right.is_some() && left.is_some() => {
            if !is(right, x.kind, x.primary) && !is(left, x.kind, x.primary) {
                return Some(format!("{} without a matching sheet mate", x.kind));
            }
        }
        _ => {}
    }
    if let Some(l) = left {
        let m1 = x.kind == Kind::M1;
        let m2 = l.kind == Kind::M2;
        if m1 != m2 || (m1 && l.primary != x.primary) {
            return Some("m1 at g and m2 at g·ta⁻¹t⁻¹ must come together".into());
        }
    }
    None
}

/// Checks a harvested table against the trace model: every horizontal pair
/// and (n = 2) every vertical triple must pass the trace test with some labels.
pub fn trace_containment(t: &Tables) -> Vec<String> {
    use crate::alphabet::{adjacent_h, adjacent_v};
    let mut bad = Vec::new();
    let lab = Label::new(0, 1);
    let fill = |k: Kind| if k.has_secondary() { Letter::double(k, lab, lab) } else { Letter::single(k, lab) };
    for key in t.h.keys() {
        if !adjacent_h(&fill(key[0]), &fill(key[1])) {
            bad.push(format!("horizontal {:?}", key));
        }
    }
    if t.n == 2 {
        for key in t.v.keys() {
            if !adjacent_v(&fill(key[0]), &fill(key[1]), &fill(key[2])) {
                bad.push(format!("vertical {:?}", key));
            }
        }
    }
    bad
}
