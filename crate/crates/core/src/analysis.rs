//! Enumeration of locally admissible patterns and the dynamical probes built
//! on it: entropy tables, cone completion, periodicity and height sequences.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Family, Kind, Label, Letter, Pattern, Slot};
use crate::checker::{slots_of, sync_implication, zones, TableKind, Tables, EQ};
use crate::codec::coset_key;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::group::{cone, rectangle, sheet_mates, GroupElement};
use crate::substitution::{ClosedForm, EigenData};

const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
struct Tuple {
    kind: TableKind,
    members: Vec<usize>,
}

/// Backtracking search over assignments of letters to a finite support.
///
/// Cells may be grouped into classes that must carry the same letter, and
/// each cell may be restricted to one family or pinned to a fixed letter.
pub struct Search<'a> {
    tables: &'a Tables,
    cells: Vec<GroupElement>,
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
    order: Vec<usize>,
    family: Vec<Option<Family>>,
    fixed: Vec<Option<Letter>>,
    kind_pin: Vec<Option<Kind>>,
    tuples: Vec<Tuple>,
    touching: Vec<Vec<usize>>,
    row_of: Vec<usize>,
    row_count: Vec<[usize; 3]>,
    assign: Vec<Option<Letter>>,
    pattern: Pattern,
    labels: Vec<Label>,
    relation: Vec<u8>,
    nodes: u64,
    max_nodes: u64,
    aborted: bool,
    zone_memo: HashMap<Vec<u8>, Option<Rc<ZoneShape>>>,
    kinds_only: bool,
    count_labels_at_leaves: bool,
    collected: Option<Vec<(Vec<(GroupElement, Kind)>, BigUint)>>,
}

fn family_index(f: Family) -> usize {
    match f {
        Family::Top => 0,
        Family::Middle => 1,
        Family::Bottom => 2,
    }
}

impl<'a> Search<'a> {
    /// A search over `support` with every cell free.
    pub fn new(tables: &'a Tables, support: &[GroupElement]) -> Self {
        let cells: Vec<GroupElement> = support.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let index: HashMap<GroupElement, usize> = cells.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        let at = |g: &GroupElement| index.get(g).copied().unwrap_or(NONE);
        let mut seen = BTreeSet::new();
        let mut tuples = Vec::new();
        let mut push = |kind: TableKind, members: Vec<usize>, tuples: &mut Vec<Tuple>| {
            if members.iter().filter(|&&m| m != NONE).count() >= 2 && seen.insert((kind, members.clone())) {
                tuples.push(Tuple { kind, members });
            }
        };
        for g in &cells {
            push(TableKind::H, vec![at(g), at(&g.mul_a(1))], &mut tuples);
            for parent in [*g, g.mul_t(-1)] {
                let first = parent.mul_t(1);
                let mut m = vec![at(&parent)];
                m.extend((0..g.n as i128).map(|c| at(&first.mul_a(c))));
                push(TableKind::V, m, &mut tuples);
            }
            let (r, l) = sheet_mates(g);
            push(TableKind::S, vec![at(g), at(&r), at(&l)], &mut tuples);
        }
        let mut touching = vec![Vec::new(); cells.len()];
        for (ti, t) in tuples.iter().enumerate() {
            for &m in &t.members {
                if m != NONE && !touching[m].contains(&ti) {
                    touching[m].push(ti);
                }
            }
        }
        let mut rows: HashMap<(i64, Dyadic), usize> = HashMap::new();
        let row_of: Vec<usize> = cells
            .iter()
            .map(|g| {
                let next = rows.len();
                *rows.entry(coset_key(g)).or_insert(next)
            })
            .collect();
        let n = cells.len();
        let mut labels = Vec::new();
        for a in 0..tables.sigma.size() {
            for i in 1..=tables.m {
                labels.push(Label::new(a, i));
            }
        }
        let relation = labels.iter().flat_map(|&p| labels.iter().map(move |&q| tables.label_bits(p, q))).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (cells[i].level(), cells[i].phi().0));
        Search {
            tables,
            class_of: (0..n).collect(),
            classes: (0..n).map(|i| vec![i]).collect(),
            order,
            family: vec![None; n],
            fixed: vec![None; n],
            kind_pin: vec![None; n],
            tuples,
            touching,
            row_count: vec![[0; 3]; rows.len()],
            row_of,
            assign: vec![None; n],
            pattern: Pattern::new(),
            labels,
            relation,
            nodes: 0,
            max_nodes: u64::MAX,
            aborted: false,
            zone_memo: HashMap::new(),
            kinds_only: false,
            count_labels_at_leaves: true,
            collected: None,
            cells,
        }
    }

    /// The support cells in canonical order.
    pub fn cells(&self) -> &[GroupElement] {
        &self.cells
    }

    /// Restricts a cell to one family.
    pub fn restrict_family(&mut self, g: &GroupElement, f: Family) {
        if let Some(i) = self.cells.iter().position(|c| c == g) {
            self.family[i] = Some(f);
        }
    }

    /// Pins a cell to a letter.
    pub fn fix(&mut self, g: &GroupElement, l: Letter) {
        if let Some(i) = self.cells.iter().position(|c| c == g) {
            self.fixed[i] = Some(l);
        }
    }

    /// Pins a cell to a kind, leaving its labels free.
    pub fn fix_kind(&mut self, g: &GroupElement, k: Kind) {
        if let Some(i) = self.cells.iter().position(|c| c == g) {
            self.kind_pin[i] = Some(k);
        }
    }

    /// Forces the cells of each group to carry equal letters.
    pub fn identify(&mut self, groups: &[Vec<GroupElement>]) {
        let index: HashMap<GroupElement, usize> = self.cells.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        for grp in groups {
            let ids: Vec<usize> = grp.iter().filter_map(|g| index.get(g).copied()).collect();
            for w in ids.windows(2) {
                let (a, b) = (self.class_of[w[0]], self.class_of[w[1]]);
                if a != b {
                    let moved = std::mem::take(&mut self.classes[b]);
                    for &c in &moved {
                        self.class_of[c] = a;
                    }
                    self.classes[a].extend(moved);
                }
            }
        }
    }

    /// Visits cells in the order of a seeded shuffle.
    pub fn shuffle_order(&mut self, seed: u64) {
        self.order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }

    /// Caps the number of search nodes.
    pub fn set_max_nodes(&mut self, max: u64) {
        self.max_nodes = max;
    }

    /// Search nodes visited so far.
    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    fn rel(&self, p: Label, q: Label) -> u8 {
        let m = self.tables.m;
        self.relation[(p.letter * m + p.index - 1) * self.labels.len() + q.letter * m + q.index - 1]
    }

    fn class_order(&self) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        self.order.iter().map(|&c| self.class_of[c]).filter(|k| seen.insert(*k)).collect()
    }

    fn tuple_cells(&self, t: &Tuple) -> Vec<Option<Letter>> {
        t.members.iter().map(|&m| if m == NONE { None } else { self.assign[m] }).collect()
    }

    fn tuple_ok(&self, t: &Tuple) -> bool {
        if self.kinds_only {
            return self.tuple_kinds_ok(t);
        }
        let cells = self.tuple_cells(t);
        let present = cells.iter().filter(|c| c.is_some()).count();
        match t.kind {
            TableKind::H if present < 2 => return true,
            TableKind::V if present < 2 => return true,
            TableKind::S if cells[0].is_none() || present < 2 => {
                if let (Some(x), true) = (cells[0], self.tables.n == 2) {
                    return sync_implication(&x, cells[1].as_ref(), cells[2].as_ref()).is_none();
                }
                return true;
            }
            _ => {}
        }
        if t.kind == TableKind::S && self.tables.n == 2 && sync_implication(cells[0].as_ref().unwrap(), cells[1].as_ref(), cells[2].as_ref()).is_some() {
            return false;
        }
        self.tables.check_tuple(t.kind, &cells).is_ok()
    }

    fn tuple_key(&self, t: &Tuple) -> Vec<Option<Kind>> {
        t.members.iter().map(|&m| if m == NONE { None } else { self.assign[m].map(|l| l.kind) }).collect()
    }

    /// True when the tuple's members take part in the checks of `check_pattern`.
    fn tuple_active(t: &Tuple, key: &[Option<Kind>]) -> bool {
        let present = key.iter().filter(|k| k.is_some()).count();
        present >= 2 && (t.kind != TableKind::S || key[0].is_some())
    }

    fn tuple_kinds_ok(&self, t: &Tuple) -> bool {
        let key = self.tuple_key(t);
        if t.kind == TableKind::S && self.tables.n == 2 {
            if let Some(x) = key[0] {
                if !sync_kinds(x, key[1], key[2]) {
                    return false;
                }
            }
        }
        !Self::tuple_active(t, &key) || self.tables.required(t.kind, &key).is_some()
    }

    fn set(&mut self, class: usize, l: Option<Letter>) {
        for &c in &self.classes[class] {
            let f = family_index(l.or(self.assign[c]).unwrap().kind.family());
            match l {
                Some(l) => {
                    self.row_count[self.row_of[c]][f] += 1;
                    self.pattern.cells.insert(self.cells[c], l);
                }
                None => {
                    self.row_count[self.row_of[c]][f] -= 1;
                    self.pattern.cells.remove(&self.cells[c]);
                }
            }
            self.assign[c] = l;
        }
    }

    fn consistent(&self, class: usize) -> bool {
        let mut done = BTreeSet::new();
        for &c in &self.classes[class] {
            let counts = self.row_count[self.row_of[c]];
            if counts.iter().filter(|&&x| x > 0).count() > 1 {
                return false;
            }
            for &ti in &self.touching[c] {
                if done.insert(ti) && !self.tuple_ok(&self.tuples[ti]) {
                    return false;
                }
            }
        }
        true
    }

    fn allowed_kinds(&self, class: usize) -> Vec<Kind> {
        let mut fam: Option<Family> = None;
        for &c in &self.classes[class] {
            let counts = self.row_count[self.row_of[c]];
            let row_fam = [Family::Top, Family::Middle, Family::Bottom].into_iter().find(|&f| counts[family_index(f)] > 0);
            for f in [self.family[c], row_fam].into_iter().flatten() {
                if fam.is_some_and(|g| g != f) {
                    return Vec::new();
                }
                fam = Some(f);
            }
        }
        let pin = self.classes[class].iter().find_map(|&c| self.kind_pin[c]);
        Kind::ALL.iter().copied().filter(|k| fam.is_none_or(|f| k.family() == f) && pin.is_none_or(|p| p == *k)).collect()
    }

    /// Labels allowed in each slot by the pairwise requirements towards
    /// assigned neighbours, or `None` when the kind never occurs next to them.
    fn domains(&self, class: usize, kind: Kind) -> Option<[Vec<Label>; 2]> {
        // (slot, other label, bits, true when the relation points from the slot).
        let mut cons: Vec<(usize, Label, u8, bool)> = Vec::new();
        let members: BTreeSet<usize> = self.classes[class].iter().copied().collect();
        let mut done = BTreeSet::new();
        for &c in &self.classes[class] {
            for &ti in &self.touching[c] {
                if !done.insert(ti) {
                    continue;
                }
                let t = &self.tuples[ti];
                let key: Vec<Option<Kind>> = t
                    .members
                    .iter()
                    .map(|&m| if members.contains(&m) { Some(kind) } else if m == NONE { None } else { self.assign[m].map(|l| l.kind) })
                    .collect();
                let present = key.iter().filter(|k| k.is_some()).count();
                if present < 2 || (t.kind == TableKind::S && key[0].is_none()) {
                    continue;
                }
                let req = self.tables.required(t.kind, &key)?;
                let slots = slots_of(&key);
                for &(i, j, bits) in req.iter() {
                    let (pi, si) = slots[i];
                    let (pj, sj) = slots[j];
                    let (mi, mj) = (t.members[pi], t.members[pj]);
                    match (members.contains(&mi), members.contains(&mj)) {
                        (true, false) => {
                            let lab = self.assign[mj].unwrap().slot(sj).unwrap();
                            cons.push((usize::from(si == Slot::Secondary), lab, bits, true));
                        }
                        (false, true) => {
                            let lab = self.assign[mi].unwrap().slot(si).unwrap();
                            cons.push((usize::from(sj == Slot::Secondary), lab, bits, false));
                        }
                        _ => {}
                    }
                }
            }
        }
        let filter = |slot: usize| -> Vec<Label> {
            let mine: Vec<&(usize, Label, u8, bool)> = cons.iter().filter(|c| c.0 == slot).collect();
            if let Some(&&(_, lab, _, _)) = mine.iter().find(|c| c.2 & EQ != 0) {
                return vec![lab];
            }
            self.labels
                .iter()
                .copied()
                .filter(|&x| {
                    mine.iter().all(|&&(_, lab, bits, out)| {
                        let have = if out { self.rel(x, lab) } else { self.rel(lab, x) };
                        have & bits == bits
                    })
                })
                .collect()
        };
        let prim = filter(0);
        let sec = if kind.has_secondary() { filter(1) } else { Vec::new() };
        Some([prim, sec])
    }

    fn candidates(&self, class: usize) -> Vec<Letter> {
        if let Some(l) = self.classes[class].iter().find_map(|&c| self.fixed[c]) {
            return vec![l];
        }
        if self.kinds_only {
            let dummy = Label::new(0, 1);
            return self
                .allowed_kinds(class)
                .into_iter()
                .map(|k| if k.has_secondary() { Letter::double(k, dummy, dummy) } else { Letter::single(k, dummy) })
                .collect();
        }
        let mut out = Vec::new();
        for kind in self.allowed_kinds(class) {
            let Some([prim, sec]) = self.domains(class, kind) else { continue };
            if kind.has_secondary() {
                for &b in &sec {
                    for &a in &prim {
                        out.push(Letter::double(kind, b, a));
                    }
                }
            } else {
                out.extend(prim.iter().map(|&a| Letter::single(kind, a)));
            }
        }
        out
    }

    /// Zone shapes depend only on kinds, so they are memoized on the kinds.
    fn zone_shape(&mut self) -> Option<Rc<ZoneShape>> {
        let sig: Vec<u8> = self.assign.iter().map(|l| l.unwrap().kind.index() as u8).collect();
        if let Some(z) = self.zone_memo.get(&sig) {
            return z.clone();
        }
        let z = self.zone_shape_uncached().map(Rc::new);
        self.zone_memo.insert(sig, z.clone());
        z
    }

    fn zone_shape_uncached(&self) -> Option<ZoneShape> {
        let t = self.tables;
        let (lo, hi) = t.height_range;
        let index: HashMap<GroupElement, usize> = self.cells.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        let mut out = Vec::new();
        for z in zones(&self.pattern) {
            let h = z.top - z.bottom;
            let height = if z.closed { (lo..=hi).contains(&h) } else { h <= hi };
            if !height {
                return None;
            }
            let mut mask = 0u64;
            for (a, &(wlo, whi)) in t.width_range.iter().enumerate() {
                let fits = z.runs.iter().all(|&(count, complete)| {
                    let w = count as i64 - 1;
                    if complete {
                        (wlo..=whi).contains(&w)
                    } else {
                        w <= whi
                    }
                });
                if fits {
                    mask |= 1 << a;
                }
            }
            if mask == 0 {
                return None;
            }
            let nodes = z.nodes.iter().map(|&(g, s)| slot_id(index[&g], s)).collect();
            out.push((nodes, mask));
        }
        Some(out)
    }

    fn zones_ok(&mut self) -> bool {
        let Some(shape) = self.zone_shape() else { return false };
        shape.iter().all(|(nodes, mask)| {
            let (c, s) = (nodes[0] / 2, if nodes[0] % 2 == 0 { Slot::Primary } else { Slot::Secondary });
            let letter = self.assign[c].unwrap().slot(s).unwrap().letter;
            mask & (1 << letter) != 0
        })
    }

    fn dfs(&mut self, order: &[usize], depth: usize, visit: &mut dyn FnMut(&Pattern) -> bool) -> bool {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.aborted = true;
            return false;
        }
        if depth == order.len() {
            if self.zones_ok() {
                return visit(&self.pattern);
            }
            return true;
        }
        let class = order[depth];
        for l in self.candidates(class) {
            self.set(class, Some(l));
            let go = if self.consistent(class) { self.dfs(order, depth + 1, visit) } else { true };
            self.set(class, None);
            if !go {
                return false;
            }
        }
        true
    }

    /// Runs the search, calling `visit` on every admissible assignment until
    /// it returns false. Returns true when the whole tree was explored.
    pub fn run(&mut self, visit: &mut dyn FnMut(&Pattern) -> bool) -> bool {
        let order = self.class_order();
        self.aborted = false;
        let complete = self.dfs(&order, 0, visit);
        complete && !self.aborted
    }
}

type ZoneShape = Vec<(Vec<usize>, u64)>;

fn slot_id(cell: usize, s: Slot) -> usize {
    2 * cell + usize::from(s == Slot::Secondary)
}

/// Kind-level part of the synchronization implications.
fn sync_kinds(x: Kind, right: Option<Kind>, left: Option<Kind>) -> bool {
    match x {
        Kind::T1 if right.is_some_and(|r| r != Kind::T2) || left.is_some_and(|l| l != Kind::T4) => return false,
        Kind::B1 | Kind::B3 => {
            if let (Some(r), Some(l)) = (right, left) {
                if r != x && l != x {
                    return false;
                }
            }
        }
        _ => {}
    }
    left.is_none_or(|l| (x == Kind::M1) == (l == Kind::M2))
}

/// Label constraints of one kind assignment.
struct LabelProblem {
    slots: Vec<usize>,
    eq: Vec<(usize, usize)>,
    rel: Vec<(usize, usize, u8)>,
    either: Vec<[(usize, usize); 2]>,
    fixed: Vec<(usize, Label)>,
    letters: Vec<(usize, u64)>,
}

impl<'a> Search<'a> {
    fn label_problem(&mut self) -> Option<LabelProblem> {
        let shape = self.zone_shape()?;
        let mut lp = LabelProblem { slots: Vec::new(), eq: Vec::new(), rel: Vec::new(), either: Vec::new(), fixed: Vec::new(), letters: Vec::new() };
        for (c, l) in self.assign.iter().enumerate() {
            let l = l.unwrap();
            lp.slots.push(slot_id(c, Slot::Primary));
            if l.kind.has_secondary() {
                lp.slots.push(slot_id(c, Slot::Secondary));
            }
            if let Some(f) = self.fixed[c] {
                lp.fixed.push((slot_id(c, Slot::Primary), f.primary));
                if let Some(sec) = f.secondary {
                    lp.fixed.push((slot_id(c, Slot::Secondary), sec));
                }
            }
        }
        for class in &self.classes {
            for w in class.windows(2) {
                lp.eq.push((slot_id(w[0], Slot::Primary), slot_id(w[1], Slot::Primary)));
                if self.assign[w[0]].unwrap().kind.has_secondary() {
                    lp.eq.push((slot_id(w[0], Slot::Secondary), slot_id(w[1], Slot::Secondary)));
                }
            }
        }
        for (nodes, mask) in shape.iter() {
            lp.letters.push((nodes[0], *mask));
        }
        for t in &self.tuples {
            let key = self.tuple_key(t);
            if t.kind == TableKind::S && self.tables.n == 2 {
                if let Some(x) = key[0] {
                    let g = t.members[0];
                    let prim = |m: usize| slot_id(m, Slot::Primary);
                    let (r, l) = (t.members[1], t.members[2]);
                    match x {
                        Kind::T1 => {
                            if key[1].is_some() {
                                lp.eq.push((prim(g), prim(r)));
                            }
                            if key[2].is_some() {
                                lp.eq.push((slot_id(g, Slot::Secondary), prim(l)));
                            }
                        }
                        Kind::B1 | Kind::B3 if key[1].is_some() && key[2].is_some() => match (key[1] == Some(x), key[2] == Some(x)) {
                            (true, true) => lp.either.push([(prim(g), prim(r)), (prim(g), prim(l))]),
                            (true, false) => lp.eq.push((prim(g), prim(r))),
                            _ => lp.eq.push((prim(g), prim(l))),
                        },
                        _ => {}
                    }
                    if x == Kind::M1 && key[2].is_some() {
                        lp.eq.push((prim(g), prim(l)));
                    }
                }
            }
            if !Self::tuple_active(t, &key) {
                continue;
            }
            let req = self.tables.required(t.kind, &key)?;
            let slots = slots_of(&key);
            for &(i, j, bits) in req.iter() {
                let p = slot_id(t.members[slots[i].0], slots[i].1);
                let q = slot_id(t.members[slots[j].0], slots[j].1);
                if bits & EQ != 0 {
                    lp.eq.push((p, q));
                }
                if bits & !EQ != 0 {
                    lp.rel.push((p, q, bits & !EQ));
                }
            }
        }
        Some(lp)
    }

    fn count_labels(&self, lp: &LabelProblem) -> BigUint {
        fn go(s: &Search, lp: &LabelProblem, extra: &mut Vec<(usize, usize)>, k: usize) -> (BigUint, BigUint) {
            // Returns (positive, negative) parts of the inclusion-exclusion sum.
            if k == lp.either.len() {
                return (s.count_labels_plain(lp, extra), BigUint::zero());
            }
            let [x, y] = lp.either[k];
            let mut pos = BigUint::zero();
            let mut neg = BigUint::zero();
            for (choice, sign) in [(vec![x], true), (vec![y], true), (vec![x, y], false)] {
                let before = extra.len();
                extra.extend(choice);
                let (p, n) = go(s, lp, extra, k + 1);
                extra.truncate(before);
                if sign {
                    pos += p;
                    neg += n;
                } else {
                    pos += n;
                    neg += p;
                }
            }
            (pos, neg)
        }
        let (p, n) = go(self, lp, &mut Vec::new(), 0);
        p - n
    }

    fn count_labels_plain(&self, lp: &LabelProblem, extra: &[(usize, usize)]) -> BigUint {
        let size = 2 * self.cells.len();
        let mut uf: Vec<usize> = (0..size).collect();
        fn find(uf: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while uf[r] != r {
                r = uf[r];
            }
            uf[x] = r;
            r
        }
        for &(p, q) in lp.eq.iter().chain(extra) {
            let (a, b) = (find(&mut uf, p), find(&mut uf, q));
            uf[a] = b;
        }
        let labels = &self.labels;
        let nl = labels.len();
        let mut roots: Vec<usize> = lp.slots.iter().map(|&x| find(&mut uf, x)).collect();
        roots.sort();
        roots.dedup();
        let var: HashMap<usize, usize> = roots.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        let mut domain = vec![vec![true; nl]; roots.len()];
        for &(slot, lab) in &lp.fixed {
            let v = var[&find(&mut uf, slot)];
            for (i, d) in domain[v].iter_mut().enumerate() {
                *d &= labels[i] == lab;
            }
        }
        for &(slot, mask) in &lp.letters {
            let v = var[&find(&mut uf, slot)];
            for (i, d) in domain[v].iter_mut().enumerate() {
                *d &= mask & (1 << labels[i].letter) != 0;
            }
        }
        // Banned label pairs per ordered variable pair.
        let mut pairs: BTreeMap<(usize, usize), Vec<u8>> = BTreeMap::new();
        for &(p, q, bits) in &lp.rel {
            let (a, b) = (var[&find(&mut uf, p)], var[&find(&mut uf, q)]);
            if a == b {
                for (i, d) in domain[a].iter_mut().enumerate() {
                    *d &= self.relation[i * nl + i] & bits == bits;
                }
            } else {
                let (key, flip) = if a < b { ((a, b), false) } else { ((b, a), true) };
                let entry = pairs.entry(key).or_insert_with(|| vec![0; nl * nl]);
                for i in 0..nl {
                    for j in 0..nl {
                        let r = if flip { self.relation[j * nl + i] } else { self.relation[i * nl + j] };
                        if r & bits != bits {
                            entry[i * nl + j] = 1;
                        }
                    }
                }
            }
        }
        let mut factors: Vec<Factor> = domain
            .iter()
            .enumerate()
            .map(|(v, d)| Factor { vars: vec![v], table: (0..nl).filter(|&i| d[i]).map(|i| (vec![i as u8], BigUint::one())).collect() })
            .collect();
        for ((a, b), banned) in pairs {
            let table = (0..nl)
                .flat_map(|i| (0..nl).map(move |j| (i, j)))
                .filter(|&(i, j)| banned[i * nl + j] == 0 && domain[a][i] && domain[b][j])
                .map(|(i, j)| (vec![i as u8, j as u8], BigUint::one()))
                .collect();
            factors.push(Factor { vars: vec![a, b], table });
        }
        eliminate(factors, roots.len())
    }

    /// Exact count of admissible patterns: kinds are enumerated, labels are
    /// counted per kind assignment. Stops after `max_leaves` kind assignments.
    pub fn count_exact(&mut self, max_leaves: u64) -> (BigUint, u64, bool) {
        self.count_with(max_leaves, true)
    }

    /// Every kind assignment admitting labels, with its number of label
    /// completions. The flag is false when `max_leaves` or the node cap cut
    /// the search short.
    pub fn kind_completions(&mut self, max_leaves: u64) -> (Vec<(Vec<(GroupElement, Kind)>, BigUint)>, bool) {
        self.collected = Some(Vec::new());
        let (_, _, complete) = self.count_with(max_leaves, true);
        (self.collected.take().unwrap_or_default(), complete)
    }

    /// Number of kind assignments passing the kind-level rules.
    pub fn count_kinds(&mut self, max_leaves: u64) -> (u64, bool) {
        let (_, leaves, done) = self.count_with(max_leaves, false);
        (leaves, done)
    }

    fn count_with(&mut self, max_leaves: u64, labels: bool) -> (BigUint, u64, bool) {
        self.kinds_only = true;
        self.count_labels_at_leaves = labels;
        let mut total = BigUint::zero();
        let mut leaves = 0u64;
        let order = self.class_order();
        let complete = self.dfs_kinds(&order, 0, &mut total, &mut leaves, max_leaves);
        self.kinds_only = false;
        (total, leaves, complete && !self.aborted)
    }

    /// Finds one kind assignment whose labels can be completed, choosing the
    /// most constrained class first. Returns the kinds found, or `None`.
    pub fn find_kinds(&mut self) -> (Option<Vec<(GroupElement, Kind)>>, bool) {
        self.kinds_only = true;
        self.aborted = false;
        let mut open: Vec<usize> = self.class_order();
        let found = self.dfs_mrv(&mut open);
        self.kinds_only = false;
        (found, !self.aborted)
    }

    fn viable(&mut self, class: usize) -> Vec<Letter> {
        let mut out = Vec::new();
        for l in self.candidates(class) {
            self.set(class, Some(l));
            if self.consistent(class) {
                out.push(l);
            }
            self.set(class, None);
        }
        out
    }

    fn dfs_mrv(&mut self, open: &mut Vec<usize>) -> Option<Vec<(GroupElement, Kind)>> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.aborted = true;
            return None;
        }
        if open.is_empty() {
            let lp = self.label_problem()?;
            if self.count_labels(&lp).is_zero() {
                return None;
            }
            return Some(self.cells.iter().zip(&self.assign).map(|(g, l)| (*g, l.unwrap().kind)).collect());
        }
        let mut best: Option<(usize, Vec<Letter>)> = None;
        for pos in 0..open.len() {
            let v = self.viable(open[pos]);
            if v.is_empty() {
                return None;
            }
            if best.as_ref().is_none_or(|b| v.len() < b.1.len()) {
                best = Some((pos, v));
            }
        }
        let (pos, cands) = best.unwrap();
        let class = open.remove(pos);
        let mut result = None;
        for l in cands {
            self.set(class, Some(l));
            result = self.dfs_mrv(open);
            self.set(class, None);
            if result.is_some() || self.aborted {
                break;
            }
        }
        open.insert(pos, class);
        result
    }

    fn dfs_kinds(&mut self, order: &[usize], depth: usize, total: &mut BigUint, leaves: &mut u64, max_leaves: u64) -> bool {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.aborted = true;
            return false;
        }
        if depth == order.len() {
            if !self.count_labels_at_leaves {
                *leaves += 1;
                return *leaves < max_leaves;
            }
            if let Some(lp) = self.label_problem() {
                let c = self.count_labels(&lp);
                if !c.is_zero() {
                    if let Some(out) = self.collected.as_mut() {
                        out.push((self.cells.iter().zip(&self.assign).map(|(g, l)| (*g, l.unwrap().kind)).collect(), c.clone()));
                    }
                }
                *total += c;
            }
            *leaves += 1;
            return *leaves < max_leaves;
        }
        let class = order[depth];
        for l in self.candidates(class) {
            self.set(class, Some(l));
            let go = if self.consistent(class) { self.dfs_kinds(order, depth + 1, total, leaves, max_leaves) } else { true };
            self.set(class, None);
            if !go {
                return false;
            }
        }
        true
    }
}

/// A sparse table over label indices of a few variables.
struct Factor {
    vars: Vec<usize>,
    table: HashMap<Vec<u8>, BigUint>,
}

fn join(a: &Factor, b: &Factor) -> Factor {
    let mut vars = a.vars.clone();
    for v in &b.vars {
        if !vars.contains(v) {
            vars.push(*v);
        }
    }
    let pos_a: Vec<usize> = a.vars.iter().map(|v| vars.iter().position(|w| w == v).unwrap()).collect();
    let pos_b: Vec<usize> = b.vars.iter().map(|v| vars.iter().position(|w| w == v).unwrap()).collect();
    let shared: Vec<(usize, usize)> = a.vars.iter().enumerate().filter_map(|(i, v)| b.vars.iter().position(|w| w == v).map(|j| (i, j))).collect();
    let mut index: HashMap<Vec<u8>, Vec<(&Vec<u8>, &BigUint)>> = HashMap::new();
    for (k, val) in &b.table {
        index.entry(shared.iter().map(|&(_, j)| k[j]).collect()).or_default().push((k, val));
    }
    let mut table = HashMap::new();
    for (ka, va) in &a.table {
        let probe: Vec<u8> = shared.iter().map(|&(i, _)| ka[i]).collect();
        let Some(matches) = index.get(&probe) else { continue };
        for (kb, vb) in matches {
            let mut key = vec![0u8; vars.len()];
            for (i, &p) in pos_a.iter().enumerate() {
                key[p] = ka[i];
            }
            for (j, &p) in pos_b.iter().enumerate() {
                key[p] = kb[j];
            }
            table.insert(key, va * *vb);
        }
    }
    Factor { vars, table }
}

fn sum_out(f: Factor, v: usize) -> Factor {
    let p = f.vars.iter().position(|&w| w == v).unwrap();
    let vars: Vec<usize> = f.vars.iter().copied().filter(|&w| w != v).collect();
    let mut table: HashMap<Vec<u8>, BigUint> = HashMap::new();
    for (mut k, val) in f.table {
        k.remove(p);
        *table.entry(k).or_insert_with(BigUint::zero) += val;
    }
    Factor { vars, table }
}

/// Sums the product of the factors over all variables, eliminating the
/// variable with the fewest neighbours first.
fn eliminate(mut factors: Vec<Factor>, nvars: usize) -> BigUint {
    let mut alive: BTreeSet<usize> = (0..nvars).collect();
    while let Some(&v) = alive.iter().min_by_key(|&&v| {
        let mut nb = BTreeSet::new();
        for f in factors.iter().filter(|f| f.vars.contains(&v)) {
            nb.extend(f.vars.iter().copied());
        }
        nb.len()
    }) {
        alive.remove(&v);
        let (mine, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.vars.contains(&v));
        factors = rest;
        let mut it = mine.into_iter();
        let Some(first) = it.next() else { continue };
        let joined = it.fold(first, |acc, f| join(&acc, &f));
        let reduced = sum_out(joined, v);
        if reduced.table.is_empty() {
            return BigUint::zero();
        }
        factors.push(reduced);
    }
    factors.iter().fold(BigUint::one(), |acc, f| acc * f.table.get(&Vec::new()).cloned().unwrap_or_else(BigUint::zero))
}

/// A count of admissible patterns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Count {
    /// Patterns found.
    pub count: u64,
    /// False when the cap stopped the search, making `count` a lower bound.
    pub exact: bool,
}

/// Counts the locally admissible patterns on `support`, stopping at `cap`.
pub fn enumerate_admissible(support: &[GroupElement], tables: &Tables, cap: u64) -> Count {
    enumerate_admissible_ordered(support, tables, cap, None)
}

/// Like [`enumerate_admissible`], with the variable order optionally
/// shuffled by a seed.
pub fn enumerate_admissible_ordered(support: &[GroupElement], tables: &Tables, cap: u64, shuffle: Option<u64>) -> Count {
    let mut s = Search::new(tables, support);
    if let Some(seed) = shuffle {
        s.shuffle_order(seed);
    }
    let mut count = 0u64;
    let complete = s.run(&mut |_| {
        count += 1;
        count < cap
    });
    Count { count, exact: complete && count < cap }
}

/// The four boundary strips of `R_{k,ℓ}` used in the zero-entropy argument,
/// as `(bottom, left, right, top)` element counts.
pub fn boundary_strips(k: u32, ell: u32, n: u32) -> (usize, usize, usize, usize) {
    let r = rectangle(k, ell, n);
    let nl = (n as i128).pow(ell.saturating_sub(1));
    let (mut b, mut l, mut rt, mut t) = (0, 0, 0, 0);
    for g in &r {
        // Elements are t^ℓ a^i t^{-j}; recover i and j from Φ.
        let (x, y) = g.phi();
        let i_idx = x.scale(ell as i64).numerator();
        let j_idx = y + ell as i64;
        if j_idx <= k as i64 {
            b += 1;
        }
        if i_idx < nl {
            l += 1;
        }
        if i_idx >= k as i128 * nl && i_idx < (k as i128 + 1) * nl {
            rt += 1;
        }
        if j_idx >= ell as i64 - k as i64 {
            t += 1;
        }
    }
    (b, l, rt, t)
}

/// One row of the entropy table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyRow {
    /// Rectangle width parameter.
    pub k: u32,
    /// Rectangle height parameter.
    pub ell: u32,
    /// `|R_{k,ℓ}|`.
    pub size: usize,
    /// Admissible patterns counted, in decimal.
    pub count: String,
    /// True when `count` is exact, otherwise it is a lower bound.
    pub exact: bool,
    /// Kind assignments visited.
    pub leaves: u64,
    /// `log₂(count) / |R_{k,ℓ}|`.
    pub ratio: f64,
    /// Strip-counted boundary size N.
    pub boundary: usize,
    /// Whether `count ≤ |ℛ|^N`; `None` when a lower bound cannot decide.
    pub bound_holds: Option<bool>,
}

/// `log₂ x` for a positive big integer.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_u64().map_or(0.0, |v| (v as f64).log2());
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + shift as f64
}

/// Entropy estimates over rectangles, counting exactly until `max_leaves`
/// kind assignments have been visited for a rectangle.
pub fn entropy_table(tables: &Tables, pairs: &[(u32, u32)], max_leaves: u64) -> Vec<EntropyRow> {
    let alphabet = crate::alphabet::alphabet_size(tables.sigma.size(), tables.m);
    pairs
        .iter()
        .map(|&(k, ell)| {
            let support = rectangle(k, ell, tables.n);
            let mut search = Search::new(tables, &support);
            let (count, leaves, exact) = search.count_exact(max_leaves);
            let (b, l, r, t) = boundary_strips(k, ell, tables.n);
            let boundary = b + l + r + t;
            let bound = BigUint::from(alphabet).pow(boundary as u32);
            let bound_holds = if exact {
                Some(count <= bound)
            } else if count > bound {
                Some(false)
            } else {
                None
            };
            EntropyRow {
                k,
                ell,
                size: support.len(),
                ratio: if count.is_zero() { 0.0 } else { log2_big(&count) / support.len() as f64 },
                count: count.to_string(),
                exact,
                leaves,
                boundary,
                bound_holds,
            }
        })
        .collect()
}

/// The bottom pattern `p_{ℓ,a,i}`: `b1`, then `b2` repeated, then `b3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BottomPattern {
    /// Number of cells, at least 2.
    pub ell: u32,
    /// Zone letter.
    pub letter: usize,
    /// Zone index.
    pub index: usize,
}

impl BottomPattern {
    /// The pattern on `{1, a, …, a^{ℓ−1}}`.
    pub fn pattern(&self, n: u32) -> Result<Pattern> {
        if self.ell < 2 {
            return Err(Error::Input("bottom pattern needs ℓ ≥ 2".into()));
        }
        let lab = Label::new(self.letter, self.index);
        let id = GroupElement::identity(n);
        let mut p = Pattern::new();
        for i in 0..self.ell {
            let kind = if i == 0 {
                Kind::B1
            } else if i + 1 == self.ell {
                Kind::B3
            } else {
                Kind::B2
            };
            p.cells.insert(id.mul_a(i as i128), Letter::single(kind, lab));
        }
        Ok(p)
    }
}

/// Result of completing the cone above a bottom pattern.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConeCompletion {
    /// The bottom pattern.
    pub bottom: BottomPattern,
    /// Heights `m` with at least one completion.
    pub heights: Vec<u32>,
    /// Distinct completions, projected to kinds and the zone's own labels.
    pub completions: Vec<(u32, Vec<(GroupElement, Kind, Option<Label>)>)>,
    /// Raw completions enumerated, foreign labels included.
    pub raw: u64,
    /// False when a search hit its node cap.
    pub exhaustive: bool,
    /// Height predicted by the bottom-up width recursion.
    pub fast_height: Option<u32>,
    /// Zone top widths per sheet from the width recursion.
    pub fast_widths: Vec<i64>,
}

impl ConeCompletion {
    /// Exactly one projected completion.
    pub fn unique(&self) -> bool {
        self.exhaustive && self.completions.len() == 1
    }

    /// The exhaustive height agrees with the fast path.
    pub fn fast_path_agrees(&self) -> bool {
        self.heights.len() == 1 && self.fast_height == Some(self.heights[0])
    }
}

/// Projection of a cone completion onto kinds and the labels of the zone
/// grown from the bottom pattern; labels of neighbouring zones are dropped.
fn project_cone(p: &Pattern, zone_label: Label) -> Vec<(GroupElement, Kind, Option<Label>)> {
    let bottom = *p.cells.keys().next().unwrap();
    let zs = zones(p);
    let own = zs.iter().find(|z| z.label == zone_label && z.nodes.iter().any(|&(g, s)| g.level() == bottom.level() && s == Slot::Primary));
    p.cells
        .iter()
        .map(|(g, l)| {
            let lab = own.and_then(|z| z.nodes.iter().find(|(h, _)| h == g).map(|&(_, s)| l.slot(s).unwrap()));
            (*g, l.kind, lab)
        })
        .collect()
}

/// Projection of a kind assignment: the zone through the bottom row carries
/// `zone_label`, every other cell keeps its kind only.
fn project_kinds(kinds: &[(GroupElement, Kind)], zone_label: Label) -> Vec<(GroupElement, Kind, Option<Label>)> {
    let mut p = Pattern::new();
    for &(g, k) in kinds {
        let l = if k.has_secondary() { Letter::double(k, zone_label, zone_label) } else { Letter::single(k, zone_label) };
        p.cells.insert(g, l);
    }
    project_cone(&p, zone_label)
}

/// The bottom-up width recursion for base 2: a zone `x` cells wide yields
/// sheets `x/2` and `x/2 + 1` wide when `x` is even and two sheets `⌈x/2⌉`
/// wide when `x` is odd, until every width lies in `[w_a − 1, 2w_a − 1]`.
/// Returns the number of levels climbed and the terminal widths.
pub fn width_recursion(ell: i64, w_a: i64, max_levels: u32) -> Option<(u32, Vec<i64>)> {
    let band = |x: i64| x >= w_a - 1 && x <= 2 * w_a - 1;
    let mut widths = vec![ell];
    for m in 0..=max_levels {
        if widths.iter().all(|&x| band(x)) {
            return Some((m, widths));
        }
        let mut next: Vec<i64> = widths.iter().flat_map(|&x| if x % 2 == 0 { [x / 2, x / 2 + 1] } else { [(x + 1) / 2; 2] }).collect();
        next.sort();
        next.dedup();
        widths = next;
    }
    None
}

/// Completes the cone above `p_{ℓ,a,i}` for every height `m ≤ h_box + 1`,
/// rows `1..m` forced to `ℳ` and row `m` to `𝒯`.
pub fn cone_completion(bp: BottomPattern, tables: &Tables, eigen: &EigenData, max_nodes: u64) -> Result<ConeCompletion> {
    let n = tables.n;
    let bottom = bp.pattern(n)?;
    let id = GroupElement::identity(n);
    let zone_label = Label::new(bp.letter, bp.index);
    let h_box = eigen.h_box_base(n) as u32;
    let mut heights = Vec::new();
    let mut completions = Vec::new();
    let mut raw = 0u64;
    let mut exhaustive = true;
    for m in 1..=h_box + 1 {
        let support = cone(&id, bp.ell, m);
        let mut s = Search::new(tables, &support);
        s.set_max_nodes(max_nodes);
        for (g, l) in &bottom.cells {
            s.fix(g, *l);
        }
        for g in &support {
            let lvl = g.level();
            if lvl > 0 {
                s.restrict_family(g, if lvl as u32 == m { Family::Top } else { Family::Middle });
            }
        }
        let (leaves, complete) = s.kind_completions(u64::MAX);
        let mut found: BTreeSet<Vec<(GroupElement, Kind, Option<Label>)>> = BTreeSet::new();
        for (kinds, count) in leaves {
            raw = raw.saturating_add(count.to_u64().unwrap_or(u64::MAX));
            found.insert(project_kinds(&kinds, zone_label));
        }
        exhaustive &= complete;
        if !found.is_empty() {
            heights.push(m);
        }
        completions.extend(found.into_iter().map(|c| (m, c)));
    }
    let w_a = eigen.w[bp.letter];
    let fast = if n == 2 { width_recursion(bp.ell as i64, w_a, h_box + 1) } else { None };
    Ok(ConeCompletion {
        bottom: bp,
        heights,
        completions,
        raw,
        exhaustive,
        fast_height: fast.as_ref().map(|f| f.0),
        fast_widths: fast.map(|f| f.1).unwrap_or_default(),
    })
}

/// The admissible-ℓ range of bottom patterns for one letter.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BottomRange {
    /// Letter.
    pub letter: usize,
    /// Closed-form range `[2^{h−1}(w_a−3)+2, 2^h(2w_a−1)]`.
    pub formula: (i64, i64),
    /// Smallest and largest ℓ for which some completion exists.
    pub oracle: Option<(u32, u32)>,
    /// Every ℓ found admissible.
    pub admissible: Vec<u32>,
    /// Largest ℓ tried.
    pub bound: u32,
}

impl BottomRange {
    /// The two ranges coincide.
    pub fn agrees(&self) -> bool {
        self.oracle.is_some_and(|(a, b)| (a as i64, b as i64) == self.formula)
    }
}

/// The closed-form ℓ range for `h` and `w_a`.
pub fn bottom_range_formula(h: i64, w_a: i64) -> (i64, i64) {
    let p = |e: i64| if e >= 0 { 1i64 << e } else { 0 };
    (p(h - 1) * (w_a - 3) + 2, p(h) * (2 * w_a - 1))
}

/// Compares the closed-form range with completion search for ℓ up to `bound`,
/// using index 1 of `letter`.
pub fn admissible_bottom_range(letter: usize, tables: &Tables, eigen: &EigenData, bound: u32, max_nodes: u64) -> Result<BottomRange> {
    let h = eigen.h_rule_base(tables.n);
    let formula = bottom_range_formula(h, eigen.w[letter]);
    let mut admissible = Vec::new();
    for ell in 2..=bound {
        let c = cone_completion(BottomPattern { ell, letter, index: 1 }, tables, eigen, max_nodes)?;
        if !c.heights.is_empty() {
            admissible.push(ell);
        }
    }
    let oracle = admissible.first().map(|&a| (a, *admissible.last().unwrap()));
    Ok(BottomRange { letter, formula, oracle, admissible, bound })
}

/// Outcome of a periodicity probe.
#[derive(Clone, Debug)]
pub enum ProbeOutcome {
    /// No invariant admissible pattern: a finite certificate of aperiodicity for this period.
    Contradiction {
        /// Search nodes explored.
        nodes: u64,
    },
    /// An invariant admissible pattern exists at this radius.
    Consistent {
        /// The pattern found.
        pattern: Pattern,
    },
    /// The node budget ran out.
    Inconclusive {
        /// Search nodes explored.
        nodes: u64,
    },
}

/// Classes of `R_{k,ℓ}` under `h ~ g·h`.
pub fn period_classes(g: &GroupElement, support: &[GroupElement]) -> Vec<Vec<GroupElement>> {
    let set: BTreeSet<GroupElement> = support.iter().copied().collect();
    let idx: HashMap<GroupElement, usize> = support.iter().enumerate().map(|(i, h)| (*h, i)).collect();
    let mut parent: Vec<usize> = (0..support.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for h in support {
        let gh = g.mul(h);
        if set.contains(&gh) {
            let (a, b) = (find(&mut parent, idx[h]), find(&mut parent, idx[&gh]));
            parent[a] = b;
        }
    }
    let mut groups: BTreeMap<usize, Vec<GroupElement>> = BTreeMap::new();
    for (i, h) in support.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(*h);
    }
    groups.into_values().collect()
}

/// Searches for an admissible pattern on `R_{k,ℓ}` invariant under left
/// translation by `g`: kinds first with the most constrained class chosen
/// next, then labels for the first kind assignment that admits them.
pub fn periodicity_probe(tables: &Tables, g: &GroupElement, k: u32, ell: u32, max_nodes: u64) -> Result<ProbeOutcome> {
    if g.is_identity() {
        return Err(Error::Input("the period must not be the identity".into()));
    }
    let support = rectangle(k, ell, tables.n);
    let classes = period_classes(g, &support);
    let mut s = Search::new(tables, &support);
    s.identify(&classes);
    s.set_max_nodes(max_nodes);
    let (found, complete) = s.find_kinds();
    let nodes = s.nodes();
    let Some(kinds) = found else {
        return Ok(if complete { ProbeOutcome::Contradiction { nodes } } else { ProbeOutcome::Inconclusive { nodes } });
    };
    let mut w = Search::new(tables, &support);
    w.identify(&classes);
    for (h, kind) in &kinds {
        w.fix_kind(h, *kind);
    }
    w.set_max_nodes(max_nodes);
    let mut pattern = None;
    w.run(&mut |p| {
        pattern = Some(p.clone());
        false
    });
    Ok(match pattern {
        Some(pattern) => ProbeOutcome::Consistent { pattern },
        None => ProbeOutcome::Inconclusive { nodes: nodes + w.nodes() },
    })
}

/// Non-identity normal forms `t^i a^j t^{-k}` with `|i| + |j| + |k| ≤ budget`.
pub fn small_periods(budget: u32, n: u32) -> Vec<GroupElement> {
    let mut out = Vec::new();
    for i in 0..=budget {
        for k in 0..=budget - i {
            let rest = (budget - i - k) as i128;
            for j in -rest..=rest {
                if let Ok(g) = GroupElement::new(i, j, k, n) {
                    if !g.is_identity() {
                        out.push(g);
                    }
                }
            }
        }
    }
    out
}

/// Row heights of a tiling with row height `L`, measured in unit levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightSequence {
    /// Offset `y₀`.
    pub offset: f64,
    /// Row height `L`.
    pub row_height: f64,
    /// Unit intervals met by the interior of row r.
    pub entries: Vec<i64>,
    /// Frequency of each value.
    pub frequencies: BTreeMap<i64, f64>,
}

fn snap(x: f64) -> f64 {
    if (x - x.round()).abs() < 1e-9 {
        x.round()
    } else {
        x
    }
}

/// The sequence of levels met by the rows `[y₀−(r+1)L, y₀−rL]`.
pub fn height_sequence(l: f64, y0: f64, count: usize) -> Result<HeightSequence> {
    if l <= 1.0 {
        return Err(Error::Input("row height must exceed 1".into()));
    }
    let entries: Vec<i64> = (0..count)
        .map(|r| {
            let lo = snap(y0 - (r as f64 + 1.0) * l);
            let hi = snap(y0 - r as f64 * l);
            hi.ceil() as i64 - lo.floor() as i64
        })
        .collect();
    let mut frequencies = BTreeMap::new();
    for &e in &entries {
        *frequencies.entry(e).or_insert(0.0) += 1.0 / count as f64;
    }
    Ok(HeightSequence { offset: y0, row_height: l, entries, frequencies })
}

/// Smallest period `p ≤ max` of a sequence, if any.
pub fn sequence_period(entries: &[i64], max: usize) -> Option<usize> {
    (1..=max.min(entries.len() / 2)).find(|&p| entries.iter().zip(&entries[p..]).all(|(a, b)| a == b))
}

/// The minimality verdict.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum MinimalityVerdict {
    /// No relation `λ^q = n^p` with `p, q ≤ 64`.
    MinimalExpected {
        /// `log_n λ`.
        log_lambda: f64,
        /// Smallest `|q·log_n λ − p|` over the scan.
        closest: f64,
    },
    /// `λ^q = n^p`: two offsets whose height frequencies differ, for the
    /// smallest power of σ whose row height exceeds 1.
    NonMinimal {
        /// Exponent p.
        p: u32,
        /// Exponent q.
        q: u32,
        /// Whether the relation was confirmed in exact arithmetic.
        exact: bool,
        /// Sequence at offset 0.
        first: HeightSequence,
        /// Sequence at offset `1/(2q)`.
        second: HeightSequence,
    },
}

/// Decides whether `log_n λ` is a small rational `p/q`.
pub fn minimality_verdict(eigen: &EigenData, n: u32) -> Result<MinimalityVerdict> {
    let ln = (n as f64).ln();
    let l = eigen.lambda.ln() / ln;
    let mut closest = f64::INFINITY;
    for q in 1..=64u32 {
        for p in 1..=64u32 {
            let lhs = q as f64 * eigen.lambda.ln();
            let rhs = p as f64 * ln;
            let rel = ((lhs - rhs) / rhs).abs();
            closest = closest.min((q as f64 * l - p as f64).abs());
            if rel < 1e-12 {
                let exact = match &eigen.closed_form {
                    Some(ClosedForm::Integer { lambda, .. }) => {
                        BigUint::from(*lambda as u64).pow(q) == BigUint::from(n).pow(p)
                    }
                    _ => false,
                };
                // Row heights of a power σ^r with r·p/q > 1.
                let r = q / p + 1;
                let lr = (r * p) as f64 / q as f64;
                let count = 64 * q as usize;
                let first = height_sequence(lr, 0.0, count)?;
                let second = height_sequence(lr, 0.5 / q as f64, count)?;
                return Ok(MinimalityVerdict::NonMinimal { p, q, exact, first, second });
            }
        }
    }
    Ok(MinimalityVerdict::MinimalExpected { log_lambda: l, closest })
}
