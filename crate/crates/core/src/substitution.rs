//! Substitutions (deterministic and non-deterministic), incidence matrices,
//! primitivity, expanding eigendata and the unique-size normalization.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A substitution `σ = (𝒜, R)`; letters are indices into `alphabet`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    /// Letter names.
    pub alphabet: Vec<String>,
    /// `rules[a]` lists the admissible images of letter `a`.
    pub rules: Vec<Vec<Vec<usize>>>,
    /// The group base n this substitution is used with.
    pub n: u32,
}

/// On-disk form: `{"n":2,"alphabet":["a","b"],"rules":{"a":["aab"],"b":["ba"]}}`.
///
/// Images are strings of single-character letter names, or arrays of names.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubstitutionFile {
    /// Group base.
    #[serde(default = "default_base")]
    pub n: u32,
    /// Letter names.
    pub alphabet: Vec<String>,
    /// Images per letter.
    pub rules: BTreeMap<String, Vec<Image>>,
}

fn default_base() -> u32 {
    2
}

/// One image, either a compact string or a list of letter names.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Image {
    /// Letters are single characters.
    Compact(String),
    /// Letters listed explicitly.
    Letters(Vec<String>),
}

impl Substitution {
    /// Builds a substitution from letter names and string images, one
    /// character per letter.
    pub fn from_strs(alphabet: &[&str], rules: &[&[&str]], n: u32) -> Result<Self> {
        let alphabet: Vec<String> = alphabet.iter().map(|s| s.to_string()).collect();
        let mut out = Vec::new();
        for images in rules {
            let mut imgs = Vec::new();
            for img in images.iter() {
                imgs.push(parse_letters(&alphabet, img)?);
            }
            out.push(imgs);
        }
        Substitution::new(alphabet, out, n)
    }

    /// Validates and builds a substitution.
    pub fn new(alphabet: Vec<String>, rules: Vec<Vec<Vec<usize>>>, n: u32) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::Substitution("empty alphabet".into()));
        }
        if rules.len() != alphabet.len() {
            return Err(Error::Substitution("one rule set per letter required".into()));
        }
        for (a, imgs) in rules.iter().enumerate() {
            if imgs.is_empty() {
                return Err(Error::Substitution(format!("letter {} has no image", alphabet[a])));
            }
            for img in imgs {
                if img.is_empty() {
                    return Err(Error::Substitution(format!("letter {} has an empty image", alphabet[a])));
                }
                if img.iter().any(|&c| c >= alphabet.len()) {
                    return Err(Error::Substitution("image letter outside the alphabet".into()));
                }
            }
        }
        Ok(Substitution { alphabet, rules, n })
    }

    /// Reads the JSON form.
    pub fn from_file(f: &SubstitutionFile) -> Result<Self> {
        let mut rules = Vec::new();
        for name in &f.alphabet {
            let imgs = f
                .rules
                .get(name)
                .ok_or_else(|| Error::Substitution(format!("no rule for {name}")))?;
            let mut parsed = Vec::new();
            for img in imgs {
                parsed.push(match img {
                    Image::Compact(s) => parse_letters(&f.alphabet, s)?,
                    Image::Letters(v) => v
                        .iter()
                        .map(|l| letter_index(&f.alphabet, l))
                        .collect::<Result<Vec<_>>>()?,
                });
            }
            rules.push(parsed);
        }
        Substitution::new(f.alphabet.clone(), rules, f.n)
    }

    /// Parses the JSON text form.
    pub fn from_json(text: &str) -> Result<Self> {
        let f: SubstitutionFile = serde_json::from_str(text)?;
        Substitution::from_file(&f)
    }

    /// The JSON form.
    pub fn to_file(&self) -> SubstitutionFile {
        let compact = self.alphabet.iter().all(|s| s.chars().count() == 1);
        let rules = self
            .alphabet
            .iter()
            .zip(&self.rules)
            .map(|(name, imgs)| {
                let imgs = imgs
                    .iter()
                    .map(|img| {
                        if compact {
                            Image::Compact(self.word_string(img))
                        } else {
                            Image::Letters(img.iter().map(|&c| self.alphabet[c].clone()).collect())
                        }
                    })
                    .collect();
                (name.clone(), imgs)
            })
            .collect();
        SubstitutionFile { n: self.n, alphabet: self.alphabet.clone(), rules }
    }

    /// Number of letters.
    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    /// True when every letter has exactly one image.
    pub fn is_deterministic(&self) -> bool {
        self.rules.iter().all(|r| r.len() == 1)
    }

    /// Index of a letter name.
    pub fn letter(&self, name: &str) -> Result<usize> {
        letter_index(&self.alphabet, name)
    }

    /// Letters of a word as a string (names concatenated).
    pub fn word_string(&self, w: &[usize]) -> String {
        w.iter().map(|&c| self.alphabet[c].as_str()).collect()
    }

    /// Parses a word of single-character letter names.
    pub fn parse_word(&self, s: &str) -> Result<Vec<usize>> {
        parse_letters(&self.alphabet, s)
    }

    /// `M = max_a max_rule |σ(a)|`.
    pub fn max_image_len(&self) -> usize {
        self.rules.iter().flatten().map(Vec::len).max().unwrap_or(0)
    }

    /// Applies rule choices letter by letter (`choose(letter, n_rules)`).
    pub fn apply_with<F: FnMut(usize, usize) -> usize>(&self, w: &[usize], mut choose: F) -> Vec<usize> {
        let mut out = Vec::new();
        for &c in w {
            let r = choose(c, self.rules[c].len());
            out.extend_from_slice(&self.rules[c][r]);
        }
        out
    }

    /// Applies the first rule of every letter.
    pub fn apply(&self, w: &[usize]) -> Vec<usize> {
        self.apply_with(w, |_, _| 0)
    }

    /// The power `σ^k`, with every combination of rule choices.
    pub fn power(&self, k: u32) -> Substitution {
        assert!(k >= 1);
        let mut rules: Vec<Vec<Vec<usize>>> = (0..self.size()).map(|a| vec![vec![a]]).collect();
        for _ in 0..k {
            rules = rules
                .iter()
                .map(|imgs| {
                    let mut set = BTreeSet::new();
                    for img in imgs {
                        for w in self.all_images(img) {
                            set.insert(w);
                        }
                    }
                    set.into_iter().collect()
                })
                .collect();
        }
        Substitution { alphabet: self.alphabet.clone(), rules, n: self.n }
    }

    /// Every image of a word over all rule choices.
    pub fn all_images(&self, w: &[usize]) -> Vec<Vec<usize>> {
        let mut acc: Vec<Vec<usize>> = vec![Vec::new()];
        for &c in w {
            let mut next = Vec::new();
            for prefix in &acc {
                for img in &self.rules[c] {
                    let mut p = prefix.clone();
                    p.extend_from_slice(img);
                    next.push(p);
                }
            }
            acc = next;
        }
        acc
    }
}

fn letter_index(alphabet: &[String], name: &str) -> Result<usize> {
    alphabet
        .iter()
        .position(|s| s == name)
        .ok_or_else(|| Error::UnknownLetter(name.to_string()))
}

fn parse_letters(alphabet: &[String], s: &str) -> Result<Vec<usize>> {
    s.chars().map(|c| letter_index(alphabet, &c.to_string())).collect()
}

/// `M[i][j] = |σ(a_i)|_{a_j}`.
pub fn incidence_matrix(s: &Substitution) -> Result<Vec<Vec<u64>>> {
    if !s.is_deterministic() {
        return Err(Error::NonDeterministic);
    }
    Ok(rule_matrix(s, &vec![0; s.size()]))
}

fn rule_matrix(s: &Substitution, choice: &[usize]) -> Vec<Vec<u64>> {
    let d = s.size();
    let mut m = vec![vec![0u64; d]; d];
    for a in 0..d {
        for &c in &s.rules[a][choice[a]] {
            m[a][c] += 1;
        }
    }
    m
}

fn mat_mul(x: &[Vec<u64>], y: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let d = x.len();
    let mut out = vec![vec![0u64; d]; d];
    for i in 0..d {
        for k in 0..d {
            if x[i][k] == 0 {
                continue;
            }
            for j in 0..d {
                out[i][j] = out[i][j].saturating_add(x[i][k].saturating_mul(y[k][j]));
            }
        }
    }
    out
}

/// True iff some `M^p`, `p ≤ (|𝒜|−1)²+1`, is entrywise positive.
pub fn is_primitive(s: &Substitution) -> Result<bool> {
    let m = incidence_matrix(s)?;
    let d = m.len();
    let bound = (d - 1) * (d - 1) + 1;
    let mut p = m.clone();
    for _ in 0..bound {
        if p.iter().flatten().all(|&x| x > 0) {
            return Ok(true);
        }
        p = mat_mul(&p, &m);
    }
    Ok(false)
}

/// A quadratic surd `(p + q·√d) / r` with integer coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Surd {
    /// Rational part numerator.
    pub p: i64,
    /// Coefficient of `√d`.
    pub q: i64,
    /// Radicand.
    pub d: i64,
    /// Common denominator.
    pub r: i64,
}

impl Surd {
    /// Value as a double.
    pub fn value(&self) -> f64 {
        (self.p as f64 + self.q as f64 * (self.d as f64).sqrt()) / self.r as f64
    }
}

/// Closed form of the eigendata when the characteristic polynomial has
/// degree at most two or the eigenpair is rational.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ClosedForm {
    /// λ and v are quadratic surds.
    Quadratic {
        /// λ.
        lambda: Surd,
        /// v, normalized so that the minimum entry is 1.
        v: Vec<Surd>,
    },
    /// λ is an integer and v is an integer vector (before min-normalization).
    Integer {
        /// λ.
        lambda: i64,
        /// Integer eigenvector.
        v: Vec<i64>,
    },
}

/// Eigendata of a substitution and its unique-size normalization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenData {
    /// Expanding eigenvalue λ of the (possibly powered) substitution.
    pub lambda: f64,
    /// Eigenvector (scaled by `scale` once normalized).
    pub v: Vec<f64>,
    /// Maximum eigen residual `max |λ v(a) − Σ v(w_i)|`.
    pub residual: f64,
    /// Exact form when available.
    pub closed_form: Option<ClosedForm>,
    /// Power k applied by the normalization (1 before normalization).
    pub power: u32,
    /// Scale C in thousandths (1000 before normalization).
    pub scale_milli: u64,
    /// `⌊log₂ λ⌋`.
    pub h_box: i64,
    /// `⌊log₂ λ⌋ − 1`.
    pub h_rule: i64,
    /// `w_a = ⌊v(a)⌋ − 1`.
    pub w: Vec<i64>,
    /// `M`, the maximum image length.
    pub m: usize,
}

impl EigenData {
    /// The scale C as a double.
    pub fn scale(&self) -> f64 {
        self.scale_milli as f64 / 1000.0
    }

    /// `⌊log_n λ⌋` for the base used by the SFT.
    pub fn h_box_base(&self, n: u32) -> i64 {
        floor_log(self.lambda, n)
    }

    /// `⌊log_n λ⌋ − 1`.
    pub fn h_rule_base(&self, n: u32) -> i64 {
        self.h_box_base(n) - 1
    }
}

fn floor_log(x: f64, n: u32) -> i64 {
    let mut k = 0i64;
    let mut p = 1.0f64;
    while p * n as f64 <= x * (1.0 + 1e-12) {
        p *= n as f64;
        k += 1;
    }
    k
}

/// Maximum eigen residual over every rule.
pub fn eigen_residual(s: &Substitution, lambda: f64, v: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (a, imgs) in s.rules.iter().enumerate() {
        for img in imgs {
            let sum: f64 = img.iter().map(|&c| v[c]).sum();
            worst = worst.max((lambda * v[a] - sum).abs());
        }
    }
    worst
}

fn power_iteration(m: &[Vec<u64>]) -> Option<(f64, Vec<f64>)> {
    let d = m.len();
    let mut v = vec![1.0f64; d];
    let mut lambda = 0.0;
    // Iterating on (M + I) avoids oscillation for imprimitive matrices.
    for _ in 0..100_000 {
        let mut next = vec![0.0f64; d];
        for i in 0..d {
            let mut acc = v[i];
            for j in 0..d {
                acc += m[i][j] as f64 * v[j];
            }
            next[i] = acc;
        }
        let norm = next.iter().cloned().fold(0.0, f64::max);
        if norm == 0.0 {
            return None;
        }
        for x in &mut next {
            *x /= norm;
        }
        let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        lambda = norm - 1.0;
        if delta < 1e-16 {
            break;
        }
    }
    // Rayleigh-style estimate from the largest coordinate.
    let i = (0..d).max_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap()).unwrap();
    let mv: f64 = (0..d).map(|j| m[i][j] as f64 * v[j]).sum();
    if v[i] > 0.0 {
        lambda = mv / v[i];
    }
    Some((lambda, v))
}

fn normalize_min_one(v: &mut [f64]) {
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    for x in v.iter_mut() {
        *x /= min;
    }
}

fn snap_integer(s: &Substitution, lambda: f64, v: &[f64]) -> Option<(i64, Vec<i64>)> {
    let l = lambda.round();
    if (lambda - l).abs() > 1e-9 {
        return None;
    }
    for den in 1..=1000i64 {
        let cand: Vec<f64> = v.iter().map(|x| x * den as f64).collect();
        if cand.iter().all(|x| (x - x.round()).abs() < 1e-7) {
            let vi: Vec<i64> = cand.iter().map(|x| x.round() as i64).collect();
            let li = l as i64;
            let exact = s.rules.iter().enumerate().all(|(a, imgs)| {
                imgs.iter().all(|img| img.iter().map(|&c| vi[c]).sum::<i64>() == li * vi[a])
            });
            return if exact { Some((li, vi)) } else { None };
        }
    }
    None
}

fn snap_quadratic(m: &[Vec<u64>]) -> Option<(Surd, Vec<Surd>)> {
    if m.len() != 2 {
        return None;
    }
    let (a, b, c, d) = (m[0][0] as i64, m[0][1] as i64, m[1][0] as i64, m[1][1] as i64);
    let tr = a + d;
    let det = a * d - b * c;
    let disc = tr * tr - 4 * det;
    if disc <= 0 || c == 0 || b == 0 {
        return None;
    }
    let root = (disc as f64).sqrt().round() as i64;
    if root * root == disc {
        return None;
    }
    let lambda = Surd { p: tr, q: 1, d: disc, r: 2 };
    // (λ − d)/c with v(b) = 1.
    let va = Surd { p: tr - 2 * d, q: 1, d: disc, r: 2 * c };
    let one = Surd { p: 1, q: 0, d: disc, r: 1 };
    if va.value() >= 1.0 {
        Some((lambda, vec![va, one]))
    } else {
        // Normalize so the smaller entry is 1: v = (1, c/(λ − d)).
        let vb = Surd { p: -(tr - 2 * d), q: 1, d: disc, r: 2 * b };
        Some((lambda, vec![one, vb]))
    }
}

/// Solves `λ·v(a) = Σ v(w_i)` for every rule `(a, w)` with `λ > 1` and
/// `v > 0`, normalized so that `min v = 1`.
pub fn expanding_eigen(s: &Substitution) -> Result<EigenData> {
    let d = s.size();
    // Every rule must satisfy the equation, so any one choice of rules
    // determines the candidate; the remaining rules are checked after.
    let mut choice = vec![0usize; d];
    let total: usize = s.rules.iter().map(Vec::len).product();
    for _ in 0..total.min(4096) {
        let m = rule_matrix(s, &choice);
        if let Some((lambda, mut v)) = power_iteration(&m) {
            if lambda > 1.0 && v.iter().all(|&x| x > 1e-12) {
                normalize_min_one(&mut v);
                let mut closed = None;
                let (mut lambda, mut v) = (lambda, v);
                if let Some((l, vi)) = snap_integer(s, lambda, &v) {
                    lambda = l as f64;
                    let min = *vi.iter().min().unwrap() as f64;
                    v = vi.iter().map(|&x| x as f64 / min).collect();
                    closed = Some(ClosedForm::Integer { lambda: l, v: vi });
                } else if s.is_deterministic() {
                    if let Some((l, vs)) = snap_quadratic(&m) {
                        lambda = l.value();
                        v = vs.iter().map(Surd::value).collect();
                        closed = Some(ClosedForm::Quadratic { lambda: l, v: vs });
                    }
                }
                let residual = eigen_residual(s, lambda, &v);
                if residual < 1e-9 * lambda.max(1.0) {
                    return Ok(EigenData {
                        lambda,
                        v,
                        residual,
                        closed_form: closed,
                        power: 1,
                        scale_milli: 1000,
                        h_box: floor_log(lambda, 2),
                        h_rule: floor_log(lambda, 2) - 1,
                        w: vec![],
                        m: s.max_image_len(),
                    });
                }
            }
        }
        // Next rule combination.
        for a in 0..d {
            choice[a] += 1;
            if choice[a] < s.rules[a].len() {
                break;
            }
            choice[a] = 0;
        }
    }
    Err(Error::NoExpandingEigenvalue)
}

/// Raises σ to the smallest power k with `λ^k ≥ 8` and scales v by the
/// smallest C (in steps of 0.001) with `C·v(a) ≥ 3` for every letter.
pub fn normalize_unique_size(s: &Substitution, eigen: &EigenData) -> Result<(Substitution, EigenData)> {
    if eigen.lambda <= 1.0 {
        return Err(Error::NoExpandingEigenvalue);
    }
    let mut k = 1u32;
    let mut lk = eigen.lambda;
    while lk < 8.0 - 1e-12 || lk.log2() < 3.0 - 1e-12 {
        k += 1;
        lk *= eigen.lambda;
    }
    let powered = if k == 1 { s.clone() } else { s.power(k) };
    let min = eigen.v.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut milli = ((3.0 / min) * 1000.0 - 1e-6).ceil().max(1.0) as u64;
    while (milli as f64 / 1000.0) * min < 3.0 - 1e-12 {
        milli += 1;
    }
    let c = milli as f64 / 1000.0;
    let v: Vec<f64> = eigen.v.iter().map(|x| x * c).collect();
    let lambda = match &eigen.closed_form {
        Some(ClosedForm::Integer { lambda, .. }) => (*lambda as f64).powi(k as i32),
        _ => lk,
    };
    let w = v.iter().map(|x| (x + 1e-12).floor() as i64 - 1).collect();
    let residual = eigen_residual(&powered, lambda, &v);
    let data = EigenData {
        lambda,
        v,
        residual,
        closed_form: eigen.closed_form.clone(),
        power: k,
        scale_milli: milli,
        h_box: floor_log(lambda, 2),
        h_rule: floor_log(lambda, 2) - 1,
        w,
        m: powered.max_image_len(),
    };
    Ok((powered, data))
}

/// Every factor (up to `max_len`) of every word in `σ^depth(seed)`.
pub fn language(s: &Substitution, depth: u32, seed: usize, max_len: usize) -> BTreeSet<Vec<usize>> {
    let mut words: BTreeSet<Vec<usize>> = BTreeSet::from([vec![seed]]);
    for _ in 0..depth {
        let mut next = BTreeSet::new();
        for w in &words {
            for img in s.all_images(w) {
                next.insert(img);
            }
            if next.len() > 4096 {
                break;
            }
        }
        words = next;
    }
    let mut out = BTreeSet::new();
    for w in &words {
        for len in 1..=max_len.min(w.len()) {
            for start in 0..=w.len() - len {
                out.insert(w[start..start + len].to_vec());
            }
        }
    }
    out
}

/// One way of reading a row as a factor of `σ(parent)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Parse {
    /// Parent letters.
    pub parent: Vec<usize>,
    /// Rule index used for each parent letter.
    pub rules: Vec<usize>,
    /// Position of the row's first letter inside `σ(parent)`.
    pub offset: usize,
}

/// Every parse of `row` as a factor of `σ(parent)` with a minimal parent.
pub fn desubstitute(row: &[usize], s: &Substitution) -> Vec<Parse> {
    let mut out = BTreeSet::new();
    if row.is_empty() {
        return Vec::new();
    }
    for a in 0..s.size() {
        for (r, img) in s.rules[a].iter().enumerate() {
            for off in 0..img.len() {
                let take = (img.len() - off).min(row.len());
                if img[off..off + take] != row[..take] {
                    continue;
                }
                let mut parent = vec![a];
                let mut rules = vec![r];
                extend_parse(row, take, s, &mut parent, &mut rules, off, &mut out);
            }
        }
    }
    out.into_iter().collect()
}

fn extend_parse(
    row: &[usize],
    pos: usize,
    s: &Substitution,
    parent: &mut Vec<usize>,
    rules: &mut Vec<usize>,
    offset: usize,
    out: &mut BTreeSet<Parse>,
) {
    if pos == row.len() {
        out.insert(Parse { parent: parent.clone(), rules: rules.clone(), offset });
        return;
    }
    for a in 0..s.size() {
        for (r, img) in s.rules[a].iter().enumerate() {
            let take = img.len().min(row.len() - pos);
            if img[..take] == row[pos..pos + take] {
                parent.push(a);
                rules.push(r);
                extend_parse(row, pos + take, s, parent, rules, offset, out);
                parent.pop();
                rules.pop();
            }
        }
    }
}
