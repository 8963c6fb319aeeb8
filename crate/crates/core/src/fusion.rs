//! Skeletal fusion category data: fusion ring, F-symbols, spherical
//! dimensions and optional R-symbols, with JSON I/O and validation.
//!
//! Conventions. Vertices `t^{c,mu}_{ab} : X_c -> X_a X_b` form the basis of
//! `Hom(X_c, X_a X_b)`. The F-symbol relates the two bracketings of a
//! three-letter fusion tree,
//!
//! `(t^{e,alpha}_{ab} (x) 1_c) t^{d,beta}_{ec}
//!     = sum_f F^{abc}_d[(e,alpha,beta),(f,gamma,delta)] (1_a (x) t^{f,gamma}_{bc}) t^{d,delta}_{af}`
//!
//! and the R-symbol the braiding, `c(a,b) t^{c,alpha}_{ab} = sum_beta R^{ab}_c[alpha,beta] t^{c,beta}_{ba}`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::report::{Certificate, Check};
use crate::scalar::{branch_sqrt, c64, Tolerance, C64, ONE, ZERO};

pub type Label = usize;

/// Multiplicity-indexed channel of a three-letter tree: `(edge, mult, mult)`.
pub type Channel = (Label, usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct FusionRing {
    labels: Vec<String>,
    dual: Vec<Label>,
    n: Vec<usize>,
}

impl FusionRing {
    /// Checks the unit and duality constraints; everything else is left to
    /// [`validate`].
    pub fn new(labels: Vec<String>, dual: Vec<Label>, n: Vec<usize>) -> Result<Self> {
        let r = labels.len();
        if r == 0 {
            return Err(Error::SchemaError("no labels".into()));
        }
        if dual.len() != r || n.len() != r * r * r {
            return Err(Error::SchemaError("inconsistent ring sizes".into()));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(Error::SchemaError(format!("duplicate label {l}")));
            }
        }
        let ring = FusionRing { labels, dual, n };
        for i in 0..r {
            if ring.dual[i] >= r || ring.dual[ring.dual[i]] != i {
                return Err(Error::SchemaError(format!("dual is not an involution at {}", ring.labels[i])));
            }
        }
        if ring.dual[0] != 0 {
            return Err(Error::SchemaError("the unit must be self-dual".into()));
        }
        for i in 0..r {
            for j in 0..r {
                let d = usize::from(i == j);
                if ring.n(0, i, j) != d || ring.n(i, 0, j) != d {
                    return Err(Error::SchemaError(format!(
                        "unit constraint violated at ({}, {})",
                        ring.labels[i], ring.labels[j]
                    )));
                }
                if ring.n(i, j, 0) != usize::from(j == ring.dual[i]) {
                    return Err(Error::SchemaError(format!(
                        "N_{{{},{}}}^0 inconsistent with the dual",
                        ring.labels[i], ring.labels[j]
                    )));
                }
            }
        }
        Ok(ring)
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn n(&self, i: Label, j: Label, k: Label) -> usize {
        let r = self.labels.len();
        self.n[(i * r + j) * r + k]
    }

    pub fn dual(&self, i: Label) -> Label {
        self.dual[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: Label) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, name: &str) -> Option<Label> {
        self.labels.iter().position(|l| l == name)
    }

    /// Labels `k` with `N_{ij}^k > 0`.
    pub fn channels(&self, i: Label, j: Label) -> Vec<Label> {
        (0..self.rank()).filter(|&k| self.n(i, j, k) > 0).collect()
    }

    pub fn is_multiplicity_free(&self) -> bool {
        self.n.iter().all(|&x| x <= 1)
    }

    /// `max |sum_m N_ij^m N_mk^l - sum_m N_jk^m N_im^l|`.
    pub fn associativity_defect(&self) -> usize {
        let r = self.rank();
        let mut worst = 0;
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for l in 0..r {
                        let lhs: usize = (0..r).map(|m| self.n(i, j, m) * self.n(m, k, l)).sum();
                        let rhs: usize = (0..r).map(|m| self.n(j, k, m) * self.n(i, m, l)).sum();
                        worst = worst.max(lhs.abs_diff(rhs));
                    }
                }
            }
        }
        worst
    }

    /// Number of Frobenius reciprocity violations `N_ij^k != N_{j,k̄}^{ī}`.
    pub fn frobenius_defect(&self) -> usize {
        let r = self.rank();
        let mut bad = 0;
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    if self.n(i, j, k) != self.n(j, self.dual(k), self.dual(i)) {
                        bad += 1;
                    }
                }
            }
        }
        bad
    }
}

/// One F-block for fixed `(a,b,c;d)`: rows are left-bracketed channels
/// `(e,alpha,beta)`, columns right-bracketed channels `(f,gamma,delta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FBlock {
    pub left: Vec<Channel>,
    pub right: Vec<Channel>,
    pub mat: Mat,
    pub inv: Mat,
}

impl FBlock {
    pub fn left_index(&self, ch: Channel) -> Option<usize> {
        self.left.iter().position(|&x| x == ch)
    }

    pub fn right_index(&self, ch: Channel) -> Option<usize> {
        self.right.iter().position(|&x| x == ch)
    }
}

pub fn left_channels(ring: &FusionRing, a: Label, b: Label, c: Label, d: Label) -> Vec<Channel> {
    let mut out = Vec::new();
    for e in 0..ring.rank() {
        for al in 0..ring.n(a, b, e) {
            for be in 0..ring.n(e, c, d) {
                out.push((e, al, be));
            }
        }
    }
    out
}

pub fn right_channels(ring: &FusionRing, a: Label, b: Label, c: Label, d: Label) -> Vec<Channel> {
    let mut out = Vec::new();
    for f in 0..ring.rank() {
        for ga in 0..ring.n(b, c, f) {
            for de in 0..ring.n(a, f, d) {
                out.push((f, ga, de));
            }
        }
    }
    out
}

/// The identity identification of a block with a unit among `a, b, c`.
fn unit_block(a: Label, b: Label, c: Label, d: Label, left: &[Channel], right: &[Channel]) -> Mat {
    let mut m = Mat::zeros(left.len(), right.len());
    for (i, &(_, al, be)) in left.iter().enumerate() {
        let target = if a == 0 {
            (d, be, 0)
        } else if b == 0 {
            (c, 0, be)
        } else {
            (b, 0, al)
        };
        if let Some(j) = right.iter().position(|&x| x == target) {
            m[(i, j)] = ONE;
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct FSymbolSet {
    rank: usize,
    blocks: BTreeMap<[Label; 4], FBlock>,
}

/// Key of a single F-symbol entry.
pub type FKey = ([Label; 4], Channel, Channel);

impl FSymbolSet {
    /// Builds all blocks from explicit entries. Missing entries are zero,
    /// except that a block with a unit among `a,b,c` and no entries at all is
    /// the identity.
    pub fn from_entries(ring: &FusionRing, entries: &BTreeMap<FKey, C64>) -> Result<Self> {
        let mut touched: BTreeSet<[Label; 4]> = BTreeSet::new();
        for (k, _) in entries.iter() {
            touched.insert(k.0);
        }
        let r = ring.rank();
        let mut blocks = BTreeMap::new();
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    for d in 0..r {
                        let left = left_channels(ring, a, b, c, d);
                        let right = right_channels(ring, a, b, c, d);
                        if left.len() != right.len() {
                            return Err(Error::SchemaError(format!(
                                "F-block ({},{},{};{}) is not square",
                                ring.label(a),
                                ring.label(b),
                                ring.label(c),
                                ring.label(d)
                            )));
                        }
                        if left.is_empty() {
                            continue;
                        }
                        let key = [a, b, c, d];
                        let mat = if (a == 0 || b == 0 || c == 0) && !touched.contains(&key) {
                            unit_block(a, b, c, d, &left, &right)
                        } else {
                            let mut m = Mat::zeros(left.len(), right.len());
                            for (i, l) in left.iter().enumerate() {
                                for (j, rr) in right.iter().enumerate() {
                                    if let Some(v) = entries.get(&(key, *l, *rr)) {
                                        m[(i, j)] = *v;
                                    }
                                }
                            }
                            m
                        };
                        let inv = mat
                            .clone()
                            .try_inverse()
                            .ok_or(Error::SingularF(key))?;
                        blocks.insert(key, FBlock { left, right, mat, inv });
                    }
                }
            }
        }
        for (k, _) in entries.iter() {
            let blk = blocks.get(&k.0).ok_or_else(|| {
                Error::SchemaError(format!("F entry for an empty block {:?}", k.0))
            })?;
            if blk.left_index(k.1).is_none() || blk.right_index(k.2).is_none() {
                return Err(Error::SchemaError(format!("F entry outside its block: {k:?}")));
            }
        }
        Ok(FSymbolSet { rank: r, blocks })
    }

    /// Builds all blocks from a function of `(a,b,c,d, left, right)`.
    pub fn from_fn<F>(ring: &FusionRing, f: F) -> Result<Self>
    where
        F: Fn([Label; 4], Channel, Channel) -> C64,
    {
        let mut entries = BTreeMap::new();
        let r = ring.rank();
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    for d in 0..r {
                        let key = [a, b, c, d];
                        for l in left_channels(ring, a, b, c, d) {
                            for rr in right_channels(ring, a, b, c, d) {
                                let v = f(key, l, rr);
                                if v != ZERO {
                                    entries.insert((key, l, rr), v);
                                }
                            }
                        }
                    }
                }
            }
        }
        Self::from_entries(ring, &entries)
    }

    pub fn block(&self, a: Label, b: Label, c: Label, d: Label) -> Option<&FBlock> {
        self.blocks.get(&[a, b, c, d])
    }

    pub fn get(&self, key: [Label; 4], l: Channel, r: Channel) -> C64 {
        match self.blocks.get(&key) {
            None => ZERO,
            Some(b) => match (b.left_index(l), b.right_index(r)) {
                (Some(i), Some(j)) => b.mat[(i, j)],
                _ => ZERO,
            },
        }
    }

    /// Entry of the inverse block, indexed `(right channel, left channel)`.
    pub fn get_inv(&self, key: [Label; 4], r: Channel, l: Channel) -> C64 {
        match self.blocks.get(&key) {
            None => ZERO,
            Some(b) => match (b.right_index(r), b.left_index(l)) {
                (Some(j), Some(i)) => b.inv[(j, i)],
                _ => ZERO,
            },
        }
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&[Label; 4], &FBlock)> {
        self.blocks.iter()
    }

    /// Sorted list of all entries (deterministic order).
    pub fn entries(&self) -> Vec<(FKey, C64)> {
        let mut keys: Vec<&[Label; 4]> = self.blocks.keys().collect();
        keys.sort();
        let mut out = Vec::new();
        for k in keys {
            let b = &self.blocks[k];
            for (i, l) in b.left.iter().enumerate() {
                for (j, r) in b.right.iter().enumerate() {
                    out.push(((*k, *l, *r), b.mat[(i, j)]));
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Replaces one entry, recomputing the inverse of its block.
    pub fn with_entry(&self, key: FKey, v: C64) -> Result<Self> {
        let mut out = self.clone();
        let blk = out
            .blocks
            .get_mut(&key.0)
            .ok_or_else(|| Error::SchemaError(format!("no F-block {:?}", key.0)))?;
        let i = blk.left_index(key.1).ok_or_else(|| Error::SchemaError("left channel".into()))?;
        let j = blk.right_index(key.2).ok_or_else(|| Error::SchemaError("right channel".into()))?;
        blk.mat[(i, j)] = v;
        blk.inv = blk.mat.clone().try_inverse().ok_or(Error::SingularF(key.0))?;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphericalData {
    pub dims: Vec<C64>,
    pub pivotal: Vec<C64>,
    pub dim_c: C64,
    pub lambda: C64,
}

impl SphericalData {
    pub fn new(dims: Vec<C64>, pivotal: Option<Vec<C64>>) -> Self {
        let dim_c: C64 = dims.iter().map(|d| d * d).sum();
        let pivotal = pivotal.unwrap_or_else(|| vec![ONE; dims.len()]);
        SphericalData {
            lambda: branch_sqrt(dim_c),
            dims,
            pivotal,
            dim_c,
        }
    }
}

/// R-blocks keyed `(a,b,c)`; the matrix is indexed `[alpha, beta]` with
/// `alpha < N_ab^c`, `beta < N_ba^c`.
#[derive(Debug, Clone, PartialEq)]
pub struct RSymbolSet {
    blocks: BTreeMap<(Label, Label, Label), Mat>,
}

impl RSymbolSet {
    pub fn from_entries(ring: &FusionRing, entries: &BTreeMap<(Label, Label, Label, usize, usize), C64>) -> Result<Self> {
        let r = ring.rank();
        let mut blocks = BTreeMap::new();
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    let (p, q) = (ring.n(a, b, c), ring.n(b, a, c));
                    if p != q {
                        return Err(Error::SchemaError("fusion ring is not commutative".into()));
                    }
                    if p == 0 {
                        continue;
                    }
                    let mut m = Mat::zeros(p, q);
                    for al in 0..p {
                        for be in 0..q {
                            if let Some(v) = entries.get(&(a, b, c, al, be)) {
                                m[(al, be)] = *v;
                            }
                        }
                    }
                    blocks.insert((a, b, c), m);
                }
            }
        }
        for k in entries.keys() {
            if !blocks.contains_key(&(k.0, k.1, k.2)) {
                return Err(Error::SchemaError(format!("R entry for an empty channel {k:?}")));
            }
        }
        Ok(RSymbolSet { blocks })
    }

    pub fn block(&self, a: Label, b: Label, c: Label) -> Option<&Mat> {
        self.blocks.get(&(a, b, c))
    }

    pub fn entries(&self) -> Vec<((Label, Label, Label, usize, usize), C64)> {
        let mut keys: Vec<&(Label, Label, Label)> = self.blocks.keys().collect();
        keys.sort();
        let mut out = Vec::new();
        for k in keys {
            let m = &self.blocks[k];
            for al in 0..m.nrows() {
                for be in 0..m.ncols() {
                    out.push(((k.0, k.1, k.2, al, be), m[(al, be)]));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionCategoryData {
    pub name: String,
    pub ring: FusionRing,
    pub f: FSymbolSet,
    pub spherical: SphericalData,
    pub r: Option<RSymbolSet>,
    pub unitary: bool,
}

impl FusionCategoryData {
    pub fn rank(&self) -> usize {
        self.ring.rank()
    }

    pub fn dim(&self, i: Label) -> C64 {
        self.spherical.dims[i]
    }

    pub fn dual(&self, i: Label) -> Label {
        self.ring.dual(i)
    }

    pub fn n(&self, i: Label, j: Label, k: Label) -> usize {
        self.ring.n(i, j, k)
    }

    pub fn lambda(&self) -> C64 {
        self.spherical.lambda
    }

    pub fn dim_c(&self) -> C64 {
        self.spherical.dim_c
    }

    /// `F^{a ā a}_a` at the unit channels.
    pub fn f_loop(&self, a: Label) -> C64 {
        let ad = self.dual(a);
        self.f.get([a, ad, a, a], (0, 0, 0), (0, 0, 0))
    }

    /// Relabels the simple objects: new label `k` is old label `perm[k]`.
    /// `perm[0]` must be 0.
    pub fn relabeled(&self, perm: &[Label]) -> Result<Self> {
        let r = self.rank();
        if perm.len() != r || perm[0] != 0 {
            return Err(Error::SchemaError("relabeling must fix the unit".into()));
        }
        let mut inv = vec![usize::MAX; r];
        for (k, &p) in perm.iter().enumerate() {
            inv[p] = k;
        }
        if inv.contains(&usize::MAX) {
            return Err(Error::SchemaError("relabeling is not a permutation".into()));
        }
        let labels = perm.iter().map(|&p| self.ring.label(p).to_string()).collect();
        let dual = perm.iter().map(|&p| inv[self.ring.dual(p)]).collect();
        let mut n = vec![0; r * r * r];
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    n[(i * r + j) * r + k] = self.ring.n(perm[i], perm[j], perm[k]);
                }
            }
        }
        let ring = FusionRing::new(labels, dual, n)?;
        let p = |x: Label| perm[x];
        let f = FSymbolSet::from_fn(&ring, |[a, b, c, d], (e, al, be), (ff, ga, de)| {
            self.f.get([p(a), p(b), p(c), p(d)], (p(e), al, be), (p(ff), ga, de))
        })?;
        let r_sym = match &self.r {
            None => None,
            Some(rs) => {
                let mut ent = BTreeMap::new();
                for ((a, b, c, al, be), v) in rs.entries() {
                    ent.insert((inv[a], inv[b], inv[c], al, be), v);
                }
                Some(RSymbolSet::from_entries(&ring, &ent)?)
            }
        };
        let dims = perm.iter().map(|&q| self.spherical.dims[q]).collect();
        let piv = perm.iter().map(|&q| self.spherical.pivotal[q]).collect();
        Ok(FusionCategoryData {
            name: self.name.clone(),
            ring,
            f,
            spherical: SphericalData::new(dims, Some(piv)),
            r: r_sym,
            unitary: self.unitary,
        })
    }
}

// ---------------------------------------------------------------------------
// JSON schema

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryFile {
    name: String,
    labels: Vec<String>,
    dual: BTreeMap<String, String>,
    fusion: Vec<(String, String, String, u64)>,
    dims: BTreeMap<String, [f64; 2]>,
    #[serde(rename = "F")]
    f: Vec<FEntry>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    r: Option<Vec<REntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unitary: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pivotal: Option<BTreeMap<String, [f64; 2]>>,
}

fn is_zero_index(x: &usize) -> bool {
    *x == 0
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FEntry {
    abc: [String; 3],
    d: String,
    e: String,
    f: String,
    #[serde(default, skip_serializing_if = "is_zero_index")]
    alpha: usize,
    #[serde(default, skip_serializing_if = "is_zero_index")]
    beta: usize,
    #[serde(default, skip_serializing_if = "is_zero_index")]
    gamma: usize,
    #[serde(default, skip_serializing_if = "is_zero_index")]
    delta: usize,
    v: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct REntry {
    ab: [String; 2],
    c: String,
    #[serde(default, skip_serializing_if = "is_zero_index")]
    alpha: usize,
    #[serde(default, skip_serializing_if = "is_zero_index")]
    beta: usize,
    v: [f64; 2],
}

fn lookup(ring_labels: &BTreeMap<String, Label>, s: &str) -> Result<Label> {
    ring_labels
        .get(s)
        .copied()
        .ok_or_else(|| Error::SchemaError(format!("unknown label {s:?}")))
}

/// Parses a category document. The result is not validated.
pub fn parse_category(text: &str) -> Result<FusionCategoryData> {
    let file: CategoryFile = serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
    let r = file.labels.len();
    let idx: BTreeMap<String, Label> = file.labels.iter().enumerate().map(|(k, l)| (l.clone(), k)).collect();
    if idx.len() != r {
        return Err(Error::SchemaError("duplicate labels".into()));
    }
    let mut dual = vec![usize::MAX; r];
    for (a, b) in &file.dual {
        let i = lookup(&idx, a)?;
        dual[i] = lookup(&idx, b)?;
    }
    if let Some(k) = dual.iter().position(|&x| x == usize::MAX) {
        return Err(Error::SchemaError(format!("missing dual for {}", file.labels[k])));
    }
    let mut n = vec![0usize; r * r * r];
    let mut seen = BTreeSet::new();
    for (a, b, c, m) in &file.fusion {
        let (i, j, k) = (lookup(&idx, a)?, lookup(&idx, b)?, lookup(&idx, c)?);
        if !seen.insert((i, j, k)) {
            return Err(Error::SchemaError(format!("duplicate fusion entry ({a},{b},{c})")));
        }
        n[(i * r + j) * r + k] = *m as usize;
    }
    let ring = FusionRing::new(file.labels.clone(), dual, n)?;
    let mut dims = vec![None; r];
    for (a, v) in &file.dims {
        dims[lookup(&idx, a)?] = Some(c64(v[0], v[1]));
    }
    let dims: Vec<C64> = dims
        .into_iter()
        .enumerate()
        .map(|(k, d)| d.ok_or_else(|| Error::SchemaError(format!("missing dimension for {}", file.labels[k]))))
        .collect::<Result<_>>()?;
    let pivotal = match &file.pivotal {
        None => None,
        Some(p) => {
            let mut out = vec![ONE; r];
            for (a, v) in p {
                out[lookup(&idx, a)?] = c64(v[0], v[1]);
            }
            Some(out)
        }
    };
    let mut fent = BTreeMap::new();
    for e in &file.f {
        let key = [
            lookup(&idx, &e.abc[0])?,
            lookup(&idx, &e.abc[1])?,
            lookup(&idx, &e.abc[2])?,
            lookup(&idx, &e.d)?,
        ];
        let l = (lookup(&idx, &e.e)?, e.alpha, e.beta);
        let rr = (lookup(&idx, &e.f)?, e.gamma, e.delta);
        if fent.insert((key, l, rr), c64(e.v[0], e.v[1])).is_some() {
            return Err(Error::SchemaError(format!("duplicate F entry {key:?} {l:?} {rr:?}")));
        }
    }
    let f = FSymbolSet::from_entries(&ring, &fent)?;
    let r_sym = match &file.r {
        None => None,
        Some(list) => {
            let mut ent = BTreeMap::new();
            for e in list {
                let key = (
                    lookup(&idx, &e.ab[0])?,
                    lookup(&idx, &e.ab[1])?,
                    lookup(&idx, &e.c)?,
                    e.alpha,
                    e.beta,
                );
                if ent.insert(key, c64(e.v[0], e.v[1])).is_some() {
                    return Err(Error::SchemaError(format!("duplicate R entry {key:?}")));
                }
            }
            Some(RSymbolSet::from_entries(&ring, &ent)?)
        }
    };
    Ok(FusionCategoryData {
        name: file.name,
        ring,
        f,
        spherical: SphericalData::new(dims, pivotal),
        r: r_sym,
        unitary: file.unitary.unwrap_or(false),
    })
}

pub fn load_category(path: impl AsRef<Path>) -> Result<FusionCategoryData> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_category(&text)
}

fn pair(z: C64) -> [f64; 2] {
    // normalise -0.0 so that output is stable
    [z.re + 0.0, z.im + 0.0]
}

/// Serialises to the input schema. Identity unit blocks and zero entries
/// are omitted.
pub fn category_to_json(cat: &FusionCategoryData) -> String {
    let ring = &cat.ring;
    let l = |i: Label| ring.label(i).to_string();
    let r = ring.rank();
    let mut fusion = Vec::new();
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                let m = ring.n(i, j, k);
                if m > 0 {
                    fusion.push((l(i), l(j), l(k), m as u64));
                }
            }
        }
    }
    let mut f = Vec::new();
    for ((key, le, ri), v) in cat.f.entries() {
        let [a, b, c, d] = key;
        if a == 0 || b == 0 || c == 0 {
            let blk = cat.f.block(a, b, c, d).unwrap();
            if blk.mat == unit_block(a, b, c, d, &blk.left, &blk.right) {
                continue;
            }
        }
        if v == ZERO {
            continue;
        }
        f.push(FEntry {
            abc: [l(a), l(b), l(c)],
            d: l(d),
            e: l(le.0),
            f: l(ri.0),
            alpha: le.1,
            beta: le.2,
            gamma: ri.1,
            delta: ri.2,
            v: pair(v),
        });
    }
    let r_list = cat.r.as_ref().map(|rs| {
        rs.entries()
            .into_iter()
            .map(|((a, b, c, al, be), v)| REntry {
                ab: [l(a), l(b)],
                c: l(c),
                alpha: al,
                beta: be,
                v: pair(v),
            })
            .collect()
    });
    let pivotal = if cat.spherical.pivotal.iter().all(|p| *p == ONE) {
        None
    } else {
        Some((0..r).map(|i| (l(i), pair(cat.spherical.pivotal[i]))).collect())
    };
    let file = CategoryFile {
        name: cat.name.clone(),
        labels: ring.labels().to_vec(),
        dual: (0..r).map(|i| (l(i), l(ring.dual(i)))).collect(),
        fusion,
        dims: (0..r).map(|i| (l(i), pair(cat.spherical.dims[i]))).collect(),
        f,
        r: r_list,
        unitary: if cat.unitary { Some(true) } else { None },
        pivotal,
    };
    serde_json::to_string_pretty(&file).expect("serialisable")
}

// ---------------------------------------------------------------------------
// validation

/// `(dim C, lambda)`.
pub fn global_dimension(cat: &FusionCategoryData, tol: Tolerance) -> Result<(C64, C64)> {
    let dim: C64 = cat.spherical.dims.iter().map(|d| d * d).sum();
    if dim.norm() <= tol.eps {
        return Err(Error::ZeroDimension(dim.norm()));
    }
    Ok((dim, branch_sqrt(dim)))
}

/// Sparse vector over tree channels of a four-letter word.
type Vec5 = BTreeMap<[usize; 5], C64>;

fn add_to(v: &mut Vec5, k: [usize; 5], x: C64) {
    if x != ZERO {
        *v.entry(k).or_insert(ZERO) += x;
    }
}

/// Maximum pentagon residual over all label 5-tuples and channels.
pub fn pentagon_residual(ring: &FusionRing, f: &FSymbolSet) -> f64 {
    let r = ring.rank();
    let mut worst: f64 = 0.0;
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                for d in 0..r {
                    for x in 0..r {
                        worst = worst.max(pentagon_at(ring, f, [a, b, c, d, x]));
                    }
                }
            }
        }
    }
    worst
}

fn pentagon_at(ring: &FusionRing, f: &FSymbolSet, [a, b, c, d, x]: [Label; 5]) -> f64 {
    let r = ring.rank();
    let mut worst: f64 = 0.0;
    // fully left-bracketed basis (((ab)_e c)_g d)_x with vertices (al, be, ga)
    for e in 0..r {
        for al in 0..ring.n(a, b, e) {
            for g in 0..r {
                for be in 0..ring.n(e, c, g) {
                    for ga in 0..ring.n(g, d, x) {
                        // route one: F^{ecd}_x then F^{abh}_x
                        let mut mid1: Vec5 = BTreeMap::new();
                        if let Some(blk) = f.block(e, c, d, x) {
                            let i = blk.left_index((g, be, ga)).unwrap();
                            for (j, &(h, mu, nu)) in blk.right.iter().enumerate() {
                                add_to(&mut mid1, [e, al, h, mu, nu], blk.mat[(i, j)]);
                            }
                        }
                        let mut out1: Vec5 = BTreeMap::new();
                        for (&[e2, al2, h, mu, nu], &v) in &mid1 {
                            let blk = f.block(a, b, h, x).unwrap();
                            let i = blk.left_index((e2, al2, nu)).unwrap();
                            for (j, &(k, rho, sig)) in blk.right.iter().enumerate() {
                                add_to(&mut out1, [h, mu, k, rho, sig], v * blk.mat[(i, j)]);
                            }
                        }
                        // route two: F^{abc}_g, F^{akd}_x, F^{bcd}_l
                        let mut mid2: Vec5 = BTreeMap::new();
                        if let Some(blk) = f.block(a, b, c, g) {
                            let i = blk.left_index((e, al, be)).unwrap();
                            for (j, &(k, ka, la)) in blk.right.iter().enumerate() {
                                add_to(&mut mid2, [k, ka, g, la, ga], blk.mat[(i, j)]);
                            }
                        }
                        let mut mid3: Vec5 = BTreeMap::new();
                        for (&[k, ka, g2, la, ga2], &v) in &mid2 {
                            let blk = f.block(a, k, d, x).unwrap();
                            let i = blk.left_index((g2, la, ga2)).unwrap();
                            for (j, &(l, rho, sig)) in blk.right.iter().enumerate() {
                                add_to(&mut mid3, [k, ka, l, rho, sig], v * blk.mat[(i, j)]);
                            }
                        }
                        let mut out2: Vec5 = BTreeMap::new();
                        for (&[k, ka, l, rho, sig], &v) in &mid3 {
                            let blk = f.block(b, c, d, l).unwrap();
                            let i = blk.left_index((k, ka, rho)).unwrap();
                            for (j, &(h, mu, rho2)) in blk.right.iter().enumerate() {
                                add_to(&mut out2, [h, mu, l, rho2, sig], v * blk.mat[(i, j)]);
                            }
                        }
                        let keys: BTreeSet<[usize; 5]> = out1.keys().chain(out2.keys()).copied().collect();
                        for k in keys {
                            let d1 = out1.get(&k).copied().unwrap_or(ZERO);
                            let d2 = out2.get(&k).copied().unwrap_or(ZERO);
                            worst = worst.max((d1 - d2).norm());
                        }
                    }
                }
            }
        }
    }
    worst
}

/// Residual of the unit constraint: blocks with a unit among `a,b,c` must
/// be the identity identification.
pub fn triangle_residual(f: &FSymbolSet) -> f64 {
    let mut worst: f64 = 0.0;
    for (&[a, b, c, d], blk) in f.blocks() {
        if a == 0 || b == 0 || c == 0 {
            let id = unit_block(a, b, c, d, &blk.left, &blk.right);
            worst = worst.max(linalg::max_abs(&(&blk.mat - id)));
        }
    }
    worst
}

/// Hexagon residual for the family `e(a, j, m)`, the matrix of the braiding
/// of `X_a` past `X_j` in channel `m` (convention of the R-symbols).
fn hexagon_family<E>(ring: &FusionRing, f: &FSymbolSet, e: E) -> f64
where
    E: Fn(Label, Label, Label) -> Mat,
{
    let r = ring.rank();
    let mut worst: f64 = 0.0;
    for a in 0..r {
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for ka in 0..ring.n(i, j, k) {
                        for m in 0..r {
                            for nu in 0..ring.n(a, k, m) {
                                // left side: coefficients on left trees ((i j)_k a)_m
                                let mut lhs: BTreeMap<Channel, C64> = BTreeMap::new();
                                let rk = e(a, k, m);
                                for be in 0..ring.n(k, a, m) {
                                    *lhs.entry((k, ka, be)).or_insert(ZERO) += rk[(nu, be)];
                                }
                                // right side
                                let mut rhs: BTreeMap<Channel, C64> = BTreeMap::new();
                                let b1 = f.block(a, i, j, m).unwrap();
                                let c1 = b1.right_index((k, ka, nu)).unwrap();
                                for (p, &(ee, al, be)) in b1.left.iter().enumerate() {
                                    let g = b1.inv[(c1, p)];
                                    if g == ZERO {
                                        continue;
                                    }
                                    let ri = e(a, i, ee);
                                    for al2 in 0..ring.n(i, a, ee) {
                                        let h = g * ri[(al, al2)];
                                        if h == ZERO {
                                            continue;
                                        }
                                        let b2 = f.block(i, a, j, m).unwrap();
                                        let row = b2.left_index((ee, al2, be)).unwrap();
                                        for (q, &(ff, ga, de)) in b2.right.iter().enumerate() {
                                            let h2 = h * b2.mat[(row, q)];
                                            if h2 == ZERO {
                                                continue;
                                            }
                                            let rj = e(a, j, ff);
                                            for ga2 in 0..ring.n(j, a, ff) {
                                                let h3 = h2 * rj[(ga, ga2)];
                                                if h3 == ZERO {
                                                    continue;
                                                }
                                                let b3 = f.block(i, j, a, m).unwrap();
                                                let c3 = b3.right_index((ff, ga2, de)).unwrap();
                                                for (s, ch) in b3.left.iter().enumerate() {
                                                    *rhs.entry(*ch).or_insert(ZERO) += h3 * b3.inv[(c3, s)];
                                                }
                                            }
                                        }
                                    }
                                }
                                let keys: BTreeSet<Channel> = lhs.keys().chain(rhs.keys()).copied().collect();
                                for key in keys {
                                    let x = lhs.get(&key).copied().unwrap_or(ZERO);
                                    let y = rhs.get(&key).copied().unwrap_or(ZERO);
                                    worst = worst.max((x - y).norm());
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    worst
}

/// Residuals of the two hexagon equations.
pub fn hexagon_residuals(ring: &FusionRing, f: &FSymbolSet, r: &RSymbolSet) -> (f64, f64) {
    let empty = |p: usize, q: usize| Mat::zeros(p, q);
    let h1 = hexagon_family(ring, f, |a, j, m| {
        r.block(a, j, m).cloned().unwrap_or_else(|| empty(ring.n(a, j, m), ring.n(j, a, m)))
    });
    let h2 = hexagon_family(ring, f, |a, j, m| match r.block(j, a, m) {
        Some(b) => b.clone().try_inverse().unwrap_or_else(|| empty(b.nrows(), b.ncols())),
        None => empty(ring.n(a, j, m), ring.n(j, a, m)),
    });
    (h1, h2)
}

/// Full validation. Thresholds scale with the tolerance.
pub fn validate(cat: &FusionCategoryData, tol: Tolerance) -> Certificate {
    let ring = &cat.ring;
    let r = ring.rank();
    let eps = tol.eps;
    let mut cert = Certificate::new();
    cert.push(Check::below("ring associativity", ring.associativity_defect() as f64, 0.5));
    cert.push(Check::below("frobenius reciprocity", ring.frobenius_defect() as f64, 0.5));
    cert.push(Check::below("pentagon", pentagon_residual(ring, &cat.f), eps));
    cert.push(Check::below("triangle", triangle_residual(&cat.f), eps));
    let mut cond: f64 = 1.0;
    for (_, blk) in cat.f.blocks() {
        let (smax, smin) = linalg::singular_range(&blk.mat);
        cond = cond.max(if smin > 0.0 { smax / smin } else { f64::INFINITY });
    }
    cert.push(Check::below("F-block condition number", cond, 1.0 / eps.sqrt()));
    let d = &cat.spherical.dims;
    let mut dim_eq: f64 = 0.0;
    for i in 0..r {
        for j in 0..r {
            let rhs: C64 = (0..r).map(|k| d[k] * ring.n(i, j, k) as f64).sum();
            dim_eq = dim_eq.max((d[i] * d[j] - rhs).norm());
        }
    }
    cert.push(Check::below("dimension equation", dim_eq, eps));
    let mut sph = (d[0] - ONE).norm();
    for i in 0..r {
        sph = sph.max((d[i] - d[ring.dual(i)]).norm());
        let p = cat.spherical.pivotal[i];
        let loop_rel = p * p * d[i] * d[i] * cat.f_loop(i) * cat.f_loop(ring.dual(i)) - ONE;
        sph = sph.max(loop_rel.norm());
    }
    cert.push(Check::below("sphericity", sph, eps));
    let dim_c: C64 = d.iter().map(|x| x * x).sum();
    cert.push(Check::above("|dim C|", dim_c.norm(), eps));
    if cat.unitary {
        let mut worst: f64 = 0.0;
        for (_, blk) in cat.f.blocks() {
            let u = blk.mat.adjoint() * &blk.mat;
            worst = worst.max(linalg::max_abs(&(u - Mat::identity(blk.mat.nrows(), blk.mat.ncols()))));
        }
        cert.push(Check::below("F unitarity", worst, eps));
    }
    if let Some(rs) = &cat.r {
        let mut inv_ok = true;
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    if let Some(m) = rs.block(a, b, c) {
                        let (_, smin) = linalg::singular_range(m);
                        inv_ok &= smin > eps;
                    }
                }
            }
        }
        cert.push(Check::flag("R-blocks invertible", inv_ok));
        let (h1, h2) = hexagon_residuals(ring, &cat.f, rs);
        cert.push(Check::below("hexagon", h1, eps));
        cert.push(Check::below("inverse hexagon", h2, eps));
    }
    cert
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn unit_constraint_is_schema_error() {
        let text = r#"{"name":"bad","labels":["1","x"],"dual":{"1":"1","x":"x"},
            "fusion":[["1","1","1",1],["1","x","x",1],["x","1","x",1],["x","x","1",1],["1","x","1",1]],
            "dims":{"1":[1,0],"x":[1,0]},"F":[]}"#;
        assert!(matches!(parse_category(text), Err(Error::SchemaError(_))));
    }

    #[test]
    fn unknown_field_is_parse_error() {
        let text = r#"{"name":"t","labels":["1"],"dual":{"1":"1"},"fusion":[["1","1","1",1]],
            "dims":{"1":[1,0]},"F":[],"colour":3}"#;
        assert!(matches!(parse_category(text), Err(Error::ParseError(_))));
    }

    #[test]
    fn trivial_category_from_text() {
        let text = r#"{"name":"t","labels":["1"],"dual":{"1":"1"},"fusion":[["1","1","1",1]],
            "dims":{"1":[1,0]},"F":[]}"#;
        let cat = parse_category(text).unwrap();
        assert!(validate(&cat, Tolerance::default()).pass());
        let (d, l) = global_dimension(&cat, Tolerance::default()).unwrap();
        assert!((d - ONE).norm() < 1e-15 && (l - ONE).norm() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        for cat in catalog::all() {
            let text = category_to_json(&cat);
            let back = parse_category(&text).unwrap();
            assert_eq!(back.ring, cat.ring, "{}", cat.name);
            for ((k, l, r), v) in cat.f.entries() {
                assert!((back.f.get(k, l, r) - v).norm() < 1e-15);
            }
            assert_eq!(back.r.is_some(), cat.r.is_some());
        }
    }

    #[test]
    fn bundled_categories_validate() {
        for cat in catalog::all() {
            let cert = validate(&cat, Tolerance::default());
            assert!(cert.pass(), "{}: {:?}", cat.name, cert.first_failure());
            for c in &cert.checks {
                if c.name == "pentagon" || c.name == "hexagon" || c.name == "inverse hexagon" {
                    assert!(c.residual < 1e-10, "{} {}", cat.name, c.name);
                }
            }
        }
    }

    #[test]
    fn fibonacci_dimension_and_lambda() {
        let cat = catalog::fibonacci();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((cat.dim(1).re - 1.6180339887).abs() < 1e-10);
        let (d, l) = global_dimension(&cat, Tolerance::default()).unwrap();
        assert!((d.re - (5.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((l.re - 1.9021130326).abs() < 1e-9);
        assert!((d.re - 1.0 - phi * phi).abs() < 1e-12);
    }

    #[test]
    fn global_dimensions_of_groups() {
        let t = Tolerance::default();
        let (d, l) = global_dimension(&catalog::vec_z2(), t).unwrap();
        assert!((d.re - 2.0).abs() < 1e-15 && (l.re - 2f64.sqrt()).abs() < 1e-15);
        let (d, l) = global_dimension(&catalog::vec_s3(), t).unwrap();
        assert!((d.re - 6.0).abs() < 1e-15 && (l.re - 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn yang_lee_dimension() {
        let cat = catalog::yang_lee();
        let cert = validate(&cat, Tolerance::default());
        assert!(cert.get("dimension equation").unwrap().pass);
        let (d, _) = global_dimension(&cat, Tolerance::default()).unwrap();
        assert!((d.re - 1.3819660113).abs() < 1e-9);
        assert!((d.re - (5.0 - 5f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn fibonacci_perturbation_breaks_pentagon() {
        let cat = catalog::fibonacci();
        let key = ([1, 1, 1, 1], (1, 0, 0), (1, 0, 0));
        let v = cat.f.get(key.0, key.1, key.2);
        let f2 = cat.f.with_entry(key, v + 1e-3).unwrap();
        let bad = FusionCategoryData { f: f2, ..cat };
        let cert = validate(&bad, Tolerance::default());
        assert!(!cert.get("pentagon").unwrap().pass);
    }

    #[test]
    fn zero_dimension_rejected() {
        let mut cat = catalog::vec_z2();
        cat.spherical = SphericalData::new(vec![ONE, c64(0.0, 1.0)], None);
        assert!(matches!(global_dimension(&cat, Tolerance::default()), Err(Error::ZeroDimension(_))));
    }

    #[test]
    fn relabeling_preserves_global_dimension() {
        let cat = catalog::vec_s3();
        let perm = [0, 3, 1, 5, 2, 4];
        let rel = cat.relabeled(&perm).unwrap();
        assert!(validate(&rel, Tolerance::default()).pass());
        let t = Tolerance::default();
        let (a, _) = global_dimension(&cat, t).unwrap();
        let (b, _) = global_dimension(&rel, t).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]
            #[test]
            fn single_entry_perturbation_breaks_pentagon(which in 0usize..64, sign in prop::bool::ANY, size in 1e-4f64..1e-2) {
                for cat in [catalog::fibonacci(), catalog::semion()] {
                    let entries: Vec<_> = cat.f.entries().into_iter()
                        .filter(|((k, _, _), _)| k[0] != 0 && k[1] != 0 && k[2] != 0)
                        .collect();
                    let (key, v) = entries[which % entries.len()];
                    let delta = if sign { size } else { -size };
                    let f2 = cat.f.with_entry(key, v + delta).unwrap();
                    let bad = FusionCategoryData { f: f2, ..cat.clone() };
                    prop_assert!(pentagon_residual(&bad.ring, &bad.f) > 1e-9);
                }
            }
        }
    }
}
