//! Morphisms between tensor words of simple objects in fusion-tree
//! coordinates.
//!
//! A word `w = (x_1, ..., x_n)` has the left-nested trees
//! `T : X_m -> x_1 ... x_n` as basis of `Hom(X_m, w)`; a tree records the
//! intermediate charges `(e_k, mu_k)` obtained by fusing one letter at a time.
//! A morphism `f : w -> w'` is stored as one matrix per total charge `m`,
//! with `f T_beta = sum_alpha f_m[alpha, beta] T'_alpha`.
//!
//! Objects are direct sums of words, so that morphisms between decomposed
//! objects (half-braidings, embeddings of summands) use the same type.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use rand::Rng;

use crate::error::{Error, Result};
use crate::fusion::{FusionCategoryData, Label};
use crate::linalg::{self, Mat};
use crate::scalar::{c64, C64, ONE, ZERO};

/// Longest word the calculus accepts.
pub const MAX_WORD: usize = 6;

/// Ordered list of simple labels; the empty word is the tensor unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectWord(pub Vec<Label>);

impl ObjectWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &ObjectWord) -> ObjectWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        ObjectWord(v)
    }
}

/// Direct sum of words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Object(pub Vec<ObjectWord>);

impl Object {
    pub fn word(labels: &[Label]) -> Object {
        Object(vec![ObjectWord(labels.to_vec())])
    }

    pub fn unit() -> Object {
        Object(vec![ObjectWord(Vec::new())])
    }

    /// Direct sum of single-letter words.
    pub fn simples(labels: &[Label]) -> Object {
        Object(labels.iter().map(|&l| ObjectWord(vec![l])).collect())
    }

    pub fn summands(&self) -> &[ObjectWord] {
        &self.0
    }

    /// Tensor product: summands `(s,t)` in `s`-major order.
    pub fn tensor(&self, other: &Object) -> Object {
        let mut out = Vec::with_capacity(self.0.len() * other.0.len());
        for u in &self.0 {
            for v in &other.0 {
                out.push(u.concat(v));
            }
        }
        Object(out)
    }

    pub fn max_len(&self) -> usize {
        self.0.iter().map(|w| w.len()).max().unwrap_or(0)
    }
}

impl fmt::Display for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|w| format!("({})", w.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// Intermediate `(charge, multiplicity)` for letters 2..n of a word.
pub type FusionTree = Vec<(Label, usize)>;

#[derive(Debug)]
pub struct TreeList {
    pub trees: Vec<FusionTree>,
    index: BTreeMap<FusionTree, usize>,
}

impl TreeList {
    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn index(&self, t: &FusionTree) -> Option<usize> {
        self.index.get(t).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct ProductEntry {
    a: Label,
    iu: usize,
    b: Label,
    iv: usize,
    mu: usize,
}

/// Basis change from `(T_u (x) T_v) t^{m,mu}_{ab}` to left-nested trees of
/// the concatenated word.
#[derive(Debug)]
struct ProductBasis {
    entries: Vec<ProductEntry>,
    mat: Mat,
    inv: Mat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkeletalMorphism {
    pub dom: Object,
    pub cod: Object,
    /// Indexed by total charge.
    pub blocks: Vec<Mat>,
}

impl SkeletalMorphism {
    pub fn is_endo(&self) -> bool {
        self.dom == self.cod
    }

    pub fn scale(&self, s: C64) -> SkeletalMorphism {
        SkeletalMorphism {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            blocks: self.blocks.iter().map(|b| b * s).collect(),
        }
    }

    fn same_shape(&self, other: &SkeletalMorphism) -> Result<()> {
        if self.dom != other.dom || self.cod != other.cod {
            return Err(Error::ShapeMismatch(format!(
                "{} -> {} vs {} -> {}",
                self.dom, self.cod, other.dom, other.cod
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &SkeletalMorphism) -> Result<SkeletalMorphism> {
        self.same_shape(other)?;
        Ok(SkeletalMorphism {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &SkeletalMorphism) -> Result<SkeletalMorphism> {
        self.add(&other.scale(-ONE))
    }

    pub fn add_assign(&mut self, other: &SkeletalMorphism) -> Result<()> {
        self.same_shape(other)?;
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a += b;
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    /// `max |self - other|`, infinite if the shapes differ.
    pub fn distance(&self, other: &SkeletalMorphism) -> f64 {
        match self.sub(other) {
            Ok(d) => d.max_abs(),
            Err(_) => f64::INFINITY,
        }
    }

    /// The scalar of a morphism between unit words.
    pub fn scalar(&self) -> C64 {
        let b = &self.blocks[0];
        if b.nrows() == 1 && b.ncols() == 1 {
            b[(0, 0)]
        } else {
            ZERO
        }
    }

    /// All block entries, charge-major and column-major within a block.
    pub fn coords(&self) -> Vec<C64> {
        self.blocks.iter().flat_map(|b| b.iter().copied()).collect()
    }

    pub fn n_coords(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    /// Inverse of an invertible morphism (blockwise).
    pub fn inverse(&self) -> Result<SkeletalMorphism> {
        let blocks = self
            .blocks
            .iter()
            .map(linalg::inverse)
            .collect::<Result<Vec<_>>>()?;
        Ok(SkeletalMorphism {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            blocks,
        })
    }

    /// Smallest singular value over the blocks (invertibility margin).
    pub fn min_singular(&self) -> f64 {
        let mut out = f64::INFINITY;
        for b in &self.blocks {
            if b.is_empty() {
                continue;
            }
            if b.nrows() != b.ncols() {
                return 0.0;
            }
            out = out.min(linalg::singular_range(b).1);
        }
        out
    }
}

/// Which bracketing of a three-letter word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assoc {
    /// `(ab)c`
    Left,
    /// `a(bc)`
    Right,
}

/// Evaluation context over one category. Tree lists and basis changes are
/// memoised; the memo tables are the only interior state.
#[derive(Debug)]
pub struct Calculus {
    cat: Arc<FusionCategoryData>,
    trees: RwLock<BTreeMap<(Vec<Label>, Label), Arc<TreeList>>>,
    products: RwLock<BTreeMap<(Vec<Label>, Vec<Label>, Label), Arc<ProductBasis>>>,
}

impl Clone for Calculus {
    fn clone(&self) -> Self {
        Calculus::new(self.cat.clone())
    }
}

impl Calculus {
    pub fn new(cat: Arc<FusionCategoryData>) -> Self {
        Calculus {
            cat,
            trees: RwLock::new(BTreeMap::new()),
            products: RwLock::new(BTreeMap::new()),
        }
    }

    pub fn from_data(cat: &FusionCategoryData) -> Self {
        Self::new(Arc::new(cat.clone()))
    }

    pub fn cat(&self) -> &FusionCategoryData {
        &self.cat
    }

    pub fn cat_arc(&self) -> Arc<FusionCategoryData> {
        self.cat.clone()
    }

    pub fn rank(&self) -> usize {
        self.cat.rank()
    }

    /// Left-nested trees of `word` with total charge `m`.
    pub fn trees(&self, word: &[Label], m: Label) -> Arc<TreeList> {
        let key = (word.to_vec(), m);
        if let Some(t) = self.trees.read().unwrap().get(&key) {
            return t.clone();
        }
        let list = self.build_trees(word, m);
        let index = list.iter().cloned().enumerate().map(|(k, t)| (t, k)).collect();
        let t = Arc::new(TreeList { trees: list, index });
        self.trees.write().unwrap().insert(key, t.clone());
        t
    }

    fn build_trees(&self, word: &[Label], m: Label) -> Vec<FusionTree> {
        let n = word.len();
        match n {
            0 => {
                if m == 0 {
                    vec![Vec::new()]
                } else {
                    Vec::new()
                }
            }
            1 => {
                if m == word[0] {
                    vec![Vec::new()]
                } else {
                    Vec::new()
                }
            }
            _ => {
                let last = word[n - 1];
                let mut out = Vec::new();
                for e in 0..self.rank() {
                    let nm = self.cat.n(e, last, m);
                    if nm == 0 {
                        continue;
                    }
                    for t in self.trees(&word[..n - 1], e).trees.iter() {
                        for mu in 0..nm {
                            let mut t2 = t.clone();
                            t2.push((m, mu));
                            out.push(t2);
                        }
                    }
                }
                out
            }
        }
    }

    pub fn n_trees(&self, word: &[Label], m: Label) -> usize {
        self.trees(word, m).len()
    }

    /// Dimension of `Hom(X_m, obj)`.
    pub fn obj_dim(&self, obj: &Object, m: Label) -> usize {
        obj.0.iter().map(|w| self.n_trees(&w.0, m)).sum()
    }

    fn offsets(&self, obj: &Object, m: Label) -> Vec<usize> {
        let mut off = Vec::with_capacity(obj.0.len() + 1);
        let mut acc = 0;
        for w in &obj.0 {
            off.push(acc);
            acc += self.n_trees(&w.0, m);
        }
        off.push(acc);
        off
    }

    pub fn hom_dim(&self, dom: &Object, cod: &Object) -> usize {
        (0..self.rank()).map(|m| self.obj_dim(dom, m) * self.obj_dim(cod, m)).sum()
    }

    pub fn zero(&self, dom: &Object, cod: &Object) -> SkeletalMorphism {
        let blocks = (0..self.rank())
            .map(|m| Mat::zeros(self.obj_dim(cod, m), self.obj_dim(dom, m)))
            .collect();
        SkeletalMorphism {
            dom: dom.clone(),
            cod: cod.clone(),
            blocks,
        }
    }

    pub fn identity(&self, obj: &Object) -> SkeletalMorphism {
        let blocks = (0..self.rank())
            .map(|m| {
                let d = self.obj_dim(obj, m);
                Mat::identity(d, d)
            })
            .collect();
        SkeletalMorphism {
            dom: obj.clone(),
            cod: obj.clone(),
            blocks,
        }
    }

    pub fn identity_word(&self, w: &[Label]) -> SkeletalMorphism {
        self.identity(&Object::word(w))
    }

    /// Builds a morphism from explicit blocks, checking their shapes.
    pub fn from_blocks(&self, dom: &Object, cod: &Object, blocks: Vec<Mat>) -> Result<SkeletalMorphism> {
        if blocks.len() != self.rank() {
            return Err(Error::ShapeMismatch("number of blocks".into()));
        }
        for (m, b) in blocks.iter().enumerate() {
            if b.shape() != (self.obj_dim(cod, m), self.obj_dim(dom, m)) {
                return Err(Error::ShapeMismatch(format!("block {m} of {dom} -> {cod}")));
            }
        }
        Ok(SkeletalMorphism {
            dom: dom.clone(),
            cod: cod.clone(),
            blocks,
        })
    }

    /// Basis of `Hom(dom, cod)` by matrix units, charge-major.
    pub fn hom_basis(&self, dom: &Object, cod: &Object) -> Vec<SkeletalMorphism> {
        let z = self.zero(dom, cod);
        let mut out = Vec::new();
        for m in 0..self.rank() {
            let (r, c) = z.blocks[m].shape();
            for j in 0..c {
                for i in 0..r {
                    let mut e = z.clone();
                    e.blocks[m][(i, j)] = ONE;
                    out.push(e);
                }
            }
        }
        out
    }

    /// Morphism with coordinates `coords` in the order of [`Self::hom_basis`].
    pub fn from_coords(&self, dom: &Object, cod: &Object, coords: &[C64]) -> Result<SkeletalMorphism> {
        let mut z = self.zero(dom, cod);
        if coords.len() != z.n_coords() {
            return Err(Error::ShapeMismatch("coordinate vector length".into()));
        }
        let mut k = 0;
        for b in z.blocks.iter_mut() {
            for x in b.iter_mut() {
                *x = coords[k];
                k += 1;
            }
        }
        Ok(z)
    }

    /// Uniformly random complex entries in the unit square.
    pub fn random<R: Rng>(&self, dom: &Object, cod: &Object, rng: &mut R) -> SkeletalMorphism {
        let mut z = self.zero(dom, cod);
        for b in z.blocks.iter_mut() {
            for x in b.iter_mut() {
                *x = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        z
    }

    /// `f o g`.
    pub fn compose(&self, f: &SkeletalMorphism, g: &SkeletalMorphism) -> Result<SkeletalMorphism> {
        if g.cod != f.dom {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose {} -> {} after {} -> {}",
                f.dom, f.cod, g.dom, g.cod
            )));
        }
        Ok(SkeletalMorphism {
            dom: g.dom.clone(),
            cod: f.cod.clone(),
            blocks: f.blocks.iter().zip(&g.blocks).map(|(a, b)| a * b).collect(),
        })
    }

    /// Composes a chain `fs[0] o fs[1] o ... o fs[n-1]`.
    pub fn compose_all(&self, fs: &[&SkeletalMorphism]) -> Result<SkeletalMorphism> {
        let acc = fs.last().ok_or_else(|| Error::ShapeMismatch("empty chain".into()))?;
        let mut acc = (*acc).clone();
        for f in fs.iter().rev().skip(1) {
            acc = self.compose(f, &acc)?;
        }
        Ok(acc)
    }

    fn expand(
        &self,
        u: &[Label],
        tu: &FusionTree,
        a: Label,
        v: &[Label],
        tv: &FusionTree,
        b: Label,
        m: Label,
        mu: usize,
    ) -> Vec<(FusionTree, C64)> {
        if v.is_empty() {
            debug_assert!(b == 0 && m == a);
            return vec![(tu.clone(), ONE)];
        }
        if u.is_empty() {
            debug_assert!(a == 0 && m == b);
            return vec![(tv.clone(), ONE)];
        }
        if v.len() == 1 {
            let mut t = tu.clone();
            t.push((m, mu));
            return vec![(t, ONE)];
        }
        let (vp, x) = (&v[..v.len() - 1], v[v.len() - 1]);
        let tvp: FusionTree = tv[..tv.len() - 1].to_vec();
        let (bb, nu) = tv[tv.len() - 1];
        debug_assert_eq!(bb, b);
        let bprime = if vp.len() == 1 { vp[0] } else { tvp[tvp.len() - 1].0 };
        let blk = self.cat.f.block(a, bprime, x, m).expect("F-block for a nonzero channel");
        let j = blk.right_index((b, nu, mu)).expect("right channel");
        let mut out: Vec<(FusionTree, C64)> = Vec::new();
        for (i, &(e, al, be)) in blk.left.iter().enumerate() {
            let g = blk.inv[(j, i)];
            if g == ZERO {
                continue;
            }
            for (mut t, c) in self.expand(u, tu, a, vp, &tvp, bprime, e, al) {
                t.push((m, be));
                out.push((t, g * c));
            }
        }
        out
    }

    fn product_basis(&self, u: &[Label], v: &[Label], m: Label) -> Arc<ProductBasis> {
        let key = (u.to_vec(), v.to_vec(), m);
        if let Some(p) = self.products.read().unwrap().get(&key) {
            return p.clone();
        }
        let mut uv = u.to_vec();
        uv.extend_from_slice(v);
        let target = self.trees(&uv, m);
        let mut entries = Vec::new();
        let r = self.rank();
        for a in 0..r {
            let tu = self.trees(u, a);
            if tu.is_empty() {
                continue;
            }
            for b in 0..r {
                let tv = self.trees(v, b);
                if tv.is_empty() {
                    continue;
                }
                for mu in 0..self.cat.n(a, b, m) {
                    for iu in 0..tu.len() {
                        for iv in 0..tv.len() {
                            entries.push(ProductEntry { a, iu, b, iv, mu });
                        }
                    }
                }
            }
        }
        assert_eq!(entries.len(), target.len(), "fusion ring is not associative");
        let mut mat = Mat::zeros(target.len(), entries.len());
        for (col, e) in entries.iter().enumerate() {
            let tu = &self.trees(u, e.a).trees[e.iu];
            let tv = &self.trees(v, e.b).trees[e.iv];
            for (t, c) in self.expand(u, tu, e.a, v, tv, e.b, m, e.mu) {
                let row = target.index(&t).expect("expanded tree in the target basis");
                mat[(row, col)] += c;
            }
        }
        let inv = mat.clone().try_inverse().expect("tensor basis change is invertible");
        let p = Arc::new(ProductBasis { entries, mat, inv });
        self.products.write().unwrap().insert(key, p.clone());
        p
    }

    /// `f (x) g`, re-expressed in left-nested trees.
    pub fn tensor(&self, f: &SkeletalMorphism, g: &SkeletalMorphism) -> Result<SkeletalMorphism> {
        let dom = f.dom.tensor(&g.dom);
        let cod = f.cod.tensor(&g.cod);
        if dom.max_len().max(cod.max_len()) > MAX_WORD {
            return Err(Error::WordTooLong {
                len: dom.max_len().max(cod.max_len()),
                max: MAX_WORD,
            });
        }
        let r = self.rank();
        // offsets of summands inside the blocks of f and g
        let f_dom_off: Vec<Vec<usize>> = (0..r).map(|a| self.offsets(&f.dom, a)).collect();
        let f_cod_off: Vec<Vec<usize>> = (0..r).map(|a| self.offsets(&f.cod, a)).collect();
        let g_dom_off: Vec<Vec<usize>> = (0..r).map(|a| self.offsets(&g.dom, a)).collect();
        let g_cod_off: Vec<Vec<usize>> = (0..r).map(|a| self.offsets(&g.cod, a)).collect();
        let mut blocks = Vec::with_capacity(r);
        for m in 0..r {
            let nd = self.obj_dim(&dom, m);
            let nc = self.obj_dim(&cod, m);
            if nd == 0 || nc == 0 {
                blocks.push(Mat::zeros(nc, nd));
                continue;
            }
            // product bases per summand pair, with global offsets
            let collect = |x: &Object, y: &Object| -> Vec<(usize, usize, usize, Arc<ProductBasis>)> {
                let mut out = Vec::new();
                let mut off = 0;
                for (s, u) in x.0.iter().enumerate() {
                    for (t, v) in y.0.iter().enumerate() {
                        let pb = self.product_basis(&u.0, &v.0, m);
                        let len = pb.entries.len();
                        out.push((s, t, off, pb));
                        off += len;
                    }
                }
                out
            };
            let dpb = collect(&f.dom, &g.dom);
            let cpb = collect(&f.cod, &g.cod);
            // K: product-basis coordinates of f (x) g
            let mut k = Mat::zeros(nc, nd);
            for (r_, q, coff, cp) in &cpb {
                for (ci, ce) in cp.entries.iter().enumerate() {
                    for (s, t, doff, dp) in &dpb {
                        for (di, de) in dp.entries.iter().enumerate() {
                            if de.a != ce.a || de.b != ce.b || de.mu != ce.mu {
                                continue;
                            }
                            let fv = f.blocks[ce.a][(f_cod_off[ce.a][*r_] + ce.iu, f_dom_off[ce.a][*s] + de.iu)];
                            if fv == ZERO {
                                continue;
                            }
                            let gv = g.blocks[ce.b][(g_cod_off[ce.b][*q] + ce.iv, g_dom_off[ce.b][*t] + de.iv)];
                            k[(coff + ci, doff + di)] = fv * gv;
                        }
                    }
                }
            }
            // B_cod K B_dom^{-1}, both block diagonal
            let mut left = Mat::zeros(nc, nc);
            for (_, _, off, pb) in &cpb {
                let l = pb.entries.len();
                left.view_mut((*off, *off), (l, l)).copy_from(&pb.mat);
            }
            let mut right = Mat::zeros(nd, nd);
            for (_, _, off, pb) in &dpb {
                let l = pb.entries.len();
                right.view_mut((*off, *off), (l, l)).copy_from(&pb.inv);
            }
            blocks.push(left * k * right);
        }
        Ok(SkeletalMorphism { dom, cod, blocks })
    }

    /// `id_obj (x) f`.
    pub fn id_tensor(&self, obj: &Object, f: &SkeletalMorphism) -> Result<SkeletalMorphism> {
        self.tensor(&self.identity(obj), f)
    }

    /// `f (x) id_obj`.
    pub fn tensor_id(&self, f: &SkeletalMorphism, obj: &Object) -> Result<SkeletalMorphism> {
        self.tensor(f, &self.identity(obj))
    }

    /// Change of basis from one bracketing of `(a,b,c)` to the other, in
    /// total charge `d`. Rows index the target bracketing.
    pub fn f_move(&self, word: [Label; 3], d: Label, from: Assoc, to: Assoc) -> Result<Mat> {
        let [a, b, c] = word;
        let blk = match self.cat.f.block(a, b, c, d) {
            Some(b) => b,
            None => return Ok(Mat::zeros(0, 0)),
        };
        if linalg::singular_range(&blk.mat).1 <= 1e-14 {
            return Err(Error::SingularF([a, b, c, d]));
        }
        // L_i = sum_j F_ij R_j: coordinates transform with F^T from
        // left to right.
        Ok(match (from, to) {
            (Assoc::Left, Assoc::Right) => blk.mat.transpose(),
            (Assoc::Right, Assoc::Left) => blk.inv.transpose(),
            _ => Mat::identity(blk.left.len(), blk.left.len()),
        })
    }

    /// Vertex `t^{m,mu}_{ab} : X_m -> X_a X_b`.
    pub fn vertex(&self, a: Label, b: Label, m: Label, mu: usize) -> Result<SkeletalMorphism> {
        if mu >= self.cat.n(a, b, m) {
            return Err(Error::ShapeMismatch(format!("no vertex ({a},{b};{m}) #{mu}")));
        }
        let mut z = self.zero(&Object::word(&[m]), &Object::word(&[a, b]));
        z.blocks[m][(mu, 0)] = ONE;
        Ok(z)
    }

    /// Dual vertex `t'^{m,mu}_{ab} : X_a X_b -> X_m` with `t' t = delta`.
    pub fn covertex(&self, a: Label, b: Label, m: Label, mu: usize) -> Result<SkeletalMorphism> {
        if mu >= self.cat.n(a, b, m) {
            return Err(Error::ShapeMismatch(format!("no vertex ({a},{b};{m}) #{mu}")));
        }
        let mut z = self.zero(&Object::word(&[a, b]), &Object::word(&[m]));
        z.blocks[m][(0, mu)] = ONE;
        Ok(z)
    }

    /// `coev_a : 1 -> a ā`.
    pub fn coev(&self, a: Label) -> SkeletalMorphism {
        let ad = self.cat.dual(a);
        let mut z = self.zero(&Object::unit(), &Object::word(&[a, ad]));
        z.blocks[0][(0, 0)] = ONE;
        z
    }

    /// `ev_a : ā a -> 1`, the partner of [`Self::coev`].
    pub fn ev(&self, a: Label) -> SkeletalMorphism {
        let ad = self.cat.dual(a);
        let mut z = self.zero(&Object::word(&[ad, a]), &Object::unit());
        z.blocks[0][(0, 0)] = ONE / self.cat.f_loop(a);
        z
    }

    fn pivot_scale(&self, a: Label) -> C64 {
        let ad = self.cat.dual(a);
        self.cat.spherical.pivotal[a] * self.cat.dim(a) * self.cat.f_loop(ad)
    }

    /// `coev'_a : 1 -> ā a`, the cup of the reflected duality.
    pub fn coev_left(&self, a: Label) -> SkeletalMorphism {
        let ad = self.cat.dual(a);
        let mut z = self.zero(&Object::unit(), &Object::word(&[ad, a]));
        z.blocks[0][(0, 0)] = ONE / self.pivot_scale(a);
        z
    }

    /// `ev'_a : a ā -> 1`, normalised so that `ev'_a coev_a = d_a`.
    pub fn ev_left(&self, a: Label) -> SkeletalMorphism {
        let ad = self.cat.dual(a);
        let mut z = self.zero(&Object::word(&[a, ad]), &Object::unit());
        z.blocks[0][(0, 0)] = self.pivot_scale(a) / self.cat.f_loop(ad);
        z
    }

    /// Dual word `w̄` (reversed, letters dualised).
    pub fn dual_word(&self, w: &[Label]) -> Vec<Label> {
        w.iter().rev().map(|&x| self.cat.dual(x)).collect()
    }

    /// `coev_w : 1 -> w w̄`.
    pub fn coev_word(&self, w: &[Label]) -> Result<SkeletalMorphism> {
        match w.split_last() {
            None => Ok(self.identity(&Object::unit())),
            Some((&x, rest)) => {
                let inner = self.coev_word(rest)?;
                let mid = self.tensor(
                    &self.tensor(&self.identity_word(rest), &self.coev(x))?,
                    &self.identity_word(&self.dual_word(rest)),
                )?;
                self.compose(&mid, &inner)
            }
        }
    }

    /// `ev'_w : w w̄ -> 1`.
    pub fn ev_left_word(&self, w: &[Label]) -> Result<SkeletalMorphism> {
        match w.split_last() {
            None => Ok(self.identity(&Object::unit())),
            Some((&x, rest)) => {
                let outer = self.ev_left_word(rest)?;
                let mid = self.tensor(
                    &self.tensor(&self.identity_word(rest), &self.ev_left(x))?,
                    &self.identity_word(&self.dual_word(rest)),
                )?;
                self.compose(&outer, &mid)
            }
        }
    }

    /// `coev'_w : 1 -> w̄ w`.
    pub fn coev_left_word(&self, w: &[Label]) -> Result<SkeletalMorphism> {
        match w.split_last() {
            None => Ok(self.identity(&Object::unit())),
            Some((&x, rest)) => {
                let inner = self.coev_left(x);
                let mid = self.tensor(
                    &self.tensor(&self.identity_word(&[self.cat.dual(x)]), &self.coev_left_word(rest)?)?,
                    &self.identity_word(&[x]),
                )?;
                self.compose(&mid, &inner)
            }
        }
    }

    /// `ev_w : w̄ w -> 1`.
    pub fn ev_word(&self, w: &[Label]) -> Result<SkeletalMorphism> {
        match w.split_last() {
            None => Ok(self.identity(&Object::unit())),
            Some((&x, rest)) => {
                let outer = self.ev(x);
                let mid = self.tensor(
                    &self.tensor(&self.identity_word(&[self.cat.dual(x)]), &self.ev_word(rest)?)?,
                    &self.identity_word(&[x]),
                )?;
                self.compose(&outer, &mid)
            }
        }
    }

    /// `sum_m d_m Tr f_m`.
    pub fn trace(&self, f: &SkeletalMorphism) -> Result<C64> {
        if !f.is_endo() {
            return Err(Error::ShapeMismatch(format!("trace of {} -> {}", f.dom, f.cod)));
        }
        Ok(f.blocks
            .iter()
            .enumerate()
            .map(|(m, b)| self.cat.dim(m) * linalg::trace(b))
            .sum())
    }

    fn single_word(&self, f: &SkeletalMorphism) -> Result<Vec<Label>> {
        if !f.is_endo() || f.dom.0.len() != 1 {
            return Err(Error::ShapeMismatch("diagrammatic trace needs an endomorphism of one word".into()));
        }
        Ok(f.dom.0[0].0.clone())
    }

    /// `ev'_w (f (x) id_w̄) coev_w`.
    pub fn right_trace(&self, f: &SkeletalMorphism) -> Result<C64> {
        let w = self.single_word(f)?;
        let wd = self.dual_word(&w);
        let mid = self.tensor_id(f, &Object::word(&wd))?;
        let x = self.compose_all(&[&self.ev_left_word(&w)?, &mid, &self.coev_word(&w)?])?;
        Ok(x.scalar())
    }

    /// `ev_w (id_w̄ (x) f) coev'_w`.
    pub fn left_trace(&self, f: &SkeletalMorphism) -> Result<C64> {
        let w = self.single_word(f)?;
        let wd = self.dual_word(&w);
        let mid = self.id_tensor(&Object::word(&wd), f)?;
        let x = self.compose_all(&[&self.ev_word(&w)?, &mid, &self.coev_left_word(&w)?])?;
        Ok(x.scalar())
    }

    /// Dual basis of a basis of `Hom(X_k, X_i X_j)`.
    pub fn dual_basis(&self, basis: &[SkeletalMorphism]) -> Result<Vec<SkeletalMorphism>> {
        let first = basis.first().ok_or(Error::DegenerateBasis)?;
        let (dom, cod) = (first.dom.clone(), first.cod.clone());
        let k = match dom.0.as_slice() {
            [w] if w.len() == 1 => w.0[0],
            _ => return Err(Error::ShapeMismatch("dual basis needs a simple domain".into())),
        };
        let n = self.obj_dim(&cod, k);
        if basis.len() != n {
            return Err(Error::DegenerateBasis);
        }
        let mut v = Mat::zeros(n, n);
        for (col, t) in basis.iter().enumerate() {
            if t.dom != dom || t.cod != cod {
                return Err(Error::ShapeMismatch("mixed basis".into()));
            }
            v.set_column(col, &t.blocks[k].column(0));
        }
        let (smax, smin) = linalg::singular_range(&v);
        if smin <= 1e-12 * smax.max(1.0) {
            return Err(Error::DegenerateBasis);
        }
        let vinv = linalg::inverse(&v)?;
        Ok((0..n)
            .map(|row| {
                let mut z = self.zero(&cod, &dom);
                z.blocks[k].set_row(0, &vinv.row(row));
                z
            })
            .collect())
    }

    /// Inclusion of summand `s` of `obj` (a single word) into `obj`.
    pub fn summand_inclusion(&self, obj: &Object, s: usize) -> SkeletalMorphism {
        let w = Object(vec![obj.0[s].clone()]);
        let mut z = self.zero(&w, obj);
        for m in 0..self.rank() {
            let off = self.offsets(obj, m);
            for k in 0..(off[s + 1] - off[s]) {
                z.blocks[m][(off[s] + k, k)] = ONE;
            }
        }
        z
    }

    /// Projection of `obj` onto its summand `s`.
    pub fn summand_projection(&self, obj: &Object, s: usize) -> SkeletalMorphism {
        let w = Object(vec![obj.0[s].clone()]);
        let mut z = self.zero(obj, &w);
        for m in 0..self.rank() {
            let off = self.offsets(obj, m);
            for k in 0..(off[s + 1] - off[s]) {
                z.blocks[m][(k, off[s] + k)] = ONE;
            }
        }
        z
    }

    /// The block `(r, s)` of a morphism between direct sums, as a morphism
    /// from summand `s` of the domain to summand `r` of the codomain.
    pub fn component(&self, f: &SkeletalMorphism, r: usize, s: usize) -> Result<SkeletalMorphism> {
        let p = self.summand_projection(&f.cod, r);
        let i = self.summand_inclusion(&f.dom, s);
        self.compose_all(&[&p, f, &i])
    }

    /// Assembles a morphism between direct sums from its components,
    /// `parts[r][s] : dom_s -> cod_r`.
    pub fn assemble(&self, dom: &Object, cod: &Object, parts: &[Vec<SkeletalMorphism>]) -> Result<SkeletalMorphism> {
        let mut z = self.zero(dom, cod);
        for m in 0..self.rank() {
            let doff = self.offsets(dom, m);
            let coff = self.offsets(cod, m);
            for (r, row) in parts.iter().enumerate() {
                for (s, p) in row.iter().enumerate() {
                    let b = &p.blocks[m];
                    if b.shape() != (coff[r + 1] - coff[r], doff[s + 1] - doff[s]) {
                        return Err(Error::ShapeMismatch(format!("component ({r},{s})")));
                    }
                    z.blocks[m].view_mut((coff[r], doff[s]), b.shape()).copy_from(b);
                }
            }
        }
        Ok(z)
    }

    /// Re-labels the summands of a morphism's domain and codomain without
    /// changing coordinates (the words must have the same tree spaces).
    pub fn retype(&self, f: &SkeletalMorphism, dom: &Object, cod: &Object) -> Result<SkeletalMorphism> {
        self.from_blocks(dom, cod, f.blocks.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn calc(cat: FusionCategoryData) -> Calculus {
        Calculus::from_data(&cat)
    }

    fn test_cats() -> Vec<FusionCategoryData> {
        catalog::all()
    }

    #[test]
    fn hom_dims_fibonacci() {
        let c = calc(catalog::fibonacci());
        assert_eq!(c.hom_dim(&Object::word(&[1, 1]), &Object::word(&[1, 1])), 2);
        assert_eq!(c.hom_dim(&Object::word(&[1]), &Object::word(&[1, 1, 1])), 2);
        // oracle: enumerate internal labels e with tau in e (x) tau, e in tau (x) tau
        let mut count = 0;
        for e in 0..2 {
            if c.cat().n(1, 1, e) > 0 && c.cat().n(e, 1, 1) > 0 {
                count += 1;
            }
        }
        assert_eq!(count, 2);
    }

    #[test]
    fn hom_dims_s3() {
        let cat = catalog::vec_s3();
        let g = catalog::s3_group();
        let c = calc(cat);
        for a in 0..6 {
            for b in 0..6 {
                for k in 0..6 {
                    let want = usize::from(g.mul(a, b) == g.mul(b, k));
                    assert_eq!(c.hom_dim(&Object::word(&[a, b]), &Object::word(&[b, k])), want);
                }
            }
        }
    }

    #[test]
    fn fibonacci_f_move_block() {
        let c = calc(catalog::fibonacci());
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let f = c.f_move([1, 1, 1], 1, Assoc::Left, Assoc::Right).unwrap();
        let want = [[1.0 / phi, 1.0 / phi.sqrt()], [1.0 / phi.sqrt(), -1.0 / phi]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((f[(i, j)].re - want[j][i]).abs() < 1e-12);
            }
        }
        let back = c.f_move([1, 1, 1], 1, Assoc::Right, Assoc::Left).unwrap();
        assert!(linalg::max_abs(&(back * f - Mat::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn f_move_with_unit_is_identity() {
        for cat in test_cats() {
            let c = calc(cat);
            let r = c.rank();
            for a in 0..r {
                for b in 0..r {
                    for d in 0..r {
                        for w in [[0, a, b], [a, 0, b], [a, b, 0]] {
                            let f = c.f_move(w, d, Assoc::Left, Assoc::Right).unwrap();
                            let n = f.nrows();
                            assert!(linalg::max_abs(&(f - Mat::identity(n, n))) < 1e-14);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn identity_tensor_identity() {
        for cat in test_cats() {
            let c = calc(cat);
            let r = c.rank();
            for a in 0..r {
                for b in 0..r {
                    let t = c.tensor(&c.identity_word(&[a]), &c.identity_word(&[b])).unwrap();
                    assert!(t.distance(&c.identity_word(&[a, b])) < 1e-13);
                    let t3 = c.tensor(&c.identity_word(&[a, b]), &c.identity_word(&[b, a])).unwrap();
                    assert!(t3.distance(&c.identity_word(&[a, b, b, a])) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn tensor_with_unit_word() {
        let c = calc(catalog::fibonacci());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = c.random(&Object::word(&[1, 1]), &Object::word(&[1, 1]), &mut rng);
        let u = c.identity(&Object::unit());
        assert!(c.tensor(&f, &u).unwrap().distance(&f) < 1e-14);
        assert!(c.tensor(&u, &f).unwrap().distance(&f) < 1e-14);
    }

    #[test]
    fn interchange_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for cat in [catalog::fibonacci(), catalog::semion(), catalog::vec_s3(), catalog::yang_lee()] {
            let c = calc(cat);
            let r = c.rank();
            for _ in 0..10 {
                let pick = |rng: &mut ChaCha8Rng| rng.gen_range(0..r);
                let (a, b, x, y) = (pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng));
                let u = Object::word(&[a, b]);
                let v = Object::word(&[x]);
                let w = Object::word(&[y, a]);
                let f1 = c.random(&u, &u, &mut rng);
                let f2 = c.random(&u, &u, &mut rng);
                let g1 = c.random(&v, &v, &mut rng);
                let g2 = c.random(&w, &v, &mut rng);
                let lhs = c.compose(&c.tensor(&f1, &g1).unwrap(), &c.tensor(&f2, &g2).unwrap()).unwrap();
                let rhs = c.tensor(&c.compose(&f1, &f2).unwrap(), &c.compose(&g1, &g2).unwrap()).unwrap();
                assert!(lhs.distance(&rhs) < 1e-10);
            }
        }
    }

    #[test]
    fn tensor_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = calc(catalog::fibonacci());
        let t = Object::word(&[1]);
        let tt = Object::word(&[1, 1]);
        for _ in 0..5 {
            let f = c.random(&t, &tt, &mut rng);
            let g = c.random(&tt, &t, &mut rng);
            let h = c.random(&t, &t, &mut rng);
            let l = c.tensor(&c.tensor(&f, &g).unwrap(), &h).unwrap();
            let r = c.tensor(&f, &c.tensor(&g, &h).unwrap()).unwrap();
            assert!(l.distance(&r) < 1e-10);
        }
    }

    #[test]
    fn composition_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = calc(catalog::fibonacci());
        let o = Object::word(&[1, 1, 1]);
        let f = c.random(&o, &o, &mut rng);
        let g = c.random(&o, &o, &mut rng);
        let h = c.random(&o, &o, &mut rng);
        let l = c.compose(&c.compose(&f, &g).unwrap(), &h).unwrap();
        let r = c.compose(&f, &c.compose(&g, &h).unwrap()).unwrap();
        assert!(l.distance(&r) < 1e-12);
        assert!(c.compose(&f, &c.identity(&o)).unwrap().distance(&f) < 1e-15);
    }

    #[test]
    fn compose_shape_mismatch() {
        let c = calc(catalog::fibonacci());
        let f = c.identity_word(&[1]);
        let g = c.identity_word(&[1, 1]);
        assert!(matches!(c.compose(&f, &g), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn zigzag_identities() {
        for cat in test_cats() {
            let c = calc(cat);
            for a in 0..c.rank() {
                let ad = c.cat().dual(a);
                let ia = c.identity_word(&[a]);
                let iad = c.identity_word(&[ad]);
                // (id_a ev_a)(coev_a id_a) = id_a
                let z1 = c
                    .compose(&c.tensor(&ia, &c.ev(a)).unwrap(), &c.tensor(&c.coev(a), &ia).unwrap())
                    .unwrap();
                assert!(z1.distance(&ia) < 1e-10, "{} {a}", c.cat().name);
                // (ev_a id_ā)(id_ā coev_a) = id_ā
                let z2 = c
                    .compose(&c.tensor(&c.ev(a), &iad).unwrap(), &c.tensor(&iad, &c.coev(a)).unwrap())
                    .unwrap();
                assert!(z2.distance(&iad) < 1e-10, "{} {a}", c.cat().name);
                // reflected pair
                let z3 = c
                    .compose(&c.tensor(&c.ev_left(a), &ia).unwrap(), &c.tensor(&ia, &c.coev_left(a)).unwrap())
                    .unwrap();
                assert!(z3.distance(&ia) < 1e-10);
                let z4 = c
                    .compose(&c.tensor(&iad, &c.ev_left(a)).unwrap(), &c.tensor(&c.coev_left(a), &iad).unwrap())
                    .unwrap();
                assert!(z4.distance(&iad) < 1e-10);
            }
        }
    }

    #[test]
    fn loops_equal_dimensions() {
        for cat in test_cats() {
            let c = calc(cat);
            for a in 0..c.rank() {
                let d = c.cat().dim(a);
                let right = c.compose(&c.ev_left(a), &c.coev(a)).unwrap().scalar();
                let left = c.compose(&c.ev(a), &c.coev_left(a)).unwrap().scalar();
                assert!((right - d).norm() < 1e-10);
                assert!((left - d).norm() < 1e-10, "{} {a}", c.cat().name);
            }
        }
        let c = calc(catalog::fibonacci());
        let oracle = 1.0 / c.cat().f_loop(1).norm();
        assert!((c.compose(&c.ev_left(1), &c.coev(1)).unwrap().scalar().re - oracle).abs() < 1e-10);
        assert!((oracle - 1.6180339887).abs() < 1e-9);
        assert!((c.compose(&c.ev(0), &c.coev(0)).unwrap().scalar() - ONE).norm() < 1e-15);
    }

    #[test]
    fn traces() {
        let c = calc(catalog::fibonacci());
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((c.trace(&c.identity_word(&[1])).unwrap().re - phi).abs() < 1e-12);
        let tt = c.identity_word(&[1, 1]);
        assert!((c.trace(&tt).unwrap().re - 2.6180339887).abs() < 1e-9);
        // explicit cup/cap evaluation
        assert!((c.right_trace(&tt).unwrap().re - phi * phi).abs() < 1e-10);
        assert!((c.left_trace(&tt).unwrap().re - phi * phi).abs() < 1e-10);
        let s3 = calc(catalog::vec_s3());
        for g in 0..6 {
            assert!((s3.left_trace(&s3.identity_word(&[g])).unwrap() - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn left_and_right_traces_agree_on_random_endomorphisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for cat in test_cats() {
            let c = calc(cat);
            let r = c.rank();
            for _ in 0..100 {
                let len = rng.gen_range(1..3);
                let w: Vec<Label> = (0..len).map(|_| rng.gen_range(0..r)).collect();
                let o = Object::word(&w);
                let f = c.random(&o, &o, &mut rng);
                let t = c.trace(&f).unwrap();
                let lt = c.left_trace(&f).unwrap();
                let rt = c.right_trace(&f).unwrap();
                assert!((lt - rt).norm() < 1e-9, "{} {:?}", c.cat().name, w);
                assert!((t - rt).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn dual_basis_pairing_and_completeness() {
        let c = calc(catalog::fibonacci());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // a non-orthonormal basis of Hom(tau, tau tau)
        let t = c.vertex(1, 1, 1, 0).unwrap().scale(c64(1.7, -0.4));
        let t2 = c.dual_basis(&[t.clone()]).unwrap();
        assert!((c.compose(&t2[0], &t).unwrap().blocks[1][(0, 0)] - ONE).norm() < 1e-12);
        // completeness on Hom(tau tau, tau tau)
        let mut sum = c.zero(&Object::word(&[1, 1]), &Object::word(&[1, 1]));
        for k in 0..2 {
            let b = vec![c.random(&Object::word(&[k]), &Object::word(&[1, 1]), &mut rng)];
            let db = c.dual_basis(&b).unwrap();
            sum.add_assign(&c.compose(&b[0], &db[0]).unwrap()).unwrap();
            // trace(t t') = d_k
            let tt = c.compose(&b[0], &db[0]).unwrap();
            assert!((c.trace(&tt).unwrap() - c.cat().dim(k)).norm() < 1e-12);
        }
        assert!(sum.distance(&c.identity_word(&[1, 1])) < 1e-12);
    }

    #[test]
    fn dual_basis_degenerate() {
        let c = calc(catalog::fibonacci());
        let z = c.zero(&Object::word(&[1]), &Object::word(&[1, 1]));
        assert!(matches!(c.dual_basis(&[z]), Err(Error::DegenerateBasis)));
    }

    #[test]
    fn word_too_long() {
        let c = calc(catalog::vec_z2());
        let f = c.identity_word(&[1, 1, 1, 1]);
        assert!(matches!(c.tensor(&f, &f), Err(Error::WordTooLong { .. })));
    }

    #[test]
    fn f_move_unitary_for_unitary_inputs() {
        for cat in test_cats().into_iter().filter(|c| c.unitary) {
            let c = calc(cat);
            let r = c.rank();
            for a in 0..r {
                for b in 0..r {
                    for x in 0..r {
                        for d in 0..r {
                            let f = c.f_move([a, b, x], d, Assoc::Left, Assoc::Right).unwrap();
                            let n = f.nrows();
                            assert!(linalg::max_abs(&(f.adjoint() * &f - Mat::identity(n, n))) < 1e-9);
                        }
                    }
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]
            #[test]
            fn interchange_random_words(seed in any::<u64>(), w1 in prop::collection::vec(0usize..2, 0..3), w2 in prop::collection::vec(0usize..2, 0..3)) {
                let c = calc(catalog::fibonacci());
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let u = Object::word(&w1);
                let v = Object::word(&w2);
                let f1 = c.random(&u, &u, &mut rng);
                let f2 = c.random(&u, &u, &mut rng);
                let g1 = c.random(&v, &v, &mut rng);
                let g2 = c.random(&v, &v, &mut rng);
                let lhs = c.compose(&c.tensor(&f1, &g1).unwrap(), &c.tensor(&f2, &g2).unwrap()).unwrap();
                let rhs = c.tensor(&c.compose(&f1, &f2).unwrap(), &c.compose(&g1, &g2).unwrap()).unwrap();
                prop_assert!(lhs.distance(&rhs) < 1e-9);
            }

            #[test]
            fn traces_agree_s3(seed in any::<u64>(), a in 0usize..6, b in 0usize..6) {
                let c = calc(catalog::vec_s3());
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let o = Object::word(&[a, b]);
                let f = c.random(&o, &o, &mut rng);
                let lt = c.left_trace(&f).unwrap();
                let rt = c.right_trace(&f).unwrap();
                prop_assert!((lt - rt).norm() < 1e-9);
            }
        }
    }
}
