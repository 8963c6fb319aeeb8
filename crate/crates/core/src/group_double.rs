//! The quantum double `D(G)` of a finite group, with its R-matrix, integrals,
//! ribbon element, self-dual Fourier transforms and the Hopf-side modular
//! data. Used as an oracle for categories of `G`-graded vector spaces.
//!
//! Basis elements are `δ_g ⊗ h`, stored at index `g * n + h`, with product
//! `(δ_g ⊗ x)(δ_h ⊗ y) = [g = x h x^{-1}] δ_g ⊗ xy`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{self, AssocAlgebra, Constant};
use crate::center::{match_modular, match_residual, CenterAnalysis, ModularView};
use crate::error::{Error, Result};
use crate::fusion::FusionCategoryData;
use crate::linalg::{self, Mat, Vector};
use crate::report::{Certificate, Check};
use crate::scalar::{re, Tolerance, C64, ONE, ZERO};

/// A finite group by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    order: usize,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    names: Vec<String>,
}

#[derive(Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum GroupFile {
    Table { order: usize, table: Vec<Vec<usize>> },
    Cyclic { cyclic: usize },
    Symmetric { symmetric: usize },
}

impl GroupSpec {
    /// Validates the group axioms on an explicit table.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::SchemaError("empty group".into()));
        }
        for row in &table {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return Err(Error::SchemaError("multiplication table is not n x n over 0..n".into()));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::SchemaError("no identity element".into()))?;
        let mut inverse = vec![0; n];
        for g in 0..n {
            inverse[g] = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| Error::SchemaError(format!("element {g} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::SchemaError(format!("table is not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(GroupSpec {
            order: n,
            table,
            identity,
            inverse,
            names: (0..n).map(|g| g.to_string()).collect(),
        })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(table).expect("cyclic group")
    }

    /// `S_n` with permutations in lexicographic one-line order and
    /// `(p q)(i) = p(q(i))`.
    pub fn symmetric(n: usize) -> Self {
        let mut perms: Vec<Vec<usize>> = Vec::new();
        let mut p: Vec<usize> = (0..n).collect();
        loop {
            perms.push(p.clone());
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { break };
            let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
            p.swap(i - 1, j);
            p[i..].reverse();
        }
        let index: BTreeMap<Vec<usize>, usize> = perms.iter().cloned().enumerate().map(|(k, q)| (q, k)).collect();
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| index[&b.iter().map(|&x| a[x]).collect::<Vec<_>>()]).collect())
            .collect();
        let mut g = Self::from_table(table).expect("symmetric group");
        g.names = perms
            .iter()
            .map(|q| q.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(""))
            .collect();
        g
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let file: GroupFile = serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
        match file {
            GroupFile::Table { order, table } => {
                if table.len() != order {
                    return Err(Error::SchemaError(format!("order {order} but {} rows", table.len())));
                }
                Self::from_table(table)
            }
            GroupFile::Cyclic { cyclic } if cyclic > 0 => Ok(Self::cyclic(cyclic)),
            GroupFile::Symmetric { symmetric } if (1..=6).contains(&symmetric) => Ok(Self::symmetric(symmetric)),
            _ => Err(Error::SchemaError("unsupported group size".into())),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse_json(&text)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn name(&self, g: usize) -> &str {
        &self.names[g]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn conj(&self, x: usize, g: usize) -> usize {
        self.mul(self.mul(x, g), self.inv(x))
    }

    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut out = Vec::new();
        for g in 0..self.order {
            if seen[g] {
                continue;
            }
            let cls: BTreeSet<usize> = (0..self.order).map(|x| self.conj(x, g)).collect();
            for &c in &cls {
                seen[c] = true;
            }
            out.push(cls.into_iter().collect());
        }
        out
    }

    pub fn centralizer(&self, g: usize) -> Vec<usize> {
        (0..self.order).filter(|&x| self.mul(x, g) == self.mul(g, x)).collect()
    }

    /// Number of conjugacy classes of the subgroup `elems`.
    fn subgroup_class_count(&self, elems: &[usize]) -> usize {
        let mut seen = BTreeSet::new();
        let mut count = 0;
        for &g in elems {
            if seen.contains(&g) {
                continue;
            }
            count += 1;
            for &x in elems {
                seen.insert(self.conj(x, g));
            }
        }
        count
    }

    /// Irreducible representations of `D(G)` counted through pairs (class,
    /// irreducible representation of the centralizer).
    pub fn double_irrep_count(&self) -> usize {
        self.conjugacy_classes()
            .iter()
            .map(|c| self.subgroup_class_count(&self.centralizer(c[0])))
            .sum()
    }

    /// Same group with the identity moved to index 0; returns the old index
    /// of each new element.
    pub fn identity_first(&self) -> (GroupSpec, Vec<usize>) {
        let mut perm: Vec<usize> = vec![self.identity];
        perm.extend((0..self.order).filter(|&g| g != self.identity));
        let mut pos = vec![0; self.order];
        for (k, &p) in perm.iter().enumerate() {
            pos[p] = k;
        }
        let table = perm
            .iter()
            .map(|&a| perm.iter().map(|&b| pos[self.mul(a, b)]).collect())
            .collect();
        let mut g = GroupSpec::from_table(table).expect("relabelled group");
        g.names = perm.iter().map(|&p| self.names[p].clone()).collect();
        (g, perm)
    }

    /// Searches for an isomorphism `self -> other`; returns the image of each
    /// element.
    pub fn isomorphism_to(&self, other: &GroupSpec) -> Option<Vec<usize>> {
        if self.order != other.order {
            return None;
        }
        // greedy generating set
        let mut gens = Vec::new();
        let mut span: BTreeSet<usize> = [self.identity].into_iter().collect();
        for g in 0..self.order {
            if !span.contains(&g) {
                gens.push(g);
                span = self.generated(&gens);
            }
        }
        let mut images = vec![0; gens.len()];
        self.search_iso(other, &gens, &mut images, 0)
    }

    fn generated(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut span: BTreeSet<usize> = [self.identity].into_iter().collect();
        let mut frontier: Vec<usize> = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if span.insert(y) {
                    frontier.push(y);
                }
            }
        }
        span
    }

    fn search_iso(&self, other: &GroupSpec, gens: &[usize], images: &mut Vec<usize>, k: usize) -> Option<Vec<usize>> {
        if k == gens.len() {
            return self.extend_hom(other, gens, images);
        }
        let ord = self.element_order(gens[k]);
        for y in 0..other.order {
            if other.element_order(y) != ord {
                continue;
            }
            images[k] = y;
            if let Some(m) = self.search_iso(other, gens, images, k + 1) {
                return Some(m);
            }
        }
        None
    }

    fn extend_hom(&self, other: &GroupSpec, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
        let mut map = vec![usize::MAX; self.order];
        map[self.identity] = other.identity;
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for (&g, &img) in gens.iter().zip(images) {
                let y = self.mul(x, g);
                let fy = other.mul(map[x], img);
                if map[y] == usize::MAX {
                    map[y] = fy;
                    frontier.push(y);
                } else if map[y] != fy {
                    return None;
                }
            }
        }
        let distinct: BTreeSet<usize> = map.iter().copied().collect();
        if distinct.len() != self.order {
            return None;
        }
        for a in 0..self.order {
            for b in 0..self.order {
                if map[self.mul(a, b)] != other.mul(map[a], map[b]) {
                    return None;
                }
            }
        }
        Some(map)
    }
}

/// Which coproduct and R-matrix accompany the fixed product of `D(G)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Convention {
    /// `Δ(δ_g ⊗ h) = Σ_{ab=g} (δ_a ⊗ h) ⊗ (δ_b ⊗ h)`, `R = Σ_g δ_g ⊗ (1 ⊗ g)`.
    Standard,
    /// `Δ(δ_g ⊗ h) = Σ_{ab=g} (δ_b ⊗ h) ⊗ (δ_a ⊗ h)`, `R = Σ_g (1 ⊗ g) ⊗ δ_g`.
    /// With the canonical embeddings this is the convention under which the
    /// Fourier-transform square commutes for non-abelian groups.
    CoOpposite,
}

/// Sparse element of `D ⊗ D`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tensor2(pub BTreeMap<(usize, usize), C64>);

/// Sparse element of `D ⊗ D ⊗ D`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tensor3(pub BTreeMap<(usize, usize, usize), C64>);

fn add_to<K: Ord>(m: &mut BTreeMap<K, C64>, k: K, v: C64) {
    if v != ZERO {
        *m.entry(k).or_insert(ZERO) += v;
    }
}

fn map_distance<K: Ord + Clone>(a: &BTreeMap<K, C64>, b: &BTreeMap<K, C64>) -> f64 {
    let mut worst: f64 = 0.0;
    for (k, v) in a {
        worst = worst.max((v - b.get(k).copied().unwrap_or(ZERO)).norm());
    }
    for (k, v) in b {
        if !a.contains_key(k) {
            worst = worst.max(v.norm());
        }
    }
    worst
}

impl Tensor2 {
    pub fn distance(&self, other: &Tensor2) -> f64 {
        map_distance(&self.0, &other.0)
    }

    pub fn flip(&self) -> Tensor2 {
        Tensor2(self.0.iter().map(|(&(a, b), &v)| ((b, a), v)).collect())
    }
}

impl Tensor3 {
    pub fn distance(&self, other: &Tensor3) -> f64 {
        map_distance(&self.0, &other.0)
    }
}

#[derive(Debug, Clone)]
pub struct GroupDoubleAlgebra {
    pub group: GroupSpec,
    pub convention: Convention,
    alg: AssocAlgebra,
    mul_table: Vec<Option<usize>>,
    pub r: Tensor2,
    pub u: Vector,
    pub theta: Vector,
    /// Two-sided integral in `D(G)`.
    pub integral: Vector,
    /// Integral on `D(G)` as coefficients `μ(e_k)`, scaled so that the
    /// Fourier transforms are mutually inverse.
    pub mu: Vector,
    /// Factor by which the solved μ had to be divided.
    pub mu_scale: f64,
}

/// Hopf-side modular data in the basis of minimal central idempotents.
#[derive(Debug, Clone)]
pub struct HopfModularData {
    pub idempotents: Vec<Vector>,
    pub dims: Vec<f64>,
    pub twists: Vec<C64>,
    /// `(Tr_i ⊗ Tr_j)(R_21 R_12)`.
    pub s: Mat,
    /// The same matrix obtained from `𝔖₊(P_j) = Σ_i A_ij P_i`.
    pub s_from_fourier: Mat,
    /// `A` itself.
    pub fourier_coeffs: Mat,
    pub t: Mat,
    pub lambda: C64,
    /// Conjugacy class representative of each simple.
    pub class_rep: Vec<usize>,
    pub certificate: Certificate,
}

impl GroupDoubleAlgebra {
    pub fn dim(&self) -> usize {
        self.group.order() * self.group.order()
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn algebra(&self) -> &AssocAlgebra {
        &self.alg
    }

    pub fn index(&self, g: usize, h: usize) -> usize {
        g * self.order() + h
    }

    pub fn unpack(&self, k: usize) -> (usize, usize) {
        (k / self.order(), k % self.order())
    }

    /// `δ_g ⊗ e`.
    pub fn delta(&self, g: usize) -> Vector {
        self.alg.basis(self.index(g, self.group.identity()))
    }

    /// `1 ⊗ h`.
    pub fn group_element(&self, h: usize) -> Vector {
        let mut v = Vector::zeros(self.dim());
        for g in 0..self.order() {
            v[self.index(g, h)] = ONE;
        }
        v
    }

    pub fn one(&self) -> Vector {
        self.group_element(self.group.identity())
    }

    fn basis_mul(&self, a: usize, b: usize) -> Option<usize> {
        self.mul_table[a * self.dim() + b]
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim());
        for (a, &xa) in x.iter().enumerate() {
            if xa == ZERO {
                continue;
            }
            for (b, &yb) in y.iter().enumerate() {
                if yb == ZERO {
                    continue;
                }
                if let Some(c) = self.basis_mul(a, b) {
                    out[c] += xa * yb;
                }
            }
        }
        out
    }

    pub fn t2_mul(&self, x: &Tensor2, y: &Tensor2) -> Tensor2 {
        let mut out = BTreeMap::new();
        for (&(a1, a2), &va) in &x.0 {
            for (&(b1, b2), &vb) in &y.0 {
                if let (Some(c1), Some(c2)) = (self.basis_mul(a1, b1), self.basis_mul(a2, b2)) {
                    add_to(&mut out, (c1, c2), va * vb);
                }
            }
        }
        Tensor2(out)
    }

    pub fn t3_mul(&self, x: &Tensor3, y: &Tensor3) -> Tensor3 {
        let mut out = BTreeMap::new();
        for (&(a1, a2, a3), &va) in &x.0 {
            for (&(b1, b2, b3), &vb) in &y.0 {
                if let (Some(c1), Some(c2), Some(c3)) =
                    (self.basis_mul(a1, b1), self.basis_mul(a2, b2), self.basis_mul(a3, b3))
                {
                    add_to(&mut out, (c1, c2, c3), va * vb);
                }
            }
        }
        Tensor3(out)
    }

    pub fn tensor(&self, x: &Vector, y: &Vector) -> Tensor2 {
        let mut out = BTreeMap::new();
        for (a, &xa) in x.iter().enumerate() {
            if xa == ZERO {
                continue;
            }
            for (b, &yb) in y.iter().enumerate() {
                add_to(&mut out, (a, b), xa * yb);
            }
        }
        Tensor2(out)
    }

    pub fn one2(&self) -> Tensor2 {
        self.tensor(&self.one(), &self.one())
    }

    /// Coproduct of a basis element.
    pub fn coproduct_basis(&self, k: usize) -> Tensor2 {
        let (g, h) = self.unpack(k);
        let gr = &self.group;
        let mut out = BTreeMap::new();
        for a in 0..self.order() {
            let b = gr.mul(gr.inv(a), g);
            let (x, y) = match self.convention {
                Convention::Standard => (a, b),
                Convention::CoOpposite => (b, a),
            };
            add_to(&mut out, (self.index(x, h), self.index(y, h)), ONE);
        }
        Tensor2(out)
    }

    pub fn coproduct(&self, x: &Vector) -> Tensor2 {
        let mut out = BTreeMap::new();
        for (k, &xk) in x.iter().enumerate() {
            if xk == ZERO {
                continue;
            }
            for (key, v) in self.coproduct_basis(k).0 {
                add_to(&mut out, key, v * xk);
            }
        }
        Tensor2(out)
    }

    pub fn counit_basis(&self, k: usize) -> C64 {
        let (g, _) = self.unpack(k);
        if g == self.group.identity() {
            ONE
        } else {
            ZERO
        }
    }

    pub fn counit(&self, x: &Vector) -> C64 {
        x.iter().enumerate().map(|(k, &v)| v * self.counit_basis(k)).sum()
    }

    /// `S(δ_g ⊗ h) = δ_{h^{-1} g^{-1} h} ⊗ h^{-1}`.
    pub fn antipode_basis(&self, k: usize) -> usize {
        let (g, h) = self.unpack(k);
        let gr = &self.group;
        let hi = gr.inv(h);
        self.index(gr.mul(gr.mul(hi, gr.inv(g)), h), hi)
    }

    pub fn antipode(&self, x: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim());
        for (k, &v) in x.iter().enumerate() {
            out[self.antipode_basis(k)] += v;
        }
        out
    }

    fn build_r(&self) -> Tensor2 {
        let mut out = BTreeMap::new();
        let e = self.group.identity();
        for g in 0..self.order() {
            for k in 0..self.order() {
                // 1 ⊗ g = Σ_k δ_k ⊗ g
                let (first, second) = match self.convention {
                    Convention::Standard => (self.index(g, e), self.index(k, g)),
                    Convention::CoOpposite => (self.index(k, g), self.index(g, e)),
                };
                add_to(&mut out, (first, second), ONE);
            }
        }
        Tensor2(out)
    }

    /// `R^{-1} = (S ⊗ id) R`.
    pub fn r_inverse(&self) -> Tensor2 {
        Tensor2(self.r.0.iter().map(|(&(a, b), &v)| ((self.antipode_basis(a), b), v)).collect())
    }

    /// `m (S ⊗ id)(R_21) = Σ S(f_i) e_i` for `R = Σ e_i ⊗ f_i`.
    fn drinfeld_u(&self) -> Vector {
        let mut u = Vector::zeros(self.dim());
        for (&(e, f), &v) in &self.r.0 {
            if let Some(c) = self.basis_mul(self.antipode_basis(f), e) {
                u[c] += v;
            }
        }
        u
    }

    /// `Σ f_i S²(e_i)`.
    fn drinfeld_u_inverse(&self) -> Vector {
        let mut u = Vector::zeros(self.dim());
        for (&(e, f), &v) in &self.r.0 {
            let s2 = self.antipode_basis(self.antipode_basis(e));
            if let Some(c) = self.basis_mul(f, s2) {
                u[c] += v;
            }
        }
        u
    }

    /// `(id ⊗ μ)` applied to a tensor.
    pub fn slice_mu(&self, x: &Tensor2) -> Vector {
        let mut out = Vector::zeros(self.dim());
        for (&(a, b), &v) in &x.0 {
            out[a] += v * self.mu[b];
        }
        out
    }

    pub fn mu_eval(&self, x: &Vector) -> C64 {
        self.mu.iter().zip(x.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn one_tensor(&self, b: &Vector) -> Tensor2 {
        self.tensor(&self.one(), b)
    }

    fn fourier_with(&self, b: &Vector, left: &Tensor2, right: &Tensor2) -> Vector {
        let x = self.t2_mul(&self.t2_mul(left, &self.one_tensor(b)), right);
        self.slice_mu(&x)
    }

    /// `𝔖₊(b) = (id ⊗ μ)(R_21 (1 ⊗ b) R_12)`.
    pub fn s_plus(&self, b: &Vector) -> Vector {
        self.fourier_with(b, &self.r.flip(), &self.r)
    }

    /// `𝔖₋(b) = (id ⊗ μ)(R_12^{-1} (1 ⊗ b) R_21^{-1})`.
    pub fn s_minus(&self, b: &Vector) -> Vector {
        let ri = self.r_inverse();
        self.fourier_with(b, &ri, &ri.flip())
    }

    fn linear_map(&self, f: impl Fn(&Vector) -> Vector) -> Mat {
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for k in 0..n {
            m.set_column(k, &f(&self.alg.basis(k)));
        }
        m
    }

    pub fn s_plus_matrix(&self) -> Mat {
        self.linear_map(|b| self.s_plus(b))
    }

    pub fn s_minus_matrix(&self) -> Mat {
        self.linear_map(|b| self.s_minus(b))
    }

    /// `𝒯(b) = θ b`.
    pub fn t_matrix(&self) -> Mat {
        self.alg.left_matrix(&self.theta)
    }

    /// `S̲(x) = R^{(2)} S(Ad R^{(1)} (x))`, `Ad Y(x) = Y_(1) x S(Y_(2))`.
    pub fn braided_antipode(&self, x: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim());
        for (&(e, f), &v) in &self.r.0 {
            let mut ad = Vector::zeros(self.dim());
            for (&(y1, y2), &w) in &self.coproduct_basis(e).0 {
                let left = self.mul(&self.alg.basis(y1), x);
                let z = self.mul(&left, &self.alg.basis(self.antipode_basis(y2)));
                ad += z * w;
            }
            out += self.mul(&self.alg.basis(f), &self.antipode(&ad)) * v;
        }
        out
    }

    /// `(Δ ⊗ id) R` and `R_13 R_23`.
    fn qt_first(&self) -> (Tensor3, Tensor3) {
        let mut lhs = BTreeMap::new();
        for (&(a, b), &v) in &self.r.0 {
            for (&(x, y), &w) in &self.coproduct_basis(a).0 {
                add_to(&mut lhs, (x, y, b), v * w);
            }
        }
        let one = self.one();
        let ones: Vec<(usize, C64)> = one.iter().enumerate().filter(|(_, v)| **v != ZERO).map(|(k, v)| (k, *v)).collect();
        let embed = |pos: (usize, usize)| -> Tensor3 {
            let mut m = BTreeMap::new();
            for (&(a, b), &v) in &self.r.0 {
                for &(o, w) in &ones {
                    let key = match pos {
                        (0, 2) => (a, o, b),
                        (1, 2) => (o, a, b),
                        _ => (a, b, o),
                    };
                    add_to(&mut m, key, v * w);
                }
            }
            Tensor3(m)
        };
        let rhs = self.t3_mul(&embed((0, 2)), &embed((1, 2)));
        (Tensor3(lhs), rhs)
    }

    /// `(id ⊗ Δ) R` and `R_13 R_12`.
    fn qt_second(&self) -> (Tensor3, Tensor3) {
        let mut lhs = BTreeMap::new();
        for (&(a, b), &v) in &self.r.0 {
            for (&(x, y), &w) in &self.coproduct_basis(b).0 {
                add_to(&mut lhs, (a, x, y), v * w);
            }
        }
        let one = self.one();
        let ones: Vec<(usize, C64)> = one.iter().enumerate().filter(|(_, v)| **v != ZERO).map(|(k, v)| (k, *v)).collect();
        let mut r13 = BTreeMap::new();
        let mut r12 = BTreeMap::new();
        for (&(a, b), &v) in &self.r.0 {
            for &(o, w) in &ones {
                add_to(&mut r13, (a, o, b), v * w);
                add_to(&mut r12, (a, b, o), v * w);
            }
        }
        (Tensor3(lhs), self.t3_mul(&Tensor3(r13), &Tensor3(r12)))
    }

    /// Hopf axioms and quasitriangularity on basis elements.
    pub fn hopf_checks(&self, tol: Tolerance) -> Certificate {
        let n = self.dim();
        let mut cert = Certificate::new();
        cert.push(Check::below("associativity", self.alg.associativity_residual(), tol.eps));
        let mut coassoc: f64 = 0.0;
        let mut counit: f64 = 0.0;
        let mut antipode: f64 = 0.0;
        let mut s2: f64 = 0.0;
        let mut quasi: f64 = 0.0;
        for k in 0..n {
            let d = self.coproduct_basis(k);
            let mut l = BTreeMap::new();
            let mut r = BTreeMap::new();
            for (&(a, b), &v) in &d.0 {
                for (&(x, y), &w) in &self.coproduct_basis(a).0 {
                    add_to(&mut l, (x, y, b), v * w);
                }
                for (&(x, y), &w) in &self.coproduct_basis(b).0 {
                    add_to(&mut r, (a, x, y), v * w);
                }
            }
            coassoc = coassoc.max(map_distance(&l, &r));
            let ek = self.alg.basis(k);
            let mut left = Vector::zeros(n);
            let mut right = Vector::zeros(n);
            let mut sl = Vector::zeros(n);
            let mut sr = Vector::zeros(n);
            for (&(a, b), &v) in &d.0 {
                left += self.alg.basis(b) * (v * self.counit_basis(a));
                right += self.alg.basis(a) * (v * self.counit_basis(b));
                if let Some(c) = self.basis_mul(self.antipode_basis(a), b) {
                    sl[c] += v;
                }
                if let Some(c) = self.basis_mul(a, self.antipode_basis(b)) {
                    sr[c] += v;
                }
            }
            counit = counit.max(linalg::max_abs_vec(&(left - &ek))).max(linalg::max_abs_vec(&(right - &ek)));
            let target = self.one() * self.counit_basis(k);
            antipode = antipode
                .max(linalg::max_abs_vec(&(sl - &target)))
                .max(linalg::max_abs_vec(&(sr - &target)));
            if self.antipode_basis(self.antipode_basis(k)) != k {
                s2 = 1.0;
            }
            let lhs = self.t2_mul(&self.r, &d);
            let rhs = self.t2_mul(&d.flip(), &self.r);
            quasi = quasi.max(lhs.distance(&rhs));
        }
        let mut mult: f64 = 0.0;
        let mut eps_mult: f64 = 0.0;
        for a in 0..n {
            let da = self.coproduct_basis(a);
            for b in 0..n {
                let db = self.coproduct_basis(b);
                let prod = self.t2_mul(&da, &db);
                let lhs = match self.basis_mul(a, b) {
                    Some(c) => self.coproduct_basis(c),
                    None => Tensor2::default(),
                };
                mult = mult.max(lhs.distance(&prod));
                let ec = self.basis_mul(a, b).map(|c| self.counit_basis(c)).unwrap_or(ZERO);
                eps_mult = eps_mult.max((ec - self.counit_basis(a) * self.counit_basis(b)).norm());
            }
        }
        cert.push(Check::below("coassociativity", coassoc, tol.eps));
        cert.push(Check::below("counit", counit, tol.eps));
        cert.push(Check::below("coproduct multiplicative", mult, tol.eps));
        cert.push(Check::below("counit multiplicative", eps_mult, tol.eps));
        cert.push(Check::below("antipode", antipode, tol.eps));
        cert.push(Check::below("antipode involutive", s2, tol.eps));
        cert.push(Check::below("R intertwines coproducts", quasi, tol.eps));
        let (l1, r1) = self.qt_first();
        cert.push(Check::below("(Δ⊗id)R = R13 R23", l1.distance(&r1), tol.eps));
        let (l2, r2) = self.qt_second();
        cert.push(Check::below("(id⊗Δ)R = R13 R12", l2.distance(&r2), tol.eps));
        let rr = self.t2_mul(&self.r, &self.r_inverse());
        cert.push(Check::below("R invertible", rr.distance(&self.one2()), tol.eps));
        cert
    }

    /// Drinfeld element and ribbon axioms.
    pub fn drinfeld_and_ribbon_checks(&self, tol: Tolerance) -> Certificate {
        let mut cert = Certificate::new();
        let u = &self.u;
        let ui = self.drinfeld_u_inverse();
        cert.push(Check::below("u u^{-1} = 1", linalg::max_abs_vec(&(self.mul(u, &ui) - self.one())), tol.eps));
        cert.push(Check::below("u central", self.alg.centrality_residual(u), tol.eps));
        let mut inner: f64 = 0.0;
        for k in 0..self.dim() {
            let ek = self.alg.basis(k);
            let s2 = self.antipode(&self.antipode(&ek));
            let conj = self.mul(&self.mul(u, &ek), &ui);
            inner = inner.max(linalg::max_abs_vec(&(s2 - conj)));
        }
        cert.push(Check::below("S² = Ad u", inner, tol.eps));
        cert.push(Check::below("ε(u) = 1", (self.counit(u) - ONE).norm(), tol.eps));
        let us = self.mul(u, &self.antipode(u));
        cert.push(Check::below("u S(u) central", self.alg.centrality_residual(&us), tol.eps));
        let rr = self.t2_mul(&self.r.flip(), &self.r);
        let du = self.t2_mul(&self.coproduct(u), &rr);
        cert.push(Check::below("Δ(u) R21 R = u ⊗ u", du.distance(&self.tensor(u, u)), tol.eps));
        let th = &self.theta;
        cert.push(Check::below("θ central", self.alg.centrality_residual(th), tol.eps));
        cert.push(Check::below("θ² = u S(u)", linalg::max_abs_vec(&(self.mul(th, th) - &us)), tol.eps));
        cert.push(Check::below("S(θ) = θ", linalg::max_abs_vec(&(self.antipode(th) - th)), tol.eps));
        cert.push(Check::below("ε(θ) = 1", (self.counit(th) - ONE).norm(), tol.eps));
        let dt = self.t2_mul(&self.coproduct(th), &rr);
        cert.push(Check::below("Δ(θ) R21 R = θ ⊗ θ", dt.distance(&self.tensor(th, th)), tol.eps));
        let thi = self.theta_inverse();
        cert.push(Check::below(
            "u θ^{-1} = 1",
            linalg::max_abs_vec(&(self.mul(u, &thi) - self.one())),
            tol.eps,
        ));
        cert
    }

    pub fn theta_inverse(&self) -> Vector {
        let lt = self.alg.left_matrix(&self.theta);
        let (x, _) = linalg::lstsq(&lt, &self.one(), 1e-12);
        x
    }

    /// Integral identities including the trace properties.
    pub fn integral_checks(&self, tol: Tolerance) -> Certificate {
        let mut cert = Certificate::new();
        let n = self.dim();
        let l = &self.integral;
        let mut left: f64 = 0.0;
        let mut right: f64 = 0.0;
        let mut mu_inv: f64 = 0.0;
        let mut mu_tr: f64 = 0.0;
        for k in 0..n {
            let ek = self.alg.basis(k);
            let target = l * self.counit_basis(k);
            left = left.max(linalg::max_abs_vec(&(self.mul(&ek, l) - &target)));
            right = right.max(linalg::max_abs_vec(&(self.mul(l, &ek) - &target)));
            let slice = self.slice_mu(&self.coproduct_basis(k));
            mu_inv = mu_inv.max(linalg::max_abs_vec(&(slice - self.one() * self.mu[k])));
            for j in 0..n {
                let ej = self.alg.basis(j);
                let ab = self.mu_eval(&self.mul(&ek, &ej));
                let ba = self.mu_eval(&self.mul(&ej, &ek));
                mu_tr = mu_tr.max((ab - ba).norm());
            }
        }
        cert.push(Check::below("x Λ = ε(x) Λ", left, tol.eps));
        cert.push(Check::below("Λ x = ε(x) Λ", right, tol.eps));
        cert.push(Check::below("(id⊗μ)Δ(x) = μ(x) 1", mu_inv, tol.eps));
        cert.push(Check::below("μ(ab) = μ(ba)", mu_tr, tol.eps));
        let dl = self.coproduct(l);
        cert.push(Check::below("Δ(Λ) flip-symmetric", dl.distance(&dl.flip()), tol.eps));
        cert.push(Check::below("μ(Λ) ≠ 0", -self.mu_eval(l).norm(), 0.0));
        cert
    }

    /// `𝔖₊𝔖₋ = id = 𝔖₋𝔖₊`, `(𝔖₊𝒯)³ = λ 𝔖₊²`, `𝔖₊² = S̲`, and
    /// center stability.
    pub fn fourier_checks(&self, tol: Tolerance) -> (Certificate, C64) {
        let mut cert = Certificate::new();
        let n = self.dim();
        let sp = self.s_plus_matrix();
        let sm = self.s_minus_matrix();
        let t = self.t_matrix();
        let id = Mat::identity(n, n);
        cert.push(Check::below("𝔖₊𝔖₋ = id", linalg::max_abs(&(&sp * &sm - &id)), tol.eps));
        cert.push(Check::below("𝔖₋𝔖₊ = id", linalg::max_abs(&(&sm * &sp - &id)), tol.eps));
        let lambda = self.lambda();
        let spt = &sp * &t;
        let cube = &spt * &spt * &spt;
        let sp2 = &sp * &sp;
        cert.push(Check::below("(𝔖₊𝒯)³ = λ𝔖₊²", linalg::max_abs(&(cube - &sp2 * lambda)), tol.eps));
        let bs = self.linear_map(|x| self.braided_antipode(x));
        cert.push(Check::below("𝔖₊² = braided antipode", linalg::max_abs(&(&sp2 - bs)), tol.eps));
        let z = algebra::center_basis(&self.alg, tol);
        let mut stable: f64 = 0.0;
        let mut s_on_center: f64 = 0.0;
        for c in 0..z.ncols() {
            let zc: Vector = z.column(c).into_owned();
            stable = stable
                .max(self.alg.centrality_residual(&(&sp * &zc)))
                .max(self.alg.centrality_residual(&(&sm * &zc)));
            s_on_center = s_on_center.max(linalg::max_abs_vec(&(&sp2 * &zc - self.antipode(&zc))));
        }
        cert.push(Check::below("𝔖± preserve the center", stable, tol.eps));
        cert.push(Check::below("𝔖₊² = S on the center", s_on_center, tol.eps));
        (cert, lambda)
    }

    /// `λ` with `𝔖₊(θ) = λ θ^{-1}`.
    pub fn lambda(&self) -> C64 {
        let lhs = self.s_plus(&self.theta);
        let thi = self.theta_inverse();
        let k = thi.icamax();
        lhs[k] / thi[k]
    }

    /// Embedding of `Ĥ = C(G)`: `δ_g -> δ_g ⊗ e`.
    fn iota_hat(&self, g: usize) -> Vector {
        self.delta(g)
    }

    /// The Fourier-transform square
    /// `𝔖₋ ∘ m ∘ (ι̂ ⊗ ι) = m ∘ (ι ⊗ ι̂) ∘ (ℱ̂ ⊗ ℱ)` on the basis
    /// `δ_g ⊗ h` of `Ĥ ⊗ H`.
    pub fn kerler_residual(&self, tol: Tolerance) -> f64 {
        let gr = &self.group;
        let n = self.order();
        let hi = HopfIntegrals::solve(gr, tol);
        let mut worst: f64 = 0.0;
        for g in 0..n {
            for h in 0..n {
                let lhs = self.s_minus(&self.mul(&self.iota_hat(g), &self.group_element(h)));
                // ℱ̂(δ_g) = Σ_k δ_g(k^{-1}) Λ_{k^{-1}} k and ℱ(h) = Σ_y μ(h y^{-1}) δ_y
                let mut fhat = Vector::zeros(self.dim());
                for k in 0..n {
                    let ki = gr.inv(k);
                    if ki == g {
                        fhat += self.group_element(k) * hi.lambda[ki];
                    }
                }
                let mut f = Vector::zeros(self.dim());
                for y in 0..n {
                    let c = hi.mu[gr.mul(h, gr.inv(y))];
                    if c != ZERO {
                        f += self.iota_hat(y) * c;
                    }
                }
                let rhs = self.mul(&fhat, &f);
                worst = worst.max(linalg::max_abs_vec(&(lhs - rhs)));
            }
        }
        worst
    }

    /// Splits the center and evaluates both S-matrix formulas.
    pub fn hopf_smatrix(&self, seed: u64, tol: Tolerance) -> Result<HopfModularData> {
        let mut idem = algebra::central_idempotents(&self.alg, seed, tol)?;
        let tr = self.alg.regular_trace();
        let n = self.order();
        let gr = &self.group;
        // unit first, then by dimension, twist and coordinates
        let dims_of = |p: &Vector| tr.eval(p).re.max(0.0).sqrt();
        let twist_of = |p: &Vector| {
            let tp = self.mul(&self.theta, p);
            let k = p.icamax();
            tp[k] / p[k]
        };
        let key = |p: &Vector| {
            let unit = if (self.counit(p) - ONE).norm() < 1e-6 { 0 } else { 1 };
            let w = twist_of(p);
            let mut ang = w.arg();
            if ang < -1e-9 {
                ang += 2.0 * std::f64::consts::PI;
            }
            let mut k: Vec<i64> = vec![unit, (dims_of(p) * 1e6).round() as i64, (ang * 1e6).round() as i64];
            for z in p.iter() {
                k.push((z.re * 1e6).round() as i64);
                k.push((z.im * 1e6).round() as i64);
            }
            k
        };
        idem.sort_by_key(|p| key(p));
        let r = idem.len();
        let dims: Vec<f64> = idem.iter().map(dims_of).collect();
        let twists: Vec<C64> = idem.iter().map(twist_of).collect();
        let class_rep: Vec<usize> = idem
            .iter()
            .map(|p| {
                let k = p.icamax();
                self.unpack(k).0
            })
            .collect();
        // Tr_i(x) = Tr(L_{x P_i}) / d_i
        let tr_i = |i: usize, x: usize| -> C64 {
            let xp = self.mul(&self.alg.basis(x), &idem[i]);
            tr.eval(&xp) / dims[i]
        };
        let rr = self.t2_mul(&self.r.flip(), &self.r);
        let mut s = Mat::zeros(r, r);
        let mut traces: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for (&(a, b), &v) in &rr.0 {
            for i in 0..r {
                let ta = *traces.entry((i, a)).or_insert_with(|| tr_i(i, a));
                if ta == ZERO {
                    continue;
                }
                for j in 0..r {
                    let tb = *traces.entry((j, b)).or_insert_with(|| tr_i(j, b));
                    s[(i, j)] += v * ta * tb;
                }
            }
        }
        // 𝔖₊(P_j) = Σ_i A_ij P_i
        let mut pmat = Mat::zeros(self.dim(), r);
        for (i, p) in idem.iter().enumerate() {
            pmat.set_column(i, p);
        }
        let mut a = Mat::zeros(r, r);
        let mut expand_res: f64 = 0.0;
        for j in 0..r {
            let (x, res) = linalg::lstsq(&pmat, &self.s_plus(&idem[j]), 1e-12);
            expand_res = expand_res.max(res);
            a.set_column(j, &x);
        }
        // with μ normalised by 𝔖₊𝔖₋ = id one has μ = |G|^{-1} Σ_k d_k Tr_k,
        // so A_ij = d_j S_ij / (|G| d_i)
        let mut s_f = Mat::zeros(r, r);
        for i in 0..r {
            for j in 0..r {
                s_f[(i, j)] = a[(i, j)] * (n as f64) * dims[i] / dims[j];
            }
        }
        let mut t = Mat::zeros(r, r);
        for i in 0..r {
            t[(i, i)] = twists[i];
        }
        let mut cert = Certificate::new();
        cert.push(Check::below("central idempotents", algebra::idempotent_residual(&self.alg, &idem), 100.0 * tol.eps));
        let sum_d2: f64 = dims.iter().map(|d| d * d).sum();
        cert.push(Check::below("Σ d² = |G|²", (sum_d2 - (n * n) as f64).abs(), 1e-6));
        cert.push(Check::below(
            "dimensions integral",
            dims.iter().map(|d| (d - d.round()).abs()).fold(0.0, f64::max),
            1e-6,
        ));
        cert.push(Check::below("𝔖₊ on idempotents", expand_res, tol.eps));
        cert.push(Check::below("S from Fourier = S from R21 R12", linalg::max_abs(&(&s_f - &s)), tol.eps));
        let det = linalg::singular_range(&s).1;
        cert.push(Check::above("S invertible (σ_min)", det, 1e-6));
        let mut ord_res: f64 = 0.0;
        for (i, w) in twists.iter().enumerate() {
            let o = gr.element_order(class_rep[i]) as i32;
            ord_res = ord_res.max((w.powi(o) - ONE).norm());
        }
        cert.push(Check::below("twist order divides element order", ord_res, tol.eps));
        Ok(HopfModularData {
            idempotents: idem,
            dims,
            twists,
            s,
            s_from_fourier: s_f,
            fourier_coeffs: a,
            t,
            lambda: self.lambda(),
            class_rep,
            certificate: cert,
        })
    }
}

/// Integrals of the group algebra `H = C[G]` and of `Ĥ = C(G)`, normalised
/// by `μ(e) = 1` and `⟨μ, Λ⟩ = 1`.
#[derive(Debug, Clone)]
pub struct HopfIntegrals {
    /// `Λ = Σ_g Λ_g g`.
    pub lambda: Vec<C64>,
    /// `μ(g)`.
    pub mu: Vec<C64>,
}

impl HopfIntegrals {
    pub fn solve(g: &GroupSpec, tol: Tolerance) -> Self {
        let n = g.order();
        // h Λ = Λ for all h
        let mut m = Mat::zeros(n * n, n);
        for h in 0..n {
            for x in 0..n {
                m[(h * n + g.mul(h, x), x)] += ONE;
                m[(h * n + x, x)] -= ONE;
            }
        }
        let lam = linalg::kernel(&m, tol.eps);
        // (id ⊗ μ)Δ(x) = μ(x) 1 with Δ(x) = x ⊗ x: μ(x)(x - e) = 0
        let mut mm = Mat::zeros(n * n, n);
        for x in 0..n {
            mm[(x * n + x, x)] += ONE;
            mm[(x * n + g.identity(), x)] -= ONE;
        }
        let mu = linalg::kernel(&mm, tol.eps);
        let mut mu: Vec<C64> = mu.column(0).iter().copied().collect();
        let s = mu[g.identity()];
        for v in mu.iter_mut() {
            *v /= s;
        }
        let mut lambda: Vec<C64> = lam.column(0).iter().copied().collect();
        let pair: C64 = (0..n).map(|k| mu[k] * lambda[k]).sum();
        for v in lambda.iter_mut() {
            *v /= pair;
        }
        HopfIntegrals { lambda, mu }
    }
}

/// Builds `D(G)` in the co-opposite convention.
pub fn build_double(g: &GroupSpec, tol: Tolerance) -> Result<GroupDoubleAlgebra> {
    build_double_with(g, Convention::CoOpposite, tol)
}

pub fn build_double_with(g: &GroupSpec, convention: Convention, tol: Tolerance) -> Result<GroupDoubleAlgebra> {
    let n = g.order();
    let dim = n * n;
    let mut constants: Vec<Constant> = Vec::new();
    let mut mul_table = vec![None; dim * dim];
    for a in 0..n {
        for x in 0..n {
            for b in 0..n {
                if g.conj(x, b) != a {
                    continue;
                }
                for y in 0..n {
                    let c = a * n + g.mul(x, y);
                    constants.push((a * n + x, b * n + y, c, ONE));
                    mul_table[(a * n + x) * dim + b * n + y] = Some(c);
                }
            }
        }
    }
    let mut unit = Vector::zeros(dim);
    for a in 0..n {
        unit[a * n + g.identity()] = ONE;
    }
    let alg = AssocAlgebra::from_constants(dim, &constants, Some(unit), tol)?;
    let mut d = GroupDoubleAlgebra {
        group: g.clone(),
        convention,
        alg,
        mul_table,
        r: Tensor2::default(),
        u: Vector::zeros(dim),
        theta: Vector::zeros(dim),
        integral: Vector::zeros(dim),
        mu: Vector::zeros(dim),
        mu_scale: 1.0,
    };
    d.r = d.build_r();
    d.u = d.drinfeld_u();
    d.theta = d.u.clone();
    // x Λ = ε(x) Λ and Λ x = ε(x) Λ
    let mut m = Mat::zeros(2 * dim * dim, dim);
    for k in 0..dim {
        let lk = d.alg.left_matrix(&d.alg.basis(k));
        let rk = d.alg.right_matrix(&d.alg.basis(k));
        let e = d.counit_basis(k);
        for i in 0..dim {
            for j in 0..dim {
                let id = if i == j { e } else { ZERO };
                m[(k * dim + i, j)] = lk[(i, j)] - id;
                m[(dim * dim + k * dim + i, j)] = rk[(i, j)] - id;
            }
        }
    }
    let lam = linalg::kernel(&m, tol.eps);
    if lam.ncols() != 1 {
        return Err(Error::DegenerateBasis);
    }
    let mut integral: Vector = lam.column(0).into_owned();
    let k = integral.icamax();
    integral /= integral[k];
    d.integral = integral;
    // (id ⊗ μ)Δ(e_k) = μ_k 1: Σ_{(a,b)} Δ_k[a,b] μ_b e_a - μ_k 1 = 0
    let one = d.one();
    let mut mm = Mat::zeros(dim * dim, dim);
    for k in 0..dim {
        for (&(a, b), &v) in &d.coproduct_basis(k).0 {
            mm[(k * dim + a, b)] += v;
        }
        for a in 0..dim {
            mm[(k * dim + a, k)] -= one[a];
        }
    }
    let mu = linalg::kernel(&mm, tol.eps);
    if mu.ncols() != 1 {
        return Err(Error::DegenerateBasis);
    }
    let mut mu: Vector = mu.column(0).into_owned();
    let k = mu.icamax();
    mu /= mu[k];
    d.mu = mu;
    // rescale so that 𝔖₊𝔖₋ = c id becomes the identity
    let sp = d.s_plus_matrix();
    let sm = d.s_minus_matrix();
    let prod = &sp * &sm;
    let c = linalg::trace(&prod) / re(dim as f64);
    let scale = c.norm().sqrt();
    d.mu /= re(scale);
    if d.mu_eval(&d.one()).re < 0.0 {
        d.mu = -d.mu.clone();
    }
    d.mu_scale = scale;
    Ok(d)
}

/// The group of a pointed category: every simple invertible with `d = 1` and
/// one-dimensional fusion.
pub fn group_of_category(cat: &FusionCategoryData, tol: Tolerance) -> Result<GroupSpec> {
    let n = cat.rank();
    let mut table = vec![vec![0; n]; n];
    for a in 0..n {
        if (cat.dim(a) - ONE).norm() >= tol.sqrt() {
            return Err(Error::NoMatching(format!("{} has a simple of dimension {}", cat.name, cat.dim(a))));
        }
        for b in 0..n {
            let out: Vec<usize> = (0..n).filter(|&c| cat.n(a, b, c) > 0).collect();
            if out.len() != 1 || cat.n(a, b, out[0]) != 1 {
                return Err(Error::NoMatching(format!("{} is not pointed", cat.name)));
            }
            table[a][b] = out[0];
        }
    }
    GroupSpec::from_table(table).map_err(|e| Error::NoMatching(e.to_string()))
}

/// Dual of each irrep: the antipode sends `P_i` to `P_{ī}`.
pub fn hopf_conjugation(double: &GroupDoubleAlgebra, hopf: &HopfModularData, tol: f64) -> Result<Vec<usize>> {
    let ps = &hopf.idempotents;
    (0..ps.len())
        .map(|i| {
            let sp = double.antipode(&ps[i]);
            ps.iter()
                .position(|q| linalg::max_abs_vec(&(q - &sp)) < tol)
                .ok_or(Error::ConjugationUnresolved { index: i })
        })
        .collect()
}

/// Matches the Hopf-side data of `D(G)` with the simples found in the tube
/// algebra of `Vec_G`, in `(d, ω)` and in `S` up to simultaneous permutation.
/// The returned permutation sends tube simple `x` to irrep `p[x]`.
pub fn cross_check_vs_tube(
    double: &GroupDoubleAlgebra,
    hopf: &HopfModularData,
    tube: &CenterAnalysis,
    tol: f64,
) -> Result<(Vec<usize>, Certificate)> {
    let mut cert = Certificate::new();
    let g = group_of_category(tube.tube.cat(), Tolerance::new(tol))?;
    let iso = g.isomorphism_to(&double.group).is_some();
    cert.push(Check::flag("category grading group matches", iso));
    if !iso {
        return Err(Error::NoMatching(format!("{} is not graded by the given group", tube.tube.cat().name)));
    }
    let a = tube.modular.view();
    // the Hopf trace (Tr ⊗ Tr)(R_21 R_12) is the tube S with a dual first argument
    let conj = hopf_conjugation(double, hopf, tol)?;
    cert.push(Check::flag("antipode permutes the idempotents", true));
    let n = hopf.dims.len();
    let b = ModularView {
        dims: hopf.dims.iter().map(|&d| re(d)).collect(),
        twists: hopf.twists.clone(),
        s: Mat::from_fn(n, n, |x, y| hopf.s[(conj[x], y)]),
    };
    cert.push(Check::flag("number of simples", a.rank() == b.rank()));
    let p = match_modular(&a, &b, tol)?;
    cert.push(Check::below("(d, ω, S) matched up to permutation", match_residual(&a, &b, &p), tol));
    Ok((p, cert))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn group_constructors() {
        let s3 = GroupSpec::symmetric(3);
        assert_eq!(s3.order(), 6);
        assert_eq!(s3.identity(), 0);
        assert!(!s3.is_abelian());
        assert_eq!(s3.conjugacy_classes().len(), 3);
        assert_eq!(s3.double_irrep_count(), 8);
        assert_eq!(GroupSpec::cyclic(3).double_irrep_count(), 9);
        assert_eq!(GroupSpec::trivial().double_irrep_count(), 1);
        assert_eq!(s3.name(1), "132");
    }

    #[test]
    fn invalid_tables_rejected() {
        assert!(GroupSpec::from_table(vec![vec![0, 1], vec![0, 1]]).is_err());
        assert!(GroupSpec::from_table(vec![vec![0, 2], vec![1, 0]]).is_err());
        // Latin square that is not associative
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(GroupSpec::from_table(t).is_err());
        assert!(matches!(GroupSpec::parse_json("{\"cyclic\": 2, \"x\": 1}"), Err(Error::ParseError(_))));
        assert!(GroupSpec::parse_json("{\"order\": 2, \"table\": [[0,1],[1,0]]}").is_ok());
        assert!(GroupSpec::parse_json("{\"order\": 3, \"table\": [[0,1],[1,0]]}").is_err());
    }

    #[test]
    fn identity_first_and_isomorphism() {
        let g = GroupSpec::from_table(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(g.identity(), 1);
        let (h, perm) = g.identity_first();
        assert_eq!(h.identity(), 0);
        assert_eq!(perm, vec![1, 0]);
        assert!(h.isomorphism_to(&GroupSpec::cyclic(2)).is_some());
        assert!(GroupSpec::cyclic(6).isomorphism_to(&GroupSpec::symmetric(3)).is_none());
        let s3 = GroupSpec::symmetric(3);
        assert!(s3.isomorphism_to(&s3).is_some());
    }

    #[test]
    fn double_dimensions_and_centers() {
        let d = build_double(&GroupSpec::cyclic(2), tol()).unwrap();
        assert_eq!(d.dim(), 4);
        assert!(d.algebra().is_commutative(tol()));
        let d = build_double(&GroupSpec::symmetric(3), tol()).unwrap();
        assert_eq!(d.dim(), 36);
        assert_eq!(algebra::center_basis(d.algebra(), tol()).ncols(), 8);
        let d = build_double(&GroupSpec::trivial(), tol()).unwrap();
        assert_eq!(d.dim(), 1);
    }

    #[test]
    fn hopf_and_ribbon_axioms() {
        for conv in [Convention::Standard, Convention::CoOpposite] {
            for g in [GroupSpec::cyclic(2), GroupSpec::cyclic(3), GroupSpec::symmetric(3)] {
                let d = build_double_with(&g, conv, tol()).unwrap();
                let c = d.hopf_checks(Tolerance::new(1e-12));
                assert!(c.pass(), "{:?} {:?}", conv, c.first_failure());
                let c = d.drinfeld_and_ribbon_checks(Tolerance::new(1e-12));
                assert!(c.pass(), "{:?} {:?}", conv, c.first_failure());
                let c = d.integral_checks(tol());
                assert!(c.pass(), "{:?}", c.first_failure());
            }
        }
    }

    #[test]
    fn drinfeld_u_closed_form() {
        // u = Σ_g δ_{g^{-1}} ⊗ g in the co-opposite convention
        let g = GroupSpec::symmetric(3);
        let d = build_double(&g, tol()).unwrap();
        let mut want = Vector::zeros(d.dim());
        for x in 0..6 {
            want[d.index(g.inv(x), x)] = ONE;
        }
        assert!(linalg::max_abs_vec(&(&d.u - want)) < 1e-15);
    }

    #[test]
    fn integral_normalisation() {
        // μ(δ_g ⊗ h) = δ_{h,e} already satisfies 𝔖₊𝔖₋ = id
        for g in [GroupSpec::cyclic(2), GroupSpec::symmetric(3)] {
            let d = build_double(&g, tol()).unwrap();
            assert!((d.mu_scale - 1.0).abs() < 1e-12);
            for k in 0..d.dim() {
                let (_, h) = d.unpack(k);
                let want = if h == g.identity() { 1.0 } else { 0.0 };
                assert!((d.mu[k] - re(want)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fourier_relations() {
        for g in [GroupSpec::cyclic(2), GroupSpec::cyclic(3), GroupSpec::symmetric(3)] {
            let d = build_double(&g, tol()).unwrap();
            let (c, lambda) = d.fourier_checks(tol());
            assert!(c.pass(), "{:?}", c.first_failure());
            assert!(lambda.norm() > 0.0);
        }
    }

    #[test]
    fn kerler_square() {
        for g in [GroupSpec::cyclic(2), GroupSpec::cyclic(3), GroupSpec::symmetric(3)] {
            let d = build_double(&g, tol()).unwrap();
            assert!(d.kerler_residual(tol()) < 1e-12);
        }
        // for abelian groups both conventions agree
        let d = build_double_with(&GroupSpec::cyclic(3), Convention::Standard, tol()).unwrap();
        assert!(d.kerler_residual(tol()) < 1e-12);
        let d = build_double_with(&GroupSpec::symmetric(3), Convention::Standard, tol()).unwrap();
        assert!(d.kerler_residual(tol()) > 0.1);
    }

    #[test]
    fn toric_code_data() {
        let d = build_double(&GroupSpec::cyclic(2), tol()).unwrap();
        let h = d.hopf_smatrix(1, tol()).unwrap();
        assert!(h.certificate.pass(), "{:?}", h.certificate.first_failure());
        let mut tw: Vec<f64> = h.twists.iter().map(|w| w.re).collect();
        tw.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((tw[0] + 1.0).abs() < 1e-12 && tw[1..].iter().all(|x| (x - 1.0).abs() < 1e-12));
        for i in 0..4 {
            for j in 0..4 {
                assert!((h.s[(i, j)].norm() - 1.0).abs() < 1e-12);
                assert!(h.s[(i, j)].im.abs() < 1e-12);
            }
        }
        // rows of the ±1 matrix are orthogonal
        let sts = h.s.adjoint() * &h.s;
        assert!(linalg::max_abs(&(sts - Mat::identity(4, 4) * re(4.0))) < 1e-12);
    }

    #[test]
    fn s3_double_data() {
        let d = build_double(&GroupSpec::symmetric(3), tol()).unwrap();
        let h = d.hopf_smatrix(3, tol()).unwrap();
        assert!(h.certificate.pass(), "{:?}", h.certificate.first_failure());
        let mut dims: Vec<i64> = h.dims.iter().map(|x| x.round() as i64).collect();
        dims.sort();
        assert_eq!(dims, vec![1, 1, 2, 2, 2, 2, 3, 3]);
        // class-sum oracle: S_{0j} = d_j
        for j in 0..8 {
            assert!((h.s[(0, j)] - re(h.dims[j])).norm() < 1e-9);
        }
        let ones = h.twists.iter().filter(|w| (*w - ONE).norm() < 1e-9).count();
        assert_eq!(ones, 5);
    }

    #[test]
    fn trivial_group_s_is_one() {
        let d = build_double(&GroupSpec::trivial(), tol()).unwrap();
        let h = d.hopf_smatrix(0, tol()).unwrap();
        assert_eq!(h.s.shape(), (1, 1));
        assert!((h.s[(0, 0)] - ONE).norm() < 1e-12);
    }

    #[test]
    fn seeds_do_not_change_the_data() {
        let d = build_double(&GroupSpec::symmetric(3), tol()).unwrap();
        let a = d.hopf_smatrix(1, tol()).unwrap();
        let b = d.hopf_smatrix(99, tol()).unwrap();
        assert!(linalg::max_abs(&(a.s - b.s)) < 1e-9);
    }
    #[test]
    fn tube_matches_oracle() {
        use crate::{catalog, center::analyze};
        for (cat, g, n) in [
            (catalog::vec_z2(), catalog::z2_group(), 4),
            (catalog::vec_z3(), catalog::z3_group(), 9),
            (catalog::vec_s3(), catalog::s3_group(), 8),
        ] {
            let d = build_double(&g, tol()).unwrap();
            let h = d.hopf_smatrix(1, tol()).unwrap();
            let an = analyze(&cat, 1, tol()).unwrap();
            let (p, cert) = cross_check_vs_tube(&d, &h, &an, 1e-7).unwrap();
            assert_eq!(p.len(), n);
            assert!(cert.pass(), "{:?}", cert.first_failure());
        }
    }

    #[test]
    fn z3_conjugation_pairs_charges() {
        let d = build_double(&GroupSpec::cyclic(3), tol()).unwrap();
        let h = d.hopf_smatrix(1, tol()).unwrap();
        let c = hopf_conjugation(&d, &h, 1e-7).unwrap();
        assert_eq!(c[0], 0);
        assert_eq!((0..9).filter(|&i| c[i] == i).count(), 1);
        assert!((0..9).all(|i| c[c[i]] == i));
    }

    #[test]
    fn cross_check_rejects_other_categories() {
        use crate::{catalog, center::analyze};
        let g = catalog::z2_group();
        let d = build_double(&g, tol()).unwrap();
        let h = d.hopf_smatrix(1, tol()).unwrap();
        let fib = analyze(&catalog::fibonacci(), 1, tol()).unwrap();
        assert!(matches!(cross_check_vs_tube(&d, &h, &fib, 1e-7), Err(Error::NoMatching(_))));
        let z3 = analyze(&catalog::vec_z3(), 1, tol()).unwrap();
        assert!(cross_check_vs_tube(&d, &h, &z3, 1e-7).is_err());
        // the semion has Z2 fusion but a twisted associator
        let sem = analyze(&catalog::semion(), 1, tol()).unwrap();
        assert!(cross_check_vs_tube(&d, &h, &sem, 1e-7).is_err());
    }
}
