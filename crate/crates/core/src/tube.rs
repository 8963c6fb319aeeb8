//! The tube algebra `Ξ = ⊕_{i,j,k} Hom(X_i X_j, X_j X_k)`.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::algebra::{AssocAlgebra, Constant};
use crate::error::{Error, Result};
use crate::fusion::{FusionCategoryData, Label};
use crate::linalg::{self, Vector};
use crate::morphism::{Calculus, Object, SkeletalMorphism};
use crate::scalar::{c64, Tolerance, C64, ONE, ZERO};

/// Index `(i, j, k)` of the summand `Hom(X_i X_j, X_j X_k)`.
pub type TubeKey = (Label, Label, Label);

/// An element of the tube algebra, component by component. Absent keys are
/// zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TubeElement {
    pub comps: BTreeMap<TubeKey, SkeletalMorphism>,
}

impl TubeElement {
    pub fn get(&self, key: TubeKey) -> Option<&SkeletalMorphism> {
        self.comps.get(&key)
    }

    pub fn insert(&mut self, key: TubeKey, f: SkeletalMorphism) {
        self.comps.insert(key, f);
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.values().map(|f| f.max_abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct TubeBlock {
    pub key: TubeKey,
    pub dom: Object,
    pub cod: Object,
    pub offset: usize,
    pub len: usize,
}

#[derive(Debug)]
struct Layout {
    calc: Calculus,
    blocks: Vec<TubeBlock>,
    index: BTreeMap<TubeKey, usize>,
    dim: usize,
}

#[derive(Debug)]
pub struct TubeAlgebra {
    lay: Layout,
    tol: Tolerance,
    alg: AssocAlgebra,
    unit: TubeElement,
    /// `max |1_solved - λ δ_{ik} δ_{j0} id|`.
    pub unit_lambda_residual: f64,
    /// Same, against the coefficient `dim C` instead of `λ`.
    pub unit_dimc_residual: f64,
    t: Vector,
}

pub fn build_tube_algebra(cat: &FusionCategoryData, tol: Tolerance) -> Result<TubeAlgebra> {
    TubeAlgebra::build(cat, tol)
}

impl TubeAlgebra {
    pub fn build(cat: &FusionCategoryData, tol: Tolerance) -> Result<TubeAlgebra> {
        let calc = Calculus::from_data(cat);
        let r = cat.rank();
        let mut blocks = Vec::new();
        let mut index = BTreeMap::new();
        let mut offset = 0;
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let dom = Object::word(&[i, j]);
                    let cod = Object::word(&[j, k]);
                    let len = calc.hom_dim(&dom, &cod);
                    if len == 0 {
                        continue;
                    }
                    index.insert((i, j, k), blocks.len());
                    blocks.push(TubeBlock {
                        key: (i, j, k),
                        dom,
                        cod,
                        offset,
                        len,
                    });
                    offset += len;
                }
            }
        }
        let dim = offset;
        let lay = Layout { calc, blocks, index, dim };
        let constants = lay.structure_constants()?;
        let alg = AssocAlgebra::from_constants(dim, &constants, None, tol)?;
        let mut t = TubeAlgebra {
            lay,
            tol,
            alg,
            unit: TubeElement::default(),
            unit_lambda_residual: 0.0,
            unit_dimc_residual: 0.0,
            t: Vector::zeros(dim),
        };
        let unit = t.alg.unit().clone();
        let lam = cat.lambda();
        let closed = t.diagonal_unit(lam);
        t.unit_lambda_residual = linalg::max_abs_vec(&(&unit - closed));
        t.unit_dimc_residual = linalg::max_abs_vec(&(&unit - t.diagonal_unit(cat.dim_c())));
        t.unit = t.element(&unit);
        t.t = t.t_vector();
        Ok(t)
    }

    /// `c δ_{ik} δ_{j0} id_{X_i}` as a coordinate vector.
    fn diagonal_unit(&self, c: C64) -> Vector {
        let mut v = Vector::zeros(self.lay.dim);
        for i in 0..self.rank() {
            if let Some(&b) = self.lay.index.get(&(i, 0, i)) {
                v[self.lay.blocks[b].offset] = c;
            }
        }
        v
    }

    fn t_vector(&self) -> Vector {
        let cat = self.cat();
        let lam = cat.lambda();
        let mut v = Vector::zeros(self.lay.dim);
        for i in 0..self.rank() {
            if let Some(&b) = self.lay.index.get(&(i, i, i)) {
                let id = self.lay.calc.identity_word(&[i, i]).coords();
                let off = self.lay.blocks[b].offset;
                for (p, x) in id.into_iter().enumerate() {
                    v[off + p] = x * lam / cat.dim(i);
                }
            }
        }
        v
    }

    pub fn calculus(&self) -> &Calculus {
        &self.lay.calc
    }

    pub fn cat(&self) -> &FusionCategoryData {
        self.lay.calc.cat()
    }

    pub fn rank(&self) -> usize {
        self.lay.calc.rank()
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.lay.dim
    }

    pub fn algebra(&self) -> &AssocAlgebra {
        &self.alg
    }

    pub fn blocks(&self) -> &[TubeBlock] {
        &self.lay.blocks
    }

    pub fn block(&self, key: TubeKey) -> Option<&TubeBlock> {
        self.lay.index.get(&key).map(|&b| &self.lay.blocks[b])
    }

    /// Dimension of the diagonal part `Ξ_0 = ⊕_{i,j} Hom(X_i X_j, X_j X_i)`.
    pub fn xi0_dim(&self) -> usize {
        self.lay.blocks.iter().filter(|b| b.key.0 == b.key.2).map(|b| b.len).sum()
    }

    pub fn unit(&self) -> &TubeElement {
        &self.unit
    }

    pub fn unit_vector(&self) -> &Vector {
        self.alg.unit()
    }

    /// Coordinates of an element. Components must live in the right Hom
    /// spaces.
    pub fn vector(&self, x: &TubeElement) -> Result<Vector> {
        let mut v = Vector::zeros(self.lay.dim);
        for (key, f) in &x.comps {
            let blk = match self.block(*key) {
                Some(b) => b,
                None if f.max_abs() == 0.0 => continue,
                None => return Err(Error::ShapeMismatch(format!("no tube summand at {key:?}"))),
            };
            if f.dom != blk.dom || f.cod != blk.cod {
                return Err(Error::ShapeMismatch(format!(
                    "component {key:?} is {} -> {}, expected {} -> {}",
                    f.dom, f.cod, blk.dom, blk.cod
                )));
            }
            for (p, c) in f.coords().into_iter().enumerate() {
                v[blk.offset + p] = c;
            }
        }
        Ok(v)
    }

    /// The element with coordinates `v`; blocks that vanish identically are
    /// omitted.
    pub fn element(&self, v: &Vector) -> TubeElement {
        let mut out = TubeElement::default();
        for blk in &self.lay.blocks {
            let coords: Vec<C64> = (0..blk.len).map(|p| v[blk.offset + p]).collect();
            if coords.iter().all(|c| *c == ZERO) {
                continue;
            }
            let f = self
                .lay
                .calc
                .from_coords(&blk.dom, &blk.cod, &coords)
                .expect("block layout matches hom space");
            out.insert(blk.key, f);
        }
        out
    }

    pub fn zero(&self) -> TubeElement {
        TubeElement::default()
    }

    pub fn basis_element(&self, a: usize) -> TubeElement {
        self.element(&self.alg.basis(a))
    }

    fn random_vector<R: Rng>(&self, rng: &mut R, diagonal_only: bool) -> Vector {
        let mut v = Vector::zeros(self.lay.dim);
        for blk in &self.lay.blocks {
            if diagonal_only && blk.key.0 != blk.key.2 {
                continue;
            }
            for p in 0..blk.len {
                v[blk.offset + p] = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        v
    }

    pub fn random<R: Rng>(&self, rng: &mut R) -> TubeElement {
        self.element(&self.random_vector(rng, false))
    }

    /// Random element of `Ξ_0`.
    pub fn random_xi0<R: Rng>(&self, rng: &mut R) -> TubeElement {
        self.element(&self.random_vector(rng, true))
    }

    /// `v ∙ u` through the cached structure constants.
    pub fn multiply(&self, v: &TubeElement, u: &TubeElement) -> Result<TubeElement> {
        let x = self.alg.mul(&self.vector(v)?, &self.vector(u)?);
        Ok(self.element(&x))
    }

    /// `v ∙ u` by evaluating the defining diagram on every pair of
    /// components.
    pub fn multiply_direct(&self, v: &TubeElement, u: &TubeElement) -> Result<TubeElement> {
        self.vector(v)?;
        self.vector(u)?;
        let mut acc: BTreeMap<TubeKey, SkeletalMorphism> = BTreeMap::new();
        for (&vk, vf) in &v.comps {
            for (&uk, uf) in &u.comps {
                for (key, w) in self.lay.diagram(vf, vk, uf, uk)? {
                    match acc.get_mut(&key) {
                        Some(a) => a.add_assign(&w)?,
                        None => {
                            acc.insert(key, w);
                        }
                    }
                }
            }
        }
        Ok(TubeElement { comps: acc })
    }

    /// `t[i,j,k] = λ/d_i δ_{ik} δ_{ij} id`.
    pub fn t_element(&self) -> TubeElement {
        self.element(&self.t)
    }

    pub fn t_vector_ref(&self) -> &Vector {
        &self.t
    }

    pub fn centrality_residual(&self, x: &TubeElement) -> Result<f64> {
        Ok(self.alg.centrality_residual(&self.vector(x)?))
    }

    /// `φ(x) = λ Σ_i d_i tr_{X_i}(x[i,0,i])`.
    pub fn phi(&self, x: &TubeElement) -> Result<C64> {
        Ok(self.phi_vector(&self.vector(x)?))
    }

    pub fn phi_vector(&self, v: &Vector) -> C64 {
        let cat = self.cat();
        let mut s = ZERO;
        for i in 0..self.rank() {
            if let Some(b) = self.block((i, 0, i)) {
                let d = cat.dim(i);
                s += d * d * v[b.offset];
            }
        }
        s * cat.lambda()
    }

    /// The transform `Hom(X_i X_j, X_j X_i) -> Hom(X_j̄ X_i, X_i X_j̄)` on
    /// `Ξ_0`, closing the `X_j` strand with a cup on the right and a cap on
    /// the left.
    pub fn s_transform(&self, x: &TubeElement) -> Result<TubeElement> {
        let scale = x.max_abs().max(1.0);
        let c = &self.lay.calc;
        let mut out = TubeElement::default();
        for (&(i, j, k), s) in &x.comps {
            if i != k {
                if s.max_abs() > self.tol.eps * scale {
                    return Err(Error::NotInXi0((i, j, k)));
                }
                continue;
            }
            let jb = self.cat().dual(j);
            let cup = c.id_tensor(&Object::word(&[jb, i]), &c.coev(j))?;
            let mid = c.tensor(&c.tensor(&c.identity_word(&[jb]), s)?, &c.identity_word(&[jb]))?;
            let cap = c.tensor_id(&c.ev(j), &Object::word(&[i, jb]))?;
            let w = c.compose_all(&[&cap, &mid, &cup])?;
            match out.comps.get_mut(&(jb, i, jb)) {
                Some(a) => a.add_assign(&w)?,
                None => out.insert((jb, i, jb), w),
            }
        }
        Ok(out)
    }

    pub fn s_transform_vector(&self, v: &Vector) -> Result<Vector> {
        self.vector(&self.s_transform(&self.element(v))?)
    }

    /// `max |x - y|` between two elements.
    pub fn distance(&self, x: &TubeElement, y: &TubeElement) -> Result<f64> {
        Ok(linalg::max_abs_vec(&(self.vector(x)? - self.vector(y)?)))
    }

    /// Projection onto `Ξ_0`.
    pub fn diagonal_part(&self, v: &Vector) -> Vector {
        let mut out = v.clone();
        for blk in self.lay.blocks.iter().filter(|b| b.key.0 != b.key.2) {
            for p in 0..blk.len {
                out[blk.offset + p] = ZERO;
            }
        }
        out
    }
}

impl Layout {
    fn basis_morphism(&self, blk: &TubeBlock, p: usize) -> Result<SkeletalMorphism> {
        let mut coords = vec![ZERO; blk.len];
        coords[p] = ONE;
        self.calc.from_coords(&blk.dom, &blk.cod, &coords)
    }

    fn structure_constants(&self) -> Result<Vec<Constant>> {
        let per_block: Vec<Result<Vec<Constant>>> = self
            .blocks
            .par_iter()
            .map(|vb| {
                let mut out = Vec::new();
                let (l, _, _) = vb.key;
                for pa in 0..vb.len {
                    let v = self.basis_morphism(vb, pa)?;
                    for ub in self.blocks.iter().filter(|b| b.key.2 == l) {
                        for pb in 0..ub.len {
                            let u = self.basis_morphism(ub, pb)?;
                            for (key, w) in self.diagram(&v, vb.key, &u, ub.key)? {
                                let off = self.blocks[self.index[&key]].offset;
                                for (c, x) in w.coords().into_iter().enumerate() {
                                    if x != ZERO {
                                        out.push((vb.offset + pa, ub.offset + pb, off + c, x));
                                    }
                                }
                            }
                        }
                    }
                }
                Ok(out)
            })
            .collect();
        let mut all = Vec::new();
        for part in per_block {
            all.extend(part?);
        }
        Ok(all)
    }

    /// Evaluates `v ∙ u` for single components `v ∈ (l,n,k)`, `u ∈ (i,m,l)`.
    fn diagram(
        &self,
        v: &SkeletalMorphism,
        vk: TubeKey,
        u: &SkeletalMorphism,
        uk: TubeKey,
    ) -> Result<Vec<(TubeKey, SkeletalMorphism)>> {
        let (l, n, k) = vk;
        let (i, m, l2) = uk;
        if l != l2 {
            return Ok(Vec::new());
        }
        let cat = self.calc.cat();
        let c = &self.calc;
        let mut out = Vec::new();
        for j in 0..self.calc.rank() {
            let mult = cat.n(m, n, j);
            if mult == 0 || !self.index.contains_key(&(i, j, k)) {
                continue;
            }
            let pref = cat.dim(m) * cat.dim(n) / (cat.dim(j) * cat.lambda());
            let mut acc = c.zero(&Object::word(&[i, j]), &Object::word(&[j, k]));
            for al in 0..mult {
                let t = c.vertex(m, n, j, al)?;
                let tp = c.covertex(m, n, j, al)?;
                let bottom = c.id_tensor(&Object::word(&[i]), &t)?;
                let uu = c.tensor_id(u, &Object::word(&[n]))?;
                let vv = c.id_tensor(&Object::word(&[m]), v)?;
                let top = c.tensor_id(&tp, &Object::word(&[k]))?;
                let w = c.compose_all(&[&top, &vv, &uu, &bottom])?;
                acc.add_assign(&w)?;
            }
            out.push(((i, j, k), acc.scale(pref)));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::scalar::re;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tube(cat: FusionCategoryData) -> TubeAlgebra {
        build_tube_algebra(&cat, Tolerance::default()).unwrap()
    }

    #[test]
    fn dimensions_match_counts() {
        let z2 = tube(catalog::vec_z2());
        assert_eq!(z2.dim(), 4);
        assert!(z2.algebra().is_commutative(Tolerance::default()));
        // pairs (g, h) in S3, and commuting pairs
        let s3 = tube(catalog::vec_s3());
        assert_eq!(s3.dim(), 36);
        assert_eq!(s3.xi0_dim(), 18);
        assert!(!s3.algebra().is_commutative(Tolerance::default()));
        // 1+1+1+1+1+2 from the Fibonacci rules
        assert_eq!(tube(catalog::fibonacci()).dim(), 7);
        assert_eq!(tube(catalog::trivial()).dim(), 1);
    }

    #[test]
    fn unit_has_lambda_coefficient() {
        for cat in [catalog::vec_z2(), catalog::fibonacci(), catalog::vec_s3(), catalog::yang_lee()] {
            let t = tube(cat);
            assert!(t.unit_lambda_residual < 1e-9, "{}", t.unit_lambda_residual);
            assert!(t.unit_dimc_residual > 0.1);
        }
    }

    #[test]
    fn z2_characters_sum_to_unit() {
        // z_{(a,χ)}[i,j,i] = λ^{-1} χ(j) δ_{ia}
        let t = tube(catalog::vec_z2());
        let lam = 2f64.sqrt();
        let mut sum = Vector::zeros(4);
        for a in 0..2 {
            for chi in [1.0, -1.0] {
                let mut v = Vector::zeros(4);
                for j in 0..2 {
                    let b = t.block((a, j, a)).unwrap();
                    v[b.offset] = re(if j == 1 { chi } else { 1.0 } / lam);
                }
                let p = t.algebra().mul(&v, &v);
                assert!(linalg::max_abs_vec(&(p - &v)) < 1e-12);
                sum += v;
            }
        }
        assert!(linalg::max_abs_vec(&(sum - t.unit_vector())) < 1e-12);
    }

    #[test]
    fn unit_acts_trivially_and_products_associate() {
        let t = tube(catalog::fibonacci());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = t.random(&mut rng);
            let b = t.random(&mut rng);
            let c = t.random(&mut rng);
            let ua = t.multiply(t.unit(), &a).unwrap();
            assert!(t.distance(&ua, &a).unwrap() < 1e-9);
            let l = t.multiply(&t.multiply(&a, &b).unwrap(), &c).unwrap();
            let r = t.multiply(&a, &t.multiply(&b, &c).unwrap()).unwrap();
            assert!(t.distance(&l, &r).unwrap() < 1e-9);
        }
    }

    #[test]
    fn direct_evaluation_matches_constants() {
        let t = tube(catalog::fibonacci_gauged());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let a = t.random(&mut rng);
            let b = t.random(&mut rng);
            let x = t.multiply(&a, &b).unwrap();
            let y = t.multiply_direct(&a, &b).unwrap();
            assert!(t.distance(&x, &y).unwrap() < 1e-10);
        }
    }

    #[test]
    fn t_element_values_and_centrality() {
        let z2 = tube(catalog::vec_z2());
        let te = z2.t_element();
        for i in 0..2 {
            let c = te.get((i, i, i)).unwrap();
            assert!((c.coords()[0] - re(2f64.sqrt())).norm() < 1e-12);
        }
        let fib = tube(catalog::fibonacci());
        assert!(fib.centrality_residual(&fib.t_element()).unwrap() < 1e-10);
        let triv = tube(catalog::trivial());
        assert!(triv.distance(&triv.t_element(), triv.unit()).unwrap() < 1e-12);
    }

    #[test]
    fn phi_of_t_is_dimension() {
        for cat in [catalog::vec_z2(), catalog::fibonacci(), catalog::vec_s3()] {
            let t = tube(cat);
            let dimc = t.cat().dim_c();
            assert!((t.phi(&t.t_element()).unwrap() - dimc).norm() < 1e-9);
            assert_eq!(t.phi(&t.zero()).unwrap(), ZERO);
        }
        let z2 = tube(catalog::vec_z2());
        assert!((z2.phi(&z2.t_element()).unwrap() - re(2.0)).norm() < 1e-12);
    }

    #[test]
    fn s_transform_has_order_four() {
        for cat in [catalog::fibonacci(), catalog::vec_s3(), catalog::semion(), catalog::yang_lee()] {
            let t = tube(cat);
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            for _ in 0..10 {
                let u = t.random_xi0(&mut rng);
                let mut y = u.clone();
                for _ in 0..4 {
                    y = t.s_transform(&y).unwrap();
                }
                assert!(t.distance(&y, &u).unwrap() < 1e-8);
            }
        }
    }

    #[test]
    fn s_transform_index_map() {
        let t = tube(catalog::vec_z3());
        // (i, j, i) goes to (j̄, i, j̄)
        let b = t.block((1, 2, 1)).unwrap();
        let mut v = Vector::zeros(t.dim());
        v[b.offset] = ONE;
        let s = t.s_transform(&t.element(&v)).unwrap();
        assert_eq!(s.comps.keys().copied().collect::<Vec<_>>(), vec![(1, 1, 1)]);
    }

    #[test]
    fn s_transform_rejects_off_diagonal() {
        let t = tube(catalog::vec_s3());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = t.random(&mut rng);
        assert!(matches!(t.s_transform(&u), Err(Error::NotInXi0(_))));
    }

    #[test]
    fn s_transform_preserves_center() {
        for cat in [catalog::fibonacci(), catalog::vec_s3()] {
            let t = tube(cat);
            let zb = crate::algebra::center_basis(t.algebra(), t.tolerance());
            for c in 0..zb.ncols() {
                let z = zb.column(c).into_owned();
                let s = t.s_transform_vector(&z).unwrap();
                assert!(t.algebra().centrality_residual(&s) < 1e-8);
            }
        }
    }

    #[test]
    fn center_preserves_xi0() {
        let t = tube(catalog::vec_s3());
        let zb = crate::algebra::center_basis(t.algebra(), t.tolerance());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = t.vector(&t.random_xi0(&mut rng)).unwrap();
        for c in 0..zb.ncols() {
            let p = t.algebra().mul(&zb.column(c).into_owned(), &u);
            assert!(linalg::max_abs_vec(&(&p - t.diagonal_part(&p))) < 1e-10);
        }
    }

    #[test]
    fn vector_rejects_wrong_hom() {
        let t = tube(catalog::fibonacci());
        let mut x = TubeElement::default();
        x.insert((1, 1, 1), t.calculus().identity_word(&[1]));
        assert!(matches!(t.vector(&x), Err(Error::ShapeMismatch(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn product_is_bilinear(seed in 0u64..1000, a in -2.0f64..2.0) {
            let t = tube(catalog::semion());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = t.random(&mut rng);
            let y = t.random(&mut rng);
            let z = t.random(&mut rng);
            let vx = t.vector(&x).unwrap();
            let vy = t.vector(&y).unwrap();
            let lhs = t.multiply_direct(&t.element(&(&vx * re(a) + &vy)), &z).unwrap();
            let rhs = t.vector(&t.multiply(&x, &z).unwrap()).unwrap() * re(a)
                + t.vector(&t.multiply(&y, &z).unwrap()).unwrap();
            prop_assert!(linalg::max_abs_vec(&(t.vector(&lhs).unwrap() - rhs)) < 1e-10);
        }
    }
}
