//! Explicit objects of the Drinfeld center: an object of the category with a
//! half-braiding `e(j) : X X_j -> X_j X`.

use crate::center::ModularView;
use crate::error::{Error, Result};
use crate::fusion::{hexagon_residuals, FusionCategoryData, Label};
use crate::linalg::{self, Mat, Vector};
use crate::morphism::{Calculus, Object, ObjectWord, SkeletalMorphism};
use crate::report::{Check, Certificate};
use crate::scalar::{re, Tolerance, C64, ONE, ZERO};
use crate::tube::{TubeAlgebra, TubeElement};

/// `⊕_i N_i X_i` with the summands ordered by label.
pub fn simple_object(mult: &[usize]) -> Object {
    let mut words = Vec::new();
    for (i, &n) in mult.iter().enumerate() {
        for _ in 0..n {
            words.push(ObjectWord(vec![i]));
        }
    }
    Object(words)
}

/// Labels of the summands of [`simple_object`].
fn summand_labels(mult: &[usize]) -> Vec<Label> {
    mult.iter().enumerate().flat_map(|(i, &n)| std::iter::repeat(i).take(n)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfBraiding {
    pub mult: Vec<usize>,
    /// `e[j] : X ⊗ X_j -> X_j ⊗ X`.
    pub e: Vec<SkeletalMorphism>,
}

impl HalfBraiding {
    pub fn object(&self) -> Object {
        simple_object(&self.mult)
    }

    pub fn dim(&self, cat: &FusionCategoryData) -> C64 {
        self.mult.iter().enumerate().map(|(i, &n)| cat.dim(i) * re(n as f64)).sum()
    }

    /// The unit object with `e(j) = id_{X_j}`.
    pub fn trivial(calc: &Calculus) -> Result<HalfBraiding> {
        let r = calc.rank();
        let mut mult = vec![0; r];
        mult[0] = 1;
        let e = (0..r)
            .map(|j| {
                let id = calc.identity_word(&[j]);
                calc.from_blocks(&Object::word(&[0, j]), &Object::word(&[j, 0]), id.blocks)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HalfBraiding { mult, e })
    }

    /// A copy with `e(j)` multiplied by `c`.
    pub fn scaled(&self, j: Label, c: C64) -> HalfBraiding {
        let mut out = self.clone();
        out.e[j] = out.e[j].scale(c);
        out
    }

    fn check_shape(&self, calc: &Calculus) -> Result<()> {
        let r = calc.rank();
        if self.mult.len() != r || self.e.len() != r {
            return Err(Error::ShapeMismatch("half-braiding needs one entry per label".into()));
        }
        let x = self.object();
        for (j, e) in self.e.iter().enumerate() {
            let w = Object::word(&[j]);
            if e.dom != x.tensor(&w) || e.cod != w.tensor(&x) {
                return Err(Error::ShapeMismatch(format!("e({j}) has the wrong type")));
            }
        }
        Ok(())
    }
}

/// A half-braiding, optionally tied to a simple of the tube analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleObjectExplicit {
    pub name: String,
    pub hb: HalfBraiding,
    pub simple_index: Option<usize>,
}

impl DoubleObjectExplicit {
    pub fn new(name: impl Into<String>, hb: HalfBraiding) -> Self {
        DoubleObjectExplicit {
            name: name.into(),
            hb,
            simple_index: None,
        }
    }
}

/// Residual of `(t ⊗ id) e(k) = (id ⊗ e(j))(e(i) ⊗ id)(id ⊗ t)` over all
/// vertices `t : X_k -> X_i X_j`.
pub fn braid_fusion_residual(calc: &Calculus, hb: &HalfBraiding) -> Result<f64> {
    hb.check_shape(calc)?;
    let cat = calc.cat();
    let r = calc.rank();
    let x = hb.object();
    let mut worst: f64 = 0.0;
    for i in 0..r {
        for j in 0..r {
            let wi = Object::word(&[i]);
            let wj = Object::word(&[j]);
            let step1 = calc.tensor_id(&hb.e[i], &wj)?;
            let step2 = calc.id_tensor(&wi, &hb.e[j])?;
            let two = calc.compose(&step2, &step1)?;
            for k in 0..r {
                for al in 0..cat.n(i, j, k) {
                    let t = calc.vertex(i, j, k, al)?;
                    let lhs = calc.compose(&calc.tensor_id(&t, &x)?, &hb.e[k])?;
                    let rhs = calc.compose(&two, &calc.id_tensor(&x, &t)?)?;
                    worst = worst.max(lhs.distance(&rhs));
                }
            }
        }
    }
    Ok(worst)
}

pub fn validate_halfbraiding(calc: &Calculus, hb: &HalfBraiding, tol: Tolerance) -> Certificate {
    let mut cert = Certificate::new();
    if let Err(e) = hb.check_shape(calc) {
        cert.push(Check::flag(format!("half-braiding: shape ({e})"), false));
        return cert;
    }
    let scale = hb.e.iter().map(|e| e.max_abs()).fold(1.0, f64::max);
    match braid_fusion_residual(calc, hb) {
        Ok(res) => cert.push(Check::below("half-braiding: braid-fusion relation", res, tol.eps * scale * scale)),
        Err(e) => cert.push(Check::flag(format!("half-braiding: braid-fusion relation ({e})"), false)),
    }
    let margin = hb.e.iter().map(|e| e.min_singular()).fold(f64::INFINITY, f64::min);
    cert.push(Check::above("half-braiding: invertible", margin, tol.sqrt()));
    let unit = hb.e[0]
        .blocks
        .iter()
        .map(|b| {
            if b.nrows() == b.ncols() {
                linalg::max_abs(&(b - Mat::identity(b.nrows(), b.ncols())))
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    cert.push(Check::below("half-braiding: e(1) = id", unit, tol.eps));
    cert
}

/// `c(X_a, X_b) : X_a X_b -> X_b X_a` from the R-symbols.
pub fn braiding_morphism(calc: &Calculus, a: Label, b: Label) -> Result<SkeletalMorphism> {
    let cat = calc.cat();
    let rs = cat
        .r
        .as_ref()
        .ok_or_else(|| Error::SchemaError("category has no R-symbols".into()))?;
    let mut z = calc.zero(&Object::word(&[a, b]), &Object::word(&[b, a]));
    for m in 0..calc.rank() {
        if let Some(blk) = rs.block(a, b, m) {
            z.blocks[m] = blk.transpose();
        }
    }
    Ok(z)
}

fn unit_mult(r: usize, k: Label) -> Vec<usize> {
    let mut m = vec![0; r];
    m[k] = 1;
    m
}

/// `I(X_k) = (X_k, c(X_k, ·))` and `Ĩ(X_k) = (X_k, c(·, X_k)^{-1})`.
pub fn braided_embeddings(calc: &Calculus, tol: Tolerance) -> Result<(Vec<DoubleObjectExplicit>, Vec<DoubleObjectExplicit>)> {
    let cat = calc.cat();
    let rs = cat
        .r
        .as_ref()
        .ok_or_else(|| Error::SchemaError("category has no R-symbols".into()))?;
    let (h1, h2) = hexagon_residuals(&cat.ring, &cat.f, rs);
    if h1.max(h2) >= tol.sqrt() {
        return Err(Error::HexagonFailed { residual: h1.max(h2) });
    }
    let r = calc.rank();
    let mut plain = Vec::with_capacity(r);
    let mut mirror = Vec::with_capacity(r);
    for k in 0..r {
        let e = (0..r).map(|j| braiding_morphism(calc, k, j)).collect::<Result<Vec<_>>>()?;
        let et = (0..r)
            .map(|j| braiding_morphism(calc, j, k)?.inverse())
            .collect::<Result<Vec<_>>>()?;
        let name = cat.ring.label(k);
        plain.push(DoubleObjectExplicit::new(format!("I({name})"), HalfBraiding { mult: unit_mult(r, k), e }));
        mirror.push(DoubleObjectExplicit::new(format!("~I({name})"), HalfBraiding { mult: unit_mult(r, k), e: et }));
    }
    Ok((plain, mirror))
}

/// Labels `k` with `c(X_j, X_k) c(X_k, X_j) = id` for all `j`.
pub fn z2_center(calc: &Calculus, tol: Tolerance) -> Result<Vec<Label>> {
    let r = calc.rank();
    let mut out = Vec::new();
    for k in 0..r {
        let mut worst: f64 = 0.0;
        for j in 0..r {
            let m = calc.compose(&braiding_morphism(calc, j, k)?, &braiding_morphism(calc, k, j)?)?;
            worst = worst.max(m.distance(&calc.identity_word(&[k, j])));
        }
        if worst < tol.eps {
            out.push(k);
        }
    }
    Ok(out)
}

fn zero_part(calc: &Calculus, dom: &ObjectWord, cod: &ObjectWord) -> SkeletalMorphism {
    calc.zero(&Object(vec![dom.clone()]), &Object(vec![cod.clone()]))
}

/// `(id_j ⊗ uinv) e(j) (u ⊗ id_j)` for every `j`.
fn conjugate(calc: &Calculus, e: &[SkeletalMorphism], u: &SkeletalMorphism, uinv: &SkeletalMorphism) -> Result<Vec<SkeletalMorphism>> {
    e.iter()
        .enumerate()
        .map(|(j, ej)| {
            let w = Object::word(&[j]);
            calc.compose_all(&[&calc.id_tensor(&w, uinv)?, ej, &calc.tensor_id(u, &w)?])
        })
        .collect()
}

/// Half-braiding of `X ⊗ Y`, re-expressed on `⊕_m N_m X_m` through
/// fusion vertices.
pub fn tensor_halfbraiding(calc: &Calculus, a: &HalfBraiding, b: &HalfBraiding) -> Result<HalfBraiding> {
    a.check_shape(calc)?;
    b.check_shape(calc)?;
    let cat = calc.cat();
    let r = calc.rank();
    let (x, y) = (a.object(), b.object());
    let raw: Vec<SkeletalMorphism> = (0..r)
        .map(|j| {
            let inner = calc.id_tensor(&x, &b.e[j])?;
            let outer = calc.tensor_id(&a.e[j], &y)?;
            calc.compose(&outer, &inner)
        })
        .collect::<Result<Vec<_>>>()?;
    let xy = x.tensor(&y);
    let la = summand_labels(&a.mult);
    let lb = summand_labels(&b.mult);
    // (label, raw summand, vertex multiplicity), ordered by label
    let mut channels = Vec::new();
    for m in 0..r {
        for (s, &p) in la.iter().enumerate() {
            for (t, &q) in lb.iter().enumerate() {
                for mu in 0..cat.n(p, q, m) {
                    channels.push((m, s * lb.len() + t, p, q, mu));
                }
            }
        }
    }
    let mut mult = vec![0; r];
    for c in &channels {
        mult[c.0] += 1;
    }
    let obj = simple_object(&mult);
    let mut up: Vec<Vec<SkeletalMorphism>> = xy
        .0
        .iter()
        .map(|cw| obj.0.iter().map(|dw| zero_part(calc, dw, cw)).collect())
        .collect();
    let mut down: Vec<Vec<SkeletalMorphism>> = obj
        .0
        .iter()
        .map(|cw| xy.0.iter().map(|dw| zero_part(calc, dw, cw)).collect())
        .collect();
    for (col, &(m, row, p, q, mu)) in channels.iter().enumerate() {
        up[row][col] = calc.vertex(p, q, m, mu)?;
        down[col][row] = calc.covertex(p, q, m, mu)?;
    }
    let u = calc.assemble(&obj, &xy, &up)?;
    let uinv = calc.assemble(&xy, &obj, &down)?;
    let e = conjugate(calc, &raw, &u, &uinv)?;
    Ok(HalfBraiding { mult, e })
}

/// Half-braiding of the dual object, from `e(j)^{-1}` closed off with the
/// duality of `X`.
pub fn dual_halfbraiding(calc: &Calculus, hb: &HalfBraiding) -> Result<HalfBraiding> {
    hb.check_shape(calc)?;
    let cat = calc.cat();
    let r = calc.rank();
    let x = hb.object();
    let labels = summand_labels(&hb.mult);
    let xbar = Object(labels.iter().map(|&a| ObjectWord(vec![cat.dual(a)])).collect());
    let n = labels.len();
    let unit = Object::unit();
    let xxb = x.tensor(&xbar);
    let coev_parts: Vec<Vec<SkeletalMorphism>> = (0..n * n)
        .map(|rc| {
            let (s, t) = (rc / n, rc % n);
            vec![if s == t { calc.coev(labels[s]) } else { zero_part(calc, &unit.0[0], &xxb.0[rc]) }]
        })
        .collect();
    let coev = calc.assemble(&unit, &xxb, &coev_parts)?;
    let xbx = xbar.tensor(&x);
    let ev_parts: Vec<Vec<SkeletalMorphism>> = vec![(0..n * n)
        .map(|rc| {
            let (s, t) = (rc / n, rc % n);
            if s == t {
                calc.ev(labels[s])
            } else {
                zero_part(calc, &xbx.0[rc], &unit.0[0])
            }
        })
        .collect()];
    let ev = calc.assemble(&xbx, &unit, &ev_parts)?;
    let raw: Vec<SkeletalMorphism> = (0..r)
        .map(|j| {
            let w = Object::word(&[j]);
            let cup = calc.id_tensor(&xbar.tensor(&w), &coev)?;
            let inv = hb.e[j].inverse()?;
            let mid = calc.tensor(&calc.id_tensor(&xbar, &inv)?, &calc.identity(&xbar))?;
            let cap = calc.tensor_id(&ev, &w.tensor(&xbar))?;
            calc.compose_all(&[&cap, &mid, &cup])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut mult = vec![0; r];
    for (a, &k) in hb.mult.iter().enumerate() {
        mult[cat.dual(a)] += k;
    }
    let obj = simple_object(&mult);
    // sort the dual summands by label
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&s| cat.dual(labels[s]));
    let mut up: Vec<Vec<SkeletalMorphism>> = xbar
        .0
        .iter()
        .map(|cw| obj.0.iter().map(|dw| zero_part(calc, dw, cw)).collect())
        .collect();
    let mut down: Vec<Vec<SkeletalMorphism>> = obj
        .0
        .iter()
        .map(|cw| xbar.0.iter().map(|dw| zero_part(calc, dw, cw)).collect())
        .collect();
    for (col, &s) in order.iter().enumerate() {
        let a = cat.dual(labels[s]);
        up[s][col] = calc.identity_word(&[a]);
        down[col][s] = calc.identity_word(&[a]);
    }
    let p = calc.assemble(&obj, &xbar, &up)?;
    let pinv = calc.assemble(&xbar, &obj, &down)?;
    let e = conjugate(calc, &raw, &p, &pinv)?;
    Ok(HalfBraiding { mult, e })
}

/// The central idempotent `z[i,j,i] = d(X)/(λ d_i) Σ_α (id ⊗ p'_α) e(j) (p_α ⊗ id)`.
pub fn idempotent_from_halfbraiding(tube: &TubeAlgebra, hb: &HalfBraiding) -> Result<TubeElement> {
    let calc = tube.calculus();
    hb.check_shape(calc)?;
    let cat = tube.cat();
    let x = hb.object();
    let labels = summand_labels(&hb.mult);
    let dx = hb.dim(cat);
    let mut z = TubeElement::default();
    for i in 0..tube.rank() {
        if hb.mult[i] == 0 {
            continue;
        }
        for j in 0..tube.rank() {
            if tube.block((i, j, i)).is_none() {
                continue;
            }
            let wj = Object::word(&[j]);
            let mut acc = calc.zero(&Object::word(&[i, j]), &Object::word(&[j, i]));
            for (s, _) in labels.iter().enumerate().filter(|(_, &a)| a == i) {
                let p = calc.summand_inclusion(&x, s);
                let pp = calc.summand_projection(&x, s);
                let w = calc.compose_all(&[&calc.id_tensor(&wj, &pp)?, &hb.e[j], &calc.tensor_id(&p, &wj)?])?;
                acc.add_assign(&w)?;
            }
            z.insert((i, j, i), acc.scale(dx / (cat.lambda() * cat.dim(i))));
        }
    }
    let v = tube.vector(&z)?;
    let res = linalg::max_abs_vec(&(tube.algebra().mul(&v, &v) - &v));
    if res >= tube.tolerance().sqrt() * linalg::max_abs_vec(&v).max(1.0) {
        return Err(Error::NotIdempotent { residual: res });
    }
    Ok(z)
}

fn intertwiner_defect(calc: &Calculus, a: &HalfBraiding, b: &HalfBraiding, f: &SkeletalMorphism) -> Result<Vec<C64>> {
    let mut out = Vec::new();
    for j in 0..calc.rank() {
        let w = Object::word(&[j]);
        let l = calc.compose(&calc.id_tensor(&w, f)?, &a.e[j])?;
        let r = calc.compose(&b.e[j], &calc.tensor_id(f, &w)?)?;
        out.extend(l.sub(&r)?.coords());
    }
    Ok(out)
}

/// Basis of `Hom((X, e_X), (Y, e_Y))`: morphisms `f` with
/// `(id ⊗ f) e_X(j) = e_Y(j) (f ⊗ id)` for every `j`.
pub fn hom_double(calc: &Calculus, a: &DoubleObjectExplicit, b: &DoubleObjectExplicit, tol: Tolerance) -> Result<Vec<SkeletalMorphism>> {
    let (x, y) = (a.hb.object(), b.hb.object());
    let basis = calc.hom_basis(&x, &y);
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let cols = basis
        .iter()
        .map(|f| intertwiner_defect(calc, &a.hb, &b.hb, f))
        .collect::<Result<Vec<_>>>()?;
    let rows = cols[0].len();
    let m = Mat::from_fn(rows, basis.len(), |r, c| cols[c][r]);
    let scale = a.hb.e.iter().chain(&b.hb.e).map(|e| e.max_abs()).fold(1.0, f64::max);
    let k = linalg::kernel_with_floor(&m, tol.eps, scale);
    let mut out = Vec::with_capacity(k.ncols());
    for c in 0..k.ncols() {
        let mut f = calc.zero(&x, &y);
        for (q, g) in basis.iter().enumerate() {
            f.add_assign(&g.scale(k[(q, c)]))?;
        }
        out.push(f);
    }
    Ok(out)
}

/// Largest defect of `f` from being a morphism of the double.
pub fn intertwiner_residual(calc: &Calculus, a: &DoubleObjectExplicit, b: &DoubleObjectExplicit, f: &SkeletalMorphism) -> Result<f64> {
    Ok(intertwiner_defect(calc, &a.hb, &b.hb, f)?
        .into_iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// `E(t) = (dim C)^{-1} Σ_i d_i (ev'_i ⊗ id)(id ⊗ e_Y(ī))(id ⊗ t ⊗ id)(e_X(i) ⊗ id)(id ⊗ coev_i)`.
pub fn conditional_expectation(
    calc: &Calculus,
    a: &DoubleObjectExplicit,
    b: &DoubleObjectExplicit,
    t: &SkeletalMorphism,
) -> Result<SkeletalMorphism> {
    let (x, y) = (a.hb.object(), b.hb.object());
    if t.dom != x || t.cod != y {
        return Err(Error::ShapeMismatch(format!("expected a morphism {x} -> {y}")));
    }
    let cat = calc.cat();
    let mut acc = calc.zero(&x, &y);
    for i in 0..calc.rank() {
        let ib = cat.dual(i);
        let wi = Object::word(&[i]);
        let wib = Object::word(&[ib]);
        let s1 = calc.id_tensor(&x, &calc.coev(i))?;
        let s2 = calc.tensor_id(&a.hb.e[i], &wib)?;
        let s3 = calc.tensor_id(&calc.id_tensor(&wi, t)?, &wib)?;
        let s4 = calc.id_tensor(&wi, &b.hb.e[ib])?;
        let s5 = calc.tensor_id(&calc.ev_left(i), &y)?;
        let w = calc.compose_all(&[&s5, &s4, &s3, &s2, &s1])?;
        acc.add_assign(&w.scale(cat.dim(i)))?;
    }
    Ok(acc.scale(ONE / cat.dim_c()))
}

/// Twists `θ_a = d_a^{-1} Σ_c d_c Tr R^{aa}_c` and the Hopf-link matrix
/// `S_ab = Σ_c N_{āb}^c d_c θ_c / (θ_a θ_b)` of a braided input.
pub fn braided_modular_data(cat: &FusionCategoryData) -> Option<ModularView> {
    let rs = cat.r.as_ref()?;
    let r = cat.rank();
    let twists: Vec<C64> = (0..r)
        .map(|a| {
            let mut s = ZERO;
            for c in 0..r {
                if let Some(b) = rs.block(a, a, c) {
                    s += cat.dim(c) * linalg::trace(b);
                }
            }
            s / cat.dim(a)
        })
        .collect();
    let s = Mat::from_fn(r, r, |a, b| {
        let mut v = ZERO;
        for c in 0..r {
            let n = cat.n(cat.dual(a), b, c);
            if n > 0 {
                v += re(n as f64) * cat.dim(c) * twists[c] / (twists[a] * twists[b]);
            }
        }
        v
    });
    Some(ModularView {
        dims: (0..r).map(|a| cat.dim(a)).collect(),
        twists,
        s,
    })
}

/// Modular data of `C ⊠ C^rev` from that of `C`: dimensions `d_a d_b`,
/// twists `θ_a / θ_b`, and `S ⊗ conj(S)`.
pub fn mirror_product(v: &ModularView) -> ModularView {
    let r = v.rank();
    let mut dims = Vec::with_capacity(r * r);
    let mut twists = Vec::with_capacity(r * r);
    for a in 0..r {
        for b in 0..r {
            dims.push(v.dims[a] * v.dims[b]);
            twists.push(v.twists[a] / v.twists[b]);
        }
    }
    let sc = v.s.map(|z| z.conj());
    ModularView {
        dims,
        twists,
        s: linalg::kron(&v.s, &sc),
    }
}

/// Twist and dimension of the idempotent of a simple explicit object, read
/// off in the tube algebra.
pub fn tube_invariants(tube: &TubeAlgebra, hb: &HalfBraiding) -> Result<(C64, C64, Vector)> {
    let z = idempotent_from_halfbraiding(tube, hb)?;
    let v = tube.vector(&z)?;
    let (omega, _) = crate::center::twist(tube, &v)?;
    Ok((hb.dim(tube.cat()), omega, v))
}
