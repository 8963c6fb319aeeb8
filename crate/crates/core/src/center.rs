//! Simple objects of the Drinfeld center as minimal central idempotents of
//! the tube algebra, and their modular data.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::central_idempotents;
use crate::error::{Error, Result};
use crate::fusion::FusionCategoryData;
use crate::linalg::{self, Mat, Vector};
use crate::report::{Check, Certificate};
use crate::scalar::{dist_to_int, re, Tolerance, C64, ONE, ZERO};
use crate::tube::{TubeAlgebra, TubeElement};

/// Integrality tolerance for multiplicities and fusion coefficients.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct DoubleSimple {
    pub index: usize,
    pub z: TubeElement,
    pub zvec: Vector,
    pub d: C64,
    pub omega: C64,
    /// `N_i^X`, the multiplicity of `X_i` in the underlying object.
    pub mult: Vec<usize>,
    /// `max_i |λ d_i s_i / d - N_i|`.
    pub mult_residual: f64,
    /// `|d - Σ_i N_i d_i|`.
    pub dim_residual: f64,
    /// Residual of `t∙z = ω^{-1} z`.
    pub twist_residual: f64,
}

#[derive(Debug, Clone)]
pub struct ModularData {
    /// Unnormalized, `S(1, Y) = d(Y)`.
    pub s: Mat,
    pub t: Vec<C64>,
    pub dims: Vec<C64>,
    pub delta_plus: C64,
    pub delta_minus: C64,
    pub dim_double: C64,
    pub conjugation: Vec<usize>,
    /// Worst `|z_Y ∙ 𝔖(z_X) - c z_Y|`.
    pub proportionality_residual: f64,
    /// Worst `|𝔖²(z_X) - z_{X̄}|`.
    pub conjugation_residual: f64,
}

impl ModularData {
    /// `S / sqrt(dim Z)`.
    pub fn s_normalized(&self) -> Mat {
        &self.s / self.dim_double.sqrt()
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn view(&self) -> ModularView {
        ModularView {
            dims: self.dims.clone(),
            twists: self.t.clone(),
            s: self.s.clone(),
        }
    }
}

/// Reads `ω` off `t∙z = ω^{-1} z` by least squares over the support of `z`.
pub fn twist(tube: &TubeAlgebra, z: &Vector) -> Result<(C64, f64)> {
    let tz = tube.algebra().mul(tube.t_vector_ref(), z);
    proportionality(z, &tz, tube.tolerance()).map(|(c, r)| (ONE / c, r))
}

/// Best `c` with `w ≈ c z`, and the residual `max |w - c z|`.
fn proportionality(z: &Vector, w: &Vector, tol: Tolerance) -> Result<(C64, f64)> {
    let cut = tol.sqrt() * linalg::max_abs_vec(z);
    let mut num = ZERO;
    let mut den = 0.0;
    for (zc, wc) in z.iter().zip(w.iter()) {
        if zc.norm() > cut {
            num += zc.conj() * wc;
            den += zc.norm_sqr();
        }
    }
    if den == 0.0 {
        return Err(Error::ZeroIdempotent);
    }
    let c = num / den;
    Ok((c, linalg::max_abs_vec(&(w - z * c))))
}

fn multiplicities(tube: &TubeAlgebra, z: &Vector, d: C64) -> Option<(Vec<usize>, f64)> {
    let cat = tube.cat();
    let lam = cat.lambda();
    let mut out = Vec::with_capacity(tube.rank());
    let mut worst: f64 = 0.0;
    for i in 0..tube.rank() {
        let s = match tube.block((i, 0, i)) {
            Some(b) => z[b.offset],
            None => ZERO,
        };
        let n = lam * cat.dim(i) * s / d;
        let err = dist_to_int(n.re).max(n.im.abs());
        if err > INTEGRALITY_TOL || n.re < -INTEGRALITY_TOL {
            return None;
        }
        worst = worst.max(err);
        out.push(n.re.round() as usize);
    }
    if out.iter().all(|&n| n == 0) {
        return None;
    }
    Some((out, worst))
}

/// The trivial half-braiding on the unit: `z[0,j,0] = λ^{-1} id`.
pub fn unit_idempotent(tube: &TubeAlgebra) -> Vector {
    let mut v = Vector::zeros(tube.dim());
    let inv = ONE / tube.cat().lambda();
    for j in 0..tube.rank() {
        if let Some(b) = tube.block((0, j, 0)) {
            v[b.offset] = inv;
        }
    }
    v
}

fn rounded(x: f64) -> i64 {
    (x * 1e6).round() as i64
}

fn phase_key(w: C64) -> i64 {
    let mut a = w.arg();
    if a < -1e-9 {
        a += 2.0 * std::f64::consts::PI;
    }
    rounded(a.max(0.0))
}

fn simple_order(a: &DoubleSimple, b: &DoubleSimple) -> Ordering {
    let ka = (rounded(a.d.re), rounded(a.d.im), phase_key(a.omega));
    let kb = (rounded(b.d.re), rounded(b.d.im), phase_key(b.omega));
    ka.cmp(&kb)
        .then_with(|| a.mult.cmp(&b.mult))
        .then_with(|| {
            for (x, y) in a.zvec.iter().zip(b.zvec.iter()) {
                let o = (rounded(x.re), rounded(x.im)).cmp(&(rounded(y.re), rounded(y.im)));
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
}

/// Minimal central idempotents with their dimensions, twists and
/// multiplicities. The unit object comes first; the rest are ordered by
/// `(d, arg ω, multiplicities)`.
pub fn double_simples(tube: &TubeAlgebra, seed: u64) -> Result<Vec<DoubleSimple>> {
    let tol = tube.tolerance();
    let idem = central_idempotents(tube.algebra(), seed, tol)?;
    let mut out: Vec<DoubleSimple> = idem
        .into_par_iter()
        .enumerate()
        .map(|(k, z)| {
            let phi = tube.phi_vector(&z);
            let root = phi.sqrt();
            let cat = tube.cat();
            let mut pick = None;
            for d in [root, -root] {
                if let Some((mult, res)) = multiplicities(tube, &z, d) {
                    pick = Some((d, mult, res));
                    break;
                }
            }
            let (d, mult, mult_residual) = pick.ok_or(Error::BranchAmbiguous { index: k })?;
            let sum: C64 = mult.iter().enumerate().map(|(i, &n)| cat.dim(i) * re(n as f64)).sum();
            let (omega, twist_residual) = twist(tube, &z)?;
            Ok(DoubleSimple {
                index: k,
                z: tube.element(&z),
                zvec: z,
                d,
                omega,
                mult,
                mult_residual,
                dim_residual: (d - sum).norm(),
                twist_residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let unit = unit_idempotent(tube);
    let pos = out
        .iter()
        .map(|s| linalg::max_abs_vec(&(&s.zvec - &unit)))
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(p, _)| p);
    let first = pos.map(|p| out.remove(p));
    out.sort_by(simple_order);
    if let Some(f) = first {
        out.insert(0, f);
    }
    for (k, s) in out.iter_mut().enumerate() {
        s.index = k;
    }
    Ok(out)
}

/// S- and T-data from the action of 𝔖 on the minimal central idempotents.
pub fn s_matrix(tube: &TubeAlgebra, simples: &[DoubleSimple]) -> Result<ModularData> {
    let tol = tube.tolerance();
    let n = simples.len();
    let lam = tube.cat().lambda();
    let transformed: Vec<Vector> = simples
        .par_iter()
        .map(|x| tube.s_transform_vector(&tube.diagonal_part(&x.zvec)))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Result<(Vec<C64>, f64)>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut row = Vec::with_capacity(n);
            let mut worst: f64 = 0.0;
            for y in simples {
                let w = tube.algebra().mul(&y.zvec, &transformed[x]);
                let (c, r) = proportionality(&y.zvec, &w, tol)?;
                let scale = linalg::max_abs_vec(&y.zvec).max(1.0);
                if r >= tol.sqrt() * scale {
                    return Err(Error::NotProportional { residual: r });
                }
                worst = worst.max(r);
                row.push(c * y.d * lam * lam / simples[x].d);
            }
            Ok((row, worst))
        })
        .collect();
    // s_tilde[X][Y] = S(X̄, Y)
    let mut s_tilde = Mat::zeros(n, n);
    let mut prop_res: f64 = 0.0;
    for (x, r) in rows.into_iter().enumerate() {
        let (row, worst) = r?;
        prop_res = prop_res.max(worst);
        for (y, v) in row.into_iter().enumerate() {
            s_tilde[(x, y)] = v;
        }
    }
    let mut conjugation = Vec::with_capacity(n);
    let mut conj_res: f64 = 0.0;
    for (x, tx) in transformed.iter().enumerate() {
        let s2 = tube.s_transform_vector(tx)?;
        let (best, dist) = simples
            .iter()
            .map(|y| linalg::max_abs_vec(&(&s2 - &y.zvec)))
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(Error::ConjugationUnresolved { index: x })?;
        if dist >= INTEGRALITY_TOL {
            return Err(Error::ConjugationUnresolved { index: x });
        }
        conj_res = conj_res.max(dist);
        conjugation.push(best);
    }
    let mut s = Mat::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            s[(x, y)] = s_tilde[(conjugation[x], y)];
        }
    }
    let dims: Vec<C64> = simples.iter().map(|x| x.d).collect();
    let t: Vec<C64> = simples.iter().map(|x| x.omega).collect();
    let delta_plus = simples.iter().map(|x| x.omega * x.d * x.d).sum();
    let delta_minus = simples.iter().map(|x| x.d * x.d / x.omega).sum();
    let dim_double = simples.iter().map(|x| x.d * x.d).sum();
    Ok(ModularData {
        s,
        t,
        dims,
        delta_plus,
        delta_minus,
        dim_double,
        conjugation,
        proportionality_residual: prop_res,
        conjugation_residual: conj_res,
    })
}

fn permutation_matrix(p: &[usize]) -> Mat {
    let mut m = Mat::zeros(p.len(), p.len());
    for (x, &y) in p.iter().enumerate() {
        m[(x, y)] = ONE;
    }
    m
}

/// Invertibility, killing rows, order of the normalized S, symmetry.
pub fn verify_modularity(data: &ModularData, tol: Tolerance) -> Certificate {
    let n = data.rank();
    let mut cert = Certificate::new();
    let dd = data.dim_double;
    let scale = dd.norm().powf(n as f64 / 2.0);
    let det = data.s.determinant().norm();
    cert.push(Check::above("modularity: |det S|", det, tol.sqrt() * scale));
    let mut kill: f64 = 0.0;
    for y in 0..n {
        let mut sum = ZERO;
        for x in 0..n {
            sum += data.dims[x] * data.s[(x, y)];
        }
        if y == 0 {
            sum -= dd;
        }
        kill = kill.max(sum.norm());
    }
    cert.push(Check::below("modularity: killing rows", kill, 1e-8 * dd.norm().max(1.0)));
    let sn = data.s_normalized();
    let s2 = &sn * &sn;
    let c = permutation_matrix(&data.conjugation);
    cert.push(Check::below(
        "modularity: normalized S squared is conjugation",
        linalg::max_abs(&(&s2 - &c)),
        1e-7,
    ));
    cert.push(Check::below(
        "modularity: normalized S has order four",
        linalg::max_abs(&(&s2 * &s2 - Mat::identity(n, n))),
        1e-7,
    ));
    let invol = data.conjugation.iter().enumerate().all(|(x, &y)| data.conjugation[y] == x);
    cert.push(Check::flag("modularity: conjugation is an involution", invol));
    cert.push(Check::below(
        "modularity: S symmetric",
        linalg::max_abs(&(&data.s - data.s.transpose())),
        1e-8 * dd.norm().max(1.0),
    ));
    let unit_row = (0..n).map(|y| (data.s[(0, y)] - data.dims[y]).norm()).fold(0.0, f64::max);
    cert.push(Check::below("modularity: unit row is dimensions", unit_row, 1e-8 * dd.norm().max(1.0)));
    cert
}

/// `Δ± = dim C` and `Σ d(X)^2 = (dim C)^2`.
pub fn gauss_and_dimension_checks(data: &ModularData, cat: &FusionCategoryData) -> Certificate {
    let dc = cat.dim_c();
    let mut cert = Certificate::new();
    let s = dc.norm().max(1.0);
    cert.push(Check::below("gauss: delta+ = dim C", (data.delta_plus - dc).norm(), 1e-8 * s));
    cert.push(Check::below("gauss: delta- = dim C", (data.delta_minus - dc).norm(), 1e-8 * s));
    cert.push(Check::below("gauss: dim Z = (dim C)^2", (data.dim_double - dc * dc).norm(), 1e-8 * s * s));
    cert.push(Check::below(
        "gauss: delta+ delta- = dim Z",
        (data.delta_plus * data.delta_minus - data.dim_double).norm(),
        1e-8 * s * s,
    ));
    cert
}

#[derive(Debug, Clone, Serialize)]
pub struct CountBound {
    pub simples: usize,
    pub bound: usize,
    pub equality: bool,
    pub certificate: Certificate,
}

/// `#simples ≤ Σ_{i,j} dim Hom(X_i X_j, X_j X_i)`.
pub fn count_bound_check(simples: &[DoubleSimple], cat: &FusionCategoryData) -> CountBound {
    let r = cat.rank();
    let mut bound = 0;
    for i in 0..r {
        for j in 0..r {
            for m in 0..r {
                bound += cat.n(i, j, m) * cat.n(j, i, m);
            }
        }
    }
    let mut certificate = Certificate::new();
    certificate.push(Check::flag("count bound", simples.len() <= bound));
    CountBound {
        simples: simples.len(),
        bound,
        equality: simples.len() == bound,
        certificate,
    }
}

/// `Σ_X N_i^X d(X) = dim C d_i` for every simple `X_i` of the input.
pub fn induction_check(simples: &[DoubleSimple], cat: &FusionCategoryData) -> Certificate {
    let dc = cat.dim_c();
    let mut cert = Certificate::new();
    for i in 0..cat.rank() {
        let sum: C64 = simples.iter().map(|x| x.d * re(x.mult[i] as f64)).sum();
        cert.push(Check::below(
            format!("induction: {}", cat.ring.label(i)),
            (sum - dc * cat.dim(i)).norm(),
            1e-8 * dc.norm().max(1.0),
        ));
    }
    cert
}

/// Fusion rules of the double, `n[(x*r + y)*r + z] = N_{XY}^Z`.
#[derive(Debug, Clone, Serialize)]
pub struct DoubleFusion {
    pub rank: usize,
    pub n: Vec<usize>,
    pub rounding_residual: f64,
}

impl DoubleFusion {
    pub fn get(&self, x: usize, y: usize, z: usize) -> usize {
        self.n[(x * self.rank + y) * self.rank + z]
    }
}

/// `N_{XY}^Z = Σ_W S_{XW} S_{YW} (S^{-1})_{WZ} / S_{1W}`.
pub fn verlinde_fusion(data: &ModularData) -> Result<DoubleFusion> {
    let r = data.rank();
    let sinv = linalg::inverse(&data.s)?;
    let mut n = vec![0; r * r * r];
    let mut worst: f64 = 0.0;
    for x in 0..r {
        for y in 0..r {
            for z in 0..r {
                let mut v = ZERO;
                for w in 0..r {
                    v += data.s[(x, w)] * data.s[(y, w)] * sinv[(w, z)] / data.s[(0, w)];
                }
                let err = dist_to_int(v.re).max(v.im.abs());
                if err > INTEGRALITY_TOL || v.re < -INTEGRALITY_TOL {
                    return Err(Error::NonIntegerFusion { residual: err.max(-v.re) });
                }
                worst = worst.max(err);
                n[(x * r + y) * r + z] = v.re.round() as usize;
            }
        }
    }
    Ok(DoubleFusion {
        rank: r,
        n,
        rounding_residual: worst,
    })
}

/// Dimensions, twists and S of some modular category, for matching.
#[derive(Debug, Clone)]
pub struct ModularView {
    pub dims: Vec<C64>,
    pub twists: Vec<C64>,
    pub s: Mat,
}

impl ModularView {
    pub fn rank(&self) -> usize {
        self.dims.len()
    }
}

/// A permutation `p` with `b[p[x]] ≈ a[x]` in dimension and twist and
/// `S_b[p x, p y] ≈ S_a[x, y]`, found by backtracking.
pub fn match_modular(a: &ModularView, b: &ModularView, tol: f64) -> Result<Vec<usize>> {
    let n = a.rank();
    if b.rank() != n {
        return Err(Error::NoMatching(format!("ranks {} and {}", n, b.rank())));
    }
    let cand: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            (0..n)
                .filter(|&y| (a.dims[x] - b.dims[y]).norm() < tol && (a.twists[x] - b.twists[y]).norm() < tol)
                .collect()
        })
        .collect();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(x: usize, a: &ModularView, b: &ModularView, tol: f64, cand: &[Vec<usize>], perm: &mut [usize], used: &mut [bool]) -> bool {
        if x == perm.len() {
            return true;
        }
        for &y in &cand[x] {
            if used[y] {
                continue;
            }
            let ok = (0..x).all(|x2| {
                let y2 = perm[x2];
                (a.s[(x, x2)] - b.s[(y, y2)]).norm() < tol && (a.s[(x2, x)] - b.s[(y2, y)]).norm() < tol
            }) && (a.s[(x, x)] - b.s[(y, y)]).norm() < tol;
            if !ok {
                continue;
            }
            perm[x] = y;
            used[y] = true;
            if go(x + 1, a, b, tol, cand, perm, used) {
                return true;
            }
            used[y] = false;
        }
        perm[x] = usize::MAX;
        false
    }
    if go(0, a, b, tol, &cand, &mut perm, &mut used) {
        Ok(perm)
    } else {
        Err(Error::NoMatching("no permutation matches dimensions, twists and S".into()))
    }
}

/// Largest deviation of `b` from `a` under the permutation `p`.
pub fn match_residual(a: &ModularView, b: &ModularView, p: &[usize]) -> f64 {
    let n = a.rank();
    let mut worst: f64 = 0.0;
    for x in 0..n {
        worst = worst.max((a.dims[x] - b.dims[p[x]]).norm());
        worst = worst.max((a.twists[x] - b.twists[p[x]]).norm());
        for y in 0..n {
            worst = worst.max((a.s[(x, y)] - b.s[(p[x], p[y])]).norm());
        }
    }
    worst
}

/// Everything computed for one input category.
#[derive(Debug)]
pub struct CenterAnalysis {
    pub tube: TubeAlgebra,
    pub simples: Vec<DoubleSimple>,
    pub modular: ModularData,
    pub modularity: Certificate,
    pub gauss: Certificate,
    pub count: CountBound,
    pub induction: Certificate,
    pub fusion: Result<DoubleFusion>,
    pub simple_checks: Certificate,
}

/// Per-simple invariants: idempotency, centrality, Ξ_0 support,
/// multiplicities and twists.
pub fn simple_checks(tube: &TubeAlgebra, simples: &[DoubleSimple]) -> Certificate {
    let mut cert = Certificate::new();
    let tol = tube.tolerance();
    let alg = tube.algebra();
    let unitary = tube.cat().unitary;
    let (mut idem, mut cent, mut supp, mut mult, mut dim, mut tw, mut unit_tw): (f64, f64, f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for s in simples {
        idem = idem.max(linalg::max_abs_vec(&(alg.mul(&s.zvec, &s.zvec) - &s.zvec)));
        cent = cent.max(alg.centrality_residual(&s.zvec));
        supp = supp.max(linalg::max_abs_vec(&(&s.zvec - tube.diagonal_part(&s.zvec))));
        mult = mult.max(s.mult_residual);
        dim = dim.max(s.dim_residual);
        tw = tw.max(s.twist_residual);
        if unitary {
            unit_tw = unit_tw.max((s.omega.norm() - 1.0).abs());
        }
    }
    cert.push(Check::below("simples: idempotent", idem, 100.0 * tol.eps));
    cert.push(Check::below("simples: central", cent, 100.0 * tol.eps));
    cert.push(Check::below("simples: supported on diagonal", supp, 100.0 * tol.eps));
    cert.push(Check::below("simples: integral multiplicities", mult, INTEGRALITY_TOL));
    cert.push(Check::below("simples: d = sum N_i d_i", dim, 1e-8));
    cert.push(Check::below("simples: t z = z / omega", tw, tol.sqrt()));
    cert.push(Check::below("simples: |omega| = 1", unit_tw, 1e-8));
    let unit_ok = simples
        .first()
        .map(|s| linalg::max_abs_vec(&(&s.zvec - unit_idempotent(tube))) < tol.sqrt())
        .unwrap_or(false);
    cert.push(Check::flag("simples: unit object first", unit_ok));
    cert.push(Check::below("tube: unit closed form", tube.unit_lambda_residual, 1e-9));
    cert
}

pub fn analyze(cat: &FusionCategoryData, seed: u64, tol: Tolerance) -> Result<CenterAnalysis> {
    let tube = TubeAlgebra::build(cat, tol)?;
    analyze_tube(tube, seed)
}

pub fn analyze_tube(tube: TubeAlgebra, seed: u64) -> Result<CenterAnalysis> {
    let simples = double_simples(&tube, seed)?;
    let modular = s_matrix(&tube, &simples)?;
    let cat = tube.cat();
    let modularity = verify_modularity(&modular, tube.tolerance());
    let gauss = gauss_and_dimension_checks(&modular, cat);
    let count = count_bound_check(&simples, cat);
    let induction = induction_check(&simples, cat);
    let fusion = verlinde_fusion(&modular);
    let simple_checks = simple_checks(&tube, &simples);
    Ok(CenterAnalysis {
        simples,
        modular,
        modularity,
        gauss,
        count,
        induction,
        fusion,
        simple_checks,
        tube,
    })
}

impl CenterAnalysis {
    /// All certificates in one.
    pub fn certificate(&self) -> Certificate {
        let mut c = self.simple_checks.clone();
        c.extend(self.modularity.clone());
        c.extend(self.gauss.clone());
        c.extend(self.count.certificate.clone());
        c.extend(self.induction.clone());
        match &self.fusion {
            Ok(f) => c.push(Check::below("verlinde: integral", f.rounding_residual, INTEGRALITY_TOL)),
            Err(_) => c.push(Check::flag("verlinde: integral", false)),
        }
        c
    }
}
