//! Finite-dimensional associative algebras over the complex numbers given by
//! structure constants: validation, centers, and splitting of commutative
//! semisimple algebras into minimal idempotents.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};
use crate::scalar::{re, Tolerance, C64, ONE, ZERO};

/// Maximum number of random generic elements tried by [`minimal_idempotents`].
pub const SPLIT_ATTEMPTS: usize = 8;

/// Structure constant entry `e_a e_b = ... + v e_c + ...`.
pub type Constant = (usize, usize, usize, C64);

#[derive(Debug, Clone)]
pub struct AssocAlgebra {
    dim: usize,
    /// `left[a]` is the matrix of `x -> e_a x`; column `b` holds `e_a e_b`.
    left: Vec<Mat>,
    unit: Vector,
}

/// `tr(e_a)` for every basis element.
#[derive(Debug, Clone)]
pub struct TraceForm {
    pub values: Vector,
}

impl AssocAlgebra {
    /// Builds and validates an algebra. Repeated `(a,b,c)` keys accumulate.
    pub fn from_constants(
        dim: usize,
        constants: &[Constant],
        unit: Option<Vector>,
        tol: Tolerance,
    ) -> Result<Self> {
        let mut left = vec![Mat::zeros(dim, dim); dim];
        for &(a, b, c, v) in constants {
            if a >= dim || b >= dim || c >= dim {
                return Err(Error::ShapeMismatch(format!(
                    "structure constant index ({a},{b},{c}) outside dimension {dim}"
                )));
            }
            left[a][(c, b)] += v;
        }
        Self::from_left_matrices(left, unit, tol)
    }

    /// Builds an algebra from the left multiplication matrices of the basis.
    pub fn from_left_matrices(left: Vec<Mat>, unit: Option<Vector>, tol: Tolerance) -> Result<Self> {
        let dim = left.len();
        for l in &left {
            if l.shape() != (dim, dim) {
                return Err(Error::ShapeMismatch("left multiplication matrix".into()));
            }
        }
        let mut alg = AssocAlgebra {
            dim,
            left,
            unit: Vector::zeros(dim),
        };
        let scale = alg.constant_scale();
        let assoc = alg.associativity_residual();
        if assoc >= tol.eps * scale.max(1.0) * scale.max(1.0) {
            return Err(Error::NotAssociative { residual: assoc });
        }
        let unit = match unit {
            Some(u) => {
                if u.len() != dim {
                    return Err(Error::ShapeMismatch("unit vector length".into()));
                }
                u
            }
            None => alg.solve_unit(tol)?,
        };
        let res = alg.unit_residual(&unit);
        if res >= tol.eps.sqrt() * scale.max(1.0) {
            return Err(Error::NoUnit { residual: res });
        }
        alg.unit = unit;
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    pub fn basis(&self, a: usize) -> Vector {
        let mut v = Vector::zeros(self.dim);
        v[a] = ONE;
        v
    }

    /// Coefficient of `e_c` in `e_a e_b`.
    pub fn constant(&self, a: usize, b: usize, c: usize) -> C64 {
        self.left[a][(c, b)]
    }

    /// All nonzero structure constants.
    pub fn constants(&self) -> Vec<Constant> {
        let mut out = Vec::new();
        for a in 0..self.dim {
            for b in 0..self.dim {
                for c in 0..self.dim {
                    let v = self.left[a][(c, b)];
                    if v != ZERO {
                        out.push((a, b, c, v));
                    }
                }
            }
        }
        out
    }

    fn constant_scale(&self) -> f64 {
        self.left.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    /// Matrix of `y -> x y`.
    pub fn left_matrix(&self, x: &Vector) -> Mat {
        let mut m = Mat::zeros(self.dim, self.dim);
        for (a, xa) in x.iter().enumerate() {
            if *xa != ZERO {
                m += &self.left[a] * *xa;
            }
        }
        m
    }

    /// Matrix of `y -> y x`.
    pub fn right_matrix(&self, x: &Vector) -> Mat {
        let mut m = Mat::zeros(self.dim, self.dim);
        for b in 0..self.dim {
            let col = self.left[b].clone() * x;
            m.set_column(b, &col);
        }
        m
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim);
        for (a, xa) in x.iter().enumerate() {
            if *xa != ZERO {
                out += (&self.left[a] * y) * *xa;
            }
        }
        out
    }

    /// `max |(e_a e_b) e_c - e_a (e_b e_c)|` over all basis triples.
    pub fn associativity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.dim {
            for b in 0..self.dim {
                let ab = self.left[a].column(b).into_owned();
                let l_ab = self.left_matrix(&ab);
                let lhs = l_ab;
                let rhs = &self.left[a] * &self.left[b];
                worst = worst.max(linalg::max_abs(&(lhs - rhs)));
            }
        }
        worst
    }

    fn unit_residual(&self, u: &Vector) -> f64 {
        let lu = self.left_matrix(u);
        let ru = self.right_matrix(u);
        let id = Mat::identity(self.dim, self.dim);
        linalg::max_abs(&(lu - &id)).max(linalg::max_abs(&(ru - id)))
    }

    fn solve_unit(&self, tol: Tolerance) -> Result<Vector> {
        // u e_a = e_a and e_a u = e_a for every a, linear in u.
        let n = self.dim;
        if n == 0 {
            return Ok(Vector::zeros(0));
        }
        let mut a = Mat::zeros(2 * n * n, n);
        let mut rhs = Vector::zeros(2 * n * n);
        for k in 0..n {
            for b in 0..n {
                // column b of the system: (e_b e_k) and (e_k e_b)
                let left_prod = self.left[b].column(k);
                let right_prod = self.left[k].column(b);
                for c in 0..n {
                    a[(k * n + c, b)] = left_prod[c];
                    a[(n * n + k * n + c, b)] = right_prod[c];
                }
            }
            rhs[k * n + k] = ONE;
            rhs[n * n + k * n + k] = ONE;
        }
        let (u, res) = linalg::lstsq(&a, &rhs, tol.eps);
        if res > tol.eps.sqrt() {
            return Err(Error::NoUnit { residual: res });
        }
        Ok(u)
    }

    /// Trace of the left regular representation.
    pub fn regular_trace(&self) -> TraceForm {
        TraceForm {
            values: Vector::from_iterator(self.dim, self.left.iter().map(linalg::trace)),
        }
    }

    pub fn is_commutative(&self, tol: Tolerance) -> bool {
        self.commutator_residual() < tol.eps
    }

    fn commutator_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.dim {
            for b in 0..self.dim {
                let d = self.left[a].column(b) - self.left[b].column(a);
                worst = worst.max(d.iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// Residual of `z e_a = e_a z` for every basis element.
    pub fn centrality_residual(&self, z: &Vector) -> f64 {
        let lz = self.left_matrix(z);
        let rz = self.right_matrix(z);
        linalg::max_abs(&(lz - rz))
    }

    /// The subalgebra spanned by the columns of `basis`, expressed in that
    /// basis. The columns must span a subalgebra containing the unit.
    pub fn subalgebra(&self, basis: &Mat, tol: Tolerance) -> Result<AssocAlgebra> {
        let r = basis.ncols();
        let mut left = vec![Mat::zeros(r, r); r];
        let mut worst: f64 = 0.0;
        let svd = basis.clone().svd(true, true);
        let smax = svd.singular_values.max();
        for p in 0..r {
            let bp = basis.column(p).into_owned();
            let lp = self.left_matrix(&bp);
            for q in 0..r {
                let prod = &lp * basis.column(q);
                let x = svd
                    .solve(&prod, tol.eps * smax)
                    .map_err(|e| Error::ShapeMismatch(e.to_string()))?;
                worst = worst.max((basis * &x - prod).norm());
                left[p].set_column(q, &x);
            }
        }
        if worst > tol.eps.sqrt() {
            return Err(Error::ShapeMismatch(format!(
                "columns do not span a subalgebra (residual {worst:.3e})"
            )));
        }
        let unit = svd
            .solve(&self.unit, tol.eps * smax)
            .map_err(|e| Error::ShapeMismatch(e.to_string()))?;
        AssocAlgebra::from_left_matrices(left, Some(unit), tol)
    }
}

impl TraceForm {
    pub fn eval(&self, x: &Vector) -> C64 {
        self.values.iter().zip(x.iter()).map(|(t, a)| t * a).sum()
    }

    /// `max |tr(e_a e_b) - tr(e_b e_a)|`.
    pub fn symmetry_residual(&self, alg: &AssocAlgebra) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..alg.dim() {
            for b in 0..alg.dim() {
                let ab = self.eval(&alg.left[a].column(b).into_owned());
                let ba = self.eval(&alg.left[b].column(a).into_owned());
                worst = worst.max((ab - ba).norm());
            }
        }
        worst
    }
}

/// Basis (as columns) of the center `{z : z e_a = e_a z for all a}`.
pub fn center_basis(alg: &AssocAlgebra, tol: Tolerance) -> Mat {
    let n = alg.dim();
    let mut m = Mat::zeros(n * n, n);
    for a in 0..n {
        // z e_a - e_a z as a linear function of z
        for b in 0..n {
            let zb = alg.left[b].column(a);
            for c in 0..n {
                m[(a * n + c, b)] = zb[c] - alg.left[a][(c, b)];
            }
        }
    }
    linalg::kernel(&m, tol.eps)
}

/// Splits a commutative semisimple algebra into its minimal idempotents.
///
/// A random real combination of the basis is diagonalised in the regular
/// representation; eigenvalues are clustered and the spectral projectors are
/// formed by Lagrange interpolation. Each attempt uses the seed `seed + k`.
pub fn minimal_idempotents(alg: &AssocAlgebra, seed: u64, tol: Tolerance) -> Result<Vec<Vector>> {
    let n = alg.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    if !alg.is_commutative(Tolerance::new(tol.eps.sqrt())) {
        return Err(Error::SplitFailed {
            attempts: 0,
            residual: alg.commutator_residual(),
        });
    }
    let bound = split_bound(tol);
    let mut best = f64::INFINITY;
    for attempt in 0..SPLIT_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let x = Vector::from_iterator(n, (0..n).map(|_| re(rng.gen_range(-1.0..1.0))));
        let lx = alg.left_matrix(&x);
        let ev = linalg::eigenvalues(&lx);
        let scale = ev.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let centers = cluster(&ev, tol.eps.sqrt() * scale);
        if centers.len() != n {
            continue;
        }
        let mut idem = Vec::with_capacity(n);
        for (i, li) in centers.iter().enumerate() {
            let mut p = alg.unit.clone();
            for (j, lj) in centers.iter().enumerate() {
                if i != j {
                    let shifted = &lx * &p - &p * *lj;
                    p = shifted / (*li - *lj);
                }
            }
            // p -> 3p^2 - 2p^3 converges quadratically to the nearby idempotent
            for _ in 0..3 {
                let p2 = alg.mul(&p, &p);
                let p3 = alg.mul(&p2, &p);
                p = p2 * re(3.0) - p3 * re(2.0);
            }
            idem.push(p);
        }
        let res = idempotent_residual(alg, &idem);
        best = best.min(res);
        if res < bound {
            return Ok(idem);
        }
    }
    Err(Error::SplitFailed {
        attempts: SPLIT_ATTEMPTS,
        residual: best,
    })
}

/// Minimal idempotents of the center of `alg`, as vectors in `alg`.
pub fn central_idempotents(alg: &AssocAlgebra, seed: u64, tol: Tolerance) -> Result<Vec<Vector>> {
    let basis = center_basis(alg, tol);
    let center = alg.subalgebra(&basis, tol)?;
    let idem = minimal_idempotents(&center, seed, tol)?;
    let out: Vec<Vector> = idem.iter().map(|e| &basis * e).collect();
    let res = idempotent_residual(alg, &out);
    if res >= split_bound(tol) {
        return Err(Error::SplitFailed {
            attempts: SPLIT_ATTEMPTS,
            residual: res,
        });
    }
    Ok(out)
}

fn split_bound(tol: Tolerance) -> f64 {
    // Accepts idempotent residuals up to 100 eps.
    100.0 * tol.eps
}

/// `max(|e_i e_j - delta_ij e_i|, |sum e_i - 1|)`.
pub fn idempotent_residual(alg: &AssocAlgebra, idem: &[Vector]) -> f64 {
    let mut worst: f64 = 0.0;
    let mut sum = Vector::zeros(alg.dim());
    for (i, ei) in idem.iter().enumerate() {
        sum += ei;
        for (j, ej) in idem.iter().enumerate() {
            let mut p = alg.mul(ei, ej);
            if i == j {
                p -= ei;
            }
            worst = worst.max(linalg::max_abs_vec(&p));
        }
    }
    worst.max(linalg::max_abs_vec(&(sum - &alg.unit)))
}

fn cluster(values: &[C64], radius: f64) -> Vec<C64> {
    let mut groups: Vec<(C64, usize)> = Vec::new();
    for v in values {
        if let Some(g) = groups.iter_mut().find(|g| (g.0 / g.1 as f64 - v).norm() < radius) {
            g.0 += v;
            g.1 += 1;
        } else {
            groups.push((*v, 1));
        }
    }
    groups.into_iter().map(|(s, k)| s / k as f64).collect()
}
