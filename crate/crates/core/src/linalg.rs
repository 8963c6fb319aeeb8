//! Dense complex linear algebra on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{C64, ZERO};

pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

/// Singular values of `m`, padded with zero rows so that there are as many
/// values as columns, together with the right singular vectors (as rows).
fn padded_svd(m: &Mat) -> (Vec<f64>, Mat) {
    let (r, c) = m.shape();
    let a = if r < c {
        let mut p = Mat::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    (svd.singular_values.iter().copied().collect(), vt)
}

/// Orthonormal basis (as columns) of the null space of `m`, cutting singular
/// values below `rel * sigma_max`.
pub fn kernel(m: &Mat, rel: f64) -> Mat {
    kernel_with_floor(m, rel, 0.0)
}

/// Kernel with the cut `rel * max(σ_max, floor)`.
pub fn kernel_with_floor(m: &Mat, rel: f64, floor: f64) -> Mat {
    let c = m.ncols();
    if c == 0 {
        return Mat::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return Mat::identity(c, c);
    }
    let (sv, vt) = padded_svd(m);
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let cut = rel * smax.max(floor).max(f64::MIN_POSITIVE);
    let cols: Vec<Vector> = sv
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= cut || smax == 0.0)
        .map(|(k, _)| vt.row(k).transpose().map(|z| z.conj()))
        .collect();
    if cols.is_empty() {
        Mat::zeros(c, 0)
    } else {
        Mat::from_columns(&cols)
    }
}

/// Numerical rank with relative threshold.
pub fn rank(m: &Mat, rel: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let smax = sv.max();
    sv.iter().filter(|s| **s > rel * smax && **s > 0.0).count()
}

/// Largest and smallest singular values.
pub fn singular_range(m: &Mat) -> (f64, f64) {
    if m.is_empty() {
        return (0.0, 0.0);
    }
    let sv = m.singular_values();
    (sv.max(), sv.min())
}

/// Least-squares solution of `a x = b` and the residual norm `|a x - b|`.
pub fn lstsq(a: &Mat, b: &Vector, rel: f64) -> (Vector, f64) {
    if a.ncols() == 0 {
        return (Vector::zeros(0), b.norm());
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let x = svd
        .solve(b, rel * smax.max(f64::MIN_POSITIVE))
        .unwrap_or_else(|_| Vector::zeros(a.ncols()));
    let res = (a * &x - b).norm();
    (x, res)
}

pub fn inverse(m: &Mat) -> Result<Mat> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "cannot invert a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.is_empty() {
        return Ok(m.clone());
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::ShapeMismatch("singular matrix".into()))
}

/// Eigenvalues of a square complex matrix (complex Schur form).
pub fn eigenvalues(m: &Mat) -> Vec<C64> {
    if m.is_empty() {
        return Vec::new();
    }
    let schur = nalgebra::linalg::Schur::new(m.clone());
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|k| t[(k, k)]).collect()
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_vec(v: &Vector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace(m: &Mat) -> C64 {
    let mut t = ZERO;
    for k in 0..m.nrows().min(m.ncols()) {
        t += m[(k, k)];
    }
    t
}

/// Hermitian inner product `<a, b> = sum conj(a_k) b_k`.
pub fn dot(a: &Vector, b: &Vector) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Kronecker product.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c64, re};

    #[test]
    fn kernel_of_rank_one() {
        let m = Mat::from_row_slice(1, 3, &[re(1.0), re(1.0), re(0.0)]);
        let k = kernel(&m, 1e-12);
        assert_eq!(k.ncols(), 2);
        assert!(max_abs(&(&m * &k)) < 1e-14);
    }

    #[test]
    fn kernel_of_invertible_is_empty() {
        let m = Mat::from_row_slice(2, 2, &[re(1.0), c64(0.0, 1.0), re(0.0), re(2.0)]);
        assert_eq!(kernel(&m, 1e-12).ncols(), 0);
    }

    #[test]
    fn eigenvalues_of_triangular() {
        let m = Mat::from_row_slice(2, 2, &[re(2.0), re(5.0), re(0.0), c64(0.0, 1.0)]);
        let mut ev = eigenvalues(&m);
        ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((ev[0] - c64(0.0, 1.0)).norm() < 1e-12);
        assert!((ev[1] - re(2.0)).norm() < 1e-12);
    }

    #[test]
    fn lstsq_consistent_system() {
        let a = Mat::from_row_slice(3, 1, &[re(1.0), re(2.0), re(3.0)]);
        let b = Vector::from_vec(vec![re(2.0), re(4.0), re(6.0)]);
        let (x, r) = lstsq(&a, &b, 1e-12);
        assert!((x[0] - re(2.0)).norm() < 1e-12);
        assert!(r < 1e-12);
    }
}
