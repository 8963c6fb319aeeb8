//! Complex scalars and the numerical tolerance used for zero tests.

pub use num_complex::Complex64 as C64;

pub const DEFAULT_EPS: f64 = 1e-9;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `e^{i theta}`
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Tolerance shared by every numerical decision (zero tests, rank cuts).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps: DEFAULT_EPS }
    }
}

impl Tolerance {
    pub fn new(eps: f64) -> Self {
        assert!(eps > 0.0, "tolerance must be positive");
        Tolerance { eps }
    }

    pub fn sqrt(&self) -> f64 {
        self.eps.sqrt()
    }

    pub fn is_zero(&self, x: C64) -> bool {
        x.norm() < self.eps
    }

    pub fn eq(&self, a: C64, b: C64) -> bool {
        (a - b).norm() < self.eps
    }
}

/// Principal square root, except that for a dimension with non-positive real
/// part the root in the closed upper half plane is taken.
pub fn branch_sqrt(z: C64) -> C64 {
    let r = z.sqrt();
    if z.re > 0.0 {
        r
    } else if r.im < 0.0 || (r.im == 0.0 && r.re < 0.0) {
        -r
    } else {
        r
    }
}

/// Distance of a real number to the nearest integer.
pub fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_sqrt_positive_real() {
        let r = branch_sqrt(re(2.0));
        assert!((r - re(2f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn branch_sqrt_negative_real_goes_up() {
        let r = branch_sqrt(re(-4.0));
        assert!((r - c64(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn tolerance_zero_test() {
        let t = Tolerance::default();
        assert!(t.is_zero(c64(1e-10, 0.0)));
        assert!(!t.is_zero(c64(1e-8, 0.0)));
    }
}
