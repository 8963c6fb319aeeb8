//! Bundled categories.

use std::collections::BTreeMap;

use crate::fusion::{
    FKey, FSymbolSet, FusionCategoryData, FusionRing, Label, RSymbolSet, SphericalData,
};
use crate::group_double::GroupSpec;
use crate::scalar::{c64, cis, re, C64, ONE};

fn golden() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

fn ring_from(labels: &[&str], dual: Vec<Label>, rules: &[(Label, Label, Label)]) -> FusionRing {
    let r = labels.len();
    let mut n = vec![0; r * r * r];
    for &(a, b, c) in rules {
        n[(a * r + b) * r + c] += 1;
    }
    FusionRing::new(labels.iter().map(|s| s.to_string()).collect(), dual, n).expect("bundled ring")
}

/// R-entries with `R^{0a}_a = R^{a0}_a = 1` added.
fn with_unit_r(ring: &FusionRing, mut ent: BTreeMap<(Label, Label, Label, usize, usize), C64>) -> RSymbolSet {
    for a in 0..ring.rank() {
        ent.entry((0, a, a, 0, 0)).or_insert(ONE);
        ent.entry((a, 0, a, 0, 0)).or_insert(ONE);
    }
    RSymbolSet::from_entries(ring, &ent).expect("bundled R-symbols")
}

pub fn trivial() -> FusionCategoryData {
    vec_group("Vec", &GroupSpec::trivial(), None)
}

/// `Vec_G` with trivial associator; `braided = Some(())` adds the symmetric
/// braiding (only meaningful for abelian `G`).
pub fn vec_group(name: &str, g: &GroupSpec, braided: Option<()>) -> FusionCategoryData {
    let (g, _) = g.identity_first();
    let n = g.order();
    let labels: Vec<String> = (0..n).map(|k| g.name(k).to_string()).collect();
    let dual = (0..n).map(|k| g.inv(k)).collect();
    let mut nn = vec![0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            nn[(a * n + b) * n + g.mul(a, b)] = 1;
        }
    }
    let ring = FusionRing::new(labels, dual, nn).expect("group ring");
    let f = FSymbolSet::from_fn(&ring, |_, _, _| ONE).expect("trivial associator");
    let r = braided.map(|_| {
        let mut ent = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                ent.insert((a, b, g.mul(a, b), 0, 0), ONE);
            }
        }
        with_unit_r(&ring, ent)
    });
    FusionCategoryData {
        name: name.to_string(),
        ring,
        f,
        spherical: SphericalData::new(vec![ONE; n], None),
        r,
        unitary: true,
    }
}

pub fn z2_group() -> GroupSpec {
    GroupSpec::cyclic(2)
}

pub fn z3_group() -> GroupSpec {
    GroupSpec::cyclic(3)
}

pub fn s3_group() -> GroupSpec {
    GroupSpec::symmetric(3)
}

pub fn vec_z2() -> FusionCategoryData {
    vec_group("Vec_Z2", &z2_group(), None)
}

pub fn vec_z3() -> FusionCategoryData {
    vec_group("Vec_Z3", &z3_group(), None)
}

pub fn vec_s3() -> FusionCategoryData {
    vec_group("Vec_S3", &s3_group(), None)
}

/// `Vec_Z2` with the symmetric braiding `R = 1`.
pub fn vec_z2_symmetric() -> FusionCategoryData {
    vec_group("Vec_Z2_sym", &z2_group(), Some(()))
}

fn fib_ring() -> FusionRing {
    ring_from(&["1", "tau"], vec![0, 1], &[(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, 1)])
}

fn fib_like(name: &str, dtau: f64, block: [[C64; 2]; 2], r: Option<(C64, C64)>, unitary: bool) -> FusionCategoryData {
    let ring = fib_ring();
    let mut ent: BTreeMap<FKey, C64> = BTreeMap::new();
    let ch = [(0, 0, 0), (1, 0, 0)];
    for (i, &l) in ch.iter().enumerate() {
        for (j, &rr) in ch.iter().enumerate() {
            ent.insert(([1, 1, 1, 1], l, rr), block[i][j]);
        }
    }
    ent.insert(([1, 1, 1, 0], (1, 0, 0), (1, 0, 0)), ONE);
    let f = FSymbolSet::from_entries(&ring, &ent).expect("fibonacci F");
    let r = r.map(|(r1, rt)| {
        let mut e = BTreeMap::new();
        e.insert((1, 1, 0, 0, 0), r1);
        e.insert((1, 1, 1, 0, 0), rt);
        with_unit_r(&ring, e)
    });
    FusionCategoryData {
        name: name.to_string(),
        ring,
        f,
        spherical: SphericalData::new(vec![ONE, re(dtau)], None),
        r,
        unitary,
    }
}

/// Fibonacci with its unitary F-matrix and the braiding
/// `R^{ττ}_1 = e^{-4πi/5}`, `R^{ττ}_τ = e^{3πi/5}`.
pub fn fibonacci() -> FusionCategoryData {
    let p = golden();
    let a = re(1.0 / p);
    let b = re(1.0 / p.sqrt());
    let pi = std::f64::consts::PI;
    fib_like(
        "Fibonacci",
        p,
        [[a, b], [b, -a]],
        Some((cis(-4.0 * pi / 5.0), cis(3.0 * pi / 5.0))),
        true,
    )
}

/// Fibonacci after the vertex gauge `t^τ_{ττ} -> g t^τ_{ττ}` with a
/// non-unitary `g`.
pub fn fibonacci_gauged() -> FusionCategoryData {
    let g = c64(1.3, 0.0) * cis(0.4);
    let base = fibonacci();
    let u = |a: Label, b: Label, c: Label| if (a, b, c) == (1, 1, 1) { g } else { ONE };
    let f = FSymbolSet::from_fn(&base.ring, |[a, b, c, d], (e, _, _), (ff, _, _)| {
        base.f.get([a, b, c, d], (e, 0, 0), (ff, 0, 0)) * u(a, b, e) * u(e, c, d) / (u(b, c, ff) * u(a, ff, d))
    })
    .expect("gauged F");
    FusionCategoryData {
        name: "Fibonacci_gauged".into(),
        f,
        unitary: false,
        ..base
    }
}

/// The Galois conjugate of Fibonacci, `d_τ = -1/φ`.
pub fn yang_lee() -> FusionCategoryData {
    let p = golden();
    let a = re(-p);
    let b = c64(0.0, p.sqrt());
    fib_like("Yang-Lee", -1.0 / p, [[a, b], [b, -a]], None, false)
}

/// Semion: `Z2` fusion with `F^{sss}_s = -1`, `R^{ss}_1 = i`.
pub fn semion() -> FusionCategoryData {
    let ring = ring_from(&["1", "s"], vec![0, 1], &[(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]);
    let mut ent: BTreeMap<FKey, C64> = BTreeMap::new();
    ent.insert(([1, 1, 1, 1], (0, 0, 0), (0, 0, 0)), -ONE);
    let f = FSymbolSet::from_entries(&ring, &ent).expect("semion F");
    let mut e = BTreeMap::new();
    e.insert((1, 1, 0, 0, 0), c64(0.0, 1.0));
    let r = with_unit_r(&ring, e);
    FusionCategoryData {
        name: "Semion".into(),
        ring,
        f,
        spherical: SphericalData::new(vec![ONE, ONE], None),
        r: Some(r),
        unitary: true,
    }
}

/// Every bundled category.
pub fn all() -> Vec<FusionCategoryData> {
    vec![
        trivial(),
        vec_z2(),
        vec_z3(),
        vec_s3(),
        vec_z2_symmetric(),
        fibonacci(),
        fibonacci_gauged(),
        semion(),
        yang_lee(),
    ]
}

/// Looks a bundled category up by file stem.
pub fn by_name(name: &str) -> Option<FusionCategoryData> {
    all().into_iter().find(|c| file_stem(c) == name)
}

/// Name used for the data files.
pub fn file_stem(cat: &FusionCategoryData) -> String {
    cat.name.to_lowercase().replace('-', "_")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::{category_to_json, parse_category};
    use crate::linalg::{self, Mat};

    #[test]
    fn yang_lee_block_squares_to_one() {
        let c = yang_lee();
        let b = &c.f.block(1, 1, 1, 1).unwrap().mat;
        assert!(linalg::max_abs(&(b * b - Mat::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn fibonacci_block_is_involution() {
        let c = fibonacci();
        let b = &c.f.block(1, 1, 1, 1).unwrap().mat;
        assert!(linalg::max_abs(&(b * b - Mat::identity(2, 2))) < 1e-12);
        assert!((b[(0, 0)].re - 0.6180339887).abs() < 1e-9);
    }

    #[test]
    fn gauged_fibonacci_differs_but_keeps_loops() {
        let a = fibonacci();
        let b = fibonacci_gauged();
        let fa = &a.f.block(1, 1, 1, 1).unwrap().mat;
        let fb = &b.f.block(1, 1, 1, 1).unwrap().mat;
        assert!(linalg::max_abs(&(fa - fb)) > 0.1);
        assert!((a.f_loop(1) - b.f_loop(1)).norm() < 1e-14);
    }

    #[test]
    fn data_files_match_builders() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
        for cat in all() {
            let path = dir.join(format!("{}.json", file_stem(&cat)));
            let text = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
            let parsed = parse_category(&text).unwrap();
            let a: serde_json::Value = serde_json::from_str(&category_to_json(&parsed)).unwrap();
            let b: serde_json::Value = serde_json::from_str(&category_to_json(&cat)).unwrap();
            assert!(json_close(&a, &b, 1e-14), "{}", cat.name);
        }
    }

    fn json_close(a: &serde_json::Value, b: &serde_json::Value, tol: f64) -> bool {
        use serde_json::Value;
        match (a, b) {
            (Value::Number(x), Value::Number(y)) => (x.as_f64().unwrap() - y.as_f64().unwrap()).abs() <= tol,
            (Value::Array(x), Value::Array(y)) => x.len() == y.len() && x.iter().zip(y).all(|(u, v)| json_close(u, v, tol)),
            (Value::Object(x), Value::Object(y)) => {
                x.len() == y.len() && x.iter().all(|(k, u)| y.get(k).is_some_and(|v| json_close(u, v, tol)))
            }
            _ => a == b,
        }
    }

    #[test]
    fn names_are_unique() {
        let mut names: Vec<String> = all().iter().map(file_stem).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), all().len());
        assert!(by_name("fibonacci").is_some());
    }
}
