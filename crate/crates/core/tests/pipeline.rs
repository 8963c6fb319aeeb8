use std::collections::BTreeMap;

use proptest::prelude::*;

use tubecenter::catalog;
use tubecenter::center::{analyze, match_modular, match_residual};
use tubecenter::fusion::{validate, FSymbolSet, FusionCategoryData, Label, RSymbolSet};
use tubecenter::halfbraiding::{braided_embeddings, validate_halfbraiding, z2_center};
use tubecenter::morphism::Calculus;
use tubecenter::scalar::{c64, cis, Tolerance, C64, ONE};

/// Vertex gauge `t^c_{ab} -> u(a,b,c) t^c_{ab}` of a multiplicity-free
/// category, trivial whenever a label is the unit.
fn gauge(cat: &FusionCategoryData, u: &dyn Fn(Label, Label, Label) -> C64) -> FusionCategoryData {
    let w = |a: Label, b: Label, c: Label| if a == 0 || b == 0 { ONE } else { u(a, b, c) };
    let f = FSymbolSet::from_fn(&cat.ring, |[a, b, c, d], (e, _, _), (g, _, _)| {
        cat.f.get([a, b, c, d], (e, 0, 0), (g, 0, 0)) * w(a, b, e) * w(e, c, d) / (w(b, c, g) * w(a, g, d))
    })
    .unwrap();
    let r = cat.r.as_ref().map(|rs| {
        let ent: BTreeMap<_, _> = rs
            .entries()
            .into_iter()
            .map(|((a, b, c, al, be), v)| ((a, b, c, al, be), v * w(b, a, c) / w(a, b, c)))
            .collect();
        RSymbolSet::from_entries(&cat.ring, &ent).unwrap()
    });
    FusionCategoryData {
        f,
        r,
        unitary: false,
        ..cat.clone()
    }
}

fn gauge_fn(params: Vec<(f64, f64)>, r: usize) -> impl Fn(Label, Label, Label) -> C64 {
    move |a, b, c| {
        let (m, p) = params[(a * r + b) * r + c];
        c64(m, 0.0) * cis(p)
    }
}

fn params(r: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.5f64..2.0, -3.0f64..3.0), r * r * r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn gauge_leaves_fibonacci_double_unchanged(p in params(2)) {
        let tol = Tolerance::default();
        let base = catalog::fibonacci();
        let g = gauge(&base, &gauge_fn(p, 2));
        prop_assert!(validate(&g, tol).pass());
        let a = analyze(&base, 1, tol).unwrap().modular.view();
        let b = analyze(&g, 1, tol).unwrap();
        prop_assert!(b.certificate().pass());
        let b = b.modular.view();
        let perm = match_modular(&a, &b, 1e-7).unwrap();
        prop_assert!(match_residual(&a, &b, &perm) < 1e-7);
    }

    #[test]
    fn gauge_keeps_semion_braiding_valid(p in params(2)) {
        let tol = Tolerance::default();
        let g = gauge(&catalog::semion(), &gauge_fn(p, 2));
        prop_assert!(validate(&g, tol).pass());
        let calc = Calculus::from_data(&g);
        let (plain, mirror) = braided_embeddings(&calc, tol).unwrap();
        for x in plain.iter().chain(&mirror) {
            prop_assert!(validate_halfbraiding(&calc, &x.hb, tol).pass());
        }
        prop_assert_eq!(z2_center(&calc, tol).unwrap(), vec![0]);
    }

    #[test]
    fn seed_does_not_change_vec_z3(seed in 0u64..1000) {
        let tol = Tolerance::default();
        let a = analyze(&catalog::vec_z3(), 1, tol).unwrap().modular;
        let b = analyze(&catalog::vec_z3(), seed, tol).unwrap().modular;
        prop_assert!(tubecenter::linalg::max_abs(&(&a.s - &b.s)) < 1e-9);
        for (x, y) in a.t.iter().zip(&b.t) {
            prop_assert!((x - y).norm() < 1e-9);
        }
    }
}

#[test]
fn every_bundled_category_certifies() {
    let tol = Tolerance::default();
    for cat in catalog::all() {
        assert!(validate(&cat, tol).pass(), "{}", cat.name);
        let an = analyze(&cat, 3, tol).unwrap();
        let c = an.certificate();
        assert!(c.pass(), "{}: {:?}", cat.name, c.first_failure());
        let dc = cat.dim_c();
        assert!((an.modular.dim_double - dc * dc).norm() < 1e-8 * dc.norm().max(1.0).powi(2));
    }
}

#[test]
fn yang_lee_double_has_negative_dimensions() {
    let an = analyze(&catalog::yang_lee(), 1, Tolerance::default()).unwrap();
    assert!(an.simples.iter().any(|s| s.d.re < -0.5));
    assert!(an.modularity.pass());
}
