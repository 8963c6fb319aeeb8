//! One line per acceptance criterion. Exits nonzero if any criterion fails.

use std::path::PathBuf;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tubecenter::catalog;
use tubecenter::center::{analyze, match_modular, match_residual, CenterAnalysis, ModularView};
use tubecenter::cli::{cmd_double, Common, Outcome};
use tubecenter::fusion::{validate, FusionCategoryData};
use tubecenter::group_double::{build_double, cross_check_vs_tube};
use tubecenter::halfbraiding::{
    braid_fusion_residual, braided_embeddings, braided_modular_data, conditional_expectation, mirror_product,
    tensor_halfbraiding, DoubleObjectExplicit,
};
use tubecenter::linalg::{self, Mat, Vector};
use tubecenter::morphism::Calculus;
use tubecenter::report::Report;
use tubecenter::scalar::{c64, re, Tolerance, C64, ONE};
use tubecenter::tube::TubeAlgebra;

const SEED: u64 = 1;

struct Line {
    ok: bool,
    detail: String,
}

impl Line {
    fn new() -> Self {
        Line {
            ok: true,
            detail: String::new(),
        }
    }

    fn below(&mut self, what: &str, residual: f64, tol: f64) {
        let pass = residual.is_finite() && residual < tol;
        self.note(pass, format!("{what} {residual:.2e} < {tol:.0e}"));
    }

    fn above(&mut self, what: &str, value: f64, bound: f64) {
        let pass = value.is_finite() && value > bound;
        self.note(pass, format!("{what} {value:.3e} > {bound:.3e}"));
    }

    fn check(&mut self, what: &str, pass: bool) {
        self.note(pass, what.to_string());
    }

    fn note(&mut self, pass: bool, s: String) {
        self.ok &= pass;
        if !pass {
            self.detail += "FAILED ";
        }
        self.detail += &s;
        self.detail += "; ";
    }
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn data(stem: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(format!("{stem}.json"))
}

fn common() -> Common {
    Common {
        json: None,
        tolerance: 1e-9,
        seed: SEED,
        json_stdout: false,
    }
}

fn run_double(stem: &str) -> (Report, f64) {
    let start = Instant::now();
    let out = cmd_double(&data(stem), &common());
    let secs = start.elapsed().as_secs_f64();
    match out {
        Outcome::Report(r) => (r, secs),
        Outcome::InputError(e) => panic!("{stem}: {e}"),
    }
}

fn report_view(r: &Report) -> ModularView {
    let z = |p: [f64; 2]| c64(p[0], p[1]);
    let s = r.s.as_ref().expect("S in report");
    let n = s.value.len();
    ModularView {
        dims: r.simples.iter().map(|x| z(x.d.value)).collect(),
        twists: r.simples.iter().map(|x| z(x.omega.value)).collect(),
        s: Mat::from_fn(n, n, |a, b| z(s.value[a][b])),
    }
}

fn fact(r: &Report, name: &str) -> C64 {
    let f = r.facts.iter().find(|f| f.name == name).expect("fact");
    c64(f.value.value[0], f.value.value[1])
}

/// Worst distance between two multisets after sorting by (re, im).
fn multiset_residual(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let key = |z: &C64| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64);
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by_key(key);
    b.sort_by_key(key);
    a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn criterion_1() -> Line {
    let mut l = Line::new();
    let (r, secs) = run_double("vec_z2");
    l.check("report passes", r.pass);
    let v = report_view(&r);
    l.check("4 simples", v.rank() == 4);
    l.below("dims - 1", v.dims.iter().map(|d| (d - ONE).norm()).fold(0.0, f64::max), 1e-8);
    let want = [ONE, ONE, ONE, -ONE];
    l.below("twist multiset", multiset_residual(&v.twists, &want), 1e-8);
    l.below("delta+ - 2", (fact(&r, "delta+") - re(2.0)).norm(), 1e-8);
    l.below("delta- - 2", (fact(&r, "delta-") - re(2.0)).norm(), 1e-8);
    l.below("dim Z - 4", (fact(&r, "dim Z") - re(4.0)).norm(), 1e-8);
    // toric code labels 1, e, m, f
    let pm = [[1.0, 1.0, 1.0, 1.0], [1.0, 1.0, -1.0, -1.0], [1.0, -1.0, 1.0, -1.0], [1.0, -1.0, -1.0, 1.0]];
    let literal = ModularView {
        dims: vec![ONE; 4],
        twists: want.to_vec(),
        s: Mat::from_fn(4, 4, |a, b| re(pm[a][b])),
    };
    match match_modular(&v, &literal, 1e-8) {
        Ok(p) => l.below("S vs ±1 matrix", match_residual(&v, &literal, &p), 1e-8),
        Err(_) => l.check("S vs ±1 matrix", false),
    }
    let d = build_double(&catalog::z2_group(), tol()).unwrap();
    let h = d.hopf_smatrix(SEED, tol()).unwrap();
    let oracle = ModularView {
        dims: h.dims.iter().map(|&x| re(x)).collect(),
        twists: h.twists.clone(),
        s: h.s.clone(),
    };
    match match_modular(&v, &oracle, 1e-8) {
        Ok(p) => l.below("S vs D(Z2)", match_residual(&v, &oracle, &p), 1e-8),
        Err(_) => l.check("S vs D(Z2)", false),
    }
    l.below("runtime s", secs, 1.0);
    l
}

fn criterion_2() -> Line {
    let mut l = Line::new();
    let (r, secs) = run_double("vec_s3");
    l.check("report passes", r.pass);
    let v = report_view(&r);
    l.check("8 simples", v.rank() == 8);
    let want: Vec<C64> = [1.0, 1.0, 2.0, 2.0, 2.0, 2.0, 3.0, 3.0].iter().map(|&x| re(x)).collect();
    l.below("dim multiset", multiset_residual(&v.dims, &want), 1e-7);
    let sum: C64 = v.dims.iter().map(|d| d * d).sum();
    l.below("sum d^2 - 36", (sum - re(36.0)).norm(), 1e-7);
    l.check("tube dim 36", fact(&r, "tube dim") == re(36.0));
    let (n, b) = (fact(&r, "simple count").re, fact(&r, "count bound").re);
    l.check(&format!("count {n} <= bound {b} = 18"), n == 8.0 && b == 18.0);
    l.below("runtime s", secs, 10.0);
    l
}

fn criterion_3() -> Line {
    let mut l = Line::new();
    let (r, _) = run_double("fibonacci");
    l.check("report passes", r.pass);
    let v = report_view(&r);
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let want: Vec<C64> = [1.0, phi, phi, phi * phi].iter().map(|&x| re(x)).collect();
    l.check("4 simples", v.rank() == 4);
    l.below("dim multiset", multiset_residual(&v.dims, &want), 1e-7);
    let dc = (5.0 + 5f64.sqrt()) / 2.0;
    l.below("delta+ - (5+√5)/2", (fact(&r, "delta+") - re(dc)).norm(), 1e-8);
    l.below("delta- - (5+√5)/2", (fact(&r, "delta-") - re(dc)).norm(), 1e-8);
    l.below("dim Z - ((5+√5)/2)^2", (fact(&r, "dim Z") - re(dc * dc)).norm(), 1e-7);
    let cat = catalog::fibonacci();
    let oracle = mirror_product(&braided_modular_data(&cat).unwrap());
    match match_modular(&v, &oracle, 1e-7) {
        Ok(p) => l.below("S vs S_Fib ⊗ conj(S_Fib)", match_residual(&v, &oracle, &p), 1e-7),
        Err(_) => l.check("S vs S_Fib ⊗ conj(S_Fib)", false),
    }
    // the idempotents of I(X_k) Ĩ(X_l) exhaust the unit of the tube algebra
    let an = analyze(&cat, SEED, tol()).unwrap();
    let calc = an.tube.calculus();
    let (p, m) = braided_embeddings(calc, tol()).unwrap();
    let mut sum = Vector::zeros(an.tube.dim());
    for x in &p {
        for y in &m {
            let xy = tensor_halfbraiding(calc, &x.hb, &y.hb).unwrap();
            let z = tubecenter::halfbraiding::idempotent_from_halfbraiding(&an.tube, &xy).unwrap();
            sum += an.tube.vector(&z).unwrap();
        }
    }
    l.below("Σ z(I(X_k) Ĩ(X_l)) - 1", linalg::max_abs_vec(&(sum - an.tube.unit_vector())), 1e-8);
    l
}

fn analyses() -> Vec<(FusionCategoryData, CenterAnalysis)> {
    catalog::all()
        .into_iter()
        .map(|c| {
            let a = analyze(&c, SEED, tol()).unwrap();
            (c, a)
        })
        .collect()
}

fn criterion_4(all: &[(FusionCategoryData, CenterAnalysis)]) -> Line {
    let mut l = Line::new();
    let (mut dp, mut dm, mut prod): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (c, a) in all {
        let dc = c.dim_c();
        let s = dc.norm().max(1.0);
        let md = &a.modular;
        dp = dp.max((md.delta_plus - dc).norm() / s);
        dm = dm.max((md.delta_minus - dc).norm() / s);
        prod = prod.max((md.delta_plus * md.delta_minus - md.dim_double).norm() / (s * s));
    }
    l.below("|delta+ - dim C| / scale", dp, 1e-8);
    l.below("|delta- - dim C| / scale", dm, 1e-8);
    l.below("|delta+ delta- - dim Z| / scale^2", prod, 1e-8);
    l.check(&format!("{} categories", all.len()), all.len() == catalog::all().len());
    l
}

fn criterion_5(all: &[(FusionCategoryData, CenterAnalysis)]) -> Line {
    let mut l = Line::new();
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (_, a) in all {
        let t: &TubeAlgebra = &a.tube;
        for _ in 0..50 {
            let x = t.vector(&t.random_xi0(&mut rng)).unwrap();
            let mut y = x.clone();
            for _ in 0..4 {
                y = t.s_transform_vector(&y).unwrap();
            }
            worst = worst.max(linalg::max_abs_vec(&(y - &x)) / linalg::max_abs_vec(&x).max(1.0));
        }
    }
    l.below("|𝔖⁴x - x| over 50 elements per category", worst, 1e-8);
    l
}

fn criterion_6(all: &[(FusionCategoryData, CenterAnalysis)]) -> Line {
    let mut l = Line::new();
    let mut det_margin = f64::INFINITY;
    let mut kill: f64 = 0.0;
    for (_, a) in all {
        let md = &a.modular;
        let n = md.rank();
        let scale = md.dim_double.norm().powf(n as f64 / 2.0);
        det_margin = det_margin.min(md.s.determinant().norm() / scale);
        for y in 0..n {
            let mut s: C64 = (0..n).map(|x| md.dims[x] * md.s[(x, y)]).sum();
            if y == 0 {
                s -= md.dim_double;
            }
            kill = kill.max(s.norm());
        }
        l.check(&format!("{} certificate", a.tube.cat().name), a.modularity.pass());
    }
    l.above("min |det S| / dim Z^(n/2)", det_margin, 1e-6);
    l.below("killing rows", kill, 1e-7);
    l
}

fn criterion_7() -> Line {
    let mut l = Line::new();
    for g in [catalog::z2_group(), catalog::z3_group(), catalog::s3_group()] {
        let d = build_double(&g, tol()).unwrap();
        let (fc, _) = d.fourier_checks(tol());
        let get = |n: &str| fc.get(n).map(|c| c.residual).unwrap_or(f64::INFINITY);
        let o = g.order();
        l.below(&format!("|G|={o} 𝔖₊𝔖₋ - id"), get("𝔖₊𝔖₋ = id"), 1e-9);
        l.below(&format!("|G|={o} (𝔖₊𝒯)³ - λ𝔖₊²"), get("(𝔖₊𝒯)³ = λ𝔖₊²"), 1e-9);
        l.below(&format!("|G|={o} center stability"), get("𝔖± preserve the center"), 1e-9);
        l.below(&format!("|G|={o} Kerler square"), d.kerler_residual(tol()), 1e-10);
        let h = d.hopf_smatrix(SEED, tol()).unwrap();
        let two = h.certificate.get("S from Fourier = S from R21 R12").map(|c| c.residual).unwrap_or(f64::INFINITY);
        l.below(&format!("|G|={o} two S formulas"), two, 1e-9);
    }
    l
}

fn criterion_8() -> Line {
    let mut l = Line::new();
    for (cat, g) in [
        (catalog::vec_z2(), catalog::z2_group()),
        (catalog::vec_z3(), catalog::z3_group()),
        (catalog::vec_s3(), catalog::s3_group()),
    ] {
        let d = build_double(&g, tol()).unwrap();
        let h = d.hopf_smatrix(SEED, tol()).unwrap();
        let an = analyze(&cat, SEED, tol()).unwrap();
        match cross_check_vs_tube(&d, &h, &an, 1e-7) {
            Ok((p, cert)) => {
                let res = cert.get("(d, ω, S) matched up to permutation").map(|c| c.residual).unwrap_or(f64::INFINITY);
                l.below(&format!("{} ({}↔{})", cat.name, p.len(), h.dims.len()), res, 1e-7);
            }
            Err(e) => l.check(&format!("{}: {e}", cat.name), false),
        }
    }
    l
}

fn criterion_9() -> Line {
    let mut l = Line::new();
    for cat in [catalog::semion(), catalog::fibonacci()] {
        let calc = Calculus::from_data(&cat);
        let (p, m) = braided_embeddings(&calc, tol()).unwrap();
        let k = calc.rank() - 1;
        let obj = |a: &DoubleObjectExplicit, b: &DoubleObjectExplicit| {
            DoubleObjectExplicit::new("x", tensor_halfbraiding(&calc, &a.hb, &b.hb).unwrap())
        };
        let mixed = obj(&p[k], &m[k]);
        let plain = obj(&p[k], &p[k]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (mut idem, mut trace): (f64, f64) = (0.0, 0.0);
        for n in 0..50 {
            let x = if n % 2 == 0 { &mixed } else { &plain };
            let t = calc.random(&x.hb.object(), &x.hb.object(), &mut rng);
            let e = conditional_expectation(&calc, x, x, &t).unwrap();
            let ee = conditional_expectation(&calc, x, x, &e).unwrap();
            idem = idem.max(ee.distance(&e));
            trace = trace.max((calc.trace(&e).unwrap() - calc.trace(&t).unwrap()).norm());
        }
        l.below(&format!("{} E² - E", cat.name), idem, 1e-9);
        l.below(&format!("{} tr E - tr", cat.name), trace, 1e-9);
    }
    l
}

fn criterion_10() -> Line {
    let mut l = Line::new();
    let mut survivors = 0;
    let mut tried = 0;
    for cat in catalog::all() {
        if validate(&cat, tol()).get("pentagon").map(|c| !c.pass).unwrap_or(true) {
            survivors += 1;
            continue;
        }
        for (key, v) in cat.f.entries() {
            let f = cat.f.with_entry(key, v + re(1e-3)).unwrap();
            let bad = FusionCategoryData { f, ..cat.clone() };
            tried += 1;
            if validate(&bad, tol()).get("pentagon").map(|c| c.pass).unwrap_or(true) {
                survivors += 1;
            }
        }
    }
    l.check(&format!("{tried} single F-entry perturbations of 1e-3, {survivors} pass the pentagon"), survivors == 0 && tried > 0);
    let mut hb_survivors = 0;
    let mut hb_tried = 0;
    for cat in [catalog::semion(), catalog::fibonacci()] {
        let calc = Calculus::from_data(&cat);
        let (p, m) = braided_embeddings(&calc, tol()).unwrap();
        for x in p.iter().chain(&m) {
            for j in 0..calc.rank() {
                let bad = x.hb.scaled(j, re(1.0 + 1e-3));
                let scale = bad.e.iter().map(|e| e.max_abs()).fold(1.0, f64::max);
                hb_tried += 1;
                if braid_fusion_residual(&calc, &bad).unwrap() < tol().eps * scale * scale {
                    hb_survivors += 1;
                }
            }
        }
    }
    l.check(&format!("{hb_tried} scaled half-braidings, {hb_survivors} satisfy the braid-fusion relation"), hb_survivors == 0);
    l
}

fn criterion_11() -> Line {
    let mut l = Line::new();
    let a = analyze(&catalog::fibonacci(), SEED, tol()).unwrap().modular.view();
    let b = analyze(&catalog::fibonacci_gauged(), SEED, tol()).unwrap().modular.view();
    l.below("dim multisets", multiset_residual(&a.dims, &b.dims), 1e-7);
    l.below("twist multisets", multiset_residual(&a.twists, &b.twists), 1e-7);
    match match_modular(&a, &b, 1e-7) {
        Ok(p) => l.below("S up to permutation", match_residual(&a, &b, &p), 1e-7),
        Err(_) => l.check("S up to permutation", false),
    }
    l
}

fn main() {
    let all = analyses();
    let lines: Vec<(usize, &str, Line)> = vec![
        (1, "Vec_Z2 double", criterion_1()),
        (2, "Vec_S3 double", criterion_2()),
        (3, "Fibonacci double is C ⊠ C^rev", criterion_3()),
        (4, "Gauss sums", criterion_4(&all)),
        (5, "𝔖 has order four on Ξ₀", criterion_5(&all)),
        (6, "modularity", criterion_6(&all)),
        (7, "Hopf suite", criterion_7()),
        (8, "tube vs D(G)", criterion_8()),
        (9, "conditional expectation", criterion_9()),
        (10, "mutations", criterion_10()),
        (11, "gauge robustness", criterion_11()),
    ];
    let mut failed = 0;
    for (n, name, l) in &lines {
        println!("criterion {n:>2} {}: {name}: {}", if l.ok { "PASS" } else { "FAIL" }, l.detail.trim_end_matches("; "));
        if !l.ok {
            failed += 1;
        }
    }
    println!("{} of {} criteria pass", lines.len() - failed, lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
