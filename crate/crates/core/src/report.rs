//! Certificates and the machine-readable report.

use serde::Serialize;

use crate::center::CenterAnalysis;
use crate::group_double::HopfModularData;
use crate::linalg::Mat;
use crate::scalar::C64;

pub const SCHEMA_VERSION: &str = "1";

/// One numerical check: the residual that was measured and the bound it was
/// held to.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// Passes iff `residual < threshold` (and the residual is finite).
    pub fn below(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            residual,
            threshold,
            pass: residual.is_finite() && residual < threshold,
        }
    }

    /// Passes iff `value > threshold`; the value is stored as the residual.
    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            residual: value,
            threshold,
            pass: value.is_finite() && value > threshold,
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        Check {
            name: name.into(),
            residual: if pass { 0.0 } else { 1.0 },
            threshold: 0.5,
            pass,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct Certificate {
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: Certificate) {
        self.checks.extend(other.checks);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}


/// A reported value with the check that produced it.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Tagged<T> {
    pub value: T,
    pub check: String,
    pub residual: f64,
}

impl<T> Tagged<T> {
    pub fn new(value: T, check: &Check) -> Self {
        Tagged {
            value,
            check: check.name.clone(),
            residual: check.residual,
        }
    }

    fn with(value: T, check: impl Into<String>, residual: f64) -> Self {
        Tagged {
            value,
            check: check.into(),
            residual,
        }
    }
}

pub type Complex = [f64; 2];

fn cx(z: C64) -> Complex {
    [z.re + 0.0, z.im + 0.0]
}

fn matrix(m: &Mat) -> Vec<Vec<Complex>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| cx(m[(r, c)])).collect()).collect()
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Input {
    pub kind: String,
    pub name: String,
    pub source: String,
    pub rank: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Section {
    pub name: String,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SimpleRow {
    pub index: usize,
    pub d: Tagged<Complex>,
    pub omega: Tagged<Complex>,
    /// Multiplicities of the input simples (tube side) or the class
    /// representative (group side).
    pub mult: Tagged<Vec<usize>>,
    pub dual: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Fact {
    pub name: String,
    pub value: Tagged<Complex>,
}

/// Everything a command produced. Timings are kept out of the serialized
/// form so that reports are reproducible byte for byte.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub schema_version: String,
    pub command: String,
    pub input: Input,
    pub tolerance: f64,
    pub seed: Option<u64>,
    pub sections: Vec<Section>,
    pub simples: Vec<SimpleRow>,
    pub s: Option<Tagged<Vec<Vec<Complex>>>>,
    pub s_normalized: Option<Tagged<Vec<Vec<Complex>>>>,
    pub t: Option<Tagged<Vec<Complex>>>,
    pub facts: Vec<Fact>,
    pub matching: Option<Vec<usize>>,
    pub pass: bool,
    pub first_failure: Option<String>,
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

fn find<'a>(cert: &'a Certificate, name: &str) -> Check {
    cert.get(name).cloned().unwrap_or_else(|| Check::flag(name, false))
}

impl Report {
    pub fn new(command: &str, input: Input, tolerance: f64, seed: Option<u64>) -> Self {
        Report {
            schema_version: SCHEMA_VERSION.into(),
            command: command.into(),
            input,
            tolerance,
            seed,
            sections: Vec::new(),
            simples: Vec::new(),
            s: None,
            s_normalized: None,
            t: None,
            facts: Vec::new(),
            matching: None,
            pass: true,
            first_failure: None,
            timings: Vec::new(),
        }
    }

    pub fn add_section(&mut self, name: &str, certificate: Certificate) {
        if certificate.checks.is_empty() {
            return;
        }
        if let (true, Some(f)) = (self.first_failure.is_none(), certificate.first_failure()) {
            self.first_failure = Some(f.name.clone());
        }
        self.pass &= certificate.pass();
        self.sections.push(Section {
            name: name.into(),
            certificate,
        });
    }

    /// Records a failure that is not a numerical check.
    pub fn fail(&mut self, name: &str, message: &str) {
        let mut c = Certificate::new();
        c.push(Check::flag(message, false));
        self.add_section(name, c);
    }

    pub fn add_fact(&mut self, name: &str, value: C64, check: &Check) {
        self.facts.push(Fact {
            name: name.into(),
            value: Tagged::new(cx(value), check),
        });
    }

    pub fn time(&mut self, what: &str, seconds: f64) {
        self.timings.push((what.into(), seconds));
    }

    /// Simples, S, T and Gauss sums of the tube pipeline.
    pub fn add_center(&mut self, an: &CenterAnalysis) {
        let sc = &an.simple_checks;
        let md = &an.modular;
        for (x, s) in an.simples.iter().enumerate() {
            self.simples.push(SimpleRow {
                index: x,
                d: Tagged::with(cx(s.d), "simples: d = sum N_i d_i", s.dim_residual),
                omega: Tagged::with(cx(s.omega), "simples: t z = z / omega", s.twist_residual),
                mult: Tagged::with(s.mult.clone(), "simples: integral multiplicities", s.mult_residual),
                dual: md.conjugation[x],
            });
        }
        let prop = "S proportionality z_Y 𝔖(z_X) = c z_Y";
        self.s = Some(Tagged::with(matrix(&md.s), prop, md.proportionality_residual));
        self.s_normalized = Some(Tagged::new(
            matrix(&md.s_normalized()),
            &find(&an.modularity, "modularity: normalized S has order four"),
        ));
        self.t = Some(Tagged::new(md.t.iter().map(|&w| cx(w)).collect(), &find(sc, "simples: t z = z / omega")));
        let g = &an.gauss;
        self.add_fact("delta+", md.delta_plus, &find(g, "gauss: delta+ = dim C"));
        self.add_fact("delta-", md.delta_minus, &find(g, "gauss: delta- = dim C"));
        self.add_fact("dim C", an.tube.cat().dim_c(), &find(g, "gauss: delta+ = dim C"));
        self.add_fact("dim Z", md.dim_double, &find(g, "gauss: dim Z = (dim C)^2"));
        self.add_fact("tube dim", C64::new(an.tube.dim() as f64, 0.0), &find(sc, "tube: unit closed form"));
        let cb = &an.count;
        self.add_fact("simple count", C64::new(cb.simples as f64, 0.0), &cb.certificate.checks[0]);
        self.add_fact("count bound", C64::new(cb.bound as f64, 0.0), &cb.certificate.checks[0]);
        let conj = Check::below("conjugation via 𝔖²", md.conjugation_residual, 1e-6);
        self.add_fact("conjugation residual", C64::new(md.conjugation_residual, 0.0), &conj);
    }

    /// Simples, S and T of the group-side computation.
    pub fn add_hopf(&mut self, h: &HopfModularData) {
        let c = &h.certificate;
        let dims = find(c, "dimensions integral");
        let tw = find(c, "twist order divides element order");
        for (x, &d) in h.dims.iter().enumerate() {
            self.simples.push(SimpleRow {
                index: x,
                d: Tagged::new([d, 0.0], &dims),
                omega: Tagged::new(cx(h.twists[x]), &tw),
                mult: Tagged::new(vec![h.class_rep[x]], &find(c, "central idempotents")),
                dual: x,
            });
        }
        let n: f64 = h.dims.iter().map(|d| d * d).sum();
        self.s = Some(Tagged::new(matrix(&h.s), &find(c, "S from Fourier = S from R21 R12")));
        self.s_normalized = Some(Tagged::new(matrix(&(&h.s / C64::new(n.sqrt(), 0.0))), &find(c, "S invertible (σ_min)")));
        self.t = Some(Tagged::new(h.twists.iter().map(|&w| cx(w)).collect(), &tw));
        self.add_fact("lambda", h.lambda, &find(c, "S from Fourier = S from R21 R12"));
        self.add_fact("dim", C64::new(n, 0.0), &find(c, "Σ d² = |G|²"));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable form. Numbers are printed exactly as in the JSON.
    pub fn to_text(&self) -> String {
        let mut o = String::new();
        let i = &self.input;
        o += &format!("{} {} ({}, rank {}, {})\n", self.command, i.name, i.kind, i.rank, i.source);
        o += &format!("schema {}  tolerance {}", self.schema_version, num(self.tolerance));
        if let Some(s) = self.seed {
            o += &format!("  seed {s}");
        }
        o += "\n";
        for sec in &self.sections {
            o += &format!("\n[{}]\n", sec.name);
            for c in &sec.certificate.checks {
                o += &format!(
                    "  {} {}  residual {}  threshold {}\n",
                    if c.pass { "ok  " } else { "FAIL" },
                    c.name,
                    num(c.residual),
                    num(c.threshold)
                );
            }
        }
        if !self.simples.is_empty() {
            o += "\nsimples\n";
            for s in &self.simples {
                o += &format!(
                    "  {:>3}  d {} ({})  omega {} ({})  mult {:?} ({})  dual {}\n",
                    s.index,
                    cnum(s.d.value),
                    num(s.d.residual),
                    cnum(s.omega.value),
                    num(s.omega.residual),
                    s.mult.value,
                    num(s.mult.residual),
                    s.dual
                );
            }
        }
        for (label, m) in [("S", &self.s), ("S normalized", &self.s_normalized)] {
            if let Some(m) = m {
                o += &format!("\n{label} ({} {})\n", m.check, num(m.residual));
                for row in &m.value {
                    let cells: Vec<String> = row.iter().map(|&z| cnum(z)).collect();
                    o += &format!("  {}\n", cells.join("  "));
                }
            }
        }
        if let Some(t) = &self.t {
            let cells: Vec<String> = t.value.iter().map(|&z| cnum(z)).collect();
            o += &format!("\nT ({} {})\n  {}\n", t.check, num(t.residual), cells.join("  "));
        }
        if !self.facts.is_empty() {
            o += "\n";
            for f in &self.facts {
                o += &format!("{} = {}  ({} {})\n", f.name, cnum(f.value.value), f.value.check, num(f.value.residual));
            }
        }
        if let Some(p) = &self.matching {
            o += &format!("\nmatching {:?}\n", p);
        }
        o += &match &self.first_failure {
            None => "\nresult: pass\n".to_string(),
            Some(f) => format!("\nresult: FAIL (first failure: {f})\n"),
        };
        o
    }
}

fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("number")
}

fn cnum(z: Complex) -> String {
    format!("[{},{}]", num(z[0]), num(z[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn below_and_above() {
        assert!(Check::below("x", 1e-12, 1e-9).pass);
        assert!(!Check::below("x", f64::NAN, 1e-9).pass);
        assert!(Check::above("det", 16.0, 1e-6).pass);
    }

    #[test]
    fn report_tracks_first_failure() {
        let input = Input {
            kind: "category".into(),
            name: "x".into(),
            source: "test".into(),
            rank: 1,
        };
        let mut r = Report::new("validate", input, 1e-9, None);
        let mut ok = Certificate::new();
        ok.push(Check::below("a", 0.0, 1.0));
        r.add_section("first", ok);
        assert!(r.pass);
        r.fail("second", "broken");
        r.fail("third", "also broken");
        assert!(!r.pass);
        assert_eq!(r.first_failure.as_deref(), Some("broken"));
        r.time("all", 1.5);
        let j = r.to_json();
        assert!(j.contains("\"schema_version\": \"1\""));
        assert!(!j.contains("timings"));
        assert!(r.to_text().contains("FAIL"));
    }

    #[test]
    fn certificate_reports_first_failure() {
        let mut c = Certificate::new();
        c.push(Check::below("a", 0.0, 1.0));
        c.push(Check::below("b", 2.0, 1.0));
        assert!(!c.pass());
        assert_eq!(c.first_failure().unwrap().name, "b");
    }
}
