//! Command-line front end. `run` returns the process exit code: 0 when every
//! certificate passes, 1 on a failed check, 2 on unreadable input.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::center::{analyze, match_modular, match_residual};
use crate::error::Error;
use crate::fusion::{load_category, validate, FusionCategoryData};
use crate::group_double::{build_double, cross_check_vs_tube, GroupSpec};
use crate::halfbraiding::{braided_modular_data, mirror_product, z2_center};
use crate::morphism::Calculus;
use crate::report::{Check, Certificate, Input, Report};
use crate::scalar::{Tolerance, DEFAULT_EPS};

#[derive(Debug, Parser)]
#[command(name = "tubecenter", version, about = "Drinfeld centers of fusion categories via the tube algebra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Also write the JSON report here.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Print the JSON report instead of the text tables.
    #[arg(long)]
    pub json_stdout: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the pentagon, triangle, sphericity and (if present) hexagon data.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Tube algebra, simples of the double and their modular data.
    Double {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Modular data of D(G) from the Hopf-algebra side.
    GroupDouble {
        /// Group JSON file (`{"order":n,"table":..}`, `{"cyclic":n}` or `{"symmetric":n}`).
        file: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["file", "symmetric"])]
        cyclic: Option<usize>,
        #[arg(long, conflicts_with_all = ["file", "cyclic"])]
        symmetric: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Match the double of a Vec_G file against D(G).
    Compare {
        file: PathBuf,
        /// Group JSON file or inline JSON.
        group: String,
        #[command(flatten)]
        common: Common,
    },
}

/// Outcome of a command: the report, or an input error.
pub enum Outcome {
    Report(Report),
    InputError(Error),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Report(r) if r.pass => 0,
            Outcome::Report(_) => 1,
            Outcome::InputError(_) => 2,
        }
    }
}

fn tolerance(c: &Common) -> Result<Tolerance, Error> {
    if !(c.tolerance.is_finite() && c.tolerance > 0.0 && c.tolerance < 1.0) {
        return Err(Error::ParseError(format!("tolerance {} is not in (0, 1)", c.tolerance)));
    }
    Ok(Tolerance::new(c.tolerance))
}

fn category_input(cat: &FusionCategoryData, path: &Path) -> Input {
    Input {
        kind: "category".into(),
        name: cat.name.clone(),
        source: path.display().to_string(),
        rank: cat.rank(),
    }
}

fn load_group(arg: &str) -> Result<GroupSpec, Error> {
    if arg.trim_start().starts_with('{') {
        GroupSpec::parse_json(arg)
    } else {
        GroupSpec::load(arg)
    }
}

pub fn cmd_validate(path: &Path, common: &Common) -> Outcome {
    let start = Instant::now();
    let (cat, tol) = match load_category(path).and_then(|c| Ok((c, tolerance(common)?))) {
        Ok(x) => x,
        Err(e) => return Outcome::InputError(e),
    };
    let mut rep = Report::new("validate", category_input(&cat, path), tol.eps, None);
    rep.add_section("validation", validate(&cat, tol));
    rep.time("validate", start.elapsed().as_secs_f64());
    Outcome::Report(rep)
}

/// Braided inputs with trivial symmetric center: the double against
/// `C ⊠ C^rev` built from the R-symbols.
fn braided_section(cat: &FusionCategoryData, an: &crate::center::CenterAnalysis, tol: Tolerance) -> Option<Certificate> {
    cat.r.as_ref()?;
    let calc = Calculus::from_data(cat);
    let mut cert = Certificate::new();
    let z2 = match z2_center(&calc, tol) {
        Ok(z) => z,
        Err(_) => return None,
    };
    // a nontrivial symmetric center only means the mirror comparison does not apply
    if z2 == vec![0] {
        let oracle = mirror_product(&braided_modular_data(cat)?);
        let view = an.modular.view();
        match match_modular(&view, &oracle, 1e-7) {
            Ok(p) => cert.push(Check::below("braided: double matches C ⊠ C^rev", match_residual(&view, &oracle, &p), 1e-7)),
            Err(_) => cert.push(Check::flag("braided: double matches C ⊠ C^rev", false)),
        }
    }
    Some(cert)
}

pub fn cmd_double(path: &Path, common: &Common) -> Outcome {
    let start = Instant::now();
    let (cat, tol) = match load_category(path).and_then(|c| Ok((c, tolerance(common)?))) {
        Ok(x) => x,
        Err(e) => return Outcome::InputError(e),
    };
    let mut rep = Report::new("double", category_input(&cat, path), tol.eps, Some(common.seed));
    let v = validate(&cat, tol);
    let ok = v.pass();
    rep.add_section("validation", v);
    if !ok {
        return Outcome::Report(rep);
    }
    rep.time("validate", start.elapsed().as_secs_f64());
    let an = match analyze(&cat, common.seed, tol) {
        Ok(a) => a,
        Err(e) => {
            rep.fail("double", &e.to_string());
            return Outcome::Report(rep);
        }
    };
    rep.time("analyze", start.elapsed().as_secs_f64());
    rep.add_section("simples", an.simple_checks.clone());
    rep.add_section("modularity", an.modularity.clone());
    rep.add_section("gauss", an.gauss.clone());
    rep.add_section("count", an.count.certificate.clone());
    rep.add_section("induction", an.induction.clone());
    let mut fus = Certificate::new();
    match &an.fusion {
        Ok(f) => fus.push(Check::below("verlinde: integral", f.rounding_residual, crate::center::INTEGRALITY_TOL)),
        Err(e) => fus.push(Check::flag(format!("verlinde: {e}"), false)),
    }
    rep.add_section("verlinde", fus);
    if let Some(b) = braided_section(&cat, &an, tol) {
        rep.add_section("braided", b);
    }
    rep.add_center(&an);
    rep.time("total", start.elapsed().as_secs_f64());
    Outcome::Report(rep)
}

fn group_report(g: &GroupSpec, source: &str, common: &Common, tol: Tolerance) -> Report {
    let start = Instant::now();
    let input = Input {
        kind: "group".into(),
        name: format!("D(G), |G| = {}", g.order()),
        source: source.into(),
        rank: g.order(),
    };
    let mut rep = Report::new("group-double", input, tol.eps, Some(common.seed));
    let d = match build_double(g, tol) {
        Ok(d) => d,
        Err(e) => {
            rep.fail("double", &e.to_string());
            return rep;
        }
    };
    rep.add_section("hopf", d.hopf_checks(tol));
    rep.add_section("ribbon", d.drinfeld_and_ribbon_checks(tol));
    rep.add_section("integrals", d.integral_checks(tol));
    let (mut fc, _) = d.fourier_checks(tol);
    fc.push(Check::below("Fourier square commutes", d.kerler_residual(tol), 1e-10));
    rep.add_section("fourier", fc);
    match d.hopf_smatrix(common.seed, tol) {
        Ok(h) => {
            rep.add_section("modular data", h.certificate.clone());
            rep.add_hopf(&h);
        }
        Err(e) => rep.fail("modular data", &e.to_string()),
    }
    rep.time("total", start.elapsed().as_secs_f64());
    rep
}

pub fn cmd_group_double(file: Option<&Path>, cyclic: Option<usize>, symmetric: Option<usize>, common: &Common) -> Outcome {
    let tol = match tolerance(common) {
        Ok(t) => t,
        Err(e) => return Outcome::InputError(e),
    };
    let (g, source) = match (file, cyclic, symmetric) {
        (Some(p), None, None) => match GroupSpec::load(p) {
            Ok(g) => (g, p.display().to_string()),
            Err(e) => return Outcome::InputError(e),
        },
        (None, Some(n), None) if n >= 1 => (GroupSpec::cyclic(n), format!("cyclic {n}")),
        (None, None, Some(n)) if (1..=4).contains(&n) => (GroupSpec::symmetric(n), format!("symmetric {n}")),
        _ => {
            return Outcome::InputError(Error::ParseError(
                "give one of a group file, --cyclic n (n >= 1) or --symmetric n (1 <= n <= 4)".into(),
            ))
        }
    };
    Outcome::Report(group_report(&g, &source, common, tol))
}

pub fn cmd_compare(path: &Path, group: &str, common: &Common) -> Outcome {
    let start = Instant::now();
    let (cat, tol) = match load_category(path).and_then(|c| Ok((c, tolerance(common)?))) {
        Ok(x) => x,
        Err(e) => return Outcome::InputError(e),
    };
    let g = match load_group(group) {
        Ok(g) => g,
        Err(e) => return Outcome::InputError(e),
    };
    let mut rep = Report::new("compare", category_input(&cat, path), tol.eps, Some(common.seed));
    let v = validate(&cat, tol);
    let ok = v.pass();
    rep.add_section("validation", v);
    if !ok {
        return Outcome::Report(rep);
    }
    let run = || -> crate::Result<_> {
        let d = build_double(&g, tol)?;
        let h = d.hopf_smatrix(common.seed, tol)?;
        let an = analyze(&cat, common.seed, tol)?;
        let (p, cert) = cross_check_vs_tube(&d, &h, &an, 1e-7)?;
        Ok((an, p, cert))
    };
    match run() {
        Ok((an, p, cert)) => {
            rep.add_section("cross-check", cert);
            rep.add_center(&an);
            rep.matching = Some(p);
        }
        Err(e) => rep.fail("cross-check", &e.to_string()),
    }
    rep.time("total", start.elapsed().as_secs_f64());
    Outcome::Report(rep)
}

fn common_of(c: &Command) -> &Common {
    match c {
        Command::Validate { common, .. }
        | Command::Double { common, .. }
        | Command::GroupDouble { common, .. }
        | Command::Compare { common, .. } => common,
    }
}

/// Runs a parsed command line, printing to the given writers.
pub fn execute(cli: &Cli, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32 {
    let outcome = match &cli.command {
        Command::Validate { file, common } => cmd_validate(file, common),
        Command::Double { file, common } => cmd_double(file, common),
        Command::GroupDouble {
            file,
            cyclic,
            symmetric,
            common,
        } => cmd_group_double(file.as_deref(), *cyclic, *symmetric, common),
        Command::Compare { file, group, common } => cmd_compare(file, group, common),
    };
    let common = common_of(&cli.command);
    let code = outcome.exit_code();
    match outcome {
        Outcome::InputError(e) => {
            let _ = writeln!(err, "error: {e}");
        }
        Outcome::Report(rep) => {
            let text = if common.json_stdout { rep.to_json() + "\n" } else { rep.to_text() };
            let _ = out.write_all(text.as_bytes());
            for (what, secs) in &rep.timings {
                let _ = writeln!(err, "elapsed at {what}: {secs:.3} s");
            }
            if let Some(f) = &rep.first_failure {
                let _ = writeln!(err, "first failing check: {f}");
            }
            if let Some(p) = &common.json {
                if let Err(e) = std::fs::write(p, rep.to_json() + "\n") {
                    let _ = writeln!(err, "error: cannot write {}: {e}", p.display());
                    return 2;
                }
            }
        }
    }
    code
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, &mut std::io::stdout(), &mut std::io::stderr()),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}
