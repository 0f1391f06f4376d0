//! Command-line front end. Every command writes CSV (or a plain report) whose
//! `#` header records the resolved configuration.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::boundary::BoundarySpec;
use crate::energy::{dissipation_and_boundary_form, render_certificate, verify_energy_balance};
use crate::error::{Error, Result};
use crate::output::{self, CsvTable};
use crate::rng::Xoshiro256StarStar;
use crate::scheme::{Builtin, SchemeStencil, MIN_STABILITY_SAMPLES};
use crate::solver::{
    convergence_study, run_interval, ConvergenceOptions, ErrorConvention, GridSpec, InitialDatum, InitialProjection,
    Norm, Record, RunOptions,
};
use crate::spectral::{spectral_report, SpectralOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "transport-nbc", version, about = "Finite-difference transport schemes with extrapolation outflow")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Consistency order, l2 stability and the energy certificate of a stencil.
    Verify(VerifyArgs),
    /// Solution dump on the interval.
    Run(RunArgs),
    /// Errors and observed orders under grid refinement.
    Convergence(ConvergenceArgs),
    /// Spectral radius and l2 norm of the one-step matrix.
    Spectral(SpectralArgs),
    /// Randomised check of the whole-line energy balance.
    EnergyCheck(EnergyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SchemeArgs {
    /// Built-in name (upwind, lax_friedrichs, lax_wendroff) or a custom
    /// stencil such as "r=1,p=1,a=-1:0.595,0:0.51,1:-0.105;vel=1;lambda=0.7".
    #[arg(long, default_value = "lax_wendroff")]
    pub scheme: String,
    /// Transport velocity (built-ins only).
    #[arg(long = "a", default_value_t = 1.0)]
    pub a: f64,
    /// dt / dx (built-ins only).
    #[arg(long, default_value_t = 0.7)]
    pub lambda: f64,
}

impl SchemeArgs {
    /// `checked` applies the CFL guard to built-ins.
    pub fn resolve(&self, checked: bool) -> Result<SchemeStencil> {
        if self.scheme.contains('=') {
            return self.scheme.parse();
        }
        let kind: Builtin = self.scheme.parse()?;
        if checked {
            SchemeStencil::builtin(kind, self.a, self.lambda)
        } else {
            if !(self.a > 0.0) {
                return Err(Error::InvalidParameter { name: "a", reason: format!("must be positive, got {}", self.a) });
            }
            SchemeStencil::builtin_unchecked(kind, self.a, self.lambda)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Midpoint,
    #[value(name = "cell_average")]
    CellAverage,
}

impl From<ConventionArg> for ErrorConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Midpoint => ErrorConvention::Midpoint,
            ConventionArg::CellAverage => ErrorConvention::CellAverage,
        }
    }
}

impl From<ConventionArg> for InitialProjection {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Midpoint => InitialProjection::Midpoint,
            ConventionArg::CellAverage => InitialProjection::CellAverage,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RecordArg {
    Final,
    Sup,
    History,
}

impl From<RecordArg> for Record {
    fn from(r: RecordArg) -> Self {
        match r {
            RecordArg::Final => Record::Final,
            RecordArg::Sup => Record::SupError,
            RecordArg::History => Record::FullHistory,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Linf,
    L2,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    /// Tolerance on |symbol| - 1.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long = "L", default_value_t = 1.0)]
    pub length: f64,
    #[arg(long = "J", default_value_t = 40)]
    pub cells: usize,
    /// Outflow extrapolation orders, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub kb: Vec<usize>,
    #[arg(long = "T", default_value_t = 0.5)]
    pub final_time: f64,
    /// u01 | u02 | u03 | power:c:alpha
    #[arg(long, default_value = "u01")]
    pub datum: String,
    /// Exact values compared against the numerical ones.
    #[arg(long, value_enum, default_value = "midpoint")]
    pub convention: ConventionArg,
    /// Initial level: midpoint samples or exact cell averages.
    #[arg(long, value_enum, default_value = "midpoint")]
    pub init: ConventionArg,
    #[arg(long, value_enum, default_value = "final")]
    pub record: RecordArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long = "L", default_value_t = 1.0)]
    pub length: f64,
    #[arg(long = "J-list", value_delimiter = ',', default_value = "10,20,40,80,160,320,640,1280")]
    pub cells: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    pub kb: usize,
    #[arg(long = "T", default_value_t = 0.5)]
    pub final_time: f64,
    #[arg(long, default_value = "u01")]
    pub datum: String,
    #[arg(long, value_enum, default_value = "midpoint")]
    pub convention: ConventionArg,
    #[arg(long, value_enum, default_value = "midpoint")]
    pub init: ConventionArg,
    /// Which error the order column uses: sup over time or final level.
    #[arg(long, value_enum, default_value = "sup")]
    pub record: RecordArg,
    #[arg(long, value_enum, default_value = "linf")]
    pub norm: NormArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectralArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long = "J-list", value_delimiter = ',', default_value = "20,80,320,1280")]
    pub cells: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    pub kb: Vec<usize>,
    /// Also tabulate ||A^n|| for n = 0..=POWERS.
    #[arg(long)]
    pub powers: Option<usize>,
    /// Dump sigma_min(zI - A) on a grid instead of the summary (single J and kb).
    #[arg(long)]
    pub pseudospectrum: bool,
    #[arg(long, default_value_t = 64)]
    pub res: usize,
    #[arg(long, value_delimiter = ',', default_value = "-1.5,1.5", allow_hyphen_values = true)]
    pub re: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "-1.5,1.5", allow_hyphen_values = true)]
    pub im: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EnergyArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Longest random support.
    #[arg(long, default_value_t = 40)]
    pub support: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Outcome of a command: text for the sink and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, code: EXIT_OK }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_VALIDATION,
    }
}

fn scheme_meta(t: &mut CsvTable, s: &SchemeStencil, name: &str) {
    t.meta("scheme", name);
    t.meta("stencil", s.to_text());
}

fn finite_range(v: &[f64], name: &'static str) -> Result<(f64, f64)> {
    match v {
        [lo, hi] if lo < hi => Ok((*lo, *hi)),
        _ => Err(Error::InvalidParameter { name, reason: "expected two increasing values lo,hi".into() }),
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome> {
    let s = args.scheme.resolve(false)?;
    let mut out = String::new();
    let mut failure: Option<&str> = None;
    out.push_str(&format!("stencil: {}\n", s.to_text()));
    let order = s.order();
    out.push_str(&format!("consistency order: {}", order.order));
    if let Some(flag) = order.flag {
        out.push_str(&format!(" ({flag:?})"));
    }
    out.push('\n');
    if order.order < 1 {
        failure.get_or_insert("consistency");
    }
    let stab = s.check_l2_stability(MIN_STABILITY_SAMPLES * 4, args.tol)?;
    out.push_str(&format!(
        "l2 stability: {} (max |symbol| = {} at theta = {})\n",
        if stab.is_stable { "stable" } else { "unstable" },
        output::sig15(stab.max_modulus),
        output::sig15(stab.argmax_theta)
    ));
    if !stab.is_stable {
        failure.get_or_insert("stability");
    }
    match dissipation_and_boundary_form(&s) {
        Ok(cert) => {
            out.push_str(&render_certificate(&cert));
            out.push_str(&format!("-lambda a = {}\n", output::sig15(-s.courant())));
        }
        Err(e) => {
            out.push_str(&format!("energy certificate: unavailable ({e})\n"));
            failure.get_or_insert("energy certificate");
        }
    }
    match failure {
        None => {
            out.push_str("result: pass\n");
            Ok(Outcome::ok(out))
        }
        Some(name) => {
            out.push_str(&format!("result: fail ({name})\n"));
            Ok(Outcome { text: out, code: EXIT_VALIDATION })
        }
    }
}

pub fn cmd_run(args: &RunArgs) -> Result<Outcome> {
    let s = args.scheme.resolve(true)?;
    let datum: InitialDatum = args.datum.parse()?;
    let grid = GridSpec::new(args.length, args.cells, s.lambda())?;
    let mut table = output::solution_table();
    scheme_meta(&mut table, &s, &args.scheme.scheme);
    table
        .meta("L", args.length)
        .meta("J", args.cells)
        .meta("dx", grid.dx)
        .meta("dt", grid.dt)
        .meta("T", args.final_time)
        .meta("steps", grid.steps_to_reach(args.final_time))
        .meta("final_time", grid.time(grid.steps_to_reach(args.final_time)))
        .meta("datum", &datum)
        .meta("init", format!("{:?}", args.init).to_lowercase())
        .meta("convention", format!("{:?}", args.convention).to_lowercase())
        .meta("record", format!("{:?}", args.record).to_lowercase())
        .meta("kb", args.kb.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
    for &kb in &args.kb {
        let run = run_interval(
            &datum,
            &grid,
            &s,
            &BoundarySpec::extrapolation(kb),
            args.final_time,
            RunOptions { record: args.record.into(), projection: args.init.into() },
        )?;
        if let Some(sup) = run.sup_errors {
            table.meta(&format!("sup_linf_error_kb{kb}"), sup.get(args.convention.into(), Norm::Linf));
        }
        output::solution_rows(&mut table, kb, &run, &datum, args.convention.into());
    }
    Ok(Outcome::ok(table.to_string_lossy()))
}

pub fn cmd_convergence(args: &ConvergenceArgs) -> Result<Outcome> {
    let s = args.scheme.resolve(true)?;
    let datum: InitialDatum = args.datum.parse()?;
    let options = ConvergenceOptions {
        length: args.length,
        convention: args.convention.into(),
        projection: args.init.into(),
        norm: match args.norm {
            NormArg::Linf => Norm::Linf,
            NormArg::L2 => Norm::L2,
        },
    };
    let result = convergence_study(&datum, &s, args.kb, &args.cells, args.final_time, options)?;
    let use_sup = args.record != RecordArg::Final;
    let mut table = output::convergence_table(&result, use_sup);
    let mut meta = CsvTable::default();
    scheme_meta(&mut meta, &s, &args.scheme.scheme);
    meta.meta("L", args.length)
        .meta("kb", args.kb)
        .meta("T", args.final_time)
        .meta("datum", &datum)
        .meta("init", format!("{:?}", args.init).to_lowercase())
        .meta("convention", format!("{:?}", args.convention).to_lowercase())
        .meta("norm", format!("{:?}", args.norm).to_lowercase())
        .meta("observed_order", if use_sup { "from error_sup" } else { "from error_final" });
    table.header = meta.header;
    Ok(Outcome::ok(table.to_string_lossy()))
}

pub fn cmd_spectral(args: &SpectralArgs) -> Result<Outcome> {
    let s = args.scheme.resolve(true)?;
    let pseudo = if args.pseudospectrum {
        if args.cells.len() != 1 || args.kb.len() != 1 {
            return Err(Error::InvalidParameter {
                name: "pseudospectrum",
                reason: "needs exactly one J and one kb".into(),
            });
        }
        Some((finite_range(&args.re, "re")?, finite_range(&args.im, "im")?, args.res))
    } else {
        None
    };
    let mut reports = Vec::new();
    for &cells in &args.cells {
        for &kb in &args.kb {
            reports.push(spectral_report(cells, &s, kb, SpectralOptions { powers: args.powers, pseudospectrum: pseudo })?);
        }
    }
    let mut table = if let Some(grid) = reports.first().and_then(|r| r.pseudospectrum.as_ref()) {
        let mut t = output::pseudospectrum_table(grid);
        t.meta("J", reports[0].cells).meta("kb", reports[0].kb);
        t.meta("rho", reports[0].spectral_radius).meta("norm", reports[0].l2_norm);
        t.meta("res", args.res);
        t.meta("re", format!("{},{}", args.re[0], args.re[1])).meta("im", format!("{},{}", args.im[0], args.im[1]));
        t
    } else if args.powers.is_some() {
        output::power_table(&reports)
    } else {
        output::spectral_table(&reports)
    };
    let mut meta = CsvTable::default();
    scheme_meta(&mut meta, &s, &args.scheme.scheme);
    meta.header.append(&mut table.header);
    table.header = meta.header;
    if reports.iter().any(|r| !r.norm_converged) {
        table.meta("note", "some norm estimates hit the iteration cap; values are lower bounds");
    }
    if reports.iter().any(|r| r.eigen_method == crate::spectral::EigenMethod::Triangular) {
        table.meta("note", "triangular matrix: eigenvalues are the diagonal entries");
    }
    Ok(Outcome::ok(table.to_string_lossy()))
}

pub fn cmd_energy_check(args: &EnergyArgs) -> Result<Outcome> {
    let s = args.scheme.resolve(false)?;
    let cert = dissipation_and_boundary_form(&s)?;
    let mut rng = Xoshiro256StarStar::seed_from_u64(args.seed);
    let mut worst_residual = 0.0f64;
    let mut worst_dissipation = f64::NEG_INFINITY;
    let mut positive = 0usize;
    for _ in 0..args.trials {
        let len = rng.range_usize(1, args.support.max(1));
        let v: Vec<f64> = (0..len).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let b = verify_energy_balance(&s, &cert, &v, 1.0 / len as f64);
        if b.scale > 0.0 {
            worst_residual = worst_residual.max(b.residual / b.scale);
        }
        worst_dissipation = worst_dissipation.max(b.rhs);
        if b.rhs > 1e-12 {
            positive += 1;
        }
    }
    let mut table = CsvTable::new(&["trials", "max_relative_residual", "max_dissipation", "positive_dissipation"]);
    scheme_meta(&mut table, &s, &args.scheme.scheme);
    table.meta("seed", args.seed).meta("support", args.support).meta("rng", "xoshiro256** seeded by splitmix64");
    if args.trials > 0 {
        table.push(vec![
            args.trials.to_string(),
            output::num(worst_residual),
            output::num(worst_dissipation),
            positive.to_string(),
        ]);
    }
    let ok = worst_residual <= 1e-12 && positive == 0;
    if !ok {
        table.meta("result", "fail");
    }
    Ok(Outcome { text: table.to_string_lossy(), code: if ok { EXIT_OK } else { EXIT_VALIDATION } })
}

fn out_path(cmd: &Command) -> Option<&PathBuf> {
    match cmd {
        Command::Verify(_) => None,
        Command::Run(a) => a.out.as_ref(),
        Command::Convergence(a) => a.out.as_ref(),
        Command::Spectral(a) => a.out.as_ref(),
        Command::EnergyCheck(a) => a.out.as_ref(),
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Run(a) => cmd_run(a),
        Command::Convergence(a) => cmd_convergence(a),
        Command::Spectral(a) => cmd_spectral(a),
        Command::EnergyCheck(a) => cmd_energy_check(a),
    }
}

/// Parses `args`, runs the command, writes its output and returns the exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            let written = match out_path(&cli.command) {
                Some(path) => File::create(path).and_then(|f| {
                    let mut w = BufWriter::new(f);
                    w.write_all(outcome.text.as_bytes())?;
                    w.flush()
                }),
                None => io::stdout().lock().write_all(outcome.text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return EXIT_VALIDATION;
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("transport-nbc").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn verify_lax_wendroff() {
        let o = execute(&parse(&["verify", "--scheme", "lax_wendroff", "--a", "1", "--lambda", "0.7"])).unwrap();
        assert_eq!(o.code, EXIT_OK, "{}", o.text);
        assert!(o.text.contains("consistency order: 2"));
        assert!(o.text.contains("Q(e_r) = -0.700000000000000"));
    }

    #[test]
    fn verify_failures() {
        let o = execute(&parse(&["verify", "--lambda", "1.1"])).unwrap();
        assert_ne!(o.code, EXIT_OK);
        assert!(o.text.contains("unstable"));
        let o = execute(&parse(&["verify", "--scheme", "r=0,p=0,a=0:1;vel=1;lambda=0.5"])).unwrap();
        assert_ne!(o.code, EXIT_OK);
        assert!(o.text.contains("fail (consistency)"));
    }

    #[test]
    fn run_header_records_final_time() {
        let o = execute(&parse(&["run", "--J", "40", "--T", "0.5", "--kb", "2", "--datum", "u02"])).unwrap();
        assert!(o.text.contains("# final_time = 0.5075"), "{}", &o.text[..400]);
        assert!(o.text.contains("# steps = 29"));
    }

    #[test]
    fn spectral_rejects_multi_pseudospectrum() {
        let e = execute(&parse(&["spectral", "--pseudospectrum"])).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_VALIDATION);
    }

    #[test]
    fn energy_check_zero_trials() {
        let o = execute(&parse(&["energy-check", "--trials", "0"])).unwrap();
        assert_eq!(o.code, EXIT_OK);
    }
}
