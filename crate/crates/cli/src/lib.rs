//! The `fracmom` command line: argument parsing, the subcommand drivers and
//! report rendering. `main.rs` only prints what [`execute`] returns.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use thiserror::Error;

use fraction_moments::fibres::{
    decide_moment_property_seeded, fibre_constraints, fibre_dimension, FibreError, FibreParameter, Verdict,
};
use fraction_moments::fracalg::{AlgebraDescriptor, FracError, FractionElement};
use fraction_moments::polycore::{
    format_rational, parse_real, parse_real_infer, ParseError, Rational, RealPolynomial,
};
use fraction_moments::semigroups::{
    hermitean_square_certify, truncated_psd_check, CertifyOptions, PsdVerdict, SemigroupCertificate,
    SemigroupElement, SemigroupError, SemigroupOutcome, StarSemigroup, TruncatedFunctional,
};
use fraction_moments::sos::{
    cylinder_sos, cylinder_vars, fraction_sos, multiplier_search, univariate_sos, Attempt, AttemptResult,
    SosCertificate, SosError, SosOptions, SosOutcome,
};

#[derive(Parser, Debug, Clone)]
#[command(name = "fracmom", version, about = "Moment-property decisions and sums-of-squares certificates")]
pub struct Cli {
    #[command(flatten)]
    pub options: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Largest multiplier exponent tried.
    #[arg(long, global = true, default_value_t = 6)]
    pub m_max: u32,
    /// Largest square degree for the cylinder search (default: degree + 4).
    #[arg(long, global = true)]
    pub degree_cap: Option<u32>,
    /// Interior-point tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Seed for randomized stages.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Decide the moment property for an algebra descriptor.
    DecideMoment { descriptor: PathBuf },
    /// Fibre constraint system and dimension for a list of angles.
    Fibres {
        descriptor: PathBuf,
        /// Angles, e.g. "pi/4, pi/4" or unit Gaussian rationals "3/5+4/5*i".
        #[arg(long)]
        angles: String,
    },
    /// Certify a polynomial (or a fraction over (x²+y²)^k) as a sum of squares.
    Sos {
        polynomial: PathBuf,
        /// Multiplier w in w^m·p = Σ squares (default: sum of the squared variables).
        #[arg(long)]
        multiplier: Option<String>,
        /// Treat the input as the numerator of p/(x²+y²)^k.
        #[arg(long)]
        denominator_exponent: Option<u32>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Certify a polynomial in x, y, z on the cylinder x²+y²=1.
    CylinderSos {
        polynomial: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Certify a semigroup element as a sum of hermitean squares.
    SemigroupCertify {
        element: PathBuf,
        #[arg(long)]
        semigroup: StarSemigroup,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Positive semidefiniteness of a functional on a window.
    SemigroupPsd {
        functional: PathBuf,
        #[arg(long)]
        semigroup: StarSemigroup,
        /// Window {(k, n) : |k|, |n| ≤ radius} intersected with the semigroup.
        #[arg(long, default_value_t = 1)]
        radius: i64,
    },
    /// Re-expand a certificate in exact arithmetic.
    Verify { certificate: PathBuf },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Frac(#[from] FracError),
    #[error(transparent)]
    Fibre(#[from] FibreError),
    #[error(transparent)]
    Sos(#[from] SosError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error("{0}")]
    Input(String),
}

/// Outcome class of a run; the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Decided,
    Refuted,
    Unknown,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Decided => 0,
            Status::Refuted => 2,
            Status::Unknown => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub status: Status,
    pub fields: Map<String, Value>,
}

impl Report {
    fn new(command: &str, opts: &Options) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), json!(command));
        fields.insert("seed".into(), json!(opts.seed));
        fields.insert("m_max".into(), json!(opts.m_max));
        fields.insert("degree_cap".into(), opts.degree_cap.map_or(json!("default"), |c| json!(c)));
        fields.insert("tolerance".into(), json!(format!("{:e}", opts.tolerance)));
        Self { status: Status::Unknown, fields }
    }

    fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.into(), value);
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    pub fn render(&self, format: Format) -> String {
        let mut fields = self.fields.clone();
        fields.insert("exit_code".into(), json!(self.status.code()));
        match format {
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(&Value::Object(fields)).expect("plain JSON values");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut s = String::new();
                for (k, v) in &fields {
                    render_text(&mut s, k, v);
                }
                s
            }
        }
    }
}

fn render_text(out: &mut String, key: &str, v: &Value) {
    match v {
        Value::String(s) if s.contains('\n') => {
            out.push_str(&format!("{key}:\n"));
            for l in s.lines() {
                out.push_str(&format!("  {l}\n"));
            }
        }
        Value::String(s) => out.push_str(&format!("{key}: {s}\n")),
        Value::Array(items) => {
            for item in items {
                render_text(out, key, item);
            }
        }
        Value::Null => out.push_str(&format!("{key}: none\n")),
        other => out.push_str(&format!("{key}: {other}\n")),
    }
}

/// Parse arguments and run; returns the exit code and what to print on
/// stdout and stderr.
pub fn execute<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            return (code, String::new(), e.render().to_string());
        }
    };
    match run(&cli) {
        Ok(report) => (report.status.code(), report.render(cli.options.format), String::new()),
        Err(e) => {
            let out = match cli.options.format {
                Format::Structured => format!("{}\n", json!({ "status": "input-error", "message": e.to_string(), "exit_code": 1 })),
                Format::Text => String::new(),
            };
            (1, out, format!("error: {e}\n"))
        }
    }
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let opts = &cli.options;
    match &cli.command {
        Command::DecideMoment { descriptor } => decide(opts, descriptor),
        Command::Fibres { descriptor, angles } => fibres(opts, descriptor, angles),
        Command::Sos { polynomial, multiplier, denominator_exponent, output } => {
            sos(opts, polynomial, multiplier.as_deref(), *denominator_exponent, output.as_deref())
        }
        Command::CylinderSos { polynomial, output } => cylinder(opts, polynomial, output.as_deref()),
        Command::SemigroupCertify { element, semigroup, output } => {
            semigroup_certify(opts, element, *semigroup, output.as_deref())
        }
        Command::SemigroupPsd { functional, semigroup, radius } => semigroup_psd(opts, functional, *semigroup, *radius),
        Command::Verify { certificate } => verify(opts, certificate),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn sos_options(opts: &Options) -> SosOptions {
    SosOptions { tolerance: opts.tolerance, ..SosOptions::default() }
}

fn point(p: &[Rational]) -> Value {
    json!(format!("({})", p.iter().map(format_rational).collect::<Vec<_>>().join(", ")))
}

fn attempt_lines(attempts: &[Attempt], label: &str) -> Value {
    let lines: Vec<String> = attempts
        .iter()
        .map(|a| match &a.result {
            AttemptResult::Infeasible(w) => {
                format!("{label}={}: infeasible, dual witness with value {}", a.level, format_rational(&w.value))
            }
            AttemptResult::Indeterminate(msg) => format!("{label}={}: indeterminate, {msg}", a.level),
        })
        .collect();
    json!(lines)
}

fn decide(opts: &Options, path: &Path) -> Result<Report, CliError> {
    let alg = AlgebraDescriptor::parse(&read(path)?)?;
    let dec = decide_moment_property_seeded(&alg, opts.seed);
    let mut r = Report::new("decide-moment", opts);
    r.set("d", json!(alg.d));
    r.set("denominators", json!(alg.basis.entries.iter().map(|e| e.f.to_string()).collect::<Vec<_>>()));
    r.set("verdict", json!(dec.verdict.to_string()));
    r.set("reason", json!(dec.reason.to_string()));
    if dec.verdict == Verdict::Unknown {
        r.set("fibre_samples", json!(dec.evidence.len()));
        r.set("max_fibre_dimension", json!(dec.max_fibre_dimension()));
    }
    r.status = match dec.verdict {
        Verdict::Holds => Status::Decided,
        Verdict::Fails => Status::Refuted,
        Verdict::Unknown => Status::Unknown,
    };
    Ok(r)
}

fn fibres(opts: &Options, path: &Path, angles: &str) -> Result<Report, CliError> {
    let alg = AlgebraDescriptor::parse(&read(path)?)?;
    let param = FibreParameter::parse(angles)?;
    let cons = fibre_constraints(&alg, &param)?;
    let mut r = Report::new("fibres", opts);
    r.set("parameter", json!(param.to_string()));
    r.set("equations", json!(cons.equations.iter().map(|e| format!("{e} = 0")).collect::<Vec<_>>()));
    match &cons.affine {
        Some(fib) => {
            r.set("linear", json!(true));
            let reduced: Vec<String> =
                fib.reduced_equations().iter().filter(|e| !e.is_zero()).map(|e| format!("{e} = 0")).collect();
            r.set("reduced", json!(reduced));
            r.set("dimension", json!(fibre_dimension(fib).to_string()));
        }
        None => r.set("linear", json!(false)),
    }
    r.status = Status::Decided;
    Ok(r)
}

fn sos_report(
    r: &mut Report,
    outcome: &SosOutcome,
    label: &str,
    output: Option<&Path>,
) -> Result<(), CliError> {
    match outcome {
        SosOutcome::Certified(cert) => {
            r.status = Status::Decided;
            r.set("result", json!("certified"));
            r.set("multiplier_exponent", json!(cert.multiplier_exponent));
            r.set("squares", json!(cert.squares.len()));
            r.set("residual", json!(cert.residual().to_string()));
            let text = cert.to_text();
            if let Some(path) = output {
                write(path, &text)?;
            }
            r.set("certificate", json!(text));
        }
        SosOutcome::NotPsd(w) => {
            r.status = Status::Refuted;
            r.set("result", json!("not-psd"));
            r.set("witness", point(&w.point));
            r.set("value", json!(format_rational(&w.value)));
        }
        SosOutcome::Exhausted { cap, attempts } => {
            r.status = Status::Unknown;
            r.set("result", json!("exhausted"));
            r.set("cap", json!(cap));
            r.set("attempts", attempt_lines(attempts, label));
        }
    }
    Ok(())
}

fn sos(
    opts: &Options,
    path: &Path,
    multiplier: Option<&str>,
    denominator_exponent: Option<u32>,
    output: Option<&Path>,
) -> Result<Report, CliError> {
    let text = read(path)?;
    let so = sos_options(opts);
    let mut r = Report::new("sos", opts);
    let outcome = if let Some(k) = denominator_exponent {
        let alg = AlgebraDescriptor::punctured_plane();
        let p = parse_real(&text, alg.real_vars())?;
        r.set("target", json!(format!("({p}) / (x^2 + y^2)^{k}")));
        fraction_sos(&FractionElement::new(p, vec![k], &alg.basis), opts.m_max, &so)?
    } else {
        let p = parse_real_infer(&text)?;
        r.set("target", json!(p.to_string()));
        let used = (0..p.nvars()).filter(|&k| p.degree_in(k).unwrap_or(0) > 0).count();
        match multiplier {
            None if used <= 1 => univariate_sos(&p, &so)?,
            _ => {
                let w = match multiplier {
                    Some(m) => parse_real(m, p.vars())?,
                    None => (0..p.nvars()).fold(RealPolynomial::zero(p.vars()), |acc, k| {
                        let v = RealPolynomial::var(p.vars(), k);
                        &acc + &(&v * &v)
                    }),
                };
                r.set("multiplier", json!(w.to_string()));
                multiplier_search(&p, &w, opts.m_max, &so)?
            }
        }
    };
    sos_report(&mut r, &outcome, "m", output)?;
    Ok(r)
}

fn cylinder(opts: &Options, path: &Path, output: Option<&Path>) -> Result<Report, CliError> {
    let p = parse_real(&read(path)?, &cylinder_vars())?;
    let mut r = Report::new("cylinder-sos", opts);
    r.set("target", json!(p.to_string()));
    let outcome = cylinder_sos(&p, opts.degree_cap, &sos_options(opts))?;
    sos_report(&mut r, &outcome, "degree", output)?;
    Ok(r)
}

fn semigroup_certify(opts: &Options, path: &Path, s: StarSemigroup, output: Option<&Path>) -> Result<Report, CliError> {
    let a = SemigroupElement::parse(&read(path)?, s)?;
    let copts = CertifyOptions { m_max: opts.m_max, degree_cap: opts.degree_cap, sos: sos_options(opts), points: Vec::new() };
    let mut r = Report::new("semigroup-certify", opts);
    r.set("semigroup", json!(s.to_string()));
    r.set("element", json!(a.to_string()));
    match hermitean_square_certify(&a, &copts)? {
        SemigroupOutcome::Certified(cert) => {
            r.status = Status::Decided;
            r.set("result", json!("certified"));
            r.set("squares", json!(cert.squares.iter().map(|(w, e)| format!("{w} * |{e}|^2")).collect::<Vec<_>>()));
            r.set("residual", json!(cert.residual().to_string()));
            let text = cert.to_text();
            if let Some(path) = output {
                write(path, &text)?;
            }
            r.set("certificate", json!(text));
        }
        SemigroupOutcome::Refuted(w) => {
            r.status = Status::Refuted;
            r.set("result", json!("not-psd"));
            r.set("character", json!(w.character.to_string()));
            r.set("value", json!(format_rational(&w.value)));
        }
        SemigroupOutcome::Exhausted { cap, attempts } => {
            r.status = Status::Unknown;
            r.set("result", json!("exhausted"));
            r.set("cap", json!(cap));
            let label = if s == StarSemigroup::N0xZ { "degree" } else { "m" };
            r.set("attempts", attempt_lines(&attempts, label));
        }
    }
    Ok(r)
}

fn semigroup_psd(opts: &Options, path: &Path, s: StarSemigroup, radius: i64) -> Result<Report, CliError> {
    if radius < 0 {
        return Err(CliError::Input("radius must be non-negative".into()));
    }
    let window = s.window(radius);
    let l = TruncatedFunctional::parse(&read(path)?, s, window.clone())?;
    let mut r = Report::new("semigroup-psd", opts);
    r.set("semigroup", json!(s.to_string()));
    r.set("window", json!(window.iter().map(|(k, n)| format!("({k},{n})")).collect::<Vec<_>>().join(" ")));
    match truncated_psd_check(&l)? {
        PsdVerdict::Psd(ldl) => {
            r.status = Status::Decided;
            r.set("result", json!("psd"));
            r.set("rank", json!(ldl.rank()));
        }
        PsdVerdict::NotPsd { direction, value } => {
            r.status = Status::Refuted;
            r.set("result", json!("not-psd"));
            r.set("direction", json!(direction.iter().map(|c| c.to_string()).collect::<Vec<_>>()));
            r.set("value", json!(format_rational(&value)));
        }
    }
    Ok(r)
}

fn verify(opts: &Options, path: &Path) -> Result<Report, CliError> {
    let text = read(path)?;
    let mut r = Report::new("verify", opts);
    let header = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).unwrap_or("");
    let (ok, residual) = if header == "semigroup-certificate" {
        let cert = SemigroupCertificate::parse(&text)?;
        let sos_ok = cert.sos.verify();
        r.set("kind", json!("semigroup"));
        r.set("function_algebra", json!(if sos_ok { "PASS" } else { "FAIL" }));
        if !sos_ok {
            r.set("function_algebra_residual", json!(cert.sos.residual().to_string()));
        }
        (cert.verify() && sos_ok, cert.residual().to_string())
    } else {
        let cert = SosCertificate::parse(&text)?;
        r.set("kind", json!("sos"));
        (cert.verify(), cert.residual().to_string())
    };
    r.set("result", json!(if ok { "PASS" } else { "FAIL" }));
    r.set("residual", json!(residual));
    r.status = if ok { Status::Decided } else { Status::Refuted };
    Ok(r)
}

