//! Command-line surface. [`run`] maps an argument vector to an exit code
//! and the JSON text for standard output; the `critval` binary prints it.
//!
//! Exit codes: 0 success, 1 input error, 2 numerical failure.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::acceptance::{run_all, run_criterion, DEFAULT_SEED};
use crate::contour::{truncated_cvd, truncated_cvd_nudged, ContourConfig, StageError};
use crate::expr::parse_expr;
use crate::kernel::{cvd_pipeline, ExactComplex, Field, KernelError, Poly};
use crate::monodromy::{monodromy_group, radicals_verdict, MonodromyError};
use crate::typicality::{
    hermite_interpolant, hermite_residuals, split_zeros, theta_bound, typicality_probe,
    TypicalityConfig, TypicalityError,
};

#[derive(Parser, Debug)]
#[command(
    name = "critval",
    version,
    about = "Critical values discriminants, monodromy and typicality probes"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Disk radius for contour computations.
    #[arg(long, global = true, default_value_t = 5.0)]
    pub radius: f64,
    /// Initial quadrature node count (power of two, at least 16).
    #[arg(long, global = true, default_value_t = 64)]
    pub quad_nodes: usize,
    /// Relative agreement required between successive quadrature doublings.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Largest group order enumerated by closure.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub order_cap: usize,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Compact JSON output (the default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    pub json: bool,
    /// Indented JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Fail instead of retrying on nearby radii when a zero lies near the circle.
    #[arg(long, global = true)]
    pub strict_radius: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact critical values discriminant of y^m + a_{m-1} y^{m-1} + ... + a_0.
    Cvd {
        /// Exact a_0,...,a_{m-1} as "p/q" or "p/q+r/si" tokens.
        #[arg(long)]
        coeffs: String,
    },
    /// Whether the coefficient vector lies on the vanishing locus of the CVD.
    Variety {
        #[arg(long)]
        coeffs: String,
    },
    /// Monodromy group of the inverse of a monic polynomial by fiber tracking.
    Monodromy {
        /// Numeric a_0,...,a_{m-1} ("1.5", "2-0.5i", ...); the leading coefficient is 1.
        #[arg(long)]
        coeffs: String,
    },
    /// Solvability-by-radicals verdict from the exact CVD.
    Radicals {
        #[arg(long)]
        coeffs: String,
        /// Also track the monodromy group and compare.
        #[arg(long)]
        cross_check: bool,
    },
    /// Disk-truncated CVD of an entire-function expression.
    Tcvd {
        #[arg(long)]
        expr: String,
    },
    /// Typicality probe of an entire-function expression on the disk.
    Typical {
        #[arg(long)]
        expr: String,
    },
    /// The theta lower bound for |e^z - εz| on square contours.
    Theta {
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 4000)]
        samples: usize,
    },
    /// Hermite interpolant with prescribed values and vanishing derivatives.
    Interp {
        /// Numeric interpolation points.
        #[arg(long)]
        points: String,
        /// Numeric values, one per point.
        #[arg(long)]
        values: String,
    },
    /// Split the multiple zeros of a polynomial.
    Split {
        /// Numeric coefficients c_0,...,c_n in ascending order.
        #[arg(long)]
        coeffs: String,
        #[arg(long)]
        delta: f64,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Run a single criterion (1-9).
        #[arg(long)]
        criterion: Option<u32>,
    },
}

/// A failure mapped to an exit code and a JSON error object.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub kind: &'static str,
    pub stage: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
}

impl CliError {
    fn input(field: &str, index: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            kind: "input",
            stage: "parse".into(),
            message: message.into(),
            field: Some(field.into()),
            index,
        }
    }

    fn numerical(stage: impl Into<String>, message: impl ToString) -> Self {
        Self {
            kind: "numerical",
            stage: stage.into(),
            message: message.to_string(),
            field: None,
            index: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.kind == "input" {
            1
        } else {
            2
        }
    }
}

impl From<StageError> for CliError {
    fn from(e: StageError) -> Self {
        CliError::numerical(e.stage.to_string(), e.source)
    }
}

impl From<MonodromyError> for CliError {
    fn from(e: MonodromyError) -> Self {
        match e {
            MonodromyError::Kernel(KernelError::DegreeTooSmall { .. })
            | MonodromyError::DegreeTooSmall { .. } => {
                CliError::input("coeffs", None, e.to_string())
            }
            MonodromyError::Kernel(k) => CliError::numerical("roots", k),
            other => CliError::numerical("tracking", other),
        }
    }
}

impl From<TypicalityError> for CliError {
    fn from(e: TypicalityError) -> Self {
        match e {
            TypicalityError::Stage(s) => s.into(),
            TypicalityError::Kernel(k) => CliError::numerical("roots", k),
            TypicalityError::ConstantInput => CliError::input("expr", None, e.to_string()),
            other => CliError::input("input", None, other.to_string()),
        }
    }
}

fn split_tokens(text: &str) -> Vec<&str> {
    text.split(',').map(str::trim).collect()
}

/// Exact tokens; decimals are rejected.
pub fn parse_exact_list(field: &str, text: &str) -> Result<Vec<ExactComplex>, CliError> {
    split_tokens(text)
        .into_iter()
        .enumerate()
        .map(|(i, tok)| {
            if tok.contains('.') || tok.contains(['e', 'E']) {
                return Err(CliError::input(
                    field,
                    Some(i),
                    format!("`{tok}` is a decimal literal; exact subcommands take p/q tokens"),
                ));
            }
            tok.parse()
                .map_err(|e| CliError::input(field, Some(i), format!("`{tok}`: {e}")))
        })
        .collect()
}

/// Numeric tokens (constant expressions such as `1.5`, `2-0.5i`, `pi`); rational `p/q` tokens are rejected.
pub fn parse_numeric_list(field: &str, text: &str) -> Result<Vec<Complex64>, CliError> {
    split_tokens(text)
        .into_iter()
        .enumerate()
        .map(|(i, tok)| {
            if tok.contains('/') {
                return Err(CliError::input(
                    field,
                    Some(i),
                    format!("`{tok}` is an exact token; numeric subcommands take decimal or complex literals"),
                ));
            }
            let e = parse_expr(tok).map_err(|e| CliError::input(field, Some(i), format!("`{tok}`: {e}")))?;
            if !e.is_polynomial() || e.as_poly().and_then(|p| p.degree()).unwrap_or(0) > 0 {
                return Err(CliError::input(field, Some(i), format!("`{tok}` is not a constant")));
            }
            Ok(e.as_poly().map(|p| p.coeff(0)).unwrap_or_default())
        })
        .collect()
}

fn contour_config(g: &GlobalOpts) -> Result<ContourConfig, CliError> {
    let cfg = ContourConfig {
        radius: g.radius,
        nodes: g.quad_nodes,
        match_tol: g.tol,
        ..ContourConfig::default()
    };
    cfg.validate()
        .map_err(|e| CliError::input("config", None, e.to_string()))?;
    Ok(cfg)
}

fn strings<F: Field + ToString>(p: &Poly<F>) -> Vec<String> {
    p.coeffs().iter().map(ToString::to_string).collect()
}

fn execute(cli: &Cli) -> Result<(Value, i32), CliError> {
    let g = &cli.global;
    let ok = |v: Value| Ok((v, 0));
    match &cli.command {
        Command::Cvd { coeffs } => {
            let lower = parse_exact_list("coeffs", coeffs)?;
            let pipe =
                cvd_pipeline(&lower).map_err(|e| CliError::input("coeffs", None, e.to_string()))?;
            ok(json!({
                "m": lower.len(),
                "poly": strings(&pipe.poly),
                "critical_poly": strings(&pipe.critical_poly),
                "value_poly": strings(&pipe.value_poly),
                "cvd": pipe.cvd.to_string(),
                "cvd_exact": pipe.cvd,
                "is_zero": pipe.cvd.is_zero(),
            }))
        }
        Command::Variety { coeffs } => {
            let lower = parse_exact_list("coeffs", coeffs)?;
            let pipe =
                cvd_pipeline(&lower).map_err(|e| CliError::input("coeffs", None, e.to_string()))?;
            ok(json!({
                "m": lower.len(),
                "cvd": pipe.cvd.to_string(),
                "member": pipe.cvd.is_zero(),
            }))
        }
        Command::Monodromy { coeffs } => {
            let lower = parse_numeric_list("coeffs", coeffs)?;
            let p = Poly::monic_from_lower(&lower);
            ok(to_value(&monodromy_group(&p, g.order_cap)?))
        }
        Command::Radicals {
            coeffs,
            cross_check,
        } => {
            let lower = parse_exact_list("coeffs", coeffs)?;
            let report = radicals_verdict(&lower, cross_check.then_some(g.order_cap))?;
            ok(to_value(&report))
        }
        Command::Tcvd { expr } => {
            let f = parse_expr(expr).map_err(|e| CliError::input("expr", None, e.to_string()))?;
            let cfg = contour_config(g)?;
            let report = if g.strict_radius {
                truncated_cvd(&f, &cfg)?
            } else {
                truncated_cvd_nudged(&f, &cfg, false)?
            };
            ok(to_value(&report))
        }
        Command::Typical { expr } => {
            let f = parse_expr(expr).map_err(|e| CliError::input("expr", None, e.to_string()))?;
            let cfg = TypicalityConfig {
                strict_radius: g.strict_radius,
                contour: contour_config(g)?,
                ..TypicalityConfig::default()
            };
            ok(to_value(&typicality_probe(&f, &cfg)?))
        }
        Command::Theta {
            epsilon,
            m,
            samples,
        } => ok(to_value(&theta_bound(*epsilon, *m, *samples)?)),
        Command::Interp { points, values } => {
            let zs = parse_numeric_list("points", points)?;
            let ys = parse_numeric_list("values", values)?;
            let p = hermite_interpolant(&zs, &ys)?;
            let (rv, rd) = hermite_residuals(&p, &zs, &ys);
            ok(json!({
                "m": zs.len(),
                "degree": p.degree(),
                "poly": p,
                "max_value_residual": rv,
                "max_derivative_residual": rd,
            }))
        }
        Command::Split { coeffs, delta } => {
            let c = parse_numeric_list("coeffs", coeffs)?;
            let p = Poly::new(c);
            if p.is_zero() {
                return Err(CliError::input(
                    "coeffs",
                    None,
                    "the zero polynomial has no finite root set",
                ));
            }
            let out = split_zeros(&p, *delta)?;
            let mut v = to_value(&out);
            if !out.split {
                v["flag"] = json!("no_multiple_roots");
            }
            ok(v)
        }
        Command::Selftest { criterion } => {
            let results = match criterion {
                Some(id) => vec![run_criterion(*id, g.seed).ok_or_else(|| {
                    CliError::input("criterion", None, format!("no criterion {id}"))
                })?],
                None => run_all(g.seed),
            };
            let all_passed = results.iter().all(|r| r.passed());
            let lines: Vec<String> = results.iter().map(|r| r.line()).collect();
            let v = json!({
                "seed": g.seed,
                "all_passed": all_passed,
                "results": results,
                "lines": lines,
            });
            Ok((v, if all_passed { 0 } else { 2 }))
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn render(v: &Value, pretty: bool) -> String {
    let text = if pretty {
        serde_json::to_string_pretty(v)
    } else {
        serde_json::to_string(v)
    };
    text.unwrap_or_else(|e| format!("{{\"error\":{{\"kind\":\"internal\",\"message\":\"{e}\"}}}}"))
}

/// Parses `argv` (including the program name) and runs the subcommand.
/// Returns the exit code and the text for standard output.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => (0, e.to_string()),
                _ => {
                    let err = CliError {
                        kind: "input",
                        stage: "arguments".into(),
                        message: e.to_string().trim().to_string(),
                        field: None,
                        index: None,
                    };
                    (1, render(&json!({ "error": err }), false))
                }
            };
        }
    };
    match execute(&cli) {
        Ok((v, code)) => (code, render(&v, cli.global.pretty)),
        Err(err) => (
            err.exit_code(),
            render(&json!({ "error": err }), cli.global.pretty),
        ),
    }
}
