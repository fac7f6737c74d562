//! Command-line front end: tabulates recurrence coefficients, polynomial
//! zeros, edge curves, densities, the external field, variational reports,
//! Toeplitz spectra and path simulations as CSV or JSON, and runs the
//! acceptance suite.
//!
//! Exit codes: 0 success, 2 argument/validation failure, 3 numerical
//! failure.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sqbessel::measures::{self, DensityGrid};
use sqbessel::model::{self, CoeffSource, FiniteParams, ScaledCoeffs, ScaledParams};
use sqbessel::polyzeros::{self, EmpiricalMeasure};
use sqbessel::sim::{self, SimConfig};
use sqbessel::symbol;
use sqbessel::{accept, equilibrium};

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "sqbessel", about = "Non-intersecting squared Bessel path toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone, Copy)]
struct ScaledArgs {
    /// Common start value a.
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Time t in (0, 1).
    #[arg(long, default_value_t = 0.2)]
    t: f64,
    /// Order growth rate p (alpha = p n).
    #[arg(long, default_value_t = 0.0)]
    p: f64,
}

impl ScaledArgs {
    fn params(&self) -> Result<ScaledParams, CliError> {
        ScaledParams::new(self.a, self.t, self.p).map_err(|e| CliError::validation(e.to_string()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Recurrence coefficient tables (finite, scaled or limit).
    Coeffs {
        #[command(flatten)]
        scaled: ScaledArgs,
        #[arg(long, value_enum, default_value_t = CoeffKind::Limit)]
        kind: CoeffKind,
        /// Bessel order for the finite table.
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// Horizon T for the finite table.
        #[arg(long, default_value_t = 1.0)]
        cap_t: f64,
        /// Matrix size n for the scaled table.
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Largest row index (finite/scaled) and s-grid size (limit).
        #[arg(long, default_value_t = 400)]
        grid: usize,
        /// Upper end of the s grid for the limit table.
        #[arg(long, default_value_t = 4.0)]
        s_max: f64,
    },
    /// Zeros of the degree-k scaled recurrence polynomial plus empirical CDF.
    Zeros {
        #[command(flatten)]
        scaled: ScaledArgs,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        k: usize,
    },
    /// Edge curves beta, gamma, eta over an s grid.
    Edges {
        #[command(flatten)]
        scaled: ScaledArgs,
        #[arg(long, default_value_t = 8.0)]
        s_max: f64,
        #[arg(long, default_value_t = 400)]
        grid: usize,
    },
    /// Density tables for the limit measures.
    Density {
        #[command(flatten)]
        scaled: ScaledArgs,
        #[arg(value_enum)]
        measure: MeasureKind,
        /// Ratio s for mu1/mu2.
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        /// Average ratio xi for nu1/nu2.
        #[arg(long, default_value_t = 1.0)]
        xi: f64,
        #[arg(long, default_value_t = 400)]
        grid: usize,
    },
    /// External field V: closed form and quadrature columns.
    Field {
        #[command(flatten)]
        scaled: ScaledArgs,
        #[arg(long, default_value_t = 400)]
        grid: usize,
        /// Upper end of the x grid (defaults to 2 gamma(1)).
        #[arg(long)]
        x_max: Option<f64>,
    },
    /// Variational condition reports at level mu (fixed s) and nu (averaged).
    Varcheck {
        #[command(flatten)]
        scaled: ScaledArgs,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 1.0)]
        xi: f64,
        /// Support points per condition.
        #[arg(long, default_value_t = 60)]
        grid: usize,
    },
    /// Eigenvalues of the n x n Toeplitz matrix with symbol A_s.
    Toeplitz {
        #[command(flatten)]
        scaled: ScaledArgs,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 128)]
        n: usize,
    },
    /// Simulate non-intersecting squared Bessel bridges (CSV rows
    /// replica,tau,path_index,position).
    Simulate {
        #[command(flatten)]
        scaled: ScaledArgs,
        #[arg(long, default_value_t = 50)]
        n: usize,
        /// Bessel order; defaults to round(p n).
        #[arg(long)]
        alpha: Option<usize>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        replicas: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Run the acceptance suite and print one pass/fail line per criterion.
    Accept,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoeffKind {
    Finite,
    Scaled,
    Limit,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureKind {
    Mu1,
    Mu2,
    Nu1,
    Nu2,
    Sigma,
    Mp,
}

struct CliError {
    message: String,
    exit: u8,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        Self { message: message.into(), exit: EXIT_VALIDATION }
    }
    fn numerical(message: impl Into<String>) -> Self {
        Self { message: message.into(), exit: EXIT_NUMERICAL }
    }
}

/// A rectangular table with fixed column order; serialises to CSV or JSON
/// with shortest round-trip floating point formatting in both.
#[derive(Serialize)]
struct Table {
    command: &'static str,
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
}

impl Table {
    fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Self { command, columns, rows: Vec::new(), meta: None }
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
                first = false;
            }
            out.push('\n');
        }
        out
    }
}

fn emit(table: &Table, format: Format, out: &Option<String>) -> Result<(), CliError> {
    let text = match format {
        Format::Csv => table.csv(),
        Format::Json => {
            serde_json::to_string_pretty(table).map_err(|e| CliError::numerical(e.to_string()))? + "\n"
        }
    };
    write_output(&text, out)
}

fn write_output(text: &str, out: &Option<String>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::validation(format!("cannot write {path}: {e}"))),
        None => {
            io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::numerical(e.to_string()))
        }
    }
}

fn grid_to_table(command: &'static str, grid: &DensityGrid, mass: f64) -> Table {
    let mut table = Table::new(command, vec!["x", "density", "cum_mass"]);
    for i in 0..grid.nodes.len() {
        table.rows.push(vec![grid.nodes[i], grid.density[i], grid.cum_mass[i]]);
    }
    table.meta = Some(serde_json::json!({
        "support": [grid.support.0, grid.support.1],
        "mass": mass,
        "tail_mass": grid.tail_mass,
    }));
    table
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Coeffs { scaled, kind, alpha, cap_t, n, grid, s_max } => {
            let mut table = Table::new("coeffs", vec!["index", "b", "c", "d"]);
            match kind {
                CoeffKind::Finite => {
                    let fp = FiniteParams::new(scaled.a, *alpha, scaled.t, *cap_t)
                        .map_err(|e| CliError::validation(e.to_string()))?;
                    for k in 0..=*grid {
                        let c = model::recurrence_coeffs_finite(&fp, k);
                        table.rows.push(vec![k as f64, c.b, c.c, c.d]);
                    }
                }
                CoeffKind::Scaled => {
                    let sp = scaled.params()?;
                    for k in 0..=*grid {
                        let c = model::recurrence_coeffs_scaled(&sp, k, *n)
                            .map_err(|e| CliError::validation(e.to_string()))?;
                        table.rows.push(vec![k as f64, c.b, c.c, c.d]);
                    }
                }
                CoeffKind::Limit => {
                    let sp = scaled.params()?;
                    table.columns = vec!["s", "b", "c", "d"];
                    for i in 0..=*grid {
                        let s = s_max * i as f64 / *grid as f64;
                        let c = model::limit_coeffs(&sp, s);
                        table.rows.push(vec![s, c.b, c.c, c.d]);
                    }
                }
            }
            emit(&table, cli.format, &cli.out)
        }

        Command::Zeros { scaled, n, k } => {
            let sp = scaled.params()?;
            if *k == 0 || *k > 2 * n.max(&1) * 2 {
                return Err(CliError::validation(format!("degree k = {k} out of range")));
            }
            let src = ScaledCoeffs::new(sp, *n).map_err(|e| CliError::validation(e.to_string()))?;
            let zs = polyzeros::zeros_interlaced(&src, *k).map_err(|e| CliError::numerical(e.to_string()))?;
            let emp = EmpiricalMeasure::from_zero_set(&zs);
            let mut table = Table::new("zeros", vec!["index", "zero", "ecdf"]);
            for (i, &z) in zs.zeros.iter().enumerate() {
                table.rows.push(vec![i as f64, z, (i as f64 + 1.0) / zs.zeros.len() as f64]);
            }
            let _ = emp;
            table.meta = Some(serde_json::json!({ "radius": zs.radius, "degree": zs.degree }));
            emit(&table, cli.format, &cli.out)
        }

        Command::Edges { scaled, s_max, grid } => {
            let sp = scaled.params()?;
            let mut table = Table::new("edges", vec!["s", "beta", "gamma", "eta"]);
            for i in 1..=*grid {
                let s = s_max * i as f64 / *grid as f64;
                let e = symbol::edge_curves(&sp, s).map_err(|e| CliError::numerical(e.to_string()))?;
                table.rows.push(vec![s, e.beta, e.gamma, e.eta]);
            }
            emit(&table, cli.format, &cli.out)
        }

        Command::Density { scaled, measure, s, xi, grid } => {
            let sp = scaled.params()?;
            let points = (*grid / 2).max(40);
            let built = match measure {
                MeasureKind::Mu1 => measures::grid_mu1(&sp, *s, points),
                MeasureKind::Mu2 => measures::grid_mu2(&sp, *s, points),
                MeasureKind::Nu1 => measures::grid_nu1(&sp, *xi, points),
                MeasureKind::Nu2 => measures::grid_nu2(&sp, *xi, points),
                MeasureKind::Sigma => {
                    let eta = symbol::edge_curves(&sp, 3.0_f64.max(2.0 * xi))
                        .map_err(|e| CliError::numerical(e.to_string()))?
                        .eta;
                    let lo = eta.min(measures::sigma_support_edge(&sp) - 4.0 * sp.a);
                    measures::grid_sigma(&sp, lo, points)
                }
                MeasureKind::Mp => measures::grid_mp(sp.t, sp.p, points),
            }
            .map_err(|e| CliError::numerical(e.to_string()))?;
            emit(&grid_to_table("density", &built, built.mass), cli.format, &cli.out)
        }

        Command::Field { scaled, grid, x_max } => {
            let sp = scaled.params()?;
            let hi = match x_max {
                Some(v) if *v > 0.0 => *v,
                Some(v) => return Err(CliError::validation(format!("x_max must be positive, got {v}"))),
                None => {
                    2.0 * symbol::edge_curves(&sp, 1.0)
                        .map_err(|e| CliError::numerical(e.to_string()))?
                        .gamma
                }
            };
            let mut table = Table::new("field", vec!["x", "v_closed", "v_numeric"]);
            for i in 1..=*grid {
                let x = hi * i as f64 / *grid as f64;
                let clo = measures::v_closed(&sp, x).map_err(|e| CliError::numerical(e.to_string()))?;
                let num = measures::v_numeric(&sp, x).map_err(|e| CliError::numerical(e.to_string()))?;
                table.rows.push(vec![x, clo, num]);
            }
            emit(&table, cli.format, &cli.out)
        }

        Command::Varcheck { scaled, s, xi, grid } => {
            let sp = scaled.params()?;
            let mu = equilibrium::check_variational_mu(&sp, *s, *grid)
                .map_err(|e| CliError::numerical(e.to_string()))?;
            let nu = equilibrium::check_variational_nu(&sp, *xi, *grid)
                .map_err(|e| CliError::numerical(e.to_string()))?;
            #[derive(Serialize)]
            struct VarOut<'a> {
                command: &'static str,
                mu: &'a equilibrium::MuVariationalReport,
                nu: &'a equilibrium::NuVariationalReport,
            }
            let text = match cli.format {
                Format::Json => {
                    serde_json::to_string_pretty(&VarOut { command: "varcheck", mu: &mu, nu: &nu })
                        .map_err(|e| CliError::numerical(e.to_string()))?
                        + "\n"
                }
                Format::Csv => {
                    let mut out = String::from("level,condition,ell,max_equality_residual,min_inequality_margin\n");
                    for (level, cond, rep) in [
                        ("mu", 1, &mu.cond1),
                        ("mu", 2, &mu.cond2),
                        ("nu", 1, &nu.cond1),
                        ("nu", 2, &nu.cond2),
                    ] {
                        let _ = writeln!(
                            out,
                            "{level},{cond},{},{},{}",
                            rep.ell, rep.max_equality_residual, rep.min_inequality_margin
                        );
                    }
                    let _ = writeln!(out, "# constraint_active = {}", nu.constraint_active);
                    let _ = writeln!(out, "# mu extended residual = {}", mu.max_extended_residual);
                    out
                }
            };
            write_output(&text, &cli.out)
        }

        Command::Toeplitz { scaled, s, n } => {
            let sp = scaled.params()?;
            if *n == 0 || *n > 512 {
                return Err(CliError::validation(format!("matrix size n = {n} out of range [1, 512]")));
            }
            let spec = polyzeros::toeplitz_spectrum(&sp, *s, *n)
                .map_err(|e| CliError::numerical(e.to_string()))?;
            let mut table = Table::new("toeplitz", vec!["index", "re", "im"]);
            for (i, z) in spec.iter().enumerate() {
                table.rows.push(vec![i as f64, z.re, z.im]);
            }
            emit(&table, cli.format, &cli.out)
        }

        Command::Simulate { scaled, n, alpha, steps, replicas, seed } => {
            let sp = scaled.params()?;
            if !(sp.a > 0.0) {
                return Err(CliError::validation("simulation needs a > 0".into()));
            }
            let alpha = alpha.unwrap_or(sp.alpha_for(*n) as usize);
            let cfg = SimConfig::new(*steps, *seed, *replicas)
                .map_err(|e| CliError::validation(e.to_string()))?;
            let ensembles =
                sim::simulate(*n, alpha, sp.a, &cfg).map_err(|e| CliError::numerical(e.to_string()))?;
            match cli.format {
                Format::Csv => {
                    let mut buf: Vec<u8> = Vec::new();
                    for (r, e) in ensembles.iter().enumerate() {
                        e.write_csv(&mut buf, r, r == 0).map_err(|e| CliError::numerical(e.to_string()))?;
                    }
                    write_output(
                        &String::from_utf8(buf).map_err(|e| CliError::numerical(e.to_string()))?,
                        &cli.out,
                    )
                }
                Format::Json => {
                    #[derive(Serialize)]
                    struct SimOut<'a> {
                        command: &'static str,
                        config: &'a SimConfig,
                        ensembles: &'a [sim::PathEnsemble],
                    }
                    let text = serde_json::to_string_pretty(&SimOut {
                        command: "simulate",
                        config: &cfg,
                        ensembles: &ensembles,
                    })
                    .map_err(|e| CliError::numerical(e.to_string()))?
                        + "\n";
                    write_output(&text, &cli.out)
                }
            }
        }

        Command::Accept => {
            let outcomes = accept::run_all();
            match cli.format {
                Format::Json => {
                    let text = serde_json::to_string_pretty(&outcomes)
                        .map_err(|e| CliError::numerical(e.to_string()))?
                        + "\n";
                    write_output(&text, &cli.out)?;
                }
                Format::Csv => {
                    let mut out = String::new();
                    for o in &outcomes {
                        let _ = writeln!(
                            out,
                            "[{}] criterion {:>2}: {} ({:.1}s) - {}",
                            if o.passed { "PASS" } else { "FAIL" },
                            o.id,
                            o.name,
                            o.seconds,
                            o.detail
                        );
                    }
                    let all = outcomes.iter().all(|o| o.passed);
                    let _ = writeln!(out, "{}/{} criteria passed", outcomes.iter().filter(|o| o.passed).count(), outcomes.len());
                    write_output(&out, &cli.out)?;
                    if !all {
                        return Err(CliError::numerical("acceptance criteria failed".to_string()));
                    }
                }
            }
            if outcomes.iter().any(|o| !o.passed) {
                return Err(CliError::numerical("acceptance criteria failed".to_string()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if cli.format == Format::Json {
                let record = serde_json::json!({ "error": { "message": e.message, "exit": e.exit } });
                eprintln!("{record}");
            } else {
                eprintln!("error: {}", e.message);
            }
            ExitCode::from(e.exit)
        }
    }
}
