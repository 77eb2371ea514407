use std::fmt;
use std::io::Write;
use std::path::Path;

use naecol_core::certificates::{self, CertificateReport};
use naecol_core::ensemble::{
    concentration_experiment, count_solutions, format_instance, partition_function, read_instance,
    sample_instance, sat_sweep, NaeInstance,
};
use naecol_core::first_moment::{gamma_rows, local_clt_estimate, ratio_scan, SAFE_HALF_WIDTH};
use naecol_core::hp::round_sci;
use naecol_core::interpolation::{default_lambda, default_spec, eta_cluster, functional_exact};
use naecol_core::thresholds::{asymptotic_gap_from, d_star, phi, table_one};
use naecol_core::{bp, Error, ModelParams};
use serde_json::Value;

use crate::output::{fmt_float, Cell, Table};
use crate::{Cli, Command, Format};

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    /// Bad input detected by the front end.
    Invalid(String),
    /// The computation ran but its outcome is a failure.
    Failed(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Invalid(s) | CliError::Failed(s) => f.write_str(s),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_validation() => 1,
            CliError::Invalid(_) => 1,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn write_out(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Failed(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Failed(format!("cannot write output: {e}")))
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn emit(cli: &Cli, table: &Table) -> CliResult<()> {
    match cli.format {
        Format::Csv => write_out(cli, &table.to_csv()),
        Format::Json => write_out(cli, &pretty(&table.to_json())),
    }
}

fn check_tol(tol: f64) -> CliResult<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(CliError::Invalid(format!("--tol must lie in (0, 1), got {tol}")))
    }
}

fn load(path: &Path) -> CliResult<NaeInstance> {
    read_instance(path).map_err(|e| match e {
        Error::Io(io) => CliError::Invalid(format!("cannot read {}: {io}", path.display())),
        e => CliError::Core(e),
    })
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Table { tol } => {
            check_tol(*tol)?;
            let mut t = Table::new(vec!["k", "d_star", "ceil_d_star", "d_1", "ceil_d_1", "d_lbd", "d_ubd"]);
            for r in table_one(*tol)? {
                t.push(vec![
                    r.k.into(),
                    r.d_star.into(),
                    r.ceil_d_star.into(),
                    r.d_first_moment.into(),
                    r.ceil_d1.into(),
                    r.window.d_lbd.into(),
                    r.window.d_ubd.into(),
                ]);
            }
            emit(cli, &t)
        }
        Command::Fixpoint { k, d, tol } => {
            check_tol(*tol)?;
            let fp = bp::solve_fixed_point(ModelParams::new(*k, *d)?, *tol)?;
            let mut t = Table::new(vec![
                "k", "d", "x", "residual", "bracket_lo", "bracket_hi", "max_derivative",
                "iterate_from_lo", "iterate_from_hi",
            ]);
            t.push(vec![
                (*k).into(),
                (*d).into(),
                fp.x.into(),
                fp.residual.into(),
                fp.bracket.0.into(),
                fp.bracket.1.into(),
                fp.max_derivative.into(),
                fp.iteration_witness.0.into(),
                fp.iteration_witness.1.into(),
            ]);
            emit(cli, &t)
        }
        Command::Phi { k, d, x, tol } => {
            check_tol(*tol)?;
            let params = ModelParams::new(*k, *d)?;
            let x = match x {
                Some(x) => *x,
                None => bp::solve_fixed_point(params, *tol)?.x,
            };
            let mut t = Table::new(vec!["k", "d", "x", "phi"]);
            t.push(vec![(*k).into(), (*d).into(), x.into(), phi(params, x)?.into()]);
            emit(cli, &t)
        }
        Command::Dstar { k, tol } => {
            check_tol(*tol)?;
            let r = d_star(*k, *tol)?;
            let changes: Vec<String> = r
                .sign_changes
                .iter()
                .map(|(a, b)| format!("{}:{}", fmt_float(*a), fmt_float(*b)))
                .collect();
            let mut t = Table::new(vec!["k", "d_star", "ceil_d_star", "d_1", "ceil_d_1", "gap_over_k", "sign_changes"]);
            t.push(vec![
                r.k.into(),
                r.d_star.into(),
                r.ceil_d_star.into(),
                r.d_first_moment.into(),
                r.ceil_d1.into(),
                asymptotic_gap_from(r.k, r.d_star).into(),
                changes.join(";").into(),
            ]);
            emit(cli, &t)
        }
        Command::Interp { k, d, betas, lambda, model, tol } => {
            check_tol(*tol)?;
            let params = ModelParams::new(*k, *d)?;
            if let Some(b) = betas.iter().find(|b| !(**b >= 0.0) || !b.is_finite()) {
                return Err(CliError::Invalid(format!("betas must be finite and >= 0, got {b}")));
            }
            let mut t = Table::new(vec!["beta", "lambda", "P", "P_over_sqrt_beta"]);
            for &beta in betas {
                let eta = eta_cluster(params, beta, *tol)?;
                let spec = default_spec((*model).into(), *k, beta)?;
                let lam = lambda.unwrap_or_else(|| default_lambda(beta));
                let p = functional_exact(params, &eta, &spec, lam)?;
                let scaled = (beta > 0.0).then(|| p / beta.sqrt());
                t.push(vec![beta.into(), lam.into(), p.into(), scaled.into()]);
            }
            emit(cli, &t)
        }
        Command::Firstmo { n, k, d, diagnostics, summary } => {
            let rows = gamma_rows(*n, *k, *d)?;
            let mut headers = vec!["n", "gamma", "binom", "p_gamma", "contribution"];
            if *diagnostics {
                headers.extend(["ones", "in_window", "local_clt"]);
            }
            let m = n * d / k;
            let mut t = Table::new(headers);
            for r in rows {
                let mut row: Vec<Cell> = vec![
                    r.n.into(),
                    r.gamma.to_string().into(),
                    r.binom.to_string().into(),
                    r.p_gamma.to_string().into(),
                    r.contribution.to_string().into(),
                ];
                if *diagnostics {
                    let g = r.ones as f64 / r.n as f64;
                    let clt = if (g - 0.5).abs() <= SAFE_HALF_WIDTH && g > 0.0 && g < 1.0 {
                        Some(local_clt_estimate(g, *k as u32, m, 1e-13)?)
                    } else {
                        None
                    };
                    row.extend([r.ones.into(), r.in_window.into(), clt.into()]);
                }
                t.push(row);
            }
            if let Some(path) = summary {
                let report = ratio_scan(*k, *d, &[*n])?.remove(0);
                let v = serde_json::to_value(&report).expect("report serializes");
                std::fs::write(path, pretty(&v))
                    .map_err(|e| CliError::Failed(format!("cannot write {}: {e}", path.display())))?;
            }
            emit(cli, &t)
        }
        Command::Gen { n, k, d, seed, model, simple, max_retries } => {
            let inst = sample_instance(*n, *k, *d, *seed, (*model).into(), *simple, *max_retries)?;
            match cli.format {
                Format::Csv => write_out(cli, &format_instance(&inst)),
                Format::Json => write_out(cli, &pretty(&serde_json::to_value(&inst).expect("instance serializes"))),
            }
        }
        Command::Solve { file } => {
            let inst = load(file)?;
            let count = count_solutions(&inst)?;
            let mut t = Table::new(vec!["n", "m", "k", "d", "model", "simple", "solutions"]);
            t.push(vec![
                inst.n.into(),
                inst.m.into(),
                inst.k.into(),
                inst.d.into(),
                inst.model.to_string().into(),
                inst.simple.into(),
                count.into(),
            ]);
            emit(cli, &t)
        }
        Command::Z { file, beta } => {
            let inst = load(file)?;
            let mut t = Table::new(vec!["beta", "log_z", "solution_count", "free_energy_per_var"]);
            for &b in beta {
                let s = partition_function(&inst, b)?;
                let count = s.solution_count.map_or(Cell::Empty, Cell::from);
                t.push(vec![b.into(), s.log_z.into(), count, s.free_energy_per_var.into()]);
            }
            emit(cli, &t)
        }
        Command::Sweep { k, n, ds, trials, seed, model } => {
            let rows = sat_sweep(*k, *n, ds, *trials, *seed, (*model).into())?;
            let mut t = Table::new(vec!["d", "trials", "satisfiable", "fraction"]);
            for r in rows {
                t.push(vec![r.d.into(), r.trials.into(), r.satisfiable.into(), r.fraction.into()]);
            }
            emit(cli, &t)
        }
        Command::Concentrate { ns, k, d, beta, samples, seed, model } => {
            if !(*beta >= 0.0) || !beta.is_finite() {
                return Err(CliError::Invalid(format!("--beta must be finite and >= 0, got {beta}")));
            }
            let rows = concentration_experiment(ns, *k, *d, *beta, *samples, *seed, (*model).into())?;
            let mut t = Table::new(vec!["n", "samples", "mean", "std", "std_error"]);
            for r in rows {
                t.push(vec![r.n.into(), r.samples.into(), r.mean.into(), r.std.into(), r.std_error.into()]);
            }
            emit(cli, &t)
        }
        Command::Certify { id, digits } => {
            let reports = match id {
                Some(id) => vec![certificates::evaluate(id, *digits)?],
                None => certificates::verify_all(*digits)?,
            };
            match cli.format {
                Format::Csv => emit(cli, &certificate_table(&reports))?,
                Format::Json => write_out(cli, &pretty(&serde_json::to_value(&reports).expect("reports serialize")))?,
            }
            let bad = reports.iter().filter(|r| !r.passed).count();
            if bad > 0 {
                return Err(CliError::Failed(format!("{bad} of {} checks did not pass", reports.len())));
            }
            Ok(())
        }
    }
}

fn shorten(s: &str, sig: usize) -> String {
    if s.contains('/') {
        s.to_string()
    } else {
        round_sci(s, sig)
    }
}

fn certificate_table(reports: &[CertificateReport]) -> Table {
    let mut t = Table::new(vec!["id", "computed", "bound", "relation", "margin", "status"]);
    for r in reports {
        let status = serde_json::to_value(r.status).expect("status serializes");
        t.push(vec![
            r.id.as_str().into(),
            shorten(&r.computed, 20).into(),
            r.claimed_bound.as_str().into(),
            r.relation.symbol().into(),
            shorten(&r.margin, 6).into(),
            status.as_str().unwrap_or("").into(),
        ]);
    }
    t
}
