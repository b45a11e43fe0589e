//! Command-line front end for calibrated-measurement mixture analysis.
//!
//! [`run`] is the whole program behind the `calmix` binary; [`evaluate`]
//! returns the report of a command line without rendering it.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod exec;
pub mod io;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::Cli;
pub use error::{CliError, CliResult};
pub use report::{Cell, Format, Report, Table};

use args::Command;
use commands::Ctx;
use config::{Resolver, RunConfig};

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Fit { .. } => "fit",
        Command::Density { .. } => "density",
        Command::Moments { .. } => "moments",
        Command::Region { .. } => "region",
        Command::PowerTable { .. } => "power-table",
        Command::Simulate { .. } => "simulate",
        Command::Diagnose { .. } => "diagnose",
        Command::Anova { .. } => "anova",
        Command::CaseStudy { .. } => "case-study",
    }
}

/// A finished run: the report, how to render it and the resolution log.
pub struct Outcome {
    pub report: Report,
    pub format: Format,
    pub precision: usize,
    pub output: Option<std::path::PathBuf>,
    pub log: Vec<String>,
}

pub fn execute(cli: &Cli) -> CliResult<Outcome> {
    let file = cli.config.as_deref().map(RunConfig::load).transpose()?;
    let mut ctx = Ctx {
        r: Resolver::new(file, command_name(&cli.command))?,
        precision: cli.precision as usize,
    };
    let format = ctx.r.format(cli.format);
    let output = ctx.r.output(cli.output.as_ref());
    let report = match &cli.command {
        Command::Fit {
            input,
            n,
            mu_z,
            sigma_z,
        } => commands::fit(&mut ctx, input.as_ref(), *n, *mu_z, *sigma_z),
        Command::Density {
            dist,
            law,
            params,
            mu_y0,
            from,
            to,
            points,
            quad,
        } => commands::density(
            &mut ctx, *dist, law, params, *mu_y0, *from, *to, *points, quad,
        ),
        Command::Moments {
            params,
            mu_y0,
            quad,
        } => commands::moments(&mut ctx, params, *mu_y0, quad),
        Command::Region {
            dist,
            coverage,
            interval,
            params,
            quad,
        } => commands::region(&mut ctx, *dist, *coverage, interval, params, quad),
        Command::PowerTable {
            nu,
            delta,
            lambda,
            alpha,
            quad,
        } => commands::power(&mut ctx, *nu, delta, lambda, *alpha, quad),
        Command::Simulate {
            params,
            mc,
            mu_y0,
            alpha,
            curve,
            raw,
            statistic,
            ks,
            ks_stride,
            quad,
        } => commands::simulate(
            &mut ctx,
            params,
            mc,
            *mu_y0,
            *alpha,
            curve,
            raw.as_deref(),
            *statistic,
            *ks,
            *ks_stride,
            quad,
        ),
        Command::Diagnose {
            input,
            column,
            blindness,
            params,
            mc,
        } => commands::diagnose_cmd(&mut ctx, input.as_ref(), column, *blindness, params, mc),
        Command::Anova {
            input,
            sizes,
            means,
            sds,
            alpha,
            params,
            quad,
        } => commands::anova(
            &mut ctx,
            input.as_ref(),
            sizes,
            means,
            sds,
            *alpha,
            params,
            quad,
        ),
        Command::CaseStudy {
            input,
            coverage,
            alpha,
            shift,
            quad,
        } => commands::case_study(&mut ctx, input.as_ref(), *coverage, *alpha, *shift, quad),
    }?;
    Ok(Outcome {
        report,
        format,
        precision: ctx.precision,
        output,
        log: ctx.r.log,
    })
}

/// Parses a command line and returns its report.
pub fn evaluate<I, T>(args: I) -> CliResult<Report>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::usage(e.to_string()))?;
    Ok(execute(&cli)?.report)
}

/// Runs a command line, writing the report to stdout or the output file
/// and diagnostics to stderr. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match execute(&cli).and_then(|o| emit(o, stdout, stderr)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "calmix: {e}");
            e.exit_code()
        }
    }
}

fn emit(o: Outcome, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    for line in &o.log {
        let _ = writeln!(stderr, "calmix: {line}");
    }
    let text = o.report.render(o.format, o.precision)?;
    match &o.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}
