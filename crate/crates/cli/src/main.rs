//! `lt4` - audits and certificates for the Lieb-Thirring constants on the
//! four-dimensional sphere and torus.
//!
//! Reports go to standard output (or `--out`) as canonical JSON or CSV.
//! Exit status: 0 when every audited verdict passes, 1 on an audit failure,
//! 2 on a usage error.

use clap::{Parser, Subcommand, ValueEnum};
use lt4_core::certificate::{
    self, certify, report_document, CertifyOptions, FamilyCheckRequest,
};
use lt4_core::report::Document;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lt4", version, about = "Certified numerics for the Lieb-Thirring constants on S^4 and T^4")]
struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Absolute tolerance for certified integrals.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print the shared constants and their identity audits.
    Constants,
    /// Exact shell sums and the lower bound for the sphere constant.
    SphereLower {
        /// Largest shell count M (sampled at 2..=100 and powers of ten).
        #[arg(long, default_value_t = 1_000_000)]
        shells: u64,
    },
    /// Grid audits behind the sphere upper bound.
    SphereUpperAudit {
        /// Upper end of the audited E grid (clipped at the sign crossover).
        #[arg(long = "e-max", default_value_t = 5.0)]
        e_max: f64,
        /// E grid step.
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Box families and the lower bound for the torus constant.
    TorusLower {
        /// Largest box side M.
        #[arg(long = "box", default_value_t = 20)]
        box_max: u64,
        /// Keep the constant mode in the family (violates the mean-zero
        /// hypothesis; the report flags it).
        #[arg(long)]
        include_zero_mode: bool,
    },
    /// Lattice-sum audits behind the torus upper bound.
    TorusAudit {
        /// Upper end of the audited nu grid.
        #[arg(long = "nu-max", default_value_t = 20.0)]
        nu_max: f64,
        /// nu grid step.
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        /// Shell table size.
        #[arg(long, default_value_t = 10_000)]
        shells: u64,
    },
    /// Evaluate the inequality on built-in or custom orthonormal families.
    FamilyCheck {
        /// Restrict the built-in suite to one manifold (sphere or torus).
        #[arg(long)]
        manifold: Option<String>,
        /// Run a single torus box family with this side.
        #[arg(long = "box")]
        box_m: Option<u64>,
        /// Keep the constant mode in box families.
        #[arg(long)]
        include_zero_mode: bool,
        /// Run a single sphere shell family with this M.
        #[arg(long)]
        shells: Option<u64>,
        /// Evaluate a custom trigonometric family from this file.
        #[arg(long)]
        family: Option<PathBuf>,
    },
    /// Run the full audit battery and emit the bounds certificate.
    Certify {
        #[arg(long = "e-max", default_value_t = 5.0)]
        e_max: f64,
        #[arg(long = "e-step", default_value_t = 0.01)]
        e_step: f64,
        #[arg(long = "nu-max", default_value_t = 20.0)]
        nu_max: f64,
        #[arg(long = "nu-step", default_value_t = 0.1)]
        nu_step: f64,
        #[arg(long, default_value_t = 10_000)]
        shells: u64,
        #[arg(long = "box", default_value_t = 20)]
        box_max: u64,
    },
}

fn emit(doc: &Document, format: Format, out: Option<&PathBuf>) -> anyhow::Result<()> {
    let text = match format {
        Format::Json => doc.to_json(),
        Format::Csv => doc.to_csv(),
    };
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let (doc, pass) = match cli.command {
        Command::Constants => certificate::constants_document(),
        Command::SphereLower { shells } => certificate::sphere_lower_document(shells)?,
        Command::SphereUpperAudit { e_max, step } => {
            certificate::sphere_upper_audit_document(e_max, step, cli.tol)?
        }
        Command::TorusLower { box_max, include_zero_mode } => {
            certificate::torus_lower_document(box_max, include_zero_mode)?
        }
        Command::TorusAudit { nu_max, step, shells } => {
            certificate::torus_audit_document(nu_max, step, shells)?
        }
        Command::FamilyCheck { manifold, box_m, include_zero_mode, shells, family } => {
            let family_text = match family {
                Some(path) => Some(std::fs::read_to_string(&path).map_err(|e| {
                    anyhow::anyhow!("cannot read family file {}: {e}", path.display())
                })?),
                None => None,
            };
            let req = FamilyCheckRequest {
                manifold,
                box_m,
                include_zero_mode,
                shells_m: shells,
                family_text,
            };
            certificate::family_check_document(&req)?
        }
        Command::Certify { e_max, e_step, nu_max, nu_step, shells, box_max } => {
            let opts = CertifyOptions {
                tol: cli.tol,
                e_max,
                e_step,
                nu_max,
                nu_step,
                shells,
                box_max,
                ..CertifyOptions::default()
            };
            let cert = certify(&opts)?;
            let doc = report_document(&cert, &opts);
            let pass = cert.all_pass();
            (doc, pass)
        }
    };
    emit(&doc, cli.format, cli.out.as_ref())?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            // Bad inputs (unreadable or malformed family files, invalid
            // options) are usage errors; failed numeric audits are not.
            let msg = err.to_string();
            eprintln!("error: {msg}");
            let usage = err.downcast_ref::<lt4_core::Error>().is_none_or(|e| {
                matches!(
                    e,
                    lt4_core::Error::Parse(_)
                        | lt4_core::Error::Validation(_)
                        | lt4_core::Error::Domain(_)
                        | lt4_core::Error::Range(_)
                )
            });
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
