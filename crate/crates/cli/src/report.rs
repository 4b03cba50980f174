use std::io::Write;

use serde::Serialize;

use crate::config::{OutputFormat, RunConfig};

#[derive(Serialize, Clone)]
pub struct EnumItem {
    pub perm: String,
    pub cycles: usize,
}

#[derive(Serialize, Clone)]
pub struct PsncItem {
    pub perm: String,
    pub part: String,
    pub class: String,
}

#[derive(Serialize, Clone)]
pub struct CheckRow {
    pub check: String,
    pub params: String,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
    pub elapsed_ms: u128,
    pub seed: u64,
}

#[derive(Serialize)]
pub struct ValueReport {
    pub value: String,
    pub terms: u64,
    pub elapsed_ms: u128,
}

/// Every JSON report embeds the configuration that produced it.
#[derive(Serialize)]
pub struct Report<T: Serialize> {
    pub command: String,
    pub config: RunConfig,
    #[serde(flatten)]
    pub body: T,
}

pub fn emit_json<T: Serialize>(out: &mut dyn Write, report: &Report<T>) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, report)?;
    writeln!(out)
}

pub fn emit_csv<T: Serialize>(out: &mut dyn Write, rows: &[T]) -> std::io::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()
}

pub fn render_checks(
    out: &mut dyn Write,
    format: OutputFormat,
    command: &str,
    config: &RunConfig,
    checks: &[CheckRow],
) -> std::io::Result<()> {
    match format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                pass: bool,
                checks: &'a [CheckRow],
            }
            let report = Report {
                command: command.to_string(),
                config: config.clone(),
                body: Body { pass: checks.iter().all(|c| c.pass), checks },
            };
            emit_json(out, &report)
        }
        OutputFormat::Csv => emit_csv(out, checks),
        OutputFormat::Text => {
            for check in checks {
                writeln!(
                    out,
                    "{} {} [{}]: lhs={} rhs={} ({} ms)",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.check,
                    check.params,
                    check.lhs,
                    check.rhs,
                    check.elapsed_ms
                )?;
            }
            Ok(())
        }
    }
}
