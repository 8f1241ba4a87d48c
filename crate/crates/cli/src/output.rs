use std::collections::BTreeMap;
use std::io::{self, Write};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use betawalk_core::PiRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Violated,
}

impl Status {
    pub fn from_ok(ok: bool) -> Self {
        if ok {
            Status::Ok
        } else {
            Status::Violated
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Violated => "violated",
        }
    }
}

/// One line of output: a JSON record plus its flat CSV/plain rendering.
pub struct Record {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub status: Status,
    pub payload: Value,
    pub columns: Vec<(&'static str, String)>,
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    command: &'a str,
    parameters: &'a BTreeMap<String, String>,
    status: Status,
    payload: &'a Value,
}

impl Record {
    pub fn new<P: Serialize>(
        command: &str,
        parameters: BTreeMap<String, String>,
        status: Status,
        payload: &P,
        columns: Vec<(&'static str, String)>,
    ) -> Self {
        Record {
            command: command.to_string(),
            parameters,
            status,
            payload: serde_json::to_value(payload).expect("payload serializes"),
            columns,
        }
    }
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("elapsedSeconds");
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

pub fn emit(records: &mut [Record], format: Format, timing: bool) -> io::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut table = csv::Writer::from_writer(io::stdout());
    for (i, rec) in records.iter_mut().enumerate() {
        if !timing {
            strip_timing(&mut rec.payload);
        }
        match format {
            Format::Json => {
                let line = serde_json::to_string(&JsonRecord {
                    command: &rec.command,
                    parameters: &rec.parameters,
                    status: rec.status,
                    payload: &rec.payload,
                })
                .expect("record serializes");
                writeln!(out, "{line}")?;
            }
            Format::Csv => {
                if i == 0 {
                    let header = ["command", "status"]
                        .into_iter()
                        .chain(rec.columns.iter().map(|(k, _)| *k));
                    table.write_record(header)?;
                }
                let row = [rec.command.as_str(), rec.status.as_str()]
                    .into_iter()
                    .chain(rec.columns.iter().map(|(_, v)| v.as_str()));
                table.write_record(row)?;
            }
            Format::Plain => {
                let fields: Vec<String> = rec
                    .columns
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                writeln!(out, "{} [{}] {}", rec.command, rec.status.as_str(), fields.join(" "))?;
            }
        }
    }
    table.flush()?;
    out.flush()
}

/// ASCII rendering of an exact value, `a/b` or `a/b*sqrt(pi)^e`.
pub fn pi_rational(v: &PiRational) -> String {
    let c = betawalk_core::rational_string(v.coeff());
    match v.half_pi_pow() {
        0 => c,
        e => format!("{c}*sqrt(pi)^{e}"),
    }
}
