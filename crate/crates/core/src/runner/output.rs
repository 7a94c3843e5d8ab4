//! Result rows and their CSV / JSON-lines encodings.

use std::io::Write;

use serde::Serialize;

use super::config::OutputFormat;
use crate::curve::Interval;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "experiment,p,d,i_lo,i_hi,j_lo,j_hi,stat,index,empirical,model,bound,ok,seed";

/// One measured statistic with its model value, bound and provenance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub p: u64,
    pub d: usize,
    pub i_lo: Option<u64>,
    pub i_hi: Option<u64>,
    pub j_lo: Option<u64>,
    pub j_hi: Option<u64>,
    pub stat: String,
    /// k or lambda, as text
    pub index: String,
    pub empirical: f64,
    pub model: Option<f64>,
    pub bound: Option<f64>,
    pub ok: Option<bool>,
    pub seed: u64,
}

/// Provenance shared by the rows of one experiment.
#[derive(Clone, Debug)]
pub struct RowContext {
    pub experiment: &'static str,
    pub p: u64,
    pub d: usize,
    pub i: Option<Interval>,
    pub j: Option<Interval>,
    pub seed: u64,
}

impl RowContext {
    pub fn row(&self, stat: &str, index: impl ToString, empirical: f64) -> ResultRow {
        ResultRow {
            experiment: self.experiment.to_string(),
            p: self.p,
            d: self.d,
            i_lo: self.i.map(Interval::lo),
            i_hi: self.i.map(Interval::hi),
            j_lo: self.j.map(Interval::lo),
            j_hi: self.j.map(Interval::hi),
            stat: stat.to_string(),
            index: index.to_string(),
            empirical,
            model: None,
            bound: None,
            ok: None,
            seed: self.seed,
        }
    }
}

impl ResultRow {
    pub fn model(mut self, model: f64) -> Self {
        self.model = Some(model);
        self
    }

    pub fn bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn ok(mut self, ok: bool) -> Self {
        self.ok = Some(ok);
        self
    }

    /// |empirical - model| <= bound
    pub fn within(self, model: f64, bound: f64) -> Self {
        let ok = (self.empirical - model).abs() <= bound;
        self.model(model).bound(bound).ok(ok)
    }
}

fn io_error(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

pub fn write_rows<W: Write>(rows: &[ResultRow], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_writer(out);
            if rows.is_empty() {
                writer
                    .write_record(CSV_HEADER.split(','))
                    .map_err(io_error)?;
            }
            for row in rows {
                writer.serialize(row).map_err(io_error)?;
            }
            writer.flush().map_err(io_error)
        }
        OutputFormat::Json => {
            let mut out = out;
            for row in rows {
                serde_json::to_writer(&mut out, row).map_err(io_error)?;
                out.write_all(b"\n").map_err(io_error)?;
            }
            out.flush().map_err(io_error)
        }
    }
}

pub fn render(rows: &[ResultRow], format: OutputFormat) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(rows, format, &mut buf)?;
    String::from_utf8(buf).map_err(io_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultRow {
        RowContext {
            experiment: "gaps",
            p: 7,
            d: 3,
            i: Some(Interval::new(0, 4).unwrap()),
            j: None,
            seed: 0,
        }
        .row("mu", 1, 0.25)
        .within(0.5, 0.1)
    }

    #[test]
    fn csv_header_is_stable() {
        let text = render(&[sample()], OutputFormat::Csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(
            lines.next(),
            Some("gaps,7,3,0,4,,,mu,1,0.25,0.5,0.1,false,0")
        );
        assert_eq!(render(&[], OutputFormat::Csv).unwrap().trim(), CSV_HEADER);
    }

    #[test]
    fn json_lines_mirror_fields() {
        let text = render(&[sample()], OutputFormat::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        let mut expected: Vec<&str> = CSV_HEADER.split(',').collect();
        expected.sort();
        let mut keys = keys;
        keys.sort();
        assert_eq!(keys, expected);
        assert_eq!(v["j_lo"], serde_json::Value::Null);
    }
}
