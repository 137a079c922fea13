//! CSV and JSON artifact writers.
//!
//! CSV follows RFC 4180 with `.` as decimal separator; floats are written in
//! shortest round-trip scientific notation. JSON documents are wrapped in an
//! envelope carrying a schema name and version.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema: String,
    pub schema_version: u32,
    pub data: T,
}

/// Full-precision scientific notation, e.g. `-4.0000000000000036e-1`.
pub fn format_float(x: f64) -> String {
    format!("{x:e}")
}

pub fn write_csv<I>(path: impl AsRef<Path>, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| format_float(x)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_strings<I>(path: impl AsRef<Path>, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a numeric CSV written by [`write_csv`]; returns header and rows.
pub fn read_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.trim().parse::<f64>().map_err(|e| {
                    invalid(
                        "csv",
                        format!("line {:?}: {e}", rec.position().map(|p| p.line())),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn write_json<T: Serialize + ?Sized>(
    path: impl AsRef<Path>,
    schema: &str,
    data: &T,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let env = Envelope {
        schema: schema.to_owned(),
        schema_version: SCHEMA_VERSION,
        data,
    };
    serde_json::to_writer_pretty(&mut w, &env)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>, schema: &str) -> Result<T> {
    let env: Envelope<T> = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    if env.schema != schema {
        return Err(invalid(
            "schema",
            format!("expected {schema}, found {}", env.schema),
        ));
    }
    if env.schema_version != SCHEMA_VERSION {
        return Err(invalid(
            "schema_version",
            format!("expected {SCHEMA_VERSION}, found {}", env.schema_version),
        ));
    }
    Ok(env.data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_csv() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        let rows = vec![vec![0.1, -1.0 / 3.0, 1e-300], vec![f64::MAX, 0.0, -2.5e17]];
        write_csv(&p, &["a", "b", "c"], rows.clone()).unwrap();
        let (h, back) = read_csv(&p).unwrap();
        assert_eq!(h, ["a", "b", "c"]);
        assert_eq!(back, rows);
    }

    #[test]
    fn csv_quotes_fields() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        write_csv_strings(
            &p,
            &["name", "note"],
            [vec!["a,b".into(), "say \"hi\"".into()]],
        )
        .unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "name,note\n\"a,b\",\"say \"\"hi\"\"\"\n");
    }

    #[test]
    fn json_schema_is_checked() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.json");
        write_json(&p, "demo", &vec![1.5, 2.5]).unwrap();
        let v: Vec<f64> = read_json(&p, "demo").unwrap();
        assert_eq!(v, [1.5, 2.5]);
        assert!(read_json::<Vec<f64>>(&p, "other").is_err());
    }
}
