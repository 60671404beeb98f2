//! Trace files: a CSV of samples (`time,<channel>,...`, outputs then inputs)
//! plus a JSON sidecar with the signal space, parameters and duration.
//!
//! Values are written with 17 significant digits so a write/read cycle is
//! bit-exact.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Sample, SignalSpace, Trace, TraceError};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceMeta {
    pub space: SignalSpace,
    pub params: BTreeMap<String, f64>,
    pub duration: f64,
}

/// `run/best.csv` -> `run/best.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Decimal form with 17 significant digits.
pub fn fmt_exact(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".to_owned()
    } else if v > 0.0 {
        "inf".to_owned()
    } else {
        "-inf".to_owned()
    }
}

pub fn write_samples<W: Write>(tr: &Trace, out: W) -> Result<(), TraceError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["time".to_owned()];
    header.extend(tr.space.channels().map(str::to_owned));
    w.write_record(&header)?;
    for s in &tr.samples {
        let mut rec = Vec::with_capacity(s.values.len() + 1);
        rec.push(fmt_exact(s.time));
        rec.extend(s.values.iter().map(|v| fmt_exact(*v)));
        w.write_record(&rec)?;
    }
    w.flush().map_err(TraceError::Io)?;
    Ok(())
}

pub fn read_samples<R: Read>(space: &SignalSpace, input: R) -> Result<Vec<Sample>, TraceError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let mut expected = vec!["time".to_owned()];
    expected.extend(space.channels().map(str::to_owned));
    if header != expected {
        return Err(TraceError::Header {
            expected: expected.join(","),
            found: header.join(","),
        });
    }
    let mut samples = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        // Row numbers count the header as row 1.
        let row = k + 2;
        let rec = rec.map_err(|e| TraceError::Row {
            row,
            message: e.to_string(),
        })?;
        if rec.len() != expected.len() {
            return Err(TraceError::Row {
                row,
                message: format!("expected {} fields, found {}", expected.len(), rec.len()),
            });
        }
        let mut nums = Vec::with_capacity(rec.len());
        for (col, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| TraceError::Row {
                row,
                message: format!("column `{}`: `{field}` is not a number", expected[col]),
            })?;
            nums.push(v);
        }
        samples.push(Sample {
            time: nums[0],
            values: nums[1..].to_vec(),
        });
    }
    Ok(samples)
}

/// Writes `csv_path` and its JSON sidecar.
pub fn write_trace(tr: &Trace, csv_path: &Path) -> Result<(), TraceError> {
    write_samples(tr, File::create(csv_path)?)?;
    let meta = TraceMeta {
        space: tr.space.clone(),
        params: tr.params.clone(),
        duration: tr.duration,
    };
    let mut f = File::create(sidecar_path(csv_path))?;
    serde_json::to_writer_pretty(&mut f, &meta)?;
    f.write_all(b"\n")?;
    Ok(())
}

/// Reads a trace and its sidecar, then validates it. Without a sidecar every
/// column after `time` is an output and the duration is the last timestamp.
pub fn read_trace(csv_path: &Path) -> Result<Trace, TraceError> {
    let sidecar = sidecar_path(csv_path);
    let tr = if sidecar.exists() {
        let meta: TraceMeta = serde_json::from_reader(File::open(sidecar)?)?;
        let samples = read_samples(&meta.space, File::open(csv_path)?)?;
        Trace {
            space: meta.space,
            samples,
            params: meta.params,
            duration: meta.duration,
        }
    } else {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(File::open(csv_path)?);
        let header = rdr.headers()?.clone();
        let space = SignalSpace::new(header.iter().skip(1), [], []);
        let samples = read_samples(&space, File::open(csv_path)?)?;
        Trace::new(space, samples, BTreeMap::new())
    };
    tr.ensure_valid()?;
    Ok(tr)
}
