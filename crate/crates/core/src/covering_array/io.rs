use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::spec::{DomainKind, MixedStrengthSpec, ParameterDomain};
use super::{verify_coverage, CaError, CoverageReport, CoveringArray};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaSidecar {
    pub spec: MixedStrengthSpec,
    pub coverage: CoverageReport,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes the rows as level values under a header of parameter names, plus
/// a JSON sidecar holding the spec and coverage report.
pub fn write_ca(ca: &CoveringArray, path: &Path) -> Result<CoverageReport, CaError> {
    let report = verify_coverage(ca)?;
    let levels: Vec<Vec<String>> = ca
        .spec
        .domains
        .iter()
        .map(|d| d.levels().iter().map(ToString::to_string).collect())
        .collect();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(ca.spec.domains.iter().map(|d| d.name.as_str()))?;
    for row in &ca.rows {
        w.write_record(row.iter().enumerate().map(|(p, &l)| levels[p][l].as_str()))?;
    }
    w.flush()?;
    let sidecar = CaSidecar {
        spec: ca.spec.clone(),
        coverage: report.clone(),
    };
    serde_json::to_writer_pretty(BufWriter::new(File::create(sidecar_path(path))?), &sidecar)?;
    Ok(report)
}

/// Reads a CSV written by [`write_ca`], taking the spec from its sidecar.
pub fn read_ca(path: &Path) -> Result<CoveringArray, CaError> {
    let sidecar: CaSidecar =
        serde_json::from_reader(BufReader::new(File::open(sidecar_path(path))?))?;
    read_ca_with_spec(path, &sidecar.spec)
}

pub fn read_ca_with_spec(path: &Path, spec: &MixedStrengthSpec) -> Result<CoveringArray, CaError> {
    spec.validate()?;
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    let expected: Vec<String> = spec.domains.iter().map(|d| d.name.clone()).collect();
    if header != expected {
        return Err(CaError::Header {
            expected: expected.join(","),
            found: header.join(","),
        });
    }
    let mut rows = Vec::new();
    for (r_idx, record) in r.records().enumerate() {
        let record = record?;
        if record.len() != spec.domains.len() {
            return Err(CaError::RowWidth {
                row: r_idx,
                expected: spec.domains.len(),
                found: record.len(),
            });
        }
        let row = record
            .iter()
            .zip(&spec.domains)
            .map(|(cell, d)| {
                level_of(d, cell.trim()).ok_or_else(|| CaError::LevelOutOfDomain {
                    row: r_idx,
                    param: d.name.clone(),
                    value: cell.to_owned(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(CoveringArray {
        spec: spec.clone(),
        rows,
    })
}

fn level_of(d: &ParameterDomain, cell: &str) -> Option<usize> {
    match &d.kind {
        DomainKind::Discrete { values } => values.iter().position(|v| v == cell),
        DomainKind::Continuous { .. } => {
            let x: f64 = cell.parse().ok()?;
            d.levels().iter().position(|l| {
                let v = l.as_f64().unwrap_or(f64::NAN);
                (v - x).abs() <= 1e-9 * v.abs().max(1.0)
            })
        }
    }
}
