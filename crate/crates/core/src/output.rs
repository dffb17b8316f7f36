//! CSV and JSON writers. Floats in CSV use `{:.16e}` so files round-trip
//! exactly; every file is written to a temporary name and renamed.

use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::{ExperimentConfig, ReconstructionResult, SweepTable, SCHEMA_VERSION};
use crate::forward::NearFieldData;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Writes `bytes` to `path` via a sibling temporary file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

/// `j,k,m,theta,re_u,im_u[,re_du,im_du]` with one-based `j` and `m`.
pub fn data_csv(data: &NearFieldData) -> Result<Vec<u8>> {
    let with_du = data.neumann.is_some();
    let mut header = vec!["j", "k", "m", "theta", "re_u", "im_u"];
    if with_du {
        header.extend(["re_du", "im_du"]);
    }
    let grid = &data.grid;
    let rows = grid.wavenumbers.iter().enumerate().flat_map(move |(j, &k)| {
        (0..grid.angles).map(move |m| {
            let u = data.dirichlet[j][m];
            let mut row =
                vec![(j + 1).to_string(), num(k), (m + 1).to_string(), num(grid.theta(m)), num(u.re), num(u.im)];
            if let Some(du) = &data.neumann {
                row.push(num(du[j][m].re));
                row.push(num(du[j][m].im));
            }
            row
        })
    });
    csv_bytes(&header, rows)
}

/// `x1,f_exact,re_f_rec,im_f_rec`.
pub fn reconstruction_csv(result: &ReconstructionResult) -> Result<Vec<u8>> {
    let p = &result.profile;
    let rows = (0..p.x1.len()).map(|i| vec![num(p.x1[i]), num(p.exact[i]), num(p.recon[i].re), num(p.recon[i].im)]);
    csv_bytes(&["x1", "f_exact", "re_f_rec", "im_f_rec"], rows)
}

/// Per-cell rows: `delta,seed,truncation,k,status,relative_l2_error`.
pub fn sweep_rows_csv(table: &SweepTable) -> Result<Vec<u8>> {
    let rows = table.rows.iter().map(|r| {
        vec![
            num(r.delta),
            r.seed.to_string(),
            r.truncation.to_string(),
            num(r.k),
            status_name(&r.status),
            opt(r.relative_l2_error),
        ]
    });
    csv_bytes(&["delta", "seed", "truncation", "k", "status", "relative_l2_error"], rows)
}

/// Per-level means: `delta,truncation,k,mean_error,successes,failures`.
pub fn sweep_means_csv(table: &SweepTable) -> Result<Vec<u8>> {
    let rows = table.means.iter().map(|m| {
        vec![
            num(m.delta),
            m.truncation.to_string(),
            num(m.k),
            opt(m.mean_error),
            m.successes.to_string(),
            m.failures.to_string(),
        ]
    });
    csv_bytes(&["delta", "truncation", "k", "mean_error", "successes", "failures"], rows)
}

fn status_name<T: Serialize>(s: &T) -> String {
    serde_json::to_value(s).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

#[derive(Serialize)]
struct Summary<'a, T: Serialize> {
    schema_version: u32,
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    body: T,
}

/// JSON summary: schema version, the config echo and `body`'s fields.
pub fn summary_json<T: Serialize>(cfg: &ExperimentConfig, body: T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(&Summary { schema_version: SCHEMA_VERSION, config: cfg, body })?;
    out.push(b'\n');
    Ok(out)
}

#[derive(Serialize)]
struct RunBody<'a> {
    results: &'a [ReconstructionResult],
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    notes: &'a [String],
}

/// Writes `data.csv`, one `reconstruction_NNN.csv` per result that has a
/// sampled profile, and `summary.json`. Returns the written paths.
pub fn write_run(
    dir: &Path,
    cfg: &ExperimentConfig,
    data: &NearFieldData,
    results: &[ReconstructionResult],
) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    let p = dir.join("data.csv");
    write_atomic(&p, &data_csv(data)?)?;
    paths.push(p);
    for (i, r) in results.iter().enumerate() {
        if r.profile.x1.is_empty() {
            continue;
        }
        let p = dir.join(format!("reconstruction_{:03}.csv", i + 1));
        write_atomic(&p, &reconstruction_csv(r)?)?;
        paths.push(p);
    }
    let p = dir.join("summary.json");
    write_atomic(&p, &summary_json(cfg, RunBody { results, notes: &data.notes })?)?;
    paths.push(p);
    Ok(paths)
}

/// Writes `sweep_rows.csv`, `sweep_means.csv` and `summary.json`.
pub fn write_sweep(dir: &Path, cfg: &ExperimentConfig, table: &SweepTable) -> Result<Vec<PathBuf>> {
    let files = [
        (dir.join("sweep_rows.csv"), sweep_rows_csv(table)?),
        (dir.join("sweep_means.csv"), sweep_means_csv(table)?),
        (dir.join("summary.json"), summary_json(cfg, table)?),
    ];
    let mut paths = Vec::new();
    for (p, bytes) in files {
        write_atomic(&p, &bytes)?;
        paths.push(p);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{Method, SampledProfile, Status};
    use crate::forward::MeasurementGrid;
    use crate::sources::{ProfileId, SourceSpec};
    use num_complex::Complex64;

    #[test]
    fn data_csv_layout_and_round_trip() {
        let grid = MeasurementGrid::new(crate::forward::DEFAULT_CENTER, 1.5, 4, vec![0.5]).unwrap();
        let u = vec![vec![Complex64::new(0.1, -1.0 / 3.0); 4]];
        let data = NearFieldData::from_dirichlet(grid, u).unwrap();
        let text = String::from_utf8(data_csv(&data).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("j,k,m,theta,re_u,im_u"));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0], "1");
        assert_eq!(first[2], "1");
        assert_eq!(first[5].parse::<f64>().unwrap(), -1.0 / 3.0);
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn atomic_write_leaves_no_temporary() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested").join("a.json");
        write_atomic(&path, b"{}").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"{}");
        assert_eq!(fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn failure_records_have_no_numbers() {
        let r = ReconstructionResult {
            method: Method::Ft,
            k: 2.0,
            k_index: None,
            truncation: 1,
            delta: 0.0,
            seed: 0,
            status: Status::Degenerate,
            relative_l2_error: None,
            message: Some("all modes degenerate".into()),
            degenerate_modes: vec![-1, 0, 1],
            diagnostics: vec![],
            profile: SampledProfile::default(),
        };
        let cfg = ExperimentConfig::new(Method::Ft, SourceSpec::catalog(ProfileId::F2));
        let json = String::from_utf8(summary_json(&cfg, RunBody { results: &[r], notes: &[] }).unwrap()).unwrap();
        assert!(json.contains("\"status\": \"degenerate\""));
        assert!(!json.contains("relative_l2_error"));
        assert!(!json.to_lowercase().contains("nan"));
        assert!(json.contains("\"schema_version\": 1"));
    }
}
