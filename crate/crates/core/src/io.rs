//! File formats: CSV tables for data and chains, JSON for configs,
//! summaries and manifests. Floats are written with 17 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::Family;
use crate::mcmc::TraceRow;
use crate::observation::{MeasurementConfig, ObservationSet};
use crate::stats::Histogram;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Writes `lines` joined by newlines, each followed by one.
fn write_lines(path: &Path, lines: impl IntoIterator<Item = String>) -> Result<()> {
    let mut w = create(path)?;
    for line in lines {
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn parse_error(path: &Path, line: u64, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line: line as usize,
        msg: msg.into(),
    }
}

/// Header plus records, each record tagged with its 1-based line number.
type Records = (Vec<String>, Vec<(u64, csv::StringRecord)>);

fn read_records(path: &Path) -> Result<Records> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let header = rdr
        .headers()
        .map_err(|e| parse_error(path, 1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        rows.push((line, rec));
    }
    Ok((header, rows))
}

fn expect_header(path: &Path, got: &[String], want: &[&str]) -> Result<()> {
    if got.len() != want.len() || got.iter().zip(want).any(|(a, b)| a != b) {
        return Err(parse_error(
            path,
            1,
            format!("expected header `{}`, found `{}`", want.join(","), got.join(",")),
        ));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(path: &Path, line: u64, rec: &csv::StringRecord, i: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = rec
        .get(i)
        .ok_or_else(|| parse_error(path, line, format!("missing column {}", i + 1)))?;
    raw.parse()
        .map_err(|e| parse_error(path, line, format!("column {}: `{raw}`: {e}", i + 1)))
}

/// Rows `m,l,v1,v2,...` over an `M x L` grid, `l` outer; indices are 1-based.
fn write_grid(path: &Path, names: &[&str], mats: &[&DMatrix<f64>]) -> Result<()> {
    let (rows, cols) = mats[0].shape();
    let header = std::iter::once(format!("m,l,{}", names.join(",")));
    let body = (0..cols).flat_map(move |l| {
        (0..rows).map(move |m| {
            let vals: Vec<String> = mats.iter().map(|a| fmt_f64(a[(m, l)])).collect();
            format!("{},{},{}", m + 1, l + 1, vals.join(","))
        })
    });
    write_lines(path, header.chain(body))
}

fn read_grid(path: &Path, names: &[&str], rows: usize, cols: usize) -> Result<Vec<DMatrix<f64>>> {
    let (header, recs) = read_records(path)?;
    let mut want = vec!["m", "l"];
    want.extend_from_slice(names);
    expect_header(path, &header, &want)?;
    let mut out = vec![DMatrix::from_element(rows, cols, f64::NAN); names.len()];
    let mut seen = DMatrix::from_element(rows, cols, false);
    for (line, rec) in &recs {
        let m: usize = field(path, *line, rec, 0)?;
        let l: usize = field(path, *line, rec, 1)?;
        if !(1..=rows).contains(&m) || !(1..=cols).contains(&l) {
            return Err(parse_error(path, *line, format!("index ({m}, {l}) outside {rows}x{cols}")));
        }
        if seen[(m - 1, l - 1)] {
            return Err(parse_error(path, *line, format!("duplicate entry ({m}, {l})")));
        }
        seen[(m - 1, l - 1)] = true;
        for (k, mat) in out.iter_mut().enumerate() {
            mat[(m - 1, l - 1)] = field(path, *line, rec, k + 2)?;
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        let (m, l) = (i % rows + 1, i / rows + 1);
        return Err(parse_error(
            path,
            recs.last().map_or(1, |r| r.0),
            format!("missing entry ({m}, {l})"),
        ));
    }
    Ok(out)
}

/// Everything about an observation file that the CSV does not carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationMeta {
    pub config: MeasurementConfig,
    pub sigma_eta: f64,
    /// `ideal`, `sampled` or `replicated`.
    pub noise: String,
    pub seed: Option<u64>,
}

/// JSON file stored next to an observation CSV.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes `m,l,y,sigma` rows and the JSON sidecar.
pub fn write_observations(path: &Path, obs: &ObservationSet, noise: &str, seed: Option<u64>) -> Result<()> {
    write_grid(path, &["y", "sigma"], &[&obs.y, &obs.sigma])?;
    let meta = ObservationMeta {
        config: obs.config,
        sigma_eta: obs.sigma_eta,
        noise: noise.to_string(),
        seed,
    };
    write_json(&sidecar_path(path), &meta)
}

pub fn read_observations(path: &Path) -> Result<(ObservationSet, ObservationMeta)> {
    let meta: ObservationMeta = read_json(&sidecar_path(path))?;
    meta.config.validate()?;
    let mut mats = read_grid(path, &["y", "sigma"], meta.config.m, meta.config.l)?;
    let sigma = mats.pop().expect("two columns");
    let y = mats.pop().expect("two columns");
    let obs = ObservationSet {
        config: meta.config,
        sigma_eta: meta.sigma_eta,
        y,
        sigma,
    };
    Ok((obs, meta))
}

/// Noise-free data `|u(x_m; d_0, d_l)|` as `m,l,value` rows.
pub fn write_truth(path: &Path, truth: &DMatrix<f64>) -> Result<()> {
    write_grid(path, &["value"], &[truth])
}

pub fn read_truth(path: &Path, config: &MeasurementConfig) -> Result<DMatrix<f64>> {
    Ok(read_grid(path, &["value"], config.m, config.l)?.remove(0))
}

/// One state per row under a header of component names.
pub fn write_chain(path: &Path, family: Family, states: &[Vec<f64>]) -> Result<()> {
    let dim = family.dim();
    if states.iter().any(|s| s.len() != dim) {
        return Err(Error::Dimension(format!("{family} chain rows need {dim} components")));
    }
    let header = std::iter::once(family.component_names().join(","));
    let body = states
        .iter()
        .map(|s| s.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(","));
    write_lines(path, header.chain(body))
}

/// Reads a chain CSV, inferring the family from its header.
pub fn read_chain(path: &Path) -> Result<(Family, Vec<Vec<f64>>)> {
    let (header, recs) = read_records(path)?;
    let family = [Family::Disk, Family::Crack, Family::Kite]
        .into_iter()
        .find(|f| f.component_names().iter().eq(header.iter()))
        .ok_or_else(|| parse_error(path, 1, format!("unrecognized chain header `{}`", header.join(","))))?;
    let states = recs
        .iter()
        .map(|(line, rec)| {
            if rec.len() != family.dim() {
                return Err(parse_error(path, *line, format!("expected {} columns, found {}", family.dim(), rec.len())));
            }
            (0..family.dim()).map(|i| field(path, *line, rec, i)).collect()
        })
        .collect::<Result<_>>()?;
    Ok((family, states))
}

/// `iteration, components..., beta, accepted, misfit`.
pub fn write_trace(path: &Path, family: Family, rows: &[TraceRow]) -> Result<()> {
    let header = std::iter::once(format!(
        "iteration,{},beta,accepted,misfit",
        family.component_names().join(",")
    ));
    let body = rows.iter().map(|r| {
        let state: Vec<String> = r.state.iter().map(|&v| fmt_f64(v)).collect();
        format!(
            "{},{},{},{},{}",
            r.iteration,
            state.join(","),
            fmt_f64(r.beta),
            u8::from(r.accepted),
            fmt_f64(r.misfit)
        )
    });
    write_lines(path, header.chain(body))
}

pub fn write_histogram(path: &Path, h: &Histogram) -> Result<()> {
    let header = std::iter::once("edge_low,edge_high,count".to_string());
    let body = h
        .counts
        .iter()
        .enumerate()
        .map(|(i, c)| format!("{},{},{c}", fmt_f64(h.edges[i]), fmt_f64(h.edges[i + 1])));
    write_lines(path, header.chain(body))
}

pub fn read_histogram(path: &Path) -> Result<Histogram> {
    let (header, recs) = read_records(path)?;
    expect_header(path, &header, &["edge_low", "edge_high", "count"])?;
    let mut edges = Vec::with_capacity(recs.len() + 1);
    let mut counts = Vec::with_capacity(recs.len());
    for (i, (line, rec)) in recs.iter().enumerate() {
        let lo: f64 = field(path, *line, rec, 0)?;
        if i == 0 {
            edges.push(lo);
        } else if lo != edges[i] {
            return Err(parse_error(path, *line, "bins are not contiguous"));
        }
        edges.push(field(path, *line, rec, 1)?);
        counts.push(field(path, *line, rec, 2)?);
    }
    Ok(Histogram { edges, counts })
}

/// A table of already formatted cells.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let head = std::iter::once(header.join(","));
    write_lines(path, head.chain(rows.iter().map(|r| r.join(","))))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| parse_error(path, e.line() as u64, e.to_string()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Provenance record written next to every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub file: String,
    pub config_sha256: String,
    pub seed: u64,
    pub build: String,
}

pub fn build_id() -> String {
    format!("phaseless {}", env!("CARGO_PKG_VERSION"))
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

/// Writes `<output>.manifest.json` for `output`.
pub fn write_manifest(output: &Path, config: &[u8], seed: u64) -> Result<Manifest> {
    let manifest = Manifest {
        file: output
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        config_sha256: sha256_hex(config),
        seed,
        build: build_id(),
    };
    write_json(&manifest_path(output), &manifest)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observation::DirectionGrid;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, f64::MAX, 0.0, 2.5e17] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn sha256_known_value() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn observation_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("obs.csv");
        let config = MeasurementConfig::new(1.0, 3, 2, DirectionGrid::Disk).unwrap();
        let y = DMatrix::from_fn(2, 3, |m, l| 0.1 + m as f64 / 7.0 + l as f64 / 3.0);
        let obs = ObservationSet {
            config,
            sigma_eta: 0.03,
            sigma: y.map(|v| 0.03 * v),
            y,
        };
        write_observations(&path, &obs, "ideal", Some(4)).unwrap();
        let (back, meta) = read_observations(&path).unwrap();
        assert_eq!(back, obs);
        assert_eq!(meta.seed, Some(4));
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("m,l,y,sigma\n1,1,"));
        assert_eq!(text.lines().count(), 7);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("chain.csv");
        std::fs::write(&path, "x1,x2,log_r\n1,2,3\n1,oops,3\n").unwrap();
        match read_chain(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_grid_entry_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("truth.csv");
        std::fs::write(&path, "m,l,value\n1,1,0.5\n").unwrap();
        let config = MeasurementConfig::new(1.0, 1, 2, DirectionGrid::Disk).unwrap();
        assert!(matches!(read_truth(&path, &config), Err(Error::Parse { .. })));
    }

    #[test]
    fn manifest_sits_next_to_output() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("chain.csv");
        let m = write_manifest(&out, b"{}", 9).unwrap();
        let back: Manifest = read_json(&dir.path().join("chain.csv.manifest.json")).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.seed, 9);
    }
}
