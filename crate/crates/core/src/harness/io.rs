use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{run_sweep, Aggregate, Stat, SweepConfig, SweepRecord};
use crate::codes::CodeFamily;
use crate::error::{Error, Result};

/// Column order of `records.csv`.
pub const RECORD_HEADER: [&str; 15] = [
    "family",
    "model",
    "q",
    "size",
    "p",
    "realization",
    "seed",
    "delta",
    "p_rec",
    "group_class",
    "coherent_info",
    "per_logical_qci",
    "varphi",
    "qcmi",
    "classical_cmi",
];

/// Message attached to parsed records whose enabled diagnostics are
/// incomplete.
const PARSED_FAILURE: &str = "realization failed (recovered from CSV)";

const STAT_NAMES: [&str; 8] = [
    "delta",
    "delta_per_logical",
    "p_rec",
    "coherent_info",
    "per_logical_qci",
    "varphi",
    "qcmi",
    "classical_cmi",
];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

/// The records as CSV text with the fixed header.
pub fn records_csv(records: &[SweepRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.write_record([
            r.family.name().to_string(),
            r.model.name().to_string(),
            r.q.to_string(),
            r.size.to_string(),
            r.p.to_string(),
            r.realization.to_string(),
            r.seed.to_string(),
            opt(&r.delta),
            opt(&r.p_rec),
            opt(&r.group_class),
            opt(&r.coherent_info),
            opt(&r.per_logical_qci),
            opt(&r.varphi),
            opt(&r.qcmi),
            opt(&r.classical_cmi),
        ])?;
    }
    bytes_to_string(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
}

fn bytes_to_string(b: Vec<u8>) -> Result<String> {
    String::from_utf8(b).map_err(|e| Error::InvalidArgument(e.to_string()))
}

pub fn write_records_csv(path: &Path, records: &[SweepRecord]) -> Result<()> {
    fs::write(path, records_csv(records)?)?;
    Ok(())
}

fn family_from(s: &str) -> Result<CodeFamily> {
    match s {
        "toric" => Ok(CodeFamily::Toric),
        "hgp" => Ok(CodeFamily::Hgp),
        "rcc" => Ok(CodeFamily::Rcc),
        "custom" => Ok(CodeFamily::Custom),
        _ => Err(Error::InvalidArgument(format!("unknown code family {s:?}"))),
    }
}

fn field<T: std::str::FromStr>(s: &str, name: &str) -> Result<Option<T>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| Error::InvalidArgument(format!("bad {name} value {s:?}")))
}

fn required<T: std::str::FromStr>(s: &str, name: &str) -> Result<T> {
    field(s, name)?.ok_or_else(|| Error::InvalidArgument(format!("missing {name}")))
}

/// Parses `records.csv`. The logical count of each record is recomputed
/// from `config` and its seed; a record counts as failed when one of the
/// diagnostics enabled in `config` is empty.
pub fn parse_records_csv(text: &str, config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != RECORD_HEADER {
        return Err(Error::InvalidArgument(format!("unexpected header {header:?}")));
    }
    let d = config.diagnostics;
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let size: usize = required(&row[3], "size")?;
        let seed: u64 = required(&row[6], "seed")?;
        let mut r = SweepRecord {
            family: family_from(&row[0])?,
            model: row[1].parse()?,
            q: required(&row[2], "q")?,
            size,
            p: required(&row[4], "p")?,
            realization: required(&row[5], "realization")?,
            seed,
            k: config.logical_count(size, seed)?,
            delta: field(&row[7], "delta")?,
            p_rec: field(&row[8], "p_rec")?,
            group_class: field(&row[9], "group_class")?,
            coherent_info: field(&row[10], "coherent_info")?,
            per_logical_qci: field(&row[11], "per_logical_qci")?,
            varphi: field(&row[12], "varphi")?,
            qcmi: field(&row[13], "qcmi")?,
            classical_cmi: field(&row[14], "classical_cmi")?,
            error: None,
        };
        let incomplete = (d.delta && (r.delta.is_none() || r.p_rec.is_none()))
            || (d.qci && (r.coherent_info.is_none() || (r.k > 0 && r.per_logical_qci.is_none())))
            || (d.phi && r.varphi.is_none())
            || (d.cmi && r.classical_cmi.is_none())
            || (d.qcmi && r.qcmi.is_none());
        if incomplete {
            r.error = Some(PARSED_FAILURE.into());
        }
        out.push(r);
    }
    Ok(out)
}

fn aggregates_header() -> Vec<String> {
    let mut h: Vec<String> = ["family", "model", "q", "size", "p", "realizations", "failures"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for name in STAT_NAMES {
        for suffix in ["mean", "stderr", "count"] {
            h.push(format!("{name}_{suffix}"));
        }
    }
    h.push("group_classes".into());
    h
}

fn stats_of(a: &Aggregate) -> [&Option<Stat>; 8] {
    [
        &a.delta,
        &a.delta_per_logical,
        &a.p_rec,
        &a.coherent_info,
        &a.per_logical_qci,
        &a.varphi,
        &a.qcmi,
        &a.classical_cmi,
    ]
}

pub fn aggregates_csv(aggs: &[Aggregate]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(aggregates_header())?;
    for a in aggs {
        let mut row = vec![
            a.family.name().to_string(),
            a.model.name().to_string(),
            a.q.to_string(),
            a.size.to_string(),
            a.p.to_string(),
            a.realizations.to_string(),
            a.failures.to_string(),
        ];
        for s in stats_of(a) {
            match s {
                Some(s) => row.extend([s.mean.to_string(), s.stderr.to_string(), s.count.to_string()]),
                None => row.extend([String::new(), String::new(), String::new()]),
            }
        }
        row.push(
            a.group_classes
                .iter()
                .map(|(k, v)| format!("{k}:{v}"))
                .collect::<Vec<_>>()
                .join(";"),
        );
        w.write_record(row)?;
    }
    bytes_to_string(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
}

pub fn parse_aggregates_csv(text: &str) -> Result<Vec<Aggregate>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != aggregates_header() {
        return Err(Error::InvalidArgument("unexpected aggregates header".into()));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let mut stats = [None; 8];
        for (i, s) in stats.iter_mut().enumerate() {
            let base = 7 + 3 * i;
            if let (Some(mean), Some(stderr), Some(count)) = (
                field(&row[base], "mean")?,
                field(&row[base + 1], "stderr")?,
                field(&row[base + 2], "count")?,
            ) {
                *s = Some(Stat { mean, stderr, count });
            }
        }
        let mut group_classes = BTreeMap::new();
        for item in row[7 + 3 * 8].split(';').filter(|s| !s.is_empty()) {
            let (k, v) = item
                .rsplit_once(':')
                .ok_or_else(|| Error::InvalidArgument(format!("bad class count {item:?}")))?;
            group_classes.insert(k.to_string(), required(v, "class count")?);
        }
        let [delta, delta_per_logical, p_rec, coherent_info, per_logical_qci, varphi, qcmi, classical_cmi] = stats;
        out.push(Aggregate {
            family: family_from(&row[0])?,
            model: row[1].parse()?,
            q: required(&row[2], "q")?,
            size: required(&row[3], "size")?,
            p: required(&row[4], "p")?,
            realizations: required(&row[5], "realizations")?,
            failures: required(&row[6], "failures")?,
            delta,
            delta_per_logical,
            p_rec,
            coherent_info,
            per_logical_qci,
            varphi,
            qcmi,
            classical_cmi,
            group_classes,
        });
    }
    Ok(out)
}

/// Everything needed to rerun a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub artifact: String,
    pub version: String,
    pub seed: u64,
    pub config: SweepConfig,
}

impl Manifest {
    pub fn new(config: &SweepConfig) -> Self {
        Self {
            artifact: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed: config.seed,
            config: config.clone(),
        }
    }
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let m: Manifest = serde_json::from_str(&fs::read_to_string(path)?)?;
    if m.seed != m.config.seed {
        return Err(Error::InvalidArgument("manifest seed disagrees with its config".into()));
    }
    Ok(m)
}

/// Output file locations under one directory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmitPaths {
    pub records: PathBuf,
    pub aggregates: PathBuf,
    pub manifest: PathBuf,
    pub fits: PathBuf,
    pub plot: PathBuf,
    pub errors: PathBuf,
}

impl EmitPaths {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            records: dir.join("records.csv"),
            aggregates: dir.join("aggregates.csv"),
            manifest: dir.join("manifest.json"),
            fits: dir.join("fits.json"),
            plot: dir.join("plot.gp"),
            errors: dir.join("errors.txt"),
        }
    }
}

fn plot_script(config: &SweepConfig, aggregates: &Path) -> String {
    let d = config.diagnostics;
    let panels = [
        (d.delta, "delta"),
        (d.delta, "p_rec"),
        (d.qci, "per_logical_qci"),
        (d.phi, "varphi"),
        (d.qcmi, "qcmi"),
        (d.cmi, "classical_cmi"),
    ];
    let sizes: Vec<String> = config.sizes.iter().map(usize::to_string).collect();
    let file = aggregates
        .file_name()
        .map_or_else(|| "aggregates.csv".into(), |f| f.to_string_lossy().into_owned());
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 800,600\n");
    s.push_str("set xlabel 'p'\n");
    s.push_str(&format!("sizes = \"{}\"\n", sizes.join(" ")));
    for (_, name) in panels.iter().filter(|(on, _)| *on) {
        s.push_str(&format!("set output '{name}.png'\n"));
        s.push_str(&format!("set ylabel '{name}'\n"));
        s.push_str(&format!(
            "plot for [L in sizes] '{file}' using (strcol('size') eq L ? column('p') : 1/0):\
             (column('{name}_mean')):(column('{name}_stderr')) with yerrorlines title 'size '.L\n"
        ));
    }
    s
}

/// Writes records, aggregates, manifest, a gnuplot script, the fits (when
/// given) and a list of failed realizations (when any).
pub fn emit(
    config: &SweepConfig,
    records: &[SweepRecord],
    aggregates: &[Aggregate],
    fits: Option<&serde_json::Value>,
    paths: &EmitPaths,
) -> Result<()> {
    for p in [&paths.records, &paths.aggregates, &paths.manifest] {
        if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
    }
    write_records_csv(&paths.records, records)?;
    fs::write(&paths.aggregates, aggregates_csv(aggregates)?)?;
    fs::write(&paths.manifest, serde_json::to_string_pretty(&Manifest::new(config))?)?;
    fs::write(&paths.plot, plot_script(config, &paths.aggregates))?;
    if let Some(f) = fits {
        fs::write(&paths.fits, serde_json::to_string_pretty(f)?)?;
    }
    let failed: Vec<String> = records
        .iter()
        .filter_map(|r| {
            r.error
                .as_ref()
                .map(|e| format!("size={} p={} realization={} seed={}: {e}", r.size, r.p, r.realization, r.seed))
        })
        .collect();
    if !failed.is_empty() {
        fs::write(&paths.errors, failed.join("\n") + "\n")?;
    }
    Ok(())
}

/// Reruns the sweep described by a manifest, optionally with a different
/// thread count, and returns the records.
pub fn replay(manifest: &Manifest, threads: Option<usize>) -> Result<Vec<SweepRecord>> {
    let mut config = manifest.config.clone();
    config.threads = threads;
    run_sweep(&config)
}

#[cfg(test)]
mod tests {
    use super::super::aggregate;
    use super::*;

    #[test]
    fn empty_records_give_header_only() {
        assert_eq!(records_csv(&[]).unwrap(), RECORD_HEADER.join(",") + "\n");
    }

    #[test]
    fn csv_round_trip_preserves_aggregates() {
        let config = SweepConfig::toric(vec![2, 3], vec![0.0, 0.7], 5, 3);
        let recs = run_sweep(&config).unwrap();
        let text = records_csv(&recs).unwrap();
        let parsed = parse_records_csv(&text, &config).unwrap();
        assert_eq!(aggregate(&recs).unwrap(), aggregate(&parsed).unwrap());
        let aggs = aggregate(&recs).unwrap();
        assert_eq!(parse_aggregates_csv(&aggregates_csv(&aggs).unwrap()).unwrap(), aggs);
    }

    #[test]
    fn manifest_replay_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let config = SweepConfig::toric(vec![3], vec![0.3, 0.9], 4, 17);
        let recs = run_sweep(&config).unwrap();
        let paths = EmitPaths::in_dir(dir.path());
        emit(&config, &recs, &aggregate(&recs).unwrap(), None, &paths).unwrap();
        let m = read_manifest(&paths.manifest).unwrap();
        assert_eq!(m.config, config);
        for threads in [Some(1), Some(2), None] {
            let again = replay(&m, threads).unwrap();
            assert_eq!(records_csv(&again).unwrap(), fs::read_to_string(&paths.records).unwrap());
        }
        assert!(fs::read_to_string(&paths.plot).unwrap().contains("delta_mean"));
    }
}
