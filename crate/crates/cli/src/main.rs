use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use stabphase::codes::CodeFamily;
use stabphase::harness::{
    aggregate, collapse_fit, collapse_fit_records, emit, exp_fit_per_logical_qci, parse_aggregates_csv,
    parse_records_csv, read_manifest, records_csv, replay, run_sweep, Aggregate, CollapseOptions, CollapsePoint,
    DiagnosticSet, EmitPaths, ExpFitPoint, RegionConfig, Stat, SweepConfig, SweepRecord,
};
use stabphase::noise::ErrorModelKind;

#[derive(Parser)]
#[command(name = "stabphase", version, about = "Coherent-error sweeps on stabilizer codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Toric code under plaquette Clifford errors; sizes are L.
    Toric(SweepArgs),
    /// Hypergraph-product codes of two random (3,6) LDPC codes; sizes are
    /// the classical length n.
    Hgp(SweepArgs),
    /// Random Clifford brickwork codes; sizes are N.
    Rcc(RccArgs),
    /// Finite-size-scaling collapse of one aggregated observable.
    Collapse(CollapseArgs),
    /// Fit ln(per-logical qCI) = -h(p)/N per p.
    Expfit(ExpfitArgs),
    /// Compare the stabilizer kernels with the dense reference.
    Validate(ValidateArgs),
    /// Rerun a sweep from its manifest.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// `start:stop:step` (inclusive) or a comma-separated list.
    #[arg(long)]
    p_grid: String,
    #[arg(long)]
    q: Option<usize>,
    /// long | local | plaquette
    #[arg(long)]
    model: Option<ErrorModelKind>,
    #[arg(long, default_value_t = 64)]
    realizations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Comma-separated subset of delta,qci,phi,cmi,qcmi.
    #[arg(long, default_value = "all")]
    diagnostics: DiagnosticSet,
    /// Toric strip width in columns.
    #[arg(long, default_value_t = 1)]
    region_width: usize,
    /// Toric strip separation in columns (default L/2).
    #[arg(long)]
    region_separation: Option<usize>,
}

#[derive(Args)]
struct RccArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    /// Logical qubits (default N/4).
    #[arg(long)]
    rate_k: Option<usize>,
    /// Brickwork depth (default N).
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Args)]
struct CollapseArgs {
    /// A sweep output directory (bootstrap resamples realizations) or an
    /// aggregates.csv (bootstrap perturbs the means by their stderr).
    input: PathBuf,
    /// delta | delta_per_logical | p_rec | coherent_info | per_logical_qci |
    /// varphi | qcmi | classical_cmi
    #[arg(long, default_value = "delta")]
    observable: String,
    #[arg(long, default_value = "0:1")]
    pc_range: String,
    #[arg(long, default_value = "0.5:5")]
    nu_range: String,
    /// Only use points with p inside this range.
    #[arg(long)]
    p_window: Option<String>,
    #[arg(long, default_value_t = 100)]
    bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExpfitArgs {
    aggregates: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 200)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ReplayArgs {
    manifest: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
    /// Where to write the rerun; defaults to the manifest's directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fail unless the rerun matches the records.csv next to the manifest.
    #[arg(long)]
    check: bool,
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s.split_once(':').context("expected lo:hi")?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

/// `start:stop:step` inclusive of `stop` up to rounding, or a list.
fn parse_p_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step): (f64, f64, f64) = (start.parse()?, stop.parse()?, step.parse()?);
            if step <= 0.0 || stop < start {
                bail!("p grid needs step > 0 and stop ≥ start");
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            // round to the step's decimal precision so grids print cleanly
            Ok((0..count).map(|i| ((start + step * i as f64) * 1e9).round() / 1e9).collect())
        }
        [_] => s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(Into::into))
            .collect(),
        _ => bail!("p grid must be start:stop:step or a comma list"),
    }
}

fn sweep_config(family: CodeFamily, a: &SweepArgs) -> Result<SweepConfig> {
    let (model, q) = match family {
        CodeFamily::Toric => (a.model.unwrap_or(ErrorModelKind::ToricPlaquette), a.q.unwrap_or(4)),
        _ => (a.model.unwrap_or(ErrorModelKind::LongRange), a.q.unwrap_or(2)),
    };
    Ok(SweepConfig {
        family,
        sizes: a.sizes.clone(),
        model,
        q,
        p_grid: parse_p_grid(&a.p_grid)?,
        realizations: a.realizations,
        seed: a.seed,
        diagnostics: a.diagnostics,
        regions: RegionConfig {
            width: a.region_width,
            separation: a.region_separation,
        },
        rcc_k: None,
        rcc_depth: None,
        threads: a.threads,
    })
}

fn fmt_stat(s: &Option<Stat>) -> String {
    s.map_or_else(|| "-".into(), |s| format!("{:.4}±{:.4}", s.mean, s.stderr))
}

fn print_summary(aggs: &[Aggregate]) {
    println!(
        "{:>6} {:>7} {:>16} {:>16} {:>16} {:>16} {:>16} {:>16} {:>5}",
        "size", "p", "delta", "delta/k", "p_rec", "qci/k", "varphi", "qcmi", "fail"
    );
    for a in aggs {
        println!(
            "{:>6} {:>7} {:>16} {:>16} {:>16} {:>16} {:>16} {:>16} {:>5}",
            a.size,
            a.p,
            fmt_stat(&a.delta),
            fmt_stat(&a.delta_per_logical),
            fmt_stat(&a.p_rec),
            fmt_stat(&a.per_logical_qci),
            fmt_stat(&a.varphi),
            fmt_stat(&a.qcmi),
            a.failures
        );
    }
}

fn run_and_emit(config: &SweepConfig, out: &Path) -> Result<()> {
    let records = run_sweep(config)?;
    let aggs = aggregate(&records)?;
    emit(config, &records, &aggs, None, &EmitPaths::in_dir(out))?;
    print_summary(&aggs);
    println!("wrote {}", out.display());
    Ok(())
}

fn record_observable(name: &str) -> Result<fn(&SweepRecord) -> Option<f64>> {
    Ok(match name {
        "delta" => |r| r.delta.map(|d| d as f64),
        "delta_per_logical" => |r| r.delta_per_logical(),
        "p_rec" => |r| r.p_rec,
        "coherent_info" => |r| r.coherent_info.map(|c| c as f64),
        "per_logical_qci" => |r| r.per_logical_qci,
        "varphi" => |r| r.varphi,
        "qcmi" => |r| r.qcmi.map(|c| c as f64),
        "classical_cmi" => |r| r.classical_cmi.map(|c| c as f64),
        _ => bail!("unknown observable {name:?}"),
    })
}

fn observable(a: &Aggregate, name: &str) -> Result<Option<Stat>> {
    Ok(match name {
        "delta" => a.delta,
        "delta_per_logical" => a.delta_per_logical,
        "p_rec" => a.p_rec,
        "coherent_info" => a.coherent_info,
        "per_logical_qci" => a.per_logical_qci,
        "varphi" => a.varphi,
        "qcmi" => a.qcmi,
        "classical_cmi" => a.classical_cmi,
        _ => bail!("unknown observable {name:?}"),
    })
}

/// Physical qubits of a family at a sweep size.
fn physical_qubits(family: CodeFamily, size: usize) -> usize {
    match family {
        CodeFamily::Toric => 2 * size * size,
        // n² bit qubits plus (n/2)² check qubits
        CodeFamily::Hgp => size * size + (size / 2) * (size / 2),
        CodeFamily::Rcc | CodeFamily::Custom => size,
    }
}

fn read_aggregates(path: &Path) -> Result<Vec<Aggregate>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_aggregates_csv(&text)?)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Toric(a) => run_and_emit(&sweep_config(CodeFamily::Toric, &a)?, &a.out),
        Command::Hgp(a) => run_and_emit(&sweep_config(CodeFamily::Hgp, &a)?, &a.out),
        Command::Rcc(a) => {
            let mut config = sweep_config(CodeFamily::Rcc, &a.sweep)?;
            config.rcc_k = a.rate_k;
            config.rcc_depth = a.depth;
            run_and_emit(&config, &a.sweep.out)
        }
        Command::Collapse(a) => {
            let window = a.p_window.as_deref().map(parse_range).transpose()?;
            let in_window = |p: f64| window.is_none_or(|(lo, hi)| (lo..=hi).contains(&p));
            let opts = CollapseOptions {
                pc_range: parse_range(&a.pc_range)?,
                nu_range: parse_range(&a.nu_range)?,
                bootstrap: a.bootstrap,
                seed: a.seed,
                ..Default::default()
            };
            if a.input.is_dir() {
                let paths = EmitPaths::in_dir(&a.input);
                let manifest = read_manifest(&paths.manifest)?;
                let text = fs::read_to_string(&paths.records)
                    .with_context(|| format!("reading {}", paths.records.display()))?;
                let records: Vec<SweepRecord> = parse_records_csv(&text, &manifest.config)?
                    .into_iter()
                    .filter(|r| in_window(r.p))
                    .collect();
                let value = record_observable(&a.observable)?;
                let fit = collapse_fit_records(&records, &value, &opts)?;
                println!("{}", serde_json::to_string_pretty(&fit)?);
                return Ok(());
            }
            let mut data = Vec::new();
            for agg in read_aggregates(&a.input)? {
                if !in_window(agg.p) {
                    continue;
                }
                if let Some(s) = observable(&agg, &a.observable)? {
                    data.push(CollapsePoint {
                        size: agg.size as f64,
                        p: agg.p,
                        mean: s.mean,
                        stderr: s.stderr,
                    });
                }
            }
            let fit = collapse_fit(&data, &opts)?;
            println!("{}", serde_json::to_string_pretty(&fit)?);
            Ok(())
        }
        Command::Expfit(a) => {
            let data: Vec<ExpFitPoint> = read_aggregates(&a.aggregates)?
                .iter()
                .filter_map(|agg| {
                    agg.per_logical_qci.map(|s| ExpFitPoint {
                        n: physical_qubits(agg.family, agg.size) as f64,
                        p: agg.p,
                        mean: s.mean,
                    })
                })
                .collect();
            let fits = exp_fit_per_logical_qci(&data)?;
            println!("{}", serde_json::to_string_pretty(&fits)?);
            Ok(())
        }
        Command::Validate(a) => {
            let reports = stabphase_validate::run_all(a.instances, a.seed);
            let mut ok = true;
            for r in &reports {
                println!("[{}] {r}", if r.passed() { "PASS" } else { "FAIL" });
                ok &= r.passed();
            }
            if !ok {
                bail!("validation mismatches");
            }
            Ok(())
        }
        Command::Replay(a) => {
            let manifest = read_manifest(&a.manifest)?;
            let dir = a.manifest.parent().unwrap_or(Path::new(".")).to_path_buf();
            let records = replay(&manifest, a.threads)?;
            let csv = records_csv(&records)?;
            if a.check {
                let original = fs::read_to_string(dir.join("records.csv"))?;
                if original != csv {
                    bail!("replayed records differ from {}", dir.join("records.csv").display());
                }
                println!("replay identical ({} records)", records.len());
            }
            let out = a.out.unwrap_or(dir);
            let aggs = aggregate(&records)?;
            emit(&manifest.config, &records, &aggs, None, &EmitPaths::in_dir(&out))?;
            print_summary(&aggs);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_grid_forms() {
        assert_eq!(parse_p_grid("0:0.3:0.1").unwrap(), vec![0.0, 0.1, 0.2, 0.3]);
        assert_eq!(parse_p_grid("0.5,0.9").unwrap(), vec![0.5, 0.9]);
        assert!(parse_p_grid("0.5:0.1:0.1").is_err());
        assert!(parse_p_grid("a:b").is_err());
    }

    #[test]
    fn hgp_qubit_count() {
        assert_eq!(physical_qubits(CodeFamily::Hgp, 8), 80);
        assert_eq!(physical_qubits(CodeFamily::Toric, 4), 32);
    }
}
