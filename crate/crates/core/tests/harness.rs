use std::fs;

use stabphase::codes::CodeFamily;
use stabphase::harness::{
    aggregate, aggregates_csv, emit, parse_aggregates_csv, parse_records_csv, read_manifest, records_csv, replay,
    run_sweep, run_sweep_sequential, EmitPaths, SweepConfig,
};
use stabphase::noise::ErrorModelKind;

fn family_config(family: CodeFamily, sizes: Vec<usize>, p_grid: Vec<f64>) -> SweepConfig {
    let mut c = SweepConfig::toric(sizes, p_grid, 4, 17);
    if family != CodeFamily::Toric {
        c.family = family;
        c.model = ErrorModelKind::Local;
        c.q = 2;
    }
    c
}

#[test]
fn clean_codes_keep_every_diagnostic_at_its_noiseless_value() {
    for (family, sizes) in [
        (CodeFamily::Toric, vec![3, 4]),
        (CodeFamily::Hgp, vec![8]),
        (CodeFamily::Rcc, vec![8, 16]),
    ] {
        for r in run_sweep(&family_config(family, sizes, vec![0.0])).unwrap() {
            assert!(r.error.is_none(), "{r:?}");
            assert_eq!(r.delta, Some(0));
            assert_eq!(r.p_rec, Some(1.0));
            assert_eq!(r.coherent_info, Some(r.k as i64));
            assert_eq!(r.per_logical_qci, Some(1.0));
            assert_eq!(r.varphi, Some(1.0));
            assert_eq!(r.classical_cmi, Some(0));
        }
    }
}

#[test]
fn emitted_files_round_trip_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let config = family_config(CodeFamily::Rcc, vec![8, 12], vec![0.2, 0.9]);
    let records = run_sweep(&config).unwrap();
    let aggs = aggregate(&records).unwrap();
    let paths = EmitPaths::in_dir(dir.path());
    emit(&config, &records, &aggs, Some(&serde_json::json!({"note": "none"})), &paths).unwrap();
    for p in [&paths.records, &paths.aggregates, &paths.manifest, &paths.plot, &paths.fits] {
        assert!(p.exists(), "{}", p.display());
    }
    assert!(!paths.errors.exists());

    let text = fs::read_to_string(&paths.records).unwrap();
    assert_eq!(parse_records_csv(&text, &config).unwrap(), records);
    let agg_text = fs::read_to_string(&paths.aggregates).unwrap();
    assert_eq!(aggregates_csv(&parse_aggregates_csv(&agg_text).unwrap()).unwrap(), agg_text);

    let manifest = read_manifest(&paths.manifest).unwrap();
    assert_eq!(manifest.seed, config.seed);
    assert_eq!(records_csv(&replay(&manifest, Some(3)).unwrap()).unwrap(), text);
    assert_eq!(run_sweep_sequential(&config).unwrap(), records);
}

#[test]
fn different_seeds_give_different_samples() {
    let a = run_sweep(&SweepConfig::toric(vec![4], vec![0.5], 16, 1)).unwrap();
    let b = run_sweep(&SweepConfig::toric(vec![4], vec![0.5], 16, 2)).unwrap();
    assert_ne!(records_csv(&a).unwrap(), records_csv(&b).unwrap());
}
