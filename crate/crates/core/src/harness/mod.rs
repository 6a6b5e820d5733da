//! Disorder-averaged sweeps: deterministic per-realization seeding,
//! parallel execution over realizations, aggregation, scaling fits and
//! file output.

mod aggregate;
mod fit;
mod io;

pub use aggregate::{aggregate, Aggregate, Stat};
pub use fit::{
    collapse_cost, collapse_fit, collapse_fit_records, exp_fit_per_logical_qci, nelder_mead, CollapseFit,
    CollapseOptions, CollapsePoint, ExpFit, ExpFitPoint,
};
pub use io::{
    aggregates_csv, emit, parse_aggregates_csv, parse_records_csv, read_manifest, records_csv, replay, write_records_csv,
    EmitPaths, Manifest, RECORD_HEADER,
};

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitlinalg::BitMatrix;
use crate::codes::{build_hgp, build_ldpc, build_rcc, build_toric, CodeFamily, Geometry, StabilizerCode};
use crate::diagnostics::{
    classical_cmi, coherent_information, delta_logical, syndrome_stats, StripGeometry,
};
use crate::error::{Error, Result};
use crate::noise::{apply_realization, sample_errors, ErrorModelKind};
use crate::stabsim::{StabilizerGroup, StabilizerState};

/// Which diagnostics a sweep computes. Disabled ones are left empty in the
/// records.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticSet {
    /// `Δ`, `P_rec` and the toric group class.
    pub delta: bool,
    /// Coherent information.
    pub qci: bool,
    /// Reduced free entropy density `r_Q / N_s`.
    pub phi: bool,
    /// Classical CMI of the syndrome distribution.
    pub cmi: bool,
    /// Quantum CMI of the syndrome-averaged state.
    pub qcmi: bool,
}

impl DiagnosticSet {
    pub fn all() -> Self {
        Self {
            delta: true,
            qci: true,
            phi: true,
            cmi: true,
            qcmi: true,
        }
    }

    pub fn none() -> Self {
        Self {
            delta: false,
            qci: false,
            phi: false,
            cmi: false,
            qcmi: false,
        }
    }

    fn needs_measurement(&self) -> bool {
        self.delta || self.phi || self.cmi
    }
}

impl Default for DiagnosticSet {
    fn default() -> Self {
        Self::all()
    }
}

impl FromStr for DiagnosticSet {
    type Err = Error;

    /// Comma-separated subset of `delta,qci,phi,cmi,qcmi`, or `all`.
    fn from_str(s: &str) -> Result<Self> {
        let mut set = Self::none();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok {
                "all" => set = Self::all(),
                "delta" => set.delta = true,
                "qci" => set.qci = true,
                "phi" => set.phi = true,
                "cmi" => set.cmi = true,
                "qcmi" => set.qcmi = true,
                _ => return Err(Error::InvalidArgument(format!("unknown diagnostic {tok:?}"))),
            }
        }
        Ok(set)
    }
}

impl fmt::Display for DiagnosticSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = [
            (self.delta, "delta"),
            (self.qci, "qci"),
            (self.phi, "phi"),
            (self.cmi, "cmi"),
            (self.qcmi, "qcmi"),
        ];
        let on: Vec<&str> = names.iter().filter(|(b, _)| *b).map(|(_, n)| *n).collect();
        f.write_str(&on.join(","))
    }
}

/// Regions `A`, `B` for the CMI diagnostics.
///
/// Toric codes use column bands of `width` columns at column 0 and at
/// `separation` (default `L/2`). Other codes use index blocks of
/// `max(1, n / 8)` qubits (checks) at the start and at the middle of the
/// register (check list).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionConfig {
    pub width: usize,
    pub separation: Option<usize>,
}

impl Default for RegionConfig {
    fn default() -> Self {
        Self {
            width: 1,
            separation: None,
        }
    }
}

/// Index blocks used for non-toric regions, as a fraction `1 / BLOCK_DIVISOR`
/// of the register.
pub const BLOCK_DIVISOR: usize = 8;

fn block_regions(total: usize) -> Result<[Vec<usize>; 3]> {
    let w = (total / BLOCK_DIVISOR).max(1);
    let start_b = total / 2;
    if total < 2 || start_b < w || start_b + w > total {
        return Err(Error::BadRegions);
    }
    let a: Vec<usize> = (0..w).collect();
    let b: Vec<usize> = (start_b..start_b + w).collect();
    let c = (w..start_b).chain(start_b + w..total).collect();
    Ok([a, b, c])
}

impl RegionConfig {
    fn strip(&self, l: usize) -> StripGeometry {
        StripGeometry {
            width: self.width,
            d_ab: self.separation.unwrap_or(l / 2),
        }
    }

    pub fn qubit_regions(&self, code: &StabilizerCode) -> Result<[Vec<usize>; 3]> {
        match code.geometry {
            Geometry::Toric { l } => self.strip(l).qubit_regions(l),
            _ => block_regions(code.n),
        }
    }

    pub fn check_regions(&self, code: &StabilizerCode) -> Result<[Vec<usize>; 3]> {
        match code.geometry {
            Geometry::Toric { l } => self.strip(l).check_regions(l),
            _ => block_regions(code.checks.len()),
        }
    }
}

/// Parameters of one sweep. `sizes` are `L` for toric codes, the classical
/// length `n` of both LDPC seeds for HGP codes, and `N` for RCC codes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub family: CodeFamily,
    pub sizes: Vec<usize>,
    pub model: ErrorModelKind,
    pub q: usize,
    pub p_grid: Vec<f64>,
    pub realizations: usize,
    pub seed: u64,
    pub diagnostics: DiagnosticSet,
    #[serde(default)]
    pub regions: RegionConfig,
    /// RCC logical count; default `N / 4`.
    #[serde(default)]
    pub rcc_k: Option<usize>,
    /// RCC brickwork depth; default `N`.
    #[serde(default)]
    pub rcc_depth: Option<usize>,
    /// Worker threads; `None` uses the global pool. Never affects results.
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
}

impl SweepConfig {
    /// A toric plaquette sweep with every diagnostic enabled.
    pub fn toric(sizes: Vec<usize>, p_grid: Vec<f64>, realizations: usize, seed: u64) -> Self {
        Self {
            family: CodeFamily::Toric,
            sizes,
            model: ErrorModelKind::ToricPlaquette,
            q: 4,
            p_grid,
            realizations,
            seed,
            diagnostics: DiagnosticSet::all(),
            regions: RegionConfig::default(),
            rcc_k: None,
            rcc_depth: None,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.sizes.is_empty() {
            return bad("no sizes".into());
        }
        if self.p_grid.is_empty() {
            return bad("empty p grid".into());
        }
        if let Some(p) = self.p_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return bad(format!("p = {p} outside [0, 1]"));
        }
        if self.realizations == 0 {
            return bad("realizations must be at least 1".into());
        }
        if self.q == 0 {
            return bad("q must be at least 1".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        match self.family {
            CodeFamily::Toric => {
                if self.model != ErrorModelKind::ToricPlaquette || self.q != 4 {
                    return bad("toric sweeps use plaquette errors with q = 4".into());
                }
                if let Some(&l) = self.sizes.iter().find(|&&l| l < 2) {
                    return bad(format!("toric size {l} < 2"));
                }
            }
            CodeFamily::Hgp | CodeFamily::Rcc => {
                if self.model == ErrorModelKind::ToricPlaquette {
                    return bad("plaquette errors need a toric code".into());
                }
            }
            CodeFamily::Custom => return bad("custom codes cannot be swept".into()),
        }
        if self.family == CodeFamily::Hgp {
            if let Some(&n) = self.sizes.iter().find(|&&n| n < 6 || n % 2 != 0) {
                return bad(format!("HGP seed length {n} must be even and at least 6"));
            }
        }
        if self.family == CodeFamily::Rcc {
            for &n in &self.sizes {
                if n < 2 || self.q > n || self.rcc_k_for(n) > n {
                    return bad(format!("invalid RCC size {n} for q = {} and k = {}", self.q, self.rcc_k_for(n)));
                }
            }
        }
        Ok(())
    }

    pub fn num_points(&self) -> usize {
        self.sizes.len() * self.p_grid.len()
    }

    /// Grid point index `size_idx · |p_grid| + p_idx`.
    pub fn point(&self, point: usize) -> (usize, f64) {
        let np = self.p_grid.len();
        (self.sizes[point / np], self.p_grid[point % np])
    }

    pub fn rcc_k_for(&self, n: usize) -> usize {
        self.rcc_k.unwrap_or(n / 4)
    }

    pub fn rcc_depth_for(&self, n: usize) -> usize {
        self.rcc_depth.unwrap_or(n)
    }

    /// Logical count of the code used by the realization with stream
    /// `seed`; resamples only what determines it.
    pub fn logical_count(&self, size: usize, seed: u64) -> Result<usize> {
        match self.family {
            CodeFamily::Toric => Ok(2),
            CodeFamily::Rcc => Ok(self.rcc_k_for(size)),
            CodeFamily::Hgp => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let c1 = build_ldpc(size, &mut rng)?;
                let c2 = build_ldpc(size, &mut rng)?;
                Ok(c1.k() * c2.k() + c1.k_transpose() * c2.k_transpose())
            }
            CodeFamily::Custom => Err(Error::InvalidArgument("custom codes cannot be swept".into())),
        }
    }
}

/// One realization's diagnostics. Disabled or failed diagnostics are
/// `None`; `error` holds the failure message, if any.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub family: CodeFamily,
    pub model: ErrorModelKind,
    pub q: usize,
    pub size: usize,
    pub p: f64,
    pub realization: usize,
    pub seed: u64,
    /// Logical qubits of this realization's code.
    pub k: usize,
    pub delta: Option<usize>,
    pub p_rec: Option<f64>,
    pub group_class: Option<String>,
    pub coherent_info: Option<i64>,
    pub per_logical_qci: Option<f64>,
    pub varphi: Option<f64>,
    pub qcmi: Option<usize>,
    pub classical_cmi: Option<usize>,
    pub error: Option<String>,
}

impl SweepRecord {
    fn empty(config: &SweepConfig, size: usize, p: f64, realization: usize, seed: u64) -> Self {
        Self {
            family: config.family,
            model: config.model,
            q: config.q,
            size,
            p,
            realization,
            seed,
            k: 0,
            delta: None,
            p_rec: None,
            group_class: None,
            coherent_info: None,
            per_logical_qci: None,
            varphi: None,
            qcmi: None,
            classical_cmi: None,
            error: None,
        }
    }

    /// `Δ / k`.
    pub fn delta_per_logical(&self) -> Option<f64> {
        match self.delta {
            Some(d) if self.k > 0 => Some(d as f64 / self.k as f64),
            _ => None,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the stream for grid point `point`, realization `r`.
pub fn realization_seed(master: u64, point: usize, r: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ point as u64) ^ r as u64)
}

/// A code with the states every realization starts from.
pub struct PreparedCode {
    pub code: StabilizerCode,
    pub logical_group: StabilizerGroup,
    pub code_state: StabilizerState,
}

impl PreparedCode {
    pub fn new(code: StabilizerCode) -> Self {
        Self {
            logical_group: code.logical_group(),
            code_state: code.code_state(),
            code,
        }
    }
}

fn sample_code(config: &SweepConfig, size: usize, rng: &mut ChaCha8Rng) -> Result<StabilizerCode> {
    match config.family {
        CodeFamily::Toric => build_toric(size),
        CodeFamily::Hgp => {
            let c1 = build_ldpc(size, rng)?;
            let c2 = build_ldpc(size, rng)?;
            build_hgp(&c1, &c2)
        }
        CodeFamily::Rcc => build_rcc(size, config.rcc_k_for(size), config.rcc_depth_for(size), rng),
        CodeFamily::Custom => Err(Error::InvalidArgument("custom codes cannot be swept".into())),
    }
}

/// Diagnostics of one realization on a prepared code. The stream is used
/// for the error, then for the syndrome.
pub fn run_realization(
    prepared: &PreparedCode,
    config: &SweepConfig,
    p: f64,
    rng: &mut ChaCha8Rng,
    record: &mut SweepRecord,
) -> Result<()> {
    let code = &prepared.code;
    let d = config.diagnostics;
    record.k = code.k;
    let e = sample_errors(code, config.model, p, config.q, rng)?;
    let needs_state = d.needs_measurement() || d.qcmi;
    let state = if needs_state {
        Some(apply_realization(&prepared.code_state, &e)?)
    } else {
        None
    };
    if d.needs_measurement() {
        let state = state.as_ref().expect("state built");
        let out = state.measure_commuting_set(&code.checks, rng)?;
        if d.delta {
            let diag = delta_logical(code, &prepared.logical_group, &out.post_state)?;
            if diag.delta != diag.delta_commutator {
                return Err(Error::InvalidArgument(format!(
                    "combined-group rank {} disagrees with rank T_L {}",
                    diag.delta, diag.delta_commutator
                )));
            }
            record.delta = Some(diag.delta);
            record.p_rec = Some(diag.p_rec);
            record.group_class = diag.group_class.map(|c| c.label);
        }
        if d.phi {
            record.varphi = Some(syndrome_stats(&out).varphi);
        }
        if d.cmi {
            record.classical_cmi = Some(constraint_cmi(config, code, &out.constraint_matrix)?);
        }
    }
    if d.qcmi {
        let state = state.as_ref().expect("state built");
        let avg = state.average_over_syndromes(&code.checks)?;
        let [a, b, c] = config.regions.qubit_regions(code)?;
        record.qcmi = Some(avg.qcmi(&a, &b, &c)?);
    }
    if d.qci {
        let ch = coherent_information(code, &e)?;
        record.coherent_info = Some(ch.coherent_info);
        if code.k > 0 {
            record.per_logical_qci = Some(ch.per_logical);
        }
    }
    Ok(())
}

fn constraint_cmi(config: &SweepConfig, code: &StabilizerCode, q: &BitMatrix) -> Result<usize> {
    let [a, b, c] = config.regions.check_regions(code)?;
    classical_cmi(q, &a, &b, &c)
}

fn run_task(config: &SweepConfig, templates: &[Option<PreparedCode>], task: usize) -> SweepRecord {
    let r = task % config.realizations;
    let point = task / config.realizations;
    let size_idx = point / config.p_grid.len();
    let (size, p) = config.point(point);
    let seed = realization_seed(config.seed, point, r);
    let mut record = SweepRecord::empty(config, size, p, r, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let result = match &templates[size_idx] {
        Some(prepared) => run_realization(prepared, config, p, &mut rng, &mut record),
        None => sample_code(config, size, &mut rng)
            .map(PreparedCode::new)
            .and_then(|prepared| run_realization(&prepared, config, p, &mut rng, &mut record)),
    };
    if let Err(e) = result {
        record.error = Some(e.to_string());
    }
    record
}

/// Runs every `(point, realization)` pair and returns the records ordered
/// by `(point, realization)`. Per-realization failures are recorded in
/// [`SweepRecord::error`]; the output does not depend on thread count.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    let templates = prepare_templates(config)?;
    let tasks = config.num_points() * config.realizations;
    Ok(map_tasks(config.threads, tasks, |t| run_task(config, &templates, t)))
}

/// Sequential reference path, available with or without the `parallel`
/// feature.
pub fn run_sweep_sequential(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    let templates = prepare_templates(config)?;
    let tasks = config.num_points() * config.realizations;
    Ok((0..tasks).map(|t| run_task(config, &templates, t)).collect())
}

/// Fixed codes are built once per size and shared read-only.
fn prepare_templates(config: &SweepConfig) -> Result<Vec<Option<PreparedCode>>> {
    config.validate()?;
    config
        .sizes
        .iter()
        .map(|&size| match config.family {
            CodeFamily::Toric => build_toric(size).map(|c| Some(PreparedCode::new(c))),
            _ => Ok(None),
        })
        .collect()
}

#[cfg(feature = "parallel")]
fn map_tasks<T, F>(threads: Option<usize>, tasks: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let run = || (0..tasks).into_par_iter().map(&f).collect();
    match threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    }
}

#[cfg(not(feature = "parallel"))]
fn map_tasks<T, F>(_threads: Option<usize>, tasks: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..tasks).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagnostic_set_parsing() {
        let d: DiagnosticSet = "delta,qcmi".parse().unwrap();
        assert!(d.delta && d.qcmi && !d.qci && !d.phi && !d.cmi);
        assert_eq!(d.to_string(), "delta,qcmi");
        assert_eq!("all".parse::<DiagnosticSet>().unwrap(), DiagnosticSet::all());
        assert!("delta,bogus".parse::<DiagnosticSet>().is_err());
    }

    #[test]
    fn seeds_are_distinct_across_points_and_realizations() {
        let mut seen = std::collections::HashSet::new();
        for point in 0..50 {
            for r in 0..50 {
                assert!(seen.insert(realization_seed(7, point, r)));
            }
        }
        assert_ne!(realization_seed(7, 0, 0), realization_seed(8, 0, 0));
    }

    #[test]
    fn config_validation() {
        let ok = SweepConfig::toric(vec![2], vec![0.0, 0.5], 2, 1);
        assert!(ok.validate().is_ok());
        let mut c = ok.clone();
        c.realizations = 0;
        assert!(c.validate().is_err());
        let mut c = ok.clone();
        c.p_grid = vec![1.5];
        assert!(c.validate().is_err());
        let mut c = ok.clone();
        c.model = ErrorModelKind::LongRange;
        assert!(c.validate().is_err());
        let mut c = ok;
        c.family = CodeFamily::Hgp;
        c.model = ErrorModelKind::Local;
        c.sizes = vec![7];
        assert!(c.validate().is_err());
    }

    #[test]
    fn toric_clean_point() {
        let c = SweepConfig::toric(vec![2, 4], vec![0.0], 4, 11);
        let recs = run_sweep(&c).unwrap();
        assert_eq!(recs.len(), 8);
        for r in &recs {
            assert_eq!(r.error, None);
            assert_eq!(r.k, 2);
            assert_eq!(r.delta, Some(0));
            assert_eq!(r.p_rec, Some(1.0));
            assert_eq!(r.coherent_info, Some(2));
            assert_eq!(r.per_logical_qci, Some(1.0));
            assert_eq!(r.varphi, Some(1.0));
            assert_eq!(r.classical_cmi, Some(0));
            assert_eq!(r.group_class.as_deref(), Some("Z1|Z2"));
        }
        // at L = 2 the two bands exhaust the torus, so C is empty and the
        // qCMI is the mutual information 2 + 2 - 0 of the pure state
        assert!(recs[..4].iter().all(|r| r.qcmi == Some(4)));
        assert!(recs[4..].iter().all(|r| r.qcmi == Some(0)));
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let mut c = SweepConfig::toric(vec![3, 4], vec![0.2, 0.8], 3, 5);
        c.threads = Some(3);
        assert_eq!(run_sweep(&c).unwrap(), run_sweep_sequential(&c).unwrap());
    }

    #[test]
    fn logical_count_matches_sampled_code() {
        let c = SweepConfig {
            family: CodeFamily::Hgp,
            sizes: vec![8],
            model: ErrorModelKind::LongRange,
            q: 2,
            p_grid: vec![0.3],
            realizations: 3,
            seed: 9,
            diagnostics: DiagnosticSet::none(),
            regions: RegionConfig::default(),
            rcc_k: None,
            rcc_depth: None,
            threads: None,
        };
        for r in run_sweep(&c).unwrap() {
            assert_eq!(r.error, None);
            assert_eq!(c.logical_count(r.size, r.seed).unwrap(), r.k);
        }
    }
}
