use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{aggregate, Stat, SweepRecord};
use crate::error::{Error, Result};

/// One `(size, p)` point of an averaged observable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapsePoint {
    pub size: f64,
    pub p: f64,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseOptions {
    pub pc_range: (f64, f64),
    pub nu_range: (f64, f64),
    /// Grid points per axis for the coarse search.
    pub grid: usize,
    /// Bootstrap refits; 0 skips error estimation.
    pub bootstrap: usize,
    pub seed: u64,
}

impl Default for CollapseOptions {
    fn default() -> Self {
        Self {
            pc_range: (0.0, 1.0),
            nu_range: (0.5, 5.0),
            grid: 41,
            bootstrap: 100,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseFit {
    pub p_c: f64,
    pub nu: f64,
    /// Mean squared stderr-weighted deviation from the other sizes'
    /// interpolated curves at the optimum.
    pub cost: f64,
    pub p_c_err: f64,
    pub nu_err: f64,
    /// Set when the optimum sits on the `ν` boundary or the cost barely
    /// varies in `ν` or `p_c`, i.e. the data do not pin down a collapse.
    pub degenerate: bool,
}

/// Returned when too few points overlap another size's scaled range.
const NO_OVERLAP_COST: f64 = 1e12;

struct Curve {
    x: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
}

impl Curve {
    /// Linear interpolation of `(y, dy)` at `x`, if inside the range.
    fn at(&self, x: f64) -> Option<(f64, f64)> {
        let n = self.x.len();
        if n < 2 || x < self.x[0] || x > self.x[n - 1] {
            return None;
        }
        let j = self.x.partition_point(|&v| v < x).clamp(1, n - 1);
        let (x0, x1) = (self.x[j - 1], self.x[j]);
        let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
        let lerp = |a: &[f64]| a[j - 1] + t * (a[j] - a[j - 1]);
        Some((lerp(&self.y), lerp(&self.dy)))
    }
}

fn by_size(data: &[CollapsePoint]) -> Vec<(f64, Vec<CollapsePoint>)> {
    let mut groups: BTreeMap<u64, Vec<CollapsePoint>> = BTreeMap::new();
    for d in data {
        groups.entry(d.size.to_bits()).or_default().push(*d);
    }
    groups
        .into_iter()
        .map(|(k, mut v)| {
            v.sort_by(|a, b| a.p.total_cmp(&b.p));
            (f64::from_bits(k), v)
        })
        .collect()
}

/// Collapse quality at `(p_c, ν)` on the scaled variable
/// `x = L^{1/ν}(p − p_c)`.
pub fn collapse_cost(data: &[CollapsePoint], p_c: f64, nu: f64) -> f64 {
    cost_grouped(&by_size(data), p_c, nu)
}

fn cost_grouped(groups: &[(f64, Vec<CollapsePoint>)], p_c: f64, nu: f64) -> f64 {
    if nu <= 0.0 || !nu.is_finite() || !p_c.is_finite() {
        return NO_OVERLAP_COST;
    }
    let curves: Vec<Curve> = groups
        .iter()
        .map(|(l, pts)| {
            let s = l.powf(1.0 / nu);
            Curve {
                x: pts.iter().map(|d| s * (d.p - p_c)).collect(),
                y: pts.iter().map(|d| d.mean).collect(),
                dy: pts.iter().map(|d| d.stderr).collect(),
            }
        })
        .collect();
    let (lo, hi) = groups
        .iter()
        .flat_map(|(_, v)| v.iter().map(|d| d.mean))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    let floor = 1e-24 + (1e-6 * (hi - lo)).powi(2);
    let total: usize = groups.iter().map(|(_, v)| v.len()).sum();
    let mut sum = 0.0;
    let mut pairs = 0usize;
    let mut covered = 0usize;
    for (i, ci) in curves.iter().enumerate() {
        for k in 0..ci.x.len() {
            let mut hit = false;
            for (j, cj) in curves.iter().enumerate() {
                if i == j {
                    continue;
                }
                if let Some((y, dy)) = cj.at(ci.x[k]) {
                    let var = (ci.dy[k].powi(2) + dy.powi(2)).max(floor);
                    sum += (ci.y[k] - y).powi(2) / var;
                    pairs += 1;
                    hit = true;
                }
            }
            covered += hit as usize;
        }
    }
    if pairs == 0 || 2 * covered < total {
        return NO_OVERLAP_COST;
    }
    sum / pairs as f64
}

/// Nelder–Mead minimization from `x0` with initial simplex offsets `step`.
/// Stops when the simplex's cost spread falls below `tol` or after
/// `max_iter` iterations; returns the best vertex and its cost.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], step: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, f64) {
    let d = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..d {
        let mut v = x0.to_vec();
        v[i] += step[i];
        let c = f(&v);
        simplex.push((v, c));
    }
    let combo = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[d].1 - simplex[0].1).abs() <= tol * (1.0 + simplex[0].1.abs()) {
            break;
        }
        let mut centroid = vec![0.0; d];
        for (v, _) in &simplex[..d] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / d as f64;
            }
        }
        let worst = simplex[d].clone();
        let reflected = combo(&centroid, &worst.0, -1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = combo(&centroid, &worst.0, -2.0);
            let fe = f(&expanded);
            simplex[d] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (reflected, fr);
        } else {
            let contracted = if fr < worst.1 {
                combo(&centroid, &reflected, 0.5)
            } else {
                combo(&centroid, &worst.0, 0.5)
            };
            let fc = f(&contracted);
            if fc < worst.1.min(fr) {
                simplex[d] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for s in simplex.iter_mut().skip(1) {
                    s.0 = combo(&best, &s.0, 0.5);
                    s.1 = f(&s.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![(lo + hi) / 2.0];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn check_data(data: &[CollapsePoint]) -> Result<Vec<(f64, Vec<CollapsePoint>)>> {
    let groups = by_size(data);
    if groups.len() < 2 {
        return Err(Error::InsufficientData("collapse needs at least two sizes".into()));
    }
    if groups.iter().any(|(_, v)| v.len() < 4) {
        return Err(Error::InsufficientData("collapse needs at least four p points per size".into()));
    }
    Ok(groups)
}

/// Boxed objective: outside the search domain the cost grows with the
/// distance to it, so the simplex is pushed back inside.
fn boxed_cost(groups: &[(f64, Vec<CollapsePoint>)], opts: &CollapseOptions, v: &[f64]) -> f64 {
    let (pc, nu) = (v[0], v[1]);
    let over = |x: f64, (lo, hi): (f64, f64)| (lo - x).max(0.0) + (x - hi).max(0.0);
    let out = over(pc, opts.pc_range) + over(nu, opts.nu_range);
    if out > 0.0 {
        return NO_OVERLAP_COST * (1.0 + out);
    }
    cost_grouped(groups, pc, nu)
}

fn refine(groups: &[(f64, Vec<CollapsePoint>)], opts: &CollapseOptions, start: [f64; 2]) -> (f64, f64, f64) {
    let n = opts.grid.max(2) as f64;
    let step = [
        (opts.pc_range.1 - opts.pc_range.0) / n,
        (opts.nu_range.1 - opts.nu_range.0) / n,
    ];
    let (v, c) = nelder_mead(|v| boxed_cost(groups, opts, v), &start, &step, 1e-10, 2000);
    (v[0], v[1], c)
}

fn fit_point(groups: &[(f64, Vec<CollapsePoint>)], opts: &CollapseOptions) -> (f64, f64, f64, bool) {
    let pcs = linspace(opts.pc_range.0, opts.pc_range.1, opts.grid);
    let nus = linspace(opts.nu_range.0, opts.nu_range.1, opts.grid);
    let mut best = (f64::INFINITY, 0, 0);
    let mut table = vec![vec![0.0; nus.len()]; pcs.len()];
    for (i, &pc) in pcs.iter().enumerate() {
        for (j, &nu) in nus.iter().enumerate() {
            let c = cost_grouped(groups, pc, nu);
            table[i][j] = c;
            if c < best.0 {
                best = (c, i, j);
            }
        }
    }
    let (pc, nu, cost) = refine(groups, opts, [pcs[best.1], nus[best.2]]);
    let flat = |row: &[f64]| {
        let finite: Vec<f64> = row.iter().copied().filter(|c| *c < NO_OVERLAP_COST).collect();
        let (lo, hi) = finite
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &c| (a.min(c), b.max(c)));
        finite.len() < 2 || hi - lo <= 1e-3 * (1.0 + lo.abs())
    };
    let nu_profile = &table[best.1];
    let pc_profile: Vec<f64> = table.iter().map(|r| r[best.2]).collect();
    let span = opts.nu_range.1 - opts.nu_range.0;
    let on_edge = nu >= opts.nu_range.1 - 1e-3 * span || nu <= opts.nu_range.0 + 1e-3 * span;
    let degenerate = on_edge || flat(nu_profile) || flat(&pc_profile) || cost >= NO_OVERLAP_COST;
    (pc, nu, cost, degenerate)
}

fn std_dev(v: &[f64]) -> f64 {
    Stat::of(v).map_or(0.0, |s| s.stderr * (s.count as f64).sqrt())
}

fn bootstrap<G>(point: (f64, f64), opts: &CollapseOptions, mut resample: G) -> (f64, f64)
where
    G: FnMut(&mut ChaCha8Rng) -> Vec<CollapsePoint>,
{
    if opts.bootstrap == 0 {
        return (0.0, 0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pcs = Vec::with_capacity(opts.bootstrap);
    let mut nus = Vec::with_capacity(opts.bootstrap);
    for _ in 0..opts.bootstrap {
        let data = resample(&mut rng);
        let groups = by_size(&data);
        let (pc, nu, _) = refine(&groups, opts, [point.0, point.1]);
        pcs.push(pc);
        nus.push(nu);
    }
    (std_dev(&pcs), std_dev(&nus))
}

/// Coarse grid over the search box, then simplex refinement. Errors come
/// from refits to tables whose means are redrawn from `N(mean, stderr²)`.
pub fn collapse_fit(data: &[CollapsePoint], opts: &CollapseOptions) -> Result<CollapseFit> {
    let groups = check_data(data)?;
    let (p_c, nu, cost, degenerate) = fit_point(&groups, opts);
    let (p_c_err, nu_err) = bootstrap((p_c, nu), opts, |rng| {
        data.iter()
            .map(|d| {
                let z: f64 = rng.sample(StandardNormal);
                CollapsePoint {
                    mean: d.mean + d.stderr * z,
                    ..*d
                }
            })
            .collect()
    });
    Ok(CollapseFit {
        p_c,
        nu,
        cost,
        p_c_err,
        nu_err,
        degenerate,
    })
}

fn table_from(records: &[&SweepRecord], value: &dyn Fn(&SweepRecord) -> Option<f64>) -> Vec<CollapsePoint> {
    let mut groups: BTreeMap<(usize, u64), Vec<f64>> = BTreeMap::new();
    for r in records {
        if let Some(v) = value(r) {
            groups.entry((r.size, r.p.to_bits())).or_default().push(v);
        }
    }
    groups
        .into_iter()
        .filter_map(|((size, p), v)| {
            Stat::of(&v).map(|s| CollapsePoint {
                size: size as f64,
                p: f64::from_bits(p),
                mean: s.mean,
                stderr: s.stderr,
            })
        })
        .collect()
}

/// Collapse of a per-realization observable; errors come from refits to
/// tables rebuilt from records resampled with replacement within each
/// point.
pub fn collapse_fit_records(
    records: &[SweepRecord],
    value: &dyn Fn(&SweepRecord) -> Option<f64>,
    opts: &CollapseOptions,
) -> Result<CollapseFit> {
    aggregate(records)?;
    let all: Vec<&SweepRecord> = records.iter().collect();
    let data = table_from(&all, value);
    let groups = check_data(&data)?;
    let (p_c, nu, cost, degenerate) = fit_point(&groups, opts);
    let mut points: BTreeMap<(usize, u64), Vec<&SweepRecord>> = BTreeMap::new();
    for r in records {
        points.entry((r.size, r.p.to_bits())).or_default().push(r);
    }
    let (p_c_err, nu_err) = bootstrap((p_c, nu), opts, |rng| {
        let mut sample: Vec<&SweepRecord> = Vec::with_capacity(records.len());
        for group in points.values() {
            for _ in 0..group.len() {
                sample.push(group.choose(rng).expect("nonempty group"));
            }
        }
        table_from(&sample, value)
    });
    Ok(CollapseFit {
        p_c,
        nu,
        cost,
        p_c_err,
        nu_err,
        degenerate,
    })
}

/// Mean per-logical coherent information at code size `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpFitPoint {
    pub n: f64,
    pub p: f64,
    pub mean: f64,
}

/// `ln Ī = −h / N` fitted through the origin in `1/N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub p: f64,
    pub h: f64,
    /// Root-mean-square residual of `ln Ī`.
    pub residual: f64,
    /// `1 − SS_res / Σ (ln Ī)²`; 1 when every `ln Ī` is zero.
    pub linearity: f64,
    pub sizes: usize,
}

/// Least-squares `h(p)` per `p`, in order of first appearance.
pub fn exp_fit_per_logical_qci(data: &[ExpFitPoint]) -> Result<Vec<ExpFit>> {
    let mut order = Vec::new();
    let mut groups: BTreeMap<u64, Vec<ExpFitPoint>> = BTreeMap::new();
    for d in data {
        if d.mean <= 0.0 || d.mean.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "nonpositive mean {} at N = {}, p = {}",
                d.mean, d.n, d.p
            )));
        }
        let key = d.p.to_bits();
        if !groups.contains_key(&key) {
            order.push(key);
        }
        groups.entry(key).or_default().push(*d);
    }
    order
        .iter()
        .map(|key| {
            let g = &groups[key];
            let mut sizes: Vec<u64> = g.iter().map(|d| d.n.to_bits()).collect();
            sizes.sort_unstable();
            sizes.dedup();
            if sizes.len() < 3 {
                return Err(Error::InsufficientData(format!(
                    "exponential fit needs three sizes at p = {}",
                    f64::from_bits(*key)
                )));
            }
            let xs: Vec<f64> = g.iter().map(|d| 1.0 / d.n).collect();
            let ys: Vec<f64> = g.iter().map(|d| d.mean.ln()).collect();
            let sxx: f64 = xs.iter().map(|x| x * x).sum();
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
            let h = -sxy / sxx;
            let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y + h * x).powi(2)).sum();
            let ss_tot: f64 = ys.iter().map(|y| y * y).sum();
            Ok(ExpFit {
                p: f64::from_bits(*key),
                h,
                residual: (ss_res / xs.len() as f64).sqrt(),
                linearity: if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot },
                sizes: sizes.len(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(f: fn(f64) -> f64, pc: f64, nu: f64, noise: f64, seed: u64) -> Vec<CollapsePoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        for l in [8.0, 16.0, 32.0, 64.0] {
            for i in 0..=20 {
                let p = pc - 0.2 + 0.02 * i as f64;
                let x = f64::powf(l, 1.0 / nu) * (p - pc);
                let z: f64 = rng.sample(StandardNormal);
                out.push(CollapsePoint {
                    size: l,
                    p,
                    mean: f(x) + noise * z,
                    stderr: noise.max(0.01),
                });
            }
        }
        out
    }

    #[test]
    fn nelder_mead_quadratic() {
        let (v, c) = nelder_mead(
            |v| (v[0] - 1.0).powi(2) + 3.0 * (v[1] + 2.0).powi(2),
            &[0.0, 0.0],
            &[0.5, 0.5],
            1e-14,
            5000,
        );
        assert!((v[0] - 1.0).abs() < 1e-5 && (v[1] + 2.0).abs() < 1e-5 && c < 1e-9);
    }

    #[test]
    fn interpolation() {
        let c = Curve {
            x: vec![0.0, 1.0, 3.0],
            y: vec![0.0, 2.0, 6.0],
            dy: vec![1.0, 1.0, 3.0],
        };
        assert_eq!(c.at(0.5), Some((1.0, 1.0)));
        assert_eq!(c.at(2.0), Some((4.0, 2.0)));
        assert_eq!(c.at(3.0), Some((6.0, 3.0)));
        assert_eq!(c.at(3.5), None);
    }

    #[test]
    fn noiseless_collapse_is_exact() {
        let data = synthetic(f64::tanh, 0.5, 2.0, 0.0, 1);
        // only the piecewise-linear interpolation error remains
        assert!(collapse_cost(&data, 0.5, 2.0) < 0.05);
        assert!(collapse_cost(&data, 0.45, 2.0) > 1.0);
    }

    #[test]
    fn tanh_recovery() {
        let data = synthetic(f64::tanh, 0.5, 2.0, 0.01, 2);
        let opts = CollapseOptions {
            bootstrap: 10,
            ..Default::default()
        };
        let fit = collapse_fit(&data, &opts).unwrap();
        assert!((fit.p_c - 0.5).abs() < 0.01, "{fit:?}");
        assert!((fit.nu - 2.0).abs() < 0.1, "{fit:?}");
        assert!(!fit.degenerate);
        assert!(fit.p_c_err > 0.0 && fit.nu_err > 0.0);
    }

    #[test]
    fn size_independent_data_is_degenerate() {
        let data: Vec<CollapsePoint> = [8.0, 16.0]
            .iter()
            .flat_map(|&l| {
                (0..10).map(move |i| CollapsePoint {
                    size: l,
                    p: 0.1 * i as f64,
                    mean: 0.3 * i as f64,
                    stderr: 0.01,
                })
            })
            .collect();
        let fit = collapse_fit(
            &data,
            &CollapseOptions {
                bootstrap: 0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(fit.degenerate, "{fit:?}");
    }

    #[test]
    fn insufficient_data() {
        let data = synthetic(f64::tanh, 0.5, 2.0, 0.0, 1);
        let one: Vec<_> = data.iter().filter(|d| d.size == 8.0).copied().collect();
        assert!(collapse_fit(&one, &CollapseOptions::default()).is_err());
        let few: Vec<_> = data.iter().filter(|d| d.p < 0.35).copied().collect();
        assert!(collapse_fit(&few, &CollapseOptions::default()).is_err());
    }

    #[test]
    fn exact_exponential() {
        let data: Vec<ExpFitPoint> = [16.0, 32.0, 64.0, 128.0]
            .iter()
            .flat_map(|&n| {
                [(0.0, 0.0), (0.5, 3.0)].map(|(p, h): (f64, f64)| ExpFitPoint {
                    n,
                    p,
                    mean: (-h / n).exp(),
                })
            })
            .collect();
        let fits = exp_fit_per_logical_qci(&data).unwrap();
        assert_eq!(fits.len(), 2);
        assert_eq!(fits[0].h, 0.0);
        assert_eq!(fits[0].linearity, 1.0);
        assert!((fits[1].h - 3.0).abs() < 1e-6);
        assert!(fits[1].residual < 1e-12 && (fits[1].linearity - 1.0).abs() < 1e-12);
        let mut bad = data.clone();
        bad[0].mean = 0.0;
        assert!(exp_fit_per_logical_qci(&bad).is_err());
        assert!(exp_fit_per_logical_qci(&data[..4]).is_err());
    }
}
