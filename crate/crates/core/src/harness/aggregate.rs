use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SweepRecord;
use crate::codes::CodeFamily;
use crate::diagnostics::toric_class_labels;
use crate::error::{Error, Result};
use crate::noise::ErrorModelKind;

/// Sample mean and its standard error `s / √m` (zero for `m = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Self> {
        let m = values.len();
        if m == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / m as f64;
        let stderr = if m < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
            (var / m as f64).sqrt()
        };
        Some(Self { mean, stderr, count: m })
    }
}

/// Per-point summary of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub family: CodeFamily,
    pub model: ErrorModelKind,
    pub q: usize,
    pub size: usize,
    pub p: f64,
    pub realizations: usize,
    pub failures: usize,
    pub delta: Option<Stat>,
    /// `δ = Δ / k`.
    pub delta_per_logical: Option<Stat>,
    pub p_rec: Option<Stat>,
    pub coherent_info: Option<Stat>,
    pub per_logical_qci: Option<Stat>,
    pub varphi: Option<Stat>,
    pub qcmi: Option<Stat>,
    pub classical_cmi: Option<Stat>,
    /// Counts over the 15 toric labels (all present, zeros included) when
    /// any record carries a class.
    pub group_classes: BTreeMap<String, usize>,
}

fn stat<F: Fn(&SweepRecord) -> Option<f64>>(group: &[&SweepRecord], f: F) -> Option<Stat> {
    let v: Vec<f64> = group.iter().filter_map(|r| f(r)).collect();
    Stat::of(&v)
}

/// Groups records by `(size, p)` in order of first appearance.
pub fn aggregate(records: &[SweepRecord]) -> Result<Vec<Aggregate>> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no records to aggregate".into()));
    }
    let mut order: Vec<(usize, u64)> = Vec::new();
    let mut groups: BTreeMap<(usize, u64), Vec<&SweepRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.size, r.p.to_bits());
        groups
            .entry(key)
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r);
    }
    let labels = toric_class_labels();
    Ok(order
        .iter()
        .map(|key| {
            let g = &groups[key];
            let first = g[0];
            let mut group_classes = BTreeMap::new();
            if g.iter().any(|r| r.group_class.is_some()) {
                for l in &labels {
                    group_classes.insert(l.label.clone(), 0);
                }
                for c in g.iter().filter_map(|r| r.group_class.as_ref()) {
                    *group_classes.entry(c.clone()).or_insert(0) += 1;
                }
            }
            Aggregate {
                family: first.family,
                model: first.model,
                q: first.q,
                size: first.size,
                p: first.p,
                realizations: g.len(),
                failures: g.iter().filter(|r| r.error.is_some()).count(),
                delta: stat(g, |r| r.delta.map(|d| d as f64)),
                delta_per_logical: stat(g, SweepRecord::delta_per_logical),
                p_rec: stat(g, |r| r.p_rec),
                coherent_info: stat(g, |r| r.coherent_info.map(|c| c as f64)),
                per_logical_qci: stat(g, |r| r.per_logical_qci),
                varphi: stat(g, |r| r.varphi),
                qcmi: stat(g, |r| r.qcmi.map(|c| c as f64)),
                classical_cmi: stat(g, |r| r.classical_cmi.map(|c| c as f64)),
                group_classes,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_balanced_samples() {
        let s = Stat::of(&[3.0; 5]).unwrap();
        assert_eq!((s.mean, s.stderr, s.count), (3.0, 0.0, 5));
        let s = Stat::of(&[1.0, 3.0, 1.0, 3.0]).unwrap();
        assert_eq!(s.mean, 2.0);
        // s² = 4/3, stderr = √(1/3)
        assert!((s.stderr - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(Stat::of(&[]).is_none());
        assert_eq!(Stat::of(&[7.0]).unwrap().stderr, 0.0);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(aggregate(&[]).is_err());
    }
}
