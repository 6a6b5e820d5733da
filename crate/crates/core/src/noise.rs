//! Coherent Clifford error channels.
//!
//! Every model visits its sites in ascending order and, with probability
//! `p` per site, appends a uniformly random Clifford on a support attached
//! to that site. The realization is the ordered gate list; the channel is
//! conjugation by the product of the embedded gates.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{Geometry, StabilizerCode, ToricLattice};
use crate::error::{Error, Result};
use crate::pauli::{random_clifford, CliffordUnitary, PauliOperator};
use crate::stabsim::StabilizerState;

/// Random-walk attempts before falling back to padding.
pub const WALK_ATTEMPTS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorModelKind {
    /// One 4-qubit gate per toric plaquette.
    ToricPlaquette,
    /// Site `i` plus `q - 1` uniformly chosen other qubits.
    LongRange,
    /// `q` nearby qubits: a walk on the adjacency graph, or a contiguous
    /// window on a chain.
    Local,
}

impl ErrorModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ErrorModelKind::ToricPlaquette => "plaquette",
            ErrorModelKind::LongRange => "long",
            ErrorModelKind::Local => "local",
        }
    }
}

impl fmt::Display for ErrorModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErrorModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plaquette" | "toric_plaquette" => Ok(Self::ToricPlaquette),
            "long" | "long_range" => Ok(Self::LongRange),
            "local" => Ok(Self::Local),
            _ => Err(Error::InvalidArgument(format!("unknown error model {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorModelConfig {
    pub kind: ErrorModelKind,
    pub p: f64,
    pub q: usize,
    pub seed: u64,
}

impl ErrorModelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidArgument(format!("p = {} outside [0, 1]", self.p)));
        }
        if self.q < 1 {
            return Err(Error::InvalidArgument("q must be at least 1".into()));
        }
        if self.kind == ErrorModelKind::ToricPlaquette && self.q != 4 {
            return Err(Error::InvalidArgument("plaquette errors act on 4 qubits".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorGate {
    pub support: Vec<usize>,
    pub gate: CliffordUnitary,
}

/// Ordered gate list on `n` qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorRealization {
    pub n: usize,
    pub gates: Vec<ErrorGate>,
}

#[derive(Serialize, Deserialize)]
struct GateDocument {
    support: Vec<usize>,
    x_images: Vec<PauliOperator>,
    z_images: Vec<PauliOperator>,
}

#[derive(Serialize, Deserialize)]
struct RealizationDocument {
    n: usize,
    gates: Vec<GateDocument>,
}

impl ErrorRealization {
    pub fn empty(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn push(&mut self, support: Vec<usize>, gate: CliffordUnitary) -> Result<()> {
        if gate.n() != support.len() {
            return Err(Error::DimensionMismatch {
                expected: gate.n(),
                found: support.len(),
            });
        }
        let mut sorted = support.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != support.len() || sorted.last().is_some_and(|&m| m >= self.n) {
            return Err(Error::InvalidArgument(format!(
                "gate support {support:?} is not a set of qubits below {}",
                self.n
            )));
        }
        self.gates.push(ErrorGate { support, gate });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// The global Clifford: the last gate acts last.
    pub fn unitary(&self) -> CliffordUnitary {
        let mut u = CliffordUnitary::identity(self.n);
        for g in &self.gates {
            let e = g.gate.embed(&g.support, self.n).expect("validated support");
            u = e.compose(&u).expect("same size");
        }
        u
    }

    /// `U P U†`.
    pub fn conjugate(&self, p: &PauliOperator) -> Result<PauliOperator> {
        if p.n() != self.n {
            return Err(Error::QubitMismatch {
                left: self.n,
                right: p.n(),
            });
        }
        let mut q = p.clone();
        for g in &self.gates {
            g.gate.conjugate_on_support(&mut q, &g.support);
        }
        Ok(q)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = RealizationDocument {
            n: self.n,
            gates: self
                .gates
                .iter()
                .map(|g| GateDocument {
                    support: g.support.clone(),
                    x_images: (0..g.gate.n()).map(|j| g.gate.x_image(j).clone()).collect(),
                    z_images: (0..g.gate.n()).map(|j| g.gate.z_image(j).clone()).collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: RealizationDocument = serde_json::from_str(text)?;
        let mut out = Self::empty(doc.n);
        for g in doc.gates {
            out.push(g.support, CliffordUnitary::from_images(g.x_images, g.z_images)?)?;
        }
        Ok(out)
    }
}

/// Uniform 4-qubit Clifford on each plaquette with probability `p`.
pub fn sample_toric_errors<R: Rng + ?Sized>(
    code: &StabilizerCode,
    p: f64,
    rng: &mut R,
) -> Result<ErrorRealization> {
    let Geometry::Toric { l } = code.geometry else {
        return Err(Error::InvalidArgument("plaquette errors need a toric code".into()));
    };
    check_p(p)?;
    let lat = ToricLattice::new(l);
    let mut out = ErrorRealization::empty(code.n);
    for plaq in lat.plaquettes() {
        if rng.random_bool(p) {
            out.gates.push(ErrorGate {
                support: plaq.to_vec(),
                gate: random_clifford(4, rng),
            });
        }
    }
    Ok(out)
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("p = {p} outside [0, 1]")))
    }
}

fn check_q(q: usize, n: usize) -> Result<()> {
    if q == 0 || q > n {
        Err(Error::InvalidArgument(format!("support size q = {q} must lie in 1..={n}")))
    } else {
        Ok(())
    }
}

/// Support `[i, j_1, …, j_{q-1}]` with the `j` distinct, uniform, and `≠ i`.
pub fn long_range_support<R: Rng + ?Sized>(n: usize, i: usize, q: usize, rng: &mut R) -> Vec<usize> {
    let mut support = Vec::with_capacity(q);
    support.push(i);
    for j in index::sample(rng, n - 1, q - 1) {
        support.push(if j < i { j } else { j + 1 });
    }
    support
}

pub fn sample_long_range<R: Rng + ?Sized>(
    code: &StabilizerCode,
    p: f64,
    q: usize,
    rng: &mut R,
) -> Result<ErrorRealization> {
    check_p(p)?;
    check_q(q, code.n)?;
    let mut out = ErrorRealization::empty(code.n);
    for i in 0..code.n {
        if rng.random_bool(p) {
            let support = long_range_support(code.n, i, q, rng);
            out.gates.push(ErrorGate {
                support,
                gate: random_clifford(q, rng),
            });
        }
    }
    Ok(out)
}

/// `q` contiguous chain qubits containing `i`, shifted inward at the right
/// boundary.
pub fn chain_support(n: usize, i: usize, q: usize) -> Vec<usize> {
    let start = i.min(n - q);
    (start..start + q).collect()
}

/// Distinct qubits of a simple random walk of `q - 1` steps from `i`,
/// redrawn until `q` distinct qubits are visited. After
/// [`WALK_ATTEMPTS`] failures the last walk is padded with the nearest
/// unvisited qubits in breadth-first order from `i`.
pub fn walk_support<R: Rng + ?Sized>(
    adjacency: &[Vec<usize>],
    i: usize,
    q: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let mut visited = Vec::with_capacity(q);
    for _ in 0..WALK_ATTEMPTS {
        visited.clear();
        visited.push(i);
        let mut at = i;
        for _ in 1..q {
            let nbrs = &adjacency[at];
            if nbrs.is_empty() {
                break;
            }
            at = nbrs[rng.random_range(0..nbrs.len())];
            if !visited.contains(&at) {
                visited.push(at);
            }
        }
        if visited.len() == q {
            return Ok(visited);
        }
    }
    let mut seen = vec![false; adjacency.len()];
    seen[i] = true;
    let mut queue = VecDeque::from([i]);
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                if visited.len() < q && !visited.contains(&w) {
                    visited.push(w);
                }
                queue.push_back(w);
            }
        }
        if visited.len() == q {
            return Ok(visited);
        }
    }
    Err(Error::InvalidArgument(format!(
        "the component of qubit {i} has fewer than {q} qubits"
    )))
}

pub fn sample_local<R: Rng + ?Sized>(
    code: &StabilizerCode,
    p: f64,
    q: usize,
    rng: &mut R,
) -> Result<ErrorRealization> {
    check_p(p)?;
    check_q(q, code.n)?;
    let adjacency = match code.geometry {
        Geometry::Chain => None,
        Geometry::None => {
            return Err(Error::InvalidArgument("local errors need code geometry".into()));
        }
        _ => Some(code.adjacency()),
    };
    let mut out = ErrorRealization::empty(code.n);
    for i in 0..code.n {
        if rng.random_bool(p) {
            let support = match &adjacency {
                None => chain_support(code.n, i, q),
                Some(adj) => walk_support(adj, i, q, rng)?,
            };
            out.gates.push(ErrorGate {
                support,
                gate: random_clifford(q, rng),
            });
        }
    }
    Ok(out)
}

/// Samples a realization of `kind` with the given `p` and `q`.
pub fn sample_errors<R: Rng + ?Sized>(
    code: &StabilizerCode,
    kind: ErrorModelKind,
    p: f64,
    q: usize,
    rng: &mut R,
) -> Result<ErrorRealization> {
    match kind {
        ErrorModelKind::ToricPlaquette => sample_toric_errors(code, p, rng),
        ErrorModelKind::LongRange => sample_long_range(code, p, q, rng),
        ErrorModelKind::Local => sample_local(code, p, q, rng),
    }
}

/// Applies the gates in order. The state may carry extra qubits beyond
/// `e.n` (reference systems); they are left untouched.
pub fn apply_realization(state: &StabilizerState, e: &ErrorRealization) -> Result<StabilizerState> {
    if state.n() < e.n {
        return Err(Error::QubitMismatch {
            left: state.n(),
            right: e.n,
        });
    }
    let mut out = state.clone();
    for g in &e.gates {
        out.apply_gate(&g.gate, &g.support)?;
    }
    Ok(out)
}
