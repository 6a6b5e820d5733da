//! Randomized cross-checks of the stabilizer kernels against the dense
//! reference in `stabphase-oracle`.
//!
//! Each suite draws its own instances from the given stream and returns a
//! [`SuiteReport`] counting mismatches; nothing panics on disagreement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stabphase::bitlinalg::BitVector;
use stabphase::codes::{build_hgp, build_ldpc, build_rcc, build_toric, StabilizerCode};
use stabphase::diagnostics::{coherent_information, delta_logical};
use stabphase::noise::{apply_realization, sample_errors, ErrorModelKind, ErrorRealization};
use stabphase::pauli::{random_clifford, CliffordUnitary, PauliOperator};
use stabphase::stabsim::StabilizerState;
use stabphase_oracle as dense;
use stabphase_oracle::CMatrix;

/// Value tolerance for dense comparisons.
pub const TOLERANCE: f64 = 1e-10;

/// Outcome of one suite.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub instances: usize,
    pub checks: usize,
    pub mismatches: usize,
    /// The first few mismatch descriptions.
    pub details: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            ..Default::default()
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.mismatches += 1;
            if self.details.len() < 10 {
                self.details.push(what());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.checks > 0
    }
}

impl std::fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} instances, {} checks, {} mismatches",
            self.name, self.instances, self.checks, self.mismatches
        )?;
        for d in &self.details {
            write!(f, "\n  {d}")?;
        }
        Ok(())
    }
}

fn strings(ops: &[PauliOperator]) -> Vec<String> {
    ops.iter().map(ToString::to_string).collect()
}

fn dense_state(state: &StabilizerState) -> CMatrix {
    let gens = strings(state.generators());
    let refs: Vec<&str> = gens.iter().map(String::as_str).collect();
    dense::stabilizer_density(state.n(), &refs).expect("well-formed Pauli strings")
}

fn dense_ops(ops: &[PauliOperator]) -> Vec<CMatrix> {
    ops.iter()
        .map(|o| dense::pauli_matrix(&o.to_string()).expect("well-formed Pauli string"))
        .collect()
}

/// Dense unitary of a Clifford tableau (up to global phase).
pub fn dense_clifford(u: &CliffordUnitary) -> CMatrix {
    let xs: Vec<String> = (0..u.n()).map(|j| u.x_image(j).to_string()).collect();
    let zs: Vec<String> = (0..u.n()).map(|j| u.z_image(j).to_string()).collect();
    let xr: Vec<&str> = xs.iter().map(String::as_str).collect();
    let zr: Vec<&str> = zs.iter().map(String::as_str).collect();
    dense::clifford_from_images(&xr, &zr).expect("well-formed Pauli strings")
}

/// Random `(x|z)` nonzero subset product of the images of `Z_j` under `v`,
/// with a random sign.
fn random_isotropic_element<R: Rng>(v: &CliffordUnitary, rng: &mut R) -> PauliOperator {
    let n = v.n();
    loop {
        let mut p = PauliOperator::identity(n);
        for j in 0..n {
            if rng.random::<bool>() {
                p = p.multiply(v.z_image(j)).expect("same size");
            }
        }
        if !p.is_identity() {
            return if rng.random::<bool>() { p.negated() } else { p };
        }
    }
}

/// A random pure or mixed stabilizer state on `n` qubits: the images of
/// the first `g` of the `Z_j` under a uniform Clifford.
pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> (StabilizerState, CliffordUnitary) {
    let v = random_clifford(n, rng);
    let g = if rng.random::<bool>() { n } else { rng.random_range(0..=n) };
    let gens: Vec<PauliOperator> = (0..g).map(|j| v.z_image(j).clone()).collect();
    (StabilizerState::from_generators(n, gens).expect("images are independent"), v)
}

fn random_region<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    (0..n).filter(|_| rng.random::<bool>()).collect()
}

/// Measurement distribution, sampled post-measurement state, region
/// entropies, qCMI and the syndrome-averaged state against the dense
/// reference on random instances with at most `max_qubits` qubits and at
/// most six observables.
pub fn measurement_suite(instances: usize, max_qubits: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("measurement vs dense");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for inst in 0..instances {
        rep.instances += 1;
        let n = rng.random_range(1..=max_qubits);
        let (state, v) = random_state(n, &mut rng);
        // aligned observables often have deterministic outcomes
        let w = if rng.random::<bool>() { v } else { random_clifford(n, &mut rng) };
        let m = rng.random_range(1..=6);
        let obs: Vec<PauliOperator> = (0..m).map(|_| random_isotropic_element(&w, &mut rng)).collect();
        let rho = dense_state(&state);
        let dobs = dense_ops(&obs);
        let tag = || format!("instance {inst}: state {:?}, observables {:?}", state.dump(), strings(&obs));

        let (q, signs, rank_t) = match state.constraint_system(&obs) {
            Ok(c) => c,
            Err(e) => {
                rep.check(false, || format!("{}: {e}", tag()));
                continue;
            }
        };
        let born = dense::born_distribution(&rho, &dobs);
        let allowed = (m - q.rows()) as f64;
        rep.check(rank_t <= m, || format!("{}: rank_T {rank_t} > m", tag()));
        for (s, &pd) in born.iter().enumerate() {
            let mut syn = BitVector::zeros(m);
            for i in 0..m {
                syn.set(i, (s >> i) & 1 == 1);
            }
            let sat = (0..q.rows()).all(|k| q.row(k).dot(&syn) == signs.get(k));
            let ps = if sat { (-allowed).exp2() } else { 0.0 };
            let support_ok = (pd > TOLERANCE) == (ps > 0.0);
            rep.check(support_ok && (pd - ps).abs() < TOLERANCE, || {
                format!("{}: syndrome {s:b} dense {pd} stabilizer {ps}", tag())
            });
        }

        match state.measure_commuting_set(&obs, &mut rng) {
            Ok(out) => {
                let bits: Vec<bool> = (0..m).map(|i| out.syndrome.get(i)).collect();
                let proj = dense::syndrome_projector(n, &dobs, &bits);
                match dense::project(&rho, &proj) {
                    Some(post) => {
                        let d = dense::max_abs_diff(&post, &dense_state(&out.post_state));
                        rep.check(d < TOLERANCE, || format!("{}: post-state differs by {d}", tag()));
                    }
                    None => rep.check(false, || format!("{}: sampled a zero-probability syndrome", tag())),
                }
            }
            Err(e) => rep.check(false, || format!("{}: {e}", tag())),
        }

        for _ in 0..3 {
            let region = random_region(n, &mut rng);
            let s_dense = if region.is_empty() {
                0.0
            } else {
                dense::entropy(&dense::partial_trace(&rho, n, &region))
            };
            match state.region_entropy(&region) {
                Ok(s) => rep.check((s as f64 - s_dense).abs() < TOLERANCE, || {
                    format!("{}: S({region:?}) = {s} vs dense {s_dense}", tag())
                }),
                Err(e) => rep.check(false, || format!("{}: {e}", tag())),
            }
        }

        match state.average_over_syndromes(&obs) {
            Ok(avg) => {
                let davg = dense::dephase(&rho, &dobs);
                let d = dense::max_abs_diff(&davg, &dense_state(&avg));
                rep.check(d < TOLERANCE, || format!("{}: averaged state differs by {d}", tag()));
                let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
                for qb in 0..n {
                    match rng.random_range(0..4) {
                        0 => a.push(qb),
                        1 => b.push(qb),
                        2 => c.push(qb),
                        _ => {}
                    }
                }
                for (st, dm) in [(&state, &rho), (&avg, &davg)] {
                    let want = dense::conditional_mutual_information(dm, n, &a, &b, &c);
                    match st.qcmi(&a, &b, &c) {
                        Ok(got) => rep.check((got as f64 - want).abs() < TOLERANCE, || {
                            format!("{}: qCMI({a:?}:{b:?}|{c:?}) = {got} vs dense {want}", tag())
                        }),
                        Err(e) => rep.check(false, || format!("{}: {e}", tag())),
                    }
                }
            }
            Err(e) => rep.check(false, || format!("{}: {e}", tag())),
        }
    }
    rep
}

/// A random small error: one or two uniform Cliffords on random supports.
fn random_small_error<R: Rng>(n: usize, rng: &mut R) -> ErrorRealization {
    let mut e = ErrorRealization::empty(n);
    for _ in 0..rng.random_range(0..=2) {
        let q = rng.random_range(1..=n.min(3));
        let support = rand::seq::index::sample(rng, n, q).into_vec();
        e.push(support, random_clifford(q, rng)).expect("valid support");
    }
    e
}

/// Dense `S(ρ_{Q'}) − S(ρ_{RQ'})` of a code with `k` reference qubits.
pub fn dense_coherent_information(code: &StabilizerCode, e: &ErrorRealization) -> f64 {
    let n = code.n;
    let total = n + code.k;
    let id_ref = "I".repeat(code.k);
    let mut gens: Vec<String> = code.checks.iter().map(|c| format!("{c}{id_ref}")).collect();
    for i in 0..code.k {
        let mut rx: Vec<char> = id_ref.chars().collect();
        let mut rz = rx.clone();
        rx[i] = 'X';
        rz[i] = 'Z';
        let rx: String = rx.into_iter().collect();
        let rz: String = rz.into_iter().collect();
        gens.push(format!("{}{rx}", code.logical_x[i]));
        gens.push(format!("{}{rz}", code.logical_z[i]));
    }
    let refs: Vec<&str> = gens.iter().map(String::as_str).collect();
    let rho = dense::stabilizer_density(total, &refs).expect("well-formed strings");
    let support: Vec<usize> = (0..n).collect();
    let u = dense::embed(&dense_clifford(&e.unitary()), &support, total);
    let rho = dense::conjugate(&u, &rho);
    let checks: Vec<CMatrix> = code
        .checks
        .iter()
        .map(|c| dense::pauli_matrix(&format!("{c}{id_ref}")).expect("well-formed"))
        .collect();
    let avg = dense::dephase(&rho, &checks);
    let code_qubits: Vec<usize> = (0..n).collect();
    dense::entropy(&dense::partial_trace(&avg, total, &code_qubits)) - dense::entropy(&avg)
}

/// Coherent information of random small RCC codes under random errors,
/// with `n + k ≤ max_total`.
pub fn coherent_information_suite(instances: usize, max_total: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("coherent information vs dense");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for inst in 0..instances {
        rep.instances += 1;
        let n = rng.random_range(2..=max_total - 1);
        let k = rng.random_range(1..=(max_total - n).min(n));
        let depth = rng.random_range(1..=n);
        let code = build_rcc(n, k, depth, &mut rng).expect("valid RCC parameters");
        let e = random_small_error(n, &mut rng);
        let want = dense_coherent_information(&code, &e);
        match coherent_information(&code, &e) {
            Ok(ch) => rep.check((ch.coherent_info as f64 - want).abs() < TOLERANCE, || {
                format!("instance {inst}: n={n} k={k}: {} vs dense {want}", ch.coherent_info)
            }),
            Err(err) => rep.check(false, || format!("instance {inst}: {err}")),
        }
    }
    rep
}

/// Code families sampled by [`logical_identity_suite`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityFamily {
    /// `L ∈ {2, 3, 4}`, plaquette errors.
    Toric,
    /// Seeds of length 8, long-range or local errors with `q ∈ {1, 2, 3}`.
    Hgp,
    /// `N ∈ {4, 6, …, 16}`, random `k` and depth.
    Rcc,
}

fn sample_pair<R: Rng>(family: IdentityFamily, rng: &mut R) -> (StabilizerCode, ErrorRealization) {
    let p = rng.random_range(0.0..1.0);
    match family {
        IdentityFamily::Toric => {
            let code = build_toric(rng.random_range(2..=4)).expect("L ≥ 2");
            let e = sample_errors(&code, ErrorModelKind::ToricPlaquette, p, 4, rng).expect("toric code");
            (code, e)
        }
        IdentityFamily::Hgp => {
            let c1 = build_ldpc(8, rng).expect("n = 8 is valid");
            let c2 = build_ldpc(8, rng).expect("n = 8 is valid");
            let code = build_hgp(&c1, &c2).expect("valid seeds");
            let model = if rng.random::<bool>() {
                ErrorModelKind::LongRange
            } else {
                ErrorModelKind::Local
            };
            let e = sample_errors(&code, model, p, rng.random_range(1..=3), rng).expect("q ≤ n");
            (code, e)
        }
        IdentityFamily::Rcc => {
            let n = 2 * rng.random_range(2..=8);
            let k = rng.random_range(1..=n / 2);
            let code = build_rcc(n, k, rng.random_range(1..=n), rng).expect("valid RCC parameters");
            let model = if rng.random::<bool>() {
                ErrorModelKind::LongRange
            } else {
                ErrorModelKind::Local
            };
            let e = sample_errors(&code, model, p, rng.random_range(1..=3), rng).expect("q ≤ n");
            (code, e)
        }
    }
}

/// `Δ` from the combined group against `rank T_L` on random (code, error)
/// pairs; for codes with at most `dense_limit` qubits, additionally the
/// dense distribution of the `Z̄` outcomes on the post-measurement state
/// must be uniform with maximum `2^{−Δ}`.
pub fn logical_identity_suite(family: IdentityFamily, pairs: usize, dense_limit: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new(&format!("delta identity ({family:?})"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for inst in 0..pairs {
        rep.instances += 1;
        let (code, e) = sample_pair(family, &mut rng);
        let result = apply_realization(&code.code_state(), &e)
            .and_then(|s| s.measure_commuting_set(&code.checks, &mut rng))
            .and_then(|out| delta_logical(&code, &code.logical_group(), &out.post_state).map(|d| (out, d)));
        let (out, diag) = match result {
            Ok(x) => x,
            Err(err) => {
                rep.check(false, || format!("pair {inst}: {err}"));
                continue;
            }
        };
        rep.check(diag.delta == diag.delta_commutator, || {
            format!("pair {inst}: combined {} vs rank T_L {}", diag.delta, diag.delta_commutator)
        });
        rep.check((diag.p_rec - (-(diag.delta as f64)).exp2()).abs() < 1e-15, || {
            format!("pair {inst}: p_rec {} for delta {}", diag.p_rec, diag.delta)
        });
        if code.n <= dense_limit {
            let rho = dense_state(&out.post_state);
            let born = dense::born_distribution(&rho, &dense_ops(&code.logical_z));
            let max = born.iter().copied().fold(0.0, f64::max);
            let want = (-(diag.delta as f64)).exp2();
            let uniform = born.iter().all(|&b| b < TOLERANCE || (b - max).abs() < TOLERANCE);
            rep.check((max - want).abs() < TOLERANCE && uniform, || {
                format!("pair {inst}: dense max posterior {max} vs 2^-{}", diag.delta)
            });
        }
    }
    rep
}

/// Every suite at the given scale, as run by `stabphase validate`.
pub fn run_all(instances: usize, seed: u64) -> Vec<SuiteReport> {
    vec![
        measurement_suite(instances, 6, seed),
        coherent_information_suite(instances / 4 + 1, 6, seed ^ 1),
        logical_identity_suite(IdentityFamily::Toric, instances, 0, seed ^ 2),
        logical_identity_suite(IdentityFamily::Hgp, instances / 4 + 1, 0, seed ^ 3),
        logical_identity_suite(IdentityFamily::Rcc, instances, 6, seed ^ 4),
    ]
}
