//! Dense reference for small registers: Pauli strings become explicit
//! `2^n × 2^n` complex matrices and every quantity is computed by brute
//! force linear algebra. Qubit `j` is tensor factor `j`, the most
//! significant bit of a basis index for `j = 0`.
//!
//! Nothing here knows about symplectic representations; inputs are the
//! textual Pauli strings used across the workspace (`"+XZIY"`, `"-iYY"`).

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = nalgebra::DVector<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError(pub String);

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "cannot parse Pauli string {:?}", self.0)
    }
}

impl std::error::Error for ParseError {}

fn single(c: char) -> Option<[[Complex64; 2]; 2]> {
    Some(match c {
        'I' | '_' => [[ONE, ZERO], [ZERO, ONE]],
        'X' => [[ZERO, ONE], [ONE, ZERO]],
        'Y' => [[ZERO, -I], [I, ZERO]],
        'Z' => [[ONE, ZERO], [ZERO, -ONE]],
        _ => return None,
    })
}

/// Splits an optional `+ - − +i -i i` prefix from the letters.
fn split_phase(s: &str) -> (Complex64, &str) {
    let t = s.trim();
    let (sign, rest) = if let Some(r) = t.strip_prefix('+') {
        (ONE, r)
    } else if let Some(r) = t.strip_prefix('-') {
        (-ONE, r)
    } else if let Some(r) = t.strip_prefix('−') {
        (-ONE, r)
    } else {
        (ONE, t)
    };
    match rest.strip_prefix('i') {
        Some(r) => (sign * I, r),
        None => (sign, rest),
    }
}

/// Number of qubits named by a Pauli string.
pub fn pauli_len(s: &str) -> usize {
    split_phase(s).1.chars().count()
}

/// The matrix of a Pauli string, phase included. Built entrywise: a Pauli
/// tensor product has exactly one nonzero per row.
pub fn pauli_matrix(s: &str) -> Result<CMatrix, ParseError> {
    let (phase, letters) = split_phase(s);
    let factors: Vec<[[Complex64; 2]; 2]> = letters
        .chars()
        .map(|c| single(c).ok_or_else(|| ParseError(s.to_string())))
        .collect::<Result<_, _>>()?;
    let n = factors.len();
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for row in 0..dim {
        for col in 0..dim {
            let mut v = phase;
            for (j, f) in factors.iter().enumerate() {
                let shift = n - 1 - j;
                v *= f[(row >> shift) & 1][(col >> shift) & 1];
                if v == ZERO {
                    break;
                }
            }
            m[(row, col)] = v;
        }
    }
    Ok(m)
}

fn paulis(gens: &[&str]) -> Result<Vec<CMatrix>, ParseError> {
    gens.iter().map(|g| pauli_matrix(g)).collect()
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(1 << n, 1 << n)
}

/// `Π_i (I + g_i) / 2`.
pub fn stabilizer_projector(n: usize, gens: &[&str]) -> Result<CMatrix, ParseError> {
    let id = identity(n);
    let mut p = id.clone();
    for g in paulis(gens)? {
        p = &p * (&id + g) * Complex64::new(0.5, 0.0);
    }
    Ok(p)
}

/// The stabilizer state with the given generators: the normalized
/// projector.
pub fn stabilizer_density(n: usize, gens: &[&str]) -> Result<CMatrix, ParseError> {
    let p = stabilizer_projector(n, gens)?;
    let tr = p.trace();
    Ok(p / tr)
}

/// `Π_i (I + (−1)^{s_i} O_i) / 2` for sign bits `s`.
pub fn syndrome_projector(n: usize, observables: &[CMatrix], s: &[bool]) -> CMatrix {
    let id = identity(n);
    let mut p = id.clone();
    for (o, &bit) in observables.iter().zip(s) {
        let sign = if bit { -ONE } else { ONE };
        p = &p * (&id + o * sign) * Complex64::new(0.5, 0.0);
    }
    p
}

fn bits(v: usize, m: usize) -> Vec<bool> {
    (0..m).map(|i| (v >> i) & 1 == 1).collect()
}

/// Outcome probabilities of measuring commuting observables; index `v`
/// carries the sign bit of observable `i` in bit `i`.
pub fn born_distribution(rho: &CMatrix, observables: &[CMatrix]) -> Vec<f64> {
    let n = rho.nrows().trailing_zeros() as usize;
    let m = observables.len();
    (0..1usize << m)
        .map(|v| (syndrome_projector(n, observables, &bits(v, m)) * rho).trace().re)
        .collect()
}

/// `Π ρ Π / Tr(Π ρ)`, or `None` for a zero-probability outcome.
pub fn project(rho: &CMatrix, proj: &CMatrix) -> Option<CMatrix> {
    let out = proj * rho * proj;
    let tr = out.trace().re;
    if tr < 1e-12 {
        None
    } else {
        Some(out / Complex64::new(tr, 0.0))
    }
}

/// `Σ_s Π_s ρ Π_s`: the state averaged over all measurement outcomes.
pub fn dephase(rho: &CMatrix, observables: &[CMatrix]) -> CMatrix {
    let n = rho.nrows().trailing_zeros() as usize;
    let m = observables.len();
    let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
    for v in 0..1usize << m {
        let p = syndrome_projector(n, observables, &bits(v, m));
        out += &p * rho * &p;
    }
    out
}

/// Trace over every qubit not in `keep`; the result orders the kept qubits
/// as listed.
pub fn partial_trace(rho: &CMatrix, n: usize, keep: &[usize]) -> CMatrix {
    let k = keep.len();
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let dim = 1usize << k;
    let mut out = CMatrix::zeros(dim, dim);
    let place = |kept: usize, env: usize| -> usize {
        let mut idx = 0usize;
        for (j, &q) in keep.iter().enumerate() {
            idx |= ((kept >> (k - 1 - j)) & 1) << (n - 1 - q);
        }
        for (j, &q) in traced.iter().enumerate() {
            idx |= ((env >> (traced.len() - 1 - j)) & 1) << (n - 1 - q);
        }
        idx
    };
    for a in 0..dim {
        for b in 0..dim {
            let mut s = ZERO;
            for e in 0..1usize << traced.len() {
                s += rho[(place(a, e), place(b, e))];
            }
            out[(a, b)] = s;
        }
    }
    out
}

/// Eigenvalues of the Hermitian part of `m`, ascending. Computed on the
/// real symmetric embedding `[[A, −B], [B, A]]` of `A + iB`, whose spectrum
/// is that of `m` with every eigenvalue doubled.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let d = herm.nrows();
    let real = DMatrix::<f64>::from_fn(2 * d, 2 * d, |r, c| {
        let z = herm[(r % d, c % d)];
        match (r < d, c < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut ev: Vec<f64> = real.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.into_iter().step_by(2).collect()
}

/// Von Neumann entropy in bits.
pub fn entropy(rho: &CMatrix) -> f64 {
    hermitian_eigenvalues(rho)
        .iter()
        .filter(|&&l| l > 1e-12)
        .map(|&l| -l * l.log2())
        .sum()
}

/// `S(A) + S(B) − S(AB)` style mutual information with conditioning:
/// `S(AC) + S(BC) − S(C) − S(ABC)`.
pub fn conditional_mutual_information(rho: &CMatrix, n: usize, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
    let join = |x: &[usize], y: &[usize]| -> Vec<usize> {
        let mut v: Vec<usize> = x.iter().chain(y).copied().collect();
        v.sort_unstable();
        v
    };
    let s = |r: &[usize]| {
        if r.is_empty() {
            0.0
        } else {
            entropy(&partial_trace(rho, n, r))
        }
    };
    let ac = join(a, c);
    let bc = join(b, c);
    let abc = join(&ac, b);
    s(&ac) + s(&bc) - s(c) - s(&abc)
}

/// `op` on the qubits `support` of an `n`-qubit register, identity
/// elsewhere.
pub fn embed(op: &CMatrix, support: &[usize], n: usize) -> CMatrix {
    let q = support.len();
    let dim = 1usize << n;
    let mut mask = 0usize;
    for &s in support {
        mask |= 1 << (n - 1 - s);
    }
    let local = |idx: usize| -> usize {
        support
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &s)| acc | (((idx >> (n - 1 - s)) & 1) << (q - 1 - j)))
    };
    let mut out = CMatrix::zeros(dim, dim);
    for row in 0..dim {
        for col in 0..dim {
            if row & !mask == col & !mask {
                out[(row, col)] = op[(local(row), local(col))];
            }
        }
    }
    out
}

/// `U P U†`.
pub fn conjugate(u: &CMatrix, p: &CMatrix) -> CMatrix {
    u * p * u.adjoint()
}

/// Unit vector spanning the range of a rank-one projector: the normalized
/// column of largest norm.
fn range_vector(p: &CMatrix) -> CVector {
    let best = (0..p.ncols())
        .max_by(|&a, &b| p.column(a).norm().total_cmp(&p.column(b).norm()))
        .expect("nonempty matrix");
    let v = p.column(best).into_owned();
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// A unitary with `U X_j U† = x_images[j]` and `U Z_j U† = z_images[j]`,
/// up to global phase. `U|0…0⟩` is the joint +1 eigenvector of the `Z`
/// images and `U|b⟩ = Π_j x_images[j]^{b_j} U|0…0⟩`.
pub fn clifford_from_images(x_images: &[&str], z_images: &[&str]) -> Result<CMatrix, ParseError> {
    let n = x_images.len();
    let dim = 1usize << n;
    let psi0 = range_vector(&stabilizer_projector(n, z_images)?);
    let xs = paulis(x_images)?;
    let mut u = CMatrix::zeros(dim, dim);
    for b in 0..dim {
        let mut v = psi0.clone();
        // qubit j is bit n-1-j of the basis index
        for (j, x) in xs.iter().enumerate().rev() {
            if (b >> (n - 1 - j)) & 1 == 1 {
                v = x * v;
            }
        }
        u.set_column(b, &v);
    }
    Ok(u)
}

/// Largest entrywise modulus of `a − b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Whether `a = c · b` for a unit-modulus scalar `c`.
pub fn equal_up_to_phase(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    let Some((idx, _)) = b.iter().enumerate().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm())) else {
        return true;
    };
    let denom = b.iter().nth(idx).copied().unwrap_or(ZERO);
    if denom.norm() < tol {
        return max_abs_diff(a, b) < tol;
    }
    let c = a.iter().nth(idx).copied().unwrap_or(ZERO) / denom;
    (c.norm() - 1.0).abs() < tol && max_abs_diff(a, &(b * c)) < tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMatrix, b: &CMatrix) -> bool {
        max_abs_diff(a, b) < 1e-12
    }

    #[test]
    fn pauli_algebra() {
        let x = pauli_matrix("X").unwrap();
        let z = pauli_matrix("Z").unwrap();
        assert!(close(&(&x * &z), &pauli_matrix("-iY").unwrap()));
        assert!(close(&(&x * &x), &identity(1)));
        let xz = pauli_matrix("XZ").unwrap();
        assert!(close(&xz, &x.kronecker(&z)));
        assert!(pauli_matrix("XQ").is_err());
        assert_eq!(pauli_len("-iXYZ"), 3);
    }

    #[test]
    fn bell_state_entropies() {
        let rho = stabilizer_density(2, &["XX", "ZZ"]).unwrap();
        assert!((entropy(&rho)).abs() < 1e-10);
        let a = partial_trace(&rho, 2, &[0]);
        assert!((entropy(&a) - 1.0).abs() < 1e-10);
        assert!((conditional_mutual_information(&rho, 2, &[0], &[1], &[]) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn eigenvalues_of_a_complex_hermitian_matrix() {
        // Y has eigenvalues ±1; (I + Y)/2 is a rank-one projector
        let y = pauli_matrix("Y").unwrap();
        assert_eq!(hermitian_eigenvalues(&y).iter().map(|l| l.round()).collect::<Vec<_>>(), vec![-1.0, 1.0]);
        let rho = stabilizer_density(6, &["+YIIIII", "-IIIZII", "-IYIIII", "-IIIZZI", "-IYZZIX", "+YIYIIZ"]).unwrap();
        assert!(entropy(&rho).abs() < 1e-10);
    }

    #[test]
    fn partial_trace_orders_kept_qubits() {
        let rho = stabilizer_density(3, &["ZII", "IXI", "IIZ"]).unwrap();
        let kept = partial_trace(&rho, 3, &[1, 2]);
        assert!(close(&kept, &stabilizer_density(2, &["XI", "IZ"]).unwrap()));
    }

    #[test]
    fn born_and_dephasing() {
        // GHZ measured with single-qubit Z: outcomes 000 and 111 only
        let rho = stabilizer_density(3, &["XXX", "ZZI", "IZZ"]).unwrap();
        let obs: Vec<CMatrix> = ["ZII", "IZI", "IIZ"].iter().map(|s| pauli_matrix(s).unwrap()).collect();
        let d = born_distribution(&rho, &obs);
        assert!((d[0] - 0.5).abs() < 1e-12 && (d[7] - 0.5).abs() < 1e-12);
        assert!(d[1..7].iter().all(|p| p.abs() < 1e-12));
        let avg = dephase(&rho, &obs);
        assert!((entropy(&avg) - 1.0).abs() < 1e-10);
        let post = project(&rho, &syndrome_projector(3, &obs, &[true, true, true])).unwrap();
        assert!(close(&post, &stabilizer_density(3, &["-ZII", "-IZI", "-IIZ"]).unwrap()));
        assert!(project(&rho, &syndrome_projector(3, &obs, &[true, false, false])).is_none());
    }

    #[test]
    fn clifford_reconstruction() {
        // CNOT 0 -> 1: X0 -> X0X1, X1 -> X1, Z0 -> Z0, Z1 -> Z0Z1
        let u = clifford_from_images(&["XX", "IX"], &["ZI", "ZZ"]).unwrap();
        assert!(close(&(&u * u.adjoint()), &identity(2)));
        for (p, img) in [("XI", "XX"), ("IX", "IX"), ("ZI", "ZI"), ("IZ", "ZZ"), ("YI", "YX")] {
            let got = conjugate(&u, &pauli_matrix(p).unwrap());
            assert!(close(&got, &pauli_matrix(img).unwrap()), "{p}");
        }
        let h = clifford_from_images(&["Z"], &["X"]).unwrap();
        assert!(close(&conjugate(&h, &pauli_matrix("Y").unwrap()), &pauli_matrix("-Y").unwrap()));
        let minus = clifford_from_images(&["-X"], &["Z"]).unwrap();
        assert!(close(&conjugate(&minus, &pauli_matrix("X").unwrap()), &pauli_matrix("-X").unwrap()));
    }

    #[test]
    fn embedding() {
        let x = pauli_matrix("X").unwrap();
        assert!(close(&embed(&x, &[2], 4), &pauli_matrix("IIXI").unwrap()));
        let xz = pauli_matrix("XZ").unwrap();
        assert!(close(&embed(&xz, &[3, 1], 4), &pauli_matrix("IZIX").unwrap()));
    }

    #[test]
    fn phase_equality() {
        let a = pauli_matrix("XY").unwrap();
        let b = pauli_matrix("-iXY").unwrap();
        assert!(equal_up_to_phase(&a, &b, 1e-12));
        assert!(!equal_up_to_phase(&a, &pauli_matrix("XZ").unwrap(), 1e-12));
    }
}
