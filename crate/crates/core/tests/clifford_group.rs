use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stabphase::pauli::{random_clifford, CliffordUnitary, PauliOperator};
use stabphase_oracle as dense;

/// Symplectic images plus signs, packed: 4 images × 4 bits, then 4 signs.
fn class_key(u: &CliffordUnitary) -> u32 {
    let mut key = 0u32;
    for j in 0..2 {
        for p in [u.x_image(j), u.z_image(j)] {
            for q in 0..2 {
                key = key << 2 | (p.x().get(q) as u32) << 1 | p.z().get(q) as u32;
            }
            key = key << 1 | p.is_negative() as u32;
        }
    }
    key
}

/// Counts 4×4 binary matrices with `MᵀΛM = Λ`, `Λ = [[0, I], [I, 0]]`.
fn symplectic_group_order() -> usize {
    let form = |a: [u8; 4], b: [u8; 4]| ((a[0] & b[2]) ^ (a[1] & b[3]) ^ (a[2] & b[0]) ^ (a[3] & b[1])) & 1;
    let mut count = 0;
    for bits in 0u32..1 << 16 {
        let col = |c: usize| -> [u8; 4] { std::array::from_fn(|r| ((bits >> (4 * c + r)) & 1) as u8) };
        let ok = (0..4).all(|i| (0..4).all(|j| form(col(i), col(j)) == form(unit(i), unit(j))));
        count += ok as usize;
    }
    count
}

fn unit(i: usize) -> [u8; 4] {
    std::array::from_fn(|r| (r == i) as u8)
}

#[test]
fn two_qubit_sampling_covers_all_classes_uniformly() {
    let order = symplectic_group_order();
    assert_eq!(order, 720);
    let classes = order * 16;
    let samples = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut counts: HashMap<u32, usize> = HashMap::with_capacity(classes);
    for _ in 0..samples {
        *counts.entry(class_key(&random_clifford(2, &mut rng))).or_default() += 1;
    }
    assert_eq!(counts.len(), classes);
    let pr = 1.0 / classes as f64;
    let mean = samples as f64 * pr;
    let sigma = (samples as f64 * pr * (1.0 - pr)).sqrt();
    for (&k, &c) in &counts {
        assert!((c as f64 - mean).abs() <= 5.0 * sigma, "class {k:#x}: {c} vs {mean:.1} ± {sigma:.1}");
    }
}

fn random_pauli<R: Rng>(n: usize, rng: &mut R) -> PauliOperator {
    let letters: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect();
    let sign = if rng.random::<bool>() { "-" } else { "+" };
    format!("{sign}{letters}").parse().unwrap()
}

fn dense_of(u: &CliffordUnitary) -> dense::CMatrix {
    let xs: Vec<String> = (0..u.n()).map(|j| u.x_image(j).to_string()).collect();
    let zs: Vec<String> = (0..u.n()).map(|j| u.z_image(j).to_string()).collect();
    let xr: Vec<&str> = xs.iter().map(String::as_str).collect();
    let zr: Vec<&str> = zs.iter().map(String::as_str).collect();
    dense::clifford_from_images(&xr, &zr).unwrap()
}

#[test]
fn three_qubit_conjugation_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let u = random_clifford(3, &mut rng);
        let du = dense_of(&u);
        let p = random_pauli(3, &mut rng);
        let expected = dense::conjugate(&du, &dense::pauli_matrix(&p.to_string()).unwrap());
        let got = dense::pauli_matrix(&u.conjugate(&p).unwrap().to_string()).unwrap();
        assert!(dense::max_abs_diff(&expected, &got) < 1e-12, "{p}");
    }
}

#[test]
fn embedded_gate_matches_dense_tensor_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let g = random_clifford(2, &mut rng);
        let big = g.embed(&[1, 3], 4).unwrap();
        let dg = dense::embed(&dense_of(&g), &[1, 3], 4);
        let p = random_pauli(4, &mut rng);
        let expected = dense::conjugate(&dg, &dense::pauli_matrix(&p.to_string()).unwrap());
        let got = dense::pauli_matrix(&big.conjugate(&p).unwrap().to_string()).unwrap();
        assert!(dense::max_abs_diff(&expected, &got) < 1e-12, "{p}");
    }
}
