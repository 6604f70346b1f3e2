//! Regression pin for the brute-force tensor-grid oracle against a captured
//! golden value, so any drift in quadrature nodes, axis weighting, or
//! reduction order is caught immediately.

use barren_lab::matkernel::{kron, pauli_matrix, ComplexMatrix, Pauli};
use barren_lab::moments::brute_force_moment;
use num_complex::Complex;
use serde::Deserialize;

#[derive(Deserialize)]
struct GoldenMatrix {
    dim: usize,
    entries: Vec<(f64, f64)>,
}

#[test]
fn two_qubit_grid_average_matches_golden() {
    let raw = include_str!("golden/brute_n2_d1_zz.json");
    let golden: GoldenMatrix = serde_json::from_str(raw).expect("golden file parses");
    assert_eq!(golden.entries.len(), golden.dim * golden.dim);

    let mut expected = ComplexMatrix::<f64>::zeros(golden.dim);
    for (idx, &(re, im)) in golden.entries.iter().enumerate() {
        expected[(idx / golden.dim, idx % golden.dim)] = Complex::new(re, im);
    }

    let zz = kron(&pauli_matrix::<f64>(Pauli::Z), &pauli_matrix::<f64>(Pauli::Z));
    let id = ComplexMatrix::<f64>::identity(4);
    let grid = brute_force_moment(2, 1, &zz, &id, &zz).expect("two slots fit the budget");
    assert!(grid.max_abs_diff(&expected) <= 1e-12);
}
