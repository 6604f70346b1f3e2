//! Dense complex linear algebra: construction, tensor products, partial
//! traces, commutators, and the fixed gate/Pauli dictionary.
//!
//! Qubit ordering convention, used everywhere in this crate: qubit 0 is the
//! most significant tensor factor, so the basis index bit of qubit `q` in an
//! `n`-qubit index `i` is `(i >> (n - 1 - q)) & 1`.

use num_complex::Complex;
use rand_core::RngCore;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("qubit index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("qubit index set must be strictly increasing, got {0:?}")]
    NotStrictlyIncreasing(Vec<usize>),
}

/// Rotation generator axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Single-qubit Pauli operator label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
}

/// Strictly increasing set of qubit indices, all below the qubit count it is
/// used with. Also usable as a subset bitmask where bit `q` means qubit `q`
/// (the mask has nothing to do with basis-index significance).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitIndexSet {
    indices: Vec<usize>,
}

impl QubitIndexSet {
    pub fn new(indices: Vec<usize>) -> Result<Self, MatError> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MatError::NotStrictlyIncreasing(indices));
        }
        Ok(Self { indices })
    }

    pub fn empty() -> Self {
        Self { indices: Vec::new() }
    }

    pub fn single(q: usize) -> Self {
        Self { indices: vec![q] }
    }

    pub fn from_bitmask(mask: usize, n: usize) -> Self {
        let indices = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        Self { indices }
    }

    pub fn bitmask(&self) -> usize {
        self.indices.iter().fold(0, |m, &q| m | 1 << q)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.indices.binary_search(&q).is_ok()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    /// Qubits in [0, n) not in this set.
    pub fn complement(&self, n: usize) -> Self {
        let indices = (0..n).filter(|&q| !self.contains(q)).collect();
        Self { indices }
    }

    /// All 2^n subsets of [0, n), in bitmask order.
    pub fn power_set(n: usize) -> impl Iterator<Item = QubitIndexSet> {
        (0..1usize << n).map(move |mask| Self::from_bitmask(mask, n))
    }

    fn check_range(&self, n: usize) -> Result<(), MatError> {
        match self.indices.last() {
            Some(&q) if q >= n => Err(MatError::IndexOutOfRange { index: q, n }),
            _ => Ok(()),
        }
    }
}

/// Dense square complex matrix, row-major. Hermiticity and unitarity are not
/// invariants; they are checkable predicates.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<F> {
    dim: usize,
    entries: Vec<Complex<F>>,
}

impl<F: Scalar> ComplexMatrix<F> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self { dim, entries: vec![Complex::new(F::zero(), F::zero()); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(F::one(), F::zero());
        }
        m
    }

    pub fn from_entries(dim: usize, entries: Vec<Complex<F>>) -> Result<Self, MatError> {
        if entries.len() != dim * dim {
            return Err(MatError::DimMismatch { expected: dim * dim, got: entries.len() });
        }
        Ok(Self { dim, entries })
    }

    /// 2x2 shorthand used by the gate dictionary and tests.
    pub fn two_by_two(a: Complex<F>, b: Complex<F>, c: Complex<F>, d: Complex<F>) -> Self {
        Self { dim: 2, entries: vec![a, b, c, d] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex<F>] {
        &self.entries
    }

    pub fn trace(&self) -> Complex<F> {
        (0..self.dim).map(|i| self[(i, i)]).fold(Complex::new(F::zero(), F::zero()), |a, b| a + b)
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn scaled(&self, z: Complex<F>) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|e| e * z).collect() }
    }

    pub fn scaled_re(&self, x: F) -> Self {
        self.scaled(Complex::new(x, F::zero()))
    }

    /// Largest entry magnitude (max norm).
    pub fn max_abs(&self) -> F {
        self.entries.iter().map(|e| e.norm()).fold(F::zero(), F::max)
    }

    /// Largest elementwise difference from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> F {
        assert_eq!(self.dim, other.dim, "max_abs_diff on mismatched dimensions");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(F::zero(), F::max)
    }

    pub fn is_hermitian(&self, tol: F) -> bool {
        for r in 0..self.dim {
            for c in r..self.dim {
                if (self[(r, c)] - self[(c, r)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_unitary(&self, tol: F) -> bool {
        let prod = &self.adjoint() * self;
        prod.max_abs_diff(&Self::identity(self.dim)) <= tol
    }
}

impl<F: Scalar> std::ops::Index<(usize, usize)> for ComplexMatrix<F> {
    type Output = Complex<F>;

    fn index(&self, (r, c): (usize, usize)) -> &Complex<F> {
        &self.entries[r * self.dim + c]
    }
}

impl<F: Scalar> std::ops::IndexMut<(usize, usize)> for ComplexMatrix<F> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<F> {
        &mut self.entries[r * self.dim + c]
    }
}

impl<F: Scalar> std::ops::Add for &ComplexMatrix<F> {
    type Output = ComplexMatrix<F>;

    fn add(self, rhs: &ComplexMatrix<F>) -> ComplexMatrix<F> {
        assert_eq!(self.dim, rhs.dim, "adding matrices of different dimensions");
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<F: Scalar> std::ops::Sub for &ComplexMatrix<F> {
    type Output = ComplexMatrix<F>;

    fn sub(self, rhs: &ComplexMatrix<F>) -> ComplexMatrix<F> {
        assert_eq!(self.dim, rhs.dim, "subtracting matrices of different dimensions");
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<F: Scalar> std::ops::Mul for &ComplexMatrix<F> {
    type Output = ComplexMatrix<F>;

    fn mul(self, rhs: &ComplexMatrix<F>) -> ComplexMatrix<F> {
        assert_eq!(self.dim, rhs.dim, "multiplying matrices of different dimensions");
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self[(r, k)];
                if a.re == F::zero() && a.im == F::zero() {
                    continue;
                }
                for c in 0..d {
                    out[(r, c)] = out[(r, c)] + a * rhs[(k, c)];
                }
            }
        }
        out
    }
}

/// Tensor product with `a` as the more significant factor.
pub fn kron<F: Scalar>(a: &ComplexMatrix<F>, b: &ComplexMatrix<F>) -> ComplexMatrix<F> {
    let (da, db) = (a.dim(), b.dim());
    let mut out = ComplexMatrix::zeros(da * db);
    for ra in 0..da {
        for ca in 0..da {
            let va = a[(ra, ca)];
            for rb in 0..db {
                for cb in 0..db {
                    out[(ra * db + rb, ca * db + cb)] = va * b[(rb, cb)];
                }
            }
        }
    }
    out
}

/// Basis indices of the full space whose bits at the positions in `set` spell
/// out a local index, all other bits zero. Entry `k` is the local index `k`
/// scattered into place; OR two of these together to compose a full index.
fn scatter_table(set: &QubitIndexSet, n: usize) -> Vec<usize> {
    let k = set.len();
    let mut table = vec![0usize; 1 << k];
    for (local, slot) in table.iter_mut().enumerate() {
        let mut full = 0usize;
        for (pos, q) in set.iter().enumerate() {
            // local bit `pos` (MSB-first among the set) -> global bit for qubit q
            let bit = local >> (k - 1 - pos) & 1;
            full |= bit << (n - 1 - q);
        }
        *slot = full;
    }
    table
}

/// Trace out the qubits in `traced`, leaving an operator on the remaining
/// qubits in their original relative order.
pub fn partial_trace<F: Scalar>(
    a: &ComplexMatrix<F>,
    traced: &QubitIndexSet,
    n: usize,
) -> Result<ComplexMatrix<F>, MatError> {
    traced.check_range(n)?;
    if a.dim() != 1 << n {
        return Err(MatError::DimMismatch { expected: 1 << n, got: a.dim() });
    }
    let kept = traced.complement(n);
    let kept_table = scatter_table(&kept, n);
    let traced_table = scatter_table(traced, n);
    let mut out = ComplexMatrix::zeros(1 << kept.len());
    for (ro, &rk) in kept_table.iter().enumerate() {
        for (co, &ck) in kept_table.iter().enumerate() {
            let mut sum = Complex::new(F::zero(), F::zero());
            for &t in &traced_table {
                sum = sum + a[(rk | t, ck | t)];
            }
            out[(ro, co)] = sum;
        }
    }
    Ok(out)
}

/// Place `local` on the qubits in `at` (identity on the rest). The inverse
/// direction of `partial_trace` up to normalization.
pub fn embed<F: Scalar>(
    local: &ComplexMatrix<F>,
    at: &QubitIndexSet,
    n: usize,
) -> Result<ComplexMatrix<F>, MatError> {
    let rest = at.complement(n);
    tensor_insert(local, &ComplexMatrix::identity(1 << rest.len()), at, n)
}

/// Place `a` on the qubits in `at` and `b` on the complementary qubits, both
/// keeping their internal qubit order.
pub fn tensor_insert<F: Scalar>(
    a: &ComplexMatrix<F>,
    b: &ComplexMatrix<F>,
    at: &QubitIndexSet,
    n: usize,
) -> Result<ComplexMatrix<F>, MatError> {
    at.check_range(n)?;
    if a.dim() != 1 << at.len() {
        return Err(MatError::DimMismatch { expected: 1 << at.len(), got: a.dim() });
    }
    let rest = at.complement(n);
    if b.dim() != 1 << rest.len() {
        return Err(MatError::DimMismatch { expected: 1 << rest.len(), got: b.dim() });
    }
    let at_table = scatter_table(at, n);
    let rest_table = scatter_table(&rest, n);
    let mut out = ComplexMatrix::zeros(1 << n);
    for (ra, &rat) in at_table.iter().enumerate() {
        for (ca, &cat) in at_table.iter().enumerate() {
            let va = a[(ra, ca)];
            if va.re == F::zero() && va.im == F::zero() {
                continue;
            }
            for (rb, &rbt) in rest_table.iter().enumerate() {
                for (cb, &cbt) in rest_table.iter().enumerate() {
                    out[(rat | rbt, cat | cbt)] = va * b[(rb, cb)];
                }
            }
        }
    }
    Ok(out)
}

/// ab - ba. Traceless for any inputs.
pub fn commutator<F: Scalar>(
    a: &ComplexMatrix<F>,
    b: &ComplexMatrix<F>,
) -> Result<ComplexMatrix<F>, MatError> {
    if a.dim() != b.dim() {
        return Err(MatError::DimMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(&(a * b) - &(b * a))
}

/// Rotation gate about `axis`. For Z this is the phase-stripped form
/// diag(1, e^{i theta}); the simulator carries the symmetric-phase form and
/// the two agree on every loss value (the phase is global).
pub fn rotation_gate<F: Scalar>(axis: Axis, theta: F) -> ComplexMatrix<F> {
    let half = theta / F::of(2.0);
    let (c, s) = (half.cos(), half.sin());
    let zero = Complex::new(F::zero(), F::zero());
    match axis {
        Axis::X => ComplexMatrix::two_by_two(
            Complex::new(c, F::zero()),
            Complex::new(F::zero(), -s),
            Complex::new(F::zero(), -s),
            Complex::new(c, F::zero()),
        ),
        Axis::Y => ComplexMatrix::two_by_two(
            Complex::new(c, F::zero()),
            Complex::new(-s, F::zero()),
            Complex::new(s, F::zero()),
            Complex::new(c, F::zero()),
        ),
        Axis::Z => ComplexMatrix::two_by_two(
            Complex::new(F::one(), F::zero()),
            zero,
            zero,
            Complex::new(theta.cos(), theta.sin()),
        ),
    }
}

pub fn pauli_matrix<F: Scalar>(p: Pauli) -> ComplexMatrix<F> {
    let o = F::one();
    let zero = Complex::new(F::zero(), F::zero());
    match p {
        Pauli::I => ComplexMatrix::identity(2),
        Pauli::X => {
            ComplexMatrix::two_by_two(zero, Complex::new(o, F::zero()), Complex::new(o, F::zero()), zero)
        }
        Pauli::Y => {
            ComplexMatrix::two_by_two(zero, Complex::new(F::zero(), -o), Complex::new(F::zero(), o), zero)
        }
        Pauli::Z => ComplexMatrix::two_by_two(
            Complex::new(o, F::zero()),
            zero,
            zero,
            Complex::new(-o, F::zero()),
        ),
    }
}

pub fn hadamard<F: Scalar>() -> ComplexMatrix<F> {
    let h = F::of(std::f64::consts::FRAC_1_SQRT_2);
    ComplexMatrix::two_by_two(
        Complex::new(h, F::zero()),
        Complex::new(h, F::zero()),
        Complex::new(h, F::zero()),
        Complex::new(-h, F::zero()),
    )
}

/// Two-qubit controlled-Z block, diag(1, 1, 1, -1). Symmetric in its qubits.
pub fn cz_block<F: Scalar>() -> ComplexMatrix<F> {
    let mut m = ComplexMatrix::identity(4);
    m[(3, 3)] = Complex::new(-F::one(), F::zero());
    m
}

/// 53-bit uniform draw in [0, 1).
pub fn uniform_unit(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Matrix with entries uniform in the complex square [-1, 1] x [-1, 1]i.
pub fn random_matrix<F: Scalar>(rng: &mut impl RngCore, dim: usize) -> ComplexMatrix<F> {
    let mut m = ComplexMatrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            let re = F::of(2.0 * uniform_unit(rng) - 1.0);
            let im = F::of(2.0 * uniform_unit(rng) - 1.0);
            m[(r, c)] = Complex::new(re, im);
        }
    }
    m
}

/// Random Hermitian matrix, (M + M†)/2 over `random_matrix`.
pub fn random_hermitian<F: Scalar>(rng: &mut impl RngCore, dim: usize) -> ComplexMatrix<F> {
    let m = random_matrix(rng, dim);
    (&m + &m.adjoint()).scaled_re(F::of(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::SeedableRng;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn diag(values: &[f64]) -> M {
        let mut m = M::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = c(v, 0.0);
        }
        m
    }

    #[test]
    fn kron_pauli_cases() {
        let z = pauli_matrix::<f64>(Pauli::Z);
        let i = pauli_matrix::<f64>(Pauli::I);
        let x = pauli_matrix::<f64>(Pauli::X);

        assert_eq!(kron(&z, &i), diag(&[1.0, 1.0, -1.0, -1.0]));
        assert_eq!(kron(&i, &i), M::identity(4));

        let xx = kron(&x, &x);
        for r in 0..4 {
            for col in 0..4 {
                let expect = if r + col == 3 { 1.0 } else { 0.0 };
                assert_eq!(xx[(r, col)], c(expect, 0.0));
            }
        }
    }

    #[test]
    fn kron_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_matrix::<f64>(&mut rng, 2);
            let b = random_matrix::<f64>(&mut rng, 3);
            let d = random_matrix::<f64>(&mut rng, 2);
            let lhs = kron(&kron(&a, &b), &d);
            let rhs = kron(&a, &kron(&b, &d));
            assert!(lhs.max_abs_diff(&rhs) <= 1e-14);
        }
    }

    #[test]
    fn partial_trace_pauli_cases() {
        let z = pauli_matrix::<f64>(Pauli::Z);
        let zz = kron(&z, &z);
        let one = QubitIndexSet::single(1);

        let out = partial_trace(&zz, &one, 2).unwrap();
        assert!(out.max_abs() <= 1e-15, "Tr_1(Z(x)Z) should vanish since Tr Z = 0");

        let out = partial_trace(&M::identity(4), &QubitIndexSet::single(0), 2).unwrap();
        assert!(out.max_abs_diff(&M::identity(2).scaled_re(2.0)) <= 1e-15);

        // |00><00| reduces to |0><0| on either side
        let mut proj = M::zeros(4);
        proj[(0, 0)] = c(1.0, 0.0);
        let out = partial_trace(&proj, &one, 2).unwrap();
        let mut expect = M::zeros(2);
        expect[(0, 0)] = c(1.0, 0.0);
        assert!(out.max_abs_diff(&expect) <= 1e-15);
    }

    #[test]
    fn partial_trace_of_kron_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let a = random_matrix::<f64>(&mut rng, 2);
            let b = random_matrix::<f64>(&mut rng, 2);
            let full = kron(&a, &b);
            let out = partial_trace(&full, &QubitIndexSet::single(1), 2).unwrap();
            let expect = a.scaled(b.trace());
            assert!(out.max_abs_diff(&expect) <= 1e-14);
        }
    }

    #[test]
    fn partial_trace_preserves_total_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let n = 1 + (rng.next_u64() % 4) as usize;
            let a = random_matrix::<f64>(&mut rng, 1 << n);
            let mask = (rng.next_u64() % (1 << n) as u64) as usize;
            let traced = QubitIndexSet::from_bitmask(mask, n);
            let out = partial_trace(&a, &traced, n).unwrap();
            assert!((out.trace() - a.trace()).norm() <= 1e-12);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let a = M::identity(4);
        let err = partial_trace(&a, &QubitIndexSet::single(0), 3).unwrap_err();
        assert_eq!(err, MatError::DimMismatch { expected: 8, got: 4 });
        let err = partial_trace(&a, &QubitIndexSet::single(5), 2).unwrap_err();
        assert_eq!(err, MatError::IndexOutOfRange { index: 5, n: 2 });
    }

    #[test]
    fn embed_places_factors() {
        let z = pauli_matrix::<f64>(Pauli::Z);
        let i = pauli_matrix::<f64>(Pauli::I);

        let out = embed(&z, &QubitIndexSet::single(0), 2).unwrap();
        assert!(out.max_abs_diff(&kron(&z, &i)) <= 1e-15);

        let out = embed(&z, &QubitIndexSet::single(1), 2).unwrap();
        assert!(out.max_abs_diff(&kron(&i, &z)) <= 1e-15);

        let czb = cz_block::<f64>();
        let out = embed(&czb, &QubitIndexSet::new(vec![0, 1]).unwrap(), 3).unwrap();
        assert!(out.max_abs_diff(&kron(&czb, &i)) <= 1e-15);
    }

    #[test]
    fn embed_with_empty_set_scales_identity() {
        // 1x1 local operators come out of full partial traces; embedding one
        // back should give scalar * identity
        let scalar = M::from_entries(1, vec![c(2.5, -0.5)]).unwrap();
        let out = embed(&scalar, &QubitIndexSet::empty(), 2).unwrap();
        assert!(out.max_abs_diff(&M::identity(4).scaled(c(2.5, -0.5))) <= 1e-15);
    }

    #[test]
    fn embed_round_trips_with_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        // Tr_rest(embed(a)) = 2^{n-|at|} a
        let a = random_matrix::<f64>(&mut rng, 2);
        let at = QubitIndexSet::single(1);
        let full = embed(&a, &at, 3).unwrap();
        let back = partial_trace(&full, &at.complement(3), 3).unwrap();
        assert!(back.max_abs_diff(&a.scaled_re(4.0)) <= 1e-13);
    }

    #[test]
    fn embed_rejects_out_of_range() {
        let z = pauli_matrix::<f64>(Pauli::Z);
        let err = embed(&z, &QubitIndexSet::single(2), 2).unwrap_err();
        assert_eq!(err, MatError::IndexOutOfRange { index: 2, n: 2 });
    }

    #[test]
    fn commutator_pauli_algebra() {
        let x = pauli_matrix::<f64>(Pauli::X);
        let y = pauli_matrix::<f64>(Pauli::Y);
        let z = pauli_matrix::<f64>(Pauli::Z);

        assert!(commutator(&x, &x).unwrap().max_abs() <= 1e-15);

        // XZ - ZX = -2iY
        let out = commutator(&x, &z).unwrap();
        let expect = y.scaled(c(0.0, -2.0));
        assert!(out.max_abs_diff(&expect) <= 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let a = random_matrix::<f64>(&mut rng, 2);
        assert!(commutator(&M::identity(2), &a).unwrap().max_abs() <= 1e-15);
    }

    #[test]
    fn commutator_is_traceless() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..50 {
            let a = random_matrix::<f64>(&mut rng, 4);
            let b = random_matrix::<f64>(&mut rng, 4);
            assert!(commutator(&a, &b).unwrap().trace().norm() <= 1e-14);
        }
    }

    #[test]
    fn rotation_gate_special_values() {
        let ry = rotation_gate(Axis::Y, std::f64::consts::PI);
        let expect =
            M::two_by_two(c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        assert!(ry.max_abs_diff(&expect) <= 1e-15);

        let rx = rotation_gate(Axis::X, 0.0);
        assert!(rx.max_abs_diff(&M::identity(2)) <= 1e-15);

        let rz = rotation_gate(Axis::Z, std::f64::consts::PI);
        assert!(rz.max_abs_diff(&diag(&[1.0, -1.0])) <= 1e-15);
    }

    #[test]
    fn rotation_gates_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let theta = 8.0 * std::f64::consts::PI * (uniform_unit(&mut rng) - 0.5);
            for axis in Axis::ALL {
                assert!(rotation_gate(axis, theta).is_unitary(1e-14));
            }
        }
    }

    #[test]
    fn index_set_validation() {
        assert!(QubitIndexSet::new(vec![0, 2, 3]).is_ok());
        assert_eq!(
            QubitIndexSet::new(vec![2, 2]).unwrap_err(),
            MatError::NotStrictlyIncreasing(vec![2, 2])
        );
        assert_eq!(
            QubitIndexSet::new(vec![3, 1]).unwrap_err(),
            MatError::NotStrictlyIncreasing(vec![3, 1])
        );

        let s = QubitIndexSet::from_bitmask(0b101, 3);
        assert_eq!(s.as_slice(), &[0, 2]);
        assert_eq!(s.bitmask(), 0b101);
        assert_eq!(s.complement(3).as_slice(), &[1]);
        assert_eq!(QubitIndexSet::power_set(3).count(), 8);
    }

    #[test]
    fn tensor_insert_matches_embed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for j in 0..3 {
            let a = random_matrix::<f64>(&mut rng, 2);
            let b = random_matrix::<f64>(&mut rng, 4);
            let at = QubitIndexSet::single(j);
            let direct = tensor_insert(&a, &b, &at, 3).unwrap();
            let via_embed =
                &embed(&a, &at, 3).unwrap() * &embed(&b, &at.complement(3), 3).unwrap();
            assert!(direct.max_abs_diff(&via_embed) <= 1e-13);
        }
    }
}
