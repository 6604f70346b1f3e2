//! Exact state-vector evaluation of the loss Tr{rho U† O U} and its
//! per-parameter gradients via two independent routes: the parameter-shift
//! rule and a commutator-form sweep that absorbs gates into a dense
//! observable. The two must agree to roundoff; tests and the acceptance
//! suite hold them to that.

use num_complex::Complex;
use thiserror::Error;

use crate::circuit::{Circuit, Observable, RotationAxis};
use crate::matkernel::{self, Axis, ComplexMatrix, Pauli};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("observable acts on {observable} qubits but the circuit has {circuit}")]
    ObservableMismatch { observable: usize, circuit: usize },
    #[error("initial state has {state} qubits but the circuit has {circuit}")]
    StateMismatch { state: usize, circuit: usize },
    #[error("expected {expected} amplitudes for {n} qubits, got {got}")]
    AmplitudeCount { n: usize, expected: usize, got: usize },
    #[error("state squared-norm {norm_sqr} too far from 1")]
    NotNormalized { norm_sqr: f64 },
    #[error("commutator gradient residue {residue} above threshold {threshold}; the absorbed observable lost hermiticity")]
    ImaginaryResidue { residue: f64, threshold: f64 },
}

/// Per-parameter gradient values, indexed by param_index.
pub type GradientVector<F> = Vec<F>;

/// n-qubit pure state. Qubit 0 owns the most significant index bit, matching
/// the matrix kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<F> {
    n: usize,
    amps: Vec<Complex<F>>,
}

impl<F: Scalar> StateVector<F> {
    /// |0...0>
    pub fn zero_state(n: usize) -> Self {
        let mut amps = vec![Complex::new(F::zero(), F::zero()); 1 << n];
        amps[0] = Complex::new(F::one(), F::zero());
        Self { n, amps }
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex<F>>) -> Result<Self, SimError> {
        if amps.len() != 1 << n {
            return Err(SimError::AmplitudeCount { n, expected: 1 << n, got: amps.len() });
        }
        let state = Self { n, amps };
        let norm_sqr = state.norm_sqr();
        if (norm_sqr - F::one()).abs() > norm_tolerance::<F>() {
            return Err(SimError::NotNormalized {
                norm_sqr: norm_sqr.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex<F>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> F {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &Self) -> Complex<F> {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::new(F::zero(), F::zero()), |acc, z| acc + z)
    }

    /// Apply a single-qubit gate by amplitude strides, no full-matrix build.
    pub fn apply_single(&mut self, gate: &ComplexMatrix<F>, q: usize) {
        assert_eq!(gate.dim(), 2, "apply_single takes a 2x2 gate");
        assert!(q < self.n, "qubit {q} out of range");
        let stride = 1usize << (self.n - 1 - q);
        let (g00, g01, g10, g11) = (gate[(0, 0)], gate[(0, 1)], gate[(1, 0)], gate[(1, 1)]);
        let mut base = 0;
        while base < self.amps.len() {
            for i0 in base..base + stride {
                let i1 = i0 + stride;
                let (a0, a1) = (self.amps[i0], self.amps[i1]);
                self.amps[i0] = g00 * a0 + g01 * a1;
                self.amps[i1] = g10 * a0 + g11 * a1;
            }
            base += 2 * stride;
        }
    }

    /// Controlled-Z between two qubits: a sign on the |..1..1..> amplitudes.
    pub fn apply_cz(&mut self, a: usize, b: usize) {
        assert!(a != b && a < self.n && b < self.n, "bad CZ pair ({a}, {b})");
        let bit_a = 1usize << (self.n - 1 - a);
        let bit_b = 1usize << (self.n - 1 - b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & bit_a != 0 && i & bit_b != 0 {
                *amp = -*amp;
            }
        }
    }

    /// <psi| O |psi> for a Pauli-string observable.
    pub fn expectation_pauli(&self, o: &Observable) -> F {
        let mut transformed = self.clone();
        for (q, &p) in o.paulis().iter().enumerate() {
            if p != Pauli::I {
                transformed.apply_single(&matkernel::pauli_matrix(p), q);
            }
        }
        self.inner(&transformed).re
    }

    /// <psi| O |psi> for a dense observable. Used by oracles and tests.
    pub fn expectation_dense(&self, o: &ComplexMatrix<F>) -> F {
        assert_eq!(o.dim(), self.amps.len(), "observable dimension mismatch");
        let transformed = Self { n: self.n, amps: matvec(o, &self.amps) };
        self.inner(&transformed).re
    }
}

fn norm_tolerance<F: Scalar>() -> F {
    F::of(1e-10).max(F::EPS)
}

/// Rotation gate in the symmetric-phase convention: RZ here is
/// diag(e^{-i theta/2}, e^{i theta/2}), unlike the phase-stripped form in the
/// matrix kernel. Loss values agree between the two (the phase is global);
/// a test pins that.
pub fn rotation_gate_full<F: Scalar>(axis: Axis, theta: F) -> ComplexMatrix<F> {
    match axis {
        Axis::X | Axis::Y => matkernel::rotation_gate(axis, theta),
        Axis::Z => {
            let half = theta / F::of(2.0);
            let zero = Complex::new(F::zero(), F::zero());
            ComplexMatrix::two_by_two(
                Complex::new(half.cos(), -half.sin()),
                zero,
                zero,
                Complex::new(half.cos(), half.sin()),
            )
        }
    }
}

fn check_dims<F: Scalar>(
    c: &Circuit,
    o: &Observable,
    init: &StateVector<F>,
) -> Result<(), SimError> {
    if o.n() != c.n {
        return Err(SimError::ObservableMismatch { observable: o.n(), circuit: c.n });
    }
    if init.n() != c.n {
        return Err(SimError::StateMismatch { state: init.n(), circuit: c.n });
    }
    Ok(())
}

/// Run the circuit on `psi` with an explicit parameter vector (callers that
/// shift single parameters reuse the circuit structure).
fn apply_circuit<F: Scalar>(c: &Circuit, theta: &[f64], psi: &mut StateVector<F>) {
    for layer in &c.layers {
        for (q, rot) in layer.rotations.iter().enumerate() {
            match rot.axis {
                RotationAxis::Identity => {}
                RotationAxis::Hadamard => psi.apply_single(&matkernel::hadamard(), q),
                _ => {
                    let axis = rot.axis.rotation().expect("rotation axis");
                    let k = rot.param_index.expect("validated circuit");
                    psi.apply_single(&rotation_gate_full(axis, F::of(theta[k])), q);
                }
            }
        }
        for &(a, b) in &layer.entanglers {
            psi.apply_cz(a, b);
        }
    }
    debug_assert!(
        (psi.norm_sqr() - F::one()).abs() <= norm_tolerance::<F>(),
        "state norm drifted during circuit application"
    );
}

/// Loss Tr{rho U† O U} = <psi| U† O U |psi>. In [-1, 1] for Pauli-string
/// observables and normalized states.
pub fn loss<F: Scalar>(c: &Circuit, o: &Observable, init: &StateVector<F>) -> Result<F, SimError> {
    check_dims(c, o, init)?;
    let mut psi = init.clone();
    apply_circuit(c, &c.theta, &mut psi);
    Ok(psi.expectation_pauli(o))
}

/// Parameter-shift gradient: d_k L = (L(theta_k + pi/2) - L(theta_k - pi/2)) / 2,
/// exact for rotations generated by involutory Paulis.
pub fn gradient_shift<F: Scalar>(
    c: &Circuit,
    o: &Observable,
    init: &StateVector<F>,
) -> Result<GradientVector<F>, SimError> {
    check_dims(c, o, init)?;
    let half = F::of(0.5);
    let mut grad = Vec::with_capacity(c.theta.len());
    let mut shifted = c.theta.clone();
    for k in 0..c.theta.len() {
        let original = shifted[k];
        shifted[k] = original + std::f64::consts::FRAC_PI_2;
        let mut psi = init.clone();
        apply_circuit(c, &shifted, &mut psi);
        let plus = psi.expectation_pauli(o);

        shifted[k] = original - std::f64::consts::FRAC_PI_2;
        let mut psi = init.clone();
        apply_circuit(c, &shifted, &mut psi);
        let minus = psi.expectation_pauli(o);

        shifted[k] = original;
        grad.push((plus - minus) * half);
    }
    Ok(grad)
}

/// Central finite difference, the slow third opinion for tests.
pub fn gradient_finite_difference<F: Scalar>(
    c: &Circuit,
    o: &Observable,
    init: &StateVector<F>,
    h: f64,
) -> Result<GradientVector<F>, SimError> {
    check_dims(c, o, init)?;
    let scale = F::of(0.5 / h);
    let mut grad = Vec::with_capacity(c.theta.len());
    let mut shifted = c.theta.clone();
    for k in 0..c.theta.len() {
        let original = shifted[k];
        shifted[k] = original + h;
        let mut psi = init.clone();
        apply_circuit(c, &shifted, &mut psi);
        let plus = psi.expectation_pauli(o);

        shifted[k] = original - h;
        let mut psi = init.clone();
        apply_circuit(c, &shifted, &mut psi);
        let minus = psi.expectation_pauli(o);

        shifted[k] = original;
        grad.push((plus - minus) * scale);
    }
    Ok(grad)
}

/// y = O x for a dense square matrix.
fn matvec<F: Scalar>(o: &ComplexMatrix<F>, x: &[Complex<F>]) -> Vec<Complex<F>> {
    let d = o.dim();
    let mut y = vec![Complex::new(F::zero(), F::zero()); d];
    for (r, out) in y.iter_mut().enumerate() {
        let mut acc = Complex::new(F::zero(), F::zero());
        for (c, xv) in x.iter().enumerate() {
            acc = acc + o[(r, c)] * xv;
        }
        *out = acc;
    }
    y
}

/// In-place O <- G† O G for a single-qubit gate G at qubit q.
fn conjugate_single_inplace<F: Scalar>(o: &mut ComplexMatrix<F>, g: &ComplexMatrix<F>, q: usize, n: usize) {
    let dim = o.dim();
    let stride = 1usize << (n - 1 - q);
    let (g00, g01, g10, g11) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);

    // left-multiply by G†
    let mut base = 0;
    while base < dim {
        for r0 in base..base + stride {
            let r1 = r0 + stride;
            for c in 0..dim {
                let (a, b) = (o[(r0, c)], o[(r1, c)]);
                o[(r0, c)] = g00.conj() * a + g10.conj() * b;
                o[(r1, c)] = g01.conj() * a + g11.conj() * b;
            }
        }
        base += 2 * stride;
    }

    // right-multiply by G
    for r in 0..dim {
        let mut base = 0;
        while base < dim {
            for c0 in base..base + stride {
                let c1 = c0 + stride;
                let (a, b) = (o[(r, c0)], o[(r, c1)]);
                o[(r, c0)] = a * g00 + b * g10;
                o[(r, c1)] = a * g01 + b * g11;
            }
            base += 2 * stride;
        }
    }
}

/// In-place O <- CZ O CZ (CZ is its own inverse and diagonal).
fn conjugate_cz_inplace<F: Scalar>(o: &mut ComplexMatrix<F>, a: usize, b: usize, n: usize) {
    let dim = o.dim();
    let bit_a = 1usize << (n - 1 - a);
    let bit_b = 1usize << (n - 1 - b);
    let flagged = |i: usize| i & bit_a != 0 && i & bit_b != 0;
    for r in 0..dim {
        for c in 0..dim {
            if flagged(r) != flagged(c) {
                o[(r, c)] = -o[(r, c)];
            }
        }
    }
}

/// Commutator-form gradient: d_k L = (i/2) Tr{O_plus [rho_minus, P_k]}, with
/// rho_minus the state through the k-th rotation inclusive and O_plus the
/// rest of the circuit absorbed into the observable. Computed by one forward
/// state sweep and one backward sweep that conjugates a dense observable.
/// Both traces in the commutator are evaluated separately, so a loss of
/// hermiticity in the absorbed observable shows up as a nonzero residue
/// instead of being silently symmetrized away.
pub fn gradient_commutator<F: Scalar>(
    c: &Circuit,
    o: &Observable,
    init: &StateVector<F>,
) -> Result<GradientVector<F>, SimError> {
    check_dims(c, o, init)?;
    let m = c.theta.len();
    let threshold = F::of(1e-10).max(F::EPS);

    // forward: snapshot the state right after each parameterized rotation
    let mut snapshots: Vec<StateVector<F>> = Vec::with_capacity(m);
    snapshots.resize(m, StateVector::zero_state(c.n));
    let mut psi = init.clone();
    for layer in &c.layers {
        for (q, rot) in layer.rotations.iter().enumerate() {
            match rot.axis {
                RotationAxis::Identity => {}
                RotationAxis::Hadamard => psi.apply_single(&matkernel::hadamard(), q),
                _ => {
                    let axis = rot.axis.rotation().expect("rotation axis");
                    let k = rot.param_index.expect("validated circuit");
                    psi.apply_single(&rotation_gate_full(axis, F::of(c.theta[k])), q);
                    snapshots[k] = psi.clone();
                }
            }
        }
        for &(a, b) in &layer.entanglers {
            psi.apply_cz(a, b);
        }
    }

    // backward: absorb gates into the dense observable, reading off each
    // gradient just before its own rotation is absorbed
    let mut o_plus = o.matrix::<F>();
    let mut grad = vec![F::zero(); m];
    let half = F::of(0.5);
    for layer in c.layers.iter().rev() {
        for &(a, b) in layer.entanglers.iter().rev() {
            conjugate_cz_inplace(&mut o_plus, a, b, c.n);
        }
        for q in (0..c.n).rev() {
            let rot = layer.rotations[q];
            match rot.axis {
                RotationAxis::Identity => {}
                RotationAxis::Hadamard => {
                    conjugate_single_inplace(&mut o_plus, &matkernel::hadamard(), q, c.n);
                }
                _ => {
                    let axis = rot.axis.rotation().expect("rotation axis");
                    let k = rot.param_index.expect("validated circuit");
                    let psi_k = &snapshots[k];

                    let pauli = match axis {
                        Axis::X => Pauli::X,
                        Axis::Y => Pauli::Y,
                        Axis::Z => Pauli::Z,
                    };
                    // z1 = <psi| P O+ |psi>, z2 = <psi| O+ P |psi>
                    let o_psi = StateVector { n: c.n, amps: matvec(&o_plus, psi_k.amplitudes()) };
                    let mut p_o_psi = o_psi.clone();
                    p_o_psi.apply_single(&matkernel::pauli_matrix(pauli), q);
                    let z1 = psi_k.inner(&p_o_psi);

                    let mut p_psi = psi_k.clone();
                    p_psi.apply_single(&matkernel::pauli_matrix(pauli), q);
                    let z2 = p_psi.inner(&o_psi).conj();

                    // (i/2)(z1 - z2): real part is the gradient, the
                    // imaginary part must cancel for hermitian O_plus
                    let residue = ((z1.re - z2.re) * half).abs();
                    if residue > threshold {
                        return Err(SimError::ImaginaryResidue {
                            residue: residue.to_f64().unwrap_or(f64::NAN),
                            threshold: threshold.to_f64().unwrap_or(f64::NAN),
                        });
                    }
                    grad[k] = (z2.im - z1.im) * half;

                    let gate = rotation_gate_full(axis, F::of(c.theta[k]));
                    conjugate_single_inplace(&mut o_plus, &gate, q, c.n);
                }
            }
        }
    }
    Ok(grad)
}

/// Full-matrix loss oracle: builds the circuit unitary densely. Guarded to
/// small qubit counts; exists to cross-check the stride path.
pub fn loss_dense_oracle<F: Scalar>(
    c: &Circuit,
    o: &Observable,
    init: &StateVector<F>,
) -> Result<F, SimError> {
    assert!(c.n <= 4, "dense oracle is guarded to n <= 4");
    check_dims(c, o, init)?;
    let dim = 1usize << c.n;
    let mut u = ComplexMatrix::identity(dim);
    for layer in &c.layers {
        for (q, rot) in layer.rotations.iter().enumerate() {
            let gate = match rot.axis {
                RotationAxis::Identity => continue,
                RotationAxis::Hadamard => matkernel::hadamard(),
                _ => {
                    let axis = rot.axis.rotation().expect("rotation axis");
                    rotation_gate_full(axis, F::of(c.theta[rot.param_index.expect("valid")]))
                }
            };
            let embedded =
                matkernel::embed(&gate, &matkernel::QubitIndexSet::single(q), c.n).expect("in range");
            u = &embedded * &u;
        }
        for &(a, b) in &layer.entanglers {
            let block = matkernel::cz_block();
            let at = matkernel::QubitIndexSet::new(vec![a.min(b), a.max(b)]).expect("ordered");
            let embedded = matkernel::embed(&block, &at, c.n).expect("in range");
            u = &embedded * &u;
        }
    }
    let evolved = StateVector { n: c.n, amps: matvec(&u, init.amplitudes()) };
    Ok(evolved.expectation_pauli(o))
}
