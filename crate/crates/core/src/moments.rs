//! Ensemble averages of conjugation by random rotation gates: the
//! first-moment channel E[U†AU] and the second-moment map E[U†AU B U†CU],
//! each in two flavors. The quadrature gate-average is the ground truth;
//! the closed-form depth evaluators reproduce a printed geometric-coefficient
//! formula that is known to drift from the exact composition at depth 3 and
//! beyond, and both are kept so the drift stays measurable.
//!
//! Everything here uses the phase-stripped RZ convention from the matrix
//! kernel. All reductions are sequential in index order so golden files stay
//! stable.

use thiserror::Error;

use crate::matkernel::{
    embed, partial_trace, pauli_matrix, rotation_gate, tensor_insert, Axis, ComplexMatrix,
    MatError, Pauli, QubitIndexSet,
};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum MomentError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error("{slots} parameter slots exceed the brute-force budget of {max}")]
    TooManySlots { slots: usize, max: usize },
}

/// Number of equispaced quadrature nodes on [-2pi, 2pi). The integrands that
/// appear here are trigonometric polynomials of harmonic degree at most 8 in
/// theta/2 (four gate factors, two harmonics each in the worst case), and an
/// equispaced rule on a full period is exact for every harmonic not divisible
/// by the node count, so 16 clears the worst case with margin.
pub const QUADRATURE_NODES: usize = 16;

/// Average of a matrix-valued function of one random rotation gate: uniform
/// over the three axes, uniform angle on [-2pi, 2pi) via the equispaced rule.
/// Exact to roundoff for the moment integrands in this module.
pub fn quadrature_gate_average<F, M>(mut f: M) -> ComplexMatrix<F>
where
    F: Scalar,
    M: FnMut(&ComplexMatrix<F>) -> ComplexMatrix<F>,
{
    let mut acc: Option<ComplexMatrix<F>> = None;
    for axis in Axis::ALL {
        for t in 0..QUADRATURE_NODES {
            let theta =
                F::of(-2.0) * F::PI() + F::of(4.0) * F::PI() * F::of_usize(t) / F::of_usize(QUADRATURE_NODES);
            let term = f(&rotation_gate(axis, theta));
            acc = Some(match acc {
                None => term,
                Some(sum) => &sum + &term,
            });
        }
    }
    let weight = F::one() / F::of_usize(3 * QUADRATURE_NODES);
    acc.expect("three axes times sixteen nodes is never empty").scaled_re(weight)
}

fn check_dim<F: Scalar>(a: &ComplexMatrix<F>, n: usize) -> Result<(), MomentError> {
    if a.dim() != 1 << n {
        return Err(MomentError::Mat(MatError::DimMismatch { expected: 1 << n, got: a.dim() }));
    }
    Ok(())
}

/// I_sigma tensor Tr_sigma(a): trace out the qubits in sigma and refill them
/// with identity. The workhorse term of every first-moment expression.
fn trace_and_refill<F: Scalar>(
    a: &ComplexMatrix<F>,
    sigma: &QubitIndexSet,
    n: usize,
) -> Result<ComplexMatrix<F>, MomentError> {
    let reduced = partial_trace(a, sigma, n)?;
    Ok(embed(&reduced, &sigma.complement(n), n)?)
}

/// E[u†Au] for one random gate on qubit j: (1/3)(A + I_j tensor Tr_j A).
pub fn first_moment_single<F: Scalar>(
    a: &ComplexMatrix<F>,
    j: usize,
    n: usize,
) -> Result<ComplexMatrix<F>, MomentError> {
    check_dim(a, n)?;
    let refilled = trace_and_refill(a, &QubitIndexSet::single(j), n)?;
    Ok((a + &refilled).scaled_re(F::one() / F::of(3.0)))
}

/// One layer of independent random gates, all qubits at once:
/// (1/3^n) sum over subsets sigma of I_sigma tensor Tr_sigma(a).
pub fn first_moment_layer<F: Scalar>(
    a: &ComplexMatrix<F>,
    n: usize,
) -> Result<ComplexMatrix<F>, MomentError> {
    check_dim(a, n)?;
    let mut acc = ComplexMatrix::zeros(a.dim());
    for sigma in QubitIndexSet::power_set(n) {
        acc = &acc + &trace_and_refill(a, &sigma, n)?;
    }
    Ok(acc.scaled_re(F::of(3.0).powi(-(n as i32))))
}

/// Coefficients of the depth-d first-moment channel written in the
/// trace-and-refill basis: map(a) = sum over sigma of terms[sigma] *
/// (I_sigma tensor Tr_sigma a). Indexed by subset bitmask, bit q = qubit q.
#[derive(Debug, Clone)]
pub struct FirstMomentExpansion<F> {
    n: usize,
    d: usize,
    terms: Vec<F>,
}

impl<F: Scalar> FirstMomentExpansion<F> {
    /// Exact d-fold composition of the layer channel, via the subset algebra
    /// (I_tau tensor Tr_tau)(I_sigma tensor Tr_sigma) =
    /// 2^{|sigma and tau|} (I_{sigma or tau} tensor Tr_{sigma or tau}).
    pub fn exact(n: usize, d: usize) -> Self {
        assert!(d >= 1, "depth starts at 1");
        let masks = 1usize << n;
        let layer_weight = F::of(3.0).powi(-(n as i32));
        let mut terms = vec![layer_weight; masks];
        for _ in 1..d {
            let mut next = vec![F::zero(); masks];
            for sigma in 0..masks {
                for tau in 0..masks {
                    let overlap = (sigma & tau).count_ones() as i32;
                    next[sigma | tau] +=
                        terms[sigma] * layer_weight * F::of(2.0).powi(overlap);
                }
            }
            terms = next;
        }
        Self { n, d, terms }
    }

    /// The printed closed form: (1/3^n) (4^{|sigma|}/3^n)^{d-1} per subset.
    /// Matches the exact composition only for d <= 2; kept so the drift at
    /// larger depth can be tabulated rather than hidden.
    pub fn closed_form(n: usize, d: usize) -> Self {
        assert!(d >= 1, "depth starts at 1");
        let masks = 1usize << n;
        let base = F::of(3.0).powi(-(n as i32));
        let terms = (0..masks)
            .map(|sigma| {
                let k = sigma.count_ones() as i32;
                let ratio = F::of(4.0).powi(k) * F::of(3.0).powi(-(n as i32));
                base * ratio.powi(d as i32 - 1)
            })
            .collect();
        Self { n, d, terms }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coefficient(&self, sigma: &QubitIndexSet) -> F {
        self.terms[sigma.bitmask()]
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (QubitIndexSet, F)> + '_ {
        self.terms
            .iter()
            .enumerate()
            .map(|(mask, &c)| (QubitIndexSet::from_bitmask(mask, self.n), c))
    }

    /// Weighted unitality sum: sum over sigma of terms[sigma] * 2^{|sigma|}.
    /// Equals 1 exactly when the expansion maps I to I.
    pub fn unitality_weight(&self) -> F {
        let mut total = F::zero();
        for (mask, &c) in self.terms.iter().enumerate() {
            total += c * F::of(2.0).powi(mask.count_ones() as i32);
        }
        total
    }

    pub fn apply(&self, a: &ComplexMatrix<F>) -> Result<ComplexMatrix<F>, MomentError> {
        check_dim(a, self.n)?;
        let mut acc = ComplexMatrix::zeros(a.dim());
        for (mask, &c) in self.terms.iter().enumerate() {
            let sigma = QubitIndexSet::from_bitmask(mask, self.n);
            acc = &acc + &trace_and_refill(a, &sigma, self.n)?.scaled_re(c);
        }
        Ok(acc)
    }
}

/// Depth-d first moment by exact composition. The reference implementation
/// for everything downstream.
pub fn first_moment_depth_exact<F: Scalar>(
    a: &ComplexMatrix<F>,
    n: usize,
    d: usize,
) -> Result<ComplexMatrix<F>, MomentError> {
    FirstMomentExpansion::exact(n, d).apply(a)
}

/// Depth-d first moment with the printed closed-form coefficients. Agrees
/// with the exact composition for d <= 2 and drifts beyond; see the depth
/// tests for the pinned gap.
pub fn first_moment_depth_closed_form<F: Scalar>(
    a: &ComplexMatrix<F>,
    n: usize,
    d: usize,
) -> Result<ComplexMatrix<F>, MomentError> {
    FirstMomentExpansion::closed_form(n, d).apply(a)
}

/// The pieces of the single-gate second moment: exact = (f + epsilon)/4 +
/// g/12, with f and g assembled from fixed trilinear forms and epsilon the
/// traceless remainder that makes the identity exact.
#[derive(Debug, Clone)]
pub struct SecondMomentDecomposition<F> {
    pub f_part: ComplexMatrix<F>,
    pub g_part: ComplexMatrix<F>,
    pub epsilon_part: ComplexMatrix<F>,
}

impl<F: Scalar> SecondMomentDecomposition<F> {
    /// (f + epsilon)/4 + g/12, which must reproduce the exact average.
    pub fn reconstruct(&self) -> ComplexMatrix<F> {
        let quarter = F::one() / F::of(4.0);
        let twelfth = F::one() / F::of(12.0);
        &(&self.f_part + &self.epsilon_part).scaled_re(quarter) + &self.g_part.scaled_re(twelfth)
    }
}

/// f on bare 2x2 factors: xyz + Tr(xz) y.
fn f_kernel<F: Scalar>(
    x: &ComplexMatrix<F>,
    y: &ComplexMatrix<F>,
    z: &ComplexMatrix<F>,
) -> ComplexMatrix<F> {
    let xyz = &(x * y) * z;
    &xyz + &y.scaled((x * z).trace())
}

/// g on bare 2x2 factors: the seven-term companion of f.
fn g_kernel<F: Scalar>(
    x: &ComplexMatrix<F>,
    y: &ComplexMatrix<F>,
    z: &ComplexMatrix<F>,
) -> ComplexMatrix<F> {
    let xy = x * y;
    let yz = y * z;
    let xz = x * z;
    let xyz = &xy * z;
    let eye = ComplexMatrix::identity(2);
    let mut acc = eye.scaled(xyz.trace());
    acc = &acc - &x.scaled(yz.trace());
    acc = &acc - &z.scaled(xy.trace());
    acc = &acc + &yz.scaled(x.trace());
    acc = &acc + &xz.scaled(y.trace());
    acc = &acc + &xy.scaled(z.trace());
    &acc - &xyz
}

/// Split an n-qubit matrix over qubit j's Pauli basis: a = sum over p of
/// sigma_p at j tensor components[p], components living on the other qubits.
fn pauli_components<F: Scalar>(
    a: &ComplexMatrix<F>,
    j: usize,
    n: usize,
) -> Result<Vec<ComplexMatrix<F>>, MomentError> {
    let at = QubitIndexSet::single(j);
    let mut out = Vec::with_capacity(4);
    for p in Pauli::ALL {
        let projected = &embed(&pauli_matrix(p), &at, n)? * a;
        out.push(partial_trace(&projected, &at, n)?.scaled_re(F::one() / F::of(2.0)));
    }
    Ok(out)
}

/// E[u†Au B u†Cu] for one random gate on qubit j, plus its f/g/epsilon
/// decomposition. The exact value comes straight from quadrature; f and g
/// are built factor-wise over qubit j's Pauli components, which reduces to
/// the bare trilinear forms when n = 1 and keeps epsilon traceless for all n.
pub fn second_moment_single<F: Scalar>(
    a: &ComplexMatrix<F>,
    b: &ComplexMatrix<F>,
    c: &ComplexMatrix<F>,
    j: usize,
    n: usize,
) -> Result<(ComplexMatrix<F>, SecondMomentDecomposition<F>), MomentError> {
    assert!(n <= 6, "dense second-moment ops are guarded to n <= 6");
    check_dim(a, n)?;
    check_dim(b, n)?;
    check_dim(c, n)?;
    let at = QubitIndexSet::single(j);

    let exact = quadrature_gate_average(|gate| {
        let w = embed(gate, &at, n).expect("qubit index already validated");
        let wa = &(&w.adjoint() * a) * &w;
        let wc = &(&w.adjoint() * c) * &w;
        &(&wa * b) * &wc
    });

    let ap = pauli_components(a, j, n)?;
    let bp = pauli_components(b, j, n)?;
    let cp = pauli_components(c, j, n)?;
    let sigma: Vec<ComplexMatrix<F>> = Pauli::ALL.iter().map(|&p| pauli_matrix(p)).collect();

    let dim = a.dim();
    let mut f = ComplexMatrix::zeros(dim);
    let mut g = ComplexMatrix::zeros(dim);
    for p in 0..4 {
        for r in 0..4 {
            let left = &ap[p] * &bp[r];
            for q in 0..4 {
                let inner = &left * &cp[q];
                let f_outer = f_kernel(&sigma[p], &sigma[r], &sigma[q]);
                let g_outer = g_kernel(&sigma[p], &sigma[r], &sigma[q]);
                f = &f + &tensor_insert(&f_outer, &inner, &at, n)?;
                g = &g + &tensor_insert(&g_outer, &inner, &at, n)?;
            }
        }
    }

    // epsilon is whatever the trilinear parts miss, scaled so that
    // exact = (f + epsilon)/4 + g/12 holds identically
    let epsilon = &(&exact.scaled_re(F::of(4.0)) - &f) - &g.scaled_re(F::one() / F::of(3.0));
    Ok((exact, SecondMomentDecomposition { f_part: f, g_part: g, epsilon_part: epsilon }))
}

/// Depth-d second moment, printed leading sum only: (1/4^n) sum over sigma of
/// (4^{|sigma|-n})^{d-1} times ABC for the empty subset and
/// (I_sigma tensor Tr_sigma{AC}) B otherwise. No remainder term.
pub fn second_moment_depth_closed_form<F: Scalar>(
    a: &ComplexMatrix<F>,
    b: &ComplexMatrix<F>,
    c: &ComplexMatrix<F>,
    n: usize,
    d: usize,
) -> Result<ComplexMatrix<F>, MomentError> {
    assert!(n <= 6, "dense second-moment ops are guarded to n <= 6");
    assert!(d >= 1, "depth starts at 1");
    check_dim(a, n)?;
    check_dim(b, n)?;
    check_dim(c, n)?;
    let ac = a * c;
    let base = F::of(4.0).powi(-(n as i32));
    let mut acc = ComplexMatrix::zeros(a.dim());
    for sigma in QubitIndexSet::power_set(n) {
        let decay = F::of(4.0).powi(sigma.len() as i32 - n as i32).powi(d as i32 - 1);
        let term = if sigma.is_empty() {
            &(a * b) * c
        } else {
            &trace_and_refill(&ac, &sigma, n)? * b
        };
        acc = &acc + &term.scaled_re(base * decay);
    }
    Ok(acc)
}

/// Exhaustive tensor-grid average of E[U†AU B U†CU] over a rotation-only
/// circuit of n qubits and d layers: every slot ranges over 3 axes and 16
/// quadrature nodes, the same sampled U conjugating both sides. Costs
/// 48^{n*d} terms, so it refuses more than 4 slots.
pub fn brute_force_moment<F: Scalar>(
    n: usize,
    d: usize,
    a: &ComplexMatrix<F>,
    b: &ComplexMatrix<F>,
    c: &ComplexMatrix<F>,
) -> Result<ComplexMatrix<F>, MomentError> {
    const MAX_SLOTS: usize = 4;
    let slots = n * d;
    if slots > MAX_SLOTS {
        return Err(MomentError::TooManySlots { slots, max: MAX_SLOTS });
    }
    check_dim(a, n)?;
    check_dim(b, n)?;
    check_dim(c, n)?;

    // per-qubit table of all 48 embedded gate choices, axis-major
    let choices = 3 * QUADRATURE_NODES;
    let mut gate_table: Vec<Vec<ComplexMatrix<F>>> = Vec::with_capacity(n);
    for q in 0..n {
        let at = QubitIndexSet::single(q);
        let mut per_qubit = Vec::with_capacity(choices);
        for axis in Axis::ALL {
            for t in 0..QUADRATURE_NODES {
                let theta = F::of(-2.0) * F::PI()
                    + F::of(4.0) * F::PI() * F::of_usize(t) / F::of_usize(QUADRATURE_NODES);
                per_qubit.push(embed(&rotation_gate(axis, theta), &at, n)?);
            }
        }
        gate_table.push(per_qubit);
    }

    // odometer over slot choices, slot 0 (layer 0, qubit 0) most significant
    let mut digits = vec![0usize; slots];
    let mut acc = ComplexMatrix::zeros(a.dim());
    loop {
        let mut u = ComplexMatrix::identity(a.dim());
        for (slot, &choice) in digits.iter().enumerate() {
            u = &gate_table[slot % n][choice] * &u;
        }
        let ud = u.adjoint();
        let ua = &(&ud * a) * &u;
        let uc = &(&ud * c) * &u;
        acc = &acc + &(&(&ua * b) * &uc);

        let mut carry = slots;
        while carry > 0 {
            let pos = carry - 1;
            digits[pos] += 1;
            if digits[pos] < choices {
                break;
            }
            digits[pos] = 0;
            carry -= 1;
        }
        if carry == 0 {
            break;
        }
    }
    let weight = F::of_usize(choices).powi(-(slots as i32));
    Ok(acc.scaled_re(weight))
}
