//! Structural effective-parameter analysis: a backward pass over the circuit
//! that tracks, per qubit, whether the measured observable's support can
//! reach a rotation slot through the entangler topology. Slots outside that
//! light cone provably have zero gradient; the converse is not claimed, and
//! a numerical soundness check against the simulator is provided.

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, Observable, RotationAxis};
use crate::matkernel::{uniform_unit, Pauli};
use crate::simulator::{gradient_shift, StateVector};
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

#[derive(Debug, Error)]
pub enum LightConeError {
    #[error("observable acts on {observable} qubits but the circuit has {circuit}")]
    LengthMismatch { observable: usize, circuit: usize },
}

/// What the backward pass knows about a qubit's share of the observable
/// support. Ordered: labels only ever strengthen during a pass.
///
/// Two levels below General are enough because CZ gates commute with Z-like
/// support: a Diag qubit cannot spread through an entangler until some
/// rotation turns its support off-axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum SupportLabel {
    Absent,
    Diag,
    General,
}

/// One slot flagged by the soundness check: marked ineffective yet carrying
/// a gradient above threshold. Any instance falsifies the light-cone rule.
#[derive(Debug, Clone, Serialize)]
pub struct SoundnessViolation {
    pub trial: usize,
    pub layer: usize,
    pub qubit: usize,
    pub gradient: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SoundnessReport {
    pub trials: usize,
    /// slot-trial pairs that were actually checked (ineffective, parameterized)
    pub checked: usize,
    pub violations: Vec<SoundnessViolation>,
    pub max_ineffective_gradient: f64,
}

impl SoundnessReport {
    pub fn is_sound(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LightConeReport {
    /// effective flag per slot, outer index layer, inner index qubit;
    /// replaced slots are never effective
    pub effective: Vec<Vec<bool>>,
    /// count of effective parameterized rotations
    pub m: usize,
    pub per_layer: Vec<usize>,
    /// m/(n*d) rounded to 4 decimals, the effective-parameter fraction
    pub m_over_nd: f64,
}

impl LightConeReport {
    pub fn is_effective(&self, layer: usize, qubit: usize) -> bool {
        self.effective[layer][qubit]
    }
}

/// Backward light-cone pass. Initial labels come from the observable
/// (Z is Diag, X/Y are General, I is Absent); each layer is processed
/// entanglers first (reverse list order), then rotations. A CZ lets a
/// General qubit stamp Diag onto its partner, both directions read from the
/// same pre-pair state. A rotation slot is effective iff its qubit is
/// labeled; any rotation or Hadamard on a labeled qubit promotes Diag to
/// General, identity slots do nothing.
pub fn analyze(c: &Circuit, o: &Observable) -> Result<LightConeReport, LightConeError> {
    if o.n() != c.n {
        return Err(LightConeError::LengthMismatch { observable: o.n(), circuit: c.n });
    }
    let mut labels: Vec<SupportLabel> = o
        .paulis()
        .iter()
        .map(|p| match p {
            Pauli::I => SupportLabel::Absent,
            Pauli::Z => SupportLabel::Diag,
            Pauli::X | Pauli::Y => SupportLabel::General,
        })
        .collect();

    let mut effective = vec![vec![false; c.n]; c.layers.len()];
    let mut per_layer = vec![0usize; c.layers.len()];
    let mut m = 0usize;

    for (li, layer) in c.layers.iter().enumerate().rev() {
        for &(a, b) in layer.entanglers.iter().rev() {
            let stamp_a = if labels[b] == SupportLabel::General {
                SupportLabel::Diag
            } else {
                SupportLabel::Absent
            };
            let stamp_b = if labels[a] == SupportLabel::General {
                SupportLabel::Diag
            } else {
                SupportLabel::Absent
            };
            labels[a] = labels[a].max(stamp_a);
            labels[b] = labels[b].max(stamp_b);
        }
        for (q, rot) in layer.rotations.iter().enumerate() {
            if labels[q] == SupportLabel::Absent {
                continue;
            }
            match rot.axis {
                RotationAxis::Identity => {}
                RotationAxis::Hadamard => {
                    labels[q] = SupportLabel::General;
                }
                _ => {
                    effective[li][q] = true;
                    per_layer[li] += 1;
                    m += 1;
                    labels[q] = SupportLabel::General;
                }
            }
        }
    }

    let nd = c.n * c.layers.len();
    debug_assert!(m <= nd);
    let m_over_nd = ((m as f64 / nd as f64) * 1e4).round() / 1e4;
    Ok(LightConeReport { effective, m, per_layer, m_over_nd })
}

/// Numerical soundness check: over `trials` fresh angle draws, every slot
/// the analyzer marked ineffective must have shift-rule gradient within
/// roundoff of zero. One-sided by design; effective slots are allowed to
/// have zero gradient at particular angles.
pub fn validate_against_gradient(
    c: &Circuit,
    o: &Observable,
    trials: usize,
    seed: u64,
) -> Result<SoundnessReport, LightConeError> {
    assert!(c.n <= 6, "soundness sweep is guarded to n <= 6");
    let report = analyze(c, o)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = StateVector::<f64>::zero_state(c.n);
    let mut violations = Vec::new();
    let mut checked = 0usize;
    let mut max_grad = 0.0f64;

    let slots = c.param_slots();
    for trial in 0..trials {
        let mut resampled = c.clone();
        for theta in &mut resampled.theta {
            *theta = uniform_unit(&mut rng) * 4.0 * std::f64::consts::PI - 2.0 * std::f64::consts::PI;
        }
        let grad = gradient_shift(&resampled, o, &init).expect("dims pre-checked");
        for (k, g) in grad.iter().enumerate() {
            let (layer, qubit) = slots[k];
            if report.effective[layer][qubit] {
                continue;
            }
            checked += 1;
            max_grad = max_grad.max(g.abs());
            if g.abs() > 1e-10 {
                violations.push(SoundnessViolation { trial, layer, qubit, gradient: *g });
            }
        }
    }
    Ok(SoundnessReport { trials, checked, violations, max_ineffective_gradient: max_grad })
}
