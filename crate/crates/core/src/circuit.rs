//! Circuit intermediate representation, observable parsing, random-ensemble
//! generation, and the JSON wire format.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matkernel::{self, Axis, ComplexMatrix, Pauli};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("invalid observable character {0:?}, expected one of I, X, Y, Z")]
    BadPauliChar(char),
}

/// What sits in one rotation slot: a parameterized rotation about X, Y or Z,
/// or one of the two parameterless replacement gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RotationAxis {
    X,
    Y,
    Z,
    #[serde(rename = "ID")]
    Identity,
    #[serde(rename = "H")]
    Hadamard,
}

impl RotationAxis {
    /// The generator axis when this slot is an actual rotation.
    pub fn rotation(self) -> Option<Axis> {
        match self {
            RotationAxis::X => Some(Axis::X),
            RotationAxis::Y => Some(Axis::Y),
            RotationAxis::Z => Some(Axis::Z),
            RotationAxis::Identity | RotationAxis::Hadamard => None,
        }
    }

    pub fn is_rotation(self) -> bool {
        self.rotation().is_some()
    }
}

impl From<Axis> for RotationAxis {
    fn from(a: Axis) -> Self {
        match a {
            Axis::X => RotationAxis::X,
            Axis::Y => RotationAxis::Y,
            Axis::Z => RotationAxis::Z,
        }
    }
}

/// One rotation slot. `param_index` is present exactly when the slot holds a
/// parameterized rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationSpec {
    pub axis: RotationAxis,
    #[serde(rename = "param", default, skip_serializing_if = "Option::is_none")]
    pub param_index: Option<usize>,
}

/// One circuit layer: a rotation slot per qubit, then CZ entangler pairs
/// applied in list order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub rotations: Vec<RotationSpec>,
    pub entanglers: Vec<(usize, usize)>,
}

/// Layered circuit with a flat parameter vector. Slot order is layer-major:
/// layer 0 qubits 0..n, then layer 1, and so on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circuit {
    pub n: usize,
    pub layers: Vec<Layer>,
    pub theta: Vec<f64>,
}

impl Circuit {
    /// Circuit depth (number of layers).
    pub fn d(&self) -> usize {
        self.layers.len()
    }

    pub fn param_count(&self) -> usize {
        self.theta.len()
    }

    /// Rotation slot count, parameterized or not.
    pub fn slot_count(&self) -> usize {
        self.n * self.layers.len()
    }

    /// Per slot in layer-major order: the parameter index if the slot is a
    /// rotation, None if it was replaced.
    pub fn slot_param_indices(&self) -> Vec<Option<usize>> {
        self.layers
            .iter()
            .flat_map(|l| l.rotations.iter().map(|r| r.param_index))
            .collect()
    }

    /// (layer, qubit) of each parameter, indexed by param_index.
    pub fn param_slots(&self) -> Vec<(usize, usize)> {
        let mut slots = vec![(0, 0); self.param_count()];
        for (li, layer) in self.layers.iter().enumerate() {
            for (q, r) in layer.rotations.iter().enumerate() {
                if let Some(k) = r.param_index {
                    slots[k] = (li, q);
                }
            }
        }
        slots
    }

    /// Template with every slot rotating about the same axis, theta = 0.
    /// Handy for fixed-topology studies where theta is set afterwards.
    pub fn uniform(n: usize, d: usize, pattern: EntanglerPattern, axis: Axis) -> Self {
        let pairs = entangler_pairs(pattern, n);
        let layers = (0..d)
            .map(|li| Layer {
                rotations: (0..n)
                    .map(|q| RotationSpec {
                        axis: axis.into(),
                        param_index: Some(li * n + q),
                    })
                    .collect(),
                entanglers: pairs.clone(),
            })
            .collect();
        Circuit { n, layers, theta: vec![0.0; n * d] }
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.n == 0 {
            return Err(CircuitError::Invariant("qubit count must be at least 1".into()));
        }
        if self.layers.is_empty() {
            return Err(CircuitError::Invariant("circuit must have at least one layer".into()));
        }
        let mut seen = HashSet::new();
        let mut rotations = 0usize;
        for (li, layer) in self.layers.iter().enumerate() {
            if layer.rotations.len() != self.n {
                return Err(CircuitError::Invariant(format!(
                    "layer {li} has {} rotation slots, expected {}",
                    layer.rotations.len(),
                    self.n
                )));
            }
            for (q, r) in layer.rotations.iter().enumerate() {
                match (r.axis.is_rotation(), r.param_index) {
                    (true, Some(k)) => {
                        rotations += 1;
                        if !seen.insert(k) {
                            return Err(CircuitError::Invariant(format!(
                                "param_index {k} used more than once"
                            )));
                        }
                    }
                    (true, None) => {
                        return Err(CircuitError::Invariant(format!(
                            "rotation slot (layer {li}, qubit {q}) is missing its param index"
                        )));
                    }
                    (false, Some(_)) => {
                        return Err(CircuitError::Invariant(format!(
                            "replaced slot (layer {li}, qubit {q}) must not carry a param index"
                        )));
                    }
                    (false, None) => {}
                }
            }
            for &(a, b) in &layer.entanglers {
                if a == b || a >= self.n || b >= self.n {
                    return Err(CircuitError::Invariant(format!(
                        "entangler pair ({a}, {b}) invalid for {} qubits",
                        self.n
                    )));
                }
            }
        }
        if rotations != self.theta.len() {
            return Err(CircuitError::Invariant(format!(
                "{} rotation slots but {} theta entries",
                rotations,
                self.theta.len()
            )));
        }
        // indices were distinct, so covering 0..m means exactly 0..m-1
        if seen.iter().any(|&k| k >= rotations) {
            return Err(CircuitError::Invariant(format!(
                "param indices must be dense in 0..{rotations}"
            )));
        }
        Ok(())
    }
}

/// Pauli-string observable, one factor per qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observable {
    paulis: Vec<Pauli>,
}

impl Observable {
    pub fn parse(s: &str) -> Result<Self, CircuitError> {
        let paulis = s
            .chars()
            .map(|ch| match ch {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(CircuitError::BadPauliChar(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { paulis })
    }

    /// All-Z on every qubit.
    pub fn all_z(n: usize) -> Self {
        Self { paulis: vec![Pauli::Z; n] }
    }

    pub fn n(&self) -> usize {
        self.paulis.len()
    }

    pub fn paulis(&self) -> &[Pauli] {
        &self.paulis
    }

    pub fn is_identity(&self) -> bool {
        self.paulis.iter().all(|&p| p == Pauli::I)
    }

    /// Dense tensor-product realization. Hermitian, squares to the identity.
    pub fn matrix<F: Scalar>(&self) -> ComplexMatrix<F> {
        let mut out = ComplexMatrix::identity(1);
        for &p in &self.paulis {
            out = matkernel::kron(&out, &matkernel::pauli_matrix(p));
        }
        out
    }

    /// Tr(O^2). A Pauli string squares to the identity, so this is 2^n.
    pub fn trace_of_square(&self) -> f64 {
        (1u64 << self.paulis.len()) as f64
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.paulis {
            let ch = match p {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

impl FromStr for Observable {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

/// Fixed entangler layout, repeated identically in every layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntanglerPattern {
    Brick,
    Ring,
    Ladder,
    None,
}

/// The CZ pairs one layer of the pattern applies, in application order.
pub fn entangler_pairs(pattern: EntanglerPattern, n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    match pattern {
        EntanglerPattern::Brick => {
            pairs.extend((0..n.saturating_sub(1)).step_by(2).map(|i| (i, i + 1)));
            pairs.extend((1..n.saturating_sub(1)).step_by(2).map(|i| (i, i + 1)));
        }
        EntanglerPattern::Ring => {
            pairs.extend((0..n.saturating_sub(1)).map(|i| (i, i + 1)));
            // the wrap pair duplicates (0,1) at n=2 and is meaningless below
            if n > 2 {
                pairs.push((0, n - 1));
            }
        }
        EntanglerPattern::Ladder => {
            pairs.extend((0..n.saturating_sub(1)).map(|i| (i, i + 1)));
        }
        EntanglerPattern::None => {}
    }
    pairs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReplacementMode {
    None,
    Identity,
    Hadamard,
}

/// Everything needed to regenerate a circuit ensemble deterministically.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub n: usize,
    pub d: usize,
    pub entangler_pattern: EntanglerPattern,
    pub observable: Observable,
    pub replacement_mode: ReplacementMode,
    pub replacement_fraction: f64,
    pub samples: usize,
    pub master_seed: u64,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.n == 0 || self.d == 0 {
            return Err(CircuitError::Invariant("n and d must be at least 1".into()));
        }
        if self.observable.n() != self.n {
            return Err(CircuitError::Invariant(format!(
                "observable has {} factors for {} qubits",
                self.observable.n(),
                self.n
            )));
        }
        if !(0.0..=1.0).contains(&self.replacement_fraction) {
            return Err(CircuitError::Invariant(format!(
                "replacement fraction {} outside [0, 1]",
                self.replacement_fraction
            )));
        }
        if self.replacement_mode == ReplacementMode::None && self.replacement_fraction != 0.0 {
            return Err(CircuitError::Invariant(
                "replacement fraction must be 0 when replacement mode is none".into(),
            ));
        }
        Ok(())
    }

    pub fn slot_count(&self) -> usize {
        self.n * self.d
    }
}

/// splitmix64 finalizer over (master_seed, index): cheap, well-mixed,
/// order-independent per-sample streams.
pub fn stream_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draw circuit number `index` of the ensemble. Deterministic in
/// (master_seed, index); the draw order below is part of the wire-level
/// reproducibility contract and must not be reordered:
/// axes for every slot (layer-major), then the replacement subset, then
/// theta for each surviving slot (layer-major).
pub fn sample_circuit(spec: &EnsembleSpec, index: usize) -> Circuit {
    assert!(index < spec.samples, "sample index {index} out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(spec.master_seed, index as u64));
    let nd = spec.slot_count();

    // axes are drawn for every slot, including ones replaced right after,
    // so the axis stream does not depend on the replacement draw
    let axes: Vec<Axis> = (0..nd)
        .map(|_| match rng.next_u64() % 3 {
            0 => Axis::X,
            1 => Axis::Y,
            _ => Axis::Z,
        })
        .collect();

    let replace_count = match spec.replacement_mode {
        ReplacementMode::None => 0,
        _ => ((spec.replacement_fraction * nd as f64).round() as usize).min(nd),
    };
    let mut slot_ids: Vec<usize> = (0..nd).collect();
    for i in 0..replace_count {
        let j = i + (rng.next_u64() % (nd - i) as u64) as usize;
        slot_ids.swap(i, j);
    }
    let mut replaced = vec![false; nd];
    for &s in &slot_ids[..replace_count] {
        replaced[s] = true;
    }

    let pairs = entangler_pairs(spec.entangler_pattern, spec.n);
    let mut theta = Vec::with_capacity(nd - replace_count);
    let mut layers = Vec::with_capacity(spec.d);
    for li in 0..spec.d {
        let rotations = (0..spec.n)
            .map(|q| {
                let slot = li * spec.n + q;
                if replaced[slot] {
                    let axis = match spec.replacement_mode {
                        ReplacementMode::Identity => RotationAxis::Identity,
                        ReplacementMode::Hadamard => RotationAxis::Hadamard,
                        ReplacementMode::None => unreachable!("no slots replaced in mode none"),
                    };
                    RotationSpec { axis, param_index: None }
                } else {
                    let t = 4.0 * std::f64::consts::PI * matkernel::uniform_unit(&mut rng)
                        - 2.0 * std::f64::consts::PI;
                    theta.push(t);
                    RotationSpec { axis: axes[slot].into(), param_index: Some(theta.len() - 1) }
                }
            })
            .collect();
        layers.push(Layer { rotations, entanglers: pairs.clone() });
    }
    Circuit { n: spec.n, layers, theta }
}

/// Serialize with floats at 17 significant digits, enough to round-trip f64
/// exactly.
pub fn to_json(c: &Circuit) -> String {
    struct SciFormatter;

    impl serde_json::ser::Formatter for SciFormatter {
        fn write_f64<W: ?Sized + std::io::Write>(
            &mut self,
            writer: &mut W,
            value: f64,
        ) -> std::io::Result<()> {
            write!(writer, "{value:.16e}")
        }
    }

    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    c.serialize(&mut ser).expect("in-memory serialization cannot fail");
    String::from_utf8(buf).expect("serializer output is UTF-8")
}

pub fn from_json(text: &str) -> Result<Circuit, CircuitError> {
    let circuit: Circuit = serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Syntax | Category::Eof => CircuitError::MalformedJson(e.to_string()),
            _ => CircuitError::Schema(e.to_string()),
        }
    })?;
    circuit.validate()?;
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::pauli_matrix;
    use proptest::prelude::*;

    fn small_spec() -> EnsembleSpec {
        EnsembleSpec {
            n: 1,
            d: 1,
            entangler_pattern: EntanglerPattern::None,
            observable: Observable::parse("Z").unwrap(),
            replacement_mode: ReplacementMode::None,
            replacement_fraction: 0.0,
            samples: 4,
            master_seed: 7,
        }
    }

    #[test]
    fn sampling_is_deterministic_and_streams_differ() {
        let spec = small_spec();
        assert_eq!(sample_circuit(&spec, 0), sample_circuit(&spec, 0));
        assert_ne!(sample_circuit(&spec, 0).theta, sample_circuit(&spec, 1).theta);
    }

    #[test]
    fn full_replacement_leaves_no_parameters() {
        let spec = EnsembleSpec {
            n: 3,
            d: 2,
            replacement_mode: ReplacementMode::Identity,
            replacement_fraction: 1.0,
            observable: Observable::parse("ZZZ").unwrap(),
            ..small_spec()
        };
        let c = sample_circuit(&spec, 0);
        assert!(c.theta.is_empty());
        assert!(c
            .layers
            .iter()
            .flat_map(|l| &l.rotations)
            .all(|r| r.axis == RotationAxis::Identity && r.param_index.is_none()));
        c.validate().unwrap();
    }

    #[test]
    fn brick_pattern_matches_four_qubit_layout() {
        assert_eq!(entangler_pairs(EntanglerPattern::Brick, 4), vec![(0, 1), (2, 3), (1, 2)]);
        assert_eq!(entangler_pairs(EntanglerPattern::Brick, 2), vec![(0, 1)]);
        assert_eq!(entangler_pairs(EntanglerPattern::Ring, 2), vec![(0, 1)]);
        assert_eq!(entangler_pairs(EntanglerPattern::Ring, 4), vec![(0, 1), (1, 2), (2, 3), (0, 3)]);
        assert_eq!(entangler_pairs(EntanglerPattern::Ladder, 3), vec![(0, 1), (1, 2)]);
        assert!(entangler_pairs(EntanglerPattern::None, 5).is_empty());
        assert!(entangler_pairs(EntanglerPattern::Brick, 1).is_empty());
    }

    #[test]
    fn observable_matrices() {
        let z = pauli_matrix::<f64>(Pauli::Z);
        let i = pauli_matrix::<f64>(Pauli::I);

        let zz = Observable::parse("ZZ").unwrap().matrix::<f64>();
        assert!(zz.max_abs_diff(&matkernel::kron(&z, &z)) <= 1e-15);

        let zi = Observable::parse("ZI").unwrap().matrix::<f64>();
        assert!(zi.max_abs_diff(&matkernel::kron(&z, &i)) <= 1e-15);

        let all_i = Observable::parse("IIII").unwrap();
        assert!(all_i.is_identity());
        assert!(all_i.matrix::<f64>().max_abs_diff(&ComplexMatrix::identity(16)) <= 1e-15);

        assert!(matches!(
            Observable::parse("ZQ").unwrap_err(),
            CircuitError::BadPauliChar('Q')
        ));
    }

    #[test]
    fn json_round_trip_preserves_everything() {
        let spec = EnsembleSpec {
            n: 4,
            d: 3,
            entangler_pattern: EntanglerPattern::Brick,
            observable: Observable::parse("ZIII").unwrap(),
            ..small_spec()
        };
        let c = sample_circuit(&spec, 2);
        let text = to_json(&c);
        let back = from_json(&text).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn json_errors_are_distinguished() {
        assert!(matches!(from_json("{ not json"), Err(CircuitError::MalformedJson(_))));

        // well-formed JSON, missing the layers key
        let text = r#"{"n": 1, "theta": []}"#;
        assert!(matches!(from_json(text), Err(CircuitError::Schema(_))));

        // schema-valid but duplicate param index
        let text = r#"{
            "n": 2,
            "layers": [{
                "rotations": [{"axis": "X", "param": 0}, {"axis": "Y", "param": 0}],
                "entanglers": []
            }],
            "theta": [0.1, 0.2]
        }"#;
        assert!(matches!(from_json(text), Err(CircuitError::Invariant(_))));
    }

    #[test]
    fn axis_frequencies_close_to_uniform() {
        // 30k slots: 3 sigma for a fair three-sided draw is ~245 around 10k
        let spec = EnsembleSpec {
            n: 4,
            d: 25,
            observable: Observable::parse("ZZZZ").unwrap(),
            samples: 300,
            ..small_spec()
        };
        let mut counts = [0usize; 3];
        for i in 0..spec.samples {
            for layer in &sample_circuit(&spec, i).layers {
                for r in &layer.rotations {
                    match r.axis {
                        RotationAxis::X => counts[0] += 1,
                        RotationAxis::Y => counts[1] += 1,
                        RotationAxis::Z => counts[2] += 1,
                        _ => unreachable!(),
                    }
                }
            }
        }
        let total: usize = counts.iter().sum();
        assert_eq!(total, 30_000);
        let sigma = (30_000.0f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for c in counts {
            assert!(
                (c as f64 - 10_000.0).abs() <= 3.0 * sigma,
                "axis count {c} too far from uniform"
            );
        }
    }

    #[test]
    fn theta_moments_match_uniform_interval() {
        // theta ~ U[-2pi, 2pi): mean 0, second moment 4 pi^2 / 3
        let spec = EnsembleSpec {
            n: 2,
            d: 10,
            observable: Observable::parse("ZZ").unwrap(),
            samples: 5_000,
            ..small_spec()
        };
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut count = 0usize;
        for i in 0..spec.samples {
            for t in sample_circuit(&spec, i).theta {
                assert!((-2.0 * std::f64::consts::PI..2.0 * std::f64::consts::PI).contains(&t));
                sum += t;
                sum_sq += t * t;
                count += 1;
            }
        }
        assert_eq!(count, 100_000);
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        let var_theta = 4.0 * pi2 / 3.0;
        let mean_sigma = (var_theta / count as f64).sqrt();
        assert!((sum / count as f64).abs() <= 3.0 * mean_sigma);

        // Var(theta^2) = E[theta^4] - E[theta^2]^2 = 16 pi^4 (1/5 - 1/9)
        let var_theta_sq = 16.0 * pi2 * pi2 * (1.0 / 5.0 - 1.0 / 9.0);
        let sq_sigma = (var_theta_sq / count as f64).sqrt();
        assert!((sum_sq / count as f64 - var_theta).abs() <= 3.0 * sq_sigma);
    }

    #[test]
    fn replacement_subset_size_is_exact() {
        let spec = EnsembleSpec {
            n: 4,
            d: 10,
            observable: Observable::parse("ZZZZ").unwrap(),
            replacement_mode: ReplacementMode::Hadamard,
            replacement_fraction: 0.5,
            ..small_spec()
        };
        let c = sample_circuit(&spec, 0);
        let replaced = c
            .layers
            .iter()
            .flat_map(|l| &l.rotations)
            .filter(|r| r.axis == RotationAxis::Hadamard)
            .count();
        assert_eq!(replaced, 20);
        assert_eq!(c.theta.len(), 20);
        c.validate().unwrap();
    }

    proptest! {
        // one structural property instead of a case matrix: any sampled
        // circuit validates and survives the wire format bit-exactly
        #[test]
        fn sampled_circuits_validate_and_round_trip(
            n in 1usize..5,
            d in 1usize..5,
            seed in any::<u64>(),
            frac in 0.0f64..=1.0,
            mode in 0u8..3,
        ) {
            let (mode, frac) = match mode {
                0 => (ReplacementMode::None, 0.0),
                1 => (ReplacementMode::Identity, frac),
                _ => (ReplacementMode::Hadamard, frac),
            };
            let spec = EnsembleSpec {
                n,
                d,
                entangler_pattern: EntanglerPattern::Brick,
                observable: Observable::all_z(n),
                replacement_mode: mode,
                replacement_fraction: frac,
                samples: 2,
                master_seed: seed,
            };
            spec.validate().unwrap();
            let c = sample_circuit(&spec, 1);
            c.validate().unwrap();
            prop_assert_eq!(from_json(&to_json(&c)).unwrap(), c);
        }
    }
}
