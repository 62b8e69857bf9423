//! Single-qubit Kraus noise channels.
//!
//! Every channel is a CPTP map ρ → Σ_i K_i ρ K_i† with completeness
//! Σ_i K_i†K_i = I enforced at construction. Multi-qubit noise is realized
//! by applying the same single-qubit channel to each qubit independently.

use ndarray::{array, Array2};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::{DensityMatrix, StateError, StateVector, C_ONE, C_ZERO};

/// Tolerance on Σ K†K − I entries for primitive channel constructors.
pub const COMPLETENESS_TOL: f64 = 1e-10;
/// Composition multiplies Kraus sets; a little extra slack absorbs the
/// accumulated rounding.
pub const COMPOSE_TOL: f64 = 1e-9;
/// Kraus operators with Frobenius norm below this are dropped.
pub const KRAUS_PRUNE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("parameter {name} = {value} outside [0, 1]")]
    ParamOutOfRange { name: &'static str, value: f64 },
    #[error("p_z + p_r0 + p_r1 = {0} exceeds 1")]
    ProbabilitySumExceedsOne(f64),
    #[error("Kraus set is empty")]
    EmptyKrausSet,
    #[error("Kraus operator is not 2x2")]
    BadKrausShape,
    #[error("completeness violated: max |ΣK†K − I| entry = {0:.3e}")]
    NotTracePreserving(f64),
    #[error("all Kraus branch probabilities vanish; state is corrupted")]
    ZeroBranchProbabilities,
    #[error(transparent)]
    State(#[from] StateError),
}

/// Channel families supported by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    AmplitudeDamping,
    PhaseDamping,
    Depolarizing,
    BitFlip,
    PhaseFlip,
    BitPhaseFlip,
    ThermalRelaxation,
    Composite,
}

impl std::fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ChannelKind::AmplitudeDamping => "amplitude_damping",
            ChannelKind::PhaseDamping => "phase_damping",
            ChannelKind::Depolarizing => "depolarizing",
            ChannelKind::BitFlip => "bit_flip",
            ChannelKind::PhaseFlip => "phase_flip",
            ChannelKind::BitPhaseFlip => "bit_phase_flip",
            ChannelKind::ThermalRelaxation => "thermal_relaxation",
            ChannelKind::Composite => "composite",
        };
        f.write_str(s)
    }
}

/// A completely positive trace-preserving single-qubit map.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    ops: Vec<Array2<Complex64>>,
    kind: ChannelKind,
    gamma: f64,
}

fn check_param(name: &'static str, value: f64) -> Result<(), ChannelError> {
    if !(0.0..=1.0).contains(&value) || !value.is_finite() {
        return Err(ChannelError::ParamOutOfRange { name, value });
    }
    Ok(())
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl KrausChannel {
    /// Builds a channel from raw 2×2 Kraus operators, pruning negligible
    /// ones and verifying completeness within `tol`.
    pub fn from_kraus(
        ops: Vec<Array2<Complex64>>,
        kind: ChannelKind,
        gamma: f64,
        tol: f64,
    ) -> Result<Self, ChannelError> {
        let ops: Vec<Array2<Complex64>> = ops
            .into_iter()
            .filter(|k| k.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() >= KRAUS_PRUNE_TOL)
            .collect();
        if ops.is_empty() {
            return Err(ChannelError::EmptyKrausSet);
        }
        let mut sum = Array2::from_elem((2, 2), C_ZERO);
        for k in &ops {
            if k.dim() != (2, 2) {
                return Err(ChannelError::BadKrausShape);
            }
            for r in 0..2 {
                for c in 0..2 {
                    for m in 0..2 {
                        sum[(r, c)] += k[(m, r)].conj() * k[(m, c)];
                    }
                }
            }
        }
        let mut dev: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let expect = if r == c { C_ONE } else { C_ZERO };
                dev = dev.max((sum[(r, c)] - expect).norm());
            }
        }
        if dev > tol {
            return Err(ChannelError::NotTracePreserving(dev));
        }
        Ok(Self { ops, kind, gamma })
    }

    /// Energy relaxation toward |0⟩ with decay rate γ.
    pub fn amplitude_damping(gamma: f64) -> Result<Self, ChannelError> {
        check_param("gamma", gamma)?;
        let k0 = array![[C_ONE, C_ZERO], [C_ZERO, re((1.0 - gamma).sqrt())]];
        let k1 = array![[C_ZERO, re(gamma.sqrt())], [C_ZERO, C_ZERO]];
        Self::from_kraus(vec![k0, k1], ChannelKind::AmplitudeDamping, gamma, COMPLETENESS_TOL)
    }

    /// Pure dephasing with scattering probability λ: off-diagonals scale by
    /// √(1−λ). Equivalent to a phase flip with γ = (1 − √(1−λ))/2.
    pub fn phase_damping(lambda: f64) -> Result<Self, ChannelError> {
        check_param("lambda", lambda)?;
        let k0 = array![[C_ONE, C_ZERO], [C_ZERO, re((1.0 - lambda).sqrt())]];
        let k1 = array![[C_ZERO, C_ZERO], [C_ZERO, re(lambda.sqrt())]];
        Self::from_kraus(vec![k0, k1], ChannelKind::PhaseDamping, lambda, COMPLETENESS_TOL)
    }

    /// Depolarizing map ρ → (1−p)ρ + (p/3)(XρX + YρY + ZρZ).
    pub fn depolarizing(p: f64) -> Result<Self, ChannelError> {
        check_param("p", p)?;
        let w = (p / 3.0).sqrt();
        let k0 = array![[re((1.0 - p).sqrt()), C_ZERO], [C_ZERO, re((1.0 - p).sqrt())]];
        let kx = array![[C_ZERO, re(w)], [re(w), C_ZERO]];
        let ky = array![
            [C_ZERO, Complex64::new(0.0, -w)],
            [Complex64::new(0.0, w), C_ZERO]
        ];
        let kz = array![[re(w), C_ZERO], [C_ZERO, re(-w)]];
        Self::from_kraus(vec![k0, kx, ky, kz], ChannelKind::Depolarizing, p, COMPLETENESS_TOL)
    }

    fn flip(kind: ChannelKind, pauli: Array2<Complex64>, gamma: f64) -> Result<Self, ChannelError> {
        check_param("gamma", gamma)?;
        let k0 = array![[re((1.0 - gamma).sqrt()), C_ZERO], [C_ZERO, re((1.0 - gamma).sqrt())]];
        let k1 = pauli.mapv(|x| x * re(gamma.sqrt()));
        Self::from_kraus(vec![k0, k1], kind, gamma, COMPLETENESS_TOL)
    }

    /// ρ → (1−γ)ρ + γXρX.
    pub fn bit_flip(gamma: f64) -> Result<Self, ChannelError> {
        Self::flip(ChannelKind::BitFlip, array![[C_ZERO, C_ONE], [C_ONE, C_ZERO]], gamma)
    }

    /// ρ → (1−γ)ρ + γZρZ.
    pub fn phase_flip(gamma: f64) -> Result<Self, ChannelError> {
        Self::flip(
            ChannelKind::PhaseFlip,
            array![[C_ONE, C_ZERO], [C_ZERO, re(-1.0)]],
            gamma,
        )
    }

    /// ρ → (1−γ)ρ + γYρY.
    pub fn bit_phase_flip(gamma: f64) -> Result<Self, ChannelError> {
        Self::flip(
            ChannelKind::BitPhaseFlip,
            array![
                [C_ZERO, Complex64::new(0.0, -1.0)],
                [Complex64::new(0.0, 1.0), C_ZERO]
            ],
            gamma,
        )
    }

    /// Probabilistic mixture of identity, phase flip, reset-to-|0⟩ and
    /// reset-to-|1⟩. The reset branches each need two Kraus operators to be
    /// trace preserving.
    pub fn thermal_relaxation(p_z: f64, p_r0: f64, p_r1: f64) -> Result<Self, ChannelError> {
        check_param("p_z", p_z)?;
        check_param("p_r0", p_r0)?;
        check_param("p_r1", p_r1)?;
        let rest = p_z + p_r0 + p_r1;
        if rest > 1.0 + 1e-12 {
            return Err(ChannelError::ProbabilitySumExceedsOne(rest));
        }
        let id_w = (1.0 - rest).max(0.0).sqrt();
        let ops = vec![
            array![[re(id_w), C_ZERO], [C_ZERO, re(id_w)]],
            array![[re(p_z.sqrt()), C_ZERO], [C_ZERO, re(-(p_z.sqrt()))]],
            // reset to |0⟩: |0⟩⟨0| and |0⟩⟨1|
            array![[re(p_r0.sqrt()), C_ZERO], [C_ZERO, C_ZERO]],
            array![[C_ZERO, re(p_r0.sqrt())], [C_ZERO, C_ZERO]],
            // reset to |1⟩: |1⟩⟨0| and |1⟩⟨1|
            array![[C_ZERO, C_ZERO], [re(p_r1.sqrt()), C_ZERO]],
            array![[C_ZERO, C_ZERO], [C_ZERO, re(p_r1.sqrt())]],
        ];
        Self::from_kraus(ops, ChannelKind::ThermalRelaxation, rest, COMPLETENESS_TOL)
    }

    /// Sequential composition: `parts[0]` acts first.
    ///
    /// The Kraus set is all products of the parts' operators; negligible
    /// products are pruned.
    pub fn compose(parts: &[KrausChannel]) -> Result<Self, ChannelError> {
        if parts.is_empty() {
            return Err(ChannelError::EmptyKrausSet);
        }
        let mut ops: Vec<Array2<Complex64>> = parts[0].ops.clone();
        for part in &parts[1..] {
            let mut next = Vec::with_capacity(ops.len() * part.ops.len());
            for outer in &part.ops {
                for inner in &ops {
                    next.push(outer.dot(inner));
                }
            }
            ops = next;
        }
        Self::from_kraus(ops, ChannelKind::Composite, 0.0, COMPOSE_TOL)
    }

    pub fn kraus_ops(&self) -> &[Array2<Complex64>] {
        &self.ops
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    /// Intensity knob of the primitive families (total branch probability
    /// for thermal relaxation; 0 for composites, which have no single knob).
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Applies the channel to `qubit` of a multi-qubit density matrix.
    pub fn apply(&self, rho: &mut DensityMatrix, qubit: usize) -> Result<(), ChannelError> {
        rho.apply_kraus_ops(&self.ops, qubit)?;
        Ok(())
    }

    /// Applies the channel to a single-qubit 2×2 matrix directly.
    pub fn apply_to_matrix(&self, rho: &Array2<Complex64>) -> Array2<Complex64> {
        let mut out = Array2::from_elem((2, 2), C_ZERO);
        for k in &self.ops {
            let kd = k.t().mapv(|x| x.conj());
            out += &k.dot(rho).dot(&kd);
        }
        out
    }

    /// Monte Carlo unraveling: selects branch i with probability ‖K_i ψ‖²
    /// and leaves the normalized post-branch state. Returns the branch index.
    ///
    /// Averaged over selections this reproduces [`KrausChannel::apply`] on
    /// ψψ†.
    pub fn apply_stochastic(
        &self,
        psi: &mut StateVector,
        qubit: usize,
        rng: &mut impl Rng,
    ) -> Result<usize, ChannelError> {
        let mut branches: Vec<(f64, StateVector)> = Vec::with_capacity(self.ops.len());
        let mut total = 0.0;
        for k in &self.ops {
            let mut branch = psi.clone();
            branch.apply_local(k.view(), &[qubit])?;
            let p = branch.norm().powi(2);
            total += p;
            branches.push((p, branch));
        }
        if total < 1e-12 {
            return Err(ChannelError::ZeroBranchProbabilities);
        }
        let draw: f64 = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = branches.len() - 1;
        for (i, (p, _)) in branches.iter().enumerate() {
            acc += p;
            if draw < acc {
                chosen = i;
                break;
            }
        }
        let (_, mut state) = branches.swap_remove(chosen);
        state.renormalize()?;
        *psi = state;
        Ok(chosen)
    }
}

/// Serializable channel description.
///
/// ```json
/// {"kind": "amplitude_damping", "gamma": 0.03}
/// {"kind": "thermal_relaxation", "p_z": 0.01, "p_r0": 0.02, "p_r1": 0.005}
/// {"kind": "composite", "parts": [ ... ]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    AmplitudeDamping { gamma: f64 },
    PhaseDamping { gamma: f64 },
    Depolarizing { gamma: f64 },
    BitFlip { gamma: f64 },
    PhaseFlip { gamma: f64 },
    BitPhaseFlip { gamma: f64 },
    ThermalRelaxation { p_z: f64, p_r0: f64, p_r1: f64 },
    Composite { parts: Vec<NoiseSpec> },
}

impl NoiseSpec {
    pub fn build(&self) -> Result<KrausChannel, ChannelError> {
        match self {
            NoiseSpec::AmplitudeDamping { gamma } => KrausChannel::amplitude_damping(*gamma),
            NoiseSpec::PhaseDamping { gamma } => KrausChannel::phase_damping(*gamma),
            NoiseSpec::Depolarizing { gamma } => KrausChannel::depolarizing(*gamma),
            NoiseSpec::BitFlip { gamma } => KrausChannel::bit_flip(*gamma),
            NoiseSpec::PhaseFlip { gamma } => KrausChannel::phase_flip(*gamma),
            NoiseSpec::BitPhaseFlip { gamma } => KrausChannel::bit_phase_flip(*gamma),
            NoiseSpec::ThermalRelaxation { p_z, p_r0, p_r1 } => {
                KrausChannel::thermal_relaxation(*p_z, *p_r0, *p_r1)
            }
            NoiseSpec::Composite { parts } => {
                let built: Result<Vec<_>, _> = parts.iter().map(|p| p.build()).collect();
                KrausChannel::compose(&built?)
            }
        }
    }

    /// Example composite mimicking hardware-style noise: thermal relaxation
    /// followed by a weak depolarizing channel. The parameters are
    /// illustrative, not calibrated to any device.
    pub fn realistic_composite_example() -> Self {
        NoiseSpec::Composite {
            parts: vec![
                NoiseSpec::ThermalRelaxation { p_z: 0.01, p_r0: 0.02, p_r1: 0.004 },
                NoiseSpec::Depolarizing { gamma: 0.005 },
            ],
        }
    }

    /// Short label for reports, e.g. `amplitude_damping`.
    pub fn label(&self) -> String {
        match self {
            NoiseSpec::AmplitudeDamping { .. } => "amplitude_damping".into(),
            NoiseSpec::PhaseDamping { .. } => "phase_damping".into(),
            NoiseSpec::Depolarizing { .. } => "depolarizing".into(),
            NoiseSpec::BitFlip { .. } => "bit_flip".into(),
            NoiseSpec::PhaseFlip { .. } => "phase_flip".into(),
            NoiseSpec::BitPhaseFlip { .. } => "bit_phase_flip".into(),
            NoiseSpec::ThermalRelaxation { .. } => "thermal_relaxation".into(),
            NoiseSpec::Composite { .. } => "composite".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::trace_distance;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn random_single_qubit_state(rng: &mut impl Rng) -> DensityMatrix {
        // uniform over the Bloch ball
        loop {
            let r = [
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            ];
            if r[0] * r[0] + r[1] * r[1] + r[2] * r[2] <= 1.0 {
                return DensityMatrix::from_bloch(r).unwrap();
            }
        }
    }

    #[test]
    fn zero_gamma_damping_is_identity_channel() {
        let ch = KrausChannel::amplitude_damping(0.0).unwrap();
        assert_eq!(ch.kraus_ops().len(), 1);
        let mut rho = DensityMatrix::zero_state(1);
        rho.apply_gate(&crate::gates::UnitaryGate::rx(1.0, 0)).unwrap();
        let before = rho.clone();
        ch.apply(&mut rho, 0).unwrap();
        assert!(trace_distance(&rho, &before).unwrap() < 1e-14);
    }

    #[test]
    fn half_damping_splits_excited_population() {
        let ch = KrausChannel::amplitude_damping(0.5).unwrap();
        let mut rho = DensityMatrix::basis_state(1, 1);
        ch.apply(&mut rho, 0).unwrap();
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.matrix()[(1, 1)].re, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn full_damping_decays_to_ground() {
        let ch = KrausChannel::amplitude_damping(1.0).unwrap();
        let mut rho = DensityMatrix::basis_state(1, 1);
        ch.apply(&mut rho, 0).unwrap();
        assert!(trace_distance(&rho, &DensityMatrix::zero_state(1)).unwrap() < 1e-12);
    }

    #[test]
    fn depolarizing_action_shrinks_bloch_vector() {
        // With Kraus set {√(1−p)I, √(p/3)σ}, the action is
        // (1−q)ρ + (q/2)I with q = 4p/3.
        let p = 0.15;
        let q = 4.0 * p / 3.0;
        let ch = KrausChannel::depolarizing(p).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..20 {
            let rho = random_single_qubit_state(&mut rng);
            let out = ch.apply_to_matrix(&rho.matrix().to_owned());
            let expect = rho.matrix().mapv(|x| x * re(1.0 - q))
                + Array2::eye(2).mapv(|x: f64| re(x * q / 2.0));
            for r in 0..2 {
                for c in 0..2 {
                    assert_abs_diff_eq!((out[(r, c)] - expect[(r, c)]).norm(), 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn phase_damping_fixes_diagonal_states() {
        let ch = KrausChannel::phase_damping(0.37).unwrap();
        let rho = array![[re(0.3), C_ZERO], [C_ZERO, re(0.7)]];
        let out = ch.apply_to_matrix(&rho);
        for r in 0..2 {
            for c in 0..2 {
                assert_abs_diff_eq!((out[(r, c)] - rho[(r, c)]).norm(), 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn phase_damping_equals_recombined_phase_flip() {
        // γ = (1 − √(1−λ))/2 turns phase damping into a phase flip.
        let lambda = 0.42f64;
        let gamma = (1.0 - (1.0 - lambda).sqrt()) / 2.0;
        let pd = KrausChannel::phase_damping(lambda).unwrap();
        let pf = KrausChannel::phase_flip(gamma).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..20 {
            let rho = random_single_qubit_state(&mut rng);
            let a = DensityMatrix::from_matrix(pd.apply_to_matrix(&rho.matrix().to_owned()))
                .unwrap();
            let b = DensityMatrix::from_matrix(pf.apply_to_matrix(&rho.matrix().to_owned()))
                .unwrap();
            assert!(trace_distance(&a, &b).unwrap() < 1e-9);
        }
    }

    #[test]
    fn thermal_relaxation_is_cptp_and_rejects_bad_params() {
        assert!(KrausChannel::thermal_relaxation(0.1, 0.2, 0.05).is_ok());
        assert!(matches!(
            KrausChannel::thermal_relaxation(0.6, 0.3, 0.2),
            Err(ChannelError::ProbabilitySumExceedsOne(_))
        ));
        assert!(matches!(
            KrausChannel::thermal_relaxation(-0.1, 0.0, 0.0),
            Err(ChannelError::ParamOutOfRange { .. })
        ));
    }

    #[test]
    fn constructors_reject_out_of_range_gamma() {
        assert!(KrausChannel::amplitude_damping(1.5).is_err());
        assert!(KrausChannel::depolarizing(-0.01).is_err());
        assert!(KrausChannel::phase_flip(f64::NAN).is_err());
    }

    #[test]
    fn trace_preserved_on_random_states() {
        let channels = [
            KrausChannel::amplitude_damping(0.23).unwrap(),
            KrausChannel::phase_damping(0.4).unwrap(),
            KrausChannel::depolarizing(0.31).unwrap(),
            KrausChannel::bit_flip(0.11).unwrap(),
            KrausChannel::phase_flip(0.5).unwrap(),
            KrausChannel::bit_phase_flip(0.77).unwrap(),
            KrausChannel::thermal_relaxation(0.05, 0.1, 0.02).unwrap(),
        ];
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for ch in &channels {
            for _ in 0..100 {
                let mut rho = random_single_qubit_state(&mut rng);
                ch.apply(&mut rho, 0).unwrap();
                assert!((rho.trace() - 1.0).abs() < 1e-10);
                rho.validate().unwrap();
            }
        }
    }

    #[test]
    fn stochastic_identity_keeps_state() {
        let ch = KrausChannel::amplitude_damping(0.0).unwrap();
        let mut psi = StateVector::zero_state(2);
        psi.apply_gate(&crate::gates::UnitaryGate::rx(0.4, 1)).unwrap();
        let before = psi.clone();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        ch.apply_stochastic(&mut psi, 1, &mut rng).unwrap();
        for (a, b) in psi.amplitudes().iter().zip(before.amplitudes().iter()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn stochastic_full_damping_forces_ground() {
        let ch = KrausChannel::amplitude_damping(1.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..50 {
            let mut psi = StateVector::basis_state(1, 1);
            ch.apply_stochastic(&mut psi, 0, &mut rng).unwrap();
            assert_abs_diff_eq!(psi.amplitudes()[0].norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn stochastic_branch_frequencies_match_binomial() {
        // AD γ=0.3 on |1⟩: decay branch with probability 0.3.
        let gamma = 0.3;
        let ch = KrausChannel::amplitude_damping(gamma).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let n = 100_000usize;
        let mut decays = 0usize;
        for _ in 0..n {
            let mut psi = StateVector::basis_state(1, 1);
            let branch = ch.apply_stochastic(&mut psi, 0, &mut rng).unwrap();
            if branch == 1 {
                decays += 1;
                assert_abs_diff_eq!(psi.amplitudes()[0].norm(), 1.0, epsilon = 1e-12);
            } else {
                assert_abs_diff_eq!(psi.amplitudes()[1].norm(), 1.0, epsilon = 1e-12);
            }
        }
        let freq = decays as f64 / n as f64;
        let sigma = (gamma * (1.0 - gamma) / n as f64).sqrt();
        assert!(
            (freq - gamma).abs() < 3.0 * sigma,
            "decay frequency {freq} vs expected {gamma} (3σ = {:.2e})",
            3.0 * sigma
        );
    }

    #[test]
    fn stochastic_ensemble_matches_exact_channel() {
        // Mean over 10^5 draws reproduces the deterministic channel within
        // four standard errors per matrix entry.
        let ch = KrausChannel::amplitude_damping(0.25).unwrap();
        let mut base = StateVector::zero_state(1);
        base.apply_gate(&crate::gates::UnitaryGate::rx(1.1, 0)).unwrap();
        base.apply_gate(&crate::gates::UnitaryGate::rz(0.6, 0)).unwrap();

        let mut exact = base.to_density_matrix();
        ch.apply(&mut exact, 0).unwrap();

        let n = 100_000usize;
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let mut mean = Array2::from_elem((2, 2), C_ZERO);
        for _ in 0..n {
            let mut psi = base.clone();
            ch.apply_stochastic(&mut psi, 0, &mut rng).unwrap();
            mean += &psi.to_density_matrix().matrix().to_owned();
        }
        mean.mapv_inplace(|x| x / re(n as f64));
        for r in 0..2 {
            for c in 0..2 {
                // crude per-entry bound: entries live in the unit disk, so
                // the standard error is at most 1/√n on each part
                let se = 1.0 / (n as f64).sqrt();
                let d = (mean[(r, c)] - exact.matrix()[(r, c)]).norm();
                assert!(d < 4.0 * se * std::f64::consts::SQRT_2, "entry ({r},{c}) off by {d}");
            }
        }
    }

    #[test]
    fn compose_identities_is_identity() {
        let id = KrausChannel::amplitude_damping(0.0).unwrap();
        let composed = KrausChannel::compose(&[id.clone(), id]).unwrap();
        assert_eq!(composed.kraus_ops().len(), 1);
        let mut rho = DensityMatrix::maximally_mixed(1);
        let before = rho.clone();
        composed.apply(&mut rho, 0).unwrap();
        assert!(trace_distance(&rho, &before).unwrap() < 1e-12);
    }

    #[test]
    fn damping_composes_multiplicatively() {
        // AD(γ₁) then AD(γ₂) equals AD(1 − (1−γ₁)(1−γ₂)).
        let (g1, g2) = (0.2, 0.35);
        let eff = 1.0 - (1.0 - g1) * (1.0 - g2);
        let composed = KrausChannel::compose(&[
            KrausChannel::amplitude_damping(g1).unwrap(),
            KrausChannel::amplitude_damping(g2).unwrap(),
        ])
        .unwrap();
        let direct = KrausChannel::amplitude_damping(eff).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for _ in 0..20 {
            let rho = random_single_qubit_state(&mut rng);
            let a = DensityMatrix::from_matrix(
                composed.apply_to_matrix(&rho.matrix().to_owned()),
            )
            .unwrap();
            let b =
                DensityMatrix::from_matrix(direct.apply_to_matrix(&rho.matrix().to_owned()))
                    .unwrap();
            assert!(trace_distance(&a, &b).unwrap() < 1e-10);
        }
    }

    #[test]
    fn noise_spec_round_trip_and_build() {
        let spec = NoiseSpec::Composite {
            parts: vec![
                NoiseSpec::ThermalRelaxation { p_z: 0.02, p_r0: 0.05, p_r1: 0.01 },
                NoiseSpec::Depolarizing { gamma: 0.1 },
            ],
        };
        let json = serde_json::to_string(&spec).unwrap();
        let back: NoiseSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
        let ch = back.build().unwrap();
        assert_eq!(ch.kind(), ChannelKind::Composite);

        let ad: NoiseSpec =
            serde_json::from_str(r#"{"kind": "amplitude_damping", "gamma": 0.03}"#).unwrap();
        assert_eq!(ad, NoiseSpec::AmplitudeDamping { gamma: 0.03 });
    }
}
