//! Quantum-state primitives: pure state vectors and density matrices.
//!
//! Qubit index convention: qubit 0 is the leftmost tensor factor, i.e. the
//! most significant bit of a computational-basis index. For two qubits the
//! basis ordering is |00⟩, |01⟩, |10⟩, |11⟩ with qubit 0 as the first digit.

use ndarray::{Array1, Array2, ArrayView2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;
use thiserror::Error;

use crate::gates::UnitaryGate;

/// Tolerance for norm, trace and Hermiticity checks.
pub const STATE_TOL: f64 = 1e-10;
/// Eigenvalues are accepted as non-negative down to this threshold; the
/// slack absorbs floating-point drift over long channel chains.
pub const POSITIVITY_TOL: f64 = -1e-9;

pub(crate) const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error)]
pub enum StateError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("duplicate qubit index {0}")]
    DuplicateQubit(usize),
    #[error("vector length {0} is not a positive power of two")]
    BadDimension(usize),
    #[error("state norm {0} deviates from 1 beyond tolerance")]
    NotNormalized(f64),
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("trace {0} deviates from 1 beyond tolerance")]
    BadTrace(f64),
    #[error("eigenvalue {0:.3e} below positivity tolerance")]
    NotPositive(f64),
    #[error("empty keep set for partial trace")]
    EmptyKeepSet,
    #[error("measurement branch has zero probability; state is corrupted")]
    ZeroProbabilityBranch,
    #[error("Bloch vector norm {0} exceeds 1")]
    BlochOutOfBall(f64),
}

/// Bit position of `qubit` inside a basis index (qubit 0 = most significant).
#[inline]
pub(crate) fn bit_pos(num_qubits: usize, qubit: usize) -> usize {
    num_qubits - 1 - qubit
}

#[inline]
fn check_qubit(num_qubits: usize, qubit: usize) -> Result<(), StateError> {
    if qubit >= num_qubits {
        Err(StateError::QubitOutOfRange { index: qubit, num_qubits })
    } else {
        Ok(())
    }
}

fn num_qubits_for_dim(dim: usize) -> Result<usize, StateError> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(StateError::BadDimension(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// ±1 eigenvalue of σ_Z on `qubit` for basis index `idx`.
#[inline]
fn z_sign(idx: usize, pos: usize) -> f64 {
    if idx & (1 << pos) == 0 {
        1.0
    } else {
        -1.0
    }
}

// ---------------------------------------------------------------------------
// In-place application of local operators to flat complex storage.
// `op` need not be unitary; Kraus operators reuse the same kernels.
// ---------------------------------------------------------------------------

fn apply_local_1q(amps: &mut [Complex64], dim: usize, op: ArrayView2<Complex64>, pos: usize) {
    let s = 1usize << pos;
    let (m00, m01) = (op[(0, 0)], op[(0, 1)]);
    let (m10, m11) = (op[(1, 0)], op[(1, 1)]);
    let mut base = 0;
    while base < dim {
        for i in base..base + s {
            let j = i + s;
            let (ai, aj) = (amps[i], amps[j]);
            amps[i] = m00 * ai + m01 * aj;
            amps[j] = m10 * ai + m11 * aj;
        }
        base += s << 1;
    }
}

fn apply_local_2q(
    amps: &mut [Complex64],
    dim: usize,
    op: ArrayView2<Complex64>,
    pos_hi: usize,
    pos_lo: usize,
) {
    let (b_hi, b_lo) = (1usize << pos_hi, 1usize << pos_lo);
    let mask = b_hi | b_lo;
    for idx in 0..dim {
        if idx & mask != 0 {
            continue;
        }
        let ix = [idx, idx | b_lo, idx | b_hi, idx | b_hi | b_lo];
        let v = [amps[ix[0]], amps[ix[1]], amps[ix[2]], amps[ix[3]]];
        for r in 0..4 {
            let mut acc = C_ZERO;
            for c in 0..4 {
                acc += op[(r, c)] * v[c];
            }
            amps[ix[r]] = acc;
        }
    }
}

/// Bit positions (register-index order) for a gate's targets.
fn target_positions(num_qubits: usize, targets: &[usize]) -> Result<Vec<usize>, StateError> {
    for &t in targets {
        check_qubit(num_qubits, t)?;
    }
    Ok(targets.iter().map(|&t| bit_pos(num_qubits, t)).collect())
}

// ---------------------------------------------------------------------------
// StateVector
// ---------------------------------------------------------------------------

/// Pure state of an N-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Array1<Complex64>,
    num_qubits: usize,
}

impl StateVector {
    /// |0…0⟩ on `num_qubits` qubits.
    pub fn zero_state(num_qubits: usize) -> Self {
        assert!(num_qubits >= 1, "need at least one qubit");
        let mut amps = Array1::from_elem(1 << num_qubits, C_ZERO);
        amps[0] = C_ONE;
        Self { amps, num_qubits }
    }

    /// Computational-basis state |index⟩.
    pub fn basis_state(num_qubits: usize, index: usize) -> Self {
        assert!(num_qubits >= 1 && index < (1 << num_qubits));
        let mut amps = Array1::from_elem(1 << num_qubits, C_ZERO);
        amps[index] = C_ONE;
        Self { amps, num_qubits }
    }

    /// Builds a state from raw amplitudes; the length must be a power of two
    /// and the norm must be 1 within [`STATE_TOL`].
    pub fn from_amplitudes(amps: Array1<Complex64>) -> Result<Self, StateError> {
        let num_qubits = num_qubits_for_dim(amps.len())?;
        let state = Self { amps, num_qubits };
        let norm = state.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(StateError::NotNormalized(norm));
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Applies a unitary gate in place.
    pub fn apply_gate(&mut self, gate: &UnitaryGate) -> Result<(), StateError> {
        self.apply_local(gate.matrix(), gate.targets())
    }

    /// Applies an arbitrary (not necessarily unitary) local operator.
    /// Kraus branches go through here; callers handle renormalization.
    pub(crate) fn apply_local(
        &mut self,
        op: ArrayView2<Complex64>,
        targets: &[usize],
    ) -> Result<(), StateError> {
        let pos = target_positions(self.num_qubits, targets)?;
        let dim = self.dim();
        let amps = self.amps.as_slice_mut().expect("contiguous amplitudes");
        match pos.len() {
            1 => apply_local_1q(amps, dim, op, pos[0]),
            2 => apply_local_2q(amps, dim, op, pos[0], pos[1]),
            k => panic!("unsupported gate arity {k}"),
        }
        Ok(())
    }

    pub(crate) fn renormalize(&mut self) -> Result<(), StateError> {
        let norm = self.norm();
        if norm < 1e-12 {
            return Err(StateError::ZeroProbabilityBranch);
        }
        self.amps.mapv_inplace(|a| a / norm);
        Ok(())
    }

    /// ⟨σ_Z(qubit)⟩ for this state, in [−1, 1].
    pub fn pauli_z_expectation(&self, qubit: usize) -> Result<f64, StateError> {
        check_qubit(self.num_qubits, qubit)?;
        let pos = bit_pos(self.num_qubits, qubit);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(idx, a)| z_sign(idx, pos) * a.norm_sqr())
            .sum())
    }

    /// Outcome probabilities of a joint computational-basis measurement of
    /// `qubits`, indexed by the outcome bit pattern (first listed qubit is
    /// the most significant outcome bit).
    pub fn outcome_probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>, StateError> {
        let pos = target_positions(self.num_qubits, qubits)?;
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (idx, a) in self.amps.iter().enumerate() {
            let mut pattern = 0usize;
            for &p in &pos {
                pattern = (pattern << 1) | ((idx >> p) & 1);
            }
            probs[pattern] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Projects onto the subspace where each of `qubits` reads the matching
    /// bit of `pattern`, then renormalizes.
    pub fn collapse(&mut self, qubits: &[usize], pattern: usize) -> Result<(), StateError> {
        let pos = target_positions(self.num_qubits, qubits)?;
        let m = qubits.len();
        for (idx, a) in self.amps.iter_mut().enumerate() {
            for (k, &p) in pos.iter().enumerate() {
                let want = (pattern >> (m - 1 - k)) & 1;
                if (idx >> p) & 1 != want {
                    *a = C_ZERO;
                    break;
                }
            }
        }
        self.renormalize()
    }

    /// ψψ† as a density matrix.
    pub fn to_density_matrix(&self) -> DensityMatrix {
        let dim = self.dim();
        let mat = Array2::from_shape_fn((dim, dim), |(r, c)| self.amps[r] * self.amps[c].conj());
        DensityMatrix { mat, num_qubits: self.num_qubits }
    }
}

// ---------------------------------------------------------------------------
// DensityMatrix
// ---------------------------------------------------------------------------

/// Mixed state of an N-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: Array2<Complex64>,
    num_qubits: usize,
}

impl DensityMatrix {
    /// |0…0⟩⟨0…0|.
    pub fn zero_state(num_qubits: usize) -> Self {
        assert!(num_qubits >= 1, "need at least one qubit");
        let dim = 1 << num_qubits;
        let mut mat = Array2::from_elem((dim, dim), C_ZERO);
        mat[(0, 0)] = C_ONE;
        Self { mat, num_qubits }
    }

    /// Projector |index⟩⟨index| onto a computational-basis state.
    pub fn basis_state(num_qubits: usize, index: usize) -> Self {
        assert!(num_qubits >= 1 && index < (1 << num_qubits));
        let dim = 1 << num_qubits;
        let mut mat = Array2::from_elem((dim, dim), C_ZERO);
        mat[(index, index)] = C_ONE;
        Self { mat, num_qubits }
    }

    /// The maximally mixed state I/2^N.
    pub fn maximally_mixed(num_qubits: usize) -> Self {
        assert!(num_qubits >= 1, "need at least one qubit");
        let dim = 1 << num_qubits;
        let mat = Array2::eye(dim).mapv(|x: f64| Complex64::new(x / dim as f64, 0.0));
        Self { mat, num_qubits }
    }

    /// Validates Hermiticity, unit trace and positivity before wrapping.
    pub fn from_matrix(mat: Array2<Complex64>) -> Result<Self, StateError> {
        let (rows, cols) = mat.dim();
        if rows != cols {
            return Err(StateError::DimensionMismatch(rows, cols));
        }
        let num_qubits = num_qubits_for_dim(rows)?;
        let dm = Self { mat, num_qubits };
        dm.validate()?;
        Ok(dm)
    }

    /// Wraps a matrix that is trusted to be a valid state (internal fast path).
    pub(crate) fn from_matrix_unchecked(mat: Array2<Complex64>, num_qubits: usize) -> Self {
        Self { mat, num_qubits }
    }

    pub fn matrix(&self) -> ArrayView2<'_, Complex64> {
        self.mat.view()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }

    /// Tr(ρ²); 1 for pure states, 1/2^N for the maximally mixed state.
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|x| x.norm_sqr()).sum()
    }

    /// Checks the density-matrix invariants: Hermitian and unit trace within
    /// [`STATE_TOL`], eigenvalues above [`POSITIVITY_TOL`].
    pub fn validate(&self) -> Result<(), StateError> {
        let dim = self.dim();
        let mut max_asym: f64 = 0.0;
        for r in 0..dim {
            for c in r..dim {
                let d = (self.mat[(r, c)] - self.mat[(c, r)].conj()).norm();
                max_asym = max_asym.max(d);
            }
        }
        if max_asym > STATE_TOL {
            return Err(StateError::NotHermitian(max_asym));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(StateError::BadTrace(tr));
        }
        let eigs = self.eigenvalues();
        if let Some(&min) = eigs.iter().min_by(|a, b| a.total_cmp(b)).as_ref() {
            if *min < POSITIVITY_TOL {
                return Err(StateError::NotPositive(*min));
            }
        }
        Ok(())
    }

    /// Eigenvalues of the state (ascending).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let (vals, _) = self.mat.eigh(UPLO::Lower).expect("hermitian eigendecomposition");
        vals.to_vec()
    }

    /// Diagnostic repair: clamps negative eigenvalues to zero and rescales
    /// the trace to 1. Never used during evolution.
    pub fn clipped_to_positive(&self) -> Self {
        let (vals, vecs) = self.mat.eigh(UPLO::Lower).expect("hermitian eigendecomposition");
        let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        let dim = self.dim();
        let mut mat = Array2::from_elem((dim, dim), C_ZERO);
        for (k, &lam) in clipped.iter().enumerate() {
            if lam == 0.0 {
                continue;
            }
            let col = vecs.column(k);
            let w = Complex64::new(lam / total, 0.0);
            for r in 0..dim {
                for c in 0..dim {
                    mat[(r, c)] += w * col[r] * col[c].conj();
                }
            }
        }
        Self { mat, num_qubits: self.num_qubits }
    }

    /// Conjugates in place: ρ → UρU†.
    pub fn apply_gate(&mut self, gate: &UnitaryGate) -> Result<(), StateError> {
        let pos = target_positions(self.num_qubits, gate.targets())?;
        left_mul_local(&mut self.mat, gate.matrix(), &pos);
        right_mul_local_dagger(&mut self.mat, gate.matrix(), &pos);
        Ok(())
    }

    /// ρ → Σ_i K_i ρ K_i† with single-qubit Kraus operators acting on `qubit`.
    pub(crate) fn apply_kraus_ops(
        &mut self,
        ops: &[Array2<Complex64>],
        qubit: usize,
    ) -> Result<(), StateError> {
        check_qubit(self.num_qubits, qubit)?;
        let pos = [bit_pos(self.num_qubits, qubit)];
        let mut acc = Array2::from_elem(self.mat.dim(), C_ZERO);
        for op in ops {
            let mut term = self.mat.clone();
            left_mul_local(&mut term, op.view(), &pos);
            right_mul_local_dagger(&mut term, op.view(), &pos);
            acc += &term;
        }
        self.mat = acc;
        Ok(())
    }

    /// ⟨σ_Z(qubit)⟩ = Tr(σ_Z(qubit) ρ), in [−1, 1].
    pub fn pauli_z_expectation(&self, qubit: usize) -> Result<f64, StateError> {
        check_qubit(self.num_qubits, qubit)?;
        let pos = bit_pos(self.num_qubits, qubit);
        Ok((0..self.dim()).map(|i| z_sign(i, pos) * self.mat[(i, i)].re).sum())
    }

    /// Non-selective computational-basis measurement of `qubits`: zeroes all
    /// coherences between basis states that differ on any measured qubit.
    /// Equals the outcome average of Π ρ Π† over all outcomes.
    pub fn dephase(&mut self, qubits: &[usize]) -> Result<(), StateError> {
        let pos = target_positions(self.num_qubits, qubits)?;
        let mask: usize = pos.iter().map(|&p| 1usize << p).sum();
        let dim = self.dim();
        for r in 0..dim {
            for c in 0..dim {
                if (r ^ c) & mask != 0 {
                    self.mat[(r, c)] = C_ZERO;
                }
            }
        }
        Ok(())
    }

    /// Reduced state on `keep` (ascending qubit order in the result).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix, StateError> {
        if keep.is_empty() {
            return Err(StateError::EmptyKeepSet);
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        for w in kept.windows(2) {
            if w[0] == w[1] {
                return Err(StateError::DuplicateQubit(w[0]));
            }
        }
        let kept_pos = target_positions(self.num_qubits, &kept)?;
        let traced_pos: Vec<usize> = (0..self.num_qubits)
            .filter(|q| !kept.contains(q))
            .map(|q| bit_pos(self.num_qubits, q))
            .collect();

        let m = kept.len();
        let out_dim = 1usize << m;
        // Expands a local kept-index (bit k of x ↔ kept[m-1-k]) plus a traced
        // assignment into a full register index.
        let expand = |local: usize, env: usize| -> usize {
            let mut idx = 0usize;
            for (k, &p) in kept_pos.iter().enumerate() {
                idx |= ((local >> (m - 1 - k)) & 1) << p;
            }
            for (k, &p) in traced_pos.iter().enumerate() {
                idx |= ((env >> k) & 1) << p;
            }
            idx
        };

        let env_dim = 1usize << traced_pos.len();
        let mut out = Array2::from_elem((out_dim, out_dim), C_ZERO);
        for x in 0..out_dim {
            for y in 0..out_dim {
                let mut acc = C_ZERO;
                for e in 0..env_dim {
                    acc += self.mat[(expand(x, e), expand(y, e))];
                }
                out[(x, y)] = acc;
            }
        }
        Ok(DensityMatrix { mat: out, num_qubits: m })
    }

    /// Bloch vector (x, y, z) of a single-qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3], StateError> {
        if self.num_qubits != 1 {
            return Err(StateError::DimensionMismatch(self.dim(), 2));
        }
        Ok([
            2.0 * self.mat[(0, 1)].re,
            -2.0 * self.mat[(0, 1)].im,
            self.mat[(0, 0)].re - self.mat[(1, 1)].re,
        ])
    }

    /// Single-qubit state with the given Bloch vector.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self, StateError> {
        let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if norm > 1.0 + 1e-9 {
            return Err(StateError::BlochOutOfBall(norm));
        }
        let mat = ndarray::array![
            [
                Complex64::new((1.0 + r[2]) / 2.0, 0.0),
                Complex64::new(r[0] / 2.0, -r[1] / 2.0)
            ],
            [
                Complex64::new(r[0] / 2.0, r[1] / 2.0),
                Complex64::new((1.0 - r[2]) / 2.0, 0.0)
            ],
        ];
        Ok(Self { mat, num_qubits: 1 })
    }
}

fn left_mul_local(mat: &mut Array2<Complex64>, op: ArrayView2<Complex64>, pos: &[usize]) {
    let dim = mat.nrows();
    match pos.len() {
        1 => {
            let s = 1usize << pos[0];
            let (m00, m01) = (op[(0, 0)], op[(0, 1)]);
            let (m10, m11) = (op[(1, 0)], op[(1, 1)]);
            let mut base = 0;
            while base < dim {
                for i in base..base + s {
                    let j = i + s;
                    for c in 0..dim {
                        let (ai, aj) = (mat[(i, c)], mat[(j, c)]);
                        mat[(i, c)] = m00 * ai + m01 * aj;
                        mat[(j, c)] = m10 * ai + m11 * aj;
                    }
                }
                base += s << 1;
            }
        }
        2 => {
            let (b_hi, b_lo) = (1usize << pos[0], 1usize << pos[1]);
            let mask = b_hi | b_lo;
            for idx in 0..dim {
                if idx & mask != 0 {
                    continue;
                }
                let ix = [idx, idx | b_lo, idx | b_hi, idx | b_hi | b_lo];
                for c in 0..dim {
                    let v = [mat[(ix[0], c)], mat[(ix[1], c)], mat[(ix[2], c)], mat[(ix[3], c)]];
                    for r in 0..4 {
                        let mut acc = C_ZERO;
                        for k in 0..4 {
                            acc += op[(r, k)] * v[k];
                        }
                        mat[(ix[r], c)] = acc;
                    }
                }
            }
        }
        k => panic!("unsupported operator arity {k}"),
    }
}

/// mat ← mat · op†, with op acting on the column index.
fn right_mul_local_dagger(mat: &mut Array2<Complex64>, op: ArrayView2<Complex64>, pos: &[usize]) {
    let dim = mat.nrows();
    match pos.len() {
        1 => {
            let s = 1usize << pos[0];
            let (m00, m01) = (op[(0, 0)].conj(), op[(0, 1)].conj());
            let (m10, m11) = (op[(1, 0)].conj(), op[(1, 1)].conj());
            for r in 0..dim {
                let mut base = 0;
                while base < dim {
                    for c in base..base + s {
                        let d = c + s;
                        let (ac, ad) = (mat[(r, c)], mat[(r, d)]);
                        mat[(r, c)] = m00 * ac + m01 * ad;
                        mat[(r, d)] = m10 * ac + m11 * ad;
                    }
                    base += s << 1;
                }
            }
        }
        2 => {
            let (b_hi, b_lo) = (1usize << pos[0], 1usize << pos[1]);
            let mask = b_hi | b_lo;
            for r in 0..dim {
                for idx in 0..dim {
                    if idx & mask != 0 {
                        continue;
                    }
                    let ix = [idx, idx | b_lo, idx | b_hi, idx | b_hi | b_lo];
                    let v = [mat[(r, ix[0])], mat[(r, ix[1])], mat[(r, ix[2])], mat[(r, ix[3])]];
                    for c in 0..4 {
                        let mut acc = C_ZERO;
                        for k in 0..4 {
                            acc += op[(c, k)].conj() * v[k];
                        }
                        mat[(r, ix[c])] = acc;
                    }
                }
            }
        }
        k => panic!("unsupported operator arity {k}"),
    }
}

// ---------------------------------------------------------------------------
// Distances
// ---------------------------------------------------------------------------

/// Trace norm ‖M‖₁ = Σ|λ_i| of a Hermitian matrix, via eigendecomposition.
pub(crate) fn trace_norm_hermitian(mat: &Array2<Complex64>) -> f64 {
    let (vals, _) = mat.eigh(UPLO::Lower).expect("hermitian eigendecomposition");
    vals.iter().map(|v| v.abs()).sum()
}

/// Trace distance T(ρ, σ) = ½‖ρ − σ‖₁ ∈ [0, 1].
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64, StateError> {
    if a.dim() != b.dim() {
        return Err(StateError::DimensionMismatch(a.dim(), b.dim()));
    }
    let diff = &a.mat - &b.mat;
    Ok(0.5 * trace_norm_hermitian(&diff))
}

/// T(ρ, I/2^N): distance from the maximally mixed state.
pub fn distance_from_maximally_mixed(rho: &DensityMatrix) -> f64 {
    let mixed = DensityMatrix::maximally_mixed(rho.num_qubits());
    trace_distance(rho, &mixed).expect("dimensions match")
}
