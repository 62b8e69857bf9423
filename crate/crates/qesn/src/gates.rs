//! One- and two-qubit unitary gates.

use ndarray::{array, Array2, ArrayView2};
use num_complex::Complex64;
use thiserror::Error;

use crate::state::{C_ONE, C_ZERO};

/// Tolerance on ‖U†U − I‖ entries for gate construction.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum GateError {
    #[error("only 1- and 2-qubit gates are supported, got {0} targets")]
    UnsupportedArity(usize),
    #[error("matrix is {rows}x{cols} but {targets} targets require {expected}x{expected}")]
    ShapeMismatch { rows: usize, cols: usize, targets: usize, expected: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),
    #[error("target qubit {index} out of range for {num_qubits} qubits")]
    TargetOutOfRange { index: usize, num_qubits: usize },
    #[error("matrix is not unitary (max |U†U − I| entry {0:.3e})")]
    NotUnitary(f64),
}

/// A unitary acting on one or two target qubits of a larger register.
///
/// For a two-qubit gate the first target supplies the more significant bit
/// of the 4×4 matrix's basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryGate {
    matrix: Array2<Complex64>,
    targets: Vec<usize>,
}

impl UnitaryGate {
    /// Validates shape, target distinctness and unitarity.
    pub fn new(matrix: Array2<Complex64>, targets: Vec<usize>) -> Result<Self, GateError> {
        let k = targets.len();
        if k == 0 || k > 2 {
            return Err(GateError::UnsupportedArity(k));
        }
        let expected = 1usize << k;
        let (rows, cols) = matrix.dim();
        if rows != expected || cols != expected {
            return Err(GateError::ShapeMismatch { rows, cols, targets: k, expected });
        }
        if k == 2 && targets[0] == targets[1] {
            return Err(GateError::DuplicateTarget(targets[0]));
        }
        let dev = unitarity_deviation(&matrix);
        if dev > UNITARY_TOL {
            return Err(GateError::NotUnitary(dev));
        }
        Ok(Self { matrix, targets })
    }

    pub fn matrix(&self) -> ArrayView2<'_, Complex64> {
        self.matrix.view()
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Rotation about X: RX(θ) = exp(−iθX/2).
    pub fn rx(theta: f64, qubit: usize) -> Self {
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        Self {
            matrix: array![
                [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                [Complex64::new(0.0, -s), Complex64::new(c, 0.0)]
            ],
            targets: vec![qubit],
        }
    }

    /// Rotation about Y: RY(θ) = exp(−iθY/2).
    pub fn ry(theta: f64, qubit: usize) -> Self {
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        Self {
            matrix: array![
                [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                [Complex64::new(s, 0.0), Complex64::new(c, 0.0)]
            ],
            targets: vec![qubit],
        }
    }

    /// Rotation about Z: RZ(θ) = exp(−iθZ/2) = diag(e^{−iθ/2}, e^{iθ/2}).
    pub fn rz(theta: f64, qubit: usize) -> Self {
        let h = theta / 2.0;
        Self {
            matrix: array![
                [Complex64::new(h.cos(), -h.sin()), C_ZERO],
                [C_ZERO, Complex64::new(h.cos(), h.sin())]
            ],
            targets: vec![qubit],
        }
    }

    pub fn pauli_x(qubit: usize) -> Self {
        Self {
            matrix: array![[C_ZERO, C_ONE], [C_ONE, C_ZERO]],
            targets: vec![qubit],
        }
    }

    pub fn pauli_y(qubit: usize) -> Self {
        Self {
            matrix: array![
                [C_ZERO, Complex64::new(0.0, -1.0)],
                [Complex64::new(0.0, 1.0), C_ZERO]
            ],
            targets: vec![qubit],
        }
    }

    pub fn pauli_z(qubit: usize) -> Self {
        Self {
            matrix: array![[C_ONE, C_ZERO], [C_ZERO, Complex64::new(-1.0, 0.0)]],
            targets: vec![qubit],
        }
    }

    pub fn hadamard(qubit: usize) -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            matrix: array![[h, h], [h, -h]],
            targets: vec![qubit],
        }
    }

    pub fn identity(qubit: usize) -> Self {
        Self {
            matrix: array![[C_ONE, C_ZERO], [C_ZERO, C_ONE]],
            targets: vec![qubit],
        }
    }

    /// CNOT with the given control and target qubits.
    pub fn cnot(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "control and target must differ");
        Self {
            matrix: array![
                [C_ONE, C_ZERO, C_ZERO, C_ZERO],
                [C_ZERO, C_ONE, C_ZERO, C_ZERO],
                [C_ZERO, C_ZERO, C_ZERO, C_ONE],
                [C_ZERO, C_ZERO, C_ONE, C_ZERO]
            ],
            targets: vec![control, target],
        }
    }

    /// Materializes I ⊗ … ⊗ U ⊗ … ⊗ I on a `num_qubits` register.
    ///
    /// Intended for diagnostics and tests on small registers; simulation
    /// paths act in place without building the full operator.
    pub fn embedded_matrix(&self, num_qubits: usize) -> Result<Array2<Complex64>, GateError> {
        for &t in &self.targets {
            if t >= num_qubits {
                return Err(GateError::TargetOutOfRange { index: t, num_qubits });
            }
        }
        let dim = 1usize << num_qubits;
        let k = self.targets.len();
        let positions: Vec<usize> =
            self.targets.iter().map(|&t| num_qubits - 1 - t).collect();
        let local = |idx: usize| -> usize {
            let mut l = 0usize;
            for &p in &positions {
                l = (l << 1) | ((idx >> p) & 1);
            }
            l
        };
        let rest_mask: usize = {
            let mut m = dim - 1;
            for &p in &positions {
                m &= !(1usize << p);
            }
            m
        };
        let mut out = Array2::from_elem((dim, dim), C_ZERO);
        for r in 0..dim {
            for c in 0..dim {
                if r & rest_mask == c & rest_mask {
                    out[(r, c)] = self.matrix[(local(r), local(c))];
                }
            }
        }
        debug_assert_eq!(k, positions.len());
        Ok(out)
    }
}

fn unitarity_deviation(m: &Array2<Complex64>) -> f64 {
    let n = m.nrows();
    let mut max_dev: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            let mut acc = C_ZERO;
            for k in 0..n {
                acc += m[(k, r)].conj() * m[(k, c)];
            }
            let expect = if r == c { C_ONE } else { C_ZERO };
            max_dev = max_dev.max((acc - expect).norm());
        }
    }
    max_dev
}
