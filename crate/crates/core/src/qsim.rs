//! Exact statevector simulation of Ry/Rz/CNOT circuits.
//!
//! Conventions (fixed; tests depend on them):
//! - Qubit `q` addresses bit `q` of the basis index (little-endian), so basis
//!   index 3 on two qubits means both qubits are 1.
//! - `Ry(θ) = [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]`
//! - `Rz(θ) = diag(e^{−iθ/2}, e^{iθ/2})`
//!
//! With these half-angle generators the parameter-shift rule
//! `d⟨Z⟩/dθ = ½[E(θ+π/2) − E(θ−π/2)]` is exact, which is what
//! [`grad_expectations`] relies on. Expectations are computed exactly from the
//! amplitudes; there is no shot sampling anywhere.
//!
//! [`Statevector`] and [`Circuit`] are immutable value types; all operations
//! here are pure functions and safe to call concurrently.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Upper bound on register width. The classifiers use 2-4 qubits; the extra
/// headroom exists for tests.
pub const MAX_QUBITS: usize = 6;

/// Full complex amplitude vector of a quantum register.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    amplitudes: Vec<Complex64>,
    num_qubits: usize,
}

impl Statevector {
    /// Wrap raw amplitudes; the length must be `2^num_qubits`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>, num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        if amplitudes.len() != 1 << num_qubits {
            return Err(Error::structure(format!(
                "statevector length {} does not match 2^{}",
                amplitudes.len(),
                num_qubits
            )));
        }
        Ok(Statevector {
            amplitudes,
            num_qubits,
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Σ |amplitude|²; 1 up to rounding for any state produced by gates.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Gate kinds in the supported set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Ry,
    Rz,
    Cnot,
}

/// One gate application. Rotations carry an index into a flat angle vector;
/// several gates may reference the same slot (re-uploading).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateOp {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    pub angle_slot: Option<usize>,
}

impl GateOp {
    pub fn ry(target: usize, angle_slot: usize) -> Self {
        GateOp {
            kind: GateKind::Ry,
            target,
            control: None,
            angle_slot: Some(angle_slot),
        }
    }

    pub fn rz(target: usize, angle_slot: usize) -> Self {
        GateOp {
            kind: GateKind::Rz,
            target,
            control: None,
            angle_slot: Some(angle_slot),
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        GateOp {
            kind: GateKind::Cnot,
            target,
            control: Some(control),
            angle_slot: None,
        }
    }

    fn validate(&self, num_qubits: usize) -> Result<()> {
        if self.target >= num_qubits {
            return Err(Error::structure(format!(
                "gate target {} out of range for {} qubits",
                self.target, num_qubits
            )));
        }
        match self.kind {
            GateKind::Cnot => {
                let control = self.control.ok_or_else(|| {
                    Error::structure("CNOT gate is missing a control qubit".to_string())
                })?;
                if control >= num_qubits {
                    return Err(Error::structure(format!(
                        "gate control {control} out of range for {num_qubits} qubits"
                    )));
                }
                if control == self.target {
                    return Err(Error::structure(
                        "CNOT control and target must differ".to_string(),
                    ));
                }
                if self.angle_slot.is_some() {
                    return Err(Error::structure(
                        "CNOT gate must not carry an angle slot".to_string(),
                    ));
                }
            }
            GateKind::Ry | GateKind::Rz => {
                if self.control.is_some() {
                    return Err(Error::structure(
                        "rotation gate must not carry a control qubit".to_string(),
                    ));
                }
                if self.angle_slot.is_none() {
                    return Err(Error::structure(
                        "rotation gate is missing an angle slot".to_string(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// An ordered gate list over a fixed register, parameterized by a flat angle
/// vector of length `n_angles`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<GateOp>,
    n_angles: usize,
}

impl Circuit {
    pub fn new(num_qubits: usize, ops: Vec<GateOp>, n_angles: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        for op in &ops {
            op.validate(num_qubits)?;
            if let Some(slot) = op.angle_slot {
                if slot >= n_angles {
                    return Err(Error::structure(format!(
                        "angle slot {slot} out of range for {n_angles} angles"
                    )));
                }
            }
        }
        Ok(Circuit {
            num_qubits,
            ops,
            n_angles,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn n_angles(&self) -> usize {
        self.n_angles
    }
}

fn check_qubit_count(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::config(format!(
            "qubit count {num_qubits} outside supported range 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// Prepare |0...0⟩ on `num_qubits` qubits.
pub fn init_state(num_qubits: usize) -> Result<Statevector> {
    check_qubit_count(num_qubits)?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
    amplitudes[0] = Complex64::new(1.0, 0.0);
    Ok(Statevector {
        amplitudes,
        num_qubits,
    })
}

fn rotation_angle(gate: &GateOp, angles: &[f64]) -> Result<f64> {
    let slot = gate
        .angle_slot
        .ok_or_else(|| Error::structure("rotation gate is missing an angle slot".to_string()))?;
    let angle = *angles.get(slot).ok_or_else(|| {
        Error::structure(format!(
            "angle slot {slot} out of range for {} angles",
            angles.len()
        ))
    })?;
    if !angle.is_finite() {
        return Err(Error::numeric(format!(
            "non-finite rotation angle {angle} in slot {slot}"
        )));
    }
    Ok(angle)
}

/// 2x2 update over the target-qubit pairs, in place.
fn apply_single_qubit(
    amplitudes: &mut [Complex64],
    target: usize,
    u00: Complex64,
    u01: Complex64,
    u10: Complex64,
    u11: Complex64,
) {
    let step = 1 << target;
    let mut base = 0;
    while base < amplitudes.len() {
        for offset in 0..step {
            let lo = base + offset;
            let hi = lo + step;
            let a = amplitudes[lo];
            let b = amplitudes[hi];
            amplitudes[lo] = u00 * a + u01 * b;
            amplitudes[hi] = u10 * a + u11 * b;
        }
        base += 2 * step;
    }
}

fn apply_cnot(amplitudes: &mut [Complex64], control: usize, target: usize) {
    let control_bit = 1usize << control;
    let target_bit = 1usize << target;
    for idx in 0..amplitudes.len() {
        if idx & control_bit != 0 && idx & target_bit == 0 {
            amplitudes.swap(idx, idx | target_bit);
        }
    }
}

fn apply_gate_in_place(
    amplitudes: &mut [Complex64],
    num_qubits: usize,
    gate: &GateOp,
    angles: &[f64],
) -> Result<()> {
    gate.validate(num_qubits)?;
    match gate.kind {
        GateKind::Ry => {
            let half = rotation_angle(gate, angles)? / 2.0;
            let (sin, cos) = half.sin_cos();
            apply_single_qubit(
                amplitudes,
                gate.target,
                Complex64::new(cos, 0.0),
                Complex64::new(-sin, 0.0),
                Complex64::new(sin, 0.0),
                Complex64::new(cos, 0.0),
            );
        }
        GateKind::Rz => {
            let half = rotation_angle(gate, angles)? / 2.0;
            let phase_lo = Complex64::from_polar(1.0, -half);
            let phase_hi = Complex64::from_polar(1.0, half);
            let step = 1 << gate.target;
            for (idx, amp) in amplitudes.iter_mut().enumerate() {
                *amp *= if idx & step == 0 { phase_lo } else { phase_hi };
            }
        }
        GateKind::Cnot => {
            apply_cnot(amplitudes, gate.control.expect("validated"), gate.target);
        }
    }
    Ok(())
}

/// Apply one gate and return the resulting state.
pub fn apply_gate(state: &Statevector, gate: &GateOp, angles: &[f64]) -> Result<Statevector> {
    let mut next = state.clone();
    apply_gate_in_place(&mut next.amplitudes, next.num_qubits, gate, angles)?;
    Ok(next)
}

/// Run `circuit` on |0...0⟩ with the given flat angle vector.
pub fn run_circuit(circuit: &Circuit, angles: &[f64]) -> Result<Statevector> {
    if angles.len() != circuit.n_angles {
        return Err(Error::structure(format!(
            "angle vector length {} does not match circuit n_angles {}",
            angles.len(),
            circuit.n_angles
        )));
    }
    let mut state = init_state(circuit.num_qubits)?;
    for op in &circuit.ops {
        apply_gate_in_place(&mut state.amplitudes, state.num_qubits, op, angles)?;
    }
    Ok(state)
}

/// Exact ⟨Z⟩ of one qubit: Σ (±1)·|amplitude|², +1 where the qubit's bit is 0.
pub fn expect_z(state: &Statevector, qubit: usize) -> Result<f64> {
    if qubit >= state.num_qubits {
        return Err(Error::structure(format!(
            "qubit {} out of range for {} qubits",
            qubit, state.num_qubits
        )));
    }
    let bit = 1usize << qubit;
    let mut total = 0.0;
    for (idx, amp) in state.amplitudes.iter().enumerate() {
        let p = amp.norm_sqr();
        if idx & bit == 0 {
            total += p;
        } else {
            total -= p;
        }
    }
    // Accumulated probabilities can overshoot 1 by an ulp; keep the contract.
    Ok(total.clamp(-1.0, 1.0))
}

/// ⟨Z⟩ of every qubit, in qubit order.
pub fn all_expect_z(state: &Statevector) -> Vec<f64> {
    (0..state.num_qubits)
        .map(|q| expect_z(state, q).expect("qubit index in range"))
        .collect()
}

/// Exact Jacobian d⟨Z_q⟩/dθ_s as `jac[q][s]`, by the parameter-shift rule.
///
/// Each rotation occurrence referencing slot `s` contributes
/// `½[E(θ_occ+π/2) − E(θ_occ−π/2)]` to column `s`; occurrences of a shared
/// slot sum (the re-uploading chain rule). Slots with no occurrence keep an
/// exactly zero column.
pub fn grad_expectations(circuit: &Circuit, angles: &[f64]) -> Result<Vec<Vec<f64>>> {
    if angles.len() != circuit.n_angles {
        return Err(Error::structure(format!(
            "angle vector length {} does not match circuit n_angles {}",
            angles.len(),
            circuit.n_angles
        )));
    }
    let num_qubits = circuit.num_qubits;
    let mut jac = vec![vec![0.0f64; circuit.n_angles]; num_qubits];

    // Walk the circuit once, keeping the state *before* each gate. For every
    // rotation occurrence, branch off with the shifted angle and replay the
    // suffix with the original angles.
    let mut prefix = init_state(num_qubits)?;
    let mut shifted = prefix.clone();
    for (pos, op) in circuit.ops.iter().enumerate() {
        if let Some(slot) = op.angle_slot {
            let base = rotation_angle(op, angles)?;
            for (sign, shift) in [(0.5, FRAC_PI_2), (-0.5, -FRAC_PI_2)] {
                shifted.amplitudes.copy_from_slice(&prefix.amplitudes);
                let shifted_angles = [base + shift];
                let mut shifted_op = *op;
                shifted_op.angle_slot = Some(0);
                apply_gate_in_place(
                    &mut shifted.amplitudes,
                    num_qubits,
                    &shifted_op,
                    &shifted_angles,
                )?;
                for suffix_op in &circuit.ops[pos + 1..] {
                    apply_gate_in_place(&mut shifted.amplitudes, num_qubits, suffix_op, angles)?;
                }
                for (qubit, row) in jac.iter_mut().enumerate() {
                    row[slot] += sign * expect_z(&shifted, qubit)?;
                }
            }
        }
        apply_gate_in_place(&mut prefix.amplitudes, num_qubits, op, angles)?;
    }
    Ok(jac)
}
