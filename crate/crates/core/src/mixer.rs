//! Quantum-walk mixer and phase separator.
//!
//! `V_i` loads `(f(n_i(x)), f(x), f(x) f(n_i(x)))` into the three ancillas,
//! a controlled `Rx` on choice qubit `i` moves amplitude between `x` and its
//! neighbour only when both are feasible, and `V_i†` cleans up. One Trotter
//! step applies the partial mixers for `i = 0..N` in order; `m` steps with
//! angle `2 beta / m` approximate `exp(-i beta B)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::knapsack::KnapsackInstance;
use crate::oracle::{apply_oracle, OracleParams};
use crate::sim::{Gate1, RegisterLayout, StateVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixerConfig {
    pub trotter_steps: u32,
    pub beta_bound: f64,
}

impl MixerConfig {
    pub fn new(trotter_steps: u32) -> Result<Self> {
        if trotter_steps == 0 {
            return Err(Error::InvalidSchedule("trotter steps must be >= 1".into()));
        }
        Ok(MixerConfig {
            trotter_steps,
            beta_bound: trotter_steps as f64 * PI,
        })
    }
}

fn check_item(layout: &RegisterLayout, i: usize) -> Result<()> {
    if i >= layout.choice.len() {
        return Err(Error::LayoutMismatch(format!(
            "item {i} out of range for {} choice qubits",
            layout.choice.len()
        )));
    }
    Ok(())
}

pub fn apply_vi(
    state: &mut StateVector,
    layout: &RegisterLayout,
    inst: &KnapsackInstance,
    params: &OracleParams,
    i: usize,
    inverse: bool,
) -> Result<()> {
    check_item(layout, i)?;
    let qi = layout.choice[i];
    let toffoli = [(layout.ancilla_fn, true), (layout.ancilla_fx, true)];
    if !inverse {
        debug_assert!(
            state.mass_where(|idx| layout.ancillas().iter().any(|&a| (idx >> a) & 1 == 1)) < 1e-9,
            "mixer ancillas not clean"
        );
        state.apply_1q(qi, Gate1::X)?;
        apply_oracle(state, layout, inst, params, layout.ancilla_fn)?;
        state.apply_1q(qi, Gate1::X)?;
        apply_oracle(state, layout, inst, params, layout.ancilla_fx)?;
        state.apply_mcx(&toffoli, layout.ancilla_fi)?;
    } else {
        state.apply_mcx(&toffoli, layout.ancilla_fi)?;
        apply_oracle(state, layout, inst, params, layout.ancilla_fx)?;
        state.apply_1q(qi, Gate1::X)?;
        apply_oracle(state, layout, inst, params, layout.ancilla_fn)?;
        state.apply_1q(qi, Gate1::X)?;
    }
    Ok(())
}

/// `V_i† (Rx_i(theta) on the f_i = 1 subspace) V_i`.
pub fn apply_partial_mixer(
    state: &mut StateVector,
    layout: &RegisterLayout,
    inst: &KnapsackInstance,
    params: &OracleParams,
    i: usize,
    theta: f64,
) -> Result<()> {
    apply_vi(state, layout, inst, params, i, false)?;
    state.apply_controlled_rx(layout.ancilla_fi, layout.choice[i], theta)?;
    apply_vi(state, layout, inst, params, i, true)
}

pub fn apply_mixer(
    state: &mut StateVector,
    layout: &RegisterLayout,
    inst: &KnapsackInstance,
    params: &OracleParams,
    beta: f64,
    m: u32,
) -> Result<()> {
    let cfg = MixerConfig::new(m)?;
    if !(0.0..cfg.beta_bound).contains(&beta) {
        return Err(Error::OutOfBounds {
            name: "beta",
            value: beta,
            bound: cfg.beta_bound,
        });
    }
    let theta = 2.0 * beta / m as f64;
    for _ in 0..m {
        for i in 0..layout.choice.len() {
            apply_partial_mixer(state, layout, inst, params, i, theta)?;
        }
    }
    Ok(())
}

/// `|x> -> e^{-i gamma v(x)} |x>`, one phase gate per item.
pub fn apply_phase_separator(
    state: &mut StateVector,
    layout: &RegisterLayout,
    inst: &KnapsackInstance,
    gamma: f64,
) -> Result<()> {
    if layout.choice.len() != inst.len() {
        return Err(Error::LayoutMismatch(format!(
            "{} choice qubits for {} items",
            layout.choice.len(),
            inst.len()
        )));
    }
    for (&q, &v) in layout.choice.iter().zip(&inst.values) {
        state.apply_1q(q, Gate1::Phase(-gamma * v))?;
    }
    Ok(())
}
