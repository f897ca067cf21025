//! Feasibility oracle `U_f = U1† U2 U1`.
//!
//! `U1` writes `w(x) + c0` into the weight register with QFT arithmetic,
//! `U2` flips a flag when every weight bit at position `>= k` is zero, and the
//! inverse of `U1` returns the weight register to `|0>`. The offset `c0` is
//! chosen so that `C + c0 + 1 = 2^k`, which turns `w(x) <= C` into a test on
//! the high bits alone.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::knapsack::KnapsackInstance;
use crate::sim::{Gate1, RegisterLayout, StateVector};

/// Threshold bit `k`, offset `c0` and weight-register width `q_w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleParams {
    pub k: u32,
    pub c0: u64,
    pub q_w: usize,
}

/// Bits needed to hold integers `0..=max`.
fn bits_for(max: u64) -> usize {
    (u64::BITS - max.leading_zeros()).max(1) as usize
}

pub fn derive_oracle_params(inst: &KnapsackInstance) -> OracleParams {
    let cap = inst.capacity;
    let mut k = 0u32;
    while (1u64 << k) < cap + 1 {
        k += 1;
    }
    let c0 = (1u64 << k) - cap - 1;
    let q_w = bits_for(inst.total_weight_all() + c0);
    OracleParams { k, c0, q_w }
}

impl RegisterLayout {
    /// Layout sized for `inst`: `N + q_w + 3` qubits.
    pub fn for_instance(inst: &KnapsackInstance) -> Self {
        RegisterLayout::new(inst.len(), derive_oracle_params(inst).q_w)
    }
}

fn check_shapes(
    layout: &RegisterLayout,
    inst: &KnapsackInstance,
    params: &OracleParams,
) -> Result<()> {
    if layout.choice.len() != inst.len() {
        return Err(Error::LayoutMismatch(format!(
            "{} choice qubits for {} items",
            layout.choice.len(),
            inst.len()
        )));
    }
    if layout.weight.len() != params.q_w {
        return Err(Error::LayoutMismatch(format!(
            "{} weight qubits but q_w = {}",
            layout.weight.len(),
            params.q_w
        )));
    }
    Ok(())
}

/// Phase that adds `amount` to the Fourier-space register at qubit position
/// `b`, reduced modulo `2 pi`.
fn add_angle(amount: u64, b: usize) -> f64 {
    let period = 1u64 << (b + 1);
    PI * (amount % period) as f64 / (1u64 << b) as f64
}

/// Weight register `|0> -> |w(x) + c0>` (or its inverse).
pub fn apply_u1(
    state: &mut StateVector,
    layout: &RegisterLayout,
    inst: &KnapsackInstance,
    params: &OracleParams,
    inverse: bool,
) -> Result<()> {
    check_shapes(layout, inst, params)?;
    let sign = if inverse { -1.0 } else { 1.0 };
    state.qft(&layout.weight, false)?;
    for (b, &wq) in layout.weight.iter().enumerate() {
        let offset = add_angle(params.c0, b);
        if offset != 0.0 {
            state.apply_1q(wq, Gate1::Phase(sign * offset))?;
        }
        for (i, &cq) in layout.choice.iter().enumerate() {
            let angle = add_angle(inst.weights[i], b);
            if angle != 0.0 {
                state.apply_controlled_phase(cq, wq, sign * angle)?;
            }
        }
    }
    state.qft(&layout.weight, true)?;
    Ok(())
}

/// Flips `flag` when weight-register bits `k..q_w` are all zero.
pub fn apply_u2(
    state: &mut StateVector,
    layout: &RegisterLayout,
    params: &OracleParams,
    flag: usize,
) -> Result<()> {
    if layout.weight.len() != params.q_w {
        return Err(Error::LayoutMismatch(format!(
            "{} weight qubits but q_w = {}",
            layout.weight.len(),
            params.q_w
        )));
    }
    let controls: Vec<(usize, bool)> = layout
        .weight
        .iter()
        .skip(params.k as usize)
        .map(|&q| (q, false))
        .collect();
    state.apply_mcx(&controls, flag)
}

/// `flag ^= f(x)` on every choice component; the weight register must be
/// clean on entry and is clean again on exit.
pub fn apply_oracle(
    state: &mut StateVector,
    layout: &RegisterLayout,
    inst: &KnapsackInstance,
    params: &OracleParams,
    flag: usize,
) -> Result<()> {
    check_shapes(layout, inst, params)?;
    if layout.choice.contains(&flag) || layout.weight.contains(&flag) {
        return Err(Error::QubitClash(flag));
    }
    debug_assert!(
        weight_register_mass(state, layout) < 1e-9,
        "weight register not clean before oracle"
    );
    apply_u1(state, layout, inst, params, false)?;
    apply_u2(state, layout, params, flag)?;
    apply_u1(state, layout, inst, params, true)
}

/// Probability of a nonzero weight register.
pub fn weight_register_mass(state: &StateVector, layout: &RegisterLayout) -> f64 {
    state.mass_where(|i| layout.weight_value(i) != 0)
}
