//! Dense statevector simulator.
//!
//! Basis index bit `j` is qubit `j` (little-endian). Amplitudes are never
//! renormalized; every kernel is exactly unitary up to rounding.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::knapsack::BitString;

/// Largest register this simulator will allocate.
pub const MAX_QUBITS: usize = 28;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate1 {
    H,
    X,
    /// `cos(theta/2) I - i sin(theta/2) X`
    Rx(f64),
    /// `diag(1, e^{i phi})`
    Phase(f64),
}

impl Gate1 {
    fn matrix(self) -> [[Complex64; 2]; 2] {
        let c = |re, im| Complex64::new(re, im);
        match self {
            Gate1::H => [
                [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
                [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)],
            ],
            Gate1::X => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            Gate1::Rx(theta) => {
                let (s, co) = (theta / 2.0).sin_cos();
                [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
            }
            Gate1::Phase(phi) => [
                [c(1.0, 0.0), c(0.0, 0.0)],
                [c(0.0, 0.0), Complex64::from_polar(1.0, phi)],
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::InvalidRegister(format!(
                "{n_qubits} qubits exceeds the {MAX_QUBITS}-qubit limit"
            )));
        }
        let len = 1usize << n_qubits;
        if index >= len {
            return Err(Error::InvalidRegister(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Wraps raw amplitudes. The length must be a power of two; the caller
    /// is responsible for normalization.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidRegister(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        Ok(StateVector {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Total probability of basis states selected by `pred`.
    pub fn mass_where(&self, pred: impl Fn(usize) -> bool) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| pred(*i))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Largest absolute amplitude difference to `other`.
    pub fn max_deviation(&self, other: &StateVector) -> f64 {
        assert_eq!(self.n_qubits, other.n_qubits);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    fn check_distinct(&self, qubits: &[usize]) -> Result<()> {
        for (i, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..i].contains(&q) {
                return Err(Error::QubitClash(q));
            }
        }
        Ok(())
    }

    pub fn apply_1q(&mut self, qubit: usize, gate: Gate1) -> Result<()> {
        self.check_qubit(qubit)?;
        match gate {
            Gate1::Phase(phi) => self.phase_where(1 << qubit, 1 << qubit, phi),
            Gate1::X => self.swap_pairs(qubit, 0, 0),
            _ => self.apply_2x2(qubit, 0, 0, gate.matrix()),
        }
        Ok(())
    }

    /// Multiplies the `|11>` component of (`control`, `target`) by `e^{i phi}`.
    pub fn apply_controlled_phase(
        &mut self,
        control: usize,
        target: usize,
        phi: f64,
    ) -> Result<()> {
        self.check_distinct(&[control, target])?;
        let mask = (1 << control) | (1 << target);
        self.phase_where(mask, mask, phi);
        Ok(())
    }

    /// Multi-controlled X. Each control is `(qubit, polarity)`; the target
    /// flips on basis states where every control qubit equals its polarity.
    pub fn apply_mcx(&mut self, controls: &[(usize, bool)], target: usize) -> Result<()> {
        let mut all: Vec<usize> = controls.iter().map(|&(q, _)| q).collect();
        all.push(target);
        self.check_distinct(&all)?;
        let (mask, want) = control_masks(controls);
        self.swap_pairs(target, mask, want);
        Ok(())
    }

    /// `Rx(theta)` on `target` inside the `control = 1` subspace.
    pub fn apply_controlled_rx(&mut self, control: usize, target: usize, theta: f64) -> Result<()> {
        self.check_distinct(&[control, target])?;
        let m = 1 << control;
        self.apply_2x2(target, m, m, Gate1::Rx(theta).matrix());
        Ok(())
    }

    /// Quantum Fourier transform on `register` (least significant qubit
    /// first), without the terminal swaps.
    ///
    /// Because the swaps are omitted the output index is bit-reversed: input
    /// `|v>` maps to `2^{-n/2} sum_r e^{2 pi i v rev(r) / 2^n} |r>`. Adding
    /// an integer `a` in this basis is therefore a phase of `pi a / 2^b` on
    /// register qubit `b`.
    pub fn qft(&mut self, register: &[usize], inverse: bool) -> Result<()> {
        if register.is_empty() {
            return Err(Error::InvalidRegister("empty register".into()));
        }
        self.check_distinct(register)?;
        let n = register.len();
        if !inverse {
            for b in (0..n).rev() {
                self.apply_1q(register[b], Gate1::H)?;
                for c in (0..b).rev() {
                    let angle = PI / (1u64 << (b - c)) as f64;
                    self.apply_controlled_phase(register[c], register[b], angle)?;
                }
            }
        } else {
            for b in 0..n {
                for c in 0..b {
                    let angle = -PI / (1u64 << (b - c)) as f64;
                    self.apply_controlled_phase(register[c], register[b], angle)?;
                }
                self.apply_1q(register[b], Gate1::H)?;
            }
        }
        Ok(())
    }

    /// Writes `index real imag` for every amplitude with modulus above 1e-12.
    pub fn dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() > 1e-12 {
                writeln!(out, "{i} {:.17e} {:.17e}", a.re, a.im)?;
            }
        }
        Ok(())
    }

    fn phase_where(&mut self, mask: usize, want: usize, phi: f64) {
        let f = Complex64::from_polar(1.0, phi);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == want {
                *a *= f;
            }
        }
    }

    fn swap_pairs(&mut self, target: usize, mask: usize, want: usize) {
        let t = 1usize << target;
        for i in 0..self.amps.len() {
            if i & t == 0 && i & mask == want {
                self.amps.swap(i, i | t);
            }
        }
    }

    fn apply_2x2(&mut self, target: usize, mask: usize, want: usize, m: [[Complex64; 2]; 2]) {
        let t = 1usize << target;
        let len = self.amps.len();
        let mut block = 0;
        while block < len {
            for i in block..block + t {
                if i & mask != want {
                    continue;
                }
                let a0 = self.amps[i];
                let a1 = self.amps[i | t];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | t] = m[1][0] * a0 + m[1][1] * a1;
            }
            block += 2 * t;
        }
    }
}

fn control_masks(controls: &[(usize, bool)]) -> (usize, usize) {
    controls.iter().fold((0, 0), |(mask, want), &(q, pol)| {
        (mask | (1 << q), if pol { want | (1 << q) } else { want })
    })
}

/// Qubit assignment for the choice register, the weight register and the
/// three walk-mixer ancillas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    pub choice: Vec<usize>,
    pub weight: Vec<usize>,
    pub ancilla_fn: usize,
    pub ancilla_fx: usize,
    pub ancilla_fi: usize,
}

impl RegisterLayout {
    /// Packs choice qubits first, then the weight register, then
    /// `ancilla_fn`, `ancilla_fx`, `ancilla_fi`.
    pub fn new(n_items: usize, weight_width: usize) -> Self {
        let base = n_items + weight_width;
        RegisterLayout {
            choice: (0..n_items).collect(),
            weight: (n_items..base).collect(),
            ancilla_fn: base,
            ancilla_fx: base + 1,
            ancilla_fi: base + 2,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.choice.len() + self.weight.len() + 3
    }

    pub fn ancillas(&self) -> [usize; 3] {
        [self.ancilla_fn, self.ancilla_fx, self.ancilla_fi]
    }

    pub fn validate(&self) -> Result<()> {
        let mut all: Vec<usize> = self.choice.iter().chain(&self.weight).copied().collect();
        all.extend(self.ancillas());
        let n = all.len();
        for (i, &q) in all.iter().enumerate() {
            if q >= n {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    n_qubits: n,
                });
            }
            if all[..i].contains(&q) {
                return Err(Error::QubitClash(q));
            }
        }
        if self.choice.is_empty() {
            return Err(Error::InvalidRegister("empty choice register".into()));
        }
        Ok(())
    }

    /// Index of the choice bitstring carried by basis state `index`.
    pub fn choice_index(&self, index: usize) -> usize {
        self.choice
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &q)| acc | (((index >> q) & 1) << i))
    }

    /// Integer held by the weight register in basis state `index`.
    pub fn weight_value(&self, index: usize) -> usize {
        self.weight
            .iter()
            .enumerate()
            .fold(0, |acc, (b, &q)| acc | (((index >> q) & 1) << b))
    }

    /// Basis index with the choice register set to `choice` and every other
    /// qubit zero.
    pub fn embed_choice(&self, choice: usize) -> usize {
        self.choice
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &q)| acc | (((choice >> i) & 1) << q))
    }

    /// Mask of all non-choice qubits.
    pub fn work_mask(&self) -> usize {
        self.weight
            .iter()
            .chain(&self.ancillas())
            .fold(0, |acc, &q| acc | (1 << q))
    }
}

/// `|+>` on every choice qubit, `|0>` elsewhere.
pub fn init_state(layout: &RegisterLayout) -> Result<StateVector> {
    layout.validate()?;
    let mut state = StateVector::zero(layout.n_qubits())?;
    for &q in &layout.choice {
        state.apply_1q(q, Gate1::H)?;
    }
    Ok(state)
}

/// Marginal distribution of the choice register, indexed by
/// [`BitString::to_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceDistribution {
    n_items: usize,
    probs: Vec<f64>,
}

impl ChoiceDistribution {
    pub fn from_probabilities(n_items: usize, probs: Vec<f64>) -> Self {
        assert_eq!(probs.len(), 1 << n_items);
        ChoiceDistribution { n_items, probs }
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, x: &BitString) -> f64 {
        self.probs[x.to_index()]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (BitString, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (BitString::from_index(i, self.n_items), p))
    }
}

pub fn choice_distribution(state: &StateVector, layout: &RegisterLayout) -> ChoiceDistribution {
    let n = layout.choice.len();
    let mut probs = vec![0.0; 1 << n];
    for (i, a) in state.amplitudes().iter().enumerate() {
        probs[layout.choice_index(i)] += a.norm_sqr();
    }
    ChoiceDistribution { n_items: n, probs }
}
