//! Reduced evolution on the clean-ancilla sector.
//!
//! Every layer of the circuit maps states with a clean weight register and
//! clean mixer ancillas back into that sector, so the evolution is fully
//! described by `2^N` choice amplitudes plus the feasibility truth table.
//! The truth table is read off one application of the gate-level oracle to
//! `|+>^N`; the walk then rotates exactly those neighbour pairs whose
//! endpoints are both feasible. Results agree with the full circuit to
//! rounding and are used for the optimizer's inner loop.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::knapsack::KnapsackInstance;
use crate::mixer::MixerConfig;
use crate::oracle::{apply_oracle, derive_oracle_params};
use crate::sim::{init_state, ChoiceDistribution, RegisterLayout};

#[derive(Debug, Clone)]
pub struct SectorEvolver {
    n_items: usize,
    values: Vec<f64>,
    /// `v(x)` for every choice index.
    objective: Vec<f64>,
    feasible: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    amps: Vec<Complex64>,
}

impl SectorState {
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }
}

impl SectorEvolver {
    /// Compiles `inst` by running the gate-level feasibility oracle once.
    pub fn compile(inst: &KnapsackInstance) -> Result<Self> {
        inst.validate()?;
        let layout = RegisterLayout::for_instance(inst);
        let params = derive_oracle_params(inst);
        let mut state = init_state(&layout)?;
        apply_oracle(&mut state, &layout, inst, &params, layout.ancilla_fx)?;

        let n = inst.len();
        let mut flagged = vec![0.0; 1 << n];
        for (i, a) in state.amplitudes().iter().enumerate() {
            if (i >> layout.ancilla_fx) & 1 == 1 {
                flagged[layout.choice_index(i)] += a.norm_sqr();
            }
        }
        let half = 0.5 / (1u64 << n) as f64;
        let feasible = flagged.iter().map(|&p| p > half).collect();
        Ok(Self::with_truth_table(inst, feasible))
    }

    /// Builds the evolver from an externally supplied truth table.
    pub fn with_truth_table(inst: &KnapsackInstance, feasible: Vec<bool>) -> Self {
        let n = inst.len();
        assert_eq!(feasible.len(), 1 << n);
        let objective = (0..1usize << n)
            .map(|x| {
                (0..n)
                    .filter(|&i| (x >> i) & 1 == 1)
                    .map(|i| inst.values[i])
                    .sum()
            })
            .collect();
        SectorEvolver {
            n_items: n,
            values: inst.values.clone(),
            objective,
            feasible,
        }
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn feasible(&self) -> &[bool] {
        &self.feasible
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn initial(&self) -> SectorState {
        let a = (1.0 / (1u64 << self.n_items) as f64).sqrt();
        SectorState {
            amps: vec![Complex64::new(a, 0.0); 1 << self.n_items],
        }
    }

    pub fn phase_separator(&self, state: &mut SectorState, gamma: f64) {
        for (a, &v) in state.amps.iter_mut().zip(&self.objective) {
            *a *= Complex64::from_polar(1.0, -gamma * v);
        }
    }

    pub fn partial_mixer(&self, state: &mut SectorState, i: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let bit = 1usize << i;
        let minus_is = Complex64::new(0.0, -s);
        for x in 0..state.amps.len() {
            if x & bit != 0 {
                continue;
            }
            let y = x | bit;
            if !(self.feasible[x] && self.feasible[y]) {
                continue;
            }
            let (a0, a1) = (state.amps[x], state.amps[y]);
            state.amps[x] = a0 * c + a1 * minus_is;
            state.amps[y] = a0 * minus_is + a1 * c;
        }
    }

    pub fn mixer(&self, state: &mut SectorState, beta: f64, m: u32) -> Result<()> {
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
            for i in 0..self.n_items {
                self.partial_mixer(state, i, theta);
            }
        }
        Ok(())
    }

    /// One QAOA layer: phase separator, then mixer.
    pub fn layer(&self, state: &mut SectorState, gamma: f64, beta: f64, m: u32) -> Result<()> {
        self.phase_separator(state, gamma);
        self.mixer(state, beta, m)
    }

    pub fn expectation(&self, state: &SectorState) -> f64 {
        state
            .amps
            .iter()
            .zip(&self.objective)
            .map(|(a, v)| a.norm_sqr() * v)
            .sum()
    }

    pub fn distribution(&self, state: &SectorState) -> ChoiceDistribution {
        ChoiceDistribution::from_probabilities(
            self.n_items,
            state.amps.iter().map(|a| a.norm_sqr()).collect(),
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}
