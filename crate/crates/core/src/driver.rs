//! QAOA orchestration: schedules, evolution, parameter search and reports.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knapsack::{
    approximation_ratio, is_feasible, solve_dp, total_value, BitString, BksSolution,
    KnapsackInstance,
};
use crate::mixer::{apply_mixer, apply_phase_separator, MixerConfig};
use crate::optim::{maximize_from, refine, Bound};
use crate::oracle::derive_oracle_params;
use crate::sector::{SectorEvolver, SectorState};
use crate::sim::{
    choice_distribution, init_state, ChoiceDistribution, RegisterLayout, StateVector,
};

/// Upper bound (exclusive) of every `gamma`.
pub const GAMMA_BOUND: f64 = 2.0 * PI;

/// Default evaluation budget per layer.
pub const DEFAULT_BUDGET: usize = 200;

/// Probabilities closer than this count as a tie when picking the most
/// likely feasible selection.
const PROB_TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaSchedule {
    pub p: usize,
    pub m: u32,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaSchedule {
    pub fn new(m: u32, gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        let s = QaoaSchedule {
            p: gammas.len(),
            m,
            gammas,
            betas,
        };
        s.validate()?;
        Ok(s)
    }

    /// The empty (`p = 0`) schedule.
    pub fn empty(m: u32) -> Self {
        QaoaSchedule {
            p: 0,
            m,
            gammas: Vec::new(),
            betas: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = MixerConfig::new(self.m)?;
        if self.gammas.len() != self.p || self.betas.len() != self.p {
            return Err(Error::InvalidSchedule(format!(
                "p = {} but {} gammas and {} betas",
                self.p,
                self.gammas.len(),
                self.betas.len()
            )));
        }
        for &g in &self.gammas {
            if !(0.0..GAMMA_BOUND).contains(&g) {
                return Err(Error::OutOfBounds {
                    name: "gamma",
                    value: g,
                    bound: GAMMA_BOUND,
                });
            }
        }
        for &b in &self.betas {
            if !(0.0..cfg.beta_bound).contains(&b) {
                return Err(Error::OutOfBounds {
                    name: "beta",
                    value: b,
                    bound: cfg.beta_bound,
                });
            }
        }
        Ok(())
    }

    pub fn layers(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.gammas.iter().copied().zip(self.betas.iter().copied())
    }
}

fn apply_layer(
    state: &mut StateVector,
    layout: &RegisterLayout,
    inst: &KnapsackInstance,
    gamma: f64,
    beta: f64,
    m: u32,
) -> Result<()> {
    let params = derive_oracle_params(inst);
    apply_phase_separator(state, layout, inst, gamma)?;
    apply_mixer(state, layout, inst, &params, beta, m)
}

/// Gate-level evolution of the full register under `schedule`.
pub fn evolve(
    inst: &KnapsackInstance,
    layout: &RegisterLayout,
    schedule: &QaoaSchedule,
) -> Result<StateVector> {
    schedule.validate()?;
    let mut state = init_state(layout)?;
    for (gamma, beta) in schedule.layers() {
        apply_layer(&mut state, layout, inst, gamma, beta, schedule.m)?;
    }
    Ok(state)
}

/// `<H_c>` of the choice register; infeasible selections count with their raw
/// value.
pub fn expectation(state: &StateVector, layout: &RegisterLayout, inst: &KnapsackInstance) -> f64 {
    distribution_expectation(&choice_distribution(state, layout), inst)
}

fn distribution_expectation(dist: &ChoiceDistribution, inst: &KnapsackInstance) -> f64 {
    dist.iter()
        .map(|(x, p)| p * total_value(&x, inst).expect("distribution matches instance"))
        .sum()
}

/// Which simulator the parameter search evaluates candidates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Choice-register amplitudes with the oracle compiled to a truth table.
    #[default]
    Sector,
    /// Every gate on the full `N + q_w + 3` qubit register.
    Circuit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub budget: usize,
    pub seed: u64,
    /// Re-optimize all `2p` angles jointly after the layer-wise pass.
    pub joint: bool,
    pub backend: Backend,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            budget: DEFAULT_BUDGET,
            seed: 0,
            joint: false,
            backend: Backend::Sector,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimized {
    pub schedule: QaoaSchedule,
    pub expectation: f64,
    pub evaluations: usize,
}

/// Evaluates layers on one of the two backends.
enum Engine<'a> {
    Sector(SectorEvolver),
    Circuit {
        inst: &'a KnapsackInstance,
        layout: RegisterLayout,
    },
}

#[derive(Clone)]
enum EngineState {
    Sector(SectorState),
    Circuit(StateVector),
}

impl<'a> Engine<'a> {
    fn new(inst: &'a KnapsackInstance, backend: Backend) -> Result<Self> {
        Ok(match backend {
            Backend::Sector => Engine::Sector(SectorEvolver::compile(inst)?),
            Backend::Circuit => Engine::Circuit {
                inst,
                layout: RegisterLayout::for_instance(inst),
            },
        })
    }

    fn initial(&self) -> Result<EngineState> {
        Ok(match self {
            Engine::Sector(ev) => EngineState::Sector(ev.initial()),
            Engine::Circuit { layout, .. } => EngineState::Circuit(init_state(layout)?),
        })
    }

    fn layer(&self, state: &mut EngineState, gamma: f64, beta: f64, m: u32) -> Result<()> {
        match (self, state) {
            (Engine::Sector(ev), EngineState::Sector(s)) => ev.layer(s, gamma, beta, m),
            (Engine::Circuit { inst, layout }, EngineState::Circuit(s)) => {
                apply_layer(s, layout, inst, gamma, beta, m)
            }
            _ => unreachable!("engine and state variants always match"),
        }
    }

    fn expectation(&self, state: &EngineState) -> f64 {
        match (self, state) {
            (Engine::Sector(ev), EngineState::Sector(s)) => ev.expectation(s),
            (Engine::Circuit { inst, layout }, EngineState::Circuit(s)) => {
                expectation(s, layout, inst)
            }
            _ => unreachable!("engine and state variants always match"),
        }
    }

    fn objective(&self, base: &EngineState, layers: &[(f64, f64)], m: u32) -> f64 {
        let mut s = base.clone();
        for &(g, b) in layers {
            if self.layer(&mut s, g, b, m).is_err() {
                return f64::NEG_INFINITY;
            }
        }
        self.expectation(&s)
    }
}

fn bounds_for(m: u32) -> [Bound; 2] {
    [Bound::new(0.0, GAMMA_BOUND), Bound::new(0.0, m as f64 * PI)]
}

/// Layer-wise search: layer `k` is optimized with layers `1..k` frozen at
/// their optima. Each layer gets `budget` objective evaluations.
pub fn optimize(
    inst: &KnapsackInstance,
    p: usize,
    m: u32,
    opts: &OptimizeOptions,
) -> Result<Optimized> {
    if p == 0 {
        return Err(Error::InvalidSchedule("p must be >= 1".into()));
    }
    MixerConfig::new(m)?;
    if opts.budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let engine = Engine::new(inst, opts.backend)?;
    let mut base = engine.initial()?;
    let mut gammas = Vec::with_capacity(p);
    let mut betas = Vec::with_capacity(p);
    let mut evaluations = 0;
    let mut value = engine.expectation(&base);
    let bounds = bounds_for(m);

    for k in 0..p {
        let f = |x: &[f64]| engine.objective(&base, &[(x[0], x[1])], m);
        let seed = opts
            .seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(k as u64);
        let hints: Vec<Vec<f64>> = gammas
            .last()
            .zip(betas.last())
            .map(|(&g, &b)| vec![g, b])
            .into_iter()
            .collect();
        let r = maximize_from(&f, &bounds, opts.budget, seed, &hints)?;
        evaluations += r.evaluations;
        value = r.value;
        engine.layer(&mut base, r.x[0], r.x[1], m)?;
        gammas.push(r.x[0]);
        betas.push(r.x[1]);
    }

    if opts.joint {
        let start: Vec<f64> = gammas
            .iter()
            .zip(&betas)
            .flat_map(|(&g, &b)| [g, b])
            .collect();
        let joint_bounds: Vec<Bound> = (0..p).flat_map(|_| bounds).collect();
        let initial = engine.initial()?;
        let f = |x: &[f64]| {
            let layers: Vec<(f64, f64)> = x.chunks(2).map(|c| (c[0], c[1])).collect();
            engine.objective(&initial, &layers, m)
        };
        let step: Vec<f64> = joint_bounds.iter().map(|b| (b.hi - b.lo) / 20.0).collect();
        let r = refine(&f, &joint_bounds, &start, &step, opts.budget * p);
        evaluations += r.evaluations;
        if r.value > value {
            value = r.value;
            gammas = r.x.iter().step_by(2).copied().collect();
            betas = r.x.iter().skip(1).step_by(2).copied().collect();
        }
    }

    Ok(Optimized {
        schedule: QaoaSchedule::new(m, gammas, betas)?,
        expectation: value,
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub p: usize,
    pub m: u32,
    pub options: OptimizeOptions,
    /// `0` reports exact probabilities.
    pub shots: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionEntry {
    pub bits: BitString,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestFeasible {
    pub bits: BitString,
    pub value: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: KnapsackInstance,
    pub p: usize,
    pub m: u32,
    pub budget: usize,
    pub seed: u64,
    pub shots: u64,
    pub joint: bool,
    pub backend: Backend,
    pub schedule: QaoaSchedule,
    pub evaluations: usize,
    pub expectation: f64,
    pub best_feasible: BestFeasible,
    pub bks: BksSolution,
    /// `None` when the optimum is not positive.
    pub ratio_best: Option<f64>,
    pub ratio_expectation: Option<f64>,
    /// Sorted by descending probability, then bitstring.
    pub distribution: Vec<DistributionEntry>,
    pub wall_ms: u64,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Most probable feasible selection; near-ties go to the lexicographically
/// smaller bitstring.
pub fn best_feasible(dist: &ChoiceDistribution, inst: &KnapsackInstance) -> Result<BestFeasible> {
    let mut candidates: Vec<(BitString, f64)> = dist
        .iter()
        .filter(|(x, _)| is_feasible(x, inst).unwrap_or(false))
        .collect();
    candidates.sort_by(|a, b| a.0.cmp(&b.0));
    let mut best: Option<(BitString, f64)> = None;
    for (x, p) in candidates {
        match &best {
            Some((_, bp)) if p <= bp + PROB_TIE_EPS => {}
            _ => best = Some((x, p)),
        }
    }
    let (bits, probability) = best.expect("empty selection is always feasible");
    Ok(BestFeasible {
        value: total_value(&bits, inst)?,
        bits,
        probability,
    })
}

/// Draws `shots` samples from `dist` by sequential conditional binomials.
pub fn sample_distribution(dist: &ChoiceDistribution, shots: u64, seed: u64) -> ChoiceDistribution {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probs = dist.probabilities();
    let mut remaining_shots = shots;
    let mut remaining_mass = 1.0f64;
    let mut counts = vec![0u64; probs.len()];
    for (i, &p) in probs.iter().enumerate() {
        if remaining_shots == 0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = remaining_shots;
            break;
        }
        let q = if remaining_mass > 0.0 {
            (p / remaining_mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let k = Binomial::new(remaining_shots, q)
            .map(|b| b.sample(&mut rng))
            .unwrap_or(0);
        counts[i] = k;
        remaining_shots -= k;
        remaining_mass -= p;
    }
    ChoiceDistribution::from_probabilities(
        dist.n_items(),
        counts.iter().map(|&c| c as f64 / shots as f64).collect(),
    )
}

fn sorted_entries(dist: &ChoiceDistribution) -> Vec<DistributionEntry> {
    let mut entries: Vec<DistributionEntry> = dist
        .iter()
        .map(|(bits, probability)| DistributionEntry { bits, probability })
        .collect();
    entries.sort_by(|a, b| {
        b.probability
            .total_cmp(&a.probability)
            .then_with(|| a.bits.cmp(&b.bits))
    });
    entries
}

/// Optimize, evolve the full circuit at the optimum, and report.
pub fn run(inst: &KnapsackInstance, cfg: &RunConfig) -> Result<RunReport> {
    inst.validate()?;
    let bks = solve_dp(inst)?;
    let opt = optimize(inst, cfg.p, cfg.m, &cfg.options)?;
    let layout = RegisterLayout::for_instance(inst);
    let state = evolve(inst, &layout, &opt.schedule)?;
    let exact = choice_distribution(&state, &layout);
    let dist = if cfg.shots > 0 {
        sample_distribution(&exact, cfg.shots, cfg.options.seed)
    } else {
        exact
    };
    let expectation = distribution_expectation(&dist, inst);
    let best = best_feasible(&dist, inst)?;
    let ratio = |v: f64| approximation_ratio(v, bks.value).ok();
    Ok(RunReport {
        instance: inst.clone(),
        p: cfg.p,
        m: cfg.m,
        budget: cfg.options.budget,
        seed: cfg.options.seed,
        shots: cfg.shots,
        joint: cfg.options.joint,
        backend: cfg.options.backend,
        schedule: opt.schedule,
        evaluations: opt.evaluations,
        expectation,
        ratio_best: ratio(best.value),
        ratio_expectation: ratio(expectation),
        best_feasible: best,
        bks,
        distribution: sorted_entries(&dist),
        wall_ms: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stocks2() -> KnapsackInstance {
        KnapsackInstance::new(vec![0.2430, 0.2602], vec![1, 1], 1).unwrap()
    }

    #[test]
    fn schedule_validation() {
        assert!(QaoaSchedule::new(2, vec![0.1], vec![0.2]).is_ok());
        assert!(QaoaSchedule::new(2, vec![0.1], vec![]).is_err());
        assert!(QaoaSchedule::new(2, vec![GAMMA_BOUND], vec![0.2]).is_err());
        assert!(QaoaSchedule::new(2, vec![0.1], vec![2.0 * PI]).is_err());
        assert!(QaoaSchedule::new(0, vec![0.1], vec![0.1]).is_err());
    }

    #[test]
    fn empty_and_zero_schedules_give_uniform() {
        let inst = stocks2();
        let layout = RegisterLayout::for_instance(&inst);
        for sched in [
            QaoaSchedule::empty(1),
            QaoaSchedule::new(3, vec![0.0; 3], vec![0.0; 3]).unwrap(),
        ] {
            let s = evolve(&inst, &layout, &sched).unwrap();
            let d = choice_distribution(&s, &layout);
            for p in d.probabilities() {
                assert!((p - 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn expectation_examples() {
        let inst = stocks2();
        let layout = RegisterLayout::for_instance(&inst);
        let s = init_state(&layout).unwrap();
        assert!((expectation(&s, &layout, &inst) - 0.2516).abs() < 1e-12);

        let zero = StateVector::zero(layout.n_qubits()).unwrap();
        assert_eq!(expectation(&zero, &layout, &inst), 0.0);

        let bks = StateVector::basis(layout.n_qubits(), layout.embed_choice(0b10)).unwrap();
        assert_eq!(expectation(&bks, &layout, &inst), 0.2602);
    }

    #[test]
    fn optimize_beats_baseline_and_is_deterministic() {
        let inst =
            KnapsackInstance::new(vec![0.2430, 0.2602, 0.1047, 0.2430], vec![1; 4], 2).unwrap();
        let opts = OptimizeOptions {
            budget: 60,
            seed: 5,
            ..Default::default()
        };
        let a = optimize(&inst, 2, 2, &opts).unwrap();
        let b = optimize(&inst, 2, 2, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.evaluations, 120);
        let layout = RegisterLayout::for_instance(&inst);
        let baseline = expectation(&init_state(&layout).unwrap(), &layout, &inst);
        assert!(a.expectation >= baseline);
        assert!(matches!(
            optimize(&inst, 1, 1, &OptimizeOptions { budget: 0, ..opts }),
            Err(Error::ZeroBudget)
        ));
    }

    #[test]
    fn backends_agree() {
        let inst = KnapsackInstance::new(vec![0.2430, 0.2602, 0.2430], vec![1; 3], 1).unwrap();
        let layout = RegisterLayout::for_instance(&inst);
        let sched = QaoaSchedule::new(2, vec![1.3, 4.0], vec![0.7, 5.1]).unwrap();
        let full = choice_distribution(&evolve(&inst, &layout, &sched).unwrap(), &layout);
        let ev = SectorEvolver::compile(&inst).unwrap();
        let mut s = ev.initial();
        for (g, b) in sched.layers() {
            ev.layer(&mut s, g, b, 2).unwrap();
        }
        let reduced = ev.distribution(&s);
        for (a, b) in full.probabilities().iter().zip(reduced.probabilities()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn sampling_tracks_exact_probabilities() {
        let d = ChoiceDistribution::from_probabilities(2, vec![0.1, 0.2, 0.3, 0.4]);
        let s = sample_distribution(&d, 100_000, 9);
        assert!((s.total() - 1.0).abs() < 1e-12);
        for (a, b) in d.probabilities().iter().zip(s.probabilities()) {
            let sigma = (a * (1.0 - a) / 100_000.0).sqrt();
            assert!((a - b).abs() < 4.0 * sigma);
        }
        assert_eq!(
            sample_distribution(&d, 1000, 3),
            sample_distribution(&d, 1000, 3)
        );
    }

    #[test]
    fn best_feasible_breaks_ties_lexicographically() {
        let inst = KnapsackInstance::new(vec![0.2430, 0.2602, 0.2430], vec![1; 3], 1).unwrap();
        let mut probs = vec![0.0; 8];
        probs[0b001] = 0.3; // 100
        probs[0b100] = 0.3; // 001
        probs[0b111] = 0.4; // infeasible
        let d = ChoiceDistribution::from_probabilities(3, probs);
        let b = best_feasible(&d, &inst).unwrap();
        assert_eq!(b.bits.to_string(), "001");
    }
}
