use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;
use qwm_qaoa::fixtures::{fixture, fixtures};
use qwm_qaoa::mixer::apply_mixer;
use qwm_qaoa::oracle::{apply_oracle, weight_register_mass};
use qwm_qaoa::{
    derive_oracle_params, is_feasible, BitString, KnapsackInstance, RegisterLayout, StateVector,
};

fn feasible(inst: &KnapsackInstance, x: usize) -> bool {
    is_feasible(&BitString::from_index(x, inst.len()), inst).unwrap()
}

/// Walk generator: unit hops between feasible Hamming neighbours.
fn walk_matrix(inst: &KnapsackInstance) -> DMatrix<f64> {
    let n = inst.len();
    let dim = 1 << n;
    DMatrix::from_fn(dim, dim, |x, y| {
        let hop = (x ^ y).count_ones() == 1;
        if hop && feasible(inst, x) && feasible(inst, y) {
            1.0
        } else {
            0.0
        }
    })
}

fn exact_walk(b: &DMatrix<f64>, beta: f64) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(b.clone());
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let phases = DMatrix::from_diagonal(
        &eig.eigenvalues
            .map(|l| Complex64::from_polar(1.0, -beta * l)),
    );
    &v * phases * v.transpose()
}

/// The gate-level mixer as a matrix on the choice register.
fn circuit_walk(inst: &KnapsackInstance, beta: f64, m: u32) -> DMatrix<Complex64> {
    let layout = RegisterLayout::for_instance(inst);
    let params = derive_oracle_params(inst);
    let dim = 1 << inst.len();
    let mut out = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        let mut s = StateVector::basis(layout.n_qubits(), layout.embed_choice(x)).unwrap();
        apply_mixer(&mut s, &layout, inst, &params, beta, m).unwrap();
        for y in 0..dim {
            out[(y, x)] = s.amplitudes()[layout.embed_choice(y)];
        }
        let work = s.mass_where(|i| i & layout.work_mask() != 0);
        assert!(work < 1e-10, "ancilla mass {work}");
    }
    out
}

#[test]
fn walk_generator_is_symmetric_hamming_graph() {
    for f in fixtures() {
        let b = walk_matrix(&f.instance());
        assert_eq!(b, b.transpose(), "{}", f.name);
    }
    let open = KnapsackInstance::new(vec![0.1; 4], vec![1; 4], 4).unwrap();
    let b = walk_matrix(&open);
    for x in 0..16usize {
        for y in 0..16usize {
            assert_eq!(b[(x, y)] == 1.0, (x ^ y).count_ones() == 1);
        }
    }
}

#[test]
fn trotter_error_shrinks() {
    let inst = fixture("stocks3").unwrap().instance();
    let exact = exact_walk(&walk_matrix(&inst), 1.0);
    let errors: Vec<f64> = [1, 2, 4, 8]
        .iter()
        .map(|&m| {
            let diff = circuit_walk(&inst, 1.0, m) - &exact;
            diff.singular_values().max()
        })
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(errors[3] < 0.1, "{errors:?}");
}

#[test]
fn oracle_truth_tables() {
    for f in fixtures() {
        let inst = f.instance();
        let layout = RegisterLayout::for_instance(&inst);
        let params = derive_oracle_params(&inst);
        for x in 0..1usize << inst.len() {
            let mut s = StateVector::basis(layout.n_qubits(), layout.embed_choice(x)).unwrap();
            apply_oracle(&mut s, &layout, &inst, &params, layout.ancilla_fi).unwrap();
            let flag = usize::from(feasible(&inst, x)) << layout.ancilla_fi;
            let amp = s.amplitudes()[layout.embed_choice(x) | flag];
            assert!(
                (amp - Complex64::new(1.0, 0.0)).norm() < 1e-9,
                "{} x={x}",
                f.name
            );
            assert!(weight_register_mass(&s, &layout) < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn oracle_is_linear(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8), cap in 0u64..=3) {
        let inst = KnapsackInstance::new(vec![0.2, 0.3, 0.1], vec![1, 2, 1], cap).unwrap();
        let layout = RegisterLayout::for_instance(&inst);
        let params = derive_oracle_params(&inst);
        let dim = 1 << layout.n_qubits();
        let coeffs: Vec<Complex64> = raw.iter().map(|&(a, b)| Complex64::new(a, b)).collect();

        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        for (x, c) in coeffs.iter().enumerate() {
            amps[layout.embed_choice(x)] = *c;
        }
        let mut whole = StateVector::from_amplitudes(amps).unwrap();
        apply_oracle(&mut whole, &layout, &inst, &params, layout.ancilla_fn).unwrap();

        let mut summed = vec![Complex64::new(0.0, 0.0); dim];
        for (x, c) in coeffs.iter().enumerate() {
            let mut s = StateVector::basis(layout.n_qubits(), layout.embed_choice(x)).unwrap();
            apply_oracle(&mut s, &layout, &inst, &params, layout.ancilla_fn).unwrap();
            for (acc, a) in summed.iter_mut().zip(s.amplitudes()) {
                *acc += c * a;
            }
        }
        for (a, b) in whole.amplitudes().iter().zip(&summed) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn mixer_keeps_feasible_support(beta in 0.0f64..3.0, m in 1u32..=3, seed in any::<u64>()) {
        let inst = fixture("stocks4").unwrap().instance();
        let layout = RegisterLayout::for_instance(&inst);
        let params = derive_oracle_params(&inst);
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << layout.n_qubits()];
        let mut h = seed;
        for x in (0..16).filter(|&x| feasible(&inst, x)) {
            h = h.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            amps[layout.embed_choice(x)] = Complex64::new((h >> 40) as f64 / 16777216.0 + 0.01, (h & 0xff) as f64 / 256.0);
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps = amps.into_iter().map(|a| a / norm).collect();
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        apply_mixer(&mut s, &layout, &inst, &params, beta, m).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        prop_assert!(s.mass_where(|i| i & layout.work_mask() != 0) < 1e-10);
        prop_assert!(s.mass_where(|i| !feasible(&inst, layout.choice_index(i))) < 1e-10);
    }
}
