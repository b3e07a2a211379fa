mod common;

use pdolab::bell::{chsh_optimal, chsh_value, deterministic_strategies, monogamy_check, strategy_chsh, ChshResult, ChshSource, Pair, SettingsUsed};
use pdolab::linalg::{partial_trace, ComplexMatrix, C64};
use pdolab::pauli::{correlation_3x3, expand};
use rand::Rng;

use common::{grid_search_chsh, random_correlation_matrix, random_separable_matrix, rng};

#[test]
fn optimal_matches_grid_search() {
    let mut r = rng(2718);
    for _ in 0..50 {
        let t = random_correlation_matrix(&mut r);
        let closed = chsh_optimal(&t);
        let grid = grid_search_chsh(&t, 400);
        assert!((closed.value - grid).abs() < 1e-3, "closed {} grid {}", closed.value, grid);
        // The returned quartet attains the value.
        assert!((chsh_value(&t, &closed.settings) - closed.value).abs() < 1e-9);
    }
}

#[test]
fn separable_matrices_respect_classical_bound() {
    let mut r = rng(31);
    for _ in 0..100 {
        let t = random_separable_matrix(&mut r);
        assert!(chsh_optimal(&t).value <= 2.0 + 1e-9);
    }
}

#[test]
fn strategy_mixtures_stay_classical() {
    let strategies = deterministic_strategies();
    let mut r = rng(5);
    for _ in 0..10 {
        let w: Vec<f64> = (0..strategies.len()).map(|_| r.random_range(0.0..1.0)).collect();
        let total: f64 = w.iter().sum();
        let mixed: f64 = strategies.iter().zip(&w).map(|(s, w)| strategy_chsh(s) * w / total).sum();
        assert!(mixed.abs() <= 2.0 + 1e-12);
    }
}

fn random_state(r: &mut impl Rng, dim: usize) -> Vec<C64> {
    // Gaussian amplitudes give the unitarily invariant measure.
    let normal = rand_distr::StandardNormal;
    let mut psi: Vec<C64> = (0..dim).map(|_| C64::new(r.sample(normal), r.sample(normal))).collect();
    let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|z| *z /= n);
    psi
}

fn optimal_on(rho: &ComplexMatrix) -> f64 {
    chsh_optimal(&correlation_3x3(&expand(rho).unwrap(), 0, 1).unwrap()).value
}

fn result(value: f64) -> ChshResult {
    let t = [[0.0; 3]; 3];
    ChshResult {
        value,
        stderr: 0.0,
        settings: SettingsUsed::Optimal(chsh_optimal(&t).settings),
        source: ChshSource::Exact,
    }
}

#[test]
fn physical_states_obey_monogamy() {
    let mut r = rng(99);
    for _ in 0..100 {
        let psi = random_state(&mut r, 8);
        let rho = ComplexMatrix::projector(&psi);
        let ab = partial_trace(&rho, &[2, 2, 2], &[0, 1]).unwrap();
        let ac = partial_trace(&rho, &[2, 2, 2], &[0, 2]).unwrap();
        let bc = partial_trace(&rho, &[2, 2, 2], &[1, 2]).unwrap();
        let results = [(Pair(1, 2), ab), (Pair(1, 3), ac), (Pair(2, 3), bc)]
            .into_iter()
            .map(|(p, m)| (p, result(optimal_on(&m))))
            .collect();
        let report = monogamy_check(&results).unwrap();
        assert_eq!(report.sums.len(), 3);
        assert!(!report.violated(), "{report:?}");
    }
}
