use rabi_aa::search::{
    find_omega1_zeros, objective_worst_case, search, Alpha2Candidates, Objective, SearchSpec,
};
use rabi_aa::spectrum::t0_tilde;
use rabi_aa::ModelParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut r = vec![0.0; v.len()];
    for (rank, &i) in idx.iter().enumerate() {
        r[i] = rank as f64;
    }
    r
}

fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mean = (n - 1.0) / 2.0;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mean) * (b - mean)).sum();
    let var: f64 = rx.iter().map(|a| (a - mean).powi(2)).sum();
    cov / var
}

#[test]
fn preservation_points_are_small() {
    let lower = objective_worst_case(&ModelParams::new(0.5599, -0.6, 0.24).unwrap(), 55.0, 500.0, 2000).unwrap();
    assert!((0.002..=0.01).contains(&lower), "{lower}");
    let upper = objective_worst_case(&ModelParams::new(0.5067, -0.8, 0.22).unwrap(), 36.0, 500.0, 2000).unwrap();
    let control = objective_worst_case(&ModelParams::new(0.2, 0.0, 0.25).unwrap(), 30.0, 500.0, 2000).unwrap();
    assert!((upper - 0.006_324_386_096_736).abs() < 1e-12, "{upper}");
    assert!(control >= 10.0 * lower.max(upper), "{control} vs {lower}, {upper}");
}

#[test]
fn known_point_ranks_first() {
    let spec = SearchSpec {
        beta_grid: vec![0.2, 0.5599],
        a_grid: vec![-0.6, 0.0, 0.6],
        r_grid: vec![0.24],
        alpha2: Alpha2Candidates::List(vec![55.0]),
        tau_horizon: 500.0,
        tau_samples: 2000,
        objective: Objective::WorstCaseT,
    };
    let best = &search(&spec).unwrap()[0];
    assert_eq!((best.params.beta, best.params.a), (0.5599, -0.6));
    assert!(best.score <= 0.01);
}

#[test]
fn negative_level_parameter_is_favourable() {
    let spec = |a_grid: Vec<f64>| SearchSpec {
        beta_grid: vec![0.55, 0.5599, 0.57],
        a_grid,
        r_grid: vec![0.24],
        alpha2: Alpha2Candidates::List(vec![55.0]),
        tau_horizon: 500.0,
        tau_samples: 2000,
        objective: Objective::WorstCaseT,
    };
    let neg = search(&spec(vec![-0.2, -0.4, -0.6])).unwrap()[0].score;
    let pos = search(&spec(vec![0.2, 0.4, 0.6])).unwrap()[0].score;
    assert!(pos > neg, "{pos} vs {neg}");
}

#[test]
fn detuning_at_zeros_anticorrelates_with_transition() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut t0sq, mut score) = (Vec::new(), Vec::new());
    while t0sq.len() < 100 {
        let p = ModelParams::new(rng.gen_range(0.4..0.65), rng.gen_range(-1.0..1.0), rng.gen_range(0.18..0.28))
            .unwrap();
        let zeros = find_omega1_zeros(&p, 20..=80);
        if zeros.is_empty() {
            continue;
        }
        let n = zeros[rng.gen_range(0..zeros.len())].candidate();
        t0sq.push(t0_tilde(&p, n).powi(2));
        score.push(objective_worst_case(&p, n as f64, 500.0, 1000).unwrap());
    }
    let rho = spearman(&t0sq, &score);
    assert!(rho <= -0.3, "{rho}");
}
