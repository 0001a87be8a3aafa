use delaycert_core::example::{build_model, GeneticNetworkParams};
use delaycert_core::history::HistoryFunction;
use delaycert_core::sim::{integrate, Trajectory};

fn run(n: usize, phi: &HistoryFunction, horizon: f64) -> Trajectory {
    let model = build_model(&GeneticNetworkParams::REFERENCE).unwrap();
    integrate(&model, phi, horizon, n).unwrap()
}

/// Max error against the reference on the nodes of the coarsest grid.
fn error(coarse: &Trajectory, reference: &Trajectory, coarsest: usize) -> f64 {
    let stride = coarse.steps_per_delay / coarsest;
    let rstride = reference.steps_per_delay / coarsest;
    (0..)
        .map(|k| k * stride)
        .take_while(|&k| k < coarse.len())
        .map(|k| {
            let a = coarse.state(k);
            let b = reference.state(k / stride * rstride);
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn factors(phi: &HistoryFunction, horizon: f64) -> Vec<f64> {
    let grids = [32, 64, 128, 256];
    let reference = run(4096, phi, horizon);
    let errs: Vec<f64> = grids
        .iter()
        .map(|&n| error(&run(n, phi, horizon), &reference, 32))
        .collect();
    errs.windows(2).map(|w| w[0] / w[1]).collect()
}

#[test]
fn order_at_least_three_for_constant_history() {
    let phi = HistoryFunction::constant(10.0, vec![0.01, 0.01]).unwrap();
    let f = factors(&phi, 30.0);
    assert!(f.iter().all(|&r| r >= 8.0), "{f:?}");
}

#[test]
fn order_at_least_three_for_smooth_history() {
    let values: Vec<Vec<f64>> = (0..=64)
        .map(|j| {
            let th = -10.0 + j as f64 * 10.0 / 64.0;
            vec![
                0.02 + 0.01 * (0.3 * th).sin(),
                0.015 + 0.005 * (0.2 * th).cos(),
            ]
        })
        .collect();
    let phi = HistoryFunction::uniform(10.0, values).unwrap();
    let f = factors(&phi, 30.0);
    assert!(f.iter().all(|&r| r >= 8.0), "{f:?}");
}
