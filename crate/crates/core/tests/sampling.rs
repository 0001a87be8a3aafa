#![allow(clippy::needless_range_loop)]

use delaycert_core::example::{analytic_constants, build_model, GeneticNetworkParams};
use delaycert_core::homcore::{estimate_eta, estimate_m, estimate_v_constants, SamplingSpec};

fn within_below(sampled: f64, analytic: f64) -> bool {
    sampled <= analytic * (1.0 + 1e-12) && sampled >= analytic * 0.95
}

fn within_above(sampled: f64, analytic: f64) -> bool {
    sampled >= analytic * (1.0 - 1e-12) && sampled <= analytic * 1.05
}

#[test]
fn sampled_constants_bracket_the_analytic_ones() {
    let p = GeneticNetworkParams::REFERENCE;
    let model = build_model(&p).unwrap();
    let a = analytic_constants(&p);
    let spec = SamplingSpec::default();
    let m = estimate_m(&model, &spec, 1.0).unwrap();
    let eta = estimate_eta(&model, &spec, 1.0).unwrap();
    let v = estimate_v_constants(&model, &spec, 1.0).unwrap().constants;
    for i in 0..2 {
        assert!(
            within_below(m.m[i], a.m[i]),
            "m[{i}] = {} vs {}",
            m.m[i],
            a.m[i]
        );
        assert!(
            within_below(v.beta[i], a.beta[i]),
            "beta[{i}] = {}",
            v.beta[i]
        );
        for j in 0..2 {
            assert!(
                within_below(eta.eta[i][j], a.eta[i][j]),
                "eta[{i}][{j}] = {}",
                eta.eta[i][j]
            );
            assert!(
                within_below(v.psi[i][j], a.psi[i][j]),
                "psi[{i}][{j}] = {}",
                v.psi[i][j]
            );
        }
    }
    assert!(within_below(v.alpha1, a.alpha1), "alpha1 = {}", v.alpha1);
    assert!(within_above(v.alpha0, a.alpha0), "alpha0 = {}", v.alpha0);
    assert!(within_above(v.w, a.w), "w = {}", v.w);
}

#[test]
fn growth_bounds_hold_pointwise_for_analytic_constants() {
    use rand::{Rng, SeedableRng};
    let p = GeneticNetworkParams::REFERENCE;
    let model = build_model(&p).unwrap();
    let a = analytic_constants(&p);
    let s = &model.structure;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut jac = [0.0; 4];
    for _ in 0..10_000 {
        let x = [
            10f64.powf(rng.gen_range(-4.0..1.0)) * rng.gen::<f64>(),
            10f64.powf(rng.gen_range(-4.0..1.0)) * rng.gen::<f64>(),
        ];
        let y = [
            10f64.powf(rng.gen_range(-4.0..1.0)) * rng.gen::<f64>(),
            10f64.powf(rng.gen_range(-4.0..1.0)) * rng.gen::<f64>(),
        ];
        let (nx, ny) = (s.norm(&x), s.norm(&y));
        let f = model.f(&x, &y);
        for i in 0..2 {
            let d = s.mu() + s.weight(i);
            assert!(f[i].abs() <= a.m[i] * (nx.powf(d) + ny.powf(d)) * (1.0 + 1e-12));
        }
        model.field.jacobian_x(&x, &y, &mut jac);
        for i in 0..2 {
            for j in 0..2 {
                let d = s.jacobian_degree(i, j);
                assert!(d >= 0.0);
                let bound = a.eta[i][j] * (nx.powf(d) + ny.powf(d));
                assert!(
                    jac[i * 2 + j].abs() <= bound * (1.0 + 1e-12) + 1e-300,
                    "({i},{j}) at {x:?} {y:?}"
                );
            }
        }
    }
}
