use delaycert_core::estimates::{search_alpha_rho, EstimateCertificate, SearchGrid};
use delaycert_core::example::{build_example, reference_scenario};
use delaycert_core::functional::FunctionalCertificate;
use delaycert_core::sim::{check_envelope, hom_norm_series, integrate, Envelope};

fn certificates() -> (EstimateCertificate, EstimateCertificate) {
    let sc = reference_scenario();
    let (model, bc) = build_example(&sc.params).unwrap();
    let out = search_alpha_rho(&bc, &model.structure, sc.params.h, &SearchGrid::default()).unwrap();
    let f = FunctionalCertificate::classical(
        &bc,
        &model.structure,
        sc.params.h,
        out.best.functional.split,
    )
    .unwrap();
    (EstimateCertificate::classical(f).unwrap(), out.best)
}

#[test]
fn scenario_is_admissible_and_strictly_decreasing() {
    let sc = reference_scenario();
    let (model, _) = build_example(&sc.params).unwrap();
    let s = &model.structure;
    let phi = sc.history.hsup_norm(s);
    let expected = ((5e-11f64).powi(5) + (5e-11f64).powf(2.5)).powf(0.2);
    assert!((phi - expected).abs() <= 1e-15 * expected);
    let (cl, rz) = certificates();
    assert!(rz.admits(phi) && cl.admits(phi));
    assert!(rz.radius >= cl.radius);

    let traj = integrate(&model, &sc.history, sc.horizon, 256).unwrap();
    assert_eq!(traj.clamp_count, 0);
    let norms = hom_norm_series(&traj, s);
    assert!(norms.pointwise.windows(2).all(|w| w[1] < w[0]));
    assert!(norms.segment_sup.iter().all(|&n| n <= rz.delta()));
}

#[test]
fn halved_constant_is_caught_near_the_start() {
    let sc = reference_scenario();
    let (model, _) = build_example(&sc.params).unwrap();
    let phi = sc.history.hsup_norm(&model.structure);
    let traj = integrate(&model, &sc.history, 100.0, 64).unwrap();
    let (cl, rz) = certificates();
    assert!(check_envelope(&traj, &rz.envelope, phi, 0.0).contained());
    let halved = Envelope {
        c_hat1: 0.5 * rz.envelope.c_hat1,
        ..rz.envelope
    };
    let rep = check_envelope(&traj, &halved, phi, 1e-12);
    assert_eq!(rep.first_violation_time, Some(0.0));
    // The classical constant is large enough that half of it still bounds this run.
    assert!(0.5 * cl.envelope.c_hat1 > 1.0);
}
