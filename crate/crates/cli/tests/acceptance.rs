//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use delaycert_cli::pipeline::{self, CompareRun};
use delaycert_cli::RunConfig;
use delaycert_core::estimates::{radius_residual, ComparisonSolution, EstimateCertificate};
use delaycert_core::example::{
    analytic_constants, build_example, build_model, reference_scenario, GeneticNetworkParams,
};
use delaycert_core::functional::Variant;
use delaycert_core::history::HistoryFunction;
use delaycert_core::homcore::{check_homogeneity, estimate_all, SamplingSpec};
use delaycert_core::sim::{check_envelope, hom_norm_series, integrate, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * b.abs().max(f64::MIN_POSITIVE)
}

fn exact_constants() -> Outcome {
    let (_, c) = build_example(&GeneticNetworkParams::REFERENCE).map_err(|e| e.to_string())?;
    let expected = [
        ("m[1]", c.m[0], 9.0),
        ("m[2]", c.m[1], 18.5),
        ("eta[1][1]", c.eta[0][0], 18.0),
        ("eta[1][2]", c.eta[0][1], 0.0),
        ("eta[2][1]", c.eta[1][0], 0.0),
        ("eta[2][2]", c.eta[1][1], 27.0),
        ("beta[1]", c.beta[0], 4.0),
        ("beta[2]", c.beta[1], 2.0),
        ("psi[1][1]", c.psi[0][0], 12.0),
        ("psi[1][2]", c.psi[0][1], 0.0),
        ("psi[2][1]", c.psi[1][0], 0.0),
        ("psi[2][2]", c.psi[1][1], 2.0),
        ("alpha0", c.alpha0, 1.0),
        ("alpha1", c.alpha1, 2f64.powf(0.2)),
        ("w", c.w, 34.0),
    ];
    for (name, got, want) in expected {
        ensure((got - want).abs() <= 1e-12 * want.abs().max(1.0), || {
            format!("{name} = {got}, expected {want}")
        })?;
    }
    Ok(format!("{} constants", expected.len()))
}

fn sampled_vs_analytic() -> Outcome {
    let p = GeneticNetworkParams::REFERENCE;
    let model = build_model(&p).map_err(|e| e.to_string())?;
    let a = analytic_constants(&p);
    let s = estimate_all(&model, &SamplingSpec::default(), 1.0).map_err(|e| e.to_string())?;
    let below = |x: f64, y: f64| x <= y * (1.0 + 1e-12) && x >= 0.95 * y;
    let above = |x: f64, y: f64| x >= y * (1.0 - 1e-12) && x <= 1.05 * y;
    let mut worst = 0.0f64;
    let mut max_type = vec![("alpha1".to_string(), s.alpha1, a.alpha1)];
    for i in 0..2 {
        max_type.push((format!("m[{i}]"), s.m[i], a.m[i]));
        max_type.push((format!("beta[{i}]"), s.beta[i], a.beta[i]));
        for j in 0..2 {
            max_type.push((format!("eta[{i}][{j}]"), s.eta[i][j], a.eta[i][j]));
            max_type.push((format!("psi[{i}][{j}]"), s.psi[i][j], a.psi[i][j]));
        }
    }
    for (name, x, y) in max_type {
        ensure(below(x, y), || {
            format!("{name}: sampled {x} vs analytic {y}")
        })?;
        if y != 0.0 {
            worst = worst.max((x - y).abs() / y);
        }
    }
    for (name, x, y) in [("alpha0", s.alpha0, a.alpha0), ("w", s.w, a.w)] {
        ensure(above(x, y), || {
            format!("{name}: sampled {x} vs analytic {y}")
        })?;
        worst = worst.max((x - y).abs() / y);
    }
    Ok(format!("largest relative gap {worst:.3e}"))
}

fn homogeneity() -> Outcome {
    let model = build_model(&GeneticNetworkParams::REFERENCE).map_err(|e| e.to_string())?;
    let s = &model.structure;
    let rep = check_homogeneity(&model, 1000, 1e-10, 11);
    ensure(rep.passed, || {
        format!(
            "degree identities: worst residual {:e}",
            rep.worst_relative_residual
        )
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let eps = 10f64.powf(rng.gen_range(-3.0..3.0));
        let lhs = s.norm(&s.dilate(&x, eps).map_err(|e| e.to_string())?);
        let rhs = eps * s.norm(&x);
        worst = worst.max((lhs - rhs).abs() / rhs);
    }
    ensure(worst <= 1e-10, || {
        format!("norm degree: worst residual {worst:e}")
    })?;
    Ok(format!(
        "{} field/V checks worst {:.2e}, 1000 norm checks worst {worst:.2e}",
        rep.checks, rep.worst_relative_residual
    ))
}

fn certificates() -> Result<(EstimateCertificate, EstimateCertificate), String> {
    let cfg = RunConfig::reference();
    let prepared = pipeline::prepare(&cfg).map_err(|e| e.to_string())?;
    let rep = pipeline::certify(&cfg, &prepared).map_err(|e| e.to_string())?;
    Ok((rep.classical.unwrap(), rep.razumikhin.unwrap()))
}

fn root_residuals() -> Outcome {
    let (cl, rz) = certificates()?;
    let mut out = Vec::new();
    for est in [&cl, &rz] {
        let f = &est.functional;
        let s = &f.structure;
        let a = match est.variant {
            Variant::Classical => f.lower.a1,
            Variant::Razumikhin => f.set_bound.ok_or("missing set bound")?.a1_tilde,
        };
        let res = radius_residual(
            f.constants.alpha1,
            f.upper.b3,
            a,
            f.delta,
            s.gamma(),
            s.mu(),
            est.radius,
        );
        ensure(res <= 1e-12, || {
            format!("{:?} radius residual {res:e}", est.variant)
        })?;
        let identity = f.delta / est.radius;
        ensure(close(est.envelope.c_hat1, identity, 1e-10), || {
            format!(
                "{:?}: c_hat1 {} vs delta/radius {identity}",
                est.variant, est.envelope.c_hat1
            )
        })?;
        out.push(format!("{:?} residual {res:.1e}", est.variant).to_lowercase());
    }
    ensure(rz.radius >= cl.radius, || {
        "razumikhin radius below classical".into()
    })?;
    Ok(out.join(", "))
}

fn rk4(sol: &ComparisonSolution, t_end: f64, dt: f64) -> Vec<(f64, f64)> {
    let mut u = sol.u0;
    let mut out = vec![(0.0, u)];
    let steps = (t_end / dt).round() as usize;
    for k in 0..steps {
        let k1 = sol.rhs(u);
        let k2 = sol.rhs(u + 0.5 * dt * k1);
        let k3 = sol.rhs(u + 0.5 * dt * k2);
        let k4 = sol.rhs(u + dt * k3);
        u += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push(((k + 1) as f64 * dt, u));
    }
    out
}

fn comparison_oracle() -> Outcome {
    let s = reference_scenario();
    let (model, _) = build_example(&s.params).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (u0, rate) in [(1.0, 0.5), (0.1, 2.0), (3.0, 0.05)] {
        let sol = ComparisonSolution::new(u0, rate, &model.structure).map_err(|e| e.to_string())?;
        for (t, u) in rk4(&sol, 10.0, 1e-3) {
            let rel = (u - sol.eval(t)).abs() / sol.eval(t);
            worst = worst.max(rel);
            ensure(rel <= 1e-8, || {
                format!("(u0, rate) = ({u0}, {rate}), t = {t}: relative error {rel:e}")
            })?;
        }
    }
    Ok(format!("worst relative error {worst:.2e}"))
}

fn convergence() -> Outcome {
    let model = build_model(&GeneticNetworkParams::REFERENCE).map_err(|e| e.to_string())?;
    let phi = HistoryFunction::constant(10.0, vec![0.01, 0.01]).map_err(|e| e.to_string())?;
    let run = |n: usize| integrate(&model, &phi, 30.0, n).map_err(|e| e.to_string());
    let reference = run(4096)?;
    let error = |t: &Trajectory| {
        let stride = t.steps_per_delay / 32;
        let rstride = reference.steps_per_delay / 32;
        (0..t.len())
            .step_by(stride)
            .map(|k| {
                let b = reference.state(k / stride * rstride);
                t.state(k)
                    .iter()
                    .zip(b)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    };
    let errs: Vec<f64> = [32, 64, 128, 256]
        .iter()
        .map(|&n| run(n).map(|t| error(&t)))
        .collect::<Result<_, _>>()?;
    let factors: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    ensure(factors.iter().all(|&r| r >= 8.0), || {
        format!("factors {factors:?}")
    })?;
    Ok(format!(
        "factors {}",
        factors
            .iter()
            .map(|f| format!("{f:.2}"))
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

fn reference_run() -> Result<CompareRun, String> {
    let cfg = RunConfig::reference();
    let prepared = pipeline::prepare(&cfg).map_err(|e| e.to_string())?;
    pipeline::compare(&cfg, &prepared).map_err(|e| e.to_string())
}

fn containment() -> Outcome {
    let run = reference_run()?;
    ensure(run.trajectory.horizon() == 1000.0, || {
        format!("horizon {}", run.trajectory.horizon())
    })?;
    let phi = run.certificates.phi_hsup;
    let mut out = Vec::new();
    for est in run.certificates.certificates() {
        ensure(est.admits(phi), || {
            format!("{:?} does not admit the initial function", est.variant)
        })?;
        for atol in [1e-9, 0.0] {
            let rep = check_envelope(&run.trajectory, &est.envelope, phi, atol);
            ensure(rep.violations == 0, || {
                format!(
                    "{:?} envelope: {} violations at atol {atol:e}",
                    est.variant, rep.violations
                )
            })?;
        }
        let rep = check_envelope(&run.trajectory, &est.envelope, phi, 0.0);
        out.push(
            format!("{:?} margin {:.3e}", est.variant, rep.max_signed_violation).to_lowercase(),
        );
    }
    let ordering = run.ordering.as_ref().ok_or("no ordering check")?;
    ensure(
        ordering.applicable && ordering.checked > 0 && ordering.passed(),
        || ordering.summary(),
    )?;
    out.push(format!(
        "{} nodes, razumikhin below classical everywhere",
        run.trajectory.len()
    ));
    Ok(out.join(", "))
}

fn functional_suite() -> Outcome {
    let run = reference_run()?;
    let mut checked = 0;
    for vc in &run.checks {
        ensure(vc.admissible, || format!("{:?} not admissible", vc.variant))?;
        let all = vc
            .functional
            .checks()
            .into_iter()
            .chain(vc.comparison.checks());
        for c in all {
            ensure(c.passed(), || format!("{:?} {}", vc.variant, c.summary()))?;
            if c.applicable {
                ensure(c.checked > 0, || {
                    format!("{:?} {} checked nothing", vc.variant, c.name)
                })?;
                checked += 1;
            }
        }
    }
    let rz = run
        .variant(Variant::Razumikhin)
        .ok_or("no razumikhin checks")?;
    ensure(
        rz.functional.set_lower.applicable && rz.comparison.ratio.applicable,
        || "set bound or ratio check not applicable".into(),
    )?;
    let cl = run
        .variant(Variant::Classical)
        .ok_or("no classical checks")?;
    ensure(cl.functional.lower.applicable, || {
        "classical lower bound not applicable".into()
    })?;
    Ok(format!("{checked} applicable checks passed"))
}

fn random_histories() -> Outcome {
    let cfg = RunConfig::reference();
    let prepared = pipeline::prepare(&cfg).map_err(|e| e.to_string())?;
    let rz = pipeline::certify(&cfg, &prepared)
        .map_err(|e| e.to_string())?
        .razumikhin
        .ok_or("no razumikhin certificate")?;
    let model = &prepared.model;
    let s = &model.structure;
    let h = model.delay;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut peak = 0.0f64;
    for trial in 0..20 {
        let nodes = rng.gen_range(2..=9);
        let values: Vec<Vec<f64>> = (0..nodes)
            .map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()])
            .collect();
        let mut phi = HistoryFunction::uniform(h, values).map_err(|e| e.to_string())?;
        let target = rz.radius * rng.gen_range(0.05..0.99);
        // Interpolation does not commute with the dilation, so rescale until below the target.
        for _ in 0..50 {
            let norm = phi.hsup_norm(s);
            if norm <= target {
                break;
            }
            phi = phi
                .dilated(s, target / norm * 0.999)
                .map_err(|e| e.to_string())?;
        }
        let norm = phi.hsup_norm(s);
        ensure(rz.admits(norm), || {
            format!("trial {trial}: initial function not admissible ({norm:e})")
        })?;
        let traj =
            integrate(model, &phi, 100.0 * h, 128).map_err(|e| format!("trial {trial}: {e}"))?;
        let sup = hom_norm_series(&traj, s)
            .pointwise
            .into_iter()
            .fold(0.0, f64::max);
        ensure(sup <= rz.delta(), || {
            format!(
                "trial {trial}: hom-norm {sup:e} exceeds delta {:e}",
                rz.delta()
            )
        })?;
        peak = peak.max(sup / rz.delta());
    }
    Ok(format!("largest hom-norm is {peak:.3} delta"))
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("delaycert-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut cfg = RunConfig::reference();
    if let delaycert_cli::config::SystemConfig::GeneticNetwork { constants, .. } = &mut cfg.system {
        *constants = delaycert_cli::config::ConstantSource::Sampled;
    }
    let config = dir.join("sampled.toml");
    std::fs::write(&config, cfg.to_toml()).map_err(|e| e.to_string())?;
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let out = dir.join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_delaycert"))
            .args(["compare", "--seed", "5", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("compare exited with {status}"))?;
        std::fs::read(&out).map_err(|e| e.to_string())
    };
    let (a, b) = (run("a.csv")?, run("b.csv")?);
    let _ = std::fs::remove_dir_all(&dir);
    ensure(a == b, || "outputs differ".into())?;
    Ok(format!("{} identical bytes", a.len()))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "closed-form example constants",
            limit: Duration::from_millis(1),
            run: exact_constants,
        },
        Criterion {
            id: 2,
            name: "sampled constants bracket analytic ones",
            limit: Duration::from_secs(30),
            run: sampled_vs_analytic,
        },
        Criterion {
            id: 3,
            name: "homogeneity identities",
            limit: Duration::MAX,
            run: homogeneity,
        },
        Criterion {
            id: 4,
            name: "radius roots and envelope identity",
            limit: Duration::MAX,
            run: root_residuals,
        },
        Criterion {
            id: 5,
            name: "comparison solution vs RK4",
            limit: Duration::from_secs(1),
            run: comparison_oracle,
        },
        Criterion {
            id: 6,
            name: "integrator convergence order",
            limit: Duration::from_secs(10),
            run: convergence,
        },
        Criterion {
            id: 7,
            name: "reference scenario containment and ordering",
            limit: Duration::from_secs(60),
            run: containment,
        },
        Criterion {
            id: 8,
            name: "functional and comparison bounds along the solution",
            limit: Duration::from_secs(120),
            run: functional_suite,
        },
        Criterion {
            id: 9,
            name: "random admissible initial functions stay in the ball",
            limit: Duration::from_secs(120),
            run: random_histories,
        },
        Criterion {
            id: 10,
            name: "byte-identical compare output",
            limit: Duration::MAX,
            run: determinism,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.limit => {
                Err(format!("{detail}; took longer than {:?}", c.limit))
            }
            other => other,
        };
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} {:>2} {} [{:.3} s]: {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
