//! Text, JSON and CSV renderings of pipeline results.

use std::fmt::Write as _;

use delaycert_core::estimates::EstimateCertificate;
use delaycert_core::functional::Variant;
use delaycert_core::homcore::Provenance;

use crate::pipeline::{constant_rows, CertificateReport, CompareRun, ConstantsReport};

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Classical => "classical",
        Variant::Razumikhin => "razumikhin",
    }
}

fn provenance(p: &Provenance) -> String {
    match p {
        Provenance::Analytic => "analytic".into(),
        Provenance::Sampled { samples, safety } => {
            format!("sampled ({samples} points, safety {safety})")
        }
    }
}

pub fn constants_table(rep: &ConstantsReport) -> String {
    let bc = &rep.constants;
    let p = &bc.provenance;
    let mut out = String::new();
    let _ = writeln!(out, "{:<12} {:>24}  source", "constant", "value");
    for (name, value) in constant_rows(bc) {
        let family = name.split('[').next().unwrap_or(&name);
        let src = match family {
            "m" => &p.m,
            "eta" => &p.eta,
            "beta" => &p.beta,
            "psi" => &p.psi,
            "alpha0" => &p.alpha0,
            "alpha1" => &p.alpha1,
            _ => &p.w,
        };
        let _ = writeln!(out, "{name:<12} {value:>24e}  {}", provenance(src));
    }
    if let Some(cc) = &rep.cross_check {
        let _ = writeln!(out, "\nsampled (safety 1) vs analytic");
        let _ = writeln!(
            out,
            "{:<12} {:>24} {:>24} {:>12}",
            "constant", "analytic", "sampled", "rel. diff"
        );
        for e in cc {
            let rel = if e.analytic != 0.0 {
                (e.sampled - e.analytic) / e.analytic.abs()
            } else {
                e.sampled
            };
            let _ = writeln!(
                out,
                "{:<12} {:>24e} {:>24e} {:>12.3e}",
                e.name, e.analytic, e.sampled, rel
            );
        }
    }
    out
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn certificate_line(est: &EstimateCertificate, phi: f64) -> String {
    let mut s = format!(
        "{}: radius {:e}, delta {:e}, rho {:e}, c_hat1 {:e}, c_hat2 {:e}, admissible {}",
        variant_name(est.variant),
        est.radius,
        est.delta(),
        est.rho,
        est.envelope.c_hat1,
        est.envelope.c_hat2,
        est.admits(phi)
    );
    if let Some(a) = est.alpha {
        let _ = write!(s, ", alpha {a}");
    }
    if let Some(c) = &est.condition22 {
        let _ = write!(s, ", delay condition margin {:e}", c.margin);
    }
    s
}

pub fn compare_csv(run: &CompareRun) -> String {
    let cert: &CertificateReport = &run.certificates;
    let phi = cert.phi_hsup;
    let warnings: Vec<&str> = cert
        .certificates()
        .filter(|e| !e.admits(phi))
        .map(|e| variant_name(e.variant))
        .collect();
    let mut out = String::new();
    out.push_str("t,hom_norm,envelope_classical,envelope_razumikhin,v,u_classical,u_razumikhin");
    if !warnings.is_empty() {
        out.push_str(",warning");
    }
    out.push('\n');
    let uc = cert.classical.as_ref().and_then(|e| e.comparison(phi).ok());
    let ur = cert
        .razumikhin
        .as_ref()
        .and_then(|e| e.comparison(phi).ok());
    let warning = format!(
        "inadmissible initial function for {}",
        warnings.join(" and ")
    );
    let v = run.trajectory.v_series.as_deref().unwrap_or(&[]);
    for k in 0..run.trajectory.len() {
        let t = run.trajectory.time(k);
        let _ = write!(
            out,
            "{t:e},{:e},{},{},{},{},{}",
            run.norms.pointwise[k],
            opt(cert.classical.as_ref().map(|e| e.envelope_at(t, phi))),
            opt(cert.razumikhin.as_ref().map(|e| e.envelope_at(t, phi))),
            opt(v.get(k).copied()),
            opt(uc.map(|u| u.eval(t))),
            opt(ur.map(|u| u.eval(t))),
        );
        if !warnings.is_empty() {
            let _ = write!(out, ",{warning}");
        }
        out.push('\n');
    }
    out.push_str(&report_block(run));
    out
}

/// The `#`-prefixed trailer of the compare CSV.
pub fn report_block(run: &CompareRun) -> String {
    let cert = &run.certificates;
    let mut lines = vec![
        "report".to_string(),
        format!("pipeline: {:?}", cert.pipeline).to_lowercase(),
        format!("phi_hsup: {:e}", cert.phi_hsup),
        format!(
            "steps: {}, dt: {:e}, clamps: {}",
            run.trajectory.len() - 1,
            run.trajectory.dt,
            run.trajectory.clamp_count
        ),
    ];
    for est in cert.certificates() {
        lines.push(certificate_line(est, cert.phi_hsup));
    }
    for c in &run.checks {
        let name = variant_name(c.variant);
        let cr = &c.containment;
        lines.push(format!(
            "{name} containment: {}, checked {}, violations {}, max signed violation {:e}{}",
            if cr.contained() { "ok" } else { "VIOLATED" },
            cr.checked,
            cr.violations,
            cr.max_signed_violation,
            cr.first_violation_time
                .map(|t| format!(", first violation at t = {t:e}"))
                .unwrap_or_default()
        ));
        for b in c.functional.checks() {
            lines.push(format!("{name} {}", b.summary()));
        }
        if c.functional.outside_ball > 0 {
            lines.push(format!(
                "{name} segments outside the delta-ball: {}",
                c.functional.outside_ball
            ));
        }
        for b in c.comparison.checks() {
            lines.push(format!("{name} {}", b.summary()));
        }
    }
    if let Some(o) = &run.ordering {
        lines.push(o.summary());
    }
    lines.push(format!(
        "verdict: {}",
        if run.all_passed() {
            "all checks passed"
        } else {
            "some checks FAILED"
        }
    ));
    lines.iter().map(|l| format!("# {l}\n")).collect()
}

pub fn simulate_csv(
    traj: &delaycert_core::sim::Trajectory,
    norms: &delaycert_core::sim::HomNormSeries,
) -> String {
    let n = traj.state(0).len();
    let mut out = String::from("t");
    for i in 0..n {
        let _ = write!(out, ",x{}", i + 1);
    }
    out.push_str(",hom_norm,hom_sup\n");
    for k in 0..traj.len() {
        let _ = write!(out, "{:e}", traj.time(k));
        for x in traj.state(k) {
            let _ = write!(out, ",{x:e}");
        }
        let _ = writeln!(out, ",{:e},{:e}", norms.pointwise[k], norms.segment_sup[k]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{PipelineKind, RunConfig};
    use crate::pipeline::{compare, constants_report, prepare};

    fn short(pipeline: PipelineKind) -> RunConfig {
        let mut cfg = RunConfig::reference();
        cfg.pipeline = pipeline;
        cfg.numerics.steps_per_delay = 32;
        cfg.numerics.quad_panels = 8;
        cfg.numerics.horizon = Some(20.0);
        cfg
    }

    #[test]
    fn absent_variant_leaves_empty_fields() {
        let cfg = short(PipelineKind::Classical);
        let run = compare(&cfg, &prepare(&cfg).unwrap()).unwrap();
        let csv = compare_csv(&run);
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row.len(), 7);
        assert!(!row[2].is_empty() && row[3].is_empty() && row[6].is_empty());
        assert!(!csv.contains("razumikhin containment"));
        assert!(csv.lines().last().unwrap().starts_with("# verdict"));
    }

    #[test]
    fn trailer_lines_are_comments() {
        let cfg = short(PipelineKind::Both);
        let run = compare(&cfg, &prepare(&cfg).unwrap()).unwrap();
        let block = report_block(&run);
        assert!(block.lines().all(|l| l.starts_with("# ")));
        assert!(block.contains("# pipeline: both"));
        assert_eq!(compare_csv(&run), compare_csv(&run));
    }

    #[test]
    fn table_values_parse_back() {
        let cfg = RunConfig::reference();
        let rep = constants_report(&cfg, &prepare(&cfg).unwrap()).unwrap();
        let table = constants_table(&rep);
        let alpha1: f64 = table
            .lines()
            .find(|l| l.starts_with("alpha1"))
            .and_then(|l| l.split_whitespace().nth(1))
            .unwrap()
            .parse()
            .unwrap();
        assert_eq!(alpha1, rep.constants.alpha1);
        let json: serde_json::Value = serde_json::from_str(&to_json(&rep)).unwrap();
        assert_eq!(json["constants"]["w"], 34.0);
    }
}
