use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::HistoryFunction;
use crate::model::SystemModel;

/// Split of the delay-free margin `w = w0 + w1 + h w2` used in the functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSplit {
    pub w0: f64,
    pub w1: f64,
    pub w2: f64,
}

impl WeightSplit {
    pub fn new(w: f64, h: f64, w1: f64, w2: f64) -> Result<Self> {
        let w0 = w - w1 - h * w2;
        if !(w1 > 0.0 && w2 > 0.0 && w0 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "weight split needs w0, w1, w2 > 0 (w = {w}, w1 = {w1}, w2 = {w2}, w0 = {w0})"
            )));
        }
        Ok(Self { w0, w1, w2 })
    }

    /// `w1 = f1 w` and `h w2 = f2 w`.
    pub fn from_fractions(w: f64, h: f64, f1: f64, f2: f64) -> Result<Self> {
        Self::new(w, h, f1 * w, f2 * w / h)
    }

    /// `w1 = w / 4`, `w2 = w / (4 h)`, hence `w0 = w / 2`.
    pub fn balanced(w: f64, h: f64) -> Result<Self> {
        Self::from_fractions(w, h, 0.25, 0.25)
    }

    pub fn total(&self, h: f64) -> f64 {
        self.w0 + self.w1 + h * self.w2
    }
}

/// Summands of the functional and the integrals the bounds are stated in.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FunctionalParts {
    /// `V(phi(0))`.
    pub i1: f64,
    /// `dV(phi(0)) . int f(phi(0), phi(theta)) dtheta`.
    pub i2: f64,
    /// `int (w1 + (h + theta) w2) |phi(theta)|^(gamma + mu) dtheta`.
    pub i3: f64,
    /// `|phi(0)|_{r,p}`.
    pub norm0: f64,
    /// `|phi(-h)|_{r,p}`.
    pub norm_delayed: f64,
    /// Largest nodal homogeneous norm of the segment.
    pub hsup: f64,
    /// `int |phi|^(gamma + mu)`.
    pub int_pow_gamma_mu: f64,
    /// `int |phi|^gamma`.
    pub int_pow_gamma: f64,
}

impl FunctionalParts {
    pub fn value(&self) -> f64 {
        self.i1 + self.i2 + self.i3
    }
}

fn simpson_weight(k: usize, panels: usize) -> f64 {
    if k == 0 || k == panels {
        1.0
    } else if k % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

/// Evaluates the functional from `panels + 1` uniform nodes on `[-h, 0]`
/// (`node(0)` at `-h`, `node(panels)` at `0`) with composite Simpson.
pub fn functional_from_nodes<'a>(
    node: impl Fn(usize) -> &'a [f64],
    panels: usize,
    model: &SystemModel,
    split: &WeightSplit,
) -> FunctionalParts {
    let s = &model.structure;
    let n = s.dim();
    let h = model.delay;
    let (gamma, mu) = (s.gamma(), s.mu());
    let step = h / panels as f64;
    let x0 = node(panels);
    let mut fsum = vec![0.0; n];
    let mut fbuf = vec![0.0; n];
    let (mut i3, mut ipgm, mut ipg, mut hsup) = (0.0, 0.0, 0.0, 0.0f64);
    for k in 0..=panels {
        let phi = node(k);
        let wk = simpson_weight(k, panels);
        model.field.eval(x0, phi, &mut fbuf);
        fsum.iter_mut().zip(&fbuf).for_each(|(a, b)| *a += wk * b);
        let nr = s.norm(phi);
        hsup = hsup.max(nr);
        let theta = -h + k as f64 * step;
        let pgm = nr.powf(gamma + mu);
        i3 += wk * (split.w1 + (h + theta) * split.w2) * pgm;
        ipgm += wk * pgm;
        ipg += wk * nr.powf(gamma);
    }
    let scale = step / 3.0;
    let grad = model.grad_v(x0);
    let i2 = grad.iter().zip(&fsum).map(|(g, f)| g * f).sum::<f64>() * scale;
    FunctionalParts {
        i1: model.lyapunov.value(x0),
        i2,
        i3: i3 * scale,
        norm0: s.norm(x0),
        norm_delayed: s.norm(node(0)),
        hsup,
        int_pow_gamma_mu: ipgm * scale,
        int_pow_gamma: ipg * scale,
    }
}

fn check_panels(panels: usize) -> Result<()> {
    if panels < 2 || !panels.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "Simpson quadrature needs an even number of panels >= 2, got {panels}"
        )));
    }
    Ok(())
}

/// All parts of the functional for an initial function.
pub fn functional_parts(
    phi: &HistoryFunction,
    model: &SystemModel,
    split: &WeightSplit,
    quad_panels: usize,
) -> Result<FunctionalParts> {
    check_panels(quad_panels)?;
    if phi.dim() != model.dim() || (phi.h - model.delay).abs() > 1e-12 * model.delay {
        return Err(Error::InvalidArgument(
            "history does not match the model (dimension or delay)".into(),
        ));
    }
    let nodes = phi.sample_uniform(quad_panels);
    Ok(functional_from_nodes(
        |k| &nodes[k],
        quad_panels,
        model,
        split,
    ))
}

/// `v(phi) = I1 + I2 + I3`.
pub fn eval_functional(
    phi: &HistoryFunction,
    model: &SystemModel,
    split: &WeightSplit,
    quad_panels: usize,
) -> Result<f64> {
    functional_parts(phi, model, split, quad_panels).map(|p| p.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example::{build_model, GeneticNetworkParams};
    use approx::assert_relative_eq;

    fn setup() -> (SystemModel, WeightSplit) {
        let model = build_model(&GeneticNetworkParams::REFERENCE).unwrap();
        let split = WeightSplit::balanced(34.0, 10.0).unwrap();
        (model, split)
    }

    #[test]
    fn split_identity() {
        for (w, h) in [(34.0, 10.0), (1.0, 0.3), (1e-3, 7.0)] {
            let sp = WeightSplit::balanced(w, h).unwrap();
            assert!((sp.total(h) - w).abs() <= 1e-14 * w.max(1.0));
            assert_relative_eq!(sp.w0, w / 2.0, max_relative = 1e-15);
        }
        assert!(WeightSplit::new(1.0, 1.0, 0.6, 0.6).is_err());
    }

    #[test]
    fn zero_history_gives_zero() {
        let (model, split) = setup();
        let phi = HistoryFunction::constant(10.0, vec![0.0, 0.0]).unwrap();
        assert_eq!(eval_functional(&phi, &model, &split, 64).unwrap(), 0.0);
    }

    #[test]
    fn constant_history_closed_form() {
        let (model, split) = setup();
        let c = [1e-3, 1e-3];
        let h = 10.0;
        let phi = HistoryFunction::constant(h, c.to_vec()).unwrap();
        let v = eval_functional(&phi, &model, &split, 64).unwrap();
        // V(c) + h dV(c).f(c, c) + (w1 h + w2 h^2 / 2) |c|^5, written out by hand.
        let (x1, x2) = (c[0], c[1]);
        let vc = x1.powi(4) + x2 * x2;
        let f1 = -9.0 * x1 * x1 + 0.25 * x2;
        let f2 = -18.0 * x2.powf(1.5) + 0.5 * x2 * x1;
        let i2 = h * (4.0 * x1.powi(3) * f1 + 2.0 * x2 * f2);
        let norm5 = x1.powi(5) + x2.powf(2.5);
        let i3 = (split.w1 * h + split.w2 * h * h / 2.0) * norm5;
        assert_relative_eq!(v, vc + i2 + i3, max_relative = 1e-13);
    }

    #[test]
    fn panel_doubling_converges() {
        let (model, split) = setup();
        let phi = HistoryFunction::uniform(10.0, vec![vec![0.2, 0.5], vec![0.6, 0.4]]).unwrap();
        let a = eval_functional(&phi, &model, &split, 256).unwrap();
        let b = eval_functional(&phi, &model, &split, 512).unwrap();
        assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()), "{a} vs {b}");
    }

    #[test]
    fn odd_panels_rejected() {
        let (model, split) = setup();
        let phi = HistoryFunction::constant(10.0, vec![0.0, 0.0]).unwrap();
        assert!(eval_functional(&phi, &model, &split, 63).is_err());
        assert!(eval_functional(&phi, &model, &split, 0).is_err());
    }
}
