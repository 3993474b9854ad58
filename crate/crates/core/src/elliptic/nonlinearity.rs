use std::fmt;
use std::sync::Arc;

use crate::{Error, Point, Result};

type NonlinearFn = dyn Fn(Point, f64) -> f64 + Send + Sync;

/// User-supplied `f(x, s)` with the bounds the solvers rely on.
#[derive(Clone)]
pub struct CustomNonlinearity {
    pub name: String,
    pub f: Arc<NonlinearFn>,
    /// `sup f`.
    pub upper: f64,
    /// `lim_{s -> 0+} f(x, s) / s`, when `f(., 0) = 0`.
    pub zeta: Option<Arc<dyn Fn(Point) -> f64 + Send + Sync>>,
    /// `f(x, s) <= 0` for `s >= mu`.
    pub mu: Option<f64>,
}

/// Right-hand side `f(x, s)` of `L u + f(x, u) = 0`.
#[derive(Clone)]
pub enum NonlinearitySpec {
    /// `f = beta`.
    Constant { beta: f64 },
    /// `f(s) = gamma s - s^p` (odd extension to `s < 0`), `p > 1`.
    Logistic { gamma: f64, p: f64 },
    Custom(CustomNonlinearity),
}

impl fmt::Debug for NonlinearitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonlinearitySpec::Constant { beta } => write!(f, "Constant({beta})"),
            NonlinearitySpec::Logistic { gamma, p } => write!(f, "Logistic({gamma}, {p})"),
            NonlinearitySpec::Custom(c) => write!(f, "Custom({})", c.name),
        }
    }
}

impl fmt::Display for NonlinearitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonlinearitySpec::Constant { beta } => write!(f, "constant {beta}"),
            NonlinearitySpec::Logistic { gamma, p } => write!(f, "logistic {gamma} {p}"),
            NonlinearitySpec::Custom(c) => write!(f, "{}", c.name),
        }
    }
}

impl NonlinearitySpec {
    pub fn constant(beta: f64) -> Self {
        NonlinearitySpec::Constant { beta }
    }

    pub fn logistic(gamma: f64, p: f64) -> Result<Self> {
        if !(p > 1.0) || !gamma.is_finite() {
            return Err(Error::invalid(format!(
                "logistic nonlinearity needs p > 1 and finite gamma (got gamma={gamma}, p={p})"
            )));
        }
        Ok(NonlinearitySpec::Logistic { gamma, p })
    }

    pub fn eval(&self, x: Point, s: f64) -> f64 {
        match self {
            NonlinearitySpec::Constant { beta } => *beta,
            NonlinearitySpec::Logistic { gamma, p } => gamma * s - s * s.abs().powf(p - 1.0),
            NonlinearitySpec::Custom(c) => (c.f)(x, s),
        }
    }

    /// `C = sup f`.
    pub fn upper_bound(&self) -> f64 {
        match self {
            NonlinearitySpec::Constant { beta } => *beta,
            NonlinearitySpec::Logistic { gamma, p } => {
                if *gamma <= 0.0 {
                    0.0
                } else {
                    // maximum of gamma s - s^p at s = (gamma / p)^(1/(p-1))
                    let s = (gamma / p).powf(1.0 / (p - 1.0));
                    gamma * s - s.powf(*p)
                }
            }
            NonlinearitySpec::Custom(c) => c.upper,
        }
    }

    pub fn vanishes_at_zero(&self) -> bool {
        match self {
            NonlinearitySpec::Constant { beta } => *beta == 0.0,
            NonlinearitySpec::Logistic { .. } => true,
            NonlinearitySpec::Custom(c) => c.zeta.is_some(),
        }
    }

    /// `zeta(x) = lim_{s -> 0+} f(x, s) / s` when `f(., 0) = 0`.
    pub fn zeta(&self, x: Point) -> Option<f64> {
        match self {
            NonlinearitySpec::Constant { beta } => (*beta == 0.0).then_some(0.0),
            NonlinearitySpec::Logistic { gamma, .. } => Some(*gamma),
            NonlinearitySpec::Custom(c) => c.zeta.as_ref().map(|z| z(x)),
        }
    }

    /// `mu` with `f <= 0` on `[mu, inf)`, when known.
    pub fn decay_threshold(&self) -> Option<f64> {
        match self {
            NonlinearitySpec::Constant { beta } => (*beta <= 0.0).then_some(0.0),
            NonlinearitySpec::Logistic { gamma, p } => Some(gamma.max(0.0).powf(1.0 / (p - 1.0))),
            NonlinearitySpec::Custom(c) => c.mu,
        }
    }

    /// Largest `|df/ds|` on `[lo, hi]`, from centred differences on a
    /// 1000-point grid at the given sample points.
    pub fn lipschitz_estimate(&self, lo: f64, hi: f64, xs: &[Point]) -> f64 {
        const SAMPLES: usize = 1000;
        let origin = [Point::new(0.0, 0.0)];
        let xs = if xs.is_empty() { &origin[..] } else { xs };
        let xs: Vec<Point> = match self {
            NonlinearitySpec::Custom(_) => xs.to_vec(),
            _ => vec![xs[0]],
        };
        let span = (hi - lo).max(1e-12);
        let d = 1e-6 * span.max(1.0);
        let mut k: f64 = 0.0;
        for x in &xs {
            for i in 0..SAMPLES {
                let s = lo + span * i as f64 / (SAMPLES - 1) as f64;
                let slope = (self.eval(*x, s + d) - self.eval(*x, s - d)) / (2.0 * d);
                k = k.max(slope.abs());
            }
        }
        k
    }

    /// Checks that `s -> f(x, s) / s` is nonincreasing on a log grid of
    /// `s` in `[1e-6, 1e3]` at the sample points.
    pub fn check_ratio_monotone(&self, xs: &[Point]) -> Result<()> {
        let origin = [Point::new(0.0, 0.0)];
        let xs = if xs.is_empty() { &origin[..] } else { xs };
        for x in xs {
            let mut prev = f64::INFINITY;
            for i in 0..=90 {
                let s = 10f64.powf(-6.0 + i as f64 / 10.0);
                let r = self.eval(*x, s) / s;
                if r > prev * (1.0 + 1e-12) + 1e-12 {
                    return Err(Error::Hypothesis(format!(
                        "f(x,s)/s increases near s = {s:.3e} at ({:.3}, {:.3})",
                        x.x, x.y
                    )));
                }
                prev = r;
            }
        }
        Ok(())
    }
}
