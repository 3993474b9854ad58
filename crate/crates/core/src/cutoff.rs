//! Cutoff profiles `g` with `g = 0` on `(-inf, 1]`, `g = 1` on `[2, inf)`
//! and `g' >= 0`.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::quad;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutoffVariant {
    /// Quintic smooth step `6t^5 - 15t^4 + 10t^3`, `t = s - 1`. Only C^2.
    #[default]
    Smoothstep,
    /// `kappa * int_1^s theta`, with
    /// `theta(s) = exp(-1/(s-1) - 1/(2-s)) (sin(1/(s-1)^2) + 1)`.
    Oscillatory,
}

const TABLE_INTERVALS: usize = 4096;

struct OscTable {
    /// `cumulative[k] = int_1^{1 + k/N} theta`.
    cumulative: Vec<f64>,
    kappa: f64,
}

fn osc_table() -> Arc<OscTable> {
    static TABLE: OnceLock<Arc<OscTable>> = OnceLock::new();
    TABLE
        .get_or_init(|| {
            let n = TABLE_INTERVALS;
            let step = 1.0 / n as f64;
            let mut cumulative = Vec::with_capacity(n + 1);
            cumulative.push(0.0);
            let mut acc = 0.0;
            for k in 0..n {
                let a = 1.0 + k as f64 * step;
                acc += quad::integrate(theta, a, a + step, 1e-16);
                cumulative.push(acc);
            }
            Arc::new(OscTable {
                kappa: 1.0 / acc,
                cumulative,
            })
        })
        .clone()
}

/// The unnormalized oscillatory density.
pub fn theta(s: f64) -> f64 {
    let t = s - 1.0;
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    (-1.0 / t - 1.0 / (1.0 - t)).exp() * ((1.0 / (t * t)).sin() + 1.0)
}

fn theta_prime(s: f64) -> f64 {
    let t = s - 1.0;
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let e = (-1.0 / t - 1.0 / (1.0 - t)).exp();
    if e == 0.0 {
        return 0.0;
    }
    let w = 1.0 / (t * t);
    let de = e * (w - 1.0 / ((1.0 - t) * (1.0 - t)));
    let ds = -2.0 * w.cos() / (t * t * t);
    de * (w.sin() + 1.0) + e * ds
}

/// A cutoff profile `g` together with its derivatives.
#[derive(Clone)]
pub struct CutoffFunction {
    variant: CutoffVariant,
    table: Option<Arc<OscTable>>,
}

impl std::fmt::Debug for CutoffFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CutoffFunction")
            .field("variant", &self.variant)
            .field("kappa", &self.kappa())
            .finish()
    }
}

pub fn smoothstep_cutoff() -> CutoffFunction {
    CutoffFunction {
        variant: CutoffVariant::Smoothstep,
        table: None,
    }
}

pub fn oscillatory_cutoff() -> CutoffFunction {
    CutoffFunction {
        variant: CutoffVariant::Oscillatory,
        table: Some(osc_table()),
    }
}

/// `(g(s), g'(s))`.
pub fn eval_cutoff(g: &CutoffFunction, s: f64) -> (f64, f64) {
    (g.value(s), g.derivative(s))
}

impl Default for CutoffFunction {
    fn default() -> Self {
        smoothstep_cutoff()
    }
}

impl CutoffFunction {
    pub fn new(variant: CutoffVariant) -> Self {
        match variant {
            CutoffVariant::Smoothstep => smoothstep_cutoff(),
            CutoffVariant::Oscillatory => oscillatory_cutoff(),
        }
    }

    pub fn variant(&self) -> CutoffVariant {
        self.variant
    }

    /// Normalization `1 / int_1^2 theta`; `None` for the smooth step.
    pub fn kappa(&self) -> Option<f64> {
        self.table.as_ref().map(|t| t.kappa)
    }

    pub fn value(&self, s: f64) -> f64 {
        if s <= 1.0 {
            return 0.0;
        }
        if s >= 2.0 {
            return 1.0;
        }
        let t = s - 1.0;
        match &self.table {
            None => t * t * t * (t * (6.0 * t - 15.0) + 10.0),
            Some(tab) => {
                let n = TABLE_INTERVALS as f64;
                let k = ((t * n).floor() as usize).min(TABLE_INTERVALS - 1);
                let a = 1.0 + k as f64 / n;
                let partial = if s > a { quad::gk15(&theta, a, s).0 } else { 0.0 };
                ((tab.cumulative[k] + partial) * tab.kappa).clamp(0.0, 1.0)
            }
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        if s <= 1.0 || s >= 2.0 {
            return 0.0;
        }
        let t = s - 1.0;
        match &self.table {
            None => {
                let u = t * (1.0 - t);
                30.0 * u * u
            }
            Some(tab) => tab.kappa * theta(s),
        }
    }

    pub fn second_derivative(&self, s: f64) -> f64 {
        if s <= 1.0 || s >= 2.0 {
            return 0.0;
        }
        let t = s - 1.0;
        match &self.table {
            None => 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t),
            Some(tab) => tab.kappa * theta_prime(s),
        }
    }
}
