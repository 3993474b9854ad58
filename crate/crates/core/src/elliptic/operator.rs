use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{BoundaryData, CoefficientField};
use crate::geometry::{Arm, Component, GridDomain};
use crate::{Error, Point, Result};

/// Treatment of arms that cross the boundary.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryScheme {
    /// Unequal-arm Shortley–Weller differences. Second order, but the
    /// matrix is not symmetric next to curved boundaries.
    #[default]
    ShortleyWeller,
    /// Flux form with the cut arm length only in the boundary flux
    /// (`a (g - u_P) / (theta h^2)`). Symmetric for `b = 0`, so the discrete
    /// problem stays variational.
    SymmetricCut,
}

/// How the drift `b . grad u` was discretized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriftScheme {
    None,
    Centered,
    Upwind,
}

/// Sparse discretization of `L u = div(A grad u) + b . grad u (+ zeta u)`
/// over the interior nodes.
///
/// `L u = M u + B g`, where `M` acts on the interior unknowns and `B` holds,
/// per row, the weights of the outer and inner Dirichlet values `g`.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    domain: Arc<GridDomain>,
    diag: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    boundary: Vec<[f64; 2]>,
    symmetric: bool,
    scheme: BoundaryScheme,
    drift: DriftScheme,
}

pub fn assemble_operator(
    domain: &Arc<GridDomain>,
    coeffs: &CoefficientField,
) -> Result<DiscreteOperator> {
    assemble_operator_with(domain, coeffs, BoundaryScheme::ShortleyWeller)
}

pub fn assemble_operator_with(
    domain: &Arc<GridDomain>,
    coeffs: &CoefficientField,
    scheme: BoundaryScheme,
) -> Result<DiscreteOperator> {
    let n = domain.num_unknowns();
    if n == 0 {
        return Err(Error::invalid("domain has no interior nodes"));
    }
    let beta = coeffs.check_ellipticity(domain)?;
    let h = domain.h();
    let drift = if !coeffs.has_drift() {
        DriftScheme::None
    } else if coeffs.max_drift(domain) * h / (2.0 * beta) < 1.0 {
        DriftScheme::Centered
    } else {
        DriftScheme::Upwind
    };

    let mut diag = vec![0.0; n];
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(5 * n);
    let mut vals = Vec::with_capacity(5 * n);
    let mut boundary = vec![[0.0; 2]; n];
    row_ptr.push(0);

    for (k, node) in domain.nodes().iter().enumerate() {
        let p = domain.point(k);
        let b = coeffs.effective_drift(p);
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(8);
        let mut center = 0.0;
        // (plus arm, minus arm, drift component, axis)
        for (plus, minus, bk, axis) in [(0usize, 1usize, b[0], 0usize), (2, 3, b[1], 1)] {
            let hp = node.arms[plus].fraction() * h;
            let hm = node.arms[minus].fraction() * h;
            let unit = |len: f64| {
                if axis == 0 {
                    Point::new(len, 0.0)
                } else {
                    Point::new(0.0, len)
                }
            };
            let coef = |q: Point| {
                if axis == 0 {
                    coeffs.a11.eval(q)
                } else {
                    coeffs.a22.eval(q)
                }
            };
            let ap = coef(p + unit(0.5 * hp));
            let am = coef(p - unit(0.5 * hm));
            let (mut cp, mut cm) = match scheme {
                BoundaryScheme::ShortleyWeller => (
                    2.0 * ap / (hp * (hp + hm)),
                    2.0 * am / (hm * (hp + hm)),
                ),
                BoundaryScheme::SymmetricCut => (ap / (h * hp), am / (h * hm)),
            };
            center -= cp + cm;
            match drift {
                DriftScheme::None => {}
                DriftScheme::Centered => {
                    cp += bk * hm / (hp * (hp + hm));
                    cm -= bk * hp / (hm * (hp + hm));
                    center += bk * (hp - hm) / (hp * hm);
                }
                DriftScheme::Upwind => {
                    if bk > 0.0 {
                        cp += bk / hp;
                        center -= bk / hp;
                    } else {
                        cm -= bk / hm;
                        center += bk / hm;
                    }
                }
            }
            for (arm, c) in [(&node.arms[plus], cp), (&node.arms[minus], cm)] {
                match arm {
                    Arm::Interior(m) => entries.push((*m, c)),
                    Arm::Cut { component, .. } => {
                        boundary[k][component_index(*component)] += c;
                    }
                }
            }
        }
        let a12 = coeffs.a12.eval(p);
        if a12 != 0.0 {
            if node.is_boundary_adjacent() {
                return Err(Error::invalid(format!(
                    "off-diagonal coefficient at cut node ({:.4}, {:.4}) is unsupported",
                    p.x, p.y
                )));
            }
            let c = a12 / (2.0 * h * h);
            for (di, dj, s) in [(1i64, 1i64, 1.0), (-1, -1, 1.0), (1, -1, -1.0), (-1, 1, -1.0)] {
                let ni = (node.i as i64 + di) as usize;
                let nj = (node.j as i64 + dj) as usize;
                match domain.unknown_at(ni, nj) {
                    Some(m) => entries.push((m, s * c)),
                    None => {
                        return Err(Error::invalid(format!(
                            "off-diagonal coefficient needs a diagonal neighbour outside the domain at ({:.4}, {:.4})",
                            p.x, p.y
                        )))
                    }
                }
            }
        }
        entries.sort_by_key(|e| e.0);
        diag[k] = center;
        for (m, c) in entries {
            cols.push(m);
            vals.push(c);
        }
        row_ptr.push(cols.len());
    }

    let mut op = DiscreteOperator {
        domain: domain.clone(),
        diag,
        row_ptr,
        cols,
        vals,
        boundary,
        symmetric: false,
        scheme,
        drift,
    };
    op.symmetric = op.compute_symmetry();
    Ok(op)
}

fn component_index(c: Component) -> usize {
    match c {
        Component::Outer => 0,
        Component::Inner => 1,
    }
}

impl DiscreteOperator {
    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Whether the interior matrix is symmetric (to rounding).
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn scheme(&self) -> BoundaryScheme {
        self.scheme
    }

    pub fn drift_scheme(&self) -> DriftScheme {
        self.drift
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Off-diagonal entries `(column, value)` of row `k`.
    pub fn row(&self, k: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[k]..self.row_ptr[k + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    /// Weights of the `[outer, inner]` boundary values in row `k`.
    pub fn boundary_weights(&self, k: usize) -> [f64; 2] {
        self.boundary[k]
    }

    /// Largest `|row - column|` over the nonzero entries.
    pub fn bandwidth(&self) -> usize {
        let mut bw = 0;
        for k in 0..self.len() {
            for (m, _) in self.row(k) {
                bw = bw.max(k.abs_diff(m));
            }
        }
        bw
    }

    /// `out = M u` (interior part only).
    pub fn matvec(&self, u: &[f64], out: &mut [f64]) {
        for k in 0..self.len() {
            let mut s = self.diag[k] * u[k];
            for idx in self.row_ptr[k]..self.row_ptr[k + 1] {
                s += self.vals[idx] * u[self.cols[idx]];
            }
            out[k] = s;
        }
    }

    /// `B g`.
    pub fn boundary_term(&self, bc: BoundaryData) -> Vec<f64> {
        let g = bc.as_array();
        self.boundary.iter().map(|w| w[0] * g[0] + w[1] * g[1]).collect()
    }

    /// `L u = M u + B g`.
    pub fn apply(&self, u: &[f64], bc: BoundaryData) -> Vec<f64> {
        let mut out = self.boundary_term(bc);
        let mut mu = vec![0.0; self.len()];
        self.matvec(u, &mut mu);
        for (o, m) in out.iter_mut().zip(mu) {
            *o += m;
        }
        out
    }

    /// Adds `zeta` to the diagonal, i.e. the operator `L + zeta`.
    pub fn with_zeroth_order(&self, zeta: &[f64]) -> DiscreteOperator {
        assert_eq!(zeta.len(), self.len());
        let mut op = self.clone();
        for (d, z) in op.diag.iter_mut().zip(zeta) {
            *d += z;
        }
        op
    }

    fn compute_symmetry(&self) -> bool {
        let scale = self
            .diag
            .iter()
            .map(|d| d.abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        for k in 0..self.len() {
            for (m, v) in self.row(k) {
                let back = self.row(m).find(|(c, _)| *c == k).map(|(_, x)| x);
                match back {
                    Some(w) if (v - w).abs() <= 1e-13 * scale => {}
                    _ => return false,
                }
            }
        }
        true
    }
}
