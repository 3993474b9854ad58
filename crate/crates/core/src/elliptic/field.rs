use std::sync::Arc;

use crate::geometry::{Component, GridDomain};
use crate::{Error, Point, Result};

/// Constant Dirichlet data per boundary component.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BoundaryData {
    pub outer: f64,
    pub inner: f64,
}

impl BoundaryData {
    pub const ZERO: BoundaryData = BoundaryData {
        outer: 0.0,
        inner: 0.0,
    };

    pub fn new(outer: f64, inner: f64) -> Self {
        BoundaryData { outer, inner }
    }

    pub fn get(&self, c: Component) -> f64 {
        match c {
            Component::Outer => self.outer,
            Component::Inner => self.inner,
        }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.outer, self.inner]
    }
}

/// Nodal values on the interior nodes of a domain.
#[derive(Clone, Debug)]
pub struct ScalarField {
    domain: Arc<GridDomain>,
    values: Vec<f64>,
    bc: BoundaryData,
}

impl ScalarField {
    pub fn new(domain: Arc<GridDomain>, values: Vec<f64>, bc: BoundaryData) -> Result<Self> {
        if values.len() != domain.num_unknowns() {
            return Err(Error::invalid(format!(
                "field has {} values for {} interior nodes",
                values.len(),
                domain.num_unknowns()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value at node {k}")));
        }
        Ok(ScalarField { domain, values, bc })
    }

    pub fn zeros(domain: Arc<GridDomain>) -> Self {
        let n = domain.num_unknowns();
        ScalarField {
            domain,
            values: vec![0.0; n],
            bc: BoundaryData::ZERO,
        }
    }

    pub fn from_fn(domain: Arc<GridDomain>, bc: BoundaryData, f: impl Fn(Point) -> f64) -> Self {
        let values = (0..domain.num_unknowns())
            .map(|k| f(domain.point(k)))
            .collect();
        ScalarField { domain, values, bc }
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn boundary(&self) -> BoundaryData {
        self.bc
    }

    pub fn with_boundary(mut self, bc: BoundaryData) -> Self {
        self.bc = bc;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at grid node `(i, j)` if interior.
    pub fn at(&self, i: usize, j: usize) -> Option<f64> {
        self.domain.unknown_at(i, j).map(|k| self.values[k])
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Unknown index of the largest value; ties go to the smallest grid
    /// index in `(j, i)` lexicographic order.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for k in 1..self.values.len() {
            let (v, b) = (self.values[k], self.values[best]);
            if v > b || (v == b && self.node_key(k) < self.node_key(best)) {
                best = k;
            }
        }
        best
    }

    fn node_key(&self, k: usize) -> (usize, usize) {
        let n = self.domain.node(k);
        (n.j, n.i)
    }

    pub fn scaled(&self, s: f64) -> ScalarField {
        ScalarField {
            domain: self.domain.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
            bc: BoundaryData::new(self.bc.outer * s, self.bc.inner * s),
        }
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `h^2 * sum(values)`.
    pub fn integral(&self) -> f64 {
        let h = self.domain.h();
        h * h * self.values.iter().sum::<f64>()
    }

    /// Values on the interior nodes of `target`, which must have the same
    /// spacing; nodes of `target` missing from `self` get `fill`.
    pub fn transfer_to(&self, target: &Arc<GridDomain>, fill: f64) -> ScalarField {
        assert!(self.domain.h() == target.h(), "domains with different spacings");
        let (si, sj) = self.domain.lattice_offset();
        let (ti, tj) = target.lattice_offset();
        let values = target
            .nodes()
            .iter()
            .map(|n| {
                let i = ti + n.i as i64 - si;
                let j = tj + n.j as i64 - sj;
                if i < 0 || j < 0 {
                    return fill;
                }
                self.at(i as usize, j as usize).unwrap_or(fill)
            })
            .collect();
        ScalarField {
            domain: target.clone(),
            values,
            bc: self.bc,
        }
    }
}
