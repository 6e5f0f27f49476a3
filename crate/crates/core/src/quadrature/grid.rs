use crate::error::{Error, Result};
use std::sync::Arc;

pub const MIN_NODES: usize = 8;

/// Graded mesh tᵢ = T·(i/n)^r, i = 1..n. The origin is not a node.
#[derive(Debug, Clone)]
pub struct Grid {
    nodes: Arc<[f64]>,
    grading: f64,
    horizon: f64,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.nodes, &other.nodes) || self.nodes == other.nodes
    }
}

impl Grid {
    pub fn new(n: usize, grading: f64, horizon: f64) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::GridTooCoarse(n));
        }
        if !(grading >= 1.0) || !grading.is_finite() {
            return Err(Error::Grid(format!("grading exponent {grading} must be >= 1")));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::Grid(format!("horizon {horizon} must be > 0")));
        }
        let nf = n as f64;
        let nodes: Vec<f64> = (1..=n)
            .map(|i| {
                if i == n {
                    horizon
                } else {
                    horizon * (i as f64 / nf).powf(grading)
                }
            })
            .collect();
        Ok(Grid {
            nodes: nodes.into(),
            grading,
            horizon,
        })
    }

    /// Mesh from explicit nodes, e.g. read back from CSV. Nodes must be
    /// positive and strictly increasing; the grading exponent is inferred
    /// from the first node.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        let n = nodes.len();
        if n < MIN_NODES {
            return Err(Error::GridTooCoarse(n));
        }
        if !(nodes[0] > 0.0) {
            return Err(Error::Grid(format!("first node {} must be > 0", nodes[0])));
        }
        if let Some(w) = nodes.windows(2).find(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::Grid(format!(
                "nodes must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        let horizon = nodes[n - 1];
        let grading = ((nodes[0] / horizon).ln() / (1.0 / n as f64).ln()).max(1.0);
        Ok(Grid {
            nodes: nodes.into(),
            grading,
            horizon,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Left end of panel j (0-based), the previous node or the origin.
    pub(crate) fn panel_start(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.nodes[j - 1]
        }
    }
}
