use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform mesh of `(0, L)` with piecewise-constant conductivity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh1D {
    length: f64,
    conductivity: Vec<f64>,
}

impl Mesh1D {
    pub fn uniform(length: f64, elements: usize, k: f64) -> Result<Self> {
        Mesh1D::with_conductivity(length, vec![k; elements])
    }

    /// One conductivity value per element.
    pub fn with_conductivity(length: f64, conductivity: Vec<f64>) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::domain(format!("domain length must be > 0, got {length}")));
        }
        if conductivity.len() < 2 {
            return Err(Error::domain("a mesh needs at least 2 elements"));
        }
        if let Some((e, k)) = conductivity
            .iter()
            .enumerate()
            .find(|(_, k)| !(**k > 0.0 && k.is_finite()))
        {
            return Err(Error::domain(format!(
                "conductivity must be > 0 (uniform ellipticity), element {e} has {k}"
            )));
        }
        Ok(Mesh1D {
            length,
            conductivity,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn elements(&self) -> usize {
        self.conductivity.len()
    }

    /// Number of interior (free) nodes, `M − 1`.
    pub fn interior(&self) -> usize {
        self.elements() - 1
    }

    pub fn h(&self) -> f64 {
        self.length / self.elements() as f64
    }

    pub fn conductivity(&self) -> &[f64] {
        &self.conductivity
    }

    /// `x_0 = 0, .., x_M = L`.
    pub fn nodes(&self) -> Vec<f64> {
        let m = self.elements();
        (0..=m)
            .map(|j| if j == m { self.length } else { j as f64 * self.h() })
            .collect()
    }

    /// Ellipticity constant `k̃ = min k_e`.
    pub fn k_min(&self) -> f64 {
        self.conductivity.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn k_max(&self) -> f64 {
        self.conductivity.iter().cloned().fold(0.0, f64::max)
    }

    /// The common value when the conductivity is constant.
    pub fn constant_conductivity(&self) -> Option<f64> {
        let k0 = self.conductivity[0];
        self.conductivity.iter().all(|&k| k == k0).then_some(k0)
    }

    /// Interior values of full nodal data (`M + 1` entries).
    pub fn restrict(&self, full: &[f64]) -> Result<Vec<f64>> {
        if full.len() != self.elements() + 1 {
            return Err(Error::domain(format!(
                "{} nodal values for a mesh with {} nodes",
                full.len(),
                self.elements() + 1
            )));
        }
        Ok(full[1..full.len() - 1].to_vec())
    }

    /// Full nodal vector from interior values (zero Dirichlet data).
    pub fn extend(&self, interior: &[f64]) -> Vec<f64> {
        let mut v = Vec::with_capacity(interior.len() + 2);
        v.push(0.0);
        v.extend_from_slice(interior);
        v.push(0.0);
        v
    }
}
