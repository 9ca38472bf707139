//! Real spherical harmonics on S^2 with unit L^2 norm, plus the direct
//! analysis/synthesis transforms against a quadrature grid.
//!
//! Index layout is flat: k = l^2 + l + m for -l <= m <= l. Transforms are
//! plain dense sums; at the degrees used here (L <= 32) nothing faster is
//! warranted.

use crate::error::{Error, Result};
use crate::quadrature::{pairwise_sum_with, GridNode, QuadratureGrid};
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct SphericalHarmonicBasis {
    l_max: usize,
    /// Normalization constants K_{lm} = sqrt((2l+1)(l-m)! / (4 pi (l+m)!)),
    /// stored for 0 <= m <= l at index l*(l+1)/2 + m.
    norms: Vec<f64>,
}

impl SphericalHarmonicBasis {
    pub fn new(l_max: usize) -> Self {
        assert!(
            l_max <= 48,
            "associated Legendre recurrence overflows past L = 48"
        );
        let mut norms = Vec::with_capacity((l_max + 1) * (l_max + 2) / 2);
        for l in 0..=l_max {
            for m in 0..=l {
                let mut ratio = 1.0; // (l-m)!/(l+m)!
                for k in (l - m + 1)..=(l + m) {
                    ratio /= k as f64;
                }
                norms.push(((2 * l + 1) as f64 * ratio / (4.0 * PI)).sqrt());
            }
        }
        Self { l_max, norms }
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn len(&self) -> usize {
        (self.l_max + 1) * (self.l_max + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, l: usize, m: isize) -> usize {
        debug_assert!(l <= self.l_max && m.unsigned_abs() <= l);
        l * l + l + (m + l as isize) as usize - l
    }

    pub fn degree_of(&self, k: usize) -> (usize, isize) {
        let l = (k as f64).sqrt() as usize;
        let m = k as isize - (l * l + l) as isize;
        (l, m)
    }

    /// Values of every basis function at one point, written into `out`.
    pub fn eval_all(&self, cos_theta: f64, psi: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len());
        let x = cos_theta;
        let s = (1.0 - x * x).max(0.0).sqrt();
        // associated Legendre P_l^m without Condon-Shortley sign
        let lm = self.l_max;
        let mut p = vec![0.0; (lm + 1) * (lm + 2) / 2];
        let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;
        p[0] = 1.0;
        for m in 1..=lm {
            p[idx(m, m)] = p[idx(m - 1, m - 1)] * (2 * m - 1) as f64 * s;
        }
        for m in 0..lm {
            p[idx(m + 1, m)] = x * (2 * m + 1) as f64 * p[idx(m, m)];
        }
        for m in 0..=lm {
            for l in (m + 2)..=lm {
                p[idx(l, m)] = (x * (2 * l - 1) as f64 * p[idx(l - 1, m)]
                    - (l + m - 1) as f64 * p[idx(l - 2, m)])
                    / (l - m) as f64;
            }
        }
        let sqrt2 = std::f64::consts::SQRT_2;
        for l in 0..=lm {
            let base = l * l + l;
            out[base] = self.norms[idx(l, 0)] * p[idx(l, 0)];
            for m in 1..=l {
                let radial = sqrt2 * self.norms[idx(l, m)] * p[idx(l, m)];
                let (sin_m, cos_m) = (m as f64 * psi).sin_cos();
                out[base + m] = radial * cos_m;
                out[base - m] = radial * sin_m;
            }
        }
    }

    pub fn eval(&self, l: usize, m: isize, cos_theta: f64, psi: f64) -> f64 {
        let mut buf = vec![0.0; self.len()];
        self.eval_all(cos_theta, psi, &mut buf);
        buf[self.index(l, m)]
    }

    /// Basis values at every angular node of a grid, node-major.
    pub fn values_at(&self, nodes: &[GridNode]) -> BasisValues {
        let nb = self.len();
        let mut values = vec![0.0; nodes.len() * nb];
        for (j, node) in nodes.iter().enumerate() {
            self.eval_all(node.cos_theta, node.psi, &mut values[j * nb..(j + 1) * nb]);
        }
        BasisValues {
            n_basis: nb,
            values,
        }
    }

    fn check_order(&self, grid: &QuadratureGrid) -> Result<()> {
        // analysis integrates products of two degree-L_max harmonics
        if grid.exactness_order < 2 * self.l_max {
            return Err(Error::GridOrder {
                required: self.l_max + 1,
                actual: grid.exactness_order.div_ceil(2),
            });
        }
        Ok(())
    }

    /// Coefficients of `values` (given at the grid nodes) against the basis.
    pub fn analyze(&self, grid: &QuadratureGrid, values: &[f64]) -> Result<Vec<f64>> {
        self.check_order(grid)?;
        let table = self.values_at(&grid.nodes);
        Ok(self.analyze_with(grid, &table, values))
    }

    /// Same as [`analyze`], reusing a precomputed basis table.
    pub fn analyze_with(
        &self,
        grid: &QuadratureGrid,
        table: &BasisValues,
        values: &[f64],
    ) -> Vec<f64> {
        let nb = self.len();
        (0..nb)
            .map(|k| {
                pairwise_sum_with(values.len(), |j| {
                    grid.weights[j] * values[j] * table.values[j * nb + k]
                })
            })
            .collect()
    }

    pub fn synthesize(&self, grid: &QuadratureGrid, coeffs: &[f64]) -> Vec<f64> {
        let table = self.values_at(&grid.nodes);
        self.synthesize_with(&table, coeffs)
    }

    pub fn synthesize_with(&self, table: &BasisValues, coeffs: &[f64]) -> Vec<f64> {
        let nb = self.len();
        let n_nodes = table.values.len() / nb;
        (0..n_nodes)
            .map(|j| {
                let row = &table.values[j * nb..(j + 1) * nb];
                row.iter().zip(coeffs).map(|(y, c)| y * c).sum()
            })
            .collect()
    }
}

/// Dense table of basis values at a fixed node set (node-major layout).
#[derive(Clone, Debug)]
pub struct BasisValues {
    pub n_basis: usize,
    pub values: Vec<f64>,
}

impl BasisValues {
    pub fn row(&self, node: usize) -> &[f64] {
        &self.values[node * self.n_basis..(node + 1) * self.n_basis]
    }
}
