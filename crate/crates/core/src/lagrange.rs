//! Interpolation at an arbitrary unisolvent node set by inverting the
//! Vandermonde matrix in the product basis `U_i(x) U_j(y)`, `i + j <= n`.

use nalgebra::{DMatrix, DVector};

use crate::chebkernel::cheb_u_table;
use crate::error::{Error, Result};
use crate::interp::{LebesgueSource, MeshPoint};
use crate::nodes::{mp_cardinality, NodeSet, Point2};

/// Exponent pairs `(i, j)` with `i + j <= n`, ordered by total degree.
pub fn basis_indices(n: usize) -> Vec<(usize, usize)> {
    (0..=n)
        .flat_map(|d| (0..=d).map(move |i| (i, d - i)))
        .collect()
}

fn basis_row(n: usize, idx: &[(usize, usize)], p: Point2, ux: &mut [f64], uy: &mut [f64]) -> Vec<f64> {
    cheb_u_table(p.x, &mut ux[..=n]);
    cheb_u_table(p.y, &mut uy[..=n]);
    idx.iter().map(|&(i, j)| ux[i] * uy[j]).collect()
}

#[derive(Debug, Clone)]
pub struct LagrangeInterpolant {
    n: usize,
    nodes: NodeSet,
    basis: Vec<(usize, usize)>,
    /// Transpose of the inverse Vandermonde matrix.
    inv_t: DMatrix<f64>,
}

impl LagrangeInterpolant {
    /// Fails with [`Error::NotUnisolvent`] when the Vandermonde matrix is singular.
    pub fn new(nodes: NodeSet) -> Result<Self> {
        if nodes.degree < 0 {
            return Err(Error::InvalidDegree {
                degree: nodes.degree,
                reason: "degree must be nonnegative",
            });
        }
        let n = nodes.degree as usize;
        let dim = mp_cardinality(n);
        if nodes.len() != dim {
            return Err(Error::Shape {
                expected: dim,
                found: nodes.len(),
            });
        }
        let basis = basis_indices(n);
        let (mut ux, mut uy) = (vec![0.0; n + 1], vec![0.0; n + 1]);
        let mut v = DMatrix::zeros(dim, dim);
        for (k, p) in nodes.points.iter().enumerate() {
            let row = basis_row(n, &basis, *p, &mut ux, &mut uy);
            for (b, val) in row.into_iter().enumerate() {
                v[(k, b)] = val;
            }
        }
        let inv = v.clone().lu().try_inverse().ok_or(Error::NotUnisolvent)?;
        let residual = (&v * &inv - DMatrix::<f64>::identity(dim, dim)).amax();
        if !(residual < 1e-6) {
            return Err(Error::NotUnisolvent);
        }
        Ok(LagrangeInterpolant {
            n,
            nodes,
            basis,
            inv_t: inv.transpose(),
        })
    }

    /// Values of the fundamental Lagrange polynomials at `p`.
    pub fn cardinals(&self, p: Point2) -> Vec<f64> {
        let (mut ux, mut uy) = (vec![0.0; self.n + 1], vec![0.0; self.n + 1]);
        let phi = DVector::from_vec(basis_row(self.n, &self.basis, p, &mut ux, &mut uy));
        (&self.inv_t * phi).iter().copied().collect()
    }

    pub fn interpolate(&self, samples: &[f64], p: Point2) -> Result<f64> {
        if samples.len() != self.nodes.len() {
            return Err(Error::Shape {
                expected: self.nodes.len(),
                found: samples.len(),
            });
        }
        Ok(self.cardinals(p).iter().zip(samples).map(|(l, f)| l * f).sum())
    }
}

impl LebesgueSource for LagrangeInterpolant {
    fn degree(&self) -> usize {
        self.n
    }

    fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    fn lebesgue_at(&self, p: &MeshPoint) -> (f64, usize) {
        (self.cardinals(p.point).iter().map(|v| v.abs()).sum(), 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{KernelEvalConfig, MpInterpolant};
    use crate::nodes::{extended_mp, morrow_patterson, NodeFamily};

    #[test]
    fn basis_count() {
        assert_eq!(basis_indices(4).len(), 15);
    }

    #[test]
    fn matches_kernel_route_on_mp() {
        let lag = LagrangeInterpolant::new(morrow_patterson(6).unwrap()).unwrap();
        let mp = MpInterpolant::new(6, KernelEvalConfig::default()).unwrap();
        for &(x, y) in &[(0.1, 0.2), (-0.9, 0.7), (1.0, -1.0), (0.5, 1.0)] {
            let p = Point2::new(x, y);
            let a = lag.cardinals(p);
            let (b, _) = mp.cardinals(&MeshPoint::from_point(p));
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn emp_reproduces_polynomials() {
        let set = extended_mp(6).unwrap();
        let f = |p: Point2| 1.0 + p.x * p.y.powi(3) - 2.0 * p.x.powi(6);
        let samples: Vec<f64> = set.points.iter().map(|&p| f(p)).collect();
        let lag = LagrangeInterpolant::new(set).unwrap();
        for &(x, y) in &[(0.3, -0.4), (1.0, 1.0), (-0.77, 0.12)] {
            let p = Point2::new(x, y);
            assert!((lag.interpolate(&samples, p).unwrap() - f(p)).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_degenerate_sets() {
        let set = NodeSet {
            family: NodeFamily::Mp,
            degree: 1,
            points: vec![Point2::new(0.0, 0.0), Point2::new(0.5, 0.5), Point2::new(1.0, 1.0)],
            weights: None,
            angles: None,
        };
        assert!(matches!(LagrangeInterpolant::new(set), Err(Error::NotUnisolvent)));
        let mut short = morrow_patterson(2).unwrap();
        short.points.pop();
        assert!(matches!(LagrangeInterpolant::new(short), Err(Error::Shape { .. })));
    }
}
