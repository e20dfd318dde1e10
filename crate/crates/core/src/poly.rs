//! Random bivariate polynomials in the orthonormal basis `Û_i(x) Û_j(y)`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::chebkernel::cheb_u_table;
use crate::lagrange::basis_indices;
use crate::nodes::Point2;

/// `sum c_ij Û_i(x) Û_j(y)` over `i + j <= n`, with `Û_i = sqrt(2/pi) U_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoPoly {
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

impl OrthoPoly {
    /// Independent standard normal coefficients.
    pub fn random<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Self {
        let coeffs = (0..basis_indices(degree).len())
            .map(|_| rng.sample(StandardNormal))
            .collect();
        OrthoPoly { degree, coeffs }
    }

    pub fn eval(&self, p: Point2) -> f64 {
        let n = self.degree;
        let (mut ux, mut uy) = (vec![0.0; n + 1], vec![0.0; n + 1]);
        cheb_u_table(p.x, &mut ux);
        cheb_u_table(p.y, &mut uy);
        let scale = 2.0 / PI;
        basis_indices(n)
            .iter()
            .zip(&self.coeffs)
            .map(|(&(i, j), c)| c * ux[i] * uy[j])
            .sum::<f64>()
            * scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_term() {
        let p = OrthoPoly { degree: 0, coeffs: vec![PI / 2.0] };
        assert!((p.eval(Point2::new(0.3, -0.8)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn seeded_draws_repeat() {
        let a = OrthoPoly::random(5, &mut ChaCha8Rng::seed_from_u64(1));
        let b = OrthoPoly::random(5, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a, b);
        assert_eq!(a.coeffs.len(), 21);
    }
}
