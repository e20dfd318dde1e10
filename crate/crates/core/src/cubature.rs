//! The degree-`2n` cubature rule at MP nodes for the product measure
//! `sqrt(1-x^2) sqrt(1-y^2) dx dy`.

use std::f64::consts::PI;

use crate::chebkernel::cheb_u_table;
use crate::error::{Error, Result};
use crate::nodes::{check_even_degree, morrow_patterson, weight_constant, NodeSet, Point2};

/// Total mass of the product measure on the square.
pub const MEASURE_MASS: f64 = PI * PI / 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CubatureRule {
    pub degree: usize,
    pub nodes: NodeSet,
    /// Normalised weights, summing to one.
    pub weights: Vec<f64>,
    pub exactness: usize,
}

/// Both scalings of a cubature sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    /// Against the product measure, total mass `pi^2/4`.
    pub raw: f64,
    /// Against the probability measure.
    pub normalized: f64,
}

pub fn cubature_rule(n: i64) -> Result<CubatureRule> {
    let n_us = check_even_degree(n)?;
    let nodes = morrow_patterson(n)?;
    let weights = nodes.weights.clone().expect("MP sets carry weights");
    Ok(CubatureRule {
        degree: n_us,
        nodes,
        weights,
        exactness: 2 * n_us,
    })
}

/// Pairwise summation with a fixed split, so the result does not depend on
/// how the terms were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Applies the rule to `f`.
pub fn integrate<F>(rule: &CubatureRule, f: F) -> Result<Integral>
where
    F: Fn(Point2) -> f64,
{
    let mut terms = Vec::with_capacity(rule.weights.len());
    for (index, (p, w)) in rule.nodes.points.iter().zip(&rule.weights).enumerate() {
        let value = f(*p);
        if !value.is_finite() {
            return Err(Error::NonFinite {
                index,
                x: p.x,
                y: p.y,
                value,
            });
        }
        terms.push(w * value);
    }
    let normalized = pairwise_sum(&terms);
    Ok(Integral {
        raw: MEASURE_MASS * normalized,
        normalized,
    })
}

/// Normalised rule applied to `U_i(x) U_j(y)`.
pub fn basis_moment(rule: &CubatureRule, i: usize, j: usize) -> f64 {
    let mut ux = vec![0.0; i + 1];
    let mut uy = vec![0.0; j + 1];
    let terms: Vec<f64> = rule
        .nodes
        .points
        .iter()
        .zip(&rule.weights)
        .map(|(p, w)| {
            cheb_u_table(p.x, &mut ux);
            cheb_u_table(p.y, &mut uy);
            w * ux[i] * uy[j]
        })
        .collect();
    pairwise_sum(&terms)
}

/// `I(i, j) = sum over MP_n of (1 - x^2)(1 - y^2) U_i(x) U_j(y)`.
pub fn i_sum_direct(n: i64, i: usize, j: usize) -> Result<f64> {
    let set = morrow_patterson(n)?;
    let mut ux = vec![0.0; i + 1];
    let mut uy = vec![0.0; j + 1];
    let terms: Vec<f64> = set
        .points
        .iter()
        .map(|p| {
            cheb_u_table(p.x, &mut ux);
            cheb_u_table(p.y, &mut uy);
            (1.0 - p.x * p.x) * (1.0 - p.y * p.y) * ux[i] * uy[j]
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Writes `k = q p` or `k = q p - 2` with `q >= 0`; returns `(q, shifted)`.
fn classify(k: usize, p: usize) -> Option<(usize, bool)> {
    if k.is_multiple_of(p) {
        Some((k / p, false))
    } else if (k + 2).is_multiple_of(p) {
        Some(((k + 2) / p, true))
    } else {
        None
    }
}

/// Closed form of [`i_sum_direct`].
///
/// Non-zero only when `n+2` divides `i` or `i+2` and `n+3` divides `j` or
/// `j+2`. With `i = a(n+2)` or `a(n+2) - 2` and `j = b(n+3)` or `b(n+3) - 2`
/// the value is `±(n+2)(n+3)/16 ((-1)^a + (-1)^b)`, positive when both or
/// neither index carries the `-2` shift.
pub fn i_sum_closed(n: i64, i: usize, j: usize) -> Result<f64> {
    let n_us = check_even_degree(n)?;
    let (Some((a, si)), Some((b, sj))) = (classify(i, n_us + 2), classify(j, n_us + 3)) else {
        return Ok(0.0);
    };
    let sign_a = if a % 2 == 0 { 1.0 } else { -1.0 };
    let sign_b = if b % 2 == 0 { 1.0 } else { -1.0 };
    let orient = if si == sj { 1.0 } else { -1.0 };
    Ok(orient * (sign_a + sign_b) / (2.0 * weight_constant(n_us)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn moments() {
        let rule = cubature_rule(4).unwrap();
        assert_eq!(rule.exactness, 8);
        let one = integrate(&rule, |_| 1.0).unwrap();
        assert_relative_eq!(one.normalized, 1.0, epsilon = 1e-15);
        assert_relative_eq!(one.raw, MEASURE_MASS, epsilon = 1e-14);
        assert!(basis_moment(&rule, 1, 1).abs() < 1e-13);
        let r2 = cubature_rule(2).unwrap();
        let v = integrate(&r2, |p| p.x * p.x * p.y * p.y).unwrap();
        assert_relative_eq!(v.normalized, 1.0 / 16.0, epsilon = 1e-13);
        let u2 = integrate(&r2, |p| 4.0 * p.x * p.x - 1.0).unwrap();
        assert!(u2.normalized.abs() < 1e-13);
        assert!(cubature_rule(5).is_err());
    }

    #[test]
    fn non_finite_names_node() {
        let rule = cubature_rule(2).unwrap();
        let err = integrate(&rule, |p| if p.x > 0.5 { f64::NAN } else { 0.0 }).unwrap_err();
        assert!(matches!(err, Error::NonFinite { index: 0, .. }));
    }

    #[test]
    fn smooth_function_converges() {
        let f = |p: Point2| (p.x + p.y).cos();
        let a = integrate(&cubature_rule(20).unwrap(), f).unwrap().normalized;
        let b = integrate(&cubature_rule(24).unwrap(), f).unwrap().normalized;
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn i_sum_examples() {
        assert_relative_eq!(i_sum_direct(4, 0, 0).unwrap(), 5.25, epsilon = 1e-13);
        assert!(i_sum_direct(4, 4, 0).unwrap().abs() < 1e-12);
        assert!(i_sum_direct(4, 1, 1).unwrap().abs() < 1e-12);
        assert_eq!(i_sum_closed(6, 8, 9).unwrap(), -9.0);
        assert_eq!(i_sum_closed(6, 6, 7).unwrap(), -9.0);
        assert_eq!(i_sum_closed(6, 3, 9).unwrap(), 0.0);
        assert_relative_eq!(i_sum_direct(6, 8, 9).unwrap(), -9.0, epsilon = 1e-11);
        assert_relative_eq!(i_sum_direct(6, 6, 7).unwrap(), -9.0, epsilon = 1e-11);
    }

    #[test]
    fn mixed_shift_changes_sign() {
        // i = 0 unshifted, j = 2(n+3) - 2 shifted
        let n = 4;
        let j = 2 * 7 - 2;
        let closed = i_sum_closed(n, 0, j).unwrap();
        assert_relative_eq!(closed, -2.0 * 42.0 / 16.0);
        assert_relative_eq!(i_sum_direct(n, 0, j).unwrap(), closed, epsilon = 1e-11);
    }

    #[test]
    fn pairwise_matches_naive() {
        let v: Vec<f64> = (0..1000).map(|k| 1.0 / (k as f64 + 1.0)).collect();
        assert!((pairwise_sum(&v) - v.iter().sum::<f64>()).abs() < 1e-12);
    }
}
