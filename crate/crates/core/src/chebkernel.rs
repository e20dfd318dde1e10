//! Chebyshev polynomials and the trigonometric summation identities behind the
//! fast kernel.
//!
//! Every identity is available twice: as the literal finite sum
//! ([`TrigSum::direct`], [`upsilon_direct`]) and as its closed form
//! ([`TrigSum::closed`], [`weighted_sinsin_closed`], [`upsilon_closed`]). The
//! closed forms divide by sines of half-angles and refuse to evaluate when a
//! guarded denominator drops below the singularity threshold; callers are
//! expected to fall back to the direct sum in that case.

use crate::error::{Error, Result};

/// Closed forms refuse to evaluate when a guarded `|sin(.)|` is below this.
pub const SINGULAR_THRESHOLD: f64 = 1e-8;

/// Tolerance used when deciding whether an argument lies in `[-1, 1]`.
const DOMAIN_SLACK: f64 = 1e-14;

fn check_domain(x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0 + DOMAIN_SLACK) {
        return Err(Error::Domain { value: x });
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// Chebyshev polynomial of the second kind `U_j(x)`.
///
/// `U_{-1}` is the zero polynomial. At `x = ±1` the limit `(j+1)(±1)^j` is
/// returned exactly.
pub fn cheb_u(j: i64, x: f64) -> Result<f64> {
    if j < -1 {
        return Err(Error::InvalidDegree {
            degree: j,
            reason: "U_j needs j >= -1",
        });
    }
    let x = check_domain(x)?;
    Ok(cheb_u_unchecked(j, x))
}

pub(crate) fn cheb_u_unchecked(j: i64, x: f64) -> f64 {
    if j < 0 {
        return 0.0;
    }
    if x == 1.0 {
        return (j + 1) as f64;
    }
    if x == -1.0 {
        let v = (j + 1) as f64;
        return if j % 2 == 0 { v } else { -v };
    }
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if j == 0 {
        return prev;
    }
    for _ in 1..j {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[j] = U_j(x)` for `j = 0..out.len()` by the three-term recurrence.
pub fn cheb_u_table(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = 2.0 * x;
    }
    for j in 2..out.len() {
        out[j] = 2.0 * x * out[j - 1] - out[j - 2];
    }
}

/// Chebyshev polynomial of the first kind `T_j(x) = cos(j arccos x)`.
pub fn cheb_t(j: i64, x: f64) -> Result<f64> {
    if j < 0 {
        return Err(Error::InvalidDegree {
            degree: j,
            reason: "T_j needs j >= 0",
        });
    }
    let x = check_domain(x)?;
    Ok((j as f64 * x.acos()).cos())
}

/// One of the finite trigonometric sums with a known closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrigSum {
    /// `sum_{l=0}^{M} cos((2l+1) x)`
    OddCosine { m: u32, x: f64 },
    /// `sum_{l=1}^{M} cos(l x)`
    Cosine { m: u32, x: f64 },
    /// `sum_{l=1}^{M} sin(l x)`
    Sine { m: u32, x: f64 },
    /// `sum_{i=0}^{l} sin((i+1) alpha) sin((i+1) beta)`
    SinSin { l: u32, alpha: f64, beta: f64 },
    /// `sum_{i=0}^{l} cos((i+1) alpha) cos((i+1) beta)`
    CosCos { l: u32, alpha: f64, beta: f64 },
    /// `sum_{i=0}^{l} sin((i+1) alpha) cos((i+1) beta)`
    SinCos { l: u32, alpha: f64, beta: f64 },
}

fn guard(what: &'static str, value: f64, threshold: f64) -> Result<f64> {
    if value.abs() < threshold || !value.is_finite() {
        Err(Error::Singular {
            what,
            value,
            threshold,
        })
    } else {
        Ok(value)
    }
}

impl TrigSum {
    /// The literal left-hand side.
    pub fn direct(&self) -> f64 {
        match *self {
            TrigSum::OddCosine { m, x } => (0..=m).map(|l| ((2 * l + 1) as f64 * x).cos()).sum(),
            TrigSum::Cosine { m, x } => (1..=m).map(|l| (l as f64 * x).cos()).sum(),
            TrigSum::Sine { m, x } => (1..=m).map(|l| (l as f64 * x).sin()).sum(),
            TrigSum::SinSin { l, alpha, beta } => (1..=l + 1)
                .map(|k| (k as f64 * alpha).sin() * (k as f64 * beta).sin())
                .sum(),
            TrigSum::CosCos { l, alpha, beta } => (1..=l + 1)
                .map(|k| (k as f64 * alpha).cos() * (k as f64 * beta).cos())
                .sum(),
            TrigSum::SinCos { l, alpha, beta } => (1..=l + 1)
                .map(|k| (k as f64 * alpha).sin() * (k as f64 * beta).cos())
                .sum(),
        }
    }

    /// Closed form with the default singularity threshold.
    pub fn closed(&self) -> Result<f64> {
        self.closed_with_threshold(SINGULAR_THRESHOLD)
    }

    pub fn closed_with_threshold(&self, threshold: f64) -> Result<f64> {
        match *self {
            TrigSum::OddCosine { m, x } => {
                let s = guard("sin x", x.sin(), threshold)?;
                Ok((2.0 * (m as f64 + 1.0) * x).sin() / (2.0 * s))
            }
            TrigSum::Cosine { m, x } => {
                let s = guard("sin(x/2)", (0.5 * x).sin(), threshold)?;
                let m = m as f64;
                Ok((0.5 * m * x).sin() / s * (0.5 * (m + 1.0) * x).cos())
            }
            TrigSum::Sine { m, x } => {
                let s = guard("sin(x/2)", (0.5 * x).sin(), threshold)?;
                let m = m as f64;
                Ok((0.5 * m * x).sin() / s * (0.5 * (m + 1.0) * x).sin())
            }
            TrigSum::SinSin { l, alpha, beta } => {
                let (dm, dp, k) = half_angles(l, alpha, beta, threshold)?;
                Ok((k * dm.0).sin() / (4.0 * dm.1) - (k * dp.0).sin() / (4.0 * dp.1))
            }
            TrigSum::CosCos { l, alpha, beta } => {
                let (dm, dp, k) = half_angles(l, alpha, beta, threshold)?;
                Ok((k * dm.0).sin() / (4.0 * dm.1) + (k * dp.0).sin() / (4.0 * dp.1) - 0.5)
            }
            TrigSum::SinCos { l, alpha, beta } => {
                let (dm, dp, k) = half_angles(l, alpha, beta, threshold)?;
                Ok((dm.0.cos() - (k * dm.0).cos()) / (4.0 * dm.1)
                    + (dp.0.cos() - (k * dp.0).cos()) / (4.0 * dp.1))
            }
        }
    }
}

/// A half-angle and its sine.
type HalfAngle = (f64, f64);

/// Returns `((a-b)/2, sin((a-b)/2))`, `((a+b)/2, sin((a+b)/2))` and `2l+3`.
fn half_angles(
    l: u32,
    alpha: f64,
    beta: f64,
    threshold: f64,
) -> Result<(HalfAngle, HalfAngle, f64)> {
    let hm = 0.5 * (alpha - beta);
    let hp = 0.5 * (alpha + beta);
    let sm = guard("sin((alpha-beta)/2)", hm.sin(), threshold)?;
    let sp = guard("sin((alpha+beta)/2)", hp.sin(), threshold)?;
    Ok(((hm, sm), (hp, sp), 2.0 * l as f64 + 3.0))
}

/// `(sin a / sin b) * sum_{i=0}^{l} sin((i+1)a) sin((i+1)b)` in closed form.
pub fn weighted_sinsin_closed(l: u32, alpha: f64, beta: f64) -> Result<f64> {
    weighted_sinsin_closed_with_threshold(l, alpha, beta, SINGULAR_THRESHOLD)
}

pub fn weighted_sinsin_closed_with_threshold(
    l: u32,
    alpha: f64,
    beta: f64,
    threshold: f64,
) -> Result<f64> {
    let sb = guard("sin beta", beta.sin(), threshold)?;
    let ((hm, sm), (hp, sp), k) = half_angles(l, alpha, beta, threshold)?;
    let ca = (0.5 * alpha).cos();
    let cb = (0.5 * beta).cos();
    let s1 = (k * hm).sin();
    let s2 = (k * hp).sin();
    Ok(ca * cb / (2.0 * sb) * (s1 - s2)
        + ca / (4.0 * cb) * (hm.cos() / sm * s1 + hp.cos() / sp * s2))
}

/// Literal form of [`weighted_sinsin_closed`].
pub fn weighted_sinsin_direct(l: u32, alpha: f64, beta: f64) -> f64 {
    alpha.sin() / beta.sin() * TrigSum::SinSin { l, alpha, beta }.direct()
}

/// Arguments of `Υ_n(x, y, z) = sum_{j=0}^{n} sin((j+1)x) sin((j+1)y) sin((2n-2j+3)z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpsilonArgs {
    pub n: u32,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UpsilonArgs {
    pub fn new(n: u32, x: f64, y: f64, z: f64) -> Self {
        UpsilonArgs { n, x, y, z }
    }

    /// Smallest of the four guarded denominators `|sin((x ± y ± 2z)/2)|`.
    pub fn min_denominator(&self) -> f64 {
        let d = self.denominators();
        d.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }

    // [x-y-2z, x-y+2z, x+y-2z, x+y+2z], each halved and passed through sin
    fn denominators(&self) -> [f64; 4] {
        let (s, t, z2) = (self.x - self.y, self.x + self.y, 2.0 * self.z);
        [
            (0.5 * (s - z2)).sin(),
            (0.5 * (s + z2)).sin(),
            (0.5 * (t - z2)).sin(),
            (0.5 * (t + z2)).sin(),
        ]
    }
}

/// Direct summation of `Υ_n`.
pub fn upsilon_direct(args: UpsilonArgs) -> f64 {
    let UpsilonArgs { n, x, y, z } = args;
    (0..=n)
        .map(|j| {
            let k = (j + 1) as f64;
            (k * x).sin() * (k * y).sin() * ((2 * n - 2 * j + 3) as f64 * z).sin()
        })
        .sum()
}

/// Eight-term closed form of `Υ_n`.
pub fn upsilon_closed(args: UpsilonArgs) -> Result<f64> {
    upsilon_closed_with_threshold(args, SINGULAR_THRESHOLD)
}

pub fn upsilon_closed_with_threshold(args: UpsilonArgs, threshold: f64) -> Result<f64> {
    let [dmm, dmp, dpm, dpp] = args.denominators();
    let dmm = guard("sin((x-y-2z)/2)", dmm, threshold)?;
    let dmp = guard("sin((x-y+2z)/2)", dmp, threshold)?;
    let dpm = guard("sin((x+y-2z)/2)", dpm, threshold)?;
    let dpp = guard("sin((x+y+2z)/2)", dpp, threshold)?;
    Ok(upsilon_terms(args, dmm, dmp, dpm, dpp))
}

#[inline]
fn upsilon_terms(args: UpsilonArgs, dmm: f64, dmp: f64, dpm: f64, dpp: f64) -> f64 {
    let UpsilonArgs { n, x, y, z } = args;
    let s = x - y;
    let t = x + y;
    let k = 2.0 * n as f64 + 3.0;
    let wide = (8.0 + 4.0 * n as f64) * z;
    let z4 = 4.0 * z;
    let minus = ((0.5 * (s + wide)).cos() - (0.5 * (k * s + z4)).cos()) / dmm
        + ((0.5 * (k * s - z4)).cos() - (0.5 * (s - wide)).cos()) / dmp;
    let plus = ((0.5 * (k * t + z4)).cos() - (0.5 * (t + wide)).cos()) / dpm
        + ((0.5 * (t - wide)).cos() - (0.5 * (k * t - z4)).cos()) / dpp;
    0.125 * (minus + plus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn u_examples() {
        assert_eq!(cheb_u(0, 0.3).unwrap(), 1.0);
        assert_eq!(cheb_u(3, 1.0).unwrap(), 4.0);
        assert_eq!(cheb_u(3, -1.0).unwrap(), -4.0);
        assert_eq!(cheb_u(-1, 0.5).unwrap(), 0.0);
        assert!(matches!(cheb_u(2, 1.5), Err(Error::Domain { .. })));
        assert!(cheb_u(-2, 0.0).is_err());
    }

    #[test]
    fn t_examples() {
        assert_relative_eq!(cheb_t(5, 1.0).unwrap(), 1.0);
        assert_relative_eq!(cheb_t(2, 0.0).unwrap(), -1.0);
        assert!(cheb_t(4, (PI / 8.0).cos()).unwrap().abs() < 1e-15);
        assert!(cheb_t(1, -1.2).is_err());
    }

    #[test]
    fn u_matches_sine_ratio() {
        for j in 0..=100 {
            for step in 1..50 {
                let theta = 0.01 + (PI - 0.02) * step as f64 / 50.0;
                let lhs = cheb_u(j, theta.cos()).unwrap() * theta.sin();
                let rhs = ((j + 1) as f64 * theta).sin();
                assert!((lhs - rhs).abs() < 1e-12, "j={j} theta={theta}");
            }
        }
    }

    #[test]
    fn u_bounded_by_endpoint_value() {
        for j in 0..40 {
            for i in 0..=1000 {
                let x = -1.0 + 2.0 * i as f64 / 1000.0;
                assert!(cheb_u(j, x).unwrap().abs() <= (j + 1) as f64 + 1e-12);
            }
        }
    }

    #[test]
    fn u_discrete_orthogonality() {
        // Gauss quadrature for the weight sqrt(1-x^2) with n+2 nodes is exact
        // for degree 2n+3, so U_j U_k with j, k <= n integrates exactly.
        let n = 12usize;
        let q = n + 2;
        let nodes: Vec<(f64, f64)> = (1..=q)
            .map(|i| {
                let th = i as f64 * PI / (q as f64 + 1.0);
                (th.cos(), PI / (q as f64 + 1.0) * th.sin().powi(2))
            })
            .collect();
        for j in 0..=n as i64 {
            for k in 0..=n as i64 {
                let s: f64 = nodes
                    .iter()
                    .map(|&(x, w)| w * cheb_u(j, x).unwrap() * cheb_u(k, x).unwrap())
                    .sum();
                let expect = if j == k { PI / 2.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-12, "j={j} k={k} s={s}");
            }
        }
    }

    #[test]
    fn u_table_agrees_with_scalar() {
        let mut buf = [0.0; 20];
        cheb_u_table(0.37, &mut buf);
        for (j, v) in buf.iter().enumerate() {
            assert_eq!(*v, cheb_u(j as i64, 0.37).unwrap());
        }
    }

    #[test]
    fn trig_sum_examples() {
        let odd = TrigSum::OddCosine { m: 0, x: 1.0 };
        assert_relative_eq!(odd.closed().unwrap(), 1f64.cos(), epsilon = 1e-15);
        let cos = TrigSum::Cosine { m: 3, x: PI / 2.0 };
        assert_relative_eq!(cos.closed().unwrap(), -1.0, epsilon = 1e-15);
        assert_relative_eq!(cos.direct(), -1.0, epsilon = 1e-15);
        let ss = TrigSum::SinSin { l: 0, alpha: 0.7, beta: 1.1 };
        assert_relative_eq!(ss.closed().unwrap(), 0.7f64.sin() * 1.1f64.sin(), epsilon = 1e-15);
        assert_eq!(TrigSum::Sine { m: 4, x: 0.0 }.direct(), 0.0);
        assert!(TrigSum::Sine { m: 4, x: 0.0 }.closed().is_err());
    }

    #[test]
    fn cos_cos_direct_is_the_literal_sum() {
        let expect = (0.3f64).cos() * (0.9f64).cos()
            + (0.6f64).cos() * (1.8f64).cos()
            + (0.9f64).cos() * (2.7f64).cos();
        let got = TrigSum::CosCos { l: 2, alpha: 0.3, beta: 0.9 }.direct();
        assert_relative_eq!(got, expect, epsilon = 1e-15);
    }

    #[test]
    fn sin_cos_closed_matches_direct() {
        let s = TrigSum::SinCos { l: 5, alpha: 1.2, beta: 0.4 };
        assert!((s.closed().unwrap() - s.direct()).abs() < 1e-12);
    }

    #[test]
    fn weighted_sinsin_examples() {
        assert!(matches!(
            weighted_sinsin_closed(0, 0.5, 0.5),
            Err(Error::Singular { .. })
        ));
        for &(l, a, b) in &[(3u32, 0.8, 1.3), (7, 2.0, 0.6)] {
            let c = weighted_sinsin_closed(l, a, b).unwrap();
            let d = weighted_sinsin_direct(l, a, b);
            assert!((c - d).abs() < 1e-12, "{c} vs {d}");
        }
        // sin(beta) = 0 is guarded separately from the half-angle sines
        assert!(weighted_sinsin_closed(2, 0.3, PI).is_err());
    }

    #[test]
    fn upsilon_examples() {
        let single = upsilon_closed(UpsilonArgs::new(0, 0.4, 0.9, 0.2)).unwrap();
        assert_relative_eq!(
            single,
            0.4f64.sin() * 0.9f64.sin() * 0.6f64.sin(),
            epsilon = 1e-14
        );
        // x + y = 2z puts this triple on the singular set
        assert!(upsilon_closed(UpsilonArgs::new(6, 1.1, 0.3, 0.7)).is_err());
        let args = UpsilonArgs::new(6, 1.1, 0.3, 0.65);
        assert!((upsilon_closed(args).unwrap() - upsilon_direct(args)).abs() < 1e-11);
        let singular = UpsilonArgs::new(5, 1.0, 0.2, 0.4);
        assert!(matches!(upsilon_closed(singular), Err(Error::Singular { .. })));
    }

    #[test]
    fn threshold_is_respected() {
        let s = TrigSum::Cosine { m: 5, x: 1e-6 };
        assert!(s.closed().is_ok());
        assert!(s.closed_with_threshold(1e-5).is_err());
    }
}
