//! Morrow-Patterson, Padua and extended Morrow-Patterson node families.
//!
//! Nodes are stored row-major: by column index `m` ascending, then by row
//! index ascending, so points, angles and weights stay aligned.

use std::f64::consts::PI;

use crate::chebkernel::{cheb_t, cheb_u};
use crate::error::{Error, Result};
use crate::meshes::dubiner_distance;

/// Euclidean tolerance for merging repeated curve samples.
pub const DEDUP_TOL: f64 = 1e-12;

/// A point is on the boundary of the square when a coordinate has modulus at least `1 - BOUNDARY_TOL`.
pub const BOUNDARY_TOL: f64 = 1e-12;

const SQUARE_SLACK: f64 = 1e-14;

/// A point of the square `[-1, 1]^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Builds a point after checking it lies in the square.
    pub fn checked(x: f64, y: f64) -> Result<Self> {
        for v in [x, y] {
            if !(v.abs() <= 1.0 + SQUARE_SLACK) {
                return Err(Error::Domain { value: v });
            }
        }
        Ok(Point2 { x, y })
    }

    /// `(arccos x, arccos y)` with the arguments clamped to `[-1, 1]`.
    pub fn angles(&self) -> (f64, f64) {
        (self.x.clamp(-1.0, 1.0).acos(), self.y.clamp(-1.0, 1.0).acos())
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_on_boundary(&self, tol: f64) -> bool {
        self.x.abs() >= 1.0 - tol || self.y.abs() >= 1.0 - tol
    }

    pub fn neg(&self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeFamily {
    Mp,
    Padua,
    Emp,
    MeshA,
    MeshB,
}

impl NodeFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            NodeFamily::Mp => "mp",
            NodeFamily::Padua => "padua",
            NodeFamily::Emp => "emp",
            NodeFamily::MeshA => "mesh-a",
            NodeFamily::MeshB => "mesh-b",
        }
    }
}

/// An ordered family of nodes with optional weights and angle pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    pub family: NodeFamily,
    pub degree: i64,
    pub points: Vec<Point2>,
    pub weights: Option<Vec<f64>>,
    /// `(w, v)` with `x = cos w`, `y = cos v`.
    pub angles: Option<Vec<(f64, f64)>>,
}

impl NodeSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest distance from a point of either set to the nearest point of the other.
    pub fn hausdorff_distance(&self, other: &NodeSet) -> f64 {
        hausdorff(&self.points, &other.points)
    }
}

pub(crate) fn hausdorff(a: &[Point2], b: &[Point2]) -> f64 {
    let one_sided = |p: &[Point2], q: &[Point2]| {
        p.iter()
            .map(|u| q.iter().map(|v| u.distance(v)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    if a.is_empty() || b.is_empty() {
        return if a.len() == b.len() { 0.0 } else { f64::INFINITY };
    }
    one_sided(a, b).max(one_sided(b, a))
}

/// Number of MP nodes of degree `n`.
pub fn mp_cardinality(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

pub(crate) fn check_even_degree(n: i64) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidDegree {
            degree: n,
            reason: "degree must be at least 2",
        });
    }
    if n % 2 != 0 {
        return Err(Error::InvalidDegree {
            degree: n,
            reason: "degree must be even",
        });
    }
    Ok(n as usize)
}

/// Normalising constant `C_n = 8 / ((n+2)(n+3))` of the cubature weights.
pub fn weight_constant(n: usize) -> f64 {
    8.0 / ((n + 2) as f64 * (n + 3) as f64)
}

/// Index pairs `(m, j)` of the angle grid with `w = m pi/(nu+2)` and `v = j pi/(nu+3)`.
///
/// Odd `m` takes even `j`, even `m` takes odd `j`.
pub(crate) fn mp_index_grid(nu: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(mp_cardinality(nu));
    for m in 1..=nu + 1 {
        let first = if m % 2 == 1 { 2 } else { 1 };
        for j in (first..=nu + 2).step_by(2) {
            out.push((m, j));
        }
    }
    out
}

/// Angle pairs `(w, v)` of the MP grid of degree `nu`; odd `nu` is allowed.
pub fn mp_angle_grid(nu: i64) -> Result<Vec<(f64, f64)>> {
    if nu < 1 {
        return Err(Error::InvalidDegree {
            degree: nu,
            reason: "angle grid needs degree >= 1",
        });
    }
    let nu = nu as usize;
    let (a, b) = ((nu + 2) as f64, (nu + 3) as f64);
    Ok(mp_index_grid(nu)
        .into_iter()
        .map(|(m, j)| (m as f64 * PI / a, j as f64 * PI / b))
        .collect())
}

/// The Morrow-Patterson nodes of even degree `n`, with weights and angles.
pub fn morrow_patterson(n: i64) -> Result<NodeSet> {
    let n_us = check_even_degree(n)?;
    let angles = mp_angle_grid(n)?;
    let points: Vec<Point2> = angles
        .iter()
        .map(|&(w, v)| Point2::new(w.cos(), v.cos()))
        .collect();
    let c = weight_constant(n_us);
    let weights = points
        .iter()
        .map(|p| c * (1.0 - p.x * p.x) * (1.0 - p.y * p.y))
        .collect();
    Ok(NodeSet {
        family: NodeFamily::Mp,
        degree: n,
        points,
        weights: Some(weights),
        angles: Some(angles),
    })
}

/// Cubature weights `C_n (1 - x^2)(1 - y^2)` aligned with [`morrow_patterson`].
pub fn mp_weights(n: i64) -> Result<Vec<f64>> {
    Ok(morrow_patterson(n)?.weights.expect("MP sets carry weights"))
}

/// Point on the Lissajous curve `(±cos((n+3)t), ±cos((n+2)t))`.
///
/// `sign = -1` traces the curve whose samples give the Padua points of degree
/// `n+2`; `sign = +1` traces its reflection through the origin.
pub fn lissajous_point(n: i64, t: f64, sign: i8) -> Point2 {
    let s = if sign < 0 { -1.0 } else { 1.0 };
    Point2::new(
        s * ((n + 3) as f64 * t).cos(),
        s * ((n + 2) as f64 * t).cos(),
    )
}

/// Residual of the algebraic curve through [`lissajous_point`]:
/// `T_{n+2}(x) - sign * T_{n+3}(y)`.
pub fn lissajous_curve_residual(n: i64, p: Point2, sign: i8) -> Result<f64> {
    let s = if sign < 0 { -1.0 } else { 1.0 };
    Ok(cheb_t(n + 2, p.x)? - s * cheb_t(n + 3, p.y)?)
}

/// Padua points of degree `big_n` together with the raw-sample bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct PaduaSampling {
    pub set: NodeSet,
    /// Number of curve samples `N(N+1) + 1`.
    pub raw_samples: usize,
    /// How many samples landed on each distinct point, aligned with `set.points`.
    pub multiplicity: Vec<usize>,
}

impl PaduaSampling {
    /// Distinct points hit more than once (self-intersections of the curve).
    pub fn repeated(&self) -> usize {
        self.multiplicity.iter().filter(|&&k| k > 1).count()
    }
}

/// Samples the curve at `t_k = pi k / (N(N+1))`, `k = 0..=N(N+1)`, and merges
/// repeated samples.
pub fn padua_sampling(big_n: i64, sign: i8) -> Result<PaduaSampling> {
    if big_n < 1 {
        return Err(Error::InvalidDegree {
            degree: big_n,
            reason: "Padua degree must be at least 1",
        });
    }
    let steps = (big_n * (big_n + 1)) as usize;
    let n = big_n - 2;
    let mut points: Vec<Point2> = Vec::new();
    let mut multiplicity: Vec<usize> = Vec::new();
    for k in 0..=steps {
        let t = PI * k as f64 / steps as f64;
        let p = lissajous_point(n, t, sign);
        match points.iter().position(|q| q.distance(&p) < DEDUP_TOL) {
            Some(i) => multiplicity[i] += 1,
            None => {
                points.push(p);
                multiplicity.push(1);
            }
        }
    }
    Ok(PaduaSampling {
        set: NodeSet {
            family: NodeFamily::Padua,
            degree: big_n,
            points,
            weights: None,
            angles: None,
        },
        raw_samples: steps + 1,
        multiplicity,
    })
}

/// Padua points of degree `big_n`, `(N+1)(N+2)/2` of them.
pub fn padua(big_n: i64) -> Result<NodeSet> {
    Ok(padua_sampling(big_n, -1)?.set)
}

/// The MP nodes of degree `n` obtained by removing the boundary points from
/// the Padua points of degree `n + 2`, reordered and weighted like
/// [`morrow_patterson`].
pub fn mp_from_padua(n: i64) -> Result<NodeSet> {
    let n_us = check_even_degree(n)?;
    let pad = padua(n + 2)?;
    let (a, b) = ((n_us + 2) as f64, (n_us + 3) as f64);
    let mut indexed: Vec<((usize, usize), Point2)> = pad
        .points
        .into_iter()
        .filter(|p| !p.is_on_boundary(BOUNDARY_TOL))
        .map(|p| {
            let (w, v) = p.angles();
            (((w * a / PI).round() as usize, (v * b / PI).round() as usize), p)
        })
        .collect();
    indexed.sort_by_key(|&(idx, _)| idx);
    let c = weight_constant(n_us);
    let weights = indexed
        .iter()
        .map(|(_, p)| c * (1.0 - p.x * p.x) * (1.0 - p.y * p.y))
        .collect();
    let angles = indexed
        .iter()
        .map(|&((m, j), _)| (m as f64 * PI / a, j as f64 * PI / b))
        .collect();
    Ok(NodeSet {
        family: NodeFamily::Mp,
        degree: n,
        points: indexed.into_iter().map(|(_, p)| p).collect(),
        weights: Some(weights),
        angles: Some(angles),
    })
}

/// MP nodes rescaled by `1/cos(pi/(n+2))` in `x` and `1/cos(pi/(n+3))` in `y`.
pub fn extended_mp(n: i64) -> Result<NodeSet> {
    let n_us = check_even_degree(n)?;
    let alpha = (PI / (n_us + 2) as f64).cos();
    let beta = (PI / (n_us + 3) as f64).cos();
    let mp = morrow_patterson(n)?;
    let points = mp
        .points
        .iter()
        .map(|p| Point2::new((p.x / alpha).clamp(-1.0, 1.0), (p.y / beta).clamp(-1.0, 1.0)))
        .collect();
    Ok(NodeSet {
        family: NodeFamily::Emp,
        degree: n,
        points,
        weights: None,
        angles: None,
    })
}

/// A tensor grid of coordinates, listed in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl TensorGrid {
    pub fn len(&self) -> usize {
        self.xs.len() * self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The MP nodes as two interlacing rectangular grids.
///
/// `grid_u` holds the odd-`m` columns and `grid_x` the even-`m` columns. Grid
/// indices `(i, j)` run with `i` along `y` and `j` along `x`, so `grid_u` is
/// indexed by `I_{mu,nu}` and `grid_x` by `I_{r,s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterlacingDecomposition {
    pub degree: usize,
    pub mu: usize,
    pub nu: usize,
    pub r: usize,
    pub s: usize,
    pub grid_u: TensorGrid,
    pub grid_x: TensorGrid,
    pub k1: Vec<(usize, usize)>,
    pub k2: Vec<(usize, usize)>,
    pub lower_set: Vec<(usize, usize)>,
}

fn strictly_alternate(a: &[f64], b: &[f64]) -> bool {
    let mut merged: Vec<(f64, u8)> = a
        .iter()
        .map(|&v| (v, 0))
        .chain(b.iter().map(|&v| (v, 1)))
        .collect();
    merged.sort_by(|p, q| p.0.total_cmp(&q.0));
    merged.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 != w[1].1)
}

fn is_lower_set(set: &[(usize, usize)]) -> bool {
    set.iter().all(|&(i, j)| {
        (i == 0 || set.contains(&(i - 1, j))) && (j == 0 || set.contains(&(i, j - 1)))
    })
}

/// Splits `MP_n` into the odd- and even-column grids, checks that they
/// interlace and assembles the lower set `L`.
///
/// With `h = n/2` the indices are `(mu, nu) = (h, h)`, `(r, s) = (h, h - 1)`
/// and `K1` is the triangle `{i + j <= h - 1}`, which makes `L` the triangle
/// `{i + j <= n}`.
pub fn interlacing_decomposition(n: i64) -> Result<InterlacingDecomposition> {
    let n_us = check_even_degree(n)?;
    let h = n_us / 2;
    let (a, b) = ((n_us + 2) as f64, (n_us + 3) as f64);
    let sorted = |iter: Box<dyn Iterator<Item = f64>>| {
        let mut v: Vec<f64> = iter.collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let grid_u = TensorGrid {
        xs: sorted(Box::new((1..=n_us + 1).step_by(2).map(|m| (m as f64 * PI / a).cos()))),
        ys: sorted(Box::new((2..=n_us + 2).step_by(2).map(|j| (j as f64 * PI / b).cos()))),
    };
    let grid_x = TensorGrid {
        xs: sorted(Box::new((2..=n_us).step_by(2).map(|m| (m as f64 * PI / a).cos()))),
        ys: sorted(Box::new((1..=n_us + 1).step_by(2).map(|j| (j as f64 * PI / b).cos()))),
    };
    let (mu, nu, r, s) = (h, h, h, h - 1);
    if grid_u.ys.len() != mu + 1
        || grid_u.xs.len() != nu + 1
        || grid_x.ys.len() != r + 1
        || grid_x.xs.len() != s + 1
    {
        return Err(Error::Consistency("grid extents do not match the index sets".into()));
    }
    if !strictly_alternate(&grid_u.xs, &grid_x.xs) || !strictly_alternate(&grid_u.ys, &grid_x.ys) {
        return Err(Error::Consistency("grids do not interlace".into()));
    }

    let rect = |k: usize, l: usize| -> Vec<(usize, usize)> {
        (0..=k).flat_map(|i| (0..=l).map(move |j| (i, j))).collect()
    };
    let k1: Vec<(usize, usize)> = rect(r, s).into_iter().filter(|&(i, j)| i + j < h).collect();
    let k2: Vec<(usize, usize)> = rect(r, s)
        .into_iter()
        .filter(|p| !k1.contains(p))
        .map(|(i, j)| (r - i, s - j))
        .collect();
    if !is_lower_set(&k1) || !is_lower_set(&k2) {
        return Err(Error::Consistency("K1 or K2 is not a lower set".into()));
    }
    let mut lower_set = rect(mu, nu);
    lower_set.extend(k1.iter().map(|&(i, j)| (i + mu + 1, j)));
    lower_set.extend(k2.iter().map(|&(i, j)| (i, j + nu + 1)));
    lower_set.sort_unstable();
    lower_set.dedup();
    let expected = (mu + 1) * (nu + 1) + (r + 1) * (s + 1);
    if lower_set.len() != expected || expected != mp_cardinality(n_us) || !is_lower_set(&lower_set) {
        return Err(Error::Consistency(format!(
            "lower set has {} elements, expected {expected}",
            lower_set.len()
        )));
    }
    Ok(InterlacingDecomposition {
        degree: n_us,
        mu,
        nu,
        r,
        s,
        grid_u,
        grid_x,
        k1,
        k2,
        lower_set,
    })
}

/// `R^n_j(x1, x2) = U_j(x1) U_{n-j}(x2) + U_{n-j-1}(x1) U_j(x2)`.
pub fn r_polynomial(n: i64, j: i64, x1: f64, x2: f64) -> Result<f64> {
    if j < 0 || j > n {
        return Err(Error::InvalidDegree {
            degree: j,
            reason: "index j must lie in [0, n]",
        });
    }
    Ok(cheb_u(j, x1)? * cheb_u(n - j, x2)? + cheb_u(n - j - 1, x1)? * cheb_u(j, x2)?)
}

/// Nearest-neighbour Dubiner distances within `MP_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquispacingReport {
    pub degree: usize,
    pub min_nearest: f64,
    pub max_nearest: f64,
}

impl EquispacingReport {
    pub fn ratio(&self) -> f64 {
        self.max_nearest / self.min_nearest
    }
}

pub fn dubiner_equispacing_check(n: i64) -> Result<EquispacingReport> {
    let set = morrow_patterson(n)?;
    let pts = &set.points;
    let mut min_nearest = f64::INFINITY;
    let mut max_nearest: f64 = 0.0;
    for (i, p) in pts.iter().enumerate() {
        let mut nearest = f64::INFINITY;
        for (k, q) in pts.iter().enumerate() {
            if k != i {
                nearest = nearest.min(dubiner_distance(*p, *q)?);
            }
        }
        min_nearest = min_nearest.min(nearest);
        max_nearest = max_nearest.max(nearest);
    }
    Ok(EquispacingReport {
        degree: n as usize,
        min_nearest,
        max_nearest,
    })
}
