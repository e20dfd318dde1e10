//! Interpolation at MP nodes, its reproducing kernel and the Lebesgue function.
//!
//! The interpolant is `L_n f(p) = sum_k w_k f_k K(node_k, p)` with the
//! cubature weights `w_k` and the truncated kernel
//! `K = sum_{i+j<=n} U_i(x_k) U_j(y_k) U_i(x) U_j(y)`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::chebkernel::{cheb_u_table, upsilon_closed_with_threshold, UpsilonArgs, SINGULAR_THRESHOLD};
use crate::error::{Error, Result};
use crate::meshes::AdmissibleMesh;
use crate::nodes::{check_even_degree, morrow_patterson, NodeSet, Point2};

/// Degree from which [`KernelMethod::Auto`] switches to the closed form.
pub const AUTO_FAST_MIN_DEGREE: usize = 12;

/// Relative tolerance under which two mesh values count as tied.
pub const ARGMAX_TIE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMethod {
    Direct,
    Fast,
    Auto,
}

impl KernelMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            KernelMethod::Direct => "direct",
            KernelMethod::Fast => "fast",
            KernelMethod::Auto => "auto",
        }
    }
}

impl std::str::FromStr for KernelMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "direct" => Ok(KernelMethod::Direct),
            "fast" => Ok(KernelMethod::Fast),
            "auto" => Ok(KernelMethod::Auto),
            other => Err(Error::Parameter(format!("unknown kernel method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEvalConfig {
    pub method: KernelMethod,
    pub singular_threshold: f64,
}

impl Default for KernelEvalConfig {
    fn default() -> Self {
        KernelEvalConfig {
            method: KernelMethod::Auto,
            singular_threshold: SINGULAR_THRESHOLD,
        }
    }
}

impl KernelEvalConfig {
    pub fn new(method: KernelMethod) -> Self {
        KernelEvalConfig {
            method,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.singular_threshold;
        if !(t > 0.0 && t < 1e-2) {
            return Err(Error::Parameter(format!(
                "singular threshold {t} is outside (0, 1e-2)"
            )));
        }
        Ok(())
    }

    /// The concrete method used at degree `n`.
    pub fn resolve(&self, n: usize) -> KernelMethod {
        match self.method {
            KernelMethod::Auto if n >= AUTO_FAST_MIN_DEGREE => KernelMethod::Fast,
            KernelMethod::Auto => KernelMethod::Direct,
            m => m,
        }
    }
}

fn check_angle(a: f64) -> Result<f64> {
    if !(-1e-14..=PI + 1e-14).contains(&a) {
        return Err(Error::Parameter(format!("angle {a} is outside [0, pi]")));
    }
    Ok(a.clamp(0.0, PI))
}

/// Kernel from `U` tables of the node and the point, by prefix sums in `j`.
fn kernel_from_tables(n: usize, uw: &[f64], uv: &[f64], ux: &[f64], uy: &[f64]) -> f64 {
    let mut prefix = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    for j in 0..=n {
        acc += uv[j] * uy[j];
        prefix.push(acc);
    }
    (0..=n).map(|i| uw[i] * ux[i] * prefix[n - i]).sum()
}

/// `K(node, point)` by direct summation; angles are `(arccos x, arccos y)`.
pub fn kernel_direct(n: i64, node: (f64, f64), point: (f64, f64)) -> Result<f64> {
    let n = check_even_degree(n)?;
    let mut tables = vec![vec![0.0; n + 1]; 4];
    for (t, a) in tables.iter_mut().zip([node.0, node.1, point.0, point.1]) {
        cheb_u_table(check_angle(a)?.cos(), t);
    }
    Ok(kernel_from_tables(n, &tables[0], &tables[1], &tables[2], &tables[3]))
}

fn guarded(v: f64, t: f64) -> Option<f64> {
    (v.abs() >= t).then_some(v)
}

/// Closed-form kernel, or `None` when a guarded denominator is too small.
fn kernel_closed(n: usize, w: f64, v: f64, theta: f64, phi: f64, t: f64) -> Option<f64> {
    let sin_theta = guarded(theta.sin(), t)?;
    let cos_half_theta = guarded((0.5 * theta).cos(), t)?;
    let sin_phi = guarded(phi.sin(), t)?;
    let sin_w = guarded(w.sin(), t)?;
    let sin_v = guarded(v.sin(), t)?;
    let zm = 0.5 * (w - theta);
    let zp = 0.5 * (w + theta);
    let sin_zm = guarded(zm.sin(), t)?;
    let sin_zp = guarded(zp.sin(), t)?;
    let n32 = n as u32;
    let um = upsilon_closed_with_threshold(UpsilonArgs::new(n32, v, phi, zm), t).ok()?;
    let up = upsilon_closed_with_threshold(UpsilonArgs::new(n32, v, phi, zp), t).ok()?;
    let cw = (0.5 * w).cos();
    let a = cw * cos_half_theta / (2.0 * sin_theta);
    let b = cw / (4.0 * cos_half_theta);
    let num = a * (um - up) + b * (zm.cos() / sin_zm * um + zp.cos() / sin_zp * up);
    Some(num / (sin_w * sin_w * sin_v * sin_phi))
}

/// A kernel value and whether the closed form had to fall back to direct summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub fallback: bool,
}

/// `K(node, point)` through the closed-form summation identities.
pub fn kernel_fast(
    n: i64,
    node: (f64, f64),
    point: (f64, f64),
    cfg: &KernelEvalConfig,
) -> Result<KernelValue> {
    cfg.validate()?;
    let n_us = check_even_degree(n)?;
    let (w, v) = (check_angle(node.0)?, check_angle(node.1)?);
    let (theta, phi) = (check_angle(point.0)?, check_angle(point.1)?);
    match kernel_closed(n_us, w, v, theta, phi, cfg.singular_threshold) {
        Some(value) => Ok(KernelValue {
            value,
            fallback: false,
        }),
        None => Ok(KernelValue {
            value: kernel_direct(n, node, point)?,
            fallback: true,
        }),
    }
}

/// A mesh point with its angles `(arccos x, arccos y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshPoint {
    pub point: Point2,
    pub angles: (f64, f64),
}

impl MeshPoint {
    pub fn from_point(point: Point2) -> Self {
        MeshPoint {
            point,
            angles: point.angles(),
        }
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        MeshPoint {
            point: Point2::new(theta.cos(), phi.cos()),
            angles: (theta, phi),
        }
    }
}

/// Anything whose Lebesgue function can be sampled on a mesh.
pub trait LebesgueSource: Sync {
    fn degree(&self) -> usize;

    fn nodes(&self) -> &NodeSet;

    /// `lambda(p)` and the number of kernel fallbacks used to get it.
    fn lebesgue_at(&self, p: &MeshPoint) -> (f64, usize);
}

/// Interpolation at `MP_n` with precomputed node tables.
#[derive(Debug, Clone)]
pub struct MpInterpolant {
    n: usize,
    nodes: NodeSet,
    weights: Vec<f64>,
    node_angles: Vec<(f64, f64)>,
    /// `(m - 1, j - 1)` grid indices per node.
    index: Vec<(usize, usize)>,
    /// `U_i(cos(m pi/(n+2)))`, `m = 1..=n+1`.
    col_tables: Vec<Vec<f64>>,
    /// `U_j(cos(j' pi/(n+3)))`, `j' = 1..=n+2`.
    row_tables: Vec<Vec<f64>>,
    method: KernelMethod,
    threshold: f64,
}

impl MpInterpolant {
    pub fn new(n: i64, cfg: KernelEvalConfig) -> Result<Self> {
        cfg.validate()?;
        let n_us = check_even_degree(n)?;
        let nodes = morrow_patterson(n)?;
        let weights = nodes.weights.clone().expect("MP sets carry weights");
        let node_angles = nodes.angles.clone().expect("MP sets carry angles");
        let (a, b) = ((n_us + 2) as f64, (n_us + 3) as f64);
        let index = node_angles
            .iter()
            .map(|&(w, v)| {
                (
                    (w * a / PI).round() as usize - 1,
                    (v * b / PI).round() as usize - 1,
                )
            })
            .collect();
        let table = |angle: f64| {
            let mut t = vec![0.0; n_us + 1];
            cheb_u_table(angle.cos(), &mut t);
            t
        };
        let col_tables = (1..=n_us + 1).map(|m| table(m as f64 * PI / a)).collect();
        let row_tables = (1..=n_us + 2).map(|j| table(j as f64 * PI / b)).collect();
        Ok(MpInterpolant {
            n: n_us,
            nodes,
            weights,
            node_angles,
            index,
            col_tables,
            row_tables,
            method: cfg.resolve(n_us),
            threshold: cfg.singular_threshold,
        })
    }

    pub fn method(&self) -> KernelMethod {
        self.method
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Kernel values `K(node_k, p)` for every node, plus the fallback count.
    pub fn kernels(&self, p: &MeshPoint) -> (Vec<f64>, usize) {
        match self.method {
            KernelMethod::Fast => self.kernels_fast(p),
            _ => (self.kernels_direct(p), 0),
        }
    }

    /// Values of the fundamental Lagrange polynomials at `p`.
    pub fn cardinals(&self, p: &MeshPoint) -> (Vec<f64>, usize) {
        let (mut k, fallbacks) = self.kernels(p);
        for (v, w) in k.iter_mut().zip(&self.weights) {
            *v *= w;
        }
        (k, fallbacks)
    }

    fn point_tables(&self, p: &MeshPoint) -> (Vec<f64>, Vec<f64>) {
        let mut ux = vec![0.0; self.n + 1];
        let mut uy = vec![0.0; self.n + 1];
        cheb_u_table(p.point.x, &mut ux);
        cheb_u_table(p.point.y, &mut uy);
        (ux, uy)
    }

    fn kernels_direct(&self, p: &MeshPoint) -> Vec<f64> {
        let n = self.n;
        let (ux, uy) = self.point_tables(p);
        let cols: Vec<Vec<f64>> = self
            .col_tables
            .iter()
            .map(|t| t.iter().zip(&ux).map(|(a, b)| a * b).collect())
            .collect();
        let prefixes: Vec<Vec<f64>> = self
            .row_tables
            .iter()
            .map(|t| {
                let mut acc = 0.0;
                t.iter()
                    .zip(&uy)
                    .map(|(a, b)| {
                        acc += a * b;
                        acc
                    })
                    .collect()
            })
            .collect();
        self.index
            .iter()
            .map(|&(c, r)| {
                let (a, b) = (&cols[c], &prefixes[r]);
                (0..=n).map(|i| a[i] * b[n - i]).sum()
            })
            .collect()
    }

    fn kernels_fast(&self, p: &MeshPoint) -> (Vec<f64>, usize) {
        let (theta, phi) = p.angles;
        let mut tables: Option<(Vec<f64>, Vec<f64>)> = None;
        let mut fallbacks = 0;
        let values = self
            .node_angles
            .iter()
            .zip(&self.index)
            .map(|(&(w, v), &(c, r))| {
                kernel_closed(self.n, w, v, theta, phi, self.threshold).unwrap_or_else(|| {
                    fallbacks += 1;
                    let (ux, uy) = tables.get_or_insert_with(|| self.point_tables(p));
                    kernel_from_tables(self.n, &self.col_tables[c], &self.row_tables[r], ux, uy)
                })
            })
            .collect();
        (values, fallbacks)
    }

    /// `L_n f(p)` from samples aligned with the MP nodes.
    pub fn interpolate(&self, samples: &[f64], p: &MeshPoint) -> Result<f64> {
        if samples.len() != self.nodes.len() {
            return Err(Error::Shape {
                expected: self.nodes.len(),
                found: samples.len(),
            });
        }
        let (card, _) = self.cardinals(p);
        Ok(card.iter().zip(samples).map(|(l, f)| l * f).sum())
    }
}

impl LebesgueSource for MpInterpolant {
    fn degree(&self) -> usize {
        self.n
    }

    fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    fn lebesgue_at(&self, p: &MeshPoint) -> (f64, usize) {
        let (k, fallbacks) = self.kernels(p);
        let value = k.iter().zip(&self.weights).map(|(k, w)| w * k.abs()).sum();
        (value, fallbacks)
    }
}

/// `L_n f(point)` for samples aligned with `morrow_patterson(n)`.
pub fn interpolate(n: i64, samples: &[f64], point: Point2, cfg: &KernelEvalConfig) -> Result<f64> {
    let point = Point2::checked(point.x, point.y)?;
    MpInterpolant::new(n, *cfg)?.interpolate(samples, &MeshPoint::from_point(point))
}

/// `lambda_n(point) = sum_k |l_k(point)|`.
pub fn lebesgue_function(n: i64, point: Point2, cfg: &KernelEvalConfig) -> Result<f64> {
    let point = Point2::checked(point.x, point.y)?;
    Ok(MpInterpolant::new(n, *cfg)?
        .lebesgue_at(&MeshPoint::from_point(point))
        .0)
}

/// The set on which the Lebesgue function is maximised.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshSpec {
    /// Tensor grid of `m` Chebyshev-Lobatto points per side.
    ChebyshevLobatto { m: usize },
    /// Tensor grid of `m` equispaced points per side.
    Equispaced { m: usize },
    Points(Vec<Point2>),
    Admissible(AdmissibleMesh),
}

impl MeshSpec {
    /// Chebyshev-Lobatto grid with `max(101, 4n+1)` points per side.
    pub fn default_for(n: usize) -> Self {
        MeshSpec::ChebyshevLobatto {
            m: default_side(n),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MeshSpec::ChebyshevLobatto { .. } => "cl",
            MeshSpec::Equispaced { .. } => "equi",
            MeshSpec::Points(_) => "points",
            MeshSpec::Admissible(_) => "admissible",
        }
    }

    /// Points per side for tensor grids.
    pub fn side(&self) -> Option<usize> {
        match self {
            MeshSpec::ChebyshevLobatto { m } | MeshSpec::Equispaced { m } => Some(*m),
            _ => None,
        }
    }

    /// Mesh points in row-major order: `x` ascending, then `y` ascending.
    pub fn points(&self) -> Result<Vec<MeshPoint>> {
        let pts = match self {
            MeshSpec::ChebyshevLobatto { m } => {
                let m = check_side(*m)?;
                let ang: Vec<f64> = (0..m)
                    .map(|i| (m - 1 - i) as f64 * PI / (m - 1) as f64)
                    .collect();
                ang.iter()
                    .flat_map(|&t| ang.iter().map(move |&f| MeshPoint::from_angles(t, f)))
                    .collect()
            }
            MeshSpec::Equispaced { m } => {
                let m = check_side(*m)?;
                let xs: Vec<f64> = (0..m)
                    .map(|i| -1.0 + 2.0 * i as f64 / (m - 1) as f64)
                    .collect();
                xs.iter()
                    .flat_map(|&x| xs.iter().map(move |&y| MeshPoint::from_point(Point2::new(x, y))))
                    .collect()
            }
            MeshSpec::Points(p) => p
                .iter()
                .map(|q| Point2::checked(q.x, q.y).map(MeshPoint::from_point))
                .collect::<Result<Vec<_>>>()?,
            MeshSpec::Admissible(mesh) => mesh
                .all_points()
                .into_iter()
                .map(MeshPoint::from_point)
                .collect(),
        };
        if pts.is_empty() {
            return Err(Error::Parameter("mesh is empty".into()));
        }
        Ok(pts)
    }
}

fn check_side(m: usize) -> Result<usize> {
    if m < 3 {
        return Err(Error::Parameter(format!(
            "mesh needs at least 3 points per side, got {m}"
        )));
    }
    Ok(m)
}

pub fn default_side(n: usize) -> usize {
    (4 * n + 1).max(101)
}

/// Lower reference curve `(0.7 n + 1)^2`.
pub fn fit_lower(n: usize) -> f64 {
    (0.7 * n as f64 + 1.0).powi(2)
}

/// Upper reference curve `(0.75 n + 1)^2`.
pub fn fit_upper(n: usize) -> f64 {
    (0.75 * n as f64 + 1.0).powi(2)
}

/// Observed corner value `(n+1)(n+2)/2`.
pub fn corner_formula(n: usize) -> f64 {
    ((n + 1) * (n + 2)) as f64 / 2.0
}

/// `sqrt((n+1)(n+2)(n+3)(n+4)(2n^2+10n+15)) / (6 sqrt 10)`.
pub fn bound_hyperinterp(n: usize) -> f64 {
    let n = n as f64;
    ((n + 1.0) * (n + 2.0) * (n + 3.0) * (n + 4.0) * (2.0 * n * n + 10.0 * n + 15.0)).sqrt()
        / (6.0 * 10f64.sqrt())
}

/// Half-width of the sub-square on which `4 C_n (n+1)^3 (n/2+1)` bounds `lambda_n`.
pub const SUBSQUARE_DELTA: f64 = 0.866_025_403_784_438_6;

/// Bound `C_n (n+1)^3 (n/2+1) / (1 - delta^2)` for `lambda_n` on `[-delta, delta]^2`.
///
/// At `delta = sqrt(3)/2` this is `4 C_n (n+1)^3 (n/2+1)`.
pub fn subsquare_bound(n: usize, delta: f64) -> Result<f64> {
    check_even_degree(n as i64)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!("delta {delta} is outside (0, 1)")));
    }
    let c = crate::nodes::weight_constant(n);
    let n = n as f64;
    Ok(c * (n + 1.0).powi(3) * (n / 2.0 + 1.0) / (1.0 - delta * delta))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LebesgueReport {
    pub degree: usize,
    pub mesh_kind: String,
    pub mesh_side: Option<usize>,
    pub mesh_size: usize,
    pub constant_estimate: f64,
    pub certified_upper_bound: Option<f64>,
    pub argmax: Point2,
    /// `lambda_n(1, 1)`.
    pub corner_value: f64,
    pub fit_lower: f64,
    pub fit_upper: f64,
    pub cubic_bound: f64,
    pub fast_fallback_count: usize,
}

/// A full mesh scan: the report plus every sampled value in mesh order.
#[derive(Debug, Clone)]
pub struct LebesgueScan {
    pub report: LebesgueReport,
    pub points: Vec<MeshPoint>,
    pub values: Vec<f64>,
}

/// Index of the largest value; near-ties go to the lexicographically smallest point.
pub fn argmax_index(points: &[MeshPoint], values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        let Some(b) = best else {
            best = Some(i);
            continue;
        };
        let bv = values[b];
        let tol = ARGMAX_TIE_TOL * bv.abs().max(v.abs());
        if v > bv + tol {
            best = Some(i);
        } else if (v - bv).abs() <= tol {
            let (p, q) = (points[i].point, points[b].point);
            if p.x < q.x || (p.x == q.x && p.y < q.y) {
                best = Some(i);
            }
        }
    }
    best
}

/// Evaluates the Lebesgue function on every mesh point, in mesh order.
pub fn lebesgue_values<S: LebesgueSource>(src: &S, points: &[MeshPoint]) -> (Vec<f64>, usize) {
    let pairs: Vec<(f64, usize)> = points.par_iter().map(|p| src.lebesgue_at(p)).collect();
    let fallbacks = pairs.iter().map(|p| p.1).sum();
    (pairs.into_iter().map(|p| p.0).collect(), fallbacks)
}

/// Maximises the Lebesgue function of `src` over `mesh`.
pub fn lebesgue_scan<S: LebesgueSource>(src: &S, mesh: &MeshSpec) -> Result<LebesgueScan> {
    let n = src.degree();
    let certified_factor = match mesh {
        MeshSpec::Admissible(m) if m.certifies(n) => m.certified_factor(),
        MeshSpec::Admissible(m) => {
            return Err(Error::Parameter(format!(
                "admissible mesh of degree {} does not certify degree {n}",
                m.nu
            )))
        }
        _ => None,
    };
    let points = mesh.points()?;
    let (values, fallbacks) = lebesgue_values(src, &points);
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        let p = points[i].point;
        return Err(Error::NonFinite {
            index: i,
            x: p.x,
            y: p.y,
            value: values[i],
        });
    }
    let best = argmax_index(&points, &values).expect("mesh is nonempty");
    let estimate = values[best];
    let (corner_value, corner_fallbacks) = src.lebesgue_at(&MeshPoint::from_angles(0.0, 0.0));
    let report = LebesgueReport {
        degree: n,
        mesh_kind: mesh.kind().to_string(),
        mesh_side: mesh.side(),
        mesh_size: points.len(),
        constant_estimate: estimate,
        certified_upper_bound: certified_factor.map(|f| f * estimate),
        argmax: points[best].point,
        corner_value,
        fit_lower: fit_lower(n),
        fit_upper: fit_upper(n),
        cubic_bound: bound_hyperinterp(n),
        fast_fallback_count: fallbacks + corner_fallbacks,
    };
    Ok(LebesgueScan {
        report,
        points,
        values,
    })
}

/// Lebesgue constant of `MP_n` estimated on `mesh`.
pub fn lebesgue_constant(n: i64, mesh: &MeshSpec, cfg: &KernelEvalConfig) -> Result<LebesgueReport> {
    let interp = MpInterpolant::new(n, *cfg)?;
    Ok(lebesgue_scan(&interp, mesh)?.report)
}
