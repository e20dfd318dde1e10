//! Dubiner-metric geometry and the admissible meshes built from MP angle grids.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::nodes::{mp_angle_grid, NodeFamily, NodeSet, Point2};

/// `max(|acos x - acos a|, |acos y - acos b|)`.
pub fn dubiner_distance(p: Point2, q: Point2) -> Result<f64> {
    let p = Point2::checked(p.x, p.y)?;
    let q = Point2::checked(q.x, q.y)?;
    let (a, b) = p.angles();
    let (c, d) = q.angles();
    Ok((a - c).abs().max((b - d).abs()))
}

/// Which admissible mesh certifies a given degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshVariant {
    /// `A_nu` with `nu = ceil(mu n)`.
    A,
    /// `B_nu` with `nu = ceil(mu n)`.
    B,
    /// The bare MP grid of degree `ceil(2 mu n)`.
    Mp2,
}

impl MeshVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            MeshVariant::A => "A",
            MeshVariant::B => "B",
            MeshVariant::Mp2 => "MP2",
        }
    }
}

impl std::str::FromStr for MeshVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(MeshVariant::A),
            "b" => Ok(MeshVariant::B),
            "mp2" => Ok(MeshVariant::Mp2),
            other => Err(Error::Parameter(format!("unknown mesh variant `{other}`"))),
        }
    }
}

/// An MP angle grid plus up to two supplementary points.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleMesh {
    pub base: NodeSet,
    pub extras: Vec<Point2>,
    pub nu: usize,
    /// Declared when the mesh was built to certify a degree.
    pub mu: Option<f64>,
}

impl AdmissibleMesh {
    /// `1 / cos(pi / mu)`, when `mu` is declared.
    pub fn certified_factor(&self) -> Option<f64> {
        self.mu.map(|mu| 1.0 / (PI / mu).cos())
    }

    /// Base points followed by the extras.
    pub fn all_points(&self) -> Vec<Point2> {
        self.base.points.iter().chain(&self.extras).copied().collect()
    }

    pub fn len(&self) -> usize {
        self.base.len() + self.extras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether this mesh certifies polynomials of total degree `n`.
    pub fn certifies(&self, n: usize) -> bool {
        match self.mu {
            Some(mu) if mu > 2.0 => {
                let needed = (mu * n as f64).ceil() as usize;
                match self.base.family {
                    NodeFamily::MeshA | NodeFamily::MeshB => self.nu >= needed.max(1),
                    _ => self.nu >= (2.0 * mu * n as f64).ceil() as usize,
                }
            }
            _ => false,
        }
    }
}

fn grid_set(nu: usize, family: NodeFamily) -> NodeSet {
    let angles = mp_angle_grid(nu as i64).expect("nu >= 1");
    NodeSet {
        family,
        degree: nu as i64,
        points: angles
            .iter()
            .map(|&(w, v)| Point2::new(w.cos(), v.cos()))
            .collect(),
        weights: None,
        angles: Some(angles),
    }
}

fn check_nu(nu: i64) -> Result<usize> {
    if nu < 1 {
        return Err(Error::InvalidDegree {
            degree: nu,
            reason: "mesh degree must be at least 1",
        });
    }
    Ok(nu as usize)
}

/// `A_nu`: the MP grid with the corners `(1,1),(-1,1)` (even `nu`) or `(1,1),(1,-1)` (odd `nu`).
pub fn mesh_a(nu: i64) -> Result<AdmissibleMesh> {
    let nu = check_nu(nu)?;
    let second = if nu % 2 == 0 {
        Point2::new(-1.0, 1.0)
    } else {
        Point2::new(1.0, -1.0)
    };
    Ok(AdmissibleMesh {
        base: grid_set(nu, NodeFamily::MeshA),
        extras: vec![Point2::new(1.0, 1.0), second],
        nu,
        mu: None,
    })
}

/// `B_nu`: the MP grid with two interior supplements next to the corners of `A_nu`.
pub fn mesh_b(nu: i64) -> Result<AdmissibleMesh> {
    let nu = check_nu(nu)?;
    let (a, b) = ((nu + 2) as f64, (nu + 3) as f64);
    let first = Point2::new((PI / a).cos(), (PI / b).cos());
    let second = if nu % 2 == 0 {
        Point2::new(((nu + 1) as f64 * PI / a).cos(), (PI / b).cos())
    } else {
        Point2::new((PI / a).cos(), ((nu + 2) as f64 * PI / b).cos())
    };
    Ok(AdmissibleMesh {
        base: grid_set(nu, NodeFamily::MeshB),
        extras: vec![first, second],
        nu,
        mu: None,
    })
}

/// The bare MP grid of degree `nu` (any parity) viewed as a mesh.
pub fn mesh_mp(nu: i64) -> Result<AdmissibleMesh> {
    let nu = check_nu(nu)?;
    Ok(AdmissibleMesh {
        base: grid_set(nu, NodeFamily::Mp),
        extras: Vec::new(),
        nu,
        mu: None,
    })
}

/// The mesh of the given variant that certifies degree `n` with factor `1/cos(pi/mu)`.
pub fn admissible_mesh(n: usize, mu: f64, variant: MeshVariant) -> Result<AdmissibleMesh> {
    if !(mu > 2.0) || !mu.is_finite() {
        return Err(Error::Parameter(format!("mu must exceed 2, got {mu}")));
    }
    let nu = |factor: f64| ((factor * mu * n as f64).ceil() as i64).max(1);
    let mut mesh = match variant {
        MeshVariant::A => mesh_a(nu(1.0))?,
        MeshVariant::B => mesh_b(nu(1.0))?,
        MeshVariant::Mp2 => mesh_mp(nu(2.0))?,
    };
    mesh.mu = Some(mu);
    Ok(mesh)
}

/// Points sharing one value of `arccos x`, with their sorted `arccos y`.
struct Column {
    a: f64,
    bs: Vec<f64>,
}

fn columns(points: &[Point2]) -> Vec<Column> {
    let mut pairs: Vec<(f64, f64)> = points.iter().map(|p| p.angles()).collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    let mut cols: Vec<Column> = Vec::new();
    for (a, b) in pairs {
        match cols.last_mut() {
            Some(c) if (c.a - a).abs() < 1e-13 => c.bs.push(b),
            _ => cols.push(Column { a, bs: vec![b] }),
        }
    }
    cols
}

fn nearest_gap(sorted: &[f64], t: f64) -> f64 {
    let i = sorted.partition_point(|&b| b < t);
    let mut d = f64::INFINITY;
    if i < sorted.len() {
        d = d.min(sorted[i] - t);
    }
    if i > 0 {
        d = d.min(t - sorted[i - 1]);
    }
    d
}

/// Dubiner covering radius of `points`, estimated on a `density x density`
/// grid of angle pairs spanning `[0, pi]^2`.
pub fn covering_radius(points: &[Point2], density: usize) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Parameter("mesh is empty".into()));
    }
    if density < 100 {
        return Err(Error::Parameter(format!("probe density {density} is below 100")));
    }
    let cols = columns(points);
    let probe: Vec<f64> = (0..density)
        .map(|i| PI * i as f64 / (density - 1) as f64)
        .collect();
    // gap[c][k]: distance from probe[k] to the nearest arccos y of column c
    let gaps: Vec<Vec<f64>> = cols
        .iter()
        .map(|c| probe.iter().map(|&t| nearest_gap(&c.bs, t)).collect())
        .collect();
    let row_max: Vec<f64> = probe
        .par_iter()
        .map(|&theta| {
            let dx: Vec<f64> = cols.iter().map(|c| (theta - c.a).abs()).collect();
            (0..density)
                .map(|k| {
                    dx.iter()
                        .zip(&gaps)
                        .fold(f64::INFINITY, |m, (&d, g)| m.min(d.max(g[k])))
                })
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(row_max.into_iter().fold(0.0, f64::max))
}

/// Upper bound for `sup_Q |p|`: `1/cos(pi/mu)` times the maximum of `|p|` on the mesh.
pub fn certified_sup_norm<F>(
    poly_eval: F,
    n: usize,
    mu: f64,
    variant: MeshVariant,
) -> Result<(f64, AdmissibleMesh)>
where
    F: Fn(Point2) -> f64,
{
    let mesh = admissible_mesh(n, mu, variant)?;
    let factor = mesh.certified_factor().expect("mu is declared");
    let max = mesh
        .all_points()
        .into_iter()
        .map(|p| poly_eval(p).abs())
        .fold(0.0, f64::max);
    Ok((factor * max, mesh))
}
