//! CSV and JSON serialisation of node sets and meshes, with every float
//! written to 17 significant digits.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::meshes::AdmissibleMesh;
use crate::nodes::{NodeSet, Point2};

/// Formats `v` with 17 significant digits; non-finite values become `nan`, `inf` or `-inf`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// A float that serialises to JSON with 17 significant digits, or `null` when not finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        RawValue::from_string(fmt_f64(self.0))
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

pub fn pair(p: Point2) -> [Num; 2] {
    [Num(p.x), Num(p.y)]
}

#[derive(Serialize)]
struct NodeSetJson<'a> {
    family: &'a str,
    degree: i64,
    points: Vec<[Num; 2]>,
    weights: Option<Vec<Num>>,
}

#[derive(Serialize)]
struct MeshJson<'a> {
    family: &'a str,
    degree: i64,
    nu: usize,
    mu: Option<Num>,
    points: Vec<[Num; 2]>,
    weights: Option<Vec<Num>>,
    extras: Vec<[Num; 2]>,
}

fn weights_json(set: &NodeSet) -> Option<Vec<Num>> {
    set.weights.as_ref().map(|w| w.iter().map(|&v| Num(v)).collect())
}

/// `{family, degree, points: [[x, y], ...], weights: [...] | null}`.
pub fn nodeset_json(set: &NodeSet) -> String {
    let doc = NodeSetJson {
        family: set.family.as_str(),
        degree: set.degree,
        points: set.points.iter().map(|&p| pair(p)).collect(),
        weights: weights_json(set),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serialises")
}

/// Node-set JSON plus `nu`, `mu` and the supplementary points under `extras`.
pub fn mesh_json(mesh: &AdmissibleMesh) -> String {
    let doc = MeshJson {
        family: mesh.base.family.as_str(),
        degree: mesh.base.degree,
        nu: mesh.nu,
        mu: mesh.mu.map(Num),
        points: mesh.base.points.iter().map(|&p| pair(p)).collect(),
        weights: weights_json(&mesh.base),
        extras: mesh.extras.iter().map(|&p| pair(p)).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serialises")
}

/// `x,y,weight` rows; the weight field is empty when the set has no weights.
pub fn nodeset_csv(set: &NodeSet) -> String {
    let mut out = String::from("x,y,weight\n");
    for (k, p) in set.points.iter().enumerate() {
        let w = set.weights.as_ref().map(|w| fmt_f64(w[k])).unwrap_or_default();
        out.push_str(&format!("{},{},{}\n", fmt_f64(p.x), fmt_f64(p.y), w));
    }
    out
}

/// `x,y,weight,extra` rows, with `extra = 1` on the supplementary points.
pub fn mesh_csv(mesh: &AdmissibleMesh) -> String {
    let mut out = String::from("x,y,weight,extra\n");
    let weights = mesh.base.weights.as_ref();
    for (k, p) in mesh.base.points.iter().enumerate() {
        let w = weights.map(|w| fmt_f64(w[k])).unwrap_or_default();
        out.push_str(&format!("{},{},{},0\n", fmt_f64(p.x), fmt_f64(p.y), w));
    }
    for p in &mesh.extras {
        out.push_str(&format!("{},{},,1\n", fmt_f64(p.x), fmt_f64(p.y)));
    }
    out
}
