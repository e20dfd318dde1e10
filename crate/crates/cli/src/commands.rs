use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use mpnodes::cubature::{basis_moment, cubature_rule};
use mpnodes::export::{fmt_f64, mesh_csv, mesh_json, nodeset_csv, nodeset_json, pair, Num};
use mpnodes::interp::{
    corner_formula, default_side, lebesgue_scan, KernelEvalConfig, KernelMethod, LebesgueScan,
    LebesgueSource, MeshSpec, MpInterpolant,
};
use mpnodes::lagrange::LagrangeInterpolant;
use mpnodes::meshes::{certified_sup_norm, mesh_a, mesh_b, MeshVariant};
use mpnodes::nodes::{extended_mp, lissajous_point, morrow_patterson, padua};
use mpnodes::poly::OrthoPoly;

use crate::{Common, FamilyArg, Format, GridArg, GridOpts, GrowthArgs, InterpFamily, LebesgueArgs, MethodArg, VariantArg};

/// Largest cubature error accepted by `cubature-check`.
const CUBATURE_TOL: f64 = 1e-11;

/// Mesh points sampled for the fast/direct agreement diagnostic.
const AGREEMENT_SAMPLES: usize = 2000;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(anyhow::Error),
    Invariant(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "{e:#}"),
            CliError::Invariant(m) => write!(f, "invariant failed: {m}"),
        }
    }
}

impl From<mpnodes::Error> for CliError {
    fn from(e: mpnodes::Error) -> Self {
        use mpnodes::Error as E;
        match e {
            E::Consistency(_) | E::NonFinite { .. } | E::NotUnisolvent => CliError::Invariant(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn write_to(path: &Path, content: &str) -> CliResult {
    fs::write(path, content)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(CliError::Io)
}

fn emit(common: &Common, content: &str) -> CliResult {
    match &common.out {
        Some(path) => write_to(path, content),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .context("cannot write to standard output")
            .map_err(CliError::Io),
    }
}

pub fn nodes(common: &Common, family: FamilyArg, n: i64) -> CliResult {
    let json = common.format == Format::Json;
    let text = match family {
        FamilyArg::MeshA | FamilyArg::MeshB => {
            let mesh = if family == FamilyArg::MeshA { mesh_a(n)? } else { mesh_b(n)? };
            if json { mesh_json(&mesh) } else { mesh_csv(&mesh) }
        }
        _ => {
            let set = match family {
                FamilyArg::Mp => morrow_patterson(n)?,
                FamilyArg::Padua => padua(n)?,
                _ => extended_mp(n)?,
            };
            if json { nodeset_json(&set) } else { nodeset_csv(&set) }
        }
    };
    emit(common, &text)
}

fn method(m: MethodArg) -> KernelMethod {
    match m {
        MethodArg::Direct => KernelMethod::Direct,
        MethodArg::Fast => KernelMethod::Fast,
        MethodArg::Auto => KernelMethod::Auto,
    }
}

fn mesh_for(n: i64, opts: &GridOpts) -> CliResult<MeshSpec> {
    let m = opts.m.unwrap_or_else(|| default_side(n.max(0) as usize));
    if m < 3 {
        return Err(CliError::Usage(format!("--m must be at least 3, got {m}")));
    }
    Ok(match opts.grid {
        GridArg::Cl => MeshSpec::ChebyshevLobatto { m },
        GridArg::Equi => MeshSpec::Equispaced { m },
    })
}

fn scan(n: i64, opts: &GridOpts) -> CliResult<LebesgueScan> {
    let mesh = mesh_for(n, opts)?;
    Ok(match opts.family {
        InterpFamily::Mp => {
            let interp = MpInterpolant::new(n, KernelEvalConfig::new(method(opts.method)))?;
            lebesgue_scan(&interp, &mesh)?
        }
        InterpFamily::Emp => {
            let interp = LagrangeInterpolant::new(extended_mp(n)?)?;
            lebesgue_scan(&interp, &mesh)?
        }
    })
}

/// Largest relative gap between fast and direct Lebesgue values on a spread of mesh points.
fn agreement(n: i64, scan: &LebesgueScan) -> CliResult<f64> {
    let direct = MpInterpolant::new(n, KernelEvalConfig::new(KernelMethod::Direct))?;
    let fast = MpInterpolant::new(n, KernelEvalConfig::new(KernelMethod::Fast))?;
    let stride = scan.points.len().div_ceil(AGREEMENT_SAMPLES).max(1);
    Ok(scan
        .points
        .iter()
        .step_by(stride)
        .map(|p| {
            let a = direct.lebesgue_at(p).0;
            let b = fast.lebesgue_at(p).0;
            (a - b).abs() / a.abs().max(1.0)
        })
        .fold(0.0, f64::max))
}

#[derive(Serialize)]
struct MeshDesc {
    kind: String,
    m: Option<usize>,
    size: usize,
}

#[derive(Serialize)]
struct ReportJson {
    n: usize,
    family: &'static str,
    method: &'static str,
    mesh: MeshDesc,
    constant: Num,
    certified_upper_bound: Option<Num>,
    argmax: [Num; 2],
    corner_value: Num,
    corner_formula: Num,
    fit_lower: Num,
    fit_upper: Num,
    cubic_bound: Num,
    fast_fallback_count: usize,
    fast_direct_max_rel_diff: Option<Num>,
}

fn report_path(args: &LebesgueArgs, out: &Path) -> PathBuf {
    args.report
        .clone()
        .unwrap_or_else(|| out.with_extension("report.json"))
}

pub fn lebesgue(common: &Common, args: &LebesgueArgs) -> CliResult {
    let result = scan(args.n, &args.grid)?;
    let (family, method_name, diff) = match args.grid.family {
        InterpFamily::Mp => {
            let resolved = KernelEvalConfig::new(method(args.grid.method)).resolve(result.report.degree);
            ("mp", resolved.as_str(), Some(Num(agreement(args.n, &result)?)))
        }
        InterpFamily::Emp => ("emp", "lagrange", None),
    };
    let r = &result.report;
    let doc = ReportJson {
        n: r.degree,
        family,
        method: method_name,
        mesh: MeshDesc {
            kind: r.mesh_kind.clone(),
            m: r.mesh_side,
            size: r.mesh_size,
        },
        constant: Num(r.constant_estimate),
        certified_upper_bound: r.certified_upper_bound.map(Num),
        argmax: pair(r.argmax),
        corner_value: Num(r.corner_value),
        corner_formula: Num(corner_formula(r.degree)),
        fit_lower: Num(r.fit_lower),
        fit_upper: Num(r.fit_upper),
        cubic_bound: Num(r.cubic_bound),
        fast_fallback_count: r.fast_fallback_count,
        fast_direct_max_rel_diff: diff,
    };
    let json = serde_json::to_string_pretty(&doc).expect("plain data serialises") + "\n";
    match &common.out {
        Some(out) => {
            let mut csv = String::from("x,y,lambda\n");
            for (p, v) in result.points.iter().zip(&result.values) {
                csv.push_str(&format!("{},{},{}\n", fmt_f64(p.point.x), fmt_f64(p.point.y), fmt_f64(*v)));
            }
            write_to(out, &csv)?;
            write_to(&report_path(args, out), &json)
        }
        None => emit(common, &json),
    }
}

pub fn growth(common: &Common, args: &GrowthArgs) -> CliResult {
    let (lo, hi, step) = (args.n_min, args.n_max, args.step);
    if lo < 2 || lo % 2 != 0 || hi < lo || step < 2 || step % 2 != 0 {
        return Err(CliError::Usage(format!(
            "need even 2 <= n-min <= n-max and an even step >= 2, got {lo}..{hi} step {step}"
        )));
    }
    let mut csv = String::from(
        "n,lambda,corner,corner_formula,fit_lower,fit_upper,cubic_bound,mesh_size,seconds\n",
    );
    let mut worst_formula = (0.0f64, 0usize);
    let mut worst_corner = 0.0f64;
    let mut sandwich = Vec::new();
    let mut cubic = Vec::new();
    for n in (lo..=hi).step_by(step as usize) {
        let start = Instant::now();
        let r = scan(n, &args.grid)?.report;
        let seconds = if args.timings { start.elapsed().as_secs_f64() } else { 0.0 };
        let lambda = r.constant_estimate;
        let formula = corner_formula(r.degree);
        let dev = (lambda - formula).abs() / lambda;
        if dev > worst_formula.0 {
            worst_formula = (dev, r.degree);
        }
        worst_corner = worst_corner.max((lambda - r.corner_value).abs() / lambda);
        if !(r.fit_lower <= lambda && lambda <= r.fit_upper) {
            sandwich.push(r.degree);
        }
        if lambda > r.cubic_bound {
            cubic.push(r.degree);
        }
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.degree,
            fmt_f64(lambda),
            fmt_f64(r.corner_value),
            fmt_f64(formula),
            fmt_f64(r.fit_lower),
            fmt_f64(r.fit_upper),
            fmt_f64(r.cubic_bound),
            r.mesh_size,
            fmt_f64(seconds)
        ));
    }
    emit(common, &csv)?;
    eprintln!(
        "growth: max relative deviation of lambda from (n+1)(n+2)/2 is {:.3e} (n={}), from the corner value {:.3e}; sandwich violations at n = {:?}",
        worst_formula.0, worst_formula.1, worst_corner, sandwich
    );
    if !cubic.is_empty() {
        return Err(CliError::Invariant(format!("lambda exceeds the cubic bound at n = {cubic:?}")));
    }
    Ok(())
}

pub fn cubature_check(common: &Common, n: i64, sweep: bool) -> CliResult {
    let degrees: Vec<i64> = if sweep { (2..=n).step_by(2).collect() } else { vec![n] };
    if degrees.is_empty() {
        return Err(CliError::Usage(format!("no even degree in 2..={n}")));
    }
    let mut csv = String::from("n,i,j,value,abs_error\n");
    let mut worst = 0.0f64;
    for d in degrees {
        let rule = cubature_rule(d)?;
        let top = rule.exactness;
        for i in 0..=top {
            for j in 0..=top - i {
                let value = basis_moment(&rule, i, j);
                let err = (value - if i == 0 && j == 0 { 1.0 } else { 0.0 }).abs();
                worst = worst.max(err);
                csv.push_str(&format!("{d},{i},{j},{},{}\n", fmt_f64(value), fmt_f64(err)));
            }
        }
    }
    emit(common, &csv)?;
    eprintln!("cubature-check: max abs error {worst:.3e}");
    if !(worst < CUBATURE_TOL) {
        return Err(CliError::Invariant(format!(
            "cubature error {worst:.3e} is not below {CUBATURE_TOL:e}"
        )));
    }
    Ok(())
}

pub fn mesh_certify(
    common: &Common,
    n: usize,
    mu: f64,
    variant: VariantArg,
    trials: usize,
    fine: usize,
) -> CliResult {
    if !(mu > 2.0) {
        return Err(CliError::Usage(format!("--mu must exceed 2, got {mu}")));
    }
    if trials == 0 || fine < 3 {
        return Err(CliError::Usage("--trials must be positive and --fine at least 3".into()));
    }
    let variant = match variant {
        VariantArg::A => MeshVariant::A,
        VariantArg::B => MeshVariant::B,
        VariantArg::Mp2 => MeshVariant::Mp2,
    };
    let fine_pts = MeshSpec::ChebyshevLobatto { m: fine }.points()?;
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let mut csv = String::from("trial,n,variant,mesh_size,mesh_max,mesh_bound,fine_norm,ratio,violation\n");
    let mut violations = 0;
    for trial in 0..trials {
        let p = OrthoPoly::random(n, &mut rng);
        let (bound, mesh) = certified_sup_norm(|q| p.eval(q), n, mu, variant)?;
        let factor = mesh.certified_factor().expect("mu is declared");
        let mesh_max = bound / factor;
        let norm = fine_pts.iter().map(|q| p.eval(q.point).abs()).fold(0.0, f64::max);
        let violation = norm > bound;
        violations += violation as usize;
        csv.push_str(&format!(
            "{trial},{n},{},{},{},{},{},{},{}\n",
            variant.as_str(),
            mesh.len(),
            fmt_f64(mesh_max),
            fmt_f64(bound),
            fmt_f64(norm),
            fmt_f64(norm / mesh_max),
            violation as u8
        ));
    }
    emit(common, &csv)?;
    eprintln!("mesh-certify: {violations} violations in {trials} trials");
    if violations > 0 {
        return Err(CliError::Invariant(format!("{violations} certified bounds violated")));
    }
    Ok(())
}

pub fn curve(common: &Common, n: i64, samples: usize) -> CliResult {
    if n < -1 || samples < 2 {
        return Err(CliError::Usage(format!(
            "need n >= -1 and at least 2 samples, got n={n}, samples={samples}"
        )));
    }
    let mut csv = String::from("t,x,y\n");
    for k in 0..samples {
        let t = std::f64::consts::PI * k as f64 / (samples - 1) as f64;
        let p = lissajous_point(n, t, -1);
        csv.push_str(&format!("{},{},{}\n", fmt_f64(t), fmt_f64(p.x), fmt_f64(p.y)));
    }
    emit(common, &csv)
}
