//! `ckem` — batch front-end for the toolkit: closed-form polytope
//! integrals, the volume functional and its Futaki obstruction,
//! critical-point searches, parameter scans, and the CP^1-bundle ODE
//! construction.
//!
//! Exit codes: 0 success, 1 input error, 2 domain (positivity) error,
//! 3 solver non-convergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ckem::bundle_ode::{certify_positivity, cm_scan, solve_psi, ODE_CSV_HEADER};
use ckem::critical::{
    classify_against_family, family_scan, find_critical_points, CriticalPoint,
    SCAN_CSV_HEADER,
};
use ckem::functional::{futaki_invariant, normalize_to_tilde, volume_functional_sliced};
use ckem::functional::volume_functional;
use ckem::geometry::{make_family, AffineFn, Family, Polytope, SliceConstraint};
use ckem::integrals::{
    boundary_moment_integral, boundary_power_integral, interior_power_integral,
    IntegralReport,
};
use ckem::scalar::rat_from_f64;
use ckem::{CkemError, Exec};

const CSV_VERSION: &str = "# ckem-csv v1";

#[derive(Parser)]
#[command(name = "ckem", version, about = "Toric cKEM volume-functional toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Disable data parallelism (also capped by CKEM_THREADS).
    #[arg(long, global = true)]
    sequential: bool,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct GeomArgs {
    /// Polytope preset: cp2 | p1xp1 | blowup | hirzebruch.
    #[arg(long, conflicts_with = "polytope")]
    family: Option<String>,
    /// Family parameter p (p1xp1: p >= 1; blowup/hirzebruch: 0 < p < 1).
    #[arg(long)]
    p: Option<f64>,
    /// Hirzebruch twist q >= 1.
    #[arg(long)]
    q: Option<u32>,
    /// Polytope JSON file: {"label": ..., "vertices": [[x, y], ...]}.
    #[arg(long)]
    polytope: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form integral of mu1^i mu2^j f^-k over the polygon or its
    /// boundary, with coefficient derivatives.
    Integrate {
        #[command(flatten)]
        geom: GeomArgs,
        /// Affine function "k1,k2,c0".
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, value_enum)]
        region: Region,
        /// Power k >= 1.
        #[arg(long)]
        power: i64,
        /// Moment exponents "i,j" (default "0,0").
        #[arg(long)]
        moment: Option<String>,
    },
    /// Volume functional V, the d- and c-constants, Futaki components and
    /// the V^2 gradient at one positive affine function.
    Volume {
        #[command(flatten)]
        geom: GeomArgs,
        /// Affine function "k1,k2,c0".
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        /// Also reduce the gradient on a slice: family | c0=1 | "s1,s2,s0".
        #[arg(long, allow_hyphen_values = true)]
        slice: Option<String>,
    },
    /// cKEM-Futaki invariant, raw and after d = 1 normalization.
    Futaki {
        #[command(flatten)]
        geom: GeomArgs,
        /// Affine function "k1,k2,c0".
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
    /// Multistart Newton search for critical points of V^2 on a slice.
    Critical {
        #[command(flatten)]
        geom: GeomArgs,
        /// Slice: family | c0=1 | "s1,s2,s0" (default family when a preset is given).
        #[arg(long, allow_hyphen_values = true)]
        slice: Option<String>,
        /// Seed grid resolution per nested box.
        #[arg(long, default_value_t = 10)]
        grid: usize,
        /// Gradient-norm tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// One-parameter family scan with solution-set transition thresholds.
    Scan {
        /// Parameterized family: p1xp1 | blowup | hirzebruch.
        #[arg(long)]
        family: String,
        /// Hirzebruch twist q >= 1.
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        p_min: f64,
        #[arg(long)]
        p_max: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = 8)]
        grid: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Profile function Psi on [t0, t1] for the CP^1-bundle construction,
    /// with its positivity certificate.
    Ode {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        t0: f64,
        #[arg(long)]
        t1: f64,
    },
    /// Scan c_{t0,t0+1,m} over t0 and optionally invert a target value.
    CmScan {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 1e-4)]
        t0_min: f64,
        #[arg(long, default_value_t = 1e6)]
        t0_max: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Target base curvature c to invert for t0.
        #[arg(long)]
        target: Option<f64>,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Region {
    Interior,
    Boundary,
}

/// A failure carrying its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: msg.into(),
        }
    }
}

impl From<CkemError> for Failure {
    fn from(e: CkemError) -> Self {
        let code = match &e {
            CkemError::InvalidPolytope(_) => 1,
            CkemError::Domain(_) | CkemError::Positivity { .. } | CkemError::Contract(_) => 2,
            CkemError::NonConvergence(_) | CkemError::Singular(_) => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// 17 significant digits: enough for exact f64 round-trips.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt3(v: &[f64; 3]) -> String {
    format!("[{}, {}, {}]", fmt(v[0]), fmt(v[1]), fmt(v[2]))
}

fn parse_triple(s: &str, what: &str) -> Result<[f64; 3], Failure> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::input(format!("cannot parse {what} '{s}': {e}")))?;
    if parts.len() != 3 {
        return Err(Failure::input(format!(
            "{what} must have exactly 3 comma-separated numbers, got '{s}'"
        )));
    }
    Ok([parts[0], parts[1], parts[2]])
}

fn parse_moment(s: Option<&str>) -> Result<(usize, usize), Failure> {
    let Some(s) = s else { return Ok((0, 0)) };
    let parts: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::input(format!("cannot parse moment '{s}': {e}")))?;
    if parts.len() != 2 {
        return Err(Failure::input(format!(
            "moment must be 'i,j', got '{s}'"
        )));
    }
    Ok((parts[0], parts[1]))
}

fn parse_family(name: &str, p: Option<f64>, q: Option<u32>) -> Result<Family, Failure> {
    let need_p = || {
        p.ok_or_else(|| Failure::input(format!("family '{name}' requires --p")))
            .map(rat_from_f64)
    };
    match name {
        "cp2" => Ok(Family::Cp2),
        "p1xp1" => Ok(Family::P1xP1 { p: need_p()? }),
        "blowup" => Ok(Family::Blowup { p: need_p()? }),
        "hirzebruch" => Ok(Family::Hirzebruch {
            p: need_p()?,
            q: q.ok_or_else(|| Failure::input("family 'hirzebruch' requires --q"))?,
        }),
        other => Err(Failure::input(format!(
            "unknown family '{other}' (expected cp2 | p1xp1 | blowup | hirzebruch)"
        ))),
    }
}

/// Resolve the polytope (and the family when a preset was used).
fn resolve_geometry(geom: &GeomArgs) -> Result<(Polytope, Option<Family>), Failure> {
    match (&geom.family, &geom.polytope) {
        (Some(name), None) => {
            let family = parse_family(name, geom.p, geom.q)?;
            Ok((make_family(&family)?, Some(family)))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Failure::input(format!("cannot read {}: {e}", path.display()))
            })?;
            Ok((Polytope::from_json(&text)?, None))
        }
        _ => Err(Failure::input(
            "exactly one of --family or --polytope is required",
        )),
    }
}

fn resolve_slice(
    spec: Option<&str>,
    family: Option<&Family>,
    p: &Polytope,
) -> Result<SliceConstraint, Failure> {
    match spec {
        None | Some("family") => {
            let family = family.ok_or_else(|| {
                Failure::input("--slice family requires a --family preset")
            })?;
            Ok(SliceConstraint::family_slice(family, p)?)
        }
        Some("c0=1") => Ok(SliceConstraint::new(0.0, 0.0, 1.0, p)?),
        Some(other) => {
            let [s1, s2, s0] = parse_triple(other, "slice")?;
            Ok(SliceConstraint::new(s1, s2, s0, p)?)
        }
    }
}

struct Report {
    text: Vec<String>,
    json: serde_json::Value,
    /// CSV body lines; the versioned header lines are prepended on output.
    csv_header: String,
    csv: Vec<String>,
}

fn integral_json(r: &IntegralReport) -> serde_json::Value {
    serde_json::json!({
        "value": r.value,
        "grad": r.grad,
        "hessian": r.hessian,
        "condition_flag": format!("{:?}", r.condition_flag),
    })
}

fn point_csv(pt: &CriticalPoint) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}+{}-{}0",
        pt.classification.as_deref().unwrap_or("none"),
        fmt(pt.k1),
        fmt(pt.k2),
        fmt(pt.c0),
        pt.in_cone,
        fmt(pt.margin),
        fmt(pt.v),
        fmt(pt.d_const),
        fmt(pt.c_const),
        fmt(pt.futaki_norm),
        pt.hessian_signature.0,
        pt.hessian_signature.1,
        pt.hessian_signature.2,
    )
}

fn point_text(pt: &CriticalPoint) -> String {
    format!(
        "{} f = ({}, {}, {})  margin {}  V {}  |F~| {}  sig {}+{}-{}0  {}",
        if pt.in_cone { "in-cone " } else { "off-cone" },
        fmt(pt.k1),
        fmt(pt.k2),
        fmt(pt.c0),
        fmt(pt.margin),
        fmt(pt.v),
        fmt(pt.futaki_norm),
        pt.hessian_signature.0,
        pt.hessian_signature.1,
        pt.hessian_signature.2,
        pt.classification.as_deref().unwrap_or("unclassified"),
    )
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    match &cli.cmd {
        Cmd::Integrate {
            geom,
            f,
            region,
            power,
            moment,
        } => {
            let (p, _) = resolve_geometry(geom)?;
            let [k1, k2, c0] = parse_triple(f, "--f")?;
            let f = AffineFn::new(k1, k2, c0);
            let moment = parse_moment(moment.as_deref())?;
            let r = match region {
                Region::Interior => interior_power_integral(&p, &f, *power, moment)?,
                Region::Boundary if moment == (0, 0) => {
                    boundary_power_integral(&p, &f, *power)?
                }
                Region::Boundary => boundary_moment_integral(&p, &f, *power, moment)?,
            };
            Ok(Report {
                text: vec![
                    format!("value   {}", fmt(r.value)),
                    format!("grad    {}", fmt3(&r.grad)),
                    format!("flag    {:?}", r.condition_flag),
                ],
                json: integral_json(&r),
                csv_header: "value,dk1,dk2,dc0,condition_flag".into(),
                csv: vec![format!(
                    "{},{},{},{},{:?}",
                    fmt(r.value),
                    fmt(r.grad[0]),
                    fmt(r.grad[1]),
                    fmt(r.grad[2]),
                    r.condition_flag
                )],
            })
        }
        Cmd::Volume { geom, f, slice } => {
            let (p, family) = resolve_geometry(geom)?;
            let [k1, k2, c0] = parse_triple(f, "--f")?;
            let f = AffineFn::new(k1, k2, c0);
            let v = match slice {
                Some(spec) => {
                    let s = resolve_slice(Some(spec), family.as_ref(), &p)?;
                    volume_functional_sliced(&p, &f, &s)?
                }
                None => volume_functional(&p, &f)?,
            };
            let mut json = v.to_json();
            json["V2"] = serde_json::json!(v.v2);
            json["grad_slice"] = serde_json::json!(v.grad_v2_slice);
            let mut text = vec![
                format!("V       {}", fmt(v.v)),
                format!("V^2     {}", fmt(v.v2)),
                format!("d       {}", fmt(v.d_const)),
                format!("c       {}", fmt(v.c_const)),
                format!("futaki  {}", fmt3(&v.futaki)),
                format!("dV^2    {}", fmt3(&v.grad_v2_full)),
            ];
            if let Some(g) = v.grad_v2_slice {
                text.push(format!("dV^2|s  [{}, {}]", fmt(g[0]), fmt(g[1])));
            }
            Ok(Report {
                text,
                json,
                csv_header: "V,V2,d,c,F_mu1,F_mu2,F_1,dV2_k1,dV2_k2,dV2_c0".into(),
                csv: vec![format!(
                    "{},{},{},{},{},{},{},{},{},{}",
                    fmt(v.v),
                    fmt(v.v2),
                    fmt(v.d_const),
                    fmt(v.c_const),
                    fmt(v.futaki[0]),
                    fmt(v.futaki[1]),
                    fmt(v.futaki[2]),
                    fmt(v.grad_v2_full[0]),
                    fmt(v.grad_v2_full[1]),
                    fmt(v.grad_v2_full[2]),
                )],
            })
        }
        Cmd::Futaki { geom, f } => {
            let (p, _) = resolve_geometry(geom)?;
            let [k1, k2, c0] = parse_triple(f, "--f")?;
            let f = AffineFn::new(k1, k2, c0);
            let raw = futaki_invariant(&p, &f)?;
            let tilde = normalize_to_tilde(&p, &f)?;
            let norm = futaki_invariant(&p, &tilde)?;
            let n = (norm[0] * norm[0] + norm[1] * norm[1] + norm[2] * norm[2]).sqrt();
            Ok(Report {
                text: vec![
                    format!("futaki        {}", fmt3(&raw)),
                    format!("futaki (d=1)  {}", fmt3(&norm)),
                    format!("norm  (d=1)   {}", fmt(n)),
                ],
                json: serde_json::json!({
                    "futaki": raw,
                    "futaki_normalized": norm,
                    "norm_normalized": n,
                }),
                csv_header: "F_mu1,F_mu2,F_1,Ft_mu1,Ft_mu2,Ft_1,Ft_norm".into(),
                csv: vec![format!(
                    "{},{},{},{},{},{},{}",
                    fmt(raw[0]),
                    fmt(raw[1]),
                    fmt(raw[2]),
                    fmt(norm[0]),
                    fmt(norm[1]),
                    fmt(norm[2]),
                    fmt(n)
                )],
            })
        }
        Cmd::Critical {
            geom,
            slice,
            grid,
            tol,
        } => {
            let (p, family) = resolve_geometry(geom)?;
            let s = resolve_slice(slice.as_deref(), family.as_ref(), &p)?;
            let mut pts = find_critical_points(&p, &s, *grid, *tol, exec)?;
            if let Some(family) = &family {
                for pt in pts.iter_mut() {
                    if let Some(tag) = classify_against_family(pt, family) {
                        pt.classification = Some(tag);
                    }
                }
            }
            let in_cone = pts.iter().filter(|q| q.in_cone && !q.is_curve_hit()).count();
            let mut text = vec![format!(
                "{} critical points ({} isolated in-cone)",
                pts.len(),
                in_cone
            )];
            text.extend(pts.iter().map(point_text));
            Ok(Report {
                text,
                json: serde_json::json!({
                    "points": pts,
                    "in_cone_isolated": in_cone,
                }),
                csv_header:
                    "case_tag,k1,k2,c0,in_cone,margin,V,d,c,futaki_norm,hessian_sig"
                        .into(),
                csv: pts.iter().map(point_csv).collect(),
            })
        }
        Cmd::Scan {
            family,
            q,
            p_min,
            p_max,
            steps,
            grid,
            tol,
        } => {
            if *steps < 2 {
                return Err(Failure::input("--steps must be >= 2"));
            }
            if !(p_min < p_max) {
                return Err(Failure::input("--p-min must be < --p-max"));
            }
            let make: Box<dyn Fn(f64) -> Family + Sync> = match family.as_str() {
                "p1xp1" => Box::new(|p| Family::P1xP1 { p: rat_from_f64(p) }),
                "blowup" => Box::new(|p| Family::Blowup { p: rat_from_f64(p) }),
                "hirzebruch" => {
                    let q = q.ok_or_else(|| {
                        Failure::input("scan of 'hirzebruch' requires --q")
                    })?;
                    Box::new(move |p| Family::Hirzebruch {
                        p: rat_from_f64(p),
                        q,
                    })
                }
                other => {
                    return Err(Failure::input(format!(
                        "scan requires a parameterized family, got '{other}'"
                    )))
                }
            };
            let params: Vec<f64> = (0..*steps)
                .map(|i| p_min + (p_max - p_min) * i as f64 / (*steps - 1) as f64)
                .collect();
            let scan = family_scan(&*make, &params, *grid, *tol, exec)?;
            let mut csv = Vec::new();
            for row in &scan.rows {
                for pt in &row.points {
                    csv.push(format!("{},{}", fmt(row.param), point_csv(pt)));
                }
            }
            for t in &scan.thresholds {
                csv.push(format!("# threshold {}", fmt(*t)));
            }
            let mut text = vec![format!(
                "{} parameter samples, {} transition(s)",
                scan.rows.len(),
                scan.thresholds.len()
            )];
            for t in &scan.thresholds {
                text.push(format!("threshold at p = {}", fmt(*t)));
            }
            Ok(Report {
                text,
                json: serde_json::json!({
                    "thresholds": scan.thresholds,
                    "rows": scan.rows,
                }),
                csv_header: SCAN_CSV_HEADER.into(),
                csv,
            })
        }
        Cmd::Ode { m, t0, t1 } => {
            let sol = solve_psi(*m, *t0, *t1)?;
            let cert = certify_positivity(&sol);
            Ok(Report {
                text: vec![
                    format!("Psi = A t^{} + B t^{} + c t^2/gamma - d/delta", 2 * m, 2 * m - 1),
                    format!("A         {}", fmt(sol.a_coef)),
                    format!("B         {}", fmt(sol.b_coef)),
                    format!("c         {}", fmt(sol.c_const)),
                    format!("d         {}", fmt(sol.d_const)),
                    format!("residual  {}", fmt(sol.residual_rel)),
                    format!(
                        "positive on ({}, {}): {} (min {} at {})",
                        fmt(sol.t0),
                        fmt(sol.t1),
                        cert.passed,
                        fmt(cert.grid_min),
                        fmt(cert.grid_argmin)
                    ),
                ],
                json: serde_json::json!({
                    "solution": sol,
                    "positivity": cert,
                }),
                csv_header: ODE_CSV_HEADER.into(),
                csv: vec![sol.csv_line()],
            })
        }
        Cmd::CmScan {
            m,
            t0_min,
            t0_max,
            steps,
            target,
        } => {
            let scan = cm_scan(*m, *t0_min, *t0_max, *steps, *target, exec)?;
            let mut text = vec![format!(
                "c range [{}, {}], monotone decreasing: {}",
                fmt(scan.c_min_observed),
                fmt(scan.c_max_observed),
                scan.monotone_decreasing
            )];
            match (target, scan.found_t0) {
                (Some(c), Some(t0)) => text.push(format!("c = {} at t0 = {}", fmt(*c), fmt(t0))),
                (Some(c), None) => text.push(format!("c = {} not attained on the scanned range", fmt(*c))),
                (None, _) => {}
            }
            let mut csv: Vec<String> = scan
                .rows
                .iter()
                .map(|r| format!("{},{},{}", fmt(r.t0), fmt(r.c), fmt(r.d)))
                .collect();
            if let Some(t0) = scan.found_t0 {
                csv.push(format!("# target_t0 {}", fmt(t0)));
            }
            Ok(Report {
                text,
                json: serde_json::to_value(&scan)
                    .expect("scan serialization"),
                csv_header: "t0,c,d".into(),
                csv,
            })
        }
    }
}

fn emit(cli: &Cli, report: &Report) -> Result<(), Failure> {
    let body = match cli.format {
        Format::Text => report.text.join("\n") + "\n",
        Format::Json => report.json.to_string() + "\n",
        Format::Csv => {
            let mut lines = vec![CSV_VERSION.to_string(), report.csv_header.clone()];
            lines.extend(report.csv.iter().cloned());
            lines.join("\n") + "\n"
        }
    };
    match &cli.output {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ckem::exec::init_thread_cap_from_env();
    match run(&cli).and_then(|r| emit(&cli, &r)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
