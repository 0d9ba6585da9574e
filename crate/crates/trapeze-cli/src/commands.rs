//! Subcommand implementations. Each returns the JSON document plus optional
//! CSV table, SVG figure and verification verdict.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use trapeze::action_lab::{action, almost_elegant_action, arc_capping, elegant_action, ActionValue, CappingStyle};
use trapeze::approx::{lipschitz_constants, mollify_report, theorem_a_experiment, MollifierKernel};
use trapeze::curve_kernel::io::{load_curve, metadata, CurveFile};
use trapeze::inscriber::{find_inscriptions, Inscription, Kind};
use trapeze::spectral::{
    check_triangle, continue_branch, l2_proxy, nearest_limit, quadrisecant_duality, spectrum, vertex_check, Branch,
    BranchLimit, StepControl,
};
use trapeze::trapezoid_map::check_ratio;
use trapeze::{JordanCurve, Result, TrapezeError, TrapezoidClass};

use crate::output::{csv_table, envelope, to_json_string};
use crate::svg::{self, Region};
use crate::{Check, ClassArgs, Cli, Command, Format, Global, KernelName};

pub struct Outcome {
    pub document: Value,
    pub csv: Option<String>,
    pub svg: Option<String>,
    pub verdict: Option<bool>,
}

impl Outcome {
    fn new(document: Value) -> Self {
        Outcome {
            document,
            csv: None,
            svg: None,
            verdict: None,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize to JSON")
}

fn angle(g: &Global, value: f64) -> f64 {
    if g.degrees {
        value.to_radians()
    } else {
        value
    }
}

fn parse_list(g: &Global, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| TrapezeError::Parse(format!("{t:?}: {e}")))
        })
        .collect::<Result<Vec<f64>>>()
        .map(|v| v.into_iter().map(|x| angle(g, x)).collect())
}

fn parse_range(g: &Global, text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || TrapezeError::Parse(format!("range {text:?} is not start:end:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n < 2 {
        return Err(TrapezeError::Domain("range needs at least two points".into()));
    }
    Ok((0..n)
        .map(|k| angle(g, a + (b - a) * k as f64 / (n - 1) as f64))
        .collect())
}

fn curve_path(path: &Option<PathBuf>) -> Result<&Path> {
    path.as_deref()
        .ok_or_else(|| TrapezeError::Domain("--curve FILE is required".into()))
}

fn load(path: &Option<PathBuf>) -> Result<(JordanCurve, Value)> {
    let curve = load_curve(curve_path(path)?)?;
    let meta = to_value(&metadata(&curve));
    Ok((curve, meta))
}

/// Validate the class before touching the curve file.
fn class_of(g: &Global, args: &ClassArgs) -> Result<TrapezoidClass> {
    check_ratio(args.r)?;
    TrapezoidClass::new(args.r, angle(g, args.theta))
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Inscribe { class, tol } => inscribe(g, class, *tol),
        Command::Action { class, all } => action_cmd(g, class, *all),
        Command::Spectrum { class } => spectrum_cmd(g, class),
        Command::Branch { class, theta_end, index } => branch_cmd(g, class, *theta_end, *index),
        Command::L2 { curve, r, range, thetas } => l2_cmd(g, curve, *r, range, thetas.as_deref()),
        Command::Verify {
            check,
            curve,
            r,
            theta,
            theta_end,
            range,
            grid,
        } => verify(g, *check, curve, *r, *theta, *theta_end, range, *grid),
        Command::Mollify { curve, eps, kernel, out } => mollify_cmd(curve, *eps, *kernel, out),
        Command::Constants { curve, k } => constants(curve, *k),
        Command::TheoremA {
            curve,
            r,
            thetas,
            ladder,
            grid,
        } => theorem_a(g, curve, *r, thetas, ladder, *grid),
        Command::Render { curve, r, theta, grid } => render(g, curve, *r, *theta, *grid),
    }
}

pub fn emit(g: &Global, outcome: &Outcome) -> Result<()> {
    let text = to_json_string(&outcome.document);
    let io = |e: std::io::Error| TrapezeError::Io(e.to_string());
    if let Some(path) = &g.json {
        std::fs::write(path, format!("{text}\n")).map_err(io)?;
    }
    if let Some(path) = &g.svg {
        let figure = outcome
            .svg
            .as_ref()
            .ok_or_else(|| TrapezeError::Domain("this command has no figure".into()))?;
        std::fs::write(path, figure).map_err(io)?;
    }
    match (g.format, &outcome.csv) {
        (Format::Csv, Some(table)) => print!("{table}"),
        (Format::Csv, None) => return Err(TrapezeError::Domain("this command has no table output".into())),
        (Format::Json, _) => println!("{text}"),
    }
    Ok(())
}

fn class_params(class: TrapezoidClass, grid: usize) -> Value {
    json!({ "r": class.r, "theta": class.theta, "grid": grid })
}

#[derive(Serialize)]
struct InscriptionRow {
    index: usize,
    s1: f64,
    s2: f64,
    s1p: f64,
    s2p: f64,
    diag_length: f64,
    kind: String,
    family: bool,
    residual: f64,
}

fn inscribe(g: &Global, args: &ClassArgs, tol: f64) -> Result<Outcome> {
    let class = class_of(g, args)?;
    let (curve, meta) = load(&args.curve)?;
    let set = find_inscriptions(&curve, class, args.grid, tol)?;
    let rows: Vec<InscriptionRow> = set
        .inscriptions
        .iter()
        .enumerate()
        .map(|(index, i)| InscriptionRow {
            index,
            s1: i.s1,
            s2: i.s2,
            s1p: i.s1p,
            s2p: i.s2p,
            diag_length: i.diag_length,
            kind: i.kind.to_string(),
            family: i.family,
            residual: i.residual,
        })
        .collect();
    let mut params = class_params(class, args.grid);
    params["tol"] = json!(tol);
    let mut out = Outcome::new(envelope("inscribe", params, Some(meta), to_value(&set)));
    out.csv = Some(csv_table(&rows));
    out.svg = Some(svg::figure(&curve, &set.inscriptions, &[]));
    Ok(out)
}

#[derive(Serialize)]
struct ActionEntry {
    inscription: Inscription,
    action: ActionValue,
    closed_form: Option<ActionValue>,
}

#[derive(Serialize)]
struct ActionRow {
    index: usize,
    kind: String,
    diag_length: f64,
    action: f64,
    hamiltonian_term: f64,
    capping_term: f64,
    closed_form: Option<f64>,
}

/// Cones at the pivot and arc regions traced by the capping, by weight.
fn action_regions(curve: &JordanCurve, ins: &Inscription) -> Vec<Region> {
    let p = ins.pivot();
    let theta = ins.class.theta;
    let sector = |start: Complex64| -> Vec<Complex64> {
        let mut v = vec![p];
        for k in 0..=48 {
            let t = theta * k as f64 / 48.0;
            v.push(p + Complex64::from_polar(1.0, -t) * (start - p));
        }
        v
    };
    let mut regions = vec![
        Region {
            outline: sector(ins.z()),
            heavy: true,
        },
        Region {
            outline: sector(ins.w()),
            heavy: false,
        },
    ];
    let style = match ins.kind {
        Kind::Elegant => Some(CappingStyle::Elegant),
        Kind::AlmostElegant => Some(CappingStyle::AlmostElegant),
        Kind::Other => None,
    };
    if let Some(path) = style.and_then(|s| arc_capping(curve, ins, s).ok()) {
        for heavy in [true, false] {
            let mut outline = vec![p];
            for leg in &path.legs {
                let (a, b) = if heavy { leg.first } else { leg.second };
                for k in 0..=64 {
                    outline.push(curve.eval(a + (b - a) * k as f64 / 64.0));
                }
            }
            regions.push(Region { outline, heavy });
        }
    }
    regions
}

fn action_cmd(g: &Global, args: &ClassArgs, all: bool) -> Result<Outcome> {
    let class = class_of(g, args)?;
    let (curve, meta) = load(&args.curve)?;
    let set = find_inscriptions(&curve, class, args.grid, trapeze::inscriber::DEFAULT_TOL)?;
    let chosen: Vec<&Inscription> = set
        .inscriptions
        .iter()
        .filter(|i| all || i.kind != Kind::Other)
        .collect();
    let mut entries = Vec::with_capacity(chosen.len());
    for ins in &chosen {
        let value = action(&curve, ins)?;
        let closed_form = match ins.kind {
            Kind::Elegant => Some(elegant_action(&curve, ins)?),
            Kind::AlmostElegant => Some(almost_elegant_action(&curve, ins)?),
            Kind::Other => None,
        };
        entries.push(ActionEntry {
            inscription: **ins,
            action: value,
            closed_form,
        });
    }
    let rows: Vec<ActionRow> = entries
        .iter()
        .enumerate()
        .map(|(index, e)| ActionRow {
            index,
            kind: e.inscription.kind.to_string(),
            diag_length: e.inscription.diag_length,
            action: e.action.value,
            hamiltonian_term: e.action.hamiltonian_term,
            capping_term: e.action.capping_term,
            closed_form: e.closed_form.map(|c| c.value),
        })
        .collect();
    let regions: Vec<Region> = chosen.iter().flat_map(|i| action_regions(&curve, i)).collect();
    let owned: Vec<Inscription> = chosen.iter().map(|i| **i).collect();
    let mut params = class_params(class, args.grid);
    params["all"] = json!(all);
    let mut out = Outcome::new(envelope(
        "action",
        params,
        Some(meta),
        json!({ "area": curve.area(), "entries": to_value(&entries) }),
    ));
    out.csv = Some(csv_table(&rows));
    out.svg = Some(svg::figure(&curve, &owned, &regions));
    Ok(out)
}

#[derive(Serialize)]
struct SpectrumRow {
    index: usize,
    action: f64,
    kind: String,
    diag_length: f64,
}

fn spectrum_cmd(g: &Global, args: &ClassArgs) -> Result<Outcome> {
    let class = class_of(g, args)?;
    let (curve, meta) = load(&args.curve)?;
    let spec = spectrum(&curve, class, args.grid)?;
    let rows: Vec<SpectrumRow> = spec
        .entries
        .iter()
        .enumerate()
        .map(|(index, e)| SpectrumRow {
            index,
            action: e.action.value,
            kind: e.inscription.kind.to_string(),
            diag_length: e.inscription.diag_length,
        })
        .collect();
    let mut out = Outcome::new(envelope("spectrum", class_params(class, args.grid), Some(meta), to_value(&spec)));
    out.csv = Some(csv_table(&rows));
    let points: Vec<(f64, f64)> = spec.values().iter().enumerate().map(|(i, v)| (i as f64, *v)).collect();
    out.svg = Some(svg::plot(&[("spectrum".into(), points)], "index", "action"));
    Ok(out)
}

#[derive(Serialize)]
struct BranchRecord {
    seed: usize,
    branch: Option<Branch>,
    error: Option<String>,
}

#[derive(Serialize)]
struct BranchRow {
    branch: usize,
    theta: f64,
    action: f64,
    diag_length: f64,
}

fn follow(curve: &JordanCurve, class: TrapezoidClass, end: f64, grid: usize, index: Option<usize>) -> Result<Vec<BranchRecord>> {
    let set = find_inscriptions(curve, class, grid, trapeze::inscriber::DEFAULT_TOL)?;
    if let Some(i) = index {
        if i >= set.inscriptions.len() {
            return Err(TrapezeError::Domain(format!(
                "seed index {i} out of range ({} inscriptions)",
                set.inscriptions.len()
            )));
        }
    }
    Ok(set
        .inscriptions
        .iter()
        .enumerate()
        .filter(|(i, _)| index.is_none_or(|k| k == *i))
        .map(|(seed, ins)| match continue_branch(curve, class.r, class.theta, end, ins, StepControl::default()) {
            Ok(b) => BranchRecord {
                seed,
                branch: Some(b),
                error: None,
            },
            Err(e) => BranchRecord {
                seed,
                branch: None,
                error: Some(e.to_string()),
            },
        })
        .collect())
}

fn branch_plot(records: &[BranchRecord]) -> String {
    let series: Vec<(String, Vec<(f64, f64)>)> = records
        .iter()
        .filter_map(|r| {
            r.branch.as_ref().map(|b| {
                let pts = b.samples.iter().map(|s| (s.theta, s.action.value)).collect();
                (format!("seed {}", r.seed), pts)
            })
        })
        .collect();
    svg::plot(&series, "theta", "action")
}

fn branch_cmd(g: &Global, args: &ClassArgs, theta_end: Option<f64>, index: Option<usize>) -> Result<Outcome> {
    let class = class_of(g, args)?;
    let end = theta_end.map(|t| angle(g, t)).unwrap_or(PI);
    if !(end > 0.0 && end <= PI) {
        return Err(TrapezeError::Domain("theta_end must lie in (0, pi]".into()));
    }
    let (curve, meta) = load(&args.curve)?;
    let records = follow(&curve, class, end, args.grid, index)?;
    let rows: Vec<BranchRow> = records
        .iter()
        .filter_map(|r| r.branch.as_ref().map(|b| (r.seed, b)))
        .flat_map(|(seed, b)| {
            b.samples.iter().map(move |s| BranchRow {
                branch: seed,
                theta: s.theta,
                action: s.action.value,
                diag_length: s.inscription.diag_length,
            })
        })
        .collect();
    let mut params = class_params(class, args.grid);
    params["theta_end"] = json!(end);
    let mut out = Outcome::new(envelope("branch", params, Some(meta), json!({ "branches": to_value(&records) })));
    out.csv = Some(csv_table(&rows));
    out.svg = Some(branch_plot(&records));
    Ok(out)
}

#[derive(Serialize)]
struct ProxyRow {
    theta: f64,
    l2: f64,
    heuristic: bool,
}

fn l2_cmd(g: &Global, curve: &Option<PathBuf>, r: f64, range: &str, thetas: Option<&str>) -> Result<Outcome> {
    check_ratio(r)?;
    let grid = match thetas {
        Some(t) => parse_list(g, t)?,
        None => parse_range(g, range)?,
    };
    let (curve, meta) = load(curve)?;
    let proxy = l2_proxy(&curve, r, &grid)?;
    let triangle = check_triangle(&proxy, curve.area());
    let rows: Vec<ProxyRow> = proxy
        .theta_grid
        .iter()
        .zip(&proxy.l2_values)
        .zip(&proxy.heuristic)
        .map(|((t, v), h)| ProxyRow {
            theta: *t,
            l2: *v,
            heuristic: *h,
        })
        .collect();
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.theta, r.l2)).collect();
    let mut out = Outcome::new(envelope(
        "l2",
        json!({ "r": r, "theta_grid": grid }),
        Some(meta),
        json!({ "proxy": to_value(&proxy), "triangle": to_value(&triangle) }),
    ));
    out.csv = Some(csv_table(&rows));
    out.svg = Some(svg::plot(&[("l2 proxy".into(), points)], "theta", "l2"));
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn verify(
    g: &Global,
    check: Check,
    curve: &Option<PathBuf>,
    r: f64,
    theta: Option<f64>,
    theta_end: Option<f64>,
    range: &str,
    grid: usize,
) -> Result<Outcome> {
    check_ratio(r)?;
    let start = theta.map(|t| angle(g, t)).unwrap_or(match check {
        Check::Duality => PI - 0.3,
        _ => PI / 2.0,
    });
    let (curve, meta) = load(curve)?;
    let area = curve.area();
    let (pass, detail, svg) = match check {
        Check::Triangle => {
            let proxy = l2_proxy(&curve, r, &parse_range(g, range)?)?;
            let report = check_triangle(&proxy, area);
            let pass = report.violations.is_empty() && report.checked > 0;
            (pass, json!({ "proxy": to_value(&proxy), "triangle": to_value(&report) }), None)
        }
        Check::Variation => {
            let end = theta_end.map(|t| angle(g, t)).unwrap_or(3.0);
            let class = TrapezoidClass::new(r, start)?;
            let records = follow(&curve, class, end, grid, None)?;
            let excess: Vec<f64> = records
                .iter()
                .filter_map(|b| b.branch.as_ref().map(|b| b.variation_excess))
                .collect();
            let pass = !excess.is_empty() && excess.iter().all(|e| *e <= 0.0);
            let plot = branch_plot(&records);
            (pass, json!({ "variation_excess": excess, "branches": to_value(&records) }), Some(plot))
        }
        Check::Shrinkout | Check::Vertex => {
            let class = TrapezoidClass::new(r, start)?;
            let records = follow(&curve, class, PI, grid, None)?;
            let shrinking: Vec<&Branch> = records
                .iter()
                .filter_map(|b| b.branch.as_ref())
                .filter(|b| matches!(b.limit, BranchLimit::Shrinkout { .. }))
                .collect();
            let plot = branch_plot(&records);
            if check == Check::Shrinkout {
                let limits: Vec<Value> = shrinking
                    .iter()
                    .map(|b| {
                        let BranchLimit::Shrinkout { limit_action, .. } = b.limit else {
                            unreachable!("filtered to shrinkouts")
                        };
                        let (idx, rel) = nearest_limit(limit_action, area, r);
                        json!({ "limit_action": limit_action, "nearest": idx, "relative_gap": rel, "pass": rel <= 0.01 })
                    })
                    .collect();
                let pass = !limits.is_empty() && limits.iter().all(|l| l["pass"] == json!(true));
                (pass, json!({ "limits": limits, "branches": to_value(&records) }), Some(plot))
            } else {
                let mut reports = Vec::new();
                for b in &shrinking {
                    reports.push(vertex_check(&curve, b)?);
                }
                let pass = !reports.is_empty() && reports.iter().all(|v| v.near_root);
                (pass, json!({ "vertices": to_value(&reports) }), Some(plot))
            }
        }
        Check::Duality => {
            let class = TrapezoidClass::new(r, start)?;
            let records = follow(&curve, class, PI, grid, None)?;
            let quad: Vec<&Branch> = records
                .iter()
                .filter_map(|b| b.branch.as_ref())
                .filter(|b| matches!(b.limit, BranchLimit::Quadrisecant { .. }))
                .collect();
            let mut pairs = Vec::new();
            for i in 0..quad.len() {
                for j in i + 1..quad.len() {
                    if let Ok(rep) = quadrisecant_duality(quad[i], quad[j], &curve) {
                        pairs.push(rep);
                    }
                }
            }
            let pass = !pairs.is_empty() && pairs.iter().all(|p| p.pass);
            let plot = branch_plot(&records);
            (pass, json!({ "pairs": to_value(&pairs) }), Some(plot))
        }
    };
    let name = to_value(&format!("{check:?}").to_lowercase());
    let mut out = Outcome::new(envelope(
        "verify",
        json!({ "check": name, "r": r, "theta": start, "grid": grid }),
        Some(meta),
        json!({ "pass": pass, "detail": detail }),
    ));
    out.svg = svg;
    out.verdict = Some(pass);
    Ok(out)
}

fn mollify_cmd(curve: &Option<PathBuf>, eps: f64, kernel: KernelName, out_path: &Path) -> Result<Outcome> {
    let kernel = match kernel {
        KernelName::Bump => MollifierKernel::bump(),
    };
    let (curve, meta) = load(curve)?;
    let (smooth, report) = mollify_report(&curve, eps, &kernel)?;
    let file = CurveFile::from_curve(&smooth);
    let text = serde_json::to_string(&file).map_err(|e| TrapezeError::Io(e.to_string()))?;
    std::fs::write(out_path, format!("{text}\n")).map_err(|e| TrapezeError::Io(e.to_string()))?;
    let mut out = Outcome::new(envelope(
        "mollify",
        json!({ "eps": eps, "kernel": kernel.name, "out": out_path.display().to_string() }),
        Some(meta),
        json!({ "report": to_value(&report), "mollified": to_value(&metadata(&smooth)) }),
    ));
    out.svg = Some(svg::figure(&smooth, &[], &[]));
    Ok(out)
}

fn constants(curve: &Option<PathBuf>, k: f64) -> Result<Outcome> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(TrapezeError::Domain("K must be positive".into()));
    }
    let (curve, meta) = load(curve)?;
    let c = lipschitz_constants(&curve, k)?;
    Ok(Outcome::new(envelope("constants", json!({ "K": k }), Some(meta), to_value(&c))))
}

#[derive(Serialize)]
struct WitnessRow {
    theta: f64,
    admissible: bool,
    min_diagonal: Option<f64>,
    pass: bool,
}

fn theorem_a(g: &Global, curve: &Option<PathBuf>, r: f64, thetas: &str, ladder: &str, grid: usize) -> Result<Outcome> {
    check_ratio(r)?;
    let thetas = parse_list(g, thetas)?;
    let ladder: Vec<f64> = ladder
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| TrapezeError::Parse(format!("{t:?}: {e}"))))
        .collect::<Result<_>>()?;
    let (curve, meta) = load(curve)?;
    let rep = theorem_a_experiment(&curve, r, &thetas, &ladder, grid)?;
    let rows: Vec<WitnessRow> = rep
        .samples
        .iter()
        .map(|s| WitnessRow {
            theta: s.theta,
            admissible: s.admissible,
            min_diagonal: s.min_diagonal.is_finite().then_some(s.min_diagonal),
            pass: s.pass,
        })
        .collect();
    let mut out = Outcome::new(envelope(
        "theoremA",
        json!({ "r": r, "thetas": thetas, "ladder": ladder, "grid": grid }),
        Some(meta),
        to_value(&rep),
    ));
    out.csv = Some(csv_table(&rows));
    Ok(out)
}

fn render(g: &Global, curve: &Option<PathBuf>, r: Option<f64>, theta: Option<f64>, grid: usize) -> Result<Outcome> {
    let class = match (r, theta) {
        (Some(r), Some(t)) => {
            check_ratio(r)?;
            Some(TrapezoidClass::new(r, angle(g, t))?)
        }
        (None, None) => None,
        _ => return Err(TrapezeError::Domain("--r and --theta go together".into())),
    };
    let (curve, meta) = load(curve)?;
    let inscriptions = match class {
        Some(c) => find_inscriptions(&curve, c, grid, trapeze::inscriber::DEFAULT_TOL)?.inscriptions,
        None => Vec::new(),
    };
    let params = match class {
        Some(c) => class_params(c, grid),
        None => json!({}),
    };
    let mut out = Outcome::new(envelope(
        "render",
        params,
        Some(meta),
        json!({ "inscriptions": inscriptions.len() }),
    ));
    out.svg = Some(svg::figure(&curve, &inscriptions, &[]));
    Ok(out)
}
