use heisenberg::contraction::{mcp_csv, mcp_scan, McpConfig};
use heisenberg::energy::{bump_weight, integrate};
use heisenberg::geodesic::geodesic_between_with_velocity;
use heisenberg::group::{horizontality_defect, left_difference};
use heisenberg::variational::log_csv;
use heisenberg::{
    cc_distance, gauge_dist, geodesic_from_origin, horizontal_energy, ks_energy, minimize,
    pansu_energy, BoundaryData, EnergyReport, Grid, MinimizeConfig, PansuSettings, QmcSettings,
    SampledMap, TargetMetric,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;
use std::path::Path;

use super::format::{num, parse_pair, parse_point, parse_reals, sig9};
use super::manifest::{to_json, Run};
use super::{
    CliError, Cli, Command, DistanceArgs, EnergyArgs, EnergyKind, GeodesicArgs, McpArgs,
    MinimizeArgs, Status,
};

pub fn run(cli: Cli) -> Result<Status, CliError> {
    match cli.command {
        Command::Distance(a) => distance(a),
        Command::Geodesic(a) => geodesic(a),
        Command::Mcp(a) => mcp(a),
        Command::Energy(a) => energy(a),
        Command::Minimize(a) => minimize_cmd(a),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn table(rows: &[(&str, f64)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {}\n", sig9(*v)))
        .collect()
}

fn distance(a: DistanceArgs) -> Result<Status, CliError> {
    let mut run = Run::start("distance", a.common.out.as_deref())?;
    run.input("p", &a.p);
    run.input("q", &a.q);
    let p = parse_point(&a.p, a.m)?;
    let q = parse_point(&a.q, a.m)?;
    let d = left_difference(&p, &q)?;
    let (tau, rho) = if d.is_identity() {
        (0.0, 0.0)
    } else {
        let chart = geodesic_from_origin(&d)?;
        (chart.tau(), chart.rho())
    };
    let cc = cc_distance(&p, &q)?;
    let gauge = gauge_dist(&p, &q)?;
    run.config(&json!({ "m": p.m() }), None);
    let rows = [("d_c", cc), ("gauge", gauge), ("tau", tau), ("rho", rho)];
    if run.has_out() {
        let report = json!({
            "p": p, "q": q, "cc_distance": cc, "gauge_distance": gauge, "tau": tau, "rho": rho,
        });
        run.emit("distance.json", &to_json(&report), false)?;
    }
    run.emit("distance.txt", &table(&rows), true)?;
    run.finish()?;
    Ok(Status::Done)
}

fn geodesic(a: GeodesicArgs) -> Result<Status, CliError> {
    let mut run = Run::start("geodesic", a.common.out.as_deref())?;
    run.input("p", &a.p);
    run.input("q", &a.q);
    let p = parse_point(&a.p, a.m)?;
    let q = parse_point(&a.q, a.m)?;
    if p.m() != q.m() {
        return Err(CliError::Input("endpoints have different dimensions".into()));
    }
    if a.samples < 2 {
        return Err(CliError::Input("at least 2 samples are required".into()));
    }
    run.config(&json!({ "m": p.m(), "samples": a.samples }), None);
    let m = p.m();
    let mut csv = String::from("s");
    for prefix in ["x", "y"] {
        for i in 1..=m {
            csv.push_str(&format!(",{prefix}{i}"));
        }
    }
    csv.push_str(",t,legendrian_residual\n");
    for k in 0..a.samples {
        let s = k as f64 / (a.samples - 1) as f64;
        let (g, (dx, dy, dt)) = geodesic_between_with_velocity(&p, &q, s)?;
        let residual = horizontality_defect(&g, &dx, &dy, dt).abs();
        csv.push_str(&num(s));
        for &v in g.x().iter().chain(g.y()) {
            csv.push_str(&format!(",{}", num(v)));
        }
        csv.push_str(&format!(",{},{}\n", num(g.t()), num(residual)));
    }
    run.emit("geodesic.csv", &csv, true)?;
    run.finish()?;
    Ok(Status::Done)
}

fn mcp(a: McpArgs) -> Result<Status, CliError> {
    let mut run = Run::start("mcp", a.common.out.as_deref())?;
    run.input("p0", &a.p0);
    let p0 = parse_point(&a.p0, Some(1))?;
    let config = McpConfig {
        thresholds: parse_reals(&a.thresholds)?,
        n_samples: a.samples,
        seed: a.seed,
        radius_min: a.radius_min,
        radius_max: a.radius_max,
    };
    #[derive(Serialize)]
    struct Echo<'a> {
        sbar: f64,
        #[serde(flatten)]
        scan: &'a McpConfig,
    }
    run.config(&Echo { sbar: a.sbar, scan: &config }, Some(a.seed));
    let rows = mcp_scan(a.sbar, &p0, &config)?;
    run.emit("mcp.csv", &mcp_csv(&rows), true)?;
    run.finish()?;
    Ok(Status::Done)
}

fn apply_weight(mut report: EnergyReport, grid: &Grid, weight: &[f64]) -> EnergyReport {
    report
        .density
        .iter_mut()
        .zip(weight)
        .for_each(|(d, w)| *d *= w);
    report.value = integrate(grid, &report.density);
    report
        .diagnostics
        .insert("weight_mass".into(), integrate(grid, weight));
    report
}

fn energy(a: EnergyArgs) -> Result<Status, CliError> {
    let mut run = Run::start("energy", a.common.out.as_deref())?;
    run.input("input", a.input.display().to_string());
    let map: SampledMap = read_json(&a.input)?;
    let grid = *map.grid();
    let metric: TargetMetric = a.metric.parse()?;
    let qmc = QmcSettings {
        n_points: a.qmc_points,
        seed: a.seed,
    };
    let weight_name = a.weight.clone().unwrap_or_else(|| {
        if a.kind == EnergyKind::Ks { "bump" } else { "one" }.to_string()
    });
    let margin = a.margin.unwrap_or(a.epsilon.unwrap_or(0.0));
    let weight: Vec<f64> = match weight_name.as_str() {
        "one" => vec![1.0; grid.n_nodes()],
        "bump" => bump_weight(&grid, margin)?,
        path => {
            run.input("weight", path);
            read_json(Path::new(path))?
        }
    };
    run.config(
        &json!({
            "kind": format!("{:?}", a.kind).to_lowercase(),
            "alpha": a.alpha,
            "epsilon": a.epsilon,
            "metric": metric,
            "qmc_points": a.qmc_points,
            "weight": weight_name,
            "margin": margin,
            "legendrian_tol": a.legendrian_tol,
        }),
        Some(a.seed),
    );
    let report = match a.kind {
        EnergyKind::Ks => {
            let eps = a
                .epsilon
                .ok_or_else(|| CliError::Input("--kind ks requires --epsilon".into()))?;
            ks_energy(&map, &weight, eps, a.alpha, metric, qmc)?
        }
        EnergyKind::Pansu => {
            let settings = PansuSettings {
                qmc,
                legendrian_tol: a.legendrian_tol,
            };
            let r = pansu_energy(&map, a.alpha, settings)?;
            if weight_name == "one" { r } else { apply_weight(r, &grid, &weight) }
        }
        EnergyKind::Horizontal => {
            let r = horizontal_energy(&map, a.alpha)?;
            if weight_name == "one" { r } else { apply_weight(r, &grid, &weight) }
        }
    };
    run.emit("energy.json", &to_json(&report), true)?;
    run.finish()?;
    Ok(Status::Done)
}

fn minimize_cmd(a: MinimizeArgs) -> Result<Status, CliError> {
    let mut run = Run::start("minimize", Some(&a.out))?;
    run.input("boundary", a.boundary.display().to_string());
    run.input("grid", &a.grid);
    run.input("extent", &a.extent);
    let boundary: BoundaryData = read_json(&a.boundary)?;
    let mut config: MinimizeConfig = match &a.config {
        Some(path) => {
            run.input("config", path.display().to_string());
            read_json(path)?
        }
        None => MinimizeConfig::default(),
    };
    if let Some(v) = a.alpha {
        config.alpha = v;
    }
    if let Some(v) = a.seed {
        config.seed = v;
    }
    if let Some(v) = a.restarts {
        config.restarts = v;
    }
    if let Some(v) = a.inner_tol {
        config.inner_tol = v;
    }
    if let Some(v) = a.constraint_tol {
        config.constraint_tol = v;
    }
    if let Some(v) = a.max_inner_iters {
        config.max_inner_iters = v;
    }
    let (nx, ny) = parse_pair(&a.grid)?;
    let extent = parse_reals(&a.extent)?;
    let [x0, y0, x1, y1] = extent[..] else {
        return Err(CliError::Input(format!("expected X0,Y0,X1,Y1, got '{}'", a.extent)));
    };
    let grid = Grid::spanning(nx, ny, x0, y0, x1, y1)?;
    run.config(&json!({ "grid": grid, "solver": config }), Some(config.seed));

    let out = minimize(&boundary, &grid, &config)?;
    run.emit("solution.json", &to_json(&out.map), false)?;
    run.emit("energy.json", &to_json(&out.report), false)?;
    run.emit("convergence.csv", &log_csv(&out.log), false)?;
    print!(
        "{}",
        table(&[
            ("energy", out.report.value),
            ("constraint_inf_norm", out.constraint_inf_norm),
            ("grad_norm", out.grad_norm),
            ("converged", if out.converged { 1.0 } else { 0.0 }),
        ])
    );
    run.finish()?;
    Ok(if out.converged {
        Status::Done
    } else {
        Status::NotConverged
    })
}
