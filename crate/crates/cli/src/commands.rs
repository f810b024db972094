use crate::error::CliError;
use crate::output::{config_hash, Output};
use crate::scene::SceneFile;
use crate::{Mode, Params};
use enclosure::farfield::{
    alpha_decades, assemble_far_field_operator, default_lsm_alpha, disc_far_field_operator, far_field_constant,
    lsm_indicator_map, point_source_far_field_check, unsolvability_diagnostic, write_map_csv, FarFieldOperator,
    Tikhonov,
};
use enclosure::fields::{fundamental_solution, IncidentField};
use enclosure::forward::{build_mesh, build_mesh_for, disc_series_solution, BoundaryOperator};
use enclosure::geometry::{convex_hull_of_points, hausdorff_convex, support_function, Direction, Point2, Polygon, Scene};
use enclosure::indicator::{
    auto_trace_nodes, compute_indicator, default_t_ref, reconstruct_hull, tau_grid, DEFAULT_RMS_THRESHOLD,
};
use enclosure::trace::{recover_neumann, trace_direct, TraceData};
use enclosure::Error;
use num_complex::Complex64;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::sync::Arc;

type Files = Result<Vec<PathBuf>, CliError>;

struct Setup {
    scene: Scene,
    out: Output,
}

fn setup(command: &str, p: &Params) -> Result<Setup, CliError> {
    let path = p.scene.as_ref().ok_or_else(|| CliError::Config("--scene is required".into()))?;
    let file = SceneFile::load(path)?;
    let hash = config_hash(&json!({ "command": command, "scene": file, "params": p }));
    let scene = file.to_scene()?;
    Ok(Setup { scene, out: Output::new(&p.out, hash)? })
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}

fn incident(scene: &Scene, mode: Mode) -> Result<IncidentField, CliError> {
    Ok(match mode {
        Mode::Pointsource => IncidentField::PointSource { y: scene.source },
        Mode::Planewave => IncidentField::PlaneWave { d: Direction::new(scene.center - scene.source)? },
    })
}

fn operator(scene: &Scene, p: &Params) -> Result<BoundaryOperator, CliError> {
    let mesh = build_mesh(scene, p.mesh_nodes, p.grade)?;
    Ok(BoundaryOperator::new(Arc::new(mesh), scene.k)?)
}

fn trace_nodes(scene: &Scene, p: &Params) -> usize {
    p.trace_n.unwrap_or_else(|| auto_trace_nodes(p.tau_max, scene.k, scene.radius_r))
}

fn point(q: Point2) -> Value {
    json!([q.x, q.y])
}

fn scene_summary(scene: &Scene) -> Value {
    json!({
        "obstacles": scene.obstacles.len(),
        "diameter": scene.diameter(),
        "k": scene.k,
        "R": scene.radius_r,
        "R1": scene.radius_r1,
        "source_circle_is_far": scene.source_circle_is_far(),
    })
}

fn trace(scene: &Scene, p: &Params) -> Result<(TraceData, Value), CliError> {
    let op = operator(scene, p)?;
    let sol = op.solve(&incident(scene, p.mode)?)?;
    let tr = trace_direct(&sol, scene.center, scene.radius_r, trace_nodes(scene, p))?;
    let d = sol.diagnostics();
    let diag = json!({
        "mesh_nodes": sol.mesh().len(),
        "nodes_per_edge": p.mesh_nodes,
        "grade": p.grade,
        "residual": d.residual,
        "condition_estimate": d.condition_estimate,
        "trace_n": tr.n(),
    });
    Ok((tr, diag))
}

pub fn solve(p: &Params) -> Files {
    let Setup { scene, out } = setup("solve", p)?;
    let (tr, mut diag) = trace(&scene, p)?;
    let rec = recover_neumann(&tr)?;
    let abs = |z: &enclosure::trace::CDd| z.re.to_f64().hypot(z.im.to_f64());
    let scale = tr.normal_derivatives().iter().map(abs).fold(0.0, f64::max);
    let diff = tr
        .normal_derivatives()
        .iter()
        .zip(rec.normal_derivatives())
        .map(|(a, b)| abs(&(*a - *b)))
        .fold(0.0, f64::max);
    diag["neumann_recovery_relative_difference"] = json!(if scale > 0.0 { diff / scale } else { 0.0 });
    diag["mode"] = json!(p.mode);
    diag["scene"] = scene_summary(&scene);
    Ok(vec![out.csv("trace.csv", |w| tr.write_csv(w))?, out.json("diagnostics.json", diag)?])
}

pub fn hull(p: &Params) -> Files {
    let Setup { scene, out } = setup("hull", p)?;
    check(!scene.obstacles.is_empty(), || "hull reconstruction needs at least one obstacle".into())?;
    let n_dirs = p.directions.unwrap_or(64);
    check(n_dirs >= 3, || format!("--directions must be at least 3, got {n_dirs}"))?;
    let taus = tau_grid(p.tau_min, p.tau_max, p.tau_count)?;
    let (tr, mut diag) = trace(&scene, p)?;
    // fail early, before any fit, if the circle cannot resolve the largest τ
    let probe = Direction::from_angle(0.0);
    compute_indicator(&tr, &probe, p.tau_max, default_t_ref(scene.center, scene.radius_r, &probe))?;
    let rec = reconstruct_hull(&tr, &scene.obstacles, &Direction::uniform_grid(n_dirs), &taus, DEFAULT_RMS_THRESHOLD)?;

    let all: Vec<Point2> = scene.obstacles.iter().flat_map(|o| o.vertices().iter().copied()).collect();
    let truth = Polygon::new(convex_hull_of_points(&all))?;
    let hd = hausdorff_convex(&rec.polygon, &truth);
    let mut errors = Vec::new();
    for e in rec.usable() {
        errors.push(json!({
            "angle": e.omega.angle(),
            "h_hat": e.h_hat,
            "h_true": support_function(&scene.obstacles, &e.omega)?,
            "rms": e.rms,
        }));
    }
    let failed: Vec<Value> = rec
        .directions
        .iter()
        .filter_map(|d| d.error.as_ref().map(|m| json!({ "angle": d.omega.angle(), "error": m })))
        .collect();
    diag["mode"] = json!(p.mode);
    diag["scene"] = scene_summary(&scene);
    diag["taus"] = json!(taus);
    diag["rms_threshold"] = json!(DEFAULT_RMS_THRESHOLD);
    diag["hausdorff_to_true_hull"] = json!(hd);
    diag["hausdorff_over_diameter"] = json!(hd / truth.diameter());
    diag["supports"] = json!(errors);
    diag["failed_directions"] = json!(failed);
    let hull = json!({
        "vertices": rec.polygon.vertices().iter().map(|&v| point(v)).collect::<Vec<_>>(),
        "directions": n_dirs,
        "usable": rec.usable().count(),
        "filtered": rec.filtered.iter().map(|(d, r)| json!({ "angle": d.angle(), "margin": r.margin })).collect::<Vec<_>>(),
    });
    Ok(vec![
        out.csv("supports.csv", |w| rec.write_supports_csv(w))?,
        out.json("hull.json", hull)?,
        out.json("diagnostics.json", diag)?,
    ])
}

fn far_field_operator(scene: &Scene, p: &Params) -> Result<FarFieldOperator, CliError> {
    let n = p.directions.unwrap_or(32);
    check(n >= 2, || format!("--directions must be at least 2, got {n}"))?;
    match p.disc {
        Some(r) => Ok(disc_far_field_operator(scene.center, r, scene.k, n, n)?),
        None => Ok(assemble_far_field_operator(&operator(scene, p)?, n, n)?),
    }
}

/// Sampling points for the sweep: each obstacle's centroid, a point near its
/// first vertex, and one point outside every obstacle.
fn sweep_points(scene: &Scene, p: &Params) -> Vec<(String, Point2)> {
    let mut pts = Vec::new();
    if let Some(r) = p.disc {
        pts.push(("disc center".to_string(), scene.center));
        pts.push(("exterior".to_string(), scene.center + Point2::new(0.5 * (r + scene.radius_r), 0.0)));
        return pts;
    }
    for (i, o) in scene.obstacles.iter().enumerate() {
        let c = o.centroid();
        pts.push((format!("obstacle {i} centroid"), c));
        pts.push((format!("obstacle {i} near corner"), c + (o.vertices()[0] - c) * 0.8));
    }
    let far = scene.obstacles.iter().flat_map(|o| o.vertices().iter()).map(|v| v.dist(scene.center)).fold(0.0, f64::max);
    pts.push(("exterior".to_string(), scene.center + Point2::new(0.5 * (far + scene.radius_r), 0.0)));
    pts
}

pub fn farfield(p: &Params) -> Files {
    let Setup { scene, out } = setup("farfield", p)?;
    check(p.alpha_min > 0.0 && p.alpha_max > p.alpha_min, || "need 0 < --alpha-min < --alpha-max".into())?;
    let f = far_field_operator(&scene, p)?;
    let t = Tikhonov::new(&f)?;
    let first = -p.alpha_max.log10().round() as i32;
    let last = -p.alpha_min.log10().round() as i32;
    let alphas = alpha_decades(first, last);
    let zero = f.max_abs() == 0.0;
    let mut sweeps = Vec::new();
    if !zero {
        for (label, y) in sweep_points(&scene, p) {
            let rep = unsolvability_diagnostic(&t, y, &alphas)?;
            let mut v: Value = serde_json::from_str(&rep.to_json()).expect("report JSON is valid");
            v["label"] = json!(label);
            sweeps.push(v);
        }
    }
    let sweep = json!({
        "k": f.k(),
        "directions": f.observation().len(),
        "disc_radius": p.disc,
        "zero_operator": zero,
        "reciprocity_defect": f.reciprocity_defect(),
        "singular_values": t.singular_values(),
        "alphas": alphas,
        "sweeps": sweeps,
    });
    Ok(vec![out.csv("operator.csv", |w| f.write_csv(w))?, out.json("sweep.json", sweep)?])
}

pub fn lsm(p: &Params) -> Files {
    let Setup { scene, out } = setup("lsm", p)?;
    check(p.grid >= 2, || format!("--grid must be at least 2, got {}", p.grid))?;
    let f = far_field_operator(&scene, p)?;
    let t = Tikhonov::new(&f)?;
    let alpha = default_lsm_alpha(&t);
    let n = p.grid;
    let r = scene.radius_r;
    let points: Vec<Point2> = (0..n * n)
        .map(|i| {
            let (ix, iy) = (i % n, i / n);
            let s = |j: usize| -r + 2.0 * r * j as f64 / (n - 1) as f64;
            scene.center + Point2::new(s(ix), s(iy))
        })
        .collect();
    let map = lsm_indicator_map(&t, &points, alpha)?;
    let summary = json!({ "alpha": alpha, "grid": n, "zero_operator": f.max_abs() == 0.0, "disc_radius": p.disc });
    Ok(vec![out.csv("lsm.csv", |w| write_map_csv(w, &points, &map))?, out.json("lsm.json", summary)?])
}

/// Disc series vs 64-gon, point-source reciprocity, the far-field relation
/// and the empty-scene indicator null.
pub fn oracle_check(p: &Params) -> Files {
    let Setup { scene, out } = setup("oracle-check", p)?;
    let k = scene.k;
    let mut checks = Vec::new();
    let mut record = |name: &str, value: f64, tol: f64| {
        checks.push(json!({ "name": name, "value": value, "tolerance": tol, "pass": value < tol }));
    };

    let d = Direction::from_angle(0.7);
    let disc = disc_series_solution(Point2::ORIGIN, 1.0, k, IncidentField::PlaneWave { d })?;
    let gon = BoundaryOperator::new(
        Arc::new(build_mesh_for(&[Polygon::regular(Point2::ORIGIN, 1.0, 64, 0.0)?], 16, p.grade)?),
        k,
    )?
    .solve(&IncidentField::PlaneWave { d })?;
    let pts: Vec<Point2> = (0..20).map(|j| Point2::from_polar(1.5 + 0.075 * j as f64, 0.31 * j as f64)).collect();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for &x in &pts {
        let u = disc.eval_total(x)?;
        worst = worst.max((gon.eval_total(x)? - u).norm());
        scale = scale.max(u.norm());
    }
    record("disc_series_vs_64gon", worst / scale, 1e-2);

    let op = operator(&scene, p)?;
    let (x, y) = (scene.center + Point2::from_polar(scene.radius_r, 0.4), scene.source);
    let phi = |a: Point2, b: Point2| -> Result<Complex64, Error> {
        Ok(fundamental_solution(k, a, b)? + op.solve(&IncidentField::PointSource { y: b })?.eval_scattered(a)?)
    };
    let (xy, yx) = (phi(x, y)?, phi(y, x)?);
    record("reciprocity", (xy - yx).norm() / xy.norm().max(yx.norm()), 1e-4);

    let ff = point_source_far_field_check(&op, y, &Direction::uniform_grid(16))?;
    record("far_field_relation", ff.max_relative, 1e-3);

    let free = BoundaryOperator::new(Arc::new(build_mesh_for(&[], p.mesh_nodes, p.grade)?), k)?
        .solve(&IncidentField::PointSource { y: scene.source })?;
    let tr = trace_direct(&free, scene.center, scene.radius_r, trace_nodes(&scene, p))?;
    let mut null = 0.0f64;
    for om in Direction::uniform_grid(8) {
        for &tau in &tau_grid(p.tau_min, p.tau_max, p.tau_count)? {
            null = null.max(compute_indicator(&tr, &om, tau, default_t_ref(scene.center, scene.radius_r, &om))?.relative_magnitude());
        }
    }
    record("green_identity_null", null, 1e-12);

    let all_pass = checks.iter().all(|c| c["pass"] == json!(true));
    let path = out.json(
        "oracle.json",
        json!({ "checks": checks, "pass": all_pass, "far_field_constant": [far_field_constant(k).re, far_field_constant(k).im] }),
    )?;
    if !all_pass {
        return Err(CliError::Check(format!("oracle checks failed; see {}", path.display())));
    }
    Ok(vec![path])
}
