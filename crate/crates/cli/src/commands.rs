use serde_json::{json, Value};
use su3_lgt::counting::{
    count_3pt_singlets, count_4pt_singlets, count_plaquette_physical, fit_scaling, ScalingTable,
};
use su3_lgt::evolution::{
    convergence_sweep, electric_extrema_benchmarks, electric_magnetic_scheme, exact_evolve, find_first_extrema,
    fit_log_deviation, named_scheme, time_grid, trotter_evolve, ConvergenceRow, DenseModel, StateVector, Trajectory,
};
use su3_lgt::gauge_basis::{
    enumerate_physical, global_casimir_cutoff, global_singlet_filter, project_symmetry, trivial_basis, SymmetrySector,
};
use su3_lgt::hamiltonian::{build_hamiltonian, color_parity_reduce, one_plaquette_pq_hamiltonian, HamiltonianOptions};
use su3_lgt::linalg::sorted_eigh;
use su3_lgt::local_plaquette::{
    build_sector_generator, compile_sector_circuit, enumerate_control_sectors, local_trotter_evolve, sector_class,
    SectorRotation,
};
use su3_lgt::su2_reference::{tail_slope, SU2PlaquetteModel};
use su3_lgt::{Error, OperatorMatrix, Truncation};

use crate::config::{BasisMode, CountKind, GeometrySpec, RunConfig, Subcommand};
use crate::output::Report;

/// Four-point counts grow as roughly `Λ^8` in cost; beyond this cutoff the
/// column is left empty.
const FOUR_POINT_MAX: u32 = 11;

/// Largest gauge leakage tolerated before a local run counts as failed.
const LEAKAGE_TOL: f64 = 1e-10;

pub fn run(cfg: &RunConfig) -> su3_lgt::Result<Report> {
    match cfg.subcommand {
        Subcommand::Spectrum => spectrum(cfg),
        Subcommand::Evolve => evolve(cfg),
        Subcommand::Converge => converge(cfg),
        Subcommand::Count => count(cfg),
        Subcommand::Compile => compile(cfg),
        Subcommand::Benchmark => benchmark(cfg),
        Subcommand::Su2Tail => su2_tail(cfg),
    }
}

fn single_coupling(cfg: &RunConfig) -> su3_lgt::Result<f64> {
    match cfg.couplings[..] {
        [g] => Ok(g),
        _ => Err(Error::Config(format!("{} takes a single coupling", cfg.subcommand.name()))),
    }
}

/// Hamiltonians (at `g = 1`) for each symmetry sector of the requested
/// basis, labelled.
fn sector_hamiltonians(cfg: &RunConfig) -> su3_lgt::Result<Vec<(String, OperatorMatrix)>> {
    let trunc = &cfg.truncation;
    let geom = cfg.geometry.build()?;
    let opts = HamiltonianOptions::default();
    match (cfg.mode, cfg.geometry) {
        (BasisMode::ColorParity, GeometrySpec::One) => {
            Ok(vec![("C+".into(), color_parity_reduce(&one_plaquette_pq_hamiltonian(trunc, 1.0)?)?)])
        }
        (BasisMode::ColorParity, _) => {
            Err(Error::Unsupported("color-parity mode is implemented for the single plaquette".into()))
        }
        (BasisMode::Global, GeometrySpec::One) => Ok(vec![("all".into(), one_plaquette_pq_hamiltonian(trunc, 1.0)?)]),
        (BasisMode::Global, GeometrySpec::Two) => {
            let mut configs = global_singlet_filter(&enumerate_physical(&geom, trunc), &geom);
            if let Some(c) = cfg.casimir_max {
                configs = global_casimir_cutoff(&configs, c);
            }
            let mut out = Vec::new();
            for (c, t) in [(1, 1), (-1, 1), (1, -1), (-1, -1)] {
                let sector = SymmetrySector::new(c, t, None);
                let states = project_symmetry(&configs, &geom, sector)?;
                if !states.is_empty() {
                    out.push((sector.label(), build_hamiltonian(&states, &geom, 1.0, opts)?));
                }
            }
            Ok(out)
        }
        _ => {
            let mut configs = enumerate_physical(&geom, trunc);
            if let Some(c) = cfg.casimir_max {
                configs = global_casimir_cutoff(&configs, c);
            }
            let states = trivial_basis(&configs);
            Ok(vec![("physical".into(), build_hamiltonian(&states, &geom, 1.0, opts)?)])
        }
    }
}

fn spectrum(cfg: &RunConfig) -> su3_lgt::Result<Report> {
    let mut report = Report::new(&["sector", "index", "g", "g2_energy"]);
    let sectors = sector_hamiltonians(cfg)?;
    for &g in &cfg.couplings {
        for (label, h) in &sectors {
            let (vals, _) = sorted_eigh(&h.dense_at(g));
            for (k, e) in vals.iter().enumerate() {
                report.push(vec![json!(label), json!(k), json!(g), json!(g * g * e)]);
            }
        }
    }
    report.extra("dimensions", json!(sectors.iter().map(|(l, h)| (l.clone(), h.dim())).collect::<Vec<_>>()));
    Ok(report)
}

fn vacuum_index(h: &OperatorMatrix) -> su3_lgt::Result<usize> {
    h.basis
        .iter()
        .position(|s| s.components.len() == 1 && s.components[0].0 .0.iter().all(|r| r.p == 0 && r.q == 0))
        .ok_or(Error::EmptyBasis)
}

fn trajectory_report(traj: &Trajectory) -> Report {
    let mut report = Report::new(&["t", "persistence", "electric_energy", "leakage"]);
    for row in traj.rows() {
        report.push(row.iter().map(|c| if c.is_empty() { Value::Null } else { json!(c) }).collect());
    }
    report.extra("first_extrema", json!(find_first_extrema(traj)));
    report
}

fn evolve(cfg: &RunConfig) -> su3_lgt::Result<Report> {
    let g = single_coupling(cfg)?;
    if cfg.mode == BasisMode::Local {
        let geom = cfg.geometry.build()?;
        let n = (cfg.t_max / cfg.dt).round() as usize;
        let traj = local_trotter_evolve(&geom, &cfg.truncation, g, cfg.dt, n, cfg.order, SectorRotation::TermProduct)?;
        let leak = traj.leakage.as_deref().unwrap_or_default().iter().copied().fold(0.0, f64::max);
        if leak > LEAKAGE_TOL {
            return Err(Error::Tolerance(format!("gauge leakage {leak:e} exceeds {LEAKAGE_TOL:e}")));
        }
        return Ok(trajectory_report(&traj));
    }
    let times = time_grid(cfg.t_max, cfg.dt)?;
    let traj = match cfg.scheme.as_deref() {
        Some(name) if name != "electric-magnetic" => {
            let (scheme, model) = named_scheme(name, g, cfg.order)?;
            let psi0 = StateVector::basis_state(model.dim(), 0);
            trotter_evolve(&scheme, &model.electric, &psi0, &times, cfg.steps.unwrap_or(1))?
        }
        scheme => {
            let sectors = sector_hamiltonians(cfg)?;
            let (_, h) = sectors
                .into_iter()
                .find(|(_, h)| vacuum_index(h).is_ok())
                .ok_or_else(|| Error::Config("no sector contains the trivial vacuum".into()))?;
            let h = h.with_coupling(g);
            let psi0 = StateVector::basis_state(h.dim(), vacuum_index(&h)?);
            let model = DenseModel::from_operator(&h);
            match scheme {
                Some(_) => {
                    let split = electric_magnetic_scheme(&h, cfg.order);
                    trotter_evolve(&split, &model.electric, &psi0, &times, cfg.steps.unwrap_or(1))?
                }
                None => exact_evolve(&model, &psi0, &times),
            }
        }
    };
    Ok(trajectory_report(&traj))
}

fn converge(cfg: &RunConfig) -> su3_lgt::Result<Report> {
    let rows = convergence_sweep(cfg.observable, &cfg.couplings, &cfg.lambdas)?;
    let mut report = Report::new(&["g", "lambda", "observable", "value", "relative_deviation"]);
    for r in &rows {
        report.push(vec![json!(r.g), json!(r.lambda), json!(r.observable), json!(r.value), json!(r.relative_deviation)]);
    }
    let mut fits = Vec::new();
    for &g in &cfg.couplings {
        let sub: Vec<ConvergenceRow> = rows.iter().filter(|r| r.g == g).cloned().collect();
        if let Ok(fit) = fit_log_deviation(&sub, 1e-12, 0.1) {
            fits.push(json!({ "g": g, "fit": fit }));
        }
    }
    report.extra("log_deviation_fits", Value::Array(fits));
    Ok(report)
}

fn box_lambda(t: &Truncation) -> su3_lgt::Result<u32> {
    if t.allow.is_some() || t.lambda_p != t.lambda_q {
        return Err(Error::Config("vertex counts need a symmetric cutoff `trunc = N`".into()));
    }
    Ok(t.lambda_p)
}

/// An irrep list expands to its prefixes, one per Casimir level, so a
/// single run tabulates the whole chain of intermediate truncations.
fn nested_truncations(t: &Truncation) -> Vec<Truncation> {
    let Some(allow) = &t.allow else { return vec![t.clone()] };
    let mut levels: Vec<_> = allow.iter().map(|r| r.casimir()).collect();
    levels.sort();
    levels.dedup();
    levels
        .into_iter()
        .map(|c| Truncation::from_list(&allow.iter().copied().filter(|r| r.casimir() <= c).collect::<Vec<_>>()))
        .collect()
}

fn count(cfg: &RunConfig) -> su3_lgt::Result<Report> {
    match cfg.kind {
        CountKind::Vertices => {
            let lambda = box_lambda(&cfg.truncation)?;
            let mut report = Report::new(&["lambda", "three_point", "four_point"]);
            for l in 0..=lambda {
                let four = if l <= FOUR_POINT_MAX { json!(count_4pt_singlets(l)) } else { Value::Null };
                report.push(vec![json!(l), json!(count_3pt_singlets(l)), four]);
            }
            Ok(report)
        }
        CountKind::Plaquette => {
            let mut report = Report::new(&["truncation", "states", "nonzero_mes", "ratio"]);
            for trunc in nested_truncations(&cfg.truncation) {
                let c = count_plaquette_physical(&trunc);
                report.push(vec![json!(trunc.to_string()), json!(c.states), json!(c.nonzero_mes), json!(c.ratio())]);
            }
            Ok(report)
        }
        CountKind::Fit => {
            let lambda = box_lambda(&cfg.truncation)?;
            let mut report = Report::new(&["table", "degree", "residual", "coefficients"]);
            let three = ScalingTable::from_fn(0..=lambda, count_3pt_singlets)?;
            let four = ScalingTable::from_fn(0..=lambda.min(FOUR_POINT_MAX), count_4pt_singlets)?;
            for (name, table) in [("three_point", three), ("four_point", four)] {
                let max_degree = (table.rows.len() - 1).min(10);
                let fit = fit_scaling(&table, max_degree)?;
                for f in &fit.fits {
                    report.push(vec![json!(name), json!(f.degree), json!(f.residual), json!(f.coefficients)]);
                }
                report.extra(&format!("{name}_plateau_degree"), json!(fit.plateau_degree));
            }
            Ok(report)
        }
    }
}

fn compile(cfg: &RunConfig) -> su3_lgt::Result<Report> {
    let g = single_coupling(cfg)?;
    let alpha = -cfg.dt / (2.0 * g * g);
    let trunc = &cfg.truncation;
    let mut report =
        Report::new(&["sector", "class", "terms", "rotations", "controlled_paulis", "paulis", "generator"]);
    let mut circuits = Vec::new();
    for sector in enumerate_control_sectors(trunc) {
        let gen = build_sector_generator(&sector, trunc)?;
        let (rep, _) = sector_class(&sector, trunc);
        let circuit = compile_sector_circuit(&gen, cfg.encoding, alpha)?;
        let counts = circuit.counts();
        report.push(vec![
            json!(sector.label()),
            json!(rep.label()),
            json!(gen.terms.len()),
            json!(counts.rotations),
            json!(counts.controlled_paulis),
            json!(counts.paulis),
            json!(gen.render()),
        ]);
        circuits.push(json!({ "sector": sector.label(), "circuit": circuit.to_json() }));
    }
    report.extra("alpha", json!(alpha));
    if cfg.format == crate::config::Format::Json {
        report.extra("circuits", Value::Array(circuits));
    }
    Ok(report)
}

fn benchmark(cfg: &RunConfig) -> su3_lgt::Result<Report> {
    let g = single_coupling(cfg)?;
    let mut report = Report::new(&["truncation", "trotter_steps", "order", "t_max", "max", "t_min", "min"]);
    for row in electric_extrema_benchmarks(g)? {
        let (t_max, max) = row.extrema.max.map_or((Value::Null, Value::Null), |(t, v)| (json!(t), json!(v)));
        let (t_min, min) = row.extrema.min.map_or((Value::Null, Value::Null), |(t, v)| (json!(t), json!(v)));
        report.push(vec![json!(row.truncation), json!(row.trotter_steps), json!(row.order), t_max, max, t_min, min]);
    }
    Ok(report)
}

fn su2_tail(cfg: &RunConfig) -> su3_lgt::Result<Report> {
    let mut report =
        Report::new(&["g", "j_max", "slope", "predicted", "relative_error", "r_squared", "window_lo", "window_hi"]);
    for &g in &cfg.couplings {
        let fit = tail_slope(&SU2PlaquetteModel::new(cfg.j_max, g)?)?;
        report.push(vec![
            json!(g),
            json!(cfg.j_max),
            json!(fit.slope),
            json!(fit.predicted),
            json!((fit.slope - fit.predicted).abs() / fit.predicted.abs()),
            json!(fit.r_squared),
            json!(fit.window.0),
            json!(fit.window.1),
        ]);
    }
    Ok(report)
}
