use std::f64::consts::PI;

use rabi_ring::bogoliubov::{spectrum_at, ExcitationSpectrum};
use rabi_ring::criticality::{
    fit_exponent, gap_curve, linspace, phase_diagram, GapPoint, PhaseCell, ReducedGrid, ScalingFit, Side,
};
use rabi_ring::meanfield::{minimize_energy, SolverOptions, StartOrigin};
use rabi_ring::normal::{phase_census, PhaseCensus};
use rabi_ring::observables::{ring_current, spin_vectors, subring_currents, winding_number};
use rabi_ring::RingParameters;
use serde::Serialize;

use crate::args::{CommonArgs, Format, SideArg, Settings};
use crate::failure::Failure;
use crate::output::{json, num, Table};

/// Settings shared by every command after merging flags and config file.
pub struct Run {
    pub settings: Settings,
    pub format: Format,
    pub options: SolverOptions,
}

impl Run {
    pub fn new(common: &CommonArgs) -> Result<Self, Failure> {
        let settings = Settings::new(common)?;
        let format = settings.get(common.format, "format", Format::Csv)?;
        let defaults = SolverOptions::default();
        let options = SolverOptions {
            seed: settings.get(common.seed, "seed", defaults.seed)?,
            random_starts: settings.get(common.starts, "starts", defaults.random_starts)?,
            ..defaults
        };
        Ok(Self {
            settings,
            format,
            options,
        })
    }
}

fn grid_size(value: usize, name: &str) -> Result<usize, Failure> {
    if value == 0 {
        return Err(Failure::arguments(format!("{name} must be at least 1")));
    }
    Ok(value)
}

#[derive(Serialize)]
struct CellRow {
    theta: f64,
    g1: f64,
    label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
    a4: f64,
    b2: f64,
    current: f64,
    i135: f64,
    i246: f64,
    degeneracy: usize,
}

fn label_text(cell: &PhaseCell) -> String {
    match cell.failure {
        Some(_) => "FAIL".into(),
        None => cell.label.to_string(),
    }
}

impl From<&PhaseCell> for CellRow {
    fn from(c: &PhaseCell) -> Self {
        Self {
            theta: c.theta,
            g1: c.g1,
            label: label_text(c),
            failure: c.failure.clone(),
            a4: c.a4,
            b2: c.b2,
            current: c.current,
            i135: c.i135,
            i246: c.i246,
            degeneracy: c.degeneracy,
        }
    }
}

pub fn phase_diagram_cmd(
    run: &Run,
    common: &CommonArgs,
    theta_min: Option<&String>,
    theta_max: Option<&String>,
    g1_min: Option<f64>,
    g1_max: Option<f64>,
) -> Result<String, Failure> {
    let s = &run.settings;
    let params = s.params(common, 0.0)?;
    let thetas = linspace(
        s.angle(theta_min, "theta-min", -PI)?,
        s.angle(theta_max, "theta-max", PI)?,
        grid_size(s.get(common.grid_theta, "grid-theta", 201)?, "grid-theta")?,
    );
    let g1s = linspace(
        s.get(g1_min, "g1-min", 0.3)?,
        s.get(g1_max, "g1-max", 0.8)?,
        grid_size(s.get(common.grid_g1, "grid-g1", 101)?, "grid-g1")?,
    );
    let cells = phase_diagram(&params, &thetas, &g1s, &run.options)?;
    Ok(match run.format {
        Format::Json => json(&cells.iter().map(CellRow::from).collect::<Vec<_>>()),
        Format::Csv => {
            let mut t = Table::new(&["theta", "g1", "label", "A4", "B2", "I", "I135", "I246"]);
            for c in &cells {
                t.row(&[
                    num(c.theta),
                    num(c.g1),
                    label_text(c),
                    num(c.a4),
                    num(c.b2),
                    num(c.current),
                    num(c.i135),
                    num(c.i246),
                ]);
            }
            t.finish()
        }
    })
}

pub fn current_sweep_cmd(
    run: &Run,
    common: &CommonArgs,
    theta_min: Option<&String>,
    theta_max: Option<&String>,
) -> Result<String, Failure> {
    let s = &run.settings;
    let params = s.params(common, 0.7)?;
    let thetas = linspace(
        s.angle(theta_min, "theta-min", -PI)?,
        s.angle(theta_max, "theta-max", PI)?,
        grid_size(s.get(common.grid_theta, "grid-theta", 201)?, "grid-theta")?,
    );
    let cells = phase_diagram(&params, &thetas, &[params.g1], &run.options)?;
    Ok(match run.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                theta: f64,
                label: String,
                current: f64,
                i135: f64,
                i246: f64,
            }
            let rows: Vec<Row> = cells
                .iter()
                .map(|c| Row {
                    theta: c.theta,
                    label: label_text(c),
                    current: c.current,
                    i135: c.i135,
                    i246: c.i246,
                })
                .collect();
            json(&rows)
        }
        Format::Csv => {
            let mut t = Table::new(&["theta", "I", "I135", "I246"]);
            for c in &cells {
                t.row(&[num(c.theta), num(c.current), num(c.i135), num(c.i246)]);
            }
            t.finish()
        }
    })
}

#[derive(Serialize)]
struct MinimumReport {
    label: String,
    ground_state: bool,
    energy: f64,
    residual_norm: f64,
    iterations: usize,
    origin: StartOrigin,
    a: Vec<f64>,
    b: Vec<f64>,
    current: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    subring_currents: Option<[f64; 2]>,
    winding: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    winding_note: Option<String>,
    spectrum: ExcitationSpectrum,
}

#[derive(Serialize)]
struct SolveReport {
    parameters: RingParameters,
    seed: u64,
    random_starts: usize,
    starts: usize,
    dropped: usize,
    ground_label: String,
    degeneracy: usize,
    minima: Vec<MinimumReport>,
}

pub fn solve_cmd(run: &Run, common: &CommonArgs) -> Result<String, Failure> {
    let params = run.settings.params(common, 0.0)?;
    let result = minimize_energy(&params, &run.options)?;
    let ground = result.degeneracy();
    let Some(global) = result.global() else {
        return Err(Failure::solver(format!(
            "no minimum found at g1 = {} ({} starts, {} dropped)",
            params.g1, result.starts, result.dropped
        )));
    };
    let minima = result
        .minima
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let (winding, winding_note) = match winding_number(&spin_vectors(&r.config)) {
                Ok(w) => (Some(w), None),
                Err(e) => (None, Some(e.to_string())),
            };
            Ok(MinimumReport {
                label: r.label.to_string(),
                ground_state: i < ground,
                energy: r.energy,
                residual_norm: r.residual_norm,
                iterations: r.iterations,
                origin: r.origin,
                a: r.config.a.clone(),
                b: r.config.b.clone(),
                current: ring_current(&r.config),
                subring_currents: subring_currents(&r.config).ok().map(|(x, y)| [x, y]),
                winding,
                winding_note,
                spectrum: spectrum_at(&params, &r.config)?,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let report = SolveReport {
        parameters: params,
        seed: run.options.seed,
        random_starts: run.options.random_starts,
        starts: result.starts,
        dropped: result.dropped,
        ground_label: global.label.to_string(),
        degeneracy: ground,
        minima,
    };
    Ok(match run.format {
        Format::Json => json(&report),
        Format::Csv => {
            let n = params.sites;
            let mut header: Vec<String> = [
                "index", "label", "ground", "energy", "residual", "I", "I135", "I246", "winding", "gap", "stable",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect();
            header.extend((1..=n).map(|i| format!("A{i}")));
            header.extend((1..=n).map(|i| format!("B{i}")));
            let refs: Vec<&str> = header.iter().map(String::as_str).collect();
            let mut t = Table::new(&refs);
            for (i, m) in report.minima.iter().enumerate() {
                let [i135, i246] = m.subring_currents.unwrap_or([f64::NAN, f64::NAN]);
                let mut row = vec![
                    i.to_string(),
                    m.label.clone(),
                    m.ground_state.to_string(),
                    num(m.energy),
                    num(m.residual_norm),
                    num(m.current),
                    num(i135),
                    num(i246),
                    m.winding.map_or("NA".into(), |w| w.to_string()),
                    num(m.spectrum.gap()),
                    m.spectrum.stable.to_string(),
                ];
                row.extend(m.a.iter().map(|&x| num(x)));
                row.extend(m.b.iter().map(|&x| num(x)));
                t.row(&row);
            }
            t.finish()
        }
    })
}

#[derive(Serialize)]
struct SideFit {
    side: Side,
    #[serde(flatten)]
    fit: ScalingFit,
    curve: Vec<GapPoint>,
}

#[derive(Serialize)]
struct ScalingReport {
    theta: f64,
    g1c: f64,
    momentum: usize,
    fits: Vec<SideFit>,
}

pub fn scaling_cmd(
    run: &Run,
    common: &CommonArgs,
    side: Option<SideArg>,
    delta_min: Option<f64>,
    delta_max: Option<f64>,
    points: Option<usize>,
) -> Result<String, Failure> {
    let s = &run.settings;
    let params = s.params(common, 0.0)?;
    let d = ReducedGrid::default();
    let grid = ReducedGrid::new(
        s.get(delta_min, "delta-min", d.min)?,
        s.get(delta_max, "delta-max", d.max)?,
        s.get(points, "points", d.points)?,
    )?;
    let sides = match s.get(side, "side", SideArg::Both)? {
        SideArg::Below => vec![Side::Below],
        SideArg::Above => vec![Side::Above],
        SideArg::Both => vec![Side::Below, Side::Above],
    };
    let mut fits = Vec::new();
    let (mut g1c, mut momentum) = (f64::NAN, 0);
    for side in sides {
        let curve = gap_curve(&params, side, &grid, &run.options)?;
        g1c = curve.g1c;
        momentum = curve.momentum;
        fits.push(SideFit {
            side,
            fit: fit_exponent(&curve)?,
            curve: curve.points,
        });
    }
    let report = ScalingReport {
        theta: params.theta,
        g1c,
        momentum,
        fits,
    };
    Ok(match run.format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut t = Table::new(&[
                "theta", "g1c", "side", "gamma", "log_prefactor", "delta_min", "delta_max", "r_squared", "points",
            ]);
            for f in &report.fits {
                let side = match f.side {
                    Side::Below => "below",
                    Side::Above => "above",
                };
                t.row(&[
                    num(report.theta),
                    num(report.g1c),
                    side.into(),
                    num(f.fit.gamma),
                    num(f.fit.log_prefactor),
                    num(f.fit.window.0),
                    num(f.fit.window.1),
                    num(f.fit.r_squared),
                    f.fit.points.to_string(),
                ]);
            }
            t.finish()
        }
    })
}

pub fn census_cmd(run: &Run, common: &CommonArgs, n_min: Option<usize>, n_max: Option<usize>) -> Result<String, Failure> {
    let s = &run.settings;
    let hop_over_omega = s.get(common.hop, "hop", 0.05)? / s.get(common.omega, "omega", 1.0)?;
    let sizes: Vec<usize> = match s.explicit(common.sites, "N")? {
        Some(n) => vec![n],
        None => (s.get(n_min, "n-min", 3)?..=s.get(n_max, "n-max", 12)?).collect(),
    };
    if sizes.is_empty() || sizes[0] < 3 {
        return Err(Failure::arguments("census needs ring sizes N >= 3"));
    }
    let rows = sizes
        .iter()
        .map(|&n| phase_census(n, hop_over_omega))
        .collect::<Result<Vec<PhaseCensus>, _>>()?;
    Ok(match run.format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut t = Table::new(&["N", "CSR", "FSR", "AFSR"]);
            for r in &rows {
                t.row(&[r.sites.to_string(), r.chiral.to_string(), r.ferro.to_string(), r.antiferro.to_string()]);
            }
            t.finish()
        }
    })
}
