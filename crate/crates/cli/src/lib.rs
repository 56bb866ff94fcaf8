//! Command-line front end: argument definitions and report generation.
//!
//! [`execute`] turns parsed arguments into a [`Report`]; `main` only handles I/O.

pub mod format;

use std::f64::consts::{PI, TAU};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use nscs_core::coherent::{self, husimi_grid, zeta_from_angles};
use nscs_core::dsl::{parse_angle, parse_program, Severity, SourceProgram};
use nscs_core::geometric::{case_path, closed_form_a, numeric_geometric_phase, PhaseCase};
use nscs_core::nmr::{simulate_program, SystemParams};
use nscs_core::sweep::{run_sweep, SweepConfig, SweepKind, SweepMode};
use nscs_core::{build_coherent_state, CoherentAngles, SpinValue};

use crate::format::{chopped, complex, m_label, real, triple};

pub const SCHEMA_VERSION: u32 = 1;

fn angle_arg(s: &str) -> Result<f64, String> {
    parse_angle(s)
}

#[derive(Debug, Parser)]
#[command(name = "nscs", version, about = "Spin coherent states under NMR quadrupolar dynamics")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Spin quantum number, e.g. 3/2 or 1.5
    #[arg(long, global = true, default_value = "3/2")]
    pub spin: SpinValue,
    /// Quadrupolar coupling in rad/s (accepts the `pi` suffix, e.g. 30000pi)
    #[arg(long, global = true, value_parser = angle_arg, allow_hyphen_values = true)]
    pub omega_q: Option<f64>,
    /// RF amplitude in rad/s; overrides --pulse-length
    #[arg(long, global = true, value_parser = angle_arg)]
    pub omega_1: Option<f64>,
    /// Length of a pi pulse in seconds, fixing omega_1 = pi / length
    #[arg(long, global = true, default_value_t = 8e-6)]
    pub pulse_length: f64,
    /// Sweep points, or path steps for geomphase
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Write output here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Polar,
    Azimuthal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    All,
    Ideal,
    Finite,
    Composite,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coherent state report: zeta, Bloch vector, amplitudes, density matrix
    State {
        #[arg(value_parser = angle_arg, allow_hyphen_values = true)]
        theta: f64,
        #[arg(value_parser = angle_arg, allow_hyphen_values = true)]
        phi: f64,
    },
    /// Polar or azimuthal rotation sweep
    Sweep {
        #[arg(value_enum)]
        kind: KindArg,
        #[arg(long, value_enum, default_value_t = ModeArg::All)]
        mode: ModeArg,
        /// Free evolution between pulses in composite mode, seconds
        #[arg(long, default_value_t = 0.0)]
        gap: f64,
    },
    /// Numeric against closed-form geometric phase
    Geomphase {
        /// A (free evolution), B (single-mode analogue) or C (two-mode analogue)
        case: PhaseCase,
        /// Polar angles; defaults to 19 points from 0 to pi
        #[arg(long, value_parser = angle_arg, allow_hyphen_values = true)]
        theta: Vec<f64>,
        /// Repeat each phase under a random smooth gauge and report the change
        #[arg(long)]
        gauge_check: bool,
    },
    /// Simulate a .pseq pulse program
    Run {
        program: PathBuf,
        #[arg(long, value_parser = angle_arg, allow_hyphen_values = true, default_value = "0")]
        theta: f64,
        #[arg(long, value_parser = angle_arg, allow_hyphen_values = true, default_value = "0")]
        phi: f64,
    },
    /// Husimi Q distribution on a (theta, phi) grid
    Husimi {
        #[arg(long, value_parser = angle_arg, allow_hyphen_values = true, default_value = "0")]
        theta: f64,
        #[arg(long, value_parser = angle_arg, allow_hyphen_values = true, default_value = "0")]
        phi: f64,
        /// Grid as THETAxPHI intervals
        #[arg(long, default_value = "32x64")]
        resolution: String,
    },
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spin: SpinValue,
    pub params: SystemParams,
    pub output: OutputFormat,
    pub seed: u64,
    pub out_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_args(g: &GlobalArgs) -> Result<Self, String> {
        let mut params = SystemParams::reference_experiment();
        if let Some(q) = g.omega_q {
            params.omega_q = q;
        }
        params.omega_1 = match g.omega_1 {
            Some(w) => w,
            None => {
                if !(g.pulse_length > 0.0) {
                    return Err("--pulse-length must be positive".into());
                }
                SystemParams::omega_1_from_pi_pulse(g.pulse_length)
            }
        };
        Ok(Self {
            spin: g.spin,
            params,
            output: g.format,
            seed: g.seed,
            out_path: g.out.clone(),
        })
    }
}

/// Rendered output plus anything destined for standard error.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub body: String,
    pub diagnostics: Vec<String>,
    /// Set when an error diagnostic was produced; the process exits nonzero.
    pub failed: bool,
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("write to memory");
    for r in rows {
        w.write_record(r).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 csv")
}

/// JSON number carrying the same 12-digit value as the CSV output.
fn num(x: f64) -> Value {
    real(x).parse::<f64>().map(Value::from).unwrap_or(Value::Null)
}

fn json_body(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

pub fn execute(cli: &Cli) -> Result<Report, String> {
    let cfg = RunConfig::from_args(&cli.global)?;
    let mut report = match &cli.command {
        Command::State { theta, phi } => cmd_state(&cfg, *theta, *phi)?,
        Command::Sweep { kind, mode, gap } => cmd_sweep(&cfg, *kind, *mode, *gap, cli.global.steps)?,
        Command::Geomphase { case, theta, gauge_check } => {
            cmd_geomphase(&cfg, *case, theta, cli.global.steps, *gauge_check)?
        }
        Command::Run { program, theta, phi } => cmd_run(&cfg, program, *theta, *phi)?,
        Command::Husimi { theta, phi, resolution } => cmd_husimi(&cfg, *theta, *phi, resolution)?,
    };
    let warnings: Vec<String> = cfg.params.advisories().into_iter().map(|a| format!("warning: {a}")).collect();
    report.diagnostics.splice(0..0, warnings);
    Ok(report)
}

fn angles(theta: f64, phi: f64) -> Result<CoherentAngles, String> {
    CoherentAngles::new(theta, phi).map_err(|e| e.to_string())
}

pub fn cmd_state(cfg: &RunConfig, theta: f64, phi: f64) -> Result<Report, String> {
    let j = cfg.spin;
    let a = angles(theta, phi)?;
    let state = build_coherent_state(j, a);
    let n = coherent::bloch_vector(&state, j);
    let rho = coherent::density_matrix_elements(j, a);
    let zeta = zeta_from_angles(a);
    let two_m: Vec<i64> = (0..j.dimension()).map(|k| 2 * k as i64 - i64::from(j.two_j())).collect();

    let body = match cfg.output {
        OutputFormat::Csv => {
            let mut rows = vec![
                vec!["spin".into(), j.to_string()],
                vec!["theta".into(), real(a.theta())],
                vec!["phi".into(), real(a.phi())],
                vec!["zeta".into(), format::zeta(&zeta)],
                vec!["n".into(), triple(n.as_array())],
                vec!["n_x".into(), chopped(n.x)],
                vec!["n_y".into(), chopped(n.y)],
                vec!["n_z".into(), chopped(n.z)],
            ];
            for (k, tm) in two_m.iter().enumerate() {
                rows.push(vec![format!("amplitude[{}]", m_label(*tm)), complex(state.amplitude(k))]);
            }
            for (r, tr) in two_m.iter().enumerate() {
                for (c, tc) in two_m.iter().enumerate() {
                    rows.push(vec![format!("rho[{};{}]", m_label(*tr), m_label(*tc)), complex(rho.get(r, c))]);
                }
            }
            csv_table(&["key", "value"], &rows)
        }
        OutputFormat::Json => {
            let amps: Vec<Value> = two_m
                .iter()
                .enumerate()
                .map(|(k, tm)| {
                    let z = state.amplitude(k);
                    json!({"m": m_label(*tm), "re": num(z.re), "im": num(z.im), "label": complex(z)})
                })
                .collect();
            let d = j.dimension();
            let rho_json: Vec<Value> = (0..d)
                .map(|r| Value::Array((0..d).map(|c| json!([num(rho.get(r, c).re), num(rho.get(r, c).im)])).collect()))
                .collect();
            json_body(json!({
                "schema_version": SCHEMA_VERSION,
                "command": "state",
                "spin": j.to_string(),
                "theta": num(a.theta()),
                "phi": num(a.phi()),
                "zeta": format::zeta(&zeta),
                "n": [num(chop(n.x)), num(chop(n.y)), num(chop(n.z))],
                "n_label": triple(n.as_array()),
                "amplitudes": amps,
                "rho": rho_json,
            }))
        }
    };
    Ok(Report { body, ..Default::default() })
}

fn chop(x: f64) -> f64 {
    if x.abs() < format::CHOP {
        0.0
    } else {
        x
    }
}

pub fn cmd_sweep(cfg: &RunConfig, kind: KindArg, mode: ModeArg, gap: f64, steps: Option<usize>) -> Result<Report, String> {
    let kind = match kind {
        KindArg::Polar => SweepKind::Polar,
        KindArg::Azimuthal => SweepKind::Azimuthal,
    };
    let n = steps.unwrap_or(match kind {
        SweepKind::Polar => 19,
        SweepKind::Azimuthal => 33,
    });
    let config = SweepConfig::new(n).with_gap(gap);
    let points = run_sweep(kind, cfg.spin, &cfg.params, &config).map_err(|e| e.to_string())?;
    let keep = |m: SweepMode| match mode {
        ModeArg::All => true,
        ModeArg::Ideal => m == SweepMode::Ideal,
        ModeArg::Finite => m == SweepMode::Finite,
        ModeArg::Composite => m == SweepMode::Composite,
    };
    let jv = cfg.spin.j();
    let selected: Vec<_> = points.iter().filter(|p| keep(p.mode)).collect();
    let body = match cfg.output {
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = selected
                .iter()
                .map(|p| {
                    let e = p.expectations();
                    vec![
                        real(p.parameter),
                        chopped(e[0]),
                        chopped(e[1]),
                        chopped(e[2]),
                        chopped(e[3]),
                        real(p.fidelity),
                        p.mode.to_string(),
                        chopped(e[0] / jv),
                        chopped(e[1] / jv),
                        chopped(e[2] / jv),
                    ]
                })
                .collect();
            csv_table(
                &["theta_or_phi", "Ix", "Iy", "Iz", "Imag", "fidelity", "mode", "nx", "ny", "nz"],
                &rows,
            )
        }
        OutputFormat::Json => {
            let pts: Vec<Value> = selected
                .iter()
                .map(|p| {
                    let e = p.expectations();
                    json!({
                        "index": p.index,
                        "theta_or_phi": num(p.parameter),
                        "mode": p.mode.as_str(),
                        "Ix": num(chop(e[0])), "Iy": num(chop(e[1])), "Iz": num(chop(e[2])), "Imag": num(chop(e[3])),
                        "fidelity": num(p.fidelity),
                        "nx": num(chop(e[0] / jv)), "ny": num(chop(e[1] / jv)), "nz": num(chop(e[2] / jv)),
                    })
                })
                .collect();
            json_body(json!({
                "schema_version": SCHEMA_VERSION,
                "command": "sweep",
                "kind": kind.to_string(),
                "spin": cfg.spin.to_string(),
                "params": params_json(&cfg.params),
                "inter_pulse_gap": num(gap),
                "points": pts,
            }))
        }
    };
    Ok(Report { body, ..Default::default() })
}

fn params_json(p: &SystemParams) -> Value {
    json!({
        "omega_L": num(p.omega_l),
        "omega_RF": num(p.omega_rf),
        "omega_Q": num(p.omega_q),
        "omega_1": num(p.omega_1),
        "phi_s": num(p.phi_s),
    })
}

/// `α(φ') = c·φ' + Σ a_k sin(kφ' + b_k)` with random coefficients.
pub fn random_gauge(seed: u64) -> impl Fn(f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slope = rng.random_range(-3.0..3.0);
    let terms: Vec<(f64, f64)> = (0..3).map(|_| (rng.random_range(-2.0..2.0), rng.random_range(0.0..TAU))).collect();
    move |p: f64| {
        slope * p
            + terms
                .iter()
                .enumerate()
                .map(|(k, (a, b))| a * ((k + 1) as f64 * p + b).sin())
                .sum::<f64>()
    }
}

pub fn cmd_geomphase(
    cfg: &RunConfig,
    case: PhaseCase,
    thetas: &[f64],
    steps: Option<usize>,
    gauge_check: bool,
) -> Result<Report, String> {
    let j = cfg.spin;
    let n_steps = steps.unwrap_or(20_000);
    let thetas: Vec<f64> = if thetas.is_empty() {
        (0..19).map(|k| PI * k as f64 / 18.0).collect()
    } else {
        thetas.to_vec()
    };
    let mut report = Report::default();
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (i, &theta) in thetas.iter().enumerate() {
        let a = angles(theta, 0.0)?;
        let closed = case.closed_form(j, a.theta());
        let path = case_path(case, j, a, n_steps);
        let result = path.as_ref().map_err(Clone::clone).and_then(numeric_geometric_phase);
        let gauge_delta = match (&path, &result, gauge_check) {
            (Ok(p), Ok(r), true) => numeric_geometric_phase(&p.regauge(random_gauge(cfg.seed.wrapping_add(i as u64))))
                .ok()
                .map(|g| (g.geometric_phase - r.geometric_phase).abs()),
            _ => None,
        };
        let status = match &result {
            Ok(_) => "ok".to_string(),
            Err(e) => {
                report.failed = true;
                report.diagnostics.push(format!(
                    "error: case {case}, j = {j}, theta = {}: {e}",
                    real(a.theta())
                ));
                e.to_string()
            }
        };
        let (numeric, err, est) = match &result {
            Ok(r) => (Some(r.geometric_phase), Some((r.geometric_phase - closed).abs()), Some(r.estimated_error)),
            Err(_) => (None, None, None),
        };
        let opt = |x: Option<f64>| x.map(real).unwrap_or_default();
        let mut row = vec![
            case.to_string(),
            j.to_string(),
            real(a.theta()),
            opt(numeric),
            real(closed),
            opt(err),
            n_steps.to_string(),
            opt(est),
            status.clone(),
        ];
        if gauge_check {
            row.push(opt(gauge_delta));
        }
        rows.push(row);
        let opt_json = |x: Option<f64>| x.map(num).unwrap_or(Value::Null);
        let mut rec = json!({
            "case": case.to_string(),
            "j": j.to_string(),
            "theta": num(a.theta()),
            "numeric_phase": opt_json(numeric),
            "closed_form": num(closed),
            "abs_error": opt_json(err),
            "n_steps": n_steps,
            "estimated_error": opt_json(est),
            "status": status,
        });
        if gauge_check {
            rec["gauge_delta"] = opt_json(gauge_delta);
        }
        records.push(rec);
    }
    let mut header = vec![
        "case",
        "j",
        "theta",
        "numeric_phase",
        "closed_form",
        "abs_error",
        "n_steps",
        "estimated_error",
        "status",
    ];
    if gauge_check {
        header.push("gauge_delta");
    }
    report.body = match cfg.output {
        OutputFormat::Csv => csv_table(&header, &rows),
        OutputFormat::Json => json_body(json!({
            "schema_version": SCHEMA_VERSION,
            "command": "geomphase",
            "rows": records,
        })),
    };
    // keep the spin-1/2 anchor visible to readers of the closed forms
    debug_assert!((closed_form_a(SpinValue::new(1).unwrap(), PI) - TAU).abs() < 1e-12);
    Ok(report)
}

pub fn cmd_run(cfg: &RunConfig, program: &std::path::Path, theta: f64, phi: f64) -> Result<Report, String> {
    let origin = program.display().to_string();
    let bytes = std::fs::read(program).map_err(|e| format!("{origin}: {e}"))?;
    let (events, diags) = match std::str::from_utf8(&bytes) {
        Ok(text) => parse_program(&SourceProgram::from_file(origin.clone(), text)),
        Err(_) => nscs_core::dsl::parse_bytes(&bytes),
    };
    let mut report = Report {
        diagnostics: diags.iter().map(|d| d.render(&origin)).collect(),
        ..Default::default()
    };
    if diags.iter().any(|d| d.severity == Severity::Error) {
        report.failed = true;
        return Ok(report);
    }
    let j = cfg.spin;
    let initial = build_coherent_state(j, angles(theta, phi)?);
    let traj = simulate_program(&events, &initial, &cfg.params, j).map_err(|e| e.to_string())?;
    let jv = j.j();
    report.body = match cfg.output {
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = traj
                .expectations
                .iter()
                .zip(&traj.times)
                .enumerate()
                .map(|(k, (e, t))| {
                    vec![
                        k.to_string(),
                        real(*t),
                        chopped(e[0]),
                        chopped(e[1]),
                        chopped(e[2]),
                        chopped(e[3]),
                        chopped(e[0] / jv),
                        chopped(e[1] / jv),
                        chopped(e[2] / jv),
                    ]
                })
                .collect();
            csv_table(&["step", "time", "Ix", "Iy", "Iz", "Imag", "nx", "ny", "nz"], &rows)
        }
        OutputFormat::Json => {
            let steps: Vec<Value> = traj
                .expectations
                .iter()
                .zip(&traj.times)
                .enumerate()
                .map(|(k, (e, t))| {
                    json!({
                        "step": k, "time": num(*t),
                        "Ix": num(chop(e[0])), "Iy": num(chop(e[1])), "Iz": num(chop(e[2])), "Imag": num(chop(e[3])),
                        "nx": num(chop(e[0] / jv)), "ny": num(chop(e[1] / jv)), "nz": num(chop(e[2] / jv)),
                    })
                })
                .collect();
            json_body(json!({
                "schema_version": SCHEMA_VERSION,
                "command": "run",
                "program": origin,
                "spin": j.to_string(),
                "params": params_json(&cfg.params),
                "steps": steps,
            }))
        }
    };
    Ok(report)
}

fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("invalid resolution '{s}' (expected THETAxPHI, e.g. 64x128)");
    let (a, b) = s.split_once('x').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn cmd_husimi(cfg: &RunConfig, theta: f64, phi: f64, resolution: &str) -> Result<Report, String> {
    let (nt, np) = parse_resolution(resolution)?;
    let j = cfg.spin;
    let state = build_coherent_state(j, angles(theta, phi)?);
    let grid = husimi_grid(nt, np);
    let q = coherent::husimi_q(&state, j, &grid);
    let body = match cfg.output {
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = grid
                .iter()
                .zip(&q)
                .map(|(a, q)| vec![real(a.theta()), real(a.phi()), chopped(*q)])
                .collect();
            csv_table(&["theta", "phi", "q"], &rows)
        }
        OutputFormat::Json => {
            let pts: Vec<Value> = grid
                .iter()
                .zip(&q)
                .map(|(a, q)| json!([num(a.theta()), num(a.phi()), num(chop(*q))]))
                .collect();
            json_body(json!({
                "schema_version": SCHEMA_VERSION,
                "command": "husimi",
                "spin": j.to_string(),
                "columns": ["theta", "phi", "q"],
                "points": pts,
            }))
        }
    };
    Ok(Report { body, ..Default::default() })
}
