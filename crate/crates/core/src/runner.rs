//! Configuration-driven runs writing fixed-name output files into one
//! directory per run.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::analysis::{
    awgn_monte_carlo, error_sensitivity, even_cat, fock_populations, linspace, reduced_cavity, state_fidelity,
    wigner, GateProblem, MonteCarloReport,
};
use crate::config::{ExperimentConfig, GateKind, SweepMetric};
use crate::dynamics::{propagate_effective, propagate_master, propagate_schrodinger, System};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, MU};
use crate::pulse::{lewis_riesenfeld_phases, prep_schedule, rwa_check_scoped, PulseSchedule, RwaReport};
use crate::rabi::{locate_coefficient_jump, spectrum_sweep};

pub const TOOL_VERSION: &str = concat!("nhqc ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Gate,
    Prep,
    Sweep,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Gate => "gate",
            Command::Prep => "prep",
            Command::Sweep => "sweep",
            Command::Validate => "validate",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out: PathBuf,
    pub override_rwa: bool,
    /// Replaces the config seed.
    pub seed: Option<u64>,
}

/// Files written by a run, in write order.
#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub files: Vec<String>,
    pub rwa: Option<RwaReport>,
}

/// Process exit code for an error: 2 for invalid input or a failed check,
/// 3 for numerical failures, 1 for I/O.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Truncation(_) | Error::StiffFailure { .. } | Error::Numeric(_) | Error::Classification { .. } => 3,
        Error::Io(_) | Error::Json(_) => 1,
        _ => 2,
    }
}

/// Git-style blob hash: sha256 of "blob <len>\0<content>".
pub fn content_hash(text: &str) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", text.len()).as_bytes());
    h.update(text.as_bytes());
    h.finalize().iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

struct Output {
    dir: PathBuf,
    summary: RunSummary,
}

impl Output {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), summary: RunSummary::default() })
    }

    fn write(&mut self, name: &str, text: &str) -> Result<()> {
        fs::write(self.dir.join(name), text)?;
        self.summary.files.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    fn finish(mut self, cmd: Command, cfg: &ExperimentConfig) -> Result<RunSummary> {
        let canonical = cfg.to_toml()?;
        let outputs: Vec<_> = self
            .summary
            .files
            .iter()
            .map(|f| {
                let text = fs::read_to_string(self.dir.join(f))?;
                Ok(json!({ "file": f, "hash": content_hash(&text) }))
            })
            .collect::<Result<_>>()?;
        let manifest = json!({
            "tool": TOOL_VERSION,
            "command": cmd.name(),
            "config_hash": content_hash(&canonical),
            "config": cfg,
            "config_toml": canonical,
            "outputs": outputs,
        });
        self.json("manifest.json", &manifest)?;
        Ok(self.summary)
    }
}

pub fn run(cmd: Command, cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunSummary> {
    let mut cfg = cfg.clone();
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    let mut out = Output::new(&opts.out)?;
    match cmd {
        Command::Spectrum => run_spectrum(&cfg, &mut out)?,
        Command::Gate => run_gate(&cfg, opts.override_rwa, &mut out)?,
        Command::Prep => run_prep(&cfg, opts.override_rwa, &mut out)?,
        Command::Sweep => run_sweep(&cfg, opts.override_rwa, &mut out)?,
        Command::Validate => run_validate(&cfg, &mut out)?,
    }
    out.finish(cmd, &cfg)
}

fn fmt(x: f64) -> String {
    // adding +0.0 turns -0.0 into 0.0
    format!("{:.12e}", x + 0.0)
}

fn run_spectrum(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let s = cfg
        .spectrum
        .as_ref()
        .ok_or_else(|| Error::Configuration("spectrum run needs a [spectrum] section".into()))?;
    let template = cfg.base_model()?;
    let w1 = template.modes[0].omega;
    let ratios = linspace(s.g_min_dimensionless, s.g_max_dimensionless, s.points);
    let g: Vec<f64> = ratios.iter().map(|r| r * w1).collect();
    let sweep = spectrum_sweep(&template, &g)?;

    let levels = s.levels.min(sweep.energies[0].len());
    let mut text = String::from("g_over_omega_c");
    for l in 0..levels {
        let _ = write!(text, ",E{l}_over_omega_c");
    }
    text.push('\n');
    for (i, r) in ratios.iter().enumerate() {
        text.push_str(&fmt(*r));
        for l in 0..levels {
            let _ = write!(text, ",{}", fmt(sweep.energies[i][l] / w1));
        }
        text.push('\n');
    }
    out.write("spectrum.csv", &text)?;

    let layout = template.layout();
    let mut text = String::from("g_over_omega_c,m,fock,c\n");
    for (i, r) in ratios.iter().enumerate() {
        for &m in &s.coefficient_levels {
            for &n in &s.coefficient_fock {
                let (Some(row), true) = (sweep.c_coeffs[i].get(m), n < layout.cavity_dim()) else {
                    return Err(Error::Configuration(format!("coefficient c_{n}^{m} outside the model")));
                };
                let _ = writeln!(text, "{},{m},{n},{}", fmt(*r), fmt(row[n]));
            }
        }
    }
    out.write("coefficients.csv", &text)?;

    if let Some(c) = &s.crossing {
        let tol = 1e-4;
        let g = locate_coefficient_jump(
            &template,
            c.m,
            c.n,
            c.g_lo_dimensionless * w1,
            c.g_hi_dimensionless * w1,
            c.threshold_dimensionless,
            tol * w1,
        )?;
        out.json(
            "crossing.json",
            &json!({
                "m": c.m,
                "fock": c.n,
                "threshold": c.threshold_dimensionless,
                "g_over_omega_c": g / w1,
                "tolerance_over_omega_c": tol,
                "min_tracking_overlap": sweep.min_overlap,
            }),
        )?;
    }
    Ok(())
}

fn gate_problem(cfg: &ExperimentConfig) -> Result<GateProblem> {
    let g = cfg
        .gate
        .as_ref()
        .ok_or_else(|| Error::Configuration("this run needs a [gate] section".into()))?;
    let model = cfg.model()?;
    let spec = g.spec()?;
    let mut p = match g.kind {
        GateKind::Single => GateProblem::single_qubit(model, spec, cfg.schedule.m, cfg.schedule.t_f_ns)?,
        GateKind::Two => GateProblem::two_qubit(model, spec, cfg.schedule.m, cfg.schedule.t_f_ns)?,
    };
    p.schedule.grid_points = cfg.schedule.grid_points;
    Ok(p)
}

fn check_rwa(cfg: &ExperimentConfig, schedule: &PulseSchedule, system: &System, override_rwa: bool) -> Result<RwaReport> {
    let max_level = cfg.rwa.max_level.unwrap_or(usize::MAX);
    let report = rwa_check_scoped(schedule, &system.spectrum, cfg.rwa.ratio_max_dimensionless, max_level, cfg.rwa.scope);
    if !report.pass && !override_rwa {
        let at = report.worst.as_ref().map_or(String::new(), |w| {
            format!(
                " (tone {:?}, |mu,{:?}> to dressed level {}, detuning {:.3} rad/ns{})",
                w.tone,
                w.fock,
                w.dressed_level,
                w.detuning,
                if w.counter_rotating { ", counter-rotating" } else { "" }
            )
        });
        return Err(Error::Rwa(format!("worst ratio {:.4} exceeds {}{at}", report.worst_ratio, report.ratio_max)));
    }
    Ok(report)
}

fn pulses_csv(schedule: &PulseSchedule) -> String {
    let tr = schedule.traces();
    let mut text = String::from("t_ns,xi_rad_per_ns,phi2_rad");
    for tone in &schedule.tones {
        let l = tone.label();
        let _ = write!(text, ",omega_{l}_rad_per_ns,phase_{l}_rad");
    }
    text.push('\n');
    for j in 0..tr.t.len() {
        let _ = write!(text, "{},{},{}", fmt(tr.t[j]), fmt(tr.xi[j]), fmt(tr.phi2[j]));
        for k in 0..schedule.tones.len() {
            let _ = write!(text, ",{},{}", fmt(tr.amplitude[k][j]), fmt(tr.phase[k][j]));
        }
        text.push('\n');
    }
    text
}

fn logical_input(cfg: &ExperimentConfig) -> CVector {
    let v = CVector::from_iterator(
        cfg.decoherence.input_state.len(),
        cfg.decoherence.input_state.iter().map(|&(re, im)| num_complex::Complex64::new(re, im)),
    );
    let n = v.norm();
    v / num_complex::Complex64::new(n, 0.0)
}

#[derive(Serialize)]
struct GateReport {
    f_bar: Option<f64>,
    leakage: Option<f64>,
    delta_i: f64,
    f_bar_delta: Option<f64>,
    q_i: f64,
    theta_dyn_final_rad: f64,
    theta_geo_final_rad: f64,
    peak_amplitudes_rad_per_ns: Vec<f64>,
    awgn: Option<MonteCarloReport>,
    f_out: Option<f64>,
}

fn run_gate(cfg: &ExperimentConfig, override_rwa: bool, out: &mut Output) -> Result<()> {
    let p = gate_problem(cfg)?;
    let rwa = check_rwa(cfg, &p.schedule, &p.system, override_rwa)?;
    out.json("rwa.json", &rwa)?;
    out.summary.rwa = Some(rwa);
    out.write("pulses.csv", &pulses_csv(&p.schedule))?;

    let phases = lewis_riesenfeld_phases(&p.schedule.aux, cfg.schedule.grid_points)?;
    let mut text = String::from("t_ns,theta_dyn_rad,theta_geo_rad,r_rad\n");
    for j in 0..phases.t.len() {
        let _ = writeln!(
            text,
            "{},{},{},{}",
            fmt(phases.t[j]),
            fmt(phases.theta_dyn[j]),
            fmt(phases.theta_geo[j]),
            fmt(phases.r[j])
        );
    }
    out.write("phases.csv", &text)?;

    let mut report = GateReport {
        f_bar: None,
        leakage: None,
        delta_i: cfg.noise.delta_i_dimensionless,
        f_bar_delta: None,
        q_i: error_sensitivity(&p.schedule.aux)?,
        theta_dyn_final_rad: phases.final_dynamic(),
        theta_geo_final_rad: phases.final_geometric(),
        peak_amplitudes_rad_per_ns: p.schedule.peak_amplitudes(),
        awgn: None,
        f_out: None,
    };
    if cfg.propagation.dynamics {
        let opts = cfg.propagation.pure();
        let delta = cfg.noise.delta_i_dimensionless;
        let schedules = if delta != 0.0 {
            vec![p.schedule.clone(), p.schedule.with_error(delta)]
        } else {
            vec![p.schedule.clone()]
        };
        let reports: Vec<_> = schedules.par_iter().map(|s| p.fidelity_of(s, &opts)).collect::<Result<_>>()?;
        report.f_bar = Some(reports[0].f_bar);
        report.leakage = Some(reports[0].leakage);
        report.f_bar_delta = reports.get(1).map(|r| r.f_bar);
        if cfg.noise.samples > 0 {
            report.awgn = Some(awgn_monte_carlo(&p, &cfg.noise_config(), &opts)?);
        }
        if cfg.decoherence.enabled {
            let f = p.output_fidelity(&logical_input(cfg), &cfg.decoherence.rates(), delta, &cfg.propagation.master())?;
            report.f_out = Some(f);
        }
    }
    out.json("fidelity.json", &report)
}

fn run_prep(cfg: &ExperimentConfig, override_rwa: bool, out: &mut Output) -> Result<()> {
    let prep = cfg
        .prep
        .as_ref()
        .ok_or_else(|| Error::Configuration("prep run needs a [prep] section".into()))?;
    let (beta_f, eps) = prep.target_parameters()?;
    let system = System::new(cfg.model()?)?;
    if system.layout().modes() != 1 {
        return Err(Error::Configuration("prep runs need a single cavity mode".into()));
    }
    let mut schedule = prep_schedule(beta_f, &eps, cfg.schedule.t_f_ns, &system.spectrum, cfg.schedule.m)?;
    schedule.grid_points = cfg.schedule.grid_points;
    schedule = schedule.with_error(cfg.noise.delta_i_dimensionless);
    let rwa = check_rwa(cfg, &schedule, &system, override_rwa)?;
    out.json("rwa.json", &rwa)?;
    out.summary.rwa = Some(rwa);
    out.write("pulses.csv", &pulses_csv(&schedule))?;

    let layout = system.layout().clone();
    let nc = layout.cavity_dim();
    let psi0 = layout.ket(MU, &[0]);
    let mut target = CVector::zeros(nc);
    target[0] = beta_f.cos().into();
    for &(k, e) in &eps {
        target[k] = (beta_f.sin() * e).into();
    }
    let target_full = layout.embed(MU, &target);

    let mut runs: Vec<(&str, CMatrix)> = Vec::new();
    if cfg.propagation.dynamics {
        let opts = cfg.propagation.pure();
        let eff = propagate_effective(&system, &schedule, &psi0, &opts)?;
        runs.push(("effective", eff.final_density()));
        let full = propagate_schrodinger(&system, &schedule, &psi0, &opts)?;
        runs.push(("full", full.final_density()));
        if cfg.decoherence.enabled {
            let rho0 = &psi0 * psi0.adjoint();
            let open = propagate_master(&system, &schedule, &rho0, &cfg.decoherence.rates(), &cfg.propagation.master())?;
            runs.push(("open", open.final_density()));
        }
    }

    let pops: Vec<Vec<f64>> = runs.iter().map(|(_, rho)| fock_populations(rho, &layout, MU)).collect();
    let mut text = String::from("n");
    for (name, _) in &runs {
        let _ = write!(text, ",{name}");
    }
    text.push('\n');
    for n in 0..nc {
        text.push_str(&n.to_string());
        for p in &pops {
            let _ = write!(text, ",{}", fmt(p[n]));
        }
        text.push('\n');
    }
    out.write("populations.csv", &text)?;

    let cat = (prep.target == crate::config::PrepTarget::Cat).then(|| {
        let c = even_cat(prep.eta_dimensionless, nc);
        layout.embed(MU, &c)
    });
    let mut fid = serde_json::Map::new();
    fid.insert("beta_f_rad".into(), json!(beta_f));
    fid.insert("epsilon".into(), json!(eps));
    for (name, rho) in &runs {
        let mut e = serde_json::Map::new();
        e.insert("target_fidelity".into(), json!(state_fidelity(rho, &target_full)));
        if let Some(c) = &cat {
            e.insert("cat_fidelity".into(), json!(state_fidelity(rho, c)));
        }
        e.insert("mu_population".into(), json!(fock_populations(rho, &layout, MU).iter().sum::<f64>()));
        fid.insert((*name).into(), serde_json::Value::Object(e));
    }
    out.json("fidelity.json", &fid)?;

    if let Some((_, rho)) = runs.last() {
        let axis = linspace(-prep.wigner_extent, prep.wigner_extent, prep.wigner_points);
        let w = wigner(&reduced_cavity(rho, &layout), &axis, &axis)?;
        out.write("wigner.csv", &w.to_csv())?;
    }
    Ok(())
}

/// Cartesian product of the sweep axes, first axis slowest.
fn sweep_points(cfg: &ExperimentConfig) -> Result<Vec<Vec<f64>>> {
    let s = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Configuration("sweep run needs a [sweep] section".into()))?;
    let mut points = vec![vec![]];
    for axis in &s.axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect();
    }
    Ok(points)
}

fn run_sweep(cfg: &ExperimentConfig, override_rwa: bool, out: &mut Output) -> Result<()> {
    let s = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Configuration("sweep run needs a [sweep] section".into()))?;
    let points = sweep_points(cfg)?;
    let configs: Vec<ExperimentConfig> = points
        .iter()
        .map(|p| {
            let mut c = cfg.clone();
            for (axis, v) in s.axes.iter().zip(p) {
                c = c.with_overrides(&axis.keys, *v)?;
            }
            Ok(c)
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = configs
        .par_iter()
        .map(|c| {
            let p = gate_problem(c)?;
            check_rwa(c, &p.schedule, &p.system, override_rwa)?;
            let delta = c.noise.delta_i_dimensionless;
            match s.metric {
                SweepMetric::FBar => Ok(p.fidelity_of(&p.schedule.with_error(delta), &c.propagation.pure())?.f_bar),
                SweepMetric::FOut => {
                    p.output_fidelity(&logical_input(c), &c.decoherence.rates(), delta, &c.propagation.master())
                }
            }
        })
        .collect::<Result<_>>()?;
    let metric = match s.metric {
        SweepMetric::FBar => "f_bar",
        SweepMetric::FOut => "f_out",
    };
    let mut text = s.axes.iter().map(|a| a.keys[0].as_str()).collect::<Vec<_>>().join(",");
    let _ = writeln!(text, ",{metric}");
    for (p, v) in points.iter().zip(&values) {
        let cols: Vec<String> = p.iter().map(|x| fmt(*x)).collect();
        let _ = writeln!(text, "{},{}", cols.join(","), fmt(*v));
    }
    out.write("sweep.csv", &text)
}

/// Config checks plus the rotating-wave report; a failed check is an error
/// regardless of the override flag.
fn run_validate(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let (schedule, system) = if cfg.gate.is_some() {
        let p = gate_problem(cfg)?;
        (p.schedule, p.system)
    } else if let Some(prep) = &cfg.prep {
        let (beta_f, eps) = prep.target_parameters()?;
        let system = System::new(cfg.model()?)?;
        let s = prep_schedule(beta_f, &eps, cfg.schedule.t_f_ns, &system.spectrum, cfg.schedule.m)?;
        (s, system)
    } else {
        cfg.base_model()?;
        return Ok(());
    };
    let max_level = cfg.rwa.max_level.unwrap_or(usize::MAX);
    let report = rwa_check_scoped(&schedule, &system.spectrum, cfg.rwa.ratio_max_dimensionless, max_level, cfg.rwa.scope);
    out.json("rwa.json", &report)?;
    let pass = report.pass;
    out.summary.rwa = Some(report);
    if !pass {
        return Err(Error::Rwa(format!("RWA check failed, see {}", out.dir.join("rwa.json").display())));
    }
    Ok(())
}
