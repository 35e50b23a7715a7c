//! Subcommand execution: load the config, run the requested computation,
//! write the requested artifact formats, print a one-line summary per result.
//!
//! Output discipline: artifacts are pure functions of (config text, seed,
//! version), so identical runs produce byte-identical files.  Every file
//! embeds provenance — the tool version, the SHA-256 of the config text and
//! the seed — as a `#` line in CSV, an XML comment in SVG, and a
//! `"provenance"` object in JSON.  JSON artifacts additionally embed the
//! fully-resolved set of config keys the run consumed, defaults included.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use parmol::emit::{self, Json};
use parmol::{
    BlochState, DipoleTransition, ExternalField, GrowthFit, Orientation, ParametricDrive,
    ScenarioReport, Surface, ThresholdOutcome,
};

use crate::config::{
    build_grating, build_medium, build_scenario, build_transition, Config, SWEEP_PARAMETERS,
};
use crate::{classify, CliError};

/// Which subcommand to execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Simulate,
    FloquetMap,
    Threshold,
    Estimate,
    Sweep,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Simulate => "simulate",
            CommandKind::FloquetMap => "floquet-map",
            CommandKind::Threshold => "threshold",
            CommandKind::Estimate => "estimate",
            CommandKind::Sweep => "sweep",
        }
    }

    /// Formats this subcommand can produce (also its default output set).
    fn applicable_formats(self) -> &'static [Format] {
        match self {
            CommandKind::Simulate | CommandKind::FloquetMap => {
                &[Format::Csv, Format::Json, Format::Svg]
            }
            CommandKind::Threshold => &[Format::Json],
            CommandKind::Estimate => &[Format::Json, Format::Txt],
            CommandKind::Sweep => &[Format::Csv, Format::Json],
        }
    }
}

const COMMAND_NAMES: &[&str] = &["simulate", "floquet-map", "threshold", "estimate", "sweep"];

/// Artifact formats selectable with `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Svg,
    Txt,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
            Format::Txt => "txt",
        }
    }
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            "txt" => Ok(Format::Txt),
            other => Err(CliError::Config(format!(
                "unknown format '{other}' (choose from csv, json, svg, txt)"
            ))),
        }
    }
}

/// Parse the `--format` list: comma-separated, e.g. `csv,json`.
pub fn parse_formats(list: &str) -> Result<Vec<Format>, CliError> {
    let mut out = Vec::new();
    for item in list.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        out.push(item.parse()?);
    }
    if out.is_empty() {
        return Err(CliError::Config(format!("empty format list '{list}'")));
    }
    Ok(out)
}

/// Everything the binary hands over after flag parsing.
#[derive(Debug, Clone)]
pub struct RunArgs {
    pub command: CommandKind,
    pub config_path: PathBuf,
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub formats: Option<Vec<Format>>,
}

struct Provenance {
    version: &'static str,
    config_sha256: String,
    seed: Option<u64>,
}

impl Provenance {
    fn seed_str(&self) -> String {
        match self.seed {
            Some(s) => s.to_string(),
            None => "none".to_string(),
        }
    }

    fn stamp(&self) -> String {
        format!(
            "parmol {} config_sha256={} seed={}",
            self.version,
            self.config_sha256,
            self.seed_str()
        )
    }

    fn csv_line(&self) -> String {
        format!("# {}\n", self.stamp())
    }

    fn svg_comment(&self) -> String {
        format!("<!-- {} -->\n", self.stamp())
    }

    fn json(&self) -> Json {
        Json::obj([
            ("tool", Json::Str("parmol".to_string())),
            ("version", Json::Str(self.version.to_string())),
            ("config_sha256", Json::Str(self.config_sha256.clone())),
            (
                "seed",
                match self.seed {
                    Some(s) => Json::Int(s as i64),
                    None => Json::Null,
                },
            ),
        ])
    }
}

struct Ctx<'a> {
    cfg: &'a Config,
    out_dir: &'a Path,
    seed: Option<u64>,
    workers: Option<usize>,
    formats: BTreeSet<Format>,
    provenance: Provenance,
}

impl Ctx<'_> {
    fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// Append provenance and the resolved-config record to a JSON object.
    /// Call only after all config reads for the run are done.
    fn finalize_json(&self, mut json: Json) -> String {
        if let Json::Obj(pairs) = &mut json {
            pairs.push(("provenance".to_string(), self.provenance.json()));
            pairs.push((
                "config".to_string(),
                Json::Obj(
                    self.cfg
                        .resolved()
                        .into_iter()
                        .map(|(k, v)| (k, Json::Str(v)))
                        .collect(),
                ),
            ));
        }
        let mut s = json.to_string();
        s.push('\n');
        s
    }

    fn write(&self, filename: &str, contents: &str) -> Result<(), CliError> {
        let path = self.out_dir.join(filename);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        println!("wrote {}", path.display());
        Ok(())
    }
}

/// Execute one subcommand end to end.
pub fn run(args: &RunArgs) -> Result<(), CliError> {
    let cfg = Config::load(&args.config_path)?;

    // The config may declare its intended command; the subcommand on the
    // command line is authoritative, but a mismatch is worth a warning.
    if let Some(declared) = cfg.get_str("command") {
        if !COMMAND_NAMES.contains(&declared.as_str()) {
            return Err(cfg.err_at(
                "command",
                format!(
                    "unknown command '{declared}' (choose from {})",
                    COMMAND_NAMES.join(", ")
                ),
            ));
        }
        if declared != args.command.name() {
            eprintln!(
                "note: config declares command = {declared}; running {}",
                args.command.name()
            );
        }
    }
    cfg.note_resolved("command", args.command.name());

    let seed = match args.seed {
        Some(s) => {
            cfg.note_resolved("run.seed", s.to_string());
            Some(s)
        }
        None => cfg.get_u64("run.seed")?,
    };

    if let Some(0) = args.workers {
        return Err(CliError::Config("--workers must be >= 1".to_string()));
    }

    let applicable = args.command.applicable_formats();
    let formats: BTreeSet<Format> = match &args.formats {
        None => applicable.iter().copied().collect(),
        Some(requested) => {
            let mut set = BTreeSet::new();
            for f in requested {
                if !applicable.contains(f) {
                    return Err(CliError::Config(format!(
                        "format '{}' does not apply to {} (applicable: {})",
                        f.name(),
                        args.command.name(),
                        applicable
                            .iter()
                            .map(|a| a.name())
                            .collect::<Vec<_>>()
                            .join(", ")
                    )));
                }
                set.insert(*f);
            }
            set
        }
    };

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.out_dir.display())))?;

    let ctx = Ctx {
        cfg: &cfg,
        out_dir: &args.out_dir,
        seed,
        workers: args.workers,
        formats,
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION"),
            config_sha256: cfg.sha256_hex().to_string(),
            seed,
        },
    };

    match args.command {
        CommandKind::Estimate => run_estimate(&ctx),
        CommandKind::Threshold => run_threshold(&ctx),
        CommandKind::FloquetMap => run_floquet_map(&ctx),
        CommandKind::Simulate => run_simulate(&ctx),
        CommandKind::Sweep => run_sweep(&ctx),
    }
}

fn make_pool(workers: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    builder
        .build()
        .map_err(|e| CliError::Compute(format!("failed to build worker pool: {e}")))
}

fn grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| min + (max - min) * i as f64 / (n - 1) as f64)
        .collect()
}

fn drive_json(drive: &ParametricDrive) -> Json {
    match drive.source {
        parmol::DriveSource::Classical => Json::obj([
            ("amplitude", Json::Num(drive.a_drive)),
            ("source", Json::Str("classical".to_string())),
        ]),
        parmol::DriveSource::TwoLevel { delta_n } => Json::obj([
            ("amplitude", Json::Num(drive.a_drive)),
            ("source", Json::Str("two-level".to_string())),
            ("delta_n", Json::Num(delta_n)),
        ]),
    }
}

fn fit_json(fit: &GrowthFit) -> Json {
    Json::obj([
        ("omega_pp_per_s", Json::Num(fit.omega_pp)),
        ("r_squared", Json::Num(fit.r_squared)),
        ("n_extrema", Json::Int(fit.n_extrema as i64)),
        ("low_confidence", Json::Bool(fit.low_confidence)),
    ])
}

fn notes_json(notes: &[String]) -> Json {
    Json::Arr(notes.iter().map(|n| Json::Str(n.clone())).collect())
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

fn run_estimate(ctx: &Ctx) -> Result<(), CliError> {
    let scenario = build_scenario(ctx.cfg)?;
    let report = parmol::scenario_report(&scenario).map_err(classify)?;

    let mut line = format!(
        "estimate: {}; omega_pp_net = {:.6e} 1/s",
        if report.growth.above_threshold {
            "above threshold"
        } else {
            "below threshold"
        },
        report.growth.omega_pp_net
    );
    if let Some(l) = report.growth.excitation_length {
        line.push_str(&format!("; excitation length = {:.6e} cm", l));
    }
    if let Some(r) = &report.radiation {
        line.push_str(&format!(
            "; coherent power = {:.6e} W",
            r.coherent_power_watts()
        ));
    }
    println!("{line}");

    if ctx.wants(Format::Json) {
        let body = ctx.finalize_json(report.to_json());
        ctx.write("report.json", &body)?;
    }
    if ctx.wants(Format::Txt) {
        let mut txt = report.to_text();
        txt.push_str(&format!("# {}\n", ctx.provenance.stamp()));
        ctx.write("report.txt", &txt)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// threshold
// ---------------------------------------------------------------------------

/// Fixed Floquet resolution for the threshold command; recorded in the
/// output so the bisection is reproducible.
const THRESHOLD_STEPS_PER_PERIOD: usize = 1024;

fn run_threshold(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let transition = build_transition(cfg)?;
    let omega0 = transition.omega0();
    let grating = build_grating(cfg, omega0)?;
    let medium = build_medium(cfg, omega0)?;
    let delta_n = cfg.get_f64("bloch.delta_n")?;
    if let Some(dn) = delta_n {
        if !(-1.0..=1.0).contains(&dn) {
            return Err(cfg.err_at(
                "bloch.delta_n",
                format!("population difference must lie in [-1, 1], got {dn}"),
            ));
        }
    }

    let mut notes: Vec<String> = Vec::new();

    let coeffs =
        parmol::effective_coefficients(&transition, grating.r0(), &medium).map_err(classify)?;
    let gamma_free = parmol::radiative_rate(&transition, &medium);
    let gamma_envelope = coeffs.damping_rate / 2.0;
    let gamma_hat = gamma_envelope / omega0;
    let drive =
        parmol::drive_amplitude(&transition, &grating, &medium, delta_n).map_err(classify)?;
    let a_threshold_formula = 4.0 * gamma_hat;

    let corrugation_at_threshold = if drive.a_drive > 0.0 {
        let needed = grating.corrugation() * a_threshold_formula / drive.a_drive;
        if needed >= 1.0 {
            notes.push(format!(
                "corrugation {needed:.3e} would be needed to reach threshold; \
                 the geometric bound is a < 1"
            ));
        }
        Some(needed)
    } else {
        notes.push("no parametric drive: the drive amplitude is zero".to_string());
        None
    };

    let lhs = match parmol::threshold_lhs(&transition, &grating, &medium) {
        Ok(v) => Some(v),
        Err(parmol::Error::Unsupported(_)) => {
            notes.push(
                "closed-form threshold criterion applies to a perpendicular dipole \
                 above a conductor; skipped"
                    .to_string(),
            );
            None
        }
        Err(e) => return Err(classify(e)),
    };

    let crossover = match (medium.surface(), medium.orientation()) {
        (Surface::PerfectConductor, Orientation::Perpendicular)
            if grating.corrugation() > 0.0 =>
        {
            Some(
                parmol::threshold_crossover_ratio(grating.corrugation(), medium.eps1())
                    .map_err(classify)?,
            )
        }
        _ => None,
    };

    let (a_threshold_floquet, linear_limit) = if gamma_hat >= parmol::GAMMA_RESOLUTION_FLOOR {
        let bisected = match parmol::threshold_amplitude(
            1.0,
            gamma_hat,
            2.0,
            THRESHOLD_STEPS_PER_PERIOD,
        )
        .map_err(classify)?
        {
            ThresholdOutcome::Unstable { a_threshold } => Some(a_threshold),
            ThresholdOutcome::StableUpTo(a_max) => {
                notes.push(format!(
                    "no instability found up to drive amplitude {a_max}; \
                     bisection result omitted"
                ));
                None
            }
        };
        let limit = parmol::growth_law_validity_limit(1.0, gamma_hat, 512, 0.02)
            .map_err(classify)?;
        (bisected, Some(limit))
    } else {
        notes.push(format!(
            "gamma/omega0 = {gamma_hat:.3e} is below the {:.0e} resolution floor of \
             double-precision Floquet multipliers; the bisection cannot see the \
             threshold and only the closed-form value is reported",
            parmol::GAMMA_RESOLUTION_FLOOR
        ));
        (None, None)
    };

    let mut line = format!(
        "threshold: A_th(formula) = {a_threshold_formula:.6e}, drive A = {:.6e}",
        drive.a_drive
    );
    if let Some(b) = a_threshold_floquet {
        line.push_str(&format!(", A_th(floquet) = {b:.6e}"));
    }
    if let Some(v) = lhs {
        line.push_str(&format!(", lhs = {v:.6e}"));
    }
    println!("{line}");

    if ctx.wants(Format::Json) {
        let json = Json::obj([
            ("omega0_rad_per_s", Json::Num(omega0)),
            ("gamma_free_per_s", Json::Num(gamma_free)),
            ("damping_coefficient_per_s", Json::Num(coeffs.damping_rate)),
            ("gamma_envelope_per_s", Json::Num(gamma_envelope)),
            ("gamma_over_omega0", Json::Num(gamma_hat)),
            ("drive", drive_json(&drive)),
            ("a_threshold_formula", Json::Num(a_threshold_formula)),
            ("a_threshold_floquet", Json::from_option(a_threshold_floquet)),
            (
                "floquet_steps_per_period",
                Json::Int(THRESHOLD_STEPS_PER_PERIOD as i64),
            ),
            ("linear_growth_valid_up_to_a", Json::from_option(linear_limit)),
            (
                "corrugation_at_threshold",
                Json::from_option(corrugation_at_threshold),
            ),
            ("threshold_lhs", Json::from_option(lhs)),
            ("crossover_lambda0_over_r0", Json::from_option(crossover)),
            ("notes", notes_json(&notes)),
        ]);
        ctx.write("threshold.json", &ctx.finalize_json(json))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// floquet-map
// ---------------------------------------------------------------------------

fn run_floquet_map(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let gamma_hat = match cfg.get_f64("map.gamma")? {
        Some(g) => {
            if g < 0.0 {
                return Err(cfg.err_at("map.gamma", format!("must be >= 0, got {g}")));
            }
            g
        }
        None => {
            // Derive the damping ratio from the physical scenario.
            let transition = build_transition(cfg)?;
            let omega0 = transition.omega0();
            let grating = build_grating(cfg, omega0)?;
            let medium = build_medium(cfg, omega0)?;
            let coeffs = parmol::effective_coefficients(&transition, grating.r0(), &medium)
                .map_err(classify)?;
            coeffs.damping_rate / (2.0 * omega0)
        }
    };

    let nu_min = cfg.get_f64_or("map.nu_min", 1.8)?;
    let nu_max = cfg.get_f64_or("map.nu_max", 2.2)?;
    let a_min = cfg.get_f64_or("map.a_min", 0.0)?;
    let a_max = cfg.get_f64_or("map.a_max", 0.1)?;
    let n_nu = cfg.get_u64_or("map.n_nu", 41)? as usize;
    let n_a = cfg.get_u64_or("map.n_a", 41)? as usize;
    let steps = cfg.get_u64_or("map.steps_per_period", 512)? as usize;
    if nu_min <= 0.0 {
        return Err(cfg.err_at("map.nu_min", format!("must be > 0, got {nu_min}")));
    }
    if nu_max < nu_min {
        return Err(cfg.err_at("map.nu_max", "must be >= map.nu_min"));
    }
    if a_min < 0.0 {
        return Err(cfg.err_at("map.a_min", format!("must be >= 0, got {a_min}")));
    }
    if a_max < a_min {
        return Err(cfg.err_at("map.a_max", "must be >= map.a_min"));
    }
    if n_nu < 2 {
        return Err(cfg.err_at("map.n_nu", "grid needs at least 2 columns"));
    }
    if n_a < 2 {
        return Err(cfg.err_at("map.n_a", "grid needs at least 2 rows"));
    }

    let nus = grid(nu_min, nu_max, n_nu);
    let amps = grid(a_min, a_max, n_a);
    let pool = make_pool(ctx.workers)?;
    let map = pool
        .install(|| parmol::stability_map(1.0, gamma_hat, &nus, &amps, steps))
        .map_err(classify)?;

    println!(
        "floquet-map: {n_nu}x{n_a} grid at gamma/omega0 = {gamma_hat:.6e}; \
         contour points = {}, tongue tips = {}",
        map.contour.len(),
        map.tongue_tips.len()
    );

    if ctx.wants(Format::Csv) {
        let csv = format!("{}{}", ctx.provenance.csv_line(), emit::map_csv(&map));
        ctx.write("stability_map.csv", &csv)?;
    }
    let degenerate_axes = nu_max == nu_min || a_max == a_min;
    let mut notes: Vec<String> = Vec::new();
    if ctx.wants(Format::Svg) {
        if degenerate_axes {
            notes.push(
                "svg skipped: a degenerate axis range cannot be drawn".to_string(),
            );
            eprintln!("note: svg skipped, axis range is degenerate");
        } else {
            let svg = format!("{}{}", ctx.provenance.svg_comment(), emit::map_svg(&map));
            ctx.write("stability_map.svg", &svg)?;
        }
    }
    if ctx.wants(Format::Json) {
        let mut json = emit::map_json(&map);
        if let Json::Obj(pairs) = &mut json {
            pairs.push(("notes".to_string(), notes_json(&notes)));
        }
        ctx.write("stability_map.json", &ctx.finalize_json(json))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

/// (p, ṗ) at t = 0: fixed values from the config, or a seeded
/// fluctuation-scale random phase.
fn resolve_ic(
    cfg: &Config,
    seed: Option<u64>,
    random_phase: bool,
    transition: Option<&DipoleTransition>,
) -> Result<((f64, f64), Option<u64>), CliError> {
    if random_phase {
        let t = transition.ok_or_else(|| {
            CliError::Config(
                "sim.random_phase = true requires the transition section".to_string(),
            )
        })?;
        let seed = seed.ok_or_else(|| {
            CliError::Config("sim.random_phase = true requires --seed or run.seed".to_string())
        })?;
        Ok((parmol::fluctuation_ic(t, seed), Some(seed)))
    } else {
        let p = cfg.require_f64("sim.ic_p")?;
        let p_dot = cfg.get_f64_or("sim.ic_p_dot", 0.0)?;
        Ok(((p, p_dot), None))
    }
}

struct SimControls {
    horizon: f64,
    steps: usize,
    fit_window: f64,
    random_phase: bool,
}

fn sim_controls(cfg: &Config) -> Result<SimControls, CliError> {
    let horizon = cfg.get_f64_or("sim.horizon_periods", 200.0)?;
    if horizon <= 0.0 {
        return Err(cfg.err_at("sim.horizon_periods", format!("must be > 0, got {horizon}")));
    }
    let steps = cfg.get_u64_or("sim.steps_per_period", 256)? as usize;
    if steps < parmol::dynamics::MIN_STEPS_PER_PERIOD {
        return Err(cfg.err_at(
            "sim.steps_per_period",
            format!(
                "must be >= {}, got {steps}",
                parmol::dynamics::MIN_STEPS_PER_PERIOD
            ),
        ));
    }
    let fit_window = cfg.get_f64_or("sim.fit_window", parmol::DEFAULT_FIT_WINDOW)?;
    if !(fit_window > 0.0 && fit_window <= 1.0) {
        return Err(cfg.err_at(
            "sim.fit_window",
            format!("must lie in (0, 1], got {fit_window}"),
        ));
    }
    let random_phase = cfg.get_bool_or("sim.random_phase", false)?;
    Ok(SimControls {
        horizon,
        steps,
        fit_window,
        random_phase,
    })
}

fn run_simulate(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let model = cfg.require_str("sim.model")?;
    let c = sim_controls(cfg)?;

    let mut traj = match model.as_str() {
        "mathieu" => {
            let gamma_hat = cfg.require_f64("mathieu.gamma")?;
            if gamma_hat < 0.0 {
                return Err(cfg.err_at("mathieu.gamma", format!("must be >= 0, got {gamma_hat}")));
            }
            let a_drive = cfg.require_f64("mathieu.drive_amplitude")?;
            let nu_hat = cfg.require_f64("mathieu.nu_over_omega0")?;
            if nu_hat < 0.0 {
                return Err(cfg.err_at(
                    "mathieu.nu_over_omega0",
                    format!("must be >= 0, got {nu_hat}"),
                ));
            }
            // A bare Mathieu run may be dimensionless (ω₀ = 1) or scaled to a
            // configured transition frequency.
            let transition = if c.random_phase {
                Some(build_transition(cfg)?)
            } else {
                None
            };
            let omega0 = match &transition {
                Some(t) => t.omega0(),
                None => {
                    let w = cfg.get_f64_or("transition.omega0_rad_per_s", 1.0)?;
                    if w <= 0.0 {
                        return Err(cfg.err_at(
                            "transition.omega0_rad_per_s",
                            format!("must be > 0, got {w}"),
                        ));
                    }
                    w
                }
            };
            let (ic, seed_used) = resolve_ic(cfg, ctx.seed, c.random_phase, transition.as_ref())?;
            let mut traj = parmol::simulate_mathieu(
                omega0,
                gamma_hat * omega0,
                a_drive,
                nu_hat * omega0,
                ic,
                c.horizon,
                c.steps,
            )
            .map_err(classify)?;
            traj.meta.seed = seed_used;
            traj
        }
        "exact" | "retarded" => {
            let transition = build_transition(cfg)?;
            let omega0 = transition.omega0();
            let grating = build_grating(cfg, omega0)?;
            let medium = build_medium(cfg, omega0)?;
            let (ic, seed_used) = resolve_ic(cfg, ctx.seed, c.random_phase, Some(&transition))?;
            let mut traj = if model == "exact" {
                parmol::simulate_exact_modulation(
                    &transition,
                    &grating,
                    &medium,
                    ic,
                    c.horizon,
                    c.steps,
                )
            } else {
                parmol::simulate_retarded(&transition, &grating, &medium, ic, c.horizon, c.steps)
            }
            .map_err(classify)?;
            traj.meta.seed = seed_used;
            traj
        }
        "bloch" => {
            let transition = build_transition(cfg)?;
            let omega0 = transition.omega0();
            let grating = build_grating(cfg, omega0)?;
            let medium = build_medium(cfg, omega0)?;
            let delta_n = cfg.require_f64("bloch.delta_n")?;
            if !(-1.0..=1.0).contains(&delta_n) {
                return Err(cfg.err_at(
                    "bloch.delta_n",
                    format!("population difference must lie in [-1, 1], got {delta_n}"),
                ));
            }
            let pump = cfg.get_f64_or("bloch.delta_n_pump", delta_n)?;
            if !(-1.0..=1.0).contains(&pump) {
                return Err(cfg.err_at(
                    "bloch.delta_n_pump",
                    format!("population difference must lie in [-1, 1], got {pump}"),
                ));
            }
            let (ic, seed_used) = resolve_ic(cfg, ctx.seed, c.random_phase, Some(&transition))?;
            let state0 = BlochState {
                p: ic.0,
                p_dot: ic.1,
                delta_n,
                delta_n_pump: pump,
            };
            let mut traj = parmol::simulate_bloch(
                &transition,
                &grating,
                &medium,
                state0,
                &ExternalField::none(),
                c.horizon,
                c.steps,
            )
            .map_err(classify)?;
            traj.meta.seed = seed_used;
            traj
        }
        other => {
            return Err(cfg.err_at(
                "sim.model",
                format!("expected mathieu, exact, retarded or bloch, got '{other}'"),
            ))
        }
    };

    // Keep the recorded seed consistent even if a model above forgot to set it.
    if traj.meta.seed.is_none() && c.random_phase {
        traj.meta.seed = ctx.seed;
    }

    let mut notes: Vec<String> = Vec::new();
    let fit = match parmol::measure_growth_rate(&traj, c.fit_window) {
        Ok(f) => Some(f),
        Err(e) => {
            notes.push(format!("envelope fit unavailable: {e}"));
            None
        }
    };

    match &fit {
        Some(f) => println!(
            "simulate ({model}): {} samples over {} periods; envelope rate = {:.6e} 1/s \
             (r2 = {:.4}{})",
            traj.len(),
            c.horizon,
            f.omega_pp,
            f.r_squared,
            if f.low_confidence {
                ", low confidence"
            } else {
                ""
            }
        ),
        None => println!(
            "simulate ({model}): {} samples over {} periods; envelope rate unavailable",
            traj.len(),
            c.horizon
        ),
    }

    if ctx.wants(Format::Csv) {
        let csv = format!("{}{}", ctx.provenance.csv_line(), emit::trajectory_csv(&traj));
        ctx.write("trajectory.csv", &csv)?;
    }
    if ctx.wants(Format::Svg) {
        let svg = format!("{}{}", ctx.provenance.svg_comment(), emit::trajectory_svg(&traj));
        ctx.write("trajectory.svg", &svg)?;
    }
    if ctx.wants(Format::Json) {
        let json = Json::obj([
            ("meta", emit::meta_json(&traj.meta)),
            (
                "growth_fit",
                match &fit {
                    Some(f) => fit_json(f),
                    None => Json::Null,
                },
            ),
            ("notes", notes_json(&notes)),
        ]);
        ctx.write("run.json", &ctx.finalize_json(json))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

enum IcSpec {
    Fixed(f64, f64),
    Seeded(u64),
}

struct CellOk {
    report: ScenarioReport,
    fit: Option<GrowthFit>,
    fit_note: Option<String>,
}

/// One sweep point: the closed-form report plus a time-domain growth
/// measurement (frozen-Δn Bloch when a population difference is configured,
/// exact 1/R³ modulation otherwise).
fn sweep_cell(cfg_point: &Config, controls: &SimControls, ic: &IcSpec) -> Result<CellOk, String> {
    let scenario = build_scenario(cfg_point).map_err(|e| e.to_string())?;
    let report =
        parmol::scenario_report(&scenario).map_err(|e| classify(e).to_string())?;

    let ic_values = match ic {
        IcSpec::Fixed(p, p_dot) => (*p, *p_dot),
        IcSpec::Seeded(s) => parmol::fluctuation_ic(&scenario.transition, *s),
    };
    let traj = match scenario.delta_n {
        Some(dn) => parmol::simulate_bloch(
            &scenario.transition,
            &scenario.grating,
            &scenario.medium,
            BlochState {
                p: ic_values.0,
                p_dot: ic_values.1,
                delta_n: dn,
                delta_n_pump: dn,
            },
            &ExternalField::none(),
            controls.horizon,
            controls.steps,
        ),
        None => parmol::simulate_exact_modulation(
            &scenario.transition,
            &scenario.grating,
            &scenario.medium,
            ic_values,
            controls.horizon,
            controls.steps,
        ),
    };
    let (fit, fit_note) = match traj {
        Ok(t) => match parmol::measure_growth_rate(&t, controls.fit_window) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(format!("envelope fit unavailable: {e}"))),
        },
        Err(e) => (None, Some(format!("time-domain run unavailable: {e}"))),
    };
    Ok(CellOk {
        report,
        fit,
        fit_note,
    })
}

fn run_sweep(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let parameter = cfg.require_str("sweep.parameter")?;
    if !SWEEP_PARAMETERS.contains(&parameter.as_str()) {
        return Err(cfg.err_at(
            "sweep.parameter",
            format!(
                "'{parameter}' is not sweepable (choose from {})",
                SWEEP_PARAMETERS.join(", ")
            ),
        ));
    }
    let min = cfg.require_f64("sweep.min")?;
    let max = cfg.require_f64("sweep.max")?;
    let count = cfg.require_u64("sweep.count")? as usize;
    if count < 2 {
        return Err(cfg.err_at("sweep.count", format!("needs at least 2 points, got {count}")));
    }
    let scale = cfg.get_str_or("sweep.scale", "linear");
    let values: Vec<f64> = match scale.as_str() {
        "linear" => grid(min, max, count),
        "log" => {
            if min <= 0.0 || max <= 0.0 {
                return Err(cfg.err_at(
                    "sweep.scale",
                    "log scale needs positive sweep.min and sweep.max",
                ));
            }
            grid(min.ln(), max.ln(), count)
                .into_iter()
                .map(f64::exp)
                .collect()
        }
        other => {
            return Err(cfg.err_at(
                "sweep.scale",
                format!("expected linear or log, got '{other}'"),
            ))
        }
    };

    let controls = sim_controls(cfg)?;
    let ic = if controls.random_phase {
        let seed = ctx.seed.ok_or_else(|| {
            CliError::Config("sim.random_phase = true requires --seed or run.seed".to_string())
        })?;
        IcSpec::Seeded(seed)
    } else {
        IcSpec::Fixed(
            cfg.require_f64("sim.ic_p")?,
            cfg.get_f64_or("sim.ic_p_dot", 0.0)?,
        )
    };

    // Build the base scenario once so configuration errors surface before the
    // fan-out (and so the resolved-key record covers the scenario keys).
    build_scenario(cfg)?;

    let point_configs: Vec<Config> = values
        .iter()
        .map(|v| cfg.with_override(&parameter, &format!("{v:.16e}")))
        .collect();

    let pool = make_pool(ctx.workers)?;
    let outcomes: Vec<Result<CellOk, String>> = pool.install(|| {
        point_configs
            .par_iter()
            .map(|cfg_point| sweep_cell(cfg_point, &controls, &ic))
            .collect()
    });

    let header = [
        "value",
        "omega_pp_formula_per_s",
        "omega_pp_measured_per_s",
        "measured_over_formula",
        "omega_pp_net_per_s",
        "excitation_length_cm",
        "threshold_lhs",
        "above_threshold",
        "coherent_power_watt",
    ];
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    let mut points: Vec<Json> = Vec::with_capacity(values.len());
    for (value, outcome) in values.iter().zip(&outcomes) {
        match outcome {
            Ok(cell) => {
                let formula = cell.report.growth.omega_pp;
                let measured = cell.fit.as_ref().map(|f| f.omega_pp);
                let ratio = match measured {
                    Some(m) if formula != 0.0 => m / formula,
                    _ => f64::NAN,
                };
                println!(
                    "sweep {parameter} = {value:.6e}: omega_pp = {formula:.6e} 1/s, \
                     measured = {} 1/s",
                    measured
                        .map(|m| format!("{m:.6e}"))
                        .unwrap_or_else(|| "n/a".to_string())
                );
                rows.push(vec![
                    *value,
                    formula,
                    measured.unwrap_or(f64::NAN),
                    ratio,
                    cell.report.growth.omega_pp_net,
                    cell.report.growth.excitation_length.unwrap_or(f64::NAN),
                    cell.report.threshold_lhs.unwrap_or(f64::NAN),
                    if cell.report.growth.above_threshold {
                        1.0
                    } else {
                        0.0
                    },
                    cell.report
                        .radiation
                        .as_ref()
                        .map(|r| r.coherent_power_watts())
                        .unwrap_or(f64::NAN),
                ]);
                points.push(Json::obj([
                    ("value", Json::Num(*value)),
                    ("report", cell.report.to_json()),
                    (
                        "growth_fit",
                        match &cell.fit {
                            Some(f) => fit_json(f),
                            None => Json::Null,
                        },
                    ),
                    (
                        "fit_note",
                        match &cell.fit_note {
                            Some(n) => Json::Str(n.clone()),
                            None => Json::Null,
                        },
                    ),
                ]));
            }
            Err(msg) => {
                println!("sweep {parameter} = {value:.6e}: error: {msg}");
                rows.push(
                    std::iter::once(*value)
                        .chain(std::iter::repeat(f64::NAN).take(header.len() - 1))
                        .collect(),
                );
                points.push(Json::obj([
                    ("value", Json::Num(*value)),
                    ("error", Json::Str(msg.clone())),
                ]));
            }
        }
    }

    if ctx.wants(Format::Csv) {
        let csv = format!(
            "{}{}",
            ctx.provenance.csv_line(),
            emit::csv_table(&header, rows)
        );
        ctx.write("sweep.csv", &csv)?;
    }
    if ctx.wants(Format::Json) {
        let json = Json::obj([
            ("parameter", Json::Str(parameter.clone())),
            ("scale", Json::Str(scale.clone())),
            ("points", Json::Arr(points)),
        ]);
        ctx.write("sweep.json", &ctx.finalize_json(json))?;
    }
    Ok(())
}
