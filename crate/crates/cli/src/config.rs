//! Line-oriented `key = value` configuration: strict, diff-friendly, every
//! error carries the offending line number.
//!
//! Grammar per line: optional whitespace, `#` comments (whole-line or
//! trailing), or `dotted.key = value`.  Keys come from a fixed whitelist;
//! unknown or duplicated keys are hard errors.  Values are parsed at the
//! point of use, so a key that a subcommand never reads can hold anything
//! syntactically valid.
//!
//! Laboratory units are converted to Gaussian CGS here, at the boundary, via
//! [`parmol::from_si`]; everything handed to the core crate is CGS.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use parmol::{
    from_si, plasma_epsilon, DipoleTransition, GratingKinematics, MediumPair, Orientation,
    PlateGeometry, Scenario, SiUnit, Surface,
};
use sha2::{Digest, Sha256};

use crate::{classify, CliError};

/// Every key the parser accepts, with the unit convention in the name.
pub const KNOWN_KEYS: &[&str] = &[
    "command",
    "transition.omega0_rad_per_s",
    "transition.dipole_debye",
    "transition.charge_esu",
    "transition.mass_g",
    "grating.standoff_um",
    "grating.a",
    "grating.period_um",
    "resonance.order",
    "beam.speed_km_per_s",
    "beam.density_per_cm3",
    "medium.eps1",
    "medium.plasma_density_per_cm3",
    "medium.surface",
    "medium.eps2_re",
    "medium.eps2_im",
    "medium.orientation",
    "bloch.delta_n",
    "bloch.delta_n_pump",
    "plate.width_cm",
    "plate.length_cm",
    "sim.model",
    "sim.horizon_periods",
    "sim.steps_per_period",
    "sim.ic_p",
    "sim.ic_p_dot",
    "sim.random_phase",
    "sim.fit_window",
    "mathieu.gamma",
    "mathieu.drive_amplitude",
    "mathieu.nu_over_omega0",
    "map.gamma",
    "map.nu_min",
    "map.nu_max",
    "map.a_min",
    "map.a_max",
    "map.n_nu",
    "map.n_a",
    "map.steps_per_period",
    "sweep.parameter",
    "sweep.min",
    "sweep.max",
    "sweep.count",
    "sweep.scale",
    "run.seed",
];

/// Parameters a sweep may vary.  Each is applied by overriding the raw config
/// entry, so a swept run goes through exactly the same construction path as a
/// single run.
pub const SWEEP_PARAMETERS: &[&str] = &[
    "grating.a",
    "grating.standoff_um",
    "beam.speed_km_per_s",
    "beam.density_per_cm3",
    "transition.omega0_rad_per_s",
    "transition.dipole_debye",
    "bloch.delta_n",
];

#[derive(Debug, Clone)]
struct Entry {
    raw: String,
    line: usize,
}

/// A parsed config file.  Reads are tracked so each run can embed the
/// fully-resolved set of keys it actually consumed, defaults included.
#[derive(Debug)]
pub struct Config {
    path: PathBuf,
    sha256: String,
    entries: BTreeMap<String, Entry>,
    resolved: Mutex<BTreeMap<String, String>>,
}

impl Clone for Config {
    fn clone(&self) -> Self {
        Config {
            path: self.path.clone(),
            sha256: self.sha256.clone(),
            entries: self.entries.clone(),
            resolved: Mutex::new(self.resolved.lock().unwrap().clone()),
        }
    }
}

impl Config {
    /// Read and parse a config file.
    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Config::parse(&text, path)
    }

    /// Parse config text.  `path` is used only for error messages and the
    /// provenance record; the hash is over `text` exactly as given.
    pub fn parse(text: &str, path: &Path) -> Result<Config, CliError> {
        let sha256 = sha256_hex(text.as_bytes());
        let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "{} line {line_no}: expected `key = value`, got '{line}'",
                    path.display()
                )));
            };
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::Config(format!(
                    "{} line {line_no}: unknown key '{key}'",
                    path.display()
                )));
            }
            if value.is_empty() {
                return Err(CliError::Config(format!(
                    "{} line {line_no}: key '{key}' has an empty value",
                    path.display()
                )));
            }
            if let Some(prev) = entries.get(key) {
                return Err(CliError::Config(format!(
                    "{} line {line_no}: duplicate key '{key}' (first set on line {})",
                    path.display(),
                    prev.line
                )));
            }
            entries.insert(
                key.to_string(),
                Entry {
                    raw: value.to_string(),
                    line: line_no,
                },
            );
        }
        Ok(Config {
            path: path.to_path_buf(),
            sha256,
            entries,
            resolved: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// SHA-256 of the raw config text, lowercase hex.
    pub fn sha256_hex(&self) -> &str {
        &self.sha256
    }

    pub fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// Keys consumed so far with their effective values (defaults included),
    /// sorted by key.
    pub fn resolved(&self) -> BTreeMap<String, String> {
        self.resolved.lock().unwrap().clone()
    }

    /// Record a value the run decided on outside the file (e.g. the
    /// subcommand, or a CLI-flag override) so it appears in the resolved set.
    pub fn note_resolved(&self, key: &str, value: impl Into<String>) {
        self.resolved
            .lock()
            .unwrap()
            .insert(key.to_string(), value.into());
    }

    /// Copy of this config with one entry replaced (or added); used by sweeps.
    /// The synthetic entry reports line 0 in any error message.
    pub fn with_override(&self, key: &str, value: &str) -> Config {
        let mut clone = self.clone();
        clone.entries.insert(
            key.to_string(),
            Entry {
                raw: value.to_string(),
                line: 0,
            },
        );
        clone.note_resolved(key, value);
        clone
    }

    /// Error message pinned to the line a key was set on.
    pub fn err_at(&self, key: &str, msg: impl std::fmt::Display) -> CliError {
        match self.entries.get(key) {
            Some(e) => CliError::Config(format!(
                "{} line {}: key '{key}': {msg}",
                self.path.display(),
                e.line
            )),
            None => CliError::Config(format!("{}: key '{key}': {msg}", self.path.display())),
        }
    }

    fn missing(&self, key: &str) -> CliError {
        CliError::Config(format!(
            "{}: missing required key '{key}'",
            self.path.display()
        ))
    }

    fn record(&self, key: &str, value: &str) {
        self.resolved
            .lock()
            .unwrap()
            .insert(key.to_string(), value.to_string());
    }

    pub fn get_str(&self, key: &str) -> Option<String> {
        let e = self.entries.get(key)?;
        self.record(key, &e.raw);
        Some(e.raw.clone())
    }

    pub fn get_str_or(&self, key: &str, default: &str) -> String {
        match self.entries.get(key) {
            Some(e) => {
                self.record(key, &e.raw);
                e.raw.clone()
            }
            None => {
                self.record(key, default);
                default.to_string()
            }
        }
    }

    pub fn require_str(&self, key: &str) -> Result<String, CliError> {
        self.get_str(key).ok_or_else(|| self.missing(key))
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        let v: f64 = e
            .raw
            .parse()
            .map_err(|_| self.err_at(key, format!("unparseable number '{}'", e.raw)))?;
        if !v.is_finite() {
            return Err(self.err_at(key, format!("number must be finite, got '{}'", e.raw)));
        }
        self.record(key, &e.raw);
        Ok(Some(v))
    }

    pub fn get_f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.get_f64(key)? {
            Some(v) => Ok(v),
            None => {
                self.record(key, &format!("{default}"));
                Ok(default)
            }
        }
    }

    pub fn require_f64(&self, key: &str) -> Result<f64, CliError> {
        self.get_f64(key)?.ok_or_else(|| self.missing(key))
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        let v: u64 = e
            .raw
            .parse()
            .map_err(|_| self.err_at(key, format!("unparseable integer '{}'", e.raw)))?;
        self.record(key, &e.raw);
        Ok(Some(v))
    }

    pub fn get_u64_or(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.get_u64(key)? {
            Some(v) => Ok(v),
            None => {
                self.record(key, &format!("{default}"));
                Ok(default)
            }
        }
    }

    pub fn require_u64(&self, key: &str) -> Result<u64, CliError> {
        self.get_u64(key)?.ok_or_else(|| self.missing(key))
    }

    pub fn get_bool_or(&self, key: &str, default: bool) -> Result<bool, CliError> {
        let Some(e) = self.entries.get(key) else {
            self.record(key, if default { "true" } else { "false" });
            return Ok(default);
        };
        let v = match e.raw.as_str() {
            "true" => true,
            "false" => false,
            other => {
                return Err(self.err_at(key, format!("expected true or false, got '{other}'")))
            }
        };
        self.record(key, &e.raw);
        Ok(v)
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Hash helper shared with tests: SHA-256 of raw bytes, lowercase hex.
pub fn config_sha256_hex(bytes: &[u8]) -> String {
    sha256_hex(bytes)
}

// ---------------------------------------------------------------------------
// Builders: config → core types, with line-attributed validation
// ---------------------------------------------------------------------------

/// The oscillator strength can come from a dipole moment (two-level), a
/// charge/mass pair (classical), or both (consistency-checked bridge).
pub fn build_transition(cfg: &Config) -> Result<DipoleTransition, CliError> {
    let omega0 = cfg.require_f64("transition.omega0_rad_per_s")?;
    if omega0 <= 0.0 {
        return Err(cfg.err_at(
            "transition.omega0_rad_per_s",
            format!("transition frequency must be > 0, got {omega0}"),
        ));
    }
    let dipole = cfg
        .get_f64("transition.dipole_debye")?
        .map(|d| from_si(d, SiUnit::Debye))
        .transpose()
        .map_err(classify)?;
    let charge = cfg.get_f64("transition.charge_esu")?;
    let mass = cfg.get_f64("transition.mass_g")?;
    let pair = match (charge, mass) {
        (Some(q), Some(m)) => Some((q, m)),
        (None, None) => None,
        (Some(_), None) => {
            return Err(cfg.err_at(
                "transition.charge_esu",
                "transition.charge_esu requires transition.mass_g",
            ))
        }
        (None, Some(_)) => {
            return Err(cfg.err_at(
                "transition.mass_g",
                "transition.mass_g requires transition.charge_esu",
            ))
        }
    };
    let built = match (dipole, pair) {
        (Some(d), Some((q, m))) => DipoleTransition::with_both(omega0, q, m, d),
        (Some(d), None) => DipoleTransition::two_level(omega0, d),
        (None, Some((q, m))) => DipoleTransition::classical(omega0, q, m),
        (None, None) => {
            return Err(CliError::Config(format!(
                "{}: transition needs transition.dipole_debye and/or \
                 transition.charge_esu + transition.mass_g",
                cfg.path().display()
            )))
        }
    };
    built.map_err(classify)
}

/// Standoff, corrugation and washboard period.  The period comes from
/// `grating.period_um` directly or from `resonance.order` (period solved so
/// that ν = 2ω₀/order at the configured speed) — exactly one of the two.
pub fn build_grating(cfg: &Config, omega0: f64) -> Result<GratingKinematics, CliError> {
    let standoff_um = cfg.require_f64("grating.standoff_um")?;
    if standoff_um <= 0.0 {
        return Err(cfg.err_at(
            "grating.standoff_um",
            format!("standoff must be > 0, got {standoff_um}"),
        ));
    }
    let r0 = from_si(standoff_um, SiUnit::Micrometer).map_err(classify)?;

    let a = cfg.get_f64_or("grating.a", 0.0)?;
    if a < 0.0 {
        return Err(cfg.err_at(
            "grating.a",
            format!("corrugation amplitude must be >= 0, got {a}"),
        ));
    }
    if a >= 1.0 {
        return Err(cfg.err_at(
            "grating.a",
            format!("corrugation amplitude must be < 1, got {a}"),
        ));
    }

    let speed_km_s = cfg.get_f64_or("beam.speed_km_per_s", 0.0)?;
    if speed_km_s < 0.0 {
        return Err(cfg.err_at(
            "beam.speed_km_per_s",
            format!("speed must be >= 0, got {speed_km_s}"),
        ));
    }
    let v = from_si(speed_km_s, SiUnit::KmPerS).map_err(classify)?;

    let period_um = cfg.get_f64("grating.period_um")?;
    let order = cfg.get_u64("resonance.order")?;
    let l = match (period_um, order) {
        (Some(_), Some(_)) => {
            return Err(cfg.err_at(
                "grating.period_um",
                "grating.period_um and resonance.order are mutually exclusive; set one",
            ))
        }
        (Some(p), None) => {
            if p <= 0.0 {
                return Err(cfg.err_at(
                    "grating.period_um",
                    format!("period must be > 0, got {p}"),
                ));
            }
            from_si(p, SiUnit::Micrometer).map_err(classify)?
        }
        (None, Some(n)) => {
            if n == 0 {
                return Err(cfg.err_at("resonance.order", "resonance order must be >= 1"));
            }
            if v <= 0.0 {
                return Err(cfg.err_at(
                    "resonance.order",
                    "tuning the period to a resonance needs beam.speed_km_per_s > 0",
                ));
            }
            // ν = 2πv/L = 2ω₀/n  ⇒  L = πvn/ω₀
            std::f64::consts::PI * v * n as f64 / omega0
        }
        (None, None) => {
            return Err(CliError::Config(format!(
                "{}: grating needs grating.period_um or resonance.order",
                cfg.path().display()
            )))
        }
    };
    GratingKinematics::new(r0, a, l, v).map_err(classify)
}

/// Upper half-space permittivity plus the surface model.  ε₁ is given
/// directly or through a plasma density (`ε₁ = 1 − ωₚ²/ω₀²`) — at most one.
pub fn build_medium(cfg: &Config, omega0: f64) -> Result<MediumPair, CliError> {
    let orientation = match cfg.require_str("medium.orientation")?.as_str() {
        "perpendicular" => Orientation::Perpendicular,
        "parallel" => Orientation::Parallel,
        other => {
            return Err(cfg.err_at(
                "medium.orientation",
                format!("expected perpendicular or parallel, got '{other}'"),
            ))
        }
    };

    let eps1_given = cfg.get_f64("medium.eps1")?;
    let plasma = cfg.get_f64("medium.plasma_density_per_cm3")?;
    let eps1 = match (eps1_given, plasma) {
        (Some(_), Some(_)) => {
            return Err(cfg.err_at(
                "medium.eps1",
                "medium.eps1 and medium.plasma_density_per_cm3 are mutually exclusive; set one",
            ))
        }
        (Some(e), None) => e,
        (None, Some(n)) => {
            if n < 0.0 {
                return Err(cfg.err_at(
                    "medium.plasma_density_per_cm3",
                    format!("density must be >= 0, got {n}"),
                ));
            }
            let e = plasma_epsilon(n, omega0).map_err(classify)?;
            if e < 0.0 {
                return Err(cfg.err_at(
                    "medium.plasma_density_per_cm3",
                    format!(
                        "density exceeds the critical density at omega0 \
                         (eps1 = {e:.6e} < 0); waves do not propagate"
                    ),
                ));
            }
            e
        }
        (None, None) => {
            cfg.note_resolved("medium.eps1", "1");
            1.0
        }
    };

    let surface = match cfg.get_str_or("medium.surface", "conductor").as_str() {
        "conductor" => {
            for k in ["medium.eps2_re", "medium.eps2_im"] {
                if cfg.has(k) {
                    return Err(cfg.err_at(k, "requires medium.surface = dielectric"));
                }
            }
            Surface::PerfectConductor
        }
        "dielectric" => {
            let re = cfg.require_f64("medium.eps2_re")?;
            let im = cfg.get_f64_or("medium.eps2_im", 0.0)?;
            Surface::dielectric(re, im)
        }
        other => {
            return Err(cfg.err_at(
                "medium.surface",
                format!("expected conductor or dielectric, got '{other}'"),
            ))
        }
    };

    MediumPair::new(eps1, surface, orientation).map_err(classify)
}

/// Assemble the full physical scenario (transition + grating + medium plus
/// the optional population difference, beam density and plate geometry).
pub fn build_scenario(cfg: &Config) -> Result<Scenario, CliError> {
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

    let beam_density = cfg.get_f64("beam.density_per_cm3")?;
    if let Some(n) = beam_density {
        if n < 0.0 {
            return Err(cfg.err_at(
                "beam.density_per_cm3",
                format!("density must be >= 0, got {n}"),
            ));
        }
    }

    let width = cfg.get_f64("plate.width_cm")?;
    let length = cfg.get_f64("plate.length_cm")?;
    let plate = match (width, length) {
        (Some(w), Some(l)) => Some(PlateGeometry::new(w, l).map_err(classify)?),
        (None, None) => None,
        (Some(_), None) => {
            return Err(cfg.err_at("plate.width_cm", "plate.width_cm requires plate.length_cm"))
        }
        (None, Some(_)) => {
            return Err(cfg.err_at("plate.length_cm", "plate.length_cm requires plate.width_cm"))
        }
    };

    Ok(Scenario {
        transition,
        grating,
        medium,
        delta_n,
        beam_density,
        plate,
    })
}
