//! Run configuration: an optional versioned JSON file merged with flags.
//! Flags win on conflict and every override is logged.

use std::path::{Path, PathBuf};

use calmix_core::{McConfig, MixtureParams, OneWayDesign, QuadSpec, SimMode};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::{McArgs, ModeKind, ParamArgs, Preset, QuadArgs};
use crate::error::{CliError, CliResult};
use crate::io;
use crate::report::{Format, SCHEMA_VERSION};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<MixtureParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<OneWayDesign>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad: Option<QuadSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let shown = path.display();
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{shown}: {e}")))?;
        let value: Value =
            serde_json::from_str(&text).map_err(|e| CliError::input(format!("{shown}: {e}")))?;
        match value.get("schema_version").and_then(Value::as_u64) {
            Some(v) if v == u64::from(SCHEMA_VERSION) => {}
            Some(v) => {
                return Err(CliError::input(format!(
                    "{shown}: unsupported schema_version {v}, expected {SCHEMA_VERSION}"
                )))
            }
            None => {
                return Err(CliError::input(format!(
                    "{shown}: missing integer field `schema_version`"
                )))
            }
        }
        serde_json::from_value(value).map_err(|e| CliError::input(format!("{shown}: {e}")))
    }
}

/// Configuration being resolved for one run, with a log of every decision
/// that was not a plain default.
#[derive(Debug, Clone)]
pub struct Resolver {
    pub config: RunConfig,
    pub log: Vec<String>,
}

impl Resolver {
    pub fn new(file: Option<RunConfig>, command: &str) -> CliResult<Self> {
        let from_file = file.is_some();
        let mut config = file.unwrap_or_default();
        config.schema_version = SCHEMA_VERSION;
        if let Some(c) = &config.command {
            if c != command {
                return Err(CliError::input(format!(
                    "config file is for command `{c}`, not `{command}`"
                )));
            }
        }
        config.command = Some(command.to_string());
        let mut log = Vec::new();
        if from_file {
            log.push("config file loaded".to_string());
        }
        Ok(Self { config, log })
    }

    fn note(&mut self, msg: String) {
        self.log.push(msg);
    }

    pub fn input(&mut self, flag: Option<&PathBuf>) -> CliResult<PathBuf> {
        self.optional_input(flag)?.ok_or_else(|| {
            CliError::usage("an input file is required (--input or config `inputs`)")
        })
    }

    pub fn optional_input(&mut self, flag: Option<&PathBuf>) -> CliResult<Option<PathBuf>> {
        match flag {
            Some(p) => {
                if let Some(old) = self.config.inputs.first() {
                    if old != p {
                        self.note(format!(
                            "inputs[0]: {} (config) -> {} (flag)",
                            old.display(),
                            p.display()
                        ));
                    }
                }
                self.config.inputs = vec![p.clone()];
                Ok(Some(p.clone()))
            }
            None => Ok(self.config.inputs.first().cloned()),
        }
    }

    pub fn output(&mut self, flag: Option<&PathBuf>) -> Option<PathBuf> {
        if let Some(p) = flag {
            if let Some(old) = &self.config.output {
                if old != p {
                    self.note(format!(
                        "output: {} (config) -> {} (flag)",
                        old.display(),
                        p.display()
                    ));
                }
            }
            self.config.output = Some(p.clone());
        }
        self.config.output.clone()
    }

    pub fn format(&mut self, flag: Option<Format>) -> Format {
        if let Some(f) = flag {
            if let Some(old) = self.config.format {
                if old != f {
                    self.note(format!(
                        "format: {} (config) -> {} (flag)",
                        old.name(),
                        f.name()
                    ));
                }
            }
            self.config.format = Some(f);
        }
        *self.config.format.get_or_insert(Format::Json)
    }

    pub fn quad(&mut self, a: &QuadArgs) -> CliResult<QuadSpec> {
        let mut q = self.config.quad.unwrap_or_default();
        let fields: [(&str, Option<f64>, &mut f64); 3] = [
            ("abs_tol", a.abs_tol, &mut q.abs_tol),
            ("rel_tol", a.rel_tol, &mut q.rel_tol),
            (
                "mixing_range_sigmas",
                a.mixing_range,
                &mut q.mixing_range_sigmas,
            ),
        ];
        let mut notes = Vec::new();
        for (name, flag, slot) in fields {
            if let Some(v) = flag {
                if *slot != v {
                    notes.push(format!("quad.{name}: {slot:?} -> {v:?} (flag)"));
                }
                *slot = v;
            }
        }
        self.log.extend(notes);
        q.validate()?;
        self.config.quad = Some(q);
        Ok(q)
    }

    /// Mixture parameters from a preset, the config file and per-field
    /// flags, in increasing priority.
    pub fn params(&mut self, a: &ParamArgs) -> CliResult<MixtureParams> {
        self.optional_params(a)?.ok_or_else(|| {
            CliError::usage(
                "mixture parameters are required: use --preset, a config `params` block, \
                 or all of --n --beta0 --sigma0 --mu-z --sigma-z --beta1 --sigma1",
            )
        })
    }

    pub fn optional_params(&mut self, a: &ParamArgs) -> CliResult<Option<MixtureParams>> {
        let mut base = self.config.params;
        if let Some(preset) = a.preset {
            if base.is_some() {
                self.note(format!(
                    "params: config block replaced by preset {}",
                    preset.name()
                ));
            } else {
                self.note(format!("params: preset {}", preset.name()));
            }
            base = Some(preset.params());
        }
        let flags: [(&str, Option<f64>); 6] = [
            ("beta0", a.beta0),
            ("sigma0", a.sigma0),
            ("mu_z", a.mu_z),
            ("sigma_z", a.sigma_z),
            ("beta1", a.beta1),
            ("sigma1", a.sigma1),
        ];
        let any_flag = a.n.is_some() || flags.iter().any(|(_, v)| v.is_some());
        let mut p = match base {
            Some(p) => p,
            None if !any_flag => return Ok(None),
            None => {
                let missing: Vec<String> = std::iter::once(("n", a.n.map(|v| v as f64)))
                    .chain(flags)
                    .filter(|(_, v)| v.is_none())
                    .map(|(k, _)| format!("--{}", k.replace('_', "-")))
                    .collect();
                if !missing.is_empty() {
                    return Err(CliError::usage(format!(
                        "incomplete mixture parameters, missing {}",
                        missing.join(" ")
                    )));
                }
                MixtureParams {
                    n: 0,
                    beta0: 0.0,
                    sigma0: 0.0,
                    mu_z: 0.0,
                    sigma_z: 0.0,
                    beta1: 0.0,
                    sigma1: 0.0,
                    known_coefficients: false,
                }
            }
        };
        let had_base = base.is_some();
        if let Some(n) = a.n {
            if had_base && p.n != n {
                self.note(format!("params.n: {} -> {n} (flag)", p.n));
            }
            p.n = n;
        }
        let slots = [
            &mut p.beta0,
            &mut p.sigma0,
            &mut p.mu_z,
            &mut p.sigma_z,
            &mut p.beta1,
            &mut p.sigma1,
        ];
        let mut notes = Vec::new();
        for ((name, flag), slot) in flags.into_iter().zip(slots) {
            if let Some(v) = flag {
                if had_base && *slot != v {
                    notes.push(format!("params.{name}: {slot} -> {v} (flag)"));
                }
                *slot = v;
            }
        }
        self.log.extend(notes);
        p.validate()?;
        self.config.params = Some(p);
        Ok(Some(p))
    }

    pub fn mc(&mut self, a: &McArgs) -> CliResult<McConfig> {
        let mut cfg = self.config.mc.clone().unwrap_or(McConfig::new(10_000, 1));
        if let Some(r) = a.reps {
            if self.config.mc.is_some() && cfg.replications != r {
                self.note(format!(
                    "mc.replications: {} -> {r} (flag)",
                    cfg.replications
                ));
            }
            cfg.replications = r;
        }
        if let Some(s) = a.seed {
            if self.config.mc.is_some() && cfg.seed != s {
                self.note(format!("mc.seed: {} -> {s} (flag)", cfg.seed));
            }
            cfg.seed = s;
        }
        match a.mode {
            Some(ModeKind::Coefficient) => {
                if cfg.mode != SimMode::CoefficientLevel {
                    self.note("mc.mode: full_calibration -> coefficient_level (flag)".into());
                }
                cfg.mode = SimMode::CoefficientLevel;
            }
            Some(ModeKind::Full) => {
                let design = match &a.design {
                    Some(path) => Some(io::read_series(path, "x")?),
                    None => None,
                };
                cfg.mode = match (cfg.mode, design, a.sigma_u) {
                    (_, Some(design), Some(sigma_u)) => {
                        SimMode::FullCalibration { design, sigma_u }
                    }
                    (SimMode::FullCalibration { design, sigma_u }, d, s) => {
                        SimMode::FullCalibration {
                            design: d.unwrap_or(design),
                            sigma_u: s.unwrap_or(sigma_u),
                        }
                    }
                    _ => {
                        return Err(CliError::usage(
                            "--mode full needs --design <csv with column x> and --sigma-u, \
                             or a full_calibration mode in the config file",
                        ))
                    }
                };
            }
            None => {}
        }
        cfg.validate()?;
        self.config.mc = Some(cfg.clone());
        Ok(cfg)
    }

    pub fn design(
        &mut self,
        sizes: &[usize],
        means: &[f64],
        sds: &[f64],
    ) -> CliResult<Option<OneWayDesign>> {
        let any = !(sizes.is_empty() && means.is_empty() && sds.is_empty());
        if !any {
            return Ok(self.config.design.clone());
        }
        if sizes.is_empty() || means.is_empty() || sds.is_empty() {
            return Err(CliError::usage(
                "a design from flags needs all of --sizes, --means and --sds",
            ));
        }
        if self.config.design.is_some() {
            self.note("design: config block replaced by flags".into());
        }
        let d = OneWayDesign::new(sizes.to_vec(), means.to_vec(), sds.to_vec())?;
        self.config.design = Some(d.clone());
        Ok(Some(d))
    }

    /// The resolved configuration with command options and the resolution
    /// log, as echoed into outputs.
    pub fn echo(&self, options: Value, precision: usize) -> Value {
        let mut v = serde_json::to_value(&self.config).unwrap_or(Value::Null);
        if let Value::Object(map) = &mut v {
            map.insert("precision".into(), precision.into());
            map.insert("options".into(), options);
            map.insert("resolution".into(), self.log.clone().into());
        }
        v
    }
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Octane => "octane",
            Preset::Unit => "unit",
        }
    }

    pub fn params(self) -> MixtureParams {
        match self {
            Preset::Octane => octane_params(),
            Preset::Unit => MixtureParams::unit(1.0),
        }
    }
}

/// The reference octane case-study parameters.
pub fn octane_params() -> MixtureParams {
    MixtureParams {
        n: 11,
        beta0: 87.2818,
        sigma0: 0.1846,
        mu_z: 0.0,
        sigma_z: 1.0,
        beta1: 1.8546,
        sigma1: 0.5837,
        known_coefficients: false,
    }
}
