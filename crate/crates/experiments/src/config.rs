//! Resolved run configuration.
//!
//! The key-value schema is flat: every field below is one key, lists are
//! comma separated, and custom model coefficients use `coef.<channel>.<pu>.<put>.<pux>`
//! (for example `coef.g11.1.0.0 = 1` adds `u` to `g11`). Channels are `g01`,
//! `g11` and `f`; the custom model starts from the flat one (`g11 = 1`).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use kgnf_core::model::{gallery, Coef, ModelSpec, Monomial, GALLERY};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{config_err, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    NfCheck,
    Evolve,
    DriftSweep,
    Lifespan,
    Lipschitz,
    Strichartz,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::NfCheck,
        Experiment::Evolve,
        Experiment::DriftSweep,
        Experiment::Lifespan,
        Experiment::Lipschitz,
        Experiment::Strichartz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::NfCheck => "nf-check",
            Experiment::Evolve => "evolve",
            Experiment::DriftSweep => "drift-sweep",
            Experiment::Lifespan => "lifespan",
            Experiment::Lipschitz => "lipschitz",
            Experiment::Strichartz => "strichartz",
        }
    }

    pub fn parse(s: &str) -> Option<Experiment> {
        Experiment::ALL.into_iter().find(|e| e.name() == s)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const PROFILES: [&str; 6] = [
    "single-mode",
    "two-mode",
    "high-pair",
    "random-phase",
    "bump",
    "random-bumps",
];

pub const FAULTS: [&str; 2] = ["none", "a0-scale"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub experiment: Experiment,
    /// Gallery name or `custom`.
    pub model: String,
    pub coefficients: BTreeMap<String, f64>,
    pub mass: f64,
    pub n: usize,
    pub length: f64,
    pub dt: f64,
    pub t_final: f64,
    pub eps: Vec<f64>,
    pub s: f64,
    pub profile: String,
    /// Frequency parameter of the profile.
    pub mode: usize,
    pub amp: f64,
    pub phase: f64,
    pub width: f64,
    /// `raw` scales the profile by ε; `unit-hs` first normalizes it in `H^s × H^{s-1}`.
    pub normalize: String,
    pub seed: u64,
    /// Observer cadence in steps.
    pub every: usize,
    pub dealias: bool,
    pub skip_conjugation_nf: bool,
    pub threshold: f64,
    pub cap_factor: f64,
    /// `1` runs forward in time, `-1` backward.
    pub direction: i32,
    pub delta: f64,
    pub time_factor: f64,
    pub ensemble: usize,
    pub horizons: Vec<f64>,
    pub samples: usize,
    pub fault: String,
}

impl Config {
    /// Defaults for one experiment.
    pub fn defaults(experiment: Experiment) -> Config {
        let mut c = Config {
            experiment,
            model: "g11u".into(),
            coefficients: BTreeMap::new(),
            mass: 1.0,
            n: 256,
            length: 2.0 * PI,
            dt: 1e-3,
            t_final: 1.0,
            eps: vec![0.02, 0.01, 0.005],
            s: 3.0,
            profile: "two-mode".into(),
            mode: 1,
            amp: 0.5,
            phase: 0.0,
            width: 2.0,
            normalize: "raw".into(),
            seed: 0,
            every: 10,
            dealias: true,
            skip_conjugation_nf: false,
            threshold: 2.0,
            cap_factor: 50.0,
            direction: 1,
            delta: 1e-5,
            time_factor: 0.1,
            ensemble: 20,
            horizons: vec![4.0, 8.0, 16.0],
            samples: 1000,
            fault: "none".into(),
        };
        match experiment {
            Experiment::NfCheck => c.model = "generic".into(),
            Experiment::Evolve => {
                c.eps = vec![0.01];
                c.t_final = 50.0;
            }
            Experiment::DriftSweep => {}
            Experiment::Lifespan => {
                c.model = "generic".into();
                c.eps = vec![0.1, 0.05, 0.025];
                c.n = 128;
                c.dt = 0.02;
                c.s = 1.0;
                c.phase = 0.3;
                c.normalize = "unit-hs".into();
                c.direction = -1;
            }
            Experiment::Lipschitz => {
                c.eps = vec![0.05];
                c.n = 128;
                c.dt = 0.02;
                c.s = 1.0;
                c.phase = 0.3;
                c.normalize = "unit-hs".into();
                c.every = 5;
            }
            Experiment::Strichartz => {
                c.eps = vec![0.1, 0.05, 0.025];
                c.n = 512;
                c.length = 64.0 * PI;
                c.dt = 0.01;
                c.t_final = 4.0;
                c.s = 1.0;
                c.profile = "bump".into();
                c.every = 1;
            }
        }
        c
    }

    /// Every key with its current value, in schema order.
    pub fn entries(&self) -> Vec<(String, String)> {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = vec![
            ("experiment".to_string(), self.experiment.to_string()),
            ("model".into(), self.model.clone()),
            ("mass".into(), format!("{}", self.mass)),
            ("n".into(), self.n.to_string()),
            ("length".into(), format!("{}", self.length)),
            ("dt".into(), format!("{}", self.dt)),
            ("t_final".into(), format!("{}", self.t_final)),
            ("eps".into(), list(&self.eps)),
            ("s".into(), format!("{}", self.s)),
            ("profile".into(), self.profile.clone()),
            ("mode".into(), self.mode.to_string()),
            ("amp".into(), format!("{}", self.amp)),
            ("phase".into(), format!("{}", self.phase)),
            ("width".into(), format!("{}", self.width)),
            ("normalize".into(), self.normalize.clone()),
            ("seed".into(), self.seed.to_string()),
            ("every".into(), self.every.to_string()),
            ("dealias".into(), self.dealias.to_string()),
            (
                "skip_conjugation_nf".into(),
                self.skip_conjugation_nf.to_string(),
            ),
            ("threshold".into(), format!("{}", self.threshold)),
            ("cap_factor".into(), format!("{}", self.cap_factor)),
            ("direction".into(), self.direction.to_string()),
            ("delta".into(), format!("{}", self.delta)),
            ("time_factor".into(), format!("{}", self.time_factor)),
            ("ensemble".into(), self.ensemble.to_string()),
            ("horizons".into(), list(&self.horizons)),
            ("samples".into(), self.samples.to_string()),
            ("fault".into(), self.fault.clone()),
        ];
        for (k, v) in &self.coefficients {
            out.push((format!("coef.{k}"), format!("{v}")));
        }
        out
    }

    /// Sets one key from its textual value; the error names the key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        fn num<T: std::str::FromStr>(key: &str, v: &str, what: &str) -> Result<T> {
            v.parse::<T>()
                .map_err(|_| config_err(key, format!("expected {what}, got `{v}`")))
        }
        let list = |v: &str| -> Result<Vec<f64>> {
            v.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| num::<f64>(key, t.trim(), "a comma-separated list of numbers"))
                .collect()
        };
        let boolean = |v: &str| -> Result<bool> {
            match v {
                "true" | "on" | "yes" | "1" => Ok(true),
                "false" | "off" | "no" | "0" => Ok(false),
                _ => Err(config_err(key, format!("expected true or false, got `{v}`"))),
            }
        };
        match key {
            "experiment" => {
                self.experiment = Experiment::parse(v)
                    .ok_or_else(|| config_err(key, format!("unknown experiment `{v}`")))?
            }
            "model" => self.model = v.to_string(),
            "mass" => self.mass = num(key, v, "a number")?,
            "n" => self.n = num(key, v, "a positive integer")?,
            "length" | "L" => self.length = num(key, v, "a number")?,
            "dt" => self.dt = num(key, v, "a number")?,
            "t_final" | "T" => self.t_final = num(key, v, "a number")?,
            "eps" => self.eps = list(v)?,
            "s" => self.s = num(key, v, "a number")?,
            "profile" => self.profile = v.to_string(),
            "mode" => self.mode = num(key, v, "a non-negative integer")?,
            "amp" => self.amp = num(key, v, "a number")?,
            "phase" => self.phase = num(key, v, "a number")?,
            "width" => self.width = num(key, v, "a number")?,
            "normalize" => self.normalize = v.to_string(),
            "seed" => self.seed = num(key, v, "a 64-bit unsigned integer")?,
            "every" => self.every = num(key, v, "a positive integer")?,
            "dealias" => self.dealias = boolean(v)?,
            "skip_conjugation_nf" => self.skip_conjugation_nf = boolean(v)?,
            "threshold" => self.threshold = num(key, v, "a number")?,
            "cap_factor" => self.cap_factor = num(key, v, "a number")?,
            "direction" => self.direction = num(key, v, "1 or -1")?,
            "delta" => self.delta = num(key, v, "a number")?,
            "time_factor" => self.time_factor = num(key, v, "a number")?,
            "ensemble" => self.ensemble = num(key, v, "a positive integer")?,
            "horizons" => self.horizons = list(v)?,
            "samples" => self.samples = num(key, v, "a positive integer")?,
            "fault" => self.fault = v.to_string(),
            k if k.starts_with("coef.") => {
                let name = &k["coef.".len()..];
                parse_coef_key(name).map_err(|m| config_err(key, m))?;
                self.coefficients
                    .insert(name.to_string(), num(key, v, "a number")?);
            }
            _ => return Err(config_err(key, "unknown key")),
        }
        Ok(())
    }

    /// Checks every constraint; the first violation names its key.
    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(config_err(key, format!("must be positive and finite, got {x}")))
            }
        };
        if self.model != "custom" && !GALLERY.contains(&self.model.as_str()) {
            return Err(config_err(
                "model",
                format!(
                    "unknown model `{}`; expected custom or one of {}",
                    self.model,
                    GALLERY.join(", ")
                ),
            ));
        }
        if self.model != "custom" && !self.coefficients.is_empty() {
            return Err(config_err(
                "coef",
                "coefficient tables require model = custom",
            ));
        }
        positive("mass", self.mass)?;
        if self.n < 16 || !self.n.is_power_of_two() {
            return Err(config_err(
                "n",
                format!("must be a power of two and at least 16, got {}", self.n),
            ));
        }
        positive("length", self.length)?;
        positive("dt", self.dt)?;
        positive("t_final", self.t_final)?;
        if self.eps.is_empty() {
            return Err(config_err("eps", "needs at least one value"));
        }
        for &e in &self.eps {
            positive("eps", e)?;
        }
        if !(self.s >= 1.0) {
            return Err(config_err("s", format!("must be at least 1, got {}", self.s)));
        }
        if !PROFILES.contains(&self.profile.as_str()) {
            return Err(config_err(
                "profile",
                format!(
                    "unknown profile `{}`; expected one of {}",
                    self.profile,
                    PROFILES.join(", ")
                ),
            ));
        }
        positive("width", self.width)?;
        if !self.amp.is_finite() || !self.phase.is_finite() {
            return Err(config_err("amp", "must be finite"));
        }
        if self.normalize != "raw" && self.normalize != "unit-hs" {
            return Err(config_err(
                "normalize",
                format!("expected raw or unit-hs, got `{}`", self.normalize),
            ));
        }
        if self.every == 0 {
            return Err(config_err("every", "must be at least 1"));
        }
        if !(self.threshold > 1.0) {
            return Err(config_err("threshold", "must exceed 1"));
        }
        positive("cap_factor", self.cap_factor)?;
        if self.direction != 1 && self.direction != -1 {
            return Err(config_err("direction", "must be 1 or -1"));
        }
        positive("delta", self.delta)?;
        positive("time_factor", self.time_factor)?;
        if self.ensemble == 0 {
            return Err(config_err("ensemble", "must be at least 1"));
        }
        if self.horizons.is_empty() {
            return Err(config_err("horizons", "needs at least one value"));
        }
        for &h in &self.horizons {
            positive("horizons", h)?;
        }
        if self.horizons.windows(2).any(|w| w[1] <= w[0]) {
            return Err(config_err("horizons", "must be strictly increasing"));
        }
        if self.samples == 0 {
            return Err(config_err("samples", "must be at least 1"));
        }
        if !FAULTS.contains(&self.fault.as_str()) {
            return Err(config_err(
                "fault",
                format!("expected one of {}", FAULTS.join(", ")),
            ));
        }
        self.model_spec().map(|_| ())
    }

    /// The model this config names, with the dealiasing flag applied.
    pub fn model_spec(&self) -> Result<ModelSpec> {
        let spec = if self.model == "custom" {
            let mut chans: BTreeMap<&str, Vec<Monomial>> = BTreeMap::new();
            chans.insert("g11", vec![Monomial::new(1.0, 0, 0, 0)]);
            for (k, &c) in &self.coefficients {
                let (ch, p) = parse_coef_key(k).map_err(|m| config_err(&format!("coef.{k}"), m))?;
                chans.entry(ch).or_default().push(Monomial::new(c, p[0], p[1], p[2]));
            }
            let take = |ch: &str| chans.get(ch).cloned().map(Coef::Poly).unwrap_or(Coef::zero());
            ModelSpec::new("custom", self.mass, take("g01"), take("g11"), take("f"))
                .map_err(|e| config_err("coef", e.to_string()))?
        } else {
            gallery(&self.model, self.mass).map_err(|e| config_err("model", e.to_string()))?
        };
        Ok(spec.with_dealias(self.dealias))
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn parse_coef_key(k: &str) -> std::result::Result<(&'static str, [u32; 3]), String> {
    let parts: Vec<&str> = k.split('.').collect();
    let bad = || format!("expected <g01|g11|f>.<pu>.<put>.<pux>, got `{k}`");
    if parts.len() != 4 {
        return Err(bad());
    }
    let ch = match parts[0] {
        "g01" => "g01",
        "g11" => "g11",
        "f" => "f",
        _ => return Err(bad()),
    };
    let mut p = [0u32; 3];
    for (slot, t) in p.iter_mut().zip(&parts[1..]) {
        *slot = t.parse().map_err(|_| bad())?;
    }
    if p.iter().sum::<u32>() == 0 {
        return Err(format!("`{k}` is a constant term; the custom model fixes those"));
    }
    Ok((ch, p))
}
