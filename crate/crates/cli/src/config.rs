//! Flat `key = value` run configuration.

use crate::error::CliError;
use mqs_core::bath::{BathSpec, CouplingBound, Discretization, SystemParams};
use mqs_core::potentials::XiRule;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::Path;

/// Subcommand whose defaults apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Bath,
    Kernel,
    Sample,
    Simulate,
    Compare,
    Figure1,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Bath => "bath",
            CommandKind::Kernel => "kernel",
            CommandKind::Sample => "sample",
            CommandKind::Simulate => "simulate",
            CommandKind::Compare => "compare",
            CommandKind::Figure1 => "figure1",
        }
    }
}

/// How the Bohmian frequency is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiChoice {
    /// `bath_dominated` in regime 1, `exact` otherwise.
    Auto,
    Rule(XiRule),
}

impl XiChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            XiChoice::Auto => "auto",
            XiChoice::Rule(r) => r.as_str(),
        }
    }
}

pub const KEYS: &[&str] = &[
    "omega0",
    "hbar",
    "lambda_q",
    "lambda_b",
    "n_modes",
    "omega_c",
    "lambda_q_prime",
    "discretization",
    "coupling_bound",
    "xi_rule",
    "seed",
    "dt",
    "t_end",
    "q0",
    "qdot0",
    "sample_count",
    "probe_times",
    "amplitude_q",
    "phase_q",
    "amplitude_b",
    "phase_b",
    "fit_t_end",
];

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub omega0: f64,
    pub hbar: f64,
    pub lambda_q: f64,
    pub lambda_b: f64,
    pub n_modes: usize,
    pub omega_c: f64,
    pub lambda_q_prime: f64,
    pub discretization: Discretization,
    pub coupling_bound: CouplingBound,
    pub xi_rule: XiChoice,
    pub seed: u64,
    pub dt: f64,
    pub t_end: f64,
    pub q0: f64,
    pub qdot0: f64,
    pub sample_count: usize,
    pub probe_times: Vec<f64>,
    pub amplitude_q: f64,
    pub phase_q: f64,
    pub amplitude_b: f64,
    pub phase_b: f64,
    pub fit_t_end: f64,
}

/// Raw `key → value` pairs, checked against [`KEYS`].
pub fn parse_document(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!(
                "line {}: expected `key = value`, got `{raw}`",
                lineno + 1
            ))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(CliError::Config(format!(
                "line {}: unknown key `{key}`",
                lineno + 1
            )));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(CliError::Config(format!(
                "line {}: duplicate key `{key}`",
                lineno + 1
            )));
        }
    }
    Ok(map)
}

fn number(key: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = v
        .parse()
        .map_err(|_| CliError::Config(format!("`{key}`: `{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::Config(format!("`{key}` must be finite, got {v}")));
    }
    Ok(x)
}

fn integer<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Config(format!("`{key}`: `{v}` is not a non-negative integer")))
}

fn require(ok: bool, key: &str, what: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!("`{key}` {what}")))
    }
}

impl Config {
    pub fn defaults(cmd: CommandKind) -> Self {
        let discretization = match cmd {
            CommandKind::Bath | CommandKind::Sample | CommandKind::Figure1 => {
                Discretization::PaperEq44
            }
            _ => Discretization::KernelMatched,
        };
        let omega0 = 1.0;
        let lambda_q = 0.5;
        Self {
            omega0,
            hbar: 0.1,
            lambda_q,
            lambda_b: 0.5,
            n_modes: 100,
            omega_c: 1.5,
            lambda_q_prime: 2.0 * omega0 * lambda_q,
            discretization,
            coupling_bound: default_bound(discretization),
            xi_rule: XiChoice::Auto,
            seed: 42,
            dt: 1e-3,
            t_end: if cmd == CommandKind::Figure1 {
                10.0
            } else {
                20.0
            },
            q0: 1.0,
            qdot0: 0.0,
            sample_count: 100_000,
            probe_times: vec![0.0, 1.0, 5.0],
            amplitude_q: 1.0,
            phase_q: FRAC_PI_2,
            amplitude_b: 1.0,
            phase_b: FRAC_PI_2,
            fit_t_end: 20.0,
        }
    }

    /// Applies a parsed document on top of the command defaults and
    /// validates the result.
    pub fn resolve(cmd: CommandKind, doc: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let mut c = Self::defaults(cmd);
        let get = |k: &str| doc.get(k).map(String::as_str);
        for (key, slot) in [
            ("omega0", &mut c.omega0),
            ("hbar", &mut c.hbar),
            ("lambda_q", &mut c.lambda_q),
            ("lambda_b", &mut c.lambda_b),
            ("omega_c", &mut c.omega_c),
            ("dt", &mut c.dt),
            ("t_end", &mut c.t_end),
            ("q0", &mut c.q0),
            ("qdot0", &mut c.qdot0),
            ("amplitude_q", &mut c.amplitude_q),
            ("phase_q", &mut c.phase_q),
            ("amplitude_b", &mut c.amplitude_b),
            ("phase_b", &mut c.phase_b),
            ("fit_t_end", &mut c.fit_t_end),
        ] {
            if let Some(v) = get(key) {
                *slot = number(key, v)?;
            }
        }
        if let Some(v) = get("n_modes") {
            c.n_modes = integer("n_modes", v)?;
        }
        if let Some(v) = get("seed") {
            c.seed = integer("seed", v)?;
        }
        if let Some(v) = get("sample_count") {
            c.sample_count = integer("sample_count", v)?;
        }
        c.lambda_q_prime = match get("lambda_q_prime") {
            Some(v) => number("lambda_q_prime", v)?,
            None => 2.0 * c.omega0 * c.lambda_q,
        };
        if let Some(v) = get("discretization") {
            c.discretization = v
                .parse()
                .map_err(|e| CliError::Config(format!("`discretization`: {e}")))?;
        }
        c.coupling_bound = match get("coupling_bound") {
            Some(v) => v
                .parse()
                .map_err(|e| CliError::Config(format!("`coupling_bound`: {e}")))?,
            None => default_bound(c.discretization),
        };
        if let Some(v) = get("xi_rule") {
            c.xi_rule = if v == "auto" {
                XiChoice::Auto
            } else {
                XiChoice::Rule(
                    v.parse()
                        .map_err(|e| CliError::Config(format!("`xi_rule`: {e}")))?,
                )
            };
        }
        if let Some(v) = get("probe_times") {
            c.probe_times = v
                .split(',')
                .map(|s| number("probe_times", s.trim()))
                .collect::<Result<_, _>>()?;
        }
        c.validate(cmd)?;
        Ok(c)
    }

    pub fn load(cmd: CommandKind, path: Option<&Path>) -> Result<Self, CliError> {
        let doc = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    CliError::Config(format!("cannot read config {}: {e}", p.display()))
                })?;
                parse_document(&text)?
            }
            None => BTreeMap::new(),
        };
        Self::resolve(cmd, &doc)
    }

    pub fn validate(&self, cmd: CommandKind) -> Result<(), CliError> {
        self.system_params()?;
        self.bath_spec()
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        require(self.dt > 0.0, "dt", "must be positive")?;
        require(self.t_end > self.dt, "t_end", "must exceed dt")?;
        require(self.fit_t_end > self.dt, "fit_t_end", "must exceed dt")?;
        require(
            self.probe_times.iter().all(|t| *t >= 0.0),
            "probe_times",
            "must be non-negative",
        )?;
        if cmd == CommandKind::Sample {
            require(
                self.sample_count >= 100,
                "sample_count",
                "must be at least 100",
            )?;
        }
        Ok(())
    }

    pub fn system_params(&self) -> Result<SystemParams, CliError> {
        SystemParams::new(self.omega0, self.hbar, self.lambda_q, self.lambda_b)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn bath_spec(&self) -> BathSpec {
        BathSpec::new(
            self.n_modes,
            self.omega_c,
            self.lambda_q_prime,
            self.discretization,
        )
        .with_coupling_bound(self.coupling_bound)
    }

    /// The resolved configuration as a valid config document.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("omega0", self.omega0.to_string());
        kv("hbar", self.hbar.to_string());
        kv("lambda_q", self.lambda_q.to_string());
        kv("lambda_b", self.lambda_b.to_string());
        kv("n_modes", self.n_modes.to_string());
        kv("omega_c", self.omega_c.to_string());
        kv("lambda_q_prime", self.lambda_q_prime.to_string());
        kv("discretization", self.discretization.as_str().to_string());
        kv("coupling_bound", self.coupling_bound.as_str().to_string());
        kv("xi_rule", self.xi_rule.as_str().to_string());
        kv("seed", self.seed.to_string());
        kv("dt", self.dt.to_string());
        kv("t_end", self.t_end.to_string());
        kv("q0", self.q0.to_string());
        kv("qdot0", self.qdot0.to_string());
        kv("sample_count", self.sample_count.to_string());
        kv(
            "probe_times",
            self.probe_times
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        );
        kv("amplitude_q", self.amplitude_q.to_string());
        kv("phase_q", self.phase_q.to_string());
        kv("amplitude_b", self.amplitude_b.to_string());
        kv("phase_b", self.phase_b.to_string());
        kv("fit_t_end", self.fit_t_end.to_string());
        s
    }
}

/// The kernel-matched weights violate the strict coupling bound at the
/// usual desk-scale parameters, so that mapping runs unbounded by default.
fn default_bound(d: Discretization) -> CouplingBound {
    match d {
        Discretization::KernelMatched => CouplingBound::Unbounded,
        Discretization::PaperEq44 => CouplingBound::Strict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_for_every_command() {
        for cmd in [
            CommandKind::Bath,
            CommandKind::Kernel,
            CommandKind::Sample,
            CommandKind::Simulate,
            CommandKind::Compare,
            CommandKind::Figure1,
        ] {
            Config::defaults(cmd).validate(cmd).unwrap();
        }
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_document("omega0 = 1\nomega_zero = 2\n").unwrap_err();
        assert!(err.to_string().contains("omega_zero"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn comments_and_blank_lines() {
        let doc = parse_document("# header\n\nomega0 = 2 # trailing\n  n_modes=5\n").unwrap();
        let c = Config::resolve(CommandKind::Bath, &doc).unwrap();
        assert_eq!(c.omega0, 2.0);
        assert_eq!(c.n_modes, 5);
        // default λ' follows ω₀
        assert_eq!(c.lambda_q_prime, 2.0);
    }

    #[test]
    fn invalid_values_are_rejected() {
        for text in [
            "n_modes = 0",
            "omega0 = -1",
            "dt = abc",
            "discretization = linear",
            "lambda_q = 1.5",
            "omega_c = inf",
            "n_modes = 2\nn_modes = 3",
        ] {
            let res = parse_document(text).and_then(|d| Config::resolve(CommandKind::Bath, &d));
            assert!(res.is_err(), "accepted `{text}`");
        }
        let doc = parse_document("sample_count = 10").unwrap();
        assert!(Config::resolve(CommandKind::Sample, &doc).is_err());
        assert!(Config::resolve(CommandKind::Bath, &doc).is_ok());
    }

    #[test]
    fn echo_reparses_to_same_config() {
        let doc = parse_document(
            "omega0 = 1.3\nhbar = 0.07\nxi_rule = exact\nprobe_times = 0, 2.5\nseed = 7\n",
        )
        .unwrap();
        let c = Config::resolve(CommandKind::Simulate, &doc).unwrap();
        let again =
            Config::resolve(CommandKind::Simulate, &parse_document(&c.echo()).unwrap()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn command_specific_defaults() {
        assert_eq!(
            Config::defaults(CommandKind::Figure1).discretization,
            Discretization::PaperEq44
        );
        assert_eq!(
            Config::defaults(CommandKind::Simulate).discretization,
            Discretization::KernelMatched
        );
        assert_eq!(Config::defaults(CommandKind::Figure1).t_end, 10.0);
        assert_eq!(
            Config::defaults(CommandKind::Kernel).coupling_bound,
            CouplingBound::Unbounded
        );
    }
}
