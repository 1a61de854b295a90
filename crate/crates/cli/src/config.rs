//! Line-oriented key-value configuration with sections, strict schema, and
//! exhaustive diagnostics.
//!
//! Unknown sections or keys fail the run; validation collects every problem
//! it finds instead of stopping at the first. `units_mode = cyclic` converts
//! the frequency inputs (`omega0`, `delta`, `coupling_j`, `lambda`) from
//! cycles/s to rad/s before they reach the physics; the intrinsic
//! decoherence rate `gamma` is a time constant and is never converted.

use std::fmt;
use std::path::PathBuf;

use num_complex::Complex64;

use transistor_core::opensys::ExperimentKind;
use transistor_core::spinchain::ChainParams;

const TAU: f64 = std::f64::consts::TAU;

/// One problem found while parsing or validating a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigIssue {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    fn general(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitsMode {
    /// Frequencies are already angular (rad/s). Default.
    Angular,
    /// Frequencies are cyclic (Hz) and are multiplied by 2*pi on input.
    Cyclic,
}

impl UnitsMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "angular" => Some(Self::Angular),
            "cyclic" => Some(Self::Cyclic),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Angular => "angular",
            Self::Cyclic => "cyclic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Lindblad,
    Milburn,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Lindblad => "lindblad",
            Self::Milburn => "milburn",
        }
    }
}

/// Time-grid request; `t_end = None` means the scenario's natural horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub t_start: f64,
    pub t_end: Option<f64>,
    pub n_points: usize,
}

/// Scenario-specific payload of a validated configuration.
#[derive(Debug, Clone)]
pub enum ScenarioConfig {
    /// Closed gate: exact vs expanded survival against dimensionless
    /// detuning-time, one curve per coupling-to-detuning ratio.
    ClosedGate { ratios: Vec<f64>, grid: GridSpec },
    /// Open gate: resonant source/gate/drain populations.
    OpenGate { params: ChainParams, grid: GridSpec },
    /// Decoherence sweep (or a fully explicit custom run).
    Sweep {
        solver: SolverKind,
        kind: ExperimentKind,
        params: ChainParams,
        alpha: Complex64,
        beta: Complex64,
        rates: Vec<f64>,
        grid: GridSpec,
    },
}

/// A parsed, defaulted, and invariant-checked experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub scenario_name: String,
    pub units_mode: UnitsMode,
    pub allow_detuned: bool,
    pub output_dir: Option<PathBuf>,
    pub scenario: ScenarioConfig,
}

pub const SCENARIO_NAMES: [&str; 5] = [
    "closed-gate",
    "open-gate",
    "lindblad-sweep",
    "milburn-sweep",
    "custom",
];

/// One raw `key = value` entry with its provenance.
#[derive(Debug, Clone)]
struct RawEntry {
    section: String,
    key: String,
    value: String,
    line: Option<usize>,
}

/// Parse the line-oriented format into raw entries, reporting malformed
/// lines. `#` starts a comment anywhere on a line.
fn parse_raw(text: &str) -> (Vec<RawEntry>, Vec<ConfigIssue>) {
    let mut entries = Vec::new();
    let mut issues = Vec::new();
    let mut section = String::new();

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
        if let Some(name) = line.strip_prefix('[') {
            match name.strip_suffix(']') {
                Some(name) if !name.trim().is_empty() => {
                    section = name.trim().to_string();
                }
                _ => issues.push(ConfigIssue::at(
                    line_no,
                    format!("malformed section header `{line}`"),
                )),
            }
            continue;
        }
        match line.split_once('=') {
            Some((key, value)) => {
                let key = key.trim();
                if key.is_empty() {
                    issues.push(ConfigIssue::at(line_no, "missing key before `=`"));
                    continue;
                }
                entries.push(RawEntry {
                    section: section.clone(),
                    key: key.to_string(),
                    value: value.trim().to_string(),
                    line: Some(line_no),
                });
            }
            None => issues.push(ConfigIssue::at(
                line_no,
                format!("expected `key = value` or `[section]`, got `{line}`"),
            )),
        }
    }
    (entries, issues)
}

/// Apply `--override section.key=value` entries on top of the file.
fn apply_overrides(
    entries: &mut Vec<RawEntry>,
    overrides: &[String],
    issues: &mut Vec<ConfigIssue>,
) {
    for item in overrides {
        let Some((path, value)) = item.split_once('=') else {
            issues.push(ConfigIssue::general(format!(
                "override `{item}` is not of the form key=value"
            )));
            continue;
        };
        let path = path.trim();
        let (section, key) = match path.split_once('.') {
            Some((s, k)) => (s.trim().to_string(), k.trim().to_string()),
            None => (String::new(), path.to_string()),
        };
        if key.is_empty() {
            issues.push(ConfigIssue::general(format!(
                "override `{item}` has an empty key"
            )));
            continue;
        }
        let value = value.trim().to_string();
        if let Some(existing) = entries
            .iter_mut()
            .find(|e| e.section == section && e.key == key)
        {
            existing.value = value;
            existing.line = None;
        } else {
            entries.push(RawEntry {
                section,
                key,
                value,
                line: None,
            });
        }
    }
}

/// Typed access to the raw entries with duplicate detection.
struct Lookup {
    entries: Vec<RawEntry>,
}

impl Lookup {
    fn get(&self, section: &str, key: &str) -> Option<&RawEntry> {
        self.entries
            .iter()
            .find(|e| e.section == section && e.key == key)
    }

    fn check_duplicates(&self, issues: &mut Vec<ConfigIssue>) {
        for (i, e) in self.entries.iter().enumerate() {
            if self.entries[..i]
                .iter()
                .any(|p| p.section == e.section && p.key == e.key)
            {
                issues.push(ConfigIssue {
                    line: e.line,
                    message: format!("duplicate key `{}` in section `[{}]`", e.key, e.section),
                });
            }
        }
    }

    fn f64(&self, section: &str, key: &str, issues: &mut Vec<ConfigIssue>) -> Option<f64> {
        let e = self.get(section, key)?;
        match e.value.parse::<f64>() {
            Ok(v) if v.is_finite() => Some(v),
            _ => {
                issues.push(ConfigIssue {
                    line: e.line,
                    message: format!("`{}` must be a finite number, got `{}`", key, e.value),
                });
                None
            }
        }
    }

    fn usize(&self, section: &str, key: &str, issues: &mut Vec<ConfigIssue>) -> Option<usize> {
        let e = self.get(section, key)?;
        match e.value.parse::<usize>() {
            Ok(v) => Some(v),
            Err(_) => {
                issues.push(ConfigIssue {
                    line: e.line,
                    message: format!(
                        "`{}` must be a non-negative integer, got `{}`",
                        key, e.value
                    ),
                });
                None
            }
        }
    }

    fn bool(&self, section: &str, key: &str, issues: &mut Vec<ConfigIssue>) -> Option<bool> {
        let e = self.get(section, key)?;
        match e.value.as_str() {
            "true" => Some(true),
            "false" => Some(false),
            other => {
                issues.push(ConfigIssue {
                    line: e.line,
                    message: format!("`{}` must be `true` or `false`, got `{other}`", key),
                });
                None
            }
        }
    }

    fn f64_list(
        &self,
        section: &str,
        key: &str,
        issues: &mut Vec<ConfigIssue>,
    ) -> Option<Vec<f64>> {
        let e = self.get(section, key)?;
        let mut out = Vec::new();
        for piece in e.value.split(',') {
            let piece = piece.trim();
            match piece.parse::<f64>() {
                Ok(v) if v.is_finite() => out.push(v),
                _ => {
                    issues.push(ConfigIssue {
                        line: e.line,
                        message: format!("`{}` entry `{piece}` is not a finite number", key),
                    });
                    return None;
                }
            }
        }
        if out.is_empty() {
            issues.push(ConfigIssue {
                line: e.line,
                message: format!("`{}` must list at least one value", key),
            });
            return None;
        }
        Some(out)
    }
}

/// Keys accepted per section, per scenario.
fn allowed_keys(scenario: &str) -> Vec<(&'static str, &'static [&'static str])> {
    let top: &[&str] = &["scenario", "units_mode", "output_dir", "allow_detuned"];
    let chain: &[&str] = &["n_sites", "omega0", "delta", "coupling_j"];
    let input: &[&str] = &["alpha_re", "alpha_im", "beta_re", "beta_im"];
    let grid: &[&str] = &["t_start", "t_end", "n_points"];
    let rates: &[&str] = &["lambda", "gamma"];
    let sweep: &[&str] = &["kind"];
    let closed: &[&str] = &["ratios"];

    match scenario {
        "closed-gate" => vec![("", top), ("grid", grid), ("closed-gate", closed)],
        "open-gate" => vec![("", top), ("chain", chain), ("grid", grid)],
        _ => vec![
            ("", top),
            ("chain", chain),
            ("input", input),
            ("grid", grid),
            ("rates", rates),
            ("sweep", sweep),
        ],
    }
}

fn check_unknown_keys(lookup: &Lookup, scenario: &str, issues: &mut Vec<ConfigIssue>) {
    let allowed = allowed_keys(scenario);
    for e in &lookup.entries {
        let ok = allowed
            .iter()
            .any(|(section, keys)| *section == e.section && keys.contains(&e.key.as_str()));
        if !ok {
            let place = if e.section.is_empty() {
                "at top level".to_string()
            } else {
                format!("in section `[{}]`", e.section)
            };
            issues.push(ConfigIssue {
                line: e.line,
                message: format!("unknown key `{}` {place} for scenario `{scenario}`", e.key),
            });
        }
    }
}

fn grid_spec(lookup: &Lookup, issues: &mut Vec<ConfigIssue>) -> GridSpec {
    let t_start = lookup.f64("grid", "t_start", issues).unwrap_or(0.0);
    let t_end = lookup.f64("grid", "t_end", issues);
    let n_points = lookup.usize("grid", "n_points", issues).unwrap_or(2001);

    if n_points < 2 {
        issues.push(ConfigIssue::general(format!(
            "grid.n_points must be at least 2, got {n_points}"
        )));
    }
    if t_start < 0.0 {
        issues.push(ConfigIssue::general(format!(
            "grid.t_start must be non-negative, got {t_start}"
        )));
    }
    if let Some(end) = t_end {
        if end <= t_start {
            issues.push(ConfigIssue::general(format!(
                "grid.t_end ({end}) must exceed grid.t_start ({t_start})"
            )));
        }
    }
    GridSpec {
        t_start,
        t_end,
        n_points,
    }
}

fn frequency(
    lookup: &Lookup,
    key: &str,
    default: f64,
    units: UnitsMode,
    issues: &mut Vec<ConfigIssue>,
) -> f64 {
    let raw = lookup.f64("chain", key, issues).unwrap_or(default);
    match units {
        UnitsMode::Angular => raw,
        UnitsMode::Cyclic => raw * TAU,
    }
}

fn chain_params(
    lookup: &Lookup,
    default_delta: f64,
    units: UnitsMode,
    issues: &mut Vec<ConfigIssue>,
) -> Option<ChainParams> {
    if let Some(n) = lookup.usize("chain", "n_sites", issues) {
        if n != 3 {
            issues.push(ConfigIssue::general(format!(
                "chain.n_sites: only the three-site chain is supported here, got {n}"
            )));
            return None;
        }
    }
    let omega0 = frequency(lookup, "omega0", 0.0, units, issues);
    let delta = frequency(lookup, "delta", default_delta, units, issues);
    let coupling_j = frequency(lookup, "coupling_j", 1e3, units, issues);
    match ChainParams::three_site(omega0, delta, coupling_j) {
        Ok(p) => Some(p),
        Err(e) => {
            issues.push(ConfigIssue::general(format!("chain parameters: {e}")));
            None
        }
    }
}

fn input_amplitudes(lookup: &Lookup, issues: &mut Vec<ConfigIssue>) -> (Complex64, Complex64) {
    let alpha = Complex64::new(
        lookup.f64("input", "alpha_re", issues).unwrap_or(1.0),
        lookup.f64("input", "alpha_im", issues).unwrap_or(0.0),
    );
    let beta = Complex64::new(
        lookup.f64("input", "beta_re", issues).unwrap_or(0.0),
        lookup.f64("input", "beta_im", issues).unwrap_or(0.0),
    );
    let norm_err = (alpha.norm_sqr() + beta.norm_sqr() - 1.0).abs();
    if norm_err > 1e-10 {
        issues.push(ConfigIssue::general(format!(
            "input amplitudes must satisfy |alpha|^2 + |beta|^2 = 1 (off by {norm_err:.3e})"
        )));
    }
    (alpha, beta)
}

fn reject_duplicates(values: &[f64], what: &str, issues: &mut Vec<ConfigIssue>) {
    for (i, v) in values.iter().enumerate() {
        if values[..i].contains(v) {
            issues.push(ConfigIssue::general(format!(
                "{what} contains duplicate value {v} (output files would collide)"
            )));
        }
    }
}

/// Parse, apply overrides, default, convert units, and validate. Returns
/// either the resolved configuration or every issue found.
pub fn validate_config(
    text: &str,
    overrides: &[String],
    units_flag: Option<UnitsMode>,
) -> Result<ExperimentConfig, Vec<ConfigIssue>> {
    let (mut entries, mut issues) = parse_raw(text);
    apply_overrides(&mut entries, overrides, &mut issues);
    let lookup = Lookup { entries };
    lookup.check_duplicates(&mut issues);

    // Scenario drives the schema; without it nothing else can be checked.
    let scenario_name = match lookup.get("", "scenario") {
        None => {
            issues.push(ConfigIssue::general("missing required field `scenario`"));
            return Err(issues);
        }
        Some(e) if e.value.is_empty() => {
            issues.push(ConfigIssue {
                line: e.line,
                message: "field `scenario` is empty".into(),
            });
            return Err(issues);
        }
        Some(e) => {
            if !SCENARIO_NAMES.contains(&e.value.as_str()) {
                issues.push(ConfigIssue {
                    line: e.line,
                    message: format!(
                        "unknown scenario `{}`; expected one of {}",
                        e.value,
                        SCENARIO_NAMES.join(", ")
                    ),
                });
                return Err(issues);
            }
            e.value.clone()
        }
    };

    check_unknown_keys(&lookup, &scenario_name, &mut issues);

    let units_mode = match units_flag {
        Some(mode) => mode,
        None => match lookup.get("", "units_mode") {
            None => UnitsMode::Angular,
            Some(e) => UnitsMode::parse(&e.value).unwrap_or_else(|| {
                issues.push(ConfigIssue {
                    line: e.line,
                    message: format!(
                        "units_mode must be `angular` or `cyclic`, got `{}`",
                        e.value
                    ),
                });
                UnitsMode::Angular
            }),
        },
    };
    let allow_detuned = lookup
        .bool("", "allow_detuned", &mut issues)
        .unwrap_or(false);
    let output_dir = lookup
        .get("", "output_dir")
        .map(|e| PathBuf::from(&e.value));

    let scenario = match scenario_name.as_str() {
        "closed-gate" => {
            let ratios = lookup
                .f64_list("closed-gate", "ratios", &mut issues)
                .unwrap_or_else(|| vec![0.05, 0.1, 0.2]);
            if ratios.iter().any(|r| *r <= 0.0) {
                issues.push(ConfigIssue::general(
                    "closed-gate ratios must be positive coupling-to-detuning ratios",
                ));
            }
            reject_duplicates(&ratios, "closed-gate.ratios", &mut issues);
            let mut grid = grid_spec(&lookup, &mut issues);
            // Dimensionless detuning-time axis, default window [0, 20].
            if grid.t_end.is_none() {
                grid.t_end = Some(20.0);
            }
            ScenarioConfig::ClosedGate { ratios, grid }
        }
        "open-gate" => {
            let grid = grid_spec(&lookup, &mut issues);
            let params = chain_params(&lookup, 0.0, units_mode, &mut issues);
            if let Some(p) = &params {
                if p.delta() != 0.0 && !allow_detuned {
                    issues.push(ConfigIssue::general(
                        "open-gate forces delta = 0; set `allow_detuned = true` to override",
                    ));
                }
            }
            match params {
                Some(params) if issues.is_empty() => ScenarioConfig::OpenGate { params, grid },
                _ => return Err(issues),
            }
        }
        name => {
            // lindblad-sweep, milburn-sweep, custom
            let grid = grid_spec(&lookup, &mut issues);
            let (alpha, beta) = input_amplitudes(&lookup, &mut issues);

            let kind = match lookup.get("sweep", "kind") {
                Some(e) => match e.value.as_str() {
                    "transfer" => Some(ExperimentKind::Transfer),
                    "blockade" => Some(ExperimentKind::Blockade),
                    other => {
                        issues.push(ConfigIssue {
                            line: e.line,
                            message: format!(
                                "sweep.kind must be `transfer` or `blockade`, got `{other}`"
                            ),
                        });
                        None
                    }
                },
                None => {
                    issues.push(ConfigIssue::general(
                        "missing required field `sweep.kind` (transfer or blockade)",
                    ));
                    None
                }
            };

            let lambdas = lookup.f64_list("rates", "lambda", &mut issues);
            let gammas = lookup.f64_list("rates", "gamma", &mut issues);
            let (solver, rates) = match (name, &lambdas, &gammas) {
                (_, Some(_), Some(_)) => {
                    issues.push(ConfigIssue::general(
                        "exactly one rate family is allowed: give `rates.lambda` or `rates.gamma`, not both",
                    ));
                    (None, None)
                }
                ("lindblad-sweep", Some(l), None) => (Some(SolverKind::Lindblad), Some(l.clone())),
                ("lindblad-sweep", None, Some(_)) => {
                    issues.push(ConfigIssue::general(
                        "lindblad-sweep takes dephasing rates: use `rates.lambda`, not `rates.gamma`",
                    ));
                    (None, None)
                }
                ("milburn-sweep", None, Some(g)) => (Some(SolverKind::Milburn), Some(g.clone())),
                ("milburn-sweep", Some(_), None) => {
                    issues.push(ConfigIssue::general(
                        "milburn-sweep takes intrinsic rates: use `rates.gamma`, not `rates.lambda`",
                    ));
                    (None, None)
                }
                ("custom", Some(l), None) => (Some(SolverKind::Lindblad), Some(l.clone())),
                ("custom", None, Some(g)) => (Some(SolverKind::Milburn), Some(g.clone())),
                (_, None, None) => {
                    issues.push(ConfigIssue::general(
                        "missing rates: give `rates.lambda` (dephasing) or `rates.gamma` (intrinsic)",
                    ));
                    (None, None)
                }
                _ => unreachable!("scenario names are filtered above"),
            };
            if let Some(values) = &rates {
                if values.iter().any(|v| *v < 0.0) {
                    issues.push(ConfigIssue::general("rates must be non-negative"));
                }
                reject_duplicates(values, "rate list", &mut issues);
            }
            let rates = rates.map(|values| match (units_mode, solver) {
                // Dephasing rates are frequencies; intrinsic gamma is a time.
                (UnitsMode::Cyclic, Some(SolverKind::Lindblad)) => {
                    values.iter().map(|v| v * TAU).collect()
                }
                _ => values,
            });

            let default_delta = match kind {
                Some(ExperimentKind::Blockade) => 1e6,
                _ => 0.0,
            };
            let params = chain_params(&lookup, default_delta, units_mode, &mut issues);
            if let (Some(p), Some(k)) = (&params, kind) {
                if !allow_detuned {
                    match k {
                        ExperimentKind::Transfer if p.delta() != 0.0 => {
                            issues.push(ConfigIssue::general(
                                "transfer forces delta = 0; set `allow_detuned = true` to override",
                            ));
                        }
                        ExperimentKind::Blockade if p.delta() == 0.0 => {
                            issues.push(ConfigIssue::general(
                                "blockade requires a nonzero delta; set `allow_detuned = true` to override",
                            ));
                        }
                        _ => {}
                    }
                }
            }

            if name == "custom" {
                if lookup.get("chain", "delta").is_none() {
                    issues.push(ConfigIssue::general(
                        "custom scenario requires an explicit `chain.delta`",
                    ));
                }
                if grid.t_end.is_none() {
                    issues.push(ConfigIssue::general(
                        "custom scenario requires an explicit `grid.t_end`",
                    ));
                }
            }

            match (params, kind, solver, rates) {
                (Some(params), Some(kind), Some(solver), Some(rates)) if issues.is_empty() => {
                    ScenarioConfig::Sweep {
                        solver,
                        kind,
                        params,
                        alpha,
                        beta,
                        rates,
                        grid,
                    }
                }
                _ => return Err(issues),
            }
        }
    };

    if issues.is_empty() {
        Ok(ExperimentConfig {
            scenario_name,
            units_mode,
            allow_detuned,
            output_dir,
            scenario,
        })
    } else {
        Err(issues)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_scenario_names_the_field() {
        let err = validate_config("scenario =\n", &[], None).unwrap_err();
        assert!(
            err.iter().any(|i| i.message.contains("`scenario`")),
            "{err:?}"
        );
    }

    #[test]
    fn missing_scenario_is_reported() {
        let err = validate_config("", &[], None).unwrap_err();
        assert!(err[0].message.contains("scenario"));
    }

    #[test]
    fn unknown_keys_are_rejected_with_line_numbers() {
        let text = "scenario = open-gate\n[chain]\ncoupling_j = 1e3\nbogus = 1\n";
        let err = validate_config(text, &[], None).unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!(err[0].line, Some(4));
        assert!(err[0].message.contains("bogus"));
    }

    #[test]
    fn issues_are_collected_not_first_failure_only() {
        let text = "scenario = lindblad-sweep\n[chain]\ncoupling_j = -5\n[rates]\nlambda = 1,1\n[grid]\nn_points = 1\n";
        let err = validate_config(text, &[], None).unwrap_err();
        // Missing kind, bad coupling, duplicate rates, bad n_points.
        assert!(err.len() >= 4, "{err:?}");
    }

    #[test]
    fn cyclic_units_scale_frequencies_but_not_gamma() {
        let text = "scenario = milburn-sweep\nunits_mode = cyclic\n[chain]\ndelta = 1e6\ncoupling_j = 1e3\n[rates]\ngamma = 1e-6\n[sweep]\nkind = blockade\n";
        let cfg = validate_config(text, &[], None).unwrap();
        let ScenarioConfig::Sweep { params, rates, .. } = &cfg.scenario else {
            panic!("expected sweep");
        };
        assert!((params.delta() - TAU * 1e6).abs() < 1e-3);
        assert!((params.coupling_j() - TAU * 1e3).abs() < 1e-9);
        assert_eq!(rates, &vec![1e-6]); // gamma untouched
    }

    #[test]
    fn cyclic_units_scale_dephasing_rates() {
        let text = "scenario = lindblad-sweep\nunits_mode = cyclic\n[chain]\ncoupling_j = 1e3\n[rates]\nlambda = 1, 10\n[sweep]\nkind = transfer\n";
        let cfg = validate_config(text, &[], None).unwrap();
        let ScenarioConfig::Sweep { rates, .. } = &cfg.scenario else {
            panic!("expected sweep");
        };
        assert!((rates[0] - TAU).abs() < 1e-12);
        assert!((rates[1] - 10.0 * TAU).abs() < 1e-12);
    }

    #[test]
    fn transfer_with_detuning_requires_the_override_flag() {
        let text = "scenario = lindblad-sweep\n[chain]\ndelta = 5\ncoupling_j = 1e3\n[rates]\nlambda = 0\n[sweep]\nkind = transfer\n";
        let err = validate_config(text, &[], None).unwrap_err();
        assert!(err.iter().any(|i| i.message.contains("allow_detuned")));

        let text = format!("allow_detuned = true\n{text}");
        assert!(validate_config(&text, &[], None).is_ok());
    }

    #[test]
    fn blockade_defaults_to_the_reference_detuning() {
        let text = "scenario = lindblad-sweep\n[chain]\ncoupling_j = 1e3\n[rates]\nlambda = 0,1\n[sweep]\nkind = blockade\n";
        let cfg = validate_config(text, &[], None).unwrap();
        let ScenarioConfig::Sweep { params, .. } = &cfg.scenario else {
            panic!("expected sweep");
        };
        assert_eq!(params.delta(), 1e6);
        assert_eq!(params.coupling_j(), 1e3);
    }

    #[test]
    fn overrides_replace_file_values() {
        let text = "scenario = lindblad-sweep\n[chain]\ncoupling_j = 1e3\n[rates]\nlambda = 0\n[sweep]\nkind = blockade\n";
        let cfg = validate_config(
            text,
            &["chain.delta=2e6".into(), "grid.n_points=501".into()],
            None,
        )
        .unwrap();
        let ScenarioConfig::Sweep { params, grid, .. } = &cfg.scenario else {
            panic!("expected sweep");
        };
        assert_eq!(params.delta(), 2e6);
        assert_eq!(grid.n_points, 501);
    }

    #[test]
    fn closed_gate_defaults() {
        let cfg = validate_config("scenario = closed-gate\n", &[], None).unwrap();
        let ScenarioConfig::ClosedGate { ratios, grid } = &cfg.scenario else {
            panic!("expected closed gate");
        };
        assert_eq!(ratios, &vec![0.05, 0.1, 0.2]);
        assert_eq!(grid.t_end, Some(20.0));
        assert_eq!(grid.n_points, 2001);
    }

    #[test]
    fn closed_gate_rejects_chain_section() {
        let text = "scenario = closed-gate\n[chain]\ncoupling_j = 1e3\n";
        let err = validate_config(text, &[], None).unwrap_err();
        assert!(err[0].message.contains("unknown key"));
    }

    #[test]
    fn custom_requires_explicit_delta_and_horizon() {
        let text = "scenario = custom\n[chain]\ncoupling_j = 1e3\n[rates]\ngamma = 1e-6\n[sweep]\nkind = transfer\n";
        let err = validate_config(text, &[], None).unwrap_err();
        assert!(err.iter().any(|i| i.message.contains("chain.delta")));
        assert!(err.iter().any(|i| i.message.contains("grid.t_end")));
    }

    #[test]
    fn shipped_blockade_config_carries_the_reference_parameters() {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../configs/lindblad_blockade.cfg");
        let text = std::fs::read_to_string(path).unwrap();
        let cfg = validate_config(&text, &[], None).unwrap();
        let ScenarioConfig::Sweep { params, kind, .. } = &cfg.scenario else {
            panic!("expected sweep");
        };
        assert_eq!(params.coupling_j(), 1e3);
        assert_eq!(params.delta(), 1e6);
        assert_eq!(*kind, ExperimentKind::Blockade);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# header\nscenario = closed-gate  # trailing\n\n[grid]  \nn_points = 11\n";
        let cfg = validate_config(text, &[], None).unwrap();
        let ScenarioConfig::ClosedGate { grid, .. } = &cfg.scenario else {
            panic!()
        };
        assert_eq!(grid.n_points, 11);
    }
}
