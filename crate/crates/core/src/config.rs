//! Scenario files: flat `section.key = value` lines with `#` comments.
//!
//! ```text
//! potential.family = gaussian
//! initial.shape = eigen_perturbation
//! initial.epsilon = 0.2
//! envelopes = poincare_l2, logsob
//! envelope.truncation_poincare.phi = power:1.5
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::envelopes::Phi;
use crate::error::{Error, Result};
use crate::inequalities::{drift_tail_beta, BetaFunction};
use crate::measure::{PotentialFamily, PotentialSpec};
use crate::psi::{build_psi_from_eta, EtaProfile, PsiProfile};
use crate::sim::{Scheme, SimConfig};

/// Every envelope name accepted in `envelopes = ...`, with its parameter keys.
pub const ENVELOPES: &[(&str, &[&str])] = &[
    ("poincare_l2", &[]),
    ("truncation_poincare", &["phi"]),
    ("truncation_poincare_closed", &["q"]),
    ("truncation_poincare_kopt", &["phi"]),
    ("weak_poincare", &["phi", "beta"]),
    ("orlicz", &["phi", "beta", "c"]),
    ("logsob", &[]),
    ("truncation_logsob", &["phi"]),
    ("truncation_logsob_kopt", &["phi"]),
    ("weak_logsob", &["phi", "beta", "eps"]),
    ("restricted_logsob", &["phi", "beta", "c"]),
    ("ipsi", &["c_eta", "m"]),
    ("ipsi_tv", &["c_psi", "m"]),
    ("hellinger", &["phi", "beta"]),
    ("curvature", &["beta", "rho"]),
    ("curvature_sp", &["beta", "rho"]),
    ("curvature_closed", &["beta", "rho", "c"]),
];

const KNOWN_KEYS: &[&str] = &[
    "potential.family",
    "potential.variance",
    "potential.alpha",
    "potential.scale",
    "potential.x",
    "potential.v",
    "potential.convention",
    "potential.w_osc",
    "grid.n_points",
    "grid.tail_tol",
    "initial.shape",
    "initial.epsilon",
    "initial.shift",
    "initial.p",
    "initial.cap",
    "initial.values",
    "sim.dt",
    "sim.t_end",
    "sim.scheme",
    "sim.save_every",
    "sim.positivity_floor",
    "psi.kind",
    "psi.a",
    "envelopes",
    "constants.c_p",
    "constants.c_ls",
    "constants.c_p_scale",
    "capacity.eta",
    "capacity.f",
    "capacity.rho",
    "capacity.a",
    "bounds.t_min",
    "bounds.t_max",
    "bounds.n",
];

/// Growth profile selection, the serialisable counterpart of [`Phi`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiSpec {
    Power { q: f64 },
    Log { beta: f64 },
    LogLog,
}

impl PhiSpec {
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let (head, args) = split_spec(s);
        match (head, args.as_slice()) {
            ("power", [q]) => Ok(PhiSpec::Power { q: *q }),
            ("log", [b]) => Ok(PhiSpec::Log { beta: *b }),
            ("loglog", []) => Ok(PhiSpec::LogLog),
            _ => Err(format!("expected power:q | log:beta | loglog, got '{s}'")),
        }
    }

    pub fn to_phi(self) -> Phi {
        match self {
            PhiSpec::Power { q } => Phi::power(q),
            PhiSpec::Log { beta } => Phi::log_plus(beta),
            PhiSpec::LogLog => Phi::LogLog,
        }
    }
}

/// β-function selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BetaSpec {
    Constant { c: f64 },
    Power { c: f64, q: f64 },
    LogPower { d: f64, r: f64, s0: f64 },
    Drift { p: f64, d: f64 },
    /// constant `4B` of the measure `(1 + h₀)/2·μ`, applied to the lifted density
    LiftedPoincare,
}

impl BetaSpec {
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let (head, args) = split_spec(s);
        match (head, args.as_slice()) {
            ("constant", [c]) => Ok(BetaSpec::Constant { c: *c }),
            ("power", [c, q]) => Ok(BetaSpec::Power { c: *c, q: *q }),
            ("logpower", [d, r, s0]) => Ok(BetaSpec::LogPower { d: *d, r: *r, s0: *s0 }),
            ("drift", [p, d]) => Ok(BetaSpec::Drift { p: *p, d: *d }),
            ("lifted_poincare", []) => Ok(BetaSpec::LiftedPoincare),
            _ => Err(format!(
                "expected constant:c | power:c,q | logpower:d,r,s0 | drift:p,d | lifted_poincare, got '{s}'"
            )),
        }
    }

    /// `None` for [`BetaSpec::LiftedPoincare`], which depends on the run.
    pub fn to_beta(self) -> Result<Option<BetaFunction>> {
        Ok(match self {
            BetaSpec::Constant { c } => Some(BetaFunction::constant(c)),
            BetaSpec::Power { c, q } => Some(BetaFunction::power(c, q)),
            BetaSpec::LogPower { d, r, s0 } => Some(BetaFunction::LogPower { d, r, s0 }),
            BetaSpec::Drift { p, d } => Some(drift_tail_beta(p, d)?),
            BetaSpec::LiftedPoincare => None,
        })
    }
}

/// η / ψ selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EtaSpec {
    Power { p: f64 },
    Entropy,
    LogPower { beta: f64 },
    SquareOverLog,
}

impl EtaSpec {
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let (head, args) = split_spec(s);
        match (head, args.as_slice()) {
            ("power", [p]) => Ok(EtaSpec::Power { p: *p }),
            ("entropy", []) => Ok(EtaSpec::Entropy),
            ("log_power", [b]) => Ok(EtaSpec::LogPower { beta: *b }),
            ("square_over_log", []) => Ok(EtaSpec::SquareOverLog),
            _ => Err(format!(
                "expected power:p | entropy | log_power:beta | square_over_log, got '{s}'"
            )),
        }
    }

    pub fn to_eta(self) -> EtaProfile {
        match self {
            EtaSpec::Power { p } => EtaProfile::power(p),
            EtaSpec::Entropy => EtaProfile::entropy(),
            EtaSpec::LogPower { beta } => EtaProfile::log_power(beta),
            EtaSpec::SquareOverLog => EtaProfile::square_over_log(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PsiSpec {
    Quadratic,
    Entropy,
    RemarkLinear,
    Eta { eta: EtaSpec, a: Option<f64> },
}

impl PsiSpec {
    pub fn build(self) -> Result<PsiProfile> {
        match self {
            PsiSpec::Quadratic => Ok(PsiProfile::quadratic()),
            PsiSpec::Entropy => Ok(PsiProfile::entropy()),
            PsiSpec::RemarkLinear => Ok(PsiProfile::remark_linear()),
            PsiSpec::Eta { eta, a } => build_psi_from_eta(&eta.to_eta(), a),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum InitialShape {
    Constant,
    EigenPerturbation { epsilon: f64 },
    Step,
    ShiftedGaussian { shift: f64 },
    TailRatio { p: f64, cap: f64 },
    Tabulated { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeRequest {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

impl EnvelopeRequest {
    pub fn phi(&self) -> Option<PhiSpec> {
        self.params.get("phi").map(|s| PhiSpec::parse(s).expect("validated"))
    }

    pub fn beta(&self) -> Option<BetaSpec> {
        self.params.get("beta").map(|s| BetaSpec::parse(s).expect("validated"))
    }

    pub fn num(&self, key: &str) -> Option<f64> {
        self.params.get(key).map(|s| s.parse().expect("validated"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantOverrides {
    pub c_p: Option<f64>,
    pub c_ls: Option<f64>,
    /// multiplies whichever `C_P` is used; values below 1 are a negative control
    pub c_p_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityRequest {
    pub eta: EtaSpec,
    /// `F ≡ c` or `F = log`
    pub f: FSpec,
    pub rho: f64,
    pub a: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FSpec {
    Constant { c: f64 },
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
}

/// A parsed scenario together with its canonical key/value echo.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub potential: PotentialSpec,
    pub w_osc: f64,
    pub n_points: usize,
    pub tail_tol: f64,
    pub initial: InitialShape,
    pub sim: SimConfig,
    pub psi: PsiSpec,
    pub envelopes: Vec<EnvelopeRequest>,
    pub constants: ConstantOverrides,
    pub capacity: Option<CapacityRequest>,
    pub bounds: BoundsGrid,
    #[serde(skip)]
    pub entries: BTreeMap<String, String>,
}

fn split_spec(s: &str) -> (&str, Vec<f64>) {
    let s = s.trim();
    match s.split_once(':') {
        None => (s, Vec::new()),
        Some((h, rest)) => {
            let args: Option<Vec<f64>> = rest.split(',').map(|a| a.trim().parse().ok()).collect();
            match args {
                Some(a) => (h.trim(), a),
                None => ("", Vec::new()),
            }
        }
    }
}

struct Entries {
    map: BTreeMap<String, String>,
    lines: BTreeMap<String, usize>,
}

impl Entries {
    fn err(&self, key: &str, message: impl Into<String>) -> Error {
        Error::Config {
            line: self.lines.get(key).copied().unwrap_or(0),
            key: key.to_string(),
            message: message.into(),
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| self.err(key, "missing required key"))
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => self.parse_f64(key, v),
        }
    }

    fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| self.parse_f64(key, v)).transpose()
    }

    fn f64_req(&self, key: &str) -> Result<f64> {
        let v = self.require(key)?;
        self.parse_f64(key, v)
    }

    fn parse_f64(&self, key: &str, v: &str) -> Result<f64> {
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| self.err(key, format!("expected a finite number, got '{v}'")))
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| self.err(key, format!("expected a non-negative integer, got '{v}'"))),
        }
    }

    fn list(&self, key: &str) -> Result<Vec<f64>> {
        let v = self.require(key)?;
        v.split(',')
            .map(|x| self.parse_f64(key, x.trim()))
            .collect()
    }
}

impl Scenario {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            line: 0,
            key: String::new(),
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut lines = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Config {
                    line: i + 1,
                    key: line.to_string(),
                    message: "expected 'key = value'".into(),
                });
            };
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if map.contains_key(&k) {
                return Err(Error::Config {
                    line: i + 1,
                    key: k,
                    message: "duplicate key".into(),
                });
            }
            lines.insert(k.clone(), i + 1);
            map.insert(k, v);
        }
        let e = Entries { map, lines };
        for k in e.map.keys() {
            if k.starts_with("envelope.") {
                continue;
            }
            if !KNOWN_KEYS.contains(&k.as_str()) {
                return Err(e.err(k, "unknown key"));
            }
        }

        let potential = parse_potential(&e)?;
        let w_osc = e.f64_or("potential.w_osc", 0.0)?;
        let n_points = e.usize_or("grid.n_points", 2001)?;
        let tail_tol = e.f64_or("grid.tail_tol", 1e-16)?;
        let initial = parse_initial(&e)?;
        let scheme = match e.get("sim.scheme").unwrap_or("implicit_euler") {
            "implicit_euler" => Scheme::ImplicitEuler,
            "crank_nicolson" => Scheme::CrankNicolson,
            other => return Err(e.err("sim.scheme", format!("unknown scheme '{other}'"))),
        };
        let sim = SimConfig {
            dt: e.f64_or("sim.dt", 1e-3)?,
            t_end: e.f64_or("sim.t_end", 5.0)?,
            scheme,
            save_every: e.usize_or("sim.save_every", 10)?,
            positivity_floor: e.f64_or("sim.positivity_floor", 0.0)?,
        };
        sim.validate().map_err(|err| e.err("sim", err.to_string()))?;
        let psi = match e.get("psi.kind").unwrap_or("entropy") {
            "quadratic" => PsiSpec::Quadratic,
            "entropy" => PsiSpec::Entropy,
            "remark_linear" => PsiSpec::RemarkLinear,
            other => {
                let eta = EtaSpec::parse(other).map_err(|m| e.err("psi.kind", m))?;
                PsiSpec::Eta {
                    eta,
                    a: e.f64_opt("psi.a")?,
                }
            }
        };
        let envelopes = parse_envelopes(&e)?;
        let constants = ConstantOverrides {
            c_p: e.f64_opt("constants.c_p")?,
            c_ls: e.f64_opt("constants.c_ls")?,
            c_p_scale: e.f64_or("constants.c_p_scale", 1.0)?,
        };
        let capacity = match e.get("capacity.eta") {
            None => None,
            Some(s) => Some(CapacityRequest {
                eta: EtaSpec::parse(s).map_err(|m| e.err("capacity.eta", m))?,
                f: match e.get("capacity.f").unwrap_or("log") {
                    "log" => FSpec::Log,
                    other => match split_spec(other) {
                        ("constant", a) if a.len() == 1 => FSpec::Constant { c: a[0] },
                        _ => {
                            return Err(e.err("capacity.f", format!("expected log | constant:c, got '{other}'")))
                        }
                    },
                },
                rho: e.f64_or("capacity.rho", 2.0)?,
                a: e.f64_opt("capacity.a")?,
            }),
        };
        let bounds = BoundsGrid {
            t_min: e.f64_or("bounds.t_min", 0.01)?,
            t_max: e.f64_or("bounds.t_max", sim.t_end)?,
            n: e.usize_or("bounds.n", 200)?,
        };
        if !(bounds.t_min > 0.0 && bounds.t_max > bounds.t_min) {
            return Err(e.err("bounds.t_min", "need 0 < t_min < t_max"));
        }
        Ok(Scenario {
            potential,
            w_osc,
            n_points,
            tail_tol,
            initial,
            sim,
            psi,
            envelopes,
            constants,
            capacity,
            bounds,
            entries: e.map,
        })
    }

    /// Canonical text form; parsing it yields an equal scenario.
    pub fn to_config_text(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

fn parse_potential(e: &Entries) -> Result<PotentialSpec> {
    let family = match e.require("potential.family")? {
        "gaussian" => PotentialFamily::Gaussian {
            variance: e.f64_or("potential.variance", 0.5)?,
        },
        "power" => PotentialFamily::Power {
            alpha: e.f64_req("potential.alpha")?,
            scale: e.f64_or("potential.scale", 1.0)?,
        },
        "perturbed_power" => PotentialFamily::PowerPlusLogPerturbation {
            alpha: e.f64_req("potential.alpha")?,
        },
        "tabulated" => PotentialFamily::CustomTabulated {
            x: e.list("potential.x")?,
            v: e.list("potential.v")?,
        },
        other => return Err(e.err("potential.family", format!("unknown family '{other}'"))),
    };
    let spec = match e.get("potential.convention").unwrap_or("canonical") {
        "canonical" => PotentialSpec::new(family),
        "unit" => PotentialSpec::from_unit_convention(family),
        other => return Err(e.err("potential.convention", format!("expected canonical | unit, got '{other}'"))),
    };
    spec.validate()
        .map_err(|err| e.err("potential.family", err.to_string()))?;
    Ok(spec)
}

fn parse_initial(e: &Entries) -> Result<InitialShape> {
    Ok(match e.get("initial.shape").unwrap_or("constant") {
        "constant" => InitialShape::Constant,
        "eigen_perturbation" => InitialShape::EigenPerturbation {
            epsilon: e.f64_or("initial.epsilon", 0.2)?,
        },
        "step" => InitialShape::Step,
        "shifted_gaussian" => InitialShape::ShiftedGaussian {
            shift: e.f64_or("initial.shift", 0.5)?,
        },
        "tail_ratio" => InitialShape::TailRatio {
            p: e.f64_req("initial.p")?,
            cap: e.f64_or("initial.cap", 50.0)?,
        },
        "tabulated" => InitialShape::Tabulated {
            values: e.list("initial.values")?,
        },
        other => return Err(e.err("initial.shape", format!("unknown shape '{other}'"))),
    })
}

fn parse_envelopes(e: &Entries) -> Result<Vec<EnvelopeRequest>> {
    let names: Vec<String> = match e.get("envelopes") {
        None => Vec::new(),
        Some(s) => s
            .split(',')
            .map(|x| x.trim().to_string())
            .filter(|x| !x.is_empty())
            .collect(),
    };
    let mut out = Vec::new();
    for name in &names {
        let Some((_, keys)) = ENVELOPES.iter().find(|(n, _)| n == name) else {
            return Err(e.err("envelopes", format!("unknown envelope '{name}'")));
        };
        let mut params = BTreeMap::new();
        for k in keys.iter() {
            let full = format!("envelope.{name}.{k}");
            if let Some(v) = e.get(&full) {
                let check = match *k {
                    "phi" => PhiSpec::parse(v).map(|_| ()),
                    "beta" => BetaSpec::parse(v).map(|_| ()),
                    _ => v
                        .parse::<f64>()
                        .map(|_| ())
                        .map_err(|_| format!("expected a number, got '{v}'")),
                };
                check.map_err(|m| e.err(&full, m))?;
                params.insert(k.to_string(), v.to_string());
            }
        }
        out.push(EnvelopeRequest {
            name: name.clone(),
            params,
        });
    }
    for k in e.map.keys().filter(|k| k.starts_with("envelope.")) {
        let mut parts = k.splitn(3, '.');
        let (_, env, param) = (parts.next(), parts.next().unwrap_or(""), parts.next().unwrap_or(""));
        let known = ENVELOPES
            .iter()
            .any(|(n, keys)| *n == env && keys.contains(&param));
        if !known {
            return Err(e.err(k, "unknown envelope parameter"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_family_names_key() {
        match Scenario::parse("grid.n_points = 401\n") {
            Err(Error::Config { key, .. }) => assert_eq!(key, "potential.family"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip() {
        let text = "potential.family = gaussian\nenvelopes = poincare_l2, truncation_poincare\n\
                    envelope.truncation_poincare.phi = power:1.5\ninitial.shape = step # comment\n";
        let s = Scenario::parse(text).unwrap();
        let again = Scenario::parse(&s.to_config_text()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn bad_value_reports_line() {
        match Scenario::parse("potential.family = gaussian\nsim.dt = fast\n") {
            Err(Error::Config { line, key, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(key, "sim.dt");
            }
            other => panic!("{other:?}"),
        }
    }
}
