//! Run configuration: one JSON document, rationals as `"p/q"` strings.

use std::fmt;
use std::path::PathBuf;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use weylwalk_core::cartan::CartanDatum;
use weylwalk_core::crystal::{ModuleSpec, Summand};
use weylwalk_core::rational::{parse_q, q_from_json, Q};
use weylwalk_core::{PiecewisePath, RootSystem, TauPoint, Weight};

use crate::error::CliError;

/// A rational that travels through JSON as `"p/q"`; bare integers are
/// accepted on input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rational(pub Q);

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        q_from_json(&v).map(Rational).map_err(D::Error::custom)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummandConfig {
    /// Highest weight in fundamental-weight coordinates.
    pub kappa: Vec<i64>,
    #[serde(default = "one")]
    pub multiplicity: u64,
    /// Highest path as `[[t, [x1, ..]], ..]`; the straight line when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Value>,
}

fn one() -> u64 {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// A type label such as `"C2"` or an explicit Cartan matrix.
    pub cartan: Value,
    pub max_rank: usize,
    pub module: Vec<SummandConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<Vec<Rational>>,
    /// `D`-th roots of tau, `D = det A`; needed for fractional exponents.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_roots: Option<Vec<Rational>>,
    /// Starting point of walks and of the ratio test.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<i64>>,
    /// Explicit weights for the psi table; all dominant weights up to
    /// `max_level` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mus: Option<Vec<Vec<i64>>>,
    pub max_level: i64,
    pub ell: usize,
    pub horizons: Vec<usize>,
    pub ells: Vec<usize>,
    pub samples: u64,
    pub seed: u64,
    pub sigmas: f64,
    pub budget: usize,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cartan: Value::String("C2".into()),
            max_rank: 8,
            module: vec![SummandConfig {
                kappa: vec![1, 0],
                multiplicity: 1,
                path: None,
            }],
            tau: Some(vec![Rational(Q::new(1.into(), 2.into())); 2]),
            tau_roots: None,
            mu: None,
            mus: None,
            max_level: 4,
            ell: 3,
            horizons: vec![6],
            ells: (6..=14).collect(),
            samples: 100_000,
            seed: 1,
            sigmas: 4.0,
            budget: 2_000_000,
            out_dir: PathBuf::from("weylwalk-out"),
            formats: vec![Format::Json, Format::Csv, Format::Dot],
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let bad = |e: serde_json::Error| CliError::Config(format!("config: {e}"));
        let raw: Value = serde_json::from_str(text).map_err(bad)?;
        let roots_only = raw.get("tau_roots").is_some() && raw.get("tau").is_none();
        let mut c: RunConfig = serde_json::from_value(raw).map_err(bad)?;
        if roots_only {
            c.tau = None;
        }
        Ok(c)
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// Parses and cross-checks every field; nothing runs before this.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        fn ctx(what: &str) -> impl Fn(weylwalk_core::Error) -> CliError + '_ {
            move |e| CliError::Config(format!("{what}: {e}"))
        }
        let datum = match &self.cartan {
            Value::String(s) => CartanDatum::from_label_with_limit(s, self.max_rank),
            v => CartanDatum::from_json_value(v).and_then(|d| {
                if d.rank() > self.max_rank {
                    Err(weylwalk_core::Error::RankLimit {
                        rank: d.rank(),
                        limit: self.max_rank,
                    })
                } else {
                    Ok(d)
                }
            }),
        }
        .map_err(ctx("cartan"))?;
        let rank = datum.rank();
        let det = datum.det();
        let weight = |what: &str, v: &[i64]| -> Result<Weight, CliError> {
            if v.len() != rank {
                return Err(CliError::Config(format!(
                    "{what}: expected {rank} coordinates, got {}",
                    v.len()
                )));
            }
            Ok(Weight(v.to_vec()))
        };

        let mut summands = Vec::with_capacity(self.module.len());
        for (k, s) in self.module.iter().enumerate() {
            let kappa = weight(&format!("module[{k}].kappa"), &s.kappa)?;
            if !kappa.is_dominant() {
                return Err(CliError::Config(format!("module[{k}].kappa {kappa} is not dominant")));
            }
            let path = match &s.path {
                None => None,
                Some(v) => Some(PiecewisePath::from_json_value(v).map_err(ctx(&format!("module[{k}].path")))?),
            };
            summands.push(Summand {
                kappa,
                multiplicity: s.multiplicity,
                path,
            });
        }
        let spec = ModuleSpec { summands };
        spec.validate().map_err(ctx("module"))?;

        let tau = match (&self.tau, &self.tau_roots) {
            (None, None) => None,
            (values, roots) => {
                let roots: Option<Vec<Q>> = roots.as_ref().map(|r| r.iter().map(|x| x.0.clone()).collect());
                let point = match (values, roots) {
                    (None, Some(r)) => TauPoint::from_roots(r, det),
                    (Some(v), r) => {
                        let v: Vec<Q> = v.iter().map(|x| x.0.clone()).collect();
                        let r = r.map_or_else(|| vec![None; v.len()], |r| r.into_iter().map(Some).collect());
                        TauPoint::with_roots(v, r, det)
                    }
                    (None, None) => unreachable!(),
                }
                .map_err(ctx("tau"))?;
                if point.rank() != rank {
                    return Err(CliError::Config(format!(
                        "tau: expected {rank} coordinates, got {}",
                        point.rank()
                    )));
                }
                Some(point)
            }
        };

        let mu = match &self.mu {
            None => Weight::zero(rank),
            Some(v) => weight("mu", v)?,
        };
        let mus = match &self.mus {
            None => None,
            Some(list) => Some(
                list.iter()
                    .enumerate()
                    .map(|(k, v)| weight(&format!("mus[{k}]"), v))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        if self.sigmas.is_nan() || self.sigmas <= 0.0 {
            return Err(CliError::Config("sigmas must be positive".into()));
        }
        let sys = RootSystem::new(datum).with_budgets(
            weylwalk_core::cartan::DEFAULT_WEYL_BUDGET,
            self.budget,
        );
        Ok(Resolved {
            sys,
            spec,
            tau,
            mu,
            mus,
        })
    }

    /// The resolved config as written to the manifest.
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

/// Validated, typed view of a [`RunConfig`].
pub struct Resolved {
    pub sys: RootSystem,
    pub spec: ModuleSpec,
    pub tau: Option<TauPoint>,
    pub mu: Weight,
    pub mus: Option<Vec<Weight>>,
}

impl Resolved {
    /// The tau point, required to lie in the open unit cube.
    pub fn tau_in_domain(&self) -> Result<&TauPoint, CliError> {
        let t = self
            .tau
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs tau".into()))?;
        t.check_domain().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(t)
    }
}

/// Parses `"1/2,1/3"`.
pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>, CliError> {
    s.split(',')
        .map(|x| parse_q(x.trim()).map(Rational))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(format!("{s:?}: {e}")))
}

/// Parses `"1,0"`; an empty string is the empty list.
pub fn parse_int_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, CliError> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|x| x.trim().parse::<T>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("{s:?} is not a comma-separated integer list")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let r = RunConfig::default().resolve().unwrap();
        assert_eq!(r.sys.rank(), 2);
        assert!(r.tau_in_domain().is_ok());
        assert_eq!(r.mu, Weight(vec![0, 0]));
    }

    #[test]
    fn rationals_round_trip() {
        let c: RunConfig = RunConfig::from_json(r#"{"tau": ["1/2", 1], "seed": 9}"#).unwrap();
        assert_eq!(c.tau.as_ref().unwrap()[1], Rational(Q::from_integer(1.into())));
        let v = c.to_value();
        assert_eq!(v["tau"], serde_json::json!(["1/2", "1"]));
        let back: RunConfig = serde_json::from_value(v).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn bad_fields_are_config_errors() {
        assert!(matches!(RunConfig::from_json(r#"{"nope": 1}"#), Err(CliError::Config(_))));
        let mut c = RunConfig::default();
        c.module[0].kappa = vec![1, 0, 0];
        assert!(matches!(c.resolve(), Err(CliError::Config(_))));
        c.module[0].kappa = vec![-1, 1];
        assert!(matches!(c.resolve(), Err(CliError::Config(_))));
    }

    #[test]
    fn tau_outside_domain_resolves_but_is_rejected_on_use() {
        let c = RunConfig {
            tau: Some(parse_rational_list("3/2,1/2").unwrap()),
            ..RunConfig::default()
        };
        let r = c.resolve().unwrap();
        assert!(matches!(r.tau_in_domain(), Err(CliError::Config(_))));
    }

    #[test]
    fn roots_alone_define_tau() {
        let c = RunConfig {
            tau: None,
            tau_roots: Some(parse_rational_list("2/3,1/2").unwrap()),
            ..RunConfig::default()
        };
        let r = c.resolve().unwrap();
        let t = r.tau.unwrap();
        assert_eq!(t.values()[0], Q::new(4.into(), 9.into()));
    }

    #[test]
    fn roots_in_a_file_replace_the_default_tau() {
        let c = RunConfig::from_json(r#"{"tau_roots": ["2/3", "1/2"]}"#).unwrap();
        assert!(c.tau.is_none());
        assert!(c.resolve().unwrap().tau.is_some());
    }

    #[test]
    fn list_parsing() {
        assert_eq!(parse_int_list::<i64>("1, -2").unwrap(), vec![1, -2]);
        assert!(parse_int_list::<i64>("").unwrap().is_empty());
        assert!(parse_int_list::<usize>("x").is_err());
    }
}
