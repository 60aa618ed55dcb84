//! JSON configuration specs for fields and representations, and a build
//! context that resolves them (with optional on-disk caching of eigenvalue
//! tables).

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::fields::CyclicExtension;
use crate::reps::{ramanujan_tau_table, AutomorphicRepQ, CuspFormTable, ExplicitTable};

/// `{"conductor": 5, "order": 2}`; conductor 1 (with order 1) denotes Q.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub conductor: u64,
    pub order: u64,
}

impl FieldSpec {
    pub fn rationals() -> Self {
        Self {
            conductor: 1,
            order: 1,
        }
    }

    pub fn build(&self) -> Result<CyclicExtension> {
        if self.conductor == 1 {
            if self.order != 1 {
                return Err(Error::Parse(format!(
                    "conductor 1 requires order 1, got {}",
                    self.order
                )));
            }
            return Ok(CyclicExtension::rationals());
        }
        CyclicExtension::new(DirichletCharacter::of_order(self.conductor, self.order)?)
    }
}

fn default_power() -> i64 {
    1
}

/// Twisting character: `power` applies to the canonical character of the
/// given `order` (or to the dual-group generator when `order` is omitted).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistSpec {
    pub conductor: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u64>,
    #[serde(default = "default_power")]
    pub power: i64,
}

impl TwistSpec {
    pub fn build(&self) -> Result<DirichletCharacter> {
        if self.conductor == 1 {
            return Ok(DirichletCharacter::trivial());
        }
        let base = match self.order {
            Some(order) => DirichletCharacter::of_order(self.conductor, order)?,
            None => DirichletCharacter::dual_generator(self.conductor)?,
        };
        Ok(base.pow(self.power))
    }
}

/// Representation spec, tagged by kind:
///
/// - `{"kind":"character","conductor":5,"order":2}`
/// - `{"kind":"cuspform","weight":12,"limit":100000}`
/// - `{"kind":"explicit","rank":2,"csv":"params.csv"}`
///
/// all optionally with `"twist": {...}` and `"tau": <real shift>`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum RepSpec {
    Character {
        conductor: u64,
        #[serde(default = "default_order")]
        order: u64,
        #[serde(default = "default_power")]
        power: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        twist: Option<TwistSpec>,
        #[serde(default)]
        tau: f64,
    },
    CuspForm {
        weight: u32,
        limit: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        twist: Option<TwistSpec>,
        #[serde(default)]
        tau: f64,
    },
    Explicit {
        rank: usize,
        csv: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        twist: Option<TwistSpec>,
        #[serde(default)]
        tau: f64,
    },
}

fn default_order() -> u64 {
    1
}

/// A pair of representations with their fields (absent field means Q).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    #[serde(rename = "repA")]
    pub rep_a: RepSpec,
    #[serde(rename = "repB")]
    pub rep_b: RepSpec,
    #[serde(rename = "fieldE", default, skip_serializing_if = "Option::is_none")]
    pub field_e: Option<FieldSpec>,
    #[serde(rename = "fieldF", default, skip_serializing_if = "Option::is_none")]
    pub field_f: Option<FieldSpec>,
}

/// A single representation with its field, for factorization and convergence
/// diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub rep: RepSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
}

/// Resolves specs into objects. Eigenvalue tables are cached in memory and,
/// when a cache directory is set, on disk as `tau_<limit>.csv`.
pub struct BuildContext {
    base_dir: PathBuf,
    cache_dir: Option<PathBuf>,
    tau_tables: HashMap<u64, Arc<CuspFormTable>>,
}

impl BuildContext {
    pub fn new(base_dir: impl Into<PathBuf>) -> Self {
        Self {
            base_dir: base_dir.into(),
            cache_dir: None,
            tau_tables: HashMap::new(),
        }
    }

    pub fn with_cache_dir(mut self, dir: Option<PathBuf>) -> Self {
        self.cache_dir = dir;
        self
    }

    pub fn field(&self, spec: Option<&FieldSpec>) -> Result<CyclicExtension> {
        match spec {
            Some(s) => s.build(),
            None => Ok(CyclicExtension::rationals()),
        }
    }

    pub fn rep(&mut self, spec: &RepSpec) -> Result<AutomorphicRepQ> {
        let (base, twist, tau) = match spec {
            RepSpec::Character {
                conductor,
                order,
                power,
                twist,
                tau,
            } => {
                let chi = if *conductor == 1 {
                    DirichletCharacter::trivial()
                } else {
                    DirichletCharacter::of_order(*conductor, *order)?.pow(*power)
                };
                (AutomorphicRepQ::character_rep(chi), twist, tau)
            }
            RepSpec::CuspForm {
                weight,
                limit,
                twist,
                tau,
            } => {
                if *weight != 12 {
                    return Err(Error::Domain(format!(
                        "only the weight-12 discriminant form is shipped, got weight {weight}"
                    )));
                }
                let table = self.tau_table(*limit)?;
                (AutomorphicRepQ::cusp_form_rep(table), twist, tau)
            }
            RepSpec::Explicit {
                rank,
                csv,
                twist,
                tau,
            } => {
                let path = self.base_dir.join(csv);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
                let table = ExplicitTable::from_csv(*rank, &text)?;
                (AutomorphicRepQ::explicit_rep(Arc::new(table)), twist, tau)
            }
        };
        match twist {
            Some(t) => base.twist(&t.build()?, *tau),
            None => base.twist(&DirichletCharacter::trivial(), *tau),
        }
    }

    /// Ramanujan tau eigenvalue table, from memory, disk cache, or a fresh
    /// series expansion (in that order).
    pub fn tau_table(&mut self, limit: u64) -> Result<Arc<CuspFormTable>> {
        if let Some(t) = self.tau_tables.get(&limit) {
            return Ok(Arc::clone(t));
        }
        let cache_path = self
            .cache_dir
            .as_ref()
            .map(|d| d.join(format!("tau_{limit}.csv")));
        if let Some(path) = &cache_path {
            if let Ok(text) = std::fs::read_to_string(path) {
                let table = parse_tau_cache(limit, &text)?;
                let arc = Arc::new(table);
                self.tau_tables.insert(limit, Arc::clone(&arc));
                return Ok(arc);
            }
        }
        let table = ramanujan_tau_table(limit)?;
        if let Some(path) = &cache_path {
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, render_tau_cache(&table))?;
        }
        let arc = Arc::new(table);
        self.tau_tables.insert(limit, Arc::clone(&arc));
        Ok(arc)
    }
}

fn render_tau_cache(table: &CuspFormTable) -> String {
    let mut primes: Vec<u64> = table.primes().collect();
    primes.sort_unstable();
    let mut out = String::from("p,tau\n");
    for p in primes {
        out.push_str(&format!("{p},{}\n", table.eigenvalue(p).unwrap()));
    }
    out
}

fn parse_tau_cache(limit: u64, text: &str) -> Result<CuspFormTable> {
    let mut eigenvalues = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 || line.trim().is_empty() {
            continue;
        }
        let (p, a) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("tau cache line {}: no comma", lineno + 1)))?;
        let p: u64 = p
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("tau cache line {}: {e}", lineno + 1)))?;
        let a: i128 = a
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("tau cache line {}: {e}", lineno + 1)))?;
        eigenvalues.insert(p, a);
    }
    Ok(CuspFormTable::new(12, limit, eigenvalues))
}

/// Parse a JSON spec file into any deserializable spec type.
pub fn load_spec<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}
