//! Study tables in CSV or JSON form.
//!
//! CSV header: `test,sided,stat,nu,k,m,n,n1,n2,rho,design`, with empty cells
//! for absent fields. A `.json` file holds an array of objects with the same
//! field names. Rows carrying `rho` are sample correlations and are turned
//! into Fisher z statistics on ingestion.

use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use bffkit::effect_map::fisher_z_sided;
use bffkit::{DesignKind, Sidedness, Study, Study64, StudySet64, TestStatistic64};

use crate::error::{unwrap_context, CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyRecord {
    #[serde(default)]
    pub test: Option<String>,
    #[serde(default)]
    pub sided: Option<String>,
    #[serde(default)]
    pub stat: Option<f64>,
    #[serde(default)]
    pub nu: Option<f64>,
    #[serde(default)]
    pub k: Option<f64>,
    #[serde(default)]
    pub m: Option<f64>,
    #[serde(default)]
    pub n: Option<u64>,
    #[serde(default)]
    pub n1: Option<u64>,
    #[serde(default)]
    pub n2: Option<u64>,
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub design: Option<String>,
}

fn non_empty(s: &Option<String>) -> Option<&str> {
    s.as_deref().map(str::trim).filter(|s| !s.is_empty())
}

impl StudyRecord {
    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let fields: [(&'static str, bool); 11] = [
            ("test", non_empty(&self.test).is_some()),
            ("sided", non_empty(&self.sided).is_some()),
            ("stat", self.stat.is_some()),
            ("nu", self.nu.is_some()),
            ("k", self.k.is_some()),
            ("m", self.m.is_some()),
            ("n", self.n.is_some()),
            ("n1", self.n1.is_some()),
            ("n2", self.n2.is_some()),
            ("rho", self.rho.is_some()),
            ("design", non_empty(&self.design).is_some()),
        ];
        for (name, set) in fields {
            if set {
                out.push(name);
            }
        }
        out
    }

    /// Rejects fields outside `allowed`.
    fn only(&self, allowed: &[&str]) -> std::result::Result<(), String> {
        match self.present().into_iter().find(|f| !allowed.contains(f)) {
            Some(f) => Err(format!("field '{f}' does not apply to this kind of row")),
            None => Ok(()),
        }
    }

    fn sidedness(&self, default: Option<Sidedness>) -> std::result::Result<Sidedness, String> {
        match non_empty(&self.sided) {
            Some("one") => Ok(Sidedness::OneSided),
            Some("two") => Ok(Sidedness::TwoSided),
            Some(other) => Err(format!("sided must be 'one' or 'two', got '{other}'")),
            None => default.ok_or_else(|| "missing field 'sided'".to_string()),
        }
    }

    fn require<T: Copy>(v: Option<T>, name: &str) -> std::result::Result<T, String> {
        v.ok_or_else(|| format!("missing field '{name}'"))
    }

    fn sample_size(&self) -> std::result::Result<u64, String> {
        Self::require(self.n, "n")
    }

    /// Converts the row into a study, validating the field combination.
    pub fn to_study(&self) -> std::result::Result<Study64, String> {
        let design_name = non_empty(&self.design);
        if let Some(rho) = self.rho {
            if self.stat.is_some() {
                return Err("'stat' and 'rho' are mutually exclusive".into());
            }
            if let Some(t) = non_empty(&self.test) {
                if t != "z" {
                    return Err(format!("correlation rows use test 'z', got '{t}'"));
                }
            }
            if let Some(d) = design_name {
                if d != "correlation_z" {
                    return Err(format!("correlation rows use design 'correlation_z', got '{d}'"));
                }
            }
            self.only(&["test", "sided", "n", "rho", "design"])?;
            let n = self.sample_size()?;
            let sided = self.sidedness(Some(Sidedness::TwoSided))?;
            let stat = fisher_z_sided(rho, n, sided).map_err(|e| e.to_string())?;
            return Ok(Study {
                stat,
                design: DesignKind::CorrelationZ { n },
            });
        }
        let test = non_empty(&self.test).ok_or("missing field 'test'")?;
        let value = Self::require(self.stat, "stat")?;
        let design = match (test, design_name) {
            ("z", None | Some("one_sample_z")) => {
                self.only(&["test", "sided", "stat", "n", "design"])?;
                DesignKind::OneSampleZ { n: self.sample_size()? }
            }
            ("z", Some("correlation_z")) => {
                self.only(&["test", "sided", "stat", "n", "design"])?;
                DesignKind::CorrelationZ { n: self.sample_size()? }
            }
            ("z", Some("two_sample_z")) => {
                self.only(&["test", "sided", "stat", "n1", "n2", "design"])?;
                DesignKind::TwoSampleZ {
                    n1: Self::require(self.n1, "n1")?,
                    n2: Self::require(self.n2, "n2")?,
                }
            }
            ("t", None | Some("one_sample_t")) => {
                self.only(&["test", "sided", "stat", "nu", "n", "design"])?;
                let nu = Self::require(self.nu, "nu")?;
                let n = match self.n {
                    Some(n) => n,
                    None if nu >= 1.0 && nu.fract() == 0.0 => nu as u64 + 1,
                    None => return Err("missing field 'n' (nu is not an integer)".into()),
                };
                DesignKind::OneSampleT { n }
            }
            ("t", Some("two_sample_t")) => {
                self.only(&["test", "sided", "stat", "nu", "n1", "n2", "design"])?;
                DesignKind::TwoSampleT {
                    n1: Self::require(self.n1, "n1")?,
                    n2: Self::require(self.n2, "n2")?,
                }
            }
            ("chisq", None | Some("likelihood_ratio_chisq")) => {
                self.only(&["test", "stat", "k", "n", "design"])?;
                DesignKind::LikelihoodRatioChiSq { n: self.sample_size()? }
            }
            ("chisq", Some("multinomial_chisq")) => {
                self.only(&["test", "stat", "k", "n", "design"])?;
                DesignKind::MultinomialChiSq { n: self.sample_size()? }
            }
            ("f", None | Some("linear_model_f")) => {
                self.only(&["test", "stat", "k", "m", "n", "design"])?;
                DesignKind::LinearModelF { n: self.sample_size()? }
            }
            ("z" | "t" | "chisq" | "f", Some(d)) => {
                return Err(format!("design '{d}' does not accept a {test} statistic"))
            }
            (other, _) => return Err(format!("unknown test '{other}'")),
        };
        design.validate().map_err(|e| e.to_string())?;
        let n_eff = design.n_eff::<f64>();
        let stat = match test {
            "z" => TestStatistic64::z(value, self.sidedness(None)?, n_eff),
            "t" => TestStatistic64::t(value, Self::require(self.nu, "nu")?, self.sidedness(None)?, n_eff),
            "chisq" => TestStatistic64::chisq(value, Self::require(self.k, "k")?, n_eff),
            _ => TestStatistic64::f(
                value,
                Self::require(self.k, "k")?,
                Self::require(self.m, "m")?,
                n_eff,
            ),
        }
        .map_err(|e| e.to_string())?;
        Ok(Study { stat, design })
    }
}

fn read_records(path: &Path) -> Result<Vec<StudyRecord>> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        let file = File::open(path).map_err(io)?;
        return serde_json::from_reader(file).map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            row: 0,
            detail: e.to_string(),
        });
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(File::open(path).map_err(io)?);
    reader
        .deserialize()
        .enumerate()
        .map(|(i, rec)| {
            rec.map_err(|e| CliError::Parse {
                path: path.to_path_buf(),
                row: i + 1,
                detail: e.to_string(),
            })
        })
        .collect()
}

/// Reads a study table; errors carry the 1-based data row.
pub fn load_studies(path: &Path) -> Result<StudySet64> {
    let records = read_records(path)?;
    if records.is_empty() {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            row: 0,
            detail: "no study rows".into(),
        });
    }
    let studies = records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.to_study().map_err(|detail| CliError::Parse {
                path: path.to_path_buf(),
                row: i + 1,
                detail,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    StudySet64::new(label, studies).map_err(|e| match unwrap_context(e) {
        (Some(i), _, inner) => CliError::Parse {
            path: path.to_path_buf(),
            row: i + 1,
            detail: inner.to_string(),
        },
        (None, _, inner) => CliError::from(inner),
    })
}
