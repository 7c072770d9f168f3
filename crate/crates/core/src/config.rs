//! Line-oriented run configuration.
//!
//! ```text
//! # comment
//! seed = 7
//! [exp1]
//! d_list = 1,3
//! ```
//!
//! Keys before the first header belong to the global section. Every key is
//! checked against a fixed schema; unknown keys are errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::DEFAULT_SEED;

/// Accepted keys per section; `""` is the global section.
pub const SCHEMA: &[(&str, &[&str])] = &[
    ("", &["seed", "profile"]),
    ("generate", &["family", "strength", "d", "n", "burn_in", "embed"]),
    ("radii", &["input", "family", "strength", "d", "n", "burn_in", "query", "k_list", "metric"]),
    (
        "exp1",
        &[
            "d_list", "p_over_d", "m_list", "beta_grid", "eval_points", "kn_cap", "families", "strengths",
            "mc_reps",
        ],
    ),
    ("exp2", &["s_list", "rho_list", "n_grid", "reps", "k_min", "k_exponent", "burn_in", "pca_q"]),
    (
        "tailcheck",
        &[
            "family", "strength", "d", "burn_in", "x", "n", "k", "j_max", "reps", "s", "c_minus", "c_plus", "r0",
            "diameter", "c0", "big_c", "gamma", "k0", "kappa_cap",
        ],
    ),
    (
        "momentcheck",
        &[
            "family", "strength", "d", "burn_in", "x", "n_list", "k_list", "p", "reps", "s", "c_minus", "c_plus",
            "r0", "diameter", "k0", "kappa_cap",
        ],
    ),
    (
        "lowerbound",
        &[
            "family", "strength", "d", "burn_in", "x", "n", "k", "p", "reps", "s", "c_minus", "c_plus", "r0",
            "diameter",
        ],
    ),
    ("bernstein", &["sequence", "n", "m", "eps_list", "reps"]),
    ("asconv", &["family", "strength", "d", "burn_in", "x", "schedule", "n_grid"]),
    (
        "forecast",
        &[
            "input", "lookback", "horizon", "train_frac", "val_frac", "k_grid", "weightings", "metrics",
            "pca_dims", "folds", "min_cv_windows", "synthetic_rho", "synthetic_len",
        ],
    ),
    (
        "classify",
        &[
            "input", "test_input", "test_frac", "k_grid", "weightings", "metrics", "pca_dims", "folds",
            "synthetic_per_class", "synthetic_len",
        ],
    ),
];

/// Scale profile for default grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Profile {
    #[default]
    Desk,
    Full,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Desk => "desk",
            Profile::Full => "full",
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "desk" => Ok(Profile::Desk),
            "full" => Ok(Profile::Full),
            other => Err(Error::config("profile", format!("expected desk or full, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

/// A parsed, schema-checked configuration document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigDoc {
    entries: BTreeMap<(String, String), Entry>,
}

fn section_keys(section: &str) -> Option<&'static [&'static str]> {
    SCHEMA.iter().find(|(s, _)| *s == section).map(|(_, k)| *k)
}

fn suggest<'a>(word: &str, candidates: impl IntoIterator<Item = &'a str>) -> String {
    candidates
        .into_iter()
        .map(|c| (strsim::jaro_winkler(word, c), c))
        .filter(|(score, _)| *score > 0.7)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, c)| format!("; did you mean `{c}`?"))
        .unwrap_or_default()
}

fn qualified(section: &str, key: &str) -> String {
    if section.is_empty() {
        key.to_string()
    } else {
        format!("{section}.{key}")
    }
}

fn check_key(section: &str, key: &str, line: usize) -> Result<()> {
    let keys = section_keys(section).ok_or_else(|| {
        Error::config(
            section,
            format!(
                "unknown section [{section}] at line {line}{}",
                suggest(section, SCHEMA.iter().map(|(s, _)| *s))
            ),
        )
    })?;
    if !keys.contains(&key) {
        return Err(Error::config(
            qualified(section, key),
            format!("unknown key at line {line}{}", suggest(key, keys.iter().copied())),
        ));
    }
    Ok(())
}

impl ConfigDoc {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = ConfigDoc::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| Error::Parse {
                    line,
                    message: format!("unterminated section header {content:?}"),
                })?;
                let name = name.trim();
                if name.is_empty() {
                    return Err(Error::Parse {
                        line,
                        message: "empty section name".into(),
                    });
                }
                section = name.to_string();
                if section_keys(&section).is_none() {
                    check_key(&section, "", line)?;
                }
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected `key = value`, got {content:?}"),
            })?;
            let key = key.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(Error::Parse {
                    line,
                    message: format!("invalid key {key:?}"),
                });
            }
            check_key(&section, key, line)?;
            let slot = (section.clone(), key.to_string());
            if let Some(prev) = doc.entries.get(&slot) {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "duplicate key `{}` (first set at line {})",
                        qualified(&section, key),
                        prev.line
                    ),
                });
            }
            doc.entries.insert(
                slot,
                Entry {
                    value: value.trim().to_string(),
                    line,
                },
            );
        }
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Overrides (or adds) a value, e.g. from a command-line flag.
    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) -> Result<()> {
        check_key(section, key, 0)?;
        self.entries.insert(
            (section.to_string(), key.to_string()),
            Entry {
                value: value.into(),
                line: 0,
            },
        );
        Ok(())
    }

    pub fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.entries
            .get(&(section.to_string(), key.to_string()))
            .map(|e| e.value.as_str())
    }

    fn err(&self, section: &str, key: &str, message: String) -> Error {
        let at = self
            .entries
            .get(&(section.to_string(), key.to_string()))
            .filter(|e| e.line > 0)
            .map(|e| format!(" (line {})", e.line))
            .unwrap_or_default();
        Error::config(qualified(section, key), format!("{message}{at}"))
    }

    /// Typed value, if present.
    pub fn get<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| self.err(section, key, format!("cannot parse {v:?}: {e}"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, section: &str, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(section, key)?.unwrap_or(default))
    }

    /// Comma-separated list, if present.
    pub fn get_list<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        let Some(v) = self.raw(section, key) else {
            return Ok(None);
        };
        let items: Vec<&str> = v.split(',').map(str::trim).collect();
        if items.iter().any(|s| s.is_empty()) {
            return Err(self.err(section, key, format!("empty item in list {v:?}")));
        }
        items
            .into_iter()
            .map(|s| {
                s.parse()
                    .map_err(|e| self.err(section, key, format!("cannot parse item {s:?}: {e}")))
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    pub fn list_or<T: FromStr>(&self, section: &str, key: &str, default: Vec<T>) -> Result<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get_list(section, key)?.unwrap_or(default))
    }

    pub fn seed(&self) -> Result<u64> {
        self.get_or("", "seed", DEFAULT_SEED)
    }

    pub fn profile(&self) -> Result<Profile> {
        self.get_or("", "profile", Profile::Desk)
    }
}

/// Builder for a resolved section, rendered back in config syntax.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Resolved {
    pub section: String,
    pub pairs: Vec<(String, String)>,
}

impl Resolved {
    pub fn new(section: &str) -> Self {
        Self {
            section: section.to_string(),
            pairs: Vec::new(),
        }
    }

    pub fn put(&mut self, key: &str, value: impl ToString) -> &mut Self {
        debug_assert!(section_keys(&self.section).is_some_and(|k| k.contains(&key)), "{key}");
        self.pairs.push((key.to_string(), value.to_string()));
        self
    }

    pub fn put_list<T: ToString>(&mut self, key: &str, values: &[T]) -> &mut Self {
        let joined: Vec<String> = values.iter().map(ToString::to_string).collect();
        self.put(key, joined.join(","))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        if !self.section.is_empty() {
            let _ = writeln!(out, "[{}]", self.section);
        }
        for (k, v) in &self.pairs {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}
