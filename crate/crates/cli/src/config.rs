//! Experiment configuration: `key = value` lines grouped in `[section]`s.
//!
//! Keys before the first section apply to every command. A command reads
//! its own section (`[verify]`) or, for batch runs, every section named
//! `[verify.<name>]`; section keys override global ones.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use ini::Ini;

/// Invalid or incomplete configuration (exit status 2).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, Default)]
pub struct Config {
    global: BTreeMap<String, String>,
    sections: BTreeMap<String, BTreeMap<String, String>>,
    base_dir: Option<PathBuf>,
}

fn collect(props: &ini::Properties, where_: &str) -> anyhow::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (k, v) in props.iter() {
        if out.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(config_error(format!("duplicate key {k:?} in {where_}")));
        }
    }
    Ok(out)
}

impl Config {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| config_error(format!("config syntax: {e}")))?;
        let mut cfg = Config::default();
        for (name, props) in ini.iter() {
            match name {
                None => cfg.global.extend(collect(props, "global keys")?),
                Some(s) => {
                    let map = collect(props, &format!("[{s}]"))?;
                    if cfg.sections.insert(s.trim().to_string(), map).is_some() {
                        return Err(config_error(format!("duplicate section [{s}]")));
                    }
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// The experiments a command runs: `[cmd]` and every `[cmd.<name>]`,
    /// or only the global keys when neither exists.
    pub fn experiments(&self, command: &str) -> Vec<Section> {
        let prefix = format!("{command}.");
        let mut out: Vec<Section> = self
            .sections
            .iter()
            .filter(|(name, _)| name.as_str() == command || name.starts_with(&prefix))
            .map(|(name, keys)| {
                let label = name.strip_prefix(&prefix).map(str::to_string);
                let mut merged = self.global.clone();
                merged.extend(keys.clone());
                Section::new(label, merged, keys.keys().cloned().collect(), self.base_dir.clone())
            })
            .collect();
        if out.is_empty() {
            out.push(Section::new(None, self.global.clone(), BTreeSet::new(), self.base_dir.clone()));
        }
        out
    }

    pub fn global_keys(&self) -> impl Iterator<Item = &str> {
        self.global.keys().map(String::as_str)
    }

    pub fn section_names(&self) -> impl Iterator<Item = &str> {
        self.sections.keys().map(String::as_str)
    }

    /// Sets `key` globally and in every section, so it wins over the file.
    pub fn override_key(&mut self, key: &str, value: &str) {
        self.global.insert(key.to_string(), value.to_string());
        for keys in self.sections.values_mut() {
            if keys.contains_key(key) {
                keys.insert(key.to_string(), value.to_string());
            }
        }
    }
}

/// Merged keys of one experiment.
#[derive(Debug, Clone)]
pub struct Section {
    pub label: Option<String>,
    keys: BTreeMap<String, String>,
    own: BTreeSet<String>,
    base_dir: Option<PathBuf>,
}

impl Section {
    fn new(label: Option<String>, keys: BTreeMap<String, String>, own: BTreeSet<String>, base_dir: Option<PathBuf>) -> Self {
        Self { label, keys, own, base_dir }
    }

    /// Rejects keys of the command's own section that it does not know.
    pub fn check_known(&self, known: &[&str]) -> anyhow::Result<()> {
        for k in &self.own {
            if !known.contains(&k.as_str()) {
                return Err(config_error(format!("unknown key {k:?}")));
            }
        }
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.keys.get(key).map(String::as_str)
    }

    pub fn has(&self, key: &str) -> bool {
        self.keys.contains_key(key)
    }

    pub fn string(&self, key: &str) -> anyhow::Result<String> {
        self.raw(key).map(str::to_string).ok_or_else(|| config_error(format!("missing key {key:?}")))
    }

    pub fn f64(&self, key: &str) -> anyhow::Result<f64> {
        let v = self.string(key)?;
        let x: f64 = v.parse().map_err(|_| config_error(format!("key {key:?}: {v:?} is not a number")))?;
        if !x.is_finite() {
            return Err(config_error(format!("key {key:?} must be finite")));
        }
        Ok(x)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> anyhow::Result<f64> {
        if self.has(key) {
            self.f64(key)
        } else {
            Ok(default)
        }
    }

    pub fn opt_f64(&self, key: &str) -> anyhow::Result<Option<f64>> {
        if self.has(key) {
            self.f64(key).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> anyhow::Result<usize> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| config_error(format!("key {key:?}: {v:?} is not a non-negative integer"))),
        }
    }

    pub fn usize(&self, key: &str) -> anyhow::Result<usize> {
        let v = self.string(key)?;
        v.parse().map_err(|_| config_error(format!("key {key:?}: {v:?} is not a non-negative integer")))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> anyhow::Result<u64> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| config_error(format!("key {key:?}: {v:?} is not a u64"))),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> anyhow::Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(config_error(format!("key {key:?}: {v:?} is not a boolean"))),
        }
    }

    /// Comma-separated list of numbers (empty value gives an empty list).
    pub fn f64_list(&self, key: &str) -> anyhow::Result<Vec<f64>> {
        match self.raw(key) {
            None => Ok(Vec::new()),
            Some(v) if v.trim().is_empty() => Ok(Vec::new()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| config_error(format!("key {key:?}: {s:?} is not a number")))
                })
                .collect(),
        }
    }

    /// A path, resolved against the config file's directory when relative.
    pub fn path(&self, key: &str) -> anyhow::Result<PathBuf> {
        let p = PathBuf::from(self.string(key)?);
        Ok(match (&self.base_dir, p.is_relative()) {
            (Some(base), true) => base.join(p),
            _ => p,
        })
    }

    pub fn file_stem(&self, command: &str) -> String {
        match &self.label {
            Some(l) => format!("{command}_{l}"),
            None => command.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_override_globals() {
        let cfg = Config::parse("p = 0.8\nalpha = 0.4\n[verify]\np = 0.7\n").unwrap();
        let ex = cfg.experiments("verify");
        assert_eq!(ex.len(), 1);
        assert_eq!(ex[0].f64("p").unwrap(), 0.7);
        assert_eq!(ex[0].f64("alpha").unwrap(), 0.4);
        assert_eq!(cfg.experiments("means")[0].f64("p").unwrap(), 0.8);
    }

    #[test]
    fn named_experiments() {
        let cfg = Config::parse("[verify.a]\np = 1\n[verify.b]\np = 2\n[means]\np = 3\n").unwrap();
        let ex = cfg.experiments("verify");
        assert_eq!(ex.len(), 2);
        assert_eq!(ex[0].file_stem("verify"), "verify_a");
        assert_eq!(ex[1].f64("p").unwrap(), 2.0);
    }

    #[test]
    fn bad_values_are_config_errors() {
        let cfg = Config::parse("p = abc\nn = -1\nlist = 1, x\n").unwrap();
        let s = &cfg.experiments("x")[0];
        for e in [s.f64("p").unwrap_err(), s.usize("n").unwrap_err(), s.f64_list("list").unwrap_err()] {
            assert!(e.downcast_ref::<ConfigError>().is_some());
        }
        assert!(s.f64("missing").is_err());
        assert!(Config::parse("a = 1\na = 2\n").is_err());
    }

    #[test]
    fn unknown_keys_in_own_section() {
        let cfg = Config::parse("[fit]\nwindow_fraction = 1\ntypo = 3\n").unwrap();
        assert!(cfg.experiments("fit")[0].check_known(&["window_fraction"]).is_err());
    }
}
