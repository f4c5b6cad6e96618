//! The `name:key=value,key=value` grammar shared by test functions and regularizers.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A parsed `name:key=value,...` string.
pub(crate) struct Params<'a> {
    pub name: &'a str,
    values: BTreeMap<&'a str, f64>,
    source: &'a str,
}

impl<'a> Params<'a> {
    pub fn parse(s: &'a str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut values = BTreeMap::new();
        for item in rest.split(',').filter(|t| !t.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value in `{s}`, got `{item}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("`{v}` is not a number in `{s}`")))?;
            if values.insert(k.trim(), v).is_some() {
                return Err(Error::Config(format!("`{k}` given twice in `{s}`")));
            }
        }
        Ok(Self { name: name.trim(), values, source: s })
    }

    pub fn get(&mut self, key: &str) -> Option<f64> {
        self.values.remove(key)
    }

    pub fn require(&mut self, key: &str) -> Result<f64> {
        self.get(key).ok_or_else(|| Error::Config(format!("`{}` needs `{key}=`", self.source)))
    }

    /// Fails if any key was not consumed.
    pub fn finish(self) -> Result<()> {
        match self.values.keys().next() {
            Some(k) => Err(Error::Config(format!("unknown key `{k}` in `{}`", self.source))),
            None => Ok(()),
        }
    }
}
