use std::path::Path;

use anyhow::{bail, Context, Result};
use qlax_core::exactfield::GaussianRational;
use qlax_core::PainleveConfig;
use serde::Deserialize;

/// Parameter file. `a2` and `f2` are always derived; projective mode gives
/// `p` instead of `q` and `a1`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub a0: String,
    pub a1: Option<String>,
    pub lambda: String,
    pub q: Option<String>,
    pub f0: String,
    pub f1: String,
    pub p: Option<String>,
}

fn lit(name: &str, s: &str) -> Result<GaussianRational> {
    s.parse().with_context(|| format!("parameter `{name}`"))
}

impl ParamsFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn config(&self) -> Result<PainleveConfig<GaussianRational>> {
        let a0 = lit("a0", &self.a0)?;
        let lambda = lit("lambda", &self.lambda)?;
        let f0 = lit("f0", &self.f0)?;
        let f1 = lit("f1", &self.f1)?;
        let c = match &self.p {
            Some(p) => {
                let p = lit("p", p)?;
                let c = PainleveConfig::projective(f0, f1, a0, p, lambda)?;
                if let Some(q) = &self.q {
                    if lit("q", q)? != c.q {
                        bail!("`q` must equal p² in projective mode");
                    }
                }
                if let Some(a1) = &self.a1 {
                    if lit("a1", a1)? != c.a1 {
                        bail!("`a1` must equal p/a0 in projective mode");
                    }
                }
                c
            }
            None => {
                let (Some(a1), Some(q)) = (&self.a1, &self.q) else {
                    bail!("`a1` and `q` are required unless `p` is given");
                };
                PainleveConfig::new(f0, f1, a0, lit("a1", a1)?, lambda, lit("q", q)?)?
            }
        };
        for (name, v) in [("a0", &c.a0), ("a1", &c.a1), ("lambda", &c.lambda), ("q", &c.q)] {
            if v.is_zero() {
                bail!("parameter `{name}` must be nonzero");
            }
        }
        Ok(c)
    }
}
