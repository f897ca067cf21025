use std::path::Path;

use anyhow::{bail, Context, Result};
use qwm_qaoa::fixtures::{fixture, fixtures};
use qwm_qaoa::portfolio::{encode_to_knapsack, expected_returns, load_prices};
use qwm_qaoa::KnapsackInstance;

use crate::SourceArgs;

/// A named instance; the name labels sweep rows.
pub struct Named {
    pub name: String,
    pub instance: KnapsackInstance,
}

impl SourceArgs {
    pub fn is_empty(&self) -> bool {
        self.fixture.is_none() && self.prices.is_none() && self.instance.is_none()
    }

    pub fn load(&self) -> Result<Named> {
        if let Some(name) = &self.fixture {
            let f = fixture(name)?;
            return Ok(Named {
                name: f.name.clone(),
                instance: f.instance(),
            });
        }
        if let Some(path) = &self.prices {
            let series = load_prices(path, &self.tickers)?.between(self.start, self.end);
            let er = expected_returns(&series)?;
            return Ok(Named {
                name: self.tickers.join("+"),
                instance: encode_to_knapsack(&er)?,
            });
        }
        if let Some(path) = &self.instance {
            return Ok(Named {
                name: stem(path),
                instance: read_instance(path)?,
            });
        }
        bail!("no instance source: pass --fixture, --prices with --tickers, or --instance")
    }

    /// The selected instance, or every fixture when none is selected.
    pub fn load_many(&self) -> Result<Vec<Named>> {
        if self.is_empty() {
            return Ok(fixtures()
                .into_iter()
                .map(|f| Named {
                    instance: f.instance(),
                    name: f.name,
                })
                .collect());
        }
        Ok(vec![self.load()?])
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into())
}

fn read_instance(path: &Path) -> Result<KnapsackInstance> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let inst: KnapsackInstance =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    inst.validate()?;
    Ok(inst)
}
