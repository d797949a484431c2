//! Run configuration: a JSON file, overridden by command-line flags, resolved
//! into validated core types.

use std::path::Path;

use greenbound_core::bounds::{eta_preset, validate, ArithmeticMode, GroupContext, ParamSet};
use greenbound_core::constants::{COUNT_GRID, COUNT_U};
use greenbound_core::cusps::CuspCase;
use greenbound_core::geom::Rectangle;
use greenbound_core::optimize::{Objective, SearchConfig};
use greenbound_core::transforms::TrapezoidParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub preset: Option<String>,
    pub vol: Option<f64>,
    pub eta: Option<f64>,
    pub eta_preset: Option<String>,
    pub contains_minus_one: Option<bool>,
    pub min_c: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    pub delta: Option<f64>,
    pub alpha_plus: Option<f64>,
    pub beta_plus: Option<f64>,
    pub sigma_plus: Option<f64>,
    pub alpha_minus: Option<f64>,
    pub beta_minus: Option<f64>,
    pub sigma_minus: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CuspSpec {
    pub eps: Option<f64>,
    pub eps_prime: Option<f64>,
    pub case: Option<CuspCase>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    pub objective: Option<Objective>,
    pub max_iters: Option<usize>,
    pub step_shrink: Option<f64>,
}

/// Everything a run can be configured with. Every field is optional; missing
/// values fall back to the modular group computation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub group: GroupSpec,
    #[serde(default)]
    pub params: ParamSpec,
    pub region: Option<RegionSpec>,
    #[serde(rename = "U")]
    pub u: Option<f64>,
    pub grid: Option<(usize, usize)>,
    pub n_bar: Option<f64>,
    pub mode: Option<ArithmeticMode>,
    pub cusp: Option<CuspSpec>,
    pub search: Option<SearchSpec>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn group(&self) -> Result<GroupContext, CliError> {
        let g = &self.group;
        let base = match g.preset.as_deref() {
            None | Some("sl2z") => GroupContext::sl2z(),
            Some(other) => return Err(CliError::Config(format!("group.preset: unknown preset {other:?}, expected sl2z"))),
        };
        let eta = match (&g.eta_preset, g.eta) {
            (Some(_), Some(_)) => return Err(CliError::Config("group: give eta or eta_preset, not both".into())),
            (Some(name), None) => eta_preset(name)
                .ok_or_else(|| CliError::Config(format!("group.eta_preset: unknown preset {name:?}, expected selberg-3-16 or kim-sarnak")))?,
            (None, Some(v)) => v,
            (None, None) => base.eta,
        };
        GroupContext::new(
            g.vol.unwrap_or(base.vol),
            eta,
            g.contains_minus_one.unwrap_or(base.contains_minus_one),
            g.min_c.unwrap_or(base.min_c),
        )
        .map_err(|e| CliError::Config(format!("group: {e}")))
    }

    pub fn params(&self) -> Result<ParamSet, CliError> {
        let r = ParamSet::reference();
        let t = r.trapezoid;
        let p = &self.params;
        let trapezoid = TrapezoidParams::new(
            p.delta.unwrap_or(t.delta()),
            p.alpha_plus.unwrap_or(t.alpha_plus()),
            p.beta_plus.unwrap_or(t.beta_plus()),
            p.alpha_minus.unwrap_or(t.alpha_minus()),
            p.beta_minus.unwrap_or(t.beta_minus()),
        )
        .map_err(|e| CliError::Config(format!("params: {e}")))?;
        let params = ParamSet {
            trapezoid,
            sigma_plus: p.sigma_plus.unwrap_or(r.sigma_plus),
            sigma_minus: p.sigma_minus.unwrap_or(r.sigma_minus),
        };
        validate(&params, &self.group()?).map_err(|e| CliError::Config(format!("params: {e}")))
    }

    pub fn region(&self) -> Result<Rectangle, CliError> {
        match self.region {
            None => Ok(Rectangle::y0()),
            Some(r) => {
                if !(r.y_min > 0.0) {
                    return Err(CliError::Config(format!("region.y_min: must be positive, got {}", r.y_min)));
                }
                Rectangle::new(r.x_min, r.x_max, r.y_min, r.y_max).map_err(|e| CliError::Config(format!("region: {e}")))
            }
        }
    }

    pub fn u(&self) -> Result<f64, CliError> {
        let u = self.u.unwrap_or(COUNT_U);
        if !(u >= 1.0 && u.is_finite()) {
            return Err(CliError::Config(format!("U: need U ≥ 1, got {u}")));
        }
        Ok(u)
    }

    pub fn grid(&self) -> Result<(usize, usize), CliError> {
        let g = self.grid.unwrap_or(COUNT_GRID);
        if g.0 == 0 || g.1 == 0 {
            return Err(CliError::Config(format!("grid: both sizes must be positive, got {}x{}", g.0, g.1)));
        }
        Ok(g)
    }

    pub fn n_bar(&self) -> Result<f64, CliError> {
        let n = self.n_bar.unwrap_or(greenbound_core::constants::REFERENCE_N_BOUND);
        if !(n >= 2.0 && n.is_finite()) {
            return Err(CliError::Config(format!("n_bar: need N̄ ≥ 2, got {n}")));
        }
        Ok(n)
    }

    pub fn mode(&self) -> ArithmeticMode {
        self.mode.unwrap_or_default()
    }

    pub fn search(&self) -> Result<SearchConfig, CliError> {
        let s = self.search.clone().unwrap_or_default();
        let mut cfg = SearchConfig::new(self.params()?);
        if let Some(o) = s.objective {
            cfg.objective = o;
        }
        if let Some(m) = s.max_iters {
            cfg.max_iters = m;
        }
        if let Some(k) = s.step_shrink {
            cfg.step_shrink = k;
        }
        cfg.check().map_err(|e| CliError::Config(format!("search: {e}")))?;
        Ok(cfg)
    }
}

/// Parses `NxM`.
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxM, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

/// Parses `x,y`.
pub fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}
