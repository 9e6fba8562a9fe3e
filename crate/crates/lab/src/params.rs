//! JSON parameter files.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use majorana_core::device::{FluxConfig, IslandParams, RegimeParams};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Island and flux parameters, energies in GHz and fluxes as x = eΦ/ħ.
///
/// ```json
/// { "e_j0": 50.0, "e_c": 1.0, "e_m": 100.0, "q_offset": 0.0, "flux": [0.0, 0.0, 1.0, 0.0] }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceParams {
    /// Josephson energy E_J(0) of each Majorana island's split junction.
    pub e_j0: f64,
    /// Charging energy E_C of each island.
    pub e_c: f64,
    /// Majorana tunnel coupling E_M at the T-junctions.
    pub e_m: f64,
    /// Offset charge q in units of e.
    #[serde(default)]
    pub q_offset: f64,
    /// Flux configuration (x_0, x_1, …).
    #[serde(default)]
    pub flux: Vec<f64>,
}

impl DeviceParams {
    pub fn validate(&self) -> Result<()> {
        self.island().map_err(|e| anyhow::anyhow!("{e}"))?;
        if !(self.e_m > 0.0) {
            bail!("e_m must be positive, got {}", self.e_m);
        }
        if !self.flux.is_empty() {
            FluxConfig::new(self.flux.clone()).map_err(|e| anyhow::anyhow!("{e}"))?;
        }
        Ok(())
    }

    pub fn island(&self) -> majorana_core::Result<IslandParams> {
        IslandParams::new(self.e_j0, self.e_c, self.q_offset)
    }
}

/// Regime parameters; every field defaults to the reference working point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegimeFile {
    pub e_jk: f64,
    pub omega_k: f64,
    pub gap: f64,
    pub e_j0: f64,
    pub omega_0: f64,
    pub cavity: f64,
    pub e_m: f64,
    pub delta_max: f64,
    pub delta_min: f64,
    pub temperature: f64,
    pub delta_plus: f64,
    pub g: f64,
    pub kappa: f64,
    pub length_over_xi: f64,
    pub strong_factor: f64,
}

impl Default for RegimeFile {
    fn default() -> Self {
        RegimeParams::reference().into()
    }
}

impl From<RegimeParams> for RegimeFile {
    fn from(p: RegimeParams) -> Self {
        Self {
            e_jk: p.e_jk,
            omega_k: p.omega_k,
            gap: p.gap,
            e_j0: p.e_j0,
            omega_0: p.omega_0,
            cavity: p.cavity,
            e_m: p.e_m,
            delta_max: p.delta_max,
            delta_min: p.delta_min,
            temperature: p.temperature,
            delta_plus: p.delta_plus,
            g: p.g,
            kappa: p.kappa,
            length_over_xi: p.length_over_xi,
            strong_factor: p.strong_factor,
        }
    }
}

impl From<RegimeFile> for RegimeParams {
    fn from(p: RegimeFile) -> Self {
        Self {
            e_jk: p.e_jk,
            omega_k: p.omega_k,
            gap: p.gap,
            e_j0: p.e_j0,
            omega_0: p.omega_0,
            cavity: p.cavity,
            e_m: p.e_m,
            delta_max: p.delta_max,
            delta_min: p.delta_min,
            temperature: p.temperature,
            delta_plus: p.delta_plus,
            g: p.g,
            kappa: p.kappa,
            length_over_xi: p.length_over_xi,
            strong_factor: p.strong_factor,
        }
    }
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
