use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{bail, Result};

/// Parameters entering the design inequalities of a flux-controlled Majorana register.
///
/// All energies are in GHz (ħ = 1, k_B = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeParams {
    /// Josephson energy E_{J,k} of the Majorana-island junctions.
    pub e_jk: f64,
    /// Plasma frequency ħΩ_k of the Majorana islands.
    pub omega_k: f64,
    /// Induced superconducting gap Δ_g.
    pub gap: f64,
    /// Josephson energy E_{J,0} of the readout transmon.
    pub e_j0: f64,
    /// Transmon plasma frequency ħΩ_0.
    pub omega_0: f64,
    /// Cavity frequency ħω_0.
    pub cavity: f64,
    /// Majorana tunnel coupling E_M.
    pub e_m: f64,
    /// Largest coupling Δ_max.
    pub delta_max: f64,
    /// Smallest coupling Δ_min.
    pub delta_min: f64,
    /// Temperature k_B T.
    pub temperature: f64,
    /// Parity-dependent transmon coupling Δ_+.
    pub delta_plus: f64,
    /// Transmon-cavity coupling g.
    pub g: f64,
    /// Cavity decay rate κ.
    pub kappa: f64,
    /// Wire length over Majorana decay length, L/ξ.
    pub length_over_xi: f64,
    /// Factor read as "much greater than".
    pub strong_factor: f64,
}

impl RegimeParams {
    /// A representative working point: E_J0, ħΩ_0, ħω_0 near 100 GHz, E_M and Δ_max near 10 GHz,
    /// k_B T near 1 GHz, g/2π near 100 MHz and κ = 10 MHz.
    pub fn reference() -> Self {
        Self {
            e_jk: 200.0,
            omega_k: 200.0,
            gap: 150.0,
            e_j0: 100.0,
            omega_0: 105.0,
            cavity: 100.0,
            e_m: 10.0,
            delta_max: 10.0,
            delta_min: 1e-3,
            temperature: 1.0,
            delta_plus: 1.0,
            g: 0.628,
            kappa: 0.01,
            length_over_xi: 20.0,
            strong_factor: 10.0,
        }
    }

    /// Detuning δω = Ω_0 - ω_0.
    pub fn detuning(&self) -> f64 {
        self.omega_0 - self.cavity
    }

    /// 4g²Δ_+ / (δω² - 4Δ_+²).
    pub fn frequency_shift(&self) -> f64 {
        let dw = self.detuning();
        4.0 * self.g * self.g * self.delta_plus / (dw * dw - 4.0 * self.delta_plus * self.delta_plus)
    }

    fn fields(&self) -> [(&'static str, f64); 15] {
        [
            ("e_jk", self.e_jk),
            ("omega_k", self.omega_k),
            ("gap", self.gap),
            ("e_j0", self.e_j0),
            ("omega_0", self.omega_0),
            ("cavity", self.cavity),
            ("e_m", self.e_m),
            ("delta_max", self.delta_max),
            ("delta_min", self.delta_min),
            ("temperature", self.temperature),
            ("delta_plus", self.delta_plus),
            ("g", self.g),
            ("kappa", self.kappa),
            ("length_over_xi", self.length_over_xi),
            ("strong_factor", self.strong_factor),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// left > right.
    Greater,
    /// left ≥ strong_factor · right.
    MuchGreater,
    /// left < right.
    Less,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Greater => ">",
            Relation::MuchGreater => ">>",
            Relation::Less => "<",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inequality {
    pub name: String,
    pub left: f64,
    pub right: f64,
    pub relation: Relation,
    pub satisfied: bool,
}

impl Inequality {
    fn new(name: &str, left: f64, right: f64, relation: Relation, factor: f64) -> Self {
        let satisfied = match relation {
            Relation::Greater => left > right,
            Relation::MuchGreater => left >= factor * right,
            Relation::Less => left < right,
        };
        Self {
            name: name.into(),
            left,
            right,
            relation,
            satisfied,
        }
    }

    /// left/right, the multiplicative margin of the inequality.
    pub fn margin(&self) -> f64 {
        match self.relation {
            Relation::Less => self.right / self.left,
            _ => self.left / self.right,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub entries: Vec<Inequality>,
}

impl RegimeReport {
    pub fn all_satisfied(&self) -> bool {
        self.entries.iter().all(|e| e.satisfied)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Inequality> {
        self.entries.iter().filter(|e| !e.satisfied)
    }

    pub fn get(&self, name: &str) -> Option<&Inequality> {
        self.entries.iter().find(|e| e.name == name)
    }
}

fn min3(a: f64, b: f64, c: f64) -> f64 {
    a.min(b).min(c)
}

fn max3(a: f64, b: f64, c: f64) -> f64 {
    a.max(b).max(c)
}

/// Evaluates every design inequality. Failures are report entries, not errors; only
/// non-positive inputs are rejected.
pub fn validate_regime(p: &RegimeParams) -> Result<RegimeReport> {
    for (name, v) in p.fields() {
        if !(v > 0.0) || !v.is_finite() {
            bail!(Argument, "regime parameter {name} must be positive, got {v}");
        }
    }
    let f = p.strong_factor;
    let low_em = p.e_m.min(p.delta_max);
    let entries = alloc::vec![
        Inequality::new(
            "island_isolation",
            min3(p.e_jk, p.omega_k, p.gap),
            max3(p.e_j0, p.omega_0, p.cavity),
            Relation::Greater,
            f,
        ),
        Inequality::new(
            "readout_above_majorana",
            min3(p.e_j0, p.omega_0, p.cavity),
            p.e_m.max(p.delta_max),
            Relation::MuchGreater,
            f,
        ),
        Inequality::new("thermal", low_em, p.temperature, Relation::MuchGreater, f),
        Inequality::new("adiabatic_window", low_em, p.delta_min, Relation::MuchGreater, f),
        Inequality::new("tunnel_above_readout", p.e_m, p.delta_plus, Relation::MuchGreater, f),
        Inequality::new("resolvable_shift", p.frequency_shift(), p.kappa, Relation::Greater, f),
        Inequality::new(
            "wire_length",
            p.gap * libm::exp(-p.length_over_xi),
            p.delta_min,
            Relation::Less,
            f,
        ),
    ];
    Ok(RegimeReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_point_passes() {
        let r = validate_regime(&RegimeParams::reference()).unwrap();
        assert!(r.all_satisfied(), "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.entries.len(), 7);
    }

    #[test]
    fn hot_device_flags_thermal_only() {
        let p = RegimeParams {
            temperature: 11.0,
            ..RegimeParams::reference()
        };
        let r = validate_regime(&p).unwrap();
        let failed: Vec<_> = r.failures().map(|e| e.name.as_str()).collect();
        assert_eq!(failed, ["thermal"]);
    }

    #[test]
    fn short_wire_flagged() {
        let p = RegimeParams {
            length_over_xi: 5.0,
            ..RegimeParams::reference()
        };
        let r = validate_regime(&p).unwrap();
        assert!(!r.get("wire_length").unwrap().satisfied);
    }

    #[test]
    fn rejects_nonpositive() {
        let p = RegimeParams {
            kappa: 0.0,
            ..RegimeParams::reference()
        };
        assert!(validate_regime(&p).is_err());
    }
}
