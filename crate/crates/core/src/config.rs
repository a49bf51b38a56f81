//! Scenario configuration.
//!
//! A scenario is a flat TOML document. Every key is optional; missing keys
//! take the defaults listed on [`ScenarioConfig::default`]. Unknown keys are
//! rejected so that typos do not silently fall back to defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{FadingParams, LosModel};
use crate::error::{Error, Result};

/// Converts a dB value to a linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Number of NOMA clusters; the network holds `2 * i_clusters` devices.
    pub i_clusters: usize,
    /// RIS reflecting elements.
    pub l_elements: usize,
    /// Horizon in slots.
    pub t_slots: usize,
    pub mc_runs: usize,
    pub gamma_th_db: f64,
    pub p_max_dbm: f64,
    pub sigma2_dbm: f64,
    /// Path-loss power gain at 1 m.
    pub gamma0_db: f64,
    /// Linear Rician factor of the RIS links.
    pub rician_k: f64,
    /// Radius of the strong-device circle around the BS, meters.
    pub d_s: f64,
    /// Radius of the weak-device circle around the RIS, meters.
    pub d_w: f64,
    /// Horizontal BS-RIS separation, meters.
    pub d_rb: f64,
    pub h_b: f64,
    pub h_r: f64,
    pub eta_rb: f64,
    pub eta_wr: f64,
    pub eta_sb: f64,
    pub eta_wb: f64,
    /// Gaussian randomization candidates per slot.
    pub gr_samples: usize,
    pub sdr_tolerance: f64,
    pub seed: u64,
    pub los_model: LosModel,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            i_clusters: 10,
            l_elements: 32,
            t_slots: 100,
            mc_runs: 500,
            gamma_th_db: 45.0,
            p_max_dbm: 20.0,
            sigma2_dbm: -110.0,
            gamma0_db: -30.0,
            rician_k: 2.0,
            d_s: 10.0,
            d_w: 10.0,
            d_rb: 150.0,
            h_b: 10.0,
            h_r: 10.0,
            eta_rb: 2.2,
            eta_wr: 2.2,
            eta_sb: 3.5,
            eta_wb: 3.5,
            gr_samples: 100,
            sdr_tolerance: 1e-8,
            seed: 1,
            los_model: LosModel::Ula,
        }
    }
}

impl ScenarioConfig {
    pub fn gamma_th(&self) -> f64 {
        db_to_linear(self.gamma_th_db)
    }

    pub fn p_max(&self) -> f64 {
        dbm_to_watts(self.p_max_dbm)
    }

    pub fn noise_power(&self) -> f64 {
        dbm_to_watts(self.sigma2_dbm)
    }

    pub fn gamma0(&self) -> f64 {
        db_to_linear(self.gamma0_db)
    }

    pub fn fading_params(&self) -> FadingParams {
        FadingParams {
            gamma0: self.gamma0(),
            eta_rb: self.eta_rb,
            eta_wr: self.eta_wr,
            eta_sb: self.eta_sb,
            eta_wb: self.eta_wb,
            rician_k: self.rician_k,
            los_model: self.los_model,
        }
    }

    /// Checks every range invariant of the schema.
    pub fn validate(&self) -> Result<()> {
        let counts: [(&'static str, usize); 5] = [
            ("i_clusters", self.i_clusters),
            ("l_elements", self.l_elements),
            ("t_slots", self.t_slots),
            ("mc_runs", self.mc_runs),
            ("gr_samples", self.gr_samples),
        ];
        for (field, value) in counts {
            if value == 0 {
                return Err(range(field, "must be at least 1"));
            }
        }

        let db: [(&'static str, f64); 4] = [
            ("gamma_th_db", self.gamma_th_db),
            ("p_max_dbm", self.p_max_dbm),
            ("sigma2_dbm", self.sigma2_dbm),
            ("gamma0_db", self.gamma0_db),
        ];
        for (field, value) in db {
            if !value.is_finite() {
                return Err(range(field, "must be finite"));
            }
        }
        let linear: [(&'static str, f64); 4] = [
            ("gamma_th_db", self.gamma_th()),
            ("p_max_dbm", self.p_max()),
            ("sigma2_dbm", self.noise_power()),
            ("gamma0_db", self.gamma0()),
        ];
        for (field, value) in linear {
            if !(value.is_finite() && value > 0.0) {
                return Err(range(field, "linear value underflows or overflows"));
            }
        }

        let positive: [(&'static str, f64); 9] = [
            ("d_s", self.d_s),
            ("d_w", self.d_w),
            ("d_rb", self.d_rb),
            ("h_b", self.h_b),
            ("h_r", self.h_r),
            ("eta_rb", self.eta_rb),
            ("eta_wr", self.eta_wr),
            ("eta_sb", self.eta_sb),
            ("eta_wb", self.eta_wb),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(range(field, "must be a finite value > 0"));
            }
        }

        if !(self.rician_k.is_finite() && self.rician_k >= 0.0) {
            return Err(range("rician_k", "must be a finite value >= 0"));
        }
        if !(self.sdr_tolerance.is_finite() && self.sdr_tolerance > 0.0) {
            return Err(range("sdr_tolerance", "must be a finite value > 0"));
        }
        // TOML integers are signed 64-bit
        if self.seed > i64::MAX as u64 {
            return Err(range("seed", "must be at most 9223372036854775807"));
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    /// Copy with `key = value` assignments applied, each value written in
    /// TOML syntax (`l_elements=16`, `los_model="ula"`).
    pub fn with_overrides<S: AsRef<str>>(&self, assignments: &[S]) -> Result<ScenarioConfig> {
        let mut table: toml::Table =
            toml::from_str(&self.to_toml_string()).map_err(|e| Error::Parse(e.to_string()))?;
        for a in assignments {
            let a = a.as_ref();
            let parsed: toml::Table =
                toml::from_str(a).map_err(|e| Error::Parse(format!("override '{a}': {e}")))?;
            table.extend(parsed);
        }
        let text = toml::to_string(&table).map_err(|e| Error::Parse(e.to_string()))?;
        parse_config(&text)
    }
}

fn range(field: &'static str, reason: &str) -> Error {
    Error::Range {
        field,
        reason: reason.to_string(),
    }
}

/// Parses a TOML document and validates it.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let config: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn empty_document_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, ScenarioConfig::default());
        assert!(rel(c.gamma_th(), 10f64.powf(4.5)) < 1e-12);
        assert_eq!(c.t_slots, 100);
        assert_eq!(c.mc_runs, 500);
        assert_eq!(c.d_rb, 150.0);
        assert_eq!(c.rician_k, 2.0);
        assert_eq!(c.eta_rb, 2.2);
        assert_eq!(c.eta_sb, 3.5);
    }

    #[test]
    fn dbm_conversions() {
        assert!(rel(dbm_to_watts(-110.0), 1e-14) < 1e-12);
        assert!(rel(dbm_to_watts(30.0), 1.0) < 1e-15);
        assert!(rel(dbm_to_watts(20.0), 0.1) < 1e-12);
        assert!(rel(db_to_linear(-30.0), 1e-3) < 1e-12);
        assert!(rel(db_to_linear(3.0), 1.9952623149688795) < 1e-12);
        assert!((linear_to_db(100.0) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn zero_elements_is_range_error() {
        let err = parse_config("l_elements = 0").unwrap_err();
        assert!(matches!(err, Error::Range { field: "l_elements", .. }), "{err}");
    }

    #[test]
    fn bad_geometry_is_range_error() {
        assert!(matches!(
            parse_config("h_b = 0.0").unwrap_err(),
            Error::Range { field: "h_b", .. }
        ));
        assert!(matches!(
            parse_config("rician_k = -1.0").unwrap_err(),
            Error::Range { field: "rician_k", .. }
        ));
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = parse_config("i_clusters = 4\nl_elements = \"many\"\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(msg.contains("l_elements"), "{msg}");

        let err = parse_config("i_clusterz = 4\n").unwrap_err();
        assert!(err.to_string().contains("i_clusterz"), "{err}");
    }

    #[test]
    fn overrides_are_applied() {
        let c = parse_config("i_clusters = 4\nl_elements = 8\nlos_model = \"ones\"\np_max_dbm = 15.5\n").unwrap();
        assert_eq!(c.i_clusters, 4);
        assert_eq!(c.l_elements, 8);
        assert_eq!(c.los_model, LosModel::Ones);
        assert_eq!(c.p_max_dbm, 15.5);
        assert_eq!(c.t_slots, 100);
    }

    #[test]
    fn round_trip() {
        let mut c = ScenarioConfig::default();
        c.gamma0_db = -12.345678901234;
        c.seed = u32::MAX as u64 + 7;
        c.los_model = LosModel::Ones;
        let back = parse_config(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn command_line_overrides() {
        let c = ScenarioConfig::default()
            .with_overrides(&["gamma0_db=-10", "l_elements = 16", "los_model=\"ones\""])
            .unwrap();
        assert_eq!(c.gamma0_db, -10.0);
        assert_eq!(c.l_elements, 16);
        assert_eq!(c.los_model, LosModel::Ones);
        assert!(ScenarioConfig::default().with_overrides(&["l_elements=0"]).is_err());
        assert!(ScenarioConfig::default().with_overrides(&["bogus=1"]).is_err());
        assert!(ScenarioConfig::default().with_overrides(&["l_elements"]).is_err());
    }

    #[test]
    fn oversized_seed_rejected() {
        let c = ScenarioConfig {
            seed: u64::MAX,
            ..ScenarioConfig::default()
        };
        assert!(matches!(c.validate(), Err(Error::Range { field: "seed", .. })));
    }
}
