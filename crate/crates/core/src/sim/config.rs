use serde::{Deserialize, Serialize};

use super::engine::Dynamics;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Model {
    /// Discrete-time `±1` walk on one sublattice; `horizon` counts steps.
    ParityWalk,
    /// Continuous-time simple walk, rate 1 in each direction.
    CtSimpleWalk,
    /// Simple walk on a lattice of spacing `ε` with unit displacement
    /// variance per unit time.
    BrownianFineLattice,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialOccupancy {
    /// Every lattice site of the window.
    AllSites,
    /// Every site of the given parity in the window.
    Sublattice { parity: i64 },
    /// Explicit lattice sites; the window is then ignored.
    Sites(Vec<i64>),
}

fn default_margin() -> f64 {
    6.0
}

fn default_occupancy() -> InitialOccupancy {
    InitialOccupancy::AllSites
}

/// One simulation run: model, horizon, window and replicate count.
///
/// `window_halfwidth` is in lattice sites for the lattice models and in
/// real length units for the fine lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub model: Model,
    pub horizon: f64,
    pub window_halfwidth: f64,
    #[serde(default = "default_margin")]
    pub margin_sigmas: f64,
    #[serde(default)]
    pub lattice_spacing: Option<f64>,
    pub replicates: u64,
    pub seed: u64,
    #[serde(default = "default_occupancy")]
    pub initial_occupancy: InitialOccupancy,
}

impl SimulationConfig {
    /// Lattice-model config with default margin and full occupancy.
    pub fn new(model: Model, horizon: f64, window_halfwidth: f64, replicates: u64, seed: u64) -> Self {
        let initial_occupancy = match model {
            Model::ParityWalk => InitialOccupancy::Sublattice { parity: 0 },
            _ => InitialOccupancy::AllSites,
        };
        Self {
            model,
            horizon,
            window_halfwidth,
            margin_sigmas: default_margin(),
            lattice_spacing: None,
            replicates,
            seed,
            initial_occupancy,
        }
    }

    /// Fine-lattice config of spacing `epsilon` and window half-length `l`.
    pub fn fine_lattice(horizon: f64, l: f64, epsilon: f64, replicates: u64, seed: u64) -> Self {
        Self { lattice_spacing: Some(epsilon), ..Self::new(Model::BrownianFineLattice, horizon, l, replicates, seed) }
    }

    /// Length of one lattice site in real units.
    pub fn spacing(&self) -> f64 {
        match self.model {
            Model::BrownianFineLattice => self.lattice_spacing.unwrap_or(f64::NAN),
            _ => 1.0,
        }
    }

    /// Observation margin `margin_sigmas · √(2T)` in real units.
    pub fn margin(&self) -> f64 {
        self.margin_sigmas * (2.0 * self.horizon).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be finite and nonnegative, got {}", self.horizon));
        }
        if self.model == Model::ParityWalk && self.horizon.fract() != 0.0 {
            return bad(format!("parity walk needs a whole number of steps, got {}", self.horizon));
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if !(self.margin_sigmas >= 0.0 && self.margin_sigmas.is_finite()) {
            return bad(format!("margin_sigmas must be finite and nonnegative, got {}", self.margin_sigmas));
        }
        match (self.model, self.lattice_spacing) {
            (Model::BrownianFineLattice, Some(e)) if e > 0.0 && e.is_finite() => {}
            (Model::BrownianFineLattice, e) => return bad(format!("fine lattice needs a positive spacing, got {e:?}")),
            (_, Some(_)) => return bad("lattice_spacing applies to the fine-lattice model only".into()),
            _ => {}
        }
        match &self.initial_occupancy {
            InitialOccupancy::Sites(sites) => {
                if sites.is_empty() || !sites.windows(2).all(|w| w[0] < w[1]) {
                    return bad("explicit sites must be nonempty and strictly increasing".into());
                }
                if self.model == Model::ParityWalk {
                    let p = sites[0].rem_euclid(2);
                    if sites.iter().any(|s| s.rem_euclid(2) != p) {
                        return bad(parity_message());
                    }
                }
            }
            InitialOccupancy::AllSites if self.model == Model::ParityWalk => return bad(parity_message()),
            InitialOccupancy::Sublattice { .. } if self.model != Model::ParityWalk => {
                return bad("sublattice occupancy applies to the parity walk only".into());
            }
            _ => {
                if !(self.window_halfwidth > self.margin() && self.window_halfwidth.is_finite()) {
                    return bad(format!(
                        "window half-width {} does not exceed the margin {:.6}",
                        self.window_halfwidth,
                        self.margin()
                    ));
                }
                if self.window_halfwidth / self.spacing() > 1e9 {
                    return bad("window holds more than 1e9 sites".into());
                }
            }
        }
        Ok(())
    }

    pub(crate) fn dynamics(&self) -> Dynamics {
        match self.model {
            Model::ParityWalk => Dynamics::Synchronous { steps: self.horizon as u64 },
            Model::CtSimpleWalk => Dynamics::Gillespie { rate: 1.0, horizon: self.horizon },
            Model::BrownianFineLattice => {
                let e = self.spacing();
                Dynamics::Gillespie { rate: 1.0 / (2.0 * e * e), horizon: self.horizon }
            }
        }
    }

    /// Initial sites and the observation window, both in lattice units.
    pub(crate) fn layout(&self) -> (Vec<i64>, (f64, f64)) {
        let spacing = self.spacing();
        match &self.initial_occupancy {
            InitialOccupancy::Sites(sites) => {
                let lo = sites[0] as f64;
                let hi = *sites.last().unwrap() as f64 + 1.0;
                (sites.clone(), (lo, hi))
            }
            occ => {
                let h = (self.window_halfwidth / spacing).floor() as i64;
                let m = self.margin() / spacing;
                let sites: Vec<i64> = match occ {
                    InitialOccupancy::Sublattice { parity } => {
                        (-h..=h).filter(|s| s.rem_euclid(2) == parity.rem_euclid(2)).collect()
                    }
                    _ => (-h..=h).collect(),
                };
                // integer ends and a length divisible by the lattice step, so
                // that the window holds exactly `length / step` sites
                let lo = (-(h as f64) + m).ceil();
                let mut hi = (h as f64 - m).floor() + 1.0;
                if self.model == Model::ParityWalk && (hi - lo) % 2.0 != 0.0 {
                    hi -= 1.0;
                }
                (sites, (lo, hi.max(lo)))
            }
        }
    }
}

fn parity_message() -> String {
    "parity walk must occupy a single sublattice: walkers on opposite parities can swap places without ever \
     sharing a site, so coalescence would miss crossings"
        .into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let ok = SimulationConfig::new(Model::CtSimpleWalk, 1.0, 100.0, 10, 1);
        assert!(ok.validate().is_ok());
        let small = SimulationConfig { window_halfwidth: 8.0, ..ok.clone() };
        assert!(matches!(small.validate(), Err(Error::Config(_))));
        let zero = SimulationConfig { replicates: 0, ..ok.clone() };
        assert!(zero.validate().is_err());
        let both = SimulationConfig { initial_occupancy: InitialOccupancy::AllSites, ..SimulationConfig::new(Model::ParityWalk, 4.0, 100.0, 1, 1) };
        let err = both.validate().unwrap_err().to_string();
        assert!(err.contains("sublattice") && err.contains("swap"), "{err}");
        let mixed = SimulationConfig {
            initial_occupancy: InitialOccupancy::Sites(vec![0, 1]),
            ..SimulationConfig::new(Model::ParityWalk, 4.0, 100.0, 1, 1)
        };
        assert!(mixed.validate().is_err());
        let fine = SimulationConfig::fine_lattice(1.0, 100.0, 0.0, 1, 1);
        assert!(fine.validate().is_err());
        assert!(SimulationConfig::fine_lattice(1.0, 100.0, 0.01, 1, 1).validate().is_ok());
    }

    #[test]
    fn json_round_trip_and_defaults() {
        let text = r#"{"model":"CT_SIMPLE_WALK","horizon":1.0,"window_halfwidth":50,"replicates":3,"seed":9}"#;
        let c: SimulationConfig = serde_json::from_str(text).unwrap();
        assert_eq!(c.margin_sigmas, 6.0);
        assert_eq!(c.initial_occupancy, InitialOccupancy::AllSites);
        let back: SimulationConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn layout_trims_margin() {
        let c = SimulationConfig::fine_lattice(1.0, 10.0, 0.5, 1, 1);
        let (sites, (lo, hi)) = c.layout();
        assert_eq!(sites.len(), 41);
        // margin 6√2 / 0.5 = 16.97 sites
        assert_eq!((lo, hi), (-3.0, 4.0));
        let p = SimulationConfig::new(Model::ParityWalk, 2.0, 20.0, 1, 1);
        let (sites, (lo, hi)) = p.layout();
        assert!(sites.iter().all(|s| s % 2 == 0));
        assert_eq!((hi - lo) % 2.0, 0.0);
    }
}
