use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// One-based silo identifier, rendered as `S1`, `S2`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiloId(u8);

impl SiloId {
    pub const S1: SiloId = SiloId(1);
    pub const S2: SiloId = SiloId(2);
    pub const S3: SiloId = SiloId(3);
    pub const S4: SiloId = SiloId(4);

    /// Returns `None` for zero.
    pub fn new(number: u8) -> Option<Self> {
        (number > 0).then_some(SiloId(number))
    }

    pub fn number(self) -> u8 {
        self.0
    }

    /// Zero-based position in plant-wide vectors.
    pub fn index(self) -> usize {
        usize::from(self.0) - 1
    }

    pub fn from_index(index: usize) -> Self {
        SiloId(u8::try_from(index + 1).expect("silo index out of range"))
    }
}

impl fmt::Display for SiloId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid silo id `{0}` (expected S1, S2, ...)")]
pub struct ParseSiloIdError(pub String);

impl FromStr for SiloId {
    type Err = ParseSiloIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .strip_prefix('S')
            .or_else(|| s.strip_prefix('s'))
            .unwrap_or(s);
        digits
            .parse::<u8>()
            .ok()
            .and_then(SiloId::new)
            .ok_or_else(|| ParseSiloIdError(s.to_string()))
    }
}

impl Serialize for SiloId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SiloId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Static configuration of one silo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiloSpec {
    pub id: SiloId,
    /// Liters.
    pub capacity: f64,
    pub has_heater: bool,
    pub has_mixer: bool,
    pub has_temp_sensor: bool,
    /// E_i trips at or below this level (liters).
    pub low_threshold: f64,
    /// F_i trips at or above this level (liters).
    pub high_threshold: f64,
    /// Liters per second through IN_i.
    pub fill_rate: f64,
    /// Liters per second through OUT_i.
    pub drain_rate: f64,
    /// Degrees C per second while R_i is on.
    pub heat_rate: f64,
    pub ambient_temp: f64,
    /// Seconds.
    pub cooling_time_constant: f64,
}

impl SiloSpec {
    /// Default silo with the given capabilities.
    pub fn standard(id: SiloId, has_heater: bool, has_mixer: bool) -> Self {
        SiloSpec {
            id,
            capacity: 100.0,
            has_heater,
            has_mixer,
            has_temp_sensor: has_heater,
            low_threshold: 2.0,
            high_threshold: 95.0,
            fill_rate: 4.0,
            drain_rate: 5.0,
            heat_rate: 2.0,
            ambient_temp: 20.0,
            cooling_time_constant: 600.0,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |reason: &str| ConfigError::InvalidSilo {
            silo: self.id,
            reason: reason.to_string(),
        };
        let all_finite = [
            self.capacity,
            self.low_threshold,
            self.high_threshold,
            self.fill_rate,
            self.drain_rate,
            self.heat_rate,
            self.ambient_temp,
            self.cooling_time_constant,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return Err(bad("all numeric fields must be finite"));
        }
        if !(0.0 < self.low_threshold
            && self.low_threshold < self.high_threshold
            && self.high_threshold < self.capacity)
        {
            return Err(bad("thresholds must satisfy 0 < low < high < capacity"));
        }
        if self.fill_rate <= 0.0 || self.drain_rate <= 0.0 || self.heat_rate <= 0.0 {
            return Err(bad("rates must be strictly positive"));
        }
        if self.cooling_time_constant <= 0.0 {
            return Err(bad("cooling_time_constant must be positive"));
        }
        if self.has_temp_sensor && !self.has_heater {
            return Err(bad("a temperature sensor requires a heater"));
        }
        Ok(())
    }
}

/// Plant-wide configuration: the silos plus global physical constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantConfig {
    /// Temperature of raw liquid drawn from the supply inlet.
    pub supply_temp: f64,
    /// Heating or mixing at or below this level is dry (liters).
    pub dry_level: f64,
    /// Seconds of mixing needed to go from homogeneity 0 to 1.
    #[serde(default = "default_mix_time_constant")]
    pub mix_time_constant: f64,
    pub silos: Vec<SiloSpec>,
}

fn default_mix_time_constant() -> f64 {
    30.0
}

impl Default for PlantConfig {
    /// The four-silo liqueur plant: S1 plain, S2 heater with T_2, S3 mixer,
    /// S4 heater, mixer and T_4.
    fn default() -> Self {
        PlantConfig {
            supply_temp: 20.0,
            dry_level: 1.0,
            mix_time_constant: default_mix_time_constant(),
            silos: vec![
                SiloSpec::standard(SiloId::S1, false, false),
                SiloSpec::standard(SiloId::S2, true, false),
                SiloSpec::standard(SiloId::S3, false, true),
                SiloSpec::standard(SiloId::S4, true, true),
            ],
        }
    }
}

impl PlantConfig {
    pub fn silo(&self, id: SiloId) -> Option<&SiloSpec> {
        self.silos.get(id.index()).filter(|s| s.id == id)
    }

    pub fn silo_ids(&self) -> impl Iterator<Item = SiloId> + '_ {
        self.silos.iter().map(|s| s.id)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.silos.is_empty() {
            return Err(ConfigError::NoSilos);
        }
        if self.silos.len() > usize::from(u8::MAX) {
            return Err(ConfigError::TooManySilos(self.silos.len()));
        }
        for (index, spec) in self.silos.iter().enumerate() {
            let expected = SiloId::from_index(index);
            if spec.id != expected {
                return Err(ConfigError::SiloOrder {
                    expected,
                    found: spec.id,
                });
            }
            spec.validate()?;
            if self.dry_level >= spec.capacity {
                return Err(ConfigError::InvalidGlobal(format!(
                    "dry_level must be below the capacity of {}",
                    spec.id
                )));
            }
        }
        if !self.supply_temp.is_finite() {
            return Err(ConfigError::InvalidGlobal("supply_temp must be finite".into()));
        }
        if !(self.dry_level.is_finite() && self.dry_level >= 0.0) {
            return Err(ConfigError::InvalidGlobal("dry_level must be >= 0".into()));
        }
        if !(self.mix_time_constant.is_finite() && self.mix_time_constant > 0.0) {
            return Err(ConfigError::InvalidGlobal(
                "mix_time_constant must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Explicit Euler is only accepted while `dt < cooling_time_constant / 10`
    /// for every silo.
    pub fn validate_step(&self, dt: f64) -> Result<(), ConfigError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ConfigError::InvalidStep(dt));
        }
        for spec in &self.silos {
            if dt >= spec.cooling_time_constant / 10.0 {
                return Err(ConfigError::UnstableStep {
                    silo: spec.id,
                    dt,
                    limit: spec.cooling_time_constant / 10.0,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("plant has no silos")]
    NoSilos,
    #[error("plant has {0} silos, at most 255 are supported")]
    TooManySilos(usize),
    #[error("silos must be listed in order: expected {expected}, found {found}")]
    SiloOrder { expected: SiloId, found: SiloId },
    #[error("silo {silo}: {reason}")]
    InvalidSilo { silo: SiloId, reason: String },
    #[error("{0}")]
    InvalidGlobal(String),
    #[error("step {0} s is not a positive finite duration")]
    InvalidStep(f64),
    #[error("step {dt} s is too coarse for silo {silo} (must be below {limit} s)")]
    UnstableStep { silo: SiloId, dt: f64, limit: f64 },
}
