//! Feature catalogs: qualitative probability/criticality annotations and
//! their numeric interpretation.
//!
//! A catalog file is JSON with an optional `levels` block overriding the
//! default numeric mapping and a `features` array. Unknown fields are
//! rejected so typos in hand-authored catalogs surface at load time.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Qualitative probability of occurrence, `A` (most probable) to `E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProbabilityLevel {
    A,
    B,
    C,
    D,
    E,
}

/// Qualitative criticality, `A` (most critical) to `C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CriticalityLevel {
    A,
    B,
    C,
}

impl ProbabilityLevel {
    pub const ALL: [ProbabilityLevel; 5] = [Self::A, Self::B, Self::C, Self::D, Self::E];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        (b'A' + self as u8) as char
    }
}

impl CriticalityLevel {
    pub const ALL: [CriticalityLevel; 3] = [Self::A, Self::B, Self::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        (b'A' + self as u8) as char
    }
}

impl FromStr for ProbabilityLevel {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "A" => Ok(Self::A),
            "B" => Ok(Self::B),
            "C" => Ok(Self::C),
            "D" => Ok(Self::D),
            "E" => Ok(Self::E),
            _ => Err(()),
        }
    }
}

impl FromStr for CriticalityLevel {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "A" => Ok(Self::A),
            "B" => Ok(Self::B),
            "C" => Ok(Self::C),
            _ => Err(()),
        }
    }
}

impl fmt::Display for ProbabilityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl fmt::Display for CriticalityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Numeric interpretation of the qualitative levels.
///
/// Probability values must lie in `(0, 1]` and strictly decrease from `A`
/// to `E`; criticality ranks must be at least 1 and strictly decrease from
/// `A` to `C`. A feature contributes `prob_values[level]` as a factor to
/// the global probability and `2^crit_ranks[level]` to the global
/// criticality.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelMapping {
    prob_values: [f64; 5],
    crit_ranks: [u32; 3],
}

impl Default for LevelMapping {
    fn default() -> Self {
        LevelMapping {
            prob_values: [1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
            crit_ranks: [3, 2, 1],
        }
    }
}

impl LevelMapping {
    pub fn new(prob_values: [f64; 5], crit_ranks: [u32; 3]) -> Result<Self, CatalogError> {
        for (i, &v) in prob_values.iter().enumerate() {
            let level = ProbabilityLevel::ALL[i];
            if !(v.is_finite() && v > 0.0 && v <= 1.0) {
                return Err(CatalogError::ProbabilityOutOfRange { level, value: v });
            }
            if i > 0 && v >= prob_values[i - 1] {
                return Err(CatalogError::NonMonotoneProbability { level });
            }
        }
        for (i, &r) in crit_ranks.iter().enumerate() {
            let level = CriticalityLevel::ALL[i];
            if r < 1 {
                return Err(CatalogError::CriticalityRankOutOfRange { level, rank: r });
            }
            if i > 0 && r >= crit_ranks[i - 1] {
                return Err(CatalogError::NonMonotoneCriticality { level });
            }
        }
        Ok(LevelMapping {
            prob_values,
            crit_ranks,
        })
    }

    pub fn probability(&self, level: ProbabilityLevel) -> f64 {
        self.prob_values[level.index()]
    }

    pub fn criticality_rank(&self, level: CriticalityLevel) -> u32 {
        self.crit_ranks[level.index()]
    }

    pub fn prob_values(&self) -> &[f64; 5] {
        &self.prob_values
    }

    pub fn crit_ranks(&self) -> &[u32; 3] {
        &self.crit_ranks
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Feature {
    pub id: String,
    pub name: String,
    pub criticality: CriticalityLevel,
    pub probability: ProbabilityLevel,
}

/// Identifier rule shared with the constraint grammar:
/// `[a-z_][a-z0-9_]*`.
pub fn is_valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

#[derive(Debug, Error, PartialEq)]
pub enum CatalogError {
    #[error("catalog is not valid UTF-8: {0}")]
    Utf8(String),
    #[error("malformed catalog: {0}")]
    Syntax(String),
    #[error("duplicate feature id \"{0}\"")]
    DuplicateId(String),
    #[error("feature \"{id}\": invalid identifier (expected [a-z_][a-z0-9_]*)")]
    InvalidId { id: String },
    #[error("feature \"{id}\": unknown {field} level \"{value}\"")]
    UnknownLevel {
        id: String,
        field: &'static str,
        value: String,
    },
    #[error("levels.{section}: unknown level \"{level}\"")]
    UnknownMappingLevel { section: &'static str, level: String },
    #[error("levels.{section}: level {level} is not mapped")]
    MissingMappingLevel { section: &'static str, level: char },
    #[error("levels.probability: value for {level} must be in (0, 1], got {value}")]
    ProbabilityOutOfRange { level: ProbabilityLevel, value: f64 },
    #[error("levels.probability: value for {level} must be strictly below the previous level")]
    NonMonotoneProbability { level: ProbabilityLevel },
    #[error("levels.criticality_rank: rank for {level} must be >= 1, got {rank}")]
    CriticalityRankOutOfRange { level: CriticalityLevel, rank: u32 },
    #[error("levels.criticality_rank: rank for {level} must be strictly below the previous level")]
    NonMonotoneCriticality { level: CriticalityLevel },
    #[error("unknown feature id \"{0}\"")]
    UnknownFeature(String),
}

/// An ordered, validated feature set together with its level mapping.
///
/// Immutable after construction; iteration follows file order.
#[derive(Clone, Debug)]
pub struct Catalog {
    features: Vec<Feature>,
    mapping: LevelMapping,
    index: HashMap<String, usize>,
}

impl PartialEq for Catalog {
    fn eq(&self, other: &Self) -> bool {
        self.features == other.features && self.mapping == other.mapping
    }
}

impl Catalog {
    pub fn new(features: Vec<Feature>, mapping: LevelMapping) -> Result<Self, CatalogError> {
        let mut index = HashMap::with_capacity(features.len());
        for (i, f) in features.iter().enumerate() {
            if !is_valid_identifier(&f.id) {
                return Err(CatalogError::InvalidId { id: f.id.clone() });
            }
            if index.insert(f.id.clone(), i).is_some() {
                return Err(CatalogError::DuplicateId(f.id.clone()));
            }
        }
        Ok(Catalog {
            features,
            mapping,
            index,
        })
    }

    /// Parses and validates a catalog file.
    pub fn load(content: &[u8]) -> Result<Self, CatalogError> {
        let text = std::str::from_utf8(content).map_err(|e| CatalogError::Utf8(e.to_string()))?;
        let raw: RawCatalog =
            serde_json::from_str(text).map_err(|e| CatalogError::Syntax(e.to_string()))?;

        let mapping = match raw.levels {
            None => LevelMapping::default(),
            Some(levels) => levels.into_mapping()?,
        };

        let mut features = Vec::with_capacity(raw.features.len());
        for f in raw.features {
            let criticality = f.criticality.parse().map_err(|_| CatalogError::UnknownLevel {
                id: f.id.clone(),
                field: "criticality",
                value: f.criticality.clone(),
            })?;
            let probability = f.probability.parse().map_err(|_| CatalogError::UnknownLevel {
                id: f.id.clone(),
                field: "probability",
                value: f.probability.clone(),
            })?;
            features.push(Feature {
                id: f.id,
                name: f.name,
                criticality,
                probability,
            });
        }
        Catalog::new(features, mapping)
    }

    /// Serializes to the catalog file format, always including the
    /// `levels` block.
    pub fn to_json(&self) -> String {
        let levels = RawLevels {
            probability: ProbabilityLevel::ALL
                .iter()
                .map(|l| (l.letter().to_string(), self.mapping.probability(*l)))
                .collect(),
            criticality_rank: CriticalityLevel::ALL
                .iter()
                .map(|l| (l.letter().to_string(), self.mapping.criticality_rank(*l)))
                .collect(),
        };
        let raw = RawCatalog {
            levels: Some(levels),
            features: self
                .features
                .iter()
                .map(|f| RawFeature {
                    id: f.id.clone(),
                    name: f.name.clone(),
                    criticality: f.criticality.to_string(),
                    probability: f.probability.to_string(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("catalog serialization cannot fail")
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn mapping(&self) -> &LevelMapping {
        &self.mapping
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn get(&self, id: &str) -> Option<&Feature> {
        self.index_of(id).map(|i| &self.features[i])
    }

    /// `P_i` for the feature named `id`.
    pub fn probability_value(&self, id: &str) -> Result<f64, CatalogError> {
        self.get(id)
            .map(|f| self.mapping.probability(f.probability))
            .ok_or_else(|| CatalogError::UnknownFeature(id.to_string()))
    }

    /// `C_i` (the exponent of the criticality weight) for the feature named `id`.
    pub fn criticality_rank(&self, id: &str) -> Result<u32, CatalogError> {
        self.get(id)
            .map(|f| self.mapping.criticality_rank(f.criticality))
            .ok_or_else(|| CatalogError::UnknownFeature(id.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalog {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    levels: Option<RawLevels>,
    features: Vec<RawFeature>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLevels {
    probability: BTreeMap<String, f64>,
    criticality_rank: BTreeMap<String, u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFeature {
    id: String,
    name: String,
    criticality: String,
    probability: String,
}

impl RawLevels {
    fn into_mapping(self) -> Result<LevelMapping, CatalogError> {
        let mut prob = [None; 5];
        for (key, value) in self.probability {
            let level: ProbabilityLevel =
                key.parse()
                    .map_err(|_| CatalogError::UnknownMappingLevel {
                        section: "probability",
                        level: key.clone(),
                    })?;
            prob[level.index()] = Some(value);
        }
        let mut crit = [None; 3];
        for (key, value) in self.criticality_rank {
            let level: CriticalityLevel =
                key.parse()
                    .map_err(|_| CatalogError::UnknownMappingLevel {
                        section: "criticality_rank",
                        level: key.clone(),
                    })?;
            crit[level.index()] = Some(value);
        }

        let mut prob_values = [0.0; 5];
        for (i, v) in prob.iter().enumerate() {
            prob_values[i] = v.ok_or(CatalogError::MissingMappingLevel {
                section: "probability",
                level: ProbabilityLevel::ALL[i].letter(),
            })?;
        }
        let mut crit_ranks = [0; 3];
        for (i, v) in crit.iter().enumerate() {
            crit_ranks[i] = v.ok_or(CatalogError::MissingMappingLevel {
                section: "criticality_rank",
                level: CriticalityLevel::ALL[i].letter(),
            })?;
        }
        LevelMapping::new(prob_values, crit_ranks)
    }
}
