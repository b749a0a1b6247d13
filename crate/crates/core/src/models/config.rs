//! The factorial configuration space and its dotted id format
//! (`A1.B4.C5.D1.E1`, `A1.B4.C7.F1.G256`, `A1.B4.C6.J32.K1`, `M2`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textprep::{EntityRep, PreprocessSpec, QueryRep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid configuration id `{id}`: bad token `{token}`")]
pub struct ConfigParseError {
    pub id: String,
    pub token: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Vsm,
    Lsi,
    Lda,
    Em,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Vsm, Family::Lsi, Family::Lda, Family::Em];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Vsm => "vsm",
            Self::Lsi => "lsi",
            Self::Lda => "lda",
            Self::Em => "em",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown family `{s}` (expected vsm, lsi, lda or em)"))
    }
}

/// Term weighting (D for VSM, F for LSI).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TermWeight {
    TfIdf,
    Sublinear,
    Boolean,
}

impl TermWeight {
    pub const ALL: [TermWeight; 3] = [Self::TfIdf, Self::Sublinear, Self::Boolean];

    pub fn code(&self) -> u8 {
        *self as u8 + 1
    }

    fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(usize::from(code).checked_sub(1)?).copied()
    }
}

/// VSM similarity (E).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Similarity {
    Cosine,
    Overlap,
}

impl Similarity {
    pub const ALL: [Similarity; 2] = [Self::Cosine, Self::Overlap];

    pub fn code(&self) -> u8 {
        *self as u8 + 1
    }

    fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(usize::from(code).checked_sub(1)?).copied()
    }
}

/// Topic counts shared by LSI (G) and LDA (J).
pub const TOPIC_COUNTS: [u32; 4] = [32, 64, 128, 256];

/// EM metric (M).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EmMetric {
    Loc,
    Churn,
    NewBugs,
    CumulativeBugs,
}

impl EmMetric {
    pub const ALL: [EmMetric; 4] = [Self::Loc, Self::Churn, Self::NewBugs, Self::CumulativeBugs];

    pub fn code(&self) -> u8 {
        *self as u8 + 1
    }

    fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(usize::from(code).checked_sub(1)?).copied()
    }
}

/// One point of the configuration space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Configuration {
    Vsm {
        query: QueryRep,
        entity: EntityRep,
        prep: PreprocessSpec,
        weight: TermWeight,
        similarity: Similarity,
    },
    /// Similarity is fixed to cosine (H1).
    Lsi {
        query: QueryRep,
        entity: EntityRep,
        prep: PreprocessSpec,
        weight: TermWeight,
        topics: u32,
    },
    /// Similarity is fixed to conditional probability (N1); α, β and the
    /// iteration rule (K1, L1, I1) are implicit.
    Lda {
        query: QueryRep,
        entity: EntityRep,
        prep: PreprocessSpec,
        topics: u32,
    },
    Em {
        metric: EmMetric,
    },
}

impl Configuration {
    pub fn family(&self) -> Family {
        match self {
            Self::Vsm { .. } => Family::Vsm,
            Self::Lsi { .. } => Family::Lsi,
            Self::Lda { .. } => Family::Lda,
            Self::Em { .. } => Family::Em,
        }
    }

    /// Query representation, for the IR families.
    pub fn query_rep(&self) -> Option<QueryRep> {
        match *self {
            Self::Vsm { query, .. } | Self::Lsi { query, .. } | Self::Lda { query, .. } => {
                Some(query)
            }
            Self::Em { .. } => None,
        }
    }

    /// Entity representation and preprocessing, which together with the
    /// snapshot determine the corpus.
    pub fn corpus_key(&self) -> Option<(EntityRep, PreprocessSpec)> {
        match *self {
            Self::Vsm { entity, prep, .. }
            | Self::Lsi { entity, prep, .. }
            | Self::Lda { entity, prep, .. } => Some((entity, prep)),
            Self::Em { .. } => None,
        }
    }

    pub fn prep(&self) -> Option<PreprocessSpec> {
        self.corpus_key().map(|(_, p)| p)
    }

    pub fn id(&self) -> String {
        self.to_string()
    }

    /// `(parameter letter, level code)` pairs in id order, e.g.
    /// `[('A', "1"), ('B', "4"), ..., ('G', "256")]`.
    pub fn levels(&self) -> Vec<(char, String)> {
        self.to_string()
            .split('.')
            .map(|t| {
                let mut chars = t.chars();
                let letter = chars.next().expect("non-empty token");
                (letter, chars.as_str().to_string())
            })
            .collect()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Vsm {
                query,
                entity,
                prep,
                weight,
                similarity,
            } => write!(
                f,
                "A{}.B{}.{}.D{}.E{}",
                query.code(),
                entity.code(),
                prep,
                weight.code(),
                similarity.code()
            ),
            Self::Lsi {
                query,
                entity,
                prep,
                weight,
                topics,
            } => write!(
                f,
                "A{}.B{}.{}.F{}.G{}",
                query.code(),
                entity.code(),
                prep,
                weight.code(),
                topics
            ),
            Self::Lda {
                query,
                entity,
                prep,
                topics,
            } => {
                write!(
                    f,
                    "A{}.B{}.{}.J{}.K1",
                    query.code(),
                    entity.code(),
                    prep,
                    topics
                )
            }
            Self::Em { metric } => write!(f, "M{}", metric.code()),
        }
    }
}

impl FromStr for Configuration {
    type Err = ConfigParseError;

    fn from_str(id: &str) -> Result<Self, Self::Err> {
        parse_config_id(id)
    }
}

pub fn config_id(c: &Configuration) -> String {
    c.to_string()
}

pub fn parse_config_id(id: &str) -> Result<Configuration, ConfigParseError> {
    let tokens: Vec<&str> = id.split('.').collect();
    let err = |token: &str| ConfigParseError {
        id: id.to_string(),
        token: token.to_string(),
    };
    let field = |i: usize, letter: char| -> Result<&str, ConfigParseError> {
        let token = *tokens.get(i).ok_or_else(|| err("<missing>"))?;
        match token.strip_prefix(letter) {
            Some(rest) if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) => Ok(rest),
            _ => Err(err(token)),
        }
    };
    let small = |i: usize, letter: char| -> Result<u8, ConfigParseError> {
        field(i, letter)?.parse::<u8>().map_err(|_| err(tokens[i]))
    };
    let topics = |i: usize, letter: char| -> Result<u32, ConfigParseError> {
        let n: u32 = field(i, letter)?.parse().map_err(|_| err(tokens[i]))?;
        if TOPIC_COUNTS.contains(&n) {
            Ok(n)
        } else {
            Err(err(tokens[i]))
        }
    };

    if tokens[0].starts_with('M') {
        if tokens.len() != 1 {
            return Err(err(tokens[1]));
        }
        let metric = EmMetric::from_code(small(0, 'M')?).ok_or_else(|| err(tokens[0]))?;
        return Ok(Configuration::Em { metric });
    }
    let query = QueryRep::from_code(small(0, 'A')?).ok_or_else(|| err(tokens[0]))?;
    let entity = EntityRep::from_code(small(1, 'B')?).ok_or_else(|| err(tokens[1]))?;
    let prep = PreprocessSpec::from_code(small(2, 'C')?).ok_or_else(|| err(tokens[2]))?;
    let fourth = tokens.get(3).ok_or_else(|| err("<missing>"))?;
    let (config, used) = match fourth.chars().next() {
        Some('D') => {
            let weight = TermWeight::from_code(small(3, 'D')?).ok_or_else(|| err(tokens[3]))?;
            let similarity = Similarity::from_code(small(4, 'E')?).ok_or_else(|| err(tokens[4]))?;
            (
                Configuration::Vsm {
                    query,
                    entity,
                    prep,
                    weight,
                    similarity,
                },
                5,
            )
        }
        Some('F') => {
            let weight = TermWeight::from_code(small(3, 'F')?).ok_or_else(|| err(tokens[3]))?;
            let topics = topics(4, 'G')?;
            (
                Configuration::Lsi {
                    query,
                    entity,
                    prep,
                    weight,
                    topics,
                },
                5,
            )
        }
        Some('J') => {
            let topics = topics(3, 'J')?;
            if small(4, 'K')? != 1 {
                return Err(err(tokens[4]));
            }
            (
                Configuration::Lda {
                    query,
                    entity,
                    prep,
                    topics,
                },
                5,
            )
        }
        _ => return Err(err(fourth)),
    };
    if let Some(extra) = tokens.get(used) {
        return Err(err(extra));
    }
    Ok(config)
}

fn ir_prefixes() -> impl Iterator<Item = (QueryRep, EntityRep, PreprocessSpec)> {
    QueryRep::ALL.into_iter().flat_map(|q| {
        EntityRep::ALL
            .into_iter()
            .flat_map(move |e| PreprocessSpec::ALL.into_iter().map(move |p| (q, e, p)))
    })
}

/// Every configuration of one family, in parameter code order.
pub fn enumerate_family(family: Family) -> Vec<Configuration> {
    match family {
        Family::Vsm => ir_prefixes()
            .flat_map(|(query, entity, prep)| {
                TermWeight::ALL.into_iter().flat_map(move |weight| {
                    Similarity::ALL
                        .into_iter()
                        .map(move |similarity| Configuration::Vsm {
                            query,
                            entity,
                            prep,
                            weight,
                            similarity,
                        })
                })
            })
            .collect(),
        Family::Lsi => ir_prefixes()
            .flat_map(|(query, entity, prep)| {
                TermWeight::ALL.into_iter().flat_map(move |weight| {
                    TOPIC_COUNTS
                        .into_iter()
                        .map(move |topics| Configuration::Lsi {
                            query,
                            entity,
                            prep,
                            weight,
                            topics,
                        })
                })
            })
            .collect(),
        Family::Lda => ir_prefixes()
            .flat_map(|(query, entity, prep)| {
                TOPIC_COUNTS
                    .into_iter()
                    .map(move |topics| Configuration::Lda {
                        query,
                        entity,
                        prep,
                        topics,
                    })
            })
            .collect(),
        Family::Em => EmMetric::ALL
            .into_iter()
            .map(|metric| Configuration::Em { metric })
            .collect(),
    }
}

/// The full space: VSM, LSI, LDA, then EM.
pub fn enumerate_configs() -> Vec<Configuration> {
    Family::ALL.into_iter().flat_map(enumerate_family).collect()
}
