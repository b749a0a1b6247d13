//! The VSM, LSI, LDA and EM classifier families and their configuration
//! space. Each configuration maps a query to a [`RankedList`] over every
//! entity of a snapshot corpus.

mod config;
mod corpus;
mod em;
mod lda;
mod lsi;
mod ranked;
mod vsm;

use thiserror::Error;

pub use config::{
    config_id, enumerate_configs, enumerate_family, parse_config_id, ConfigParseError,
    Configuration, EmMetric, Family, Similarity, TermWeight, TOPIC_COUNTS,
};
pub use corpus::{Corpus, IdfMode};
pub use em::{em_rank, metric_value};
pub use lda::{lda_rank, lda_scores, train_lda};
pub use lsi::{lsi_rank, LsiModel};
pub use ranked::{RankedEntity, RankedList};
pub use vsm::{vsm_rank, VsmIndex};

use crate::numerics::NumericsError;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model was trained on corpus {expected}, not {found}")]
    ModelMismatch { expected: String, found: String },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
