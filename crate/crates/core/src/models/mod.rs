//! Dataset-fitted models and their persistence-friendly store.

pub mod membership;
pub mod norm;
pub mod pca;
pub mod wavelet;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use membership::{DesignMethod, MembershipModel};
pub use norm::{DeviationKind, NormModel};
pub use pca::{pca_transform_channels, PcaModel};
pub use wavelet::{wavedec_bands, Boundary, WaveletFamily, WaveletSpec};

/// Any model a pipeline step can fit once and then apply per record.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FittedModel {
    Pca(PcaModel),
    Membership(MembershipModel),
    Norm(NormModel),
}

impl FittedModel {
    pub fn kind_name(&self) -> &'static str {
        match self {
            FittedModel::Pca(_) => "pca",
            FittedModel::Membership(_) => "membership",
            FittedModel::Norm(_) => "norm",
        }
    }

    pub fn as_pca(&self) -> Result<&PcaModel> {
        match self {
            FittedModel::Pca(m) => Ok(m),
            other => Err(Error::Model(format!(
                "expected a pca model, found {}",
                other.kind_name()
            ))),
        }
    }

    pub fn as_membership(&self) -> Result<&MembershipModel> {
        match self {
            FittedModel::Membership(m) => Ok(m),
            other => Err(Error::Model(format!(
                "expected a membership model, found {}",
                other.kind_name()
            ))),
        }
    }

    pub fn as_norm(&self) -> Result<&NormModel> {
        match self {
            FittedModel::Norm(m) => Ok(m),
            other => Err(Error::Model(format!(
                "expected a norm model, found {}",
                other.kind_name()
            ))),
        }
    }
}

/// Fitted models keyed by the output base name of the step that created
/// them. Pre-seeding the store lets a pipeline re-apply models to new data
/// without refitting.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ModelStore {
    entries: BTreeMap<String, FittedModel>,
}

impl ModelStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, model: FittedModel) {
        self.entries.insert(name.into(), model);
    }

    pub fn get(&self, name: &str) -> Option<&FittedModel> {
        self.entries.get(name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &FittedModel)> {
        self.entries.iter()
    }
}
