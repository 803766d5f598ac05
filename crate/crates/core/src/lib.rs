//! Binary-classification toolkit that trains eager, lazy and stacked
//! learners on tabular data, scores them with classification metrics and
//! the Akaike information criterion, and recommends a model per dataset.
//!
//! The pipeline runs in four phases:
//!
//! 1. [`analysis`]: profile attributes, guess linearity/size, filter features.
//! 2. [`ingest`] + [`learners`]: encode, split and fit the 13-model registry.
//! 3. [`evaluation`]: confusion metrics, ROC/AUC, log-likelihood, AIC.
//! 4. [`recommend`]: normalise, weight and rank.
//!
//! [`experiment`] ties the phases together over a grid of datasets.

pub mod analysis;
pub mod evaluation;
pub mod experiment;
pub mod ingest;
pub mod learners;
pub mod recommend;
pub mod rng;
