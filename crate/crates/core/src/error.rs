use thiserror::Error;

use crate::field::Field;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{op}: zero argument is outside the domain")]
    ZeroArgument { op: &'static str },

    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: Field, right: Field },

    #[error("comparison undecidable at {bits} bits")]
    UndecidableAtPrecision { bits: u32 },

    #[error("place {place} does not belong to field {field}")]
    PlaceMismatch { place: String, field: Field },

    #[error("S must contain every archimedean place")]
    MissingArchimedeanPlaces,

    #[error("factorization out of range for {value}")]
    FactorizationOutOfRange { value: String },

    #[error("multiplicative relation detection unsupported: {0}")]
    RelationDetectionUnsupported(String),

    #[error("all terms of the recurrence cancelled (zero recurrence)")]
    ZeroRecurrence,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
