use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("node {label:?} has degree 0; reduce to the largest connected component first")]
    ZeroDegree { label: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite gradient at node {node}")]
    NonFinite { node: usize },

    #[error("{family} loss is singular at distance 0")]
    Singular { family: &'static str },

    #[error("GIRG calibration failed: {0}")]
    Calibration(String),

    #[error("node label {label:?} present in {present_in} but missing from {missing_from}")]
    LabelMismatch {
        label: String,
        present_in: &'static str,
        missing_from: &'static str,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}
