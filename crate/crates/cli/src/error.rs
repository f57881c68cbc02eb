use std::fmt;

use landfall_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Synth,
    Ingest,
    Score,
    Stats,
    Fit,
    Lexshift,
    Report,
    Manifest,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Config => "config",
            Stage::Synth => "synth",
            Stage::Ingest => "ingest",
            Stage::Score => "score",
            Stage::Stats => "stats",
            Stage::Fit => "fit",
            Stage::Lexshift => "lexshift",
            Stage::Report => "report",
            Stage::Manifest => "manifest",
        };
        f.write_str(s)
    }
}

/// Failure class, which fixes the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Fit,
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> u8 {
        match self {
            ErrorKind::Config => 2,
            ErrorKind::Data => 3,
            ErrorKind::Fit => 4,
            ErrorKind::Internal => 5,
        }
    }
}

#[derive(Debug, Error)]
#[error("{stage}: {message}")]
pub struct CliError {
    pub stage: Stage,
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn new(stage: Stage, kind: ErrorKind, message: impl Into<String>) -> Self {
        CliError {
            stage,
            kind,
            message: message.into(),
        }
    }

    pub fn config(stage: Stage, message: impl Into<String>) -> Self {
        Self::new(stage, ErrorKind::Config, message)
    }

    pub fn data(stage: Stage, message: impl Into<String>) -> Self {
        Self::new(stage, ErrorKind::Data, message)
    }

    pub fn internal(stage: Stage, message: impl Into<String>) -> Self {
        Self::new(stage, ErrorKind::Internal, message)
    }

    pub fn core(stage: Stage, err: CoreError) -> Self {
        let kind = match &err {
            CoreError::Config(_) | CoreError::Resource { .. } => ErrorKind::Config,
            CoreError::Io { .. }
            | CoreError::OutsideWindow(_)
            | CoreError::Degenerate(_)
            | CoreError::InsufficientData { .. } => ErrorKind::Data,
            CoreError::UndefinedHalfLife(_) | CoreError::Fit(_) => ErrorKind::Fit,
        };
        Self::new(stage, kind, err.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        self.kind.exit_code()
    }
}

pub type CliResult<T> = Result<T, CliError>;
