use std::path::PathBuf;

use thiserror::Error;

use crate::csg::Canvas;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("scene format: {0}")]
    SceneFormat(String),
    #[error("invalid canvas {width}x{height}")]
    InvalidCanvas { width: u16, height: u16 },
    #[error("invalid canvas spec {0:?}, expected WxH")]
    InvalidCanvasSpec(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: Canvas, right: Canvas },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("synthesis stopped: {0}")]
    Stopped(crate::budget::Failure),
    #[error("gave up after {attempts} attempts: {reason}")]
    GaveUp { attempts: usize, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
