//! File-backed plumbing for INRV volumes and INRC artifacts.

use std::path::Path;

use trackinr_core::codec::{CodecError, CompressedArtifact};
use trackinr_core::volume::{FormatError, Volume3D};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    VolumeFormat { path: String, source: FormatError },
    #[error("{path}: {source}")]
    ArtifactFormat { path: String, source: CodecError },
}

fn file_err(path: &Path, source: std::io::Error) -> IoError {
    IoError::File {
        path: path.display().to_string(),
        source,
    }
}

pub fn load_volume(path: &Path) -> Result<Volume3D, IoError> {
    let bytes = std::fs::read(path).map_err(|e| file_err(path, e))?;
    Volume3D::decode(&bytes).map_err(|source| IoError::VolumeFormat {
        path: path.display().to_string(),
        source,
    })
}

pub fn save_volume(volume: &Volume3D, path: &Path) -> Result<(), IoError> {
    std::fs::write(path, volume.encode()).map_err(|e| file_err(path, e))
}

pub fn load_artifact(path: &Path) -> Result<CompressedArtifact, IoError> {
    let bytes = std::fs::read(path).map_err(|e| file_err(path, e))?;
    CompressedArtifact::decode(&bytes).map_err(|source| IoError::ArtifactFormat {
        path: path.display().to_string(),
        source,
    })
}

pub fn save_artifact(artifact: &CompressedArtifact, path: &Path) -> Result<(), IoError> {
    std::fs::write(path, artifact.encode()).map_err(|e| file_err(path, e))
}
