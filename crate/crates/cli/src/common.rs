//! Shared plumbing: error-to-exit-code mapping, directory listing, pair
//! matching.

use std::fmt;
use std::path::{Path, PathBuf};

use degrade_core::imageio::{load_image, Image};
use degrade_core::resample::resize_catmull_rom;

/// Exit taxonomy: 0 clean, 1 partial or degraded result, 2 bad
/// configuration or arguments, 3 filesystem or codec failure.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<degrade_core::Error> for CliError {
    fn from(e: degrade_core::Error) -> Self {
        use degrade_core::Error;
        match e {
            Error::Io(_) | Error::Codec(_) => CliError::Io(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Whether the whole command succeeded or limped through some inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Clean,
    Partial,
}

pub type CmdResult = Result<Outcome, CliError>;

const IMAGE_EXTENSIONS: [&str; 3] = ["png", "pgm", "ppm"];

/// Image files directly inside `dir`, sorted by name for stable ordering.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !dir.is_dir() {
        return Err(CliError::Config(format!(
            "{} is not a directory",
            dir.display()
        )));
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .map(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
                    .unwrap_or(false)
        })
        .collect();
    files.sort();
    Ok(files)
}

pub fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Finds the file in `dir` sharing `reference`'s name, trying the same
/// extension first and then the other supported ones.
pub fn matching_file(dir: &Path, reference: &Path) -> Option<PathBuf> {
    let name = reference.file_name()?;
    let direct = dir.join(name);
    if direct.is_file() {
        return Some(direct);
    }
    let stem = reference.file_stem()?.to_str()?;
    IMAGE_EXTENSIONS
        .iter()
        .map(|ext| dir.join(format!("{stem}.{ext}")))
        .find(|p| p.is_file())
}

/// Loads a pair and brings the degraded side onto the sharp side's grid.
pub fn load_matched_pair(
    hr_path: &Path,
    lr_path: &Path,
) -> Result<(Image, Image), degrade_core::Error> {
    let hr = load_image(hr_path)?;
    let lr = load_image(lr_path)?;
    let lr = if lr.width() != hr.width() || lr.height() != hr.height() {
        resize_catmull_rom(&lr, hr.width(), hr.height())?
    } else {
        lr
    };
    Ok((hr, lr))
}

/// Parses a JSON config file into any deserializable type; a malformed
/// file is a configuration error, an unreadable one an I/O error.
pub fn load_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("cannot serialize: {e}")))?;
    std::fs::write(path, text + "\n")
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn ensure_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))
}
