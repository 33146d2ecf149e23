//! Flat key=value configuration with command-line overrides.
//!
//! Precedence, lowest to highest: scenario defaults, `--config FILE`,
//! repeated `--set key=value`, `--out DIR`.

use std::fmt;
use std::path::Path;

/// Failures are split by exit code: configuration problems exit with 1,
/// numerical pipeline failures with 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Pipeline {
        stage: &'static str,
        message: String,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Pipeline { .. } => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Pipeline { stage, message } => {
                write!(f, "pipeline failure at stage '{stage}': {message}")
            }
        }
    }
}

impl std::error::Error for CliError {}

/// Numeric overrides accepted by every scenario. `None` means "use the
/// scenario default".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub l: Option<f64>,
    pub block: Option<usize>,
    pub t_max: Option<f64>,
    pub points: Option<usize>,
    pub eps: Option<f64>,
}

impl Overrides {
    /// Apply one `key=value` assignment.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "n" => self.n = Some(parse_usize(key, value)?),
            "L" => self.l = Some(parse_f64(key, value)?),
            "N" => self.block = Some(parse_usize(key, value)?),
            "t_max" => self.t_max = Some(parse_f64(key, value)?),
            "points" => self.points = Some(parse_usize(key, value)?),
            "eps" => self.eps = Some(parse_f64(key, value)?),
            other => {
                return Err(CliError::config(format!(
                    "unknown configuration key '{other}' (known: n, L, N, t_max, points, eps)"
                )))
            }
        }
        Ok(())
    }

    pub fn apply_assignment(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("expected key=value, got '{assignment}'")))?;
        self.apply(key.trim(), value.trim())
    }

    /// Parse a flat key=value file; '#' starts a comment, blank lines are
    /// ignored.
    pub fn load_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            self.apply_assignment(line)
                .map_err(|e| CliError::config(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        }
        Ok(())
    }
}

fn parse_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value.parse::<usize>().map_err(|_| {
        CliError::config(format!(
            "key '{key}' expects a positive integer, got '{value}'"
        ))
    })
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    let x = value
        .parse::<f64>()
        .map_err(|_| CliError::config(format!("key '{key}' expects a number, got '{value}'")))?;
    if !x.is_finite() {
        return Err(CliError::config(format!(
            "key '{key}' expects a finite number, got '{value}'"
        )));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignments_parse_and_unknown_keys_fail() {
        let mut o = Overrides::default();
        o.apply_assignment("n=250").unwrap();
        o.apply_assignment("L = 12.5").unwrap();
        assert_eq!(o.n, Some(250));
        assert_eq!(o.l, Some(12.5));
        assert!(o.apply_assignment("bogus=1").is_err());
        assert!(o.apply_assignment("n").is_err());
        assert!(o.apply_assignment("n=-3").is_err());
    }

    #[test]
    fn config_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("semilab-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "# comment\nn=80\n\npoints = 6 # trailing\n").unwrap();
        let mut o = Overrides::default();
        o.load_file(&path).unwrap();
        assert_eq!(o.n, Some(80));
        assert_eq!(o.points, Some(6));
        std::fs::remove_dir_all(&dir).ok();
    }
}
