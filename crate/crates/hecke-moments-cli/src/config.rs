//! Plain `key = value` configuration, read from the file named by `HECKE_MOMENTS_CONFIG`.
//! Command-line flags override anything set here.

use hecke_moments::transforms::DEFAULT_Q_CONSTANT;

pub const CONFIG_ENV: &str = "HECKE_MOMENTS_CONFIG";

#[derive(Clone, Debug)]
pub struct Config {
    pub digits: u32,
    pub rel_tol: Option<f64>,
    pub series_cutoff: usize,
    /// Default weight width when `--width` is absent.
    pub width: Option<f64>,
    /// Constant in the rational damping factor of the Kuznetsov weight.
    pub q_constant: f64,
    /// `c` in `lambda = c log K` for the main terms.
    pub lambda_constant: f64,
    pub timing: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            digits: 50,
            rel_tol: None,
            series_cutoff: 10_000,
            width: None,
            q_constant: DEFAULT_Q_CONSTANT,
            lambda_constant: 2.0,
            timing: true,
        }
    }
}

impl Config {
    pub fn from_env() -> Result<Self, String> {
        match std::env::var_os(CONFIG_ENV) {
            None => Ok(Config::default()),
            Some(path) => {
                let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {}", path.to_string_lossy(), e))?;
                Config::parse(&text)
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "digits" => c.digits = value(v, k, i)?,
                "rel_tol" => c.rel_tol = Some(value(v, k, i)?),
                "series_cutoff" => c.series_cutoff = value(v, k, i)?,
                "width" => c.width = Some(value(v, k, i)?),
                "q_constant" => c.q_constant = value(v, k, i)?,
                "lambda_constant" => c.lambda_constant = value(v, k, i)?,
                "timing" => c.timing = value(v, k, i)?,
                _ => return Err(format!("config line {}: unknown key '{}'", i + 1, k)),
            }
        }
        Ok(c)
    }
}

fn value<T: std::str::FromStr>(v: &str, k: &str, i: usize) -> Result<T, String> {
    v.parse().map_err(|_| format!("config line {}: bad value '{}' for {}", i + 1, v, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_and_comments() {
        let c = Config::parse("# run settings\ndigits = 60\nq_constant=1000 # larger damping\n\ntiming = false\n").unwrap();
        assert_eq!(c.digits, 60);
        assert_eq!(c.q_constant, 1000.0);
        assert!(!c.timing);
        assert_eq!(c.series_cutoff, 10_000);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Config::parse("digts = 60").is_err());
        assert!(Config::parse("digits = many").is_err());
        assert!(Config::parse("digits").is_err());
    }
}
