use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    Rectangular,
    Hann,
}

impl Window {
    /// Periodic window coefficients of length `n`.
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            Window::Hann => (0..n)
                .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FrameConfig {
    pub frame_length: usize,
    pub hop_length: usize,
    pub window: Window,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            frame_length: 2048,
            hop_length: 512,
            window: Window::Hann,
        }
    }
}

impl FrameConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hop_length == 0 || self.hop_length > self.frame_length {
            return Err(Error::config(format!(
                "hop length {} must be in 1..={}",
                self.hop_length, self.frame_length
            )));
        }
        Ok(())
    }
}

/// `J = floor((len - F) / H) + 1`, or an error when `len < F`.
pub fn frame_count(len: usize, cfg: &FrameConfig) -> Result<usize> {
    cfg.validate()?;
    if len < cfg.frame_length {
        return Err(Error::SignalTooShort {
            len,
            frame_length: cfg.frame_length,
        });
    }
    Ok((len - cfg.frame_length) / cfg.hop_length + 1)
}

/// Unwindowed frames `x[j*H .. j*H + F]`, borrowed from the signal.
pub fn frames<'a>(x: &'a [f64], cfg: &FrameConfig) -> Result<impl Iterator<Item = &'a [f64]> + 'a> {
    let count = frame_count(x.len(), cfg)?;
    let (f, h) = (cfg.frame_length, cfg.hop_length);
    Ok((0..count).map(move |j| &x[j * h..j * h + f]))
}

/// All frames with the window applied, as a `J x F` row-major matrix.
pub fn frame_signal(x: &[f64], cfg: &FrameConfig) -> Result<Vec<Vec<f64>>> {
    let window = cfg.window.coefficients(cfg.frame_length);
    Ok(frames(x, cfg)?
        .map(|fr| fr.iter().zip(&window).map(|(a, w)| a * w).collect())
        .collect())
}
