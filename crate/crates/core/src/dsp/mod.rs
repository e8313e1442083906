//! Spectral building blocks shared by the feature maps: framing and
//! windowing, FFT power spectra, the mel filterbank, log compression and the
//! orthonormal DCT-II.

mod dct;
mod fft;
mod frame;
mod mel;

pub use dct::{dct_ii, Dct};
pub use fft::{dft_magnitude_sq, fft, FftPlan, Spectrum};
pub use frame::{frame_count, frame_signal, frames, FrameConfig, Window};
pub use mel::{apply_filterbank, build_mel_filterbank, hz_to_mel, mel_to_hz, MelFilterbank};

/// Default floor applied before taking logarithms of filterbank energies.
pub const LOG_FLOOR: f64 = 1e-10;

/// Natural log of each energy after flooring at `floor_eps`.
pub fn log_energies(energies: &[f64], floor_eps: f64) -> Vec<f64> {
    energies.iter().map(|&e| e.max(floor_eps).ln()).collect()
}
