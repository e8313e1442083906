use crate::error::{Error, Result};

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Unit-peak triangular filters on the mel scale, one row per filter and one
/// column per one-sided FFT bin.
#[derive(Debug, Clone, PartialEq)]
pub struct MelFilterbank {
    weights: Vec<Vec<f64>>,
    fmin_hz: f64,
    fmax_hz: f64,
}

impl MelFilterbank {
    pub fn num_filters(&self) -> usize {
        self.weights.len()
    }

    pub fn num_bins(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn fmin_hz(&self) -> f64 {
        self.fmin_hz
    }

    pub fn fmax_hz(&self) -> f64 {
        self.fmax_hz
    }

    /// Writes `sum_f power[f] * H_m(f)` for every filter into `out`.
    pub fn apply_into(&self, power: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.weights) {
            *o = row.iter().zip(power).map(|(w, p)| w * p).sum();
        }
    }
}

/// Builds `num_filters` triangles between `fmin_hz` and `fmax_hz` for an FFT of
/// `fft_len` points at `sample_rate_hz`.
///
/// The `num_filters + 2` edge points are equally spaced in mel; filter `m`
/// rises from point `m-1` to a peak of 1 at point `m` and falls to zero at
/// point `m+1`, sampled at the bin centres `bin * SR / F`.
pub fn build_mel_filterbank(
    num_filters: usize,
    fft_len: usize,
    sample_rate_hz: u32,
    fmin_hz: f64,
    fmax_hz: f64,
) -> Result<MelFilterbank> {
    let nyquist = sample_rate_hz as f64 / 2.0;
    if num_filters == 0 || fft_len < 2 {
        return Err(Error::config("filterbank needs at least one filter and two FFT points"));
    }
    if !(fmin_hz >= 0.0 && fmin_hz < fmax_hz && fmax_hz <= nyquist) {
        return Err(Error::config(format!(
            "mel range [{fmin_hz}, {fmax_hz}] Hz must satisfy 0 <= fmin < fmax <= {nyquist}"
        )));
    }

    let (lo, hi) = (hz_to_mel(fmin_hz), hz_to_mel(fmax_hz));
    let step = (hi - lo) / (num_filters + 1) as f64;
    let edges: Vec<f64> = (0..num_filters + 2)
        .map(|i| mel_to_hz(lo + step * i as f64))
        .collect();
    let bins = fft_len / 2 + 1;
    let bin_hz = sample_rate_hz as f64 / fft_len as f64;

    let mut weights = Vec::with_capacity(num_filters);
    for m in 1..=num_filters {
        let (left, centre, right) = (edges[m - 1], edges[m], edges[m + 1]);
        let row: Vec<f64> = (0..bins)
            .map(|b| {
                let f = b as f64 * bin_hz;
                if f < fmin_hz || f > fmax_hz || f <= left || f >= right {
                    0.0
                } else if f <= centre {
                    (f - left) / (centre - left)
                } else {
                    (right - f) / (right - centre)
                }
            })
            .collect();
        if row.iter().all(|&w| w == 0.0) {
            return Err(Error::config(format!(
                "mel filter {m} covers no FFT bin; use fewer filters or a longer FFT"
            )));
        }
        weights.push(row);
    }
    Ok(MelFilterbank {
        weights,
        fmin_hz,
        fmax_hz,
    })
}

/// Filterbank energies `sum_f power[f] * H_m(f)`.
pub fn apply_filterbank(power: &[f64], bank: &MelFilterbank) -> Result<Vec<f64>> {
    if power.len() != bank.num_bins() {
        return Err(Error::DimensionMismatch {
            expected: bank.num_bins(),
            actual: power.len(),
        });
    }
    let mut out = vec![0.0; bank.num_filters()];
    bank.apply_into(power, &mut out);
    Ok(out)
}
