use crate::dsp::{frame_count, frames, Dct, FrameConfig, MelFilterbank, Spectrum, LOG_FLOOR};
use crate::error::{Error, Result};

/// Mean over frames of the MFCCs of one window.
///
/// Per frame: Hann-windowed power spectrum, mel filterbank energies, natural
/// log floored at [`LOG_FLOOR`], orthonormal DCT-II truncated to `n_mfcc`.
pub fn mfcc_segment(
    segment: &[f64],
    cfg: &FrameConfig,
    bank: &MelFilterbank,
    n_mfcc: usize,
) -> Result<Vec<f64>> {
    let dct = Dct::new(bank.num_filters(), n_mfcc)?;
    mfcc_with(segment, cfg, bank, &dct, LOG_FLOOR)
}

pub(crate) fn mfcc_with(
    segment: &[f64],
    cfg: &FrameConfig,
    bank: &MelFilterbank,
    dct: &Dct,
    log_floor: f64,
) -> Result<Vec<f64>> {
    let bins = cfg.frame_length / 2 + 1;
    if bank.num_bins() != bins {
        return Err(Error::DimensionMismatch {
            expected: bins,
            actual: bank.num_bins(),
        });
    }
    let count = frame_count(segment.len(), cfg)?;
    let mut spectrum = Spectrum::new(cfg.frame_length, cfg.window);
    let mut power = vec![0.0; bins];
    let mut energies = vec![0.0; bank.num_filters()];
    let mut coeffs = vec![0.0; dct.num_coeffs()];
    let mut sum = vec![0.0; dct.num_coeffs()];

    for frame in frames(segment, cfg)? {
        spectrum.power_into(frame, &mut power);
        bank.apply_into(&power, &mut energies);
        for e in energies.iter_mut() {
            *e = e.max(log_floor).ln();
        }
        dct.apply_into(&energies, &mut coeffs);
        for (s, c) in sum.iter_mut().zip(&coeffs) {
            *s += c;
        }
    }
    let j = count as f64;
    Ok(sum.into_iter().map(|s| s / j).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::build_mel_filterbank;
    use std::f64::consts::PI;

    fn setup() -> (FrameConfig, MelFilterbank) {
        let cfg = FrameConfig::default();
        let bank = build_mel_filterbank(40, 2048, 22050, 0.0, 11025.0).unwrap();
        (cfg, bank)
    }

    fn mixture(n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let t = i as f64 / 22050.0;
                0.4 * (2.0 * PI * 220.0 * t).sin()
                    + 0.3 * (2.0 * PI * 1375.0 * t).sin()
                    + 0.2 * (2.0 * PI * 5100.0 * t).sin()
                    // broadband floor so no filter sits at the log floor
                    + 0.05 * ((i * 7919 % 1000) as f64 / 500.0 - 1.0)
            })
            .collect()
    }

    #[test]
    fn silence_gives_floor_dc_only() {
        let (cfg, bank) = setup();
        let c = mfcc_segment(&vec![0.0; 8192], &cfg, &bank, 13).unwrap();
        assert_eq!(c.len(), 13);
        assert!((c[0] - LOG_FLOOR.ln() * 40f64.sqrt()).abs() < 1e-9);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn amplitude_scaling_shifts_only_c0() {
        let (cfg, bank) = setup();
        let x = mixture(22050);
        let alpha: f64 = 3.7;
        let scaled: Vec<f64> = x.iter().map(|v| alpha * v).collect();
        let a = mfcc_segment(&x, &cfg, &bank, 13).unwrap();
        let b = mfcc_segment(&scaled, &cfg, &bank, 13).unwrap();
        let shift = 40f64.sqrt() * (alpha * alpha).ln();
        assert!((b[0] - a[0] - shift).abs() < 1e-6);
        for k in 1..13 {
            assert!((b[k] - a[k]).abs() < 1e-6, "coefficient {k}");
        }
    }

    #[test]
    fn deterministic() {
        let (cfg, bank) = setup();
        let x = mixture(10_000);
        assert_eq!(
            mfcc_segment(&x, &cfg, &bank, 13).unwrap(),
            mfcc_segment(&x, &cfg, &bank, 13).unwrap()
        );
    }

    #[test]
    fn too_short_or_mismatched() {
        let (cfg, bank) = setup();
        assert!(matches!(
            mfcc_segment(&[0.0; 100], &cfg, &bank, 13),
            Err(Error::SignalTooShort { .. })
        ));
        let small = build_mel_filterbank(10, 512, 22050, 0.0, 11025.0).unwrap();
        assert!(mfcc_segment(&[0.0; 4096], &cfg, &small, 13).is_err());
    }
}
