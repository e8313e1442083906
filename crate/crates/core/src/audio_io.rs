//! WAV ingestion, export and sample-rate conversion.
//!
//! Everything downstream works on mono `f64` signals at one sample rate, so the
//! reader normalizes integer PCM to `[-1, 1]` and downmixes channels by their
//! arithmetic mean. Integer codes are divided by `2^(bits-1)`, which maps the
//! most negative code to exactly `-1.0`.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

const FORMAT_PCM: u16 = 0x0001;
const FORMAT_IEEE_FLOAT: u16 = 0x0003;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

/// A mono signal and its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl AudioClip {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz == 0 {
            return Err(Error::InvalidClip("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidClip(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }
}

/// Sample encodings supported by [`write_wav`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Int16,
    Float32,
}

#[derive(Debug, Clone, Copy)]
struct WavFormat {
    format_tag: u16,
    channels: u16,
    sample_rate: u32,
    block_align: u16,
    bits: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SampleCodec {
    UInt8,
    Int16,
    Int24,
    Int32,
    Float32,
    Float64,
}

impl WavFormat {
    fn codec(&self) -> Result<SampleCodec> {
        let unsupported = Error::UnsupportedCodec {
            format_tag: self.format_tag,
            bits: self.bits,
        };
        match (self.format_tag, self.bits) {
            (FORMAT_PCM, 8) => Ok(SampleCodec::UInt8),
            (FORMAT_PCM, 16) => Ok(SampleCodec::Int16),
            (FORMAT_PCM, 24) => Ok(SampleCodec::Int24),
            (FORMAT_PCM, 32) => Ok(SampleCodec::Int32),
            (FORMAT_IEEE_FLOAT, 32) => Ok(SampleCodec::Float32),
            (FORMAT_IEEE_FLOAT, 64) => Ok(SampleCodec::Float64),
            _ => Err(unsupported),
        }
    }
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

fn parse_fmt(body: &[u8]) -> Result<WavFormat> {
    if body.len() < 16 {
        return Err(Error::MalformedWav(format!(
            "fmt chunk is {} bytes, need at least 16",
            body.len()
        )));
    }
    let mut format_tag = u16_at(body, 0);
    let bits = u16_at(body, 14);
    if format_tag == FORMAT_EXTENSIBLE {
        // cbSize(2) validBits(2) channelMask(4) then the sub-format GUID whose
        // first two bytes carry the real format tag.
        if body.len() < 40 {
            return Err(Error::MalformedWav(
                "WAVE_FORMAT_EXTENSIBLE fmt chunk is truncated".into(),
            ));
        }
        format_tag = u16_at(body, 24);
    }
    let fmt = WavFormat {
        format_tag,
        channels: u16_at(body, 2),
        sample_rate: u32_at(body, 4),
        block_align: u16_at(body, 12),
        bits,
    };
    if fmt.channels == 0 {
        return Err(Error::MalformedWav("zero channels".into()));
    }
    if fmt.sample_rate == 0 {
        return Err(Error::MalformedWav("zero sample rate".into()));
    }
    Ok(fmt)
}

/// Parses an in-memory RIFF/WAVE image. See [`read_wav`].
pub fn decode_wav(bytes: &[u8]) -> Result<AudioClip> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::MalformedWav("missing RIFF/WAVE signature".into()));
    }

    let mut format = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body_start = pos + 8;
        let available = bytes.len() - body_start;
        match id {
            b"fmt " => {
                if size > available {
                    return Err(Error::MalformedWav("fmt chunk runs past end of file".into()));
                }
                format = Some(parse_fmt(&bytes[body_start..body_start + size])?);
            }
            b"data" => {
                // Streaming writers sometimes leave the size unset; take what exists.
                let size = size.min(available);
                data = Some(&bytes[body_start..body_start + size]);
            }
            _ => {}
        }
        pos = body_start.saturating_add(size).saturating_add(size & 1);
    }

    let format = format.ok_or_else(|| Error::MalformedWav("no fmt chunk".into()))?;
    let data = data.ok_or_else(|| Error::MalformedWav("no data chunk".into()))?;
    let codec = format.codec()?;

    let width = (format.bits / 8) as usize;
    let channels = format.channels as usize;
    if format.block_align as usize != width * channels {
        return Err(Error::MalformedWav(format!(
            "block align {} does not match {} channels of {} bits",
            format.block_align, channels, format.bits
        )));
    }
    let frame_bytes = width * channels;
    let frames = data.len() / frame_bytes;

    let decode = |b: &[u8]| -> f64 {
        match codec {
            SampleCodec::UInt8 => (b[0] as f64 - 128.0) / 128.0,
            SampleCodec::Int16 => i16::from_le_bytes([b[0], b[1]]) as f64 / 32_768.0,
            SampleCodec::Int24 => {
                let v = i32::from_le_bytes([0, b[0], b[1], b[2]]) >> 8;
                v as f64 / 8_388_608.0
            }
            SampleCodec::Int32 => {
                i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64 / 2_147_483_648.0
            }
            SampleCodec::Float32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            SampleCodec::Float64 => {
                let mut a = [0u8; 8];
                a.copy_from_slice(&b[..8]);
                f64::from_le_bytes(a)
            }
        }
    };

    let mut samples = Vec::with_capacity(frames);
    for frame in data[..frames * frame_bytes].chunks_exact(frame_bytes) {
        let sum: f64 = frame.chunks_exact(width).map(decode).sum();
        samples.push(sum / channels as f64);
    }
    AudioClip::new(samples, format.sample_rate)
}

/// Reads a PCM or IEEE-float RIFF/WAVE file into a mono clip.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_wav(&bytes)
}

/// Serializes a clip as a mono RIFF/WAVE image.
pub fn encode_wav(clip: &AudioClip, depth: BitDepth) -> Vec<u8> {
    let (format_tag, bits) = match depth {
        BitDepth::Int16 => (FORMAT_PCM, 16u16),
        BitDepth::Float32 => (FORMAT_IEEE_FLOAT, 32u16),
    };
    let width = (bits / 8) as u32;
    let data_len = clip.len() as u32 * width;

    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&format_tag.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&clip.sample_rate_hz.to_le_bytes());
    out.extend_from_slice(&(clip.sample_rate_hz * width).to_le_bytes());
    out.extend_from_slice(&(width as u16).to_le_bytes());
    out.extend_from_slice(&bits.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &s in &clip.samples {
        match depth {
            BitDepth::Int16 => {
                let code = (s.clamp(-1.0, 1.0) * 32_768.0)
                    .round()
                    .clamp(i16::MIN as f64, i16::MAX as f64) as i16;
                out.extend_from_slice(&code.to_le_bytes());
            }
            BitDepth::Float32 => out.extend_from_slice(&(s as f32).to_le_bytes()),
        }
    }
    out
}

pub fn write_wav(clip: &AudioClip, path: impl AsRef<Path>, depth: BitDepth) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_wav(clip, depth);
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&bytes).map_err(|e| Error::io(path, e))
}

/// Taps per polyphase branch of the resampling filter.
pub const RESAMPLER_TAPS: usize = 32;
/// Kaiser window shape parameter of the resampling filter.
pub const RESAMPLER_KAISER_BETA: f64 = 8.0;
/// Above this many phases the filter is evaluated on the fly instead of tabulated.
const MAX_TABULATED_PHASES: usize = 4096;

/// Zeroth-order modified Bessel function of the first kind, by power series.
fn bessel_i0(x: f64) -> f64 {
    let half_sq = (x / 2.0) * (x / 2.0);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= half_sq / (k as f64 * k as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Low-pass interpolation kernel: Kaiser-windowed sinc with `cutoff` in units
/// of the input Nyquist, evaluated at `t` input samples from the centre.
struct SincKernel {
    cutoff: f64,
    half_width: f64,
    norm: f64,
}

impl SincKernel {
    fn new(cutoff: f64) -> Self {
        Self {
            cutoff,
            half_width: RESAMPLER_TAPS as f64 / 2.0,
            norm: bessel_i0(RESAMPLER_KAISER_BETA),
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let r = t / self.half_width;
        if r.abs() >= 1.0 {
            return 0.0;
        }
        let arg = PI * self.cutoff * t;
        let sinc = if arg.abs() < 1e-12 { 1.0 } else { arg.sin() / arg };
        let window = bessel_i0(RESAMPLER_KAISER_BETA * (1.0 - r * r).sqrt()) / self.norm;
        self.cutoff * sinc * window
    }

    /// Taps for an output sample sitting `frac` (in `[0,1)`) past input index
    /// `base`; tap `t` multiplies input `base + t - (TAPS/2 - 1)`.
    fn taps(&self, frac: f64, out: &mut [f64]) {
        let offset = RESAMPLER_TAPS as isize / 2 - 1;
        for (t, w) in out.iter_mut().enumerate() {
            let pos = t as isize - offset;
            *w = self.eval(pos as f64 - frac);
        }
    }
}

/// Converts a clip to `target_rate_hz` by polyphase windowed-sinc interpolation.
///
/// The output has `round(len * target / source)` samples. When downsampling the
/// filter cutoff follows the target Nyquist, so content above it is attenuated
/// rather than aliased.
pub fn resample(clip: &AudioClip, target_rate_hz: u32) -> Result<AudioClip> {
    if target_rate_hz == 0 {
        return Err(Error::config("target sample rate must be positive"));
    }
    let source = clip.sample_rate_hz as u64;
    let target = target_rate_hz as u64;
    if source == target {
        return Ok(clip.clone());
    }

    let out_len = ((clip.len() as u128 * target as u128 + source as u128 / 2) / source as u128) as usize;
    let g = gcd(source, target);
    let (step, phases) = (source / g, target / g);
    let kernel = SincKernel::new((target as f64 / source as f64).min(1.0));

    let table: Option<Vec<[f64; RESAMPLER_TAPS]>> = (phases as usize <= MAX_TABULATED_PHASES)
        .then(|| {
            (0..phases)
                .map(|p| {
                    let mut row = [0.0; RESAMPLER_TAPS];
                    kernel.taps(p as f64 / phases as f64, &mut row);
                    row
                })
                .collect()
        });

    let input = clip.samples();
    let n_in = input.len() as isize;
    let offset = RESAMPLER_TAPS as isize / 2 - 1;
    let mut scratch = [0.0; RESAMPLER_TAPS];
    let mut out = Vec::with_capacity(out_len);
    for n in 0..out_len as u64 {
        let num = n * step;
        let base = (num / phases) as isize;
        let phase = num % phases;
        let taps: &[f64; RESAMPLER_TAPS] = match &table {
            Some(t) => &t[phase as usize],
            None => {
                kernel.taps(phase as f64 / phases as f64, &mut scratch);
                &scratch
            }
        };
        let mut acc = 0.0;
        for (t, w) in taps.iter().enumerate() {
            let idx = base + t as isize - offset;
            if idx >= 0 && idx < n_in {
                acc += w * input[idx as usize];
            }
        }
        out.push(acc);
    }
    AudioClip::new(out, target_rate_hz)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wav_with(format_tag: u16, channels: u16, bits: u16, data: &[u8]) -> Vec<u8> {
        let width = bits / 8;
        let mut b = Vec::new();
        b.extend_from_slice(b"RIFF");
        b.extend_from_slice(&(36 + data.len() as u32).to_le_bytes());
        b.extend_from_slice(b"WAVE");
        b.extend_from_slice(b"fmt ");
        b.extend_from_slice(&16u32.to_le_bytes());
        b.extend_from_slice(&format_tag.to_le_bytes());
        b.extend_from_slice(&channels.to_le_bytes());
        b.extend_from_slice(&8000u32.to_le_bytes());
        b.extend_from_slice(&(8000 * (width * channels) as u32).to_le_bytes());
        b.extend_from_slice(&(width * channels).to_le_bytes());
        b.extend_from_slice(&bits.to_le_bytes());
        b.extend_from_slice(b"data");
        b.extend_from_slice(&(data.len() as u32).to_le_bytes());
        b.extend_from_slice(data);
        b
    }

    #[test]
    fn int16_normalization() {
        let data: Vec<u8> = [0i16, 16384, -32768]
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect();
        let clip = decode_wav(&wav_with(1, 1, 16, &data)).unwrap();
        assert_eq!(clip.samples(), &[0.0, 0.5, -1.0]);
        assert_eq!(clip.sample_rate_hz(), 8000);
    }

    #[test]
    fn other_integer_depths() {
        let clip = decode_wav(&wav_with(1, 1, 8, &[128, 255, 0])).unwrap();
        assert_eq!(clip.samples(), &[0.0, 127.0 / 128.0, -1.0]);

        let data = [0x00, 0x00, 0x80, 0x00, 0x00, 0x40];
        let clip = decode_wav(&wav_with(1, 1, 24, &data)).unwrap();
        assert_eq!(clip.samples(), &[-1.0, 0.5]);

        let data: Vec<u8> = [i32::MIN, 1 << 30].iter().flat_map(|v| v.to_le_bytes()).collect();
        let clip = decode_wav(&wav_with(1, 1, 32, &data)).unwrap();
        assert_eq!(clip.samples(), &[-1.0, 0.5]);
    }

    #[test]
    fn float64_is_read() {
        let data: Vec<u8> = [0.25f64, -0.75].iter().flat_map(|v| v.to_le_bytes()).collect();
        let clip = decode_wav(&wav_with(3, 1, 64, &data)).unwrap();
        assert_eq!(clip.samples(), &[0.25, -0.75]);
    }

    #[test]
    fn stereo_downmix_is_channel_mean() {
        let data: Vec<u8> = [1000i16, 1000, -2000, -2000, 4000, 0]
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect();
        let clip = decode_wav(&wav_with(1, 2, 16, &data)).unwrap();
        assert_eq!(
            clip.samples(),
            &[1000.0 / 32768.0, -2000.0 / 32768.0, 2000.0 / 32768.0]
        );
    }

    #[test]
    fn distinct_errors() {
        assert!(matches!(
            decode_wav(b"RIFX\0\0\0\0WAVE"),
            Err(Error::MalformedWav(_))
        ));
        assert!(matches!(
            decode_wav(&wav_with(2, 1, 16, &[0, 0])),
            Err(Error::UnsupportedCodec { format_tag: 2, .. })
        ));
        assert!(matches!(
            decode_wav(&wav_with(1, 1, 12, &[0, 0])),
            Err(Error::UnsupportedCodec { .. })
        ));
        let mut no_data = wav_with(1, 1, 16, &[]);
        no_data.truncate(36);
        assert!(matches!(decode_wav(&no_data), Err(Error::MalformedWav(_))));
        assert!(matches!(
            read_wav("/definitely/not/here.wav"),
            Err(Error::MissingFile(_))
        ));
    }

    #[test]
    fn int16_write_clamps() {
        let clip = AudioClip::new(vec![1.5, -3.0, 0.25], 22050).unwrap();
        let back = decode_wav(&encode_wav(&clip, BitDepth::Int16)).unwrap();
        assert!((back.samples()[0] - 1.0).abs() <= 1.0 / 32768.0);
        assert_eq!(back.samples()[1], -1.0);
        assert_eq!(back.samples()[2], 0.25);
    }

    #[test]
    fn empty_clip_round_trips() {
        let clip = AudioClip::new(vec![], 22050).unwrap();
        let bytes = encode_wav(&clip, BitDepth::Float32);
        assert_eq!(bytes.len(), 44);
        let back = decode_wav(&bytes).unwrap();
        assert!(back.is_empty());
        assert_eq!(back.sample_rate_hz(), 22050);
    }

    #[test]
    fn clip_invariants() {
        assert!(AudioClip::new(vec![0.0], 0).is_err());
        assert!(AudioClip::new(vec![f64::NAN], 8000).is_err());
    }

    #[test]
    fn identity_resample() {
        let clip = AudioClip::new(vec![0.1, -0.2, 0.3], 22050).unwrap();
        assert_eq!(resample(&clip, 22050).unwrap(), clip);
        assert!(resample(&clip, 0).is_err());
    }

    #[test]
    fn resampled_length_follows_rate_ratio() {
        let clip = AudioClip::new(vec![0.0; 96_000], 48_000).unwrap();
        let out = resample(&clip, 22_050).unwrap();
        assert!((out.len() as i64 - 44_100).abs() <= 1);
        let odd = AudioClip::new(vec![0.0; 1001], 44_100).unwrap();
        assert_eq!(resample(&odd, 22_050).unwrap().len(), 501);
    }

    #[test]
    fn dc_gain_is_unity() {
        let clip = AudioClip::new(vec![0.5; 4000], 44_100).unwrap();
        let out = resample(&clip, 22_050).unwrap();
        for s in &out.samples()[100..out.len() - 100] {
            assert!((s - 0.5).abs() < 1e-3, "{s}");
        }
        let up = resample(&AudioClip::new(vec![0.5; 4000], 16_000).unwrap(), 22_050).unwrap();
        for s in &up.samples()[100..up.len() - 100] {
            assert!((s - 0.5).abs() < 1e-3, "{s}");
        }
    }

    #[test]
    fn bessel_reference_values() {
        assert_eq!(bessel_i0(0.0), 1.0);
        // I0(1) and I0(8) from standard tables.
        assert!((bessel_i0(1.0) - 1.266_065_877_752_008_4).abs() < 1e-14);
        assert!((bessel_i0(8.0) - 427.564_115_721_804_7).abs() < 1e-9);
    }
}
