use std::f64::consts::PI;

use num_complex::Complex64;

use super::frame::Window;

/// Precomputed forward DFT of one length. Powers of two use an iterative
/// radix-2 transform; other lengths go through Bluestein's chirp-z algorithm
/// on a power-of-two convolution.
#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    kind: PlanKind,
}

#[derive(Debug, Clone)]
enum PlanKind {
    Identity,
    Radix2 {
        twiddles: Vec<Complex64>,
        bitrev: Vec<usize>,
    },
    Bluestein {
        chirp: Vec<Complex64>,
        kernel: Vec<Complex64>,
        inner: Box<FftPlan>,
    },
}

fn unit_root(num: usize, den: usize) -> Complex64 {
    let angle = -2.0 * PI * num as f64 / den as f64;
    Complex64::new(angle.cos(), angle.sin())
}

impl FftPlan {
    pub fn new(len: usize) -> Self {
        let kind = if len <= 1 {
            PlanKind::Identity
        } else if len.is_power_of_two() {
            let bits = len.trailing_zeros();
            PlanKind::Radix2 {
                twiddles: (0..len / 2).map(|k| unit_root(k, len)).collect(),
                bitrev: (0..len)
                    .map(|i| i.reverse_bits() >> (usize::BITS - bits))
                    .collect(),
            }
        } else {
            let m = (2 * len - 1).next_power_of_two();
            let inner = FftPlan::new(m);
            // k^2 is reduced mod 2n so the chirp angle stays small and exact.
            let chirp: Vec<Complex64> = (0..len)
                .map(|k| {
                    let q = (k as u128 * k as u128 % (2 * len as u128)) as usize;
                    unit_root(q, 2 * len)
                })
                .collect();
            let mut kernel = vec![Complex64::new(0.0, 0.0); m];
            kernel[0] = chirp[0].conj();
            for k in 1..len {
                kernel[k] = chirp[k].conj();
                kernel[m - k] = chirp[k].conj();
            }
            inner.forward(&mut kernel);
            PlanKind::Bluestein {
                chirp,
                kernel,
                inner: Box::new(inner),
            }
        };
        Self { len, kind }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place forward transform `X_f = sum_n x_n e^{-2 pi i f n / N}`.
    pub fn forward(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len, "buffer length does not match plan");
        match &self.kind {
            PlanKind::Identity => {}
            PlanKind::Radix2 { twiddles, bitrev } => {
                for (i, &j) in bitrev.iter().enumerate() {
                    if i < j {
                        buf.swap(i, j);
                    }
                }
                let n = self.len;
                let mut half = 1;
                while half < n {
                    let stride = n / (2 * half);
                    for start in (0..n).step_by(2 * half) {
                        for k in 0..half {
                            let w = twiddles[k * stride];
                            let a = buf[start + k];
                            let b = buf[start + k + half] * w;
                            buf[start + k] = a + b;
                            buf[start + k + half] = a - b;
                        }
                    }
                    half *= 2;
                }
            }
            PlanKind::Bluestein {
                chirp,
                kernel,
                inner,
            } => {
                let m = inner.len();
                let mut work = vec![Complex64::new(0.0, 0.0); m];
                for (w, (x, c)) in work.iter_mut().zip(buf.iter().zip(chirp)) {
                    *w = x * c;
                }
                inner.forward(&mut work);
                for (w, k) in work.iter_mut().zip(kernel) {
                    *w *= k;
                }
                inner.inverse(&mut work);
                for (x, (w, c)) in buf.iter_mut().zip(work.iter().zip(chirp)) {
                    *x = w * c;
                }
            }
        }
    }

    /// In-place inverse transform, including the `1/N` factor.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        for v in buf.iter_mut() {
            *v = v.conj();
        }
        self.forward(buf);
        let scale = 1.0 / self.len.max(1) as f64;
        for v in buf.iter_mut() {
            *v = v.conj() * scale;
        }
    }
}

/// Forward DFT of a complex sequence of any length.
pub fn fft(input: &[Complex64]) -> Vec<Complex64> {
    let mut buf = input.to_vec();
    FftPlan::new(input.len()).forward(&mut buf);
    buf
}

/// One-sided power spectrum `|X_f|^2` for `f = 0..=F/2` of a real frame.
pub fn dft_magnitude_sq(frame: &[f64]) -> Vec<f64> {
    let mut buf: Vec<Complex64> = frame.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlan::new(frame.len()).forward(&mut buf);
    buf.truncate(frame.len() / 2 + 1);
    buf.iter().map(|c| c.norm_sqr()).collect()
}

/// Reusable windowed short-time spectrum for frames of a fixed length.
#[derive(Debug, Clone)]
pub struct Spectrum {
    plan: FftPlan,
    window: Vec<f64>,
    buf: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(frame_length: usize, window: Window) -> Self {
        Self {
            plan: FftPlan::new(frame_length),
            window: window.coefficients(frame_length),
            buf: vec![Complex64::new(0.0, 0.0); frame_length],
        }
    }

    pub fn bins(&self) -> usize {
        self.plan.len() / 2 + 1
    }

    fn transform(&mut self, raw_frame: &[f64]) {
        for ((b, &x), &w) in self.buf.iter_mut().zip(raw_frame).zip(&self.window) {
            *b = Complex64::new(x * w, 0.0);
        }
        self.plan.forward(&mut self.buf);
    }

    /// Windows `raw_frame` and writes its one-sided power spectrum into `out`.
    pub fn power_into(&mut self, raw_frame: &[f64], out: &mut [f64]) {
        self.transform(raw_frame);
        for (o, c) in out.iter_mut().zip(&self.buf) {
            *o = c.norm_sqr();
        }
    }

    /// Windows `raw_frame` and writes its one-sided magnitude spectrum into `out`.
    pub fn magnitude_into(&mut self, raw_frame: &[f64], out: &mut [f64]) {
        self.transform(raw_frame);
        for (o, c) in out.iter_mut().zip(&self.buf) {
            *o = c.norm();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn impulse_is_flat() {
        let mut frame = vec![0.0; 16];
        frame[0] = 1.0;
        assert!(dft_magnitude_sq(&frame).iter().all(|&p| (p - 1.0).abs() < 1e-15));
    }

    #[test]
    fn cosine_bin_power() {
        let n = 64;
        let frame: Vec<f64> = (0..n)
            .map(|i| (2.0 * PI * 4.0 * i as f64 / n as f64).cos())
            .collect();
        let p = dft_magnitude_sq(&frame);
        assert_eq!(p.len(), 33);
        assert!((p[4] - 1024.0).abs() < 1e-9);
        let leak: f64 = p.iter().enumerate().filter(|(i, _)| *i != 4).map(|(_, v)| v).sum();
        assert!(leak < 1e-18);
    }

    #[test]
    fn inverse_round_trip_odd_length() {
        let x: Vec<Complex64> = (0..23)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let plan = FftPlan::new(23);
        let mut buf = x.clone();
        plan.forward(&mut buf);
        plan.inverse(&mut buf);
        for (a, b) in x.iter().zip(&buf) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn degenerate_lengths() {
        assert!(fft(&[]).is_empty());
        let one = [Complex64::new(3.0, -1.0)];
        assert_eq!(fft(&one), one.to_vec());
        assert_eq!(dft_magnitude_sq(&[1.0, 1.0]), vec![4.0, 0.0]);
    }

    #[test]
    fn spectrum_helper_matches_free_function() {
        let frame: Vec<f64> = (0..32).map(|i| ((i * i) % 7) as f64 - 3.0).collect();
        let mut s = Spectrum::new(32, Window::Rectangular);
        let mut out = vec![0.0; s.bins()];
        s.power_into(&frame, &mut out);
        let direct = dft_magnitude_sq(&frame);
        for (a, b) in out.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
