//! Zero-crossing rate and temporal centroid of a few simple signals.

use std::f64::consts::PI;

use coverlens::features::{temporal_centroid, zero_crossing_rate};

fn main() {
    let sr = 22_050;
    let sine = |f: f64| -> Vec<f64> { (0..sr).map(|i| (2.0 * PI * f * i as f64 / sr as f64).sin()).collect() };
    let mut late = vec![0.0; sr as usize];
    late[sr as usize * 3 / 4..].iter_mut().for_each(|v| *v = 0.5);

    for (name, x) in [("100 Hz", sine(100.0)), ("1 kHz", sine(1000.0)), ("late burst", late)] {
        println!(
            "{name:<10} zcr {:.5}  centroid {:.3} s",
            zero_crossing_rate(&x),
            temporal_centroid(&x, sr)
        );
    }
}
