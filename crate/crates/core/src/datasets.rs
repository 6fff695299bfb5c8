//! Seeded synthetic series standing in for public benchmark data.
//!
//! Each generator mimics the character of a family of real recordings
//! (sensor plateaus, periodic beats, gusty wind, slowly drifting pressure)
//! and rounds to the precision such recordings typically carry.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::model::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Smooth outline curves.
    FaceFour,
    /// Sensor plateaus with jumps.
    MoteStrain,
    /// Quiet baseline with sharp bursts.
    Lightning,
    /// Oscillating accelerometer trace.
    Cricket,
    /// Two-level process with transitions.
    Wafer,
    /// Periodic heart beats.
    Ecg,
    /// Slow drift with long constant stretches.
    Pressure,
    /// Gusty non-negative wind speed, two decimals.
    WindSpeed,
    /// Wrapped random walk in degrees, two decimals.
    WindDirection,
    /// Piecewise-linear trend plus Gaussian noise, two decimals.
    PlaNoise,
    /// Full-precision random walk.
    RandomWalk,
    /// Household power draw: appliance levels with sharp switches.
    Power,
}

impl Kind {
    pub const BENCHMARK: [Kind; 9] = [
        Kind::FaceFour,
        Kind::MoteStrain,
        Kind::Lightning,
        Kind::Cricket,
        Kind::Wafer,
        Kind::Ecg,
        Kind::Pressure,
        Kind::WindSpeed,
        Kind::WindDirection,
    ];

    pub const ALL: [Kind; 12] = [
        Kind::FaceFour,
        Kind::MoteStrain,
        Kind::Lightning,
        Kind::Cricket,
        Kind::Wafer,
        Kind::Ecg,
        Kind::Pressure,
        Kind::WindSpeed,
        Kind::WindDirection,
        Kind::PlaNoise,
        Kind::RandomWalk,
        Kind::Power,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::FaceFour => "facefour",
            Kind::MoteStrain => "motestrain",
            Kind::Lightning => "lightning",
            Kind::Cricket => "cricket",
            Kind::Wafer => "wafer",
            Kind::Ecg => "ecg",
            Kind::Pressure => "pressure",
            Kind::WindSpeed => "windspeed",
            Kind::WindDirection => "winddirection",
            Kind::PlaNoise => "pla-noise",
            Kind::RandomWalk => "random-walk",
            Kind::Power => "power",
        }
    }

    pub fn from_name(name: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Decimal places the generator rounds to; `None` keeps full precision.
    pub fn decimals(self) -> Option<u32> {
        match self {
            Kind::FaceFour | Kind::MoteStrain | Kind::Cricket | Kind::Wafer => Some(4),
            Kind::Lightning | Kind::Ecg | Kind::Power => Some(3),
            Kind::Pressure | Kind::WindSpeed | Kind::WindDirection | Kind::PlaNoise => Some(2),
            Kind::RandomWalk => None,
        }
    }

    /// Whether the series is dominated by noise rather than structure.
    pub fn is_random(self) -> bool {
        matches!(self, Kind::RandomWalk)
    }
}

pub fn generate(kind: Kind, n: usize, seed: u64) -> TimeSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (kind as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let n = n.max(1);
    let mut values = match kind {
        Kind::FaceFour => face_four(n, &mut rng),
        Kind::MoteStrain => mote_strain(n, &mut rng),
        Kind::Lightning => lightning(n, &mut rng),
        Kind::Cricket => cricket(n, &mut rng),
        Kind::Wafer => wafer(n, &mut rng),
        Kind::Ecg => ecg(n, &mut rng),
        Kind::Pressure => pressure(n, &mut rng),
        Kind::WindSpeed => wind_speed(n, &mut rng),
        Kind::WindDirection => wind_direction(n, &mut rng),
        Kind::PlaNoise => pla_noise(n, 0.3, &mut rng),
        Kind::RandomWalk => random_walk(n, &mut rng),
        Kind::Power => power(n, &mut rng),
    };
    if let Some(d) = kind.decimals() {
        round_all(&mut values, d);
    }
    TimeSeries::new(kind.name(), values).expect("generators emit finite samples")
}

pub fn round_all(values: &mut [f64], decimals: u32) {
    let scale = 10f64.powi(decimals as i32);
    for v in values {
        *v = (*v * scale).round() / scale;
    }
}

fn gauss(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    Normal::new(0.0, sigma).unwrap().sample(rng)
}

fn face_four(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let phases: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..TAU)).collect();
    (0..n)
        .map(|i| {
            let t = i as f64 / 350.0;
            2.0 * (t * TAU + phases[0]).sin()
                + 0.8 * (t * 17.0 + phases[1]).sin()
                + 0.3 * (t * 41.0 + phases[2]).cos()
                + gauss(rng, 0.02)
        })
        .collect()
}

fn mote_strain(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut level: f64 = 0.0;
    while out.len() < n {
        let len = rng.random_range(20..200);
        level = (level + gauss(rng, 0.8)).clamp(-3.0, 3.0);
        let drift = gauss(rng, 0.002);
        for j in 0..len {
            out.push(level + drift * j as f64 + gauss(rng, 0.03));
        }
    }
    out.truncate(n);
    out
}

fn lightning(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut decay = 0.0;
    for _ in 0..n {
        if rng.random_bool(0.004) {
            decay += rng.random_range(2.0..8.0);
        }
        decay *= 0.9;
        out.push(-0.5 + decay + gauss(rng, 0.05));
    }
    out
}

fn cricket(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut amp = 1.0;
    (0..n)
        .map(|i| {
            if i % 300 == 0 {
                amp = rng.random_range(0.3..2.5);
            }
            let t = i as f64;
            amp * (t / 9.0).sin() * (t / 150.0).cos() + gauss(rng, 0.02)
        })
        .collect()
}

fn wafer(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut high = false;
    while out.len() < n {
        let len = rng.random_range(30..150);
        let target = if high { 1.2 } else { -0.6 };
        let ramp = rng.random_range(3..10).min(len);
        let start = out.last().copied().unwrap_or(target);
        for j in 0..len {
            let base = if j < ramp {
                start + (target - start) * (j as f64 + 1.0) / ramp as f64
            } else {
                target
            };
            out.push(base + gauss(rng, 0.01));
        }
        high = !high;
    }
    out.truncate(n);
    out
}

fn ecg(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let period = 180.0;
    (0..n)
        .map(|i| {
            let phase = (i as f64 % period) / period;
            let bump = |c: f64, w: f64, a: f64| a * (-((phase - c) / w).powi(2)).exp();
            bump(0.2, 0.03, 0.15) - bump(0.3, 0.01, 0.1) + bump(0.33, 0.012, 1.2)
                - bump(0.36, 0.01, 0.25)
                + bump(0.6, 0.05, 0.3)
                + gauss(rng, 0.005)
        })
        .collect()
}

fn pressure(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut v: f64 = 95.0;
    while out.len() < n {
        let len = rng.random_range(50..600);
        let slope = if rng.random_bool(0.5) { 0.0 } else { gauss(rng, 0.002) };
        for _ in 0..len {
            v += slope;
            out.push(v + if rng.random_bool(0.05) { 0.01 } else { 0.0 });
        }
        v = (v + gauss(rng, 0.05)).clamp(90.0, 100.0);
    }
    out.truncate(n);
    out
}

fn wind_speed(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut mean: f64 = 4.0;
    (0..n)
        .map(|_| {
            mean = (mean + gauss(rng, 0.05)).clamp(0.5, 12.0);
            (mean + gauss(rng, 0.25) + if rng.random_bool(0.01) { 2.0 } else { 0.0 }).max(0.0)
        })
        .collect()
}

fn wind_direction(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut d: f64 = 180.0;
    (0..n)
        .map(|_| {
            d = (d + gauss(rng, 1.5)).rem_euclid(360.0);
            d
        })
        .collect()
}

/// Piecewise-linear trend with segments of 50 to 400 samples and Gaussian
/// noise of deviation `sigma`.
pub fn pla_noise(n: usize, sigma: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut v: f64 = 10.0;
    while out.len() < n {
        let len = rng.random_range(50..400);
        let slope = rng.random_range(-0.08..0.08);
        for _ in 0..len {
            v += slope;
            out.push(v + gauss(rng, sigma));
        }
        v = v.clamp(-10.0, 30.0);
    }
    out.truncate(n);
    out
}

fn random_walk(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v = 0.0;
    (0..n)
        .map(|_| {
            v += gauss(rng, 1.0);
            v
        })
        .collect()
}

fn power(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    const LEVELS: [f64; 6] = [0.2, 0.35, 1.4, 2.2, 3.6, 5.1];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let level = LEVELS[rng.random_range(0..LEVELS.len())];
        let len = rng.random_range(40..600);
        for _ in 0..len {
            out.push(level + gauss(rng, 0.01));
        }
    }
    out.truncate(n);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{detect_decimals, MAX_DECIMALS};

    #[test]
    fn generators_are_deterministic_and_sized() {
        for kind in Kind::ALL {
            let a = generate(kind, 1000, 42);
            let b = generate(kind, 1000, 42);
            assert_eq!(a, b, "{}", kind.name());
            assert_eq!(a.len(), 1000);
            assert!(a.range() > 0.0, "{}", kind.name());
        }
    }

    #[test]
    fn precision_matches_declared_decimals() {
        for kind in Kind::ALL {
            let s = generate(kind, 2000, 3);
            let detected = detect_decimals(s.values(), MAX_DECIMALS);
            match kind.decimals() {
                Some(d) => assert!(detected.is_some_and(|x| x <= d), "{}", kind.name()),
                None => assert_eq!(detected, None),
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for kind in Kind::ALL {
            assert_eq!(Kind::from_name(kind.name()), Some(kind));
        }
        assert_eq!(Kind::from_name("nope"), None);
    }
}
