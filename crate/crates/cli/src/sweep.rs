//! Verification sweeps over labels and errors.

use std::ops::RangeInclusive;
use std::time::Instant;

use gbs_qec::correct::{CorrectionOptions, ParityStrategy};
use gbs_qec::errors::{random_error_with, PhaseModes, RandomErrorConfig};
use gbs_qec::{enumerate, run_protocol, ErrorSpec64, GbsLabel, Mode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::report::RunReport;
use crate::CliError;

/// Largest register an exhaustive sweep enumerates.
pub const MAX_EXHAUSTIVE_N: usize = 12;
/// Largest register any sweep simulates.
pub const MAX_SWEEP_N: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub enum FlipMode {
    /// Every label × every flip subset × every delta.
    Exhaustive,
    /// `k` random (label, error) cases per register size.
    Sampled(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub n_range: RangeInclusive<usize>,
    pub flip_mode: FlipMode,
    /// Rotation angles; `None` picks the mode's default set.
    pub delta_set: Option<Vec<f64>>,
    pub mode: Mode,
    pub seed: u64,
    pub tolerance: f64,
    pub parity: ParityStrategy,
    pub timing: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let (lo, hi) = (*self.n_range.start(), *self.n_range.end());
        if lo < 2 || lo > hi || hi > MAX_SWEEP_N {
            return Err(CliError::Usage(format!(
                "register range {lo}..{hi} must satisfy 2 <= lo <= hi <= {MAX_SWEEP_N}"
            )));
        }
        if self.flip_mode == FlipMode::Exhaustive && hi > MAX_EXHAUSTIVE_N {
            return Err(CliError::Usage(format!(
                "exhaustive sweeps are limited to n <= {MAX_EXHAUSTIVE_N}"
            )));
        }
        if !(self.tolerance >= 0.0 && self.tolerance < 1.0) {
            return Err(CliError::Usage(format!(
                "tolerance {} outside [0, 1)",
                self.tolerance
            )));
        }
        Ok(())
    }

    /// Angles used when none are given: identity, two generic angles and a
    /// phase flip in full mode; identity and a phase flip in discrete mode.
    pub fn deltas(&self) -> Vec<f64> {
        use std::f64::consts::PI;
        match (&self.delta_set, self.mode) {
            (Some(d), _) => d.clone(),
            (None, Mode::Full) => vec![0.0, PI / 7.0, 2.0 * PI / 3.0, PI],
            (None, Mode::Discrete) => vec![0.0, PI],
        }
    }
}

/// One protocol input.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepCase {
    pub label: GbsLabel,
    pub errors: ErrorSpec64,
    pub rng_seed: u64,
}

/// SplitMix64 finalizer; decorrelates per-case seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Flips on every qubit set in `mask` (ascending qubit order), then a
/// rotation by `delta` on the first flipped qubit, or qubit 1 when nothing
/// is flipped. A zero angle adds no rotation.
pub fn exhaustive_spec(n: usize, mask: u64, delta: f64) -> ErrorSpec64 {
    let flipped: Vec<usize> = (1..=n).filter(|q| mask >> (n - q) & 1 == 1).collect();
    let mut spec = flipped
        .iter()
        .fold(ErrorSpec64::identity(), |s, &q| s.flip(q));
    if delta != 0.0 {
        spec = spec.rot(flipped.first().copied().unwrap_or(1), delta);
    }
    spec
}

/// All cases of a sweep, in report order.
pub fn cases(config: &SweepConfig) -> Result<Vec<SweepCase>, CliError> {
    config.validate()?;
    let deltas = config.deltas();
    let mut out = Vec::new();
    for n in config.n_range.clone() {
        let labels = enumerate(n).map_err(|e| CliError::Usage(e.to_string()))?;
        match config.flip_mode {
            FlipMode::Exhaustive => {
                for label in &labels {
                    for mask in 0..1u64 << n {
                        for &delta in &deltas {
                            out.push(SweepCase {
                                label: *label,
                                errors: exhaustive_spec(n, mask, delta),
                                rng_seed: mix(config.seed ^ out.len() as u64),
                            });
                        }
                    }
                }
            }
            FlipMode::Sampled(k) => {
                let err_cfg = RandomErrorConfig {
                    max_flips: n,
                    max_rotations: n,
                    phase_modes: match (&config.delta_set, config.mode) {
                        (None, Mode::Full) => PhaseModes::Uniform,
                        _ => PhaseModes::Set(deltas.clone()),
                    },
                };
                for i in 0..k {
                    let case_seed = mix(mix(config.seed ^ ((n as u64) << 32)) ^ i as u64);
                    let mut rng = ChaCha8Rng::seed_from_u64(case_seed);
                    let label = labels[rng.gen_range(0..labels.len())];
                    let errors = random_error_with(n, &mut rng, &err_cfg);
                    out.push(SweepCase {
                        label,
                        errors,
                        rng_seed: case_seed,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Runs one case through the protocol.
pub fn run_case(
    case: &SweepCase,
    options: CorrectionOptions,
    tolerance: f64,
    timing: bool,
) -> RunReport {
    let start = Instant::now();
    let result = run_protocol(&case.label, &case.errors, options, case.rng_seed);
    let wall_time_ms = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    let batch_parity = options.parity == ParityStrategy::Batch;
    match result {
        Ok(out) => RunReport {
            label: case.label,
            errors: case.errors.clone(),
            mode: options.mode,
            batch_parity,
            fidelity: Some(out.fidelity),
            signature: Some(out.signature),
            pass: out.fidelity >= 1.0 - tolerance,
            report: Some(out.report),
            failure: None,
            wall_time_ms,
        },
        Err(e) => RunReport {
            label: case.label,
            errors: case.errors.clone(),
            mode: options.mode,
            batch_parity,
            fidelity: None,
            signature: None,
            report: None,
            pass: false,
            failure: Some(e.to_string()),
            wall_time_ms,
        },
    }
}

/// Runs every case on the rayon pool; reports come back in case order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<RunReport>, CliError> {
    let cases = cases(config)?;
    let options = CorrectionOptions {
        mode: config.mode,
        parity: config.parity,
    };
    Ok(cases
        .par_iter()
        .map(|c| run_case(c, options, config.tolerance, config.timing))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(flip_mode: FlipMode, range: RangeInclusive<usize>) -> SweepConfig {
        SweepConfig {
            n_range: range,
            flip_mode,
            delta_set: None,
            mode: Mode::Full,
            seed: 7,
            tolerance: 1e-10,
            parity: ParityStrategy::Sequential,
            timing: false,
        }
    }

    #[test]
    fn exhaustive_case_count() {
        let c = cases(&config(FlipMode::Exhaustive, 2..=3)).unwrap();
        // labels × masks × deltas
        assert_eq!(c.len(), 4 * 4 * 4 + 8 * 8 * 4);
    }

    #[test]
    fn exhaustive_spec_layout() {
        assert!(exhaustive_spec(3, 0, 0.0).is_identity());
        assert_eq!(
            exhaustive_spec(3, 0b011, 0.5),
            ErrorSpec64::identity().flip(2).flip(3).rot(2, 0.5)
        );
        assert_eq!(
            exhaustive_spec(2, 0, 1.0),
            ErrorSpec64::identity().rot(1, 1.0)
        );
    }

    #[test]
    fn validation() {
        assert!(config(FlipMode::Exhaustive, 2..=13).validate().is_err());
        assert!(config(FlipMode::Sampled(3), 1..=3).validate().is_err());
        #[allow(clippy::reversed_empty_ranges)]
        let backwards = config(FlipMode::Sampled(3), 4..=3);
        assert!(backwards.validate().is_err());
        assert!(config(FlipMode::Sampled(3), 13..=13).validate().is_ok());
    }

    #[test]
    fn sampled_cases_are_seeded() {
        let cfg = config(FlipMode::Sampled(50), 4..=5);
        let a = cases(&cfg).unwrap();
        assert_eq!(a, cases(&cfg).unwrap());
        assert_eq!(a.len(), 100);
        let other = cases(&SweepConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a, other);
    }
}
