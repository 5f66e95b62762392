//! One runner per subcommand. Trials run in parallel, each on its own
//! random stream derived from `(seed, experiment stream, trial index)`, so
//! thread scheduling cannot change any sampled value.

use std::time::Instant;

use ffwd_core::RngStream;
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig};
use crate::report::Report;
use crate::LabError;

mod algorithms;
mod ff;
mod pe;
mod teup;

/// Stream ids; distinct per experiment so that runs never share randomness.
pub(crate) mod streams {
    pub const SHOR: u64 = 1;
    pub const TERNARY: u64 = 2;
    pub const FOURIER: u64 = 3;
    pub const ROUNDTRIP: u64 = 4;
    pub const COMMUTING: u64 = 5;
    pub const QUADRATIC: u64 = 6;
    pub const OEOTL: u64 = 7;
    pub const GROVER: u64 = 8;
    pub const CGA: u64 = 9;
}

/// Runs `f` on trials `0..n` in parallel and returns results in trial order.
pub(crate) fn par_trials<T, F>(seed: u64, stream: u64, n: usize, f: F) -> Result<Vec<T>, LabError>
where
    T: Send,
    F: Fn(usize, &mut RngStream) -> Result<T, LabError> + Sync,
{
    let base = RngStream::new(seed, stream);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = base.substream(i as u64);
            f(i, &mut rng)
        })
        .collect()
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, LabError> {
    let start = Instant::now();
    let mut report = Report::new(cfg.clone());
    match &cfg.experiment {
        Experiment::ShorSeem(a) => pe::shor_seem(cfg, a, &mut report)?,
        Experiment::TernaryPe(a) => pe::ternary_pe(cfg, a, &mut report)?,
        Experiment::FourierPe(a) => pe::fourier_pe(cfg, a, &mut report)?,
        Experiment::FfSeemRoundtrip(a) => ff::roundtrip(cfg, a, &mut report)?,
        Experiment::CommutingFf(a) => ff::commuting(cfg, a, &mut report)?,
        Experiment::QuadraticFf(a) => ff::quadratic(cfg, a, &mut report)?,
        Experiment::Oeotl(a) => algorithms::oeotl(cfg, a, &mut report)?,
        Experiment::Grover(a) => algorithms::grover(cfg, a, &mut report)?,
        Experiment::Cga(a) => algorithms::cga(cfg, a, &mut report)?,
        Experiment::Teup(a) => teup::teup(cfg, a, &mut report)?,
    }
    report.meta.elapsed_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Converts a real time to an exact integer time when it is one.
pub(crate) fn time_of(t: f64) -> ffwd_core::Time {
    if t.fract() == 0.0 && t.abs() < 1e30 {
        ffwd_core::Time::Integer(t as i128)
    } else {
        ffwd_core::Time::Real(t)
    }
}

/// Euclidean distance between two amplitude vectors.
pub(crate) fn vec_distance(a: &[ffwd_core::C64], b: &[ffwd_core::C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Haar-like random state from Gaussian amplitudes.
pub(crate) fn random_state(qubits: usize, rng: &mut RngStream) -> Result<ffwd_core::StateVector, LabError> {
    let amps = (0..1usize << qubits).map(|_| ffwd_core::C64::new(rng.normal(), rng.normal())).collect();
    Ok(ffwd_core::StateVector::normalized(qubits, amps)?)
}
