use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::estimators::GaussianBelief;
use crate::gnss::{
    constellation_at, preprocess, select_channels, synthesize_observation, visible_satellites, GnssObservation,
    GnssSatellite, MeasurementEpoch,
};
use crate::linalg::cholesky8;
use crate::state::{StateVector, Vector8};

use super::{ScenarioConfig, TruthLog};

/// Seed of Monte Carlo run `run` (SplitMix64 of the master seed and index).
pub fn run_seed(master: u64, run: u64) -> u64 {
    let mut z = master ^ run.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Synthesizes one observation per truth epoch using a noise stream seeded
/// by `seed`. Epochs with fewer than `cfg.channels` visible satellites use
/// every visible satellite and are flagged degraded.
pub fn generate_observations(truth: &TruthLog, cfg: &ScenarioConfig, seed: u64) -> Vec<GnssObservation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = crate::gnss::ErrorBudget { seed, ..cfg.budget };
    truth
        .times
        .iter()
        .zip(&truth.states)
        .zip(&truth.positions)
        .map(|((&t, s), pos)| {
            let sats = constellation_at(t, &cfg.almanac);
            let visible: Vec<GnssSatellite> =
                visible_satellites(&sats, pos, budget.elevation_mask).into_iter().map(|(s, _)| s).collect();
            let k = cfg.channels.min(visible.len());
            let chosen = select_channels(&visible, k, pos).unwrap_or_default();
            let mut obs = synthesize_observation(t, s, &chosen, &budget, &cfg.site, &mut rng);
            obs.degraded |= obs.channels.len() < cfg.channels;
            obs
        })
        .collect()
}

/// Receiver preprocessing of a whole stream.
pub fn measurement_stream(observations: &[GnssObservation], cfg: &ScenarioConfig) -> Vec<MeasurementEpoch> {
    observations.iter().map(|o| preprocess(o, &cfg.budget, cfg.use_graphic)).collect()
}

/// Filter initialization for run `seed`: the nominal belief, or with its
/// mean replaced by a draw from N(truth(0), P(0)) when the scenario asks for
/// perturbed starts.
pub fn initial_estimate(cfg: &ScenarioConfig, seed: u64) -> GaussianBelief {
    if !cfg.perturb_initial_estimate {
        return cfg.init;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x005E_ED0F_1A17);
    let l = cholesky8(&cfg.init.cov).expect("validated initial covariance");
    let w = Vector8::from_fn(|_, _| StandardNormal.sample(&mut rng));
    GaussianBelief::new(StateVector(cfg.truth_initial_state().0 + l * w), cfg.init.cov)
}
