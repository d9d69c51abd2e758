//! Shared inputs for the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stakeless_core::fit::MatchObservation;
use stakeless_core::model::sample_score;
use stakeless_core::schedule::enumerate_schedules;
use stakeless_core::{MatchSet, ModelParams, Pairing, Rating};

/// `n` states drawn from the default model, with only `pairs_of(schedule)` played.
pub fn random_states(
    n: usize,
    seed: u64,
    pairs_of: impl Fn(&stakeless_core::ScheduleSpec) -> Vec<Pairing>,
) -> Vec<MatchSet> {
    let p = ModelParams::four_p_pot();
    let schedules = enumerate_schedules();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let mut set = MatchSet::new();
            for pr in pairs_of(&schedules[i % schedules.len()]) {
                set.set(pr, sample_score(&p, Rating::pot(pr.home), Rating::pot(pr.away), &mut rng).expect("pot model"));
            }
            set
        })
        .collect()
}

pub fn md4_states(n: usize, seed: u64) -> Vec<MatchSet> {
    random_states(n, seed, |s| s.first_eight())
}

pub fn md5_states(n: usize, seed: u64) -> Vec<MatchSet> {
    random_states(n, seed, |s| Pairing::all().filter(|p| !s.md6.contains(p)).collect())
}

pub fn full_states(n: usize, seed: u64) -> Vec<MatchSet> {
    random_states(n, seed, |_| Pairing::all().collect())
}

/// Synthetic pot-rated observations from the default model.
pub fn observations(n: usize, seed: u64) -> Vec<MatchObservation> {
    let p = ModelParams::four_p_pot();
    let pairs: Vec<Pairing> = Pairing::all().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let pr = pairs[i % pairs.len()];
            let (rh, ra) = (Rating::pot(pr.home), Rating::pot(pr.away));
            let s = sample_score(&p, rh, ra, &mut rng).expect("pot model");
            MatchObservation::new(format!("{}", i / 96), rh, ra, s).expect("valid observation")
        })
        .collect()
}
