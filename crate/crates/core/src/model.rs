//! Poisson score models.
//!
//! The log scoring rates are linear in the ratings:
//!
//! ```text
//! ln λ_home = α_h + β_h · (R_home − γ_h · R_away)
//! ln λ_away = α_a + β_a · (R_away − γ_a · R_home)
//! ```
//!
//! Four-parameter variants fix both γ at 1. The bivariate variant adds a
//! common Poisson component with mean `c` to both scores.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{Rating, Score};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelFamily {
    SixPCoeff,
    FourPCoeff,
    SixPPot,
    FourPPot,
    BivariateCoeff,
    Baseline,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 6] = [
        ModelFamily::SixPCoeff,
        ModelFamily::FourPCoeff,
        ModelFamily::SixPPot,
        ModelFamily::FourPPot,
        ModelFamily::BivariateCoeff,
        ModelFamily::Baseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::SixPCoeff => "6p-coeff",
            ModelFamily::FourPCoeff => "4p-coeff",
            ModelFamily::SixPPot => "6p-pot",
            ModelFamily::FourPPot => "4p-pot",
            ModelFamily::BivariateCoeff => "bivariate-coeff",
            ModelFamily::Baseline => "baseline",
        }
    }

    /// Ratings are pot indices rather than club coefficients.
    pub fn uses_pots(self) -> bool {
        matches!(self, ModelFamily::SixPPot | ModelFamily::FourPPot)
    }

    /// γ is estimated rather than fixed at 1.
    pub fn free_gamma(self) -> bool {
        matches!(self, ModelFamily::SixPCoeff | ModelFamily::SixPPot | ModelFamily::BivariateCoeff)
    }

    pub fn is_bivariate(self) -> bool {
        self == ModelFamily::BivariateCoeff
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let s = if s == "bivariate" { "bivariate-coeff".to_string() } else { s };
        ModelFamily::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            Error::InvalidInput(format!(
                "unknown model family `{s}` (expected one of {})",
                ModelFamily::ALL.map(|f| f.name()).join(", ")
            ))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub family: ModelFamily,
    pub alpha_h: f64,
    pub alpha_a: f64,
    pub beta_h: f64,
    pub beta_a: f64,
    pub gamma_h: f64,
    pub gamma_a: f64,
    pub c: f64,
}

impl ModelParams {
    /// Point estimates fitted on the 2003/04 to 2019/20 group stages.
    pub fn preset(family: ModelFamily) -> Option<ModelParams> {
        let p = |family, alpha_h, alpha_a, beta_h, beta_a, gamma_h, gamma_a, c| ModelParams {
            family,
            alpha_h,
            alpha_a,
            beta_h,
            beta_a,
            gamma_h,
            gamma_a,
            c,
        };
        use ModelFamily::*;
        Some(match family {
            SixPCoeff => p(family, 0.335, 0.087, 0.006, 0.006, 0.833, 0.963, 0.0),
            FourPCoeff => p(family, 0.409, 0.102, 0.006, 0.006, 1.0, 1.0, 0.0),
            SixPPot => p(family, 0.464, 0.143, -0.177, -0.182, 0.910, 0.922, 0.0),
            FourPPot => p(family, 0.424, 0.108, -0.169, -0.175, 1.0, 1.0, 0.0),
            BivariateCoeff => p(family, 0.335, 0.087, 0.006, 0.006, 0.833, 0.963, (-12.458f64).exp()),
            Baseline => return None,
        })
    }

    /// Default simulation model: four parameters, pot ratings.
    pub fn four_p_pot() -> ModelParams {
        Self::preset(ModelFamily::FourPPot).expect("preset")
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.alpha_h, self.alpha_a, self.beta_h, self.beta_a, self.gamma_h, self.gamma_a, self.c];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("model parameters must be finite".into()));
        }
        if self.c < 0.0 {
            return Err(Error::InvalidParameter(format!("covariance c = {} is negative", self.c)));
        }
        if !self.family.is_bivariate() && self.c != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "family {} has no covariance term but c = {}",
                self.family, self.c
            )));
        }
        if !self.family.free_gamma() && (self.gamma_h != 1.0 || self.gamma_a != 1.0) {
            return Err(Error::InvalidParameter(format!("family {} fixes gamma at 1", self.family)));
        }
        Ok(())
    }

    /// Flat `key = value` text, one parameter per line.
    pub fn to_kv_string(&self) -> String {
        format!(
            "family = {}\nalpha_h = {}\nalpha_a = {}\nbeta_h = {}\nbeta_a = {}\ngamma_h = {}\ngamma_a = {}\nc = {}\n",
            self.family, self.alpha_h, self.alpha_a, self.beta_h, self.beta_a, self.gamma_h, self.gamma_a, self.c
        )
    }

    /// Parses the `key = value` format. Unknown keys are ignored so that fit
    /// reports can be read back as parameter files; `#` starts a comment.
    pub fn from_kv_str(text: &str) -> Result<ModelParams> {
        let mut kv = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("line {}: expected `key = value`", n + 1)))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let family: ModelFamily =
            kv.get("family").ok_or_else(|| Error::InvalidInput("missing key `family`".into()))?.parse()?;
        let num = |key: &str, default: Option<f64>| -> Result<f64> {
            match kv.get(key) {
                Some(v) => v.parse::<f64>().map_err(|_| Error::InvalidInput(format!("`{key}` is not a number: {v}"))),
                None => default.ok_or_else(|| Error::InvalidInput(format!("missing key `{key}`"))),
            }
        };
        let p = ModelParams {
            family,
            alpha_h: num("alpha_h", None)?,
            alpha_a: num("alpha_a", None)?,
            beta_h: num("beta_h", None)?,
            beta_a: num("beta_a", None)?,
            gamma_h: num("gamma_h", Some(1.0))?,
            gamma_a: num("gamma_a", Some(1.0))?,
            c: num("c", Some(0.0))?,
        };
        if family == ModelFamily::Baseline {
            return Err(Error::UnsupportedFamily(family.to_string()));
        }
        p.validate()?;
        Ok(p)
    }
}

/// Expected home and away goals, before the bivariate common component.
pub fn rates(p: &ModelParams, r_home: Rating, r_away: Rating) -> Result<(f64, f64)> {
    if p.family == ModelFamily::Baseline {
        return Err(Error::UnsupportedFamily(p.family.to_string()));
    }
    let (rh, ra) = (r_home.value(), r_away.value());
    let lh = (p.alpha_h + p.beta_h * (rh - p.gamma_h * ra)).exp();
    let la = (p.alpha_a + p.beta_a * (ra - p.gamma_a * rh)).exp();
    Ok((lh, la))
}

const LN_FACT_TABLE: usize = 256;

fn ln_factorial(k: u32) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = vec![0.0; LN_FACT_TABLE];
        for i in 1..LN_FACT_TABLE {
            v[i] = v[i - 1] + (i as f64).ln();
        }
        v
    });
    match t.get(k as usize) {
        Some(v) => *v,
        None => t[LN_FACT_TABLE - 1] + (LN_FACT_TABLE as u32..=k).map(|i| f64::from(i).ln()).sum::<f64>(),
    }
}

pub fn ln_poisson_pmf(lambda: f64, k: u32) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    f64::from(k) * lambda.ln() - lambda - ln_factorial(k)
}

pub fn poisson_pmf(lambda: f64, k: u32) -> f64 {
    ln_poisson_pmf(lambda, k).exp()
}

/// Bivariate Poisson probability of `(h, a)` with independent components
/// `lh`, `la` and common component `c` (marginal means `lh + c`, `la + c`).
pub fn bivariate_pmf(lh: f64, la: f64, c: f64, h: u32, a: u32) -> f64 {
    if c == 0.0 {
        return poisson_pmf(lh, h) * poisson_pmf(la, a);
    }
    let base = -(lh + la + c);
    let (lnh, lna, lnc) = (lh.ln(), la.ln(), c.ln());
    (0..=h.min(a))
        .map(|k| {
            let (i, j) = (h - k, a - k);
            (base + f64::from(i) * lnh + f64::from(j) * lna + f64::from(k) * lnc
                - ln_factorial(i)
                - ln_factorial(j)
                - ln_factorial(k))
            .exp()
        })
        .sum()
}

/// Probability of the exact score `s`.
pub fn score_pmf(p: &ModelParams, r_home: Rating, r_away: Rating, s: Score) -> Result<f64> {
    let (lh, la) = rates(p, r_home, r_away)?;
    let (h, a) = (u32::from(s.home), u32::from(s.away));
    Ok(if p.family.is_bivariate() { bivariate_pmf(lh, la, p.c, h, a) } else { poisson_pmf(lh, h) * poisson_pmf(la, a) })
}

/// Poisson draw by sequential inversion of one uniform variate.
pub fn sample_poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u16 {
    if lambda <= 0.0 {
        return 0;
    }
    let u: f64 = rng.random();
    let mut k: u16 = 0;
    let mut p = (-lambda).exp();
    let mut cdf = p;
    while u > cdf && k < u16::MAX {
        k += 1;
        p *= lambda / f64::from(k);
        if p == 0.0 {
            break;
        }
        cdf += p;
    }
    k
}

/// Inverse-CDF sampler with the cumulative probabilities precomputed; yields
/// exactly the same draw as [`sample_poisson`] for the same uniform.
#[derive(Clone, Debug)]
pub struct PoissonTable {
    lambda: f64,
    cdf: Vec<f64>,
}

impl PoissonTable {
    pub fn new(lambda: f64) -> Self {
        let mut cdf = Vec::new();
        if lambda > 0.0 {
            let mut p = (-lambda).exp();
            let mut acc = p;
            cdf.push(acc);
            let mut k = 0u32;
            while acc < 1.0 - 1e-15 && k < 200 {
                k += 1;
                p *= lambda / f64::from(k);
                acc += p;
                cdf.push(acc);
            }
        }
        PoissonTable { lambda, cdf }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u16 {
        if self.lambda <= 0.0 {
            return 0;
        }
        let u: f64 = rng.random();
        self.invert(u)
    }

    #[inline]
    fn invert(&self, u: f64) -> u16 {
        match self.cdf.iter().position(|&c| u <= c) {
            Some(k) => k as u16,
            None => {
                // Beyond the table: continue the recurrence.
                let mut k = self.cdf.len() as u32 - 1;
                let mut cdf = self.cdf[k as usize];
                let mut p = poisson_pmf(self.lambda, k);
                while u > cdf && p > 0.0 {
                    k += 1;
                    p *= self.lambda / f64::from(k);
                    cdf += p;
                }
                k.min(u32::from(u16::MAX)) as u16
            }
        }
    }
}

/// Random score: two independent Poisson draws, plus a shared component for
/// the bivariate family.
pub fn sample_score<R: Rng + ?Sized>(p: &ModelParams, r_home: Rating, r_away: Rating, rng: &mut R) -> Result<Score> {
    let (lh, la) = rates(p, r_home, r_away)?;
    let h = sample_poisson(lh, rng);
    let a = sample_poisson(la, rng);
    if p.family.is_bivariate() {
        let common = sample_poisson(p.c, rng);
        Ok(Score::new(h.saturating_add(common), a.saturating_add(common)))
    } else {
        Ok(Score::new(h, a))
    }
}

/// Empirical score frequencies.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BaselineTable {
    probs: BTreeMap<Score, f64>,
}

impl BaselineTable {
    pub fn from_scores<I: IntoIterator<Item = Score>>(scores: I) -> Result<Self> {
        let mut counts = BTreeMap::<Score, u64>::new();
        for s in scores {
            *counts.entry(s).or_default() += 1;
        }
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(Error::InsufficientData("baseline needs at least one score".into()));
        }
        let probs = counts.into_iter().map(|(s, n)| (s, n as f64 / total as f64)).collect();
        Ok(BaselineTable { probs })
    }

    pub fn iter(&self) -> impl Iterator<Item = (Score, f64)> + '_ {
        self.probs.iter().map(|(s, p)| (*s, *p))
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }
}

/// Relative frequency of `s`; zero when never observed.
pub fn baseline_pmf(t: &BaselineTable, s: Score) -> f64 {
    t.probs.get(&s).copied().unwrap_or(0.0)
}

/// Anything that assigns a probability to an exact score of a fixture.
pub trait ScorePredictor: Sync {
    fn score_probability(&self, r_home: Rating, r_away: Rating, s: Score) -> f64;
}

impl ScorePredictor for ModelParams {
    /// Zero for the baseline family, which has no rates.
    fn score_probability(&self, r_home: Rating, r_away: Rating, s: Score) -> f64 {
        score_pmf(self, r_home, r_away, s).unwrap_or(0.0)
    }
}

impl ScorePredictor for BaselineTable {
    fn score_probability(&self, _: Rating, _: Rating, s: Score) -> f64 {
        baseline_pmf(self, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::PotSlot;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pot(i: u8) -> Rating {
        Rating::pot(PotSlot::new(i).unwrap())
    }

    #[test]
    fn four_p_pot_rates() {
        let p = ModelParams::four_p_pot();
        let (lh, _) = rates(&p, pot(1), pot(4)).unwrap();
        assert!((lh - 0.931f64.exp()).abs() < 1e-12);
        assert!((lh - 2.537).abs() < 1e-3);
        let (lh, la) = rates(&p, pot(1), pot(1)).unwrap();
        assert!((lh - 0.424f64.exp()).abs() < 1e-12);
        assert!((la - 0.108f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn zero_slope_ignores_ratings() {
        let mut p = ModelParams::four_p_pot();
        p.beta_h = 0.0;
        let (a, _) = rates(&p, pot(1), pot(4)).unwrap();
        let (b, _) = rates(&p, pot(3), pot(2)).unwrap();
        assert_eq!(a, p.alpha_h.exp());
        assert_eq!(b, p.alpha_h.exp());
    }

    #[test]
    fn baseline_has_no_rates() {
        let mut p = ModelParams::four_p_pot();
        p.family = ModelFamily::Baseline;
        assert!(matches!(rates(&p, pot(1), pot(2)), Err(Error::UnsupportedFamily(_))));
    }

    #[test]
    fn pmf_at_zero() {
        let p = ModelParams::four_p_pot();
        let (lh, la) = rates(&p, pot(2), pot(3)).unwrap();
        let v = score_pmf(&p, pot(2), pot(3), Score::new(0, 0)).unwrap();
        assert!((v - (-lh - la).exp()).abs() < 1e-15);
    }

    #[test]
    fn bivariate_with_zero_covariance_is_independent() {
        for h in 0..=8 {
            for a in 0..=8 {
                let x = bivariate_pmf(1.3, 0.9, 0.0, h, a);
                let y = poisson_pmf(1.3, h) * poisson_pmf(0.9, a);
                assert!((x - y).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bivariate_marginal_mean() {
        let (lh, la, c) = (1.2, 0.8, 0.3);
        let mut mean_h = 0.0;
        let mut total = 0.0;
        for h in 0..40 {
            for a in 0..40 {
                let p = bivariate_pmf(lh, la, c, h, a);
                total += p;
                mean_h += f64::from(h) * p;
            }
        }
        assert!((total - 1.0).abs() < 1e-12);
        assert!((mean_h - (lh + c)).abs() < 1e-10);
    }

    #[test]
    fn presets_are_valid() {
        for f in ModelFamily::ALL {
            if let Some(p) = ModelParams::preset(f) {
                p.validate().unwrap();
            }
        }
        assert!(ModelParams::preset(ModelFamily::Baseline).is_none());
    }

    #[test]
    fn kv_round_trip() {
        for f in ModelFamily::ALL {
            if let Some(p) = ModelParams::preset(f) {
                let back = ModelParams::from_kv_str(&p.to_kv_string()).unwrap();
                assert_eq!(back, p);
            }
        }
        assert!(ModelParams::from_kv_str("family = 4p-pot\nalpha_h = 1").is_err());
        assert!(ModelParams::from_kv_str("family = 4p-pot\nalpha_h = 1\nalpha_a = 0\nbeta_h = 0\nbeta_a = 0\nc = 0.5")
            .is_err());
    }

    #[test]
    fn table_sampler_matches_sequential_inversion() {
        let t = PoissonTable::new(1.7);
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10_000 {
            assert_eq!(t.sample(&mut a), sample_poisson(1.7, &mut b));
        }
    }

    #[test]
    fn same_seed_same_draws() {
        let p = ModelParams::four_p_pot();
        let draw = |seed| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            (0..100).map(|_| sample_score(&p, pot(1), pot(3), &mut r).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(5), draw(5));
        assert_ne!(draw(5), draw(6));
    }

    #[test]
    fn baseline_lookup() {
        let mut scores = vec![Score::new(0, 0); 115];
        scores.extend(vec![Score::new(1, 0); 1632 - 115]);
        let t = BaselineTable::from_scores(scores).unwrap();
        assert!((baseline_pmf(&t, Score::new(0, 0)) - 115.0 / 1632.0).abs() < 1e-15);
        assert_eq!(baseline_pmf(&t, Score::new(9, 9)), 0.0);
        assert!((t.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ln_factorial_beyond_table() {
        let direct: f64 = (1..=300u32).map(|i| f64::from(i).ln()).sum();
        assert!((ln_factorial(300) - direct).abs() < 1e-9);
    }
}
