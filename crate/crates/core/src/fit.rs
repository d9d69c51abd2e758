//! Maximum-likelihood fitting, bootstrap intervals and forecast metrics.
//!
//! Independent families are fitted as two separate Poisson regressions in a
//! linear parameterisation (`ln λ = a + b·x + d·y`), which makes each
//! sub-problem concave. The bivariate family is fitted jointly in its natural
//! parameters with `ln c` in place of `c`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Outcome, Rating, Score};
use crate::error::{Error, Result};
use crate::model::{bivariate_pmf, rates, score_pmf, ModelFamily, ModelParams, ScorePredictor};

/// Fewest observations [`fit_mle`] accepts.
pub const MIN_OBSERVATIONS: usize = 50;
/// Largest goal count of the forecast support in [`avg_distance`].
pub const FORECAST_MAX_GOALS: u16 = 10;
const MAX_ITERATIONS: usize = 500;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchObservation {
    pub season: String,
    pub home_rating: Rating,
    pub away_rating: Rating,
    pub score: Score,
}

impl MatchObservation {
    pub fn new(season: impl Into<String>, home_rating: Rating, away_rating: Rating, score: Score) -> Result<Self> {
        let score = Score::validated(score.home, score.away)?;
        Ok(MatchObservation { season: season.into(), home_rating, away_rating, score })
    }
}

/// Two-sided 95% percentile interval for one parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamInterval {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: ModelParams,
    pub log_likelihood: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Euclidean norm of the per-observation gradient at termination.
    pub gradient_norm: f64,
    pub bootstrap_ci: Option<Vec<ParamInterval>>,
}

impl FitResult {
    /// Parameters followed by fit diagnostics, in the parameter-file format.
    pub fn to_kv_string(&self) -> String {
        let mut s = self.params.to_kv_string();
        s.push_str(&format!(
            "log_likelihood = {}\nconverged = {}\niterations = {}\ngradient_norm = {}\n",
            self.log_likelihood, self.converged, self.iterations, self.gradient_norm
        ));
        if let Some(ci) = &self.bootstrap_ci {
            for c in ci {
                s.push_str(&format!("{}_ci_lower = {}\n{}_ci_upper = {}\n", c.name, c.lower, c.name, c.upper));
            }
        }
        s
    }
}

/// Names of the estimated parameters of `family`, in gradient order.
pub fn parameter_names(family: ModelFamily) -> &'static [&'static str] {
    const FOUR: [&str; 4] = ["alpha_h", "alpha_a", "beta_h", "beta_a"];
    const SIX: [&str; 6] = ["alpha_h", "alpha_a", "beta_h", "beta_a", "gamma_h", "gamma_a"];
    const SEVEN: [&str; 7] = ["alpha_h", "alpha_a", "beta_h", "beta_a", "gamma_h", "gamma_a", "c"];
    match family {
        ModelFamily::Baseline => &[],
        f if f.is_bivariate() => &SEVEN,
        f if f.free_gamma() => &SIX,
        _ => &FOUR,
    }
}

fn param_values(p: &ModelParams) -> Vec<f64> {
    let all = [p.alpha_h, p.alpha_a, p.beta_h, p.beta_a, p.gamma_h, p.gamma_a, p.c];
    all[..parameter_names(p.family).len()].to_vec()
}

fn with_values(family: ModelFamily, v: &[f64]) -> ModelParams {
    let get = |i: usize, d: f64| v.get(i).copied().unwrap_or(d);
    ModelParams {
        family,
        alpha_h: v[0],
        alpha_a: v[1],
        beta_h: v[2],
        beta_a: v[3],
        gamma_h: get(4, 1.0),
        gamma_a: get(5, 1.0),
        c: get(6, 0.0),
    }
}

/// Σ ln P(score). Returns `-inf` if some observed score has probability zero.
pub fn log_likelihood(p: &ModelParams, data: &[MatchObservation]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::InsufficientData("log-likelihood of an empty sample".into()));
    }
    let mut ll = 0.0;
    for o in data {
        let pr = score_pmf(p, o.home_rating, o.away_rating, o.score)?;
        if pr <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        ll += pr.ln();
    }
    Ok(ll)
}

fn bivariate_at(lh: f64, la: f64, c: f64, h: u32, a: u32, dh: u32, da: u32) -> f64 {
    if h < dh || a < da {
        0.0
    } else {
        bivariate_pmf(lh, la, c, h - dh, a - da)
    }
}

/// Gradient of [`log_likelihood`] with respect to the parameters listed by
/// [`parameter_names`].
pub fn log_likelihood_gradient(p: &ModelParams, data: &[MatchObservation]) -> Result<Vec<f64>> {
    if p.family == ModelFamily::Baseline {
        return Err(Error::UnsupportedFamily(p.family.to_string()));
    }
    let n = parameter_names(p.family).len();
    let mut g = vec![0.0; n];
    for o in data {
        let (lh, la) = rates(p, o.home_rating, o.away_rating)?;
        let (h, a) = (u32::from(o.score.home), u32::from(o.score.away));
        let (rh, ra) = (o.home_rating.value(), o.away_rating.value());
        // d ln P / d λ for each component.
        let (dlh, dla, dc) = if p.family.is_bivariate() {
            let base = bivariate_at(lh, la, p.c, h, a, 0, 0);
            (
                bivariate_at(lh, la, p.c, h, a, 1, 0) / base - 1.0,
                bivariate_at(lh, la, p.c, h, a, 0, 1) / base - 1.0,
                bivariate_at(lh, la, p.c, h, a, 1, 1) / base - 1.0,
            )
        } else {
            (f64::from(h) / lh - 1.0, f64::from(a) / la - 1.0, 0.0)
        };
        let (eh, ea) = (dlh * lh, dla * la);
        g[0] += eh;
        g[1] += ea;
        g[2] += eh * (rh - p.gamma_h * ra);
        g[3] += ea * (ra - p.gamma_a * rh);
        if n >= 6 {
            g[4] += -eh * p.beta_h * ra;
            g[5] += -ea * p.beta_a * rh;
        }
        if n == 7 {
            g[6] += dc;
        }
    }
    Ok(g)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for k in col..n {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

struct Maximum {
    x: Vec<f64>,
    value: f64,
    gradient_norm: f64,
    converged: bool,
    iterations: usize,
}

/// Levenberg-Marquardt damped Newton ascent. `eval` returns the objective,
/// its gradient and its Hessian.
fn maximize<F>(eval: F, x0: Vec<f64>, tol: f64) -> Maximum
where
    F: Fn(&[f64]) -> (f64, Vec<f64>, Vec<Vec<f64>>),
{
    let mut x = x0;
    let (mut f, mut g, mut h) = eval(&x);
    let mut mu = 1e-3;
    let mut it = 0;
    while it < MAX_ITERATIONS {
        if norm(&g) < tol {
            return Maximum { gradient_norm: norm(&g), x, value: f, converged: true, iterations: it };
        }
        it += 1;
        let n = x.len();
        let mut accepted = false;
        while mu < 1e12 {
            let mut a = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    a[i][j] = -h[i][j];
                }
                a[i][i] += mu * h[i][i].abs().max(1e-12);
            }
            if let Some(step) = solve(a, g.clone()) {
                let cand: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
                let (fc, gc, hc) = eval(&cand);
                if fc.is_finite() && fc >= f {
                    x = cand;
                    f = fc;
                    g = gc;
                    h = hc;
                    mu = (mu / 10.0).max(1e-12);
                    accepted = true;
                    break;
                }
            }
            mu *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    let gn = norm(&g);
    Maximum { gradient_norm: gn, x, value: f, converged: gn < tol, iterations: it }
}

/// Mean Poisson log-likelihood (without the constant) of counts `y` with
/// `ln μ = θ · x`, together with its gradient and Hessian.
fn poisson_regression(features: &[Vec<f64>], y: &[f64], theta: &[f64]) -> (f64, Vec<f64>, Vec<Vec<f64>>) {
    let k = theta.len();
    let n = y.len() as f64;
    let mut f = 0.0;
    let mut g = vec![0.0; k];
    let mut h = vec![vec![0.0; k]; k];
    for (x, &yi) in features.iter().zip(y) {
        let eta: f64 = x.iter().zip(theta).map(|(a, b)| a * b).sum();
        let mu = eta.exp();
        f += yi * eta - mu;
        for i in 0..k {
            g[i] += (yi - mu) * x[i];
            for j in 0..k {
                h[i][j] -= mu * x[i] * x[j];
            }
        }
    }
    g.iter_mut().for_each(|v| *v /= n);
    h.iter_mut().flatten().for_each(|v| *v /= n);
    (f / n, g, h)
}

fn fit_side(features: Vec<Vec<f64>>, y: Vec<f64>, tol: f64) -> Maximum {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let mut x0 = vec![0.0; features[0].len()];
    x0[0] = mean.max(1e-6).ln();
    maximize(|t| poisson_regression(&features, &y, t), x0, tol)
}

/// Converts `ln λ = a + b·own + d·opp` to `α + β(own − γ·opp)`. With `b = 0`
/// the rate does not depend on γ and γ is reported as 1.
fn natural(t: &[f64]) -> (f64, f64, f64) {
    match *t {
        [a, b] => (a, b, 1.0),
        [a, b, d] => (a, b, if b == 0.0 { 1.0 } else { -d / b }),
        _ => unreachable!("two or three regression coefficients"),
    }
}

fn fit_independent(data: &[MatchObservation], family: ModelFamily, tol: f64) -> Result<FitResult> {
    let six = family.free_gamma();
    let feats = |own: f64, opp: f64| if six { vec![1.0, own, opp] } else { vec![1.0, own - opp] };
    let home: Vec<_> = data.iter().map(|o| feats(o.home_rating.value(), o.away_rating.value())).collect();
    let away: Vec<_> = data.iter().map(|o| feats(o.away_rating.value(), o.home_rating.value())).collect();
    let yh: Vec<f64> = data.iter().map(|o| f64::from(o.score.home)).collect();
    let ya: Vec<f64> = data.iter().map(|o| f64::from(o.score.away)).collect();

    let (mh, ma) = rayon::join(|| fit_side(home, yh, tol), || fit_side(away, ya, tol));
    let (alpha_h, beta_h, gamma_h) = natural(&mh.x);
    let (alpha_a, beta_a, gamma_a) = natural(&ma.x);
    let params = ModelParams { family, alpha_h, alpha_a, beta_h, beta_a, gamma_h, gamma_a, c: 0.0 };
    Ok(FitResult {
        params,
        log_likelihood: log_likelihood(&params, data)?,
        converged: mh.converged && ma.converged,
        iterations: mh.iterations.max(ma.iterations),
        gradient_norm: (mh.gradient_norm.powi(2) + ma.gradient_norm.powi(2)).sqrt(),
        bootstrap_ci: None,
    })
}

#[allow(clippy::needless_range_loop)]
fn fit_bivariate(data: &[MatchObservation], tol: f64) -> Result<FitResult> {
    let start = fit_independent(data, ModelFamily::SixPCoeff, tol)?.params;
    let n = data.len() as f64;
    let to_params = |t: &[f64]| {
        let mut v = t.to_vec();
        v[6] = t[6].exp();
        with_values(ModelFamily::BivariateCoeff, &v)
    };
    // Mean log-likelihood and gradient in (α, β, γ, ln c).
    let value_grad = |t: &[f64]| -> (f64, Vec<f64>) {
        let p = to_params(t);
        let f = log_likelihood(&p, data).unwrap_or(f64::NEG_INFINITY) / n;
        let mut g = log_likelihood_gradient(&p, data).unwrap_or_else(|_| vec![f64::NAN; 7]);
        g[6] *= p.c;
        g.iter_mut().for_each(|v| *v /= n);
        (f, g)
    };
    let eval = |t: &[f64]| {
        let (f, g) = value_grad(t);
        if !f.is_finite() {
            return (f, g, vec![vec![0.0; 7]; 7]);
        }
        let mut h = vec![vec![0.0; 7]; 7];
        for j in 0..7 {
            let step = 1e-5 * t[j].abs().max(1.0);
            let mut up = t.to_vec();
            let mut dn = t.to_vec();
            up[j] += step;
            dn[j] -= step;
            let (_, gu) = value_grad(&up);
            let (_, gd) = value_grad(&dn);
            for i in 0..7 {
                h[i][j] = (gu[i] - gd[i]) / (2.0 * step);
            }
        }
        for i in 0..7 {
            for j in 0..i {
                let m = 0.5 * (h[i][j] + h[j][i]);
                h[i][j] = m;
                h[j][i] = m;
            }
        }
        (f, g, h)
    };
    let mut x0 = param_values(&start);
    x0.push(0.05f64.ln());
    let m = maximize(eval, x0, tol);
    let params = to_params(&m.x);
    Ok(FitResult {
        params,
        log_likelihood: m.value * n,
        converged: m.converged,
        iterations: m.iterations,
        gradient_norm: m.gradient_norm,
        bootstrap_ci: None,
    })
}

/// Maximum-likelihood estimate. `tolerance` bounds the norm of the gradient
/// of the mean log-likelihood.
pub fn fit_mle(data: &[MatchObservation], family: ModelFamily, tolerance: f64) -> Result<FitResult> {
    if family == ModelFamily::Baseline {
        return Err(Error::UnsupportedFamily(family.to_string()));
    }
    if data.len() < MIN_OBSERVATIONS {
        return Err(Error::InsufficientData(format!(
            "{} observations, at least {MIN_OBSERVATIONS} required",
            data.len()
        )));
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance {tolerance} must be positive")));
    }
    if family.is_bivariate() {
        fit_bivariate(data, tolerance)
    } else {
        fit_independent(data, family, tolerance)
    }
}

/// Linear-interpolation quantile of sorted values.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Percentile bootstrap intervals from `b` resamples. Resample `i` draws from
/// its own stream of `seed`, so the result does not depend on scheduling.
pub fn bootstrap_ci(
    data: &[MatchObservation],
    family: ModelFamily,
    b: usize,
    seed: u64,
    tolerance: f64,
) -> Result<Vec<ParamInterval>> {
    if b < 100 {
        return Err(Error::InvalidParameter(format!("bootstrap needs B >= 100, got {b}")));
    }
    if data.len() < MIN_OBSERVATIONS {
        return Err(Error::InsufficientData(format!(
            "{} observations, at least {MIN_OBSERVATIONS} required",
            data.len()
        )));
    }
    let base = ChaCha8Rng::seed_from_u64(seed);
    let fits: Vec<Option<Vec<f64>>> = (0..b)
        .into_par_iter()
        .map(|i| {
            let mut rng = base.clone();
            rng.set_stream(i as u64);
            let sample: Vec<MatchObservation> =
                (0..data.len()).map(|_| data[rng.random_range(0..data.len())].clone()).collect();
            match fit_mle(&sample, family, tolerance) {
                Ok(f) if f.converged => Some(param_values(&f.params)),
                _ => None,
            }
        })
        .collect();
    let ok: Vec<Vec<f64>> = fits.into_iter().flatten().collect();
    let dropped = b - ok.len();
    if dropped * 10 > b {
        return Err(Error::BootstrapUnstable { dropped, total: b });
    }
    Ok(parameter_names(family)
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let mut v: Vec<f64> = ok.iter().map(|p| p[j]).collect();
            v.sort_by(f64::total_cmp);
            ParamInterval { name: (*name).to_string(), lower: quantile(&v, 0.025), upper: quantile(&v, 0.975) }
        })
        .collect())
}

/// A metric averaged per season and over all matches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupedMetric {
    /// Seasons in order of first appearance.
    pub per_group: Vec<(String, f64)>,
    pub pooled: f64,
}

fn grouped<F: Fn(&MatchObservation) -> f64 + Sync>(data: &[MatchObservation], f: F) -> GroupedMetric {
    let values: Vec<f64> = data.par_iter().map(&f).collect();
    let mut order: Vec<String> = Vec::new();
    let mut sums: HashMap<&str, (f64, usize)> = HashMap::new();
    for (o, v) in data.iter().zip(&values) {
        let e = sums.entry(o.season.as_str()).or_insert_with(|| {
            order.push(o.season.clone());
            (0.0, 0)
        });
        e.0 += v;
        e.1 += 1;
    }
    let per_group = order
        .into_iter()
        .map(|s| {
            let (sum, n) = sums[s.as_str()];
            (s, sum / n as f64)
        })
        .collect();
    let pooled = if values.is_empty() { 0.0 } else { values.iter().sum::<f64>() / values.len() as f64 };
    GroupedMetric { per_group, pooled }
}

/// Mean probability the model gives to the realised exact scores.
pub fn avg_hit_probability(model: &dyn ScorePredictor, data: &[MatchObservation]) -> GroupedMetric {
    grouped(data, |o| model.score_probability(o.home_rating, o.away_rating, o.score))
}

fn check_pi(pi: f64) -> Result<()> {
    if pi > 0.5 && pi < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("pi = {pi} must lie in (1/2, 1)")))
    }
}

/// `sqrt(dh² + da² − 2π·dh·da)`: a joint shift of both scores costs less than
/// a one-sided change.
pub fn score_distance(r1: Score, r2: Score, pi: f64) -> Result<f64> {
    check_pi(pi)?;
    let dh = f64::from(r1.home) - f64::from(r2.home);
    let da = f64::from(r1.away) - f64::from(r2.away);
    Ok((dh * dh + da * da - 2.0 * pi * dh * da).max(0.0).sqrt())
}

/// Outcome penalty: 0 for the same outcome, 1 between a draw and a decision,
/// 2 between a home and an away win.
pub fn outcome_penalty(r1: Score, r2: Score) -> f64 {
    use Outcome::*;
    match (r1.outcome(), r2.outcome()) {
        (a, b) if a == b => 0.0,
        (HomeWin, AwayWin) | (AwayWin, HomeWin) => 2.0,
        _ => 1.0,
    }
}

/// [`score_distance`] plus [`outcome_penalty`].
pub fn outcome_distance(r1: Score, r2: Score, pi: f64) -> Result<f64> {
    Ok(score_distance(r1, r2, pi)? + outcome_penalty(r1, r2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceMetric {
    Score,
    ScoreAndOutcome,
}

/// Expected distance between the realised score and a forecast drawn from the
/// model, with the forecast support truncated at [`FORECAST_MAX_GOALS`] and
/// renormalised.
pub fn avg_distance(
    model: &dyn ScorePredictor,
    data: &[MatchObservation],
    metric: DistanceMetric,
    pi: f64,
) -> Result<GroupedMetric> {
    check_pi(pi)?;
    let dist = |a: Score, b: Score| {
        let d = score_distance(a, b, pi).expect("pi checked");
        match metric {
            DistanceMetric::Score => d,
            DistanceMetric::ScoreAndOutcome => d + outcome_penalty(a, b),
        }
    };
    Ok(grouped(data, |o| {
        let mut mass = 0.0;
        let mut acc = 0.0;
        for h in 0..=FORECAST_MAX_GOALS {
            for a in 0..=FORECAST_MAX_GOALS {
                let f = Score::new(h, a);
                let p = model.score_probability(o.home_rating, o.away_rating, f);
                mass += p;
                acc += p * dist(o.score, f);
            }
        }
        if mass > 0.0 {
            acc / mass
        } else {
            f64::NAN
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::PotSlot;
    use crate::model::{poisson_pmf, BaselineTable};

    fn pot(i: u8) -> Rating {
        Rating::pot(PotSlot::new(i).unwrap())
    }

    fn obs(season: &str, h: u8, a: u8, hg: u16, ag: u16) -> MatchObservation {
        MatchObservation::new(season, pot(h), pot(a), Score::new(hg, ag)).unwrap()
    }

    struct Fixed(Vec<(Score, f64)>);

    impl ScorePredictor for Fixed {
        fn score_probability(&self, _: Rating, _: Rating, s: Score) -> f64 {
            self.0.iter().find(|(t, _)| *t == s).map_or(0.0, |(_, p)| *p)
        }
    }

    #[test]
    fn distance_matrix_cells() {
        let d = |a: (u16, u16), b: (u16, u16)| score_distance(Score::new(a.0, a.1), Score::new(b.0, b.1), 0.9).unwrap();
        assert!((d((1, 1), (2, 2)) - 0.447).abs() < 5e-4);
        assert!((d((2, 0), (1, 2)) - 2.933).abs() < 5e-4);
        assert!((d((0, 0), (3, 0)) - 3.0).abs() < 1e-12);
        assert_eq!(d((3, 1), (3, 1)), 0.0);
    }

    #[test]
    fn pi_range_enforced() {
        let s = Score::new(0, 0);
        assert!(score_distance(s, s, 0.5).is_err());
        assert!(score_distance(s, s, 1.0).is_err());
        assert!(score_distance(s, s, 0.4).is_err());
        assert!(score_distance(s, s, 0.51).is_ok());
    }

    #[test]
    fn outcome_distance_examples() {
        let d =
            |a: (u16, u16), b: (u16, u16)| outcome_distance(Score::new(a.0, a.1), Score::new(b.0, b.1), 0.9).unwrap();
        assert!((d((2, 1), (5, 1)) - 3.0).abs() < 1e-12);
        assert!((d((2, 1), (1, 1)) - 2.0).abs() < 1e-12);
        assert!((d((2, 0), (0, 2)) - (8.0f64 + 7.2).sqrt() - 2.0).abs() < 1e-12);
        assert_eq!(d((1, 1), (1, 1)), 0.0);
    }

    #[test]
    fn hit_probability_worked_example() {
        let data = vec![obs("a", 1, 2, 1, 0), obs("a", 3, 4, 2, 2)];
        let m = Fixed(vec![(Score::new(1, 0), 0.1), (Score::new(2, 2), 0.06)]);
        let r = avg_hit_probability(&m, &data);
        assert!((r.pooled - 0.08).abs() < 1e-15);
        assert_eq!(r.per_group.len(), 1);
    }

    #[test]
    fn baseline_on_own_data_is_sum_of_squares() {
        let data = vec![obs("x", 1, 2, 1, 0), obs("x", 1, 3, 1, 0), obs("y", 2, 3, 0, 0), obs("y", 4, 1, 2, 1)];
        let t = BaselineTable::from_scores(data.iter().map(|o| o.score)).unwrap();
        let r = avg_hit_probability(&t, &data);
        let expect = 0.5f64.powi(2) + 0.25f64.powi(2) * 2.0;
        assert!((r.pooled - expect).abs() < 1e-15);
        assert_eq!(r.per_group[0], ("x".to_string(), 0.5));
        assert_eq!(r.per_group[1], ("y".to_string(), 0.25));
    }

    #[test]
    fn distance_of_point_mass_and_two_point_model() {
        let data = vec![obs("s", 1, 2, 1, 1)];
        let point = Fixed(vec![(Score::new(1, 1), 1.0)]);
        let r = avg_distance(&point, &data, DistanceMetric::Score, 0.9).unwrap();
        assert_eq!(r.pooled, 0.0);
        let r = avg_distance(&point, &data, DistanceMetric::ScoreAndOutcome, 0.9).unwrap();
        assert_eq!(r.pooled, 0.0);
        let two = Fixed(vec![(Score::new(1, 1), 0.5), (Score::new(2, 2), 0.5)]);
        let r = avg_distance(&two, &data, DistanceMetric::Score, 0.9).unwrap();
        assert!((r.pooled - 0.5 * 0.2f64.sqrt()).abs() < 1e-12);
        assert!((r.pooled - 0.224).abs() < 1e-3);
    }

    #[test]
    fn single_match_log_likelihood() {
        let p = ModelParams::four_p_pot();
        let o = obs("s", 2, 3, 2, 1);
        let (lh, la) = rates(&p, pot(2), pot(3)).unwrap();
        let ll = log_likelihood(&p, std::slice::from_ref(&o)).unwrap();
        assert!((ll - (poisson_pmf(lh, 2).ln() + poisson_pmf(la, 1).ln())).abs() < 1e-12);
        let ll2 = log_likelihood(&p, &[o.clone(), o]).unwrap();
        assert!((ll2 - 2.0 * ll).abs() < 1e-12);
        assert!(log_likelihood(&p, &[]).is_err());
    }

    #[test]
    fn fit_preconditions() {
        let data: Vec<_> = (0..10).map(|_| obs("s", 1, 2, 1, 0)).collect();
        assert!(matches!(fit_mle(&data, ModelFamily::FourPPot, 1e-8), Err(Error::InsufficientData(_))));
        assert!(matches!(fit_mle(&data, ModelFamily::Baseline, 1e-8), Err(Error::UnsupportedFamily(_))));
        assert!(bootstrap_ci(&data, ModelFamily::FourPPot, 50, 1, 1e-8).is_err());
    }

    #[test]
    fn all_goalless_data() {
        let pots = [(1, 2), (2, 1), (3, 4), (4, 3), (1, 4), (2, 3)];
        let data: Vec<_> = (0..60)
            .map(|i| {
                let (h, a) = pots[i % pots.len()];
                obs("s", h, a, 0, 0)
            })
            .collect();
        let f = fit_mle(&data, ModelFamily::FourPPot, 1e-8).unwrap();
        assert!(f.converged);
        assert!(f.params.alpha_h < -15.0 && f.params.alpha_a < -15.0);
        assert!(f.params.beta_h.is_finite() && f.params.beta_a.is_finite());
    }

    #[test]
    fn constant_data_gives_zero_width_intervals() {
        let data: Vec<_> = (0..60).map(|_| obs("s", 1, 3, 2, 1)).collect();
        // One rating difference only: the slope is not identified, but every
        // resample is identical so every refit is too.
        let ci = bootstrap_ci(&data, ModelFamily::FourPPot, 100, 7, 1e-8).unwrap();
        for c in ci {
            assert_eq!(c.lower, c.upper, "{}", c.name);
        }
    }

    #[test]
    fn kv_report_reads_back_as_params() {
        let data: Vec<_> = (0..60)
            .map(|i| obs("s", 1 + (i % 4) as u8, 1 + ((i + 1) % 4) as u8, (i % 3) as u16, (i % 2) as u16))
            .collect();
        let f = fit_mle(&data, ModelFamily::FourPPot, 1e-8).unwrap();
        let back = ModelParams::from_kv_str(&f.to_kv_string()).unwrap();
        assert_eq!(back, f.params);
    }
}
