//! Moments, dependence measures, and EWMA volatility estimation.
//!
//! All moments use the population convention (divide by n): sampled losses
//! are treated as complete discrete distributions, matching the
//! equal-probability semantics used everywhere else in this crate.

use crate::linalg::Mat;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("sample must be non-empty")]
    EmptySample,
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("samples have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("correlation is undefined for a constant sample")]
    ConstantSample,
    #[error("EWMA decay must lie in (0, 1), got {0}")]
    BadDecay(f64),
    #[error("horizon must be at least one day")]
    BadHorizon,
    #[error("price history needs at least two rows")]
    TooFewPrices,
    #[error("malformed price history: {0}")]
    BadPriceRow(String),
}

/// An ordered sequence of real observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample(Vec<f64>);

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self, StatsError> {
        if values.is_empty() {
            return Err(StatsError::EmptySample);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        Ok(Sample(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // non-empty by construction
    }
}

pub fn mean(s: &Sample) -> f64 {
    s.values().iter().sum::<f64>() / s.len() as f64
}

/// Population variance (1/n).
pub fn variance(s: &Sample) -> f64 {
    let m = mean(s);
    s.values().iter().map(|v| (v - m) * (v - m)).sum::<f64>() / s.len() as f64
}

pub fn std_dev(s: &Sample) -> f64 {
    variance(s).sqrt()
}

/// Population covariance; requires matching lengths.
pub fn covariance(a: &Sample, b: &Sample) -> Result<f64, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    let (ma, mb) = (mean(a), mean(b));
    let n = a.len() as f64;
    Ok(a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / n)
}

pub fn correlation(a: &Sample, b: &Sample) -> Result<f64, StatsError> {
    let cov = covariance(a, b)?;
    let (va, vb) = (variance(a), variance(b));
    if va <= 0.0 || vb <= 0.0 {
        return Err(StatsError::ConstantSample);
    }
    Ok(cov / (va.sqrt() * vb.sqrt()))
}

/// Third standardized moment.
pub fn skewness(s: &Sample) -> f64 {
    let (m, sd) = (mean(s), std_dev(s));
    if sd == 0.0 {
        return 0.0;
    }
    s.values().iter().map(|v| ((v - m) / sd).powi(3)).sum::<f64>() / s.len() as f64
}

/// Fourth standardized moment (normal = 3; no excess correction).
pub fn kurtosis(s: &Sample) -> f64 {
    let (m, sd) = (mean(s), std_dev(s));
    if sd == 0.0 {
        return 0.0;
    }
    s.values().iter().map(|v| ((v - m) / sd).powi(4)).sum::<f64>() / s.len() as f64
}

/// Pairwise population covariance matrix of equally long samples.
pub fn covariance_matrix(samples: &[Sample]) -> Result<Mat, StatsError> {
    let n = samples.len();
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let c = covariance(&samples[i], &samples[j])?;
            m[(i, j)] = c;
            m[(j, i)] = c;
        }
    }
    Ok(m)
}

/// State of an exponentially weighted moving-average estimator.
///
/// `var_estimate` tracks a single series, `cov_estimate` a pair; each update
/// touches only its own field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EwmaState {
    pub lambda: f64,
    pub var_estimate: f64,
    pub cov_estimate: f64,
}

/// The conventional daily decay parameter.
pub const EWMA_DEFAULT_LAMBDA: f64 = 0.94;

impl EwmaState {
    /// Fresh state with both estimates at zero.
    pub fn new(lambda: f64) -> Result<Self, StatsError> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(StatsError::BadDecay(lambda));
        }
        Ok(EwmaState { lambda, var_estimate: 0.0, cov_estimate: 0.0 })
    }
}

/// Var_t = lambda * Var_{t-1} + (1 - lambda) * r^2.
pub fn ewma_update_var(state: EwmaState, r_prev: f64) -> EwmaState {
    EwmaState {
        var_estimate: state.lambda * state.var_estimate + (1.0 - state.lambda) * r_prev * r_prev,
        ..state
    }
}

/// Cov_t = lambda * Cov_{t-1} + (1 - lambda) * r_a * r_b.
pub fn ewma_update_cov(state: EwmaState, r_a: f64, r_b: f64) -> EwmaState {
    EwmaState {
        cov_estimate: state.lambda * state.cov_estimate + (1.0 - state.lambda) * r_a * r_b,
        ..state
    }
}

/// Scales daily (co)variances to an n-day holding period.
pub fn scale_horizon(m: &Mat, n_days: u32) -> Result<Mat, StatsError> {
    if n_days < 1 {
        return Err(StatsError::BadHorizon);
    }
    Ok(m.scale(n_days as f64))
}

/// Daily log returns ln(P_t / P_{t-1}).
pub fn log_returns(prices: &[f64]) -> Vec<f64> {
    prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect()
}

/// A two-asset daily price history.
#[derive(Debug, Clone)]
pub struct PriceHistory {
    pub dates: Vec<String>,
    pub prices_a: Vec<f64>,
    pub prices_b: Vec<f64>,
}

impl PriceHistory {
    /// Parses CSV with header `date,price_a,price_b`.
    pub fn from_csv(text: &str) -> Result<Self, StatsError> {
        let mut dates = Vec::new();
        let mut prices_a = Vec::new();
        let mut prices_b = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if idx == 0 {
                if line != "date,price_a,price_b" {
                    return Err(StatsError::BadPriceRow(format!("unexpected header `{line}`")));
                }
                continue;
            }
            let mut parts = line.split(',');
            let (date, a, b) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(d), Some(a), Some(b), None) => (d, a, b),
                _ => return Err(StatsError::BadPriceRow(line.to_string())),
            };
            let a: f64 = a.parse().map_err(|_| StatsError::BadPriceRow(line.to_string()))?;
            let b: f64 = b.parse().map_err(|_| StatsError::BadPriceRow(line.to_string()))?;
            dates.push(date.to_string());
            prices_a.push(a);
            prices_b.push(b);
        }
        if prices_a.len() < 2 {
            return Err(StatsError::TooFewPrices);
        }
        Ok(PriceHistory { dates, prices_a, prices_b })
    }

    /// Runs the full EWMA chain over the history and returns the final
    /// daily covariance matrix [[var_a, cov], [cov, var_b]].
    pub fn ewma_covariance(&self, lambda: f64) -> Result<Mat, StatsError> {
        let ra = log_returns(&self.prices_a);
        let rb = log_returns(&self.prices_b);
        let mut va = EwmaState::new(lambda)?;
        let mut vb = EwmaState::new(lambda)?;
        let mut cab = EwmaState::new(lambda)?;
        for (a, b) in ra.iter().zip(&rb) {
            va = ewma_update_var(va, *a);
            vb = ewma_update_var(vb, *b);
            cab = ewma_update_cov(cab, *a, *b);
        }
        let mut m = Mat::zeros(2, 2);
        m[(0, 0)] = va.var_estimate;
        m[(1, 1)] = vb.var_estimate;
        m[(0, 1)] = cab.cov_estimate;
        m[(1, 0)] = cab.cov_estimate;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{streams, Stream};

    fn s(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn mean_basics() {
        assert_eq!(mean(&s(&[1.0, 2.0, 3.0])), 2.0);
        assert_eq!(mean(&s(&[100.0])), 100.0);
        assert_eq!(Sample::new(vec![]), Err(StatsError::EmptySample));
        assert_eq!(Sample::new(vec![f64::NAN]), Err(StatsError::NonFinite));
    }

    #[test]
    fn variance_is_self_covariance() {
        let x = s(&[3.0, 1.0, 4.0, 1.0, 5.0, 9.0]);
        let v = variance(&x);
        let c = covariance(&x, &x).unwrap();
        assert_eq!(v, c);
    }

    #[test]
    fn covariance_length_mismatch() {
        let e = covariance(&s(&[1.0, 2.0]), &s(&[1.0, 2.0, 3.0]));
        assert_eq!(e, Err(StatsError::LengthMismatch(2, 3)));
    }

    #[test]
    fn correlation_bounds_and_errors() {
        let x = s(&[1.0, 2.0, 3.0, 4.0]);
        let y = s(&[2.0, 4.0, 6.0, 8.0]);
        assert!((correlation(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        let z = s(&[5.0, 5.0, 5.0, 5.0]);
        assert_eq!(correlation(&x, &z), Err(StatsError::ConstantSample));
    }

    #[test]
    fn correlation_of_independent_streams_is_small() {
        let n = 40_000;
        let mut rng = Stream::new(101, streams::TEST);
        let a: Vec<f64> = (0..n).map(|_| rng.gaussian()).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gaussian()).collect();
        let rho = correlation(&s(&a), &s(&b)).unwrap();
        assert!(rho.abs() < 3.0 / (n as f64).sqrt(), "rho = {rho}");
    }

    #[test]
    fn skewness_of_symmetric_sample_is_zero() {
        assert!(skewness(&s(&[-1.0, 0.0, 1.0])).abs() < 1e-15);
    }

    #[test]
    fn kurtosis_of_two_point_sample() {
        // Symmetric two-point distribution has kurtosis 1.
        assert!((kurtosis(&s(&[-1.0, 1.0])) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ewma_first_step_and_decay() {
        let st = EwmaState::new(0.94).unwrap();
        let st = ewma_update_var(st, 0.1);
        assert!((st.var_estimate - 0.0006).abs() < 1e-18);
        let st2 = ewma_update_var(st, 0.0);
        assert!((st2.var_estimate - 0.94 * st.var_estimate).abs() < 1e-18);
    }

    #[test]
    fn ewma_cov_first_step() {
        let st = EwmaState::new(0.94).unwrap();
        let st = ewma_update_cov(st, 0.1, -0.2);
        assert!((st.cov_estimate - 0.06 * 0.1 * (-0.2)).abs() < 1e-18);
        let st2 = ewma_update_cov(st, 0.0, 5.0);
        assert!((st2.cov_estimate - 0.94 * st.cov_estimate).abs() < 1e-18);
    }

    #[test]
    fn ewma_var_stays_nonnegative() {
        let mut rng = Stream::new(5, streams::TEST);
        let mut st = EwmaState::new(0.94).unwrap();
        for _ in 0..1000 {
            st = ewma_update_var(st, rng.gaussian() * 0.05);
            assert!(st.var_estimate >= 0.0);
        }
    }

    #[test]
    fn ewma_decay_validation() {
        assert!(EwmaState::new(0.0).is_err());
        assert!(EwmaState::new(1.0).is_err());
    }

    #[test]
    fn scale_horizon_identity_and_linearity() {
        let m = Mat::from_rows(&[vec![0.2, 0.1], vec![0.1, 0.3]]);
        assert_eq!(scale_horizon(&m, 1).unwrap(), m);
        let m2 = scale_horizon(&m, 2).unwrap();
        assert_eq!(m2[(0, 0)], 0.4);
        assert_eq!(m2[(0, 1)], 0.2);
        assert!(scale_horizon(&m, 0).is_err());
    }

    #[test]
    fn assembled_covariance_matrix_is_psd() {
        use crate::linalg::jacobi_eigenvalues;
        let mut rng = Stream::new(77, streams::TEST);
        for _ in 0..10 {
            let k = 200;
            let common: Vec<f64> = (0..k).map(|_| rng.gaussian()).collect();
            let samples: Vec<Sample> = (0..4)
                .map(|_| {
                    let v: Vec<f64> =
                        common.iter().map(|c| 0.5 * c + rng.gaussian()).collect();
                    Sample::new(v).unwrap()
                })
                .collect();
            let m = covariance_matrix(&samples).unwrap();
            let eig = jacobi_eigenvalues(&m);
            assert!(eig[0] >= -1e-10, "min eigenvalue {}", eig[0]);
        }
    }

    #[test]
    fn price_history_parsing_rejects_garbage() {
        assert!(PriceHistory::from_csv("date,price_a,price_b\n2015-01-02,1.0,2.0").is_err());
        assert!(PriceHistory::from_csv("nope\n2015-01-02,1.0,2.0\n2015-01-03,1.0,2.0").is_err());
        assert!(
            PriceHistory::from_csv("date,price_a,price_b\n2015-01-02,1.0\n2015-01-03,1.0,2.0")
                .is_err()
        );
        let ok = PriceHistory::from_csv("date,price_a,price_b\n2015-01-02,1,2\n2015-01-05,3,4");
        assert!(ok.is_ok());
    }
}
