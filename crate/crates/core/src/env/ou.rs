//! Ornstein-Uhlenbeck process, used for wind gusts and exploration noise.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuParams {
    /// Mean reversion rate.
    pub theta: f64,
    /// Volatility.
    pub sigma: f64,
    pub mu: f64,
}

impl OuParams {
    pub fn new(theta: f64, sigma: f64) -> Self {
        OuParams { theta, sigma, mu: 0.0 }
    }

    /// Variance of the continuous-time stationary distribution.
    pub fn stationary_variance(&self) -> f64 {
        self.sigma * self.sigma / (2.0 * self.theta)
    }
}

/// Independent OU processes, one per component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuProcess {
    pub params: OuParams,
    pub value: Vec<f64>,
}

impl OuProcess {
    pub fn new(params: OuParams, dims: usize) -> Self {
        OuProcess {
            params,
            value: vec![params.mu; dims],
        }
    }

    pub fn reset(&mut self) {
        let mu = self.params.mu;
        self.value.iter_mut().for_each(|x| *x = mu);
    }

    /// Euler-Maruyama step: `x += theta (mu - x) dt + sigma sqrt(dt) eta`.
    pub fn step<R: Rng + ?Sized>(&mut self, dt: f64, rng: &mut R) {
        let OuParams { theta, sigma, mu } = self.params;
        let sq = dt.sqrt();
        for x in &mut self.value {
            let eta: f64 = rng.sample(StandardNormal);
            *x += theta * (mu - *x) * dt + sigma * sq * eta;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noiseless_decay() {
        let mut p = OuProcess::new(OuParams::new(1.0, 0.0), 1);
        p.value[0] = 1.0;
        p.step(0.1, &mut ChaCha8Rng::seed_from_u64(0));
        assert!((p.value[0] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn rest_at_mean_stays() {
        let mut p = OuProcess::new(OuParams::new(0.5, 0.0), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10 {
            p.step(0.1, &mut rng);
        }
        assert_eq!(p.value, vec![0.0, 0.0]);
    }
}
