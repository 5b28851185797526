//! Adam with bias correction, and Polyak averaging for target networks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::autodiff::{Gradients, Tensor};
use crate::error::{Error, Result};
use crate::nn::ParamSet;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment estimates for every parameter of one network.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    pub config: AdamConfig,
    pub step: u64,
    pub m: BTreeMap<String, Tensor<T>>,
    pub v: BTreeMap<String, Tensor<T>>,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(params: &ParamSet<T>, config: AdamConfig) -> Self {
        let zeros: BTreeMap<_, _> = params
            .iter()
            .map(|(k, t)| (k.clone(), Tensor::zeros(t.shape())))
            .collect();
        AdamState {
            config,
            step: 0,
            m: zeros.clone(),
            v: zeros,
        }
    }

    /// One bias-corrected Adam update of `params` along `grads`.
    ///
    /// `grads` must name exactly the parameters in `params`. Nothing is
    /// modified when a gradient is non-finite.
    pub fn apply(&mut self, params: &mut ParamSet<T>, grads: &Gradients<T>) -> Result<()> {
        if grads.len() != params.len() {
            return Err(Error::GradientCoverage(format!(
                "{} gradients for {} parameters of {}",
                grads.len(),
                params.len(),
                params.role()
            )));
        }
        for (name, t) in params.iter() {
            let g = grads
                .get(name)
                .ok_or_else(|| Error::GradientCoverage(format!("no gradient for `{name}`")))?;
            if g.shape() != t.shape() {
                return Err(Error::Shape {
                    layer: name.clone(),
                    expected: t.shape().to_vec(),
                    got: g.shape().to_vec(),
                });
            }
            if !g.all_finite() {
                return Err(Error::NonFiniteGradient(name.clone()));
            }
        }

        self.step += 1;
        let c = self.config;
        let (b1, b2) = (T::of(c.beta1), T::of(c.beta2));
        let bc1 = T::of(1.0 - c.beta1.powi(self.step as i32));
        let bc2 = T::of(1.0 - c.beta2.powi(self.step as i32));
        let (lr, eps) = (T::of(c.lr), T::of(c.eps));
        for (name, p) in params.iter_mut() {
            let g = grads.get(name).expect("checked above");
            let m = self.m.entry(name.clone()).or_insert_with(|| Tensor::zeros(p.shape()));
            let v = self.v.entry(name.clone()).or_insert_with(|| Tensor::zeros(p.shape()));
            for (((pi, &gi), mi), vi) in p
                .data_mut()
                .iter_mut()
                .zip(g.data())
                .zip(m.data_mut())
                .zip(v.data_mut())
            {
                *mi = b1 * *mi + (T::one() - b1) * gi;
                *vi = b2 * *vi + (T::one() - b2) * gi * gi;
                let m_hat = *mi / bc1;
                let v_hat = *vi / bc2;
                *pi -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
        Ok(())
    }
}

/// `target <- tau * source + (1 - tau) * target`, elementwise.
pub fn soft_update<T: Scalar>(target: &mut ParamSet<T>, source: &ParamSet<T>, tau: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::Config(format!("soft-update rate {tau} outside [0, 1]")));
    }
    target.check_same_layout(source)?;
    let tau_t = T::of(tau);
    let keep = T::of(1.0 - tau);
    for ((_, t), (_, s)) in target.iter_mut().zip(source.iter()) {
        if tau == 1.0 {
            t.data_mut().copy_from_slice(s.data());
        } else if tau != 0.0 {
            for (x, &y) in t.data_mut().iter_mut().zip(s.data()) {
                *x = tau_t * y + keep * *x;
            }
        }
    }
    Ok(())
}
