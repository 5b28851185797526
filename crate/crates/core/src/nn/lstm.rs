//! Single-layer LSTM followed by a dense head.
//!
//! Gate layout inside the fused `4 * hidden` pre-activation is
//! `[input, forget, cell, output]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{Tape, Tensor, Var};
use crate::error::{Error, Result};
use crate::nn::{Bound, Dense, ParamSet, Role};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Head {
    Linear,
    Tanh,
}

/// Architecture of an LSTM network. Parameter names are prefixed by `name`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LstmNet {
    pub name: String,
    pub input: usize,
    pub hidden: usize,
    pub output: usize,
    pub head: Head,
}

/// Recurrent state for a batch: `h` and `c` are `[batch, hidden]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState<T> {
    pub h: Tensor<T>,
    pub c: Tensor<T>,
}

impl<T: Scalar> LstmState<T> {
    pub fn zeros(batch: usize, hidden: usize) -> Self {
        LstmState {
            h: Tensor::zeros(&[batch, hidden]),
            c: Tensor::zeros(&[batch, hidden]),
        }
    }

    pub fn reset(&mut self) {
        self.h.data_mut().iter_mut().for_each(|x| *x = T::zero());
        self.c.data_mut().iter_mut().for_each(|x| *x = T::zero());
    }
}

/// Recurrent state living on a tape.
#[derive(Debug, Clone, Copy)]
pub struct StateVars {
    pub h: Var,
    pub c: Var,
}

/// Output of a one-step [`LstmNet::forward`].
#[derive(Debug)]
pub struct Forward<T> {
    pub output: Tensor<T>,
    pub state: LstmState<T>,
    pub tape: Tape<T>,
    /// Handle of `output` on `tape`.
    pub output_var: Var,
}

impl LstmNet {
    pub fn new(name: impl Into<String>, input: usize, hidden: usize, output: usize, head: Head) -> Self {
        LstmNet {
            name: name.into(),
            input,
            hidden,
            output,
            head,
        }
    }

    pub fn param_name(&self, local: &str) -> String {
        format!("{}.{local}", self.name)
    }

    /// Fresh parameters: inputs weights uniform in `±1/sqrt(fan_in)`, zero
    /// biases except the forget gate, which starts at +1.
    pub fn init<T: Scalar, R: Rng + ?Sized>(&self, role: Role, rng: &mut R) -> ParamSet<T> {
        let h4 = 4 * self.hidden;
        let mut uniform = |shape: &[usize], fan_in: usize| {
            let bound = 1.0 / (fan_in as f64).sqrt();
            Tensor::from_fn(shape, |_| T::of(rng.random_range(-bound..=bound)))
        };
        let w_x = uniform(&[self.input, h4], self.input);
        let w_h = uniform(&[self.hidden, h4], self.hidden);
        let head_w = uniform(&[self.hidden, self.output], self.hidden);
        let mut b = Tensor::zeros(&[h4]);
        for x in &mut b.data_mut()[self.hidden..2 * self.hidden] {
            *x = T::one();
        }
        let mut ps = ParamSet::new(role);
        ps.insert(self.param_name("lstm.W_x"), w_x);
        ps.insert(self.param_name("lstm.W_h"), w_h);
        ps.insert(self.param_name("lstm.b"), b);
        ps.insert(self.param_name("head.W"), head_w);
        ps.insert(self.param_name("head.b"), Tensor::zeros(&[self.output]));
        ps
    }

    /// All-zero parameters with the right layout.
    pub fn zeros<T: Scalar>(&self, role: Role) -> ParamSet<T> {
        let h4 = 4 * self.hidden;
        let mut ps = ParamSet::new(role);
        ps.insert(self.param_name("lstm.W_x"), Tensor::zeros(&[self.input, h4]));
        ps.insert(self.param_name("lstm.W_h"), Tensor::zeros(&[self.hidden, h4]));
        ps.insert(self.param_name("lstm.b"), Tensor::zeros(&[h4]));
        ps.insert(self.param_name("head.W"), Tensor::zeros(&[self.hidden, self.output]));
        ps.insert(self.param_name("head.b"), Tensor::zeros(&[self.output]));
        ps
    }

    /// Errors with the offending layer name if `params` does not fit this net.
    pub fn check_params<T: Scalar>(&self, params: &ParamSet<T>) -> Result<()> {
        let expect = self.zeros::<T>(params.role());
        for (name, t) in expect.iter() {
            let got = params
                .get(name)
                .ok_or_else(|| Error::ParamMismatch(format!("missing parameter `{name}`")))?;
            if got.shape() != t.shape() {
                return Err(Error::Shape {
                    layer: name.clone(),
                    expected: t.shape().to_vec(),
                    got: got.shape().to_vec(),
                });
            }
        }
        Ok(())
    }

    pub fn zero_state_vars<T: Scalar>(&self, tape: &mut Tape<T>, batch: usize) -> StateVars {
        StateVars {
            h: tape.constant(Tensor::zeros(&[batch, self.hidden])),
            c: tape.constant(Tensor::zeros(&[batch, self.hidden])),
        }
    }

    /// One recurrent step for a `[batch, input]` input.
    pub fn cell<T: Scalar>(&self, tape: &mut Tape<T>, p: &Bound, x: Var, s: StateVars) -> Result<StateVars> {
        let (_, cols) = tape.value(x).dims2();
        if cols != self.input {
            return Err(Error::Shape {
                layer: self.param_name("lstm"),
                expected: vec![self.input],
                got: tape.value(x).shape().to_vec(),
            });
        }
        let hs = self.hidden;
        let xw = tape.matmul(x, p.var(&self.param_name("lstm.W_x"))?);
        let hw = tape.matmul(s.h, p.var(&self.param_name("lstm.W_h"))?);
        let z = tape.add(xw, hw);
        let z = tape.add_row(z, p.var(&self.param_name("lstm.b"))?);
        let zi = tape.slice_cols(z, 0, hs);
        let zf = tape.slice_cols(z, hs, hs);
        let zg = tape.slice_cols(z, 2 * hs, hs);
        let zo = tape.slice_cols(z, 3 * hs, hs);
        let i = tape.sigmoid(zi);
        let f = tape.sigmoid(zf);
        let g = tape.tanh(zg);
        let o = tape.sigmoid(zo);
        let fc = tape.mul(f, s.c);
        let ig = tape.mul(i, g);
        let c = tape.add(fc, ig);
        let tc = tape.tanh(c);
        let h = tape.mul(o, tc);
        Ok(StateVars { h, c })
    }

    pub fn head_layer(&self) -> Dense {
        Dense::new(self.param_name("head"), self.hidden, self.output, self.head)
    }

    pub fn head<T: Scalar>(&self, tape: &mut Tape<T>, p: &Bound, h: Var) -> Result<Var> {
        self.head_layer().apply(tape, p, h)
    }

    /// Runs a sequence from the zero state and returns the head output at the
    /// final step.
    pub fn forward_sequence<T: Scalar>(&self, tape: &mut Tape<T>, p: &Bound, inputs: &[Var]) -> Result<Var> {
        assert!(!inputs.is_empty(), "empty input sequence");
        let batch = tape.value(inputs[0]).dims2().0;
        let mut s = self.zero_state_vars(tape, batch);
        for &x in inputs {
            s = self.cell(tape, p, x, s)?;
        }
        self.head(tape, p, s.h)
    }

    /// One step from an explicit state, recording a fresh tape with the
    /// parameters bound as trainable leaves.
    pub fn forward<T: Scalar>(&self, params: &ParamSet<T>, input: &Tensor<T>, state: &LstmState<T>) -> Result<Forward<T>> {
        self.check_params(params)?;
        let (rows, cols) = input.dims2();
        if cols != self.input {
            return Err(Error::Shape {
                layer: self.param_name("lstm"),
                expected: vec![rows, self.input],
                got: input.shape().to_vec(),
            });
        }
        if state.h.dims2() != (rows, self.hidden) || state.c.dims2() != (rows, self.hidden) {
            return Err(Error::Shape {
                layer: self.param_name("lstm.state"),
                expected: vec![rows, self.hidden],
                got: state.h.shape().to_vec(),
            });
        }
        let mut tape = Tape::new();
        let p = params.bind(&mut tape, true);
        let x = tape.constant(input.clone().reshaped(vec![rows, cols])?);
        let s = StateVars {
            h: tape.constant(state.h.clone()),
            c: tape.constant(state.c.clone()),
        };
        let s = self.cell(&mut tape, &p, x, s)?;
        let out = self.head(&mut tape, &p, s.h)?;
        Ok(Forward {
            output: tape.value(out).clone(),
            state: LstmState {
                h: tape.value(s.h).clone(),
                c: tape.value(s.c).clone(),
            },
            output_var: out,
            tape,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sig(x: f64) -> f64 {
        1.0 / (1.0 + (-x).exp())
    }

    /// Scalar re-implementation of the LSTM equations, one unit at a time.
    fn reference_cell(net: &LstmNet, p: &ParamSet<f64>, x: &[f64], h: &[f64], c: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let hs = net.hidden;
        let wx = p.get("n.lstm.W_x").unwrap().data();
        let wh = p.get("n.lstm.W_h").unwrap().data();
        let b = p.get("n.lstm.b").unwrap().data();
        let pre = |gate: usize, j: usize| {
            let col = gate * hs + j;
            let mut z = b[col];
            for (k, xk) in x.iter().enumerate() {
                z += xk * wx[k * 4 * hs + col];
            }
            for (k, hk) in h.iter().enumerate() {
                z += hk * wh[k * 4 * hs + col];
            }
            z
        };
        let mut h2 = vec![0.0; hs];
        let mut c2 = vec![0.0; hs];
        for j in 0..hs {
            let ig = sig(pre(0, j));
            let fg = sig(pre(1, j));
            let gg = pre(2, j).tanh();
            let og = sig(pre(3, j));
            c2[j] = fg * c[j] + ig * gg;
            h2[j] = og * c2[j].tanh();
        }
        let hw = p.get("n.head.W").unwrap().data();
        let hb = p.get("n.head.b").unwrap().data();
        let out = (0..net.output)
            .map(|o| hb[o] + (0..hs).map(|j| h2[j] * hw[j * net.output + o]).sum::<f64>())
            .collect();
        (out, h2, c2)
    }

    #[test]
    fn zero_weights_give_zero_output() {
        let net = LstmNet::new("n", 5, 4, 3, Head::Tanh);
        let p = net.zeros::<f64>(Role::Actor);
        let x = Tensor::vector(vec![1.0, -2.0, 3.0, 0.5, 9.0]);
        let f = net.forward(&p, &x, &LstmState::zeros(1, 4)).unwrap();
        assert_eq!(f.output.data(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn matches_scalar_reference_over_a_sequence() {
        let net = LstmNet::new("n", 3, 4, 2, Head::Linear);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = net.init::<f64, _>(Role::Actor, &mut rng);
        let mut state = LstmState::zeros(1, 4);
        let (mut h, mut c) = (vec![0.0; 4], vec![0.0; 4]);
        for step in 0..5 {
            let x: Vec<f64> = (0..3).map(|i| ((step * 3 + i) as f64 * 0.7).sin()).collect();
            let f = net.forward(&p, &Tensor::vector(x.clone()), &state).unwrap();
            let (out, h2, c2) = reference_cell(&net, &p, &x, &h, &c);
            for (a, b) in f.output.data().iter().zip(&out) {
                assert!((a - b).abs() < 1e-12, "step {step}: {a} vs {b}");
            }
            for (a, b) in f.state.h.data().iter().zip(&h2) {
                assert!((a - b).abs() < 1e-12);
            }
            state = f.state;
            h = h2;
            c = c2;
        }
    }

    #[test]
    fn wrong_input_width_names_the_layer() {
        let net = LstmNet::new("actor", 26, 8, 3, Head::Tanh);
        let p = net.zeros::<f64>(Role::Actor);
        let err = net
            .forward(&p, &Tensor::vector(vec![0.0; 25]), &LstmState::zeros(1, 8))
            .unwrap_err();
        assert!(err.to_string().contains("actor.lstm"), "{err}");
    }

    #[test]
    fn forget_bias_starts_at_one() {
        let net = LstmNet::new("n", 2, 3, 1, Head::Linear);
        let p = net.init::<f64, _>(Role::Critic1, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(p.get("n.lstm.b").unwrap().data(), &[0., 0., 0., 1., 1., 1., 0., 0., 0., 0., 0., 0.]);
    }

    #[test]
    fn reset_state_reproduces_outputs() {
        let net = LstmNet::new("n", 2, 3, 1, Head::Linear);
        let p = net.init::<f64, _>(Role::Critic1, &mut ChaCha8Rng::seed_from_u64(3));
        let seq = [vec![0.1, 0.2], vec![-0.3, 0.9], vec![0.5, 0.5]];
        let run = |state: &mut LstmState<f64>| {
            let mut outs = Vec::new();
            for x in &seq {
                let f = net.forward(&p, &Tensor::vector(x.clone()), state).unwrap();
                *state = f.state;
                outs.push(f.output.item());
            }
            outs
        };
        let mut state = LstmState::zeros(1, 3);
        let first = run(&mut state);
        state.reset();
        assert_eq!(run(&mut state), first);
    }
}
