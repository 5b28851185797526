use crate::autodiff::{Tape, Tensor, Var};
use crate::error::{Error, Result};
use crate::nn::{Bound, Head, ParamSet, Role};
use crate::scalar::Scalar;

/// Fully connected layer `y = act(x W + b)` with parameters `{name}.W`, `{name}.b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dense {
    pub name: String,
    pub input: usize,
    pub output: usize,
    pub activation: Head,
}

impl Dense {
    pub fn new(name: impl Into<String>, input: usize, output: usize, activation: Head) -> Self {
        Dense {
            name: name.into(),
            input,
            output,
            activation,
        }
    }

    pub fn apply<T: Scalar>(&self, tape: &mut Tape<T>, p: &Bound, x: Var) -> Result<Var> {
        let cols = tape.value(x).dims2().1;
        if cols != self.input {
            return Err(Error::Shape {
                layer: self.name.clone(),
                expected: vec![self.input],
                got: tape.value(x).shape().to_vec(),
            });
        }
        let y = tape.matmul(x, p.var(&format!("{}.W", self.name))?);
        let y = tape.add_row(y, p.var(&format!("{}.b", self.name))?);
        Ok(match self.activation {
            Head::Linear => y,
            Head::Tanh => tape.tanh(y),
        })
    }

    /// Convenience evaluation of a `[batch, input]` tensor.
    pub fn eval<T: Scalar>(&self, params: &ParamSet<T>, x: &Tensor<T>) -> Result<Tensor<T>> {
        let mut tape = Tape::new();
        let p = params.bind(&mut tape, false);
        let (r, c) = x.dims2();
        let xv = tape.constant(x.clone().reshaped(vec![r, c])?);
        let y = self.apply(&mut tape, &p, xv)?;
        Ok(tape.value(y).clone())
    }

    pub fn zeros<T: Scalar>(&self, role: Role) -> ParamSet<T> {
        let mut ps = ParamSet::new(role);
        ps.insert(format!("{}.W", self.name), Tensor::zeros(&[self.input, self.output]));
        ps.insert(format!("{}.b", self.name), Tensor::zeros(&[self.output]));
        ps
    }
}
