//! Reverse-mode differentiation over a linear record of tensor operations.
//!
//! Every operation appends a node whose inputs have smaller indices, so
//! walking the node list backwards visits each node after all of its
//! consumers. A tape is single use: once [`Tape::backward`] has run it is
//! spent and a second pass is refused.

use std::collections::BTreeMap;

use crate::autodiff::Tensor;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Handle to a node recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
enum Op<T> {
    Leaf,
    MatMul(Var, Var),
    Add(Var, Var),
    AddRow(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Min(Var, Var),
    Scale(Var, T),
    Shift(Var),
    Tanh(Var),
    Sigmoid(Var),
    Exp(Var),
    Ln(Var),
    Softplus(Var),
    Square(Var),
    Clamp(Var, T, T),
    ConcatCols(Vec<Var>),
    SliceCols(Var, usize),
    SumCols(Var),
    Sum(Var),
    Mean(Var),
}

#[derive(Debug, Clone)]
struct Node<T> {
    value: Tensor<T>,
    op: Op<T>,
    needs_grad: bool,
}

/// Gradients keyed by parameter name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Gradients<T> {
    map: BTreeMap<String, Tensor<T>>,
}

impl<T: Scalar> Gradients<T> {
    pub fn get(&self, name: &str) -> Option<&Tensor<T>> {
        self.map.get(name)
    }

    pub fn insert(&mut self, name: String, grad: Tensor<T>) {
        self.map.insert(name, grad);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Tensor<T>)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Keeps only the gradients whose name starts with `prefix`.
    pub fn with_prefix(&self, prefix: &str) -> Self {
        Gradients {
            map: self
                .map
                .iter()
                .filter(|(k, _)| k.starts_with(prefix))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Tape<T> {
    nodes: Vec<Node<T>>,
    params: Vec<(String, Var)>,
    spent: bool,
}

impl<T: Scalar> Default for Tape<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Tape<T> {
    pub fn new() -> Self {
        Tape {
            nodes: Vec::with_capacity(256),
            params: Vec::new(),
            spent: false,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_spent(&self) -> bool {
        self.spent
    }

    pub fn value(&self, v: Var) -> &Tensor<T> {
        &self.nodes[v.0].value
    }

    fn push(&mut self, value: Tensor<T>, op: Op<T>, needs_grad: bool) -> Var {
        self.nodes.push(Node {
            value,
            op,
            needs_grad,
        });
        Var(self.nodes.len() - 1)
    }

    fn needs(&self, v: Var) -> bool {
        self.nodes[v.0].needs_grad
    }

    /// A value that receives no gradient.
    pub fn constant(&mut self, value: Tensor<T>) -> Var {
        self.push(value, Op::Leaf, false)
    }

    /// A named trainable leaf; its gradient is reported by `backward`.
    pub fn param(&mut self, name: impl Into<String>, value: Tensor<T>) -> Var {
        let v = self.push(value, Op::Leaf, true);
        self.params.push((name.into(), v));
        v
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let (m, k) = self.value(a).dims2();
        let (k2, n) = self.value(b).dims2();
        assert_eq!(k, k2, "matmul inner dimensions {k} vs {k2}");
        let mut out = vec![T::zero(); m * n];
        T::gemm(
            m,
            k,
            n,
            T::one(),
            self.value(a).data(),
            false,
            self.value(b).data(),
            false,
            T::zero(),
            &mut out,
        );
        let ng = self.needs(a) || self.needs(b);
        self.push(Tensor::new(vec![m, n], out).unwrap(), Op::MatMul(a, b), ng)
    }

    fn binary(&mut self, a: Var, b: Var, op: Op<T>, f: impl Fn(T, T) -> T) -> Var {
        let va = self.value(a);
        let vb = self.value(b);
        assert_eq!(va.shape(), vb.shape(), "elementwise operands differ in shape");
        let out = va.zip_map(vb, f);
        let ng = self.needs(a) || self.needs(b);
        self.push(out, op, ng)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        self.binary(a, b, Op::Add(a, b), |x, y| x + y)
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        self.binary(a, b, Op::Sub(a, b), |x, y| x - y)
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        self.binary(a, b, Op::Mul(a, b), |x, y| x * y)
    }

    /// Elementwise minimum; ties route the gradient to `a`.
    pub fn min(&mut self, a: Var, b: Var) -> Var {
        self.binary(a, b, Op::Min(a, b), |x, y| if y < x { y } else { x })
    }

    /// Adds a row vector (`[n]` or `[1, n]`) to every row of `a`.
    pub fn add_row(&mut self, a: Var, row: Var) -> Var {
        let (m, n) = self.value(a).dims2();
        let r = self.value(row);
        assert_eq!(r.len(), n, "row broadcast width");
        let mut out = self.value(a).data().to_vec();
        for chunk in out.chunks_mut(n.max(1)) {
            for (o, &b) in chunk.iter_mut().zip(r.data()) {
                *o += b;
            }
        }
        let ng = self.needs(a) || self.needs(row);
        let shape = self.value(a).shape().to_vec();
        let _ = m;
        self.push(Tensor::new(shape, out).unwrap(), Op::AddRow(a, row), ng)
    }

    fn unary(&mut self, a: Var, op: Op<T>, f: impl Fn(T) -> T) -> Var {
        let out = self.value(a).map(f);
        let ng = self.needs(a);
        self.push(out, op, ng)
    }

    pub fn scale(&mut self, a: Var, s: T) -> Var {
        self.unary(a, Op::Scale(a, s), |x| x * s)
    }

    pub fn neg(&mut self, a: Var) -> Var {
        self.scale(a, -T::one())
    }

    pub fn shift(&mut self, a: Var, s: T) -> Var {
        self.unary(a, Op::Shift(a), |x| x + s)
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        self.unary(a, Op::Tanh(a), |x| x.tanh())
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        self.unary(a, Op::Sigmoid(a), sigmoid)
    }

    pub fn exp(&mut self, a: Var) -> Var {
        self.unary(a, Op::Exp(a), |x| x.exp())
    }

    pub fn ln(&mut self, a: Var) -> Var {
        self.unary(a, Op::Ln(a), |x| x.ln())
    }

    /// `ln(1 + e^x)`, evaluated without overflow.
    pub fn softplus(&mut self, a: Var) -> Var {
        self.unary(a, Op::Softplus(a), softplus)
    }

    pub fn square(&mut self, a: Var) -> Var {
        self.unary(a, Op::Square(a), |x| x * x)
    }

    /// Clamps to `[lo, hi]`; the gradient is zero where the bound is active.
    pub fn clamp(&mut self, a: Var, lo: T, hi: T) -> Var {
        self.unary(a, Op::Clamp(a, lo, hi), |x| x.max(lo).min(hi))
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Var {
        assert!(!parts.is_empty());
        let rows = self.value(parts[0]).dims2().0;
        let widths: Vec<usize> = parts
            .iter()
            .map(|&p| {
                let (r, c) = self.value(p).dims2();
                assert_eq!(r, rows, "concat row count");
                c
            })
            .collect();
        let total: usize = widths.iter().sum();
        let mut out = Vec::with_capacity(rows * total);
        for i in 0..rows {
            for &p in parts {
                out.extend_from_slice(self.value(p).row(i));
            }
        }
        let ng = parts.iter().any(|&p| self.needs(p));
        self.push(
            Tensor::new(vec![rows, total], out).unwrap(),
            Op::ConcatCols(parts.to_vec()),
            ng,
        )
    }

    pub fn slice_cols(&mut self, a: Var, start: usize, width: usize) -> Var {
        let (rows, cols) = self.value(a).dims2();
        assert!(start + width <= cols, "column slice out of range");
        let src = self.value(a).data();
        let mut out = Vec::with_capacity(rows * width);
        for i in 0..rows {
            out.extend_from_slice(&src[i * cols + start..i * cols + start + width]);
        }
        let ng = self.needs(a);
        self.push(
            Tensor::new(vec![rows, width], out).unwrap(),
            Op::SliceCols(a, start),
            ng,
        )
    }

    /// Row sums, `[m, n] -> [m, 1]`.
    pub fn sum_cols(&mut self, a: Var) -> Var {
        let (rows, cols) = self.value(a).dims2();
        let src = self.value(a).data();
        let out: Vec<T> = (0..rows)
            .map(|i| src[i * cols..(i + 1) * cols].iter().copied().sum())
            .collect();
        let ng = self.needs(a);
        self.push(Tensor::new(vec![rows, 1], out).unwrap(), Op::SumCols(a), ng)
    }

    pub fn sum(&mut self, a: Var) -> Var {
        let s: T = self.value(a).data().iter().copied().sum();
        let ng = self.needs(a);
        self.push(Tensor::scalar(s), Op::Sum(a), ng)
    }

    pub fn mean(&mut self, a: Var) -> Var {
        let v = self.value(a);
        let s: T = v.data().iter().copied().sum::<T>() / T::of(v.len() as f64);
        let ng = self.needs(a);
        self.push(Tensor::scalar(s), Op::Mean(a), ng)
    }

    /// Back-propagates from a scalar `loss` with unit seed.
    pub fn backward(&mut self, loss: Var) -> Result<Gradients<T>> {
        let seed = Tensor::full(self.value(loss).shape(), T::one());
        self.backward_seeded(loss, seed)
    }

    /// Back-propagates `seed = d(objective)/d(loss)`; `loss` must be scalar.
    pub fn backward_seeded(&mut self, loss: Var, seed: Tensor<T>) -> Result<Gradients<T>> {
        if self.spent {
            return Err(Error::TapeSpent);
        }
        if self.value(loss).len() != 1 {
            return Err(Error::NonScalarLoss(self.value(loss).shape().to_vec()));
        }
        if seed.len() != 1 {
            return Err(Error::NonScalarLoss(seed.shape().to_vec()));
        }
        self.spent = true;

        let mut grads: Vec<Option<Vec<T>>> = vec![None; loss.0 + 1];
        grads[loss.0] = Some(seed.into_data());

        for idx in (0..=loss.0).rev() {
            let Some(g) = grads[idx].take() else { continue };
            if !self.nodes[idx].needs_grad {
                continue;
            }
            let op = &self.nodes[idx].op;
            match op {
                Op::Leaf => {
                    grads[idx] = Some(g);
                }
                Op::MatMul(a, b) => {
                    let (m, k) = self.value(*a).dims2();
                    let (_, n) = self.value(*b).dims2();
                    if self.needs(*a) {
                        let mut ga = vec![T::zero(); m * k];
                        // dA = dC * B^T
                        T::gemm(m, n, k, T::one(), &g, false, self.value(*b).data(), true, T::zero(), &mut ga);
                        accumulate(&mut grads, *a, ga);
                    }
                    if self.needs(*b) {
                        let mut gb = vec![T::zero(); k * n];
                        // dB = A^T * dC
                        T::gemm(k, m, n, T::one(), self.value(*a).data(), true, &g, false, T::zero(), &mut gb);
                        accumulate(&mut grads, *b, gb);
                    }
                }
                Op::Add(a, b) => {
                    if self.needs(*b) {
                        accumulate(&mut grads, *b, g.clone());
                    }
                    if self.needs(*a) {
                        accumulate(&mut grads, *a, g);
                    }
                }
                Op::AddRow(a, row) => {
                    if self.needs(*row) {
                        let n = self.value(*row).len();
                        let mut gr = vec![T::zero(); n];
                        for chunk in g.chunks(n.max(1)) {
                            for (o, &x) in gr.iter_mut().zip(chunk) {
                                *o += x;
                            }
                        }
                        accumulate(&mut grads, *row, gr);
                    }
                    if self.needs(*a) {
                        accumulate(&mut grads, *a, g);
                    }
                }
                Op::Sub(a, b) => {
                    if self.needs(*b) {
                        accumulate(&mut grads, *b, g.iter().map(|&x| -x).collect());
                    }
                    if self.needs(*a) {
                        accumulate(&mut grads, *a, g);
                    }
                }
                Op::Mul(a, b) => {
                    if self.needs(*a) {
                        let gb = self.value(*b).data();
                        accumulate(&mut grads, *a, g.iter().zip(gb).map(|(&x, &y)| x * y).collect());
                    }
                    if self.needs(*b) {
                        let ga = self.value(*a).data();
                        accumulate(&mut grads, *b, g.iter().zip(ga).map(|(&x, &y)| x * y).collect());
                    }
                }
                Op::Min(a, b) => {
                    let va = self.value(*a).data();
                    let vb = self.value(*b).data();
                    if self.needs(*a) {
                        let ga = g
                            .iter()
                            .zip(va.iter().zip(vb))
                            .map(|(&x, (&p, &q))| if q < p { T::zero() } else { x })
                            .collect();
                        accumulate(&mut grads, *a, ga);
                    }
                    if self.needs(*b) {
                        let gb = g
                            .iter()
                            .zip(va.iter().zip(vb))
                            .map(|(&x, (&p, &q))| if q < p { x } else { T::zero() })
                            .collect();
                        accumulate(&mut grads, *b, gb);
                    }
                }
                Op::Scale(a, s) => {
                    let s = *s;
                    accumulate(&mut grads, *a, g.iter().map(|&x| x * s).collect());
                }
                Op::Shift(a) => accumulate(&mut grads, *a, g),
                Op::Tanh(a) => {
                    let y = self.nodes[idx].value.data();
                    let a = *a;
                    accumulate(&mut grads, a, g.iter().zip(y).map(|(&x, &t)| x * (T::one() - t * t)).collect());
                }
                Op::Sigmoid(a) => {
                    let y = self.nodes[idx].value.data();
                    let a = *a;
                    accumulate(&mut grads, a, g.iter().zip(y).map(|(&x, &s)| x * s * (T::one() - s)).collect());
                }
                Op::Exp(a) => {
                    let y = self.nodes[idx].value.data();
                    let a = *a;
                    accumulate(&mut grads, a, g.iter().zip(y).map(|(&x, &e)| x * e).collect());
                }
                Op::Ln(a) => {
                    let xa = self.value(*a).data();
                    accumulate(&mut grads, *a, g.iter().zip(xa).map(|(&x, &v)| x / v).collect());
                }
                Op::Softplus(a) => {
                    let xa = self.value(*a).data();
                    accumulate(&mut grads, *a, g.iter().zip(xa).map(|(&x, &v)| x * sigmoid(v)).collect());
                }
                Op::Square(a) => {
                    let xa = self.value(*a).data();
                    let two = T::of(2.0);
                    accumulate(&mut grads, *a, g.iter().zip(xa).map(|(&x, &v)| x * two * v).collect());
                }
                Op::Clamp(a, lo, hi) => {
                    let (lo, hi) = (*lo, *hi);
                    let xa = self.value(*a).data();
                    let ga = g
                        .iter()
                        .zip(xa)
                        .map(|(&x, &v)| if v < lo || v > hi { T::zero() } else { x })
                        .collect();
                    accumulate(&mut grads, *a, ga);
                }
                Op::ConcatCols(parts) => {
                    let (rows, total) = self.nodes[idx].value.dims2();
                    let mut offset = 0;
                    for &p in parts {
                        let w = self.value(p).dims2().1;
                        if self.needs(p) {
                            let mut gp = Vec::with_capacity(rows * w);
                            for i in 0..rows {
                                gp.extend_from_slice(&g[i * total + offset..i * total + offset + w]);
                            }
                            accumulate(&mut grads, p, gp);
                        }
                        offset += w;
                    }
                }
                Op::SliceCols(a, start) => {
                    let (rows, cols) = self.value(*a).dims2();
                    let w = self.nodes[idx].value.dims2().1;
                    let mut ga = vec![T::zero(); rows * cols];
                    for i in 0..rows {
                        ga[i * cols + start..i * cols + start + w].copy_from_slice(&g[i * w..(i + 1) * w]);
                    }
                    accumulate(&mut grads, *a, ga);
                }
                Op::SumCols(a) => {
                    let (rows, cols) = self.value(*a).dims2();
                    let mut ga = Vec::with_capacity(rows * cols);
                    for &x in g.iter().take(rows) {
                        ga.extend(std::iter::repeat_n(x, cols));
                    }
                    accumulate(&mut grads, *a, ga);
                }
                Op::Sum(a) => {
                    let n = self.value(*a).len();
                    accumulate(&mut grads, *a, vec![g[0]; n]);
                }
                Op::Mean(a) => {
                    let n = self.value(*a).len();
                    let x = g[0] / T::of(n as f64);
                    accumulate(&mut grads, *a, vec![x; n]);
                }
            }
        }

        let mut out = Gradients::default();
        for (name, v) in &self.params {
            let shape = self.value(*v).shape().to_vec();
            let g = match grads.get_mut(v.0).and_then(Option::take) {
                Some(data) => Tensor::new(shape, data).expect("gradient layout matches value"),
                None => Tensor::zeros(&shape),
            };
            match out.map.get_mut(name) {
                Some(existing) => {
                    for (e, x) in existing.data_mut().iter_mut().zip(g.data()) {
                        *e += *x;
                    }
                }
                None => {
                    out.map.insert(name.clone(), g);
                }
            }
        }
        Ok(out)
    }
}

fn accumulate<T: Scalar>(grads: &mut [Option<Vec<T>>], v: Var, g: Vec<T>) {
    match &mut grads[v.0] {
        Some(existing) => {
            for (e, x) in existing.iter_mut().zip(g) {
                *e += x;
            }
        }
        slot @ None => *slot = Some(g),
    }
}

pub(crate) fn sigmoid<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

pub(crate) fn softplus<T: Scalar>(x: T) -> T {
    // ln(1 + e^x) = max(x, 0) + ln(1 + e^-|x|)
    x.max(T::zero()) + (-x.abs()).exp().ln_1p()
}
