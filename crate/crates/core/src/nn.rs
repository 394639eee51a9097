//! Dense-stack numerical core: batched forward/backward passes, Adam, and
//! finite-difference gradient checking.
//!
//! There is no general tape: every supported architecture is a static stack
//! of fully connected layers with one hidden activation, so per-layer
//! adjoint rules are enough. All arithmetic is f64; reductions run in a
//! fixed order so repeated runs are bit-identical.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum NnError {
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("layer shapes do not chain: layer {layer} expects input {expected}, previous produces {got}")]
    BadChain { layer: usize, expected: usize, got: usize },
    #[error("empty batch")]
    EmptyBatch,
    #[error("non-finite value produced at layer {layer}")]
    NonFinite { layer: usize },
}

/// Hidden-layer activation of a dense stack. The output layer is always
/// linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    Identity,
    Relu,
    /// `sin(omega0 * u)`; omega0 scales the pre-activation of every hidden
    /// layer, first included.
    Sine { omega0: f64 },
    /// Real Gabor wavelet `cos(omega0 * u) * exp(-(s0 * u)^2)`.
    Gabor { omega0: f64, s0: f64 },
}

impl Activation {
    #[inline]
    pub fn apply(&self, u: f64) -> f64 {
        match *self {
            Activation::Identity => u,
            Activation::Relu => {
                if u > 0.0 {
                    u
                } else {
                    0.0
                }
            }
            Activation::Sine { omega0 } => math::sin(omega0 * u),
            Activation::Gabor { omega0, s0 } => {
                let t = s0 * u;
                math::cos(omega0 * u) * math::exp(-t * t)
            }
        }
    }

    /// Activation value and derivative w.r.t. the pre-activation.
    #[inline]
    pub fn apply_with_grad(&self, u: f64) -> (f64, f64) {
        match *self {
            Activation::Identity => (u, 1.0),
            Activation::Relu => {
                if u > 0.0 {
                    (u, 1.0)
                } else {
                    (0.0, 0.0)
                }
            }
            Activation::Sine { omega0 } => {
                let (s, c) = math::sin_cos(omega0 * u);
                (s, omega0 * c)
            }
            Activation::Gabor { omega0, s0 } => {
                let t = s0 * u;
                let env = math::exp(-t * t);
                let (s, c) = math::sin_cos(omega0 * u);
                (c * env, env * (-omega0 * s - 2.0 * s0 * t * c))
            }
        }
    }
}

/// Weights and bias of one fully connected layer; `w` is `out_dim x in_dim`
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub in_dim: usize,
    pub out_dim: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl LayerParams {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        LayerParams {
            in_dim,
            out_dim,
            w: vec![0.0; in_dim * out_dim],
            b: vec![0.0; out_dim],
        }
    }

    pub fn param_count(&self) -> usize {
        self.w.len() + self.b.len()
    }
}

/// Per-layer gradients, same shapes as [`LayerParams`].
#[derive(Debug, Clone)]
pub struct LayerGrads {
    pub dw: Vec<f64>,
    pub db: Vec<f64>,
}

impl LayerGrads {
    pub fn zeros_like(layer: &LayerParams) -> Self {
        LayerGrads {
            dw: vec![0.0; layer.w.len()],
            db: vec![0.0; layer.b.len()],
        }
    }
}

/// A feed-forward stack of dense layers with one hidden activation.
#[derive(Debug, Clone, PartialEq)]
pub struct Stack {
    pub layers: Vec<LayerParams>,
    pub hidden: Activation,
}

impl Stack {
    pub fn new(layers: Vec<LayerParams>, hidden: Activation) -> Result<Self, NnError> {
        if layers.is_empty() {
            return Err(NnError::EmptyBatch);
        }
        for l in 1..layers.len() {
            if layers[l].in_dim != layers[l - 1].out_dim {
                return Err(NnError::BadChain {
                    layer: l,
                    expected: layers[l].in_dim,
                    got: layers[l - 1].out_dim,
                });
            }
        }
        Ok(Stack { layers, hidden })
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(LayerParams::param_count).sum()
    }

    /// Flat view of all parameters in layer order, `w` then `b` per layer.
    pub fn for_each_param_mut(&mut self, mut f: impl FnMut(usize, &mut f64)) {
        let mut idx = 0;
        for layer in &mut self.layers {
            for p in layer.w.iter_mut().chain(layer.b.iter_mut()) {
                f(idx, p);
                idx += 1;
            }
        }
    }
}

/// `y = x * W^T + b` for a row-major batch `x` of `rows` samples.
fn linear_forward(layer: &LayerParams, x: &[f64], rows: usize, y: &mut [f64]) {
    debug_assert_eq!(x.len(), rows * layer.in_dim);
    debug_assert_eq!(y.len(), rows * layer.out_dim);
    for row in 0..rows {
        y[row * layer.out_dim..(row + 1) * layer.out_dim].copy_from_slice(&layer.b);
    }
    if rows == 0 {
        return;
    }
    unsafe {
        matrixmultiply::dgemm(
            rows,
            layer.in_dim,
            layer.out_dim,
            1.0,
            x.as_ptr(),
            layer.in_dim as isize,
            1,
            layer.w.as_ptr(),
            1,
            layer.in_dim as isize,
            1.0,
            y.as_mut_ptr(),
            layer.out_dim as isize,
            1,
        );
    }
}

/// Batched forward pass; `x` is `rows x in_dim` row-major, the result is
/// `rows x out_dim`. Pure: identical inputs give bit-identical outputs.
pub fn forward(stack: &Stack, x: &[f64], rows: usize) -> Result<Vec<f64>, NnError> {
    if rows == 0 {
        return Err(NnError::EmptyBatch);
    }
    if x.len() != rows * stack.in_dim() {
        return Err(NnError::ShapeMismatch {
            expected: rows * stack.in_dim(),
            got: x.len(),
        });
    }
    let last = stack.layers.len() - 1;
    let mut cur = x.to_vec();
    for (l, layer) in stack.layers.iter().enumerate() {
        let mut y = vec![0.0; rows * layer.out_dim];
        linear_forward(layer, &cur, rows, &mut y);
        if l < last {
            for u in y.iter_mut() {
                *u = stack.hidden.apply(*u);
            }
        }
        cur = y;
    }
    Ok(cur)
}

/// Mean-squared error with a fixed sequential reduction order.
pub fn mse_loss(pred: &[f64], target: &[f64]) -> Result<f64, NnError> {
    if pred.len() != target.len() {
        return Err(NnError::ShapeMismatch {
            expected: target.len(),
            got: pred.len(),
        });
    }
    if pred.is_empty() {
        return Err(NnError::EmptyBatch);
    }
    let mut sum = 0.0;
    for (p, t) in pred.iter().zip(target) {
        let d = p - t;
        sum += d * d;
    }
    Ok(sum / pred.len() as f64)
}

/// Reverse-accumulation gradients of the MSE loss w.r.t. every stack
/// parameter, plus the loss value itself.
pub fn backward(
    stack: &Stack,
    x: &[f64],
    rows: usize,
    targets: &[f64],
) -> Result<(Vec<LayerGrads>, f64), NnError> {
    if rows == 0 {
        return Err(NnError::EmptyBatch);
    }
    if x.len() != rows * stack.in_dim() {
        return Err(NnError::ShapeMismatch {
            expected: rows * stack.in_dim(),
            got: x.len(),
        });
    }
    if targets.len() != rows * stack.out_dim() {
        return Err(NnError::ShapeMismatch {
            expected: rows * stack.out_dim(),
            got: targets.len(),
        });
    }
    let n_layers = stack.layers.len();
    let last = n_layers - 1;

    // Forward, caching each layer's input and the activation derivative of
    // every hidden pre-activation.
    let mut inputs: Vec<Vec<f64>> = Vec::with_capacity(n_layers);
    let mut act_grads: Vec<Vec<f64>> = Vec::with_capacity(last);
    let mut cur = x.to_vec();
    for (l, layer) in stack.layers.iter().enumerate() {
        let mut y = vec![0.0; rows * layer.out_dim];
        linear_forward(layer, &cur, rows, &mut y);
        if l < last {
            let mut dgrad = vec![0.0; y.len()];
            for (u, g) in y.iter_mut().zip(dgrad.iter_mut()) {
                let (a, da) = stack.hidden.apply_with_grad(*u);
                *u = a;
                *g = da;
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(NnError::NonFinite { layer: l });
            }
            act_grads.push(dgrad);
        } else if y.iter().any(|v| !v.is_finite()) {
            return Err(NnError::NonFinite { layer: l });
        }
        inputs.push(cur);
        cur = y;
    }
    let pred = cur;

    let n_out = pred.len();
    let mut loss = 0.0;
    let mut delta = vec![0.0; n_out];
    let scale = 2.0 / n_out as f64;
    for i in 0..n_out {
        let d = pred[i] - targets[i];
        loss += d * d;
        delta[i] = scale * d;
    }
    loss /= n_out as f64;

    let mut grads: Vec<LayerGrads> = stack.layers.iter().map(LayerGrads::zeros_like).collect();
    for l in (0..n_layers).rev() {
        let layer = &stack.layers[l];
        let a_in = &inputs[l];
        let g = &mut grads[l];
        // dW = delta^T * a_in
        unsafe {
            matrixmultiply::dgemm(
                layer.out_dim,
                rows,
                layer.in_dim,
                1.0,
                delta.as_ptr(),
                1,
                layer.out_dim as isize,
                a_in.as_ptr(),
                layer.in_dim as isize,
                1,
                0.0,
                g.dw.as_mut_ptr(),
                layer.in_dim as isize,
                1,
            );
        }
        for row in 0..rows {
            let d = &delta[row * layer.out_dim..(row + 1) * layer.out_dim];
            for (acc, v) in g.db.iter_mut().zip(d) {
                *acc += v;
            }
        }
        if l > 0 {
            // delta_prev = (delta * W) .* act'(u_prev)
            let mut dx = vec![0.0; rows * layer.in_dim];
            unsafe {
                matrixmultiply::dgemm(
                    rows,
                    layer.out_dim,
                    layer.in_dim,
                    1.0,
                    delta.as_ptr(),
                    layer.out_dim as isize,
                    1,
                    layer.w.as_ptr(),
                    layer.in_dim as isize,
                    1,
                    0.0,
                    dx.as_mut_ptr(),
                    layer.in_dim as isize,
                    1,
                );
            }
            for (v, g) in dx.iter_mut().zip(&act_grads[l - 1]) {
                *v *= g;
            }
            delta = dx;
        }
    }
    Ok((grads, loss))
}

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamHyper {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        AdamHyper {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First/second moment accumulators for every parameter, flat in layer
/// order (`w` then `b` per layer).
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub hyper: AdamHyper,
}

impl AdamState {
    pub fn new(param_count: usize, hyper: AdamHyper) -> Self {
        AdamState {
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
            t: 0,
            hyper,
        }
    }
}

/// One bias-corrected Adam update, in place.
pub fn adam_step(stack: &mut Stack, grads: &[LayerGrads], state: &mut AdamState) {
    debug_assert_eq!(grads.len(), stack.layers.len());
    state.t += 1;
    let h = state.hyper;
    let bc1 = 1.0 - libm::pow(h.beta1, state.t as f64);
    let bc2 = 1.0 - libm::pow(h.beta2, state.t as f64);
    let mut flat = Vec::with_capacity(state.m.len());
    for g in grads {
        flat.extend_from_slice(&g.dw);
        flat.extend_from_slice(&g.db);
    }
    let m = &mut state.m;
    let v = &mut state.v;
    stack.for_each_param_mut(|i, p| {
        let g = flat[i];
        m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g;
        v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g * g;
        let mhat = m[i] / bc1;
        let vhat = v[i] / bc2;
        *p -= h.lr * mhat / (math::sqrt(vhat) + h.eps);
    });
}

/// Relative error between analytic and central finite-difference gradients,
/// maximized over all parameters. `|a - b| / max(|a|, |b|, 1e-8)`.
pub fn gradcheck(stack: &mut Stack, x: &[f64], rows: usize, targets: &[f64], h: f64) -> Result<f64, NnError> {
    let (grads, _) = backward(stack, x, rows, targets)?;
    let mut flat = Vec::with_capacity(stack.param_count());
    for g in &grads {
        flat.extend_from_slice(&g.dw);
        flat.extend_from_slice(&g.db);
    }
    let mut max_rel = 0.0f64;
    for i in 0..flat.len() {
        let loss_at = |offset: f64, stack: &mut Stack| -> Result<f64, NnError> {
            let mut orig = 0.0;
            stack.for_each_param_mut(|j, p| {
                if j == i {
                    orig = *p;
                    *p += offset;
                }
            });
            let pred = forward(stack, x, rows)?;
            let loss = mse_loss(&pred, targets)?;
            stack.for_each_param_mut(|j, p| {
                if j == i {
                    *p = orig;
                }
            });
            Ok(loss)
        };
        let lp = loss_at(h, stack)?;
        let lm = loss_at(-h, stack)?;
        let fd = (lp - lm) / (2.0 * h);
        let a = flat[i];
        let rel = (a - fd).abs() / a.abs().max(fd.abs()).max(1e-8);
        if rel > max_rel {
            max_rel = rel;
        }
    }
    Ok(max_rel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_layer(w: &[f64], b: &[f64], in_dim: usize, out_dim: usize) -> Stack {
        Stack::new(
            vec![LayerParams {
                in_dim,
                out_dim,
                w: w.to_vec(),
                b: b.to_vec(),
            }],
            Activation::Identity,
        )
        .unwrap()
    }

    #[test]
    fn linear_layer_matches_by_hand() {
        let stack = single_layer(&[2.0, 0.0, 0.0], &[1.0], 3, 1);
        let out = forward(&stack, &[0.5, 0.0, 0.0], 1).unwrap();
        assert_eq!(out, vec![2.0]);
    }

    #[test]
    fn zero_network_with_sine_outputs_zero() {
        let stack = Stack::new(
            vec![
                LayerParams::zeros(3, 8),
                LayerParams::zeros(8, 8),
                LayerParams::zeros(8, 1),
            ],
            Activation::Sine { omega0: 30.0 },
        )
        .unwrap();
        let out = forward(&stack, &[0.3, -0.7, 0.1, 0.9, 0.2, -0.5], 2).unwrap();
        assert_eq!(out, vec![0.0, 0.0]);
    }

    #[test]
    fn forward_is_deterministic_over_duplicates() {
        let stack = Stack::new(
            vec![LayerParams {
                in_dim: 2,
                out_dim: 1,
                w: vec![0.3, -0.8],
                b: vec![0.1],
            }],
            Activation::Relu,
        )
        .unwrap();
        let x: Vec<f64> = core::iter::repeat([0.4, 0.6]).take(7).flatten().collect();
        let out = forward(&stack, &x, 7).unwrap();
        for o in &out {
            assert_eq!(*o, out[0]);
        }
    }

    #[test]
    fn one_param_quadratic_gradient() {
        // f(x) = w * x on the point (1, 0): loss = w^2, dL/dw = 2w.
        let stack = single_layer(&[3.0], &[], 1, 1);
        let mut stack = stack;
        stack.layers[0].b = vec![0.0];
        let (grads, loss) = backward(&stack, &[1.0], 1, &[0.0]).unwrap();
        assert!((loss - 9.0).abs() < 1e-12);
        assert!((grads[0].dw[0] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_fit_gives_zero_gradients() {
        let stack = single_layer(&[2.0, -1.0], &[0.5], 2, 1);
        let x = [0.3, 0.4, -0.2, 0.9];
        let pred = forward(&stack, &x, 2).unwrap();
        let (grads, loss) = backward(&stack, &x, 2, &pred).unwrap();
        assert_eq!(loss, 0.0);
        for g in &grads {
            assert!(g.dw.iter().all(|&v| v == 0.0));
            assert!(g.db.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn backward_loss_matches_separate_forward() {
        let mut stack = Stack::new(
            vec![LayerParams::zeros(2, 4), LayerParams::zeros(4, 1)],
            Activation::Sine { omega0: 3.0 },
        )
        .unwrap();
        for (i, w) in stack.layers[0].w.iter_mut().enumerate() {
            *w = 0.1 * (i as f64 + 1.0);
        }
        for (i, w) in stack.layers[1].w.iter_mut().enumerate() {
            *w = 0.2 - 0.05 * i as f64;
        }
        let x = [0.1, -0.4, 0.7, 0.2, -0.3, 0.9];
        let t = [0.5, -0.1, 0.3];
        let (_, loss) = backward(&stack, &x, 3, &t).unwrap();
        let pred = forward(&stack, &x, 3).unwrap();
        assert!((loss - mse_loss(&pred, &t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn gradcheck_linear_is_exact_to_rounding() {
        let mut stack = single_layer(&[0.7, -0.3, 0.2], &[0.1], 3, 1);
        let x = [0.5, -0.2, 0.8, 0.1, 0.4, -0.9];
        let t = [0.3, -0.6];
        let err = gradcheck(&mut stack, &x, 2, &t, 1e-4).unwrap();
        assert!(err < 1e-8, "relative error {err}");
    }

    #[test]
    fn adam_zero_gradient_is_identity() {
        let mut stack = single_layer(&[1.5, -2.5], &[0.25], 2, 1);
        let before = stack.clone();
        let grads = vec![LayerGrads::zeros_like(&stack.layers[0])];
        let mut state = AdamState::new(stack.param_count(), AdamHyper::default());
        adam_step(&mut stack, &grads, &mut state);
        assert_eq!(stack, before);
        assert_eq!(state.t, 1);
    }

    #[test]
    fn adam_first_step_moves_by_lr() {
        // Bias correction makes the first step ~= -lr * sign(g) when eps << |g|.
        let mut stack = single_layer(&[1.0], &[0.0], 1, 1);
        let grads = vec![LayerGrads {
            dw: vec![0.37],
            db: vec![-0.52],
        }];
        let hyper = AdamHyper::default();
        let mut state = AdamState::new(2, hyper);
        adam_step(&mut stack, &grads, &mut state);
        assert!((stack.layers[0].w[0] - (1.0 - hyper.lr)).abs() < 1e-6);
        assert!((stack.layers[0].b[0] - hyper.lr).abs() < 1e-6);
    }

    #[test]
    fn adam_is_deterministic() {
        let run = || {
            let mut stack = single_layer(&[0.9, 0.1], &[0.0], 2, 1);
            let mut state = AdamState::new(3, AdamHyper::default());
            for _ in 0..25 {
                let (grads, _) = backward(&stack, &[0.2, 0.8, -0.5, 0.3], 2, &[1.0, -1.0]).unwrap();
                adam_step(&mut stack, &grads, &mut state);
            }
            stack
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn mse_loss_basics() {
        assert_eq!(mse_loss(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mse_loss(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert!(mse_loss(&[0.0], &[1.0, 2.0]).is_err());
    }
}
