//! The four coordinate-network architectures: plain MLP, FFNet, SIREN, and
//! WIRE. A model maps a normalized `(c, z, r)` coordinate to a normalized
//! intensity; the trained parameter bundle is the compressed representation.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math;
use crate::nn::{self, Activation, LayerGrads, LayerParams, NnError, Stack};

pub const IN_DIM: usize = 3;
pub const OUT_DIM: usize = 1;

pub const DEFAULT_SIREN_OMEGA0: f64 = 30.0;
pub const DEFAULT_FFNET_FEATURES: usize = 256;
pub const DEFAULT_FFNET_SIGMA: f64 = 10.0;
pub const DEFAULT_WIRE_OMEGA0: f64 = 20.0;
pub const DEFAULT_WIRE_S0: f64 = 10.0;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("hidden_dims must be nonempty")]
    NoHiddenLayers,
    #[error("hyperparameter {name} must be positive")]
    NonPositiveHyper { name: &'static str },
    #[error(transparent)]
    Nn(#[from] NnError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Mlp,
    FfNet,
    Siren,
    Wire,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Mlp => "mlp",
            ModelKind::FfNet => "ffnet",
            ModelKind::Siren => "siren",
            ModelKind::Wire => "wire",
        }
    }
}

/// Architecture description plus initialization seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub hidden_dims: Vec<usize>,
    pub siren_omega0: f64,
    pub ffnet_features: usize,
    pub ffnet_sigma: f64,
    /// Seed for the Fourier frequency matrix, separate from `init_seed`.
    pub ffnet_seed: u64,
    pub wire_omega0: f64,
    pub wire_s0: f64,
    pub init_seed: u64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, hidden_dims: Vec<usize>, init_seed: u64) -> Self {
        ModelSpec {
            kind,
            hidden_dims,
            siren_omega0: DEFAULT_SIREN_OMEGA0,
            ffnet_features: DEFAULT_FFNET_FEATURES,
            ffnet_sigma: DEFAULT_FFNET_SIGMA,
            ffnet_seed: init_seed.wrapping_add(1),
            wire_omega0: DEFAULT_WIRE_OMEGA0,
            wire_s0: DEFAULT_WIRE_S0,
            init_seed,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.hidden_dims.is_empty() {
            return Err(ModelError::NoHiddenLayers);
        }
        let positive = [
            ("siren_omega0", self.siren_omega0),
            ("ffnet_sigma", self.ffnet_sigma),
            ("wire_omega0", self.wire_omega0),
            ("wire_s0", self.wire_s0),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(ModelError::NonPositiveHyper { name });
            }
        }
        if self.kind == ModelKind::FfNet && self.ffnet_features == 0 {
            return Err(ModelError::NonPositiveHyper {
                name: "ffnet_features",
            });
        }
        Ok(())
    }

    /// Input width of the first dense layer: raw coordinates, or sin/cos
    /// features for FFNet.
    pub fn first_layer_in(&self) -> usize {
        match self.kind {
            ModelKind::FfNet => 2 * self.ffnet_features,
            _ => IN_DIM,
        }
    }

    pub fn hidden_activation(&self) -> Activation {
        match self.kind {
            ModelKind::Mlp | ModelKind::FfNet => Activation::Relu,
            ModelKind::Siren => Activation::Sine {
                omega0: self.siren_omega0,
            },
            ModelKind::Wire => Activation::Gabor {
                omega0: self.wire_omega0,
                s0: self.wire_s0,
            },
        }
    }

    /// Trainable parameter count from shape arithmetic (excludes the fixed
    /// Fourier matrix).
    pub fn param_count(&self) -> usize {
        let mut total = 0;
        let mut prev = self.first_layer_in();
        for &h in &self.hidden_dims {
            total += prev * h + h;
            prev = h;
        }
        total + prev * OUT_DIM + OUT_DIM
    }
}

/// A constructed model: spec, dense stack, and the fixed Fourier frequency
/// matrix when the kind is FFNet (`ffnet_features x 3`, row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub spec: ModelSpec,
    pub stack: Stack,
    pub fourier_b: Option<Vec<f64>>,
}

fn uniform(rng: &mut ChaCha8Rng, bound: f64) -> f64 {
    (2.0 * rng.gen::<f64>() - 1.0) * bound
}

/// Standard normal via Box-Muller; deterministic for a given stream.
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    math::sqrt(-2.0 * math::ln(u1)) * math::cos(2.0 * core::f64::consts::PI * u2)
}

/// Builds and initializes a model. Deterministic for a fixed spec.
///
/// Initialization: MLP/FFNet use Glorot uniform; SIREN uses `1/fan_in` on
/// the first layer and `sqrt(6/fan_in)/omega0` afterwards; WIRE uses the
/// SIREN later-layer rule with its own omega0 on every layer. Biases start
/// at zero. FFNet's frequency matrix is Gaussian with std `sigma`, drawn
/// from its own seed, and is not trained.
pub fn build_model(spec: &ModelSpec) -> Result<ModelParams, ModelError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.init_seed);
    let mut dims = Vec::with_capacity(spec.hidden_dims.len() + 2);
    dims.push(spec.first_layer_in());
    dims.extend_from_slice(&spec.hidden_dims);
    dims.push(OUT_DIM);

    let mut layers = Vec::with_capacity(dims.len() - 1);
    for l in 0..dims.len() - 1 {
        let (fan_in, fan_out) = (dims[l], dims[l + 1]);
        let bound = match spec.kind {
            ModelKind::Mlp | ModelKind::FfNet => math::sqrt(6.0 / (fan_in + fan_out) as f64),
            ModelKind::Siren => {
                if l == 0 {
                    1.0 / fan_in as f64
                } else {
                    math::sqrt(6.0 / fan_in as f64) / spec.siren_omega0
                }
            }
            ModelKind::Wire => math::sqrt(6.0 / fan_in as f64) / spec.wire_omega0,
        };
        let mut layer = LayerParams::zeros(fan_in, fan_out);
        for w in layer.w.iter_mut() {
            *w = uniform(&mut rng, bound);
        }
        layers.push(layer);
    }
    let stack = Stack::new(layers, spec.hidden_activation())?;

    let fourier_b = if spec.kind == ModelKind::FfNet {
        let mut brng = ChaCha8Rng::seed_from_u64(spec.ffnet_seed);
        Some(
            (0..spec.ffnet_features * IN_DIM)
                .map(|_| spec.ffnet_sigma * normal(&mut brng))
                .collect(),
        )
    } else {
        None
    };

    Ok(ModelParams {
        spec: spec.clone(),
        stack,
        fourier_b,
    })
}

/// `gamma(x) = [sin(2 pi B x), cos(2 pi B x)]` for one coordinate.
pub fn fourier_features(x: &[f64; 3], b: &[f64]) -> Vec<f64> {
    let n_features = b.len() / IN_DIM;
    let mut out = Vec::with_capacity(2 * n_features);
    out.resize(2 * n_features, 0.0);
    for f in 0..n_features {
        let row = &b[f * IN_DIM..(f + 1) * IN_DIM];
        let u = 2.0 * core::f64::consts::PI * (row[0] * x[0] + row[1] * x[1] + row[2] * x[2]);
        let (s, c) = math::sin_cos(u);
        out[f] = s;
        out[n_features + f] = c;
    }
    out
}

/// Real Gabor wavelet activation `cos(omega0 u) exp(-(s0 u)^2)`.
pub fn wire_activation(u: f64, omega0: f64, s0: f64) -> f64 {
    Activation::Gabor { omega0, s0 }.apply(u)
}

impl ModelParams {
    /// Row-major input matrix for a coordinate batch: raw coordinates, or
    /// Fourier features for FFNet.
    pub fn input_matrix(&self, coords: &[[f64; 3]]) -> Vec<f64> {
        match &self.fourier_b {
            None => coords.iter().flatten().copied().collect(),
            Some(b) => {
                let n_features = self.spec.ffnet_features;
                let width = 2 * n_features;
                let mut out = Vec::with_capacity(coords.len() * width);
                for x in coords {
                    out.extend_from_slice(&fourier_features(x, b));
                }
                debug_assert_eq!(out.len(), coords.len() * width);
                out
            }
        }
    }

    /// Batched evaluation in normalized-value units. No clamping; decode
    /// clamps to `[0, 1]` when producing ADC counts.
    pub fn eval(&self, coords: &[[f64; 3]]) -> Result<Vec<f64>, ModelError> {
        let x = self.input_matrix(coords);
        Ok(nn::forward(&self.stack, &x, coords.len())?)
    }

    /// MSE gradients w.r.t. every trainable parameter plus the loss value.
    pub fn backward(
        &self,
        coords: &[[f64; 3]],
        targets: &[f64],
    ) -> Result<(Vec<LayerGrads>, f64), ModelError> {
        let x = self.input_matrix(coords);
        Ok(nn::backward(&self.stack, &x, coords.len(), targets)?)
    }

    /// Finite-difference check of [`ModelParams::backward`].
    pub fn gradcheck(
        &mut self,
        coords: &[[f64; 3]],
        targets: &[f64],
        h: f64,
    ) -> Result<f64, ModelError> {
        let x = self.input_matrix(coords);
        Ok(nn::gradcheck(&mut self.stack, &x, coords.len(), targets, h)?)
    }
}

/// Dispatches to the architecture-specific forward pass.
pub fn eval_model(params: &ModelParams, coords: &[[f64; 3]]) -> Result<Vec<f64>, ModelError> {
    params.eval(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn siren_parameter_count_matches_shape_arithmetic() {
        let spec = ModelSpec::new(ModelKind::Siren, vec![128, 128, 128], 0);
        assert_eq!(spec.param_count(), 33_665);
        let model = build_model(&spec).unwrap();
        assert_eq!(model.stack.param_count(), 33_665);
    }

    #[test]
    fn build_is_deterministic() {
        let spec = ModelSpec::new(ModelKind::Wire, vec![16, 16], 42);
        assert_eq!(build_model(&spec).unwrap(), build_model(&spec).unwrap());
    }

    #[test]
    fn ffnet_first_layer_doubles_features() {
        let mut spec = ModelSpec::new(ModelKind::FfNet, vec![16], 3);
        spec.ffnet_features = 64;
        let model = build_model(&spec).unwrap();
        let b = model.fourier_b.as_ref().unwrap();
        assert_eq!(b.len(), 64 * 3);
        assert_eq!(model.stack.layers[0].in_dim, 128);
    }

    #[test]
    fn fourier_features_at_origin() {
        let b = vec![1.0, 2.0, 3.0, -0.5, 0.25, 4.0];
        let g = fourier_features(&[0.0, 0.0, 0.0], &b);
        assert_eq!(&g[..2], &[0.0, 0.0]);
        assert_eq!(&g[2..], &[1.0, 1.0]);
    }

    #[test]
    fn fourier_features_scalar_closed_form() {
        // One frequency row (1, 0, 0) at x = 0.25: [sin(pi/2), cos(pi/2)].
        let g = fourier_features(&[0.25, 0.0, 0.0], &[1.0, 0.0, 0.0]);
        assert!((g[0] - 1.0).abs() < 1e-15);
        assert!(g[1].abs() < 1e-15);
    }

    #[test]
    fn fourier_features_are_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let b: Vec<f64> = (0..12).map(|_| 20.0 * normal(&mut rng)).collect();
            let x = [uniform(&mut rng, 1.0), uniform(&mut rng, 1.0), uniform(&mut rng, 1.0)];
            for v in fourier_features(&x, &b) {
                assert!((-1.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn siren_zero_weights_output_zero() {
        let spec = ModelSpec::new(ModelKind::Siren, vec![8, 8], 0);
        let mut model = build_model(&spec).unwrap();
        for layer in model.stack.layers.iter_mut() {
            layer.w.iter_mut().for_each(|w| *w = 0.0);
        }
        let out = model.eval(&[[0.3, -0.2, 0.9]]).unwrap();
        assert_eq!(out, vec![0.0]);
    }

    #[test]
    fn siren_single_unit_closed_form() {
        // One hidden unit, w1 = 1, omega0 = 1, w2 = 1: f(x) = sin(x).
        let mut spec = ModelSpec::new(ModelKind::Siren, vec![1], 0);
        spec.siren_omega0 = 1.0;
        let mut model = build_model(&spec).unwrap();
        model.stack.layers[0].w = vec![1.0, 0.0, 0.0];
        model.stack.layers[1].w = vec![1.0];
        let x = core::f64::consts::FRAC_PI_2;
        let out = model.eval(&[[x, 0.0, 0.0]]).unwrap();
        assert!((out[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wire_activation_shape() {
        assert_eq!(wire_activation(0.0, 20.0, 10.0), 1.0);
        for i in 0..50 {
            let u = -2.5 + 0.1 * i as f64;
            let env = math::exp(-(10.0 * u) * (10.0 * u));
            assert!(wire_activation(u, 20.0, 10.0).abs() <= env + 1e-15);
        }
        assert!(wire_activation(1.0, 20.0, 10.0).abs() < 1e-40);
    }

    #[test]
    fn ffnet_zero_b_makes_output_constant() {
        let mut spec = ModelSpec::new(ModelKind::FfNet, vec![16], 5);
        spec.ffnet_features = 8;
        let mut model = build_model(&spec).unwrap();
        model.fourier_b = Some(vec![0.0; 8 * 3]);
        let out = model
            .eval(&[[0.1, 0.2, 0.3], [-0.9, 0.5, 0.0], [1.0, -1.0, 1.0]])
            .unwrap();
        assert_eq!(out[0], out[1]);
        assert_eq!(out[1], out[2]);
    }

    #[test]
    fn duplicated_coords_give_duplicated_outputs() {
        for kind in [ModelKind::Mlp, ModelKind::FfNet, ModelKind::Siren, ModelKind::Wire] {
            let mut spec = ModelSpec::new(kind, vec![8], 11);
            spec.ffnet_features = 4;
            let model = build_model(&spec).unwrap();
            let out = model.eval(&[[0.2, 0.4, -0.6]; 5]).unwrap();
            for o in &out {
                assert_eq!(*o, out[0]);
            }
        }
    }

    #[test]
    fn gradcheck_all_kinds_on_small_nets() {
        // Moderate omega0 keeps finite-difference truncation (which grows
        // as omega0^3 h^2) well under the tolerance.
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for kind in [ModelKind::Mlp, ModelKind::FfNet, ModelKind::Siren, ModelKind::Wire] {
            let mut spec = ModelSpec::new(kind, vec![16], 123);
            spec.ffnet_features = 32;
            spec.siren_omega0 = 4.0;
            spec.wire_omega0 = 4.0;
            spec.wire_s0 = 2.0;
            let mut model = build_model(&spec).unwrap();
            let coords: Vec<[f64; 3]> = (0..8)
                .map(|_| [uniform(&mut rng, 1.0), uniform(&mut rng, 1.0), uniform(&mut rng, 1.0)])
                .collect();
            let targets: Vec<f64> = (0..8).map(|_| rng.gen::<f64>()).collect();
            let err = model.gradcheck(&coords, &targets, 1e-4).unwrap();
            let tol = if kind == ModelKind::Wire { 1e-3 } else { 1e-4 };
            assert!(err < tol, "{:?}: relative error {err}", kind);
        }
    }

    #[test]
    fn gradcheck_default_hyperparameters_within_coarse_tolerance() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for kind in [ModelKind::Siren, ModelKind::Wire] {
            let mut spec = ModelSpec::new(kind, vec![16], 9);
            spec.ffnet_features = 16;
            let mut model = build_model(&spec).unwrap();
            let coords: Vec<[f64; 3]> = (0..8)
                .map(|_| [uniform(&mut rng, 1.0), uniform(&mut rng, 1.0), uniform(&mut rng, 1.0)])
                .collect();
            let targets: Vec<f64> = (0..8).map(|_| rng.gen::<f64>()).collect();
            let err = model.gradcheck(&coords, &targets, 1e-4).unwrap();
            assert!(err < 1e-3, "{:?}: relative error {err}", kind);
        }
    }
}
