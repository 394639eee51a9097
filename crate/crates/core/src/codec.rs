//! The compression product: a trained model serialized with just enough
//! metadata to decode it anywhere.
//!
//! No latent code is stored; the network weights plus the normalization
//! constants are the whole artifact. Decoding evaluates the network on the
//! normalized grid of any requested resolution, so super-resolution is the
//! same code path as identity decode.

use alloc::vec::Vec;

use half::f16;

use crate::math;
use crate::models::{ModelKind, ModelParams, ModelSpec, IN_DIM, OUT_DIM};
use crate::nn::{Activation, LayerParams, Stack};
use crate::volume::{self, Dims, Volume3D, VolumeError, ADC_MAX};

const INRC_MAGIC: [u8; 4] = *b"INRC";
const INRC_VERSION: u32 = 1;

/// Decode evaluation chunk; results are position-indexed so the choice
/// cannot affect outputs.
const EVAL_CHUNK: usize = 4096;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CodecError {
    #[error("bad magic bytes (expected \"INRC\")")]
    BadMagic,
    #[error("unsupported INRC version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated artifact: need {needed} bytes, have {have}")]
    Truncated { needed: usize, have: usize },
    #[error("unknown model kind byte {0}")]
    BadKind(u8),
    #[error("unknown precision byte {0}")]
    BadPrecision(u8),
    #[error("weight count {got} does not match shape arithmetic ({expected})")]
    WeightCountMismatch { expected: u64, got: u64 },
    #[error("dims mismatch: {a:?} vs {b:?}")]
    DimsMismatch { a: Dims, b: Dims },
    #[error(transparent)]
    Volume(#[from] VolumeError),
    #[error("model reconstruction failed: {0}")]
    Model(crate::models::ModelError),
}

/// Weight storage precision; a rate knob orthogonal to model size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    F32,
    F16,
}

impl Precision {
    fn byte(self) -> u8 {
        match self {
            Precision::F32 => 0,
            Precision::F16 => 1,
        }
    }

    fn from_byte(b: u8) -> Result<Self, CodecError> {
        match b {
            0 => Ok(Precision::F32),
            1 => Ok(Precision::F16),
            other => Err(CodecError::BadPrecision(other)),
        }
    }

    pub fn bytes_per_weight(self) -> usize {
        match self {
            Precision::F32 => 4,
            Precision::F16 => 2,
        }
    }
}

fn kind_byte(kind: ModelKind) -> u8 {
    match kind {
        ModelKind::Mlp => 0,
        ModelKind::FfNet => 1,
        ModelKind::Siren => 2,
        ModelKind::Wire => 3,
    }
}

fn kind_from_byte(b: u8) -> Result<ModelKind, CodecError> {
    match b {
        0 => Ok(ModelKind::Mlp),
        1 => Ok(ModelKind::FfNet),
        2 => Ok(ModelKind::Siren),
        3 => Ok(ModelKind::Wire),
        other => Err(CodecError::BadKind(other)),
    }
}

/// Activation hyperparameters carried by the artifact header. Only the
/// fields relevant to the stored kind are meaningful; the block has a fixed
/// layout regardless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArtifactHyper {
    pub omega0: f64,
    pub sigma: f64,
    pub s0: f64,
    pub n_features: u32,
    pub fourier_seed: u64,
}

/// Serialized form of one trained model plus source metadata; everything
/// needed to decode, with no external state.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedArtifact {
    pub kind: ModelKind,
    pub precision: Precision,
    pub in_dim: u32,
    pub out_dim: u32,
    pub hidden_dims: Vec<u32>,
    pub hyper: ArtifactHyper,
    /// Dims of the volume this artifact stands for (decode default).
    pub source_dims: Dims,
    /// Downsample factors applied before training, for bookkeeping.
    pub downsample_factors: (u32, u32, u32),
    /// All trainable weights, layer by layer (`W` row-major, then `b`),
    /// already quantized to the artifact precision.
    pub weights: Vec<f32>,
    /// Fourier frequency matrix, row-major, present iff kind is FFNet.
    pub fourier_b: Option<Vec<f32>>,
}

fn quantize(v: f64, precision: Precision) -> f32 {
    match precision {
        Precision::F32 => v as f32,
        Precision::F16 => f16::from_f32(v as f32).to_f32(),
    }
}

impl CompressedArtifact {
    /// Packages a trained model. Weights are quantized here so the
    /// in-memory artifact and its byte image always agree bit-exactly.
    pub fn from_model(
        model: &ModelParams,
        source_dims: Dims,
        downsample_factors: (u32, u32, u32),
        precision: Precision,
    ) -> Self {
        let spec = &model.spec;
        let mut weights = Vec::with_capacity(model.stack.param_count());
        for layer in &model.stack.layers {
            weights.extend(layer.w.iter().map(|&w| quantize(w, precision)));
            weights.extend(layer.b.iter().map(|&b| quantize(b, precision)));
        }
        let fourier_b = model
            .fourier_b
            .as_ref()
            .map(|b| b.iter().map(|&w| quantize(w, precision)).collect());
        let omega0 = match spec.kind {
            ModelKind::Wire => spec.wire_omega0,
            _ => spec.siren_omega0,
        };
        CompressedArtifact {
            kind: spec.kind,
            precision,
            in_dim: IN_DIM as u32,
            out_dim: OUT_DIM as u32,
            hidden_dims: spec.hidden_dims.iter().map(|&h| h as u32).collect(),
            hyper: ArtifactHyper {
                omega0,
                sigma: spec.ffnet_sigma,
                s0: spec.wire_s0,
                n_features: spec.ffnet_features as u32,
                fourier_seed: spec.ffnet_seed,
            },
            source_dims,
            downsample_factors,
            weights,
            fourier_b,
        }
    }

    fn layer_dims(&self) -> Vec<usize> {
        let first = match self.kind {
            ModelKind::FfNet => 2 * self.hyper.n_features as usize,
            _ => self.in_dim as usize,
        };
        let mut dims = Vec::with_capacity(self.hidden_dims.len() + 2);
        dims.push(first);
        dims.extend(self.hidden_dims.iter().map(|&h| h as usize));
        dims.push(self.out_dim as usize);
        dims
    }

    /// Trainable weight count implied by the header shape arithmetic.
    pub fn expected_weight_count(&self) -> u64 {
        let dims = self.layer_dims();
        let mut total = 0u64;
        for l in 0..dims.len() - 1 {
            total += (dims[l] * dims[l + 1] + dims[l + 1]) as u64;
        }
        total
    }

    /// Rehydrates an evaluable model (f64) from the stored weights.
    pub fn to_model(&self) -> Result<ModelParams, CodecError> {
        if self.weights.len() as u64 != self.expected_weight_count() {
            return Err(CodecError::WeightCountMismatch {
                expected: self.expected_weight_count(),
                got: self.weights.len() as u64,
            });
        }
        let mut spec = ModelSpec::new(
            self.kind,
            self.hidden_dims.iter().map(|&h| h as usize).collect(),
            0,
        );
        spec.ffnet_features = self.hyper.n_features as usize;
        spec.ffnet_sigma = self.hyper.sigma;
        spec.ffnet_seed = self.hyper.fourier_seed;
        spec.wire_s0 = self.hyper.s0;
        match self.kind {
            ModelKind::Wire => spec.wire_omega0 = self.hyper.omega0,
            _ => spec.siren_omega0 = self.hyper.omega0,
        }

        let dims = self.layer_dims();
        let mut layers = Vec::with_capacity(dims.len() - 1);
        let mut off = 0usize;
        for l in 0..dims.len() - 1 {
            let (fan_in, fan_out) = (dims[l], dims[l + 1]);
            let w = self.weights[off..off + fan_in * fan_out]
                .iter()
                .map(|&v| v as f64)
                .collect();
            off += fan_in * fan_out;
            let b = self.weights[off..off + fan_out]
                .iter()
                .map(|&v| v as f64)
                .collect();
            off += fan_out;
            layers.push(LayerParams {
                in_dim: fan_in,
                out_dim: fan_out,
                w,
                b,
            });
        }
        let hidden = match self.kind {
            ModelKind::Mlp | ModelKind::FfNet => Activation::Relu,
            ModelKind::Siren => Activation::Sine {
                omega0: self.hyper.omega0,
            },
            ModelKind::Wire => Activation::Gabor {
                omega0: self.hyper.omega0,
                s0: self.hyper.s0,
            },
        };
        let stack = Stack::new(layers, hidden).map_err(|e| CodecError::Model(e.into()))?;
        let fourier_b = self
            .fourier_b
            .as_ref()
            .map(|b| b.iter().map(|&v| v as f64).collect());
        Ok(ModelParams {
            spec,
            stack,
            fourier_b,
        })
    }

    /// Serialized byte length, without encoding.
    pub fn encoded_len(&self) -> usize {
        let bpw = self.precision.bytes_per_weight();
        let b_len = self.fourier_b.as_ref().map_or(0, Vec::len);
        4 + 4 // magic, version
            + 1 + 1 // kind, precision
            + 4 + 4 + 4 // in_dim, out_dim, n_hidden
            + 4 * self.hidden_dims.len()
            + 8 * 3 + 4 + 8 // hyper block
            + 12 + 12 // source dims, downsample factors
            + 8 // weight count
            + bpw * (self.weights.len() + b_len)
    }

    /// Encodes the artifact in the INRC byte layout (little-endian, no
    /// padding).
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&INRC_MAGIC);
        out.extend_from_slice(&INRC_VERSION.to_le_bytes());
        out.push(kind_byte(self.kind));
        out.push(self.precision.byte());
        out.extend_from_slice(&self.in_dim.to_le_bytes());
        out.extend_from_slice(&self.out_dim.to_le_bytes());
        out.extend_from_slice(&(self.hidden_dims.len() as u32).to_le_bytes());
        for &h in &self.hidden_dims {
            out.extend_from_slice(&h.to_le_bytes());
        }
        out.extend_from_slice(&self.hyper.omega0.to_le_bytes());
        out.extend_from_slice(&self.hyper.sigma.to_le_bytes());
        out.extend_from_slice(&self.hyper.s0.to_le_bytes());
        out.extend_from_slice(&self.hyper.n_features.to_le_bytes());
        out.extend_from_slice(&self.hyper.fourier_seed.to_le_bytes());
        for d in [self.source_dims.c, self.source_dims.z, self.source_dims.r] {
            out.extend_from_slice(&d.to_le_bytes());
        }
        for f in [
            self.downsample_factors.0,
            self.downsample_factors.1,
            self.downsample_factors.2,
        ] {
            out.extend_from_slice(&f.to_le_bytes());
        }
        out.extend_from_slice(&(self.weights.len() as u64).to_le_bytes());
        let push = |v: f32, out: &mut Vec<u8>| match self.precision {
            Precision::F32 => out.extend_from_slice(&v.to_le_bytes()),
            Precision::F16 => out.extend_from_slice(&f16::from_f32(v).to_le_bytes()),
        };
        for &w in &self.weights {
            push(w, &mut out);
        }
        if let Some(b) = &self.fourier_b {
            for &w in b {
                push(w, &mut out);
            }
        }
        debug_assert_eq!(out.len(), self.encoded_len());
        out
    }

    /// Decodes an INRC byte image with full header validation.
    pub fn decode(bytes: &[u8]) -> Result<Self, CodecError> {
        struct Reader<'a> {
            bytes: &'a [u8],
            pos: usize,
        }
        impl<'a> Reader<'a> {
            fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
                if self.pos + n > self.bytes.len() {
                    return Err(CodecError::Truncated {
                        needed: self.pos + n,
                        have: self.bytes.len(),
                    });
                }
                let s = &self.bytes[self.pos..self.pos + n];
                self.pos += n;
                Ok(s)
            }
            fn u8(&mut self) -> Result<u8, CodecError> {
                Ok(self.take(1)?[0])
            }
            fn u32(&mut self) -> Result<u32, CodecError> {
                Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
            }
            fn u64(&mut self) -> Result<u64, CodecError> {
                Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
            }
            fn f64(&mut self) -> Result<f64, CodecError> {
                Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
            }
        }

        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != INRC_MAGIC {
            return Err(CodecError::BadMagic);
        }
        let version = r.u32()?;
        if version != INRC_VERSION {
            return Err(CodecError::UnsupportedVersion(version));
        }
        let kind = kind_from_byte(r.u8()?)?;
        let precision = Precision::from_byte(r.u8()?)?;
        let in_dim = r.u32()?;
        let out_dim = r.u32()?;
        let n_hidden = r.u32()? as usize;
        let mut hidden_dims = Vec::with_capacity(n_hidden);
        for _ in 0..n_hidden {
            hidden_dims.push(r.u32()?);
        }
        let hyper = ArtifactHyper {
            omega0: r.f64()?,
            sigma: r.f64()?,
            s0: r.f64()?,
            n_features: r.u32()?,
            fourier_seed: r.u64()?,
        };
        let source_dims = Dims::new(r.u32()?, r.u32()?, r.u32()?);
        let downsample_factors = (r.u32()?, r.u32()?, r.u32()?);
        let weight_count = r.u64()? as usize;

        let mut artifact = CompressedArtifact {
            kind,
            precision,
            in_dim,
            out_dim,
            hidden_dims,
            hyper,
            source_dims,
            downsample_factors,
            weights: Vec::new(),
            fourier_b: None,
        };
        if weight_count as u64 != artifact.expected_weight_count() {
            return Err(CodecError::WeightCountMismatch {
                expected: artifact.expected_weight_count(),
                got: weight_count as u64,
            });
        }
        let b_count = if kind == ModelKind::FfNet {
            hyper.n_features as usize * in_dim as usize
        } else {
            0
        };
        let bpw = precision.bytes_per_weight();
        let payload = r.take((weight_count + b_count) * bpw)?;
        if r.pos != bytes.len() {
            return Err(CodecError::Truncated {
                needed: r.pos,
                have: bytes.len(),
            });
        }
        let read_f32 = |chunk: &[u8]| match precision {
            Precision::F32 => f32::from_le_bytes(chunk.try_into().unwrap()),
            Precision::F16 => f16::from_le_bytes(chunk.try_into().unwrap()).to_f32(),
        };
        let mut all = payload.chunks_exact(bpw).map(read_f32);
        artifact.weights = all.by_ref().take(weight_count).collect();
        if kind == ModelKind::FfNet {
            artifact.fourier_b = Some(all.collect());
        }
        Ok(artifact)
    }

    /// Evaluates the stored model on the normalized grid of `target_dims`,
    /// denormalizes, rounds, and clamps to the ADC range. Zero suppression
    /// is not re-applied here; see [`Volume3D::zero_suppressed`].
    pub fn decompress(&self, target_dims: Dims) -> Result<Volume3D, CodecError> {
        if target_dims.is_empty() {
            return Err(CodecError::Volume(VolumeError::EmptyDims));
        }
        let model = self.to_model()?;
        let coords = volume::grid_coords(target_dims);
        let mut values = Vec::with_capacity(coords.len());
        for chunk in coords.chunks(EVAL_CHUNK) {
            let out = model.eval(chunk).map_err(CodecError::Model)?;
            values.extend(out.into_iter().map(volume::denormalize_value));
        }
        Ok(Volume3D::new(target_dims, values)?)
    }

    /// Raw stored bytes of the source volume divided by artifact bytes.
    pub fn compression_ratio(&self) -> f64 {
        (self.source_dims.len() * 2) as f64 / self.encoded_len() as f64
    }
}

/// Raw-ADC-unit error summary between a decoded volume and its reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSummary {
    /// Mean squared error in ADC counts squared.
    pub mse: f64,
    /// Mean absolute error in ADC counts.
    pub l1_mean: f64,
    /// `10 log10(1023^2 / mse)`; infinity when the volumes agree exactly.
    pub psnr: f64,
}

/// Per-cell `|a - b|` volume (raw ADC units) plus summary statistics.
pub fn error_map(
    decoded: &Volume3D,
    reference: &Volume3D,
) -> Result<(Volume3D, ErrorSummary), CodecError> {
    if decoded.dims() != reference.dims() {
        return Err(CodecError::DimsMismatch {
            a: decoded.dims(),
            b: reference.dims(),
        });
    }
    let mut diffs = Vec::with_capacity(decoded.values().len());
    let mut sq = 0.0f64;
    let mut l1 = 0.0f64;
    for (&a, &b) in decoded.values().iter().zip(reference.values()) {
        let d = (a as i32 - b as i32).unsigned_abs() as u16;
        diffs.push(d);
        sq += (d as f64) * (d as f64);
        l1 += d as f64;
    }
    let n = diffs.len() as f64;
    let mse = sq / n;
    let psnr = if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * math::log10((ADC_MAX as f64) * (ADC_MAX as f64) / mse)
    };
    Ok((
        Volume3D::new(decoded.dims(), diffs)?,
        ErrorSummary {
            mse,
            l1_mean: l1 / n,
            psnr,
        },
    ))
}
