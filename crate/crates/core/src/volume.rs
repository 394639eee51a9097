//! Dense `(c, z, r)` volumes of quantized ADC intensities.
//!
//! Axis order is azimuthal `c` outermost, axial `z`, radial `r` innermost;
//! the flat index of `(i, j, k)` is `(i * z + j) * r + k`. ADC counts are
//! 10-bit values stored in 16-bit cells, and detector data is
//! zero-suppressed: anything below 64 reads back as exactly 0.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math;

/// Largest representable ADC count (10-bit).
pub const ADC_MAX: u16 = 1023;
/// Readout threshold: counts below this are zeroed on the chip.
pub const ZERO_SUPPRESSION: u16 = 64;

const INRV_MAGIC: [u8; 4] = *b"INRV";
const INRV_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum VolumeError {
    #[error("payload length mismatch: dims imply {expected} cells, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("value {value} at cell {index} exceeds the 10-bit ADC range")]
    ValueOutOfRange { index: usize, value: u16 },
    #[error("index ({i}, {j}, {k}) out of range for dims ({c}, {z}, {r})")]
    IndexOutOfRange { i: u32, j: u32, k: u32, c: u32, z: u32, r: u32 },
    #[error("downsample factor must be >= 1 on every axis")]
    ZeroFactor,
    #[error("dims must be nonzero on every axis")]
    EmptyDims,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic bytes (expected \"INRV\")")]
    BadMagic,
    #[error("unsupported INRV version {0}")]
    UnsupportedVersion(u32),
    #[error("file truncated: need {needed} bytes, have {have}")]
    Truncated { needed: usize, have: usize },
    #[error(transparent)]
    Volume(#[from] VolumeError),
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SynthError {
    #[error("target occupancy must lie in (0, 1], got {0}")]
    BadOccupancy(f64),
    #[error("intensity range must satisfy 64 <= lo <= hi <= 1023, got {lo}..{hi}")]
    BadIntensityRange { lo: u16, hi: u16 },
    #[error("occupancy target unreachable: {covered} track cells cover less than half of the {wanted} requested")]
    TargetUnreachable { covered: usize, wanted: usize },
    #[error(transparent)]
    Volume(#[from] VolumeError),
}

/// Grid extents along the azimuthal, axial, and radial axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub c: u32,
    pub z: u32,
    pub r: u32,
}

impl Dims {
    pub fn new(c: u32, z: u32, r: u32) -> Self {
        Dims { c, z, r }
    }

    /// Total cell count `c * z * r`.
    pub fn len(&self) -> usize {
        self.c as usize * self.z as usize * self.r as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index of `(i, j, k)`; `c` outermost, `r` innermost.
    pub fn flat(&self, i: u32, j: u32, k: u32) -> usize {
        (i as usize * self.z as usize + j as usize) * self.r as usize + k as usize
    }

    /// Inverse of [`Dims::flat`].
    pub fn unflat(&self, idx: usize) -> (u32, u32, u32) {
        let r = self.r as usize;
        let z = self.z as usize;
        let k = idx % r;
        let j = (idx / r) % z;
        let i = idx / (r * z);
        (i as u32, j as u32, k as u32)
    }

    pub fn contains(&self, i: u32, j: u32, k: u32) -> bool {
        i < self.c && j < self.z && k < self.r
    }
}

/// A dense 3D grid of ADC counts; the compression target.
///
/// Immutable after construction, so it can be shared freely across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Volume3D {
    dims: Dims,
    values: Vec<u16>,
}

impl Volume3D {
    /// Builds a volume, checking the payload length and the 10-bit range.
    pub fn new(dims: Dims, values: Vec<u16>) -> Result<Self, VolumeError> {
        if dims.is_empty() {
            return Err(VolumeError::EmptyDims);
        }
        if values.len() != dims.len() {
            return Err(VolumeError::LengthMismatch {
                expected: dims.len(),
                got: values.len(),
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if value > ADC_MAX {
                return Err(VolumeError::ValueOutOfRange { index, value });
            }
        }
        Ok(Volume3D { dims, values })
    }

    pub fn zeros(dims: Dims) -> Result<Self, VolumeError> {
        if dims.is_empty() {
            return Err(VolumeError::EmptyDims);
        }
        Ok(Volume3D {
            values: vec![0; dims.len()],
            dims,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn values(&self) -> &[u16] {
        &self.values
    }

    pub fn get(&self, i: u32, j: u32, k: u32) -> Result<u16, VolumeError> {
        if !self.dims.contains(i, j, k) {
            return Err(VolumeError::IndexOutOfRange {
                i,
                j,
                k,
                c: self.dims.c,
                z: self.dims.z,
                r: self.dims.r,
            });
        }
        Ok(self.values[self.dims.flat(i, j, k)])
    }

    /// Fraction of cells holding a nonzero count.
    pub fn occupancy(&self) -> f64 {
        let nonzero = self.values.iter().filter(|&&v| v != 0).count();
        nonzero as f64 / self.values.len() as f64
    }

    /// Strided decimation keeping indices `0, f, 2f, ...` per axis.
    ///
    /// Output extent is `ceil(dim / f)`; kept values are copied unmodified,
    /// so zero-suppression survives (averaging would not preserve it).
    pub fn downsample(&self, factors: (u32, u32, u32)) -> Result<Volume3D, VolumeError> {
        let (fc, fz, fr) = factors;
        if fc == 0 || fz == 0 || fr == 0 {
            return Err(VolumeError::ZeroFactor);
        }
        let out = Dims::new(
            self.dims.c.div_ceil(fc),
            self.dims.z.div_ceil(fz),
            self.dims.r.div_ceil(fr),
        );
        let mut values = Vec::with_capacity(out.len());
        for i in 0..out.c {
            for j in 0..out.z {
                for k in 0..out.r {
                    values.push(self.values[self.dims.flat(i * fc, j * fz, k * fr)]);
                }
            }
        }
        Ok(Volume3D { dims: out, values })
    }

    /// Zeroes every cell below the readout threshold; used by the
    /// `--resuppress` decode path.
    pub fn zero_suppressed(&self) -> Volume3D {
        let values = self
            .values
            .iter()
            .map(|&v| if v < ZERO_SUPPRESSION { 0 } else { v })
            .collect();
        Volume3D {
            dims: self.dims,
            values,
        }
    }

    /// Encodes the volume in the INRV byte layout.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(20 + self.values.len() * 2);
        out.extend_from_slice(&INRV_MAGIC);
        out.extend_from_slice(&INRV_VERSION.to_le_bytes());
        out.extend_from_slice(&self.dims.c.to_le_bytes());
        out.extend_from_slice(&self.dims.z.to_le_bytes());
        out.extend_from_slice(&self.dims.r.to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Decodes an INRV byte image, validating magic, version, and payload.
    pub fn decode(bytes: &[u8]) -> Result<Volume3D, FormatError> {
        if bytes.len() < 20 {
            return Err(FormatError::Truncated {
                needed: 20,
                have: bytes.len(),
            });
        }
        if bytes[0..4] != INRV_MAGIC {
            return Err(FormatError::BadMagic);
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if version != INRV_VERSION {
            return Err(FormatError::UnsupportedVersion(version));
        }
        let c = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        let z = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
        let r = u32::from_le_bytes(bytes[16..20].try_into().unwrap());
        let dims = Dims::new(c, z, r);
        let needed = 20 + dims.len() * 2;
        if bytes.len() != needed {
            if bytes.len() < needed {
                return Err(FormatError::Truncated {
                    needed,
                    have: bytes.len(),
                });
            }
            return Err(FormatError::Volume(VolumeError::LengthMismatch {
                expected: dims.len(),
                got: (bytes.len() - 20) / 2,
            }));
        }
        let values = bytes[20..]
            .chunks_exact(2)
            .map(|b| u16::from_le_bytes([b[0], b[1]]))
            .collect();
        Ok(Volume3D::new(dims, values)?)
    }
}

/// Maps grid index `t` on an axis of size `d` to `[-1, 1]`.
///
/// Size-1 axes map to 0 so the endpoints stay well defined.
fn axis_coord(t: u32, d: u32) -> f64 {
    if d <= 1 {
        0.0
    } else {
        -1.0 + 2.0 * t as f64 / (d - 1) as f64
    }
}

/// Normalized model-input coordinate for a grid index.
pub fn normalize_coords(index: (u32, u32, u32), dims: Dims) -> Result<[f64; 3], VolumeError> {
    let (i, j, k) = index;
    if !dims.contains(i, j, k) {
        return Err(VolumeError::IndexOutOfRange {
            i,
            j,
            k,
            c: dims.c,
            z: dims.z,
            r: dims.r,
        });
    }
    Ok([
        axis_coord(i, dims.c),
        axis_coord(j, dims.z),
        axis_coord(k, dims.r),
    ])
}

/// Normalized coordinates for every cell of a grid, in flat-index order.
/// Also used for decode targets, where the grid need not match the source.
pub fn grid_coords(dims: Dims) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(dims.len());
    for i in 0..dims.c {
        let x0 = axis_coord(i, dims.c);
        for j in 0..dims.z {
            let x1 = axis_coord(j, dims.z);
            for k in 0..dims.r {
                out.push([x0, x1, axis_coord(k, dims.r)]);
            }
        }
    }
    out
}

/// ADC count to `[0, 1]`.
pub fn normalize_value(adc: u16) -> f64 {
    adc as f64 / ADC_MAX as f64
}

/// Inverse of [`normalize_value`]: round and clamp to the 10-bit range.
pub fn denormalize_value(u: f64) -> u16 {
    let v = math::round(u * ADC_MAX as f64);
    if !(v >= 0.0) {
        // NaN or negative
        return 0;
    }
    if v > ADC_MAX as f64 {
        ADC_MAX
    } else {
        v as u16
    }
}

/// Configuration for the synthetic sparse-track generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub dims: Dims,
    pub n_tracks: u32,
    pub target_occupancy: f64,
    /// ADC bounds for nonzero cells: `64 <= lo <= hi <= 1023`.
    pub intensity_range: (u16, u16),
    pub seed: u64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        if !(self.target_occupancy > 0.0 && self.target_occupancy <= 1.0) {
            return Err(SynthError::BadOccupancy(self.target_occupancy));
        }
        let (lo, hi) = self.intensity_range;
        if lo < ZERO_SUPPRESSION || hi > ADC_MAX || lo > hi {
            return Err(SynthError::BadIntensityRange { lo, hi });
        }
        if self.dims.is_empty() {
            return Err(SynthError::Volume(VolumeError::EmptyDims));
        }
        Ok(())
    }
}

fn bezier(p: &[[f64; 3]; 4], t: f64) -> [f64; 3] {
    let s = 1.0 - t;
    let b0 = s * s * s;
    let b1 = 3.0 * s * s * t;
    let b2 = 3.0 * s * t * t;
    let b3 = t * t * t;
    [
        b0 * p[0][0] + b1 * p[1][0] + b2 * p[2][0] + b3 * p[3][0],
        b0 * p[0][1] + b1 * p[1][1] + b2 * p[2][1] + b3 * p[3][1],
        b0 * p[0][2] + b1 * p[1][2] + b2 * p[2][2] + b3 * p[3][2],
    ]
}

/// Generates a sparse volume of smooth 3D tracks.
///
/// Each track is a cubic Bezier rasterized with a small Gaussian kernel into
/// a charge accumulator; the top cells by accumulated charge are kept to hit
/// the occupancy target and mapped into the configured intensity range, so
/// every nonzero output cell clears the zero-suppression floor. Purely a
/// function of the config, including the seed.
pub fn synth_tracks(cfg: &SynthConfig) -> Result<Volume3D, SynthError> {
    cfg.validate()?;
    let dims = cfg.dims;
    let n = dims.len();
    if cfg.n_tracks == 0 {
        return Ok(Volume3D::zeros(dims)?);
    }
    let wanted = (math::round(cfg.target_occupancy * n as f64) as usize).max(1);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let max_dim = dims.c.max(dims.z).max(dims.r) as usize;
    let steps = (4 * max_dim).max(16);

    // Sample points along each track, with a per-track amplitude.
    let mut points: Vec<([f64; 3], f64)> = Vec::with_capacity(cfg.n_tracks as usize * steps);
    for _ in 0..cfg.n_tracks {
        let rand_pt = |rng: &mut ChaCha8Rng| {
            [
                rng.gen::<f64>() * (dims.c as f64 - 1.0),
                rng.gen::<f64>() * (dims.z as f64 - 1.0),
                rng.gen::<f64>() * (dims.r as f64 - 1.0),
            ]
        };
        let ctrl = [rand_pt(&mut rng), rand_pt(&mut rng), rand_pt(&mut rng), rand_pt(&mut rng)];
        let amp = 0.5 + 0.5 * rng.gen::<f64>();
        for s in 0..=steps {
            points.push((bezier(&ctrl, s as f64 / steps as f64), amp));
        }
    }

    // Rasterize with a Gaussian kernel, widening it until enough distinct
    // cells are covered to meet the occupancy target.
    let mut acc = vec![0.0f64; n];
    let mut sigma = 0.9f64;
    let mut radius = 1i64;
    let mut covered = 0usize;
    for attempt in 0..6 {
        if attempt > 0 {
            sigma *= 1.5;
            radius += 1;
        }
        for &(p, amp) in &points {
            let inv = 1.0 / (2.0 * sigma * sigma);
            let ci = math::round(p[0]) as i64;
            let cj = math::round(p[1]) as i64;
            let ck = math::round(p[2]) as i64;
            for di in -radius..=radius {
                for dj in -radius..=radius {
                    for dk in -radius..=radius {
                        let (i, j, k) = (ci + di, cj + dj, ck + dk);
                        if i < 0
                            || j < 0
                            || k < 0
                            || i >= dims.c as i64
                            || j >= dims.z as i64
                            || k >= dims.r as i64
                        {
                            continue;
                        }
                        let dx = i as f64 - p[0];
                        let dy = j as f64 - p[1];
                        let dz = k as f64 - p[2];
                        let d2 = dx * dx + dy * dy + dz * dz;
                        acc[dims.flat(i as u32, j as u32, k as u32)] +=
                            amp * math::exp(-d2 * inv);
                    }
                }
            }
        }
        covered = acc.iter().filter(|&&a| a > 1e-6).count();
        if covered >= wanted {
            break;
        }
    }
    if covered * 2 < wanted {
        return Err(SynthError::TargetUnreachable { covered, wanted });
    }

    // Keep the hottest cells; ties broken by index for determinism.
    let keep = wanted.min(covered);
    let mut order: Vec<u32> = (0..n as u32).filter(|&i| acc[i as usize] > 1e-6).collect();
    order.sort_by(|&a, &b| {
        acc[b as usize]
            .partial_cmp(&acc[a as usize])
            .unwrap()
            .then(a.cmp(&b))
    });
    order.truncate(keep);

    let (lo, hi) = cfg.intensity_range;
    let a_min = acc[order[keep - 1] as usize];
    let a_max = acc[order[0] as usize];
    let span = (a_max - a_min).max(1e-12);
    let mut values = vec![0u16; n];
    for &idx in &order {
        let frac = (acc[idx as usize] - a_min) / span;
        values[idx as usize] = lo + math::round(frac * (hi - lo) as f64) as u16;
    }
    Ok(Volume3D::new(dims, values)?)
}
