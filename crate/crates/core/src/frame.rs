//! Polar sonar frames and their ground-truth label rasters.

use ndarray::Array2;

use crate::geometry::{FovSpec, SonarPose};

/// Intensity quantization step; frames carry 16-bit samples.
pub const INTENSITY_LEVELS: f64 = 65535.0;

/// Rounds an intensity in `[0, 1]` onto the 16-bit grid.
pub fn quantize(v: f64) -> u16 {
    (v.clamp(0.0, 1.0) * INTENSITY_LEVELS).round() as u16
}

pub fn dequantize(q: u16) -> f64 {
    q as f64 / INTENSITY_LEVELS
}

/// One acoustic-camera frame: `intensities[[range_bin, beam]]` in `[0, 1]`.
///
/// Intensities are stored on the 16-bit grid so frames survive a file round
/// trip bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SonarFrame {
    pub intensities: Array2<f64>,
    pub fov: FovSpec,
    pub pose: SonarPose,
    pub frame_id: String,
    pub noise_seed: Option<u64>,
}

impl SonarFrame {
    /// Builds a frame, quantizing intensities. Panics if the raster shape
    /// disagrees with `fov`.
    pub fn new(
        intensities: Array2<f64>,
        fov: FovSpec,
        pose: SonarPose,
        frame_id: impl Into<String>,
    ) -> Self {
        assert_eq!(
            intensities.dim(),
            (fov.n_range_bins, fov.n_beams),
            "raster shape must be (n_range_bins, n_beams)"
        );
        Self {
            intensities: intensities.mapv(|v| dequantize(quantize(v))),
            fov,
            pose,
            frame_id: frame_id.into(),
            noise_seed: None,
        }
    }

    pub fn from_quantized(
        raw: Array2<u16>,
        fov: FovSpec,
        pose: SonarPose,
        frame_id: impl Into<String>,
    ) -> Self {
        assert_eq!(raw.dim(), (fov.n_range_bins, fov.n_beams));
        Self {
            intensities: raw.mapv(dequantize),
            fov,
            pose,
            frame_id: frame_id.into(),
            noise_seed: None,
        }
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.noise_seed = seed;
        self
    }

    pub fn quantized(&self) -> Array2<u16> {
        self.intensities.mapv(quantize)
    }

    pub fn n_bins(&self) -> usize {
        self.intensities.nrows()
    }

    pub fn n_beams(&self) -> usize {
        self.intensities.ncols()
    }
}

/// Ground-truth class of a rendered pixel before noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum PixelClass {
    Background = 0,
    Highlight = 1,
    Shadow = 2,
}

impl PixelClass {
    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Self::Background),
            1 => Some(Self::Highlight),
            2 => Some(Self::Shadow),
            _ => None,
        }
    }
}

pub type LabelRaster = Array2<u8>;
