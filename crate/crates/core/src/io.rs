//! File formats: 16-bit PGM rasters with JSON sidecars, scene JSON, pose-log
//! and report CSV, mosaic rasters, and the TOML run configuration.
//!
//! Writers are deterministic and write through a temporary file that is
//! renamed into place, so a failed run leaves no half-written output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimation::{EstimateConfig, HeightEstimate, RangeOrigin};
use crate::frame::{quantize, LabelRaster, SonarFrame};
use crate::geometry::{FovSpec, SonarPose, WorldPoint};
use crate::mosaic::{HeightAnnotation, Mosaic, DEFAULT_CELL_SIZE};
use crate::segmentation::{PairThresholds, SegmentParams};
use crate::simulator::{BoxTarget, NoiseSpec, PitchMode, RenderOptions, Scene};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed PGM: {msg}")]
    Pgm { path: PathBuf, msg: String },
    #[error("{path}: raster is {found:?} (rows × cols) but the sidecar declares {expected:?}")]
    DimensionMismatch {
        path: PathBuf,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("{path}: metadata required: sidecar {sidecar} not found")]
    MetadataRequired { path: PathBuf, sidecar: PathBuf },
    #[error("{path}: malformed sidecar: {msg}")]
    MalformedSidecar { path: PathBuf, msg: String },
    #[error("{path}: no pose for this frame")]
    MissingPose { path: PathBuf },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
    #[error("{path}: invalid configuration: {msg}")]
    Config { path: PathBuf, msg: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, msg: impl ToString) -> IoError {
    IoError::Format {
        path: path.to_path_buf(),
        msg: msg.to_string(),
    }
}

/// Writes `bytes` to `path` via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let result = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io_err(path))
}

fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(io_err(path))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

// ---------------------------------------------------------------- PGM

/// ASCII (`P2`) PGM text of a raster, at most 70 characters per line.
pub fn encode_pgm(raster: &Array2<u16>, maxval: u16) -> String {
    let (rows, cols) = raster.dim();
    let mut out = format!("P2\n{cols} {rows}\n{maxval}\n");
    for row in raster.rows() {
        let mut line = String::new();
        for v in row {
            let tok = v.to_string();
            if !line.is_empty() && line.len() + 1 + tok.len() > 70 {
                out.push_str(&line);
                out.push('\n');
                line.clear();
            }
            if !line.is_empty() {
                line.push(' ');
            }
            line.push_str(&tok);
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn write_pgm(path: &Path, raster: &Array2<u16>, maxval: u16) -> Result<(), IoError> {
    if let Some(v) = raster.iter().find(|&&v| v > maxval) {
        return Err(IoError::Pgm {
            path: path.to_path_buf(),
            msg: format!("sample {v} exceeds maxval {maxval}"),
        });
    }
    write_atomic(path, encode_pgm(raster, maxval).as_bytes())
}

/// Reads an ASCII (`P2`) or binary (`P5`) PGM; returns the raster and maxval.
pub fn read_pgm(path: &Path) -> Result<(Array2<u16>, u16), IoError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    decode_pgm(&bytes).map_err(|msg| IoError::Pgm {
        path: path.to_path_buf(),
        msg,
    })
}

pub fn decode_pgm(bytes: &[u8]) -> Result<(Array2<u16>, u16), String> {
    let mut pos = 0;
    let mut header = Vec::new();
    while header.len() < 4 {
        // Skip whitespace and comments.
        while pos < bytes.len() {
            if bytes[pos].is_ascii_whitespace() {
                pos += 1;
            } else if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err("truncated header".into());
        }
        header.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    let magic = header[0].as_str();
    let num = |s: &str, what: &str| s.parse::<usize>().map_err(|_| format!("bad {what} {s:?}"));
    let cols = num(&header[1], "width")?;
    let rows = num(&header[2], "height")?;
    let maxval = num(&header[3], "maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(format!("maxval {maxval} outside 1..=65535"));
    }
    let n = rows * cols;
    let samples: Vec<u16> = match magic {
        "P2" => {
            let text = std::str::from_utf8(&bytes[pos..]).map_err(|_| "non-ASCII sample data")?;
            let mut out = Vec::with_capacity(n);
            for line in text.lines() {
                let data = line.split('#').next().unwrap_or("");
                for tok in data.split_ascii_whitespace() {
                    let v: usize = tok.parse().map_err(|_| format!("bad sample {tok:?}"))?;
                    if v > maxval {
                        return Err(format!("sample {v} exceeds maxval {maxval}"));
                    }
                    out.push(v as u16);
                }
            }
            out
        }
        "P5" => {
            let data = &bytes[(pos + 1).min(bytes.len())..];
            let wide = maxval > 255;
            let need = if wide { 2 * n } else { n };
            if data.len() < need {
                return Err(format!("expected {need} data bytes, found {}", data.len()));
            }
            if wide {
                data[..need]
                    .chunks(2)
                    .map(|b| u16::from_be_bytes([b[0], b[1]]))
                    .collect()
            } else {
                data[..n].iter().map(|&b| b as u16).collect()
            }
        }
        other => return Err(format!("unsupported magic {other:?}")),
    };
    if samples.len() != n {
        return Err(format!("expected {n} samples, found {}", samples.len()));
    }
    let raster = Array2::from_shape_vec((rows, cols), samples).map_err(|e| e.to_string())?;
    Ok((raster, maxval as u16))
}

// ---------------------------------------------------------------- frames

/// Metadata stored next to a frame raster. Angles are in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSidecar {
    pub frame_id: String,
    pub fov: FovSpec,
    #[serde(default)]
    pub pose: Option<SonarPose>,
    #[serde(default)]
    pub noise_seed: Option<u64>,
}

/// Sidecar path of a raster: same stem, `.json` extension.
pub fn sidecar_path(raster: &Path) -> PathBuf {
    raster.with_extension("json")
}

/// PGM text and sidecar JSON of a frame.
pub fn encode_frame(frame: &SonarFrame) -> (String, String) {
    let sidecar = FrameSidecar {
        frame_id: frame.frame_id.clone(),
        fov: frame.fov,
        pose: Some(frame.pose),
        noise_seed: frame.noise_seed,
    };
    (encode_pgm(&frame.quantized(), u16::MAX), to_json(&sidecar))
}

pub fn write_frame(path: &Path, frame: &SonarFrame) -> Result<(), IoError> {
    let (pgm, side) = encode_frame(frame);
    write_atomic(path, pgm.as_bytes())?;
    write_atomic(&sidecar_path(path), side.as_bytes())
}

pub fn read_frame(path: &Path) -> Result<SonarFrame, IoError> {
    read_frame_posed(path, None)
}

/// Reads a frame, taking its pose from `poses` (by frame id) when a log is
/// given and from the sidecar otherwise.
pub fn read_frame_posed(path: &Path, poses: Option<&PoseLog>) -> Result<SonarFrame, IoError> {
    let side = sidecar_path(path);
    if !side.exists() {
        return Err(IoError::MetadataRequired {
            path: path.to_path_buf(),
            sidecar: side,
        });
    }
    let meta: FrameSidecar =
        serde_json::from_str(&read_text(&side)?).map_err(|e| IoError::MalformedSidecar {
            path: side.clone(),
            msg: e.to_string(),
        })?;
    meta.fov.validate().map_err(|e| IoError::MalformedSidecar {
        path: side.clone(),
        msg: e.to_string(),
    })?;
    let pose = match poses {
        Some(log) => log.get(&meta.frame_id).map(PoseRecord::pose),
        None => meta.pose,
    }
    .ok_or_else(|| IoError::MissingPose { path: side.clone() })?;
    let (raw, maxval) = read_pgm(path)?;
    let expected = (meta.fov.n_range_bins, meta.fov.n_beams);
    if raw.dim() != expected {
        return Err(IoError::DimensionMismatch {
            path: path.to_path_buf(),
            expected,
            found: raw.dim(),
        });
    }
    let raw = if maxval == u16::MAX {
        raw
    } else {
        raw.mapv(|v| quantize(v as f64 / maxval as f64))
    };
    Ok(SonarFrame::from_quantized(raw, meta.fov, pose, meta.frame_id).with_seed(meta.noise_seed))
}

/// Label raster as PGM with maxval 2 (0 background, 1 highlight, 2 shadow).
pub fn write_labels(path: &Path, labels: &LabelRaster) -> Result<(), IoError> {
    write_pgm(path, &labels.mapv(u16::from), 2)
}

pub fn read_labels(path: &Path) -> Result<LabelRaster, IoError> {
    let (raw, _) = read_pgm(path)?;
    if let Some(v) = raw.iter().find(|&&v| v > 2) {
        return Err(format_err(path, format!("label {v} is not 0, 1 or 2")));
    }
    Ok(raw.mapv(|v| v as u8))
}

// ---------------------------------------------------------------- scenes

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetRecord {
    pub id: String,
    pub center_xy_m: [f64; 2],
    /// `[L, W, H]`: extent along x, along y, and height.
    pub size_m: [f64; 3],
    pub reflectivity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    /// Floor height, meters.
    #[serde(default)]
    pub floor: f64,
    pub targets: Vec<TargetRecord>,
    pub background_reflectivity: f64,
}

impl From<&Scene> for SceneFile {
    fn from(s: &Scene) -> Self {
        Self {
            floor: s.floor_z,
            targets: s
                .targets
                .iter()
                .map(|t| TargetRecord {
                    id: t.id.clone(),
                    center_xy_m: t.center_xy,
                    size_m: [t.length, t.width, t.height],
                    reflectivity: t.reflectivity,
                })
                .collect(),
            background_reflectivity: s.background_reflectivity,
        }
    }
}

impl From<SceneFile> for Scene {
    fn from(f: SceneFile) -> Self {
        Self {
            floor_z: f.floor,
            targets: f
                .targets
                .into_iter()
                .map(|t| BoxTarget {
                    id: t.id,
                    center_xy: t.center_xy_m,
                    length: t.size_m[0],
                    width: t.size_m[1],
                    height: t.size_m[2],
                    reflectivity: t.reflectivity,
                })
                .collect(),
            background_reflectivity: f.background_reflectivity,
        }
    }
}

pub fn write_scene(path: &Path, scene: &Scene) -> Result<(), IoError> {
    write_atomic(path, to_json(&SceneFile::from(scene)).as_bytes())
}

/// Reads and validates a scene file.
pub fn read_scene(path: &Path) -> Result<Scene, IoError> {
    let file: SceneFile =
        serde_json::from_str(&read_text(path)?).map_err(|e| format_err(path, e))?;
    let scene = Scene::from(file);
    scene.validate().map_err(|e| format_err(path, e))?;
    Ok(scene)
}

// ---------------------------------------------------------------- pose log

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    pub frame_id: String,
    /// Seconds.
    pub timestamp: f64,
    pub x_m: f64,
    pub y_m: f64,
    pub z_m: f64,
    pub yaw_rad: f64,
    pub pitch_rad: f64,
    /// Depth-gauge altitude above the floor; must agree with `z_m`.
    pub altitude_m: f64,
}

impl PoseRecord {
    pub fn new(frame_id: impl Into<String>, timestamp: f64, pose: &SonarPose) -> Self {
        Self {
            frame_id: frame_id.into(),
            timestamp,
            x_m: pose.position.x,
            y_m: pose.position.y,
            z_m: pose.position.z,
            yaw_rad: pose.yaw,
            pitch_rad: pose.pitch,
            altitude_m: pose.altitude(),
        }
    }

    pub fn pose(&self) -> SonarPose {
        SonarPose::new(
            WorldPoint::new(self.x_m, self.y_m, self.z_m),
            self.yaw_rad,
            self.pitch_rad,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PoseLog {
    pub records: Vec<PoseRecord>,
}

impl PoseLog {
    pub fn validate(&self) -> Result<(), String> {
        let mut seen = std::collections::BTreeSet::new();
        for (i, r) in self.records.iter().enumerate() {
            if !seen.insert(r.frame_id.as_str()) {
                return Err(format!("duplicate frame_id {:?}", r.frame_id));
            }
            if i > 0 && r.timestamp < self.records[i - 1].timestamp {
                return Err(format!("timestamp decreases at frame {:?}", r.frame_id));
            }
            if (r.altitude_m - r.z_m).abs() > 1e-6 {
                return Err(format!(
                    "frame {:?}: altitude {} disagrees with z {}",
                    r.frame_id, r.altitude_m, r.z_m
                ));
            }
        }
        Ok(())
    }

    pub fn get(&self, frame_id: &str) -> Option<&PoseRecord> {
        self.records.iter().find(|r| r.frame_id == frame_id)
    }
}

pub fn encode_pose_log(log: &PoseLog) -> Result<Vec<u8>, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &log.records {
        w.serialize(r).map_err(|e| e.to_string())?;
    }
    w.into_inner().map_err(|e| e.to_string())
}

pub fn write_pose_log(path: &Path, log: &PoseLog) -> Result<(), IoError> {
    let bytes = encode_pose_log(log).map_err(|m| format_err(path, m))?;
    write_atomic(path, &bytes)
}

pub fn read_pose_log(path: &Path) -> Result<PoseLog, IoError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| format_err(path, e))?;
    let records = rdr
        .deserialize()
        .collect::<Result<Vec<PoseRecord>, _>>()
        .map_err(|e| format_err(path, e))?;
    let log = PoseLog { records };
    log.validate().map_err(|m| format_err(path, m))?;
    Ok(log)
}

// ---------------------------------------------------------------- reports

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub target_id: String,
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "L1")]
    pub l1: f64,
    #[serde(rename = "R2")]
    pub r2: f64,
    #[serde(rename = "L2")]
    pub l2: f64,
    pub delta_h_m: f64,
    pub est_cm: f64,
    pub gt_cm: Option<f64>,
    pub error_cm: Option<f64>,
}

impl ReportRow {
    /// Row of an estimate; ranges are reported from the apex. The error is
    /// `gt − est`.
    pub fn from_estimate(e: &HeightEstimate, gt_cm: Option<f64>) -> Self {
        let (a, b) = (&e.pair.obs1, &e.pair.obs2);
        let est = e.height_cm();
        Self {
            target_id: e.target_id.clone(),
            r1: a.apex_range(),
            l1: a.l,
            r2: b.apex_range(),
            l2: b.l,
            delta_h_m: e.pair.delta_h,
            est_cm: est,
            gt_cm,
            error_cm: gt_cm.map(|g| g - est),
        }
    }
}

pub fn encode_report(rows: &[ReportRow]) -> Result<Vec<u8>, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| e.to_string())?;
    }
    w.into_inner().map_err(|e| e.to_string())
}

pub fn write_report(path: &Path, rows: &[ReportRow]) -> Result<(), IoError> {
    let bytes = encode_report(rows).map_err(|m| format_err(path, m))?;
    write_atomic(path, &bytes)
}

pub fn read_report(path: &Path) -> Result<Vec<ReportRow>, IoError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| format_err(path, e))?;
    rdr.deserialize()
        .collect::<Result<Vec<ReportRow>, _>>()
        .map_err(|e| format_err(path, e))
}

// ---------------------------------------------------------------- mosaics

/// Georeferencing of a mosaic raster. Row 0 of the PGM is the northmost
/// (largest y) row; `origin` is the world x-y of the raster's lower-left corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MosaicSidecar {
    pub origin: [f64; 2],
    pub cell_size_m: f64,
    pub rows: usize,
    pub cols: usize,
    pub covered_cells: usize,
}

/// Mean intensity per cell on the 16-bit grid, north up; uncovered cells are 0.
pub fn mosaic_raster(m: &Mosaic) -> Array2<u16> {
    let (rows, cols) = m.dim();
    let mean = m.mean();
    Array2::from_shape_fn((rows, cols), |(r, c)| {
        mean[[rows - 1 - r, c]].map_or(0, quantize)
    })
}

pub fn mosaic_sidecar(m: &Mosaic) -> MosaicSidecar {
    let (rows, cols) = m.dim();
    let o = m.origin();
    MosaicSidecar {
        origin: [o.x, o.y],
        cell_size_m: m.cell_size,
        rows,
        cols,
        covered_cells: m.covered_cells(),
    }
}

pub fn write_mosaic(path: &Path, m: &Mosaic) -> Result<MosaicSidecar, IoError> {
    let side = mosaic_sidecar(m);
    write_pgm(path, &mosaic_raster(m), u16::MAX)?;
    write_atomic(&sidecar_path(path), to_json(&side).as_bytes())?;
    Ok(side)
}

pub fn read_mosaic(path: &Path) -> Result<(Array2<u16>, MosaicSidecar), IoError> {
    let side_path = sidecar_path(path);
    if !side_path.exists() {
        return Err(IoError::MetadataRequired {
            path: path.to_path_buf(),
            sidecar: side_path,
        });
    }
    let side: MosaicSidecar =
        serde_json::from_str(&read_text(&side_path)?).map_err(|e| IoError::MalformedSidecar {
            path: side_path.clone(),
            msg: e.to_string(),
        })?;
    let (raw, _) = read_pgm(path)?;
    if raw.dim() != (side.rows, side.cols) {
        return Err(IoError::DimensionMismatch {
            path: path.to_path_buf(),
            expected: (side.rows, side.cols),
            found: raw.dim(),
        });
    }
    Ok((raw, side))
}

pub fn write_annotations(path: &Path, annotations: &[HeightAnnotation]) -> Result<(), IoError> {
    write_atomic(path, to_json(&annotations).as_bytes())
}

pub fn read_annotations(path: &Path) -> Result<Vec<HeightAnnotation>, IoError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| format_err(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    write_atomic(path, to_json(value).as_bytes())
}

// ---------------------------------------------------------------- config

/// Acoustic camera settings. Angles in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SonarConfig {
    pub model: String,
    pub frequency_mhz: f64,
    pub n_beams: usize,
    /// Derived from the azimuth span and beam count; checked when given.
    pub beam_width_deg: Option<f64>,
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
    pub r_min_m: f64,
    pub r_max_m: f64,
    pub n_range_bins: usize,
}

impl Default for SonarConfig {
    fn default() -> Self {
        let fov = FovSpec::default();
        Self {
            model: "ARIS Explorer 3000".into(),
            frequency_mhz: 3.0,
            n_beams: fov.n_beams,
            beam_width_deg: Some(fov.beam_width().to_degrees()),
            azimuth_deg: fov.azimuth_fov.to_degrees(),
            elevation_deg: fov.elevation_fov.to_degrees(),
            r_min_m: fov.r_min,
            r_max_m: fov.r_max,
            n_range_bins: fov.n_range_bins,
        }
    }
}

impl SonarConfig {
    pub fn fov(&self) -> FovSpec {
        FovSpec {
            azimuth_fov: self.azimuth_deg.to_radians(),
            elevation_fov: self.elevation_deg.to_radians(),
            n_beams: self.n_beams,
            r_min: self.r_min_m,
            r_max: self.r_max_m,
            n_range_bins: self.n_range_bins,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PairingConfig {
    pub m: f64,
    pub n: f64,
}

impl Default for PairingConfig {
    fn default() -> Self {
        let d = PairThresholds::default();
        Self { m: d.m, n: d.n }
    }
}

/// Sensor placement of a simulated pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurveyConfig {
    pub x_m: f64,
    pub y_m: f64,
    pub altitude_m: f64,
    pub yaw_deg: f64,
    pub pitch_deg: f64,
    pub delta_h_m: f64,
    pub pitch_mode: PitchMode,
    /// Lateral offsets (meters) of the passes flown by the mosaic command.
    pub pass_offsets_m: [f64; 3],
}

impl Default for SurveyConfig {
    fn default() -> Self {
        Self {
            x_m: 0.0,
            y_m: 0.0,
            altitude_m: 0.35,
            yaw_deg: 0.0,
            pitch_deg: 17.0,
            delta_h_m: 0.1,
            pitch_mode: PitchMode::Fixed,
            pass_offsets_m: [-0.1, 0.0, 0.1],
        }
    }
}

impl SurveyConfig {
    pub fn pose(&self) -> SonarPose {
        SonarPose::new(
            WorldPoint::new(self.x_m, self.y_m, self.altitude_m),
            self.yaw_deg.to_radians(),
            self.pitch_deg.to_radians(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MosaicConfig {
    pub cell_size_m: f64,
    /// Estimates from different passes closer than this are one target.
    pub merge_radius_m: f64,
}

impl Default for MosaicConfig {
    fn default() -> Self {
        Self {
            cell_size_m: DEFAULT_CELL_SIZE,
            merge_radius_m: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsConfig {
    /// Scene JSON; the built-in five-target scene when absent.
    pub scene: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub sonar: SonarConfig,
    pub segmentation: SegmentParams,
    pub pairing: PairingConfig,
    pub estimation: EstimateConfig,
    pub noise: NoiseSpec,
    pub survey: SurveyConfig,
    pub render: RenderOptions,
    pub mosaic: MosaicConfig,
    pub paths: PathsConfig,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn fov(&self) -> FovSpec {
        self.sonar.fov()
    }

    pub fn thresholds(&self) -> PairThresholds {
        PairThresholds {
            m: self.pairing.m,
            n: self.pairing.n,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let fov = self.fov();
        fov.validate().map_err(|e| e.to_string())?;
        if let Some(bw) = self.sonar.beam_width_deg {
            let derived = fov.beam_width().to_degrees();
            if (bw - derived).abs() > 1e-9 {
                return Err(format!(
                    "sonar.beam_width_deg = {bw} disagrees with azimuth_deg / n_beams = {derived}"
                ));
            }
        }
        if !(self.sonar.frequency_mhz > 0.0) {
            return Err("sonar.frequency_mhz must be positive".into());
        }
        PairThresholds::new(self.pairing.m, self.pairing.n).map_err(|e| e.to_string())?;
        let seg = &self.segmentation;
        if seg.min_area == 0 {
            return Err("segmentation.min_area must be at least 1".into());
        }
        if !(seg.shadow_contrast > 0.0 && seg.shadow_contrast < 1.0) {
            return Err("segmentation.shadow_contrast must lie in (0, 1)".into());
        }
        if !(seg.highlight_contrast > 1.0) {
            return Err("segmentation.highlight_contrast must exceed 1".into());
        }
        let est = &self.estimation;
        if !(est.epsilon > 0.0) || !(est.max_beam_gap >= 0.0) || !(est.max_shift_bins >= 0.0) {
            return Err("estimation gates must be non-negative and epsilon positive".into());
        }
        if !(self.noise.speckle_sigma >= 0.0 && self.noise.additive_sigma >= 0.0) {
            return Err("noise sigmas must be non-negative".into());
        }
        if !(self.survey.altitude_m > 0.0) {
            return Err("survey.altitude_m must be positive".into());
        }
        if !self.survey.delta_h_m.is_finite() {
            return Err("survey.delta_h_m must be finite".into());
        }
        if self.render.elevation_samples < 2 {
            return Err("render.elevation_samples must be at least 2".into());
        }
        if !(self.mosaic.cell_size_m > 0.0 && self.mosaic.merge_radius_m >= 0.0) {
            return Err("mosaic.cell_size_m must be positive".into());
        }
        Ok(())
    }

    /// Fully resolved configuration as TOML.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("serializable config")
    }

    pub fn range_origin(&self) -> RangeOrigin {
        self.estimation.range_origin
    }
}

/// Loads a configuration; relative paths inside resolve against the file's
/// directory and must exist.
pub fn load_config(path: &Path) -> Result<RunConfig, IoError> {
    let config_err = |msg: String| IoError::Config {
        path: path.to_path_buf(),
        msg,
    };
    let mut cfg = RunConfig::from_toml_str(&read_text(path)?).map_err(config_err)?;
    let base = path.parent().unwrap_or(Path::new("."));
    if let Some(scene) = cfg.paths.scene.as_mut() {
        if scene.is_relative() {
            *scene = base.join(&*scene);
        }
        if !scene.exists() {
            return Err(config_err(format!(
                "paths.scene {} does not exist",
                scene.display()
            )));
        }
    }
    if let Some(out) = cfg.paths.out.as_mut() {
        if out.is_relative() {
            *out = base.join(&*out);
        }
    }
    Ok(cfg)
}
