//! Raycast simulator for forward-looking sonar frames of box targets resting
//! on a flat seafloor.
//!
//! Every `(beam, range bin)` pixel collects the strongest return among the
//! surfaces that its beam plane meets at that range inside the elevation
//! aperture:
//!
//! * target faces that are the first hit along their ray give a highlight,
//! * floor points with a clear line of sight give background,
//! * floor points hidden behind a target give shadow (zero return).
//!
//! Floor returns are solved per bin in closed form. Target returns come from
//! a sweep of elevation rays; where consecutive rays land on different
//! surfaces the transition is bisected, and between rays on the same face
//! every bin spanned by their ranges is filled.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::{LabelRaster, PixelClass, SonarFrame};
use crate::geometry::{FovSpec, GeometryError, SonarPose};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("invalid pose: altitude must be positive and |pitch| < 90°")]
    InvalidPose,
    #[error("sensor altitude {altitude} m is not above the tallest target ({tallest} m)")]
    SensorBelowTarget { altitude: f64, tallest: f64 },
    #[error("no ensonified floor: the elevation aperture never meets the seafloor inside the range window")]
    NoEnsonifiedFloor,
    #[error("sensor below target top: altitude {altitude} m, target height {height} m")]
    SensorBelowTargetTop { altitude: f64, height: f64 },
    #[error("invalid noise spec: {0}")]
    InvalidNoise(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Axis-aligned box resting on the floor. `length` runs along world x,
/// `width` along world y.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxTarget {
    pub id: String,
    pub center_xy: [f64; 2],
    pub length: f64,
    pub width: f64,
    pub height: f64,
    pub reflectivity: f64,
}

impl BoxTarget {
    pub fn min_corner(&self) -> [f64; 3] {
        [
            self.center_xy[0] - 0.5 * self.length,
            self.center_xy[1] - 0.5 * self.width,
            0.0,
        ]
    }

    pub fn max_corner(&self) -> [f64; 3] {
        [
            self.center_xy[0] + 0.5 * self.length,
            self.center_xy[1] + 0.5 * self.width,
            self.height,
        ]
    }

    fn overlaps_xy(&self, other: &BoxTarget) -> bool {
        let (a0, a1) = (self.min_corner(), self.max_corner());
        let (b0, b1) = (other.min_corner(), other.max_corner());
        a0[0] < b1[0] && b0[0] < a1[0] && a0[1] < b1[1] && b0[1] < a1[1]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub floor_z: f64,
    pub targets: Vec<BoxTarget>,
    pub background_reflectivity: f64,
}

/// Target sizes of the reference tank survey, `(L, W, H)` in meters.
pub const REFERENCE_SIZES: [(f64, f64, f64); 5] = [
    (0.19, 0.19, 0.028),
    (0.10, 0.05, 0.039),
    (0.05, 0.04, 0.047),
    (0.09, 0.04, 0.030),
    (0.06, 0.05, 0.028),
];

impl Scene {
    pub fn empty() -> Self {
        Self {
            floor_z: 0.0,
            targets: Vec::new(),
            background_reflectivity: 0.4,
        }
    }

    /// The five reference targets laid out in front of a sensor at the world
    /// origin looking along +x, spread across the azimuth aperture so that
    /// neither highlights nor shadows overlap.
    pub fn five_targets() -> Self {
        // (center distance m, bearing deg)
        const LAYOUT: [(f64, f64); 5] = [
            (1.25, 0.0),
            (1.20, 8.0),
            (1.35, -8.0),
            (1.30, 13.0),
            (1.15, -13.0),
        ];
        let targets = REFERENCE_SIZES
            .iter()
            .zip(LAYOUT.iter())
            .enumerate()
            .map(|(i, (&(l, w, h), &(d, bearing)))| {
                let b = bearing.to_radians();
                BoxTarget {
                    id: (i + 1).to_string(),
                    center_xy: [d * b.cos(), d * b.sin()],
                    length: l,
                    width: w,
                    height: h,
                    reflectivity: 0.9,
                }
            })
            .collect();
        Self {
            floor_z: 0.0,
            targets,
            background_reflectivity: 0.4,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.floor_z != 0.0 {
            return Err(SimError::InvalidScene("floor must sit at z = 0".into()));
        }
        if !(self.background_reflectivity > 0.0 && self.background_reflectivity <= 1.0) {
            return Err(SimError::InvalidScene(
                "background_reflectivity must lie in (0, 1]".into(),
            ));
        }
        for t in &self.targets {
            if !(t.length > 0.0 && t.width > 0.0 && t.height > 0.0) {
                return Err(SimError::InvalidScene(format!(
                    "target {} must have positive dimensions",
                    t.id
                )));
            }
            if !(t.reflectivity > 0.0 && t.reflectivity <= 1.0) {
                return Err(SimError::InvalidScene(format!(
                    "target {} reflectivity must lie in (0, 1]",
                    t.id
                )));
            }
        }
        for (i, a) in self.targets.iter().enumerate() {
            for b in &self.targets[i + 1..] {
                if a.overlaps_xy(b) {
                    return Err(SimError::InvalidScene(format!(
                        "targets {} and {} interpenetrate",
                        a.id, b.id
                    )));
                }
                if a.id == b.id {
                    return Err(SimError::InvalidScene(format!(
                        "duplicate target id {}",
                        a.id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn tallest(&self) -> f64 {
        self.targets.iter().map(|t| t.height).fold(0.0, f64::max)
    }

    pub fn target(&self, id: &str) -> Option<&BoxTarget> {
        self.targets.iter().find(|t| t.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSpec {
    /// Standard deviation of the log-normal multiplicative speckle.
    pub speckle_sigma: f64,
    pub additive_sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn speckle(sigma: f64, seed: u64) -> Self {
        Self {
            speckle_sigma: sigma,
            additive_sigma: 0.0,
            seed,
        }
    }

    fn is_silent(&self) -> bool {
        self.speckle_sigma == 0.0 && self.additive_sigma == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenderOptions {
    /// Elevation rays per beam in the coarse sweep.
    pub elevation_samples: usize,
    /// Bisection steps used to locate surface transitions between rays.
    pub refine_iterations: usize,
    /// Fraction of a target's reflectivity returned regardless of incidence.
    pub target_ambient: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            elevation_samples: 256,
            refine_iterations: 48,
            target_ambient: 0.5,
        }
    }
}

/// How the second frame of a pair is aimed after the altitude change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PitchMode {
    #[default]
    Fixed,
    /// Re-aim the acoustic axis at the floor point it met before the move.
    TrackFloorPoint,
}

/// A rendered frame and its pre-noise class raster.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderedFrame {
    pub frame: SonarFrame,
    pub labels: LabelRaster,
}

/// Frame id derived from the altitude, e.g. `alt0350mm`.
pub fn altitude_frame_id(pose: &SonarPose) -> String {
    format!("alt{:04}mm", (pose.altitude() * 1000.0).round() as i64)
}

pub fn render_frame(
    scene: &Scene,
    pose: &SonarPose,
    fov: &FovSpec,
    noise: &NoiseSpec,
) -> Result<RenderedFrame, SimError> {
    render_frame_with(scene, pose, fov, noise, &RenderOptions::default())
}

pub fn render_frame_with(
    scene: &Scene,
    pose: &SonarPose,
    fov: &FovSpec,
    noise: &NoiseSpec,
    opts: &RenderOptions,
) -> Result<RenderedFrame, SimError> {
    scene.validate()?;
    fov.validate()?;
    if !pose.is_valid() {
        return Err(SimError::InvalidPose);
    }
    if pose.altitude() <= scene.tallest() {
        return Err(SimError::SensorBelowTarget {
            altitude: pose.altitude(),
            tallest: scene.tallest(),
        });
    }
    if !(noise.speckle_sigma >= 0.0 && noise.additive_sigma >= 0.0) {
        return Err(SimError::InvalidNoise("sigmas must be non-negative".into()));
    }
    if opts.elevation_samples < 2 {
        return Err(SimError::InvalidScene(
            "need at least 2 elevation samples".into(),
        ));
    }

    let tracer = Tracer {
        scene,
        pose,
        fov,
        opts,
    };
    let columns: Vec<Column> = (0..fov.n_beams)
        .into_par_iter()
        .map(|beam| tracer.column(beam, noise))
        .collect();

    if columns.iter().all(|c| !c.any_floor) {
        return Err(SimError::NoEnsonifiedFloor);
    }

    let mut intensities = Array2::<f64>::zeros((fov.n_range_bins, fov.n_beams));
    let mut labels = LabelRaster::zeros((fov.n_range_bins, fov.n_beams));
    for (beam, col) in columns.into_iter().enumerate() {
        for k in 0..fov.n_range_bins {
            intensities[[k, beam]] = col.values[k];
            labels[[k, beam]] = col.labels[k] as u8;
        }
    }
    let frame = SonarFrame::new(intensities, *fov, *pose, altitude_frame_id(pose))
        .with_seed((!noise.is_silent()).then_some(noise.seed));
    Ok(RenderedFrame { frame, labels })
}

/// Renders the frame at `pose` and a second one `delta_h` meters higher at the
/// same x-y position and yaw, sharing the noise seed.
pub fn render_pair(
    scene: &Scene,
    pose: &SonarPose,
    fov: &FovSpec,
    noise: &NoiseSpec,
    delta_h: f64,
) -> Result<(RenderedFrame, RenderedFrame), SimError> {
    render_pair_with(
        scene,
        pose,
        fov,
        noise,
        delta_h,
        PitchMode::Fixed,
        &RenderOptions::default(),
    )
}

pub fn render_pair_with(
    scene: &Scene,
    pose: &SonarPose,
    fov: &FovSpec,
    noise: &NoiseSpec,
    delta_h: f64,
    pitch_mode: PitchMode,
    opts: &RenderOptions,
) -> Result<(RenderedFrame, RenderedFrame), SimError> {
    let mut second = pose.raised(delta_h);
    if pitch_mode == PitchMode::TrackFloorPoint && pose.pitch > 0.0 {
        let ground = pose.altitude() / pose.pitch.tan();
        second.pitch = (second.altitude() / ground).atan();
    }
    let a = render_frame_with(scene, pose, fov, noise, opts)?;
    let b = render_frame_with(scene, &second, fov, noise, opts)?;
    Ok((a, b))
}

/// Flat-floor ground length of the shadow cast behind a target of height `h`
/// whose far top edge sits at ground range `x_t` from a sensor at altitude `altitude`.
pub fn analytic_shadow_length(altitude: f64, h: f64, x_t: f64) -> Result<f64, SimError> {
    if h >= altitude {
        return Err(SimError::SensorBelowTargetTop {
            altitude,
            height: h,
        });
    }
    if !(h >= 0.0) || !(x_t > 0.0) {
        return Err(SimError::InvalidScene(
            "shadow length needs h ≥ 0 and x_t > 0".into(),
        ));
    }
    Ok(x_t * h / (altitude - h))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Surface {
    Open,
    Floor,
    Face { target: usize, face: usize },
}

#[derive(Debug, Clone, Copy)]
struct Hit {
    phi: f64,
    surface: Surface,
    t: f64,
    intensity: f64,
}

struct Column {
    values: Vec<f64>,
    labels: Vec<PixelClass>,
    any_floor: bool,
}

struct Tracer<'a> {
    scene: &'a Scene,
    pose: &'a SonarPose,
    fov: &'a FovSpec,
    opts: &'a RenderOptions,
}

/// Entry distance and face index (`2·axis + [0 = max side, 1 = min side]`)
/// of a ray against an axis-aligned box; `None` when missed or starting inside.
fn ray_box(origin: [f64; 3], dir: [f64; 3], lo: [f64; 3], hi: [f64; 3]) -> Option<(f64, usize)> {
    let mut t_enter = f64::NEG_INFINITY;
    let mut t_exit = f64::INFINITY;
    let mut face = 0;
    for axis in 0..3 {
        if dir[axis].abs() < 1e-300 {
            if origin[axis] < lo[axis] || origin[axis] > hi[axis] {
                return None;
            }
            continue;
        }
        let inv = 1.0 / dir[axis];
        let ta = (lo[axis] - origin[axis]) * inv;
        let tb = (hi[axis] - origin[axis]) * inv;
        let (near, far, near_is_min) = if ta < tb {
            (ta, tb, true)
        } else {
            (tb, ta, false)
        };
        if near > t_enter {
            t_enter = near;
            face = 2 * axis + near_is_min as usize;
        }
        t_exit = t_exit.min(far);
    }
    if t_enter > t_exit || t_enter <= 0.0 {
        return None;
    }
    Some((t_enter, face))
}

fn face_normal(face: usize) -> [f64; 3] {
    let mut n = [0.0; 3];
    n[face / 2] = if face % 2 == 1 { -1.0 } else { 1.0 };
    n
}

impl Tracer<'_> {
    fn origin(&self) -> [f64; 3] {
        let p = self.pose.position;
        [p.x, p.y, p.z]
    }

    fn first_target_hit(&self, dir: [f64; 3]) -> Option<(f64, usize, usize)> {
        let origin = self.origin();
        self.scene
            .targets
            .iter()
            .enumerate()
            .filter_map(|(i, t)| {
                ray_box(origin, dir, t.min_corner(), t.max_corner()).map(|(d, f)| (d, i, f))
            })
            .min_by(|a, b| a.0.total_cmp(&b.0))
    }

    fn cast(&self, theta: f64, phi: f64) -> Hit {
        let dir = self.pose.ray_direction(theta, phi);
        let floor_t = if dir[2] < 0.0 {
            self.pose.altitude() / -dir[2]
        } else {
            f64::INFINITY
        };
        match self.first_target_hit(dir) {
            Some((t, target, face)) if t < floor_t => {
                let n = face_normal(face);
                let cos_inc = (dir[0] * n[0] + dir[1] * n[1] + dir[2] * n[2]).abs();
                let k = self.opts.target_ambient;
                let refl = self.scene.targets[target].reflectivity;
                Hit {
                    phi,
                    surface: Surface::Face { target, face },
                    t,
                    intensity: refl * (k + (1.0 - k) * cos_inc),
                }
            }
            _ if floor_t.is_finite() => Hit {
                phi,
                surface: Surface::Floor,
                t: floor_t,
                intensity: 0.0,
            },
            _ => Hit {
                phi,
                surface: Surface::Open,
                t: f64::INFINITY,
                intensity: 0.0,
            },
        }
    }

    fn column(&self, beam: usize, noise: &NoiseSpec) -> Column {
        let fov = self.fov;
        let n = fov.n_range_bins;
        let theta = fov.beam_angle(beam as f64);
        let mut highlight = vec![f64::NAN; n];
        let mut values = vec![0.0; n];
        let mut labels = vec![PixelClass::Background; n];
        let mut any_floor = false;

        // Floor: one floor point per range bin in this beam plane.
        let altitude = self.pose.altitude();
        for k in 0..n {
            let r = fov.bin_range(k as f64);
            let Some((_, phi)) = self.pose.point_at_height(r, theta, 0.0) else {
                continue;
            };
            if !fov.contains_elevation(phi) {
                continue;
            }
            any_floor = true;
            let dir = self.pose.ray_direction(theta, phi);
            let occluded =
                matches!(self.first_target_hit(dir), Some((t, _, _)) if t < r * (1.0 - 1e-9));
            if occluded {
                labels[k] = PixelClass::Shadow;
            } else {
                values[k] = self.scene.background_reflectivity * (altitude / r).min(1.0);
            }
        }

        // Targets: elevation sweep with bisected transitions.
        if !self.scene.targets.is_empty() {
            let half = 0.5 * fov.elevation_fov;
            let m = self.opts.elevation_samples;
            let mut prev = self.cast(theta, -half);
            for i in 1..m {
                let phi = -half + fov.elevation_fov * i as f64 / (m - 1) as f64;
                let next = self.cast(theta, phi);
                self.sweep(theta, prev, next, 8, &mut highlight);
                prev = next;
            }
        }

        for k in 0..n {
            if !highlight[k].is_nan() {
                labels[k] = PixelClass::Highlight;
                values[k] = values[k].max(highlight[k]);
            }
        }

        if !noise.is_silent() {
            let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
            rng.set_stream(beam as u64);
            for v in values.iter_mut() {
                let z1: f64 = StandardNormal.sample(&mut rng);
                let z2: f64 = StandardNormal.sample(&mut rng);
                let speckled = *v * (noise.speckle_sigma * z1).exp();
                *v = (speckled + noise.additive_sigma * z2).clamp(0.0, 1.0);
            }
        }

        Column {
            values,
            labels,
            any_floor,
        }
    }

    fn sweep(&self, theta: f64, a: Hit, b: Hit, depth: usize, acc: &mut [f64]) {
        if a.surface == b.surface {
            if matches!(a.surface, Surface::Face { .. }) {
                self.fill(a, b, acc);
            }
            return;
        }
        if depth == 0 {
            for h in [a, b] {
                if matches!(h.surface, Surface::Face { .. }) {
                    self.fill(h, h, acc);
                }
            }
            return;
        }
        let (mut lo, mut hi) = (a, b);
        for _ in 0..self.opts.refine_iterations {
            let mid = self.cast(theta, 0.5 * (lo.phi + hi.phi));
            if mid.surface == lo.surface {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if matches!(a.surface, Surface::Face { .. }) {
            self.fill(a, lo, acc);
        }
        self.sweep(theta, hi, b, depth - 1, acc);
    }

    /// Marks every bin spanned by the ranges of two hits on the same face.
    fn fill(&self, a: Hit, b: Hit, acc: &mut [f64]) {
        let n = acc.len() as i64;
        let ka = self.fov.range_bin(a.t).round() as i64;
        let kb = self.fov.range_bin(b.t).round() as i64;
        let (k0, k1) = (ka.min(kb), ka.max(kb));
        if k1 < 0 || k0 >= n {
            return;
        }
        for k in k0.max(0)..=k1.min(n - 1) {
            let w = if k1 == k0 {
                0.0
            } else {
                (k - ka) as f64 / (kb - ka) as f64
            };
            let v = a.intensity + w.clamp(0.0, 1.0) * (b.intensity - a.intensity);
            let slot = &mut acc[k as usize];
            if slot.is_nan() || v > *slot {
                *slot = v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::WorldPoint;

    fn pose(h: f64) -> SonarPose {
        SonarPose::new(WorldPoint::new(0.0, 0.0, h), 0.0, 17f64.to_radians())
    }

    #[test]
    fn analytic_shadow_examples() {
        assert_eq!(analytic_shadow_length(1.0, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(analytic_shadow_length(1.0, 0.5, 1.0).unwrap(), 1.0);
        let v = analytic_shadow_length(0.85, 0.028, 0.9).unwrap();
        assert!((v - 0.9 * 0.028 / 0.822).abs() < 1e-15);
        assert!((v - 0.03066).abs() < 1e-5);
        assert!(matches!(
            analytic_shadow_length(0.5, 0.5, 1.0),
            Err(SimError::SensorBelowTargetTop { .. })
        ));
    }

    #[test]
    fn ray_box_faces() {
        let (t, face) = ray_box(
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
            [2.0, -1.0, 0.0],
            [3.0, 1.0, 2.0],
        )
        .unwrap();
        assert_eq!(t, 2.0);
        assert_eq!(face, 1); // min-x face
        assert_eq!(face_normal(face), [-1.0, 0.0, 0.0]);
        assert!(ray_box(
            [0.0, 0.0, 5.0],
            [1.0, 0.0, 0.0],
            [2.0, -1.0, 0.0],
            [3.0, 1.0, 2.0]
        )
        .is_none());
    }

    #[test]
    fn empty_scene_has_no_shadow() {
        let fov = FovSpec::default();
        let out = render_frame(&Scene::empty(), &pose(0.35), &fov, &NoiseSpec::none()).unwrap();
        assert!(out
            .labels
            .iter()
            .all(|&l| l == PixelClass::Background as u8));
        let lit = out.frame.intensities.iter().filter(|&&v| v > 0.0).count();
        assert!(
            lit > fov.n_beams * 100,
            "expected a background band, got {lit} pixels"
        );
    }

    #[test]
    fn no_floor_in_aperture_is_an_error() {
        let fov = FovSpec::default();
        // Looking up: nothing of the floor inside the elevation band.
        let p = SonarPose::new(WorldPoint::new(0.0, 0.0, 0.35), 0.0, -0.5);
        assert_eq!(
            render_frame(&Scene::empty(), &p, &fov, &NoiseSpec::none()),
            Err(SimError::NoEnsonifiedFloor)
        );
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let fov = FovSpec::default();
        let noise = NoiseSpec {
            speckle_sigma: 0.1,
            additive_sigma: 0.01,
            seed: 7,
        };
        let a = render_frame(&Scene::five_targets(), &pose(0.35), &fov, &noise).unwrap();
        let b = render_frame(&Scene::five_targets(), &pose(0.35), &fov, &noise).unwrap();
        assert_eq!(a, b);
        let c = render_frame(
            &Scene::five_targets(),
            &pose(0.35),
            &fov,
            &NoiseSpec { seed: 8, ..noise },
        )
        .unwrap();
        assert_ne!(a.frame.intensities, c.frame.intensities);
    }

    #[test]
    fn single_box_casts_shadow_behind_highlight() {
        let fov = FovSpec::default();
        let mut scene = Scene::empty();
        let (l, w, h) = REFERENCE_SIZES[0];
        scene.targets.push(BoxTarget {
            id: "1".into(),
            center_xy: [1.0 + 0.5 * l, 0.0],
            length: l,
            width: w,
            height: h,
            reflectivity: 0.9,
        });
        let p = SonarPose::new(WorldPoint::new(0.0, 0.0, 0.85), 0.0, 40f64.to_radians());
        let out = render_frame(&scene, &p, &fov, &NoiseSpec::none()).unwrap();
        let col = fov.n_beams / 2;
        let rows: Vec<u8> = out.labels.column(col).to_vec();
        let last_h = rows.iter().rposition(|&c| c == 1).expect("highlight");
        let first_s = rows.iter().position(|&c| c == 2).expect("shadow");
        let last_s = rows.iter().rposition(|&c| c == 2).unwrap();
        assert!(first_s > last_h - 1);
        assert!(
            rows[first_s..=last_s].iter().all(|&c| c == 2),
            "shadow run must be contiguous"
        );
    }

    #[test]
    fn pair_with_zero_offset_is_identical() {
        let fov = FovSpec::default();
        let noise = NoiseSpec::speckle(0.05, 3);
        let (a, b) = render_pair(&Scene::five_targets(), &pose(0.35), &fov, &noise, 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_scenes() {
        let mut s = Scene::five_targets();
        s.targets[1].center_xy = s.targets[0].center_xy;
        assert!(matches!(s.validate(), Err(SimError::InvalidScene(_))));
        let fov = FovSpec::default();
        assert!(matches!(
            render_frame(
                &Scene::five_targets(),
                &pose(0.04),
                &fov,
                &NoiseSpec::none()
            ),
            Err(SimError::SensorBelowTarget { .. })
        ));
    }
}
