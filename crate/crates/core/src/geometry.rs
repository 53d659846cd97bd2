//! Acoustic-camera imaging model and coordinate conversions.
//!
//! Frames used throughout the crate:
//!
//! * **sensor frame**: x along the acoustic axis, y to port, z up. A return at
//!   slant range `r`, azimuth `theta` and elevation `phi` sits at
//!   `r·(cosφ·cosθ, cosφ·sinθ, sinφ)`.
//! * **world frame**: right-handed, z up, the seafloor is the plane `z = 0`.
//!   A [`SonarPose`] places the sensor frame in the world (pitch first, then yaw).
//! * **polar raster**: row = range bin (ascending range), column = beam
//!   (ascending azimuth). See [`FovSpec`].
//! * **fan image**: Cartesian rendering of the polar raster, see [`FanGeometry`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("ground range must be positive, got {0} m")]
    NonPositiveGroundRange(f64),
    #[error("slant range {r} m cannot reach the floor from altitude {altitude} m")]
    AboveFloorRange { r: f64, altitude: f64 },
    #[error("altitude must be positive, got {0} m")]
    NonPositiveAltitude(f64),
    #[error("pixel ({bin}, {beam}) outside the {n_bins}x{n_beams} raster")]
    PixelOutOfBounds {
        bin: f64,
        beam: f64,
        n_bins: usize,
        n_beams: usize,
    },
    #[error("invalid field of view: {0}")]
    InvalidFov(String),
}

/// Point in sensor polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    /// Slant range, meters.
    pub r: f64,
    /// Azimuth, radians.
    pub theta: f64,
    /// Elevation, radians.
    pub phi: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64, phi: f64) -> Self {
        Self { r, theta, phi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WorldPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl WorldPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn xy(&self) -> [f64; 2] {
        [self.x, self.y]
    }
}

/// Position and attitude of the acoustic center.
///
/// `position.z` is the altitude above the floor. Pitch is positive nose down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SonarPose {
    pub position: WorldPoint,
    pub yaw: f64,
    pub pitch: f64,
}

impl SonarPose {
    pub fn new(position: WorldPoint, yaw: f64, pitch: f64) -> Self {
        Self {
            position,
            yaw,
            pitch,
        }
    }

    pub fn altitude(&self) -> f64 {
        self.position.z
    }

    pub fn is_valid(&self) -> bool {
        self.position.z > 0.0
            && self.pitch.abs() < std::f64::consts::FRAC_PI_2
            && self.position.x.is_finite()
            && self.position.y.is_finite()
            && self.yaw.is_finite()
    }

    /// Same pose raised by `dz` meters.
    pub fn raised(&self, dz: f64) -> Self {
        let mut out = *self;
        out.position.z += dz;
        out
    }

    /// Rotates a sensor-frame vector into the world frame.
    pub fn sensor_to_world(&self, v: [f64; 3]) -> [f64; 3] {
        let (sp, cp) = self.pitch.sin_cos();
        let (sy, cy) = self.yaw.sin_cos();
        let x1 = v[0] * cp + v[2] * sp;
        let z1 = -v[0] * sp + v[2] * cp;
        let y1 = v[1];
        [x1 * cy - y1 * sy, x1 * sy + y1 * cy, z1]
    }

    /// Inverse of [`SonarPose::sensor_to_world`].
    pub fn world_to_sensor(&self, v: [f64; 3]) -> [f64; 3] {
        let (sp, cp) = self.pitch.sin_cos();
        let (sy, cy) = self.yaw.sin_cos();
        let x1 = v[0] * cy + v[1] * sy;
        let y1 = -v[0] * sy + v[1] * cy;
        let z1 = v[2];
        [x1 * cp - z1 * sp, y1, x1 * sp + z1 * cp]
    }

    /// World-frame unit direction of the ray at azimuth `theta`, elevation `phi`.
    pub fn ray_direction(&self, theta: f64, phi: f64) -> [f64; 3] {
        let p = project_to_world(PolarPoint::new(1.0, theta, phi));
        self.sensor_to_world([p.x, p.y, p.z])
    }

    pub fn polar_to_world(&self, p: PolarPoint) -> WorldPoint {
        let d = self.ray_direction(p.theta, p.phi);
        WorldPoint::new(
            self.position.x + p.r * d[0],
            self.position.y + p.r * d[1],
            self.position.z + p.r * d[2],
        )
    }

    pub fn world_to_polar(&self, w: WorldPoint) -> PolarPoint {
        let v = self.world_to_sensor([
            w.x - self.position.x,
            w.y - self.position.y,
            w.z - self.position.z,
        ]);
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if r == 0.0 {
            return PolarPoint::new(0.0, 0.0, 0.0);
        }
        PolarPoint::new(r, v[1].atan2(v[0]), (v[2] / r).clamp(-1.0, 1.0).asin())
    }

    /// Point at slant range `r` on the beam at azimuth `theta` whose height is
    /// `z_level`, together with the elevation angle of the ray reaching it.
    ///
    /// Returns `None` when no forward-looking ray of that beam reaches the
    /// height at that range.
    pub fn point_at_height(&self, r: f64, theta: f64, z_level: f64) -> Option<(WorldPoint, f64)> {
        if r <= 0.0 {
            return None;
        }
        // World z of the unit ray is a·sinφ + b·cosφ.
        let (sp, cp) = self.pitch.sin_cos();
        let a = cp;
        let b = -theta.cos() * sp;
        let c = (z_level - self.position.z) / r;
        let amp = a.hypot(b);
        if c.abs() > amp {
            return None;
        }
        let phi = (c / amp).asin() - b.atan2(a);
        if phi.abs() > std::f64::consts::FRAC_PI_2 {
            return None;
        }
        let mut w = self.polar_to_world(PolarPoint::new(r, theta, phi));
        w.z = z_level;
        Some((w, phi))
    }
}

/// Field of view and raster layout of the acoustic camera.
///
/// Beam `b` is centered at azimuth `-azimuth_fov/2 + (b + 0.5)·beam_width`.
/// Range bin `k` is centered at `r_min + k·bin_size` so bin 0 sits on `r_min`
/// and the last bin on `r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FovSpec {
    pub azimuth_fov: f64,
    pub elevation_fov: f64,
    pub n_beams: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub n_range_bins: usize,
}

impl Default for FovSpec {
    /// ARIS Explorer 3000 layout: 128 beams of 0.25° over 32° azimuth, 14°
    /// elevation; 1024 range bins over 0.8–2.0 m.
    fn default() -> Self {
        Self {
            azimuth_fov: 32f64.to_radians(),
            elevation_fov: 14f64.to_radians(),
            n_beams: 128,
            r_min: 0.8,
            r_max: 2.0,
            n_range_bins: 1024,
        }
    }
}

impl FovSpec {
    pub fn validate(&self) -> Result<(), GeometryError> {
        let bad = |m: &str| Err(GeometryError::InvalidFov(m.to_string()));
        if !(self.azimuth_fov > 0.0 && self.azimuth_fov < std::f64::consts::PI) {
            return bad("azimuth_fov must lie in (0, π)");
        }
        if !(self.elevation_fov > 0.0 && self.elevation_fov < std::f64::consts::PI) {
            return bad("elevation_fov must lie in (0, π)");
        }
        if self.n_beams == 0 {
            return bad("n_beams must be positive");
        }
        if !(self.r_min >= 0.0 && self.r_min < self.r_max) {
            return bad("range window requires 0 ≤ r_min < r_max");
        }
        if self.n_range_bins < 2 {
            return bad("n_range_bins must be at least 2");
        }
        Ok(())
    }

    pub fn beam_width(&self) -> f64 {
        self.azimuth_fov / self.n_beams as f64
    }

    /// Azimuth of a (possibly fractional) beam index.
    pub fn beam_angle(&self, beam: f64) -> f64 {
        -0.5 * self.azimuth_fov + (beam + 0.5) * self.beam_width()
    }

    /// Fractional beam index of an azimuth.
    pub fn beam_index(&self, theta: f64) -> f64 {
        (theta + 0.5 * self.azimuth_fov) / self.beam_width() - 0.5
    }

    pub fn bin_size(&self) -> f64 {
        (self.r_max - self.r_min) / (self.n_range_bins - 1) as f64
    }

    /// Slant range of a (possibly fractional) range bin.
    pub fn bin_range(&self, bin: f64) -> f64 {
        self.r_min + bin * self.bin_size()
    }

    /// Fractional range bin of a slant range.
    pub fn range_bin(&self, r: f64) -> f64 {
        (r - self.r_min) / self.bin_size()
    }

    /// Distance in bins from the zero-range apex to raster row 0.
    pub fn baseline_offset_bins(&self) -> f64 {
        self.r_min / self.bin_size()
    }

    pub fn contains_elevation(&self, phi: f64) -> bool {
        phi.abs() <= 0.5 * self.elevation_fov + 1e-12
    }

    pub fn contains(&self, p: &PolarPoint) -> bool {
        p.r >= self.r_min
            && p.r <= self.r_max
            && p.theta.abs() <= 0.5 * self.azimuth_fov
            && self.contains_elevation(p.phi)
    }
}

/// Sensor-frame Cartesian coordinates of a polar point.
pub fn project_to_world(p: PolarPoint) -> WorldPoint {
    let (st, ct) = p.theta.sin_cos();
    let (sf, cf) = p.phi.sin_cos();
    WorldPoint::new(p.r * cf * ct, p.r * cf * st, p.r * sf)
}

/// Image-plane coordinates `(r, theta)`: the elevation is lost.
pub fn zero_elevation_projection(p: PolarPoint) -> (f64, f64) {
    (p.r, p.theta)
}

/// Grazing angle of the beam on a flat floor at the given ground range.
pub fn grazing_angle(pose: &SonarPose, ground_range: f64) -> Result<f64, GeometryError> {
    if !(ground_range > 0.0) {
        return Err(GeometryError::NonPositiveGroundRange(ground_range));
    }
    Ok((pose.altitude() / ground_range).atan())
}

/// Horizontal distance to the floor point at slant range `r` from altitude `altitude`.
pub fn slant_to_ground(r: f64, altitude: f64) -> Result<f64, GeometryError> {
    if !(altitude > 0.0) {
        return Err(GeometryError::NonPositiveAltitude(altitude));
    }
    if r < altitude {
        return Err(GeometryError::AboveFloorRange { r, altitude });
    }
    Ok(((r - altitude) * (r + altitude)).sqrt())
}

/// Layout of the Cartesian fan image rendered from a polar raster.
///
/// The apex (zero range) sits at `(apex_x, apex_y)` in pixel coordinates and
/// lies below the last image row whenever `r_min > 0`; `apex_offset_px` is
/// the distance from the bottom-center of the fan band to that apex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanGeometry {
    pub fov: FovSpec,
    /// Pixels per meter.
    pub scale: f64,
    pub width: usize,
    pub height: usize,
    pub apex_x: f64,
    pub apex_y: f64,
    pub apex_offset_px: f64,
}

impl FanGeometry {
    /// Fan layout with `out_height` rows; the width follows from the azimuth span.
    pub fn new(fov: FovSpec, out_height: usize) -> Result<Self, GeometryError> {
        fov.validate()?;
        if out_height < 2 {
            return Err(GeometryError::InvalidFov(
                "fan height must be ≥ 2 px".into(),
            ));
        }
        let half = 0.5 * fov.azimuth_fov;
        let depth = fov.r_max - fov.r_min * half.cos();
        let scale = (out_height - 1) as f64 / depth;
        let width = (2.0 * fov.r_max * half.sin() * scale).floor() as usize + 1;
        let apex_x = (width - 1) as f64 / 2.0;
        let apex_y = fov.r_max * scale;
        Ok(Self {
            fov,
            scale,
            width,
            height: out_height,
            apex_x,
            apex_y,
            apex_offset_px: fov.r_min * scale,
        })
    }

    /// Fan-image coordinates `(x, y)` of a polar raster pixel `(bin, beam)`.
    pub fn polar_to_fan(&self, bin: f64, beam: f64) -> Result<(f64, f64), GeometryError> {
        let n_bins = self.fov.n_range_bins;
        let n_beams = self.fov.n_beams;
        let in_bounds = bin >= 0.0
            && bin <= (n_bins - 1) as f64
            && beam >= -0.5
            && beam <= n_beams as f64 - 0.5;
        if !in_bounds {
            return Err(GeometryError::PixelOutOfBounds {
                bin,
                beam,
                n_bins,
                n_beams,
            });
        }
        let r = self.fov.bin_range(bin);
        let (st, ct) = self.fov.beam_angle(beam).sin_cos();
        Ok((
            self.apex_x + r * st * self.scale,
            self.apex_y - r * ct * self.scale,
        ))
    }

    /// Inverse of [`FanGeometry::polar_to_fan`]; the result may fall outside
    /// the raster for pixels outside the fan band.
    pub fn fan_to_polar(&self, x: f64, y: f64) -> (f64, f64) {
        let dx = (x - self.apex_x) / self.scale;
        let dy = (self.apex_y - y) / self.scale;
        let r = dx.hypot(dy);
        let theta = dx.atan2(dy);
        (self.fov.range_bin(r), self.fov.beam_index(theta))
    }

    /// Slant range of a distance measured upward from the bottom-center of the
    /// fan band (pixels), corrected for the apex offset.
    pub fn center_range_from_bottom(&self, px_from_bottom: f64) -> f64 {
        (px_from_bottom + self.apex_offset_px) / self.scale
    }
}
