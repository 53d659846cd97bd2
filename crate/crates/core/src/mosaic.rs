//! Pose-registered seafloor mosaic with a target height layer.
//!
//! Cells live on a world lattice: cell `(i, j)` covers
//! `[i·c, (i+1)·c) × [j·c, (j+1)·c)` for cell size `c`, so mosaics built from
//! the same cell size always align.

use std::collections::BTreeMap;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimation::HeightEstimate;
use crate::frame::SonarFrame;
use crate::geometry::{SonarPose, WorldPoint};

pub const DEFAULT_CELL_SIZE: f64 = 0.005;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnnotateError {
    #[error("no frame with id {0:?} among the supplied frames")]
    MissingFrame(String),
    #[error("estimate for {target_id} cannot be placed on the floor from frame {frame_id}")]
    Unresolvable { target_id: String, frame_id: String },
}

/// Floor point seen by slant range `r` on the beam at azimuth `theta`.
/// `None` when the floor is out of reach (`r` below the altitude).
pub fn ground_project(pose: &SonarPose, r: f64, theta: f64) -> Option<[f64; 2]> {
    pose.point_at_height(r, theta, 0.0).map(|(w, _)| w.xy())
}

/// Floor position of pixel `(bin, beam)`, restricted to the elevation aperture.
pub fn project_pixel(frame: &SonarFrame, bin: f64, beam: f64) -> Option<[f64; 2]> {
    let fov = &frame.fov;
    let (w, phi) = frame
        .pose
        .point_at_height(fov.bin_range(bin), fov.beam_angle(beam), 0.0)?;
    fov.contains_elevation(phi).then_some(w.xy())
}

/// Floor positions and intensities of every pixel that can see the floor.
pub fn project_frame(frame: &SonarFrame) -> Vec<([f64; 2], f64)> {
    let mut out = Vec::new();
    for ((bin, beam), &v) in frame.intensities.indexed_iter() {
        if let Some(xy) = project_pixel(frame, bin as f64, beam as f64) {
            out.push((xy, v));
        }
    }
    out
}

/// Whether the floor point `xy` lies inside the frame's field of view.
pub fn footprint_contains(frame: &SonarFrame, xy: [f64; 2]) -> bool {
    let p = frame
        .pose
        .world_to_polar(WorldPoint::new(xy[0], xy[1], 0.0));
    frame.fov.contains(&p)
}

/// Running-mean mosaic on the world lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Mosaic {
    pub cell_size: f64,
    /// Lattice index of column 0 and row 0.
    pub i0: i64,
    pub j0: i64,
    /// Per-cell intensity sums and hit counts, indexed `[j − j0, i − i0]`.
    pub sum: Array2<f64>,
    pub hits: Array2<u32>,
}

impl Mosaic {
    pub fn new(cell_size: f64) -> Self {
        assert!(cell_size > 0.0, "cell size must be positive");
        Self {
            cell_size,
            i0: 0,
            j0: 0,
            sum: Array2::zeros((0, 0)),
            hits: Array2::zeros((0, 0)),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.sum.is_empty()
    }

    /// `(rows, cols)` of the raster.
    pub fn dim(&self) -> (usize, usize) {
        self.sum.dim()
    }

    /// World x-y of the lower-left corner of cell `[0, 0]`.
    pub fn origin(&self) -> WorldPoint {
        WorldPoint::new(
            self.i0 as f64 * self.cell_size,
            self.j0 as f64 * self.cell_size,
            0.0,
        )
    }

    pub fn cell_of(&self, xy: [f64; 2]) -> (i64, i64) {
        (
            (xy[0] / self.cell_size).floor() as i64,
            (xy[1] / self.cell_size).floor() as i64,
        )
    }

    pub fn cell_center(&self, i: i64, j: i64) -> [f64; 2] {
        [
            (i as f64 + 0.5) * self.cell_size,
            (j as f64 + 0.5) * self.cell_size,
        ]
    }

    /// Mean intensity of the cell holding `xy`; `None` where nothing landed.
    pub fn value_at(&self, xy: [f64; 2]) -> Option<f64> {
        let (i, j) = self.cell_of(xy);
        let (r, c) = self.local(i, j)?;
        let n = self.hits[[r, c]];
        (n > 0).then(|| self.sum[[r, c]] / n as f64)
    }

    /// Mean intensity per cell, `None` where the hit count is zero.
    pub fn mean(&self) -> Array2<Option<f64>> {
        Array2::from_shape_fn(self.dim(), |p| {
            let n = self.hits[p];
            (n > 0).then(|| self.sum[p] / n as f64)
        })
    }

    pub fn covered_cells(&self) -> usize {
        self.hits.iter().filter(|&&n| n > 0).count()
    }

    fn local(&self, i: i64, j: i64) -> Option<(usize, usize)> {
        let (rows, cols) = self.dim();
        let c = i - self.i0;
        let r = j - self.j0;
        (c >= 0 && r >= 0 && (c as usize) < cols && (r as usize) < rows)
            .then_some((r as usize, c as usize))
    }

    /// Grows the raster so it spans lattice cells `[i_lo, i_hi] × [j_lo, j_hi]`.
    fn cover(&mut self, i_lo: i64, i_hi: i64, j_lo: i64, j_hi: i64) {
        let (rows, cols) = self.dim();
        let (ni0, nj0, ni1, nj1) = if self.is_empty() {
            (i_lo, j_lo, i_hi, j_hi)
        } else {
            (
                self.i0.min(i_lo),
                self.j0.min(j_lo),
                (self.i0 + cols as i64 - 1).max(i_hi),
                (self.j0 + rows as i64 - 1).max(j_hi),
            )
        };
        let shape = ((nj1 - nj0 + 1) as usize, (ni1 - ni0 + 1) as usize);
        if !self.is_empty() && (ni0, nj0) == (self.i0, self.j0) && shape == (rows, cols) {
            return;
        }
        let mut sum = Array2::zeros(shape);
        let mut hits = Array2::zeros(shape);
        let (dr, dc) = ((self.j0 - nj0) as usize, (self.i0 - ni0) as usize);
        for ((r, c), &v) in self.sum.indexed_iter() {
            sum[[r + dr, c + dc]] = v;
            hits[[r + dr, c + dc]] = self.hits[[r, c]];
        }
        self.i0 = ni0;
        self.j0 = nj0;
        self.sum = sum;
        self.hits = hits;
    }

    /// Adds another mosaic's sums and counts cell by cell.
    pub fn merge(&mut self, other: &Mosaic) {
        assert_eq!(self.cell_size, other.cell_size, "cell sizes differ");
        if other.is_empty() {
            return;
        }
        let (rows, cols) = other.dim();
        self.cover(
            other.i0,
            other.i0 + cols as i64 - 1,
            other.j0,
            other.j0 + rows as i64 - 1,
        );
        let (dr, dc) = ((other.j0 - self.j0) as usize, (other.i0 - self.i0) as usize);
        for ((r, c), &n) in other.hits.indexed_iter() {
            if n > 0 {
                self.sum[[r + dr, c + dc]] += other.sum[[r, c]];
                self.hits[[r + dr, c + dc]] += n;
            }
        }
    }

    /// Accumulates scattered floor samples, growing the raster as needed.
    pub fn blend(&mut self, points: &[([f64; 2], f64)]) {
        self.merge(&Self::from_points(self.cell_size, points));
    }

    fn from_points(cell_size: f64, points: &[([f64; 2], f64)]) -> Self {
        let mut m = Self::new(cell_size);
        let cells: Vec<(i64, i64)> = points.iter().map(|(xy, _)| m.cell_of(*xy)).collect();
        let Some(i_lo) = cells.iter().map(|c| c.0).min() else {
            return m;
        };
        let i_hi = cells.iter().map(|c| c.0).max().unwrap();
        let j_lo = cells.iter().map(|c| c.1).min().unwrap();
        let j_hi = cells.iter().map(|c| c.1).max().unwrap();
        m.cover(i_lo, i_hi, j_lo, j_hi);
        for (&(i, j), (_, v)) in cells.iter().zip(points) {
            let p = m.local(i, j).unwrap();
            m.sum[p] += v;
            m.hits[p] += 1;
        }
        m
    }

    /// Resamples one frame onto the lattice: every cell whose center falls in
    /// the field of view takes the nearest pixel once.
    pub fn frame_layer(cell_size: f64, frame: &SonarFrame) -> Self {
        let mut m = Self::new(cell_size);
        let corners = footprint_outline(frame);
        let Some(bounds) = bounding_cells(&m, &corners) else {
            return m;
        };
        m.cover(bounds.0, bounds.1, bounds.2, bounds.3);
        let (rows, cols) = m.dim();
        let fov = &frame.fov;
        let (i0, j0) = (m.i0, m.j0);
        let samples: Vec<(usize, usize, f64)> = (0..rows)
            .into_par_iter()
            .flat_map_iter(|r| {
                (0..cols).filter_map(move |c| {
                    let xy = [
                        ((i0 + c as i64) as f64 + 0.5) * cell_size,
                        ((j0 + r as i64) as f64 + 0.5) * cell_size,
                    ];
                    let p = frame
                        .pose
                        .world_to_polar(WorldPoint::new(xy[0], xy[1], 0.0));
                    if !fov.contains(&p) {
                        return None;
                    }
                    let bin = (fov.range_bin(p.r).round() as usize).min(fov.n_range_bins - 1);
                    let beam =
                        (fov.beam_index(p.theta).round().max(0.0) as usize).min(fov.n_beams - 1);
                    Some((r, c, frame.intensities[[bin, beam]]))
                })
            })
            .collect();
        for (r, c, v) in samples {
            m.sum[[r, c]] = v;
            m.hits[[r, c]] = 1;
        }
        m
    }

    pub fn add_frame(&mut self, frame: &SonarFrame) {
        self.merge(&Self::frame_layer(self.cell_size, frame));
    }

    /// Mosaic of a frame sequence. Per-frame layers are built in parallel and
    /// summed in input order.
    pub fn from_frames(cell_size: f64, frames: &[SonarFrame]) -> Self {
        let layers: Vec<Mosaic> = frames
            .par_iter()
            .map(|f| Self::frame_layer(cell_size, f))
            .collect();
        let mut m = Self::new(cell_size);
        for l in &layers {
            m.merge(l);
        }
        m
    }
}

/// Floor points along the border of the frame's ensonified footprint.
fn footprint_outline(frame: &SonarFrame) -> Vec<[f64; 2]> {
    let fov = &frame.fov;
    let (nb, nr) = (fov.n_beams as f64, fov.n_range_bins as f64);
    let mut pts = Vec::new();
    let steps = 64;
    for s in 0..=steps {
        let t = s as f64 / steps as f64;
        let beam = -0.5 + t * nb;
        for e in 0..=steps {
            let bin = -0.5 + e as f64 / steps as f64 * nr;
            let theta = fov.beam_angle(beam);
            let r = fov.bin_range(bin);
            // Any floor point reachable at this range and azimuth, clipped to
            // the elevation aperture.
            if let Some((w, phi)) = frame.pose.point_at_height(r, theta, 0.0) {
                if fov.contains_elevation(phi) {
                    pts.push(w.xy());
                }
            }
        }
    }
    pts
}

fn bounding_cells(m: &Mosaic, pts: &[[f64; 2]]) -> Option<(i64, i64, i64, i64)> {
    if pts.is_empty() {
        return None;
    }
    let pad = 2;
    let cells: Vec<(i64, i64)> = pts.iter().map(|p| m.cell_of(*p)).collect();
    Some((
        cells.iter().map(|c| c.0).min()? - pad,
        cells.iter().map(|c| c.0).max()? + pad,
        cells.iter().map(|c| c.1).min()? - pad,
        cells.iter().map(|c| c.1).max()? + pad,
    ))
}

/// Where an estimated target sits on the floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetLocation {
    /// Top edge facing the sensor.
    pub near_xy: [f64; 2],
    /// Top edge casting the shadow.
    pub far_xy: [f64; 2],
    pub center_xy: [f64; 2],
}

/// Places an estimate on the floor using the pose of its first frame.
pub fn locate(
    estimate: &HeightEstimate,
    frame: &SonarFrame,
) -> Result<TargetLocation, AnnotateError> {
    let obs = &estimate.pair.obs1;
    let fov = &frame.fov;
    let theta = fov.beam_angle(obs.bearing);
    let unresolvable = || AnnotateError::Unresolvable {
        target_id: estimate.target_id.clone(),
        frame_id: frame.frame_id.clone(),
    };
    let at = |bin: f64| {
        frame
            .pose
            .point_at_height(fov.bin_range(bin), theta, estimate.height_m)
            .map(|(w, _)| w.xy())
    };
    let far = at(obs.r).ok_or_else(unresolvable)?;
    let near = obs.near_bin.and_then(at).unwrap_or(far);
    Ok(TargetLocation {
        near_xy: near,
        far_xy: far,
        center_xy: [0.5 * (near[0] + far[0]), 0.5 * (near[1] + far[1])],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightAnnotation {
    pub target_id: String,
    pub world_xy: [f64; 2],
    pub height_cm: f64,
    /// `(first, second)` frame ids of every pair that observed the target.
    pub source_frames: Vec<(String, String)>,
    /// Number of estimates averaged into this annotation.
    pub count: usize,
    pub merged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedMosaic {
    pub mosaic: Mosaic,
    pub annotations: Vec<HeightAnnotation>,
    pub errors: Vec<(String, AnnotateError)>,
}

/// Attaches height annotations to a mosaic. Estimates sharing a target id are
/// merged by mean position and mean height.
pub fn annotate(
    mosaic: Mosaic,
    estimates: &[HeightEstimate],
    frames: &[SonarFrame],
) -> AnnotatedMosaic {
    let by_id: BTreeMap<&str, &SonarFrame> =
        frames.iter().map(|f| (f.frame_id.as_str(), f)).collect();
    let mut groups: BTreeMap<String, Vec<(TargetLocation, &HeightEstimate)>> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut errors = Vec::new();
    for e in estimates {
        let fid = &e.pair.obs1.frame_id;
        let located = by_id
            .get(fid.as_str())
            .ok_or_else(|| AnnotateError::MissingFrame(fid.clone()))
            .and_then(|f| locate(e, f));
        match located {
            Ok(loc) => {
                if !groups.contains_key(&e.target_id) {
                    order.push(e.target_id.clone());
                }
                groups
                    .entry(e.target_id.clone())
                    .or_default()
                    .push((loc, e));
            }
            Err(err) => errors.push((e.target_id.clone(), err)),
        }
    }
    let annotations = order
        .into_iter()
        .map(|id| {
            let g = &groups[&id];
            let n = g.len() as f64;
            let mean = |f: &dyn Fn(&(TargetLocation, &HeightEstimate)) -> f64| {
                g.iter().map(f).sum::<f64>() / n
            };
            HeightAnnotation {
                target_id: id.clone(),
                world_xy: [mean(&|x| x.0.center_xy[0]), mean(&|x| x.0.center_xy[1])],
                height_cm: mean(&|x| x.1.height_cm()),
                source_frames: g
                    .iter()
                    .map(|(_, e)| (e.pair.obs1.frame_id.clone(), e.pair.obs2.frame_id.clone()))
                    .collect(),
                count: g.len(),
                merged: g.len() > 1,
            }
        })
        .collect();
    AnnotatedMosaic {
        mosaic,
        annotations,
        errors,
    }
}

/// Renames estimates from several passes so that those lying within
/// `radius` meters of each other on the floor share one id (`T1`, `T2`, … in
/// order of first appearance). Estimates that cannot be located keep their id.
pub fn unify_target_ids(estimates: &mut [HeightEstimate], frames: &[SonarFrame], radius: f64) {
    let by_id: BTreeMap<&str, &SonarFrame> =
        frames.iter().map(|f| (f.frame_id.as_str(), f)).collect();
    let mut clusters: Vec<([f64; 2], usize)> = Vec::new();
    for e in estimates.iter_mut() {
        let Some(frame) = by_id.get(e.pair.obs1.frame_id.as_str()) else {
            continue;
        };
        let Ok(loc) = locate(e, frame) else { continue };
        let c = loc.center_xy;
        let hit = clusters
            .iter_mut()
            .enumerate()
            .find(|(_, (m, _))| (m[0] - c[0]).hypot(m[1] - c[1]) <= radius);
        let k = match hit {
            Some((k, (m, n))) => {
                let w = *n as f64;
                *m = [(m[0] * w + c[0]) / (w + 1.0), (m[1] * w + c[1]) / (w + 1.0)];
                *n += 1;
                k
            }
            None => {
                clusters.push((c, 1));
                clusters.len() - 1
            }
        };
        let id = format!("T{}", k + 1);
        e.target_id = id.clone();
        e.pair.obs1.target_id = id.clone();
        e.pair.obs2.target_id = id;
    }
}
