//! Target height from cast-shadow measurements taken at two sensor altitudes.
//!
//! Along the ray grazing a target's top edge (height `h`), the edge lies at
//! slant range `R` and the shadow ends on the floor at `R + L`. Similar
//! triangles give `(H − h) / R = H / (R + L)`, i.e. `H = h·(R + L)/L`. Two
//! frames taken `ΔH` apart eliminate the unknown altitude:
//!
//! ```text
//! h = ΔH·L1·L2 / (L1·(R2 + L2) − L2·(R1 + L1))
//! ```
//!
//! `R` must be counted from the zero-range apex; the pixel scale cancels.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::SonarFrame;
use crate::geometry::slant_to_ground;
use crate::segmentation::{
    fit_critical_line, measure, pair_regions, segment_with, PairThresholds, RegionSet,
    SegmentError, SegmentParams, ShadowObservation,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("degenerate geometry: |D| = {denominator:e} bins² ≤ ε; the pair does not express an altitude change")]
    DegenerateGeometry { denominator: f64 },
    #[error("inconsistent pair: solved height {height_m} m is not positive")]
    InconsistentPair { height_m: f64 },
    #[error("shadow lengths must be positive (L1 = {l1}, L2 = {l2})")]
    NonPositiveShadow { l1: f64, l2: f64 },
    #[error("observations belong to different targets ({0} vs {1})")]
    TargetMismatch(String, String),
    #[error("altitude change must be nonzero")]
    ZeroAltitudeChange,
    #[error("frames have different fields of view")]
    FovMismatch,
    #[error("no shadow observation in frame {frame}; unmatched after the altitude change")]
    Unmatched { frame: String },
    #[error(transparent)]
    Segment(#[from] SegmentError),
}

/// Where measured critical-line ranges are counted from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeOrigin {
    /// Zero-range apex: raster bins plus the `r_min` offset.
    #[default]
    Apex,
    /// Raster row 0, as read off an uncorrected image.
    Raster,
}

/// Gates and tolerances of the estimation stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimateConfig {
    /// Degeneracy gate on the denominator, bins².
    pub epsilon: f64,
    /// Largest bearing change (beams) accepted when matching across frames.
    pub max_beam_gap: f64,
    /// Largest critical-line shift (bins) accepted when matching across frames.
    pub max_shift_bins: f64,
    pub range_origin: RangeOrigin,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            max_beam_gap: 6.0,
            max_shift_bins: 40.0,
            range_origin: RangeOrigin::Apex,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationPair {
    pub obs1: ShadowObservation,
    pub obs2: ShadowObservation,
    /// `H2 − H1`, meters.
    pub delta_h: f64,
}

impl ObservationPair {
    pub fn new(obs1: ShadowObservation, obs2: ShadowObservation, delta_h: f64) -> Self {
        Self {
            obs1,
            obs2,
            delta_h,
        }
    }

    /// Pair built straight from `(R1, L1, R2, L2)` measured from the apex.
    pub fn from_measurements(
        target_id: &str,
        r1: f64,
        l1: f64,
        r2: f64,
        l2: f64,
        delta_h: f64,
    ) -> Self {
        Self::new(
            ShadowObservation::from_measurement(target_id, r1, l1),
            ShadowObservation::from_measurement(target_id, r2, l2),
            delta_h,
        )
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.obs2.clone(), self.obs1.clone(), -self.delta_h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightEstimate {
    pub target_id: String,
    pub height_m: f64,
    /// `L1·(R2+L2) − L2·(R1+L1)`, bins².
    pub denominator: f64,
    /// Altitude of the first frame implied by the solution, meters.
    pub aux_altitude_m: Option<f64>,
    /// Ground range of the shadow-casting edge in the first frame, meters.
    pub aux_ground_range_m: Option<f64>,
    pub pair: ObservationPair,
}

impl HeightEstimate {
    pub fn height_cm(&self) -> f64 {
        self.height_m * 100.0
    }
}

/// Denominator `L1·(R2+L2) − L2·(R1+L1)` of the two-altitude solution.
pub fn shadow_denominator(r1: f64, l1: f64, r2: f64, l2: f64) -> f64 {
    l1 * (r2 + l2) - l2 * (r1 + l1)
}

pub fn solve_height(pair: &ObservationPair) -> Result<HeightEstimate, EstimateError> {
    solve_height_with(pair, EstimateConfig::default().epsilon)
}

pub fn solve_height_with(
    pair: &ObservationPair,
    epsilon: f64,
) -> Result<HeightEstimate, EstimateError> {
    let (o1, o2) = (&pair.obs1, &pair.obs2);
    if o1.target_id != o2.target_id {
        return Err(EstimateError::TargetMismatch(
            o1.target_id.clone(),
            o2.target_id.clone(),
        ));
    }
    if !(o1.l > 0.0 && o2.l > 0.0) {
        return Err(EstimateError::NonPositiveShadow { l1: o1.l, l2: o2.l });
    }
    let (r1, r2) = (o1.apex_range(), o2.apex_range());
    let d = shadow_denominator(r1, o1.l, r2, o2.l);
    if !(d.abs() > epsilon) {
        return Err(EstimateError::DegenerateGeometry { denominator: d });
    }
    if pair.delta_h == 0.0 {
        return Err(EstimateError::ZeroAltitudeChange);
    }
    let h = pair.delta_h * (o1.l * o2.l) / d;
    if !(h > 0.0) {
        return Err(EstimateError::InconsistentPair { height_m: h });
    }
    let altitude = h * (r1 + o1.l) / o1.l;
    let ground = o1
        .bin_size_m
        .and_then(|bin| slant_to_ground(r1 * bin, altitude - h).ok());
    Ok(HeightEstimate {
        target_id: o1.target_id.clone(),
        height_m: h,
        denominator: d,
        aux_altitude_m: Some(altitude),
        aux_ground_range_m: ground,
        pair: pair.clone(),
    })
}

/// Result of matching observations across the two frames of a pair.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Matching {
    pub pairs: Vec<ObservationPair>,
    pub unmatched_first: Vec<ShadowObservation>,
    pub unmatched_second: Vec<ShadowObservation>,
}

/// Greedy nearest-bearing matching under the bearing and range-shift gates.
/// The second observation of each pair takes the first one's target id.
pub fn match_observations(
    first: &[ShadowObservation],
    second: &[ShadowObservation],
    delta_h: f64,
    cfg: &EstimateConfig,
) -> Matching {
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, a) in first.iter().enumerate() {
        for (j, b) in second.iter().enumerate() {
            let gap = (a.bearing - b.bearing).abs();
            if gap <= cfg.max_beam_gap && (b.r - a.r).abs() <= cfg.max_shift_bins {
                candidates.push((gap, i, j));
            }
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used1 = vec![false; first.len()];
    let mut used2 = vec![false; second.len()];
    let mut pairs = Vec::new();
    for (_, i, j) in candidates {
        if used1[i] || used2[j] {
            continue;
        }
        used1[i] = true;
        used2[j] = true;
        let mut b = second[j].clone();
        b.target_id = first[i].target_id.clone();
        pairs.push(ObservationPair::new(first[i].clone(), b, delta_h));
    }
    pairs.sort_by(|a, b| a.obs1.bearing.total_cmp(&b.obs1.bearing));
    Matching {
        pairs,
        unmatched_first: pick_unused(first, &used1),
        unmatched_second: pick_unused(second, &used2),
    }
}

fn pick_unused(obs: &[ShadowObservation], used: &[bool]) -> Vec<ShadowObservation> {
    obs.iter()
        .zip(used)
        .filter(|(_, &u)| !u)
        .map(|(o, _)| o.clone())
        .collect()
}

/// Shadow observations extracted from one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameObservations {
    pub regions: RegionSet,
    pub observations: Vec<ShadowObservation>,
    /// Highlights that paired with a shadow but could not be measured.
    pub rejected: Vec<(usize, SegmentError)>,
}

/// Segments a frame, pairs regions, and measures each paired target.
/// Observations are sorted by bearing and labelled `T1`, `T2`, … in that order.
pub fn observe_frame(
    frame: &SonarFrame,
    params: &SegmentParams,
    th: &PairThresholds,
    origin: RangeOrigin,
) -> FrameObservations {
    let regions = segment_with(frame, params);
    let pairs = pair_regions(&regions, th);

    // One shadow per highlight: the one sharing the most columns.
    let mut best: Vec<Option<(usize, usize)>> = vec![None; regions.highlights.len()];
    for p in &pairs {
        let t = &regions.highlights[p.highlight];
        let shared = t
            .column_set()
            .intersection(&regions.shadows[p.shadow].column_set())
            .count();
        let slot = &mut best[p.highlight];
        if slot.is_none_or(|(_, n)| shared > n) {
            *slot = Some((p.shadow, shared));
        }
    }

    let mut observations = Vec::new();
    let mut rejected = Vec::new();
    for (ti, choice) in best.iter().enumerate() {
        let Some((si, _)) = *choice else { continue };
        let (t, s) = (&regions.highlights[ti], &regions.shadows[si]);
        match fit_critical_line(t, s) {
            Ok(line) => {
                let mut obs = measure(t, s, &line, &frame.frame_id);
                obs.baseline_offset = match origin {
                    RangeOrigin::Apex => frame.fov.baseline_offset_bins(),
                    RangeOrigin::Raster => 0.0,
                };
                obs.bin_size_m = Some(frame.fov.bin_size());
                observations.push(obs);
            }
            Err(e) => rejected.push((ti, e)),
        }
    }
    observations.sort_by(|a, b| a.bearing.total_cmp(&b.bearing));
    for (i, o) in observations.iter_mut().enumerate() {
        o.target_id = format!("T{}", i + 1);
    }
    FrameObservations {
        regions,
        observations,
        rejected,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetFailure {
    pub target_id: String,
    pub error: EstimateError,
}

/// Outcome of the full two-frame pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchEstimate {
    pub estimates: Vec<HeightEstimate>,
    pub failures: Vec<TargetFailure>,
    pub first: FrameObservations,
    pub second: FrameObservations,
}

/// Runs segmentation, pairing and measurement on both frames, matches the
/// observations, and solves each matched target. Per-target failures are
/// collected without aborting the batch.
pub fn estimate_all(
    frames: (&SonarFrame, &SonarFrame),
    th: &PairThresholds,
    delta_h: f64,
    params: &SegmentParams,
    cfg: &EstimateConfig,
) -> Result<BatchEstimate, EstimateError> {
    let (f1, f2) = frames;
    if f1.fov != f2.fov {
        return Err(EstimateError::FovMismatch);
    }
    let (first, second) = rayon::join(
        || observe_frame(f1, params, th, cfg.range_origin),
        || observe_frame(f2, params, th, cfg.range_origin),
    );
    let matching = match_observations(&first.observations, &second.observations, delta_h, cfg);

    let solved: Vec<Result<HeightEstimate, TargetFailure>> = matching
        .pairs
        .par_iter()
        .map(|p| {
            solve_height_with(p, cfg.epsilon).map_err(|error| TargetFailure {
                target_id: p.obs1.target_id.clone(),
                error,
            })
        })
        .collect();

    let mut estimates = Vec::new();
    let mut failures = Vec::new();
    for r in solved {
        match r {
            Ok(e) => estimates.push(e),
            Err(f) => failures.push(f),
        }
    }
    for o in &matching.unmatched_first {
        failures.push(TargetFailure {
            target_id: o.target_id.clone(),
            error: EstimateError::Unmatched {
                frame: f2.frame_id.clone(),
            },
        });
    }
    Ok(BatchEstimate {
        estimates,
        failures,
        first,
        second,
    })
}
