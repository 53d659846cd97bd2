//! Highlight / cast-shadow extraction and the per-target shadow measurements.
//!
//! Segmentation works in the polar raster. Each range row is first divided by
//! a smoothed background profile (the seafloor return falls off with range),
//! then two Otsu passes split the normalized values into dark / mid / bright.
//! Bright components are target highlights. Dark components count as cast
//! shadows only inside the ensonified band and behind a highlight in the same
//! beam column.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::SonarFrame;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SegmentError {
    #[error("insufficient support: regions share {shared} azimuth columns, need at least 3")]
    InsufficientSupport { shared: usize },
    #[error("invalid pairing thresholds: need 0 ≤ m ≤ n ≤ 1, got m = {m}, n = {n}")]
    InvalidThresholds { m: f64, n: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SegmentParams {
    /// Components smaller than this many pixels are dropped.
    pub min_area: usize,
    /// Lowest normalized level accepted as highlight.
    pub highlight_contrast: f64,
    /// Highest normalized level accepted as shadow.
    pub shadow_contrast: f64,
    /// Fixed normalized highlight threshold, bypassing Otsu.
    pub highlight_threshold: Option<f64>,
    /// Fixed normalized shadow threshold (τ_s), bypassing Otsu.
    pub shadow_threshold: Option<f64>,
}

impl Default for SegmentParams {
    fn default() -> Self {
        Self {
            min_area: 12,
            highlight_contrast: 1.5,
            shadow_contrast: 0.5,
            highlight_threshold: None,
            shadow_threshold: None,
        }
    }
}

/// Thresholds actually used on one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameThresholds {
    /// Raw level below which a pixel carries no return at all.
    pub dark_floor: f64,
    /// Normalized shadow threshold.
    pub shadow: f64,
    /// Normalized highlight threshold.
    pub highlight: f64,
}

/// Connected set of raster pixels `(range_bin, beam)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelRegion {
    pixels: Vec<(usize, usize)>,
    pub range_span: (usize, usize),
    pub azimuth_span: (usize, usize),
}

impl PixelRegion {
    /// Returns `None` for an empty pixel set.
    pub fn new(mut pixels: Vec<(usize, usize)>) -> Option<Self> {
        if pixels.is_empty() {
            return None;
        }
        pixels.sort_unstable();
        pixels.dedup();
        let range_span = (pixels[0].0, pixels[pixels.len() - 1].0);
        let (lo, hi) = pixels
            .iter()
            .fold((usize::MAX, 0), |(lo, hi), &(_, c)| (lo.min(c), hi.max(c)));
        Some(Self {
            pixels,
            range_span,
            azimuth_span: (lo, hi),
        })
    }

    pub fn pixels(&self) -> &[(usize, usize)] {
        &self.pixels
    }

    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    /// Sorted range bins of the region in each beam column it occupies.
    pub fn columns(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(r, c) in &self.pixels {
            out.entry(c).or_default().push(r);
        }
        out
    }

    pub fn column_set(&self) -> BTreeSet<usize> {
        self.pixels.iter().map(|&(_, c)| c).collect()
    }

    pub fn touches_border(&self, n_rows: usize, n_cols: usize) -> bool {
        self.range_span.0 == 0
            || self.range_span.1 + 1 >= n_rows
            || self.azimuth_span.0 == 0
            || self.azimuth_span.1 + 1 >= n_cols
    }

    pub fn mean_column(&self) -> f64 {
        self.pixels.iter().map(|&(_, c)| c as f64).sum::<f64>() / self.pixels.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionSet {
    pub highlights: Vec<PixelRegion>,
    pub shadows: Vec<PixelRegion>,
    pub frame_id: String,
    /// Raster shape `(n_range_bins, n_beams)`.
    pub shape: (usize, usize),
    pub thresholds: FrameThresholds,
}

impl RegionSet {
    pub fn highlight_mask(&self) -> Array2<bool> {
        mask_of(&self.highlights, self.shape)
    }

    pub fn shadow_mask(&self) -> Array2<bool> {
        mask_of(&self.shadows, self.shape)
    }
}

fn mask_of(regions: &[PixelRegion], shape: (usize, usize)) -> Array2<bool> {
    let mut m = Array2::from_elem(shape, false);
    for reg in regions {
        for &p in reg.pixels() {
            m[p] = true;
        }
    }
    m
}

/// Median of a slice (mean of the two middle values for even lengths).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Otsu threshold over a 256-bin histogram. Returns the middle of the widest
/// run of bins maximizing the between-class variance, or `None` when the
/// values do not split into two classes.
pub fn otsu_threshold(values: &[f64]) -> Option<f64> {
    const BINS: usize = 256;
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if values.len() < 2 || !(hi > lo) {
        return None;
    }
    let width = (hi - lo) / BINS as f64;
    let mut hist = [0usize; BINS];
    for &v in values {
        let b = (((v - lo) / width) as usize).min(BINS - 1);
        hist[b] += 1;
    }
    let total = values.len() as f64;
    let sum_all: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * c as f64)
        .sum();
    let (mut w0, mut sum0) = (0.0, 0.0);
    let mut scores = [f64::NEG_INFINITY; BINS];
    for t in 0..BINS - 1 {
        w0 += hist[t] as f64;
        sum0 += t as f64 * hist[t] as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let m0 = sum0 / w0;
        let m1 = (sum_all - sum0) / w1;
        scores[t] = w0 * w1 * (m0 - m1) * (m0 - m1);
    }
    let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !best.is_finite() || best <= 0.0 {
        return None;
    }
    let tol = best * 1e-9;
    let first = scores.iter().position(|&s| s >= best - tol)?;
    let mut last = first;
    while last + 1 < BINS && scores[last + 1] >= best - tol {
        last += 1;
    }
    // Threshold after bin `t` sits at the bin's upper edge.
    Some(lo + width * (0.5 * (first + last) as f64 + 1.0))
}

/// 8-connected components of a boolean mask, each sorted by `(row, col)`.
pub fn connected_components(mask: &Array2<bool>) -> Vec<Vec<(usize, usize)>> {
    let (rows, cols) = mask.dim();
    let mut seen = Array2::from_elem((rows, cols), false);
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for r in 0..rows {
        for c in 0..cols {
            if !mask[[r, c]] || seen[[r, c]] {
                continue;
            }
            let mut comp = Vec::new();
            seen[[r, c]] = true;
            queue.push_back((r, c));
            while let Some((y, x)) = queue.pop_front() {
                comp.push((y, x));
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let (ny, nx) = (y as i64 + dy, x as i64 + dx);
                        if ny < 0 || nx < 0 || ny >= rows as i64 || nx >= cols as i64 {
                            continue;
                        }
                        let p = (ny as usize, nx as usize);
                        if mask[p] && !seen[p] {
                            seen[p] = true;
                            queue.push_back(p);
                        }
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
    }
    out
}

pub fn segment(frame: &SonarFrame) -> RegionSet {
    segment_with(frame, &SegmentParams::default())
}

pub fn segment_with(frame: &SonarFrame, params: &SegmentParams) -> RegionSet {
    segment_raster(&frame.intensities, params, &frame.frame_id)
}

/// Segments a polar intensity raster `[range_bin, beam]`.
pub fn segment_raster(raster: &Array2<f64>, params: &SegmentParams, frame_id: &str) -> RegionSet {
    let (rows, cols) = raster.dim();
    let positive: Vec<f64> = raster.iter().copied().filter(|&v| v > 0.0).collect();
    let dark_floor = 0.25 * median(&positive).unwrap_or(0.0);
    let fallback = FrameThresholds {
        dark_floor,
        shadow: params.shadow_threshold.unwrap_or(params.shadow_contrast),
        highlight: params
            .highlight_threshold
            .unwrap_or(params.highlight_contrast),
    };
    let empty = |thresholds| RegionSet {
        highlights: Vec::new(),
        shadows: Vec::new(),
        frame_id: frame_id.to_string(),
        shape: (rows, cols),
        thresholds,
    };
    if positive.is_empty() {
        return empty(fallback);
    }

    // Ensonified band of each column: first to last pixel with a return.
    let bands: Vec<Option<(usize, usize)>> = (0..cols)
        .map(|c| {
            let col = raster.column(c);
            let first = col.iter().position(|&v| v > dark_floor)?;
            let last = col.iter().rposition(|&v| v > dark_floor)?;
            Some((first, last))
        })
        .collect();

    let Some(profile) = background_profile(raster, dark_floor) else {
        return empty(fallback);
    };
    let normalized = Array2::from_shape_fn((rows, cols), |(r, c)| raster[[r, c]] / profile[r]);

    let in_band: Vec<f64> = (0..cols)
        .filter_map(|c| bands[c].map(|b| (c, b)))
        .flat_map(|(c, (a, b))| (a..=b).map(move |r| (r, c)))
        .map(|p| normalized[p])
        .collect();
    let (shadow_t, highlight_t) = tri_level(&in_band);
    let thresholds = FrameThresholds {
        dark_floor,
        shadow: params.shadow_threshold.unwrap_or_else(|| {
            shadow_t.map_or(params.shadow_contrast, |t| t.min(params.shadow_contrast))
        }),
        highlight: params.highlight_threshold.unwrap_or_else(|| {
            highlight_t.map_or(params.highlight_contrast, |t| {
                t.max(params.highlight_contrast)
            })
        }),
    };

    let bright = normalized.mapv(|v| v >= thresholds.highlight);
    let highlights: Vec<PixelRegion> = connected_components(&bright)
        .into_iter()
        .filter(|c| c.len() >= params.min_area)
        .filter_map(PixelRegion::new)
        .collect();

    // The range gate uses every bright pixel, so a column clipped by a
    // target corner still opens for the shadow behind it.
    let mut first_highlight = vec![usize::MAX; cols];
    for ((r, c), &b) in bright.indexed_iter() {
        if b {
            first_highlight[c] = first_highlight[c].min(r);
        }
    }
    let dark = Array2::from_shape_fn((rows, cols), |(r, c)| {
        let Some((a, b)) = bands[c] else { return false };
        r >= a && r <= b && r > first_highlight[c] && normalized[[r, c]] <= thresholds.shadow
    });
    let shadows = connected_components(&dark)
        .into_iter()
        .filter(|c| c.len() >= params.min_area)
        .filter_map(PixelRegion::new)
        .collect();

    RegionSet {
        highlights,
        shadows,
        frame_id: frame_id.to_string(),
        shape: (rows, cols),
        thresholds,
    }
}

/// Seafloor return level per range row: the row median of lit pixels,
/// smoothed by a running median and filled across rows without returns.
fn background_profile(raster: &Array2<f64>, dark_floor: f64) -> Option<Vec<f64>> {
    let rows = raster.nrows();
    let row_level: Vec<Option<f64>> = (0..rows)
        .map(|r| {
            let lit: Vec<f64> = raster
                .row(r)
                .iter()
                .copied()
                .filter(|&v| v > dark_floor)
                .collect();
            median(&lit)
        })
        .collect();
    let defined: Vec<usize> = (0..rows).filter(|&r| row_level[r].is_some()).collect();
    if defined.is_empty() {
        return None;
    }
    let half = (rows / 16).max(3);
    let mut profile = vec![0.0; rows];
    for (r, slot) in profile.iter_mut().enumerate() {
        let lo = r.saturating_sub(half);
        let hi = (r + half).min(rows - 1);
        let window: Vec<f64> = (lo..=hi).filter_map(|i| row_level[i]).collect();
        *slot = match median(&window) {
            Some(v) => v,
            None => {
                let nearest = defined
                    .iter()
                    .min_by_key(|&&d| d.abs_diff(r))
                    .copied()
                    .unwrap_or(r);
                row_level[nearest].unwrap_or(1.0)
            }
        };
    }
    Some(profile)
}

/// Dark and bright thresholds from two Otsu passes on normalized values
/// (background sits near 1).
fn tri_level(values: &[f64]) -> (Option<f64>, Option<f64>) {
    let Some(first) = otsu_threshold(values) else {
        return (None, None);
    };
    if first > 1.0 {
        let below: Vec<f64> = values.iter().copied().filter(|&v| v < first).collect();
        (otsu_threshold(&below), Some(first))
    } else {
        let above: Vec<f64> = values.iter().copied().filter(|&v| v > first).collect();
        (Some(first), otsu_threshold(&above))
    }
}

/// Ratio bounds `[m, n]` for pairing a highlight with a shadow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairThresholds {
    pub m: f64,
    pub n: f64,
}

impl Default for PairThresholds {
    fn default() -> Self {
        Self { m: 0.5, n: 1.0 }
    }
}

impl PairThresholds {
    pub fn new(m: f64, n: f64) -> Result<Self, SegmentError> {
        if !(0.0 <= m && m <= n && n <= 1.0) {
            return Err(SegmentError::InvalidThresholds { m, n });
        }
        Ok(Self { m, n })
    }
}

/// A highlight paired with the shadow it casts (indices into a [`RegionSet`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPair {
    pub highlight: usize,
    pub shadow: usize,
    /// `|cols(T) ∩ cols(S)| / |cols(T)|`.
    pub ratio: f64,
}

/// Fraction of the highlight's beam columns also occupied by the shadow.
pub fn column_overlap_ratio(t: &PixelRegion, s: &PixelRegion) -> f64 {
    let tc = t.column_set();
    let shared = tc.intersection(&s.column_set()).count();
    shared as f64 / tc.len() as f64
}

/// Pairs shadows with the highlights casting them.
///
/// A shadow qualifies for a highlight when it starts at greater range and the
/// column-overlap ratio lies in `[m, n]`. Regions touching the raster border
/// are truncated by the field of view and never pair. Each shadow goes to the
/// qualifying highlight with the largest ratio, the nearest one in range on
/// ties.
pub fn pair_regions(regions: &RegionSet, th: &PairThresholds) -> Vec<RegionPair> {
    let (rows, cols) = regions.shape;
    let mut pairs = Vec::new();
    for (si, s) in regions.shadows.iter().enumerate() {
        if s.touches_border(rows, cols) {
            continue;
        }
        let best = regions
            .highlights
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.touches_border(rows, cols))
            .filter(|(_, t)| s.range_span.0 > t.range_span.0)
            .map(|(ti, t)| {
                (
                    ti,
                    column_overlap_ratio(t, s),
                    s.range_span.0 - t.range_span.1.min(s.range_span.0),
                )
            })
            .filter(|&(_, ratio, _)| th.m <= ratio && ratio <= th.n)
            .min_by(|a, b| b.1.total_cmp(&a.1).then(a.2.cmp(&b.2)));
        if let Some((ti, ratio, _)) = best {
            pairs.push(RegionPair {
                highlight: ti,
                shadow: si,
                ratio,
            });
        }
    }
    pairs
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalLine {
    /// Fractional range bin of the highlight/shadow boundary.
    pub r: f64,
    /// `(beam, boundary bin)` for every shared column.
    pub support: Vec<(usize, f64)>,
}

/// Median of per-column boundaries between the last highlight bin and the
/// first shadow bin.
pub fn critical_line_from_boundaries(
    support: Vec<(usize, f64)>,
) -> Result<CriticalLine, SegmentError> {
    if support.len() < 3 {
        return Err(SegmentError::InsufficientSupport {
            shared: support.len(),
        });
    }
    let bins: Vec<f64> = support.iter().map(|&(_, b)| b).collect();
    let r = median(&bins).expect("non-empty support");
    Ok(CriticalLine { r, support })
}

pub fn fit_critical_line(t: &PixelRegion, s: &PixelRegion) -> Result<CriticalLine, SegmentError> {
    let tcols = t.columns();
    let scols = s.columns();
    let mut support = Vec::new();
    for (c, srows) in &scols {
        let Some(trows) = tcols.get(c) else { continue };
        let first_s = srows[0];
        let last_h = trows
            .iter()
            .copied()
            .filter(|&r| r < first_s)
            .max()
            .unwrap_or(trows[trows.len() - 1]);
        support.push((*c, 0.5 * (last_h as f64 + first_s as f64)));
    }
    critical_line_from_boundaries(support)
}

/// Range measures of one target in one frame, in range-bin units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowObservation {
    pub target_id: String,
    /// Critical-line range bin `R`, counted from raster row 0.
    pub r: f64,
    /// Shadow range extent `L` in bins.
    pub l: f64,
    /// Mean beam index of the highlight.
    pub bearing: f64,
    pub frame_id: String,
    /// Bins between the zero-range apex and raster row 0 (0 when ranges are
    /// read straight off the raster, as in a fan image without correction).
    #[serde(default)]
    pub baseline_offset: f64,
    /// Slant size of one range bin, meters, when known.
    #[serde(default)]
    pub bin_size_m: Option<f64>,
    /// Median first highlight bin over the shared columns.
    #[serde(default)]
    pub near_bin: Option<f64>,
}

impl ShadowObservation {
    /// Bare measurement pair with no frame metadata.
    pub fn from_measurement(target_id: impl Into<String>, r: f64, l: f64) -> Self {
        Self {
            target_id: target_id.into(),
            r,
            l,
            bearing: 0.0,
            frame_id: String::new(),
            baseline_offset: 0.0,
            bin_size_m: None,
            near_bin: None,
        }
    }

    /// Critical-line range measured from the zero-range apex, in bins.
    pub fn apex_range(&self) -> f64 {
        self.r + self.baseline_offset
    }
}

/// Median of per-column shadow run lengths.
pub fn shadow_run_length(runs: &[f64]) -> Option<f64> {
    median(runs)
}

/// Builds the observation of a paired highlight/shadow given its critical line.
pub fn measure(
    t: &PixelRegion,
    s: &PixelRegion,
    line: &CriticalLine,
    frame_id: &str,
) -> ShadowObservation {
    let tcols = t.columns();
    let scols = s.columns();
    let mut runs = Vec::new();
    let mut nears = Vec::new();
    for (c, _) in &line.support {
        // Span of the region along range in this column; interior speckle
        // holes do not cut the run short.
        let srows = &scols[c];
        runs.push((srows[srows.len() - 1] - srows[0] + 1) as f64);
        if let Some(trows) = tcols.get(c) {
            nears.push(trows[0] as f64);
        }
    }
    ShadowObservation {
        target_id: String::new(),
        r: line.r,
        l: shadow_run_length(&runs).unwrap_or(0.0),
        bearing: t.mean_column(),
        frame_id: frame_id.to_string(),
        baseline_offset: 0.0,
        bin_size_m: None,
        near_bin: median(&nears),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(
        rows: std::ops::RangeInclusive<usize>,
        cols: std::ops::RangeInclusive<usize>,
    ) -> PixelRegion {
        let px = rows
            .flat_map(|r| cols.clone().map(move |c| (r, c)))
            .collect();
        PixelRegion::new(px).unwrap()
    }

    fn regions(h: Vec<PixelRegion>, s: Vec<PixelRegion>) -> RegionSet {
        RegionSet {
            highlights: h,
            shadows: s,
            frame_id: "f".into(),
            shape: (100, 64),
            thresholds: FrameThresholds {
                dark_floor: 0.0,
                shadow: 0.5,
                highlight: 1.5,
            },
        }
    }

    /// Reference labelling: repeated min-label propagation until stable.
    fn oracle_components(mask: &Array2<bool>) -> Vec<usize> {
        let (rows, cols) = mask.dim();
        let mut label = Array2::from_shape_fn((rows, cols), |(r, c)| {
            if mask[[r, c]] {
                r * cols + c + 1
            } else {
                0
            }
        });
        loop {
            let mut changed = false;
            for r in 0..rows {
                for c in 0..cols {
                    if label[[r, c]] == 0 {
                        continue;
                    }
                    for dr in -1i64..=1 {
                        for dc in -1i64..=1 {
                            let (y, x) = (r as i64 + dr, c as i64 + dc);
                            if y < 0 || x < 0 || y >= rows as i64 || x >= cols as i64 {
                                continue;
                            }
                            let l = label[[y as usize, x as usize]];
                            if l != 0 && l < label[[r, c]] {
                                label[[r, c]] = l;
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
        for &l in label.iter().filter(|&&l| l != 0) {
            *sizes.entry(l).or_default() += 1;
        }
        let mut v: Vec<usize> = sizes.into_values().collect();
        v.sort_unstable();
        v
    }

    fn hand_raster() -> Array2<f64> {
        Array2::from_shape_fn((8, 8), |(r, c)| match (r, c) {
            (2..=3, 2..=5) => 0.9,
            (4..=6, 2..=5) => 0.05,
            _ => 0.5,
        })
    }

    #[test]
    fn hand_raster_regions_match_oracle() {
        let raster = hand_raster();
        let bright = raster.mapv(|v| v > 0.7);
        let dark = raster.mapv(|v| v < 0.2);
        assert_eq!(oracle_components(&bright), vec![8]);
        assert_eq!(oracle_components(&dark), vec![12]);

        let params = SegmentParams {
            min_area: 1,
            ..SegmentParams::default()
        };
        let set = segment_raster(&raster, &params, "hand");
        assert_eq!(set.highlights.len(), 1);
        assert_eq!(set.shadows.len(), 1);
        assert_eq!(set.highlights[0].area(), 8);
        assert_eq!(set.shadows[0].area(), 12);
        assert_eq!(set.shadows[0].range_span, (4, 6));
    }

    #[test]
    fn components_agree_with_oracle_on_pattern() {
        let mask = Array2::from_shape_fn((17, 23), |(r, c)| {
            (r * 7 + c * 3) % 5 < 2 || (r + c) % 11 == 0
        });
        let mut ours: Vec<usize> = connected_components(&mask).iter().map(Vec::len).collect();
        ours.sort_unstable();
        assert_eq!(ours, oracle_components(&mask));
    }

    #[test]
    fn uniform_frame_has_no_regions() {
        let raster = Array2::from_elem((32, 16), 0.4);
        let set = segment_raster(&raster, &SegmentParams::default(), "flat");
        assert!(set.highlights.is_empty() && set.shadows.is_empty());
        let zeros = Array2::zeros((32, 16));
        let set = segment_raster(&zeros, &SegmentParams::default(), "dark");
        assert!(set.highlights.is_empty() && set.shadows.is_empty());
    }

    #[test]
    fn otsu_splits_two_levels() {
        let mut v = vec![0.2; 100];
        v.extend(vec![0.8; 30]);
        let t = otsu_threshold(&v).unwrap();
        assert!(t > 0.2 && t < 0.8);
        assert!((t - 0.5).abs() < 0.01, "plateau midpoint, got {t}");
        assert_eq!(otsu_threshold(&[0.3; 10]), None);
    }

    #[test]
    fn median_examples() {
        assert_eq!(median(&[100.0, 100.0, 100.0, 100.0]), Some(100.0));
        assert_eq!(median(&[99.0, 100.0, 100.0, 101.0, 140.0]), Some(100.0));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn pairing_full_overlap() {
        let set = regions(
            vec![region(10..=20, 10..=20)],
            vec![region(22..=40, 10..=20)],
        );
        let pairs = pair_regions(&set, &PairThresholds::new(0.0, 1.0).unwrap());
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].ratio, 1.0);
        let pairs = pair_regions(&set, &PairThresholds::new(1.0, 1.0).unwrap());
        assert_eq!(pairs.len(), 1);
    }

    #[test]
    fn pairing_partial_overlap() {
        let set = regions(
            vec![region(10..=20, 10..=20)],
            vec![region(22..=40, 16..=30)],
        );
        let ratio = column_overlap_ratio(&set.highlights[0], &set.shadows[0]);
        assert!((ratio - 5.0 / 11.0).abs() < 1e-15);
        assert_eq!(
            pair_regions(&set, &PairThresholds::new(0.45, 1.0).unwrap()).len(),
            1
        );
        assert_eq!(
            pair_regions(&set, &PairThresholds::new(0.46, 1.0).unwrap()).len(),
            0
        );
    }

    #[test]
    fn pairing_rejects_truncated_shadow() {
        let set = regions(
            vec![region(10..=20, 10..=20)],
            vec![region(22..=99, 10..=20)],
        );
        assert!(pair_regions(&set, &PairThresholds::default()).is_empty());
        let set = regions(vec![region(10..=20, 0..=20)], vec![region(22..=40, 1..=20)]);
        assert!(pair_regions(&set, &PairThresholds::default()).is_empty());
    }

    #[test]
    fn pairing_prefers_nearest_on_ties() {
        let set = regions(
            vec![region(10..=12, 10..=20), region(30..=32, 10..=20)],
            vec![region(40..=60, 10..=20)],
        );
        let pairs = pair_regions(&set, &PairThresholds::default());
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].highlight, 1);
    }

    #[test]
    fn invalid_pair_thresholds() {
        assert!(PairThresholds::new(1.2, 1.0).is_err());
        assert!(PairThresholds::new(0.7, 0.5).is_err());
        assert!(PairThresholds::new(-0.1, 0.5).is_err());
    }

    #[test]
    fn critical_line_examples() {
        let line =
            critical_line_from_boundaries(vec![(0, 100.0), (1, 100.0), (2, 100.0), (3, 100.0)])
                .unwrap();
        assert_eq!(line.r, 100.0);
        let line = critical_line_from_boundaries(vec![
            (0, 99.0),
            (1, 100.0),
            (2, 100.0),
            (3, 101.0),
            (4, 140.0),
        ])
        .unwrap();
        assert_eq!(line.r, 100.0);
        let t = region(10..=20, 0..=4);
        let s = region(22..=40, 10..=20);
        assert_eq!(
            fit_critical_line(&t, &s),
            Err(SegmentError::InsufficientSupport { shared: 0 })
        );
        let line = fit_critical_line(&region(10..=20, 10..=20), &region(21..=40, 10..=20)).unwrap();
        assert_eq!(line.r, 20.5);
        assert_eq!(line.support.len(), 11);
    }

    fn staircase_shadow(runs: &[usize]) -> (PixelRegion, PixelRegion) {
        let cols = runs.len();
        let t = region(10..=20, 10..=10 + cols - 1);
        let px = runs
            .iter()
            .enumerate()
            .flat_map(|(i, &run)| (21..21 + run).map(move |r| (r, 10 + i)))
            .collect();
        (t, PixelRegion::new(px).unwrap())
    }

    #[test]
    fn measure_uses_median_run() {
        for (runs, want) in [
            (vec![56, 56, 55, 57], 56.0),
            (vec![43, 43, 43], 43.0),
            (vec![20, 28, 28, 28, 29], 28.0),
        ] {
            let (t, s) = staircase_shadow(&runs);
            let line = fit_critical_line(&t, &s).unwrap();
            let obs = measure(&t, &s, &line, "f");
            assert_eq!(obs.l, want);
            assert_eq!(obs.r, 20.5);
            assert_eq!(obs.near_bin, Some(10.0));
            assert!((obs.bearing - (10.0 + (runs.len() - 1) as f64 / 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn apex_range_adds_offset() {
        let mut o = ShadowObservation::from_measurement("x", 580.0, 56.0);
        assert_eq!(o.apex_range(), 580.0);
        o.baseline_offset = 20.0;
        assert_eq!(o.apex_range(), 600.0);
    }
}
