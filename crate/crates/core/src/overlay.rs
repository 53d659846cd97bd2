//! Raster renderings for inspection: fan-shaped scan conversion, segmentation
//! overlays, and height-annotated mosaics.

use image::{GrayImage, Luma, Rgb, RgbImage};
use ndarray::Array2;

use crate::frame::SonarFrame;
use crate::geometry::{FanGeometry, GeometryError};
use crate::mosaic::AnnotatedMosaic;
use crate::segmentation::RegionSet;

const HIGHLIGHT: Rgb<u8> = Rgb([230, 40, 40]);
const SHADOW: Rgb<u8> = Rgb([40, 90, 235]);
const CRITICAL: Rgb<u8> = Rgb([250, 220, 30]);
const MARKER: Rgb<u8> = Rgb([255, 60, 60]);

/// Display gain: maps the 99th percentile of nonzero samples to white.
fn gain(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.filter(|&x| x > 0.0).collect();
    if v.is_empty() {
        return 1.0;
    }
    v.sort_by(f64::total_cmp);
    let p = v[((v.len() - 1) as f64 * 0.99) as usize];
    if p > 0.0 {
        1.0 / p
    } else {
        1.0
    }
}

fn to_u8(v: f64, g: f64) -> u8 {
    ((v * g).clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Bilinear sample of the polar raster at fractional `(bin, beam)`.
fn sample(raster: &Array2<f64>, bin: f64, beam: f64) -> Option<f64> {
    let (rows, cols) = raster.dim();
    if bin < 0.0 || beam < -0.5 || bin > (rows - 1) as f64 || beam > cols as f64 - 0.5 {
        return None;
    }
    let b = beam.clamp(0.0, (cols - 1) as f64);
    let (r0, c0) = (bin.floor() as usize, b.floor() as usize);
    let (r1, c1) = ((r0 + 1).min(rows - 1), (c0 + 1).min(cols - 1));
    let (fr, fc) = (bin - r0 as f64, b - c0 as f64);
    let top = raster[[r0, c0]] * (1.0 - fc) + raster[[r0, c1]] * fc;
    let bot = raster[[r1, c0]] * (1.0 - fc) + raster[[r1, c1]] * fc;
    Some(top * (1.0 - fr) + bot * fr)
}

/// Scan-converts a polar frame into a fan image `height` pixels tall with the
/// apex below the bottom edge.
pub fn fan_image(
    frame: &SonarFrame,
    height: usize,
) -> Result<(GrayImage, FanGeometry), GeometryError> {
    let fan = FanGeometry::new(frame.fov, height)?;
    let g = gain(frame.intensities.iter().copied());
    let img = GrayImage::from_fn(fan.width as u32, fan.height as u32, |x, y| {
        let (bin, beam) = fan.fan_to_polar(x as f64, y as f64);
        Luma([sample(&frame.intensities, bin, beam).map_or(0, |v| to_u8(v, g))])
    });
    Ok((img, fan))
}

/// Polar raster with highlights red, shadows blue and critical-line support
/// points yellow. Each beam is drawn `beam_px` pixels wide; range runs down.
pub fn segmentation_overlay(
    frame: &SonarFrame,
    regions: &RegionSet,
    critical: &[(usize, f64)],
    beam_px: u32,
) -> RgbImage {
    let (rows, cols) = frame.intensities.dim();
    let g = gain(frame.intensities.iter().copied());
    let hl = regions.highlight_mask();
    let sh = regions.shadow_mask();
    let w = beam_px.max(1);
    let mut img = RgbImage::from_fn(cols as u32 * w, rows as u32, |x, y| {
        let p = [y as usize, (x / w) as usize];
        if hl[p] {
            HIGHLIGHT
        } else if sh[p] {
            SHADOW
        } else {
            let v = to_u8(frame.intensities[p], g);
            Rgb([v, v, v])
        }
    });
    for &(col, r) in critical {
        let y = r.round() as u32;
        if (col as u32) < cols as u32 && y < rows as u32 {
            for dx in 0..w {
                img.put_pixel(col as u32 * w + dx, y, CRITICAL);
            }
        }
    }
    img
}

/// 3×5 glyphs, rows top to bottom, bit 2 = left column.
fn glyph(c: char) -> Option<[u8; 5]> {
    Some(match c {
        '0' => [7, 5, 5, 5, 7],
        '1' => [2, 6, 2, 2, 7],
        '2' => [7, 1, 7, 4, 7],
        '3' => [7, 1, 7, 1, 7],
        '4' => [5, 5, 7, 1, 1],
        '5' => [7, 4, 7, 1, 7],
        '6' => [7, 4, 7, 5, 7],
        '7' => [7, 1, 1, 2, 2],
        '8' => [7, 5, 7, 5, 7],
        '9' => [7, 5, 7, 1, 7],
        '.' => [0, 0, 0, 0, 2],
        '-' => [0, 0, 7, 0, 0],
        ':' => [0, 2, 0, 2, 0],
        'T' => [7, 2, 2, 2, 2],
        'c' => [0, 0, 7, 4, 7],
        'm' => [0, 0, 7, 7, 5],
        ' ' => [0; 5],
        _ => return None,
    })
}

/// Draws `text` with its top-left corner at `(x, y)`; unknown characters are
/// skipped. `scale` enlarges each glyph pixel.
pub fn draw_text(img: &mut RgbImage, x: i64, y: i64, text: &str, scale: u32, color: Rgb<u8>) {
    let s = scale.max(1) as i64;
    let mut cx = x;
    for ch in text.chars() {
        let Some(rows) = glyph(ch) else { continue };
        for (gy, bits) in rows.iter().enumerate() {
            for gx in 0..3 {
                if bits & (4 >> gx) != 0 {
                    for dy in 0..s {
                        for dx in 0..s {
                            put(img, cx + gx * s + dx, y + gy as i64 * s + dy, color);
                        }
                    }
                }
            }
        }
        cx += 4 * s;
    }
}

fn put(img: &mut RgbImage, x: i64, y: i64, c: Rgb<u8>) {
    if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
        img.put_pixel(x as u32, y as u32, c);
    }
}

/// Mosaic rendered north up with a cross and a `T<k> <height>cm` label at
/// every annotation.
pub fn mosaic_overlay(annotated: &AnnotatedMosaic) -> RgbImage {
    let m = &annotated.mosaic;
    let (rows, cols) = m.dim();
    let mean = m.mean();
    let g = gain(mean.iter().flatten().copied());
    let mut img = RgbImage::from_fn(cols as u32, rows as u32, |x, y| {
        let v = mean[[rows - 1 - y as usize, x as usize]].map_or(0, |v| to_u8(v, g));
        Rgb([v, v, v])
    });
    let scale = ((rows.max(cols) / 300) as u32).max(1);
    for a in &annotated.annotations {
        let (i, j) = m.cell_of(a.world_xy);
        let x = i - m.i0;
        let y = rows as i64 - 1 - (j - m.j0);
        let arm = 4 * scale as i64;
        for d in -arm..=arm {
            put(&mut img, x + d, y, MARKER);
            put(&mut img, x, y + d, MARKER);
        }
        let label = format!("{} {:.2}cm", a.target_id, a.height_cm);
        draw_text(
            &mut img,
            x + arm + 2,
            y - 2 * scale as i64,
            &label,
            scale,
            CRITICAL,
        );
    }
    img
}
