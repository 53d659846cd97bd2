//! Segments one simulated frame, scores it against the renderer's labels and
//! writes the overlay (highlight red, shadow blue, critical line yellow).
//!
//! cargo run --release --example segment_frame -- [SPECKLE_SIGMA] [OUT_DIR]

use std::path::PathBuf;

use shadowheight::frame::PixelClass;
use shadowheight::geometry::{FovSpec, SonarPose, WorldPoint};
use shadowheight::overlay::segmentation_overlay;
use shadowheight::segmentation::{fit_critical_line, pair_regions, segment, PairThresholds};
use shadowheight::simulator::{render_frame, NoiseSpec, Scene};

fn iou(a: impl Iterator<Item = (bool, bool)>) -> f64 {
    let (mut inter, mut union) = (0usize, 0usize);
    for (x, y) in a {
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    inter as f64 / union.max(1) as f64
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let sigma: f64 = args.next().map_or(Ok(0.05), |s| s.parse())?;
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("target/example-out/segment_frame"));

    let pose = SonarPose::new(WorldPoint::new(0.0, 0.0, 0.35), 0.0, 17f64.to_radians());
    let r = render_frame(
        &Scene::five_targets(),
        &pose,
        &FovSpec::default(),
        &NoiseSpec::speckle(sigma, 3),
    )?;
    let regions = segment(&r.frame);
    println!(
        "{} highlights, {} shadows (thresholds {:.2} / {:.2} of the floor level)",
        regions.highlights.len(),
        regions.shadows.len(),
        regions.thresholds.shadow,
        regions.thresholds.highlight
    );

    let (hl, sh) = (regions.highlight_mask(), regions.shadow_mask());
    let is = |c: PixelClass| r.labels.mapv(|v| v == c as u8);
    let (lh, ls) = (is(PixelClass::Highlight), is(PixelClass::Shadow));
    println!(
        "highlight IoU {:.4}",
        iou(hl.iter().zip(lh.iter()).map(|(a, b)| (*a, *b)))
    );
    println!(
        "shadow IoU    {:.4}",
        iou(sh.iter().zip(ls.iter()).map(|(a, b)| (*a, *b)))
    );

    let mut support = Vec::new();
    for p in pair_regions(&regions, &PairThresholds::default()) {
        let line = fit_critical_line(&regions.highlights[p.highlight], &regions.shadows[p.shadow])?;
        println!(
            "pair ratio {:.2}: critical line at bin {:.1}",
            p.ratio, line.r
        );
        support.extend(line.support);
    }
    std::fs::create_dir_all(&out)?;
    segmentation_overlay(&r.frame, &regions, &support, 4).save(out.join("overlay.png"))?;
    println!("wrote {}", out.join("overlay.png").display());
    Ok(())
}
