//! Three lateral passes, each flown at two altitudes, merged into a 5 mm
//! mosaic with one height marker per target.
//!
//! cargo run --release --example survey_mosaic -- [OUT_DIR]

use std::path::PathBuf;

use shadowheight::estimation::{estimate_all, EstimateConfig};
use shadowheight::geometry::{FovSpec, SonarPose, WorldPoint};
use shadowheight::io::{write_annotations, write_mosaic};
use shadowheight::mosaic::{annotate, unify_target_ids, Mosaic, DEFAULT_CELL_SIZE};
use shadowheight::overlay::mosaic_overlay;
use shadowheight::segmentation::{PairThresholds, SegmentParams};
use shadowheight::simulator::{render_pair, NoiseSpec, Scene};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("target/example-out/survey_mosaic"));
    let scene = Scene::five_targets();
    let fov = FovSpec::default();

    let mut frames = Vec::new();
    let mut estimates = Vec::new();
    for (k, y) in [-0.1, 0.0, 0.1].into_iter().enumerate() {
        let pose = SonarPose::new(WorldPoint::new(0.0, y, 0.35), 0.0, 17f64.to_radians());
        let (mut a, mut b) = render_pair(
            &scene,
            &pose,
            &fov,
            &NoiseSpec::speckle(0.05, k as u64),
            0.1,
        )?;
        a.frame.frame_id = format!("pass{k}_low");
        b.frame.frame_id = format!("pass{k}_high");
        let batch = estimate_all(
            (&a.frame, &b.frame),
            &PairThresholds::default(),
            0.1,
            &SegmentParams::default(),
            &EstimateConfig::default(),
        )?;
        println!("pass {k}: {} targets", batch.estimates.len());
        estimates.extend(batch.estimates);
        frames.extend([a.frame, b.frame]);
    }

    unify_target_ids(&mut estimates, &frames, 0.05);
    let annotated = annotate(
        Mosaic::from_frames(DEFAULT_CELL_SIZE, &frames),
        &estimates,
        &frames,
    );
    for a in &annotated.annotations {
        println!(
            "{} at ({:.3}, {:.3}) m: {:.2} cm from {} pair(s)",
            a.target_id, a.world_xy[0], a.world_xy[1], a.height_cm, a.count
        );
    }
    write_mosaic(&out.join("mosaic.pgm"), &annotated.mosaic)?;
    write_annotations(&out.join("annotations.json"), &annotated.annotations)?;
    mosaic_overlay(&annotated).save(out.join("mosaic.png"))?;
    println!("wrote {}", out.display());
    Ok(())
}
