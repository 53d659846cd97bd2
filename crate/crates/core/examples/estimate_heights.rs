//! Full pipeline on a simulated pair: segmentation, pairing, critical-line
//! fit, matching across the altitude change and the height solve.
//!
//! cargo run --release --example estimate_heights -- [SPECKLE_SIGMA]

use shadowheight::estimation::{estimate_all, EstimateConfig};
use shadowheight::geometry::{FovSpec, SonarPose, WorldPoint};
use shadowheight::mosaic::locate;
use shadowheight::segmentation::{PairThresholds, SegmentParams};
use shadowheight::simulator::{render_pair, NoiseSpec, Scene};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sigma: f64 = std::env::args().nth(1).map_or(Ok(0.0), |s| s.parse())?;
    let scene = Scene::five_targets();
    let pose = SonarPose::new(WorldPoint::new(0.0, 0.0, 0.35), 0.0, 17f64.to_radians());
    let (a, b) = render_pair(
        &scene,
        &pose,
        &FovSpec::default(),
        &NoiseSpec::speckle(sigma, 1),
        0.1,
    )?;

    let out = estimate_all(
        (&a.frame, &b.frame),
        &PairThresholds::default(),
        0.1,
        &SegmentParams::default(),
        &EstimateConfig::default(),
    )?;

    println!("id     R1      L1     R2      L2     est cm  truth cm  H1 m");
    for e in &out.estimates {
        let (o1, o2) = (&e.pair.obs1, &e.pair.obs2);
        let c = locate(e, &a.frame)?.center_xy;
        let truth = scene
            .targets
            .iter()
            .min_by(|p, q| {
                let d = |t: &shadowheight::simulator::BoxTarget| {
                    (t.center_xy[0] - c[0]).hypot(t.center_xy[1] - c[1])
                };
                d(p).total_cmp(&d(q))
            })
            .map_or(f64::NAN, |t| t.height * 100.0);
        println!(
            "{:<4} {:>7.1} {:>6.1} {:>7.1} {:>6.1} {:>8.3} {:>8.1} {:>6.3}",
            e.target_id,
            o1.apex_range(),
            o1.l,
            o2.apex_range(),
            o2.l,
            e.height_cm(),
            truth,
            e.aux_altitude_m.unwrap_or(f64::NAN)
        );
    }
    for f in &out.failures {
        println!("{}: {}", f.target_id, f.error);
    }
    Ok(())
}
