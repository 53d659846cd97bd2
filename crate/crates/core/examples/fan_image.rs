//! Scan-converts a frame to the fan view and shows why ranges read off the fan
//! must be counted from the apex: the bottom edge of the band sits r_min away.
//!
//! cargo run --release --example fan_image -- [OUT_DIR]

use std::path::PathBuf;

use shadowheight::estimation::{solve_height, ObservationPair};
use shadowheight::geometry::{FovSpec, SonarPose, WorldPoint};
use shadowheight::overlay::fan_image;
use shadowheight::simulator::{render_frame, NoiseSpec, Scene};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("target/example-out/fan_image"));
    let fov = FovSpec::default();
    let pose = SonarPose::new(WorldPoint::new(0.0, 0.0, 0.35), 0.0, 17f64.to_radians());
    let r = render_frame(&Scene::five_targets(), &pose, &fov, &NoiseSpec::none())?;
    let (img, fan) = fan_image(&r.frame, 800)?;
    std::fs::create_dir_all(&out)?;
    img.save(out.join("fan.png"))?;
    println!(
        "fan {}×{} px, {:.1} px/m, apex {:.1} px below the band",
        fan.width, fan.height, fan.scale, fan.apex_offset_px
    );

    // A 3 cm target seen from 0.35 m and 0.45 m, far edge 1.2 m out, measured
    // in fan pixels from the apex and from the band bottom.
    let (h, x) = (0.03_f64, 1.2_f64);
    let meas = |alt: f64| {
        let r = x.hypot(alt - h);
        (r * fan.scale, r * h / (alt - h) * fan.scale)
    };
    let ((r1, l1), (r2, l2)) = (meas(0.35), meas(0.45));
    let off = fan.apex_offset_px;
    let apex = solve_height(&ObservationPair::from_measurements(
        "t", r1, l1, r2, l2, 0.1,
    ))?;
    let bottom = solve_height(&ObservationPair::from_measurements(
        "t",
        r1 - off,
        l1,
        r2 - off,
        l2,
        0.1,
    ))?;
    println!("from apex:       {:.3} cm", apex.height_cm());
    println!("from band edge:  {:.3} cm", bottom.height_cm());
    Ok(())
}
