//! Renders the five-target scene at two altitudes 10 cm apart and writes the
//! frames, their label rasters and a fan view of the first one.
//!
//! cargo run --release --example simulate_pair -- [OUT_DIR]

use std::path::PathBuf;

use shadowheight::frame::PixelClass;
use shadowheight::geometry::{FovSpec, SonarPose, WorldPoint};
use shadowheight::io::{write_frame, write_labels, write_scene};
use shadowheight::overlay::fan_image;
use shadowheight::simulator::{render_pair, NoiseSpec, Scene};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("target/example-out/simulate_pair"));

    let scene = Scene::five_targets();
    let fov = FovSpec::default();
    let pose = SonarPose::new(WorldPoint::new(0.0, 0.0, 0.35), 0.0, 17f64.to_radians());
    let noise = NoiseSpec::speckle(0.05, 7);
    let (low, high) = render_pair(&scene, &pose, &fov, &noise, 0.1)?;

    for r in [&low, &high] {
        let count = |c: PixelClass| r.labels.iter().filter(|&&v| v == c as u8).count();
        println!(
            "{}: altitude {:.2} m, {} highlight px, {} shadow px",
            r.frame.frame_id,
            r.frame.pose.altitude(),
            count(PixelClass::Highlight),
            count(PixelClass::Shadow)
        );
        write_frame(&out.join(format!("{}.pgm", r.frame.frame_id)), &r.frame)?;
        write_labels(
            &out.join(format!("{}_labels.pgm", r.frame.frame_id)),
            &r.labels,
        )?;
    }
    write_scene(&out.join("scene.json"), &scene)?;
    let (fan, _) = fan_image(&low.frame, 600)?;
    fan.save(out.join("fan_low.png"))?;
    println!("wrote {}", out.display());
    Ok(())
}
