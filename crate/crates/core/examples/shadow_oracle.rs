//! Compares the raycast shadow behind a single box with the flat-floor
//! similar-triangles length x_t·h/(H − h).

use shadowheight::frame::PixelClass;
use shadowheight::geometry::{FovSpec, SonarPose, WorldPoint};
use shadowheight::simulator::{analytic_shadow_length, render_frame, BoxTarget, NoiseSpec, Scene};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("   H m    h m   x_t m   analytic mm  raycast mm  bin mm");
    for &(alt, h, x_t) in &[
        (0.5, 0.02, 0.8),
        (1.0, 0.047, 1.0),
        (1.5, 0.08, 2.0),
        (2.0, 0.1, 3.0),
    ] {
        let s = analytic_shadow_length(alt, h, x_t)?;
        let scene = Scene {
            targets: vec![BoxTarget {
                id: "box".into(),
                center_xy: [x_t - 0.05, 0.0],
                length: 0.1,
                width: 0.1,
                height: h,
                reflectivity: 0.9,
            }],
            ..Scene::empty()
        };
        // Aim along the ray grazing the far top edge and frame the shadow.
        let r_edge = x_t.hypot(alt - h);
        let r_end = (x_t + s).hypot(alt);
        let fov = FovSpec {
            n_beams: 33,
            r_min: r_edge - 0.1,
            r_max: r_end + 0.1,
            ..FovSpec::default()
        };
        let pose = SonarPose::new(
            WorldPoint::new(0.0, 0.0, alt),
            0.0,
            ((alt - h) / x_t).atan(),
        );
        let r = render_frame(&scene, &pose, &fov, &NoiseSpec::none())?;
        let col = r.labels.column(fov.n_beams / 2);
        let last = col
            .iter()
            .rposition(|&v| v == PixelClass::Shadow as u8)
            .ok_or("no shadow")?;
        let end = fov.bin_range(last as f64 + 0.5);
        let raycast = (end * end - alt * alt).sqrt() - x_t;
        println!(
            "{alt:>6.2} {h:>6.3} {x_t:>6.2} {:>12.2} {:>11.2} {:>7.3}",
            s * 1e3,
            raycast * 1e3,
            fov.bin_size() * 1e3
        );
    }
    Ok(())
}
