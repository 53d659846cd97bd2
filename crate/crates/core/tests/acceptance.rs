//! Acceptance suite. Each test prints one `PASS`/`FAIL` line for its
//! criterion, then asserts it.

use std::io::Write;
use std::time::{Duration, Instant};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shadowheight::estimation::{
    estimate_all, solve_height, EstimateConfig, EstimateError, ObservationPair,
};
use shadowheight::frame::PixelClass;
use shadowheight::geometry::{
    project_to_world, slant_to_ground, FanGeometry, FovSpec, PolarPoint, SonarPose, WorldPoint,
};
use shadowheight::mosaic::locate;
use shadowheight::segmentation::{connected_components, segment, PairThresholds, SegmentParams};
use shadowheight::simulator::{
    analytic_shadow_length, render_frame, render_pair, BoxTarget, NoiseSpec, Scene,
};
use shadowheight::table3::{reproduce, ROWS};

/// Writes past the test harness capture so the lines land in the log even
/// for passing tests.
fn report(criterion: u8, name: &str, pass: bool, detail: &str) {
    let line = format!(
        "acceptance {criterion}: {} {name}: {detail}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let out = std::io::stdout();
    let mut lock = out.lock();
    let _ = lock.write_all(line.as_bytes());
    let _ = lock.flush();
}

fn default_pose() -> SonarPose {
    SonarPose::new(WorldPoint::new(0.0, 0.0, 0.35), 0.0, 17f64.to_radians())
}

#[test]
fn criterion_1_table_reproduction() {
    let t = Instant::now();
    let rep = reproduce(&ROWS);
    let elapsed = t.elapsed();
    let anchor = |l: &str, v: f64| {
        rep.rows
            .iter()
            .find(|r| r.label == l)
            .and_then(|r| r.computed_cm)
            .is_some_and(|c| (c - v).abs() <= 0.005)
    };
    let anchors = anchor("1", 2.932) && anchor("2", 4.185) && anchor("5-S", 2.786);
    let failed: Vec<String> = rep
        .rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| {
            format!(
                "{} computed {:.3} vs {:.3}",
                r.label,
                r.computed_cm.unwrap_or(f64::NAN),
                r.published_est_cm
            )
        })
        .collect();
    let pass = rep.all_pass() && anchors && elapsed < Duration::from_millis(1);
    report(
        1,
        "table reproduction",
        pass,
        &format!(
            "{}/{} rows within ±0.005 cm, anchors {}, {:?}{}",
            rep.passed,
            rep.rows.len(),
            if anchors { "ok" } else { "off" },
            elapsed,
            if failed.is_empty() {
                String::new()
            } else {
                format!("; {}", failed.join("; "))
            }
        ),
    );
    assert!(pass, "{}", rep.to_text());
}

#[test]
fn criterion_2_error_column() {
    let rep = reproduce(&ROWS);
    let checked: Vec<_> = rep.rows.iter().filter(|r| r.error_pass.is_some()).collect();
    let worst = checked
        .iter()
        .map(|r| (r.computed_error_cm.unwrap() - r.published_error_cm.unwrap()).abs())
        .fold(0.0, f64::max);
    let row4 = checked
        .iter()
        .find(|r| r.label == "4")
        .is_some_and(|r| (r.computed_error_cm.unwrap() + 0.517).abs() <= 0.005);
    let pass = checked.len() == 5 && checked.iter().all(|r| r.error_pass == Some(true)) && row4;
    report(
        2,
        "error column",
        pass,
        &format!(
            "{} rows with ground truth, worst gap {worst:.4} cm",
            checked.len()
        ),
    );
    assert!(pass);
}

/// Estimated heights (cm) per scene target for one simulated pair; targets
/// without an estimate are absent.
fn closure_run(scene: &Scene, noise: &NoiseSpec) -> Vec<(String, f64, f64)> {
    let (a, b) =
        render_pair(scene, &default_pose(), &FovSpec::default(), noise, 0.1).expect("render");
    let batch = estimate_all(
        (&a.frame, &b.frame),
        &PairThresholds::default(),
        0.1,
        &SegmentParams::default(),
        &EstimateConfig::default(),
    )
    .expect("estimate");
    let mut out = Vec::new();
    for e in &batch.estimates {
        let c = locate(e, &a.frame).expect("locate").center_xy;
        let t = scene
            .targets
            .iter()
            .min_by(|p, q| dist(p, c).total_cmp(&dist(q, c)))
            .unwrap();
        if dist(t, c) < 0.05 && !out.iter().any(|(id, _, _)| id == &t.id) {
            out.push((t.id.clone(), t.height * 100.0, e.height_cm()));
        }
    }
    out
}

fn dist(t: &BoxTarget, c: [f64; 2]) -> f64 {
    (t.center_xy[0] - c[0]).hypot(t.center_xy[1] - c[1])
}

#[test]
fn criterion_3_simulation_closure() {
    let t = Instant::now();
    let scene = Scene::five_targets();
    let clean = closure_run(&scene, &NoiseSpec::none());
    let clean_ok = clean.len() == 5 && clean.iter().all(|(_, gt, est)| (gt - est).abs() <= 0.5);
    let worst = clean
        .iter()
        .map(|(_, gt, est)| (gt - est).abs())
        .fold(0.0, f64::max);

    let mut seeds_ok = 0;
    for seed in 0..20 {
        let run = closure_run(&scene, &NoiseSpec::speckle(0.05, seed));
        let within = run
            .iter()
            .filter(|(_, gt, est)| (gt - est).abs() <= 0.8)
            .count();
        seeds_ok += (within >= 4) as usize;
    }
    let elapsed = t.elapsed();
    let pass = clean_ok && seeds_ok == 20 && elapsed < Duration::from_secs(10);
    report(
        3,
        "simulation closure",
        pass,
        &format!(
            "noiseless {} targets, worst |error| {worst:.3} cm; speckle 0.05: {seeds_ok}/20 seeds with ≥4/5 within 0.8 cm; {elapsed:.2?}",
            clean.len()
        ),
    );
    assert!(pass);
}

fn random_tuple(rng: &mut ChaCha8Rng) -> (f64, f64, f64, f64, f64) {
    // Physically consistent tuple from a random geometry.
    let h: f64 = rng.random_range(0.005..0.2);
    let big_h = rng.random_range(h + 0.1..3.0);
    let dh = rng.random_range(0.02..0.5);
    let x: f64 = rng.random_range(0.3..5.0);
    let obs = |alt: f64| {
        let r = x.hypot(alt - h);
        (r, r * h / (alt - h))
    };
    let ((r1, l1), (r2, l2)) = (obs(big_h), obs(big_h + dh));
    (r1, l1, r2, l2, dh)
}

#[test]
fn criterion_4_solver_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut scale_worst, mut linear_ok, mut swap_ok) = (0.0f64, true, true);
    for _ in 0..1000 {
        let (r1, l1, r2, l2, dh) = random_tuple(&mut rng);
        let base =
            solve_height(&ObservationPair::from_measurements("p", r1, l1, r2, l2, dh)).unwrap();
        let k = rng.random_range(10.0..2000.0);
        let scaled = solve_height(&ObservationPair::from_measurements(
            "p",
            k * r1,
            k * l1,
            k * r2,
            k * l2,
            dh,
        ))
        .unwrap();
        scale_worst = scale_worst.max(((scaled.height_m - base.height_m) / base.height_m).abs());

        let doubled = solve_height(&ObservationPair::from_measurements(
            "p",
            r1,
            l1,
            r2,
            l2,
            2.0 * dh,
        ))
        .unwrap();
        linear_ok &= doubled.height_m == 2.0 * base.height_m;

        // Swapping frames flips the sign of both ΔH and the denominator.
        let p = ObservationPair::from_measurements("p", r1, l1, r2, l2, dh);
        let sw = p.swapped();
        swap_ok &= sw.delta_h == -p.delta_h;
        swap_ok &= match solve_height(&sw) {
            Ok(e) => e.height_m == base.height_m && e.denominator == -base.denominator,
            Err(_) => false,
        };
    }
    let degenerate = [
        (100.0, 10.0, 100.0, 10.0),
        (200.0, 20.0, 100.0, 10.0),
        (0.0, 0.0, 0.0, 0.0),
    ]
    .iter()
    .all(|&(r1, l1, r2, l2)| {
        matches!(
            solve_height(&ObservationPair::from_measurements(
                "d", r1, l1, r2, l2, 0.1
            )),
            Err(EstimateError::DegenerateGeometry { .. } | EstimateError::NonPositiveShadow { .. })
        )
    });
    let pass = scale_worst < 1e-9 && linear_ok && swap_ok && degenerate;
    report(
        4,
        "solver properties",
        pass,
        &format!(
            "scale invariance worst {scale_worst:.2e} rel, ΔH linearity {}, swap {}, degenerate rejection {}",
            linear_ok, swap_ok, degenerate
        ),
    );
    assert!(pass);
}

/// Ground extent of the rendered shadow behind a 10 cm box whose far edge is
/// `x_t` out, with the tolerance of one range bin projected to the floor.
fn rendered_extent(alt: f64, h: f64, x_t: f64) -> (f64, f64) {
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
    let s = analytic_shadow_length(alt, h, x_t).unwrap();
    let fov = FovSpec {
        n_beams: 33,
        r_min: x_t.hypot(alt - h) - 0.1,
        r_max: (x_t + s).hypot(alt) + 0.1,
        ..FovSpec::default()
    };
    let pose = SonarPose::new(
        WorldPoint::new(0.0, 0.0, alt),
        0.0,
        ((alt - h) / x_t).atan(),
    );
    let r = render_frame(&scene, &pose, &fov, &NoiseSpec::none()).unwrap();
    let col = r.labels.column(fov.n_beams / 2);
    let last = col
        .iter()
        .rposition(|&v| v == PixelClass::Shadow as u8)
        .expect("shadow in view");
    let end = fov.bin_range(last as f64 + 0.5);
    let x_end = slant_to_ground(end, alt).unwrap();
    (x_end - x_t, fov.bin_size() * end / x_end)
}

#[test]
fn criterion_5_raycast_oracle() {
    let t = Instant::now();
    let mut worst = 0.0f64;
    let mut fails = Vec::new();
    let mut n = 0;
    for alt in [0.5, 1.0, 1.5, 2.0] {
        for h in [0.01, 0.04, 0.07, 0.1] {
            for x_t in [0.5, 1.25, 2.0, 3.0] {
                let analytic = analytic_shadow_length(alt, h, x_t).unwrap();
                let (extent, tol) = rendered_extent(alt, h, x_t);
                let gap = (extent - analytic).abs();
                worst = worst.max(gap / tol);
                if gap > tol {
                    fails.push(format!("H {alt} h {h} x {x_t}"));
                }
                n += 1;
            }
        }
    }
    let elapsed = t.elapsed();
    let pass = fails.is_empty() && elapsed < Duration::from_secs(30);
    report(
        5,
        "raycast vs analytic shadow",
        pass,
        &format!("{n} grid points, worst gap {worst:.3} bins, {elapsed:.2?}"),
    );
    assert!(pass, "{fails:?}");
}

/// Floor point on the ray from `eye` through `edge`, found by bisection on
/// the ray parameter.
fn floor_hit(eye: [f64; 3], edge: [f64; 3]) -> f64 {
    let d: Vec<f64> = (0..3).map(|i| edge[i] - eye[i]).collect();
    let (mut lo, mut hi) = (1.0, 1e6);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if eye[2] + mid * d[2] > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) * d.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[test]
fn criterion_6_pure_math_closure() {
    let mut worst = 0.0f64;
    let mut n = 0;
    for big_h in [0.3, 0.5, 1.0, 2.0] {
        for h in [0.01, 0.028, 0.047, 0.1] {
            for x_t in [0.5, 1.2, 3.0] {
                for dh in [0.05, 0.1, 0.3] {
                    let bins_per_m = 853.0;
                    let obs = |alt: f64| {
                        let eye = [0.0, 0.0, alt];
                        let edge = [x_t, 0.3 * x_t, h];
                        let r = ((x_t * x_t) * 1.09 + (alt - h).powi(2)).sqrt();
                        let end = floor_hit(eye, edge);
                        (r * bins_per_m, (end - r) * bins_per_m)
                    };
                    let ((r1, l1), (r2, l2)) = (obs(big_h), obs(big_h + dh));
                    let est =
                        solve_height(&ObservationPair::from_measurements("m", r1, l1, r2, l2, dh))
                            .unwrap();
                    worst = worst.max((est.height_m - h).abs());
                    n += 1;
                }
            }
        }
    }
    let pass = worst < 1e-4;
    report(
        6,
        "pure-math closure",
        pass,
        &format!("{n} geometries, worst |h error| {:.2e} mm", worst * 1e3),
    );
    assert!(pass);
}

#[test]
fn criterion_7_geometry_round_trips() {
    let fov = FovSpec::default();
    let fan = FanGeometry::new(fov, 1024).unwrap();
    let (mut exact_worst, mut pixel_worst) = (0.0f64, 0.0f64);
    for bin in 1..fov.n_range_bins - 1 {
        for beam in 1..fov.n_beams - 1 {
            let (b, m) = (bin as f64, beam as f64);
            let (x, y) = fan.polar_to_fan(b, m).unwrap();
            let (b2, m2) = fan.fan_to_polar(x, y);
            exact_worst = exact_worst.max((b2 - b).hypot(m2 - m));
            let (b3, m3) = fan.fan_to_polar(x.round(), y.round());
            pixel_worst = pixel_worst.max((b3 - b).abs().max((m3 - m).abs()));
        }
    }

    let mut slant_worst = 0.0f64;
    let mut norm_worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        // Inversion conditioning grows as (slant/ground)²; stay within the
        // grazing angles a tilted sonar can see (below ~88°).
        let g: f64 = rng.random_range(0.1..10.0);
        let alt: f64 = rng.random_range(0.05..3.0);
        let back = slant_to_ground(g.hypot(alt), alt).unwrap();
        slant_worst = slant_worst.max(((back - g) / g).abs());

        let p = PolarPoint::new(
            rng.random_range(0.1..40.0),
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.3..0.3),
        );
        norm_worst = norm_worst.max((project_to_world(p).norm() - p.r).abs() / p.r);
    }
    let pass =
        exact_worst <= 1.0 && pixel_worst <= 1.0 && slant_worst < 1e-12 && norm_worst < 1e-14;
    report(
        7,
        "geometry round trips",
        pass,
        &format!(
            "polar-fan-polar {exact_worst:.1e} px exact, {pixel_worst:.3} px through integer fan pixels; \
             slant-ground {slant_worst:.1e} rel; projection norm {norm_worst:.1e} rel"
        ),
    );
    assert!(pass);
}

fn iou(a: &Array2<bool>, b: &Array2<bool>) -> f64 {
    let inter = a.iter().zip(b).filter(|(x, y)| **x && **y).count();
    let union = a.iter().zip(b).filter(|(x, y)| **x || **y).count();
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Label mask of `class` keeping only components of at least `min_area` px.
fn label_mask(labels: &Array2<u8>, class: PixelClass, min_area: usize) -> Array2<bool> {
    let raw = labels.mapv(|v| v == class as u8);
    let mut keep = Array2::from_elem(raw.dim(), false);
    for comp in connected_components(&raw) {
        if comp.len() >= min_area {
            for p in comp {
                keep[p] = true;
            }
        }
    }
    keep
}

#[test]
fn criterion_8_segmentation_ground_truth() {
    let min_area = SegmentParams::default().min_area;
    let scene = Scene::five_targets();
    let pose = default_pose();
    let fov = FovSpec::default();
    let scores = |noise: NoiseSpec, altitude: f64| {
        let p = pose.raised(altitude - pose.altitude());
        let r = render_frame(&scene, &p, &fov, &noise).unwrap();
        let seg = segment(&r.frame);
        (
            iou(
                &seg.highlight_mask(),
                &label_mask(&r.labels, PixelClass::Highlight, min_area),
            ),
            iou(
                &seg.shadow_mask(),
                &label_mask(&r.labels, PixelClass::Shadow, min_area),
            ),
        )
    };
    let mut clean = Vec::new();
    for alt in [0.35, 0.45] {
        clean.push(scores(NoiseSpec::none(), alt));
    }
    let mut noisy = Vec::new();
    for seed in 0..5 {
        noisy.push(scores(NoiseSpec::speckle(0.05, seed), 0.35));
    }
    let min_of = |v: &[(f64, f64)]| {
        v.iter()
            .fold((1.0f64, 1.0f64), |(a, b), &(h, s)| (a.min(h), b.min(s)))
    };
    let (ch, cs) = min_of(&clean);
    let (nh, ns) = min_of(&noisy);
    let pass = ch == 1.0 && cs == 1.0 && nh >= 0.9 && ns >= 0.9;
    report(
        8,
        "segmentation ground truth",
        pass,
        &format!("noiseless IoU highlight {ch:.4} shadow {cs:.4}; speckle 0.05 IoU highlight {nh:.4} shadow {ns:.4}"),
    );
    assert!(pass);
}
