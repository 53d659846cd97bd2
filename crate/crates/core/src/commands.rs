//! Command-line front end.
//!
//! Every command gathers its files in memory and writes them only after all
//! work succeeded, so a failing run leaves the output directory untouched.

use std::ffi::OsString;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde_json::{json, Value};

use crate::estimation::{estimate_all, solve_height_with, HeightEstimate, ObservationPair};
use crate::frame::SonarFrame;
use crate::io::{
    encode_frame, encode_pgm, encode_pose_log, encode_report, load_config, mosaic_raster,
    mosaic_sidecar, read_frame_posed, read_pose_log, read_scene, to_json, write_atomic, PoseLog,
    PoseRecord, ReportRow, RunConfig, SceneFile,
};
use crate::mosaic::{annotate, locate, unify_target_ids, Mosaic};
use crate::overlay::{mosaic_overlay, segmentation_overlay};
use crate::segmentation::fit_critical_line;
use crate::simulator::{render_pair_with, NoiseSpec, Scene};
use crate::table3::{reproduce, ROWS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TARGET_FAILURES: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "shadowheight",
    version,
    about = "Simulate forward-looking sonar frames, estimate target heights from cast shadows \
             at two altitudes, and build height-annotated seafloor mosaics."
)]
pub struct Cli {
    /// TOML run configuration; absent keys take the built-in defaults listed below
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Noise seed (overrides noise.seed)
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Output directory [default: paths.out, else ./out]
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Print a machine-readable JSON summary on stdout
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a frame pair ΔH apart with label rasters
    Simulate(SimulateArgs),
    /// Estimate target heights from a frame pair or raw measurements
    Estimate(EstimateArgs),
    /// Build a seafloor mosaic with a height layer
    Mosaic(MosaicArgs),
    /// Re-solve the published measurement tuples and compare
    #[command(name = "reproduce-table3")]
    ReproduceTable3,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scene JSON [default: paths.scene, else the five-target reference scene]
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Altitude of the first frame, meters [default: survey.altitude_m = 0.35]
    #[arg(long)]
    pub altitude: Option<f64>,
    /// Pitch below horizontal, degrees [default: survey.pitch_deg = 17]
    #[arg(long)]
    pub pitch: Option<f64>,
    /// Altitude change to the second frame, meters [default: survey.delta_h_m = 0.1]
    #[arg(long, allow_hyphen_values = true)]
    pub delta_h: Option<f64>,
    /// Multiplicative speckle σ [default: noise.speckle_sigma = 0]
    #[arg(long)]
    pub speckle: Option<f64>,
    /// Additive Gaussian σ [default: noise.additive_sigma = 0]
    #[arg(long)]
    pub additive: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// First and second frame (PGM with JSON sidecar)
    #[arg(num_args = 0..=2, value_name = "FRAME")]
    pub frames: Vec<PathBuf>,
    /// Skip the image stage: "R1,L1,R2,L2" in bins from the range apex; repeatable
    #[arg(long, value_name = "R1,L1,R2,L2", conflicts_with = "frames")]
    pub measurements: Vec<String>,
    /// Altitude change, meters [default: from the frame poses, else survey.delta_h_m = 0.1]
    #[arg(long, allow_hyphen_values = true)]
    pub delta_h: Option<f64>,
    /// Scene JSON providing ground truth for the report
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Pose log CSV overriding the sidecar poses
    #[arg(long)]
    pub poses: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MosaicArgs {
    /// Frames to mosaic; without frames a multi-pass survey is simulated
    #[arg(value_name = "FRAME")]
    pub frames: Vec<PathBuf>,
    /// Pose log CSV; every frame must have a record when given
    #[arg(long)]
    pub poses: Option<PathBuf>,
    /// Treat consecutive frames as altitude pairs and annotate heights
    #[arg(long)]
    pub pairs: bool,
    /// Scene JSON for the simulated survey
    #[arg(long)]
    pub scene: Option<PathBuf>,
}

/// Result of a command: exit code, JSON summary, human-readable summary.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub summary: Value,
    pub text: String,
    pub warnings: Vec<String>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl ToString) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }
}

/// Files staged for writing.
#[derive(Default)]
struct Staged(Vec<(PathBuf, Vec<u8>)>);

impl Staged {
    fn add(&mut self, path: PathBuf, bytes: impl Into<Vec<u8>>) {
        self.0.push((path, bytes.into()));
    }

    fn png(&mut self, path: PathBuf, img: &image::RgbImage) {
        let mut buf = Cursor::new(Vec::new());
        img.write_to(&mut buf, image::ImageFormat::Png)
            .expect("png encoding");
        self.add(path, buf.into_inner());
    }

    fn commit(self) -> Result<Vec<String>, CliError> {
        let mut written = Vec::new();
        for (p, b) in self.0 {
            write_atomic(&p, &b).map_err(CliError::usage)?;
            written.push(p.display().to_string());
        }
        Ok(written)
    }
}

struct Ctx {
    cfg: RunConfig,
    out: PathBuf,
}

fn context(cli: &Cli) -> Result<Ctx, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => load_config(p).map_err(CliError::usage)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.noise.seed = seed;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.paths.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok(Ctx { cfg, out })
}

fn load_scene(explicit: &Option<PathBuf>, cfg: &RunConfig) -> Result<Scene, CliError> {
    match explicit.as_ref().or(cfg.paths.scene.as_ref()) {
        Some(p) => read_scene(p).map_err(CliError::usage),
        None => Ok(Scene::five_targets()),
    }
}

/// Built-in defaults shown under `--help`.
pub fn defaults_help() -> String {
    format!(
        "Built-in defaults (override in --config):\n\n{}\nExit codes: 0 ok, 1 per-target failures, 2 usage or configuration error.",
        RunConfig::default().echo()
    )
}

/// Parses `args` and runs the command, printing to stdout and stderr.
/// Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cmd = Cli::command().after_long_help(defaults_help());
    let cli = match cmd
        .try_get_matches_from(args)
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(o) => {
            for w in &o.warnings {
                eprintln!("warning: {w}");
            }
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&o.summary).expect("json")
                );
            } else {
                print!("{}", o.text);
            }
            o.code
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            if cli.json {
                println!(
                    "{}",
                    json!({ "ok": false, "exit_code": e.code, "error": e.message })
                );
            }
            e.code
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Simulate(a) => simulate(cli, a),
        Command::Estimate(a) => estimate(cli, a),
        Command::Mosaic(a) => mosaic(cli, a),
        Command::ReproduceTable3 => reproduce_table3(cli),
    }
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> Result<Outcome, CliError> {
    let Ctx { mut cfg, out } = context(cli)?;
    let scene = load_scene(&a.scene, &cfg)?;
    if let Some(v) = a.altitude {
        cfg.survey.altitude_m = v;
    }
    if let Some(v) = a.pitch {
        cfg.survey.pitch_deg = v;
    }
    if let Some(v) = a.delta_h {
        cfg.survey.delta_h_m = v;
    }
    if let Some(v) = a.speckle {
        cfg.noise.speckle_sigma = v;
    }
    if let Some(v) = a.additive {
        cfg.noise.additive_sigma = v;
    }
    cfg.validate().map_err(CliError::usage)?;

    let mut warnings = Vec::new();
    let dh = cfg.survey.delta_h_m;
    if dh == 0.0 {
        warnings.push("delta-h is 0: both frames are identical and heights cannot be estimated (degenerate pair)".into());
    }
    let fov = cfg.fov();
    let (mut f1, mut f2) = render_pair_with(
        &scene,
        &cfg.survey.pose(),
        &fov,
        &cfg.noise,
        dh,
        cfg.survey.pitch_mode,
        &cfg.render,
    )
    .map_err(CliError::usage)?;
    f1.frame.frame_id = format!("f1_{}", f1.frame.frame_id);
    f2.frame.frame_id = format!("f2_{}", f2.frame.frame_id);

    let mut staged = Staged::default();
    for (name, r) in [("frame1", &f1), ("frame2", &f2)] {
        let (pgm, side) = encode_frame(&r.frame);
        staged.add(out.join(format!("{name}.pgm")), pgm);
        staged.add(out.join(format!("{name}.json")), side);
        let labels = r.labels.mapv(u16::from);
        let label_name = name.replace("frame", "labels");
        staged.add(
            out.join(format!("{label_name}.pgm")),
            encode_pgm(&labels, 2),
        );
    }
    let log = PoseLog {
        records: vec![
            PoseRecord::new(&f1.frame.frame_id, 0.0, &f1.frame.pose),
            PoseRecord::new(&f2.frame.frame_id, 1.0, &f2.frame.pose),
        ],
    };
    staged.add(
        out.join("poses.csv"),
        encode_pose_log(&log).map_err(CliError::usage)?,
    );
    staged.add(out.join("scene.json"), to_json(&SceneFile::from(&scene)));
    staged.add(out.join("config.resolved.toml"), cfg.echo());
    let written = staged.commit()?;

    let text = format!(
        "rendered {} and {} ({} targets, ΔH = {} m) into {}\n",
        f1.frame.frame_id,
        f2.frame.frame_id,
        scene.targets.len(),
        dh,
        out.display()
    );
    Ok(Outcome {
        code: EXIT_OK,
        summary: json!({
            "ok": true,
            "command": "simulate",
            "frames": [f1.frame.frame_id, f2.frame.frame_id],
            "altitudes_m": [f1.frame.pose.altitude(), f2.frame.pose.altitude()],
            "delta_h_m": dh,
            "targets": scene.targets.len(),
            "noise": cfg.noise,
            "files": written,
            "warnings": warnings,
        }),
        text,
        warnings,
    })
}

fn parse_measurement(s: &str) -> Result<[f64; 4], CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::usage(format!("--measurements expects four numbers, got {s:?}")))?;
    v.try_into()
        .map_err(|_| CliError::usage(format!("--measurements expects R1,L1,R2,L2, got {s:?}")))
}

fn estimate(cli: &Cli, a: &EstimateArgs) -> Result<Outcome, CliError> {
    let Ctx { cfg, out } = context(cli)?;
    if !a.measurements.is_empty() {
        return estimate_measurements(&cfg, a);
    }
    if a.frames.len() != 2 {
        return Err(CliError::usage(
            "estimate needs two frames or --measurements",
        ));
    }
    let log = match &a.poses {
        Some(p) => Some(read_pose_log(p).map_err(CliError::usage)?),
        None => None,
    };
    let f1 = read_frame_posed(&a.frames[0], log.as_ref()).map_err(CliError::usage)?;
    let f2 = read_frame_posed(&a.frames[1], log.as_ref()).map_err(CliError::usage)?;
    if f1.fov != f2.fov {
        return Err(CliError::usage("frames have different fields of view"));
    }
    let scene = match a.scene.as_ref().or(cfg.paths.scene.as_ref()) {
        Some(p) => Some(read_scene(p).map_err(CliError::usage)?),
        None => None,
    };
    let dh = a
        .delta_h
        .unwrap_or_else(|| round_nm(f2.pose.altitude() - f1.pose.altitude()));
    let mut warnings = Vec::new();
    if dh == 0.0 {
        warnings.push("altitude change is 0: every target pair is degenerate".into());
    }

    let batch = estimate_all(
        (&f1, &f2),
        &cfg.thresholds(),
        dh,
        &cfg.segmentation,
        &cfg.estimation,
    )
    .map_err(CliError::usage)?;

    let mut rows = Vec::new();
    for e in &batch.estimates {
        let gt = scene.as_ref().and_then(|s| ground_truth(e, &f1, s));
        let mut row = ReportRow::from_estimate(e, gt.as_ref().map(|g| g.1));
        if let Some((id, _)) = gt {
            row.target_id = id;
        }
        rows.push(row);
    }

    let mut staged = Staged::default();
    staged.add(
        out.join("report.csv"),
        encode_report(&rows).map_err(CliError::usage)?,
    );
    staged.add(out.join("estimates.json"), to_json(&batch.estimates));
    for (name, frame, obs) in [
        ("overlay1.png", &f1, &batch.first),
        ("overlay2.png", &f2, &batch.second),
    ] {
        let mut support = Vec::new();
        for p in crate::segmentation::pair_regions(&obs.regions, &cfg.thresholds()) {
            if let Ok(line) = fit_critical_line(
                &obs.regions.highlights[p.highlight],
                &obs.regions.shadows[p.shadow],
            ) {
                support.extend(line.support);
            }
        }
        staged.png(
            out.join(name),
            &segmentation_overlay(frame, &obs.regions, &support, 4),
        );
    }
    staged.add(out.join("config.resolved.toml"), cfg.echo());
    let written = staged.commit()?;

    let mut text = String::new();
    for r in &rows {
        text += &format!("{:<4} {:>8.3} cm", r.target_id, r.est_cm);
        if let (Some(g), Some(err)) = (r.gt_cm, r.error_cm) {
            text += &format!("   gt {g:.3} cm   error {err:+.3} cm");
        }
        text.push('\n');
    }
    for f in &batch.failures {
        text += &format!("{:<4} FAILED: {}\n", f.target_id, f.error);
    }
    let code = if batch.failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_TARGET_FAILURES
    };
    Ok(Outcome {
        code,
        summary: json!({
            "ok": code == EXIT_OK,
            "command": "estimate",
            "delta_h_m": dh,
            "estimates": rows,
            "failures": batch.failures.iter().map(|f| json!({"target_id": f.target_id, "error": f.error.to_string()})).collect::<Vec<_>>(),
            "files": written,
            "warnings": warnings,
        }),
        text,
        warnings,
    })
}

/// Scene target nearest to where the estimate places its target, within 5 cm.
fn ground_truth(e: &HeightEstimate, frame: &SonarFrame, scene: &Scene) -> Option<(String, f64)> {
    let loc = locate(e, frame).ok()?;
    scene
        .targets
        .iter()
        .map(|t| {
            let d = (t.center_xy[0] - loc.center_xy[0]).hypot(t.center_xy[1] - loc.center_xy[1]);
            (t, d)
        })
        .filter(|(_, d)| *d <= 0.05)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(t, _)| (t.id.clone(), round_nm(t.height * 100.0)))
}

/// Drops the representation noise of differences like `0.45 − 0.35`.
fn round_nm(v: f64) -> f64 {
    (v * 1e9).round() / 1e9
}

fn estimate_measurements(cfg: &RunConfig, a: &EstimateArgs) -> Result<Outcome, CliError> {
    let dh = a.delta_h.unwrap_or(cfg.survey.delta_h_m);
    let mut text = String::new();
    let mut results = Vec::new();
    let mut failed = 0;
    for (i, m) in a.measurements.iter().enumerate() {
        let [r1, l1, r2, l2] = parse_measurement(m)?;
        let id = format!("M{}", i + 1);
        let pair = ObservationPair::from_measurements(&id, r1, l1, r2, l2, dh);
        match solve_height_with(&pair, cfg.estimation.epsilon) {
            Ok(e) => {
                text += &format!("{id} {:.3} cm\n", e.height_cm());
                results.push(json!({
                    "id": id, "R1": r1, "L1": l1, "R2": r2, "L2": l2,
                    "delta_h_m": dh, "est_cm": e.height_cm(), "denominator": e.denominator,
                    "aux_altitude_m": e.aux_altitude_m,
                }));
            }
            Err(err) => {
                failed += 1;
                text += &format!("{id} FAILED: {err}\n");
                results.push(json!({ "id": id, "error": err.to_string() }));
            }
        }
    }
    let code = if failed == 0 {
        EXIT_OK
    } else {
        EXIT_TARGET_FAILURES
    };
    Ok(Outcome {
        code,
        summary: json!({ "ok": code == EXIT_OK, "command": "estimate", "measurements": results }),
        text,
        warnings: Vec::new(),
    })
}

fn mosaic(cli: &Cli, a: &MosaicArgs) -> Result<Outcome, CliError> {
    let Ctx { cfg, out } = context(cli)?;
    let mut warnings = Vec::new();
    let mut staged = Staged::default();
    let (frames, estimates, failures) = if a.frames.is_empty() {
        simulated_survey(&cfg, &a.scene, &mut staged, &out)?
    } else {
        let log = match &a.poses {
            Some(p) => Some(read_pose_log(p).map_err(CliError::usage)?),
            None => None,
        };
        let frames: Vec<SonarFrame> = a
            .frames
            .iter()
            .map(|p| read_frame_posed(p, log.as_ref()).map_err(CliError::usage))
            .collect::<Result<_, _>>()?;
        let mut estimates = Vec::new();
        let mut failures = Vec::new();
        if a.pairs {
            if !frames.len().is_multiple_of(2) {
                return Err(CliError::usage("--pairs needs an even number of frames"));
            }
            for (k, pair) in frames.chunks(2).enumerate() {
                let dh = round_nm(pair[1].pose.altitude() - pair[0].pose.altitude());
                let batch = estimate_all(
                    (&pair[0], &pair[1]),
                    &cfg.thresholds(),
                    dh,
                    &cfg.segmentation,
                    &cfg.estimation,
                )
                .map_err(CliError::usage)?;
                estimates.extend(batch.estimates);
                failures.extend(
                    batch
                        .failures
                        .into_iter()
                        .map(|f| format!("pair {}: {}: {}", k + 1, f.target_id, f.error)),
                );
            }
        }
        (frames, estimates, failures)
    };

    let mut estimates = estimates;
    unify_target_ids(&mut estimates, &frames, cfg.mosaic.merge_radius_m);
    let m = Mosaic::from_frames(cfg.mosaic.cell_size_m, &frames);
    if m.is_empty() {
        warnings.push("no frame sees the floor; the mosaic is empty".into());
    }
    let annotated = annotate(m, &estimates, &frames);
    let mut problems = failures;
    problems.extend(annotated.errors.iter().map(|(id, e)| format!("{id}: {e}")));

    staged.add(
        out.join("mosaic.pgm"),
        encode_pgm(&mosaic_raster(&annotated.mosaic), u16::MAX),
    );
    staged.add(
        out.join("mosaic.json"),
        to_json(&mosaic_sidecar(&annotated.mosaic)),
    );
    staged.add(
        out.join("annotations.json"),
        to_json(&annotated.annotations),
    );
    if !annotated.mosaic.is_empty() {
        staged.png(out.join("mosaic.png"), &mosaic_overlay(&annotated));
    }
    staged.add(out.join("config.resolved.toml"), cfg.echo());
    let written = staged.commit()?;

    let mut text = format!(
        "mosaic of {} frames: {} × {} cells of {} m, {} covered\n",
        frames.len(),
        annotated.mosaic.dim().1,
        annotated.mosaic.dim().0,
        cfg.mosaic.cell_size_m,
        annotated.mosaic.covered_cells()
    );
    for an in &annotated.annotations {
        text += &format!(
            "{:<4} ({:.3}, {:.3}) m  {:.3} cm{}\n",
            an.target_id,
            an.world_xy[0],
            an.world_xy[1],
            an.height_cm,
            if an.merged {
                format!("  (mean of {})", an.count)
            } else {
                String::new()
            }
        );
    }
    for p in &problems {
        text += &format!("FAILED: {p}\n");
    }
    let code = if problems.is_empty() {
        EXIT_OK
    } else {
        EXIT_TARGET_FAILURES
    };
    Ok(Outcome {
        code,
        summary: json!({
            "ok": code == EXIT_OK,
            "command": "mosaic",
            "frames": frames.len(),
            "mosaic": mosaic_sidecar(&annotated.mosaic),
            "annotations": annotated.annotations,
            "failures": problems,
            "files": written,
            "warnings": warnings,
        }),
        text,
        warnings,
    })
}

type Survey = (Vec<SonarFrame>, Vec<HeightEstimate>, Vec<String>);

/// Flies the configured lateral passes over the scene, one altitude pair per pass.
fn simulated_survey(
    cfg: &RunConfig,
    scene: &Option<PathBuf>,
    staged: &mut Staged,
    out: &Path,
) -> Result<Survey, CliError> {
    let scene = load_scene(scene, cfg)?;
    let fov = cfg.fov();
    let mut frames = Vec::new();
    let mut estimates = Vec::new();
    let mut failures = Vec::new();
    let mut log = PoseLog::default();
    for (k, dy) in cfg.survey.pass_offsets_m.iter().enumerate() {
        let mut pose = cfg.survey.pose();
        pose.position.y += dy;
        let noise = NoiseSpec {
            seed: cfg.noise.seed.wrapping_add(k as u64),
            ..cfg.noise
        };
        let (mut a, mut b) = render_pair_with(
            &scene,
            &pose,
            &fov,
            &noise,
            cfg.survey.delta_h_m,
            cfg.survey.pitch_mode,
            &cfg.render,
        )
        .map_err(CliError::usage)?;
        a.frame.frame_id = format!("p{}a_{}", k + 1, a.frame.frame_id);
        b.frame.frame_id = format!("p{}b_{}", k + 1, b.frame.frame_id);
        let batch = estimate_all(
            (&a.frame, &b.frame),
            &cfg.thresholds(),
            cfg.survey.delta_h_m,
            &cfg.segmentation,
            &cfg.estimation,
        )
        .map_err(CliError::usage)?;
        estimates.extend(batch.estimates);
        failures.extend(
            batch
                .failures
                .into_iter()
                .map(|f| format!("pass {}: {}: {}", k + 1, f.target_id, f.error)),
        );
        for f in [&a.frame, &b.frame] {
            log.records.push(PoseRecord::new(
                &f.frame_id,
                log.records.len() as f64,
                &f.pose,
            ));
        }
        frames.push(a.frame);
        frames.push(b.frame);
    }
    staged.add(
        out.join("poses.csv"),
        encode_pose_log(&log).map_err(CliError::usage)?,
    );
    staged.add(out.join("scene.json"), to_json(&SceneFile::from(&scene)));
    Ok((frames, estimates, failures))
}

fn reproduce_table3(cli: &Cli) -> Result<Outcome, CliError> {
    let report = reproduce(&ROWS);
    let mut files = Vec::new();
    if let Some(dir) = &cli.out {
        let mut staged = Staged::default();
        staged.add(dir.join("table3.json"), to_json(&report));
        staged.add(dir.join("table3.txt"), report.to_text());
        files = staged.commit()?;
    }
    let code = if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_TARGET_FAILURES
    };
    let mut summary = serde_json::to_value(&report).expect("json");
    summary["ok"] = json!(code == EXIT_OK);
    summary["command"] = json!("reproduce-table3");
    summary["files"] = json!(files);
    Ok(Outcome {
        code,
        summary,
        text: report.to_text(),
        warnings: Vec::new(),
    })
}
