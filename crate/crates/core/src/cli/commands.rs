use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read as _;
use std::path::{Path, PathBuf};

use super::config::{BenchCliConfig, DetectConfig, EvalConfig, FuseConfig, SimulateConfig};
use crate::detector::{detect, LandingMap, MapSnapshot};
use crate::elevmap::{fuse_frame, fuse_range_image, FusionStats, PyramidMap};
use crate::evalbench::{
    benchmark, check_gates, frames_csv, runs_csv, AltitudeSweep, CellSizeSweep, CliffExperiment, Gate, GateFile,
    GateOutcome, RockfieldExperiment,
};
use crate::io;
use crate::simworld::{fly, generate_terrain};
use crate::{Error, Result};

fn require_out(out: &Option<PathBuf>) -> Result<&Path> {
    out.as_deref()
        .ok_or_else(|| Error::Config("an output directory is required (--out or the `out` key)".into()))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Renders the configured flight into `frame_NNNNNN.rimg` files, `poses.txt`
/// and `terrain.meta`. Returns the number of frames.
pub fn cmd_simulate(cfg: &SimulateConfig) -> Result<usize> {
    let out = require_out(&cfg.out)?;
    let camera = cfg.camera();
    camera.validate()?;
    let terrain = generate_terrain(&cfg.terrain_spec())?;
    let plan = cfg.plan(&terrain);
    plan.validate()?;
    let options = cfg.render_options();
    create_dir(out)?;

    // The output location is not part of the run, so reruns elsewhere stay
    // byte-identical.
    let resolved = SimulateConfig { out: None, ..cfg.clone() };
    let meta = toml::to_string(&resolved).map_err(|e| Error::Config(e.to_string()))?;
    write(
        &out.join("terrain.meta"),
        format!("# Feed back with --config to regenerate this run exactly.\n{meta}"),
    )?;
    let mut poses = Vec::new();
    for frame in fly(&terrain, &plan, &camera, cfg.noise_seed(), &options) {
        let frame = frame?;
        io::write_rimg(&out.join(format!("frame_{:06}.rimg", frame.index)), &frame.image)?;
        poses.push(frame.pose);
    }
    io::write_pose_log(&out.join("poses.txt"), &poses)?;
    Ok(poses.len())
}

/// Lists range images in `dir` in name order after checking their magic.
fn range_image_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == "rimg") {
            files.push(path);
        }
    }
    files.sort();
    for path in &files {
        let mut magic = [0u8; 5];
        let ok = std::fs::File::open(path)
            .and_then(|mut f| f.read_exact(&mut magic))
            .is_ok()
            && &magic == b"RIMG1";
        if !ok {
            return Err(Error::format("range image", format!("{}: missing RIMG1 magic", path.display())));
        }
    }
    Ok(files)
}

fn fuse_stats_row(s: &mut String, index: usize, timestamp: f64, st: &FusionStats) {
    let levels: Vec<String> = st.points_per_level.iter().map(usize::to_string).collect();
    let _ = writeln!(
        s,
        "{index},{timestamp},{},{},{},{},{},{},{},{},{}",
        st.fused_points,
        st.cell_updates,
        st.total_updated_cells(),
        st.rejected_invalid,
        st.rejected_footprint,
        st.rejected_outside,
        levels.join(";"),
        st.shift.dx,
        st.shift.dy
    );
}

/// Fuses a recorded flight. Writes the map dump to `out/map`, layer images
/// and `fuse_stats.csv`. Returns the fused map.
pub fn cmd_fuse(cfg: &FuseConfig) -> Result<PyramidMap> {
    let input = cfg
        .input
        .as_deref()
        .ok_or_else(|| Error::Config("an input directory is required (--input or the `input` key)".into()))?;
    let out = require_out(&cfg.out)?;
    let map_cfg = cfg.map();
    map_cfg.validate()?;
    let camera = cfg.camera();
    camera.validate()?;

    let files = range_image_files(input)?;
    if files.is_empty() {
        return Err(Error::Config(format!("no .rimg files in {}", input.display())));
    }
    let poses = io::read_pose_log(&input.join("poses.txt"))?;
    if poses.len() != files.len() {
        return Err(Error::Config(format!(
            "{} range images but {} poses in {}",
            files.len(),
            poses.len(),
            input.join("poses.txt").display()
        )));
    }
    if let Some(w) = poses.windows(2).position(|w| !(w[1].timestamp > w[0].timestamp)) {
        return Err(Error::format(
            "pose log",
            format!("timestamps must increase strictly (pose {} to {})", w + 1, w + 2),
        ));
    }

    let first = poses[0].position;
    let center = [cfg.center_x.unwrap_or(first.x), cfg.center_y.unwrap_or(first.y)];
    let mut map = PyramidMap::centered_at(map_cfg, center)?;
    let mut stats_csv = String::from(
        "frame,timestamp,fused_points,cell_updates,updated_cells,rejected_invalid,rejected_footprint,rejected_outside,points_per_level,shift_dx,shift_dy\n",
    );
    let mut images = Vec::with_capacity(files.len());
    for path in &files {
        let image = io::read_rimg(path).map_err(|e| Error::format("range image", format!("{}: {e}", path.display())))?;
        if image.width != camera.image_width || image.height != camera.image_height {
            return Err(Error::Config(format!(
                "{} is {}x{} but the camera is configured as {}x{}",
                path.display(),
                image.width,
                image.height,
                camera.image_width,
                camera.image_height
            )));
        }
        images.push(image);
    }
    for (i, (image, pose)) in images.iter().zip(&poses).enumerate() {
        let st = if cfg.recenter {
            fuse_frame(&mut map, image, pose, &camera)
        } else {
            fuse_range_image(&mut map, image, pose, &camera)
        };
        fuse_stats_row(&mut stats_csv, i, pose.timestamp, &st);
    }

    create_dir(out)?;
    io::save_map(&out.join("map"), &map)?;
    io::write_layer_images(out, &MapSnapshot::new(&map))?;
    write(&out.join("fuse_stats.csv"), stats_csv)?;
    Ok(map)
}

/// Loads a map dump, runs the detector and writes `landing.pgm` and
/// `candidates.csv`.
pub fn cmd_detect(cfg: &DetectConfig) -> Result<LandingMap> {
    let input = cfg
        .input
        .as_deref()
        .ok_or_else(|| Error::Config("a map directory is required (--input or the `input` key)".into()))?;
    let out = require_out(&cfg.out)?;
    let landing_cfg = cfg.landing();
    landing_cfg.validate()?;
    let map = io::load_map(input)?;
    if let Some(res) = cfg.expected_resolution {
        let have = map.config().finest_resolution;
        if (have - res).abs() > 1e-9 * res.abs().max(1.0) {
            return Err(Error::Config(format!(
                "map finest resolution {have} m does not match the configured {res} m"
            )));
        }
    }
    let landing = detect(&MapSnapshot::new(&map), &landing_cfg)?;
    create_dir(out)?;
    io::write_landing_pgm(&out.join("landing.pgm"), &landing)?;
    io::write_candidates_csv(&out.join("candidates.csv"), &landing.candidates)?;
    Ok(landing)
}

/// Text, CSV and metric outputs of one experiment.
pub struct ExperimentOutput {
    pub summary: String,
    pub metrics: BTreeMap<String, f64>,
    pub gates: Vec<Gate>,
    /// File name and contents.
    pub files: Vec<(String, String)>,
}

fn metrics_csv(metrics: &BTreeMap<String, f64>) -> String {
    let mut s = String::from("metric,value\n");
    for (k, v) in metrics {
        let _ = writeln!(s, "{k},{v}");
    }
    s
}

fn load_gates(path: &Path) -> Result<Vec<Gate>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: GateFile = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))?;
    Ok(file.gate)
}

/// Writes outputs and, when `check` is set, evaluates the gates.
fn finish(out: &Option<PathBuf>, gates_file: &Option<PathBuf>, check: bool, result: ExperimentOutput) -> Result<Vec<GateOutcome>> {
    // Read the gate file before writing anything so a bad path fails early.
    let gates = match gates_file {
        Some(p) if check => load_gates(p)?,
        _ => result.gates,
    };
    println!("{}", result.summary.trim_end());
    if let Some(dir) = out {
        create_dir(dir)?;
        write(&dir.join("report.txt"), &result.summary)?;
        write(&dir.join("metrics.csv"), metrics_csv(&result.metrics))?;
        for (name, body) in &result.files {
            write(&dir.join(name), body)?;
        }
    }
    if !check {
        return Ok(Vec::new());
    }
    let outcomes = check_gates(&gates, &result.metrics);
    for o in &outcomes {
        println!("{o}");
    }
    Ok(outcomes)
}

/// Runs the experiment named in `cfg`.
pub fn run_experiment(cfg: &EvalConfig) -> Result<ExperimentOutput> {
    match cfg.experiment.as_str() {
        "rockfield" => {
            let mut e = RockfieldExperiment::default();
            if let Some(s) = cfg.seed {
                e.base_seed = s;
            }
            if let Some(n) = cfg.seeds {
                e.seeds = n;
            }
            if let Some(f) = cfg.frames {
                e.frames = f;
            }
            if let Some(d) = &cfg.rock_diameters {
                e.rock_diameters = d.clone();
            }
            let r = e.run()?;
            let reports: Vec<_> = r.rows.iter().flat_map(|row| [&row.with_margin, &row.without_margin]).collect();
            let frames: Vec<_> = r.rows.iter().flat_map(|row| row.with_margin.frames.iter().cloned()).collect();
            Ok(ExperimentOutput {
                summary: r.to_string(),
                metrics: r.metrics(),
                gates: r.default_gates(),
                files: vec![("runs.csv".into(), runs_csv(&reports)), ("frames.csv".into(), frames_csv(&frames))],
            })
        }
        "cellsize" => {
            let mut e = CellSizeSweep::default();
            apply_grid(&mut e.scene, cfg);
            if let Some(c) = &cfg.cell_sizes {
                e.cell_sizes = c.clone();
            }
            let r = e.run()?;
            let mut bins = String::from("cell_size,bin,visible,detected,detection_rate\n");
            for row in &r.rows {
                for b in &row.bins {
                    let rate = b.detection_rate().map_or_else(String::new, |v| v.to_string());
                    let _ = writeln!(bins, "{},{},{},{},{rate}", row.cell_size, b.bin.label(), b.visible, b.detected);
                }
            }
            Ok(ExperimentOutput {
                summary: r.to_string(),
                metrics: r.metrics(),
                gates: r.default_gates(),
                files: vec![("bins.csv".into(), bins)],
            })
        }
        "altitude" => {
            let mut e = AltitudeSweep::default();
            apply_grid(&mut e.scene, cfg);
            if let Some(a) = &cfg.altitudes {
                e.altitudes = a.clone();
            }
            let r = e.run()?;
            let reports: Vec<_> = r.rows.iter().flat_map(|row| [&row.noisy, &row.noiseless]).collect();
            Ok(ExperimentOutput {
                summary: r.to_string(),
                metrics: r.metrics(),
                gates: r.default_gates(),
                files: vec![("runs.csv".into(), runs_csv(&reports))],
            })
        }
        "cliff" => {
            let mut e = CliffExperiment::default();
            if let Some(s) = cfg.seed {
                e.seed = s;
            }
            if let Some(f) = cfg.frames {
                e.frames = f;
            }
            let r = e.run()?;
            Ok(ExperimentOutput {
                summary: r.to_string(),
                metrics: r.metrics(),
                gates: r.default_gates(),
                files: vec![("frames.csv".into(), r.csv())],
            })
        }
        other => Err(Error::Config(format!(
            "unknown experiment `{other}` (expected rockfield, cellsize, altitude or cliff)"
        ))),
    }
}

fn apply_grid(scene: &mut crate::evalbench::RockGridScene, cfg: &EvalConfig) {
    if let Some(s) = cfg.seed {
        scene.base_seed = s;
    }
    if let Some(n) = cfg.seeds {
        scene.seeds = n;
    }
    if let Some(f) = cfg.frames {
        scene.frames = f;
    }
}

pub fn cmd_eval(cfg: &EvalConfig, check: bool) -> Result<Vec<GateOutcome>> {
    if let Some(p) = &cfg.gates {
        if check {
            load_gates(p)?;
        }
    }
    let result = run_experiment(cfg)?;
    finish(&cfg.out, &cfg.gates, check, result)
}

pub fn cmd_bench(cfg: &BenchCliConfig, check: bool) -> Result<Vec<GateOutcome>> {
    if let Some(p) = &cfg.gates {
        if check {
            load_gates(p)?;
        }
    }
    let r = benchmark(&cfg.bench())?;
    let result = ExperimentOutput {
        summary: r.to_string(),
        metrics: r.metrics(),
        gates: r.default_gates(),
        files: vec![("timing.csv".into(), r.csv()), ("frames.csv".into(), frames_csv(&r.frames))],
    };
    finish(&cfg.out, &cfg.gates, check, result)
}
