//! Argument parsing and command dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thermolap_core::baselines::{
    contrast_reconstruct, hard_threshold, kmeans_cluster, pct_transform, ppt_phase_at, ppt_transform,
};
use thermolap_core::detect::level_diagnostic;
use thermolap_core::frame::Mask;
use thermolap_core::heatsim::{self, build_grid, scenario, ThermalModel};
use thermolap_core::{
    build_log_kernel, detect_multiscale, BorderPolicy, DetectConfig, LoGParams, ThermalFrame, ThermalSequence,
};

use crate::error::{CliError, Result};
use crate::profile::{self, Line};
use crate::{fsio, grid_csv, png_export, seqfile, spec};

#[derive(Debug, Parser)]
#[command(
    name = "thermolap",
    version,
    about = "Multi-scale LoG blob detection for thermograms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Multi-scale detection map of one frame.
    Detect(DetectArgs),
    /// Comparison methods.
    Baseline {
        #[command(subcommand)]
        method: Baseline,
    },
    /// Run the heat-conduction simulator.
    Simulate(SimulateArgs),
    /// Raw and filtered values along one row or column, as CSV.
    Profile(ProfileArgs),
    /// Write the LoG kernel weights as a CSV grid.
    Kernel(KernelArgs),
    /// Per-level energy share and global-trend score.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Border {
    Replicate,
    Reflect,
    Zero,
}

impl From<Border> for BorderPolicy {
    fn from(b: Border) -> Self {
        match b {
            Border::Replicate => BorderPolicy::Replicate,
            Border::Reflect => BorderPolicy::Reflect,
            Border::Zero => BorderPolicy::Zero,
        }
    }
}

#[derive(Debug, Args)]
struct InputArgs {
    /// THERMOSEQ/1 sequence or CSV grid.
    input: PathBuf,
    /// Frame index within a sequence.
    #[arg(long, default_value_t = 0)]
    frame: usize,
}

#[derive(Debug, Args)]
struct KernelFlags {
    /// Kernel scale in pixels (x, or both axes).
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,
    /// Kernel scale along y; defaults to --sigma.
    #[arg(long)]
    sigma_y: Option<f64>,
    /// Orientation in radians.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta: f64,
    /// Eccentricity exponent of the normalization.
    #[arg(long, default_value_t = LoGParams::DEFAULT_ALPHA)]
    alpha: f64,
    /// Kernel half-width as a multiple of the larger sigma.
    #[arg(long, default_value_t = LoGParams::DEFAULT_TRUNCATION)]
    truncation: f64,
}

impl KernelFlags {
    fn params(&self) -> Result<LoGParams> {
        Ok(LoGParams::with_truncation(
            self.sigma,
            self.sigma_y.unwrap_or(self.sigma),
            self.theta,
            self.alpha,
            self.truncation,
        )?)
    }
}

#[derive(Debug, Args)]
struct FilterFlags {
    #[command(flatten)]
    kernel: KernelFlags,
    /// Pyramid levels to sum, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    levels: Vec<usize>,
    /// Keep positive responses only (default).
    #[arg(long, overrides_with = "no_rectify")]
    rectify: bool,
    /// Keep the signed sum.
    #[arg(long)]
    no_rectify: bool,
    #[arg(long, value_enum, default_value_t = Border::Replicate)]
    border: Border,
}

impl FilterFlags {
    fn config(&self) -> Result<DetectConfig> {
        let config = DetectConfig {
            log_params: self.kernel.params()?,
            levels: self.levels.clone(),
            rectify: !self.no_rectify,
            border: self.border.into(),
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
struct DetectArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    filter: FilterFlags,
    /// Output map (.csv for a grid, anything else for THERMOSEQ/1).
    #[arg(long)]
    out: PathBuf,
    /// Also write an 8-bit grayscale PNG plus a .json scale sidecar.
    #[arg(long)]
    png: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Baseline {
    /// Pixels at or above a fixed temperature.
    Threshold {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, allow_negative_numbers = true)]
        cutoff: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// clamp((T - sound) / delta, 0, 1).
    Contrast {
        #[command(flatten)]
        input: InputArgs,
        /// Sound-area temperature.
        #[arg(long, allow_negative_numbers = true)]
        sound: f64,
        /// Expected defect-minus-sound difference.
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// 1-D k-means on temperature; writes the label map.
    Kmeans {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Phase image at the bin nearest a frequency.
    Ppt {
        input: PathBuf,
        /// Target frequency in Hz.
        #[arg(long)]
        frequency: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Leading principal-component images.
    Pct {
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        components: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    /// 0.6 m slab, four foam inclusions, 220 min heating, 139 min cooling.
    Indoor,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["spec", "preset"]))]
struct SimulateArgs {
    /// TOML simulation spec.
    spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Surface sequence (THERMOSEQ/1).
    #[arg(long)]
    out: PathBuf,
    /// Footprint masks, one frame per inclusion; defaults to `<out>.masks`.
    #[arg(long)]
    masks: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("line").required(true).args(["row", "col"]))]
struct ProfileArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    row: Option<usize>,
    #[arg(long)]
    col: Option<usize>,
    /// Mask file whose footprints mark defect centers.
    #[arg(long)]
    masks: Option<PathBuf>,
    #[command(flatten)]
    filter: FilterFlags,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct KernelArgs {
    #[command(flatten)]
    kernel: KernelFlags,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    kernel: KernelFlags,
    #[arg(long, value_enum, default_value_t = Border::Replicate)]
    border: Border,
    /// Deepest level to analyze.
    #[arg(long, default_value_t = 4)]
    max_level: usize,
    /// Also write the report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Diagnostics go to `err`, summaries to
/// `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Detect(a) => detect(a, out),
        Command::Baseline { method } => baseline(method, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Profile(a) => profile_cmd(a, out),
        Command::Kernel(a) => kernel(a, out),
        Command::Diagnose(a) => diagnose(a, out),
    }
}

fn say(out: &mut dyn Write, text: std::fmt::Arguments) -> Result<()> {
    out.write_fmt(text)
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| CliError::io("<stdout>", e))
}

/// A frame source: a sequence file, or a CSV grid read as one frame.
struct Loaded {
    sequence: ThermalSequence,
    is_sequence_file: bool,
}

fn load(path: &Path) -> Result<Loaded> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let with_path = |e: CliError| match e {
        CliError::Format(m) => CliError::Format(format!("{}: {m}", path.display())),
        other => other,
    };
    if seqfile::sniff(&bytes) {
        let file = seqfile::decode(&bytes).map_err(with_path)?;
        Ok(Loaded {
            sequence: file.sequence,
            is_sequence_file: true,
        })
    } else {
        let frame = grid_csv::parse(&bytes).map_err(with_path)?;
        Ok(Loaded {
            sequence: ThermalSequence::new(vec![frame], 1.0)?,
            is_sequence_file: false,
        })
    }
}

fn load_frame(input: &InputArgs) -> Result<ThermalFrame> {
    let loaded = load(&input.input)?;
    let n = loaded.sequence.len();
    loaded.sequence.frame(input.frame).cloned().ok_or_else(|| {
        CliError::Usage(format!(
            "frame {} out of range; {} holds {n} frame(s)",
            input.frame,
            input.input.display()
        ))
    })
}

fn load_sequence(path: &Path, method: &str) -> Result<ThermalSequence> {
    let loaded = load(path)?;
    if !loaded.is_sequence_file || loaded.sequence.len() < 2 {
        return Err(CliError::Usage(format!(
            "{method} needs a multi-frame THERMOSEQ/1 sequence; {} holds a single frame",
            path.display()
        )));
    }
    Ok(loaded.sequence)
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// CSV for `.csv` paths (single frame only), THERMOSEQ/1 otherwise.
fn write_frames(path: &Path, frames: Vec<ThermalFrame>, dt: f64, units: &str) -> Result<()> {
    if is_csv(path) {
        if frames.len() != 1 {
            return Err(CliError::Usage(format!(
                "{} frames cannot go to a CSV grid; use a THERMOSEQ/1 output",
                frames.len()
            )));
        }
        return grid_csv::write(path, &frames[0]);
    }
    seqfile::write(path, &ThermalSequence::new(frames, dt)?, units)
}

fn detect(a: DetectArgs, out: &mut dyn Write) -> Result<()> {
    let frame = load_frame(&a.input)?;
    let config = a.filter.config()?;
    let map = detect_multiscale(&frame, &config)?;
    write_frames(&a.out, vec![map.map.clone()], 1.0, "response")?;
    if let Some(png) = &a.png {
        png_export::export(png, &map.map)?;
    }
    let s = thermolap_core::frame_stats(&map.map);
    say(
        out,
        format_args!(
            "levels {:?}, {}, response range [{}, {}]",
            map.levels,
            if map.rectified { "rectified" } else { "signed" },
            s.min,
            s.max
        ),
    )
}

#[derive(Serialize)]
struct ThresholdReport {
    cutoff: f64,
    flagged_pixels: usize,
    total_pixels: usize,
}

#[derive(Serialize)]
struct KMeansReport {
    k: usize,
    seed: u64,
    centroids: Vec<f64>,
    inertia: f64,
    iterations: usize,
}

#[derive(Serialize)]
struct PptReport {
    requested_frequency_hz: f64,
    bin: usize,
    frequency_hz: f64,
    frame_count: usize,
    dt_seconds: f64,
}

#[derive(Serialize)]
struct PctReport {
    /// All of them, not only the exported components.
    singular_values: Vec<f64>,
    variance_share: Vec<f64>,
    total_variance: f64,
}

fn baseline(method: Baseline, out: &mut dyn Write) -> Result<()> {
    match method {
        Baseline::Threshold {
            input,
            cutoff,
            out: path,
        } => {
            let frame = load_frame(&input)?;
            let mask = hard_threshold(&frame, cutoff)?;
            write_frames(&path, vec![mask.to_frame()], 1.0, "mask")?;
            let report = ThresholdReport {
                cutoff,
                flagged_pixels: mask.count(),
                total_pixels: frame.len(),
            };
            fsio::write_json(&fsio::sidecar(&path, ".json"), &report)?;
            say(
                out,
                format_args!(
                    "{} of {} pixels at or above {cutoff}",
                    report.flagged_pixels, report.total_pixels
                ),
            )
        }
        Baseline::Contrast {
            input,
            sound,
            delta,
            out: path,
        } => {
            let frame = load_frame(&input)?;
            write_frames(
                &path,
                vec![contrast_reconstruct(&frame, sound, delta)?],
                1.0,
                "contrast",
            )
        }
        Baseline::Kmeans {
            input,
            k,
            seed,
            out: path,
        } => {
            let frame = load_frame(&input)?;
            let r = kmeans_cluster(&frame, k, seed)?;
            write_frames(&path, vec![r.label_frame()], 1.0, "label")?;
            say(
                out,
                format_args!(
                    "centroids {:?}, inertia {}, {} iterations",
                    r.centroids, r.inertia, r.iterations
                ),
            )?;
            let report = KMeansReport {
                k,
                seed,
                centroids: r.centroids,
                inertia: r.inertia,
                iterations: r.iterations,
            };
            fsio::write_json(&fsio::sidecar(&path, ".json"), &report)
        }
        Baseline::Ppt {
            input,
            frequency,
            out: path,
        } => {
            let seq = load_sequence(&input, "ppt")?;
            let stack = ppt_transform(&seq)?;
            let sel = ppt_phase_at(&stack, frequency)?;
            write_frames(&path, vec![sel.phase], 1.0, "rad")?;
            say(
                out,
                format_args!("bin {} at {} Hz (requested {frequency} Hz)", sel.bin, sel.frequency),
            )?;
            let report = PptReport {
                requested_frequency_hz: frequency,
                bin: sel.bin,
                frequency_hz: sel.frequency,
                frame_count: seq.len(),
                dt_seconds: seq.dt(),
            };
            fsio::write_json(&fsio::sidecar(&path, ".json"), &report)
        }
        Baseline::Pct {
            input,
            components,
            out: path,
        } => {
            let seq = load_sequence(&input, "pct")?;
            let stack = pct_transform(&seq, components)?;
            let shares: Vec<f64> = (0..stack.singular_values.len())
                .map(|i| stack.variance_share(i))
                .collect();
            for (i, (s, v)) in stack.singular_values.iter().zip(&shares).take(components).enumerate() {
                say(
                    out,
                    format_args!("component {}: singular value {s}, variance share {v}", i + 1),
                )?;
            }
            write_frames(&path, stack.components.clone(), 1.0, "component")?;
            let report = PctReport {
                singular_values: stack.singular_values.clone(),
                variance_share: shares,
                total_variance: stack.total_variance,
            };
            fsio::write_json(&fsio::sidecar(&path, ".json"), &report)
        }
    }
}

#[derive(Serialize)]
struct InclusionReport {
    name: String,
    pixels: usize,
    voxels: usize,
}

#[derive(Serialize)]
struct SimulationReport {
    dt_seconds: f64,
    stability_limit_seconds: f64,
    steps: usize,
    frame_interval_seconds: f64,
    frame_times_seconds: Vec<f64>,
    energy_initial_j: f64,
    energy_final_j: f64,
    boundary_inflow_j: f64,
    energy_relative_error: f64,
    base_voxels: usize,
    inclusions: Vec<InclusionReport>,
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let sc = match (&a.spec, a.preset) {
        (Some(path), _) => spec::read(path)?,
        (None, Some(Preset::Indoor)) => scenario::indoor_lab(),
        (None, None) => unreachable!("clap requires a source"),
    };
    let limit = ThermalModel::new(build_grid(&sc.slab)?).stability_limit(sc.boundary.film_coefficient.max_value());
    let result = heatsim::run(&sc.slab, &sc.boundary, &sc.config)?;
    let e = &result.energy;
    say(
        out,
        format_args!(
            "dt {} s (stability limit {limit} s), {} steps, {} frames",
            result.dt,
            result.steps,
            result.sequence.len()
        ),
    )?;
    say(
        out,
        format_args!(
            "energy: initial {} J, final {} J, boundary inflow {} J, relative error {:e}",
            e.initial,
            e.final_energy,
            e.boundary_inflow,
            e.relative_error()
        ),
    )?;

    seqfile::write(&a.out, &result.sequence, "degC")?;
    let (w, h) = result.sequence.dims();
    let pitch = Some(sc.slab.spacing);
    let mask_frames = if result.masks.is_empty() {
        vec![ThermalFrame::filled(w, h, 0.0)?]
    } else {
        result.masks.iter().map(|m| m.to_frame()).collect()
    };
    let mask_frames = mask_frames
        .into_iter()
        .map(|f| f.with_pixel_pitch(pitch))
        .collect::<thermolap_core::Result<Vec<_>>>()?;
    let masks_path = a.masks.clone().unwrap_or_else(|| fsio::sidecar(&a.out, ".masks"));
    seqfile::write(&masks_path, &ThermalSequence::new(mask_frames, 1.0)?, "mask")?;

    let report = SimulationReport {
        dt_seconds: result.dt,
        stability_limit_seconds: limit,
        steps: result.steps,
        frame_interval_seconds: result.sequence.dt(),
        frame_times_seconds: result.times.clone(),
        energy_initial_j: e.initial,
        energy_final_j: e.final_energy,
        boundary_inflow_j: e.boundary_inflow,
        energy_relative_error: e.relative_error(),
        base_voxels: result.voxel_counts[0],
        inclusions: sc
            .slab
            .inclusions
            .iter()
            .zip(&result.masks)
            .zip(&result.voxel_counts[1..])
            .map(|((inc, m), &v)| InclusionReport {
                name: inc.name.clone(),
                pixels: m.count(),
                voxels: v,
            })
            .collect(),
    };
    fsio::write_json(&fsio::sidecar(&a.out, ".json"), &report)
}

fn read_masks(path: &Path) -> Result<Vec<(String, Mask)>> {
    let file = seqfile::read(path)?;
    Ok(file
        .sequence
        .frames()
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let mask = Mask {
                width: f.width(),
                height: f.height(),
                data: f.data().iter().map(|&v| v != 0.0).collect(),
            };
            (format!("mask{}", i + 1), mask)
        })
        .collect())
}

fn profile_cmd(a: ProfileArgs, out: &mut dyn Write) -> Result<()> {
    let frame = load_frame(&a.input)?;
    let config = a.filter.config()?;
    let map = detect_multiscale(&frame, &config)?;
    let line = match (a.row, a.col) {
        (Some(r), _) => Line::Row(r),
        (None, Some(c)) => Line::Col(c),
        (None, None) => unreachable!("clap requires a line"),
    };
    let masks = match &a.masks {
        Some(p) => read_masks(p)?,
        None => Vec::new(),
    };
    let p = profile::extract(&frame, &map.map, line, &masks)?;
    fsio::write_atomic(&a.out, &p.to_csv())?;
    for m in &p.markers {
        say(out, format_args!("{} center at index {}", m.label, m.index))?;
    }
    Ok(())
}

fn kernel(a: KernelArgs, out: &mut dyn Write) -> Result<()> {
    let k = build_log_kernel(&a.kernel.params()?)?;
    let frame = ThermalFrame::new(k.size(), k.size(), k.weights().to_vec())?;
    grid_csv::write(&a.out, &frame)?;
    say(out, format_args!("{0}x{0} kernel, weight sum {1:e}", k.size(), k.sum()))
}

#[derive(Serialize)]
struct LevelRow {
    level: usize,
    energy_fraction: f64,
    trend_r2: f64,
    flagged: bool,
}

#[derive(Serialize)]
struct DiagnoseReport {
    levels: Vec<LevelRow>,
    stop_before: Option<usize>,
}

fn diagnose(a: DiagnoseArgs, out: &mut dyn Write) -> Result<()> {
    let frame = load_frame(&a.input)?;
    let config = DetectConfig {
        log_params: a.kernel.params()?,
        border: a.border.into(),
        ..DetectConfig::default()
    };
    let d = level_diagnostic(&frame, &config, a.max_level)?;
    for r in &d.levels {
        say(
            out,
            format_args!(
                "level {}: energy {:.4}, trend R2 {:.4}{}",
                r.level,
                r.energy_fraction,
                r.trend_r2,
                if r.flagged { "  <- trend" } else { "" }
            ),
        )?;
    }
    match d.stop_before() {
        Some(l) => say(out, format_args!("suggest levels below {l}"))?,
        None => say(out, format_args!("no level flagged"))?,
    }
    if let Some(path) = &a.out {
        let report = DiagnoseReport {
            levels: d
                .levels
                .iter()
                .map(|r| LevelRow {
                    level: r.level,
                    energy_fraction: r.energy_fraction,
                    trend_r2: r.trend_r2,
                    flagged: r.flagged,
                })
                .collect(),
            stop_before: d.stop_before(),
        };
        fsio::write_json(path, &report)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn rectify_flags() {
        let parse = |extra: &[&str]| {
            let mut args = vec!["thermolap", "detect", "in.csv", "--out", "o.csv"];
            args.extend_from_slice(extra);
            match Cli::try_parse_from(args).unwrap().command {
                Command::Detect(a) => a.filter.config().unwrap(),
                _ => unreachable!(),
            }
        };
        assert!(parse(&[]).rectify);
        assert!(!parse(&["--no-rectify"]).rectify);
        assert!(parse(&["--no-rectify", "--rectify"]).rectify);
        let c = parse(&["--sigma", "3", "--levels", "0,2", "--border", "reflect"]);
        assert_eq!(c.levels, vec![0, 2]);
        assert_eq!(c.log_params.sigma_y(), 3.0);
        assert_eq!(c.border, BorderPolicy::Reflect);
    }
}
