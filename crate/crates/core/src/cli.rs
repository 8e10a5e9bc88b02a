//! Command-line front end: `evaluate`, `compare`, `synth` and `report`.
//!
//! Exit codes: 0 on success, 1 for input or configuration errors, 2 when
//! there is nothing to evaluate. Log verbosity comes from `COVEVAL_LOG`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::datasets::{
    load_detections, load_ground_truth, read_text, validate_inputs, write_detections, write_scene,
    write_voc_annotation, Manifest, ManifestImage, VocAnnotation, MANIFEST_FILE,
};
use crate::error::{Error, Result};
use crate::evaluate::{evaluate, EvalConfig, EvalSet, Standard};
use crate::fractal::{
    generate_curve, synthesize_annotations, NoiseModel, Point, SyntheticScene, TransformParams,
    CRACK_CLASS,
};
use crate::metrics::{format_percent, EvalReport};

pub const LOG_ENV: &str = "COVEVAL_LOG";

#[derive(Debug, Parser)]
#[command(name = "coveval", version, about = "Detection evaluation with covering overlap and multi-matching")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score detections against ground truth and write a JSON report.
    Evaluate(EvalArgs),
    /// Rank classes under both standards and emit a CSV comparison.
    Compare(EvalArgs),
    /// Generate synthetic fractal-crack scenes with simulated detections.
    Synth(SynthArgs),
    /// Render a saved report as a table or long-format CSV.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StandardArg {
    Map,
    Coveval,
    Both,
}

impl From<StandardArg> for Standard {
    fn from(s: StandardArg) -> Self {
        match s {
            StandardArg::Map => Standard::Map,
            StandardArg::Coveval => Standard::Coveval,
            StandardArg::Both => Standard::Both,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Directory of VOC annotation XML files, or a manifest file.
    #[arg(long)]
    pub gt: PathBuf,
    /// Directory of per-class `<class>.txt` detection files, or a JSON file.
    #[arg(long)]
    pub det: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    pub standard: StandardArg,
    #[arg(long, default_value_t = 0.55)]
    pub overlap_threshold: f64,
    #[arg(long, default_value_t = 0.5)]
    pub confidence_threshold: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.8")]
    pub mu: Vec<f64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

impl EvalArgs {
    pub fn config(&self) -> EvalConfig {
        EvalConfig {
            overlap_threshold: self.overlap_threshold,
            confidence_threshold: self.confidence_threshold,
            mu_list: self.mu.clone(),
            standard: self.standard.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Deterministic,
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub depth: u32,
    /// Nodes inserted per segment per iteration.
    #[arg(long, default_value_t = 1)]
    pub g: u32,
    #[arg(long, value_enum, default_value = "random")]
    pub kind: KindArg,
    /// Lower bound of the along-segment fraction; the constant fraction for
    /// the deterministic kind.
    #[arg(long, default_value_t = 0.35)]
    pub t_lo: f64,
    #[arg(long, default_value_t = 0.65)]
    pub t_hi: f64,
    /// Lower bound of the normal offset (fraction of segment length); the
    /// constant offset for the deterministic kind.
    #[arg(long, default_value_t = -0.25, allow_hyphen_values = true)]
    pub h_lo: f64,
    #[arg(long, default_value_t = 0.25, allow_hyphen_values = true)]
    pub h_hi: f64,
    /// Length of the base segment.
    #[arg(long, default_value_t = 480.0)]
    pub length: f64,
    #[arg(long, default_value_t = 32.0)]
    pub box_size: f64,
    #[arg(long, default_value_t = 32.0)]
    pub stride: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale_jitter: f64,
    #[arg(long, default_value_t = 0.0)]
    pub position_jitter: f64,
    #[arg(long, default_value_t = 1)]
    pub duplication: u32,
    #[arg(long, default_value_t = 0.0)]
    pub dropout: f64,
    #[arg(long, default_value_t = 0.0)]
    pub false_alarms: f64,
    #[arg(long, default_value_t = 0.5)]
    pub confidence_lo: f64,
    #[arg(long, default_value_t = 1.0)]
    pub confidence_hi: f64,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

impl SynthArgs {
    pub fn params(&self) -> Result<TransformParams> {
        match self.kind {
            KindArg::Deterministic => TransformParams::deterministic(self.g, self.t_lo, self.h_lo),
            KindArg::Random => TransformParams::random(self.g, (self.t_lo, self.t_hi), (self.h_lo, self.h_hi)),
        }
    }

    pub fn noise(&self) -> NoiseModel {
        NoiseModel {
            scale_jitter: self.scale_jitter,
            position_jitter: self.position_jitter,
            duplication: self.duplication,
            dropout: self.dropout,
            false_alarms: self.false_alarms,
            confidence_lo: self.confidence_lo,
            confidence_hi: self.confidence_hi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Table,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    pub report: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            fs::write(p, text).map_err(|e| Error::io(p, e))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Loads inputs and evaluates them under the configured standard(s).
pub fn run_evaluation(args: &EvalArgs) -> Result<EvalReport> {
    let config = args.config();
    config.validate()?;
    let gt = load_ground_truth(&args.gt)?;
    let detections = load_detections(&args.det, &gt.classes)?;

    let manifest = Manifest::new(
        gt.classes.clone(),
        gt.images
            .iter()
            .map(|i| ManifestImage {
                image_id: i.image_id.clone(),
                width: i.width.unwrap_or(f64::INFINITY),
                height: i.height.unwrap_or(f64::INFINITY),
                gt_path: PathBuf::new(),
            })
            .collect(),
    );
    let findings = validate_inputs(&manifest, &gt.ground_truths, &detections);
    for id in &findings.unknown_images {
        log::warn!("detections reference unknown image '{id}'");
    }
    for class in &findings.unknown_classes {
        log::warn!("unknown class '{class}'");
    }
    for w in &findings.out_of_extent {
        log::warn!("{:?} box on '{}' exceeds the image extent", w.source, w.image_id);
    }
    if !findings.duplicate_ground_truths.is_empty() {
        log::warn!("{} duplicate ground-truth boxes", findings.duplicate_ground_truths.len());
    }

    let set = EvalSet {
        images: gt.images,
        classes: gt.classes,
        ground_truths: gt.ground_truths,
        detections,
    };
    evaluate(&set, &config, args.threads)
}

pub fn cmd_evaluate(args: &EvalArgs) -> Result<()> {
    let report = run_evaluation(args)?;
    if let Some(out) = &args.out {
        write_output(Some(out), &(report.to_json()? + "\n"))?;
    }
    print!("{}", render_table(&report));
    Ok(())
}

pub fn cmd_compare(args: &EvalArgs) -> Result<()> {
    let mut args = args.clone();
    args.standard = StandardArg::Both;
    let report = run_evaluation(&args)?;
    write_output(args.out.as_deref(), &render_comparison(&report)?)
}

pub fn cmd_report(args: &ReportArgs) -> Result<()> {
    let report = EvalReport::from_json(&read_text(&args.report)?)?;
    let text = match args.format {
        ReportFormat::Table => render_table(&report),
        ReportFormat::Csv => render_long_csv(&report)?,
    };
    write_output(args.out.as_deref(), &text)
}

/// Builds one scene: a curve along a horizontal base segment, shifted so the
/// curve sits `box_size` away from the image origin, then annotated.
pub fn synth_scene(args: &SynthArgs, params: &TransformParams, image_id: &str, seed: u64) -> Result<SyntheticScene> {
    let start = Point::new(0.0, 0.0);
    let end = Point::new(args.length, 0.0);
    let curve = generate_curve(params, args.depth, seed, start, end)?;
    let (x0, y0, _, _) = curve.bounds();
    let curve = curve.translated(args.box_size - x0, args.box_size - y0);
    synthesize_annotations(&curve, image_id, args.box_size, args.stride, &args.noise(), seed)
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let params = args.params()?;
    args.noise().validate()?;
    if args.count == 0 {
        return Err(Error::config("--count must be at least 1"));
    }
    let mut seeder = ChaCha8Rng::seed_from_u64(args.seed);
    let seeds: Vec<u64> = (0..args.count).map(|_| seeder.next_u64()).collect();
    let ids: Vec<String> = (0..args.count).map(|i| format!("scene_{i:04}")).collect();

    let build = || -> Result<Vec<SyntheticScene>> {
        ids.par_iter()
            .zip(seeds.par_iter())
            .map(|(id, &seed)| synth_scene(args, &params, id, seed))
            .collect()
    };
    let scenes = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))?
        .install(build)?;

    let annotations = args.out.join("annotations");
    let scene_dir = args.out.join("scenes");
    let det_dir = args.out.join("detections");
    for dir in [&annotations, &scene_dir, &det_dir] {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut images = Vec::with_capacity(scenes.len());
    let mut detections = Vec::new();
    for scene in &scenes {
        let ann = VocAnnotation {
            image_id: scene.image_id.clone(),
            width: Some(scene.width),
            height: Some(scene.height),
            objects: scene.ground_truths.clone(),
        };
        let xml_name = format!("{}.xml", scene.image_id);
        write_output(Some(&annotations.join(&xml_name)), &write_voc_annotation(&ann))?;
        write_output(
            Some(&scene_dir.join(format!("{}.json", scene.image_id))),
            &(write_scene(scene)? + "\n"),
        )?;
        images.push(ManifestImage {
            image_id: scene.image_id.clone(),
            width: scene.width,
            height: scene.height,
            gt_path: Path::new("annotations").join(xml_name),
        });
        detections.extend(scene.detections.iter().cloned());
    }
    write_output(Some(&det_dir.join(format!("{CRACK_CLASS}.txt"))), &write_detections(&detections))?;
    let manifest = Manifest::new(vec![CRACK_CLASS.to_string()], images);
    write_output(Some(&args.out.join(MANIFEST_FILE)), &(manifest.to_json()? + "\n"))?;
    log::info!("wrote {} scenes to {}", scenes.len(), args.out.display());
    Ok(())
}

/// Aligned text table with percentages at one decimal.
pub fn render_table(report: &EvalReport) -> String {
    let mut header = vec!["class".to_string(), "AP".into(), "AXR".into(), "AXP".into()];
    header.extend(report.config.mu_list.iter().map(|mu| format!("F({mu})")));
    let mut rows = vec![header];
    for c in &report.per_class {
        let mut row = vec![
            c.class_id.clone(),
            format_percent(c.ap),
            format_percent(c.axr),
            format_percent(c.axp),
        ];
        row.extend(c.f_ext.iter().map(|s| format_percent(s.value)));
        rows.push(row);
    }
    let mut mean = vec![
        "mean".to_string(),
        format_percent(report.map),
        format_percent(report.maxr),
        format_percent(report.maxp),
    ];
    mean.extend(report.mf_ext.iter().map(|s| format_percent(s.value)));
    rows.push(mean);

    let widths: Vec<usize> = (0..rows[0].len())
        .map(|col| rows.iter().map(|r| r[col].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(col, (cell, w))| if col == 0 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        if i == 0 || i == rows.len() - 2 {
            let total = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
            let _ = writeln!(out, "{}", "-".repeat(total));
        }
    }
    out
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `(class, metric, value)` rows for external plotting. Values are fractions
/// at full precision; undefined values are left empty.
pub fn render_long_csv(report: &EvalReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["class", "metric", "value"])?;
    let mut emit = |class: &str, ap, axr, axp, f: &[crate::metrics::MuScore]| -> Result<()> {
        for (name, v) in [("ap", ap), ("axr", axr), ("axp", axp)] {
            w.write_record([class, name, &opt_cell(v)])?;
        }
        for s in f {
            w.write_record([class, &format!("f_ext@{}", s.mu), &opt_cell(s.value)])?;
        }
        Ok(())
    };
    for c in &report.per_class {
        emit(&c.class_id, c.ap, c.axr, c.axp, &c.f_ext)?;
    }
    emit("mean", report.map, report.maxr, report.maxp, &report.mf_ext)?;
    finish_csv(w)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::config(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::config(e.to_string()))
}

/// 1-based ranks by descending score; ties and undefined scores are ordered
/// by class name, undefined last.
pub fn rank_classes(scores: &[(String, Option<f64>)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        let (ca, sa) = &scores[a];
        let (cb, sb) = &scores[b];
        match (sa, sb) {
            (Some(x), Some(y)) => y.total_cmp(x).then_with(|| ca.cmp(cb)),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => ca.cmp(cb),
        }
    });
    let mut ranks = vec![0; scores.len()];
    for (pos, idx) in order.into_iter().enumerate() {
        ranks[idx] = pos + 1;
    }
    ranks
}

/// Side-by-side per-class scores with each class's rank under both
/// standards. The covering rank uses the first trade-off factor in the
/// report's mu list.
pub fn render_comparison(report: &EvalReport) -> Result<String> {
    let rank_mu = report.config.mu_list[0];
    let by_map: Vec<_> = report.per_class.iter().map(|c| (c.class_id.clone(), c.ap)).collect();
    let by_cov: Vec<_> = report
        .per_class
        .iter()
        .map(|c| (c.class_id.clone(), c.f_ext_at(rank_mu)))
        .collect();
    let (rank_map, rank_cov) = (rank_classes(&by_map), rank_classes(&by_cov));

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["class".to_string(), "ap".into(), "axr".into(), "axp".into()];
    header.extend(report.config.mu_list.iter().map(|mu| format!("f_ext@{mu}")));
    header.extend(["rank_map".into(), "rank_coveval".into(), "rank_delta".into()]);
    w.write_record(&header)?;
    for (i, c) in report.per_class.iter().enumerate() {
        let mut row = vec![c.class_id.clone(), opt_cell(c.ap), opt_cell(c.axr), opt_cell(c.axp)];
        row.extend(c.f_ext.iter().map(|s| opt_cell(s.value)));
        row.push(rank_map[i].to_string());
        row.push(rank_cov[i].to_string());
        row.push((rank_map[i] as i64 - rank_cov[i] as i64).to_string());
        w.write_record(&row)?;
    }
    finish_csv(w)
}
