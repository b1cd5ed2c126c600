//! Command-line front end: `count`, `gen` and `eval`.
//!
//! Exit status: 0 success, 1 usage error, 2 I/O or decode error,
//! 3 internal invariant violation.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::eval::{evaluate, EvalRun};
use crate::hough::{HoughParams, DEFAULT_VOTE_FRACTION};
use crate::imagebuf::{read_pnm, write_ppm};
use crate::otsu::ToneMap;
use crate::pipeline::{annotate, run, CountReport, PipelineConfig};
use crate::synth::{corpus, read_corpus, write_corpus, Profile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "circlecount",
    version,
    about = "Count circular objects in PNM images"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count circles in one or more PGM/PPM files.
    Count {
        #[command(flatten)]
        pipeline: PipelineFlags,
        /// Write annotated copies of the inputs here.
        #[arg(long, value_name = "DIR")]
        annotate: Option<PathBuf>,
        /// Write intermediate stage images here.
        #[arg(long, value_name = "DIR")]
        dump_stages: Option<PathBuf>,
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
    },
    /// Generate a synthetic corpus of PPM images with `.truth` sidecars.
    Gen {
        #[arg(long)]
        profile: Profile,
        #[arg(long = "n")]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Run the pipeline over a labelled corpus and print accuracy metrics.
    Eval {
        #[arg(long, value_name = "DIR")]
        corpus: PathBuf,
        #[command(flatten)]
        pipeline: PipelineFlags,
    },
}

#[derive(Debug, Clone, Args)]
pub struct PipelineFlags {
    #[arg(long, default_value_t = 1.4)]
    pub sigma: f64,
    #[arg(long, default_value_t = 4, value_parser = parse_classes)]
    pub otsu_classes: usize,
    /// Class tones after thresholding: `mean` or `even`.
    #[arg(long, default_value = "mean", value_parser = parse_tones)]
    pub tones: ToneMap,
    #[arg(long, default_value_t = 10)]
    pub r_min: usize,
    #[arg(long, default_value_t = 60)]
    pub r_max: usize,
    #[arg(long, default_value_t = 1)]
    pub theta_step: u32,
    #[arg(long, default_value_t = DEFAULT_VOTE_FRACTION)]
    pub vote_fraction: f64,
    #[arg(long, default_value_t = 10.0)]
    pub min_center_dist: f64,
}

fn parse_classes(s: &str) -> Result<usize, String> {
    match s {
        "2" => Ok(2),
        "4" => Ok(4),
        _ => Err(format!("expected 2 or 4, got `{s}`")),
    }
}

fn parse_tones(s: &str) -> Result<ToneMap, String> {
    s.parse()
        .map_err(|_| format!("expected `mean` or `even`, got `{s}`"))
}

impl PipelineFlags {
    pub fn config(&self, dump_stages: bool) -> PipelineConfig {
        PipelineConfig {
            sigma: self.sigma,
            otsu_classes: self.otsu_classes,
            tones: self.tones,
            hough: HoughParams {
                r_min: self.r_min,
                r_max: self.r_max,
                theta_step: self.theta_step,
                vote_fraction: self.vote_fraction,
                min_center_dist: self.min_center_dist,
            },
            dump_stages,
        }
    }
}

/// Exit status for an error escaping a subcommand.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidSigma(_)
        | Error::InvalidClassCount(_)
        | Error::InvalidParams(_)
        | Error::InvalidThresholds => EXIT_USAGE,
        Error::Io { .. }
        | Error::MalformedHeader(_)
        | Error::UnsupportedMaxval(_)
        | Error::TruncatedPayload { .. }
        | Error::InvalidDimensions { .. }
        | Error::MalformedTruth(_) => EXIT_IO,
        _ => EXIT_INTERNAL,
    }
}

/// One `key=value` record per line; circles as `cx cy r score`.
pub fn format_report(source: &str, report: &CountReport) -> String {
    let mut s = format!(
        "source={source}\ncount={}\ndegenerate={}\n",
        report.count, report.degenerate
    );
    for c in &report.circles {
        s.push_str(&format!(
            "circle={} {} {} {:.6}\n",
            c.cx, c.cy, c.radius, c.score
        ));
    }
    for (stage, d) in &report.stage_timings {
        s.push_str(&format!("timing.{stage}_us={}\n", d.as_micros()));
    }
    s
}

pub fn format_eval(run: &EvalRun) -> String {
    let mut s = String::new();
    for (id, score) in &run.per_image {
        s.push_str(&format!(
            "image={id} truth={} detected={} matched={} exact={}\n",
            score.truth,
            score.detected,
            score.matched,
            score.exact()
        ));
    }
    let m = &run.metrics;
    s.push_str(&format!(
        "images={}\nexact_count_accuracy={:.6}\nrecall={:.6}\nprecision={:.6}\n",
        m.images,
        m.exact_count_accuracy(),
        m.recall(),
        m.precision()
    ));
    for (stage, d) in &run.mean_timings {
        s.push_str(&format!("timing.mean.{stage}_us={}\n", d.as_micros()));
    }
    s
}

fn source_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into())
}

fn with_path(path: &Path, err: Error) -> Error {
    match err {
        Error::Io { .. } => err,
        other => Error::Io {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    }
}

fn count_one(
    path: &Path,
    cfg: &PipelineConfig,
    annotate_dir: Option<&Path>,
    dump_dir: Option<&Path>,
) -> Result<CountReport, Error> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let img = read_pnm(&bytes).map_err(|e| with_path(path, e))?.into_rgb();
    let id = source_id(path);
    let (report, dump) = run(&img, cfg, &id).map_err(|e| with_path(path, e))?;
    if let Some(dir) = annotate_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let out = dir.join(format!("{id}.annotated.ppm"));
        std::fs::write(&out, write_ppm(&annotate(&img, &report.circles)))
            .map_err(|e| Error::io(&out, e))?;
    }
    if let (Some(dir), Some(dump)) = (dump_dir, dump) {
        dump.write_to(dir, &id)?;
    }
    Ok(report)
}

fn cmd_count(
    flags: &PipelineFlags,
    annotate_dir: Option<&Path>,
    dump_dir: Option<&Path>,
    files: &[PathBuf],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cfg = flags.config(dump_dir.is_some());
    if let Err(e) = cfg.validate() {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    let mut status = EXIT_OK;
    let mut first = true;
    for path in files {
        match count_one(path, &cfg, annotate_dir, dump_dir) {
            Ok(report) => {
                if !first {
                    let _ = writeln!(out);
                }
                first = false;
                let _ = write!(
                    out,
                    "{}",
                    format_report(&path.display().to_string(), &report)
                );
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                status = status.max(exit_code(&e));
            }
        }
    }
    status
}

fn cmd_gen(profile: Profile, n: usize, seed: u64, dir: &Path, err: &mut dyn Write) -> i32 {
    if n == 0 {
        let _ = writeln!(err, "error: --n must be at least 1");
        return EXIT_USAGE;
    }
    match write_corpus(dir, &corpus(profile, n, seed)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn cmd_eval(dir: &Path, flags: &PipelineFlags, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cfg = flags.config(false);
    if let Err(e) = cfg.validate() {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    let items = match read_corpus(dir) {
        Ok(items) => items,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    if items.is_empty() {
        let _ = writeln!(err, "error: no corpus found in {}", dir.display());
        return EXIT_IO;
    }
    match evaluate(&items, &cfg) {
        Ok(run) => {
            let _ = write!(out, "{}", format_eval(&run));
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match &cli.command {
        Command::Count {
            pipeline,
            annotate,
            dump_stages,
            files,
        } => cmd_count(
            pipeline,
            annotate.as_deref(),
            dump_stages.as_deref(),
            files,
            out,
            err,
        ),
        Command::Gen {
            profile,
            n,
            seed,
            out: dir,
        } => cmd_gen(*profile, *n, *seed, dir, err),
        Command::Eval { corpus, pipeline } => cmd_eval(corpus, pipeline, out, err),
    }
}
