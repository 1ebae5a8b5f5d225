use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use coocscale::bench::{run_bench, write_bench_csv, BenchConfig};
use coocscale::diagnostics::{heatmap, write_counts};
use coocscale::{
    build_guide, compare_methods, kernel_diagnostics, learn_cooccurrence, load_image, save_image, CoocMode,
    DownscaleParams, Error, GuideParams, ImageFormat, Method, QualityReport, RasterImage,
};

use crate::{BenchArgs, Command, CommonArgs};

pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_DIMENSION: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::InvalidParameter(_) | Error::ChannelFormatMismatch { .. } => EXIT_CONFIG,
            Error::NotDivisible { .. } | Error::DimensionMismatch { .. } => EXIT_DIMENSION,
            Error::InvalidImage(_)
            | Error::UnsupportedFormat(_)
            | Error::Truncated(_)
            | Error::DimensionOverflow { .. }
            | Error::Malformed(_)
            | Error::Io(_)
            | Error::Report(_) => EXIT_IO,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        Error::Io(err).into()
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Downscale(args) => run_downscale(&args),
        Command::Compare(args) => run_compare(&args),
        Command::Bench(args) => run_bench_cmd(&args),
        Command::Diagnose(args) => run_diagnose(&args),
    }
}

/// key=value lines on stdout unless quiet.
struct Emitter {
    quiet: bool,
}

impl Emitter {
    fn kv(&self, key: &str, value: impl fmt::Display) {
        if !self.quiet {
            println!("{key}={value}");
        }
    }
}

fn params(args: &CommonArgs) -> CliResult<DownscaleParams> {
    let params = DownscaleParams::new(args.factor)
        .with_radius(args.radius.unwrap_or(args.factor))
        .with_sigma(args.sigma)
        .with_mode(args.mode)
        .with_fallback(args.fallback);
    if args.method == Method::Cooc {
        params.validate()?;
    } else if args.factor < 2 {
        return Err(CliError::config(format!(
            "downscale factor must be at least 2, got {}",
            args.factor
        )));
    }
    Ok(params)
}

fn require<'a>(path: &'a Option<PathBuf>, flag: &str) -> CliResult<&'a Path> {
    path.as_deref()
        .ok_or_else(|| CliError::config(format!("missing required option {flag}")))
}

fn load_raw(args: &CommonArgs, out: &Emitter) -> CliResult<RasterImage> {
    let path = require(&args.input, "--input")?;
    let img = load_image(path, None)?;
    out.kv("input", path.display());
    out.kv("input_width", img.width());
    out.kv("input_height", img.height());
    out.kv("channels", img.channels());
    Ok(img)
}

/// Loads the input and applies the divisibility policy.
fn load_input(args: &CommonArgs, out: &Emitter) -> CliResult<RasterImage> {
    let img = load_raw(args, out)?;
    let divisible = img.width() % args.factor == 0 && img.height() % args.factor == 0;
    if divisible {
        return Ok(img);
    }
    if !args.crop {
        return Err(Error::NotDivisible {
            width: img.width(),
            height: img.height(),
            factor: args.factor,
        }
        .into());
    }
    let cropped = img.center_crop_to_multiple(args.factor)?;
    out.kv("cropped_width", cropped.width());
    out.kv("cropped_height", cropped.height());
    Ok(cropped)
}

fn output_format(path: &Path, channels: usize) -> CliResult<ImageFormat> {
    ImageFormat::from_path(path, channels).ok_or_else(|| {
        CliError::config(format!(
            "cannot infer an image format from '{}' (use .png, .pgm, .ppm or .pnm)",
            path.display()
        ))
    })
}

fn run_downscale(args: &CommonArgs) -> CliResult<()> {
    let out = Emitter { quiet: args.quiet };
    let params = params(args)?;
    let output = require(&args.output, "--output")?;
    let format = output_format(output, 3)?;
    let img = load_input(args, &out)?;
    if matches!(format, ImageFormat::PgmAscii | ImageFormat::PgmBinary) && img.channels() == 3 {
        return Err(Error::ChannelFormatMismatch {
            channels: 3,
            format: format.name(),
        }
        .into());
    }

    let start = Instant::now();
    let result = args.method.downscale(&img, &params)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    save_image(&result, output, output_format(output, result.channels())?)?;

    out.kv("method", args.method);
    out.kv("factor", params.factor);
    if args.method == Method::Cooc {
        out.kv("radius", params.radius);
        out.kv("sigma", params.sigma);
        out.kv("mode", params.mode);
        out.kv("fallback", params.fallback);
    }
    out.kv("output", output.display());
    out.kv("output_width", result.width());
    out.kv("output_height", result.height());
    out.kv("elapsed_ms", format!("{elapsed:.3}"));
    Ok(())
}

fn write_report(report: &QualityReport, path: &Path) -> CliResult<()> {
    let mut file = BufWriter::new(File::create(path)?);
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        report.write_json(&mut file)?;
    } else {
        report.write_csv(&mut file)?;
    }
    file.flush()?;
    Ok(())
}

fn run_compare(args: &CommonArgs) -> CliResult<()> {
    let out = Emitter { quiet: args.quiet };
    let params = DownscaleParams::new(args.factor)
        .with_radius(args.radius.unwrap_or(args.factor))
        .with_sigma(args.sigma)
        .with_mode(args.mode)
        .with_fallback(args.fallback);
    params.validate()?;
    let dir = require(&args.output, "--output")?;
    let img = load_input(args, &out)?;
    fs::create_dir_all(dir)?;

    let input = args.input.as_deref().expect("checked by load_input");
    let ext = input
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .filter(|e| ImageFormat::from_path(Path::new(&format!("x.{e}")), img.channels()).is_some())
        .unwrap_or_else(|| "png".to_string());

    let comparison = compare_methods(&img, &params)?;
    for (method, result) in &comparison.outputs {
        let path = dir.join(format!("{method}.{ext}"));
        save_image(result, &path, output_format(&path, result.channels())?)?;
    }
    match &args.report {
        Some(path) => {
            write_report(&comparison.report, path)?;
            out.kv("report", path.display());
        }
        None => {
            for name in ["report.csv", "report.json"] {
                let path = dir.join(name);
                write_report(&comparison.report, &path)?;
                out.kv("report", path.display());
            }
        }
    }
    out.kv("factor", params.factor);
    out.kv("radius", params.radius);
    for row in &comparison.report.rows {
        out.kv(&format!("{}.output_width", row.method), row.width);
        out.kv(&format!("{}.output_height", row.method), row.height);
        out.kv(&format!("{}.time_ms", row.method), format!("{:.3}", row.time_ms));
        out.kv(&format!("{}.gradient_energy", row.method), row.gradient_energy);
        if let Some(db) = row.psnr_db {
            out.kv(&format!("{}.psnr_db", row.method), db);
        }
    }
    Ok(())
}

fn run_bench_cmd(args: &BenchArgs) -> CliResult<()> {
    let config = BenchConfig {
        sizes: args.sizes.clone(),
        radii: if args.radii.is_empty() {
            vec![args.factor]
        } else {
            args.radii.clone()
        },
        factor: args.factor,
        sigma: args.sigma,
        repeats: args.repeats,
        seed: args.seed,
    };
    let rows = run_bench(&config)?;
    match &args.report {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            write_bench_csv(&rows, &mut file)?;
            file.flush()?;
            let out = Emitter { quiet: args.quiet };
            out.kv("report", path.display());
            for row in &rows {
                let key = format!("{}x{}.k{}", row.width, row.height, row.radius);
                out.kv(&format!("{key}.learn_ms"), format!("{:.3}", row.learn_ms));
                out.kv(&format!("{key}.filter_ms"), format!("{:.3}", row.filter_ms));
                out.kv(&format!("{key}.total_ms"), format!("{:.3}", row.total_ms));
            }
        }
        None => write_bench_csv(&rows, io::stdout().lock())?,
    }
    Ok(())
}

fn run_diagnose(args: &CommonArgs) -> CliResult<()> {
    let out = Emitter { quiet: args.quiet };
    let radius = args.radius.unwrap_or(args.factor);
    let dir = require(&args.output, "--output")?;
    let guide_params = match args.mode {
        CoocMode::InputPairs => None,
        CoocMode::GuideIndexed => Some(GuideParams::new(args.factor, args.sigma)?),
    };
    if radius < 1 {
        return Err(CliError::config("radius must be at least 1"));
    }
    // only the guide-indexed table needs a divisible image
    let img = match guide_params {
        Some(_) => load_input(args, &out)?,
        None => load_raw(args, &out)?,
    };
    fs::create_dir_all(dir)?;
    out.kv("radius", radius);
    out.kv("mode", args.mode);

    for (ch, plane) in img.planes().iter().enumerate() {
        let guide = guide_params.map(|g| build_guide(plane, g)).transpose()?;
        let cooc = learn_cooccurrence(plane, radius, args.mode, guide.as_ref())?;
        let report = kernel_diagnostics(&cooc);
        let suffix = if img.channels() == 1 {
            String::new()
        } else {
            format!("_c{ch}")
        };

        let counts_path = dir.join(format!("counts{suffix}.txt"));
        let mut file = BufWriter::new(File::create(&counts_path)?);
        write_counts(&cooc, &mut file)?;
        file.flush()?;

        let heatmap_path = dir.join(format!("heatmap{suffix}.pgm"));
        save_image(&RasterImage::gray(heatmap(&cooc)), &heatmap_path, ImageFormat::PgmBinary)?;

        let report_path = match (&args.report, img.channels()) {
            (Some(path), 1) => path.clone(),
            _ => dir.join(format!("kernel_report{suffix}.json")),
        };
        fs::write(&report_path, report.to_json()?)?;

        let prefix = if suffix.is_empty() {
            String::new()
        } else {
            format!("c{ch}.")
        };
        out.kv(&format!("{prefix}counts"), counts_path.display());
        out.kv(&format!("{prefix}heatmap"), heatmap_path.display());
        out.kv(&format!("{prefix}report"), report_path.display());
        out.kv(&format!("{prefix}positivity"), report.positivity);
        out.kv(&format!("{prefix}symmetry_deviation"), report.symmetry_deviation);
        out.kv(&format!("{prefix}min_eigenvalue"), report.min_eigenvalue);
        out.kv(
            &format!("{prefix}cauchy_schwarz_violation_fraction"),
            report.cauchy_schwarz_violation_fraction,
        );
        out.kv(&format!("{prefix}occupied_levels"), report.occupied_levels);
    }
    Ok(())
}
