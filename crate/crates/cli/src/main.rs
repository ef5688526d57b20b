mod manifest;

use std::env;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use fdmap::datasets::{
    gen_cauchy, gen_moons_functional, gen_phoneme_like, gen_swiss_roll_functional, phoneme_class_counts,
    CauchyConfig, RollScaling, SwissRollConfig,
};
use fdmap::diffusion::{diffusion_map, functional_diffusion_map, DiffusionParams, Truncation};
use fdmap::fdata::{smooth_to_basis, BasisSystem, FunctionalDataset, SamplingGrid};
use fdmap::fpca::fpca;
use fdmap::gridsearch::{run_grid, SearchSpace};
use fdmap::io::{load_dataset, save_basis_json, save_curves_csv};
use fdmap::isomap::{isomap, IsomapParams};
use fdmap::kernels::{KernelFamily, KernelSpec};
use fdmap::score::Scorer;
use fdmap::{Error, Method};
use log::info;
use serde::Serialize;

use manifest::{manifest_path, Manifest};

/// Functional diffusion maps, FPCA and Isomap for curve data.
#[derive(Debug, Parser)]
#[command(name = "fdmap", version, about)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic dataset.
    Generate(GenerateArgs),
    /// Embed a dataset with one method.
    Embed(EmbedArgs),
    /// Sweep hyperparameters and rank the embeddings.
    Gridsearch(GridArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum DatasetName {
    Cauchy,
    Moons,
    Swissroll,
    PhonemeLike,
}

#[derive(Debug, Args, Serialize)]
struct GenerateArgs {
    #[arg(value_enum)]
    dataset: DatasetName,
    /// Number of curves (default 50 for cauchy, 200 for moons, 300 otherwise).
    #[arg(long)]
    n: Option<usize>,
    /// Gaussian noise s.d. (moons, swissroll).
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cauchy scale parameter.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Coefficient scaling for swissroll: standardized or raw.
    #[arg(long, default_value = "standardized")]
    scaling: RollScaling,
    /// Sample basis datasets on this many uniform points and write CSV.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct Preprocess {
    /// Keep only the first M sample points.
    #[arg(long, value_name = "M")]
    truncate: Option<usize>,
    /// Smooth sampled curves onto K B-spline functions.
    #[arg(long, value_name = "K")]
    bspline: Option<usize>,
    /// B-spline order (degree + 1).
    #[arg(long, default_value_t = 4)]
    order: usize,
}

#[derive(Debug, Args, Serialize)]
struct EmbedArgs {
    /// fdm, dm, fpca or isomap.
    method: Method,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "gaussian")]
    kernel: KernelFamily,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Diffusion time T.
    #[arg(long, default_value_t = 1)]
    steps: u32,
    /// Embedding dimension (default 2).
    #[arg(long, conflicts_with = "delta")]
    dim: Option<usize>,
    /// Keep diffusion coordinates with λ^T above delta times λ_1^T.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    neighbors: Option<usize>,
    #[command(flatten)]
    prep: Preprocess,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("grid").required(true).args(["space", "preset"])))]
struct GridArgs {
    #[arg(long)]
    data: PathBuf,
    /// JSON search space file.
    #[arg(long)]
    space: Option<PathBuf>,
    /// Built-in space: cauchy, toy or isomap.
    #[arg(long)]
    preset: Option<String>,
    /// Override the method named in the space.
    #[arg(long)]
    method: Option<Method>,
    /// silhouette, knn or spearman (default depends on the labels).
    #[arg(long)]
    scorer: Option<Scorer>,
    #[command(flatten)]
    prep: Preprocess,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Lib(e) => match e {
                Error::InvalidParameter(_) | Error::InvalidBandwidth(_) | Error::Dimension(_) => 1,
                Error::InvalidGrid(_)
                | Error::RepresentationMismatch(_)
                | Error::ScorerMismatch(_)
                | Error::InvalidData(_)
                | Error::Parse { .. }
                | Error::Io(_)
                | Error::Json(_)
                | Error::Csv(_) => 2,
                Error::SingularFit { .. }
                | Error::DisconnectedGraph { .. }
                | Error::ZeroDegree { .. }
                | Error::NonInvertibleMetric { .. }
                | Error::NumericFailure(_) => 3,
            },
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn out_path(explicit: &Option<PathBuf>, default_name: &str) -> CliResult<PathBuf> {
    let path = match explicit {
        Some(p) => p.clone(),
        None => env::var_os("FDMAP_OUT_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."))
            .join(default_name),
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(path)
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn generate(args: &GenerateArgs) -> CliResult<()> {
    let mut manifest = Manifest::start("generate", args);
    let ds: FunctionalDataset = match args.dataset {
        DatasetName::Cauchy => {
            let n = args.n.unwrap_or(50);
            let cfg = CauchyConfig {
                gamma: args.gamma,
                ..CauchyConfig::default()
            };
            if n == 0 || !n.is_multiple_of(cfg.amplitudes.len()) {
                return Err(CliError::Usage(format!(
                    "--n for cauchy must be a positive multiple of {}, got {n}",
                    cfg.amplitudes.len()
                )));
            }
            let cfg = CauchyConfig {
                n_per_class: n / cfg.amplitudes.len(),
                ..cfg
            };
            gen_cauchy(&cfg)?.into()
        }
        DatasetName::Moons => gen_moons_functional(args.n.unwrap_or(200), args.noise, args.seed)?.into(),
        DatasetName::Swissroll => gen_swiss_roll_functional(&SwissRollConfig {
            n: args.n.unwrap_or(300),
            noise: args.noise,
            seed: args.seed,
            scaling: args.scaling,
        })?
        .into(),
        DatasetName::PhonemeLike => gen_phoneme_like(&phoneme_class_counts(args.n.unwrap_or(300)), args.seed)?.into(),
    };

    let default_name = match (&ds, args.points) {
        (FunctionalDataset::Basis(_), None) => format!("{}.json", args.dataset.to_possible_value().unwrap().get_name()),
        _ => format!("{}.csv", args.dataset.to_possible_value().unwrap().get_name()),
    };
    let out = out_path(&args.out, &default_name)?;
    match ds {
        FunctionalDataset::Basis(b) if is_json(&out) => {
            if args.points.is_some() {
                return Err(CliError::Usage("--points needs a .csv output".into()));
            }
            save_basis_json(&b, &out)?;
        }
        FunctionalDataset::Basis(b) => {
            let (lo, hi) = b.basis().domain();
            let sampled = b.sample(&SamplingGrid::uniform(lo, hi, args.points.unwrap_or(200))?)?;
            save_curves_csv(&sampled, &out)?;
            manifest.output(&fdmap::io::sidecar_path(&out));
        }
        FunctionalDataset::Discretized(d) => {
            if is_json(&out) {
                return Err(CliError::Usage(format!(
                    "{} is sampled data; write it to a .csv file",
                    args.dataset.to_possible_value().unwrap().get_name()
                )));
            }
            save_curves_csv(&d, &out)?;
            manifest.output(&fdmap::io::sidecar_path(&out));
        }
    }
    manifest.output(&out);
    manifest.finish(&manifest_path(&out))?;
    println!("wrote {}", out.display());
    Ok(())
}

/// Load `path` and apply truncation and B-spline smoothing.
fn prepare(path: &Path, prep: &Preprocess) -> CliResult<FunctionalDataset> {
    let mut ds = load_dataset(path)?;
    if let Some(m) = prep.truncate {
        let FunctionalDataset::Discretized(d) = &ds else {
            return Err(CliError::Usage("--truncate applies to sampled (CSV) data only".into()));
        };
        ds = d.truncate(m)?.into();
    }
    if let Some(k) = prep.bspline {
        let FunctionalDataset::Discretized(d) = &ds else {
            return Err(CliError::Usage("--bspline applies to sampled (CSV) data only".into()));
        };
        let basis = BasisSystem::bspline((d.grid().start(), d.grid().end()), prep.order, k)?;
        ds = smooth_to_basis(d, &basis)?.into();
    }
    info!("loaded {}", ds.describe());
    Ok(ds)
}

fn embed(args: &EmbedArgs) -> CliResult<()> {
    let mut manifest = Manifest::start("embed", args);
    manifest.input(&args.data);
    let ds = prepare(&args.data, &args.prep)?;
    let dim = args.dim.unwrap_or(2);
    if args.delta.is_some() && !matches!(args.method, Method::Fdm | Method::Dm) {
        return Err(CliError::Usage("--delta applies to fdm and dm only".into()));
    }

    let embedding = match args.method {
        Method::Fdm | Method::Dm => {
            let sigma = args
                .sigma
                .ok_or_else(|| CliError::Usage(format!("{} needs --sigma (and optionally --kernel, --alpha, --steps)", args.method)))?;
            let spec = KernelSpec::new(args.kernel, sigma)?;
            let truncation = match args.delta {
                Some(d) => Truncation::Precision(d),
                None => Truncation::Dimension(dim),
            };
            let params = DiffusionParams::new(args.alpha, args.steps, truncation)?;
            let fit = if args.method == Method::Fdm {
                functional_diffusion_map(&ds, &spec, &params)?
            } else {
                diffusion_map(&ds, &spec, &params)?
            };
            manifest.result("dim", fit.dim);
            manifest.result("lambda0", fit.model.lambda0());
            manifest.result("spectrum", fit.model.eigenvalues());
            fit.embedding
        }
        Method::Fpca => {
            let model = fpca(&ds, dim)?;
            manifest.result("explained", model.explained());
            model.embed(&ds)?
        }
        Method::Isomap => {
            let k = args
                .neighbors
                .ok_or_else(|| CliError::Usage("isomap needs --neighbors".into()))?;
            let fit = isomap(&ds, &IsomapParams::new(k, dim)?)?;
            manifest.result("stress", fit.stress);
            fit.embedding
        }
    };
    manifest.result("eigenvalues", embedding.eigenvalues());
    manifest.result("n_points", embedding.n_points());

    let out = out_path(&args.out, &format!("{}_embedding.csv", args.method))?;
    embedding.write_csv(BufWriter::new(File::create(&out)?))?;
    manifest.output(&out);
    manifest.finish(&manifest_path(&out))?;
    println!("wrote {} ({} x {})", out.display(), embedding.n_points(), embedding.dim());
    Ok(())
}

#[derive(Serialize)]
struct Timing {
    rank: usize,
    index: usize,
    seconds: f64,
}

fn gridsearch(args: &GridArgs) -> CliResult<()> {
    let mut manifest = Manifest::start("gridsearch", args);
    manifest.input(&args.data);
    let mut space = match (&args.space, &args.preset) {
        (Some(path), _) => {
            manifest.input(path);
            SearchSpace::from_json(&fs::read_to_string(path)?)?
        }
        (None, Some(name)) => SearchSpace::preset(name)?,
        (None, None) => unreachable!("clap requires --space or --preset"),
    };
    if let Some(m) = args.method {
        space.method = m;
        space.validate()?;
    }
    manifest.result("space", &space);
    let ds = prepare(&args.data, &args.prep)?;
    let results = run_grid(&ds, &space, args.scorer)?;

    let failed = results.rows.iter().filter(|r| r.result.is_err()).count();
    let timings: Vec<Timing> = results
        .rows
        .iter()
        .map(|r| Timing {
            rank: r.rank,
            index: r.index,
            seconds: r.elapsed.as_secs_f64(),
        })
        .collect();
    manifest.result("scorer", results.scorer);
    manifest.result("configurations", results.rows.len());
    manifest.result("failed", failed);
    manifest.result("timings", timings);
    if let Some(best) = results.best() {
        manifest.result("best", best.config);
        manifest.result("best_score", best.result.as_ref().ok());
    }

    let out = out_path(&args.out, "gridsearch.csv")?;
    results.write_csv(BufWriter::new(File::create(&out)?))?;
    manifest.output(&out);
    manifest.finish(&manifest_path(&out))?;
    println!(
        "wrote {} ({} configurations, {failed} failed)",
        out.display(),
        results.rows.len()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();

    let outcome = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Embed(a) => embed(a),
        Command::Gridsearch(a) => gridsearch(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("error: {m}\n\nFor more information, try '--help'."),
                CliError::Lib(err) => eprintln!("error: {err}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
