//! Command-line experiments over the metrivec probes.
//!
//! Every run resolves its configuration, executes one probe family and
//! writes the report once at the end: JSON (and CSV where a table
//! exists) with the full config, seed and artifact version embedded.
//! Identical configuration and seed produce byte-identical output.
//! Completed refuting runs exit 0; configuration and capability errors
//! exit nonzero.

use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use metrivec::atlas::{lebesgue_atlas, AtlasConfig};
use metrivec::calculus::ftc_check;
use metrivec::gallery::{self, adversary_partitions, AdversaryConfig, SmoothFn};
use metrivec::integration::{integrate, Integrand, IntegrateConfig};
use metrivec::oscillation::{
    darboux_probe, default_window_schedule, discontinuity_measure, oscillation_sum,
    pointwise_oscillation, OscSampler,
};
use metrivec::partitions::Partition;
use metrivec::point::Point;
use metrivec::report::{
    atlas_csv, convergence_csv, grid_csv, profiles_csv, to_json_pretty, Envelope,
};
use metrivec::spaces::{
    check_scaling_inequality, check_translation_invariance, default_lambda_grid, SamplerConfig,
    Space,
};

#[derive(Parser)]
#[command(name = "metrivec", version, about = "Riemann integration probes in metrizable vector spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Args)]
struct IoOpts {
    /// Output base path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct CommonOpts {
    /// Space grammar: euclidean:<n>, omega-sup:<M>, omega-sum:<M>,
    /// lp:<p>:<M>, linf:<M>, l1gamma. A missing trailing <M> is filled
    /// from --trunc.
    #[arg(long)]
    space: String,
    /// Function id: rationals:<Nmax>, digits:<K>, ratind, smooth:<name>.
    #[arg(long = "fn")]
    function: String,
    #[arg(long, default_value = "0")]
    a: String,
    #[arg(long, default_value = "1")]
    b: String,
    /// Probe seed.
    #[arg(long, env = "METRIVEC_SEED", default_value_t = 0)]
    seed: u64,
    /// Default truncation dimension M for shorthand space strings.
    #[arg(long, default_value_t = 64)]
    trunc: usize,
}

fn expand_space(s: &str, trunc: usize) -> String {
    let s = s.trim();
    match s {
        "omega-sup" | "omega-sum" | "linf" => format!("{s}:{trunc}"),
        _ if s.starts_with("lp:") && s.matches(':').count() == 1 => format!("{s}:{trunc}"),
        _ => s.to_string(),
    }
}

impl CommonOpts {
    fn space(&self) -> anyhow::Result<Space> {
        Ok(Space::from_str(&expand_space(&self.space, self.trunc))?)
    }

    fn function(&self, space: &Space) -> anyhow::Result<Box<dyn Integrand>> {
        let id = match self.function.trim() {
            "rationals" => "rationals:1000".to_string(),
            "digits" => "digits:24".to_string(),
            other => other.to_string(),
        };
        Ok(gallery::by_id(&id, space)?)
    }

    fn interval(&self) -> anyhow::Result<(Point, Point)> {
        let a = Point::parse(&self.a)?;
        let b = Point::parse(&self.b)?;
        if a.value() >= b.value() {
            bail!("need a < b, got [{a}, {b}]");
        }
        Ok((a, b))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sampled Riemann integral with Cauchy-criterion diagnostics.
    Integrate {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        io: IoOpts,
        /// Convergence tolerance ε.
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        /// Finest mesh width targeted by the schedule.
        #[arg(long)]
        mesh_min: Option<f64>,
        /// Number of mesh halvings.
        #[arg(long, default_value_t = 12)]
        mesh_levels: usize,
        /// Random taggings per level.
        #[arg(long, default_value_t = 8)]
        tag_samples: usize,
    },
    /// Pointwise oscillation profiles or a Darboux sum over a partition.
    Oscillate {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        io: IoOpts,
        /// Comma-separated points in the exact grammar (1/3, 0.25, ~0.7).
        #[arg(long, conflicts_with = "partition_n")]
        points: Option<String>,
        /// Darboux sum over the uniform partition with this many intervals.
        #[arg(long)]
        partition_n: Option<usize>,
        /// Sampled pairs per window or interval.
        #[arg(long, default_value_t = 8)]
        pairs: usize,
    },
    /// Darboux integrability probe along a refining schedule.
    Darboux {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        io: IoOpts,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Finest uniform level of the schedule (doubling from 8).
        #[arg(long, default_value_t = 4096)]
        max_level: usize,
        #[arg(long, default_value_t = 4)]
        pairs: usize,
    },
    /// Adversarial same-points tagging pair and its separation floor.
    Adversary {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        io: IoOpts,
        /// Oscillation threshold r of the targeted set E_r.
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Uniform partition size N.
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 1024)]
        measure_resolution: usize,
    },
    /// Fundamental-theorem residual for a smooth gallery function.
    Ftc {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        io: IoOpts,
        /// Right endpoint τ of the integration.
        #[arg(long, default_value = "1")]
        tau: String,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 10)]
        mesh_levels: usize,
        /// Run the optional continuity pre-probe on F'.
        #[arg(long, default_value_t = false)]
        preprobe: bool,
    },
    /// Translation-invariance and scaling-inequality probes of a space.
    Spacecheck {
        /// Space grammar string.
        #[arg(long)]
        space: String,
        #[arg(long, env = "METRIVEC_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 64)]
        trunc: usize,
        #[command(flatten)]
        io: IoOpts,
    },
    /// Full gallery × metric integrability landscape.
    Atlas {
        #[command(flatten)]
        io: IoOpts,
        #[arg(long, env = "METRIVEC_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 0.1)]
        r: f64,
        #[arg(long, default_value_t = 4096)]
        resolution: usize,
    },
    /// Discontinuity-set measure bracket at a threshold r.
    Measure {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        io: IoOpts,
        #[arg(long, default_value_t = 0.1)]
        r: f64,
        #[arg(long, default_value_t = 4096)]
        resolution: usize,
        #[arg(long, default_value_t = 4)]
        pairs: usize,
    },
}

fn emit(io: &IoOpts, json: String, csv: Option<String>) -> anyhow::Result<()> {
    match (io.format, &io.out) {
        (Format::Json, None) => print!("{json}"),
        (Format::Json, Some(path)) => {
            fs::write(path, json).with_context(|| format!("writing {}", path.display()))?
        }
        (Format::Csv, out) => {
            let csv = csv.context("this command has no CSV table")?;
            match out {
                None => print!("{csv}"),
                Some(path) => {
                    fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?
                }
            }
        }
        (Format::Both, None) => bail!("--format both needs --out"),
        (Format::Both, Some(path)) => {
            let csv = csv.context("this command has no CSV table")?;
            fs::write(path.with_extension("json"), json)?;
            fs::write(path.with_extension("csv"), csv)?;
        }
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Integrate { common, io, eps, mesh_min, mesh_levels, tag_samples } => {
            let space = common.space()?;
            let f = common.function(&space)?;
            let (a, b) = common.interval()?;
            let span = b.value() - a.value();
            let finest = mesh_min.unwrap_or(span / (2f64).powi(14));
            if finest <= 0.0 || mesh_levels == 0 {
                bail!("mesh schedule must be nonempty with positive mesh-min");
            }
            let finest_n = (span / finest).round().max(1.0) as usize;
            let start_div = (finest_n >> (mesh_levels - 1)).max(1);
            let cfg = IntegrateConfig {
                tolerance: eps,
                mesh_start_div: start_div,
                mesh_levels,
                tag_samples,
                seed: common.seed,
            };
            let report = integrate(f.as_ref(), a, b, &cfg)?;
            let csv = convergence_csv(&report.levels);
            let env = Envelope::new("integrate", &cfg, &report);
            emit(&io, to_json_pretty(&env)?, Some(csv))?;
        }
        Command::Oscillate { common, io, points, partition_n, pairs } => {
            let space = common.space()?;
            let f = common.function(&space)?;
            let (a, b) = common.interval()?;
            let sampler = OscSampler::new(pairs, common.seed);
            let mut profiles = Vec::new();
            match (points, partition_n) {
                (Some(list), None) => {
                    let windows = default_window_schedule(b.value() - a.value());
                    for s in list.split(',') {
                        let t = Point::parse(s)?;
                        profiles.push(pointwise_oscillation(f.as_ref(), a, b, t, &windows, sampler)?);
                    }
                }
                (None, Some(n)) => {
                    let partition = Partition::uniform(a, b, n)?;
                    profiles.push(oscillation_sum(f.as_ref(), &partition, sampler)?);
                }
                _ => bail!("pass exactly one of --points or --partition-n"),
            }
            let csv = profiles_csv(&profiles);
            let env = Envelope::new("oscillate", &sampler, &profiles);
            emit(&io, to_json_pretty(&env)?, Some(csv))?;
        }
        Command::Darboux { common, io, eps, max_level, pairs } => {
            let space = common.space()?;
            let f = common.function(&space)?;
            let (a, b) = common.interval()?;
            let mut schedule = vec![8usize.min(max_level.max(1))];
            while *schedule.last().unwrap() < max_level {
                schedule.push((schedule.last().unwrap() * 2).min(max_level));
            }
            let sampler = OscSampler::new(pairs, common.seed);
            let report = darboux_probe(f.as_ref(), a, b, &schedule, eps, sampler)?;
            let csv = {
                let mut s = String::from("level,estimate\n");
                for (n, e) in schedule.iter().zip(&report.trace) {
                    s.push_str(&format!("{n},{e}\n"));
                }
                s
            };
            let env = Envelope::new("darboux", &sampler, &report);
            emit(&io, to_json_pretty(&env)?, Some(csv))?;
        }
        Command::Adversary { common, io, r, n, measure_resolution } => {
            let space = common.space()?;
            let f = common.function(&space)?;
            let cfg = AdversaryConfig { r, n, measure_resolution, seed: common.seed };
            let result = adversary_partitions(f.as_ref(), &cfg)?;
            let env = Envelope::new("adversary", &cfg, &result);
            emit(&io, to_json_pretty(&env)?, None)?;
        }
        Command::Ftc { common, io, tau, eps, mesh_levels, preprobe } => {
            let space = common.space()?;
            let name = common
                .function
                .strip_prefix("smooth:")
                .context("ftc needs a smooth gallery function (smooth:<name>)")?;
            let smooth = SmoothFn::named(name, space)?;
            let derivative = smooth.derivative_fn();
            let (a, _) = common.interval()?;
            let tau = Point::parse(&tau)?;
            let cfg = IntegrateConfig {
                tolerance: eps,
                mesh_levels,
                seed: common.seed,
                ..Default::default()
            };
            let big_f = |t: Point| -> metrivec::Result<_> { Ok(smooth.eval(t)) };
            let report = ftc_check(&big_f, &derivative, a, tau, &cfg, preprobe)?;
            let csv = convergence_csv(&report.integration.levels);
            let env = Envelope::new("ftc", &cfg, &report);
            emit(&io, to_json_pretty(&env)?, Some(csv))?;
        }
        Command::Spacecheck { space, seed, samples, trunc, io } => {
            let space = Space::from_str(&expand_space(&space, trunc))?;
            let cfg = SamplerConfig::new(samples, seed);
            let translation = check_translation_invariance(&space, cfg);
            let scaling = check_scaling_inequality(&space, cfg, &default_lambda_grid())?;
            let report = serde_json::json!({
                "space": space.to_string(),
                "translation_invariance": translation,
                "scaling_inequality": scaling,
                "declared_scaling_flag": space.scaling_flag(),
            });
            let env = Envelope::new("spacecheck", &cfg, &report);
            emit(&io, to_json_pretty(&env)?, None)?;
        }
        Command::Atlas { io, seed, eps, r, resolution } => {
            let cfg = AtlasConfig { epsilon: eps, r, resolution, seed, ..Default::default() };
            let report = lebesgue_atlas(&cfg)?;
            let csv = atlas_csv(&report.cells);
            let env = Envelope::new("atlas", &cfg, &report);
            emit(&io, to_json_pretty(&env)?, Some(csv))?;
        }
        Command::Measure { common, io, r, resolution, pairs } => {
            let space = common.space()?;
            let f = common.function(&space)?;
            let (a, b) = common.interval()?;
            let sampler = OscSampler::new(pairs, common.seed);
            let (estimate, rows) = discontinuity_measure(f.as_ref(), a, b, r, resolution, sampler)?;
            let csv = grid_csv(&rows);
            let env = Envelope::new("measure", &sampler, &estimate);
            emit(&io, to_json_pretty(&env)?, Some(csv))?;
        }
    }
    Ok(())
}
