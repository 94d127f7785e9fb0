//! Subcommand implementations.

use crate::config::{ConfigDocument, ConfigError, LogFormat};
use crate::export::{self, ExportError};
use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use svpn_core::control::AllocationMatrix;
use svpn_core::kinematics::{self, config_to_drive, config_to_pose, drive_to_config};
use svpn_core::sim::{run, run_batch};
use svpn_core::{CableLengths, CurvatureConfig, Scenario};

pub const OUT_DIR_ENV: &str = "SVPN_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "svpn", version, about = "Bendable-nozzle UAV simulator")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides SVPN_OUT_DIR and the config).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override the scenario RNG seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Override the integration step (s).
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<LogFormat>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write its log and metrics.
    Run { scenario: String },
    /// Load the configuration and print an invariant report.
    Validate,
    /// Run several scenarios concurrently (all known ones by default).
    Sweep { scenarios: Vec<String> },
    /// One-shot nozzle kinematics.
    Kin(KinArgs),
}

#[derive(Debug, Args)]
pub struct KinArgs {
    /// Cable lengths m1 m2 m3 (m).
    #[arg(long, num_args = 3, value_names = ["M1", "M2", "M3"], conflicts_with = "arc", required_unless_present = "arc")]
    pub cables: Option<Vec<f64>>,
    /// Bend and azimuth (deg).
    #[arg(long = "arc", num_args = 2, value_names = ["ALPHA_DEG", "BETA_DEG"])]
    pub arc: Option<Vec<f64>>,
    /// Nozzle index 1..4.
    #[arg(long, default_value_t = 1)]
    pub nozzle: usize,
    /// Arc length for --arc (m); the nozzle length by default.
    #[arg(long)]
    pub length: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] svpn_core::Error),
    #[error("{0}")]
    Export(#[from] ExportError),
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("{0}")]
    Usage(String),
    #[error("{failed} of {total} scenarios failed")]
    Batch { failed: usize, total: usize },
}

impl AppError {
    pub fn category(&self) -> &'static str {
        match self {
            AppError::Config(_) => "config",
            AppError::Core(e) => e.category(),
            AppError::Export(_) => "io",
            AppError::UnknownScenario(_) | AppError::Usage(_) => "usage",
            AppError::Batch { .. } => "batch",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "usage" => 2,
            "config" => 3,
            "io" => 4,
            "batch" => 5,
            "domain" => 10,
            "realizability" => 11,
            "singularity" => 12,
            "conditioning" => 13,
            "infeasible" => 14,
            "singular-config" => 15,
            "unreachable" => 16,
            "switch-rejected" => 17,
            "divergence" => 18,
            "scenario" => 19,
            _ => 1,
        }
    }
}

pub struct Context {
    pub doc: ConfigDocument,
    pub out_dir: PathBuf,
}

impl Context {
    pub fn new(cli: &Cli, err: &mut dyn Write) -> Result<Self, AppError> {
        let mut doc = match &cli.config {
            Some(p) => {
                let loaded = ConfigDocument::load(p)?;
                for n in &loaded.notices {
                    let _ = writeln!(err, "notice: {n}");
                }
                loaded.doc
            }
            None => ConfigDocument::default(),
        };
        if let Some(f) = cli.format {
            doc.output.format = f;
        }
        let out_dir = cli
            .out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| doc.output.dir.clone());
        Ok(Self { doc, out_dir })
    }

    fn scenario(&self, cli: &Cli, name: &str) -> Result<Scenario, AppError> {
        let mut s = self
            .doc
            .scenario(name)
            .ok_or_else(|| AppError::UnknownScenario(name.into()))?;
        if let Some(seed) = cli.seed {
            s.seed = seed;
        }
        if let Some(dt) = cli.dt {
            s.dt = dt;
        }
        Ok(s)
    }

    fn write_outputs(
        &self,
        scenario: &Scenario,
        log: &svpn_core::TrajectoryLog,
        metrics: &svpn_core::Metrics,
    ) -> Result<(PathBuf, PathBuf), AppError> {
        std::fs::create_dir_all(&self.out_dir).map_err(ExportError::from)?;
        let csv = self.out_dir.join(format!("{}.csv", scenario.name));
        let json = self.out_dir.join(format!("{}.metrics.json", scenario.name));
        match self.doc.output.format {
            LogFormat::Csv => export::export_log(log, self.doc.output.decimation, &csv)?,
        }
        export::export_metrics(&export::metrics_document(scenario, log, metrics), &json)?;
        Ok((csv, json))
    }
}

fn print_metrics(out: &mut dyn Write, m: &svpn_core::Metrics) -> std::io::Result<()> {
    writeln!(out, "  rmse_xyz_m = [{:.6}, {:.6}, {:.6}]", m.rmse[0], m.rmse[1], m.rmse[2])?;
    writeln!(out, "  max_position_error_m = {:.6}", m.max_position_error)?;
    writeln!(out, "  max_roll_deg = {:.4}", m.max_roll.to_degrees())?;
    writeln!(out, "  max_pitch_deg = {:.4}", m.max_pitch.to_degrees())?;
    writeln!(out, "  yaw_drift_deg = {:.4}", m.yaw_drift.to_degrees())?;
    writeln!(out, "  settling_time_s = {:.3}", m.settling_time)?;
    writeln!(out, "  mode_switches = {}", m.mode_switches)?;
    writeln!(out, "  switch_altitude_deviation_m = {:.6}", m.switch_altitude_deviation)?;
    writeln!(out, "  switch_attitude_deviation_deg = {:.4}", m.switch_attitude_deviation.to_degrees())?;
    writeln!(out, "  clamp_duty = {:.4}", m.clamp_duty)
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), AppError> {
    let ctx = Context::new(cli, err)?;
    let io = |e: std::io::Error| AppError::Export(e.into());
    match &cli.command {
        Command::Run { scenario } => {
            let s = ctx.scenario(cli, scenario)?;
            let (log, metrics) = run(&s, &ctx.doc.sim_options())?;
            let (csv, json) = ctx.write_outputs(&s, &log, &metrics)?;
            writeln!(out, "scenario {} ({} steps, seed {})", s.name, s.steps(), s.seed).map_err(io)?;
            print_metrics(out, &metrics).map_err(io)?;
            writeln!(out, "log: {}", csv.display()).map_err(io)?;
            writeln!(out, "metrics: {}", json.display()).map_err(io)?;
        }
        Command::Sweep { scenarios } => {
            let list: Vec<Scenario> = if scenarios.is_empty() {
                ctx.doc
                    .all_scenarios()
                    .into_iter()
                    .map(|s| ctx.scenario(cli, &s.name))
                    .collect::<Result<_, _>>()?
            } else {
                scenarios.iter().map(|n| ctx.scenario(cli, n)).collect::<Result<_, _>>()?
            };
            let results = run_batch(&list, &ctx.doc.sim_options());
            let mut failed = 0;
            for ((name, res), s) in results.iter().zip(&list) {
                match res {
                    Ok((log, m)) => {
                        ctx.write_outputs(s, log, m)?;
                        writeln!(
                            out,
                            "ok   {name}: max_err {:.5} m, rmse [{:.5}, {:.5}, {:.5}] m",
                            m.max_position_error, m.rmse[0], m.rmse[1], m.rmse[2]
                        )
                        .map_err(io)?;
                    }
                    Err(e) => {
                        failed += 1;
                        writeln!(out, "FAIL {name}: [{}] {e}", e.category()).map_err(io)?;
                    }
                }
            }
            if failed > 0 {
                return Err(AppError::Batch {
                    failed,
                    total: list.len(),
                });
            }
        }
        Command::Validate => validate(&ctx, out).map_err(io)??,
        Command::Kin(args) => kin(&ctx, args, out)?,
    }
    Ok(())
}

fn validate(ctx: &Context, out: &mut dyn Write) -> std::io::Result<Result<(), AppError>> {
    let p = &ctx.doc.vehicle;
    let alloc = match AllocationMatrix::build(p) {
        Ok(a) => a,
        Err(e) => return Ok(Err(e.into())),
    };
    let identity = (alloc.matrix() * alloc.pseudo_inverse() - svpn_core::nalgebra::SMatrix::<f64, 6, 6>::identity()).amax();
    writeln!(out, "rank(A) = {}", alloc.rank())?;
    writeln!(out, "cond(A) = {:.6}", alloc.condition_number())?;
    writeln!(out, "max|A A+ - I| = {identity:.3e}")?;
    writeln!(out, "hover omega = {:.3} rad/s", p.hover_speed())?;
    // dense sweep of the equivalent-lever error over (0, max_bend]
    let s = p.nozzle_length;
    let eq = p.equivalent_lever();
    let (mut vs_eq, mut vs_true) = (0.0f64, 0.0f64);
    for k in 1..=10_000 {
        let a = p.max_bend() * k as f64 / 10_000.0;
        let lever = svpn_core::dynamics::equivalent_lever(a, s).map_err(std::io::Error::other)?;
        vs_eq = vs_eq.max((lever - eq).abs() / eq);
        vs_true = vs_true.max((lever - eq).abs() / lever);
    }
    let lever = |a: f64| svpn_core::dynamics::equivalent_lever(a, s).map_err(std::io::Error::other);
    writeln!(out, "lever a(0+) = {:.4} s, a(max_bend) = {:.4} s", lever(1e-9)? / s, lever(p.max_bend())? / s)?;
    writeln!(
        out,
        "max lever error vs 0.5135 s = {:.5}% ({})",
        100.0 * vs_eq,
        if vs_eq < 0.027 { "within 2.7%" } else { "exceeds 2.7%" }
    )?;
    writeln!(
        out,
        "max lever error vs true lever = {:.5}% ({})",
        100.0 * vs_true,
        if vs_true < 0.027 { "within 2.7%" } else { "exceeds 2.7%" }
    )?;
    writeln!(out, "scenarios: {}", ctx.doc.all_scenarios().iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join(", "))?;
    if alloc.rank() != 6 || identity > 1e-10 {
        return Ok(Err(AppError::Core(svpn_core::Error::Conditioning { rcond: 0.0 })));
    }
    Ok(Ok(()))
}

fn kin(ctx: &Context, args: &KinArgs, out: &mut dyn Write) -> Result<(), AppError> {
    let p = &ctx.doc.vehicle;
    if !(1..=4).contains(&args.nozzle) {
        return Err(AppError::Usage(format!("nozzle must be 1..4, got {}", args.nozzle)));
    }
    let geom = p.nozzle_geometry(args.nozzle)?;
    let (config, cables) = match (&args.cables, &args.arc) {
        (Some(c), _) => {
            let cables = CableLengths::new(c[0], c[1], c[2]);
            (drive_to_config(&cables, &geom)?, cables)
        }
        (None, Some(a)) => {
            let len = args.length.unwrap_or(p.nozzle_length);
            let config = CurvatureConfig::new(a[0].to_radians(), a[1].to_radians(), len)?;
            (config, config_to_drive(&config, &geom)?)
        }
        (None, None) => return Err(AppError::Usage("give --cables or --arc".into())),
    };
    let pose = config_to_pose(&config);
    let dir = kinematics::thrust_direction(config.bend(), config.azimuth());
    let f = |v: f64| export::fmt_float(v);
    let io = |e: std::io::Error| AppError::Export(e.into());
    let t = pose.translation;
    writeln!(out, "nozzle = {}", args.nozzle).map_err(io)?;
    writeln!(out, "cables_m = [{}, {}, {}]", f(cables.m1), f(cables.m2), f(cables.m3)).map_err(io)?;
    writeln!(out, "alpha_deg = {}", f(config.bend().to_degrees())).map_err(io)?;
    writeln!(out, "beta_deg = {}", f(config.azimuth().to_degrees())).map_err(io)?;
    writeln!(out, "length_m = {}", f(config.length())).map_err(io)?;
    writeln!(out, "curvature_per_m = {}", f(config.curvature())).map_err(io)?;
    writeln!(out, "tip_m = [{}, {}, {}]", f(t.x), f(t.y), f(t.z)).map_err(io)?;
    writeln!(out, "thrust_dir = [{}, {}, {}]", f(dir.x), f(dir.y), f(dir.z)).map_err(io)?;
    for r in 0..3 {
        let row = pose.rotation.row(r);
        writeln!(out, "Q_row{} = [{}, {}, {}]", r + 1, f(row[0]), f(row[1]), f(row[2])).map_err(io)?;
    }
    Ok(())
}
