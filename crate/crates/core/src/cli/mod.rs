//! The `persuade` command-line front end.
//!
//! Every command produces a JSON envelope `{command, config, result}` and a
//! flat CSV table. [`run`] does the work without touching the process, so the
//! same entry point serves the binary and the tests.
//!
//! Exit codes: `0` success, `1` internal error, `2` invalid input,
//! `3` enumeration cap exceeded, `4` dynamics did not converge,
//! `5` the profile is not an equilibrium.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::certify::{
    grid_game_parameters, certify_poa, discretized_certify, golden_parameters, warmup_certify,
    CertParams, CertificateCase, PoACertificate, WarmupOutcome,
};
use crate::equilibria::{
    bernoulli_equilibrium_scheme, bernoulli_equilibrium_scheme_on_cells,
    bernoulli_equilibrium_welfare, best_response_dynamics, grain_aligned_boundaries,
    poa_lower_bound, regret_report, BernoulliEqSpec, BrMode, DiscretizationSpec, DynamicsConfig,
    DEFAULT_RESTARTS,
};
use crate::io::{self, InstanceJson, ProfileJson};
use crate::mc::McConfig;
use crate::model::{
    contributions, expected_utility, expected_welfare, first_best, win_probabilities, EvalMode,
    Estimate, Instance, Prior, StrategyProfile, UtilityFn,
};
use crate::noisy::{noisy_bound, noisy_expected_utility, noisy_expected_welfare, NoiseSpec};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;
pub const EXIT_NOT_NE: i32 = 5;

#[derive(Debug, Parser, Serialize)]
#[command(name = "persuade", version, about = "Competitive Bayesian persuasion: equilibria, welfare and price-of-anarchy certificates")]
pub struct Cli {
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write the CSV table here.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Generate an instance file.
    Gen {
        #[command(subcommand)]
        preset: GenPreset,
    },
    /// Expected first-best welfare (full information).
    FirstBest(FirstBestArgs),
    /// Expected welfare, utilities and win probabilities of a profile.
    Welfare(WelfareArgs),
    /// Compute an equilibrium.
    Equilibrium {
        #[command(subcommand)]
        kind: EquilibriumKind,
    },
    /// Check a profile for profitable grain deviations.
    VerifyNe(VerifyArgs),
    /// Build a price-of-anarchy certificate for a profile.
    Certify {
        #[command(subcommand)]
        kind: CertifyKind,
    },
    /// Welfare and utilities under multiplicative observation noise.
    Noisy(NoisyArgs),
    /// Lower-bound surface of the symmetric Bernoulli equilibrium.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UtilityFamily {
    /// `u(v) = 1`.
    Constant,
    /// `u(v) = v`.
    Linear,
    /// Random increasing piecewise-linear utility.
    RandomMonotone,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenPreset {
    /// `N` i.i.d. Bernoulli(ζ) agents with constant utility.
    Bernoulli {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        zeta: f64,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Random finite priors.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Atoms per prior.
        #[arg(long, default_value_t = 3)]
        support: usize,
        /// Put every atom mass on this grid.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum, default_value_t = UtilityFamily::Constant)]
        utility: UtilityFamily,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bernoulli instance shifted left so its equilibrium welfare equals
    /// `--target`; values leave `[0, 1]`.
    NegativeShift {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        zeta: f64,
        /// Grain size of the discretized equilibrium.
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Equilibrium welfare after the shift.
        #[arg(long)]
        target: f64,
        /// Write the equilibrium profile here.
        #[arg(long)]
        profile_out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Exact,
    Mc,
    Auto,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl EvalArgs {
    fn mode(&self) -> EvalMode {
        let mc = McConfig::new(self.samples, self.seed);
        match self.mode {
            ModeArg::Exact => EvalMode::Exact,
            ModeArg::Mc => EvalMode::MonteCarlo(mc),
            ModeArg::Auto => EvalMode::Auto(mc),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BrArg {
    Exhaustive,
    Local,
    Auto,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct BrArgs {
    /// Best-response search.
    #[arg(long, value_enum, default_value_t = BrArg::Exhaustive)]
    pub br: BrArg,
    /// Local-search seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
}

impl BrArgs {
    fn mode(&self) -> BrMode {
        let (seed, restarts) = (self.seed, self.restarts);
        match self.br {
            BrArg::Exhaustive => BrMode::Exhaustive,
            BrArg::Local => BrMode::LocalSearch { seed, restarts },
            BrArg::Auto => BrMode::Auto { seed, restarts },
        }
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct FirstBestArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub eval: EvalArgs,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct WelfareArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub profile: PathBuf,
    #[command(flatten)]
    pub eval: EvalArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitProfile {
    Pooling,
    FullRevelation,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumKind {
    /// Closed-form symmetric equilibrium of i.i.d. Bernoulli agents.
    Bernoulli {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        zeta: f64,
        /// Equal cells on `[0, N·ζ]`.
        #[arg(long, default_value_t = 10)]
        grid: usize,
        /// Use cells aligned with every mean reachable by this grain size
        /// instead of equal cells.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        instance_out: Option<PathBuf>,
        #[arg(long)]
        profile_out: Option<PathBuf>,
    },
    /// Round-robin best-response dynamics in the grain game.
    Brd {
        #[arg(long)]
        instance: PathBuf,
        /// Start here instead of `--init`.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = InitProfile::FullRevelation)]
        init: InitProfile,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 100)]
        max_rounds: usize,
        /// Minimum gain that triggers a switch.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        br: BrArgs,
        #[arg(long)]
        profile_out: Option<PathBuf>,
    },
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    /// Regret tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    pub br: BrArgs,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertifyKind {
    /// Two-case certificate for arbitrary instances.
    General {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        /// `golden`, `appendix-a`, or a JSON file `{alpha, beta, tau, phi}`.
        #[arg(long, default_value = "golden")]
        params: String,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Single-winner certificate for identical priors and constant utility.
    Warmup {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        profile: PathBuf,
    },
    /// Certificate for the grain game.
    Discretized {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value = "appendix-a")]
        params: String,
        #[command(flatten)]
        eval: EvalArgs,
    },
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct NoisyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long)]
    pub eta: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct SweepArgs {
    /// Agent counts.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    pub ns: Vec<usize>,
    /// Prior success probabilities.
    #[arg(long = "zeta", value_delimiter = ',', required = true)]
    pub zetas: Vec<f64>,
    /// Also measure the ratio of the equal-cell discretized equilibrium.
    #[arg(long)]
    pub measured: bool,
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
}

/// Everything a command produced.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    /// Pretty-printed JSON envelope.
    pub json: String,
    /// CSV header plus one row per result.
    pub csv: String,
    pub exit_code: i32,
    /// Messages for stderr.
    pub warnings: Vec<String>,
}

/// Exit code for a library error.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::InternalInvariant(_) => EXIT_INTERNAL,
        _ => EXIT_INVALID,
    }
}

/// Runs a parsed command and writes `--out`, `--csv` and side files.
pub fn run(cli: &Cli) -> Result<RunOutput> {
    let mut ctx = Ctx::default();
    let (name, result, csv) = dispatch(&cli.command, &mut ctx)?;
    let json = if let Some(raw) = ctx.raw_json.take() {
        raw
    } else {
        let envelope = json!({
            "command": name,
            "config": serde_json::to_value(&cli.command)?,
            "result": result,
        });
        serde_json::to_string_pretty(&envelope)? + "\n"
    };
    if let Some(path) = &cli.out {
        std::fs::write(path, &json)?;
    }
    if let Some(path) = &cli.csv {
        std::fs::write(path, &csv)?;
    }
    Ok(RunOutput {
        json,
        csv,
        exit_code: ctx.exit_code,
        warnings: ctx.warnings,
    })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from_args<I, T>(args: I) -> std::result::Result<RunOutput, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    Ok(run(&cli).unwrap_or_else(|e| RunOutput {
        json: String::new(),
        csv: String::new(),
        exit_code: exit_code_for(&e),
        warnings: vec![format!("error: {e}")],
    }))
}

#[derive(Default)]
struct Ctx {
    exit_code: i32,
    warnings: Vec<String>,
    /// Replaces the envelope (instance files must stay loadable).
    raw_json: Option<String>,
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<(&'static str, Value, String)> {
    match cmd {
        Command::Gen { preset } => cmd_gen(preset, cmd, ctx),
        Command::FirstBest(a) => cmd_first_best(a),
        Command::Welfare(a) => cmd_welfare(a),
        Command::Equilibrium { kind } => cmd_equilibrium(kind, ctx),
        Command::VerifyNe(a) => cmd_verify_ne(a, ctx),
        Command::Certify { kind } => cmd_certify(kind, ctx),
        Command::Noisy(a) => cmd_noisy(a),
        Command::Sweep(a) => cmd_sweep(a, ctx),
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    io::read_instance(path, false)
}

fn load_profile(path: &Path, instance: &Instance) -> Result<StrategyProfile> {
    io::read_profile(path, instance)
}

fn load_params(spec: &str) -> Result<CertParams> {
    match spec {
        "golden" => Ok(golden_parameters()),
        "appendix-a" => Ok(grid_game_parameters()),
        path => {
            let p: CertParams = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            CertParams::new(p.alpha, p.beta, p.tau, p.phi)
        }
    }
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn num(x: f64) -> String {
    x.to_string()
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn to_value<T: Serialize>(t: &T) -> Result<Value> {
    Ok(serde_json::to_value(t)?)
}

fn profile_value(profile: &StrategyProfile) -> Result<Value> {
    to_value(&ProfileJson::from_profile(profile))
}

fn random_instance(
    n: usize,
    k: usize,
    support: usize,
    epsilon: Option<f64>,
    family: UtilityFamily,
    seed: u64,
) -> Result<Instance> {
    if support == 0 {
        return Err(Error::SpecViolation("support must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grains = match epsilon {
        Some(eps) => {
            let t = (1.0 / eps).round();
            if !(eps > 0.0) || (t * eps - 1.0).abs() > 1e-12 || (t as usize) < support {
                return Err(Error::SpecViolation(format!(
                    "epsilon {eps} must divide 1 into at least {support} grains"
                )));
            }
            Some((eps, t as usize))
        }
        None => None,
    };
    let mut priors = Vec::with_capacity(n);
    let mut utilities = Vec::with_capacity(n);
    for _ in 0..n {
        // Values on a 1/1000 grid, distinct.
        let mut values: Vec<u32> = Vec::with_capacity(support);
        while values.len() < support {
            let v = rng.random_range(0..=1000u32);
            if !values.contains(&v) {
                values.push(v);
            }
        }
        values.sort_unstable();
        let masses: Vec<f64> = match grains {
            Some((eps, t)) => {
                let mut counts = vec![1usize; support];
                for _ in support..t {
                    counts[rng.random_range(0..support)] += 1;
                }
                counts.iter().map(|&c| c as f64 * eps).collect()
            }
            None => {
                let w: Vec<f64> = (0..support).map(|_| rng.random_range(0.05..1.0)).collect();
                let total: f64 = w.iter().sum();
                w.iter().map(|x| x / total).collect()
            }
        };
        priors.push(Prior::new(
            values.iter().map(|&v| v as f64 / 1000.0).zip(masses),
        )?);
        utilities.push(match family {
            UtilityFamily::Constant => UtilityFn::constant(1.0)?,
            UtilityFamily::Linear => UtilityFn::identity(),
            UtilityFamily::RandomMonotone => {
                let mut level = rng.random_range(0.1..1.0);
                let mut points = vec![(0.0, level)];
                for x in [0.25, 0.5, 0.75, 1.0] {
                    level += rng.random_range(0.0..1.0);
                    points.push((x, level));
                }
                UtilityFn::new(points)?
            }
        });
    }
    Instance::new(priors, utilities, k)
}

fn cmd_gen(preset: &GenPreset, cmd: &Command, ctx: &mut Ctx) -> Result<(&'static str, Value, String)> {
    let mut extra = serde_json::Map::new();
    let instance = match *preset {
        GenPreset::Bernoulli { n, zeta, k } => Instance::bernoulli(n, zeta, k)?,
        GenPreset::Random {
            n,
            k,
            support,
            epsilon,
            utility,
            seed,
        } => random_instance(n, k, support, epsilon, utility, seed)?,
        GenPreset::NegativeShift {
            n,
            zeta,
            epsilon,
            target,
            ref profile_out,
        } => {
            let spec = BernoulliEqSpec::new(n, zeta)?;
            let base = spec.instance()?;
            let cells = grain_aligned_boundaries(spec, epsilon)?;
            let profile = StrategyProfile::symmetric(&base, bernoulli_equilibrium_scheme_on_cells(spec, &cells)?)?;
            let eq_welfare: f64 = contributions(&base, &profile).iter().sum();
            let shift = eq_welfare - target;
            let shifted_priors = base
                .priors()
                .iter()
                .map(|p| p.shifted(-shift))
                .collect::<Result<Vec<_>>>()?;
            let shifted = Instance::new(shifted_priors, base.utilities().to_vec(), base.k())?;
            let shifted_profile = ProfileJson::from_profile(&profile).to_profile(&shifted)?;
            let welfare: f64 = contributions(&shifted, &shifted_profile).iter().sum();
            let fb = first_best(&shifted, EvalMode::Exact)?.value;
            if let Some(path) = profile_out {
                io::write_profile(path, &shifted_profile)?;
            }
            ctx.warnings.push(format!(
                "values are shifted by -{shift} and lie outside [0, 1]; only first-best and welfare evaluation support this instance"
            ));
            extra.insert(
                "summary".into(),
                json!({
                    "shift": shift,
                    "equilibrium_welfare": welfare,
                    "first_best": fb,
                    "ratio": fb / welfare,
                }),
            );
            shifted
        }
    };
    let mut doc = match to_value(&InstanceJson::from_instance(&instance))? {
        Value::Object(m) => m,
        _ => unreachable!("instance serializes to an object"),
    };
    doc.insert("config".into(), serde_json::to_value(cmd)?);
    doc.extend(extra);
    let value = Value::Object(doc);
    ctx.raw_json = Some(serde_json::to_string_pretty(&value)? + "\n");
    let csv = csv_table(
        &["n", "k", "min_value", "max_value"],
        &[vec![
            instance.n().to_string(),
            instance.k().to_string(),
            num(instance.priors().iter().map(|p| p.min_value()).fold(f64::INFINITY, f64::min)),
            num(instance.priors().iter().map(|p| p.max_value()).fold(f64::NEG_INFINITY, f64::max)),
        ]],
    );
    Ok(("gen", value, csv))
}

fn estimate_row(e: &Estimate) -> Vec<String> {
    let method = match e.method {
        crate::model::Method::Exact => "exact".to_string(),
        crate::model::Method::MonteCarlo { .. } => "monte_carlo".to_string(),
    };
    vec![num(e.value), opt_num(e.std_err), method]
}

fn cmd_first_best(a: &FirstBestArgs) -> Result<(&'static str, Value, String)> {
    let instance = io::read_instance(&a.instance, true)?;
    let fb = first_best(&instance, a.eval.mode())?;
    let csv = csv_table(&["first_best", "std_err", "method"], &[estimate_row(&fb)]);
    Ok(("first-best", to_value(&fb)?, csv))
}

fn cmd_welfare(a: &WelfareArgs) -> Result<(&'static str, Value, String)> {
    let instance = io::read_instance(&a.instance, true)?;
    let profile = load_profile(&a.profile, &instance)?;
    let welfare = expected_welfare(&instance, &profile, a.eval.mode())?;
    let wins = win_probabilities(&instance, &profile);
    let utilities: Vec<f64> = (0..instance.n())
        .map(|i| expected_utility(&instance, &profile, i))
        .collect();
    let result = json!({
        "welfare": welfare,
        "contributions": contributions(&instance, &profile),
        "utilities": utilities,
        "selection_rates": wins.r,
        "win_probabilities": wins.per_signal,
    });
    let csv = csv_table(&["welfare", "std_err", "method"], &[estimate_row(&welfare)]);
    Ok(("welfare", result, csv))
}

fn cmd_equilibrium(kind: &EquilibriumKind, ctx: &mut Ctx) -> Result<(&'static str, Value, String)> {
    match kind {
        EquilibriumKind::Bernoulli {
            n,
            zeta,
            grid,
            epsilon,
            instance_out,
            profile_out,
        } => {
            let spec = BernoulliEqSpec::new(*n, *zeta)?;
            let instance = spec.instance()?;
            let scheme = match epsilon {
                Some(eps) => bernoulli_equilibrium_scheme_on_cells(spec, &grain_aligned_boundaries(spec, *eps)?)?,
                None => bernoulli_equilibrium_scheme(spec, *grid)?,
            };
            let profile = StrategyProfile::symmetric(&instance, scheme)?;
            let measured: f64 = contributions(&instance, &profile).iter().sum();
            let lb = poa_lower_bound(spec);
            if let Some(path) = instance_out {
                io::write_instance(path, &instance)?;
            }
            if let Some(path) = profile_out {
                io::write_profile(path, &profile)?;
            }
            let scheme = profile.scheme(0);
            let result = json!({
                "p_hat": spec.p_hat(),
                "welfare_closed_form": bernoulli_equilibrium_welfare(spec),
                "welfare_measured": measured,
                "lower_bound": lb,
                "measured_ratio": lb.first_best / measured,
                "signal_means": scheme.means(),
                "signal_masses": scheme.masses(),
                "profile": profile_value(&profile)?,
            });
            let csv = csv_table(
                &["n", "zeta", "p_hat", "signals", "welfare_closed_form", "welfare_measured", "first_best", "exact_ratio", "closed_form_bound"],
                &[vec![
                    n.to_string(),
                    num(*zeta),
                    num(spec.p_hat()),
                    scheme.len().to_string(),
                    num(bernoulli_equilibrium_welfare(spec)),
                    num(measured),
                    num(lb.first_best),
                    num(lb.exact_ratio),
                    num(lb.bound),
                ]],
            );
            Ok(("equilibrium-bernoulli", result, csv))
        }
        EquilibriumKind::Brd {
            instance,
            profile,
            init,
            epsilon,
            max_rounds,
            tol,
            br,
            profile_out,
        } => {
            let instance = load_instance(instance)?;
            let start = match profile {
                Some(path) => load_profile(path, &instance)?,
                None => match init {
                    InitProfile::Pooling => StrategyProfile::pooling(&instance),
                    InitProfile::FullRevelation => StrategyProfile::full_revelation(&instance),
                },
            };
            let cfg = DynamicsConfig {
                max_rounds: *max_rounds,
                regret_tol: *tol,
                mode: br.mode(),
            };
            let out = best_response_dynamics(&instance, DiscretizationSpec::new(*epsilon)?, start, cfg)?;
            if let Some(path) = profile_out {
                io::write_profile(path, &out.profile)?;
            }
            if !out.converged {
                ctx.exit_code = EXIT_NOT_CONVERGED;
            }
            let result = json!({
                "converged": out.converged,
                "rounds": out.rounds,
                "log": out.log,
                "report": out.report,
                "profile": profile_value(&out.profile)?,
            });
            let csv = csv_table(
                &["converged", "rounds", "max_regret", "is_epsilon_ne", "heuristic"],
                &[vec![
                    out.converged.to_string(),
                    out.rounds.to_string(),
                    num(out.report.max_regret),
                    out.report.is_epsilon_ne.to_string(),
                    out.report.heuristic.to_string(),
                ]],
            );
            Ok(("equilibrium-brd", result, csv))
        }
    }
}

fn cmd_verify_ne(a: &VerifyArgs, ctx: &mut Ctx) -> Result<(&'static str, Value, String)> {
    let instance = load_instance(&a.instance)?;
    let profile = load_profile(&a.profile, &instance)?;
    let (report, brs) = regret_report(&instance, &profile, DiscretizationSpec::new(a.epsilon)?, a.br.mode(), a.tol)?;
    let witness = if report.is_epsilon_ne {
        Value::Null
    } else {
        ctx.exit_code = EXIT_NOT_NE;
        let worst = report
            .agents
            .iter()
            .fold(&report.agents[0], |best, r| if r.regret > best.regret { r } else { best });
        json!({
            "agent": worst.agent,
            "gain": worst.regret,
            "scheme": brs[worst.agent].scheme.to_draft(),
        })
    };
    let csv = csv_table(
        &["max_regret", "tolerance", "is_epsilon_ne", "profile_in_grain_space", "heuristic"],
        &[vec![
            num(report.max_regret),
            num(report.tolerance),
            report.is_epsilon_ne.to_string(),
            report.profile_in_grain_space.to_string(),
            report.heuristic.to_string(),
        ]],
    );
    let result = json!({ "report": report, "witness": witness });
    Ok(("verify-ne", result, csv))
}

fn case_name(case: &CertificateCase) -> &'static str {
    match case {
        CertificateCase::Case1 { .. } => "case1",
        CertificateCase::Case2 { .. } => "case2",
        CertificateCase::DeviationWitness { .. } => "deviation_witness",
        CertificateCase::InapplicableProfileNotNe { .. } => "inapplicable_profile_not_ne",
    }
}

fn certificate_csv(cert: &PoACertificate) -> String {
    csv_table(
        &["case", "bound", "overall_bound", "welfare", "first_best", "measured_ratio", "sw_prime_ratio"],
        &[vec![
            case_name(&cert.case).to_string(),
            opt_num(cert.bound()),
            num(cert.overall_bound),
            num(cert.welfare),
            num(cert.first_best.value),
            num(cert.measured_ratio),
            num(cert.sw_prime_ratio),
        ]],
    )
}

fn cmd_certify(kind: &CertifyKind, ctx: &mut Ctx) -> Result<(&'static str, Value, String)> {
    let (name, cert) = match kind {
        CertifyKind::General {
            instance,
            profile,
            params,
            eval,
        } => {
            let instance = load_instance(instance)?;
            let profile = load_profile(profile, &instance)?;
            let cert = certify_poa(&instance, &profile, load_params(params)?, eval.mode())?;
            ("certify-general", cert)
        }
        CertifyKind::Discretized {
            instance,
            profile,
            epsilon,
            params,
            eval,
        } => {
            let instance = load_instance(instance)?;
            let profile = load_profile(profile, &instance)?;
            let spec = DiscretizationSpec::new(*epsilon)?;
            let cert = discretized_certify(&instance, &profile, load_params(params)?, spec, eval.mode())?;
            ("certify-discretized", cert)
        }
        CertifyKind::Warmup { instance, profile } => {
            let instance = load_instance(instance)?;
            let profile = load_profile(profile, &instance)?;
            let cert = warmup_certify(&instance, &profile)?;
            let outcome = match cert.outcome {
                WarmupOutcome::TailCheckPassed => "tail_check_passed",
                WarmupOutcome::DeviationWitness { profitable, .. } => {
                    if profitable {
                        ctx.exit_code = EXIT_NOT_NE;
                    }
                    "deviation_witness"
                }
            };
            let csv = csv_table(
                &["outcome", "welfare", "first_best", "measured_ratio", "bound_ratio", "tail_probability"],
                &[vec![
                    outcome.to_string(),
                    num(cert.welfare),
                    num(cert.first_best),
                    num(cert.measured_ratio),
                    num(cert.bound_ratio),
                    num(cert.tail_probability),
                ]],
            );
            return Ok(("certify-warmup", to_value(&cert)?, csv));
        }
    };
    if matches!(
        cert.case,
        CertificateCase::DeviationWitness { .. } | CertificateCase::InapplicableProfileNotNe { .. }
    ) {
        ctx.exit_code = EXIT_NOT_NE;
    }
    Ok((name, to_value(&cert)?, certificate_csv(&cert)))
}

fn cmd_noisy(a: &NoisyArgs) -> Result<(&'static str, Value, String)> {
    let instance = load_instance(&a.instance)?;
    let profile = load_profile(&a.profile, &instance)?;
    let noise = NoiseSpec::for_instance(&instance, a.eta, a.samples, a.seed)?;
    let welfare = noisy_expected_welfare(&instance, &profile, noise)?;
    let utilities = (0..instance.n())
        .map(|i| noisy_expected_utility(&instance, &profile, i, noise))
        .collect::<Result<Vec<_>>>()?;
    let bound = noisy_bound(a.eta);
    let result = json!({
        "noise": noise,
        "welfare": welfare,
        "utilities": utilities,
        "bound": bound,
    });
    let mut row = vec![num(a.eta)];
    row.extend(estimate_row(&welfare));
    row.push(num(bound));
    let csv = csv_table(&["eta", "welfare", "std_err", "method", "bound"], &[row]);
    Ok(("noisy", result, csv))
}

/// One point of the lower-bound surface.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub zeta: f64,
    pub p_hat: f64,
    pub closed_form_bound: f64,
    pub exact_ratio: f64,
    pub measured_ratio: Option<f64>,
}

/// Closed-form bound and exact ratio at every feasible `(N, ζ)` pair;
/// pairs with `N·ζ > 1` are skipped and reported.
pub fn sweep(ns: &[usize], zetas: &[f64], measured_grid: Option<usize>) -> Result<(Vec<SweepRow>, Vec<(usize, f64)>)> {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &n in ns {
        for &zeta in zetas {
            if !(0.0..=1.0).contains(&zeta) || n == 0 {
                return Err(Error::SpecViolation(format!("bad grid point N={n}, zeta={zeta}")));
            }
            let spec = match BernoulliEqSpec::new(n, zeta) {
                Ok(s) => s,
                Err(Error::SpecViolation(_)) => {
                    skipped.push((n, zeta));
                    continue;
                }
                Err(e) => return Err(e),
            };
            let lb = poa_lower_bound(spec);
            let measured_ratio = match measured_grid {
                Some(grid) => {
                    let instance = spec.instance()?;
                    let profile = StrategyProfile::symmetric(&instance, bernoulli_equilibrium_scheme(spec, grid)?)?;
                    let welfare: f64 = contributions(&instance, &profile).iter().sum();
                    Some(if welfare > 0.0 { lb.first_best / welfare } else { 1.0 })
                }
                None => None,
            };
            rows.push(SweepRow {
                n,
                zeta,
                p_hat: spec.p_hat(),
                closed_form_bound: lb.bound,
                exact_ratio: lb.exact_ratio,
                measured_ratio,
            });
        }
    }
    Ok((rows, skipped))
}

fn cmd_sweep(a: &SweepArgs, ctx: &mut Ctx) -> Result<(&'static str, Value, String)> {
    let (rows, skipped) = sweep(&a.ns, &a.zetas, a.measured.then_some(a.grid))?;
    for (n, zeta) in &skipped {
        ctx.warnings.push(format!("skipped N={n}, zeta={zeta}: N*zeta > 1"));
    }
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                num(r.zeta),
                num(r.p_hat),
                num(r.closed_form_bound),
                num(r.exact_ratio),
                opt_num(r.measured_ratio),
            ]
        })
        .collect();
    let csv = csv_table(
        &["n", "zeta", "p_hat", "closed_form_bound", "exact_ratio", "measured_ratio"],
        &table,
    );
    Ok(("sweep", json!({ "rows": rows, "skipped": skipped }), csv))
}
