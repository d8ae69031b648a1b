use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "hybridsim", version, about = "Simulate hybrid systems with exogenous inputs and check existence conditions")]
pub struct Cli {
    /// Directory for emitted files.
    #[arg(long, global = true, env = "HYBRIDSIM_OUT", default_value = ".")]
    pub out_dir: PathBuf,

    /// Worker threads for region sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve from one initial state and write the report and arc.
    Simulate(SimulateArgs),
    /// Existence of a nontrivial solution from a state, or over a region.
    CheckExistence(ExistenceArgs),
    /// Run one of the viability checkers.
    CheckViability(ViabilityArgs),
    /// Output-space set condition for output-form systems.
    CheckSetcond(SetcondArgs),
    /// Check an arc file against the solution definition.
    ValidateArc(ValidateArgs),
    /// Built-in scenarios.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum ScenarioAction {
    List,
}

#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    /// Built-in scenario key (see `scenario list`).
    #[arg(long, conflicts_with = "system")]
    pub scenario: Option<String>,
    /// System config JSON, for affine systems outside the registry.
    #[arg(long)]
    pub system: Option<PathBuf>,
    /// Flow-set bound for the growth scenarios.
    #[arg(long)]
    pub c: Option<f64>,
    /// Half-width of the input set W = [-delta, delta].
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct SignalArgs {
    /// Input in the one-line syntax, e.g. `steps:0:0.2,1:-0.2; override:0.5=0`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "signal")]
    pub w: Option<String>,
    /// Input file: signal JSON or a one-line description.
    #[arg(long)]
    pub signal: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum ModeArg {
    E,
    Ae,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum PriorityArg {
    Jump,
    Flow,
    Both,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub signal: SignalArgs,
    /// Initial state, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub xi: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Defaults to the scenario's own priority.
    #[arg(long, value_enum)]
    pub priority: Option<PriorityArg>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub j_max: Option<usize>,
    /// Solver settings JSON; flags override it.
    #[arg(long)]
    pub sim_config: Option<PathBuf>,
    /// Under `--priority both`, write every branch instead of the first.
    #[arg(long)]
    pub all_branches: bool,
}

#[derive(Args, Debug)]
pub struct ExistenceArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub signal: SignalArgs,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "region")]
    pub xi: Option<Vec<f64>>,
    /// Region of initial states, one `lo:hi` per state axis, comma separated.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub region: Option<Vec<String>>,
    #[arg(long, default_value_t = 41)]
    pub per_axis: usize,
    #[arg(long, value_enum, default_value = "e")]
    pub mode: ModeArg,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum CheckId {
    Probe,
    TangentAc,
    TangentAcCertified,
    TangentContinuous,
    Split,
    BallMargin,
}

#[derive(Args, Debug)]
pub struct ViabilityArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub signal: SignalArgs,
    #[arg(long, value_enum)]
    pub check: CheckId,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub xi: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "e")]
    pub mode: ModeArg,
    /// Unconstrained input for `split`, in the one-line syntax.
    #[arg(long, allow_hyphen_values = true)]
    pub w2: Option<String>,
    /// Number of constrained input components for `split`.
    #[arg(long)]
    pub split: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub per_axis: Option<usize>,
    /// Horizons for `probe` or radii for `ball-margin`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct SetcondArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Known range of the output map, one `lo:hi` per output axis; defaults
    /// to the whole space.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub range: Option<Vec<String>>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub signal: SignalArgs,
    /// Report JSON, arc JSON or arc CSV.
    #[arg(long)]
    pub arc: PathBuf,
    #[arg(long, value_enum, default_value = "e")]
    pub mode: ModeArg,
}
