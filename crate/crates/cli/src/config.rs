use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nccause_core::scenario::UnitVector3;
use nccause_core::{DynamicsParams, QubitWindow, ScenarioSpec, DEFAULT_TOL};

use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "nccause", version, about = "Noncommutative common causes in the local quantum Ising model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// 2x2 table of correlations, dense-matrix and closed form.
    Correlations(Common),
    /// CH and CHSH values with violation flags.
    Bell(Common),
    /// CH and CHSH over a lambda grid on [0, 1].
    SweepLambda(Common),
    /// Run a verification suite; exit 1 if it fails.
    Verify {
        which: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Grid search over common-cause candidates C(c, c~).
    Search {
        /// Events along (0,0,1) for all settings.
        #[arg(long)]
        a3b3_nonzero: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Prop1,
    Prop2,
    Dynamics,
    Oracle,
    Dimensions,
    PrimitiveCausality,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eta1: Option<i32>,
    #[arg(long, allow_negative_numbers = true)]
    pub eta2: Option<i32>,
    /// JSON scenario file; explicit flags override its fields.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Qubit window LO:HI for dense-matrix checks.
    #[arg(long, default_value = "-3:3", allow_hyphen_values = true)]
    pub window: String,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Grid size; the meaning depends on the command.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Output file; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: ScenarioSpec,
    pub window: QubitWindow,
    pub tol: f64,
    pub grid: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

fn parse_window(s: &str) -> Result<QubitWindow, CliError> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| CliError::Config(format!("window '{s}' is not LO:HI")))?;
    let parse = |x: &str| x.trim().parse::<i32>().map_err(|_| CliError::Config(format!("window bound '{x}' is not an integer")));
    let w = QubitWindow::new(parse(lo)?, parse(hi)?)?;
    // events and states live on sites -1..1
    if w.lo > -1 || w.hi < 1 {
        return Err(CliError::Config(format!("window {s} does not cover sites -1..1")));
    }
    Ok(w)
}

impl Common {
    pub fn resolve(&self, preset_a3b3: bool) -> Result<RunConfig, CliError> {
        let base = match &self.scenario {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                serde_json::from_str::<ScenarioSpec>(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => ScenarioSpec::default(),
        };
        let d = base.dynamics;
        let dynamics = DynamicsParams::new(
            self.theta1.unwrap_or(d.theta1()),
            self.theta2.unwrap_or(d.theta2()),
            self.eta1.unwrap_or(d.eta1()),
            self.eta2.unwrap_or(d.eta2()),
        )?;
        let (a, b) = if preset_a3b3 {
            let z = UnitVector3::new(0.0, 0.0, 1.0)?;
            ([z, z], [z, z])
        } else {
            (base.a, base.b)
        };
        let spec = ScenarioSpec::new(a, b, self.lambda.unwrap_or(base.lambda()), dynamics)?;
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(CliError::Config(format!("tolerance {} must be positive", self.tol)));
        }
        Ok(RunConfig {
            spec,
            window: parse_window(&self.window)?,
            tol: self.tol,
            grid: self.grid,
            out: self.out.clone(),
            format: self.format,
        })
    }
}
