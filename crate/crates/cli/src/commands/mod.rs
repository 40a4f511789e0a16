mod classical;
mod compare;
mod histories;
mod quantum;

use std::path::{Path, PathBuf};

use duffing_core::numerics::C64;
use duffing_core::oscillator::{coherent_state, FrameCenter, QuantumState};
use duffing_core::qsd::DensityOperator;
use serde_json::{Map, Value};

use crate::config::{InitialState, SimConfig};
use crate::error::CliError;
use crate::output::{write_meta, Meta, OutputSet};
use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Subcommand {
    Classical,
    Langevin,
    Lyapunov,
    QsdSection,
    StrobeMap,
    Wigner,
    InvariantWigner,
    Histories,
    Compare,
}

impl Subcommand {
    pub fn as_str(self) -> &'static str {
        match self {
            Subcommand::Classical => "classical",
            Subcommand::Langevin => "langevin",
            Subcommand::Lyapunov => "lyapunov",
            Subcommand::QsdSection => "qsd-section",
            Subcommand::StrobeMap => "strobe-map",
            Subcommand::Wigner => "wigner",
            Subcommand::InvariantWigner => "invariant-wigner",
            Subcommand::Histories => "histories",
            Subcommand::Compare => "compare",
        }
    }
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub outputs: Vec<PathBuf>,
    pub meta: PathBuf,
    pub warnings: Vec<String>,
    pub results: Value,
}

impl RunReport {
    /// Numeric result by key.
    pub fn number(&self, key: &str) -> Option<f64> {
        self.results.get(key).and_then(Value::as_f64)
    }
}

/// Shared state of one subcommand invocation.
pub(crate) struct Context<'a> {
    pub config: &'a SimConfig,
    pub pool: rayon::ThreadPool,
    pub out: OutputSet,
    pub warnings: Vec<String>,
    pub results: Map<String, Value>,
}

impl Context<'_> {
    pub fn warn(&mut self, msg: String) {
        eprintln!("warning: {msg}");
        self.warnings.push(msg);
    }

    pub fn record(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }
}

/// Runs `cmd` and writes its artifacts plus `<name>.meta.json` into `out`.
pub fn run(cmd: Subcommand, config: &SimConfig, out: &Path) -> Result<RunReport, CliError> {
    config.validate()?;
    let mut ctx = Context {
        config,
        pool: parallel::pool()?,
        out: OutputSet::new(out, config.name_or(cmd.as_str()))?,
        warnings: Vec::new(),
        results: Map::new(),
    };
    let r = match cmd {
        Subcommand::Classical => classical::section(&mut ctx),
        Subcommand::Langevin => classical::langevin(&mut ctx),
        Subcommand::Lyapunov => classical::lyapunov(&mut ctx),
        Subcommand::QsdSection => quantum::qsd_section(&mut ctx),
        Subcommand::StrobeMap => quantum::strobe_map(&mut ctx),
        Subcommand::Wigner => quantum::wigner(&mut ctx),
        Subcommand::InvariantWigner => quantum::invariant_wigner(&mut ctx),
        Subcommand::Histories => histories::histories(&mut ctx),
        Subcommand::Compare => compare::compare(&mut ctx),
    };
    r.map_err(|e| e.context(cmd.as_str()))?;
    let meta_path = ctx.out.meta_path();
    let results = Value::Object(ctx.results);
    let meta = Meta {
        tool: "duffing-qsd",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cmd.as_str(),
        seed: config.seed,
        threads_independent: true,
        config,
        outputs: ctx.out.file_names(),
        warnings: ctx.warnings.clone(),
        results: results.clone(),
    };
    write_meta(&meta_path, &meta)?;
    Ok(RunReport { outputs: ctx.out.file_names().iter().map(|n| out.join(n)).collect(), meta: meta_path, warnings: ctx.warnings, results })
}

/// Initial pure state in the origin frame.
pub(crate) fn initial_state(config: &SimConfig) -> Result<QuantumState, CliError> {
    let b = config.basis()?;
    let (x, p) = (config.start_x, config.start_p);
    Ok(match config.initial_state {
        InitialState::Coherent => coherent_state(&b, x, p)?,
        InitialState::Fock => QuantumState::fock(&b, config.fock_n)?,
        InitialState::Cat => {
            let plus = coherent_state(&b, x, p)?;
            let minus = coherent_state(&b, -x, -p)?;
            let amps: Vec<C64> = plus.amplitudes.iter().zip(&minus.amplitudes).map(|(a, c)| a + c).collect();
            let mut psi = QuantumState::new(amps, b, FrameCenter::ORIGIN)?;
            psi.normalize()?;
            psi
        }
    })
}

pub(crate) fn initial_density(config: &SimConfig) -> Result<DensityOperator, CliError> {
    Ok(DensityOperator::from_state(&initial_state(config)?)?)
}
