//! `pairwalk` command-line tool.

mod commands;
mod error;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliResult;
use crate::settings::Settings;

#[derive(Parser, Debug)]
#[command(name = "pairwalk", version, about = "Two-electron quantum-walk simulation, tomography and gas dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Laser-modulated coincidence maps for one reference map and a list of couplings.
    Simulate {
        /// Reference (laser-off) map file; the built-in two-peak template is used when absent.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        template: TemplateArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Global least-squares fit of the entangled/separable state family.
    Fit {
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Laser-on map files, one per coupling.
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        obs: Option<Vec<PathBuf>>,
        /// Laser power of each observation in mW (labels only).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        powers: Option<Vec<f64>>,
        #[command(flatten)]
        model: ModelArgs,
        /// Optimizer: `lm` or `simplex`.
        #[arg(long)]
        method: Option<String>,
        /// Number of starting values of alpha.
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Parameters held fixed, e.g. `f,alpha`.
        #[arg(long, value_delimiter = ',')]
        freeze: Option<Vec<String>>,
        #[command(flatten)]
        common: Common,
    },
    /// Negativity from Schmidt coefficients or from the state built on a reference map.
    Negativity {
        /// Schmidt coefficients, largest first.
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long)]
        truncation: Option<usize>,
        /// Also write the Schmidt modes (requires --reference).
        #[arg(long)]
        modes: bool,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Classical Coulomb simulation of the photoemitted electron gas.
    Gas {
        #[arg(long)]
        n_electrons: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        t_end: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Fringe visibility of a spectrum or map file.
    Visibility {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Energy bound in eV (default: two photon energies).
        #[arg(long)]
        window: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Synthetic reference and laser-on maps.
    Synth {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        powers: Option<Vec<f64>>,
        /// Bin-wise Gaussian noise as a fraction of each map's peak.
        #[arg(long)]
        noise: Option<f64>,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        template: TemplateArgs,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// File of `key=value` lines; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Energy grid, e.g. `--grid k=4 span=24 emin=-14.4 hw=1.2`.
    #[arg(long, num_args = 1..=4)]
    grid: Option<Vec<String>>,
    /// separable, entangled, classical or blend (comma-separated list allowed).
    #[arg(long)]
    model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    f: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Detector blur in eV.
    #[arg(long)]
    sigma: Option<f64>,
    /// Electron-to-laser pulse-width ratio.
    #[arg(long)]
    ratio: Option<f64>,
    /// Coupling strengths |g|, comma-separated.
    #[arg(long, value_delimiter = ',')]
    g: Option<Vec<f64>>,
    /// Quadrature nodes for the coupling spread.
    #[arg(long)]
    nodes: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct TemplateArgs {
    /// Peak separation of the built-in reference template in eV.
    #[arg(long, allow_hyphen_values = true)]
    separation: Option<f64>,
    /// Peak width (standard deviation) of the template in eV.
    #[arg(long)]
    width: Option<f64>,
}

impl Common {
    fn settings(&self) -> CliResult<Settings> {
        let mut s = Settings::load(self.config.as_deref())?;
        s.set("out", self.out.as_ref().map(|p| p.display().to_string()));
        s.set_num("seed", self.seed);
        Ok(s)
    }
}

impl ModelArgs {
    fn apply(&self, s: &mut Settings) {
        s.set("grid", self.grid.as_ref().map(|g| g.join(" ")));
        s.set("model", self.model.clone());
        s.set_num("f", self.f);
        s.set_num("alpha", self.alpha);
        s.set_num("beta", self.beta);
        s.set_num("gamma", self.gamma);
        s.set_num("sigma", self.sigma);
        s.set_num("ratio", self.ratio);
        s.set_list("g", self.g.as_deref());
        s.set_num("nodes", self.nodes);
    }
}

impl TemplateArgs {
    fn apply(&self, s: &mut Settings) {
        s.set_num("separation", self.separation);
        s.set_num("width", self.width);
    }
}

fn path_string(p: &Option<PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { reference, model, template, common } => {
            let mut s = common.settings()?;
            model.apply(&mut s);
            template.apply(&mut s);
            s.set("reference", path_string(&reference));
            commands::simulate::run(&s)
        }
        Command::Fit { reference, obs, powers, model, method, starts, max_iter, freeze, common } => {
            let mut s = common.settings()?;
            model.apply(&mut s);
            s.set("reference", path_string(&reference));
            s.set(
                "obs",
                obs.map(|o| o.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(",")),
            );
            s.set_list("powers", powers.as_deref());
            s.set("method", method);
            s.set_num("starts", starts);
            s.set_num("max_iter", max_iter);
            s.set("freeze", freeze.map(|f| f.join(",")));
            commands::fit::run(&s)
        }
        Command::Negativity { lambdas, reference, truncation, modes, model, common } => {
            let mut s = common.settings()?;
            model.apply(&mut s);
            s.set_list("lambdas", lambdas.as_deref());
            s.set("reference", path_string(&reference));
            s.set_num("truncation", truncation);
            if modes {
                s.set("modes", Some("true".into()));
            }
            commands::negativity::run(&s)
        }
        Command::Gas { n_electrons, t_end, dt, common } => {
            let mut s = common.settings()?;
            s.set_num("n_electrons", n_electrons);
            s.set_num("t_end", t_end);
            s.set_num("dt", dt);
            commands::gas::run(&s)
        }
        Command::Visibility { input, window, common } => {
            let mut s = common.settings()?;
            s.set("input", path_string(&input));
            s.set_num("window", window);
            commands::visibility::run(&s)
        }
        Command::Synth { powers, noise, model, template, common } => {
            let mut s = common.settings()?;
            model.apply(&mut s);
            template.apply(&mut s);
            s.set_list("powers", powers.as_deref());
            s.set_num("noise", noise);
            commands::synth::run(&s)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pairwalk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
