use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use arcdet_core::gas_mc::DEFAULT_SEED;
use arcdet_core::harness::commands::ConfigSpec;
use arcdet_core::harness::criteria::fillings_corpus;
use arcdet_core::harness::{
    default_eps_grid, execute, replay, run_criterion, write_run, Command, FamilySpec, Format, RunOptions, ScalingRule,
    CRITERIA, DEFAULT_PRECISION_BITS,
};
use arcdet_core::ArcError;

#[derive(Parser, Debug)]
#[command(
    name = "arcdet",
    version,
    about = "Toeplitz determinants of arc symbols and their large-n expansions"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Sub,
}

#[derive(Args, Debug)]
struct Global {
    /// Working precision floor in bits.
    #[arg(long, global = true, env = "ARCDET_PRECISION_BITS", default_value_t = DEFAULT_PRECISION_BITS)]
    precision_bits: u32,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    OneCut,
    Odd,
    Even,
}

#[derive(Args, Debug, Clone)]
struct FamilyArgs {
    #[arg(long, value_enum, default_value_t = Kind::OneCut)]
    family: Kind,
    /// Odd family: 2r+1 arcs.
    #[arg(long, default_value_t = 1)]
    r: u32,
    /// Even family: 2s arcs.
    #[arg(long, default_value_t = 1)]
    s: u32,
}

impl FamilyArgs {
    fn spec(&self) -> FamilySpec {
        match self.family {
            Kind::OneCut => FamilySpec::OneCut,
            Kind::Odd => FamilySpec::Odd { r: self.r },
            Kind::Even => FamilySpec::Even { s: self.s },
        }
    }
}

fn family_list(s: &str) -> Result<FamilySpec, String> {
    s.parse().map_err(|e: ArcError| e.to_string())
}

fn rule(s: &str) -> Result<ScalingRule, String> {
    s.parse().map_err(|e: ArcError| e.to_string())
}

fn window(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or("expected LO:HI")?;
    Ok((a.parse().map_err(|_| "bad LO")?, b.parse().map_err(|_| "bad HI")?))
}

fn config_item(s: &str) -> Result<ConfigSpec, String> {
    let (f, e) = s.split_once('@').ok_or("expected FAMILY@EPS, e.g. odd_r1@1/2")?;
    Ok(ConfigSpec {
        family: family_list(f)?,
        eps: e.to_string(),
    })
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Fourier coefficients of the arc indicator.
    Fourier {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value = "1/2")]
        eps: String,
        #[arg(long, default_value_t = 20)]
        k_max: usize,
    },
    /// Exact ln Z_n for n = 1..n_max.
    Det {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, value_delimiter = ',', default_value = "1/2")]
        eps: Vec<String>,
        #[arg(long, default_value_t = 35)]
        n_max: usize,
        /// Fit leading orders over LO:HI.
        #[arg(long, value_parser = window)]
        regress: Option<(usize, usize)>,
    },
    /// One-cut large-n coefficients.
    Expand {
        #[arg(long, default_value = "1/2")]
        eps: String,
        #[arg(long = "k", alias = "K", default_value_t = 2)]
        k: usize,
    },
    /// Residuals of the one-cut expansion against exact determinants.
    Compare {
        #[arg(long, value_delimiter = ',', default_value = "1/2")]
        eps: Vec<String>,
        #[arg(long, default_value_t = 20)]
        n_min: usize,
        #[arg(long, default_value_t = 35)]
        n_max: usize,
        #[arg(long = "k", alias = "K", default_value_t = 2)]
        k: usize,
    },
    /// Free energies and correlators from the recursion.
    Toprec {
        #[arg(long, alias = "gmax", default_value_t = 3)]
        g_max: u32,
        #[arg(long, value_delimiter = ',', default_value = "1/3,1/2,2/3")]
        check_eps: Vec<String>,
    },
    /// Equilibrium density table.
    Density {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value = "1/2")]
        eps: String,
        #[arg(long, default_value_t = 400)]
        points: usize,
    },
    /// Normalization and filling fractions for FAMILY@EPS items (default corpus if none).
    Fillings {
        #[arg(long = "config", value_parser = config_item)]
        configs: Vec<ConfigSpec>,
    },
    /// Metropolis sampling of the log-gas against the density.
    Mc {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value = "1/7")]
        eps: String,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        chains: usize,
        #[arg(long, default_value_t = 4000)]
        sweeps: usize,
        #[arg(long, default_value_t = 5)]
        thin: usize,
        /// Histogram bins per interval.
        #[arg(long, default_value_t = 40)]
        bins: usize,
    },
    /// Per-class constant-term fits.
    FitO1 {
        #[arg(long, value_delimiter = ',', value_parser = family_list, default_value = "odd_r1")]
        families: Vec<FamilySpec>,
        #[arg(long, value_delimiter = ',')]
        eps_grid: Vec<String>,
        #[arg(long, default_value_t = 70)]
        n_max: usize,
    },
    /// Small-eps exponents of Z_n.
    #[command(name = "smalleps")]
    SmallEps {
        #[arg(long, value_delimiter = ',', value_parser = family_list, default_value = "one_cut,odd_r1,odd_r2,even_s1,even_s2")]
        families: Vec<FamilySpec>,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, value_delimiter = ',', default_value = "1/1000,1/10000")]
        probes: Vec<String>,
    },
    /// Closed forms for arc counts growing with n.
    Scaling {
        #[arg(long, value_delimiter = ',', value_parser = rule, default_value = "geq_n,n_minus_1,n_minus_2,n_minus_3,floor_half")]
        rules: Vec<ScalingRule>,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        #[arg(long, value_delimiter = ',', default_value = "3/10,7/10")]
        eps: Vec<String>,
    },
    /// Selberg integrals and the Barnes expansion.
    Selberg {
        #[arg(long, default_value_t = 3)]
        n_max: u32,
        #[arg(long, default_value_t = 30)]
        barnes_n: u32,
    },
    /// Runs acceptance criterion K (1..=12), or all of them.
    Criterion { id: Option<u32> },
    /// Re-executes a manifest and compares outputs byte for byte.
    Replay { manifest: PathBuf },
}

fn to_command(sub: Sub) -> Option<Command> {
    let c = match sub {
        Sub::Fourier { fam, eps, k_max } => Command::Fourier {
            family: fam.spec(),
            eps,
            k_max,
        },
        Sub::Det {
            fam,
            eps,
            n_max,
            regress,
        } => Command::Det {
            family: fam.spec(),
            eps,
            n_max,
            regress,
        },
        Sub::Expand { eps, k } => Command::Expand { eps, k },
        Sub::Compare { eps, n_min, n_max, k } => Command::Compare { eps, n_min, n_max, k },
        Sub::Toprec { g_max, check_eps } => Command::Toprec { g_max, check_eps },
        Sub::Density { fam, eps, points } => Command::Density {
            family: fam.spec(),
            eps,
            points,
        },
        Sub::Fillings { configs } => Command::Fillings {
            configs: if configs.is_empty() { fillings_corpus() } else { configs },
        },
        Sub::Mc {
            fam,
            eps,
            n,
            chains,
            sweeps,
            thin,
            bins,
        } => Command::Mc {
            family: fam.spec(),
            eps,
            n,
            chains,
            sweeps,
            thin,
            bins,
        },
        Sub::FitO1 {
            families,
            eps_grid,
            n_max,
        } => Command::FitO1 {
            families,
            eps_grid: if eps_grid.is_empty() {
                default_eps_grid()
            } else {
                eps_grid
            },
            n_max,
        },
        Sub::SmallEps {
            families,
            n_max,
            probes,
        } => Command::SmallEps {
            families,
            n_max,
            eps_probes: probes,
        },
        Sub::Scaling { rules, n_max, eps } => Command::Scaling { rules, n_max, eps },
        Sub::Selberg { n_max, barnes_n } => Command::Selberg { n_max, barnes_n },
        Sub::Criterion { .. } | Sub::Replay { .. } => return None,
    };
    Some(c)
}

fn is_usage(e: &ArcError) -> bool {
    matches!(
        e,
        ArcError::InvalidParameter(_)
            | ArcError::DepthExceeded { .. }
            | ArcError::InsufficientClassMembers { .. }
            | ArcError::TruncationTooLow { .. }
            | ArcError::Io(_)
    )
}

fn fail(e: ArcError) -> ExitCode {
    eprintln!("error: {e}");
    if is_usage(&e) {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run_criteria(id: Option<u32>, options: &RunOptions) -> ExitCode {
    let ids: Vec<u32> = match id {
        Some(k) => vec![k],
        None => CRITERIA.iter().map(|c| c.id).collect(),
    };
    let mut all = true;
    for k in ids {
        match run_criterion(k, options) {
            Ok(r) => {
                println!(
                    "{} criterion {}: {} ({:.1} s)",
                    verdict(r.passed),
                    r.id,
                    r.title,
                    r.elapsed
                );
                for c in &r.checks {
                    println!("    {} {}: {}", verdict(c.passed), c.name, c.detail);
                }
                all &= r.passed;
            }
            Err(e) => return fail(e),
        }
    }
    ExitCode::from(u8::from(!all))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let options = RunOptions {
        precision_bits: cli.global.precision_bits,
        seed: cli.global.seed,
        format: match cli.global.format {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        },
    };
    match cli.cmd {
        Sub::Criterion { id } => return run_criteria(id, &options),
        Sub::Replay { manifest } => {
            return match replay(&manifest) {
                Ok(bad) if bad.is_empty() => {
                    println!("replay identical: {}", manifest.display());
                    ExitCode::SUCCESS
                }
                Ok(bad) => {
                    for f in bad {
                        println!("differs: {f}");
                    }
                    ExitCode::from(1)
                }
                Err(e) => fail(e),
            };
        }
        _ => {}
    }
    let command = to_command(cli.cmd).expect("handled above");
    let report = match execute(&command, &options) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let (manifest, path) = match write_run(&cli.global.out_dir, &command, &options, &report) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    for out in &manifest.outputs {
        println!("wrote {}", cli.global.out_dir.join(&out.file).display());
    }
    println!("manifest {}", path.display());
    for c in &report.checks {
        println!("{} {}: {}", verdict(c.passed), c.name, c.detail);
    }
    ExitCode::from(u8::from(!report.passed()))
}
