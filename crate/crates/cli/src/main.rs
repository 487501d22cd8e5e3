//! `autohp` command-line harness.
//!
//! Every subcommand takes `--config <file.toml>`. Any `--section.key value`
//! (or `--section.key=value`) pair overrides the corresponding config entry.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use autohp::beamforming::dft_codebook;
use autohp::channel::{load_dataset, save_dataset};
use autohp::dimsearch::{bisection_search, ThresholdOracle};
use autohp::harness::{
    evaluate_all, export_beam_patterns, generate_data, overhead_report, search_dimension, train_model,
    train_search_reference, write_csv,
};
use autohp::neuralnet::{load_checkpoint, save_checkpoint};
use autohp::ExperimentConfig;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "autohp",
    version,
    about = "Learned beam probing and hybrid precoding experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to `eval.output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate training and test channels (`train.bin`, `test.bin`).
    GenerateData {
        #[command(flatten)]
        common: Common,
    },
    /// Train a network and write `model.bin` and `epochs.csv`.
    Train {
        #[command(flatten)]
        common: Common,
        /// Dataset directory holding `train.bin`; defaults to the output directory.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Bisection search for the probing beam count; prints the result.
    SearchDim {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        data: Option<PathBuf>,
        /// Replace training with an oracle that holds exactly for `m >= N`.
        #[arg(long, value_name = "N")]
        stub_threshold: Option<usize>,
    },
    /// Deploy the trained model and the baselines over the SNR grid.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        data: Option<PathBuf>,
        /// Checkpoint; defaults to `model.bin` in the output directory.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Azimuth gain patterns of a codebook (`patterns_<codebook>.csv`).
    ExportPatterns {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = CodebookKind::Learned)]
        codebook: CodebookKind,
    },
    /// Probing overhead relative to DFT and oversampled DFT sweeps.
    Report {
        #[command(flatten)]
        common: Common,
        /// Learned beam count; defaults to the checkpoint, then `system.m_bs`.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CodebookKind {
    Learned,
    Dft,
    Odft,
}

type Overrides = Vec<(String, String)>;

/// Splits `--a.b value` and `--a.b=value` pairs out of the raw arguments.
fn split_overrides(args: Vec<String>) -> Result<(Vec<String>, Overrides)> {
    let mut rest = Vec::with_capacity(args.len());
    let mut overrides = Vec::new();
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let Some(flag) = arg
            .strip_prefix("--")
            .filter(|f| f.split('=').next().is_some_and(|k| k.contains('.')))
        else {
            rest.push(arg);
            continue;
        };
        match flag.split_once('=') {
            Some((key, value)) => overrides.push((key.to_string(), value.to_string())),
            None => {
                let value = iter
                    .next()
                    .with_context(|| format!("override --{flag} needs a value"))?;
                overrides.push((flag.to_string(), value));
            }
        }
    }
    Ok((rest, overrides))
}

struct Session {
    config: ExperimentConfig,
    out: PathBuf,
}

impl Session {
    fn open(common: &Common, overrides: &[(String, String)]) -> Result<Self> {
        let config = ExperimentConfig::load(&common.config, overrides)
            .with_context(|| format!("loading {}", common.config.display()))?;
        let out = common.out.clone().unwrap_or_else(|| config.eval.output_dir.clone());
        fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
        fs::write(out.join("config.toml"), config.to_toml_string()?)?;
        Ok(Self { config, out })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn model_path(&self, model: &Option<PathBuf>) -> PathBuf {
        model.clone().unwrap_or_else(|| self.path("model.bin"))
    }
}

fn load(dir: &Path, name: &str) -> Result<Vec<autohp::ChannelSample>> {
    let path = dir.join(name);
    load_dataset(&path).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: Cli, overrides: &[(String, String)]) -> Result<()> {
    match cli.command {
        Command::GenerateData { common } => {
            let s = Session::open(&common, overrides)?;
            let (train, test) = generate_data(&s.config)?;
            save_dataset(&train, s.path("train.bin"))?;
            save_dataset(&test, s.path("test.bin"))?;
            println!(
                "wrote {} training and {} test channels to {}",
                train.len(),
                test.len(),
                s.out.display()
            );
        }
        Command::Train { common, data } => {
            let s = Session::open(&common, overrides)?;
            let train = load(data.as_deref().unwrap_or(&s.out), "train.bin")?;
            let (net, history) = train_model(&s.config, &train)?;
            save_checkpoint(&net, Some(&s.config.train), s.path("model.bin"))?;
            write_csv(s.path("epochs.csv"), &history)?;
            if let Some(last) = history.last() {
                println!(
                    "epoch {}: train loss {:.4}, validation gain {:.4} of {:.4}",
                    last.epoch, last.train_loss, last.val_gain, last.val_genie_gain
                );
            }
        }
        Command::SearchDim {
            common,
            data,
            stub_threshold,
        } => {
            let s = Session::open(&common, overrides)?;
            let outcome = match stub_threshold {
                Some(threshold) => bisection_search(&mut ThresholdOracle { threshold }, s.config.search.n_antennas)?,
                None => {
                    let train = load(data.as_deref().unwrap_or(&s.out), "train.bin")?;
                    let cached = s.path("reference.bin");
                    let reference = if cached.exists() {
                        load_checkpoint(&cached)?.0
                    } else {
                        let reference = train_search_reference(&s.config, &train)?;
                        save_checkpoint(&reference, Some(&s.config.train), &cached)?;
                        reference
                    };
                    search_dimension(&s.config, &train, &reference)?
                }
            };
            write_csv(s.path("search_log.csv"), &outcome.probes)?;
            println!("{}", outcome.dimension);
        }
        Command::Evaluate { common, data, model } => {
            let s = Session::open(&common, overrides)?;
            let test = load(data.as_deref().unwrap_or(&s.out), "test.bin")?;
            let (net, _) = load_checkpoint(s.model_path(&model))?;
            if net.n_antennas() != s.config.system.n_bs {
                bail!(
                    "checkpoint has {} antennas but system.n_bs is {}",
                    net.n_antennas(),
                    s.config.system.n_bs
                );
            }
            let report = evaluate_all(&net, &test, &s.config)?;
            write_csv(s.path("sum_rates.csv"), &report.sum_rates)?;
            write_csv(s.path("user_rates.csv"), &report.user_rates)?;
            write_csv(s.path("gains.csv"), &report.gains)?;
            for row in &report.sum_rates {
                println!("{:>8} {:>6.1} dB  {:.4} bit/s/Hz", row.method, row.snr_db, row.sum_rate);
            }
        }
        Command::ExportPatterns {
            common,
            model,
            codebook,
        } => {
            let s = Session::open(&common, overrides)?;
            let n = s.config.system.n_bs;
            let (beams, name) = match codebook {
                CodebookKind::Learned => (
                    load_checkpoint(s.model_path(&model))?.0.extract_probing().beams,
                    "learned",
                ),
                CodebookKind::Dft => (dft_codebook(n, 1)?, "dft"),
                CodebookKind::Odft => (dft_codebook(n, 2)?, "odft"),
            };
            let rows = export_beam_patterns(&beams, &s.config.scenario.geometry, s.config.eval.pattern_resolution)?;
            let path = s.path(&format!("patterns_{name}.csv"));
            write_csv(&path, &rows)?;
            println!("wrote {} pattern rows to {}", rows.len(), path.display());
        }
        Command::Report { common, m, model } => {
            let s = Session::open(&common, overrides)?;
            let path = s.model_path(&model);
            let m = match m {
                Some(m) => m,
                None if path.exists() => load_checkpoint(&path)?.0.n_beams(),
                None => s.config.system.m_bs,
            };
            let n = s.config.system.n_bs;
            let report = overhead_report(m, n, 2 * n)?;
            write_csv(s.path("overhead.csv"), &[report])?;
            println!(
                "{m} probing beams: {:.2}% fewer than {n}-beam DFT, {:.2}% fewer than {}-beam oversampled DFT",
                100.0 * report.reduction_vs_dft,
                100.0 * report.reduction_vs_odft,
                2 * n
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let (args, overrides) = match split_overrides(std::env::args().collect()) {
        Ok(split) => split,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    match run(cli, &overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn overrides_are_split_from_flags() {
        let (rest, overrides) = split_overrides(strings(&[
            "autohp",
            "train",
            "--config",
            "c.toml",
            "--system.n_bs",
            "64",
            "--train.learning_rate=0.01",
        ]))
        .unwrap();
        assert_eq!(rest, strings(&["autohp", "train", "--config", "c.toml"]));
        assert_eq!(
            overrides,
            vec![
                ("system.n_bs".to_string(), "64".to_string()),
                ("train.learning_rate".to_string(), "0.01".to_string())
            ]
        );
    }

    #[test]
    fn dangling_override_is_an_error() {
        assert!(split_overrides(strings(&["autohp", "--system.n_bs"])).is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
