//! The `sfqrm` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error, 3 I/O error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::bits::{BitBlock, BitRole};
use crate::codec::{DecodeMode, DecodeStatus, RmCode};
use crate::error::Error;
use crate::mc::{compare_arms, fault_tolerance_census, Arm, ExperimentSpec};
use crate::netlist::{build_no_encoder, build_rm13_reference, FaultPlan, Netlist};
use crate::sim::{SimConfig, Simulator, SpreadModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sfqrm", version, about = "RM(1,3) encoder workbench for SFQ-to-CMOS links")]
pub struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for generated files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON file with defaults; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode a message into a codeword.
    Encode {
        /// Code order and length parameter, e.g. `1,4`.
        #[arg(long, value_parser = parse_rm, default_value = "1,3")]
        rm: (usize, usize),
        message: String,
    },
    /// Decode a received block.
    Decode {
        #[arg(long, value_parser = parse_rm, default_value = "1,3")]
        rm: (usize, usize),
        #[arg(long, default_value = "correct", value_parser = parse_mode)]
        mode: DecodeMode,
        codeword: String,
    },
    /// Stream messages through a netlist and report the received blocks.
    Simulate {
        #[arg(long, conflicts_with = "builtin")]
        netlist: Option<PathBuf>,
        #[arg(long, value_enum)]
        builtin: Option<Builtin>,
        /// Comma-separated message bit strings; may be empty.
        #[arg(long, default_value = "")]
        messages: String,
        /// Fault plan as inline JSON or `@path`.
        #[arg(long)]
        faults: Option<String>,
        /// Write the sampled output waveforms as CSV to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Monte-Carlo yield experiment over sampled realizations.
    Montecarlo {
        #[arg(long, default_value = "all")]
        arm: String,
        #[arg(long)]
        realizations: Option<usize>,
        #[arg(long)]
        messages: Option<usize>,
        /// Comma-separated open-fault probabilities.
        #[arg(long)]
        fault_prob: Option<String>,
        /// Parameter spread in percent (e.g. 20 for ±20%), using the reference margins.
        #[arg(long)]
        ppv: Option<f64>,
        /// Worker threads; results do not depend on it.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Classify every small set of simultaneously open cells.
    Census {
        #[arg(long, default_value_t = 1)]
        max_size: usize,
        #[arg(long, conflicts_with = "builtin")]
        netlist: Option<PathBuf>,
        #[arg(long, value_enum)]
        builtin: Option<Builtin>,
    },
    /// Parse and lint a netlist file.
    Validate { file: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Builtin {
    Rm13,
    NoEncoder,
}

/// Optional JSON defaults for the `--config` flag.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub realizations: Option<usize>,
    pub messages: Option<usize>,
    pub fault_prob: Option<Vec<f64>>,
    pub ppv: Option<f64>,
    pub workers: Option<usize>,
    pub spread: Option<SpreadModel>,
    pub sim: Option<SimConfig>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_IO,
            _ => EXIT_DATA,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse_rm(s: &str) -> std::result::Result<(usize, usize), String> {
    let (r, m) = s.split_once(',').ok_or("expected `r,m`")?;
    let r = r.trim().parse().map_err(|_| format!("bad r in `{s}`"))?;
    let m = m.trim().parse().map_err(|_| format!("bad m in `{s}`"))?;
    Ok((r, m))
}

fn parse_mode(s: &str) -> std::result::Result<DecodeMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses a bit string argument; malformed input is a usage error.
fn bits_arg(s: &str, len: usize, role: BitRole) -> CliResult<BitBlock> {
    let block = BitBlock::parse(s, role).map_err(|e| CliError::usage(e.to_string()))?;
    if block.len() != len {
        return Err(CliError::usage(format!(
            "expected {len} bits, got {} in `{s}`",
            block.len()
        )));
    }
    Ok(block)
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    })
}

fn write(dir: &Path, name: &str, text: &str) -> CliResult<PathBuf> {
    let io = |e: std::io::Error| CliError {
        code: EXIT_IO,
        message: format!("{}: {e}", dir.display()),
    };
    fs::create_dir_all(dir).map_err(io)?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(io)?;
    Ok(path)
}

fn code_arg((r, m): (usize, usize)) -> CliResult<RmCode> {
    RmCode::new(r, m).map_err(|e| CliError::usage(e.to_string()))
}

fn load_netlist(path: Option<&Path>, builtin: Option<Builtin>) -> CliResult<Netlist> {
    match (path, builtin) {
        (Some(p), _) => Ok(Netlist::parse(&read(p)?)?),
        (None, Some(Builtin::NoEncoder)) => Ok(build_no_encoder()),
        (None, _) => Ok(build_rm13_reference()),
    }
}

fn cmd_encode(rm: (usize, usize), message: &str) -> CliResult<String> {
    let code = code_arg(rm)?;
    let msg = bits_arg(message, code.k(), BitRole::Message)?;
    Ok(format!("{}\n", code.encode(&msg)?))
}

fn cmd_decode(rm: (usize, usize), mode: DecodeMode, codeword: &str) -> CliResult<String> {
    let code = code_arg(rm)?;
    let rx = bits_arg(codeword, code.n(), BitRole::Codeword)?;
    let out = code.decode(&rx, mode)?;
    Ok(match (out.status, &out.decoded) {
        (DecodeStatus::Corrected, Some(m)) => {
            let pos: Vec<String> = out.corrected_positions.iter().map(|p| p.to_string()).collect();
            format!("{m} corrected @{}\n", pos.join(","))
        }
        (status, Some(m)) => format!("{m} {status}\n"),
        (status, None) => format!("{status}\n"),
    })
}

fn cmd_simulate(
    net: &Netlist,
    messages: &str,
    faults: Option<&str>,
    trace: Option<&Path>,
    cfg: &SimConfig,
    seed: u64,
) -> CliResult<String> {
    let sim = Simulator::new(net)?;
    let msgs = messages
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| bits_arg(s, sim.input_count(), BitRole::Message))
        .collect::<CliResult<Vec<_>>>()?;
    let plan = match faults {
        Some(text) => {
            let json = match text.strip_prefix('@') {
                Some(path) => read(Path::new(path))?,
                None => text.to_string(),
            };
            FaultPlan::from_json(&json)?
        }
        // noise (if enabled) is keyed by the plan's seed
        None => FaultPlan {
            seed,
            ..FaultPlan::default()
        },
    };
    let expected = sim.run(&FaultPlan::default(), &msgs, cfg)?.received();
    let output = sim.run(&plan, &msgs, cfg)?;
    if let Some(path) = trace {
        let text = output.trace_csv(cfg);
        fs::write(path, text).map_err(|e| CliError {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        })?;
    }
    let mut report = String::from("# message sent received bit_errors\n");
    for ((m, tx), rx) in msgs.iter().zip(&expected).zip(output.received()) {
        let _ = writeln!(report, "{m} {tx} {rx} {}", tx.distance(&rx));
    }
    Ok(report)
}

struct McOptions {
    arms: Vec<Arm>,
    fault_probs: Vec<f64>,
    spread: Option<SpreadModel>,
    base: ExperimentSpec,
}

fn fmt_prob(p: f64) -> String {
    format!("{p}")
}

fn cmd_montecarlo(opts: &McOptions, out_dir: &Path) -> CliResult<String> {
    let mut report = String::new();
    for &fp in &opts.fault_probs {
        let specs: Vec<ExperimentSpec> = opts
            .arms
            .iter()
            .map(|&arm| ExperimentSpec {
                arm,
                fault_prob: fp,
                spread: opts.spread.clone(),
                ..opts.base.clone()
            })
            .collect();
        let cmp = compare_arms(&specs)?;
        let suffix = match &opts.spread {
            Some(s) => format!("fp{}_ppv{}", fmt_prob(fp), fmt_prob(s.spread_pct * 100.0)),
            None => format!("fp{}", fmt_prob(fp)),
        };
        for res in &cmp.results {
            let stem = format!("cdf_{}_{suffix}", res.spec.arm);
            write(out_dir, &format!("{stem}.csv"), &res.cdf.to_csv())?;
            write(out_dir, &format!("{stem}.json"), &res.cdf.to_json())?;
            let _ = writeln!(
                report,
                "fault_prob={} arm={} P(N_err=0)={:.4}",
                fmt_prob(fp),
                res.spec.arm,
                res.cdf.p_zero()
            );
        }
        if let Some(v) = cmp.dominance_violations {
            let _ = writeln!(report, "fault_prob={} dominance_violations={v}", fmt_prob(fp));
        }
    }
    Ok(report)
}

fn cmd_census(net: &Netlist, max_size: usize, out_dir: &Path) -> CliResult<String> {
    let report = fault_tolerance_census(net, max_size)?;
    write(out_dir, "census.csv", &report.to_csv())?;
    write(out_dir, "census.json", &report.to_json())?;
    let mut text = String::new();
    for (size, s) in report.summary() {
        let _ = writeln!(
            text,
            "size {size}: harmless {} correctable {} uncorrectable {} total {}",
            s.harmless,
            s.correctable,
            s.uncorrectable,
            s.total()
        );
    }
    if max_size >= 1 {
        let exclusive = net.channel_exclusive_cells();
        let ok = exclusive
            .iter()
            .filter(|id| {
                report
                    .row(&[id])
                    .is_some_and(|r| r.worst_bit_errors <= report.correction_radius)
            })
            .count();
        let _ = writeln!(
            text,
            "channel-exclusive singletons correctable: {ok}/{}",
            exclusive.len()
        );
    }
    Ok(text)
}

fn cmd_validate(path: &Path) -> CliResult<String> {
    let net = Netlist::parse(&read(path)?)?;
    let depth = net.pipeline_depth()?;
    Ok(format!(
        "ok: {} cells, {} inputs, {} outputs, {} clock splitters, depth {depth}\n",
        net.cell_count(),
        net.inputs().len(),
        net.outputs().len(),
        net.clock_tree().len()
    ))
}

fn parse_arms(s: &str) -> CliResult<Vec<Arm>> {
    if s == "all" {
        return Ok(Arm::ALL.to_vec());
    }
    s.split(',')
        .map(|a| a.trim().parse::<Arm>().map_err(|e| CliError::usage(e.to_string())))
        .collect()
}

fn parse_probs(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("bad fault probability `{p}`")))
        })
        .collect()
}

fn execute(cli: Cli) -> CliResult<String> {
    let config: ConfigFile = match &cli.config {
        Some(path) => serde_json::from_str(&read(path)?).map_err(|e| CliError {
            code: EXIT_DATA,
            message: format!("{}: {e}", path.display()),
        })?,
        None => ConfigFile::default(),
    };
    let seed = cli.seed.or(config.seed).unwrap_or(0);
    let out_dir = cli
        .out
        .clone()
        .or(config.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let sim_cfg = config.sim.clone().unwrap_or_default();
    sim_cfg.validate()?;

    match cli.command {
        Command::Encode { rm, message } => cmd_encode(rm, &message),
        Command::Decode { rm, mode, codeword } => cmd_decode(rm, mode, &codeword),
        Command::Simulate {
            netlist,
            builtin,
            messages,
            faults,
            trace,
        } => {
            let net = load_netlist(netlist.as_deref(), builtin)?;
            cmd_simulate(&net, &messages, faults.as_deref(), trace.as_deref(), &sim_cfg, seed)
        }
        Command::Montecarlo {
            arm,
            realizations,
            messages,
            fault_prob,
            ppv,
            workers,
        } => {
            let arms = parse_arms(&arm)?;
            let fault_probs = match fault_prob {
                Some(s) => parse_probs(&s)?,
                None => config.fault_prob.clone().unwrap_or_else(|| vec![0.0]),
            };
            let spread = match (ppv.or(config.ppv), config.spread) {
                (Some(pct), base) => Some(base.unwrap_or_else(SpreadModel::reference).at_spread(pct / 100.0)?),
                (None, base) => base,
            };
            let defaults = ExperimentSpec::default();
            let base = ExperimentSpec {
                realizations: realizations.or(config.realizations).unwrap_or(defaults.realizations),
                messages_per_realization: messages
                    .or(config.messages)
                    .unwrap_or(defaults.messages_per_realization),
                seed,
                sim: sim_cfg,
                workers: workers.or(config.workers).unwrap_or(0),
                ..defaults
            };
            let opts = McOptions {
                arms,
                fault_probs,
                spread,
                base,
            };
            // flags validate before any computation
            for &fp in &opts.fault_probs {
                ExperimentSpec {
                    fault_prob: fp,
                    spread: opts.spread.clone(),
                    ..opts.base.clone()
                }
                .validate()?;
            }
            cmd_montecarlo(&opts, &out_dir)
        }
        Command::Census {
            max_size,
            netlist,
            builtin,
        } => {
            let net = load_netlist(netlist.as_deref(), builtin)?;
            cmd_census(&net, max_size, &out_dir)
        }
        Command::Validate { file } => cmd_validate(&file),
    }
}

/// Runs the tool on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                Ok(()) => EXIT_OK,
                Err(_) => EXIT_IO,
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rm_flag() {
        assert_eq!(parse_rm("1,4"), Ok((1, 4)));
        assert!(parse_rm("14").is_err());
    }

    #[test]
    fn encode_and_decode_strings() {
        assert_eq!(cmd_encode((1, 3), "1010").unwrap(), "00110011\n");
        assert_eq!(
            cmd_decode((1, 3), DecodeMode::Correct, "10110011").unwrap(),
            "1010 corrected @1\n"
        );
        assert_eq!(
            cmd_decode((1, 3), DecodeMode::Correct, "00110011").unwrap(),
            "1010 clean\n"
        );
        assert_eq!(
            cmd_decode((1, 3), DecodeMode::DetectOnly, "10110011").unwrap(),
            "detected_uncorrectable\n"
        );
        assert_eq!(cmd_encode((1, 3), "10a0").unwrap_err().code, EXIT_USAGE);
        assert_eq!(cmd_encode((1, 3), "101").unwrap_err().code, EXIT_USAGE);
    }

    #[test]
    fn arm_and_prob_lists() {
        assert_eq!(parse_arms("all").unwrap().len(), 3);
        assert_eq!(parse_arms("no_encoder").unwrap(), vec![Arm::NoEncoder]);
        assert!(parse_arms("x").is_err());
        assert_eq!(parse_probs("0.001,0.01").unwrap(), vec![0.001, 0.01]);
    }
}
