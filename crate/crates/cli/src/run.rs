//! Command dispatch, input parsing and output rendering.

use std::fmt::{self, Write as _};
use std::fs;

use cdiscord::json::format_f64;
use cdiscord::zero_discord::MAX_VERTEX_DIM;
use cdiscord::{
    classical_discord_with_tol, is_conditionally_pure, make_zero_discord_state, merging_sweep,
    stationary_family, stochastic_discord, zero_discord_channels, ChannelFamily, DiscordError, FamilySpec,
    JointDistribution, StochasticChannel,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{Cli, Command, Format};

const DEFAULT_BUDGET: usize = 500;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Parse(String),
    Core(DiscordError),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Io(_) => "Io",
            CliError::Parse(_) => "Parse",
            CliError::Core(e) => e.kind(),
        }
    }

    /// 2 for numerical failures, 1 for everything the caller got wrong.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Parse(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<DiscordError> for CliError {
    fn from(e: DiscordError) -> Self {
        CliError::Core(e)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscordInput {
    state: JointDistribution,
    channel: StochasticChannel,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ZeroStatesInput {
    channel: StochasticChannel,
    #[serde(default)]
    weights: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize)]
struct ZeroStatesOutput {
    family: cdiscord::StationaryFamily,
    weights: Vec<Vec<f64>>,
    sample_state: JointDistribution,
}

#[derive(Serialize)]
struct ZeroChannelsOutput {
    polytope: cdiscord::ChannelPolytope,
    /// Present when the state dimension allows enumeration.
    #[serde(skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<StochasticChannel>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MinDiscordInput {
    state: JointDistribution,
    family: FamilySpec,
    #[serde(default)]
    budget: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MergeDemoInput {
    q_points: usize,
    eps_points: usize,
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if !(cli.tolerance > 0.0 && cli.tolerance.is_finite()) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", cli.tolerance)));
    }
    let path = cli
        .input
        .as_deref()
        .ok_or_else(|| CliError::Usage("--input is required".into()))?;
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let rendered = render(cli, &text)?;
    match &cli.output {
        Some(out) => fs::write(out, rendered).map_err(|e| CliError::Io(format!("{}: {e}", out.display()))),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = cdiscord::json::to_string(value).map_err(|e| CliError::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_unavailable(command: &str) -> CliError {
    CliError::Usage(format!("--format csv is not available for {command}"))
}

fn render(cli: &Cli, text: &str) -> Result<String, CliError> {
    let tol = cli.tolerance;
    match cli.command {
        Command::Discord => {
            let input: DiscordInput = parse(text)?;
            let report = classical_discord_with_tol(&input.state, &input.channel, tol)?;
            match cli.format {
                Format::Json => json(&report),
                Format::Csv => Ok(format!(
                    "mutual_information_I,measured_J,discord,is_zero\n{},{},{},{}\n",
                    format_f64(report.mutual_information.value()),
                    format_f64(report.measured.value()),
                    format_f64(report.discord.value()),
                    report.is_zero
                )),
            }
        }
        Command::ZeroStates => {
            let input: ZeroStatesInput = parse(text)?;
            let family = stationary_family(&input.channel)?;
            // default: one row per stationary vector, equally weighted
            let weights = input.weights.unwrap_or_else(|| {
                let r = family.rank();
                (0..r)
                    .map(|j| (0..r).map(|k| if j == k { 1.0 / r as f64 } else { 0.0 }).collect())
                    .collect()
            });
            let sample_state = make_zero_discord_state(&family, &weights)?;
            let out = ZeroStatesOutput {
                family,
                weights,
                sample_state,
            };
            match cli.format {
                Format::Json => json(&out),
                Format::Csv => {
                    let mut s = String::from("vector,state,probability\n");
                    for (k, v) in out.family.vectors.iter().enumerate() {
                        for (i, x) in v.iter().enumerate() {
                            writeln!(s, "{k},{i},{}", format_f64(*x)).unwrap();
                        }
                    }
                    Ok(s)
                }
            }
        }
        Command::ZeroChannels => {
            if cli.format == Format::Csv {
                return Err(csv_unavailable("zero-channels"));
            }
            let state: JointDistribution = parse(text)?;
            let polytope = zero_discord_channels(&state)?;
            let vertices = if state.dim_b() <= MAX_VERTEX_DIM {
                Some(polytope.vertices()?)
            } else {
                None
            };
            json(&ZeroChannelsOutput { polytope, vertices })
        }
        Command::MinDiscord => {
            if cli.format == Format::Csv {
                return Err(csv_unavailable("min-discord"));
            }
            let input: MinDiscordInput = parse(text)?;
            let family = ChannelFamily::from_spec(input.family, Some(input.state.dim_b()))?;
            let budget = input.budget.unwrap_or(DEFAULT_BUDGET);
            json(&stochastic_discord(&input.state, &family, budget, cli.seed)?)
        }
        Command::MergeDemo => {
            let input: MergeDemoInput = parse(text)?;
            let rows = merging_sweep(input.q_points, input.eps_points)?;
            match cli.format {
                Format::Json => json(&rows),
                Format::Csv => {
                    let mut s = String::from("q,eps,discord_AC,H_A_given_Cprime,H_A_given_Bprime,discrepancy\n");
                    for r in &rows {
                        let fields = [
                            r.q,
                            r.eps,
                            r.report.discord_ac.value(),
                            r.report.h_a_given_c_noisy.value(),
                            r.report.h_a_given_b_noisy.value(),
                            r.report.max_discrepancy,
                        ];
                        let line: Vec<String> = fields.iter().map(|&x| format_f64(x)).collect();
                        writeln!(s, "{}", line.join(",")).unwrap();
                    }
                    Ok(s)
                }
            }
        }
        Command::PurityCheck => {
            if cli.format == Format::Csv {
                return Err(csv_unavailable("purity-check"));
            }
            let state: JointDistribution = parse(text)?;
            json(&is_conditionally_pure(&state, tol))
        }
    }
}
