//! Command-line front end. Every command prints or writes a JSON document and
//! exits with 0 (ok), 1 (check failed), 2 (invalid input) or 3 (cap exceeded).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::components::{
    covering_asecs, is_accepting, mec_decomposition, CoveringMode, EndComponent,
};
use crate::error::{Error, Result};
use crate::evaluate::{
    acceptance_probability, brute_force_optimal_average, discounted_value, gain_with_machine,
    optimal_discounted,
};
use crate::io::{
    load_instance, read_json, to_json, Instance, PolicyFile, ReportFile, RmFile, FORMAT_VERSION,
};
use crate::learn::{
    discounted_pac, estimate_mdp, gain_on_hidden, omega_pac, required_samples, run_algorithm1,
    simulate_run, transfer_policy, Simulator,
};
use crate::model::{reward_function_machine, Edge, Mdp, PolicyTable, TableRewardMachine};
use crate::product::{build_product, build_rm_product, lift_policy, ProductMdp};
use crate::translate::{
    certify_translation, translate_known_support, CertifyOptions, Check, GeneralRewardMachine,
    GENERAL_STATE_CAP,
};

#[derive(Debug, Parser)]
#[command(
    name = "omega-rm",
    version,
    about = "Reward machines for omega-regular objectives"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Translate an instance's automaton into a reward machine.
    Translate(TranslateArgs),
    /// Check that a reward machine preserves optimal policies.
    Certify(CertifyArgs),
    /// Learn a policy from simulated samples.
    Solve(SolveArgs),
    /// Evaluate a policy exactly.
    Evaluate(EvaluateArgs),
    /// List end components of the product with the automaton.
    Decompose(DecomposeArgs),
    /// Estimate the model from samples, optionally running a policy.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    KnownSupport,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SupportSource {
    /// The instance's `support` list.
    Declared,
    /// Transitions with positive probability in the instance.
    FromInstance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Covering {
    Efficient,
    Naive,
}

impl From<Covering> for CoveringMode {
    fn from(c: Covering) -> Self {
        match c {
            Covering::Efficient => CoveringMode::Efficient,
            Covering::Naive => CoveringMode::Naive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RewardSource {
    /// Known-support translation of the instance's automaton.
    Translation,
    /// The instance's transition rewards.
    Instance,
}

/// Where rewards come from; `--rm` wins over `--rewards`.
#[derive(Debug, Args)]
pub struct Rewards {
    /// Reward machine file.
    #[arg(long)]
    pub rm: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = RewardSource::Translation)]
    pub rewards: RewardSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Domain {
    /// Only the support transitions.
    Support,
    /// Every syntactically possible transition.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Alg1,
    OmegaPac,
    Discounted,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the result here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TranslateArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::KnownSupport)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = SupportSource::FromInstance)]
    pub support: SupportSource,
    #[arg(long, value_enum, default_value_t = Covering::Efficient)]
    pub covering: Covering,
    /// Transitions the general machine is materialized over.
    #[arg(long, value_enum, default_value_t = Domain::Support)]
    pub domain: Domain,
    /// Largest number of machine states materialized in general mode.
    #[arg(long, default_value_t = GENERAL_STATE_CAP)]
    pub state_cap: usize,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub rm: PathBuf,
    #[arg(long, default_value_t = CertifyOptions::default().state_cap)]
    pub state_cap: usize,
    #[arg(long, default_value_t = CertifyOptions::default().policy_cap)]
    pub policy_cap: u128,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub rewards: Rewards,
    #[arg(long, value_enum)]
    pub alg: Algorithm,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 30)]
    pub kmax: usize,
    #[arg(long, default_value_t = 0.95)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// Independent runs with seeds `seed, seed+1, …`.
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub policy: PathBuf,
    #[command(flatten)]
    pub rewards: Rewards,
    /// Also report the discounted value of a memoryless policy.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Also report the optimal gain over memoryless product policies.
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Covering::Efficient)]
    pub covering: Covering,
    /// Keep product states unreachable from the initial state.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub exhaustive: bool,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Draws per state-action pair; computed from `--accuracy`/`--confidence` when absent.
    #[arg(long)]
    pub samples: Option<u128>,
    /// Target entrywise accuracy of the estimate.
    #[arg(long, default_value_t = 0.1)]
    pub accuracy: f64,
    /// Allowed failure probability of the estimate.
    #[arg(long, default_value_t = 0.1)]
    pub confidence: f64,
    /// Policy to run on the hidden model.
    #[arg(long)]
    pub policy: Option<PathBuf>,
    #[command(flatten)]
    pub rewards: Rewards,
    #[arg(long, default_value_t = 10_000)]
    pub steps: u64,
    #[command(flatten)]
    pub out: Output,
}

/// Outcome of a command before it is written out.
pub struct Outcome {
    pub document: String,
    pub ok: bool,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } => 3,
        _ => 2,
    }
}

/// Parses the process arguments, runs the command and maps the result to an exit code.
pub fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(&cli, &argv) {
        Ok((out, path)) => match emit(&out.document, path.as_deref()) {
            Ok(()) => ExitCode::from(if out.ok { 0 } else { 1 }),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(exit_code(&e))
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn emit(document: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => Ok(fs::write(p, document)?),
        None => {
            print!("{document}");
            Ok(())
        }
    }
}

/// Runs a parsed command; returns the document and where it should go.
pub fn run(cli: &Cli, argv: &[String]) -> Result<(Outcome, Option<PathBuf>)> {
    let started = Instant::now();
    let report = |seed: Option<u64>, results: Value, checks: Vec<Check>| -> Result<Outcome> {
        let ok = checks.iter().all(|c| c.pass);
        let file = ReportFile {
            version: FORMAT_VERSION.into(),
            command: argv.to_vec(),
            seed,
            results,
            checks,
            timings: BTreeMap::from([(
                "total_ms".to_string(),
                started.elapsed().as_secs_f64() * 1e3,
            )]),
        };
        Ok(Outcome {
            document: to_json(&file)?,
            ok,
        })
    };
    match &cli.command {
        Command::Translate(a) => Ok((translate(a)?, a.out.output.clone())),
        Command::Certify(a) => {
            let inst = load_instance(&a.instance)?;
            let r = load_machine(&a.rm, &inst.mdp)?;
            let opts = CertifyOptions {
                state_cap: a.state_cap,
                policy_cap: a.policy_cap,
            };
            let rep = certify_translation(&inst.mdp, &inst.dra, &r, opts)?;
            let mut results = serde_json::to_value(&rep)?;
            if let Some(obj) = results.as_object_mut() {
                obj.remove("checks");
            }
            Ok((report(None, results, rep.checks)?, a.out.output.clone()))
        }
        Command::Solve(a) => {
            let inst = load_instance(&a.instance)?;
            let r = reward_machine(&a.rewards, &inst)?;
            let results = solve(a, &inst.mdp, &r)?;
            Ok((
                report(Some(a.seed), results, Vec::new())?,
                a.out.output.clone(),
            ))
        }
        Command::Evaluate(a) => {
            let inst = load_instance(&a.instance)?;
            let results = evaluate(a, &inst)?;
            Ok((report(None, results, Vec::new())?, a.out.output.clone()))
        }
        Command::Decompose(a) => {
            let inst = load_instance(&a.instance)?;
            let results = decompose(&inst, a.covering.into(), a.exhaustive)?;
            Ok((report(None, results, Vec::new())?, a.out.output.clone()))
        }
        Command::Simulate(a) => {
            let inst = load_instance(&a.instance)?;
            let (results, checks) = simulate(a, &inst)?;
            Ok((report(Some(a.seed), results, checks)?, a.out.output.clone()))
        }
    }
}

fn load_machine(path: &Path, m: &Mdp) -> Result<TableRewardMachine> {
    read_json::<RmFile>(path)?.to_machine(&m.skeleton())
}

fn reward_machine(src: &Rewards, inst: &Instance) -> Result<TableRewardMachine> {
    match (&src.rm, src.rewards) {
        (Some(p), _) => load_machine(p, &inst.mdp),
        (None, RewardSource::Instance) => Ok(reward_function_machine(&inst.mdp)),
        (None, RewardSource::Translation) => translate_known_support(
            &inst.mdp.skeleton(),
            &inst.dra,
            &inst.support(),
            CoveringMode::Efficient,
        ),
    }
}

fn translate(a: &TranslateArgs) -> Result<Outcome> {
    let inst = load_instance(&a.instance)?;
    let sk = inst.mdp.skeleton();
    let support = match a.support {
        SupportSource::FromInstance => crate::translate::SupportSet::of(&inst.mdp),
        SupportSource::Declared => inst
            .declared_support
            .clone()
            .ok_or_else(|| Error::Invalid("instance declares no `support`".into()))?,
    };
    if inst.dra.pairs.is_empty() {
        eprintln!("warning: automaton has no accepting pairs; every reward is 0");
    }
    let file = match a.mode {
        Mode::KnownSupport => {
            let r = translate_known_support(&sk, &inst.dra, &support, a.covering.into())?;
            RmFile::from_machine(&r, &sk, None)
        }
        Mode::General => {
            let g = GeneralRewardMachine::new(
                sk.clone(),
                inst.dra.clone(),
                a.covering.into(),
                a.state_cap,
            );
            let domain: Vec<Edge> = match a.domain {
                Domain::Support => support.edges.iter().copied().collect(),
                Domain::Full => sk.domain().collect(),
            };
            let r = TableRewardMachine::materialize(&g, &domain, a.state_cap)?;
            let declared = (a.domain == Domain::Support).then_some(domain.as_slice());
            RmFile::from_machine(&r, &sk, declared)
        }
    };
    Ok(Outcome {
        document: to_json(&file)?,
        ok: true,
    })
}

fn solve(a: &SolveArgs, m: &Mdp, r: &TableRewardMachine) -> Result<Value> {
    let seeds: Vec<u64> = (0..a.trials).map(|i| a.seed.wrapping_add(i)).collect();
    let jobs = a.jobs.max(1);
    let one = |seed: u64| -> Result<Value> {
        let mut sim = Simulator::new(m.clone(), seed);
        match a.alg {
            Algorithm::Alg1 => Ok(serde_json::to_value(run_algorithm1(&mut sim, r, a.kmax)?)?),
            Algorithm::OmegaPac => {
                let out = omega_pac(&mut sim, r, a.beta, a.eps, a.delta)?;
                let hidden = build_rm_product(m, r, false)?;
                let j_star = brute_force_optimal_average(&hidden.mdp)?.j_star;
                let gain = gain_on_hidden(m, r, &out.product_policy, &out.estimate.product)?;
                Ok(json!({
                    "accuracy": out.accuracy,
                    "samples_per_pair": wide_value(out.samples_per_pair),
                    "total_samples": wide_value(out.total_samples),
                    "estimate_states": out.estimate.product.mdp.num_states(),
                    "estimated_value": out.estimated_value,
                    "gain": gain,
                    "j_star": j_star,
                    "within_delta": gain >= j_star - a.delta,
                    "policy": PolicyFile::from_policy(&out.policy.into(), m),
                }))
            }
            Algorithm::Discounted => {
                let out = discounted_pac(&mut sim, r, a.gamma, a.eps, a.delta)?;
                let hidden = build_rm_product(m, r, false)?;
                let carried = transfer_policy(&out.policy, &out.estimate.product, &hidden);
                let best = optimal_discounted(&hidden.mdp, a.gamma, 1e-9)?;
                let v = discounted_value(&hidden.mdp, &carried, a.gamma)?[hidden.mdp.initial];
                let v_best = discounted_value(&hidden.mdp, &best, a.gamma)?[hidden.mdp.initial];
                let policy = lift_policy(&carried, &hidden)?;
                Ok(json!({
                    "samples_per_pair": wide_value(out.samples_per_pair),
                    "total_samples": wide_value(sim.total_samples()),
                    "value": v,
                    "optimal_value": v_best,
                    "within_eps": v_best - v <= a.eps,
                    "policy": PolicyFile::from_policy(&policy.into(), m),
                }))
            }
        }
    };
    let mut results: Vec<Option<Result<Value>>> = (0..seeds.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (chunk_seeds, chunk_out) in seeds
            .chunks(seeds.len().div_ceil(jobs).max(1))
            .zip(results.chunks_mut(seeds.len().div_ceil(jobs).max(1)))
        {
            let one = &one;
            scope.spawn(move || {
                for (s, slot) in chunk_seeds.iter().zip(chunk_out.iter_mut()) {
                    *slot = Some(one(*s));
                }
            });
        }
    });
    let trials = seeds
        .iter()
        .zip(results)
        .map(|(&seed, r)| Ok(json!({ "seed": seed, "result": r.expect("every trial ran")? })))
        .collect::<Result<Vec<Value>>>()?;
    let name = a.alg.to_possible_value().map(|v| v.get_name().to_string());
    Ok(json!({ "algorithm": name, "trials": trials }))
}

fn wide_value(x: u128) -> Value {
    match u64::try_from(x) {
        Ok(small) => json!(small),
        Err(_) => json!(x.to_string()),
    }
}

fn evaluate(a: &EvaluateArgs, inst: &Instance) -> Result<Value> {
    let m = &inst.mdp;
    let pol = read_json::<PolicyFile>(&a.policy)?.to_policy(m)?;
    let r = reward_machine(&a.rewards, inst)?;
    let mut out = json!({
        "policy_kind": pol.kind(),
        "acceptance": acceptance_probability(m, &inst.dra, &pol)?,
        "gain": gain_with_machine(m, &r, &pol)?,
    });
    if let Some(gamma) = a.gamma {
        match &pol {
            PolicyTable::Memoryless(p) => {
                out["discounted_value"] = json!(discounted_value(m, p, gamma)?[m.initial]);
            }
            PolicyTable::FiniteMemory(_) => {
                return Err(Error::InvalidArgument(
                    "--gamma needs a memoryless policy".into(),
                ));
            }
        }
    }
    if a.oracle {
        let prod = build_rm_product(m, &r, false)?;
        out["j_star"] = json!(brute_force_optimal_average(&prod.mdp)?.j_star);
    }
    Ok(out)
}

fn component_json(p: &ProductMdp, c: &EndComponent) -> Value {
    let act: BTreeMap<&str, Vec<&str>> = c
        .act
        .iter()
        .map(|(&v, acts)| {
            (
                p.mdp.states[v].as_str(),
                acts.iter().map(|&a| p.mdp.actions[a].as_str()).collect(),
            )
        })
        .collect();
    json!({ "actions": act, "accepting_pair": is_accepting(c, &p.pairs) })
}

fn decompose(inst: &Instance, mode: CoveringMode, exhaustive: bool) -> Result<Value> {
    let p = build_product(&inst.mdp, &inst.dra, exhaustive)?;
    let mecs: Vec<Value> = mec_decomposition(&p.mdp)
        .iter()
        .map(|c| component_json(&p, c))
        .collect();
    let cover = covering_asecs(&p, mode)?;
    let asecs: Vec<Value> = cover
        .asecs
        .iter()
        .zip(&cover.hosts)
        .map(|(c, h)| json!({ "component": component_json(&p, c), "host": component_json(&p, h) }))
        .collect();
    let covered: BTreeMap<&str, usize> = cover
        .cover
        .iter()
        .enumerate()
        .filter_map(|(v, i)| i.map(|i| (p.mdp.states[v].as_str(), i)))
        .collect();
    Ok(json!({
        "product_states": p.mdp.states,
        "mecs": mecs,
        "asecs": asecs,
        "cover_index": covered,
    }))
}

fn simulate(a: &SimulateArgs, inst: &Instance) -> Result<(Value, Vec<Check>)> {
    let m = &inst.mdp;
    let n = match a.samples {
        Some(n) => n,
        None => required_samples(
            a.accuracy,
            a.confidence,
            m.p_min(),
            m.num_states(),
            m.num_actions(),
        ),
    };
    let mut sim = Simulator::new(m.clone(), a.seed);
    let est = estimate_mdp(&mut sim, n)?;
    let err = est.max_error(m);
    let mut out = json!({
        "samples_per_pair": wide_value(n),
        "max_error": err,
        "same_support": err.is_some(),
        "estimate": crate::io::InstanceFile::from_instance(&Instance {
            mdp: est.mdp.clone(),
            dra: inst.dra.clone(),
            declared_support: None,
        }).mdp,
    });
    let checks = vec![Check {
        name: "estimate within accuracy".into(),
        pass: est.is_estimate_of(m, a.accuracy),
        detail: format!("largest entrywise error {err:?}, accuracy {}", a.accuracy),
    }];
    if let Some(path) = &a.policy {
        let pol = read_json::<PolicyFile>(path)?.to_policy(m)?;
        let r = reward_machine(&a.rewards, inst)?;
        let run = simulate_run(&mut sim, &pol, &r, a.steps)?;
        out["run"] = serde_json::to_value(run)?;
        out["exact_gain"] = json!(gain_with_machine(m, &r, &pol)?);
    }
    Ok((out, checks))
}
