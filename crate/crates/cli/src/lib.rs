//! The `bifree` command line. [`run`] takes the argument list and returns
//! the exit code with everything that would be printed.

pub mod examples;
pub mod scenario;

use bifree::base_algebra::{BElem, Bimodule, OperatorSpace};
use bifree::bnc_core::{
    enumerate_bnc, is_bi_noncrossing, is_lateral_refinement, join_bnc, kreweras, meet_bnc, refines, side_permutation,
    BncPartition, SetPartition, ShadingMap, Side, SideMap,
};
use bifree::incidence::mobius_bnc;
use bifree::lr_diagrams::{enumerate_lr, lateral_coefficients};
use bifree::moment_cumulant::{bnc_list, e_pi, kappa_pi, trace, OperatorTuple};
use bifree::scalar::fmt_q;
use bifree::suites::{ground_truth_on, render_report, run_suite, suite_number, SuiteParams, SuiteReport, SUITES};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scenario::Scenario;
use std::ffi::OsString;
use std::fmt::Write;
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "bifree", version, about = "Bi-free probability with amalgamation over M_d(Q), in exact arithmetic")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Bi-non-crossing partitions.
    Bnc {
        #[command(subcommand)]
        op: BncOp,
    },
    /// μ_BNC(π, σ); defaults to μ(0_χ, 1_χ).
    Mobius {
        #[arg(long)]
        chi: String,
        #[arg(long)]
        pi: Option<String>,
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Kreweras complement in BNC(χ).
    Kreweras {
        #[arg(long)]
        chi: String,
        #[arg(long)]
        pi: String,
    },
    /// LR diagrams of (χ, ε).
    Lr {
        #[arg(long)]
        chi: String,
        #[arg(long)]
        eps: String,
        /// Only diagrams with this many strings reaching the top.
        #[arg(long)]
        stratum: Option<usize>,
        /// Print the lateral closure with its coefficients instead.
        #[arg(long)]
        lateral: bool,
    },
    /// The nested expression of E_π, and its value with --value.
    Epi(EvalArgs),
    /// κ_π as a Möbius sum of E_σ, and its value with --value.
    Kappa(EvalArgs),
    /// Run a verification suite by name or number, or `all`.
    Verify(VerifyArgs),
    /// Replay the worked examples; `list` names them.
    Examples {
        #[arg(default_value = "all")]
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum BncOp {
    /// Every π ∈ BNC(χ), one per line.
    Enumerate {
        #[arg(long)]
        chi: String,
    },
    /// Whether π is bi-non-crossing for χ.
    Check {
        #[arg(long)]
        chi: String,
        #[arg(long)]
        pi: String,
    },
    /// s_χ as a list of images.
    Permutation {
        #[arg(long)]
        chi: String,
    },
    Meet {
        #[arg(long)]
        chi: String,
        #[arg(long)]
        pi: String,
        #[arg(long)]
        sigma: String,
    },
    Join {
        #[arg(long)]
        chi: String,
        #[arg(long)]
        pi: String,
        #[arg(long)]
        sigma: String,
    },
    /// Whether π ≤ σ, or π ≤_lat σ with --lateral.
    Refines {
        #[arg(long)]
        chi: String,
        #[arg(long)]
        pi: String,
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        lateral: bool,
    },
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    chi: String,
    #[arg(long)]
    pi: String,
    /// Evaluate on operators: random ones from --seed, or --ops from a scenario.
    #[arg(long)]
    value: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Scenario operator indices, one per position.
    #[arg(long)]
    ops: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name or number, or `all`.
    suite: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Emit the reports as JSON.
    #[arg(long)]
    json: bool,
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

type CmdResult = Result<bool, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let mut out = String::new();
    let result = dispatch(cli.cmd, &mut out);
    match result {
        Ok(true) => Outcome { code: 0, stdout: out, stderr: String::new() },
        Ok(false) => Outcome { code: 1, stdout: out, stderr: String::new() },
        Err(e) => Outcome { code: 1, stdout: out, stderr: format!("error: {e}\n") },
    }
}

fn dispatch(cmd: Cmd, out: &mut String) -> CmdResult {
    match cmd {
        Cmd::Bnc { op } => bnc(op, out),
        Cmd::Mobius { chi, pi, sigma } => {
            let chi = parse_chi(&chi)?;
            let p = pi.map_or(Ok(BncPartition::zero(&chi)), |s| parse_pi(&s, &chi, "--pi"))?;
            let s = sigma.map_or(Ok(BncPartition::one(&chi)), |s| parse_pi(&s, &chi, "--sigma"))?;
            let mu = mobius_bnc(&p, &s).map_err(err)?;
            writeln!(out, "mu({p}, {s}) = {}", fmt_q(&mu)).unwrap();
            Ok(true)
        }
        Cmd::Kreweras { chi, pi } => {
            let chi = parse_chi(&chi)?;
            let p = parse_pi(&pi, &chi, "--pi")?;
            writeln!(out, "{}", kreweras(&p)).unwrap();
            Ok(true)
        }
        Cmd::Lr { chi, eps, stratum, lateral } => lr(&chi, &eps, stratum, lateral, out),
        Cmd::Epi(a) => evaluate(a, false, out),
        Cmd::Kappa(a) => evaluate(a, true, out),
        Cmd::Verify(a) => verify(a, out),
        Cmd::Examples { name, seed } => examples::run(&name, seed, out),
    }
}

fn parse_chi(s: &str) -> Result<SideMap, String> {
    SideMap::parse(s).map_err(|e| format!("--chi: {e}"))
}

fn parse_pi(s: &str, chi: &SideMap, flag: &str) -> Result<BncPartition, String> {
    BncPartition::parse(s, chi).map_err(|e| format!("{flag}: {e}"))
}

fn bnc(op: BncOp, out: &mut String) -> CmdResult {
    match op {
        BncOp::Enumerate { chi } => {
            for p in enumerate_bnc(&parse_chi(&chi)?).map_err(err)? {
                writeln!(out, "{p}").unwrap();
            }
        }
        BncOp::Check { chi, pi } => {
            let chi = parse_chi(&chi)?;
            let p = SetPartition::parse(&pi).map_err(|e| format!("--pi: {e}"))?;
            writeln!(out, "{}", is_bi_noncrossing(&p, &chi).map_err(err)?).unwrap();
        }
        BncOp::Permutation { chi } => {
            let s = side_permutation(&parse_chi(&chi)?);
            let images: Vec<String> = s.images().iter().map(|x| (x + 1).to_string()).collect();
            writeln!(out, "{}", images.join(",")).unwrap();
        }
        BncOp::Meet { chi, pi, sigma } => {
            let chi = parse_chi(&chi)?;
            let r = meet_bnc(&parse_pi(&pi, &chi, "--pi")?, &parse_pi(&sigma, &chi, "--sigma")?).map_err(err)?;
            writeln!(out, "{r}").unwrap();
        }
        BncOp::Join { chi, pi, sigma } => {
            let chi = parse_chi(&chi)?;
            let r = join_bnc(&parse_pi(&pi, &chi, "--pi")?, &parse_pi(&sigma, &chi, "--sigma")?).map_err(err)?;
            writeln!(out, "{r}").unwrap();
        }
        BncOp::Refines { chi, pi, sigma, lateral } => {
            let chi = parse_chi(&chi)?;
            let (p, s) = (parse_pi(&pi, &chi, "--pi")?, parse_pi(&sigma, &chi, "--sigma")?);
            let r = if lateral { is_lateral_refinement(&p, &s) } else { refines(&p, &s) }.map_err(err)?;
            writeln!(out, "{r}").unwrap();
        }
    }
    Ok(true)
}

fn lr(chi: &str, eps: &str, stratum: Option<usize>, lateral: bool, out: &mut String) -> CmdResult {
    let chi = parse_chi(chi)?;
    let eps = ShadingMap::parse(eps).map_err(|e| format!("--eps: {e}"))?;
    if lateral {
        let all = lateral_coefficients(&chi, &eps).map_err(err)?;
        writeln!(out, "chi={chi} eps={eps} lateral closure: {} diagrams", all.len()).unwrap();
        for (d, c) in all.iter().filter(|(d, _)| stratum.is_none_or(|k| d.stratum() == k)) {
            writeln!(out, "{c:>4}  {d}").unwrap();
        }
    } else {
        let all = enumerate_lr(&chi, &eps).map_err(err)?;
        writeln!(out, "chi={chi} eps={eps}: {} diagrams", all.len()).unwrap();
        for d in all.iter().filter(|d| stratum.is_none_or(|k| d.stratum() == k)) {
            writeln!(out, "{d}").unwrap();
        }
    }
    Ok(true)
}

fn value_of<S: OperatorSpace>(pi: &BncPartition, t: &OperatorTuple<S>, kappa: bool) -> Result<BElem, String> {
    if kappa { kappa_pi(pi, t) } else { e_pi(pi, t) }.map_err(err)
}

fn evaluate(a: EvalArgs, kappa: bool, out: &mut String) -> CmdResult {
    let chi = parse_chi(&a.chi)?;
    let pi = parse_pi(&a.pi, &chi, "--pi")?;
    writeln!(out, "chi={chi} pi={pi} seed={}", a.seed).unwrap();
    if kappa {
        writeln!(out, "kappa_pi = sum over sigma <= pi of mu(sigma, pi) E_sigma").unwrap();
        for sigma in bnc_list(&chi).map_err(err)?.iter() {
            if sigma.partition().refines(pi.partition()) {
                let mu = mobius_bnc(sigma, &pi).map_err(err)?;
                if mu != bifree::scalar::q(0) {
                    writeln!(out, "  {:>4}  {}", fmt_q(&mu), trace(sigma, false)).unwrap();
                }
            }
        }
    } else {
        writeln!(out, "E_pi = {}", trace(&pi, false)).unwrap();
    }
    if !a.value && a.scenario.is_none() {
        return Ok(true);
    }
    let v = match &a.scenario {
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let x = Arc::new(Bimodule::random(2, 1, &mut rng));
            let ops = chi
                .sides()
                .iter()
                .map(|s| match s {
                    Side::Left => x.random_left_operator(2, &mut rng),
                    Side::Right => x.random_right_operator(2, &mut rng),
                })
                .collect();
            value_of(&pi, &OperatorTuple::new(x, chi.clone(), ops).map_err(err)?, kappa)?
        }
        Some(path) => {
            let s = load_scenario(path)?;
            let r = s.realize(chi.len()).map_err(|e| format!("{}: {e}", path.display()))?;
            let idx: Vec<usize> = a
                .ops
                .as_deref()
                .ok_or("--ops is required with --scenario")?
                .split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|_| format!("--ops: `{x}` is not an index")))
                .collect::<Result<_, _>>()?;
            if idx.len() != chi.len() {
                return Err(format!("--ops: expected {} indices, got {}", chi.len(), idx.len()));
            }
            let mut ops = vec![];
            for (k, &i) in idx.iter().enumerate() {
                let (side, op) = r.ops.get(i).ok_or(format!("--ops: no operator {i} in the scenario"))?;
                if *side != chi.side(k) {
                    return Err(format!("--ops: operator {i} is a {} operator but position {} is {}", side.name(), k + 1, chi.side(k).name()));
                }
                ops.push(op.clone());
            }
            value_of(&pi, &OperatorTuple::new_unchecked(r.space, chi.clone(), ops).map_err(err)?, kappa)?
        }
    };
    writeln!(out, "value = {v}").unwrap();
    Ok(true)
}

fn load_scenario(path: &PathBuf) -> Result<Scenario, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Scenario::parse(&text, &path.display().to_string())
}

fn verify(a: VerifyArgs, out: &mut String) -> CmdResult {
    let scenario = a.scenario.as_ref().map(load_scenario).transpose()?;
    let base = scenario.as_ref().map(|s| s.params.clone()).unwrap_or_default();
    let p = SuiteParams {
        seed: a.seed.unwrap_or(base.seed),
        max_n: a.max_n.or(base.max_n),
        depth: a.depth.or(base.depth),
        window: a.window.or(base.window),
        budget: a.budget.or(base.budget),
    };
    let numbers: Vec<u8> = if a.suite == "all" {
        SUITES.iter().map(|s| s.0).collect()
    } else {
        vec![suite_number(&a.suite).map_err(err)?]
    };
    let mut reports: Vec<SuiteReport> = vec![];
    for k in numbers {
        let r = match &scenario {
            Some(s) if k == 6 && !s.operators.is_empty() => {
                let depth = p.depth.unwrap_or(p.max_n.unwrap_or(5));
                let real = s.realize(depth)?;
                ground_truth_on(&real.space, &real.families, &p)
            }
            _ => run_suite(k, &p),
        }
        .map_err(|e| format!("suite {k}: {e}"))?;
        reports.push(r);
    }
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&reports).map_err(err)?).unwrap();
    } else {
        for r in &reports {
            out.push_str(&render_report(r));
        }
        let failed = reports.iter().filter(|r| !r.passed()).count();
        writeln!(out, "{} suites, {} passed, {} failed", reports.len(), reports.len() - failed, failed).unwrap();
    }
    Ok(reports.iter().all(SuiteReport::passed))
}
