//! Command line front end. Every subcommand loads a JSON config (or a
//! registered example), runs a computation from the core crate, and prints a
//! single JSON report with stable field order. Exit codes: 0 the check
//! passed, 1 it failed with a witness, 2 undecided within bounds, 3 input
//! error.

mod config;
mod report;
mod verify;
mod words;

use std::path::PathBuf;
use std::process;
use std::time::Instant;

use clap::{Parser, Subcommand};

use vend_core::arith::int;
use vend_core::lattice::Lattice;
use vend_core::nilgroup::SubgroupDesc;
use vend_core::selfsim::{AutExpr, Engine, EqualOutcome, StateSet};
use vend_core::vend::{
    bounds_report, core_compute, derived_chain, finite_state_predict, make_example,
    registered_names, simplicity_decide, strong_simplicity, thm13_check, triple_validate,
    CheckStatus, CoreChain, PredictOutcome, RegistryObject, StrongBounds, StrongOutcome, Triple,
    TripleVerdict, DEFAULT_CORE_ITER,
};

use config::{build_atoms, build_parts, canonical_compact, config_of, is_atoms, parse_config};
use report::{digest, verdict, verdict_with, witness, Report, Timings, Verdict, Witness};
use verify::fmt_index;

#[derive(Parser)]
#[command(name = "vend", about = "virtual endomorphism toolkit", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a config: subgroup membership, index, homomorphism checks.
    Check { config: PathBuf },
    /// Print the wreath recursion of an element to a given depth.
    Repr {
        config: PathBuf,
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Enumerate the states reachable from an element.
    States {
        config: PathBuf,
        #[arg(long)]
        element: String,
        #[arg(long)]
        max: Option<usize>,
    },
    /// Compute the largest subgroup of H normal in G and invariant under f.
    Core {
        config: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CORE_ITER)]
        max_iter: usize,
    },
    /// Decide simplicity of the triple.
    Simple { config: PathBuf },
    /// Search for a witness against strong simplicity.
    Strong {
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
    /// Walk the chain G(i) of iterated preimages.
    Chain {
        config: PathBuf,
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
    /// Spectral test for a finite-state inverse.
    Predict { config: PathBuf },
    /// Decide equality of two words as automaton states.
    Equal {
        config: PathBuf,
        w1: String,
        w2: String,
        #[arg(long)]
        max_pairs: Option<usize>,
    },
    /// Index data for a sublattice: divisor pair of the degree.
    Indices {
        config: PathBuf,
        #[arg(long, num_args = 1.., value_name = "ROW")]
        subgroup: Vec<String>,
    },
    /// Summary report: degree, class, derived length, simplicity bounds.
    Bounds { config: PathBuf },
    /// Run a registered example, optionally with its verification suite.
    Example {
        name: Option<String>,
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        verify_all: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(cli.command, start) {
        Ok((report, code)) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            process::exit(code);
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            process::exit(3);
        }
    }
}

enum Loaded {
    Triple(Box<Triple>),
    Atoms(vend_core::vend::AtomSpec),
}

struct Input {
    digest: String,
    loaded: Loaded,
}

fn load(path: &PathBuf) -> Result<Input, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let cfg = parse_config(&text)?;
    let digest = digest(canonical_compact(&cfg).as_bytes());
    if is_atoms(&cfg) {
        let spec = build_atoms(&cfg)?;
        return Ok(Input { digest, loaded: Loaded::Atoms(spec) });
    }
    let parts = build_parts(&cfg)?;
    let vr = triple_validate(&parts.group, &parts.h, &parts.f, parts.transversal.as_deref());
    if !vr.passed() {
        let bad: Vec<String> = vr
            .checks
            .iter()
            .filter(|c| !c.ok)
            .map(|c| format!("{}: {}", c.label, c.witness.as_deref().unwrap_or("failed")))
            .collect();
        return Err(format!("config does not define a valid triple: {}", bad.join("; ")));
    }
    let mut t = Triple::new(parts.group, parts.h, parts.f).map_err(|e| format!("{e}"))?;
    if let Some(tv) = parts.transversal {
        t.transversal = tv;
    }
    Ok(Input { digest, loaded: Loaded::Triple(Box::new(t)) })
}

fn need_triple(loaded: Loaded) -> Result<Triple, String> {
    match loaded {
        Loaded::Triple(t) => Ok(*t),
        Loaded::Atoms(_) => Err("this command needs a triple config, not an atom table".into()),
    }
}

fn engine_for(loaded: Loaded) -> Result<Engine, String> {
    match loaded {
        Loaded::Triple(t) => Engine::for_triple(*t).map_err(|e| format!("{e}")),
        Loaded::Atoms(spec) => Engine::for_atoms(&spec).map_err(|e| format!("{e}")),
    }
}

fn parse_element(loaded: &Loaded, word: &str) -> Result<AutExpr, String> {
    let w = words::parse_word(word)?;
    match loaded {
        Loaded::Triple(t) => Ok(AutExpr::elem(words::word_on_triple(t, &w)?)),
        Loaded::Atoms(spec) => words::word_on_atoms(spec, &w),
    }
}

fn env_cap(default: usize) -> usize {
    std::env::var("VEND_MAX_STATES")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(default)
}

fn finish(command: &str, digest: String, verdicts: Vec<Verdict>, witnesses: Vec<Witness>, start: Instant, code: i32) -> (Report, i32) {
    let report = Report {
        command: command.to_string(),
        inputs_digest: digest,
        verdicts,
        witnesses,
        timings: Timings { total_ms: start.elapsed().as_millis() },
    };
    (report, code)
}

fn run(cmd: Cmd, start: Instant) -> Result<(Report, i32), String> {
    match cmd {
        Cmd::Check { config } => run_check(&config, start),
        Cmd::Repr { config, element, depth } => run_repr(&config, &element, depth, start),
        Cmd::States { config, element, max } => run_states(&config, &element, max, start),
        Cmd::Core { config, max_iter } => run_core(&config, max_iter, start),
        Cmd::Simple { config } => run_simple(&config, start),
        Cmd::Strong { config, bound } => run_strong(&config, bound, start),
        Cmd::Chain { config, steps } => run_chain(&config, steps, start),
        Cmd::Predict { config } => run_predict(&config, start),
        Cmd::Equal { config, w1, w2, max_pairs } => run_equal(&config, &w1, &w2, max_pairs, start),
        Cmd::Indices { config, subgroup } => run_indices(&config, &subgroup, start),
        Cmd::Bounds { config } => run_bounds(&config, start),
        Cmd::Example { name, params, verify, verify_all } => {
            run_example(name, params, verify, verify_all, start)
        }
    }
}

fn run_check(path: &PathBuf, start: Instant) -> Result<(Report, i32), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let cfg = parse_config(&text)?;
    let dg = digest(canonical_compact(&cfg).as_bytes());
    if is_atoms(&cfg) {
        let spec = build_atoms(&cfg)?;
        let ok = Engine::for_atoms(&spec).is_ok();
        let verdicts = vec![verdict("atom table is well formed", ok)];
        return Ok(finish("check", dg, verdicts, vec![], start, if ok { 0 } else { 1 }));
    }
    let parts = build_parts(&cfg)?;
    let vr = triple_validate(&parts.group, &parts.h, &parts.f, parts.transversal.as_deref());
    let mut verdicts = Vec::new();
    let mut witnesses = Vec::new();
    for c in &vr.checks {
        verdicts.push(verdict(c.label.clone(), c.ok));
        if !c.ok {
            let detail = c.witness.clone().unwrap_or_else(|| "failed".to_string());
            witnesses.push(witness(c.label.clone(), detail));
        }
    }
    if let Some(m) = &vr.m {
        witnesses.push(witness("degree", format!("{m}")));
    }
    let code = if vr.passed() { 0 } else { 1 };
    Ok(finish("check", dg, verdicts, witnesses, start, code))
}

fn run_repr(path: &PathBuf, element: &str, depth: usize, start: Instant) -> Result<(Report, i32), String> {
    let input = load(path)?;
    let expr = parse_element(&input.loaded, element)?;
    let mut eng = engine_for(input.loaded)?;
    let (children, perm) = eng.decompose(&expr).map_err(|e| format!("{e}"))?;
    let mut witnesses = vec![witness("element", expr.to_string())];
    witnesses.push(witness("root permutation", format!("{perm:?}")));
    for (i, c) in children.iter().enumerate() {
        witnesses.push(witness(format!("child {i}"), c.to_string()));
    }
    let portrait = eng.portrait(&expr, depth).map_err(|e| format!("{e}"))?;
    for (d, level) in portrait.levels.iter().enumerate() {
        witnesses.push(witness(
            format!("level {} cycles", d + 1),
            serde_json::to_string(level).expect("permutation list serializes"),
        ));
    }
    let verdicts = vec![verdict(format!("decomposition to depth {depth}"), true)];
    Ok(finish("repr", input.digest, verdicts, witnesses, start, 0))
}

fn run_states(path: &PathBuf, element: &str, max: Option<usize>, start: Instant) -> Result<(Report, i32), String> {
    let input = load(path)?;
    let expr = parse_element(&input.loaded, element)?;
    let cap = max.unwrap_or_else(|| env_cap(1000));
    let mut eng = engine_for(input.loaded)?;
    let st = eng.states(&expr, cap).map_err(|e| format!("{e}"))?;
    let (verdicts, witnesses, code) = match st {
        StateSet::Finite(v) => (
            vec![verdict_with("state set is finite", true, format!("{} states", v.len()))],
            v.iter()
                .take(64)
                .enumerate()
                .map(|(i, s)| witness(format!("state {i}"), s.to_string()))
                .collect(),
            0,
        ),
        StateSet::Exceeded(seen) => (
            vec![verdict_with(
                "state set is finite",
                false,
                format!("more than {cap} states reached (cap {cap})"),
            )],
            vec![witness("states seen", format!("{}", seen.len()))],
            2,
        ),
    };
    Ok(finish("states", input.digest, verdicts, witnesses, start, code))
}

fn fmt_subgroup(s: &SubgroupDesc) -> String {
    let rows: Vec<String> = s
        .w()
        .basis_rows()
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|c| format!("{c}")).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("e = {}, lattice rows = [{}]", s.e(), rows.join(", "))
}

fn run_core(path: &PathBuf, max_iter: usize, start: Instant) -> Result<(Report, i32), String> {
    let input = load(path)?;
    let t = need_triple(input.loaded)?;
    let rep = core_compute(&t, max_iter).map_err(|e| format!("{e}"))?;
    let mut verdicts = vec![verdict_with("route", true, rep.route.to_string())];
    let mut witnesses = Vec::new();
    let code = match &rep.chain {
        CoreChain::Exact(core) => {
            verdicts.push(verdict_with(
                "core chain stabilizes",
                true,
                format!("trivial = {}", core.is_trivial()),
            ));
            witnesses.push(witness("core", fmt_subgroup(core)));
            0
        }
        CoreChain::Bounded { lower, upper, iterations } => {
            verdicts.push(verdict_with(
                "core chain stabilizes",
                false,
                format!("still moving after {iterations} iterations"),
            ));
            witnesses.push(witness("lower bound", fmt_subgroup(lower)));
            witnesses.push(witness("upper bound", fmt_subgroup(upper)));
            2
        }
    };
    Ok(finish("core", input.digest, verdicts, witnesses, start, code))
}

fn run_simple(path: &PathBuf, start: Instant) -> Result<(Report, i32), String> {
    let input = load(path)?;
    let t = need_triple(input.loaded)?;
    let rep = simplicity_decide(&t).map_err(|e| format!("{e}"))?;
    let mut witnesses = Vec::new();
    let (ok_label, code) = match &rep.status {
        TripleVerdict::Simple => (verdict_with("triple is simple", true, rep.route), 0),
        TripleVerdict::NotSimple => {
            if let CoreChain::Exact(core) = &rep.chain {
                witnesses.push(witness("invariant core", fmt_subgroup(core)));
            }
            (verdict_with("triple is simple", false, rep.route), 1)
        }
        TripleVerdict::Undecided(why) => {
            witnesses.push(witness("reason", why.clone()));
            (verdict_with("triple is simple", false, "undecided"), 2)
        }
    };
    Ok(finish("simple", input.digest, vec![ok_label], witnesses, start, code))
}

fn run_strong(path: &PathBuf, bound: i64, start: Instant) -> Result<(Report, i32), String> {
    let input = load(path)?;
    let t = need_triple(input.loaded)?;
    let bounds = StrongBounds { power_exponent: bound, coeff_box: bound };
    let so = strong_simplicity(&t, &bounds).map_err(|e| format!("{e}"))?;
    let (verdicts, witnesses, code) = match so {
        StrongOutcome::StronglySimple => {
            (vec![verdict("triple is strongly simple", true)], vec![], 0)
        }
        StrongOutcome::WitnessFound { subgroup, certificate } => (
            vec![verdict_with("triple is strongly simple", false, "witness subgroup found")],
            vec![
                witness("witness subgroup", fmt_subgroup(&subgroup)),
                witness("certificate", certificate),
            ],
            1,
        ),
        StrongOutcome::NoWitnessUpTo { detail } => (
            vec![verdict_with("triple is strongly simple", false, "no witness within bounds")],
            vec![witness("search detail", detail)],
            2,
        ),
    };
    Ok(finish("strong", input.digest, verdicts, witnesses, start, code))
}

fn run_chain(path: &PathBuf, steps: usize, start: Instant) -> Result<(Report, i32), String> {
    let input = load(path)?;
    let t = need_triple(input.loaded)?;
    let rep = derived_chain(&t, steps).map_err(|e| format!("{e}"))?;
    let mut verdicts = Vec::new();
    let mut witnesses = Vec::new();
    for (i, step) in rep.steps.iter().enumerate() {
        let i = i + 1;
        witnesses.push(witness(
            format!("G({i})"),
            format!("index {}, {}", fmt_index(&step.index), fmt_subgroup(&step.g_i)),
        ));
        if let Some(p2) = step.prop2 {
            verdicts.push(verdict(format!("index product law at step {i}"), p2));
        }
    }
    if let Some(msg) = &rep.truncated {
        witnesses.push(witness("truncated", msg.clone()));
    }
    let ok = verdicts.iter().all(|v| v.ok);
    verdicts.insert(0, verdict_with("chain computed", true, format!("{} steps", rep.steps.len())));
    Ok(finish("chain", input.digest, verdicts, witnesses, start, if ok { 0 } else { 1 }))
}

fn run_predict(path: &PathBuf, start: Instant) -> Result<(Report, i32), String> {
    let input = load(path)?;
    let t = need_triple(input.loaded)?;
    let rep = finite_state_predict(&t).map_err(|e| format!("{e}"))?;
    let basis = if rep.heuristic {
        "spectral test, heuristic at this degree"
    } else {
        "spectral test, conclusive at degree two"
    };
    let (v, code) = match &rep.outcome {
        PredictOutcome::Predicted => {
            (verdict_with("finite-state inverse predicted", true, basis), 0)
        }
        PredictOutcome::NotPredicted => {
            (verdict_with("finite-state inverse predicted", false, basis), 1)
        }
        PredictOutcome::Inapplicable(why) => {
            (verdict_with("finite-state inverse predicted", false, why.clone()), 2)
        }
    };
    Ok(finish("predict", input.digest, vec![v], vec![], start, code))
}

fn run_equal(path: &PathBuf, w1: &str, w2: &str, max_pairs: Option<usize>, start: Instant) -> Result<(Report, i32), String> {
    let input = load(path)?;
    let a = parse_element(&input.loaded, w1)?;
    let b = parse_element(&input.loaded, w2)?;
    let cap = max_pairs.unwrap_or_else(|| env_cap(50_000));
    let mut eng = engine_for(input.loaded)?;
    let outcome = eng.equal(&a, &b, cap).map_err(|e| format!("{e}"))?;
    let (verdicts, witnesses, code) = match outcome {
        EqualOutcome::Equal => (vec![verdict("words are equal", true)], vec![], 0),
        EqualOutcome::NotEqual(vertex) => (
            vec![verdict_with("words are equal", false, "actions differ")],
            vec![witness("separating vertex", vertex)],
            1,
        ),
        EqualOutcome::Unknown => (
            vec![verdict_with("words are equal", false, format!("pair budget {cap} exhausted"))],
            vec![],
            2,
        ),
    };
    Ok(finish("equal", input.digest, verdicts, witnesses, start, code))
}

fn parse_rows(rows: &[String], rank: usize) -> Result<Vec<Vec<vend_core::arith::Int>>, String> {
    let mut out = Vec::new();
    for row in rows {
        let cells: Result<Vec<i64>, _> =
            row.split(',').map(|c| c.trim().parse::<i64>()).collect();
        let cells = cells.map_err(|e| format!("bad lattice row '{row}': {e}"))?;
        if cells.len() != rank {
            return Err(format!("row '{row}' has {} entries, expected {rank}", cells.len()));
        }
        out.push(cells.into_iter().map(int).collect());
    }
    Ok(out)
}

fn run_indices(path: &PathBuf, subgroup: &[String], start: Instant) -> Result<(Report, i32), String> {
    let input = load(path)?;
    let t = need_triple(input.loaded)?;
    if subgroup.is_empty() {
        return Err("--subgroup needs at least one row, e.g. --subgroup 0,4".to_string());
    }
    let rank = t.group.rank();
    let rows = parse_rows(subgroup, rank)?;
    let w = Lattice::from_rows(rank, &rows);
    let u = SubgroupDesc::lattice_only(&t.group, w).map_err(|e| format!("{e:?}"))?;
    let rep = thm13_check(&t, &u).map_err(|e| format!("{e}"))?;
    let mut verdicts = Vec::new();
    let mut witnesses = Vec::new();
    witnesses.push(witness("l = [G : U]", fmt_index(&rep.l)));
    witnesses.push(witness("l' = [H : U cap H]", fmt_index(&rep.l_prime)));
    let mut code = 0;
    if !rep.applicable {
        verdicts.push(verdict_with(
            "index theorem applies",
            false,
            rep.note.clone().unwrap_or_else(|| "inapplicable".to_string()),
        ));
        code = 2;
    } else {
        verdicts.push(verdict("index theorem applies", true));
        match &rep.pair {
            Some((d1, d2)) => {
                witnesses.push(witness("divisor pair", format!("({d1}, {d2})")));
            }
            None => {
                verdicts.push(verdict_with(
                    "divisor pair computed",
                    false,
                    rep.note.clone().unwrap_or_else(|| "no pair".to_string()),
                ));
                code = 2;
            }
        }
        match &rep.cor3_i {
            Some(CheckStatus::Violated(w)) => {
                verdicts.push(verdict_with("first divisor consequence", false, w.clone()));
                code = 1;
            }
            Some(status) => {
                verdicts.push(verdict_with("first divisor consequence", true, format!("{status:?}")));
            }
            None => {}
        }
        if let Some(flag) = &rep.cor3_ii_flag {
            witnesses.push(witness("reversed-inclusion caveat", flag.clone()));
        }
    }
    Ok(finish("indices", input.digest, verdicts, witnesses, start, code))
}

fn run_bounds(path: &PathBuf, start: Instant) -> Result<(Report, i32), String> {
    let input = load(path)?;
    let t = need_triple(input.loaded)?;
    let b = bounds_report(&t).map_err(|e| format!("{e}"))?;
    let mut verdicts = Vec::new();
    let mut witnesses = Vec::new();
    witnesses.push(witness("degree m", format!("{}", b.m)));
    witnesses.push(witness("image index m'", fmt_index(&b.m_prime)));
    witnesses.push(witness("l(m)", format!("{}", b.l_m)));
    witnesses.push(witness("a(m)", format!("{}", b.a_m)));
    witnesses.push(witness("derived length s", format!("{}", b.s)));
    witnesses.push(witness("nilpotency class c", format!("{}", b.c)));
    witnesses.push(witness("Hirsch length", format!("{}", b.hirsch)));
    let mut code = 0;
    match &b.simple {
        TripleVerdict::Simple => verdicts.push(verdict("triple is simple", true)),
        TripleVerdict::NotSimple => verdicts.push(verdict("triple is simple", false)),
        TripleVerdict::Undecided(_) => {
            verdicts.push(verdict_with("triple is simple", false, "undecided"));
            code = 2;
        }
    }
    for (label, status) in [
        ("derived length bound", &b.thm_s_bound),
        ("class bound", &b.thm_c_bound),
        ("squarefree degree criterion", &b.squarefree_abelian),
    ] {
        match status {
            CheckStatus::Holds => verdicts.push(verdict(label, true)),
            CheckStatus::Violated(w) => {
                verdicts.push(verdict_with(label, false, w.clone()));
                code = 1;
            }
            CheckStatus::Inapplicable(why) => {
                verdicts.push(verdict_with(label, true, format!("inapplicable: {why}")))
            }
            CheckStatus::ForcedConclusion(why) => {
                verdicts.push(verdict_with(label, true, format!("forced: {why}")))
            }
        }
    }
    if let Some(rd) = &b.recurrent_data {
        witnesses.push(witness("k", fmt_index(&rd.k)));
        witnesses.push(witness("q", fmt_index(&rd.q)));
        witnesses.push(witness("commutator index", fmt_index(&rd.gamma_index)));
    }
    match &b.strong {
        StrongOutcome::StronglySimple => {
            verdicts.push(verdict("strongly simple", true));
        }
        StrongOutcome::WitnessFound { subgroup, certificate } => {
            verdicts.push(verdict_with("strongly simple", false, "witness found"));
            witnesses.push(witness("witness subgroup", fmt_subgroup(subgroup)));
            witnesses.push(witness("certificate", certificate.clone()));
        }
        StrongOutcome::NoWitnessUpTo { detail } => {
            verdicts.push(verdict_with("strongly simple", false, "no witness within bounds"));
            witnesses.push(witness("search detail", detail.clone()));
        }
    }
    Ok(finish("bounds", input.digest, verdicts, witnesses, start, code))
}

#[derive(Debug, Default, PartialEq)]
struct ExampleParams {
    n: Option<i64>,
    p: Option<i64>,
    steps: Option<usize>,
}

fn parse_params(params: Option<&str>) -> Result<ExampleParams, String> {
    let Some(text) = params else { return Ok(ExampleParams::default()) };
    let mut n = None;
    let mut p = None;
    let mut steps = None;
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("bad parameter '{part}', expected key=value"))?;
        let parse = |v: &str| v.trim().parse::<i64>().map_err(|e| format!("bad value '{v}': {e}"));
        match key.trim() {
            "n" => n = Some(parse(value)?),
            "p" => p = Some(parse(value)?),
            "steps" => steps = Some(parse(value)? as usize),
            other => return Err(format!("unknown parameter '{other}', expected n, p or steps")),
        }
    }
    Ok(ExampleParams { n, p, steps })
}

fn example_digest(name: &str, n: Option<i64>, p: Option<i64>) -> Result<String, String> {
    let obj = make_example(name, n, p).map_err(|e| format!("{e}"))?;
    let cfg = config_of(&obj);
    Ok(digest(canonical_compact(&cfg).as_bytes()))
}

fn example_summary(name: &str, n: Option<i64>, p: Option<i64>) -> Result<Vec<Witness>, String> {
    let obj = make_example(name, n, p).map_err(|e| format!("{e}"))?;
    let mut out = Vec::new();
    out.push(witness("canonical config", config::canonical_pretty(&config_of(&obj))));
    match obj {
        RegistryObject::Triple(t) => {
            out.push(witness("kind", "triple"));
            out.push(witness("rank", format!("{}", t.group.rank())));
            out.push(witness("degree", format!("{}", t.m)));
            out.push(witness("subgroup", fmt_subgroup(&t.h)));
        }
        RegistryObject::Atoms(s) | RegistryObject::Templates(s) => {
            out.push(witness("kind", "atom table"));
            out.push(witness("degree", format!("{}", s.m)));
            let names: Vec<&str> = s.atoms.iter().map(|a| a.name.as_str()).collect();
            out.push(witness("atoms", names.join(", ")));
        }
    }
    Ok(out)
}

fn run_example(
    name: Option<String>,
    params: Option<String>,
    verify: bool,
    verify_all: bool,
    start: Instant,
) -> Result<(Report, i32), String> {
    let ExampleParams { n, p, steps } = parse_params(params.as_deref())?;
    if verify_all {
        let mut names: Vec<&str> = registered_names().to_vec();
        names.sort_unstable();
        let mut verdicts = Vec::new();
        let mut witnesses = Vec::new();
        let mut digest_input = String::new();
        let mut all_ok = true;
        for nm in &names {
            let obj = make_example(nm, None, None).map_err(|e| format!("{e}"))?;
            digest_input.push_str(&canonical_compact(&config_of(&obj)));
            let out = verify::verify_example(nm, None, None, None)?;
            all_ok &= out.all_ok();
            for mut v in out.verdicts {
                v.check = format!("{nm}: {}", v.check);
                verdicts.push(v);
            }
            for mut w in out.witnesses {
                w.label = format!("{nm}: {}", w.label);
                witnesses.push(w);
            }
        }
        let dg = digest(digest_input.as_bytes());
        let code = if all_ok { 0 } else { 1 };
        return Ok(finish("example", dg, verdicts, witnesses, start, code));
    }
    let Some(name) = name else {
        let mut names: Vec<&str> = registered_names().to_vec();
        names.sort_unstable();
        let witnesses = vec![witness("registered examples", names.join(", "))];
        return Ok(finish("example", digest(b""), vec![], witnesses, start, 0));
    };
    let dg = example_digest(&name, n, p)?;
    if !verify {
        let witnesses = example_summary(&name, n, p)?;
        return Ok(finish("example", dg, vec![], witnesses, start, 0));
    }
    let out = verify::verify_example(&name, n, p, steps)?;
    let code = if out.all_ok() { 0 } else { 1 };
    Ok(finish("example", dg, out.verdicts, out.witnesses, start, code))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_parse() {
        assert_eq!(parse_params(None).unwrap(), ExampleParams::default());
        assert_eq!(
            parse_params(Some("n=2")).unwrap(),
            ExampleParams { n: Some(2), ..ExampleParams::default() }
        );
        assert_eq!(
            parse_params(Some("n=2, p=3, steps=5")).unwrap(),
            ExampleParams { n: Some(2), p: Some(3), steps: Some(5) }
        );
        assert!(parse_params(Some("q=1")).is_err());
    }
}
