use lglab_core::chain::{make_nested_chain, ChainInput, ChainSpec, LinkedChain};
use lglab_core::invariants::{InvariantsError, PairInvariants};
use lglab_core::linalg::Subspace;
use lglab_core::oracle::{
    count_lg_points, enum_fiber, enum_lg_points, nested_family, stratify, verify_configuration, FiberEnumeration,
    ModelSpec, OracleError, VerifyConfig,
};
use lglab_core::strata::{fiber_bound, pair_locus_report, stratum_report, PairLocusSpec, StratumSpec};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{ChainCommand, Command, EnumerateArgs, MakeArgs, PairArgs, StratumArgs, VerifyArgs};
use crate::input::{budget, int_list, load_chain, load_chain_input, load_subspace, primes};
use crate::{lls, to_value, InputError, Payload, Table};

pub(crate) fn dispatch(cmd: &Command) -> Result<Payload, InputError> {
    match cmd {
        Command::Chain(ChainCommand::Make(a)) => chain_make(a),
        Command::Chain(ChainCommand::Check { spec }) => chain_check(spec),
        Command::Invariants(a) => invariants(a),
        Command::Stratum(a) => stratum(a),
        Command::PairLocus(a) => pair_locus(a),
        Command::FiberBound(a) => fiber_bound_cmd(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Verify(a) => verify(a),
        Command::Lls(c) => lls::dispatch(c),
    }
}

fn oracle_error(e: OracleError) -> InputError {
    let field = match &e {
        OracleError::OverBudget { .. } | OracleError::BadBudget(_) => "--budget",
        OracleError::RankOutOfRange { .. } => "--r",
        OracleError::Chain(_) => "--chain",
        _ => "input",
    };
    InputError::new(field, e)
}

fn invariants_error(e: InvariantsError) -> InputError {
    let field = match &e {
        InvariantsError::Chain(_) => "--chain".to_string(),
        InvariantsError::WrongDimension { which, .. } | InvariantsError::WrongAmbient { which, .. } => {
            format!("--{}", which.to_lowercase().replace('_', ""))
        }
        _ => "--v1/--vn".to_string(),
    };
    InputError::new(field, e)
}

fn chain_make(a: &MakeArgs) -> Result<Payload, InputError> {
    let mut spec = match (&a.subsets, &a.sizes) {
        (Some(s), _) => {
            let subsets = s
                .split(';')
                .map(|part| int_list::<usize>(part, "--subsets"))
                .collect::<Result<Vec<_>, _>>()?;
            ChainSpec {
                p: a.p,
                d: a.d,
                n: subsets.len() + 1,
                subsets,
                seed: None,
            }
        }
        (None, Some(s)) => ChainSpec::from_sizes(a.p, a.d, &int_list::<usize>(s, "--sizes")?),
        (None, None) => return Err(InputError::new("--subsets", "give --subsets or --sizes")),
    };
    spec.seed = a.seed;
    let chain = make_nested_chain(&spec).map_err(|e| InputError::new("--subsets", e))?;
    let axioms = chain.axiom_report();
    let config = to_value(&spec)?;
    let results = json!({
        "chain": ChainInput::Nested { model: "nested".into(), spec },
        "maps": ChainInput::explicit(&chain),
        "axioms": axioms,
        "all_pass": axioms.all_pass(),
    });
    Ok(Payload::new("chain make", config, results)?.failed_if(!axioms.all_pass()))
}

#[derive(Serialize)]
struct Ranks {
    f: Vec<usize>,
    g: Vec<usize>,
}

fn ranks(chain: &LinkedChain) -> Ranks {
    Ranks {
        f: chain.forward_maps().iter().map(|m| m.rank()).collect(),
        g: chain.backward_maps().iter().map(|m| m.rank()).collect(),
    }
}

fn chain_check(path: &std::path::Path) -> Result<Payload, InputError> {
    let input = load_chain_input(path, "--spec")?;
    let chain = input.build().map_err(|e| InputError::new("--spec", e))?;
    let axioms = chain.axiom_report();
    let results = json!({
        "p": chain.field().p(),
        "d": chain.d(),
        "n": chain.n(),
        "s": chain.s(),
        "ranks": ranks(&chain),
        "axioms": axioms,
        "all_pass": axioms.all_pass(),
    });
    let config = json!({ "spec": path.display().to_string(), "chain": input });
    Ok(Payload::new("chain check", config, results)?.failed_if(!axioms.all_pass()))
}

struct Loaded {
    config: Value,
    inv: PairInvariants,
}

fn load_pair(a: &PairArgs) -> Result<Loaded, InputError> {
    let chain = load_chain(&a.chain, "--chain")?;
    let v1 = load_subspace(&a.v1, "--v1")?;
    let vn = load_subspace(&a.vn, "--vn")?;
    let inv = PairInvariants::compute(&chain, v1.dim(), &v1, &vn).map_err(invariants_error)?;
    let config = json!({
        "chain": a.chain.display().to_string(),
        "v1": a.v1.display().to_string(),
        "vn": a.vn.display().to_string(),
        "p": chain.field().p(),
        "d": chain.d(),
        "n": chain.n(),
        "r": v1.dim(),
    });
    Ok(Loaded { config, inv })
}

fn invariants(a: &PairArgs) -> Result<Payload, InputError> {
    let Loaded { config, inv } = load_pair(a)?;
    let structure = inv.check_structure();
    let two_routes = inv.check_two_routes().map_err(invariants_error)?;
    let results = json!({
        "invariants": inv.summary(),
        "checks": { "structure": structure, "two_routes": two_routes },
    });
    Ok(Payload::new("invariants", config, results)?.failed_if(!(structure && two_routes)))
}

#[derive(Serialize)]
struct KeyedStratum {
    key: String,
    #[serde(flatten)]
    report: lglab_core::strata::StratumReport,
    failing: Vec<Vec<u8>>,
}

fn keyed(profile: &PairLocusSpec, key: &StratumSpec) -> Result<KeyedStratum, InputError> {
    let report = stratum_report(profile, key).map_err(|e| InputError::new("--spec", e))?;
    Ok(KeyedStratum {
        key: key.to_string(),
        failing: report.conditions.iter().map(|c| c.failing()).collect(),
        report,
    })
}

fn stratum(a: &StratumArgs) -> Result<Payload, InputError> {
    let Loaded { mut config, inv } = load_pair(&a.pair)?;
    let profile = PairLocusSpec::from_invariants(&inv);
    if a.all {
        config["all"] = json!(true);
        let rows = StratumSpec::all(inv.n(), inv.r())
            .iter()
            .map(|k| keyed(&profile, k))
            .collect::<Result<Vec<_>, _>>()?;
        let nonempty = rows.iter().filter(|r| r.report.nonempty).count();
        return Payload::new("stratum", config, json!({ "strata": rows, "nonempty_strata": nonempty }));
    }
    let text = a.spec.as_deref().expect("clap requires --spec without --all");
    let key: StratumSpec = text.parse().map_err(|e| InputError::new("--spec", e))?;
    config["spec"] = json!(text);
    Payload::new("stratum", config, keyed(&profile, &key)?)
}

fn pair_locus(a: &PairArgs) -> Result<Payload, InputError> {
    let Loaded { config, inv } = load_pair(a)?;
    let profile = PairLocusSpec::from_invariants(&inv);
    let report = pair_locus_report(&profile).map_err(|e| InputError::new("--v1/--vn", e))?;
    let results = json!({
        "conditions": report.conditions,
        "nonempty": report.nonempty,
        "dimension": report.dimension,
        "profile": profile,
    });
    // The pair itself lies in its locus, so an empty verdict is a failure.
    Ok(Payload::new("pair-locus", config, results)?.failed_if(!report.nonempty))
}

fn fiber_bound_cmd(a: &PairArgs) -> Result<Payload, InputError> {
    let Loaded { config, inv } = load_pair(a)?;
    let profile = PairLocusSpec::from_invariants(&inv);
    let locus = pair_locus_report(&profile).map_err(|e| InputError::new("--v1/--vn", e))?;
    let (r, d) = (inv.r() as i64, inv.d() as i64);
    let results = json!({
        "bound": fiber_bound(&inv),
        "grassmannian_dim": r * (d - r),
        "locus_dimension": locus.dimension,
        "profile": profile,
    });
    Payload::new("fiber-bound", config, results)
}

fn rows_of(tuple: &[Subspace]) -> Vec<Vec<Vec<u32>>> {
    tuple.iter().map(|s| s.basis().to_rows()).collect()
}

fn enumerate(a: &EnumerateArgs) -> Result<Payload, InputError> {
    let chain = load_chain(&a.chain, "--chain")?;
    let budget = budget(a.budget.as_deref())?;
    let mut config = json!({
        "chain": a.chain.display().to_string(),
        "p": chain.field().p(),
        "d": chain.d(),
        "n": chain.n(),
        "budget": budget.to_string(),
        "points": a.points,
    });
    let (Some(v1p), Some(vnp)) = (&a.v1, &a.vn) else {
        let r = a.r.ok_or_else(|| InputError::new("--r", "required unless --v1 and --vn are given"))?;
        config["r"] = json!(r);
        let (count, points) = if a.points {
            let pts = enum_lg_points(&chain, r, budget).map_err(oracle_error)?;
            (pts.len() as u64, Some(pts.iter().map(|t| rows_of(t)).collect::<Vec<_>>()))
        } else {
            (count_lg_points(&chain, r, budget).map_err(oracle_error)?, None)
        };
        let mut results = json!({ "kind": "linked_grassmannian", "count": count });
        if let Some(p) = points {
            results["points"] = json!(p);
        }
        let mut payload = Payload::new("enumerate", config, results)?;
        payload.table = Some(Table {
            header: vec!["prime".into(), "count".into()],
            rows: vec![vec![chain.field().p().to_string(), count.to_string()]],
        });
        return Ok(payload);
    };
    let v1 = load_subspace(v1p, "--v1")?;
    let vn = load_subspace(vnp, "--vn")?;
    let r = v1.dim();
    if let Some(given) = a.r.filter(|&g| g != r) {
        return Err(InputError::new("--r", format!("{given} disagrees with dim V_1 = {r}")));
    }
    config["r"] = json!(r);
    config["v1"] = json!(v1p.display().to_string());
    config["vn"] = json!(vnp.display().to_string());
    let tuples = match enum_fiber(&chain, r, &v1, &vn, budget).map_err(oracle_error)? {
        FiberEnumeration::Inadmissible(why) => return Err(InputError::new("--v1/--vn", format!("pair is not admissible: {why}"))),
        FiberEnumeration::Points(t) => t,
    };
    let inv = PairInvariants::compute(&chain, r, &v1, &vn).map_err(invariants_error)?;
    let profile = PairLocusSpec::from_invariants(&inv);
    let census = stratify(&inv, &tuples).map_err(oracle_error)?;
    let p = chain.field().p();
    let mut rows = Vec::new();
    let mut table = Table {
        header: ["stratum", "prime", "count", "predicted_nonempty", "predicted_dim"].map(String::from).to_vec(),
        rows: Vec::new(),
    };
    let mut violations = Vec::new();
    for (key, per) in &census.strata {
        let spec: StratumSpec = key.parse().map_err(|e| InputError::new("internal", e))?;
        let pred = stratum_report(&profile, &spec).map_err(|e| InputError::new("internal", e))?;
        let count = per.get(&p).copied().unwrap_or(0);
        if !pred.nonempty {
            violations.push(format!("stratum {key} is predicted empty but has {count} points"));
        }
        table.rows.push(vec![
            key.clone(),
            p.to_string(),
            count.to_string(),
            pred.nonempty.to_string(),
            pred.dimension.to_string(),
        ]);
        rows.push(json!({
            "key": key,
            "count": count,
            "predicted": { "nonempty": pred.nonempty, "dim": pred.dimension },
        }));
    }
    let mut results = json!({
        "kind": "fiber",
        "total": tuples.len(),
        "bound": fiber_bound(&inv),
        "strata": rows,
        "lemma_failures": census.lemma_failures,
    });
    if a.points {
        results["points"] = json!(tuples.iter().map(|t| rows_of(t)).collect::<Vec<_>>());
    }
    let failed = !violations.is_empty() || census.lemma_failures > 0;
    let mut payload = Payload::new("enumerate", config, results)?.failed_if(failed);
    payload.warnings = violations;
    payload.table = Some(table);
    Ok(payload)
}

fn verify(a: &VerifyArgs) -> Result<Payload, InputError> {
    let models = match &a.sizes {
        Some(s) => {
            let sizes: Vec<usize> = int_list(s, "--sizes")?;
            if sizes.len() < 2 || sizes.iter().any(|&k| k > a.d) {
                return Err(InputError::new("--sizes", "need at least two sizes, each at most d"));
            }
            if sizes.windows(2).any(|w| w[0] > w[1]) {
                return Err(InputError::new("--sizes", "sizes must be non-decreasing"));
            }
            if a.r == 0 || a.r >= a.d {
                return Err(InputError::new("--r", format!("need 0 < r < d = {}", a.d)));
            }
            vec![ModelSpec {
                d: a.d,
                sizes,
                r: a.r,
            }]
        }
        None => {
            let n = a.n.ok_or_else(|| InputError::new("--n", "required unless --sizes is given"))?;
            nested_family(a.d, n, a.r)
        }
    };
    if models.is_empty() {
        return Err(InputError::new("--d", "no models with d >= 2, n >= 3 and 0 < r < d in range"));
    }
    let mut cfg = VerifyConfig::new(models, primes(&a.primes, "--primes")?);
    if let Some(e) = &a.escalate {
        cfg.escalation = primes(e, "--escalate")?.into_iter().filter(|p| !cfg.primes.contains(p)).collect();
    }
    cfg.budget = budget(a.budget.as_deref())?;
    cfg.seed = a.seed;
    let report = verify_configuration(&cfg).map_err(oracle_error)?;
    let config = json!({
        "family": "nested",
        "d": a.d,
        "n": a.n,
        "r": a.r,
        "sizes": a.sizes,
        "primes": cfg.primes,
        "escalation": cfg.escalation,
        "budget": cfg.budget.to_string(),
        "seed": cfg.seed,
    });
    let mut table = Table {
        header: ["model", "pair", "stratum", "predicted_nonempty", "predicted_dim", "counts", "degree", "verdict"]
            .map(String::from)
            .to_vec(),
        rows: Vec::new(),
    };
    for (k, pair) in report.pairs.iter().enumerate() {
        for row in &pair.strata {
            let counts: Vec<String> = row.counts.iter().map(|(q, c)| format!("{q}:{c}")).collect();
            table.rows.push(vec![
                pair.model.clone(),
                k.to_string(),
                row.key.clone(),
                row.predicted.nonempty.to_string(),
                row.predicted.dim.to_string(),
                counts.join(" "),
                row.degree.map(|x| x.to_string()).unwrap_or_default(),
                to_value(row.verdict)?.as_str().unwrap_or_default().to_string(),
            ]);
        }
    }
    let warnings = report.warnings.clone();
    let passed = report.passed();
    let mut payload = Payload::new("verify", config, &report)?.failed_if(!passed);
    payload.warnings = warnings;
    payload.table = Some(table);
    Ok(payload)
}
