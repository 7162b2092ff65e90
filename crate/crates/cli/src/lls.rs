use lglab_core::limit_series::sweep::{additivity_sweep, gluing_sweep, identity_sweep, GluingKind};
use lglab_core::limit_series::{
    crude_excess, eh_classify, fiber_bound_eh, genus0_nonempty, genus1_case, genus1_scan, gluing_profile, rho,
    translate, twist_threshold, verify_crude_identity, EhPair, LimitSeriesError, VanishingSeq,
};
use serde_json::json;

use crate::args::{
    Genus0Args, Genus1Args, GluingArgs, GluingKindArg, IdentityArgs, LlsCommand, PairSeqArgs, RhoArgs, TwistArgs,
};
use crate::input::{from_value, read_json, sequence};
use crate::{InputError, Payload};

pub(crate) fn dispatch(cmd: &LlsCommand) -> Result<Payload, InputError> {
    match cmd {
        LlsCommand::Rho(a) => rho_cmd(a),
        LlsCommand::Classify(a) => classify(a),
        LlsCommand::Translate(a) => translate_cmd(a),
        LlsCommand::Bound(a) => bound(a),
        LlsCommand::Identity(a) => identity(a),
        LlsCommand::Genus0(a) => genus0(a),
        LlsCommand::Genus1(a) => genus1(a),
        LlsCommand::Gluing(a) => gluing(a),
    }
}

fn lls_error(field: &str) -> impl Fn(LimitSeriesError) -> InputError + '_ {
    move |e| {
        let f = match &e {
            LimitSeriesError::BelowThreshold { side: 'Y', .. } => "--degDY",
            LimitSeriesError::BelowThreshold { .. } => "--degDZ",
            LimitSeriesError::Incompatible { .. } | LimitSeriesError::LengthMismatch { .. } => "--aY/--aZ",
            _ => field,
        };
        InputError::new(f, e)
    }
}

fn required<T: Clone>(x: &Option<T>, field: &str) -> Result<T, InputError> {
    x.clone().ok_or_else(|| InputError::new(field, "required"))
}

fn load_eh_pair(a: &PairSeqArgs) -> Result<EhPair, InputError> {
    if let Some(path) = &a.input {
        let pair: EhPair = from_value(read_json(path, "--input")?, "--input", "pair")?;
        // Re-validate through the constructor; deserialization alone trusts the fields.
        let d = pair.d;
        let a_y = VanishingSeq::new(pair.a_y.orders().to_vec(), d).map_err(|e| InputError::new("--input", e))?;
        let a_z = VanishingSeq::new(pair.a_z.orders().to_vec(), d).map_err(|e| InputError::new("--input", e))?;
        let built = EhPair::new(d, a_y, a_z, pair.g_y, pair.g_z).map_err(|e| InputError::new("--input", e))?;
        if built.r != pair.r {
            return Err(InputError::new("--input", format!("r = {} but sequences have length {}", pair.r, built.r + 1)));
        }
        return Ok(built);
    }
    let r = required(&a.r, "--r")?;
    let d = required(&a.d, "--d")?;
    let a_y = sequence(&required(&a.a_y, "--aY")?, d, "--aY")?;
    let a_z = sequence(&required(&a.a_z, "--aZ")?, d, "--aZ")?;
    for (s, field) in [(&a_y, "--aY"), (&a_z, "--aZ")] {
        if s.r() != r {
            return Err(InputError::new(field, format!("expected {} entries for r = {r}", r + 1)));
        }
    }
    EhPair::new(d, a_y, a_z, a.g_y, a.g_z).map_err(lls_error("--aY/--aZ"))
}

fn degrees(a: &TwistArgs, pair: &EhPair) -> (i64, i64) {
    (
        a.deg_dy.unwrap_or_else(|| twist_threshold(pair.d, pair.g_y)),
        a.deg_dz.unwrap_or_else(|| twist_threshold(pair.d, pair.g_z)),
    )
}

fn rho_cmd(a: &RhoArgs) -> Result<Payload, InputError> {
    if let Some(cases) = a.cases {
        let sweep = additivity_sweep(a.seed, cases).map_err(lls_error("--cases"))?;
        let failed = !sweep.failures.is_empty();
        let config = json!({ "mode": "additivity_sweep", "seed": a.seed, "cases": cases });
        return Ok(Payload::new("lls rho", config, sweep)?.failed_if(failed));
    }
    let (g, r, d) = (required(&a.g, "--g")?, required(&a.r, "--r")?, required(&a.d, "--d")?);
    let points = a
        .points
        .iter()
        .map(|s| sequence(s, d, "--point"))
        .collect::<Result<Vec<_>, _>>()?;
    let value = rho(g, r, d, &points).map_err(lls_error("--point"))?;
    let config = json!({ "g": g, "r": r, "d": d, "points": a.points });
    Payload::new("lls rho", config, json!({ "rho": value }))
}

fn pair_config(pair: &EhPair) -> serde_json::Value {
    json!({
        "r": pair.r,
        "d": pair.d,
        "a_y": pair.a_y.orders(),
        "a_z": pair.a_z.orders(),
        "g_y": pair.g_y,
        "g_z": pair.g_z,
    })
}

fn classify(a: &PairSeqArgs) -> Result<Payload, InputError> {
    let pair = load_eh_pair(a)?;
    let results = json!({
        "classification": eh_classify(&pair),
        "node_terms": pair.node_terms(),
        "excess": crude_excess(&pair),
    });
    Payload::new("lls classify", pair_config(&pair), results)
}

fn translate_cmd(a: &TwistArgs) -> Result<Payload, InputError> {
    let pair = load_eh_pair(&a.pair)?;
    let (dy, dz) = degrees(a, &pair);
    let dict = translate(&pair, dy, dz).map_err(lls_error("--degDY"))?;
    let mut config = pair_config(&pair);
    config["deg_dy"] = json!(dy);
    config["deg_dz"] = json!(dz);
    let results = json!({ "dictionary": dict, "profile": dict.profile() });
    Payload::new("lls translate", config, results)
}

fn bound(a: &TwistArgs) -> Result<Payload, InputError> {
    let pair = load_eh_pair(&a.pair)?;
    let (dy, dz) = degrees(a, &pair);
    let b = fiber_bound_eh(&pair, dy, dz).map_err(lls_error("--aY/--aZ"))?;
    let mut config = pair_config(&pair);
    config["deg_dy"] = json!(dy);
    config["deg_dz"] = json!(dz);
    Payload::new("lls bound", config, json!({ "excess": crude_excess(&pair), "bound": b }))
}

fn identity(a: &IdentityArgs) -> Result<Payload, InputError> {
    if let Some(cases) = a.cases {
        let sweep = identity_sweep(a.seed, cases).map_err(lls_error("--cases"))?;
        let failed = !sweep.failures.is_empty();
        let config = json!({ "mode": "sweep", "seed": a.seed, "cases": cases });
        return Ok(Payload::new("lls identity", config, sweep)?.failed_if(failed));
    }
    let pair = load_eh_pair(&a.twist.pair)?;
    let (dy, dz) = degrees(&a.twist, &pair);
    let id = verify_crude_identity(&pair, dy, dz).map_err(lls_error("--aY/--aZ"))?;
    let mut config = pair_config(&pair);
    config["deg_dy"] = json!(dy);
    config["deg_dz"] = json!(dz);
    let holds = id.holds;
    Ok(Payload::new("lls identity", config, id)?.failed_if(!holds))
}

fn genus0(a: &Genus0Args) -> Result<Payload, InputError> {
    let mut points = Vec::new();
    if a.special > 0 {
        let mut orders = vec![0];
        orders.extend(2..=a.r as i64 + 1);
        let p = VanishingSeq::new(orders, a.d).map_err(|e| InputError::new("--special", e))?;
        points.extend(std::iter::repeat_n(p, a.special));
    }
    for s in &a.points {
        points.push(sequence(s, a.d, "--point")?);
    }
    let res = genus0_nonempty(a.r, a.d, &points).map_err(lls_error("--point"))?;
    let config = json!({ "r": a.r, "d": a.d, "special": a.special, "points": a.points });
    Payload::new("lls genus0", config, res)
}

fn genus1(a: &Genus1Args) -> Result<Payload, InputError> {
    if a.scan {
        let scan = genus1_scan(a.r_max, a.d_max).map_err(lls_error("--d-max"))?;
        let failed = !scan.mismatches.is_empty();
        let config = json!({ "mode": "scan", "r_max": a.r_max, "d_max": a.d_max });
        return Ok(Payload::new("lls genus1", config, scan)?.failed_if(failed));
    }
    let (r, d) = (required(&a.r, "--r")?, required(&a.d, "--d")?);
    let seq = sequence(&required(&a.a, "--a")?, d, "--a")?;
    if seq.r() != r {
        return Err(InputError::new("--a", format!("expected {} entries for r = {r}", r + 1)));
    }
    let res = genus1_case(&seq, r, d).map_err(lls_error("--a"))?;
    let config = json!({ "r": r, "d": d, "a": seq.orders() });
    Payload::new("lls genus1", config, res)
}

fn gluing(a: &GluingArgs) -> Result<Payload, InputError> {
    if let Some(cases) = a.cases {
        let kind = match a.kind {
            GluingKindArg::Refined => GluingKind::Refined,
            GluingKindArg::ExcessOne => GluingKind::ExcessOne,
        };
        let sweep = gluing_sweep(a.seed, cases, kind).map_err(lls_error("--cases"))?;
        let failed = !sweep.failures.is_empty();
        let config = json!({ "mode": "sweep", "seed": a.seed, "cases": cases, "kind": kind });
        return Ok(Payload::new("lls gluing", config, sweep)?.failed_if(failed));
    }
    let pair = load_eh_pair(&a.pair)?;
    let profile = gluing_profile(&pair).map_err(lls_error("--aY/--aZ"))?;
    Payload::new("lls gluing", pair_config(&pair), profile)
}
