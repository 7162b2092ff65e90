//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lglab_core::chain::{make_nested_chain, ChainSpec, LinkedChain};
use lglab_core::limit_series::pieri::{count_rectangular_tableaux, top_coefficient};
use lglab_core::limit_series::sweep::{additivity_sweep, gluing_sweep, identity_sweep, GluingKind};
use lglab_core::limit_series::{genus0_special, genus1_scan};
use lglab_core::oracle::{count_lg_points, fit_count_polynomial, nested_family, verify_configuration, VerifyConfig, DEFAULT_BUDGET};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5EED;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

/// Every chain `S_1 ⊆ … ⊆ S_{n-1} ⊆ {1..d}`: coordinate `c` enters at
/// level `t_c` in `1..n-1`, or never.
fn all_nested(p: u32, d: usize, n: usize) -> Vec<ChainSpec> {
    let levels = n; // values 1..n-1 and "never" (= n)
    let mut out = Vec::new();
    for code in 0..levels.pow(d as u32) {
        let mut t = Vec::with_capacity(d);
        let mut x = code;
        for _ in 0..d {
            t.push(x % levels + 1);
            x /= levels;
        }
        let subsets = (1..n).map(|i| (1..=d).filter(|&c| t[c - 1] <= i).collect()).collect();
        out.push(ChainSpec {
            p,
            d,
            n,
            subsets,
            seed: None,
        });
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut chains = 0;
    let mut failing = Vec::new();
    let mut verdicts_differ = 0;
    let mut pool: Vec<LinkedChain> = Vec::new();
    for p in [2, 3] {
        for d in 1..=4 {
            for n in 2..=4 {
                for (k, spec) in all_nested(p, d, n).into_iter().enumerate() {
                    let plain = make_nested_chain(&spec).expect("nested spec is valid");
                    let conj = make_nested_chain(&spec.clone().with_seed(SEED + k as u64)).expect("nested spec is valid");
                    chains += 2;
                    let (a, b) = (plain.axiom_report(), conj.axiom_report());
                    if !a.all_pass() || !b.all_pass() {
                        failing.push(format!("{spec:?}"));
                    }
                    if a.verdicts() != b.verdicts() {
                        verdicts_differ += 1;
                    }
                    pool.push(conj);
                }
            }
        }
    }

    // A mutation of f_i at (a, b) by δ changes f_i g_i by δ·e_a·(row b of g_i)
    // and g_i f_i by δ·(column a of g_i)·e_b^T; it is drawn only where one of
    // these is nonzero, and symmetrically for g_i.
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut tripped = 0;
    let mut tried = 0;
    let mut skipped = 0;
    let mut survivors = Vec::new();
    while tried < 20 {
        let chain = &pool[rng.gen_range(0..pool.len())];
        let (d, p) = (chain.d(), chain.field().p());
        let i = rng.gen_range(1..chain.n());
        let on_f = rng.gen_bool(0.5);
        let (a, b) = (rng.gen_range(0..d), rng.gen_range(0..d));
        let partner = if on_f { chain.g(i) } else { chain.f(i) };
        let couples = (0..d).any(|c| partner.get(b, c) != 0 || partner.get(c, a) != 0);
        if !couples {
            skipped += 1;
            continue;
        }
        tried += 1;
        let delta = rng.gen_range(1..p);
        let mut f = chain.forward_maps().to_vec();
        let mut g = chain.backward_maps().to_vec();
        let m = if on_f { &mut f[i - 1] } else { &mut g[i - 1] };
        let v = (m.get(a, b) + delta) % p;
        m.set(a, b, v).expect("entry in range");
        let mutated = LinkedChain::from_maps(chain.field(), d, 0, f, g).expect("shapes unchanged");
        if mutated.axiom_report().all_pass() {
            survivors.push(format!("d={d} p={p} {}_{i}[{a},{b}] += {delta}", if on_f { "f" } else { "g" }));
        } else {
            tripped += 1;
        }
    }
    let elapsed = start.elapsed();
    let passed = failing.is_empty() && verdicts_differ == 0 && tripped == 20 && elapsed < Duration::from_secs(10);
    outcome(
        passed,
        format!(
            "{chains} chains (plain and conjugated) pass, {} fail, {verdicts_differ} verdict changes under conjugation; \
             mutations tripped {tripped}/20 ({skipped} uncoupled draws skipped){}; {:.2}s",
            failing.len(),
            if survivors.is_empty() { String::new() } else { format!(", survivors {survivors:?}") },
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;

    let mut samples = BTreeMap::new();
    for q in [2u32, 3, 5, 7] {
        let chain = make_nested_chain(&ChainSpec::from_sizes(q, 2, &[1, 1])).unwrap();
        let c = count_lg_points(&chain, 1, DEFAULT_BUDGET).unwrap();
        ok &= c == 3 * u64::from(q) + 1;
        samples.insert(q, c);
    }
    let fit = fit_count_polynomial(&samples).unwrap();
    ok &= fit.exact_fit && fit.degree == Some(1);
    notes.push(format!("d=2 n=3 r=1: {} from {samples:?}", fit.pretty()));

    let models: [(usize, &[usize], usize); 4] = [(3, &[1, 2], 1), (4, &[1, 3], 1), (4, &[2, 2], 2), (4, &[1, 2, 3], 2)];
    for (d, sizes, r) in models {
        let expected = r * (d - r);
        let primes: Vec<u32> = [2, 3, 5, 7, 11, 13].into_iter().take(expected + 2).collect();
        let mut samples = BTreeMap::new();
        for &q in &primes {
            let chain = make_nested_chain(&ChainSpec::from_sizes(q, d, sizes)).unwrap();
            samples.insert(q, count_lg_points(&chain, r, DEFAULT_BUDGET).unwrap());
        }
        let fit = fit_count_polynomial(&samples).unwrap();
        if fit.exact_fit {
            ok &= fit.degree == Some(expected);
            notes.push(format!("d={d} sizes={sizes:?} r={r}: degree {:?} (expected {expected})", fit.degree));
        } else {
            notes.push(format!("d={d} sizes={sizes:?} r={r}: no exact fit, counts {samples:?}"));
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(300);
    outcome(ok, format!("{}; {:.1}s", notes.join("; "), elapsed.as_secs_f64()))
}

fn sweep_report() -> (lglab_core::oracle::VerifyReport, Duration) {
    let start = Instant::now();
    let cfg = VerifyConfig::new(nested_family(3, 4, 1), vec![2, 3, 5, 7]);
    let report = verify_configuration(&cfg).expect("sweep runs within budget");
    (report, start.elapsed())
}

fn criteria_3_to_5() -> [Outcome; 3] {
    let (rep, elapsed) = sweep_report();
    let s = &rep.summary;
    let c3 = outcome(
        s.empty_violations == 0 && !s.truncated,
        format!(
            "{} models, {} pair groups, {} pairs, {} points; {} predicted-empty strata all empty, {} violations; {:.1}s",
            s.models,
            s.pair_groups,
            s.pairs_examined,
            s.points_examined,
            s.empty_confirmed,
            s.empty_violations,
            elapsed.as_secs_f64()
        ),
    );
    let predicted_nonempty = s.confirmed + s.witnessed_no_fit + s.nonuniform + s.unwitnessed + s.degree_mismatches;
    let unwitnessed: Vec<&String> = rep.warnings.iter().filter(|w| w.contains("unwitnessed")).collect();
    let c4 = outcome(
        s.degree_mismatches == 0 && s.unwitnessed * 100 <= predicted_nonempty,
        format!(
            "{predicted_nonempty} predicted-nonempty strata: {} confirmed by degree, {} witnessed without fit, \
             {} non-uniform, {} unwitnessed {unwitnessed:?}, {} degree mismatches",
            s.confirmed, s.witnessed_no_fit, s.nonuniform, s.unwitnessed, s.degree_mismatches
        ),
    );
    let fitted = rep.pairs.iter().filter(|p| p.fiber_exact_fit).count();
    let c5 = outcome(
        s.bound_violations == 0,
        format!(
            "{} pair groups ({fitted} with exact fiber-count fit), {} bound violations",
            s.pair_groups, s.bound_violations
        ),
    );
    [c3, c4, c5]
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let sweep = identity_sweep(SEED, 1000).expect("sampled pairs are valid");
    let elapsed = start.elapsed();
    outcome(
        sweep.failures.is_empty() && elapsed < Duration::from_secs(10),
        format!(
            "1000 pairs ({} refined, max excess {}), {} failures; {:.2}s",
            sweep.refined,
            sweep.max_excess,
            sweep.failures.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_7() -> Outcome {
    let sweep = additivity_sweep(SEED, 500).expect("sampled curves are valid");
    outcome(sweep.failures.is_empty(), format!("500 cases, {} failures", sweep.failures.len()))
}

/// Compositions of `total` into parts in `1..=max`.
fn compositions(total: usize, max: usize) -> Vec<Vec<usize>> {
    if total == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=max.min(total) {
        for mut rest in compositions(total - first, max) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn criterion_8() -> Outcome {
    let g0 = genus0_special(1, 3, 4).expect("valid input");
    let mut boxes = Vec::new();
    let mut products = 0;
    let mut mismatches = Vec::new();
    for (rows, cols) in (1..=6).map(|m| (2, m)).chain([(3, 3)]) {
        boxes.push(format!("{rows}x{cols}"));
        for factors in compositions(rows * cols, cols) {
            products += 1;
            let pieri = top_coefficient(rows, cols, &factors);
            let tableaux = count_rectangular_tableaux(rows, cols, &factors);
            if pieri != tableaux {
                mismatches.push(format!("{rows}x{cols} {factors:?}: {pieri} vs {tableaux}"));
            }
        }
    }
    let scan = genus1_scan(2, 6).expect("valid range");
    let passed = g0.intersection_number == Some(2) && mismatches.is_empty() && scan.mismatches.is_empty() && scan.excluded > 0;
    outcome(
        passed,
        format!(
            "genus 0 (r=1, d=3, four points): {:?}; Pieri vs tableaux on {} products in boxes {}: {} mismatches; \
             genus 1 scan r<=2 d<=6: {} sequences, {} excluded, {} mismatches",
            g0.intersection_number,
            products,
            boxes.join(","),
            mismatches.len(),
            scan.sequences,
            scan.excluded,
            scan.mismatches.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let refined = gluing_sweep(SEED, 200, GluingKind::Refined).expect("sampled pairs are valid");
    let excess = gluing_sweep(SEED, 200, GluingKind::ExcessOne).expect("sampled pairs are valid");
    outcome(
        refined.failures.is_empty() && excess.failures.is_empty(),
        format!(
            "200 refined pairs: {} case-split mismatches; 200 excess-one pairs: {} without unique smoothing",
            refined.failures.len(),
            excess.failures.len()
        ),
    )
}

fn criterion_10() -> Outcome {
    let args = ["verify", "--family", "nested", "--d", "3", "--n", "4", "--r", "1", "--primes", "2,3,5,7", "--seed", "11"];
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_lglab"))
            .args(args)
            .env_remove("LGLAB_BUDGET")
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    let same = a.stdout == b.stdout;
    outcome(
        same && a.status.success() && !a.stdout.is_empty(),
        format!("two seeded verify runs: {} bytes each, identical = {same}, exit {:?}", a.stdout.len(), a.status.code()),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let [c3, c4, c5] = criteria_3_to_5();
    let results = [
        ("axiom suite", criterion_1()),
        ("linked Grassmannian dimension", criterion_2()),
        ("strata: empty direction", c3),
        ("strata: nonempty and dimension", c4),
        ("fiber bound", c5),
        ("crude dimension identity", criterion_6()),
        ("rho additivity", criterion_7()),
        ("base cases", criterion_8()),
        ("gluing and uniqueness", criterion_9()),
        ("determinism", criterion_10()),
    ];
    let mut all = true;
    for (k, (name, o)) in results.iter().enumerate() {
        all &= o.passed;
        println!("{} criterion {:>2} ({name}): {}", if o.passed { "PASS" } else { "FAIL" }, k + 1, o.detail);
    }
    println!("acceptance: {} in {:.1}s", if all { "all criteria pass" } else { "FAILURES" }, start.elapsed().as_secs_f64());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
