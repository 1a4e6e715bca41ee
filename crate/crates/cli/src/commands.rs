//! One function per subcommand. Each returns the JSON report and whether it
//! contains verified violations.

use anyhow::{bail, Result};
use serde_json::{json, Value};
use sumideal::axioms::{axiom_suite, Axiom, AxiomConfig};
use sumideal::counterexamples as cx;
use sumideal::densities as dens;
use sumideal::ideals::{dip_diagonal, is_tad_pair, membership_diagnose, TadOutcome};
use sumideal::intset::Registry;
use sumideal::tad::{check_invariants, family_member, prefix_horizon, verify_tad, SigmaString, TadSkeleton};
use sumideal::thm1::{delta, parse_rational, rich_construct, ComponentKind, DeltaValue};
use sumideal::SetExpr;

use crate::format::{estimate, num, verdict};
use crate::inputs::{self, SkeletonFile};
use crate::{acceptance, corpus};

pub struct Outcome {
    pub report: Value,
    pub violations: bool,
    /// Raw text printed instead of JSON, for CSV output.
    pub text: Option<String>,
}

impl Outcome {
    fn clean(report: Value) -> Self {
        Outcome { report, violations: false, text: None }
    }
}

pub fn density(set: &str, which: &str, rel_to: Option<&str>, n: u64, w: Option<u64>, csv: bool) -> Result<Outcome> {
    let reg = Registry::with_builtins();
    let s = inputs::set(set, &reg)?;
    let e = match which {
        "ud" => dens::upper_asymptotic(&s, n)?,
        "ld" => dens::lower_asymptotic(&s, n)?,
        "ubd" => dens::upper_banach(&s, n, w.unwrap_or(n))?,
        "lbd" => dens::lower_banach(&s, n, w.unwrap_or(n))?,
        "uld" => dens::upper_log(&s, n)?,
        "lld" => dens::lower_log(&s, n)?,
        "sch" => dens::schnirelmann(&s, n)?,
        "rel" => {
            let Some(x) = rel_to else { bail!("--which rel needs --rel-to <expr>") };
            dens::relative_upper(&s, &inputs::set(x, &reg)?, n)?
        }
        other => bail!("unknown density {other:?}; expected ud|ld|ubd|lbd|uld|lld|sch|rel"),
    };
    let text = csv.then(|| crate::format::estimate_csv(&e));
    let report = json!({ "set": s.to_string(), "which": which, "N": n, "estimate": estimate(&e) });
    Ok(Outcome { report, violations: false, text })
}

pub fn diagnose(weight: &str, set: &str, n: u64, milestone: f64) -> Result<Outcome> {
    let w = inputs::weight(weight)?;
    let s = inputs::set(set, &Registry::with_builtins())?;
    let v = membership_diagnose(&w, &s, n, milestone);
    Ok(Outcome::clean(json!({ "weight": w.name(), "set": s.to_string(), "N": n, "diagnosis": verdict(&v) })))
}

pub fn tadcheck(weight: &str, a: &str, b: &str, k: u64, n: u64) -> Result<Outcome> {
    let w = inputs::weight(weight)?;
    let reg = Registry::with_builtins();
    let (a, b) = (inputs::set(a, &reg)?, inputs::set(b, &reg)?);
    let rep = is_tad_pair(&w, &a, &b, k, n);
    let outcome = match rep.outcome {
        TadOutcome::Tad => "tad",
        TadOutcome::NotTad => "not_tad",
        TadOutcome::Unknown => "unknown",
    };
    let shifts: Vec<Value> = rep.per_shift.iter().map(|(k, v)| json!({ "k": k, "diagnosis": verdict(v) })).collect();
    Ok(Outcome::clean(json!({ "weight": w.name(), "a": a.to_string(), "b": b.to_string(), "outcome": outcome, "shifts": shifts })))
}

pub fn dip(weight: &str, chain: &[String], stages: usize, scan_bound: u64) -> Result<Outcome> {
    let w = inputs::weight(weight)?;
    let reg = Registry::with_builtins();
    let chain = inputs::chain(chain)?.iter().map(|c| inputs::set(c, &reg)).collect::<Result<Vec<_>>>()?;
    let r = dip_diagonal(&w, &chain, stages, scan_bound)?;
    Ok(Outcome::clean(json!({
        "weight": w.name(),
        "elements": r.elements,
        "stage_ends": r.stage_ends,
        "stage_sums": r.stage_sums.iter().map(|&s| num(s)).collect::<Vec<_>>(),
        "milestones_hold": r.milestones_hold(&w, 0.0),
    })))
}

fn skeleton_summary(sk: &TadSkeleton) -> Value {
    json!({
        "provenance": sk.provenance.as_str(),
        "weight": sk.weight.name(),
        "g_len": sk.g.len(),
        "h_len": sk.h.len(),
        "n_m": sk.n_m,
        "l_m": sk.l_m,
        "max_depth": sk.max_depth(),
    })
}

pub fn tad_build(
    weight: &str,
    stages: usize,
    budget: u64,
    closed_form: Option<&str>,
    out: Option<&str>,
) -> Result<Outcome> {
    let sk = match closed_form {
        Some("fin") => TadSkeleton::closed_form_fin(budget),
        Some("rcp") => TadSkeleton::closed_form_rcp(budget),
        Some(other) => bail!("unknown closed form {other:?}; expected fin or rcp"),
        None => TadSkeleton::build(&inputs::weight(weight)?, stages, budget)?,
    };
    let inv = check_invariants(&sk, stages);
    let mut report = json!({
        "skeleton": skeleton_summary(&sk),
        "invariants": {
            "nondecreasing_gaps": inv.nondecreasing_gaps,
            "unbounded_gaps": inv.unbounded_gaps,
            "milestone_gaps": inv.milestone_gaps,
            "divergent_composition": inv.divergent_composition,
            "details": inv.details,
        },
    });
    if let Some(path) = out {
        std::fs::write(path, serde_json::to_string(&SkeletonFile::from_skeleton(&sk))?)?;
        report["written"] = json!(path);
    }
    Ok(Outcome { report, violations: !inv.all_pass(), text: None })
}

pub fn tad_member(skeleton: &str, sigma: &str, depth: usize) -> Result<Outcome> {
    let sk = inputs::skeleton(skeleton)?;
    let sigma = SigmaString::parse(sigma)?;
    let prefix = family_member(&sk, &sigma, depth)?;
    Ok(Outcome::clean(json!({
        "sigma": sigma.to_string(),
        "depth": depth,
        "horizon": prefix_horizon(&sk, depth),
        "elements": prefix,
    })))
}

pub fn tad_verify(skeleton: &str, sigmas: &str, depth: Option<usize>, k: u64) -> Result<Outcome> {
    let sk = inputs::skeleton(skeleton)?;
    let sigmas = inputs::sigmas(sigmas)?;
    let depth = depth.unwrap_or_else(|| sigmas.iter().map(SigmaString::len).min().unwrap_or(1));
    let rep = verify_tad(&sk, &sigmas, depth, k);
    let violations: Vec<String> = rep.violations.iter().map(|v| format!("{v:?}")).collect();
    Ok(Outcome {
        report: json!({
            "skeleton": skeleton_summary(&sk),
            "depth": depth,
            "K": k,
            "pairs_checked": rep.pairs_checked,
            "violations": violations,
        }),
        violations: !rep.is_clean(),
        text: None,
    })
}

fn delta_json(d: &DeltaValue) -> Value {
    let comps: Vec<Value> = d
        .per_component
        .iter()
        .map(|c| {
            json!({
                "index": c.index,
                "kind": match c.kind { ComponentKind::Witness => "witness", ComponentKind::Detector => "detector" },
                "value": num(c.value),
                "flagged": c.flagged,
            })
        })
        .collect();
    json!({
        "value": num(d.value),
        "argmax": d.argmax.map(|(i, k)| json!({ "index": i, "kind": if k == ComponentKind::Witness { "witness" } else { "detector" } })),
        "flagged": d.flagged(),
        "per_component": comps,
    })
}

pub fn delta_eval(family: Option<&str>, set: &str, n: u64) -> Result<Outcome> {
    let mut reg = Registry::with_builtins();
    let fam = inputs::family(family, n, &mut reg)?;
    let s = inputs::set(set, &reg)?;
    Ok(Outcome::clean(json!({ "set": s.to_string(), "N": fam.n, "delta": delta_json(&delta(&fam, &s)?) })))
}

pub fn delta_rich(family: Option<&str>, r: &str, n: u64) -> Result<Outcome> {
    let mut reg = Registry::with_builtins();
    let fam = inputs::family(family, n, &mut reg)?;
    let ratio = parse_rational(r)?;
    let res = rich_construct(&fam, ratio)?;
    Ok(Outcome::clean(json!({
        "r": r,
        "n0": res.n0,
        "lambda": res.lambda.to_string(),
        "set": res.set.to_string(),
        "delta": delta_json(&res.delta),
    })))
}

fn suite_json(report: &sumideal::axioms::AxiomReport) -> Value {
    let per_axiom: Vec<Value> = Axiom::ALL
        .iter()
        .map(|a| {
            json!({
                "axiom": a.as_str(),
                "checked": report.checked(*a),
                "violations": report.violations_of(*a).map(|v| json!({
                    "sets": v.sets,
                    "values": v.values.iter().map(|&x| num(x)).collect::<Vec<_>>(),
                    "excess": num(v.excess),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!(per_axiom)
}

fn read_corpus(path: Option<&str>, seed: u64, reg: &Registry) -> Result<Vec<SetExpr>> {
    match path {
        None => Ok(corpus::seeded(seed, 50, reg)),
        Some(p) => std::fs::read_to_string(p)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| inputs::set(l, reg))
            .collect(),
    }
}

pub fn delta_axioms(family: Option<&str>, corpus_path: Option<&str>, n: u64, seed: u64) -> Result<Outcome> {
    let mut reg = Registry::with_builtins();
    let fam = inputs::family(family, n, &mut reg)?;
    let corpus = read_corpus(corpus_path, seed, &reg)?;
    let mut cfg = AxiomConfig::new(fam.n);
    cfg.monotone_tol = acceptance::DELTA_TOL;
    let pairs = corpus::all_pairs(corpus.len());
    let rep = axiom_suite(|s| Ok(delta(&fam, s)?.value), &corpus, &pairs, &cfg)?;
    Ok(Outcome {
        report: json!({ "corpus": corpus.len(), "axioms": suite_json(&rep) }),
        violations: !rep.violations.is_empty(),
        text: None,
    })
}

pub fn gallery(which: &str, n: u64, seed: u64) -> Result<Outcome> {
    let reg = Registry::with_builtins();
    let densities: Vec<cx::NamedDensity> = if which == "all" {
        cx::gallery()
    } else {
        vec![cx::by_name(which).ok_or_else(|| anyhow::anyhow!("unknown gallery density {which:?}"))?]
    };
    let corpus = cx::gallery_corpus(&reg)?;
    let pairs = corpus::random_pairs(seed, corpus.len(), 200);
    let mut cfg = AxiomConfig::new(n);
    cfg.shifts = vec![1, -1, 20, -20];
    let mut out = Vec::new();
    let mut violations = false;
    for d in densities {
        let eval = d.eval;
        let rep = axiom_suite(|s| Ok(eval(s, n)?.value), &corpus, &pairs, &cfg)?;
        let mut mismatches = Vec::new();
        for a in Axiom::ALL {
            if let Some(expected) = d.expected.expects(a) {
                if expected != rep.holds(a) {
                    mismatches.push(a.as_str());
                }
            }
        }
        violations |= !rep.violations.is_empty();
        let mut values: Vec<f64> = rep.values.iter().map(|&v| crate::format::sig12(v)).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        out.push(json!({
            "density": d.name,
            "axioms": suite_json(&rep),
            "profile_matches": mismatches.is_empty(),
            "profile_mismatches": mismatches,
            "observed_values": values,
        }));
    }
    Ok(Outcome { report: json!({ "N": n, "corpus": corpus.len(), "densities": out }), violations, text: None })
}

pub fn selftest(seed: u64) -> Result<Outcome> {
    let results = acceptance::run_all(seed)?;
    let all = results.iter().all(|r| r.pass);
    Ok(Outcome { report: acceptance::report(seed, &results), violations: !all, text: None })
}
