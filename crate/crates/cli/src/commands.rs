//! Command implementations. Each command fills an [`Outputs`] buffer and
//! reports failure through [`CliError`]; files are written either way.

use std::sync::Arc;

use serde_json::{json, Value};

use weylwalk_core::charalg::{alternating_pi_sum, sigma_poly, weyl_numerator};
use weylwalk_core::crystal::{component, CrystalOps, ModuleCrystal, TensorCrystal, TensorNode};
use weylwalk_core::markov::{
    conditioned_table, doob_transform, exact_h_law, hchain_matrix, hchain_path_law, pitman, pitman_path,
    stay_probability, substochastic_table, twisted_tau,
};
use weylwalk_core::montecarlo::{
    asymptotic_ratio, empirical_h_law, empirical_step_law, sandwich_check, simulate_stays, EstimatorReport,
};
use weylwalk_core::rational::{q_json, to_f64};
use weylwalk_core::{CrystalDistribution, HarmonicWitness, StateSet, Weight};

use crate::config::{Format, Resolved, RunConfig};
use crate::error::CliError;
use crate::output::Outputs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Crystal,
    Character,
    Psi,
    Hchain,
    Conditioned,
    Pitman,
    Simulate,
    Sandwich,
    Ratio,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Crystal => "crystal",
            Command::Character => "character",
            Command::Psi => "psi",
            Command::Hchain => "hchain",
            Command::Conditioned => "conditioned",
            Command::Pitman => "pitman",
            Command::Simulate => "simulate",
            Command::Sandwich => "sandwich",
            Command::Ratio => "ratio",
            Command::Verify => "verify",
        }
    }
}

type Run = Result<(), CliError>;

pub fn dispatch(cmd: Command, cfg: &RunConfig, r: &Resolved, out: &mut Outputs) -> Run {
    match cmd {
        Command::Crystal => crystal(cfg, r, out),
        Command::Character => character(cfg, r, out),
        Command::Psi => psi(cfg, r, out),
        Command::Hchain => hchain(cfg, r, out),
        Command::Conditioned => conditioned(cfg, r, out),
        Command::Pitman => pitman_cmd(cfg, r, out),
        Command::Simulate => simulate(cfg, r, out),
        Command::Sandwich => sandwich(cfg, r, out),
        Command::Ratio => ratio(cfg, r, out),
        Command::Verify => verify(cfg, r, out),
    }
}

fn module(r: &Resolved) -> Result<Arc<ModuleCrystal>, CliError> {
    Ok(Arc::new(r.sys.module(&r.spec)?))
}

fn distribution(r: &Resolved) -> Result<CrystalDistribution, CliError> {
    let tau = r.tau_in_domain()?.clone();
    Ok(CrystalDistribution::new(r.sys.datum(), module(r)?, tau)?)
}

fn need_samples(cfg: &RunConfig) -> Run {
    if cfg.samples == 0 {
        return Err(CliError::Config("samples must be positive".into()));
    }
    Ok(())
}

fn report_json(rep: &EstimatorReport) -> Value {
    serde_json::to_value(rep).expect("reports serialize")
}

fn crystal(cfg: &RunConfig, r: &Resolved, out: &mut Outputs) -> Run {
    let m = module(r)?;
    let mut parts = Vec::new();
    for (k, g) in m.parts.iter().enumerate() {
        let kappa = &r.spec.summands[k].kappa;
        out.say(format!(
            "summand {k}: kappa {kappa}, {} nodes, {} edges",
            g.len(),
            g.edges().len()
        ));
        out.add_if(cfg, Format::Dot, format!("crystal_{k}.dot"), || g.to_dot());
        let mut v = g.to_json();
        v["multiplicity"] = json!(r.spec.summands[k].multiplicity);
        parts.push(v);
    }
    out.json(cfg, "crystal.json", &json!({ "summands": parts }));
    Ok(())
}

fn character(cfg: &RunConfig, r: &Resolved, out: &mut Outputs) -> Run {
    let m = module(r)?;
    let mut chars = Vec::new();
    for s in &r.spec.summands {
        let c = r.sys.character(&s.kappa)?;
        let value = match &r.tau {
            Some(t) => Some(q_json(&c.eval(t)?)),
            None => None,
        };
        out.say(format!("S_{} = {c}", s.kappa));
        chars.push(json!({
            "kappa": s.kappa,
            "multiplicity": s.multiplicity,
            "polynomial": c.to_string(),
            "terms": c.to_json(),
            "value": value,
        }));
    }
    let sigma = sigma_poly(r.sys.datum(), &m);
    // fractional exponents need the roots of tau; report the polynomial alone
    // when they are missing
    let (sigma_value, note) = match r.tau.as_ref().map(|t| sigma.eval(t)) {
        None => (None, None),
        Some(Ok(v)) => (Some(q_json(&v)), None),
        Some(Err(e @ weylwalk_core::Error::MissingRoot { .. })) => (None, Some(e.to_string())),
        Some(Err(e)) => return Err(e.into()),
    };
    out.say(format!("Sigma_M = {sigma}"));
    out.json(
        cfg,
        "character.json",
        &json!({
            "characters": chars,
            "sigma": { "polynomial": sigma.to_string(), "terms": sigma.to_json(), "value": sigma_value, "note": note },
            "tau": r.tau.as_ref().map(|t| t.to_json()),
        }),
    );
    Ok(())
}

/// Dominant weights of level at most `max_level`, in lexicographic order.
pub fn dominant_weights(rank: usize, max_level: i64) -> Vec<Weight> {
    fn rec(prefix: &mut Vec<i64>, left: i64, rank: usize, out: &mut Vec<Weight>) {
        if prefix.len() == rank {
            out.push(Weight(prefix.clone()));
            return;
        }
        for x in 0..=left {
            prefix.push(x);
            rec(prefix, left - x, rank, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if max_level >= 0 {
        rec(&mut Vec::with_capacity(rank), max_level, rank, &mut out);
    }
    out.sort();
    out
}

fn psi(cfg: &RunConfig, r: &Resolved, out: &mut Outputs) -> Run {
    let tau = r.tau_in_domain()?;
    let mus = match &r.mus {
        Some(m) => m.clone(),
        None => dominant_weights(r.sys.rank(), cfg.max_level),
    };
    let mut rows = Vec::with_capacity(mus.len());
    let mut csv = String::from("mu,exact,approx\n");
    for mu in &mus {
        let value = r.sys.psi(mu, tau)?;
        let poly = r.sys.psi_poly(mu)?;
        csv.push_str(&format!("\"{mu}\",{value},{}\n", to_f64(&value)));
        rows.push(json!({
            "mu": mu,
            "psi": q_json(&value),
            "polynomial": poly.to_string(),
        }));
    }
    out.say(format!("{} values of psi", rows.len()));
    if let Some(first) = rows.first() {
        out.say(format!("psi({}) = {}", first["mu"], first["psi"]["exact"]));
    }
    out.json(cfg, "psi.json", &json!({ "tau": tau.to_json(), "rows": rows }));
    out.add_if(cfg, Format::Csv, "psi.csv", || csv);
    Ok(())
}

fn table_outputs(cfg: &RunConfig, out: &mut Outputs, stem: &str, t: &weylwalk_core::TransitionTable) {
    out.json(cfg, format!("{stem}.json"), &t.to_json());
    out.add_if(cfg, Format::Csv, format!("{stem}.csv"), || t.to_csv());
}

fn hchain(cfg: &RunConfig, r: &Resolved, out: &mut Outputs) -> Run {
    let d = distribution(r)?;
    let states = StateSet::by_level(d.module(), cfg.max_level);
    let t = hchain_matrix(&r.sys, &d, states)?;
    t.validate()?;
    out.say(format!("H-chain on {} states", t.states().len()));
    table_outputs(cfg, out, "hchain", &t);
    if cfg.samples > 0 && cfg.ell > 0 {
        let rep = empirical_h_law(&r.sys, &d, cfg.ell, cfg.samples, cfg.seed)?;
        let ok = rep.passed(cfg.sigmas);
        out.say(format!(
            "empirical H-law over {} steps: {} cells, worst |z| {:.2}",
            cfg.ell,
            rep.cells.len(),
            rep.worst_z()
        ));
        out.json(cfg, "hchain_empirical.json", &serde_json::to_value(&rep).expect("serializes"));
        if !ok {
            return Err(CliError::Verify(format!(
                "empirical H-law outside {} sigma (worst |z| {:.2})",
                cfg.sigmas,
                rep.worst_z()
            )));
        }
    }
    Ok(())
}

fn conditioned(cfg: &RunConfig, r: &Resolved, out: &mut Outputs) -> Run {
    let d = distribution(r)?;
    let states = StateSet::by_level(d.module(), cfg.max_level);
    let t = conditioned_table(&r.sys, &d, states.clone())?;
    let h = hchain_matrix(&r.sys, &d, states)?;
    let diff = t.first_difference(&h).or_else(|| h.first_difference(&t));
    table_outputs(cfg, out, "conditioned", &t);
    out.say(format!(
        "conditioned kernel on {} states; equals the H-chain: {}",
        t.states().len(),
        diff.is_none()
    ));
    match diff {
        None => Ok(()),
        Some((a, b, x, y)) => Err(CliError::Verify(format!("entry {a} -> {b}: {x} vs {y}"))),
    }
}

fn tensor_json(m: &ModuleCrystal, b: &TensorNode) -> Value {
    json!(b.factors.iter().map(|r| m.flat_index(*r)).collect::<Vec<_>>())
}

fn pitman_cmd(cfg: &RunConfig, r: &Resolved, out: &mut Outputs) -> Run {
    let m = module(r)?;
    let size = (m.len() as f64).powi(cfg.ell as i32);
    if size > cfg.budget as f64 {
        return Err(CliError::Budget(format!(
            "{} ^ {} tensor nodes exceed the budget {}",
            m.len(),
            cfg.ell,
            cfg.budget
        )));
    }
    let tc = TensorCrystal::new(&m);
    let order: Vec<usize> = (0..r.sys.rank()).rev().collect();
    let mut rows = Vec::new();
    let mut highest = 0usize;
    let mut order_failures = 0usize;
    let mut path_failures = 0usize;
    for b in tc.all_nodes(cfg.ell) {
        let top = pitman(&tc, &b);
        if tc.raise_with_order(&b, &order) != top {
            order_failures += 1;
        }
        let via_path = pitman_path(r.sys.datum(), &tc.path(&b))?;
        if via_path != tc.path(&top) {
            path_failures += 1;
        }
        highest += (b == top) as usize;
        rows.push(json!({
            "node": tensor_json(&m, &b),
            "pitman": tensor_json(&m, &top),
            "heights": tc.prefix_weights(&top),
        }));
    }
    out.say(format!(
        "{} nodes of the {}-fold tensor power, {highest} highest; order failures {order_failures}, path failures {path_failures}",
        rows.len(),
        cfg.ell
    ));
    out.json(
        cfg,
        "pitman.json",
        &json!({
            "ell": cfg.ell,
            "nodes": rows,
            "highest": highest,
            "order_failures": order_failures,
            "path_failures": path_failures,
        }),
    );
    if order_failures + path_failures > 0 {
        return Err(CliError::Verify("Pitman transform depends on the operator order or path".into()));
    }
    Ok(())
}

fn simulate(cfg: &RunConfig, r: &Resolved, out: &mut Outputs) -> Run {
    need_samples(cfg)?;
    let d = distribution(r)?;
    let step = empirical_step_law(&d, cfg.samples, cfg.seed);
    let tally = simulate_stays(&d, &r.mu, &cfg.horizons, cfg.samples, cfg.seed.wrapping_add(1), None)?;
    let mut reports = Vec::new();
    let mut csv = String::from("horizon,estimate,std_err,exact,approx,z\n");
    let mut bad = Vec::new();
    for (k, &h) in cfg.horizons.iter().enumerate() {
        let exact = stay_probability(&d, &r.mu, h);
        let rep = EstimatorReport::bernoulli(format!("stay_{h}"), tally.continuous[k], cfg.samples, Some(&exact));
        csv.push_str(&format!(
            "{h},{},{},{},{},{}\n",
            rep.estimate,
            rep.std_err,
            exact,
            to_f64(&exact),
            rep.z.unwrap_or(0.0)
        ));
        out.say(format!(
            "L = {h}: estimate {:.5}, exact {:.5}, z {:.2}",
            rep.estimate,
            to_f64(&exact),
            rep.z.unwrap_or(0.0)
        ));
        if !rep.passes(cfg.sigmas) {
            bad.push(rep.label.clone());
        }
        reports.push(rep);
    }
    bad.extend(step.iter().filter(|s| !s.passes(cfg.sigmas)).map(|s| s.label.clone()));
    out.json(
        cfg,
        "simulate.json",
        &json!({
            "mu": r.mu,
            "samples": cfg.samples,
            "seed": cfg.seed,
            "stays": reports.iter().map(report_json).collect::<Vec<_>>(),
            "step_law": step.iter().map(report_json).collect::<Vec<_>>(),
            "inclusion_violations": tally.inclusion_violations,
        }),
    );
    out.add_if(cfg, Format::Csv, "simulate.csv", || csv);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(format!("outside {} sigma: {}", cfg.sigmas, bad.join(", "))))
    }
}

fn sandwich(cfg: &RunConfig, r: &Resolved, out: &mut Outputs) -> Run {
    need_samples(cfg)?;
    let d = distribution(r)?;
    let horizon = cfg.horizons.iter().copied().max().unwrap_or(0);
    let rep = sandwich_check(&r.sys, &d, &r.mu, horizon, cfg.samples, cfg.seed)?;
    out.say(format!(
        "L = {horizon}: {:.5} <= {:.5} <= {:.5}, shift violations {}",
        rep.lower_f64, rep.discrete.estimate, rep.upper_f64, rep.shift_violations
    ));
    out.json(cfg, "sandwich.json", &serde_json::to_value(&rep).expect("serializes"));
    if rep.passed() {
        Ok(())
    } else {
        Err(CliError::Verify("sandwich bounds violated".into()))
    }
}

fn ratio(cfg: &RunConfig, r: &Resolved, out: &mut Outputs) -> Run {
    let d = distribution(r)?;
    let rep = asymptotic_ratio(&r.sys, &d, &r.mu, &cfg.ells, cfg.budget)?;
    let mut csv = String::from("ell,lambda,numerator,denominator,ratio,deviation\n");
    for p in &rep.points {
        csv.push_str(&format!(
            "{},\"{}\",{},{},{},{}\n",
            p.ell, p.lambda, p.numerator, p.denominator, p.ratio, p.deviation
        ));
    }
    out.say(format!(
        "target {}; {} points, improved: {}",
        rep.target,
        rep.points.len(),
        rep.improved()
    ));
    let mut v = serde_json::to_value(&rep).expect("serializes");
    v["improved"] = json!(rep.improved());
    out.json(cfg, "ratio.json", &v);
    out.add_if(cfg, Format::Csv, "ratio.csv", || csv);
    Ok(())
}

type Check = Result<String, String>;

fn verify(cfg: &RunConfig, r: &Resolved, out: &mut Outputs) -> Run {
    let tau = r.tau_in_domain()?.clone();
    let d = distribution(r)?;
    let g = r.sys.weyl()?;
    let datum = r.sys.datum();
    let mut results: Vec<(&str, Check)> = Vec::new();

    results.push(("weyl_identity", {
        let mut bad = None;
        let mus = dominant_weights(r.sys.rank(), cfg.max_level.min(2));
        for mu in &mus {
            let lhs = r.sys.root_product() * &*r.sys.character(mu)?;
            if lhs != weyl_numerator(datum, &g, mu) {
                bad = Some(format!("fails at {mu}"));
                break;
            }
        }
        bad.map_or(Ok(format!("{} weights", mus.len())), Err)
    }));

    results.push(("doob_equals_hchain", (|| -> Result<Check, CliError> {
        let states = StateSet::by_level(d.module(), cfg.max_level);
        let pe = substochastic_table(&d, states.clone())?;
        pe.validate()?;
        let h = HarmonicWitness::psi(&r.sys, &states, &tau)?;
        if let Err(e) = h.check(&pe) {
            return Ok(Err(e.to_string()));
        }
        let doob = doob_transform(&pe, &h)?;
        let hc = hchain_matrix(&r.sys, &d, states.clone())?;
        let cond = conditioned_table(&r.sys, &d, states.clone())?;
        let diff = doob
            .first_difference(&hc)
            .or_else(|| hc.first_difference(&doob))
            .or_else(|| cond.first_difference(&hc));
        Ok(match diff {
            None => Ok(format!("{} interior states", states.interior().count())),
            Some((a, b, x, y)) => Err(format!("{a} -> {b}: {x} vs {y}")),
        })
    })()?));

    results.push(("finite_ell_identity", (|| -> Result<Check, CliError> {
        if !r.spec.is_irreducible() {
            return Ok(Ok("skipped: the identity concerns irreducible modules".into()));
        }
        let m = d.module();
        for mu in [Weight::zero(r.sys.rank())] {
            let target = r.sys.psi(&mu, &tau)?;
            for ell in 1..=cfg.ell.clamp(1, 3) {
                if ell <= 2 && m.f_multiplicities(&mu, ell)? != m.f_multiplicities_enumerated(&mu, ell, cfg.budget)? {
                    return Ok(Err(format!("DP and enumeration differ at l = {ell}")));
                }
                if alternating_pi_sum(datum, &g, m, &mu, &tau, ell)? != target {
                    return Ok(Err(format!("alternating sum differs at l = {ell}")));
                }
            }
        }
        Ok(Ok(format!("l = 1..={}", cfg.ell.clamp(1, 3))))
    })()?));

    results.push(("twisted_tau_outside", {
        let inside: Vec<_> = (0..g.len())
            .filter(|&x| x != g.identity() && twisted_tau(datum, &g, x, &tau).in_domain())
            .map(|x| format!("{:?}", g.element(x).word))
            .collect();
        if inside.is_empty() {
            Ok(format!("{} non-identity elements", g.len() - 1))
        } else {
            Err(format!("inside for {}", inside.join(", ")))
        }
    }));

    results.push(("twisted_law", {
        let m = d.module_arc();
        let mut bad = None;
        'outer: for x in 0..g.len() {
            let tw = CrystalDistribution::twisted(datum, &g, m.clone(), tau.clone(), x)?;
            for (k, node) in m.nodes().iter().enumerate() {
                let image = m.act_word(&g.element(x).word, node);
                if tw.prob(k) != d.prob(m.flat_index(image)) {
                    bad = Some(format!("w = {:?}, node {k}", g.element(x).word));
                    break 'outer;
                }
            }
        }
        bad.map_or(Ok(format!("{} nodes x {} elements", m.len(), g.len())), Err)
    }));

    results.push(("tensor_rule", (|| -> Result<Check, CliError> {
        let m = d.module();
        let tc = TensorCrystal::new(m);
        let ell = cfg.ell.clamp(1, 2);
        let order: Vec<usize> = (0..r.sys.rank()).rev().collect();
        for b in tc.all_nodes(ell) {
            let top = pitman(&tc, &b);
            if tc.raise_with_order(&b, &order) != top {
                return Ok(Err("operator order matters".into()));
            }
            let highest = component(&tc, &b).into_iter().filter(|x| tc.is_highest(x)).count();
            if highest != 1 {
                return Ok(Err(format!("{highest} highest nodes in one component")));
            }
            if pitman_path(datum, &tc.path(&b))? != tc.path(&top) {
                return Ok(Err("path and tensor Pitman transforms differ".into()));
            }
        }
        if exact_h_law(&d, ell) != hchain_path_law(&r.sys, &d, ell)? {
            return Ok(Err("enumerated and matrix H-laws differ".into()));
        }
        Ok(Ok(format!("tensor power {ell}")))
    })()?));

    let failed: Vec<&str> = results.iter().filter(|(_, c)| c.is_err()).map(|(n, _)| *n).collect();
    for (name, c) in &results {
        match c {
            Ok(s) => out.say(format!("PASS {name}: {s}")),
            Err(s) => out.say(format!("FAIL {name}: {s}")),
        }
    }
    let v: Vec<Value> = results
        .iter()
        .map(|(name, c)| match c {
            Ok(s) => json!({"check": name, "passed": true, "detail": s}),
            Err(s) => json!({"check": name, "passed": false, "detail": s}),
        })
        .collect();
    out.json(cfg, "verify.json", &json!({ "checks": v, "passed": failed.is_empty() }));
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(failed.join(", ")))
    }
}
