//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when
//! any criterion fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weylwalk_core::cartan::{ChamberPosition, Weight};
use weylwalk_core::charalg::{
    alternating_pi_sum, character_poly, sigma_poly, weyl_numerator, ExponentPolynomial, TauPoint,
};
use weylwalk_core::crystal::{
    component, CrystalGraph, CrystalOps, ModuleCrystal, ModuleSpec, Summand, TensorCrystal,
};
use weylwalk_core::markov::{
    conditioned_table, doob_transform, drift_position, exact_h_law, hchain_matrix, hchain_path_law,
    pitman, pitman_path, stay_probability, substochastic_table, twisted_tau, CrystalDistribution,
    HarmonicWitness, StateSet,
};
use weylwalk_core::montecarlo::{asymptotic_ratio, sandwich_check, simulate_stays, EstimatorReport};
use weylwalk_core::path::PiecewisePath;
use weylwalk_core::rational::{frac, q_frac, q_int, to_f64, Frac, Q};
use weylwalk_core::RootSystem;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| x.to_string())
}

fn w(v: &[i64]) -> Weight {
    Weight(v.to_vec())
}

/// A C2 weight given in the orthonormal basis `(x, y) = x e1 + y e2`.
fn eps(x: i64, y: i64) -> Weight {
    w(&[x - y, y])
}

/// Piecewise path through `eps`-coordinate vertices at times `0, 1/2, 1`.
fn eps_path(mid: (i64, i64), end: (i64, i64)) -> PiecewisePath {
    let p = |(x, y): (i64, i64)| vec![Frac::from(x - y), Frac::from(y)];
    PiecewisePath::canonicalize(
        &[frac(0, 1), frac(1, 2), frac(1, 1)],
        &[p((0, 0)), p(mid), p(end)],
    )
    .unwrap()
}

fn gamma12() -> PiecewisePath {
    eps_path((1, 0), (1, 1))
}

fn c2() -> RootSystem {
    RootSystem::from_label("C2").unwrap()
}

fn tau(a: (i64, i64), b: (i64, i64)) -> TauPoint {
    TauPoint::new(vec![q_frac(a.0, a.1), q_frac(b.0, b.1)], 2).unwrap()
}

fn gamma_spec(extra: Option<u64>) -> ModuleSpec {
    let g = Summand {
        kappa: eps(1, 1),
        multiplicity: 1,
        path: Some(gamma12()),
    };
    match extra {
        None => ModuleSpec { summands: vec![g] },
        Some(a2) => ModuleSpec {
            summands: vec![
                Summand {
                    kappa: eps(1, 0),
                    multiplicity: 1,
                    path: None,
                },
                Summand { multiplicity: a2, ..g },
            ],
        },
    }
}

fn dist(sys: &RootSystem, spec: &ModuleSpec, t: &TauPoint) -> Result<CrystalDistribution, String> {
    let m = Arc::new(e(sys.module(spec))?);
    e(CrystalDistribution::new(sys.datum(), m, t.clone()))
}

/// Follows lowering edges from the highest node and returns colors and
/// paths along the chain.
fn chain(g: &CrystalGraph) -> (Vec<usize>, Vec<PiecewisePath>) {
    let mut colors = Vec::new();
    let mut paths = vec![g.path(0).clone()];
    let mut cur = 0;
    'walk: loop {
        for i in 0..2 {
            if let Some(next) = g.f_of(cur, i) {
                colors.push(i + 1);
                paths.push(g.path(next).clone());
                cur = next;
                continue 'walk;
            }
        }
        return (colors, paths);
    }
}

fn golden_crystals() -> Outcome {
    let sys = c2();
    let d = sys.datum();
    let b1 = e(CrystalGraph::straight(d, &eps(1, 0)))?;
    check(b1.len() == 4, || format!("B(pi_1) has {} nodes", b1.len()))?;
    let (colors, paths) = chain(&b1);
    check(colors == [1, 2, 1], || format!("B(pi_1) colors {colors:?}"))?;
    check(b1.edges().len() == 3, || "B(pi_1) is not a chain".into())?;
    let expected: Vec<PiecewisePath> = [eps(1, 0), eps(0, 1), eps(0, -1), eps(-1, 0)]
        .iter()
        .map(PiecewisePath::straight_to)
        .collect();
    check(paths == expected, || format!("B(pi_1) paths {paths:?}"))?;

    let g = e(CrystalGraph::generate(d, &gamma12()))?;
    check(g.len() == 5, || format!("B(gamma_12) has {} nodes", g.len()))?;
    let (colors, paths) = chain(&g);
    check(colors == [2, 1, 1, 2], || format!("B(gamma_12) colors {colors:?}"))?;
    check(g.edges().len() == 4, || "B(gamma_12) is not a chain".into())?;
    let expected = vec![
        eps_path((1, 0), (1, 1)),
        eps_path((1, 0), (1, -1)),
        eps_path((0, 1), (0, 0)),
        eps_path((0, 1), (-1, 1)),
        eps_path((0, -1), (-1, -1)),
    ];
    check(paths == expected, || format!("B(gamma_12) paths {paths:?}"))?;
    let g22 = &paths[2];
    check(
        g22.eval(frac(0, 1)).iter().all(|x| x.is_zero())
            && g22.eval(frac(1, 1)).iter().all(|x| x.is_zero())
            && !g22.is_constant(),
        || "gamma_22bar does not return to 0".into(),
    )?;
    Ok("B(pi_1): 4 nodes 1,2,1; B(gamma_12): 5 nodes 2,1,1,2".into())
}

fn poly(terms: &[(&[i64], i64)]) -> ExponentPolynomial {
    terms.iter().fold(ExponentPolynomial::zero(2), |acc, (x, c)| {
        &acc + &ExponentPolynomial::int_monomial(x, *c)
    })
}

fn character_goldens() -> Outcome {
    let sys = c2();
    let d = sys.datum();
    let s10 = sys.character(&eps(1, 0)).map_err(|x| x.to_string())?;
    let s11 = sys.character(&eps(1, 1)).map_err(|x| x.to_string())?;
    let e10 = poly(&[(&[0, 0], 1), (&[1, 0], 1), (&[1, 1], 1), (&[2, 1], 1)]);
    let e11 = poly(&[(&[0, 0], 1), (&[0, 1], 1), (&[1, 1], 1), (&[2, 1], 1), (&[2, 2], 1)]);
    check(*s10 == e10, || format!("S_(1,0) = {s10}"))?;
    check(*s11 == e11, || format!("S_(1,1) = {s11}"))?;
    let g = e(CrystalGraph::generate(d, &gamma12()))?;
    check(character_poly(d, &g) == e11, || "character of B(gamma_12) differs".into())?;
    for (a1, a2) in [(1u64, 1u64), (2, 3)] {
        let spec = ModuleSpec {
            summands: vec![
                Summand {
                    kappa: eps(1, 0),
                    multiplicity: a1,
                    path: None,
                },
                Summand {
                    kappa: eps(1, 1),
                    multiplicity: a2,
                    path: Some(gamma12()),
                },
            ],
        };
        let m = e(ModuleCrystal::generate(d, spec))?;
        // a1 S_(1,0) / (tau1 sqrt(tau2)) + a2 S_(1,1) / (tau1 tau2)
        let inv1 = ExponentPolynomial::monomial(vec![frac(-1, 1), frac(-1, 2)], q_int(a1 as i64));
        let inv2 = ExponentPolynomial::monomial(vec![frac(-1, 1), frac(-1, 1)], q_int(a2 as i64));
        let expected = &(&e10 * &inv1) + &(&e11 * &inv2);
        let got = sigma_poly(d, &m);
        check(got == expected, || format!("Sigma_M = {got}, expected {expected}"))?;
    }
    Ok("S_(1,0), S_(1,1) and Sigma_M (a = (1,1), (2,3)) exact".into())
}

fn weyl_identity() -> Outcome {
    let mut n = 0;
    for (label, weights) in [
        ("C2", vec![eps(0, 0), eps(1, 0), eps(1, 1), eps(2, 1), eps(3, 1)]),
        ("A2", vec![w(&[0, 0]), w(&[1, 0]), w(&[0, 1]), w(&[1, 1]), w(&[2, 1])]),
    ] {
        let sys = e(RootSystem::from_label(label))?;
        let g = e(sys.weyl())?;
        for mu in weights {
            let lhs = e(sys.psi_poly(&mu))?;
            let rhs = weyl_numerator(sys.datum(), &g, &mu);
            check(lhs == rhs, || format!("{label} {mu}: {lhs} != {rhs}"))?;
            n += 1;
        }
    }
    // the eight-term display, for every partition with mu_1 <= 6
    let sys = c2();
    let g = e(sys.weyl())?;
    for m1 in 0..=6i64 {
        for m2 in 0..=m1 {
            let display = poly(&[
                (&[0, 0], 1),
                (&[m1 - m2 + 1, m1 + 2], 1),
                (&[2 * m1 + 4, m1 + m2 + 3], 1),
                (&[m1 + m2 + 3, m2 + 1], 1),
                (&[m1 - m2 + 1, 0], -1),
                (&[0, m2 + 1], -1),
                (&[2 * m1 + 4, m1 + 2], -1),
                (&[m1 + m2 + 3, m1 + m2 + 3], -1),
            ]);
            let got = weyl_numerator(sys.datum(), &g, &eps(m1, m2));
            check(got.len() == 8 && got == display, || {
                format!("partition ({m1},{m2}): {got} != {display}")
            })?;
        }
    }
    Ok(format!("{n} product/numerator identities, 28 eight-term displays"))
}

fn central_identity() -> Outcome {
    let c2sys = c2();
    let a2sys = e(RootSystem::from_label("A2"))?;
    let half = tau((1, 2), (1, 2));
    let rooted = e(TauPoint::from_roots(vec![q_frac(2, 3), q_frac(1, 2)], 2))?;
    let mut rows = 0;
    let cases: Vec<(&str, &RootSystem, ModuleSpec, Vec<TauPoint>)> = vec![
        ("C2 (1,0)", &c2sys, ModuleSpec::irreducible(eps(1, 0)), vec![half.clone(), rooted.clone()]),
        ("C2 (1,1)", &c2sys, gamma_spec(None), vec![half.clone(), rooted.clone()]),
        ("C2 a1=a2=1", &c2sys, gamma_spec(Some(1)), vec![rooted.clone()]),
        ("A2 omega_1", &a2sys, ModuleSpec::irreducible(w(&[1, 0])), vec![half.clone(), tau((1, 3), (3, 4))]),
    ];
    for (name, sys, spec, points) in cases {
        for t in points {
            let d = dist(sys, &spec, &t)?;
            let states = StateSet::by_level(d.module(), 4);
            let pe = e(substochastic_table(&d, states.clone()))?;
            e(pe.validate())?;
            let h = e(HarmonicWitness::psi(sys, &states, &t))?;
            e(h.check(&pe)).map_err(|x| format!("{name}: {x}"))?;
            let doob = e(doob_transform(&pe, &h))?;
            let hc = e(hchain_matrix(sys, &d, states.clone()))?;
            e(hc.validate())?;
            if let Some(diff) = doob.first_difference(&hc).or_else(|| hc.first_difference(&doob)) {
                return Err(format!("{name}: Doob and H-chain differ at {diff:?}"));
            }
            let cond = e(conditioned_table(sys, &d, states.clone()))?;
            check(cond.first_difference(&hc).is_none(), || {
                format!("{name}: conditioned kernel differs from the H-chain")
            })?;
            rows += states.interior().count();
        }
    }
    Ok(format!("{rows} interior rows equal entrywise; psi harmonic on each"))
}

fn finite_ell_identity() -> Outcome {
    let t = tau((1, 2), (1, 3));
    let mut checks = 0;
    for label in ["C2", "A2"] {
        let sys = e(RootSystem::from_label(label))?;
        let g = e(sys.weyl())?;
        let m = e(sys.irreducible(&w(&[1, 0])))?;
        for mu in [w(&[0, 0]), w(&[1, 0])] {
            let target = e(sys.psi(&mu, &t))?;
            for ell in 1..=3 {
                let dp = e(m.f_multiplicities(&mu, ell))?;
                let brute = e(m.f_multiplicities_enumerated(&mu, ell, 1_000_000))?;
                check(dp == brute, || format!("{label} {mu} l={ell}: DP {dp:?} vs enumeration {brute:?}"))?;
                let lhs = e(alternating_pi_sum(sys.datum(), &g, &m, &mu, &t, ell))?;
                check(lhs == target, || format!("{label} {mu} l={ell}: {lhs} != {target}"))?;
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} exact identities; DP = enumeration for l <= 3"))
}

fn pitman_law() -> Outcome {
    let sys = c2();
    let t = tau((1, 2), (1, 3));
    let d = dist(&sys, &ModuleSpec::irreducible(eps(1, 0)), &t)?;
    let tc = TensorCrystal::new(d.module());
    let mut nodes = 0;
    for ell in [2usize, 3] {
        let enumerated = exact_h_law(&d, ell);
        let matrix = e(hchain_path_law(&sys, &d, ell))?;
        check(enumerated == matrix, || format!("l={ell}: H-law from enumeration differs"))?;
        let total: Q = enumerated.values().sum();
        check(total.is_one(), || format!("l={ell}: law sums to {total}"))?;
        for b in tc.all_nodes(ell) {
            let top = pitman(&tc, &b);
            let reversed = tc.raise_with_order(&b, &[1, 0]);
            check(top == reversed, || format!("order dependence at {b:?}"))?;
            let highest: Vec<_> = component(&tc, &b).into_iter().filter(|x| tc.is_highest(x)).collect();
            check(highest == vec![top.clone()], || format!("component of {b:?} has highest {highest:?}"))?;
            let p = e(pitman_path(sys.datum(), &tc.path(&b)))?;
            check(p == tc.path(&top), || format!("path-level Pitman differs at {b:?}"))?;
            nodes += 1;
        }
    }
    Ok(format!("laws equal for l = 2, 3; {nodes} tensor nodes, unique highest"))
}

fn monte_carlo_psi() -> Outcome {
    let sys = c2();
    let t = tau((1, 2), (1, 2));
    let d = dist(&sys, &ModuleSpec::irreducible(eps(1, 0)), &t)?;
    let zero = w(&[0, 0]);
    let n = 200_000;
    let psi6 = stay_probability(&d, &zero, 6);
    let psi = e(sys.psi(&zero, &t))?;
    check(psi == q_frac(21, 128), || format!("psi(0) = {psi}"))?;
    let tally = e(simulate_stays(&d, &zero, &[6, 50], n, 20240611, None))?;
    let r6 = EstimatorReport::bernoulli("psi_hat_6", tally.continuous[0], n, Some(&psi6));
    let r50 = EstimatorReport::bernoulli("psi_hat_50", tally.continuous[1], n, Some(&psi));
    check(r6.passes(4.0), || format!("psi_hat_6 = {} vs {} (z {:?})", r6.estimate, to_f64(&psi6), r6.z))?;
    let band = (4.0 * r50.sigma()).max(to_f64(&(&psi6 - &psi)));
    check((r50.estimate - to_f64(&psi)).abs() <= band, || {
        format!("psi_hat_50 = {} vs 21/128 (band {band})", r50.estimate)
    })?;
    Ok(format!(
        "psi_hat_6 = {:.5} (exact {:.5}, z {:.2}); psi_hat_50 = {:.5} vs 0.16406 (band {:.4})",
        r6.estimate,
        to_f64(&psi6),
        r6.z.unwrap(),
        r50.estimate,
        band
    ))
}

fn twisted_domain() -> Outcome {
    let t = tau((1, 2), (1, 3));
    let mut n = 0;
    for label in ["C2", "A2"] {
        let sys = e(RootSystem::from_label(label))?;
        let g = e(sys.weyl())?;
        for x in 0..g.len() {
            let inside = twisted_tau(sys.datum(), &g, x, &t).in_domain();
            check(inside == (x == g.identity()), || {
                format!("{label}: element {:?} gives in_domain = {inside}", g.element(x).word)
            })?;
            n += (x != g.identity()) as usize;
        }
    }
    check(n == 12, || format!("{n} non-identity elements"))?;
    Ok("tau^w leaves the domain for all 7 + 5 non-identity elements".into())
}

fn twisted_law() -> Outcome {
    let sys = c2();
    let g = e(sys.weyl())?;
    let t = tau((1, 2), (1, 3));
    let mut n = 0;
    for spec in [ModuleSpec::irreducible(eps(1, 0)), gamma_spec(None)] {
        let base = dist(&sys, &spec, &t)?;
        let m = base.module_arc();
        for x in 0..g.len() {
            let tw = e(CrystalDistribution::twisted(sys.datum(), &g, m.clone(), t.clone(), x))?;
            for (k, r) in m.nodes().iter().enumerate() {
                let image = m.act_word(&g.element(x).word, r);
                check(tw.prob(k) == base.prob(m.flat_index(image)), || {
                    format!("p^w differs at node {r:?}, w = {:?}", g.element(x).word)
                })?;
                n += 1;
            }
        }
    }
    Ok(format!("p^w_b = p_w(b) on {n} (node, w) pairs"))
}

fn random_tau(rng: &mut ChaCha8Rng, rank: usize) -> TauPoint {
    let values = (0..rank)
        .map(|_| {
            let den = 2 + (rng.next_u64() % 60) as i64;
            let num = 1 + (rng.next_u64() % (den as u64 - 1)) as i64;
            q_frac(num, den)
        })
        .collect();
    TauPoint::new(values, 2).unwrap()
}

fn drift() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let c2sys = c2();
    let a2sys = e(RootSystem::from_label("A2"))?;
    let mut n = 0;
    for _ in 0..10 {
        let t = random_tau(&mut rng, 2);
        for (sys, spec) in [
            (&c2sys, ModuleSpec::irreducible(eps(1, 0))),
            (&c2sys, gamma_spec(None)),
            (&a2sys, ModuleSpec::irreducible(w(&[1, 0]))),
        ] {
            let g = e(sys.weyl())?;
            let base = dist(sys, &spec, &t)?;
            let m = base.drift();
            check(drift_position(&m) == ChamberPosition::Interior, || {
                format!("m(1) = {m:?} at {:?}", t.values())
            })?;
            for x in 1..g.len() {
                let tw = e(CrystalDistribution::twisted(sys.datum(), &g, base.module_arc(), t.clone(), x))?;
                let mw = tw.drift();
                check(mw == g.act_q(g.inverse(x), &m), || "m^w != w^{-1}(m)".into())?;
                check(drift_position(&mw) == ChamberPosition::Outside, || {
                    format!("m^w(1) = {mw:?} is in the chamber")
                })?;
            }
            n += 1;
        }
    }
    Ok(format!("{n} (tau, crystal) pairs: m(1) interior, every m^w(1) outside"))
}

fn sandwich() -> Outcome {
    let sys = c2();
    let t = tau((1, 2), (1, 2));
    let n = 100_000;
    let horizon = 100;
    let zero = w(&[0, 0]);
    let d = dist(&sys, &ModuleSpec::irreducible(eps(1, 0)), &t)?;
    let r = e(sandwich_check(&sys, &d, &zero, horizon, n, 7))?;
    check(r.lower == r.upper && r.kappa0 == zero, || "bounds differ for a minuscule weight".into())?;
    // truncation at a finite horizon only adds mass; its size is exact
    let bias = to_f64(&(stay_probability(&d, &zero, horizon) - e(sys.psi(&zero, &t))?));
    let sd = (r.lower_f64 * (1.0 - r.lower_f64) / n as f64).sqrt();
    let dev = (r.discrete.estimate - r.lower_f64).abs();
    check(dev <= 4.0 * sd + bias, || {
        format!("minuscule: discrete {} vs psi {} (4 sigma {}, bias {bias})", r.discrete.estimate, r.lower_f64, 4.0 * sd)
    })?;
    check(r.passed(), || format!("minuscule report failed: {r:?}"))?;
    let d2 = dist(&sys, &gamma_spec(None), &t)?;
    let r2 = e(sandwich_check(&sys, &d2, &zero, horizon, n, 8))?;
    check(r2.kappa0 == eps(1, 0), || format!("kappa0 = {}", r2.kappa0))?;
    check(r2.lower_ok && r2.upper_ok, || format!("sandwich bounds violated: {r2:?}"))?;
    check(r2.shift_violations == 0, || format!("{} shift violations", r2.shift_violations))?;
    check(r2.inclusion_violations == 0, || "continuous event not inside discrete".into())?;
    Ok(format!(
        "minuscule {:.5} vs {:.5} (bias {bias:.1e}); (1,1): {:.5} <= {:.5} <= {:.5}, {} shift checks clean",
        r.discrete.estimate, r.lower_f64, r2.lower_f64, r2.discrete.estimate, r2.upper_f64, r2.shift_checks
    ))
}

fn ratio() -> Outcome {
    let sys = c2();
    let t = tau((1, 2), (1, 2));
    let d = dist(&sys, &ModuleSpec::irreducible(eps(1, 0)), &t)?;
    let ells: Vec<usize> = (6..=14).collect();
    let r = e(asymptotic_ratio(&sys, &d, &eps(2, 0), &ells, 1_000_000))?;
    check(r.skipped.is_empty(), || format!("skipped {:?}", r.skipped))?;
    let devs: Vec<String> = r.points.iter().map(|p| format!("{:.2}", p.deviation)).collect();
    check(r.improved(), || format!("deviations {devs:?}"))?;
    Ok(format!("target {} ; deviations l=6..14: {}", r.target, devs.join(" ")))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("C2 golden crystals", Duration::from_secs(1), golden_crystals),
        ("character goldens and Sigma_M", Duration::from_secs(1), character_goldens),
        ("Weyl numerator identity", Duration::from_secs(5), weyl_identity),
        ("Doob transform equals H-chain", Duration::from_secs(10), central_identity),
        ("finite-l alternating identity", Duration::from_secs(30), finite_ell_identity),
        ("Pitman law by enumeration", Duration::from_secs(30), pitman_law),
        ("Monte-Carlo psi", Duration::from_secs(60), monte_carlo_psi),
        ("twisted tau leaves the domain", Duration::from_secs(1), twisted_domain),
        ("twisted law p^w_b = p_w(b)", Duration::from_secs(5), twisted_law),
        ("drift interior, twisted drift outside", Duration::from_secs(10), drift),
        ("discrete stay sandwich", Duration::from_secs(120), sandwich),
        ("ratio trend", Duration::from_secs(120), ratio),
    ];
    let mut failed = 0;
    for (k, (name, limit, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        let (ok, detail) = match out {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; took {took:?}, limit {limit:?}")),
            Err(d) => (false, d),
        };
        failed += (!ok) as usize;
        println!(
            "{} {:>2} {name} ({:.2}s): {detail}",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
