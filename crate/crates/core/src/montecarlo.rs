//! Seeded sampling of the path walk and estimators for cone-exit
//! statistics.
//!
//! Every event is decided with integers: node draws use an exact inverse
//! CDF on 53-bit uniforms and chamber membership uses the per-node stay
//! thresholds. Work is cut into fixed-size batches, batch `b` reading the
//! ChaCha stream `b` of the seed, so results do not depend on the number
//! of threads.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cartan::Weight;
use crate::crystal::{NodeRef, TensorCrystal, TensorNode};
use crate::error::{Error, Result};
use crate::markov::{hchain_row, pitman_heights, CrystalDistribution};
use crate::rational::{to_f64, Q};
use crate::system::RootSystem;

pub const BATCH: u64 = 4096;

/// Inverse CDF on `[0, 2^53)`: node `j` is drawn iff
/// `cut[j-1] <= u < cut[j]` with `cut[j] = ceil(2^53 (p_0 + .. + p_j))`,
/// which is the same as `u / 2^53 < C_j` for integer `u`.
#[derive(Clone, Debug)]
pub struct StepSampler {
    cut: Vec<u64>,
}

impl StepSampler {
    pub fn new(dist: &CrystalDistribution) -> Self {
        let scale = Q::from_integer(BigInt::one() << 53);
        let mut acc = Q::zero();
        let cut = dist
            .probs()
            .iter()
            .map(|p| {
                acc += p;
                (&acc * &scale).ceil().to_integer().to_u64().expect("cumulative mass is at most 1")
            })
            .collect();
        StepSampler { cut }
    }

    pub fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let u = rng.next_u64() >> 11;
        self.cut.partition_point(|&c| c <= u)
    }
}

fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Runs `n` samples in batches and merges per-batch results in batch order.
fn batched<T, F, M>(n: u64, seed: u64, run: F, merge: M, empty: T) -> T
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
    M: Fn(T, T) -> T,
{
    let batches = n.div_ceil(BATCH);
    let parts: Vec<T> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let count = BATCH.min(n - b * BATCH);
            run(&mut batch_rng(seed, b), count)
        })
        .collect();
    parts.into_iter().fold(empty, merge)
}

/// One realisation of the walk started at `start`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkSample {
    pub seed: u64,
    pub start: Weight,
    pub steps: Vec<NodeRef>,
    /// `W_0, ..., W_L`.
    pub positions: Vec<Weight>,
    /// Whether step `k + 1` keeps the continuous path in the chamber.
    pub stays: Vec<bool>,
}

impl WalkSample {
    /// The continuous path stays in the chamber on `[0, ell]`.
    pub fn continuous_stay(&self, ell: usize) -> bool {
        self.positions[0].is_dominant() && self.stays[..ell].iter().all(|&s| s)
    }

    /// `W_0, ..., W_ell` all lie in the chamber.
    pub fn discrete_stay(&self, ell: usize) -> bool {
        self.positions[..=ell].iter().all(|w| w.is_dominant())
    }
}

pub fn sample_walk(dist: &CrystalDistribution, start: &Weight, horizon: usize, seed: u64) -> WalkSample {
    let sampler = StepSampler::new(dist);
    let mut rng = batch_rng(seed, 0);
    let module = dist.module();
    let mut positions = vec![start.clone()];
    let mut steps = Vec::with_capacity(horizon);
    let mut stays = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let j = sampler.draw(&mut rng);
        let cur = positions.last().unwrap();
        stays.push(cur.is_dominant() && module.stays(j, cur.fw()));
        positions.push(cur + &dist.node_weight(j));
        steps.push(module.nodes()[j]);
    }
    WalkSample {
        seed,
        start: start.clone(),
        steps,
        positions,
        stays,
    }
}

/// A Bernoulli (or frequency) estimate with its standard error and, when
/// an exact target is known, the z-score of the estimate under it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub label: String,
    pub estimate: f64,
    pub successes: u64,
    pub n: u64,
    /// `sqrt(p_hat (1 - p_hat) / n)`.
    pub std_err: f64,
    pub exact: Option<String>,
    pub exact_f64: Option<f64>,
    /// `(p_hat - p) / sqrt(p (1 - p) / n)`.
    pub z: Option<f64>,
}

impl EstimatorReport {
    pub fn bernoulli(label: impl Into<String>, successes: u64, n: u64, exact: Option<&Q>) -> Self {
        let p = if n == 0 { 0.0 } else { successes as f64 / n as f64 };
        let std_err = if n == 0 { 0.0 } else { (p * (1.0 - p) / n as f64).sqrt() };
        let exact_f64 = exact.map(to_f64);
        let z = exact_f64.map(|q| {
            let s = (q * (1.0 - q) / n as f64).sqrt();
            if s > 0.0 {
                (p - q) / s
            } else if p == q {
                0.0
            } else {
                f64::INFINITY
            }
        });
        EstimatorReport {
            label: label.into(),
            estimate: p,
            successes,
            n,
            std_err,
            exact: exact.map(|q| q.to_string()),
            exact_f64,
            z,
        }
    }

    /// Standard deviation under the exact target, falling back to the
    /// empirical standard error.
    pub fn sigma(&self) -> f64 {
        match self.exact_f64 {
            Some(q) => (q * (1.0 - q) / self.n as f64).sqrt(),
            None => self.std_err,
        }
    }

    /// `|p_hat - target| <= k sigma + slack`.
    pub fn within(&self, target: f64, k: f64, slack: f64) -> bool {
        (self.estimate - target).abs() <= k * self.sigma() + slack
    }

    /// Within `k` sigma of the exact target.
    pub fn passes(&self, k: f64) -> bool {
        match self.exact_f64 {
            Some(q) => self.within(q, k, 0.0),
            None => true,
        }
    }
}

/// Empirical frequency of every node against its exact probability.
pub fn empirical_step_law(dist: &CrystalDistribution, n: u64, seed: u64) -> Vec<EstimatorReport> {
    let sampler = StepSampler::new(dist);
    let m = dist.len();
    let counts = batched(
        n,
        seed,
        |rng, count| {
            let mut c = vec![0u64; m];
            for _ in 0..count {
                c[sampler.draw(rng)] += 1;
            }
            c
        },
        |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        vec![0u64; m],
    );
    let module = dist.module();
    counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let r = module.nodes()[k];
            EstimatorReport::bernoulli(
                format!("node {}:{} weight {}", r.summand, r.node, dist.node_weight(k)),
                c,
                n,
                Some(dist.prob(k)),
            )
        })
        .collect()
}

/// Survival counts of one batch of walks at several horizons.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StayTally {
    pub horizons: Vec<usize>,
    pub n: u64,
    /// Walks whose continuous path stays in the chamber up to each horizon.
    pub continuous: Vec<u64>,
    /// Walks with `W_0, .., W_L` in the chamber.
    pub discrete: Vec<u64>,
    /// Samples where the continuous event held but the discrete one failed
    /// (impossible; kept as a check).
    pub inclusion_violations: u64,
    /// Steps where all positions so far were dominant but the
    /// `kappa0`-shifted step left the chamber.
    pub shift_violations: u64,
    /// Steps on which the shift check was performed.
    pub shift_checks: u64,
}

impl StayTally {
    fn merge(mut self, o: StayTally) -> StayTally {
        if self.horizons.is_empty() {
            return o;
        }
        self.n += o.n;
        for (a, b) in self.continuous.iter_mut().zip(&o.continuous) {
            *a += b;
        }
        for (a, b) in self.discrete.iter_mut().zip(&o.discrete) {
            *a += b;
        }
        self.inclusion_violations += o.inclusion_violations;
        self.shift_violations += o.shift_violations;
        self.shift_checks += o.shift_checks;
        self
    }
}

/// Simulates `n` walks from `mu` up to the largest horizon and counts
/// survivals. With `shift` set, the shifted continuous path is checked on
/// every step that keeps all positions dominant.
pub fn simulate_stays(
    dist: &CrystalDistribution,
    mu: &Weight,
    horizons: &[usize],
    n: u64,
    seed: u64,
    shift: Option<&Weight>,
) -> Result<StayTally> {
    if !mu.is_dominant() {
        return Err(Error::Precondition(format!("start {mu} is not dominant")));
    }
    let mut hs = horizons.to_vec();
    hs.sort_unstable();
    hs.dedup();
    let horizon = hs.last().copied().unwrap_or(0);
    let sampler = StepSampler::new(dist);
    let module = dist.module();
    let weights: Vec<Weight> = (0..dist.len()).map(|k| dist.node_weight(k)).collect();
    let rank = mu.rank();
    let run = |rng: &mut ChaCha8Rng, count: u64| {
        let mut t = StayTally {
            horizons: hs.clone(),
            n: count,
            continuous: vec![0; hs.len()],
            discrete: vec![0; hs.len()],
            ..Default::default()
        };
        let mut pos = vec![0i64; rank];
        let mut shifted = vec![0i64; rank];
        for _ in 0..count {
            pos.copy_from_slice(mu.fw());
            let mut cont_exit = usize::MAX;
            let mut disc_exit = usize::MAX;
            for step in 1..=horizon {
                let j = sampler.draw(rng);
                if cont_exit == usize::MAX && !module.stays(j, &pos) {
                    cont_exit = step;
                }
                let before = pos.clone();
                for (p, w) in pos.iter_mut().zip(weights[j].fw()) {
                    *p += w;
                }
                if disc_exit == usize::MAX {
                    if pos.iter().any(|&x| x < 0) {
                        disc_exit = step;
                    } else if let Some(k0) = shift {
                        for ((s, b), k) in shifted.iter_mut().zip(&before).zip(k0.fw()) {
                            *s = b + k;
                        }
                        t.shift_checks += 1;
                        if !module.stays(j, &shifted) {
                            t.shift_violations += 1;
                        }
                    }
                }
                if disc_exit != usize::MAX && cont_exit != usize::MAX {
                    break;
                }
            }
            for (k, &h) in hs.iter().enumerate() {
                let c = cont_exit > h;
                let d = disc_exit > h;
                t.continuous[k] += c as u64;
                t.discrete[k] += d as u64;
                if c && !d {
                    t.inclusion_violations += 1;
                }
            }
        }
        t
    };
    Ok(batched(n, seed, run, StayTally::merge, StayTally::default()))
}

/// `psi_hat_L(mu)`, the fraction of walks whose continuous path stays in
/// the chamber up to time `L`.
pub fn estimate_stay_probability(
    dist: &CrystalDistribution,
    mu: &Weight,
    horizon: usize,
    n: u64,
    seed: u64,
    exact: Option<&Q>,
) -> Result<EstimatorReport> {
    let t = simulate_stays(dist, mu, &[horizon], n, seed, None)?;
    Ok(EstimatorReport::bernoulli(
        format!("psi_hat_{horizon}({mu})"),
        t.continuous[0],
        n,
        exact,
    ))
}

/// Nested estimates `psi_hat_L(mu)` for several `L` on the same walks, so
/// that they are nonincreasing in `L` sample by sample.
pub fn psi_curve(
    dist: &CrystalDistribution,
    mu: &Weight,
    horizons: &[usize],
    n: u64,
    seed: u64,
) -> Result<Vec<EstimatorReport>> {
    let t = simulate_stays(dist, mu, horizons, n, seed, None)?;
    Ok(t.horizons
        .iter()
        .zip(&t.continuous)
        .map(|(h, &c)| EstimatorReport::bernoulli(format!("psi_hat_{h}({mu})"), c, n, None))
        .collect())
}

/// Two-sided bounds on the discrete stay probability
/// `psi(mu) <= P_mu(W_l in C for all l) <= psi(mu + kappa0)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SandwichReport {
    pub mu: Weight,
    pub kappa0: Weight,
    pub horizon: usize,
    pub lower: String,
    pub lower_f64: f64,
    pub upper: String,
    pub upper_f64: f64,
    pub discrete: EstimatorReport,
    pub continuous: EstimatorReport,
    pub shift_violations: u64,
    pub shift_checks: u64,
    pub inclusion_violations: u64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.lower_ok && self.upper_ok && self.shift_violations == 0 && self.inclusion_violations == 0
    }
}

/// `kappa0` of a module: the coordinatewise maximum over its summands.
pub fn module_kappa0(dist: &CrystalDistribution) -> Weight {
    let parts = &dist.module().parts;
    let n = dist.module().rank();
    Weight(
        (0..n)
            .map(|i| parts.iter().map(|g| g.kappa0().fw()[i]).max().unwrap_or(0))
            .collect(),
    )
}

pub fn sandwich_check(
    sys: &RootSystem,
    dist: &CrystalDistribution,
    mu: &Weight,
    horizon: usize,
    n: u64,
    seed: u64,
) -> Result<SandwichReport> {
    let tau = dist.tau();
    let k0 = module_kappa0(dist);
    let lower = sys.psi(mu, tau)?;
    let upper = sys.psi(&(mu + &k0), tau)?;
    let t = simulate_stays(dist, mu, &[horizon], n, seed, Some(&k0))?;
    let discrete = EstimatorReport::bernoulli(format!("discrete stay to {horizon}"), t.discrete[0], n, None);
    let continuous =
        EstimatorReport::bernoulli(format!("continuous stay to {horizon}"), t.continuous[0], n, Some(&lower));
    let (lo, hi) = (to_f64(&lower), to_f64(&upper));
    let sd = |q: f64| (q * (1.0 - q) / n as f64).sqrt();
    Ok(SandwichReport {
        mu: mu.clone(),
        kappa0: k0,
        horizon,
        lower: lower.to_string(),
        lower_f64: lo,
        upper: upper.to_string(),
        upper_f64: hi,
        lower_ok: discrete.estimate >= lo - 4.0 * sd(lo),
        upper_ok: discrete.estimate <= hi + 4.0 * sd(hi),
        discrete,
        continuous,
        shift_violations: t.shift_violations,
        shift_checks: t.shift_checks,
        inclusion_violations: t.inclusion_violations,
    })
}

/// Observed transitions of the chain `H_k = wt(P(b_1 (x) .. (x) b_k))`
/// against the exact matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HLawReport {
    pub ell_max: usize,
    pub n: u64,
    pub cells: Vec<HLawCell>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HLawCell {
    pub from: Weight,
    pub to: Weight,
    pub visits: u64,
    pub report: EstimatorReport,
}

impl HLawReport {
    pub fn passed(&self, k: f64) -> bool {
        self.cells.iter().all(|c| c.report.passes(k))
    }

    pub fn worst_z(&self) -> f64 {
        self.cells
            .iter()
            .filter_map(|c| c.report.z)
            .fold(0.0, |a, z| a.max(z.abs()))
    }
}

pub fn empirical_h_law(
    sys: &RootSystem,
    dist: &CrystalDistribution,
    ell_max: usize,
    n: u64,
    seed: u64,
) -> Result<HLawReport> {
    let sampler = StepSampler::new(dist);
    let module = dist.module();
    type Counts = BTreeMap<(Weight, Weight), u64>;
    let run = |rng: &mut ChaCha8Rng, count: u64| {
        let tc = TensorCrystal::new(module);
        let mut c: Counts = BTreeMap::new();
        for _ in 0..count {
            let b = TensorNode {
                factors: (0..ell_max).map(|_| module.nodes()[sampler.draw(rng)]).collect(),
            };
            let h = pitman_heights(&tc, &b);
            for pair in h.windows(2) {
                *c.entry((pair[0].clone(), pair[1].clone())).or_insert(0) += 1;
            }
        }
        c
    };
    let merge = |mut a: Counts, b: Counts| {
        for (k, v) in b {
            *a.entry(k).or_insert(0) += v;
        }
        a
    };
    let counts = batched(n, seed, run, merge, BTreeMap::new());
    let mut visits: BTreeMap<Weight, u64> = BTreeMap::new();
    for ((from, _), v) in &counts {
        *visits.entry(from.clone()).or_insert(0) += v;
    }
    let mut cells = Vec::new();
    for (from, total) in &visits {
        let row = hchain_row(sys, dist, from)?;
        for (to, p) in &row {
            let c = counts.get(&(from.clone(), to.clone())).copied().unwrap_or(0);
            cells.push(HLawCell {
                from: from.clone(),
                to: to.clone(),
                visits: *total,
                report: EstimatorReport::bernoulli(format!("{from} -> {to}"), c, *total, Some(p)),
            });
        }
        // steps the matrix forbids
        for ((f, to), c) in counts.range((from.clone(), Weight(vec![i64::MIN; from.rank()]))..) {
            if f != from {
                break;
            }
            if !row.contains_key(to) {
                cells.push(HLawCell {
                    from: from.clone(),
                    to: to.clone(),
                    visits: *total,
                    report: EstimatorReport::bernoulli(format!("{from} -> {to}"), *c, *total, Some(&Q::zero())),
                });
            }
        }
    }
    Ok(HLawReport { ell_max, n, cells })
}

/// One term of the ratio sequence `f^l_{lambda/mu} / f^l_lambda`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RatioPoint {
    pub ell: usize,
    pub lambda: Weight,
    pub numerator: u128,
    pub denominator: u128,
    pub ratio: String,
    pub ratio_f64: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RatioReport {
    pub mu: Weight,
    pub target: String,
    pub target_f64: f64,
    pub points: Vec<RatioPoint>,
    /// Horizons with no admissible `lambda`.
    pub skipped: Vec<usize>,
}

impl RatioReport {
    pub fn improved(&self) -> bool {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => self.points.len() > 1 && b.deviation < a.deviation,
            _ => false,
        }
    }
}

/// Exact ratios `f^l_{lambda(l)/mu} / f^l_{lambda(l)}` with `lambda(l)` the
/// weight reachable at time `l` nearest to `l m(1)` in the invariant form
/// (ties broken by the smallest coordinates), compared with
/// `tau^{-mu} S_mu(tau)`.
pub fn asymptotic_ratio(
    sys: &RootSystem,
    dist: &CrystalDistribution,
    mu: &Weight,
    ells: &[usize],
    budget: usize,
) -> Result<RatioReport> {
    let datum = sys.datum();
    let tau = dist.tau();
    if datum.root_coords_int(mu).is_none() {
        return Err(Error::Precondition(format!("{mu} is not in the root lattice")));
    }
    let target = sys.character(mu)?.eval(tau)? / tau.weight_monomial(datum, mu)?;
    let top = ells.iter().copied().max().unwrap_or(0);
    let zero = Weight::zero(mu.rank());
    let from_zero = dist.module().f_layers(&zero, top, budget)?;
    let from_mu = dist.module().f_layers(mu, top, budget)?;
    let m = dist.drift();
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for &ell in ells {
        let goal: Vec<Q> = m.iter().map(|x| x * Q::from_integer(BigInt::from(ell))).collect();
        let best = from_zero[ell]
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(lam, &c)| {
                let diff: Vec<Q> = lam
                    .fw()
                    .iter()
                    .zip(&goal)
                    .map(|(x, g)| Q::from_integer(BigInt::from(*x)) - g)
                    .collect();
                (datum.inner(&diff, &diff), lam.clone(), c)
            })
            .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        let Some((_, lambda, den)) = best else {
            skipped.push(ell);
            continue;
        };
        let num = from_mu[ell].get(&lambda).copied().unwrap_or(0);
        let ratio = Q::new(BigInt::from(num), BigInt::from(den));
        let ratio_f64 = to_f64(&ratio);
        points.push(RatioPoint {
            ell,
            lambda,
            numerator: num,
            denominator: den,
            ratio: ratio.to_string(),
            ratio_f64,
            deviation: (ratio_f64 - to_f64(&target)).abs(),
        });
    }
    Ok(RatioReport {
        mu: mu.clone(),
        target: target.to_string(),
        target_f64: to_f64(&target),
        points,
        skipped,
    })
}
