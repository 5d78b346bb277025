//! Crystal distributions and the Markov chains built on them: the random
//! walk, its restriction to the dominant chamber, Doob transforms, the
//! Pitman transform and the chain `H` of highest weights.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cartan::{chamber_position_q, CartanDatum, ChamberPosition, Weight, WeylGroup};
use crate::charalg::{normalizer_poly, reference_weight, TauPoint};
use crate::crystal::{CrystalOps, ModuleCrystal, PathCrystal, TensorCrystal, TensorNode};
use crate::error::{Error, Result};
use crate::path::PiecewisePath;
use crate::rational::{q_json, to_f64, Frac, Q};
use crate::system::RootSystem;

/// The law `p_b = a_b tau^{r - wt(b)} / Z` on the nodes of a module
/// crystal, `r` being the highest weight of the first summand. With a twist
/// `w` the same formula is evaluated at `tau^w`.
#[derive(Clone, Debug)]
pub struct CrystalDistribution {
    module: Arc<ModuleCrystal>,
    tau: TauPoint,
    point: TauPoint,
    twist: Option<usize>,
    reference: Weight,
    normalizer: Q,
    probs: Vec<Q>,
}

impl CrystalDistribution {
    pub fn new(datum: &CartanDatum, module: Arc<ModuleCrystal>, tau: TauPoint) -> Result<Self> {
        tau.check_domain()?;
        Self::at_point(datum, module, tau.clone(), tau, None)
    }

    /// The twisted law `p^w`, i.e. the distribution evaluated at `tau^w`.
    pub fn twisted(
        datum: &CartanDatum,
        group: &WeylGroup,
        module: Arc<ModuleCrystal>,
        tau: TauPoint,
        w: usize,
    ) -> Result<Self> {
        tau.check_domain()?;
        let point = tau.twisted(datum, group, w);
        let twist = (w != group.identity()).then_some(w);
        Self::at_point(datum, module, tau, point, twist)
    }

    fn at_point(
        datum: &CartanDatum,
        module: Arc<ModuleCrystal>,
        tau: TauPoint,
        point: TauPoint,
        twist: Option<usize>,
    ) -> Result<Self> {
        if point.rank() != datum.rank() || module.rank() != datum.rank() {
            return Err(Error::Precondition("rank mismatch between tau, module and datum".into()));
        }
        let reference = reference_weight(&module);
        let normalizer = normalizer_poly(datum, &module).eval(&point)?;
        let mut cache: HashMap<Weight, Q> = HashMap::new();
        let mut probs = Vec::with_capacity(module.len());
        for r in module.nodes() {
            let wt = module.weight(r);
            let mono = match cache.get(&wt) {
                Some(m) => m.clone(),
                None => {
                    let m = point.weight_monomial(datum, &(&reference - &wt))?;
                    cache.insert(wt, m.clone());
                    m
                }
            };
            probs.push(mono * Q::from_integer(BigInt::from(module.multiplicity(*r))) / &normalizer);
        }
        let dist = CrystalDistribution {
            module,
            tau,
            point,
            twist,
            reference,
            normalizer,
            probs,
        };
        dist.check()?;
        Ok(dist)
    }

    fn check(&self) -> Result<()> {
        if let Some(k) = self.probs.iter().position(|p| !p.is_positive()) {
            return Err(Error::Integrity(format!("probability of node {k} is not positive")));
        }
        let total: Q = self.probs.iter().sum();
        if !total.is_one() {
            return Err(Error::Integrity(format!("probabilities sum to {total}")));
        }
        Ok(())
    }

    pub fn module(&self) -> &ModuleCrystal {
        &self.module
    }

    pub fn module_arc(&self) -> Arc<ModuleCrystal> {
        self.module.clone()
    }

    /// The untwisted parameter.
    pub fn tau(&self) -> &TauPoint {
        &self.tau
    }

    /// The point the weights are evaluated at (`tau^w` when twisted).
    pub fn point(&self) -> &TauPoint {
        &self.point
    }

    pub fn twist(&self) -> Option<usize> {
        self.twist
    }

    pub fn reference(&self) -> &Weight {
        &self.reference
    }

    /// `Z = sum_b a_b tau^{r - wt(b)}`.
    pub fn normalizer(&self) -> &Q {
        &self.normalizer
    }

    /// `Sigma_M = tau^{-r} Z`, which may need roots of `tau`.
    pub fn sigma(&self, datum: &CartanDatum) -> Result<Q> {
        Ok(&self.normalizer / self.point.weight_monomial(datum, &self.reference)?)
    }

    pub fn probs(&self) -> &[Q] {
        &self.probs
    }

    pub fn prob(&self, flat: usize) -> &Q {
        &self.probs[flat]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn node_weight(&self, flat: usize) -> Weight {
        self.module.weight(&self.module.nodes()[flat])
    }

    /// Law of one increment `X(1)`.
    pub fn step_law(&self) -> BTreeMap<Weight, Q> {
        let mut out: BTreeMap<Weight, Q> = BTreeMap::new();
        for (k, p) in self.probs.iter().enumerate() {
            *out.entry(self.node_weight(k)).or_insert_with(Q::zero) += p;
        }
        out
    }

    /// `m(1) = sum_b p_b wt(b)` in fundamental-weight coordinates.
    pub fn drift(&self) -> Vec<Q> {
        let n = self.module.rank();
        let mut m = vec![Q::zero(); n];
        for (k, p) in self.probs.iter().enumerate() {
            for (c, x) in m.iter_mut().zip(self.node_weight(k).fw()) {
                *c += p * Q::from_integer(BigInt::from(*x));
            }
        }
        m
    }

    /// `m(t) = sum_b p_b b(t)`.
    pub fn drift_at(&self, t: Frac) -> Vec<Q> {
        let n = self.module.rank();
        let mut m = vec![Q::zero(); n];
        for (k, r) in self.module.nodes().iter().enumerate() {
            let x = self.module.path(*r).eval(t);
            for (c, v) in m.iter_mut().zip(&x) {
                *c += &self.probs[k] * crate::rational::to_q(v);
            }
        }
        m
    }

    /// `m` sampled on the common refinement `j/L` of all node breakpoints.
    pub fn drift_curve(&self) -> Vec<(Frac, Vec<Q>)> {
        let mesh = self
            .module
            .nodes()
            .iter()
            .map(|r| self.module.path(*r).num_segments().max(1) as i64)
            .fold(1i64, |a, b| a.lcm(&b));
        (0..=mesh)
            .map(|j| {
                let t = Frac::new(j, mesh);
                (t, self.drift_at(t))
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<_> = self
            .module
            .nodes()
            .iter()
            .zip(&self.probs)
            .map(|(r, p)| {
                serde_json::json!({
                    "summand": r.summand,
                    "node": r.node,
                    "weight": self.module.weight(r).fw(),
                    "p": q_json(p),
                })
            })
            .collect();
        serde_json::json!({
            "tau": self.tau.to_json(),
            "twist": self.twist,
            "reference": self.reference.fw(),
            "normalizer": q_json(&self.normalizer),
            "nodes": nodes,
        })
    }
}

/// `P(W_{l+1} = beta | W_l = eta)`.
pub fn walk_transition(dist: &CrystalDistribution, eta: &Weight, beta: &Weight) -> Q {
    let step = beta - eta;
    (0..dist.len())
        .filter(|&k| dist.node_weight(k) == step)
        .map(|k| dist.prob(k).clone())
        .sum()
}

/// Row `lambda -> Pi^E(mu, lambda)` of the walk killed when its continuous
/// interpolation leaves the chamber during the step.
pub fn restricted_row(dist: &CrystalDistribution, mu: &Weight) -> BTreeMap<Weight, Q> {
    let module = dist.module();
    let mut out: BTreeMap<Weight, Q> = BTreeMap::new();
    for (k, r) in module.nodes().iter().enumerate() {
        if module.stays(k, mu.fw()) {
            let lam = mu + &module.weight(r);
            *out.entry(lam).or_insert_with(Q::zero) += dist.prob(k);
        }
    }
    out
}

/// `Pi^E(mu, lambda)`.
pub fn restricted_transition(dist: &CrystalDistribution, mu: &Weight, lambda: &Weight) -> Q {
    restricted_row(dist, mu)
        .remove(lambda)
        .unwrap_or_else(Q::zero)
}

/// `P_mu(W(t) in C for t in [0, ell])`, by propagating the killed walk.
/// For a twisted law this is `psi^w_ell`.
pub fn stay_probability(dist: &CrystalDistribution, mu: &Weight, ell: usize) -> Q {
    let mut layer: BTreeMap<Weight, Q> = BTreeMap::from([(mu.clone(), Q::one())]);
    if !mu.is_dominant() {
        return Q::zero();
    }
    let mut rows: HashMap<Weight, BTreeMap<Weight, Q>> = HashMap::new();
    for _ in 0..ell {
        let mut next: BTreeMap<Weight, Q> = BTreeMap::new();
        for (eta, mass) in &layer {
            let row = rows
                .entry(eta.clone())
                .or_insert_with(|| restricted_row(dist, eta));
            for (lam, p) in row.iter() {
                *next.entry(lam.clone()).or_insert_with(Q::zero) += mass * p;
            }
        }
        layer = next;
    }
    layer.into_values().sum()
}

/// A finite set of dominant weights indexing a transition table. Boundary
/// states are reached from the interior but their own rows are not
/// required to be complete.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSet {
    states: Vec<Weight>,
    boundary: Vec<bool>,
    index: HashMap<Weight, usize>,
}

impl StateSet {
    /// All states interior; tables built on it must be closed.
    pub fn explicit(states: Vec<Weight>) -> Result<Self> {
        let n = states.len();
        Self::with_boundary(states, vec![false; n])
    }

    pub fn with_boundary(states: Vec<Weight>, boundary: Vec<bool>) -> Result<Self> {
        if states.len() != boundary.len() {
            return Err(Error::Format("one boundary flag per state".into()));
        }
        let mut index = HashMap::new();
        for (k, s) in states.iter().enumerate() {
            if !s.is_dominant() {
                return Err(Error::Precondition(format!("state {s} is not dominant")));
            }
            if index.insert(s.clone(), k).is_some() {
                return Err(Error::Precondition(format!("state {s} listed twice")));
            }
        }
        Ok(StateSet {
            states,
            boundary,
            index,
        })
    }

    /// Dominant weights of level at most `max_level` (sum of
    /// fundamental-weight coordinates), plus their one-step successors as
    /// boundary states.
    pub fn by_level(module: &ModuleCrystal, max_level: i64) -> Self {
        let n = module.rank();
        let mut interior = Vec::new();
        let mut cur = vec![0i64; n];
        loop {
            interior.push(Weight(cur.clone()));
            // next tuple of nonnegative integers with sum <= max_level
            let mut k = n;
            loop {
                if k == 0 {
                    return Self::close_over(module, interior);
                }
                k -= 1;
                cur[k] += 1;
                if cur.iter().sum::<i64>() <= max_level {
                    break;
                }
                cur[k] = 0;
            }
        }
    }

    /// Breadth-first closure of `seeds` under one step, expanding at most
    /// `cap` states; unexpanded states are flagged boundary.
    pub fn closure(module: &ModuleCrystal, seeds: &[Weight], cap: usize) -> Result<Self> {
        let mut states: Vec<Weight> = Vec::new();
        let mut index: HashMap<Weight, usize> = HashMap::new();
        for s in seeds {
            if !s.is_dominant() {
                return Err(Error::Precondition(format!("seed {s} is not dominant")));
            }
            if !index.contains_key(s) {
                index.insert(s.clone(), states.len());
                states.push(s.clone());
            }
        }
        let mut expanded = 0;
        while expanded < states.len() && expanded < cap {
            let mu = states[expanded].clone();
            for lam in module.step_multiplicities(&mu).into_keys() {
                if !index.contains_key(&lam) {
                    index.insert(lam.clone(), states.len());
                    states.push(lam);
                }
            }
            expanded += 1;
        }
        let boundary = (0..states.len()).map(|k| k >= expanded).collect();
        Ok(StateSet {
            states,
            boundary,
            index,
        })
    }

    fn close_over(module: &ModuleCrystal, interior: Vec<Weight>) -> Self {
        let mut states = interior;
        let m = states.len();
        let mut index: HashMap<Weight, usize> =
            states.iter().cloned().enumerate().map(|(k, s)| (s, k)).collect();
        for k in 0..m {
            for lam in module.step_multiplicities(&states[k].clone()).into_keys() {
                if !index.contains_key(&lam) {
                    index.insert(lam.clone(), states.len());
                    states.push(lam);
                }
            }
        }
        let boundary = (0..states.len()).map(|k| k >= m).collect();
        StateSet {
            states,
            boundary,
            index,
        }
    }

    pub fn states(&self) -> &[Weight] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        self.boundary[k]
    }

    pub fn index_of(&self, w: &Weight) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn contains(&self, w: &Weight) -> bool {
        self.index.contains_key(w)
    }

    pub fn interior(&self) -> impl Iterator<Item = &Weight> {
        self.states
            .iter()
            .zip(&self.boundary)
            .filter(|(_, b)| !**b)
            .map(|(s, _)| s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Stochastic,
    Substochastic,
}

/// Sparse exact transition table on a [`StateSet`].
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionTable {
    states: StateSet,
    rows: Vec<BTreeMap<usize, Q>>,
    kind: TableKind,
}

impl TransitionTable {
    /// Builds a table from a row function. Rows of interior states must
    /// land in the state set; rows of boundary states are truncated.
    pub fn build<F>(states: StateSet, kind: TableKind, row: F) -> Result<Self>
    where
        F: Fn(&Weight) -> Result<BTreeMap<Weight, Q>> + Sync,
    {
        let computed: Vec<Result<(BTreeMap<usize, Q>, Vec<Weight>)>> = (0..states.len())
            .into_par_iter()
            .map(|k| {
                let full = row(&states.states[k])?;
                let mut out = BTreeMap::new();
                let mut missing = Vec::new();
                for (lam, v) in full {
                    if v.is_zero() {
                        continue;
                    }
                    match states.index_of(&lam) {
                        Some(j) => {
                            out.insert(j, v);
                        }
                        None if states.is_boundary(k) => {}
                        None => missing.push(lam),
                    }
                }
                Ok((out, missing))
            })
            .collect();
        let mut rows = Vec::with_capacity(states.len());
        let mut missing: Vec<Weight> = Vec::new();
        for r in computed {
            let (row, miss) = r?;
            rows.push(row);
            missing.extend(miss);
        }
        if !missing.is_empty() {
            missing.sort();
            missing.dedup();
            return Err(Error::NotClosed {
                missing: missing.iter().map(|w| w.to_string()).collect(),
            });
        }
        Ok(TransitionTable { states, rows, kind })
    }

    pub fn states(&self) -> &StateSet {
        &self.states
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn row(&self, k: usize) -> &BTreeMap<usize, Q> {
        &self.rows[k]
    }

    pub fn entry(&self, mu: &Weight, lambda: &Weight) -> Q {
        match (self.states.index_of(mu), self.states.index_of(lambda)) {
            (Some(a), Some(b)) => self.rows[a].get(&b).cloned().unwrap_or_else(Q::zero),
            _ => Q::zero(),
        }
    }

    pub fn row_sum(&self, k: usize) -> Q {
        self.rows[k].values().sum()
    }

    /// Entries are nonnegative; interior rows sum to one (stochastic) or
    /// at most one (substochastic).
    pub fn validate(&self) -> Result<()> {
        for (k, row) in self.rows.iter().enumerate() {
            if row.values().any(|v| v.is_negative()) {
                return Err(Error::Integrity(format!(
                    "negative entry in row {}",
                    self.states.states[k]
                )));
            }
            if self.states.is_boundary(k) {
                continue;
            }
            let s = self.row_sum(k);
            let ok = match self.kind {
                TableKind::Stochastic => s.is_one(),
                TableKind::Substochastic => s <= Q::one(),
            };
            if !ok {
                return Err(Error::Integrity(format!(
                    "row {} sums to {s}",
                    self.states.states[k]
                )));
            }
        }
        Ok(())
    }

    /// First entry on which two tables over the same states differ.
    pub fn first_difference(&self, other: &TransitionTable) -> Option<(Weight, Weight, Q, Q)> {
        for (k, mu) in self.states.states.iter().enumerate() {
            let theirs = match other.states.index_of(mu) {
                Some(j) => other.rows[j]
                    .iter()
                    .map(|(c, v)| (other.states.states[*c].clone(), v.clone()))
                    .collect(),
                None => BTreeMap::new(),
            };
            let mine: BTreeMap<Weight, Q> = self.rows[k]
                .iter()
                .map(|(c, v)| (self.states.states[*c].clone(), v.clone()))
                .collect();
            for lam in mine.keys().chain(theirs.keys()) {
                let a = mine.get(lam).cloned().unwrap_or_else(Q::zero);
                let b = theirs.get(lam).cloned().unwrap_or_else(Q::zero);
                if a != b {
                    return Some((mu.clone(), lam.clone(), a, b));
                }
            }
        }
        None
    }

    /// `from,to,exact,approx` triplets; states as fundamental-weight tuples.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("from,to,exact,approx,boundary\n");
        for (k, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                let _ = writeln!(
                    out,
                    "\"{}\",\"{}\",{},{},{}",
                    self.states.states[k],
                    self.states.states[*j],
                    v,
                    to_f64(v),
                    self.states.is_boundary(k)
                );
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<_> = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(k, row)| {
                row.iter().map(move |(j, v)| {
                    serde_json::json!({
                        "from": self.states.states[k].fw(),
                        "to": self.states.states[*j].fw(),
                        "value": q_json(v),
                    })
                })
            })
            .collect();
        serde_json::json!({
            "kind": self.kind,
            "states": self.states.states.iter().map(|s| s.fw()).collect::<Vec<_>>(),
            "boundary": self.states.boundary,
            "entries": entries,
        })
    }
}

/// `Pi^E` restricted to a state set.
pub fn substochastic_table(dist: &CrystalDistribution, states: StateSet) -> Result<TransitionTable> {
    TransitionTable::build(states, TableKind::Substochastic, |mu| {
        Ok(restricted_row(dist, mu))
    })
}

/// A positive function on the states of a table, expected to be harmonic.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicWitness {
    values: BTreeMap<Weight, Q>,
}

impl HarmonicWitness {
    pub fn new(values: BTreeMap<Weight, Q>) -> Self {
        HarmonicWitness { values }
    }

    pub fn constant(states: &StateSet, c: Q) -> Self {
        Self::new(states.states().iter().map(|s| (s.clone(), c.clone())).collect())
    }

    /// `psi` on the states, evaluated through the Weyl numerator.
    pub fn psi(sys: &RootSystem, states: &StateSet, tau: &TauPoint) -> Result<Self> {
        let values = states
            .states()
            .par_iter()
            .map(|s| Ok((s.clone(), sys.psi_numerator(s, tau)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Self::new(values))
    }

    pub fn get(&self, w: &Weight) -> Option<&Q> {
        self.values.get(w)
    }

    pub fn values(&self) -> &BTreeMap<Weight, Q> {
        &self.values
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::new(self.values.iter().map(|(k, v)| (k.clone(), v * c)).collect())
    }

    /// `sum_lambda Pi(mu, lambda) h(lambda) - h(mu)` on interior rows.
    pub fn defects(&self, table: &TransitionTable) -> Result<Vec<(Weight, Q)>> {
        let st = table.states();
        let mut out = Vec::new();
        for (k, mu) in st.states().iter().enumerate() {
            if st.is_boundary(k) {
                continue;
            }
            let mut acc = -self.lookup(mu)?.clone();
            for (j, v) in table.row(k) {
                acc += v * self.lookup(&st.states()[*j])?;
            }
            out.push((mu.clone(), acc));
        }
        Ok(out)
    }

    /// Exact harmonicity; reports the row with the largest defect.
    pub fn check(&self, table: &TransitionTable) -> Result<()> {
        let worst = self
            .defects(table)?
            .into_iter()
            .filter(|(_, d)| !d.is_zero())
            .max_by(|a, b| a.1.abs().cmp(&b.1.abs()));
        match worst {
            None => Ok(()),
            Some((state, defect)) => Err(Error::NotHarmonic {
                state: state.to_string(),
                defect: defect.to_string(),
            }),
        }
    }

    fn lookup(&self, w: &Weight) -> Result<&Q> {
        self.values
            .get(w)
            .ok_or_else(|| Error::Precondition(format!("h is not defined at {w}")))
    }
}

/// `Pi_h(mu, lambda) = h(lambda) / h(mu) Pi(mu, lambda)`, after checking
/// that `h` is positive and harmonic.
pub fn doob_transform(table: &TransitionTable, h: &HarmonicWitness) -> Result<TransitionTable> {
    let st = table.states();
    for s in st.states() {
        if !h.lookup(s)?.is_positive() {
            return Err(Error::Precondition(format!("h is not positive at {s}")));
        }
    }
    h.check(table)?;
    let rows = table
        .rows
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let hm = &h.values[&st.states()[k]];
            row.iter()
                .map(|(j, v)| (*j, v * &h.values[&st.states()[*j]] / hm))
                .collect()
        })
        .collect();
    Ok(TransitionTable {
        states: st.clone(),
        rows,
        kind: TableKind::Stochastic,
    })
}

fn require_untwisted(dist: &CrystalDistribution) -> Result<()> {
    if dist.twist().is_some() {
        return Err(Error::Precondition("an untwisted distribution is required".into()));
    }
    Ok(())
}

/// Row of the chain `H`:
/// `Pi(mu, lambda) = S_lambda / (S_mu Z) tau^{r + mu - lambda} m^lambda_{M,mu}`.
pub fn hchain_row(
    sys: &RootSystem,
    dist: &CrystalDistribution,
    mu: &Weight,
) -> Result<BTreeMap<Weight, Q>> {
    require_untwisted(dist)?;
    let tau = dist.tau();
    let s_mu = sys.character(mu)?.eval(tau)?;
    let mut out = BTreeMap::new();
    for (lam, m) in dist.module().step_multiplicities(mu) {
        let s_lam = sys.character(&lam)?.eval(tau)?;
        let exp = &(dist.reference() + mu) - &lam;
        let v = s_lam * tau.weight_monomial(sys.datum(), &exp)? * Q::from_integer(BigInt::from(m))
            / (&s_mu * dist.normalizer());
        out.insert(lam, v);
    }
    Ok(out)
}

pub fn hchain_matrix(
    sys: &RootSystem,
    dist: &CrystalDistribution,
    states: StateSet,
) -> Result<TransitionTable> {
    require_untwisted(dist)?;
    TransitionTable::build(states, TableKind::Stochastic, |mu| hchain_row(sys, dist, mu))
}

/// `Q(mu, lambda) = Pi^E(mu, lambda) psi(lambda) / psi(mu)`: the walk
/// conditioned never to leave the chamber.
pub fn conditioned_transition(
    sys: &RootSystem,
    dist: &CrystalDistribution,
    mu: &Weight,
    lambda: &Weight,
) -> Result<Q> {
    require_untwisted(dist)?;
    let p = restricted_transition(dist, mu, lambda);
    if p.is_zero() {
        return Ok(p);
    }
    let tau = dist.tau();
    let den = sys.psi_numerator(mu, tau)?;
    if !den.is_positive() {
        return Err(Error::Precondition(format!("psi({mu}) is not positive")));
    }
    Ok(p * sys.psi_numerator(lambda, tau)? / den)
}

pub fn conditioned_row(
    sys: &RootSystem,
    dist: &CrystalDistribution,
    mu: &Weight,
) -> Result<BTreeMap<Weight, Q>> {
    restricted_row(dist, mu)
        .into_keys()
        .map(|lam| Ok((lam.clone(), conditioned_transition(sys, dist, mu, &lam)?)))
        .collect()
}

pub fn conditioned_table(
    sys: &RootSystem,
    dist: &CrystalDistribution,
    states: StateSet,
) -> Result<TransitionTable> {
    TransitionTable::build(states, TableKind::Stochastic, |mu| conditioned_row(sys, dist, mu))
}

/// First step of the walk conditioned to stay in the chamber up to time
/// `ell + 1`: `Pi^E(mu, lambda) psi_ell(lambda) / psi_{ell+1}(mu)`.
pub fn conditioned_transition_finite(
    dist: &CrystalDistribution,
    mu: &Weight,
    lambda: &Weight,
    ell: usize,
) -> Result<Q> {
    let den = stay_probability(dist, mu, ell + 1);
    if den.is_zero() {
        return Err(Error::Precondition(format!(
            "the walk from {mu} cannot stay in the chamber for {} steps",
            ell + 1
        )));
    }
    Ok(restricted_transition(dist, mu, lambda) * stay_probability(dist, lambda, ell) / den)
}

/// `P(b)`: the highest node in the component of a tensor node.
pub fn pitman(tc: &TensorCrystal<'_>, b: &TensorNode) -> TensorNode {
    tc.raise_to_highest(b)
}

/// `P(eta)` for an integral path, by raising operators on paths.
pub fn pitman_path(datum: &CartanDatum, eta: &PiecewisePath) -> Result<PiecewisePath> {
    if !eta.is_integral() || eta.weight().is_err() {
        return Err(Error::Precondition(format!("path {eta} is not integral")));
    }
    Ok(PathCrystal { datum }.raise_to_highest(eta))
}

/// `H_k = wt(P(b_1 (x) ... (x) b_k))` for `k = 0..=ell`.
pub fn pitman_heights(tc: &TensorCrystal<'_>, b: &TensorNode) -> Vec<Weight> {
    let mut out = vec![Weight::zero(tc.rank())];
    for k in 1..=b.factors.len() {
        let prefix = TensorNode {
            factors: b.factors[..k].to_vec(),
        };
        out.push(tc.weight(&pitman(tc, &prefix)));
    }
    out
}

/// Law of `(H_1, ..., H_ell)` by enumerating every tensor node.
pub fn exact_h_law(dist: &CrystalDistribution, ell: usize) -> BTreeMap<Vec<Weight>, Q> {
    let module = dist.module();
    let tc = TensorCrystal::new(module);
    let mut out: BTreeMap<Vec<Weight>, Q> = BTreeMap::new();
    for b in tc.all_nodes(ell) {
        let p: Q = b
            .factors
            .iter()
            .map(|r| dist.prob(module.flat_index(*r)))
            .product();
        let h = pitman_heights(&tc, &b).split_off(1);
        *out.entry(h).or_insert_with(Q::zero) += p;
    }
    out
}

/// Law of `(H_1, ..., H_ell)` from the transition matrix, started at 0.
pub fn hchain_path_law(
    sys: &RootSystem,
    dist: &CrystalDistribution,
    ell: usize,
) -> Result<BTreeMap<Vec<Weight>, Q>> {
    let mut law: BTreeMap<Vec<Weight>, Q> = BTreeMap::from([(vec![], Q::one())]);
    let mut rows: HashMap<Weight, BTreeMap<Weight, Q>> = HashMap::new();
    let zero = Weight::zero(sys.rank());
    for _ in 0..ell {
        let mut next = BTreeMap::new();
        for (seq, p) in law {
            let cur = seq.last().unwrap_or(&zero).clone();
            if !rows.contains_key(&cur) {
                rows.insert(cur.clone(), hchain_row(sys, dist, &cur)?);
            }
            for (lam, v) in &rows[&cur] {
                let mut s = seq.clone();
                s.push(lam.clone());
                next.insert(s, &p * v);
            }
        }
        law = next;
    }
    Ok(law)
}

/// `tau^w` with `tau^w_i = tau^{w(alpha_i)}`.
pub fn twisted_tau(datum: &CartanDatum, group: &WeylGroup, w: usize, tau: &TauPoint) -> TauPoint {
    tau.twisted(datum, group, w)
}

/// Position of an exact vector relative to the dominant chamber.
pub fn drift_position(m: &[Q]) -> ChamberPosition {
    chamber_position_q(m)
}

/// `P(W^w_{l+1} = beta | W^w_l = eta)` through the closed form
/// `K_{beta - eta} tau^{kappa + w(eta) - w(beta)} / S_kappa(tau)`, for an
/// irreducible module.
pub fn twisted_walk_transition_closed(
    datum: &CartanDatum,
    group: &WeylGroup,
    dist: &CrystalDistribution,
    w: usize,
    eta: &Weight,
    beta: &Weight,
) -> Result<Q> {
    if !dist.module().spec.is_irreducible() {
        return Err(Error::Precondition("closed form is stated for irreducible modules".into()));
    }
    let step = beta - eta;
    let k = dist.module().weight_multiplicities().get(&step).copied().unwrap_or(0);
    if k == 0 {
        return Ok(Q::zero());
    }
    let tau = dist.tau();
    let kappa = dist.reference();
    let s = normalizer_poly(datum, dist.module()).eval(tau)?;
    let exp = &(kappa + &group.act(w, eta)) - &group.act(w, beta);
    Ok(Q::from_integer(BigInt::from(k)) * tau.weight_monomial(datum, &exp)? / s)
}
