//! Crystal graphs of paths, tensor products and multiplicities.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;
use std::hash::Hash;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cartan::{CartanDatum, Weight, WeylGroup};
use crate::error::{Error, Result};
use crate::path::PiecewisePath;

pub const DEFAULT_NODE_BUDGET: usize = 200_000;

/// Operations shared by every crystal realization in this crate.
pub trait CrystalOps {
    type Node: Clone + Eq + Hash;

    fn rank(&self) -> usize;
    fn e(&self, b: &Self::Node, i: usize) -> Option<Self::Node>;
    fn f(&self, b: &Self::Node, i: usize) -> Option<Self::Node>;
    fn eps(&self, b: &Self::Node, i: usize) -> u32;
    fn phi(&self, b: &Self::Node, i: usize) -> u32;
    fn weight(&self, b: &Self::Node) -> Weight;

    fn is_highest(&self, b: &Self::Node) -> bool {
        (0..self.rank()).all(|i| self.eps(b, i) == 0)
    }

    /// The simple reflection on `b`'s `i`-chain.
    fn reflect(&self, b: &Self::Node, i: usize) -> Self::Node {
        let k = self.phi(b, i) as i64 - self.eps(b, i) as i64;
        let mut cur = b.clone();
        for _ in 0..k.abs() {
            cur = if k > 0 {
                self.f(&cur, i)
            } else {
                self.e(&cur, i)
            }
            .expect("chain is long enough by the values of eps and phi");
        }
        cur
    }

    /// Action of `s_{i1} ... s_{ir}` (rightmost letter first).
    fn act_word(&self, word: &[usize], b: &Self::Node) -> Self::Node {
        word.iter()
            .rev()
            .fold(b.clone(), |cur, &i| self.reflect(&cur, i))
    }

    /// Applies raising operators, lowest index first, until none applies.
    fn raise_to_highest(&self, b: &Self::Node) -> Self::Node {
        self.raise_with_order(b, &(0..self.rank()).collect::<Vec<_>>())
    }

    /// As [`raise_to_highest`](Self::raise_to_highest) with a priority
    /// order on the indices.
    fn raise_with_order(&self, b: &Self::Node, order: &[usize]) -> Self::Node {
        let mut cur = b.clone();
        'outer: loop {
            for &i in order {
                if let Some(next) = self.e(&cur, i) {
                    cur = next;
                    continue 'outer;
                }
            }
            return cur;
        }
    }
}

/// A connected crystal `B(pi)` generated from a dominant path.
#[derive(Clone, Debug)]
pub struct CrystalGraph {
    rank: usize,
    kappa: Weight,
    nodes: Vec<PiecewisePath>,
    index: HashMap<PiecewisePath, usize>,
    f_edges: Vec<Vec<Option<usize>>>,
    e_edges: Vec<Vec<Option<usize>>>,
    eps: Vec<Vec<u32>>,
    phi: Vec<Vec<u32>>,
    weights: Vec<Weight>,
    heights: Vec<i64>,
}

impl CrystalGraph {
    pub fn generate(datum: &CartanDatum, highest: &PiecewisePath) -> Result<Self> {
        Self::generate_with_budget(datum, highest, DEFAULT_NODE_BUDGET)
    }

    /// Breadth-first closure of `highest` under the lowering operators.
    pub fn generate_with_budget(
        datum: &CartanDatum,
        highest: &PiecewisePath,
        budget: usize,
    ) -> Result<Self> {
        let n = datum.rank();
        if highest.rank() != n {
            return Err(Error::Precondition(format!(
                "path has dimension {} but the rank is {n}",
                highest.rank()
            )));
        }
        if !highest.in_chamber() {
            return Err(Error::Precondition(format!(
                "highest path {highest} leaves the dominant chamber"
            )));
        }
        let kappa = highest.weight()?;
        if !highest.is_integral() {
            return Err(Error::Precondition(format!("path {highest} is not integral")));
        }

        let mut nodes = vec![highest.clone()];
        let mut index = HashMap::from([(highest.clone(), 0usize)]);
        let mut f_edges: Vec<Vec<Option<usize>>> = vec![vec![None; n]];
        let mut e_edges: Vec<Vec<Option<usize>>> = vec![vec![None; n]];
        let mut queue = VecDeque::from([0usize]);
        while let Some(b) = queue.pop_front() {
            for i in 0..n {
                let Some(next) = nodes[b].apply_f(datum, i) else {
                    continue;
                };
                let target = match index.get(&next) {
                    Some(&t) => t,
                    None => {
                        if nodes.len() >= budget {
                            return Err(Error::Budget {
                                what: "crystal nodes",
                                limit: budget,
                                reached: nodes.len(),
                            });
                        }
                        let t = nodes.len();
                        index.insert(next.clone(), t);
                        nodes.push(next);
                        f_edges.push(vec![None; n]);
                        e_edges.push(vec![None; n]);
                        queue.push_back(t);
                        t
                    }
                };
                f_edges[b][i] = Some(target);
                e_edges[target][i] = Some(b);
            }
        }
        // e_i(b') = b exactly when f_i(b) = b'
        for (t, node) in nodes.iter().enumerate() {
            for i in 0..n {
                let back = node.apply_e(datum, i).map(|p| index[&p]);
                if back != e_edges[t][i] {
                    return Err(Error::Integrity(format!(
                        "raising operator {} disagrees with the lowering edges at {node}",
                        i + 1
                    )));
                }
            }
        }

        let chain = |edges: &Vec<Vec<Option<usize>>>, b: usize, i: usize| {
            let mut k = 0;
            let mut cur = b;
            while let Some(next) = edges[cur][i] {
                cur = next;
                k += 1;
            }
            k
        };
        let eps = (0..nodes.len())
            .map(|b| (0..n).map(|i| chain(&e_edges, b, i)).collect())
            .collect();
        let phi = (0..nodes.len())
            .map(|b| (0..n).map(|i| chain(&f_edges, b, i)).collect())
            .collect();
        let weights: Vec<Weight> = nodes.iter().map(|p| p.weight()).collect::<Result<_>>()?;
        let heights = weights
            .iter()
            .map(|w| {
                let h = datum.height(&(&kappa - w));
                debug_assert!(h.is_integer());
                h.to_integer()
            })
            .collect();
        Ok(CrystalGraph {
            rank: n,
            kappa,
            nodes,
            index,
            f_edges,
            e_edges,
            eps,
            phi,
            weights,
            heights,
        })
    }

    /// Crystal of the straight line `t -> t kappa`.
    pub fn straight(datum: &CartanDatum, kappa: &Weight) -> Result<Self> {
        Self::generate(datum, &PiecewisePath::straight_to(kappa))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn highest_weight(&self) -> &Weight {
        &self.kappa
    }

    pub fn highest_node(&self) -> usize {
        0
    }

    pub fn path(&self, b: usize) -> &PiecewisePath {
        &self.nodes[b]
    }

    pub fn paths(&self) -> &[PiecewisePath] {
        &self.nodes
    }

    pub fn find(&self, p: &PiecewisePath) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn node_weight(&self, b: usize) -> &Weight {
        &self.weights[b]
    }

    pub fn node_height(&self, b: usize) -> i64 {
        self.heights[b]
    }

    pub fn eps_of(&self, b: usize, i: usize) -> u32 {
        self.eps[b][i]
    }

    pub fn phi_of(&self, b: usize, i: usize) -> u32 {
        self.phi[b][i]
    }

    pub fn f_of(&self, b: usize, i: usize) -> Option<usize> {
        self.f_edges[b][i]
    }

    pub fn e_of(&self, b: usize, i: usize) -> Option<usize> {
        self.e_edges[b][i]
    }

    /// `(source, color, target)` with colors 0-based.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (b, row) in self.f_edges.iter().enumerate() {
            for (i, t) in row.iter().enumerate() {
                if let Some(t) = t {
                    out.push((b, i, *t));
                }
            }
        }
        out
    }

    /// Largest number of edges in an `i`-chain.
    pub fn max_chain_edges(&self, i: usize) -> u32 {
        (0..self.len())
            .map(|b| self.eps[b][i] + self.phi[b][i])
            .max()
            .unwrap_or(0)
    }

    /// `kappa_0 = sum (m_0(i) - 1) omega_i`, where `m_0(i)` is the largest
    /// value of `eps_i` in the crystal, i.e. the edge count of the longest
    /// `i`-chain.
    pub fn kappa0(&self) -> Weight {
        Weight(
            (0..self.rank)
                .map(|i| (self.max_chain_edges(i) as i64 - 1).max(0))
                .collect(),
        )
    }

    /// Every weight lies in the Weyl orbit of the highest weight.
    pub fn is_minuscule(&self, datum: &CartanDatum) -> bool {
        self.weights
            .iter()
            .all(|w| datum.dominant_conjugate(w) == self.kappa)
    }

    /// Colored-digraph isomorphism. Both crystals are connected with a
    /// unique source, so the only candidate bijection is the one obtained
    /// by following equal colors from the highest nodes.
    pub fn is_isomorphic(&self, other: &CrystalGraph) -> bool {
        if self.len() != other.len() || self.rank != other.rank {
            return false;
        }
        let mut map: Vec<Option<usize>> = vec![None; self.len()];
        map[0] = Some(0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(b) = queue.pop_front() {
            let c = map[b].unwrap();
            for i in 0..self.rank {
                for (mine, theirs) in [
                    (self.f_edges[b][i], other.f_edges[c][i]),
                    (self.e_edges[b][i], other.e_edges[c][i]),
                ] {
                    match (mine, theirs) {
                        (None, None) => {}
                        (Some(x), Some(y)) => match map[x] {
                            Some(z) if z != y => return false,
                            Some(_) => {}
                            None => {
                                map[x] = Some(y);
                                queue.push_back(x);
                            }
                        },
                        _ => return false,
                    }
                }
            }
        }
        let mut seen = vec![false; other.len()];
        for m in map {
            match m {
                Some(y) if !seen[y] => seen[y] = true,
                _ => return false,
            }
        }
        true
    }

    /// Graphviz rendering; nodes are labelled by weight and height, edges
    /// by their (1-based) color.
    pub fn to_dot(&self) -> String {
        const PALETTE: [&str; 8] = [
            "red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan",
        ];
        let mut s = String::from("digraph crystal {\n  rankdir=TB;\n");
        for b in 0..self.len() {
            let _ = writeln!(
                s,
                "  n{b} [label=\"{}\\nht {}\"];",
                self.weights[b], self.heights[b]
            );
        }
        for (b, i, t) in self.edges() {
            let _ = writeln!(
                s,
                "  n{b} -> n{t} [label=\"{}\", color={}];",
                i + 1,
                PALETTE[i % PALETTE.len()]
            );
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<_> = (0..self.len())
            .map(|b| {
                serde_json::json!({
                    "id": b,
                    "path": self.nodes[b].to_json_value(),
                    "weight": self.weights[b],
                    "height": self.heights[b],
                    "eps": self.eps[b],
                    "phi": self.phi[b],
                })
            })
            .collect();
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .map(|(b, i, t)| serde_json::json!({"source": b, "color": i + 1, "target": t}))
            .collect();
        serde_json::json!({
            "highest_weight": self.kappa,
            "size": self.len(),
            "nodes": nodes,
            "edges": edges,
        })
    }

    /// `#{b : mu + Im b stays in the chamber and mu + wt(b) = lambda}`.
    pub fn count_multiplicity(&self, mu: &Weight) -> BTreeMap<Weight, u64> {
        let mut out = BTreeMap::new();
        let shift = mu.to_frac();
        for (b, p) in self.nodes.iter().enumerate() {
            if p.translated_in_chamber(&shift) {
                *out.entry(mu + &self.weights[b]).or_insert(0) += 1;
            }
        }
        out
    }
}

impl CrystalOps for CrystalGraph {
    type Node = usize;

    fn rank(&self) -> usize {
        self.rank
    }
    fn e(&self, b: &usize, i: usize) -> Option<usize> {
        self.e_edges[*b][i]
    }
    fn f(&self, b: &usize, i: usize) -> Option<usize> {
        self.f_edges[*b][i]
    }
    fn eps(&self, b: &usize, i: usize) -> u32 {
        self.eps[*b][i]
    }
    fn phi(&self, b: &usize, i: usize) -> u32 {
        self.phi[*b][i]
    }
    fn weight(&self, b: &usize) -> Weight {
        self.weights[*b].clone()
    }
}

/// The crystal of all (integral) paths, with the root operators acting
/// directly on paths.
pub struct PathCrystal<'a> {
    pub datum: &'a CartanDatum,
}

impl CrystalOps for PathCrystal<'_> {
    type Node = PiecewisePath;

    fn rank(&self) -> usize {
        self.datum.rank()
    }
    fn e(&self, b: &PiecewisePath, i: usize) -> Option<PiecewisePath> {
        b.apply_e(self.datum, i)
    }
    fn f(&self, b: &PiecewisePath, i: usize) -> Option<PiecewisePath> {
        b.apply_f(self.datum, i)
    }
    fn eps(&self, b: &PiecewisePath, i: usize) -> u32 {
        b.eps_phi_closed(i).expect("integral path").0
    }
    fn phi(&self, b: &PiecewisePath, i: usize) -> u32 {
        b.eps_phi_closed(i).expect("integral path").1
    }
    fn weight(&self, b: &PiecewisePath) -> Weight {
        b.weight().expect("integral path")
    }
}

/// One irreducible summand `V(kappa)^{a}` of a module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summand {
    pub kappa: Weight,
    pub multiplicity: u64,
    /// Highest path; the straight line to `kappa` when absent.
    #[serde(default, skip)]
    pub path: Option<PiecewisePath>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub summands: Vec<Summand>,
}

impl ModuleSpec {
    pub fn irreducible(kappa: Weight) -> Self {
        ModuleSpec {
            summands: vec![Summand {
                kappa,
                multiplicity: 1,
                path: None,
            }],
        }
    }

    pub fn new(parts: Vec<(Weight, u64)>) -> Result<Self> {
        let spec = ModuleSpec {
            summands: parts
                .into_iter()
                .map(|(kappa, multiplicity)| Summand {
                    kappa,
                    multiplicity,
                    path: None,
                })
                .collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.summands.is_empty() {
            return Err(Error::Precondition("a module needs at least one summand".into()));
        }
        for (k, s) in self.summands.iter().enumerate() {
            if !s.kappa.is_dominant() {
                return Err(Error::Precondition(format!("summand weight {} is not dominant", s.kappa)));
            }
            if s.multiplicity == 0 {
                return Err(Error::Precondition(format!("summand {} has multiplicity 0", s.kappa)));
            }
            if self.summands[..k].iter().any(|t| t.kappa == s.kappa) {
                return Err(Error::Precondition(format!("summand weight {} repeated", s.kappa)));
            }
        }
        Ok(())
    }

    pub fn is_irreducible(&self) -> bool {
        self.summands.len() == 1 && self.summands[0].multiplicity == 1
    }
}

/// Reference to a node of one summand of a [`ModuleCrystal`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeRef {
    pub summand: usize,
    pub node: usize,
}

/// The crystal of a module: disjoint union of its summand crystals, each
/// carrying its multiplicity `a_kappa`.
#[derive(Clone, Debug)]
pub struct ModuleCrystal {
    pub spec: ModuleSpec,
    pub parts: Vec<Arc<CrystalGraph>>,
    refs: Vec<NodeRef>,
    /// `ceil(-min_t eta_i(t))` per node: `mu + eta` stays in the chamber iff
    /// `mu_i` is at least this for every `i`.
    thresholds: Vec<Vec<i64>>,
}

impl ModuleCrystal {
    pub fn new(spec: ModuleSpec, parts: Vec<Arc<CrystalGraph>>) -> Result<Self> {
        spec.validate()?;
        if spec.summands.len() != parts.len() {
            return Err(Error::Precondition("one crystal per summand is required".into()));
        }
        for (s, g) in spec.summands.iter().zip(&parts) {
            if g.highest_weight() != &s.kappa {
                return Err(Error::Precondition(format!(
                    "crystal of highest weight {} supplied for summand {}",
                    g.highest_weight(),
                    s.kappa
                )));
            }
        }
        let mut refs = Vec::new();
        let mut thresholds = Vec::new();
        for (k, g) in parts.iter().enumerate() {
            for b in 0..g.len() {
                refs.push(NodeRef { summand: k, node: b });
                thresholds.push(
                    g.path(b)
                        .coordinate_minima()
                        .iter()
                        .map(|m| (-*m).ceil().to_integer())
                        .collect(),
                );
            }
        }
        Ok(ModuleCrystal {
            spec,
            parts,
            refs,
            thresholds,
        })
    }

    pub fn generate(datum: &CartanDatum, spec: ModuleSpec) -> Result<Self> {
        let parts = spec
            .summands
            .iter()
            .map(|s| {
                let p = s
                    .path
                    .clone()
                    .unwrap_or_else(|| PiecewisePath::straight_to(&s.kappa));
                if p.weight()? != s.kappa {
                    return Err(Error::Precondition(format!(
                        "highest path {p} does not end at {}",
                        s.kappa
                    )));
                }
                CrystalGraph::generate(datum, &p).map(Arc::new)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(spec, parts)
    }

    pub fn irreducible(graph: Arc<CrystalGraph>) -> Self {
        let spec = ModuleSpec::irreducible(graph.highest_weight().clone());
        Self::new(spec, vec![graph]).expect("single summand is valid")
    }

    pub fn rank(&self) -> usize {
        self.parts[0].rank
    }

    /// All nodes, summand by summand.
    pub fn nodes(&self) -> &[NodeRef] {
        &self.refs
    }

    pub fn len(&self) -> usize {
        self.refs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.refs.is_empty()
    }

    /// Position of `r` in [`nodes`](Self::nodes).
    pub fn flat_index(&self, r: NodeRef) -> usize {
        self.parts[..r.summand].iter().map(|g| g.len()).sum::<usize>() + r.node
    }

    pub fn multiplicity(&self, r: NodeRef) -> u64 {
        self.spec.summands[r.summand].multiplicity
    }

    pub fn path(&self, r: NodeRef) -> &PiecewisePath {
        self.parts[r.summand].path(r.node)
    }

    pub fn graph(&self, r: NodeRef) -> &CrystalGraph {
        &self.parts[r.summand]
    }

    pub fn stay_threshold(&self, flat: usize) -> &[i64] {
        &self.thresholds[flat]
    }

    /// `mu + Im b` stays in the chamber.
    pub fn stays(&self, flat: usize, mu: &[i64]) -> bool {
        self.thresholds[flat].iter().zip(mu).all(|(t, m)| m >= t)
    }

    /// `lambda -> sum_kappa a_kappa m_{mu,kappa}^lambda`.
    pub fn step_multiplicities(&self, mu: &Weight) -> BTreeMap<Weight, u128> {
        let mut out = BTreeMap::new();
        for (flat, r) in self.refs.iter().enumerate() {
            if self.stays(flat, mu.fw()) {
                let lam = mu + self.parts[r.summand].node_weight(r.node);
                *out.entry(lam).or_insert(0) += self.multiplicity(*r) as u128;
            }
        }
        out
    }

    /// Weight multiset `beta -> sum a_kappa K_{kappa, beta}`.
    pub fn weight_multiplicities(&self) -> BTreeMap<Weight, u128> {
        let mut out = BTreeMap::new();
        for r in &self.refs {
            *out.entry(self.parts[r.summand].node_weight(r.node).clone())
                .or_insert(0) += self.multiplicity(*r) as u128;
        }
        out
    }

    /// Layers `f^k_{./mu}` for `k = 0..=ell` by iterating the one-step
    /// multiplicities.
    pub fn f_layers(&self, mu: &Weight, ell: usize, budget: usize) -> Result<Vec<BTreeMap<Weight, u128>>> {
        if !mu.is_dominant() {
            return Err(Error::Precondition(format!("{mu} is not dominant")));
        }
        let mut memo: HashMap<Weight, BTreeMap<Weight, u128>> = HashMap::new();
        let mut layers = vec![BTreeMap::from([(mu.clone(), 1u128)])];
        for _ in 0..ell {
            let prev = layers.last().unwrap();
            let mut next: BTreeMap<Weight, u128> = BTreeMap::new();
            for (nu, count) in prev {
                let step = memo
                    .entry(nu.clone())
                    .or_insert_with(|| self.step_multiplicities(nu));
                for (lam, m) in step.iter() {
                    let add = count.checked_mul(*m).ok_or_else(overflow)?;
                    let slot = next.entry(lam.clone()).or_insert(0);
                    *slot = slot.checked_add(add).ok_or_else(overflow)?;
                }
            }
            if next.len() > budget {
                return Err(Error::Budget {
                    what: "dominant states per layer",
                    limit: budget,
                    reached: next.len(),
                });
            }
            layers.push(next);
        }
        Ok(layers)
    }

    /// `lambda -> f^ell_{lambda/mu}`.
    pub fn f_multiplicities(&self, mu: &Weight, ell: usize) -> Result<BTreeMap<Weight, u128>> {
        Ok(self.f_layers(mu, ell, usize::MAX)?.pop().unwrap())
    }

    /// The same numbers by running through all `ell`-fold tensor nodes and
    /// counting the highest ones of `b_mu (x) b_1 (x) ... (x) b_ell`
    /// with the tensor rule, `b_mu` being a highest node of weight `mu`.
    pub fn f_multiplicities_enumerated(
        &self,
        mu: &Weight,
        ell: usize,
        budget: usize,
    ) -> Result<BTreeMap<Weight, u128>> {
        let size = self.len();
        let total = (size as u128).checked_pow(ell as u32).unwrap_or(u128::MAX);
        if total > budget as u128 {
            return Err(Error::Budget {
                what: "tensor nodes",
                limit: budget,
                reached: total.min(usize::MAX as u128) as usize,
            });
        }
        let n = self.rank();
        let mut out = BTreeMap::new();
        let mut idx = vec![0usize; ell];
        'tuples: loop {
            // fold eps/phi starting from eps = 0, phi = mu
            let mut phi: Vec<i64> = mu.fw().to_vec();
            let mut highest = true;
            let mut weight = mu.clone();
            let mut mult = 1u128;
            for &k in &idx {
                let r = self.refs[k];
                let g = &self.parts[r.summand];
                for (i, ph) in phi.iter_mut().enumerate().take(n) {
                    let e = g.eps_of(r.node, i) as i64;
                    if e > *ph {
                        highest = false;
                    }
                    *ph = g.phi_of(r.node, i) as i64 + (*ph - e).max(0);
                }
                weight = &weight + g.node_weight(r.node);
                mult *= self.multiplicity(r) as u128;
            }
            if highest {
                *out.entry(weight).or_insert(0) += mult;
            }
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < size {
                    continue 'tuples;
                }
                *slot = 0;
            }
            break;
        }
        Ok(out)
    }
}

fn overflow() -> Error {
    Error::Budget {
        what: "u128 multiplicity counter",
        limit: usize::MAX,
        reached: usize::MAX,
    }
}

impl CrystalOps for ModuleCrystal {
    type Node = NodeRef;

    fn rank(&self) -> usize {
        ModuleCrystal::rank(self)
    }
    fn e(&self, b: &NodeRef, i: usize) -> Option<NodeRef> {
        self.parts[b.summand]
            .e_of(b.node, i)
            .map(|node| NodeRef { node, ..*b })
    }
    fn f(&self, b: &NodeRef, i: usize) -> Option<NodeRef> {
        self.parts[b.summand]
            .f_of(b.node, i)
            .map(|node| NodeRef { node, ..*b })
    }
    fn eps(&self, b: &NodeRef, i: usize) -> u32 {
        self.parts[b.summand].eps_of(b.node, i)
    }
    fn phi(&self, b: &NodeRef, i: usize) -> u32 {
        self.parts[b.summand].phi_of(b.node, i)
    }
    fn weight(&self, b: &NodeRef) -> Weight {
        self.parts[b.summand].node_weight(b.node).clone()
    }
}

/// A node `b_1 (x) ... (x) b_ell` of a tensor power, realized by the
/// concatenation `b_1 * ... * b_ell`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorNode {
    pub factors: Vec<NodeRef>,
}

/// Tensor powers of a [`ModuleCrystal`] with the tensor rule:
/// `e_i(eta * pi)` acts on `pi` when `eps_i(pi) > phi_i(eta)` and on `eta`
/// otherwise; `f_i(eta * pi)` acts on `eta` when `phi_i(eta) > eps_i(pi)`
/// and on `pi` otherwise.
pub struct TensorCrystal<'a> {
    pub base: &'a ModuleCrystal,
}

impl<'a> TensorCrystal<'a> {
    pub fn new(base: &'a ModuleCrystal) -> Self {
        TensorCrystal { base }
    }

    /// `(eps_i, phi_i)` of every prefix `b_1 * ... * b_k`, `k = 1..=ell`.
    fn prefix_eps_phi(&self, b: &TensorNode, i: usize) -> Vec<(i64, i64)> {
        let mut out: Vec<(i64, i64)> = Vec::with_capacity(b.factors.len());
        for r in &b.factors {
            let e = self.base.eps(r, i) as i64;
            let p = self.base.phi(r, i) as i64;
            out.push(match out.last() {
                None => (e, p),
                Some(&(le, lp)) => (le + (e - lp).max(0), p + (lp - e).max(0)),
            });
        }
        out
    }

    /// Index of the factor acted on by `e_i` (raise) or `f_i` (lower).
    fn acting_factor(&self, b: &TensorNode, i: usize, raise: bool) -> usize {
        let pre = self.prefix_eps_phi(b, i);
        let mut k = b.factors.len() - 1;
        while k > 0 {
            let (_, lphi) = pre[k - 1];
            let r = &b.factors[k];
            let goes_right = if raise {
                self.base.eps(r, i) as i64 > lphi
            } else {
                lphi <= self.base.eps(r, i) as i64
            };
            if goes_right {
                return k;
            }
            k -= 1;
        }
        0
    }

    pub fn path(&self, b: &TensorNode) -> PiecewisePath {
        PiecewisePath::concat_all(
            self.base.rank(),
            b.factors.iter().map(|r| self.base.path(*r)),
        )
    }

    /// Weights of the prefixes, `wt(b_1 * ... * b_k)` for `k = 0..=ell`.
    pub fn prefix_weights(&self, b: &TensorNode) -> Vec<Weight> {
        let mut out = vec![Weight::zero(self.base.rank())];
        for r in &b.factors {
            let next = out.last().unwrap() + &self.base.weight(r);
            out.push(next);
        }
        out
    }

    /// All nodes of the `ell`-th tensor power, in lexicographic order.
    pub fn all_nodes(&self, ell: usize) -> Vec<TensorNode> {
        let mut out = vec![TensorNode { factors: vec![] }];
        for _ in 0..ell {
            out = out
                .into_iter()
                .flat_map(|t| {
                    self.base.nodes().iter().map(move |r| {
                        let mut f = t.factors.clone();
                        f.push(*r);
                        TensorNode { factors: f }
                    })
                })
                .collect();
        }
        out
    }
}

impl CrystalOps for TensorCrystal<'_> {
    type Node = TensorNode;

    fn rank(&self) -> usize {
        self.base.rank()
    }

    fn e(&self, b: &TensorNode, i: usize) -> Option<TensorNode> {
        if b.factors.is_empty() {
            return None;
        }
        let k = self.acting_factor(b, i, true);
        let r = self.base.e(&b.factors[k], i)?;
        let mut out = b.clone();
        out.factors[k] = r;
        Some(out)
    }

    fn f(&self, b: &TensorNode, i: usize) -> Option<TensorNode> {
        if b.factors.is_empty() {
            return None;
        }
        let k = self.acting_factor(b, i, false);
        let r = self.base.f(&b.factors[k], i)?;
        let mut out = b.clone();
        out.factors[k] = r;
        Some(out)
    }

    fn eps(&self, b: &TensorNode, i: usize) -> u32 {
        self.prefix_eps_phi(b, i).last().map_or(0, |x| x.0 as u32)
    }

    fn phi(&self, b: &TensorNode, i: usize) -> u32 {
        self.prefix_eps_phi(b, i).last().map_or(0, |x| x.1 as u32)
    }

    fn weight(&self, b: &TensorNode) -> Weight {
        self.prefix_weights(b).pop().unwrap()
    }
}

/// Action of a Weyl group element on a crystal node through a reduced word.
pub fn weyl_action<C: CrystalOps>(crystal: &C, group: &WeylGroup, w: usize, b: &C::Node) -> C::Node {
    crystal.act_word(&group.element(w).word, b)
}

/// The connected component of `b` (closure under all operators).
pub fn component<C: CrystalOps>(crystal: &C, b: &C::Node) -> Vec<C::Node> {
    let mut seen: HashMap<C::Node, ()> = HashMap::from([(b.clone(), ())]);
    let mut order = vec![b.clone()];
    let mut k = 0;
    while k < order.len() {
        let cur = order[k].clone();
        for i in 0..crystal.rank() {
            for next in [crystal.e(&cur, i), crystal.f(&cur, i)].into_iter().flatten() {
                if seen.insert(next.clone(), ()).is_none() {
                    order.push(next);
                }
            }
        }
        k += 1;
    }
    order
}

pub fn is_zero_weight(w: &Weight) -> bool {
    w.fw().iter().all(|c| c.is_zero())
}
