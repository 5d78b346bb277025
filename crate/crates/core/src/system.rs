//! A root system bundled with lazily built, shared caches of Weyl group,
//! crystals and characters.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::cartan::{CartanDatum, Weight, WeylGroup, DEFAULT_WEYL_BUDGET};
use crate::charalg::{character_poly, positive_root_product, ExponentPolynomial, TauPoint};
use crate::crystal::{CrystalGraph, ModuleCrystal, ModuleSpec, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::path::PiecewisePath;
use crate::rational::Q;

pub struct RootSystem {
    datum: CartanDatum,
    positive_roots: Vec<Weight>,
    root_product: ExponentPolynomial,
    weyl_budget: usize,
    node_budget: usize,
    weyl: Mutex<Option<Arc<WeylGroup>>>,
    crystals: Mutex<HashMap<Weight, Arc<CrystalGraph>>>,
    characters: Mutex<HashMap<Weight, Arc<ExponentPolynomial>>>,
}

impl RootSystem {
    pub fn new(datum: CartanDatum) -> Self {
        let positive_roots = datum.positive_roots();
        let root_product = positive_root_product(&datum);
        RootSystem {
            datum,
            positive_roots,
            root_product,
            weyl_budget: DEFAULT_WEYL_BUDGET,
            node_budget: DEFAULT_NODE_BUDGET,
            weyl: Mutex::new(None),
            crystals: Mutex::new(HashMap::new()),
            characters: Mutex::new(HashMap::new()),
        }
    }

    pub fn from_label(label: &str) -> Result<Self> {
        Ok(Self::new(CartanDatum::from_label(label)?))
    }

    pub fn with_budgets(mut self, weyl: usize, nodes: usize) -> Self {
        self.weyl_budget = weyl;
        self.node_budget = nodes;
        self
    }

    pub fn datum(&self) -> &CartanDatum {
        &self.datum
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    pub fn positive_roots(&self) -> &[Weight] {
        &self.positive_roots
    }

    /// `prod_{alpha > 0} (1 - tau^alpha)`.
    pub fn root_product(&self) -> &ExponentPolynomial {
        &self.root_product
    }

    pub fn weyl(&self) -> Result<Arc<WeylGroup>> {
        let mut slot = self.weyl.lock().unwrap();
        if let Some(g) = slot.as_ref() {
            return Ok(g.clone());
        }
        let g = Arc::new(WeylGroup::generate_with_budget(&self.datum, self.weyl_budget)?);
        *slot = Some(g.clone());
        Ok(g)
    }

    /// Crystal of the straight line to a dominant weight.
    pub fn crystal(&self, lambda: &Weight) -> Result<Arc<CrystalGraph>> {
        if let Some(c) = self.crystals.lock().unwrap().get(lambda) {
            return Ok(c.clone());
        }
        if !lambda.is_dominant() {
            return Err(Error::Precondition(format!("{lambda} is not dominant")));
        }
        let c = Arc::new(CrystalGraph::generate_with_budget(
            &self.datum,
            &PiecewisePath::straight_to(lambda),
            self.node_budget,
        )?);
        self.crystals
            .lock()
            .unwrap()
            .insert(lambda.clone(), c.clone());
        Ok(c)
    }

    /// `S_lambda` as a polynomial.
    pub fn character(&self, lambda: &Weight) -> Result<Arc<ExponentPolynomial>> {
        if let Some(c) = self.characters.lock().unwrap().get(lambda) {
            return Ok(c.clone());
        }
        let s = Arc::new(character_poly(&self.datum, &*self.crystal(lambda)?));
        self.characters
            .lock()
            .unwrap()
            .insert(lambda.clone(), s.clone());
        Ok(s)
    }

    pub fn psi_poly(&self, mu: &Weight) -> Result<ExponentPolynomial> {
        Ok(&self.root_product * &*self.character(mu)?)
    }

    /// `psi(mu) = prod (1 - tau^alpha) S_mu(tau)`.
    pub fn psi(&self, mu: &Weight, tau: &TauPoint) -> Result<Q> {
        tau.check_domain()?;
        Ok(self.root_product.eval(tau)? * self.character(mu)?.eval(tau)?)
    }

    /// `psi` through the Weyl numerator instead of the product form.
    pub fn psi_numerator(&self, mu: &Weight, tau: &TauPoint) -> Result<Q> {
        tau.check_domain()?;
        crate::charalg::weyl_numerator(&self.datum, &*self.weyl()?, mu).eval(tau)
    }

    /// Module crystal, reusing cached crystals for straight-line summands.
    pub fn module(&self, spec: &ModuleSpec) -> Result<ModuleCrystal> {
        spec.validate()?;
        let parts = spec
            .summands
            .iter()
            .map(|s| match &s.path {
                None => self.crystal(&s.kappa),
                Some(p) => {
                    if p.weight()? != s.kappa {
                        return Err(Error::Precondition(format!(
                            "highest path {p} does not end at {}",
                            s.kappa
                        )));
                    }
                    CrystalGraph::generate_with_budget(&self.datum, p, self.node_budget).map(Arc::new)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        ModuleCrystal::new(spec.clone(), parts)
    }

    pub fn irreducible(&self, kappa: &Weight) -> Result<ModuleCrystal> {
        self.module(&ModuleSpec::irreducible(kappa.clone()))
    }
}
