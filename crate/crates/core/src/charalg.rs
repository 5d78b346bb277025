//! Laurent polynomials in `tau_1, .., tau_n` with rational exponents,
//! characters and the harmonic function `psi`.
//!
//! Exponents are root coordinates: the monomial `tau^u` for `u` in the
//! weight space is `prod tau_i^{u_i}` where `u = sum u_i alpha_i`, so
//! `tau^{alpha_i} = tau_i`. Weights outside the root lattice give
//! exponents with denominators dividing `det A`.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cartan::{CartanDatum, Weight, WeylGroup};
use crate::crystal::{CrystalGraph, ModuleCrystal};
use crate::error::{Error, Result};
use crate::rational::{int, q_int, q_pow, to_f64, Frac, Q};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExponentPolynomial {
    nvars: usize,
    terms: BTreeMap<Vec<Frac>, Q>,
}

impl ExponentPolynomial {
    pub fn zero(nvars: usize) -> Self {
        ExponentPolynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(vec![Frac::zero(); nvars], Q::one())
    }

    pub fn monomial(exp: Vec<Frac>, coeff: Q) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, coeff);
        p
    }

    /// `coeff * tau^exp` for integral exponents.
    pub fn int_monomial(exp: &[i64], coeff: i64) -> Self {
        Self::monomial(exp.iter().map(|&e| int(e)).collect(), q_int(coeff))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, exp: Vec<Frac>, coeff: Q) {
        assert_eq!(exp.len(), self.nvars, "exponent length mismatch");
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Frac>, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &[Frac]) -> Q {
        self.terms.get(exp).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&vec![Frac::zero(); self.nvars])
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, k) in &self.terms {
            out.add_term(e.clone(), k * c);
        }
        out
    }

    /// Multiplication by `tau^shift`.
    pub fn shift(&self, shift: &[Frac]) -> Self {
        ExponentPolynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// All exponents are nonnegative integers.
    pub fn is_polynomial(&self) -> bool {
        self.terms
            .keys()
            .all(|e| e.iter().all(|x| x.is_integer() && !x.is_negative()))
    }

    /// Exact value at `tau`.
    pub fn eval(&self, tau: &TauPoint) -> Result<Q> {
        let mut cache: HashMap<(usize, Frac), Q> = HashMap::new();
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (i, x) in e.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let v = match cache.get(&(i, *x)) {
                    Some(v) => v.clone(),
                    None => {
                        let v = tau.power(i, *x)?;
                        cache.insert((i, *x), v.clone());
                        v
                    }
                };
                m *= v;
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Floating-point value, for reports only.
    pub fn eval_f64(&self, tau: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(tau)
                    .fold(to_f64(c), |acc, (x, t)| acc * t.powf(x.to_f64().unwrap()))
            })
            .sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| {
                    serde_json::json!({
                        "exponent": e.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                        "coefficient": c.to_string(),
                    })
                })
                .collect(),
        )
    }
}

impl fmt::Display for ExponentPolynomial {
    /// Canonical text form: terms in increasing exponent order, e.g.
    /// `1 + t1 + t1*t2 + t1^2*t2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| {
                    if x.is_one() {
                        format!("t{}", i + 1)
                    } else if x.is_integer() && x.is_positive() {
                        format!("t{}^{}", i + 1, x)
                    } else {
                        format!("t{}^({})", i + 1, x)
                    }
                })
                .collect();
            let neg = c.is_negative();
            let mag = c.abs();
            let sep = match (k, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            write!(f, "{sep}")?;
            match (mono.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{}", mono.join("*"))?,
                (false, false) => write!(f, "{mag}*{}", mono.join("*"))?,
            }
        }
        Ok(())
    }
}

impl Add for &ExponentPolynomial {
    type Output = ExponentPolynomial;
    fn add(self, rhs: &ExponentPolynomial) -> ExponentPolynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &ExponentPolynomial {
    type Output = ExponentPolynomial;
    fn sub(self, rhs: &ExponentPolynomial) -> ExponentPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &ExponentPolynomial {
    type Output = ExponentPolynomial;
    fn neg(self) -> ExponentPolynomial {
        ExponentPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &ExponentPolynomial {
    type Output = ExponentPolynomial;
    fn mul(self, rhs: &ExponentPolynomial) -> ExponentPolynomial {
        let mut acc: BTreeMap<Vec<Frac>, Q> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<Frac> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(Q::zero) += c1 * c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        ExponentPolynomial {
            nvars: self.nvars,
            terms: acc,
        }
    }
}

/// A point `tau = (tau_1, .., tau_n)` with optional roots `u_i`,
/// `u_i^D = tau_i`, used to evaluate fractional powers exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauPoint {
    values: Vec<Q>,
    roots: Vec<Option<Q>>,
    det: i64,
}

impl TauPoint {
    pub fn new(values: Vec<Q>, det: i64) -> Result<Self> {
        let n = values.len();
        Self::with_roots(values, vec![None; n], det)
    }

    pub fn with_roots(values: Vec<Q>, roots: Vec<Option<Q>>, det: i64) -> Result<Self> {
        if roots.len() != values.len() {
            return Err(Error::Format("one optional root per coordinate".into()));
        }
        if det < 1 {
            return Err(Error::Format("det A must be positive".into()));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_positive() {
                return Err(Error::Domain(format!("tau_{} = {v} is not positive", i + 1)));
            }
            if let Some(u) = &roots[i] {
                if !u.is_positive() || q_pow(u, det) != *v {
                    return Err(Error::Format(format!(
                        "root {u} of tau_{} does not satisfy u^{det} = {v}",
                        i + 1
                    )));
                }
            }
        }
        Ok(TauPoint { values, roots, det })
    }

    /// The point whose coordinates are `u_i^D`.
    pub fn from_roots(roots: Vec<Q>, det: i64) -> Result<Self> {
        let values = roots.iter().map(|u| q_pow(u, det)).collect();
        Self::with_roots(values, roots.into_iter().map(Some).collect(), det)
    }

    pub fn uniform(rank: usize, t: Q, det: i64) -> Result<Self> {
        Self::new(vec![t; rank], det)
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn roots(&self) -> &[Option<Q>] {
        &self.roots
    }

    pub fn det(&self) -> i64 {
        self.det
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    /// Membership in the convergence region, the open unit cube.
    pub fn in_domain(&self) -> bool {
        self.values.iter().all(|v| v.is_positive() && v < &Q::one())
    }

    pub fn check_domain(&self) -> Result<()> {
        match self.values.iter().position(|v| !(v.is_positive() && v < &Q::one())) {
            None => Ok(()),
            Some(i) => Err(Error::Domain(format!(
                "tau_{} = {} is not in (0, 1)",
                i + 1,
                self.values[i]
            ))),
        }
    }

    /// `tau_i^x`.
    pub fn power(&self, i: usize, x: Frac) -> Result<Q> {
        if x.is_integer() {
            return Ok(q_pow(&self.values[i], x.to_integer()));
        }
        let d = *x.denom();
        if self.det % d != 0 {
            return Err(Error::Integrality(format!(
                "exponent {x} has a denominator not dividing {}",
                self.det
            )));
        }
        let u = self.roots[i].as_ref().ok_or(Error::MissingRoot { index: i + 1 })?;
        Ok(q_pow(u, x.numer() * (self.det / d)))
    }

    /// `tau^u` for `u` given in root coordinates.
    pub fn monomial(&self, u: &[Frac]) -> Result<Q> {
        let mut out = Q::one();
        for (i, x) in u.iter().enumerate() {
            if !x.is_zero() {
                out *= self.power(i, *x)?;
            }
        }
        Ok(out)
    }

    /// `tau^beta` for a weight `beta`.
    pub fn weight_monomial(&self, datum: &CartanDatum, beta: &Weight) -> Result<Q> {
        self.monomial(&datum.root_coords(beta))
    }

    /// The twisted point `tau^w` with `tau^w_i = tau^{w(alpha_i)}`, so that
    /// `(tau^w)^u = tau^{w(u)}`. Roots are twisted along when all are known.
    pub fn twisted(&self, datum: &CartanDatum, group: &WeylGroup, w: usize) -> TauPoint {
        let n = self.rank();
        let mut values = Vec::with_capacity(n);
        let mut roots = Vec::with_capacity(n);
        let all_roots = self.roots.iter().all(|r| r.is_some());
        for i in 0..n {
            let image = group.act(w, &datum.simple_root(i));
            let r = datum
                .root_coords_int(&image)
                .expect("Weyl images of roots are roots");
            values.push(
                r.iter()
                    .enumerate()
                    .fold(Q::one(), |acc, (j, &c)| acc * q_pow(&self.values[j], c)),
            );
            roots.push(all_roots.then(|| {
                r.iter().enumerate().fold(Q::one(), |acc, (j, &c)| {
                    acc * q_pow(self.roots[j].as_ref().unwrap(), c)
                })
            }));
        }
        TauPoint {
            values,
            roots,
            det: self.det,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "tau": self.values.iter().map(crate::rational::q_json).collect::<Vec<_>>(),
            "roots": self.roots.iter().map(|r| r.as_ref().map(crate::rational::q_json)).collect::<Vec<_>>(),
            "det": self.det,
        })
    }
}

/// `S_kappa(tau) = sum_b tau^{kappa - wt(b)}`.
pub fn character_poly(datum: &CartanDatum, crystal: &CrystalGraph) -> ExponentPolynomial {
    let n = datum.rank();
    let kappa = crystal.highest_weight();
    let mut counts: BTreeMap<Weight, i64> = BTreeMap::new();
    for b in 0..crystal.len() {
        *counts.entry(crystal.node_weight(b).clone()).or_insert(0) += 1;
    }
    let mut out = ExponentPolynomial::zero(n);
    for (w, k) in counts {
        out.add_term(datum.root_coords(&(kappa - &w)), q_int(k));
    }
    out
}

/// The formal character `sum_b e^{wt(b)}`, with `e^beta` written as
/// `tau^{-beta}` (so exponents are minus root coordinates).
pub fn formal_character(datum: &CartanDatum, crystal: &CrystalGraph) -> ExponentPolynomial {
    let n = datum.rank();
    let mut out = ExponentPolynomial::zero(n);
    for b in 0..crystal.len() {
        let r: Vec<Frac> = datum.root_coords(crystal.node_weight(b)).iter().map(|x| -x).collect();
        out.add_term(r, Q::one());
    }
    out
}

/// `prod_{alpha > 0} (1 - tau^alpha)`.
pub fn positive_root_product(datum: &CartanDatum) -> ExponentPolynomial {
    let n = datum.rank();
    let mut out = ExponentPolynomial::one(n);
    for a in datum.positive_roots() {
        let r: Vec<Frac> = datum.root_coords(&a);
        let factor = &ExponentPolynomial::one(n) - &ExponentPolynomial::monomial(r, Q::one());
        out = &out * &factor;
    }
    out
}

/// `sum_w eps(w) tau^{mu + rho - w(mu + rho)}`.
pub fn weyl_numerator(datum: &CartanDatum, group: &WeylGroup, mu: &Weight) -> ExponentPolynomial {
    let n = datum.rank();
    let shifted = mu + &datum.rho();
    let mut out = ExponentPolynomial::zero(n);
    for w in 0..group.len() {
        let diff = &shifted - &group.act(w, &shifted);
        out.add_term(datum.root_coords(&diff), q_int(group.sign(w) as i64));
    }
    out
}

/// `psi(mu) = prod_{alpha > 0} (1 - tau^alpha) S_mu(tau)` as a polynomial.
pub fn psi_poly(datum: &CartanDatum, crystal_mu: &CrystalGraph) -> ExponentPolynomial {
    &positive_root_product(datum) * &character_poly(datum, crystal_mu)
}

/// Exact `psi(mu)` at a point of the convergence region.
pub fn psi(datum: &CartanDatum, crystal_mu: &CrystalGraph, tau: &TauPoint) -> Result<Q> {
    tau.check_domain()?;
    psi_poly(datum, crystal_mu).eval(tau)
}

/// Normalising data of a crystal distribution: `Z = sum_b a_b tau^{r - wt(b)}`
/// for the reference weight `r` (the first summand), so that
/// `p_b = a_b tau^{r - wt(b)} / Z` and `Sigma_M = tau^{-r} Z`.
pub fn reference_weight(module: &ModuleCrystal) -> Weight {
    module.spec.summands[0].kappa.clone()
}

pub fn normalizer_poly(datum: &CartanDatum, module: &ModuleCrystal) -> ExponentPolynomial {
    let n = datum.rank();
    let r = reference_weight(module);
    let mut out = ExponentPolynomial::zero(n);
    for (beta, k) in module.weight_multiplicities() {
        out.add_term(datum.root_coords(&(&r - &beta)), Q::from_integer(BigInt::from(k)));
    }
    out
}

/// `Sigma_M(tau) = sum_kappa a_kappa tau^{-kappa} S_kappa(tau)` as a
/// Laurent polynomial with rational exponents.
pub fn sigma_poly(datum: &CartanDatum, module: &ModuleCrystal) -> ExponentPolynomial {
    let r = reference_weight(module);
    let shift: Vec<Frac> = datum.root_coords(&r).iter().map(|x| -x).collect();
    normalizer_poly(datum, module).shift(&shift)
}

pub fn sigma_m(datum: &CartanDatum, module: &ModuleCrystal, tau: &TauPoint) -> Result<Q> {
    tau.check_domain()?;
    sigma_poly(datum, module).eval(tau)
}

/// `psi_ell(mu) = sum_lambda f^ell_{lambda/mu} a-weighted
/// tau^{ell r + mu - lambda} / Z^ell`, the probability that the walk
/// started at `mu` stays in the chamber up to time `ell`.
pub fn psi_ell(
    datum: &CartanDatum,
    module: &ModuleCrystal,
    mu: &Weight,
    tau: &TauPoint,
    ell: usize,
) -> Result<Q> {
    tau.check_domain()?;
    let f = module.f_multiplicities(mu, ell)?;
    let z = normalizer_poly(datum, module).eval(tau)?;
    let r = reference_weight(module);
    let mut acc = Q::zero();
    for (lam, count) in f {
        let exp = &(&(&r * ell as i64) + mu) - &lam;
        acc += Q::from_integer(BigInt::from(count)) * tau.weight_monomial(datum, &exp)?;
    }
    Ok(acc / q_pow(&z, ell as i64))
}

/// `Pi^w_ell(mu) = sum_lambda f^ell_{lambda/mu} tau^{ell kappa + rho + mu -
/// w(lambda + rho)} / S_kappa(tau)^ell` for an irreducible module.
pub fn pi_ell_twisted(
    datum: &CartanDatum,
    group: &WeylGroup,
    module: &ModuleCrystal,
    mu: &Weight,
    tau: &TauPoint,
    ell: usize,
    w: usize,
    f: &BTreeMap<Weight, u128>,
) -> Result<Q> {
    let kappa = reference_weight(module);
    let s = normalizer_poly(datum, module).eval(tau)?;
    let rho = datum.rho();
    let mut acc = Q::zero();
    for (lam, count) in f {
        let moved = group.act(w, &(lam + &rho));
        let exp = &(&(&(&kappa * ell as i64) + &rho) + mu) - &moved;
        acc += Q::from_integer(BigInt::from(*count)) * tau.weight_monomial(datum, &exp)?;
    }
    Ok(acc / q_pow(&s, ell as i64))
}

/// `psi^w_ell(mu) = sum_lambda f^ell_{lambda/mu} tau^{ell kappa + w(mu) -
/// w(lambda)} / S_kappa(tau)^ell`.
pub fn psi_ell_twisted_closed(
    datum: &CartanDatum,
    group: &WeylGroup,
    module: &ModuleCrystal,
    mu: &Weight,
    tau: &TauPoint,
    w: usize,
    ell: usize,
    f: &BTreeMap<Weight, u128>,
) -> Result<Q> {
    let kappa = reference_weight(module);
    let s = normalizer_poly(datum, module).eval(tau)?;
    let mut acc = Q::zero();
    for (lam, count) in f {
        let exp = &(&(&kappa * ell as i64) + &group.act(w, mu)) - &group.act(w, lam);
        acc += Q::from_integer(BigInt::from(*count)) * tau.weight_monomial(datum, &exp)?;
    }
    Ok(acc / q_pow(&s, ell as i64))
}

/// Left side of the finite-`ell` identity,
/// `sum_w eps(w) Pi^w_ell(mu)`.
pub fn alternating_pi_sum(
    datum: &CartanDatum,
    group: &WeylGroup,
    module: &ModuleCrystal,
    mu: &Weight,
    tau: &TauPoint,
    ell: usize,
) -> Result<Q> {
    if !module.spec.is_irreducible() {
        return Err(Error::Precondition(
            "the alternating sum is defined for irreducible modules".into(),
        ));
    }
    let f = module.f_multiplicities(mu, ell)?;
    let mut acc = Q::zero();
    for w in 0..group.len() {
        let term = pi_ell_twisted(datum, group, module, mu, tau, ell, w, &f)?;
        acc += q_int(group.sign(w) as i64) * term;
    }
    Ok(acc)
}

/// Weighted height statistic `sum_b ht(b) tau^{kappa - wt(b)}` (finite for
/// finite crystals).
pub fn height_series(datum: &CartanDatum, crystal: &CrystalGraph) -> ExponentPolynomial {
    let n = datum.rank();
    let mut out = ExponentPolynomial::zero(n);
    for b in 0..crystal.len() {
        let r = datum.root_coords(&(crystal.highest_weight() - crystal.node_weight(b)));
        out.add_term(r, q_int(crystal.node_height(b)));
    }
    out
}

/// `tau^beta` for integral root coordinates, used by hot loops.
pub fn int_monomial_value(tau_values: &[Q], r: &[i64]) -> Q {
    r.iter()
        .zip(tau_values)
        .fold(Q::one(), |acc, (&k, t)| acc * q_pow(t, k))
}

/// Least common multiple of the exponent denominators.
pub fn exponent_denominator(p: &ExponentPolynomial) -> i64 {
    p.terms()
        .flat_map(|(e, _)| e.iter().map(|x| *x.denom()))
        .fold(1i64, |a, b| a.lcm(&b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::PiecewisePath;
    use crate::rational::{frac, q_frac};
    use std::sync::Arc;

    fn c2() -> CartanDatum {
        CartanDatum::from_label("C2").unwrap()
    }

    fn poly(terms: &[(&[i64], i64)]) -> ExponentPolynomial {
        let n = terms[0].0.len();
        let mut p = ExponentPolynomial::zero(n);
        for (e, c) in terms {
            p.add_term(e.iter().map(|&x| int(x)).collect(), q_int(*c));
        }
        p
    }

    fn half() -> TauPoint {
        TauPoint::new(vec![q_frac(1, 2), q_frac(1, 2)], 2).unwrap()
    }

    #[test]
    fn c2_characters() {
        let d = c2();
        let s10 = character_poly(&d, &CrystalGraph::straight(&d, &Weight(vec![1, 0])).unwrap());
        assert_eq!(s10, poly(&[(&[0, 0], 1), (&[1, 0], 1), (&[1, 1], 1), (&[2, 1], 1)]));
        let s11 = character_poly(&d, &CrystalGraph::straight(&d, &Weight(vec![0, 1])).unwrap());
        assert_eq!(
            s11,
            poly(&[(&[0, 0], 1), (&[0, 1], 1), (&[1, 1], 1), (&[2, 1], 1), (&[2, 2], 1)])
        );
        let s0 = character_poly(&d, &CrystalGraph::straight(&d, &Weight(vec![0, 0])).unwrap());
        assert_eq!(s0, ExponentPolynomial::one(2));
        // 1 + 1/2 + 1/4 + 1/8
        assert_eq!(s10.eval(&half()).unwrap(), q_frac(15, 8));
        assert_eq!(s10.to_string(), "1 + t1 + t1*t2 + t1^2*t2");
    }

    #[test]
    fn numerator_examples() {
        let a1 = CartanDatum::from_label("A1").unwrap();
        let g = WeylGroup::generate(&a1).unwrap();
        assert_eq!(weyl_numerator(&a1, &g, &Weight(vec![0])), poly(&[(&[0], 1), (&[1], -1)]));
        let d = c2();
        let g = WeylGroup::generate(&d).unwrap();
        let expect = poly(&[
            (&[0, 0], 1),
            (&[1, 2], 1),
            (&[4, 3], 1),
            (&[3, 1], 1),
            (&[1, 0], -1),
            (&[0, 1], -1),
            (&[4, 2], -1),
            (&[3, 3], -1),
        ]);
        assert_eq!(weyl_numerator(&d, &g, &Weight(vec![0, 0])), expect);
        assert_eq!(weyl_numerator(&d, &g, &Weight(vec![3, 4])).len(), 8);
    }

    #[test]
    fn product_and_numerator_forms_agree() {
        for (label, weights) in [
            ("C2", vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![2, 3]]),
            ("A2", vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![0, 3]]),
            ("G2", vec![vec![0, 0], vec![1, 0], vec![0, 1]]),
            ("B3", vec![vec![0, 0, 0], vec![1, 0, 1]]),
        ] {
            let d = CartanDatum::from_label(label).unwrap();
            let g = WeylGroup::generate(&d).unwrap();
            for mu in weights {
                let mu = Weight(mu);
                let c = CrystalGraph::straight(&d, &mu).unwrap();
                assert_eq!(psi_poly(&d, &c), weyl_numerator(&d, &g, &mu), "{label} {mu}");
            }
        }
    }

    #[test]
    fn psi_values() {
        let d = c2();
        let c = CrystalGraph::straight(&d, &Weight(vec![0, 0])).unwrap();
        assert_eq!(psi(&d, &c, &half()).unwrap(), q_frac(21, 128));
        let bad = TauPoint::new(vec![q_frac(1, 2), q_int(1)], 2).unwrap();
        assert!(matches!(psi(&d, &c, &bad), Err(Error::Domain(_))));
        // A1: psi(k omega) = 1 - tau^{k+1}
        let a1 = CartanDatum::from_label("A1").unwrap();
        for k in 0..5 {
            let c = CrystalGraph::straight(&a1, &Weight(vec![k])).unwrap();
            assert_eq!(psi_poly(&a1, &c), poly(&[(&[0], 1), (&[k + 1], -1)]));
        }
    }

    #[test]
    fn sigma_m_example_with_roots() {
        let d = c2();
        let spec = crate::crystal::ModuleSpec::irreducible(Weight(vec![1, 0]));
        let m = ModuleCrystal::generate(&d, spec).unwrap();
        let tau = TauPoint::with_roots(
            vec![q_frac(1, 2), q_frac(1, 4)],
            vec![None, Some(q_frac(1, 2))],
            2,
        )
        .unwrap();
        assert_eq!(sigma_m(&d, &m, &tau).unwrap(), q_frac(27, 4));
        let no_root = TauPoint::new(vec![q_frac(1, 2), q_frac(1, 4)], 2).unwrap();
        assert!(matches!(sigma_m(&d, &m, &no_root), Err(Error::MissingRoot { index: 2 })));
    }

    #[test]
    fn tau_point_validation() {
        assert!(TauPoint::with_roots(vec![q_frac(1, 4)], vec![Some(q_frac(1, 3))], 2).is_err());
        let t = TauPoint::from_roots(vec![q_frac(1, 2), q_frac(2, 3)], 2).unwrap();
        assert_eq!(t.values()[1], q_frac(4, 9));
        assert_eq!(t.power(1, frac(-1, 2)).unwrap(), q_frac(3, 2));
        assert!(t.in_domain());
    }

    #[test]
    fn twisted_characters() {
        // S_kappa(tau^w) = tau^{w(kappa) - kappa} S_kappa(tau)
        let d = c2();
        let g = WeylGroup::generate(&d).unwrap();
        let tau = TauPoint::new(vec![q_frac(1, 2), q_frac(1, 3)], 2).unwrap();
        for kappa in [vec![1, 0], vec![0, 1], vec![2, 1]] {
            let kappa = Weight(kappa);
            let s = character_poly(&d, &CrystalGraph::straight(&d, &kappa).unwrap());
            for w in 0..g.len() {
                let tw = tau.twisted(&d, &g, w);
                let lhs = s.eval(&tw).unwrap();
                let rhs = tau.weight_monomial(&d, &(&g.act(w, &kappa) - &kappa)).unwrap()
                    * s.eval(&tau).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn finite_ell_identity_small() {
        let d = c2();
        let g = WeylGroup::generate(&d).unwrap();
        let m = ModuleCrystal::irreducible(Arc::new(CrystalGraph::straight(&d, &Weight(vec![1, 0])).unwrap()));
        let tau = half();
        for mu in [Weight(vec![0, 0]), Weight(vec![1, 0])] {
            let c = CrystalGraph::straight(&d, &mu).unwrap();
            let target = psi(&d, &c, &tau).unwrap();
            for ell in 0..=2 {
                assert_eq!(alternating_pi_sum(&d, &g, &m, &mu, &tau, ell).unwrap(), target);
            }
        }
    }

    #[test]
    fn psi_ell_examples() {
        let d = c2();
        let m = ModuleCrystal::irreducible(Arc::new(CrystalGraph::straight(&d, &Weight(vec![1, 0])).unwrap()));
        let zero = Weight(vec![0, 0]);
        assert_eq!(psi_ell(&d, &m, &zero, &half(), 0).unwrap(), Q::one());
        assert_eq!(psi_ell(&d, &m, &zero, &half(), 1).unwrap(), q_frac(8, 15));
        let mut prev = Q::one();
        for ell in 1..6 {
            let v = psi_ell(&d, &m, &zero, &half(), ell).unwrap();
            assert!(v <= prev && v >= q_frac(21, 128));
            prev = v;
        }
    }

    #[test]
    fn character_product_identity() {
        // s_mu s_kappa^ell = sum_lambda f^ell s_lambda as formal characters
        let d = c2();
        let kappa = Weight(vec![1, 0]);
        let m = ModuleCrystal::irreducible(Arc::new(CrystalGraph::straight(&d, &kappa).unwrap()));
        let ch = |w: &Weight| formal_character(&d, &CrystalGraph::straight(&d, w).unwrap());
        for mu in [Weight(vec![0, 0]), Weight(vec![1, 1])] {
            for ell in 1..=3u32 {
                let lhs = &ch(&mu) * &ch(&kappa).pow(ell);
                let mut rhs = ExponentPolynomial::zero(2);
                for (lam, k) in m.f_multiplicities(&mu, ell as usize).unwrap() {
                    rhs = &rhs + &ch(&lam).scale(&q_int(k as i64));
                }
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn display_and_arithmetic() {
        let p = poly(&[(&[0, 0], 1), (&[1, 0], -2)]);
        assert_eq!(p.to_string(), "1 - 2*t1");
        assert!((&p - &p).is_zero());
        assert_eq!((&p * &ExponentPolynomial::one(2)), p);
        let half_exp = ExponentPolynomial::monomial(vec![frac(1, 2), int(0)], q_int(3));
        assert_eq!(half_exp.to_string(), "3*t1^(1/2)");
        assert_eq!(exponent_denominator(&half_exp), 2);
        let gamma = CrystalGraph::generate(
            &c2(),
            &PiecewisePath::from_segments(2, vec![vec![int(1), int(0)], vec![int(-1), int(1)]]),
        )
        .unwrap();
        assert_eq!(height_series(&c2(), &gamma).constant_term(), Q::zero());
    }
}
