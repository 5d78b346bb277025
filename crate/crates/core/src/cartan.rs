//! Cartan data, weights, roots and Weyl groups of finite type.
//!
//! Conventions: the Cartan matrix has entries `a_ij = <alpha_i, alpha_j^vee>`,
//! so row `i` holds the coordinates of the simple root `alpha_i` on the
//! fundamental weights. For `C_2` this gives `[[2, -1], [-2, 2]]` with
//! `alpha_1 = e1 - e2` and `alpha_2 = 2 e2`.
//!
//! Weights are stored on the fundamental-weight basis (integers). Root
//! coordinates are obtained from the inverse Cartan matrix and have
//! denominators dividing `det A`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{int, to_q, Frac, Q};

pub const DEFAULT_MAX_RANK: usize = 8;
pub const DEFAULT_WEYL_BUDGET: usize = 500_000;

/// An integral weight in fundamental-weight coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        Weight(v)
    }

    pub fn fw(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn is_strictly_dominant(&self) -> bool {
        self.0.iter().all(|&c| c > 0)
    }

    /// Sum of the fundamental-weight coordinates. For `C_2` this is the
    /// first part of the corresponding two-row partition.
    pub fn level(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn to_frac(&self) -> Vec<Frac> {
        self.0.iter().map(|&c| int(c)).collect()
    }

    pub fn scale(&self, k: i64) -> Weight {
        Weight(self.0.iter().map(|c| c * k).collect())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Weight {
    type Output = Weight;
    fn sub(self, rhs: &Weight) -> Weight {
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<i64> for &Weight {
    type Output = Weight;
    fn mul(self, k: i64) -> Weight {
        self.scale(k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChamberPosition {
    Interior,
    Boundary,
    Outside,
}

pub fn chamber_position(coords: &[i64]) -> ChamberPosition {
    if coords.iter().any(|&c| c < 0) {
        ChamberPosition::Outside
    } else if coords.contains(&0) {
        ChamberPosition::Boundary
    } else {
        ChamberPosition::Interior
    }
}

pub fn chamber_position_frac(coords: &[Frac]) -> ChamberPosition {
    if coords.iter().any(|c| c.is_negative()) {
        ChamberPosition::Outside
    } else if coords.iter().any(|c| c.is_zero()) {
        ChamberPosition::Boundary
    } else {
        ChamberPosition::Interior
    }
}

pub fn chamber_position_q(coords: &[Q]) -> ChamberPosition {
    if coords.iter().any(|c| c.is_negative()) {
        ChamberPosition::Outside
    } else if coords.iter().any(|c| c.is_zero()) {
        ChamberPosition::Boundary
    } else {
        ChamberPosition::Interior
    }
}

/// Named finite types (Bourbaki numbering).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CartanType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    E(usize),
    F4,
    G2,
}

impl CartanType {
    pub fn rank(&self) -> usize {
        match *self {
            CartanType::A(n)
            | CartanType::B(n)
            | CartanType::C(n)
            | CartanType::D(n)
            | CartanType::E(n) => n,
            CartanType::F4 => 4,
            CartanType::G2 => 2,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            CartanType::A(n) => n >= 1,
            CartanType::B(n) | CartanType::C(n) => n >= 2,
            CartanType::D(n) => n >= 4,
            CartanType::E(n) => (6..=8).contains(&n),
            CartanType::F4 | CartanType::G2 => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Format(format!("no finite type {self}")))
        }
    }

    /// Simple roots in the standard orthonormal realization.
    fn ambient_simple_roots(&self) -> (usize, Vec<Vec<Frac>>) {
        let e = |dim: usize, pairs: &[(usize, Frac)]| {
            let mut v = vec![Frac::zero(); dim];
            for &(k, c) in pairs {
                v[k] += c;
            }
            v
        };
        let one = Frac::one();
        let half = Frac::new(1, 2);
        match *self {
            CartanType::A(n) => {
                let roots = (0..n).map(|i| e(n + 1, &[(i, one), (i + 1, -one)])).collect();
                (n + 1, roots)
            }
            CartanType::B(n) | CartanType::C(n) | CartanType::D(n) => {
                let mut roots: Vec<_> = (0..n - 1)
                    .map(|i| e(n, &[(i, one), (i + 1, -one)]))
                    .collect();
                roots.push(match *self {
                    CartanType::B(_) => e(n, &[(n - 1, one)]),
                    CartanType::C(_) => e(n, &[(n - 1, int(2))]),
                    _ => e(n, &[(n - 2, one), (n - 1, one)]),
                });
                (n, roots)
            }
            CartanType::G2 => (
                3,
                vec![
                    e(3, &[(0, one), (1, -one)]),
                    e(3, &[(0, int(-2)), (1, one), (2, one)]),
                ],
            ),
            CartanType::F4 => (
                4,
                vec![
                    e(4, &[(1, one), (2, -one)]),
                    e(4, &[(2, one), (3, -one)]),
                    e(4, &[(3, one)]),
                    e(4, &[(0, half), (1, -half), (2, -half), (3, -half)]),
                ],
            ),
            CartanType::E(n) => {
                let mut roots = vec![
                    e(
                        8,
                        &[
                            (0, half),
                            (7, half),
                            (1, -half),
                            (2, -half),
                            (3, -half),
                            (4, -half),
                            (5, -half),
                            (6, -half),
                        ],
                    ),
                    e(8, &[(0, one), (1, one)]),
                ];
                for k in 0..6 {
                    roots.push(e(8, &[(k + 1, one), (k, -one)]));
                }
                roots.truncate(n);
                (8, roots)
            }
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CartanType::A(n) => write!(f, "A{n}"),
            CartanType::B(n) => write!(f, "B{n}"),
            CartanType::C(n) => write!(f, "C{n}"),
            CartanType::D(n) => write!(f, "D{n}"),
            CartanType::E(n) => write!(f, "E{n}"),
            CartanType::F4 => write!(f, "F4"),
            CartanType::G2 => write!(f, "G2"),
        }
    }
}

impl FromStr for CartanType {
    type Err = Error;

    /// Accepts `C2`, `C_2`, `c2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Format(format!("unrecognised Cartan type {s:?}"));
        let mut chars = s.chars();
        let letter = chars.next().ok_or_else(bad)?.to_ascii_uppercase();
        let rest: String = chars.collect();
        let n: usize = rest.trim_start_matches('_').parse().map_err(|_| bad())?;
        let t = match letter {
            'A' => CartanType::A(n),
            'B' => CartanType::B(n),
            'C' => CartanType::C(n),
            'D' => CartanType::D(n),
            'E' => CartanType::E(n),
            'F' if n == 4 => CartanType::F4,
            'G' if n == 2 => CartanType::G2,
            _ => return Err(bad()),
        };
        t.validate()?;
        Ok(t)
    }
}

/// Orthonormal realization of a named type.
#[derive(Clone, Debug)]
pub struct Ambient {
    pub dim: usize,
    pub simple_roots: Vec<Vec<Frac>>,
    pub fundamental_weights: Vec<Vec<Frac>>,
}

#[derive(Clone, Debug)]
pub struct CartanDatum {
    label: Option<String>,
    matrix: Vec<Vec<i64>>,
    inverse: Vec<Vec<Frac>>,
    det: i64,
    /// `d_j = (alpha_j, alpha_j) / 2`, so that `(alpha_i, alpha_j) = a_ij d_j`.
    symmetrizer: Vec<Frac>,
    ambient: Option<Ambient>,
}

impl CartanDatum {
    pub fn from_type(t: CartanType) -> Result<Self> {
        Self::from_type_with_limit(t, DEFAULT_MAX_RANK)
    }

    pub fn from_type_with_limit(t: CartanType, max_rank: usize) -> Result<Self> {
        t.validate()?;
        if t.rank() > max_rank {
            return Err(Error::RankLimit {
                rank: t.rank(),
                limit: max_rank,
            });
        }
        let (dim, roots) = t.ambient_simple_roots();
        let n = roots.len();
        let dot = |a: &[Frac], b: &[Frac]| -> Frac { a.iter().zip(b).map(|(x, y)| x * y).sum() };
        let mut matrix = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let v = int(2) * dot(&roots[i], &roots[j]) / dot(&roots[j], &roots[j]);
                debug_assert!(v.is_integer());
                matrix[i][j] = v.to_integer();
            }
        }
        let mut datum = Self::from_matrix(matrix)?;
        datum.label = Some(t.to_string());
        let fundamental_weights = (0..n)
            .map(|i| {
                let r = datum.root_coords_frac(&Weight::unit(n, i).to_frac());
                let mut v = vec![Frac::zero(); dim];
                for (j, c) in r.iter().enumerate() {
                    for k in 0..dim {
                        v[k] += c * roots[j][k];
                    }
                }
                v
            })
            .collect();
        datum.ambient = Some(Ambient {
            dim,
            simple_roots: roots,
            fundamental_weights,
        });
        Ok(datum)
    }

    /// Parses a type label such as `"C2"`.
    pub fn from_label(label: &str) -> Result<Self> {
        Self::from_type(label.parse()?)
    }

    pub fn from_label_with_limit(label: &str, max_rank: usize) -> Result<Self> {
        Self::from_type_with_limit(label.parse()?, max_rank)
    }

    /// Parses a JSON array of integer arrays.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let rows = v
            .as_array()
            .ok_or_else(|| Error::Format("Cartan matrix must be an array of arrays".into()))?;
        let mut matrix = Vec::with_capacity(rows.len());
        for row in rows {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Format("Cartan matrix must be an array of arrays".into()))?;
            let mut out = Vec::with_capacity(row.len());
            for x in row {
                out.push(x.as_i64().ok_or_else(|| {
                    Error::Format(format!("Cartan matrix entry {x} is not an integer"))
                })?);
            }
            matrix.push(out);
        }
        Self::from_matrix(matrix)
    }

    pub fn from_matrix(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::Format("empty Cartan matrix".into()));
        }
        if matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Format("Cartan matrix is not square".into()));
        }
        for i in 0..n {
            if matrix[i][i] != 2 {
                return Err(Error::InvalidCartan(format!("a_{i}{i} must be 2", i = i + 1)));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                if matrix[i][j] > 0 {
                    return Err(Error::InvalidCartan(format!(
                        "off-diagonal entry a_{}{} = {} is positive",
                        i + 1,
                        j + 1,
                        matrix[i][j]
                    )));
                }
                if (matrix[i][j] == 0) != (matrix[j][i] == 0) {
                    return Err(Error::InvalidCartan(format!(
                        "a_{0}{1} and a_{1}{0} must vanish together",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if !is_connected(&matrix) {
            return Err(Error::InvalidCartan("matrix is decomposable".into()));
        }
        check_principal_minors(&matrix)?;

        let det = bareiss_det(&matrix);
        let det = i64::try_from(det).map_err(|_| Error::InvalidCartan("determinant overflow".into()))?;
        let inverse = invert(&matrix)?;
        let symmetrizer = symmetrize(&matrix)?;
        Ok(CartanDatum {
            label: None,
            matrix,
            inverse,
            det,
            symmetrizer,
            ambient: None,
        })
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn inverse(&self) -> &[Vec<Frac>] {
        &self.inverse
    }

    pub fn det(&self) -> i64 {
        self.det
    }

    pub fn ambient(&self) -> Option<&Ambient> {
        self.ambient.as_ref()
    }

    pub fn symmetrizer(&self) -> &[Frac] {
        &self.symmetrizer
    }

    /// Simple root `alpha_i` on the fundamental weights (row `i` of `A`).
    pub fn simple_root(&self, i: usize) -> Weight {
        Weight(self.matrix[i].clone())
    }

    pub fn fundamental_weight(&self, i: usize) -> Weight {
        Weight::unit(self.rank(), i)
    }

    /// `rho`, the weight with `rho(h_i) = 1` for every `i`.
    pub fn rho(&self) -> Weight {
        Weight(vec![1; self.rank()])
    }

    pub fn root_coords(&self, w: &Weight) -> Vec<Frac> {
        self.root_coords_frac(&w.to_frac())
    }

    pub fn root_coords_frac(&self, c: &[Frac]) -> Vec<Frac> {
        let n = self.rank();
        (0..n)
            .map(|j| (0..n).map(|i| self.inverse[i][j] * c[i]).sum())
            .collect()
    }

    /// Root coordinates when they are all integers, i.e. `w` lies in `Q`.
    pub fn root_coords_int(&self, w: &Weight) -> Option<Vec<i64>> {
        self.root_coords(w)
            .into_iter()
            .map(|r| r.is_integer().then(|| r.to_integer()))
            .collect()
    }

    pub fn in_root_lattice(&self, w: &Weight) -> bool {
        self.root_coords_int(w).is_some()
    }

    pub fn in_positive_root_cone(&self, w: &Weight) -> bool {
        self.root_coords_int(w)
            .is_some_and(|r| r.iter().all(|&c| c >= 0))
    }

    /// Sum of root coordinates (the height when `w` is in `Q`).
    pub fn height(&self, w: &Weight) -> Frac {
        self.root_coords(w).into_iter().sum()
    }

    pub fn from_root_coords(&self, r: &[i64]) -> Weight {
        let n = self.rank();
        Weight(
            (0..n)
                .map(|j| (0..n).map(|i| self.matrix[i][j] * r[i]).sum())
                .collect(),
        )
    }

    /// Fundamental-weight coordinates to the orthonormal realization.
    pub fn to_ambient(&self, c: &[Frac]) -> Option<Vec<Frac>> {
        let amb = self.ambient.as_ref()?;
        let mut v = vec![Frac::zero(); amb.dim];
        for (i, ci) in c.iter().enumerate() {
            for k in 0..amb.dim {
                v[k] += ci * amb.fundamental_weights[i][k];
            }
        }
        Some(v)
    }

    /// Orthonormal coordinates to fundamental-weight coordinates,
    /// `c_i = 2 (v, alpha_i) / (alpha_i, alpha_i)`.
    pub fn from_ambient(&self, v: &[Frac]) -> Option<Vec<Frac>> {
        let amb = self.ambient.as_ref()?;
        if v.len() != amb.dim {
            return None;
        }
        Some(
            amb.simple_roots
                .iter()
                .map(|a| {
                    let va: Frac = a.iter().zip(v).map(|(x, y)| x * y).sum();
                    let aa: Frac = a.iter().map(|x| x * x).sum();
                    int(2) * va / aa
                })
                .collect(),
        )
    }

    /// Invariant bilinear form on fundamental-weight coordinates, normalised
    /// so that `(alpha_j, alpha_j) = 2 d_j`.
    pub fn inner(&self, x: &[Q], y: &[Q]) -> Q {
        let n = self.rank();
        let mut acc = Q::zero();
        for i in 0..n {
            for j in 0..n {
                let g = to_q(&(self.inverse[i][j] * self.symmetrizer[j]));
                acc += &x[i] * &y[j] * g;
            }
        }
        acc
    }

    /// `(x, alpha)` for `x` on fundamental weights and `alpha` on roots.
    fn pair_with_root(&self, x: &[Frac], alpha_root: &[i64]) -> Frac {
        x.iter()
            .zip(alpha_root)
            .zip(&self.symmetrizer)
            .map(|((c, r), d)| c * int(*r) * d)
            .sum()
    }

    /// Applies the simple reflection `s_i` in place.
    pub fn reflect(&self, i: usize, v: &mut [Frac]) {
        let c = v[i];
        for (vj, aij) in v.iter_mut().zip(&self.matrix[i]) {
            *vj -= c * int(*aij);
        }
    }

    pub fn reflect_weight(&self, i: usize, w: &Weight) -> Weight {
        let c = w.0[i];
        Weight(
            w.0.iter()
                .zip(&self.matrix[i])
                .map(|(x, a)| x - c * a)
                .collect(),
        )
    }

    /// The dominant element of the Weyl orbit of `w`.
    pub fn dominant_conjugate(&self, w: &Weight) -> Weight {
        let mut w = w.clone();
        while let Some(i) = w.0.iter().position(|&c| c < 0) {
            w = self.reflect_weight(i, &w);
        }
        w
    }

    pub fn positive_roots(&self) -> Vec<Weight> {
        positive_roots(self)
    }

    /// Weyl dimension formula `prod (lambda + rho, alpha) / (rho, alpha)`.
    pub fn dim_irrep(&self, lambda: &Weight) -> u128 {
        let roots = self.positive_roots();
        let shifted: Vec<Frac> = lambda.0.iter().map(|&c| int(c + 1)).collect();
        let rho: Vec<Frac> = vec![Frac::one(); self.rank()];
        let mut num = Q::one();
        let mut den = Q::one();
        for a in &roots {
            let r = self.root_coords_int(a).expect("roots lie in the root lattice");
            num *= to_q(&self.pair_with_root(&shifted, &r));
            den *= to_q(&self.pair_with_root(&rho, &r));
        }
        let d = num / den;
        debug_assert!(d.is_integer());
        d.to_integer().to_u128().expect("dimension fits in u128")
    }
}

fn is_connected(m: &[Vec<i64>]) -> bool {
    let n = m.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if !seen[j] && m[i][j] != 0 {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Fraction-free Gaussian elimination.
fn bareiss_det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn check_principal_minors(m: &[Vec<i64>]) -> Result<()> {
    let n = m.len();
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << n))
        .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    for rows in subsets {
        let sub: Vec<Vec<i64>> = rows
            .iter()
            .map(|&i| rows.iter().map(|&j| m[i][j]).collect())
            .collect();
        let d = bareiss_det(&sub);
        if d <= 0 {
            return Err(Error::NotFiniteType {
                rows: rows.iter().map(|i| i + 1).collect(),
                value: d,
            });
        }
    }
    Ok(())
}

fn invert(m: &[Vec<i64>]) -> Result<Vec<Vec<Frac>>> {
    let n = m.len();
    let mut a: Vec<Vec<Frac>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<Frac> = r.iter().map(|&x| int(x)).collect();
            row.extend((0..n).map(|j| if i == j { Frac::one() } else { Frac::zero() }));
            row
        })
        .collect();
    for k in 0..n {
        let p = (k..n)
            .find(|&r| !a[r][k].is_zero())
            .ok_or_else(|| Error::InvalidCartan("singular matrix".into()))?;
        a.swap(k, p);
        let piv = a[k][k];
        for x in a[k].iter_mut() {
            *x /= piv;
        }
        for r in 0..n {
            if r != k && !a[r][k].is_zero() {
                let f = a[r][k];
                for c in 0..2 * n {
                    let delta = f * a[k][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn symmetrize(m: &[Vec<i64>]) -> Result<Vec<Frac>> {
    let n = m.len();
    let mut d: Vec<Option<Frac>> = vec![None; n];
    d[0] = Some(Frac::one());
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let di = d[i].unwrap();
        for j in 0..n {
            if j != i && m[i][j] != 0 && d[j].is_none() {
                // a_ij d_j = a_ji d_i
                d[j] = Some(di * int(m[j][i]) / int(m[i][j]));
                queue.push_back(j);
            }
        }
    }
    let d: Vec<Frac> = d.into_iter().map(|x| x.unwrap()).collect();
    for i in 0..n {
        for j in 0..n {
            if int(m[i][j]) * d[j] != int(m[j][i]) * d[i] {
                return Err(Error::InvalidCartan("matrix is not symmetrizable".into()));
            }
        }
    }
    // normalise so the short roots have d = 1
    let min = d.iter().copied().min().unwrap();
    Ok(d.into_iter().map(|x| x / min).collect())
}

/// All positive roots, by closure of the simple roots under simple
/// reflections. Sorted by height, then by root coordinates.
pub fn positive_roots(datum: &CartanDatum) -> Vec<Weight> {
    let n = datum.rank();
    let mut seen: HashSet<Weight> = HashSet::new();
    let mut queue: VecDeque<Weight> = VecDeque::new();
    for i in 0..n {
        let a = datum.simple_root(i);
        seen.insert(a.clone());
        queue.push_back(a);
    }
    while let Some(b) = queue.pop_front() {
        for i in 0..n {
            let c = datum.reflect_weight(i, &b);
            if seen.insert(c.clone()) {
                queue.push_back(c);
            }
        }
    }
    let mut pos: Vec<(i64, Vec<i64>, Weight)> = seen
        .into_iter()
        .filter_map(|w| {
            let r = datum.root_coords_int(&w)?;
            r.iter().all(|&c| c >= 0).then(|| (r.iter().sum(), r, w))
        })
        .collect();
    pos.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    pos.into_iter().map(|(_, _, w)| w).collect()
}

#[derive(Clone, Debug)]
pub struct WeylElement {
    /// Row-major `n x n` integer matrix acting on fundamental-weight
    /// coordinates (column vectors).
    pub matrix: Vec<i64>,
    /// Reduced word `[i1, ..., ir]` with `w = s_i1 ... s_ir`.
    pub word: Vec<usize>,
    pub sign: i8,
}

impl WeylElement {
    pub fn length(&self) -> usize {
        self.word.len()
    }
}

#[derive(Clone, Debug)]
pub struct WeylGroup {
    rank: usize,
    elements: Vec<WeylElement>,
    index: HashMap<Vec<i64>, usize>,
}

impl WeylGroup {
    pub fn generate(datum: &CartanDatum) -> Result<Self> {
        Self::generate_with_budget(datum, DEFAULT_WEYL_BUDGET)
    }

    /// Breadth-first closure under right multiplication by simple
    /// reflections; the BFS depth is the length.
    pub fn generate_with_budget(datum: &CartanDatum, budget: usize) -> Result<Self> {
        let n = datum.rank();
        let gens: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut s = identity(n);
                for j in 0..n {
                    s[j * n + i] -= datum.matrix[i][j];
                }
                s
            })
            .collect();
        let id = identity(n);
        let mut elements = vec![WeylElement {
            matrix: id.clone(),
            word: vec![],
            sign: 1,
        }];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut head = 0;
        while head < elements.len() {
            for (i, g) in gens.iter().enumerate() {
                let m = mat_mul(&elements[head].matrix, g, n);
                if !index.contains_key(&m) {
                    if elements.len() >= budget {
                        return Err(Error::Budget {
                            what: "Weyl group",
                            limit: budget,
                            reached: elements.len(),
                        });
                    }
                    let mut word = elements[head].word.clone();
                    word.push(i);
                    let sign = if word.len() % 2 == 0 { 1 } else { -1 };
                    index.insert(m.clone(), elements.len());
                    elements.push(WeylElement { matrix: m, word, sign });
                }
            }
            head += 1;
        }
        Ok(WeylGroup {
            rank: n,
            elements,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn elements(&self) -> &[WeylElement] {
        &self.elements
    }

    pub fn element(&self, w: usize) -> &WeylElement {
        &self.elements[w]
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn sign(&self, w: usize) -> i8 {
        self.elements[w].sign
    }

    pub fn find(&self, matrix: &[i64]) -> Option<usize> {
        self.index.get(matrix).copied()
    }

    pub fn simple_reflection(&self, i: usize) -> usize {
        self.elements
            .iter()
            .position(|e| e.word == [i])
            .expect("simple reflections are generated at depth one")
    }

    pub fn compose(&self, a: usize, b: usize) -> usize {
        let m = mat_mul(&self.elements[a].matrix, &self.elements[b].matrix, self.rank);
        self.index[&m]
    }

    pub fn inverse(&self, w: usize) -> usize {
        let n = self.rank;
        let mut m = identity(n);
        for &i in self.elements[w].word.iter().rev() {
            let s = &self.elements[self.simple_reflection(i)].matrix;
            m = mat_mul(&m, s, n);
        }
        self.index[&m]
    }

    pub fn longest(&self) -> usize {
        (0..self.len())
            .max_by_key(|&w| self.elements[w].length())
            .unwrap()
    }

    pub fn act(&self, w: usize, beta: &Weight) -> Weight {
        let n = self.rank;
        let m = &self.elements[w].matrix;
        Weight(
            (0..n)
                .map(|r| (0..n).map(|c| m[r * n + c] * beta.0[c]).sum())
                .collect(),
        )
    }

    pub fn act_frac(&self, w: usize, v: &[Frac]) -> Vec<Frac> {
        let n = self.rank;
        let m = &self.elements[w].matrix;
        (0..n)
            .map(|r| (0..n).map(|c| int(m[r * n + c]) * v[c]).sum())
            .collect()
    }

    pub fn act_q(&self, w: usize, v: &[Q]) -> Vec<Q> {
        let n = self.rank;
        let m = &self.elements[w].matrix;
        (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| Q::from_integer(m[r * n + c].into()) * &v[c])
                    .sum()
            })
            .collect()
    }
}

fn identity(n: usize) -> Vec<i64> {
    let mut m = vec![0; n * n];
    for i in 0..n {
        m[i * n + i] = 1;
    }
    m
}

fn mat_mul(a: &[i64], b: &[i64], n: usize) -> Vec<i64> {
    let mut c = vec![0; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x != 0 {
                for j in 0..n {
                    c[i * n + j] += x * b[k * n + j];
                }
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn c2() -> CartanDatum {
        CartanDatum::from_label("C2").unwrap()
    }

    #[test]
    fn c2_matrix_and_realization() {
        let d = c2();
        assert_eq!(d.matrix(), &[vec![2, -1], vec![-2, 2]]);
        let amb = d.ambient().unwrap();
        assert_eq!(amb.simple_roots[0], vec![int(1), int(-1)]);
        assert_eq!(amb.simple_roots[1], vec![int(0), int(2)]);
        assert_eq!(amb.fundamental_weights[0], vec![int(1), int(0)]);
        assert_eq!(amb.fundamental_weights[1], vec![int(1), int(1)]);
        assert_eq!(d.to_ambient(&d.rho().to_frac()).unwrap(), vec![int(2), int(1)]);
        assert_eq!(d.det(), 2);
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        for label in ["A1", "A3", "B3", "C2", "C4", "D4", "G2", "F4", "E6", "E7", "E8"] {
            let d = CartanDatum::from_label(label).unwrap();
            let n = d.rank();
            for i in 0..n {
                for j in 0..n {
                    let s: Frac = (0..n).map(|k| d.inverse()[i][k] * int(d.matrix()[k][j])).sum();
                    assert_eq!(s, if i == j { Frac::one() } else { Frac::zero() }, "{label}");
                }
            }
        }
    }

    #[test]
    fn a1_root_is_twice_fundamental_weight() {
        let d = CartanDatum::from_label("A1").unwrap();
        assert_eq!(d.matrix(), &[vec![2]]);
        assert_eq!(d.root_coords(&Weight(vec![1])), vec![frac(1, 2)]);
    }

    #[test]
    fn affine_a1_is_rejected() {
        let err = CartanDatum::from_matrix(vec![vec![2, -2], vec![-2, 2]]).unwrap_err();
        match err {
            Error::NotFiniteType { rows, value } => {
                assert_eq!(rows, vec![1, 2]);
                assert_eq!(value, 0);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn malformed_matrices_are_rejected() {
        assert!(matches!(
            CartanDatum::from_matrix(vec![vec![2, -1]]),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            CartanDatum::from_json("[[2, -1], [-1, \"x\"]]"),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            CartanDatum::from_matrix(vec![vec![2, 0], vec![-1, 2]]),
            Err(Error::InvalidCartan(_))
        ));
        assert!(matches!(
            CartanDatum::from_matrix(vec![vec![2, 0], vec![0, 2]]),
            Err(Error::InvalidCartan(_))
        ));
        assert!(matches!(
            CartanDatum::from_label("Q3"),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            CartanDatum::from_label_with_limit("A9", 8),
            Err(Error::RankLimit { .. })
        ));
        // hyperbolic rank 2
        assert!(matches!(
            CartanDatum::from_matrix(vec![vec![2, -3], vec![-3, 2]]),
            Err(Error::NotFiniteType { .. })
        ));
    }

    #[test]
    fn json_matrix_matches_label() {
        let d = CartanDatum::from_json("[[2,-1],[-2,2]]").unwrap();
        assert_eq!(d.matrix(), c2().matrix());
        assert!(d.ambient().is_none());
    }

    #[test]
    fn positive_roots_of_small_types() {
        let d = c2();
        let roots = d.positive_roots();
        let coords: Vec<Vec<i64>> = roots.iter().map(|r| d.root_coords_int(r).unwrap()).collect();
        assert_eq!(coords, vec![vec![0, 1], vec![1, 0], vec![1, 1], vec![2, 1]]);
        let amb: Vec<Vec<Frac>> = roots
            .iter()
            .map(|r| d.to_ambient(&r.to_frac()).unwrap())
            .collect();
        assert_eq!(
            amb,
            vec![
                vec![int(0), int(2)],
                vec![int(1), int(-1)],
                vec![int(1), int(1)],
                vec![int(2), int(0)]
            ]
        );
        assert_eq!(CartanDatum::from_label("A1").unwrap().positive_roots().len(), 1);
        let counts = [("A2", 3), ("A4", 10), ("B3", 9), ("C3", 9), ("D4", 12), ("G2", 6), ("F4", 24), ("E6", 36), ("E7", 63), ("E8", 120)];
        for (label, n) in counts {
            assert_eq!(CartanDatum::from_label(label).unwrap().positive_roots().len(), n, "{label}");
        }
    }

    #[test]
    fn a2_roots_by_brute_force_closure() {
        // oracle: close {alpha_1, alpha_2} under reflections written out in
        // root coordinates by hand, s_i(b) = b - <b, alpha_i^vee> alpha_i
        let d = CartanDatum::from_label("A2").unwrap();
        let cartan = [[2i64, -1], [-1, 2]];
        let mut set = vec![[1i64, 0], [0, 1]];
        loop {
            let mut grew = false;
            for b in set.clone() {
                for i in 0..2 {
                    let pairing: i64 = (0..2).map(|k| b[k] * cartan[k][i]).sum();
                    let mut c = b;
                    c[i] -= pairing;
                    if !set.contains(&c) {
                        set.push(c);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let mut pos: Vec<Vec<i64>> = set
            .into_iter()
            .filter(|b| b.iter().all(|&x| x >= 0))
            .map(|b| b.to_vec())
            .collect();
        pos.sort_by_key(|b| (b.iter().sum::<i64>(), b.clone()));
        let ours: Vec<Vec<i64>> = d
            .positive_roots()
            .iter()
            .map(|r| d.root_coords_int(r).unwrap())
            .collect();
        assert_eq!(ours, pos);
    }

    #[test]
    fn weyl_group_orders_and_signs() {
        let orders = [("A1", 2), ("A2", 6), ("A3", 24), ("B3", 48), ("C2", 8), ("G2", 12), ("D4", 192), ("F4", 1152)];
        for (label, n) in orders {
            let d = CartanDatum::from_label(label).unwrap();
            let w = WeylGroup::generate(&d).unwrap();
            assert_eq!(w.len(), n, "{label}");
            assert_eq!(w.sign(w.identity()), 1);
            let odd = w.elements().iter().filter(|e| e.sign == -1).count();
            assert_eq!(odd, n / 2, "{label}");
        }
        let d = CartanDatum::from_label("A1").unwrap();
        let w = WeylGroup::generate(&d).unwrap();
        let s = w.simple_reflection(0);
        assert_eq!(w.sign(s), -1);
    }

    #[test]
    fn weyl_budget_is_enforced() {
        let d = CartanDatum::from_label("E8").unwrap();
        assert!(matches!(
            WeylGroup::generate_with_budget(&d, 1000),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn sign_is_a_homomorphism_and_reflections_are_involutions() {
        let d = CartanDatum::from_label("B3").unwrap();
        let w = WeylGroup::generate(&d).unwrap();
        for a in 0..w.len() {
            for b in 0..w.len() {
                let c = w.compose(a, b);
                assert_eq!(w.sign(c), w.sign(a) * w.sign(b));
            }
            assert_eq!(w.compose(a, w.inverse(a)), w.identity());
        }
        for i in 0..d.rank() {
            let s = w.simple_reflection(i);
            assert_eq!(w.compose(s, s), w.identity());
        }
    }

    #[test]
    fn longest_element_of_c2_is_minus_identity() {
        let d = c2();
        let w = WeylGroup::generate(&d).unwrap();
        let w0 = w.longest();
        assert_eq!(w.element(w0).length(), 4);
        assert_eq!(w.act(w0, &Weight(vec![3, 5])), Weight(vec![-3, -5]));
    }

    #[test]
    fn simple_reflection_examples() {
        let d = c2();
        let w = WeylGroup::generate(&d).unwrap();
        let s1 = w.simple_reflection(0);
        let s2 = w.simple_reflection(1);
        // s1(omega_1) = omega_1 - alpha_1 = e2 = -omega_1 + omega_2
        assert_eq!(w.act(s1, &Weight(vec![1, 0])), Weight(vec![-1, 1]));
        assert_eq!(w.act(s2, &d.simple_root(1)), -&d.simple_root(1));
        for e in 0..w.len() {
            assert_eq!(w.act(e, &Weight::zero(2)), Weight::zero(2));
        }
    }

    #[test]
    fn chamber_positions() {
        let d = c2();
        assert_eq!(chamber_position(d.rho().fw()), ChamberPosition::Interior);
        assert_eq!(chamber_position(&[0, 0]), ChamberPosition::Boundary);
        let e2 = d.from_ambient(&[int(0), int(1)]).unwrap();
        assert_eq!(e2, vec![int(-1), int(1)]);
        assert_eq!(chamber_position_frac(&e2), ChamberPosition::Outside);
    }

    #[test]
    fn rho_minus_w_rho_lies_in_positive_root_cone() {
        for label in ["A2", "C2", "G2", "B3"] {
            let d = CartanDatum::from_label(label).unwrap();
            let w = WeylGroup::generate(&d).unwrap();
            for mu in [Weight::zero(d.rank()), d.rho(), Weight::unit(d.rank(), 0).scale(3)] {
                let shifted = &mu + &d.rho();
                for e in 0..w.len() {
                    let diff = &shifted - &w.act(e, &shifted);
                    assert!(d.in_positive_root_cone(&diff), "{label} {mu} {e}");
                }
            }
        }
    }

    #[test]
    fn chamber_is_a_fundamental_domain() {
        let d = c2();
        let w = WeylGroup::generate(&d).unwrap();
        for lam in [Weight(vec![2, 1]), Weight(vec![0, 3]), Weight(vec![1, 0])] {
            let orbit: HashSet<Weight> = (0..w.len()).map(|e| w.act(e, &lam)).collect();
            let dom: Vec<_> = orbit.iter().filter(|x| x.is_dominant()).collect();
            assert_eq!(dom, vec![&lam]);
            for x in &orbit {
                assert_eq!(d.dominant_conjugate(x), lam);
            }
        }
    }

    #[test]
    fn weyl_dimension_formula_values() {
        let d = c2();
        assert_eq!(d.dim_irrep(&Weight(vec![1, 0])), 4);
        assert_eq!(d.dim_irrep(&Weight(vec![0, 1])), 5);
        assert_eq!(d.dim_irrep(&Weight(vec![2, 0])), 10);
        assert_eq!(d.dim_irrep(&Weight(vec![1, 1])), 16);
        let g2 = CartanDatum::from_label("G2").unwrap();
        let dims: Vec<u128> = [vec![1, 0], vec![0, 1]].into_iter().map(|w| g2.dim_irrep(&Weight(w))).collect();
        let mut sorted = dims.clone();
        sorted.sort();
        assert_eq!(sorted, vec![7, 14]);
        let e8 = CartanDatum::from_label("E8").unwrap();
        let adj = (0..8).map(|i| e8.dim_irrep(&Weight::unit(8, i))).min().unwrap();
        assert_eq!(adj, 248);
    }

    #[test]
    fn two_coordinate_systems_agree() {
        let d = CartanDatum::from_label("B3").unwrap();
        for r in [[1, 0, 0], [0, 2, 1], [3, -1, 2]] {
            let w = d.from_root_coords(&r);
            assert_eq!(d.root_coords_int(&w).unwrap(), r.to_vec());
        }
    }
}
