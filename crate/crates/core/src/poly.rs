//! Multigraded polynomial rings, monomial orders, twisted free modules and module vectors.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, Result};
use crate::field::{FieldSpec, FieldValue};

/// A degree in `Z` or `Z^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<i64>", try_from = "Vec<i64>")]
pub struct Multidegree {
    arity: u8,
    parts: [i64; 2],
}

impl Multidegree {
    pub fn single(a: i64) -> Self {
        Multidegree { arity: 1, parts: [a, 0] }
    }

    pub fn pair(a: i64, b: i64) -> Self {
        Multidegree { arity: 2, parts: [a, b] }
    }

    pub fn zero(arity: u8) -> Self {
        Multidegree { arity, parts: [0, 0] }
    }

    pub fn from_slice(parts: &[i64]) -> Result<Self> {
        match parts {
            [a] => Ok(Self::single(*a)),
            [a, b] => Ok(Self::pair(*a, *b)),
            _ => Err(AlgebraError::InvalidArgument(format!(
                "multidegrees have one or two components, got {}",
                parts.len()
            ))),
        }
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn parts(&self) -> &[i64] {
        &self.parts[..self.arity as usize]
    }

    pub fn first(&self) -> i64 {
        self.parts[0]
    }

    pub fn second(&self) -> i64 {
        self.parts[1]
    }

    /// Total weight (sum of the components). Positive for every variable of a valid ring.
    pub fn weight(&self) -> i64 {
        self.parts[0] + self.parts[1]
    }

    pub fn scaled(&self, k: i64) -> Self {
        Multidegree { arity: self.arity, parts: [self.parts[0] * k, self.parts[1] * k] }
    }
}

impl std::ops::Add for Multidegree {
    type Output = Multidegree;
    fn add(self, o: Multidegree) -> Multidegree {
        debug_assert_eq!(self.arity, o.arity);
        Multidegree { arity: self.arity, parts: [self.parts[0] + o.parts[0], self.parts[1] + o.parts[1]] }
    }
}

impl std::ops::Sub for Multidegree {
    type Output = Multidegree;
    fn sub(self, o: Multidegree) -> Multidegree {
        debug_assert_eq!(self.arity, o.arity);
        Multidegree { arity: self.arity, parts: [self.parts[0] - o.parts[0], self.parts[1] - o.parts[1]] }
    }
}

impl From<Multidegree> for Vec<i64> {
    fn from(d: Multidegree) -> Vec<i64> {
        d.parts().to_vec()
    }
}

impl TryFrom<Vec<i64>> for Multidegree {
    type Error = AlgebraError;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        Multidegree::from_slice(&v)
    }
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.arity {
            1 => write!(f, "{}", self.parts[0]),
            _ => write!(f, "({},{})", self.parts[0], self.parts[1]),
        }
    }
}

/// Exponent vector. The derived `Ord` is plain lexicographic and only used for storage.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(e: Vec<u32>) -> Self {
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    /// Product. Exponents are 32-bit; overflow aborts the computation.
    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&o.0)
                .map(|(a, b)| a.checked_add(*b).expect("monomial exponent overflow"))
                .collect(),
        )
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    /// `o / self`, if `self` divides `o`.
    pub fn quotient_of(&self, o: &Monomial) -> Option<Monomial> {
        if self.divides(o) {
            Some(Monomial(o.0.iter().zip(&self.0).map(|(b, a)| b - a).collect()))
        } else {
            None
        }
    }

    pub fn lcm(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, o: &Monomial) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn pow(&self, k: u32) -> Monomial {
        Monomial(self.0.iter().map(|&e| e.checked_mul(k).expect("monomial exponent overflow")).collect())
    }
}

/// Monomial order on the ring, extended to free modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderKind {
    DegRevLex,
    Lex,
    /// Elimination order for the first `k` variables: weighted degrevlex on the first block,
    /// ties broken by weighted degrevlex on the remaining variables.
    BlockElimination(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleOrderKind {
    PositionOverTerm,
    TermOverPosition,
    Schreyer(Arc<SchreyerData>),
}

/// Data inducing a Schreyer order on a free module `F_1` from the leading terms of the images
/// of its basis in `F_0`: `m e_k > n e_l` iff `m lt(g_k) > n lt(g_l)` in `F_0`, ties broken by
/// the smaller index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchreyerData {
    pub leads: Vec<(Monomial, usize)>,
    pub base: MonomialOrder,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub module: ModuleOrderKind,
}

impl Default for MonomialOrder {
    fn default() -> Self {
        MonomialOrder { kind: OrderKind::DegRevLex, module: ModuleOrderKind::PositionOverTerm }
    }
}

fn weighted_degree(w: &[i64], e: &[u32]) -> i64 {
    w.iter().zip(e).map(|(w, e)| w * *e as i64).sum()
}

/// Weighted degree first, then reverse lexicographic: the monomial with the smaller exponent
/// in the last differing variable is larger.
fn degrevlex(w: &[i64], a: &[u32], b: &[u32]) -> Ordering {
    let da = weighted_degree(w, a);
    let db = weighted_degree(w, b);
    if da != db {
        return da.cmp(&db);
    }
    for i in (0..a.len()).rev() {
        if a[i] != b[i] {
            return b[i].cmp(&a[i]);
        }
    }
    Ordering::Equal
}

impl MonomialOrder {
    pub fn degrevlex() -> Self {
        Self::default()
    }

    pub fn lex() -> Self {
        MonomialOrder { kind: OrderKind::Lex, module: ModuleOrderKind::PositionOverTerm }
    }

    pub fn elimination(k: usize) -> Self {
        MonomialOrder { kind: OrderKind::BlockElimination(k), module: ModuleOrderKind::PositionOverTerm }
    }

    pub fn with_module(mut self, module: ModuleOrderKind) -> Self {
        self.module = module;
        self
    }

    pub fn describe(&self) -> String {
        let kind = match &self.kind {
            OrderKind::DegRevLex => "degrevlex".to_string(),
            OrderKind::Lex => "lex".to_string(),
            OrderKind::BlockElimination(k) => format!("elimination({k})"),
        };
        let module = match &self.module {
            ModuleOrderKind::PositionOverTerm => "pot",
            ModuleOrderKind::TermOverPosition => "top",
            ModuleOrderKind::Schreyer(_) => "schreyer",
        };
        format!("{kind}/{module}")
    }

    /// Compares monomials; `weights` are the variable weights of the ring.
    pub fn cmp_monomials(&self, weights: &[i64], a: &Monomial, b: &Monomial) -> Ordering {
        let (a, b) = (&a.0[..], &b.0[..]);
        match self.kind {
            OrderKind::DegRevLex => degrevlex(weights, a, b),
            OrderKind::Lex => a.cmp(b),
            OrderKind::BlockElimination(k) => degrevlex(&weights[..k], &a[..k], &b[..k])
                .then_with(|| degrevlex(&weights[k..], &a[k..], &b[k..])),
        }
    }

    /// Compares module terms `a e_i` and `b e_j`.
    pub fn cmp_terms(&self, weights: &[i64], a: &Monomial, i: usize, b: &Monomial, j: usize) -> Ordering {
        match &self.module {
            ModuleOrderKind::PositionOverTerm => {
                j.cmp(&i).then_with(|| self.cmp_monomials(weights, a, b))
            }
            ModuleOrderKind::TermOverPosition => {
                self.cmp_monomials(weights, a, b).then_with(|| j.cmp(&i))
            }
            ModuleOrderKind::Schreyer(data) => {
                let (la, ca) = &data.leads[i];
                let (lb, cb) = &data.leads[j];
                data.base
                    .cmp_terms(weights, &a.mul(la), *ca, &b.mul(lb), *cb)
                    .then_with(|| j.cmp(&i))
            }
        }
    }
}

/// A polynomial: finite map from monomials to nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, FieldValue>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn monomial(c: FieldValue, m: Monomial) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, FieldValue)>) -> Self {
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Polynomial { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldValue)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&FieldValue> {
        self.terms.get(m)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn max_total_degree(&self) -> Option<u64> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// Variables occurring with positive exponent.
    pub fn support_vars(&self) -> Vec<usize> {
        let mut used = vec![false; self.nvars];
        for m in self.terms.keys() {
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    used[i] = true;
                }
            }
        }
        (0..self.nvars).filter(|&i| used[i]).collect()
    }
}

/// A graded free module `⊕ S(-a_k)`: basis element `e_k` has degree `twists[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeModuleSpec {
    pub twists: Vec<Multidegree>,
}

impl FreeModuleSpec {
    pub fn new(twists: Vec<Multidegree>) -> Self {
        FreeModuleSpec { twists }
    }

    pub fn ring(arity: u8) -> Self {
        FreeModuleSpec { twists: vec![Multidegree::zero(arity)] }
    }

    pub fn rank(&self) -> usize {
        self.twists.len()
    }

    /// `F(a)`: every basis degree moves down by `a`.
    pub fn shifted(&self, a: Multidegree) -> Self {
        FreeModuleSpec { twists: self.twists.iter().map(|t| *t - a).collect() }
    }
}

/// Element of a free module, one polynomial per basis element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleVector {
    pub entries: Vec<Polynomial>,
}

impl ModuleVector {
    pub fn new(entries: Vec<Polynomial>) -> Self {
        ModuleVector { entries }
    }

    pub fn zero(rank: usize, nvars: usize) -> Self {
        ModuleVector { entries: vec![Polynomial::zero(nvars); rank] }
    }

    pub fn from_poly(f: Polynomial) -> Self {
        ModuleVector { entries: vec![f] }
    }

    /// `c * m * e_k`.
    pub fn term(rank: usize, k: usize, c: FieldValue, m: Monomial) -> Self {
        let nvars = m.nvars();
        let mut v = Self::zero(rank, nvars);
        v.entries[k] = Polynomial::monomial(c, m);
        v
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    /// All terms `(monomial, basis index, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, usize, &FieldValue)> {
        self.entries.iter().enumerate().flat_map(|(k, p)| p.terms().map(move |(m, c)| (m, k, c)))
    }

    pub fn nterms(&self) -> usize {
        self.entries.iter().map(|p| p.len()).sum()
    }
}

/// A polynomial ring over a field with a positive `Z`- or `Z^2`-grading.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingSpec {
    field: FieldSpec,
    names: Vec<String>,
    degrees: Vec<Multidegree>,
    weights: Vec<i64>,
    arity: u8,
}

impl RingSpec {
    pub fn new(field: FieldSpec, vars: Vec<(String, Multidegree)>) -> Result<Self> {
        if vars.is_empty() {
            return Err(AlgebraError::InvalidRing("a ring needs at least one variable".into()));
        }
        let arity = vars[0].1.arity();
        let mut names: Vec<String> = Vec::with_capacity(vars.len());
        for (name, d) in &vars {
            if d.arity() != arity {
                return Err(AlgebraError::InvalidRing(format!("variable {name} has grading arity {}, expected {arity}", d.arity())));
            }
            if d.parts().iter().any(|&p| p < 0) || d.weight() <= 0 {
                return Err(AlgebraError::InvalidRing(format!("variable {name} has non-positive degree {d}")));
            }
            if names.contains(name) {
                return Err(AlgebraError::InvalidRing(format!("duplicate variable {name}")));
            }
            names.push(name.clone());
        }
        let degrees: Vec<Multidegree> = vars.iter().map(|(_, d)| *d).collect();
        let weights = degrees.iter().map(|d| d.weight()).collect();
        Ok(RingSpec { field, names, degrees, weights, arity })
    }

    /// Standard graded ring, every variable of degree 1.
    pub fn standard(field: FieldSpec, names: &[&str]) -> Self {
        let vars = names.iter().map(|n| (n.to_string(), Multidegree::single(1))).collect();
        Self::new(field, vars).expect("valid standard ring")
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn var_degree(&self, i: usize) -> Multidegree {
        self.degrees[i]
    }

    pub fn var_degrees(&self) -> &[Multidegree] {
        &self.degrees
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Z-graded with every variable in degree 1.
    pub fn is_standard(&self) -> bool {
        self.arity == 1 && self.degrees.iter().all(|d| d.first() == 1)
    }

    pub fn with_field(&self, field: FieldSpec) -> RingSpec {
        RingSpec { field, ..self.clone() }
    }

    pub fn zero_degree(&self) -> Multidegree {
        Multidegree::zero(self.arity)
    }

    pub fn default_order(&self) -> MonomialOrder {
        MonomialOrder::default()
    }

    pub fn monomial_degree(&self, m: &Monomial) -> Multidegree {
        let mut d = self.zero_degree();
        for (e, vd) in m.exponents().iter().zip(&self.degrees) {
            d = d + vd.scaled(*e as i64);
        }
        d
    }

    pub fn monomial_weight(&self, m: &Monomial) -> i64 {
        weighted_degree(&self.weights, m.exponents())
    }

    /// All monomials of multidegree `d`, sorted decreasingly in the default order.
    pub fn monomials_of_degree(&self, d: Multidegree) -> Vec<Monomial> {
        let mut out = Vec::new();
        if d.arity() != self.arity || d.parts().iter().any(|&p| p < 0) {
            return out;
        }
        let mut exps = vec![0u32; self.nvars()];
        self.enumerate(0, d, &mut exps, &mut out);
        let order = self.default_order();
        out.sort_by(|a, b| order.cmp_monomials(&self.weights, b, a));
        out
    }

    fn enumerate(&self, i: usize, rest: Multidegree, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == self.nvars() {
            if rest.parts().iter().all(|&p| p == 0) {
                out.push(Monomial(exps.clone()));
            }
            return;
        }
        let vd = self.degrees[i];
        let mut e = 0u32;
        let mut r = rest;
        loop {
            exps[i] = e;
            self.enumerate(i + 1, r, exps, out);
            r = r - vd;
            if r.parts().iter().any(|&p| p < 0) {
                break;
            }
            e += 1;
        }
        exps[i] = 0;
    }

    fn check(&self, f: &Polynomial) -> Result<()> {
        if f.nvars != self.nvars() {
            return Err(AlgebraError::RingMismatch);
        }
        if f.terms.values().any(|c| !self.field.contains(c)) {
            return Err(AlgebraError::FieldMismatch);
        }
        Ok(())
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial::zero(self.nvars())
    }

    pub fn one(&self) -> Polynomial {
        self.constant(self.field.one())
    }

    pub fn constant(&self, c: FieldValue) -> Polynomial {
        Polynomial::monomial(c, Monomial::one(self.nvars()))
    }

    pub fn var(&self, i: usize) -> Polynomial {
        Polynomial::monomial(self.field.one(), Monomial::var(self.nvars(), i))
    }

    pub fn add(&self, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
        self.check(f)?;
        self.check(g)?;
        let mut terms = f.terms.clone();
        for (m, c) in &g.terms {
            add_term(&self.field, &mut terms, m.clone(), c);
        }
        Ok(Polynomial { nvars: f.nvars, terms })
    }

    pub fn neg(&self, f: &Polynomial) -> Polynomial {
        Polynomial { nvars: f.nvars, terms: f.terms.iter().map(|(m, c)| (m.clone(), self.field.neg(c))).collect() }
    }

    pub fn sub(&self, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
        self.check(g)?;
        self.add(f, &self.neg(g))
    }

    pub fn scale(&self, f: &Polynomial, c: &FieldValue) -> Result<Polynomial> {
        self.check(f)?;
        if !self.field.contains(c) {
            return Err(AlgebraError::FieldMismatch);
        }
        if c.is_zero() {
            return Ok(self.zero());
        }
        Ok(Polynomial { nvars: f.nvars, terms: f.terms.iter().map(|(m, a)| (m.clone(), self.field.mul(a, c))).collect() })
    }

    pub fn mul(&self, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
        self.check(f)?;
        self.check(g)?;
        let mut terms = BTreeMap::new();
        for (m1, c1) in &f.terms {
            for (m2, c2) in &g.terms {
                add_term(&self.field, &mut terms, m1.mul(m2), &self.field.mul(c1, c2));
            }
        }
        Ok(Polynomial { nvars: f.nvars, terms })
    }

    pub fn mul_term(&self, f: &Polynomial, c: &FieldValue, m: &Monomial) -> Polynomial {
        if c.is_zero() {
            return self.zero();
        }
        Polynomial {
            nvars: f.nvars,
            terms: f.terms.iter().map(|(a, x)| (a.mul(m), self.field.mul(x, c))).collect(),
        }
    }

    pub fn pow(&self, f: &Polynomial, k: u32) -> Result<Polynomial> {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul(&acc, f)?;
        }
        Ok(acc)
    }

    /// Multidegree of a nonzero homogeneous polynomial, `None` when inhomogeneous.
    pub fn homogeneous_degree(&self, f: &Polynomial) -> Result<Option<Multidegree>> {
        let mut it = f.terms.keys();
        let first = it.next().ok_or(AlgebraError::ZeroVector)?;
        let d = self.monomial_degree(first);
        Ok(it.all(|m| self.monomial_degree(m) == d).then_some(d))
    }

    /// Leading term under `order`.
    pub fn leading_term<'a>(&self, f: &'a Polynomial, order: &MonomialOrder) -> Option<(&'a Monomial, &'a FieldValue)> {
        f.terms.iter().max_by(|a, b| order.cmp_monomials(&self.weights, a.0, b.0))
    }

    /// Over QQ: clear denominators and content so the coefficients are coprime integers with a
    /// positive leading coefficient. Over F_p: make monic.
    pub fn primitive(&self, f: &Polynomial) -> Polynomial {
        let Some((_, lc)) = self.leading_term(f, &self.default_order()) else {
            return f.clone();
        };
        match self.field {
            FieldSpec::Prime(_) => {
                let inv = self.field.inverse(lc).expect("nonzero leading coefficient");
                self.scale(f, &inv).expect("same ring")
            }
            FieldSpec::Rationals => {
                let mut den = BigInt::one();
                let mut num = BigInt::zero();
                for c in f.terms.values() {
                    if let FieldValue::Rational(q) = c {
                        den = den.lcm(q.denom());
                        num = num.gcd(q.numer());
                    }
                }
                let mut factor = BigRational::new(den, num);
                if lc.is_negative() {
                    factor = -factor;
                }
                self.scale(f, &FieldValue::Rational(factor)).expect("same ring")
            }
        }
    }

    /// Evaluates `f` with variable `i` replaced by `images[i]` (an algebra map into `target`).
    pub fn substitute(&self, f: &Polynomial, target: &RingSpec, images: &[Polynomial]) -> Result<Polynomial> {
        self.check(f)?;
        if images.len() != self.nvars() {
            return Err(AlgebraError::RingMismatch);
        }
        let mut acc = target.zero();
        for (m, c) in &f.terms {
            let mut t = target.constant(c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = target.mul(&t, &target.pow(&images[i], e)?)?;
                }
            }
            acc = target.add(&acc, &t)?;
        }
        Ok(acc)
    }

    /// Multidegree of a nonzero vector of `F`, `None` when inhomogeneous.
    pub fn vector_degree(&self, v: &ModuleVector, f: &FreeModuleSpec) -> Result<Option<Multidegree>> {
        if v.rank() != f.rank() {
            return Err(AlgebraError::RingMismatch);
        }
        let mut deg: Option<Multidegree> = None;
        for (k, p) in v.entries.iter().enumerate() {
            self.check(p)?;
            for m in p.terms.keys() {
                let d = self.monomial_degree(m) + f.twists[k];
                match deg {
                    None => deg = Some(d),
                    Some(e) if e != d => return Ok(None),
                    _ => {}
                }
            }
        }
        match deg {
            None => Err(AlgebraError::ZeroVector),
            Some(d) => Ok(Some(d)),
        }
    }

    pub fn vec_add(&self, a: &ModuleVector, b: &ModuleVector) -> Result<ModuleVector> {
        if a.rank() != b.rank() {
            return Err(AlgebraError::RingMismatch);
        }
        let entries = a.entries.iter().zip(&b.entries).map(|(x, y)| self.add(x, y)).collect::<Result<_>>()?;
        Ok(ModuleVector { entries })
    }

    pub fn vec_scale_poly(&self, f: &Polynomial, v: &ModuleVector) -> Result<ModuleVector> {
        let entries = v.entries.iter().map(|x| self.mul(f, x)).collect::<Result<_>>()?;
        Ok(ModuleVector { entries })
    }

    /// `Σ coeffs[k] * vectors[k]`.
    pub fn combine(&self, coeffs: &ModuleVector, vectors: &[ModuleVector], rank: usize) -> Result<ModuleVector> {
        if coeffs.rank() != vectors.len() {
            return Err(AlgebraError::RingMismatch);
        }
        let mut acc = ModuleVector::zero(rank, self.nvars());
        for (c, v) in coeffs.entries.iter().zip(vectors) {
            if !c.is_zero() {
                acc = self.vec_add(&acc, &self.vec_scale_poly(c, v)?)?;
            }
        }
        Ok(acc)
    }

    pub fn render_monomial(&self, m: &Monomial) -> String {
        let parts: Vec<String> = m
            .exponents()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { self.names[i].clone() } else { format!("{}^{}", self.names[i], e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Canonical text: terms in decreasing default order, coefficients as `a/b` or residues.
    pub fn render(&self, f: &Polynomial) -> String {
        if f.is_zero() {
            return "0".into();
        }
        let order = self.default_order();
        let mut terms: Vec<_> = f.terms.iter().collect();
        terms.sort_by(|a, b| order.cmp_monomials(&self.weights, b.0, a.0));
        let mut out = String::new();
        for (idx, (m, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            if m.is_one() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&self.render_monomial(m));
            } else {
                out.push_str(&format!("{}*{}", a, self.render_monomial(m)));
            }
        }
        out
    }

    pub fn render_vector(&self, v: &ModuleVector) -> String {
        let entries: Vec<String> = v.entries.iter().map(|p| self.render(p)).collect();
        format!("[{}]", entries.join(", "))
    }
}

fn add_term(field: &FieldSpec, terms: &mut BTreeMap<Monomial, FieldValue>, m: Monomial, c: &FieldValue) {
    use std::collections::btree_map::Entry;
    match terms.entry(m) {
        Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c.clone());
            }
        }
        Entry::Occupied(mut e) => {
            let s = field.add(e.get(), c);
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

/// Compares `a e_i` with `b e_j` after checking both live over `ring`.
pub fn monomial_compare(
    ring: &RingSpec,
    order: &MonomialOrder,
    a: (&Monomial, usize),
    b: (&Monomial, usize),
) -> Result<Ordering> {
    if a.0.nvars() != ring.nvars() || b.0.nvars() != ring.nvars() {
        return Err(AlgebraError::RingMismatch);
    }
    if let ModuleOrderKind::Schreyer(data) = &order.module {
        if a.1 >= data.leads.len() || b.1 >= data.leads.len() {
            return Err(AlgebraError::RingMismatch);
        }
    }
    Ok(order.cmp_terms(ring.weights(), a.0, a.1, b.0, b.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn qq2() -> RingSpec {
        RingSpec::standard(FieldSpec::Rationals, &["x", "y"])
    }

    fn mono(e: &[u32]) -> Monomial {
        Monomial::from_exponents(e.to_vec())
    }

    #[test]
    fn degrevlex_and_lex_examples() {
        let r = qq2();
        let o = MonomialOrder::degrevlex();
        assert_eq!(monomial_compare(&r, &o, (&mono(&[2, 0]), 0), (&mono(&[1, 1]), 0)).unwrap(), Ordering::Greater);
        let lex = MonomialOrder::lex();
        assert_eq!(monomial_compare(&r, &lex, (&mono(&[0, 3]), 0), (&mono(&[1, 0]), 0)).unwrap(), Ordering::Less);
        assert_eq!(monomial_compare(&r, &o, (&mono(&[1, 2]), 1), (&mono(&[1, 2]), 1)).unwrap(), Ordering::Equal);
    }

    #[test]
    fn mismatched_ring_is_an_error() {
        let r = qq2();
        let o = MonomialOrder::degrevlex();
        assert_eq!(
            monomial_compare(&r, &o, (&mono(&[1, 0, 0]), 0), (&mono(&[1, 0]), 0)),
            Err(AlgebraError::RingMismatch)
        );
    }

    #[test]
    fn degrevlex_three_vars() {
        let r = RingSpec::standard(FieldSpec::Rationals, &["x", "y", "z"]);
        let o = MonomialOrder::degrevlex();
        // xz^2 < y^3 in degrevlex (z exponent decides)
        assert_eq!(o.cmp_monomials(r.weights(), &mono(&[1, 0, 2]), &mono(&[0, 3, 0])), Ordering::Less);
        assert_eq!(o.cmp_monomials(r.weights(), &mono(&[1, 1, 1]), &mono(&[0, 3, 0])), Ordering::Less);
    }

    #[test]
    fn arithmetic_examples() {
        let r = qq2();
        let (x, y) = (r.var(0), r.var(1));
        let p = r.mul(&r.add(&x, &y).unwrap(), &r.sub(&x, &y).unwrap()).unwrap();
        assert_eq!(r.render(&p), "x^2 - y^2");
        assert!(r.mul(&p, &r.zero()).unwrap().is_zero());

        let f2 = RingSpec::standard(FieldSpec::prime(2).unwrap(), &["x", "y"]);
        let s = f2.add(&f2.var(0), &f2.var(1)).unwrap();
        assert_eq!(f2.render(&f2.pow(&s, 2).unwrap()), "x^2 + y^2");
    }

    #[test]
    fn ring_mismatch_on_arith() {
        let r = qq2();
        let r3 = RingSpec::standard(FieldSpec::Rationals, &["x", "y", "z"]);
        assert_eq!(r.add(&r.var(0), &r3.var(0)), Err(AlgebraError::RingMismatch));
        let p = RingSpec::standard(FieldSpec::Prime(7), &["x", "y"]);
        assert_eq!(r.mul(&r.var(0), &p.one()), Err(AlgebraError::FieldMismatch));
    }

    #[test]
    fn vector_degrees() {
        let r = qq2();
        let f = FreeModuleSpec::new(vec![Multidegree::single(1); 2]);
        let v = ModuleVector::new(vec![r.var(0), r.var(1)]);
        assert_eq!(r.vector_degree(&v, &f).unwrap(), Some(Multidegree::single(2)));

        let s = FreeModuleSpec::ring(1);
        let w = ModuleVector::from_poly(r.add(&r.var(0), &r.mul(&r.var(1), &r.var(1)).unwrap()).unwrap());
        assert_eq!(r.vector_degree(&w, &s).unwrap(), None);
        assert_eq!(r.vector_degree(&ModuleVector::zero(1, 2), &s), Err(AlgebraError::ZeroVector));

        let b = RingSpec::new(
            FieldSpec::Rationals,
            vec![("x".into(), Multidegree::pair(1, 0)), ("Y".into(), Multidegree::pair(2, 1))],
        )
        .unwrap();
        let xy = ModuleVector::from_poly(b.mul(&b.var(0), &b.var(1)).unwrap());
        assert_eq!(b.vector_degree(&xy, &FreeModuleSpec::ring(2)).unwrap(), Some(Multidegree::pair(3, 1)));
    }

    #[test]
    fn invalid_rings() {
        let k = FieldSpec::Rationals;
        assert!(RingSpec::new(k, vec![("x".into(), Multidegree::pair(0, 0))]).is_err());
        assert!(RingSpec::new(k, vec![("x".into(), Multidegree::single(-1))]).is_err());
        assert!(RingSpec::new(k, vec![("x".into(), Multidegree::single(1)), ("x".into(), Multidegree::single(1))]).is_err());
        assert!(RingSpec::new(k, vec![("x".into(), Multidegree::single(1)), ("y".into(), Multidegree::pair(1, 0))]).is_err());
    }

    #[test]
    fn primitive_clears_denominators() {
        let r = qq2();
        let half = FieldValue::Rational(BigRational::new(1.into(), 2.into()));
        let third = FieldValue::Rational(BigRational::new(BigInt::from(-1), BigInt::from(3)));
        let f = r.add(&r.scale(&r.var(0), &half).unwrap(), &r.scale(&r.var(1), &third).unwrap()).unwrap();
        assert_eq!(r.render(&r.primitive(&f)), "3*x - 2*y");
    }

    fn brute_force_count(ring: &RingSpec, d: Multidegree, bound: u32) -> usize {
        let n = ring.nvars();
        let mut count = 0;
        let mut e = vec![0u32; n];
        loop {
            if ring.monomial_degree(&Monomial::from_exponents(e.clone())) == d {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == n {
                    return count;
                }
                e[i] += 1;
                if e[i] <= bound {
                    break;
                }
                e[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn enumeration_matches_box_filter() {
        let r = RingSpec::standard(FieldSpec::Rationals, &["a", "b", "c"]);
        for d in 0..6 {
            assert_eq!(r.monomials_of_degree(Multidegree::single(d)).len(), brute_force_count(&r, Multidegree::single(d), 6));
        }
        let a = RingSpec::new(
            FieldSpec::Rationals,
            vec![
                ("x".into(), Multidegree::pair(1, 0)),
                ("Y1".into(), Multidegree::pair(2, 1)),
                ("Y2".into(), Multidegree::pair(3, 1)),
            ],
        )
        .unwrap();
        for i in 0..10 {
            for v in 0..4 {
                let d = Multidegree::pair(i, v);
                assert_eq!(a.monomials_of_degree(d).len(), brute_force_count(&a, d, 10));
            }
        }
    }

    fn arb_mono(n: usize) -> impl Strategy<Value = Monomial> {
        proptest::collection::vec(0u32..4, n).prop_map(Monomial::from_exponents)
    }

    fn orders() -> Vec<MonomialOrder> {
        vec![MonomialOrder::degrevlex(), MonomialOrder::lex(), MonomialOrder::elimination(1), MonomialOrder::elimination(2)]
    }

    proptest! {
        #[test]
        fn order_axioms(a in arb_mono(3), b in arb_mono(3), c in arb_mono(3)) {
            let w = [1i64, 2, 1];
            for o in orders() {
                let ab = o.cmp_monomials(&w, &a, &b);
                prop_assert_eq!(ab, o.cmp_monomials(&w, &b, &a).reverse());
                prop_assert_eq!(ab == Ordering::Equal, a == b);
                if ab != Ordering::Greater && o.cmp_monomials(&w, &b, &c) != Ordering::Greater {
                    prop_assert!(o.cmp_monomials(&w, &a, &c) != Ordering::Greater);
                }
                prop_assert_eq!(o.cmp_monomials(&w, &a.mul(&c), &b.mul(&c)), ab);
                prop_assert!(o.cmp_monomials(&w, &Monomial::one(3), &a) != Ordering::Greater);
            }
        }

        #[test]
        fn module_order_axioms(a in arb_mono(2), b in arb_mono(2), c in arb_mono(2), i in 0usize..3, j in 0usize..3) {
            let w = [1i64, 1];
            let leads = vec![(mono(&[1, 0]), 0), (mono(&[0, 2]), 0), (mono(&[1, 1]), 1)];
            let schreyer = MonomialOrder::degrevlex().with_module(ModuleOrderKind::Schreyer(Arc::new(SchreyerData {
                leads,
                base: MonomialOrder::degrevlex(),
            })));
            for o in [MonomialOrder::degrevlex(), MonomialOrder::degrevlex().with_module(ModuleOrderKind::TermOverPosition), schreyer] {
                let ab = o.cmp_terms(&w, &a, i, &b, j);
                prop_assert_eq!(ab, o.cmp_terms(&w, &b, j, &a, i).reverse());
                prop_assert_eq!(ab == Ordering::Equal, a == b && i == j);
                prop_assert_eq!(o.cmp_terms(&w, &a.mul(&c), i, &b.mul(&c), j), ab);
                if a != Monomial::one(2) {
                    prop_assert_eq!(o.cmp_terms(&w, &Monomial::one(2), i, &a, i), Ordering::Less);
                }
            }
        }
    }
}
