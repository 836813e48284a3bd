//! Asymptotic behaviour of graded invariants along powers of an ideal.
//!
//! Two families of functions of `v` live here. Over a ring `A = K[Y_1..Y_g]` with
//! `deg Y_j = (d_j, 1)`, [`rho`] is the top first coordinate of a nonzero bigraded piece in
//! row `v`; it is eventually linear with slope among the `d_j`. Over a standard graded ring,
//! [`reg_power_sequence`] tabulates `reg(I^v M)`, and [`fit_linear_law`] reads off the
//! eventual slope and intercept.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{AlgebraError, Result};
use crate::gb::buchberger;
use crate::koszul::koszul_summary_with;
use crate::linalg::Echelon;
use crate::par::Exec;
use crate::poly::{FreeModuleSpec, ModuleVector, Monomial, MonomialOrder, Multidegree, Polynomial, RingSpec};
use crate::resolve::{betti_table, minimal_free_resolution, presentation_of, summary, PresentedModule};
use crate::slices::{FreeSlice, SubquotientModel};
use crate::ExtInt;

/// Checks that every variable has degree `(d_j, 1)` with `d_j ≥ 0`.
pub fn check_nonstandard(ring: &RingSpec) -> Result<()> {
    if ring.arity() != 2 || ring.var_degrees().iter().any(|d| d.second() != 1 || d.first() < 0) {
        return Err(AlgebraError::InvalidRing("variables must have bidegree (d, 1) with d >= 0".into()));
    }
    Ok(())
}

fn max_slope(ring: &RingSpec) -> i64 {
    ring.var_degrees().iter().map(|d| d.first()).max().unwrap_or(0)
}

fn min_slope(ring: &RingSpec) -> i64 {
    ring.var_degrees().iter().map(|d| d.first()).min().unwrap_or(0)
}

/// Scans row `v` downward from the largest reachable first coordinate.
fn rho_by_dims(ring: &RingSpec, gen_degrees: &[Multidegree], v: i64, dim: impl Fn(Multidegree) -> usize) -> ExtInt {
    let (hi_slope, lo_slope) = (max_slope(ring), min_slope(ring));
    let reachable: Vec<&Multidegree> = gen_degrees.iter().filter(|g| g.second() <= v).collect();
    let Some(hi) = reachable.iter().map(|g| g.first() + (v - g.second()) * hi_slope).max() else {
        return ExtInt::NegInf;
    };
    let lo = reachable.iter().map(|g| g.first() + (v - g.second()) * lo_slope).min().unwrap();
    (lo..=hi).rev().find(|&i| dim(Multidegree::pair(i, v)) > 0).map_or(ExtInt::NegInf, ExtInt::Finite)
}

/// `ρ_N(v) = sup { i : N_(i,v) ≠ 0 }` for `v = 0..=v_max`.
pub fn rho_table(n: &PresentedModule, v_max: i64) -> Result<Vec<ExtInt>> {
    check_nonstandard(&n.ring)?;
    let pres = presentation_of(n)?;
    let degrees = pres.generator_degrees()?;
    let model = SubquotientModel::new(&pres)?;
    Ok((0..=v_max).map(|v| rho_by_dims(&n.ring, &degrees, v, |d| model.dim(d))).collect())
}

pub fn rho(n: &PresentedModule, v: i64) -> Result<ExtInt> {
    if v < 0 {
        check_nonstandard(&n.ring)?;
        return Ok(ExtInt::NegInf);
    }
    Ok(rho_table(n, v)?[v as usize])
}

/// `ρ_{F/U}` next to `ρ_{F/in(U)}`, the latter by counting standard monomials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RhoComparison {
    pub v_max: i64,
    pub original: Vec<ExtInt>,
    pub initial: Vec<ExtInt>,
    pub equal: bool,
}

pub fn rho_initial_invariance(
    ring: &RingSpec,
    f: &FreeModuleSpec,
    u: &[ModuleVector],
    order: &MonomialOrder,
    v_max: i64,
) -> Result<RhoComparison> {
    check_nonstandard(ring)?;
    let original = rho_table(&PresentedModule::cokernel(ring, f.clone(), u.to_vec()), v_max)?;
    let gb = buchberger(ring, f, u, order)?;
    let leads = gb.leading_terms();
    let standard_dim = |d: Multidegree| {
        FreeSlice::new(ring, f, d)
            .basis
            .iter()
            .filter(|(k, m)| !leads.iter().any(|(l, c)| c == k && l.divides(m)))
            .count()
    };
    let initial: Vec<ExtInt> = (0..=v_max).map(|v| rho_by_dims(ring, &f.twists, v, standard_dim)).collect();
    let equal = original == initial;
    Ok(RhoComparison { v_max, original, initial, equal })
}

/// Minimal generators of a monomial ideal, sorted decreasingly by exponent vector.
pub fn minimalize_monomials(gens: &[Monomial]) -> Vec<Monomial> {
    let set: BTreeSet<Monomial> = gens.iter().cloned().collect();
    let mut out: Vec<Monomial> =
        set.iter().filter(|g| !set.iter().any(|h| h != *g && h.divides(g))).cloned().collect();
    out.sort_by(|a, b| b.exponents().cmp(a.exponents()));
    out
}

/// `(J : m)` for a monomial ideal `J` and a monomial `m`.
pub fn monomial_colon(gens: &[Monomial], m: &Monomial) -> Vec<Monomial> {
    let quotients: Vec<Monomial> = gens
        .iter()
        .map(|g| Monomial::from_exponents(g.exponents().iter().zip(m.exponents()).map(|(a, b)| a.saturating_sub(*b)).collect()))
        .collect();
    minimalize_monomials(&quotients)
}

fn variable_index(m: &Monomial) -> Option<usize> {
    let e = m.exponents();
    (e.iter().sum::<u32>() == 1).then(|| e.iter().position(|&x| x == 1).unwrap())
}

/// A cyclic factor `(A / P)(-w)` of a prime filtration, `P` generated by the variables
/// outside `g`, generated in degree `shift = w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeFactor {
    pub g: Vec<usize>,
    pub shift: Multidegree,
}

/// Prime filtration of `F / U` for a monomial submodule `U = ⊕ J_k e_k`; `monomials` lists the
/// generators `m e_k` of `U`.
pub fn prime_filtration(ring: &RingSpec, f: &FreeModuleSpec, monomials: &[(Monomial, usize)]) -> Result<Vec<PrimeFactor>> {
    let n = ring.nvars();
    let mut out = Vec::new();
    for (k, twist) in f.twists.iter().enumerate() {
        let mut j: Vec<Monomial> = minimalize_monomials(
            &monomials.iter().filter(|(_, c)| *c == k).map(|(m, _)| m.clone()).collect::<Vec<_>>(),
        );
        while !j.iter().any(|g| g.is_one()) {
            let mut m = Monomial::one(n);
            loop {
                let colon = monomial_colon(&j, &m);
                match colon.iter().find(|u| variable_index(u).is_none()) {
                    None => {
                        let in_p: BTreeSet<usize> = colon.iter().filter_map(variable_index).collect();
                        out.push(PrimeFactor {
                            g: (0..n).filter(|i| !in_p.contains(i)).collect(),
                            shift: ring.monomial_degree(&m) + *twist,
                        });
                        break;
                    }
                    Some(u) => {
                        let i = u.exponents().iter().position(|&e| e > 0).unwrap();
                        let x = Monomial::var(n, i);
                        m = m.mul(&x.quotient_of(u).unwrap());
                    }
                }
            }
            j.push(m);
            j = minimalize_monomials(&j);
        }
    }
    Ok(out)
}

/// Closed form of `ρ` for a shifted cyclic factor `(A/P)(-w)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RhoLaw {
    /// `max { d_i : i ∈ G }`, absent when `G` is empty.
    pub slope: Option<i64>,
    pub w1: i64,
    pub w2: i64,
}

impl RhoLaw {
    pub fn eval(&self, v: i64) -> ExtInt {
        match self.slope {
            _ if v < self.w2 => ExtInt::NegInf,
            Some(s) => ExtInt::Finite(s * (v - self.w2) + self.w1),
            None if v == self.w2 => ExtInt::Finite(self.w1),
            None => ExtInt::NegInf,
        }
    }
}

/// The law for `(A / J)(-shift)` where `J` must be generated by variables.
pub fn rho_linear_law_monomial(ring: &RingSpec, j: &[Monomial], shift: Multidegree) -> Result<RhoLaw> {
    check_nonstandard(ring)?;
    let j = minimalize_monomials(j);
    let mut in_p = BTreeSet::new();
    for m in &j {
        in_p.insert(variable_index(m).ok_or(AlgebraError::NotMonomialPrime)?);
    }
    let g: Vec<usize> = (0..ring.nvars()).filter(|i| !in_p.contains(i)).collect();
    Ok(law_of(ring, &PrimeFactor { g, shift }))
}

pub fn law_of(ring: &RingSpec, factor: &PrimeFactor) -> RhoLaw {
    RhoLaw {
        slope: factor.g.iter().map(|&i| ring.var_degree(i).first()).max(),
        w1: factor.shift.first(),
        w2: factor.shift.second(),
    }
}

/// `max_i ρ_{C_i}(v)` over the factors of a prime filtration.
pub fn rho_from_filtration(ring: &RingSpec, factors: &[PrimeFactor], v_max: i64) -> Vec<ExtInt> {
    let laws: Vec<RhoLaw> = factors.iter().map(|f| law_of(ring, f)).collect();
    (0..=v_max).map(|v| laws.iter().map(|l| l.eval(v)).max().unwrap_or(ExtInt::NegInf)).collect()
}

/// Keeps, lowest degree first, the products not spanned in their degree by earlier choices
/// and by multiples of lower-degree choices.
fn minimal_by_slices(ring: &RingSpec, cands: Vec<Polynomial>) -> Result<Vec<Polynomial>> {
    let s = FreeModuleSpec::ring(1);
    let mut by_degree: Vec<(i64, Polynomial)> = Vec::new();
    for c in cands {
        if c.is_zero() {
            continue;
        }
        let d = ring.homogeneous_degree(&c)?.ok_or_else(|| AlgebraError::Inhomogeneous(ring.render(&c)))?;
        by_degree.push((d.first(), ring.primitive(&c)));
    }
    by_degree.sort_by_key(|(d, _)| *d);
    let mut kept: Vec<(i64, Polynomial)> = Vec::new();
    let mut i = 0;
    while i < by_degree.len() {
        let deg = by_degree[i].0;
        let slice = FreeSlice::new(ring, &s, Multidegree::single(deg));
        let mut e = Echelon::new(ring.field(), slice.dim());
        for (kd, g) in &kept {
            let gv = ModuleVector::from_poly(g.clone());
            for m in ring.monomials_of_degree(Multidegree::single(deg - kd)) {
                e.insert(slice.coords_of_multiple(&m, &gv));
            }
        }
        while i < by_degree.len() && by_degree[i].0 == deg {
            let p = by_degree[i].1.clone();
            if e.insert(slice.coords(&ModuleVector::from_poly(p.clone()))) {
                kept.push((deg, p));
            }
            i += 1;
        }
    }
    Ok(kept.into_iter().map(|(_, p)| p).collect())
}

/// Minimal generators of `I^v`, built from products of generators. `v = 0` gives the unit ideal.
pub fn ideal_power(ring: &RingSpec, gens: &[Polynomial], v: u32) -> Result<Vec<Polynomial>> {
    if !ring.is_standard() {
        return Err(AlgebraError::NotStandardGraded);
    }
    let base = minimal_by_slices(ring, gens.to_vec())?;
    if v == 0 {
        return Ok(vec![ring.one()]);
    }
    let mut cur = base.clone();
    for _ in 1..v {
        let mut products = Vec::with_capacity(cur.len() * base.len());
        let mut seen = BTreeSet::new();
        for f in &cur {
            for g in &base {
                let p = ring.primitive(&ring.mul(f, g)?);
                if seen.insert(format!("{p:?}")) {
                    products.push(p);
                }
            }
        }
        cur = minimal_by_slices(ring, products)?;
    }
    Ok(cur)
}

/// `I^v M` as a subquotient of the ambient module of `M`.
pub fn power_module(ring: &RingSpec, gens: &[Polynomial], v: u32, m: &PresentedModule) -> Result<PresentedModule> {
    let power = ideal_power(ring, gens, v)?;
    let mut products = Vec::new();
    for f in &power {
        for g in &m.generators {
            let p = ring.vec_scale_poly(f, g)?;
            if !p.is_zero() {
                products.push(p);
            }
        }
    }
    let kind_is_ring = m.relations.is_empty() && m.ambient.rank() == 1 && m.generators.len() == 1 && m.generators[0].entries[0] == ring.one();
    if kind_is_ring && m.ambient.twists[0] == ring.zero_degree() {
        return Ok(PresentedModule::ideal(ring, &power));
    }
    Ok(PresentedModule::subquotient(ring, m.ambient.clone(), products, m.relations.clone()))
}

/// One term of a regularity sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerPoint {
    pub v: i64,
    pub reg: ExtInt,
    pub t0: ExtInt,
    /// Koszul regularity, when the cross-check fit the budget.
    pub reg1: Option<ExtInt>,
    pub zero_module: bool,
}

impl PowerPoint {
    pub fn consistent(&self) -> bool {
        self.reg1.is_none_or(|r| r == self.reg)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SequenceOptions {
    /// Largest Koszul complex slice (rows) for which `reg₁` is recomputed.
    pub koszul_budget: usize,
    pub exec: Exec,
}

impl Default for SequenceOptions {
    fn default() -> Self {
        SequenceOptions { koszul_budget: 60_000, exec: Exec::default() }
    }
}

fn binom(n: i64, k: i64) -> usize {
    if k < 0 || n < k {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) as usize / (i + 1) as usize)
}

/// Size of the largest Koszul chain module slice up to `bound`.
pub fn koszul_cost(m: &PresentedModule, bound: i64) -> usize {
    let n = m.ring.nvars() as i64;
    let lo = m.ambient.twists.iter().map(|t| t.first()).min().unwrap_or(0);
    let mono = binom(bound - lo + n - 1, n - 1);
    mono * m.ambient.rank() * binom(n, n / 2)
}

fn point(ring: &RingSpec, gens: &[Polynomial], m: &PresentedModule, v: i64, opts: &SequenceOptions) -> Result<PowerPoint> {
    let pm = power_module(ring, gens, v as u32, m)?;
    let res = minimal_free_resolution(&pm)?;
    let s = summary(&betti_table(&res)?, ring.nvars())?;
    if s.zero_module {
        return Ok(PowerPoint { v, reg: ExtInt::NegInf, t0: ExtInt::NegInf, reg1: None, zero_module: true });
    }
    let reg = s.reg3;
    let bound = reg.finite().unwrap() + ring.nvars() as i64 + 1;
    let reg1 = if koszul_cost(&pm, bound) <= opts.koszul_budget {
        Some(koszul_summary_with(&pm, bound, Exec::Sequential)?.reg1)
    } else {
        None
    };
    Ok(PowerPoint { v, reg, t0: ExtInt::Finite(s.t0_per_step[0]), reg1, zero_module: false })
}

/// `reg(I^v M)` for `v = 1..=v_max`, each with its `t₀` and, within budget, its Koszul regularity.
pub fn reg_power_sequence(
    ring: &RingSpec,
    gens: &[Polynomial],
    m: &PresentedModule,
    v_max: i64,
    opts: &SequenceOptions,
) -> Result<Vec<PowerPoint>> {
    if !ring.is_standard() {
        return Err(AlgebraError::NotStandardGraded);
    }
    let vs: Vec<i64> = (1..=v_max).collect();
    opts.exec.map(&vs, |&v| point(ring, gens, m, v, opts)).into_iter().collect()
}

/// An eventual law `reg = δ v + c`, observed on `v_start..=verified_to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LinearLaw {
    pub delta: i64,
    pub c: i64,
    pub v_start: i64,
    pub verified_to: i64,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LawFit {
    Law(LinearLaw),
    /// Fewer than three trailing points share a first difference.
    NotStabilized { points: usize },
    /// A stable slope outside the generator degrees.
    SlopeOutsideDegrees { delta: i64, degrees: Vec<i64> },
}

/// Longest terminal run of consecutive `v` with constant first differences, at least 3 points.
pub fn fit_linear_law(seq: &[(i64, ExtInt)], gen_degrees: &[i64]) -> LawFit {
    let pts: Vec<(i64, i64)> = seq.iter().filter_map(|(v, r)| r.finite().map(|r| (*v, r))).collect();
    let n = pts.len();
    if n < 3 {
        return LawFit::NotStabilized { points: n };
    }
    let delta = pts[n - 1].1 - pts[n - 2].1;
    let mut start = n - 1;
    while start > 0 && pts[start].0 - pts[start - 1].0 == 1 && pts[start].1 - pts[start - 1].1 == delta {
        start -= 1;
    }
    if n - start < 3 || pts[n - 1].0 - pts[n - 2].0 != 1 {
        return LawFit::NotStabilized { points: n - start };
    }
    if !gen_degrees.contains(&delta) {
        let mut degrees = gen_degrees.to_vec();
        degrees.sort();
        degrees.dedup();
        return LawFit::SlopeOutsideDegrees { delta, degrees };
    }
    let (v0, r0) = pts[start];
    LawFit::Law(LinearLaw { delta, c: r0 - delta * v0, v_start: v0, verified_to: pts[n - 1].0, certified: false })
}
