//! Buchberger's algorithm for graded submodules of twisted free modules.
//!
//! The engine is homogeneous-only. Work is processed by increasing weight (normal strategy);
//! within one weight, S-pairs come before input generators, which makes it possible to detect
//! minimal generators on the fly: an input whose normal form vanishes is redundant. Optional
//! cofactor tracking expresses every basis element in terms of the inputs, and every
//! reduction to zero then yields a syzygy; together they generate the full syzygy module.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{AlgebraError, Result};
use crate::field::{FieldSpec, FieldValue};
use crate::poly::{FreeModuleSpec, ModuleVector, Monomial, MonomialOrder, Multidegree, Polynomial, RingSpec};

#[derive(Clone, Debug)]
pub(crate) struct Term {
    pub mono: Monomial,
    pub comp: u32,
    pub coeff: FieldValue,
}

/// Terms sorted increasingly; the leading term is last.
pub(crate) type SVec = Vec<Term>;

pub(crate) struct Ctx<'a> {
    weights: &'a [i64],
    order: &'a MonomialOrder,
    field: FieldSpec,
}

impl Ctx<'_> {
    #[inline]
    pub fn cmp(&self, a: &Term, b: &Term) -> Ordering {
        self.order.cmp_terms(self.weights, &a.mono, a.comp as usize, &b.mono, b.comp as usize)
    }

    pub fn to_svec(&self, v: &ModuleVector) -> SVec {
        let mut t: SVec = v
            .terms()
            .map(|(m, k, c)| Term { mono: m.clone(), comp: k as u32, coeff: c.clone() })
            .collect();
        t.sort_by(|a, b| self.cmp(a, b));
        t
    }

    /// `a - c * m * b`.
    pub fn sub_mul(&self, a: &[Term], c: &FieldValue, m: &Monomial, b: &[Term]) -> SVec {
        let f = &self.field;
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut i = 0;
        let mut j = 0;
        let mut mb: Option<Term> = b.first().map(|t| Term { mono: t.mono.mul(m), comp: t.comp, coeff: t.coeff.clone() });
        while i < a.len() || mb.is_some() {
            let ord = match (&mb, i < a.len()) {
                (None, _) => Ordering::Less,
                (Some(_), false) => Ordering::Greater,
                (Some(t), true) => self.cmp(&a[i], t),
            };
            match ord {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let t = mb.take().unwrap();
                    out.push(Term { mono: t.mono, comp: t.comp, coeff: f.neg(&f.mul(c, &t.coeff)) });
                    j += 1;
                    mb = b.get(j).map(|t| Term { mono: t.mono.mul(m), comp: t.comp, coeff: t.coeff.clone() });
                }
                Ordering::Equal => {
                    let t = mb.take().unwrap();
                    let v = f.sub(&a[i].coeff, &f.mul(c, &t.coeff));
                    if !v.is_zero() {
                        out.push(Term { mono: t.mono, comp: t.comp, coeff: v });
                    }
                    i += 1;
                    j += 1;
                    mb = b.get(j).map(|t| Term { mono: t.mono.mul(m), comp: t.comp, coeff: t.coeff.clone() });
                }
            }
        }
        out
    }

    pub fn scale(&self, a: &mut SVec, c: &FieldValue) {
        for t in a.iter_mut() {
            t.coeff = self.field.mul(&t.coeff, c);
        }
    }
}

pub(crate) fn to_module_vector(sv: &[Term], rank: usize, nvars: usize) -> ModuleVector {
    let mut buckets: Vec<Vec<(Monomial, FieldValue)>> = vec![Vec::new(); rank];
    for t in sv {
        buckets[t.comp as usize].push((t.mono.clone(), t.coeff.clone()));
    }
    ModuleVector::new(buckets.into_iter().map(|b| Polynomial::from_terms(nvars, b)).collect())
}

fn divmask(m: &Monomial) -> u64 {
    m.exponents().iter().enumerate().fold(0u64, |acc, (i, &e)| if e > 0 { acc | 1 << (i % 64) } else { acc })
}

#[derive(Clone, Debug)]
struct Elem {
    v: SVec,
    cof: Option<SVec>,
    mask: u64,
}

impl Elem {
    fn lt(&self) -> &Term {
        self.v.last().expect("basis elements are nonzero")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Role {
    /// A generator whose redundancy should be detected.
    Candidate,
    /// Always part of the module; never reported as a generator.
    Relation,
}

pub(crate) struct RunConfig {
    pub track: bool,
    pub minimize: bool,
    pub product_criterion: bool,
}

pub(crate) struct RunResult {
    basis: Vec<Elem>,
    /// Per input: whether it survived (candidates: minimal; relations: nonzero normal form).
    pub kept: Vec<bool>,
    /// Syzygies in input coordinates (one coordinate per input, twists = input degrees).
    pub syzygies: Vec<ModuleVector>,
    input_count: usize,
}

#[derive(Clone, Debug)]
enum Work {
    Pair { i: usize, j: usize, lcm: Monomial },
    Input(usize),
}

struct Engine<'a> {
    ring: &'a RingSpec,
    ctx: Ctx<'a>,
    cof_ctx: Ctx<'a>,
    twist_weights: Vec<i64>,
    basis: Vec<Elem>,
    queue: BTreeMap<(i64, u8, usize, usize), Work>,
    cfg: &'a RunConfig,
    syzygies: Vec<SVec>,
}

fn find_reducer<'b>(basis: &'b [Elem], t: &Term) -> Option<&'b Elem> {
    let mask = divmask(&t.mono);
    basis.iter().find(|g| {
        let lt = g.lt();
        lt.comp == t.comp && g.mask & !mask == 0 && lt.mono.divides(&t.mono)
    })
}

/// Full reduction (leading term and tail) against `basis`, whose elements are monic.
fn reduce_full(ctx: &Ctx, cof_ctx: &Ctx, basis: &[Elem], mut p: SVec, mut cof: Option<SVec>) -> (SVec, Option<SVec>) {
    let mut rem: Vec<Term> = Vec::new();
    while let Some(lt) = p.last() {
        match find_reducer(basis, lt) {
            Some(g) => {
                let q = g.lt().mono.quotient_of(&lt.mono).expect("divisible");
                let c = lt.coeff.clone();
                p = ctx.sub_mul(&p, &c, &q, &g.v);
                if let (Some(cf), Some(gc)) = (cof.as_mut(), g.cof.as_ref()) {
                    *cf = cof_ctx.sub_mul(cf, &c, &q, gc);
                }
            }
            None => rem.push(p.pop().unwrap()),
        }
    }
    rem.reverse();
    (rem, cof)
}

impl<'a> Engine<'a> {
    fn reduce(&self, p: SVec, cof: Option<SVec>) -> (SVec, Option<SVec>) {
        reduce_full(&self.ctx, &self.cof_ctx, &self.basis, p, cof)
    }

    fn pair_weight(&self, lcm: &Monomial, comp: u32) -> i64 {
        self.ring.monomial_weight(lcm) + self.twist_weights[comp as usize]
    }

    fn add_basis(&mut self, mut v: SVec, mut cof: Option<SVec>) {
        let lc = v.last().unwrap().coeff.clone();
        if !lc.is_one() {
            let inv = self.ctx.field.inverse(&lc).expect("nonzero");
            self.ctx.scale(&mut v, &inv);
            if let Some(c) = cof.as_mut() {
                self.cof_ctx.scale(c, &inv);
            }
        }
        let mask = divmask(&v.last().unwrap().mono);
        self.basis.push(Elem { v, cof, mask });
        self.update_pairs(self.basis.len() - 1);
    }

    /// Gebauer–Möller installation of the pairs of a new element.
    fn update_pairs(&mut self, t: usize) {
        let (mh, ch) = {
            let lt = self.basis[t].lt();
            (lt.mono.clone(), lt.comp)
        };
        let basis = &self.basis;
        self.queue.retain(|_, w| match w {
            Work::Pair { i, j, lcm } => {
                let li = basis[*i].lt();
                if li.comp != ch || !mh.divides(lcm) {
                    return true;
                }
                let lj = basis[*j].lt();
                li.mono.lcm(&mh) == *lcm || lj.mono.lcm(&mh) == *lcm
            }
            Work::Input(_) => true,
        });

        let mut cands: Vec<(usize, Monomial, bool)> = (0..t)
            .filter(|&i| self.basis[i].lt().comp == ch)
            .map(|i| {
                let mi = &self.basis[i].lt().mono;
                (i, mi.lcm(&mh), mi.is_coprime(&mh))
            })
            .collect();
        // chain criterion: drop pairs whose lcm is strictly divisible by another new lcm
        let lcms: Vec<Monomial> = cands.iter().map(|c| c.1.clone()).collect();
        cands.retain(|(_, l, _)| !lcms.iter().any(|o| o != l && o.divides(l)));
        // equal lcms: keep one representative; over a rank-one ambient a coprime member kills
        // its whole class
        let mut by_lcm: BTreeMap<Monomial, (usize, bool)> = BTreeMap::new();
        for (i, l, coprime) in cands {
            let e = by_lcm.entry(l).or_insert((i, false));
            e.1 |= coprime;
        }
        for (lcm, (i, coprime)) in by_lcm {
            if coprime && self.cfg.product_criterion && self.twist_weights.len() == 1 {
                continue;
            }
            let w = self.pair_weight(&lcm, ch);
            self.queue.insert((w, 0, i, t), Work::Pair { i, j: t, lcm });
        }
    }

    fn spoly(&self, i: usize, j: usize, lcm: &Monomial) -> (SVec, Option<SVec>) {
        let (gi, gj) = (&self.basis[i], &self.basis[j]);
        let qi = gi.lt().mono.quotient_of(lcm).unwrap();
        let qj = gj.lt().mono.quotient_of(lcm).unwrap();
        let one = self.ctx.field.one();
        let empty: SVec = Vec::new();
        let a = self.ctx.sub_mul(&empty, &self.ctx.field.neg(&one), &qi, &gi.v);
        let mut s = self.ctx.sub_mul(&a, &one, &qj, &gj.v);
        // the leading terms cancel exactly
        debug_assert!(s.last().is_none_or(|t| self.ctx.cmp(t, gi.lt()) != Ordering::Equal || t.mono != *lcm));
        s.retain(|t| !t.coeff.is_zero());
        let cof = match (&gi.cof, &gj.cof) {
            (Some(ci), Some(cj)) => {
                let a = self.cof_ctx.sub_mul(&empty, &self.cof_ctx.field.neg(&one), &qi, ci);
                Some(self.cof_ctx.sub_mul(&a, &one, &qj, cj))
            }
            _ => None,
        };
        (s, cof)
    }
}

fn check_homogeneous(ring: &RingSpec, ambient: &FreeModuleSpec, v: &ModuleVector) -> Result<Option<Multidegree>> {
    if v.rank() != ambient.rank() {
        return Err(AlgebraError::RingMismatch);
    }
    if v.is_zero() {
        return Ok(None);
    }
    match ring.vector_degree(v, ambient)? {
        Some(d) => Ok(Some(d)),
        None => Err(AlgebraError::Inhomogeneous(ring.render_vector(v))),
    }
}

/// Runs Buchberger on `inputs`, all homogeneous vectors of `ambient`.
pub(crate) fn run(
    ring: &RingSpec,
    ambient: &FreeModuleSpec,
    order: &MonomialOrder,
    inputs: &[(ModuleVector, Role)],
    cfg: &RunConfig,
) -> Result<RunResult> {
    let degrees: Vec<Option<Multidegree>> =
        inputs.iter().map(|(v, _)| check_homogeneous(ring, ambient, v)).collect::<Result<_>>()?;
    let cof_order = MonomialOrder::degrevlex();
    let ctx = Ctx { weights: ring.weights(), order, field: ring.field() };
    let cof_ctx = Ctx { weights: ring.weights(), order: &cof_order, field: ring.field() };
    let mut engine = Engine {
        ring,
        ctx,
        cof_ctx,
        twist_weights: ambient.twists.iter().map(|t| t.weight()).collect(),
        basis: Vec::new(),
        queue: BTreeMap::new(),
        cfg,
        syzygies: Vec::new(),
    };
    let mut kept = vec![false; inputs.len()];
    for (k, d) in degrees.iter().enumerate() {
        if let Some(d) = d {
            let kind = match inputs[k].1 {
                Role::Relation => 1,
                Role::Candidate => 2,
            };
            engine.queue.insert((d.weight(), kind, k, 0), Work::Input(k));
        }
    }
    let nvars = ring.nvars();
    while let Some((_, work)) = engine.queue.pop_first() {
        match work {
            Work::Pair { i, j, lcm } => {
                let (s, cof) = engine.spoly(i, j, &lcm);
                let (nf, cof) = engine.reduce(s, cof);
                if nf.is_empty() {
                    if let Some(c) = cof {
                        if !c.is_empty() {
                            engine.syzygies.push(c);
                        }
                    }
                } else {
                    engine.add_basis(nf, cof);
                }
            }
            Work::Input(k) => {
                let (v, role) = &inputs[k];
                let p = engine.ctx.to_svec(v);
                let cof = cfg.track.then(|| {
                    vec![Term { mono: Monomial::one(nvars), comp: k as u32, coeff: ring.field().one() }]
                });
                let (nf, cof) = engine.reduce(p, cof);
                if nf.is_empty() {
                    if !(cfg.minimize && *role == Role::Candidate) {
                        if let Some(c) = cof {
                            engine.syzygies.push(c);
                        }
                    }
                } else {
                    kept[k] = true;
                    engine.add_basis(nf, cof);
                }
            }
        }
    }
    let rank = inputs.len();
    let syzygies = engine.syzygies.iter().map(|s| to_module_vector(s, rank, nvars)).collect();
    Ok(RunResult { basis: engine.basis, kept, syzygies, input_count: inputs.len() })
}

/// Reduced, monic basis sorted by increasing leading term.
fn interreduce(ring: &RingSpec, order: &MonomialOrder, basis: Vec<Elem>) -> Vec<Elem> {
    let n = basis.len();
    let mut alive = vec![true; n];
    for i in 0..n {
        let li = basis[i].lt();
        for j in 0..n {
            if i != j && alive[j] {
                let lj = basis[j].lt();
                if lj.comp == li.comp && lj.mono.divides(&li.mono) && (lj.mono != li.mono || j < i) {
                    alive[i] = false;
                    break;
                }
            }
        }
    }
    let cof_order = MonomialOrder::degrevlex();
    let cfg = RunConfig { track: false, minimize: false, product_criterion: true };
    let mut engine = Engine {
        ring,
        ctx: Ctx { weights: ring.weights(), order, field: ring.field() },
        cof_ctx: Ctx { weights: ring.weights(), order: &cof_order, field: ring.field() },
        twist_weights: Vec::new(),
        basis: Vec::new(),
        queue: BTreeMap::new(),
        cfg: &cfg,
        syzygies: Vec::new(),
    };
    let survivors: Vec<Elem> = basis.into_iter().zip(alive).filter(|(_, a)| *a).map(|(e, _)| e).collect();
    let mut out = Vec::with_capacity(survivors.len());
    for idx in 0..survivors.len() {
        engine.basis = survivors.iter().enumerate().filter(|(j, _)| *j != idx).map(|(_, e)| e.clone()).collect();
        let mut e = survivors[idx].clone();
        let lt = e.v.pop().unwrap();
        let (tail, cof) = engine.reduce(e.v, e.cof);
        let mut v = tail;
        v.push(lt);
        out.push(Elem { v, cof, mask: e.mask });
    }
    out.sort_by(|a, b| engine.ctx.cmp(a.lt(), b.lt()));
    out
}

/// A reduced Groebner basis of a graded submodule of a free module.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    pub ring: RingSpec,
    pub ambient: FreeModuleSpec,
    pub order: MonomialOrder,
    /// Monic, tail-reduced, sorted by increasing leading term.
    pub generators: Vec<ModuleVector>,
    tracking: Option<Tracking>,
}

#[derive(Clone, Debug)]
struct Tracking {
    inputs: Vec<ModuleVector>,
    cofactors: Vec<ModuleVector>,
    syzygies: Vec<ModuleVector>,
}

/// Generators of the syzygy module of a list of vectors.
#[derive(Clone, Debug)]
pub struct SyzygyResult {
    /// Free module with one basis element per original generator, twisted by its degree.
    pub source: FreeModuleSpec,
    pub syzygies: Vec<ModuleVector>,
}

fn input_twists(ring: &RingSpec, ambient: &FreeModuleSpec, gens: &[ModuleVector]) -> Result<Vec<Multidegree>> {
    gens.iter()
        .map(|g| Ok(check_homogeneous(ring, ambient, g)?.unwrap_or_else(|| ring.zero_degree())))
        .collect()
}

impl GroebnerBasis {
    fn compute(ring: &RingSpec, ambient: &FreeModuleSpec, gens: &[ModuleVector], order: &MonomialOrder, track: bool) -> Result<Self> {
        let inputs: Vec<(ModuleVector, Role)> = gens.iter().map(|g| (g.clone(), Role::Relation)).collect();
        let cfg = RunConfig { track, minimize: false, product_criterion: !track };
        let res = run(ring, ambient, order, &inputs, &cfg)?;
        let input_count = res.input_count;
        let syz = res.syzygies;
        let basis = interreduce(ring, order, res.basis);
        let rank = ambient.rank();
        let nvars = ring.nvars();
        let generators = basis.iter().map(|e| to_module_vector(&e.v, rank, nvars)).collect();
        let tracking = track.then(|| Tracking {
            inputs: gens.to_vec(),
            cofactors: basis
                .iter()
                .map(|e| to_module_vector(e.cof.as_deref().unwrap_or(&[]), input_count, nvars))
                .collect(),
            syzygies: syz,
        });
        Ok(GroebnerBasis { ring: ring.clone(), ambient: ambient.clone(), order: order.clone(), generators, tracking })
    }

    pub fn leading_terms(&self) -> Vec<(Monomial, usize)> {
        self.generators
            .iter()
            .map(|g| {
                let (m, k, _) = g
                    .terms()
                    .max_by(|a, b| self.order.cmp_terms(self.ring.weights(), a.0, a.1, b.0, b.1))
                    .expect("nonzero generator");
                (m.clone(), k)
            })
            .collect()
    }

    /// Whether `m e_k` lies in the leading-term module.
    pub fn is_leading_term(&self, m: &Monomial, k: usize) -> bool {
        self.leading_terms().iter().any(|(l, c)| *c == k && l.divides(m))
    }

    pub fn is_tracked(&self) -> bool {
        self.tracking.is_some()
    }

    /// Expresses generator `i` as a combination of the original inputs (tracked bases only).
    pub fn cofactors(&self) -> Option<&[ModuleVector]> {
        self.tracking.as_ref().map(|t| t.cofactors.as_slice())
    }

    pub fn contains(&self, v: &ModuleVector) -> Result<bool> {
        Ok(normal_form(v, self)?.is_zero())
    }
}

/// Reduced Groebner basis of the submodule generated by `gens`.
pub fn buchberger(ring: &RingSpec, ambient: &FreeModuleSpec, gens: &[ModuleVector], order: &MonomialOrder) -> Result<GroebnerBasis> {
    GroebnerBasis::compute(ring, ambient, gens, order, false)
}

/// Like [`buchberger`], additionally recording the division history needed by [`syzygies`].
pub fn buchberger_tracked(ring: &RingSpec, ambient: &FreeModuleSpec, gens: &[ModuleVector], order: &MonomialOrder) -> Result<GroebnerBasis> {
    GroebnerBasis::compute(ring, ambient, gens, order, true)
}

/// Ideal version of [`buchberger`].
pub fn ideal_basis(ring: &RingSpec, gens: &[Polynomial], order: &MonomialOrder) -> Result<GroebnerBasis> {
    let vs: Vec<ModuleVector> = gens.iter().map(|g| ModuleVector::from_poly(g.clone())).collect();
    buchberger(ring, &FreeModuleSpec::ring(ring.arity()), &vs, order)
}

/// Division by a fixed Groebner basis, with vectors kept in the internal sorted layout.
pub(crate) struct Reducer {
    ring: RingSpec,
    order: MonomialOrder,
    basis: Vec<Elem>,
    cof_order: MonomialOrder,
}

impl Reducer {
    pub fn new(gb: &GroebnerBasis) -> Self {
        let ctx = Ctx { weights: gb.ring.weights(), order: &gb.order, field: gb.ring.field() };
        let basis = gb
            .generators
            .iter()
            .map(|g| {
                let sv = ctx.to_svec(g);
                let mask = divmask(&sv.last().unwrap().mono);
                Elem { v: sv, cof: None, mask }
            })
            .collect();
        Reducer { ring: gb.ring.clone(), order: gb.order.clone(), basis, cof_order: MonomialOrder::degrevlex() }
    }

    pub fn ctx(&self) -> Ctx<'_> {
        Ctx { weights: self.ring.weights(), order: &self.order, field: self.ring.field() }
    }

    pub fn reduce(&self, p: SVec) -> SVec {
        let cof_ctx = Ctx { weights: self.ring.weights(), order: &self.cof_order, field: self.ring.field() };
        reduce_full(&self.ctx(), &cof_ctx, &self.basis, p, None).0
    }

    /// Whether `m e_k` is a leading term of the module.
    pub fn is_leading(&self, m: &Monomial, k: u32) -> bool {
        let t = Term { mono: m.clone(), comp: k, coeff: self.ring.field().one() };
        find_reducer(&self.basis, &t).is_some()
    }

    /// A basis element whose leading term divides `m e_k`, with the quotient monomial.
    pub fn divisor_of(&self, m: &Monomial, k: u32) -> Option<(&[Term], Monomial)> {
        let t = Term { mono: m.clone(), comp: k, coeff: self.ring.field().one() };
        find_reducer(&self.basis, &t).map(|g| (g.v.as_slice(), g.lt().mono.quotient_of(m).unwrap()))
    }
}

/// Remainder of `v` on division by `gb`: no term of the result is divisible by a leading term.
pub fn normal_form(v: &ModuleVector, gb: &GroebnerBasis) -> Result<ModuleVector> {
    if v.rank() != gb.ambient.rank() {
        return Err(AlgebraError::RingMismatch);
    }
    if v.entries.iter().any(|p| p.nvars() != gb.ring.nvars()) {
        return Err(AlgebraError::RingMismatch);
    }
    let r = Reducer::new(gb);
    let nf = r.reduce(r.ctx().to_svec(v));
    Ok(to_module_vector(&nf, v.rank(), gb.ring.nvars()))
}

/// Generators of the syzygies of `original_gens`, read off the tracked basis.
pub fn syzygies(gb: &GroebnerBasis, original_gens: &[ModuleVector]) -> Result<SyzygyResult> {
    let tracking = gb.tracking.as_ref().ok_or(AlgebraError::Untracked)?;
    if tracking.inputs != original_gens {
        return Err(AlgebraError::GeneratorMismatch);
    }
    let source = FreeModuleSpec::new(input_twists(&gb.ring, &gb.ambient, original_gens)?);
    let syzygies = tracking.syzygies.iter().filter(|s| !s.is_zero()).cloned().collect();
    Ok(SyzygyResult { source, syzygies })
}

/// Result of a minimizing, tracked run: which candidates are minimal generators and the
/// syzygies among the minimal ones.
pub(crate) struct MinimalSyzygies {
    pub kept: Vec<usize>,
    /// In coordinates of the kept candidates.
    pub syzygies: Vec<ModuleVector>,
}

/// Selects a minimal generating set of `(⟨candidates⟩ + ⟨relations⟩) / ⟨relations⟩` and the
/// generators of `{a : Σ a_k g_k ∈ ⟨relations⟩}` on the selected `g_k`.
pub(crate) fn minimal_generators_and_syzygies(
    ring: &RingSpec,
    ambient: &FreeModuleSpec,
    order: &MonomialOrder,
    candidates: &[ModuleVector],
    relations: &[ModuleVector],
) -> Result<MinimalSyzygies> {
    let mut inputs: Vec<(ModuleVector, Role)> = candidates.iter().map(|c| (c.clone(), Role::Candidate)).collect();
    inputs.extend(relations.iter().map(|r| (r.clone(), Role::Relation)));
    let cfg = RunConfig { track: true, minimize: true, product_criterion: false };
    let res = run(ring, ambient, order, &inputs, &cfg)?;
    let kept: Vec<usize> = (0..candidates.len()).filter(|&k| res.kept[k]).collect();
    let nvars = ring.nvars();
    let mut syzygies = Vec::new();
    for s in &res.syzygies {
        let proj = ModuleVector::new(kept.iter().map(|&k| s.entries[k].clone()).collect());
        if !proj.is_zero() {
            syzygies.push(proj);
        }
    }
    debug_assert!(syzygies.iter().all(|s: &ModuleVector| s.entries.iter().all(|p| p.nvars() == nvars)));
    Ok(MinimalSyzygies { kept, syzygies })
}

/// Minimal homogeneous generators among `candidates` (lowest degree first, input order within a
/// degree), modulo `relations`.
pub(crate) fn minimal_subset(
    ring: &RingSpec,
    ambient: &FreeModuleSpec,
    candidates: &[ModuleVector],
    relations: &[ModuleVector],
) -> Result<Vec<usize>> {
    let mut inputs: Vec<(ModuleVector, Role)> = candidates.iter().map(|c| (c.clone(), Role::Candidate)).collect();
    inputs.extend(relations.iter().map(|r| (r.clone(), Role::Relation)));
    let cfg = RunConfig { track: false, minimize: true, product_criterion: true };
    let res = run(ring, ambient, &MonomialOrder::degrevlex(), &inputs, &cfg)?;
    Ok((0..candidates.len()).filter(|&k| res.kept[k]).collect())
}

/// Eliminates every variable outside `keep`. Returns the subring on `keep` (in the given
/// order) and the reduced Groebner basis of the elimination ideal there.
pub fn eliminate(ring: &RingSpec, gens: &[Polynomial], keep: &[usize]) -> Result<(RingSpec, Vec<Polynomial>)> {
    let n = ring.nvars();
    if keep.iter().any(|&k| k >= n) {
        return Err(AlgebraError::InvalidArgument("kept variable out of range".into()));
    }
    let elim: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    let perm: Vec<usize> = elim.iter().chain(keep.iter()).copied().collect();
    let vars = perm.iter().map(|&i| (ring.names()[i].clone(), ring.var_degree(i))).collect();
    let work_ring = RingSpec::new(ring.field(), vars)?;
    let permute = |f: &Polynomial, to: &[usize], nv: usize| -> Polynomial {
        Polynomial::from_terms(
            nv,
            f.terms().map(|(m, c)| {
                let e = m.exponents();
                (Monomial::from_exponents(to.iter().map(|&i| e[i]).collect()), c.clone())
            }),
        )
    };
    let moved: Vec<Polynomial> = gens.iter().map(|g| permute(g, &perm, n)).collect();
    let gb = ideal_basis(&work_ring, &moved, &MonomialOrder::elimination(elim.len()))?;
    let k = elim.len();
    let sub_vars = keep.iter().map(|&i| (ring.names()[i].clone(), ring.var_degree(i))).collect();
    let sub = RingSpec::new(ring.field(), sub_vars)?;
    let back: Vec<usize> = (k..n).collect();
    let result = gb
        .generators
        .iter()
        .map(|g| &g.entries[0])
        .filter(|p| p.support_vars().iter().all(|&v| v >= k))
        .map(|p| permute(p, &back, keep.len()))
        .collect();
    Ok((sub, result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Echelon;
    use proptest::prelude::*;

    fn qq(names: &[&str]) -> RingSpec {
        RingSpec::standard(FieldSpec::Rationals, names)
    }

    fn p(r: &RingSpec, terms: &[(i64, &[u32])]) -> Polynomial {
        Polynomial::from_terms(
            r.nvars(),
            terms.iter().map(|(c, e)| (Monomial::from_exponents(e.to_vec()), r.field().from_i64(*c))),
        )
    }

    fn mv(f: Polynomial) -> ModuleVector {
        ModuleVector::from_poly(f)
    }

    #[test]
    fn normal_form_examples() {
        let r = qq(&["x", "y"]);
        let gb = ideal_basis(&r, &[r.var(0)], &MonomialOrder::degrevlex()).unwrap();
        assert!(normal_form(&mv(p(&r, &[(1, &[2, 0])])), &gb).unwrap().is_zero());
        assert_eq!(normal_form(&mv(r.var(1)), &gb).unwrap(), mv(r.var(1)));

        let gb = ideal_basis(&r, &[p(&r, &[(1, &[2, 0])])], &MonomialOrder::degrevlex()).unwrap();
        let v = mv(p(&r, &[(1, &[2, 0]), (1, &[0, 3])]));
        let f = p(&r, &[(1, &[2, 0]), (-1, &[0, 3])]);
        let _ = v;
        // x^2 + y^3 is inhomogeneous; use the homogeneous analogue x^3 + y^3 reduced by x^3 - y^3
        let g = ideal_basis(&r, &[p(&r, &[(1, &[3, 0]), (-1, &[0, 3])])], &MonomialOrder::degrevlex()).unwrap();
        let nf = normal_form(&mv(p(&r, &[(1, &[3, 0]), (1, &[0, 3])])), &g).unwrap();
        assert_eq!(r.render(&nf.entries[0]), "2*y^3");
        let _ = (gb, f);
    }

    #[test]
    fn normal_form_rejects_wrong_ambient() {
        let r = qq(&["x", "y"]);
        let gb = ideal_basis(&r, &[r.var(0)], &MonomialOrder::degrevlex()).unwrap();
        let v = ModuleVector::new(vec![r.var(0), r.var(1)]);
        assert_eq!(normal_form(&v, &gb), Err(AlgebraError::RingMismatch));
    }

    #[test]
    fn buchberger_examples() {
        let r = qq(&["x", "y"]);
        let o = MonomialOrder::degrevlex();
        let gb = ideal_basis(&r, &[r.var(0), r.var(1)], &o).unwrap();
        let rendered: Vec<String> = gb.generators.iter().map(|g| r.render(&g.entries[0])).collect();
        assert_eq!(rendered, vec!["y", "x"]);

        // y*(x^2+y^2) - x*(xy) = y^3
        let f = p(&r, &[(1, &[2, 0]), (1, &[0, 2])]);
        let g = p(&r, &[(1, &[1, 1])]);
        let gb = ideal_basis(&r, &[f.clone(), g.clone()], &o).unwrap();
        let rendered: Vec<String> = gb.generators.iter().map(|g| r.render(&g.entries[0])).collect();
        assert!(rendered.contains(&"x^2 + y^2".to_string()));
        assert!(rendered.contains(&"x*y".to_string()));
        assert!(rendered.contains(&"y^3".to_string()));

        let h = p(&r, &[(3, &[1, 1]), (6, &[0, 2])]);
        let gb = ideal_basis(&r, &[h], &o).unwrap();
        assert_eq!(r.render(&gb.generators[0].entries[0]), "x*y + 2*y^2");
    }

    #[test]
    fn inhomogeneous_input_rejected() {
        let r = qq(&["x", "y"]);
        let f = p(&r, &[(1, &[2, 0]), (1, &[0, 3])]);
        assert!(matches!(ideal_basis(&r, &[f], &MonomialOrder::degrevlex()), Err(AlgebraError::Inhomogeneous(_))));
    }

    #[test]
    fn syzygy_examples() {
        let r = qq(&["x", "y"]);
        let o = MonomialOrder::degrevlex();
        let s = FreeModuleSpec::ring(1);
        let gens = vec![mv(p(&r, &[(1, &[2, 0])])), mv(p(&r, &[(1, &[1, 1])]))];
        let gb = buchberger_tracked(&r, &s, &gens, &o).unwrap();
        let syz = syzygies(&gb, &gens).unwrap();
        assert_eq!(syz.source.twists, vec![Multidegree::single(2); 2]);
        assert_eq!(syz.syzygies.len(), 1);
        let z = &syz.syzygies[0];
        let combo = r.combine(z, &gens, 1).unwrap();
        assert!(combo.is_zero());
        // (y, -x) up to sign
        let rendered = format!("{} {}", r.render(&z.entries[0]), r.render(&z.entries[1]));
        assert!(rendered == "y -x" || rendered == "-y x", "{rendered}");

        let gens = vec![mv(r.var(0)), mv(r.var(1))];
        let gb = buchberger_tracked(&r, &s, &gens, &o).unwrap();
        let syz = syzygies(&gb, &gens).unwrap();
        assert_eq!(syz.syzygies.len(), 1);
        assert!(r.combine(&syz.syzygies[0], &gens, 1).unwrap().is_zero());

        let gens = vec![mv(p(&r, &[(1, &[2, 0]), (1, &[1, 1])]))];
        let gb = buchberger_tracked(&r, &s, &gens, &o).unwrap();
        assert!(syzygies(&gb, &gens).unwrap().syzygies.is_empty());
    }

    #[test]
    fn syzygies_need_tracking() {
        let r = qq(&["x", "y"]);
        let gens = vec![mv(r.var(0))];
        let gb = buchberger(&r, &FreeModuleSpec::ring(1), &gens, &MonomialOrder::degrevlex()).unwrap();
        assert_eq!(syzygies(&gb, &gens).unwrap_err(), AlgebraError::Untracked);
        let gb = buchberger_tracked(&r, &FreeModuleSpec::ring(1), &gens, &MonomialOrder::degrevlex()).unwrap();
        assert_eq!(syzygies(&gb, &[mv(r.var(1))]).unwrap_err(), AlgebraError::GeneratorMismatch);
    }

    #[test]
    fn elimination_examples() {
        let k = FieldSpec::Rationals;
        let ring = RingSpec::new(
            k,
            vec![
                ("t".into(), Multidegree::pair(0, 1)),
                ("x".into(), Multidegree::pair(1, 0)),
                ("y".into(), Multidegree::pair(1, 0)),
                ("Y1".into(), Multidegree::pair(1, 1)),
                ("Y2".into(), Multidegree::pair(1, 1)),
            ],
        )
        .unwrap();
        let f1 = p(&ring, &[(1, &[0, 0, 0, 1, 0]), (-1, &[1, 1, 0, 0, 0])]);
        let f2 = p(&ring, &[(1, &[0, 0, 0, 0, 1]), (-1, &[1, 0, 1, 0, 0])]);
        let (sub, gens) = eliminate(&ring, &[f1, f2], &[1, 2, 3, 4]).unwrap();
        assert_eq!(gens.len(), 1);
        assert_eq!(sub.render(&gens[0]), "y*Y1 - x*Y2");

        let r = qq(&["x", "y"]);
        let (sub, gens) = eliminate(&r, &[p(&r, &[(1, &[2, 0])])], &[0]).unwrap();
        assert_eq!(gens.len(), 1);
        assert_eq!(sub.render(&gens[0]), "x^2");

        let r = qq(&["t", "x"]);
        let (_, gens) = eliminate(&r, &[r.var(0)], &[1]).unwrap();
        assert!(gens.is_empty());
    }

    /// Degree slice of an ideal by spanning monomial multiples (membership oracle).
    fn slice_echelon(r: &RingSpec, gens: &[Polynomial], d: i64) -> (Echelon, Vec<Monomial>) {
        let basis = r.monomials_of_degree(Multidegree::single(d));
        let idx: std::collections::HashMap<Monomial, u32> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i as u32)).collect();
        let mut e = Echelon::new(r.field(), basis.len());
        for g in gens {
            let gd = r.homogeneous_degree(g).unwrap().unwrap().first();
            for m in r.monomials_of_degree(Multidegree::single(d - gd)) {
                let mut row: Vec<(u32, FieldValue)> = g.terms().map(|(t, c)| (idx[&t.mul(&m)], c.clone())).collect();
                row.sort_by_key(|x| x.0);
                e.insert(row);
            }
        }
        (e, basis)
    }

    fn to_row(r: &RingSpec, f: &Polynomial, basis: &[Monomial]) -> Vec<(u32, FieldValue)> {
        let _ = r;
        let mut row: Vec<(u32, FieldValue)> =
            f.terms().map(|(t, c)| (basis.iter().position(|b| b == t).unwrap() as u32, c.clone())).collect();
        row.sort_by_key(|x| x.0);
        row
    }

    fn arb_ideal() -> impl Strategy<Value = (Vec<Vec<(i64, Vec<u32>)>>, Vec<i64>)> {
        let gen = (1u32..4).prop_flat_map(|d| {
            proptest::collection::vec((-2i64..3, proptest::collection::vec(0u32..=d, 3)), 1..4).prop_map(move |ts| {
                ts.into_iter()
                    .filter_map(|(c, mut e)| {
                        let s: u32 = e.iter().sum();
                        if s > d {
                            return None;
                        }
                        e[2] += d - s;
                        Some((c, e))
                    })
                    .collect::<Vec<_>>()
            })
        });
        (proptest::collection::vec(gen, 1..4), proptest::collection::vec(-2i64..3, 6))
    }

    fn build(r: &RingSpec, raw: &[Vec<(i64, Vec<u32>)>]) -> Vec<Polynomial> {
        let mut out = Vec::new();
        for g in raw {
            let mut f = r.zero();
            for (c, e) in g {
                f = r.add(&f, &Polynomial::monomial(r.field().from_i64(*c), Monomial::from_exponents(e.clone()))).unwrap();
            }
            if !f.is_zero() {
                out.push(f);
            }
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn membership_and_leading_terms_match_slices((raw, coeffs) in arb_ideal()) {
            let r = RingSpec::standard(FieldSpec::Prime(32003), &["x", "y", "z"]);
            let gens = build(&r, &raw);
            prop_assume!(!gens.is_empty());
            let gb = ideal_basis(&r, &gens, &MonomialOrder::degrevlex()).unwrap();
            for d in 0..6i64 {
                let (e, basis) = slice_echelon(&r, &gens, d);
                // leading monomials of the slice span = leading terms of the GB in degree d
                let lts = basis.iter().filter(|m| gb.is_leading_term(m, 0)).count();
                prop_assert_eq!(lts, e.rank());
                // a random degree-d element is a member iff its normal form vanishes
                let mut f = r.zero();
                for (m, c) in basis.iter().zip(coeffs.iter().cycle()) {
                    f = r.add(&f, &Polynomial::monomial(r.field().from_i64(*c), m.clone())).unwrap();
                }
                if !f.is_zero() {
                    let member = e.contains(to_row(&r, &f, &basis));
                    prop_assert_eq!(gb.contains(&mv(f.clone())).unwrap(), member);
                }
                // every generator multiple lies in the ideal
                if let Some(g) = gens.first() {
                    let gd = r.homogeneous_degree(g).unwrap().unwrap().first();
                    if d >= gd {
                        let m = &r.monomials_of_degree(Multidegree::single(d - gd))[0];
                        prop_assert!(gb.contains(&mv(r.mul_term(g, &r.field().one(), m))).unwrap());
                    }
                }
            }
        }

        #[test]
        fn reduced_basis_independent_of_input_order((raw, _c) in arb_ideal(), seed in 0usize..6) {
            let r = RingSpec::standard(FieldSpec::Rationals, &["x", "y", "z"]);
            let gens = build(&r, &raw);
            prop_assume!(!gens.is_empty());
            let mut shuffled = gens.clone();
            shuffled.rotate_left(seed % gens.len());
            shuffled.reverse();
            let a = ideal_basis(&r, &gens, &MonomialOrder::degrevlex()).unwrap();
            let b = ideal_basis(&r, &shuffled, &MonomialOrder::degrevlex()).unwrap();
            prop_assert_eq!(a.generators, b.generators);
        }

        #[test]
        fn tracked_syzygies_vanish_and_generate((raw, _c) in arb_ideal()) {
            let r = RingSpec::standard(FieldSpec::Prime(32003), &["x", "y", "z"]);
            let gens: Vec<ModuleVector> = build(&r, &raw).into_iter().map(mv).collect();
            prop_assume!(!gens.is_empty());
            let s = FreeModuleSpec::ring(1);
            let gb = buchberger_tracked(&r, &s, &gens, &MonomialOrder::degrevlex()).unwrap();
            // cofactors reproduce the basis
            for (g, c) in gb.generators.iter().zip(gb.cofactors().unwrap()) {
                prop_assert_eq!(&r.combine(c, &gens, 1).unwrap(), g);
            }
            let syz = syzygies(&gb, &gens).unwrap();
            for z in &syz.syzygies {
                prop_assert!(r.combine(z, &gens, 1).unwrap().is_zero());
            }
            // generation, degree by degree: dim span(syz)_d = dim ker(F_d -> S_d)
            let tw: Vec<i64> = syz.source.twists.iter().map(|t| t.first()).collect();
            for d in 0..7i64 {
                let mut cols = Vec::new();
                for (k, t) in tw.iter().enumerate() {
                    for m in r.monomials_of_degree(Multidegree::single(d - t)) {
                        cols.push((k, m));
                    }
                }
                let col_index: std::collections::HashMap<(usize, Monomial), u32> =
                    cols.iter().cloned().enumerate().map(|(i, c)| (c, i as u32)).collect();
                let target = r.monomials_of_degree(Multidegree::single(d));
                let map_rank = {
                    let mut e = Echelon::new(r.field(), target.len());
                    for (k, m) in &cols {
                        let img = r.mul_term(&gens[*k].entries[0], &r.field().one(), m);
                        e.insert(to_row(&r, &img, &target));
                    }
                    e.rank()
                };
                let kernel_dim = cols.len() - map_rank;
                let mut span = Echelon::new(r.field(), cols.len());
                for z in &syz.syzygies {
                    let zd = r.vector_degree(z, &syz.source).unwrap().unwrap().first();
                    if zd > d { continue; }
                    for m in r.monomials_of_degree(Multidegree::single(d - zd)) {
                        let mut row: Vec<(u32, FieldValue)> = Vec::new();
                        for (k, pk) in z.entries.iter().enumerate() {
                            for (t, c) in pk.terms() {
                                row.push((col_index[&(k, t.mul(&m))], c.clone()));
                            }
                        }
                        row.sort_by_key(|x| x.0);
                        span.insert(row);
                    }
                }
                prop_assert_eq!(span.rank(), kernel_dim, "degree {}", d);
            }
        }
    }
}

#[cfg(test)]
mod module_tests {
    use super::*;
    use crate::linalg::Echelon;
    use crate::slices::FreeSlice;
    use proptest::prelude::*;

    #[test]
    fn coprime_leading_terms_in_one_component_still_pair() {
        let r = RingSpec::standard(FieldSpec::Rationals, &["x", "y"]);
        let (x, y) = (r.var(0), r.var(1));
        let f = FreeModuleSpec::new(vec![Multidegree::single(0), Multidegree::single(-1)]);
        let u = vec![
            ModuleVector::new(vec![x.clone(), r.pow(&y, 2).unwrap()]),
            ModuleVector::new(vec![y.clone(), r.pow(&x, 2).unwrap()]),
        ];
        let gb = buchberger(&r, &f, &u, &MonomialOrder::degrevlex()).unwrap();
        let det = r.sub(&r.pow(&x, 3).unwrap(), &r.pow(&y, 3).unwrap()).unwrap();
        assert!(gb.contains(&ModuleVector::new(vec![r.zero(), det])).unwrap());
        assert_eq!(gb.generators.len(), 3);
    }

    fn arb_vectors() -> impl Strategy<Value = (Vec<i64>, Vec<(u32, Vec<Vec<(i64, Vec<u32>)>>)>)> {
        let term = (-2i64..3, proptest::collection::vec(0u32..4, 3));
        let vec_terms = (1u32..4, proptest::collection::vec(proptest::collection::vec(term, 0..3), 2));
        (proptest::collection::vec(0i64..2, 2), proptest::collection::vec(vec_terms, 1..4))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        /// Leading terms of a rank-two basis count the dimension of each slice of the submodule.
        #[test]
        fn rank_two_leading_terms_match_slices((tw, raw) in arb_vectors()) {
            let r = RingSpec::standard(FieldSpec::Prime(32003), &["x", "y", "z"]);
            let space = FreeModuleSpec::new(tw.iter().map(|&t| Multidegree::single(t)).collect());
            let mut gens = Vec::new();
            for (d, comps) in &raw {
                let mut entries = Vec::new();
                for (k, terms) in comps.iter().enumerate() {
                    let e = (*d as i64 - tw[k]).max(0) as u32;
                    let mut p = r.zero();
                    for (c, ex) in terms {
                        let mut ex = ex.clone();
                        let s: u32 = ex.iter().sum();
                        if s > e {
                            continue;
                        }
                        ex[2] += e - s;
                        p = r.add(&p, &Polynomial::monomial(r.field().from_i64(*c), Monomial::from_exponents(ex))).unwrap();
                    }
                    entries.push(p);
                }
                let v = ModuleVector::new(entries);
                if !v.is_zero() && r.vector_degree(&v, &space).unwrap().is_some() {
                    gens.push(v);
                }
            }
            prop_assume!(!gens.is_empty());
            let gb = buchberger(&r, &space, &gens, &MonomialOrder::degrevlex()).unwrap();
            for d in 0..6i64 {
                let slice = FreeSlice::new(&r, &space, Multidegree::single(d));
                let mut e = Echelon::new(r.field(), slice.dim());
                for g in &gens {
                    let gd = r.vector_degree(g, &space).unwrap().unwrap();
                    for m in r.monomials_of_degree(Multidegree::single(d) - gd) {
                        e.insert(slice.coords_of_multiple(&m, g));
                    }
                }
                let lts = slice.basis.iter().filter(|(k, m)| gb.is_leading_term(m, *k)).count();
                prop_assert_eq!(lts, e.rank(), "degree {}", d);
            }
        }
    }
}
