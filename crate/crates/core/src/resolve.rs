//! Minimal graded free resolutions, Betti tables and the regularity they determine.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{AlgebraError, Result};
use crate::gb::{buchberger, minimal_generators_and_syzygies, minimal_subset, normal_form};
use crate::poly::{FreeModuleSpec, ModuleOrderKind, ModuleVector, Monomial, MonomialOrder, Multidegree, Polynomial, RingSpec, SchreyerData};
use crate::ExtInt;

/// How a [`PresentedModule`] was declared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuleKind {
    Ideal,
    Quotient,
    Submodule,
    Cokernel,
    Subquotient,
}

/// A graded module `(⟨generators⟩ + ⟨relations⟩) / ⟨relations⟩` inside a twisted free module.
#[derive(Clone, Debug, PartialEq)]
pub struct PresentedModule {
    pub ring: RingSpec,
    pub ambient: FreeModuleSpec,
    pub generators: Vec<ModuleVector>,
    pub relations: Vec<ModuleVector>,
    pub kind: ModuleKind,
}

fn unit_vectors(ring: &RingSpec, rank: usize) -> Vec<ModuleVector> {
    (0..rank)
        .map(|k| ModuleVector::term(rank, k, ring.field().one(), Monomial::one(ring.nvars())))
        .collect()
}

impl PresentedModule {
    pub fn ideal(ring: &RingSpec, gens: &[Polynomial]) -> Self {
        PresentedModule {
            ring: ring.clone(),
            ambient: FreeModuleSpec::ring(ring.arity()),
            generators: gens.iter().map(|g| ModuleVector::from_poly(g.clone())).collect(),
            relations: Vec::new(),
            kind: ModuleKind::Ideal,
        }
    }

    /// The cyclic module `S / I`.
    pub fn quotient(ring: &RingSpec, gens: &[Polynomial]) -> Self {
        PresentedModule {
            ring: ring.clone(),
            ambient: FreeModuleSpec::ring(ring.arity()),
            generators: unit_vectors(ring, 1),
            relations: gens.iter().map(|g| ModuleVector::from_poly(g.clone())).collect(),
            kind: ModuleKind::Quotient,
        }
    }

    /// The free module itself.
    pub fn free(ring: &RingSpec, ambient: FreeModuleSpec) -> Self {
        let generators = unit_vectors(ring, ambient.rank());
        PresentedModule { ring: ring.clone(), ambient, generators, relations: Vec::new(), kind: ModuleKind::Cokernel }
    }

    pub fn submodule(ring: &RingSpec, ambient: FreeModuleSpec, gens: Vec<ModuleVector>) -> Self {
        PresentedModule { ring: ring.clone(), ambient, generators: gens, relations: Vec::new(), kind: ModuleKind::Submodule }
    }

    /// `F / ⟨columns⟩`.
    pub fn cokernel(ring: &RingSpec, ambient: FreeModuleSpec, columns: Vec<ModuleVector>) -> Self {
        let generators = unit_vectors(ring, ambient.rank());
        PresentedModule { ring: ring.clone(), ambient, generators, relations: columns, kind: ModuleKind::Cokernel }
    }

    pub fn subquotient(ring: &RingSpec, ambient: FreeModuleSpec, gens: Vec<ModuleVector>, relations: Vec<ModuleVector>) -> Self {
        PresentedModule { ring: ring.clone(), ambient, generators: gens, relations, kind: ModuleKind::Subquotient }
    }

    /// `M(a)`, whose degree `d` part is `M_{a+d}`.
    pub fn twist(&self, a: Multidegree) -> Self {
        PresentedModule { ambient: self.ambient.shifted(a), ..self.clone() }
    }

    pub fn check_homogeneous(&self) -> Result<()> {
        for v in self.generators.iter().chain(&self.relations) {
            if v.rank() != self.ambient.rank() {
                return Err(AlgebraError::RingMismatch);
            }
            if !v.is_zero() && self.ring.vector_degree(v, &self.ambient)?.is_none() {
                return Err(AlgebraError::Inhomogeneous(self.ring.render_vector(v)));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> Result<bool> {
        Ok(minimal_subset(&self.ring, &self.ambient, &self.generators, &self.relations)?.is_empty())
    }

    /// Degrees of the given generators (zero generators are skipped).
    pub fn generator_degrees(&self) -> Result<Vec<Multidegree>> {
        let mut out = Vec::new();
        for g in &self.generators {
            if !g.is_zero() {
                out.push(self.ring.vector_degree(g, &self.ambient)?.ok_or_else(|| AlgebraError::Inhomogeneous(self.ring.render_vector(g)))?);
            }
        }
        Ok(out)
    }
}

/// Normal form of a presentation: generators replaced by a minimal homogeneous generating set,
/// lowest degree first. A zero module comes back with no generators.
pub fn presentation_of(m: &PresentedModule) -> Result<PresentedModule> {
    m.check_homogeneous()?;
    let keep = minimal_subset(&m.ring, &m.ambient, &m.generators, &m.relations)?;
    let mut gens: Vec<(Multidegree, usize)> = keep
        .into_iter()
        .map(|k| Ok((m.ring.vector_degree(&m.generators[k], &m.ambient)?.expect("homogeneous"), k)))
        .collect::<Result<_>>()?;
    gens.sort_by_key(|(d, k)| (d.weight(), *d, *k));
    let relations = m.relations.iter().filter(|r| !r.is_zero()).cloned().collect();
    Ok(PresentedModule { generators: gens.into_iter().map(|(_, k)| m.generators[k].clone()).collect(), relations, ..m.clone() })
}

/// Module order used for the syzygy computations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SyzygyOrder {
    /// Orders `F_i` by the leading terms of the images of its basis (the faster choice).
    #[default]
    Schreyer,
    PositionOverTerm,
}

/// A graded free resolution `⋯ → F_1 → F_0 → M → 0`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub ring: RingSpec,
    pub module: PresentedModule,
    /// `F_0, F_1, …`; empty for the zero module.
    pub free_modules: Vec<FreeModuleSpec>,
    /// Images of the basis of `F_0` in the ambient module of `M`.
    pub augmentation: Vec<ModuleVector>,
    /// `differentials[i - 1]` lists the images in `F_{i-1}` of the basis of `F_i`.
    pub differentials: Vec<Vec<ModuleVector>>,
    pub minimal: bool,
}

fn leading_term(ring: &RingSpec, order: &MonomialOrder, v: &ModuleVector) -> (Monomial, usize) {
    let (m, k, _) = v
        .terms()
        .max_by(|a, b| order.cmp_terms(ring.weights(), a.0, a.1, b.0, b.1))
        .expect("nonzero vector");
    (m.clone(), k)
}

fn degrees_in(ring: &RingSpec, space: &FreeModuleSpec, vs: &[ModuleVector]) -> Vec<Multidegree> {
    vs.iter().map(|v| ring.vector_degree(v, space).ok().flatten().expect("homogeneous syzygy")).collect()
}

/// Minimal free resolution, computed by iterated minimal syzygies: each step keeps only a
/// minimal generating subset of the previous syzygy module, so no unit pivots ever arise.
pub fn minimal_free_resolution(m: &PresentedModule) -> Result<Resolution> {
    minimal_free_resolution_with(m, SyzygyOrder::default())
}

pub fn minimal_free_resolution_with(m: &PresentedModule, syz_order: SyzygyOrder) -> Result<Resolution> {
    m.check_homogeneous()?;
    let ring = &m.ring;
    let base = MonomialOrder::degrevlex();
    let first = minimal_generators_and_syzygies(ring, &m.ambient, &base, &m.generators, &m.relations)?;
    let augmentation: Vec<ModuleVector> = first.kept.iter().map(|&k| m.generators[k].clone()).collect();
    let mut free_modules = Vec::new();
    let mut differentials = Vec::new();
    if augmentation.is_empty() {
        return Ok(Resolution { ring: ring.clone(), module: m.clone(), free_modules, augmentation, differentials, minimal: true });
    }
    let f0 = FreeModuleSpec::new(degrees_in(ring, &m.ambient, &augmentation));
    free_modules.push(f0);

    let mut prev_order = base.clone();
    let mut prev_cols: Vec<ModuleVector> = augmentation.clone();
    let mut pending = first.syzygies;
    let limit = ring.nvars() + 1;
    while !pending.is_empty() {
        let step = differentials.len() + 1;
        if step > limit {
            return Err(AlgebraError::ResolutionTooLong(limit));
        }
        let space = free_modules.last().unwrap().clone();
        let order = match syz_order {
            SyzygyOrder::Schreyer => {
                let leads = prev_cols.iter().map(|c| leading_term(ring, &prev_order, c)).collect();
                base.clone().with_module(ModuleOrderKind::Schreyer(Arc::new(SchreyerData { leads, base: prev_order.clone() })))
            }
            SyzygyOrder::PositionOverTerm => base.clone(),
        };
        let run = minimal_generators_and_syzygies(ring, &space, &order, &pending, &[])?;
        let cols: Vec<ModuleVector> = run.kept.iter().map(|&k| pending[k].clone()).collect();
        free_modules.push(FreeModuleSpec::new(degrees_in(ring, &space, &cols)));
        differentials.push(cols.clone());
        prev_cols = cols;
        prev_order = order;
        pending = run.syzygies;
    }
    Ok(Resolution { ring: ring.clone(), module: m.clone(), free_modules, augmentation, differentials, minimal: true })
}

impl Resolution {
    /// Projective dimension; `None` for the zero module.
    pub fn length(&self) -> Option<usize> {
        self.free_modules.len().checked_sub(1)
    }

    /// Checks `d_{i-1} ∘ d_i = 0`, that `F_0 → M` kills the image of `d_1`, and (for a minimal
    /// resolution) that no differential has a nonzero constant entry.
    pub fn verify(&self) -> Result<bool> {
        let ring = &self.ring;
        if let Some(d1) = self.differentials.first() {
            let rank = self.module.ambient.rank();
            let rel_gb = if self.module.relations.is_empty() {
                None
            } else {
                Some(buchberger(ring, &self.module.ambient, &self.module.relations, &MonomialOrder::degrevlex())?)
            };
            for c in d1 {
                let img = ring.combine(c, &self.augmentation, rank)?;
                let zero = match &rel_gb {
                    Some(gb) => normal_form(&img, gb)?.is_zero(),
                    None => img.is_zero(),
                };
                if !zero {
                    return Ok(false);
                }
            }
        }
        for i in 1..self.differentials.len() {
            let rank = self.free_modules[i - 1].rank();
            for c in &self.differentials[i] {
                if !ring.combine(c, &self.differentials[i - 1], rank)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        if self.minimal {
            for d in &self.differentials {
                for c in d {
                    if c.terms().any(|(m, _, _)| m.is_one()) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Graded Betti numbers `β_{i,j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    pub arity: u8,
    pub entries: BTreeMap<(usize, Multidegree), usize>,
}

#[derive(Serialize)]
struct BettiEntry {
    i: usize,
    degree: Multidegree,
    rank: usize,
}

impl Serialize for BettiTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<BettiEntry> = self.entries.iter().map(|(&(i, degree), &rank)| BettiEntry { i, degree, rank }).collect();
        rows.serialize(s)
    }
}

pub fn betti_table(r: &Resolution) -> Result<BettiTable> {
    if !r.minimal {
        return Err(AlgebraError::NotMinimal);
    }
    let mut entries = BTreeMap::new();
    for (i, f) in r.free_modules.iter().enumerate() {
        for t in &f.twists {
            *entries.entry((i, *t)).or_insert(0) += 1;
        }
    }
    Ok(BettiTable { arity: r.ring.arity(), entries })
}

impl BettiTable {
    pub fn get(&self, i: usize, j: Multidegree) -> usize {
        self.entries.get(&(i, j)).copied().unwrap_or(0)
    }

    /// Largest twist of `F_i` (for `Z`-graded tables).
    pub fn top_degree(&self, i: usize) -> Option<i64> {
        self.entries.keys().filter(|(k, _)| *k == i).map(|(_, d)| d.first()).max()
    }

    pub fn length(&self) -> Option<usize> {
        self.entries.keys().map(|(i, _)| *i).max()
    }

    pub fn total(&self, i: usize) -> usize {
        self.entries.iter().filter(|((k, _), _)| *k == i).map(|(_, r)| r).sum()
    }

    /// The staircase layout: one row per `j - i`, one column per homological index `i`.
    pub fn staircase(&self) -> Result<String> {
        if self.arity != 1 {
            return Err(AlgebraError::BigradedTable);
        }
        let mut out = String::new();
        let Some(len) = self.length() else {
            out.push_str("zero module\n");
            return Ok(out);
        };
        let rows: Vec<i64> = self.entries.keys().map(|(i, d)| d.first() - *i as i64).collect();
        let (lo, hi) = (*rows.iter().min().unwrap(), *rows.iter().max().unwrap());
        let cell = |v: usize| if v == 0 { ".".to_string() } else { v.to_string() };
        let width = self.entries.values().chain(std::iter::once(&0)).map(|v| cell(*v).len()).max().unwrap().max(
            (0..=len).map(|i| self.total(i).to_string().len()).max().unwrap_or(1),
        );
        let label = (lo..=hi).map(|r| format!("{r}:").len()).max().unwrap().max("total:".len());
        let _ = write!(out, "{:>label$}", "");
        for i in 0..=len {
            let _ = write!(out, " {:>width$}", i);
        }
        out.push('\n');
        let _ = write!(out, "{:>label$}", "total:");
        for i in 0..=len {
            let _ = write!(out, " {:>width$}", self.total(i));
        }
        out.push('\n');
        for r in lo..=hi {
            let _ = write!(out, "{:>label$}", format!("{r}:"));
            for i in 0..=len {
                let v = self.get(i, Multidegree::single(r + i as i64));
                let _ = write!(out, " {:>width$}", cell(v));
            }
            out.push('\n');
        }
        Ok(out)
    }
}

/// Numerical invariants of a minimal resolution over a standard graded ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResolutionSummary {
    pub pd: usize,
    pub depth: usize,
    pub t0_per_step: Vec<i64>,
    pub reg2: ExtInt,
    pub reg3: ExtInt,
    pub zero_module: bool,
}

pub fn summary(b: &BettiTable, n: usize) -> Result<ResolutionSummary> {
    if b.arity != 1 {
        return Err(AlgebraError::BigradedTable);
    }
    let Some(pd) = b.length() else {
        return Ok(ResolutionSummary { pd: 0, depth: n, t0_per_step: Vec::new(), reg2: ExtInt::NegInf, reg3: ExtInt::NegInf, zero_module: true });
    };
    let t0: Vec<i64> = (0..=pd).map(|i| b.top_degree(i).expect("resolutions have no gaps")).collect();
    let reg3 = t0.iter().enumerate().map(|(i, t)| t - i as i64).max().unwrap();
    let depth = n.saturating_sub(pd);
    let reg2 = t0.iter().enumerate().take(n - depth + 1).map(|(i, t)| t - i as i64).max().unwrap();
    Ok(ResolutionSummary { pd, depth, t0_per_step: t0, reg2: ExtInt::Finite(reg2), reg3: ExtInt::Finite(reg3), zero_module: false })
}

/// `reg₃(M)` straight from a minimal resolution.
pub fn regularity(m: &PresentedModule) -> Result<ExtInt> {
    if !m.ring.is_standard() {
        return Err(AlgebraError::NotStandardGraded);
    }
    let r = minimal_free_resolution(m)?;
    Ok(summary(&betti_table(&r)?, m.ring.nvars())?.reg3)
}
