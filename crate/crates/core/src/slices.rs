//! Homogeneous components of free modules and of subquotient modules as explicit vector spaces.

use std::collections::HashMap;

use crate::error::Result;
use crate::gb::{buchberger, Reducer, SVec, Term};
use crate::linalg::{Echelon, SparseVec};
use crate::poly::{FreeModuleSpec, ModuleVector, Monomial, MonomialOrder, Multidegree, RingSpec};
use crate::resolve::PresentedModule;

/// The degree-`d` part of a free module: basis `m e_k` with `deg m + twist_k = d`.
pub struct FreeSlice {
    pub basis: Vec<(usize, Monomial)>,
    index: HashMap<(usize, Monomial), u32>,
}

impl FreeSlice {
    pub fn new(ring: &RingSpec, space: &FreeModuleSpec, d: Multidegree) -> Self {
        let mut basis = Vec::new();
        for (k, t) in space.twists.iter().enumerate() {
            for m in ring.monomials_of_degree(d - *t) {
                basis.push((k, m));
            }
        }
        let index = basis.iter().cloned().enumerate().map(|(i, b)| (b, i as u32)).collect();
        FreeSlice { basis, index }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a homogeneous vector of this degree.
    pub fn coords(&self, v: &ModuleVector) -> SparseVec {
        let mut row: SparseVec = v.terms().map(|(m, k, c)| (self.index[&(k, m.clone())], c.clone())).collect();
        row.sort_by_key(|e| e.0);
        row
    }

    /// Coordinates of `m * v`.
    pub fn coords_of_multiple(&self, m: &Monomial, v: &ModuleVector) -> SparseVec {
        let mut row: SparseVec = v.terms().map(|(t, k, c)| (self.index[&(k, t.mul(m))], c.clone())).collect();
        row.sort_by_key(|e| e.0);
        row
    }
}

/// Rank in degree `d` of the map `src → tgt` sending the `l`-th basis vector to `images[l]`.
pub fn free_map_rank(ring: &RingSpec, src: &FreeModuleSpec, tgt: &FreeModuleSpec, images: &[ModuleVector], d: Multidegree) -> usize {
    let ts = FreeSlice::new(ring, tgt, d);
    let mut e = Echelon::new(ring.field(), ts.dim());
    for (l, t) in src.twists.iter().enumerate() {
        if images[l].is_zero() {
            continue;
        }
        for m in ring.monomials_of_degree(d - *t) {
            e.insert(ts.coords_of_multiple(&m, &images[l]));
        }
    }
    e.rank()
}

/// A subquotient `M = (G + U) / U` ready for degreewise linear algebra.
///
/// In each degree the basis of `M_d` is indexed by the terms of `in(G+U) \ in(U)`; the basis
/// vector for a term `T` is the `U`-normal form of a multiple of a Groebner element of `G + U`
/// with leading term `T`, so coordinates follow by triangular elimination.
pub(crate) struct SubquotientModel {
    pub ring: RingSpec,
    pub ambient: FreeModuleSpec,
    total: Reducer,
    relations: Option<Reducer>,
}

pub(crate) struct QuotientSlice {
    pub basis: Vec<SVec>,
    index: HashMap<(Monomial, u32), u32>,
}

impl QuotientSlice {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

impl SubquotientModel {
    pub fn new(m: &PresentedModule) -> Result<Self> {
        let order = MonomialOrder::degrevlex();
        let all: Vec<ModuleVector> = m.generators.iter().chain(&m.relations).cloned().collect();
        let total = Reducer::new(&buchberger(&m.ring, &m.ambient, &all, &order)?);
        let relations = if m.relations.iter().all(|r| r.is_zero()) {
            None
        } else {
            Some(Reducer::new(&buchberger(&m.ring, &m.ambient, &m.relations, &order)?))
        };
        Ok(SubquotientModel { ring: m.ring.clone(), ambient: m.ambient.clone(), total, relations })
    }

    fn terms_of_degree(&self, d: Multidegree) -> impl Iterator<Item = (Monomial, u32)> + '_ {
        self.ambient
            .twists
            .iter()
            .enumerate()
            .flat_map(move |(k, t)| self.ring.monomials_of_degree(d - *t).into_iter().map(move |m| (m, k as u32)))
            .filter(|(m, k)| self.total.is_leading(m, *k) && !self.relations.as_ref().is_some_and(|r| r.is_leading(m, *k)))
    }

    /// `dim M_d`.
    pub fn dim(&self, d: Multidegree) -> usize {
        self.terms_of_degree(d).count()
    }

    pub fn slice(&self, d: Multidegree) -> QuotientSlice {
        let ctx = self.total.ctx();
        let field = self.ring.field();
        let mut basis = Vec::new();
        let mut index = HashMap::new();
        for (m, k) in self.terms_of_degree(d) {
            let (g, q) = self.total.divisor_of(&m, k).expect("leading term");
            let b = ctx.sub_mul(&[], &field.neg(&field.one()), &q, g);
            let b = match &self.relations {
                Some(r) => r.reduce(b),
                None => b,
            };
            index.insert((m, k), basis.len() as u32);
            basis.push(b);
        }
        QuotientSlice { basis, index }
    }

    /// Coordinates in `slice` of the class of `v`, an element of `G + U` of the slice's degree.
    pub fn coords(&self, slice: &QuotientSlice, v: SVec) -> SparseVec {
        let ctx = self.total.ctx();
        let one = Monomial::one(self.ring.nvars());
        let mut v = match &self.relations {
            Some(r) => r.reduce(v),
            None => v,
        };
        let mut out: SparseVec = Vec::new();
        while let Some(Term { mono, comp, coeff }) = v.last() {
            let idx = slice.index[&(mono.clone(), *comp)];
            let c = coeff.clone();
            v = ctx.sub_mul(&v, &c, &one, &slice.basis[idx as usize]);
            out.push((idx, c));
        }
        out.sort_by_key(|e| e.0);
        out
    }

    /// Matrix (one row per source basis vector) of multiplication by variable `var`.
    pub fn multiplication(&self, src: &QuotientSlice, tgt: &QuotientSlice, var: usize) -> Vec<SparseVec> {
        let ctx = self.total.ctx();
        let field = self.ring.field();
        let x = Monomial::var(self.ring.nvars(), var);
        src.basis.iter().map(|b| self.coords(tgt, ctx.sub_mul(&[], &field.neg(&field.one()), &x, b))).collect()
    }
}

/// `dim M_d` for a presented module.
pub fn hilbert_function(m: &PresentedModule, d: Multidegree) -> Result<usize> {
    Ok(SubquotientModel::new(m)?.dim(d))
}
