//! Koszul homology `H_i(x; M)_j` by degreewise linear algebra, and regularity read off the
//! graded duals `Ext^k(M, S(-n))` of a minimal resolution.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{AlgebraError, Result};
use crate::linalg::{Echelon, SparseVec};
use crate::par::Exec;
use crate::poly::{FreeModuleSpec, ModuleVector, Multidegree, Polynomial};
use crate::resolve::{minimal_free_resolution, PresentedModule, Resolution};
use crate::slices::{free_map_rank, FreeSlice, QuotientSlice, SubquotientModel};
use crate::ExtInt;

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// The Koszul complex `Λ^• K^n ⊗ M` restricted to degrees `lo..=hi`.
struct KoszulComplex {
    n: usize,
    lo: i64,
    wedges: Vec<Vec<Vec<usize>>>,
    wedge_index: Vec<HashMap<Vec<usize>, usize>>,
    slices: BTreeMap<i64, QuotientSlice>,
    /// `mult[(var, d)]`: multiplication `M_d → M_{d+1}`.
    mult: HashMap<(usize, i64), Vec<SparseVec>>,
    model: SubquotientModel,
}

impl KoszulComplex {
    fn new(m: &PresentedModule, lo: i64, hi: i64, exec: Exec) -> Result<Self> {
        if !m.ring.is_standard() {
            return Err(AlgebraError::NotStandardGraded);
        }
        let n = m.ring.nvars();
        let model = SubquotientModel::new(m)?;
        let degrees: Vec<i64> = (lo..=hi).collect();
        let slices: BTreeMap<i64, QuotientSlice> =
            degrees.iter().copied().zip(exec.map(&degrees, |&d| model.slice(Multidegree::single(d)))).collect();
        let jobs: Vec<(usize, i64)> = (0..n).flat_map(|v| (lo..hi).map(move |d| (v, d))).collect();
        let mats = exec.map(&jobs, |&(v, d)| model.multiplication(&slices[&d], &slices[&(d + 1)], v));
        let mult = jobs.into_iter().zip(mats).collect();
        let wedges: Vec<Vec<Vec<usize>>> = (0..=n).map(|k| subsets(n, k)).collect();
        let wedge_index = wedges.iter().map(|w| w.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect()).collect();
        Ok(KoszulComplex { n, lo, wedges, wedge_index, slices, mult, model })
    }

    fn slice_dim(&self, d: i64) -> usize {
        self.slices.get(&d).map_or(0, |s| s.dim())
    }

    /// `dim (Λ^i ⊗ M)_j`.
    fn chain_dim(&self, i: usize, j: i64) -> usize {
        self.wedges[i].len() * self.slice_dim(j - i as i64)
    }

    /// Rank of `∂_i : (Λ^i ⊗ M)_j → (Λ^{i-1} ⊗ M)_j`.
    fn boundary_rank(&self, i: usize, j: i64) -> usize {
        if i == 0 || i > self.n {
            return 0;
        }
        let d = j - i as i64;
        let (src, tgt) = (self.slice_dim(d), self.slice_dim(d + 1));
        if src == 0 || tgt == 0 || d < self.lo {
            return 0;
        }
        let field = self.model.ring.field();
        let mut e = Echelon::new(field, self.wedges[i - 1].len() * tgt);
        for sigma in &self.wedges[i] {
            for b in 0..src {
                let mut row: SparseVec = Vec::new();
                for (t, &var) in sigma.iter().enumerate() {
                    let mut face = sigma.clone();
                    face.remove(t);
                    let block = self.wedge_index[i - 1][&face] * tgt;
                    let neg = t % 2 == 1;
                    for (c, val) in &self.mult[&(var, d)][b] {
                        let v = if neg { field.neg(val) } else { val.clone() };
                        row.push((block as u32 + c, v));
                    }
                }
                row.sort_by_key(|x| x.0);
                e.insert(row);
            }
        }
        e.rank()
    }
}

/// Ranks of Koszul homology up to a degree bound, with the regularity they determine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KoszulSummary {
    /// Nonzero `dim H_i(x; M)_j`, keyed by `(i, j)`.
    pub ranks: BTreeMap<(usize, i64), usize>,
    /// Nonzero `dim (Λ^i ⊗ M)_j`, for the Euler characteristic check.
    pub chain_dims: BTreeMap<(usize, i64), usize>,
    /// `t_i`: top degree of nonzero `H_i`, per `i = 0..=n`.
    pub t: Vec<ExtInt>,
    pub reg1: ExtInt,
    pub bound_used: i64,
}

impl KoszulSummary {
    pub fn rank(&self, i: usize, j: i64) -> usize {
        self.ranks.get(&(i, j)).copied().unwrap_or(0)
    }
}

#[derive(Serialize)]
struct RankEntry {
    i: usize,
    j: i64,
    rank: usize,
}

impl Serialize for KoszulSummary {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let ranks: Vec<RankEntry> = self.ranks.iter().map(|(&(i, j), &rank)| RankEntry { i, j, rank }).collect();
        let mut st = s.serialize_struct("KoszulSummary", 4)?;
        st.serialize_field("bound_used", &self.bound_used)?;
        st.serialize_field("ranks", &ranks)?;
        st.serialize_field("reg1", &self.reg1)?;
        st.serialize_field("t", &self.t)?;
        st.end()
    }
}

fn lowest_degree(m: &PresentedModule) -> Result<Option<i64>> {
    let pres = crate::resolve::presentation_of(m)?;
    Ok(pres.generator_degrees()?.iter().map(|d| d.first()).min())
}

/// `dim H_i(x; M)_j`.
pub fn koszul_homology(m: &PresentedModule, i: usize, j: i64) -> Result<usize> {
    let n = m.ring.nvars();
    if i > n {
        return Ok(0);
    }
    let Some(lo) = lowest_degree(m)? else { return Ok(0) };
    if j - (i as i64) < lo {
        return Ok(0);
    }
    let cx = KoszulComplex::new(m, lo.max(j - i as i64 - 1), j - i as i64 + 1, Exec::Sequential)?;
    Ok(cx.chain_dim(i, j) - cx.boundary_rank(i, j) - cx.boundary_rank(i + 1, j))
}

pub fn koszul_summary(m: &PresentedModule, bound: i64) -> Result<KoszulSummary> {
    koszul_summary_with(m, bound, Exec::default())
}

/// Koszul homology ranks for every `i` and every `j ≤ bound`.
pub fn koszul_summary_with(m: &PresentedModule, bound: i64, exec: Exec) -> Result<KoszulSummary> {
    let n = m.ring.nvars();
    if !m.ring.is_standard() {
        return Err(AlgebraError::NotStandardGraded);
    }
    let mut out = KoszulSummary {
        ranks: BTreeMap::new(),
        chain_dims: BTreeMap::new(),
        t: vec![ExtInt::NegInf; n + 1],
        reg1: ExtInt::NegInf,
        bound_used: bound,
    };
    let Some(lo) = lowest_degree(m)? else { return Ok(out) };
    if bound < lo {
        return Ok(out);
    }
    let cx = KoszulComplex::new(m, lo, bound, exec)?;
    let jobs: Vec<(usize, i64)> = (lo..=bound).flat_map(|j| (1..=n).map(move |i| (i, j))).collect();
    let ranks: HashMap<(usize, i64), usize> = jobs.iter().copied().zip(exec.map(&jobs, |&(i, j)| cx.boundary_rank(i, j))).collect();
    let r = |i: usize, j: i64| ranks.get(&(i, j)).copied().unwrap_or(0);
    for j in lo..=bound {
        for i in 0..=n {
            let c = cx.chain_dim(i, j);
            if c > 0 {
                out.chain_dims.insert((i, j), c);
            }
            let h = c - r(i, j) - r(i + 1, j);
            if h > 0 {
                out.ranks.insert((i, j), h);
                out.t[i] = out.t[i].max(ExtInt::Finite(j));
                out.reg1 = out.reg1.max(ExtInt::Finite(j - i as i64));
            }
        }
    }
    Ok(out)
}

/// Ranks of `Ext^k(M, S(-n))_j` found while scanning, and the regularity they give.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityReport {
    pub ext_bidegrees: BTreeMap<(usize, i64), usize>,
    pub reg_via_duality: ExtInt,
}

impl Serialize for DualityReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        #[derive(Serialize)]
        struct E {
            k: usize,
            j: i64,
            rank: usize,
        }
        let ext: Vec<E> = self.ext_bidegrees.iter().map(|(&(k, j), &rank)| E { k, j, rank }).collect();
        let mut st = s.serialize_struct("DualityReport", 2)?;
        st.serialize_field("ext", &ext)?;
        st.serialize_field("reg_via_duality", &self.reg_via_duality)?;
        st.end()
    }
}

pub fn reg_via_duality(m: &PresentedModule) -> Result<DualityReport> {
    reg_via_duality_of(&minimal_free_resolution(m)?)
}

/// Dualizes a minimal resolution into `S(-n)` and takes cohomology degreewise. Local duality
/// turns a nonzero `Ext^k(M, S(-n))_j` into nonzero local cohomology `H^{n-k}(M)_{-j}`.
pub fn reg_via_duality_of(res: &Resolution) -> Result<DualityReport> {
    let ring = &res.ring;
    if !ring.is_standard() {
        return Err(AlgebraError::NotStandardGraded);
    }
    let n = ring.nvars() as i64;
    let mut report = DualityReport { ext_bidegrees: BTreeMap::new(), reg_via_duality: ExtInt::NegInf };
    let Some(pd) = res.length() else { return Ok(report) };
    let duals: Vec<FreeModuleSpec> = res
        .free_modules
        .iter()
        .map(|f| FreeModuleSpec::new(f.twists.iter().map(|t| Multidegree::single(n - t.first())).collect()))
        .collect();
    // δ^k(e*_l) = Σ_{l'} d_{k+1}[l']_l e*_{l'}
    let coboundary: Vec<Vec<ModuleVector>> = (0..pd)
        .map(|k| {
            let d = &res.differentials[k];
            (0..duals[k].rank())
                .map(|l| ModuleVector::new(d.iter().map(|col| col.entries[l].clone()).collect::<Vec<Polynomial>>()))
                .collect()
        })
        .collect();
    let ext_dim = |k: usize, j: i64| -> usize {
        let deg = Multidegree::single(j);
        let dim = FreeSlice::new(ring, &duals[k], deg).dim();
        let out = if k < pd { free_map_rank(ring, &duals[k], &duals[k + 1], &coboundary[k], deg) } else { 0 };
        let inc = if k > 0 { free_map_rank(ring, &duals[k - 1], &duals[k], &coboundary[k - 1], deg) } else { 0 };
        dim - out - inc
    };
    let t0 = |k: usize| res.free_modules[k].twists.iter().map(|t| t.first()).max().unwrap();
    let lowest = res.free_modules.iter().flat_map(|f| f.twists.iter().map(|t| t.first())).min().unwrap();
    let horizon = 2 * n - lowest + 1;
    for k in (0..=pd).rev() {
        let mut j = n - t0(k);
        loop {
            let value = n - k as i64 - j;
            if matches!(report.reg_via_duality, ExtInt::Finite(b) if value <= b) {
                break;
            }
            if j > horizon {
                return Err(AlgebraError::InvalidArgument("Ext scan found no nonzero top cohomology".into()));
            }
            let dim = ext_dim(k, j);
            report.ext_bidegrees.insert((k, j), dim);
            if dim > 0 {
                report.reg_via_duality = report.reg_via_duality.max(ExtInt::Finite(value));
                break;
            }
            j += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::poly::{Monomial, RingSpec};
    use crate::resolve::{betti_table, regularity, summary};
    use proptest::prelude::*;

    fn mono(r: &RingSpec, e: &[u32]) -> Polynomial {
        Polynomial::monomial(r.field().one(), Monomial::from_exponents(e.to_vec()))
    }

    #[test]
    fn koszul_examples() {
        let r = RingSpec::standard(FieldSpec::Rationals, &["x", "y"]);
        let s = PresentedModule::free(&r, FreeModuleSpec::ring(1));
        assert_eq!(koszul_homology(&s, 0, 0).unwrap(), 1);
        for j in 0..5 {
            assert_eq!(koszul_homology(&s, 1, j).unwrap(), 0);
        }
        let k = PresentedModule::quotient(&r, &[r.var(0), r.var(1)]);
        assert_eq!(koszul_homology(&k, 2, 2).unwrap(), 1);
        assert_eq!(koszul_homology(&k, 1, 1).unwrap(), 2);
        let sum = koszul_summary(&k, 3).unwrap();
        assert_eq!(sum.reg1, ExtInt::Finite(0));

        let i = PresentedModule::ideal(&r, &[mono(&r, &[2, 0]), mono(&r, &[1, 1])]);
        assert_eq!(koszul_summary(&i, 5).unwrap().reg1, ExtInt::Finite(2));
        assert_eq!(koszul_summary(&s, 3).unwrap().reg1, ExtInt::Finite(0));
    }

    #[test]
    fn duality_examples() {
        let r = RingSpec::standard(FieldSpec::Rationals, &["x", "y"]);
        let s = PresentedModule::free(&r, FreeModuleSpec::ring(1));
        let rep = reg_via_duality(&s).unwrap();
        assert_eq!(rep.reg_via_duality, ExtInt::Finite(0));
        assert!(rep.ext_bidegrees.iter().all(|(&(k, _), &v)| v == 0 || k == 0));

        let r1 = RingSpec::standard(FieldSpec::Rationals, &["x"]);
        let q = PresentedModule::quotient(&r1, &[mono(&r1, &[2])]);
        assert_eq!(reg_via_duality(&q).unwrap().reg_via_duality, ExtInt::Finite(1));

        for a in 0..4 {
            let f = PresentedModule::free(&r, FreeModuleSpec::new(vec![Multidegree::single(a)]));
            assert_eq!(reg_via_duality(&f).unwrap().reg_via_duality, ExtInt::Finite(a));
        }
    }

    #[test]
    fn bigraded_rings_are_rejected() {
        let r = RingSpec::new(FieldSpec::Rationals, vec![("x".into(), Multidegree::pair(1, 0))]).unwrap();
        let m = PresentedModule::free(&r, FreeModuleSpec::ring(2));
        assert_eq!(koszul_summary(&m, 3).unwrap_err(), AlgebraError::NotStandardGraded);
    }

    fn arb_ideal() -> impl Strategy<Value = Vec<Vec<(i64, Vec<u32>)>>> {
        let gen = (1u32..4).prop_flat_map(|d| {
            proptest::collection::vec((-2i64..3, proptest::collection::vec(0u32..=d, 3)), 1..4).prop_map(move |ts| {
                ts.into_iter()
                    .filter_map(|(c, mut e)| {
                        let s: u32 = e.iter().sum();
                        (s <= d).then(|| {
                            e[2] += d - s;
                            (c, e)
                        })
                    })
                    .collect::<Vec<_>>()
            })
        });
        proptest::collection::vec(gen, 2..6)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn three_regularities_agree(raw in arb_ideal(), quotient in any::<bool>()) {
            let r = RingSpec::standard(FieldSpec::Prime(32003), &["x", "y", "z"]);
            let mut gens = Vec::new();
            for g in &raw {
                let mut f = r.zero();
                for (c, e) in g {
                    f = r.add(&f, &Polynomial::monomial(r.field().from_i64(*c), Monomial::from_exponents(e.clone()))).unwrap();
                }
                if !f.is_zero() { gens.push(f); }
            }
            prop_assume!(!gens.is_empty());
            let m = if quotient { PresentedModule::quotient(&r, &gens) } else { PresentedModule::ideal(&r, &gens) };
            let res = minimal_free_resolution(&m).unwrap();
            let b = betti_table(&res).unwrap();
            let reg3 = summary(&b, 3).unwrap().reg3;
            let ExtInt::Finite(reg) = reg3 else { return Ok(()); };
            let k = koszul_summary(&m, reg + 4).unwrap();
            prop_assert_eq!(k.reg1, reg3);
            prop_assert_eq!(reg_via_duality_of(&res).unwrap().reg_via_duality, reg3);
            for i in 0..=3usize {
                for j in 0..=reg + i as i64 + 1 {
                    prop_assert_eq!(k.rank(i, j), b.get(i, Multidegree::single(j)), "i={} j={}", i, j);
                }
            }
            for j in 0..=reg + 4 {
                let euler_chain: i64 = (0..=3usize).map(|i| (if i % 2 == 0 { 1 } else { -1 }) * k.chain_dims.get(&(i, j)).copied().unwrap_or(0) as i64).sum();
                let euler_h: i64 = (0..=3usize).map(|i| (if i % 2 == 0 { 1 } else { -1 }) * k.rank(i, j) as i64).sum();
                prop_assert_eq!(euler_chain, euler_h);
            }
            prop_assert_eq!(regularity(&m).unwrap(), reg3);
        }
    }
}

#[cfg(test)]
mod module_tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::poly::{Monomial, RingSpec};
    use crate::resolve::{betti_table, summary};
    use proptest::prelude::*;

    type RawPoly = Vec<(i64, Vec<u32>)>;

    fn arb_poly(d: u32) -> impl Strategy<Value = RawPoly> {
        proptest::collection::vec((-2i64..3, proptest::collection::vec(0u32..=d, 3)), 1..4).prop_map(move |ts| {
            ts.into_iter()
                .filter_map(|(c, mut e)| {
                    let s: u32 = e.iter().sum();
                    (s <= d).then(|| {
                        e[2] += d - s;
                        (c, e)
                    })
                })
                .collect()
        })
    }

    /// Row twists in `-1..=1` and columns whose entries are homogeneous of degree `D - twist`.
    fn arb_cokernel() -> impl Strategy<Value = (Vec<i64>, Vec<Vec<RawPoly>>)> {
        proptest::collection::vec(-1i64..2, 2..4).prop_flat_map(|tw| {
            let t = tw.clone();
            let col = (2u32..4).prop_flat_map(move |dd| {
                t.iter().map(|&k| arb_poly((dd as i64 - k).max(0) as u32)).collect::<Vec<_>>()
            });
            (Just(tw), proptest::collection::vec(col, 1..4))
        })
    }

    fn build(r: &RingSpec, raw: &RawPoly) -> Polynomial {
        let mut f = r.zero();
        for (c, e) in raw {
            f = r.add(&f, &Polynomial::monomial(r.field().from_i64(*c), Monomial::from_exponents(e.clone()))).unwrap();
        }
        f
    }

    #[test]
    fn cokernel_of_coprime_leading_columns() {
        let r = RingSpec::standard(FieldSpec::Rationals, &["x", "y"]);
        let (x, y) = (r.var(0), r.var(1));
        let cols = vec![
            ModuleVector::new(vec![x.clone(), r.pow(&y, 2).unwrap()]),
            ModuleVector::new(vec![y.clone(), r.pow(&x, 2).unwrap()]),
        ];
        let f = FreeModuleSpec::new(vec![Multidegree::single(0), Multidegree::single(-1)]);
        let m = PresentedModule::cokernel(&r, f, cols);
        let hf: Vec<usize> = (-1..5).map(|d| crate::slices::hilbert_function(&m, Multidegree::single(d)).unwrap()).collect();
        assert_eq!(hf, vec![1, 3, 3, 3, 3, 3]);
        assert_eq!(koszul_summary(&m, 5).unwrap().reg1, ExtInt::Finite(0));
        assert_eq!(reg_via_duality(&m).unwrap().reg_via_duality, ExtInt::Finite(0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn three_regularities_agree_on_cokernels((tw, raw) in arb_cokernel()) {
            let r = RingSpec::standard(FieldSpec::Prime(32003), &["x", "y", "z"]);
            let cols: Vec<ModuleVector> = raw.iter().map(|c| ModuleVector::new(c.iter().map(|p| build(&r, p)).collect())).collect();
            let f = FreeModuleSpec::new(tw.iter().map(|&t| Multidegree::single(t)).collect());
            let m = PresentedModule::cokernel(&r, f, cols);
            let res = minimal_free_resolution(&m).unwrap();
            prop_assert!(res.verify().unwrap());
            let b = betti_table(&res).unwrap();
            let reg3 = summary(&b, 3).unwrap().reg3;
            let ExtInt::Finite(reg) = reg3 else { return Ok(()); };
            let k = koszul_summary(&m, reg + 4).unwrap();
            prop_assert_eq!(k.reg1, reg3);
            prop_assert_eq!(reg_via_duality_of(&res).unwrap().reg_via_duality, reg3);
            for i in 0..=3usize {
                for j in -1..=reg + i as i64 + 1 {
                    prop_assert_eq!(k.rank(i, j), b.get(i, Multidegree::single(j)), "i={} j={}", i, j);
                }
            }
        }
    }
}
