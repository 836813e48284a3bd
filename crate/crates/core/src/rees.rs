//! Rees algebras of homogeneous ideals and the linear-powers criterion.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::asymptotics::{ideal_power, reg_power_sequence, SequenceOptions};
use crate::error::{AlgebraError, Result};
use crate::gb::eliminate;
use crate::poly::{FreeModuleSpec, Multidegree, Polynomial, RingSpec};
use crate::resolve::{betti_table, minimal_free_resolution, BettiTable, PresentedModule, Resolution};
use crate::slices::hilbert_function;
use crate::ExtInt;

/// Presentation `K[x, Y] / J ≅ Rees(I)` with `Y_i ↦ f_i`.
#[derive(Clone, Debug)]
pub struct ReesPresentation {
    /// The ring of `I`.
    pub base: RingSpec,
    /// `K[x, Y]`, bigraded by `deg x = (1,0)` and `deg Y_i = (d_i, 1)`, or `(0, 1)` when normalized.
    pub ring: RingSpec,
    /// Minimal generators `f_i` of `I`.
    pub ideal_generators: Vec<Polynomial>,
    pub degrees: Vec<i64>,
    /// Reduced Groebner basis of the defining ideal.
    pub rees_ideal: Vec<Polynomial>,
    pub normalized: bool,
    pub d: Option<i64>,
    pub warnings: Vec<String>,
}

fn fresh_name(taken: &[String], stem: &str) -> String {
    let mut name = stem.to_string();
    while taken.contains(&name) {
        name.push('_');
    }
    name
}

/// Eliminates `t` from `(Y_i - t f_i)` over `K[t, x, Y]`, where `deg t = (0,1)` keeps every
/// generator bihomogeneous with positive weights throughout.
pub fn rees_ideal(ring: &RingSpec, gens: &[Polynomial]) -> Result<ReesPresentation> {
    if !ring.is_standard() {
        return Err(AlgebraError::NotStandardGraded);
    }
    let mut warnings = Vec::new();
    let nonzero: Vec<Polynomial> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    let fs = ideal_power(ring, &nonzero, 1)?;
    if fs.len() != nonzero.len() {
        warnings.push(format!("generators were not minimal; using {} minimal generators", fs.len()));
    }
    if fs.is_empty() {
        return Err(AlgebraError::ZeroModule);
    }
    let degrees: Vec<i64> = fs.iter().map(|f| ring.homogeneous_degree(f).map(|d| d.unwrap().first())).collect::<Result<_>>()?;
    let n = ring.nvars();
    let g = fs.len();

    let mut taken: Vec<String> = ring.names().to_vec();
    let y_names: Vec<String> = (1..=g)
        .map(|i| {
            let s = fresh_name(&taken, &format!("Y{i}"));
            taken.push(s.clone());
            s
        })
        .collect();
    let t_name = fresh_name(&taken, "t");

    let mut vars = vec![(t_name.clone(), Multidegree::pair(0, 1))];
    vars.extend(ring.names().iter().map(|x| (x.clone(), Multidegree::pair(1, 0))));
    vars.extend(y_names.iter().zip(&degrees).map(|(y, d)| (y.clone(), Multidegree::pair(*d, 1))));
    let work = RingSpec::new(ring.field(), vars)?;
    let embed = |f: &Polynomial| -> Result<Polynomial> {
        let images: Vec<Polynomial> = (0..n).map(|i| work.var(1 + i)).collect();
        ring.substitute(f, &work, &images)
    };
    let mut eqs = Vec::with_capacity(g);
    for (i, f) in fs.iter().enumerate() {
        let tf = work.mul(&work.var(0), &embed(f)?)?;
        eqs.push(work.sub(&work.var(1 + n + i), &tf)?);
    }
    let keep: Vec<usize> = (1..=n + g).collect();
    let (raw_ring, rees) = eliminate(&work, &eqs, &keep)?;

    // exact substitution check: Y_i ↦ t f_i kills every generator
    let tx_vars: Vec<(String, Multidegree)> =
        std::iter::once((t_name, Multidegree::single(1))).chain(ring.names().iter().map(|x| (x.clone(), Multidegree::single(1)))).collect();
    let tx = RingSpec::new(ring.field(), tx_vars)?;
    let mut images: Vec<Polynomial> = (0..n).map(|i| tx.var(1 + i)).collect();
    for f in &fs {
        let lifted = ring.substitute(f, &tx, &(1..=n).map(|i| tx.var(i)).collect::<Vec<_>>())?;
        images.push(tx.mul(&tx.var(0), &lifted)?);
    }
    for p in &rees {
        if !raw_ring.substitute(p, &tx, &images)?.is_zero() {
            return Err(AlgebraError::InvalidArgument(format!("Rees relation {} does not vanish", raw_ring.render(p))));
        }
        if raw_ring.homogeneous_degree(p)?.is_none() {
            return Err(AlgebraError::Inhomogeneous(raw_ring.render(p)));
        }
    }

    let equigenerated = degrees.iter().all(|&d| d == degrees[0]);
    let (ring_out, d) = if equigenerated {
        let vars = raw_ring
            .names()
            .iter()
            .enumerate()
            .map(|(i, name)| (name.clone(), if i < n { Multidegree::pair(1, 0) } else { Multidegree::pair(0, 1) }))
            .collect();
        (RingSpec::new(ring.field(), vars)?, Some(degrees[0]))
    } else {
        (raw_ring, None)
    };
    Ok(ReesPresentation {
        base: ring.clone(),
        ring: ring_out,
        ideal_generators: fs,
        degrees,
        rees_ideal: rees,
        normalized: equigenerated,
        d,
        warnings,
    })
}

impl ReesPresentation {
    /// `K[x, Y] / J` as a presented module over [`Self::ring`].
    pub fn module(&self) -> PresentedModule {
        PresentedModule::quotient(&self.ring, &self.rees_ideal)
    }
}

/// Bigraded Betti numbers with the row maxima `v_i` (first coordinate) and `w_i` (second).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BigradedBetti {
    pub table: BettiTable,
    pub v: Vec<i64>,
    pub w: Vec<i64>,
}

impl BigradedBetti {
    pub fn from_table(table: BettiTable) -> Result<Self> {
        if table.arity != 2 {
            return Err(AlgebraError::InvalidArgument("bigraded Betti numbers need a Z^2-graded ring".into()));
        }
        let len = table.length().map_or(0, |l| l + 1);
        let row_max = |i: usize, f: fn(&Multidegree) -> i64| table.entries.keys().filter(|(k, _)| *k == i).map(|(_, d)| f(d)).max().unwrap();
        let v = (0..len).map(|i| row_max(i, Multidegree::first)).collect();
        let w = (0..len).map(|i| row_max(i, Multidegree::second)).collect();
        Ok(BigradedBetti { table, v, w })
    }
}

pub fn bigraded_resolution(m: &PresentedModule) -> Result<(Resolution, BigradedBetti)> {
    if m.ring.arity() != 2 {
        return Err(AlgebraError::InvalidArgument("bigraded resolution needs a Z^2-graded ring".into()));
    }
    let res = minimal_free_resolution(m)?;
    let bb = BigradedBetti::from_table(betti_table(&res)?)?;
    Ok((res, bb))
}

/// `reg_(1,0) = max_{i ≤ n} (v_i - i)` and `reg_(0,1) = max_{i ≤ m} (w_i - i)`.
pub fn reg_bidirectional(b: &BigradedBetti, n: usize, m: usize) -> (ExtInt, ExtInt) {
    let f = |xs: &[i64], k: usize| xs.iter().enumerate().take(k + 1).map(|(i, x)| ExtInt::Finite(x - i as i64)).max().unwrap_or(ExtInt::NegInf);
    (f(&b.v, n), f(&b.w, m))
}

/// Outcome of the linear-powers test for an equigenerated ideal, with `M = R`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearPowersReport {
    pub d: i64,
    pub reg10: ExtInt,
    pub reg01: ExtInt,
    pub linear_powers: bool,
    /// `(v, reg I^v)` for `v = 1..=budget`.
    pub sequence: Vec<(i64, ExtInt)>,
    /// Whether `reg I^v ≤ v d + reg10` held for every tested `v`.
    pub bound_holds: bool,
    /// Smallest tested `v ≥ 1` with equality, else `0` when `reg10 = 0` (the ring itself).
    pub witness_v: Option<i64>,
    /// `max_{0 ≤ v ≤ budget} (reg I^v - v d)`.
    pub max_excess: ExtInt,
    /// Bidegrees `(i, v)` where `dim Rees_(i,v) ≠ dim (I^v)_(vd+i)`.
    pub degree_mismatches: Vec<(i64, i64)>,
    pub budget: i64,
    pub koszul_consistent: bool,
}

impl LinearPowersReport {
    pub fn bound_text(&self) -> String {
        format!("reg(I^v) <= {}*v + {}", self.d, self.reg10)
    }

    /// The theorem's assertions that can be settled within the budget.
    pub fn passed(&self) -> bool {
        self.bound_holds && self.witness_v.is_some() && self.degree_mismatches.is_empty() && self.koszul_consistent
    }
}

pub fn linear_powers_test(ring: &RingSpec, gens: &[Polynomial], budget: i64) -> Result<LinearPowersReport> {
    let p = rees_ideal(ring, gens)?;
    let d = p.d.ok_or(AlgebraError::NotEquigenerated)?;
    let n = ring.nvars();
    let g = p.ideal_generators.len();
    let (_, bb) = bigraded_resolution(&p.module())?;
    let (reg10, reg01) = reg_bidirectional(&bb, n, g);
    let free = PresentedModule::free(ring, FreeModuleSpec::ring(1));
    let seq = reg_power_sequence(ring, &p.ideal_generators, &free, budget, &SequenceOptions::default())?;
    let sequence: Vec<(i64, ExtInt)> = seq.iter().map(|pt| (pt.v, pt.reg)).collect();
    let koszul_consistent = seq.iter().all(|pt| pt.consistent());
    let excess: Vec<(i64, ExtInt)> = std::iter::once((0, ExtInt::Finite(0)))
        .chain(sequence.iter().map(|(v, r)| (*v, r.add(-v * d))))
        .collect();
    let bound_holds = excess.iter().all(|(_, e)| *e <= reg10);
    let witness_v = excess.iter().skip(1).chain(excess.iter().take(1)).find(|(_, e)| *e == reg10).map(|(v, _)| *v);
    let max_excess = excess.iter().map(|(_, e)| *e).max().unwrap();
    let degree_mismatches = degreewise_mismatches(&p, 6, 4)?;
    Ok(LinearPowersReport {
        d,
        reg10,
        reg01,
        linear_powers: reg10 == ExtInt::Finite(0),
        sequence,
        bound_holds,
        witness_v,
        max_excess,
        degree_mismatches,
        budget,
        koszul_consistent,
    })
}

/// Compares `dim (K[x,Y]/J)_(i,v)` with `dim (I^v)_(vd+i)` for `0 ≤ i ≤ i_max`, `0 ≤ v ≤ v_max`.
pub fn degreewise_mismatches(p: &ReesPresentation, i_max: i64, v_max: i64) -> Result<Vec<(i64, i64)>> {
    let d = p.d.ok_or(AlgebraError::NotEquigenerated)?;
    let rees = p.module();
    let mut powers: BTreeMap<i64, PresentedModule> = BTreeMap::new();
    for v in 0..=v_max {
        powers.insert(v, PresentedModule::ideal(&p.base, &ideal_power(&p.base, &p.ideal_generators, v as u32)?));
    }
    let model = crate::slices::SubquotientModel::new(&rees)?;
    let mut out = Vec::new();
    for v in 0..=v_max {
        for i in 0..=i_max {
            let lhs = model.dim(Multidegree::pair(i, v));
            let rhs = hilbert_function(&powers[&v], Multidegree::single(v * d + i))?;
            if lhs != rhs {
                out.push((i, v));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::poly::Monomial;

    fn qq(names: &[&str]) -> RingSpec {
        RingSpec::standard(FieldSpec::Rationals, names)
    }

    fn mono(r: &RingSpec, e: &[u32]) -> Polynomial {
        Polynomial::monomial(r.field().one(), Monomial::from_exponents(e.to_vec()))
    }

    #[test]
    fn rees_of_maximal_ideal() {
        let r = qq(&["x", "y"]);
        let p = rees_ideal(&r, &[r.var(0), r.var(1)]).unwrap();
        assert!(p.normalized);
        assert_eq!(p.rees_ideal.len(), 1);
        assert_eq!(p.ring.render(&p.rees_ideal[0]), "y*Y1 - x*Y2");
        let (res, bb) = bigraded_resolution(&p.module()).unwrap();
        assert!(res.verify().unwrap());
        assert_eq!(bb.table.get(1, Multidegree::pair(1, 1)), 1);
        assert_eq!((bb.v.clone(), bb.w.clone()), (vec![0, 1], vec![0, 1]));
        assert_eq!(reg_bidirectional(&bb, 2, 2), (ExtInt::Finite(0), ExtInt::Finite(0)));
    }

    #[test]
    fn rees_of_principal_ideal() {
        let r = qq(&["x", "y"]);
        let p = rees_ideal(&r, &[r.var(0)]).unwrap();
        assert!(p.rees_ideal.is_empty());
        let (_, bb) = bigraded_resolution(&p.module()).unwrap();
        assert_eq!(bb.v, vec![0]);
    }

    #[test]
    fn rees_of_square_of_maximal_ideal() {
        let r = qq(&["x", "y"]);
        let gens = [mono(&r, &[2, 0]), mono(&r, &[1, 1]), mono(&r, &[0, 2])];
        let p = rees_ideal(&r, &gens).unwrap();
        let shown: Vec<String> = p.rees_ideal.iter().map(|f| p.ring.render(f)).collect();
        assert_eq!(shown.len(), 3, "{shown:?}");
        for rel in ["y*Y1 - x*Y2", "y*Y2 - x*Y3", "Y2^2 - Y1*Y3"] {
            assert!(shown.iter().any(|s| s == rel) || shown.iter().any(|s| s.replace(' ', "") == rel.replace(' ', "")), "{shown:?}");
        }
        let (_, bb) = bigraded_resolution(&p.module()).unwrap();
        for (i, v) in bb.v.iter().enumerate().take(3) {
            assert!(v - i as i64 <= 0);
        }
        assert!(degreewise_mismatches(&p, 6, 4).unwrap().is_empty());
    }

    #[test]
    fn bidirectional_of_principal_relation() {
        let k = FieldSpec::Rationals;
        let s = RingSpec::new(k, vec![("x".into(), Multidegree::pair(1, 0)), ("Y".into(), Multidegree::pair(0, 1))]).unwrap();
        let m = PresentedModule::quotient(&s, &[s.mul(&s.var(0), &s.var(1)).unwrap()]);
        let (_, bb) = bigraded_resolution(&m).unwrap();
        assert_eq!(bb.v, vec![0, 1]);
        assert_eq!(reg_bidirectional(&bb, 1, 1).0, ExtInt::Finite(0));
        let free = PresentedModule::free(&s, FreeModuleSpec::ring(2));
        let (_, bb) = bigraded_resolution(&free).unwrap();
        assert_eq!(reg_bidirectional(&bb, 1, 1), (ExtInt::Finite(0), ExtInt::Finite(0)));
    }

    #[test]
    fn linear_powers_examples() {
        let r = qq(&["x", "y"]);
        let m = [r.var(0), r.var(1)];
        let rep = linear_powers_test(&r, &m, 4).unwrap();
        assert!(rep.linear_powers && rep.passed());
        assert_eq!(rep.sequence.iter().map(|(_, r)| *r).collect::<Vec<_>>(), (1..=4).map(ExtInt::Finite).collect::<Vec<_>>());

        let m2 = [mono(&r, &[2, 0]), mono(&r, &[1, 1]), mono(&r, &[0, 2])];
        let rep = linear_powers_test(&r, &m2, 4).unwrap();
        assert!(rep.linear_powers && rep.passed());
        assert_eq!(rep.sequence.iter().map(|(_, r)| *r).collect::<Vec<_>>(), (1..=4).map(|v| ExtInt::Finite(2 * v)).collect::<Vec<_>>());

        let i = [mono(&r, &[4, 0]), mono(&r, &[3, 1]), mono(&r, &[1, 3]), mono(&r, &[0, 4])];
        let rep = linear_powers_test(&r, &i, 5).unwrap();
        assert_eq!(rep.reg10, ExtInt::Finite(1));
        assert!(!rep.linear_powers);
        assert_eq!(rep.witness_v, Some(1));
        assert!(rep.passed());
        assert_eq!(rep.sequence.iter().map(|(_, r)| *r).collect::<Vec<_>>(), vec![5, 8, 12, 16, 20].into_iter().map(ExtInt::Finite).collect::<Vec<_>>());

        let mixed = [mono(&r, &[2, 0]), mono(&r, &[0, 3])];
        assert_eq!(linear_powers_test(&r, &mixed, 3).unwrap_err(), AlgebraError::NotEquigenerated);
    }
}
