use regkit_core::asymptotics::{fit_linear_law, reg_power_sequence, LawFit, SequenceOptions};
use regkit_core::koszul::{koszul_summary_with, reg_via_duality};
use regkit_core::resolve::{betti_table, minimal_free_resolution, regularity, summary, PresentedModule};
use regkit_core::{Exec, ExtInt, FieldSpec, FreeModuleSpec, Monomial, Multidegree, Polynomial, RingSpec};

fn mono(r: &RingSpec, e: &[u32]) -> Polynomial {
    Polynomial::monomial(r.field().one(), Monomial::from_exponents(e.to_vec()))
}

fn twisted_cubic(r: &RingSpec) -> Vec<Polynomial> {
    vec![
        r.sub(&mono(r, &[1, 0, 1, 0]), &mono(r, &[0, 2, 0, 0])).unwrap(),
        r.sub(&mono(r, &[1, 0, 0, 1]), &mono(r, &[0, 1, 1, 0])).unwrap(),
        r.sub(&mono(r, &[0, 1, 0, 1]), &mono(r, &[0, 0, 2, 0])).unwrap(),
    ]
}

#[test]
fn twisted_cubic_betti_numbers_and_regularities() {
    for field in [FieldSpec::Rationals, FieldSpec::Prime(32003)] {
        let r = RingSpec::standard(field, &["x", "y", "z", "w"]);
        let m = PresentedModule::quotient(&r, &twisted_cubic(&r));
        let res = minimal_free_resolution(&m).unwrap();
        assert!(res.verify().unwrap());
        let b = betti_table(&res).unwrap();
        assert_eq!((b.total(0), b.total(1), b.total(2)), (1, 3, 2));
        let s = summary(&b, 4).unwrap();
        assert_eq!(s.pd, 2);
        assert_eq!(s.reg3, ExtInt::Finite(1));
        assert_eq!(koszul_summary_with(&m, 8, Exec::Sequential).unwrap().reg1, ExtInt::Finite(1));
        assert_eq!(reg_via_duality(&m).unwrap().reg_via_duality, ExtInt::Finite(1));
    }
}

#[test]
fn complete_intersection_regularity_is_sum_of_degrees_minus_count() {
    let r = RingSpec::standard(FieldSpec::Rationals, &["x", "y", "z"]);
    let gens = [mono(&r, &[2, 0, 0]), mono(&r, &[0, 3, 0]), mono(&r, &[0, 0, 4])];
    let m = PresentedModule::quotient(&r, &gens);
    assert_eq!(regularity(&m).unwrap(), ExtInt::Finite(2 + 3 + 4 - 3));
    let twisted = m.twist(Multidegree::single(2));
    assert_eq!(regularity(&twisted).unwrap(), ExtInt::Finite(4));
}

#[test]
fn powers_of_maximal_ideal_have_linear_regularity() {
    let r = RingSpec::standard(FieldSpec::Prime(32003), &["x", "y", "z"]);
    let gens = [mono(&r, &[1, 0, 0]), mono(&r, &[0, 1, 0]), mono(&r, &[0, 0, 1])];
    let free = PresentedModule::free(&r, FreeModuleSpec::ring(1));
    let seq = reg_power_sequence(&r, &gens, &free, 4, &SequenceOptions::default()).unwrap();
    let regs: Vec<(i64, ExtInt)> = seq.iter().map(|p| (p.v, p.reg)).collect();
    assert_eq!(regs, (1..=4).map(|v| (v, ExtInt::Finite(v))).collect::<Vec<_>>());
    assert!(seq.iter().all(|p| p.reg1.is_none() || p.reg1 == Some(p.reg)));
    match fit_linear_law(&regs, &[1]) {
        LawFit::Law(law) => assert_eq!((law.delta, law.c, law.certified), (1, 0, false)),
        other => panic!("expected a law, got {other:?}"),
    }
}

#[test]
fn sequential_and_parallel_power_sequences_agree() {
    let r = RingSpec::standard(FieldSpec::Rationals, &["x", "y", "z"]);
    let gens = [mono(&r, &[2, 0, 0]), mono(&r, &[0, 3, 0]), mono(&r, &[1, 1, 1])];
    let free = PresentedModule::free(&r, FreeModuleSpec::ring(1));
    let run = |exec| reg_power_sequence(&r, &gens, &free, 4, &SequenceOptions { exec, ..SequenceOptions::default() }).unwrap();
    assert_eq!(run(Exec::Sequential), run(Exec::Parallel));
}
