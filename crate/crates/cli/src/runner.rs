//! Executes a parsed script and collects a [`ResultDocument`].

use std::time::Instant;

use regkit_core::asymptotics::{
    fit_linear_law, prime_filtration, reg_power_sequence, rho_from_filtration, rho_initial_invariance, rho_table, LawFit,
    SequenceOptions,
};
use regkit_core::koszul::{koszul_summary_with, reg_via_duality_of, KoszulSummary};
use regkit_core::rees::{bigraded_resolution, degreewise_mismatches, linear_powers_test, reg_bidirectional, rees_ideal};
use regkit_core::resolve::{betti_table, minimal_free_resolution, presentation_of, summary, BettiTable, ModuleKind, PresentedModule, Resolution, ResolutionSummary};
use regkit_core::{AlgebraError, Exec, ExtInt, FreeModuleSpec, ModuleVector, Monomial, MonomialOrder, Polynomial, RingSpec};
use serde::Serialize;
use serde_json::{json, Value};

use crate::dsl::{CommandKind, ModuleDef, OptValue, SessionScript, Statement, Target};

const DEFAULT_POWERS_V: i64 = 5;
const DEFAULT_RHO_V: i64 = 8;
const KOSZUL_BUDGET: usize = 60_000;

#[derive(Clone, Copy, Debug)]
pub struct RunFlags {
    /// Replaces the default `max_v` of commands that do not set one.
    pub max_v: Option<i64>,
    pub timing: bool,
    pub exec: Exec,
    pub seed: u64,
}

impl Default for RunFlags {
    fn default() -> Self {
        RunFlags { max_v: None, timing: false, exec: Exec::default(), seed: regkit_core::seed_from_env() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    CheckFailed,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.to_string(), passed, detail: detail.into() }
}

#[derive(Clone, Debug, Serialize)]
pub struct CommandResult {
    pub index: usize,
    pub line: usize,
    pub command: String,
    pub target: String,
    pub status: Status,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
    #[serde(skip)]
    pub text: String,
    #[serde(skip)]
    pub rows: Vec<CsvRow>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsvRow {
    pub command: String,
    pub target: String,
    pub v: i64,
    pub value: ExtInt,
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub source: String,
    pub field: String,
    pub order: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_ms: Option<u128>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Tally {
    pub commands: usize,
    pub ok: usize,
    pub check_failed: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultDocument {
    pub provenance: Provenance,
    pub results: Vec<CommandResult>,
    pub tally: Tally,
}

impl ResultDocument {
    /// 2 when a cross-check failed, else 1 when a command errored, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.tally.check_failed > 0 {
            2
        } else if self.tally.errors > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("command,target,v,reg\n");
        for r in self.results.iter().flat_map(|r| &r.rows) {
            out.push_str(&format!("{},{},{},{}\n", r.command, csv_field(&r.target), r.v, r.value));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let status = match r.status {
                Status::Ok => "ok",
                Status::CheckFailed => "CHECK FAILED",
                Status::Error => "ERROR",
            };
            out.push_str(&format!("[{}] {} {}  ({status})\n", r.line, r.command, r.target));
            if let Some(e) = &r.error {
                out.push_str(&format!("  error: {e}\n"));
            }
            for line in r.text.lines() {
                out.push_str(&format!("  {line}\n"));
            }
            for c in r.checks.iter() {
                out.push_str(&format!("  check {}: {} ({})\n", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail));
            }
            for w in &r.warnings {
                out.push_str(&format!("  warning: {w}\n"));
            }
        }
        let t = &self.tally;
        out.push_str(&format!("{} commands: {} ok, {} check failures, {} errors\n", t.commands, t.ok, t.check_failed, t.errors));
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Default)]
struct Outcome {
    data: Value,
    checks: Vec<Check>,
    warnings: Vec<String>,
    text: String,
    rows: Vec<CsvRow>,
}

/// The module a target denotes, plus its generators when it is an ideal.
struct Resolved {
    ring: RingSpec,
    module: PresentedModule,
    ideal: Option<Vec<Polynomial>>,
}

fn target_text(script: &SessionScript, t: &Target) -> String {
    match t {
        Target::Name(n) => n.clone(),
        Target::Literal { ring, gens } => {
            let r = script.ring(ring);
            format!("({})", gens.iter().map(|f| r.render(f)).collect::<Vec<_>>().join(", "))
        }
    }
}

fn resolve_target(script: &SessionScript, t: &Target) -> Resolved {
    match t {
        Target::Literal { ring, gens } => {
            let r = script.ring(ring).clone();
            Resolved { module: PresentedModule::ideal(&r, gens), ideal: Some(gens.clone()), ring: r }
        }
        Target::Name(n) => match script.declaration(n).expect("parser checked declarations") {
            Statement::Ideal { ring, gens, .. } => {
                let r = script.ring(ring).clone();
                Resolved { module: PresentedModule::ideal(&r, gens), ideal: Some(gens.clone()), ring: r }
            }
            Statement::Module { ring, def, .. } => {
                let r = script.ring(ring).clone();
                Resolved { module: build_module(script, &r, def), ideal: None, ring: r }
            }
            _ => unreachable!("targets name ideals or modules"),
        },
    }
}

/// Ring, module and (for ideals) generators denoted by a target of `script`.
pub fn resolve(script: &SessionScript, t: &Target) -> (RingSpec, PresentedModule, Option<Vec<Polynomial>>) {
    let r = resolve_target(script, t);
    (r.ring, r.module, r.ideal)
}

fn columns(rows: &[Vec<Polynomial>]) -> Vec<ModuleVector> {
    (0..rows[0].len()).map(|j| ModuleVector::new(rows.iter().map(|row| row[j].clone()).collect())).collect()
}

fn build_module(script: &SessionScript, ring: &RingSpec, def: &ModuleDef) -> PresentedModule {
    match def {
        ModuleDef::Coker { rows, twists } => PresentedModule::cokernel(ring, FreeModuleSpec::new(twists.clone()), columns(rows)),
        ModuleDef::Image { rows, twists } => PresentedModule::submodule(ring, FreeModuleSpec::new(twists.clone()), columns(rows)),
        ModuleDef::Free { twists } => PresentedModule::free(ring, FreeModuleSpec::new(twists.clone())),
        ModuleDef::Quotient(t) => {
            let gens = resolve_target(script, t).ideal.expect("parser checked quotient targets");
            PresentedModule::quotient(ring, &gens)
        }
        ModuleDef::Twist { base, shift } => resolve_target(script, &Target::Name(base.clone())).module.twist(*shift),
    }
}

struct Standard {
    res: Resolution,
    betti: BettiTable,
    sum: ResolutionSummary,
}

fn standard(m: &PresentedModule) -> Result<Standard, AlgebraError> {
    if !m.ring.is_standard() {
        return Err(AlgebraError::NotStandardGraded);
    }
    let res = minimal_free_resolution(m)?;
    let betti = betti_table(&res)?;
    let sum = summary(&betti, m.ring.nvars())?;
    Ok(Standard { res, betti, sum })
}

fn zero_warning(out: &mut Outcome, s: &ResolutionSummary) {
    if s.zero_module {
        out.warnings.push("the module is zero; its regularity is -inf by convention".into());
    }
}

fn t0_check(s: &ResolutionSummary) -> Check {
    match (s.t0_per_step.first(), s.reg3) {
        (Some(t0), ExtInt::Finite(r)) => check("generator_degree_bound", *t0 <= r, format!("t0 = {t0}, reg = {r}")),
        _ => check("generator_degree_bound", true, "zero module"),
    }
}

fn koszul_bound(s: &ResolutionSummary, n: usize) -> i64 {
    s.reg3.finite().map_or(0, |r| r + n as i64 + 1)
}

/// Koszul ranks against Betti numbers in every degree up to `reg₃ + i`, vanishing just above.
fn rank_agreement(k: &KoszulSummary, st: &Standard, n: usize) -> Check {
    let Some(reg) = st.sum.reg3.finite() else {
        return check("koszul_betti_agreement", k.ranks.is_empty(), "zero module");
    };
    let mut bad = Vec::new();
    for i in 0..=n {
        let lo = k.ranks.keys().map(|(_, j)| *j).chain(st.betti.entries.keys().map(|(_, d)| d.first())).min().unwrap_or(0);
        for j in lo..=reg + i as i64 {
            let b = st.betti.get(i, regkit_core::Multidegree::single(j));
            if k.rank(i, j) != b {
                bad.push(format!("H_{i} in degree {j}: {} vs beta {b}", k.rank(i, j)));
            }
        }
        if k.rank(i, reg + i as i64 + 1) != 0 {
            bad.push(format!("H_{i} nonzero in degree {}", reg + i as i64 + 1));
        }
    }
    let detail = if bad.is_empty() { format!("all ranks agree up to reg + i, reg = {reg}") } else { bad.join("; ") };
    check("koszul_betti_agreement", bad.is_empty(), detail)
}

fn euler_check(k: &KoszulSummary, n: usize) -> Check {
    let lo = k.chain_dims.keys().map(|(_, j)| *j).min().unwrap_or(0);
    let bad: Vec<i64> = (lo..=k.bound_used)
        .filter(|&j| {
            let chi = |f: &dyn Fn(usize) -> usize| (0..=n).map(|i| if i % 2 == 0 { f(i) as i64 } else { -(f(i) as i64) }).sum::<i64>();
            chi(&|i| k.chain_dims.get(&(i, j)).copied().unwrap_or(0)) != chi(&|i| k.rank(i, j))
        })
        .collect();
    check("euler_characteristic", bad.is_empty(), if bad.is_empty() { "chain and homology Euler characteristics agree".to_string() } else { format!("disagree in degrees {bad:?}") })
}

fn betti_data(st: &Standard) -> Result<(Value, String), AlgebraError> {
    let stair = st.betti.staircase()?;
    Ok((json!({ "table": st.betti, "staircase": stair }), stair))
}

fn cmd_reg(r: &Resolved) -> Result<Outcome, AlgebraError> {
    let mut out = Outcome::default();
    if r.ring.arity() == 2 {
        let (_, bb) = bigraded_resolution(&r.module)?;
        let (n, m) = bigraded_counts(&r.ring);
        let (r10, r01) = reg_bidirectional(&bb, n, m);
        out.text = format!("reg_(1,0) = {r10}, reg_(0,1) = {r01}");
        out.data = json!({ "reg10": r10, "reg01": r01, "v": bb.v, "w": bb.w });
        return Ok(out);
    }
    let st = standard(&r.module)?;
    zero_warning(&mut out, &st.sum);
    out.text = format!("reg = {}, pd = {}, depth = {}", st.sum.reg3, st.sum.pd, st.sum.depth);
    out.checks.push(t0_check(&st.sum));
    out.checks.push(check("reg2_equals_reg3", st.sum.reg2 == st.sum.reg3, format!("reg2 = {}, reg3 = {}", st.sum.reg2, st.sum.reg3)));
    out.data = json!({ "reg": st.sum.reg3, "summary": st.sum });
    Ok(out)
}

/// Variables with a nonzero first, respectively second, degree component.
fn bigraded_counts(ring: &RingSpec) -> (usize, usize) {
    let d = ring.var_degrees();
    (d.iter().filter(|x| x.first() != 0).count(), d.iter().filter(|x| x.second() != 0).count())
}

fn cmd_betti(r: &Resolved) -> Result<Outcome, AlgebraError> {
    let mut out = Outcome::default();
    if r.ring.arity() == 2 {
        let (res, bb) = bigraded_resolution(&r.module)?;
        out.checks.push(check("resolution_is_complex", res.verify()?, "consecutive differentials compose to zero"));
        out.text = format!("bigraded Betti numbers: {} entries, row maxima v = {:?}, w = {:?}", bb.table.entries.len(), bb.v, bb.w);
        out.data = json!({ "table": bb.table, "v": bb.v, "w": bb.w });
        return Ok(out);
    }
    let st = standard(&r.module)?;
    zero_warning(&mut out, &st.sum);
    out.checks.push(check("resolution_is_complex", st.res.verify()?, "consecutive differentials compose to zero"));
    let (data, stair) = betti_data(&st)?;
    out.text = stair;
    out.data = data;
    Ok(out)
}

fn cmd_koszul(r: &Resolved, bound: Option<i64>, exec: Exec) -> Result<Outcome, AlgebraError> {
    let mut out = Outcome::default();
    let st = standard(&r.module)?;
    zero_warning(&mut out, &st.sum);
    let n = r.ring.nvars();
    let full = koszul_bound(&st.sum, n);
    let bound = bound.unwrap_or(full);
    let k = koszul_summary_with(&r.module, bound, exec)?;
    if bound < full {
        out.warnings.push(format!("bound {bound} is below reg + n + 1 = {full}; reg1 may be understated"));
    } else {
        out.checks.push(check("reg1_equals_reg3", k.reg1 == st.sum.reg3, format!("reg1 = {}, reg3 = {}", k.reg1, st.sum.reg3)));
        out.checks.push(rank_agreement(&k, &st, n));
    }
    out.checks.push(euler_check(&k, n));
    let t: Vec<String> = k.t.iter().map(|x| x.to_string()).collect();
    out.text = format!("reg1 = {}, t = [{}], bound = {}", k.reg1, t.join(", "), k.bound_used);
    out.data = json!({ "reg1": k.reg1, "t": k.t, "bound_used": k.bound_used, "ranks": k.ranks.iter().map(|(&(i, j), &rank)| json!({"i": i, "j": j, "rank": rank})).collect::<Vec<_>>() });
    Ok(out)
}

fn cmd_duality(r: &Resolved) -> Result<Outcome, AlgebraError> {
    let mut out = Outcome::default();
    let st = standard(&r.module)?;
    zero_warning(&mut out, &st.sum);
    let d = reg_via_duality_of(&st.res)?;
    out.checks.push(check("duality_equals_reg3", d.reg_via_duality == st.sum.reg3, format!("duality = {}, reg3 = {}", d.reg_via_duality, st.sum.reg3)));
    out.text = format!("reg via duality = {}", d.reg_via_duality);
    out.data = json!({ "duality": d, "reg3": st.sum.reg3 });
    Ok(out)
}

fn cmd_verify(r: &Resolved, exec: Exec) -> Result<Outcome, AlgebraError> {
    let mut out = Outcome::default();
    let st = standard(&r.module)?;
    zero_warning(&mut out, &st.sum);
    let n = r.ring.nvars();
    let k = koszul_summary_with(&r.module, koszul_bound(&st.sum, n), exec)?;
    let d = reg_via_duality_of(&st.res)?;
    let (r1, r3, rd) = (k.reg1, st.sum.reg3, d.reg_via_duality);
    out.checks.push(check("triple_agreement", r1 == r3 && r3 == rd, format!("reg1 = {r1}, reg3 = {r3}, reg_dual = {rd}")));
    out.checks.push(t0_check(&st.sum));
    out.checks.push(rank_agreement(&k, &st, n));
    out.checks.push(euler_check(&k, n));
    out.checks.push(check("resolution_is_complex", st.res.verify()?, "consecutive differentials compose to zero"));
    out.text = format!("reg1 = {r1}, reg3 = {r3}, reg_dual = {rd}");
    out.data = json!({ "reg1": r1, "reg3": r3, "reg_dual": rd, "t0": st.sum.t0_per_step.first(), "pd": st.sum.pd, "depth": st.sum.depth });
    Ok(out)
}

fn ideal_degrees(ring: &RingSpec, gens: &[Polynomial]) -> Result<Vec<i64>, AlgebraError> {
    let p = presentation_of(&PresentedModule::ideal(ring, gens))?;
    let mut d: Vec<i64> = p.generator_degrees()?.iter().map(|x| x.first()).collect();
    d.sort();
    d.dedup();
    Ok(d)
}

fn cmd_powers(cmd: &str, target: &str, r: &Resolved, m: Option<Resolved>, v_max: i64, exec: Exec) -> Result<Outcome, AlgebraError> {
    let mut out = Outcome::default();
    let gens = r.ideal.as_ref().expect("parser checked the ideal target");
    let module = match &m {
        Some(m) => m.module.clone(),
        None => PresentedModule::free(&r.ring, FreeModuleSpec::ring(1)),
    };
    let degrees = ideal_degrees(&r.ring, gens)?;
    let seq = reg_power_sequence(&r.ring, gens, &module, v_max, &SequenceOptions { koszul_budget: KOSZUL_BUDGET, exec })?;
    let pairs: Vec<(i64, ExtInt)> = seq.iter().map(|p| (p.v, p.reg)).collect();
    let law = fit_linear_law(&pairs, &degrees);
    for p in &seq {
        out.rows.push(CsvRow { command: cmd.into(), target: target.into(), v: p.v, value: p.reg });
        if p.reg1.is_none() && !p.zero_module {
            out.warnings.push(format!("v = {}: Koszul cross-check skipped (slice too large)", p.v));
        }
    }
    let inconsistent: Vec<i64> = seq.iter().filter(|p| !p.consistent()).map(|p| p.v).collect();
    out.checks.push(check("koszul_cross_check", inconsistent.is_empty(), if inconsistent.is_empty() { "reg1 = reg3 at every checked v".to_string() } else { format!("reg1 != reg3 at v = {inconsistent:?}") }));
    let bad_t0: Vec<i64> = seq.iter().filter(|p| p.t0 > p.reg).map(|p| p.v).collect();
    out.checks.push(check("generator_degree_bound", bad_t0.is_empty(), format!("t0 <= reg fails at v = {bad_t0:?}")));
    match &law {
        LawFit::Law(l) => {
            out.checks.push(check("slope_in_generator_degrees", true, format!("delta = {} in {degrees:?}", l.delta)));
            out.text = format!("law: reg = {}*v + {} for v = {}..{} (observed, not certified)", l.delta, l.c, l.v_start, l.verified_to);
        }
        LawFit::SlopeOutsideDegrees { delta, degrees } => {
            out.checks.push(check("slope_in_generator_degrees", false, format!("delta = {delta} not in {degrees:?}")));
            out.text = format!("terminal slope {delta} is not a generator degree");
        }
        LawFit::NotStabilized { points } => {
            out.warnings.push(format!("sequence not yet linear: only {points} trailing points share a slope; raise max_v"));
            out.text = "law: not stabilized".into();
        }
    }
    let values: Vec<String> = seq.iter().map(|p| p.reg.to_string()).collect();
    out.text = format!("reg = [{}]\n{}", values.join(", "), out.text);
    out.data = json!({ "sequence": seq, "law": law, "generator_degrees": degrees, "module": m.is_some() });
    Ok(out)
}

fn cmd_rees(r: &Resolved) -> Result<Outcome, AlgebraError> {
    let mut out = Outcome::default();
    let gens = r.ideal.as_ref().expect("parser checked the ideal target");
    let p = rees_ideal(&r.ring, gens)?;
    out.warnings.extend(p.warnings.iter().cloned());
    let (res, bb) = bigraded_resolution(&p.module())?;
    let (r10, r01) = reg_bidirectional(&bb, r.ring.nvars(), p.ideal_generators.len());
    out.checks.push(check("resolution_is_complex", res.verify()?, "consecutive differentials compose to zero"));
    if p.normalized {
        let bad = degreewise_mismatches(&p, 6, 4)?;
        out.checks.push(check("degreewise_consistency", bad.is_empty(), if bad.is_empty() { "dim Rees_(i,v) = dim (I^v)_(vd+i) for i <= 6, v <= 4".to_string() } else { format!("mismatch at (i, v) = {bad:?}") }));
    }
    let relations: Vec<String> = p.rees_ideal.iter().map(|f| p.ring.render(f)).collect();
    let vars: Vec<Value> = p.ring.names().iter().zip(p.ring.var_degrees()).map(|(n, d)| json!({ "name": n, "degree": d })).collect();
    out.text = format!("{} defining relations; reg_(1,0) = {r10}, reg_(0,1) = {r01}", relations.len());
    out.data = json!({
        "ring": vars,
        "normalized": p.normalized,
        "d": p.d,
        "generator_degrees": p.degrees,
        "relations": relations,
        "betti": bb.table,
        "v": bb.v,
        "w": bb.w,
        "reg10": r10,
        "reg01": r01,
    });
    Ok(out)
}

fn cmd_linear_powers(target: &str, r: &Resolved, budget: i64) -> Result<Outcome, AlgebraError> {
    let mut out = Outcome::default();
    let gens = r.ideal.as_ref().expect("parser checked the ideal target");
    let rep = linear_powers_test(&r.ring, gens, budget)?;
    out.checks.push(check("regularity_bound", rep.bound_holds, format!("{} for v <= {budget}", rep.bound_text())));
    out.checks.push(check("degreewise_consistency", rep.degree_mismatches.is_empty(), format!("mismatches: {:?}", rep.degree_mismatches)));
    out.checks.push(check("koszul_cross_check", rep.koszul_consistent, "reg1 = reg3 along the sequence"));
    match rep.witness_v {
        Some(v) => out.text = format!("linear powers: {}; {}; equality at v = {v}", rep.linear_powers, rep.bound_text()),
        None => {
            out.warnings.push(format!("inconclusive: no v <= {budget} attains the bound; raise max_v"));
            out.text = format!("linear powers: {}; {}; no equality witness yet", rep.linear_powers, rep.bound_text());
        }
    }
    for (v, reg) in &rep.sequence {
        out.rows.push(CsvRow { command: "linear-powers".into(), target: target.into(), v: *v, value: *reg });
    }
    out.data = serde_json::to_value(&rep).expect("serializable");
    Ok(out)
}

/// The `(monomial, component)` pairs of `u` when every vector in it is a single term.
fn monomial_relations(m: &PresentedModule) -> Option<Vec<(Monomial, usize)>> {
    let mut out = Vec::new();
    for v in &m.relations {
        if v.is_zero() {
            continue;
        }
        if v.nterms() != 1 {
            return None;
        }
        let (mono, k, _) = v.terms().next().unwrap();
        out.push((mono.clone(), k));
    }
    Some(out)
}

fn cmd_rho(r: &Resolved, v_max: i64) -> Result<Outcome, AlgebraError> {
    let mut out = Outcome::default();
    let m = &r.module;
    let table = rho_table(m, v_max)?;
    let cyclic_presentation = matches!(m.kind, ModuleKind::Cokernel | ModuleKind::Quotient);
    let mut data = json!({ "rho": table });
    if cyclic_presentation {
        let cmp = rho_initial_invariance(&r.ring, &m.ambient, &m.relations, &MonomialOrder::degrevlex(), v_max)?;
        out.checks.push(check("initial_module_invariance", cmp.equal && cmp.original == table, format!("rho(F/in(U)) = {:?}", cmp.initial.iter().map(|x| x.to_string()).collect::<Vec<_>>())));
        if let Some(mons) = monomial_relations(m) {
            let factors = prime_filtration(&r.ring, &m.ambient, &mons)?;
            let law = rho_from_filtration(&r.ring, &factors, v_max);
            out.checks.push(check("prime_filtration_law", law == table, format!("{} cyclic factors", factors.len())));
            data["filtration"] = json!(factors);
        }
    } else {
        out.warnings.push("initial-module comparison needs a cokernel presentation; skipped".into());
    }
    out.text = format!("rho = [{}]", table.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "));
    out.data = data;
    Ok(out)
}

fn int_option(options: &std::collections::BTreeMap<String, OptValue>, key: &str) -> Option<i64> {
    match options.get(key) {
        Some(OptValue::Int(i)) => Some(*i),
        _ => None,
    }
}

fn execute(script: &SessionScript, kind: CommandKind, target: &Target, options: &std::collections::BTreeMap<String, OptValue>, flags: &RunFlags) -> Result<Outcome, AlgebraError> {
    let r = resolve_target(script, target);
    let text = target_text(script, target);
    let v_max = |default: i64| int_option(options, "max_v").or(flags.max_v).unwrap_or(default);
    if let Some(v) = int_option(options, "max_v") {
        if v < 1 {
            return Err(AlgebraError::InvalidArgument("max_v must be at least 1".into()));
        }
    }
    match kind {
        CommandKind::Reg => cmd_reg(&r),
        CommandKind::Betti => cmd_betti(&r),
        CommandKind::Koszul => cmd_koszul(&r, int_option(options, "bound"), flags.exec),
        CommandKind::Duality => cmd_duality(&r),
        CommandKind::Verify => cmd_verify(&r, flags.exec),
        CommandKind::Powers => {
            let m = match options.get("module") {
                Some(OptValue::Name(n)) => Some(resolve_target(script, &Target::Name(n.clone()))),
                _ => None,
            };
            if let Some(m) = &m {
                if m.ring != r.ring {
                    return Err(AlgebraError::RingMismatch);
                }
            }
            cmd_powers("powers", &text, &r, m, v_max(DEFAULT_POWERS_V), flags.exec)
        }
        CommandKind::Rees => cmd_rees(&r),
        CommandKind::LinearPowers => cmd_linear_powers(&text, &r, v_max(DEFAULT_POWERS_V)),
        CommandKind::Rho => cmd_rho(&r, v_max(DEFAULT_RHO_V)),
    }
}

fn field_label(script: &SessionScript) -> String {
    let mut fields: Vec<String> = script
        .rings
        .values()
        .map(|r| match r.field() {
            regkit_core::FieldSpec::Rationals => "QQ".to_string(),
            regkit_core::FieldSpec::Prime(p) => format!("Fp({p})"),
        })
        .collect();
    fields.sort();
    fields.dedup();
    fields.join(", ")
}

/// Runs every command of `script` in order.
pub fn run(script: &SessionScript, source: &str, flags: &RunFlags) -> ResultDocument {
    let start = Instant::now();
    let mut results = Vec::new();
    let mut tally = Tally::default();
    for (idx, (st, pos)) in script.statements.iter().zip(&script.positions).enumerate() {
        let Statement::Command { kind, target, options } = st else { continue };
        let t = Instant::now();
        let outcome = execute(script, *kind, target, options, flags);
        let elapsed_ms = flags.timing.then(|| t.elapsed().as_millis());
        let target = target_text(script, target);
        let result = match outcome {
            Ok(o) => {
                let status = if o.checks.iter().all(|c| c.passed) { Status::Ok } else { Status::CheckFailed };
                CommandResult { index: idx, line: pos.line, command: kind.name().into(), target, status, checks: o.checks, warnings: o.warnings, data: o.data, error: None, elapsed_ms, text: o.text, rows: o.rows }
            }
            Err(e) => CommandResult {
                index: idx,
                line: pos.line,
                command: kind.name().into(),
                target,
                status: Status::Error,
                checks: Vec::new(),
                warnings: Vec::new(),
                data: Value::Null,
                error: Some(format!("line {}: {e}", pos.line)),
                elapsed_ms,
                text: String::new(),
                rows: Vec::new(),
            },
        };
        tally.commands += 1;
        match result.status {
            Status::Ok => tally.ok += 1,
            Status::CheckFailed => tally.check_failed += 1,
            Status::Error => tally.errors += 1,
        }
        results.push(result);
    }
    let provenance = Provenance {
        tool: "regkit",
        version: env!("CARGO_PKG_VERSION"),
        source: source.to_string(),
        field: field_label(script),
        order: "degrevlex; Schreyer orders on syzygy modules".into(),
        seed: flags.seed,
        total_ms: flags.timing.then(|| start.elapsed().as_millis()),
    };
    ResultDocument { provenance, results, tally }
}
