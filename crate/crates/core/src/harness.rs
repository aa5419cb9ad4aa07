//! Named property checks run against concrete code instances.
//!
//! Each property enumerates its cases exhaustively when there are at most
//! `Budget::max_cases` of them, and otherwise checks a reproducible sample
//! drawn with `Budget::seed`. Failures are results, never panics or errors.
//! Properties that are stated for n = d + 1 are checked on the truncation to
//! nodes 1..=d+1 when the instance is larger.

use itertools::Itertools;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::capacity::{secrecy_capacity, Category};
use crate::entropy::{conditional_entropy, joint_entropy, ObsSet};
use crate::field::FieldError;
use crate::pmmsr::{PmMsrCode, Selector};
use crate::secrecy::{achieved_secure_size, capacity_query, leakage, models, SecrecyError, SecureScheme};

/// Every registered property id, in report order.
pub const PROPERTIES: &[&str] = &[
    "msr.node_entropy",
    "msr.link_entropy",
    "msr.reconstruction",
    "lemma.repair_independence",
    "lemma.repair_determinism",
    "lemma.secure_size",
    "lemma.helper_symmetry",
    "lemma.express",
    "thm.scalar_repair_rank",
    "thm.simple_bound",
    "cor.capacity_exact",
    "thm.capacity_bound",
    "def.stability",
    "lemma.truncation",
    "scheme.perfect_secrecy",
];

/// Enumeration limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest case count checked exhaustively; larger families are sampled down to this size.
    pub max_cases: usize,
    /// Longest ordered node tuple J for `lemma.express`.
    pub max_express: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_cases: 4096,
            max_express: 3,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// How the cases of one property were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sampling {
    pub seed: u64,
    pub population: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub id: String,
    pub instance: String,
    pub status: Status,
    pub checked: usize,
    /// Present when the cases were sampled rather than enumerated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled: Option<Sampling>,
    /// The first failing case with observed and expected values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }
}

/// Accumulates the cases of one property.
pub struct Check {
    id: String,
    instance: String,
    checked: usize,
    sampled: Option<Sampling>,
    witness: Option<Value>,
    skip: Option<String>,
}

impl Check {
    pub fn new(id: &str, instance: String) -> Self {
        Check {
            id: id.to_string(),
            instance,
            checked: 0,
            sampled: None,
            witness: None,
            skip: None,
        }
    }

    /// Records one case; `witness` is only built for the first failure.
    pub fn case(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    pub fn skip(mut self, why: impl Into<String>) -> PropertyResult {
        self.skip = Some(why.into());
        self.finish()
    }

    /// Keeps all of `cases` if within budget, else a seeded sample of them.
    pub fn pick<T>(&mut self, cases: Vec<T>, budget: &Budget) -> Vec<T> {
        if cases.len() <= budget.max_cases {
            return cases;
        }
        let population = cases.len();
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let mut keep = index::sample(&mut rng, population, budget.max_cases).into_vec();
        keep.sort_unstable();
        self.sampled = Some(Sampling {
            seed: budget.seed,
            population,
        });
        let mut cases: Vec<Option<T>> = cases.into_iter().map(Some).collect();
        keep.into_iter().map(|i| cases[i].take().expect("distinct")).collect()
    }

    pub fn finish(self) -> PropertyResult {
        let status = if self.witness.is_some() {
            Status::Fail
        } else if self.skip.is_some() {
            Status::Skip
        } else {
            Status::Pass
        };
        PropertyResult {
            id: self.id,
            instance: self.instance,
            status,
            checked: self.checked,
            sampled: self.sampled,
            witness: self.witness,
            note: self.skip,
        }
    }
}

/// Short text naming a code instance, e.g. `pm(n=5,k=3,d=4,m=1)/GF(2^4)`.
pub fn describe(code: &PmMsrCode) -> String {
    let p = code.params();
    let f = code.field();
    format!(
        "pm(n={},k={},d={},m={})/GF({}^{})",
        p.n,
        p.k,
        p.d,
        p.m,
        f.characteristic(),
        f.degree()
    )
}

/// Runs every registered property.
pub fn check_all(code: &PmMsrCode, budget: &Budget) -> Vec<PropertyResult> {
    PROPERTIES
        .iter()
        .map(|id| run_property(id, code, budget).expect("registered"))
        .collect()
}

/// Runs one property by id; `None` for an unknown id.
pub fn run_property(id: &str, code: &PmMsrCode, budget: &Budget) -> Option<PropertyResult> {
    let full = code;
    let d1 = code.params().d + 1;
    let truncated;
    let sub = if code.params().n > d1 {
        truncated = code.truncate(d1).expect("d + 1 nodes always form a valid code");
        &truncated
    } else {
        code
    };
    let sub_name = if sub.params().n < full.params().n {
        format!("{} truncated from n={}", describe(sub), full.params().n)
    } else {
        describe(sub)
    };
    let result = match id {
        "msr.node_entropy" => node_entropy(full, budget),
        "msr.link_entropy" => link_entropy(full, budget),
        "msr.reconstruction" => reconstruction(full, budget),
        "lemma.repair_independence" => repair_independence(full, budget),
        "lemma.repair_determinism" => repair_determinism(sub, sub_name, budget),
        "lemma.secure_size" => secure_size(sub, sub_name, budget),
        "lemma.helper_symmetry" => helper_symmetry(sub, sub_name, budget),
        "lemma.express" => express(sub, sub_name, budget),
        "thm.scalar_repair_rank" => scalar_repair_rank(sub, sub_name, budget),
        "thm.simple_bound" => simple_bound(sub, sub_name, budget),
        "cor.capacity_exact" => capacity_exact(sub, sub_name, budget),
        "thm.capacity_bound" => capacity_bound(sub, sub_name, budget),
        "def.stability" => stability(full, budget),
        "lemma.truncation" => truncation(full, sub, budget),
        "scheme.perfect_secrecy" => perfect_secrecy(full, budget),
        _ => return None,
    };
    Some(result)
}

/// All results as JSON lines, each terminated by a newline.
pub fn to_json_lines(results: &[PropertyResult]) -> String {
    results.iter().map(|r| r.to_json() + "\n").collect()
}

pub fn all_passed(results: &[PropertyResult]) -> bool {
    results.iter().all(PropertyResult::passed)
}

fn rank(code: &PmMsrCode, sel: Selector) -> usize {
    joint_entropy(&obs(code, sel))
}

fn obs(code: &PmMsrCode, sel: Selector) -> ObsSet {
    ObsSet::select(code, &sel).expect("selector built from the code's own nodes")
}

fn nodes(code: &PmMsrCode) -> Vec<usize> {
    code.nodes().collect()
}

fn without(all: &[usize], drop: &[usize]) -> Vec<usize> {
    all.iter().copied().filter(|i| !drop.contains(i)).collect()
}

/// (l1, l2) pairs with l1 + l2 < k, in lexicographic order.
fn model_shapes(code: &PmMsrCode) -> Vec<(usize, usize)> {
    let k = code.params().k;
    (0..k).flat_map(|l1| (0..k - l1).map(move |l2| (l1, l2))).collect()
}

fn node_entropy(code: &PmMsrCode, budget: &Budget) -> PropertyResult {
    let mut c = Check::new("msr.node_entropy", describe(code));
    let alpha = code.params().alpha;
    for i in c.pick(nodes(code), budget) {
        let r = rank(code, Selector::Stored(vec![i]));
        c.case(r == alpha, || json!({"node": i, "observed": r, "expected": alpha}));
    }
    c.finish()
}

fn link_entropy(code: &PmMsrCode, budget: &Budget) -> PropertyResult {
    let mut c = Check::new("msr.link_entropy", describe(code));
    let beta = code.params().beta;
    let pairs: Vec<(usize, usize)> = nodes(code)
        .into_iter()
        .cartesian_product(nodes(code))
        .filter(|(i, j)| i != j)
        .collect();
    for (i, j) in c.pick(pairs, budget) {
        let r = rank(code, Selector::RepairFromTo(vec![i], vec![j]));
        c.case(r == beta, || json!({"helper": i, "failed": j, "observed": r, "expected": beta}));
    }
    c.finish()
}

fn reconstruction(code: &PmMsrCode, budget: &Budget) -> PropertyResult {
    let mut c = Check::new("msr.reconstruction", describe(code));
    let b = code.params().b;
    let sets = nodes(code).into_iter().combinations(code.params().k).collect();
    for set in c.pick(sets, budget) {
        let r = rank(code, Selector::Stored(set.clone()));
        c.case(r == b, || json!({"nodes": set, "observed": r, "expected": b}));
    }
    c.finish()
}

fn repair_independence(code: &PmMsrCode, budget: &Budget) -> PropertyResult {
    let mut c = Check::new("lemma.repair_independence", describe(code));
    let p = code.params();
    let expected = p.d * p.beta;
    for f in c.pick(nodes(code), budget) {
        let r = rank(code, Selector::RepairTo(vec![f]));
        c.case(r == expected, || json!({"failed": f, "observed": r, "expected": expected}));
    }
    c.finish()
}

fn repair_determinism(code: &PmMsrCode, name: String, budget: &Budget) -> PropertyResult {
    let mut c = Check::new("lemma.repair_determinism", name);
    let k = code.params().k;
    let all = nodes(code);
    let mut cases = Vec::new();
    for &i in &all {
        for a in without(&all, &[i]).into_iter().combinations(k - 1) {
            let mut drop = a.clone();
            drop.push(i);
            cases.push((i, a, without(&all, &drop)));
        }
    }
    for (i, a, b) in c.pick(cases, budget) {
        let given = obs(code, Selector::Stored(vec![i]))
            .union(&obs(code, Selector::RepairFromTo(a.clone(), vec![i])))
            .expect("same code");
        let rest = obs(code, Selector::RepairFromTo(b.clone(), vec![i]));
        let h = conditional_entropy(&rest, &given).expect("same code");
        c.case(h == 0, || json!({"failed": i, "a": a, "b": b, "observed": h, "expected": 0}));
    }
    c.finish()
}

fn secure_size(code: &PmMsrCode, name: String, budget: &Budget) -> PropertyResult {
    let mut c = Check::new("lemma.secure_size", name);
    let k = code.params().k;
    let mut cases = Vec::new();
    for u in nodes(code).into_iter().combinations(k) {
        for labels in (0..k).map(|_| 0..3u8).multi_cartesian_product() {
            let pick = |l: u8| -> Vec<usize> { u.iter().zip(&labels).filter(|(_, &x)| x == l).map(|(&i, _)| i).collect() };
            let (e, f, g) = (pick(0), pick(1), pick(2));
            if !g.is_empty() {
                cases.push((e, f, g));
            }
        }
    }
    for (e, f, g) in c.pick(cases, budget) {
        let mut ef = e.clone();
        ef.extend(&f);
        let lhs = conditional_entropy(&obs(code, Selector::RepairTo(f.clone())), &obs(code, Selector::Stored(ef)))
            .expect("same code");
        let rhs = rank(code, Selector::RepairFromTo(g.clone(), f.clone()));
        c.case(lhs == rhs, || json!({"e": e, "f": f, "g": g, "observed": lhs, "expected": rhs}));
    }
    c.finish()
}

fn helper_symmetry(code: &PmMsrCode, name: String, budget: &Budget) -> PropertyResult {
    let mut c = Check::new("lemma.helper_symmetry", name);
    let all = nodes(code);
    let mut cases = Vec::new();
    for size in 1..code.params().k {
        for f in all.iter().copied().combinations(size) {
            for pair in without(&all, &f).into_iter().combinations(2) {
                cases.push((f.clone(), pair[0], pair[1]));
            }
        }
    }
    for (f, i1, i2) in c.pick(cases, budget) {
        let h1 = rank(code, Selector::RepairFromTo(vec![i1], f.clone()));
        let h2 = rank(code, Selector::RepairFromTo(vec![i2], f.clone()));
        c.case(h1 == h2, || json!({"f": f, "i1": i1, "i2": i2, "observed": [h1, h2]}));
    }
    c.finish()
}

fn express(code: &PmMsrCode, name: String, budget: &Budget) -> PropertyResult {
    let mut c = Check::new("lemma.express", name);
    let all = nodes(code);
    let longest = budget.max_express.min(all.len());
    let cases: Vec<Vec<usize>> = (1..=longest)
        .flat_map(|len| all.iter().copied().permutations(len))
        .collect();
    for j in c.pick(cases, budget) {
        let lhs = rank(code, Selector::RepairTo(j.clone()));
        let mut stacked = ObsSet::empty(code.field().clone(), code.params().b);
        for r in 0..j.len() {
            let helpers = without(&all, &j[..=r]);
            stacked = stacked
                .union(&obs(code, Selector::RepairFromTo(helpers, vec![j[r]])))
                .expect("same code");
        }
        let rhs = joint_entropy(&stacked);
        c.case(lhs == rhs, || json!({"j": j, "observed": lhs, "expected": rhs}));
    }
    c.finish()
}

fn scalar_repair_rank(code: &PmMsrCode, name: String, budget: &Budget) -> PropertyResult {
    let mut c = Check::new("thm.scalar_repair_rank", name);
    let all = nodes(code);
    let beta = code.params().beta;
    let mut cases = Vec::new();
    for l2 in 1..code.params().k {
        if capacity_query(code, 0, l2).category() != Category::Cat1 {
            continue;
        }
        for f in all.iter().copied().combinations(l2) {
            for g in without(&all, &f) {
                cases.push((f.clone(), g));
            }
        }
    }
    if cases.is_empty() {
        return c.skip("no Category 1 repair sets");
    }
    for (f, g) in c.pick(cases, budget) {
        let expected = f.len() * beta;
        let r = rank(code, Selector::RepairFromTo(vec![g], f.clone()));
        c.case(r == expected, || json!({"f": f, "g": g, "observed": r, "expected": expected}));
    }
    c.finish()
}

fn simple_bound(code: &PmMsrCode, name: String, budget: &Budget) -> PropertyResult {
    let mut c = Check::new("thm.simple_bound", name);
    let p = code.params();
    let all = nodes(code);
    let mut cases = Vec::new();
    for (l1, l2) in model_shapes(code) {
        for m in models(code, l1, l2) {
            let mut ef = m.e.clone();
            ef.extend(&m.f);
            for g in without(&all, &ef) {
                cases.push((m.clone(), g));
            }
        }
    }
    for (m, g) in c.pick(cases, budget) {
        let secure = achieved_secure_size(code, &m).expect("model from enumeration");
        let hg = rank(code, Selector::RepairFromTo(vec![g], m.f.clone()));
        let bound = (p.k - m.l1() - m.l2()) * (p.alpha - hg);
        c.case(secure <= bound, || json!({"e": m.e, "f": m.f, "g": g, "observed": secure, "expected_at_most": bound}));
    }
    c.finish()
}

fn capacity_exact(code: &PmMsrCode, name: String, budget: &Budget) -> PropertyResult {
    let mut c = Check::new("cor.capacity_exact", name);
    let p = code.params();
    let cases: Vec<_> = model_shapes(code)
        .into_iter()
        .filter(|&(l1, l2)| capacity_query(code, l1, l2).category() == Category::Cat1)
        .flat_map(|(l1, l2)| models(code, l1, l2))
        .collect();
    for m in c.pick(cases, budget) {
        let secure = achieved_secure_size(code, &m).expect("model from enumeration");
        let expected = (p.k - m.l1() - m.l2()) * (p.alpha - m.l2() * p.beta);
        c.case(secure == expected, || json!({"e": m.e, "f": m.f, "observed": secure, "expected": expected}));
    }
    c.finish()
}

fn capacity_bound(code: &PmMsrCode, name: String, budget: &Budget) -> PropertyResult {
    let mut c = Check::new("thm.capacity_bound", name);
    let cases: Vec<_> = model_shapes(code)
        .into_iter()
        .filter(|&(l1, l2)| capacity_query(code, l1, l2).category() == Category::Cat2)
        .flat_map(|(l1, l2)| models(code, l1, l2))
        .collect();
    if cases.is_empty() {
        return c.skip("no Category 2 models");
    }
    for m in c.pick(cases, budget) {
        let secure = achieved_secure_size(code, &m).expect("model from enumeration");
        let bound = secrecy_capacity(&capacity_query(code, m.l1(), m.l2())).expect("valid shape");
        c.case(bound.admits(secure), || {
            json!({"e": m.e, "f": m.f, "observed": secure, "expected_at_most": bound.value.to_string()})
        });
    }
    c.finish()
}

fn stability(code: &PmMsrCode, budget: &Budget) -> PropertyResult {
    let mut c = Check::new("def.stability", describe(code));
    let p = code.params();
    let field = code.field();
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let msg: Vec<u64> = (0..p.b).map(|_| rng.gen_range(0..field.size())).collect();
    let shares = code.encode(&msg).expect("message of length B");
    let all = nodes(code);
    let reference: Vec<Vec<Vec<u64>>> = all
        .iter()
        .map(|&i| {
            all.iter()
                .map(|&f| if i == f { Vec::new() } else { code.repair_symbol(i, f, &shares[i - 1]).expect("valid pair") })
                .collect()
        })
        .collect();
    let mut cases = Vec::new();
    for &f in &all {
        for h in without(&all, &[f]).into_iter().combinations(p.d) {
            cases.push((f, h));
        }
    }
    for (f, helpers) in c.pick(cases, budget) {
        let symbols: Vec<Vec<u64>> = helpers
            .iter()
            .map(|&i| code.repair_symbol(i, f, &shares[i - 1]).expect("valid pair"))
            .collect();
        let same = helpers.iter().zip(&symbols).all(|(&i, s)| *s == reference[i - 1][f - 1]);
        let epochs = helpers.iter().all(|&i| {
            let first = code.repair_rows(i, f, 0);
            (1..3).all(|e| code.repair_rows(i, f, e).iter().zip(&first).all(|(a, b)| a.row == b.row))
        });
        let repaired = code.repair(f, &helpers, &symbols).expect("d helpers");
        let exact = repaired == shares[f - 1];
        c.case(same && epochs && exact, || {
            json!({"failed": f, "helpers": helpers, "symbols_match": same, "rows_match": epochs, "exact_repair": exact})
        });
    }
    c.finish()
}

fn truncation(full: &PmMsrCode, sub: &PmMsrCode, budget: &Budget) -> PropertyResult {
    let mut c = Check::new("lemma.truncation", describe(full));
    if sub.params().n == full.params().n {
        return c.skip("n = d + 1; nothing to truncate");
    }
    let cases: Vec<_> = model_shapes(sub)
        .into_iter()
        .flat_map(|(l1, l2)| models(sub, l1, l2))
        .collect();
    for m in c.pick(cases, budget) {
        let big = leakage(full, &m).expect("model inside both codes");
        let small = leakage(sub, &m).expect("model from enumeration");
        c.case(big == small, || json!({"e": m.e, "f": m.f, "observed": big, "expected": small}));
    }
    c.finish()
}

fn perfect_secrecy(code: &PmMsrCode, budget: &Budget) -> PropertyResult {
    let mut c = Check::new("scheme.perfect_secrecy", describe(code));
    let mut cases = Vec::new();
    let mut schemes = Vec::new();
    for (l1, l2) in model_shapes(code) {
        if l1 + l2 == 0 {
            continue;
        }
        match SecureScheme::new(code, l1, l2) {
            Ok(s) => {
                for m in models(code, l1, l2) {
                    cases.push((schemes.len(), m));
                }
                schemes.push(s);
            }
            Err(SecrecyError::CapacityZero) => {}
            Err(SecrecyError::Field(FieldError::TooLarge(..))) => {
                return c.skip("extension field of degree B does not fit in 64 bits");
            }
            Err(e) => {
                c.case(false, || json!({"l1": l1, "l2": l2, "error": e.to_string()}));
            }
        }
    }
    for (s, m) in c.pick(cases, budget) {
        let scheme = &schemes[s];
        let report = scheme.verify_perfect(&m).expect("model within scheme");
        c.case(report.perfect, || {
            json!({"e": m.e, "f": m.f, "randomness": scheme.randomness(), "leaked": report.leaked})
        });
    }
    c.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::pmmsr::CodeParams;

    fn code(n: usize, m: usize) -> PmMsrCode {
        PmMsrCode::new(CodeParams::product_matrix(n, 3, m).unwrap(), FieldSpec::new(2, 4, None).unwrap(), None).unwrap()
    }

    fn status(results: &[PropertyResult], id: &str) -> Status {
        results.iter().find(|r| r.id == id).unwrap().status
    }

    #[test]
    fn reference_instance_passes() {
        let results = check_all(&code(5, 1), &Budget::default());
        assert_eq!(results.len(), PROPERTIES.len());
        for r in &results {
            assert!(r.passed(), "{}", r.to_json());
            assert!(r.sampled.is_none());
        }
        assert_eq!(status(&results, "lemma.truncation"), Status::Skip);
        assert_eq!(status(&results, "thm.capacity_bound"), Status::Skip);
        assert_eq!(status(&results, "scheme.perfect_secrecy"), Status::Pass);
    }

    #[test]
    fn six_nodes_pass_with_truncation() {
        let results = check_all(&code(6, 1), &Budget::default());
        assert!(all_passed(&results), "{}", to_json_lines(&results));
        assert_eq!(status(&results, "lemma.truncation"), Status::Pass);
        let r = results.iter().find(|r| r.id == "lemma.secure_size").unwrap();
        assert!(r.instance.contains("truncated from n=6"));
    }

    #[test]
    fn concatenated_code_checks_both_categories() {
        let c = code(5, 2);
        let budget = Budget::default();
        for id in ["cor.capacity_exact", "thm.capacity_bound", "thm.scalar_repair_rank", "lemma.express"] {
            let r = run_property(id, &c, &budget).unwrap();
            assert_eq!(r.status, Status::Pass, "{}", r.to_json());
            assert!(r.checked > 0);
        }
    }

    #[test]
    fn sampling_is_recorded_and_deterministic() {
        let budget = Budget {
            max_cases: 7,
            ..Budget::default()
        };
        let a = run_property("lemma.secure_size", &code(5, 1), &budget).unwrap();
        let b = run_property("lemma.secure_size", &code(5, 1), &budget).unwrap();
        assert_eq!(a.checked, 7);
        assert_eq!(a.sampled.unwrap().seed, budget.seed);
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn unknown_id_and_failure_witness() {
        assert!(run_property("no.such", &code(5, 1), &Budget::default()).is_none());
        let mut c = Check::new("x", "y".into());
        c.case(true, || json!(1));
        c.case(false, || json!({"first": true}));
        c.case(false, || json!({"first": false}));
        let r = c.finish();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.checked, 3);
        assert_eq!(r.witness.unwrap()["first"], true);
    }

    #[test]
    fn report_is_byte_stable() {
        let a = to_json_lines(&check_all(&code(5, 1), &Budget::default()));
        let b = to_json_lines(&check_all(&code(5, 1), &Budget::default()));
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), PROPERTIES.len());
    }
}
