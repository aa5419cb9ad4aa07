//! Acceptance criteria, one PASS/FAIL line each. Every comparison is exact.
//!
//! Reference instance: product-matrix code (n=5, k=3, d=4, α=2, β=1, B=6)
//! over GF(16), plus its n=6 extension and the m=2 concatenation.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rsl_core::capacity::{bounds_table, capacity_csv, secrecy_capacity, Bound, CapacityQuery, Category};
use rsl_core::entropy::{joint_entropy, ObsSet};
use rsl_core::field::{Field, FieldSpec};
use rsl_core::harness::{run_property, Budget, Status};
use rsl_core::pmmsr::{CodeParams, PmMsrCode, Selector};
use rsl_core::secrecy::{achieved_secure_size, attack_report, leakage, models, SecureScheme};

type Outcome = Result<(), String>;

fn gf16() -> FieldSpec {
    FieldSpec::new(2, 4, None).unwrap()
}

fn code(n: usize, m: usize) -> PmMsrCode {
    PmMsrCode::new(CodeParams::product_matrix(n, 3, m).unwrap(), gf16(), None).unwrap()
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_symbols<K: Field>(k: &K, n: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let top = (k.order() - 1) as u64;
    (0..n).map(|_| rng.gen_range(0..=top)).collect()
}

fn codec_correctness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let c5 = code(5, 1);
    let msg = random_symbols(c5.field(), 6, &mut rng);
    let shares = c5.encode(&msg).map_err(|e| e.to_string())?;
    for set in (1..=5).combinations(3) {
        let sub: Vec<(usize, Vec<u64>)> = set.iter().map(|&i| (i, shares[i - 1].clone())).collect();
        let back = c5.reconstruct(&sub).map_err(|e| e.to_string())?;
        ensure(back == msg, || format!("reconstruction from {set:?} differs"))?;
    }
    for f in 1..=5 {
        let helpers: Vec<usize> = (1..=5).filter(|&i| i != f).collect();
        let symbols: Vec<Vec<u64>> = helpers
            .iter()
            .map(|&i| c5.repair_symbol(i, f, &shares[i - 1]).unwrap())
            .collect();
        let repaired = c5.repair(f, &helpers, &symbols).map_err(|e| e.to_string())?;
        ensure(repaired == shares[f - 1], || format!("repair of node {f} is not exact"))?;
    }

    let c6 = code(6, 1);
    let msg = random_symbols(c6.field(), 6, &mut rng);
    let shares = c6.encode(&msg).map_err(|e| e.to_string())?;
    for f in 1..=6 {
        let others: Vec<usize> = (1..=6).filter(|&i| i != f).collect();
        let mut results = Vec::new();
        for helpers in others.into_iter().combinations(4) {
            let symbols: Vec<Vec<u64>> = helpers
                .iter()
                .map(|&i| c6.repair_symbol(i, f, &shares[i - 1]).unwrap())
                .collect();
            results.push(c6.repair(f, &helpers, &symbols).map_err(|e| e.to_string())?);
        }
        ensure(results.len() == 5, || format!("expected 5 helper subsets, got {}", results.len()))?;
        ensure(results.iter().all(|r| *r == shares[f - 1]), || {
            format!("node {f}: repaired shares differ across helper subsets")
        })?;
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(5), || format!("took {took:?}"))
}

fn entropy_lemmas() -> Outcome {
    let c = code(5, 1);
    let rank = |s: Selector| joint_entropy(&ObsSet::select(&c, &s).unwrap());
    for i in 1..=5 {
        ensure(rank(Selector::Stored(vec![i])) == 2, || format!("rank(W_{i}) != 2"))?;
        ensure(rank(Selector::RepairTo(vec![i])) == 4, || format!("rank(S^{i}) != 4"))?;
        for j in (1..=5).filter(|&j| j != i) {
            ensure(rank(Selector::RepairFromTo(vec![i], vec![j])) == 1, || format!("rank(S_{i}^{j}) != 1"))?;
        }
    }
    let budget = Budget::default();
    for id in [
        "lemma.repair_independence",
        "lemma.repair_determinism",
        "lemma.secure_size",
        "lemma.helper_symmetry",
        "lemma.express",
    ] {
        let r = run_property(id, &c, &budget).unwrap();
        ensure(r.status == Status::Pass && r.sampled.is_none() && r.checked > 0, || r.to_json())?;
    }
    Ok(())
}

fn category1_capacity() -> Outcome {
    let c = code(5, 1);
    for ((l1, l2), want) in [((0, 1), 2), ((1, 1), 1), ((2, 0), 2), ((1, 0), 4), ((0, 2), 0)] {
        let formula = (3 - l1 - l2) * (2 - l2);
        ensure(formula == want, || format!("formula ({l1},{l2}) = {formula}"))?;
        for m in models(&c, l1, l2) {
            let got = achieved_secure_size(&c, &m).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("m=1 {m:?}: achieved {got}, expected {want}"))?;
        }
    }
    let c2 = code(5, 2);
    for m in models(&c2, 0, 1) {
        let got = achieved_secure_size(&c2, &m).map_err(|e| e.to_string())?;
        ensure(got == 4, || format!("m=2 {m:?}: achieved {got}, expected 4"))?;
    }
    Ok(())
}

fn category2_bound() -> Outcome {
    let q = CapacityQuery::msr(3, 4, 5, 2, 0, 2).map_err(|e| e.to_string())?;
    let cap = secrecy_capacity(&q).map_err(|e| e.to_string())?;
    ensure(
        cap.value == int(1) && cap.kind == Bound::UpperBound && cap.category == Category::Cat2,
        || format!("capacity {cap:?}"),
    )?;
    ensure(cap.t == Some(1) && cap.e == Some(1), || format!("t={:?} e={:?}", cap.t, cap.e))?;
    let pi = rsl_core::capacity::pi(&q).map_err(|e| e.to_string())?;
    ensure(pi.value == int(3), || format!("π = {}", pi.value))?;
    let table = bounds_table(&q).map_err(|e| e.to_string())?;
    ensure(table.goparaju == int(1), || format!("goparaju = {}", table.goparaju))?;

    let c2 = code(5, 2);
    for m in models(&c2, 0, 2) {
        let got = achieved_secure_size(&c2, &m).map_err(|e| e.to_string())?;
        ensure(got == 0 && cap.admits(got), || format!("{m:?}: achieved {got}"))?;
    }

    for k in 2..=6usize {
        let d = 2 * k - 2;
        let gap = d - k + 1;
        for beta in [gap, 2 * gap] {
            for l2 in 1..k {
                let q = CapacityQuery::msr(k, d, d + 1, beta, 0, l2).map_err(|e| e.to_string())?;
                ensure(q.t() == 1, || format!("t != 1 for {q:?}"))?;
                let this = secrecy_capacity(&q).map_err(|e| e.to_string())?.value;
                let shrink = int(1) - BigRational::new(BigInt::from(1), BigInt::from(gap as i64));
                let collapsed = int((k - l2) as i64) * num_traits::pow(shrink, l2) * int(q.alpha as i64);
                let gop = bounds_table(&q).map_err(|e| e.to_string())?.goparaju;
                ensure(this == collapsed && gop == collapsed, || {
                    format!("{q:?}: this={this} goparaju={gop} collapse={collapsed}")
                })?;
            }
        }
    }
    Ok(())
}

fn perfect_secrecy() -> Outcome {
    let start = Instant::now();
    let c = code(5, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (l1, l2) in [(0, 1), (1, 1), (2, 0), (1, 0)] {
        let scheme = SecureScheme::new(&c, l1, l2).map_err(|e| e.to_string())?;
        let worst = models(&c, l1, l2).iter().map(|m| leakage(&c, m).unwrap()).max().unwrap();
        ensure(scheme.randomness() == worst, || format!("ℓ = {} for ({l1},{l2})", scheme.randomness()))?;
        for m in models(&c, l1, l2) {
            let r = scheme.verify_perfect(&m).map_err(|e| e.to_string())?;
            ensure(r.perfect, || format!("({l1},{l2}) {m:?}: leaked {}", r.leaked))?;
        }

        let l = scheme.extension().clone();
        let secret = random_symbols(&l, scheme.secret_size(), &mut rng);
        let noise = random_symbols(&l, scheme.randomness(), &mut rng);
        let shares = c.encode_in(&l, &scheme.wrap(&secret, &noise).map_err(|e| e.to_string())?).unwrap();
        for m in models(&c, l1, l2) {
            let report = attack_report(&c, &m, Some(&scheme)).map_err(|e| e.to_string())?;
            ensure(report.perfect && report.matches, || format!("attack on {m:?}: {report:?}"))?;
        }
        for set in (1..=5).combinations(3) {
            let sub: Vec<(usize, Vec<u64>)> = set.iter().map(|&i| (i, shares[i - 1].clone())).collect();
            let back = c.reconstruct_in(&l, &sub).map_err(|e| e.to_string())?;
            let d = scheme.unwrap(&back).map_err(|e| e.to_string())?;
            ensure(d == secret, || format!("({l1},{l2}) secret from {set:?} differs"))?;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(30), || format!("took {took:?}"))
}

fn truncation_and_stability() -> Outcome {
    let c6 = code(6, 1);
    let c5 = c6.truncate(5).map_err(|e| e.to_string())?;
    for (l1, l2) in [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)] {
        for m in models(&c5, l1, l2) {
            let a = leakage(&c6, &m).map_err(|e| e.to_string())?;
            let b = leakage(&c5, &m).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("{m:?}: n=6 leaks {a}, truncation leaks {b}"))?;
        }
    }
    for f in [vec![1], vec![1, 2]] {
        let mut all = ObsSet::empty(gf16(), 6);
        let mut best = 0;
        for epoch in 0..5 {
            let mut this = ObsSet::empty(gf16(), 6);
            for &target in &f {
                let helpers = (1..=6).filter(|&i| i != target).combinations(4).nth(epoch).unwrap();
                for h in helpers {
                    for o in c6.repair_rows(h, target, epoch as u64 + 1) {
                        all.push(o.clone()).unwrap();
                        this.push(o).unwrap();
                    }
                }
            }
            best = best.max(joint_entropy(&this));
        }
        let growth = joint_entropy(&all) - best;
        ensure(growth == 0, || format!("F={f:?}: rank grows by {growth} across epochs"))?;
    }
    Ok(())
}

fn table_reproduction() -> Outcome {
    let q = CapacityQuery::msr(3, 4, 5, 1, 0, 1).map_err(|e| e.to_string())?;
    let t = bounds_table(&q).map_err(|e| e.to_string())?;
    let got = (
        t.pawar.clone(),
        t.shah.clone(),
        t.rawat.clone(),
        t.goparaju.clone(),
        t.explicit.value.clone(),
        t.explicit.kind,
    );
    let want = (int(4), int(2), Some(int(2)), int(2), int(2), Bound::Exact);
    ensure(got == want, || format!("{got:?}"))?;

    let mut queries = vec![q];
    for l1 in 0..3 {
        let q0 = CapacityQuery::msr(3, 4, 5, 1, l1, 0).map_err(|e| e.to_string())?;
        let t = bounds_table(&q0).map_err(|e| e.to_string())?;
        let full = int(((3 - l1) * 2) as i64);
        ensure(
            t.pawar == full && t.shah == full && t.goparaju == full && t.explicit.value == full && t.explicit.kind == Bound::Exact,
            || format!("l1={l1}, l2=0 does not collapse: {t:?}"),
        )?;
        queries.push(q0);
    }
    let a = capacity_csv(&queries).map_err(|e| e.to_string())?;
    let b = capacity_csv(&queries).map_err(|e| e.to_string())?;
    ensure(a == b, || "CSV differs between runs".into())?;
    ensure(a.lines().nth(1) == Some("3,4,5,2,1,0,1,4,4,3,2,2,2,2,exact"), || a.clone())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 codec correctness", codec_correctness),
        ("2 entropy lemmas", entropy_lemmas),
        ("3 category 1 capacity equality", category1_capacity),
        ("4 category 2 bound respected", category2_bound),
        ("5 perfect secrecy", perfect_secrecy),
        ("6 truncation and stability", truncation_and_stability),
        ("7 comparison table reproduction", table_reproduction),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        match run() {
            Ok(()) => println!("PASS criterion {name} ({:.2?})", start.elapsed()),
            Err(why) => {
                println!("FAIL criterion {name}: {why}");
                failed.push(name);
            }
        }
    }
    println!("\n{} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
