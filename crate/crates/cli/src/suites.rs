//! Invariant suites run by `check`. Every suite is deterministic given the seed.

use std::collections::{BTreeMap, BTreeSet};

use monoprob::clt::{clt_limit, clt_oracle, CltQuery};
use monoprob::cumulants::{cumulant, cumulant_eval, cumulants_from_moments, moments_from_cumulants};
use monoprob::oracle::{dot_moment, dot_system, mixed_moment, mixed_moment_all_strategies, DotMethod, FormalWord};
use monoprob::partitions::{
    monotone_pair_partitions, monotone_partitions, non_crossing_partitions, ordered_partitions, q_map, set_partitions,
    HasBlocks,
};
use monoprob::random::{centered, int_matrix, rng, scalar_flip_model, seeded_model};
use monoprob::series::{
    diff_eq_residuals, muraki_oracle, muraki_sum, random_series, semigroup_sides, series_equal, symbolic_args,
    symbolic_series, tuples, EqualityMode, Series,
};
use monoprob::{BMatrix, MomentSystem, PolyMatrix, Rational};
use serde_json::{json, Value};

pub const SUITES: [&str; 5] = ["partitions", "oracle", "cumulants", "series", "clt"];

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn text(e: monoprob::Error) -> String {
    e.to_string()
}

fn full_basis(r: usize, d: usize, n: usize, mut f: impl FnMut(&[usize], &[BMatrix]) -> Result<(), String>) -> Result<usize, String> {
    let mut count = 0;
    for i in tuples(r, n) {
        for u in tuples(d * d, n) {
            let b: Vec<BMatrix> = u.iter().map(|&k| BMatrix::unit_flat(d, k)).collect();
            f(&i, &b)?;
            count += 1;
        }
    }
    Ok(count)
}

fn crossing(v: &[usize], w: &[usize]) -> bool {
    let interleaved = |a: &[usize], b: &[usize]| {
        a.iter().any(|&p| b.iter().any(|&q| a.iter().any(|&s| b.iter().any(|&t| p < q && q < s && s < t))))
    };
    interleaved(v, w) || interleaved(w, v)
}

fn inner(v: &[usize], w: &[usize]) -> bool {
    w.iter().any(|&i| w.iter().any(|&j| v.iter().all(|&k| i < k && k < j)))
}

fn linear_extensions(blocks: &[Vec<usize>]) -> u64 {
    let k = blocks.len();
    let before: Vec<usize> = (0..k)
        .map(|a| (0..k).filter(|&b| b != a && inner(&blocks[a], &blocks[b])).fold(0, |m, b| m | (1 << b)))
        .collect();
    let mut ways = vec![0u64; 1 << k];
    ways[0] = 1;
    for mask in 0..1usize << k {
        for a in (0..k).filter(|&a| mask & (1 << a) == 0 && before[a] & !mask == 0) {
            ways[mask | (1 << a)] += ways[mask];
        }
    }
    ways[(1 << k) - 1]
}

fn partition_checks() -> Vec<(&'static str, Check)> {
    let counts = || -> Check {
        let catalan = [1usize, 2, 5, 14, 42, 132];
        for n in 1..=6 {
            let filtered: Vec<Vec<Vec<usize>>> = set_partitions(n)
                .iter()
                .map(|p| p.to_vecs())
                .filter(|bs| (0..bs.len()).all(|a| (a + 1..bs.len()).all(|b| !crossing(&bs[a], &bs[b]))))
                .collect();
            ensure(filtered.len() == catalan[n - 1], || format!("filter gives {} for n = {n}", filtered.len()))?;
            ensure(non_crossing_partitions(n).len() == filtered.len(), || format!("enumeration size differs for n = {n}"))?;
            let extensions: u64 = filtered.iter().map(|bs| linear_extensions(bs)).sum();
            let direct = monotone_partitions(n).len() as u64;
            ensure(direct == extensions, || format!("|M({n})| = {direct}, linear extensions {extensions}"))?;
        }
        Ok("n <= 6".into())
    };
    let surjective = || -> Check {
        for n in 1..=5 {
            let image: BTreeSet<_> = ordered_partitions(n).iter().map(q_map).collect();
            let nc: BTreeSet<_> = non_crossing_partitions(n).into_iter().collect();
            ensure(image == nc, || format!("image of the q-map is not NC({n})"))?;
        }
        Ok("image is NC(n) for n <= 5".into())
    };
    let refines = || -> Check {
        for n in 1..=5 {
            for pi in ordered_partitions(n) {
                ensure(q_map(&pi).refines(&pi.underlying()), || format!("q-map of {pi:?} does not refine it"))?;
            }
        }
        Ok("q-map refines its input for n <= 5".into())
    };
    let pairs = || -> Check {
        for (n, expected) in [(2usize, Rational::from(1)), (4, Rational::new(3, 2)), (6, Rational::new(5, 2))] {
            let total: Rational =
                monotone_pair_partitions(n).map_err(text)?.iter().map(|p| Rational::new(1, (1..=p.block_count() as i64).product())).sum();
            ensure(total == expected, || format!("pair weights for n = {n} sum to {total}"))?;
        }
        Ok("weighted pair counts 1, 3/2, 5/2".into())
    };
    vec![("counts", counts()), ("q-map surjective", surjective()), ("q-map refines", refines()), ("pair partitions", pairs())]
}

fn oracle_checks(seed: u64) -> Vec<(&'static str, Check)> {
    let equivalence = || -> Check {
        let x = MomentSystem::from_model(seeded_model(seed, 2, 2, 2), 4);
        let mut count = 0;
        for n in 1..=4 {
            for copies in 0..=3 {
                count += full_basis(2, 2, n, |i, b| {
                    let a = dot_moment(&x, copies, i, b, DotMethod::Reduction).map_err(text)?;
                    let q = dot_moment(&x, copies, i, b, DotMethod::Qmap).map_err(text)?;
                    ensure(a == q, || format!("N = {copies}, indices {i:?}: {a} vs {q}"))
                })?;
            }
        }
        Ok(format!("{count} evaluations"))
    };
    let confluence = || -> Check {
        let marginals: BTreeMap<usize, MomentSystem> =
            (1..=3).map(|l| (l, MomentSystem::from_model(seeded_model(seed + l as u64, 2, 2, 2), 5))).collect();
        let mut g = rng(seed);
        let mut words = 0;
        for n in 1..=5 {
            for labels in tuples(3, n) {
                let labels: Vec<usize> = labels.iter().map(|l| l + 1).collect();
                let indices: Vec<usize> = (0..n).map(|j| (labels[j] + j) % 2).collect();
                let args: Vec<BMatrix> = (0..n).map(|_| int_matrix(&mut g, 2, 2)).collect();
                let word = FormalWord::moment_word(&labels, &indices, &args).map_err(text)?;
                let first = mixed_moment(&word, &marginals, &[1, 2, 3]).map_err(text)?;
                let all = mixed_moment_all_strategies(&word, &marginals, &[1, 2, 3]).map_err(text)?;
                ensure(all.iter().all(|v| v == &first), || format!("labels {labels:?}"))?;
                words += 1;
            }
        }
        Ok(format!("{words} words"))
    };
    vec![("reduction equals q-map", equivalence()), ("confluence", confluence())]
}

fn cumulant_checks(seed: u64) -> Vec<(&'static str, Check)> {
    let x = MomentSystem::from_model(seeded_model(seed + 10, 2, 2, 2), 4);
    let dual = || -> Check {
        let inv = cumulants_from_moments(&x);
        let mut count = 0;
        for n in 1..=4 {
            count += full_basis(2, 2, n, |i, b| {
                let a = cumulant_eval(&x, i, b).map_err(text)?;
                let c = inv.eval(i, b).map_err(text)?;
                ensure(a == c, || format!("indices {i:?}: {a} vs {c}"))
            })?;
        }
        Ok(format!("{count} entries"))
    };
    let formula = || -> Check {
        let kappa = cumulant(&x);
        let mut count = 0;
        for n in 1..=4 {
            count += full_basis(2, 2, n, |i, b| {
                let a = moments_from_cumulants(&kappa, i, b).map_err(text)?;
                let m = x.eval(i, b).map_err(text)?;
                ensure(a == m, || format!("indices {i:?}: {a} vs {m}"))
            })?;
        }
        Ok(format!("{count} entries"))
    };
    let additivity = || -> Check {
        let kappa = cumulant(&x);
        for copies in 1..=3 {
            let sum = dot_system(&x, copies, DotMethod::Reduction);
            for n in 1..=3 {
                full_basis(2, 2, n, |i, b| {
                    let a = cumulant_eval(&sum, i, b).map_err(text)?;
                    let c = kappa.eval(i, b).map_err(text)?.scale(&Rational::from(copies));
                    ensure(a == c, || format!("N = {copies}, indices {i:?}: {a} vs {c}"))
                })?;
            }
        }
        Ok("N <= 3, n <= 3".into())
    };
    vec![("interpolation equals inversion", dual()), ("moment-cumulant formula", formula()), ("additivity", additivity())]
}

fn series_checks(seed: u64) -> Vec<(&'static str, Check)> {
    let algebra = || -> Check {
        let f = random_series(seed + 20, 2, 2, 4, 2);
        let g = random_series(seed + 21, 2, 2, 4, 2);
        let h = random_series(seed + 22, 2, 2, 4, 2);
        let exhaustive = EqualityMode::Exhaustive { degree: 4 };
        let left = f.odot(&g).map_err(text)?.memoized().odot(&h).map_err(text)?;
        let right = f.odot(&g.odot(&h).map_err(text)?.memoized()).map_err(text)?;
        ensure(series_equal(&left, &right, exhaustive).map_err(text)?, || "associativity".into())?;
        let sum_left = f.add(&g).map_err(text)?.odot(&h).map_err(text)?;
        let sum_right = f.odot(&h).map_err(text)?.add(&g.odot(&h).map_err(text)?).map_err(text)?;
        ensure(series_equal(&sum_left, &sum_right, exhaustive).map_err(text)?, || "right distributivity".into())?;
        let id = Series::identity(2, 4, BMatrix::identity(2));
        ensure(series_equal(&f.odot(&id).map_err(text)?, &f, exhaustive).map_err(text)?, || "right identity".into())?;
        ensure(series_equal(&id.odot(&f).map_err(text)?, &f, exhaustive).map_err(text)?, || "left identity".into())?;
        Ok("degree <= 4".into())
    };
    let counts = || -> Check {
        let two = symbolic_series("F", 1, 5).odot(&symbolic_series("G", 1, 5)).map_err(text)?;
        let three = two.odot(&symbolic_series("H", 1, 5)).map_err(text)?;
        for n in 1..=5 {
            let args = symbolic_args(n);
            let a = two.eval(&vec![0; n], &args).map_err(text)?.distinct_terms();
            let b = three.eval(&vec![0; n], &args).map_err(text)?.distinct_terms();
            ensure(a == 1 << n && b == 3usize.pow(n as u32), || format!("n = {n}: {a} and {b} terms"))?;
        }
        Ok("2^n and 3^n for n <= 5".into())
    };
    let muraki = || -> Check {
        let x = MomentSystem::from_model(seeded_model(seed + 23, 2, 2, 2), 4);
        let y = MomentSystem::from_model(seeded_model(seed + 24, 2, 3, 2), 4);
        let equal = series_equal(&muraki_sum(&x, &y).map_err(text)?, &muraki_oracle(&x, &y).map_err(text)?, EqualityMode::Exhaustive { degree: 4 })
            .map_err(text)?;
        ensure(equal, || "composition differs from the word expansion".into())?;
        Ok("degree <= 4".into())
    };
    let flow = || -> Check {
        let x = MomentSystem::from_model(seeded_model(seed + 25, 2, 2, 2), 4);
        let zero = Series::new(2, 4, PolyMatrix::zero(2), |_, _| PolyMatrix::zero(2));
        let mode = EqualityMode::Exhaustive { degree: 4 };
        let (left, right) = diff_eq_residuals(&x).map_err(text)?;
        ensure(series_equal(&left, &zero, mode).map_err(text)?, || "left residual".into())?;
        ensure(series_equal(&right, &zero, mode).map_err(text)?, || "right residual".into())?;
        let (shifted, product) = semigroup_sides(&x).map_err(text)?;
        ensure(series_equal(&shifted, &product, mode).map_err(text)?, || "semigroup".into())?;
        Ok("degree <= 4".into())
    };
    vec![("composition algebra", algebra()), ("term counts", counts()), ("sums of independent variables", muraki()), ("flow equations", flow())]
}

fn clt_checks(seed: u64) -> Vec<(&'static str, Check)> {
    let dual = || -> Check {
        let x = MomentSystem::from_model(centered(&seeded_model(seed + 30, 2, 3, 1)), 6);
        let mut count = 0;
        for n in 1..=6 {
            count += full_basis(1, 2, n, |_, b| {
                let q = CltQuery::new(&x, b.to_vec()).map_err(text)?;
                let a = clt_limit(&q).map_err(text)?;
                let o = clt_oracle(&q).map_err(text)?;
                ensure(a == o && (n % 2 == 0 || a.is_zero()), || format!("n = {n}: {a} vs {o}"))
            })?;
        }
        Ok(format!("{count} entries"))
    };
    let scalar = || -> Check {
        let x = MomentSystem::from_model(scalar_flip_model(), 6);
        for (n, expected) in [(2usize, Rational::from(1)), (4, Rational::new(3, 2)), (6, Rational::new(5, 2))] {
            let q = CltQuery::new(&x, vec![BMatrix::identity(1); n]).map_err(text)?;
            let v = clt_limit(&q).map_err(text)?;
            ensure(v == BMatrix::scalar(expected.clone()), || format!("n = {n}: {v}"))?;
            ensure(clt_oracle(&q).map_err(text)? == v, || format!("oracle differs at n = {n}"))?;
        }
        Ok("1, 3/2, 5/2".into())
    };
    let guard = || -> Check {
        let x = MomentSystem::from_model(seeded_model(seed + 31, 2, 2, 1), 4);
        let mean_zero = x.eval(&[0], &[BMatrix::identity(2)]).map_err(text)?.is_zero();
        ensure(mean_zero || CltQuery::new(&x, vec![BMatrix::identity(2); 2]).is_err(), || "nonzero mean accepted".into())?;
        Ok("nonzero mean rejected".into())
    };
    vec![("limit equals oracle", dual()), ("scalar moments", scalar()), ("mean guard", guard())]
}

/// Runs the named suites and returns the report and whether all checks passed.
pub fn run(names: &[&str], seed: u64) -> (Value, bool) {
    let mut all = true;
    let mut reports = Vec::new();
    for &name in names {
        let checks = match name {
            "partitions" => partition_checks(),
            "oracle" => oracle_checks(seed),
            "cumulants" => cumulant_checks(seed),
            "series" => series_checks(seed),
            "clt" => clt_checks(seed),
            other => unreachable!("unknown suite {other}"),
        };
        let passed = checks.iter().all(|(_, c)| c.is_ok());
        all &= passed;
        let checks: Vec<Value> = checks
            .into_iter()
            .map(|(check, outcome)| match outcome {
                Ok(detail) => json!({ "name": check, "passed": true, "detail": detail }),
                Err(reason) => json!({ "name": check, "passed": false, "detail": reason }),
            })
            .collect();
        reports.push(json!({ "name": name, "passed": passed, "checks": checks }));
    }
    (json!({ "seed": seed, "passed": all, "suites": reports }), all)
}
