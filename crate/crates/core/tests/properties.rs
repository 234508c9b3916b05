use proptest::collection::vec;
use proptest::prelude::*;
use tic_core::dataset::{encode_nominals, Attribute, Cell, Constant, Dataset, Example, GroundFact, Role, Schema};
use tic_core::eval::{assign_leaf_labels, corrupt_missing, crossvalidate, fold_assignment, EvalConfig, EvalMode};
use tic_core::induction::{best_split, induce_tree, score_split, InduceConfig, SplitScore};
use tic_core::logic::{generate_candidates, match_query, Binding, CandidateOptions, Literal, PathContext, Term};
use tic_core::metrics::{cluster_distance, prototype, relative_error, sum_squares, DistanceSpec, Metric};
use tic_core::pruning::{prune, tree_quality, QualityMeasure};
use tic_core::TemplateSet;

fn numeric(rows: &[Vec<f64>]) -> Dataset {
    let width = rows.first().map_or(1, Vec::len);
    let schema = Schema::new((0..width).map(|i| Attribute::numeric(format!("x{i}"))).collect()).unwrap();
    let ex = rows.iter().map(|r| Example::new(r.iter().map(|&v| Cell::Number(v)).collect())).collect();
    Dataset::new(schema, ex).unwrap()
}

fn labeled(rows: &[(Vec<f64>, u32)]) -> Dataset {
    let width = rows[0].0.len();
    let mut attrs: Vec<Attribute> = (0..width).map(|i| Attribute::numeric(format!("x{i}"))).collect();
    attrs.push(Attribute::nominal("class", ["a", "b", "c"]).with_role(Role::Class));
    let schema = Schema::new(attrs).unwrap();
    let ex = rows
        .iter()
        .map(|(r, c)| {
            let mut v: Vec<Cell> = r.iter().map(|&x| Cell::Number(x)).collect();
            v.push(Cell::Code(*c));
            Example::new(v)
        })
        .collect();
    Dataset::new(schema, ex).unwrap()
}

fn plain_metric(ds: &Dataset, dims: Vec<usize>) -> Metric {
    DistanceSpec::plain(dims).unwrap().freeze(ds, &ds.ids()).unwrap()
}

fn small_value() -> impl Strategy<Value = f64> {
    (-20i32..20).prop_map(|v| v as f64 / 2.0)
}

fn rows(n: std::ops::RangeInclusive<usize>, width: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    vec(vec(small_value(), width), n)
}

fn partitions(n: usize) -> impl Iterator<Item = (Vec<usize>, Vec<usize>)> {
    // masks with bit 0 set enumerate each unordered partition once
    (1u32..(1 << n) - 1).filter(|m| m & 1 == 1).map(move |m| (0..n).partition(|&i| m >> i & 1 == 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn decomposition_identity(r in rows(6..=6, 2)) {
        let ds = numeric(&r);
        let m = plain_metric(&ds, vec![0, 1]);
        let ss = sum_squares(&m, &ds, &ds.ids()).unwrap();
        for (l, rt) in partitions(6) {
            let d = cluster_distance(&m, &ds, &l, &rt).unwrap();
            let rhs = sum_squares(&m, &ds, &l).unwrap()
                + sum_squares(&m, &ds, &rt).unwrap()
                + (l.len() * rt.len()) as f64 / 6.0 * d * d;
            prop_assert!((ss - rhs).abs() <= 1e-9 * ss.max(1.0));
        }
    }

    #[test]
    fn distance_symmetric_and_zero_on_equal(
        a in vec(prop::option::of(small_value()), 3),
        b in vec(prop::option::of(small_value()), 3),
    ) {
        let ds = numeric(&[vec![0.0, 0.0, 0.0]]);
        let m = plain_metric(&ds, vec![0, 1, 2]);
        let ab = m.distance(&a, &b);
        let ba = m.distance(&b, &a);
        prop_assert_eq!(ab.is_ok(), ba.is_ok());
        if let (Ok(x), Ok(y)) = (ab, ba) {
            prop_assert_eq!(x, y);
            prop_assert!(x >= 0.0);
            let common_equal = a.iter().zip(&b).all(|(p, q)| match (p, q) {
                (Some(p), Some(q)) => p == q,
                _ => true,
            });
            prop_assert_eq!(x == 0.0, common_equal);
        }
    }

    #[test]
    fn weight_scaling(r in rows(3..=8, 2), c in 0.1f64..10.0) {
        let ds = numeric(&r);
        let m = plain_metric(&ds, vec![0, 1]);
        let mc = m.reweighted(c);
        let (a, b) = (m.project(ds.example(0)), m.project(ds.example(1)));
        let d = m.distance(&a, &b).unwrap();
        prop_assert!((mc.distance(&a, &b).unwrap() - c.sqrt() * d).abs() <= 1e-9 * d.max(1.0));
        let base = prototype(&m, &ds, &ds.ids()).unwrap();
        let half = prototype(&m, &ds, &[0]).unwrap();
        let actuals: Vec<_> = ds.examples().iter().map(|e| m.project(e)).collect();
        let preds = vec![&half; actuals.len()];
        if let (Ok(x), Ok(y)) = (relative_error(&m, &actuals, &preds, &base), relative_error(&mc, &actuals, &preds, &base)) {
            prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0));
        }
    }

    #[test]
    fn baseline_relative_error_is_one(r in rows(2..=10, 2)) {
        let ds = numeric(&r);
        let m = plain_metric(&ds, vec![0, 1]);
        let base = prototype(&m, &ds, &ds.ids()).unwrap();
        let actuals: Vec<_> = ds.examples().iter().map(|e| m.project(e)).collect();
        let preds = vec![&base; actuals.len()];
        let re = relative_error(&m, &actuals, &preds, &base).unwrap();
        if actuals.iter().any(|a| a != &actuals[0]) {
            prop_assert_eq!(re, 1.0);
        } else {
            prop_assert_eq!(re, 0.0);
        }
    }

    #[test]
    fn best_split_matches_exhaustive_oracle(r in rows(3..=8, 2), min_leaf in 1usize..3) {
        let ds = numeric(&r);
        let m = plain_metric(&ds, vec![0, 1]);
        let ids = ds.ids();
        let cands = generate_candidates(
            &PathContext::default(),
            &TemplateSet::default(),
            &ds,
            &ids,
            &CandidateOptions { test_attributes: &[0, 1], max_literals: 0 },
        );
        let got = best_split(&ds, &ids, &cands, &[], &m, SplitScore::InterDistance, min_leaf);
        // oracle: every threshold partition, scored from scratch
        let mut oracle: Option<f64> = None;
        for attr in 0..2 {
            let mut vals: Vec<f64> = r.iter().map(|row| row[attr]).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            for t in vals.iter().take(vals.len().saturating_sub(1)) {
                let (l, rt): (Vec<usize>, Vec<usize>) = ids.iter().partition(|&&i| r[i][attr] <= *t);
                if l.len() < min_leaf || rt.len() < min_leaf {
                    continue;
                }
                let mean = |c: &[usize], k: usize| c.iter().map(|&i| r[i][k]).sum::<f64>() / c.len() as f64;
                let d = ((mean(&l, 0) - mean(&rt, 0)).powi(2) + (mean(&l, 1) - mean(&rt, 1)).powi(2)).sqrt();
                oracle = Some(oracle.map_or(d, |o: f64| o.max(d)));
            }
        }
        match (got, oracle) {
            (None, None) => {}
            (Some((_, s)), Some(o)) => prop_assert!((s.score - o).abs() <= 1e-9 * o.max(1.0)),
            (g, o) => prop_assert!(false, "best_split {:?} vs oracle {:?}", g.map(|x| x.1.score), o),
        }
    }

    #[test]
    fn every_threshold_partition_has_one_candidate(values in vec(small_value(), 2..10)) {
        let ds = numeric(&values.iter().map(|&v| vec![v]).collect::<Vec<_>>());
        let ids = ds.ids();
        let cands = generate_candidates(
            &PathContext::default(),
            &TemplateSet::default(),
            &ds,
            &ids,
            &CandidateOptions { test_attributes: &[0], max_literals: 0 },
        );
        let mut distinct = values.clone();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        prop_assert_eq!(cands.len(), distinct.len() - 1);
        let masks: Vec<Vec<bool>> = cands.iter().map(|c| ids.iter().map(|&i| c.holds(ds.example(i), &[])).collect()).collect();
        for t in &distinct[..distinct.len() - 1] {
            let want: Vec<bool> = values.iter().map(|v| v <= t).collect();
            prop_assert_eq!(masks.iter().filter(|m| **m == want).count(), 1);
        }
    }

    #[test]
    fn weighted_between_ss_minimizes_within_class_variance(classes in vec(0u32..2, 3..=8), xs in vec(small_value(), 8)) {
        let n = classes.len();
        let ds = numeric(&(0..n).map(|i| vec![classes[i] as f64, xs[i]]).collect::<Vec<_>>());
        let m = plain_metric(&ds, vec![0]);
        let ids = ds.ids();
        let cands = generate_candidates(
            &PathContext::default(),
            &TemplateSet::default(),
            &ds,
            &ids,
            &CandidateOptions { test_attributes: &[1], max_literals: 0 },
        );
        let Some((_, chosen)) = best_split(&ds, &ids, &cands, &[], &m, SplitScore::WeightedBetweenSs, 1) else {
            return Ok(());
        };
        let within = |mask: &[bool]| {
            let side = |want: bool| {
                let c: Vec<f64> = (0..n).filter(|&i| mask[i] == want).map(|i| classes[i] as f64).collect();
                let mu = c.iter().sum::<f64>() / c.len() as f64;
                c.iter().map(|x| (x - mu).powi(2)).sum::<f64>()
            };
            side(true) + side(false)
        };
        let best = cands
            .iter()
            .map(|c| ids.iter().map(|&i| c.holds(ds.example(i), &[])).collect::<Vec<_>>())
            .filter(|m| m.iter().any(|&b| b) && m.iter().any(|&b| !b))
            .map(|m| within(&m))
            .fold(f64::INFINITY, f64::min);
        prop_assert!((chosen.ss_left + chosen.ss_right - best).abs() <= 1e-9);
    }

    #[test]
    fn leaves_partition_training_set(r in rows(3..=30, 2), alpha in prop::sample::select(vec![0.01, 0.25, 0.5, 1.0])) {
        let ds = numeric(&r);
        let cfg = InduceConfig { f_alpha: alpha, min_leaf: 1, ..InduceConfig::new(plain_metric(&ds, vec![0, 1])) };
        let tree = induce_tree(&ds, &ds.ids(), &cfg).unwrap();
        let mut seen = vec![0usize; ds.len()];
        for leaf in tree.leaves() {
            for &i in &tree.node(leaf).cluster {
                seen[i] += 1;
                prop_assert_eq!(tree.sort(ds.example(i)), leaf);
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn raising_alpha_never_shrinks_tree(r in rows(3..=30, 2), a in 0usize..4, b in 0usize..4) {
        let alphas = [0.01, 0.05, 0.25, 1.0];
        let (lo, hi) = (alphas[a.min(b)], alphas[a.max(b)]);
        let ds = numeric(&r);
        let base = InduceConfig::new(plain_metric(&ds, vec![0, 1]));
        let small = induce_tree(&ds, &ds.ids(), &InduceConfig { f_alpha: lo, ..base.clone() }).unwrap();
        let large = induce_tree(&ds, &ds.ids(), &InduceConfig { f_alpha: hi, ..base }).unwrap();
        prop_assert!(large.node_count() >= small.node_count());
    }

    #[test]
    fn pruning_invariants(data in vec((vec(small_value(), 2), 0u32..3), 12..40), seed in any::<u64>()) {
        let ds = labeled(&data);
        let ids = ds.ids();
        let (train, valid) = tic_core::pruning::split_learn_set(&ids, 0.3, seed).unwrap();
        let cfg = InduceConfig { f_alpha: 1.0, min_leaf: 1, ..InduceConfig::new(
            DistanceSpec::plain(vec![0, 1]).unwrap().freeze(&ds, &train).unwrap()) };
        let tree = assign_leaf_labels(&induce_tree(&ds, &train, &cfg).unwrap(), &ds, &train).unwrap();
        for measure in [QualityMeasure::Accuracy { class_attr: 2 }, QualityMeasure::InverseRelativeError] {
            for ties in [false, true] {
                let pruned = prune(&tree, &ds, &valid, measure, ties).unwrap();
                prop_assert!(pruned.node_count() <= tree.node_count());
                let q0 = tree_quality(&tree, &ds, &valid, measure).unwrap();
                let q1 = tree_quality(&pruned, &ds, &valid, measure).unwrap();
                prop_assert!(q1 >= q0);
                prop_assert_eq!(&prune(&pruned, &ds, &valid, measure, ties).unwrap(), &pruned);
                for node in pruned.nodes() {
                    prop_assert!(tree.nodes().iter().any(|o| o.cluster == node.cluster));
                }
            }
        }
    }

    #[test]
    fn unsupervised_ignores_class(data in vec((vec(small_value(), 2), 0u32..3), 10..30), seed in any::<u64>(), shift in 1u32..3) {
        let ds = labeled(&data);
        let permuted = labeled(&data.iter().map(|(r, c)| (r.clone(), (c + shift) % 3)).collect::<Vec<_>>());
        let cfg = EvalConfig::new(DistanceSpec::plain(vec![0, 1, 2]).unwrap());
        let structure = |d: &Dataset| {
            let spec = cfg.distance_for(d.schema(), EvalMode::Unsupervised).unwrap();
            let tree = induce_tree(d, &d.ids(), &cfg.induce_config(spec.freeze(d, &d.ids()).unwrap(), seed)).unwrap();
            tree.nodes().iter().map(|n| (n.test.clone(), n.cluster.clone())).collect::<Vec<_>>()
        };
        let enc = encode_nominals(&ds);
        let enc_p = encode_nominals(&permuted);
        prop_assert_eq!(structure(&enc), structure(&enc_p));
    }

    #[test]
    fn folds_cover_every_example_once(n in 2usize..60, k in 2usize..12, seed in any::<u64>(), strat in any::<bool>()) {
        prop_assume!(k <= n);
        let ds = labeled(&(0..n).map(|i| (vec![i as f64], (i % 3) as u32)).collect::<Vec<_>>());
        let f = fold_assignment(&ds, k, seed, strat).unwrap();
        prop_assert_eq!(f.len(), n);
        prop_assert!(f.iter().all(|&x| x < k));
        for fold in 0..k {
            let size = f.iter().filter(|&&x| x == fold).count();
            prop_assert!(size == n / k || size == n / k + 1);
        }
    }

    #[test]
    fn corruption_touches_only_targets(data in vec((vec(small_value(), 2), 0u32..3), 1..30), p in 0.0f64..=1.0, seed in any::<u64>()) {
        let ds = labeled(&data).map_cells(|_, _, c| c).unwrap();
        let out = corrupt_missing(&ds, &[(1, p)], seed).unwrap();
        for (a, b) in ds.examples().iter().zip(out.examples()) {
            prop_assert_eq!(a.value(0), b.value(0));
            prop_assert_eq!(a.value(2), b.value(2));
            prop_assert!(b.value(1) == a.value(1) || b.value(1).is_missing());
            prop_assert_eq!(a.facts(), b.facts());
        }
        prop_assert_eq!(&out, &corrupt_missing(&ds, &[(1, p)], seed).unwrap());
    }

    #[test]
    fn encoding_is_idempotent(codes in vec(prop::option::of(0u32..3), 1..20)) {
        let schema = Schema::new(vec![Attribute::nominal("a", ["x", "y", "z"]), Attribute::numeric("b")]).unwrap();
        let ex = codes
            .iter()
            .map(|c| Example::new(vec![c.map_or(Cell::Missing, Cell::Code), Cell::Number(1.5)]))
            .collect();
        let ds = Dataset::new(schema, ex).unwrap();
        let once = encode_nominals(&ds);
        prop_assert_eq!(&encode_nominals(&once), &once);
    }
}

fn constant() -> impl Strategy<Value = Constant> {
    prop::sample::select(vec!["a", "b", "c", "d"]).prop_map(Constant::symbol)
}

fn fact() -> impl Strategy<Value = GroundFact> {
    prop_oneof![
        vec(constant(), 2).prop_map(|a| GroundFact::new("p", a)),
        vec(constant(), 1).prop_map(|a| GroundFact::new("q", a)),
    ]
}

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![
        prop::sample::select(vec!["X", "Y", "Z"]).prop_map(Term::var),
        prop::sample::select(vec!["a", "b", "c", "d"]).prop_map(Term::sym),
    ]
}

fn literal() -> impl Strategy<Value = Literal> {
    prop_oneof![vec(term(), 2).prop_map(|a| Literal::new("p", a)), vec(term(), 1).prop_map(|a| Literal::new("q", a)),]
}

fn is_solution(q: &[Literal], facts: &[GroundFact], b: &Binding) -> bool {
    q.iter().all(|l| {
        facts.iter().any(|f| {
            f.functor == l.functor
                && f.args.len() == l.args.len()
                && l.args.iter().zip(&f.args).all(|(t, c)| match t {
                    Term::Const(k) => k == c,
                    Term::Var(v) => b.get(v) == Some(c),
                })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn match_query_monotone_and_sound(q in vec(literal(), 1..4), facts in vec(fact(), 0..8), extra in fact(), at in any::<prop::sample::Index>()) {
        let seed = Binding::new();
        let before = match_query(&q, &facts, &seed);
        prop_assert_eq!(&before, &match_query(&q, &facts, &seed));
        if let Some(b) = &before {
            prop_assert!(is_solution(&q, &facts, b));
            let mut more = facts.clone();
            more.insert(at.index(facts.len() + 1), extra);
            prop_assert!(match_query(&q, &more, &seed).is_some());
        }
    }
}

#[test]
fn single_leaf_tree_has_unit_relative_error() {
    let ds = numeric(&[vec![1.0], vec![2.0], vec![3.0]]);
    let m = plain_metric(&ds, vec![0]);
    let tree = induce_tree(&ds, &ds.ids(), &InduceConfig { max_depth: Some(0), ..InduceConfig::new(m) }).unwrap();
    let q = tree_quality(&tree, &ds, &ds.ids(), QualityMeasure::InverseRelativeError).unwrap();
    assert!((q - 1.0).abs() < 1e-6);
}

#[test]
fn score_split_agrees_with_sum_squares() {
    let ds = numeric(&[vec![0.0], vec![2.0], vec![8.0], vec![10.0]]);
    let m = plain_metric(&ds, vec![0]);
    let s = score_split(&m, &ds, &[0, 1], &[2, 3], SplitScore::InterDistance).unwrap();
    assert_eq!(s.ss, sum_squares(&m, &ds, &ds.ids()).unwrap());
    assert_eq!(s.ss_left, sum_squares(&m, &ds, &[0, 1]).unwrap());
}

#[test]
fn loo_report_has_one_fold_per_example() {
    let data: Vec<(Vec<f64>, u32)> = (0..12).map(|i| (vec![i as f64, (i % 4) as f64], (i / 4) as u32)).collect();
    let ds = encode_nominals(&labeled(&data));
    let cfg = EvalConfig::new(DistanceSpec::plain(vec![0, 1]).unwrap());
    let report = crossvalidate(&ds, 12, &cfg, 3, EvalMode::Unsupervised).unwrap();
    assert_eq!(report.folds.len(), 12);
    assert!(report.folds.iter().all(|f| f.n_test == 1));
    assert_eq!(report, crossvalidate(&ds, 12, &cfg, 3, EvalMode::Unsupervised).unwrap());
}
