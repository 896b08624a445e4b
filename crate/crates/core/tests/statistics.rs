use std::time::Instant;

use quartet_core::cost::score;
use quartet_core::fast_cost::{subtree_leaf_counts, subtree_leaf_sets, tree_cost_fast};
use quartet_core::mutation::FatTailK;
use quartet_core::quartet::embedded_quartets;
use quartet_core::{binomial, CostFunction, DistanceMatrix, ExplicitCosts, Tree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent normalizer: compensated partial sum to 10^6 plus the
/// midpoint-rule tail `1 / ln(N + 2.5)`.
fn reference_normalizer() -> f64 {
    const N: u64 = 1_000_000;
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for k in 1..=N {
        let y = k as f64 + 2.0;
        let term = 1.0 / (y * y.ln() * y.ln());
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
    }
    sum + comp + 1.0 / (N as f64 + 2.5).ln()
}

#[test]
fn normalizer_matches_the_series() {
    let fat = FatTailK::new();
    let reference = reference_normalizer();
    assert!((fat.normalizer() - reference).abs() < 1e-10 * reference, "{} vs {reference}", fat.normalizer());
    let head: f64 = (1..=20).map(|k| fat.pmf(k)).sum();
    assert!(head > 0.0 && head < 1.0);
}

#[test]
fn sampled_lengths_follow_the_pmf() {
    let fat = FatTailK::new();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    const DRAWS: usize = 1_000_000;
    let mut counts = [0u64; 21];
    let mut at_least_100 = 0u64;
    for _ in 0..DRAWS {
        let k = fat.sample(&mut rng);
        assert!(k >= 1);
        if k <= 20 {
            counts[k as usize] += 1;
        }
        if k >= 100 {
            at_least_100 += 1;
        }
    }
    for k in 1..=20u64 {
        let p = fat.pmf(k);
        let emp = counts[k as usize] as f64 / DRAWS as f64;
        let sigma = (p * (1.0 - p) / DRAWS as f64).sqrt();
        assert!((emp - p).abs() <= 0.01, "k = {k}: {emp} vs {p}");
        assert!((emp - p).abs() <= 5.0 * sigma, "k = {k}: {emp} vs {p}, sigma {sigma}");
    }
    let tail = 1.0 - (1..100).map(|k| fat.pmf(k)).sum::<f64>();
    assert!(tail > 0.0);
    let expected = tail * DRAWS as f64;
    let sigma = (DRAWS as f64 * tail * (1.0 - tail)).sqrt();
    assert!(at_least_100 > 0);
    assert!((at_least_100 as f64 - expected).abs() <= 3.0 * sigma, "{at_least_100} vs {expected}");
}

#[test]
fn bounded_sampling_renormalizes() {
    let fat = FatTailK::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let max = 4;
    let mass: f64 = (1..=max).map(|k| fat.pmf(k)).sum();
    let mut counts = [0u64; 5];
    const DRAWS: usize = 200_000;
    for _ in 0..DRAWS {
        counts[fat.sample_bounded(&mut rng, max) as usize] += 1;
    }
    for k in 1..=max {
        let p = fat.pmf(k) / mass;
        let emp = counts[k as usize] as f64 / DRAWS as f64;
        assert!((emp - p).abs() <= 5.0 * (p * (1.0 - p) / DRAWS as f64).sqrt());
    }
}

#[test]
fn four_leaf_shapes_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut counts = [0u64; 3];
    for _ in 0..10_000 {
        let t = Tree::random(4, &mut rng).unwrap();
        let q = embedded_quartets(&t);
        counts[q[0].index()] += 1;
    }
    assert!(counts.iter().all(|&c| c > 0));
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - 10_000.0 / 3.0).powi(2) / (10_000.0 / 3.0)).sum();
    // 99.9% quantile of chi-square with 2 degrees of freedom
    assert!(chi2 < 13.82, "{counts:?}");
}

/// Each half `uv` of each embedded topology `uv|wx` must be counted at
/// exactly one internal node: the one where `u` and `v` lie in different
/// subtrees and `w, x` together in the third.
#[test]
fn node_decomposition_partitions_the_embedded_halves() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 4..=8 {
        for _ in 0..20 {
            let t = Tree::random(n, &mut rng).unwrap();
            let side: Vec<Vec<usize>> = t
                .internal_nodes()
                .map(|p| {
                    let sets = subtree_leaf_sets(&t, p).unwrap();
                    let mut s = vec![0; n];
                    for (i, set) in sets.iter().enumerate() {
                        for &l in set {
                            s[l] = i;
                        }
                    }
                    s
                })
                .collect();
            let mut buckets = 0u64;
            for topo in embedded_quartets(&t) {
                let [[u, v], [w, x]] = topo.pairs();
                for (a, b, c, d) in [(u, v, w, x), (w, x, u, v)] {
                    let owners = side
                        .iter()
                        .filter(|s| s[a] != s[b] && s[c] == s[d] && s[c] != s[a] && s[c] != s[b])
                        .count();
                    assert_eq!(owners, 1, "half {a}{b} of {topo:?}");
                    buckets += 1;
                }
            }
            let from_counts: u64 = t
                .internal_nodes()
                .map(|p| {
                    let c = subtree_leaf_counts(&t, p).unwrap().map(|x| x as u64);
                    (0..3).map(|i| binomial(c[i], 2) * c[(i + 1) % 3] * c[(i + 2) % 3]).sum::<u64>()
                })
                .sum();
            assert_eq!(buckets, 2 * binomial(n as u64, 4));
            assert_eq!(from_counts, buckets);
        }
    }
}

#[test]
fn leaf_counts_partition_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 4..30 {
        let t = Tree::random(n, &mut rng).unwrap();
        for p in t.internal_nodes() {
            let c = subtree_leaf_counts(&t, p).unwrap();
            assert_eq!(c.iter().sum::<usize>(), n);
            assert!(c.iter().all(|&x| x >= 1));
        }
        assert!(subtree_leaf_counts(&t, 0).is_err());
    }
}

/// With i.i.d. uniform costs a random tree picks a uniform topology per
/// quartet: `E[C] = 1/2`, `E[min] = 1/4`, `E[max] = 3/4`, so `S` is close to
/// `(3/4 - 1/2) / (3/4 - 1/4) = 1/2`.
#[test]
fn random_trees_on_uniform_costs_score_about_a_half() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut total = 0.0;
    for _ in 0..200 {
        let cf = CostFunction::Explicit(ExplicitCosts::from_fn(10, |_| rng.gen::<f64>()).unwrap());
        let t = Tree::random(10, &mut rng).unwrap();
        total += score(&t, &cf).unwrap();
    }
    let mean = total / 200.0;
    assert!((0.45..=0.55).contains(&mean), "mean {mean}");
}

/// Against the 0/1 costs planted by an independent random tree, each
/// quartet agrees with probability exactly 1/3 by label symmetry.
#[test]
fn random_trees_on_planted_costs_score_about_a_third() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut total = 0.0;
    for _ in 0..200 {
        let planted = Tree::random(10, &mut rng).unwrap();
        let cf = quartet_core::cost::cost_from_mqc(10, &embedded_quartets(&planted)).unwrap();
        let t = Tree::random(10, &mut rng).unwrap();
        total += score(&t, &cf).unwrap();
    }
    let mean = total / 200.0;
    assert!((0.28..=0.38).contains(&mean), "mean {mean}");
}

/// A path of internal nodes with a cherry hanging from each and one extra
/// leaf at both ends: long leaf-to-leaf paths whose every inner node has a
/// third side of two leaves, the most work per pair.
fn cherry_comb(n: usize) -> Tree {
    assert!(n >= 6 && n.is_multiple_of(2));
    let k = (n - 2) / 2;
    let (spine, cherry) = (|i: usize| n + i, |i: usize| n + k + i);
    let mut edges = vec![(spine(0), n - 2), (spine(k - 1), n - 1)];
    for i in 0..k {
        edges.push((spine(i), cherry(i)));
        edges.push((cherry(i), 2 * i));
        edges.push((cherry(i), 2 * i + 1));
        if i + 1 < k {
            edges.push((spine(i), spine(i + 1)));
        }
    }
    Tree::from_edges(n, &edges).unwrap()
}

/// Fastest of `reps` scorings of [`cherry_comb`].
fn best_time(n: usize, reps: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    let t = cherry_comb(n);
    let d = DistanceMatrix::from_fn(n, |_, _| rng.gen::<f64>()).unwrap();
    let mut best = f64::INFINITY;
    for _ in 0..reps {
        let start = Instant::now();
        std::hint::black_box(tree_cost_fast(std::hint::black_box(&t), &d).unwrap());
        best = best.min(start.elapsed().as_secs_f64());
    }
    best
}

/// Below about n = 128 the quadratic exact summation still outweighs the
/// cubic pair-weight pass, so the doubling is measured from 128 to 256.
#[test]
fn fast_cost_scales_cubically() {
    best_time(128, 3);
    let small = best_time(128, 60);
    let large = best_time(256, 20);
    let exponent = (large / small).log2();
    assert!((2.6..=3.4).contains(&exponent), "exponent {exponent} ({small} s -> {large} s)");
}
