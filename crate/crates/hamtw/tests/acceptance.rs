//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS line with the measured quantities. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hamtw::cutcount::{cc_decide, cc_join_naive, CCTable, JoinKind};
use hamtw::decomp::{min_fill_td, validate_td, TdCheck};
use hamtw::dp::{
    all_pairings, count_pairings, solve_naive, Mode, SolveOutcome, SolveStats,
};
use hamtw::extract::{extract_self_reduce, verify_cycle};
use hamtw::generator::{generate, GenParams};
use hamtw::gf2p::{clmul64_portable, hardware_clmul_available, FieldElem, FieldSpec};
use hamtw::graph::Graph;
use hamtw::nice::{make_nice, NiceDecomposition};
use hamtw::oracle::brute_force_decide;
use hamtw::rank::{
    basis_for, f2_rank, is_single_cycle, reduce_bucket, solve_rank,
    BasisFamily, RankVariant, ReducePolicy,
};
use hamtw::z4conv::{cc_join_fast, fast_z4_convolution, naive_z4_convolution, Z4Table};

/// One suite instance: graph plus its min-fill nice decomposition.
struct SuiteInstance {
    graph: Graph,
    nd: NiceDecomposition,
    hamiltonian: bool,
}

/// 500 random connected graphs with n ≤ 12, deterministic across runs.
fn oracle_suite() -> &'static Vec<SuiteInstance> {
    static SUITE: OnceLock<Vec<SuiteInstance>> = OnceLock::new();
    SUITE.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0001);
        let mut out = Vec::with_capacity(500);
        while out.len() < 500 {
            let n = rng.random_range(3..=12u32);
            let p = rng.random_range(0.15..0.45);
            let mut edges = Vec::new();
            for u in 1..=n {
                for v in u + 1..=n {
                    if rng.random_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::new(n, edges).unwrap();
            if !g.is_connected() {
                continue;
            }
            let td = min_fill_td(&g, 0);
            let nd = make_nice(&g, &td).unwrap();
            let hamiltonian = brute_force_decide(&g).unwrap();
            out.push(SuiteInstance {
                graph: g,
                nd,
                hamiltonian,
            });
        }
        out
    })
}

#[test]
fn oracle_equivalence() {
    let start = Instant::now();
    let suite = oracle_suite();
    let yes_count = suite.iter().filter(|i| i.hamiltonian).count();
    assert!(yes_count > 50 && yes_count < 450, "suite must mix answers");
    for (idx, inst) in suite.iter().enumerate() {
        let ctx = || format!("instance {idx}: {:?}", inst.graph.edges());
        let naive = solve_naive(
            &inst.graph,
            &inst.nd,
            Mode::Decision,
            None,
            &mut SolveStats::default(),
        )
        .unwrap()
        .is_yes();
        assert_eq!(naive, inst.hamiltonian, "naive vs oracle on {}", ctx());
        for variant in [RankVariant::Cut4t, RankVariant::Improved] {
            let got = solve_rank(
                &inst.graph,
                &inst.nd,
                variant,
                &ReducePolicy::default_for(variant),
                Mode::Decision,
                None,
                &mut SolveStats::default(),
            )
            .unwrap()
            .is_yes();
            assert_eq!(got, inst.hamiltonian, "{variant:?} vs oracle on {}", ctx());
        }
        for seed in 1..=3u64 {
            let report = cc_decide(
                &inst.graph,
                &inst.nd,
                FieldSpec::gf64(),
                seed,
                JoinKind::Naive,
                None,
                &mut SolveStats::default(),
            )
            .unwrap();
            // One-sided error: "yes" must never appear on a non-Hamiltonian
            // instance; false negatives are bounded by 12/2^64 per trial,
            // so agreement is demanded outright.
            assert_eq!(
                report.answer,
                inst.hamiltonian,
                "cutcount seed {seed} vs oracle on {}",
                ctx()
            );
        }
    }
    println!(
        "acceptance: oracle_equivalence PASS ({} instances, {} Hamiltonian, {:?})",
        suite.len(),
        yes_count,
        start.elapsed()
    );
}

#[test]
fn pairing_counts() {
    for (l, expected) in [(4usize, 3u128), (6, 15), (8, 105)] {
        assert_eq!(count_pairings(l).unwrap(), expected);
        assert_eq!(all_pairings(l).len() as u128, expected);
    }
    println!("acceptance: pairing_counts PASS ((l-1)!! = 3, 15, 105 for l = 4, 6, 8)");
}

#[test]
fn rank_law() {
    let start = Instant::now();
    for (l, expected_rank) in [(2usize, 1usize), (4, 2), (6, 4), (8, 8)] {
        let all = all_pairings(l);
        let words = all.len().div_ceil(64);
        let rows: Vec<Vec<u64>> = all
            .iter()
            .map(|e| {
                let mut row = vec![0u64; words];
                for (j, m) in all.iter().enumerate() {
                    if is_single_cycle(e, m) {
                        row[j / 64] |= 1 << (j % 64);
                    }
                }
                row
            })
            .collect();
        assert_eq!(f2_rank(&rows, all.len()), expected_rank, "l = {l}");
        // Basis family invariant: 2^(l/2-1) matchings whose rows are
        // independent in the full matrix.
        let basis = basis_for(l).unwrap();
        assert_eq!(basis.matchings.len(), expected_rank);
        assert_eq!(basis.matchings.len(), BasisFamily::expected_size(l));
        let basis_rows: Vec<Vec<u64>> = basis
            .matchings
            .iter()
            .map(|e| {
                let mut row = vec![0u64; words];
                for (j, m) in all.iter().enumerate() {
                    if is_single_cycle(e, m) {
                        row[j / 64] |= 1 << (j % 64);
                    }
                }
                row
            })
            .collect();
        assert_eq!(f2_rank(&basis_rows, all.len()), expected_rank);
    }
    println!(
        "acceptance: rank_law PASS (ranks 1, 2, 4, 8 for l = 2, 4, 6, 8; {:?})",
        start.elapsed()
    );
}

fn force_policy() -> ReducePolicy {
    ReducePolicy {
        small_tw_thresholds: [(4, 1), (6, 1), (8, 1)].into_iter().collect(),
        alpha: 0.001,
        width_switch: 9,
    }
}

fn states_for(pairings: &[hamtw::dp::Pairing]) -> Vec<hamtw::dp::State> {
    pairings
        .iter()
        .map(|p| {
            let mut bucket = hamtw::dp::Bucket::empty();
            for s in 0..p.size() {
                bucket = bucket.set(s, 1);
            }
            hamtw::dp::State {
                bucket,
                pairing: p.clone(),
            }
        })
        .collect()
}

#[test]
fn representativeness() {
    let start = Instant::now();
    let policy = force_policy();
    let mut checked = 0u32;
    // Exhaustive for l in {2, 4}: every subfamily, every outside matching.
    for l in [2usize, 4] {
        let all = all_pairings(l);
        for mask in 1u32..(1 << all.len()) {
            let family: Vec<_> = all
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect();
            let states = states_for(&family);
            for variant in [RankVariant::Cut4t, RankVariant::Improved] {
                let kept = reduce_bucket(&states, l, variant, &policy).unwrap();
                assert!(kept.len() <= variant.bound(l));
                for m in &all {
                    let any = family.iter().any(|e| is_single_cycle(e, m));
                    let kept_any = kept.iter().any(|&i| is_single_cycle(&family[i], m));
                    assert!(!any || kept_any, "l={l} {variant:?}");
                    checked += 1;
                }
            }
        }
    }
    // Randomized for l in {6, 8}: 1000 (family, outside matching) pairs.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0004);
    for l in [6usize, 8] {
        let all = all_pairings(l);
        for _ in 0..1000 {
            let family: Vec<_> = all
                .iter()
                .filter(|_| rng.random_bool(0.4))
                .cloned()
                .collect();
            if family.is_empty() {
                continue;
            }
            let outside = &all[rng.random_range(0..all.len())];
            let states = states_for(&family);
            for variant in [RankVariant::Cut4t, RankVariant::Improved] {
                let kept = reduce_bucket(&states, l, variant, &policy).unwrap();
                assert!(kept.len() <= variant.bound(l), "l={l} {variant:?}");
                let any = family.iter().any(|e| is_single_cycle(e, outside));
                let kept_any = kept.iter().any(|&i| is_single_cycle(&family[i], outside));
                assert!(!any || kept_any, "l={l} {variant:?}");
                checked += 1;
            }
        }
    }
    println!(
        "acceptance: representativeness PASS ({checked} fitting checks, {:?})",
        start.elapsed()
    );
}

#[test]
fn convolution_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0005);
    let mut pairs = 0u32;
    let mut max_bits = 0u64;
    while pairs < 200 {
        for spec in [FieldSpec::gf8(), FieldSpec::gf64()] {
            for m in 1..=3usize {
                let rand_table = |rng: &mut ChaCha8Rng| {
                    let mut t = Z4Table::new(m, FieldElem::ZERO);
                    for i in 0..t.values().len() {
                        if rng.random_bool(0.7) {
                            t.set(i, spec.random_elem(rng));
                        }
                    }
                    t
                };
                let f = rand_table(&mut rng);
                let g = rand_table(&mut rng);
                let naive = naive_z4_convolution(&f, &g, &spec).unwrap();
                let (fast, report) = fast_z4_convolution::<i128>(&f, &g, spec).unwrap();
                assert_eq!(fast.values(), naive.values(), "m={m} p={}", spec.degree());
                max_bits = max_bits.max(report.max_coeff_bits);
                pairs += 1;
            }
        }
    }
    println!(
        "acceptance: convolution_equivalence PASS ({pairs} pairs, max coefficient {max_bits} bits, {:?})",
        start.elapsed()
    );
}

#[test]
fn join_equivalence() {
    let start = Instant::now();
    let spec = FieldSpec::gf64();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0006);
    // 200 random table pairs over bags of width <= 4.
    for round in 0..200 {
        let m = rng.random_range(1..=4usize);
        let bag: Vec<u32> = (1..=m as u32).collect();
        let rand_table = |rng: &mut ChaCha8Rng| {
            let mut acc = std::collections::HashMap::new();
            let entries = rng.random_range(1..=(1 << (2 * m)));
            for _ in 0..entries {
                let key = rng.random_range(0..(1u64 << (2 * m)));
                let val = spec.random_elem(rng);
                if !val.is_zero() {
                    acc.insert(key, val);
                }
            }
            CCTable {
                bag: bag.clone(),
                anchor: None,
                acc,
            }
        };
        let a = rand_table(&mut rng);
        let b = rand_table(&mut rng);
        let naive = cc_join_naive(spec, &a, &b);
        let fast = cc_join_fast(spec, &a, &b);
        assert_eq!(naive.acc, fast.acc, "round {round}, m={m}");
    }
    // End to end: identical answers and root accumulators under both join
    // kinds across the whole oracle suite.
    let suite = oracle_suite();
    for (idx, inst) in suite.iter().enumerate() {
        let run = |kind| {
            cc_decide(
                &inst.graph,
                &inst.nd,
                spec,
                42,
                kind,
                None,
                &mut SolveStats::default(),
            )
            .unwrap()
        };
        let naive = run(JoinKind::Naive);
        let fast = run(JoinKind::Fast);
        assert_eq!(naive.answer, fast.answer, "instance {idx}");
        assert_eq!(
            naive.root_accumulator, fast.root_accumulator,
            "instance {idx}"
        );
    }
    println!(
        "acceptance: join_equivalence PASS (200 table pairs + {} end-to-end instances, {:?})",
        suite.len(),
        start.elapsed()
    );
}

#[test]
fn field_correctness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0007);
    for spec in [FieldSpec::gf8(), FieldSpec::gf64()] {
        for _ in 0..10_000 {
            let a = spec.random_elem(&mut rng);
            let b = spec.random_elem(&mut rng);
            let c = spec.random_elem(&mut rng);
            assert_eq!(spec.mul(a, b), spec.mul(b, a));
            assert_eq!(spec.mul(spec.mul(a, b), c), spec.mul(a, spec.mul(b, c)));
            assert_eq!(
                spec.mul(a, spec.add(b, c)),
                spec.add(spec.mul(a, b), spec.mul(a, c))
            );
            assert_eq!(spec.pow(a, spec.order()), a);
            if !a.is_zero() {
                assert_eq!(spec.mul(a, spec.inv(a).unwrap()), FieldElem::ONE);
            }
        }
    }
    // Hardware and portable carry-less multiply agree bit for bit.
    let hw = hardware_clmul_available();
    for _ in 0..10_000 {
        let a: u64 = rng.random();
        let b: u64 = rng.random();
        assert_eq!(hamtw::gf2p::clmul64(a, b), clmul64_portable(a, b));
    }
    println!(
        "acceptance: field_correctness PASS (GF(2^8) and GF(2^64); hardware clmul {}; {:?})",
        if hw { "verified" } else { "not available, portable only" },
        start.elapsed()
    );
}

#[test]
fn extraction_bound() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0008);
    let mut total_calls = 0u64;
    for trial in 0..100 {
        let a = if rng.random_bool(0.5) { 6 } else { 10 };
        let max_b = 200 / a;
        let b = rng.random_range(2..=max_b);
        let params = GenParams {
            a,
            b,
            p: rng.random_range(0.1..0.5),
            seed: rng.random(),
        };
        let inst = generate(&params).unwrap();
        let g = &inst.graph;
        let nd = make_nice(g, &inst.td).unwrap();
        let extraction = extract_self_reduce(g, |restricted: &Graph| {
            Ok(
                solve_naive(restricted, &nd, Mode::Decision, None, &mut SolveStats::default())?
                    .is_yes(),
            )
        })
        .unwrap();
        assert!(verify_cycle(g, &extraction.cycle), "trial {trial}");
        let n = g.vertex_count();
        let delta = g.max_degree() as f64;
        let bound = 4 * n * (1 + delta.log2().ceil() as u32);
        assert!(
            extraction.decision_calls <= bound,
            "trial {trial}: {} calls > bound {bound} (n={n}, max degree {delta})",
            extraction.decision_calls
        );
        total_calls += extraction.decision_calls as u64;
    }
    println!(
        "acceptance: extraction_bound PASS (100 extractions, {total_calls} total decision calls, {:?})",
        start.elapsed()
    );
}

#[test]
fn generator_soundness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0009);
    for trial in 0..100 {
        let a = [2u32, 6, 10, 14][rng.random_range(0..4)];
        let b = rng.random_range(2..=8);
        let params = GenParams {
            a,
            b,
            p: rng.random_range(0.05..0.95),
            seed: rng.random(),
        };
        let inst = generate(&params).unwrap();
        assert!(
            verify_cycle(&inst.graph, &inst.planted_cycle),
            "trial {trial}"
        );
        match validate_td(&inst.graph, &inst.td) {
            TdCheck::Valid { width } => assert!(width <= a, "trial {trial}: width {width} > {a}"),
            TdCheck::Violation(msg) => panic!("trial {trial}: {msg}"),
        }
    }
    println!(
        "acceptance: generator_soundness PASS (100 instances, {:?})",
        start.elapsed()
    );
}

#[test]
fn policy_neutrality() {
    let start = Instant::now();
    let suite = oracle_suite();
    let policies: Vec<ReducePolicy> = [1usize, 16]
        .into_iter()
        .flat_map(|tau| {
            [0.5f64, 8.0].into_iter().map(move |alpha| ReducePolicy {
                small_tw_thresholds: [(4, tau), (6, tau), (8, tau)].into_iter().collect(),
                alpha,
                width_switch: if alpha == 0.5 { 0 } else { 9 },
            })
        })
        .collect();
    for (idx, inst) in suite.iter().enumerate() {
        for variant in [RankVariant::Cut4t, RankVariant::Improved] {
            for policy in &policies {
                let got = solve_rank(
                    &inst.graph,
                    &inst.nd,
                    variant,
                    policy,
                    Mode::Decision,
                    None,
                    &mut SolveStats::default(),
                )
                .unwrap()
                .is_yes();
                assert_eq!(
                    got, inst.hamiltonian,
                    "instance {idx} {variant:?} under {policy:?}"
                );
            }
        }
    }
    println!(
        "acceptance: policy_neutrality PASS ({} instances x 2 variants x {} policies, {:?})",
        suite.len(),
        policies.len(),
        start.elapsed()
    );
}

#[test]
fn qualitative_scaling() {
    let start = Instant::now();
    // Fixed width (a = 6), doubling sizes; the planted decomposition keeps
    // every bag at 7 vertices, so per-node work is bounded and the total
    // should grow about linearly with n.
    let sizes = [84u32, 168, 336]; // b values: n = 504, 1008, 2016
    let mut rows = Vec::new();
    for &b in &sizes {
        let params = GenParams {
            a: 6,
            b,
            p: 0.7,
            seed: 1234,
        };
        let inst = generate(&params).unwrap();
        let nd = make_nice(&inst.graph, &inst.td).unwrap();
        let time_of = |f: &dyn Fn() -> SolveOutcome| {
            // Best of three to damp scheduler noise.
            let mut best = f64::MAX;
            for _ in 0..3 {
                let t = Instant::now();
                let out = f();
                assert!(out.is_yes());
                best = best.min(t.elapsed().as_secs_f64());
            }
            best
        };
        let naive_time = time_of(&|| {
            solve_naive(
                &inst.graph,
                &nd,
                Mode::Witness,
                None,
                &mut SolveStats::default(),
            )
            .unwrap()
        });
        let improved_time = time_of(&|| {
            solve_rank(
                &inst.graph,
                &nd,
                RankVariant::Improved,
                &ReducePolicy::default_for(RankVariant::Improved),
                Mode::Witness,
                None,
                &mut SolveStats::default(),
            )
            .unwrap()
        });
        rows.push((inst.graph.vertex_count(), naive_time, improved_time));
    }
    for pair in rows.windows(2) {
        let (n0, naive0, improved0) = pair[0];
        let (n1, naive1, improved1) = pair[1];
        let naive_ratio = naive1 / naive0;
        let improved_ratio = improved1 / improved0;
        println!(
            "  scaling: n {n0} -> {n1}: naive x{naive_ratio:.2}, improved x{improved_ratio:.2}"
        );
        for (label, ratio) in [("naive", naive_ratio), ("improved", improved_ratio)] {
            assert!(
                (1.3..=3.2).contains(&ratio),
                "{label} ratio {ratio:.2} outside [1.3, 3.2] for n {n0} -> {n1}"
            );
        }
    }
    println!(
        "acceptance: qualitative_scaling PASS (n = 504, 1008, 2016; {:?})",
        start.elapsed()
    );
}
