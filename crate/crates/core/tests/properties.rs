mod common;

use std::collections::BTreeSet;

use common::{random_dataset, random_params};
use num_complex::Complex64;
use proptest::prelude::*;
use qlue_core::grover::grover_iterations;
use qlue_core::metrics::scores;
use qlue_core::qcircuit::{
    apply_add, apply_mul, apply_negate, uncompute_add, uncompute_mul, QuantumState, Register,
    StateVector,
};
use qlue_core::{run_clue, run_qlue, GroverModel, Params, Role, TileGrid, NOISE};

fn dim() -> impl Strategy<Value = usize> {
    prop_oneof![Just(2usize), Just(3usize)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn quantum_labels_equal_classical(seed in any::<u64>(), n in 1usize..=2000, d in dim(), rng in any::<u64>()) {
        let mut c = random_dataset(seed, n, d);
        let params = random_params(seed);
        let mut q = c.clone();
        let classical = run_clue(&mut c, &params).unwrap();
        let quantum = run_qlue(&mut q, &params, rng).unwrap();
        prop_assert_eq!(&quantum.result, &classical);
        prop_assert_eq!(q.points(), c.points());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn labels_form_seed_rooted_trees(seed in any::<u64>(), n in 1usize..400, d in dim()) {
        let mut ds = random_dataset(seed, n, d);
        let r = run_clue(&mut ds, &random_params(seed)).unwrap();
        let pts = ds.points();
        prop_assert_eq!(r.labels.len(), n);
        for (c, &s) in r.seeds.iter().enumerate() {
            prop_assert_eq!(pts[s].role, Role::Seed);
            prop_assert_eq!(r.labels[s], c as i64);
        }
        for &o in &r.outliers {
            prop_assert_eq!(r.labels[o], NOISE);
        }
        for (j, p) in pts.iter().enumerate() {
            let l = r.labels[j];
            prop_assert!(l >= NOISE && l < r.n_clusters as i64);
            if p.role == Role::Follower {
                // a labeled follower shares its parent's label; an unlabeled
                // one hangs below an outlier or a root that is not a seed
                match p.nearest_higher {
                    Some(h) if l != NOISE => prop_assert_eq!(r.labels[h], l),
                    Some(h) => prop_assert_eq!(r.labels[h], NOISE),
                    None => prop_assert_eq!(l, NOISE),
                }
            }
        }
        let sizes: usize = r.cluster_sizes().iter().sum();
        prop_assert_eq!(sizes, r.labels.iter().filter(|&&l| l != NOISE).count());
    }

    #[test]
    fn nearest_higher_links_are_acyclic(seed in any::<u64>(), n in 1usize..400) {
        let mut ds = random_dataset(seed, n, 2);
        run_clue(&mut ds, &random_params(seed)).unwrap();
        let pts = ds.points();
        for p in pts {
            if let Some(h) = p.nearest_higher {
                prop_assert!(pts[h].density > p.density);
            }
        }
    }

    #[test]
    fn density_grows_with_radius(seed in any::<u64>(), n in 1usize..300, extra in 0.0f64..10.0) {
        let base = random_params(seed);
        let wider = Params { d_c: base.d_c + extra, tile_edge: None, ..base };
        let mut a = random_dataset(seed, n, 2);
        let mut b = a.clone();
        run_clue(&mut a, &base).unwrap();
        run_clue(&mut b, &wider).unwrap();
        for (p, q) in a.points().iter().zip(b.points()) {
            prop_assert!(q.density >= p.density);
        }
    }

    #[test]
    fn raising_rho_c_never_adds_seeds(seed in any::<u64>(), n in 1usize..300, extra in 0.0f64..20.0) {
        let base = random_params(seed);
        let strict = Params { rho_c: base.rho_c + extra, ..base };
        let mut a = random_dataset(seed, n, 2);
        let mut b = a.clone();
        let ra = run_clue(&mut a, &base).unwrap();
        let rb = run_clue(&mut b, &strict).unwrap();
        let sa: BTreeSet<usize> = ra.seeds.iter().copied().collect();
        prop_assert!(rb.seeds.iter().all(|s| sa.contains(s)));
        let ob: BTreeSet<usize> = rb.outliers.iter().copied().collect();
        prop_assert!(ra.outliers.iter().all(|o| ob.contains(o)));
    }

    #[test]
    fn search_space_covers_the_ball(seed in any::<u64>(), n in 1usize..300, d in dim(), radius in 0.5f64..40.0, probe in 0usize..300) {
        let ds = random_dataset(seed, n, d);
        let params = random_params(seed);
        let grid = TileGrid::build(&ds, params.tile_edge()).unwrap();
        let j = probe % n;
        let space = grid.search_space(&ds.coords(j), radius).unwrap();
        let inside: BTreeSet<usize> = space.points().iter().copied().collect();
        let lim = qlue_core::SqDist::of_length(ds.quantizer().to_fixed(radius).unwrap());
        for i in 0..n {
            if ds.sq_dist(i, j) <= lim {
                prop_assert!(inside.contains(&i), "point {} within {} of {} missing", i, radius, j);
            }
        }
    }

    #[test]
    fn dynamic_search_space_grows_with_members(seed in any::<u64>(), n in 2usize..300, cut in 1usize..300, half in 1.0f64..40.0) {
        let ds = random_dataset(seed, n, 2);
        let grid = TileGrid::build(&ds, random_params(seed).tile_edge()).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let k = 1 + cut % (n - 1);
        let small = grid.dynamic_search_space(&ds, &all[..k], half).unwrap();
        let large = grid.dynamic_search_space(&ds, &all, half).unwrap();
        prop_assert!(large.covers(&small));
        let wide = grid.dynamic_search_space(&ds, &all[..k], half * 2.0).unwrap();
        prop_assert!(wide.covers(&small));
    }

    #[test]
    fn find_all_returns_marked_set_at_predicted_cost(seed in any::<u64>(), marks in prop::collection::vec(any::<bool>(), 1..200)) {
        let domain: Vec<usize> = (0..marks.len()).collect();
        let mut model = GroverModel::new(seed);
        let found = model.find_all(&domain, |i| marks[i]).unwrap();
        let expected: BTreeSet<usize> = domain.iter().copied().filter(|&i| marks[i]).collect();
        let got: BTreeSet<usize> = found.iter().copied().collect();
        prop_assert_eq!(got.len(), found.len());
        prop_assert_eq!(&got, &expected);

        let (m, k) = (marks.len(), expected.len());
        let mut cost: u64 = (0..k).map(|t| grover_iterations(m - t, k - t)).sum();
        let mut runs = k as u64;
        if k < m {
            cost += grover_iterations(m - k, 0);
            runs += 1;
        }
        let t = model.ledger().totals();
        prop_assert_eq!(t.oracle_calls, cost);
        prop_assert_eq!(t.diffusion_calls, cost);
        prop_assert_eq!(t.invocations, runs);
        // every run is at most one full-domain search
        prop_assert!(cost <= runs * grover_iterations(m, 1));
    }

    #[test]
    fn scores_are_bounded_and_symmetric(
        pred in prop::collection::vec(-1i64..5, 1..60),
        seed in any::<u64>(),
        scale in 0.01f64..100.0,
    ) {
        let n = pred.len();
        let truth: Vec<i64> = (0..n).map(|i| ((seed >> (i % 60)) & 3) as i64 - 1).collect();
        let e: Vec<f64> = (0..n).map(|i| 0.5 + ((seed.rotate_left(i as u32) & 7) as f64)).collect();
        let s = scores(&pred, &truth, &e).unwrap();
        prop_assert!((0.0..=1.0).contains(&s.homogeneity));
        prop_assert!((0.0..=1.0).contains(&s.completeness));

        let swapped = scores(&truth, &pred, &e).unwrap();
        prop_assert!((s.homogeneity - swapped.completeness).abs() < 1e-12);
        prop_assert!((s.completeness - swapped.homogeneity).abs() < 1e-12);

        let scaled: Vec<f64> = e.iter().map(|x| x * scale).collect();
        let t = scores(&pred, &truth, &scaled).unwrap();
        prop_assert!((s.homogeneity - t.homogeneity).abs() < 1e-9);
        prop_assert!((s.completeness - t.completeness).abs() < 1e-9);

        let renamed: Vec<i64> = pred.iter().map(|&l| 10 - 3 * l).collect();
        let u = scores(&renamed, &truth, &e).unwrap();
        prop_assert!((s.homogeneity - u.homogeneity).abs() < 1e-12);
        prop_assert!((s.completeness - u.completeness).abs() < 1e-12);
    }
}

/// Uniform superposition over every source value with `dst = 0`.
fn all_inputs(srcs: &[Register], n: usize) -> StateVector {
    let mut basis = vec![0u64];
    for r in srcs {
        basis = basis
            .iter()
            .flat_map(|&b| (0..1u64 << r.width).map(move |v| b | v << r.offset))
            .collect();
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    let w = 1.0 / (basis.len() as f64).sqrt();
    for b in basis {
        amps[b as usize] = Complex64::new(w, 0.0);
    }
    StateVector::from_amplitudes(amps).unwrap()
}

fn wrap(v: i64, r: Register) -> i64 {
    r.value(r.with_value(0, v))
}

#[test]
fn exhaustive_small_arithmetic() {
    type Op = fn(&mut dyn QuantumState, &[Register], Register) -> qlue_core::Result<()>;
    type Case = (Op, Op, fn(i64, i64) -> i64);
    let cases: [Case; 2] = [
        (apply_add, uncompute_add, |x, y| x + y),
        (apply_mul, uncompute_mul, |x, y| x * y),
    ];
    for w in 1..=5 {
        for signed in [false, true] {
            let reg = |k: usize| Register {
                offset: k * w,
                width: w,
                signed,
            };
            let (a, b, d) = (reg(0), reg(1), reg(2));
            for (apply, undo, f) in cases {
                let start = all_inputs(&[a, b], 3 * w);
                let mut s = start.clone();
                apply(&mut s, &[a, b], d).unwrap();
                for (basis, amp) in s.support() {
                    assert_eq!(amp, start.amplitude(d.with_value(basis, 0)));
                    assert_eq!(d.value(basis), wrap(f(a.value(basis), b.value(basis)), d));
                }
                undo(&mut s, &[a, b], d).unwrap();
                assert_eq!(s, start, "w={w} signed={signed}");
            }
            let start = all_inputs(&[a], 3 * w);
            let mut s = start.clone();
            apply_negate(&mut s, a).unwrap();
            for (basis, _) in s.support() {
                let before = a.with_value(basis, -a.value(basis));
                assert!(start.amplitude(before).norm() > 0.0);
            }
            apply_negate(&mut s, a).unwrap();
            assert_eq!(s, start);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ledger_is_consistent_and_reproducible(seed in any::<u64>(), n in 1usize..400, rng in any::<u64>()) {
        let params = random_params(seed);
        let mut a = random_dataset(seed, n, 2);
        let mut b = a.clone();
        let ra = run_qlue(&mut a, &params, rng).unwrap();
        let rb = run_qlue(&mut b, &params, rng).unwrap();
        prop_assert_eq!(&ra.ledger, &rb.ledger);

        let mut sum = qlue_core::PhaseCounts::default();
        for (name, c) in ra.ledger.phases() {
            prop_assert!(["local_density", "nearest_higher", "classify", "assign"].contains(&name));
            prop_assert_eq!(c.oracle_calls, c.diffusion_calls);
            // a Grover run never costs more than scanning its domain
            prop_assert!(c.oracle_calls <= c.classical_equivalent_calls);
            sum.oracle_calls += c.oracle_calls;
            sum.classical_equivalent_calls += c.classical_equivalent_calls;
            sum.invocations += c.invocations;
        }
        let t = ra.ledger.totals();
        prop_assert_eq!(t.oracle_calls, sum.oracle_calls);
        prop_assert_eq!(t.classical_equivalent_calls, sum.classical_equivalent_calls);
        prop_assert_eq!(t.invocations, sum.invocations);
        // one density search per point at least
        prop_assert!(ra.ledger.phase("local_density").invocations >= n as u64);
    }
}
