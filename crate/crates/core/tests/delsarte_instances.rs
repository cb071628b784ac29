mod common;

use common::*;
use delsarte_core::delsarte::{self, Closure, SetSpec, SolveMode};
use delsarte_core::gelfand;
use delsarte_core::rational::from_i64;
use delsarte_core::sample;
use delsarte_core::{FiniteGroup, GroupFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_pairs() -> Vec<(String, FiniteGroup, delsarte_core::Subgroup)> {
    all_pairs()
        .into_iter()
        .filter(|(_, g, k)| gelfand::spherical_functions(g, k, 0).unwrap().real_basis().functions.len() <= delsarte::BRUTE_FORCE_LIMIT)
        .collect()
}

fn random_instance(g: &FiniteGroup, k: &delsarte_core::Subgroup, rng: &mut ChaCha8Rng) -> delsarte::DelsarteInstance {
    let p = gelfand::double_cosets(g, k).unwrap();
    let u = sample::random_class_union(&p, 0.5, true, rng);
    let v = match rng.gen_range(0..4) {
        0 => SetSpec::Empty,
        1 => SetSpec::Explicit(u.clone()),
        2 => SetSpec::All,
        _ => SetSpec::Explicit(sample::random_class_union(&p, 0.5, rng.gen_bool(0.5), rng)),
    };
    delsarte::make_instance(g, k, &SetSpec::Explicit(u), &v, Closure::Strict).unwrap()
}

#[test]
fn solver_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for (name, g, k) in small_pairs() {
        for i in 0..20 {
            let inst = random_instance(&g, &k, &mut rng);
            let sol = delsarte::solve_delsarte(&inst, SolveMode::Auto, 3).unwrap();
            let oracle = delsarte::brute_force_delsarte(&inst, 3).unwrap();
            assert!((sol.value - oracle).abs() < 1e-10, "{name} #{i}: {} vs {oracle}", sol.value);
            assert!(sol.checks.all(), "{name} #{i}: {:?}", sol.checks);
            let floor = delsarte::feasible_autocorrelation(&inst, None).unwrap().value;
            assert!(floor <= sol.value + 1e-12 && sol.value <= 1.0 + 1e-12, "{name} #{i}");
        }
    }
}

#[test]
fn extremal_is_pd_by_independent_gram() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for (name, g, k) in all_pairs() {
        let inst = random_instance(&g, &k, &mut rng);
        let sol = delsarte::solve_delsarte(&inst, SolveMode::Float, 3).unwrap();
        let values = sol.extremal.expand().values;
        assert!(gram_min_eigenvalue(&g, &values) >= -1e-9 * g.order() as f64, "{name}");
        let direct = values.iter().sum::<f64>() / g.order() as f64;
        assert!((direct - sol.value).abs() < 1e-10, "{name}");
    }
}

#[test]
fn value_is_monotone_in_u() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for (name, g, k) in all_pairs() {
        let p = gelfand::double_cosets(&g, &k).unwrap();
        let small = sample::random_class_union(&p, 0.4, true, &mut rng);
        let extra = sample::random_class_union(&p, 0.4, true, &mut rng);
        let mut big = small.clone();
        big.extend(extra);
        big.sort_unstable();
        big.dedup();
        let v = SetSpec::Explicit(small.clone());
        let a = delsarte::make_instance(&g, &k, &SetSpec::Explicit(small), &v, Closure::Strict).unwrap();
        let b = delsarte::make_instance(&g, &k, &SetSpec::Explicit(big), &v, Closure::Strict).unwrap();
        let va = delsarte::solve_delsarte(&a, SolveMode::Auto, 1).unwrap().value;
        let vb = delsarte::solve_delsarte(&b, SolveMode::Auto, 1).unwrap().value;
        assert!(va <= vb + 1e-12, "{name}");
    }
}

#[test]
fn exact_anchors() {
    for n in [3usize, 4, 6] {
        let g = FiniteGroup::cyclic(n).unwrap();
        let k = g.trivial_subgroup();
        let inst = delsarte::make_instance(&g, &k, &SetSpec::Explicit(vec![0]), &SetSpec::Empty, Closure::Strict).unwrap();
        let sol = delsarte::solve_delsarte(&inst, SolveMode::Rational, 0).unwrap();
        assert_eq!(sol.exact_value, Some(from_i64(1, n as i64)));
        let inst = delsarte::make_instance(&g, &k, &SetSpec::All, &SetSpec::Empty, Closure::Strict).unwrap();
        let sol = delsarte::solve_delsarte(&inst, SolveMode::Rational, 0).unwrap();
        assert_eq!(sol.exact_value, Some(from_i64(1, 1)));
    }
    let g = FiniteGroup::cyclic(4).unwrap();
    let inst = delsarte::turan_instance(&g, &g.trivial_subgroup(), &SetSpec::Explicit(vec![0, 1, 3]), Closure::Strict).unwrap();
    let sol = delsarte::solve_delsarte(&inst, SolveMode::Rational, 0).unwrap();
    assert_eq!(sol.exact_value, Some(from_i64(1, 2)));
    assert_eq!(
        sol.extremal_exact.unwrap(),
        vec![from_i64(1, 1), from_i64(1, 2), from_i64(0, 1), from_i64(1, 2)]
    );
    let (g, k) = point_stabilizer(4);
    let inst = delsarte::make_instance(&g, &k, &SetSpec::Explicit(k.elements().to_vec()), &SetSpec::Empty, Closure::Strict).unwrap();
    let sol = delsarte::solve_delsarte(&inst, SolveMode::Rational, 0).unwrap();
    assert_eq!(sol.exact_value, Some(from_i64(1, 4)));
}

#[test]
fn zero_extension_from_subgroup() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let g = FiniteGroup::cyclic(8).unwrap();
    let k = g.trivial_subgroup();
    let h = g.subgroup_from_generators(&[2]).unwrap();
    for _ in 0..100 {
        // Random pd function on H = <2>, extended by zero.
        let hg = g.restrict_to(&h).unwrap();
        let t = gelfand::spherical_functions(&hg, &hg.trivial_subgroup(), 0).unwrap();
        let f = sample::random_pd(&t.real_basis(), &t.partition, &mut rng).expand();
        let mut ext = vec![0.0; 8];
        for (i, &x) in h.elements().iter().enumerate() {
            ext[x] = f.values[i];
        }
        assert!(gram_min_eigenvalue(&g, &ext) >= -1e-12);
        let _ = GroupFunction::new(ext);
    }
    let inst = delsarte::make_instance(&g, &k, &SetSpec::Explicit(vec![0, 2, 6]), &SetSpec::All, Closure::Strict).unwrap();
    let r = delsarte::restrict_extend_roundtrip(&inst, &h, SolveMode::Auto, 0).unwrap();
    assert!(r.extension_feasible && r.inequality_holds && r.equality_holds);
    let inst = delsarte::turan_instance(&g, &k, &SetSpec::Explicit(vec![0, 2, 6]), Closure::Strict).unwrap();
    let r = delsarte::restrict_extend_roundtrip(&inst, &h, SolveMode::Auto, 0).unwrap();
    assert!(r.extension_feasible && r.inequality_holds && r.equality_holds);
    assert!(!r.v_covers_complement);
}

#[test]
fn non_gelfand_pairs_offer_verification_only() {
    let g = FiniteGroup::symmetric(3).unwrap();
    let k = g.trivial_subgroup();
    let inst = delsarte::make_instance(&g, &k, &SetSpec::Explicit(vec![0, 1]), &SetSpec::Empty, Closure::Close).unwrap();
    assert!(!inst.gelfand);
    assert!(delsarte::solve_delsarte(&inst, SolveMode::Auto, 0).is_err());
    let witness = delsarte::feasible_autocorrelation(&inst, None).unwrap();
    assert!(delsarte::check_feasibility(&inst, &witness.f).unwrap().feasible());
}
