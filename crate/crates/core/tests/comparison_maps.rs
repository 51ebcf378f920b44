use std::sync::Arc;

use ainf_core::bimodule::Bimodule;
use ainf_core::corpus;
use ainf_core::hochschild::{build_2cc_chains, build_2cc_cochains, build_cc_chains, build_cc_cochains, map_gamma, map_s_between, map_t_between, stable_quasi_iso, window_degrees};

#[test]
fn s_and_t_are_quasi_isos_on_the_stable_window() {
    for name in ["k_field", "dual_numbers", "a2_quiver", "exterior_graded"] {
        let a = corpus::build(name).unwrap().category;
        let m = Bimodule::diagonal(a.clone());
        let one = build_cc_cochains(&a, &m, 4).unwrap();
        let two = build_2cc_cochains(&a, &m, 4).unwrap();
        let s = map_s_between(&one, &two, &m).unwrap();
        assert!(s.commutes(), "{name}: S is not a chain map");
        assert!(!window_degrees(&s, one.stable(), two.stable()).is_empty(), "{name}: empty window for S");
        let r = stable_quasi_iso(&s, one.stable(), two.stable()).unwrap();
        assert!(r.by_cone && r.by_ranks, "{name}: S {r:?}");

        let two = build_2cc_chains(&a, &m, 4).unwrap();
        let one = build_cc_chains(&a, &m, 4).unwrap();
        let t = map_t_between(&two, &one, &m).unwrap();
        assert!(t.commutes(), "{name}: T is not a chain map");
        assert!(!window_degrees(&t, two.stable(), one.stable()).is_empty(), "{name}: empty window for T");
        let r = stable_quasi_iso(&t, two.stable(), one.stable()).unwrap();
        assert!(r.by_cone && r.by_ranks, "{name}: T {r:?}");
    }
}

#[test]
fn gamma_is_a_bijective_chain_map() {
    for e in corpus::all().into_iter().filter(|e| e.expect_valid) {
        let a: &Arc<_> = &e.category;
        let d = Bimodule::diagonal(a.clone());
        for m in [d.clone(), d.dual()] {
            for l in 2..=4 {
                let g = map_gamma(a, &m, l).unwrap();
                assert!(g.matrix.is_invertible(), "{} L={l}", e.name);
                assert!(g.commutes(), "{} L={l}", e.name);
            }
        }
    }
}
