use std::sync::Arc;

use ainf_core::bimodule::Bimodule;
use ainf_core::calabi_yau::{
    canonical_i, check_compatibility, check_lemma_nondeg_equivalence, check_nondegenerate, check_psi_irel_square, check_relative_pairing, form_to_bimodule, relative_three_formulations,
    three_formulations, RelativeData,
};
use ainf_core::corpus;
use ainf_core::functor::Functor;

#[test]
fn lemma_verdicts_agree_and_match_expectations() {
    for name in ["dual_numbers", "exterior_graded"] {
        let e = corpus::build(name).unwrap();
        let m = Bimodule::diagonal(e.category.clone());
        for c in &e.candidates {
            for l in 1..=3 {
                let r = check_lemma_nondeg_equivalence(&c.sigma, &e.category, &m, l).unwrap();
                assert!(r.agree(), "{name}/{} L={l}: {r:?}", c.name);
                assert_eq!(r.nondegenerate, c.expect_nondegenerate, "{name}/{} L={l}", c.name);
            }
        }
    }
}

#[test]
fn three_formulations_agree_on_every_candidate() {
    for e in corpus::all() {
        for c in &e.candidates {
            let t = three_formulations(&c.sigma, &e.category, 3).unwrap();
            assert!(t.agree(), "{}/{}: {t:?}", e.name, c.name);
            assert_eq!(t.hochschild, c.expect_nondegenerate, "{}/{}", e.name, c.name);
        }
    }
}

#[test]
fn interval_toy_passes_the_relative_pipeline() {
    let r = corpus::build("interval_relative_toy").unwrap().relative.unwrap();
    for l in 1..=3 {
        let v = check_relative_pairing(&r.data, Some(&r.phi), Some(&r.sigma_a), l).unwrap();
        assert!(v.holds(), "L={l}: {v:?}");
        assert!(check_psi_irel_square(&r.data, l).unwrap().commutes());
        assert!(check_compatibility(&r.data, &r.sigma_a, &r.sigma_b, l).unwrap());
    }
    let (by_psi, by_p, by_form) = relative_three_formulations(&r.data, &r.phi, Some(&r.sigma_a), 3).unwrap();
    assert!(by_psi && by_p && by_form == Some(true));
}

#[test]
fn absolute_specialization_reproduces_the_lemma() {
    for name in ["dual_numbers", "exterior_graded"] {
        let e = corpus::build(name).unwrap();
        let a = e.category.clone();
        let f = Arc::new(Functor::identity(a.clone()));
        let d = Arc::new(Bimodule::diagonal(a.clone()));
        let data = RelativeData::new(a.clone(), f.clone(), 0, d.clone(), canonical_i(&f).unwrap()).unwrap();
        for c in &e.candidates {
            for l in 1..=3 {
                let lemma = check_lemma_nondeg_equivalence(&c.sigma, &a, &d, l).unwrap();
                let by_form = check_relative_pairing(&data, None, Some(&c.sigma), l).unwrap();
                assert_eq!(by_form.is_pairing, lemma.nondegenerate, "{name}/{}", c.name);
                assert_eq!(by_form.induced_on_b, lemma.nondegenerate, "{name}/{}", c.name);
                let phi = form_to_bimodule(&c.sigma, &a, &d, l).unwrap();
                let by_phi = check_relative_pairing(&data, Some(&phi), None, l).unwrap();
                assert_eq!(by_phi.is_pairing, lemma.bimodule.holds(), "{name}/{}", c.name);
            }
        }
    }
}

#[test]
fn zero_i_rel_breaks_only_the_transported_check() {
    let r = corpus::build("interval_relative_toy").unwrap().relative.unwrap();
    let zero = ainf_core::bimodule::PreMorphism::zero(r.data.i_rel.source.clone(), r.data.i_rel.target.clone(), r.data.i_rel.bound).unwrap();
    let data = RelativeData::new(r.data.a.clone(), r.data.functor.clone(), r.data.j, r.data.rel.clone(), zero).unwrap();
    let v = check_relative_pairing(&data, Some(&r.phi), None, 3).unwrap();
    assert!(v.is_pairing);
    assert!(!v.induced_on_b);
    assert!(check_psi_irel_square(&data, 3).unwrap().commutes());
    let b = data.b.clone();
    assert!(check_nondegenerate(&r.sigma_b, &b, &Bimodule::diagonal(b.clone()), 3).unwrap().perfect);
}
