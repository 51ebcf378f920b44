use ainf_core::corpus::{self, Coordinate};

#[test]
fn corpus_entries_validate_as_documented() {
    for e in corpus::all() {
        let rep = e.category.validate_relations();
        assert_eq!(rep.passed(), e.expect_valid, "{}", e.name);
        assert_eq!(e.name.starts_with("broken_"), !e.expect_valid);
        if !e.expect_valid {
            let w = rep.first_failure().expect("a failing entry names a witness");
            assert!(w.arity >= 1 && !w.objects.is_empty());
            assert!(!w.value.is_zero());
            continue;
        }
        for m in e.modules() {
            assert!(m.validate().passed(), "{}: module {}", e.name, m.name);
        }
        if let Some(r) = &e.relative {
            assert!(r.data.functor.validate().passed());
            assert!(r.data.rel.validate().passed());
            assert!(r.data.b.validate_relations().passed());
        }
    }
}

#[test]
fn broken_witness_is_at_arity_three() {
    let e = corpus::build("broken_dual_numbers").unwrap();
    let w = e.category.validate_relations().first_failure().cloned().unwrap();
    assert_eq!(w.arity, 3);
    assert_eq!(w.objects, ["X", "X", "X", "X"]);
}

#[test]
fn mutation_of_a_mu2_bit_is_caught_and_undone() {
    let e = corpus::build("dual_numbers").unwrap();
    let at = Coordinate { objects: vec![0, 0, 0], elems: vec![0, 1], bit: 0 };
    let bad = corpus::mutate(&e, &at).unwrap();
    assert_eq!(bad.revalidated, Some(false));
    let back = corpus::mutate(&bad, &at).unwrap();
    assert_eq!(back.revalidated, Some(true));
    assert_eq!(*back.category, *e.category);
}

#[test]
fn every_single_bit_mutation_is_recorded_honestly() {
    // the recorded verdict must be the engine's, whichever way it goes
    let e = corpus::build("dual_numbers").unwrap();
    let mut outcomes = [0usize; 2];
    for x in 0..2u32 {
        for y in 0..2u32 {
            for bit in 0..2 {
                let at = Coordinate { objects: vec![0, 0, 0], elems: vec![x, y], bit };
                let m = corpus::mutate(&e, &at).unwrap();
                let fresh = m.category.validate_relations().passed();
                assert_eq!(m.revalidated, Some(fresh));
                outcomes[fresh as usize] += 1;
            }
        }
    }
    assert!(outcomes[0] > 0 && outcomes[1] > 0, "{outcomes:?}");
}

#[test]
fn out_of_range_coordinates_are_errors() {
    let e = corpus::build("k_field").unwrap();
    assert!(corpus::mutate(&e, &Coordinate { objects: vec![0, 0, 0], elems: vec![0, 0], bit: 7 }).is_err());
    assert!(corpus::mutate(&e, &Coordinate { objects: vec![0, 3, 0], elems: vec![0, 0], bit: 0 }).is_err());
}

#[test]
fn nilpotent_mu3_has_a_genuine_higher_product() {
    let a = corpus::build("nilpotent_mu3").unwrap().category;
    assert!(a.validate_relations().passed());
    assert!(a.mu_tensor().iter().any(|(k, v)| k.len() == 7 && !v.is_zero()));
}
