use ainf_core::bimodule::{cone, Bimodule, PreMorphism};
use ainf_core::corpus;
use ainf_core::gf2::F2Matrix;
use ainf_core::modfun::ModFunctor;

#[test]
fn cone_of_identity_is_acyclic_for_every_module() {
    for e in corpus::all().into_iter().filter(|e| e.expect_valid) {
        for m in e.modules() {
            let c = cone(&PreMorphism::unit(m.clone())).unwrap();
            assert!(c.module.validate().passed(), "{}: {}", e.name, m.name);
            for x in 0..c.module.left.num_objects() as u32 {
                assert_eq!(c.module.value_complex(x, 0).total_homology_dim(), 0, "{}: {}", e.name, m.name);
            }
        }
    }
}

#[test]
fn surgery_blocks_have_the_triangular_pattern() {
    let s = corpus::build("surgery_cone_toy").unwrap().surgery.unwrap();
    let d = s.total.differential();
    assert!(d.mul(d).is_zero());
    for r in 0..3 {
        for c in 0..3 {
            let b = s.block(r, c);
            if c > r {
                assert!(b.is_zero(), "block ({r},{c}) must vanish");
            } else if c == r {
                assert_eq!(b, *s.blocks[r].differential());
            }
        }
    }
    assert_eq!(s.block(1, 0), s.rho32);
    assert_eq!(s.block(2, 0), s.rho31);
    assert_eq!(s.block(2, 1), s.rho21);
    assert!(!s.rho31.is_zero() && !s.rho21.is_zero() && !s.rho32.is_zero());
    // corner block of d^2: rho21 rho32 + d1 rho31 + rho31 d3
    let corner = s.rho21.mul(&s.rho32).add(&s.blocks[2].differential().mul(&s.rho31)).add(&s.rho31.mul(s.blocks[0].differential()));
    assert_eq!(corner, F2Matrix::zeros(2, 1));
    assert_eq!(s.total.total_homology_dim(), 0);
}

#[test]
fn cone_structure_morphisms_are_closed() {
    let s = corpus::build("surgery_cone_toy").unwrap().surgery.unwrap();
    assert!(s.rho21_morphism.is_closed());
    let c = cone(&s.rho21_morphism).unwrap();
    assert!(c.module.validate().passed());
    assert!(c.inclusion.is_closed());
    assert!(c.projection.is_closed());
}

#[test]
fn yoneda_phi_is_the_diagonal() {
    for e in corpus::all().into_iter().filter(|e| e.expect_valid) {
        let phi = ModFunctor::yoneda_left(&e.category).phi();
        let d = Bimodule::diagonal(e.category.clone());
        assert_eq!(*phi, d, "{}", e.name);
        assert_eq!(phi.mu_tensor().sorted(), d.mu_tensor().sorted(), "{}", e.name);
    }
}
