use std::sync::Arc;

use ainf_core::bimodule::{Bimodule, PreMorphism};
use ainf_core::corpus;
use ainf_core::functor::PreNat;
use ainf_core::modfun::diagrams::random_endofunctor;
use ainf_core::modfun::{ModFunctor, ModPreNat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const L: usize = 4;
const SAMPLES: usize = 10;

#[test]
fn bimodule_differential_squares_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut nonzero = 0;
    for e in corpus::all().into_iter().filter(|e| e.expect_valid) {
        let d = Arc::new(Bimodule::diagonal(e.category.clone()));
        let dd = Arc::new(d.dual());
        for (s, t) in [(d.clone(), d.clone()), (d.clone(), dd.clone())] {
            for _ in 0..SAMPLES {
                let nu = PreMorphism::random(s.clone(), t.clone(), L, &mut rng);
                let d1 = nu.mu1(L);
                nonzero += !d1.is_zero() as usize;
                assert!(d1.mu1(L).is_zero(), "{}", e.name);
            }
        }
        for m in e.modules() {
            let nu = PreMorphism::random(m.clone(), m.clone(), L, &mut rng);
            assert!(nu.mu1(L).mu1(L).is_zero(), "{}: {}", e.name, m.name);
        }
    }
    assert!(nonzero > 0, "every sampled differential vanished");
}

#[test]
fn functor_category_differential_squares_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut nonzero = 0;
    for e in corpus::all().into_iter().filter(|e| e.expect_valid) {
        let a = &e.category;
        for _ in 0..SAMPLES {
            let f0 = Arc::new(random_endofunctor(a, 2, &mut rng));
            let f1 = Arc::new(random_endofunctor(a, 2, &mut rng));
            let t = PreNat::random(f0, f1, L, &mut rng);
            let d1 = t.mu1(L);
            nonzero += !d1.is_zero() as usize;
            assert!(d1.mu1(L).is_zero(), "{}", e.name);
        }
        let y = Arc::new(ModFunctor::yoneda_left(a));
        let t = ModPreNat::random(y.clone(), y, L, &mut rng);
        let d1 = t.mu1(L);
        nonzero += !d1.is_zero() as usize;
        assert!(d1.mu1(L).is_zero(), "{}", e.name);
    }
    assert!(nonzero > 0, "every sampled differential vanished");
}
