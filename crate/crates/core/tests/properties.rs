use crosscap_core::gf2::transvection;
use crosscap_core::surface::{
    canonical_class_w, curve_class, generator_matrix, named_curves, CurveName, GeneratorName,
};
use crosscap_core::{GF2Matrix, GF2Vector, GenusConfig};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x00c0_ffee;
const GENERA: std::ops::RangeInclusive<usize> = 5..=36;

fn cfg(g: usize) -> GenusConfig {
    GenusConfig::new(g).unwrap()
}

/// Every generator with a model image at genus `g`.
fn all_generators(c: &GenusConfig) -> Vec<GeneratorName> {
    let g = c.genus() as i64;
    let mut out = vec![GeneratorName::T, GeneratorName::Rho1, GeneratorName::Rho2];
    out.extend((1..g).map(GeneratorName::U));
    out.extend((1..g - 1).map(GeneratorName::V));
    out.extend((1..g).map(GeneratorName::Y));
    out.extend(named_curves(c).into_iter().map(GeneratorName::Twist));
    out
}

fn image(name: GeneratorName, c: &GenusConfig) -> GF2Matrix {
    generator_matrix(name, c).unwrap_or_else(|e| panic!("{name} at g={}: {e}", c.genus()))
}

fn random_word(rng: &mut ChaCha8Rng, gens: &[GF2Matrix], len: usize) -> GF2Matrix {
    let n = gens[0].rows();
    (0..len).fold(GF2Matrix::identity(n), |acc, _| {
        let g = &gens[rng.random_range(0..gens.len())];
        let g = if rng.random::<bool>() {
            g.inverse().unwrap()
        } else {
            g.clone()
        };
        acc.mul(&g).unwrap()
    })
}

#[test]
fn every_generator_preserves_the_pairing() {
    for g in GENERA {
        let c = cfg(g);
        let gram = c.gram();
        for name in all_generators(&c) {
            let m = image(name, &c);
            assert_eq!(
                m.transpose().mul(&gram).unwrap().mul(&m).unwrap(),
                gram,
                "{name} at g={g}"
            );
        }
    }
}

#[test]
fn rotation_relations() {
    for g in GENERA {
        let c = cfg(g);
        let t = image(GeneratorName::T, &c);
        assert!(t.pow(g as i64).unwrap().is_identity(), "T^g at {g}");
        assert!(!t.pow(g as i64 - 1).unwrap().is_identity());
        let r1 = image(GeneratorName::Rho1, &c);
        let r2 = image(GeneratorName::Rho2, &c);
        assert_eq!(r2.mul(&r1).unwrap(), t, "rho2 rho1 at {g}");
        let t_inv = t.inverse().unwrap();
        for i in 1..g as i64 - 1 {
            let u = image(GeneratorName::U(i), &c);
            let next = image(GeneratorName::U(i + 1), &c);
            assert_eq!(t.mul(&u).unwrap().mul(&t_inv).unwrap(), next, "T u_{i} T^-1 at {g}");
        }
    }
}

#[test]
fn slides_and_reflections_are_involutions() {
    for g in GENERA {
        let c = cfg(g);
        for name in [GeneratorName::Rho1, GeneratorName::Rho2] {
            let m = image(name, &c);
            assert!(m.mul(&m).unwrap().is_identity());
        }
        for i in 1..g as i64 {
            let y = image(GeneratorName::Y(i), &c);
            assert!(y.mul(&y).unwrap().is_identity(), "y_{i} at {g}");
        }
    }
}

#[test]
fn twists_are_involutions() {
    for g in GENERA {
        let c = cfg(g);
        for curve in named_curves(&c) {
            let m = image(GeneratorName::Twist(curve), &c);
            assert!(m.mul(&m).unwrap().is_identity(), "{curve} at {g}");
        }
    }
}

#[test]
fn w_is_fixed_by_random_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for g in GENERA {
        let c = cfg(g);
        let gens: Vec<GF2Matrix> = all_generators(&c).into_iter().map(|n| image(n, &c)).collect();
        let w = canonical_class_w(&c);
        for _ in 0..200 {
            let len = rng.random_range(1..12);
            let f = random_word(&mut rng, &gens, len);
            assert_eq!(&f.apply(w.vector()).unwrap(), w.vector(), "g={g}");
        }
    }
}

#[test]
fn conjugation_shadow_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    for g in GENERA {
        let c = cfg(g);
        let gens: Vec<GF2Matrix> = all_generators(&c).into_iter().map(|n| image(n, &c)).collect();
        let curves: Vec<CurveName> = named_curves(&c);
        for _ in 0..20 {
            let len = rng.random_range(1..10);
            let f = random_word(&mut rng, &gens, len);
            let curve = curves[rng.random_range(0..curves.len())];
            let twist = image(GeneratorName::Twist(curve), &c);
            let lhs = f.mul(&twist).unwrap().mul(&f.inverse().unwrap()).unwrap();
            let moved = f.apply(curve_class(curve, &c).unwrap().vector()).unwrap();
            assert_eq!(lhs, transvection(&moved, &c.gram()).unwrap(), "{curve} at {g}");
        }
    }
}

fn isotropic_vector(dim: usize) -> impl Strategy<Value = GF2Vector> {
    prop::collection::vec(any::<bool>(), dim)
        .prop_map(move |bits| {
            let mut v = GF2Vector::from_support(dim, bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i));
            if v.weight() % 2 == 1 {
                v.flip(0);
            }
            v
        })
        .prop_filter("nonzero", |v| !v.is_zero())
}

fn fixed() -> ProptestConfig {
    ProptestConfig {
        cases: 128,
        rng_seed: RngSeed::Fixed(SEED),
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(fixed())]

    #[test]
    fn transvection_squared_is_identity(v in (5usize..=36).prop_flat_map(isotropic_vector)) {
        let c = cfg(v.dim());
        let t = transvection(&v, &c.gram()).unwrap();
        prop_assert!(t.mul(&t).unwrap().is_identity());
        prop_assert!(t.preserves_form(&c.gram()).unwrap());
    }

    #[test]
    fn conjugating_a_transvection_moves_its_class(
        (v, perm_seed) in (5usize..=36).prop_flat_map(|g| (isotropic_vector(g), any::<u64>()))
    ) {
        let c = cfg(v.dim());
        let gens: Vec<GF2Matrix> = all_generators(&c).into_iter().map(|n| image(n, &c)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
        let f = random_word(&mut rng, &gens, 6);
        let lhs = f.mul(&transvection(&v, &c.gram()).unwrap()).unwrap().mul(&f.inverse().unwrap()).unwrap();
        prop_assert_eq!(lhs, transvection(&f.apply(&v).unwrap(), &c.gram()).unwrap());
    }
}
