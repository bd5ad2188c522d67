use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siegel_core::chars::{all_sigma_labels, Constituent, Gl2Classifier, SigmaChar};
use siegel_core::finitegrp::{subgroup_closure, subgroup_r, FqCtx, Gl22, SubgroupKind};
use siegel_core::models::ModelOracle;
use siegel_core::padic::PadicCtx;

fn field(q: u32) -> FqCtx {
    let (p, f) = match q {
        4 => (2, 2),
        8 => (2, 3),
        9 => (3, 2),
        q => (q, 1),
    };
    FqCtx::new(p, f).unwrap()
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, xs: &[T]) -> T {
    xs[rng.gen_range(0..xs.len())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn u_action_stays_in_gl22(q in prop::sample::select(vec![2u32, 3, 4, 5, 7]), seed in any::<u64>()) {
        let c = field(q);
        let all = c.enumerate_gl22().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let x = pick(&mut rng, &all);
            let y = c.u_action(&x);
            prop_assert!(c.is_gl22(&y));
            prop_assert_eq!(c.u_action(&y), x);
        }
    }

    #[test]
    fn closure_is_idempotent_and_divides(q in prop::sample::select(vec![2u32, 3, 4]), seed in any::<u64>(), k in 1usize..4) {
        let c = field(q);
        let all = c.enumerate_gl22().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens: Vec<Gl22> = (0..k).map(|_| pick(&mut rng, &all)).collect();
        let h = subgroup_closure(&c, &gens);
        let mut more = gens.clone();
        more.extend(gens.iter().map(|g| c.gl22_inv(g)));
        more.push(c.gl22_mul(&gens[0], &gens[k - 1]));
        let grown = subgroup_closure(&c, &more);
        prop_assert_eq!(grown.elements(), h.elements());
        // quadratic checks only on small closures
        if h.len() <= 400 {
            prop_assert!(h.is_closed(&c));
            let again = subgroup_closure(&c, h.elements());
            prop_assert_eq!(again.elements(), h.elements());
        }
        prop_assert_eq!(all.len() % h.len(), 0);
    }

    #[test]
    fn fixed_dim_is_conjugation_invariant(q in prop::sample::select(vec![2u32, 3, 4, 5]), seed in any::<u64>()) {
        let c = field(q);
        let classes = Gl2Classifier::new(&c);
        let all = c.enumerate_gl22().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = pick(&mut rng, &all);
        let sigmas: Vec<_> = all_sigma_labels(&c).into_iter().filter(|s| s.constituent == Constituent::Full).collect();
        let ch = SigmaChar::new(&c, &classes, pick(&mut rng, &sigmas), None).unwrap();
        for kind in [SubgroupKind::Torus, SubgroupKind::Unip, SubgroupKind::U1, SubgroupKind::U2] {
            let r = subgroup_r(&c, kind).unwrap();
            prop_assert_eq!(ch.fixed_dim(&r).unwrap(), ch.fixed_dim(&r.conjugate_by(&c, &x)).unwrap());
        }
    }

    #[test]
    fn similitude_laws_off_k(p in prop::sample::select(vec![2u32, 3]), f in 1u32..=2, seed in any::<u64>()) {
        let c = PadicCtx::new(p, f, 24).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for n in 1..5u32 {
            let g = c.g_mul(&c.propose_siegel(&mut rng, n, 4), &c.t_ij(rng.gen_range(0..3), rng.gen_range(-1..4)));
            let h = c.g_mul(&c.random_k(&mut rng), &c.u_n(n as i64));
            let gi = c.g_inv(&g).unwrap();
            prop_assert!(c.mat_eq(&c.mat_mul(&g.mat, &gi.mat), &c.mat_identity()).unwrap());
            let gh = c.g_mul(&g, &h);
            prop_assert!(c.eq_certified(&c.similitude(&gh.mat).unwrap(), &c.mul(&g.mu, &h.mu)).unwrap());
        }
    }

    #[test]
    fn kplus_is_the_reduction_kernel(p in prop::sample::select(vec![2u32, 3]), seed in any::<u64>()) {
        let c = PadicCtx::new(p, 1, 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let (a, b) = (c.random_k(&mut rng), c.random_k(&mut rng));
            let same = c.reduce_k(&a).unwrap() == c.reduce_k(&b).unwrap();
            let quotient = c.g_mul(&a, &c.g_inv(&b).unwrap());
            prop_assert_eq!(same, c.in_kplus(&quotient).unwrap());
            prop_assert_eq!(c.reduce_k(&a).unwrap() == Gl22::IDENTITY, c.in_kplus(&a).unwrap());
        }
    }
}

#[test]
fn constituent_models_are_homomorphisms() {
    for q in [3u32, 5] {
        let c = field(q);
        let o = ModelOracle::new(&c, 0).unwrap();
        let all = c.enumerate_gl22().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(q as u64);
        let parts: Vec<_> = all_sigma_labels(&c).into_iter().filter(|s| s.constituent != Constituent::Full).collect();
        assert!(!parts.is_empty());
        for s in parts {
            let rep = o.sigma_rep(&s).unwrap();
            for _ in 0..1000 / 8 {
                let (x, y) = (pick(&mut rng, &all), pick(&mut rng, &all));
                let lhs = rep.matrix(&c.gl22_mul(&x, &y));
                let rhs = rep.matrix(&x) * rep.matrix(&y);
                assert!((lhs - rhs).camax() < 1e-8, "q={q} {s:?}");
            }
        }
    }
}
