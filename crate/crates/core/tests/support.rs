use proptest::prelude::*;
use siegel_core::chars::{all_sigma_labels, Gl2Classifier};
use siegel_core::finitegrp::FqCtx;
use siegel_core::models::ModelOracle;
use siegel_core::support::*;

#[test]
fn enumeration_matches_closed_counts() {
    for q in [2, 3, 4, 5, 8] {
        for n in 0..=60 {
            for t in CosetType::ALL {
                assert_eq!(enumerate_type(t, q, n).len() as u64, closed_count(t, q, n), "{t} q={q} n={n}");
                let fixed = al_fixed_cosets(q, n).iter().filter(|(c, _)| c.ctype == t).count() as u64;
                assert_eq!(fixed, closed_fixed_count(t, q, n), "fixed {t} q={q} n={n}");
            }
        }
    }
}

#[test]
fn weighted_counts_give_even_formula() {
    for q in [2u64, 4, 8] {
        for n in 4..=60i64 {
            let f = |m: i64| (m * m / 4) as u64;
            let w = f(n - 1) + f(n - 2) + (q - 1) * f(n - 3) + q * f(n - 5) + (q - 1) * f(n - 4);
            assert_eq!(w, f_even(n as u32, q as u32));
        }
    }
}

proptest! {
    #[test]
    fn al_partner_is_an_involution_on_the_support(q in prop::sample::select(vec![2u32, 3, 4, 8]), n in 0u32..=20) {
        for c in enumerate_support(q, n) {
            let d = al_partner(&c, n);
            prop_assert!(enumerate_support(q, n).contains(&d));
            prop_assert_eq!(al_partner(&d, n), c);
        }
    }
}

fn assemble_grid(p: u32, f: u32, ns: std::ops::RangeInclusive<u32>, al: bool) {
    let ctx = FqCtx::new(p, f).unwrap();
    let classes = Gl2Classifier::new(&ctx);
    let oracle = ModelOracle::new(&ctx, 0).unwrap();
    for sigma in all_sigma_labels(&ctx) {
        for sign in [1, -1] {
            let tau = TauSpec::new(&ctx, sigma, sign).unwrap();
            for source in [Source::Computed, Source::Closed] {
                let a = Assembler::new(&ctx, &classes, tau, source, Some(&oracle)).unwrap();
                for n in ns.clone() {
                    let d = a.assemble_dim(n);
                    assert!(d.matched, "{:?} {:?} {source:?} n={n}: {} vs {}", sigma, tau.class, d.assembled, d.closed);
                    if al && n >= 3 {
                        let s = a.assemble_al(n).unwrap();
                        assert!(s.matched, "AL {:?} {:?} sign {sign} {source:?} n={n}: {} vs {}", sigma, tau.class, s.assembled, s.closed);
                    }
                }
            }
        }
    }
}

#[test]
fn assembly_matches_closed_forms() {
    assemble_grid(2, 1, 0..=20, true);
    assemble_grid(3, 1, 0..=20, true);
    assemble_grid(2, 2, 0..=20, true);
    assemble_grid(5, 1, 0..=20, true);
}

#[test]
fn q2_sequences() {
    let ctx = FqCtx::new(2, 1).unwrap();
    let classes = Gl2Classifier::new(&ctx);
    let sigma = all_sigma_labels(&ctx)[0];
    let tau = TauSpec::new(&ctx, sigma, 1).unwrap();
    assert!(tau.self_twisted());
    let a = Assembler::new(&ctx, &classes, tau, Source::Closed, None).unwrap();
    let dims: Vec<u64> = (0..=8).map(|n| a.assemble_dim(n).assembled).collect();
    assert_eq!(dims, vec![0, 0, 0, 1, 3, 7, 13, 23, 35]);
    for n in 3..=12 {
        let want = match n {
            3 => 1,
            n if n % 2 == 0 => n as i64 - 3,
            n => 2 * n as i64 - 7,
        };
        assert_eq!(a.assemble_al(n).unwrap().assembled, want);
    }
}
