mod common;

use common::{
    big, block, bockstein, bockstein_oracle, from_orders, inv, oracle_invariants, random_group,
    random_hom, rng, split_row,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use pvss_core::abgrp::{FgAbGroup, GroupHom, Invariants};
use pvss_core::homalg::{
    assemble_extension, assemble_filtration, derive_couple, six_term_solve, snake, SesLadder,
    ShortExactSequence,
};
use pvss_core::intmat::IntMatrix;
use rand::Rng;

/// `0 -> Z --m--> Z -> Z/m -> 0`.
fn cyclic_row(m: i64) -> ShortExactSequence {
    let z = FgAbGroup::free(1);
    let inj = GroupHom::new(z.clone(), z.clone(), IntMatrix::from_rows(&[[m]])).unwrap();
    let surj = GroupHom::new(z, FgAbGroup::cyclic(m), IntMatrix::from_rows(&[[1]])).unwrap();
    ShortExactSequence::new(inj, surj).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn snake_of_a_split_ladder_is_exact(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, c) = (random_group(&mut r, 2, 1, true), random_group(&mut r, 2, 1, true));
        let (a2, c2) = (random_group(&mut r, 2, 1, true), random_group(&mut r, 2, 1, true));
        let fa = random_hom(&mut r, &a, &a2);
        let fc = random_hom(&mut r, &c, &c2);
        let x = random_hom(&mut r, &c, &a2);
        let top = split_row(&a.group, &c.group);
        let bottom = split_row(&a2.group, &c2.group);
        let fb = GroupHom::new(
            top.middle().clone(),
            bottom.middle().clone(),
            block(fa.matrix(), x.matrix(), fc.matrix()),
        ).unwrap();
        let ladder = SesLadder::new(top, bottom, fa, fb, fc).unwrap();
        let out = snake(&ladder).unwrap();
        prop_assert!(out.sequence.is_exact());
    }

    #[test]
    fn snake_of_cyclic_rows_is_exact(m in 1i64..7, m2 in 1i64..7, t in -3i64..4) {
        let g = num_integer::Integer::gcd(&m, &m2);
        let (s, s2) = (t * m / g, t * m2 / g);
        let top = cyclic_row(m);
        let bottom = cyclic_row(m2);
        let z = FgAbGroup::free(1);
        let a = GroupHom::new(z.clone(), z.clone(), IntMatrix::from_rows(&[[s]])).unwrap();
        let b = GroupHom::new(z.clone(), z, IntMatrix::from_rows(&[[s2]])).unwrap();
        let c = GroupHom::new(FgAbGroup::cyclic(m), FgAbGroup::cyclic(m2), IntMatrix::from_rows(&[[s2]])).unwrap();
        let ladder = SesLadder::new(top, bottom, a, b, c).unwrap();
        prop_assert!(snake(&ladder).unwrap().sequence.is_exact());
    }

    #[test]
    fn bockstein_pages_match_the_closed_form(seed in any::<u64>(), p in prop::sample::select(vec![2i64, 3])) {
        let mut r = rng(seed);
        let (a, b) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let mut diag = IntMatrix::zeros(b, a);
        for i in 0..a.min(b) {
            let e: u32 = r.gen_range(0..=3);
            diag[(i, i)] = if r.gen_bool(0.2) { BigInt::zero() } else { big(p.pow(e) * r.gen_range(1..=2)) };
        }
        let u = from_orders(&mut r, vec![0; b], true).t;
        let v = from_orders(&mut r, vec![0; a], true).t;
        let d = u.mul(&diag).unwrap().mul(&v).unwrap();
        let h1 = oracle_invariants(&d);
        let h0 = Invariants::free(a - (0..a.min(b)).filter(|&i| !diag[(i, i)].is_zero()).count());
        let h = [h0, h1];

        let mut couple = bockstein(&d, p);
        for page in 1..=4u32 {
            let expected = bockstein_oracle(&h, p, page);
            for (i, &dim) in expected.iter().enumerate() {
                let e = couple.b((i as i32, 0));
                let inv = e.invariants();
                prop_assert_eq!(inv.rank, 0);
                prop_assert!(inv.torsion.iter().all(|t| t == &big(p)));
                prop_assert_eq!(inv.torsion.len(), dim, "page {} degree {}", page, i);
            }
            couple = derive_couple(&couple).unwrap();
            prop_assert_eq!(couple.degrees(), ((0, 0), (0, 0), (1, 0)));
        }
    }

    #[test]
    fn six_term_ranks_add_up(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g0 = random_group(&mut r, 3, 1, true);
        let g1 = random_group(&mut r, 3, 1, true);
        let a0 = random_hom(&mut r, &g0, &g0);
        let a1 = random_hom(&mut r, &g1, &g1);
        let (k0, k1) = six_term_solve(&a0, &a1).unwrap();
        let ker_rank = |a: &GroupHom| pvss_core::abgrp::kernel(a).unwrap().0.rank();
        let coker_rank = |a: &GroupHom| pvss_core::abgrp::cokernel(a).unwrap().0.rank();
        prop_assert_eq!(k0.rank(), coker_rank(&a0) + ker_rank(&a1));
        prop_assert_eq!(k1.rank(), coker_rank(&a1) + ker_rank(&a0));
        prop_assert_eq!(k0.rank() + k1.rank(), 2 * (ker_rank(&a0) + ker_rank(&a1)) );
    }

    #[test]
    fn filtrations_of_finite_pieces_keep_order_and_split_candidate(
        orders in prop::collection::vec(prop::collection::vec(2i64..5, 0..2), 1..4)
    ) {
        let pieces: Vec<FgAbGroup> = orders
            .iter()
            .map(|o| FgAbGroup::from_orders(0, &o.iter().map(|&x| big(x)).collect::<Vec<_>>()))
            .collect();
        let total: BigInt = orders.iter().flatten().map(|&x| big(x)).product();
        let report = assemble_filtration(&pieces);
        let split = FgAbGroup::from_orders(0, &orders.iter().flatten().map(|&x| big(x)).collect::<Vec<_>>());
        let cands = report.candidates();
        prop_assert_eq!(report.rank(), 0);
        if total <= BigInt::from(64) {
            prop_assert!(cands.contains(split.invariants()));
            prop_assert!(cands.iter().all(|c| c.torsion_order() == total));
        }
    }

    #[test]
    fn filtration_rank_is_the_sum_of_ranks(ranks in prop::collection::vec(0usize..3, 1..4)) {
        let pieces: Vec<FgAbGroup> = ranks.iter().map(|&k| FgAbGroup::free(k)).collect();
        let report = assemble_filtration(&pieces);
        prop_assert!(report.is_determined());
        prop_assert_eq!(report.rank(), ranks.iter().sum::<usize>());
    }
}

#[test]
fn cyclic_prime_power_extensions_are_enumerated() {
    // extensions of Z/p^b by Z/p^a: Z/p^{a+b-i} + Z/p^i, 0 <= i <= min(a, b)
    for (p, a, b) in [(2i64, 1u32, 1u32), (2, 2, 1), (2, 1, 2), (3, 1, 1), (2, 2, 2), (2, 3, 2)] {
        let sub = FgAbGroup::cyclic(p.pow(a));
        let quot = FgAbGroup::cyclic(p.pow(b));
        let mut expected: Vec<Invariants> = (0..=a.min(b))
            .map(|i| {
                let tors: Vec<i64> = [p.pow(i), p.pow(a + b - i)].into_iter().filter(|&t| t > 1).collect();
                inv(0, &tors)
            })
            .collect();
        expected.sort();
        let mut got = assemble_extension(&sub, &quot).candidates();
        got.sort();
        assert_eq!(got, expected, "p={p} a={a} b={b}");
    }
}

#[test]
fn coprime_extensions_are_determined() {
    let r = assemble_extension(&FgAbGroup::cyclic(4), &FgAbGroup::cyclic(9));
    assert_eq!(r.determined().unwrap().invariants(), &inv(0, &[36]));
    assert!(BigInt::one() < r.determined().unwrap().invariants().torsion_order());
}
