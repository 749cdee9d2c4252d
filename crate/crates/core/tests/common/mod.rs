// Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use num_traits::Zero;
use pvss_core::abgrp::{direct_sum, induced_hom, FgAbGroup, GroupHom, Invariants, Subquotient};
use pvss_core::homalg::{CochainComplex, ExactCouple, GradedHom, ShortExactSequence};
use pvss_core::intmat::IntMatrix;
use pvss_core::specseq::{tuples, ActionSpec, D2Data, SpecFlags};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn inv(rank: usize, torsion: &[i64]) -> Invariants {
    Invariants {
        rank,
        torsion: torsion.iter().map(|&t| big(t)).collect(),
    }
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let data = (0..rows * cols)
        .map(|_| big(rng.gen_range(-bound..=bound)))
        .collect();
    IntMatrix::from_vec(rows, cols, data).unwrap()
}

fn to_i128(m: &IntMatrix) -> Vec<Vec<i128>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_i128().expect("small entry")).collect())
        .collect()
}

fn det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        k => (0..k)
            .map(|j| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    tuples(k, n)
        .iter()
        .map(|t| t.entries().iter().map(|e| e - 1).collect())
        .collect()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Smith diagonal from determinantal divisors: `d_k = D_k / D_{k-1}` where
/// `D_k` is the gcd of all `k x k` minors.
pub fn oracle_smith_diagonal(m: &IntMatrix) -> Vec<i128> {
    let a = to_i128(m);
    let mut out = Vec::new();
    let mut prev = 1i128;
    for k in 1..=m.rows().min(m.cols()) {
        let mut g = 0i128;
        for rs in subsets(m.rows(), k) {
            for cs in subsets(m.cols(), k) {
                let minor: Vec<Vec<i128>> =
                    rs.iter().map(|&r| cs.iter().map(|&c| a[r][c]).collect()).collect();
                g = gcd(g, det(&minor));
            }
        }
        if g == 0 {
            break;
        }
        out.push(g / prev);
        prev = g;
    }
    out
}

/// Invariants of `Z^rows / colspan(m)` via determinantal divisors.
pub fn oracle_invariants(m: &IntMatrix) -> Invariants {
    let diag = oracle_smith_diagonal(m);
    Invariants {
        rank: m.rows() - diag.len(),
        torsion: diag.iter().filter(|&&d| d != 1).map(|&d| BigInt::from(d)).collect(),
    }
}

/// A group given as `Z/o_1 + ... + Z/o_k + Z^r` (order 0 meaning free) in
/// coordinates changed by a unimodular `t`.
#[derive(Clone, Debug)]
pub struct RandomGroup {
    pub orders: Vec<i64>,
    pub t: IntMatrix,
    pub t_inv: IntMatrix,
    pub group: FgAbGroup,
}

impl RandomGroup {
    pub fn gens(&self) -> usize {
        self.orders.len()
    }

    pub fn expected(&self) -> Invariants {
        let tors: Vec<BigInt> = self.orders.iter().filter(|&&o| o > 0).map(|&o| big(o)).collect();
        let rank = self.orders.iter().filter(|&&o| o == 0).count();
        FgAbGroup::from_orders(rank, &tors).invariants().clone()
    }

    /// Transports a matrix from diagonal coordinates.
    pub fn hom_to(&self, target: &RandomGroup, m: &IntMatrix) -> GroupHom {
        let conj = target.t.mul(m).unwrap().mul(&self.t_inv).unwrap();
        GroupHom::new(self.group.clone(), target.group.clone(), conj).unwrap()
    }
}

fn random_unimodular(rng: &mut impl Rng, n: usize, steps: usize) -> (IntMatrix, IntMatrix) {
    let mut t = IntMatrix::identity(n);
    let mut t_inv = IntMatrix::identity(n);
    if n < 2 {
        return (t, t_inv);
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        let k: i64 = rng.gen_range(-2..=2);
        // E = I + k e_ij, E^{-1} = I - k e_ij
        let mut e = IntMatrix::identity(n);
        e[(i, j)] = big(k);
        let mut e_inv = IntMatrix::identity(n);
        e_inv[(i, j)] = big(-k);
        t = e.mul(&t).unwrap();
        t_inv = t_inv.mul(&e_inv).unwrap();
    }
    (t, t_inv)
}

/// Rank `<= max_rank`, up to `max_torsion` cyclic torsion summands of order
/// 2, 3 or 4, optionally in scrambled coordinates.
pub fn random_group(rng: &mut impl Rng, max_rank: usize, max_torsion: usize, scramble: bool) -> RandomGroup {
    let rank = rng.gen_range(0..=max_rank);
    let tors = rng.gen_range(0..=max_torsion);
    let mut orders: Vec<i64> = (0..tors).map(|_| rng.gen_range(2..=4)).collect();
    orders.extend(std::iter::repeat(0).take(rank));
    from_orders(rng, orders, scramble)
}

pub fn from_orders(rng: &mut impl Rng, orders: Vec<i64>, scramble: bool) -> RandomGroup {
    let g = orders.len();
    let (t, t_inv) = if scramble {
        random_unimodular(rng, g, 3)
    } else {
        (IntMatrix::identity(g), IntMatrix::identity(g))
    };
    let tors: Vec<usize> = (0..g).filter(|&i| orders[i] > 0).collect();
    let mut rel = IntMatrix::zeros(g, tors.len());
    for (c, &i) in tors.iter().enumerate() {
        rel[(i, c)] = big(orders[i]);
    }
    let group = FgAbGroup::presented(t.mul(&rel).unwrap());
    RandomGroup {
        orders,
        t,
        t_inv,
        group,
    }
}

fn gcd64(a: i64, b: i64) -> i64 {
    gcd(a as i128, b as i128) as i64
}

/// A matrix in diagonal coordinates defining a hom between the groups.
pub fn random_diag_hom(rng: &mut impl Rng, src: &RandomGroup, tgt: &RandomGroup, bound: i64) -> IntMatrix {
    let mut m = IntMatrix::zeros(tgt.gens(), src.gens());
    for i in 0..tgt.gens() {
        for j in 0..src.gens() {
            let (ti, sj) = (tgt.orders[i], src.orders[j]);
            let v: i64 = rng.gen_range(-bound..=bound);
            let entry = match (ti, sj) {
                (_, 0) => v,
                (0, _) => 0,
                (t, s) => v * (t / gcd64(t, s)),
            };
            m[(i, j)] = big(entry);
        }
    }
    m
}

pub fn random_hom(rng: &mut impl Rng, src: &RandomGroup, tgt: &RandomGroup) -> GroupHom {
    let m = random_diag_hom(rng, src, tgt, 3);
    src.hom_to(tgt, &m)
}

/// `n` commuting endomorphisms: identities, or small polynomials in one
/// random endomorphism.
pub fn random_commuting(rng: &mut impl Rng, g: &RandomGroup, n: usize) -> Vec<GroupHom> {
    let id = IntMatrix::identity(g.gens());
    if rng.gen_bool(0.25) {
        return vec![g.hom_to(g, &id); n];
    }
    let m = random_diag_hom(rng, g, g, 2);
    let m2 = m.mul(&m).unwrap();
    (0..n)
        .map(|_| {
            let c: [i64; 3] = [rng.gen_range(-1..=2), rng.gen_range(-1..=1), rng.gen_range(-1..=1)];
            let p = id
                .scale(&big(c[0]))
                .add(&m.scale(&big(c[1])))
                .unwrap()
                .add(&m2.scale(&big(c[2])))
                .unwrap();
            g.hom_to(g, &p)
        })
        .collect()
}

/// A valid spec without d2 data: n in 1..=3, ranks <= 3, torsion orders <= 4.
pub fn random_spec(rng: &mut impl Rng) -> ActionSpec {
    let n = rng.gen_range(1..=3);
    let g0 = random_group(rng, 3, 2, true);
    let g1 = random_group(rng, 3, 2, true);
    let a0 = random_commuting(rng, &g0, n);
    let a1 = random_commuting(rng, &g1, n);
    ActionSpec::new(n, g0.group.clone(), g1.group.clone(), a0, a1).unwrap()
}

/// A spec that runs to E∞: n = 1 with any action, n = 2 with random ambient
/// d2, n = 3 K-trivial with random pairwise d2 and vanishing higher
/// differentials assumed.
pub fn random_runnable_spec(rng: &mut impl Rng) -> ActionSpec {
    let n = rng.gen_range(1..=3);
    let g0 = random_group(rng, 2, 1, true);
    let g1 = random_group(rng, 2, 1, true);
    match n {
        1 | 2 => {
            let a0 = random_commuting(rng, &g0, n);
            let a1 = random_commuting(rng, &g1, n);
            let spec = ActionSpec::new(n, g0.group.clone(), g1.group.clone(), a0, a1).unwrap();
            if n == 1 {
                return spec;
            }
            let d = [random_hom(rng, &g0, &g1), random_hom(rng, &g1, &g0)];
            spec.with_d2(D2Data::AmbientN2(d)).unwrap()
        }
        _ => {
            let flags = SpecFlags {
                k_trivial: true,
                assume_higher_vanish: true,
                ..SpecFlags::default()
            };
            let mut pairs = BTreeMap::new();
            for mu in tuples(2, 3) {
                pairs.insert(mu, [random_hom(rng, &g0, &g1), random_hom(rng, &g1, &g0)]);
            }
            ActionSpec::trivial(3, g0.group.clone(), g1.group.clone())
                .with_flags(flags)
                .unwrap()
                .with_d2(D2Data::PairwiseKTrivial(pairs))
                .unwrap()
        }
    }
}

pub fn free_endo(rows: &[&[i64]]) -> GroupHom {
    let m = IntMatrix::from_rows(rows);
    let g = FgAbGroup::free(m.rows());
    GroupHom::new(g.clone(), g, m).unwrap()
}

pub fn free_map(rows: &[&[i64]], src: usize) -> GroupHom {
    let m = if rows.is_empty() {
        IntMatrix::zeros(0, src)
    } else {
        IntMatrix::from_rows(rows)
    };
    GroupHom::new(FgAbGroup::free(src), FgAbGroup::free(m.rows()), m).unwrap()
}

/// K-trivial n = 2 spec on free groups with ambient d2 maps
/// `δ0: K0 -> K1`, `δ1: K1 -> K0`, flagged pointwise inner.
pub fn ambient_spec(rank0: usize, rank1: usize, delta0: IntMatrix, delta1: IntMatrix) -> ActionSpec {
    let (k0, k1) = (FgAbGroup::free(rank0), FgAbGroup::free(rank1));
    let d0 = GroupHom::new(k0.clone(), k1.clone(), delta0).unwrap();
    let d1 = GroupHom::new(k1.clone(), k0.clone(), delta1).unwrap();
    let flags = SpecFlags {
        k_trivial: true,
        pointwise_inner: true,
        ..SpecFlags::default()
    };
    ActionSpec::trivial(2, k0, k1)
        .with_flags(flags)
        .unwrap()
        .with_d2(D2Data::AmbientN2([d0, d1]))
        .unwrap()
}

/// Heisenberg data: K0 = K1 = Z^3, δ0 = 0, δ1 sends the first two K1
/// generators to the first two K0 generators and the third to `(a, b, 0)`,
/// all scaled by `scale`.
pub fn heisenberg(scale: i64, a: i64, b: i64) -> ActionSpec {
    let d1 = IntMatrix::from_rows(&[[1, 0, a], [0, 1, b], [0, 0, 0]]).scale(&big(scale));
    ambient_spec(3, 3, IntMatrix::zeros(3, 3), d1)
}

pub fn c1() -> ActionSpec {
    let mut d0 = IntMatrix::zeros(4, 4);
    d0[(3, 3)] = big(1);
    ambient_spec(4, 4, d0, IntMatrix::diagonal(&[1, 1, 0, 0]))
}

pub fn c_minimal() -> ActionSpec {
    ambient_spec(1, 1, IntMatrix::from_rows(&[[1]]), IntMatrix::from_rows(&[[0]]))
}

pub fn c0() -> ActionSpec {
    ambient_spec(4, 4, IntMatrix::zeros(4, 4), IntMatrix::diagonal(&[1, 1, 0, 1]))
}

pub fn block(a: &IntMatrix, x: &IntMatrix, c: &IntMatrix) -> IntMatrix {
    let mut m = IntMatrix::zeros(a.rows() + c.rows(), a.cols() + c.cols());
    m.set_block(0, 0, a);
    m.set_block(0, a.cols(), x);
    m.set_block(a.rows(), a.cols(), c);
    m
}

pub fn split_row(a: &FgAbGroup, c: &FgAbGroup) -> ShortExactSequence {
    let s = direct_sum(&[a.clone(), c.clone()]);
    ShortExactSequence::new(s.injections[0].clone(), s.projections[1].clone()).unwrap()
}

/// The Bockstein couple of a two-term free complex `Z^a --d--> Z^b` for the
/// prime `p`: `A = H(C)`, `B = H(C; Z/p)`, `f = p`, `g` reduction, `h` the
/// connecting map.
pub fn bockstein(d: &IntMatrix, p: i64) -> ExactCouple {
    let (a, b) = (d.cols(), d.rows());
    let (fa, fb) = (FgAbGroup::free(a), FgAbGroup::free(b));
    let pa = FgAbGroup::presented(IntMatrix::identity(a).scale(&big(p)));
    let pb = FgAbGroup::presented(IntMatrix::identity(b).scale(&big(p)));
    let integral = CochainComplex::new(
        BTreeMap::from([(0, fa.clone()), (1, fb.clone())]),
        BTreeMap::from([(0, GroupHom::new(fa.clone(), fb.clone(), d.clone()).unwrap())]),
    )
    .unwrap();
    let modp = CochainComplex::new(
        BTreeMap::from([(0, pa.clone()), (1, pb.clone())]),
        BTreeMap::from([(0, GroupHom::new(pa.clone(), pb.clone(), d.clone()).unwrap())]),
    )
    .unwrap();
    let hz: Vec<Subquotient> = (0..2).map(|i| integral.cohomology_subquotient(i).unwrap()).collect();
    let hp: Vec<Subquotient> = (0..2).map(|i| modp.cohomology_subquotient(i).unwrap()).collect();
    let free = [fa, fb];
    let reduce = [
        GroupHom::new(free[0].clone(), pa, IntMatrix::identity(a)).unwrap(),
        GroupHom::new(free[1].clone(), pb, IntMatrix::identity(b)).unwrap(),
    ];
    let mut f = GradedHom::new((0, 0));
    let mut g = GradedHom::new((0, 0));
    for i in 0..2usize {
        let times_p = GroupHom::identity(&free[i]).scale(&big(p));
        f = f.with((i as i32, 0), induced_hom(&times_p, &hz[i], &hz[i]).unwrap());
        g = g.with((i as i32, 0), induced_hom(&reduce[i], &hz[i], &hp[i]).unwrap());
    }
    // h[x] = [d x / p]
    let reps = hp[0].representatives();
    let lifted = d.mul(reps).unwrap();
    let mut divided = IntMatrix::zeros(lifted.rows(), lifted.cols());
    for i in 0..lifted.rows() {
        for j in 0..lifted.cols() {
            assert!((&lifted[(i, j)] % big(p)).is_zero());
            divided[(i, j)] = &lifted[(i, j)] / big(p);
        }
    }
    let hm = hz[1].coordinates_of_columns(&divided).unwrap();
    let h0 = GroupHom::new(hp[0].group().clone(), hz[1].group().clone(), hm).unwrap();
    let h = GradedHom::new((1, 0)).with((0, 0), h0);
    let groups = |s: &[Subquotient]| -> BTreeMap<(i32, i32), FgAbGroup> {
        s.iter()
            .enumerate()
            .map(|(i, q)| ((i as i32, 0), q.group().clone()))
            .collect()
    };
    ExactCouple::new(groups(&hz), groups(&hp), f, g, h).unwrap()
}

/// `p^k G` for `G` with the given invariants.
pub fn multiply_by_power(g: &Invariants, p: i64, k: u32) -> Invariants {
    let pk = BigInt::from(p).pow(k);
    let orders: Vec<BigInt> = g
        .torsion
        .iter()
        .map(|t| t / num_integer::Integer::gcd(t, &pk))
        .collect();
    FgAbGroup::from_orders(g.rank, &orders).invariants().clone()
}

pub fn p_rank(g: &Invariants, p: i64) -> usize {
    g.torsion.iter().filter(|t| (*t % big(p)).is_zero()).count()
}

/// Dimension over Z/p of `E_r^n = p^{r-1}H^n / p ⊕ (p^{r-1}H^{n+1})[p]`.
pub fn bockstein_oracle(h: &[Invariants; 2], p: i64, r: u32) -> [usize; 2] {
    let scaled = [multiply_by_power(&h[0], p, r - 1), multiply_by_power(&h[1], p, r - 1)];
    let dim = |g: &Invariants| g.rank + p_rank(g, p);
    [dim(&scaled[0]) + p_rank(&scaled[1], p), dim(&scaled[1])]
}
