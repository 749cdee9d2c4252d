//! Cochain complexes, the snake lemma, exact couples and their derived
//! couples, and the extension bookkeeping needed to read off the abutment of
//! a convergent filtration.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::abgrp::{
    cokernel_subquotient, compose, image, induced_hom, kernel_subgroup, kernel_subquotient,
    subquotient, FgAbGroup, GroupHom, Invariants, Subquotient,
};
use crate::error::{Error, Result};
use crate::intmat::{IntMatrix, ModularSolver};

pub type Bidegree = (i32, i32);

fn shift(x: Bidegree, d: Bidegree) -> Bidegree {
    (x.0 + d.0, x.1 + d.1)
}

fn unshift(x: Bidegree, d: Bidegree) -> Bidegree {
    (x.0 - d.0, x.1 - d.1)
}

fn group_at<K: Ord>(groups: &BTreeMap<K, FgAbGroup>, k: &K) -> FgAbGroup {
    groups.get(k).cloned().unwrap_or_else(FgAbGroup::trivial)
}

/// Fails with `NotExact` unless `image(incoming) = kernel(outgoing)`.
fn check_exact_at(incoming: &GroupHom, outgoing: &GroupHom, node: &str) -> Result<()> {
    if incoming.target() != outgoing.source() {
        return Err(Error::MismatchedGroups(format!(
            "maps meeting at {node} disagree about the group there"
        )));
    }
    if !image(incoming)?.same_as(&kernel_subgroup(outgoing)?)? {
        return Err(Error::NotExact(format!(
            "at {node}: image of the incoming map differs from the kernel of the outgoing map"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct CochainComplex {
    groups: BTreeMap<i32, FgAbGroup>,
    differentials: BTreeMap<i32, GroupHom>,
}

impl CochainComplex {
    /// `differentials[p]` runs from degree `p` to `p + 1`. Missing groups are
    /// trivial and missing differentials are zero.
    pub fn new(
        groups: BTreeMap<i32, FgAbGroup>,
        differentials: BTreeMap<i32, GroupHom>,
    ) -> Result<Self> {
        for (&p, d) in &differentials {
            if d.source() != &group_at(&groups, &p) || d.target() != &group_at(&groups, &(p + 1)) {
                return Err(Error::MismatchedGroups(format!(
                    "differential in degree {p} does not run between the groups of degrees {p} and {}",
                    p + 1
                )));
            }
            d.ensure_well_defined()?;
        }
        for (&p, d) in &differentials {
            if let Some(next) = differentials.get(&(p + 1)) {
                if !compose(next, d)?.is_zero() {
                    return Err(Error::NotExact(format!(
                        "d^{} ∘ d^{p} is not zero",
                        p + 1
                    )));
                }
            }
        }
        Ok(CochainComplex {
            groups,
            differentials,
        })
    }

    pub fn group(&self, p: i32) -> FgAbGroup {
        group_at(&self.groups, &p)
    }

    pub fn differential(&self, p: i32) -> GroupHom {
        self.differentials
            .get(&p)
            .cloned()
            .unwrap_or_else(|| GroupHom::zero(&self.group(p), &self.group(p + 1)))
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.groups.keys().copied()
    }

    /// `ker d^p / im d^{p-1}` with representatives in degree `p`.
    pub fn cohomology_subquotient(&self, p: i32) -> Result<Subquotient> {
        let cycles = kernel_subgroup(&self.differential(p))?;
        let boundaries = image(&self.differential(p - 1))?;
        subquotient(&cycles, &boundaries)
    }
}

pub fn cohomology_at(c: &CochainComplex, p: i32) -> Result<FgAbGroup> {
    Ok(c.cohomology_subquotient(p)?.group().clone())
}

/// `0 -> left --inj--> middle --surj--> right -> 0`, checked exact.
#[derive(Clone, Debug)]
pub struct ShortExactSequence {
    inj: GroupHom,
    surj: GroupHom,
}

impl ShortExactSequence {
    pub fn new(inj: GroupHom, surj: GroupHom) -> Result<Self> {
        inj.ensure_well_defined()?;
        surj.ensure_well_defined()?;
        if !inj.is_injective()? {
            return Err(Error::NotExact("short exact row: injection has a kernel".into()));
        }
        if !surj.is_surjective()? {
            return Err(Error::NotExact("short exact row: surjection misses elements".into()));
        }
        check_exact_at(&inj, &surj, "the middle of a short exact row")?;
        Ok(ShortExactSequence { inj, surj })
    }

    pub fn left(&self) -> &FgAbGroup {
        self.inj.source()
    }

    pub fn middle(&self) -> &FgAbGroup {
        self.inj.target()
    }

    pub fn right(&self) -> &FgAbGroup {
        self.surj.target()
    }

    pub fn inj(&self) -> &GroupHom {
        &self.inj
    }

    pub fn surj(&self) -> &GroupHom {
        &self.surj
    }
}

/// Two short exact rows joined by vertical maps `a`, `b`, `c`.
#[derive(Clone, Debug)]
pub struct SesLadder {
    top: ShortExactSequence,
    bottom: ShortExactSequence,
    a: GroupHom,
    b: GroupHom,
    c: GroupHom,
}

impl SesLadder {
    pub fn new(
        top: ShortExactSequence,
        bottom: ShortExactSequence,
        a: GroupHom,
        b: GroupHom,
        c: GroupHom,
    ) -> Result<Self> {
        let ends = [
            (&a, top.left(), bottom.left(), "left"),
            (&b, top.middle(), bottom.middle(), "middle"),
            (&c, top.right(), bottom.right(), "right"),
        ];
        for (m, s, t, name) in ends {
            if m.source() != s || m.target() != t {
                return Err(Error::MismatchedGroups(format!(
                    "{name} vertical map does not join the rows"
                )));
            }
            m.ensure_well_defined()?;
        }
        if !compose(&b, top.inj())?.equals(&compose(bottom.inj(), &a)?) {
            return Err(Error::Precondition("left square does not commute".into()));
        }
        if !compose(&c, top.surj())?.equals(&compose(bottom.surj(), &b)?) {
            return Err(Error::Precondition("right square does not commute".into()));
        }
        Ok(SesLadder {
            top,
            bottom,
            a,
            b,
            c,
        })
    }

    pub fn top(&self) -> &ShortExactSequence {
        &self.top
    }

    pub fn bottom(&self) -> &ShortExactSequence {
        &self.bottom
    }
}

/// `0 -> G0 -> G1 -> ... -> G5 -> 0` with five maps.
#[derive(Clone, Debug)]
pub struct SixTermSequence {
    pub groups: Vec<FgAbGroup>,
    pub maps: Vec<GroupHom>,
}

impl SixTermSequence {
    pub fn check_exact(&self) -> Result<()> {
        if !self.maps[0].is_injective()? {
            return Err(Error::NotExact("six-term sequence: first map not injective".into()));
        }
        if !self.maps[4].is_surjective()? {
            return Err(Error::NotExact("six-term sequence: last map not surjective".into()));
        }
        for i in 0..4 {
            if !compose(&self.maps[i + 1], &self.maps[i])?.is_zero() {
                return Err(Error::NotExact(format!(
                    "six-term sequence: composite at node {} is nonzero",
                    i + 1
                )));
            }
            check_exact_at(&self.maps[i], &self.maps[i + 1], &format!("node {}", i + 1))?;
        }
        Ok(())
    }

    pub fn is_exact(&self) -> bool {
        self.check_exact().is_ok()
    }
}

#[derive(Clone, Debug)]
pub struct SnakeOutput {
    /// `ker c -> coker a`.
    pub connecting: GroupHom,
    /// `ker a, ker b, ker c, coker a, coker b, coker c`.
    pub sequence: SixTermSequence,
}

pub fn snake(ladder: &SesLadder) -> Result<SnakeOutput> {
    let (top, bottom) = (&ladder.top, &ladder.bottom);
    let ka = kernel_subquotient(&ladder.a)?;
    let kb = kernel_subquotient(&ladder.b)?;
    let kc = kernel_subquotient(&ladder.c)?;
    let ca = cokernel_subquotient(&ladder.a)?;
    let cb = cokernel_subquotient(&ladder.b)?;
    let cc = cokernel_subquotient(&ladder.c)?;

    let lift = ModularSolver::new(top.surj().matrix(), top.right().relations())?;
    let pull = ModularSolver::new(bottom.inj().matrix(), bottom.middle().relations())?;
    let reps = kc.representatives();
    let mut cols = Vec::with_capacity(reps.cols());
    for j in 0..reps.cols() {
        let x = reps.column(j);
        let y = lift
            .solve(&x)?
            .ok_or_else(|| Error::ChaseFailure(format!("cannot lift {x:?} along the top surjection")))?;
        let by = ladder.b.apply(&y)?;
        let z = pull.solve(&by)?.ok_or_else(|| {
            Error::ChaseFailure(format!("{by:?} is not in the image of the bottom injection"))
        })?;
        cols.push(ca.coordinates(&z)?);
    }
    let connecting = GroupHom::new(
        kc.group().clone(),
        ca.group().clone(),
        IntMatrix::from_columns(ca.group().gens(), &cols)?,
    )
    .map_err(|e| Error::ChaseFailure(format!("connecting map: {e}")))?;

    let maps = vec![
        induced_hom(top.inj(), &ka, &kb)?,
        induced_hom(top.surj(), &kb, &kc)?,
        connecting.clone(),
        induced_hom(bottom.inj(), &ca, &cb)?,
        induced_hom(bottom.surj(), &cb, &cc)?,
    ];
    let groups = [&ka, &kb, &kc, &ca, &cb, &cc]
        .iter()
        .map(|s| s.group().clone())
        .collect();
    Ok(SnakeOutput {
        connecting,
        sequence: SixTermSequence { groups, maps },
    })
}

/// A bigraded hom of fixed bidegree, stored by source position. Missing
/// positions are zero maps.
#[derive(Clone, Debug)]
pub struct GradedHom {
    pub degree: Bidegree,
    pub maps: BTreeMap<Bidegree, GroupHom>,
}

impl GradedHom {
    pub fn new(degree: Bidegree) -> Self {
        GradedHom {
            degree,
            maps: BTreeMap::new(),
        }
    }

    pub fn with(mut self, at: Bidegree, map: GroupHom) -> Self {
        self.maps.insert(at, map);
        self
    }
}

/// `A --f--> A --g--> B --h--> A`, exact at every position.
#[derive(Clone, Debug)]
pub struct ExactCouple {
    a: BTreeMap<Bidegree, FgAbGroup>,
    b: BTreeMap<Bidegree, FgAbGroup>,
    f: GradedHom,
    g: GradedHom,
    h: GradedHom,
}

impl ExactCouple {
    pub fn new(
        a: BTreeMap<Bidegree, FgAbGroup>,
        b: BTreeMap<Bidegree, FgAbGroup>,
        f: GradedHom,
        g: GradedHom,
        h: GradedHom,
    ) -> Result<Self> {
        let couple = ExactCouple { a, b, f, g, h };
        couple.check_maps()?;
        couple.check_exact()?;
        Ok(couple)
    }

    fn check_maps(&self) -> Result<()> {
        let checks: [(&GradedHom, &BTreeMap<_, _>, &BTreeMap<_, _>, &str); 3] = [
            (&self.f, &self.a, &self.a, "f"),
            (&self.g, &self.a, &self.b, "g"),
            (&self.h, &self.b, &self.a, "h"),
        ];
        for (hom, src, tgt, name) in checks {
            for (&x, m) in &hom.maps {
                let y = shift(x, hom.degree);
                if m.source() != &group_at(src, &x) || m.target() != &group_at(tgt, &y) {
                    return Err(Error::MismatchedGroups(format!(
                        "{name} at {x:?} does not run between the groups at {x:?} and {y:?}"
                    )));
                }
                m.ensure_well_defined()?;
            }
        }
        Ok(())
    }

    fn check_exact(&self) -> Result<()> {
        for &x in self.a.keys() {
            check_exact_at(
                &self.f_at(unshift(x, self.f.degree)),
                &self.g_at(x),
                &format!("A{x:?} between f and g"),
            )?;
            check_exact_at(
                &self.h_at(unshift(x, self.h.degree)),
                &self.f_at(x),
                &format!("A{x:?} between h and f"),
            )?;
        }
        for &y in self.b.keys() {
            check_exact_at(
                &self.g_at(unshift(y, self.g.degree)),
                &self.h_at(y),
                &format!("B{y:?} between g and h"),
            )?;
        }
        Ok(())
    }

    pub fn a(&self, x: Bidegree) -> FgAbGroup {
        group_at(&self.a, &x)
    }

    pub fn b(&self, y: Bidegree) -> FgAbGroup {
        group_at(&self.b, &y)
    }

    pub fn a_positions(&self) -> impl Iterator<Item = Bidegree> + '_ {
        self.a.keys().copied()
    }

    pub fn b_positions(&self) -> impl Iterator<Item = Bidegree> + '_ {
        self.b.keys().copied()
    }

    /// Bidegrees of `f`, `g`, `h`.
    pub fn degrees(&self) -> (Bidegree, Bidegree, Bidegree) {
        (self.f.degree, self.g.degree, self.h.degree)
    }

    fn map_at(
        hom: &GradedHom,
        x: Bidegree,
        src: &BTreeMap<Bidegree, FgAbGroup>,
        tgt: &BTreeMap<Bidegree, FgAbGroup>,
    ) -> GroupHom {
        hom.maps.get(&x).cloned().unwrap_or_else(|| {
            GroupHom::zero(&group_at(src, &x), &group_at(tgt, &shift(x, hom.degree)))
        })
    }

    pub fn f_at(&self, x: Bidegree) -> GroupHom {
        Self::map_at(&self.f, x, &self.a, &self.a)
    }

    pub fn g_at(&self, x: Bidegree) -> GroupHom {
        Self::map_at(&self.g, x, &self.a, &self.b)
    }

    pub fn h_at(&self, y: Bidegree) -> GroupHom {
        Self::map_at(&self.h, y, &self.b, &self.a)
    }

    /// The page differential `g ∘ h` leaving `B(y)`.
    pub fn d_at(&self, y: Bidegree) -> Result<GroupHom> {
        compose(&self.g_at(shift(y, self.h.degree)), &self.h_at(y))
    }

    fn derived_a(&self, x: Bidegree) -> Result<Subquotient> {
        let f_in = self.f_at(unshift(x, self.f.degree));
        subquotient(&image(&f_in)?, &self.a(x).zero_subgroup())
    }

    fn derived_b(&self, y: Bidegree) -> Result<Subquotient> {
        let d_deg = shift(self.h.degree, self.g.degree);
        let cycles = kernel_subgroup(&self.d_at(y)?)?;
        let boundaries = image(&self.d_at(unshift(y, d_deg))?)?;
        subquotient(&cycles, &boundaries)
    }
}

/// The derived couple: `A' = im f`, `B' = ker(gh) / im(gh)`.
pub fn derive_couple(c: &ExactCouple) -> Result<ExactCouple> {
    let (df, dg, dh) = c.degrees();
    let mut sa = BTreeMap::new();
    for x in c.a_positions() {
        sa.insert(x, c.derived_a(x)?);
    }
    let mut sb = BTreeMap::new();
    for y in c.b_positions() {
        sb.insert(y, c.derived_b(y)?);
    }
    let sa_at = |x: Bidegree| -> Result<Subquotient> {
        match sa.get(&x) {
            Some(s) => Ok(s.clone()),
            None => c.derived_a(x),
        }
    };
    let sb_at = |y: Bidegree| -> Result<Subquotient> {
        match sb.get(&y) {
            Some(s) => Ok(s.clone()),
            None => c.derived_b(y),
        }
    };

    let mut f2 = GradedHom::new(df);
    let mut g2 = GradedHom::new((dg.0 - df.0, dg.1 - df.1));
    let mut h2 = GradedHom::new(dh);
    for (&x, src) in &sa {
        f2.maps
            .insert(x, induced_hom(&c.f_at(x), src, &sa_at(shift(x, df))?)?);

        // g'(f(a)) = [g(a)]
        let pre = unshift(x, df);
        let f_in = c.f_at(pre);
        let g_pre = c.g_at(pre);
        let tgt = sb_at(shift(pre, dg))?;
        let solver = ModularSolver::new(f_in.matrix(), c.a(x).relations())?;
        let reps = src.representatives();
        let mut cols = Vec::with_capacity(reps.cols());
        for j in 0..reps.cols() {
            let preimage = solver.solve(&reps.column(j))?.ok_or_else(|| {
                Error::ChaseFailure(format!("derived couple: no f-preimage at {x:?}"))
            })?;
            cols.push(tgt.coordinates(&g_pre.apply(&preimage)?)?);
        }
        let m = IntMatrix::from_columns(tgt.group().gens(), &cols)?;
        let g_new = GroupHom::new(src.group().clone(), tgt.group().clone(), m)
            .map_err(|e| Error::ChaseFailure(format!("derived couple g' at {x:?}: {e}")))?;
        g2.maps.insert(x, g_new);
    }
    for (&y, src) in &sb {
        h2.maps
            .insert(y, induced_hom(&c.h_at(y), src, &sa_at(shift(y, dh))?)?);
    }
    let a2 = sa.iter().map(|(&x, s)| (x, s.group().clone())).collect();
    let b2 = sb.iter().map(|(&y, s)| (y, s.group().clone())).collect();
    ExactCouple::new(a2, b2, f2, g2, h2)
}

pub const DEFAULT_EXTENSION_BOUND: u64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resolution {
    Determined(FgAbGroup),
    /// `candidates` is empty when the group is too large to enumerate.
    Ambiguous {
        rank: usize,
        candidates: Vec<Invariants>,
    },
}

/// An extension `0 -> sub -> ? -> quot -> 0` and what can be said about it.
#[derive(Clone, Debug)]
pub struct ExtensionReport {
    pub sub: FgAbGroup,
    pub quot: FgAbGroup,
    pub resolution: Resolution,
}

impl ExtensionReport {
    pub fn is_determined(&self) -> bool {
        matches!(self.resolution, Resolution::Determined(_))
    }

    pub fn determined(&self) -> Option<&FgAbGroup> {
        match &self.resolution {
            Resolution::Determined(g) => Some(g),
            Resolution::Ambiguous { .. } => None,
        }
    }

    pub fn rank(&self) -> usize {
        match &self.resolution {
            Resolution::Determined(g) => g.rank(),
            Resolution::Ambiguous { rank, .. } => *rank,
        }
    }

    /// Every isomorphism type still possible; empty if unknown.
    pub fn candidates(&self) -> Vec<Invariants> {
        match &self.resolution {
            Resolution::Determined(g) => vec![g.invariants().clone()],
            Resolution::Ambiguous { candidates, .. } => candidates.clone(),
        }
    }
}

fn sum_invariants(a: &Invariants, b: &Invariants) -> Invariants {
    let orders: Vec<BigInt> = a.torsion.iter().chain(&b.torsion).cloned().collect();
    FgAbGroup::from_orders(a.rank + b.rank, &orders)
        .invariants()
        .clone()
}

fn torsion_order_u64(inv: &Invariants) -> Option<u64> {
    inv.torsion_order().to_u64()
}

/// Possible middle terms, or `None` if they cannot be enumerated.
fn extension_candidates(sub: &Invariants, quot: &Invariants, bound: u64) -> Option<Vec<Invariants>> {
    if quot.is_free() || sub.is_trivial() {
        return Some(vec![sum_invariants(sub, quot)]);
    }
    if !sub.is_finite() {
        return None;
    }
    // the free part of the quotient always splits off
    let quot_torsion = Invariants {
        rank: 0,
        torsion: quot.torsion.clone(),
    };
    let (s, q) = (torsion_order_u64(sub)?, torsion_order_u64(&quot_torsion)?);
    let order = s.checked_mul(q)?;
    if order > bound {
        return None;
    }
    let mut out: Vec<Invariants> = groups_of_order(order)
        .into_iter()
        .filter(|g| has_extension_shape(g, sub, &quot_torsion))
        .map(|mut g| {
            g.rank = quot.rank;
            g
        })
        .collect();
    out.sort();
    Some(out)
}

fn resolve(rank: usize, candidates: Option<Vec<Invariants>>) -> Resolution {
    match candidates {
        Some(c) if c.len() == 1 => Resolution::Determined(FgAbGroup::from_invariants(&c[0])),
        Some(c) => Resolution::Ambiguous {
            rank,
            candidates: c,
        },
        None => Resolution::Ambiguous {
            rank,
            candidates: Vec::new(),
        },
    }
}

pub fn assemble_extension(sub: &FgAbGroup, quot: &FgAbGroup) -> ExtensionReport {
    assemble_extension_bounded(sub, quot, DEFAULT_EXTENSION_BOUND)
}

/// Like [`assemble_extension`], enumerating candidates only when the finite
/// part has order at most `bound`.
pub fn assemble_extension_bounded(sub: &FgAbGroup, quot: &FgAbGroup, bound: u64) -> ExtensionReport {
    let cands = extension_candidates(sub.invariants(), quot.invariants(), bound);
    ExtensionReport {
        sub: sub.clone(),
        quot: quot.clone(),
        resolution: resolve(sub.rank() + quot.rank(), cands),
    }
}

/// Assembles a filtered group from its successive quotients, deepest piece
/// first. In the report, `quot` is the outermost piece and `sub` everything
/// beneath it (their direct sum when that part is itself ambiguous).
pub fn assemble_filtration(pieces: &[FgAbGroup]) -> ExtensionReport {
    assemble_filtration_bounded(pieces, DEFAULT_EXTENSION_BOUND)
}

pub fn assemble_filtration_bounded(pieces: &[FgAbGroup], bound: u64) -> ExtensionReport {
    let Some((outer, inner)) = pieces.split_last() else {
        return assemble_extension_bounded(&FgAbGroup::trivial(), &FgAbGroup::trivial(), bound);
    };
    let mut acc: Option<BTreeSet<Invariants>> = Some(BTreeSet::from([Invariants::default()]));
    for piece in inner {
        acc = step_candidates(acc, piece.invariants(), bound);
    }
    let sub = match &acc {
        Some(set) if set.len() == 1 => FgAbGroup::from_invariants(set.iter().next().expect("one")),
        _ => {
            let orders: Vec<BigInt> = inner.iter().flat_map(|g| g.torsion().to_vec()).collect();
            let rank = inner.iter().map(FgAbGroup::rank).sum();
            FgAbGroup::from_invariants(FgAbGroup::from_orders(rank, &orders).invariants())
        }
    };
    let acc = step_candidates(acc, outer.invariants(), bound);
    let rank = pieces.iter().map(FgAbGroup::rank).sum();
    ExtensionReport {
        sub,
        quot: outer.clone(),
        resolution: resolve(rank, acc.map(|s| s.into_iter().collect())),
    }
}

fn step_candidates(
    acc: Option<BTreeSet<Invariants>>,
    piece: &Invariants,
    bound: u64,
) -> Option<BTreeSet<Invariants>> {
    let mut next = BTreeSet::new();
    for c in acc? {
        next.extend(extension_candidates(&c, piece, bound)?);
    }
    Some(next)
}

/// Splits the cyclic Pimsner–Voiculescu-type sequence given `a0 = K0(α) − id`
/// and `a1 = K1(α) − id` into `0 -> coker a_q -> K_q -> ker a_{q+1} -> 0`.
pub fn six_term_solve(a0: &GroupHom, a1: &GroupHom) -> Result<(ExtensionReport, ExtensionReport)> {
    six_term_solve_bounded(a0, a1, DEFAULT_EXTENSION_BOUND)
}

pub fn six_term_solve_bounded(
    a0: &GroupHom,
    a1: &GroupHom,
    bound: u64,
) -> Result<(ExtensionReport, ExtensionReport)> {
    for (a, name) in [(a0, "a0"), (a1, "a1")] {
        a.ensure_well_defined()?;
        if !a.is_endomorphism() {
            return Err(Error::MismatchedGroups(format!("{name} must be an endomorphism")));
        }
    }
    let coker0 = cokernel_subquotient(a0)?.group().clone();
    let coker1 = cokernel_subquotient(a1)?.group().clone();
    let ker0 = kernel_subquotient(a0)?.group().clone();
    let ker1 = kernel_subquotient(a1)?.group().clone();
    Ok((
        assemble_extension_bounded(&coker0, &ker1, bound),
        assemble_extension_bounded(&coker1, &ker0, bound),
    ))
}

fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every abelian group of order `n`, as invariants.
fn groups_of_order(n: u64) -> Vec<Invariants> {
    let mut acc: Vec<Vec<BigInt>> = vec![Vec::new()];
    for (p, e) in prime_factors(n) {
        let mut next = Vec::new();
        for orders in &acc {
            for part in partitions(e, e) {
                let mut o = orders.clone();
                o.extend(part.iter().map(|&k| BigInt::from(p.pow(k))));
                next.push(o);
            }
        }
        acc = next;
    }
    acc.iter()
        .map(|o| FgAbGroup::from_orders(0, o).invariants().clone())
        .collect()
}

/// Exponent partition of the `p`-primary part, largest first.
fn p_type(inv: &Invariants, p: u64) -> Vec<u32> {
    let p = BigInt::from(p);
    let mut out: Vec<u32> = inv
        .torsion
        .iter()
        .map(|t| {
            let mut t = t.clone();
            let mut e = 0;
            while (&t % &p).is_zero() {
                t /= &p;
                e += 1;
            }
            e
        })
        .filter(|&e| e > 0)
        .collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// Whether the Littlewood-Richardson coefficient `c^lam_{mu,nu}` is nonzero,
/// i.e. whether some semistandard filling of `lam / mu` with content `nu`
/// has a lattice reverse reading word. For abelian p-groups this decides
/// whether a group of type `lam` has a subgroup of type `mu` with quotient
/// of type `nu`.
fn lr_nonzero(lam: &[u32], mu: &[u32], nu: &[u32]) -> bool {
    let rows = lam.len();
    let at = |v: &[u32], i: usize| v.get(i).copied().unwrap_or(0) as usize;
    if mu.len() > rows || (0..rows).any(|i| at(mu, i) > at(lam, i)) {
        return false;
    }
    let total: usize = lam.iter().map(|&x| x as usize).sum();
    let inner: usize = mu.iter().map(|&x| x as usize).sum();
    let content: usize = nu.iter().map(|&x| x as usize).sum();
    if total != inner + content {
        return false;
    }
    // cells in reverse reading order: top to bottom, right to left
    let cells: Vec<(usize, usize)> = (0..rows)
        .flat_map(|r| (at(mu, r)..at(lam, r)).rev().map(move |c| (r, c)))
        .collect();
    let width = at(lam, 0);
    let mut grid = vec![vec![0usize; width]; rows];
    let mut count = vec![0usize; nu.len() + 1];
    fn place(
        k: usize,
        cells: &[(usize, usize)],
        grid: &mut Vec<Vec<usize>>,
        count: &mut Vec<usize>,
        mu: &dyn Fn(usize) -> usize,
        lam: &dyn Fn(usize) -> usize,
        nu: &[u32],
    ) -> bool {
        let Some(&(r, c)) = cells.get(k) else {
            return true;
        };
        for v in 1..=nu.len() {
            if count[v] == nu[v - 1] as usize || (v > 1 && count[v] == count[v - 1]) {
                continue;
            }
            if c + 1 < lam(r) && grid[r][c + 1] < v {
                continue;
            }
            if r > 0 && c >= mu(r - 1) && grid[r - 1][c] >= v {
                continue;
            }
            grid[r][c] = v;
            count[v] += 1;
            if place(k + 1, cells, grid, count, mu, lam, nu) {
                return true;
            }
            count[v] -= 1;
            grid[r][c] = 0;
        }
        false
    }
    place(
        0,
        &cells,
        &mut grid,
        &mut count,
        &|i| at(mu, i),
        &|i| at(lam, i),
        nu,
    )
}

/// Whether a finite group with invariants `g` is an extension of `quot` by
/// `sub`, checked one prime at a time.
fn has_extension_shape(g: &Invariants, sub: &Invariants, quot: &Invariants) -> bool {
    let order = torsion_order_u64(g).expect("small");
    prime_factors(order)
        .iter()
        .all(|&(p, _)| lr_nonzero(&p_type(g, p), &p_type(sub, p), &p_type(quot, p)))
}
