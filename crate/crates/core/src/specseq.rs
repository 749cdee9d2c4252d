//! The spectral sequence of a Z^n-action on K-theory data: exterior-index
//! combinatorics, the E1 page with its Pimsner–Voiculescu differential, E2 as
//! group cohomology, d2 from supplied data, iteration to collapse at
//! E_{n+1}, and assembly of the crossed-product K-groups.
//!
//! K-degrees are kept mod 2, so every page has the two rows q = 0 and q = 1.
//! The E1 cell (p, q) is K_q^{⊕C(n,p)}, one summand per p-tuple in
//! lexicographic order.

use std::collections::BTreeMap;
use std::fmt;

use crate::abgrp::{
    compose, direct_sum, induced_hom, kernel_subgroup, subquotient, FgAbGroup, GroupHom,
    Subgroup, Subquotient,
};
use crate::error::{Error, Result};
use crate::homalg::{
    assemble_filtration_bounded, cohomology_at, six_term_solve_bounded, CochainComplex,
    ExtensionReport, DEFAULT_EXTENSION_BOUND,
};
use crate::intmat::{image_basis, IntMatrix};

/// A strictly increasing tuple `μ = (μ_1 < ... < μ_k)` of values in `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TupleIndex {
    n: usize,
    entries: Vec<usize>,
}

impl TupleIndex {
    pub fn new(n: usize, entries: Vec<usize>) -> Result<Self> {
        if entries.iter().any(|&e| e == 0 || e > n) {
            return Err(Error::Precondition(format!(
                "tuple {entries:?} has entries outside 1..={n}"
            )));
        }
        if entries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition(format!(
                "tuple {entries:?} is not strictly increasing"
            )));
        }
        Ok(TupleIndex { n, entries })
    }

    pub fn empty(n: usize) -> Self {
        TupleIndex {
            n,
            entries: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.entries.binary_search(&k).is_ok()
    }

    /// The sorted union, or `None` if the tuples meet.
    pub fn merge(&self, other: &TupleIndex) -> Option<TupleIndex> {
        if self.entries.iter().any(|&e| other.contains(e)) {
            return None;
        }
        let mut entries: Vec<usize> = self.entries.iter().chain(&other.entries).copied().collect();
        entries.sort_unstable();
        Some(TupleIndex { n: self.n, entries })
    }

    /// The tuple with the `i`-th entry (0-based) removed.
    pub fn without(&self, i: usize) -> TupleIndex {
        let mut entries = self.entries.clone();
        entries.remove(i);
        TupleIndex { n: self.n, entries }
    }

    /// Position within [`tuples`]`(self.len(), n)`.
    pub fn rank_in_order(&self) -> usize {
        let k = self.len();
        let mut pos = 0;
        let mut prev = 0;
        for (i, &e) in self.entries.iter().enumerate() {
            for skipped in prev + 1..e {
                pos += binomial(self.n - skipped, k - i - 1);
            }
            prev = e;
        }
        pos
    }
}

impl fmt::Display for TupleIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `T(k, n)` in lexicographic order.
pub fn tuples(k: usize, n: usize) -> Vec<TupleIndex> {
    fn go(start: usize, k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<TupleIndex>) {
        if cur.len() == k {
            out.push(TupleIndex {
                n,
                entries: cur.clone(),
            });
            return;
        }
        for e in start..=n {
            cur.push(e);
            go(e + 1, k, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    go(1, k, n, &mut Vec::new(), &mut out);
    out
}

pub fn complement(mu: &TupleIndex) -> TupleIndex {
    TupleIndex {
        n: mu.n,
        entries: (1..=mu.n).filter(|&e| !mu.contains(e)).collect(),
    }
}

/// The sign `s` with `e_μ ∧ e_λ = s · e_{μ ∪ λ}`; zero when the tuples meet.
pub fn wedge_sign(mu: &TupleIndex, lam: &TupleIndex) -> i64 {
    if mu.entries.iter().any(|&e| lam.contains(e)) {
        return 0;
    }
    let inversions: usize = mu
        .entries
        .iter()
        .map(|&a| lam.entries.iter().filter(|&&b| b < a).count())
        .sum();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Second-page differential data.
#[derive(Clone, Debug)]
pub enum D2Data {
    /// For K-trivial actions: per pair `μ ∈ T(2,n)`, the maps
    /// `[δ_{μ,0}: K0 -> K1, δ_{μ,1}: K1 -> K0]`.
    PairwiseKTrivial(BTreeMap<TupleIndex, [GroupHom; 2]>),
    /// For n = 2: ambient maps `[δ_0: K0 -> K1, δ_1: K1 -> K0]`, restricted to
    /// E2^{0,q} and projected onto E2^{2,q-1}.
    AmbientN2([GroupHom; 2]),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SpecFlags {
    pub k_trivial: bool,
    pub pointwise_inner: bool,
    pub assume_higher_vanish: bool,
}

/// K-theoretic data of a Z^n-action: the groups K0, K1, the commuting
/// automorphisms induced by the n generators, and optional d2 data.
#[derive(Clone, Debug)]
pub struct ActionSpec {
    n: usize,
    k: [FgAbGroup; 2],
    action: [Vec<GroupHom>; 2],
    d2: Option<D2Data>,
    flags: SpecFlags,
    names: [Vec<String>; 2],
}

fn default_names(prefix: &str, g: &FgAbGroup) -> Vec<String> {
    (0..g.gens()).map(|i| format!("{prefix}{}", i + 1)).collect()
}

impl ActionSpec {
    pub fn new(
        n: usize,
        k0: FgAbGroup,
        k1: FgAbGroup,
        action0: Vec<GroupHom>,
        action1: Vec<GroupHom>,
    ) -> Result<Self> {
        let names = [default_names("a", &k0), default_names("b", &k1)];
        let spec = ActionSpec {
            n,
            k: [k0, k1],
            action: [action0, action1],
            d2: None,
            flags: SpecFlags::default(),
            names,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Every generator acts as the identity on both K-groups.
    pub fn trivial(n: usize, k0: FgAbGroup, k1: FgAbGroup) -> Self {
        let a0 = vec![GroupHom::identity(&k0); n];
        let a1 = vec![GroupHom::identity(&k1); n];
        let mut spec = Self::new(n, k0, k1, a0, a1).expect("identity actions are valid");
        spec.flags.k_trivial = true;
        spec
    }

    pub fn with_d2(mut self, d2: D2Data) -> Result<Self> {
        self.d2 = Some(d2);
        self.validate()?;
        Ok(self)
    }

    pub fn with_flags(mut self, flags: SpecFlags) -> Result<Self> {
        self.flags = flags;
        self.validate()?;
        Ok(self)
    }

    pub fn with_names(mut self, names0: Vec<String>, names1: Vec<String>) -> Result<Self> {
        self.names = [names0, names1];
        self.validate()?;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self, q: u8) -> &FgAbGroup {
        &self.k[q as usize]
    }

    /// The maps induced on `K_q` by the generators, in order.
    pub fn action(&self, q: u8) -> &[GroupHom] {
        &self.action[q as usize]
    }

    pub fn d2(&self) -> Option<&D2Data> {
        self.d2.as_ref()
    }

    pub fn flags(&self) -> SpecFlags {
        self.flags
    }

    pub fn names(&self, q: u8) -> &[String] {
        &self.names[q as usize]
    }

    /// Whether every action map is the identity (regardless of the flag).
    pub fn acts_trivially(&self) -> bool {
        (0..2u8).all(|q| {
            self.action(q)
                .iter()
                .all(|a| a.equals(&GroupHom::identity(self.k(q))))
        })
    }

    fn validate(&self) -> Result<()> {
        for q in 0..2u8 {
            let g = self.k(q);
            let acts = self.action(q);
            if acts.len() != self.n {
                return Err(Error::InvalidSpec(format!(
                    "K{q} carries {} action maps, expected {}",
                    acts.len(),
                    self.n
                )));
            }
            for (i, a) in acts.iter().enumerate() {
                if a.source() != g || a.target() != g {
                    return Err(Error::InvalidSpec(format!(
                        "action of generator {} on K{q} is not an endomorphism of K{q}",
                        i + 1
                    )));
                }
                a.ensure_well_defined().map_err(|e| {
                    Error::InvalidSpec(format!("action of generator {} on K{q}: {e}", i + 1))
                })?;
            }
            for i in 0..acts.len() {
                for j in i + 1..acts.len() {
                    if !compose(&acts[i], &acts[j])?.equals(&compose(&acts[j], &acts[i])?) {
                        return Err(Error::InvalidSpec(format!(
                            "actions of generators {} and {} on K{q} do not commute",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
            if self.names(q).len() != g.gens() {
                return Err(Error::InvalidSpec(format!(
                    "K{q} has {} generators but {} names",
                    g.gens(),
                    self.names(q).len()
                )));
            }
        }
        if self.flags.k_trivial && !self.acts_trivially() {
            return Err(Error::InvalidSpec(
                "k_trivial is set but some action map is not the identity".into(),
            ));
        }
        match &self.d2 {
            None => {}
            Some(D2Data::AmbientN2(deltas)) => {
                if self.n != 2 {
                    return Err(Error::InvalidSpec(format!(
                        "ambient d2 data needs n = 2, found n = {}",
                        self.n
                    )));
                }
                self.check_delta_pair(deltas, "ambient d2")?;
            }
            Some(D2Data::PairwiseKTrivial(pairs)) => {
                if !self.flags.k_trivial {
                    return Err(Error::InvalidSpec(
                        "pairwise d2 data requires the k_trivial flag".into(),
                    ));
                }
                for (mu, deltas) in pairs {
                    if mu.n() != self.n || mu.len() != 2 {
                        return Err(Error::InvalidSpec(format!(
                            "d2 index {mu} is not a pair in 1..={}",
                            self.n
                        )));
                    }
                    self.check_delta_pair(deltas, &format!("d2 for {mu}"))?;
                }
            }
        }
        Ok(())
    }

    fn check_delta_pair(&self, deltas: &[GroupHom; 2], what: &str) -> Result<()> {
        for q in 0..2u8 {
            let d = &deltas[q as usize];
            if d.source() != self.k(q) || d.target() != self.k(1 - q) {
                return Err(Error::InvalidSpec(format!(
                    "{what}: δ_{q} must run from K{q} to K{}",
                    1 - q
                )));
            }
            d.ensure_well_defined()
                .map_err(|e| Error::InvalidSpec(format!("{what}: δ_{q}: {e}")))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Treat pointwise-inner violations as errors instead of warnings.
    pub strict: bool,
    /// Largest finite order for which extension candidates are enumerated.
    pub extension_bound: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            strict: false,
            extension_bound: DEFAULT_EXTENSION_BOUND,
        }
    }
}

pub type Cell = (usize, u8);

fn flip(q: u8, k: usize) -> u8 {
    // q - k + 1 mod 2
    ((q as usize + k + 1) % 2) as u8
}

/// One page `E_k`: a subquotient of the E1 ambient at every cell and the
/// differential `d_k` of bidegree `(k, 1 - k)` wherever its target exists.
#[derive(Clone, Debug)]
pub struct BigradedPage {
    k: usize,
    n: usize,
    cells: BTreeMap<Cell, Subquotient>,
    differentials: BTreeMap<Cell, GroupHom>,
    is_infinity: bool,
}

impl BigradedPage {
    pub fn page_number(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_infinity(&self) -> bool {
        self.is_infinity
    }

    pub fn cell(&self, p: usize, q: u8) -> &Subquotient {
        &self.cells[&(p, q)]
    }

    pub fn group(&self, p: usize, q: u8) -> &FgAbGroup {
        self.cell(p, q).group()
    }

    pub fn cells(&self) -> impl Iterator<Item = (Cell, &Subquotient)> {
        self.cells.iter().map(|(&c, s)| (c, s))
    }

    /// The target cell of `d_k` out of `(p, q)`, if it lies on the page.
    pub fn target_of(&self, p: usize, q: u8) -> Option<Cell> {
        (p + self.k <= self.n).then(|| (p + self.k, flip(q, self.k)))
    }

    pub fn differential(&self, p: usize, q: u8) -> Option<&GroupHom> {
        self.differentials.get(&(p, q))
    }

    pub fn differentials(&self) -> impl Iterator<Item = (Cell, &GroupHom)> {
        self.differentials.iter().map(|(&c, d)| (c, d))
    }

    /// The differential arriving at `(p, q)`, if any.
    fn incoming(&self, p: usize, q: u8) -> Option<&GroupHom> {
        let src_p = p.checked_sub(self.k)?;
        // source row s satisfies s - k + 1 ≡ q
        let src_q = ((q as usize + self.k + 1) % 2) as u8;
        self.differentials.get(&(src_p, src_q))
    }

    /// Pairs of nonzero cells joined by `d_k`.
    fn live_pairs(&self) -> Vec<(Cell, Cell)> {
        self.cells
            .keys()
            .filter_map(|&(p, q)| {
                let t = self.target_of(p, q)?;
                let nonzero = !self.group(p, q).is_trivial() && !self.cells[&t].group().is_trivial();
                nonzero.then_some(((p, q), t))
            })
            .collect()
    }

    fn zero_differentials(&mut self) {
        let mut ds = BTreeMap::new();
        for &(p, q) in self.cells.keys() {
            if let Some(t) = self.target_of(p, q) {
                ds.insert((p, q), GroupHom::zero(self.group(p, q), self.cells[&t].group()));
            }
        }
        self.differentials = ds;
    }

    fn check_complex(&self) -> Result<()> {
        for (&(p, q), d) in &self.differentials {
            let Some(t) = self.target_of(p, q) else { continue };
            if let Some(next) = self.differentials.get(&t) {
                if !compose(next, d)?.is_zero() {
                    return Err(Error::InvalidSpec(format!(
                        "d{k} ∘ d{k} is nonzero starting at cell ({p},{q})",
                        k = self.k
                    )));
                }
            }
        }
        Ok(())
    }

    /// The next page as d_k-cohomology, without differentials attached.
    fn successor(&self) -> Result<BigradedPage> {
        let mut cells = BTreeMap::new();
        for (&(p, q), sq) in &self.cells {
            let amb = sq.ambient().clone();
            let reps = sq.representatives();
            let bnd = sq.boundaries().generators();
            let cycles = match self.differentials.get(&(p, q)) {
                Some(d) => {
                    let ker = kernel_subgroup(d)?;
                    reps.mul(ker.generators())?.hconcat(bnd)?
                }
                None => sq.cycles().generators().clone(),
            };
            let boundaries = match self.incoming(p, q) {
                Some(d) => bnd.hconcat(&reps.mul(d.matrix())?)?,
                None => bnd.clone(),
            };
            let z = Subgroup::new(amb.clone(), image_basis(&cycles))?;
            let b = Subgroup::new(amb, image_basis(&boundaries))?;
            cells.insert((p, q), subquotient(&z, &b)?);
        }
        Ok(BigradedPage {
            k: self.k + 1,
            n: self.n,
            cells,
            differentials: BTreeMap::new(),
            is_infinity: false,
        })
    }

    /// The next page computed with every differential taken to be zero.
    pub fn successor_with_zero_differentials(&self) -> Result<BigradedPage> {
        let mut page = self.clone();
        page.zero_differentials();
        let mut next = page.successor()?;
        next.zero_differentials();
        next.is_infinity = self.is_infinity;
        Ok(next)
    }

    /// Total Euler characteristic `Σ (-1)^(p+q) rank E(p,q)`.
    pub fn total_euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .map(|(&(p, q), s)| sign(p + q as usize) * s.group().rank() as i64)
            .sum()
    }

    /// Row sum `Σ_p (-1)^p rank E(p,q)` for fixed `q`.
    pub fn row_euler_characteristic(&self, q: u8) -> i64 {
        (0..=self.n)
            .map(|p| sign(p) * self.group(p, q).rank() as i64)
            .sum()
    }

    /// Sum of all cell ranks.
    pub fn total_rank(&self) -> usize {
        self.cells.values().map(|s| s.group().rank()).sum()
    }
}

fn sign(k: usize) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `Σ_p (-1)^p rank E(p, (parity - p) mod 2)`: the alternating rank sum along
/// one total-degree parity.
pub fn euler_characteristic(page: &BigradedPage, parity: u8) -> i64 {
    (0..=page.n)
        .map(|p| {
            let q = ((parity as usize + p) % 2) as u8;
            sign(p) * page.group(p, q).rank() as i64
        })
        .sum()
}

/// The E1 ambient group K_q^{⊕C(n,p)}.
pub fn e1_ambient(spec: &ActionSpec, p: usize, q: u8) -> FgAbGroup {
    let copies = vec![spec.k(q).clone(); binomial(spec.n, p)];
    direct_sum(&copies).group
}

/// Assembles a block hom between E1 ambients from `(target tuple, source
/// tuple, sign, block)` entries.
fn block_hom(
    src: FgAbGroup,
    tgt: FgAbGroup,
    src_block: usize,
    tgt_block: usize,
    blocks: impl IntoIterator<Item = (usize, usize, i64, IntMatrix)>,
) -> Result<GroupHom> {
    let mut m = IntMatrix::zeros(tgt.gens(), src.gens());
    for (row, col, s, block) in blocks {
        let scaled = block.scale(&s.into());
        let (r0, c0) = (row * tgt_block, col * src_block);
        for i in 0..block.rows() {
            for j in 0..block.cols() {
                m[(r0 + i, c0 + j)] += &scaled[(i, j)];
            }
        }
    }
    GroupHom::new(src, tgt, m)
}

/// `K_q(α_k) - id` as a matrix.
fn minus_identity(a: &GroupHom) -> IntMatrix {
    a.matrix()
        .sub(&IntMatrix::identity(a.source().gens()))
        .expect("endomorphism")
}

/// The PV differential `x ⊗ e_λ ↦ Σ_k (α_k - id)x ⊗ (e_λ ∧ e_k)` from
/// cell `(p, q)` to `(p + 1, q)` on E1 ambients.
pub fn pv_differential(spec: &ActionSpec, p: usize, q: u8) -> Result<GroupHom> {
    let n = spec.n;
    let g = spec.k(q).gens();
    let src = e1_ambient(spec, p, q);
    let tgt = e1_ambient(spec, p + 1, q);
    let mut blocks = Vec::new();
    if p < n {
        for lam in tuples(p, n) {
            for k in 1..=n {
                let single = TupleIndex {
                    n,
                    entries: vec![k],
                };
                let Some(nu) = lam.merge(&single) else { continue };
                blocks.push((
                    nu.rank_in_order(),
                    lam.rank_in_order(),
                    wedge_sign(&lam, &single),
                    minus_identity(&spec.action(q)[k - 1]),
                ));
            }
        }
    }
    block_hom(src, tgt, g, g, blocks)
}

/// The PV complex of one K-group: degrees `0..=n`.
fn pv_complex(n: usize, m: &FgAbGroup, action: &[GroupHom]) -> Result<CochainComplex> {
    let spec = ActionSpec::new(n, m.clone(), FgAbGroup::trivial(), action.to_vec(), vec![
        GroupHom::identity(&FgAbGroup::trivial());
        n
    ])?;
    let mut groups = BTreeMap::new();
    let mut ds = BTreeMap::new();
    for p in 0..=n {
        groups.insert(p as i32, e1_ambient(&spec, p, 0));
        if p < n {
            ds.insert(p as i32, pv_differential(&spec, p, 0)?);
        }
    }
    CochainComplex::new(groups, ds)
}

/// `H^p(Z^n; m)` for `p = 0..=n`, from the PV complex.
pub fn group_cohomology(n: usize, m: &FgAbGroup, action: &[GroupHom]) -> Result<Vec<FgAbGroup>> {
    let c = pv_complex(n, m, action)?;
    (0..=n as i32).map(|p| cohomology_at(&c, p)).collect()
}

/// `H^p(Z^n; m)` from `Hom(G_*, m)` for the Koszul resolution `G_*` of the
/// sequence `t_1 - 1, ..., t_n - 1`: the coboundary sends `φ` to
/// `e_ν ↦ Σ_{k=1}^{p+1} (-1)^k (t_{ν_k} - 1) φ(e_{ν∖ν_k})`.
pub fn koszul_cohomology(n: usize, m: &FgAbGroup, action: &[GroupHom]) -> Result<Vec<FgAbGroup>> {
    if action.len() != n {
        return Err(Error::InvalidSpec(format!(
            "{} action maps for n = {n}",
            action.len()
        )));
    }
    let g = m.gens();
    let cochains = |p: usize| direct_sum(&vec![m.clone(); binomial(n, p)]).group;
    let mut groups = BTreeMap::new();
    let mut ds = BTreeMap::new();
    for p in 0..=n {
        groups.insert(p as i32, cochains(p));
    }
    for p in 0..n {
        let src_tuples = tuples(p, n);
        let index: BTreeMap<&TupleIndex, usize> =
            src_tuples.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut blocks = Vec::new();
        for (row, nu) in tuples(p + 1, n).iter().enumerate() {
            for i in 0..nu.len() {
                let lam = nu.without(i);
                let s = if (i + 1) % 2 == 0 { 1 } else { -1 };
                let t = nu.entries()[i];
                blocks.push((row, index[&lam], s, minus_identity(&action[t - 1])));
            }
        }
        ds.insert(p as i32, block_hom(cochains(p), cochains(p + 1), g, g, blocks)?);
    }
    let c = CochainComplex::new(groups, ds)?;
    (0..=n as i32).map(|p| cohomology_at(&c, p)).collect()
}

/// The d2 ambient map out of cell `(p, q)` for pairwise K-trivial data.
fn pairwise_d2(
    spec: &ActionSpec,
    pairs: &BTreeMap<TupleIndex, [GroupHom; 2]>,
    p: usize,
    q: u8,
) -> Result<GroupHom> {
    let n = spec.n;
    let src = e1_ambient(spec, p, q);
    let tgt = e1_ambient(spec, p + 2, 1 - q);
    let mut blocks = Vec::new();
    for lam in tuples(p, n) {
        for (mu, deltas) in pairs {
            let Some(nu) = lam.merge(mu) else { continue };
            blocks.push((
                nu.rank_in_order(),
                lam.rank_in_order(),
                wedge_sign(&lam, mu),
                deltas[q as usize].matrix().clone(),
            ));
        }
    }
    block_hom(src, tgt, spec.k(q).gens(), spec.k(1 - q).gens(), blocks)
}

/// All pages `E_1 .. E_{n+1}` with diagnostics.
#[derive(Clone, Debug)]
pub struct SpectralSequence {
    pub pages: Vec<BigradedPage>,
    pub warnings: Vec<String>,
    /// Set when higher differentials were assumed to vanish.
    pub conditional: bool,
}

impl SpectralSequence {
    pub fn e_infinity(&self) -> &BigradedPage {
        self.pages.last().expect("at least one page")
    }

    pub fn page(&self, k: usize) -> Option<&BigradedPage> {
        self.pages.get(k.checked_sub(1)?)
    }
}

pub const CONDITIONAL_WARNING: &str = "conditional on vanishing higher differentials";

pub fn build_e1(spec: &ActionSpec) -> Result<BigradedPage> {
    let mut cells = BTreeMap::new();
    for p in 0..=spec.n {
        for q in 0..2u8 {
            let amb = e1_ambient(spec, p, q);
            cells.insert((p, q), subquotient(&amb.whole(), &amb.zero_subgroup())?);
        }
    }
    let mut page = BigradedPage {
        k: 1,
        n: spec.n,
        cells,
        differentials: BTreeMap::new(),
        is_infinity: spec.n == 0,
    };
    page.differentials = build_d1(spec, &page)?;
    page.check_complex()?;
    Ok(page)
}

/// Page 2 as d1-cohomology, without d2 attached.
pub fn build_e2(spec: &ActionSpec) -> Result<BigradedPage> {
    build_e1(spec)?.successor()
}

/// d1 on the E1 cells, induced from [`pv_differential`].
pub fn build_d1(spec: &ActionSpec, page1: &BigradedPage) -> Result<BTreeMap<Cell, GroupHom>> {
    let mut ds = BTreeMap::new();
    for p in 0..spec.n {
        for q in 0..2u8 {
            let amb = pv_differential(spec, p, q)?;
            ds.insert((p, q), induced_hom(&amb, page1.cell(p, q), page1.cell(p + 1, q))?);
        }
    }
    Ok(ds)
}

/// d2 on page 2, with the pointwise-inner check when that flag is set.
pub fn build_d2(
    spec: &ActionSpec,
    page2: &BigradedPage,
    opts: &RunOptions,
    warnings: &mut Vec<String>,
) -> Result<BTreeMap<Cell, GroupHom>> {
    let mut ds = BTreeMap::new();
    let live = page2.live_pairs();
    match spec.d2() {
        None => {
            if let Some(((p, q), (tp, tq))) = live.first() {
                return Err(Error::MissingD2(format!(
                    "E2 cells ({p},{q}) and ({tp},{tq}) are both nonzero but no d2 data was given"
                )));
            }
            for (&(p, q), _) in &page2.cells {
                if let Some(t) = page2.target_of(p, q) {
                    ds.insert((p, q), GroupHom::zero(page2.group(p, q), page2.group(t.0, t.1)));
                }
            }
        }
        Some(D2Data::AmbientN2(deltas)) => {
            for (&(p, q), _) in &page2.cells {
                let Some(t) = page2.target_of(p, q) else { continue };
                let d = if p == 0 {
                    induced_hom(&deltas[q as usize], page2.cell(p, q), page2.cell(t.0, t.1))?
                } else {
                    GroupHom::zero(page2.group(p, q), page2.group(t.0, t.1))
                };
                ds.insert((p, q), d);
            }
        }
        Some(D2Data::PairwiseKTrivial(pairs)) => {
            for (&(p, q), _) in &page2.cells {
                let Some(t) = page2.target_of(p, q) else { continue };
                let amb = pairwise_d2(spec, pairs, p, q)?;
                ds.insert((p, q), induced_hom(&amb, page2.cell(p, q), page2.cell(t.0, t.1))?);
            }
        }
    }
    if spec.flags().pointwise_inner {
        if let Some(problem) = pointwise_inner_violation(spec, page2)? {
            if opts.strict {
                return Err(Error::PointwiseInner(problem));
            }
            warnings.push(format!("pointwise-inner check failed: {problem}"));
        }
    }
    Ok(ds)
}

/// Checks that `δ_{q-1} ∘ δ_q` vanishes on E2^{0,q} once projected to E2^{2,q}.
fn pointwise_inner_violation(spec: &ActionSpec, page2: &BigradedPage) -> Result<Option<String>> {
    let composites: Vec<(String, [GroupHom; 2])> = match spec.d2() {
        None => return Ok(None),
        Some(D2Data::AmbientN2(d)) => vec![("δ".to_string(), d.clone())],
        Some(D2Data::PairwiseKTrivial(pairs)) => pairs
            .iter()
            .map(|(mu, d)| (format!("δ{mu}"), d.clone()))
            .collect(),
    };
    for (label, d) in composites {
        for q in 0..2u8 {
            let twice = compose(&d[1 - q as usize], &d[q as usize])?;
            let (src, tgt) = if spec.n == 2 {
                (page2.cell(0, q), Some(page2.cell(2, q)))
            } else {
                (page2.cell(0, q), None)
            };
            let images = twice.matrix().mul(src.representatives())?;
            let vanishes = match tgt {
                Some(t) => t.boundaries().contains_columns(&images)?,
                None => spec.k(q).columns_vanish(&images),
            };
            if !vanishes {
                return Ok(Some(format!(
                    "{label}_{} ∘ {label}_{q} does not vanish on E2^(0,{q})",
                    1 - q
                )));
            }
        }
    }
    Ok(None)
}

/// Computes `E_1 .. E_{n+1}`; the last page is marked as E∞.
pub fn run_pages(spec: &ActionSpec, opts: &RunOptions) -> Result<SpectralSequence> {
    let n = spec.n;
    let mut warnings = Vec::new();
    let mut conditional = false;
    let mut pages = vec![build_e1(spec)?];
    for k in 2..=n + 1 {
        let mut page = pages.last().expect("nonempty").successor()?;
        if k == n + 1 {
            page.zero_differentials();
            page.is_infinity = true;
        } else if k == 2 {
            page.differentials = build_d2(spec, &page, opts, &mut warnings)?;
            page.check_complex()?;
        } else {
            if let Some(((p, q), (tp, tq))) = page.live_pairs().first() {
                if !spec.flags().assume_higher_vanish {
                    return Err(Error::UnverifiedHigherDifferentials(format!(
                        "d{k} from E{k}({p},{q}) to E{k}({tp},{tq}) joins nonzero cells; \
                         set assume_higher_vanish to proceed"
                    )));
                }
                if !conditional {
                    warnings.push(CONDITIONAL_WARNING.to_string());
                }
                conditional = true;
            }
            page.zero_differentials();
        }
        pages.push(page);
    }
    Ok(SpectralSequence {
        pages,
        warnings,
        conditional,
    })
}

/// Reads off `K_j` of the crossed product for `j = 0, 1` from E∞: the cells
/// with `p + q ≡ j + n (mod 2)` assembled from `p = n` down to `p = 0`.
pub fn crossed_from_pages(ss: &SpectralSequence, bound: u64) -> [ExtensionReport; 2] {
    let e = ss.e_infinity();
    let n = e.n;
    [0u8, 1].map(|j| {
        let pieces: Vec<FgAbGroup> = (0..=n)
            .rev()
            .map(|p| {
                let q = ((j as usize + n + p) % 2) as u8;
                e.group(p, q).clone()
            })
            .collect();
        assemble_filtration_bounded(&pieces, bound)
    })
}

pub fn crossed_product_k(
    spec: &ActionSpec,
    opts: &RunOptions,
) -> Result<(ExtensionReport, ExtensionReport)> {
    let ss = run_pages(spec, opts)?;
    let [k0, k1] = crossed_from_pages(&ss, opts.extension_bound);
    Ok((k0, k1))
}

/// For n = 2 and K-trivial actions: crossing by the first generator gives
/// `K_*(A ⋊ Z) = K0 ⊕ K1` in both degrees, on which the second generator
/// acts by identity plus the off-diagonal d2 data; the PV sequence then
/// yields the Z^2 crossed product. The first PV extension is taken to split.
pub fn iterated_pv(
    spec: &ActionSpec,
    opts: &RunOptions,
) -> Result<(ExtensionReport, ExtensionReport)> {
    if spec.n != 2 {
        return Err(Error::Precondition(format!(
            "iterated PV needs n = 2, found n = {}",
            spec.n
        )));
    }
    if !spec.acts_trivially() {
        return Err(Error::Precondition("iterated PV needs a K-trivial action".into()));
    }
    let deltas = match spec.d2() {
        Some(D2Data::AmbientN2(d)) => d.clone(),
        Some(D2Data::PairwiseKTrivial(pairs)) => {
            let mu = TupleIndex::new(2, vec![1, 2])?;
            match pairs.get(&mu) {
                Some(d) => d.clone(),
                None => [
                    GroupHom::zero(spec.k(0), spec.k(1)),
                    GroupHom::zero(spec.k(1), spec.k(0)),
                ],
            }
        }
        None => return Err(Error::Precondition("iterated PV needs d2 data".into())),
    };
    // B_q = K_q ⊕ K_{1-q}; the second generator acts with a_q = [[0, δ_{1-q}], [0, 0]]
    let off_diagonal = |q: u8| -> Result<GroupHom> {
        let sum = direct_sum(&[spec.k(q).clone(), spec.k(1 - q).clone()]);
        let delta = &deltas[1 - q as usize];
        let mut m = IntMatrix::zeros(sum.group.gens(), sum.group.gens());
        m.set_block(0, spec.k(q).gens(), delta.matrix());
        GroupHom::new(sum.group.clone(), sum.group, m)
    };
    six_term_solve_bounded(&off_diagonal(0)?, &off_diagonal(1)?, opts.extension_bound)
}

/// Maps of E1 and E2 cells induced by an equivariant pair `f0: K0 -> K0'`,
/// `f1: K1 -> K1'`.
#[derive(Clone, Debug)]
pub struct PageMorphism {
    pub e1: BTreeMap<Cell, GroupHom>,
    pub e2: BTreeMap<Cell, GroupHom>,
}

pub fn induced_page_morphism(
    f0: &GroupHom,
    f1: &GroupHom,
    src: &ActionSpec,
    tgt: &ActionSpec,
) -> Result<PageMorphism> {
    if src.n != tgt.n {
        return Err(Error::MismatchedGroups("actions of different rank".into()));
    }
    let fs = [f0, f1];
    for q in 0..2u8 {
        let f = fs[q as usize];
        if f.source() != src.k(q) || f.target() != tgt.k(q) {
            return Err(Error::MismatchedGroups(format!("f{q} must run from K{q} to K{q}'")));
        }
        f.ensure_well_defined()?;
        for (k, (a, b)) in src.action(q).iter().zip(tgt.action(q)).enumerate() {
            if !compose(f, a)?.equals(&compose(b, f)?) {
                return Err(Error::Precondition(format!(
                    "f{q} does not intertwine the actions of generator {}",
                    k + 1
                )));
            }
        }
    }
    let ambient_map = |p: usize, q: u8| -> Result<GroupHom> {
        let f = fs[q as usize];
        let blocks: Vec<IntMatrix> = vec![f.matrix().clone(); binomial(src.n, p)];
        GroupHom::new(
            e1_ambient(src, p, q),
            e1_ambient(tgt, p, q),
            IntMatrix::block_diagonal(&blocks),
        )
    };
    let s1 = build_e1(src)?;
    let t1 = build_e1(tgt)?;
    let s2 = s1.successor()?;
    let t2 = t1.successor()?;
    let mut e1 = BTreeMap::new();
    let mut e2 = BTreeMap::new();
    for p in 0..=src.n {
        for q in 0..2u8 {
            let amb = ambient_map(p, q)?;
            if p < src.n {
                let lhs = compose(&pv_differential(tgt, p, q)?, &amb)?;
                let rhs = compose(&ambient_map(p + 1, q)?, &pv_differential(src, p, q)?)?;
                if !lhs.equals(&rhs) {
                    return Err(Error::Precondition(format!(
                        "E1 map does not commute with d1 at ({p},{q})"
                    )));
                }
            }
            e1.insert((p, q), induced_hom(&amb, s1.cell(p, q), t1.cell(p, q))?);
            e2.insert((p, q), induced_hom(&amb, s2.cell(p, q), t2.cell(p, q))?);
        }
    }
    Ok(PageMorphism { e1, e2 })
}
