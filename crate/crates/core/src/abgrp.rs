//! Finitely generated abelian groups given by presentations, homomorphisms
//! between them, and the kernel / cokernel / image / subquotient calculus.
//!
//! A group with `g` generators and relation matrix `R` (`g x k`) is
//! `Z^g / colspan(R)`. Elements are integer column vectors of length `g`.
//! Every group produced by [`kernel`], [`cokernel`] or [`subquotient`] comes
//! out in diagonal form: torsion generators first (orders forming a
//! divisibility chain), then free generators.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::intmat::{
    kernel_basis, smith_normal_form, solve_with_smith, IntMatrix, IntVector, ModularSolver,
    SmithForm,
};

/// Free rank plus torsion divisors `t_1 | t_2 | ...`, each `> 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Invariants {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl Invariants {
    /// Validates the canonical shape: every divisor exceeds one and divides
    /// the next.
    pub fn new(rank: usize, torsion: Vec<BigInt>) -> Result<Self> {
        for (i, t) in torsion.iter().enumerate() {
            if *t <= BigInt::one() {
                return Err(Error::Precondition(format!(
                    "torsion divisor {t} must exceed 1"
                )));
            }
            if i + 1 < torsion.len() && !(&torsion[i + 1] % t).is_zero() {
                return Err(Error::Precondition(format!(
                    "torsion divisors {t} and {} do not form a divisibility chain",
                    torsion[i + 1]
                )));
            }
        }
        Ok(Invariants { rank, torsion })
    }

    pub fn free(rank: usize) -> Self {
        Invariants {
            rank,
            torsion: Vec::new(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }
}

impl fmt::Display for Invariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// Canonical invariants of `Z^g / colspan(relations)`.
fn invariants_from_smith(gens: usize, snf: &SmithForm) -> Invariants {
    let torsion: Vec<BigInt> = snf
        .diagonal()
        .into_iter()
        .take(snf.rank)
        .filter(|d| !d.is_one())
        .collect();
    Invariants {
        rank: gens - snf.rank,
        torsion,
    }
}

#[derive(Clone)]
pub struct FgAbGroup {
    gens: usize,
    relations: IntMatrix,
    invariants: Invariants,
    smith: Arc<SmithForm>,
}

impl FgAbGroup {
    /// `Z^g / colspan(relations)` where `g = relations.rows()`.
    pub fn presented(relations: IntMatrix) -> Self {
        let smith = smith_normal_form(&relations);
        let gens = relations.rows();
        let invariants = invariants_from_smith(gens, &smith);
        FgAbGroup {
            gens,
            relations,
            invariants,
            smith: Arc::new(smith),
        }
    }

    pub fn free(rank: usize) -> Self {
        Self::presented(IntMatrix::zeros(rank, 0))
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    pub fn cyclic(order: impl Into<BigInt>) -> Self {
        let order = order.into();
        if order.is_zero() {
            return Self::free(1);
        }
        Self::presented(IntMatrix::from_vec(1, 1, vec![order]).expect("1x1"))
    }

    /// `Z/orders[0] + ... + Z/orders[k-1] + Z^rank`, one generator per summand.
    /// Orders need not form a divisibility chain.
    pub fn from_orders(rank: usize, orders: &[BigInt]) -> Self {
        let gens = orders.len() + rank;
        let mut rel = IntMatrix::zeros(gens, orders.len());
        for (i, t) in orders.iter().enumerate() {
            rel[(i, i)] = t.clone();
        }
        Self::presented(rel)
    }

    /// The diagonal presentation of the given invariants.
    pub fn from_invariants(inv: &Invariants) -> Self {
        Self::from_orders(inv.rank, &inv.torsion)
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn invariants(&self) -> &Invariants {
        &self.invariants
    }

    pub fn rank(&self) -> usize {
        self.invariants.rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.invariants.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_trivial()
    }

    pub fn is_free(&self) -> bool {
        self.invariants.is_free()
    }

    pub fn zero_element(&self) -> IntVector {
        vec![BigInt::zero(); self.gens]
    }

    /// The `i`-th generator as an element.
    pub fn generator(&self, i: usize) -> IntVector {
        let mut v = self.zero_element();
        v[i] = BigInt::one();
        v
    }

    /// Whether `v` lies in the relation lattice.
    pub fn is_zero_element(&self, v: &[BigInt]) -> bool {
        v.len() == self.gens && solve_with_smith(&self.smith, v).is_some()
    }

    pub fn elements_equal(&self, a: &[BigInt], b: &[BigInt]) -> bool {
        let diff: IntVector = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.is_zero_element(&diff)
    }

    /// Whether every column of `m` is zero in this group.
    pub fn columns_vanish(&self, m: &IntMatrix) -> bool {
        m.rows() == self.gens && (0..m.cols()).all(|j| self.is_zero_element(&m.column(j)))
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup {
            ambient: self.clone(),
            generators: IntMatrix::identity(self.gens),
        }
    }

    pub fn zero_subgroup(&self) -> Subgroup {
        Subgroup {
            ambient: self.clone(),
            generators: IntMatrix::zeros(self.gens, 0),
        }
    }
}

impl PartialEq for FgAbGroup {
    /// Equality of presentations, not of isomorphism classes.
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens && self.relations == other.relations
    }
}

impl Eq for FgAbGroup {}

impl fmt::Debug for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FgAbGroup({} gens, relations {:?}, ≅ {})",
            self.gens,
            self.relations.to_rows(),
            self.invariants
        )
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.invariants)
    }
}

pub fn canonical_invariants(g: &FgAbGroup) -> (usize, Vec<BigInt>) {
    (g.rank(), g.torsion().to_vec())
}

pub fn iso_class_equal(a: &FgAbGroup, b: &FgAbGroup) -> bool {
    a.invariants() == b.invariants()
}

/// The subgroup of `ambient` generated by the columns of `generators`.
#[derive(Clone, Debug)]
pub struct Subgroup {
    ambient: FgAbGroup,
    generators: IntMatrix,
}

impl Subgroup {
    pub fn new(ambient: FgAbGroup, generators: IntMatrix) -> Result<Self> {
        if generators.rows() != ambient.gens() {
            return Err(Error::dims(
                "subgroup generators",
                ambient.gens(),
                generators.rows(),
            ));
        }
        Ok(Subgroup {
            ambient,
            generators,
        })
    }

    pub fn ambient(&self) -> &FgAbGroup {
        &self.ambient
    }

    pub fn generators(&self) -> &IntMatrix {
        &self.generators
    }

    fn solver(&self) -> ModularSolver {
        ModularSolver::new(&self.generators, self.ambient.relations()).expect("shapes agree")
    }

    pub fn contains(&self, v: &[BigInt]) -> Result<bool> {
        Ok(self.solver().solve(v)?.is_some())
    }

    /// Whether every column of `m` lies in this subgroup.
    pub fn contains_columns(&self, m: &IntMatrix) -> Result<bool> {
        let solver = self.solver();
        for j in 0..m.cols() {
            if solver.solve(&m.column(j))?.is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn contains_subgroup(&self, other: &Subgroup) -> Result<bool> {
        if self.ambient != other.ambient {
            return Err(Error::MismatchedGroups(
                "subgroups live in different ambient groups".into(),
            ));
        }
        self.contains_columns(&other.generators)
    }

    pub fn same_as(&self, other: &Subgroup) -> Result<bool> {
        Ok(self.contains_subgroup(other)? && other.contains_subgroup(self)?)
    }

    /// The subgroup generated by both generator sets.
    pub fn join(&self, other: &Subgroup) -> Result<Subgroup> {
        if self.ambient != other.ambient {
            return Err(Error::MismatchedGroups("join of subgroups".into()));
        }
        Subgroup::new(
            self.ambient.clone(),
            self.generators.hconcat(&other.generators)?,
        )
    }

    /// The subgroup as an abstract group with its inclusion.
    pub fn as_group(&self) -> Result<Subquotient> {
        subquotient(self, &self.ambient.zero_subgroup())
    }
}

#[derive(Clone, Debug)]
pub struct GroupHom {
    source: FgAbGroup,
    target: FgAbGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    /// Builds a hom after checking shape only. Use [`GroupHom::new`] for the
    /// well-definedness check as well.
    pub fn from_parts(source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix) -> Result<Self> {
        if matrix.shape() != (target.gens(), source.gens()) {
            return Err(Error::dims(
                "homomorphism matrix",
                format!("{}x{}", target.gens(), source.gens()),
                format!("{}x{}", matrix.rows(), matrix.cols()),
            ));
        }
        Ok(GroupHom {
            source,
            target,
            matrix,
        })
    }

    pub fn new(source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix) -> Result<Self> {
        let f = Self::from_parts(source, target, matrix)?;
        f.ensure_well_defined()?;
        Ok(f)
    }

    pub fn identity(g: &FgAbGroup) -> Self {
        GroupHom {
            source: g.clone(),
            target: g.clone(),
            matrix: IntMatrix::identity(g.gens()),
        }
    }

    pub fn zero(source: &FgAbGroup, target: &FgAbGroup) -> Self {
        GroupHom {
            source: source.clone(),
            target: target.clone(),
            matrix: IntMatrix::zeros(target.gens(), source.gens()),
        }
    }

    pub fn source(&self) -> &FgAbGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn is_well_defined(&self) -> bool {
        let images = self
            .matrix
            .mul(self.source.relations())
            .expect("shape checked at construction");
        self.target.columns_vanish(&images)
    }

    pub fn ensure_well_defined(&self) -> Result<()> {
        if self.is_well_defined() {
            Ok(())
        } else {
            Err(Error::IllDefinedHom(format!(
                "relations of {} do not map into the relations of {} under {:?}",
                self.source.invariants(),
                self.target.invariants(),
                self.matrix.to_rows()
            )))
        }
    }

    pub fn apply(&self, v: &[BigInt]) -> Result<IntVector> {
        self.matrix.mul_vec(v)
    }

    /// Whether the hom sends every element to zero.
    pub fn is_zero(&self) -> bool {
        self.target.columns_vanish(&self.matrix)
    }

    /// Equality as maps: same source and target, and the difference vanishes.
    pub fn equals(&self, other: &GroupHom) -> bool {
        self.source == other.source
            && self.target == other.target
            && self
                .target
                .columns_vanish(&self.matrix.sub(&other.matrix).expect("same shape"))
    }

    fn check_same_ends(&self, other: &GroupHom, context: &str) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::MismatchedGroups(format!(
                "{context}: homs have different source or target"
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &GroupHom) -> Result<GroupHom> {
        self.check_same_ends(other, "sum of homs")?;
        Ok(GroupHom {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.add(&other.matrix)?,
        })
    }

    pub fn sub(&self, other: &GroupHom) -> Result<GroupHom> {
        self.check_same_ends(other, "difference of homs")?;
        Ok(GroupHom {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.sub(&other.matrix)?,
        })
    }

    pub fn scale(&self, k: &BigInt) -> GroupHom {
        GroupHom {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.scale(k),
        }
    }

    pub fn is_endomorphism(&self) -> bool {
        self.source == self.target
    }

    pub fn is_injective(&self) -> Result<bool> {
        Ok(kernel(self)?.0.is_trivial())
    }

    pub fn is_surjective(&self) -> Result<bool> {
        Ok(cokernel(self)?.0.is_trivial())
    }
}

pub fn check_well_defined(f: &GroupHom) -> bool {
    f.is_well_defined()
}

/// `g ∘ f`.
pub fn compose(g: &GroupHom, f: &GroupHom) -> Result<GroupHom> {
    if f.target != g.source {
        return Err(Error::MismatchedGroups(format!(
            "cannot compose: middle groups {:?} and {:?} differ",
            f.target, g.source
        )));
    }
    GroupHom::from_parts(f.source.clone(), g.target.clone(), g.matrix.mul(&f.matrix)?)
}

/// The kernel as a subgroup of the source.
pub fn kernel_subgroup(f: &GroupHom) -> Result<Subgroup> {
    f.ensure_well_defined()?;
    let src = f.source();
    // x lies in the kernel iff M x = R_B y for some y
    let stacked = f.matrix().hconcat(&f.target().relations().neg())?;
    let basis = kernel_basis(&stacked);
    Subgroup::new(src.clone(), basis.submatrix(0..src.gens(), 0..basis.cols()))
}

/// The kernel presented as a subquotient of the source (no boundaries).
pub fn kernel_subquotient(f: &GroupHom) -> Result<Subquotient> {
    subquotient(&kernel_subgroup(f)?, &f.source().zero_subgroup())
}

/// The cokernel presented as a subquotient of the target.
pub fn cokernel_subquotient(f: &GroupHom) -> Result<Subquotient> {
    subquotient(&f.target().whole(), &image(f)?)
}

/// The kernel with its inclusion into the source.
pub fn kernel(f: &GroupHom) -> Result<(FgAbGroup, GroupHom)> {
    let sq = kernel_subquotient(f)?;
    let inclusion = sq.inclusion()?;
    Ok((sq.group, inclusion))
}

/// The cokernel with the projection from the target.
pub fn cokernel(f: &GroupHom) -> Result<(FgAbGroup, GroupHom)> {
    let sq = cokernel_subquotient(f)?;
    let projection = sq.projection_from_ambient()?;
    Ok((sq.group, projection))
}

pub fn image(f: &GroupHom) -> Result<Subgroup> {
    f.ensure_well_defined()?;
    Subgroup::new(f.target().clone(), f.matrix().clone())
}

/// A direct sum with its structure maps.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub group: FgAbGroup,
    pub injections: Vec<GroupHom>,
    pub projections: Vec<GroupHom>,
}

pub fn direct_sum(gs: &[FgAbGroup]) -> DirectSum {
    let rels: Vec<IntMatrix> = gs.iter().map(|g| g.relations().clone()).collect();
    let group = FgAbGroup::presented(IntMatrix::block_diagonal(&rels));
    let mut injections = Vec::with_capacity(gs.len());
    let mut projections = Vec::with_capacity(gs.len());
    let mut offset = 0;
    for g in gs {
        let mut inj = IntMatrix::zeros(group.gens(), g.gens());
        inj.set_block(offset, 0, &IntMatrix::identity(g.gens()));
        let proj = inj.transpose();
        injections.push(GroupHom {
            source: g.clone(),
            target: group.clone(),
            matrix: inj,
        });
        projections.push(GroupHom {
            source: group.clone(),
            target: g.clone(),
            matrix: proj,
        });
        offset += g.gens();
    }
    DirectSum {
        group,
        injections,
        projections,
    }
}

/// Brings `Z^k / colspan(rel)` into diagonal form. Returns the new group,
/// the coordinate change `old -> new` and representatives `new -> old`.
fn diagonalize(k: usize, rel: &IntMatrix) -> (FgAbGroup, IntMatrix, IntMatrix) {
    let snf = smith_normal_form(rel);
    let diag = snf.diagonal();
    let kept: Vec<usize> = (0..k)
        .filter(|&i| i >= snf.rank || !diag[i].is_one())
        .collect();
    let orders: Vec<BigInt> = kept
        .iter()
        .filter(|&&i| i < snf.rank)
        .map(|&i| diag[i].clone())
        .collect();
    let group = FgAbGroup::from_orders(kept.len() - orders.len(), &orders);
    let to_new = snf.u.select_rows(&kept);
    let from_new = snf.u_inv.select_columns(&kept);
    (group, to_new, from_new)
}

/// `cycles / boundaries` inside a common ambient group, presented in
/// diagonal form, with ambient representatives for its generators.
#[derive(Clone, Debug)]
pub struct Subquotient {
    cycles: Subgroup,
    boundaries: Subgroup,
    group: FgAbGroup,
    representatives: IntMatrix,
    to_group: IntMatrix,
    solver: ModularSolver,
}

pub fn subquotient(z: &Subgroup, b: &Subgroup) -> Result<Subquotient> {
    if z.ambient != b.ambient {
        return Err(Error::MismatchedGroups(
            "subquotient: cycles and boundaries live in different groups".into(),
        ));
    }
    if !z.contains_subgroup(b)? {
        return Err(Error::NotASubgroup(
            "subquotient: boundaries are not contained in cycles".into(),
        ));
    }
    let amb = &z.ambient;
    let zg = z.generators.clone();
    let kz = zg.cols();
    let killed = b.generators.hconcat(amb.relations())?;
    // c presents zero iff Z c ∈ span(B) + span(R)
    let stacked = zg.hconcat(&killed.neg())?;
    let basis = kernel_basis(&stacked);
    let rel = basis.submatrix(0..kz, 0..basis.cols());
    let (group, to_group, from_group) = diagonalize(kz, &rel);
    let representatives = zg.mul(&from_group)?;
    let solver = ModularSolver::new(&zg, &killed)?;
    Ok(Subquotient {
        cycles: z.clone(),
        boundaries: b.clone(),
        group,
        representatives,
        to_group,
        solver,
    })
}

impl Subquotient {
    pub fn group(&self) -> &FgAbGroup {
        &self.group
    }

    pub fn ambient(&self) -> &FgAbGroup {
        &self.cycles.ambient
    }

    pub fn cycles(&self) -> &Subgroup {
        &self.cycles
    }

    pub fn boundaries(&self) -> &Subgroup {
        &self.boundaries
    }

    /// Ambient representatives of the generators, one per column.
    pub fn representatives(&self) -> &IntMatrix {
        &self.representatives
    }

    pub fn invariants(&self) -> &Invariants {
        self.group.invariants()
    }

    /// Coordinates in the presented group of an ambient element of the cycles.
    pub fn coordinates(&self, v: &[BigInt]) -> Result<IntVector> {
        let c = self.solver.solve(v)?.ok_or_else(|| {
            Error::NotASubgroup(format!("element {v:?} does not lie in the cycle subgroup"))
        })?;
        self.to_group.mul_vec(&c)
    }

    /// Coordinates of every column of `m`.
    pub fn coordinates_of_columns(&self, m: &IntMatrix) -> Result<IntMatrix> {
        let cols = (0..m.cols())
            .map(|j| self.coordinates(&m.column(j)))
            .collect::<Result<Vec<_>>>()?;
        IntMatrix::from_columns(self.group.gens(), &cols)
    }

    /// The hom from the subquotient to the ambient sending generators to
    /// their representatives. Only well-defined when there are no boundaries.
    pub fn inclusion(&self) -> Result<GroupHom> {
        GroupHom::new(
            self.group.clone(),
            self.ambient().clone(),
            self.representatives.clone(),
        )
    }

    /// The quotient map `ambient -> group`. Requires the cycles to be everything.
    pub fn projection_from_ambient(&self) -> Result<GroupHom> {
        let amb = self.ambient();
        let m = self.coordinates_of_columns(&IntMatrix::identity(amb.gens()))?;
        GroupHom::new(amb.clone(), self.group.clone(), m)
    }
}

/// The map `src -> tgt` induced by an ambient hom `f`, after checking that
/// `f` carries cycles into cycles and boundaries into boundaries.
pub fn induced_hom(f: &GroupHom, src: &Subquotient, tgt: &Subquotient) -> Result<GroupHom> {
    if f.source() != src.ambient() || f.target() != tgt.ambient() {
        return Err(Error::MismatchedGroups(
            "induced_hom: map does not run between the subquotients' ambients".into(),
        ));
    }
    let cyc_img = f.matrix().mul(src.cycles.generators())?;
    if !tgt.cycles.contains_columns(&cyc_img)? {
        return Err(Error::DoesNotDescend("cycles are not mapped into cycles".into()));
    }
    let bnd_img = f.matrix().mul(src.boundaries.generators())?;
    if !tgt.boundaries.contains_columns(&bnd_img)? {
        return Err(Error::DoesNotDescend(
            "boundaries are not mapped into boundaries".into(),
        ));
    }
    let images = f.matrix().mul(src.representatives())?;
    let m = tgt.coordinates_of_columns(&images)?;
    GroupHom::new(src.group.clone(), tgt.group.clone(), m)
}
