//! Finitely generated torsion-free nilpotent groups of the two shapes the
//! crate works with, and enough subgroup machinery to do index, coset and
//! series computations exactly.
//!
//! A group is either free abelian Z^n, or an affine group Z^n x <x> where the
//! generator x acts on the translation lattice by a fixed unipotent integer
//! matrix X. Elements are written x^k * v with v a row vector; the product
//! rule is (k1, v1)(k2, v2) = (k1 + k2, v1 X^{k2} + v2), so conjugation by x
//! is v -> v X.
//!
//! Subgroups are stored as (e, W, u0): the lattice part W (a sublattice of
//! Z^n, X^e-invariant when e > 0) together with the coset generator x^e * u0.
//! With e = 0 the subgroup is just W. Not every subgroup of the ambient group
//! fits this shape; constructors reject descriptors that do not satisfy the
//! invariants instead of guessing.

#![allow(clippy::needless_range_loop)]

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{int, Int, IntMatrix};
use crate::lattice::{hnf_with_transform, snf, IndexResult, Lattice, LatticeError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupError {
    /// The affine action matrix must be unipotent.
    NotUnipotent,
    BadDimensions(String),
    /// The descriptor does not denote a subgroup of the given shape.
    InvalidSubgroup(String),
    /// An exact search exceeded its certified range; the answer is unknown,
    /// not false.
    Unresolved(String),
    Lattice(LatticeError),
}

impl From<LatticeError> for GroupError {
    fn from(e: LatticeError) -> Self {
        GroupError::Lattice(e)
    }
}

impl core::fmt::Display for GroupError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GroupError::NotUnipotent => write!(f, "action matrix is not unipotent"),
            GroupError::BadDimensions(w) => write!(f, "bad dimensions: {w}"),
            GroupError::InvalidSubgroup(w) => write!(f, "invalid subgroup descriptor: {w}"),
            GroupError::Unresolved(w) => write!(f, "undecided within certified bounds: {w}"),
            GroupError::Lattice(e) => write!(f, "{e}"),
        }
    }
}

/// The two group backends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupDesc {
    FreeAbelian { rank: usize },
    Affine { rank: usize, x: IntMatrix },
}

/// Group element x^k * v. For free abelian groups k is always zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AffineElement {
    pub k: Int,
    pub v: Vec<Int>,
}

impl AffineElement {
    pub fn translation(v: Vec<Int>) -> Self {
        AffineElement { k: Int::zero(), v }
    }

    pub fn new(k: Int, v: Vec<Int>) -> Self {
        AffineElement { k, v }
    }

    pub fn is_identity(&self) -> bool {
        self.k.is_zero() && self.v.iter().all(|c| c.is_zero())
    }
}

impl core::fmt::Display for AffineElement {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.is_identity() {
            return write!(f, "e");
        }
        if !self.k.is_zero() {
            write!(f, "x^{}", self.k)?;
            if self.v.iter().any(|c| !c.is_zero()) {
                write!(f, "*")?;
            } else {
                return Ok(());
            }
        }
        write!(f, "(")?;
        for (i, c) in self.v.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn to_exp(k: &Int) -> i64 {
    k.to_i64().expect("group exponent exceeds machine range")
}

fn vec_add(a: &[Int], b: &[Int]) -> Vec<Int> {
    a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
}

fn vec_sub(a: &[Int], b: &[Int]) -> Vec<Int> {
    a.iter().zip(b.iter()).map(|(x, y)| x - y).collect()
}

impl GroupDesc {
    pub fn free_abelian(rank: usize) -> Self {
        GroupDesc::FreeAbelian { rank }
    }

    pub fn affine(x: IntMatrix) -> Result<Self, GroupError> {
        if !x.is_square() || x.rows() == 0 {
            return Err(GroupError::BadDimensions(String::from(
                "affine action must be square and nonempty",
            )));
        }
        if x.unipotency_class().is_none() {
            return Err(GroupError::NotUnipotent);
        }
        Ok(GroupDesc::Affine { rank: x.rows(), x })
    }

    /// Rank of the translation lattice.
    pub fn rank(&self) -> usize {
        match self {
            GroupDesc::FreeAbelian { rank } => *rank,
            GroupDesc::Affine { rank, .. } => *rank,
        }
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            GroupDesc::FreeAbelian { .. } => true,
            GroupDesc::Affine { x, .. } => x.is_identity(),
        }
    }

    pub fn hirsch(&self) -> usize {
        match self {
            GroupDesc::FreeAbelian { rank } => *rank,
            GroupDesc::Affine { rank, .. } => rank + 1,
        }
    }

    pub fn x_matrix(&self) -> IntMatrix {
        match self {
            GroupDesc::FreeAbelian { rank } => IntMatrix::identity(*rank),
            GroupDesc::Affine { x, .. } => x.clone(),
        }
    }

    /// Nilpotency degree of X - I (1 for abelian groups).
    pub fn action_class(&self) -> usize {
        match self {
            GroupDesc::FreeAbelian { .. } => 1,
            GroupDesc::Affine { x, .. } => {
                x.unipotency_class().expect("validated at construction").max(1)
            }
        }
    }

    /// X^k, exact for either sign of k.
    pub fn xpow(&self, k: &Int) -> IntMatrix {
        match self {
            GroupDesc::FreeAbelian { rank } => IntMatrix::identity(*rank),
            GroupDesc::Affine { x, .. } => {
                x.pow(to_exp(k)).expect("unipotent matrices are invertible")
            }
        }
    }

    pub fn identity(&self) -> AffineElement {
        AffineElement::translation(vec![Int::zero(); self.rank()])
    }

    fn check_element(&self, g: &AffineElement) {
        assert_eq!(g.v.len(), self.rank(), "element has wrong rank");
        if matches!(self, GroupDesc::FreeAbelian { .. }) {
            assert!(g.k.is_zero(), "free abelian elements have no x part");
        }
    }

    pub fn mul(&self, a: &AffineElement, b: &AffineElement) -> AffineElement {
        self.check_element(a);
        self.check_element(b);
        let moved = self.xpow(&b.k).apply_row(&a.v);
        AffineElement::new(&a.k + &b.k, vec_add(&moved, &b.v))
    }

    pub fn inv(&self, a: &AffineElement) -> AffineElement {
        self.check_element(a);
        let v = self.xpow(&-a.k.clone()).apply_row(&a.v);
        AffineElement::new(-a.k.clone(), v.into_iter().map(|c| -c).collect())
    }

    /// a^j by the geometric sum formula: the translation part of
    /// (x^e, u)^j is u * (I + X^e + ... + X^{e(j-1)}).
    pub fn pow(&self, a: &AffineElement, j: &Int) -> AffineElement {
        self.check_element(a);
        let je = to_exp(j);
        if je == 0 {
            return self.identity();
        }
        if je < 0 {
            return self.pow(&self.inv(a), &int(-je));
        }
        let y = self.xpow(&a.k);
        let s = geometric_sum(&y, je as u64);
        AffineElement::new(&a.k * j, s.apply_row(&a.v))
    }

    pub fn commutator(&self, a: &AffineElement, b: &AffineElement) -> AffineElement {
        let ai = self.inv(a);
        let bi = self.inv(b);
        self.mul(&self.mul(&ai, &bi), &self.mul(a, b))
    }

    pub fn conjugate(&self, g: &AffineElement, by: &AffineElement) -> AffineElement {
        self.mul(&self.mul(&self.inv(by), g), by)
    }
}

/// I + Y + ... + Y^{j-1}, by binary splitting.
fn geometric_sum(y: &IntMatrix, j: u64) -> IntMatrix {
    let n = y.rows();
    let mut s = IntMatrix::zero(n, n);
    let mut p = IntMatrix::identity(n);
    if j == 0 {
        return s;
    }
    let bits = 64 - j.leading_zeros();
    for i in (0..bits).rev() {
        // Doubling: the sum over 2t terms is (I + Y^t) times the sum over t
        // terms, and the running power squares.
        s = s.add(&p.mul(&s));
        p = p.mul(&p);
        if (j >> i) & 1 == 1 {
            s = s.add(&p);
            p = p.mul(y);
        }
    }
    s
}

/// Subgroup descriptor (e, W, u0): generated by the lattice W together with
/// the element x^e * u0 when e > 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SubgroupDesc {
    e: Int,
    w: Lattice,
    u0: Vec<Int>,
}

impl SubgroupDesc {
    /// Validates and canonicalizes. `u0` is reduced to its canonical residue
    /// modulo `w`; for `e = 0` the coset part must be trivial.
    pub fn new(g: &GroupDesc, e: Int, w: Lattice, u0: Vec<Int>) -> Result<Self, GroupError> {
        let n = g.rank();
        if w.ambient() != n || u0.len() != n {
            return Err(GroupError::BadDimensions(format!(
                "subgroup data for rank {n}"
            )));
        }
        if e.is_negative() {
            return Err(GroupError::InvalidSubgroup(String::from("e must be >= 0")));
        }
        if matches!(g, GroupDesc::FreeAbelian { .. }) && !e.is_zero() {
            return Err(GroupError::InvalidSubgroup(String::from(
                "free abelian subgroups have e = 0",
            )));
        }
        if e.is_zero() {
            if u0.iter().any(|c| !c.is_zero()) {
                return Err(GroupError::InvalidSubgroup(String::from(
                    "a lattice-only subgroup cannot carry a coset vector",
                )));
            }
            return Ok(SubgroupDesc { e, w, u0 });
        }
        let xe = g.xpow(&e).to_rat();
        let img = w.map_image(&xe)?;
        if img != w {
            return Err(GroupError::InvalidSubgroup(String::from(
                "lattice part is not invariant under x^e",
            )));
        }
        let u0 = w.canonical_residue(&u0);
        Ok(SubgroupDesc { e, w, u0 })
    }

    pub fn lattice_only(g: &GroupDesc, w: Lattice) -> Result<Self, GroupError> {
        let n = g.rank();
        SubgroupDesc::new(g, Int::zero(), w, vec![Int::zero(); n])
    }

    pub fn whole_group(g: &GroupDesc) -> Self {
        let n = g.rank();
        let e = match g {
            GroupDesc::FreeAbelian { .. } => Int::zero(),
            GroupDesc::Affine { .. } => Int::one(),
        };
        SubgroupDesc { e, w: Lattice::full(n), u0: vec![Int::zero(); n] }
    }

    pub fn trivial(g: &GroupDesc) -> Self {
        let n = g.rank();
        SubgroupDesc { e: Int::zero(), w: Lattice::zero(n), u0: vec![Int::zero(); n] }
    }

    pub fn e(&self) -> &Int {
        &self.e
    }

    pub fn w(&self) -> &Lattice {
        &self.w
    }

    pub fn u0(&self) -> &[Int] {
        &self.u0
    }

    pub fn is_trivial(&self) -> bool {
        self.e.is_zero() && self.w.is_zero()
    }

    /// The coset generator x^e * u0; `None` when e = 0.
    pub fn head(&self) -> Option<AffineElement> {
        if self.e.is_zero() {
            None
        } else {
            Some(AffineElement::new(self.e.clone(), self.u0.clone()))
        }
    }

    /// Polycyclic generating sequence: head first (when present), then the
    /// HNF basis rows of the lattice part.
    pub fn generators(&self) -> Vec<AffineElement> {
        let mut out = Vec::new();
        if let Some(h) = self.head() {
            out.push(h);
        }
        for row in self.w.basis_rows() {
            out.push(AffineElement::translation(row));
        }
        out
    }

    pub fn hirsch(&self) -> usize {
        self.w.rank() + usize::from(!self.e.is_zero())
    }
}

/// Membership of `a` in the subgroup.
pub fn sg_member(g: &GroupDesc, s: &SubgroupDesc, a: &AffineElement) -> bool {
    if s.e.is_zero() {
        return a.k.is_zero() && s.w.member(&a.v);
    }
    if !a.k.mod_floor(&s.e).is_zero() {
        return false;
    }
    let j = a.k.div_floor(&s.e);
    let h0 = s.head().expect("e > 0");
    let tau = g.pow(&h0, &j).v;
    s.w.member(&vec_sub(&a.v, &tau))
}

/// Canonical representative of the right coset S * a.
pub fn coset_rep(g: &GroupDesc, s: &SubgroupDesc, a: &AffineElement) -> AffineElement {
    if s.e.is_zero() {
        // The coset is {(a.k, w X^{a.k} + a.v) : w in W}.
        let wk = s
            .w
            .map_image(&g.xpow(&a.k).to_rat())
            .expect("integer matrix images are integral");
        return AffineElement::new(a.k.clone(), wk.canonical_residue(&a.v));
    }
    let kp = a.k.mod_floor(&s.e);
    let j1 = (&kp - &a.k).div_floor(&s.e);
    debug_assert!((&kp - &a.k).mod_floor(&s.e).is_zero());
    let h0 = s.head().expect("e > 0");
    let tau = g.pow(&h0, &j1).v;
    let u = vec_add(&g.xpow(&a.k).apply_row(&tau), &a.v);
    let wk = s
        .w
        .map_image(&g.xpow(&kp).to_rat())
        .expect("integer matrix images are integral");
    AffineElement::new(kp, wk.canonical_residue(&u))
}

/// Index [G : S].
pub fn sg_index(g: &GroupDesc, s: &SubgroupDesc) -> IndexResult {
    match g {
        GroupDesc::FreeAbelian { .. } => s.w.index_in_ambient(),
        GroupDesc::Affine { .. } => {
            if s.e.is_zero() {
                return IndexResult::Infinite;
            }
            match s.w.index_in_ambient() {
                IndexResult::Infinite => IndexResult::Infinite,
                IndexResult::Finite(d) => IndexResult::Finite(&s.e * d),
            }
        }
    }
}

/// Index [S : T] for nested subgroup descriptors; errors when T is not
/// contained in S.
pub fn sg_relative_index(
    g: &GroupDesc,
    s: &SubgroupDesc,
    t: &SubgroupDesc,
) -> Result<IndexResult, GroupError> {
    for gen in t.generators() {
        if !sg_member(g, s, &gen) {
            return Err(GroupError::InvalidSubgroup(String::from(
                "relative index of a non-subgroup",
            )));
        }
    }
    let step = if t.e.is_zero() {
        if s.e.is_zero() {
            Int::one()
        } else {
            return Ok(IndexResult::Infinite);
        }
    } else {
        debug_assert!(!s.e.is_zero());
        t.e.div_floor(&s.e)
    };
    match s.w.index_of_sublattice(&t.w)? {
        IndexResult::Infinite => Ok(IndexResult::Infinite),
        IndexResult::Finite(d) => Ok(IndexResult::Finite(step * d)),
    }
}

/// Canonical transversal of a finite-index subgroup: x^a * u with
/// a ascending in [0, e) and u running over the canonical residues of
/// W * X^a in lexicographic order. `None` when the index is infinite.
pub fn sg_transversal(g: &GroupDesc, s: &SubgroupDesc) -> Option<Vec<AffineElement>> {
    match sg_index(g, s) {
        IndexResult::Infinite => return None,
        IndexResult::Finite(_) => {}
    }
    let e = match g {
        GroupDesc::FreeAbelian { .. } => 1i64,
        GroupDesc::Affine { .. } => to_exp(&s.e),
    };
    let mut out = Vec::new();
    for a in 0..e {
        let wa = s
            .w
            .map_image(&g.xpow(&int(a)).to_rat())
            .expect("integer matrix images are integral");
        let residues = wa.residues().expect("full rank was checked via the index");
        for u in residues {
            out.push(AffineElement::new(int(a), u));
        }
    }
    Some(out)
}

/// Smallest representable subgroup containing the given elements.
///
/// The x exponents of the closure form dZ with d the gcd of the generators'
/// exponents; a head with exponent d is assembled as a word in the
/// generators, the generators are then reduced to pure translations, and the
/// translation lattice is closed under conjugation by x^{±d}.
pub fn sg_closure(g: &GroupDesc, gens: &[AffineElement]) -> Result<SubgroupDesc, GroupError> {
    let n = g.rank();
    let mut e = Int::zero();
    for gen in gens {
        e = e.gcd(&gen.k);
    }
    if e.is_zero() {
        let rows: Vec<Vec<Int>> = gens.iter().map(|a| a.v.clone()).collect();
        return SubgroupDesc::lattice_only(g, Lattice::from_rows(n, &rows));
    }
    let mut head: Option<AffineElement> = None;
    for gen in gens {
        if gen.k.is_zero() {
            continue;
        }
        head = Some(match head {
            None => gen.clone(),
            Some(h) => {
                let gc = h.k.extended_gcd(&gen.k);
                g.mul(&g.pow(&h, &gc.x), &g.pow(gen, &gc.y))
            }
        });
    }
    let mut head = head.expect("some generator has a nonzero x exponent");
    if head.k.is_negative() {
        head = g.inv(&head);
    }
    debug_assert_eq!(head.k, e);
    let mut rows: Vec<Vec<Int>> = Vec::new();
    for gen in gens {
        if gen.k.is_zero() {
            rows.push(gen.v.clone());
        } else {
            let j = gen.k.div_floor(&e);
            let res = g.mul(gen, &g.inv(&g.pow(&head, &j)));
            debug_assert!(res.k.is_zero());
            rows.push(res.v);
        }
    }
    let xe = g.xpow(&e).to_rat();
    let xe_inv = g.xpow(&-e.clone()).to_rat();
    let mut w = Lattice::from_rows(n, &rows);
    loop {
        let fwd = w.map_image(&xe)?;
        let bwd = w.map_image(&xe_inv)?;
        let next = w.sum(&fwd)?.sum(&bwd)?;
        if next == w {
            break;
        }
        w = next;
    }
    SubgroupDesc::new(g, e, w, head.v)
}

/// Conjugate subgroup t^{-1} S t.
pub fn sg_conjugate(
    g: &GroupDesc,
    s: &SubgroupDesc,
    t: &AffineElement,
) -> Result<SubgroupDesc, GroupError> {
    let w = s.w.map_image(&g.xpow(&t.k).to_rat())?;
    match s.head() {
        None => SubgroupDesc::lattice_only(g, w),
        Some(h0) => {
            let h = g.conjugate(&h0, t);
            SubgroupDesc::new(g, s.e.clone(), w, h.v)
        }
    }
}

/// Central series data for the whole group.
#[derive(Debug, Clone)]
pub struct CentralData {
    /// Z_1 .. Z_c: the lattice of translations in each term, and whether x
    /// itself lies in the term.
    pub upper: Vec<(Lattice, bool)>,
    /// gamma_2 .. gamma_{c+1}; the last entry is the zero lattice.
    pub lower: Vec<Lattice>,
    pub class: usize,
    pub derived_length: usize,
    pub hirsch: usize,
}

pub fn central_data(g: &GroupDesc) -> CentralData {
    let n = g.rank();
    match g {
        GroupDesc::FreeAbelian { .. } => CentralData {
            upper: vec![(Lattice::full(n), true)],
            lower: vec![Lattice::zero(n)],
            class: 1,
            derived_length: 1,
            hirsch: n,
        },
        GroupDesc::Affine { x, .. } => {
            let nm = x.sub(&IntMatrix::identity(n));
            let c = g.action_class();
            let mut upper = Vec::with_capacity(c);
            let mut npow = nm.clone();
            for _ in 1..=c {
                let ker = crate::lattice::int_row_kernel(&npow);
                upper.push((ker, npow.is_zero()));
                npow = npow.mul(&nm);
            }
            let mut lower = Vec::with_capacity(c);
            let mut gi = Lattice::from_matrix(n, &nm);
            for _ in 2..=c + 1 {
                lower.push(gi.clone());
                gi = gi
                    .map_image(&nm.to_rat())
                    .expect("integer images are integral");
            }
            debug_assert!(lower.last().is_none_or(|l| l.is_zero()));
            CentralData {
                upper,
                lower,
                class: c,
                derived_length: if c == 1 { 1 } else { 2 },
                hirsch: n + 1,
            }
        }
    }
}

/// Z_i(G) as a subgroup descriptor (i >= 1, clamped at the class).
pub fn upper_central_subgroup(g: &GroupDesc, i: usize) -> SubgroupDesc {
    assert!(i >= 1);
    let data = central_data(g);
    let idx = i.min(data.class) - 1;
    let (lat, has_x) = &data.upper[idx];
    if *has_x && matches!(g, GroupDesc::Affine { .. }) {
        SubgroupDesc::new(g, Int::one(), lat.clone(), vec![Int::zero(); g.rank()])
            .expect("kernel lattices are invariant")
    } else {
        SubgroupDesc::lattice_only(g, lat.clone()).expect("lattice subgroup")
    }
}

/// Center of a subgroup, exactly.
///
/// When x^e fixes the lattice part pointwise the whole subgroup is abelian:
/// powers of the head commute with each other, and the head then commutes
/// with every translation in W. Otherwise no element with an x part is
/// central, because a unipotent map of finite order is the identity, and the
/// center is W ∩ ker(X^e - I).
pub fn center_of_subgroup(g: &GroupDesc, s: &SubgroupDesc) -> SubgroupDesc {
    if s.e.is_zero() || matches!(g, GroupDesc::FreeAbelian { .. }) {
        return s.clone();
    }
    let xe = g.xpow(&s.e);
    let fixes_w = s.w.basis_rows().iter().all(|row| &xe.apply_row(row) == row);
    if fixes_w {
        return s.clone();
    }
    let ne = xe.sub(&IntMatrix::identity(g.rank()));
    let fixed = crate::lattice::int_row_kernel(&ne);
    let lat = s.w.intersect(&fixed).expect("same ambient");
    SubgroupDesc::lattice_only(g, lat).expect("lattice subgroup")
}

pub fn sg_is_abelian(g: &GroupDesc, s: &SubgroupDesc) -> bool {
    center_of_subgroup(g, s) == *s
}

/// Lower central series of a subgroup: gamma_2(S), gamma_3(S), ... down to
/// the first zero lattice (inclusive). Each term is the conjugation closure
/// of the previous term's image under X^e - I, using the identity
/// w (X^{ej} - I) = (w sum_{i<j} X^{ei}) (X^e - I).
pub fn gamma_series_of_subgroup(g: &GroupDesc, s: &SubgroupDesc) -> Vec<Lattice> {
    let n = g.rank();
    if s.e.is_zero() || matches!(g, GroupDesc::FreeAbelian { .. }) {
        return vec![Lattice::zero(n)];
    }
    let xe = g.xpow(&s.e);
    let ne = xe.sub(&IntMatrix::identity(n)).to_rat();
    let xe_r = xe.to_rat();
    let xe_inv = g.xpow(&-s.e.clone()).to_rat();
    let close = |mut l: Lattice| -> Lattice {
        loop {
            let fwd = l.map_image(&xe_r).expect("integral");
            let bwd = l.map_image(&xe_inv).expect("integral");
            let next = l.sum(&fwd).unwrap().sum(&bwd).unwrap();
            if next == l {
                return l;
            }
            l = next;
        }
    };
    let mut out = Vec::new();
    let mut cur = close(s.w.map_image(&ne).expect("integral"));
    loop {
        let stop = cur.is_zero();
        out.push(cur.clone());
        if stop {
            break;
        }
        cur = close(cur.map_image(&ne).expect("integral"));
    }
    out
}

/// gamma_i(S) for i >= 2 (zero lattice past the class).
pub fn gamma_of_subgroup(g: &GroupDesc, s: &SubgroupDesc, i: usize) -> Lattice {
    assert!(i >= 2);
    let series = gamma_series_of_subgroup(g, s);
    series
        .get(i - 2)
        .cloned()
        .unwrap_or_else(|| Lattice::zero(g.rank()))
}

fn lcm_up_to(c: usize) -> Int {
    let mut l = Int::one();
    for i in 1..=c.max(1) {
        l = l.lcm(&int(i as i64));
    }
    l
}

/// Exponent of Z^n / W for full-rank W: the largest invariant factor.
fn lattice_exponent(w: &Lattice) -> Option<Int> {
    if !w.is_full_rank() {
        return None;
    }
    if w.ambient() == 0 {
        return Some(Int::one());
    }
    let s = snf(w.basis());
    Some(s.d.at(s.rank - 1, s.rank - 1).clone())
}

/// Solve y * M = target over Z. Returns None when no integral solution
/// exists. Echelon reduction through the HNF of M, with the unimodular
/// transform carrying the quotients back to coefficients on the rows of M.
fn solve_integer_row(m: &IntMatrix, target: &[Int]) -> Option<Vec<Int>> {
    let (h, u, rank) = hnf_with_transform(m);
    let mut t = target.to_vec();
    let mut coeffs = vec![Int::zero(); m.rows()];
    for i in 0..rank {
        let col = (0..m.cols()).find(|&j| !h.at(i, j).is_zero()).unwrap();
        let q = t[col].div_floor(h.at(i, col));
        if q.is_zero() {
            continue;
        }
        for j in 0..m.cols() {
            let val = &t[j] - &(&q * h.at(i, j));
            t[j] = val;
        }
        coeffs[i] = q;
    }
    if t.iter().any(|c| !c.is_zero()) {
        return None;
    }
    Some(u.apply_row(&coeffs))
}

/// Bound used when a scan has no certified period: a fruitless bounded scan
/// is then inconclusive rather than negative.
const FALLBACK_SCAN: i64 = 64;

const PERIOD_CAP: i64 = 1_000_000;

/// Isolator (isolated closure) of S in G: all g with g^t in S for some
/// t >= 1.
///
/// The lattice part is always the saturation of W. For the x part the
/// divisors e' of e are tried in increasing order; for each, solvability of
/// v * (I + X^{e'} + ... + X^{e'(t-1)}) = tau(s) mod W is scanned over s,
/// where t = (e/e') s. With W full rank the scan range E * lcm(1..class) is
/// a proven period of both sides of the congruence (E the exponent of
/// Z^n / W), so a fruitless scan certifies that no element with that x
/// exponent has a power in S. With W rank deficient a fruitless scan proves
/// nothing and the divisor is reported unresolved instead of guessed.
pub fn sg_isolator(g: &GroupDesc, s: &SubgroupDesc) -> Result<SubgroupDesc, GroupError> {
    let n = g.rank();
    let wsat = s.w.saturate();
    if s.e.is_zero() || matches!(g, GroupDesc::FreeAbelian { .. }) {
        return SubgroupDesc::lattice_only(g, wsat);
    }
    let e = to_exp(&s.e);
    let h0 = s.head().expect("e > 0");
    let exact_period = lattice_exponent(&s.w).map(|ex| &ex * lcm_up_to(g.action_class()));
    let period = match &exact_period {
        Some(p) => p.to_i64().filter(|&v| v <= PERIOD_CAP).ok_or_else(|| {
            GroupError::Unresolved(String::from("isolator period bound is out of range"))
        })?,
        None => FALLBACK_SCAN,
    };
    for ep in (1..=e).filter(|d| e % d == 0) {
        let xep = g.xpow(&int(ep));
        let steps = e / ep;
        let mut found: Option<AffineElement> = None;
        for sstep in 1..=period {
            let t = match steps.checked_mul(sstep) {
                Some(t) => t,
                None => {
                    return Err(GroupError::Unresolved(String::from(
                        "isolator scan overflow",
                    )))
                }
            };
            let sum = geometric_sum(&xep, t as u64);
            let tau = g.pow(&h0, &int(sstep)).v;
            let mut rows = sum.row_vecs();
            rows.extend(s.w.basis_rows());
            let stacked = IntMatrix::from_rows(n, &rows);
            if let Some(y) = solve_integer_row(&stacked, &tau) {
                let cand = AffineElement::new(int(ep), y[..n].to_vec());
                debug_assert!(sg_member(g, s, &g.pow(&cand, &int(t))));
                found = Some(cand);
                break;
            }
        }
        match found {
            Some(cand) => {
                // The isolator is a subgroup, so its lattice part sat(W) is
                // invariant under x^{e'}; the constructor re-checks this.
                return SubgroupDesc::new(g, int(ep), wsat, cand.v);
            }
            None if exact_period.is_none() => {
                return Err(GroupError::Unresolved(format!(
                    "isolator x-step undecided at divisor {ep} (rank-deficient lattice part)"
                )));
            }
            None => {}
        }
    }
    unreachable!("the divisor e itself succeeds at the first step")
}

/// Intersection of two subgroup descriptors.
///
/// The lattice parts intersect exactly. The x step is found by scanning
/// common multiples k = lcm(e1,e2) t of the two steps for a solvable coset
/// equation tau2(k/e2) - tau1(k/e1) in W1 + W2; the solvable k form a
/// subgroup of Z, so the smallest one generates all of them. With W1 + W2
/// full rank the scan bound is a certified period and a fruitless scan
/// proves the intersection has no x part; otherwise a fruitless bounded
/// scan is reported as unresolved.
pub fn sg_intersect(
    g: &GroupDesc,
    s1: &SubgroupDesc,
    s2: &SubgroupDesc,
) -> Result<SubgroupDesc, GroupError> {
    let n = g.rank();
    let wcap = s1.w.intersect(&s2.w)?;
    if s1.e.is_zero() || s2.e.is_zero() {
        return SubgroupDesc::lattice_only(g, wcap);
    }
    let e1 = to_exp(&s1.e);
    let e2 = to_exp(&s2.e);
    let m0 = (e1 / e1.gcd(&e2)) * e2;
    let h1 = s1.head().expect("e > 0");
    let h2 = s2.head().expect("e > 0");
    let vsum = s1.w.sum(&s2.w)?;
    let exact_period = lattice_exponent(&vsum).map(|ex| &ex * lcm_up_to(g.action_class()));
    let period = match &exact_period {
        Some(p) => p.to_i64().filter(|&v| v <= PERIOD_CAP).ok_or_else(|| {
            GroupError::Unresolved(String::from("intersection period bound is out of range"))
        })?,
        None => FALLBACK_SCAN,
    };
    for t in 1..=period {
        let k = match m0.checked_mul(t) {
            Some(k) => k,
            None => {
                return Err(GroupError::Unresolved(String::from(
                    "intersection scan overflow",
                )))
            }
        };
        let tau1 = g.pow(&h1, &int(k / e1)).v;
        let tau2 = g.pow(&h2, &int(k / e2)).v;
        let delta = vec_sub(&tau2, &tau1);
        // Solve w1 - w2 = tau2 - tau1 with wi in Wi.
        let mut rows = s1.w.basis_rows();
        let r1 = rows.len();
        rows.extend(
            s2.w.basis_rows()
                .into_iter()
                .map(|r| r.into_iter().map(|c| -c).collect::<Vec<Int>>()),
        );
        let stacked = IntMatrix::from_rows(n, &rows);
        if let Some(y) = solve_integer_row(&stacked, &delta) {
            let mut v = tau1.clone();
            for (i, c) in y[..r1].iter().enumerate() {
                let row = s1.w.basis().row(i);
                for j in 0..n {
                    let val = &v[j] + &(c * &row[j]);
                    v[j] = val;
                }
            }
            let cand = AffineElement::new(int(k), v);
            debug_assert!(sg_member(g, s1, &cand) && sg_member(g, s2, &cand));
            return SubgroupDesc::new(g, int(k), wcap, cand.v);
        }
    }
    if exact_period.is_some() {
        SubgroupDesc::lattice_only(g, wcap)
    } else {
        Err(GroupError::Unresolved(String::from(
            "intersection x-step search inconclusive for rank-deficient lattice sum",
        )))
    }
}

/// Quotient of a nonabelian affine group by its center, with the projection
/// data needed to push elements and subgroups down and pull subgroups back.
pub struct CenterQuotient {
    pub parent: GroupDesc,
    pub group: GroupDesc,
    /// Unimodular basis matrix; its first `center_rank` rows span the center
    /// lattice.
    pub p: IntMatrix,
    pub pinv: IntMatrix,
    pub center_rank: usize,
}

pub fn quotient_by_center(g: &GroupDesc) -> Result<CenterQuotient, GroupError> {
    let GroupDesc::Affine { rank, x } = g else {
        return Err(GroupError::InvalidSubgroup(String::from(
            "center quotient needs an affine group",
        )));
    };
    let n = *rank;
    if g.is_abelian() {
        return Err(GroupError::InvalidSubgroup(String::from(
            "center quotient of an abelian group is trivial",
        )));
    }
    let nm = x.sub(&IntMatrix::identity(n));
    let z = crate::lattice::int_row_kernel(&nm);
    let r = z.rank();
    debug_assert!(r >= 1, "unipotent actions always fix a vector");
    let s = snf(z.basis());
    debug_assert!((0..r).all(|i| s.d.at(i, i).is_one()));
    let p = s.vinv.clone();
    let pinv = p
        .inverse_unimodular()
        .map_err(|e| GroupError::Lattice(e.into()))?;
    // Action in the new coordinates: c -> c * (P X Pinv). The center rows
    // are fixed vectors, so the top-left block is the identity, the
    // top-right block vanishes, and the quotient action is the bottom-right
    // block. The bottom-left block is the twisting into the center, which
    // the quotient forgets.
    let m = p.mul(x).mul(&pinv);
    let mut xbar = IntMatrix::zero(n - r, n - r);
    for i in r..n {
        for j in r..n {
            *xbar.at_mut(i - r, j - r) = m.at(i, j).clone();
        }
    }
    for i in 0..r {
        for j in r..n {
            debug_assert!(m.at(i, j).is_zero());
        }
    }
    let group = GroupDesc::affine(xbar)?;
    Ok(CenterQuotient { parent: g.clone(), group, p, pinv, center_rank: r })
}

impl CenterQuotient {
    pub fn project_element(&self, a: &AffineElement) -> AffineElement {
        let c = self.pinv.apply_row(&a.v);
        AffineElement::new(a.k.clone(), c[self.center_rank..].to_vec())
    }

    pub fn project_subgroup(&self, s: &SubgroupDesc) -> Result<SubgroupDesc, GroupError> {
        let nq = self.group.rank();
        let rows: Vec<Vec<Int>> = s
            .w
            .basis_rows()
            .into_iter()
            .map(|r| self.pinv.apply_row(&r)[self.center_rank..].to_vec())
            .collect();
        let w = Lattice::from_rows(nq, &rows);
        match s.head() {
            None => SubgroupDesc::lattice_only(&self.group, w),
            Some(h0) => {
                let hb = self.project_element(&h0);
                SubgroupDesc::new(&self.group, s.e.clone(), w, hb.v)
            }
        }
    }

    /// Full preimage of a subgroup of the quotient.
    pub fn preimage_subgroup(&self, sbar: &SubgroupDesc) -> Result<SubgroupDesc, GroupError> {
        let n = self.p.rows();
        let r = self.center_rank;
        let lift = |row: &[Int]| -> Vec<Int> {
            let mut c = vec![Int::zero(); n];
            c[r..].clone_from_slice(row);
            self.p.apply_row(&c)
        };
        let mut rows: Vec<Vec<Int>> = Vec::new();
        for i in 0..r {
            rows.push(self.p.row(i).to_vec());
        }
        for row in sbar.w().basis_rows() {
            rows.push(lift(&row));
        }
        let w = Lattice::from_rows(n, &rows);
        match sbar.head() {
            None => SubgroupDesc::lattice_only(&self.parent, w),
            Some(h0) => SubgroupDesc::new(&self.parent, h0.k, w, lift(&h0.v)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, RatMatrix};

    fn heis() -> GroupDesc {
        GroupDesc::affine(IntMatrix::from_i64(&[&[1, 1], &[0, 1]])).unwrap()
    }

    fn elem(k: i64, v: &[i64]) -> AffineElement {
        AffineElement::new(int(k), v.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn multiplication_matches_matrix_model() {
        // In the 3x3 unitriangular model, M(a,b,c) M(a',b',c') has entries
        // (a+a', b+b', c+c'+b a'). Here M(a,b,c) = x^a (b, c).
        let g = heis();
        let m1 = elem(2, &[3, 5]);
        let m2 = elem(1, &[7, 11]);
        assert_eq!(g.mul(&m1, &m2), elem(3, &[10, 19]));
        let inv = g.inv(&m1);
        assert!(g.mul(&m1, &inv).is_identity());
        // Conjugation x^{-1} v x = v X.
        let x = elem(1, &[0, 0]);
        let b = elem(0, &[1, 0]);
        assert_eq!(g.conjugate(&b, &x), elem(0, &[1, 1]));
        // [b, x] = z with [g, h] = g^{-1} h^{-1} g h.
        assert_eq!(g.commutator(&b, &x), elem(0, &[0, 1]));
    }

    #[test]
    fn powers_use_geometric_sums() {
        let g = heis();
        let a = elem(1, &[1, 0]);
        // (x (1,0))^4 = x^4 (4, 0+1+2+3).
        assert_eq!(g.pow(&a, &int(4)), elem(4, &[4, 6]));
        for j in -6i64..=6 {
            let mut acc = g.identity();
            let step = if j >= 0 { a.clone() } else { g.inv(&a) };
            for _ in 0..j.abs() {
                acc = g.mul(&acc, &step);
            }
            assert_eq!(acc, g.pow(&a, &int(j)), "power {j}");
        }
    }

    #[test]
    fn closure_of_a_cubed_b_squared() {
        let g = heis();
        let s = sg_closure(&g, &[elem(3, &[0, 0]), elem(0, &[2, 0])]).unwrap();
        assert_eq!(s.e(), &int(3));
        assert_eq!(s.w(), &Lattice::from_i64_rows(2, &[&[2, 0], &[0, 6]]));
        assert_eq!(sg_index(&g, &s), IndexResult::Finite(int(36)));
    }

    #[test]
    fn membership_and_coset_reps() {
        let g = heis();
        let s = SubgroupDesc::new(
            &g,
            int(2),
            Lattice::from_i64_rows(2, &[&[1, 0], &[0, 2]]),
            alloc::vec![int(0), int(0)],
        )
        .unwrap();
        assert!(sg_member(&g, &s, &elem(2, &[1, 0])));
        assert!(sg_member(&g, &s, &elem(0, &[1, 2])));
        assert!(!sg_member(&g, &s, &elem(1, &[0, 0])));
        assert!(!sg_member(&g, &s, &elem(0, &[0, 1])));
        // Reps are constant on cosets and equivalent to the input.
        let a = elem(1, &[4, 7]);
        let w = elem(0, &[1, 0]);
        assert_eq!(coset_rep(&g, &s, &a), coset_rep(&g, &s, &g.mul(&w, &a)));
        let r = coset_rep(&g, &s, &a);
        assert!(sg_member(&g, &s, &g.mul(&a, &g.inv(&r))));
        let h0 = s.head().unwrap();
        let ha = g.mul(&g.pow(&h0, &int(-3)), &a);
        assert_eq!(coset_rep(&g, &s, &a), coset_rep(&g, &s, &ha));
    }

    #[test]
    fn intro_transversal_order() {
        let g = heis();
        let s = SubgroupDesc::new(
            &g,
            int(2),
            Lattice::from_i64_rows(2, &[&[1, 0], &[0, 2]]),
            alloc::vec![int(0), int(0)],
        )
        .unwrap();
        let t = sg_transversal(&g, &s).unwrap();
        assert_eq!(
            t,
            alloc::vec![
                elem(0, &[0, 0]),
                elem(0, &[0, 1]),
                elem(1, &[0, 0]),
                elem(1, &[0, 1])
            ]
        );
        for rep in &t {
            assert_eq!(&coset_rep(&g, &s, rep), rep);
        }
    }

    #[test]
    fn rejects_non_invariant_lattice() {
        let g = heis();
        let bad = SubgroupDesc::new(
            &g,
            int(1),
            Lattice::from_i64_rows(2, &[&[1, 0]]),
            alloc::vec![int(0), int(0)],
        );
        assert!(matches!(bad, Err(GroupError::InvalidSubgroup(_))));
    }

    #[test]
    fn central_series_of_heisenberg() {
        let g = heis();
        let data = central_data(&g);
        assert_eq!(data.class, 2);
        assert_eq!(data.derived_length, 2);
        assert_eq!(data.hirsch, 3);
        assert_eq!(data.upper[0].0, Lattice::from_i64_rows(2, &[&[0, 1]]));
        assert!(!data.upper[0].1);
        assert_eq!(data.upper[1].0, Lattice::full(2));
        assert!(data.upper[1].1);
        assert_eq!(data.lower[0], Lattice::from_i64_rows(2, &[&[0, 1]]));
        assert!(data.lower[1].is_zero());
    }

    #[test]
    fn subgroup_center_and_gamma() {
        let g = heis();
        let s = sg_closure(
            &g,
            &[elem(2, &[0, 0]), elem(0, &[1, 0]), elem(0, &[0, 2])],
        )
        .unwrap();
        let z = center_of_subgroup(&g, &s);
        assert!(z.e().is_zero());
        assert_eq!(z.w(), &Lattice::from_i64_rows(2, &[&[0, 2]]));
        assert!(!sg_is_abelian(&g, &s));
        assert_eq!(
            gamma_of_subgroup(&g, &s, 2),
            Lattice::from_i64_rows(2, &[&[0, 2]])
        );
        assert!(gamma_of_subgroup(&g, &s, 3).is_zero());
    }

    #[test]
    fn isolator_examples() {
        let g = heis();
        let s = SubgroupDesc::lattice_only(&g, Lattice::from_i64_rows(2, &[&[2, 4]])).unwrap();
        let iso = sg_isolator(&g, &s).unwrap();
        assert_eq!(iso.w(), &Lattice::from_i64_rows(2, &[&[1, 2]]));
        // sqrt of Z(G)<x^3> picks up x itself.
        let l = SubgroupDesc::new(
            &g,
            int(3),
            Lattice::from_i64_rows(2, &[&[0, 1]]),
            alloc::vec![int(0), int(0)],
        )
        .unwrap();
        let iso = sg_isolator(&g, &l).unwrap();
        assert_eq!(iso.e(), &int(1));
        assert_eq!(iso.w(), &Lattice::from_i64_rows(2, &[&[0, 1]]));
        assert_eq!(sg_isolator(&g, &iso).unwrap(), iso);
        // Finite index forces the isolator to be the whole group.
        let h = sg_closure(&g, &[elem(2, &[0, 0]), elem(0, &[1, 0]), elem(0, &[0, 1])]).unwrap();
        let ih = sg_isolator(&g, &h).unwrap();
        assert_eq!(ih, SubgroupDesc::whole_group(&g));
    }

    #[test]
    fn intersection_of_subgroups() {
        let g = heis();
        let s1 = SubgroupDesc::new(&g, int(2), Lattice::zero(2), alloc::vec![int(0), int(0)])
            .unwrap();
        let s2 = SubgroupDesc::new(&g, int(3), Lattice::zero(2), alloc::vec![int(0), int(0)])
            .unwrap();
        let cap = sg_intersect(&g, &s1, &s2).unwrap();
        assert_eq!(cap.e(), &int(6));
        assert!(cap.w().is_zero());

        let t1 = sg_closure(&g, &[elem(2, &[0, 0]), elem(0, &[1, 0]), elem(0, &[0, 1])]).unwrap();
        let t2 = sg_closure(&g, &[elem(3, &[0, 0]), elem(0, &[3, 0]), elem(0, &[0, 1])]).unwrap();
        let cap = sg_intersect(&g, &t1, &t2).unwrap();
        assert_eq!(cap.e(), &int(6));
        assert_eq!(cap.w(), &Lattice::from_i64_rows(2, &[&[3, 0], &[0, 1]]));
        for gen in cap.generators() {
            assert!(sg_member(&g, &t1, &gen));
            assert!(sg_member(&g, &t2, &gen));
        }
    }

    #[test]
    fn center_quotient_of_heisenberg() {
        let g = heis();
        let q = quotient_by_center(&g).unwrap();
        assert_eq!(q.group.rank(), 1);
        assert!(q.group.is_abelian());
        let b = q.project_element(&elem(0, &[1, 0]));
        assert_eq!(b.v, alloc::vec![int(1)]);
        let z = q.project_element(&elem(0, &[0, 1]));
        assert!(z.v[0].is_zero());
        let s = sg_closure(&g, &[elem(2, &[0, 0]), elem(0, &[1, 0]), elem(0, &[0, 2])]).unwrap();
        let sbar = q.project_subgroup(&s).unwrap();
        assert_eq!(sbar.e(), &int(2));
        assert_eq!(sbar.w(), &Lattice::full(1));
        let back = q.preimage_subgroup(&sbar).unwrap();
        assert!(sg_member(&g, &back, &elem(0, &[0, 1])));
        assert!(sg_member(&g, &back, &elem(2, &[0, 0])));
        assert!(!sg_member(&g, &back, &elem(1, &[0, 0])));
    }

    #[test]
    fn relative_index_multiplies() {
        let g = heis();
        let s = sg_closure(&g, &[elem(1, &[0, 0]), elem(0, &[1, 0]), elem(0, &[0, 1])]).unwrap();
        let t = sg_closure(&g, &[elem(2, &[0, 0]), elem(0, &[2, 0]), elem(0, &[0, 2])]).unwrap();
        assert_eq!(
            sg_relative_index(&g, &s, &t).unwrap(),
            IndexResult::Finite(int(8))
        );
        let whole = SubgroupDesc::whole_group(&g);
        assert_eq!(sg_relative_index(&g, &whole, &t).unwrap(), sg_index(&g, &t));
    }

    #[test]
    fn free_abelian_shapes() {
        let g = GroupDesc::free_abelian(2);
        let s = SubgroupDesc::lattice_only(&g, Lattice::from_i64_rows(2, &[&[2, 0], &[0, 1]]))
            .unwrap();
        assert_eq!(sg_index(&g, &s), IndexResult::Finite(int(2)));
        let t = sg_transversal(&g, &s).unwrap();
        assert_eq!(t.len(), 2);
        assert!(sg_member(&g, &s, &elem(0, &[2, 0])));
        assert!(!sg_member(&g, &s, &elem(0, &[1, 0])));
        assert_eq!(central_data(&g).class, 1);
    }

    #[test]
    fn unipotent_action_required() {
        let bad = GroupDesc::affine(IntMatrix::from_i64(&[&[2, 0], &[0, 1]]));
        assert!(matches!(bad, Err(GroupError::NotUnipotent)));
        assert!(GroupDesc::affine(IntMatrix::from_i64(&[&[1, 5], &[0, 1]])).is_ok());
    }

    #[test]
    fn upper_central_subgroups() {
        let g = heis();
        let z1 = upper_central_subgroup(&g, 1);
        assert!(z1.e().is_zero());
        assert_eq!(z1.w(), &Lattice::from_i64_rows(2, &[&[0, 1]]));
        let z2 = upper_central_subgroup(&g, 2);
        assert_eq!(z2.e(), &int(1));
        assert!(z2.w().is_full_rank());
    }

    #[test]
    fn saturation_preserves_semi_invariance() {
        // If B * A is inside B then sat(B) * A is inside sat(B).
        let b = Lattice::from_i64_rows(2, &[&[2, 0], &[0, 6]]);
        let a = RatMatrix::new(
            2,
            2,
            alloc::vec![rat(0, 1), rat(3, 1), rat(1, 1), rat(0, 1)],
        );
        assert!(b.is_invariant_under(&a));
        assert!(b.saturate().is_invariant_under(&a));
    }
}
