//! Virtual endomorphisms of finitely generated torsion-free nilpotent
//! groups.
//!
//! A triple couples a group descriptor with a finite-index subgroup H and a
//! homomorphism f: H -> G, given either as a rational matrix acting on row
//! vectors (free abelian groups) or by the images of the polycyclic
//! generating sequence of H (affine groups). Construction validates the
//! data; everything downstream (simplicity decisions, invariant subgroup
//! searches, index reports) starts from a validated [`Triple`].

pub mod center;
pub mod registry;
pub mod reports;
pub mod simple;
pub mod strong;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use ::core::fmt;
use num_integer::Integer;
use num_traits::Zero;

use crate::arith::{ArithError, Int, Rat, RatMatrix};
use crate::lattice::{IndexResult, LatticeError};
use crate::nilgroup::{
    coset_rep, sg_closure, sg_index, sg_member, sg_transversal, AffineElement, GroupDesc,
    GroupError, SubgroupDesc,
};

pub use center::{center_restriction, translation_action, CenterRestriction, TranslationAction};
pub use registry::{make_example, registered_names, AtomDef, AtomSpec, RegistryObject};
pub use reports::{
    bounds_report, derived_chain, finite_state_predict, pq_theorem_check, prop3_data, thm13_check,
    BoundsReport, ChainReport, ChainStep, CheckStatus, IndexReport, PqReport, PredictOutcome,
    PredictReport, Prop3Report, QuotientInfo, RecurrentData,
};
pub use simple::{core_compute, simplicity_decide, CoreChain, CoreReport, TripleVerdict,
    DEFAULT_CORE_ITER};
pub use strong::{strong_simplicity, StrongBounds, StrongOutcome};

#[derive(Debug)]
pub enum VendError {
    Group(GroupError),
    Lattice(LatticeError),
    Arith(ArithError),
    /// Triple data failed validation; the report lists every check.
    Invalid(ValidationReport),
    /// Asked to evaluate f outside its domain.
    NotInSubgroup(String),
    /// The operation is outside what this code can certify.
    Unsupported(String),
}

impl From<GroupError> for VendError {
    fn from(e: GroupError) -> Self {
        VendError::Group(e)
    }
}

impl From<LatticeError> for VendError {
    fn from(e: LatticeError) -> Self {
        VendError::Lattice(e)
    }
}

impl From<ArithError> for VendError {
    fn from(e: ArithError) -> Self {
        VendError::Arith(e)
    }
}

impl fmt::Display for VendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VendError::Group(e) => write!(f, "group error: {e}"),
            VendError::Lattice(e) => write!(f, "lattice error: {e}"),
            VendError::Arith(e) => write!(f, "arithmetic error: {e}"),
            VendError::Invalid(r) => {
                write!(f, "invalid triple:")?;
                for c in &r.checks {
                    if !c.ok {
                        write!(f, " [{}]", c.label)?;
                        if let Some(w) = &c.witness {
                            write!(f, " ({w})")?;
                        }
                    }
                }
                Ok(())
            }
            VendError::NotInSubgroup(s) => write!(f, "not in the subgroup: {s}"),
            VendError::Unsupported(s) => write!(f, "unsupported: {s}"),
        }
    }
}

/// How the homomorphism f: H -> G is presented.
#[derive(Debug, Clone, PartialEq)]
pub enum HomDesc {
    /// Free abelian case: v maps to v * a. Validation requires W * a to be
    /// integral, where W is the lattice of the subgroup.
    Abelian { a: RatMatrix },
    /// Affine case: images of the polycyclic generating sequence of H,
    /// the head x^e * u0 first, then one image per HNF basis row of W.
    Affine {
        img_head: AffineElement,
        img_lattice: Vec<AffineElement>,
    },
}

/// One validation condition with an optional witness for the failure (or,
/// for a few informative checks, for the success).
#[derive(Debug, Clone)]
pub struct Check {
    pub label: String,
    pub ok: bool,
    pub witness: Option<String>,
}

impl Check {
    fn ok(label: &str) -> Check {
        Check { label: label.to_string(), ok: true, witness: None }
    }

    fn fail(label: &str, witness: String) -> Check {
        Check { label: label.to_string(), ok: false, witness: Some(witness) }
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// The index [G : H] when finite.
    pub m: Option<Int>,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.m.is_some() && self.checks.iter().all(|c| c.ok)
    }
}

/// A validated triple (G, H, f) together with a right transversal of H in G
/// and the degree m = [G : H].
#[derive(Debug, Clone)]
pub struct Triple {
    pub group: GroupDesc,
    pub h: SubgroupDesc,
    pub f: HomDesc,
    pub transversal: Vec<AffineElement>,
    pub m: Int,
}

impl Triple {
    /// Validate and build, with the canonical transversal.
    pub fn new(group: GroupDesc, h: SubgroupDesc, f: HomDesc) -> Result<Triple, VendError> {
        let report = triple_validate(&group, &h, &f, None);
        if !report.passed() {
            return Err(VendError::Invalid(report));
        }
        let m = report.m.clone().expect("validated index");
        let transversal = sg_transversal(&group, &h).expect("validated finite index");
        Ok(Triple { group, h, f, transversal, m })
    }

    /// Validate and build with an explicit transversal.
    pub fn with_transversal(
        group: GroupDesc,
        h: SubgroupDesc,
        f: HomDesc,
        transversal: Vec<AffineElement>,
    ) -> Result<Triple, VendError> {
        let report = triple_validate(&group, &h, &f, Some(&transversal));
        if !report.passed() {
            return Err(VendError::Invalid(report));
        }
        let m = report.m.clone().expect("validated index");
        Ok(Triple { group, h, f, transversal, m })
    }

    /// The degree as a machine integer; `None` when it does not fit.
    pub fn degree_usize(&self) -> Option<usize> {
        use num_traits::ToPrimitive;
        self.m.to_usize()
    }
}

/// Check every condition the triple data must satisfy. Nothing is assumed;
/// a failed report lists each broken condition with a witness.
pub fn triple_validate(
    group: &GroupDesc,
    h: &SubgroupDesc,
    f: &HomDesc,
    transversal: Option<&[AffineElement]>,
) -> ValidationReport {
    let n = group.rank();
    let mut checks: Vec<Check> = Vec::new();

    let m = match sg_index(group, h) {
        IndexResult::Finite(v) => {
            checks.push(Check {
                label: "subgroup has finite index".to_string(),
                ok: true,
                witness: Some(format!("index {v}")),
            });
            Some(v)
        }
        IndexResult::Infinite => {
            checks.push(Check::fail(
                "subgroup has finite index",
                "the index is infinite".to_string(),
            ));
            None
        }
    };

    match f {
        HomDesc::Abelian { a } => {
            if matches!(group, GroupDesc::FreeAbelian { .. }) {
                checks.push(Check::ok("matrix form matches a free abelian group"));
            } else {
                checks.push(Check::fail(
                    "matrix form matches a free abelian group",
                    "the group is affine; use the image list form".to_string(),
                ));
            }
            if a.rows() == n && a.cols() == n {
                checks.push(Check::ok("matrix is square of the ambient rank"));
                let mut bad: Option<String> = None;
                for (i, row) in h.w().basis_rows().into_iter().enumerate() {
                    let rv: Vec<Rat> = row.iter().map(|c| Rat::from(c.clone())).collect();
                    let img = a.apply_row(&rv);
                    if img.iter().any(|c| !c.is_integer()) {
                        bad = Some(format!("basis row {i} has a non-integral image"));
                        break;
                    }
                }
                match bad {
                    None => checks.push(Check::ok("f maps the subgroup into the group")),
                    Some(w) => checks.push(Check::fail("f maps the subgroup into the group", w)),
                }
            } else {
                checks.push(Check::fail(
                    "matrix is square of the ambient rank",
                    format!("got {}x{}, need {n}x{n}", a.rows(), a.cols()),
                ));
            }
        }
        HomDesc::Affine { img_head, img_lattice } => {
            if matches!(group, GroupDesc::Affine { .. }) {
                checks.push(Check::ok("image list form matches an affine group"));
            } else {
                checks.push(Check::fail(
                    "image list form matches an affine group",
                    "the group is free abelian; use the matrix form".to_string(),
                ));
                return ValidationReport { m, checks };
            }
            if h.e().is_zero() {
                checks.push(Check::fail(
                    "subgroup has a cyclic head",
                    "e = 0, so the subgroup has infinite index".to_string(),
                ));
                return ValidationReport { m, checks };
            }
            let rk = h.w().rank();
            if img_lattice.len() != rk {
                checks.push(Check::fail(
                    "one image per lattice generator",
                    format!("{} images for {rk} generators", img_lattice.len()),
                ));
                return ValidationReport { m, checks };
            }
            checks.push(Check::ok("one image per lattice generator"));
            if img_head.v.len() != n || img_lattice.iter().any(|g| g.v.len() != n) {
                checks.push(Check::fail(
                    "images live in the ambient group",
                    format!("an image vector does not have length {n}"),
                ));
                return ValidationReport { m, checks };
            }
            checks.push(Check::ok("images live in the ambient group"));

            let mut comm: Option<String> = None;
            'outer: for i in 0..img_lattice.len() {
                for j in (i + 1)..img_lattice.len() {
                    let ab = group.mul(&img_lattice[i], &img_lattice[j]);
                    let ba = group.mul(&img_lattice[j], &img_lattice[i]);
                    if ab != ba {
                        comm = Some(format!("images {i} and {j}: {ab} against {ba}"));
                        break 'outer;
                    }
                }
            }
            match comm {
                None => checks.push(Check::ok("images of commuting generators commute")),
                Some(w) => {
                    checks.push(Check::fail("images of commuting generators commute", w))
                }
            }

            // Conjugation by the head must be respected: the image of
            // w X^e, rewritten in W-coordinates, has to match the
            // conjugate of the image of w by the image of the head.
            let head = h.head().expect("e > 0");
            let mut conj: Option<String> = None;
            for (i, row) in h.w().basis_rows().into_iter().enumerate() {
                let moved = group.conjugate(&AffineElement::translation(row), &head);
                debug_assert!(moved.k.is_zero());
                let Some(coords) = h.w().coordinates(&moved.v) else {
                    conj = Some(format!("row {i}: the lattice is not X^e-invariant"));
                    break;
                };
                let lhs = group.conjugate(&img_lattice[i], img_head);
                let mut rhs = group.identity();
                for (j, c) in coords.iter().enumerate() {
                    if !c.is_zero() {
                        rhs = group.mul(&rhs, &group.pow(&img_lattice[j], c));
                    }
                }
                if lhs != rhs {
                    conj = Some(format!("generator {i}: {lhs} against {rhs}"));
                    break;
                }
            }
            match conj {
                None => checks.push(Check::ok("conjugation by the head is respected")),
                Some(w) => checks.push(Check::fail("conjugation by the head is respected", w)),
            }
        }
    }

    if let Some(ts) = transversal {
        if let Some(mv) = &m {
            let count_ok = Int::from(ts.len()) == *mv;
            if count_ok {
                checks.push(Check::ok("transversal size equals the degree"));
            } else {
                checks.push(Check::fail(
                    "transversal size equals the degree",
                    format!("{} representatives for degree {mv}", ts.len()),
                ));
            }
            let mut reps: Vec<AffineElement> =
                ts.iter().map(|t| coset_rep(group, h, t)).collect();
            reps.sort();
            let distinct = reps.windows(2).all(|w| w[0] != w[1]);
            if distinct {
                checks.push(Check::ok("transversal hits each coset once"));
            } else {
                checks.push(Check::fail(
                    "transversal hits each coset once",
                    "two representatives share a coset".to_string(),
                ));
            }
        }
    }

    ValidationReport { m, checks }
}

/// Evaluate f at a member of H.
pub fn f_eval(t: &Triple, a: &AffineElement) -> Result<AffineElement, VendError> {
    if !sg_member(&t.group, &t.h, a) {
        return Err(VendError::NotInSubgroup(format!("{a}")));
    }
    match &t.f {
        HomDesc::Abelian { a: mat } => {
            let rv: Vec<Rat> = a.v.iter().map(|c| Rat::from(c.clone())).collect();
            let img = mat.apply_row(&rv);
            let v: Vec<Int> = img
                .into_iter()
                .map(|c| {
                    debug_assert!(c.is_integer(), "validated integrality");
                    c.to_integer()
                })
                .collect();
            Ok(AffineElement::translation(v))
        }
        HomDesc::Affine { img_head, img_lattice } => {
            let e = t.h.e();
            let (j, r) = a.k.div_rem(e);
            debug_assert!(r.is_zero(), "membership forces e | k");
            let hj = t.group.pow(&t.h.head().expect("e > 0"), &j);
            let w = t.group.mul(&t.group.inv(&hj), a);
            debug_assert!(w.k.is_zero());
            let coords = t
                .h
                .w()
                .coordinates(&w.v)
                .expect("membership gives lattice coordinates");
            let mut out = t.group.pow(img_head, &j);
            for (i, c) in coords.iter().enumerate() {
                if !c.is_zero() {
                    out = t.group.mul(&out, &t.group.pow(&img_lattice[i], c));
                }
            }
            Ok(out)
        }
    }
}

/// Image of a subgroup of H under f, as a subgroup descriptor.
pub fn sg_image(t: &Triple, s: &SubgroupDesc) -> Result<SubgroupDesc, VendError> {
    let mut imgs = Vec::new();
    for gen in s.generators() {
        imgs.push(f_eval(t, &gen)?);
    }
    sg_closure(&t.group, &imgs).map_err(VendError::Group)
}

/// The image subgroup H^f with its index data.
#[derive(Debug, Clone)]
pub struct ImageData {
    pub hf: SubgroupDesc,
    /// m' = [G : H^f].
    pub m_prime: IndexResult,
    /// f is recurrent when it is onto, that is m' = 1.
    pub recurrent: bool,
    /// Hirsch length comparison decides injectivity exactly for
    /// torsion-free polycyclic domains.
    pub injective: bool,
}

pub fn image_data(t: &Triple) -> Result<ImageData, VendError> {
    let hf = sg_image(t, &t.h)?;
    let m_prime = sg_index(&t.group, &hf);
    let recurrent = m_prime.is_one();
    let injective = hf.hirsch() == t.h.hirsch();
    Ok(ImageData { hf, m_prime, recurrent, injective })
}
