//! Restriction of a virtual endomorphism to the center, and the linear
//! action of f on translations.
//!
//! For a nonabelian affine group the center is the fixed lattice of the
//! action, f restricts to it, and the restricted map is a plain rational
//! matrix. The maximal f-invariant sublattice of Z(H) decides simplicity:
//! any nontrivial normal f-invariant subgroup meets the center in a
//! nontrivial f-invariant sublattice, and conversely every f-invariant
//! sublattice of the center is normal in the whole group.

use alloc::string::ToString;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::arith::{Int, IntMatrix, Rat, RatMatrix};
use crate::lattice::{int_row_kernel, invariant_core, IndexResult, Lattice};
use crate::nilgroup::{center_of_subgroup, AffineElement, GroupDesc, SubgroupDesc};

use super::{f_eval, HomDesc, Triple, VendError};

/// The center pair (Z(G), Z(H)) with the matrix of f restricted to it, all
/// written in coordinates of the basis of Z(G).
#[derive(Debug, Clone)]
pub struct CenterRestriction {
    /// Z(G) as a saturated lattice in the ambient space.
    pub zg: Lattice,
    /// Z(H) = W intersected with the fixed space, in the ambient space.
    pub zh: Lattice,
    /// Action of f on Z(G)-coordinates; maps Z(H)-coordinates integrally.
    pub a: RatMatrix,
    /// Maximal f-invariant sublattice of Z(H), in Z(G)-coordinates.
    pub core_coords: Lattice,
    /// The same sublattice as a subgroup of G.
    pub core: SubgroupDesc,
    /// q = [Z(G) : Z(H)].
    pub q: IndexResult,
}

fn rat_row(v: &[Int]) -> Vec<Rat> {
    v.iter().map(|c| Rat::from(c.clone())).collect()
}

/// Compute the center restriction of a triple over a nonabelian affine
/// group. Fails with `Unsupported` when f does not map Z(H) into Z(G);
/// callers treat that as "no certificate", never as a verdict.
pub fn center_restriction(t: &Triple) -> Result<CenterRestriction, VendError> {
    let g = &t.group;
    let GroupDesc::Affine { rank, x } = g else {
        return Err(VendError::Unsupported(
            "center restriction needs an affine group".to_string(),
        ));
    };
    let n = *rank;
    if g.is_abelian() {
        return Err(VendError::Unsupported(
            "center restriction of an abelian group is the whole triple".to_string(),
        ));
    }
    let zg = int_row_kernel(&x.sub(&IntMatrix::identity(n)));
    let zh_desc = center_of_subgroup(g, &t.h);
    debug_assert!(zh_desc.e().is_zero(), "x^e is never central for x != 1");
    let zh = zh_desc.w().clone();
    let q = zg.index_of_sublattice(&zh)?;

    let r = zg.rank();
    let mut zc_rows: Vec<Vec<Rat>> = Vec::with_capacity(zh.rank());
    let mut img_rows: Vec<Vec<Rat>> = Vec::with_capacity(zh.rank());
    for row in zh.basis_rows() {
        let c = zg
            .coordinates(&row)
            .expect("the fixed lattice is saturated");
        let img = f_eval(t, &AffineElement::translation(row))?;
        if !img.k.is_zero() {
            return Err(VendError::Unsupported(
                "f does not map the center of H into the center of G".to_string(),
            ));
        }
        let Some(ic) = zg.coordinates(&img.v) else {
            return Err(VendError::Unsupported(
                "f does not map the center of H into the center of G".to_string(),
            ));
        };
        zc_rows.push(rat_row(&c));
        img_rows.push(rat_row(&ic));
    }
    let zc = RatMatrix::from_rows(r, &zc_rows);
    let fc = RatMatrix::from_rows(r, &img_rows);
    let a = zc.inverse()?.mul(&fc);

    let zh_coords = Lattice::from_rows(
        r,
        &zh.basis_rows()
            .into_iter()
            .map(|row| zg.coordinates(&row).expect("saturated"))
            .collect::<Vec<_>>(),
    );
    let core_coords = invariant_core(&zh_coords, &a)?;
    let b = zg.basis();
    let core_rows: Vec<Vec<Int>> = core_coords
        .basis_rows()
        .into_iter()
        .map(|c| b.apply_row(&c))
        .collect();
    let core = SubgroupDesc::lattice_only(g, Lattice::from_rows(n, &core_rows))?;
    Ok(CenterRestriction { zg, zh, a, core_coords, core, q })
}

/// The sublattice of W whose images under f are pure translations, with
/// the matrix of images. Rows of `tv` are the f-images of the HNF basis
/// rows of `w0`.
#[derive(Debug, Clone)]
pub struct TranslationAction {
    pub w0: Lattice,
    pub tv: IntMatrix,
}

/// Build the translation action of an affine triple. The x-exponent of an
/// image is linear on W, so `w0` is the kernel of that linear form
/// intersected with W.
pub fn translation_action(t: &Triple) -> Result<TranslationAction, VendError> {
    let HomDesc::Affine { img_lattice, .. } = &t.f else {
        return Err(VendError::Unsupported(
            "the translation action needs the image list form".to_string(),
        ));
    };
    let n = t.group.rank();
    let kappa_rows: Vec<Vec<Int>> =
        img_lattice.iter().map(|g| alloc::vec![g.k.clone()]).collect();
    let kernel = int_row_kernel(&IntMatrix::from_rows(1, &kappa_rows));
    let bw = t.h.w().basis();
    let rows: Vec<Vec<Int>> = kernel
        .basis_rows()
        .into_iter()
        .map(|c| bw.apply_row(&c))
        .collect();
    let w0 = Lattice::from_rows(n, &rows);
    let mut img_rows = Vec::with_capacity(w0.rank());
    for row in w0.basis_rows() {
        let img = f_eval(t, &AffineElement::translation(row))?;
        debug_assert!(img.k.is_zero(), "w0 was built from the exponent kernel");
        img_rows.push(img.v);
    }
    let tv = IntMatrix::from_rows(n, &img_rows);
    Ok(TranslationAction { w0, tv })
}

impl TranslationAction {
    /// Saturated lattice spanning { w in span(w0) : f(w) in span(v) }.
    pub fn preimage_span(&self, v: &Lattice) -> Lattice {
        let n = self.w0.ambient();
        if v.is_zero() {
            // Constraint: image must vanish.
            let y = int_row_kernel(&self.tv);
            let rows: Vec<Vec<Int>> = y
                .basis_rows()
                .into_iter()
                .map(|c| self.w0.basis().apply_row(&c))
                .collect();
            return Lattice::from_rows(n, &rows).saturate();
        }
        let c = int_row_kernel(&v.basis().transpose());
        let m = self.tv.mul(&c.basis().transpose());
        let y = int_row_kernel(&m);
        let rows: Vec<Vec<Int>> = y
            .basis_rows()
            .into_iter()
            .map(|c| self.w0.basis().apply_row(&c))
            .collect();
        Lattice::from_rows(n, &rows).saturate()
    }

    /// Exact preimage { w in w0 : f(w) in l }.
    pub fn preimage_lattice(&self, l: &Lattice) -> Lattice {
        let n = self.w0.ambient();
        let r0 = self.w0.rank();
        let mut stacked = self.tv.row_vecs();
        stacked.extend(l.basis_rows());
        let kernel = int_row_kernel(&IntMatrix::from_rows(n, &stacked));
        let rows: Vec<Vec<Int>> = kernel
            .basis_rows()
            .into_iter()
            .map(|yc| self.w0.basis().apply_row(&yc[..r0]))
            .collect();
        Lattice::from_rows(n, &rows)
    }

    /// Matrix of the action on span(v), written in the basis of v. Requires
    /// span(v) inside span(w0) and f-invariance of span(v); `None` when
    /// either fails.
    pub fn matrix_on(&self, v: &Lattice) -> Option<RatMatrix> {
        let b0: RatMatrix = self.w0.basis().to_rat();
        let bv: RatMatrix = v.basis().to_rat();
        let mut rows = Vec::with_capacity(v.rank());
        for row in v.basis_rows() {
            let y = b0.solve_row(&rat_row(&row))?;
            let img = self.tv.to_rat().apply_row(&y);
            let d = bv.solve_row(&img)?;
            rows.push(d);
        }
        Some(RatMatrix::from_rows(v.rank(), &rows))
    }

    /// Largest subspace of span(w0) stable under the preimage refinement,
    /// optionally also under conjugation by x. Returned as a saturated
    /// lattice; iteration stops at the first fixed point, which exists
    /// because ranks cannot decrease forever.
    pub fn stable_subspace(&self, x: &IntMatrix, with_conjugation: bool) -> Lattice {
        let xi = x
            .inverse_unimodular()
            .expect("unipotent integer matrices are unimodular");
        let mut v = self.w0.saturate();
        loop {
            let mut next = v.clone();
            if with_conjugation {
                let fwd = v.map_image(&x.to_rat()).expect("integer action");
                let bwd = v.map_image(&xi.to_rat()).expect("integer action");
                next = next.intersect(&fwd).expect("same ambient");
                next = next.intersect(&bwd).expect("same ambient");
            }
            let pre = self.preimage_span(&v);
            next = next.intersect(&pre).expect("same ambient");
            let next = next.saturate();
            if next == v {
                return v;
            }
            v = next;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::vend::registry::{make_example, RegistryObject};
    use alloc::vec;

    fn triple(name: &str) -> Triple {
        match make_example(name, None, None).unwrap() {
            RegistryObject::Triple(t) => t,
            _ => panic!("expected a triple"),
        }
    }

    #[test]
    fn intro_center_restriction_is_minus_one_half() {
        let t = triple("heisenberg-intro");
        let cr = center_restriction(&t).unwrap();
        assert_eq!(cr.zg, Lattice::from_i64_rows(2, &[&[0, 1]]));
        assert_eq!(cr.zh, Lattice::from_i64_rows(2, &[&[0, 2]]));
        assert_eq!(cr.q.finite(), Some(&int(2)));
        assert_eq!(cr.a.at(0, 0), &rat(-1, 2));
        assert!(cr.core_coords.is_zero());
        assert!(cr.core.is_trivial());
    }

    #[test]
    fn example33_center_core_is_z_to_the_sixth() {
        let t = triple("example33");
        let cr = center_restriction(&t).unwrap();
        assert_eq!(cr.zh, Lattice::from_i64_rows(2, &[&[0, 6]]));
        assert_eq!(cr.a.at(0, 0), &rat(1, 1));
        assert_eq!(cr.core.w(), &Lattice::from_i64_rows(2, &[&[0, 6]]));
        assert_eq!(cr.q.finite(), Some(&int(6)));
    }

    #[test]
    fn example33_translation_action_and_preimages() {
        let t = triple("example33");
        let ta = translation_action(&t).unwrap();
        assert_eq!(ta.w0, Lattice::from_i64_rows(2, &[&[2, 0], &[0, 6]]));
        assert_eq!(ta.tv, IntMatrix::from_i64(&[&[3, 0], &[0, 6]]));
        // Exact preimage of <(2,0),(0,6)> under w -> (3/2 w1, w2).
        let pre = ta.preimage_lattice(&Lattice::from_i64_rows(2, &[&[2, 0], &[0, 6]]));
        assert_eq!(pre, Lattice::from_i64_rows(2, &[&[4, 0], &[0, 6]]));
        let x = t.group.x_matrix();
        let v = ta.stable_subspace(&x, true);
        assert_eq!(v, Lattice::from_i64_rows(2, &[&[1, 0], &[0, 1]]));
        let a = ta.matrix_on(&v).unwrap();
        assert_eq!(a.at(0, 0), &rat(3, 2));
        assert_eq!(a.at(1, 1), &rat(1, 1));
        assert_eq!(a.at(0, 1), &rat(0, 1));
    }

    #[test]
    fn intro_stable_subspace_without_conjugation_is_the_z_axis() {
        let t = triple("heisenberg-intro");
        let ta = translation_action(&t).unwrap();
        assert_eq!(ta.w0, Lattice::from_i64_rows(2, &[&[0, 2]]));
        let x = t.group.x_matrix();
        let v = ta.stable_subspace(&x, false);
        assert_eq!(v, Lattice::from_i64_rows(2, &[&[0, 1]]));
        let a = ta.matrix_on(&v).unwrap();
        assert_eq!(a.at(0, 0), &rat(-1, 2));
    }

    #[test]
    fn preimage_span_of_zero_is_the_kernel_direction() {
        // f kills the first direction and keeps the second.
        let g = GroupDesc::affine(IntMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]))
            .unwrap();
        let h = SubgroupDesc::new(
            &g,
            int(1),
            Lattice::from_i64_rows(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
            vec![int(0); 3],
        )
        .unwrap();
        let f = HomDesc::Affine {
            img_head: AffineElement::new(int(1), vec![int(0); 3]),
            img_lattice: vec![
                AffineElement::translation(vec![int(1), int(0), int(0)]),
                AffineElement::translation(vec![int(0), int(1), int(0)]),
                AffineElement::translation(vec![int(0), int(0), int(0)]),
            ],
        };
        let t = Triple::new(g, h, f).unwrap();
        let ta = translation_action(&t).unwrap();
        let pre = ta.preimage_span(&Lattice::zero(3));
        assert_eq!(pre, Lattice::from_i64_rows(3, &[&[0, 0, 1]]));
    }
}
