//! Simplicity of a triple and the maximal f-invariant normal subgroup.
//!
//! The f-core of H is the largest subgroup of H that is normal in G and
//! mapped into itself by f; the triple is simple when the core is trivial.
//! The verdict comes from the center: a nontrivial core of a nilpotent
//! group meets the center in a nontrivial f-invariant sublattice of Z(H)
//! (the intersection is central in G, hence central in H, normal, and
//! still f-invariant), and conversely every f-invariant sublattice of
//! Z(H) inside Z(G) is itself a normal f-invariant subgroup. So the
//! maximal invariant sublattice of the center decides simplicity in both
//! directions, with no injectivity hypothesis.
//!
//! Computing the core itself takes a descending chain. Two shapes are
//! used: a pure lattice chain when the head of H cannot appear in the
//! core (the exponent of the image of the head rules it out), and a
//! subgroup descriptor chain otherwise. A chain that reaches a fixed
//! point and passes the invariance check is exact: the fixed point is a
//! normal f-invariant subgroup of H, and by induction every iterate
//! contains the core.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{monic_integral_part, Int, IntMatrix};
use crate::lattice::{int_row_kernel, invariant_core, poly_at_matrix, rat_row_kernel, Lattice};
use crate::nilgroup::{
    sg_closure, sg_conjugate, sg_intersect, sg_member, AffineElement, GroupDesc, SubgroupDesc,
};

use super::center::{center_restriction, translation_action};
use super::{f_eval, HomDesc, Triple, VendError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TripleVerdict {
    Simple,
    NotSimple,
    Undecided(String),
}

/// Result of the core chain. `Exact` carries a certificate by
/// construction: the subgroup is normal, f-invariant, and contains every
/// normal f-invariant subgroup of H.
#[derive(Debug, Clone)]
pub enum CoreChain {
    Exact(SubgroupDesc),
    Bounded {
        lower: SubgroupDesc,
        upper: SubgroupDesc,
        iterations: usize,
    },
}

#[derive(Debug, Clone)]
pub struct CoreReport {
    pub status: TripleVerdict,
    /// Maximal f-invariant sublattice of Z(H); trivial when the center
    /// restriction is unavailable.
    pub center_core: SubgroupDesc,
    pub chain: CoreChain,
    pub route: &'static str,
}

pub const DEFAULT_CORE_ITER: usize = 64;

pub fn simplicity_decide(t: &Triple) -> Result<CoreReport, VendError> {
    core_compute(t, DEFAULT_CORE_ITER)
}

pub fn core_compute(t: &Triple, max_iter: usize) -> Result<CoreReport, VendError> {
    match (&t.group, &t.f) {
        (GroupDesc::FreeAbelian { .. }, HomDesc::Abelian { a }) => {
            let core = invariant_core(t.h.w(), a)?;
            let sub = SubgroupDesc::lattice_only(&t.group, core)?;
            let status = if sub.is_trivial() {
                TripleVerdict::Simple
            } else {
                TripleVerdict::NotSimple
            };
            Ok(CoreReport {
                status,
                center_core: sub.clone(),
                chain: CoreChain::Exact(sub),
                route: "abelian invariant core",
            })
        }
        (GroupDesc::Affine { .. }, HomDesc::Affine { .. }) if t.group.is_abelian() => {
            flattened_abelian_core(t)
        }
        (GroupDesc::Affine { .. }, HomDesc::Affine { .. }) => nonabelian_core(t, max_iter),
        _ => Err(VendError::Unsupported(
            "the homomorphism form does not match the group".to_string(),
        )),
    }
}

fn flat_of(a: &AffineElement) -> Vec<Int> {
    let mut row = Vec::with_capacity(1 + a.v.len());
    row.push(a.k.clone());
    row.extend(a.v.iter().cloned());
    row
}

/// Affine group with trivial action: multiplication is addition on
/// (k, v), so everything reduces to lattices in Z^{1+n}.
fn flattened_abelian_core(t: &Triple) -> Result<CoreReport, VendError> {
    let n = t.group.rank();
    let HomDesc::Affine { img_head, img_lattice } = &t.f else {
        unreachable!("validated form");
    };
    let head = t.h.head().expect("finite index");
    let mut brows = vec![flat_of(&head)];
    let mut frows = vec![flat_of(img_head)];
    for (row, img) in t.h.w().basis_rows().into_iter().zip(img_lattice) {
        brows.push(flat_of(&AffineElement::translation(row)));
        frows.push(flat_of(img));
    }
    let b = IntMatrix::from_rows(n + 1, &brows);
    let f = IntMatrix::from_rows(n + 1, &frows);
    let a = b.to_rat().inverse()?.mul(&f.to_rat());
    let hflat = Lattice::from_rows(n + 1, &brows);
    let core = invariant_core(&hflat, &a)?;
    let sub = unflatten(&t.group, &core)?;
    let status = if sub.is_trivial() {
        TripleVerdict::Simple
    } else {
        TripleVerdict::NotSimple
    };
    Ok(CoreReport {
        status,
        center_core: sub.clone(),
        chain: CoreChain::Exact(sub),
        route: "flattened abelian",
    })
}

fn unflatten(g: &GroupDesc, l: &Lattice) -> Result<SubgroupDesc, VendError> {
    let n = g.rank();
    let rows = l.basis_rows();
    if rows.is_empty() {
        return Ok(SubgroupDesc::trivial(g));
    }
    let mut wrows: Vec<Vec<Int>> = Vec::new();
    let mut head: Option<(Int, Vec<Int>)> = None;
    for row in rows {
        if row[0].is_zero() {
            wrows.push(row[1..].to_vec());
        } else {
            debug_assert!(head.is_none(), "HNF has one pivot per column");
            head = Some((row[0].clone(), row[1..].to_vec()));
        }
    }
    let w = Lattice::from_rows(n, &wrows);
    match head {
        None => SubgroupDesc::lattice_only(g, w).map_err(VendError::Group),
        Some((e, u0)) => SubgroupDesc::new(g, e, w, u0).map_err(VendError::Group),
    }
}

fn nonabelian_core(t: &Triple, max_iter: usize) -> Result<CoreReport, VendError> {
    let (center_core, center_note) = match center_restriction(t) {
        Ok(cr) => (cr.core, None),
        Err(VendError::Unsupported(msg)) => (SubgroupDesc::trivial(&t.group), Some(msg)),
        Err(e) => return Err(e),
    };
    if center_note.is_none() && center_core.is_trivial() {
        return Ok(CoreReport {
            status: TripleVerdict::Simple,
            center_core: center_core.clone(),
            chain: CoreChain::Exact(SubgroupDesc::trivial(&t.group)),
            route: "center reduction",
        });
    }
    // When the restriction exists and the center core is nontrivial, the
    // verdict is already NotSimple; the chain only pins down the core.
    let verdict_known = center_note.is_none();
    let head = t.h.head().expect("finite index");
    let k0 = f_eval(t, &head)?.k;
    let e = t.h.e().clone();
    if k0.mod_floor(&e).is_zero() {
        descriptor_chain_core(t, max_iter, center_core, verdict_known, center_note)
    } else {
        lattice_chain_core(t, max_iter, center_core, verdict_known, center_note)
    }
}

/// Core chain on lattices. Applies when e does not divide the exponent
/// k0 of f(head): a core element x^{e j} u would map to an element of
/// exponent j k0, and e j | j k0 forces e | k0. So the core is a pure
/// lattice and lives inside w0.
fn lattice_chain_core(
    t: &Triple,
    max_iter: usize,
    center_core: SubgroupDesc,
    verdict_known: bool,
    center_note: Option<String>,
) -> Result<CoreReport, VendError> {
    let g = &t.group;
    let n = g.rank();
    let ta = translation_action(t)?;
    let x = g.x_matrix();
    let vinf = ta.stable_subspace(&x, true);
    // The core spans an invariant subspace on which the action preserves
    // a full lattice, so its restricted characteristic polynomial is
    // monic integral and divides the monic integral part g below. By
    // Cayley-Hamilton the core lies in ker g(A).
    let mut l = if vinf.is_zero() {
        Lattice::zero(n)
    } else {
        let a = ta.matrix_on(&vinf).expect("stable subspace is f-invariant");
        let cp = a.charpoly()?;
        let mp = monic_integral_part(&cp)?;
        let gm = poly_at_matrix(&mp, &a);
        let ker = rat_row_kernel(&gm);
        let rows: Vec<Vec<Int>> = ker
            .basis_rows()
            .into_iter()
            .map(|c| vinf.basis().apply_row(&c))
            .collect();
        Lattice::from_rows(n, &rows).saturate().intersect(&ta.w0)?
    };
    let xi = x
        .inverse_unimodular()
        .expect("unipotent integer matrices are unimodular");
    let mut iterations = 0usize;
    let mut exact = false;
    while iterations < max_iter {
        let fwd = l.map_image(&x.to_rat())?;
        let bwd = l.map_image(&xi.to_rat())?;
        let pre = ta.preimage_lattice(&l);
        let next = l.intersect(&fwd)?.intersect(&bwd)?.intersect(&pre)?;
        iterations += 1;
        if next == l {
            exact = true;
            break;
        }
        l = next;
    }
    if exact {
        let sub = SubgroupDesc::lattice_only(g, l)?;
        let status = if sub.is_trivial() {
            debug_assert!(!verdict_known, "center core embeds in the core");
            TripleVerdict::Simple
        } else {
            TripleVerdict::NotSimple
        };
        Ok(CoreReport {
            status,
            center_core,
            chain: CoreChain::Exact(sub),
            route: "lattice chain",
        })
    } else {
        let upper = SubgroupDesc::lattice_only(g, l)?;
        let status = if verdict_known {
            TripleVerdict::NotSimple
        } else {
            TripleVerdict::Undecided(center_note.unwrap_or_else(|| {
                "the invariant chain did not stabilize within the iteration bound".to_string()
            }))
        };
        Ok(CoreReport {
            status,
            center_core: center_core.clone(),
            chain: CoreChain::Bounded { lower: center_core, upper, iterations },
            route: "lattice chain",
        })
    }
}

/// Core chain on subgroup descriptors, for the case e | k0 where the
/// core may contain a power of the head. Each round intersects with the
/// conjugates under the group generators and passes to the kernel of
/// (x-exponent of f) modulo the current head exponent; both operations
/// keep the iterate above the core. A fixed point is normal by
/// construction and exact once the f-images of its generators are
/// checked to stay inside.
fn descriptor_chain_core(
    t: &Triple,
    max_iter: usize,
    center_core: SubgroupDesc,
    verdict_known: bool,
    center_note: Option<String>,
) -> Result<CoreReport, VendError> {
    let g = &t.group;
    let n = g.rank();
    let mut conj: Vec<AffineElement> = Vec::new();
    let xgen = AffineElement::new(Int::one(), vec![Int::zero(); n]);
    conj.push(xgen.clone());
    conj.push(g.inv(&xgen));
    for i in 0..n {
        let mut v = vec![Int::zero(); n];
        v[i] = Int::one();
        let tr = AffineElement::translation(v);
        conj.push(g.inv(&tr));
        conj.push(tr);
    }

    let mut k = t.h.clone();
    let mut iterations = 0usize;
    let mut fixed = false;
    while iterations < max_iter {
        let mut next = k.clone();
        for c in &conj {
            let kc = sg_conjugate(g, &k, c)?;
            next = sg_intersect(g, &next, &kc)?;
        }
        next = exponent_kernel(t, &next)?;
        iterations += 1;
        if next == k {
            fixed = true;
            break;
        }
        k = next;
    }
    let invariant = fixed && {
        let mut ok = true;
        for gen in k.generators() {
            if !sg_member(g, &k, &f_eval(t, &gen)?) {
                ok = false;
                break;
            }
        }
        ok
    };
    if invariant {
        let status = if k.is_trivial() {
            TripleVerdict::Simple
        } else {
            TripleVerdict::NotSimple
        };
        Ok(CoreReport {
            status,
            center_core,
            chain: CoreChain::Exact(k),
            route: "subgroup chain",
        })
    } else {
        let status = if verdict_known {
            TripleVerdict::NotSimple
        } else {
            TripleVerdict::Undecided(center_note.unwrap_or_else(|| {
                "the subgroup chain did not certify f-invariance".to_string()
            }))
        };
        Ok(CoreReport {
            status,
            center_core: center_core.clone(),
            chain: CoreChain::Bounded { lower: center_core, upper: k, iterations },
            route: "subgroup chain",
        })
    }
}

/// Kernel of the homomorphism K -> Z / (e_K) sending an element to the
/// x-exponent of its f-image. The map is a homomorphism because
/// conjugation by the head does not change the exponent of the image.
fn exponent_kernel(t: &Triple, k: &SubgroupDesc) -> Result<SubgroupDesc, VendError> {
    let g = &t.group;
    let wrows = k.w().basis_rows();
    let mut kappa: Vec<Int> = Vec::with_capacity(wrows.len());
    for row in &wrows {
        kappa.push(f_eval(t, &AffineElement::translation(row.clone()))?.k);
    }
    let bw = k.w().basis();
    match k.head() {
        None => {
            let cols: Vec<Vec<Int>> = kappa.iter().map(|c| vec![c.clone()]).collect();
            let kernel = int_row_kernel(&IntMatrix::from_rows(1, &cols));
            let rows: Vec<Vec<Int>> = kernel
                .basis_rows()
                .into_iter()
                .map(|c| bw.apply_row(&c))
                .collect();
            SubgroupDesc::lattice_only(g, Lattice::from_rows(g.rank(), &rows))
                .map_err(VendError::Group)
        }
        Some(hk) => {
            let d = k.e().clone();
            let kh = f_eval(t, &hk)?.k;
            let gamma = kappa.iter().fold(d.clone(), |acc, c| acc.gcd(c));
            let j0 = &gamma / gamma.gcd(&kh);
            let target = -(&j0 * &kh);
            let cstar = solve_linear_congruence(&kappa, &d, &target)
                .expect("gamma divides j0 * kh by construction");
            let head_new = g.mul(
                &g.pow(&hk, &j0),
                &AffineElement::translation(bw.apply_row(&cstar)),
            );
            // Lattice part: coefficient vectors c with sum c_i kappa_i
            // in d Z, read off a stacked integer kernel.
            let mut stacked: Vec<Vec<Int>> = kappa.iter().map(|c| vec![c.clone()]).collect();
            stacked.push(vec![d]);
            let kernel = int_row_kernel(&IntMatrix::from_rows(1, &stacked));
            let mut gens = vec![head_new];
            for ct in kernel.basis_rows() {
                gens.push(AffineElement::translation(bw.apply_row(&ct[..wrows.len()])));
            }
            sg_closure(g, &gens).map_err(VendError::Group)
        }
    }
}

/// Solve sum c_i a_i = target (mod modulus) over the integers; `None`
/// when the gcd of the coefficients and the modulus does not divide the
/// target.
fn solve_linear_congruence(coeffs: &[Int], modulus: &Int, target: &Int) -> Option<Vec<Int>> {
    let mut bez: Vec<Int> = vec![Int::zero(); coeffs.len()];
    let mut acc = modulus.clone();
    for (i, a) in coeffs.iter().enumerate() {
        let eg = acc.extended_gcd(a);
        for b in bez[..i].iter_mut() {
            *b = &*b * &eg.x;
        }
        bez[i] = eg.y;
        acc = eg.gcd;
    }
    if acc.is_zero() {
        return if target.is_zero() { Some(bez) } else { None };
    }
    let (s, r) = target.div_rem(&acc);
    if !r.is_zero() {
        return None;
    }
    Some(bez.into_iter().map(|b| b * &s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, RatMatrix};
    use crate::vend::registry::{make_example, RegistryObject};

    fn triple(name: &str) -> Triple {
        triple_np(name, None, None)
    }

    fn triple_np(name: &str, n: Option<i64>, p: Option<i64>) -> Triple {
        match make_example(name, n, p).unwrap() {
            RegistryObject::Triple(t) => t,
            _ => panic!("expected a triple"),
        }
    }

    #[test]
    fn congruence_solver_handles_mixed_signs() {
        let c = solve_linear_congruence(&[int(6), int(10)], &int(4), &int(2)).unwrap();
        let v: Int = &c[0] * 6 + &c[1] * 10;
        assert!((v.clone() - int(2)).mod_floor(&int(4)).is_zero());
        assert!(solve_linear_congruence(&[int(6), int(10)], &int(4), &int(1)).is_none());
        let c = solve_linear_congruence(&[int(0), int(0)], &int(0), &int(0)).unwrap();
        assert_eq!(c, vec![int(0), int(0)]);
    }

    #[test]
    fn abelian_examples_are_simple_via_the_invariant_core() {
        for name in ["adding-machine", "example1"] {
            let rep = simplicity_decide(&triple(name)).unwrap();
            assert_eq!(rep.status, TripleVerdict::Simple, "{name}");
            assert_eq!(rep.route, "abelian invariant core");
            assert!(matches!(rep.chain, CoreChain::Exact(ref s) if s.is_trivial()));
        }
    }

    #[test]
    fn a_dilation_with_an_invariant_line_is_caught() {
        let g = GroupDesc::free_abelian(2);
        let h = SubgroupDesc::lattice_only(&g, Lattice::from_i64_rows(2, &[&[2, 0], &[0, 2]]))
            .unwrap();
        // (2,0) -> (2,0) keeps the first axis; the second is halved.
        let f = HomDesc::Abelian {
            a: RatMatrix::from_rows(2, &[vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 2)]]),
        };
        let t = Triple::new(g, h, f).unwrap();
        let rep = simplicity_decide(&t).unwrap();
        assert_eq!(rep.status, TripleVerdict::NotSimple);
        let CoreChain::Exact(core) = rep.chain else { panic!("abelian core is exact") };
        assert_eq!(core.w(), &Lattice::from_i64_rows(2, &[&[2, 0]]));
    }

    #[test]
    fn center_reduction_decides_the_affine_examples() {
        for name in ["heisenberg-intro", "example2", "example4", "sec54"] {
            let rep = simplicity_decide(&triple(name)).unwrap();
            assert_eq!(rep.status, TripleVerdict::Simple, "{name}");
            assert_eq!(rep.route, "center reduction", "{name}");
        }
        let rep = simplicity_decide(&triple_np("power-f22", Some(2), None)).unwrap();
        assert_eq!(rep.status, TripleVerdict::Simple);
        let rep = simplicity_decide(&triple_np("example5", Some(3), Some(2))).unwrap();
        assert_eq!(rep.status, TripleVerdict::Simple);
    }

    #[test]
    fn example33_core_is_the_center_of_h() {
        let rep = simplicity_decide(&triple("example33")).unwrap();
        assert_eq!(rep.status, TripleVerdict::NotSimple);
        assert_eq!(rep.route, "lattice chain");
        let CoreChain::Exact(core) = rep.chain else {
            panic!("the chain must stabilize for this example")
        };
        assert!(core.e().is_zero());
        assert_eq!(core.w(), &Lattice::from_i64_rows(2, &[&[0, 6]]));
    }

    #[test]
    fn identity_endomorphism_has_the_whole_subgroup_as_core() {
        let g = GroupDesc::affine(IntMatrix::from_i64(&[&[1, 1], &[0, 1]])).unwrap();
        let h = SubgroupDesc::whole_group(&g);
        let f = HomDesc::Affine {
            img_head: AffineElement::new(int(1), vec![int(0), int(0)]),
            img_lattice: vec![
                AffineElement::translation(vec![int(1), int(0)]),
                AffineElement::translation(vec![int(0), int(1)]),
            ],
        };
        let t = Triple::new(g, h, f).unwrap();
        let rep = simplicity_decide(&t).unwrap();
        assert_eq!(rep.status, TripleVerdict::NotSimple);
        assert_eq!(rep.route, "subgroup chain");
        let CoreChain::Exact(core) = rep.chain else { panic!("identity chain is immediate") };
        assert_eq!(&core, &t.h);
    }

    #[test]
    fn flattened_route_handles_a_trivial_action() {
        // Z^2 written as an affine group with x acting trivially; f
        // rotates the head into the lattice and back.
        let g = GroupDesc::affine(IntMatrix::from_i64(&[&[1]])).unwrap();
        let h = SubgroupDesc::new(
            &g,
            int(2),
            Lattice::from_i64_rows(1, &[&[1]]),
            vec![int(0)],
        )
        .unwrap();
        // flat H = <(2,0),(0,1)>, f = [[1/2,1],[1,0]] on (k, v).
        let f = HomDesc::Affine {
            img_head: AffineElement::new(int(1), vec![int(2)]),
            img_lattice: vec![AffineElement::new(int(1), vec![int(0)])],
        };
        let t = Triple::new(g, h, f).unwrap();
        let rep = simplicity_decide(&t).unwrap();
        assert_eq!(rep.route, "flattened abelian");
        assert_eq!(rep.status, TripleVerdict::Simple);
    }
}
