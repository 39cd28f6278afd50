//! Built-in examples: worked triples and self-similar atom tables.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::arith::{int, rat, Int, IntMatrix, Rat, RatMatrix};
use crate::lattice::Lattice;
use crate::nilgroup::{AffineElement, GroupDesc, SubgroupDesc};

use super::{HomDesc, Triple, VendError};

/// One generator of a self-similar action: children as words in the
/// atom names, and the permutation of the first level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomDef {
    pub name: String,
    pub children: Vec<Vec<(String, i64)>>,
    pub perm: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomSpec {
    pub m: usize,
    pub atoms: Vec<AtomDef>,
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum RegistryObject {
    Triple(Triple),
    Atoms(AtomSpec),
    Templates(AtomSpec),
}

pub fn registered_names() -> &'static [&'static str] {
    &[
        "adding-machine",
        "example1",
        "heisenberg-intro",
        "power-f22",
        "example2",
        "example33",
        "example4",
        "example5",
        "sec54",
        "sec21-atoms",
        "eight-templates",
    ]
}

/// Instantiate a registered example. `n` and `p` feed the parametric
/// families and are ignored by the fixed ones.
pub fn make_example(
    name: &str,
    n: Option<i64>,
    p: Option<i64>,
) -> Result<RegistryObject, VendError> {
    match name {
        "adding-machine" => adding_machine().map(RegistryObject::Triple),
        "example1" => example1().map(RegistryObject::Triple),
        "heisenberg-intro" => heisenberg_intro().map(RegistryObject::Triple),
        "power-f22" => power_f22(n.unwrap_or(2)).map(RegistryObject::Triple),
        "example2" => example2(n.unwrap_or(3)).map(RegistryObject::Triple),
        "example33" => example33().map(RegistryObject::Triple),
        "example4" => example4().map(RegistryObject::Triple),
        "example5" => example5(n.unwrap_or(2), p.unwrap_or(3)).map(RegistryObject::Triple),
        "sec54" => sec54(n.unwrap_or(3)).map(RegistryObject::Triple),
        "sec21-atoms" => Ok(RegistryObject::Atoms(sec21_atoms())),
        "eight-templates" => {
            eight_templates(n.unwrap_or(1), p.unwrap_or(1)).map(RegistryObject::Templates)
        }
        _ => Err(VendError::Unsupported(format!(
            "unknown example {name}; known names: {}",
            registered_names().join(", ")
        ))),
    }
}

fn heis() -> GroupDesc {
    GroupDesc::affine(IntMatrix::from_i64(&[&[1, 1], &[0, 1]])).expect("unipotent")
}

fn elem(k: i64, v: &[i64]) -> AffineElement {
    AffineElement::new(int(k), v.iter().map(|&c| int(c)).collect())
}

fn adding_machine() -> Result<Triple, VendError> {
    let g = GroupDesc::free_abelian(1);
    let h = SubgroupDesc::lattice_only(&g, Lattice::from_i64_rows(1, &[&[2]]))?;
    Triple::new(g, h, HomDesc::Abelian { a: RatMatrix::from_rows(1, &[vec![rat(1, 2)]]) })
}

fn example1() -> Result<Triple, VendError> {
    let g = GroupDesc::free_abelian(2);
    let h = SubgroupDesc::lattice_only(&g, Lattice::from_i64_rows(2, &[&[2, 0], &[0, 1]]))?;
    let a = RatMatrix::from_rows(2, &[vec![rat(1, 2), rat(1, 1)], vec![rat(1, 1), rat(0, 1)]]);
    Triple::new(g, h, HomDesc::Abelian { a })
}

fn heisenberg_intro() -> Result<Triple, VendError> {
    let g = heis();
    let h = SubgroupDesc::new(
        &g,
        int(2),
        Lattice::from_i64_rows(2, &[&[1, 0], &[0, 2]]),
        vec![int(0), int(0)],
    )?;
    let f = HomDesc::Affine {
        img_head: elem(0, &[1, 0]),
        img_lattice: vec![elem(1, &[0, 0]), elem(0, &[0, -1])],
    };
    Triple::new(g, h, f)
}

fn power_f22(n: i64) -> Result<Triple, VendError> {
    if n < 2 {
        return Err(VendError::Unsupported("the power family needs n >= 2".to_string()));
    }
    let g = heis();
    let h = SubgroupDesc::new(
        &g,
        int(n),
        Lattice::from_i64_rows(2, &[&[n, 0], &[0, n * n]]),
        vec![int(0), int(0)],
    )?;
    let f = HomDesc::Affine {
        img_head: elem(1, &[0, 0]),
        img_lattice: vec![elem(0, &[1, 0]), elem(0, &[0, 1])],
    };
    Triple::new(g, h, f)
}

fn example2(n: i64) -> Result<Triple, VendError> {
    if n < 2 {
        return Err(VendError::Unsupported("this family needs n >= 2".to_string()));
    }
    let g = heis();
    let h = SubgroupDesc::new(
        &g,
        int(n),
        Lattice::from_i64_rows(2, &[&[n, 0], &[0, n * n]]),
        vec![int(0), int(0)],
    )?;
    let f = HomDesc::Affine {
        img_head: elem(n, &[0, 0]),
        img_lattice: vec![elem(0, &[1, 0]), elem(0, &[0, n])],
    };
    Triple::new(g, h, f)
}

fn example33() -> Result<Triple, VendError> {
    let g = heis();
    let h = SubgroupDesc::new(
        &g,
        int(3),
        Lattice::from_i64_rows(2, &[&[2, 0], &[0, 6]]),
        vec![int(0), int(0)],
    )?;
    let f = HomDesc::Affine {
        img_head: elem(2, &[0, 0]),
        img_lattice: vec![elem(0, &[3, 0]), elem(0, &[0, 6])],
    };
    Triple::new(g, h, f)
}

fn example4() -> Result<Triple, VendError> {
    let g = heis();
    let h = SubgroupDesc::new(
        &g,
        int(4),
        Lattice::from_i64_rows(2, &[&[4, 0], &[0, 4]]),
        vec![int(0), int(0)],
    )?;
    let f = HomDesc::Affine {
        img_head: elem(2, &[0, 0]),
        img_lattice: vec![elem(0, &[2, 0]), elem(0, &[0, 1])],
    };
    Triple::new(g, h, f)
}

fn example5(n: i64, p: i64) -> Result<Triple, VendError> {
    if n < 1 || p < 2 {
        return Err(VendError::Unsupported("this family needs n >= 1 and p >= 2".to_string()));
    }
    let n = n as usize;
    let mut x = IntMatrix::identity(n);
    for i in 0..n.saturating_sub(1) {
        *x.at_mut(i, i + 1) = Int::one();
    }
    let g = GroupDesc::affine(x)?;
    let rows: Vec<Vec<Int>> = (0..n)
        .map(|i| {
            let mut r = vec![Int::zero(); n];
            r[i] = int(p);
            r
        })
        .collect();
    let mut u0 = vec![Int::zero(); n];
    u0[n - 1] = Int::one();
    let h = SubgroupDesc::new(&g, Int::one(), Lattice::from_rows(n, &rows), u0)?;
    let img_lattice: Vec<AffineElement> = (0..n)
        .map(|i| {
            let mut r = vec![Int::zero(); n];
            r[i] = Int::one();
            AffineElement::translation(r)
        })
        .collect();
    let f = HomDesc::Affine {
        img_head: AffineElement::new(Int::one(), vec![Int::zero(); n]),
        img_lattice,
    };
    Triple::new(g, h, f)
}

fn pow2(e: i64) -> Rat {
    let mag = Int::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        Rat::from(mag)
    } else {
        Rat::new(Int::one(), mag)
    }
}

fn binomial(a: usize, b: usize) -> Int {
    if b > a {
        return Int::zero();
    }
    let b = b.min(a - b);
    let mut num = Int::one();
    let mut den = Int::one();
    for k in 0..b {
        num *= int((a - k) as i64);
        den *= int((k + 1) as i64);
    }
    num / den
}

/// First-row tails of the triangular family maps, by the two-term
/// recurrence. Entry i (1-based) of the result is theta_{n,i}.
pub fn sec54_theta(n: usize) -> Vec<Rat> {
    assert!(n >= 2);
    let mut table: Vec<Vec<Rat>> = vec![Vec::new(), Vec::new(), vec![rat(1, 2)]];
    for k in 3..=n {
        let mut th = vec![Rat::zero(); k - 1];
        th[0] = rat(4, 1) * &table[k - 1][0] + pow2(2 * k as i64 - 6);
        for i in 2..=(k / 2) {
            let prev = table[k - 1].get(i - 1).cloned().unwrap_or_else(Rat::zero);
            let prev2 = table[k - 2].get(i - 2).cloned().unwrap_or_else(Rat::zero);
            th[i - 1] = pow2(i as i64 + 1) * (prev + pow2(k as i64 - 4) * prev2);
        }
        table.push(th);
    }
    table[n].clone()
}

/// Closed form for theta_{n,i}; zero exactly when the binomial
/// coefficient vanishes, which happens past i = n/2.
pub fn sec54_theta_closed(n: usize, i: usize) -> Rat {
    assert!(n >= 2 && i >= 1 && i < n);
    let c = binomial(n - i - 1, i - 1);
    if c.is_zero() {
        return Rat::zero();
    }
    let e = (2 * n as i64 - i as i64 - 6) * (i as i64 + 1) / 2 + 1;
    rat(n as i64, i as i64) * Rat::from(c) * pow2(e)
}

pub fn sec54_x(n: usize) -> IntMatrix {
    assert!(n >= 2);
    let mut x = IntMatrix::from_i64(&[&[1, 1], &[0, 1]]);
    for k in 3..=n {
        let mut m = IntMatrix::identity(k);
        *m.at_mut(0, 1) = Int::one() << (k - 2);
        for i in 0..k - 1 {
            for j in 0..k - 1 {
                *m.at_mut(i + 1, j + 1) = x.at(i, j).clone();
            }
        }
        x = m;
    }
    x
}

pub fn sec54_f(n: usize) -> RatMatrix {
    assert!(n >= 2);
    let mut f = RatMatrix::from_rows(2, &[vec![rat(1, 1), rat(1, 2)], vec![rat(0, 1), rat(1, 2)]]);
    for k in 3..=n {
        let th = sec54_theta(k);
        let mut m = RatMatrix::zero(k, k);
        *m.at_mut(0, 0) = pow2(k as i64 - 2);
        for (j, t) in th.iter().enumerate() {
            *m.at_mut(0, j + 1) = t.clone();
        }
        for i in 0..k - 1 {
            for j in 0..k - 1 {
                *m.at_mut(i + 1, j + 1) = f.at(i, j).clone();
            }
        }
        f = m;
    }
    f
}

pub fn sec54_w(n: usize) -> Lattice {
    assert!(n >= 2);
    let mut rows: Vec<Vec<Int>> = Vec::new();
    for i in 0..n - 2 {
        let mut r = vec![Int::zero(); n];
        r[i] = Int::one();
        rows.push(r);
    }
    let mut r = vec![Int::zero(); n];
    r[n - 2] = Int::one();
    r[n - 1] = Int::one();
    rows.push(r);
    let mut r = vec![Int::zero(); n];
    r[n - 1] = int(2);
    rows.push(r);
    Lattice::from_rows(n, &rows)
}

fn sec54(n: i64) -> Result<Triple, VendError> {
    if n < 2 {
        return Err(VendError::Unsupported("the triangular family needs n >= 2".to_string()));
    }
    let n = n as usize;
    let g = GroupDesc::affine(sec54_x(n))?;
    let f = sec54_f(n);
    let w = sec54_w(n);
    let h = SubgroupDesc::new(&g, int(2), w.clone(), vec![Int::zero(); n])?;
    let img_lattice: Vec<AffineElement> = w
        .basis_rows()
        .into_iter()
        .map(|r| {
            let rr: Vec<Rat> = r.into_iter().map(Rat::from).collect();
            let img: Vec<Int> = f
                .apply_row(&rr)
                .into_iter()
                .map(|c| {
                    debug_assert!(c.is_integer());
                    c.to_integer()
                })
                .collect();
            AffineElement::translation(img)
        })
        .collect();
    let fh = HomDesc::Affine {
        img_head: AffineElement::new(Int::one(), vec![Int::zero(); n]),
        img_lattice,
    };
    Triple::new(g, h, fh)
}

fn word(pairs: &[(&str, i64)]) -> Vec<(String, i64)> {
    pairs.iter().map(|(s, e)| (s.to_string(), *e)).collect()
}

fn z_atom() -> AtomDef {
    AtomDef {
        name: "z".to_string(),
        children: vec![word(&[]), word(&[("z", 1)]), word(&[]), word(&[("z", 1)])],
        perm: vec![1, 0, 3, 2],
    }
}

fn sec21_atoms() -> AtomSpec {
    AtomSpec {
        m: 4,
        atoms: vec![
            z_atom(),
            AtomDef {
                name: "alpha".to_string(),
                children: vec![
                    word(&[("alpha", 1)]),
                    word(&[("alpha", 1), ("z", 1)]),
                    word(&[("alpha", 1)]),
                    word(&[("alpha", 1)]),
                ],
                perm: vec![1, 0, 2, 3],
            },
            AtomDef {
                name: "beta".to_string(),
                children: vec![
                    word(&[("z", 1)]),
                    word(&[("z", 1)]),
                    word(&[("z", -1), ("beta", 1)]),
                    word(&[("z", -1), ("beta", 1)]),
                ],
                perm: vec![2, 3, 0, 1],
            },
            AtomDef {
                name: "kappa".to_string(),
                children: vec![
                    word(&[("alpha", 3), ("kappa", 2)]),
                    word(&[("alpha", 3), ("kappa", 2)]),
                    word(&[("alpha", 1), ("kappa", 2)]),
                    word(&[("alpha", 1), ("kappa", 2)]),
                ],
                perm: vec![0, 1, 2, 3],
            },
        ],
    }
}

/// The eight commuting templates over the pool {e, z, z^-1, z^2}:
/// `i` and `j` pick the two section values h1 and h2.
fn eight_templates(i: i64, j: i64) -> Result<AtomSpec, VendError> {
    let pool = [0i64, 1, -1, 2];
    let (Ok(i), Ok(j)) = (usize::try_from(i), usize::try_from(j)) else {
        return Err(VendError::Unsupported("template parameters must be 0..=3".to_string()));
    };
    if i >= pool.len() || j >= pool.len() {
        return Err(VendError::Unsupported("template parameters must be 0..=3".to_string()));
    }
    let h1 = pool[i];
    let h2 = pool[j];
    let zw = |e: i64| -> Vec<(String, i64)> {
        if e == 0 {
            Vec::new()
        } else {
            vec![("z".to_string(), e)]
        }
    };
    // (z-increment per child, first-level permutation)
    let defs: [(&str, [i64; 4], [usize; 4]); 8] = [
        ("x1", [0, 0, 0, 0], [0, 1, 2, 3]),
        ("x2", [0, 1, 0, 0], [1, 0, 2, 3]),
        ("x3", [0, 0, 0, 1], [0, 1, 3, 2]),
        ("x4", [0, 1, 0, 1], [1, 0, 3, 2]),
        ("x5", [0, 0, 0, 0], [2, 3, 0, 1]),
        ("x6", [0, 1, 0, 1], [3, 2, 1, 0]),
        ("x7", [0, 0, 0, 1], [2, 3, 1, 0]),
        ("x8", [0, 1, 0, 0], [3, 2, 0, 1]),
    ];
    let mut atoms = vec![z_atom()];
    for (name, inc, perm) in defs {
        atoms.push(AtomDef {
            name: name.to_string(),
            children: vec![zw(h1 + inc[0]), zw(h1 + inc[1]), zw(h2 + inc[2]), zw(h2 + inc[3])],
            perm: perm.to_vec(),
        });
    }
    Ok(AtomSpec { m: 4, atoms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_registered_name_builds_with_defaults() {
        for name in registered_names() {
            assert!(make_example(name, None, None).is_ok(), "{name}");
        }
        assert!(make_example("nope", None, None).is_err());
    }

    #[test]
    fn degrees_of_the_worked_triples() {
        let expect = [
            ("adding-machine", 2i64),
            ("example1", 2),
            ("heisenberg-intro", 4),
            ("power-f22", 16),
            ("example2", 81),
            ("example33", 36),
            ("example4", 64),
            ("example5", 9),
            ("sec54", 4),
        ];
        for (name, m) in expect {
            let RegistryObject::Triple(t) = make_example(name, None, None).unwrap() else {
                panic!("{name} is a triple")
            };
            assert_eq!(t.m, int(m), "{name}");
        }
    }

    #[test]
    fn theta_tables_match_the_printed_values() {
        let as_i64 = |v: Vec<Rat>| -> Vec<Rat> { v };
        assert_eq!(as_i64(sec54_theta(2)), vec![rat(1, 2)]);
        assert_eq!(sec54_theta(3), vec![rat(3, 1), rat(0, 1)]);
        assert_eq!(sec54_theta(4), vec![rat(16, 1), rat(4, 1), rat(0, 1)]);
        assert_eq!(sec54_theta(5), vec![rat(80, 1), rat(80, 1), rat(0, 1), rat(0, 1)]);
        assert_eq!(
            sec54_theta(6),
            vec![rat(384, 1), rat(1152, 1), rat(256, 1), rat(0, 1), rat(0, 1)]
        );
    }

    #[test]
    fn closed_formula_agrees_with_the_recurrence() {
        for n in 2..=16 {
            let th = sec54_theta(n);
            for i in 1..n {
                assert_eq!(th[i - 1], sec54_theta_closed(n, i), "n = {n}, i = {i}");
            }
        }
    }

    #[test]
    fn triangular_intertwining_holds() {
        for n in 2..=8 {
            let x = sec54_x(n).to_rat();
            let f = sec54_f(n);
            assert_eq!(x.mul(&x).mul(&f), f.mul(&x), "n = {n}");
        }
    }

    #[test]
    fn triangular_lattice_maps_to_integer_rows() {
        let RegistryObject::Triple(t) = make_example("sec54", Some(3), None).unwrap() else {
            panic!()
        };
        let HomDesc::Affine { img_lattice, .. } = &t.f else { panic!() };
        let got: Vec<Vec<Int>> = img_lattice.iter().map(|a| a.v.clone()).collect();
        assert_eq!(
            got,
            vec![
                vec![int(2), int(3), int(0)],
                vec![int(0), int(1), int(1)],
                vec![int(0), int(0), int(1)],
            ]
        );
    }

    #[test]
    fn atom_tables_have_consistent_shapes() {
        let RegistryObject::Atoms(spec) = make_example("sec21-atoms", None, None).unwrap() else {
            panic!()
        };
        assert_eq!(spec.m, 4);
        assert_eq!(spec.atoms.len(), 4);
        for atom in &spec.atoms {
            assert_eq!(atom.children.len(), 4, "{}", atom.name);
            let mut seen = [false; 4];
            for &p in &atom.perm {
                seen[p] = true;
            }
            assert!(seen.iter().all(|&b| b), "{}", atom.name);
        }
        let RegistryObject::Templates(tp) = make_example("eight-templates", None, None).unwrap()
        else {
            panic!()
        };
        assert_eq!(tp.atoms.len(), 9);
        assert!(make_example("eight-templates", Some(7), None).is_err());
    }
}
