//! JSON configuration format for triples and atom tables.
//!
//! A config either carries the `group` / `subgroup` / `f` sections of a
//! triple, or an `atoms` table, never both. Rationals are written as plain
//! integers when the denominator is one and as "p/q" strings otherwise.
//! The canonical serialization (struct field order, two-space pretty
//! printing, trailing newline) is what shipped config files contain, so
//! parse followed by serialize is the identity on them.

use serde::{Deserialize, Serialize};

use vend_core::arith::{int, rat, Int, IntMatrix, Rat, RatMatrix};
use vend_core::lattice::Lattice;
use vend_core::nilgroup::{AffineElement, GroupDesc, SubgroupDesc};
use vend_core::vend::{AtomDef, AtomSpec, HomDesc, RegistryObject};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<SubgroupCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<HomCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transversal: Option<TransversalCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<AtomsCfg>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupCfg {
    #[serde(rename = "type")]
    pub kind: String,
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_matrix: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgroupCfg {
    pub lattice: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u0: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomCfg {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<RatEntry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images: Option<ImagesCfg>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImagesCfg {
    pub head: ElementCfg,
    pub lattice: Vec<ElementCfg>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementCfg {
    pub k: i64,
    pub v: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TransversalCfg {
    Named(String),
    Explicit(Vec<ElementCfg>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomsCfg {
    pub m: usize,
    pub atoms: Vec<AtomCfg>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomCfg {
    pub name: String,
    pub children: Vec<Vec<(String, i64)>>,
    pub perm: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatEntry {
    Int(i64),
    Frac(String),
}

impl RatEntry {
    pub fn to_rat(&self) -> Result<Rat, String> {
        match self {
            RatEntry::Int(v) => Ok(rat(*v, 1)),
            RatEntry::Frac(s) => {
                let (p, q) = s
                    .split_once('/')
                    .ok_or_else(|| format!("rational '{s}' is not of the form p/q"))?;
                let p: i64 = p.trim().parse().map_err(|_| format!("bad numerator in '{s}'"))?;
                let q: i64 = q.trim().parse().map_err(|_| format!("bad denominator in '{s}'"))?;
                if q == 0 {
                    return Err(format!("zero denominator in '{s}'"));
                }
                Ok(rat(p, q))
            }
        }
    }

    pub fn from_rat(r: &Rat) -> RatEntry {
        if r.denom() == &Int::from(1) {
            RatEntry::Int(int_to_i64(r.numer()))
        } else {
            RatEntry::Frac(format!("{}/{}", r.numer(), r.denom()))
        }
    }
}

fn int_to_i64(v: &Int) -> i64 {
    v.to_string().parse().expect("config entries fit in i64")
}

fn int_rows(rows: &[Vec<i64>]) -> Vec<Vec<Int>> {
    rows.iter().map(|r| r.iter().map(|&c| int(c)).collect()).collect()
}

impl ElementCfg {
    fn to_element(&self) -> AffineElement {
        AffineElement::new(int(self.k), self.v.iter().map(|&c| int(c)).collect())
    }

    fn of_element(e: &AffineElement) -> ElementCfg {
        ElementCfg { k: int_to_i64(&e.k), v: e.v.iter().map(int_to_i64).collect() }
    }
}

/// The raw triple sections, before validation ties them together.
pub struct TripleParts {
    pub group: GroupDesc,
    pub h: SubgroupDesc,
    pub f: HomDesc,
    pub transversal: Option<Vec<AffineElement>>,
}

pub fn parse_config(text: &str) -> Result<TripleConfig, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

pub fn build_parts(cfg: &TripleConfig) -> Result<TripleParts, String> {
    let group = cfg.group.as_ref().ok_or("config has no group section")?;
    let sub = cfg.subgroup.as_ref().ok_or("config has no subgroup section")?;
    let hom = cfg.f.as_ref().ok_or("config has no f section")?;
    if cfg.atoms.is_some() {
        return Err("a config carries either a triple or an atom table, not both".to_string());
    }

    let n = group.rank;
    let g = match group.kind.as_str() {
        "free-abelian" => {
            if group.x_matrix.is_some() {
                return Err("field x_matrix is not used by free-abelian groups".to_string());
            }
            GroupDesc::free_abelian(n)
        }
        "affine" => {
            let rows = group
                .x_matrix
                .as_ref()
                .ok_or("field x_matrix is required for affine groups")?;
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(format!("x_matrix must be {n} rows of {n} entries"));
            }
            GroupDesc::affine(IntMatrix::from_rows(n, &int_rows(rows)))
                .map_err(|e| format!("{e:?}"))?
        }
        other => return Err(format!("unknown group type '{other}'")),
    };

    if sub.lattice.iter().any(|r| r.len() != n) {
        return Err(format!("subgroup lattice rows must have {n} entries"));
    }
    let w = Lattice::from_rows(n, &int_rows(&sub.lattice));
    let e = sub.e.unwrap_or(0);
    let h = if e == 0 {
        if sub.u0.is_some() {
            return Err("field u0 needs a nonzero exponent e".to_string());
        }
        SubgroupDesc::lattice_only(&g, w).map_err(|err| format!("{err:?}"))?
    } else {
        let u0 = match &sub.u0 {
            Some(v) => {
                if v.len() != n {
                    return Err(format!("u0 must have {n} entries"));
                }
                v.iter().map(|&c| int(c)).collect()
            }
            None => vec![Int::from(0); n],
        };
        SubgroupDesc::new(&g, int(e), w, u0).map_err(|err| format!("{err:?}"))?
    };

    let f = match (&hom.matrix, &hom.images) {
        (Some(rows), None) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(format!("f matrix must be {n} rows of {n} entries"));
            }
            let mut data = Vec::with_capacity(n * n);
            for row in rows {
                for e in row {
                    data.push(e.to_rat()?);
                }
            }
            HomDesc::Abelian { a: RatMatrix::new(n, n, data) }
        }
        (None, Some(images)) => {
            if images.lattice.len() != h.w().rank() {
                return Err(format!(
                    "f images must list one element per lattice basis row, expected {}",
                    h.w().rank()
                ));
            }
            HomDesc::Affine {
                img_head: images.head.to_element(),
                img_lattice: images.lattice.iter().map(ElementCfg::to_element).collect(),
            }
        }
        _ => return Err("section f needs exactly one of matrix or images".to_string()),
    };

    let transversal = match &cfg.transversal {
        None | Some(TransversalCfg::Named(_)) => {
            if let Some(TransversalCfg::Named(name)) = &cfg.transversal {
                if name != "default" {
                    return Err(format!("unknown transversal '{name}'"));
                }
            }
            None
        }
        Some(TransversalCfg::Explicit(els)) => {
            Some(els.iter().map(ElementCfg::to_element).collect())
        }
    };

    Ok(TripleParts { group: g, h, f, transversal })
}

pub fn build_atoms(cfg: &TripleConfig) -> Result<AtomSpec, String> {
    let atoms = cfg.atoms.as_ref().ok_or("config has no atoms section")?;
    if cfg.group.is_some() || cfg.subgroup.is_some() || cfg.f.is_some() {
        return Err("a config carries either a triple or an atom table, not both".to_string());
    }
    Ok(AtomSpec {
        m: atoms.m,
        atoms: atoms
            .atoms
            .iter()
            .map(|a| AtomDef {
                name: a.name.clone(),
                children: a.children.clone(),
                perm: a.perm.clone(),
            })
            .collect(),
    })
}

pub fn is_atoms(cfg: &TripleConfig) -> bool {
    cfg.atoms.is_some()
}

/// Canonical bytes of a config: pretty JSON plus a trailing newline.
pub fn canonical_pretty(cfg: &TripleConfig) -> String {
    let mut s = serde_json::to_string_pretty(cfg).expect("config serializes");
    s.push('\n');
    s
}

/// Canonical compact form, the digest input.
pub fn canonical_compact(cfg: &TripleConfig) -> String {
    serde_json::to_string(cfg).expect("config serializes")
}

/// Rebuild the config that describes a registry object.
pub fn config_of(obj: &RegistryObject) -> TripleConfig {
    match obj {
        RegistryObject::Triple(t) => {
            let (kind, rank, x_matrix) = match &t.group {
                GroupDesc::FreeAbelian { rank } => ("free-abelian", *rank, None),
                GroupDesc::Affine { rank, x } => (
                    "affine",
                    *rank,
                    Some(x.row_vecs().iter().map(|r| r.iter().map(int_to_i64).collect()).collect()),
                ),
            };
            let e = int_to_i64(t.h.e());
            let f = match &t.f {
                HomDesc::Abelian { a } => HomCfg {
                    matrix: Some(
                        a.row_vecs()
                            .iter()
                            .map(|r| r.iter().map(RatEntry::from_rat).collect())
                            .collect(),
                    ),
                    images: None,
                },
                HomDesc::Affine { img_head, img_lattice } => HomCfg {
                    matrix: None,
                    images: Some(ImagesCfg {
                        head: ElementCfg::of_element(img_head),
                        lattice: img_lattice.iter().map(ElementCfg::of_element).collect(),
                    }),
                },
            };
            TripleConfig {
                group: Some(GroupCfg { kind: kind.to_string(), rank, x_matrix }),
                subgroup: Some(SubgroupCfg {
                    lattice: t
                        .h
                        .w()
                        .basis_rows()
                        .iter()
                        .map(|r| r.iter().map(int_to_i64).collect())
                        .collect(),
                    e: (e != 0).then_some(e),
                    u0: (e != 0 && t.h.u0().iter().any(|c| c != &Int::from(0)))
                        .then(|| t.h.u0().iter().map(int_to_i64).collect()),
                }),
                f: Some(f),
                transversal: Some(TransversalCfg::Named("default".to_string())),
                atoms: None,
            }
        }
        RegistryObject::Atoms(spec) | RegistryObject::Templates(spec) => TripleConfig {
            group: None,
            subgroup: None,
            f: None,
            transversal: None,
            atoms: Some(AtomsCfg {
                m: spec.m,
                atoms: spec
                    .atoms
                    .iter()
                    .map(|a| AtomCfg {
                        name: a.name.clone(),
                        children: a.children.clone(),
                        perm: a.perm.clone(),
                    })
                    .collect(),
            }),
        },
    }
}
