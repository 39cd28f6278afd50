//! The word syntax used by `--element` and `equal`: factors joined by `*`,
//! optional `^` exponents, `e` for the identity. Over a triple the names are
//! `x` for the distinguished head and `e1`..`en` for the standard
//! translations; over an atom table they are the atom names.

use vend_core::arith::{int, Int};
use vend_core::nilgroup::{AffineElement, GroupDesc};
use vend_core::selfsim::AutExpr;
use vend_core::vend::{AtomSpec, Triple};

pub fn parse_word(s: &str) -> Result<Vec<(String, i64)>, String> {
    let s = s.trim();
    if s.is_empty() || s == "e" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for factor in s.split('*') {
        let factor = factor.trim();
        let (name, exp) = match factor.split_once('^') {
            Some((n, e)) => {
                let exp: i64 =
                    e.trim().parse().map_err(|_| format!("bad exponent in '{factor}'"))?;
                (n.trim(), exp)
            }
            None => (factor, 1),
        };
        if name.is_empty()
            || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            return Err(format!("bad factor '{factor}'"));
        }
        if exp != 0 {
            out.push((name.to_string(), exp));
        }
    }
    Ok(out)
}

pub fn word_on_triple(t: &Triple, word: &[(String, i64)]) -> Result<AffineElement, String> {
    let n = t.group.rank();
    let mut acc = t.group.identity();
    for (name, exp) in word {
        let base = if name == "x" {
            if matches!(t.group, GroupDesc::FreeAbelian { .. }) {
                return Err("the group is free abelian, use e1..en".to_string());
            }
            AffineElement::new(int(1), vec![Int::from(0); n])
        } else if let Some(i) = name.strip_prefix('e').and_then(|d| d.parse::<usize>().ok()) {
            if i == 0 || i > n {
                return Err(format!("translation index out of range in '{name}'"));
            }
            let mut v = vec![Int::from(0); n];
            v[i - 1] = Int::from(1);
            AffineElement::translation(v)
        } else {
            return Err(format!("unknown generator '{name}', use x or e1..e{n}"));
        };
        acc = t.group.mul(&acc, &t.group.pow(&base, &int(*exp)));
    }
    Ok(acc)
}

pub fn word_on_atoms(spec: &AtomSpec, word: &[(String, i64)]) -> Result<AutExpr, String> {
    for (name, _) in word {
        if !spec.atoms.iter().any(|a| &a.name == name) {
            return Err(format!("unknown atom '{name}'"));
        }
    }
    Ok(AutExpr::from_word(word))
}
