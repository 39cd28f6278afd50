//! Lazy wreath-recursion engine for tree automorphisms.
//!
//! An automorphism of the m-ary rooted tree is described by its first-level
//! permutation together with the m automorphisms induced on the subtrees.
//! Two backends feed this recursion: a virtual endomorphism triple, where
//! the children of a group element g at transversal position y are
//! f(y g y'^-1) with y' the representative of the coset of y g, and a
//! finite table of named atoms with explicitly listed children.
//!
//! Expressions are kept in a normalized form (flattened products, free
//! cancellation of adjacent inverses, inverses of group elements folded
//! into the element). Products of distinct group elements are kept apart
//! on purpose: collapsing them would make the homomorphism property of the
//! coset recursion an empty statement instead of a checkable one.
//! Semantic questions (equality, triviality, order) always go through the
//! bisimulation routines, which are three-valued and never overclaim.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use core::fmt;

use num_integer::Integer;

use crate::arith::{int, Int};
use crate::nilgroup::{sg_member, AffineElement};
use crate::vend::registry::AtomSpec;
use crate::vend::{f_eval, Triple, VendError};

/// A formal expression for a tree automorphism.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum AutExpr {
    Identity,
    TripleElem(AffineElement),
    Atom(String),
    Prod(Vec<AutExpr>),
    Inv(Box<AutExpr>),
}

impl AutExpr {
    pub fn atom(name: &str) -> AutExpr {
        AutExpr::Atom(name.to_owned())
    }

    pub fn elem(g: AffineElement) -> AutExpr {
        AutExpr::TripleElem(g)
    }

    pub fn inv(self) -> AutExpr {
        AutExpr::Inv(Box::new(self))
    }

    /// Expression for a word in named atoms with integer exponents.
    pub fn from_word(pairs: &[(String, i64)]) -> AutExpr {
        let mut items = Vec::new();
        for (name, e) in pairs {
            let base = AutExpr::Atom(name.clone());
            for _ in 0..e.unsigned_abs() {
                if *e >= 0 {
                    items.push(base.clone());
                } else {
                    items.push(base.clone().inv());
                }
            }
        }
        match items.len() {
            0 => AutExpr::Identity,
            1 => items.pop().unwrap(),
            _ => AutExpr::Prod(items),
        }
    }
}

impl fmt::Display for AutExpr {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn leaf(out: &mut fmt::Formatter<'_>, e: &AutExpr, exp: i64) -> fmt::Result {
            match e {
                AutExpr::Atom(n) if exp == 1 => write!(out, "{n}"),
                AutExpr::Atom(n) => write!(out, "{n}^{exp}"),
                AutExpr::TripleElem(g) if exp == 1 => write!(out, "{{{g}}}"),
                AutExpr::TripleElem(g) => write!(out, "{{{g}}}^{exp}"),
                _ => unreachable!("products are flat after normalization"),
            }
        }
        match self {
            AutExpr::Identity => write!(out, "e"),
            AutExpr::Atom(_) | AutExpr::TripleElem(_) => leaf(out, self, 1),
            AutExpr::Inv(x) => match &**x {
                AutExpr::Atom(_) | AutExpr::TripleElem(_) => leaf(out, x, -1),
                other => write!(out, "({other})^-1"),
            },
            AutExpr::Prod(items) => {
                // compress runs of one leaf into a power
                let mut i = 0;
                let mut first = true;
                while i < items.len() {
                    let (base, sign) = match &items[i] {
                        AutExpr::Inv(x) => (&**x, -1i64),
                        other => (other, 1),
                    };
                    let mut j = i + 1;
                    while j < items.len() && items[j] == items[i] {
                        j += 1;
                    }
                    if !first {
                        write!(out, "*")?;
                    }
                    first = false;
                    leaf(out, base, sign * (j - i) as i64)?;
                    i = j;
                }
                Ok(())
            }
        }
    }
}

/// A full portrait to some depth: the permutation at every internal
/// vertex, level by level, vertices in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Portrait {
    pub m: usize,
    pub levels: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateSet {
    Finite(Vec<AutExpr>),
    Exceeded(Vec<AutExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EqualOutcome {
    Equal,
    NotEqual(String),
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderOutcome {
    Finite(usize),
    ExceedsBound,
}

enum Backend {
    Triple(Box<Triple>),
    Atoms(BTreeMap<String, (Vec<AutExpr>, Vec<usize>)>),
}

/// Pair budget used by `order`, which has no explicit pair cap of its own.
const ORDER_PAIR_BUDGET: usize = 1 << 14;

/// Step cap for the word-collection rewriting; reaching it just means the
/// word is returned as far as it got, which only costs pruning power.
const REDUCE_STEP_CAP: usize = 100_000;

type Carry = Vec<(String, i64)>;

pub struct Engine {
    backend: Backend,
    m: usize,
    memo: BTreeMap<AutExpr, (Vec<AutExpr>, Vec<usize>)>,
    /// Certified commutation rules (x, y, c) meaning [x, y] = c with c
    /// commuting with y. Used to collect atom words into shorter forms.
    rules: Vec<(String, String, Carry)>,
    /// Rule assumed during a `certify_rule` run (coinduction hypothesis).
    assumed: Option<(String, String, Carry)>,
}

impl Engine {
    pub fn for_triple(t: Triple) -> Result<Engine, VendError> {
        let m = t
            .degree_usize()
            .ok_or_else(|| VendError::Unsupported("degree exceeds the machine word".to_string()))?;
        Ok(Engine {
            backend: Backend::Triple(Box::new(t)),
            m,
            memo: BTreeMap::new(),
            rules: Vec::new(),
            assumed: None,
        })
    }

    pub fn for_atoms(spec: &AtomSpec) -> Result<Engine, VendError> {
        let m = spec.m;
        if m == 0 {
            return Err(VendError::Unsupported("tree arity must be positive".to_string()));
        }
        let names: BTreeSet<&str> = spec.atoms.iter().map(|a| a.name.as_str()).collect();
        if names.len() != spec.atoms.len() {
            return Err(VendError::Unsupported("duplicate atom name".to_string()));
        }
        let mut table = BTreeMap::new();
        for atom in &spec.atoms {
            if atom.children.len() != m {
                return Err(VendError::Unsupported(format!(
                    "atom {} has {} children, expected {m}",
                    atom.name,
                    atom.children.len()
                )));
            }
            let mut seen = vec![false; m];
            for &p in &atom.perm {
                if p >= m || seen[p] {
                    return Err(VendError::Unsupported(format!(
                        "atom {} has an invalid permutation",
                        atom.name
                    )));
                }
                seen[p] = true;
            }
            if atom.perm.len() != m {
                return Err(VendError::Unsupported(format!(
                    "atom {} has an invalid permutation",
                    atom.name
                )));
            }
            for word in &atom.children {
                for (name, _) in word {
                    if !names.contains(name.as_str()) {
                        return Err(VendError::Unsupported(format!(
                            "atom {} references undefined atom {name}",
                            atom.name
                        )));
                    }
                }
            }
            let children: Vec<AutExpr> = atom.children.iter().map(|w| AutExpr::from_word(w)).collect();
            table.insert(atom.name.clone(), (children, atom.perm.clone()));
        }
        Ok(Engine {
            backend: Backend::Atoms(table),
            m,
            memo: BTreeMap::new(),
            rules: Vec::new(),
            assumed: None,
        })
    }

    pub fn arity(&self) -> usize {
        self.m
    }

    /// Flatten products, cancel adjacent inverse pairs, and push inverses
    /// down to the leaves. Group elements stay separate inside products.
    pub fn normalize(&self, e: AutExpr) -> AutExpr {
        let mut stack: Vec<AutExpr> = Vec::new();
        self.flatten(e, false, &mut stack);
        match stack.len() {
            0 => AutExpr::Identity,
            1 => stack.pop().unwrap(),
            _ => AutExpr::Prod(stack),
        }
    }

    fn flatten(&self, e: AutExpr, inv: bool, out: &mut Vec<AutExpr>) {
        match e {
            AutExpr::Identity => {}
            AutExpr::TripleElem(g) => {
                let g = if inv {
                    match &self.backend {
                        Backend::Triple(t) => t.group.inv(&g),
                        Backend::Atoms(_) => {
                            self.push_cancel(out, AutExpr::Inv(Box::new(AutExpr::TripleElem(g))));
                            return;
                        }
                    }
                } else {
                    g
                };
                if !g.is_identity() {
                    self.push_cancel(out, AutExpr::TripleElem(g));
                }
            }
            AutExpr::Atom(n) => {
                let item = if inv {
                    AutExpr::Inv(Box::new(AutExpr::Atom(n)))
                } else {
                    AutExpr::Atom(n)
                };
                self.push_cancel(out, item);
            }
            AutExpr::Prod(items) => {
                if inv {
                    for item in items.into_iter().rev() {
                        self.flatten(item, true, out);
                    }
                } else {
                    for item in items {
                        self.flatten(item, false, out);
                    }
                }
            }
            AutExpr::Inv(x) => self.flatten(*x, !inv, out),
        }
    }

    fn push_cancel(&self, out: &mut Vec<AutExpr>, item: AutExpr) {
        if let Some(top) = out.last() {
            let cancels = match (top, &item) {
                (AutExpr::Atom(a), AutExpr::Inv(b)) | (AutExpr::Inv(b), AutExpr::Atom(a)) => {
                    matches!(&**b, AutExpr::Atom(c) if c == a)
                }
                (AutExpr::TripleElem(a), AutExpr::TripleElem(b)) => match &self.backend {
                    Backend::Triple(t) => t.group.mul(a, b).is_identity(),
                    Backend::Atoms(_) => false,
                },
                _ => false,
            };
            if cancels {
                out.pop();
                return;
            }
        }
        out.push(item);
    }

    /// One wreath-recursion step: children at the source positions and the
    /// first-level permutation. Memoized on the normalized expression.
    pub fn decompose(&mut self, e: &AutExpr) -> Result<(Vec<AutExpr>, Vec<usize>), VendError> {
        let key = self.normalize(e.clone());
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let result = match &key {
            AutExpr::Identity => {
                (vec![AutExpr::Identity; self.m], (0..self.m).collect::<Vec<_>>())
            }
            AutExpr::TripleElem(g) => self.decompose_elem(g)?,
            AutExpr::Atom(name) => {
                let Backend::Atoms(table) = &self.backend else {
                    return Err(VendError::Unsupported(
                        "atom expressions need an atom table".to_string(),
                    ));
                };
                table
                    .get(name)
                    .cloned()
                    .ok_or_else(|| VendError::Unsupported(format!("unknown atom {name}")))?
            }
            AutExpr::Prod(items) => {
                let mut children = vec![AutExpr::Identity; self.m];
                let mut perm: Vec<usize> = (0..self.m).collect();
                for item in items.clone() {
                    let (d, q) = self.decompose(&item)?;
                    for y in 0..self.m {
                        let joined =
                            AutExpr::Prod(vec![children[y].clone(), d[perm[y]].clone()]);
                        children[y] = self.normalize(joined);
                    }
                    for slot in perm.iter_mut() {
                        *slot = q[*slot];
                    }
                }
                (children, perm)
            }
            AutExpr::Inv(x) => {
                let (c, p) = self.decompose(x)?;
                let mut pinv = vec![0usize; self.m];
                for (y, &img) in p.iter().enumerate() {
                    pinv[img] = y;
                }
                let children = pinv
                    .iter()
                    .map(|&src| self.normalize(AutExpr::Inv(Box::new(c[src].clone()))))
                    .collect();
                (children, pinv)
            }
        };
        self.memo.insert(key, result.clone());
        Ok(result)
    }

    fn decompose_elem(&self, g: &AffineElement) -> Result<(Vec<AutExpr>, Vec<usize>), VendError> {
        let Backend::Triple(t) = &self.backend else {
            return Err(VendError::Unsupported(
                "group elements need a triple backend".to_string(),
            ));
        };
        let grp = &t.group;
        let mut children = Vec::with_capacity(self.m);
        let mut perm = Vec::with_capacity(self.m);
        for y in &t.transversal {
            let yg = grp.mul(y, g);
            let mut hit = None;
            for (j, rep) in t.transversal.iter().enumerate() {
                let cand = grp.mul(&yg, &grp.inv(rep));
                if sg_member(grp, &t.h, &cand) {
                    hit = Some((j, cand));
                    break;
                }
            }
            let Some((j, in_h)) = hit else {
                return Err(VendError::Invalid(crate::vend::ValidationReport {
                    m: None,
                    checks: vec![crate::vend::Check {
                        label: "transversal covers every coset".to_string(),
                        ok: false,
                        witness: Some(format!("no representative found for {yg}")),
                    }],
                }));
            };
            let img = f_eval(t, &in_h)?;
            children.push(if img.is_identity() {
                AutExpr::Identity
            } else {
                AutExpr::TripleElem(img)
            });
            perm.push(j);
        }
        Ok((children, perm))
    }

    /// Image of a vertex under the right action: the first letter moves by
    /// the permutation, the tail by the child at the original letter.
    pub fn act_vertex(&mut self, e: &AutExpr, word: &[usize]) -> Result<Vec<usize>, VendError> {
        if word.is_empty() {
            return Ok(Vec::new());
        }
        let first = word[0];
        if first >= self.m {
            return Err(VendError::Unsupported(format!(
                "digit {first} out of range for arity {}",
                self.m
            )));
        }
        let (c, p) = self.decompose(e)?;
        let mut out = vec![p[first]];
        out.extend(self.act_vertex(&c[first], &word[1..])?);
        Ok(out)
    }

    pub fn portrait(&mut self, e: &AutExpr, depth: usize) -> Result<Portrait, VendError> {
        let mut levels = Vec::with_capacity(depth);
        let mut row = vec![self.normalize(e.clone())];
        for _ in 0..depth {
            let mut perms = Vec::with_capacity(row.len());
            let mut next = Vec::with_capacity(row.len() * self.m);
            for v in &row {
                let (c, p) = self.decompose(v)?;
                perms.push(p);
                next.extend(c);
            }
            levels.push(perms);
            row = next;
        }
        Ok(Portrait { m: self.m, levels })
    }

    /// Permutation induced on the m^depth vertices of one level, vertices
    /// in lexicographic order with the root-nearest digit most significant.
    pub fn level_perm(&mut self, e: &AutExpr, depth: usize) -> Result<Vec<usize>, VendError> {
        let total = self
            .m
            .checked_pow(depth as u32)
            .ok_or_else(|| VendError::Unsupported("level size overflows".to_string()))?;
        if depth == 0 {
            return Ok(vec![0]);
        }
        let (c, p) = self.decompose(e)?;
        let stride = total / self.m;
        let mut out = vec![0usize; total];
        for y in 0..self.m {
            let inner = self.level_perm(&c[y], depth - 1)?;
            for (i, &img) in inner.iter().enumerate() {
                out[y * stride + i] = p[y] * stride + img;
            }
        }
        Ok(out)
    }

    /// Breadth-first closure of the state set Q(e) under decomposition.
    pub fn states(&mut self, e: &AutExpr, max_states: usize) -> Result<StateSet, VendError> {
        let start = self.normalize(e.clone());
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            let (children, _) = self.decompose(&v)?;
            for c in children {
                if seen.insert(c.clone()) {
                    if seen.len() > max_states {
                        return Ok(StateSet::Exceeded(seen.into_iter().collect()));
                    }
                    queue.push_back(c);
                }
            }
        }
        Ok(StateSet::Finite(seen.into_iter().collect()))
    }

    /// Bisimulation equality with a pair budget and an optional depth cap.
    ///
    /// Pairs are matched up to the congruence generated by the certified
    /// commutation rules: a pair whose difference word collects to the empty
    /// word is discharged without expansion, and child words are collected
    /// before they enter the queue. During `certify_rule` the rule under
    /// proof itself joins the rewriting as a coinduction hypothesis; the
    /// root pair is then exempt from discharge-by-rewriting, so the run
    /// certifies only after the root has had its permutations compared and
    /// its children checked. Closure of the pair set therefore remains a
    /// sound certificate, because equality of tree actions is a congruence.
    fn bisim(
        &mut self,
        a: &AutExpr,
        b: &AutExpr,
        max_pairs: usize,
        max_depth: Option<usize>,
    ) -> Result<EqualOutcome, VendError> {
        let (na, nb) = if self.assumed.is_some() {
            (self.normalize(a.clone()), self.normalize(b.clone()))
        } else {
            let na = self.normalize(a.clone());
            let nb = self.normalize(b.clone());
            (self.reduce(&na), self.reduce(&nb))
        };
        let mut seen: BTreeSet<(AutExpr, AutExpr)> = BTreeSet::new();
        let mut queue: VecDeque<(AutExpr, AutExpr, Vec<usize>)> = VecDeque::new();
        let mut capped = false;
        let mut at_root = true;
        seen.insert((na.clone(), nb.clone()));
        queue.push_back((na, nb, Vec::new()));
        while let Some((va, vb, path)) = queue.pop_front() {
            let root = at_root;
            at_root = false;
            if va == vb {
                continue;
            }
            if (!root || self.assumed.is_none()) && self.diff_collects_to_identity(&va, &vb) {
                continue;
            }
            let (ca, pa) = self.decompose(&va)?;
            let (cb, pb) = self.decompose(&vb)?;
            if pa != pb {
                return Ok(EqualOutcome::NotEqual(fmt_vertex(self.m, &path)));
            }
            if let Some(d) = max_depth {
                if path.len() >= d {
                    capped = true;
                    continue;
                }
            }
            for y in 0..self.m {
                let pair = (self.reduce(&ca[y]), self.reduce(&cb[y]));
                if pair.0 == pair.1 {
                    continue;
                }
                if seen.insert(pair.clone()) {
                    if seen.len() > max_pairs {
                        return Ok(EqualOutcome::Unknown);
                    }
                    let mut next = path.clone();
                    next.push(y);
                    queue.push_back((pair.0, pair.1, next));
                }
            }
        }
        if capped {
            Ok(EqualOutcome::Unknown)
        } else {
            Ok(EqualOutcome::Equal)
        }
    }

    /// Prove a relation [x, y] = carry between two atoms by bisimulation and,
    /// on success, keep it as a collection rule for later runs. The relation
    /// is assumed while its own children are checked, which is the usual
    /// coinductive reading; a failed run returns false and changes nothing.
    ///
    /// The signed swap identities behind the rewriting are derived from
    /// x*y = y*x*c using only that c commutes with y, so every letter of the
    /// carry must already have a certified commutation with y.
    pub fn certify_rule(
        &mut self,
        x: &str,
        y: &str,
        carry: &[(String, i64)],
        max_pairs: usize,
    ) -> Result<bool, VendError> {
        let Backend::Atoms(table) = &self.backend else {
            return Err(VendError::Unsupported(
                "collection rules apply to atom tables only".to_string(),
            ));
        };
        if x == y || !table.contains_key(x) || !table.contains_key(y) {
            return Err(VendError::Unsupported(format!("no such atom pair ({x}, {y})")));
        }
        for (n, _) in carry {
            if !table.contains_key(n.as_str()) {
                return Err(VendError::Unsupported(format!("carry letter {n} is not an atom")));
            }
            if n != y && !self.commutes(n, y) {
                return Err(VendError::Unsupported(format!(
                    "carry letter {n} has no certified commutation with {y}"
                )));
            }
        }
        if self.rule_for(x, y).is_some() || self.rule_for(y, x).is_some() {
            return Err(VendError::Unsupported(format!("a rule for ({x}, {y}) is already present")));
        }
        let lhs = AutExpr::Prod(vec![AutExpr::atom(x), AutExpr::atom(y)]);
        let rhs = AutExpr::Prod(vec![
            AutExpr::atom(y),
            AutExpr::atom(x),
            AutExpr::from_word(carry),
        ]);
        self.assumed = Some((x.to_string(), y.to_string(), carry.to_vec()));
        let out = self.bisim(&lhs, &rhs, max_pairs, None);
        self.assumed = None;
        if out? == EqualOutcome::Equal {
            self.rules.push((x.to_string(), y.to_string(), carry.to_vec()));
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn commutes(&self, a: &str, b: &str) -> bool {
        self.rules
            .iter()
            .any(|(x, y, c)| c.is_empty() && ((x == a && y == b) || (x == b && y == a)))
    }

    fn rule_for(&self, x: &str, y: &str) -> Option<&[(String, i64)]> {
        if let Some((ax, ay, c)) = &self.assumed {
            if ax == x && ay == y {
                return Some(c);
            }
        }
        self.rules
            .iter()
            .find(|(rx, ry, _)| rx == x && ry == y)
            .map(|(_, _, c)| c.as_slice())
    }

    fn diff_collects_to_identity(&self, a: &AutExpr, b: &AutExpr) -> bool {
        if self.rules.is_empty() && self.assumed.is_none() {
            return false;
        }
        let diff = self.normalize(AutExpr::Prod(vec![
            a.clone(),
            AutExpr::Inv(Box::new(b.clone())),
        ]));
        self.reduce(&diff) == AutExpr::Identity
    }

    /// Collect a pure atom word with the rewriting rules
    ///   x*y      -> y*x*c         x*y^-1    -> y^-1*x*c^-1
    ///   x^-1*y   -> y*c^-1*x^-1   x^-1*y^-1 -> y^-1*c*x^-1
    /// for each stored relation [x, y] = c. Leftmost rewriting with free
    /// cancellation in between; anything that is not a plain atom word is
    /// returned untouched. The step cap only bounds pathological rule sets,
    /// in which case the word comes back partially collected.
    fn reduce(&self, e: &AutExpr) -> AutExpr {
        if self.rules.is_empty() && self.assumed.is_none() {
            return e.clone();
        }
        let Some(mut w) = expr_as_word(e) else {
            return e.clone();
        };
        let mut steps = 0usize;
        loop {
            free_reduce_word(&mut w);
            let mut site = None;
            for i in 0..w.len().saturating_sub(1) {
                if self.rule_for(&w[i].0, &w[i + 1].0).is_some() {
                    site = Some(i);
                    break;
                }
            }
            let Some(i) = site else { break };
            let (xn, s) = w[i].clone();
            let (yn, t) = w[i + 1].clone();
            let carry = self.rule_for(&xn, &yn).unwrap().to_vec();
            let mut repl: Vec<(String, i64)> = vec![(yn, t)];
            if s > 0 {
                repl.push((xn, 1));
                push_carry(&mut repl, &carry, t);
            } else {
                push_carry(&mut repl, &carry, -t);
                repl.push((xn, -1));
            }
            w.splice(i..i + 2, repl);
            steps += 1;
            if steps > REDUCE_STEP_CAP {
                break;
            }
        }
        free_reduce_word(&mut w);
        word_to_expr(&w)
    }

    /// `Equal` is certified by closure of the pair set; `NotEqual` carries
    /// the vertex whose first-level permutations differ.
    pub fn equal(
        &mut self,
        a: &AutExpr,
        b: &AutExpr,
        max_pairs: usize,
    ) -> Result<EqualOutcome, VendError> {
        self.bisim(a, b, max_pairs, None)
    }

    pub fn is_trivial(
        &mut self,
        a: &AutExpr,
        max_pairs: usize,
    ) -> Result<EqualOutcome, VendError> {
        self.equal(a, &AutExpr::Identity, max_pairs)
    }

    /// Smallest k <= max_n with a^k certified trivial; the bisimulation for
    /// each power is capped at the given depth.
    pub fn order(
        &mut self,
        a: &AutExpr,
        max_n: usize,
        depth: usize,
    ) -> Result<OrderOutcome, VendError> {
        let base = self.normalize(a.clone());
        let mut acc = base.clone();
        for k in 1..=max_n {
            let verdict = self.bisim(&acc, &AutExpr::Identity, ORDER_PAIR_BUDGET, Some(depth))?;
            if verdict == EqualOutcome::Equal {
                return Ok(OrderOutcome::Finite(k));
            }
            acc = self.normalize(AutExpr::Prod(vec![acc, base.clone()]));
        }
        Ok(OrderOutcome::ExceedsBound)
    }

    /// Whether the group generated acts transitively on the given level.
    pub fn level_transitive(
        &mut self,
        gens: &[AutExpr],
        depth: usize,
    ) -> Result<bool, VendError> {
        let total = self
            .m
            .checked_pow(depth as u32)
            .ok_or_else(|| VendError::Unsupported("level size overflows".to_string()))?;
        let perms: Vec<Vec<usize>> = gens
            .iter()
            .map(|g| self.level_perm(g, depth))
            .collect::<Result<_, _>>()?;
        let mut seen = vec![false; total];
        let mut queue = VecDeque::new();
        seen[0] = true;
        queue.push_back(0usize);
        let mut count = 1usize;
        while let Some(v) = queue.pop_front() {
            for p in &perms {
                let w = p[v];
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        Ok(count == total)
    }
}

/// Signed-letter view of an expression, or None if it mentions anything
/// other than atoms.
fn expr_as_word(e: &AutExpr) -> Option<Vec<(String, i64)>> {
    fn letter(e: &AutExpr) -> Option<(String, i64)> {
        match e {
            AutExpr::Atom(n) => Some((n.clone(), 1)),
            AutExpr::Inv(x) => match &**x {
                AutExpr::Atom(n) => Some((n.clone(), -1)),
                _ => None,
            },
            _ => None,
        }
    }
    match e {
        AutExpr::Identity => Some(Vec::new()),
        AutExpr::Prod(items) => items.iter().map(letter).collect(),
        _ => letter(e).map(|l| vec![l]),
    }
}

fn word_to_expr(w: &[(String, i64)]) -> AutExpr {
    let mut items = Vec::with_capacity(w.len());
    for (n, s) in w {
        let a = AutExpr::Atom(n.clone());
        items.push(if *s > 0 { a } else { AutExpr::Inv(Box::new(a)) });
    }
    match items.len() {
        0 => AutExpr::Identity,
        1 => items.pop().unwrap(),
        _ => AutExpr::Prod(items),
    }
}

fn free_reduce_word(w: &mut Vec<(String, i64)>) {
    let mut out: Vec<(String, i64)> = Vec::with_capacity(w.len());
    for l in w.drain(..) {
        if let Some(top) = out.last() {
            if top.0 == l.0 && top.1 + l.1 == 0 {
                out.pop();
                continue;
            }
        }
        out.push(l);
    }
    *w = out;
}

/// Append the carry word, or its inverse for negative sign, as signed
/// single letters.
fn push_carry(out: &mut Vec<(String, i64)>, carry: &[(String, i64)], sign: i64) {
    let letters = |out: &mut Vec<(String, i64)>, n: &String, e: i64| {
        let s = if e > 0 { 1 } else { -1 };
        for _ in 0..e.unsigned_abs() {
            out.push((n.clone(), s));
        }
    };
    if sign > 0 {
        for (n, e) in carry {
            letters(out, n, *e);
        }
    } else {
        for (n, e) in carry.iter().rev() {
            letters(out, n, -*e);
        }
    }
}

fn fmt_vertex(m: usize, path: &[usize]) -> String {
    if path.is_empty() {
        return "(root)".to_string();
    }
    if m <= 10 {
        path.iter()
            .map(|&d| char::from_digit(d as u32, 10).unwrap())
            .collect()
    } else {
        let parts: Vec<String> = path.iter().map(|d| d.to_string()).collect();
        parts.join(".")
    }
}

/// Cycle lengths of a permutation, longest first.
pub fn cycle_lengths(perm: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            len += 1;
            v = perm[v];
        }
        out.push(len);
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// Order of a permutation as the least common multiple of its cycles.
pub fn perm_order(perm: &[usize]) -> Int {
    let mut acc = Int::from(1);
    for len in cycle_lengths(perm) {
        acc = acc.lcm(&int(len as i64));
    }
    acc
}

/// Cycle notation with 1-based points; fixed points omitted, identity "()" .
pub fn perm_cycles(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] == start {
            seen[start] = true;
            continue;
        }
        let mut cycle = Vec::new();
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            cycle.push(v + 1);
            v = perm[v];
        }
        out.push('(');
        let parts: Vec<String> = cycle.iter().map(|p| p.to_string()).collect();
        out.push_str(&parts.join(","));
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::vend::registry::{make_example, RegistryObject};

    fn triple(name: &str) -> Triple {
        match make_example(name, None, None).unwrap() {
            RegistryObject::Triple(t) => t,
            _ => panic!("expected a triple"),
        }
    }

    fn atoms_engine() -> Engine {
        match make_example("sec21-atoms", None, None).unwrap() {
            RegistryObject::Atoms(spec) => Engine::for_atoms(&spec).unwrap(),
            _ => panic!("expected atoms"),
        }
    }

    fn comm(a: AutExpr, b: AutExpr) -> AutExpr {
        AutExpr::Prod(vec![a.clone().inv(), b.clone().inv(), a, b])
    }

    #[test]
    fn adding_machine_recursion_and_carry() {
        let mut eng = Engine::for_triple(triple("adding-machine")).unwrap();
        let one = AutExpr::elem(AffineElement::translation(vec![int(1)]));
        let (c, p) = eng.decompose(&one).unwrap();
        assert_eq!(p, vec![1, 0]);
        assert_eq!(c[0], AutExpr::Identity);
        assert_eq!(c[1], one);
        assert_eq!(eng.act_vertex(&one, &[1, 1, 1]).unwrap(), vec![0, 0, 0]);
        assert_eq!(eng.act_vertex(&one, &[0, 1, 1]).unwrap(), vec![1, 1, 1]);
        match eng.states(&one, 10).unwrap() {
            StateSet::Finite(q) => assert_eq!(q.len(), 2),
            StateSet::Exceeded(_) => panic!("the odometer has two states"),
        }
        for d in 1..=8 {
            let lp = eng.level_perm(&one, d).unwrap();
            assert_eq!(cycle_lengths(&lp), vec![1usize << d], "depth {d}");
        }
        assert_eq!(eng.order(&one, 12, 8).unwrap(), OrderOutcome::ExceedsBound);
        assert!(eng.level_transitive(core::slice::from_ref(&one), 6).unwrap());
        assert!(matches!(
            eng.is_trivial(&one, 100).unwrap(),
            EqualOutcome::NotEqual(_)
        ));
    }

    #[test]
    fn identity_is_inert_everywhere() {
        let mut eng = Engine::for_triple(triple("adding-machine")).unwrap();
        let e = AutExpr::Identity;
        let (c, p) = eng.decompose(&e).unwrap();
        assert_eq!(p, vec![0, 1]);
        assert!(c.iter().all(|x| *x == AutExpr::Identity));
        assert_eq!(eng.act_vertex(&e, &[1, 0, 1]).unwrap(), vec![1, 0, 1]);
        assert_eq!(eng.order(&e, 3, 4).unwrap(), OrderOutcome::Finite(1));
        let pt = eng.portrait(&e, 3).unwrap();
        assert!(pt
            .levels
            .iter()
            .flatten()
            .all(|p| p.iter().enumerate().all(|(i, &v)| i == v)));
    }

    #[test]
    fn example1_generator_recursion_matches_the_printed_form() {
        let mut eng = Engine::for_triple(triple("example1")).unwrap();
        let alpha = AutExpr::elem(AffineElement::translation(vec![int(1), int(0)]));
        let beta = AutExpr::elem(AffineElement::translation(vec![int(0), int(1)]));
        // alpha = (1, alpha beta^2) swap, beta = (alpha, alpha).
        let (ca, pa) = eng.decompose(&alpha).unwrap();
        assert_eq!(pa, vec![1, 0]);
        assert_eq!(ca[0], AutExpr::Identity);
        assert_eq!(
            ca[1],
            AutExpr::elem(AffineElement::translation(vec![int(1), int(2)]))
        );
        let (cb, pb) = eng.decompose(&beta).unwrap();
        assert_eq!(pb, vec![0, 1]);
        assert_eq!(cb[0], AutExpr::elem(AffineElement::translation(vec![int(1), int(0)])));
        assert_eq!(cb[0], cb[1]);
        match eng.states(&alpha, 50).unwrap() {
            StateSet::Exceeded(partial) => assert!(partial.len() > 50),
            StateSet::Finite(q) => panic!("unexpectedly closed with {} states", q.len()),
        }
    }

    #[test]
    fn coset_recursion_is_a_homomorphism_on_the_intro_triple() {
        let mut eng = Engine::for_triple(triple("heisenberg-intro")).unwrap();
        let t = triple("heisenberg-intro");
        let els = [
            AffineElement::new(int(1), vec![int(0), int(0)]),
            AffineElement::new(int(0), vec![int(1), int(0)]),
            AffineElement::new(int(0), vec![int(0), int(1)]),
            AffineElement::new(int(-1), vec![int(2), int(-1)]),
        ];
        for a in &els {
            for b in &els {
                let prod = AutExpr::Prod(vec![
                    AutExpr::elem(a.clone()),
                    AutExpr::elem(b.clone()),
                ]);
                let single = AutExpr::elem(t.group.mul(a, b));
                assert_eq!(
                    eng.portrait(&prod, 4).unwrap(),
                    eng.portrait(&single, 4).unwrap(),
                    "{a} * {b}"
                );
                assert_eq!(eng.equal(&prod, &single, 10_000).unwrap(), EqualOutcome::Equal);
            }
        }
    }

    #[test]
    fn inverse_expressions_invert_the_action() {
        let mut eng = atoms_engine();
        let kappa = AutExpr::atom("kappa");
        let beta = AutExpr::atom("beta");
        let w = vec![2usize, 0, 3, 1, 2];
        for e in [kappa, beta.clone(), AutExpr::Prod(vec![beta, AutExpr::atom("alpha")])] {
            let img = eng.act_vertex(&e, &w).unwrap();
            assert_eq!(eng.act_vertex(&e.clone().inv(), &img).unwrap(), w);
            let lp = eng.level_perm(&e, 3).unwrap();
            let mut sorted = lp.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..64).collect::<Vec<_>>());
        }
    }

    #[test]
    fn right_action_composes_left_to_right() {
        let mut eng = atoms_engine();
        let a = AutExpr::atom("alpha");
        let b = AutExpr::atom("beta");
        let ab = AutExpr::Prod(vec![a.clone(), b.clone()]);
        for w in [vec![0, 1, 2], vec![3, 3, 0, 1], vec![2, 2]] {
            let via_a = eng.act_vertex(&a, &w).unwrap();
            let composed = eng.act_vertex(&b, &via_a).unwrap();
            assert_eq!(eng.act_vertex(&ab, &w).unwrap(), composed);
        }
    }

    #[test]
    fn the_z_atom_matches_its_table() {
        let mut eng = atoms_engine();
        let z = AutExpr::atom("z");
        let (c, p) = eng.decompose(&z).unwrap();
        assert_eq!(perm_cycles(&p), "(1,2)(3,4)");
        assert_eq!(c[0], AutExpr::Identity);
        assert_eq!(c[1], z);
        assert_eq!(c[2], AutExpr::Identity);
        assert_eq!(c[3], z);
        // z sends 0w to 1w without touching the tail.
        assert_eq!(eng.act_vertex(&z, &[0, 3, 1]).unwrap(), vec![1, 3, 1]);
    }

    fn certify_standard_rules(eng: &mut Engine) {
        assert!(eng.certify_rule("z", "alpha", &[], 10_000).unwrap());
        assert!(eng.certify_rule("z", "beta", &[], 10_000).unwrap());
        assert!(eng.certify_rule("z", "kappa", &[], 10_000).unwrap());
        assert!(eng.certify_rule("alpha", "kappa", &[], 10_000).unwrap());
        assert!(eng
            .certify_rule("alpha", "beta", &[("z".to_string(), 1)], 10_000)
            .unwrap());
        assert!(eng
            .certify_rule("beta", "kappa", &[("alpha".to_string(), -2)], 10_000)
            .unwrap());
    }

    #[test]
    fn commutator_of_alpha_and_beta_is_z() {
        let mut eng = atoms_engine();
        certify_standard_rules(&mut eng);
        let rel = comm(AutExpr::atom("alpha"), AutExpr::atom("beta"));
        assert_eq!(
            eng.equal(&rel, &AutExpr::atom("z"), 50_000).unwrap(),
            EqualOutcome::Equal
        );
    }

    #[test]
    fn the_listed_relations_hold_and_small_words_are_not_trivial() {
        let mut eng = atoms_engine();
        certify_standard_rules(&mut eng);
        let alpha = AutExpr::atom("alpha");
        let beta = AutExpr::atom("beta");
        let kappa = AutExpr::atom("kappa");
        let zc = comm(alpha.clone(), beta.clone());
        for rel in [
            comm(zc.clone(), alpha.clone()),
            comm(zc.clone(), beta.clone()),
            comm(zc.clone(), kappa.clone()),
            comm(alpha.clone(), kappa.clone()),
        ] {
            assert_eq!(eng.is_trivial(&rel, 50_000).unwrap(), EqualOutcome::Equal);
        }
        let bk = comm(beta.clone(), kappa.clone());
        let alpha_m2 = AutExpr::Prod(vec![alpha.clone().inv(), alpha.clone().inv()]);
        assert_eq!(eng.equal(&bk, &alpha_m2, 50_000).unwrap(), EqualOutcome::Equal);
        for word in [alpha.clone(), beta.clone(), AutExpr::Prod(vec![alpha, beta])] {
            assert!(matches!(
                eng.is_trivial(&word, 50_000).unwrap(),
                EqualOutcome::NotEqual(_)
            ));
        }
    }

    #[test]
    fn a_false_relation_does_not_certify() {
        let mut eng = atoms_engine();
        assert!(!eng.certify_rule("beta", "kappa", &[], 2_000).unwrap());
        assert!(eng.certify_rule("z", "alpha", &[], 10_000).unwrap());
        assert!(eng
            .certify_rule("beta", "alpha", &[("z".to_string(), -1)], 10_000)
            .unwrap());
        assert!(eng.certify_rule("alpha", "beta", &[], 2_000).is_err());
    }

    #[test]
    fn template_instances_commute_with_z() {
        let spec = match make_example("eight-templates", Some(1), Some(3)).unwrap() {
            RegistryObject::Templates(s) => s,
            _ => panic!(),
        };
        let mut eng = Engine::for_atoms(&spec).unwrap();
        let z = AutExpr::atom("z");
        for i in 1..=8 {
            let x = AutExpr::atom(&format!("x{i}"));
            let conj = AutExpr::Prod(vec![x.clone().inv(), z.clone(), x.clone()]);
            assert_eq!(
                eng.equal(&conj, &z, 50_000).unwrap(),
                EqualOutcome::Equal,
                "x{i}"
            );
        }
    }

    #[test]
    fn kernel_elements_of_the_degree_36_example_act_trivially() {
        let mut eng = Engine::for_triple(triple("example33")).unwrap();
        let z6 = AutExpr::elem(AffineElement::translation(vec![int(0), int(6)]));
        assert_eq!(eng.is_trivial(&z6, 10_000).unwrap(), EqualOutcome::Equal);
        let z = AutExpr::elem(AffineElement::translation(vec![int(0), int(1)]));
        assert!(matches!(
            eng.is_trivial(&z, 10_000).unwrap(),
            EqualOutcome::NotEqual(_)
        ));
    }

    #[test]
    fn atom_table_validation_rejects_bad_input() {
        let spec = AtomSpec {
            m: 2,
            atoms: vec![crate::vend::registry::AtomDef {
                name: "a".to_string(),
                children: vec![vec![("missing".to_string(), 1)], vec![]],
                perm: vec![1, 0],
            }],
        };
        assert!(Engine::for_atoms(&spec).is_err());
        let t = triple("heisenberg-intro");
        let mut eng = Engine::for_triple(t).unwrap();
        assert!(eng.decompose(&AutExpr::atom("z")).is_err());
    }

    #[test]
    fn display_compresses_powers() {
        let alpha = AutExpr::atom("alpha");
        let kappa = AutExpr::atom("kappa");
        let w = AutExpr::Prod(vec![
            alpha.clone(),
            alpha.clone(),
            alpha,
            kappa.clone().inv(),
            kappa.inv(),
        ]);
        assert_eq!(format!("{w}"), "alpha^3*kappa^-2");
    }
}
