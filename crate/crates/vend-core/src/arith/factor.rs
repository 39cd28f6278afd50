//! Factorization in Z[x]: content times primitive irreducible factors.
//!
//! The route is the classical one: squarefree split (Yun), factor each
//! squarefree part modulo a good small prime (Berlekamp), Hensel lift past
//! the Mignotte bound, then recombine modular factors by subset search.
//! Everything is deterministic: primes are scanned in order, kernel vectors
//! and split constants in order, subsets in lexicographic order, and the
//! final factor list is sorted by degree and then by coefficient vector.

#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{int, ArithError, Int, IntPoly, RatPoly};

/// Hard cap on the degree accepted by [`factor_int_poly`].
pub const FACTOR_DEGREE_CAP: usize = 24;

/// `content * prod factors[i].0 ^ factors[i].1` reconstructs the input.
/// Factors are primitive with positive leading coefficient, irreducible over
/// Q, and sorted by degree then lexicographically by coefficient vector
/// (constant term first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub content: Int,
    pub factors: Vec<(IntPoly, u32)>,
}

impl Factorization {
    /// Multiply everything back together; used by tests and assertions.
    pub fn expand(&self) -> IntPoly {
        let mut acc = IntPoly::new(vec![self.content.clone()]);
        for (f, m) in &self.factors {
            for _ in 0..*m {
                acc = acc.mul(f);
            }
        }
        acc
    }
}

/// Factor a nonzero integer polynomial. Degrees above
/// [`FACTOR_DEGREE_CAP`] are rejected rather than attempted.
pub fn factor_int_poly(f: &IntPoly) -> Result<Factorization, ArithError> {
    if f.is_zero() {
        return Err(ArithError::ZeroPolynomial);
    }
    let degree = f.degree().unwrap();
    if degree > FACTOR_DEGREE_CAP {
        return Err(ArithError::DegreeCap { degree, cap: FACTOR_DEGREE_CAP });
    }
    let content = f.content();
    let mut prim = f.primitive_part();
    let mut factors: Vec<(IntPoly, u32)> = Vec::new();

    // Pull out the power of x first so squarefree machinery sees a nonzero
    // constant term.
    let mut x_mult = 0u32;
    while prim.coeff(0).is_zero() && prim.degree() > Some(0) {
        let shifted = IntPoly::new(prim.coeffs()[1..].to_vec());
        prim = shifted;
        x_mult += 1;
    }
    if x_mult > 0 {
        factors.push((IntPoly::from_i64(&[0, 1]), x_mult));
    }

    for (part, mult) in squarefree_split(&prim) {
        if part.degree() == Some(0) {
            continue;
        }
        for irr in factor_squarefree(&part)? {
            factors.push((irr, mult));
        }
    }

    factors.sort_by(|a, b| a.0.cmp_deg_lex(&b.0));
    // Coalesce equal factors; distinct multiplicity classes are coprime so
    // this only merges the x factor in edge cases, but it is cheap.
    let mut merged: Vec<(IntPoly, u32)> = Vec::new();
    for (f, m) in factors {
        match merged.last_mut() {
            Some((g, k)) if *g == f => *k += m,
            _ => merged.push((f, m)),
        }
    }
    let out = Factorization { content, factors: merged };
    debug_assert_eq!(&out.expand(), f, "factorization must reconstruct input");
    Ok(out)
}

/// Largest monic divisor of `q` that lies in Z[x]. Computed by clearing
/// denominators, factoring over Z, and keeping the factors whose leading
/// coefficient is a unit.
pub fn monic_integral_part(q: &RatPoly) -> Result<RatPoly, ArithError> {
    if q.is_zero() {
        return Err(ArithError::ZeroPolynomial);
    }
    let (_, f) = q.clear_denominators();
    let fac = factor_int_poly(&f)?;
    let mut acc = RatPoly::one();
    for (g, m) in &fac.factors {
        if g.leading().is_some_and(|c| c.is_one()) {
            for _ in 0..*m {
                acc = acc.mul(&g.to_rat());
            }
        }
    }
    Ok(acc)
}

/// Yun's squarefree decomposition: returns pairs `(a_i, i)` with
/// `prim = prod a_i^i`, the `a_i` squarefree and pairwise coprime,
/// primitive with positive leading coefficient.
fn squarefree_split(prim: &IntPoly) -> Vec<(IntPoly, u32)> {
    if prim.degree().is_none_or(|d| d == 0) {
        return vec![(prim.clone(), 1)];
    }
    let f = prim.to_rat();
    let fp = f.derivative();
    let u = f.gcd(&fp);
    if u.degree() == Some(0) {
        return vec![(prim.clone(), 1)];
    }
    let mut out = Vec::new();
    let mut b = f.divrem(&u).0;
    let mut c = fp.divrem(&u).0;
    let mut d = c.sub(&b.derivative());
    let mut i = 1u32;
    loop {
        let a = b.gcd(&d);
        if a.degree().is_some_and(|dg| dg > 0) {
            let (_, a_int) = a.clear_denominators();
            out.push((a_int.primitive_part(), i));
        }
        b = b.divrem(&a).0;
        if b.degree() == Some(0) {
            break;
        }
        c = d.divrem(&a).0;
        d = c.sub(&b.derivative());
        i += 1;
    }
    out
}

/// Factor a primitive squarefree polynomial of degree >= 1 into primitive
/// irreducibles with positive leading coefficient.
fn factor_squarefree(f: &IntPoly) -> Result<Vec<IntPoly>, ArithError> {
    let n = f.degree().unwrap();
    if n == 1 {
        let mut g = f.clone();
        if g.leading().unwrap().is_negative() {
            g = g.neg();
        }
        return Ok(vec![g]);
    }
    let p = choose_prime(f);
    let modral = berlekamp(&to_mod(f, p), p);
    if modral.len() == 1 {
        let mut g = f.clone();
        if g.leading().unwrap().is_negative() {
            g = g.neg();
        }
        return Ok(vec![g]);
    }

    // Lift high enough that any true factor's coefficients, times the
    // leading coefficient, are recoverable from symmetric residues.
    let bound = factor_coeff_bound(f);
    let two_b = int(2) * &bound;
    let mut modulus = int(p as i64);
    let mut k = 1u32;
    while modulus <= two_b {
        modulus = &modulus * int(p as i64);
        k += 1;
    }
    let lifted = hensel_lift_tree(f, &modral, p, k, &modulus);
    Ok(recombine(f, lifted, &modulus))
}

/// Smallest prime not dividing the leading coefficient and keeping the
/// polynomial squarefree mod p. The scan is unbounded; only finitely many
/// primes are bad for a squarefree polynomial.
fn choose_prime(f: &IntPoly) -> u64 {
    let lc = f.leading().unwrap();
    let mut p = 2u64;
    loop {
        if !(lc % int(p as i64)).is_zero() {
            let fm = to_mod(f, p);
            let dm = mod_derivative(&fm, p);
            if !dm.is_empty() && mod_gcd(&fm, &dm, p).len() == 1 {
                return p;
            }
        }
        p = next_prime(p);
    }
}

fn next_prime(p: u64) -> u64 {
    let mut q = p + 1;
    loop {
        if is_prime_u64(q) {
            return q;
        }
        q += 1;
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Mignotte-style bound: coefficients of any factor `g` of `f` (over Z,
/// with lc(g) dividing lc(f)) satisfy |coeff| <= 2^n * ||f||_2 * |lc(f)|.
fn factor_coeff_bound(f: &IntPoly) -> Int {
    let mut norm_sq = Int::zero();
    for c in f.coeffs() {
        norm_sq += c * c;
    }
    let norm = super::isqrt(&norm_sq) + 1;
    let n = f.degree().unwrap();
    let mut two_n = Int::one();
    for _ in 0..n {
        two_n *= int(2);
    }
    two_n * norm * f.leading().unwrap().abs()
}

// ---------------------------------------------------------------------------
// Polynomials over F_p, coefficients as u64 in [0, p), lowest degree first,
// trailing zeros trimmed. Only exercised for small p, products go through
// u128 so nothing overflows.
// ---------------------------------------------------------------------------

type ModPoly = Vec<u64>;

fn mod_trim(mut a: ModPoly) -> ModPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn to_mod(f: &IntPoly, p: u64) -> ModPoly {
    let pi = int(p as i64);
    mod_trim(
        f.coeffs()
            .iter()
            .map(|c| c.mod_floor(&pi).to_u64().expect("residue fits u64"))
            .collect(),
    )
}

fn mod_mul_scalar(a: &ModPoly, s: u64, p: u64) -> ModPoly {
    mod_trim(a.iter().map(|&c| ((c as u128 * s as u128) % p as u128) as u64).collect())
}

fn mod_sub(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = (x + p - y) % p;
    }
    mod_trim(out)
}

fn mod_mul(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    mod_trim(out)
}

fn mod_inv_scalar(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a nonzero mod p.
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = ((result as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        e >>= 1;
    }
    result
}

fn mod_make_monic(a: &ModPoly, p: u64) -> ModPoly {
    match a.last() {
        None => vec![],
        Some(&1) => a.clone(),
        Some(&lc) => mod_mul_scalar(a, mod_inv_scalar(lc, p), p),
    }
}

fn mod_divrem(a: &ModPoly, b: &ModPoly, p: u64) -> (ModPoly, ModPoly) {
    assert!(!b.is_empty(), "mod division by zero");
    if a.len() < b.len() {
        return (vec![], a.clone());
    }
    let binv = mod_inv_scalar(*b.last().unwrap(), p);
    let mut rem = a.clone();
    let mut q = vec![0u64; a.len() - b.len() + 1];
    for k in (0..q.len()).rev() {
        let idx = k + b.len() - 1;
        let lead = if idx < rem.len() { rem[idx] } else { 0 };
        if lead == 0 {
            continue;
        }
        let c = ((lead as u128 * binv as u128) % p as u128) as u64;
        q[k] = c;
        for (j, &bc) in b.iter().enumerate() {
            let sub = (c as u128 * bc as u128 % p as u128) as u64;
            let pos = k + j;
            if pos < rem.len() {
                rem[pos] = (rem[pos] + p - sub) % p;
            }
        }
    }
    (mod_trim(q), mod_trim(rem))
}

fn mod_gcd(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_empty() {
        let r = mod_divrem(&x, &y, p).1;
        x = y;
        y = r;
    }
    mod_make_monic(&x, p)
}

fn mod_derivative(a: &ModPoly, p: u64) -> ModPoly {
    if a.len() <= 1 {
        return vec![];
    }
    let mut out = Vec::with_capacity(a.len() - 1);
    for (i, &c) in a.iter().enumerate().skip(1) {
        out.push((c as u128 * (i as u64 % p) as u128 % p as u128) as u64);
    }
    mod_trim(out)
}

/// x^e mod f over F_p.
fn mod_x_pow_mod(e: u64, f: &ModPoly, p: u64) -> ModPoly {
    let mut result = vec![1u64];
    let mut base = mod_divrem(&vec![0, 1], f, p).1;
    let mut k = e;
    while k > 0 {
        if k & 1 == 1 {
            result = mod_divrem(&mod_mul(&result, &base, p), f, p).1;
        }
        base = mod_divrem(&mod_mul(&base, &base, p), f, p).1;
        k >>= 1;
    }
    result
}

/// Berlekamp factorization of a squarefree polynomial mod p. Input need not
/// be monic; output is the sorted list of monic irreducible factors.
fn berlekamp(f_in: &ModPoly, p: u64) -> Vec<ModPoly> {
    let f = mod_make_monic(f_in, p);
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f];
    }
    // Matrix of the Frobenius in the basis 1, x, ..., x^{n-1}: row i holds
    // x^{ip} mod f. The Berlekamp subalgebra is the row kernel of (Q - I).
    let xp = mod_x_pow_mod(p, &f, p);
    let mut row = vec![1u64];
    let mut q_minus_i = vec![vec![0u64; n]; n];
    for i in 0..n {
        for (j, &c) in row.iter().enumerate() {
            q_minus_i[i][j] = c;
        }
        q_minus_i[i][i] = (q_minus_i[i][i] + p - 1) % p;
        if i + 1 < n {
            row = mod_divrem(&mod_mul(&row, &xp, p), &f, p).1;
        }
    }
    let basis = left_kernel_gfp(&q_minus_i, p);
    let r = basis.len();
    debug_assert!(r >= 1);

    let mut factors: Vec<ModPoly> = vec![f.clone()];
    'outer: for h in &basis {
        let hp = mod_trim(h.clone());
        if hp.len() <= 1 {
            continue; // constant vector, splits nothing
        }
        for c in 0..p {
            if factors.len() == r {
                break 'outer;
            }
            let shifted = mod_sub(&hp, &vec![c], p);
            let mut next: Vec<ModPoly> = Vec::new();
            for u in &factors {
                if u.len() <= 2 {
                    next.push(u.clone());
                    continue;
                }
                let g = mod_gcd(u, &shifted, p);
                if g.len() > 1 && g.len() < u.len() {
                    let (q, rem) = mod_divrem(u, &g, p);
                    debug_assert!(rem.is_empty());
                    next.push(g);
                    next.push(mod_make_monic(&q, p));
                } else {
                    next.push(u.clone());
                }
            }
            factors = next;
        }
    }
    factors.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    factors
}

/// Basis of the left kernel {h : h M = 0} over F_p.
fn left_kernel_gfp(m: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = m.len();
    // Solve M^T x = 0 by RREF on M^T; free columns index basis vectors.
    let mut a = vec![vec![0u64; n]; n];
    for i in 0..n {
        for j in 0..n {
            a[j][i] = m[i][j];
        }
    }
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut row = 0;
    for col in 0..n {
        let Some(pr) = (row..n).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(pr, row);
        let inv = mod_inv_scalar(a[row][col], p);
        for j in 0..n {
            a[row][j] = (a[row][j] as u128 * inv as u128 % p as u128) as u64;
        }
        for r in 0..n {
            if r != row && a[r][col] != 0 {
                let factor = a[r][col];
                for j in 0..n {
                    let sub = (factor as u128 * a[row][j] as u128 % p as u128) as u64;
                    a[r][j] = (a[r][j] + p - sub) % p;
                }
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
        if row == n {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..n {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![0u64; n];
        v[free] = 1;
        for col in 0..n {
            if let Some(pr) = pivot_of_col[col] {
                // x_col = -a[pr][free] * x_free
                v[col] = (p - a[pr][free]) % p;
            }
        }
        basis.push(v);
    }
    basis
}

// ---------------------------------------------------------------------------
// Hensel lifting with big-integer coefficients mod p^k.
// ---------------------------------------------------------------------------

/// Polynomial with coefficients reduced into [0, m).
fn polym_reduce(a: &[Int], m: &Int) -> Vec<Int> {
    let mut out: Vec<Int> = a.iter().map(|c| c.mod_floor(m)).collect();
    while out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    out
}

fn polym_mul(a: &[Int], b: &[Int], m: &Int) -> Vec<Int> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Int::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    polym_reduce(&out, m)
}

fn polym_add(a: &[Int], b: &[Int], m: &Int) -> Vec<Int> {
    let n = a.len().max(b.len());
    let mut out = vec![Int::zero(); n];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).cloned().unwrap_or_else(Int::zero);
        let y = b.get(i).cloned().unwrap_or_else(Int::zero);
        *slot = x + y;
    }
    polym_reduce(&out, m)
}

fn polym_sub(a: &[Int], b: &[Int], m: &Int) -> Vec<Int> {
    let n = a.len().max(b.len());
    let mut out = vec![Int::zero(); n];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).cloned().unwrap_or_else(Int::zero);
        let y = b.get(i).cloned().unwrap_or_else(Int::zero);
        *slot = x - y;
    }
    polym_reduce(&out, m)
}

/// Division by a monic divisor, everything mod m.
fn polym_divrem_monic(a: &[Int], b: &[Int], m: &Int) -> (Vec<Int>, Vec<Int>) {
    assert!(b.last().is_some_and(|c| c.is_one()), "divisor must be monic");
    if a.len() < b.len() {
        return (vec![], a.to_vec());
    }
    let mut rem = a.to_vec();
    let mut q = vec![Int::zero(); a.len() - b.len() + 1];
    for k in (0..q.len()).rev() {
        let idx = k + b.len() - 1;
        let lead = rem.get(idx).cloned().unwrap_or_else(Int::zero).mod_floor(m);
        if lead.is_zero() {
            continue;
        }
        for (j, bc) in b.iter().enumerate() {
            let pos = k + j;
            let v = (&rem[pos] - &(&lead * bc)).mod_floor(m);
            rem[pos] = v;
        }
        q[k] = lead;
    }
    (polym_reduce(&q, m), polym_reduce(&rem, m))
}

fn modpoly_to_intvec(a: &ModPoly) -> Vec<Int> {
    a.iter().map(|&c| int(c as i64)).collect()
}

/// Extended Euclid over F_p for coprime g, h: s g + t h = 1.
fn mod_bezout(g: &ModPoly, h: &ModPoly, p: u64) -> (ModPoly, ModPoly) {
    let (mut r0, mut r1) = (g.clone(), h.clone());
    let (mut s0, mut s1) = (vec![1u64], vec![]);
    let (mut t0, mut t1) = (vec![], vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = mod_divrem(&r0, &r1, p);
        let s = mod_sub(&s0, &mod_mul(&q, &s1, p), p);
        let t = mod_sub(&t0, &mod_mul(&q, &t1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    assert_eq!(r0.len(), 1, "bezout inputs must be coprime");
    let inv = mod_inv_scalar(r0[0], p);
    (mod_mul_scalar(&s0, inv, p), mod_mul_scalar(&t0, inv, p))
}

/// Lift `fm = g*h (mod p^j)` with Bezout data to mod p^{2j} (clamped to `m`).
/// All of fm, g, h monic. Returns updated (g, h, s, t).
#[allow(clippy::type_complexity)]
fn hensel_step(
    fm: &[Int],
    g: &[Int],
    h: &[Int],
    s: &[Int],
    t: &[Int],
    m_next: &Int,
) -> (Vec<Int>, Vec<Int>, Vec<Int>, Vec<Int>) {
    let e = polym_sub(fm, &polym_mul(g, h, m_next), m_next);
    let se = polym_mul(s, &e, m_next);
    let (q, r) = polym_divrem_monic(&se, h, m_next);
    let g_new = polym_add(&polym_add(g, &polym_mul(t, &e, m_next), m_next), &polym_mul(&q, g, m_next), m_next);
    let h_new = polym_add(h, &r, m_next);
    let b = polym_sub(
        &polym_add(&polym_mul(s, &g_new, m_next), &polym_mul(t, &h_new, m_next), m_next),
        &[Int::one()],
        m_next,
    );
    let sb = polym_mul(s, &b, m_next);
    let (c2, d2) = polym_divrem_monic(&sb, &h_new, m_next);
    let s_new = polym_sub(s, &d2, m_next);
    let t_new = polym_sub(
        t,
        &polym_add(&polym_mul(t, &b, m_next), &polym_mul(&c2, &g_new, m_next), m_next),
        m_next,
    );
    (g_new, h_new, s_new, t_new)
}

/// Lift the mod-p factorization of (monicized) `f` to mod `p^k = modulus`.
/// Returns monic factors with coefficients in [0, modulus).
fn hensel_lift_tree(f: &IntPoly, modral: &[ModPoly], p: u64, k: u32, modulus: &Int) -> Vec<Vec<Int>> {
    // Make f monic mod p^k; lc is invertible because p does not divide it.
    let lc = f.leading().unwrap().clone();
    let gcd = lc.extended_gcd(modulus);
    debug_assert!(gcd.gcd.is_one());
    let lc_inv = gcd.x.mod_floor(modulus);
    let f_monic: Vec<Int> = polym_reduce(
        &f.coeffs().iter().map(|c| c * &lc_inv).collect::<Vec<_>>(),
        modulus,
    );
    lift_rec(&f_monic, modral, p, k, modulus)
}

fn lift_rec(fm: &[Int], parts: &[ModPoly], p: u64, k: u32, modulus: &Int) -> Vec<Vec<Int>> {
    if parts.len() == 1 {
        return vec![fm.to_vec()];
    }
    let half = parts.len() / 2;
    let (left, right) = parts.split_at(half);
    let mut gp: ModPoly = vec![1];
    for f in left {
        gp = mod_mul(&gp, f, p);
    }
    let mut hp: ModPoly = vec![1];
    for f in right {
        hp = mod_mul(&hp, f, p);
    }
    let (sp, tp) = mod_bezout(&gp, &hp, p);

    let mut g = modpoly_to_intvec(&gp);
    let mut h = modpoly_to_intvec(&hp);
    let mut s = modpoly_to_intvec(&sp);
    let mut t = modpoly_to_intvec(&tp);
    let mut cur = int(p as i64);
    let mut cur_k = 1u32;
    while cur_k < k {
        let next_k = (cur_k * 2).min(k);
        let mut m_next = cur.clone();
        for _ in cur_k..next_k {
            m_next = &m_next * int(p as i64);
        }
        let fm_red = polym_reduce(fm, &m_next);
        let (g2, h2, s2, t2) = hensel_step(&fm_red, &g, &h, &s, &t, &m_next);
        g = g2;
        h = h2;
        s = s2;
        t = t2;
        cur = m_next;
        cur_k = next_k;
    }
    debug_assert_eq!(&cur, modulus);
    let mut out = lift_rec(&g, left, p, k, modulus);
    out.extend(lift_rec(&h, right, p, k, modulus));
    out
}

// ---------------------------------------------------------------------------
// Recombination.
// ---------------------------------------------------------------------------

fn symmetric_residue(c: &Int, m: &Int) -> Int {
    let r = c.mod_floor(m);
    if &(&r * int(2)) > m {
        r - m
    } else {
        r
    }
}

/// Try subsets of lifted modular factors in deterministic order; each hit
/// peels a true irreducible factor off `f`.
fn recombine(f: &IntPoly, lifted: Vec<Vec<Int>>, modulus: &Int) -> Vec<IntPoly> {
    let mut out = Vec::new();
    let mut live: Vec<Vec<Int>> = lifted;
    let mut f_cur = f.clone();
    let mut size = 1usize;
    while 2 * size <= live.len() {
        let mut combo: Vec<usize> = (0..size).collect();
        let mut advanced = false;
        loop {
            // Candidate from this index subset.
            let lc = f_cur.leading().unwrap().clone();
            let mut prod: Vec<Int> = vec![lc.mod_floor(modulus)];
            for &i in &combo {
                prod = polym_mul(&prod, &live[i], modulus);
            }
            let cand_coeffs: Vec<Int> = prod.iter().map(|c| symmetric_residue(c, modulus)).collect();
            let cand = IntPoly::new(cand_coeffs).primitive_part();
            if !cand.is_zero() && cand.degree().is_some_and(|d| d >= 1) {
                if let Some(q) = f_cur.div_exact(&cand) {
                    out.push(cand);
                    f_cur = q;
                    let mut keep = Vec::new();
                    for (i, g) in live.into_iter().enumerate() {
                        if !combo.contains(&i) {
                            keep.push(g);
                        }
                    }
                    live = keep;
                    advanced = true;
                    break;
                }
            }
            // Next lexicographic combination of `size` indices out of live.len().
            let n = live.len();
            let mut i = size;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if combo[i] != i + n - size {
                    combo[i] += 1;
                    for j in i + 1..size {
                        combo[j] = combo[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    combo.clear();
                    break;
                }
            }
            if combo.is_empty() {
                break;
            }
        }
        if !advanced {
            size += 1;
        }
    }
    if f_cur.degree().is_some_and(|d| d >= 1) {
        let mut g = f_cur.primitive_part();
        if g.leading().unwrap().is_negative() {
            g = g.neg();
        }
        out.push(g);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fac_strings(f: &IntPoly) -> Vec<(Vec<i64>, u32)> {
        factor_int_poly(f)
            .unwrap()
            .factors
            .iter()
            .map(|(g, m)| {
                (
                    g.coeffs().iter().map(|c| c.to_i64().unwrap()).collect(),
                    *m,
                )
            })
            .collect()
    }

    #[test]
    fn quartic_splits_into_linear_and_quadratic() {
        // x^4 - 1 = (x-1)(x+1)(x^2+1)
        let f = IntPoly::from_i64(&[-1, 0, 0, 0, 1]);
        assert_eq!(
            fac_strings(&f),
            alloc::vec![
                (alloc::vec![-1, 1], 1),
                (alloc::vec![1, 1], 1),
                (alloc::vec![1, 0, 1], 1)
            ]
        );
    }

    #[test]
    fn irreducible_quadratic_stays_whole() {
        // 2x^2 - x - 2 has irrational roots.
        let f = IntPoly::from_i64(&[-2, -1, 2]);
        let fac = factor_int_poly(&f).unwrap();
        assert_eq!(fac.content, int(1));
        assert_eq!(fac.factors.len(), 1);
        assert_eq!(fac.factors[0], (f, 1));
    }

    #[test]
    fn split_quadratic_with_order() {
        // x^2 - 3x + 2 = (x-1)(x-2); lex order puts (x-2) first.
        let f = IntPoly::from_i64(&[2, -3, 1]);
        assert_eq!(
            fac_strings(&f),
            alloc::vec![(alloc::vec![-2, 1], 1), (alloc::vec![-1, 1], 1)]
        );
    }

    #[test]
    fn multiplicities_and_content() {
        // -12 (x-1)^2 (x^2+x+1)
        let xm1 = IntPoly::from_i64(&[-1, 1]);
        let quad = IntPoly::from_i64(&[1, 1, 1]);
        let f = xm1.mul(&xm1).mul(&quad).scale(&int(-12));
        let fac = factor_int_poly(&f).unwrap();
        assert_eq!(fac.content, int(-12));
        assert_eq!(
            fac.factors,
            alloc::vec![(xm1, 2), (quad, 1)]
        );
        assert_eq!(fac.expand(), f);
    }

    #[test]
    fn power_of_x_is_pulled_out() {
        let f = IntPoly::from_i64(&[0, 0, 0, 2, 2]); // 2x^3(x+1)
        let fac = factor_int_poly(&f).unwrap();
        assert_eq!(fac.content, int(2));
        assert_eq!(
            fac.factors,
            alloc::vec![
                (IntPoly::from_i64(&[0, 1]), 3),
                (IntPoly::from_i64(&[1, 1]), 1)
            ]
        );
    }

    #[test]
    fn degree_cap_is_reported() {
        let mut coeffs = alloc::vec![0i64; 26];
        coeffs[0] = 1;
        coeffs[25] = 1;
        let f = IntPoly::from_i64(&coeffs);
        assert!(matches!(
            factor_int_poly(&f),
            Err(ArithError::DegreeCap { degree: 25, cap: FACTOR_DEGREE_CAP })
        ));
    }

    #[test]
    fn cyclotomic_like_products_reconstruct() {
        // (x^2+1)(x^2+x+1)(x-3) exercises recombination with three factors.
        let a = IntPoly::from_i64(&[1, 0, 1]);
        let b = IntPoly::from_i64(&[1, 1, 1]);
        let c = IntPoly::from_i64(&[-3, 1]);
        let f = a.mul(&b).mul(&c);
        let fac = factor_int_poly(&f).unwrap();
        assert_eq!(fac.expand(), f);
        assert_eq!(fac.factors.len(), 3);
    }

    /// Kronecker-style brute force for small degrees, used as a second route.
    fn has_linear_factor(f: &IntPoly) -> bool {
        // Rational root theorem scan.
        let a0 = f.coeff(0);
        let an = f.leading().unwrap().clone();
        if a0.is_zero() {
            return true;
        }
        let bound = 60i64;
        for p in -bound..=bound {
            if p == 0 || !(&a0 % int(p)).is_zero() {
                continue;
            }
            for q in 1..=bound {
                if !(&an % int(q)).is_zero() {
                    continue;
                }
                // root p/q: evaluate q^n f(p/q)
                let r = crate::arith::Rat::new(int(p), int(q));
                if f.to_rat().eval(&r).is_zero() {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn linear_factors_agree_with_root_scan() {
        let cases = [
            IntPoly::from_i64(&[2, -3, 1]),
            IntPoly::from_i64(&[-2, -1, 2]),
            IntPoly::from_i64(&[6, 5, 1]),
            IntPoly::from_i64(&[1, 0, 0, 1]),
            IntPoly::from_i64(&[-1, 0, 0, 2]),
        ];
        for f in &cases {
            let fac = factor_int_poly(f).unwrap();
            let found_linear = fac.factors.iter().any(|(g, _)| g.degree() == Some(1));
            assert_eq!(found_linear, has_linear_factor(f), "poly {:?}", f);
        }
    }

    #[test]
    fn monic_integral_part_examples() {
        use crate::arith::rat;
        // x^2 - x/2 - 1 -> 1
        let q = RatPoly::new(alloc::vec![rat(-1, 1), rat(-1, 2), rat(1, 1)]);
        assert!(monic_integral_part(&q).unwrap().is_one());
        // (x-2)(x-1/2) -> x-2
        let q = RatPoly::linear_minus(rat(2, 1)).mul(&RatPoly::linear_minus(rat(1, 2)));
        assert_eq!(
            monic_integral_part(&q).unwrap(),
            RatPoly::linear_minus(rat(2, 1))
        );
        // (x-1)^3 stays whole
        let l = RatPoly::linear_minus(rat(1, 1));
        let q = l.mul(&l).mul(&l);
        assert_eq!(monic_integral_part(&q).unwrap(), q);
    }
}
