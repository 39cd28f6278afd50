//! Assertion lists behind `example <name> --verify`. Each list reruns the
//! pinned facts for one registered example and reports them as verdicts,
//! so a failing entry points at the exact claim that broke.

use vend_core::arith::{int, Int, Rat};
use vend_core::lattice::{IndexResult, Lattice};
use vend_core::nilgroup::{center_of_subgroup, sg_member, AffineElement, SubgroupDesc};
use vend_core::selfsim::{cycle_lengths, perm_order, AutExpr, Engine, EqualOutcome, StateSet};
use vend_core::vend::{
    bounds_report, center_restriction, derived_chain, f_eval, finite_state_predict, image_data,
    make_example, prop3_data, simplicity_decide, strong_simplicity, thm13_check, triple_validate,
    AtomSpec, CheckStatus, CoreChain, PredictOutcome, RegistryObject, StrongBounds, StrongOutcome,
    Triple, TripleVerdict,
};

use crate::report::{verdict_with, Verdict, Witness};

pub struct Outcome {
    pub verdicts: Vec<Verdict>,
    pub witnesses: Vec<Witness>,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome { verdicts: Vec::new(), witnesses: Vec::new() }
    }

    fn check(&mut self, label: impl Into<String>, ok: bool, got: impl Into<String>) {
        self.verdicts.push(verdict_with(label, ok, got));
    }

    pub fn all_ok(&self) -> bool {
        self.verdicts.iter().all(|v| v.ok)
    }
}

fn tr(v: &[i64]) -> AffineElement {
    AffineElement::translation(v.iter().map(|&c| int(c)).collect())
}

fn as_triple(obj: RegistryObject) -> Result<Triple, String> {
    match obj {
        RegistryObject::Triple(t) => Ok(t),
        _ => Err("this example is an atom table".to_string()),
    }
}

fn as_atoms(obj: RegistryObject) -> Result<AtomSpec, String> {
    match obj {
        RegistryObject::Atoms(s) | RegistryObject::Templates(s) => Ok(s),
        _ => Err("this example is a triple".to_string()),
    }
}

pub fn verify_example(
    name: &str,
    n: Option<i64>,
    p: Option<i64>,
    steps: Option<usize>,
) -> Result<Outcome, String> {
    let obj = make_example(name, n, p).map_err(|e| format!("{e}"))?;
    match name {
        "adding-machine" => adding_machine(as_triple(obj)?),
        "example1" => example1(as_triple(obj)?, steps.unwrap_or(12)),
        "heisenberg-intro" => heisenberg_intro(as_triple(obj)?),
        "power-f22" => power_f22(as_triple(obj)?, n.unwrap_or(2)),
        "example2" => example2(as_triple(obj)?, n.unwrap_or(3)),
        "example33" => example33(as_triple(obj)?),
        "example4" => example4(as_triple(obj)?),
        "example5" => example5(as_triple(obj)?),
        "sec54" => sec54(as_triple(obj)?, n.unwrap_or(3) as usize),
        "sec21-atoms" => sec21_atoms(as_atoms(obj)?),
        "eight-templates" => eight_templates(as_atoms(obj)?),
        other => Err(format!("unknown example name '{other}'")),
    }
}

fn adding_machine(t: Triple) -> Result<Outcome, String> {
    let mut out = Outcome::new();
    out.check("degree is 2", t.m == int(2), format!("m = {}", t.m));
    let mut eng = Engine::for_triple(t).map_err(|e| format!("{e}"))?;
    let a = AutExpr::elem(tr(&[1]));
    let (children, perm) = eng.decompose(&a).map_err(|e| format!("{e}"))?;
    out.check(
        "decomposition is (e, a) with the swap",
        children[0] == AutExpr::Identity && children[1] == a && perm == vec![1, 0],
        format!("children = ({}, {}), perm = {perm:?}", children[0], children[1]),
    );
    let mut single = true;
    for d in 1..=12usize {
        let perm = eng.level_perm(&a, d).map_err(|e| format!("{e}"))?;
        single &= cycle_lengths(&perm) == vec![1usize << d];
    }
    out.check("level-d action is a single 2^d-cycle for d <= 12", single, "cycle lengths");
    let p8 = eng.level_perm(&a, 8).map_err(|e| format!("{e}"))?;
    let ord = perm_order(&p8);
    out.check(format!("order of level-8 action = {ord}"), ord == int(256), "expect 256");
    for k in (1..=8i64).flat_map(|k| [k, -k]) {
        let v = eng.is_trivial(&AutExpr::elem(tr(&[k])), 4096).map_err(|e| format!("{e}"))?;
        out.check(
            format!("translation by {k} acts nontrivially"),
            matches!(v, EqualOutcome::NotEqual(_)),
            format!("{v:?}"),
        );
    }
    Ok(out)
}

fn modinv(a: i64, m: i64) -> i64 {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (m, a.rem_euclid(m));
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    t.rem_euclid(m)
}

fn example1(t: Triple, steps: usize) -> Result<Outcome, String> {
    let mut out = Outcome::new();
    let steps = steps.clamp(2, 30);
    let rep = derived_chain(&t, steps).map_err(|e| format!("{e}"))?;
    out.check(
        format!("chain has {steps} steps"),
        rep.steps.len() == steps && rep.truncated.is_none(),
        format!("got {}", rep.steps.len()),
    );
    let mut r: Vec<i64> = vec![0, 1, 1];
    for i in 3..=steps {
        let md = 1i64 << (i - 2);
        r.push(1 + 4 * modinv(r[i - 1], md));
    }
    for (i, step) in rep.steps.iter().enumerate() {
        let i = i + 1;
        let want = IndexResult::Finite(int(1i64 << i));
        let lat = Lattice::from_i64_rows(2, &[&[1i64 << (i - 1), 0], &[r[i], 2]]);
        out.check(
            format!("index of G({i}) is 2^{i} with the r_{i} basis"),
            step.index == want && step.g_i.w() == &lat,
            format!("index = {}, r_{i} = {}", fmt_index(&step.index), r[i]),
        );
    }
    let mut eng = Engine::for_triple(t.clone()).map_err(|e| format!("{e}"))?;
    let st = eng.states(&AutExpr::elem(tr(&[1, 0])), 200).map_err(|e| format!("{e}"))?;
    out.check(
        "state set of the first generator exceeds 200",
        matches!(st, StateSet::Exceeded(_)),
        match &st {
            StateSet::Finite(v) => format!("finite with {}", v.len()),
            StateSet::Exceeded(_) => "exceeded".to_string(),
        },
    );
    let pr = finite_state_predict(&t).map_err(|e| format!("{e}"))?;
    out.check(
        "spectral prediction is NotPredicted",
        pr.outcome == PredictOutcome::NotPredicted,
        format!("{:?}", pr.outcome),
    );
    Ok(out)
}

struct Xorshift(u64);

impl Xorshift {
    fn pick(&mut self, lo: i64, hi: i64) -> i64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        lo + (x % ((hi - lo + 1) as u64)) as i64
    }
}

fn heisenberg_intro(t: Triple) -> Result<Outcome, String> {
    let mut out = Outcome::new();
    let vr = triple_validate(&t.group, &t.h, &t.f, Some(&t.transversal));
    out.check("triple is valid", vr.passed(), format!("m = {:?}", vr.m));
    out.check("degree is 4", t.m == int(4), format!("m = {}", t.m));
    let d = image_data(&t).map_err(|e| format!("{e}"))?;
    out.check("f is injective", d.injective, format!("injective = {}", d.injective));
    let status = simplicity_decide(&t).map_err(|e| format!("{e}"))?.status;
    out.check("triple is simple", status == TripleVerdict::Simple, format!("{status:?}"));
    let so = strong_simplicity(&t, &StrongBounds::default()).map_err(|e| format!("{e}"))?;
    out.check(
        "no strong-simplicity witness up to the default bound",
        matches!(so, StrongOutcome::NoWitnessUpTo { .. }),
        format!("{so:?}"),
    );
    let mut eng = Engine::for_triple(t.clone()).map_err(|e| format!("{e}"))?;
    let mut rng = Xorshift(0x2545f4914f6cdd1d);
    let mut hom_ok = true;
    for _ in 0..100 {
        let g = AffineElement::new(
            int(rng.pick(-2, 2)),
            vec![int(rng.pick(-3, 3)), int(rng.pick(-3, 3))],
        );
        let h = AffineElement::new(
            int(rng.pick(-2, 2)),
            vec![int(rng.pick(-3, 3)), int(rng.pick(-3, 3))],
        );
        let gh = t.group.mul(&g, &h);
        let prod = AutExpr::Prod(vec![AutExpr::elem(g), AutExpr::elem(h)]);
        let pa = eng.portrait(&prod, 5).map_err(|e| format!("{e}"))?;
        let pb = eng.portrait(&AutExpr::elem(gh), 5).map_err(|e| format!("{e}"))?;
        hom_ok &= pa == pb;
    }
    out.check("product portraits agree on 100 random pairs", hom_ok, "depth 5");
    Ok(out)
}

fn power_f22(t: Triple, n: i64) -> Result<Outcome, String> {
    let mut out = Outcome::new();
    let d = image_data(&t).map_err(|e| format!("{e}"))?;
    out.check("f is onto (m' = 1)", d.recurrent, format!("m' = {}", fmt_index(&d.m_prime)));
    let status = simplicity_decide(&t).map_err(|e| format!("{e}"))?.status;
    out.check("triple is simple", status == TripleVerdict::Simple, format!("{status:?}"));
    let b = bounds_report(&t).map_err(|e| format!("{e}"))?;
    let nn = IndexResult::Finite(int(n * n));
    match b.recurrent_data.as_ref() {
        Some(rd) => {
            out.check(
                format!("k = q = [gamma_2(G) : gamma_2(H)] = {}", n * n),
                rd.k == nn && rd.q == nn && rd.gamma_index == nn,
                format!(
                    "k = {}, q = {}, gamma index = {}",
                    fmt_index(&rd.k),
                    fmt_index(&rd.q),
                    fmt_index(&rd.gamma_index)
                ),
            );
            out.check(
                "gamma index is a k-number dividing q",
                rd.is_k_number == Some(true) && rd.divides_q == Some(true),
                format!("is_k_number = {:?}, divides_q = {:?}", rd.is_k_number, rd.divides_q),
            );
        }
        None => out.check("epimorphism index data", false, "missing"),
    }
    let z4 = Lattice::from_i64_rows(2, &[&[0, n * n * n * n]]);
    let u = SubgroupDesc::lattice_only(&t.group, z4).map_err(|e| format!("{e:?}"))?;
    let ir = thm13_check(&t, &u).map_err(|e| format!("{e}"))?;
    out.check(
        format!("divisor pair for the z^{} subgroup is ({}, 1)", n.pow(4), n * n),
        ir.pair == Some((int(n * n), int(1))),
        format!("pair = {:?}", ir.pair),
    );
    out.check(
        "the reversed-inclusion claim is flagged, not asserted",
        ir.cor3_i.is_none() && ir.cor3_ii_flag.is_some(),
        format!("flag = {:?}", ir.cor3_ii_flag),
    );
    Ok(out)
}

fn example2(t: Triple, n: i64) -> Result<Outcome, String> {
    let mut out = Outcome::new();
    let rep = prop3_data(&t).map_err(|e| format!("{e}"))?;
    out.check("conclusions are theorems here", rep.applicable, format!("{:?}", rep.note));
    let (Some(l), Some(sq)) = (rep.l.as_ref(), rep.sqrt_l.as_ref()) else {
        out.check("L and its isolator computed", false, "missing");
        return Ok(out);
    };
    out.check(
        format!("L has head exponent {n}, the isolator exponent 1"),
        l.e() == &int(n) && sq.e() == &int(1),
        format!("e(L) = {}, e(sqrt) = {}", l.e(), sq.e()),
    );
    out.check(
        "L is a proper subgroup of its isolator",
        rep.l_equals_isolator == Some(false),
        format!("{:?}", rep.l_equals_isolator),
    );
    out.check(
        "both are abelian and semi-invariant",
        rep.l_abelian == Some(true)
            && rep.sqrt_abelian == Some(true)
            && rep.l_semi_invariant == Some(true)
            && rep.sqrt_semi_invariant == Some(true),
        format!(
            "abelian = {:?}/{:?}, semi-invariant = {:?}/{:?}",
            rep.l_abelian, rep.sqrt_abelian, rep.l_semi_invariant, rep.sqrt_semi_invariant
        ),
    );
    Ok(out)
}

fn example33(t: Triple) -> Result<Outcome, String> {
    let mut out = Outcome::new();
    let rep = simplicity_decide(&t).map_err(|e| format!("{e}"))?;
    out.check(
        "triple is not simple",
        rep.status == TripleVerdict::NotSimple,
        format!("{:?}", rep.status),
    );
    let zh = center_of_subgroup(&t.group, &t.h);
    match &rep.chain {
        CoreChain::Exact(core) => {
            out.check(
                "core is exactly the z^6 lattice, which is Z(H)",
                core == &zh && core.w() == &Lattice::from_i64_rows(2, &[&[0, 6]]),
                format!("core lattice rows = {:?}", core.w().basis_rows()),
            );
        }
        CoreChain::Bounded { .. } => out.check("core chain is exact", false, "bounded only"),
    }
    let mut eng = Engine::for_triple(t).map_err(|e| format!("{e}"))?;
    let mut in_core = true;
    for k in [1i64, 2, 3, -1, -2] {
        let v = eng.is_trivial(&AutExpr::elem(tr(&[0, 6 * k])), 20_000).map_err(|e| format!("{e}"))?;
        in_core &= v == EqualOutcome::Equal;
    }
    let v1 = eng.is_trivial(&AutExpr::elem(tr(&[0, 1])), 20_000).map_err(|e| format!("{e}"))?;
    out.check(
        "powers of z^6 act trivially, z does not",
        in_core && matches!(v1, EqualOutcome::NotEqual(_)),
        format!("z: {v1:?}"),
    );
    Ok(out)
}

fn example4(t: Triple) -> Result<Outcome, String> {
    let mut out = Outcome::new();
    let cr = center_restriction(&t).map_err(|e| format!("{e}"))?;
    let r = cr.zg.rank();
    let rows: Vec<Vec<Int>> = cr
        .zh
        .basis_rows()
        .into_iter()
        .map(|row| cr.zg.coordinates(&row).expect("Z(H) lies in Z(G)"))
        .collect();
    let image = Lattice::from_rows(r, &rows).map_image(&cr.a).map_err(|e| format!("{e:?}"))?;
    out.check(
        "f restricted to Z(H) is onto Z(G)",
        image.index_in_ambient().is_one(),
        format!("image index = {}", fmt_index(&image.index_in_ambient())),
    );
    let img = f_eval(&t, &tr(&[0, 4])).map_err(|e| format!("{e}"))?;
    out.check("f(z^4) = z", img == tr(&[0, 1]), format!("got {img}"));
    let d = image_data(&t).map_err(|e| format!("{e}"))?;
    out.check(
        "f itself is not onto (m' = 4)",
        d.m_prime == IndexResult::Finite(int(4)),
        format!("m' = {}", fmt_index(&d.m_prime)),
    );
    Ok(out)
}

fn example5(t: Triple) -> Result<Outcome, String> {
    let mut out = Outcome::new();
    let status = simplicity_decide(&t).map_err(|e| format!("{e}"))?.status;
    out.check("triple is simple", status == TripleVerdict::Simple, format!("{status:?}"));
    let so = strong_simplicity(&t, &StrongBounds::default()).map_err(|e| format!("{e}"))?;
    match &so {
        StrongOutcome::WitnessFound { subgroup, certificate } => {
            let mut inv = !subgroup.is_trivial();
            for gen in subgroup.generators() {
                let img = f_eval(&t, &gen).map_err(|e| format!("{e}"))?;
                inv &= sg_member(&t.group, subgroup, &img);
            }
            out.check(
                "strong-simplicity witness is nontrivial and semi-invariant",
                inv,
                certificate.clone(),
            );
        }
        other => out.check("a strong-simplicity witness exists", false, format!("{other:?}")),
    }
    Ok(out)
}

fn fmt_rats(v: &[Rat]) -> String {
    let inner: Vec<String> = v.iter().map(|c| format!("{c}")).collect();
    format!("({})", inner.join(", "))
}

fn sec54(t: Triple, n: usize) -> Result<Outcome, String> {
    use vend_core::vend::registry::{sec54_f, sec54_theta, sec54_theta_closed, sec54_w, sec54_x};
    let mut out = Outcome::new();
    let th = sec54_theta(n);
    let closed: Vec<Rat> = (1..=n.saturating_sub(1)).map(|i| sec54_theta_closed(n, i)).collect();
    out.check(
        format!("theta_{n} = {}", fmt_rats(&th)),
        th == closed,
        format!("closed form gives {}", fmt_rats(&closed)),
    );
    let x = sec54_x(n).to_rat();
    let f = sec54_f(n);
    out.check(
        "x^2 f = f x as rational matrices",
        x.mul(&x).mul(&f) == f.mul(&x),
        "exact equality",
    );
    out.check(
        "f maps the subgroup lattice into integer vectors",
        sec54_w(n).map_image(&f).is_ok(),
        "integrality",
    );
    out.check("degree is 4", t.m == int(4), format!("m = {}", t.m));
    let b = bounds_report(&t).map_err(|e| format!("{e}"))?;
    out.check(
        format!("class {n}, derived length 2, simple"),
        b.c == n && b.s == 2 && b.simple == TripleVerdict::Simple,
        format!("c = {}, s = {}, verdict = {:?}", b.c, b.s, b.simple),
    );
    out.check(
        "derived length bound holds",
        b.thm_s_bound == CheckStatus::Holds,
        format!("{:?}", b.thm_s_bound),
    );
    if (3..=6).contains(&n) {
        out.check(
            "a strong-simplicity witness exists",
            matches!(b.strong, StrongOutcome::WitnessFound { .. }),
            format!("{:?}", b.strong),
        );
    }
    Ok(out)
}

fn comm(a: &AutExpr, b: &AutExpr) -> AutExpr {
    AutExpr::Prod(vec![a.clone().inv(), b.clone().inv(), a.clone(), b.clone()])
}

type SwapRule = (&'static str, &'static str, &'static [(&'static str, i64)]);

fn sec21_atoms(spec: AtomSpec) -> Result<Outcome, String> {
    let mut out = Outcome::new();
    let mut eng = Engine::for_atoms(&spec).map_err(|e| format!("{e}"))?;
    let rules: [SwapRule; 6] = [
        ("z", "alpha", &[]),
        ("z", "beta", &[]),
        ("z", "kappa", &[]),
        ("alpha", "kappa", &[]),
        ("alpha", "beta", &[("z", 1)]),
        ("beta", "kappa", &[("alpha", -2)]),
    ];
    for (x, y, carry) in rules {
        let carry: Vec<(String, i64)> = carry.iter().map(|(n, e)| (n.to_string(), *e)).collect();
        let ok = eng.certify_rule(x, y, &carry, 10_000).map_err(|e| format!("{e}"))?;
        out.check(format!("swap rule for ({x}, {y}) certifies"), ok, "coinductive closure");
    }
    let al = AutExpr::atom("alpha");
    let be = AutExpr::atom("beta");
    let ka = AutExpr::atom("kappa");
    let z = AutExpr::atom("z");
    let c = eng.equal(&comm(&al, &be), &z, 50_000).map_err(|e| format!("{e}"))?;
    out.check("[alpha, beta] = z", c == EqualOutcome::Equal, format!("{c:?}"));
    let am2 = AutExpr::from_word(&[("alpha".to_string(), -2)]);
    let c = eng.equal(&comm(&be, &ka), &am2, 50_000).map_err(|e| format!("{e}"))?;
    out.check("[beta, kappa] = alpha^-2", c == EqualOutcome::Equal, format!("{c:?}"));
    let mut central = true;
    for (a, b) in [(&z, &al), (&z, &be), (&z, &ka), (&al, &ka)] {
        central &=
            eng.is_trivial(&comm(a, b), 50_000).map_err(|e| format!("{e}"))? == EqualOutcome::Equal;
    }
    out.check("z is central and [alpha, kappa] = e", central, "four commutators");
    let mut free = true;
    for i in -3i64..=3 {
        for j in -3i64..=3 {
            for k in -3i64..=3 {
                if i == 0 && j == 0 && k == 0 {
                    continue;
                }
                let w = AutExpr::from_word(&[
                    ("alpha".to_string(), i),
                    ("beta".to_string(), j),
                    ("z".to_string(), k),
                ]);
                let v = eng.is_trivial(&w, 20_000).map_err(|e| format!("{e}"))?;
                free &= matches!(v, EqualOutcome::NotEqual(_));
            }
        }
    }
    out.check("small words alpha^i beta^j z^k act nontrivially", free, "exponents up to 3");
    Ok(out)
}

fn eight_templates(spec: AtomSpec) -> Result<Outcome, String> {
    let mut out = Outcome::new();
    let mut eng = Engine::for_atoms(&spec).map_err(|e| format!("{e}"))?;
    let z = AutExpr::atom("z");
    for i in 1..=8 {
        let x = AutExpr::atom(&format!("x{i}"));
        let fwd = AutExpr::Prod(vec![x.clone(), z.clone()]);
        let rev = AutExpr::Prod(vec![z.clone(), x.clone()]);
        let pa = eng.portrait(&fwd, 6).map_err(|e| format!("{e}"))?;
        let pb = eng.portrait(&rev, 6).map_err(|e| format!("{e}"))?;
        out.check(format!("x{i} commutes with z to depth 6"), pa == pb, "portrait equality");
    }
    Ok(out)
}

pub fn fmt_index(r: &IndexResult) -> String {
    match r {
        IndexResult::Finite(v) => format!("{v}"),
        IndexResult::Infinite => "infinite".to_string(),
    }
}
