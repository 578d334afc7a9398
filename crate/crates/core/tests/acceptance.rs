//! Acceptance suite: runs every criterion, prints one line each, then fails
//! if any criterion failed.

use std::panic::{catch_unwind, AssertUnwindSafe};

use nekrasov_core::algebra::{a_var, expand_eps_series, Exp, ExpPoly, LinearMap, Monomial, RatFrac, Q};
use nekrasov_core::blowup::{h1_line_bundle_character, l_factor_char, zhat_inst, BlowupParams, TauConvention};
use nekrasov_core::identities::{
    check_blowup_eq, check_sym, check_vanish_k, check_vanish_t, default_directions, extract_up, f0_tau_derivative,
    newton_check, solve_recursive,
};
use nekrasov_core::instanton::{tangent_char_adhm, tangent_char_armleg, z_inst, InsertionSpec};
use nekrasov_core::partitions::enumerate_tuples;
use nekrasov_core::wallcross::example_blowup_coeff;
use nekrasov_core::InsVar;

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn coeff_sum(p: &ExpPoly) -> Q {
    p.terms().iter().fold(Q::ZERO, |acc, (_, c)| acc.add(c))
}

fn c01_tangent_oracle() -> Outcome {
    for r in 1..=3 {
        for n in 0..=5 {
            for t in enumerate_tuples(r, n) {
                let armleg = tangent_char_armleg(&t);
                let adhm = tangent_char_adhm(&t).map_err(|e| e.to_string())?;
                ensure(armleg == adhm, || format!("characters differ at {t}"))?;
                let count = coeff_sum(&armleg);
                ensure(count == Q::int(2 * r as i64 * n as i64), || format!("{t}: {count} terms"))?;
            }
        }
    }
    Ok(())
}

fn c02_rank_one_blowup() -> Outcome {
    let spec = InsertionSpec::plain(1, 0);
    let z = z_inst(&spec, 6).map_err(|e| e.to_string())?;
    let zhat = zhat_inst(&BlowupParams { spec, k: 0, d: 0, order: 6, convention: TauConvention::Scalar })
        .map_err(|e| e.to_string())?;
    for n in 0..=6 {
        let (a, b) = (z.coeff(n), zhat.coeff(n));
        ensure(a.num().mul(&b.denominator()) == b.num().mul(&a.denominator()), || format!("Λ^{n} differs"))?;
    }
    Ok(())
}

fn criterion_three_reports() -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for l in 0..=2 {
        for d in 0..=2 {
            let rep = check_blowup_eq(2, l, d, 8).map_err(|e| e.to_string())?;
            if !rep.holds() {
                return Err(format!("l = {l}, d = {d} fails\n{}", rep.table()));
            }
            out.push(rep.machine());
        }
    }
    Ok(out)
}

fn c03_blowup_equation() -> Outcome {
    criterion_three_reports().map(|_| ())
}

/// Closed form of `H^1(O(mC))` on the blown-up plane, as characters of functions.
fn h1_closed_form(m: i64) -> ExpPoly {
    let mut terms = Vec::new();
    if m >= 2 {
        for i in 1..m {
            for j in 1..=(m - i) {
                terms.push((Exp::eps(-i as i32, -j as i32), Q::ONE));
            }
        }
    }
    if m <= -1 {
        for i in 0..-m {
            for j in 0..(-m - i) {
                terms.push((Exp::eps(i as i32, j as i32), Q::ONE));
            }
        }
    }
    ExpPoly::from_terms(terms)
}

fn c04_line_bundle_rank() -> Outcome {
    for r in 1..=3usize {
        let mut k = vec![-3i64; r];
        loop {
            let s: i64 = k.iter().sum();
            let want = r as i64 * k.iter().map(|x| x * x).sum::<i64>() - s * s;
            let got = coeff_sum(&l_factor_char(&k));
            ensure(got == Q::int(want), || format!("k = {k:?}: rank {got}, expected {want}"))?;
            let mut i = 0;
            while i < r && k[i] == 3 {
                k[i] = -3;
                i += 1;
            }
            if i == r {
                break;
            }
            k[i] += 1;
        }
    }
    for m in -6..=6 {
        ensure(h1_line_bundle_character(m) == h1_closed_form(m), || format!("H^1(O({m}C)) differs"))?;
    }
    Ok(())
}

fn c05_vanishing_with_insertions() -> Outcome {
    for (p, d) in [(1, 0), (1, 1), (-1, 1), (-1, 2), (2, 0)] {
        let rep = check_vanish_t(2, 0, d, p, 8, TauConvention::Scalar).map_err(|e| e.to_string())?;
        ensure(rep.holds(), || format!("(p, d) = ({p}, {d})\n{}", rep.table()))?;
    }
    Ok(())
}

/// Sign of `k` asserted to vanish for `r = 2, l = 0, d = 1`.
const FROZEN_SIGN: i64 = -1;

fn c06_k_vanishing() -> Outcome {
    let vanishes = |k: i64| -> Result<bool, String> {
        let zhat = nekrasov_core::identities::zhat_k(2, 0, 1, k, 8).map_err(|e| e.to_string())?;
        let rep = check_vanish_k(2, 0, 1, k, 8).map_err(|e| e.to_string())?;
        Ok(zhat.iter().all(|(_, c)| c.is_zero()) && rep.holds())
    };
    let (frozen, other) = (vanishes(FROZEN_SIGN)?, vanishes(-FROZEN_SIGN)?);
    ensure(frozen, || format!("k = {FROZEN_SIGN} does not vanish"))?;
    ensure(!other, || format!("both k = {FROZEN_SIGN} and k = {} vanish identically through Λ^8", -FROZEN_SIGN))
}

fn c07_symmetry() -> Outcome {
    for (r, l) in [(1, 0), (2, 0), (2, 1)] {
        let rep = check_sym(r, l, 8).map_err(|e| e.to_string())?;
        ensure(rep.holds(), || format!("(r, l) = ({r}, {l})\n{}", rep.table()))?;
    }
    Ok(())
}

fn c08_recursion_solver() -> Outcome {
    let direct = z_inst(&InsertionSpec::plain(2, 0), 8).map_err(|e| e.to_string())?;
    let solved = solve_recursive(2, 0, &[0, 1], 8).map_err(|e| format!("pair (0, 1): {e}"))?;
    for n in [4, 8] {
        ensure(solved.coeff(n).equals(&direct.coeff(n)), || format!("pair (0, 1) differs at Λ^{n}"))?;
    }
    let other = solve_recursive(2, 0, &[0, 2], 8).map_err(|e| format!("pair (0, 2): {e}"))?;
    for n in [4, 8] {
        ensure(other.coeff(n).equals(&solved.coeff(n)), || format!("pair (0, 2) differs at Λ^{n}"))?;
    }
    Ok(())
}

fn c09_regularity() -> Outcome {
    let dirs = default_directions();
    for p in [1, -1] {
        let z = z_inst(&InsertionSpec::with_taus(2, 0, vec![p], 1), 4).map_err(|e| e.to_string())?;
        // [Z_τ / Z_0] at Λ^4 with Z_0 = 1 + O(Λ^4) and Z_τ = P + O(Λ^4).
        let tau = Monomial::var(InsVar::Tau(p));
        let (z0, zt) = (z.grade(&Monomial::one()), z.grade(&tau));
        let x = zt.coeff(4).sub(&zt.coeff(0).mul(&z0.coeff(4)));
        let mut first: Option<RatFrac> = None;
        for c in &dirs {
            let s = expand_eps_series(&x, c, 0).map_err(|e| e.to_string())?;
            let v = s.valuation().unwrap_or(0);
            ensure(v >= -2, || format!("p = {p}, c = {c}: pole of order {} after ε1ε2", -2 - v))?;
            let lim = s.coeff(-2).map_err(|e| e.to_string())?.scale(c);
            match &first {
                None => first = Some(lim),
                Some(f) => ensure(f.equals(&lim), || format!("p = {p}: direction {c} disagrees"))?,
            }
        }
        let lib = f0_tau_derivative(2, 0, p, 4, &dirs).map_err(|e| e.to_string())?;
        let lib4 = lib.iter().find(|(n, _)| *n == 4).map(|(_, v)| v.clone()).ok_or("no Λ^4 entry")?;
        ensure(lib4.equals(first.as_ref().unwrap()), || format!("p = {p}: library limit differs"))?;
    }
    Ok(())
}

fn c10_constant_term() -> Outcome {
    for r in 1..=3usize {
        for p in [-2, -1, 1, 2] {
            let v = f0_tau_derivative(r, 0, p, 0, &default_directions()).map_err(|e| e.to_string())?;
            let want: Vec<(Exp, Q)> =
                (0..r).map(|a| (Exp::from_rationals(&[(a_var(a), Q::int(p as i64))]).unwrap(), Q::ONE)).collect();
            let want = RatFrac::from_poly(ExpPoly::from_terms(want));
            ensure(v[0].0 == 0 && v[0].1.equals(&want), || format!("r = {r}, p = {p}: got {}", v[0].1))?;
        }
    }
    Ok(())
}

fn elementary(r: usize, p: usize) -> ExpPoly {
    let mut terms = Vec::new();
    for mask in 0u32..(1 << r) {
        if mask.count_ones() as usize == p {
            let coords: Vec<(usize, Q)> = (0..r).filter(|a| mask & (1 << a) != 0).map(|a| (a_var(a), Q::ONE)).collect();
            terms.push((Exp::from_rationals(&coords).unwrap(), Q::ONE));
        }
    }
    ExpPoly::from_terms(terms)
}

fn c11_sw_coefficients() -> Outcome {
    let dirs = default_directions();
    for r in [2usize, 3] {
        for p in 1..r as u32 {
            let v = extract_up(r, 0, p, 0, &dirs).map_err(|e| e.to_string())?;
            let sign = if p % 2 == 0 { Q::ONE } else { Q::int(-1) };
            let mut want = RatFrac::from_poly(elementary(r, p as usize)).scale(&sign);
            let mut got = v[0].1.clone();
            if 2 * p >= r as u32 {
                let t = LinearMap::traceless(r);
                want = want.substitute(&t).map_err(|e| e.to_string())?;
                got = got.substitute(&t).map_err(|e| e.to_string())?;
            }
            ensure(got.equals(&want), || format!("r = {r}, p = {p}: got {got}"))?;
        }
    }
    let rep = newton_check(2, 0, &dirs).map_err(|e| e.to_string())?;
    ensure(rep.holds(), || rep.table())
}

fn binomial(n: i64, k: i64) -> Q {
    (0..k).fold(Q::ONE, |acc, i| acc.mul(&Q::frac(n - i, i + 1)))
}

fn c12_wallcross_example() -> Outcome {
    let v = example_blowup_coeff(2, 0).map_err(|e| e.to_string())?;
    ensure(v == Q::int(-2), || format!("(2, 0) gave {v}"))?;
    for r in 1..=4u32 {
        for nf in 0..2 * r {
            let v = example_blowup_coeff(r, nf).map_err(|e| e.to_string())?;
            let want = binomial(2 * r as i64 - nf as i64 - 2, r as i64 - 1).neg();
            ensure(v == want, || format!("(r, N_f) = ({r}, {nf}): {v} vs {want}"))?;
        }
    }
    Ok(())
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn c13_determinism() -> Outcome {
    let many = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(4).max(4);
    let a = in_pool(1, criterion_three_reports)?;
    let b = in_pool(many, criterion_three_reports)?;
    ensure(a.concat().as_bytes() == b.concat().as_bytes(), || format!("output differs between 1 and {many} threads"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("tangent characters agree", c01_tangent_oracle),
        ("rank-1 blow-up identity", c02_rank_one_blowup),
        ("blow-up equation, r = 2", c03_blowup_equation),
        ("line-bundle character rank", c04_line_bundle_rank),
        ("vanishing with insertions", c05_vanishing_with_insertions),
        ("k != 0 vanishing, one sign", c06_k_vanishing),
        ("ε1 <-> ε2 symmetry", c07_symmetry),
        ("recursion solver", c08_recursion_solver),
        ("regularity of the τ derivative", c09_regularity),
        ("constant term of ∂F0/∂τ_p", c10_constant_term),
        ("Seiberg-Witten coefficients", c11_sw_coefficients),
        ("wall-crossing example", c12_wallcross_example),
        ("determinism across thread counts", c13_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = std::time::Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match &res {
            Ok(()) => println!("criterion {:>2} PASS  {name} ({secs:.2}s)", i + 1),
            Err(msg) => {
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {}", i + 1, msg.lines().next().unwrap_or(""));
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
