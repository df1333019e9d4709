//! Acceptance run: one PASS/FAIL line per criterion with its time limit.
//!
//! Criteria listed in `KNOWN_FAILURES` are evaluated in full and reported as
//! FAIL; the run only errors when a criterion fails unexpectedly or a known
//! failure starts passing.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ck_core::bounds::{
    assembly_identities, cor_potential_good, degree_ledger, thm1_hyperelliptic, thm_integral, thm_integral_inner,
    LedgerCase,
};
use ck_core::chart::Chart;
use ck_core::coleman::{nonweierstrass_image_ledger, run_pipeline, ColemanSpec, DiskStatus};
use ck_core::diffops::{build_annihilator, is_zero_series, search_nice_s, weierstrass_annihilator, DifferentialOperator};
use ck_core::funcfield::CurveFunction;
use ck_core::hyperelliptic::{CurveModel, DiskCenter, DiskDescriptor, DiskKind, ModelKind};
use ck_core::padics::{factorial_ratio_bound, factorial_valuation, kappa};
use ck_core::rational::{q, qf};
use ck_core::series::{slope_transfer_check, zero_count_bound};
use ck_core::{Prime, TruncatedSeries, ValuationFloor, Q};

/// Criterion number and the reason it cannot pass.
const KNOWN_FAILURES: &[(usize, &str)] = &[(
    7,
    "at p = 7 the composite Weierstrass-disk operator of order 10 has a coefficient of valuation -1 \
     (a factor 7 from 8! survives); det B is a unit at every Weierstrass disk and the operator is nice at p = 11",
)];

type Check = Result<String, String>;

fn prime(n: u64) -> Prime {
    Prime::new(n).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_q(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Q {
    qf(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

fn criterion_1() -> Check {
    let two = cor_potential_good(2).map_err(|e| e.to_string())?.raw_value;
    let three = cor_potential_good(3).map_err(|e| e.to_string())?.raw_value;
    let poly = |g: i64| 24 * g.pow(3) + 228 * g * g + 120 * g + 72;
    ensure(two == q(1416) && q(poly(2)) == two, || format!("g = 2 gives {two}"))?;
    ensure(three == q(3132) && q(poly(3)) == three, || format!("g = 3 gives {three}"))?;
    Ok("1416 and 3132".into())
}

fn criterion_2() -> Check {
    for g in 2..=10i64 {
        let l = degree_ledger(g as u64, LedgerCase::General).map_err(|e| e.to_string())?;
        let image = (8 * g * g + 11 * g - 3) * (2 * g - 2) + 3 * (3 * g * g + 3 * g + 1);
        ensure(image == 16 * g.pow(3) + 15 * g * g - 19 * g + 9, || format!("image identity fails at g = {g}"))?;
        ensure(l.get("image") == Some(image), || format!("ledger image differs at g = {g}"))?;
        let total = l.get("image").unwrap() + l.get("order").unwrap();
        ensure(total == 16 * g.pow(3) + 15 * g * g - 16 * g + 10, || format!("final + order fails at g = {g}"))?;
        ensure(l.get("per_disk_total") == Some(total), || format!("per-disk total differs at g = {g}"))?;
        for check in assembly_identities(g as u64).map_err(|e| e.to_string())? {
            ensure(check.holds(), || format!("{} fails at g = {g}: {:?} vs {:?}", check.name, check.lhs, check.rhs))?;
        }
    }
    Ok("g = 2..10".into())
}

fn criterion_3() -> Check {
    const N: u64 = 2000;
    let mut pairs = 0u64;
    for p in [3u64, 5, 7, 11] {
        let pr = prime(p);
        // brute force: v(n!) as a running sum of v(k)
        let mut brute = vec![0u64; N as usize + 1];
        for k in 1..=N {
            let (mut m, mut v) = (k, 0);
            while m % p == 0 {
                m /= p;
                v += 1;
            }
            brute[k as usize] = brute[k as usize - 1] + v;
        }
        for n in 0..=N {
            ensure(factorial_valuation(n, pr) == brute[n as usize], || format!("v_{p}({n}!) differs"))?;
        }
        // v(n2!/n1!) <= log_p(n1) + (n2-n1)/(p-1), i.e. p^a <= n1^(p-1) with
        // a = (p-1) v - (n2-n1)
        for n1 in 1..=N {
            let rhs = (n1 as u128).pow(p as u32 - 1);
            for n2 in n1..=N {
                let a = (p - 1) as i64 * (brute[n2 as usize] - brute[n1 as usize]) as i64 - (n2 - n1) as i64;
                if a > 0 {
                    let lhs = (p as u128).checked_pow(a as u32);
                    ensure(lhs.is_some_and(|l| l <= rhs), || format!("inequality fails for ({n1}, {n2}) at p = {p}"))?;
                }
                pairs += 1;
            }
        }
        for n1 in (1..=N).step_by(97) {
            for n2 in (n1..=N).step_by(131) {
                let v = q((brute[n2 as usize] - brute[n1 as usize]) as i64);
                let bound = factorial_ratio_bound(n1, n2, pr).map_err(|e| e.to_string())?;
                ensure(v <= bound, || format!("certified bound below v at ({n1}, {n2}), p = {p}"))?;
            }
        }
    }
    Ok(format!("{pairs} pairs"))
}

/// Coefficients of `prod (x - r_k)`, lowest degree first.
fn poly_from_roots(roots: &[Q]) -> Vec<Q> {
    let mut c = vec![Q::one()];
    for r in roots {
        let mut next = vec![Q::zero(); c.len() + 1];
        for (i, a) in c.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        c = next;
    }
    c
}

fn random_unit(rng: &mut ChaCha8Rng, p: u64) -> Q {
    loop {
        let n: i64 = rng.gen_range(-40..=40);
        let d: i64 = rng.gen_range(1..=40);
        if n % p as i64 != 0 && d % p as i64 != 0 {
            return qf(n, d);
        }
    }
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let primes = [3u64, 5, 7, 11];
    for case in 0..500 {
        let p = primes[case % primes.len()];
        let deg = rng.gen_range(1..=8);
        let mut roots = Vec::new();
        let mut expected = 0;
        for _ in 0..deg {
            let k: u32 = rng.gen_range(0..=3);
            if k >= 1 {
                expected += 1;
            }
            roots.push(random_unit(&mut rng, p) * q(p.pow(k) as i64));
        }
        let coeffs = poly_from_roots(&roots);
        let t = coeffs.len();
        let f: TruncatedSeries = TruncatedSeries::from_rationals(&coeffs, t);
        let got = zero_count_bound(&f, prime(p), ValuationFloor::Exact).map_err(|e| e.to_string())?;
        ensure(got == expected, || format!("case {case}: roots {roots:?} at p = {p}: bound {got}, exact {expected}"))?;
    }
    Ok("500 polynomials".into())
}

fn genus2() -> CurveModel {
    // x(x-1)(x-2)(x-3)(x^2+1)
    CurveModel::from_ints(ModelKind::Even, &[0, -6, 11, -12, 12, -6, 1]).unwrap()
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let t = 24;
    for case in 0..100 {
        let m = rng.gen_range(1..=4);
        let fs: Vec<TruncatedSeries> =
            (0..m).map(|_| TruncatedSeries::from_rationals(&(0..t).map(|_| random_q(&mut rng, 9, 4)).collect::<Vec<_>>(), t)).collect();
        let mut s: Vec<usize> = Vec::new();
        while s.len() < m + 1 {
            let n = rng.gen_range(0..12);
            if !s.contains(&n) {
                s.push(n);
            }
        }
        s.sort_unstable();
        let d = build_annihilator(&s, &fs).map_err(|e| format!("case {case}: {e}"))?;
        for f in &fs {
            let image = d.apply(f).map_err(|e| e.to_string())?;
            ensure(is_zero_series(&image), || format!("case {case}: S = {s:?} leaves a nonzero image"))?;
        }
    }
    let c = genus2();
    let mut disks_checked = 0;
    for p in [7u64, 11] {
        let pr = prime(p);
        let fpoly = std::sync::Arc::new(c.f().clone());
        let funcs: Vec<CurveFunction> = (0..5).map(|i| CurveFunction::x_pow_over_y(&fpoly, i)).collect();
        for disk in c.residue_disks(pr).map_err(|e| e.to_string())? {
            if disk.kind != DiskKind::AffineNonWeierstrass {
                continue;
            }
            let chart = Chart::new(&c, disk, pr, 60).map_err(|e| e.to_string())?;
            let fs = funcs.iter().map(|f| chart.expand(f, 30)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
            let s = search_nice_s(&fs, pr, 20).map_err(|e| e.to_string())?;
            let d = build_annihilator(&s, &fs).map_err(|e| e.to_string())?;
            for f in &fs {
                let image = d.apply(f).map_err(|e| e.to_string())?;
                ensure(is_zero_series(&image), || format!("x^i/y not annihilated at {disk}, p = {p}"))?;
            }
            disks_checked += 1;
        }
    }
    ensure(disks_checked > 0, || "no affine non-Weierstrass disks".into())?;
    Ok(format!("100 random tuples, {disks_checked} genus-2 disks"))
}

/// Residue of `n/d` modulo `p`, or `None` when `p | d`.
fn residue(a: &Q, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let n = ((a.numer() % &pb) + &pb) % &pb;
    let d = ((a.denom() % &pb) + &pb) % &pb;
    if d.is_zero() {
        return None;
    }
    let d: u64 = d.try_into().unwrap();
    let inv = (0..p - 2).fold(1u64, |acc, _| acc * d % p);
    let n: u64 = n.try_into().unwrap();
    Some(n * inv % p)
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let p = prime(5);
    let t = 24;
    let curves = [(-1, 0), (1, 1), (1, 2), (1, -1), (2, 1)];
    let mut disks = 0;
    for &(a, b) in &curves {
        let c = CurveModel::from_ints(ModelKind::Odd, &[b, a, 0, 1]).map_err(|e| e.to_string())?;
        for _ in 0..3 {
            let a_spec = random_q(&mut rng, 12, 9);
            let spec = ColemanSpec::elliptic(c.clone(), a_spec.clone(), random_q(&mut rng, 5, 3)).map_err(|e| e.to_string())?;
            let r = run_pipeline(&spec, p, t).map_err(|e| e.to_string())?;
            let x_plus_a = CurveFunction::x(spec.h.curve_poly()).add(&CurveFunction::constant(spec.h.curve_poly(), a_spec.clone()));
            for d in &r.disks {
                let Some((x, _)) = d.disk.affine() else {
                    continue;
                };
                ensure(d.status == DiskStatus::Ok, || format!("{}: {:?}", d.label, d.status))?;
                ensure(d.image.as_deref() == Some(x_plus_a.to_string().as_str()), || format!("{}: D(G) = {:?}", d.label, d.image))?;
                let cert = d.certification.as_ref().unwrap();
                ensure(cert.matches && cert.precision >= t - 2, || format!("{}: certification {cert:?}", d.label))?;
                let vanishes = residue(&a_spec, 5).is_some_and(|r| (x + r) % 5 == 0);
                let n_b = match (vanishes, d.disk.kind) {
                    (false, _) => 0,
                    (true, DiskKind::AffineWeierstrass) => 2,
                    (true, _) => 1,
                };
                ensure(d.n_b == Some(n_b), || format!("{} with a = {a_spec}: N_b {:?}, expected {n_b}", d.label, d.n_b))?;
                let raw = kappa(p).unwrap() * q(n_b as i64 + 2);
                let expected: BigInt = ck_core::rational::ceil(&raw) - 1;
                ensure(d.bound.map(BigInt::from) == Some(expected.clone()), || format!("{}: bound {:?}, expected {expected}", d.label, d.bound))?;
                disks += 1;
            }
        }
    }
    Ok(format!("{disks} disks on {} curves", curves.len()))
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let c = genus2();
    let p = prime(7);
    let g = c.genus() as i64;
    let mut spec = ColemanSpec::zero(c.clone());
    let n = spec.dimension();
    for i in 0..n {
        for j in 0..n {
            spec.a_matrix[i][j] = random_q(&mut rng, 20, 6);
        }
        spec.a_vector[i] = random_q(&mut rng, 20, 6);
        spec.base_constants[i] = random_q(&mut rng, 20, 6);
    }
    let fpoly = spec.h.curve_poly().clone();
    spec.h = CurveFunction::constant(&fpoly, random_q(&mut rng, 9, 5))
        .add(&CurveFunction::x(&fpoly).scale(&random_q(&mut rng, 9, 5)))
        .add(&CurveFunction::x(&fpoly).mul(&CurveFunction::x(&fpoly)).scale(&random_q(&mut rng, 9, 5)));
    let report = run_pipeline(&spec, p, 52).map_err(|e| e.to_string())?;
    let allowed = nonweierstrass_image_ledger(&c);
    let inf = |center| DiskDescriptor { kind: DiskKind::Infinite, center };
    let w_disk = DiskDescriptor { kind: DiskKind::AffineWeierstrass, center: DiskCenter::Affine { x: 0, y: 0 } };
    let mut non_w = 0;
    let mut failures = Vec::new();
    for d in &report.disks {
        match d.disk.kind {
            DiskKind::AffineNonWeierstrass => {
                let cert = d.certification.as_ref().ok_or_else(|| format!("{}: no certification ({:?})", d.label, d.status))?;
                ensure(cert.matches, || format!("{}: D(G) not certified", d.label))?;
                ensure(d.status == DiskStatus::Ok, || format!("{}: {:?}", d.label, d.status))?;
                let ledger = d.image_ledger.as_ref().unwrap();
                ensure(ledger.within(&allowed), || format!("{}: ledger {ledger:?} exceeds {allowed:?}", d.label))?;
                non_w += 1;
            }
            DiskKind::AffineWeierstrass => {
                let nice = d.niceness.as_ref().is_some_and(|n| n.is_nice());
                if !nice {
                    let f = d.niceness.as_ref().and_then(|n| n.failure.clone());
                    failures.push(format!("{} not nice ({f:?})", d.label));
                }
            }
            DiskKind::Infinite => {}
        }
    }
    ensure(non_w > 0, || "no non-Weierstrass disks".into())?;
    // pole orders of the certified image, read off expansions
    let image = ck_core::coleman::nonweierstrass_image_closed_form(&spec).map_err(|e| e.to_string())?;
    for center in [DiskCenter::InfinityPlus, DiskCenter::InfinityMinus] {
        let chart = Chart::new(&c, inf(center), p, 80).map_err(|e| e.to_string())?;
        let order = chart.expand_laurent(&image).map_err(|e| e.to_string())?.order().unwrap_or(i64::MAX);
        ensure(order >= -(g + 1), || format!("pole of order {} at {center:?}", -order))?;
    }
    let chart = Chart::new(&c, w_disk, p, 80).map_err(|e| e.to_string())?;
    let order = chart.expand_laurent(&image).map_err(|e| e.to_string())?.order().unwrap_or(i64::MAX);
    ensure(order >= -(4 * g + 1), || format!("pole of order {} at the Weierstrass point (0, 0)", -order))?;
    let units = weierstrass_annihilator(&c).and_then(|w| w.det_b_units(&c, p)).map_err(|e| e.to_string())?;
    ensure(!units.is_empty() && units.iter().all(|&(_, r)| r != 0), || format!("det B residues {units:?}"))?;
    if failures.is_empty() {
        Ok(format!("{non_w} non-Weierstrass disks, det B residues {units:?}"))
    } else {
        Err(format!("det B residues {units:?} are units, but {}", failures.join("; ")))
    }
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let primes = [3u64, 5, 7];
    let mut done = 0;
    let mut attempts = 0;
    while done < 500 {
        attempts += 1;
        ensure(attempts < 5000, || "too few usable instances".into())?;
        let p = primes[attempts % 3];
        let pr = prime(p);
        let order = rng.gen_range(1..=4usize);
        let deg = rng.gen_range(1..=10usize);
        let t = deg + order + 5;
        // G: p-adically close roots times a random scalar
        let roots: Vec<Q> = (0..deg).map(|_| random_unit(&mut rng, p) * q(p.pow(rng.gen_range(0..=2)) as i64)).collect();
        let scale = random_q(&mut rng, 30, 30);
        if scale.is_zero() {
            continue;
        }
        let gcoeffs: Vec<Q> = poly_from_roots(&roots).into_iter().map(|c| c * &scale).collect();
        let g: TruncatedSeries = TruncatedSeries::from_rationals(&gcoeffs, t);
        // nice D: integral polynomial coefficients, unit leading coefficient
        let mut coeffs = Vec::new();
        for i in 0..=order {
            let mut c: Vec<Q> = (0..=3).map(|_| q(rng.gen_range(-9..=9))).collect();
            if i == order {
                c[0] = Q::from_integer(random_unit(&mut rng, p).numer().clone());
            }
            coeffs.push(TruncatedSeries::from_rationals(&c, t));
        }
        let d = DifferentialOperator::new(coeffs).map_err(|e| e.to_string())?;
        ensure(d.check_nice(pr).is_nice(), || "constructed operator is not nice".into())?;
        let dg = d.apply(&g).map_err(|e| e.to_string())?;
        if dg.is_zero() {
            continue;
        }
        let ok = slope_transfer_check(&g, ValuationFloor::Exact, &dg, ValuationFloor::Exact, order, pr).map_err(|e| e.to_string())?;
        ensure(ok, || format!("inequality fails: p = {p}, roots {roots:?}, order {order}"))?;
        done += 1;
    }
    Ok(format!("{done} instances"))
}

fn criterion_9() -> Check {
    for g in 2..=10u64 {
        let cor = cor_potential_good(g).map_err(|e| e.to_string())?.raw_value;
        // Hasse-Weil: #X(F_3) <= 3 + 1 + floor(2g sqrt 3)
        let mut x_max = 4;
        while (x_max + 1 - 4) * (x_max + 1 - 4) <= 12 * g * g {
            x_max += 1;
        }
        for w in 0..=4 {
            let r = thm1_hyperelliptic(g, 3, 1, x_max, w).map_err(|e| e.to_string())?;
            ensure(r.raw_value <= cor, || format!("g = {g}, #X = {x_max}, #W = {w}: {} > {cor}", r.raw_value))?;
        }
    }
    Ok("g = 2..10".into())
}

fn criterion_10() -> Check {
    let e = thm_integral(1, 5, 1, 8, 0).map_err(|e| e.to_string())?;
    ensure(e.integer_bound == 29, || format!("elliptic bound {}", e.integer_bound))?;
    ensure(e.raw_value == q(16) * kappa(prime(5)).unwrap(), || "elliptic raw value".into())?;
    let inner = 8 * 8 + 44 * 4 - 34 * 2 + 9 + 5 * 4 + 3;
    ensure(inner == 204 && thm_integral_inner(2, 4, 1) == 204, || format!("inner value {}", thm_integral_inner(2, 4, 1)))?;
    let r = thm_integral(2, 3, 1, 4, 1).map_err(|e| e.to_string())?;
    ensure(r.raw_value == q(204) * kappa(prime(3)).unwrap(), || "g = 2 raw value".into())?;
    ensure(r.provenance.iter().any(|l| l == "inner value 204"), || "provenance".into())?;
    Ok(format!("29 and inner 204 (bound {})", r.integer_bound))
}

fn main() -> ExitCode {
    let criteria: [(usize, &str, Duration, fn() -> Check); 10] = [
        (1, "formula reproduction", Duration::from_secs(1), criterion_1),
        (2, "degree-ledger identities", Duration::from_secs(1), criterion_2),
        (3, "Legendre suite", Duration::from_secs(10), criterion_3),
        (4, "Newton-polygon oracle", Duration::from_secs(30), criterion_4),
        (5, "annihilation property", Duration::from_secs(60), criterion_5),
        (6, "elliptic end-to-end", Duration::from_secs(60), criterion_6),
        (7, "hyperelliptic end-to-end", Duration::from_secs(300), criterion_7),
        (8, "slope-transfer fuzz", Duration::from_secs(120), criterion_8),
        (9, "bound-evaluator consistency", Duration::from_secs(1), criterion_9),
        (10, "integral-points evaluator", Duration::from_secs(1), criterion_10),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut unexpected = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == id);
        match (&outcome, known) {
            (Ok(detail), None) => println!("criterion {id:>2} PASS {name} ({elapsed:.2?}): {detail}"),
            (Ok(detail), Some(_)) => {
                println!("criterion {id:>2} PASS {name} ({elapsed:.2?}): {detail} [listed as a known failure]");
                unexpected.push(id);
            }
            (Err(why), None) => {
                println!("criterion {id:>2} FAIL {name} ({elapsed:.2?}): {why}");
                unexpected.push(id);
            }
            (Err(why), Some((_, reason))) => {
                println!("criterion {id:>2} FAIL {name} ({elapsed:.2?}): {why}");
                println!("             known failure: {reason}");
            }
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected results for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
