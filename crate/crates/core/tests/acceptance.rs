//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nftab::hpmbounds::{norm_bound, pohst_bound, NewtonPrefix};
use nftab::minorations::{local_correction, CORRECTION_NORMS};
use nftab::ordermax::{dedekind_maximal, field_discriminant, residue_degrees, residue_degrees_fast, residue_degrees_slow};
use nftab::polyarith::{complex_roots, is_irreducible, IntPolynomial};
use nftab::sieve::{candidate_filter, valuation_filter, SearchParams, FILTER_LEVELS};
use nftab::tabcli::{is_isomorphic, run_search, BoundSpec, RunConfig, TabError};

/// Published corrections, indexed `[norm][column]`, norms 2, 3, 4, 5, 7.
const DEGREE8: [[u128; 5]; 5] = [
    [3379343, 11725962, 42765027, 163060410, 646844001],
    [2403757, 8336752, 30393063, 115852707, 459467465],
    [1930702, 6688609, 24363884, 92810084, 367892401],
    [1656110, 5726300, 20829049, 79259702, 313918560],
    [1362891, 4682934, 16957023, 64309249, 254052210],
];
const DEGREE9: [[u128; 5]; 5] = [
    [81295493, 301476699, 1165734091, 4679379812, 19422150186],
    [57789556, 214235371, 828172359, 3323651196, 13792634200],
    [46348899, 171694276, 663330644, 2660853331, 11037921283],
    [39657561, 146723910, 566314434, 2269968332, 9410709985],
    [32371189, 119294181, 459066389, 1835807996, 7596751280],
];

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, ok: bool, detail: String) {
        if !ok {
            self.failures += 1;
        }
        println!("[{}] criterion {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn criterion_1(r: &mut Report) {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (n, table) in [(8usize, DEGREE8), (9, DEGREE9)] {
        for (qi, &q) in CORRECTION_NORMS.iter().enumerate() {
            for col in 0..5 {
                let r1 = if n == 8 { 2 * col } else { 2 * col + 1 };
                let c = local_correction(n, r1, (n - r1) / 2, q);
                let t = table[qi][col];
                worst = worst.max((c as f64 - t as f64).abs() / t as f64);
                count += 1;
            }
        }
    }
    r.line("1", count == 50 && worst <= 2e-3, format!("{count} table entries, worst relative error {worst:.2e} (tol 2e-3)"));
}

fn criterion_2(r: &mut Report) {
    let p1: IntPolynomial = "x^9 - 4*x^7 - 4*x^6 + 2*x^5 + 5*x^4 + 6*x^3 + 8*x^2 + 4*x + 1".parse().unwrap();
    let p2: IntPolynomial = "x^9 - 6*x^7 - 9*x^6 - 2*x^5 + 21*x^4 + 35*x^3 + 23*x^2 + 7*x + 1".parse().unwrap();
    let params = SearchParams::new(9, 3, 3, 146_723_910, 5, 3).unwrap();
    let target = BigInt::from(-142_989_047);
    let mut ok = true;
    let mut found = Vec::new();
    for p in [&p1, &p2] {
        let d = candidate_filter(p, &params).ok().and_then(|rec| rec.d_k);
        ok &= d.as_ref() == Some(&target);
        ok &= field_discriminant(p).ok().map(|x| x.0).as_ref() == Some(&target);
        found.push(d.map(|x| x.to_string()).unwrap_or_else(|| "rejected".into()));
    }
    let iso = is_isomorphic(&p1, &p2);
    ok &= iso == Ok(false);
    r.line("2", ok, format!("d_K = {} / {}, isomorphic = {iso:?}", found[0], found[1]));
}

fn run_table(n: usize, r1: usize, r2: usize, b: u64) -> nftab::tabcli::ResultTable {
    run_search(&RunConfig::new(n, r1, r2, BoundSpec::Explicit(b))).unwrap()
}

fn criterion_3(r: &mut Report, discs: &mut Vec<BigInt>) {
    let cases: [(usize, usize, usize, u64, i64, Option<usize>, bool); 7] = [
        (2, 0, 1, 20, 3, Some(8), false),
        (2, 2, 0, 40, 5, None, false),
        (3, 1, 1, 1000, 23, None, true),
        (3, 3, 0, 1000, 49, None, true),
        (4, 2, 1, 2000, 275, None, true),
        (4, 0, 2, 2000, 117, None, true),
        (4, 4, 0, 3000, 725, None, true),
    ];
    for (n, r1, r2, b, min, count, with_oracle) in cases {
        let t0 = Instant::now();
        let table = run_table(n, r1, r2, b);
        let ds = table.discriminants();
        discs.extend(ds.iter().cloned());
        let got_min = ds.iter().map(|d| d.abs()).min();
        let mut ok = got_min == Some(BigInt::from(min)) && table.needs_attention.is_empty();
        let mut detail = format!(
            "({r1},{r2}) B={b}: {} fields, min {}",
            ds.len(),
            got_min.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
        );
        if let Some(c) = count {
            ok &= ds.len() == c;
            detail += &format!(" (expect {c} fields, min {min})");
        } else {
            detail += &format!(" (expect min {min})");
        }
        if with_oracle {
            let oracle = common::box_oracle(n, r1, b, false);
            let prim_search: Vec<BigInt> =
                table.classes.iter().filter(|c| common::is_primitive(&c.rep().poly)).map(|c| c.d_k.clone()).collect();
            let prim_oracle: Vec<BigInt> =
                oracle.iter().filter(|f| common::is_primitive(&f.poly)).map(|f| f.d_k.clone()).collect();
            let equal = prim_search == prim_oracle;
            ok &= equal;
            let imprim_search = ds.len() - prim_search.len();
            let imprim_oracle = oracle.len() - prim_oracle.len();
            detail += &format!(
                "; primitive fields search/oracle {}/{} {}; imprimitive search/oracle {imprim_search}/{imprim_oracle}",
                prim_search.len(),
                prim_oracle.len(),
                if equal { "equal" } else { "DIFFER" },
            );
        }
        detail += &format!(" [{:.1}s]", t0.elapsed().as_secs_f64());
        r.line(&format!("3 deg {n}"), ok, detail);
    }
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize, c: i64) -> IntPolynomial {
    loop {
        let a: Vec<i64> = (0..n).map(|_| rng.gen_range(-c..=c)).collect();
        if a[n - 1] != 0 {
            return IntPolynomial::from_i64(&a);
        }
    }
}

fn newton_vs_roots(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut worst = 0.0f64;
    let mut checked = 0;
    while checked < 10_000 {
        let n = rng.gen_range(1..=6);
        let p = random_poly(rng, n, 10);
        // certified boxes need squarefree input
        let Ok(boxes) = complex_roots(&p, 128) else { continue };
        checked += 1;
        let prefix = NewtonPrefix::from_coeffs(p.coeffs());
        for k in 1..=n {
            let (mut re, mut scale) = (0.0, 0.0);
            for b in &boxes {
                let (x, y) = b.center_f64();
                let (m, th) = (x.hypot(y).powi(k as i32), y.atan2(x) * k as f64);
                re += m * th.cos();
                scale += m;
            }
            let exact = prefix.s[k - 1].to_f64().unwrap();
            worst = worst.max((exact - re).abs() / (1.0 + scale));
        }
    }
    (worst < 1e-9, format!("{checked} squarefree polynomials, worst scaled error {worst:.1e} (tol 1e-9)"))
}

fn pohst_sampling(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut checked = 0;
    let mut violations = 0;
    while checked < 10_000 {
        let n = rng.gen_range(2..=9);
        let u2 = rng.gen_range(n as f64..4.0 * n as f64);
        let nmax = norm_bound(n, u2).max(1);
        let norm = rng.gen_range(1..=nmax);
        let target = 2.0 * (norm as f64).ln();
        let mut logs: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let shift = (target - logs.iter().sum::<f64>()) / n as f64;
        logs.iter_mut().for_each(|x| *x += shift);
        let t: Vec<f64> = logs.iter().map(|x| x.exp()).collect();
        if t.iter().sum::<f64>() > u2 {
            continue;
        }
        checked += 1;
        for k in 3..=n {
            let v: f64 = t.iter().map(|x| x.powf(k as f64 / 2.0)).sum();
            if v > pohst_bound(n, u2, norm, k).unwrap() {
                violations += 1;
            }
        }
    }
    (violations == 0, format!("{checked} samples, {violations} violations"))
}

/// Maximum of `sum t^(k/2)` on `{sum t = u2, prod t = N^2}` for `n <= 4`:
/// the last two coordinates follow from their sum and product; the free
/// ones are scanned on a dense logarithmic grid, then refined by a zooming grid.
fn pohst_grid_oracle(n: usize, u2: f64, norm: u64, k: usize) -> f64 {
    let p2 = (norm as f64).powi(2);
    let kh = k as f64 / 2.0;
    // free coordinates are logarithms; optima sit near t = 0
    let obj = |logs: &[f64]| -> f64 {
        let free: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
        let s = u2 - free.iter().sum::<f64>();
        let prod = p2 / free.iter().product::<f64>();
        let disc = s * s - 4.0 * prod;
        if s <= 0.0 || free.iter().any(|&x| x <= 0.0) || disc < 0.0 {
            return f64::NEG_INFINITY;
        }
        let r = disc.sqrt();
        ((s + r) / 2.0).powf(kh) + ((s - r) / 2.0).powf(kh) + free.iter().map(|x| x.powf(kh)).sum::<f64>()
    };
    let free = n - 2;
    if free == 0 {
        return obj(&[]);
    }
    let steps = if free == 1 { 4000 } else { 400 };
    let lmin = u2.ln() - 40.0;
    let h = 40.0 / steps as f64;
    let mut best = (f64::NEG_INFINITY, vec![0.0; free]);
    let mut idx = vec![1usize; free];
    loop {
        let x: Vec<f64> = idx.iter().map(|&i| lmin + i as f64 * h).collect();
        let v = obj(&x);
        if v > best.0 {
            best = (v, x);
        }
        let mut j = 0;
        while j < free {
            idx[j] += 1;
            if idx[j] < steps {
                break;
            }
            idx[j] = 1;
            j += 1;
        }
        if j == free {
            break;
        }
    }
    // zooming grid around the incumbent
    let (mut v, mut x) = best;
    let mut w = 2.0 * h;
    let m = 20i64;
    for _ in 0..80 {
        let centre = x.clone();
        let mut off = vec![-m; free];
        loop {
            let y: Vec<f64> = centre.iter().zip(&off).map(|(c, &o)| c + w * o as f64 / m as f64).collect();
            let fy = obj(&y);
            if fy > v {
                v = fy;
                x = y;
            }
            let mut j = 0;
            while j < free {
                off[j] += 1;
                if off[j] <= m {
                    break;
                }
                off[j] = -m;
                j += 1;
            }
            if j == free {
                break;
            }
        }
        w *= 0.6;
    }
    v
}

fn pohst_grid(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for _ in 0..60 {
        let n = rng.gen_range(2..=4);
        let u2 = rng.gen_range(n as f64 + 0.5..3.0 * n as f64);
        let nmax = norm_bound(n, u2);
        if nmax == 0 {
            continue;
        }
        let norm = rng.gen_range(1..=nmax);
        for k in 3..=n.max(3) {
            let oracle = pohst_grid_oracle(n, u2, norm, k);
            let bound = pohst_bound(n, u2, norm, k).unwrap();
            if !oracle.is_finite() {
                continue;
            }
            let gap = (bound - oracle).abs() / oracle.max(1.0);
            worst = worst.max(gap);
            cases += 1;
        }
    }
    (worst <= 1e-6, format!("{cases} cases, worst relative gap {worst:.1e} (tol 1e-6)"))
}

fn irreducible_sample(rng: &mut ChaCha8Rng, count: usize) -> Vec<IntPolynomial> {
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(2..=6);
        let p = random_poly(rng, n, 6);
        if is_irreducible(&p) {
            out.push(p);
        }
    }
    out
}

fn splitting_suites(r: &mut Report, rng: &mut ChaCha8Rng, discs: &mut Vec<BigInt>) {
    let polys = irreducible_sample(rng, 300);
    let mut sum_ok = true;
    let mut agree_ok = true;
    let mut compared = 0;
    for p in &polys {
        for q in [2u64, 3, 5, 7] {
            let split = residue_degrees(p, q);
            sum_ok &= split.degree() as usize == p.degree();
            let slow = residue_degrees_slow(p, q);
            agree_ok &= slow == split;
            if dedekind_maximal(p, q) {
                agree_ok &= residue_degrees_fast(p, q) == slow;
                compared += 1;
            }
        }
        if let Ok((d, _)) = field_discriminant(p) {
            discs.push(d);
        }
    }
    r.line("5 sum ef = n", sum_ok, format!("{} polynomials x 4 primes", polys.len()));
    r.line("5 fast/slow splitting", agree_ok, format!("{compared} Dedekind-maximal cases, all cases vs slow path"));
}

fn semigroup_suite() -> (bool, String) {
    const LIMIT: u64 = 10_000;
    let primes: Vec<u64> = (2..=LIMIT).filter(|&x| (2..x).take_while(|d| d * d <= x).all(|d| x % d != 0)).collect();
    let mut rejected_legal = 0;
    for &m in &FILTER_LEVELS {
        let mut legal = vec![false; (LIMIT + 1) as usize];
        legal[1] = true;
        let mut gens = Vec::new();
        for &q in &primes {
            let mut pw = q;
            while pw <= LIMIT {
                if pw > m {
                    gens.push(pw);
                }
                pw = match pw.checked_mul(q) {
                    Some(x) => x,
                    None => break,
                };
            }
        }
        for v in 1..=LIMIT as usize {
            if legal[v] {
                for &g in &gens {
                    let w = v as u64 * g;
                    if w > LIMIT {
                        continue;
                    }
                    legal[w as usize] = true;
                }
            }
        }
        for v in 1..=LIMIT {
            if legal[v as usize] && !valuation_filter(&BigInt::from(v), m).unwrap() {
                rejected_legal += 1;
            }
        }
    }
    (rejected_legal == 0, format!("values <= 10^4 at levels {FILTER_LEVELS:?}, {rejected_legal} legal norms rejected"))
}

fn determinism_suite() -> (bool, String) {
    let dir = tempfile::tempdir().unwrap();
    let run = |jobs: usize, name: &str, stop: Option<usize>| -> Result<String, TabError> {
        let mut c = RunConfig::new(3, 1, 1, BoundSpec::Explicit(1000));
        c.jobs = jobs;
        c.out = Some(dir.path().join(format!("{name}.jsonl")));
        c.checkpoint = Some(dir.path().join(format!("{name}.ckpt")));
        c.stop_after = stop;
        run_search(&c)?;
        Ok(std::fs::read_to_string(c.out.unwrap()).unwrap())
    };
    let base = run(1, "j1", None).unwrap();
    let mut ok = run(2, "j2", None).unwrap() == base && run(8, "j8", None).unwrap() == base;
    let total = nftab::sieve::chunk_list(&RunConfig::new(3, 1, 1, BoundSpec::Explicit(1000)).search_params().unwrap())
        .unwrap()
        .len();
    let interrupted = run(2, "kill", Some(total / 2));
    ok &= matches!(interrupted, Err(TabError::Interrupted(_)));
    ok &= run(8, "kill", None).unwrap() == base;
    (ok, format!("degree 3 (1,1) B=1000: jobs 1/2/8 and kill at {}/{total} chunks + resume", total / 2))
}

fn main() {
    let mut r = Report { failures: 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut discs = Vec::new();
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r, &mut discs);
    println!("[SKIP] criterion 4: full-scale degree 8/9 runs are long-running targets, not part of the desk suite");
    let (ok, d) = newton_vs_roots(&mut rng);
    r.line("5 Newton recursion", ok, d);
    let (ok, d) = pohst_sampling(&mut rng);
    r.line("5 Pohst dominance", ok, d);
    let (ok, d) = pohst_grid(&mut rng);
    r.line("5 Pohst grid oracle", ok, d);
    splitting_suites(&mut r, &mut rng, &mut discs);
    let bad = discs.iter().filter(|d| !matches!(d.mod_floor(&BigInt::from(4)).to_u8(), Some(0 | 1))).count();
    r.line("5 Stickelberger", bad == 0, format!("{} discriminants, {bad} not 0/1 mod 4", discs.len()));
    let (ok, d) = semigroup_suite();
    r.line("5 valuation soundness", ok, d);
    let (ok, d) = determinism_suite();
    r.line("5 determinism", ok, d);
    if r.failures > 0 {
        println!("{} criteria failed", r.failures);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
