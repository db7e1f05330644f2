//! Acceptance criteria 1–11, one PASS/FAIL line each.
//!
//! Every comparison is exact over the rationals, so the tolerance is zero
//! throughout. Sample counts and seeds are fixed below.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use resolvkit::blowup::{
    blowup_pullback, center_order_consistency, lemma71_check, order_along_center,
    strict_transform_hypersurface, Center, ChartMap, ExceptionalLedger,
};
use resolvkit::bundled::EXAMPLES;
use resolvkit::dc_class::{
    check_childress, check_corollary_45, childress_partitions, derivation_closure_test, extract_rab, inverse_majorant,
    is_log_convex, log_convexity_consequences, partial_quasianalytic_sum, quasianalytic_test, DerivationVerdict,
    GrowthSequence, SequenceVerdict,
};
use resolvkit::faa_di_bruno::{compose_coefficient, compositions, majorant_h, CoefficientTable};
use resolvkit::parse::parse_polynomial;
use resolvkit::resolve::{coefficient_data, resolve_hypersurface, Config, LocalModel};
use resolvkit::series::{divide_by_coordinate, invert_map, substitute};
use resolvkit::{Jet, Multiindex, OrderResult, PolyMap};

/// Absolute tolerance on every numeric comparison.
const TOLERANCE: i64 = 0;
const SEED: u64 = 0x5eed_2024;

const FDB_CASES: usize = 200;
const FDB_MAX_VARS: usize = 3;
const FDB_MAX_DEG: u32 = 4;
const FDB_MAX_GAMMA: u32 = 6;
const MAJORANT_MAX_GAMMA: u32 = 8;
const CHILDRESS_MAX_N: u32 = 8;
const COROLLARY_CASES: usize = 500;
const COROLLARY_MAX_GAMMA: u32 = 8;
const INVERSE_CASES: usize = 20;
const INVERSE_DEPTH: u32 = 6;
const LEMMA71_CASES: usize = 50;
const LEMMA71_TRUNCATION: u32 = 12;
const CONSISTENCY_CASES: usize = 50;
const CONSISTENCY_SAMPLES: usize = 10;
const COMMUTATION_CASES: usize = 30;
const CUSP_SMOOTH_AFTER: usize = 1;
const CUSP_BLOWUPS: usize = 3;
const NODE_BLOWUPS: usize = 1;

type Outcome = Result<String, String>;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn exact_eq(a: &BigRational, b: &BigRational) -> bool {
    (a - b).abs() <= q(TOLERANCE)
}

fn random_multiindex(rng: &mut ChaCha8Rng, n: usize, max_deg: u32) -> Multiindex {
    let deg = rng.gen_range(0..=max_deg);
    let mut e = vec![0u32; n];
    for _ in 0..deg {
        e[rng.gen_range(0..n)] += 1;
    }
    Multiindex(e)
}

fn random_jet(rng: &mut ChaCha8Rng, n: usize, t: u32, max_deg: u32, terms: usize, constant: bool) -> Jet {
    let mut ts = Vec::new();
    for _ in 0..terms {
        let e = random_multiindex(rng, n, max_deg);
        if !constant && e.is_zero() {
            continue;
        }
        let c = rng.gen_range(-4i64..=4);
        let d = rng.gen_range(1i64..=3);
        ts.push((e, BigRational::new(c.into(), d.into())));
    }
    let mut j = Jet::zero(n, t);
    for (e, c) in ts {
        j = &j + &Jet::monomial(n, t, e, c);
    }
    j
}

/// `f / y_i^e`, one coordinate at a time.
fn divide_power(f: &Jet, i: usize, e: u32) -> Result<Jet, String> {
    (0..e).try_fold(f.clone(), |h, _| divide_by_coordinate(&h, i).map_err(|e| e.to_string()))
}

fn all_gammas(n: usize, max: u32) -> Vec<Multiindex> {
    (0..=max).flat_map(|k| compositions(k, n)).collect()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checked = 0usize;
    for case in 0..FDB_CASES {
        let n = rng.gen_range(1..=FDB_MAX_VARS);
        let p = rng.gen_range(1..=FDB_MAX_VARS);
        let f = random_jet(&mut rng, p, FDB_MAX_GAMMA, FDB_MAX_DEG, 5, true);
        let g: Vec<Jet> = (0..p).map(|_| random_jet(&mut rng, n, FDB_MAX_GAMMA, FDB_MAX_DEG, 4, false)).collect();
        let composite = substitute(&f, &PolyMap::new(g.clone()).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let ft = CoefficientTable::from_jet(&f);
        let gt: Vec<CoefficientTable> = g.iter().map(CoefficientTable::from_jet).collect();
        for gamma in all_gammas(n, FDB_MAX_GAMMA) {
            let h = compose_coefficient(&ft, &gt, &gamma).map_err(|e| e.to_string())?;
            if !exact_eq(&h, &composite.coeff(&gamma)) {
                return Err(format!("case {case}: γ = {:?}: {h} vs {}", gamma.0, composite.coeff(&gamma)));
            }
            checked += 1;
        }
    }
    Ok(format!("{FDB_CASES} pairs, {checked} coefficients, exact"))
}

/// `Σ_{δ ≠ 0} u^δ` and `Σ_α (λz)^α`, composed by substitution.
fn majorant_closed_form(lambda: &BigRational, n: usize, p: usize, t: u32) -> Result<Jet, String> {
    let g = Jet::from_terms(n, t, all_gammas(n, t).into_iter().filter(|d| !d.is_zero()).map(|d| (d, q(1))));
    let f = Jet::from_terms(p, t, all_gammas(p, t).into_iter().map(|a| {
        let c = num_traits::pow(lambda.clone(), a.degree() as usize);
        (a, c)
    }));
    let gs = PolyMap::new(vec![g; p]).map_err(|e| e.to_string())?;
    substitute(&f, &gs).map_err(|e| e.to_string())
}

fn criterion_2() -> Outcome {
    let lambdas = [q(1), BigRational::new(1.into(), 2.into()), q(3)];
    let mut checked = 0usize;
    for lambda in &lambdas {
        for n in 1..=2 {
            for p in 1..=2 {
                let closed = majorant_closed_form(lambda, n, p, MAJORANT_MAX_GAMMA)?;
                for gamma in all_gammas(n, MAJORANT_MAX_GAMMA) {
                    let h = majorant_h(lambda, p, &gamma).map_err(|e| e.to_string())?;
                    if !exact_eq(&h, &closed.coeff(&gamma)) || h.is_negative() {
                        return Err(format!("λ = {lambda}, n = {n}, p = {p}, γ = {:?}: {h} vs {}", gamma.0, closed.coeff(&gamma)));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} coefficients of F∘G, exact"))
}

fn sequences() -> Vec<(&'static str, GrowthSequence)> {
    let half = BigRational::new(1.into(), 2.into());
    vec![
        ("1", GrowthSequence::constant()),
        ("(k!)^(1/2)", GrowthSequence::gevrey(half).expect("positive")),
        ("k!", GrowthSequence::factorial()),
        ("(k!)^2", GrowthSequence::gevrey(q(2)).expect("positive")),
    ]
}

fn criterion_3() -> Outcome {
    let seqs = sequences();
    let mut partitions = 0usize;
    for n in 1..=CHILDRESS_MAX_N {
        for ks in childress_partitions(n) {
            for (name, m) in &seqs {
                if !check_childress(m, &ks).map_err(|e| e.to_string())? {
                    return Err(format!("Childress fails for m = {name}, k = {ks:?}"));
                }
            }
            partitions += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let mut done = 0usize;
    while done < COROLLARY_CASES {
        let n = rng.gen_range(1..=3);
        let p = rng.gen_range(1..=3);
        let l = rng.gen_range(1..=3);
        let mut ks = Vec::new();
        let mut deltas: Vec<Multiindex> = Vec::new();
        let mut gamma = 0;
        for _ in 0..l {
            let k = random_multiindex(&mut rng, p, 3);
            let d = random_multiindex(&mut rng, n, 3);
            if k.is_zero() || d.is_zero() || deltas.contains(&d) {
                continue;
            }
            gamma += k.degree() * d.degree();
            ks.push(k);
            deltas.push(d);
        }
        if ks.is_empty() || gamma > COROLLARY_MAX_GAMMA {
            continue;
        }
        for (name, m) in &seqs {
            if !check_corollary_45(m, &ks, &deltas).map_err(|e| e.to_string())? {
                return Err(format!("the product corollary fails for m = {name}, k = {ks:?}, δ = {deltas:?}"));
            }
        }
        done += 1;
    }
    Ok(format!("{partitions} partitions × 4 sequences; {COROLLARY_CASES} corollary instances × 4 sequences"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let m = GrowthSequence::factorial();
    let mut done = 0usize;
    let mut checked = 0usize;
    while done < INVERSE_CASES {
        let n = rng.gen_range(1..=2);
        let comps: Vec<Jet> = (0..n).map(|_| random_jet(&mut rng, n, INVERSE_DEPTH, 3, 5, false)).collect();
        let f = PolyMap::new(comps).map_err(|e| e.to_string())?;
        if resolvkit::linalg::determinant(&f.linear_part()).is_zero() {
            continue;
        }
        let rab = extract_rab(&f, &m).map_err(|e| e.to_string())?;
        let big = inverse_majorant(n, &rab.r, &rab.a, &rab.b, &m, INVERSE_DEPTH).map_err(|e| e.to_string())?;
        let g = invert_map(&f).map_err(|e| e.to_string())?;
        for (i, gi) in g.components().iter().enumerate() {
            for gamma in all_gammas(n, INVERSE_DEPTH.min(gi.truncation())) {
                if gamma.is_zero() {
                    continue;
                }
                let bound = big.coeff(i, &gamma);
                if !m.rational_le_scaled_term(&gi.coeff(&gamma).abs(), &bound, gamma.degree()).map_err(|e| e.to_string())? {
                    return Err(format!("map {done}: |g_{},{:?}| = {} exceeds {bound}·m_{}", i + 1, gamma.0, gi.coeff(&gamma), gamma.degree()));
                }
                checked += 1;
            }
        }
        done += 1;
    }
    Ok(format!("{INVERSE_CASES} maps, {checked} coefficients dominated, m_k = k!"))
}

fn random_center(rng: &mut ChaCha8Rng, n: usize) -> (Center, usize) {
    let mut idx: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    if idx.is_empty() {
        idx.push(rng.gen_range(0..n));
    }
    let i = idx[rng.gen_range(0..idx.len())];
    (Center::new(idx, n).expect("valid center"), i)
}

/// Both sides of the three identities, written out by hand in chart `i`.
fn lemma71_oracle(f: &Jet, c: &Center, i: usize, e: u32) -> Result<bool, String> {
    let n = f.nvars();
    let chart = ChartMap::new(c.clone(), i, n).map_err(|e| e.to_string())?;
    let t = f.truncation();
    let sigma: Vec<Jet> = (0..n)
        .map(|j| if c.contains(j) && j != i { &Jet::variable(n, t, i) * &Jet::variable(n, t, j) } else { Jet::variable(n, t, j) })
        .collect();
    let pull = |h: &Jet| -> Result<Jet, String> {
        let s: Vec<Jet> = sigma.iter().map(|x| x.truncate_to(h.truncation())).collect();
        substitute(h, &PolyMap::new(s).map_err(|e| e.to_string())?).map_err(|e| e.to_string())
    };
    let base = divide_power(&pull(f)?, i, e)?;
    debug_assert_eq!(blowup_pullback(f, &chart).nvars(), n);
    let yi = Jet::variable(n, base.truncation(), i);
    for j in 0..n {
        let lhs = divide_power(&pull(&f.partial_derivative(j).map_err(|e| e.to_string())?)?, i, e - 1)?;
        let dj = base.partial_derivative(j).map_err(|e| e.to_string())?;
        let rhs = if !c.contains(j) {
            &yi * &dj
        } else if j != i {
            dj
        } else {
            let mut r = &base.scale(&q(e as i64)) + &(&yi * &dj);
            for &k in c.indices().iter().filter(|&&k| k != i) {
                r = &r - &(&Jet::variable(n, base.truncation(), k) * &base.partial_derivative(k).map_err(|e| e.to_string())?);
            }
            r
        };
        let tt = lhs.truncation().min(rhs.truncation());
        if lhs.truncate_to(tt) != rhs.truncate_to(tt) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let mut done = 0usize;
    while done < LEMMA71_CASES {
        let n = rng.gen_range(1..=4);
        let (c, i) = random_center(&mut rng, n);
        let f = random_jet(&mut rng, n, LEMMA71_TRUNCATION, 5, 6, true);
        let lift = Jet::variable(n, LEMMA71_TRUNCATION, c.indices()[0]).pow(rng.gen_range(1..=2));
        let f = &f * &lift;
        let Some(mu) = order_along_center(&f, &c).finite() else { continue };
        let e = rng.gen_range(1..=mu);
        let report = lemma71_check(&f, &c, i, e).map_err(|e| e.to_string())?;
        if !report.all_hold() || !lemma71_oracle(&f, &c, i, e)? {
            return Err(format!("f = {f}, C = {:?}, i = {i}, e = {e}: {:?}", c.indices(), report.checks));
        }
        done += 1;
    }
    Ok(format!("{LEMMA71_CASES} instances, all three identities for every j, T = {LEMMA71_TRUNCATION}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let mut done = 0usize;
    while done < CONSISTENCY_CASES {
        let n = rng.gen_range(2..=3);
        let (c, _) = random_center(&mut rng, n);
        if c.codim() == n {
            continue;
        }
        let g = random_jet(&mut rng, n, 16, 5, 5, true);
        if g.is_zero() {
            continue;
        }
        let samples: Vec<Vec<BigRational>> = (0..CONSISTENCY_SAMPLES)
            .map(|_| {
                (0..n)
                    .map(|j| if c.contains(j) { q(0) } else { BigRational::new(rng.gen_range(-50i64..=50).into(), rng.gen_range(1i64..=7).into()) })
                    .collect()
            })
            .collect();
        let rep = center_order_consistency(&g, &c, &samples).map_err(|e| e.to_string())?;
        // independent minimum of pointwise orders
        let min = samples
            .iter()
            .map(|s| g.translate(s).map(|h| h.order().finite().unwrap_or(u32::MAX)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?
            .into_iter()
            .min()
            .unwrap_or(u32::MAX);
        if rep.center_order != OrderResult::Finite(min) || !rep.lower_bound_holds || !rep.attained {
            return Err(format!("g = {g}, C = {:?}: center order {:?}, sample minimum {min}", c.indices(), rep.center_order));
        }
        done += 1;
    }
    Ok(format!("{CONSISTENCY_CASES} pairs (g, C), {CONSISTENCY_SAMPLES} samples each"))
}

/// Blows up the origin of the plane by hand and reports the largest order
/// of the strict transform over both chart origins.
fn cusp_oracle_order_after_one() -> u32 {
    let t = 16;
    let x = Jet::variable(2, t, 0);
    let y = Jet::variable(2, t, 1);
    let cusp = &y.pow(2) - &x.pow(3);
    let charts = [vec![x.clone(), &x * &y], vec![&x * &y, y.clone()]];
    let mut worst = 0;
    for (k, sigma) in charts.into_iter().enumerate() {
        let pulled = substitute(&cusp, &PolyMap::new(sigma).expect("chart")).expect("substitution");
        let e = pulled.terms().map(|(a, _)| a[k]).min().unwrap_or(0);
        let strict = Jet::from_terms(2, t, pulled.terms().map(|(a, c)| {
            let mut b = a.clone();
            b.0[k] -= e;
            (b, c.clone())
        }));
        worst = worst.max(strict.order().finite().unwrap_or(u32::MAX));
    }
    worst
}

fn criterion_7() -> Outcome {
    let cfg = Config::default();
    let cusp = parse_polynomial("y^2 - x^3", cfg.truncation).map_err(|e| e.to_string())?;
    let t = resolve_hypersurface(&cusp.jet, &cfg).map_err(|e| e.to_string())?;
    let oracle = cusp_oracle_order_after_one();
    if oracle > 1 {
        return Err(format!("chart oracle: strict transform has order {oracle} after one blow-up"));
    }
    if t.smooth_depth() != CUSP_SMOOTH_AFTER || t.blowups != CUSP_BLOWUPS || t.max_blowup_depth() != CUSP_BLOWUPS || !t.all_leaves_pass() {
        return Err(format!(
            "cusp: smooth after {}, {} blow-ups, depth {}, pass {}",
            t.smooth_depth(),
            t.blowups,
            t.max_blowup_depth(),
            t.all_leaves_pass()
        ));
    }
    let node = parse_polynomial("y^2 - x^2", cfg.truncation).map_err(|e| e.to_string())?;
    let tn = resolve_hypersurface(&node.jet, &cfg).map_err(|e| e.to_string())?;
    if tn.blowups != NODE_BLOWUPS || !tn.all_leaves_pass() {
        return Err(format!("node: {} blow-ups, pass {}", tn.blowups, tn.all_leaves_pass()));
    }
    Ok(format!("cusp smooth after {CUSP_SMOOTH_AFTER}, verified after {CUSP_BLOWUPS}; node verified after {NODE_BLOWUPS}"))
}

fn criterion_8() -> Outcome {
    let mut phases = 0usize;
    for ex in EXAMPLES {
        let t = ex.run(&Config::default()).map_err(|e| format!("{}: {e}", ex.name))?;
        for node in &t.nodes {
            if let Some(ph) = &node.phase {
                if ph.used > ph.budget || ph.budget == 0 {
                    return Err(format!("{} node {}: {} blow-ups against budget {}", ex.name, node.id, ph.used, ph.budget));
                }
                phases += 1;
            }
        }
    }
    Ok(format!("{} bundled examples, {phases} monomial-case blow-ups within d!·|Ω|", EXAMPLES.len()))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let t = 16;
    let mut done = 0usize;
    let mut identities = 0usize;
    while done < COMMUTATION_CASES {
        let n = rng.gen_range(2..=4);
        let d = rng.gen_range(2..=4u32);
        let last = n - 1;
        // I ⊂ {0..n-2}, nonempty; center I ∪ {n-1}
        let mut idx: Vec<usize> = (0..last).filter(|_| rng.gen_bool(0.6)).collect();
        if idx.is_empty() {
            idx.push(rng.gen_range(0..last));
        }
        let i = idx[rng.gen_range(0..idx.len())];
        let xn = Jet::variable(n, t, last);
        let mut g = xn.pow(d);
        for qq in 0..d - 1 {
            let mut a = random_jet(&mut rng, n - 1, t, 2, 3, true).insert_variable(last);
            for _ in 0..(d - qq) {
                a = &a * &Jet::variable(n, t, idx[rng.gen_range(0..idx.len())]);
            }
            g = &g + &(&a * &xn.pow(qq));
        }
        let model = LocalModel::new(g.clone(), ExceptionalLedger::new()).map_err(|e| e.to_string())?;
        if !model.prepared || model.d != d {
            return Err(format!("generated model {g} is not prepared of order {d}"));
        }
        let mut full = idx.clone();
        full.push(last);
        let chart = ChartMap::new(Center::new(full, n).map_err(|e| e.to_string())?, i, n).map_err(|e| e.to_string())?;
        let (e, g1) = strict_transform_hypersurface(&g, &chart).map_err(|e| e.to_string())?;
        if e != d {
            return Err(format!("{g}: exponent {e} along a center in the equimultiple locus"));
        }
        let before = coefficient_data(&model).map_err(|e| e.to_string())?;
        let chart_n = ChartMap::new(Center::new(idx.clone(), n - 1).map_err(|e| e.to_string())?, i, n - 1).map_err(|e| e.to_string())?;
        for (qq, c0) in before.c.iter().enumerate() {
            // c_q of the strict transform, taken directly with the same d
            let mut c1 = g1.clone();
            for _ in 0..qq {
                c1 = c1.partial_derivative(last).map_err(|e| e.to_string())?;
            }
            let c1 = c1.restrict_to_hyperplane(last).map_err(|e| e.to_string())?;
            let rhs = divide_power(&blowup_pullback(&c0.f.jet, &chart_n), i, c0.f.mark)?;
            let tt = rhs.truncation().min(c1.truncation());
            if c0.f.mark != d - qq as u32 || c1.truncate_to(tt) != rhs.truncate_to(tt) {
                return Err(format!("{g}: {} after blow-up is {c1} but the transform gives {rhs}", c0.label));
            }
            identities += 1;
        }
        done += 1;
    }
    Ok(format!("{COMMUTATION_CASES} prepared models, {identities} identities c_q(g') = y^-(d-q) c_q(g)∘σ̃"))
}

fn criterion_10() -> Outcome {
    let verdict = |m: &GrowthSequence| quasianalytic_test(m).map_err(|e| e.to_string());
    if verdict(&GrowthSequence::constant())? != SequenceVerdict::Quasianalytic {
        return Err("constant sequence is not quasianalytic".into());
    }
    for (name, m) in sequences().into_iter().skip(1) {
        if verdict(&m)? != SequenceVerdict::NotQuasianalytic {
            return Err(format!("m = {name} should not be quasianalytic"));
        }
    }
    for (name, m) in sequences() {
        let lc = is_log_convex(&m, 30).map_err(|e| e.to_string())?.holds;
        let cons = log_convexity_consequences(&m, 12).map_err(|e| e.to_string())?.holds();
        let closed = derivation_closure_test(&m).map_err(|e| e.to_string())? == DerivationVerdict::Closed(true);
        if !(lc && cons && closed) {
            return Err(format!("m = {name}: log-convex {lc}, consequences {cons}, derivation-closed {closed}"));
        }
    }
    let prefix: Vec<BigRational> = [1, 1, 2, 6, 24, 120].iter().map(|&k| q(k)).collect();
    let custom = GrowthSequence::custom(prefix.clone()).map_err(|e| e.to_string())?;
    let expected: BigRational = (0..prefix.len() - 1).map(|k| &prefix[k] / (&prefix[k + 1] * q(k as i64 + 1))).sum();
    match verdict(&custom)? {
        SequenceVerdict::InconclusiveAtDepth { depth, partial_sum } if depth == 5 && partial_sum == expected.to_string() => {}
        other => return Err(format!("custom prefix: {other:?}, expected partial sum {expected}")),
    }
    if partial_quasianalytic_sum(&custom, 5).map_err(|e| e.to_string())? != expected {
        return Err("partial sum mismatch".into());
    }
    if !matches!(derivation_closure_test(&custom).map_err(|e| e.to_string())?, DerivationVerdict::Inconclusive { .. }) {
        return Err("custom prefix: derivation closure should be inconclusive".into());
    }
    Ok(format!("4 families classified; custom prefix inconclusive with partial sum {expected}"))
}

fn criterion_11() -> Outcome {
    for ex in EXAMPLES {
        let serial = Config::default();
        let parallel = Config { parallel: true, ..Config::default() };
        let runs: Vec<String> = [&serial, &serial, &parallel, &parallel]
            .iter()
            .map(|c| ex.run(c).map(|t| t.to_json()).map_err(|e| format!("{}: {e}", ex.name)))
            .collect::<Result<_, _>>()?;
        if runs.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("{}: JSON differs between runs", ex.name));
        }
    }
    Ok(format!("{} bundled examples, 2 serial + 2 parallel runs byte-identical", EXAMPLES.len()))
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as `--list`; only run on a plain
    // invocation or an explicit filter.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Faà di Bruno coefficients equal substitution", criterion_1),
        ("majorant H_γ equals the F∘G expansion", criterion_2),
        ("Childress inequality and its corollary", criterion_3),
        ("inverse majorant dominates the inverse map", criterion_4),
        ("derivative identities under blow-up", criterion_5),
        ("order along a center is the generic pointwise order", criterion_6),
        ("cusp and node end to end", criterion_7),
        ("monomial-phase budget d!·|Ω|", criterion_8),
        ("coefficient data commute with blow-up", criterion_9),
        ("Denjoy-Carleman classifications", criterion_10),
        ("deterministic JSON", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !args.is_empty() && !args.iter().any(|a| a == &id.to_string() || name.contains(a.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {id:>2}: {name} ({detail}) [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id:>2}: {name}: {detail} [{secs:.2}s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
