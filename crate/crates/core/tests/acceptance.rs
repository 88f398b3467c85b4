//! Acceptance suite: one PASS/FAIL line per criterion, then a single assert.
//!
//! Run with `cargo test -p coverlift --test acceptance -- --nocapture` to see
//! the report.

use std::time::{Duration, Instant};

use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coverlift::bench::{performance_profile, run_bench, write_csv, BenchSpec, NamedConfig, ProfileRow};
use coverlift::bnc::{solve, BncConfig, LiftingChoice};
use coverlift::cover_gen::{
    bang_for_buck_cover, contiguous_covers, default_cover, heaviest_contiguous_cover, spread_covers, CoverRoutine,
    LpPoint,
};
use coverlift::instances::{gen_mkp, IpInstance, MkpKind};
use coverlift::oracles::{cut_valid, facet_report, ip_optimum, lifting_fn_bruteforce, superadditivity_check, tilde_g_check};
use coverlift::{
    classify_domination, eval_g_k, eval_g_w, g_k_piecewise, g_w_piecewise, gen_domination_gap_cover, gns_facet_condition,
    lift_gns, lift_pc, pc_facet_condition, raw_w_cut, CoverParams, DominationVerdict, KnapsackRow, LiftParam, Location,
    Rational, TabulatedW,
};

type Outcome = Result<String, String>;

fn q(n: i64) -> Rational {
    Rational::from(n as i128)
}

fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn running_example(extra: &[i64]) -> CoverParams {
    let mut w = vec![16, 14, 13, 9];
    w.extend_from_slice(extra);
    let row = KnapsackRow::new(w, 44).unwrap();
    CoverParams::new(&row, &[0, 1, 2, 3]).unwrap()
}

fn tail(coefficients: &[Rational]) -> Vec<Rational> {
    coefficients[4..].to_vec()
}

fn criterion_1() -> Outcome {
    let p = running_example(&[]);
    let mus: Vec<i64> = (1..=4).map(|h| p.mu(h)).collect();
    let rhos: Vec<i64> = (1..=3).map(|h| p.rho(h)).collect();
    ensure(mus == [16, 30, 43, 52], || format!("mu = {mus:?}"))?;
    ensure(p.lambda() == 8, || format!("lambda = {}", p.lambda()))?;
    ensure(rhos == [6, 5, 1], || format!("rho = {rhos:?}"))?;
    ensure(p.mu(4) == p.lambda() + p.row().capacity(), || "mu_4 != lambda + b".into())?;
    Ok("mu = (16, 30, 43, 52), lambda = 8, rho = (6, 5, 1)".into())
}

fn criterion_2() -> Outcome {
    let cases: [(&[i64], [Rational; 3], [Rational; 3], DominationVerdict); 4] = [
        (&[9, 10, 23], [r(1, 6), r(1, 3), r(4, 3)], [r(1, 2), r(1, 2), r(3, 2)], DominationVerdict::PcStrictlyDominates),
        (&[11, 17, 24], [r(1, 2), q(1), r(3, 2)], [r(1, 2), q(1), r(3, 2)], DominationVerdict::Identical),
        (&[12, 13, 26], [r(2, 3), r(5, 6), r(11, 6)], [r(1, 2), r(1, 2), r(3, 2)], DominationVerdict::GnsStrictlyDominates),
        (&[9, 13, 24], [r(1, 6), r(5, 6), r(3, 2)], [r(1, 2), r(1, 2), r(3, 2)], DominationVerdict::Incomparable),
    ];
    for (i, (extra, gns, pc, verdict)) in cases.iter().enumerate() {
        let p = running_example(extra);
        let got_gns = tail(&lift_gns(&p).coefficients);
        let got_pc = tail(&lift_pc(&p).coefficients);
        ensure(got_gns == gns, || format!("case {}: GNS {got_gns:?}", i + 1))?;
        ensure(got_pc == pc, || format!("case {}: PC {got_pc:?}", i + 1))?;
        let got = classify_domination(&p).map_err(|e| e.to_string())?;
        ensure(got == *verdict, || format!("case {}: verdict {got}", i + 1))?;
    }
    Ok("4 cases: coefficients exact, verdicts PC/IDENTICAL/GNS/INCOMPARABLE".into())
}

fn criterion_3() -> Outcome {
    let p = running_example(&[9, 10, 11, 23]);
    let pc = lift_pc(&p);
    let gns = lift_gns(&p);
    ensure(tail(&pc.coefficients) == [r(1, 2), r(1, 2), r(1, 2), r(3, 2)] && pc.rhs == q(3), || format!("PC cut {pc}"))?;
    ensure(tail(&gns.coefficients) == [r(1, 6), r(1, 3), r(1, 2), r(4, 3)], || format!("GNS cut {gns}"))?;
    let pc_report = facet_report(p.row(), &pc).map_err(|e| e.to_string())?;
    ensure(pc_report.is_facet && pc_report.affine_rank == 7, || format!("PC report {pc_report:?}"))?;
    let gns_report = facet_report(p.row(), &gns).map_err(|e| e.to_string())?;
    ensure(gns_report.is_valid && !gns_report.is_facet, || format!("GNS rank {}", gns_report.affine_rank))?;
    Ok(format!("PC facet (rank 7, {} tight points); GNS valid, rank {}", pc_report.tight_points.len(), gns_report.affine_rank))
}

fn criterion_4() -> Outcome {
    let row = KnapsackRow::new(vec![112, 108, 107, 106, 102, 84, 82], 268).unwrap();
    let p = CoverParams::new(&row, &[1, 2, 3]).unwrap();
    let w = TabulatedW::logistic(52.0, 0.9, 10_000).map_err(|e| e.to_string())?;
    let cut = raw_w_cut(&p, &w).map_err(|e| e.to_string())?;
    let c84 = cut.coefficients[5].to_f64().unwrap();
    let c82 = cut.coefficients[6].to_f64().unwrap();
    ensure((c84 - 0.93).abs() <= 0.01 && (c82 - 0.71).abs() <= 0.01, || format!("coefficients {c84}, {c82}"))?;
    let check = cut_valid(&row, &cut).map_err(|e| e.to_string())?;
    let expected = [false, false, false, false, true, true, true];
    ensure(check.witness() == Some(&expected[..]), || format!("validity {check:?}"))?;

    let g = g_w_piecewise(&p, &w).map_err(|e| e.to_string())?;
    let cex = superadditivity_check(&g, 268.0).map_err(|e| e.to_string())?.ok_or("no counterexample found")?;
    ensure(cex.max_violation >= 0.4, || format!("max violation {}", cex.max_violation))?;
    let g82 = eval_g_w(&p, &w, 82.0).unwrap();
    let near = 2.0 * g82 - eval_g_w(&p, &w, 164.0).unwrap();
    ensure(near >= 0.4, || format!("violation at (82, 82) is {near}"))?;
    Ok(format!(
        "INVALID, witness (0,0,0,0,1,1,1); violation at (82,82) = {near:.3}, largest {:.3} at ({:.2}, {:.2})",
        cex.max_violation, cex.vertex.0, cex.vertex.1
    ))
}

/// Random minimal cover (t <= 8, weights <= 200) with `mu_1 - lambda >= rho_1`.
fn random_admissible_cover(rng: &mut ChaCha8Rng) -> CoverParams {
    loop {
        let t = rng.gen_range(2..=8);
        let weights: Vec<i64> = (0..t).map(|_| rng.gen_range(1..=200)).collect();
        let lambda = rng.gen_range(1..=*weights.iter().min().unwrap());
        let capacity = weights.iter().sum::<i64>() - lambda;
        let row = KnapsackRow::new(weights, capacity).unwrap();
        let p = CoverParams::new(&row, &(0..t).collect::<Vec<_>>()).unwrap();
        if p.admits_all_slopes() {
            return p;
        }
    }
}

fn random_slope(rng: &mut ChaCha8Rng, rho1: i64) -> Rational {
    if rho1 == 0 {
        return Rational::zero();
    }
    let d: i128 = rng.gen_range(1..=20);
    r(rng.gen_range(0..=d), d * rho1 as i128)
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked_points = 0usize;
    for case in 0..1000 {
        let p = random_admissible_cover(&mut rng);
        let b = p.row().capacity();
        let breaks = p.interval_partition().breakpoints();
        let mut points: Vec<Rational> = breaks.iter().map(|&z| q(z)).collect();
        points.extend(breaks.windows(2).map(|w| r((w[0] + w[1]) as i128, 2)));
        let cover = p.cover();
        let kr1 = |k: Rational| k * q(p.rho1());
        for _ in 0..5 {
            let k = random_slope(&mut rng, p.rho1());
            let g = g_k_piecewise(&p, LiftParam::Slope(k)).map_err(|e| e.to_string())?;
            if let Some(cex) = superadditivity_check(&g, q(b)).map_err(|e| e.to_string())? {
                return Err(format!("case {case}: k = {k} not superadditive at ({}, {})", cex.z1, cex.z2));
            }
            for &z in &points {
                let gk = eval_g_k(&p, LiftParam::Slope(k), z).map_err(|e| e.to_string())?;
                let f = lifting_fn_bruteforce(p.row(), &cover, z).map_err(|e| e.to_string())?;
                ensure(gk <= q(f as i64), || format!("case {case}: g_k({z}) = {gk} > f = {f}"))?;
                let gns = eval_g_k(&p, LiftParam::Gns, z).unwrap();
                let pc = eval_g_k(&p, LiftParam::Pc, z).unwrap();
                let combo = kr1(k) * gns + (Rational::one() - kr1(k)) * pc;
                ensure(gk == combo, || format!("case {case}: identity fails at z = {z}, k = {k}"))?;
                checked_points += 1;
            }
        }
    }
    Ok(format!("1000 covers x 5 slopes superadditive; {checked_points} point checks of g_k <= f and the identity"))
}

fn random_lengths(rng: &mut ChaCha8Rng, len: usize, allow_zero: bool) -> Vec<i64> {
    let lo = if allow_zero { 0 } else { 1 };
    let mut v: Vec<i64> = (0..len).map(|_| rng.gen_range(lo..=30)).collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut passes = 0;
    while passes < 200 {
        let len = rng.gen_range(1..=6);
        let v = random_lengths(&mut rng, len, true);
        let u = random_lengths(&mut rng, len, true);
        if v[0] == 0 || u[0] < v[0] || u.iter().zip(&v).any(|(a, b)| a + b == 0) {
            continue;
        }
        let k = random_slope(&mut rng, v[0]);
        let horizon = rng.gen_range(1..=len);
        if let Some(cex) = tilde_g_check(&u, &v, k, horizon).map_err(|e| e.to_string())? {
            return Err(format!("u = {u:?}, v = {v:?}, k = {k}: violation at ({}, {})", cex.z1, cex.z2));
        }
        passes += 1;
    }
    let mut violated = 0;
    let mut tried = 0;
    while tried < 200 {
        let len = rng.gen_range(1..=6);
        let v = random_lengths(&mut rng, len, true);
        let u = random_lengths(&mut rng, len, true);
        if v[0] == 0 || u[0] >= v[0] || u.iter().zip(&v).any(|(a, b)| a + b == 0) {
            continue;
        }
        tried += 1;
        if tilde_g_check(&u, &v, Rational::zero(), len).map_err(|e| e.to_string())?.is_some() {
            violated += 1;
        }
    }
    ensure(violated * 10 >= 9 * tried, || format!("only {violated}/{tried} violated with u_1 < v_1"))?;
    Ok(format!("200/200 superadditive with u_1 >= v_1; {violated}/{tried} violated with u_1 < v_1, k = 0"))
}

fn criterion_7() -> Outcome {
    let mut parts = Vec::new();
    for eps in [r(1, 10), r(1, 100)] {
        for t in [2, 5] {
            let inst = gen_domination_gap_cover(eps, t).map_err(|e| e.to_string())?;
            let p = CoverParams::new(&inst.row, &inst.cover).map_err(|e| e.to_string())?;
            ensure(p.admits_all_slopes(), || format!("eps = {eps}, t = {t}: PC lifting not admissible"))?;
            let pc = lift_pc(&p).coefficients[inst.gap_item];
            let gns = lift_gns(&p).coefficients[inst.gap_item];
            ensure(pc == r(1, 2) && gns <= eps, || format!("eps = {eps}, t = {t}: PC {pc}, GNS {gns}"))?;
            parts.push(format!("({eps},{t}): GNS {gns}"));
        }
    }
    Ok(format!("PC = 1/2 on the gap item; {}", parts.join(", ")))
}

/// Weights in `[1, b]` that may be added to the row without breaking the
/// sufficient PC facet condition.
fn pc_compatible_weights(p: &CoverParams) -> (Vec<i64>, Vec<i64>) {
    let part = p.interval_partition();
    let half = r(p.rho1() as i128, 2);
    let mut in_s1 = Vec::new();
    let mut others = Vec::new();
    for a in 1..=p.row().capacity() {
        match part.locate(q(a)) {
            Some(Location::Sloped(h)) if q(p.rho(h)) > half && q(a) <= q(p.sloped_end(h)) - half => {
                if h == 1 {
                    in_s1.push(a);
                } else {
                    others.push(a);
                }
            }
            Some(Location::Flat(h)) if a >= p.mu(h) => others.push(a),
            _ => {}
        }
    }
    (in_s1, others)
}

fn random_cover_row(rng: &mut ChaCha8Rng, t: usize, max_weight: i64) -> (Vec<i64>, i64) {
    let weights: Vec<i64> = (0..t).map(|_| rng.gen_range(2..=max_weight)).collect();
    let lambda = rng.gen_range(1..=*weights.iter().min().unwrap());
    let capacity = weights.iter().sum::<i64>() - lambda;
    (weights, capacity)
}

fn extend(weights: &[i64], capacity: i64, extra: &[i64]) -> CoverParams {
    let mut all = weights.to_vec();
    all.extend_from_slice(extra);
    let row = KnapsackRow::new(all, capacity).unwrap();
    CoverParams::new(&row, &(0..weights.len()).collect::<Vec<_>>()).unwrap()
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pc_done = 0;
    let mut pc_items = 0;
    while pc_done < 200 {
        let t = rng.gen_range(2..=6);
        let (weights, capacity) = random_cover_row(&mut rng, t, 40);
        let base = extend(&weights, capacity, &[]);
        if !base.admits_all_slopes() || base.rho1() == 0 {
            continue;
        }
        let (in_s1, others) = pc_compatible_weights(&base);
        if in_s1.is_empty() {
            continue;
        }
        let room = 12 - t;
        if room < 3 {
            continue;
        }
        let mut extra: Vec<i64> = (0..3).map(|_| in_s1[rng.gen_range(0..in_s1.len())]).collect();
        let pool: Vec<i64> = in_s1.iter().chain(&others).copied().collect();
        for _ in 0..rng.gen_range(0..=room - 3) {
            extra.push(pool[rng.gen_range(0..pool.len())]);
        }
        let p = extend(&weights, capacity, &extra);
        ensure(pc_facet_condition(&p), || format!("constructed row {} misses the PC condition", p.row()))?;
        let report = facet_report(p.row(), &lift_pc(&p)).map_err(|e| e.to_string())?;
        ensure(report.is_facet, || format!("PC cut not facet on {} (rank {})", p.row(), report.affine_rank))?;
        pc_done += 1;
        pc_items += p.row().len();
    }

    let mut gns_done = 0;
    while gns_done < 200 {
        let t = rng.gen_range(2..=6);
        let (weights, capacity) = random_cover_row(&mut rng, t, 40);
        let base = extend(&weights, capacity, &[]);
        if !base.admits_all_slopes() {
            continue;
        }
        let ends: Vec<i64> = base.interval_partition().s_intervals.iter().map(|(_, s)| s.hi).collect();
        if ends.is_empty() {
            continue;
        }
        let part = base.interval_partition();
        let flat: Vec<i64> =
            (1..=capacity).filter(|&a| matches!(part.locate(q(a)), Some(Location::Flat(_)))).collect();
        let mut extra = vec![ends[rng.gen_range(0..ends.len())]];
        for _ in 0..rng.gen_range(0..=12 - t - 1) {
            extra.push(if rng.gen_bool(0.5) { ends[rng.gen_range(0..ends.len())] } else { flat[rng.gen_range(0..flat.len())] });
        }
        let p = extend(&weights, capacity, &extra);
        ensure(gns_facet_condition(&p), || format!("constructed row {} misses the GNS condition", p.row()))?;
        let gns = lift_gns(&p);
        let pc = lift_pc(&p);
        ensure(gns.dominates(&pc) && gns.coefficients != pc.coefficients, || format!("GNS does not strictly dominate PC on {}", p.row()))?;
        let report = facet_report(p.row(), &gns).map_err(|e| e.to_string())?;
        ensure(report.is_facet, || format!("GNS cut not facet on {} (rank {})", p.row(), report.affine_rank))?;
        gns_done += 1;
    }
    Ok(format!("200/200 PC facets (avg n = {:.1}); 200/200 GNS facets strictly dominating PC", pc_items as f64 / 200.0))
}

fn criterion_9() -> Outcome {
    let row = KnapsackRow::new(vec![10, 9, 8, 7, 6, 6, 5, 4], 26).unwrap();
    let point = LpPoint::new(vec![0.1, 0.8, 0.7, 0.4, 0.0, 1.0, 0.2, 0.8]);
    let c = [5, 7, 9, 1, 2, 6, 6, 5];
    let one_based = |s: &Vec<usize>| s.iter().map(|j| j + 1).collect::<Vec<_>>();
    let all = |sets: Vec<Vec<usize>>| sets.iter().map(one_based).collect::<Vec<_>>();
    let single = |set: Option<Vec<usize>>| set.as_ref().map(one_based);
    let e = |e: coverlift::CoverError| e.to_string();
    let contiguous = all(contiguous_covers(&row, &point).map_err(e)?);
    let spread = all(spread_covers(&row, &point).map_err(e)?);
    let heaviest = single(heaviest_contiguous_cover(&row, &point).map_err(e)?);
    let default = single(default_cover(&row, &point).map_err(e)?);
    let bang = single(bang_for_buck_cover(&row, &point, &c).map_err(e)?);
    ensure(contiguous == [vec![1, 2, 3], vec![2, 3, 4, 6], vec![3, 4, 6, 7, 8]], || format!("contiguous {contiguous:?}"))?;
    ensure(spread == [vec![1, 4, 6, 7], vec![2, 4, 6, 7], vec![3, 4, 6, 7, 8]], || format!("spread {spread:?}"))?;
    ensure(heaviest == Some(vec![1, 2, 3]), || format!("heaviest {heaviest:?}"))?;
    ensure(default == Some(vec![2, 3, 6, 8]), || format!("default {default:?}"))?;
    ensure(bang == Some(vec![2, 3, 6, 7]), || format!("bang-for-buck {bang:?}"))?;
    Ok("all five routines reproduce the documented covers".into())
}

fn solver_instances() -> Vec<IpInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    (0..50)
        .map(|i| {
            let n = rng.gen_range(8..=30);
            let m = rng.gen_range(1..=5);
            let kind = if i % 2 == 0 { MkpKind::Uncorrelated } else { MkpKind::WeaklyCorrelated };
            gen_mkp(kind, n, m, 1000 + i).unwrap()
        })
        .collect()
}

struct SolverRuns {
    runs: usize,
    cuts_added: usize,
    cuts_validated: usize,
    failures: usize,
}

fn criterion_10(runs: &mut SolverRuns) -> Outcome {
    let routines = [CoverRoutine::Contiguous, CoverRoutine::Spread, CoverRoutine::Default];
    for inst in solver_instances() {
        let (rows, rhs) = inst.row_matrix();
        let (opt, _) = ip_optimum(&inst.objective, &rows, &rhs)
            .map_err(|e| format!("{}: oracle {e}", inst.name))?
            .ok_or_else(|| format!("{}: oracle says infeasible", inst.name))?;
        for lifting in LiftingChoice::ALL {
            for routine in routines {
                let config = BncConfig { lifting, cover_routines: vec![routine], validate_cuts: true, ..BncConfig::default() };
                let res = solve(&inst, &config).map_err(|e| format!("{}: {e}", inst.name))?;
                ensure(res.stats.proven_optimal && res.optimum == Some(opt), || {
                    format!("{} {lifting}/{routine}: got {:?}, oracle {opt}", inst.name, res.optimum)
                })?;
                runs.runs += 1;
                runs.cuts_added += res.stats.cuts_added;
                runs.cuts_validated += res.stats.cuts_validated;
                runs.failures += res.stats.cut_validation_failures;
            }
        }
    }
    Ok(format!("{} runs (50 instances x 4 liftings x 3 routines) match the oracle optimum", runs.runs))
}

fn criterion_11(runs: &SolverRuns) -> Outcome {
    ensure(runs.runs > 0, || "criterion 10 did not run".into())?;
    ensure(runs.failures == 0, || format!("{} invalid cuts", runs.failures))?;
    ensure(runs.cuts_validated == runs.cuts_added, || {
        format!("only {} of {} added cuts were checked", runs.cuts_validated, runs.cuts_added)
    })?;
    Ok(format!("{} added cuts checked, 0 invalid", runs.cuts_validated))
}

fn median(mut xs: Vec<usize>) -> f64 {
    xs.sort_unstable();
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2] as f64
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) as f64 / 2.0
    }
}

fn criterion_12() -> Outcome {
    let instances: Vec<IpInstance> =
        (1..=20).map(|seed| gen_mkp(MkpKind::WeaklyCorrelated, 40, 5, seed).unwrap()).collect();
    let none = NamedConfig {
        name: "none".into(),
        config: BncConfig { lifting: LiftingChoice::None, ..BncConfig::default() },
    };
    let pc = NamedConfig {
        name: "pc-contiguous".into(),
        config: BncConfig {
            lifting: LiftingChoice::Pc,
            cover_routines: vec![CoverRoutine::Contiguous],
            per_node_cut_limit: 10,
            ..BncConfig::default()
        },
    };
    let spec = BenchSpec {
        instances,
        configs: vec![none, pc],
        thresholds: coverlift::bench::DEFAULT_THRESHOLDS.to_vec(),
    };
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let records = run_bench(&spec, jobs).map_err(|e| e.to_string())?;
    ensure(records.iter().all(|rec| rec.proven_optimal), || "an instance was not solved to optimality".into())?;
    let trees = |name: &str| records.iter().filter(|rec| rec.config == name).map(|rec| rec.tree_size).collect::<Vec<_>>();
    let (m_none, m_pc) = (median(trees("none")), median(trees("pc-contiguous")));
    ensure(m_pc <= m_none, || format!("median tree size PC {m_pc} > none {m_none}"))?;

    let profile = performance_profile(&records, &spec.configs, &spec.thresholds);
    let mut csv = Vec::new();
    write_csv(&profile, &mut csv).map_err(|e| e.to_string())?;
    let mut reader = csv::Reader::from_reader(csv.as_slice());
    let rows: Vec<ProfileRow> = reader.deserialize().collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    ensure(rows.len() == spec.configs.len() * spec.thresholds.len(), || format!("{} profile rows", rows.len()))?;
    for cfg in &spec.configs {
        let series: Vec<&ProfileRow> = rows.iter().filter(|row| row.config == cfg.name).collect();
        ensure(series.windows(2).all(|w| w[0].threshold < w[1].threshold && w[0].solved <= w[1].solved), || {
            format!("profile for {} is not monotone", cfg.name)
        })?;
    }
    Ok(format!("median tree size: PC + contiguous {m_pc} <= none {m_none}; profile CSV monotone"))
}

#[test]
fn acceptance_criteria() {
    let mut solver_runs = SolverRuns { runs: 0, cuts_added: 0, cuts_validated: 0, failures: 0 };
    let mut failed = Vec::new();
    let mut report = |id: usize, budget: Duration, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > budget => Err(format!("{msg}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {id:>2}: PASS [{elapsed:.2?}] {msg}"),
            Err(msg) => {
                println!("criterion {id:>2}: FAIL [{elapsed:.2?}] {msg}");
                failed.push(id);
            }
        }
    };
    let ms = Duration::from_millis;
    let secs = Duration::from_secs;
    report(1, ms(1), &mut criterion_1);
    report(2, ms(1), &mut criterion_2);
    report(3, ms(100), &mut criterion_3);
    report(4, secs(1), &mut criterion_4);
    report(5, secs(60), &mut criterion_5);
    report(6, secs(60), &mut criterion_6);
    report(7, ms(4), &mut criterion_7);
    report(8, secs(300), &mut criterion_8);
    report(9, ms(1), &mut criterion_9);
    report(10, secs(600), &mut || criterion_10(&mut solver_runs));
    report(11, secs(1), &mut || criterion_11(&solver_runs));
    report(12, secs(900), &mut criterion_12);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
