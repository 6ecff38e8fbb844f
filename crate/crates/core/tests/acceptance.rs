//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance`. Exits nonzero if any criterion fails.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ontosearch::envmodel::{
    episode_rng, sample_placements, Cell, Environment, GridMap, LocationTuple, RngStream, RoomLabel,
};
use ontosearch::harness::{
    study_ablation, study_compare, study_enhancement, study_initial_estimates, AblationVariant, ExperimentConfig,
};
use ontosearch::ontology::{observe_update, similarity, wilson_halfwidth, BeliefMatrix, EmpiricalCounts, PriorKind};
use ontosearch::planner::{dbu, open_tour_cost, solve_open_tsp, PlannerKind, SearchSpace};
use ontosearch::semantic_map::min_cost_matching;

const CASES: usize = 10_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_row(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

fn tuples(n: usize) -> Vec<LocationTuple> {
    let cats = ["bed", "shelf", "sofa", "table", "tv"];
    let mut v: Vec<LocationTuple> = cats
        .iter()
        .flat_map(|c| RoomLabel::ALL.iter().map(move |r| LocationTuple::new(*c, *r)))
        .collect();
    v.sort();
    v.truncate(n);
    v
}

fn c1_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut failures = Vec::new();

    // belief normalization under learning
    for _ in 0..CASES {
        let n = rng.gen_range(2..=12);
        let ts = tuples(n);
        let row = random_row(&mut rng, n);
        let b = BeliefMatrix::new(vec!["o".into()], ts.clone(), row).unwrap();
        let obs = &ts[rng.gen_range(0..n)];
        let beta = rng.gen_range(0.0..=1.0);
        let ep = rng.gen_range(1..500);
        let out = observe_update(&b, "o", obs, beta, ep).unwrap();
        let s: f64 = out.row(0).iter().sum();
        if (s - 1.0).abs() > 1e-9 || out.row(0).iter().any(|p| *p < 0.0) {
            failures.push("normalization");
            break;
        }
    }

    // DBU ratio preservation
    for _ in 0..CASES {
        let n = rng.gen_range(3..=12);
        let ts = tuples(n);
        let row = random_row(&mut rng, n);
        let b = BeliefMatrix::new(vec!["o".into()], ts.clone(), row.clone()).unwrap();
        let v = rng.gen_range(0..n);
        let out = dbu(&b, &ts[v], &BTreeSet::new()).unwrap();
        let (i, j) = loop {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i != v && j != v && i != j {
                break (i, j);
            }
        };
        let lhs = out.row(0)[i] / out.row(0)[j];
        let rhs = row[i] / row[j];
        if ((lhs - rhs) / rhs).abs() > 1e-12 || out.row(0)[v] != 0.0 {
            failures.push("dbu ratio");
            break;
        }
    }

    // similarity symmetry and range
    let all = tuples(20);
    for _ in 0..CASES {
        let a = &all[rng.gen_range(0..all.len())];
        let b = &all[rng.gen_range(0..all.len())];
        let s = similarity(a, b);
        if s != similarity(b, a) || s > 2 || (s == 0) != (a == b) {
            failures.push("similarity");
            break;
        }
    }

    // Wilson monotonicity: shrinks with N, grows toward p = 0.5
    for _ in 0..CASES {
        let p = rng.gen_range(0.0..=1.0);
        let n = rng.gen_range(1..10_000u32);
        let q = rng.gen_range(0.0..=1.0);
        let closer = (q - 0.5f64).abs() < (p - 0.5f64).abs();
        let ok_n = wilson_halfwidth(p, n + 1, 1.96) <= wilson_halfwidth(p, n, 1.96);
        let ok_p = !closer || wilson_halfwidth(q, n, 1.96) >= wilson_halfwidth(p, n, 1.96) - 1e-15;
        if !(ok_n && ok_p) {
            failures.push("wilson");
            break;
        }
    }

    // metric axioms of grid distance on the reference map
    let env = Environment::reference();
    let space = SearchSpace::new(&env);
    let free: Vec<Cell> = env.map().free_cells().collect();
    let nt = env.tuples().len();
    for _ in 0..CASES {
        let a = rng.gen_range(0..nt);
        let b = rng.gen_range(0..nt);
        let c = free[rng.gen_range(0..free.len())];
        let ab = space.tuple_distance(a, b).unwrap();
        let ba = space.tuple_distance(b, a).unwrap();
        let ca = space.distance_to(c, a).unwrap();
        let cb = space.distance_to(c, b).unwrap();
        let tri = ab <= ca + cb + 1e-12;
        let ident = (a == b) == (ab == 0.0);
        if ab != ba || !tri || !ident || ab < 0.0 {
            failures.push("metric");
            break;
        }
    }

    // determinism of seeded placements
    for i in 0..CASES {
        let seed = rng.gen::<u64>();
        let ep = (i as u32 % 200) + 1;
        let w1 = sample_placements(&env, ep, &mut episode_rng(seed, RngStream::Placements, ep)).unwrap();
        let w2 = sample_placements(&env, ep, &mut episode_rng(seed, RngStream::Placements, ep)).unwrap();
        if w1 != w2 {
            failures.push("determinism");
            break;
        }
    }
    outcome(
        failures.is_empty(),
        format!("6 properties x {CASES} cases; failures: {failures:?}"),
    )
}

fn brute_tsp(start: &[f64], pair: &[Vec<f64>], u: &[f64]) -> f64 {
    fn rec(order: &mut Vec<usize>, left: &mut Vec<usize>, start: &[f64], pair: &[Vec<f64>], u: &[f64], best: &mut f64) {
        if left.is_empty() {
            let c = open_tour_cost(order, start, pair, u);
            if c < *best {
                *best = c;
            }
            return;
        }
        for i in 0..left.len() {
            let j = left.remove(i);
            order.push(j);
            rec(order, left, start, pair, u, best);
            order.pop();
            left.insert(i, j);
        }
    }
    let mut best = f64::INFINITY;
    rec(
        &mut Vec::new(),
        &mut (0..start.len()).collect(),
        start,
        pair,
        u,
        &mut best,
    );
    best
}

fn brute_assignment(costs: &[Vec<f64>]) -> f64 {
    let rows = costs.len();
    let cols = costs[0].len();
    let k = rows.min(cols);
    let mut best = f64::INFINITY;
    // choose an injective map from the smaller side
    fn rec(
        r: usize,
        used: &mut Vec<bool>,
        acc: &mut Vec<(usize, usize)>,
        costs: &[Vec<f64>],
        k: usize,
        best: &mut f64,
    ) {
        let rows = costs.len();
        if acc.len() == k {
            let mut sorted = acc.clone();
            sorted.sort_unstable();
            let c: f64 = sorted.iter().map(|&(r, c)| costs[r][c]).sum();
            if c < *best {
                *best = c;
            }
            return;
        }
        if r == rows || rows - r < k - acc.len() {
            return;
        }
        // skip row r
        rec(r + 1, used, acc, costs, k, best);
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                acc.push((r, c));
                rec(r + 1, used, acc, costs, k, best);
                acc.pop();
                used[c] = false;
            }
        }
    }
    rec(0, &mut vec![false; cols], &mut Vec::new(), costs, k, &mut best);
    best
}

fn dijkstra(map: &GridMap, a: Cell, b: Cell) -> Option<usize> {
    let mut dist = vec![usize::MAX; map.width() * map.height()];
    let mut heap = BinaryHeap::new();
    dist[map.index(a)] = 0;
    heap.push(Reverse((0usize, map.index(a))));
    while let Some(Reverse((d, i))) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        let c = map.cell_at(i);
        if c == b {
            return Some(d);
        }
        for n in map.neighbors(c) {
            let j = map.index(n);
            if d + 1 < dist[j] {
                dist[j] = d + 1;
                heap.push(Reverse((d + 1, j)));
            }
        }
    }
    None
}

fn c2_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut bad = Vec::new();
    for _ in 0..200 {
        let n = rng.gen_range(2..=8);
        let pts: Vec<(f64, f64)> = (0..=n)
            .map(|_| (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)))
            .collect();
        let d = |a: usize, b: usize| ((pts[a].0 - pts[b].0).powi(2) + (pts[a].1 - pts[b].1).powi(2)).sqrt();
        let start: Vec<f64> = (1..=n).map(|j| d(0, j)).collect();
        let pair: Vec<Vec<f64>> = (1..=n).map(|i| (1..=n).map(|j| d(i, j)).collect()).collect();
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..3.0)).collect();
        let (_, cost) = solve_open_tsp(&start, &pair, &u).unwrap();
        if cost != brute_tsp(&start, &pair, &u) {
            bad.push("tsp");
            break;
        }
    }
    for _ in 0..200 {
        let r = rng.gen_range(1..=7);
        let c = rng.gen_range(1..=7);
        let costs: Vec<Vec<f64>> = (0..r)
            .map(|_| (0..c).map(|_| f64::from(rng.gen_range(0..100u32))).collect())
            .collect();
        let pairs = min_cost_matching(&costs);
        let got: f64 = pairs.iter().map(|&(i, j)| costs[i][j]).sum();
        if pairs.len() != r.min(c) || got != brute_assignment(&costs) {
            bad.push("hungarian");
            break;
        }
    }
    for _ in 0..100 {
        let w = rng.gen_range(3..25);
        let h = rng.gen_range(3..25);
        let mut map = GridMap::new(w, h, 0.25).unwrap();
        for x in 0..w {
            for y in 0..h {
                if rng.gen_bool(0.25) {
                    map.set_occupied(Cell::new(x, y), true).unwrap();
                }
            }
        }
        let free: Vec<Cell> = map.free_cells().collect();
        if free.len() < 2 {
            continue;
        }
        let a = free[rng.gen_range(0..free.len())];
        let b = free[rng.gen_range(0..free.len())];
        let astar = map.shortest_path_steps(a, b).ok();
        if astar != dijkstra(&map, a, b) {
            bad.push("astar");
            break;
        }
    }
    outcome(
        bad.is_empty(),
        format!("tsp 200, hungarian 200, A* 100; mismatches: {bad:?}"),
    )
}

fn pct(a: f64, b: f64) -> f64 {
    (a - b) / a
}

fn main() {
    let env = Environment::reference();
    let counts = EmpiricalCounts::reference();
    let cfg = ExperimentConfig::default();
    let mut results: Vec<(&str, Outcome, f64)> = Vec::new();

    let t = Instant::now();
    let o = c1_properties();
    let secs = t.elapsed().as_secs_f64();
    results.push(("C1 property suite", outcome(o.pass && secs < 60.0, o.detail), secs));

    let t = Instant::now();
    results.push(("C2 oracle equivalence", c2_oracles(), t.elapsed().as_secs_f64()));

    let t = Instant::now();
    let init = study_initial_estimates(&env, &counts, &cfg).expect("initial estimates study");
    let init_secs = t.elapsed().as_secs_f64();
    {
        let runs = init.runs_for(PriorKind::Uniform);
        let all_term = runs.iter().all(|r| r.termination.is_some_and(|e| e <= 200));
        let worst_l1 = runs.iter().flat_map(|r| r.l1_to_truth(&env)).fold(0.0, f64::max);
        let worst_kl = runs.iter().map(|r| r.kl.last().unwrap() / r.kl[0]).fold(0.0, f64::max);
        let terms: Vec<u32> = runs.iter().filter_map(|r| r.termination).collect();
        results.push((
            "C3 convergence",
            outcome(
                all_term && worst_l1 <= 0.15 && worst_kl <= 0.25 && init_secs < 120.0,
                format!(
                    "terminated {}/{} (episodes {}..{}), max L1 {worst_l1:.4}, max KL ratio {worst_kl:.4}",
                    terms.len(),
                    runs.len(),
                    terms.iter().min().unwrap_or(&0),
                    terms.iter().max().unwrap_or(&0)
                ),
            ),
            init_secs,
        ));
    }

    let t = Instant::now();
    let abl = study_ablation(&env, &counts, &cfg).expect("ablation study");
    let secs = t.elapsed().as_secs_f64();
    {
        let (a, ab, abc) = (
            AblationVariant::Baseline,
            AblationVariant::Personalized,
            AblationVariant::PersonalizedDbu,
        );
        let d1_gain = pct(abl.mean_d1(a), abl.mean_d1(ab));
        let dt_gain = pct(abl.mean_dt(ab), abl.mean_dt(abc));
        let d1_shift = (abl.mean_d1(abc) - abl.mean_d1(ab)).abs() / abl.mean_d1(ab);
        results.push((
            "C4 ablation",
            outcome(
                d1_gain >= 0.25 && dt_gain >= 0.15 && d1_shift < 0.05 && secs < 120.0,
                format!(
                    "D1 A {:.2} -> A+B {:.2} ({:.1}%), DT A+B {:.2} -> A+B+C {:.2} ({:.1}%), DBU D1 shift {:.2}%",
                    abl.mean_d1(a),
                    abl.mean_d1(ab),
                    100.0 * d1_gain,
                    abl.mean_dt(ab),
                    abl.mean_dt(abc),
                    100.0 * dt_gain,
                    100.0 * d1_shift
                ),
            ),
            secs,
        ));
    }

    let t = Instant::now();
    let cmp = study_compare(&env, &counts, &cfg).expect("compare study");
    let secs = t.elapsed().as_secs_f64();
    {
        let ours = cmp.mean_distance("adaptive@term");
        let base: Vec<(&str, f64)> = ["pks", "ltos", "hskos"]
            .iter()
            .map(|k| (*k, cmp.mean_distance(k)))
            .collect();
        let beats = base.iter().all(|(_, d)| pct(*d, ours) >= 0.20);
        let pks_worst = base.iter().all(|(_, d)| *d <= base[0].1);
        let detail = base
            .iter()
            .map(|(k, d)| format!("{k} {d:.2} ({:.1}%)", 100.0 * pct(*d, ours)))
            .collect::<Vec<_>>()
            .join(", ");
        results.push((
            "C5 planner comparison",
            outcome(
                beats && pks_worst && secs < 180.0,
                format!("adaptive {ours:.2}; {detail}"),
            ),
            secs,
        ));

        let d15 = cmp.mean_distance("adaptive@15");
        let d30 = cmp.mean_distance("adaptive@30");
        results.push((
            "C7 monotone personalization",
            outcome(
                d30 <= d15 * 1.05 && ours <= d30 * 1.05,
                format!("ep15 {d15:.2}, ep30 {d30:.2}, term {ours:.2}"),
            ),
            0.0,
        ));
    }

    let t = Instant::now();
    let enh = study_enhancement(&env, &counts, &cfg).expect("enhancement study");
    let secs = t.elapsed().as_secs_f64();
    {
        let mut pass = true;
        let mut parts = Vec::new();
        for k in [PlannerKind::Ltos, PlannerKind::Hskos] {
            let (ed, pd) = enh.mean_distance(k);
            let (ev, pv) = enh.mean_visits(k);
            pass &= enh.improvement(k) >= 0.10 && pv <= ev;
            parts.push(format!(
                "{k} {ed:.2}->{pd:.2} ({:.1}%), visits {ev:.2}->{pv:.2}",
                100.0 * enh.improvement(k)
            ));
        }
        results.push(("C6 enhancement", outcome(pass, parts.join("; ")), secs));
    }

    {
        let tb = env.object_index("toothbrush").expect("reference has a toothbrush");
        let mut pass = true;
        let mut parts = Vec::new();
        for kind in PriorKind::ALL {
            let tb_stats = init.object_stats(kind, tb);
            let mut fastest = tb_stats.per_seed.iter().all(Option::is_some);
            let mut runner_up = f64::INFINITY;
            for o in (0..env.objects().len()).filter(|&o| o != tb) {
                let s = init.object_stats(kind, o);
                for (a, b) in tb_stats.per_seed.iter().zip(&s.per_seed) {
                    if let (Some(a), Some(b)) = (a, b) {
                        fastest &= a <= b;
                    }
                }
                let avg = s.avg.unwrap_or(f64::INFINITY);
                fastest &= tb_stats.avg.unwrap_or(f64::INFINITY) < avg;
                runner_up = runner_up.min(avg);
            }
            pass &= fastest;
            parts.push(format!(
                "{kind}: toothbrush avg {:.1} vs next {runner_up:.1}",
                tb_stats.avg.unwrap_or(f64::NAN)
            ));
        }
        results.push(("C8 degenerate object", outcome(pass, parts.join("; ")), 0.0));
    }

    results.sort_by_key(|(name, _, _)| *name);
    let mut failed = 0;
    for (name, o, secs) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("{tag} {name} [{secs:.1}s]: {}", o.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
