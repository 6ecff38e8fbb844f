use rayon::prelude::*;
use serde::Serialize;

use crate::envmodel::{episode_rng, sample_placements, Cell, Environment, RngStream, WorldState};
use crate::ontology::{BeliefMatrix, EmpiricalCounts, PriorKind};
use crate::planner::{run_search_in, PlannerConfig, PlannerKind, SearchSpace, SearchTask};

use super::{
    initial_belief, personalize, Datum, ExperimentConfig, ExperimentReport, HarnessError, Heatmap, KlCurve,
    PersonalizationRun, Provenance, Result, Table, TerminationStats,
};

/// Objects searched for in the planner comparison and enhancement studies.
pub const COMPARE_OBJECTS: [&str; 5] = ["cup", "book", "teddy", "bottle", "phone"];
/// Sequential two-object tasks of the ablation study.
pub const ABLATION_PAIRS: [(&str, &str); 5] = [
    ("phone", "laptop"),
    ("cup", "remote"),
    ("phone", "book"),
    ("laptop", "bottle"),
    ("cup", "book"),
];
/// Targets are placed at each of this many most likely true tuples.
const PLACEMENT_RANKS: usize = 3;

fn start_cell(env: &Environment) -> Result<Cell> {
    env.start()
        .or_else(|| env.map().free_cells().next())
        .ok_or_else(|| HarnessError::Config("environment has no free cell".into()))
}

fn truth_belief(env: &Environment) -> Result<BeliefMatrix> {
    let p = (0..env.objects().len())
        .flat_map(|o| env.truth_row(o).to_vec())
        .collect();
    Ok(BeliefMatrix::new(env.objects().to_vec(), env.tuples().to_vec(), p)?)
}

fn compare_objects(env: &Environment) -> Vec<usize> {
    let named: Vec<usize> = COMPARE_OBJECTS.iter().filter_map(|o| env.object_index(o)).collect();
    if named.is_empty() {
        (0..env.objects().len()).collect()
    } else {
        named
    }
}

fn ablation_pairs(env: &Environment) -> Vec<(usize, usize)> {
    let named: Vec<(usize, usize)> = ABLATION_PAIRS
        .iter()
        .filter_map(|(a, b)| Some((env.object_index(a)?, env.object_index(b)?)))
        .collect();
    if !named.is_empty() {
        return named;
    }
    let n = env.objects().len();
    (0..n.saturating_sub(1)).map(|o| (o, o + 1)).collect()
}

/// Placements sampled on the scenario stream, with `fixed` objects pinned.
fn scenario_world(env: &Environment, seed: u64, scenario: u32, fixed: &[(usize, usize)]) -> Result<WorldState> {
    let mut rng = episode_rng(seed, RngStream::Scenario, scenario);
    let mut world = sample_placements(env, scenario, &mut rng)?;
    for &(o, t) in fixed {
        world.placements[o] = t;
    }
    Ok(world)
}

fn personalize_all(
    env: &Environment,
    counts: &EmpiricalCounts,
    cfg: &ExperimentConfig,
    kind: PriorKind,
) -> Result<Vec<PersonalizationRun>> {
    let opts = cfg.personalize_options(kind);
    cfg.seeds
        .par_iter()
        .map(|&s| personalize(env, counts, &opts, s))
        .collect()
}

fn mean(v: impl IntoIterator<Item = f64>) -> f64 {
    let (s, n) = v.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

fn snapshot_label(episode: Option<u32>) -> String {
    match episode {
        Some(e) => format!("adaptive@{e}"),
        None => "adaptive@term".to_string(),
    }
}

/// Per-episode mean over runs, carrying each run's last value forward.
fn mean_curve(runs: &[PersonalizationRun]) -> Vec<f64> {
    let len = runs.iter().map(|r| r.kl.len()).max().unwrap_or(0);
    (0..len)
        .map(|e| mean(runs.iter().filter_map(|r| r.kl.get(e).or(r.kl.last()).copied())))
        .collect()
}

fn heatmaps_for(run: &PersonalizationRun, cfg: &ExperimentConfig, prefix: &str) -> Vec<Heatmap> {
    let mut out: Vec<Heatmap> = cfg
        .snapshots
        .iter()
        .map(|&e| Heatmap {
            label: format!("{prefix}seed{}@{e}", run.seed),
            snapshot: run.snapshot(e).snapshot(e.min(run.episodes())),
        })
        .collect();
    out.push(Heatmap {
        label: format!("{prefix}seed{}@term", run.seed),
        snapshot: run.final_belief().snapshot(run.episodes()),
    });
    out
}

fn personalization_report(
    env: &Environment,
    runs: &[PersonalizationRun],
    cfg: &ExperimentConfig,
    study: &str,
) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(study, Provenance::new(cfg, env.name()));
    let mut cols = vec!["seed", "prior", "episodes", "terminated", "kl_first", "kl_final"];
    let l1_cols: Vec<String> = env.objects().iter().map(|o| format!("l1_{o}")).collect();
    cols.extend(l1_cols.iter().map(String::as_str));
    let mut t = Table::new("runs", &cols);
    for r in runs {
        let mut row: Vec<Datum> = vec![
            r.seed.into(),
            r.prior.as_str().into(),
            r.episodes().into(),
            r.termination.into(),
            r.kl.first().copied().into(),
            r.kl.last().copied().into(),
        ];
        row.extend(r.l1_to_truth(env).into_iter().map(Datum::from));
        t.push(row);
    }
    report.tables.push(t);

    let mut kl = Table::new("kl", &["seed", "episode", "kl_mean"]);
    for r in runs {
        for (e, v) in r.kl.iter().enumerate() {
            kl.push(vec![r.seed.into(), (e as u32 + 1).into(), (*v).into()]);
        }
        report.kl_curves.push(KlCurve {
            label: format!("{}/seed{}", r.prior, r.seed),
            values: r.kl.clone(),
        });
    }
    report.tables.push(kl);
    report.terminations.push(TerminationStats::from_episodes(
        cfg.prior.as_str(),
        runs.iter().map(|r| r.termination).collect(),
    ));
    report.heatmaps.push(Heatmap {
        label: "truth".into(),
        snapshot: truth_belief(env)?.snapshot(0),
    });
    if let Some(first) = runs.first() {
        report.heatmaps.extend(heatmaps_for(first, cfg, ""));
    }
    Ok(report)
}

/// Personalization from every prior kind on every seed.
#[derive(Debug, Clone)]
pub struct InitialEstimatesOutcome {
    pub runs: Vec<(PriorKind, Vec<PersonalizationRun>)>,
}

impl InitialEstimatesOutcome {
    pub fn runs_for(&self, kind: PriorKind) -> &[PersonalizationRun] {
        self.runs
            .iter()
            .find(|(k, _)| *k == kind)
            .map_or(&[], |(_, r)| r.as_slice())
    }

    /// Per-object threshold episodes across seeds for one prior.
    pub fn object_stats(&self, kind: PriorKind, object: usize) -> TerminationStats {
        let per_seed = self.runs_for(kind).iter().map(|r| r.object_threshold[object]).collect();
        TerminationStats::from_episodes(kind.as_str(), per_seed)
    }

    pub fn termination_stats(&self, kind: PriorKind) -> TerminationStats {
        TerminationStats::from_episodes(
            kind.as_str(),
            self.runs_for(kind).iter().map(|r| r.termination).collect(),
        )
    }

    pub fn report(&self, env: &Environment, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
        let mut report = ExperimentReport::new("initial_estimates", Provenance::new(cfg, env.name()));
        let mut t = Table::new("episodes", &["prior", "object", "min", "max", "avg", "reached"]);
        for (kind, runs) in &self.runs {
            for (o, name) in env.objects().iter().enumerate() {
                let s = self.object_stats(*kind, o);
                let reached = s.per_seed.iter().flatten().count();
                t.push(vec![
                    kind.as_str().into(),
                    name.as_str().into(),
                    s.min.into(),
                    s.max.into(),
                    s.avg.into(),
                    reached.into(),
                ]);
            }
            report.terminations.push(self.termination_stats(*kind));
            report.kl_curves.push(KlCurve {
                label: kind.as_str().into(),
                values: mean_curve(runs),
            });
        }
        report.tables.push(t);

        let mut term = Table::new("termination", &["prior", "min", "max", "avg", "reached", "seeds"]);
        for s in &report.terminations {
            term.push(vec![
                s.label.as_str().into(),
                s.min.into(),
                s.max.into(),
                s.avg.into(),
                s.per_seed.iter().flatten().count().into(),
                s.per_seed.len().into(),
            ]);
        }
        report.tables.push(term);

        let mut raw = Table::new(
            "runs",
            &["prior", "seed", "termination", "episodes", "kl_first", "kl_final"],
        );
        for (kind, runs) in &self.runs {
            for r in runs {
                raw.push(vec![
                    kind.as_str().into(),
                    r.seed.into(),
                    r.termination.into(),
                    r.episodes().into(),
                    r.kl.first().copied().into(),
                    r.kl.last().copied().into(),
                ]);
            }
        }
        report.tables.push(raw);

        let mut kl = Table::new("kl", &["episode", "prior", "kl_mean"]);
        for c in &report.kl_curves {
            for (e, v) in c.values.iter().enumerate() {
                kl.push(vec![(e as u32 + 1).into(), c.label.as_str().into(), (*v).into()]);
            }
        }
        report.tables.push(kl);

        report.heatmaps.push(Heatmap {
            label: "truth".into(),
            snapshot: truth_belief(env)?.snapshot(0),
        });
        for (kind, runs) in &self.runs {
            if let Some(first) = runs.first() {
                report.heatmaps.extend(heatmaps_for(first, cfg, &format!("{kind}/")));
            }
        }
        Ok(report)
    }
}

/// Personalizes from each prior kind and records how fast the Wilson gate
/// closes overall and per object.
pub fn study_initial_estimates(
    env: &Environment,
    counts: &EmpiricalCounts,
    cfg: &ExperimentConfig,
) -> Result<InitialEstimatesOutcome> {
    cfg.validate()?;
    let runs = PriorKind::ALL
        .iter()
        .map(|&k| Ok((k, personalize_all(env, counts, cfg, k)?)))
        .collect::<Result<_>>()?;
    Ok(InitialEstimatesOutcome { runs })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRecord {
    pub seed: u64,
    pub object: String,
    /// 0 for the most likely true tuple.
    pub rank: usize,
    pub tuple: String,
    pub planner: String,
    pub distance: f64,
    pub visits: usize,
    pub found: bool,
}

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub labels: Vec<String>,
    pub records: Vec<CompareRecord>,
    pub terminations: Vec<Option<u32>>,
}

impl CompareOutcome {
    fn of(&self, label: &str) -> impl Iterator<Item = &CompareRecord> {
        let label = label.to_string();
        self.records.iter().filter(move |r| r.planner == label)
    }

    pub fn mean_distance(&self, label: &str) -> f64 {
        mean(self.of(label).map(|r| r.distance))
    }

    pub fn mean_visits(&self, label: &str) -> f64 {
        mean(self.of(label).map(|r| r.visits as f64))
    }

    pub fn report(&self, env: &Environment, cfg: &ExperimentConfig) -> ExperimentReport {
        let mut report = ExperimentReport::new("compare", Provenance::new(cfg, env.name()));
        let objects: Vec<String> = compare_objects(env).iter().map(|&o| env.objects()[o].clone()).collect();
        let mut cols: Vec<String> = ["planner", "mean_distance", "mean_visits", "scenarios"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        cols.extend(objects.iter().map(|o| format!("distance_{o}")));
        cols.extend(objects.iter().map(|o| format!("visits_{o}")));
        let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
        let mut t = Table::new("summary", &col_refs);
        for label in &self.labels {
            let mut row: Vec<Datum> = vec![
                label.as_str().into(),
                self.mean_distance(label).into(),
                self.mean_visits(label).into(),
                self.of(label).count().into(),
            ];
            for o in &objects {
                row.push(mean(self.of(label).filter(|r| &r.object == o).map(|r| r.distance)).into());
            }
            for o in &objects {
                row.push(mean(self.of(label).filter(|r| &r.object == o).map(|r| r.visits as f64)).into());
            }
            t.push(row);
        }
        report.tables.push(t);
        report.tables.push(compare_raw(&self.records));
        report.terminations.push(TerminationStats::from_episodes(
            cfg.prior.as_str(),
            self.terminations.clone(),
        ));
        report
    }
}

fn compare_raw(records: &[CompareRecord]) -> Table {
    let mut raw = Table::new(
        "scenarios",
        &[
            "seed", "object", "rank", "tuple", "planner", "distance", "visits", "found",
        ],
    );
    for r in records {
        raw.push(vec![
            r.seed.into(),
            r.object.as_str().into(),
            r.rank.into(),
            r.tuple.as_str().into(),
            r.planner.as_str().into(),
            r.distance.into(),
            r.visits.into(),
            r.found.into(),
        ]);
    }
    raw
}

/// Single-object searches: baselines on the empirical prior against the
/// adaptive planner on personalization snapshots.
pub fn study_compare(env: &Environment, counts: &EmpiricalCounts, cfg: &ExperimentConfig) -> Result<CompareOutcome> {
    cfg.validate()?;
    let start = start_cell(env)?;
    let objects = compare_objects(env);
    let mut labels: Vec<String> = Vec::new();
    for &k in &cfg.planners {
        if k == PlannerKind::Adaptive {
            labels.extend(cfg.snapshots.iter().map(|&e| snapshot_label(Some(e))));
            labels.push(snapshot_label(None));
        } else {
            labels.push(k.as_str().into());
        }
    }
    let per_seed: Vec<(Vec<CompareRecord>, Option<u32>)> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let space = SearchSpace::new(env);
            let run = personalize(env, counts, &cfg.personalize_options(cfg.prior), seed)?;
            let empirical = initial_belief(env, counts, &cfg.prior_spec(PriorKind::Empirical), seed)?;
            let mut arms: Vec<(String, PlannerKind, &BeliefMatrix)> = Vec::new();
            for &k in &cfg.planners {
                if k == PlannerKind::Adaptive {
                    for &e in &cfg.snapshots {
                        arms.push((snapshot_label(Some(e)), k, run.snapshot(e)));
                    }
                    arms.push((snapshot_label(None), k, run.final_belief()));
                } else {
                    arms.push((k.as_str().into(), k, &empirical));
                }
            }
            let mut out = Vec::new();
            let mut scenario = 0u32;
            for &o in &objects {
                for (rank, &t) in env.most_likely_tuples(o, PLACEMENT_RANKS).iter().enumerate() {
                    scenario += 1;
                    let world = scenario_world(env, seed, scenario, &[(o, t)])?;
                    let task = SearchTask::single(&env.objects()[o], start);
                    for (label, kind, belief) in &arms {
                        let pc = PlannerConfig::new(*kind).with_alpha(cfg.alpha);
                        let r = run_search_in(&space, &world, &task, belief, &pc)?;
                        out.push(CompareRecord {
                            seed,
                            object: env.objects()[o].clone(),
                            rank,
                            tuple: env.tuples()[t].name(),
                            planner: label.clone(),
                            distance: r.total_distance(),
                            visits: r.visits(),
                            found: r.all_found(),
                        });
                    }
                }
            }
            Ok((out, run.termination))
        })
        .collect::<Result<_>>()?;
    let terminations = per_seed.iter().map(|(_, t)| *t).collect();
    Ok(CompareOutcome {
        labels,
        records: per_seed.into_iter().flat_map(|(r, _)| r).collect(),
        terminations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AblationVariant {
    /// Empirical prior, adaptive inference.
    Baseline,
    /// Personalized prior.
    Personalized,
    /// Personalized prior with dynamic belief updates.
    PersonalizedDbu,
}

impl AblationVariant {
    pub const ALL: [AblationVariant; 3] = [
        AblationVariant::Baseline,
        AblationVariant::Personalized,
        AblationVariant::PersonalizedDbu,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AblationVariant::Baseline => "A",
            AblationVariant::Personalized => "A+B",
            AblationVariant::PersonalizedDbu => "A+B+C",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRecord {
    pub seed: u64,
    pub pair: String,
    pub ranks: (usize, usize),
    pub variant: AblationVariant,
    pub d1: f64,
    pub dt: f64,
    pub visits: usize,
    pub found: bool,
    /// Visited tuples in order, for recomputing distances.
    pub sequence: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct AblationOutcome {
    pub records: Vec<AblationRecord>,
}

impl AblationOutcome {
    fn of(&self, v: AblationVariant) -> impl Iterator<Item = &AblationRecord> {
        self.records.iter().filter(move |r| r.variant == v)
    }

    pub fn mean_d1(&self, v: AblationVariant) -> f64 {
        mean(self.of(v).map(|r| r.d1))
    }

    pub fn mean_dt(&self, v: AblationVariant) -> f64 {
        mean(self.of(v).map(|r| r.dt))
    }

    pub fn mean_visits(&self, v: AblationVariant) -> f64 {
        mean(self.of(v).map(|r| r.visits as f64))
    }

    pub fn report(&self, env: &Environment, cfg: &ExperimentConfig) -> ExperimentReport {
        let mut report = ExperimentReport::new("ablation", Provenance::new(cfg, env.name()));
        let mut t = Table::new(
            "summary",
            &["variant", "mean_d1", "mean_dt", "mean_visits", "scenarios"],
        );
        for v in AblationVariant::ALL {
            t.push(vec![
                v.as_str().into(),
                self.mean_d1(v).into(),
                self.mean_dt(v).into(),
                self.mean_visits(v).into(),
                self.of(v).count().into(),
            ]);
        }
        report.tables.push(t);
        let mut raw = Table::new(
            "scenarios",
            &[
                "seed", "pair", "rank1", "rank2", "variant", "d1", "dt", "visits", "found", "sequence",
            ],
        );
        for r in &self.records {
            raw.push(vec![
                r.seed.into(),
                r.pair.as_str().into(),
                r.ranks.0.into(),
                r.ranks.1.into(),
                r.variant.as_str().into(),
                r.d1.into(),
                r.dt.into(),
                r.visits.into(),
                r.found.into(),
                r.sequence.join(" ").into(),
            ]);
        }
        report.tables.push(raw);
        report
    }
}

/// Two-object tasks under the empirical prior, the personalized prior, and
/// the personalized prior with dynamic belief updates. Both targets are
/// placed at every combination of their three most likely true tuples.
pub fn study_ablation(env: &Environment, counts: &EmpiricalCounts, cfg: &ExperimentConfig) -> Result<AblationOutcome> {
    cfg.validate()?;
    let start = start_cell(env)?;
    let pairs = ablation_pairs(env);
    let per_seed: Vec<Vec<AblationRecord>> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let space = SearchSpace::new(env);
            let run = personalize(env, counts, &cfg.personalize_options(cfg.prior), seed)?;
            let empirical = initial_belief(env, counts, &cfg.prior_spec(PriorKind::Empirical), seed)?;
            let mut out = Vec::new();
            let mut scenario = 0u32;
            for &(a, b) in &pairs {
                let name = format!("{}+{}", env.objects()[a], env.objects()[b]);
                let task = SearchTask::new(vec![env.objects()[a].clone(), env.objects()[b].clone()], start);
                for (ra, &ta) in env.most_likely_tuples(a, PLACEMENT_RANKS).iter().enumerate() {
                    for (rb, &tb) in env.most_likely_tuples(b, PLACEMENT_RANKS).iter().enumerate() {
                        scenario += 1;
                        let world = scenario_world(env, seed, scenario, &[(a, ta), (b, tb)])?;
                        for v in AblationVariant::ALL {
                            let (belief, dbu) = match v {
                                AblationVariant::Baseline => (&empirical, false),
                                AblationVariant::Personalized => (run.final_belief(), false),
                                AblationVariant::PersonalizedDbu => (run.final_belief(), true),
                            };
                            let pc = PlannerConfig::new(PlannerKind::Adaptive)
                                .with_alpha(cfg.alpha)
                                .with_dbu(dbu);
                            let r = run_search_in(&space, &world, &task, belief, &pc)?;
                            out.push(AblationRecord {
                                seed,
                                pair: name.clone(),
                                ranks: (ra, rb),
                                variant: v,
                                d1: r.first_distance(),
                                dt: r.total_distance(),
                                visits: r.visits(),
                                found: r.all_found(),
                                sequence: r.sequence.iter().map(|s| s.tuple.name()).collect(),
                            });
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(AblationOutcome {
        records: per_seed.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnhancementRecord {
    pub seed: u64,
    pub object: String,
    pub rank: usize,
    pub planner: PlannerKind,
    pub empirical_distance: f64,
    pub personalized_distance: f64,
    pub empirical_visits: usize,
    pub personalized_visits: usize,
}

#[derive(Debug, Clone)]
pub struct EnhancementOutcome {
    pub planners: Vec<PlannerKind>,
    pub records: Vec<EnhancementRecord>,
}

impl EnhancementOutcome {
    fn of(&self, k: PlannerKind) -> impl Iterator<Item = &EnhancementRecord> {
        self.records.iter().filter(move |r| r.planner == k)
    }

    /// Mean distance with the empirical and the personalized prior.
    pub fn mean_distance(&self, k: PlannerKind) -> (f64, f64) {
        (
            mean(self.of(k).map(|r| r.empirical_distance)),
            mean(self.of(k).map(|r| r.personalized_distance)),
        )
    }

    pub fn mean_visits(&self, k: PlannerKind) -> (f64, f64) {
        (
            mean(self.of(k).map(|r| r.empirical_visits as f64)),
            mean(self.of(k).map(|r| r.personalized_visits as f64)),
        )
    }

    /// Relative distance reduction from personalization.
    pub fn improvement(&self, k: PlannerKind) -> f64 {
        let (e, p) = self.mean_distance(k);
        (e - p) / e
    }

    pub fn report(&self, env: &Environment, cfg: &ExperimentConfig) -> ExperimentReport {
        let mut report = ExperimentReport::new("enhancement", Provenance::new(cfg, env.name()));
        let mut t = Table::new(
            "summary",
            &[
                "planner",
                "empirical_distance",
                "personalized_distance",
                "improvement",
                "empirical_visits",
                "personalized_visits",
                "mean_paired_delta",
            ],
        );
        for &k in &self.planners {
            let (ed, pd) = self.mean_distance(k);
            let (ev, pv) = self.mean_visits(k);
            t.push(vec![
                k.as_str().into(),
                ed.into(),
                pd.into(),
                self.improvement(k).into(),
                ev.into(),
                pv.into(),
                mean(self.of(k).map(|r| r.personalized_distance - r.empirical_distance)).into(),
            ]);
        }
        report.tables.push(t);
        let mut raw = Table::new(
            "scenarios",
            &[
                "seed",
                "object",
                "rank",
                "planner",
                "empirical_distance",
                "personalized_distance",
                "delta",
                "empirical_visits",
                "personalized_visits",
            ],
        );
        for r in &self.records {
            raw.push(vec![
                r.seed.into(),
                r.object.as_str().into(),
                r.rank.into(),
                r.planner.as_str().into(),
                r.empirical_distance.into(),
                r.personalized_distance.into(),
                (r.personalized_distance - r.empirical_distance).into(),
                r.empirical_visits.into(),
                r.personalized_visits.into(),
            ]);
        }
        report.tables.push(raw);
        report
    }
}

/// LTOS and HSKOS on identical scenarios, once with the empirical prior and
/// once with the personalized belief.
pub fn study_enhancement(
    env: &Environment,
    counts: &EmpiricalCounts,
    cfg: &ExperimentConfig,
) -> Result<EnhancementOutcome> {
    cfg.validate()?;
    let start = start_cell(env)?;
    let objects = compare_objects(env);
    let mut planners: Vec<PlannerKind> = cfg
        .planners
        .iter()
        .copied()
        .filter(|k| matches!(k, PlannerKind::Ltos | PlannerKind::Hskos))
        .collect();
    if planners.is_empty() {
        planners = vec![PlannerKind::Ltos, PlannerKind::Hskos];
    }
    let per_seed: Vec<Vec<EnhancementRecord>> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let space = SearchSpace::new(env);
            let run = personalize(env, counts, &cfg.personalize_options(cfg.prior), seed)?;
            let empirical = initial_belief(env, counts, &cfg.prior_spec(PriorKind::Empirical), seed)?;
            let mut out = Vec::new();
            let mut scenario = 0u32;
            for &o in &objects {
                for (rank, &t) in env.most_likely_tuples(o, PLACEMENT_RANKS).iter().enumerate() {
                    scenario += 1;
                    let world = scenario_world(env, seed, scenario, &[(o, t)])?;
                    let task = SearchTask::single(&env.objects()[o], start);
                    for &k in &planners {
                        let pc = PlannerConfig::new(k).with_alpha(cfg.alpha);
                        let e = run_search_in(&space, &world, &task, &empirical, &pc)?;
                        let p = run_search_in(&space, &world, &task, run.final_belief(), &pc)?;
                        out.push(EnhancementRecord {
                            seed,
                            object: env.objects()[o].clone(),
                            rank,
                            planner: k,
                            empirical_distance: e.total_distance(),
                            personalized_distance: p.total_distance(),
                            empirical_visits: e.visits(),
                            personalized_visits: p.visits(),
                        });
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(EnhancementOutcome {
        planners,
        records: per_seed.into_iter().flatten().collect(),
    })
}

/// Personalization runs for every configured seed.
pub fn personalize_seeds(
    env: &Environment,
    counts: &EmpiricalCounts,
    cfg: &ExperimentConfig,
) -> Result<(Vec<PersonalizationRun>, ExperimentReport)> {
    cfg.validate()?;
    let runs = personalize_all(env, counts, cfg, cfg.prior)?;
    let report = personalization_report(env, &runs, cfg, "personalize")?;
    Ok((runs, report))
}
