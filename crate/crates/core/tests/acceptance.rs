//! Acceptance criteria for the engine. Prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

mod common;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::graph::{check_four_partite, check_paths};
use common::oracle::{
    auc_pairs, exact_rank, fusion_cases, oracle_singular_values, random_sparse, ref_average_cosine, ref_average_rank,
    ref_interleave, ref_ranking,
};
use common::{onboarding, small_generator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use showfinder::artist_space::{EmbeddingIndex, DEFAULT_RANK};
use showfinder::eval::{
    auc, footprint_experiment, fusion_sweep, long_tail_stats, simulate_users, FootprintExperimentConfig, Method,
    PreferenceSource, SimulationConfig, SweepMethod,
};
use showfinder::event_graph::{build_graph, recommend, GraphConfig, MusicEventGraph, Ranker};
use showfinder::fusion::{interleave_lists, late_fuse_average_cosine, late_fuse_average_rank, late_fuse_interleave};
use showfinder::fusion::{FusionConfig, UserPreferences};
use showfinder::ingest::{generate_synthetic_corpus, GeneratorConfig};
use showfinder::linalg::{fold_in, truncated_svd, SparseMatrix};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn svd_oracle() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let mut worst_sigma = 0.0f64;
    let mut worst_recon = 0.0f64;
    for m in 0..30u64 {
        let (rows, cols) = (rng.random_range(20..=200), rng.random_range(20..=200));
        let x = random_sparse(rows, cols, rng.random_range(0.02..0.15), &mut rng);
        let oracle = oracle_singular_values(&x.to_dense());
        let numerical_rank = oracle.iter().filter(|&&s| s > 1e-8 * oracle[0]).count();
        let k = rng.random_range(1..=numerical_rank.min(60));
        let svd = truncated_svd(&x, k, m).map_err(|e| e.to_string())?;
        for (i, s) in svd.sigma().iter().enumerate() {
            let rel = (s - oracle[i]).abs() / oracle[i];
            worst_sigma = worst_sigma.max(rel);
            ensure(rel <= 1e-6, || format!("matrix {m} ({rows}x{cols}, k={k}): sigma[{i}] rel error {rel:e}"))?;
        }

        let r = rng.random_range(1..=10);
        let dense = exact_rank(rows, cols, r, &mut rng);
        let exact = SparseMatrix::from_dense(&dense).map_err(|e| e.to_string())?;
        let svd = truncated_svd(&exact, r + rng.random_range(0..=3), m).map_err(|e| e.to_string())?;
        let rel = (svd.reconstruct() - &dense).norm() / dense.norm();
        worst_recon = worst_recon.max(rel);
        ensure(rel <= 1e-8, || format!("matrix {m}: rank-{r} reconstruction error {rel:e}·‖X‖"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "30 matrices, worst sigma rel {worst_sigma:.1e}, worst reconstruction {worst_recon:.1e}·‖X‖, {elapsed:.1?}"
    ))
}

fn fold_in_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(96);
    let mut worst = 0.0f64;
    for (rows, cols, r) in [(20, 30, 4), (60, 45, 7), (120, 150, 12), (200, 80, 20)] {
        let dense = exact_rank(rows, cols, r, &mut rng);
        let x = SparseMatrix::from_dense(&dense).map_err(|e| e.to_string())?;
        let svd = truncated_svd(&x, r, 1).map_err(|e| e.to_string())?;
        for i in 0..rows {
            let folded = fold_in(&x.row_vector(i), &svd).map_err(|e| e.to_string())?;
            for (j, c) in folded.coords().iter().enumerate() {
                let err = (c - svd.u()[(i, j)]).abs();
                worst = worst.max(err);
                ensure(err <= 1e-8, || format!("{rows}x{cols} rank {r}: row {i} coord {j} off by {err:e}"))?;
            }
        }
    }
    Ok(format!("4 exact-rank matrices, worst coordinate error {worst:.1e}"))
}

fn auc_oracle() -> Check {
    let mut checked = 0;
    for n in 1..=8u32 {
        let ranking: Vec<u32> = (0..n).map(|i| (i * 7 + 2) % 11).collect();
        for mask in 0u32..(1 << n) {
            let labels: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
            let relevant: HashSet<u32> = ranking.iter().zip(&labels).filter(|(_, &l)| l).map(|(&id, _)| id).collect();
            let agree = match (auc(&ranking, &relevant), auc_pairs(&labels)) {
                (Ok(got), Some(want)) => got == want,
                (Err(_), None) => true,
                _ => false,
            };
            ensure(agree, || format!("length {n}, labelling {mask:b}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} labellings of rankings up to length 8"))
}

fn fusion_oracles() -> Check {
    let cases = fusion_cases();
    for (i, case) in cases.iter().enumerate() {
        let (prefs, cands) = case.latent();
        ensure(late_fuse_average_cosine(&prefs, &cands) == ref_average_cosine(&case.prefs, &case.cands), || {
            format!("average_cosine differs on case {i}")
        })?;
        ensure(late_fuse_average_rank(&prefs, &cands) == ref_average_rank(&case.prefs, &case.cands), || {
            format!("average_rank differs on case {i}")
        })?;
        let lists: Vec<Vec<String>> = case.prefs.iter().map(|p| ref_ranking(p, &case.cands)).collect();
        ensure(late_fuse_interleave(&prefs, &cands) == ref_interleave(&lists), || {
            format!("interleave differs on case {i}")
        })?;
    }
    let traced = interleave_lists(&[vec!['a', 'b', 'c'], vec!['b', 'c', 'a']]);
    ensure(traced == ['a', 'b', 'c'], || format!("[a,b,c]+[b,c,a] gave {traced:?}"))?;
    Ok(format!("{} cases over ≤6 candidates × ≤3 preferences; [a,b,c]+[b,c,a] → [a,b,c]", cases.len()))
}

fn footprint_curves() -> Check {
    let start = Instant::now();
    let corpus = generate_synthetic_corpus(&GeneratorConfig::default()).map_err(|e| e.to_string())?;
    let config = FootprintExperimentConfig::for_corpus(corpus.artists.len(), 0);
    let report = footprint_experiment(&corpus, &config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    for method in report.methods() {
        let curve = report.curve(method);
        for pair in curve.windows(2) {
            ensure(pair[1].1 >= pair[0].1 - 0.02, || {
                format!(
                    "(a) {method} drops from {:.3} at {} to {:.3} at {}",
                    pair[0].1, pair[0].0, pair[1].1, pair[1].0
                )
            })?;
        }
    }
    let auc_at = |m: Method, f: usize| report.mean_auc(m, f).unwrap_or(f64::NAN);
    for f in config.footprint_sizes.iter().copied().filter(|&f| f <= 16) {
        let (lsa, raw) = (auc_at(Method::Lsa(64), f), auc_at(Method::Raw, f));
        ensure(lsa > raw, || format!("(b) footprint {f}: lsa-64 {lsa:.3} <= raw {raw:.3}"))?;
    }
    for f in config.footprint_sizes.iter().copied().filter(|&f| f >= 128) {
        let (lsa, raw) = (auc_at(Method::Lsa(64), f), auc_at(Method::Raw, f));
        ensure(raw >= lsa, || format!("(c) footprint {f}: raw {raw:.3} < lsa-64 {lsa:.3}"))?;
    }
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    let curve = |m| report.curve(m).iter().map(|(_, a)| format!("{a:.3}")).collect::<Vec<_>>().join(" ");
    Ok(format!("2000 artists, {elapsed:.1?}; raw [{}] lsa-64 [{}]", curve(Method::Raw), curve(Method::Lsa(64))))
}

fn fusion_table() -> Check {
    let corpus = generate_synthetic_corpus(&GeneratorConfig::default()).map_err(|e| e.to_string())?;
    let raw = corpus.raw_matrix().map_err(|e| e.to_string())?;
    let index = EmbeddingIndex::fit(&raw, DEFAULT_RANK, 0).map_err(|e| e.to_string())?;
    let graph = build_graph(&corpus, &index, &GraphConfig::default()).map_err(|e| e.to_string())?;
    let users = simulate_users(&graph, &index, &SimulationConfig::default()).map_err(|e| e.to_string())?;
    let report = fusion_sweep(&graph, &index, &users, &FusionConfig::sweep(), &PreferenceSource::ALL, 0)
        .map_err(|e| e.to_string())?;
    let mean = |row: Option<&showfinder::eval::SweepRow>| row.map_or(f64::NAN, |r| r.mean_auc);
    let artists = mean(report.fusion(FusionConfig::default(), PreferenceSource::Artists));
    let genres = mean(report.fusion(FusionConfig::default(), PreferenceSource::Genres));
    let random = mean(report.row(&SweepMethod::Random));
    let popularity = mean(report.row(&SweepMethod::Popularity));
    ensure(users.len() == 200, || format!("{} users", users.len()))?;
    ensure(artists >= 0.75, || format!("artist preferences {artists:.3} < 0.75"))?;
    ensure((random - 0.5).abs() <= 0.03, || format!("random baseline {random:.3}"))?;
    ensure(artists > genres, || format!("artists {artists:.3} <= genres {genres:.3}"))?;
    Ok(format!("200 users; artists {artists:.3}, genres {genres:.3}, random {random:.3}, popularity {popularity:.3}"))
}

fn generator_calibration() -> Check {
    let stats = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let corpus = generate_synthetic_corpus(&GeneratorConfig::with_seed(seed))?;
            long_tail_stats(&corpus)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let corr = stats.iter().filter(|s| (s.footprint_rank_correlation + 0.56).abs() <= 0.1).count();
    let cover = stats.iter().filter(|s| (0.10..=0.25).contains(&s.coverage_fraction)).count();
    let tail = stats.iter().filter(|s| s.bottom_three_decile_share >= 0.60).count();
    let needed = 48;
    ensure(corr >= needed && cover >= needed && tail >= needed, || {
        format!("seeds passing: correlation {corr}/50, coverage {cover}/50, bottom-three share {tail}/50")
    })?;
    Ok(format!("seeds passing: correlation {corr}/50, coverage {cover}/50, bottom-three share {tail}/50"))
}

fn graph_invariants() -> Check {
    let mut graphs: Vec<MusicEventGraph> = vec![onboarding().2];
    for seed in 0..4 {
        let corpus = generate_synthetic_corpus(&small_generator(seed)).map_err(|e| e.to_string())?;
        let index = EmbeddingIndex::fit(&corpus.raw_matrix().map_err(|e| e.to_string())?, 16, seed)
            .map_err(|e| e.to_string())?;
        graphs.push(build_graph(&corpus, &index, &GraphConfig::default()).map_err(|e| e.to_string())?);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    for graph in &graphs {
        check_four_partite(graph);
        graph.validate().map_err(|e| e.to_string())?;
        let genres: Vec<_> = graph.levels.genre_tags.iter().map(|g| g.id.clone()).collect();
        let popular: Vec<_> = graph.levels.popular_artists.iter().map(|p| p.id.clone()).collect();
        for _ in 0..100 {
            let mut base = UserPreferences::default();
            for g in &genres {
                if rng.random_bool(0.3) {
                    base.genre_tag_ids.push(g.clone());
                }
            }
            for p in &popular {
                if rng.random_bool(0.2) {
                    base.popular_artist_ids.push(p.clone());
                }
            }
            if base.is_empty() {
                continue;
            }
            let before = recommend(graph, &base, &Ranker::Paths).map_err(|e| e.to_string())?;
            check_paths(graph, &before, &base);
            check_paths(graph, &recommend(graph, &base, &Ranker::default()).map_err(|e| e.to_string())?, &base);

            let mut more = base.clone();
            let extra = popular[rng.random_range(0..popular.len())].clone();
            if !more.popular_artist_ids.contains(&extra) {
                more.popular_artist_ids.push(extra);
            }
            let extra = genres[rng.random_range(0..genres.len())].clone();
            if !more.genre_tag_ids.contains(&extra) {
                more.genre_tag_ids.push(extra);
            }
            let after = recommend(graph, &more, &Ranker::Paths).map_err(|e| e.to_string())?;
            let after: HashMap<_, f64> = after.events.iter().map(|e| (e.event_id.clone(), e.score)).collect();
            for e in &before.events {
                ensure(after[&e.event_id] >= e.score, || format!("{} dropped after adding preferences", e.event_id))?;
            }
            checked += 1;
        }
    }

    let run = || {
        let (_, _, graph) = onboarding();
        let prefs = UserPreferences::new(vec![], vec!["pa2".into(), "pa6".into()]);
        let out = recommend(&graph, &prefs, &Ranker::default()).unwrap();
        (serde_json::to_string(&graph).unwrap(), serde_json::to_string(&out).unwrap(), out)
    };
    let (first_graph, first_json, out) = run();
    let (second_graph, second_json, _) = run();
    ensure(first_graph == second_graph && first_json == second_json, || "fixture output differs between runs".into())?;
    let order: Vec<&str> = out.events.iter().map(|e| e.event_id.as_str()).collect();
    let reached: BTreeSet<&str> =
        out.events.iter().filter(|e| !e.paths.is_empty()).map(|e| e.event_id.as_str()).collect();
    ensure(order.first() == Some(&"e4") && reached.contains("e1") && reached.contains("e2"), || {
        format!("fixture ranking {order:?}")
    })?;
    Ok(format!("{} graphs, {checked} preference sets; fixture ranking {order:?}", graphs.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("SVD oracle equivalence", svd_oracle),
        ("fold-in identity", fold_in_identity),
        ("AUC oracle", auc_oracle),
        ("fusion oracles", fusion_oracles),
        ("reduced-footprint curves", footprint_curves),
        ("fusion strategy table", fusion_table),
        ("generator calibration", generator_calibration),
        ("graph invariants", graph_invariants),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg =
                panic.downcast_ref::<String>().cloned().or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
