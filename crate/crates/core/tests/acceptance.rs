//! Acceptance suite: one test per criterion, each printing a single
//! `criterion NN: PASS` line with its headline numbers (run with
//! `--nocapture` to see them). Tolerances are pinned here, in code.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use garland_lab::cat0::{
    self, MetricTree, TargetPoint, TargetSpace, WeightedPointSet,
};
use garland_lab::complex::{propagate_weights, WeightedComplex, WeightedGraph};
use garland_lab::harmonic::{self, TargetClass, VertexMap};
use garland_lab::incidence;
use garland_lab::models;
use garland_lab::randomgen::{self, PermutationModelParams};
use garland_lab::spectral;
use garland_lab::wirtinger;

fn pass(criterion: u32, name: &str, detail: String, started: Instant, limit_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    println!("criterion {criterion:02} ({name}): PASS — {detail} [{elapsed:.2}s, limit {limit_s}s]");
    assert!(
        elapsed < limit_s,
        "criterion {criterion:02}: FAIL — runtime {elapsed:.2}s exceeds the {limit_s}s limit"
    );
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> MetricTree {
    let edges = (1..n)
        .map(|v| (rng.gen_range(0..v), v, rng.gen_range(0.3..2.0)))
        .collect();
    MetricTree::new(n, edges).unwrap()
}

fn random_tree_point(rng: &mut ChaCha8Rng, tree: &MetricTree) -> TargetPoint {
    if rng.gen_bool(0.4) {
        TargetPoint::TreeVertex {
            vertex: rng.gen_range(0..tree.vertex_count()),
        }
    } else {
        let e = rng.gen_range(0..tree.edges().len());
        let len = tree.edges()[e].2;
        tree.canonicalize(&TargetPoint::TreeInterior {
            edge: e,
            offset: rng.gen_range(0.0..len),
        })
        .unwrap()
    }
}

#[test]
fn criterion_01_cycle_spectra() {
    let started = Instant::now();
    let mut worst = 0.0f64;
    for k in 3..=64 {
        let eig = spectral::scalar_spectral_gap(&models::cycle_graph(k))
            .unwrap()
            .lambda;
        let closed = spectral::cycle_gap_closed_form(k).unwrap();
        let err = (eig - closed).abs();
        worst = worst.max(err);
        assert!(
            err < 1e-9,
            "criterion 01: FAIL — k={k} eigensolve {eig} vs closed form {closed}"
        );
    }
    let c6 = spectral::scalar_spectral_gap(&models::cycle_graph(6))
        .unwrap()
        .lambda;
    assert!(
        (c6 - 0.5).abs() < 1e-9,
        "criterion 01: FAIL — lambda(C6) = {c6}"
    );
    pass(
        1,
        "cycle spectra",
        format!("k = 3..64, worst |eigensolve - closed form| = {worst:.2e}, lambda(C6) = {c6}"),
        started,
        1.0,
    );
}

#[test]
fn criterion_02_building_census() {
    let started = Instant::now();
    let mut lines = Vec::new();
    for p in [2u64, 3, 5, 7] {
        let census = incidence::building_embedding_rq(p).unwrap();
        assert_eq!(
            census.ordered_pairs, census.expected_pairs,
            "criterion 02: FAIL — census counts at p = {p}"
        );
        let err = (census.rq_gromov - census.closed_form).abs();
        assert!(
            err < 1e-9,
            "criterion 02: FAIL — p={p} quotient {} vs closed form {}",
            census.rq_gromov,
            census.closed_form
        );
        assert!(
            (census.rq_standard - 0.5).abs() < 1e-9,
            "criterion 02: FAIL — p={p} standard quotient {}",
            census.rq_standard
        );
        lines.push(format!("p={p}: {:.7}", census.rq_gromov));
    }
    pass(
        2,
        "building census",
        format!("all-pairs quotients {{{}}}, standard = 1/2 at every p", lines.join(", ")),
        started,
        5.0,
    );
}

#[test]
fn criterion_03_garland_identity_torus() {
    let started = Instant::now();
    let torus = models::torus_3x3();
    let cocycle = harmonic::EdgeCocycle::new(2, models::torus_lattice_cocycle(&torus)).unwrap();
    let f = harmonic::solve_twisted_harmonic(&torus, &cocycle).unwrap();
    let max_lap =
        harmonic::max_vertex_laplacian(torus.skeleton(), &f, Some(&cocycle)).unwrap();
    assert!(
        max_lap < 1e-8,
        "criterion 03: FAIL — |-Delta f| = {max_lap} not harmonic"
    );
    let report = harmonic::garland_identity_check(&torus, &f, Some(&cocycle)).unwrap();
    for (x, rq) in report.link_quotients.iter().enumerate() {
        let rq = rq.expect("nonconstant link restriction");
        assert!(
            (rq - 0.5).abs() < 1e-8,
            "criterion 03: FAIL — link quotient {rq} at vertex {x}"
        );
    }
    assert!(
        report.unconditional_residual < 1e-8,
        "criterion 03: FAIL — link-energy identity residual {}",
        report.unconditional_residual
    );
    assert!(
        report.ed_residual < 1e-8,
        "criterion 03: FAIL — local-energy identity residual {}",
        report.ed_residual
    );
    let harm = report.harmonic_residual.unwrap();
    assert!(
        harm < 1e-8,
        "criterion 03: FAIL — harmonic identity residual {harm}"
    );
    pass(
        3,
        "torus identity",
        format!(
            "max |-Delta f(x)| = {max_lap:.2e}, link quotients = 1/2, residuals {:.2e}/{:.2e}/{:.2e}",
            report.unconditional_residual, report.ed_residual, harm
        ),
        started,
        1.0,
    );
}

#[test]
fn criterion_04_garland_inequality() {
    let started = Instant::now();
    let hosts = [models::icosahedron(), models::octahedron()];
    let floors: Vec<f64> = hosts
        .iter()
        .map(|cx| {
            (0..cx.vertex_count())
                .map(|x| {
                    spectral::scalar_spectral_gap(&cx.link_of(x).unwrap().graph)
                        .unwrap()
                        .lambda
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    for &f in &floors {
        assert!(f > 0.5, "host link gap {f} not above 1/2");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut min_slack = f64::INFINITY;
    for trial in 0..1000 {
        let which = trial % 2;
        let cx = &hosts[which];
        let lambda = floors[which];
        let n = cx.vertex_count();
        let map = if trial % 4 < 2 {
            VertexMap::euclidean(
                3,
                (0..n)
                    .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
                    .collect(),
            )
        } else {
            let nv = rng.gen_range(4..9);
            let tree = random_tree(&mut rng, nv);
            let points = (0..n).map(|_| random_tree_point(&mut rng, &tree)).collect();
            VertexMap {
                space: TargetSpace::Tree(tree),
                points,
            }
        };
        let report = harmonic::garland_inequality_check(cx, &map, lambda, None).unwrap();
        min_slack = min_slack.min(report.slack);
        assert!(
            report.slack >= -1e-9,
            "criterion 04: FAIL — trial {trial} slack {}",
            report.slack
        );
    }
    pass(
        4,
        "quantitative inequality",
        format!(
            "1000 seeded Euclidean/tree maps, link floors {{{:.5}, {:.5}}}, min slack {min_slack:.3e}",
            floors[0], floors[1]
        ),
        started,
        30.0,
    );
}

fn random_face_complex(rng: &mut ChaCha8Rng) -> WeightedComplex {
    loop {
        let n = rng.gen_range(5..12);
        let want = rng.gen_range(4..15);
        let mut faces = std::collections::BTreeSet::new();
        for _ in 0..want * 3 {
            let mut tri = [
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
            ];
            tri.sort_unstable();
            if tri[0] != tri[1] && tri[1] != tri[2] {
                faces.insert(tri);
                if faces.len() == want {
                    break;
                }
            }
        }
        if faces.is_empty() {
            continue;
        }
        // Compact the vertex ids so no declared vertex is isolated.
        let mut used: Vec<usize> = faces.iter().flatten().copied().collect();
        used.sort_unstable();
        used.dedup();
        let index: std::collections::BTreeMap<usize, usize> =
            used.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let faces: Vec<[usize; 3]> = faces
            .into_iter()
            .map(|t| [index[&t[0]], index[&t[1]], index[&t[2]]])
            .collect();
        let weights: Vec<f64> = faces.iter().map(|_| rng.gen_range(0.5..2.0)).collect();
        return propagate_weights(&faces, Some(&weights)).unwrap();
    }
}

#[test]
fn criterion_05_unconditional_identities() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut worst = 0.0f64;
    for trial in 0..1000 {
        let cx = random_face_complex(&mut rng);
        assert!(cx.every_edge_in_a_face());
        let n = cx.vertex_count();
        let map = if trial % 2 == 0 {
            VertexMap::euclidean(
                2,
                (0..n)
                    .map(|_| (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect())
                    .collect(),
            )
        } else {
            let nv = rng.gen_range(4..8);
            let tree = random_tree(&mut rng, nv);
            let points = (0..n).map(|_| random_tree_point(&mut rng, &tree)).collect();
            VertexMap {
                space: TargetSpace::Tree(tree),
                points,
            }
        };
        let report = harmonic::garland_identity_check(&cx, &map, None).unwrap();
        worst = worst.max(report.unconditional_residual).max(report.ed_residual);
        assert!(
            report.unconditional_residual < 1e-10,
            "criterion 05: FAIL — trial {trial} link-energy residual {}",
            report.unconditional_residual
        );
        assert!(
            report.ed_residual < 1e-10,
            "criterion 05: FAIL — trial {trial} local-energy residual {}",
            report.ed_residual
        );
    }
    pass(
        5,
        "unconditional identities",
        format!("1000 random maps on random face complexes, worst relative residual {worst:.2e}"),
        started,
        30.0,
    );
}

#[test]
fn criterion_06_flow_decay() {
    let started = Instant::now();
    let ico = models::icosahedron();
    let g = ico.skeleton();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut max_sweeps = 0usize;
    for trial in 0..100 {
        let map = VertexMap::euclidean(
            3,
            (0..12)
                .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect(),
        );
        let trace = harmonic::mayer_flow(g, &map, 0.5, 500, None).unwrap();
        let e0 = trace.steps[0].energy;
        let last = trace.steps.last().unwrap();
        for w in trace.steps.windows(2) {
            assert!(
                w[1].energy <= w[0].energy + 1e-12,
                "criterion 06: FAIL — trial {trial} energy rose at sweep {}",
                w[1].step
            );
        }
        assert!(
            last.energy < 1e-12 * e0,
            "criterion 06: FAIL — trial {trial} final energy {} vs start {e0}",
            last.energy
        );
        assert!(last.step <= 500);
        max_sweeps = max_sweeps.max(last.step);
    }
    pass(
        6,
        "flow decay",
        format!("100 random starts reached 1e-12 E0 within {max_sweeps} sweeps, monotone"),
        started,
        10.0,
    );
}

/// Grid-search dispersion oracle with per-point vertex distances
/// precomputed; points on the probed edge are handled by arclength.
fn grid_barycenter_oracle(
    tree: &MetricTree,
    pts: &WeightedPointSet,
    step: f64,
) -> (TargetPoint, f64) {
    let nv = tree.vertex_count();
    let mut vertex_dist = vec![vec![0.0; nv]; pts.points.len()];
    for (i, p) in pts.points.iter().enumerate() {
        for v in 0..nv {
            vertex_dist[i][v] = tree
                .point_distance(p, &TargetPoint::TreeVertex { vertex: v })
                .unwrap();
        }
    }
    let mut best = f64::INFINITY;
    let mut best_pt = TargetPoint::TreeVertex { vertex: 0 };
    for (ei, &(u, v, len)) in tree.edges().iter().enumerate() {
        let steps = (len / step).ceil() as usize;
        for s in 0..=steps {
            let t = len * s as f64 / steps as f64;
            let mut val = 0.0;
            for (i, (p, &w)) in pts.points.iter().zip(&pts.weights).enumerate() {
                let d = match p {
                    TargetPoint::TreeInterior { edge, offset } if *edge == ei => (t - offset).abs(),
                    _ => (vertex_dist[i][u] + t).min(vertex_dist[i][v] + (len - t)),
                };
                val += w * d * d;
            }
            if val < best {
                best = val;
                best_pt = tree
                    .canonicalize(&TargetPoint::TreeInterior { edge: ei, offset: t })
                    .unwrap();
            }
        }
    }
    (best_pt, best)
}

#[test]
fn criterion_07_barycenter_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst_dist = 0.0f64;
    for trial in 0..200 {
        let n = rng.gen_range(3..=13); // up to 12 edges
        let tree = random_tree(&mut rng, n);
        let k = rng.gen_range(2..7);
        let pts = WeightedPointSet::new(
            (0..k).map(|_| random_tree_point(&mut rng, &tree)).collect(),
            (0..k).map(|_| rng.gen_range(0.2..3.0)).collect(),
        )
        .unwrap();
        let space = TargetSpace::Tree(tree.clone());
        let descent = cat0::barycenter(&space, &pts).unwrap();
        let u_descent = cat0::dispersion_at(&space, &pts, &descent).unwrap();
        let (grid_pt, u_grid) = grid_barycenter_oracle(&tree, &pts, 1e-4);
        assert!(
            u_descent <= u_grid + 1e-9,
            "criterion 07: FAIL — trial {trial} descent value {u_descent} above grid {u_grid}"
        );
        let d = cat0::distance(&space, &descent, &grid_pt).unwrap();
        worst_dist = worst_dist.max(d);
        assert!(
            d < 1e-3,
            "criterion 07: FAIL — trial {trial} descent {d} away from grid optimum"
        );
    }
    pass(
        7,
        "barycenter oracle",
        format!("200 random trees, worst distance to the 1e-4 grid optimum {worst_dist:.2e}"),
        started,
        30.0,
    );
}

fn random_connected_graph(rng: &mut ChaCha8Rng) -> WeightedGraph {
    let n = rng.gen_range(4..10);
    let mut edges: Vec<(usize, usize, f64)> = (1..n)
        .map(|v| (rng.gen_range(0..v), v, 1.0))
        .collect();
    for _ in 0..rng.gen_range(0..5) {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            edges.push((u, v, 1.0));
        }
    }
    WeightedGraph::new(n, edges).unwrap()
}

#[test]
fn criterion_08_tree_rayleigh_bound() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut checked = 0usize;
    let mut worst_margin = f64::INFINITY;
    while checked < 10_000 {
        let g = random_connected_graph(&mut rng);
        let lambda = spectral::scalar_spectral_gap(&g).unwrap().lambda;
        let nv = rng.gen_range(3..9);
        let tree = random_tree(&mut rng, nv);
        let n = g.vertex_count();
        let points: Vec<TargetPoint> =
            (0..n).map(|_| random_tree_point(&mut rng, &tree)).collect();
        let map = VertexMap {
            space: TargetSpace::Tree(tree.clone()),
            points: points.clone(),
        };
        let rq = match spectral::rayleigh_quotient(&g, &map) {
            Ok(rq) => rq,
            Err(spectral::SpectralError::ConstantMap) => continue,
            Err(e) => panic!("criterion 08: FAIL — {e}"),
        };
        worst_margin = worst_margin.min(rq - lambda);
        assert!(
            rq >= lambda - 1e-9,
            "criterion 08: FAIL — quotient {rq} below scalar gap {lambda}"
        );
        // The closing construction behind the bound closes whenever the
        // barycenter sits at the apex of its tangent star.
        let pts = WeightedPointSet::new(points, (0..n).map(|x| g.vertex_weight(x)).collect())
            .unwrap();
        let bar = cat0::barycenter(&map.space, &pts).unwrap();
        let star = cat0::tangent_cone_star(&tree, &bar, &pts).unwrap();
        let total: f64 = star.radial_mass.iter().sum();
        if total > 0.0 {
            let e = cat0::polygon_closing_embedding(&star).unwrap_or_else(|err| {
                panic!("criterion 08: FAIL — closing infeasible at a barycenter: {err}")
            });
            let mut sum = [0.0, 0.0];
            for (a, dir) in star.radial_mass.iter().zip(&e) {
                sum[0] += a * dir[0];
                sum[1] += a * dir[1];
            }
            let resid = (sum[0] * sum[0] + sum[1] * sum[1]).sqrt();
            assert!(
                resid <= 1e-9 * total,
                "criterion 08: FAIL — closing residual {resid} vs mass {total}"
            );
        }
        checked += 1;
    }
    pass(
        8,
        "tree quotient bound",
        format!("10000 random tree-target maps, worst margin over the scalar gap {worst_margin:.3e}"),
        started,
        60.0,
    );
}

#[test]
fn criterion_09_wirtinger() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut checked = 0usize;
    while checked < 10_000 {
        let k = rng.gen_range(4..=12);
        let map = if checked % 2 == 0 {
            let dim = rng.gen_range(1..=3);
            VertexMap::euclidean(
                dim,
                (0..k)
                    .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
                    .collect(),
            )
        } else {
            let nv = rng.gen_range(3..8);
            let tree = random_tree(&mut rng, nv);
            let points = (0..k).map(|_| random_tree_point(&mut rng, &tree)).collect();
            VertexMap {
                space: TargetSpace::Tree(tree),
                points,
            }
        };
        let report = match wirtinger::wir_check(&map) {
            Ok(r) => r,
            Err(wirtinger::WirtingerError::ConstantMap) => continue,
            Err(e) => panic!("criterion 09: FAIL — {e}"),
        };
        // The sharp per-class bound implies the raw one; assert the raw
        // inequality explicitly as stated.
        for row in &report.rows {
            assert!(row.pass, "criterion 09: FAIL — k={k} j={}", row.j);
            if let Some(ratio) = row.ratio {
                assert!(
                    ratio >= row.raw_bound - 1e-9,
                    "criterion 09: FAIL — k={k} j={} ratio {ratio} below {}",
                    row.j,
                    row.raw_bound
                );
            }
        }
        checked += 1;
    }
    // Equality at the regular polygon, per class, against the sharp
    // reference (the antipodal class carries half the stepped mass).
    for k in 4..=12 {
        let polygon = VertexMap::euclidean(
            2,
            (0..k)
                .map(|i| {
                    let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect(),
        );
        let report = wirtinger::wir_check(&polygon).unwrap();
        assert_eq!(report.affine_circle, Some(true));
        for row in &report.rows {
            assert!(
                row.equality,
                "criterion 09: FAIL — regular {k}-gon misses equality at j = {}",
                row.j
            );
        }
    }
    pass(
        9,
        "cycle inequalities",
        "10000 random Euclidean/tree cycle maps pass; regular k-gons attain equality".to_string(),
        started,
        60.0,
    );
}

#[test]
fn criterion_10_random_graphs() {
    let started = Instant::now();
    let params = PermutationModelParams {
        n: 2000,
        d: 4,
        seed: 10,
    };
    let samples = 50;
    let mut lambdas = Vec::with_capacity(samples);
    for i in 0..samples {
        let g = randomgen::permutation_model_sample(&params, i as u64).unwrap();
        let rep = spectral::scalar_spectral_gap(&g).unwrap();
        let lambda = rep.lambda;
        if rep.connected {
            let bound = spectral::trace_method_gap_bound(&g, 6).unwrap();
            assert!(
                bound <= lambda + 1e-10,
                "criterion 10: FAIL — sample {i} trace bound {bound} above gap {lambda}"
            );
        }
        lambdas.push(lambda);
    }
    let mean = lambdas.iter().sum::<f64>() / samples as f64;
    let tree = 1.0 - 2.0 * 7.0f64.sqrt() / 8.0;
    let lo = tree - 0.05;
    assert!(
        mean >= lo && mean <= 1.0,
        "criterion 10: FAIL — mean gap {mean} outside [{lo}, 1]"
    );
    pass(
        10,
        "random regular graphs",
        format!(
            "50 samples at n=2000, d=4: mean gap {mean:.5} in [{lo:.5}, 1], trace bound below eigensolve throughout"
        ),
        started,
        300.0,
    );
}

#[test]
fn criterion_11_random_groups() {
    let started = Instant::now();
    let seed = 1;
    let samples = 50;
    let mut fractions = Vec::new();
    for &m in &[10usize, 20, 40] {
        let verdicts = randomgen::zuk_verdict_batch(m, 0.4, seed, samples).unwrap();
        // Cross-check every reported gap against an independent eigensolve
        // of the emitted link graph.
        for (i, v) in verdicts.iter().enumerate() {
            let pres = randomgen::density_presentation_sample(m, 0.4, seed, i as u64).unwrap();
            let g = randomgen::link_graph_of_presentation(&pres);
            let isolated = (0..g.vertex_count()).any(|x| !(g.vertex_weight(x) > 0.0));
            let expected = if isolated || !g.is_connected() {
                0.0
            } else {
                spectral::scalar_spectral_gap(&g).unwrap().lambda
            };
            assert!(
                (v.lambda - expected).abs() < 1e-12,
                "criterion 11: FAIL — m={m} sample {i} verdict gap {} vs eigensolve {expected}",
                v.lambda
            );
        }
        let certified = verdicts.iter().filter(|v| v.certified).count();
        fractions.push(certified as f64 / samples as f64);
    }
    println!(
        "criterion 11 (random groups): certified fractions at m = 10, 20, 40: {:?} (seed {seed}, 50 samples; larger m for context: see notes)",
        fractions
    );
    assert!(
        fractions[0] <= fractions[1] && fractions[1] <= fractions[2],
        "criterion 11: FAIL — certified fraction not nondecreasing across m in {{10, 20, 40}}: {:?}; \
         at density 0.4 the link-graph mean gap crosses 1/2 only near m ~ 100 (average valence \
         3 N / m ~ 15 is the crossover), so the desk-scale trend at these m is genuinely \
         decreasing while the gap distribution concentrates below the threshold; the asymptotic \
         onset is visible at m in {{40, 80, 160}}",
        fractions
    );
    pass(
        11,
        "random groups",
        format!("certified fractions {fractions:?} nondecreasing; verdict gaps match eigensolves"),
        started,
        120.0,
    );
}

#[test]
fn criterion_12_certificates() {
    let started = Instant::now();
    let ico = models::icosahedron();
    let torus = models::torus_3x3();

    let hilbert = harmonic::fixed_point_certificate(&ico, TargetClass::Hilbert).unwrap();
    let c5 = 1.0 - (2.0 * std::f64::consts::PI / 5.0).cos();
    assert!(
        hilbert.granted && hilbert.property_t_certified,
        "criterion 12: FAIL — pentagon-link complex refused"
    );
    assert!(
        (hilbert.min_link_gap - c5).abs() < 1e-9,
        "criterion 12: FAIL — min gap {} vs pentagon value {c5}",
        hilbert.min_link_gap
    );

    let refused = harmonic::fixed_point_certificate(&torus, TargetClass::Hilbert).unwrap();
    assert!(
        !refused.granted && (refused.min_link_gap - 0.5).abs() < 1e-9,
        "criterion 12: FAIL — torus verdict granted={} min gap {}",
        refused.granted,
        refused.min_link_gap
    );

    let delta = 0.4122;
    let bounded =
        harmonic::fixed_point_certificate(&ico, TargetClass::InBounded { delta }).unwrap();
    let threshold = 1.0 / (2.0 * (1.0 - delta));
    assert!(
        (bounded.threshold - threshold).abs() < 1e-12 && !bounded.granted,
        "criterion 12: FAIL — delta verdict granted={} threshold {}",
        bounded.granted,
        bounded.threshold
    );
    assert!(threshold > bounded.min_link_gap);
    pass(
        12,
        "certificates",
        format!(
            "pentagon links granted (gap {:.5} > 1/2), torus refused (gap 0.5), delta = {delta} refused (threshold {:.5})",
            hilbert.min_link_gap, threshold
        ),
        started,
        1.0,
    );
}

#[test]
fn criterion_13_determinism() {
    let started = Instant::now();
    let params = PermutationModelParams {
        n: 120,
        d: 3,
        seed: 13,
    };
    let a = randomgen::spectral_statistics(&params, 6, 0.17).unwrap();
    let b = randomgen::spectral_statistics(&params, 6, 0.17).unwrap();
    let ja = serde_json::to_string(&a).unwrap();
    let jb = serde_json::to_string(&b).unwrap();
    assert_eq!(ja, jb, "criterion 13: FAIL — statistics reports differ");

    let va = randomgen::zuk_verdict_batch(12, 0.4, 13, 10).unwrap();
    let vb = randomgen::zuk_verdict_batch(12, 0.4, 13, 10).unwrap();
    let ja = serde_json::to_string(&va).unwrap();
    let jb = serde_json::to_string(&vb).unwrap();
    assert_eq!(ja, jb, "criterion 13: FAIL — verdict batches differ");

    let torus = models::torus_3x3();
    let c = harmonic::EdgeCocycle::new(2, models::torus_lattice_cocycle(&torus)).unwrap();
    let f1 = harmonic::solve_twisted_harmonic(&torus, &c).unwrap();
    let f2 = harmonic::solve_twisted_harmonic(&torus, &c).unwrap();
    assert_eq!(
        serde_json::to_string(&f1).unwrap(),
        serde_json::to_string(&f2).unwrap(),
        "criterion 13: FAIL — twisted solves differ"
    );
    pass(
        13,
        "determinism",
        "repeated seeded runs serialize byte-identically (CLI-level check in the cli crate)"
            .to_string(),
        started,
        30.0,
    );
}
