//! The fourteen acceptance criteria, one `PASS`/`FAIL` line each.
//!
//! Quantities are recomputed here from library primitives wherever that is
//! cheap; the bundled-experiment criteria (absorption and comparison) read
//! the checks of the preset runs, which is what they are about.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::{dense_green, max_abs_diff};
use schrolab::experiment::{run_preset, value_near_singularity, Outcome, Overrides, Preset};
use schrolab::green::{green_batch, green_function};
use schrolab::grid::{build_grid, DomainKind, DomainSpec, Field, Grid, Point};
use schrolab::linsolve::{cg_solve, SolveOptions};
use schrolab::potential::{Potential, TruncationLadder};
use schrolab::principles::{hopf_criterion_1d, oned_regime_classifier, OnedRegime};
use schrolab::schrodinger::{solve_ladder, torsion};
use schrolab::zeroset::{analyze, orthogonality, solve_off_z, Verdict, ZeroSetReport, ZeroSetThresholds};

const DISK: DomainKind = DomainKind::Disk { center: [0.0, 0.0], radius: 1.0 };
const REFINEMENT: [usize; 3] = [33, 65, 129];

struct Verdict14 {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict14 {
    Verdict14 { passed, detail: detail.into() }
}

fn opts() -> SolveOptions {
    SolveOptions::default()
}

fn ladder() -> TruncationLadder {
    TruncationLadder::default()
}

fn disk(n: usize) -> Grid {
    build_grid(DomainSpec::new(DISK, n)).unwrap()
}

fn point3() -> Potential {
    Potential::point([0.0, 0.0], 3.0)
}

fn twin(alpha: f64, beta: f64) -> Potential {
    Potential::Sum(vec![Potential::hyperplane(0, -0.3, alpha), Potential::hyperplane(0, 0.4, beta)])
}

fn obstacle(alpha: f64) -> Potential {
    Potential::distance_to_set(DomainKind::Disk { center: [0.0, 0.0], radius: 0.3 }, alpha)
}

fn zero_set(g: &Grid, v: &Potential) -> (Field, ZeroSetReport) {
    let (zeta1, _, rep) = analyze(g, v, &ladder(), &opts(), &ZeroSetThresholds::default()).unwrap();
    (zeta1, rep)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(",")
}

fn c1_torsion() -> Verdict14 {
    let line = build_grid(DomainSpec::interval(-1.0, 1.0, 65)).unwrap();
    let (theta, _) = torsion(&line, &opts()).unwrap();
    let err = line
        .nodes()
        .iter()
        .zip(theta.values())
        .map(|(p, v)| (v - 0.5 * (1.0 - p[0] * p[0])).abs())
        .fold(0.0, f64::max);
    let mut ok = err <= 1e-9;
    let mut detail = format!("interval err={err:.2e}");
    for n in REFINEMENT {
        let g = disk(n);
        let (theta, _) = torsion(&g, &opts()).unwrap();
        let gap = (theta.max() - 0.25).abs();
        ok &= gap <= 3.0 * g.h();
        detail += &format!(" n{n}:|max-0.25|={gap:.2e}<=3h={:.2e}", 3.0 * g.h());
    }
    verdict(ok, detail)
}

fn c2_green_triangle() -> Verdict14 {
    let line = build_grid(DomainSpec::interval(-1.0, 1.0, 65)).unwrap();
    let g = green_function(&line, &Potential::Zero, [0.0, 0.0], &ladder(), &opts()).unwrap();
    let err = line
        .nodes()
        .iter()
        .zip(g.field.values())
        .map(|(p, v)| (v - 0.5 * (1.0 - p[0].abs())).abs())
        .fold(0.0, f64::max);
    verdict(err <= 1e-9, format!("err={err:.2e}"))
}

fn c3_green_symmetry() -> Verdict14 {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_dense: f64 = 0.0;
    for spec in [
        DomainSpec::rectangle(-1.0, 1.0, -1.0, 1.0, 9),
        DomainSpec::disk([0.0, 0.0], 1.0, 9),
        DomainSpec::interval(-1.0, 1.0, 9),
    ] {
        let g = build_grid(spec).unwrap();
        let w: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(0.0..30.0)).collect();
        let v = Potential::Tabulated(Arc::new(g.clone()), g.field(w.clone()).unwrap());
        for _ in 0..3 {
            let x = rng.gen_range(0..g.len());
            let y = rng.gen_range(0..g.len());
            let gx = green_function(&g, &v, g.node(x), &ladder(), &opts()).unwrap();
            let gy = green_function(&g, &v, g.node(y), &ladder(), &opts()).unwrap();
            worst_dense = worst_dense
                .max((gx.field.get(y) - gy.field.get(x)).abs())
                .max(max_abs_diff(gx.field.values(), &dense_green(&g, &w, x)));
        }
    }
    let g = disk(65);
    let greens = green_batch(&g, &point3(), &[[-0.4, 0.1], [0.45, -0.05]], &ladder(), &opts()).unwrap();
    let (a, b) = (greens[0].field.get(greens[1].source_node), greens[1].field.get(greens[0].source_node));
    let relative = rel(a, b);
    verdict(
        worst_dense <= 1e-8 && relative <= 0.02,
        format!("dense defect={worst_dense:.2e} n65 relative={relative:.2e}"),
    )
}

fn c4_representation() -> Verdict14 {
    let g = disk(65);
    let v = point3();
    let one = g.constant(1.0);
    let (u, _) = solve_ladder(&g, &v, &one, &ladder(), &opts()).unwrap();
    let samples: [Point; 5] = [[0.3, 0.2], [-0.4, 0.1], [0.1, -0.5], [-0.2, -0.3], [0.55, 0.35]];
    let mut worst: f64 = 0.0;
    for p in samples {
        let gx = green_function(&g, &v, p, &ladder(), &opts()).unwrap();
        let via_green = g.integrate(&gx.field).unwrap();
        worst = worst.max(rel(u.get(g.nearest_node(p)), via_green));
    }
    verdict(worst <= 0.02, format!("worst relative error={worst:.2e}"))
}

fn bundled_checks(runs: &[(String, Outcome)], prefix: &str) -> Verdict14 {
    let mut count = 0;
    let mut worst = f64::INFINITY;
    let mut failed = Vec::new();
    for (label, out) in runs {
        for c in out.checks.iter().filter(|c| c.name.starts_with(prefix)) {
            count += 1;
            worst = worst.min(c.margin);
            if !c.passed {
                failed.push(format!("{label}/{}", c.name));
            }
        }
    }
    verdict(
        count > 0 && failed.is_empty(),
        format!("{count} checks, worst margin={worst:.2e} failed={failed:?}"),
    )
}

fn c6_domination() -> Verdict14 {
    let g = disk(33);
    let v = point3();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let k = 2f64.powi(20);
    let w = v.truncate_to_field(&g, k).unwrap();
    let (zeta1, _) = cg_solve(&g, &w, &g.constant(1.0), &opts()).unwrap();
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let amplitude = rng.gen_range(0.1..5.0);
        let f = g.field((0..g.len()).map(|_| amplitude * rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let (u, _) = cg_solve(&g, &w, &f, &opts()).unwrap();
        let sup = f.linf();
        let margin = zeta1.values().iter().zip(u.values()).map(|(z, x)| sup * z - x.abs()).fold(f64::INFINITY, f64::min);
        worst = worst.min(margin);
    }
    verdict(worst >= -1e-8, format!("worst margin={worst:.2e}"))
}

fn c8_point_refinement() -> Verdict14 {
    let v = point3();
    let mut near = Vec::new();
    let mut half = Vec::new();
    for n in REFINEMENT {
        let g = disk(n);
        let (u, _) = solve_ladder(&g, &v, &g.constant(1.0), &ladder(), &opts()).unwrap();
        near.push(value_near_singularity(&g, &v, &u, [0.0, 0.0]));
        half.push(u.get(g.nearest_node([0.5, 0.0])));
    }
    let decreasing = near.windows(2).all(|w| w[1] < w[0]);
    let drift = half.windows(2).map(|w| rel(w[0], w[1])).fold(0.0, f64::max);
    verdict(
        decreasing && drift < 0.05,
        format!("u near a={} u at distance 0.5={} drift={drift:.2e}", sci(&near), sci(&half)),
    )
}

fn c9_twin_half() -> Verdict14 {
    let g = disk(129);
    let h = g.h();
    let v = twin(3.0, 1.5);
    let (_, rep) = zero_set(&g, &v);
    let (u, _) = solve_off_z(&g, &v, &g.constant(1.0), &rep.z, &ladder(), &opts()).unwrap();
    let top = u.max();
    let (mut right, mut left) = (f64::NEG_INFINITY, f64::INFINITY);
    for (i, p) in g.nodes().iter().enumerate() {
        if p[0] >= -0.3 + 4.0 * h {
            right = right.max(u.get(i));
        }
        if p[0] <= -0.3 - 4.0 * h && 1.0 - p[0].hypot(p[1]) >= 4.0 * h {
            left = left.min(u.get(i));
        }
    }
    verdict(
        right <= 1e-2 * top && left > 1e-3 * top,
        format!("right/max={:.2e} left/max={:.2e} verdicts={:?}", right / top, left / top, rep.verdicts()),
    )
}

fn c10_twin_three() -> Verdict14 {
    let g = disk(65);
    let v = twin(3.0, 3.0);
    let (_, rep) = zero_set(&g, &v);
    let count = rep.labels.count();
    if count != 3 {
        return verdict(false, format!("{count} components"));
    }
    let mean_x = |label: usize| {
        let nodes = rep.labels.nodes(label);
        nodes.iter().map(|&i| g.node(i)[0]).sum::<f64>() / nodes.len() as f64
    };
    let middle = (0..3).find(|&l| (-0.3..0.4).contains(&mean_x(l))).unwrap();
    let f = rep.labels.mask(&g, middle).indicator();
    let (u, _) = solve_ladder(&g, &v, &f, &ladder(), &opts()).unwrap();
    let top = u.max();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| mean_x(a).total_cmp(&mean_x(b)));
    let signs: Vec<&str> = order
        .iter()
        .map(|&l| {
            let vals: Vec<f64> = rep.labels.nodes(l).iter().map(|&i| u.get(i)).collect();
            let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
            if hi < 1e-2 * top {
                "zero"
            } else if lo > 1e-3 * top {
                "positive"
            } else {
                "violation"
            }
        })
        .collect();
    verdict(signs == ["zero", "positive", "zero"], format!("left to right {signs:?}"))
}

fn c11_obstacle() -> Verdict14 {
    let mut defects_low = Vec::new();
    let mut low_ok = true;
    for n in [65, 129] {
        let (_, rep) = zero_set(&disk(n), &obstacle(1.5));
        low_ok &= !rep.components.is_empty() && rep.components.iter().all(|c| c.verdict == Verdict::InZ && c.defect > 0.02);
        defects_low.push(rep.components.iter().map(|c| c.defect).fold(f64::INFINITY, f64::min));
    }
    let drift = rel(defects_low[0], defects_low[1]);
    low_ok &= drift <= 0.1;

    let ring = DomainKind::Disk { center: [0.0, 0.0], radius: 0.3 };
    let mut defects_high = Vec::new();
    let mut high_ok = true;
    let mut far_ratio: f64 = 0.0;
    for n in REFINEMENT {
        let g = disk(n);
        let (_, rep) = zero_set(&g, &obstacle(3.0));
        high_ok &= rep.components.iter().all(|c| c.verdict == Verdict::NotInZ);
        defects_high.push(rep.components.iter().map(|c| c.defect).fold(0.0, f64::max));
        let far = rep.z.indices().map(|i| ring.distance_to_closure(g.node(i))).fold(0.0, f64::max);
        far_ratio = far_ratio.max(far / g.h());
    }
    high_ok &= far_ratio <= 2.0 && defects_high.windows(2).all(|w| w[1] < w[0]);
    verdict(
        low_ok && high_ok,
        format!(
            "alpha1.5 defects={defects_low:.4?} drift={drift:.2e}; alpha3 defects={} max dist(Z,obstacle)/h={far_ratio:.2}",
            sci(&defects_high)
        ),
    )
}

fn c12_orthogonality() -> Verdict14 {
    let g = disk(65);
    let v = obstacle(3.0);
    let (_, rep) = zero_set(&g, &v);
    let o = orthogonality(&g, &v, &rep.z, &ladder(), &opts()).unwrap();
    let theta = torsion(&g, &opts()).unwrap().0.linf();
    let bound = 1e-3 * std::f64::consts::PI * theta;
    let worst = o.off_z_on_z.max(o.on_z_off_z);
    verdict(worst <= bound, format!("cross integrals {:.2e} {:.2e} bound={bound:.2e}", o.off_z_on_z, o.on_z_off_z))
}

fn c13_oned() -> Verdict14 {
    let want = [(0.5, OnedRegime::ZEmpty), (1.5, OnedRegime::ZEverything), (2.5, OnedRegime::ZPoint)];
    let mut ok = true;
    let mut got = Vec::new();
    for (alpha, regime) in want {
        let c = oned_regime_classifier(alpha, &ladder(), 33, &opts()).unwrap();
        ok &= c.regime == regime && !c.mismatch;
        got.push(c.regime.as_str());
    }
    let diverges = |a: f64| hopf_criterion_1d(&Potential::point([0.0, 0.0], a), 0.0, 0.5).unwrap().diverges;
    let flip = !diverges(1.9) && diverges(2.0);
    verdict(ok && flip, format!("regimes={got:?} hopf 1.9={} 2.0={}", diverges(1.9), diverges(2.0)))
}

fn csv_bytes(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "csv") {
                let key = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                files.insert(key, std::fs::read(&path).unwrap());
            }
        }
    }
    files
}

fn c14_determinism() -> Verdict14 {
    let tmp = tempfile::tempdir().unwrap();
    let mut trees = Vec::new();
    for run in ["first", "second"] {
        let out = tmp.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_schrolab"))
            .args(["run", "verify-all", "--n", "33", "--out"])
            .arg(&out)
            .output()
            .unwrap();
        if !status.status.success() {
            return verdict(false, format!("verify-all exited with {:?}", status.status.code()));
        }
        trees.push(csv_bytes(&out));
    }
    let same = trees[0] == trees[1];
    verdict(same && !trees[0].is_empty(), format!("{} CSV files, identical={same}", trees[0].len()))
}

#[test]
fn acceptance() {
    let bundled: Vec<(String, Outcome)> = [
        ("example-point", Preset::ExamplePoint, Overrides::default()),
        ("example-twin", Preset::ExampleTwin, Overrides::default()),
        ("example-twin beta=3", Preset::ExampleTwin, Overrides { beta: Some(3.0), ..Default::default() }),
        ("example-obstacle", Preset::ExampleObstacle, Overrides::default()),
        ("example-obstacle alpha=3", Preset::ExampleObstacle, Overrides { alpha: Some(3.0), ..Default::default() }),
        ("oned-sweep", Preset::OnedSweep, Overrides::default()),
        ("verify-all", Preset::VerifyAll, Overrides::default()),
    ]
    .into_par_iter()
    .map(|(label, preset, ov)| (label.to_owned(), run_preset(preset, &ov, &opts()).unwrap()))
    .collect();

    type Criterion<'a> = Box<dyn Fn() -> Verdict14 + Send + Sync + 'a>;
    let criteria: Vec<(&str, Criterion)> = vec![
        ("torsion-exactness", Box::new(c1_torsion)),
        ("green-triangle", Box::new(c2_green_triangle)),
        ("green-symmetry", Box::new(c3_green_symmetry)),
        ("representation", Box::new(c4_representation)),
        ("absorption", Box::new(|| bundled_checks(&bundled, "absorption"))),
        ("torsion-domination", Box::new(c6_domination)),
        ("comparison", Box::new(|| bundled_checks(&bundled, "comparison"))),
        ("point-singularity", Box::new(c8_point_refinement)),
        ("twin-half-disk", Box::new(c9_twin_half)),
        ("twin-three-regions", Box::new(c10_twin_three)),
        ("obstacle-defect", Box::new(c11_obstacle)),
        ("orthogonality", Box::new(c12_orthogonality)),
        ("oned-regimes", Box::new(c13_oned)),
        ("determinism", Box::new(c14_determinism)),
    ];
    let results: Vec<Verdict14> = criteria.par_iter().map(|(_, f)| f()).collect();

    let mut failed = Vec::new();
    for (i, ((name, _), r)) in criteria.iter().zip(&results).enumerate() {
        println!("{} {:>2} {name}: {}", if r.passed { "PASS" } else { "FAIL" }, i + 1, r.detail);
        if !r.passed {
            failed.push(*name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
