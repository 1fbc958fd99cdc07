//! Acceptance criteria, one `PASS`/`FAIL` line each. Exits nonzero when any
//! criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use nkgeom_core::chart::{
    geometry_at, grad_ricci_identities, grad_ricci_identities_with, nearly_kahler_defect,
    schur_scan, seeded_points, Chart, GeometryOptions, PolynomialHermitianChart, SCHUR_STEP,
};
use nkgeom_core::constructors::{kahler_space_form, s6_curvature, s6_point, space_form_product};
use nkgeom_core::hermitian::sample_antiholomorphic_plane_indexed;
use nkgeom_core::invariants::{
    antiholo_range, classify, eq13_value, prop1_report, sectional, Budget, ModelClass,
};
use nkgeom_core::lemma::lemma_kernel;
use nkgeom_core::{FourTensor, HermitianPoint};

const SEED: u64 = 2024;

type Criterion = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn budget() -> Budget {
    Budget {
        samples: 500,
        refine_steps: 50,
    }
}

/// S6 data at a seeded point, and the two complex space forms of dimension 6.
fn pointwise_models() -> Vec<(&'static str, HermitianPoint, FourTensor, f64)> {
    let base = DVector::from_column_slice(
        &seeded_points(&Chart::embedded_s6(SEED), 1, SEED, 0.0).unwrap()[0],
    );
    let s6 = s6_point(&base, SEED).unwrap().point;
    let p = HermitianPoint::standard(3).unwrap();
    vec![
        ("S6", s6.clone(), s6_curvature(&s6).unwrap(), 1.0),
        ("CP3(4)", p.clone(), kahler_space_form(&p, 4.0), 1.0),
        ("CD3(-4)", p.clone(), kahler_space_form(&p, -4.0), -1.0),
    ]
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    let mut nu_err = 0.0f64;
    let mut slowest = Duration::ZERO;
    for (_, p, r, nu) in pointwise_models() {
        let start = Instant::now();
        let rep = prop1_report(&r, &p, budget(), SEED).unwrap();
        slowest = slowest.max(start.elapsed());
        worst = worst
            .max(rep.eq6_residual)
            .max(rep.eq7_defect)
            .max(rep.eq9_max_defect);
        nu_err = nu_err.max((rep.nu_hat - nu).abs());
    }
    Outcome::new(
        worst <= 1e-10 && nu_err <= 1e-12 && slowest < Duration::from_secs(1),
        format!("max residual {worst:.2e}, nu error {nu_err:.2e}, slowest {slowest:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for (_, p, r, _) in pointwise_models() {
        let rep = prop1_report(&r, &p, budget(), SEED).unwrap();
        worst = worst
            .max((rep.nu_hat - rep.nu_min).abs())
            .max((rep.nu_hat - rep.nu_max).abs());
    }
    Outcome::new(
        worst <= 1e-8,
        format!("max |nu_hat - nu_min/max| {worst:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [2, 3] {
        let k = lemma_kernel(&HermitianPoint::standard(n).unwrap(), 1e-8);
        pass &= k.kernel_dim == 0 && k.singular_ratio() >= 1e-8;
        parts.push(format!(
            "dim {}: kernel {} of {}, ratio {:.2e}",
            k.dim,
            k.kernel_dim,
            k.symmetric_space_dim,
            k.singular_ratio()
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(30);
    Outcome::new(pass, format!("{}; {elapsed:.2?}", parts.join("; ")))
}

fn criterion_4() -> Outcome {
    let (h, half) = (0.02, 0.01);
    let plain = GeometryOptions::finite_difference(false);
    let (mut analytic, mut coarse, mut min_gain) = (0.0f64, 0.0f64, f64::INFINITY);
    for seed in 0..5 {
        let chart = Chart::parametric(PolynomialHermitianChart::new(
            2,
            PolynomialHermitianChart::DEFAULT_EPS,
            SEED + seed,
        ));
        let u = &seeded_points(&chart, 1, seed, 0.1).unwrap()[0];
        let a = grad_ricci_identities(&chart, u, h).unwrap();
        let f1 = grad_ricci_identities_with(&chart, u, h, plain).unwrap();
        let f2 = grad_ricci_identities_with(&chart, u, half, plain).unwrap();
        analytic = analytic.max(a.eq1_defect).max(a.eq2_defect);
        coarse = coarse.max(f1.eq1_defect).max(f1.eq2_defect);
        min_gain = min_gain
            .min(f1.eq1_defect / f2.eq1_defect)
            .min(f1.eq2_defect / f2.eq2_defect);
    }
    Outcome::new(
        analytic <= 1e-6 && coarse <= 1e-3 && min_gain >= 3.0,
        format!("analytic {analytic:.2e}, finite differences at h={h} {coarse:.2e}, min gain on halving {min_gain:.2}"),
    )
}

fn criterion_5() -> Outcome {
    let chart = Chart::embedded_s6(SEED);
    let (mut nk, mut kahler_min, mut routes, mut sect) = (0.0f64, f64::INFINITY, 0.0f64, 0.0f64);
    for (k, u) in seeded_points(&chart, 20, SEED, 0.0)
        .unwrap()
        .iter()
        .enumerate()
    {
        let d = nearly_kahler_defect(&chart, u, 1e-3).unwrap();
        nk = nk.max(d.nk);
        kahler_min = kahler_min.min(d.kahler);
        let geo = geometry_at(&chart, u, 1e-3).unwrap();
        routes = routes.max(geo.gauss_route_defect.unwrap_or(f64::INFINITY));
        for i in 0..20 {
            let x = geo.hermitian.random_unit_vector(k as u64, 2 * i);
            let y = geo.hermitian.random_unit_vector(k as u64, 2 * i + 1);
            sect = sect.max((geo.sectional(&x, &y) - 1.0).abs());
        }
    }
    Outcome::new(
        nk <= 1e-5 && kahler_min >= 0.1 && routes <= 1e-5 && sect <= 1e-5,
        format!(
            "nk {nk:.2e}, min kahler {kahler_min:.3}, route gap {routes:.2e}, |K-1| {sect:.2e}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, chart, margin) in [
        ("S6", Chart::embedded_s6(SEED), 0.0),
        (
            "FS(3,4)",
            Chart::complex_space_form(3, 4.0),
            3.0 * SCHUR_STEP,
        ),
    ] {
        let points = seeded_points(&chart, 10, SEED, margin).unwrap();
        let scan = schur_scan(
            &chart,
            &points,
            Budget {
                samples: 0,
                refine_steps: 0,
            },
            SEED,
        )
        .unwrap();
        pass &= scan.spread <= 2e-4 && (scan.mean - 1.0).abs() <= 1e-4;
        parts.push(format!(
            "{name} spread {:.2e} mean-1 {:.2e}",
            scan.spread,
            scan.mean - 1.0
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn criterion_7() -> Outcome {
    let mut cases: Vec<(String, HermitianPoint, FourTensor, ModelClass)> = Vec::new();
    for n in [3, 4] {
        let p = HermitianPoint::standard(n).unwrap();
        cases.push((
            format!("C{n}"),
            p.clone(),
            FourTensor::zeros(2 * n),
            ModelClass::Cn,
        ));
        cases.push((
            format!("CP{n}"),
            p.clone(),
            kahler_space_form(&p, 4.0),
            ModelClass::CPn,
        ));
        cases.push((
            format!("CD{n}"),
            p.clone(),
            kahler_space_form(&p, -4.0),
            ModelClass::CDn,
        ));
    }
    let (name, p, r, _) = pointwise_models().remove(0);
    cases.push((name.to_string(), p, r, ModelClass::S6));
    let product = space_form_product(&[(1, 4.0), (2, 4.0)]).unwrap();
    cases.push((
        "CP1xCP2".into(),
        product.point.clone(),
        product.tensor.clone(),
        ModelClass::NonConstant,
    ));

    let mut wrong = Vec::new();
    for (name, p, r, expected) in &cases {
        let label = classify(r, p, budget(), SEED, 1e-9).unwrap().label;
        if label != *expected {
            wrong.push(format!("{name}: {label}"));
        }
    }

    // The product range: every antiholomorphic plane has K >= 0 (dense
    // sampling), K = 0 is attained on a mixed plane, and the maximum is
    // positive.
    let (p, r) = (&product.point, &product.tensor);
    let sampled_min = (0..20_000)
        .map(|i| {
            sectional(
                r,
                p,
                &sample_antiholomorphic_plane_indexed(p, SEED, i).unwrap(),
            )
            .unwrap()
        })
        .fold(f64::INFINITY, f64::min);
    let e = |i: usize| DVector::from_fn(6, |k, _| if k == i { 1.0 } else { 0.0 });
    let mixed = sectional(r, p, &nkgeom_core::TwoPlane::new(e(0), e(2))).unwrap();
    let range = antiholo_range(r, p, 500, 50, SEED).unwrap();
    let range_ok = sampled_min >= -1e-12
        && mixed.abs() <= 1e-12
        && range.nu_min.abs() <= 1e-8
        && range.nu_max > 0.1;

    let correct = cases.len() - wrong.len();
    Outcome::new(
        wrong.is_empty() && range_ok,
        format!(
            "{correct}/{} labels; product sampled min {sampled_min:.2e}, mixed plane {mixed:.1e}, range [{:.2e}, {:.3}]{}",
            cases.len(),
            range.nu_min,
            range.nu_max,
            if wrong.is_empty() { String::new() } else { format!("; wrong: {}", wrong.join(", ")) }
        ),
    )
}

fn criterion_8() -> Outcome {
    let unit = |dim: usize, i: usize| DVector::from_fn(dim, |k, _| if k == i { 1.0 } else { 0.0 });
    let opposite = space_form_product(&[(1, 4.0), (1, -4.0)]).unwrap();
    let opposite2 = space_form_product(&[(2, 3.0), (2, -3.0)]).unwrap();
    let same = space_form_product(&[(1, 4.0), (1, 4.0)]).unwrap();
    let a = eq13_value(&opposite, &unit(4, 0), &unit(4, 3)).unwrap();
    let b = eq13_value(&opposite2, &unit(8, 1), &unit(8, 6)).unwrap();
    let c = eq13_value(&same, &unit(4, 1), &unit(4, 2)).unwrap();
    Outcome::new(
        a.abs() <= 1e-10 && b.abs() <= 1e-10 && (c - 8.0).abs() <= 1e-10,
        format!("opposite factors {a:.2e} and {b:.2e}; CP1(4)xCP1(4) {c}"),
    )
}

fn criterion_9() -> Outcome {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.txt");
    let run = || {
        let status = Command::new(env!("CARGO_BIN_EXE_nkgeom"))
            .args(["verify", "--config"])
            .arg(golden.join("s6.conf"))
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap()
            .status;
        let text = std::fs::read(&out).unwrap_or_default();
        let json = std::fs::read(dir.path().join("report.txt.json")).unwrap_or_default();
        (status.code(), text, json)
    };
    let first = run();
    let second = run();
    let expected = std::fs::read(golden.join("s6.report")).unwrap();
    let identical = first == second;
    let matches_golden = first.1 == expected;
    Outcome::new(
        identical && matches_golden && first.0 == Some(0),
        format!(
            "identical runs {identical}, golden match {matches_golden}, exit {:?}",
            first.0
        ),
    )
}

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("decomposition on models", criterion_1),
        ("scalar nu equals measured range", criterion_2),
        ("vanishing lemma kernel", criterion_3),
        ("contracted Bianchi identities", criterion_4),
        ("nearly Kahler six-sphere", criterion_5),
        ("Schur scan", criterion_6),
        ("classification labels", criterion_7),
        ("product Ricci sum", criterion_8),
        ("CLI determinism and golden report", criterion_9),
    ];
    let mut failed = 0;
    for (index, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name}: {}",
            if outcome.pass { "PASS" } else { "FAIL" },
            index + 1,
            outcome.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
