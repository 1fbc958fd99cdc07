use nkgeom_core::chart::{
    geometry_at, identity_report, schur_scan, seeded_points, Chart, PolynomialHermitianChart,
    SCHUR_STEP,
};
use nkgeom_core::constructors::{kahler_space_form, s6_curvature, s6_point, space_form_product};
use nkgeom_core::invariants::{
    classify, prop1_report, rk_defect, symmetry_defects, Budget, ModelClass,
};
use nkgeom_core::lemma::lemma_kernel;
use nkgeom_core::{FourTensor, GeometryError, HermitianPoint};
use thiserror::Error;

use crate::config::{CheckKind, ConfigError, ModelKind, ScenarioConfig};
use crate::report::{CheckRecord, Report, VERSION};

/// Points per chart check, and the step used there.
const IDENTITY_POINTS: usize = 3;
const IDENTITY_STEP: f64 = 1e-3;
const SCHUR_POINTS: usize = 10;
/// Relative singular value cut-off of the lemma rank test.
const LEMMA_RANK_TOL: f64 = 1e-8;
const SECTIONAL_PLANES: u64 = 10;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("cannot construct model: {0}")]
    Model(#[from] GeometryError),
}

/// Pointwise curvature data of a model, and its chart when it has one.
#[derive(Debug, Clone)]
pub struct ModelData {
    pub kind: ModelKind,
    pub point: HermitianPoint,
    pub curvature: FourTensor,
    pub chart: Option<Chart>,
    pub expected: ModelClass,
    /// Antiholomorphic sectional curvature, when it is constant.
    pub expected_nu: Option<f64>,
}

pub fn build_model(config: &ScenarioConfig) -> Result<ModelData, ScenarioError> {
    config.validate()?;
    let (n, c, seed) = (config.n, config.c, config.seed);
    let standard = || HermitianPoint::standard(n);
    let data = match config.model {
        ModelKind::Cn => ModelData {
            kind: config.model,
            point: standard()?,
            curvature: FourTensor::zeros(2 * n),
            chart: Some(Chart::flat(n)),
            expected: ModelClass::Cn,
            expected_nu: Some(0.0),
        },
        ModelKind::CPn | ModelKind::CDn => {
            let point = standard()?;
            ModelData {
                kind: config.model,
                curvature: kahler_space_form(&point, c),
                point,
                chart: Some(Chart::complex_space_form(n, c)),
                expected: if c > 0.0 {
                    ModelClass::CPn
                } else {
                    ModelClass::CDn
                },
                expected_nu: Some(c / 4.0),
            }
        }
        ModelKind::S6 => {
            let chart = Chart::embedded_s6(seed);
            let base = &seeded_points(&chart, 1, seed, 0.0)?[0];
            let tangent = s6_point(&nalgebra::DVector::from_column_slice(base), seed)?;
            ModelData {
                kind: config.model,
                curvature: s6_curvature(&tangent.point)?,
                point: tangent.point,
                chart: Some(chart),
                expected: ModelClass::S6,
                expected_nu: Some(1.0),
            }
        }
        ModelKind::Product => {
            let spec = space_form_product(&[(1, c), (n - 1, c)])?;
            ModelData {
                kind: config.model,
                point: spec.point,
                curvature: spec.tensor,
                chart: None,
                expected: ModelClass::NonConstant,
                expected_nu: None,
            }
        }
        ModelKind::CustomChart => {
            let chart = Chart::parametric(PolynomialHermitianChart::new(
                n,
                PolynomialHermitianChart::DEFAULT_EPS,
                seed,
            ));
            let u = &seeded_points(&chart, 1, seed, 3.0 * IDENTITY_STEP)?[0];
            let geo = geometry_at(&chart, u, IDENTITY_STEP)?;
            ModelData {
                kind: config.model,
                point: geo.hermitian,
                curvature: geo.curvature,
                chart: Some(chart),
                expected: ModelClass::NonConstant,
                expected_nu: None,
            }
        }
    };
    Ok(data)
}

/// Maximum that propagates NaN.
fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn budget(config: &ScenarioConfig) -> Budget {
    Budget {
        samples: config.samples,
        refine_steps: config.refine_steps,
    }
}

fn chart_of(model: &ModelData) -> Result<&Chart, GeometryError> {
    model
        .chart
        .as_ref()
        .ok_or_else(|| GeometryError::Unsupported(format!("model {} has no chart", model.kind)))
}

fn chart_points(
    chart: &Chart,
    count: usize,
    seed: u64,
    step: f64,
) -> Result<Vec<Vec<f64>>, GeometryError> {
    seeded_points(chart, count, seed, 3.0 * step)
}

fn structure(
    model: &ModelData,
    config: &ScenarioConfig,
) -> Result<Vec<CheckRecord>, GeometryError> {
    let (j_square, compat) = model.point.structure_defects();
    let tol = config.tol_structural;
    Ok(vec![
        CheckRecord::new("structure.j_square", j_square, tol),
        CheckRecord::new("structure.compatibility", compat, tol),
    ])
}

fn symmetry(model: &ModelData, config: &ScenarioConfig) -> Result<Vec<CheckRecord>, GeometryError> {
    let (c1, c2, c3, _) = symmetry_defects(&model.curvature, &model.point)?;
    let tol = config.tol_structural;
    let mut out = vec![
        CheckRecord::new("symmetry.first_pair", c1, tol),
        CheckRecord::new("symmetry.bianchi", c2, tol),
        CheckRecord::new("symmetry.last_pair", c3, tol),
    ];
    // Perturbed metrics are Hermitian but carry no RK claim.
    if model.kind != ModelKind::CustomChart {
        out.push(CheckRecord::new(
            "symmetry.rk",
            rk_defect(&model.curvature, &model.point)?,
            tol,
        ));
    }
    Ok(out)
}

fn lemma(model: &ModelData) -> Result<Vec<CheckRecord>, GeometryError> {
    let kernel = lemma_kernel(&model.point, LEMMA_RANK_TOL);
    Ok(vec![CheckRecord::new(
        "lemma.kernel_dim",
        kernel.kernel_dim as f64,
        0.0,
    )])
}

fn prop1(model: &ModelData, config: &ScenarioConfig) -> Result<Vec<CheckRecord>, GeometryError> {
    let rep = prop1_report(&model.curvature, &model.point, budget(config), config.seed)?;
    let tol = config.tol_structural;
    let mut out = vec![
        CheckRecord::new("prop1.reconstruction", rep.eq6_residual, tol),
        CheckRecord::new("prop1.ricci_relation", rep.eq7_defect, tol),
        CheckRecord::new("prop1.holomorphic_ricci", rep.eq9_max_defect, tol),
        CheckRecord::new(
            "prop1.nu_range",
            worst(
                (rep.nu_hat - rep.nu_min).abs(),
                (rep.nu_hat - rep.nu_max).abs(),
            ),
            config.tol_chart,
        ),
    ];
    if let Some(nu) = model.expected_nu {
        out.push(CheckRecord::new("prop1.nu", (rep.nu_hat - nu).abs(), tol));
    }
    Ok(out)
}

fn identities(
    model: &ModelData,
    config: &ScenarioConfig,
) -> Result<Vec<CheckRecord>, GeometryError> {
    let chart = chart_of(model)?;
    let mut d = [0.0f64; 8];
    for u in chart_points(chart, IDENTITY_POINTS, config.seed, IDENTITY_STEP)? {
        let r = identity_report(&geometry_at(chart, &u, IDENTITY_STEP)?);
        let values = [
            r.eq1_defect,
            r.eq2_defect,
            r.eq3_defect,
            r.eq4_defect,
            r.eq5_defect,
            r.eq10_defect,
            r.eq11_defect,
            r.eq12_defect,
        ];
        for (acc, v) in d.iter_mut().zip(values) {
            *acc = worst(*acc, v);
        }
    }
    let tol = config.tol_chart;
    let names = [
        "div_r",
        "div_ricci",
        "div_star_ricci",
        "scalar_gap",
        "ricci_gap_rule",
        "ricci_rule",
        "ricci_j_pair",
        "ricci_cyclic",
    ];
    // Only the contracted Bianchi identities hold without the nearly Kähler
    // condition.
    let count = if model.kind == ModelKind::CustomChart {
        2
    } else {
        names.len()
    };
    Ok(names[..count]
        .iter()
        .zip(d)
        .map(|(name, v)| CheckRecord::new(format!("identities.{name}"), v, tol))
        .collect())
}

fn nk(model: &ModelData, config: &ScenarioConfig) -> Result<Vec<CheckRecord>, GeometryError> {
    let chart = chart_of(model)?;
    let (mut nk, mut routes, mut sectional) = (0.0f64, 0.0f64, 0.0f64);
    for (k, u) in chart_points(chart, IDENTITY_POINTS, config.seed, IDENTITY_STEP)?
        .iter()
        .enumerate()
    {
        let geo = geometry_at(chart, u, IDENTITY_STEP)?;
        nk = worst(nk, identity_report(&geo).nk_defect);
        if let Some(d) = geo.gauss_route_defect {
            routes = worst(routes, d);
        }
        if model.kind == ModelKind::S6 {
            for i in 0..SECTIONAL_PLANES {
                let x = geo.hermitian.random_unit_vector(k as u64, 2 * i);
                let y = geo.hermitian.random_unit_vector(k as u64, 2 * i + 1);
                sectional = worst(sectional, (geo.sectional(&x, &y) - 1.0).abs());
            }
        }
    }
    let tol = config.tol_chart;
    let mut out = vec![CheckRecord::new("nk.defect", nk, tol)];
    if model.kind == ModelKind::S6 {
        out.push(CheckRecord::new("nk.gauss_routes", routes, tol));
        out.push(CheckRecord::new("nk.sectional", sectional, tol));
    }
    Ok(out)
}

fn schur(model: &ModelData, config: &ScenarioConfig) -> Result<Vec<CheckRecord>, GeometryError> {
    let chart = chart_of(model)?;
    let points = chart_points(chart, SCHUR_POINTS, config.seed, SCHUR_STEP)?;
    let scan = schur_scan(chart, &points, budget(config), config.seed)?;
    let tol = config.tol_chart;
    let mut out = vec![CheckRecord::new("schur.spread", scan.spread, tol)];
    if let Some(nu) = model.expected_nu {
        out.push(CheckRecord::new("schur.mean", (scan.mean - nu).abs(), tol));
    }
    if let Some(width) = scan.range_width {
        out.push(CheckRecord::new("schur.range_width", width, tol));
    }
    Ok(out)
}

fn classify_check(
    model: &ModelData,
    config: &ScenarioConfig,
) -> Result<Vec<CheckRecord>, GeometryError> {
    let label = classify(
        &model.curvature,
        &model.point,
        budget(config),
        config.seed,
        config.tol_structural,
    )?;
    let miss = if label.label == model.expected {
        0.0
    } else {
        1.0
    };
    Ok(vec![CheckRecord::new("classify.label", miss, 0.0)])
}

/// Records of one check; an evaluation error becomes a single failing
/// `<check>.error` record and a diagnostic.
fn run_check(
    check: CheckKind,
    model: &ModelData,
    config: &ScenarioConfig,
) -> (Vec<CheckRecord>, Option<String>) {
    let result = match check {
        CheckKind::Structure => structure(model, config),
        CheckKind::Symmetry => symmetry(model, config),
        CheckKind::Lemma => lemma(model),
        CheckKind::Prop1 => prop1(model, config),
        CheckKind::Identities => identities(model, config),
        CheckKind::Nk => nk(model, config),
        CheckKind::Schur => schur(model, config),
        CheckKind::Classify => classify_check(model, config),
    };
    match result {
        Ok(records) => (records, None),
        Err(e) => (
            vec![CheckRecord::error(format!("{}.error", check.as_str()), 0.0)],
            Some(format!("{}: {e}", check.as_str())),
        ),
    }
}

/// Report of a scenario together with diagnostics for checks that could not
/// be evaluated.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub report: Report,
    pub diagnostics: Vec<String>,
}

/// Runs the requested checks concurrently and assembles the records in the
/// fixed check order.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutcome, ScenarioError> {
    let model = build_model(config)?;
    let results: Vec<(Vec<CheckRecord>, Option<String>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = config
            .checks
            .iter()
            .map(|&check| {
                let model = &model;
                scope.spawn(move || run_check(check, model, config))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("check thread panicked"))
            .collect()
    });
    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    for (r, d) in results {
        records.extend(r);
        diagnostics.extend(d);
    }
    Ok(ScenarioOutcome {
        report: Report {
            records,
            config: config.clone(),
            version: VERSION,
        },
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(model: ModelKind, checks: &[CheckKind]) -> ScenarioConfig {
        let mut config = ScenarioConfig::for_model(model);
        config.samples = 50;
        config.refine_steps = 10;
        config.checks = checks.to_vec();
        config
    }

    #[test]
    fn models_carry_their_labels() {
        for model in ModelKind::ALL {
            let config = quick(model, &[CheckKind::Classify]);
            let out = run_scenario(&config).unwrap();
            assert!(out.report.all_pass(), "{model}: {}", out.report.to_text());
        }
    }

    #[test]
    fn product_has_no_chart() {
        let config = quick(ModelKind::Product, &[CheckKind::Schur]);
        let out = run_scenario(&config).unwrap();
        assert_eq!(out.report.records[0].id, "schur.error");
        assert!(!out.report.all_pass());
        assert_eq!(out.diagnostics.len(), 1);
    }

    #[test]
    fn classify_rejects_complex_dimension_two() {
        let mut config = quick(ModelKind::CPn, &[CheckKind::Structure, CheckKind::Classify]);
        config.n = 2;
        let out = run_scenario(&config).unwrap();
        let ids: Vec<&str> = out.report.records.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(
            ids,
            [
                "structure.j_square",
                "structure.compatibility",
                "classify.error"
            ]
        );
    }

    #[test]
    fn custom_chart_defaults_pass() {
        let mut config = ScenarioConfig::for_model(ModelKind::CustomChart);
        config.samples = 50;
        let out = run_scenario(&config).unwrap();
        assert!(out.report.all_pass(), "{}", out.report.to_text());
    }

    #[test]
    fn nan_propagates_through_worst() {
        assert!(worst(f64::NAN, 1.0).is_nan());
        assert!(worst(1.0, f64::NAN).is_nan());
        assert_eq!(worst(1.0, 2.0), 2.0);
    }
}
