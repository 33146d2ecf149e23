//! The scenario pipeline: build the generator, run the analysis chain
//! (positivity, irreducibility or eventual positivity, equilibrium
//! projection, convergence profile, rate fit, classification), evaluate the
//! scenario's verdict lines, and emit deterministic reports.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use serde::Serialize;

use semilab_core::eventual::{geometric_grid, scan_positivity, PositivityVerdict};
use semilab_core::linalg::DVec;
use semilab_core::semigroup::{
    classify_asymptotics, equilibrium_projection, fit_exponential_rate, is_irreducible, is_metzler,
    spectral_bound, spectral_gap, AsymptoticClass, EquilibriumProjection, ExponentialFit,
    Generator, SemigroupEvaluator, METZLER_TOL,
};

use crate::config::CliError;
use crate::registry::{build_generator, LengthRole, ResolvedConfig};
use crate::report::{self, SweepRowOut};

fn stage<T>(name: &'static str, r: semilab_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Pipeline {
        stage: name,
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsSummary {
    pub n: usize,
    pub l: Option<f64>,
    pub block: Option<usize>,
    pub t_max: f64,
    pub points: usize,
    pub eps: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralSummary {
    pub lambda0: f64,
    pub gap: Option<f64>,
    pub lambda0_simple: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivitySummary {
    pub metzler: bool,
    pub min_off_diagonal: f64,
    pub irreducible: Option<bool>,
    pub verdict: String,
    pub t1: Option<f64>,
    pub eps: f64,
    pub strong_positivity_c: Option<f64>,
    pub domination_constant: Option<f64>,
    pub ground_bound_c: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceSummary {
    pub fitted_prefactor: Option<f64>,
    pub fitted_rate: Option<f64>,
    pub final_distance: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationSummary {
    pub class: String,
    pub kernel_dim: usize,
    pub peripheral_count: usize,
}

/// A machine-checked claim with the tolerance it was checked at.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictLine {
    pub name: String,
    pub pass: bool,
    pub tolerance: f64,
    pub observed: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileSummary {
    pub profile_csv: String,
    pub scalars_csv: String,
    pub summary_json: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub label: String,
    /// Unix seconds; excluded from determinism comparisons.
    pub timestamp: u64,
    pub params: ParamsSummary,
    pub spectral: SpectralSummary,
    pub positivity: PositivitySummary,
    pub convergence: ConvergenceSummary,
    pub classification: Option<ClassificationSummary>,
    pub verdicts: Vec<VerdictLine>,
    pub files: FileSummary,
}

struct PipelineData {
    generator: Generator,
    proj: EquilibriumProjection,
    metzler: bool,
    min_off_diagonal: f64,
    irreducible: Option<bool>,
    profile_rows: Vec<(f64, f64, f64)>,
    fit: Option<ExponentialFit>,
    classification: Option<ClassificationSummary>,
    verdict: PositivityVerdict,
    t1: Option<f64>,
    strong_positivity_c: Option<f64>,
    domination_constant: Option<f64>,
    ground_bound_c: Option<f64>,
    t_max: f64,
}

/// Run the full pipeline and write `profile.csv`, `scalars.csv` and
/// `summary.json` into `out_dir`. Outputs are only written once the whole
/// analysis has succeeded, so a failing stage leaves no partial files.
pub fn run_scenario(cfg: &ResolvedConfig, out_dir: &Path) -> Result<ScenarioReport, CliError> {
    let data = analyze(cfg)?;
    let verdicts = scenario_verdicts(cfg, &data)?;

    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);

    let profile_csv = out_dir.join("profile.csv");
    let scalars_csv = out_dir.join("scalars.csv");
    let summary_json = out_dir.join("summary.json");

    let final_distance = data.profile_rows.last().map(|r| r.1).unwrap_or(0.0);
    let report = ScenarioReport {
        scenario: cfg.meta.name.to_string(),
        label: data.generator.label().to_string(),
        timestamp,
        params: ParamsSummary {
            n: cfg.n,
            l: cfg.l,
            block: cfg.block,
            t_max: data.t_max,
            points: cfg.points,
            eps: cfg.eps,
        },
        spectral: SpectralSummary {
            lambda0: data.proj.lambda0,
            gap: data.proj.gap,
            lambda0_simple: true,
        },
        positivity: PositivitySummary {
            metzler: data.metzler,
            min_off_diagonal: data.min_off_diagonal,
            irreducible: data.irreducible,
            verdict: data.verdict.as_str().to_string(),
            t1: data.t1,
            eps: cfg.eps,
            strong_positivity_c: data.strong_positivity_c,
            domination_constant: data.domination_constant,
            ground_bound_c: data.ground_bound_c,
        },
        convergence: ConvergenceSummary {
            fitted_prefactor: data.fit.map(|f| f.prefactor),
            fitted_rate: data.fit.map(|f| f.rate),
            final_distance,
            points: data.profile_rows.len(),
        },
        classification: data.classification.clone(),
        verdicts,
        files: FileSummary {
            profile_csv: profile_csv.display().to_string(),
            scalars_csv: scalars_csv.display().to_string(),
            summary_json: summary_json.display().to_string(),
        },
    };

    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::config(format!("cannot create output dir: {e}")))?;
    let write_all = || -> std::io::Result<()> {
        report::write_profile_csv(&profile_csv, &data.profile_rows)?;
        report::write_scalars_csv(&scalars_csv, &scalars_of(&report))?;
        let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
        json.push('\n');
        std::fs::write(&summary_json, json)
    };
    if let Err(e) = write_all() {
        for p in [&profile_csv, &scalars_csv, &summary_json] {
            let _ = std::fs::remove_file(p);
        }
        return Err(CliError::Pipeline {
            stage: "report",
            message: format!("writing outputs failed: {e}"),
        });
    }
    Ok(report)
}

fn analyze(cfg: &ResolvedConfig) -> Result<PipelineData, CliError> {
    let g = build_generator(cfg)?;
    let metz = is_metzler(&g, METZLER_TOL);
    let irreducible = if metz.metzler {
        Some(stage("irreducibility", is_irreducible(&g))?)
    } else {
        None
    };
    let proj = stage("equilibrium", equilibrium_projection(&g))?;
    let evaluator = stage("spectral", SemigroupEvaluator::new(&g))?;
    let gap_pos = proj.gap.filter(|d| *d > 1e-12);

    let t_max = cfg
        .t_max
        .unwrap_or_else(|| gap_pos.map(|d| 3.0 / d).unwrap_or(1.0));
    let times: Vec<f64> = (1..=cfg.points)
        .map(|k| t_max * k as f64 / cfg.points as f64)
        .collect();
    let mut profile_rows = Vec::with_capacity(times.len());
    for &t in &times {
        let r = stage("profile", evaluator.rescaled_at(t))?;
        let dist = g.weighted_operator_norm(&(&r - &proj.rank1));
        profile_rows.push((t, dist, r.min()));
    }
    let dist_profile: Vec<(f64, f64)> = profile_rows.iter().map(|&(t, d, _)| (t, d)).collect();
    let fit = match fit_exponential_rate(&dist_profile) {
        Ok(f) => Some(f),
        Err(semilab_core::Error::ProfileTooShort { .. }) => None,
        Err(e) => {
            return Err(CliError::Pipeline {
                stage: "rate_fit",
                message: e.to_string(),
            })
        }
    };
    let classification = if metz.metzler {
        let c = stage("classification", classify_asymptotics(&g))?;
        Some(ClassificationSummary {
            class: c.class.as_str().to_string(),
            kernel_dim: c.kernel_dim,
            peripheral_count: c.peripheral.len(),
        })
    } else {
        None
    };

    let (verdict, t1, strong_positivity_c, domination_constant, ground_bound_c) = if metz.metzler {
        (PositivityVerdict::Positive, None, None, None, None)
    } else {
        let scan_gap = evaluator.gap().filter(|d| *d > 1e-12).unwrap_or(1.0);
        let grid = geometric_grid(1e-3 / scan_gap, 50.0 / scan_gap, 48);
        let cert = stage(
            "eventual_positivity",
            scan_positivity(&evaluator, true, &grid, cfg.eps),
        )?;
        let (dom, ground) = if g.is_self_adjoint() {
            let t0 = 1.0 / scan_gap;
            let s = stage("eventual_positivity", evaluator.rescaled_at(t0))?
                * (evaluator.lambda0() * t0).exp();
            // Reference vector is the constant one, so the domination
            // constant is the largest entry magnitude and the ground bound
            // is the smallest eigenvector entry.
            (Some(s.amax()), Some(proj.u.min().max(0.0)))
        } else {
            (None, None)
        };
        let strong = match cert.t1 {
            Some(t1) => {
                let r = stage("eventual_positivity", evaluator.rescaled_at(2.0 * t1))?;
                let c = (0..g.dim())
                    .map(|i| r[(i, 0)])
                    .fold(f64::INFINITY, f64::min);
                Some(c)
            }
            None => None,
        };
        (cert.verdict, cert.t1, strong, dom, ground)
    };

    Ok(PipelineData {
        generator: g,
        proj,

        metzler: metz.metzler,
        min_off_diagonal: metz.min_off_diagonal,
        irreducible,
        profile_rows,
        fit,
        classification,
        verdict,
        t1,
        strong_positivity_c,
        domination_constant,
        ground_bound_c,
        t_max,
    })
}

fn verdict(name: &str, pass: bool, tolerance: f64, observed: f64) -> VerdictLine {
    VerdictLine {
        name: name.to_string(),
        pass,
        tolerance,
        observed,
    }
}

fn scenario_verdicts(
    cfg: &ResolvedConfig,
    data: &PipelineData,
) -> Result<Vec<VerdictLine>, CliError> {
    let mut out = Vec::new();
    let proj = &data.proj;
    let rate = data.fit.map(|f| f.rate);
    match cfg.meta.name {
        "heat_neumann" => {
            let l = cfg.l.unwrap_or(1.0);
            let expected_gap = PI * PI / (l * l);
            out.push(verdict(
                "positive",
                data.metzler,
                METZLER_TOL,
                data.min_off_diagonal,
            ));
            out.push(verdict(
                "irreducible",
                data.irreducible == Some(true),
                0.0,
                if data.irreducible == Some(true) {
                    1.0
                } else {
                    0.0
                },
            ));
            out.push(verdict(
                "lambda0_zero",
                proj.lambda0.abs() <= 1e-10,
                1e-10,
                proj.lambda0.abs(),
            ));
            let rel = rate.map(|r| (r - expected_gap).abs() / expected_gap);
            out.push(verdict(
                "rate_matches_pi_squared_over_l_squared",
                rel.map(|e| e <= 0.02).unwrap_or(false),
                0.02,
                rel.unwrap_or(f64::NAN),
            ));
        }
        "heat_dirichlet" => {
            let l = cfg.l.unwrap_or(1.0);
            let expected = -PI * PI / (l * l);
            let rel = (proj.lambda0 - expected).abs() / expected.abs();
            out.push(verdict(
                "positive",
                data.metzler,
                METZLER_TOL,
                data.min_off_diagonal,
            ));
            out.push(verdict(
                "spb_matches_minus_pi_squared_over_l_squared",
                rel <= 0.01,
                0.01,
                rel,
            ));
        }
        "ex7_2" => {
            out.push(verdict(
                "spb_near_zero",
                proj.lambda0.abs() <= 5e-3,
                5e-3,
                proj.lambda0.abs(),
            ));
            let l = cfg.l.unwrap_or(20.0);
            let n = cfg.n;
            let h = 2.0 * l / (n as f64 + 1.0);
            let mut target = DVec::from_fn(n, |i, _| {
                let x = -l + (i as f64 + 1.0) * h;
                1.0 / (1.0 + x * x)
            });
            target /= target.norm();
            let aligned = if proj.u.dot(&target) < 0.0 {
                -&proj.u
            } else {
                proj.u.clone()
            };
            let rel = (&aligned - &target).norm();
            out.push(verdict(
                "kernel_eigenfunction_matches_lorentzian_bump",
                rel <= 1e-2,
                1e-2,
                rel,
            ));
        }
        "ex9_1" => {
            out.push(verdict(
                "not_positive",
                !data.metzler,
                METZLER_TOL,
                data.min_off_diagonal,
            ));
            out.push(verdict(
                "eventually_positive",
                data.verdict == PositivityVerdict::EventuallyPositive,
                cfg.eps,
                data.t1.unwrap_or(f64::NAN),
            ));
            let c = data.strong_positivity_c.unwrap_or(f64::NAN);
            out.push(verdict("strong_positivity_at_twice_t1", c > 0.0, 0.0, c));
        }
        "ex9_2" => {
            out.push(verdict(
                "not_positive",
                !data.metzler,
                METZLER_TOL,
                data.min_off_diagonal,
            ));
            out.push(verdict(
                "spb_zero",
                proj.lambda0.abs() <= 1e-8,
                1e-8,
                proj.lambda0.abs(),
            ));
            let n = data.generator.dim();
            let mut target = DVec::from_element(n, 1.0);
            target /= target.norm();
            let aligned = if proj.u.dot(&target) < 0.0 {
                -&proj.u
            } else {
                proj.u.clone()
            };
            let rel = (&aligned - &target).norm();
            out.push(verdict(
                "kernel_mode_is_constant_direction",
                rel <= 1e-6,
                1e-6,
                rel,
            ));
            out.push(verdict(
                "eventually_positive",
                data.verdict == PositivityVerdict::EventuallyPositive,
                cfg.eps,
                data.t1.unwrap_or(f64::NAN),
            ));
        }
        "ex4_1" => {
            let n = data.generator.dim();
            let ones = DVec::from_element(n, 1.0);
            let mut drift: f64 = 0.0;
            for &t in &[0.1, 1.0, 10.0] {
                let s = stage(
                    "conservation",
                    semilab_core::linalg::expm(data.generator.matrix(), t),
                )?;
                drift = drift.max((&s * &ones - &ones).amax());
            }
            out.push(verdict("conserves_constants", drift <= 1e-10, 1e-10, drift));
            // u is proportional to the constant vector; rescale so u = 1 and
            // check that the stationary density has mass one.
            let u_mean = proj.u.iter().sum::<f64>() / n as f64;
            let nu: Vec<f64> = proj.phi.iter().map(|p| p * u_mean).collect();
            let mass: f64 = (0..n)
                .map(|i| data.generator.mass_weights()[i] * nu[i])
                .sum();
            let nu_min = nu.iter().cloned().fold(f64::INFINITY, f64::min);
            out.push(verdict(
                "stationary_density_positive_with_unit_mass",
                nu_min > 0.0 && (mass - 1.0).abs() <= 1e-8,
                1e-8,
                (mass - 1.0).abs(),
            ));
            out.push(verdict(
                "rate_fit_succeeded",
                rate.is_some(),
                0.0,
                rate.unwrap_or(f64::NAN),
            ));
        }
        "ex4_2a" => {
            out.push(verdict(
                "spb_strictly_negative",
                proj.lambda0 <= -1e-4,
                1e-4,
                proj.lambda0,
            ));
            let decays = data
                .classification
                .as_ref()
                .map(|c| c.class == AsymptoticClass::DecayToZero.as_str())
                .unwrap_or(false);
            out.push(verdict(
                "classified_decay_to_zero",
                decays,
                0.0,
                proj.lambda0,
            ));
        }
        "ex7_1" => {
            out.push(verdict(
                "positive",
                data.metzler,
                METZLER_TOL,
                data.min_off_diagonal,
            ));
            out.push(verdict(
                "irreducible",
                data.irreducible == Some(true),
                0.0,
                if data.irreducible == Some(true) {
                    1.0
                } else {
                    0.0
                },
            ));
            let gap = proj.gap.unwrap_or(0.0);
            out.push(verdict("gap_positive", gap > 1e-6, 1e-6, gap));
        }
        other => {
            return Err(CliError::config(format!(
                "no verdicts registered for scenario {other}"
            )))
        }
    }
    Ok(out)
}

/// Flatten every number of the report into the long-form scalars table.
fn scalars_of(report: &ScenarioReport) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    let mut put = |k: &str, v: f64| {
        m.insert(k.to_string(), v);
    };
    put("timestamp", report.timestamp as f64);
    put("params_n", report.params.n as f64);
    if let Some(l) = report.params.l {
        put("params_l", l);
    }
    if let Some(b) = report.params.block {
        put("params_block", b as f64);
    }
    put("params_t_max", report.params.t_max);
    put("params_points", report.params.points as f64);
    put("params_eps", report.params.eps);
    put("lambda0", report.spectral.lambda0);
    if let Some(gap) = report.spectral.gap {
        put("gap", gap);
    }
    put(
        "lambda0_simple",
        bool_as_f64(report.spectral.lambda0_simple),
    );
    put("metzler", bool_as_f64(report.positivity.metzler));
    put("min_off_diagonal", report.positivity.min_off_diagonal);
    if let Some(irr) = report.positivity.irreducible {
        put("irreducible", bool_as_f64(irr));
    }
    if let Some(t1) = report.positivity.t1 {
        put("positivity_t1", t1);
    }
    put("positivity_eps", report.positivity.eps);
    if let Some(c) = report.positivity.strong_positivity_c {
        put("strong_positivity_c", c);
    }
    if let Some(c) = report.positivity.domination_constant {
        put("domination_constant", c);
    }
    if let Some(c) = report.positivity.ground_bound_c {
        put("ground_bound_c", c);
    }
    if let Some(p) = report.convergence.fitted_prefactor {
        put("fitted_prefactor", p);
    }
    if let Some(r) = report.convergence.fitted_rate {
        put("fitted_rate", r);
    }
    put("final_distance", report.convergence.final_distance);
    put("profile_points", report.convergence.points as f64);
    if let Some(c) = &report.classification {
        put("classification_kernel_dim", c.kernel_dim as f64);
        put("classification_peripheral_count", c.peripheral_count as f64);
    }
    for v in &report.verdicts {
        m.insert(format!("verdict_{}_pass", v.name), bool_as_f64(v.pass));
        m.insert(format!("verdict_{}_tolerance", v.name), v.tolerance);
        m.insert(format!("verdict_{}_observed", v.name), v.observed);
    }
    m
}

fn bool_as_f64(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Length,
    Size,
}

impl SweepParam {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "L" => Ok(SweepParam::Length),
            "n" => Ok(SweepParam::Size),
            other => Err(CliError::config(format!(
                "sweep parameter must be 'L' or 'n', got '{other}'"
            ))),
        }
    }
}

/// Sweep a parameter across values with a reduced per-row pipeline
/// (spectral bound, gap, fitted rate, positivity time when affordable).
/// Row failures are marked in the table; the sweep continues.
pub fn run_sweep(
    base: &ResolvedConfig,
    param: SweepParam,
    values: &[f64],
    out_dir: &Path,
) -> Result<Vec<SweepRowOut>, CliError> {
    if values.len() < 2 {
        return Err(CliError::config(format!(
            "sweep needs at least 2 values, got {}",
            values.len()
        )));
    }
    if param == SweepParam::Length && base.meta.length_role == LengthRole::None {
        return Err(CliError::config(format!(
            "scenario {} has no length parameter to sweep",
            base.meta.name
        )));
    }
    let workers = std::env::var("SEMILAB_WORKERS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&w| w >= 1)
        .unwrap_or(1)
        .min(values.len());

    let rows: Vec<SweepRowOut> = if workers <= 1 {
        values.iter().map(|&v| sweep_row(base, param, v)).collect()
    } else {
        let mut rows: Vec<Option<SweepRowOut>> = vec![None; values.len()];
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for (chunk_idx, chunk) in values.chunks(values.len().div_ceil(workers)).enumerate() {
                let offset = chunk_idx * values.len().div_ceil(workers);
                handles.push(scope.spawn(move || {
                    chunk
                        .iter()
                        .enumerate()
                        .map(|(k, &v)| (offset + k, sweep_row(base, param, v)))
                        .collect::<Vec<_>>()
                }));
            }
            for h in handles {
                for (idx, row) in h.join().expect("sweep worker panicked") {
                    rows[idx] = Some(row);
                }
            }
        });
        rows.into_iter().map(|r| r.expect("row computed")).collect()
    };

    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::config(format!("cannot create output dir: {e}")))?;
    report::write_sweep_csv(&out_dir.join("sweep.csv"), &rows).map_err(|e| CliError::Pipeline {
        stage: "report",
        message: format!("writing sweep.csv failed: {e}"),
    })?;
    Ok(rows)
}

fn derive_config(
    base: &ResolvedConfig,
    param: SweepParam,
    value: f64,
) -> Result<ResolvedConfig, String> {
    let mut cfg = base.clone();
    match param {
        SweepParam::Length => {
            if !(value > 0.0 && value <= 1e4) {
                return Err(format!("L = {value} outside (0, 1e4]"));
            }
            // Keep the grid resolution fixed when the domain grows.
            if base.meta.length_role == LengthRole::HalfWidth {
                let base_l = base.l.unwrap_or(1.0);
                let scaled = (base.n as f64 * value / base_l).round() as usize;
                cfg.n = scaled.clamp(base.meta.min_n, 4000);
            }
            cfg.l = Some(value);
        }
        SweepParam::Size => {
            if value.fract() != 0.0 || value < base.meta.min_n as f64 || value > 4000.0 {
                return Err(format!(
                    "n = {value} must be an integer in [{}, 4000]",
                    base.meta.min_n
                ));
            }
            cfg.n = value as usize;
        }
    }
    Ok(cfg)
}

fn sweep_row(base: &ResolvedConfig, param: SweepParam, value: f64) -> SweepRowOut {
    let mut row = SweepRowOut {
        value,
        lambda0: None,
        gap: None,
        delta_fit: None,
        t1: None,
        status: "ok".to_string(),
    };
    let cfg = match derive_config(base, param, value) {
        Ok(c) => c,
        Err(msg) => {
            row.status = format!("error:config: {msg}");
            return row;
        }
    };
    match reduced_pipeline(&cfg) {
        Ok((lambda0, gap, delta_fit, t1)) => {
            row.lambda0 = Some(lambda0);
            row.gap = gap;
            row.delta_fit = delta_fit;
            row.t1 = t1;
        }
        Err(e) => {
            row.status = match e {
                CliError::Config(msg) => format!("error:config: {msg}"),
                CliError::Pipeline { stage, message } => format!("error:{stage}: {message}"),
            };
        }
    }
    row
}

type ReducedRow = (f64, Option<f64>, Option<f64>, Option<f64>);

fn reduced_pipeline(cfg: &ResolvedConfig) -> Result<ReducedRow, CliError> {
    let g = build_generator(cfg)?;
    let lambda0 = stage("spectral", spectral_bound(&g))?;
    let gap = stage("spectral", spectral_gap(&g))?.filter(|d| *d > 1e-12);
    let delta_fit = match gap {
        Some(gp) => {
            let proj = stage("equilibrium", equilibrium_projection(&g))?;
            let times: Vec<f64> = (1..=8).map(|k| 0.45 * k as f64 / gp).collect();
            let profile = stage(
                "profile",
                semilab_core::semigroup::convergence_profile(&g, &proj, &times),
            )?;
            fit_exponential_rate(&profile).ok().map(|f| f.rate)
        }
        None => None,
    };
    let metz = is_metzler(&g, METZLER_TOL);
    let t1 = if !metz.metzler && g.dim() <= 800 {
        let scan_gap = gap.unwrap_or(1.0);
        let grid = geometric_grid(1e-3 / scan_gap, 50.0 / scan_gap, 48);
        let cert = stage(
            "eventual_positivity",
            semilab_core::eventual::minimal_positivity_time(&g, &grid, cfg.eps),
        )?;
        cert.t1
    } else {
        None
    };
    Ok((lambda0, gap, delta_fit, t1))
}
