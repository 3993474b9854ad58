//! Configured end-to-end runs: the stadium counterexample, the ring
//! counterexample, and parameter sweeps over `a` or `eps`.

mod config;
pub mod output;

use std::fmt::{self, Display};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

pub use config::{
    parse_nonlinearity, CoefficientKind, CutoffConfig, DomainConfig, ExperimentConfig,
    InnerValue, LevelsConfig, NonlinearConfig, OutputConfig, PipelineKind, RingConfig,
    ShapeKind, SweepConfig, SweepKind,
};
use output::ContourSet;

use crate::cutoff::CutoffFunction;
use crate::elliptic::ScalarField;
use crate::geometry::{build_domain, build_stadium, GridDomain};
use crate::quasiconcavity::{
    extract_superlevel, level_grid, profile_deviation, scan_nonconvex_levels,
    sqrt_concavity_check, superlevel_extent, ConvexityReport, ExtendedField, ExtentReport,
    stadium_witness, LevelScan, SqrtConcavityReport, Witness,
};
use crate::ringlab::{
    epsilon_convergence_study, ring_nonconvexity_witness, select_hole_center, solve_base_problem,
    BaseSolution, ConvergenceStudy, RingWitness,
};
use crate::varmin::{constrained_minimize, BoundsReport, VariationalResult};
use crate::{Point, Result};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct RunReport {
    pub pipeline: PipelineKind,
    /// Ordered `key = value` pairs.
    pub metrics: Vec<(String, String)>,
    pub checks: Vec<Check>,
    pub manifest: Vec<PathBuf>,
    pub witness_found: bool,
    /// Stage error that ended the run early.
    pub failure: Option<String>,
}

impl RunReport {
    fn metric(&mut self, key: impl Into<String>, value: impl Display) {
        self.metrics.push((key.into(), value.to_string()));
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn metric_value(&self, key: &str) -> Option<&str> {
        self.metrics
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Whether the run finished, every check passed and a witness was found.
    pub fn success(&self) -> bool {
        self.failure.is_none() && self.all_checks_passed() && self.witness_found
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pipeline = {}", self.pipeline.name())?;
        writeln!(f, "status = {}", if self.success() { "pass" } else { "fail" })?;
        writeln!(f, "witness_found = {}", self.witness_found)?;
        if let Some(e) = &self.failure {
            writeln!(f, "failure = {e}")?;
        }
        writeln!(f, "\n[metrics]")?;
        for (k, v) in &self.metrics {
            writeln!(f, "{k} = {v}")?;
        }
        writeln!(f, "\n[checks]")?;
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                writeln!(f, "{} = {mark}", c.name)?;
            } else {
                writeln!(f, "{} = {mark}  # {}", c.name, c.detail)?;
            }
        }
        writeln!(f, "\n[artifacts]")?;
        for p in &self.manifest {
            writeln!(f, "{}", p.display())?;
        }
        Ok(())
    }
}

struct Emitter<'a> {
    dir: PathBuf,
    flags: &'a OutputConfig,
}

impl Emitter<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn field(&self, report: &mut RunReport, name: &str, u: &ScalarField) -> Result<()> {
        if self.flags.fields {
            let p = self.path(name);
            output::write_field_csv(&p, u)?;
            report.manifest.push(p);
        }
        Ok(())
    }

    fn contours(&self, report: &mut RunReport, name: &str, sets: &[ContourSet]) -> Result<()> {
        if self.flags.contours {
            let p = self.path(name);
            output::write_contours_csv(&p, sets)?;
            report.manifest.push(p);
        }
        Ok(())
    }

    fn table(
        &self,
        report: &mut RunReport,
        name: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<()> {
        if self.flags.report {
            let p = self.path(name);
            output::write_table_csv(&p, header, rows)?;
            report.manifest.push(p);
        }
        Ok(())
    }

    fn figure(
        &self,
        report: &mut RunReport,
        name: &str,
        u: &ScalarField,
        sets: &[ContourSet],
        witnesses: &[Witness],
    ) -> Result<()> {
        if self.flags.figures {
            let p = self.path(name);
            output::write_svg(&p, u, sets, witnesses)?;
            report.manifest.push(p);
        }
        Ok(())
    }

    fn finish(&self, report: &mut RunReport) -> Result<()> {
        if self.flags.report {
            let p = self.path("report.txt");
            report.manifest.push(p.clone());
            output::write_text(&p, &report.to_text())?;
        }
        Ok(())
    }
}

fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.at_stage(name))
}

pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let dir = output::ensure_dir(&cfg.output.dir)?;
    let em = Emitter {
        dir,
        flags: &cfg.output,
    };
    let mut report = RunReport {
        pipeline: cfg.pipeline,
        ..RunReport::default()
    };
    let res = match cfg.pipeline {
        PipelineKind::Stadium => run_stadium(cfg, &em, &mut report),
        PipelineKind::Ring => run_ring(cfg, &cfg.ring.eps, &em, &mut report),
        PipelineKind::Sweep => match cfg.sweep.kind {
            SweepKind::A => run_a_sweep(cfg, &em, &mut report),
            SweepKind::Eps => run_ring(cfg, &cfg.sweep.values, &em, &mut report),
        },
    };
    if let Err(e) = res {
        report.failure = Some(e.to_string());
        em.finish(&mut report)?;
        return Err(e);
    }
    em.finish(&mut report)?;
    Ok(report)
}

fn fmt_point(p: Point) -> String {
    format!("({}, {})", p.x, p.y)
}

fn witness_metrics(report: &mut RunReport, prefix: &str, lambda: f64, w: &Witness) {
    report.metric(format!("{prefix}.lambda"), lambda);
    report.metric(format!("{prefix}.p"), fmt_point(w.p));
    report.metric(format!("{prefix}.q"), fmt_point(w.q));
    report.metric(format!("{prefix}.r"), fmt_point(w.r));
    report.metric(format!("{prefix}.u_p"), w.up);
    report.metric(format!("{prefix}.u_q"), w.uq);
    report.metric(format!("{prefix}.u_r"), w.ur);
}

/// `P = (0, (1 - 2e) y_a)` for the fixed-geometry stadium witness.
pub const SEGMENT_OFFSET: f64 = 0.05;

/// Everything the stadium pipeline computes for one value of `a`.
pub struct StadiumOutcome {
    pub a: f64,
    pub domain: Arc<GridDomain>,
    pub result: VariationalResult,
    pub bounds: BoundsReport,
    pub extent: ExtentReport,
    pub deviation: Option<f64>,
    pub scan: LevelScan,
    pub torsion_scan: LevelScan,
    pub sqrt: SqrtConcavityReport,
    /// Witnessed levels inside `((1 - y_a^2)/2, 1/2)`.
    pub window: (f64, f64),
    /// Fixed-geometry witness from [`stadium_witness`] and its level.
    pub segment: Option<(f64, Witness)>,
}

impl StadiumOutcome {
    pub fn witnesses_in_window(&self) -> Vec<&ConvexityReport> {
        self.scan.witnessed_in(self.window.0, self.window.1)
    }

    /// The fixed-geometry witness when its level lies in the window.
    pub fn segment_in_window(&self) -> Option<(f64, &Witness)> {
        self.segment
            .as_ref()
            .filter(|(l, _)| *l > self.window.0 && *l < self.window.1)
            .map(|(l, w)| (*l, w))
    }

    /// Non-convex report with a witness and the largest deficiency.
    pub fn best_report(&self) -> Option<&ConvexityReport> {
        let inside = self.witnesses_in_window();
        let pool: Vec<&ConvexityReport> = if inside.is_empty() {
            self.scan
                .reports
                .iter()
                .filter(|r| r.witness.is_some())
                .collect()
        } else {
            inside
        };
        pool.into_iter()
            .max_by(|a, b| a.hull_deficiency.total_cmp(&b.hull_deficiency))
    }
}

/// Minimizer, bounds, extents and level scans on `Omega_a`.
pub fn stadium_outcome(cfg: &ExperimentConfig, a: f64) -> Result<StadiumOutcome> {
    let d = Arc::new(stage(
        "domain",
        build_stadium(a, cfg.domain.cap(), cfg.domain.h),
    )?);
    let g = CutoffFunction::new(cfg.cutoff.variant);
    let result = stage("varmin", constrained_minimize(&d, &g, &cfg.varmin))?;
    let bounds = result.verify(&g);
    let extent = superlevel_extent(&result.u);
    let deviation = if a >= 2.0 {
        Some(stage(
            "profile",
            profile_deviation(&result.u, a / 2.0 - 1.0, a / 2.0 + 1.0),
        )?)
    } else {
        None
    };
    let top = result.u.max();
    let levels: Vec<f64> = level_grid(cfg.levels.lo, cfg.levels.hi, cfg.levels.n)
        .into_iter()
        .filter(|l| *l > 0.0 && *l < top)
        .collect();
    let scan = stage(
        "level_scan",
        scan_nonconvex_levels(&result.u, &levels, cfg.levels.tol, cfg.execution),
    )?;
    let v = &result.torsion;
    let vmax = v.max();
    let torsion_scan = stage(
        "torsion_scan",
        scan_nonconvex_levels(
            v,
            &level_grid(0.02 * vmax, 0.98 * vmax, cfg.levels.n),
            cfg.levels.tol,
            cfg.execution,
        ),
    )?;
    let sqrt = stage("sqrt_concavity", sqrt_concavity_check(v, 4.0 * d.h()))?;
    let y = if extent.empty { 0.0 } else { extent.y_a };
    let segment = if extent.empty {
        None
    } else {
        stadium_witness(&result.u, a, y, SEGMENT_OFFSET)
    };
    Ok(StadiumOutcome {
        a,
        domain: d,
        result,
        bounds,
        extent,
        deviation,
        scan,
        torsion_scan,
        sqrt,
        window: ((1.0 - y * y) / 2.0, 0.5),
        segment,
    })
}

fn stadium_checks(report: &mut RunReport, o: &StadiumOutcome, tol: f64, prefix: &str) {
    let name = |n: &str| format!("{prefix}{n}");
    let r = &o.result;
    report.check(
        name("varmin_converged"),
        r.el_residual <= tol,
        format!("euler-lagrange residual {:e}", r.el_residual),
    );
    let monotone = r.energy_trace.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    report.check(name("energy_monotone"), monotone, "");
    for (n, ok) in o.bounds.checks() {
        let detail = match n {
            "torsion_below_minimizer" => format!("min(u - v) = {:e}", o.bounds.min_gap_to_torsion),
            "barrier" => format!(
                "max excess {:e} at {:?}",
                o.bounds.barrier_excess, o.bounds.barrier_node
            ),
            "constraint" => format!("|int g(u) - 1| = {:e}", o.bounds.constraint_residual),
            "max_above_one" => format!("max u = {}", o.bounds.max_u),
            _ => String::new(),
        };
        report.check(name(n), ok, detail);
    }
    let field = ExtendedField::new(&r.u);
    let valid = o
        .scan
        .reports
        .iter()
        .filter_map(|c| c.witness.as_ref().map(|w| w.verify(&field, c.lambda)))
        .all(|b| b);
    report.check(name("witnesses_valid"), valid, "");
    if let Some((l, w)) = &o.segment {
        report.check(name("segment_witness_valid"), w.verify(&field, *l), "");
    }
    let worst = o
        .torsion_scan
        .reports
        .iter()
        .map(|c| c.hull_deficiency)
        .fold(0.0, f64::max);
    report.check(
        name("torsion_quasiconcave"),
        o.torsion_scan.all_convex(),
        format!("max deficiency {worst:e}"),
    );
    report.check(
        name("torsion_sqrt_concave"),
        o.sqrt.passed,
        format!("worst eigenvalue {:e}", o.sqrt.worst_eigenvalue),
    );
}

fn stadium_metrics(report: &mut RunReport, o: &StadiumOutcome, prefix: &str) {
    let r = &o.result;
    let key = |k: &str| format!("{prefix}{k}");
    report.metric(key("a"), o.a);
    report.metric(key("h"), o.domain.h());
    report.metric(key("mu_a"), r.mu);
    report.metric(key("energy"), r.energy);
    report.metric(key("el_residual"), r.el_residual);
    report.metric(key("constraint_residual"), r.constraint_residual);
    report.metric(key("iterations"), r.iterations);
    report.metric(key("t_a"), r.t_a);
    report.metric(key("max_u"), r.u.max());
    report.metric(key("max_v"), r.torsion.max());
    report.metric(key("min_u_minus_v"), o.bounds.min_gap_to_torsion);
    report.metric(key("x_a"), o.extent.x_a);
    report.metric(key("y_a"), o.extent.y_a);
    if let Some(d) = o.deviation {
        report.metric(key("profile_deviation"), d);
    }
    report.metric(key("window_lo"), o.window.0);
    report.metric(key("window_hi"), o.window.1);
    match o.scan.nonconvex_window {
        Some((lo, hi)) => {
            report.metric(key("nonconvex_lo"), lo);
            report.metric(key("nonconvex_hi"), hi);
        }
        None => report.metric(key("nonconvex_lo"), "none"),
    }
    report.metric(key("witnessed_in_window"), o.witnesses_in_window().len());
    match &o.segment {
        Some((l, w)) => {
            witness_metrics(report, &key("segment"), *l, w);
            report.metric(key("segment.in_window"), o.segment_in_window().is_some());
        }
        None => report.metric(key("segment"), "none"),
    }
}

fn run_stadium(cfg: &ExperimentConfig, em: &Emitter, report: &mut RunReport) -> Result<()> {
    let o = stadium_outcome(cfg, cfg.domain.a)?;
    stadium_metrics(report, &o, "");
    stadium_checks(report, &o, cfg.varmin.tol, "");
    let best = o.best_report();
    if let Some(b) = best {
        let w = b.witness.as_ref().expect("witnessed report");
        witness_metrics(report, "witness", b.lambda, w);
        report.metric("witness.hull_deficiency", b.hull_deficiency);
    }
    report.witness_found = best.is_some();

    em.field(report, "field_u.csv", &o.result.u)?;
    em.field(report, "field_v.csv", &o.result.torsion)?;
    // a handful of scanned levels plus the witnessed one
    let n = o.scan.reports.len();
    let stride = n.div_ceil(8).max(1);
    let mut lambdas: Vec<f64> = o.scan.reports.iter().step_by(stride).map(|r| r.lambda).collect();
    if let Some(b) = best {
        if !lambdas.contains(&b.lambda) {
            lambdas.push(b.lambda);
        }
    }
    let sets: Vec<ContourSet> = lambdas
        .iter()
        .map(|&l| ContourSet {
            lambda: l,
            contours: extract_superlevel(&o.result.u, l).contours,
        })
        .collect();
    em.contours(report, "contours_u.csv", &sets)?;
    let witnesses: Vec<Witness> = best
        .and_then(|b| b.witness)
        .into_iter()
        .chain(o.segment_in_window().map(|(_, w)| *w))
        .collect();
    let shown: Vec<ContourSet> = match best {
        Some(b) => sets.into_iter().filter(|s| s.lambda == b.lambda).collect(),
        None => sets,
    };
    em.figure(report, "field_u.svg", &o.result.u, &shown, &witnesses)?;
    Ok(())
}

fn run_a_sweep(cfg: &ExperimentConfig, em: &Emitter, report: &mut RunReport) -> Result<()> {
    let outcomes = cfg
        .execution
        .map(cfg.sweep.values.clone(), |a| {
            stadium_outcome(cfg, a).map_err(|e| e.at_stage(&format!("a = {a}")))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for o in &outcomes {
        let prefix = format!("a{}.", o.a);
        stadium_metrics(report, o, &prefix);
        stadium_checks(report, o, cfg.varmin.tol, &prefix);
        rows.push(vec![
            o.a.to_string(),
            o.result.mu.to_string(),
            o.result.u.max().to_string(),
            o.extent.x_a.to_string(),
            o.extent.y_a.to_string(),
            o.deviation.map_or("".into(), |d| d.to_string()),
            o.witnesses_in_window().len().to_string(),
            o.best_report()
                .map_or(0.0, |r| r.hull_deficiency)
                .to_string(),
            o.segment_in_window()
                .map_or("".into(), |(l, _)| l.to_string()),
        ]);
    }
    let first = &outcomes[0];
    let xmax = outcomes.iter().map(|o| o.extent.x_a).fold(0.0, f64::max);
    let ymin = outcomes.iter().map(|o| o.extent.y_a).fold(f64::INFINITY, f64::min);
    report.check(
        "x_a_bounded",
        xmax <= 1.1 * first.extent.x_a,
        format!("max x_a {xmax} vs {} at a = {}", first.extent.x_a, first.a),
    );
    report.check(
        "y_a_bounded_below",
        ymin > 0.0 && outcomes.iter().all(|o| !o.extent.empty),
        format!("min y_a {ymin}"),
    );
    let threshold = outcomes
        .iter()
        .find(|o| !o.witnesses_in_window().is_empty())
        .map(|o| o.a);
    match threshold {
        Some(a) => report.metric("threshold_a", a),
        None => report.metric("threshold_a", "none"),
    }
    report.witness_found = threshold.is_some();
    match outcomes.iter().find(|o| o.segment_in_window().is_some()) {
        Some(o) => report.metric("threshold_a_segment", o.a),
        None => report.metric("threshold_a_segment", "none"),
    }
    em.table(
        report,
        "sweep_a.csv",
        &["a", "mu_a", "max_u", "x_a", "y_a", "profile_deviation", "witnessed_levels", "max_deficiency", "segment_lambda"],
        &rows,
    )?;
    if let Some(o) = outcomes.iter().find(|o| Some(o.a) == threshold) {
        em.field(report, &format!("field_u_a{}.csv", o.a), &o.result.u)?;
    }
    Ok(())
}

/// Base solution, hole centre and `eps` study of the ring pipeline.
pub struct RingOutcome {
    pub base: BaseSolution,
    pub x0: Point,
    pub m: f64,
    pub study: ConvergenceStudy,
    /// Witness search per `eps`, in the order of the study rows.
    pub witnesses: Vec<Option<RingWitness>>,
}

pub fn ring_outcome(cfg: &ExperimentConfig, eps: &[f64]) -> Result<RingOutcome> {
    let rc = &cfg.ring;
    let f = rc.nonlinearity()?;
    let opts = cfg.ring_options();
    let omega1 = Arc::new(stage("domain", build_domain(cfg.domain.shape(), cfg.domain.h))?);
    let base = stage(
        "base",
        solve_base_problem(&omega1, &rc.coefficients.field(), &f, &opts),
    )?;
    let x0 = match rc.x0 {
        Some([x, y]) => Point::new(x, y),
        None => stage(
            "hole_center",
            select_hole_center(&base.v, rc.x0_ratio, rc.clearance),
        )?,
    };
    let m = rc.m.value()?.unwrap_or(base.m0);
    let study = stage(
        "eps_sweep",
        epsilon_convergence_study(&base, x0, &rc.hole(), m, eps, rc.r0, &opts, cfg.execution),
    )?;
    let witnesses = stage(
        "witness",
        study
            .solutions
            .iter()
            .map(|s| ring_nonconvexity_witness(s, &base.v, rc.witness_margin))
            .collect::<Result<Vec<_>>>(),
    )?;
    Ok(RingOutcome {
        base,
        x0,
        m,
        study,
        witnesses,
    })
}

fn run_ring(cfg: &ExperimentConfig, eps: &[f64], em: &Emitter, report: &mut RunReport) -> Result<()> {
    let o = ring_outcome(cfg, eps)?;
    let base = &o.base;
    let f = cfg.ring.nonlinearity()?;
    report.metric("f", &f);
    report.metric("h", base.omega1.h());
    report.metric("m0", base.m0);
    report.metric("m", o.m);
    if let Some(l) = base.lambda1 {
        report.metric("lambda1_shifted", l);
    }
    report.metric("base.sweeps", base.monotone.sweeps);
    report.metric("x0", fmt_point(o.x0));
    let x0_value = ExtendedField::new(&base.v).eval(o.x0);
    report.metric("v_x0", x0_value);
    let base_gap = base.monotone.uniqueness_gap.unwrap_or(f64::INFINITY);
    report.check("base_uniqueness", base_gap <= 1e-6, format!("gap {base_gap:e}"));
    report.check("base_positive", base.v.min() > 0.0, "");
    report.check(
        "x0_below_max",
        x0_value < base.m0,
        format!("v(x0) = {x0_value}, max v = {}", base.m0),
    );
    let ceiling = f.decay_threshold().is_some_and(|mu| o.m >= mu);
    let mut rows = Vec::new();
    for ((row, sol), w) in o.study.rows.iter().zip(&o.study.solutions).zip(&o.witnesses) {
        let tag = format!("eps{}", row.eps);
        report.metric(format!("{tag}.gap"), row.gap);
        report.metric(format!("{tag}.sweeps"), row.sweeps);
        report.check(
            format!("{tag}.uniqueness"),
            row.uniqueness_gap <= 1e-6,
            format!("gap {:e}", row.uniqueness_gap),
        );
        let (below, above) = sol.bracket_margins();
        report.check(
            format!("{tag}.bracket"),
            below >= 0.0 && above >= 0.0,
            format!("margins {below:e} / {above:e}"),
        );
        report.check(format!("{tag}.positive"), sol.u_eps.min() > 0.0, "");
        if ceiling {
            report.check(
                format!("{tag}.below_m"),
                sol.u_eps.max() < o.m,
                format!("max u = {}", sol.u_eps.max()),
            );
        }
        rows.push(vec![
            row.eps.to_string(),
            row.gap.to_string(),
            row.sweeps.to_string(),
            row.uniqueness_gap.to_string(),
            w.is_some().to_string(),
            w.as_ref().map_or(String::new(), |w| w.lambda.to_string()),
        ]);
    }
    if o.study.rows.len() > 1 {
        report.check("gap_decreasing", o.study.strictly_decreasing(), "");
    }
    let (small_row, small) = o.study.smallest().expect("nonempty study");
    if let Some(tol) = cfg.ring.gap_tol {
        report.check(
            "gap_below_tol",
            small_row.gap < tol,
            format!("gap {} at eps {} vs {tol}", small_row.gap, small_row.eps),
        );
    }
    let k_small = o
        .study
        .rows
        .iter()
        .position(|r| r.eps == small_row.eps)
        .expect("row");
    let largest_with_witness = o
        .study
        .rows
        .iter()
        .zip(&o.witnesses)
        .filter(|(_, w)| w.is_some())
        .map(|(r, _)| r.eps)
        .fold(None, |m: Option<f64>, e| Some(m.map_or(e, |m| m.max(e))));
    match largest_with_witness {
        Some(e) => report.metric("threshold_eps", e),
        None => report.metric("threshold_eps", "none"),
    }
    let mut sets = Vec::new();
    let mut witnesses = Vec::new();
    match &o.witnesses[k_small] {
        Some(w) => {
            witness_metrics(report, "witness", w.lambda, &w.witness);
            report.metric("witness.dip_value", w.dip_value);
            report.metric("witness.top", w.top);
            report.metric("witness.hull_deficiency", w.confirmation.hull_deficiency);
            let field = ExtendedField::new(&small.ubar);
            report.check("witness_valid", w.witness.verify(&field, w.lambda), "");
            report.check(
                "witness_confirmed",
                !w.confirmation.is_convex,
                format!("deficiency {:e}", w.confirmation.hull_deficiency),
            );
            report.witness_found = !w.confirmation.is_convex;
            sets.push(ContourSet {
                lambda: w.lambda,
                contours: extract_superlevel(&small.ubar, w.lambda).contours,
            });
            witnesses.push(w.witness);
        }
        None => report.metric("witness", format!("no witness at eps {}", small_row.eps)),
    }
    em.table(
        report,
        "convergence.csv",
        &["eps", "gap", "sweeps", "uniqueness_gap", "witness", "lambda"],
        &rows,
    )?;
    em.field(report, "field_v.csv", &base.v)?;
    em.field(report, "field_ubar.csv", &small.ubar)?;
    em.contours(report, "contours_ubar.csv", &sets)?;
    em.figure(report, "field_ubar.svg", &small.ubar, &sets, &witnesses)?;
    Ok(())
}

/// Files of `report` relative to `dir`, for display.
pub fn relative_manifest(report: &RunReport, dir: &Path) -> Vec<PathBuf> {
    report
        .manifest
        .iter()
        .map(|p| p.strip_prefix(dir).unwrap_or(p).to_path_buf())
        .collect()
}
