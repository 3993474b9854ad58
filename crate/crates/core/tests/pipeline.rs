use std::collections::BTreeSet;
use std::path::Path;

use qclab::pipeline::*;
use qclab::Error;

fn stadium_config(a: f64, h: f64, dir: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        pipeline: PipelineKind::Stadium,
        ..Default::default()
    };
    cfg.domain.a = a;
    cfg.domain.h = h;
    cfg.levels.n = 20;
    cfg.output.dir = dir.to_path_buf();
    cfg
}

fn names(report: &RunReport, dir: &Path) -> BTreeSet<String> {
    relative_manifest(report, dir)
        .iter()
        .map(|p| p.display().to_string())
        .collect()
}

#[test]
fn short_stadium_has_only_convex_levels() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = stadium_config(1.0, 1.0 / 32.0, tmp.path());
    let report = run_pipeline(&cfg).unwrap();
    let o = stadium_outcome(&cfg, 1.0).unwrap();
    assert!(o.scan.all_convex());
    assert!(o.scan.nonconvex_window.is_none());
    assert!(!report.witness_found);
    assert!(!report.success());
    assert!(report.check_named("constraint").unwrap().passed);
}

#[test]
fn long_stadium_has_nonconvex_window() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = stadium_config(12.0, 1.0 / 32.0, tmp.path());
    let report = run_pipeline(&cfg).unwrap();
    assert!(report.success(), "{report}");
    let mu: f64 = report.metric_value("mu_a").unwrap().parse().unwrap();
    assert!(mu > 0.0);
    assert_ne!(report.metric_value("nonconvex_lo"), Some("none"));
    assert_eq!(report.metric_value("segment.in_window"), Some("true"));
}

#[test]
fn all_flags_emit_four_kinds() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = stadium_config(4.0, 1.0 / 16.0, tmp.path());
    let report = run_pipeline(&cfg).unwrap();
    for p in &report.manifest {
        assert!(p.exists(), "{}", p.display());
    }
    let files = names(&report, tmp.path());
    for f in ["field_u.csv", "field_v.csv", "contours_u.csv", "report.txt", "field_u.svg"] {
        assert!(files.contains(f), "{f} missing from {files:?}");
    }
    let text = std::fs::read_to_string(tmp.path().join("report.txt")).unwrap();
    assert!(text.starts_with("pipeline = stadium\n"));
    assert!(text.contains("\n[checks]\n"));
}

#[test]
fn contours_only_emits_contour_files() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = stadium_config(4.0, 1.0 / 16.0, tmp.path());
    cfg.output.fields = false;
    cfg.output.report = false;
    cfg.output.figures = false;
    let report = run_pipeline(&cfg).unwrap();
    let files = names(&report, tmp.path());
    assert_eq!(files, BTreeSet::from(["contours_u.csv".to_string()]));
    let on_disk: Vec<_> = std::fs::read_dir(tmp.path()).unwrap().collect();
    assert_eq!(on_disk.len(), 1);
}

#[test]
fn field_csv_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = stadium_config(2.0, 1.0 / 8.0, tmp.path());
    run_pipeline(&cfg).unwrap();
    let text = std::fs::read_to_string(tmp.path().join("field_u.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("nx,ny,h,origin_x,origin_y"));
    let dims: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(dims[2], 0.125);
    assert_eq!(lines.next(), Some("i,j,x,y,value,interior"));
    assert_eq!(lines.count(), (dims[0] * dims[1]) as usize);
    let contours = std::fs::read_to_string(tmp.path().join("contours_u.csv")).unwrap();
    assert!(contours.starts_with("contour,vertex,x,y,lambda\n"));
}

#[test]
fn rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let read = |run: &str| {
        let dir = tmp.path().join(run);
        let mut cfg = stadium_config(6.0, 1.0 / 16.0, &dir);
        cfg.execution = qclab::Execution::default();
        run_pipeline(&cfg).unwrap();
        ["field_u.csv", "field_v.csv", "contours_u.csv"]
            .map(|f| std::fs::read(dir.join(f)).unwrap())
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn sequential_and_parallel_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig {
        pipeline: PipelineKind::Sweep,
        ..Default::default()
    };
    cfg.domain.h = 1.0 / 16.0;
    cfg.sweep.values = vec![3.0, 5.0];
    cfg.levels.n = 10;
    let mut text = Vec::new();
    for exec in [qclab::Execution::Sequential, qclab::Execution::default()] {
        cfg.execution = exec;
        cfg.output.dir = tmp.path().join(format!("{exec:?}"));
        run_pipeline(&cfg).unwrap();
        text.push(std::fs::read(cfg.output.dir.join("sweep_a.csv")).unwrap());
    }
    assert_eq!(text[0], text[1]);
}

#[test]
fn ring_reports_segment_witness() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig {
        pipeline: PipelineKind::Ring,
        ..Default::default()
    };
    cfg.domain.shape = ShapeKind::Disk;
    cfg.domain.h = 1.0 / 32.0;
    cfg.ring.eps = vec![0.05];
    cfg.output.dir = tmp.path().to_path_buf();
    let report = run_pipeline(&cfg).unwrap();
    assert!(report.success(), "{report}");
    assert!(report.check_named("witness_confirmed").unwrap().passed);
    assert!(tmp.path().join("convergence.csv").exists());
}

#[test]
fn stage_errors_keep_partial_report() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig {
        pipeline: PipelineKind::Ring,
        ..Default::default()
    };
    cfg.domain.shape = ShapeKind::Disk;
    cfg.domain.h = 1.0 / 16.0;
    cfg.ring.f = "logistic 2 2".into();
    cfg.output.dir = tmp.path().to_path_buf();
    let err = run_pipeline(&cfg).unwrap_err();
    assert!(err.to_string().contains("base"), "{err}");
    let text = std::fs::read_to_string(tmp.path().join("report.txt")).unwrap();
    assert!(text.contains("failure = "));
    assert!(text.contains("status = fail"));
}

#[test]
fn config_round_trip() {
    let cfg = ExperimentConfig::default();
    let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
    assert_eq!(back, cfg);
    for name in ["stadium", "sweep_a", "ring", "ring_mild", "sweep_eps"] {
        let path = Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../configs")
            .join(format!("{name}.toml"));
        ExperimentConfig::load(&path).unwrap();
    }
}

#[test]
fn config_errors() {
    let is_config = |r: qclab::Result<ExperimentConfig>| matches!(r, Err(Error::Config(_)));
    assert!(is_config(ExperimentConfig::from_toml("colour = \"red\"\n")));
    assert!(is_config(ExperimentConfig::from_toml("[domain]\nh = -1.0\n")));
    assert!(is_config(ExperimentConfig::from_toml(
        "pipeline = \"ring\"\n[domain]\nshape = \"disk\"\n[ring]\nm = \"big\"\n"
    )));
    assert!(is_config(ExperimentConfig::from_toml(
        "pipeline = \"stadium\"\n[domain]\nshape = \"disk\"\n"
    )));
    assert!(is_config(ExperimentConfig::from_toml(
        "pipeline = \"ring\"\n[domain]\nshape = \"disk\"\n[ring]\nf = \"cubic\"\n"
    )));
    assert!(LevelsConfig::parse_triplet("0.1:0.9", 1e-3).is_err());
    assert!(LevelsConfig::parse_triplet("0.9:0.1:10", 1e-3).is_err());
    let l = LevelsConfig::parse_triplet("0.1:0.9:17", 1e-3).unwrap();
    assert_eq!((l.lo, l.hi, l.n), (0.1, 0.9, 17));
}

#[test]
fn pipeline_names_parse() {
    for p in [PipelineKind::Stadium, PipelineKind::Ring, PipelineKind::Sweep] {
        assert_eq!(p.name().parse::<PipelineKind>().unwrap(), p);
    }
    assert!("banana".parse::<PipelineKind>().is_err());
}
