use qdm_core::coeff::RatFunc;
use qdm_core::parse::parse_relation;
use qdm_core::pipeline::{
    run_full_pipeline, run_pipeline, verify_consistency, FailureKind, MirrorOutcome, ProductsOutcome, RunOptions, Stage,
    StageStatus,
};
use qdm_core::problem::{bundled, bundled_names, parse_problem, Overrides};
use qdm_core::report::{emit_report, Format};

#[test]
fn bundled_problems_run_to_completion() {
    for name in bundled_names() {
        let r = run_full_pipeline(&bundled(name).unwrap());
        if name == "sigma2-naive" {
            let f = r.failure.as_ref().expect("naive quantization must fail");
            assert_eq!((f.stage, f.kind), (Stage::Quantization, FailureKind::Math));
            assert_eq!(r.exit_code(), 3);
            assert!(r.connection.is_none());
            continue;
        }
        assert!(r.failure.is_none(), "{name}: {:?}", r.failure);
        assert_eq!(r.stages.len(), Stage::ALL.len(), "{name}");
        assert!(verify_consistency(&r).is_empty(), "{name}: {:?}", verify_consistency(&r));
    }
}

#[test]
fn stages_stop_where_asked() {
    let p = bundled("cp2").unwrap();
    let r = run_pipeline(&p, RunOptions { until: Stage::Validate, pullback: false });
    assert_eq!(r.stages.len(), 1);
    assert!(r.groebner.is_none());
    let r = run_pipeline(&p, RunOptions { until: Stage::Connection, pullback: false });
    assert_eq!(r.stage(Stage::Connection).unwrap().status, StageStatus::Ok);
    assert!(r.gauge.is_none());
}

#[test]
fn gauge_is_skipped_without_theta() {
    let r = run_full_pipeline(&bundled("p1xp1").unwrap());
    assert!(matches!(r.stage(Stage::Gauge).unwrap().status, StageStatus::Skipped(_)));
    assert!(matches!(r.mirror, Some(MirrorOutcome::NotNeeded)));
}

#[test]
fn step_cap_is_a_resource_failure() {
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/problems/sigma2.toml")).unwrap();
    let p = parse_problem(&src, &Overrides { step_cap: Some(1), ..Default::default() }).unwrap();
    let r = run_full_pipeline(&p);
    assert_eq!(r.failure.unwrap().kind, FailureKind::Resource);
}

#[test]
fn human_report_shows_connection() {
    let r = run_full_pipeline(&bundled("cp1").unwrap());
    let text = String::from_utf8(emit_report(&r, Format::Human)).unwrap();
    assert!(text.contains("(1/h) * [[0, q1], [1, 0]]"), "{text}");
}

#[test]
fn fano3_products() {
    let r = run_full_pipeline(&bundled("fano3").unwrap());
    let Some(ProductsOutcome::Rational(p)) = &r.products else {
        panic!("no rational product table");
    };
    let expect = |i, j, s: &str| {
        let want = parse_relation(s, 1).unwrap();
        let got = p.table.product_class(i, j);
        assert!(got.sub(&want).is_zero(), "{i} {j}: {}", got.fmt_symbol());
    };
    expect(1, 1, "b1^2 + q1");
    expect(1, 2, "q1*b1");
    expect(2, 2, "q1^2");
    assert!(p.table.entries.iter().flatten().flatten().all(|c: &RatFunc| c.is_polynomial()));
}
