//! Human-readable and JSON reports of a pipeline run.
//!
//! JSON objects use sorted keys and never include timings, so identical
//! inputs give byte-identical output.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::coeff::{Coeff, RatFunc, Series};
use crate::connection::HDecomposition;
use crate::matrix::Matrix;
use crate::ore::{DMono, GroebnerBasis, Operator, QuantizationReport};
use crate::pipeline::{
    verify_consistency, ConnectionArtifacts, GaugeArtifacts, Gauged, MirrorOutcome, PipelineResult, ProductsOutcome,
    StageStatus,
};
use crate::products::{ProductTable, ProductsResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Json,
}

pub fn emit_report(r: &PipelineResult, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&to_json(r)).expect("serializable");
            s.push('\n');
            s.into_bytes()
        }
        Format::Human => human(r).into_bytes(),
    }
}

fn standard_monomial(m: &DMono) -> String {
    let mut s = m.fmt_named("d");
    if s.is_empty() {
        return "1".into();
    }
    let k = m.degree();
    s = match k {
        1 => format!("h*{s}"),
        _ => format!("h^{k}*{s}"),
    };
    s
}

fn class_name(m: &DMono) -> String {
    let s = m.fmt_named("b");
    if s.is_empty() {
        "1".into()
    } else {
        s
    }
}

fn matrices_json<C: Coeff>(ms: &[Matrix<C>]) -> Value {
    Value::Array(ms.iter().map(Matrix::to_json).collect())
}

fn groebner_json<C: Coeff>(gb: &GroebnerBasis<C>) -> Value {
    let staircase = gb.staircase();
    json!({
        "basis": gb.elements().iter().map(Operator::fmt_operator).collect::<Vec<_>>(),
        "standard_monomials": staircase.monomials().map(|b| b.iter().map(standard_monomial).collect::<Vec<_>>()),
        "rank": staircase.rank(),
    })
}

fn quantization_json(q: &QuantizationReport<RatFunc>) -> Value {
    json!({
        "valid": q.valid,
        "quantized_rank": q.quantized_rank,
        "classical_rank": q.classical_rank,
        "limit_rank": q.limit_rank,
        "ideals_equal": q.ideals_equal,
        "symbols": q.symbols.iter().map(Operator::fmt_symbol).collect::<Vec<_>>(),
        "symbol_matches": q.symbol_matches,
        "failures": q.failures,
    })
}

fn decomposition_json<C: Coeff>(hd: &HDecomposition<C>) -> Value {
    json!({
        "p": hd.p(),
        "omega": matrices_json(&hd.omega),
        "theta": hd.theta.iter().map(|level| matrices_json(level)).collect::<Vec<_>>(),
    })
}

fn connection_json<C: Coeff>(c: &ConnectionArtifacts<C>) -> Value {
    json!({
        "basis": c.connection.basis.iter().map(standard_monomial).collect::<Vec<_>>(),
        "omega": matrices_json(&c.connection.omega),
        "decomposition": decomposition_json(&c.decomposition),
        "flat": c.flat,
        "wedge_zero": c.wedge_zero,
        "degree_homogeneous": c.homogeneity.pass,
    })
}

fn gauge_json<C: Coeff>(g: &GaugeArtifacts<C>) -> Value {
    json!({
        "trivial": g.solution.is_trivial(),
        "q0": g.solution.q0().to_json(),
        "q0_inverse": g.q0_inverse.to_json(),
        "l_plus": matrices_json(&g.solution.l_plus),
        "omega_hat": matrices_json(&g.solution.omega_hat),
        "profile": g.profile.profile.map(|p| format!("{p:?}").to_lowercase()),
        "profile_pass": g.profile.pass,
        "dubrovin": {
            "pure_pole": g.dubrovin.pure_pole,
            "closed": g.dubrovin.closed,
            "wedge_zero": g.dubrovin.wedge_zero,
        },
    })
}

fn table_json<C: Coeff>(t: &ProductTable<C>) -> Value {
    let n = t.rank();
    let mut cells = Vec::new();
    for i in 0..n {
        for j in i..n {
            cells.push(json!({
                "left": class_name(&t.basis[i]),
                "right": class_name(&t.basis[j]),
                "product": t.product_class(i, j).fmt_symbol(),
                "coefficients": t.product(i, j).iter().map(Coeff::to_json).collect::<Vec<_>>(),
            }));
        }
    }
    Value::Array(cells)
}

fn products_json<C: Coeff>(p: &ProductsResult<C>) -> Value {
    json!({
        "relations": p.relations.iter().map(Operator::fmt_symbol).collect::<Vec<_>>(),
        "algebra": p.algebra.elements().iter().map(Operator::fmt_symbol).collect::<Vec<_>>(),
        "basis": p.basis_map.classical.iter().map(class_name).collect::<Vec<_>>(),
        "hatted_basis": p.basis_map.hatted.iter().map(Operator::fmt_symbol).collect::<Vec<_>>(),
        "table": table_json(&p.table),
    })
}

fn series_list(v: &[Series]) -> Value {
    Value::Array(v.iter().map(Coeff::to_json).collect())
}

pub fn to_json(r: &PipelineResult) -> Value {
    let p = &r.problem;
    let stages: Vec<Value> = r
        .stages
        .iter()
        .map(|s| match &s.status {
            StageStatus::Ok => json!({ "name": s.stage.name(), "status": "ok" }),
            StageStatus::Skipped(why) => json!({ "name": s.stage.name(), "status": "skipped", "detail": why }),
            StageStatus::Failed => json!({ "name": s.stage.name(), "status": "failed" }),
        })
        .collect();
    let mut out = json!({
        "problem": {
            "name": p.name,
            "q_degrees": p.grading.q_degrees(),
            "operators": p.operator_sources,
            "mode": p.options.mode.as_str(),
            "truncation": p.options.truncation,
            "step_cap": p.options.step_cap,
        },
        "stages": stages,
        "failure": r.failure.as_ref().map(|f| json!({
            "stage": f.stage.name(),
            "kind": f.kind.name(),
            "message": f.message,
            "exit_code": f.kind.exit_code(),
        })),
    });
    let obj = out.as_object_mut().expect("object");
    obj.insert("inconsistencies".into(), json!(verify_consistency(r)));
    if let Some(gb) = &r.groebner {
        obj.insert("groebner".into(), groebner_json(gb));
    }
    if let Some(q) = &r.quantization {
        obj.insert("quantization".into(), quantization_json(q));
    }
    if let Some(c) = &r.connection {
        obj.insert("connection".into(), connection_json(c));
    }
    if let Some(g) = &r.gauge {
        let v = match g {
            Gauged::Rational(g) => gauge_json(g),
            Gauged::Series(g) => gauge_json(g),
        };
        obj.insert("gauge".into(), v);
    }
    if let Some(m) = &r.mirror {
        let v = match m {
            MirrorOutcome::NotNeeded => json!({ "status": "not_needed" }),
            MirrorOutcome::Identity => json!({ "status": "identity" }),
            MirrorOutcome::Applied(m) => json!({
                "status": "applied",
                "jacobian": m.change.jacobian.to_json(),
                "shifts": series_list(&m.change.shifts),
                "forward": series_list(&m.change.forward),
                "inverse": series_list(&m.change.inverse),
                "operators": m.operators.iter().map(Operator::fmt_operator).collect::<Vec<_>>(),
                "groebner": groebner_json(&m.groebner),
                "connection": connection_json(&m.connection),
                "gauge": gauge_json(&m.gauge),
            }),
        };
        obj.insert("mirror".into(), v);
    }
    if let Some(pr) = &r.products {
        let v = match pr {
            ProductsOutcome::Rational(p) => products_json(p),
            ProductsOutcome::Series { result, pullback } => {
                let mut v = products_json(result);
                if let Some(t) = pullback {
                    v.as_object_mut().expect("object").insert("pullback".into(), table_json(t));
                }
                v
            }
        };
        obj.insert("products".into(), v);
    }
    out
}

/// `(1/h) * ω + θ⁽⁰⁾ + h * θ⁽¹⁾ + ...`, omitting zero parts.
fn fmt_connection<C: Coeff>(hd: &HDecomposition<C>, i: usize) -> String {
    let mut parts = Vec::new();
    if !hd.omega[i].is_zero() {
        parts.push(format!("(1/h) * {}", hd.omega[i]));
    }
    for (k, level) in hd.theta.iter().enumerate() {
        if level[i].is_zero() {
            continue;
        }
        parts.push(match k {
            0 => format!("{}", level[i]),
            1 => format!("h * {}", level[i]),
            _ => format!("h^{k} * {}", level[i]),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn human_groebner<C: Coeff>(out: &mut String, gb: &GroebnerBasis<C>) {
    for g in gb.elements() {
        let _ = writeln!(out, "  {}", g.fmt_operator());
    }
    let st = gb.staircase();
    match st.monomials() {
        Some(b) => {
            let names: Vec<String> = b.iter().map(standard_monomial).collect();
            let _ = writeln!(out, "  standard monomials: {} (rank {})", names.join(", "), b.len());
        }
        None => {
            let _ = writeln!(out, "  standard monomials: infinitely many");
        }
    }
}

fn human_connection<C: Coeff>(out: &mut String, c: &ConnectionArtifacts<C>) {
    for i in 0..c.connection.nvars() {
        let _ = writeln!(out, "  Ω_{} = {}", i + 1, fmt_connection(&c.decomposition, i));
    }
    let _ = writeln!(
        out,
        "  p = {}, flat: {}, ω∧ω = 0: {}, degree homogeneous: {}",
        c.decomposition.p(),
        c.flat,
        c.wedge_zero,
        c.homogeneity.pass
    );
}

fn human_gauge<C: Coeff>(out: &mut String, g: &GaugeArtifacts<C>) {
    if g.solution.is_trivial() {
        let _ = writeln!(out, "  L₊ = I");
    } else {
        let _ = writeln!(out, "  Q₀⁻¹ = {}", g.q0_inverse);
        for (k, l) in g.solution.l_plus.iter().enumerate().skip(1) {
            let _ = writeln!(out, "  L_{k} = {l}");
        }
    }
    for (i, w) in g.solution.omega_hat.iter().enumerate() {
        let _ = writeln!(out, "  ω̂_{} = {}", i + 1, w);
    }
}

fn human_products<C: Coeff>(out: &mut String, p: &ProductsResult<C>, pullback: Option<&ProductTable<C>>) {
    let rels: Vec<String> = p.relations.iter().map(Operator::fmt_symbol).collect();
    let _ = writeln!(out, "  relations: {}", rels.join(", "));
    let hatted: Vec<String> = p.basis_map.hatted.iter().map(Operator::fmt_symbol).collect();
    let _ = writeln!(out, "  hatted basis: {}", hatted.join(", "));
    let t = &p.table;
    for i in 0..t.rank() {
        for j in i..t.rank() {
            let _ = writeln!(
                out,
                "  {} ∘ {} = {}",
                class_name(&t.basis[i]),
                class_name(&t.basis[j]),
                t.product_class(i, j).fmt_symbol()
            );
        }
    }
    if let Some(pb) = pullback {
        let _ = writeln!(out, "  in the original coordinates:");
        for i in 0..pb.rank() {
            for j in i..pb.rank() {
                let _ = writeln!(
                    out,
                    "    {} ∘ {} = {}",
                    class_name(&pb.basis[i]),
                    class_name(&pb.basis[j]),
                    pb.product_class(i, j).fmt_symbol()
                );
            }
        }
    }
}

fn human(r: &PipelineResult) -> String {
    let mut out = String::new();
    let p = &r.problem;
    let _ = writeln!(
        out,
        "problem {}: |q| = {:?}, {} coefficients, truncation {}",
        p.name,
        p.grading.q_degrees(),
        p.options.mode,
        p.options.truncation
    );
    for s in &r.stages {
        let (status, detail) = match &s.status {
            StageStatus::Ok => ("ok", String::new()),
            StageStatus::Skipped(why) => ("skipped", format!("  {why}")),
            StageStatus::Failed => ("FAILED", String::new()),
        };
        let elapsed = format!("{:.1?}", s.elapsed);
        let _ = writeln!(out, "  {:<13} {:<8} {:>10}{}", s.stage.name(), status, elapsed, detail);
    }
    if let Some(gb) = &r.groebner {
        let _ = writeln!(out, "\nGröbner basis:");
        human_groebner(&mut out, gb);
    }
    if let Some(q) = &r.quantization {
        let _ = writeln!(out, "\nquantization: {}", if q.valid { "valid" } else { "invalid" });
        for f in &q.failures {
            let _ = writeln!(out, "  {f}");
        }
    }
    if let Some(c) = &r.connection {
        let _ = writeln!(out, "\nconnection:");
        human_connection(&mut out, c);
    }
    if let Some(g) = &r.gauge {
        let _ = writeln!(out, "\ngauge:");
        match g {
            Gauged::Rational(g) => human_gauge(&mut out, g),
            Gauged::Series(g) => human_gauge(&mut out, g),
        }
    }
    if let Some(MirrorOutcome::Applied(m)) = &r.mirror {
        let _ = writeln!(out, "\ncoordinate change:");
        for (k, s) in m.change.forward.iter().enumerate() {
            let _ = writeln!(out, "  q̂{} = {}", k + 1, s);
        }
        for (k, s) in m.change.inverse.iter().enumerate() {
            let _ = writeln!(out, "  q{} = {}", k + 1, s.to_string().replace('q', "q̂"));
        }
        let _ = writeln!(out, "  transformed operators (in q̂, written q):");
        for op in &m.operators {
            let _ = writeln!(out, "    {}", op.fmt_operator());
        }
        let _ = writeln!(out, "\nGröbner basis (hatted):");
        human_groebner(&mut out, &m.groebner);
        let _ = writeln!(out, "\nconnection (hatted):");
        human_connection(&mut out, &m.connection);
        let _ = writeln!(out, "\ngauge (hatted):");
        human_gauge(&mut out, &m.gauge);
    }
    if let Some(pr) = &r.products {
        let _ = writeln!(out, "\nproducts:");
        match pr {
            ProductsOutcome::Rational(p) => human_products(&mut out, p, None),
            ProductsOutcome::Series { result, pullback } => human_products(&mut out, result, pullback.as_ref()),
        }
    }
    if let Some(f) = &r.failure {
        let _ = writeln!(out, "\nerror: {f}");
    }
    out
}
