use std::path::Path;

use qdefect::defect::{
    apply_puncture, check_correctable, Basis, DeformedCode, PunctureKind, PunctureSpec, REDUCTION_RULE,
};
use qdefect::deform::{
    check_nonmixing, compose, css_pairs, measure_round, puncture_transition, same_group, step_partition, Partition,
    RoundOptions, StabilizerState,
};
use qdefect::f2::{BitMatrix, BitVec};
use qdefect::fgraph::FactorGraph;
use qdefect::hgp::{Distance, HgpCode};
use qdefect::par::Execution;
use qdefect::symplectic::{Pauli, SymplecticOp};
use qdefect::trace::{build_logical_graph, eulerian_traceable};
use qdefect::wormhole::{apply_wormhole, check_extended_correctable, predicted_logical_count, wormhole_logical_operators};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::bundle::{self, Bundle, CheckMatrix, Provenance, Realized, Recipe, RecipeKind};
use crate::{input, lists, CliError, Outcome};

pub struct Context {
    pub one_based: bool,
    pub exec: Execution,
}

fn supports(m: &BitMatrix) -> Vec<Vec<usize>> {
    m.row_supports()
}

fn op_json(op: &SymplecticOp) -> Value {
    json!({ "x": op.x.support(), "z": op.z.support() })
}

fn bits(m: &BitMatrix) -> Vec<String> {
    m.iter_rows()
        .map(|r| (0..r.len()).map(|i| if r.get(i) { '1' } else { '0' }).collect())
        .collect()
}

/// Audits a freshly made bundle before it touches the disk.
fn write_verified(out: &Path, bundle: &Bundle, realized: &Realized, exec: Execution) -> Result<(), CliError> {
    let failed: Vec<String> = bundle::audit(bundle, realized, exec)
        .into_iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();
    if !failed.is_empty() {
        return Err(CliError::Verification(format!("refusing to write bundle: {}", failed.join("; "))));
    }
    bundle::save(out, bundle)
}

fn undefected(path: &Path, exec: Execution) -> Result<(Bundle, Realized, bundle::InputHash), CliError> {
    let loaded = bundle::load(path, exec)?;
    if loaded.0.defect.is_some() {
        return Err(CliError::Input(format!("{} already carries a defect", path.display())));
    }
    Ok(loaded)
}

pub fn build(ctx: &Context, alist: &Path, out: &Path, budget: usize) -> Result<Outcome, CliError> {
    let (bytes, hash) = bundle::read(alist, "alist")?;
    let text = String::from_utf8(bytes).map_err(input)?;
    let h = FactorGraph::from_alist(&text).map_err(input)?.to_matrix();
    let code = HgpCode::build(&h).map_err(input)?;
    let params = code.parameters(budget, ctx.exec);
    let deformed = DeformedCode::undeformed(&code);
    let provenance = Provenance::default().derive(vec![hash], format!("build distance_budget={budget}"));
    let b = Bundle::new(CheckMatrix::of(&h), None, &deformed, provenance);
    let realized = Realized { code, deformed, puncture: None, wormhole: None };
    write_verified(out, &b, &realized, ctx.exec)?;
    let code = &realized.code;
    let d = match params.distance {
        Distance::Exact(d) => Some(d),
        _ => None,
    };
    Ok(Outcome {
        report: json!({
            "command": "build",
            "classical": { "n_vars": code.n(), "n_checks": code.m() },
            "n_qubits": params.n_qubits,
            "k": params.k,
            "d": d,
            "distance": params.distance,
            "distance_budget": budget,
            "x_stabilizers": code.hx().rows(),
            "z_stabilizers": code.hz().rows(),
            "max_stabilizer_weight": code.max_stabilizer_weight(),
        }),
        ok: true,
    })
}

fn spec_json(spec: &PunctureSpec) -> Value {
    json!({
        "kind": spec.kind,
        "vars": spec.s.members(),
        "checks": spec.t.members(),
        "induced": spec.induced,
        "interior_qubits": spec.interior_qubits,
        "boundary_qubits": spec.boundary_qubits,
        "boundary_stabilizers": spec.boundary_stabs,
        "removed_stabilizers": spec.removed_stabs,
        "measurement_basis": spec.measurement_basis,
        "warnings": spec.warnings,
    })
}

fn recipe_from_args(ctx: &Context, kind: RecipeKind, vars: &str, checks: &str, force: bool) -> Result<Recipe, CliError> {
    Ok(Recipe {
        kind,
        vars: lists::parse(vars, ctx.one_based, false)?,
        checks: lists::parse(checks, ctx.one_based, true)?,
        force,
    })
}

pub fn puncture(
    ctx: &Context,
    code_path: &Path,
    kind: PunctureKind,
    vars: &str,
    checks: &str,
    out: &Path,
    force: bool,
) -> Result<Outcome, CliError> {
    let (parent, realized, hash) = undefected(code_path, ctx.exec)?;
    let recipe = recipe_from_args(ctx, RecipeKind::puncture(kind), vars, checks, force)?;
    let code = realized.code;
    let spec = bundle::puncture_spec(&code, &recipe)?;
    let correctability = check_correctable(&code, &spec);
    let mut report = json!({
        "command": "puncture",
        "puncture": spec_json(&spec),
        "correctability": correctability,
        "forced": force,
    });
    if !correctability.correctable && !force {
        report["written"] = json!(false);
        report["failures"] = json!(correctability.failures());
        return Ok(Outcome { report, ok: false });
    }
    let d = apply_puncture(&code, &spec, force).map_err(|e| CliError::Verification(e.to_string()))?;
    let step = format!("puncture kind={:?} vars={:?} checks={:?} force={force}", recipe.kind, recipe.vars, recipe.checks);
    let b = Bundle::new(parent.check_matrix.clone(), Some(recipe), &d, parent.provenance.derive(vec![hash], step));
    report["logical_count"] = json!({
        "embedded": code.k(),
        "defect": d.defect_logical_count(),
        "by_rank": d.logical_count_by_rank(),
    });
    report["defect_logicals"] = json!({
        "x": supports(&d.new_logical_x),
        "z": supports(&d.new_logical_z),
        "chain_reduction": REDUCTION_RULE,
    });
    report["max_generator_weight"] = json!(d.max_generator_weight());
    let realized = Realized { code, deformed: d, puncture: Some(spec), wormhole: None };
    write_verified(out, &b, &realized, ctx.exec)?;
    report["written"] = json!(true);
    Ok(Outcome { report, ok: true })
}

pub fn wormhole(ctx: &Context, code_path: &Path, vars: &str, checks: &str, out: &Path, force: bool) -> Result<Outcome, CliError> {
    let (parent, realized, hash) = undefected(code_path, ctx.exec)?;
    let recipe = recipe_from_args(ctx, RecipeKind::Wormhole, vars, checks, force)?;
    if recipe.vars.is_empty() || recipe.checks.is_empty() {
        return Err(CliError::Input("a wormhole needs nonempty --vars and --checks".into()));
    }
    let code = realized.code;
    let (s, t) = bundle::node_sets(&code, &recipe)?;
    let correctability = check_extended_correctable(&code, &s, &t).map_err(input)?;
    let mut report = json!({
        "command": "wormhole",
        "vars": s.members(),
        "checks": t.members(),
        "correctability": correctability,
        "forced": force,
    });
    if !correctability.correctable && !force {
        report["written"] = json!(false);
        return Ok(Outcome { report, ok: false });
    }
    let (spec, d) = apply_wormhole(&code, &s, &t, force).map_err(|e| CliError::Verification(e.to_string()))?;
    let spec = spec.expect("nonempty sets give a wormhole");
    let logicals = wormhole_logical_operators(&code, &spec);
    let induced = &spec.induced;
    let expected_hybrids = induced.m.len() * induced.n.len() - induced.b.len() * induced.a.len();
    let violations = d.commutation_violations(ctx.exec);
    let loops = |pairs: &[qdefect::wormhole::LoopPair]| -> Vec<Value> {
        pairs
            .iter()
            .map(|p| json!({ "z": p.z.support(), "x": p.x.support(), "witness": p.witness.is_some() }))
            .collect()
    };
    let witnessed = logicals.type1.iter().all(|p| p.witness.is_some());
    let defect = predicted_logical_count(&logicals);
    let count_ok = d.logical_count_by_rank() == code.k() + defect;
    let weight_ok = d.max_generator_weight() <= 2 * code.max_stabilizer_weight();
    report["induced"] = json!(induced);
    report["interior_qubits"] = json!(spec.interior_qubits());
    report["two_qubit_measurements"] = json!(spec.measurements);
    report["hybrids"] = json!({ "count": spec.hybrid_count(), "expected": expected_hybrids, "pairs": spec.hybrid_pairs });
    report["logicals"] = json!({
        "type1": loops(&logicals.type1),
        "type2": loops(&logicals.type2),
        "chain_conjugates": logicals.chain_conjugates.iter().map(op_json).collect::<Vec<_>>(),
        "pairing_rule": logicals.pairing_rule,
    });
    report["logical_count"] = json!({ "embedded": code.k(), "defect": defect, "by_rank": d.logical_count_by_rank() });
    report["commutation_violations"] = json!(violations.len());
    report["max_generator_weight"] = json!({ "wormhole": d.max_generator_weight(), "base": code.max_stabilizer_weight() });
    let ok = violations.is_empty() && spec.hybrid_count() == expected_hybrids && witnessed && (count_ok || force) && weight_ok;
    let step = format!("wormhole vars={:?} checks={:?} force={force}", recipe.vars, recipe.checks);
    let b = Bundle::new(parent.check_matrix.clone(), Some(recipe), &d, parent.provenance.derive(vec![hash], step));
    let realized = Realized { code, deformed: d, puncture: None, wormhole: Some(spec) };
    write_verified(out, &b, &realized, ctx.exec)?;
    report["written"] = json!(true);
    Ok(Outcome { report, ok })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Script {
    #[serde(default)]
    threshold: Option<usize>,
    /// Puncture configurations in order; `null` is the undeformed code.
    steps: Vec<Option<ScriptPuncture>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptPuncture {
    kind: PunctureKind,
    vars: Vec<usize>,
    checks: Vec<usize>,
}

fn single(n: usize, q: usize, basis: Basis) -> SymplecticOp {
    SymplecticOp::single(n, q, if basis == Basis::X { Pauli::X } else { Pauli::Z })
}

/// Generators of a deformed code together with its single-qubit measurements.
fn measured_group(d: &DeformedCode) -> Vec<SymplecticOp> {
    let n = d.n_qubits();
    let mut ops = d.generators();
    ops.extend(d.measured_out.iter().map(|m| single(n, m.qubit, m.basis)));
    ops
}

fn flat_pairs(xs: &BitMatrix, zs: &BitMatrix) -> Vec<SymplecticOp> {
    css_pairs(xs, zs)
        .unwrap_or_default()
        .into_iter()
        .flat_map(|(x, z)| [x, z])
        .collect()
}

pub fn deform(ctx: &Context, code_path: &Path, script_path: &Path, out: &Path, threshold: Option<usize>) -> Result<Outcome, CliError> {
    let (parent, realized, code_hash) = bundle::load(code_path, ctx.exec)?;
    if realized.wormhole.is_some() {
        return Err(CliError::Input("deformation scripts start from a punctured or undeformed code".into()));
    }
    let (bytes, script_hash) = bundle::read(script_path, "script")?;
    let script: Script =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", script_path.display())))?;
    let threshold = threshold
        .or(script.threshold)
        .ok_or_else(|| CliError::Input("no threshold: pass --threshold or set it in the script".into()))?;
    let code = &realized.code;
    let n = code.n_qubits();

    let d0 = &realized.deformed;
    let mut preferred = flat_pairs(&d0.new_logical_x, &d0.new_logical_z);
    preferred.extend(flat_pairs(&code.embedded_logical_x_basis(), &code.embedded_logical_z_basis()));
    let initial = StabilizerState::from_candidates(n, measured_group(d0), &preferred, threshold).map_err(input)?;

    let mut state = initial.clone();
    let mut current: Option<PunctureSpec> = realized.puncture.clone();
    let mut current_recipe = parent.defect.clone();
    let mut current_code = realized.deformed.clone();
    let mut steps = Vec::new();
    let mut step_reports = Vec::new();
    let mut groups_ok = true;
    for (i, entry) in script.steps.iter().enumerate() {
        let recipe = match entry {
            Some(p) => Some(Recipe {
                kind: RecipeKind::puncture(p.kind),
                vars: lists::rebase(&p.vars, ctx.one_based)?,
                checks: lists::rebase(&p.checks, ctx.one_based)?,
                force: false,
            }),
            None => None,
        };
        let spec = recipe.as_ref().map(|r| bundle::puncture_spec(code, r)).transpose()?;
        let next_code = match &spec {
            Some(s) => apply_puncture(code, s, false).map_err(|e| CliError::Input(format!("step {i}: {e}")))?,
            None => DeformedCode::undeformed(code),
        };
        let ops = puncture_transition(code, current.as_ref(), spec.as_ref())
            .map_err(|e| CliError::Input(format!("step {i}: {e}")))?;
        let target = measured_group(&next_code);
        let opts = RoundOptions { target: Some(&target), conjugate_budget: None, exec: ctx.exec };
        let (next, record) = measure_round(&state, &ops, &opts).map_err(|e| CliError::Input(format!("step {i}: {e}")))?;
        let verdict = check_nonmixing(&record.q_matrix, &step_partition(&state, &next)).map_err(input)?;
        let group_ok = same_group(n, &next.stabilizers, &target);
        groups_ok &= group_ok;
        step_reports.push(json!({
            "index": i,
            "puncture": recipe.as_ref().map(|r| json!({ "kind": r.kind, "vars": r.vars, "checks": r.checks })),
            "measurements": ops.len(),
            "actions": record.actions,
            "fates": record.fates,
            "promoted": record.promoted.iter().map(|p| json!({
                "generator": op_json(&p.generator),
                "conjugate": op_json(&p.conjugate),
                "method": p.method,
            })).collect::<Vec<_>>(),
            "non_qubit": record.non_qubit.len(),
            "q": bits(&record.logical_block()),
            "fresh_rows": record.fresh_rows,
            "nonmixing": verdict,
            "group_matches_target": group_ok,
        }));
        steps.push(record);
        state = next;
        current = spec;
        current_recipe = recipe;
        current_code = next_code;
    }

    let total = compose(&steps).map_err(input)?;
    let total = if steps.is_empty() { BitMatrix::identity(2 * initial.logicals.len()) } else { total };
    let partition = Partition { row_good: state.row_partition(), col_good: initial.row_partition() };
    let verdict = check_nonmixing(&total, &partition).map_err(input)?;
    let report = json!({
        "command": "deform",
        "threshold": threshold,
        "initial_labels": initial.labels(),
        "steps": step_reports,
        "composed_q": bits(&total),
        "nonmixing": verdict,
        "final_labels": state.labels(),
        "groups_match_targets": groups_ok,
    });

    let step = format!("deform threshold={threshold} steps={}", script.steps.len());
    let b = Bundle::new(
        parent.check_matrix.clone(),
        current_recipe,
        &current_code,
        parent.provenance.derive(vec![code_hash, script_hash], step),
    );
    let realized = Realized { code: realized.code, deformed: current_code, puncture: current, wormhole: None };
    write_verified(out, &b, &realized, ctx.exec)?;
    Ok(Outcome { report, ok: groups_ok })
}

pub fn trace(ctx: &Context, code_path: &Path, logical: Option<usize>, support: Option<&str>, basis: Basis) -> Result<Outcome, CliError> {
    let (_, realized, _) = bundle::load(code_path, ctx.exec)?;
    let code = &realized.code;
    let n = code.n_qubits();
    let bits = match (logical, support) {
        (Some(i), _) => {
            let i = lists::rebase(&[i], ctx.one_based)?[0];
            let rows = match basis {
                Basis::X => code.embedded_logical_x_basis(),
                Basis::Z => code.embedded_logical_z_basis(),
            };
            if i >= rows.rows() {
                return Err(CliError::Input(format!("logical {i} out of range ({} rows)", rows.rows())));
            }
            rows.row(i).clone()
        }
        (None, Some(text)) => {
            let qubits = lists::parse(text, ctx.one_based, false)?;
            if let Some(&q) = qubits.iter().find(|&&q| q >= n) {
                return Err(CliError::Input(format!("qubit {q} out of range ({n} qubits)")));
            }
            BitVec::from_support(n, &qubits)
        }
        (None, None) => return Err(CliError::Input("pass --logical or --support".into())),
    };
    let op = match basis {
        Basis::X => SymplecticOp::x_type(bits),
        Basis::Z => SymplecticOp::z_type(bits),
    };
    let graph = build_logical_graph(code, &op).map_err(input)?;
    let multigraph = graph.multigraph();
    let verdict = eulerian_traceable(&multigraph);
    let qubits_of = |trail: &Option<Vec<usize>>| trail.as_ref().map(|t| t.iter().map(|&e| graph.edges[e].0).collect::<Vec<_>>());
    let report = json!({
        "command": "trace",
        "basis": basis,
        "support": op.support(),
        "vertices": graph.vertices,
        "edges": graph.edges,
        "degrees": multigraph.degrees(),
        "traceable": verdict.traceable,
        "cycle": verdict.cycle,
        "cycle_qubits": qubits_of(&verdict.cycle),
        "open_trail": verdict.open_trail,
    });
    Ok(Outcome { report, ok: true })
}

pub fn verify(ctx: &Context, code_path: &Path) -> Result<Outcome, CliError> {
    let (b, realized, hash, checks) = bundle::load_unchecked(code_path, ctx.exec)?;
    let ok = checks.iter().all(|c| c.pass);
    let report = json!({
        "command": "verify",
        "sha256": hash.sha256,
        "defect": b.defect,
        "n_qubits": b.n_qubits,
        "generators": b.generators.len(),
        "measured": b.measured.len(),
        "max_generator_weight": realized.deformed.max_generator_weight(),
        "checks": checks,
        "pass": ok,
    });
    Ok(Outcome { report, ok })
}
