//! Code bundles: the classical check matrix and defect recipe a code was
//! made from, its generator list, and provenance hashes.
//!
//! A bundle is realized again from its recipe on every load and must match
//! its stored generators exactly; loading then re-runs the full audit.

use std::path::Path;

use qdefect::defect::{apply_puncture, make_puncture, DefectKind, DeformedCode, MeasuredQubit, PunctureKind, PunctureSpec};
use qdefect::f2::{BitMatrix, BitVec};
use qdefect::fgraph::NodeSet;
use qdefect::hgp::HgpCode;
use qdefect::par::Execution;
use qdefect::symplectic::{anticommuting_pairs, SymplecticOp};
use qdefect::wormhole::{apply_wormhole, predicted_logical_count, wormhole_logical_operators, WormholeSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{input, CliError};

pub const FORMAT: &str = "qdefect-bundle/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckMatrix {
    pub n_vars: usize,
    /// Variable support of each check, 0-indexed.
    pub checks: Vec<Vec<usize>>,
}

impl CheckMatrix {
    pub fn of(h: &BitMatrix) -> Self {
        Self { n_vars: h.cols(), checks: h.row_supports() }
    }

    pub fn matrix(&self) -> Result<BitMatrix, CliError> {
        for (c, row) in self.checks.iter().enumerate() {
            if let Some(&v) = row.iter().find(|&&v| v >= self.n_vars) {
                return Err(CliError::Input(format!("check {c} touches variable {v} of {}", self.n_vars)));
            }
        }
        Ok(BitMatrix::from_supports(self.n_vars, &self.checks))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecipeKind {
    Smooth,
    Rough,
    Wormhole,
}

impl RecipeKind {
    pub fn puncture(kind: PunctureKind) -> Self {
        match kind {
            PunctureKind::Smooth => RecipeKind::Smooth,
            PunctureKind::Rough => RecipeKind::Rough,
        }
    }
}

/// Defect applied to the base code, in canonical 0-indexed form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recipe {
    pub kind: RecipeKind,
    pub vars: Vec<usize>,
    pub checks: Vec<usize>,
    #[serde(default)]
    pub force: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub x: Vec<usize>,
    pub z: Vec<usize>,
}

impl Generator {
    pub fn of(op: &SymplecticOp) -> Self {
        Self { x: op.x.support(), z: op.z.support() }
    }

    fn op(&self, n: usize) -> Option<SymplecticOp> {
        if self.x.iter().chain(&self.z).any(|&q| q >= n) {
            return None;
        }
        Some(SymplecticOp::new(BitVec::from_support(n, &self.x), BitVec::from_support(n, &self.z)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputHash {
    pub role: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub inputs: Vec<InputHash>,
    pub history: Vec<String>,
}

impl Provenance {
    /// The parent's provenance extended by one command.
    pub fn derive(&self, inputs: Vec<InputHash>, step: String) -> Self {
        let mut next = self.clone();
        next.inputs.extend(inputs);
        next.history.push(step);
        next
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bundle {
    pub format: String,
    pub check_matrix: CheckMatrix,
    pub defect: Option<Recipe>,
    pub n_qubits: usize,
    /// Layout order: X, Z, hybrids, two-qubit measurements.
    pub generators: Vec<Generator>,
    pub measured: Vec<MeasuredQubit>,
    pub provenance: Provenance,
}

impl Bundle {
    pub fn new(check_matrix: CheckMatrix, defect: Option<Recipe>, d: &DeformedCode, provenance: Provenance) -> Self {
        Self {
            format: FORMAT.to_string(),
            check_matrix,
            defect,
            n_qubits: d.n_qubits(),
            generators: d.generators().iter().map(Generator::of).collect(),
            measured: d.measured_out.clone(),
            provenance,
        }
    }
}

/// A bundle's code rebuilt from its recipe.
pub struct Realized {
    pub code: HgpCode,
    pub deformed: DeformedCode,
    pub puncture: Option<PunctureSpec>,
    pub wormhole: Option<WormholeSpec>,
}

pub fn base_code(check_matrix: &CheckMatrix) -> Result<HgpCode, CliError> {
    HgpCode::build(&check_matrix.matrix()?).map_err(input)
}

/// Node sets of a recipe, range-checked against the classical code.
pub fn node_sets(code: &HgpCode, recipe: &Recipe) -> Result<(NodeSet, NodeSet), CliError> {
    let (n, m) = (code.n(), code.m());
    if let Some(&v) = recipe.vars.iter().find(|&&v| v >= n) {
        return Err(CliError::Input(format!("variable {v} out of range ({n} variables)")));
    }
    if let Some(&c) = recipe.checks.iter().find(|&&c| c >= m) {
        return Err(CliError::Input(format!("check {c} out of range ({m} checks)")));
    }
    Ok((NodeSet::vars(recipe.vars.iter().copied()), NodeSet::checks(recipe.checks.iter().copied())))
}

pub fn puncture_spec(code: &HgpCode, recipe: &Recipe) -> Result<PunctureSpec, CliError> {
    let kind = match recipe.kind {
        RecipeKind::Smooth => PunctureKind::Smooth,
        RecipeKind::Rough => PunctureKind::Rough,
        RecipeKind::Wormhole => return Err(CliError::Input("a wormhole is not a single puncture".into())),
    };
    let (s, t) = node_sets(code, recipe)?;
    make_puncture(code, kind, &s, &t).map_err(input)
}

pub fn realize(check_matrix: &CheckMatrix, recipe: Option<&Recipe>) -> Result<Realized, CliError> {
    let code = base_code(check_matrix)?;
    let Some(recipe) = recipe else {
        let deformed = DeformedCode::undeformed(&code);
        return Ok(Realized { code, deformed, puncture: None, wormhole: None });
    };
    let verify = |e: qdefect::error::DefectError| CliError::Verification(e.to_string());
    if recipe.kind == RecipeKind::Wormhole {
        let (s, t) = node_sets(&code, recipe)?;
        let (spec, deformed) = apply_wormhole(&code, &s, &t, recipe.force).map_err(verify)?;
        return Ok(Realized { code, deformed, puncture: None, wormhole: spec });
    }
    let spec = puncture_spec(&code, recipe)?;
    let deformed = apply_puncture(&code, &spec, recipe.force).map_err(verify)?;
    Ok(Realized { code, deformed, puncture: Some(spec), wormhole: None })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

/// Every invariant a stored bundle must satisfy.
pub fn audit(bundle: &Bundle, realized: &Realized, exec: Execution) -> Vec<Check> {
    let code = &realized.code;
    let d = &realized.deformed;
    let n = bundle.n_qubits;
    let mut checks = Vec::new();

    let expected: Vec<Generator> = d.generators().iter().map(Generator::of).collect();
    let same = n == d.n_qubits() && bundle.generators == expected && bundle.measured == d.measured_out;
    checks.push(check(
        "recipe",
        same,
        format!("{} stored generators, {} rebuilt from the recipe", bundle.generators.len(), expected.len()),
    ));

    let ops: Option<Vec<SymplecticOp>> = bundle.generators.iter().map(|g| g.op(n)).collect();
    let Some(ops) = ops else {
        checks.push(check("commutation", false, "a generator acts outside the qubit range".into()));
        return checks;
    };
    let bad = anticommuting_pairs(&ops, exec);
    checks.push(check(
        "commutation",
        bad.is_empty(),
        match bad.first() {
            None => format!("{} generators pairwise commute", ops.len()),
            Some((i, j)) => format!("{} anticommuting pairs, first ({i}, {j})", bad.len()),
        },
    ));

    let measured: Vec<usize> = bundle.measured.iter().map(|m| m.qubit).collect();
    let touching = ops.iter().filter(|op| measured.iter().any(|&q| op.x.get(q) || op.z.get(q))).count();
    checks.push(check(
        "measured_support",
        touching == 0,
        format!("{touching} generators touch the {} measured qubits", measured.len()),
    ));

    let css = code.hx().matmul(&code.hz().transpose()).map(|p| p.is_zero()).unwrap_or(false);
    checks.push(check("css_base", css, "hx · hzᵗ = 0 on the base code".into()));

    checks.push(count_check(bundle, realized));

    let base_w = code.max_stabilizer_weight();
    let max_w = ops.iter().map(SymplecticOp::weight).max().unwrap_or(0);
    checks.push(check(
        "ldpc_weight",
        max_w <= 2 * base_w,
        format!("max generator weight {max_w}, base {base_w}"),
    ));
    checks
}

fn count_check(bundle: &Bundle, realized: &Realized) -> Check {
    let code = &realized.code;
    let d = &realized.deformed;
    let forced = bundle.defect.as_ref().is_some_and(|r| r.force);
    let defect = match (d.kind, &realized.wormhole) {
        (DefectKind::Wormhole, Some(spec)) => predicted_logical_count(&wormhole_logical_operators(code, spec)),
        _ => d.defect_logical_count(),
    };
    let by_rank = d.logical_count_by_rank();
    let predicted = code.k() + defect;
    let pass = by_rank == predicted || forced;
    let mut detail = format!("n_live - rank = {by_rank}, embedded k + defect logicals = {} + {defect}", code.k());
    if forced && by_rank != predicted {
        detail.push_str(" (forced defect, not enforced)");
    }
    check("logical_count", pass, detail)
}

pub fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read(path: &Path, role: &str) -> Result<(Vec<u8>, InputHash), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let hash = InputHash { role: role.to_string(), sha256: sha256(&bytes) };
    Ok((bytes, hash))
}

/// Reads, rebuilds and audits a bundle. Any failed check is a verification error.
pub fn load(path: &Path, exec: Execution) -> Result<(Bundle, Realized, InputHash), CliError> {
    let (bundle, realized, hash, checks) = load_unchecked(path, exec)?;
    let failed: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)).collect();
    if !failed.is_empty() {
        return Err(CliError::Verification(format!("{} fails verification: {}", path.display(), failed.join("; "))));
    }
    Ok((bundle, realized, hash))
}

pub fn load_unchecked(path: &Path, exec: Execution) -> Result<(Bundle, Realized, InputHash, Vec<Check>), CliError> {
    let (bytes, hash) = read(path, "bundle")?;
    let bundle: Bundle =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if bundle.format != FORMAT {
        return Err(CliError::Input(format!("unknown bundle format {:?}", bundle.format)));
    }
    let realized = realize(&bundle.check_matrix, bundle.defect.as_ref())?;
    let checks = audit(&bundle, &realized, exec);
    Ok((bundle, realized, hash, checks))
}

pub fn save(path: &Path, bundle: &Bundle) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(bundle).expect("bundles serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
