use nalgebra::{Complex, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::model::linalg::max_abs;
use crate::model::{TruncatedTupleModel, C64, SPANNING_TOLERANCE};
use crate::multiindex::enumerate_up_to;

#[derive(Debug, Clone, PartialEq)]
pub struct StructureOptions {
    /// Point for the eigenvector and kernel checks.
    pub point: Vec<C64>,
    pub commutativity_tol: f64,
    pub shift_identity_tol: f64,
    pub adjoint_tol: f64,
    pub spanning_tol: f64,
    pub kernel_tol: f64,
}

impl StructureOptions {
    pub fn at(point: Vec<C64>) -> Self {
        Self {
            point,
            commutativity_tol: 1e-14,
            shift_identity_tol: 1e-12,
            adjoint_tol: 1e-12,
            spanning_tol: SPANNING_TOLERANCE,
            kernel_tol: 1e-10,
        }
    }

    pub fn at_real(point: &[f64]) -> Self {
        Self::at(point.iter().map(|&x| Complex::new(x, 0.0)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub model_id: String,
    /// `[re, im]` per coordinate.
    pub point: Vec<[f64; 2]>,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn below(name: &str, measured: f64, threshold: f64, detail: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed: measured <= threshold,
        measured,
        threshold,
        detail,
    }
}

fn commutativity(model: &TruncatedTupleModel, o: &StructureOptions) -> CheckResult {
    let t = model.shifts();
    let mut worst: f64 = 0.0;
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            worst = worst.max(max_abs(&(&t[i] * &t[j] - &t[j] * &t[i])));
        }
    }
    below(
        "commutativity",
        worst,
        o.commutativity_tol,
        "max |T_i T_j − T_j T_i| over pairs".into(),
    )
}

fn shift_identity(model: &TruncatedTupleModel, o: &StructureOptions) -> CheckResult {
    let m = model.dimension();
    let zero = DVector::<C64>::zeros(model.ambient_dim());
    let mut worst: f64 = 0.0;
    for alpha in model.window() {
        let a = model.coefficient(alpha).expect("window lies in the support");
        for beta in enumerate_up_to(m, alpha.degree() + 1) {
            let lhs = model.apply_shift(&beta, a);
            let rhs = match alpha.checked_sub(&beta) {
                Some(g) => model.coefficient(&g).expect("window lies in the support"),
                None => &zero,
            };
            worst = (lhs - rhs).iter().fold(worst, |acc, z| acc.max(z.norm()));
        }
    }
    below(
        "shift-identity",
        worst,
        o.shift_identity_tol,
        "max |T^β a_α − a_{α−β}| over the window (zero when β ≰ α)".into(),
    )
}

fn adjoint(model: &TruncatedTupleModel, o: &StructureOptions) -> CheckResult {
    let n_top: Vec<usize> = model
        .window()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.degree() == model.degree())
        .map(|(p, _)| p)
        .collect();
    let w = model.window().len();
    let mut worst: f64 = 0.0;
    for (t, mult) in model.shifts().iter().zip(model.multipliers()) {
        let mut diff = t - mult.adjoint();
        if let Some(b) = model.basis() {
            diff = b.adjoint() * diff * b;
        }
        for j in 0..model.rank() {
            for &p in &n_top {
                diff.row_mut(j * w + p).fill(Complex::new(0.0, 0.0));
            }
        }
        worst = worst.max(max_abs(&diff));
    }
    below(
        "adjoint",
        worst,
        o.adjoint_tol,
        "max |T_i − M_iᴴ| with M_i multiplication by z_i, top-degree rows excluded".into(),
    )
}

fn eigenvector(model: &TruncatedTupleModel, o: &StructureOptions) -> CheckResult {
    let w = &o.point;
    let gamma = match model.frame_vector(w) {
        Ok(g) => g,
        Err(e) => {
            return CheckResult {
                name: "joint-eigenvector".into(),
                passed: false,
                measured: f64::NAN,
                threshold: f64::NAN,
                detail: e.to_string(),
            }
        }
    };
    let mut worst_ratio: f64 = 0.0;
    let mut parts = Vec::new();
    for (i, t) in model.shifts().iter().enumerate() {
        let residual = (t * &gamma - &gamma * w[i]).norm();
        let tail = model.tail_bound(w, i).unwrap_or(f64::NAN);
        let ratio = if tail > 0.0 {
            residual / tail
        } else if residual == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        worst_ratio = worst_ratio.max(ratio);
        parts.push(format!("i={}: residual {residual:.3e} tail {tail:.3e}", i + 1));
    }
    CheckResult {
        name: "joint-eigenvector".into(),
        passed: worst_ratio <= 1.0 + 1e-9,
        measured: worst_ratio,
        threshold: 1.0,
        detail: format!("residual/tail bound; {}", parts.join("; ")),
    }
}

fn spanning(model: &TruncatedTupleModel, o: &StructureOptions) -> CheckResult {
    let (rank, d) = model.spanning_rank(o.spanning_tol);
    CheckResult {
        name: "spanning".into(),
        passed: rank == d,
        measured: rank as f64,
        threshold: d as f64,
        detail: format!(
            "rank {rank} of {d} for {{a_α : |α| ≤ {}}} at relative tolerance {:e}",
            model.support_degree(),
            o.spanning_tol
        ),
    }
}

/// The truncated shifts are nilpotent, so the joint kernel is `span{e_0}` per
/// component at the origin and trivial elsewhere.
pub fn expected_kernel_dim(model: &TruncatedTupleModel, w: &[C64]) -> usize {
    if w.iter().all(|z| z.norm() == 0.0) {
        model.rank()
    } else {
        0
    }
}

fn joint_kernel(model: &TruncatedTupleModel, o: &StructureOptions) -> CheckResult {
    let origin = vec![Complex::new(0.0, 0.0); model.dimension()];
    let mut ok = true;
    let mut parts = Vec::new();
    let mut measured_at_point = f64::NAN;
    for (label, w) in [("origin", &origin), ("point", &o.point)] {
        match model.joint_kernel_dim(w, o.kernel_tol) {
            Ok(dim) => {
                let expected = expected_kernel_dim(model, w);
                ok &= dim == expected;
                if label == "point" {
                    measured_at_point = dim as f64;
                }
                parts.push(format!("{label}: {dim} (expected {expected})"));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{label}: {e}"));
            }
        }
    }
    CheckResult {
        name: "joint-kernel".into(),
        passed: ok,
        measured: measured_at_point,
        threshold: expected_kernel_dim(model, &o.point) as f64,
        detail: parts.join("; "),
    }
}

type Check = fn(&TruncatedTupleModel, &StructureOptions) -> CheckResult;

/// Runs every structural check; results come back in a fixed order.
pub fn run_structure_suite(model: &TruncatedTupleModel, options: &StructureOptions) -> SuiteReport {
    let checks: [Check; 6] = [
        commutativity,
        shift_identity,
        adjoint,
        eigenvector,
        spanning,
        joint_kernel,
    ];
    let results: Vec<CheckResult> = checks.par_iter().map(|c| c(model, options)).collect();
    SuiteReport {
        model_id: model.id().to_string(),
        point: options.point.iter().map(|z| [z.re, z.im]).collect(),
        passed: results.iter().all(|r| r.passed),
        checks: results,
    }
}
