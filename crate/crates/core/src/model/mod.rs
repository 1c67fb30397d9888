//! Truncated weighted backward multi-shift models.
//!
//! A rank-one model lives on `span{e_ρ : |ρ| ≤ N}` with frame coefficients
//! `a_ρ = c_ρ e_ρ`. Its shifts act by `T_i e_ρ = (c_{ρ−ε_i}/c_ρ) e_{ρ−ε_i}`, so
//! `T^β a_α = a_{α−β}` and the window is invariant. Rank-`n` models are
//! direct sums whose frame is `⊕_j φ_j·γ_j` for polynomial sections `φ_j`.

pub mod linalg;
mod profile;
mod section;

use std::collections::HashMap;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use profile::{WeightEntry, WeightLookup, WeightProfile};
pub use section::{random_sections, spanning_sections, SectionPolynomial, SectionTerm};

use crate::error::{Error, Result};
use crate::logweight::{ln_factorial, LogScalar, Sign, RM};
use crate::multiindex::{enumerate_up_to, MultiIndex};
use linalg::{column_matrix, numerical_rank, singular_values, unitarity_defect};

pub type C64 = Complex<f64>;

const ZERO: C64 = Complex::new(0.0, 0.0);

/// Requested growth constants; a missing `m` is replaced by the tightest
/// value over the stored coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSpec {
    pub delta: Vec<f64>,
    #[serde(default)]
    pub m: Option<f64>,
}

impl GrowthSpec {
    pub fn new(delta: Vec<f64>, m: Option<f64>) -> Self {
        Self { delta, m }
    }
}

/// Validated constants with `‖a_α‖ ≤ M/δ^α` on every stored index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Growth {
    pub m: f64,
    pub delta: Vec<f64>,
}

impl Growth {
    /// `ln M + Σ 1/δ_i`.
    pub fn ln_norm_bound(&self) -> f64 {
        self.m.ln() + self.delta.iter().map(|d| 1.0 / d).sum::<f64>()
    }

    /// `M·e^{Σ1/δ_i}`.
    pub fn norm_bound(&self, precision: usize) -> LogScalar {
        LogScalar::from_ln_f64(Sign::Positive, self.ln_norm_bound(), precision)
    }

    /// `M·e^{Σ1/δ_i}/(k+1)!`.
    pub fn extraction_bound(&self, k: u32, precision: usize) -> LogScalar {
        let base = crate::logweight::bigfloat_from_f64(self.ln_norm_bound(), precision);
        let log = base.sub(&ln_factorial(k + 1, precision), precision, RM);
        LogScalar::from_log(Sign::Positive, log, precision)
    }
}

/// One summand of a direct-sum model.
#[derive(Debug, Clone)]
pub struct Component {
    pub profile: WeightProfile,
    /// Signed weights on the window, in window order.
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct TruncatedTupleModel {
    id: String,
    m: usize,
    degree: u32,
    window: Vec<MultiIndex>,
    window_pos: HashMap<MultiIndex, usize>,
    radii: Vec<f64>,
    growth: Growth,
    components: Vec<Component>,
    sections: Vec<SectionPolynomial>,
    support: Vec<MultiIndex>,
    support_pos: HashMap<MultiIndex, usize>,
    coefficients: Vec<DVector<C64>>,
    shifts: Vec<DMatrix<C64>>,
    multipliers: Vec<DMatrix<C64>>,
    basis: Option<DMatrix<C64>>,
}

fn validate_frame(m: usize, degree: u32, radii: &[f64]) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter("dimension m must be ≥ 1".into()));
    }
    if degree == 0 {
        return Err(Error::InvalidParameter("truncation degree N must be ≥ 1".into()));
    }
    if radii.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{} radii for dimension {m}",
            radii.len()
        )));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
        return Err(Error::InvalidParameter(format!(
            "radius {r} outside (0, 1)"
        )));
    }
    Ok(())
}

/// Rank-one model from a weight profile.
pub fn build_rank1(
    profile: &WeightProfile,
    m: usize,
    degree: u32,
    radii: &[f64],
    growth: &GrowthSpec,
) -> Result<TruncatedTupleModel> {
    validate_frame(m, degree, radii)?;
    let weights = profile.weights_on(&enumerate_up_to(m, degree))?;
    build_rank1_with_weights(profile.clone(), weights, m, degree, radii, growth)
}

/// Rank-one model from explicit signed weights on the window. Signs are
/// allowed so that sign-corrupted controls can be built.
pub fn build_rank1_with_weights(
    profile: WeightProfile,
    weights: Vec<f64>,
    m: usize,
    degree: u32,
    radii: &[f64],
    growth: &GrowthSpec,
) -> Result<TruncatedTupleModel> {
    validate_frame(m, degree, radii)?;
    let window = enumerate_up_to(m, degree);
    if weights.len() != window.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for a window of {}",
            weights.len(),
            window.len()
        )));
    }
    if let Some((i, w)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(w.is_finite() && **w != 0.0))
    {
        return Err(Error::InvalidModel(format!(
            "weight at {} must be finite and nonzero, got {w}",
            window[i]
        )));
    }
    let id = format!("{}-m{m}-N{degree}", profile.name());
    assemble(
        id,
        m,
        degree,
        radii,
        vec![Component { profile, weights }],
        vec![SectionPolynomial::constant(m)],
        growth,
    )
}

/// Direct sum of rank-one models with frame `⊕_j φ_j γ_j`, rejecting
/// sections whose coefficient family fails to span.
pub fn build_rank_n(
    models: &[TruncatedTupleModel],
    sections: &[SectionPolynomial],
) -> Result<TruncatedTupleModel> {
    let model = build_rank_n_unchecked(models, sections)?;
    let (rank, ambient) = model.spanning_rank(SPANNING_TOLERANCE);
    if rank < ambient {
        return Err(Error::SpanningFailure { rank, ambient });
    }
    Ok(model)
}

/// Relative singular-value tolerance of the spanning test.
pub const SPANNING_TOLERANCE: f64 = 1e-10;

/// As [`build_rank_n`] without the spanning test, for negative controls.
pub fn build_rank_n_unchecked(
    models: &[TruncatedTupleModel],
    sections: &[SectionPolynomial],
) -> Result<TruncatedTupleModel> {
    let first = models
        .first()
        .ok_or_else(|| Error::InvalidParameter("no constituent models".into()))?;
    if models.len() != sections.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} models but {} sections",
            models.len(),
            sections.len()
        )));
    }
    for (i, (mdl, sec)) in models.iter().zip(sections).enumerate() {
        if mdl.rank() != 1 || mdl.basis.is_some() {
            return Err(Error::InvalidModel(format!(
                "constituent {i} is not an unrotated rank-one model"
            )));
        }
        if mdl.m != first.m || mdl.degree != first.degree || mdl.radii != first.radii {
            return Err(Error::DimensionMismatch(format!(
                "constituent {i} differs in (m, N, r) from the first"
            )));
        }
        if mdl.growth.delta != first.growth.delta {
            return Err(Error::DimensionMismatch(format!(
                "constituent {i} uses a different δ"
            )));
        }
        if sec.dim() != first.m {
            return Err(Error::DimensionMismatch(format!(
                "section {i} has dimension {}, expected {}",
                sec.dim(),
                first.m
            )));
        }
    }
    let id = format!(
        "rank{}[{}]",
        models.len(),
        models.iter().map(|m| m.id.as_str()).collect::<Vec<_>>().join("+")
    );
    assemble(
        id,
        first.m,
        first.degree,
        &first.radii,
        models.iter().map(|m| m.components[0].clone()).collect(),
        sections.to_vec(),
        &GrowthSpec::new(first.growth.delta.clone(), None),
    )
}

fn complex_monomial(alpha: &MultiIndex, w: &[C64]) -> C64 {
    alpha
        .entries()
        .iter()
        .zip(w)
        .fold(Complex::new(1.0, 0.0), |acc, (&a, &x)| acc * x.powu(a))
}

fn assemble(
    id: String,
    m: usize,
    degree: u32,
    radii: &[f64],
    components: Vec<Component>,
    sections: Vec<SectionPolynomial>,
    growth: &GrowthSpec,
) -> Result<TruncatedTupleModel> {
    let window = enumerate_up_to(m, degree);
    let window_pos: HashMap<_, _> = window
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), i))
        .collect();
    let w = window.len();
    let n = components.len();
    let d = n * w;
    let support_degree = degree + sections.iter().map(|s| s.degree()).max().unwrap_or(0);
    let support = enumerate_up_to(m, support_degree);
    let support_pos: HashMap<_, _> = support
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), i))
        .collect();

    let lookups: Vec<WeightLookup> = components.iter().map(|c| c.profile.resolver()).collect();
    // Weight of the untruncated frame, preferring stored (possibly signed)
    // values inside the window.
    let weight = |j: usize, g: &MultiIndex| -> Option<f64> {
        match window_pos.get(g) {
            Some(&p) => Some(components[j].weights[p]),
            None => lookups[j].get(g),
        }
    };

    let mut coefficients = Vec::with_capacity(support.len());
    let mut norms = Vec::with_capacity(support.len());
    for alpha in &support {
        let mut v = DVector::from_element(d, ZERO);
        let mut sq = 0.0;
        for (j, sec) in sections.iter().enumerate() {
            for (beta, phi) in sec.terms() {
                let Some(g) = alpha.checked_sub(beta) else {
                    continue;
                };
                if let Some(&p) = window_pos.get(&g) {
                    v[j * w + p] += phi * components[j].weights[p];
                }
                if let Some(c) = weight(j, &g) {
                    sq += phi.norm_sqr() * c * c;
                }
            }
        }
        norms.push(sq.sqrt().max(v.norm()));
        coefficients.push(v);
    }

    let mut shifts = vec![DMatrix::from_element(d, d, ZERO); m];
    let mut multipliers = vec![DMatrix::from_element(d, d, ZERO); m];
    for (j, comp) in components.iter().enumerate() {
        for (p, rho) in window.iter().enumerate() {
            for i in 0..m {
                if let Some(s) = rho.sub_unit(i) {
                    let q = window_pos[&s];
                    shifts[i][(j * w + q, j * w + p)] =
                        Complex::new(comp.weights[q] / comp.weights[p], 0.0);
                }
                if rho.degree() < degree {
                    let q = window_pos[&rho.add_unit(i)];
                    multipliers[i][(j * w + q, j * w + p)] =
                        Complex::new(comp.weights[p].abs() / comp.weights[q].abs(), 0.0);
                }
            }
        }
    }

    let growth = validate_growth(m, radii, growth, &support, &norms)?;
    Ok(TruncatedTupleModel {
        id,
        m,
        degree,
        window,
        window_pos,
        radii: radii.to_vec(),
        growth,
        components,
        sections,
        support,
        support_pos,
        coefficients,
        shifts,
        multipliers,
        basis: None,
    })
}

fn validate_growth(
    m: usize,
    radii: &[f64],
    spec: &GrowthSpec,
    support: &[MultiIndex],
    norms: &[f64],
) -> Result<Growth> {
    let origin = MultiIndex::zero(m);
    if spec.delta.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{} entries in δ for dimension {m}",
            spec.delta.len()
        )));
    }
    for (i, (&d, &r)) in spec.delta.iter().zip(radii).enumerate() {
        if !(d.is_finite() && d > 0.0) || d < r {
            return Err(Error::GrowthViolation {
                index: origin,
                detail: format!("δ_{} = {d} must be finite and at least r_{} = {r}", i + 1, i + 1),
            });
        }
    }
    let (arg, tight) = support
        .iter()
        .zip(norms)
        .map(|(a, &nrm)| (a, nrm * a.monomial(&spec.delta)))
        .fold((&origin, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    let m_const = match spec.m {
        None => tight,
        Some(mc) => {
            if !(mc.is_finite() && mc > 0.0) {
                return Err(Error::GrowthViolation {
                    index: origin,
                    detail: format!("M = {mc} must be positive and finite"),
                });
            }
            if tight > mc * (1.0 + 1e-12) {
                return Err(Error::GrowthViolation {
                    index: arg.clone(),
                    detail: format!("‖a_α‖·δ^α = {tight} exceeds M = {mc}"),
                });
            }
            mc
        }
    };
    Ok(Growth {
        m: m_const,
        delta: spec.delta.clone(),
    })
}

impl TruncatedTupleModel {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dimension(&self) -> usize {
        self.m
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    /// Truncation degree `N` of the window.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Largest `|α|` with a stored (possibly zero) coefficient.
    pub fn support_degree(&self) -> u32 {
        self.support.last().map(MultiIndex::degree).unwrap_or(0)
    }

    /// `d = n·C(N+m, m)`.
    pub fn ambient_dim(&self) -> usize {
        self.rank() * self.window.len()
    }

    pub fn window(&self) -> &[MultiIndex] {
        &self.window
    }

    pub fn window_position(&self, rho: &MultiIndex) -> Option<usize> {
        self.window_pos.get(rho).copied()
    }

    pub fn support(&self) -> &[MultiIndex] {
        &self.support
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn growth(&self) -> &Growth {
        &self.growth
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn sections(&self) -> &[SectionPolynomial] {
        &self.sections
    }

    /// Projected frame coefficient `P a_α`, `None` outside the support.
    pub fn coefficient(&self, alpha: &MultiIndex) -> Option<&DVector<C64>> {
        self.support_pos.get(alpha).map(|&i| &self.coefficients[i])
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&MultiIndex, &DVector<C64>)> {
        self.support.iter().zip(&self.coefficients)
    }

    pub fn coefficient_norm(&self, alpha: &MultiIndex) -> f64 {
        self.coefficient(alpha).map_or(0.0, |v| v.norm())
    }

    pub fn shifts(&self) -> &[DMatrix<C64>] {
        &self.shifts
    }

    pub fn multipliers(&self) -> &[DMatrix<C64>] {
        &self.multipliers
    }

    /// Change of basis applied by [`Self::conjugated`], if any.
    pub fn basis(&self) -> Option<&DMatrix<C64>> {
        self.basis.as_ref()
    }

    /// `T^β v`.
    pub fn apply_shift(&self, beta: &MultiIndex, v: &DVector<C64>) -> DVector<C64> {
        let mut out = v.clone();
        for (i, &b) in beta.entries().iter().enumerate() {
            for _ in 0..b {
                out = &self.shifts[i] * out;
            }
        }
        out
    }

    /// `(rank, d)` of the coefficient family at relative tolerance `rel_tol`.
    pub fn spanning_rank(&self, rel_tol: f64) -> (usize, usize) {
        let cols: Vec<&DVector<C64>> = self.coefficients.iter().collect();
        let a = column_matrix(self.ambient_dim(), &cols);
        (numerical_rank(&singular_values(&a), rel_tol), self.ambient_dim())
    }

    fn check_point(&self, w: &[C64]) -> Result<()> {
        let outside = w.len() != self.m
            || w.iter()
                .zip(&self.radii)
                .any(|(z, r)| !(z.norm() <= r * (1.0 + 1e-15)));
        if outside {
            return Err(Error::PointOutsideDomain {
                point: w.iter().map(|z| z.norm()).collect(),
                radii: self.radii.clone(),
            });
        }
        Ok(())
    }

    /// `Σ_α P a_α w^α` over the support.
    pub fn frame_vector(&self, w: &[C64]) -> Result<DVector<C64>> {
        self.check_point(w)?;
        let mut v = DVector::from_element(self.ambient_dim(), ZERO);
        for (alpha, a) in self.coefficients() {
            v += a * complex_monomial(alpha, w);
        }
        Ok(v)
    }

    /// Bound on `‖T_i γ(w) − w_i γ(w)‖`. The truncated shifts send the top
    /// layer to zero instead of into the dropped layer, so the residual is
    /// `w_i` times the top layer of the frame:
    /// `Σ_j |φ_j(w)| Σ_{|ρ|=N} |c^{(j)}_ρ|·|w^ρ|·|w_i|`.
    pub fn tail_bound(&self, w: &[C64], i: usize) -> Result<f64> {
        self.check_point(w)?;
        let mut total = 0.0;
        for (comp, sec) in self.components.iter().zip(&self.sections) {
            let top: f64 = self
                .window
                .iter()
                .zip(&comp.weights)
                .filter(|(rho, _)| rho.degree() == self.degree)
                .map(|(rho, c)| c.abs() * complex_monomial(rho, w).norm() * w[i].norm())
                .sum();
            total += sec.eval(w).norm() * top;
        }
        Ok(total)
    }

    /// Numerical dimension of `∩_i ker(T_i − w_i)`; singular values at or
    /// below `rel_tol·max(σ_max, 1)` count as zero.
    pub fn joint_kernel_dim(&self, w: &[C64], rel_tol: f64) -> Result<usize> {
        self.check_point(w)?;
        let d = self.ambient_dim();
        let mut stacked = DMatrix::from_element(self.m * d, d, ZERO);
        for (i, t) in self.shifts.iter().enumerate() {
            let mut block = t.clone();
            for k in 0..d {
                block[(k, k)] -= w[i];
            }
            stacked.view_mut((i * d, 0), (d, d)).copy_from(&block);
        }
        let sv = singular_values(&stacked);
        let cut = rel_tol * sv.first().copied().unwrap_or(0.0).max(1.0);
        Ok(d - sv.iter().filter(|&&s| s > cut).count())
    }

    /// The same model in the basis `U`: `a ↦ U a`, `T ↦ U T Uᴴ`.
    pub fn conjugated(&self, u: &DMatrix<C64>) -> Result<Self> {
        let d = self.ambient_dim();
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}×{} change of basis for dimension {d}",
                u.nrows(),
                u.ncols()
            )));
        }
        let defect = unitarity_defect(u);
        if defect > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "change of basis is not unitary (defect {defect:e})"
            )));
        }
        let uh = u.adjoint();
        let mut out = self.clone();
        out.coefficients = self.coefficients.iter().map(|a| u * a).collect();
        out.shifts = self.shifts.iter().map(|t| u * t * &uh).collect();
        out.multipliers = self.multipliers.iter().map(|t| u * t * &uh).collect();
        out.basis = Some(match &self.basis {
            Some(b) => u * b,
            None => u.clone(),
        });
        out.id = format!("{}@rotated", self.id);
        Ok(out)
    }

    /// Row of the unrotated coordinate `e_ρ` in component `j`.
    pub fn structured_row(&self, j: usize, rho: &MultiIndex) -> Option<usize> {
        self.window_position(rho).map(|p| j * self.window.len() + p)
    }

    pub fn bundle(&self) -> ModelBundle {
        let cplx = |z: &C64| [z.re, z.im];
        let matrix = |a: &DMatrix<C64>| -> Vec<Vec<[f64; 2]>> {
            (0..a.nrows())
                .map(|r| (0..a.ncols()).map(|c| cplx(&a[(r, c)])).collect())
                .collect()
        };
        ModelBundle {
            id: self.id.clone(),
            dimension: self.m,
            rank: self.rank(),
            truncation_degree: self.degree,
            support_degree: self.support_degree(),
            ambient_dimension: self.ambient_dim(),
            radii: self.radii.clone(),
            growth: self.growth.clone(),
            profiles: self
                .components
                .iter()
                .map(|c| c.profile.name().to_string())
                .collect(),
            sections: self.sections.iter().map(SectionPolynomial::to_terms).collect(),
            window: self.window.clone(),
            coefficients: self
                .coefficients()
                .map(|(idx, v)| CoefficientRecord {
                    index: idx.clone(),
                    norm: v.norm(),
                    entries: v.iter().map(cplx).collect(),
                })
                .collect(),
            shifts: self.shifts.iter().map(matrix).collect(),
            multipliers: self.multipliers.iter().map(matrix).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientRecord {
    pub index: MultiIndex,
    pub norm: f64,
    /// `[re, im]` pairs in ambient coordinates.
    pub entries: Vec<[f64; 2]>,
}

/// Export of a model's coefficients and matrices.
#[derive(Debug, Clone, Serialize)]
pub struct ModelBundle {
    pub id: String,
    pub dimension: usize,
    pub rank: usize,
    pub truncation_degree: u32,
    pub support_degree: u32,
    pub ambient_dimension: usize,
    pub radii: Vec<f64>,
    pub growth: Growth,
    pub profiles: Vec<String>,
    pub sections: Vec<Vec<SectionTerm>>,
    pub window: Vec<MultiIndex>,
    pub coefficients: Vec<CoefficientRecord>,
    /// Row-major `[re, im]` matrices of `T_1, …, T_m`.
    pub shifts: Vec<Vec<Vec<[f64; 2]>>>,
    pub multipliers: Vec<Vec<Vec<[f64; 2]>>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    fn hardy(n: u32) -> TruncatedTupleModel {
        build_rank1(
            &WeightProfile::Hardy,
            2,
            n,
            &[0.5, 0.5],
            &GrowthSpec::new(vec![1.0, 1.0], Some(1.0)),
        )
        .unwrap()
    }

    #[test]
    fn hardy_shift_action() {
        let h = hardy(2);
        assert_eq!(h.ambient_dim(), 6);
        let t1 = &h.shifts()[0];
        let row = |a: &[u32]| h.structured_row(0, &mi(a)).unwrap();
        assert_eq!(t1[(row(&[0, 0]), row(&[1, 0]))].re, 1.0);
        assert_eq!(t1[(row(&[1, 0]), row(&[2, 0]))].re, 1.0);
        assert_eq!(t1[(row(&[0, 1]), row(&[1, 1]))].re, 1.0);
        assert!(t1.column(row(&[0, 2])).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn bergman_tight_constant() {
        let b = build_rank1(
            &WeightProfile::Bergman,
            2,
            4,
            &[0.5, 0.5],
            &GrowthSpec::new(vec![0.5, 0.5], Some(1.0)),
        )
        .unwrap();
        assert_eq!(b.coefficient_norm(&mi(&[2, 1])), 6.0);
        assert_eq!(b.growth().m, 1.0);
    }

    #[test]
    fn growth_violation_is_reported() {
        let e = build_rank1(
            &WeightProfile::Bergman,
            2,
            4,
            &[0.5, 0.5],
            &GrowthSpec::new(vec![1.0, 1.0], Some(1.0)),
        );
        assert!(matches!(e, Err(Error::GrowthViolation { .. })));
        let e = build_rank1(
            &WeightProfile::Hardy,
            2,
            4,
            &[0.5, 0.5],
            &GrowthSpec::new(vec![0.4, 1.0], None),
        );
        assert!(matches!(e, Err(Error::GrowthViolation { .. })));
    }

    #[test]
    fn frame_vector_examples() {
        let h = hardy(2);
        let v = h.frame_vector(&[Complex::new(0.0, 0.0); 2]).unwrap();
        assert_eq!(&v, h.coefficient(&mi(&[0, 0])).unwrap());
        let v = h
            .frame_vector(&[Complex::new(0.5, 0.0), Complex::new(0.0, 0.0)])
            .unwrap();
        let row = |a: &[u32]| h.structured_row(0, &mi(a)).unwrap();
        assert_eq!(v[row(&[0, 0])].re, 1.0);
        assert_eq!(v[row(&[1, 0])].re, 0.5);
        assert_eq!(v[row(&[2, 0])].re, 0.25);
        assert!(matches!(
            h.frame_vector(&[Complex::new(0.6, 0.0), Complex::new(0.0, 0.0)]),
            Err(Error::PointOutsideDomain { .. })
        ));
    }

    #[test]
    fn single_variable_kernel() {
        let h = build_rank1(
            &WeightProfile::Hardy,
            1,
            1,
            &[0.5],
            &GrowthSpec::new(vec![1.0], None),
        )
        .unwrap();
        assert_eq!(h.joint_kernel_dim(&[Complex::new(0.0, 0.0)], 1e-10).unwrap(), 1);
        assert_eq!(h.joint_kernel_dim(&[Complex::new(0.25, 0.0)], 1e-10).unwrap(), 0);
    }

    #[test]
    fn identity_section_reproduces_rank_one() {
        let h = hardy(3);
        let r = build_rank_n(&[h.clone()], &[SectionPolynomial::constant(2)]).unwrap();
        assert_eq!(r.ambient_dim(), h.ambient_dim());
        for (a, v) in h.coefficients() {
            assert_eq!(r.coefficient(a).unwrap(), v);
        }
        assert_eq!(r.shifts(), h.shifts());
    }

    #[test]
    fn diagonal_section_fails_to_span() {
        let h = hardy(2);
        let c = SectionPolynomial::constant(2);
        match build_rank_n(&[h.clone(), h], &[c.clone(), c]) {
            Err(Error::SpanningFailure { rank, ambient }) => {
                assert_eq!((rank, ambient), (6, 12));
            }
            other => panic!("expected spanning failure, got {other:?}"),
        }
    }
}
