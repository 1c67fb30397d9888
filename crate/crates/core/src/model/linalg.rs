use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::C64;

/// Singular values, largest first; all NaN when the input is not finite
/// or the iteration fails to converge.
pub fn singular_values(a: &DMatrix<C64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let k = a.nrows().min(a.ncols());
    // The iterative SVD does not terminate on non-finite input.
    if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return vec![f64::NAN; k];
    }
    let Some(svd) = a.clone().try_svd(false, false, f64::EPSILON, 100_000) else {
        return vec![f64::NAN; k];
    };
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Count of singular values above `rel_tol · σ_max`.
pub fn numerical_rank(sv: &[f64], rel_tol: f64) -> usize {
    let Some(&max) = sv.first() else { return 0 };
    if max <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Matrix whose columns are the given vectors.
pub fn column_matrix(rows: usize, cols: &[&DVector<C64>]) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

pub fn max_abs(a: &DMatrix<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Haar-distributed unitary from the QR factorization of a complex Gaussian
/// matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        Complex::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        if n > 0.0 {
            let phase = rjj / n;
            let mut col = q.column_mut(j);
            col *= phase;
        }
    }
    q
}

/// `‖UᴴU − I‖_max`.
pub fn unitarity_defect(u: &DMatrix<C64>) -> f64 {
    let g = u.adjoint() * u;
    let id = DMatrix::<C64>::identity(u.ncols(), u.ncols());
    max_abs(&(g - id))
}
