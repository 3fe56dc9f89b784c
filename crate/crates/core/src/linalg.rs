//! Dense complex matrices and the handful of decompositions the laboratory
//! rests on.
//!
//! Everything here is written against plain `Vec<Complex64>` storage in
//! row-major order. The matrices that show up downstream are small (ambient
//! dimensions in the tens, occasionally a couple hundred), so the decisive
//! property is accuracy, not asymptotics: operator norms feed directly into
//! distance computations whose tolerances sit at 1e-9 and below, which is why
//! the singular value routine is a one-sided Jacobi iteration rather than a
//! faster but less accurate bidiagonalisation.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Unitarity defect allowed at [`Unitary`] construction, measured in the
/// operator norm of `U*U - I`.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// Relative off-diagonal threshold at which Jacobi sweeps stop.
const JACOBI_TOLERANCE: f64 = 1e-15;

/// Hard cap on Jacobi sweeps; cyclic Jacobi converges quadratically, so
/// hitting this indicates a logic error rather than a hard input.
const MAX_JACOBI_SWEEPS: usize = 64;

/// Number of squarings used for the spectral radius; 2^48 powers crush both
/// transient (defective) growth and rounding noise once the root is taken.
const GELFAND_SQUARINGS: usize = 48;

/// Square complex matrix, row-major storage, entries always finite.
///
/// Finiteness is enforced at every public constructor; arithmetic on finite
/// inputs at laboratory scale cannot overflow, and norm routines re-check
/// before iterating so a violation surfaces as an error, never as a hang.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries; `entries.len()` must equal
    /// `dim * dim` and every entry must be finite.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("matrix dimension must be at least 1"));
        }
        if entries.len() != dim * dim {
            return Err(Error::invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let m = ComplexMatrix { dim, entries };
        m.ensure_finite("constructor")?;
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::invalid(format!(
                    "row length {} does not match row count {dim}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        ComplexMatrix::new(dim, entries)
    }

    /// Convenience constructor for real test data.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        ComplexMatrix::from_rows(&complex)
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix { dim, entries: vec![Complex64::ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::ONE;
        }
        m
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let mut m = ComplexMatrix::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * values.len() + i] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    fn ensure_finite(&self, context: &str) -> Result<()> {
        if self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite { context: Some(context.to_string()) })
        }
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matrix addition");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix { dim: self.dim, entries }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matrix subtraction");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix { dim: self.dim, entries }
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        let entries = self.entries.iter().map(|a| a * factor).collect();
        ComplexMatrix { dim: self.dim, entries }
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut entries = vec![Complex64::ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                let row = &other.entries[k * n..(k + 1) * n];
                let out = &mut entries[i * n..(i + 1) * n];
                for (o, &b) in out.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        ComplexMatrix { dim: n, entries }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut entries = vec![Complex64::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        ComplexMatrix { dim: n, entries }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.at(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute entry-wise difference; the workhorse of test
    /// assertions and unitarity checks.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in comparison");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Applies the matrix to a vector.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch in matrix apply");
        let n = self.dim;
        (0..n)
            .map(|i| {
                self.entries[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum()
            })
            .collect()
    }

    fn columns(&self) -> Vec<Vec<Complex64>> {
        let n = self.dim;
        (0..n)
            .map(|j| (0..n).map(|i| self.entries[i * n + j]).collect())
            .collect()
    }
}

/// Block-diagonal sum `a (+) b`.
pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim + b.dim;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..a.dim {
        for j in 0..a.dim {
            out.set(i, j, a.at(i, j));
        }
    }
    for i in 0..b.dim {
        for j in 0..b.dim {
            out.set(a.dim + i, a.dim + j, b.at(i, j));
        }
    }
    out
}

/// `count` copies of `a` along the diagonal; `count = 0` is rejected because
/// a 0x0 matrix has no norm to speak of.
pub fn multiplicity_sum(a: &ComplexMatrix, count: usize) -> Result<ComplexMatrix> {
    if count == 0 {
        return Err(Error::invalid("multiplicity_sum needs count >= 1"));
    }
    let n = a.dim * count;
    let mut out = ComplexMatrix::zeros(n);
    for c in 0..count {
        let off = c * a.dim;
        for i in 0..a.dim {
            for j in 0..a.dim {
                out.set(off + i, off + j, a.at(i, j));
            }
        }
    }
    Ok(out)
}

/// Singular values of an arbitrary column family, descending.
///
/// One-sided Jacobi: unitary plane rotations (with a phase correction for the
/// complex Gram entries) are applied on the right until all column pairs are
/// numerically orthogonal; singular values are then the column norms. Each
/// rotation is exactly unitary up to rounding, which keeps relative errors at
/// a few ulps even for clustered spectra.
pub(crate) fn singular_values_of_columns(cols: &mut [Vec<Complex64>]) -> Vec<f64> {
    let m = cols.len();
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..m {
            for q in (p + 1)..m {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = Complex64::ZERO;
                for (x, y) in cols[p].iter().zip(cols[q].iter()) {
                    app += x.norm_sqr();
                    aqq += y.norm_sqr();
                    apq += x.conj() * y;
                }
                let bound = JACOBI_TOLERANCE * (app * aqq).sqrt();
                if apq.norm() <= bound {
                    continue;
                }
                rotated = true;
                // Phase-align column q so the Gram entry becomes real, then
                // apply the classical symmetric rotation.
                let r = apq.norm();
                let phase = apq.conj() / r;
                let tau = (aqq - app) / (2.0 * r);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let cp = &mut left[p];
                let cq = &mut right[0];
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let yq = phase * *y;
                    let new_x = c * *x - s * yq;
                    let new_y = s * *x + c * yq;
                    *x = new_x;
                    *y = new_y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Singular values of a square matrix, descending.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    a.ensure_finite("singular_values")?;
    let mut cols = a.columns();
    Ok(singular_values_of_columns(&mut cols))
}

/// Operator norm (largest singular value).
pub fn op_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(a)?[0])
}

/// Spectral radius via Gelfand's formula with normalised repeated squaring.
///
/// The iterate is kept as `exp(alpha) * B` with `||B||_F = 1`, so only the
/// logarithm accumulates and nothing can overflow. After `M` squarings the
/// estimate `exp(alpha / 2^M)` is exact for the spectral radius up to a
/// factor `C^(1/2^M)` with `C` polynomial in dimension and Jordan structure;
/// at 48 squarings that factor is below 1e-12 even for badly defective
/// matrices. A product that vanishes exactly (nilpotent input) short-circuits
/// to zero.
pub fn spectral_radius(a: &ComplexMatrix) -> Result<f64> {
    a.ensure_finite("spectral_radius")?;
    let norm0 = a.frobenius_norm();
    if norm0 == 0.0 {
        return Ok(0.0);
    }
    let mut b = a.scale(Complex64::new(1.0 / norm0, 0.0));
    let mut alpha = norm0.ln();
    for step in 0..GELFAND_SQUARINGS {
        let sq = b.matmul(&b);
        let norm = sq.frobenius_norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        if !norm.is_finite() {
            return Err(Error::NonFinite { context: Some("spectral_radius iterate".to_string()) });
        }
        b = sq.scale(Complex64::new(1.0 / norm, 0.0));
        alpha = 2.0 * alpha + norm.ln();
        let _ = step;
    }
    Ok((alpha / 2f64.powi(GELFAND_SQUARINGS as i32)).exp())
}

/// A square matrix certified unitary at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    matrix: ComplexMatrix,
}

impl Unitary {
    /// Certifies `||U*U - I||_op <= 1e-10` and wraps the matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let gram = matrix.adjoint().matmul(&matrix);
        let defect = gram.sub(&ComplexMatrix::identity(matrix.dim()));
        let residual = op_norm(&defect)?;
        if residual > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary { residual, tolerance: UNITARY_TOLERANCE });
        }
        Ok(Unitary { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Unitary { matrix: ComplexMatrix::identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary { matrix: self.matrix.adjoint() }
    }

    /// `U a U*`.
    pub fn conjugate(&self, a: &ComplexMatrix) -> ComplexMatrix {
        self.matrix.matmul(a).matmul(&self.matrix.adjoint())
    }

    /// Product `self * other`.
    pub fn compose(&self, other: &Unitary) -> Unitary {
        Unitary { matrix: self.matrix.matmul(&other.matrix) }
    }
}

/// Permutation unitary exchanging basis vectors `i` and `j` (1-based).
pub fn swap_unitary(dim: usize, i: usize, j: usize) -> Result<Unitary> {
    for &idx in &[i, j] {
        if idx == 0 || idx > dim {
            return Err(Error::IndexOutOfRange { index: idx, dim });
        }
    }
    let mut m = ComplexMatrix::identity(dim);
    if i != j {
        let (a, b) = (i - 1, j - 1);
        m.set(a, a, Complex64::ZERO);
        m.set(b, b, Complex64::ZERO);
        m.set(a, b, Complex64::ONE);
        m.set(b, a, Complex64::ONE);
    }
    Ok(Unitary { matrix: m })
}

fn standard_complex_gaussian(rng: &mut ChaCha12Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with independent standard complex Gaussian entries, row-major
/// sampling order so the stream is reproducible.
pub(crate) fn gaussian_matrix(dim: usize, rng: &mut ChaCha12Rng) -> ComplexMatrix {
    let entries = (0..dim * dim).map(|_| standard_complex_gaussian(rng)).collect();
    ComplexMatrix { dim, entries }
}

/// Random Hermitian matrix `(G + G*)/2` with Gaussian `G`.
pub(crate) fn gaussian_hermitian(dim: usize, rng: &mut ChaCha12Rng) -> ComplexMatrix {
    let g = gaussian_matrix(dim, rng);
    g.add(&g.adjoint()).scale(Complex64::new(0.5, 0.0))
}

/// Householder QR. Returns `Q` and the diagonal of `R`.
fn householder_qr(a: &ComplexMatrix) -> (ComplexMatrix, Vec<Complex64>) {
    let n = a.dim;
    let mut r = a.clone();
    let mut q = ComplexMatrix::identity(n);
    let mut rdiag = vec![Complex64::ZERO; n];
    for k in 0..n {
        let mut norm_sq = 0.0;
        for i in k..n {
            norm_sq += r.at(i, k).norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm == 0.0 {
            rdiag[k] = Complex64::ZERO;
            continue;
        }
        let x0 = r.at(k, k);
        // Reflect onto -e^{i arg(x0)} * ||x|| e_1 to avoid cancellation.
        let phase = if x0.norm() == 0.0 { Complex64::ONE } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k..n).map(|i| r.at(i, k)).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm > 0.0 {
            for z in &mut v {
                *z /= vnorm;
            }
            // R <- (I - 2 v v*) R on the trailing block.
            for j in k..n {
                let w: Complex64 = (0..v.len()).map(|i| v[i].conj() * r.at(k + i, j)).sum();
                let w2 = w * 2.0;
                for i in 0..v.len() {
                    let cur = r.at(k + i, j);
                    r.set(k + i, j, cur - w2 * v[i]);
                }
            }
            // Q <- Q (I - 2 v v*).
            for row in 0..n {
                let w: Complex64 = (0..v.len()).map(|i| q.at(row, k + i) * v[i]).sum();
                let w2 = w * 2.0;
                for i in 0..v.len() {
                    let cur = q.at(row, k + i);
                    q.set(row, k + i, cur - w2 * v[i].conj());
                }
            }
        }
        rdiag[k] = r.at(k, k);
    }
    (q, rdiag)
}

/// Haar-distributed unitary, bit-reproducible from the seed.
///
/// Gaussian matrix, Householder QR, then each column of `Q` is rotated by the
/// phase of the matching diagonal entry of `R`. Fixing those phases makes the
/// factorisation the unique one with positive diagonal, which turns the QR
/// map into an exact Haar sampler rather than a merely approximately uniform
/// one.
pub fn haar_unitary(dim: usize, seed: u64) -> Result<Unitary> {
    if dim == 0 {
        return Err(Error::invalid("haar_unitary needs dim >= 1"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok(haar_from_rng(dim, &mut rng))
}

pub(crate) fn haar_from_rng(dim: usize, rng: &mut ChaCha12Rng) -> Unitary {
    let g = gaussian_matrix(dim, rng);
    let (mut q, rdiag) = householder_qr(&g);
    for (k, d) in rdiag.iter().enumerate() {
        let lambda = if d.norm() == 0.0 { Complex64::ONE } else { d / d.norm() };
        for i in 0..dim {
            let cur = q.at(i, k);
            q.set(i, k, cur * lambda);
        }
    }
    // Gaussian input is almost surely well-conditioned; the QR of a singular
    // sample would fail certification, which is the correct outcome.
    Unitary::new(q).expect("Householder QR of a Gaussian sample is unitary")
}

/// Eigendecomposition of a Hermitian matrix by cyclic two-sided Jacobi.
///
/// Returns `(eigenvalues, V)` with `H = V diag(eigenvalues) V*`; eigenvalues
/// are not sorted. Input Hermiticity is the caller's contract and is not
/// re-validated beyond using only the upper triangle's values.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<(Vec<f64>, Unitary)> {
    h.ensure_finite("hermitian_eig")?;
    let n = h.dim;
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.at(p, q).norm_sqr();
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let h_pq = a.at(p, q);
                let r = h_pq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = h_pq / r;
                let tau = (a.at(q, q).re - a.at(p, p).re) / (2.0 * r);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // Column pass of J, then row pass of J*.
                for i in 0..n {
                    let aip = a.at(i, p);
                    let aiq = a.at(i, q);
                    a.set(i, p, c * aip - s * phase.conj() * aiq);
                    a.set(i, q, s * phase * aip + c * aiq);
                }
                for j in 0..n {
                    let apj = a.at(p, j);
                    let aqj = a.at(q, j);
                    a.set(p, j, c * apj - s * phase * aqj);
                    a.set(q, j, s * phase.conj() * apj + c * aqj);
                }
                for i in 0..n {
                    let vip = v.at(i, p);
                    let viq = v.at(i, q);
                    v.set(i, p, c * vip - s * phase.conj() * viq);
                    v.set(i, q, s * phase * vip + c * viq);
                }
            }
        }
    }
    let eigenvalues = (0..n).map(|i| a.at(i, i).re).collect();
    let v = Unitary::new(v)?;
    Ok((eigenvalues, v))
}

/// `exp(i t H)` for Hermitian `H`, via the Jacobi eigendecomposition.
pub fn unitary_exp_i_hermitian(h: &ComplexMatrix, t: f64) -> Result<Unitary> {
    let (eigs, v) = hermitian_eig(h)?;
    let phases: Vec<Complex64> = eigs
        .iter()
        .map(|&l| Complex64::new(0.0, t * l).exp())
        .collect();
    let d = ComplexMatrix::diagonal(&phases);
    Unitary::new(v.matrix().matmul(&d).matmul(&v.matrix().adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Closed form for the largest singular value of a 2x2 matrix, derived
    /// from the eigenvalues of A*A. Independent oracle: no Jacobi code.
    fn two_by_two_top_singular(a: &ComplexMatrix) -> f64 {
        assert_eq!(a.dim(), 2);
        let g = a.adjoint().matmul(a);
        let tr = g.trace().re;
        let det = (g.at(0, 0) * g.at(1, 1) - g.at(0, 1) * g.at(1, 0)).re;
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        (tr / 2.0 + disc).max(0.0).sqrt()
    }

    /// Power iteration on A*A, again independent of the Jacobi path.
    fn power_iteration_top_singular(a: &ComplexMatrix, iters: usize) -> f64 {
        let g = a.adjoint().matmul(a);
        let n = a.dim();
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| c(1.0 + (i as f64 * 0.7).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let mut lambda = 0.0;
        for _ in 0..iters {
            let w = g.apply(&v);
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            lambda = norm;
            v = w.into_iter().map(|z| z / norm).collect();
        }
        lambda.sqrt()
    }

    #[test]
    fn constructor_rejects_bad_shapes_and_nan() {
        assert!(ComplexMatrix::new(2, vec![Complex64::ZERO; 3]).is_err());
        assert!(ComplexMatrix::new(0, vec![]).is_err());
        let bad = vec![c(f64::NAN, 0.0), Complex64::ZERO, Complex64::ZERO, Complex64::ZERO];
        assert!(matches!(
            ComplexMatrix::new(2, bad),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn op_norm_identity_is_one() {
        let id = ComplexMatrix::identity(3);
        assert!((op_norm(&id).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn op_norm_nilpotent_shift() {
        let a = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!((op_norm(&a).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(spectral_radius(&a).unwrap(), 0.0);
    }

    #[test]
    fn op_norm_matches_two_by_two_oracle() {
        let samples = [
            ComplexMatrix::from_rows(&[
                vec![c(1.0, 2.0), c(-0.5, 0.3)],
                vec![c(0.0, -1.0), c(2.0, 0.7)],
            ])
            .unwrap(),
            ComplexMatrix::from_real_rows(&[vec![3.0, 1.0], vec![1.0, 3.0]]).unwrap(),
            ComplexMatrix::from_real_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap(),
        ];
        for a in &samples {
            let oracle = two_by_two_top_singular(a);
            let got = op_norm(a).unwrap();
            assert!(
                (got - oracle).abs() <= 1e-12 * oracle.max(1.0),
                "jacobi {got} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn op_norm_matches_power_iteration_on_larger_matrices() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for dim in [3, 5, 9, 17] {
            let a = gaussian_matrix(dim, &mut rng);
            let got = op_norm(&a).unwrap();
            let oracle = power_iteration_top_singular(&a, 4000);
            assert!(
                (got - oracle).abs() <= 1e-8 * got.max(1.0),
                "dim {dim}: jacobi {got} vs power {oracle}"
            );
        }
    }

    #[test]
    fn op_norm_exact_on_constructed_spectrum() {
        // U diag(sigma) V* has known singular values; accuracy target is the
        // contract's 1e-12 relative bound at a mid-size dimension.
        let dim = 96;
        let u = haar_unitary(dim, 11).unwrap();
        let v = haar_unitary(dim, 12).unwrap();
        let sigmas: Vec<f64> = (0..dim).map(|i| 0.25 + (i as f64) * 0.125).collect();
        let top = sigmas.iter().cloned().fold(0.0, f64::max);
        let d = ComplexMatrix::diagonal(
            &sigmas.iter().map(|&s| c(s, 0.0)).collect::<Vec<_>>(),
        );
        let a = u.matrix().matmul(&d).matmul(&v.matrix().adjoint());
        let got = op_norm(&a).unwrap();
        assert!(
            (got - top).abs() <= 1e-12 * top,
            "got {got}, expected {top}, rel err {}",
            ((got - top) / top).abs()
        );
    }

    #[test]
    fn singular_values_recover_diagonal() {
        let a = ComplexMatrix::diagonal(&[c(-2.0, 0.0), c(2.0, 0.0), c(0.5, 0.0)]);
        let sv = singular_values(&a).unwrap();
        assert!((sv[0] - 2.0).abs() < 1e-14);
        assert!((sv[1] - 2.0).abs() < 1e-14);
        assert!((sv[2] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn spectral_radius_diagonal_and_rotation() {
        let a = ComplexMatrix::diagonal(&[c(3.0, 0.0), c(-1.0, 0.0)]);
        assert!((spectral_radius(&a).unwrap() - 3.0).abs() < 1e-9);
        // Rotation by 90 degrees: spectral radius 1, operator norm 1.
        let r = ComplexMatrix::from_real_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        assert!((spectral_radius(&r).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn spectral_radius_defective_block() {
        // Jordan block with eigenvalue 0.5: transient growth must not fool
        // the estimator.
        let a = ComplexMatrix::from_real_rows(&[
            vec![0.5, 4.0, 0.0],
            vec![0.0, 0.5, 4.0],
            vec![0.0, 0.0, 0.5],
        ])
        .unwrap();
        let r = spectral_radius(&a).unwrap();
        assert!((r - 0.5).abs() < 1e-9, "got {r}");
    }

    #[test]
    fn swap_unitary_matches_definition() {
        let u = swap_unitary(2, 1, 2).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(u.matrix().max_abs_diff(&expected), 0.0);
        let id = swap_unitary(4, 2, 2).unwrap();
        assert_eq!(id.matrix().max_abs_diff(&ComplexMatrix::identity(4)), 0.0);
        assert!(matches!(
            swap_unitary(3, 0, 1),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            swap_unitary(3, 1, 4),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn haar_unitary_is_deterministic_and_unitary() {
        let u1 = haar_unitary(8, 42).unwrap();
        let u2 = haar_unitary(8, 42).unwrap();
        assert_eq!(u1.matrix().entries(), u2.matrix().entries(), "same seed, same bits");
        let u3 = haar_unitary(8, 43).unwrap();
        assert!(u1.matrix().max_abs_diff(u3.matrix()) > 1e-3, "different seeds differ");
        let gram = u1.matrix().adjoint().matmul(u1.matrix());
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(8)) < 1e-13);
    }

    #[test]
    fn unitary_certification_rejects_non_unitary() {
        let m = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 1.0 + 1e-6]]).unwrap();
        assert!(matches!(Unitary::new(m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn hermitian_eig_reconstructs() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for dim in [2, 3, 6, 10] {
            let h = gaussian_hermitian(dim, &mut rng);
            let (eigs, v) = hermitian_eig(&h).unwrap();
            let d = ComplexMatrix::diagonal(
                &eigs.iter().map(|&l| c(l, 0.0)).collect::<Vec<_>>(),
            );
            let rebuilt = v.matrix().matmul(&d).matmul(&v.matrix().adjoint());
            assert!(rebuilt.max_abs_diff(&h) < 1e-12 * h.frobenius_norm().max(1.0));
        }
    }

    #[test]
    fn unitary_exp_reduces_to_identity_at_zero() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let h = gaussian_hermitian(4, &mut rng);
        let u = unitary_exp_i_hermitian(&h, 0.0).unwrap();
        assert!(u.matrix().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-13);
    }

    #[test]
    fn direct_sum_and_multiplicity_sum_shapes() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::diagonal(&[c(5.0, 0.0)]);
        let s = direct_sum(&a, &b);
        assert_eq!(s.dim(), 3);
        assert_eq!(s.at(2, 2), c(5.0, 0.0));
        let m = multiplicity_sum(&b, 3).unwrap();
        assert_eq!(m.dim(), 3);
        assert!((op_norm(&m).unwrap() - 5.0).abs() < 1e-13);
        assert!(multiplicity_sum(&b, 0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn norm_is_submultiplicative_and_subadditive(
            dim in 1usize..6,
            seed in 0u64..1_000,
        ) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let a = gaussian_matrix(dim, &mut rng);
            let b = gaussian_matrix(dim, &mut rng);
            let na = op_norm(&a).unwrap();
            let nb = op_norm(&b).unwrap();
            let slack = 1e-11 * (1.0 + na + nb + na * nb);
            prop_assert!(op_norm(&a.matmul(&b)).unwrap() <= na * nb + slack);
            prop_assert!(op_norm(&a.add(&b)).unwrap() <= na + nb + slack);
            // C*-identity at the matrix level.
            let cstar = op_norm(&a.adjoint().matmul(&a)).unwrap();
            prop_assert!((cstar - na * na).abs() <= 1e-10 * (1.0 + na * na));
        }

        #[test]
        fn spectral_radius_bounded_by_norm(dim in 1usize..6, seed in 0u64..500) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let a = gaussian_matrix(dim, &mut rng);
            let r = spectral_radius(&a).unwrap();
            let n = op_norm(&a).unwrap();
            prop_assert!(r <= n + 1e-9 * (1.0 + n));
        }

        #[test]
        fn haar_conjugation_preserves_norm(dim in 1usize..6, seed in 0u64..500) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let a = gaussian_matrix(dim, &mut rng);
            let u = haar_unitary(dim, seed ^ 0x9e3779b97f4a7c15).unwrap();
            let before = op_norm(&a).unwrap();
            let after = op_norm(&u.conjugate(&a)).unwrap();
            prop_assert!((before - after).abs() <= 1e-11 * (1.0 + before));
        }
    }
}
