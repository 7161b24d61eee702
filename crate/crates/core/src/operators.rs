//! Operator tuples, quantum states, and the standard families (Pauli, spin-s,
//! seeded random) everything else is built from.
//!
//! All types are immutable after construction and safe to share across
//! threads; operations are pure functions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVector = DVector<Complex64>;

/// Relative tolerance (against the matrix max-norm) under which inputs are
/// silently symmetrized; beyond it they are rejected as non-hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A validated d x d hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    entries: CMatrix,
}

/// Max |entry| of a complex matrix.
pub(crate) fn max_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max |m[i][j] - conj(m[j][i])|.
fn asymmetry(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

impl HermitianOperator {
    /// Validate and symmetrize a square matrix into a hermitian operator.
    ///
    /// Asymmetry up to `HERMITICITY_TOL` relative to the max-norm is folded
    /// away as `(M + M^dagger)/2`; anything larger is rejected.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        let scale = max_norm(&matrix);
        let asym = asymmetry(&matrix);
        if asym > HERMITICITY_TOL * scale {
            return Err(Error::NotHermitian {
                asymmetry: if scale > 0.0 { asym / scale } else { asym },
                tol: HERMITICITY_TOL,
            });
        }
        let sym = (&matrix + matrix.adjoint()).scale(0.5);
        Ok(Self {
            dim: sym.nrows(),
            entries: sym,
        })
    }

    /// Build from real entries (no imaginary part).
    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = CMatrix::zeros(n, rows.first().map_or(0, |r| r.len()));
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = Complex64::new(x, 0.0);
            }
        }
        Self::new(m)
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    /// Frobenius norm.
    pub fn fro_norm(&self) -> f64 {
        self.entries.norm()
    }

    /// <psi|A|psi>, real by hermiticity.
    pub fn expectation(&self, psi: &CVector) -> f64 {
        let ap = &self.entries * psi;
        psi.dotc(&ap).re
    }
}

/// An ordered tuple (A_1, ..., A_n) of hermitian operators on one dimension.
#[derive(Debug, Clone)]
pub struct OperatorTuple {
    ops: Vec<HermitianOperator>,
}

impl OperatorTuple {
    pub fn new(ops: Vec<HermitianOperator>) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        };
        let dim = first.dim();
        for op in &ops {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: op.dim(),
                });
            }
        }
        Ok(Self { ops })
    }

    /// Number of operators n.
    pub fn n(&self) -> usize {
        self.ops.len()
    }

    /// Shared Hilbert-space dimension d.
    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    pub fn op(&self, k: usize) -> &HermitianOperator {
        &self.ops[k]
    }

    pub fn ops(&self) -> &[HermitianOperator] {
        &self.ops
    }

    /// xi . A = sum_k xi_k A_k.
    pub fn linear_combination(&self, xi: &[f64]) -> Result<HermitianOperator> {
        if xi.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: xi.len(),
            });
        }
        Ok(HermitianOperator {
            dim: self.dim(),
            entries: self.combination_matrix(xi),
        })
    }

    /// Raw combination matrix without the operator wrapper (hot path).
    pub(crate) fn combination_matrix(&self, xi: &[f64]) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for (c, op) in xi.iter().zip(&self.ops) {
            if *c != 0.0 {
                m.zip_apply(op.entries(), |acc, e| *acc += e.scale(*c));
            }
        }
        m
    }

    /// Restrict every operator to the column span of an isometry (d x r).
    pub(crate) fn restrict(&self, isometry: &CMatrix) -> Result<Self> {
        let ops = self
            .ops
            .iter()
            .map(|op| {
                let b = isometry.adjoint() * op.entries() * isometry;
                HermitianOperator::new(b)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops)
    }
}

/// A density matrix: hermitian, trace one, positive semidefinite.
#[derive(Debug, Clone)]
pub struct QuantumState {
    dim: usize,
    rho: CMatrix,
}

impl QuantumState {
    /// Validate a density matrix: hermitian within `HERMITICITY_TOL`, trace 1
    /// within 1e-12, smallest eigenvalue >= -1e-10.
    pub fn new(rho: CMatrix) -> Result<Self> {
        if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: rho.nrows(),
                cols: rho.ncols(),
            });
        }
        let scale = max_norm(&rho);
        let asym = asymmetry(&rho);
        if asym > HERMITICITY_TOL * scale {
            return Err(Error::NotHermitian {
                asymmetry: if scale > 0.0 { asym / scale } else { asym },
                tol: HERMITICITY_TOL,
            });
        }
        let rho = (&rho + rho.adjoint()).scale(0.5);
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > 1e-12 || trace.im.abs() > 1e-12 {
            return Err(Error::TraceNotOne { trace: trace.re });
        }
        let (lambda, _) = eigh(&rho)?;
        let min_eig = lambda[0];
        if min_eig < -1e-10 {
            return Err(Error::NotPositive {
                min_eigenvalue: min_eig,
            });
        }
        Ok(Self {
            dim: rho.nrows(),
            rho,
        })
    }

    /// Pure state |psi><psi| / <psi|psi>.
    pub fn from_pure(psi: &CVector) -> Result<Self> {
        let norm_sq = psi.norm_squared();
        if norm_sq <= 0.0 {
            return Err(Error::ZeroVector);
        }
        let dim = psi.len();
        let mut rho = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                rho[(i, j)] = psi[i] * psi[j].conj() / norm_sq;
            }
        }
        Ok(Self { dim, rho })
    }

    /// Pure state on the k-th basis vector.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        let mut psi = CVector::zeros(dim);
        if k >= dim {
            return Err(Error::BadAxis { axis: k, n: dim });
        }
        psi[k] = ONE;
        Self::from_pure(&psi)
    }

    /// rho = I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            dim,
            rho: CMatrix::identity(dim, dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    /// tr(rho A), real for hermitian A.
    pub fn expect(&self, op: &HermitianOperator) -> f64 {
        let mut acc = ZERO;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += self.rho[(i, j)] * op.entries()[(j, i)];
            }
        }
        acc.re
    }

    /// Conjugate by a unitary: U rho U^dagger.
    pub fn conjugated(&self, u: &CMatrix) -> Result<Self> {
        let rho = u * &self.rho * u.adjoint();
        Self::new(rho)
    }
}

/// Eigendecomposition of a hermitian operator: ascending eigenvalues and a
/// unitary whose columns are the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralData {
    /// V diag(lambda) V^dagger.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..d {
            let l = Complex64::new(self.eigenvalues[j], 0.0);
            for i in 0..d {
                scaled[(i, j)] *= l;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// Smallest gap between consecutive eigenvalues.
    pub fn min_gap(&self) -> f64 {
        let l = &self.eigenvalues;
        (1..l.len())
            .map(|j| l[j] - l[j - 1])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues (hot-path form).
pub(crate) fn eigh(m: &CMatrix) -> Result<(DVector<f64>, CMatrix)> {
    let dim = m.nrows();
    let se = m
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or(Error::ConvergenceFailure { dim })?;
    // Sort ascending, permuting eigenvector columns to match.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let mut lambda = DVector::zeros(dim);
    let mut v = CMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        lambda[dst] = se.eigenvalues[src];
        v.column_mut(dst).copy_from(&se.eigenvectors.column(src));
    }
    Ok((lambda, v))
}

/// Eigendecompose a hermitian operator into ascending spectral data.
pub fn eigendecompose(op: &HermitianOperator) -> Result<SpectralData> {
    let (eigenvalues, eigenvectors) = eigh(op.entries())?;
    Ok(SpectralData {
        eigenvalues,
        eigenvectors,
    })
}

/// The Pauli triple (sigma_1, sigma_2, sigma_3).
pub fn pauli_triple() -> OperatorTuple {
    let s1 = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let s2 = CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
    let s3 = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    OperatorTuple::new(vec![
        HermitianOperator::new(s1).unwrap(),
        HermitianOperator::new(s2).unwrap(),
        HermitianOperator::new(s3).unwrap(),
    ])
    .unwrap()
}

/// The Pauli pair (sigma_1, sigma_2).
pub fn pauli_pair() -> OperatorTuple {
    let t = pauli_triple();
    OperatorTuple::new(vec![t.op(0).clone(), t.op(1).clone()]).unwrap()
}

/// Angular momentum triple (J_x, J_y, J_z) in the spin-s representation
/// (dimension 2s+1), with J_z = diag(s, s-1, ..., -s): basis index i holds the
/// magnetic quantum number m = s - i.
pub fn spin_triple(s: f64) -> Result<OperatorTuple> {
    let two_s = 2.0 * s;
    if s <= 0.0 || (two_s - two_s.round()).abs() > 1e-9 || two_s.round() < 1.0 {
        return Err(Error::InvalidSpin(s));
    }
    let dim = two_s.round() as usize + 1;
    let m_of = |i: usize| s - i as f64;

    let mut jz = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        jz[(i, i)] = Complex64::new(m_of(i), 0.0);
    }
    // J_+ |s,m> = sqrt(s(s+1) - m(m+1)) |s,m+1>; m+1 sits at row i-1.
    let mut jplus = CMatrix::zeros(dim, dim);
    for i in 1..dim {
        let m = m_of(i);
        jplus[(i - 1, i)] = Complex64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let jminus = jplus.adjoint();
    let jx = (&jplus + &jminus).scale(0.5);
    let jy = (&jplus - &jminus) * Complex64::new(0.0, -0.5);

    OperatorTuple::new(vec![
        HermitianOperator::new(jx)?,
        HermitianOperator::new(jy)?,
        HermitianOperator::new(jz)?,
    ])
}

/// Seeded GUE-style hermitian matrix: H = (M + M^dagger)/2 where the entries
/// of M are i.i.d. standard complex normal, M[j][k] = (x + i y)/sqrt(2) with
/// x, y ~ N(0,1) drawn row-major from `ChaCha8Rng::seed_from_u64(seed)`.
pub fn random_hermitian(dim: usize, seed: u64) -> HermitianOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = ginibre(dim, &mut rng);
    let h = (&m + m.adjoint()).scale(0.5);
    HermitianOperator {
        dim,
        entries: h,
    }
}

/// Square matrix of i.i.d. standard complex normal entries, row-major draw order.
fn ginibre(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            m[(i, j)] = Complex64::new(re * inv_sqrt2, im * inv_sqrt2);
        }
    }
    m
}

/// Seeded random full-rank density matrix rho = G G^dagger / tr(G G^dagger)
/// with G a complex Ginibre matrix.
pub fn random_density(dim: usize, seed: u64) -> QuantumState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ginibre(dim, &mut rng);
    let gg = &g * g.adjoint();
    let trace = gg.trace().re;
    QuantumState {
        dim,
        rho: gg.scale(1.0 / trace),
    }
}

/// Seeded Haar-like random unitary: Q factor of the QR decomposition of a
/// complex Ginibre matrix.
pub fn random_unitary(dim: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ginibre(dim, &mut rng);
    g.qr().q()
}

/// Seeded random unit direction in R^n (standard normal, normalized).
pub fn random_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                return v.into_iter().map(|x| x / norm).collect();
            }
        })
        .collect()
}

/// Qubit state rho = r0 I + r . sigma (valid when 2 r0 = 1 and |r| <= 1/2).
pub fn qubit_state(r0: f64, r: [f64; 3]) -> Result<QuantumState> {
    let t = pauli_triple();
    let mut rho = CMatrix::identity(2, 2).scale(r0);
    for (k, rk) in r.iter().enumerate() {
        rho += t.op(k).entries().scale(*rk);
    }
    QuantumState::new(rho)
}
