//! Characteristic function phi(xi) = tr(rho exp(i xi . A)).
//!
//! This is the Fourier transform of the joint distribution and the core
//! computational object of the crate. The matrix exponential is evaluated by
//! spectral calculus on the hermitian combination xi . A, which is exact up
//! to eigensolver accuracy.

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operators::{eigh, OperatorTuple, QuantumState};

/// Default memory cap: 2^28 complex samples per lattice.
pub const DEFAULT_LATTICE_CAP: usize = 1 << 28;

/// One evaluated sample of the characteristic function.
#[derive(Debug, Clone)]
pub struct CharSample {
    pub xi: Vec<f64>,
    pub value: Complex64,
}

/// phi(xi) = tr(rho exp(i xi . A)).
pub fn char_value(state: &QuantumState, tuple: &OperatorTuple, xi: &[f64]) -> Result<Complex64> {
    if xi.len() != tuple.n() {
        return Err(Error::DimensionMismatch {
            expected: tuple.n(),
            found: xi.len(),
        });
    }
    if state.dim() != tuple.dim() {
        return Err(Error::DimensionMismatch {
            expected: tuple.dim(),
            found: state.dim(),
        });
    }
    char_value_unchecked(state, tuple, xi)
}

pub(crate) fn char_value_unchecked(
    state: &QuantumState,
    tuple: &OperatorTuple,
    xi: &[f64],
) -> Result<Complex64> {
    let h = tuple.combination_matrix(xi);
    let (lambda, v) = eigh(&h)?;
    let rv = state.rho() * &v;
    let mut phi = Complex64::new(0.0, 0.0);
    for j in 0..h.nrows() {
        let weight = v.column(j).dotc(&rv.column(j));
        phi += Complex64::from_polar(1.0, lambda[j]) * weight;
    }
    Ok(phi)
}

/// A regular lattice in xi-space, centered at the origin.
///
/// Axis `k` holds `counts[k]` points `(m - counts[k]/2) * deltas[k]` (integer
/// division), so odd counts give an exactly symmetric lattice including 0 and
/// even counts give the conventional DFT layout whose most negative point is
/// unpaired.
#[derive(Debug, Clone)]
pub struct XiLattice {
    deltas: Vec<f64>,
    counts: Vec<usize>,
}

impl XiLattice {
    pub fn new(deltas: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        if deltas.len() != counts.len() || deltas.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: deltas.len().max(1),
                found: counts.len(),
            });
        }
        if counts.iter().any(|&c| c == 0) || deltas.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::Config(
                "lattice needs positive counts and spacings".into(),
            ));
        }
        Ok(Self { deltas, counts })
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn total_points(&self) -> usize {
        self.counts.iter().product()
    }

    /// Coordinate of the multi-index `m`.
    pub fn point(&self, m: &[usize]) -> Vec<f64> {
        m.iter()
            .zip(&self.counts)
            .zip(&self.deltas)
            .map(|((&mi, &ci), &di)| (mi as f64 - (ci / 2) as f64) * di)
            .collect()
    }

    /// Row-major strides matching the output array layout.
    fn strides(&self) -> Vec<usize> {
        let n = self.n();
        let mut s = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.counts[k + 1];
        }
        s
    }

    fn unravel(&self, strides: &[usize], flat: usize) -> Vec<usize> {
        strides
            .iter()
            .zip(&self.counts)
            .map(|(&s, &c)| (flat / s) % c)
            .collect()
    }

    /// Flat index of the point at -xi, when it lies on the lattice.
    fn mirror_flat(&self, strides: &[usize], m: &[usize]) -> Option<usize> {
        let mut flat = 0usize;
        for ((&mi, &ci), &si) in m.iter().zip(&self.counts).zip(strides) {
            let mirrored = 2 * (ci / 2) as isize - mi as isize;
            if mirrored < 0 || mirrored >= ci as isize {
                return None;
            }
            flat += mirrored as usize * si;
        }
        Some(flat)
    }

    /// All lattice points in row-major order.
    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        let strides = self.strides();
        (0..self.total_points()).map(move |f| self.point(&self.unravel(&strides, f)))
    }
}

/// Evaluate phi on a whole lattice, in row-major layout.
///
/// Distinct points are independent pure evaluations (parallelized); the
/// output is identical regardless of schedule. Hermiticity of rho and the
/// A_k gives phi(-xi) = conj(phi(xi)), which is used to evaluate only one
/// point of each mirror pair.
pub fn char_grid(
    state: &QuantumState,
    tuple: &OperatorTuple,
    lattice: &XiLattice,
) -> Result<ArrayD<Complex64>> {
    char_grid_with_cap(state, tuple, lattice, DEFAULT_LATTICE_CAP)
}

pub fn char_grid_with_cap(
    state: &QuantumState,
    tuple: &OperatorTuple,
    lattice: &XiLattice,
    cap: usize,
) -> Result<ArrayD<Complex64>> {
    if lattice.n() != tuple.n() {
        return Err(Error::DimensionMismatch {
            expected: tuple.n(),
            found: lattice.n(),
        });
    }
    if state.dim() != tuple.dim() {
        return Err(Error::DimensionMismatch {
            expected: tuple.dim(),
            found: state.dim(),
        });
    }
    let total = lattice.total_points();
    if total > cap {
        return Err(Error::LatticeTooLarge { points: total, cap });
    }
    let strides = lattice.strides();

    let mut values: Vec<Complex64> = (0..total)
        .into_par_iter()
        .with_min_len(256)
        .map(|flat| {
            let m = lattice.unravel(&strides, flat);
            if let Some(mf) = lattice.mirror_flat(&strides, &m) {
                if mf < flat {
                    // filled from the mirror below
                    return Ok(Complex64::new(0.0, 0.0));
                }
            }
            char_value_unchecked(state, tuple, &lattice.point(&m))
        })
        .collect::<Result<_>>()?;

    for flat in 0..total {
        let m = lattice.unravel(&strides, flat);
        if let Some(mf) = lattice.mirror_flat(&strides, &m) {
            if mf < flat {
                values[flat] = values[mf].conj();
            }
        }
    }

    Ok(ArrayD::from_shape_vec(IxDyn(lattice.counts()), values).expect("shape matches length"))
}

/// Closed-form qubit characteristic function for rho = r0 I + r . sigma:
///
///   phi(xi) = 2 r0 cos|xi| + 2 i (r . xi / |xi|) sin|xi|
///
/// linear in the state parameters, so it is defined for any (r0, r); it
/// describes a density matrix only when 2 r0 = 1 and |r| <= 1/2 (see
/// [`qubit_params_valid`]). The xi = 0 limit is 2 r0.
pub fn qubit_char_closed_form(r0: f64, r: [f64; 3], xi: [f64; 3]) -> Complex64 {
    let norm = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
    if norm == 0.0 {
        return Complex64::new(2.0 * r0, 0.0);
    }
    let r_dot_xi = r[0] * xi[0] + r[1] * xi[1] + r[2] * xi[2];
    Complex64::new(
        2.0 * r0 * norm.cos(),
        2.0 * (r_dot_xi / norm) * norm.sin(),
    )
}

/// Whether (r0, r) parametrizes a valid qubit density matrix.
pub fn qubit_params_valid(r0: f64, r: [f64; 3]) -> bool {
    let r_norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    (2.0 * r0 - 1.0).abs() <= 1e-12 && r_norm <= 0.5 + 1e-12
}
