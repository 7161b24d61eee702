//! Gaussian-regularized Wigner distributions on grids.
//!
//! The distribution itself is singular, so what is computed is the
//! convolution W * G_eps with an isotropic Gaussian of covariance
//! eps * identity: the characteristic function is sampled on the conjugate
//! frequency lattice, damped by `exp(-eps |xi|^2 / 2)`, and inverted by a
//! centered FFT. The a-grid and the xi-lattice are exact DFT duals; an
//! off-center box enters as a phase factor, never as resampling.

use ndarray::{ArrayD, Axis, Zip};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::charfn::{char_grid, char_value_unchecked, XiLattice};
use crate::error::{Error, Result};
use crate::fft::{centered_inverse_transform, zero_unpaired_planes};
use crate::operators::{eigendecompose, eigh, OperatorTuple, QuantumState};

/// Default dilation of the spectral box, in units of sqrt(eps).
pub const DEFAULT_PAD: f64 = 6.0;
/// Smallest pad accepted by the planner.
pub const MIN_PAD: f64 = 5.0;
/// Gaussian tail target at the frequency boundary.
pub const TAIL_ETA: f64 = 1e-9;

/// One grid axis: half-open box [min, max) sampled at `count` points
/// `min + j (max - min) / count`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn length(&self) -> f64 {
        self.max - self.min
    }

    pub fn delta(&self) -> f64 {
        self.length() / self.count as f64
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.min + self.max)
    }

    pub fn coords(&self) -> Vec<f64> {
        let d = self.delta();
        (0..self.count).map(|j| self.min + j as f64 * d).collect()
    }
}

/// Shape of a regularized grid: per-axis boxes plus the Gaussian scale.
#[derive(Debug, Clone)]
pub struct GridSpec {
    axes: Vec<AxisSpec>,
    epsilon: f64,
}

impl GridSpec {
    /// Validate axes (min < max, power-of-two counts >= 8) and epsilon > 0.
    /// Support containment against a tuple is only checked by [`plan_grid`].
    pub fn new(axes: Vec<AxisSpec>, epsilon: f64) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Config("grid needs at least one axis".into()));
        }
        if !(epsilon > 0.0) {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        for ax in &axes {
            if !(ax.min < ax.max) {
                return Err(Error::Config(format!(
                    "axis box [{}, {}] is empty",
                    ax.min, ax.max
                )));
            }
            if ax.count < 8 || !ax.count.is_power_of_two() {
                return Err(Error::Config(format!(
                    "axis count {} must be a power of two >= 8",
                    ax.count
                )));
            }
        }
        Ok(Self { axes, epsilon })
    }

    pub fn n(&self) -> usize {
        self.axes.len()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn axes(&self) -> &[AxisSpec] {
        &self.axes
    }

    pub fn counts(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.delta()).product()
    }

    pub fn total_points(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    /// The conjugate frequency lattice: spacing 2 pi / L per axis.
    pub fn xi_lattice(&self) -> XiLattice {
        let deltas = self
            .axes
            .iter()
            .map(|a| 2.0 * std::f64::consts::PI / a.length())
            .collect();
        XiLattice::new(deltas, self.counts()).expect("axes validated")
    }

    /// Frequency extent pi * count / L on one axis.
    pub fn xi_max(&self, axis: usize) -> f64 {
        std::f64::consts::PI * self.axes[axis].count as f64 / self.axes[axis].length()
    }

    /// Gaussian damping left at the frequency boundary of one axis.
    pub fn boundary_tail(&self, axis: usize) -> f64 {
        let xm = self.xi_max(axis);
        (-self.epsilon * xm * xm / 2.0).exp()
    }

    fn check_resolution(&self) -> Result<()> {
        for (k, ax) in self.axes.iter().enumerate() {
            let tail = self.boundary_tail(k);
            if tail > TAIL_ETA {
                return Err(Error::ResolutionTooLow {
                    axis: k,
                    count: ax.count,
                    tail,
                    target: TAIL_ETA,
                    required: required_count(ax.length(), self.epsilon),
                });
            }
        }
        Ok(())
    }
}

/// Smallest power-of-two count >= 8 whose frequency extent meets the
/// tail target for a box of length `len`.
pub fn required_count(len: f64, epsilon: f64) -> usize {
    let xi_needed = (2.0 * (1.0 / TAIL_ETA).ln() / epsilon).sqrt();
    let raw = (len * xi_needed / std::f64::consts::PI).ceil().max(8.0);
    (raw as usize).next_power_of_two()
}

/// Plan a grid for a tuple: per axis k the box is the spectral range of A_k
/// dilated by pad * sqrt(eps), counts are rounded up to powers of two, and
/// the implied frequency lattice must damp the Gaussian below `TAIL_ETA`.
pub fn plan_grid(
    tuple: &OperatorTuple,
    epsilon: f64,
    counts: &[usize],
    pad: f64,
) -> Result<GridSpec> {
    if !(epsilon > 0.0) {
        return Err(Error::Config("epsilon must be positive".into()));
    }
    if pad < MIN_PAD {
        return Err(Error::Config(format!("pad {pad} must be >= {MIN_PAD}")));
    }
    if counts.len() != tuple.n() {
        return Err(Error::DimensionMismatch {
            expected: tuple.n(),
            found: counts.len(),
        });
    }
    let margin = pad * epsilon.sqrt();
    let mut axes = Vec::with_capacity(tuple.n());
    for (k, op) in tuple.ops().iter().enumerate() {
        let sd = eigendecompose(op)?;
        let lo = sd.eigenvalues[0] - margin;
        let hi = sd.eigenvalues[op.dim() - 1] + margin;
        let count = counts[k].max(8).next_power_of_two();
        axes.push(AxisSpec {
            min: lo,
            max: hi,
            count,
        });
    }
    let spec = GridSpec::new(axes, epsilon)?;
    spec.check_resolution()?;
    Ok(spec)
}

/// A computed regularized distribution with its Riemann statistics.
#[derive(Debug, Clone)]
pub struct WignerGrid {
    spec: GridSpec,
    values: ArrayD<f64>,
    mass: f64,
    min_value: f64,
    max_value: f64,
    imag_residue: f64,
}

impl WignerGrid {
    /// Wrap raw values (e.g. read back from disk), recomputing statistics.
    pub fn from_parts(spec: GridSpec, values: ArrayD<f64>) -> Result<Self> {
        if values.shape() != spec.counts().as_slice() {
            return Err(Error::Config(format!(
                "value shape {:?} does not match spec counts {:?}",
                values.shape(),
                spec.counts()
            )));
        }
        let cell = spec.cell_volume();
        let mass = values.sum() * cell;
        let min_value = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_value = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            spec,
            values,
            mass,
            min_value,
            max_value,
            imag_residue: 0.0,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &ArrayD<f64> {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn min_value(&self) -> f64 {
        self.min_value
    }

    pub fn max_value(&self) -> f64 {
        self.max_value
    }

    /// Largest |imaginary part| discarded when the inverse transform was
    /// reduced to real values.
    pub fn imag_residue(&self) -> f64 {
        self.imag_residue
    }
}

/// Riemann-sum statistics of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridStats {
    pub mass: f64,
    pub min: f64,
    pub max: f64,
    /// integral of max(0, -W)
    pub negative_volume: f64,
}

pub fn grid_stats(grid: &WignerGrid) -> GridStats {
    let cell = grid.spec().cell_volume();
    let negative_volume = grid
        .values()
        .iter()
        .filter(|v| **v < 0.0)
        .map(|v| -v)
        .sum::<f64>()
        * cell;
    GridStats {
        mass: grid.mass(),
        min: grid.min_value(),
        max: grid.max_value(),
        negative_volume,
    }
}

/// Compute the regularized distribution after revalidating that the spec
/// covers the tuple's spectral box with at least `MIN_PAD * sqrt(eps)` of
/// margin and resolves the damping tail.
pub fn compute_wigner(
    state: &QuantumState,
    tuple: &OperatorTuple,
    spec: &GridSpec,
) -> Result<WignerGrid> {
    let margin = MIN_PAD * spec.epsilon().sqrt();
    for (k, op) in tuple.ops().iter().enumerate() {
        let sd = eigendecompose(op)?;
        let lo = sd.eigenvalues[0];
        let hi = sd.eigenvalues[op.dim() - 1];
        let ax = &spec.axes()[k];
        let slack = 1e-9 * (1.0 + ax.length());
        if ax.min > lo - margin + slack || ax.max < hi + margin - slack {
            return Err(Error::Config(format!(
                "grid axis {k} box [{}, {}] does not cover the spectral range \
                 [{lo}, {hi}] with {MIN_PAD} sqrt(eps) margin; replan or use \
                 compute_wigner_unchecked",
                ax.min, ax.max
            )));
        }
    }
    spec.check_resolution()?;
    compute_wigner_unchecked(state, tuple, spec)
}

/// Same computation without the support/resolution preconditions.
pub fn compute_wigner_unchecked(
    state: &QuantumState,
    tuple: &OperatorTuple,
    spec: &GridSpec,
) -> Result<WignerGrid> {
    if spec.n() != tuple.n() {
        return Err(Error::DimensionMismatch {
            expected: tuple.n(),
            found: spec.n(),
        });
    }
    let lattice = spec.xi_lattice();
    let mut grid = char_grid(state, tuple, &lattice)?;

    // frequency-domain Gaussian damping
    let epsilon = spec.epsilon();
    let xi_tables: Vec<Vec<f64>> = spec
        .axes()
        .iter()
        .zip(lattice.deltas())
        .map(|(ax, &d)| {
            (0..ax.count)
                .map(|m| (m as f64 - (ax.count / 2) as f64) * d)
                .collect()
        })
        .collect();
    let counts = spec.counts();
    let n = counts.len();
    let mut strides = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * counts[k + 1];
    }
    grid.as_slice_mut()
        .expect("char_grid output is contiguous row-major")
        .par_iter_mut()
        .enumerate()
        .for_each(|(flat, z)| {
            let mut sq = 0.0;
            for (k, table) in xi_tables.iter().enumerate() {
                let xi = table[(flat / strides[k]) % counts[k]];
                sq += xi * xi;
            }
            *z *= (-epsilon * sq / 2.0).exp();
        });

    zero_unpaired_planes(&mut grid);
    let centers: Vec<f64> = spec.axes().iter().map(AxisSpec::center).collect();
    let complex = centered_inverse_transform(grid, lattice.deltas(), &centers)?;

    let values = complex.mapv(|z| z.re);
    let imag_residue = complex.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
    let scale = values.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    if imag_residue > 1e-9 * scale {
        return Err(Error::RealnessViolation {
            residue: imag_residue,
            scale,
        });
    }

    let cell = spec.cell_volume();
    let mass = values.sum() * cell;
    let min_value = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_value = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(WignerGrid {
        spec: spec.clone(),
        values,
        mass,
        min_value,
        max_value,
        imag_residue,
    })
}

/// A one-dimensional density along a direction in R^n.
#[derive(Debug, Clone)]
pub struct Density1D {
    pub axis: AxisSpec,
    pub direction: Vec<f64>,
    pub values: Vec<f64>,
}

impl Density1D {
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.axis.delta()
    }

    pub fn coords(&self) -> Vec<f64> {
        self.axis.coords()
    }
}

/// L1 distance between two densities on the same axis.
pub fn l1_distance(a: &Density1D, b: &Density1D) -> Result<f64> {
    if a.axis != b.axis {
        return Err(Error::Config("densities live on different axes".into()));
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
        * a.axis.delta())
}

fn gauss(t: f64, mean: f64, variance: f64) -> f64 {
    let d = t - mean;
    (-d * d / (2.0 * variance)).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
}

fn norm(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Exact marginal of W * G_eps along `xi`: the spectral measure of xi . A
/// smoothed by the induced 1D Gaussian of variance eps |xi|^2.
pub fn marginal_exact(
    state: &QuantumState,
    tuple: &OperatorTuple,
    xi: &[f64],
    epsilon: f64,
    axis: &AxisSpec,
) -> Result<Density1D> {
    let xi_norm = norm(xi);
    if xi_norm == 0.0 {
        return Err(Error::ZeroDirection);
    }
    if xi.len() != tuple.n() {
        return Err(Error::DimensionMismatch {
            expected: tuple.n(),
            found: xi.len(),
        });
    }
    let h = tuple.combination_matrix(xi);
    let (lambda, v) = eigh(&h)?;
    let rv = state.rho() * &v;
    let weights: Vec<f64> = (0..h.nrows())
        .map(|j| v.column(j).dotc(&rv.column(j)).re)
        .collect();
    let variance = epsilon * xi_norm * xi_norm;
    let values = axis
        .coords()
        .iter()
        .map(|&t| {
            weights
                .iter()
                .zip(lambda.iter())
                .map(|(&w, &l)| w * gauss(t, l, variance))
                .sum()
        })
        .collect();
    Ok(Density1D {
        axis: axis.clone(),
        direction: xi.to_vec(),
        values,
    })
}

/// Same marginal through the transform route: sample t -> phi(t xi), damp by
/// the induced 1D Gaussian, invert with the centered 1D FFT.
pub fn marginal_from_charfn(
    state: &QuantumState,
    tuple: &OperatorTuple,
    xi: &[f64],
    epsilon: f64,
    axis: &AxisSpec,
) -> Result<Density1D> {
    let xi_norm = norm(xi);
    if xi_norm == 0.0 {
        return Err(Error::ZeroDirection);
    }
    if xi.len() != tuple.n() {
        return Err(Error::DimensionMismatch {
            expected: tuple.n(),
            found: xi.len(),
        });
    }
    let count = axis.count;
    if count % 2 != 0 {
        return Err(Error::OddCount(count));
    }
    let len = axis.length();
    let dfreq = 2.0 * std::f64::consts::PI / len;
    let freq_max = dfreq * (count / 2) as f64;
    let damp_scale = epsilon * xi_norm * xi_norm;
    let tail = (-damp_scale * freq_max * freq_max / 2.0).exp();
    if tail > TAIL_ETA {
        return Err(Error::ResolutionTooLow {
            axis: 0,
            count,
            tail,
            target: TAIL_ETA,
            required: required_count(len, damp_scale),
        });
    }

    let half = count / 2;
    // evaluate the non-negative frequencies, mirror the rest by conjugation
    let upper: Vec<Complex64> = (half..count)
        .into_par_iter()
        .with_min_len(64)
        .map(|m| {
            let t = (m as f64 - half as f64) * dfreq;
            let scaled: Vec<f64> = xi.iter().map(|x| x * t).collect();
            let phi = char_value_unchecked(state, tuple, &scaled)?;
            Ok(phi * (-damp_scale * t * t / 2.0).exp())
        })
        .collect::<Result<_>>()?;
    let mut samples = vec![Complex64::new(0.0, 0.0); count];
    samples[half..].copy_from_slice(&upper);
    for m in 1..half {
        samples[m] = samples[count - m].conj();
    }
    // m = 0 stays zero: its mirror is off the lattice

    let data = ArrayD::from_shape_vec(ndarray::IxDyn(&[count]), samples).expect("shape");
    let complex = centered_inverse_transform(data, &[dfreq], &[axis.center()])?;
    let values: Vec<f64> = complex.iter().map(|z| z.re).collect();
    let residue = complex.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
    let scale = values.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    if residue > 1e-9 * scale {
        return Err(Error::RealnessViolation { residue, scale });
    }
    Ok(Density1D {
        axis: axis.clone(),
        direction: xi.to_vec(),
        values,
    })
}

/// Project a grid onto one coordinate axis by summing out the others.
pub fn grid_projection(grid: &WignerGrid, axis_index: usize) -> Result<Density1D> {
    let n = grid.n();
    if axis_index >= n {
        return Err(Error::BadAxis {
            axis: axis_index,
            n,
        });
    }
    let mut reduced = grid.values().clone();
    let mut removed_volume = 1.0;
    // sum out axes above and below the kept one, highest first
    for k in (0..n).rev() {
        if k == axis_index {
            continue;
        }
        removed_volume *= grid.spec().axes()[k].delta();
        reduced = reduced.sum_axis(Axis(k));
    }
    let values: Vec<f64> = reduced.iter().map(|v| v * removed_volume).collect();
    let mut direction = vec![0.0; n];
    direction[axis_index] = 1.0;
    Ok(Density1D {
        axis: grid.spec().axes()[axis_index].clone(),
        direction,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{
        pauli_pair, pauli_triple, random_density, random_directions, random_hermitian,
        spin_triple, HermitianOperator, QuantumState,
    };
    use approx::assert_relative_eq;

    fn diag_pair() -> OperatorTuple {
        let a1 = HermitianOperator::from_real(&[&[1.0, 0.0], &[0.0, 2.0]]).unwrap();
        let a2 = HermitianOperator::from_real(&[&[3.0, 0.0], &[0.0, 4.0]]).unwrap();
        OperatorTuple::new(vec![a1, a2]).unwrap()
    }

    #[test]
    fn plan_grid_boxes() {
        // Pauli pair, eps = 0.01, pad 6: eigenvalue range +-1 plus 0.6
        let spec = plan_grid(&pauli_pair(), 0.01, &[128, 128], DEFAULT_PAD).unwrap();
        for ax in spec.axes() {
            assert_relative_eq!(ax.min, -1.6, epsilon = 1e-12);
            assert_relative_eq!(ax.max, 1.6, epsilon = 1e-12);
        }

        // spin-3/2 (J_z, J_x), eps = 0.001: extremes +-3/2, margin 6 sqrt(0.001)
        let t = spin_triple(1.5).unwrap();
        let zx = OperatorTuple::new(vec![t.op(2).clone(), t.op(0).clone()]).unwrap();
        let spec = plan_grid(&zx, 0.001, &[512, 512], DEFAULT_PAD).unwrap();
        let expect = 1.5 + 6.0 * 0.001f64.sqrt();
        for ax in spec.axes() {
            assert_relative_eq!(ax.min, -expect, epsilon = 1e-9);
            assert_relative_eq!(ax.max, expect, epsilon = 1e-9);
            assert!(ax.max >= 1.6897);
        }

        // counts rounded up to powers of two
        let spec = plan_grid(&pauli_pair(), 0.01, &[100, 129], DEFAULT_PAD).unwrap();
        assert_eq!(spec.counts(), vec![128, 256]);
    }

    #[test]
    fn plan_grid_resolution_too_low() {
        // eps = 0.001, count 8 on a box of length 3.4: xi_max ~ 7.4 leaves
        // essentially undamped tails
        let a = HermitianOperator::from_real(&[&[1.511, 0.0], &[0.0, -1.511]]).unwrap();
        let tuple = OperatorTuple::new(vec![a]).unwrap();
        // box = +-(1.511 + 6 sqrt(0.001)) ~ +-1.7007 -> length ~ 3.4
        match plan_grid(&tuple, 0.001, &[8], DEFAULT_PAD) {
            Err(Error::ResolutionTooLow {
                count, required, ..
            }) => {
                assert_eq!(count, 8);
                assert_eq!(required, 256);
            }
            other => panic!("expected ResolutionTooLow, got {other:?}"),
        }
    }

    #[test]
    fn plan_grid_rejects_small_pad() {
        assert!(plan_grid(&pauli_pair(), 0.01, &[64, 64], 3.0).is_err());
    }

    /// Spectral-measure oracle: sigma_3 with rho = I/2 gives half-weight
    /// Gaussian bumps at +-1 with variance eps.
    #[test]
    fn single_operator_two_bumps() {
        let tuple = OperatorTuple::new(vec![pauli_triple().op(2).clone()]).unwrap();
        let state = QuantumState::maximally_mixed(2);
        let eps = 0.01;
        let spec = plan_grid(&tuple, eps, &[256], DEFAULT_PAD).unwrap();
        let grid = compute_wigner(&state, &tuple, &spec).unwrap();

        assert_relative_eq!(grid.mass(), 1.0, epsilon = 1e-9);
        // the reconstruction is the box-periodization of W * G_eps, so the
        // oracle includes the +-L translates (visible at ~6 sigma box edges)
        let len = spec.axes()[0].length();
        let coords = spec.axes()[0].coords();
        for (j, &t) in coords.iter().enumerate() {
            let mut expect = 0.0;
            for image in [-1.0, 0.0, 1.0] {
                let u = t + image * len;
                expect += 0.5 * gauss(u, -1.0, eps) + 0.5 * gauss(u, 1.0, eps);
            }
            let got = grid.values().as_slice().unwrap()[j];
            assert!(
                (got - expect).abs() < 1e-10,
                "t={t}: got {got}, expect {expect}"
            );
        }
    }

    /// Commuting pair: two positive 2D bumps of mass 1/2 at (1,3) and (2,4).
    #[test]
    fn commuting_pair_atoms() {
        let tuple = diag_pair();
        let state = QuantumState::maximally_mixed(2);
        let eps = 0.01;
        let spec = plan_grid(&tuple, eps, &[128, 128], DEFAULT_PAD).unwrap();
        let grid = compute_wigner(&state, &tuple, &spec).unwrap();
        let stats = grid_stats(&grid);
        assert_relative_eq!(stats.mass, 1.0, epsilon = 1e-9);
        assert!(
            stats.negative_volume < 1e-6,
            "negative volume {}",
            stats.negative_volume
        );

        // Gaussian-window mass around each atom
        let cell = spec.cell_volume();
        let window_mass = |cx: f64, cy: f64| -> f64 {
            let xs = spec.axes()[0].coords();
            let ys = spec.axes()[1].coords();
            let mut acc = 0.0;
            for (i, &x) in xs.iter().enumerate() {
                for (j, &y) in ys.iter().enumerate() {
                    let d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                    if d2 <= (6.0 * eps.sqrt()).powi(2) {
                        acc += grid.values()[[i, j]] * cell;
                    }
                }
            }
            acc
        };
        assert!((window_mass(1.0, 3.0) - 0.5).abs() < 1e-6);
        assert!((window_mass(2.0, 4.0) - 0.5).abs() < 1e-6);
    }

    /// Pauli pair at rho = I/2: ring structure with genuine negativity.
    #[test]
    fn pauli_pair_ring() {
        let tuple = pauli_pair();
        let state = QuantumState::maximally_mixed(2);
        let spec = plan_grid(&tuple, 0.01, &[128, 128], DEFAULT_PAD).unwrap();
        let grid = compute_wigner(&state, &tuple, &spec).unwrap();
        let stats = grid_stats(&grid);
        assert_relative_eq!(stats.mass, 1.0, epsilon = 1e-9);
        assert!(stats.negative_volume > 0.01);
        assert!(stats.min < 0.0 && stats.max > 0.0);

        // fourfold rotation symmetry on the interior indices
        let n = spec.counts()[0];
        let v = grid.values();
        let mut worst: f64 = 0.0;
        for i in 1..n {
            for j in 1..n {
                let rotated = v[[j, n - i]];
                worst = worst.max((v[[i, j]] - rotated).abs());
            }
        }
        assert!(
            worst < 1e-9 * stats.max.abs(),
            "rotation asymmetry {worst}"
        );
    }

    #[test]
    fn marginal_exact_pauli_triple() {
        let tuple = pauli_triple();
        let state = QuantumState::maximally_mixed(2);
        let eps = 0.01;
        let axis = AxisSpec {
            min: -2.0,
            max: 2.0,
            count: 400,
        };
        let d = marginal_exact(&state, &tuple, &[1.0, 0.0, 0.0], eps, &axis).unwrap();
        for (j, &t) in axis.coords().iter().enumerate() {
            let expect = 0.5 * gauss(t, -1.0, eps) + 0.5 * gauss(t, 1.0, eps);
            assert!((d.values[j] - expect).abs() < 1e-12);
        }
        assert_relative_eq!(d.mass(), 1.0, epsilon = 1e-9);
    }

    /// Spin-3/2 |m = -1/2>: single z-Gaussian at -1/2, and x-weights
    /// (3/8, 1/8, 1/8, 3/8) frozen from the moment identities
    /// sum w = 1, sum w m = 0, sum w m^2 = <J_x^2> = 7/4.
    #[test]
    fn marginal_exact_spin_three_half() {
        let t = spin_triple(1.5).unwrap();
        let zx = OperatorTuple::new(vec![t.op(2).clone(), t.op(0).clone()]).unwrap();
        let state = QuantumState::basis_state(4, 2).unwrap(); // m = -1/2
        let eps = 0.001;
        let axis = AxisSpec {
            min: -2.5,
            max: 2.5,
            count: 512,
        };

        let dz = marginal_exact(&state, &zx, &[1.0, 0.0], eps, &axis).unwrap();
        for (j, &u) in axis.coords().iter().enumerate() {
            let expect = gauss(u, -0.5, eps);
            assert!((dz.values[j] - expect).abs() < 1e-10);
        }

        let dx = marginal_exact(&state, &zx, &[0.0, 1.0], eps, &axis).unwrap();
        let weights = [(1.5, 0.375), (0.5, 0.125), (-0.5, 0.125), (-1.5, 0.375)];
        for (j, &u) in axis.coords().iter().enumerate() {
            let expect: f64 = weights.iter().map(|&(m, w)| w * gauss(u, m, eps)).sum();
            assert!((dx.values[j] - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn marginal_routes_agree() {
        let eps = 0.01;
        // the two definitional scenarios
        let tuple = pauli_triple();
        let state = QuantumState::maximally_mixed(2);
        let axis = AxisSpec {
            min: -2.0,
            max: 2.0,
            count: 512,
        };
        for xi in [[1.0, 0.0, 0.0], [0.3, -0.7, 0.2]] {
            let a = marginal_exact(&state, &tuple, &xi, eps, &axis).unwrap();
            let b = marginal_from_charfn(&state, &tuple, &xi, eps, &axis).unwrap();
            assert!(l1_distance(&a, &b).unwrap() < 1e-6);
        }

        // random 4x4 pair, seed 1, random unit direction
        let tuple = OperatorTuple::new(vec![random_hermitian(4, 1), random_hermitian(4, 101)])
            .unwrap();
        let state = random_density(4, 7);
        let xi = &random_directions(2, 1, 5)[0];
        let h = tuple.linear_combination(xi).unwrap();
        let sd = eigendecompose(&h).unwrap();
        let pad = 8.0 * eps.sqrt();
        let axis = AxisSpec {
            min: sd.eigenvalues[0] - pad,
            max: sd.eigenvalues[3] + pad,
            count: 512,
        };
        let a = marginal_exact(&state, &tuple, xi, eps, &axis).unwrap();
        let b = marginal_from_charfn(&state, &tuple, xi, eps, &axis).unwrap();
        assert!(l1_distance(&a, &b).unwrap() < 1e-6);
        assert_relative_eq!(a.mass(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(b.mass(), 1.0, epsilon = 1e-9);
    }

    /// xi and 2 xi give the same distribution after the affine axis map
    /// t -> 2t: density halves, coordinates double.
    #[test]
    fn marginal_scaling_consistency() {
        let tuple = pauli_pair();
        let state = random_density(2, 3);
        let eps = 0.01;
        let axis = AxisSpec {
            min: -2.0,
            max: 2.0,
            count: 256,
        };
        let axis2 = AxisSpec {
            min: -4.0,
            max: 4.0,
            count: 256,
        };
        let xi = [0.8, -0.6];
        let xi2 = [1.6, -1.2];
        for route in [marginal_exact, marginal_from_charfn] {
            let d1 = route(&state, &tuple, &xi, eps, &axis).unwrap();
            let d2 = route(&state, &tuple, &xi2, eps, &axis2).unwrap();
            for j in 0..256 {
                assert!(
                    (d2.values[j] - 0.5 * d1.values[j]).abs() < 1e-9,
                    "j={j}"
                );
            }
        }
    }

    #[test]
    fn marginal_zero_direction_rejected() {
        let tuple = pauli_pair();
        let state = QuantumState::maximally_mixed(2);
        let axis = AxisSpec {
            min: -1.0,
            max: 1.0,
            count: 64,
        };
        assert!(matches!(
            marginal_exact(&state, &tuple, &[0.0, 0.0], 0.01, &axis),
            Err(Error::ZeroDirection)
        ));
        assert!(matches!(
            marginal_from_charfn(&state, &tuple, &[0.0, 0.0], 0.01, &axis),
            Err(Error::ZeroDirection)
        ));
    }

    #[test]
    fn projection_identity_and_atoms() {
        // n = 1: projection is the grid itself
        let tuple = OperatorTuple::new(vec![pauli_triple().op(2).clone()]).unwrap();
        let state = QuantumState::maximally_mixed(2);
        let spec = plan_grid(&tuple, 0.01, &[128], DEFAULT_PAD).unwrap();
        let grid = compute_wigner(&state, &tuple, &spec).unwrap();
        let proj = grid_projection(&grid, 0).unwrap();
        for (j, v) in grid.values().iter().enumerate() {
            assert_relative_eq!(proj.values[j], *v, epsilon = 1e-14);
        }
        assert_relative_eq!(proj.mass(), grid.mass(), epsilon = 1e-12);

        // commuting pair, axis 0: half-weight bumps at 1 and 2
        let tuple = diag_pair();
        let state = QuantumState::maximally_mixed(2);
        let eps = 0.01;
        let spec = plan_grid(&tuple, eps, &[128, 128], DEFAULT_PAD).unwrap();
        let grid = compute_wigner(&state, &tuple, &spec).unwrap();
        let proj = grid_projection(&grid, 0).unwrap();
        let exact = marginal_exact(&state, &tuple, &[1.0, 0.0], eps, &proj.axis).unwrap();
        assert!(l1_distance(&proj, &exact).unwrap() < 1e-8);

        assert!(matches!(
            grid_projection(&grid, 2),
            Err(Error::BadAxis { .. })
        ));
    }

    /// Projection of a finer spin-3/2 grid matches the exact marginal.
    #[test]
    fn projection_spin_grid_vs_exact() {
        let t = spin_triple(1.5).unwrap();
        let zx = OperatorTuple::new(vec![t.op(2).clone(), t.op(0).clone()]).unwrap();
        let state = QuantumState::basis_state(4, 2).unwrap();
        let eps = 0.001;
        let spec = plan_grid(&zx, eps, &[256, 256], DEFAULT_PAD).unwrap();
        let grid = compute_wigner(&state, &zx, &spec).unwrap();
        for axis_index in [0usize, 1] {
            let proj = grid_projection(&grid, axis_index).unwrap();
            let mut xi = vec![0.0; 2];
            xi[axis_index] = 1.0;
            let exact = marginal_exact(&state, &zx, &xi, eps, &proj.axis).unwrap();
            let l1 = l1_distance(&proj, &exact).unwrap();
            assert!(l1 < 2e-3, "axis {axis_index}: L1 {l1}");
        }
    }

    /// Realness and unit mass across random instances.
    #[test]
    fn realness_and_mass_sweep() {
        let mut checked = 0;
        for seed in 0..50u64 {
            let dim = 2 + (seed as usize % 4);
            let eps = 0.05 + 0.02 * (seed % 5) as f64;
            let n = 1 + (seed as usize % 2);
            let ops = (0..n)
                .map(|k| random_hermitian(dim, seed * 10 + k as u64))
                .collect();
            let tuple = OperatorTuple::new(ops).unwrap();
            let state = random_density(dim, seed + 1000);
            let counts = vec![if n == 1 { 256 } else { 128 }; n];
            let spec = plan_grid(&tuple, eps, &counts, DEFAULT_PAD).unwrap();
            // compute_wigner itself enforces the 1e-9 relative residue bound
            let grid = compute_wigner(&state, &tuple, &spec).unwrap();
            assert_relative_eq!(grid.mass(), 1.0, epsilon = 1e-9);
            let scale = grid.max_value().abs().max(grid.min_value().abs());
            assert!(grid.imag_residue() <= 1e-9 * scale);
            checked += 1;
        }
        assert_eq!(checked, 50);
    }

    /// W is linear in the state.
    #[test]
    fn linear_in_state() {
        let tuple = pauli_pair();
        let rho1 = random_density(2, 1);
        let rho2 = random_density(2, 2);
        let alpha = 0.35;
        let mixed = QuantumState::new(rho1.rho().scale(alpha) + rho2.rho().scale(1.0 - alpha))
            .unwrap();
        let spec = plan_grid(&tuple, 0.02, &[64, 64], DEFAULT_PAD).unwrap();
        let g1 = compute_wigner(&rho1, &tuple, &spec).unwrap();
        let g2 = compute_wigner(&rho2, &tuple, &spec).unwrap();
        let gm = compute_wigner(&mixed, &tuple, &spec).unwrap();
        for ((a, b), m) in g1
            .values()
            .iter()
            .zip(g2.values().iter())
            .zip(gm.values().iter())
        {
            assert!((alpha * a + (1.0 - alpha) * b - m).abs() < 1e-9);
        }
    }

    /// Doubling counts preserves mass and the values on shared points.
    #[test]
    fn grid_resolution_consistency() {
        let tuple = pauli_pair();
        let state = random_density(2, 9);
        let eps = 0.02;
        let coarse = plan_grid(&tuple, eps, &[128, 128], DEFAULT_PAD).unwrap();
        let fine = plan_grid(&tuple, eps, &[256, 256], DEFAULT_PAD).unwrap();
        let gc = compute_wigner(&state, &tuple, &coarse).unwrap();
        let gf = compute_wigner(&state, &tuple, &fine).unwrap();
        assert!((gc.mass() - gf.mass()).abs() < 1e-8);
        let scale = gf.max_value().abs().max(gf.min_value().abs());
        for i in 0..128 {
            for j in 0..128 {
                let c = gc.values()[[i, j]];
                let f = gf.values()[[2 * i, 2 * j]];
                assert!(
                    (c - f).abs() < 1e-6 * scale,
                    "({i},{j}): {c} vs {f}"
                );
            }
        }
    }

    #[test]
    fn unplanned_spec_rejected() {
        // box too small for the Pauli spectrum
        let spec = GridSpec::new(
            vec![
                AxisSpec {
                    min: -1.0,
                    max: 1.0,
                    count: 64,
                },
                AxisSpec {
                    min: -1.0,
                    max: 1.0,
                    count: 64,
                },
            ],
            0.01,
        )
        .unwrap();
        let state = QuantumState::maximally_mixed(2);
        assert!(compute_wigner(&state, &pauli_pair(), &spec).is_err());
        // the unchecked route accepts it
        assert!(compute_wigner_unchecked(&state, &pauli_pair(), &spec).is_ok());
    }
}
