//! Centered inverse Fourier transform on conjugate DFT lattices.
//!
//! Input: samples F[m] of a function F on the centered frequency lattice
//! `xi_m = (m - N/2) dxi` per axis (even N). Output: the Riemann-sum
//! approximation of
//!
//!   f(a) = (2 pi)^{-n} \int dxi exp(-i xi . a) F(xi)
//!
//! on the dual lattice `a_j = c + (j - N/2) da` with `da = 2 pi / (N dxi)`,
//! for a caller-chosen box center c per axis. Substituting the lattices into
//! the exponent splits it, per axis, into
//!
//!   exp(-i xi_m a_j) = exp(-i xi_m c) (-1)^m (-1)^j (-1)^{N/2} w^{m j}
//!
//! with w = exp(-2 pi i / N), so the sum is a plain forward DFT between
//! pre- and post-phase passes. The box offset c is handled exactly by the
//! phase factor, never by resampling.

use ndarray::{ArrayD, Axis, Zip};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// In-place forward FFT along every axis, parallel over lanes.
fn fft_all_axes(data: &mut ArrayD<Complex64>) {
    let mut planner = FftPlanner::<f64>::new();
    for axis in 0..data.ndim() {
        let len = data.len_of(Axis(axis));
        let fft = planner.plan_fft_forward(len);
        Zip::from(data.lanes_mut(Axis(axis))).par_for_each(|mut lane| {
            let mut buf: Vec<Complex64> = lane.iter().copied().collect();
            fft.process(&mut buf);
            for (dst, src) in lane.iter_mut().zip(&buf) {
                *dst = *src;
            }
        });
    }
}

/// Zero the samples whose mirror -xi falls off the lattice (the m = 0
/// hyperplanes), so the quadrature runs over an exactly symmetric point set
/// and real inputs produce real transforms up to rounding. The planner is
/// responsible for making these samples negligible (Gaussian tail <= eta).
pub(crate) fn zero_unpaired_planes(data: &mut ArrayD<Complex64>) {
    for axis in 0..data.ndim() {
        data.index_axis_mut(Axis(axis), 0).fill(Complex64::new(0.0, 0.0));
    }
}

/// Centered inverse transform as described in the module docs.
///
/// `deltas` are the frequency spacings dxi per axis, `centers` the output box
/// centers c per axis. All axis lengths must be even.
pub(crate) fn centered_inverse_transform(
    mut data: ArrayD<Complex64>,
    deltas: &[f64],
    centers: &[f64],
) -> Result<ArrayD<Complex64>> {
    let n = data.ndim();
    assert_eq!(deltas.len(), n);
    assert_eq!(centers.len(), n);
    for axis in 0..n {
        let len = data.len_of(Axis(axis));
        if len % 2 != 0 {
            return Err(Error::OddCount(len));
        }
    }

    // Pre-phase per axis: (-1)^m exp(-i xi_m c).
    for axis in 0..n {
        let len = data.len_of(Axis(axis));
        let half = (len / 2) as f64;
        let phase: Vec<Complex64> = (0..len)
            .map(|m| {
                let xi = (m as f64 - half) * deltas[axis];
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::from_polar(sign, -xi * centers[axis])
            })
            .collect();
        for (m, mut plane) in data.axis_iter_mut(Axis(axis)).enumerate() {
            let p = phase[m];
            plane.mapv_inplace(|z| z * p);
        }
    }

    fft_all_axes(&mut data);

    // Post-phase per axis: (-1)^j (-1)^{N/2} dxi / (2 pi).
    for axis in 0..n {
        let len = data.len_of(Axis(axis));
        let edge_sign = if (len / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let scale = deltas[axis] / (2.0 * std::f64::consts::PI);
        for (j, mut plane) in data.axis_iter_mut(Axis(axis)).enumerate() {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let factor = sign * edge_sign * scale;
            plane.mapv_inplace(|z| z * factor);
        }
    }

    Ok(data)
}
