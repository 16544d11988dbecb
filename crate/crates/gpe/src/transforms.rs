//! Discrete sine and Fourier transforms with fixed normalizations.
//!
//! The sine transform of a vector `phi_1..phi_{N-1}` of interior values is
//!
//! ```text
//! phi~_l = (2/N) sum_{j=1}^{N-1} phi_j sin(j l pi / N),    l = 1..N-1,
//! ```
//!
//! inverted by the plain sine sum `phi_j = sum_l phi~_l sin(j l pi / N)`.
//! The associated eigenvalues of `-d/dx` are `lambda_l = pi l / (b - a)`.
//!
//! The Fourier transform of `phi_0..phi_{N-1}` carries the `1/N` factor on
//! the forward direction,
//!
//! ```text
//! phi~_p = (1/N) sum_{j=0}^{N-1} phi_j e^{-2 pi i j p / N},   p = -N/2..N/2-1,
//! ```
//!
//! and none on the inverse, with frequencies `lambda_p = 2 pi p / (b - a)`.
//! Coefficients are stored in FFT index order: index `i` holds mode
//! `p = i` for `i < N/2` and `p = i - N` otherwise.
//!
//! Both transforms run in `O(N log N)`; the sine transform goes through an
//! odd extension of length `2N` and a single complex FFT. Multidimensional
//! data is transformed dimension by dimension.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Sine coefficients of a Dirichlet grid function along one dimension.
#[derive(Debug, Clone)]
pub struct SineSpectrum {
    /// Coefficients `phi~_l`, `l = 1..N-1`.
    pub coefficients: Vec<f64>,
    /// Eigenvalues `lambda_l = pi l / (b - a)`, strictly increasing.
    pub eigenvalues: Vec<f64>,
}

/// Fourier coefficients of a periodic grid function along one dimension.
#[derive(Debug, Clone)]
pub struct FourierSpectrum {
    /// Coefficients in FFT index order (index 0 is the zero mode).
    pub coefficients: Vec<Complex64>,
    /// Frequencies `2 pi p / (b - a)` in the same order.
    pub frequencies: Vec<f64>,
}

/// Planned sine transform for `N` intervals on an edge of length `extent`.
pub struct SineTransform {
    n: usize,
    extent: f64,
    fft: Arc<dyn Fft<f64>>,
}

impl SineTransform {
    /// Plans transforms for interior vectors of length `n - 1`.
    pub fn new(n: usize, extent: f64) -> Self {
        assert!(n >= 2, "sine transform needs at least 2 intervals");
        let fft = FftPlanner::new().plan_fft_forward(2 * n);
        Self { n, extent, fft }
    }

    /// Interval count `N`.
    pub fn intervals(&self) -> usize {
        self.n
    }

    /// Eigenvalue `lambda_l = pi l / (b - a)` for `l = 1..N-1`.
    pub fn eigenvalue(&self, l: usize) -> f64 {
        std::f64::consts::PI * l as f64 / self.extent
    }

    /// All eigenvalues `lambda_1..lambda_{N-1}`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        (1..self.n).map(|l| self.eigenvalue(l)).collect()
    }

    /// Scratch length required by [`Self::sine_sum_complex`].
    pub fn scratch_len(&self) -> usize {
        2 * self.n + self.fft.get_inplace_scratch_len()
    }

    /// Unnormalized sine sum `out_l = sum_j values_j sin(j l pi / N)` for
    /// complex data, written over `values`. Both directions of the
    /// transform reduce to this kernel with different prefactors.
    pub fn sine_sum_complex(&self, values: &mut [Complex64], scratch: &mut [Complex64]) {
        let n = self.n;
        let m = n - 1;
        assert_eq!(values.len(), m);
        assert!(scratch.len() >= self.scratch_len());
        let (ext, fft_scratch) = scratch.split_at_mut(2 * n);
        ext[0] = Complex64::new(0.0, 0.0);
        ext[n] = Complex64::new(0.0, 0.0);
        for j in 1..n {
            let z = values[j - 1];
            ext[j] = z;
            ext[2 * n - j] = -z;
        }
        self.fft
            .process_with_scratch(ext, &mut fft_scratch[..self.fft.get_inplace_scratch_len()]);
        // odd extension gives ext^_l = -2i * sum_j values_j sin(j l pi / N)
        for l in 1..n {
            let z = ext[l];
            values[l - 1] = Complex64::new(-0.5 * z.im, 0.5 * z.re);
        }
    }

    fn sine_sum_real(&self, values: &[f64]) -> Vec<f64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.scratch_len()];
        self.sine_sum_complex(&mut buf, &mut scratch);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Forward transform: `phi~_l = (2/N) sum_j phi_j sin(j l pi / N)`.
    pub fn forward(&self, values: &[f64]) -> SineSpectrum {
        let mut c = self.sine_sum_real(values);
        let s = 2.0 / self.n as f64;
        for x in &mut c {
            *x *= s;
        }
        SineSpectrum {
            coefficients: c,
            eigenvalues: self.eigenvalues(),
        }
    }

    /// Inverse transform: `phi_j = sum_l phi~_l sin(j l pi / N)`.
    pub fn inverse(&self, spectrum: &SineSpectrum) -> Vec<f64> {
        self.sine_sum_real(&spectrum.coefficients)
    }
}

/// Planned Fourier transform for `N` nodes on an edge of length `extent`.
pub struct FourierTransform {
    n: usize,
    extent: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl FourierTransform {
    /// Plans transforms of length `n` (`n` even).
    pub fn new(n: usize, extent: f64) -> Self {
        assert!(n >= 2 && n % 2 == 0, "Fourier transform needs even length");
        let mut planner = FftPlanner::new();
        Self {
            n,
            extent,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    /// Node count `N`.
    pub fn len(&self) -> usize {
        self.n
    }

    /// True only for the degenerate zero-length transform (never built).
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Frequency `2 pi p / (b - a)` of FFT index `i`, where `p = i` for
    /// `i < N/2` and `p = i - N` otherwise.
    pub fn frequency(&self, i: usize) -> f64 {
        let p = if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        };
        2.0 * std::f64::consts::PI * p as f64 / self.extent
    }

    /// All frequencies in FFT index order.
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.frequency(i)).collect()
    }

    /// Scratch length required by the in-place kernels.
    pub fn scratch_len(&self) -> usize {
        self.fwd
            .get_inplace_scratch_len()
            .max(self.inv.get_inplace_scratch_len())
    }

    /// In-place forward transform including the `1/N` factor.
    pub fn forward_in_place(&self, values: &mut [Complex64], scratch: &mut [Complex64]) {
        assert_eq!(values.len(), self.n);
        self.fwd
            .process_with_scratch(values, &mut scratch[..self.fwd.get_inplace_scratch_len()]);
        let s = 1.0 / self.n as f64;
        for z in values {
            *z *= s;
        }
    }

    /// In-place inverse transform (no normalization factor).
    pub fn inverse_in_place(&self, values: &mut [Complex64], scratch: &mut [Complex64]) {
        assert_eq!(values.len(), self.n);
        self.inv
            .process_with_scratch(values, &mut scratch[..self.inv.get_inplace_scratch_len()]);
    }

    /// Forward transform: `phi~_p = (1/N) sum_j phi_j e^{-2 pi i j p / N}`.
    pub fn forward(&self, values: &[Complex64]) -> FourierSpectrum {
        let mut c = values.to_vec();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.scratch_len()];
        self.forward_in_place(&mut c, &mut scratch);
        FourierSpectrum {
            coefficients: c,
            frequencies: self.frequencies(),
        }
    }

    /// Inverse transform: `phi_j = sum_p phi~_p e^{2 pi i j p / N}`.
    pub fn inverse(&self, spectrum: &FourierSpectrum) -> Vec<Complex64> {
        let mut v = spectrum.coefficients.clone();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.scratch_len()];
        self.inverse_in_place(&mut v, &mut scratch);
        v
    }
}

/// Forward sine transform of interior values on `N` intervals spanning
/// `extent`.
pub fn dst_forward(values: &[f64], n: usize, extent: f64) -> SineSpectrum {
    assert_eq!(values.len(), n - 1);
    SineTransform::new(n, extent).forward(values)
}

/// Inverse sine transform back to interior values.
pub fn dst_inverse(spectrum: &SineSpectrum, n: usize, extent: f64) -> Vec<f64> {
    assert_eq!(spectrum.coefficients.len(), n - 1);
    SineTransform::new(n, extent).inverse(spectrum)
}

/// Forward Fourier transform with the `1/N` normalization.
pub fn dft_forward(values: &[Complex64], extent: f64) -> FourierSpectrum {
    FourierTransform::new(values.len(), extent).forward(values)
}

/// Inverse Fourier transform (no normalization factor).
pub fn dft_inverse(spectrum: &FourierSpectrum, extent: f64) -> Vec<Complex64> {
    FourierTransform::new(spectrum.coefficients.len(), extent).inverse(spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_sine_mode_forward() {
        let n = 8;
        let phi: Vec<f64> = (1..n).map(|j| (j as f64 * PI / n as f64).sin()).collect();
        let spec = dst_forward(&phi, n, 1.0);
        assert!((spec.coefficients[0] - 1.0).abs() < 1e-13);
        for &c in &spec.coefficients[1..] {
            assert!(c.abs() < 1e-13);
        }
    }

    #[test]
    fn zero_input_zero_spectrum() {
        let spec = dst_forward(&[0.0; 15], 16, 2.0);
        assert!(spec.coefficients.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn sine_eigenvalues_increase() {
        let spec = dst_forward(&[1.0; 7], 8, 32.0);
        assert!((spec.eigenvalues[0] - PI / 32.0).abs() < 1e-15);
        for w in spec.eigenvalues.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn single_coefficient_inverse() {
        let n = 8;
        let mut coeff = vec![0.0; n - 1];
        coeff[0] = 1.0;
        let spec = SineSpectrum {
            eigenvalues: (1..n).map(|l| PI * l as f64).collect(),
            coefficients: coeff,
        };
        let phi = dst_inverse(&spec, n, 1.0);
        for (j, &v) in phi.iter().enumerate() {
            let expect = ((j + 1) as f64 * PI / n as f64).sin();
            assert!((v - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn all_ones_spectrum_n4() {
        // phi_j = sum_{l=1..3} sin(j l pi / 4):
        //   j=1: 1 + sqrt(2); j=2: 0; j=3: sqrt(2) - 1
        let spec = SineSpectrum {
            coefficients: vec![1.0; 3],
            eigenvalues: vec![0.0; 3],
        };
        let phi = dst_inverse(&spec, 4, 1.0);
        let s2 = 2.0f64.sqrt();
        assert!((phi[0] - (1.0 + s2)).abs() < 1e-13);
        assert!(phi[1].abs() < 1e-13);
        assert!((phi[2] - (s2 - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn dft_constant_input() {
        let vals = vec![Complex64::new(2.5, -1.0); 8];
        let spec = dft_forward(&vals, 1.0);
        assert!((spec.coefficients[0] - Complex64::new(2.5, -1.0)).norm() < 1e-14);
        for &c in &spec.coefficients[1..] {
            assert!(c.norm() < 1e-14);
        }
    }

    #[test]
    fn dft_single_mode() {
        let n = 8;
        let vals: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(0.0, 2.0 * PI * j as f64 / n as f64).exp())
            .collect();
        let spec = dft_forward(&vals, 1.0);
        assert!((spec.coefficients[1] - Complex64::new(1.0, 0.0)).norm() < 1e-13);
        for (i, &c) in spec.coefficients.iter().enumerate() {
            if i != 1 {
                assert!(c.norm() < 1e-13);
            }
        }
    }

    #[test]
    fn dft_frequency_order() {
        let t = FourierTransform::new(8, 2.0 * PI);
        let f = t.frequencies();
        assert_eq!(f[0], 0.0);
        assert_eq!(f[1], 1.0);
        assert_eq!(f[3], 3.0);
        assert_eq!(f[4], -4.0); // unmatched -N/2 mode
        assert_eq!(f[7], -1.0);
    }
}
