//! Grid <-> coefficient transforms.
//!
//! A field with coefficients `c_k` (`|k| <= K`) is the function
//! `f(x) = (2π)^{-1/2} Σ_k c_k e^{ikx}`, sampled on `x_j = 2πj/N`.
//! Plans come from a per-thread planner, so no FFT state is shared
//! between workers.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use realfft::RealFftPlanner;

thread_local! {
    static PLANNER: RefCell<RealFftPlanner<f64>> = RefCell::new(RealFftPlanner::new());
}

/// Smallest even length of the form 2^a 3^b 5^c that is at least `min_len`.
pub fn fft_size(min_len: usize) -> usize {
    let mut n = min_len.max(2);
    if n % 2 == 1 {
        n += 1;
    }
    loop {
        let mut m = n;
        for p in [2, 3, 5] {
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        if m == 1 {
            return n;
        }
        n += 2;
    }
}

/// Grid length on which a product of fields whose bandwidths sum to
/// `total_bandwidth` is alias-free when projected onto modes `|k| <= keep`.
pub fn dealiased_size(total_bandwidth: usize, keep: usize) -> usize {
    fft_size(total_bandwidth + keep + 1)
}

/// Evaluate the field with non-negative-mode coefficients `coeffs` on `n` points.
pub fn synthesize(coeffs: &[Complex64], n: usize) -> Vec<f64> {
    assert!(n.is_multiple_of(2), "grid length must be even");
    assert!(
        coeffs.len() <= n / 2,
        "grid of {n} points cannot hold max mode {}",
        coeffs.len() - 1
    );
    let c2r = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    let mut spectrum = c2r.make_input_vec();
    let scale = (2.0 * PI).sqrt().recip();
    for (slot, c) in spectrum.iter_mut().zip(coeffs) {
        *slot = c * scale;
    }
    spectrum[0].im = 0.0;
    let mut out = c2r.make_output_vec();
    c2r.process(&mut spectrum, &mut out)
        .expect("inverse real FFT with validated buffers");
    out
}

/// Fourier coefficients `c_0..=c_max_mode` of grid samples.
pub fn analyze(values: &[f64], max_mode: usize) -> Vec<Complex64> {
    let n = values.len();
    assert!(n.is_multiple_of(2), "grid length must be even");
    assert!(
        max_mode < n / 2,
        "grid of {n} points cannot resolve mode {max_mode}"
    );
    let r2c = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
    let mut input = values.to_vec();
    let mut spectrum = r2c.make_output_vec();
    r2c.process(&mut input, &mut spectrum)
        .expect("forward real FFT with validated buffers");
    let scale = (2.0 * PI).sqrt() / n as f64;
    let mut coeffs: Vec<Complex64> = spectrum[..=max_mode].iter().map(|c| c * scale).collect();
    coeffs[0].im = 0.0;
    coeffs
}

/// Reusable forward/inverse transforms for a fixed grid length.
///
/// The solver evaluates the nonlinearity thousands of times on the same
/// grid; this keeps plans and scratch buffers alive across calls.
pub struct GridTransform {
    n: usize,
    r2c: std::sync::Arc<dyn realfft::RealToComplex<f64>>,
    c2r: std::sync::Arc<dyn realfft::ComplexToReal<f64>>,
    spectrum: Vec<Complex64>,
    scratch_fwd: Vec<Complex64>,
    scratch_inv: Vec<Complex64>,
    real_buf: Vec<f64>,
}

impl GridTransform {
    pub fn new(n: usize) -> Self {
        assert!(n.is_multiple_of(2), "grid length must be even");
        let (r2c, c2r) = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            (p.plan_fft_forward(n), p.plan_fft_inverse(n))
        });
        Self {
            n,
            spectrum: r2c.make_output_vec(),
            scratch_fwd: r2c.make_scratch_vec(),
            scratch_inv: c2r.make_scratch_vec(),
            real_buf: vec![0.0; n],
            r2c,
            c2r,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn synthesize_into(&mut self, coeffs: &[Complex64], out: &mut [f64]) {
        debug_assert!(coeffs.len() <= self.n / 2);
        let scale = (2.0 * PI).sqrt().recip();
        self.spectrum
            .iter_mut()
            .for_each(|c| *c = Complex64::new(0.0, 0.0));
        for (slot, c) in self.spectrum.iter_mut().zip(coeffs) {
            *slot = c * scale;
        }
        self.spectrum[0].im = 0.0;
        self.c2r
            .process_with_scratch(&mut self.spectrum, out, &mut self.scratch_inv)
            .expect("inverse real FFT with validated buffers");
    }

    pub fn analyze_into(&mut self, values: &[f64], out: &mut [Complex64]) {
        debug_assert!(out.len() <= self.n / 2);
        self.real_buf.copy_from_slice(values);
        self.r2c
            .process_with_scratch(
                &mut self.real_buf,
                &mut self.spectrum,
                &mut self.scratch_fwd,
            )
            .expect("forward real FFT with validated buffers");
        let scale = (2.0 * PI).sqrt() / self.n as f64;
        for (o, c) in out.iter_mut().zip(&self.spectrum) {
            *o = c * scale;
        }
        out[0].im = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_sizes_are_smooth_and_even() {
        assert_eq!(fft_size(1), 2);
        assert_eq!(fft_size(7), 8);
        assert_eq!(fft_size(1025), 1080);
        assert_eq!(fft_size(97), 100);
    }

    #[test]
    fn synthesize_then_analyze_is_identity() {
        let coeffs = vec![
            Complex64::new(0.7, 0.0),
            Complex64::new(0.1, -0.3),
            Complex64::new(-0.2, 0.05),
        ];
        let grid = synthesize(&coeffs, 8);
        let back = analyze(&grid, 2);
        for (a, b) in coeffs.iter().zip(&back) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn cosine_samples() {
        // cos x has c_{±1} = sqrt(π/2)
        let c1 = (PI / 2.0).sqrt();
        let grid = synthesize(&[Complex64::new(0.0, 0.0), Complex64::new(c1, 0.0)], 16);
        for (j, v) in grid.iter().enumerate() {
            let x = 2.0 * PI * j as f64 / 16.0;
            assert!((v - x.cos()).abs() < 1e-14);
        }
    }
}
