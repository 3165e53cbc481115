//! Multi-dimensional FFT on row-major arrays.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// In-place transform along every axis. `Forward` uses `e^{−2πi jk/n}`;
/// neither direction normalises.
pub fn fft_nd(data: &mut [Complex64], dims: &[usize], direction: FftDirection) {
    let total: usize = dims.iter().product();
    assert_eq!(total, data.len(), "array size does not match dims");
    let mut planner = FftPlanner::new();
    let mut line = Vec::new();
    for (axis, &n) in dims.iter().enumerate() {
        if n <= 1 {
            continue;
        }
        let fft = planner.plan_fft(n, direction);
        let stride: usize = dims[axis + 1..].iter().product();
        let outer = total / (n * stride);
        line.resize(n, Complex64::new(0.0, 0.0));
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * n * stride + inner;
                for k in 0..n {
                    line[k] = data[base + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for k in 0..n {
                    data[base + k * stride] = line[k];
                }
            }
        }
    }
}
