//! Unnormalized multi-axis FFT over row-major buffers.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    static SCRATCH: RefCell<(Vec<Complex64>, Vec<Complex64>)> = const { RefCell::new((Vec::new(), Vec::new())) };
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const BLOCK: usize = 16;
    for r0 in (0..rows).step_by(BLOCK) {
        for c0 in (0..cols).step_by(BLOCK) {
            for r in r0..(r0 + BLOCK).min(rows) {
                for c in c0..(c0 + BLOCK).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

/// In-place transform along every axis. Forward uses `exp(-2 pi i k n / N)`,
/// inverse uses `exp(+2 pi i k n / N)`; neither applies any scaling.
pub(crate) fn transform(values: &mut [Complex64], sizes: &[usize], inverse: bool) {
    debug_assert_eq!(values.len(), sizes.iter().product::<usize>());
    PLANNER.with(|planner| {
        SCRATCH.with(|scratch| {
            let mut planner = planner.borrow_mut();
            let (work, t) = &mut *scratch.borrow_mut();
            let mut run = |buf: &mut [Complex64], n: usize| {
                let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
                work.resize(fft.get_inplace_scratch_len(), Complex64::default());
                fft.process_with_scratch(buf, work);
            };
            match *sizes {
                [n] => run(values, n),
                [rows, cols] => {
                    // rows are contiguous; columns go through a transposed copy
                    run(values, cols);
                    t.resize(values.len(), Complex64::default());
                    transpose(values, t, rows, cols);
                    run(t, rows);
                    transpose(t, values, cols, rows);
                }
                _ => unreachable!("grids are 1-d or 2-d"),
            }
        })
    });
}
