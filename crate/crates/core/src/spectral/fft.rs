//! Cached 3D complex FFTs on `n^3` cubes, built from rustfft 1D plans.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `X_k = Σ_j x_j exp(-2πi jk/n)`, unnormalized.
    Forward,
    /// `x_j = Σ_k X_k exp(+2πi jk/n)`, unnormalized.
    Inverse,
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

thread_local! {
    static PLANS: RefCell<HashMap<usize, Arc<Plans>>> = RefCell::new(HashMap::new());
}

fn plans(n: usize) -> Arc<Plans> {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Arc::new(Plans {
                    forward: planner.plan_fft_forward(n),
                    inverse: planner.plan_fft_inverse(n),
                })
            })
            .clone()
    })
}

/// Smallest `2^a 3^b 5^c` that is `≥ n`.
pub fn fft_friendly(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// In-place 3D transform of a row-major `n × n × n` cube.
///
/// Lines along each axis are transformed independently, so the result does
/// not depend on how rayon schedules them.
pub fn fft3(data: &mut [Complex64], n: usize, dir: Direction) {
    assert_eq!(data.len(), n * n * n);
    let p = plans(n);
    let fft = match dir {
        Direction::Forward => p.forward.clone(),
        Direction::Inverse => p.inverse.clone(),
    };

    // Last axis is contiguous.
    data.par_chunks_mut(n).for_each(|line| fft.process(line));

    // Middle axis: each i1-slab is independent.
    data.par_chunks_mut(n * n).for_each(|slab| {
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for i3 in 0..n {
            for i2 in 0..n {
                line[i2] = slab[i2 * n + i3];
            }
            fft.process(&mut line);
            for i2 in 0..n {
                slab[i2 * n + i3] = line[i2];
            }
        }
    });

    // First axis: gather lines, transform, scatter.
    let nn = n * n;
    let mut lines = vec![Complex64::new(0.0, 0.0); n * nn];
    lines.par_chunks_mut(n).enumerate().for_each(|(j, line)| {
        for i1 in 0..n {
            line[i1] = data[i1 * nn + j];
        }
        fft.process(line);
    });
    for (j, line) in lines.chunks_exact(n).enumerate() {
        for i1 in 0..n {
            data[i1 * nn + j] = line[i1];
        }
    }
}
