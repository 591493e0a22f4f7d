//! Unitary discrete Fourier transforms of arbitrary length.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Kernel `W_K^{nk}`.
    Forward,
    /// Kernel `W_K^{-nk}`.
    Inverse,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unitary `K`-point DFT (or IDFT) of `v`, scaled by `1/sqrt(K)`.
pub fn unitary_dft(v: &[Complex64], direction: Direction) -> Result<Vec<Complex64>> {
    if v.is_empty() {
        return Err(Error::Empty);
    }
    check_finite(v)?;
    let mut out = v.to_vec();
    transform_in_place(&mut out, direction);
    Ok(out)
}

/// In-place unitary transform. Callers guarantee a nonempty finite buffer.
pub(crate) fn transform_in_place(buf: &mut [Complex64], direction: Direction) {
    let len = buf.len();
    let fft = PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        match direction {
            Direction::Forward => planner.plan_fft_forward(len),
            Direction::Inverse => planner.plan_fft_inverse(len),
        }
    });
    fft.process(buf);
    let scale = 1.0 / (len as f64).sqrt();
    for z in buf.iter_mut() {
        *z *= scale;
    }
}

/// `W_K^e = exp(-2*pi*j*e/K)`, with the exponent reduced modulo `K` first.
pub fn twiddle(exponent: usize, size: usize) -> Complex64 {
    let e = exponent % size;
    if e == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let (s, c) = (-2.0 * PI * e as f64 / size as f64).sin_cos();
    Complex64::new(c, s)
}

pub(crate) fn check_finite(v: &[Complex64]) -> Result<()> {
    match v
        .iter()
        .position(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}
