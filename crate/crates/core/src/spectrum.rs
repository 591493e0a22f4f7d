//! The `MN`-point spectrum of a VOFDM frame and the direct per-vector map
//! from `x_k` to `y_k`.

use num_complex::Complex64;

use crate::dft::{check_finite, transform_in_place, twiddle, Direction};
use crate::error::{Error, Result};
use crate::frame::{FrameParams, SpectrumFrame, TimeFrame};

/// `y = DFT_MN(X)`, unitary.
pub fn spectrum(frame: &TimeFrame) -> Result<SpectrumFrame> {
    let mut bins = frame.samples().to_vec();
    transform_in_place(&mut bins, Direction::Forward);
    SpectrumFrame::new(frame.params(), bins)
}

/// `y_k`: the bins at flat indices `k, k+N, .., k+(M-1)N`.
pub fn split_spectrum(s: &SpectrumFrame, k: usize) -> Result<Vec<Complex64>> {
    let params = s.params();
    params.check_vector_index(k)?;
    Ok(s.bins()
        .iter()
        .skip(k)
        .step_by(params.ifft_size())
        .copied()
        .collect())
}

/// Computes `y_k` directly from `x_k`: the unitary `M`-point DFT of the
/// modulated vector `x_k(n) * W_MN^{nk}`.
///
/// Equals `split_spectrum(&spectrum(&modulate(grid)?)?, k)` for any grid
/// whose `k`-th vector is `x`, without touching the other vectors.
pub fn spectrum_map(x: &[Complex64], k: usize, params: FrameParams) -> Result<Vec<Complex64>> {
    params.check_vector_index(k)?;
    if x.len() != params.vector_size() {
        return Err(Error::Size {
            expected: params.vector_size(),
            got: x.len(),
        });
    }
    check_finite(x)?;
    let mut modulated = modulate_vector(x, k, params);
    transform_in_place(&mut modulated, Direction::Forward);
    Ok(modulated)
}

/// `x_k(n) -> x_k(n) * W_MN^{nk}`.
fn modulate_vector(x: &[Complex64], k: usize, params: FrameParams) -> Vec<Complex64> {
    let len = params.len();
    x.iter()
        .enumerate()
        .map(|(n, &v)| v * twiddle(n * k, len))
        .collect()
}
