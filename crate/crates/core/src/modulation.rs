//! VOFDM modulation: `M` independent `N`-point unitary IDFTs along the
//! vector index, written out in block layout.

use num_complex::Complex64;

use crate::dft::{transform_in_place, Direction};
use crate::error::Result;
use crate::frame::{SymbolGrid, TimeFrame};

/// For each component `m`, `(X_0(m),..,X_{N-1}(m)) = IDFT_N(x_0(m),..,x_{N-1}(m))`.
pub fn modulate(grid: &SymbolGrid) -> Result<TimeFrame> {
    let params = grid.params();
    let samples = transform_streams(grid.as_flat(), params.vector_size(), Direction::Inverse);
    TimeFrame::new(params, samples)
}

/// Exact inverse of [`modulate`].
pub fn demodulate(frame: &TimeFrame) -> Result<SymbolGrid> {
    let params = frame.params();
    let symbols = transform_streams(frame.samples(), params.vector_size(), Direction::Forward);
    SymbolGrid::from_flat(params, symbols)
}

// Both grid and frame share the block layout, so modulation and
// demodulation are the same strided per-component transform.
fn transform_streams(flat: &[Complex64], m_size: usize, direction: Direction) -> Vec<Complex64> {
    let n_size = flat.len() / m_size;
    let mut out = vec![Complex64::new(0.0, 0.0); flat.len()];
    let mut stream = vec![Complex64::new(0.0, 0.0); n_size];
    for m in 0..m_size {
        for (k, z) in stream.iter_mut().enumerate() {
            *z = flat[k * m_size + m];
        }
        transform_in_place(&mut stream, direction);
        for (n, &z) in stream.iter().enumerate() {
            out[n * m_size + m] = z;
        }
    }
    out
}
