//! Frame dimensions and the three frame containers.

use num_complex::Complex64;

use crate::dft::check_finite;
use crate::error::{Error, Result};

/// Vector size `M` and IFFT size `N`. Any positive sizes are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FrameParams {
    vector_size: usize,
    ifft_size: usize,
}

impl FrameParams {
    pub fn new(vector_size: usize, ifft_size: usize) -> Result<Self> {
        if vector_size == 0 || ifft_size == 0 {
            return Err(Error::Empty);
        }
        Ok(FrameParams {
            vector_size,
            ifft_size,
        })
    }

    /// `M`
    pub fn vector_size(&self) -> usize {
        self.vector_size
    }

    /// `N`
    pub fn ifft_size(&self) -> usize {
        self.ifft_size
    }

    /// `L = M*N`
    pub fn len(&self) -> usize {
        self.vector_size * self.ifft_size
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub(crate) fn check_vector_index(&self, k: usize) -> Result<()> {
        if k >= self.ifft_size {
            return Err(Error::Index {
                index: k,
                bound: self.ifft_size,
            });
        }
        Ok(())
    }
}

fn check_len(params: FrameParams, v: &[Complex64]) -> Result<()> {
    if v.len() != params.len() {
        return Err(Error::Size {
            expected: params.len(),
            got: v.len(),
        });
    }
    check_finite(v)
}

/// The `N` information symbol vectors `x_0..x_{N-1}`, each of length `M`,
/// stored contiguously (`x_k(n)` at flat index `k*M + n`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolGrid {
    params: FrameParams,
    symbols: Vec<Complex64>,
}

impl SymbolGrid {
    pub fn zeros(params: FrameParams) -> Self {
        SymbolGrid {
            params,
            symbols: vec![Complex64::new(0.0, 0.0); params.len()],
        }
    }

    /// Builds a grid from a flat block-layout buffer.
    pub fn from_flat(params: FrameParams, symbols: Vec<Complex64>) -> Result<Self> {
        check_len(params, &symbols)?;
        Ok(SymbolGrid { params, symbols })
    }

    pub fn from_vectors(params: FrameParams, vectors: &[Vec<Complex64>]) -> Result<Self> {
        if vectors.len() != params.ifft_size() {
            return Err(Error::Size {
                expected: params.ifft_size(),
                got: vectors.len(),
            });
        }
        let mut symbols = Vec::with_capacity(params.len());
        for v in vectors {
            if v.len() != params.vector_size() {
                return Err(Error::Size {
                    expected: params.vector_size(),
                    got: v.len(),
                });
            }
            symbols.extend_from_slice(v);
        }
        Self::from_flat(params, symbols)
    }

    pub fn params(&self) -> FrameParams {
        self.params
    }

    pub fn as_flat(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn into_flat(self) -> Vec<Complex64> {
        self.symbols
    }

    /// `x_k`. Panics if `k >= N`.
    pub fn vector(&self, k: usize) -> &[Complex64] {
        let m = self.params.vector_size();
        &self.symbols[k * m..(k + 1) * m]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[Complex64]> {
        self.symbols.chunks(self.params.vector_size())
    }

    pub fn set_vector(&mut self, k: usize, x: &[Complex64]) -> Result<()> {
        self.params.check_vector_index(k)?;
        let m = self.params.vector_size();
        if x.len() != m {
            return Err(Error::Size {
                expected: m,
                got: x.len(),
            });
        }
        check_finite(x)?;
        self.symbols[k * m..(k + 1) * m].copy_from_slice(x);
        Ok(())
    }

    pub fn energy(&self) -> f64 {
        energy(&self.symbols)
    }
}

/// The discrete VOFDM signal `X` (before any cyclic prefix), block layout:
/// `X_n(m)` sits at flat index `n*M + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFrame {
    params: FrameParams,
    samples: Vec<Complex64>,
}

impl TimeFrame {
    pub fn new(params: FrameParams, samples: Vec<Complex64>) -> Result<Self> {
        check_len(params, &samples)?;
        Ok(TimeFrame { params, samples })
    }

    pub fn params(&self) -> FrameParams {
        self.params
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// `X_n`. Panics if `n >= N`.
    pub fn block(&self, n: usize) -> &[Complex64] {
        let m = self.params.vector_size();
        &self.samples[n * m..(n + 1) * m]
    }

    pub fn energy(&self) -> f64 {
        energy(&self.samples)
    }
}

/// The `M*N`-point spectrum `y`, stride layout: `y_k(m)` sits at flat index
/// `m*N + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumFrame {
    params: FrameParams,
    bins: Vec<Complex64>,
}

impl SpectrumFrame {
    pub fn new(params: FrameParams, bins: Vec<Complex64>) -> Result<Self> {
        check_len(params, &bins)?;
        Ok(SpectrumFrame { params, bins })
    }

    /// Re-interleaves per-vector spectra `y_0..y_{N-1}` into stride layout.
    pub fn from_vectors(params: FrameParams, vectors: &[Vec<Complex64>]) -> Result<Self> {
        let (m_size, n_size) = (params.vector_size(), params.ifft_size());
        if vectors.len() != n_size {
            return Err(Error::Size {
                expected: n_size,
                got: vectors.len(),
            });
        }
        let mut bins = vec![Complex64::new(0.0, 0.0); params.len()];
        for (k, y) in vectors.iter().enumerate() {
            if y.len() != m_size {
                return Err(Error::Size {
                    expected: m_size,
                    got: y.len(),
                });
            }
            for (m, &v) in y.iter().enumerate() {
                bins[m * n_size + k] = v;
            }
        }
        Self::new(params, bins)
    }

    pub fn params(&self) -> FrameParams {
        self.params
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn energy(&self) -> f64 {
        energy(&self.bins)
    }
}

pub(crate) fn energy(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn params_reject_zero() {
        assert!(FrameParams::new(0, 4).is_err());
        assert!(FrameParams::new(4, 0).is_err());
        let p = FrameParams::new(3, 5).unwrap();
        assert_eq!(p.len(), 15);
    }

    #[test]
    fn grid_layout_is_block() {
        let p = FrameParams::new(2, 3).unwrap();
        let vectors: Vec<Vec<Complex64>> = (0..3)
            .map(|k| (0..2).map(|n| c((10 * k + n) as f64)).collect())
            .collect();
        let g = SymbolGrid::from_vectors(p, &vectors).unwrap();
        for k in 0..3 {
            for n in 0..2 {
                assert_eq!(g.as_flat()[k * 2 + n], c((10 * k + n) as f64));
            }
            assert_eq!(g.vector(k), &vectors[k][..]);
        }
    }

    #[test]
    fn malformed_dimensions_rejected() {
        let p = FrameParams::new(2, 3).unwrap();
        assert_eq!(
            SymbolGrid::from_flat(p, vec![c(0.0); 5]),
            Err(Error::Size {
                expected: 6,
                got: 5
            })
        );
        assert!(SymbolGrid::from_vectors(p, &[vec![c(0.0); 2], vec![c(0.0); 2]]).is_err());
        assert!(SymbolGrid::from_vectors(p, &[vec![c(0.0); 2], vec![c(0.0); 3], vec![]]).is_err());
        assert!(TimeFrame::new(p, vec![c(0.0); 7]).is_err());
        assert!(SpectrumFrame::new(p, vec![c(0.0); 1]).is_err());
        let mut bad = vec![c(0.0); 6];
        bad[4] = c(f64::INFINITY);
        assert_eq!(TimeFrame::new(p, bad), Err(Error::NonFinite(4)));
    }

    #[test]
    fn spectrum_from_vectors_is_stride() {
        let p = FrameParams::new(3, 4).unwrap();
        let vectors: Vec<Vec<Complex64>> = (0..4)
            .map(|k| (0..3).map(|m| c((10 * k + m) as f64)).collect())
            .collect();
        let s = SpectrumFrame::from_vectors(p, &vectors).unwrap();
        for k1 in 0..3 {
            for k2 in 0..4 {
                assert_eq!(s.bins()[k1 * 4 + k2], c((10 * k2 + k1) as f64));
            }
        }
    }

    #[test]
    fn set_vector_checks() {
        let p = FrameParams::new(2, 2).unwrap();
        let mut g = SymbolGrid::zeros(p);
        assert!(g.set_vector(2, &[c(1.0), c(2.0)]).is_err());
        assert!(g.set_vector(0, &[c(1.0)]).is_err());
        g.set_vector(1, &[c(1.0), c(2.0)]).unwrap();
        assert_eq!(g.as_flat(), &[c(0.0), c(0.0), c(1.0), c(2.0)]);
        assert_eq!(g.energy(), 5.0);
    }
}
