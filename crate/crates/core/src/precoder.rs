//! Per-vector precoding that forces chosen components of `y_k` to zero.
//!
//! Since `y_k = W_M * x̂_k` with `x̂_k(n) = x_k(n) * W_MN^{nk}`, the rows of
//! that relation at the null positions `Z` give a linear system in the
//! precoded entries `x̂_k(n)`, `n ∈ P`:
//!
//! ```text
//! W_M[Z, P] * x̂_P = -W_M[Z, free] * x̂_free
//! ```
//!
//! The solved entries are demodulated by `W_MN^{-nk}` before they are
//! returned, so callers only ever see information-domain symbols.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dft::{check_finite, twiddle};
use crate::error::{Error, Result};
use crate::frame::{energy, FrameParams, SymbolGrid, TimeFrame};
use crate::spectrum::{spectrum, spectrum_map};

/// Systems with a condition estimate above this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Relative tolerance on the recomputed null magnitudes.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Which components of `y_k` must vanish (`Z`) and which entries of `x_k`
/// are solved for (`P`). Both are strictly increasing index sets in `[0, M)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullSpec {
    k: usize,
    nulls: Vec<usize>,
    precoded: Vec<usize>,
}

impl NullSpec {
    pub fn new(k: usize, nulls: Vec<usize>, precoded: Vec<usize>) -> Result<Self> {
        check_increasing("null", &nulls)?;
        check_increasing("precoded", &precoded)?;
        if precoded.len() < nulls.len() {
            return Err(Error::Infeasible {
                nulls: nulls.len(),
                precoded: precoded.len(),
            });
        }
        Ok(NullSpec { k, nulls, precoded })
    }

    /// The last `count` components of `y_k` nulled by the last `count`
    /// entries of `x_k`.
    pub fn trailing(k: usize, count: usize, vector_size: usize) -> Result<Self> {
        if count > vector_size {
            return Err(Error::Index {
                index: count,
                bound: vector_size + 1,
            });
        }
        let tail: Vec<usize> = (vector_size - count..vector_size).collect();
        Self::new(k, tail.clone(), tail)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn nulls(&self) -> &[usize] {
        &self.nulls
    }

    pub fn precoded(&self) -> &[usize] {
        &self.precoded
    }

    /// Positions of `x_k` carrying information symbols, ascending.
    pub fn free_positions(&self, vector_size: usize) -> Vec<usize> {
        complement(&self.precoded, vector_size)
    }

    /// Components of `y_k` left unconstrained, ascending.
    pub fn free_bins(&self, vector_size: usize) -> Vec<usize> {
        complement(&self.nulls, vector_size)
    }

    /// Flat spectrum indices `m*N + k` for every `m ∈ Z`.
    pub fn flat_null_bins(&self, params: FrameParams) -> Vec<usize> {
        self.nulls
            .iter()
            .map(|&m| m * params.ifft_size() + self.k)
            .collect()
    }

    pub fn validate(&self, params: FrameParams) -> Result<()> {
        params.check_vector_index(self.k)?;
        let m = params.vector_size();
        for &i in self.nulls.iter().chain(&self.precoded) {
            if i >= m {
                return Err(Error::Index { index: i, bound: m });
            }
        }
        if self.precoded.len() < self.nulls.len() {
            return Err(Error::Infeasible {
                nulls: self.nulls.len(),
                precoded: self.precoded.len(),
            });
        }
        Ok(())
    }
}

fn check_increasing(what: &str, v: &[usize]) -> Result<()> {
    if v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSpec(format!(
            "{what} positions must be strictly increasing: {v:?}"
        )));
    }
    Ok(())
}

fn complement(set: &[usize], size: usize) -> Vec<usize> {
    (0..size)
        .filter(|i| set.binary_search(i).is_err())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrecodeMode {
    /// Square `|P| = |Z|` system, pivoted LU.
    #[default]
    Exact,
    /// Minimum-energy solution over `|P| >= |Z|` unknowns.
    MinNorm,
}

/// The unitary `M`-point DFT matrix and the identity, split into column
/// blocks: `W_M = (W_1, W_2)` by precoded columns `P`, and
/// `I_M = (I_1, I_2)` by null columns `Z`.
#[derive(Debug, Clone)]
pub struct DftPartition {
    pub dft: DMatrix<Complex64>,
    pub identity: DMatrix<Complex64>,
    /// Columns of `W_M` at the free positions.
    pub dft_free: DMatrix<Complex64>,
    /// Columns of `W_M` at `P`.
    pub dft_precoded: DMatrix<Complex64>,
    /// Columns of `I_M` outside `Z`.
    pub identity_free: DMatrix<Complex64>,
    /// Columns of `I_M` at `Z`.
    pub identity_null: DMatrix<Complex64>,
}

impl DftPartition {
    pub fn new(spec: &NullSpec, vector_size: usize) -> Self {
        let m = vector_size;
        let scale = 1.0 / (m as f64).sqrt();
        let dft = DMatrix::from_fn(m, m, |r, c| twiddle(r * c, m) * scale);
        let identity = DMatrix::<Complex64>::identity(m, m);
        let free = spec.free_positions(m);
        let free_bins = spec.free_bins(m);
        DftPartition {
            dft_free: dft.select_columns(&free),
            dft_precoded: dft.select_columns(spec.precoded()),
            identity_free: identity.select_columns(&free_bins),
            identity_null: identity.select_columns(spec.nulls()),
            dft,
            identity,
        }
    }
}

/// `A * x̂_P = rhs(info)` restricted to the null rows.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    spec: NullSpec,
    params: FrameParams,
    /// `W_M[Z, P]`, `|Z| x |P|`.
    matrix: DMatrix<Complex64>,
    /// `W_M[Z, free]`.
    free_block: DMatrix<Complex64>,
}

impl LinearSystem {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn spec(&self) -> &NullSpec {
        &self.spec
    }

    /// `-W_M[Z, free] * x̂_free`, where `info` holds `x_k` at the free
    /// positions in ascending order.
    pub fn rhs(&self, info: &[Complex64]) -> Result<DVector<Complex64>> {
        let m = self.params.vector_size();
        let free = self.spec.free_positions(m);
        if info.len() != free.len() {
            return Err(Error::Size {
                expected: free.len(),
                got: info.len(),
            });
        }
        let len = self.params.len();
        let k = self.spec.k();
        let modulated = DVector::from_iterator(
            info.len(),
            free.iter()
                .zip(info)
                .map(|(&n, &v)| v * twiddle(n * k, len)),
        );
        Ok(-(&self.free_block * modulated))
    }

    /// Ratio of extreme singular values of the system matrix; infinite when
    /// the smallest one is zero.
    pub fn condition_estimate(&self) -> f64 {
        let sv = self.matrix.singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }
}

/// Builds the null-row system for `spec`. Requires at least one null.
pub fn build_system(spec: &NullSpec, params: FrameParams) -> Result<LinearSystem> {
    spec.validate(params)?;
    if spec.nulls().is_empty() {
        return Err(Error::InvalidSpec("no null positions".into()));
    }
    let part = DftPartition::new(spec, params.vector_size());
    Ok(LinearSystem {
        matrix: part.dft_precoded.select_rows(spec.nulls()),
        free_block: part.dft_free.select_rows(spec.nulls()),
        spec: spec.clone(),
        params,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecodeSolution {
    /// `x_k` with information symbols outside `P` and solved entries at `P`.
    pub full_x: Vec<Complex64>,
    /// `y_k(m)` for `m ∉ Z`, ascending `m`.
    pub realized_y_free: Vec<Complex64>,
    /// `max |y_k(m)|` over `m ∈ Z`, recomputed from `full_x`.
    pub residual: f64,
    pub condition_estimate: f64,
    pub used_min_norm: bool,
}

impl PrecodeSolution {
    /// Energy of the entries at `P`.
    pub fn solved_energy(&self, spec: &NullSpec) -> f64 {
        spec.precoded()
            .iter()
            .map(|&n| self.full_x[n].norm_sqr())
            .sum()
    }
}

/// Solves for the entries of `x_k` at `P` so that `y_k` vanishes on `Z`.
///
/// `info` holds the information symbols at the positions outside `P`, in
/// ascending position order.
pub fn precode(
    info: &[Complex64],
    spec: &NullSpec,
    params: FrameParams,
    mode: PrecodeMode,
) -> Result<PrecodeSolution> {
    spec.validate(params)?;
    let m = params.vector_size();
    let free = spec.free_positions(m);
    if info.len() != free.len() {
        return Err(Error::Size {
            expected: free.len(),
            got: info.len(),
        });
    }
    check_finite(info)?;
    if mode == PrecodeMode::Exact && spec.precoded().len() != spec.nulls().len() {
        return Err(Error::InvalidSpec(format!(
            "exact mode needs as many precoded positions as nulls ({} vs {})",
            spec.precoded().len(),
            spec.nulls().len()
        )));
    }

    let mut full_x = vec![Complex64::new(0.0, 0.0); m];
    for (&n, &v) in free.iter().zip(info) {
        full_x[n] = v;
    }

    // With no nulls the precoded entries are unconstrained; zero is the
    // minimum-energy choice.
    let condition_estimate = if spec.nulls().is_empty() {
        1.0
    } else {
        let system = build_system(spec, params)?;
        let condition = system.condition_estimate();
        if condition.is_nan() || condition > MAX_CONDITION {
            return Err(Error::Singular { condition });
        }
        let rhs = system.rhs(info)?;
        let solved = match mode {
            PrecodeMode::Exact => system
                .matrix
                .clone()
                .lu()
                .solve(&rhs)
                .ok_or(Error::Singular { condition })?,
            PrecodeMode::MinNorm => system
                .matrix
                .clone()
                .svd(true, true)
                .solve(&rhs, 0.0)
                .map_err(|e| Error::InvalidSpec(e.to_string()))?,
        };
        let len = params.len();
        for (&n, &v) in spec.precoded().iter().zip(solved.iter()) {
            full_x[n] = v * twiddle(n * spec.k(), len).conj();
        }
        condition
    };

    let y = spectrum_map(&full_x, spec.k(), params)?;
    let residual = spec
        .nulls()
        .iter()
        .map(|&i| y[i].norm())
        .fold(0.0, f64::max);
    let tolerance = RESIDUAL_TOLERANCE * (1.0 + energy(&full_x).sqrt());
    if residual.is_nan() || residual > tolerance {
        return Err(Error::Residual {
            residual,
            tolerance,
        });
    }
    Ok(PrecodeSolution {
        realized_y_free: spec.free_bins(m).iter().map(|&i| y[i]).collect(),
        full_x,
        residual,
        condition_estimate,
        used_min_norm: mode == PrecodeMode::MinNorm,
    })
}

/// Precodes every vector that has a spec; the entries of `grid` at each
/// spec's `P` are placeholders and get overwritten. Other vectors pass
/// through untouched.
pub fn precode_grid(
    grid: &SymbolGrid,
    specs: &[NullSpec],
    mode: PrecodeMode,
) -> Result<SymbolGrid> {
    let params = grid.params();
    let mut seen = vec![false; params.ifft_size()];
    for spec in specs {
        spec.validate(params).map_err(|e| e.at_vector(spec.k()))?;
        if std::mem::replace(&mut seen[spec.k()], true) {
            return Err(
                Error::InvalidSpec("more than one spec for this vector".into()).at_vector(spec.k()),
            );
        }
    }
    let mut out = grid.clone();
    for spec in specs {
        let x = grid.vector(spec.k());
        let info: Vec<Complex64> = spec
            .free_positions(params.vector_size())
            .iter()
            .map(|&n| x[n])
            .collect();
        let solution = precode(&info, spec, params, mode).map_err(|e| e.at_vector(spec.k()))?;
        out.set_vector(spec.k(), &solution.full_x)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullReport {
    pub max_magnitude: f64,
    pub pass: bool,
}

/// Largest spectrum magnitude over `flat_indices`, compared against `tol`.
pub fn verify_nulls(frame: &TimeFrame, flat_indices: &[usize], tol: f64) -> Result<NullReport> {
    let len = frame.params().len();
    if let Some(&bad) = flat_indices.iter().find(|&&i| i >= len) {
        return Err(Error::Index {
            index: bad,
            bound: len,
        });
    }
    let s = spectrum(frame)?;
    let max_magnitude = flat_indices
        .iter()
        .map(|&i| s.bins()[i].norm())
        .fold(0.0, f64::max);
    Ok(NullReport {
        max_magnitude,
        pass: max_magnitude <= tol,
    })
}
