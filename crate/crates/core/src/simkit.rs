//! Seeded symbol sources, Monte Carlo magnitude statistics and PAPR.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::{FrameParams, SymbolGrid, TimeFrame};
use crate::modulation::modulate;
use crate::precoder::{precode_grid, NullSpec, PrecodeMode};
use crate::spectrum::spectrum;

#[derive(Debug, Clone, PartialEq)]
pub enum Constellation {
    /// `±1`, equiprobable.
    Bpsk,
    /// `(±1 ± j)/sqrt(2)`.
    Qpsk,
    /// A fixed sequence consumed in order; the seed is ignored.
    Explicit(Vec<Complex64>),
}

/// A deterministic symbol source. Each `(seed, stream)` pair is an
/// independent ChaCha8 substream; stream 0 backs [`draw_grid`] and
/// Monte Carlo trial `t` uses stream `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSource {
    pub kind: Constellation,
    pub seed: u64,
}

impl SymbolSource {
    pub fn bpsk(seed: u64) -> Self {
        SymbolSource {
            kind: Constellation::Bpsk,
            seed,
        }
    }

    pub fn qpsk(seed: u64) -> Self {
        SymbolSource {
            kind: Constellation::Qpsk,
            seed,
        }
    }

    pub fn explicit(symbols: Vec<Complex64>) -> Self {
        SymbolSource {
            kind: Constellation::Explicit(symbols),
            seed: 0,
        }
    }

    fn sampler(&self, stream: u64) -> Sampler<'_> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        Sampler {
            kind: &self.kind,
            rng,
            drawn: 0,
        }
    }
}

struct Sampler<'a> {
    kind: &'a Constellation,
    rng: ChaCha8Rng,
    drawn: usize,
}

impl Sampler<'_> {
    fn next(&mut self) -> Result<Complex64> {
        let z = match self.kind {
            Constellation::Bpsk => Complex64::new(self.sign(), 0.0),
            Constellation::Qpsk => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                Complex64::new(s * self.sign(), s * self.sign())
            }
            Constellation::Explicit(v) => *v
                .get(self.drawn)
                .ok_or(Error::SourceExhausted(self.drawn))?,
        };
        self.drawn += 1;
        Ok(z)
    }

    fn sign(&mut self) -> f64 {
        if self.rng.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    }
}

/// Which entries of a grid get drawn from the source.
///
/// Vectors in `zero_vectors` are all zero. Vectors listed in
/// `free_positions` are filled only at those positions (the rest stay zero,
/// pending precoding). Every other vector is filled completely.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FillPlan {
    pub zero_vectors: BTreeSet<usize>,
    pub free_positions: BTreeMap<usize, Vec<usize>>,
}

impl FillPlan {
    pub fn full() -> Self {
        Self::default()
    }

    /// Fill plan leaving each spec's precoded positions empty.
    pub fn for_specs(specs: &[NullSpec], vector_size: usize) -> Self {
        FillPlan {
            zero_vectors: BTreeSet::new(),
            free_positions: specs
                .iter()
                .map(|s| (s.k(), s.free_positions(vector_size)))
                .collect(),
        }
    }

    fn validate(&self, params: FrameParams) -> Result<()> {
        for &k in self.zero_vectors.iter().chain(self.free_positions.keys()) {
            params.check_vector_index(k)?;
        }
        for (&k, positions) in &self.free_positions {
            if self.zero_vectors.contains(&k) {
                return Err(Error::InvalidSpec(format!(
                    "vector {k} is both zeroed and has free positions"
                )));
            }
            if let Some(&n) = positions.iter().find(|&&n| n >= params.vector_size()) {
                return Err(Error::Index {
                    index: n,
                    bound: params.vector_size(),
                });
            }
        }
        Ok(())
    }
}

/// Draws a grid from stream 0 of `source`. Entries are drawn in ascending
/// `k`, then ascending `n`.
pub fn draw_grid(
    source: &SymbolSource,
    params: FrameParams,
    plan: &FillPlan,
) -> Result<SymbolGrid> {
    plan.validate(params)?;
    fill(&mut source.sampler(0), params, plan)
}

fn fill(sampler: &mut Sampler<'_>, params: FrameParams, plan: &FillPlan) -> Result<SymbolGrid> {
    let m = params.vector_size();
    let mut flat = vec![Complex64::new(0.0, 0.0); params.len()];
    for k in 0..params.ifft_size() {
        if plan.zero_vectors.contains(&k) {
            continue;
        }
        let base = k * m;
        match plan.free_positions.get(&k) {
            Some(positions) => {
                let mut sorted = positions.clone();
                sorted.sort_unstable();
                sorted.dedup();
                for n in sorted {
                    flat[base + n] = sampler.next()?;
                }
            }
            None => {
                for z in &mut flat[base..base + m] {
                    *z = sampler.next()?;
                }
            }
        }
    }
    SymbolGrid::from_flat(params, flat)
}

/// Peak-to-average power ratio of a discrete frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Papr {
    pub ratio: f64,
}

impl Papr {
    pub fn db(&self) -> f64 {
        10.0 * self.ratio.log10()
    }
}

/// `max |X(n)|^2 / mean |X(n)|^2` over the length-`MN` frame.
pub fn papr(frame: &TimeFrame) -> Result<Papr> {
    let samples = frame.samples();
    let (peak, total) = samples.iter().fold((0.0f64, 0.0f64), |(p, t), z| {
        let power = z.norm_sqr();
        (p.max(power), t + power)
    });
    if total == 0.0 {
        return Err(Error::ZeroFrame);
    }
    let mean = total / samples.len() as f64;
    // Summation round-off can put the mean a hair above the peak for
    // constant-magnitude frames.
    Ok(Papr {
        ratio: (peak / mean).max(1.0),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeStats {
    /// Mean of `|x_k(n)|` for each `n`, over trials and over `k_range`.
    pub per_position_mean: Vec<f64>,
    pub trials: usize,
    pub k_range: Vec<usize>,
    /// Largest end-to-end spectrum magnitude at any nulled bin, over all
    /// trials (computed through modulation and the full-length transform).
    pub max_null_magnitude: f64,
}

/// Monte Carlo per-position magnitude means of precoded vectors.
///
/// Trial `t` draws a full grid from stream `t` of `source` (precoded
/// positions left empty), precodes every vector in `specs`, and accumulates
/// `|x_k(n)|` for `k ∈ k_range`. Trials run in parallel; the reduction is in
/// trial order so results do not depend on scheduling.
pub fn averaged_magnitudes(
    params: FrameParams,
    specs: &[NullSpec],
    source: &SymbolSource,
    trials: usize,
    k_range: &[usize],
    mode: PrecodeMode,
) -> Result<MagnitudeStats> {
    if trials == 0 {
        return Err(Error::Empty);
    }
    if k_range.is_empty() {
        return Err(Error::InvalidSpec("empty k range".into()));
    }
    for &k in k_range {
        params.check_vector_index(k)?;
    }
    let plan = FillPlan::for_specs(specs, params.vector_size());
    plan.validate(params)?;
    let null_bins: Vec<usize> = specs
        .iter()
        .flat_map(|s| s.flat_null_bins(params))
        .collect();

    let per_trial: Vec<(Vec<f64>, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (_, grid) = run_trial(params, specs, source, &plan, t, mode)?;
            let mut sums = vec![0.0; params.vector_size()];
            for &k in k_range {
                for (acc, z) in sums.iter_mut().zip(grid.vector(k)) {
                    *acc += z.norm();
                }
            }
            let max_null = if null_bins.is_empty() {
                0.0
            } else {
                let s = spectrum(&modulate(&grid)?)?;
                null_bins
                    .iter()
                    .map(|&i| s.bins()[i].norm())
                    .fold(0.0, f64::max)
            };
            Ok((sums, max_null))
        })
        .collect::<Result<_>>()?;

    let mut totals = vec![0.0; params.vector_size()];
    let mut max_null_magnitude = 0.0f64;
    for (sums, max_null) in &per_trial {
        for (acc, s) in totals.iter_mut().zip(sums) {
            *acc += s;
        }
        max_null_magnitude = max_null_magnitude.max(*max_null);
    }
    let count = (trials * k_range.len()) as f64;
    Ok(MagnitudeStats {
        per_position_mean: totals.into_iter().map(|s| s / count).collect(),
        trials,
        k_range: k_range.to_vec(),
        max_null_magnitude,
    })
}

/// The unprecoded draw and the precoded grid of Monte Carlo trial `trial`,
/// exactly as [`averaged_magnitudes`] sees them.
pub fn trial_grids(
    params: FrameParams,
    specs: &[NullSpec],
    source: &SymbolSource,
    trial: usize,
    mode: PrecodeMode,
) -> Result<(SymbolGrid, SymbolGrid)> {
    let plan = FillPlan::for_specs(specs, params.vector_size());
    plan.validate(params)?;
    run_trial(params, specs, source, &plan, trial, mode)
}

fn run_trial(
    params: FrameParams,
    specs: &[NullSpec],
    source: &SymbolSource,
    plan: &FillPlan,
    trial: usize,
    mode: PrecodeMode,
) -> Result<(SymbolGrid, SymbolGrid)> {
    let drawn =
        fill(&mut source.sampler(trial as u64), params, plan).map_err(|e| e.at_trial(trial))?;
    let precoded = precode_grid(&drawn, specs, mode).map_err(|e| e.at_trial(trial))?;
    Ok((drawn, precoded))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zeroing_every_vector_ignores_seed() {
        let p = FrameParams::new(4, 4).unwrap();
        let plan = FillPlan {
            zero_vectors: (0..4).collect(),
            ..Default::default()
        };
        for seed in [0, 1, 99] {
            let g = draw_grid(&SymbolSource::bpsk(seed), p, &plan).unwrap();
            assert_eq!(g, SymbolGrid::zeros(p));
        }
    }

    #[test]
    fn bpsk_and_qpsk_constellations() {
        let p = FrameParams::new(8, 64).unwrap();
        let g = draw_grid(&SymbolSource::bpsk(3), p, &FillPlan::full()).unwrap();
        assert!(g
            .as_flat()
            .iter()
            .all(|z| z.im == 0.0 && z.re.abs() == 1.0 && z.norm() == 1.0));
        let positives = g.as_flat().iter().filter(|z| z.re > 0.0).count();
        assert!(positives > 200 && positives < 312);

        let g = draw_grid(&SymbolSource::qpsk(3), p, &FillPlan::full()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(g
            .as_flat()
            .iter()
            .all(|z| z.re.abs() == s && z.im.abs() == s));
    }

    #[test]
    fn same_seed_same_grid() {
        let p = FrameParams::new(3, 7).unwrap();
        let a = draw_grid(&SymbolSource::bpsk(42), p, &FillPlan::full()).unwrap();
        let b = draw_grid(&SymbolSource::bpsk(42), p, &FillPlan::full()).unwrap();
        let other = draw_grid(&SymbolSource::bpsk(43), p, &FillPlan::full()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, other);
    }

    #[test]
    fn fill_order_is_k_then_n() {
        let p = FrameParams::new(2, 3).unwrap();
        let seq: Vec<Complex64> = (0..4).map(|i| c(i as f64 + 1.0, 0.0)).collect();
        let plan = FillPlan {
            zero_vectors: [1].into_iter().collect(),
            free_positions: [(2, vec![1])].into_iter().collect(),
        };
        let g = draw_grid(&SymbolSource::explicit(seq), p, &plan).unwrap();
        assert_eq!(
            g.as_flat(),
            &[
                c(1.0, 0.0),
                c(2.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(3.0, 0.0)
            ]
        );
    }

    #[test]
    fn explicit_source_exhaustion() {
        let p = FrameParams::new(2, 2).unwrap();
        let err = draw_grid(
            &SymbolSource::explicit(vec![c(1.0, 0.0); 3]),
            p,
            &FillPlan::full(),
        );
        assert_eq!(err, Err(Error::SourceExhausted(3)));
    }

    #[test]
    fn overlapping_plan_rejected() {
        let p = FrameParams::new(2, 3).unwrap();
        let plan = FillPlan {
            zero_vectors: [1].into_iter().collect(),
            free_positions: [(1, vec![0])].into_iter().collect(),
        };
        assert!(matches!(
            draw_grid(&SymbolSource::bpsk(0), p, &plan),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn papr_edge_cases() {
        let p = FrameParams::new(2, 4).unwrap();
        let constant = vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)]
            .into_iter()
            .cycle()
            .take(8)
            .collect();
        let r = papr(&TimeFrame::new(p, constant).unwrap()).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert_eq!(r.db(), 0.0);

        let mut delta = vec![c(0.0, 0.0); 8];
        delta[5] = c(0.0, 3.0);
        let r = papr(&TimeFrame::new(p, delta).unwrap()).unwrap();
        assert!((r.ratio - 8.0).abs() < 1e-12);

        let zero = TimeFrame::new(p, vec![c(0.0, 0.0); 8]).unwrap();
        assert_eq!(papr(&zero), Err(Error::ZeroFrame));
    }

    #[test]
    fn papr_strictly_above_one_for_uneven_frame() {
        let p = FrameParams::new(1, 4).unwrap();
        let frame =
            TimeFrame::new(p, vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 1e-3)]).unwrap();
        assert!(papr(&frame).unwrap().ratio > 1.0);
    }

    #[test]
    fn unprecoded_positions_average_to_one() {
        let p = FrameParams::new(8, 64).unwrap();
        let specs = [NullSpec::trailing(5, 2, 8).unwrap()];
        let stats = averaged_magnitudes(
            p,
            &specs,
            &SymbolSource::bpsk(1),
            37,
            &[5],
            PrecodeMode::Exact,
        )
        .unwrap();
        assert!(stats.per_position_mean[..6].iter().all(|&m| m == 1.0));
        assert!(stats.per_position_mean[6] > 0.0);
        assert!(stats.max_null_magnitude <= 1e-10);
    }

    #[test]
    fn single_trial_matches_direct_precode() {
        let p = FrameParams::new(8, 64).unwrap();
        let specs = [NullSpec::trailing(5, 2, 8).unwrap()];
        let source = SymbolSource::bpsk(9);
        let stats = averaged_magnitudes(p, &specs, &source, 1, &[5], PrecodeMode::Exact).unwrap();
        let (_, grid) = trial_grids(p, &specs, &source, 0, PrecodeMode::Exact).unwrap();
        let mags: Vec<f64> = grid.vector(5).iter().map(|z| z.norm()).collect();
        assert_eq!(stats.per_position_mean, mags);
    }

    #[test]
    fn statistics_are_reproducible() {
        let p = FrameParams::new(8, 16).unwrap();
        let specs = [NullSpec::trailing(2, 2, 8).unwrap()];
        let run = || {
            averaged_magnitudes(
                p,
                &specs,
                &SymbolSource::bpsk(4),
                50,
                &[2],
                PrecodeMode::Exact,
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn zero_trials_rejected() {
        let p = FrameParams::new(4, 4).unwrap();
        let err = averaged_magnitudes(p, &[], &SymbolSource::bpsk(0), 0, &[0], PrecodeMode::Exact);
        assert_eq!(err, Err(Error::Empty));
    }
}
