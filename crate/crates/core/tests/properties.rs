use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vofdm_core::*;

fn random_grid(m: usize, n: usize, seed: u64) -> SymbolGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = FrameParams::new(m, n).unwrap();
    let flat = (0..m * n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    SymbolGrid::from_flat(p, flat).unwrap()
}

fn pipeline_vectors(grid: &SymbolGrid) -> Vec<Vec<Complex64>> {
    let s = spectrum(&modulate(grid).unwrap()).unwrap();
    (0..grid.params().ifft_size())
        .map(|k| split_spectrum(&s, k).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_preserved_through_chain(m in 1usize..=8, n in 1usize..=64, seed: u64) {
        let g = random_grid(m, n, seed);
        let frame = modulate(&g).unwrap();
        let s = spectrum(&frame).unwrap();
        let e = g.energy();
        prop_assert!((frame.energy() - e).abs() <= 1e-12 * e);
        prop_assert!((s.energy() - e).abs() <= 1e-12 * e);
    }

    #[test]
    fn direct_map_matches_pipeline(m in 1usize..=9, n in 1usize..=24, seed: u64) {
        let g = random_grid(m, n, seed);
        let ys = pipeline_vectors(&g);
        for (k, y) in ys.iter().enumerate() {
            let direct = spectrum_map(g.vector(k), k, g.params()).unwrap();
            for (a, b) in y.iter().zip(&direct) {
                prop_assert!((a - b).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn zero_vector_zeroes_its_spectrum_vector(m in 1usize..=8, n in 1usize..=32, seed: u64, k0 in 0usize..32) {
        let k0 = k0 % n;
        let g = random_grid(m, n, seed);
        let mut zeroed = g.clone();
        zeroed.set_vector(k0, &vec![Complex64::new(0.0, 0.0); m]).unwrap();
        let before = pipeline_vectors(&g);
        let after = pipeline_vectors(&zeroed);
        let norm = g.energy().sqrt();
        for (k, (yb, ya)) in before.iter().zip(&after).enumerate() {
            for (b, a) in yb.iter().zip(ya) {
                if k == k0 {
                    prop_assert!(a.norm() <= 1e-12 * norm);
                } else {
                    prop_assert!((a - b).norm() <= 1e-12 * norm.max(1.0));
                }
            }
        }
    }

    #[test]
    fn direct_map_is_linear(m in 1usize..=8, n in 1usize..=16, k in 0usize..16, seed: u64) {
        let k = k % n;
        let p = FrameParams::new(m, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let u: Vec<Complex64> = (0..m).map(|_| draw()).collect();
        let v: Vec<Complex64> = (0..m).map(|_| draw()).collect();
        let (a, b) = (draw(), draw());
        let combo: Vec<Complex64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let lhs = spectrum_map(&combo, k, p).unwrap();
        let yu = spectrum_map(&u, k, p).unwrap();
        let yv = spectrum_map(&v, k, p).unwrap();
        for i in 0..m {
            prop_assert!((lhs[i] - (a * yu[i] + b * yv[i])).norm() <= 1e-12);
        }
    }

    #[test]
    fn single_component_is_plain_ofdm(n in 1usize..=64, seed: u64) {
        let g = random_grid(1, n, seed);
        for (k, y) in pipeline_vectors(&g).iter().enumerate() {
            prop_assert!((y[0] - g.vector(k)[0]).norm() <= 1e-12);
        }
    }

    #[test]
    fn modulate_demodulate_round_trip(m in 1usize..=8, n in 1usize..=32, seed: u64) {
        let g = random_grid(m, n, seed);
        let back = demodulate(&modulate(&g).unwrap()).unwrap();
        for (a, b) in g.as_flat().iter().zip(back.as_flat()) {
            prop_assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn random_square_specs_null_end_to_end(
        n in 1usize..=16,
        k in 0usize..16,
        mask in 1u8..=255,
        shift in 0usize..8,
        seed: u64,
    ) {
        let (m, k) = (8, k % n);
        let p = FrameParams::new(m, n).unwrap();
        let nulls: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let mut precoded: Vec<usize> = nulls.iter().map(|i| (i + shift) % m).collect();
        precoded.sort_unstable();
        let spec = NullSpec::new(k, nulls, precoded).unwrap();
        let grid = random_grid(m, n, seed);
        match precode_grid(&grid, std::slice::from_ref(&spec), PrecodeMode::Exact) {
            Ok(out) => {
                let x = out.vector(k);
                for &i in &spec.free_positions(m) {
                    prop_assert_eq!(x[i], grid.vector(k)[i]);
                }
                let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let report = verify_nulls(&modulate(&out).unwrap(), &spec.flat_null_bins(p), 1e-10 * (1.0 + norm)).unwrap();
                prop_assert!(report.pass, "max {}", report.max_magnitude);
            }
            Err(e) => {
                let singular = matches!(e.root(), Error::Singular { .. });
                prop_assert!(singular, "unexpected error {}", e);
            }
        }
    }
}

#[test]
fn layout_bookkeeping() {
    let (m, n) = (3, 5);
    let p = FrameParams::new(m, n).unwrap();
    let g = random_grid(m, n, 1);
    let frame = modulate(&g).unwrap();
    for n2 in 0..n {
        for n1 in 0..m {
            assert_eq!(frame.samples()[n2 * m + n1], frame.block(n2)[n1]);
        }
    }
    let s = spectrum(&frame).unwrap();
    for k2 in 0..n {
        let y = split_spectrum(&s, k2).unwrap();
        for k1 in 0..m {
            assert_eq!(s.bins()[k1 * n + k2], y[k1]);
        }
    }
    let ys: Vec<Vec<Complex64>> = (0..n).map(|k| split_spectrum(&s, k).unwrap()).collect();
    assert_eq!(SpectrumFrame::from_vectors(p, &ys).unwrap(), s);
}

#[test]
fn degenerate_sizes() {
    for (m, n) in [(1, 1), (1, 5), (6, 1)] {
        let g = random_grid(m, n, 3);
        let ys = pipeline_vectors(&g);
        for (k, y) in ys.iter().enumerate() {
            let direct = spectrum_map(g.vector(k), k, g.params()).unwrap();
            for (a, b) in y.iter().zip(&direct) {
                assert!((a - b).norm() <= 1e-12);
            }
        }
    }
}

/// The exact solution, viewed over the wider precoded set, is a feasible
/// point of the min-norm problem, so min-norm energy over that set can
/// never exceed it.
#[test]
fn min_norm_never_exceeds_exact_over_same_positions() {
    let p = FrameParams::new(8, 64).unwrap();
    let exact = NullSpec::new(3, vec![6, 7], vec![6, 7]).unwrap();
    let wide = NullSpec::new(3, vec![6, 7], vec![4, 5, 6, 7]).unwrap();
    let info_params = FrameParams::new(6, 1).unwrap();
    for trial in 0..200 {
        let info = draw_grid(&SymbolSource::bpsk(trial), info_params, &FillPlan::full())
            .unwrap()
            .into_flat();
        let a = precode(&info, &exact, p, PrecodeMode::Exact).unwrap();
        let b = precode(&info[..4], &wide, p, PrecodeMode::MinNorm).unwrap();
        assert_eq!(&b.full_x[..4], &info[..4]);
        let exact_over_wide = wide
            .precoded()
            .iter()
            .map(|&i| a.full_x[i].norm_sqr())
            .sum::<f64>();
        assert!(
            b.solved_energy(&wide) <= exact_over_wide * (1.0 + 1e-12),
            "trial {trial}"
        );
        assert!(
            b.residual <= 1e-10 * (1.0 + b.full_x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        );
    }
}

#[test]
fn trailing_blocks_are_solvable() {
    for m in 2..=32 {
        let p = FrameParams::new(m, 64).unwrap();
        for count in 1..m.min(5) {
            let spec = NullSpec::trailing(7, count, m).unwrap();
            let sys = build_system(&spec, p).unwrap();
            assert!(sys.condition_estimate() < 1e12, "M={m} p={count}");
        }
    }
}
