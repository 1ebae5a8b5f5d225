mod common;

use common::*;
use coocscale::cooc::{cooc_filter, downscale_plane_detailed, expected_total, learn_cooccurrence};
use coocscale::resample::{
    bicubic_downscale, box_downscale, gaussian_convolve, lanczos_downscale, subsample_downscale,
};
use coocscale::{CoocMode, DownscaleParams, Fallback, ImagePlane, Method, RasterImage};
use proptest::prelude::*;

#[test]
fn learning_matches_quadruple_loop() {
    let mut rng = rng(11);
    for (w, h) in [(1, 9), (9, 1), (5, 7), (16, 12), (31, 8)] {
        let f = random_plane(w, h, &mut rng);
        for k in 1..=4 {
            let c = learn_cooccurrence(&f, k, CoocMode::InputPairs, None).unwrap();
            assert_eq!(c.counts(), cooc_quadruple_loop(&f, k).as_slice(), "{w}x{h} k={k}");
            assert_eq!(c.total(), expected_total(w, h, k));
        }
    }
}

#[test]
fn filter_matches_direct_evaluation() {
    let mut rng = rng(12);
    for (w, h, d) in [(8, 8, 2), (12, 20, 2), (16, 16, 4), (24, 8, 4)] {
        let f = random_plane(w, h, &mut rng);
        for sigma in [0.0, 0.5, 1.3] {
            let params = DownscaleParams::new(d).with_sigma(sigma);
            let got = downscale_plane_detailed(&f, &params).unwrap();
            let guide = guide_oracle(&f, d, sigma);
            for (g, e) in got.guide.values().iter().zip(guide.values()) {
                assert!((g - e).abs() < 1e-10);
            }
            let counts = cooc_quadruple_loop(&f, d);
            let expect = filter_oracle(&f, &guide, &counts, d);
            for (i, (g, e)) in got.output.values().iter().zip(&expect).enumerate() {
                let e = e.unwrap_or(guide.values()[i]);
                assert!((g - e).abs() < 1e-9, "{w}x{h} d={d} sigma={sigma}: {g} vs {e}");
            }
        }
    }
}

#[test]
fn bicubic_impulse_matches_kernel_sum() {
    let mut f = vec![0.0; 16 * 16];
    f[8 * 16 + 8] = 255.0;
    let f = ImagePlane::new(16, 16, f).unwrap();
    let out = bicubic_downscale(&f, 2).unwrap();
    for r in 0..8 {
        for c in 0..8 {
            let center = |o: usize| (o as f64 + 0.5) * 2.0 - 0.5;
            let norm = |ctr: f64| -> f64 { (-10..26).map(|i| cubic((i as f64 - ctr) / 2.0)).sum() };
            let expect = 255.0 * cubic((8.0 - center(r)) / 2.0) * cubic((8.0 - center(c)) / 2.0)
                / (norm(center(r)) * norm(center(c)));
            assert!((out.get(r, c) - expect).abs() < 1e-12, "({r},{c})");
        }
    }
}

#[test]
fn lanczos_impulse_matches_kernel_sum() {
    let mut f = vec![0.0; 24 * 24];
    f[12 * 24 + 12] = 255.0;
    let f = ImagePlane::new(24, 24, f).unwrap();
    let out = lanczos_downscale(&f, 2).unwrap();
    for r in 0..12 {
        for c in 0..12 {
            let center = |o: usize| (o as f64 + 0.5) * 2.0 - 0.5;
            let norm = |ctr: f64| -> f64 { (-20..44).map(|i| lanczos3((i as f64 - ctr) / 2.0)).sum() };
            let expect = 255.0 * lanczos3((12.0 - center(r)) / 2.0) * lanczos3((12.0 - center(c)) / 2.0)
                / (norm(center(r)) * norm(center(c)));
            assert!((out.get(r, c) - expect).abs() < 1e-12, "({r},{c})");
        }
    }
}

#[test]
fn separable_matches_direct_2d() {
    let mut rng = rng(13);
    for _ in 0..5 {
        let f = random_plane(16, 16, &mut rng);
        for d in [2, 4] {
            let sep = bicubic_downscale(&f, d).unwrap();
            let direct = kernel_downscale_2d(&f, d, 2.0, cubic);
            for (a, b) in sep.values().iter().zip(direct.values()) {
                assert!((a - b).abs() < 1e-10);
            }
            let sep = lanczos_downscale(&f, d).unwrap();
            let direct = kernel_downscale_2d(&f, d, 3.0, lanczos3);
            for (a, b) in sep.values().iter().zip(direct.values()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
        for sigma in [0.5, 1.0, 2.2] {
            let sep = gaussian_convolve(&f, sigma).unwrap();
            let direct = gaussian_2d_oracle(&f, sigma);
            for (a, b) in sep.values().iter().zip(direct.values()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let mut rng = rng(14);
    let f = random_plane(64, 48, &mut rng);
    let img = RasterImage::gray(f);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            Method::ALL
                .iter()
                .map(|m| m.downscale(&img, &DownscaleParams::new(4).with_radius(5)).unwrap())
                .collect::<Vec<_>>()
        })
    };
    let single = run(1);
    for threads in [2, 3, 8] {
        let multi = run(threads);
        for (a, b) in single.iter().zip(&multi) {
            let bits = |x: &RasterImage| x.plane(0).values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(a), bits(b));
        }
    }
}

#[test]
fn composition_contract() {
    let mut rng = rng(15);
    let planes: Vec<_> = (0..3).map(|_| random_plane(20, 12, &mut rng)).collect();
    let img = RasterImage::new(planes).unwrap();
    let params = DownscaleParams::new(2).with_radius(3).with_sigma(0.7);
    let out = coocscale::downscale_cooc(&img, &params).unwrap();
    for (ch, plane) in img.planes().iter().enumerate() {
        let guide = coocscale::build_guide(plane, params.guide_params()).unwrap();
        let c = learn_cooccurrence(plane, 3, CoocMode::InputPairs, Some(&guide)).unwrap();
        let manual = cooc_filter(plane, &guide, &c, 2, Fallback::GuideValue).unwrap();
        assert_eq!(out.plane(ch), &manual);
    }
}

fn plane_strategy(max: usize) -> impl Strategy<Value = ImagePlane> {
    (1..=max, 1..=max).prop_flat_map(|(w, h)| {
        proptest::collection::vec(0u8..=255, w * h)
            .prop_map(move |v| ImagePlane::new(w, h, v.into_iter().map(f64::from).collect()).unwrap())
    })
}

/// Planes whose dimensions are multiples of `d`.
fn divisible_plane(d: usize, max_cells: usize) -> impl Strategy<Value = ImagePlane> {
    (1..=max_cells, 1..=max_cells).prop_flat_map(move |(cw, ch)| {
        let (w, h) = (cw * d, ch * d);
        proptest::collection::vec(0u8..=255, w * h)
            .prop_map(move |v| ImagePlane::new(w, h, v.into_iter().map(f64::from).collect()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn input_pairs_table_is_symmetric(f in plane_strategy(24), k in 1usize..5) {
        let c = learn_cooccurrence(&f, k, CoocMode::InputPairs, None).unwrap();
        for a in 0..=255u8 {
            for b in 0..a {
                prop_assert_eq!(c.get(a, b), c.get(b, a));
            }
        }
        prop_assert_eq!(c.total(), expected_total(f.width(), f.height(), k));
    }

    #[test]
    fn cooc_outputs_stay_in_window_range(f in divisible_plane(2, 8), extra in 0usize..3, sigma in 0.0f64..1.5) {
        let params = DownscaleParams::new(2).with_radius(2 + extra).with_sigma(sigma);
        let r = downscale_plane_detailed(&f, &params).unwrap();
        let weighted = filter_oracle(&f, &r.guide, r.cooc.counts(), 2);
        for row in 0..r.output.height() {
            for col in 0..r.output.width() {
                let v = r.output.get(row, col);
                match weighted[row * r.output.width() + col] {
                    Some(_) => {
                        let (lo, hi) = window_bounds(&f, row, col, 2);
                        prop_assert!(v >= lo - 1e-9 && v <= hi + 1e-9);
                    }
                    None => {
                        prop_assert_eq!(v, r.guide.get(row, col));
                        prop_assert!((0.0..=255.0).contains(&v));
                    }
                }
            }
        }
    }

    #[test]
    fn count_scaling_leaves_output_unchanged(f in divisible_plane(2, 6), lambda in 2u64..1000) {
        let guide = coocscale::build_guide(&f, coocscale::GuideParams::new(2, 0.5).unwrap()).unwrap();
        let c = learn_cooccurrence(&f, 2, CoocMode::InputPairs, None).unwrap();
        let a = cooc_filter(&f, &guide, &c, 2, Fallback::GuideValue).unwrap();
        let b = cooc_filter(&f, &guide, &c.scaled(lambda).unwrap(), 2, Fallback::GuideValue).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn constant_in_constant_out(cw in 1usize..6, ch in 1usize..6, d in 2usize..5, v in 0.0f64..=255.0, extra in 0usize..3) {
        let f = ImagePlane::filled(cw * d, ch * d, v).unwrap();
        let img = RasterImage::gray(f);
        for mode in [CoocMode::InputPairs, CoocMode::GuideIndexed] {
            for fallback in [Fallback::GuideValue, Fallback::UniformMean] {
                let params = DownscaleParams::new(d).with_radius(d + extra).with_mode(mode).with_fallback(fallback);
                for m in Method::ALL {
                    let out = m.downscale(&img, &params).unwrap();
                    prop_assert_eq!((out.width(), out.height()), (cw, ch));
                    prop_assert!(out.plane(0).values().iter().all(|&x| x == v), "{} {}", m, v);
                }
            }
        }
    }

    #[test]
    fn box_output_within_input_range(f in divisible_plane(3, 5)) {
        let out = box_downscale(&f, 3).unwrap();
        let (lo, hi) = (f.min(), f.max());
        prop_assert!(out.values().iter().all(|&v| v >= lo && v <= hi));
        let sub = subsample_downscale(&f, 3).unwrap();
        prop_assert!(sub.values().iter().all(|&v| v >= lo && v <= hi));
    }

    #[test]
    fn gaussian_bounds_and_mean(inner in proptest::collection::vec(0u8..=255, 36), border in 0u8..=255, sigma in 0.1f64..1.0) {
        // 6x6 interior surrounded by a constant border at least 3 sigma wide
        let pad = 3usize;
        let n = 6 + 2 * pad;
        let f = ImagePlane::from_fn(n, n, |r, c| {
            if (pad..pad + 6).contains(&r) && (pad..pad + 6).contains(&c) {
                inner[(r - pad) * 6 + (c - pad)] as f64
            } else {
                border as f64
            }
        }).unwrap();
        let g = gaussian_convolve(&f, sigma).unwrap();
        let mean = |p: &ImagePlane| p.values().iter().sum::<f64>() / p.len() as f64;
        prop_assert!((mean(&g) - mean(&f)).abs() < 1e-9);
        prop_assert!(g.min() >= f.min() - 1e-12 && g.max() <= f.max() + 1e-12);
    }
}
