mod common;

use common::*;
use proptest::prelude::*;
use thermolap_core::detect::{level_diagnostic, quadratic_trend_r2};
use thermolap_core::{
    build_log_kernel, convolve, detect_multiscale, detect_single_level, rectify, DetectConfig, DetectionMap, LoGParams,
    ThermalFrame,
};

fn raw(levels: Vec<usize>) -> DetectConfig {
    DetectConfig {
        levels,
        rectify: false,
        ..DetectConfig::default()
    }
}

#[test]
fn large_blob_prefers_level_two() {
    // radius 28 -> std 9; the sigma = 2 detector matches radius 7, i.e. 28 after two halvings
    let f = gaussian_blob(192, 192, 96.0, 96.0, 9.0, 5.0);
    let cfg = DetectConfig::default();
    let l0 = detect_single_level(&f, &cfg, 0).unwrap().map.get(96, 96);
    let l2 = detect_single_level(&f, &cfg, 2).unwrap().map.get(96, 96);
    assert!(l2 > l0, "level 2 {l2} vs level 0 {l0}");
    assert!(l2 > 0.0);
}

#[test]
fn shift_by_coarsest_stride_translates_the_map() {
    let mut g = rng(31);
    let big = random_frame(&mut g, 320, 320, 20.0, 30.0);
    let (n, shift) = (256usize, 16usize);
    let a = ThermalFrame::from_fn(n, n, |x, y| big.get(x + shift, y + shift)).unwrap();
    let b = ThermalFrame::from_fn(n, n, |x, y| big.get(x, y)).unwrap();
    let cfg = raw(vec![1, 2, 3]);
    let ma = detect_multiscale(&a, &cfg).unwrap().map;
    let mb = detect_multiscale(&b, &cfg).unwrap().map;
    // level-3 kernel reach is 8 * 8 = 64 px, plus 2 * (2 + 4 + 8) for reduce and expand
    let margin = 96;
    for y in margin..n - margin - shift {
        for x in margin..n - margin - shift {
            assert_eq!(ma.get(x, y), mb.get(x + shift, y + shift), "({x}, {y})");
        }
    }
}

#[test]
fn affine_ramp_leaves_interior_response_unchanged() {
    let mut g = rng(32);
    let f = random_frame(&mut g, 80, 64, 20.0, 30.0);
    for params in [
        LoGParams::symmetric(2.0).unwrap(),
        LoGParams::new(3.0, 1.5, 0.7, 1.0).unwrap(),
    ] {
        let k = build_log_kernel(&params).unwrap();
        let r = k.radius() as isize;
        let mut mx = 0.0f64;
        let mut my = 0.0f64;
        for dy in -r..=r {
            for dx in -r..=r {
                mx += k.at(dx, dy) * dx as f64;
                my += k.at(dx, dy) * dy as f64;
            }
        }
        let moment = mx.abs().max(my.abs());
        let cfg = DetectConfig {
            log_params: params,
            ..raw(vec![0])
        };
        let base = detect_single_level(&f, &cfg, 0).unwrap().map;
        for (a, b, c) in [(5.0, 0.1, -0.05), (-2.0, -0.3, 0.3), (0.0, 0.02, 0.0)] {
            let ramped = ThermalFrame::from_fn(80, 64, |x, y| f.get(x, y) + a + b * x as f64 + c * y as f64).unwrap();
            let m = detect_single_level(&ramped, &cfg, 0).unwrap().map;
            let scale = k.weights().iter().map(|w| w.abs()).sum::<f64>() * 60.0;
            let bound = (b.abs() + c.abs()) * moment + 1e-13 * scale;
            let ru = k.radius();
            for y in ru..64 - ru {
                for x in ru..80 - ru {
                    assert!((m.get(x, y) - base.get(x, y)).abs() <= bound, "({x}, {y})");
                }
            }
        }
    }
}

#[test]
fn rectify_matches_elementwise_oracle() {
    let mut g = rng(33);
    let f = random_frame(&mut g, 20, 10, -1.0, 1.0);
    let m = DetectionMap {
        map: f.clone(),
        levels: vec![0],
        rectified: false,
    };
    let r = rectify(&m);
    for (a, b) in r.data().iter().zip(f.data()) {
        assert_eq!(*a, if *b > 0.0 { *b } else { 0.0 });
    }
    assert_eq!(rectify(&r), r);
}

#[test]
fn default_pipeline_on_constant_frame() {
    let f = ThermalFrame::filled(96, 80, 31.5).unwrap();
    let m = detect_multiscale(&f, &DetectConfig::default()).unwrap();
    assert!(m.rectified);
    assert!(m.data().iter().all(|&v| (0.0..1e-11).contains(&v)));
    assert_eq!(m.levels, vec![1, 2, 3, 4]);
}

#[test]
fn level_zero_alone_is_a_convolution() {
    let mut g = rng(34);
    let f = random_frame(&mut g, 33, 21, 0.0, 5.0);
    let cfg = raw(vec![0]);
    let k = build_log_kernel(&cfg.log_params).unwrap();
    assert_eq!(
        detect_multiscale(&f, &cfg).unwrap().map,
        convolve(&f, &k, cfg.border).unwrap()
    );
}

#[test]
fn too_deep_for_frame() {
    // 6 -> 3 -> 2 -> 1, and a 1-pixel side cannot be reduced again
    let f = ThermalFrame::filled(6, 6, 0.0).unwrap();
    assert!(detect_multiscale(&f, &DetectConfig::default()).is_err());
    assert!(detect_multiscale(&f, &raw(vec![0, 1, 2])).is_ok());
}

#[test]
fn diagnostic_ignores_white_noise() {
    for seed in 0..4 {
        let mut g = rng(100 + seed);
        let f = ThermalFrame::from_fn(256, 256, |_, _| normal(&mut g)).unwrap();
        let d = level_diagnostic(&f, &DetectConfig::default(), 4).unwrap();
        assert_eq!(d.stop_before(), None, "seed {seed}: {d:?}");
        let total: f64 = d.levels.iter().map(|r| r.energy_fraction).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn diagnostic_flags_a_heating_bowl() {
    let n = 256;
    let c = (n as f64 - 1.0) / 2.0;
    let f = ThermalFrame::from_fn(n, n, |x, y| {
        let (dx, dy) = (x as f64 - c, y as f64 - c);
        30.0 - 3.0 * (dx * dx + dy * dy) / (2.0 * c * c)
    })
    .unwrap();
    let d = level_diagnostic(&f, &DetectConfig::default(), 4).unwrap();
    assert!(d.levels[4].flagged && d.levels[3].flagged, "{d:?}");
    assert!(!d.levels[0].flagged);
    let stop = d.stop_before().unwrap();
    assert!(d.levels[stop..].iter().all(|r| r.flagged));
}

#[test]
fn diagnostic_on_constant_frame() {
    let f = ThermalFrame::filled(64, 64, 20.0).unwrap();
    let d = level_diagnostic(&f, &DetectConfig::default(), 3).unwrap();
    assert!(d.levels.iter().all(|r| r.energy_fraction == 0.0 && !r.flagged));
    assert_eq!(quadratic_trend_r2(&f), 0.0);
}

fn blob_field() -> impl Strategy<Value = ThermalFrame> {
    prop::collection::vec((8.0f64..56.0, 8.0f64..56.0, 1.0f64..6.0, 0.5f64..4.0), 1..4).prop_map(|blobs| {
        ThermalFrame::from_fn(64, 64, |x, y| {
            20.0 + blobs
                .iter()
                .map(|&(cx, cy, b, a)| {
                    let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                    a * (-(dx * dx + dy * dy) / (2.0 * b * b)).exp()
                })
                .sum::<f64>()
        })
        .unwrap()
    })
}

fn argmax(f: &ThermalFrame) -> usize {
    f.data()
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) },
        )
        .0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn argmax_survives_positive_scaling(f in blob_field(), s in 0.01f64..100.0) {
        let cfg = raw(vec![0, 1, 2]);
        let m = detect_multiscale(&f, &cfg).unwrap().map;
        let ms = detect_multiscale(&f.map(|v| v * s).unwrap(), &cfg).unwrap().map;
        let i = argmax(&m);
        let j = argmax(&ms);
        // equal unless two pixels tie to rounding
        prop_assert!(i == j || (m.data()[i] - m.data()[j]).abs() <= 1e-12 * m.data()[i].abs());
    }

    #[test]
    fn rectified_maps_are_nonnegative(f in blob_field()) {
        let m = detect_multiscale(&f, &DetectConfig::default()).unwrap();
        prop_assert!(m.data().iter().all(|&v| v >= 0.0));
        prop_assert_eq!(m.dims(), f.dims());
    }
}
