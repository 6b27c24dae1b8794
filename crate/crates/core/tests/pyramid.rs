mod common;

use std::f64::consts::PI;

use common::*;
use proptest::prelude::*;
use thermolap_core::pyramid::{dims_chain, expand, expand_n, half, reduce, reduce_n};
use thermolap_core::{frame_stats, ThermalFrame};

/// Full 5x5 outer-product smoothing with clamped indices, then every second
/// sample.
fn reduce_oracle(f: &ThermalFrame) -> Vec<f64> {
    let taps = [1.0, 4.0, 6.0, 4.0, 1.0];
    let (w, h) = f.dims();
    let clamp = |i: isize, n: usize| i.max(0).min(n as isize - 1) as usize;
    let mut out = Vec::new();
    for y in (0..h).step_by(2) {
        for x in (0..w).step_by(2) {
            let mut acc = 0.0;
            for j in 0..5 {
                for i in 0..5 {
                    let sx = clamp(x as isize + i as isize - 2, w);
                    let sy = clamp(y as isize + j as isize - 2, h);
                    acc += taps[i] * taps[j] / 256.0 * f.get(sx, sy);
                }
            }
            out.push(acc);
        }
    }
    out
}

#[test]
fn reduce_matches_nonseparable_oracle() {
    let mut g = rng(21);
    for (w, h) in [(16, 16), (17, 9), (2, 2), (3, 31)] {
        let f = random_frame(&mut g, w, h, -10.0, 40.0);
        let r = reduce(&f).unwrap();
        assert_eq!(r.dims(), (half(w), half(h)));
        let want = reduce_oracle(&f);
        let scale = f.data().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        assert!(max_abs_diff(r.data(), &want) < 1e-12 * scale);
    }
}

#[test]
fn linear_ramp_survives_a_roundtrip() {
    let f = ThermalFrame::from_fn(128, 128, |x, y| 0.5 * x as f64 + 0.25 * y as f64).unwrap();
    let back = expand(&reduce(&f).unwrap(), 128, 128).unwrap();
    let s = frame_stats(&f);
    let err = max_abs_diff(f.data(), back.data());
    assert!(err < 0.01 * (s.max - s.min), "max error {err}");
    // the loss is confined to the replicated borders; inside it is exact
    for y in 4..124 {
        for x in 4..124 {
            assert!((f.get(x, y) - back.get(x, y)).abs() < 1e-12);
        }
    }
}

#[test]
fn expand_shapes() {
    let f = ThermalFrame::filled(2, 2, 1.0).unwrap();
    assert!(expand(&f, 5, 5).is_err());
    assert_eq!(expand(&f, 3, 4).unwrap().dims(), (3, 4));
    let c = ThermalFrame::filled(32, 32, 12.5).unwrap();
    assert!(expand(&c, 64, 64)
        .unwrap()
        .data()
        .iter()
        .all(|&v| (v - 12.5).abs() < 1e-13));
}

#[test]
fn styrofoam_size_chain() {
    let chain: Vec<usize> = dims_chain(91, 91, 4).iter().map(|d| d.0).collect();
    assert_eq!(chain, [91, 46, 23, 12, 6]);
    let f = ThermalFrame::filled(128, 96, 0.0).unwrap();
    assert_eq!(reduce_n(&f, 4).unwrap().dims(), (8, 6));
}

fn projector(f: &ThermalFrame) -> ThermalFrame {
    expand(&reduce(f).unwrap(), f.width(), f.height()).unwrap()
}

/// Half a cosine period across `w` pixels, constant down the columns.
fn slow_cosine(w: usize, h: usize) -> ThermalFrame {
    ThermalFrame::from_fn(w, h, |x, _| (PI * x as f64 / (w - 1) as f64).cos()).unwrap()
}

#[test]
fn roundtrip_is_nearly_idempotent_on_band_limited_input() {
    let f = slow_cosine(4096, 4);
    let p1 = projector(&f);
    let p2 = projector(&p1);
    let norm = p1.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(max_abs_diff(p1.data(), p2.data()) < 1e-6 * norm);
}

#[test]
fn idempotence_defect_shrinks_quadratically_with_frequency() {
    let defect = |w: usize| {
        let p1 = projector(&slow_cosine(w, 4));
        max_abs_diff(p1.data(), projector(&p1).data())
    };
    let mut prev = defect(64);
    for w in [128, 256, 512] {
        let d = defect(w);
        // frequency halves (almost exactly) with each doubling of w
        let ratio = prev / d;
        assert!((3.6..4.4).contains(&ratio), "w {w}: ratio {ratio}");
        prev = d;
    }
}

#[test]
fn constants_and_interior_affine_fields_are_fixed_points() {
    let c = ThermalFrame::filled(37, 20, -4.0).unwrap();
    assert!(projector(&c).data().iter().all(|&v| (v + 4.0).abs() < 1e-13));
    let a = ThermalFrame::from_fn(40, 40, |x, y| 3.0 - 0.2 * x as f64 + 0.7 * y as f64).unwrap();
    let p = projector(&a);
    for y in 4..36 {
        for x in 4..36 {
            assert!((p.get(x, y) - a.get(x, y)).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn dims_follow_ceil_halving(w in 2usize..1000, h in 2usize..1000, levels in 0usize..6) {
        let chain = dims_chain(w, h, levels);
        let mut f = ThermalFrame::filled(w, h, 1.0).unwrap();
        let mut expect = (w, h);
        for (i, &d) in chain.iter().enumerate() {
            prop_assert_eq!(d, expect);
            prop_assert_eq!(f.dims(), expect);
            if i < levels {
                if f.width() < 2 || f.height() < 2 {
                    prop_assert!(reduce(&f).is_err());
                    break;
                }
                f = reduce(&f).unwrap();
                expect = (expect.0.div_ceil(2), expect.1.div_ceil(2));
            }
        }
    }

    #[test]
    fn reduce_keeps_the_mean(w in 48usize..160, h in 48usize..160, seed in any::<u64>()) {
        let f = random_frame(&mut rng(seed), w, h, 10.0, 40.0);
        let s = frame_stats(&f);
        let m = frame_stats(&reduce(&f).unwrap()).mean;
        prop_assert!((m - s.mean).abs() < 0.01 * s.std, "{} vs {}", m, s.mean);
    }

    #[test]
    fn expand_n_restores_level_zero_dims(w in 16usize..300, h in 16usize..300, levels in 0usize..5) {
        let f = ThermalFrame::filled(w, h, 2.0).unwrap();
        let r = reduce_n(&f, levels).unwrap();
        let e = expand_n(&r, levels, w, h).unwrap();
        prop_assert_eq!(e.dims(), (w, h));
        prop_assert!(e.data().iter().all(|&v| (v - 2.0).abs() < 1e-12));
    }
}
