use proptest::prelude::*;
use spotseg_core::contours::{refine, refine_per_region, SnakeConfig};
use spotseg_core::{GrayImage, LabelMask};

fn cfg(bias: f64, iterations: usize, smoothing: usize) -> SnakeConfig {
    SnakeConfig {
        contraction_bias: bias,
        max_iterations: iterations,
        smoothing_passes: smoothing,
    }
}

fn seed_strategy() -> impl Strategy<Value = LabelMask> {
    prop::collection::vec(prop::bool::weighted(0.3), 16 * 12)
        .prop_map(|b| LabelMask::new(16, 12, b).unwrap())
}

fn subset(a: &LabelMask, b: &LabelMask) -> bool {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .all(|(&a, &b)| !a || b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn featureless_images_move_one_way(seed in seed_strategy(), level in any::<u8>(), bias in 0.05f64..=1.0, smoothing in 0usize..3) {
        let g = GrayImage::filled(16, 12, level).unwrap();
        for evolve in [refine, refine_per_region] {
            let shrunk = evolve(&g, &seed, &cfg(bias, 20, smoothing)).unwrap();
            prop_assert!(subset(&shrunk, &seed));
            let grown = evolve(&g, &seed, &cfg(-bias, 20, smoothing)).unwrap();
            prop_assert!(subset(&seed, &grown));
            prop_assert_eq!(grown.dims(), seed.dims());
        }
    }

    #[test]
    fn step_edges_are_fixed_points(cut in 1usize..15, lo in 0u8..100, hi in 150u8..=255, vertical in any::<bool>()) {
        let m = LabelMask::from_fn(16, 16, |x, y| if vertical { y >= cut } else { x >= cut }).unwrap();
        let g = m.map(|&b| if b { hi } else { lo });
        prop_assert_eq!(refine(&g, &m, &cfg(0.0, 50, 0)).unwrap(), m.clone());
        prop_assert_eq!(refine_per_region(&g, &m, &cfg(0.0, 50, 0)).unwrap(), m);
    }

    #[test]
    fn isolated_pixels_vanish_without_expansion(x in 1usize..15, y in 1usize..11, level in 0u8..60, bias in 0.0f64..=1.0) {
        let g = GrayImage::filled(16, 12, level).unwrap();
        let mut seed = LabelMask::filled(16, 12, false).unwrap();
        *seed.get_mut(x, y) = true;
        prop_assert_eq!(refine(&g, &seed, &SnakeConfig { contraction_bias: bias, ..Default::default() }).unwrap().count_foreground(), 0);
    }
}

#[test]
fn under_segmented_disk_is_recovered() {
    let (w, h) = (48, 48);
    let d = LabelMask::from_fn(w, h, |x, y| {
        (x as f64 - 24.0).powi(2) + (y as f64 - 24.0).powi(2) <= 100.0
    })
    .unwrap();
    // Bright core, dimmer rim, dark background.
    let g = GrayImage::from_fn(w, h, |x, y| {
        let r2 = (x as f64 - 24.0).powi(2) + (y as f64 - 24.0).powi(2);
        if r2 <= 25.0 {
            200
        } else if r2 <= 100.0 {
            120
        } else {
            40
        }
    })
    .unwrap();
    let core = g.map(|&v| v == 200);
    let out = refine_per_region(&g, &core, &SnakeConfig::default()).unwrap();
    assert_eq!(out, d);
}
