use spotseg::experiment::{ExperimentSpec, Inference, Postprocessing};
use spotseg::synth::{make_synthetic, SynthParams};
use spotseg_core::color::to_gray;
use spotseg_core::eval::{confusion, efficiency};
use spotseg_core::inference::brute_force;
use spotseg_core::mrf::{build_energy, total_energy, EnergyModel};

#[test]
fn white_disks_on_black_are_found() {
    let p = SynthParams {
        spot_color: [255, 255, 255],
        background: [0, 0, 0],
        ..Default::default()
    };
    let spec = ExperimentSpec {
        inference: Inference::Graphcut,
        lambda: 50,
        ..Default::default()
    };
    for s in make_synthetic(4, &p, 8).unwrap() {
        let seg = spotseg::segment_image(&s.image, &spec).unwrap();
        assert_eq!(seg.mask.dims(), s.image.dims());
        assert!(efficiency(&confusion(&seg.mask, &s.gt).unwrap()) >= 99.0);
    }
}

#[test]
fn contours_do_not_hurt_color_energy() {
    let p = SynthParams {
        spot_falloff: 0.5,
        noise_sigma: 6.0,
        ..Default::default()
    };
    let corpus = make_synthetic(8, &p, 12).unwrap();
    let f3 = ExperimentSpec {
        energy_function: spotseg_core::mrf::EnergyFunction::Color,
        ..Default::default()
    };
    let f3c = ExperimentSpec {
        postprocessing: Postprocessing::ActiveContours,
        ..f3
    };
    let mean = |spec: &ExperimentSpec| {
        corpus
            .iter()
            .map(|s| {
                efficiency(
                    &confusion(&spotseg::segment_image(&s.image, spec).unwrap().mask, &s.gt)
                        .unwrap(),
                )
            })
            .sum::<f64>()
            / corpus.len() as f64
    };
    let (plain, refined) = (mean(&f3), mean(&f3c));
    assert!(refined >= plain, "{refined} < {plain}");
}

#[test]
fn graphcut_segmentation_is_optimal_on_crops() {
    let s = &make_synthetic(
        1,
        &SynthParams {
            noise_sigma: 25.0,
            ..Default::default()
        },
        2,
    )
    .unwrap()[0];
    let spec = ExperimentSpec {
        inference: Inference::Graphcut,
        ..Default::default()
    };
    for (x0, y0) in [(0, 0), (100, 37), (252, 252), (60, 200)] {
        let img = s.image.crop(x0, y0, 4, 4).unwrap();
        let seg = spotseg::segment_image(&img, &spec).unwrap();
        let model: EnergyModel = build_energy(
            &img,
            &to_gray(&img),
            spec.energy_function,
            spec.lambda,
            spec.level_rule,
        )
        .unwrap();
        let best = total_energy(&model, &brute_force(&model).unwrap()).unwrap();
        assert_eq!(total_energy(&model, &seg.mask).unwrap(), best);
        assert_eq!(seg.energy, best);
    }
}
