//! Every serialized artifact parses back to what was written, and the parsed
//! artifacts still drive the pipelines.

use fspi::detector::{measure, MeasurementSequence, NoiseModel, TvSignal};
use fspi::dewatermark::{divide_dewatermark, FilterRegion, DEFAULT_EPSILON};
use fspi::illumination::{build_plan, build_random_plan, AcquisitionPlan, Mode, PatternParams, Sampling};
use fspi::metrics::{compare, MetricOptions};
use fspi::recon::{assemble_spectrum, reconstruct_plan, SpectrumGrid};
use fspi::scenes;
use fspi::stego::{build_mask, default_mapping, extract_weights, stego_weights, FrequencyMapping};
use fspi::watermark::{watermark_tv, PermutationKey};

#[test]
fn plans_round_trip_in_every_mode() {
    let params = PatternParams::new(8, 8);
    let mut plans = vec![build_random_plan(params, 50, 9).unwrap()];
    for mode in [Mode::FourStepSinusoid, Mode::ThreeStepSinusoid, Mode::SinusoidOrthogonal, Mode::HadamardDiff] {
        plans.push(build_plan(mode, params, Sampling::Full).unwrap());
    }
    plans.push(build_plan(Mode::FourStepSinusoid, params, Sampling::HalfSpectrum).unwrap());
    plans.push(build_plan(Mode::FourStepSinusoid, params, Sampling::LowFrequency(0.3)).unwrap());
    for plan in plans {
        assert_eq!(AcquisitionPlan::from_text(&plan.to_text()).unwrap(), plan, "{}", plan.mode);
    }
}

#[test]
fn parsed_files_reproduce_the_division_pipeline() {
    let n = 16;
    let scene = scenes::landscape(n);
    let plan = build_plan(Mode::FourStepSinusoid, PatternParams::new(n, n), Sampling::Full).unwrap();
    let tv = watermark_tv(&scenes::text_logo(n), &plan, 0.3).unwrap();
    let seq = measure(&scene, &plan, Some(&tv), &NoiseModel::gaussian(40.0, 2)).unwrap();

    let plan2 = AcquisitionPlan::from_text(&plan.to_text()).unwrap();
    let seq2 = MeasurementSequence::from_csv(&seq.to_csv()).unwrap();
    let tv2 = TvSignal::from_csv(&tv.to_csv()).unwrap();
    assert_eq!(seq2.values, seq.values);
    assert_eq!(tv2.weights, tv.weights);
    assert_eq!(tv2.k2, tv.k2);

    let a = reconstruct_plan(&divide_dewatermark(&seq, &tv, DEFAULT_EPSILON).unwrap(), &plan).unwrap();
    let b = reconstruct_plan(&divide_dewatermark(&seq2, &tv2, DEFAULT_EPSILON).unwrap(), &plan2).unwrap();
    assert_eq!(a, b);
}

#[test]
fn spectrum_csv_round_trips() {
    let n = 8;
    let plan = build_plan(Mode::FourStepSinusoid, PatternParams::new(n, n), Sampling::HalfSpectrum).unwrap();
    let spec = assemble_spectrum(&measure(&scenes::phantom(n), &plan, None, &NoiseModel::none()).unwrap(), &plan).unwrap();
    let back = SpectrumGrid::from_csv(&spec.to_csv()).unwrap();
    assert_eq!(back, spec);
    assert_eq!(spec.pseudo_color_rgb().len(), n * n * 3);
}

#[test]
fn mapping_csv_is_a_working_key() {
    let (n, m) = (24, 16);
    let host = scenes::peppers(n);
    let mark = scenes::animal(m);
    let plan = build_plan(Mode::FourStepSinusoid, PatternParams::new(n, n), Sampling::Full).unwrap();
    let mapping = default_mapping(&build_mask(n, n, 11).unwrap(), m, m, Some(3)).unwrap();
    let tv = stego_weights(&mark, &mapping, &plan).unwrap();
    let mapping = mapping.with_norm(tv.norm);
    let parsed = FrequencyMapping::from_csv(&mapping.to_csv()).unwrap();
    assert_eq!(parsed, mapping);
    let seq = measure(&host, &plan, Some(&tv), &NoiseModel::none()).unwrap();
    assert_eq!(
        extract_weights(&seq, &parsed, &plan, None).unwrap(),
        extract_weights(&seq, &mapping, &plan, None).unwrap()
    );
}

#[test]
fn region_and_key_text_round_trip() {
    for region in [
        FilterRegion::half_u(12, 10),
        FilterRegion::low_frequency(12, 10, 0.25).unwrap(),
        FilterRegion::empty(5, 3),
    ] {
        assert_eq!(FilterRegion::from_rle(&region.to_rle()).unwrap(), region);
    }
    let key = PermutationKey::new(77, 64);
    assert_eq!(PermutationKey::from_text(&key.to_text()).unwrap(), key);
}

#[test]
fn metric_report_json_has_the_inf_sentinel() {
    let img = scenes::resolution_chart(16);
    let report = compare(&img, &img, "a", "b", &MetricOptions::default()).unwrap();
    let json = report.to_json();
    assert!(json.contains("\"psnr_db\":\"inf\""), "{json}");
    assert!(json.contains("\"ssim\":1"), "{json}");
}
