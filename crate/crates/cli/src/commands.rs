use anyhow::{bail, Context, Result};
use fspi::detector::{apply_noise, measure, MeasurementSequence, NoiseModel, SignalLevel, TvSignal};
use fspi::dewatermark::{divide_dewatermark, filter_dewatermark, region_watermark_tv, FilterRegion, DEFAULT_EPSILON};
use fspi::experiments::{
    fraction_csv, mean_std, rows_to_csv, sampling_sweep, summary_csv, tv_length_sweep, visible_noise_sweep,
    NoisePipeline, StegoSetup, SweepRow, VisibleSetup,
};
use fspi::illumination::{build_plan, build_random_plan, AcquisitionPlan, Mode, PatternParams, Sampling};
use fspi::metrics::{compare, quality, MetricOptions};
use fspi::recon::{
    assemble_spectrum, complete_symmetry, reconstruct, reconstruct_fused, reconstruct_plan, SpectrumGrid,
    SPECTRUM_COLORMAP_NAME,
};
use fspi::stego::{extract_watermark, extract_weights, reconstruct_watermark, FrequencyMapping};
use fspi::watermark::{embed_color, q_factor, watermark_tv};
use fspi::{ColorImage, Image};

use crate::config::Options;
use crate::io::{image_csv, load_color, load_gray, read_text, OutDir};

const DEFAULT_SCENE: &str = "synthetic:peppers";
const DEFAULT_MARK: &str = "synthetic:logo";
const DEFAULT_STEGO_MARK: &str = "synthetic:animal";

fn noise(opts: &Options) -> Result<NoiseModel> {
    let Some(snr) = opts.snr_db else {
        return Ok(NoiseModel::none());
    };
    Ok(NoiseModel::gaussian(snr, opts.seed()).with_reference(signal_level(opts)?))
}

fn signal_level(opts: &Options) -> Result<SignalLevel> {
    match opts.noise_reference.as_deref().unwrap_or("ac-rms") {
        "ac-rms" => Ok(SignalLevel::AcRms),
        "mean-abs" => Ok(SignalLevel::MeanAbs),
        other => bail!("unknown noise reference `{other}` (ac-rms, mean-abs)"),
    }
}

fn make_plan(opts: &Options, width: usize, height: usize) -> Result<AcquisitionPlan> {
    let mode: Mode = opts.mode.as_deref().unwrap_or("four-step").parse()?;
    let params = PatternParams::new(width, height);
    if mode == Mode::Random {
        let count = opts.patterns.unwrap_or(4 * width * height);
        return Ok(build_random_plan(params, count, opts.seed())?);
    }
    let sampling: Sampling = opts.sampling.as_deref().unwrap_or("full").parse()?;
    Ok(build_plan(mode, params, sampling)?)
}

/// Factor between a reconstruction and the reflectance, where fixed.
fn recon_gain(plan: &AcquisitionPlan) -> Option<f64> {
    let p = plan.params;
    match plan.mode {
        Mode::FourStepSinusoid => Some(2.0 * p.b),
        Mode::ThreeStepSinusoid => Some(3.0 * p.b),
        Mode::SinusoidOrthogonal => Some(p.b),
        Mode::HadamardDiff => Some(2.0 * p.a),
        Mode::Random => None,
    }
}

fn has_spectrum(plan: &AcquisitionPlan) -> bool {
    matches!(plan.mode, Mode::FourStepSinusoid | Mode::ThreeStepSinusoid)
}

fn region(spec: &str, width: usize, height: usize) -> Result<FilterRegion> {
    if let Some(path) = spec.strip_prefix("custom:") {
        let region = FilterRegion::from_rle(&read_text(path.as_ref())?)?;
        if (region.width, region.height) != (width, height) {
            bail!("region {path} is {}x{}, expected {width}x{height}", region.width, region.height);
        }
        return Ok(region);
    }
    Ok(FilterRegion::preset(spec, width, height)?)
}

fn write_spectrum(out: &mut OutDir, stem: &str, spec: &SpectrumGrid) -> Result<()> {
    out.text(&format!("{stem}.csv"), &spec.to_csv())?;
    out.rgb(&format!("{stem}.png"), spec.width(), spec.height(), &spec.pseudo_color_rgb())
}

fn write_image(out: &mut OutDir, stem: &str, img: &Image) -> Result<()> {
    out.text(&format!("{stem}.csv"), &image_csv(img))?;
    out.gray(&format!("{stem}.pgm"), img)
}

fn write_report(out: &mut OutDir, name: &str, reference: &Image, test: &Image, ids: (&str, &str)) -> Result<()> {
    let report = compare(reference, test, ids.0, ids.1, &MetricOptions::default())?;
    println!("{name}: psnr {} dB, ssim {}", report.psnr_db, report.ssim);
    out.text(name, &(report.to_json() + "\n"))
}

fn suffix(values: &[f64], v: f64) -> String {
    if values.len() > 1 {
        format!("_dc{v}")
    } else {
        String::new()
    }
}

pub fn acquire(opts: &Options) -> Result<OutDir> {
    let source = opts.scene.as_deref().unwrap_or(DEFAULT_SCENE);
    let scene = load_gray(source, opts.size())?;
    let plan = make_plan(opts, scene.width(), scene.height())?;
    let seq = measure(&scene, &plan, None, &noise(opts)?)?;
    let mut out = OutDir::create(opts.out_dir())?;
    out.text("plan.txt", &plan.to_text())?;
    out.text("measurements.csv", &seq.to_csv())?;
    if has_spectrum(&plan) {
        write_spectrum(&mut out, "spectrum", &assemble_spectrum(&seq, &plan)?)?;
        println!("spectrum colormap: {SPECTRUM_COLORMAP_NAME}");
    }
    let recon = reconstruct_plan(&seq, &plan)?;
    let recon = recon_gain(&plan).map_or(recon.clone(), |g| recon.scale(1.0 / g));
    write_image(&mut out, "recon", &recon)?;
    write_report(&mut out, "report.json", &scene, &recon, (source, "recon"))?;
    Ok(out)
}

pub fn embed(opts: &Options) -> Result<OutDir> {
    let scene = load_gray(opts.scene.as_deref().unwrap_or(DEFAULT_SCENE), opts.size())?;
    let mark = load_gray(opts.watermark.as_deref().unwrap_or(DEFAULT_MARK), opts.size())?;
    let plan = make_plan(opts, scene.width(), scene.height())?;
    let region = opts.region.as_deref().map(|r| region(r, scene.width(), scene.height())).transpose()?;
    let noise = noise(opts)?;
    let mut out = OutDir::create(opts.out_dir())?;
    out.text("plan.txt", &plan.to_text())?;
    let host = reconstruct_plan(&measure(&scene, &plan, None, &NoiseModel::none())?, &plan)?;
    write_image(&mut out, "host", &host)?;
    let dcs = opts.dc_offsets();
    for &dc in &dcs {
        let sfx = suffix(&dcs, dc);
        let tv = match &region {
            Some(r) => region_watermark_tv(&mark, &plan, dc, r)?,
            None => watermark_tv(&mark, &plan, dc)?,
        };
        let clean = measure(&scene, &plan, Some(&tv), &NoiseModel::none())?;
        let readings = apply_noise(&clean, &noise)?;
        let fused = reconstruct_fused(&readings, &plan)?;
        println!("dc {dc}: q {}, k2 {}", q_factor(&scene, &mark, dc, &plan.params)?, tv.k2);
        out.text(&format!("tv{sfx}.csv"), &tv.to_csv())?;
        out.text(&format!("measurements{sfx}.csv"), &readings.to_csv())?;
        if has_spectrum(&plan) {
            write_spectrum(&mut out, &format!("spectrum{sfx}"), &assemble_spectrum(&readings, &plan)?)?;
        }
        write_image(&mut out, &format!("fused{sfx}"), &fused)?;
        let reference = reconstruct_fused(&clean, &plan)?;
        write_report(&mut out, &format!("report{sfx}.json"), &reference, &fused, ("fused-noise-free", "fused"))?;
    }
    Ok(out)
}

fn load_readings(opts: &Options) -> Result<(AcquisitionPlan, MeasurementSequence)> {
    let plan = AcquisitionPlan::from_text(&read_text(Options::require(&opts.plan, "plan")?)?)
        .context("parsing plan")?;
    let path = Options::require(&opts.measurements, "measurements")?;
    let seq = MeasurementSequence::from_csv(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))?;
    seq.check_plan(&plan)?;
    Ok((plan, seq))
}

fn optional_reference(opts: &Options, size: usize) -> Result<Option<(String, Image)>> {
    match opts.reference.as_ref().or(opts.scene.as_ref()) {
        Some(src) => Ok(Some((src.clone(), load_gray(src, size)?))),
        None => Ok(None),
    }
}

pub fn dewatermark(opts: &Options) -> Result<OutDir> {
    let (plan, seq) = load_readings(opts)?;
    let (w, h) = (plan.params.width, plan.params.height);
    let method = opts.method.as_deref().unwrap_or(if opts.tv.is_some() { "divide" } else { "filter" });
    let mut out = OutDir::create(opts.out_dir())?;
    let recon = match method {
        "divide" => {
            let path = Options::require(&opts.tv, "tv")?;
            let tv = TvSignal::from_csv(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))?;
            let clean = divide_dewatermark(&seq, &tv, opts.epsilon.unwrap_or(DEFAULT_EPSILON))?;
            out.text("measurements.csv", &clean.to_csv())?;
            reconstruct_plan(&clean, &plan)?
        }
        "filter" => {
            if !has_spectrum(&plan) {
                bail!("filter de-watermarking needs a four-step or three-step plan, got {}", plan.mode);
            }
            let region = region(opts.filter.as_deref().unwrap_or("half-u"), w, h)?;
            let filtered = filter_dewatermark(&assemble_spectrum(&seq, &plan)?, &region)?;
            write_spectrum(&mut out, "spectrum", &filtered)?;
            out.text("region.rle", &region.to_rle())?;
            reconstruct(&complete_symmetry(&filtered))
        }
        other => bail!("unknown de-watermarking method `{other}` (divide, filter)"),
    };
    write_image(&mut out, "recon", &recon)?;
    if let Some((id, reference)) = optional_reference(opts, w)? {
        write_report(&mut out, "report.json", &reference, &recon, (&id, "recon"))?;
    }
    Ok(out)
}

fn default_r1(width: usize) -> usize {
    3 * width / 5
}

pub fn stego_embed(opts: &Options) -> Result<OutDir> {
    let host = load_gray(opts.scene.as_deref().unwrap_or(DEFAULT_SCENE), opts.size())?;
    let mark_size = opts.wm_size.unwrap_or(opts.size());
    let mark = load_gray(opts.watermark.as_deref().unwrap_or(DEFAULT_STEGO_MARK), mark_size)?;
    let r1 = opts.r1_side.unwrap_or(default_r1(host.width()));
    let setup = StegoSetup::new(&host, &mark, r1, opts.key_seed)?;
    let readings = apply_noise(&setup.clean, &noise(opts)?)?;
    println!(
        "r2 groups {}, watermark slots {}",
        setup.mask.count(fspi::stego::Region::R2),
        setup.mapping.assignments.len() / 4
    );
    let mut out = OutDir::create(opts.out_dir())?;
    out.text("plan.txt", &setup.plan.to_text())?;
    out.text("measurements.csv", &readings.to_csv())?;
    out.text("tv.csv", &setup.tv.to_csv())?;
    out.text("mapping.csv", &setup.mapping.to_csv())?;
    let decoded = setup.decode(&readings, &setup.mapping)?;
    write_image(&mut out, "host", &decoded.host)?;
    let plain = reconstruct_plan(&measure(&host, &setup.plan, None, &NoiseModel::none())?, &setup.plan)?;
    write_report(&mut out, "report.json", &plain, &decoded.host, ("host-unweighted", "host"))?;
    Ok(out)
}

pub fn stego_extract(opts: &Options) -> Result<OutDir> {
    let (plan, seq) = load_readings(opts)?;
    let path = Options::require(&opts.mapping, "mapping")?;
    let mapping = FrequencyMapping::from_csv(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let mut out = OutDir::create(opts.out_dir())?;
    let weights = extract_weights(&seq, &mapping, &plan, None)?;
    let mut csv = String::from("# recovered weights in mapping order\nindex,weight\n");
    for (i, w) in weights.iter().enumerate() {
        csv.push_str(&format!("{i},{w}\n"));
    }
    out.text("weights.csv", &csv)?;
    let spec = extract_watermark(&seq, &mapping, &plan, None)?;
    write_spectrum(&mut out, "watermark_spectrum", &spec)?;
    let mark = reconstruct_watermark(&spec);
    write_image(&mut out, "watermark", &mark)?;
    write_image(&mut out, "host", &reconstruct(&complete_symmetry(&assemble_spectrum(&seq, &plan)?)))?;
    if let Some(src) = &opts.reference {
        let reference = load_gray(src, mapping.wm_width)?;
        write_report(&mut out, "report.json", &reference, &mark, (src, "watermark"))?;
    }
    Ok(out)
}

/// Channels scaled together so relative color survives.
fn joint_rgb8(img: &ColorImage) -> Vec<u8> {
    let lo = img.channels.iter().map(Image::min).fold(f64::INFINITY, f64::min);
    let hi = img.channels.iter().map(Image::max).fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let [r, g, b] = img.channels.clone().map(|c| c.map(|v| (v - lo) / span));
    ColorImage::new(r, g, b).expect("same dims").to_rgb8()
}

fn luminance(img: &ColorImage) -> Result<Image> {
    let [r, g, b] = &img.channels;
    Ok(r.combine(1.0 / 3.0, g, 1.0 / 3.0)?.combine(1.0, b, 1.0 / 3.0)?)
}

pub fn color_embed(opts: &Options) -> Result<OutDir> {
    let scene = load_color(opts.scene.as_deref().unwrap_or("synthetic:color"), opts.size())?;
    let mark = load_color(opts.watermark.as_deref().unwrap_or("synthetic:color-mark"), opts.size())?;
    let dcs: [f64; 3] = match opts.dc_offsets().as_slice() {
        &[d] => [d; 3],
        &[r, g, b] => [r, g, b],
        other => bail!("color-embed takes one or three DC offsets, got {}", other.len()),
    };
    let plan = make_plan(opts, scene.width(), scene.height())?;
    let fused = embed_color(&scene, &mark, &plan, dcs, &noise(opts)?)?;
    let clean = embed_color(&scene, &mark, &plan, dcs, &NoiseModel::none())?;
    let mut out = OutDir::create(opts.out_dir())?;
    out.text("plan.txt", &plan.to_text())?;
    for (name, channel) in ["r", "g", "b"].iter().zip(&fused.channels) {
        out.text(&format!("fused_{name}.csv"), &image_csv(channel))?;
    }
    out.rgb("fused.ppm", fused.width(), fused.height(), &joint_rgb8(&fused))?;
    write_report(&mut out, "report.json", &luminance(&clean)?, &luminance(&fused)?, ("fused-noise-free", "fused"))?;
    Ok(out)
}

fn visible_setup(opts: &Options) -> Result<VisibleSetup> {
    let scene = load_gray(opts.scene.as_deref().unwrap_or(DEFAULT_SCENE), opts.size())?;
    let mark = load_gray(opts.watermark.as_deref().unwrap_or(DEFAULT_MARK), opts.size())?;
    let plan = make_plan(opts, scene.width(), scene.height())?;
    Ok(VisibleSetup::new(&scene, &mark, plan, opts.dc_offsets()[0])?)
}

fn default_snrs(from: f64) -> Vec<f64> {
    (0..).map(|i| from + 5.0 * i as f64).take_while(|&s| s <= 40.0).collect()
}

pub fn sweep_noise(opts: &Options) -> Result<OutDir> {
    let pipeline = opts.pipeline.as_deref().unwrap_or("watermark");
    let seeds = opts.seeds()?;
    let base = NoiseModel::gaussian(0.0, 0).with_reference(signal_level(opts)?);
    let mut out = OutDir::create(opts.out_dir())?;
    let visible = match pipeline {
        "watermark" => Some(NoisePipeline::Watermark),
        "dewatermark" => Some(NoisePipeline::Dewatermark),
        "stego" => None,
        other => bail!("unknown pipeline `{other}` (watermark, dewatermark, stego)"),
    };
    let snrs = opts.snr_sweep.clone().unwrap_or_else(|| default_snrs(if visible.is_some() { 10.0 } else { 0.0 }));
    if snrs.is_empty() {
        bail!("snr sweep is empty");
    }
    if let Some(kind) = visible {
        let rows = visible_noise_sweep(&visible_setup(opts)?, kind, &snrs, &seeds, base)?;
        let label = format!("{pipeline} image vs noise-free reference");
        out.text("sweep.csv", &rows_to_csv(&label, &rows))?;
        out.text("summary.csv", &summary_csv(&label, &rows))?;
        return Ok(out);
    }
    let host = load_gray(opts.scene.as_deref().unwrap_or(DEFAULT_SCENE), opts.size())?;
    let mark = load_gray(opts.watermark.as_deref().unwrap_or(DEFAULT_STEGO_MARK), opts.wm_size.unwrap_or(opts.size()))?;
    let setup = StegoSetup::new(&host, &mark, opts.r1_side.unwrap_or(default_r1(host.width())), opts.key_seed)?;
    let reference = setup.decode_clean()?;
    let (mut host_rows, mut mark_rows) = (Vec::new(), Vec::new());
    for &snr_db in &snrs {
        for &seed in &seeds {
            let decoded = setup.decode_noisy(&NoiseModel { snr_db, seed, ..base })?;
            let (p, s) = quality(&reference.host, &decoded.host)?;
            host_rows.push(SweepRow { snr_db, seed, psnr_db: p, ssim: s });
            let (p, s) = quality(&reference.watermark, &decoded.watermark)?;
            mark_rows.push(SweepRow { snr_db, seed, psnr_db: p, ssim: s });
        }
        let mean = |rows: &[SweepRow]| mean_std(&rows[rows.len() - seeds.len()..].iter().map(|r| r.ssim).collect::<Vec<_>>()).0;
        println!("snr {snr_db}: host ssim {}, watermark ssim {}", mean(&host_rows), mean(&mark_rows));
    }
    out.text("host_sweep.csv", &rows_to_csv("stego host vs noise-free decode", &host_rows))?;
    out.text("host_summary.csv", &summary_csv("stego host vs noise-free decode", &host_rows))?;
    out.text("watermark_sweep.csv", &rows_to_csv("extracted watermark vs noise-free decode", &mark_rows))?;
    out.text("watermark_summary.csv", &summary_csv("extracted watermark vs noise-free decode", &mark_rows))?;
    Ok(out)
}

pub fn sweep_sampling(opts: &Options) -> Result<OutDir> {
    let scene = load_gray(opts.scene.as_deref().unwrap_or(DEFAULT_SCENE), opts.size())?;
    let mark = load_gray(opts.watermark.as_deref().unwrap_or(DEFAULT_MARK), opts.size())?;
    let fractions = opts
        .q_sweep
        .clone()
        .unwrap_or_else(|| vec![0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]);
    let dc = opts.dc_offsets()[0];
    let mut out = OutDir::create(opts.out_dir())?;
    let rows = sampling_sweep(&scene, &mark, dc, &fractions)?;
    out.text("sampling.csv", &fraction_csv("fused ssim vs sampling fraction", "fraction", &rows))?;
    let rows = tv_length_sweep(&scene, &mark, dc, &fractions)?;
    out.text("tv_length.csv", &fraction_csv("fused ssim vs watermark signal length", "fraction", &rows))?;
    Ok(out)
}
