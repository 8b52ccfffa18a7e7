use fspi::metrics::ssim_default;
use fspi::{scenes, Image};
use fspi_web::{fusion, rgba, Stego};

fn gray(bytes: &[u8], n: usize) -> Image {
    Image::new(n, n, bytes.chunks(4).map(|p| p[0] as f64).collect()).unwrap()
}

#[test]
fn only_the_right_key_reveals_the_watermark() {
    let n = 32;
    let mut demo = Stego::new("peppers", "animal", n, 19, 11).unwrap();
    let truth = gray(&rgba(&scenes::animal(n)), n);
    demo.decode(None, 0, 11).unwrap();
    let right = ssim_default(&gray(&demo.watermark(), n), &truth).unwrap();
    demo.decode(None, 0, 12).unwrap();
    let wrong = ssim_default(&gray(&demo.watermark(), n), &truth).unwrap();
    assert!(right > wrong + 0.2, "right {right} wrong {wrong}");
}

#[test]
fn large_dc_pushes_the_fusion_toward_the_host() {
    let n = 32;
    let host = gray(&rgba(&scenes::peppers(n)), n);
    let near = ssim_default(&gray(&fusion("peppers", "logo", n, 0.0).unwrap(), n), &host).unwrap();
    let far = ssim_default(&gray(&fusion("peppers", "logo", n, 5.0).unwrap(), n), &host).unwrap();
    assert!(far > near, "dc 0: {near}, dc 5: {far}");
}
