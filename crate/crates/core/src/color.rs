//! Color-space conversions: BT.601 luma, sRGB ↔ CIE L\*a\*b\* (D65) and
//! RGB ↔ HSI.

use libm::{acos, cbrt, cos, pow, round, sqrt};

use crate::image::{GrayImage, Hsi, HsiImage, Lab, LabImage, RgbImage};

const DEG: f64 = core::f64::consts::PI / 180.0;

/// D65 reference white in XYZ.
const WHITE: [f64; 3] = [0.950_47, 1.0, 1.088_83];

const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.412_456_4, 0.357_576_1, 0.180_437_5],
    [0.212_672_9, 0.715_152_2, 0.072_175_0],
    [0.019_333_9, 0.119_192_0, 0.950_304_1],
];

const XYZ_TO_RGB: [[f64; 3]; 3] = [
    [3.240_454_2, -1.537_138_5, -0.498_531_4],
    [-0.969_266_0, 1.876_010_8, 0.041_556_0],
    [0.055_643_4, -0.204_025_9, 1.057_225_2],
];

#[inline]
pub(crate) fn to_u8(v: f64) -> u8 {
    round(v).clamp(0.0, 255.0) as u8
}

/// `round(0.299 R + 0.587 G + 0.114 B)`.
#[inline]
pub fn luma(rgb: [u8; 3]) -> u8 {
    let [r, g, b] = rgb.map(f64::from);
    to_u8(0.299 * r + 0.587 * g + 0.114 * b)
}

pub fn to_gray(img: &RgbImage) -> GrayImage {
    img.map(|&p| luma(p))
}

fn srgb_to_linear(c: f64) -> f64 {
    if c <= 0.040_45 {
        c / 12.92
    } else {
        pow((c + 0.055) / 1.055, 2.4)
    }
}

fn linear_to_srgb(c: f64) -> f64 {
    if c <= 0.003_130_8 {
        12.92 * c
    } else {
        1.055 * pow(c, 1.0 / 2.4) - 0.055
    }
}

fn mat_mul(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

const EPS_T: f64 = 6.0 / 29.0;

fn lab_f(t: f64) -> f64 {
    if t > EPS_T * EPS_T * EPS_T {
        cbrt(t)
    } else {
        t / (3.0 * EPS_T * EPS_T) + 4.0 / 29.0
    }
}

fn lab_f_inv(t: f64) -> f64 {
    if t > EPS_T {
        t * t * t
    } else {
        3.0 * EPS_T * EPS_T * (t - 4.0 / 29.0)
    }
}

pub fn rgb_pixel_to_lab(rgb: [u8; 3]) -> Lab {
    let lin = rgb.map(|c| srgb_to_linear(f64::from(c) / 255.0));
    let xyz = mat_mul(&RGB_TO_XYZ, lin);
    let fx = lab_f(xyz[0] / WHITE[0]);
    let fy = lab_f(xyz[1] / WHITE[1]);
    let fz = lab_f(xyz[2] / WHITE[2]);
    Lab {
        l: (116.0 * fy - 16.0).clamp(0.0, 100.0),
        a: 500.0 * (fx - fy),
        b: 200.0 * (fy - fz),
    }
}

/// Inverse of [`rgb_pixel_to_lab`]; out-of-gamut colors are clamped.
pub fn lab_pixel_to_rgb(lab: Lab) -> [u8; 3] {
    let fy = (lab.l + 16.0) / 116.0;
    let fx = fy + lab.a / 500.0;
    let fz = fy - lab.b / 200.0;
    let xyz = [
        WHITE[0] * lab_f_inv(fx),
        WHITE[1] * lab_f_inv(fy),
        WHITE[2] * lab_f_inv(fz),
    ];
    mat_mul(&XYZ_TO_RGB, xyz).map(|c| to_u8(255.0 * linear_to_srgb(c.clamp(0.0, 1.0))))
}

pub fn rgb_to_lab(img: &RgbImage) -> LabImage {
    img.map(|&p| rgb_pixel_to_lab(p))
}

pub fn lab_to_rgb(img: &LabImage) -> RgbImage {
    img.map(|&p| lab_pixel_to_rgb(p))
}

/// Geometric HSI. Achromatic pixels (all channels equal) get `h = 0, s = 0`.
pub fn rgb_pixel_to_hsi(rgb: [u8; 3]) -> Hsi {
    let [r, g, b] = rgb.map(|c| f64::from(c) / 255.0);
    let i = (r + g + b) / 3.0;
    let min = r.min(g).min(b);
    if rgb[0] == rgb[1] && rgb[1] == rgb[2] {
        return Hsi { h: 0.0, s: 0.0, i };
    }
    let s = (1.0 - min / i).clamp(0.0, 1.0);
    let num = 0.5 * ((r - g) + (r - b));
    let den = sqrt((r - g) * (r - g) + (r - b) * (g - b));
    let theta = acos((num / den).clamp(-1.0, 1.0)) / DEG;
    let mut h = if b > g { 360.0 - theta } else { theta };
    if h >= 360.0 {
        h -= 360.0;
    }
    Hsi { h, s, i }
}

pub fn hsi_pixel_to_rgb(p: Hsi) -> [u8; 3] {
    let Hsi { h, s, i } = p;
    // Within a 120° sector: the trailing channel is i(1 - s), the leading one
    // follows the cosine ratio and the middle one closes the sum 3i.
    let sector = |h: f64| {
        let low = i * (1.0 - s);
        let lead = i * (1.0 + s * cos(h * DEG) / cos((60.0 - h) * DEG));
        (lead, 3.0 * i - (lead + low), low)
    };
    let h = libm::fmod(h, 360.0);
    let h = if h < 0.0 { h + 360.0 } else { h };
    let (r, g, b) = if h < 120.0 {
        let (r, g, b) = sector(h);
        (r, g, b)
    } else if h < 240.0 {
        let (g, b, r) = sector(h - 120.0);
        (r, g, b)
    } else {
        let (b, r, g) = sector(h - 240.0);
        (r, g, b)
    };
    [r, g, b].map(|c| to_u8(255.0 * c))
}

pub fn rgb_to_hsi(img: &RgbImage) -> HsiImage {
    img.map(|&p| rgb_pixel_to_hsi(p))
}

pub fn hsi_to_rgb(img: &HsiImage) -> RgbImage {
    img.map(|&p| hsi_pixel_to_rgb(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Raster;

    fn max_dev(a: [u8; 3], b: [u8; 3]) -> u8 {
        (0..3).map(|k| a[k].abs_diff(b[k])).max().unwrap()
    }

    #[test]
    fn luma_examples() {
        assert_eq!(luma([255, 255, 255]), 255);
        assert_eq!(luma([0, 0, 0]), 0);
        // 0.299 * 255 = 76.245
        assert_eq!(luma([255, 0, 0]), 76);
    }

    #[test]
    fn gray_replication_is_idempotent() {
        for v in 0..=255u8 {
            assert_eq!(luma([v, v, v]), v);
        }
        let g = Raster::from_fn(16, 16, |x, y| (x * 16 + y) as u8).unwrap();
        assert_eq!(to_gray(&g.to_rgb()), g);
    }

    #[test]
    fn lab_anchors() {
        let w = rgb_pixel_to_lab([255, 255, 255]);
        assert!(
            (w.l - 100.0).abs() < 1e-3 && w.a.abs() < 1e-2 && w.b.abs() < 1e-2,
            "{w:?}"
        );
        let k = rgb_pixel_to_lab([0, 0, 0]);
        assert_eq!(k.l, 0.0);
    }

    #[test]
    fn lab_round_trip_strided_sweep() {
        for r in (0..=255u8).step_by(5) {
            for g in (0..=255u8).step_by(3) {
                for b in (0..=255u8).step_by(7) {
                    let p = [r, g, b];
                    assert!(
                        max_dev(lab_pixel_to_rgb(rgb_pixel_to_lab(p)), p) <= 1,
                        "{p:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn hsi_anchors() {
        let gray = rgb_pixel_to_hsi([128, 128, 128]);
        assert_eq!((gray.h, gray.s), (0.0, 0.0));
        assert!((gray.i - 128.0 / 255.0).abs() < 1e-12);

        let red = rgb_pixel_to_hsi([255, 0, 0]);
        assert!(red.h.abs() < 1e-9);
        assert!((red.s - 1.0).abs() < 1e-12);
        assert!((red.i - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn hsi_hue_range() {
        for p in [
            [255, 0, 1],
            [0, 255, 0],
            [0, 0, 255],
            [10, 200, 30],
            [200, 10, 30],
        ] {
            let h = rgb_pixel_to_hsi(p).h;
            assert!((0.0..360.0).contains(&h), "{p:?} -> {h}");
        }
        assert!((rgb_pixel_to_hsi([0, 255, 0]).h - 120.0).abs() < 1e-9);
        assert!((rgb_pixel_to_hsi([0, 0, 255]).h - 240.0).abs() < 1e-9);
    }

    #[test]
    fn hsi_round_trip_strided_sweep() {
        for r in (0..=255u8).step_by(3) {
            for g in (0..=255u8).step_by(5) {
                for b in (0..=255u8).step_by(2) {
                    let p = [r, g, b];
                    assert!(
                        max_dev(hsi_pixel_to_rgb(rgb_pixel_to_hsi(p)), p) <= 1,
                        "{p:?}"
                    );
                }
            }
        }
    }
}
