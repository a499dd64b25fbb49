use crate::{quantize, Image};

/// Reflects an integer coordinate into [0, n) by mirroring across the
/// borders without repeating the edge sample (..., 2, 1, 0, 1, 2, ...).
#[inline]
pub(crate) fn reflect(coord: i64, n: u32) -> u32 {
    let n = n as i64;
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    let mut r = coord.rem_euclid(period);
    if r >= n {
        r = period - r;
    }
    r as u32
}

/// Bilinear sample at real coordinates with reflect borders.
///
/// Integer coordinates return the exact pixel; everything else is a convex
/// combination of the four lattice neighbors. Returns one value per channel.
pub fn sample_bilinear(img: &Image, x: f64, y: f64) -> [f64; 3] {
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let x0 = x0 as i64;
    let y0 = y0 as i64;

    let xs = [reflect(x0, img.width()), reflect(x0 + 1, img.width())];
    let ys = [reflect(y0, img.height()), reflect(y0 + 1, img.height())];
    let w = [(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy), (1.0 - fx) * fy, fx * fy];

    let mut out = [0.0f64; 3];
    for c in 0..img.channels() {
        let v00 = img.get(xs[0], ys[0], c) as f64;
        let v10 = img.get(xs[1], ys[0], c) as f64;
        let v01 = img.get(xs[0], ys[1], c) as f64;
        let v11 = img.get(xs[1], ys[1], c) as f64;
        out[c as usize] = w[0] * v00 + w[1] * v10 + w[2] * v01 + w[3] * v11;
    }
    out
}

/// Warp: for every output pixel, `map` yields the source coordinates to
/// sample bilinearly (inverse mapping, reflect border).
pub fn warp_bilinear<F>(img: &Image, out_w: u32, out_h: u32, mut map: F) -> Image
where
    F: FnMut(u32, u32) -> (f64, f64),
{
    let ch = img.channels();
    let mut samples = vec![0u8; out_w as usize * out_h as usize * ch as usize];
    let mut i = 0;
    for y in 0..out_h {
        for x in 0..out_w {
            let (sx, sy) = map(x, y);
            let vals = sample_bilinear(img, sx, sy);
            for c in 0..ch {
                samples[i] = quantize(vals[c as usize]);
                i += 1;
            }
        }
    }
    Image::new(out_w, out_h, ch, samples).expect("warp output geometry is valid")
}

/// Bilinear resize with half-pixel centers: destination pixel (x, y) samples
/// the source at ((x + 0.5)·w/w' − 0.5, (y + 0.5)·h/h' − 0.5). Identity when
/// the sizes match.
pub fn resize_bilinear(img: &Image, out_w: u32, out_h: u32) -> Image {
    let sx = img.width() as f64 / out_w as f64;
    let sy = img.height() as f64 / out_h as f64;
    warp_bilinear(img, out_w, out_h, |x, y| {
        ((x as f64 + 0.5) * sx - 0.5, (y as f64 + 0.5) * sy - 0.5)
    })
}
