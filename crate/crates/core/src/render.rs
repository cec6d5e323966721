//! PNG heat maps with optional isolines.

use crate::error::{Error, Result};
use image::{Rgb, RgbImage};
use std::path::Path;

#[derive(Debug, Clone, Copy)]
pub(crate) enum Palette {
    /// Dark to bright over `[0, max]`.
    Sequential { max: f64 },
    /// Blue through white to red over `[-limit, limit]`.
    Diverging { limit: f64 },
}

const MISSING: Rgb<u8> = Rgb([128, 128, 128]);

const SEQUENTIAL: [[f64; 3]; 5] = [
    [0.0, 0.0, 4.0],
    [87.0, 16.0, 110.0],
    [188.0, 55.0, 84.0],
    [249.0, 142.0, 9.0],
    [252.0, 255.0, 164.0],
];

const DIVERGING: [[f64; 3]; 3] = [[33.0, 102.0, 172.0], [247.0, 247.0, 247.0], [178.0, 24.0, 43.0]];

fn ramp(stops: &[[f64; 3]], t: f64) -> Rgb<u8> {
    let t = t.clamp(0.0, 1.0) * (stops.len() - 1) as f64;
    let i = (t.floor() as usize).min(stops.len() - 2);
    let f = t - i as f64;
    let c = |k: usize| (stops[i][k] + f * (stops[i + 1][k] - stops[i][k])).round() as u8;
    Rgb([c(0), c(1), c(2)])
}

impl Palette {
    fn color(self, v: f64) -> Rgb<u8> {
        match self {
            Palette::Sequential { max } => ramp(&SEQUENTIAL, if max > 0.0 { v / max } else { 0.0 }),
            Palette::Diverging { limit } => {
                ramp(&DIVERGING, if limit > 0.0 { 0.5 + 0.5 * v / limit } else { 0.5 })
            }
        }
    }
}

/// Family of contour levels drawn in one color.
#[derive(Debug, Clone)]
pub(crate) struct Isolines {
    pub levels: Vec<f64>,
    pub color: Rgb<u8>,
}

impl Isolines {
    /// Every multiple of `step` inside `[-limit, limit]`, zero excluded.
    pub fn multiples(step: f64, limit: f64, color: Rgb<u8>) -> Self {
        let n = (limit / step).floor() as i64;
        let levels = (-n..=n).filter(|&k| k != 0).map(|k| k as f64 * step).collect();
        Self { levels, color }
    }
}

/// Row-major scalar field; row 0 is drawn at the bottom.
pub(crate) struct Field<'a> {
    pub rows: usize,
    pub cols: usize,
    pub values: &'a [Option<f64>],
}

impl Field<'_> {
    /// Bilinear sample at fractional grid coordinates.
    fn sample(&self, r: f64, c: f64) -> Option<f64> {
        let r0 = (r.floor() as usize).min(self.rows.saturating_sub(2));
        let c0 = (c.floor() as usize).min(self.cols.saturating_sub(2));
        let r1 = (r0 + 1).min(self.rows - 1);
        let c1 = (c0 + 1).min(self.cols - 1);
        let (fr, fc) = ((r - r0 as f64).clamp(0.0, 1.0), (c - c0 as f64).clamp(0.0, 1.0));
        let at = |i: usize, j: usize| self.values[i * self.cols + j];
        let (a, b, c, d) = (at(r0, c0)?, at(r0, c1)?, at(r1, c0)?, at(r1, c1)?);
        Some((1.0 - fr) * ((1.0 - fc) * a + fc * b) + fr * ((1.0 - fc) * c + fc * d))
    }
}

/// Writes `field` as a `width x height` PNG.
pub(crate) fn write_png(
    path: &Path,
    field: &Field<'_>,
    width: u32,
    height: u32,
    palette: Palette,
    isolines: &[Isolines],
) -> Result<()> {
    if field.rows < 2 || field.cols < 2 || field.values.len() != field.rows * field.cols {
        return Err(Error::Image(format!("cannot render a {}x{} field", field.rows, field.cols)));
    }
    let (w, h) = (width as usize, height as usize);
    let mut grid = vec![None; w * h];
    for py in 0..h {
        let r = (h - 1 - py) as f64 * (field.rows - 1) as f64 / (h - 1).max(1) as f64;
        for px in 0..w {
            let c = px as f64 * (field.cols - 1) as f64 / (w - 1).max(1) as f64;
            grid[py * w + px] = field.sample(r, c);
        }
    }
    let mut img = RgbImage::new(width, height);
    for (i, px) in img.pixels_mut().enumerate() {
        *px = grid[i].map_or(MISSING, |v| palette.color(v));
    }
    for family in isolines {
        for &level in &family.levels {
            for py in 0..h {
                for px in 0..w {
                    let Some(v) = grid[py * w + px] else { continue };
                    let above = v >= level;
                    let crosses = |q: usize| grid[q].is_some_and(|u| (u >= level) != above);
                    if (px + 1 < w && crosses(py * w + px + 1)) || (py + 1 < h && crosses((py + 1) * w + px)) {
                        img.put_pixel(px as u32, py as u32, family.color);
                    }
                }
            }
        }
    }
    img.save(path).map_err(|e| Error::Image(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn palette_end_points() {
        let p = Palette::Diverging { limit: 2.0 };
        assert_eq!(p.color(0.0), Rgb([247, 247, 247]));
        assert_eq!(p.color(-5.0), Rgb([33, 102, 172]));
        let s = Palette::Sequential { max: 1.0 };
        assert_eq!(s.color(1.0), Rgb([252, 255, 164]));
    }

    #[test]
    fn isoline_levels() {
        let iso = Isolines::multiples(0.2, 0.5, Rgb([0, 0, 0]));
        assert_eq!(iso.levels.len(), 4);
        assert!((iso.levels[0] + 0.4).abs() < 1e-15);
    }

    #[test]
    fn writes_a_png() {
        let dir = tempfile::tempdir().unwrap();
        let values: Vec<Option<f64>> = (0..12).map(|k| if k == 5 { None } else { Some(k as f64 - 6.0) }).collect();
        let field = Field {
            rows: 3,
            cols: 4,
            values: &values,
        };
        let path = dir.path().join("x.png");
        let iso = [Isolines::multiples(2.0, 6.0, Rgb([0, 0, 0]))];
        write_png(&path, &field, 40, 30, Palette::Diverging { limit: 6.0 }, &iso).unwrap();
        let img = image::open(&path).unwrap();
        assert_eq!((img.width(), img.height()), (40, 30));
    }
}
