//! Text and image renders of edge colourings.
//!
//! The ASCII form draws each plaquette row as two text lines: the horizontal
//! edges above it and its vertical edges. Rows are printed top first so the
//! picture has the origin at the bottom-left.

use std::fmt::Write as _;

use crate::tiling::Assignment;

fn glyph(c: u16) -> char {
    std::char::from_digit(c as u32, 36).unwrap_or('?')
}

/// Renders `a`; vertices listed in `highlights` are drawn as `#`.
pub fn ascii(a: &Assignment, highlights: &[(usize, usize)]) -> String {
    let lat = &a.lattice;
    let mut out = String::new();
    for y in (0..=lat.height).rev() {
        for x in 0..=lat.width {
            out.push(if highlights.contains(&(x, y)) {
                '#'
            } else {
                '+'
            });
            if x < lat.width {
                out.push(glyph(a.h(x, y)));
            }
        }
        out.push('\n');
        if y > 0 {
            for x in 0..=lat.width {
                out.push(glyph(a.v(x, y - 1)));
                if x < lat.width {
                    out.push(' ');
                }
            }
            out.push('\n');
        }
    }
    out
}

/// Fixed palette; colour 0 is black.
pub const PALETTE: [[u8; 3]; 12] = [
    [0, 0, 0],
    [230, 25, 75],
    [60, 180, 75],
    [255, 225, 25],
    [0, 130, 200],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
    [210, 245, 60],
    [250, 190, 212],
    [0, 128, 128],
];

/// Binary PPM (P6). Each plaquette is `block` pixels wide; each edge is a
/// `block`-long bar along the cell border, vertices are grey and highlighted
/// vertices white.
pub fn ppm(a: &Assignment, block: usize, highlights: &[(usize, usize)]) -> Vec<u8> {
    let lat = &a.lattice;
    let b = block.max(3);
    let (w, h) = (lat.width * b + 1, lat.height * b + 1);
    let mut px = vec![[128u8, 128, 128]; w * h];
    let colour = |c: u16| PALETTE[c as usize % PALETTE.len()];
    // image rows run top to bottom
    let mut set = |x: usize, y: usize, c: [u8; 3]| px[(h - 1 - y) * w + x] = c;
    for y in 0..=lat.height {
        for x in 0..lat.width {
            for i in 1..b {
                set(x * b + i, y * b, colour(a.h(x, y)));
            }
        }
    }
    for y in 0..lat.height {
        for x in 0..=lat.width {
            for i in 1..b {
                set(x * b, y * b + i, colour(a.v(x, y)));
            }
        }
    }
    for &(x, y) in highlights {
        if x <= lat.width && y <= lat.height {
            set(x * b, y * b, [255, 255, 255]);
        }
    }
    let mut out = Vec::new();
    let mut head = String::new();
    let _ = write!(head, "P6\n{w} {h}\n255\n");
    out.extend_from_slice(head.as_bytes());
    for p in px {
        out.extend_from_slice(&p);
    }
    out
}
