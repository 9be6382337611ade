//! Plain-text and raster encodings for profiles, orbits and exit grids.
//!
//! CSV output always uses `.` as the decimal mark, `,` between fields and
//! `\n` line endings, independent of locale. Floats are written in Rust's
//! shortest round-trip form. An optional header comment (lines starting with
//! `#`) can carry provenance; raster headers carry it the same way.

use std::fmt::Write as _;

use serde::Serialize;

use crate::logvar::OrbitRecord;
use crate::tracts::RadialProfile;
use crate::{Error, Result};

fn comment_block(out: &mut String, comment: Option<&str>) {
    if let Some(text) = comment {
        for line in text.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
}

/// `r,value` rows of a profile.
///
/// ```
/// use tractlab::tracts::{ProfileKind, RadialProfile};
/// let p = RadialProfile::new(ProfileKind::Theta, vec![1.0, 2.5], vec![0.5, 3.0]);
/// assert_eq!(tractlab::io::profile_csv(&p, None), "r,value\n1,0.5\n2.5,3\n");
/// ```
pub fn profile_csv(profile: &RadialProfile, comment: Option<&str>) -> String {
    let mut out = String::new();
    comment_block(&mut out, comment);
    out.push_str("r,value\n");
    for (r, v) in profile.radii.iter().zip(&profile.values) {
        let _ = writeln!(out, "{r},{v}");
    }
    out
}

/// One row per recorded state of a `T`-orbit.
///
/// `exit` is 1 on the state that left `L`, `escape` is 1 on every row of an
/// orbit that stayed above its lower bounds.
pub fn orbit_csv(record: &OrbitRecord, comment: Option<&str>) -> String {
    let mut out = String::new();
    comment_block(&mut out, comment);
    out.push_str("n,re_z,im_z,re_f,exit,escape\n");
    let escape = u8::from(record.escape_flag);
    for (n, s) in record.states.iter().enumerate() {
        let exit = u8::from(record.exit_index == Some(n));
        let _ = writeln!(out, "{n},{},{},{},{exit},{escape}", s.z.re, s.z.im, s.f_value.re);
    }
    out
}

/// Pretty JSON with struct fields in declaration order and map keys sorted.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn raster_header(magic: &str, width: usize, height: usize, comment: Option<&str>) -> Vec<u8> {
    let mut head = String::from(magic);
    head.push('\n');
    comment_block(&mut head, comment);
    let _ = write!(head, "{width} {height}\n255\n");
    head.into_bytes()
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 || width * height != len {
        return Err(Error::Parameter(format!("raster of {len} bytes does not fit {width}x{height}")));
    }
    Ok(())
}

/// Binary greyscale (P5) image, rows top to bottom.
pub fn pgm(width: usize, height: usize, pixels: &[u8], comment: Option<&str>) -> Result<Vec<u8>> {
    check_dims(width, height, pixels.len())?;
    let mut out = raster_header("P5", width, height, comment);
    out.extend_from_slice(pixels);
    Ok(out)
}

/// Binary colour (P6) image. Byte 0 maps to black, larger bytes run from
/// blue through green to red.
pub fn ppm(width: usize, height: usize, pixels: &[u8], comment: Option<&str>) -> Result<Vec<u8>> {
    check_dims(width, height, pixels.len())?;
    let mut out = raster_header("P6", width, height, comment);
    out.reserve(3 * pixels.len());
    for &b in pixels {
        out.extend_from_slice(&palette(b));
    }
    Ok(out)
}

fn palette(b: u8) -> [u8; 3] {
    if b == 0 {
        return [0, 0, 0];
    }
    let t = (b - 1) as u32; // 0..=254
    if t < 127 {
        let g = (t * 255 / 126) as u8;
        [0, g, 255 - g]
    } else {
        let r = ((t - 127) * 255 / 127) as u8;
        [r, 255 - r, 0]
    }
}

/// Cell-exit grid as rows with the largest imaginary part first, which is
/// how image viewers expect them.
pub fn grid_to_image_rows(resolution: usize, cells: &[u8]) -> Vec<u8> {
    // cells are stored with row index j growing with Im z
    let mut out = Vec::with_capacity(cells.len());
    for j in (0..resolution).rev() {
        out.extend_from_slice(&cells[j * resolution..(j + 1) * resolution]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logvar::LogCoordinateState;
    use num_complex::Complex64;

    #[test]
    fn csv_has_lf_and_comment() {
        let p = RadialProfile::new(crate::tracts::ProfileKind::Psi, vec![10.0], vec![f64::INFINITY]);
        let s = profile_csv(&p, Some("tool 1\nconfig {}"));
        assert_eq!(s, "# tool 1\n# config {}\nr,value\n10,inf\n");
        assert!(!s.contains('\r'));
    }

    #[test]
    fn orbit_rows() {
        let st = |x: f64| LogCoordinateState {
            z: Complex64::new(x, 0.5),
            f_value: Complex64::new(2.0 * x, 0.0),
            branch_offset: 0,
            in_w: true,
        };
        let rec = OrbitRecord {
            states: vec![st(1.0), st(2.0)],
            exit_index: Some(1),
            escape_flag: false,
            overflow_certified: false,
            lower_bounds: vec![1.0, 1.0],
        };
        assert_eq!(orbit_csv(&rec, None), "n,re_z,im_z,re_f,exit,escape\n0,1,0.5,2,0,0\n1,2,0.5,4,1,0\n");
    }

    #[test]
    fn raster_headers() {
        let img = pgm(2, 1, &[0, 255], None).unwrap();
        assert_eq!(img, b"P5\n2 1\n255\n\x00\xff");
        let img = ppm(1, 1, &[0], Some("x")).unwrap();
        assert_eq!(img, b"P6\n# x\n1 1\n255\n\x00\x00\x00");
        assert!(pgm(3, 1, &[0, 1], None).is_err());
        assert_eq!(palette(255), [255, 0, 0]);
        assert_eq!(palette(1), [0, 0, 255]);
    }

    #[test]
    fn image_rows_flip() {
        assert_eq!(grid_to_image_rows(2, &[1, 2, 3, 4]), vec![3, 4, 1, 2]);
    }
}
