//! ASCII PLY writer/reader for point clouds.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Writes an ASCII PLY with `element vertex` rows x y z and optional
/// red/green/blue byte properties.
pub fn write_ply(path: &Path, points: &Array2<f64>, colors: Option<&Array2<u8>>) -> Result<()> {
    if points.ncols() != 3 {
        return Err(Error::contract(format!(
            "PLY points must be N x 3, got N x {}",
            points.ncols()
        )));
    }
    if let Some(c) = colors {
        if c.dim() != points.dim() {
            return Err(Error::contract("PLY colors must match points shape"));
        }
    }
    let mut out = Vec::new();
    writeln!(out, "ply")?;
    writeln!(out, "format ascii 1.0")?;
    writeln!(out, "element vertex {}", points.nrows())?;
    writeln!(out, "property float x")?;
    writeln!(out, "property float y")?;
    writeln!(out, "property float z")?;
    if colors.is_some() {
        writeln!(out, "property uchar red")?;
        writeln!(out, "property uchar green")?;
        writeln!(out, "property uchar blue")?;
    }
    writeln!(out, "end_header")?;
    for (i, row) in points.rows().into_iter().enumerate() {
        match colors {
            Some(c) => writeln!(
                out,
                "{} {} {} {} {} {}",
                row[0],
                row[1],
                row[2],
                c[[i, 0]],
                c[[i, 1]],
                c[[i, 2]]
            )?,
            None => writeln!(out, "{} {} {}", row[0], row[1], row[2])?,
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads the x/y/z columns of an ASCII PLY written by [`write_ply`] (or any
/// ASCII PLY whose first three vertex properties are x, y, z).
pub fn read_ply(path: &Path) -> Result<Array2<f64>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let mut offset = 0u64;
    macro_rules! next_line {
        () => {{
            let (_, line) = lines
                .next()
                .ok_or_else(|| Error::format(offset, "unexpected end of PLY header"))?;
            offset += line.len() as u64 + 1;
            line
        }};
    }
    if next_line!().trim() != "ply" {
        return Err(Error::format(0, "missing `ply` magic line"));
    }
    if !next_line!().trim().starts_with("format ascii") {
        return Err(Error::format(4, "only ASCII PLY is supported"));
    }
    let mut vertex_count: Option<usize> = None;
    loop {
        let line = next_line!().trim().to_string();
        if line == "end_header" {
            break;
        }
        if let Some(rest) = line.strip_prefix("element vertex ") {
            vertex_count = Some(
                rest.trim()
                    .parse()
                    .map_err(|_| Error::format(offset, "bad vertex count"))?,
            );
        }
    }
    let count =
        vertex_count.ok_or_else(|| Error::format(offset, "header lacks `element vertex`"))?;
    let mut points = Array2::zeros((count, 3));
    for i in 0..count {
        let (_, line) = lines
            .next()
            .ok_or_else(|| Error::format(offset, format!("missing vertex row {i}")))?;
        offset += line.len() as u64 + 1;
        let mut fields = line.split_whitespace();
        for j in 0..3 {
            let f = fields
                .next()
                .ok_or_else(|| Error::format(offset, format!("vertex row {i} too short")))?;
            points[[i, j]] = f
                .parse()
                .map_err(|_| Error::format(offset, format!("bad float `{f}` in row {i}")))?;
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn ply_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.ply");
        let p2 = dir.path().join("b.ply");
        let pts = array![[0.0, 1.5, -2.25], [0.125, -0.5, 3.0]];
        write_ply(&p1, &pts, None).unwrap();
        let back = read_ply(&p1).unwrap();
        assert_eq!(back, pts);
        write_ply(&p2, &back, None).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    }

    #[test]
    fn ply_with_colors_parses() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.ply");
        let pts = array![[1.0, 2.0, 3.0]];
        let cols = array![[255u8, 0, 128]];
        write_ply(&p, &pts, Some(&cols)).unwrap();
        let back = read_ply(&p).unwrap();
        assert_eq!(back, pts);
    }

    #[test]
    fn bad_magic_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.ply");
        fs::write(&p, "obj\n").unwrap();
        assert!(matches!(read_ply(&p), Err(Error::Format { .. })));
    }
}
