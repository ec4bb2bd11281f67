//! Reading curves from coordinate files and PDB backbones.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::geometry::{Curve3D, GeometryError, Point3};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no CA atoms found{}", .chain.map(|c| format!(" for chain {c}")).unwrap_or_default())]
    NoAtoms { chain: Option<char> },
    #[error("atom limit must be at least 3, got {0}")]
    AtomLimit(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Read { path: path.to_path_buf(), source })
}

/// Parses whitespace-separated `x y z` lines; blank lines and lines starting
/// with `#` are skipped.
pub fn parse_xyz(text: &str, closed: bool) -> Result<Curve3D, IoError> {
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(IoError::Parse { line: idx + 1, msg: format!("expected 3 coordinates, found {}", fields.len()) });
        }
        let mut p = [0.0; 3];
        for (slot, f) in p.iter_mut().zip(&fields) {
            *slot = f
                .parse()
                .map_err(|e| IoError::Parse { line: idx + 1, msg: format!("bad number `{f}`: {e}") })?;
        }
        points.push(p);
    }
    Ok(Curve3D::new(points, closed)?)
}

pub fn read_xyz(path: &Path, closed: bool) -> Result<Curve3D, IoError> {
    parse_xyz(&read_text(path)?, closed)
}

/// One point per line with 17 significant digits, enough to read back the
/// same `f64` values.
pub fn format_xyz(points: &[Point3]) -> String {
    let mut out = String::new();
    for p in points {
        writeln!(out, "{:.16e} {:.16e} {:.16e}", p[0], p[1], p[2]).expect("writing to a string");
    }
    out
}

pub fn write_xyz(path: &Path, points: &[Point3]) -> Result<(), IoError> {
    fs::write(path, format_xyz(points)).map_err(|source| IoError::Write { path: path.to_path_buf(), source })
}

/// Fixed-column field of a PDB record, 1-based inclusive columns.
fn columns(line: &str, from: usize, to: usize) -> &str {
    line.get(from - 1..to.min(line.len())).unwrap_or("")
}

/// CA atoms of the first model, in file order, from one chain (the first
/// chain seen when `chain` is `None`). Only the first alternate location of
/// an atom is kept.
pub fn parse_pdb(text: &str, chain: Option<char>, atom_limit: Option<usize>) -> Result<Curve3D, IoError> {
    if let Some(k) = atom_limit {
        if k < 3 {
            return Err(IoError::AtomLimit(k));
        }
    }
    let mut target = chain;
    let mut points = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.starts_with("ENDMDL") {
            break;
        }
        if !line.starts_with("ATOM  ") {
            continue;
        }
        if line.len() < 54 {
            return Err(IoError::Parse { line: idx + 1, msg: "ATOM record shorter than 54 columns".into() });
        }
        if columns(line, 13, 16).trim() != "CA" {
            continue;
        }
        let alt = columns(line, 17, 17);
        if !(alt == " " || alt == "A" || alt == "1") {
            continue;
        }
        let c = columns(line, 22, 22).chars().next().unwrap_or(' ');
        match target {
            None => target = Some(c),
            Some(t) if t != c => continue,
            Some(_) => {}
        }
        let mut p = [0.0; 3];
        for (k, slot) in p.iter_mut().enumerate() {
            let f = columns(line, 31 + 8 * k, 38 + 8 * k).trim();
            *slot = f
                .parse()
                .map_err(|e| IoError::Parse { line: idx + 1, msg: format!("bad coordinate `{f}`: {e}") })?;
        }
        points.push(p);
        if atom_limit == Some(points.len()) {
            break;
        }
    }
    if points.is_empty() {
        return Err(IoError::NoAtoms { chain });
    }
    Ok(Curve3D::open(points)?)
}

pub fn read_pdb(path: &Path, chain: Option<char>, atom_limit: Option<usize>) -> Result<Curve3D, IoError> {
    parse_pdb(&read_text(path)?, chain, atom_limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn atom(serial: usize, name: &str, alt: char, chain: char, res: usize, xyz: [f64; 3]) -> String {
        format!(
            "ATOM  {serial:>5} {name:<4}{alt}ALA {chain}{res:>4}    {:>8.3}{:>8.3}{:>8.3}  1.00  0.00           C",
            xyz[0], xyz[1], xyz[2]
        )
    }

    #[test]
    fn xyz_examples() {
        let c = parse_xyz("0 0 0\n1 1 0\n# note\n\n1 0 1\n0 1 1\n", false).unwrap();
        assert_eq!(c.points().len(), 4);
        assert_eq!(c.points()[2], [1.0, 0.0, 1.0]);
        match parse_xyz("0 0 0\n1 2\n", false) {
            Err(IoError::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_xyz("0 0 0\n1 x 2\n", false) {
            Err(IoError::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_xyz("0 0 0\n1 1 1\n", false),
            Err(IoError::Geometry(GeometryError::TooFewPoints(2)))
        ));
    }

    #[test]
    fn xyz_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.xyz");
        let pts = vec![[0.1, 1.0 / 3.0, -2.5e-7], [1e10, -0.0, 7.0], [std::f64::consts::PI, 2.0, 1.0]];
        write_xyz(&path, &pts).unwrap();
        assert_eq!(read_xyz(&path, false).unwrap().points(), &pts[..]);
        assert!(matches!(read_xyz(&dir.path().join("missing"), false), Err(IoError::Read { .. })));
    }

    proptest! {
        #[test]
        fn xyz_round_trips(pts in prop::collection::vec(prop::array::uniform3(-1e6f64..1e6), 3..12)) {
            let text = format_xyz(&pts);
            let back: Vec<Point3> = text
                .lines()
                .map(|l| {
                    let v: Vec<f64> = l.split_whitespace().map(|f| f.parse().unwrap()).collect();
                    [v[0], v[1], v[2]]
                })
                .collect();
            prop_assert_eq!(back, pts);
        }
    }

    #[test]
    fn pdb_selects_ca_of_first_chain_and_model() {
        let mut lines = vec!["HEADER    TEST".to_string()];
        for i in 0..6 {
            let x = i as f64;
            lines.push(atom(3 * i + 1, "N", ' ', 'A', i + 1, [x, 0.0, 0.0]));
            lines.push(atom(3 * i + 2, "CA", ' ', 'A', i + 1, [x, 1.0, 0.5 * x]));
            lines.push(atom(3 * i + 3, "CA", 'B', 'A', i + 1, [x, 9.0, 9.0]));
        }
        for i in 0..4 {
            lines.push(atom(100 + i, "CA", ' ', 'B', i + 1, [i as f64, -3.0, 1.0]));
        }
        lines.push("ENDMDL".into());
        lines.push(atom(200, "CA", ' ', 'A', 7, [50.0, 50.0, 50.0]));
        let text = lines.join("\n");

        let a = parse_pdb(&text, None, None).unwrap();
        assert_eq!(a.points().len(), 6);
        assert_eq!(a.points()[3], [3.0, 1.0, 1.5]);
        assert!(!a.is_closed());
        assert_eq!(parse_pdb(&text, None, Some(4)).unwrap().points().len(), 4);
        assert_eq!(parse_pdb(&text, Some('B'), None).unwrap().points()[0], [0.0, -3.0, 1.0]);
        assert!(matches!(parse_pdb(&text, Some('C'), None), Err(IoError::NoAtoms { chain: Some('C') })));
        assert!(matches!(parse_pdb(&text, None, Some(2)), Err(IoError::AtomLimit(2))));
    }

    #[test]
    fn pdb_errors() {
        assert!(matches!(parse_pdb("", None, None), Err(IoError::NoAtoms { chain: None })));
        let bad = atom(1, "CA", ' ', 'A', 1, [0.0, 0.0, 0.0]).replace("   0.000   0.000", "   0.000   x.xxx");
        assert!(matches!(parse_pdb(&bad, None, None), Err(IoError::Parse { line: 1, .. })));
        assert!(matches!(parse_pdb("ATOM      1  CA  ALA A   1", None, None), Err(IoError::Parse { line: 1, .. })));
    }
}
