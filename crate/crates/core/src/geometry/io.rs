//! Plain-text lattice formats.
//!
//! Both masks and fields start with the header line `n1 n2 h ox oy` (node
//! counts, spacing, coordinates of node 0), followed by one text row per
//! `x₂`-line. Numbers use Rust's shortest round-trip decimal formatting, so
//! writing and reading back is lossless.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::grid::Lattice;
use crate::scalar::Real;

pub(crate) fn header<T: Real>(lattice: &Lattice<T>) -> Result<String> {
    if lattice.dim() > 2 {
        return Err(Error::ShapeMismatch("text formats hold 1-D or 2-D lattices".into()));
    }
    let origin = lattice.origin();
    let n2 = lattice.shape().get(1).copied().unwrap_or(1);
    let oy = origin.get(1).copied().unwrap_or_else(T::zero);
    Ok(format!("{} {} {} {} {}", lattice.shape()[0], n2, lattice.h(), origin[0], oy))
}

pub(crate) fn parse_header<T: Real>(line: &str) -> Result<Lattice<T>> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 5 {
        return Err(Error::Parse(format!("header needs `n1 n2 h ox oy`, got `{line}`")));
    }
    let n1 = parse_num::<usize>(parts[0])?;
    let n2 = parse_num::<usize>(parts[1])?;
    let h = parse_num::<T>(parts[2])?;
    let ox = parse_num::<T>(parts[3])?;
    let oy = parse_num::<T>(parts[4])?;
    Lattice::new(vec![n1, n2], h, vec![ox, oy])
}

pub(crate) fn parse_num<N: FromStr>(s: &str) -> Result<N> {
    s.parse().map_err(|_| Error::Parse(format!("not a number: `{s}`")))
}

pub fn write_mask<T: Real>(lattice: &Lattice<T>, mask: &[bool]) -> Result<String> {
    if mask.len() != lattice.len() {
        return Err(Error::ShapeMismatch("mask length differs from lattice".into()));
    }
    let mut out = header(lattice)?;
    out.push('\n');
    for row in mask.chunks(lattice.shape()[0]) {
        let line: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

pub fn read_mask<T: Real>(text: &str) -> Result<(Lattice<T>, Vec<bool>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let lattice: Lattice<T> = parse_header(lines.next().ok_or_else(|| Error::Parse("empty mask file".into()))?)?;
    let mut mask = Vec::with_capacity(lattice.len());
    for line in lines {
        for tok in line.split_whitespace() {
            mask.push(match tok {
                "0" => false,
                "1" => true,
                other => return Err(Error::Parse(format!("mask entry `{other}` is not 0 or 1"))),
            });
        }
    }
    if mask.len() != lattice.len() {
        return Err(Error::Parse(format!(
            "mask has {} entries, header announces {}",
            mask.len(),
            lattice.len()
        )));
    }
    Ok((lattice, mask))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_round_trip() {
        let lat = Lattice::centred(vec![5, 3], 0.1, vec![0.0, 0.5]).unwrap();
        let mask: Vec<bool> = (0..15).map(|i| i % 3 == 0).collect();
        let text = write_mask(&lat, &mask).unwrap();
        assert!(text.starts_with("5 3 0.1 "));
        let (lat2, mask2) = read_mask::<f64>(&text).unwrap();
        assert_eq!(mask2, mask);
        assert_eq!(lat2.shape(), lat.shape());
        for i in 0..15 {
            assert!((lat2.point(i)[0] - lat.point(i)[0]).abs() < 1e-15);
            assert!((lat2.point(i)[1] - lat.point(i)[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_mask::<f64>("3 1 1 0 0\n0 2 1\n").is_err());
        assert!(read_mask::<f64>("3 1 1 0\n0 1 1\n").is_err());
        assert!(read_mask::<f64>("3 1 1 0 0\n0 1\n").is_err());
    }
}
