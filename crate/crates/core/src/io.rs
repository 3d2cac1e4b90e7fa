//! Line-oriented text formats for the artifacts.
//!
//! Every file starts with a header `e8spread-<kind> v1`, followed by a
//! count line that makes truncation detectable. Integers are decimal and
//! GF(2) vectors are two hex digits.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::f2::{F2Subspace, F2Vector, SpaceClass};
use crate::frames::{Frame, FrameArray};
use crate::lattice::{Lattice, LatticeVector};
use crate::linalg::RANK;
use crate::norm4::{Norm4Block, Norm4Partition};
use crate::spread::Spread;
use crate::autgroup::Isometry;

pub const VERSION: &str = "v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArtifactKind {
    Spread,
    Frames,
    Partition,
    Generators,
    Certificate,
}

impl ArtifactKind {
    pub const ALL: [ArtifactKind; 5] = [
        ArtifactKind::Spread,
        ArtifactKind::Frames,
        ArtifactKind::Partition,
        ArtifactKind::Generators,
        ArtifactKind::Certificate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ArtifactKind::Spread => "spread",
            ArtifactKind::Frames => "frames",
            ArtifactKind::Partition => "partition",
            ArtifactKind::Generators => "generators",
            ArtifactKind::Certificate => "certificate",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.txt", self.name())
    }

    pub fn header(self) -> String {
        format!("e8spread-{} {VERSION}", self.name())
    }

    /// Kind named by the first line of `text`.
    pub fn detect(text: &str) -> Result<ArtifactKind> {
        let first = text.lines().next().ok_or_else(|| Error::parse(1, "empty file"))?;
        ArtifactKind::ALL
            .into_iter()
            .find(|k| first.trim_end() == k.header())
            .ok_or_else(|| Error::parse(1, format!("unrecognized header {first:?}")))
    }
}

/// Sequential reader over numbered lines.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, kind: ArtifactKind) -> Result<Lines<'a>> {
        let mut l = Lines { inner: text.lines().enumerate(), last: 0 };
        let header = l.next("header")?;
        if header != kind.header() {
            return Err(Error::parse(1, format!("expected header {:?}, found {header:?}", kind.header())));
        }
        Ok(l)
    }

    fn next(&mut self, what: &str) -> Result<&'a str> {
        match self.inner.next() {
            Some((i, line)) => {
                self.last = i + 1;
                Ok(line.trim_end())
            }
            None => Err(Error::parse(self.last + 1, format!("unexpected end of file, expected {what}"))),
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.last, msg)
    }

    /// A line `<keyword> <n>`.
    fn keyed(&mut self, keyword: &str) -> Result<usize> {
        let line = self.next(keyword)?;
        let rest = line
            .strip_prefix(keyword)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| self.err(format!("expected `{keyword} <n>`, found {line:?}")))?;
        rest.parse().map_err(|_| self.err(format!("bad count {rest:?}")))
    }

    fn fields<T: std::str::FromStr>(&mut self, what: &str, n: usize, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
        let line = self.next(what)?;
        let out: Vec<T> = line
            .split_whitespace()
            .map(|t| parse(t).ok_or_else(|| self.err(format!("bad {what} entry {t:?}"))))
            .collect::<Result<_>>()?;
        if out.len() != n {
            return Err(self.err(format!("expected {n} entries in {what}, found {}", out.len())));
        }
        Ok(out)
    }

    fn finish(&mut self) -> Result<()> {
        for (i, line) in self.inner.by_ref() {
            if !line.trim().is_empty() {
                return Err(Error::parse(i + 1, "trailing content"));
            }
        }
        Ok(())
    }
}

fn parse_hex(t: &str) -> Option<F2Vector> {
    (t.len() == 2).then(|| u8::from_str_radix(t, 16).ok().map(F2Vector)).flatten()
}

pub fn write_spread(s: &Spread) -> String {
    let mut out = format!("{}\nclass {}\nspaces {}\n", ArtifactKind::Spread.header(), s.class, s.spaces.len());
    for v in &s.spaces {
        let rows: Vec<String> = v.rows().iter().map(|r| r.to_string()).collect();
        writeln!(out, "{}", rows.join(" ")).expect("write to string");
    }
    out
}

pub fn parse_spread(text: &str) -> Result<Spread> {
    let mut l = Lines::new(text, ArtifactKind::Spread)?;
    let line = l.next("class")?;
    let class: SpaceClass = line
        .strip_prefix("class ")
        .and_then(|c| c.parse().ok())
        .ok_or_else(|| l.err(format!("expected `class A` or `class B`, found {line:?}")))?;
    let n = l.keyed("spaces")?;
    let mut spaces = Vec::with_capacity(n);
    for _ in 0..n {
        let line = l.next("space")?;
        let rows: Vec<F2Vector> = line
            .split_whitespace()
            .map(|t| parse_hex(t).ok_or_else(|| l.err(format!("bad GF(2) vector {t:?}"))))
            .collect::<Result<_>>()?;
        if rows.is_empty() {
            return Err(l.err("empty space line"));
        }
        spaces.push(F2Subspace::span(rows));
    }
    l.finish()?;
    Ok(Spread { spaces, class })
}

pub fn write_frames(a: &FrameArray) -> String {
    let per_row = a.rows.first().map_or(0, Vec::len);
    let mut out = format!("{}\nrows {} frames {per_row}\n", ArtifactKind::Frames.header(), a.rows.len());
    for (r, row) in a.rows.iter().enumerate() {
        writeln!(out, "row {r}").expect("write to string");
        for f in row {
            let ids: Vec<String> = f.roots.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{}", ids.join(" ")).expect("write to string");
        }
    }
    out
}

pub fn parse_frames(text: &str) -> Result<FrameArray> {
    let mut l = Lines::new(text, ArtifactKind::Frames)?;
    let line = l.next("shape")?;
    let shape: Vec<&str> = line.split(' ').collect();
    let (n_rows, per_row) = match shape.as_slice() {
        ["rows", r, "frames", c] => (
            r.parse::<usize>().map_err(|_| l.err("bad row count"))?,
            c.parse::<usize>().map_err(|_| l.err("bad frame count"))?,
        ),
        _ => return Err(l.err(format!("expected `rows <n> frames <m>`, found {line:?}"))),
    };
    let mut rows = Vec::with_capacity(n_rows);
    for r in 0..n_rows {
        if l.keyed("row")? != r {
            return Err(l.err(format!("expected `row {r}`")));
        }
        let mut row = Vec::with_capacity(per_row);
        for c in 0..per_row {
            let ids = l.fields("frame", 8, |t| t.parse::<usize>().ok())?;
            let mut roots: [usize; 8] = ids.try_into().expect("eight ids");
            roots.sort_unstable();
            row.push(Frame { roots, source: (r, c) });
        }
        rows.push(row);
    }
    l.finish()?;
    Ok(FrameArray { rows })
}

pub fn write_partition(p: &Norm4Partition) -> String {
    let size = p.blocks.first().map_or(0, |b| b.vectors.len());
    let mut out = format!("{}\nblocks {} size {size}\n", ArtifactKind::Partition.header(), p.blocks.len());
    for (b, block) in p.blocks.iter().enumerate() {
        writeln!(out, "block {b}").expect("write to string");
        for v in &block.vectors {
            writeln!(out, "{v}").expect("write to string");
        }
    }
    out
}

/// Parses the raw blocks; building each block's lattice data is left to
/// [`partition_from_blocks`], since failures there are verification
/// failures rather than format errors.
pub fn parse_partition_vectors(text: &str) -> Result<Vec<Vec<LatticeVector>>> {
    let mut l = Lines::new(text, ArtifactKind::Partition)?;
    let line = l.next("shape")?;
    let shape: Vec<&str> = line.split(' ').collect();
    let (n_blocks, size) = match shape.as_slice() {
        ["blocks", n, "size", s] => (
            n.parse::<usize>().map_err(|_| l.err("bad block count"))?,
            s.parse::<usize>().map_err(|_| l.err("bad block size"))?,
        ),
        _ => return Err(l.err(format!("expected `blocks <n> size <m>`, found {line:?}"))),
    };
    let mut blocks = Vec::with_capacity(n_blocks);
    for b in 0..n_blocks {
        if l.keyed("block")? != b {
            return Err(l.err(format!("expected `block {b}`")));
        }
        let mut vectors = Vec::with_capacity(size);
        for _ in 0..size {
            let c = l.fields("vector", RANK, |t| t.parse::<i64>().ok())?;
            vectors.push(LatticeVector(c.try_into().expect("eight coordinates")));
        }
        blocks.push(vectors);
    }
    l.finish()?;
    Ok(blocks)
}

pub fn partition_from_blocks(blocks: Vec<Vec<LatticeVector>>, lattice: &Lattice) -> Result<Norm4Partition> {
    let blocks = blocks
        .into_iter()
        .enumerate()
        .map(|(b, v)| Norm4Block::from_vectors(b, v, lattice))
        .collect::<Result<Vec<_>>>()?;
    Ok(Norm4Partition { blocks })
}

pub fn parse_partition(text: &str, lattice: &Lattice) -> Result<Norm4Partition> {
    partition_from_blocks(parse_partition_vectors(text)?, lattice)
}

/// A generator together with its recorded block permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorRecord {
    pub isometry: Isometry,
    pub blocks: Vec<usize>,
}

pub fn write_generators(gens: &[GeneratorRecord]) -> String {
    let mut out = format!("{}\ncount {}\n", ArtifactKind::Generators.header(), gens.len());
    for (k, g) in gens.iter().enumerate() {
        writeln!(out, "generator {k}").expect("write to string");
        for row in g.isometry.matrix() {
            let entries: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{}", entries.join(" ")).expect("write to string");
        }
        let blocks: Vec<String> = g.blocks.iter().map(|x| x.to_string()).collect();
        writeln!(out, "blocks {}", blocks.join(" ")).expect("write to string");
    }
    out
}

pub fn parse_generators(text: &str) -> Result<Vec<GeneratorRecord>> {
    let mut l = Lines::new(text, ArtifactKind::Generators)?;
    let n = l.keyed("count")?;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        if l.keyed("generator")? != k {
            return Err(l.err(format!("expected `generator {k}`")));
        }
        let mut matrix = [[0i64; RANK]; RANK];
        for row in matrix.iter_mut() {
            let entries = l.fields("matrix row", RANK, |t| t.parse::<i64>().ok())?;
            *row = entries.try_into().expect("eight entries");
        }
        let line = l.next("blocks")?;
        let blocks: Vec<usize> = line
            .strip_prefix("blocks ")
            .ok_or_else(|| l.err(format!("expected `blocks ...`, found {line:?}")))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| l.err(format!("bad block {t:?}"))))
            .collect::<Result<_>>()?;
        out.push(GeneratorRecord { isometry: Isometry::new(matrix), blocks });
    }
    l.finish()?;
    Ok(out)
}

/// Check lines of a certificate file: `(passed, line)`.
pub fn parse_certificate(text: &str) -> Result<Vec<(bool, String)>> {
    let mut l = Lines::new(text, ArtifactKind::Certificate)?;
    let n = l.keyed("checks")?;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let line = l.next("check")?;
        if line.starts_with("stage ") {
            continue;
        }
        let t = line.trim_start();
        let pass = match t.split(' ').next() {
            Some("PASS") => true,
            Some("FAIL") => false,
            _ => return Err(l.err(format!("expected a PASS or FAIL line, found {line:?}"))),
        };
        out.push((pass, t.to_string()));
    }
    l.finish()?;
    Ok(out)
}

pub fn write_certificate(certs: &[crate::cert::Certificate]) -> String {
    let n: usize = certs.iter().map(|c| c.checks.len()).sum();
    let mut out = format!("{}\nchecks {n}\n", ArtifactKind::Certificate.header());
    for c in certs {
        out.push_str(&c.to_string());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_kind_from_header() {
        for k in ArtifactKind::ALL {
            assert_eq!(ArtifactKind::detect(&format!("{}\n", k.header())).unwrap(), k);
        }
        assert!(matches!(ArtifactKind::detect("hello\n"), Err(Error::Parse { line: 1, .. })));
        assert!(ArtifactKind::detect("").is_err());
    }

    #[test]
    fn truncated_spread_is_a_parse_error() {
        let text = "e8spread-spread v1\nclass A\nspaces 2\n01 02 04 08\n";
        let err = parse_spread(text).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err}");
    }

    #[test]
    fn bad_hex_is_a_parse_error() {
        let text = "e8spread-spread v1\nclass A\nspaces 1\n01 zz\n";
        assert!(matches!(parse_spread(text), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn trailing_content_is_rejected() {
        let text = "e8spread-generators v1\ncount 0\nextra\n";
        assert!(matches!(parse_generators(text), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn certificate_round_trip() {
        let mut c = crate::cert::Certificate::new("demo");
        c.check("a", 1, 1);
        c.check("b", 2, 3);
        let parsed = parse_certificate(&write_certificate(&[c])).unwrap();
        assert_eq!(parsed.iter().map(|(p, _)| *p).collect::<Vec<_>>(), vec![true, false]);
    }
}
