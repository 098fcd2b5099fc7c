//! SDPA sparse format export of the reduced program and a reader for
//! CSDP-style solution files.
//!
//! The exported problem is
//!
//! ```text
//!   minimize  c'·z   s.t.   Σ_j z_j F_j - F_0 ⪰ 0,   F_0 = -I,   F_j = A'_j
//! ```
//!
//! (see [`ReducedForm`]); SDPA variable `j` (1-based) is generator `j`
//! (0-based, the identity being generator 0). The refutation objective is
//! `1 + c'·z`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::{BlockSdp, ReducedForm};

const DROP: f64 = 1e-15;

/// SDPA text for a reduced program.
pub fn sdpa_string(rf: &ReducedForm, comment: &str) -> String {
    sdpa_text(&rf.block_dims, &rf.cost, &rf.mats, comment)
}

/// SDPA text for `min cost·z` s.t. `I + Σ z_j mats[j] ⪰ 0`.
pub fn sdpa_text(block_dims: &[usize], cost: &[f64], mats: &[Vec<DMatrix<f64>>], comment: &str) -> String {
    let mut s = String::new();
    for line in comment.lines() {
        let _ = writeln!(s, "* {line}");
    }
    let _ = writeln!(s, "{}", mats.len());
    let _ = writeln!(s, "{}", block_dims.len());
    let dims: Vec<String> = block_dims.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(s, "{}", dims.join(" "));
    let cost: Vec<String> = cost.iter().map(|c| format!("{c:e}")).collect();
    let _ = writeln!(s, "{}", if cost.is_empty() { "0".to_string() } else { cost.join(" ") });
    for (blk, &n) in block_dims.iter().enumerate() {
        for i in 0..n {
            let _ = writeln!(s, "0 {} {} {} -1", blk + 1, i + 1, i + 1);
        }
    }
    for (j, mj) in mats.iter().enumerate() {
        for (blk, m) in mj.iter().enumerate() {
            for i in 0..m.nrows() {
                for c in i..m.ncols() {
                    let v = m[(i, c)];
                    if v.abs() > DROP {
                        let _ = writeln!(s, "{} {} {} {} {v:e}", j + 1, blk + 1, i + 1, c + 1);
                    }
                }
            }
        }
    }
    s
}

/// Writes the reduced form of `sdp` to `path`.
pub fn export_sdpa(sdp: &BlockSdp, path: &Path) -> Result<()> {
    let rf = ReducedForm::new(&sdp.targets, &sdp.coefficient_blocks())?;
    let mut comment = format!("n={} d={} k={} mode={}\nvariable j = generator j:", sdp.n, sdp.d, sdp.k, sdp.mode);
    for (j, g) in sdp.generators.iter().enumerate().skip(1) {
        let _ = write!(comment, "\n  {j}: {g}");
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(sdpa_string(&rf, &comment).as_bytes())?;
    Ok(())
}

/// A parsed SDPA problem. `f[0]` is the constant matrix.
#[derive(Clone, Debug)]
pub struct SdpaProblem {
    pub block_dims: Vec<usize>,
    pub cost: Vec<f64>,
    /// `f[matrix][block]`
    pub f: Vec<Vec<DMatrix<f64>>>,
}

fn numbers(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| c.is_whitespace() || "{}(),".contains(c)).filter(|t| !t.is_empty())
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse(format!("SDPA: missing {what}")))?;
    tok.parse().map_err(|_| Error::Parse(format!("SDPA: bad {what} {tok:?}")))
}

/// Parses an SDPA sparse file. Negative block sizes (diagonal blocks) are
/// read as dense blocks of the absolute size.
pub fn read_sdpa(text: &str) -> Result<SdpaProblem> {
    let body: String = text
        .lines()
        .filter(|l| !l.trim_start().starts_with(['*', '"']))
        .collect::<Vec<_>>()
        .join("\n");
    let all: Vec<&str> = numbers(&body).collect();
    let mut tok = all.iter().copied();
    let m: usize = parse(tok.next(), "number of constraints")?;
    let nblocks: usize = parse(tok.next(), "number of blocks")?;
    let mut block_dims = Vec::with_capacity(nblocks);
    for _ in 0..nblocks {
        let d: i64 = parse(tok.next(), "block size")?;
        block_dims.push(d.unsigned_abs() as usize);
    }
    let mut cost = Vec::with_capacity(m);
    for _ in 0..m {
        cost.push(parse(tok.next(), "cost entry")?);
    }
    if m == 0 && tok.len() % 5 == 1 {
        // writer emits a placeholder cost entry
        tok.next();
    }
    let mut f: Vec<Vec<DMatrix<f64>>> = (0..=m)
        .map(|_| block_dims.iter().map(|&n| DMatrix::zeros(n, n)).collect())
        .collect();
    while let Some(first) = tok.next() {
        let mat: usize = parse(Some(first), "matrix index")?;
        let blk: usize = parse(tok.next(), "block index")?;
        let i: usize = parse(tok.next(), "row")?;
        let j: usize = parse(tok.next(), "column")?;
        let v: f64 = parse(tok.next(), "value")?;
        if mat > m || blk == 0 || blk > nblocks || i == 0 || j == 0 || i > block_dims[blk - 1] || j > block_dims[blk - 1] {
            return Err(Error::Parse(format!("SDPA: entry {mat} {blk} {i} {j} out of range")));
        }
        f[mat][blk - 1][(i - 1, j - 1)] = v;
        f[mat][blk - 1][(j - 1, i - 1)] = v;
    }
    Ok(SdpaProblem { block_dims, cost, f })
}

/// Solution in the CSDP output layout: the `y` vector on the first line, then
/// `1 blk i j v` entries of the slack `Z` and `2 blk i j v` entries of `X`.
#[derive(Clone, Debug)]
pub struct SdpaSolution {
    pub y: Vec<f64>,
    pub z: Vec<DMatrix<f64>>,
    pub x: Vec<DMatrix<f64>>,
}

pub fn read_solution(text: &str, m: usize, block_dims: &[usize]) -> Result<SdpaSolution> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let first = lines.next().ok_or_else(|| Error::Parse("empty solution file".into()))?;
    let y: Vec<f64> = numbers(first)
        .map(|t| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad y entry {t:?}"))))
        .collect::<Result<_>>()?;
    if y.len() != m {
        return Err(Error::Parse(format!("solution has {} y entries, expected {m}", y.len())));
    }
    let zeros = || block_dims.iter().map(|&n| DMatrix::zeros(n, n)).collect::<Vec<_>>();
    let (mut z, mut x) = (zeros(), zeros());
    for line in lines {
        let mut t = numbers(line);
        let which: usize = parse(t.next(), "matrix selector")?;
        let blk: usize = parse(t.next(), "block index")?;
        let i: usize = parse(t.next(), "row")?;
        let j: usize = parse(t.next(), "column")?;
        let v: f64 = parse(t.next(), "value")?;
        if blk == 0 || blk > block_dims.len() || i == 0 || j == 0 || i > block_dims[blk - 1] || j > block_dims[blk - 1] {
            return Err(Error::Parse(format!("solution entry {line:?} out of range")));
        }
        let target = match which {
            1 => &mut z,
            2 => &mut x,
            _ => return Err(Error::Parse(format!("solution entry {line:?}: selector must be 1 or 2"))),
        };
        target[blk - 1][(i - 1, j - 1)] = v;
        target[blk - 1][(j - 1, i - 1)] = v;
    }
    Ok(SdpaSolution { y, z, x })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> ReducedForm {
        let b1 = vec![DMatrix::identity(1, 1), DMatrix::from_element(1, 1, -1.0)];
        let b2 = vec![DMatrix::identity(2, 2), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.5])];
        ReducedForm::new(&[1.0, 0.25], &[b1, b2]).unwrap()
    }

    #[test]
    fn round_trip() {
        let rf = toy();
        let text = sdpa_string(&rf, "toy");
        let p = read_sdpa(&text).unwrap();
        assert_eq!(p.block_dims, rf.block_dims);
        assert_eq!(p.cost, rf.cost);
        assert_eq!(p.f[0][1], -DMatrix::identity(2, 2));
        for blk in 0..2 {
            assert!((&p.f[1][blk] - &rf.mats[0][blk]).amax() < 1e-15);
        }
    }

    #[test]
    fn reads_braced_block_structure() {
        let p = read_sdpa("\"c\n1\n2\n{1, -2}\n{3.0}\n1 1 1 1 2.0\n1 2 2 2 1\n").unwrap();
        assert_eq!(p.block_dims, vec![1, 2]);
        assert_eq!(p.cost, vec![3.0]);
        assert_eq!(p.f[1][0][(0, 0)], 2.0);
    }

    #[test]
    fn solution_reader() {
        let s = read_solution("0.5 -1\n1 1 1 1 2\n2 2 1 2 0.25\n", 2, &[1, 2]).unwrap();
        assert_eq!(s.y, vec![0.5, -1.0]);
        assert_eq!(s.z[0][(0, 0)], 2.0);
        assert_eq!(s.x[1][(1, 0)], 0.25);
        assert!(read_solution("1\n", 2, &[1]).is_err());
        assert!(read_solution("1 2\n3 1 1 1 0\n", 2, &[1]).is_err());
    }

    #[test]
    fn rejects_out_of_range_entry() {
        assert!(read_sdpa("1\n1\n1\n0\n1 2 1 1 1\n").is_err());
    }
}
