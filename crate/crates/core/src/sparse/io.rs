//! Matrix Market exchange and a raw binary dump for block vectors.

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::sparse::{BlockVector, CsrMatrix};

/// Writes a `coordinate real general` Matrix Market file (1-based indices).
pub fn write_matrix_market<W: Write>(a: &CsrMatrix, mut w: W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.n_rows(), a.n_cols(), a.nnz())?;
    for i in 0..a.n_rows() {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v)?;
        }
    }
    Ok(())
}

/// Reads a `coordinate real` Matrix Market file, `general` or `symmetric`.
pub fn read_matrix_market<R: BufRead>(r: R) -> Result<CsrMatrix> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty input".into() })?;
    let header = header?.to_ascii_lowercase();
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(Error::Parse { line: 1, msg: format!("unsupported header '{header}'") });
    }
    if fields[3] != "real" && fields[3] != "integer" {
        return Err(Error::Parse { line: 1, msg: format!("unsupported field '{}'", fields[3]) });
    }
    let symmetric = match fields[4] {
        "general" => false,
        "symmetric" => true,
        other => return Err(Error::Parse { line: 1, msg: format!("unsupported symmetry '{other}'") }),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut trip = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        let bad = |msg: &str| Error::Parse { line: lineno, msg: msg.to_string() };
        match size {
            None => {
                if parts.len() != 3 {
                    return Err(bad("expected 'rows cols nnz'"));
                }
                let p = |s: &str| s.parse::<usize>().map_err(|_| bad("bad size entry"));
                size = Some((p(parts[0])?, p(parts[1])?, p(parts[2])?));
            }
            Some((m, n, _)) => {
                if parts.len() != 3 {
                    return Err(bad("expected 'row col value'"));
                }
                let i: usize = parts[0].parse().map_err(|_| bad("bad row index"))?;
                let j: usize = parts[1].parse().map_err(|_| bad("bad column index"))?;
                let v: f64 = parts[2].parse().map_err(|_| bad("bad value"))?;
                if i == 0 || j == 0 || i > m || j > n {
                    return Err(bad("index out of range"));
                }
                trip.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    trip.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (m, n, nnz) = size.ok_or_else(|| Error::Parse { line: 0, msg: "missing size line".into() })?;
    let stored = if symmetric {
        trip.iter().filter(|(i, j, _)| i >= j).count()
    } else {
        trip.len()
    };
    if stored != nnz {
        return Err(Error::Parse { line: 0, msg: format!("expected {nnz} entries, found {stored}") });
    }
    CsrMatrix::from_triplets(m, n, &trip)
}

/// Binary layout: `n_rows` and `width` as u64 little endian, followed by the
/// row-major entries as f64 little endian.
pub fn write_block_binary<W: Write>(x: &BlockVector, mut w: W) -> Result<()> {
    w.write_all(&(x.n_rows() as u64).to_le_bytes())?;
    w.write_all(&(x.width() as u64).to_le_bytes())?;
    for v in x.as_slice() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_block_binary<R: Read>(mut r: R) -> Result<BlockVector> {
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let n_rows = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let width = u64::from_le_bytes(word) as usize;
    let len = n_rows
        .checked_mul(width)
        .ok_or_else(|| Error::InvalidInput("block dump size overflows".into()))?;
    let mut data = Vec::with_capacity(len);
    for _ in 0..len {
        r.read_exact(&mut word)?;
        data.push(f64::from_le_bytes(word));
    }
    BlockVector::from_row_major(n_rows, width, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_file_expands() {
        let src = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 4.0\n2 1 -1.0\n";
        let a = read_matrix_market(src.as_bytes()).unwrap();
        assert_eq!(a.to_dense(), vec![4.0, -1.0, -1.0, 0.0]);
    }

    #[test]
    fn rejects_wrong_count() {
        let src = "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 4.0\n";
        assert!(read_matrix_market(src.as_bytes()).is_err());
    }
}
