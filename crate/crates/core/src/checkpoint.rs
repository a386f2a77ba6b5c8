//! Plain-text checkpoint files for [`HTable`].
//!
//! ```text
//! mapgenus-htable 1
//! max_n <N>
//! row <n> <entries> <sha256 of the row's entry lines>
//! ...
//! data
//! <n> <g> <H[n][g] decimal>
//! ...
//! ```
//!
//! Rows `n = 1..=N` are stored; the initial rows are implied. Files are
//! replaced atomically (write to a sibling temp file, then rename).

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_bigint::BigUint;
use num_traits::Zero;
use sha2::{Digest, Sha256};

use crate::cubic::{row_len, HTable};
use crate::error::{Error, Result};
use crate::exact::parse_uint;

pub const MAGIC: &str = "mapgenus-htable";
pub const FORMAT_VERSION: u32 = 1;

fn row_lines(n: usize, row: &[BigUint]) -> String {
    let mut s = String::new();
    for (g, v) in row.iter().enumerate() {
        let _ = writeln!(s, "{n} {g} {v}");
    }
    s
}

fn digest(lines: &str) -> String {
    hex::encode(Sha256::digest(lines.as_bytes()))
}

pub fn render(table: &HTable) -> String {
    let bodies: Vec<String> = (1..=table.max_n())
        .map(|n| row_lines(n, table.row(n).expect("row in range")))
        .collect();
    let mut out = format!("{MAGIC} {FORMAT_VERSION}\nmax_n {}\n", table.max_n());
    for (i, body) in bodies.iter().enumerate() {
        let n = i + 1;
        let _ = writeln!(out, "row {n} {} {}", row_len(n), digest(body));
    }
    out.push_str("data\n");
    for body in &bodies {
        out.push_str(body);
    }
    out
}

pub fn save(path: &Path, table: &HTable) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(render(table).as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<HTable> {
    let text = fs::read_to_string(path)?;
    parse(&text).map_err(|reason| Error::CheckpointCorrupt {
        path: path.to_path_buf(),
        reason,
    })
}

pub fn parse(text: &str) -> std::result::Result<HTable, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    let expected = format!("{MAGIC} {FORMAT_VERSION}");
    if header != expected {
        return Err(format!("bad header {header:?}, expected {expected:?}"));
    }
    let max_n: usize = lines
        .next()
        .and_then(|l| l.strip_prefix("max_n "))
        .and_then(|v| v.parse().ok())
        .ok_or("missing max_n line")?;

    let mut declared = Vec::with_capacity(max_n);
    for n in 1..=max_n {
        let line = lines.next().ok_or(format!("missing digest line for row {n}"))?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            ["row", rn, count, hash] if rn.parse() == Ok(n) => {
                let count: usize = count.parse().map_err(|_| format!("bad entry count in {line:?}"))?;
                if count != row_len(n) {
                    return Err(format!("row {n} declares {count} entries, expected {}", row_len(n)));
                }
                declared.push(hash.to_string());
            }
            _ => return Err(format!("malformed digest line {line:?}")),
        }
    }
    if lines.next() != Some("data") {
        return Err("missing data marker".into());
    }

    let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::from(2u32)]];
    let mut bodies: Vec<String> = vec![String::new(); max_n + 1];
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [n, g, v] = parts.as_slice() else {
            return Err(format!("malformed entry {line:?}"));
        };
        let n: usize = n.parse().map_err(|_| format!("bad n in {line:?}"))?;
        let g: usize = g.parse().map_err(|_| format!("bad g in {line:?}"))?;
        if n == 0 || n > max_n {
            return Err(format!("entry for row {n} outside 1..={max_n}"));
        }
        if n != rows.len() - 1 && n != rows.len() {
            return Err(format!("row {n} out of order"));
        }
        if n == rows.len() {
            rows.push(Vec::new());
        }
        if g != rows[n].len() {
            return Err(format!("entry ({n}, {g}) out of order"));
        }
        let value = parse_uint(v).map_err(|e| e.to_string())?;
        rows[n].push(value);
        let _ = writeln!(bodies[n], "{line}");
    }
    if rows.len() != max_n + 1 {
        return Err(format!("found {} rows, header says {max_n}", rows.len() - 1));
    }
    for n in 1..=max_n {
        if rows[n].len() != row_len(n) {
            return Err(format!(
                "row {n} has {} entries, expected {}",
                rows[n].len(),
                row_len(n)
            ));
        }
        if digest(&bodies[n]) != declared[n - 1] {
            return Err(format!("digest mismatch in row {n}"));
        }
        let scale = BigUint::from(3 * n as u64 + 2);
        if rows[n].iter().any(|v| !(v % &scale).is_zero()) {
            return Err(format!("row {n} has an entry not divisible by {scale}"));
        }
    }
    Ok(HTable::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubic::{build_h_table, build_h_table_with, BuildOptions};

    #[test]
    fn round_trip() {
        let t = build_h_table(12, None).unwrap();
        assert_eq!(parse(&render(&t)).unwrap(), t);
    }

    #[test]
    fn header_layout() {
        let t = build_h_table(2, None).unwrap();
        let text = render(&t);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "mapgenus-htable 1");
        assert_eq!(lines[1], "max_n 2");
        assert!(lines[2].starts_with("row 1 2 "));
        assert_eq!(lines[4], "data");
        assert_eq!(&lines[5..], ["1 0 20", "1 1 5", "2 0 256", "2 1 224"]);
    }

    #[test]
    fn detects_tampering() {
        let t = build_h_table(6, None).unwrap();
        let text = render(&t);
        let edited = text.replace("\n1 0 20\n", "\n1 0 25\n");
        assert!(parse(&edited).unwrap_err().contains("digest"));
        let dropped: String = text
            .lines()
            .filter(|l| *l != "1 1 5")
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(parse(&dropped).is_err());
        let truncated = &text[..text.len() - 20];
        assert!(parse(truncated).is_err());
        assert!(parse("mapgenus-htable 2\nmax_n 0\ndata\n").is_err());
    }

    #[test]
    fn resume_matches_uninterrupted_build() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("table.ckpt");
        let options = BuildOptions {
            checkpoint: Some(path.clone()),
            stride: 5,
            ..BuildOptions::default()
        };
        // "Interrupted" build that stopped at a stride boundary.
        build_h_table_with(10, &options, |_| {}).unwrap();
        assert_eq!(load(&path).unwrap().max_n(), 10);
        let mut resumed_rows = Vec::new();
        let resumed = build_h_table_with(20, &options, |p| resumed_rows.push(p.n)).unwrap();
        assert_eq!(resumed_rows, (11..=20).collect::<Vec<_>>());
        assert_eq!(resumed, build_h_table(20, None).unwrap());
        // Asking for fewer rows than stored only truncates.
        assert_eq!(
            build_h_table_with(7, &options, |_| {}).unwrap(),
            build_h_table(7, None).unwrap()
        );
    }

    #[test]
    fn corrupt_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ckpt");
        fs::write(&path, "garbage\n").unwrap();
        let err = build_h_table(5, Some(&path)).unwrap_err();
        assert!(matches!(err, Error::CheckpointCorrupt { .. }));
    }
}
