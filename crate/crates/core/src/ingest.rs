//! Benchmark dataset registry, download cache, and conversion to the
//! canonical `src dst sign` edge list.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Archive {
    Gzip,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RawFormat {
    /// Tab separated `FromNodeId ToNodeId Sign`, `#` comments.
    Snap,
    /// Election records: `E`, `T`, `U <candidate id> <name>`, `N`, and
    /// `V <vote> <voter id> <date> <time> <name>` lines.
    WikiElection,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetDescriptor {
    pub name: &'static str,
    pub url: &'static str,
    pub archive: Archive,
    pub format: RawFormat,
    pub expected_nodes: usize,
    pub expected_edges: usize,
    pub expected_positive_fraction: f64,
    pub expected_psi_in_fraction: f64,
    pub expected_psi_out_fraction: f64,
    pub notes: &'static str,
}

pub const DATASETS: [DatasetDescriptor; 3] = [
    DatasetDescriptor {
        name: "wikipedia",
        url: "https://snap.stanford.edu/data/wikiElec.ElecBs3.txt.gz",
        archive: Archive::Gzip,
        format: RawFormat::WikiElection,
        expected_nodes: 7115,
        expected_edges: 103108,
        expected_positive_fraction: 0.7879,
        expected_psi_in_fraction: 0.19,
        expected_psi_out_fraction: 0.14,
        notes: "edge voter -> candidate, sign = vote; neutral votes dropped; repeated votes keep the first",
    },
    DatasetDescriptor {
        name: "slashdot",
        url: "https://snap.stanford.edu/data/soc-sign-Slashdot090221.txt.gz",
        archive: Archive::Gzip,
        format: RawFormat::Snap,
        expected_nodes: 82140,
        expected_edges: 549202,
        expected_positive_fraction: 0.7740,
        expected_psi_in_fraction: 0.17,
        expected_psi_out_fraction: 0.14,
        notes: "friend/foe links",
    },
    DatasetDescriptor {
        name: "epinions",
        url: "https://snap.stanford.edu/data/soc-sign-epinions.txt.gz",
        archive: Archive::Gzip,
        format: RawFormat::Snap,
        expected_nodes: 131580,
        expected_edges: 840799,
        expected_positive_fraction: 0.8529,
        expected_psi_in_fraction: 0.07,
        expected_psi_out_fraction: 0.09,
        notes: "trust/distrust links",
    },
];

pub fn descriptor(name: &str) -> Result<&'static DatasetDescriptor> {
    DATASETS
        .iter()
        .find(|d| d.name == name)
        .ok_or_else(|| Error::UnknownDataset(name.to_string()))
}

pub fn raw_path(cache_dir: &Path, name: &str) -> PathBuf {
    cache_dir.join(format!("{name}.raw.txt"))
}

pub fn canonical_path(cache_dir: &Path, name: &str) -> PathBuf {
    cache_dir.join(format!("{name}.canonical.txt"))
}

fn checksum_path(file: &Path) -> PathBuf {
    let mut s = file.as_os_str().to_owned();
    s.push(".sha256");
    PathBuf::from(s)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut f = File::open(path)?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex::encode(h.finalize()))
}

/// Holds an exclusive advisory lock on `<cache>/<name>.lock` while alive.
struct DatasetLock(File);

impl DatasetLock {
    fn acquire(cache_dir: &Path, name: &str) -> Result<Self> {
        let f = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(cache_dir.join(format!("{name}.lock")))?;
        f.lock()?;
        Ok(DatasetLock(f))
    }
}

impl Drop for DatasetLock {
    fn drop(&mut self) {
        let _ = self.0.unlock();
    }
}

/// Outcome of [`fetch`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fetched {
    pub path: PathBuf,
    pub downloaded: bool,
}

/// Makes the decompressed raw file for `name` available in `cache_dir`.
///
/// A cached file is reused when it matches its `.sha256` sidecar. A file
/// placed in the cache by hand without a sidecar is adopted as is. A
/// mismatching file is deleted and reported, so the next call downloads a
/// fresh copy.
pub fn fetch(name: &str, cache_dir: &Path) -> Result<Fetched> {
    let desc = descriptor(name)?;
    fs::create_dir_all(cache_dir)?;
    let _lock = DatasetLock::acquire(cache_dir, name)?;
    let raw = raw_path(cache_dir, name);
    let sidecar = checksum_path(&raw);
    if raw.exists() {
        let actual = sha256_file(&raw)?;
        match fs::read_to_string(&sidecar) {
            Ok(expected) if expected.trim() == actual => {
                log::info!("{name}: cache hit {}", raw.display());
                return Ok(Fetched { path: raw, downloaded: false });
            }
            Ok(_) => {
                fs::remove_file(&raw)?;
                fs::remove_file(&sidecar)?;
                return Err(Error::ChecksumMismatch { path: raw });
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                log::info!("{name}: adopting existing {}", raw.display());
                fs::write(&sidecar, format!("{actual}\n"))?;
                return Ok(Fetched { path: raw, downloaded: false });
            }
            Err(e) => return Err(e.into()),
        }
    }

    let tmp = cache_dir.join(format!("{name}.raw.txt.part"));
    {
        let body = download(desc.url)?;
        let mut out = BufWriter::new(File::create(&tmp)?);
        match desc.archive {
            Archive::Gzip => io::copy(&mut flate2::read::MultiGzDecoder::new(body), &mut out)?,
            Archive::Plain => io::copy(&mut BufReader::new(body), &mut out)?,
        };
        out.flush()?;
    }
    fs::rename(&tmp, &raw)?;
    fs::write(&sidecar, format!("{}\n", sha256_file(&raw)?))?;
    Ok(Fetched { path: raw, downloaded: true })
}

#[cfg(feature = "fetch")]
fn download(url: &str) -> Result<Box<dyn Read>> {
    log::info!("downloading {url}");
    // reqwest picks up HTTP(S)_PROXY from the environment
    let resp = reqwest::blocking::Client::builder()
        .timeout(None)
        .build()
        .and_then(|c| c.get(url).send())
        .and_then(|r| r.error_for_status())
        .map_err(|e| Error::Download(e.to_string()))?;
    Ok(Box::new(resp))
}

#[cfg(not(feature = "fetch"))]
fn download(url: &str) -> Result<Box<dyn Read>> {
    Err(Error::Download(format!(
        "built without the `fetch` feature; place the decompressed file from {url} in the cache directory"
    )))
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad {what} {tok:?}"),
    })
}

/// Converts raw records to canonical lines. Returns the number of edges
/// written.
pub fn convert<R: BufRead, W: Write>(format: RawFormat, raw: R, mut out: W) -> Result<usize> {
    let mut written = 0;
    let mut candidate: Option<u64> = None;
    // usernames in the election dump are not guaranteed to be UTF-8
    for (idx, line) in raw.split(b'\n').enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = String::from_utf8_lossy(&line);
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tok = trimmed.split_whitespace();
        match format {
            RawFormat::Snap => {
                let s: u64 = parse_field(tok.next(), line_no, "source id")?;
                let d: u64 = parse_field(tok.next(), line_no, "target id")?;
                let y: i64 = parse_field(tok.next(), line_no, "sign")?;
                if y != 1 && y != -1 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("sign {y} is not -1 or 1"),
                    });
                }
                writeln!(out, "{s} {d} {y}")?;
                written += 1;
            }
            RawFormat::WikiElection => match tok.next() {
                Some("E") | Some("T") | Some("N") => {}
                Some("U") => candidate = Some(parse_field(tok.next(), line_no, "candidate id")?),
                Some("V") => {
                    let vote: i64 = parse_field(tok.next(), line_no, "vote")?;
                    let voter: u64 = parse_field(tok.next(), line_no, "voter id")?;
                    let cand = candidate.ok_or_else(|| Error::Parse {
                        line: line_no,
                        msg: "vote before any candidate (U) record".into(),
                    })?;
                    match vote {
                        0 => {}
                        1 | -1 => {
                            writeln!(out, "{voter} {cand} {vote}")?;
                            written += 1;
                        }
                        v => {
                            return Err(Error::Parse {
                                line: line_no,
                                msg: format!("vote {v} is not -1, 0 or 1"),
                            })
                        }
                    }
                }
                Some(other) => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("unknown record type {other:?}"),
                    })
                }
                None => unreachable!("blank lines skipped above"),
            },
        }
    }
    out.flush()?;
    Ok(written)
}

/// Writes `<cache>/<name>.canonical.txt` from the raw file, atomically.
pub fn normalize(name: &str, raw: &Path) -> Result<PathBuf> {
    let desc = descriptor(name)?;
    let dir = raw.parent().unwrap_or(Path::new("."));
    let dest = canonical_path(dir, name);
    let tmp = dir.join(format!("{name}.canonical.txt.part"));
    let reader = BufReader::new(File::open(raw)?);
    let mut out = BufWriter::new(File::create(&tmp)?);
    writeln!(out, "# {name}: src dst sign")?;
    let result = convert(desc.format, reader, &mut out);
    drop(out);
    match result {
        Ok(n) => {
            log::info!("{name}: {n} edges written to {}", dest.display());
            fs::rename(&tmp, &dest)?;
            Ok(dest)
        }
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

/// `fetch` followed by `normalize`.
pub fn ingest(name: &str, cache_dir: &Path) -> Result<PathBuf> {
    let fetched = fetch(name, cache_dir)?;
    normalize(name, &fetched.path)
}
