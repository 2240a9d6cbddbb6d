//! Reading embeddings and corpora from disk, the binary embedding cache,
//! and file checksums.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nws_core::{Corpus, CorpusBuilder, EmbeddingLoader, EmbeddingTable, IngestReport, LoadReport, Vocabulary};
use sha2::{Digest, Sha256};

use crate::error::{NwsError, Result};

pub(crate) fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => NwsError::MissingFile(path.to_path_buf()),
        _ => NwsError::io(path, e),
    })
}

/// Calls `f` on each line (terminator stripped). IO and UTF-8 failures
/// report the byte offset of the line being read.
pub fn for_each_line<F: FnMut(&str)>(path: &Path, mut f: F) -> Result<()> {
    let mut reader = BufReader::new(open(path)?);
    let mut offset = 0u64;
    let mut line = String::new();
    loop {
        line.clear();
        let n = reader
            .read_line(&mut line)
            .map_err(|source| NwsError::ReadAt { path: path.to_path_buf(), offset, source })?;
        if n == 0 {
            return Ok(());
        }
        offset += n as u64;
        f(line.trim_end_matches(['\n', '\r']));
    }
}

/// Hex SHA-256 of a file's contents.
pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| NwsError::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

#[derive(Debug, Clone)]
pub struct Embeddings {
    pub vocab: Vocabulary,
    pub table: EmbeddingTable,
    pub report: LoadReport,
}

/// Parses a word-vector text file.
pub fn load_embedding_file(path: &Path) -> Result<Embeddings> {
    let mut loader = EmbeddingLoader::new();
    for_each_line(path, |l| loader.push_line(l))?;
    let (vocab, table, report) =
        loader.finish().map_err(|source| NwsError::Core { path: path.to_path_buf(), source })?;
    Ok(Embeddings { vocab, table, report })
}

const CACHE_MAGIC: &[u8; 8] = b"NWSEMB\0\0";
const CACHE_VERSION: u32 = 1;

fn write_cache(path: &Path, checksum: &[u8; 32], vocab: &Vocabulary, table: &EmbeddingTable) -> Result<()> {
    let write = || -> io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(checksum)?;
        w.write_all(&(vocab.len() as u64).to_le_bytes())?;
        w.write_all(&(table.dim() as u64).to_le_bytes())?;
        for word in vocab.words() {
            w.write_all(&(word.len() as u32).to_le_bytes())?;
            w.write_all(word.as_bytes())?;
        }
        for x in table.as_slice() {
            w.write_all(&x.to_le_bytes())?;
        }
        w.flush()
    };
    write().map_err(|e| NwsError::io(path, e))
}

/// Reads a cache file; `Ok(None)` when it is stale, foreign or truncated.
fn read_cache(path: &Path, checksum: &[u8; 32]) -> Result<Option<(Vocabulary, EmbeddingTable)>> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(NwsError::io(path, e)),
    };
    let mut rest = bytes.as_slice();
    let mut take = |n: usize| -> Option<&[u8]> {
        if rest.len() < n {
            return None;
        }
        let (head, tail) = rest.split_at(n);
        rest = tail;
        Some(head)
    };
    let parsed = (|| {
        if take(8)? != CACHE_MAGIC || u32::from_le_bytes(take(4)?.try_into().ok()?) != CACHE_VERSION {
            return None;
        }
        if take(32)? != checksum {
            return None;
        }
        let rows = u64::from_le_bytes(take(8)?.try_into().ok()?) as usize;
        let dim = u64::from_le_bytes(take(8)?.try_into().ok()?) as usize;
        let mut words = Vec::with_capacity(rows);
        for _ in 0..rows {
            let len = u32::from_le_bytes(take(4)?.try_into().ok()?) as usize;
            words.push(String::from_utf8(take(len)?.to_vec()).ok()?);
        }
        let data: Vec<f64> = take(rows.checked_mul(dim)?.checked_mul(8)?)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let vocab = Vocabulary::from_words(words).ok()?;
        let table = EmbeddingTable::from_rows(dim, data).ok()?;
        (table.rows() == vocab.len()).then_some((vocab, table))
    })();
    Ok(parsed)
}

/// Loads embeddings through a binary cache keyed by the source file's
/// SHA-256. A missing or stale cache is rebuilt from the text file.
pub fn load_embeddings_cached(source: &Path, cache: &Path) -> Result<Embeddings> {
    let hex_sum = sha256_file(source)?;
    let mut checksum = [0u8; 32];
    hex::decode_to_slice(&hex_sum, &mut checksum).expect("sha256 hex is 32 bytes");
    if let Some((vocab, table)) = read_cache(cache, &checksum)? {
        let report = LoadReport { loaded: vocab.len(), ..LoadReport::default() };
        return Ok(Embeddings { vocab, table, report });
    }
    let loaded = load_embedding_file(source)?;
    write_cache(cache, &checksum, &loaded.vocab, &loaded.table)?;
    Ok(loaded)
}

/// Reads a corpus file: one sentence per line, blank line between documents.
pub fn read_corpus(path: &Path, vocab: &Vocabulary) -> Result<(Corpus, IngestReport)> {
    let mut builder = CorpusBuilder::new(vocab);
    for_each_line(path, |l| builder.push_line(l))?;
    builder.finish().map_err(|source| NwsError::Core { path: path.to_path_buf(), source })
}

/// Writes `contents` to `path` via a temporary sibling and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    fs::write(tmp, contents).map_err(|e| NwsError::io(tmp, e))?;
    fs::rename(tmp, path).map_err(|e| NwsError::io(path, e))
}
