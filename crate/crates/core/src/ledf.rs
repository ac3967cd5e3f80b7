//! Layerwise Embedding Dump Format.
//!
//! A dump is a fixed 36-byte little-endian header, a length-prefixed UTF-8
//! model id, a UTF-8 JSON array of [`ItemRecord`]s, and then `layer_count`
//! row-major `item_count x dim` matrices of little-endian `f32`, one layer
//! after another.
//!
//! ```text
//! 0..4    magic "LEDF"
//! 4..8    format version (u32, = 1)
//! 8..12   layer_count (u32)
//! 12..16  dim (u32)
//! 16..24  item_count (u64)
//! 24..28  item_kind code (u32)
//! 28..36  metadata_bytes (u64)
//! 36..    model_id: u32 length + bytes, metadata JSON, matrices
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const MAGIC: [u8; 4] = *b"LEDF";
pub const FORMAT_VERSION: u32 = 1;
pub const FIXED_HEADER_LEN: usize = 36;

// Upper bound on a single buffer growth step while reading, so a lying
// header cannot force a large allocation before the data actually arrives.
const READ_CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ItemKind {
    Word,
    Sentence,
    CorpusToken,
}

impl ItemKind {
    pub fn code(self) -> u32 {
        match self {
            ItemKind::Word => 0,
            ItemKind::Sentence => 1,
            ItemKind::CorpusToken => 2,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        match code {
            0 => Some(ItemKind::Word),
            1 => Some(ItemKind::Sentence),
            2 => Some(ItemKind::CorpusToken),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DumpHeader {
    pub format_version: u32,
    pub model_id: String,
    /// Layers including the embedding layer at index 0.
    pub layer_count: u32,
    pub dim: u32,
    pub item_count: u64,
    pub item_kind: ItemKind,
    pub metadata_bytes: u64,
}

impl DumpHeader {
    fn encode_fixed(&self) -> [u8; FIXED_HEADER_LEN] {
        let mut buf = [0u8; FIXED_HEADER_LEN];
        buf[0..4].copy_from_slice(&MAGIC);
        buf[4..8].copy_from_slice(&self.format_version.to_le_bytes());
        buf[8..12].copy_from_slice(&self.layer_count.to_le_bytes());
        buf[12..16].copy_from_slice(&self.dim.to_le_bytes());
        buf[16..24].copy_from_slice(&self.item_count.to_le_bytes());
        buf[24..28].copy_from_slice(&self.item_kind.code().to_le_bytes());
        buf[28..36].copy_from_slice(&self.metadata_bytes.to_le_bytes());
        buf
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemRecord {
    pub id: u64,
    /// Word or sentence text.
    pub surface: String,
    /// Task name or corpus id the item came from.
    pub source_tag: String,
    /// Position of the selected token in the encoded sequence.
    #[serde(default)]
    pub token_position: Option<u64>,
}

impl ItemRecord {
    pub fn new(id: u64, surface: impl Into<String>, source_tag: impl Into<String>) -> Self {
        Self {
            id,
            surface: surface.into(),
            source_tag: source_tag.into(),
            token_position: None,
        }
    }

    pub fn with_position(mut self, position: u64) -> Self {
        self.token_position = Some(position);
        self
    }
}

/// A layer stack of embeddings plus per-item metadata.
///
/// Fields are public so that dumps can be assembled and inspected freely;
/// [`EmbeddingDump::validate`] checks every invariant and runs on both
/// [`write_dump`] and [`read_dump`].
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingDump {
    pub header: DumpHeader,
    pub items: Vec<ItemRecord>,
    pub layers: Vec<Matrix>,
}

impl EmbeddingDump {
    /// Assembles a dump, deriving the header from the parts, and validates it.
    pub fn new(
        model_id: impl Into<String>,
        item_kind: ItemKind,
        items: Vec<ItemRecord>,
        layers: Vec<Matrix>,
    ) -> Result<Self> {
        let dim = layers.first().map_or(0, Matrix::cols);
        let header = DumpHeader {
            format_version: FORMAT_VERSION,
            model_id: model_id.into(),
            layer_count: to_u32(layers.len(), "layer_count")?,
            dim: to_u32(dim, "dim")?,
            item_count: items.len() as u64,
            item_kind,
            metadata_bytes: encode_metadata(&items)?.len() as u64,
        };
        let dump = Self {
            header,
            items,
            layers,
        };
        dump.validate()?;
        Ok(dump)
    }

    pub fn layer_count(&self) -> usize {
        self.header.layer_count as usize
    }

    pub fn dim(&self) -> usize {
        self.header.dim as usize
    }

    pub fn item_count(&self) -> usize {
        self.header.item_count as usize
    }

    pub fn layer(&self, layer: usize) -> Result<&Matrix> {
        self.layers.get(layer).ok_or_else(|| {
            Error::OutOfRange(format!(
                "layer {layer} (dump has {} layers)",
                self.layers.len()
            ))
        })
    }

    pub fn vector(&self, layer: usize, id: usize) -> Result<&[f32]> {
        let m = self.layer(layer)?;
        if id >= m.rows() {
            return Err(Error::OutOfRange(format!(
                "item {id} (dump has {} items)",
                m.rows()
            )));
        }
        Ok(m.row(id))
    }

    /// Copies the rows `ids` of `layer`, in the order given.
    pub fn select_rows(&self, layer: usize, ids: &[usize]) -> Result<Matrix> {
        let m = self.layer(layer)?;
        let mut data = Vec::with_capacity(ids.len() * m.cols());
        for &id in ids {
            data.extend_from_slice(self.vector(layer, id)?);
        }
        Matrix::new(ids.len(), m.cols(), data)
    }

    /// Cheap structural check used by the analysis routines: header and
    /// matrix shapes agree. Does not scan values.
    pub fn check_shape(&self) -> Result<()> {
        let h = &self.header;
        if h.layer_count == 0 || h.dim == 0 || h.item_count == 0 {
            return Err(Error::Shape(format!(
                "layer_count, dim and item_count must be positive (got {}, {}, {})",
                h.layer_count, h.dim, h.item_count
            )));
        }
        if self.layers.len() != self.layer_count() {
            return Err(Error::Shape(format!(
                "header declares {} layers, dump holds {}",
                h.layer_count,
                self.layers.len()
            )));
        }
        for (l, m) in self.layers.iter().enumerate() {
            if m.rows() != self.item_count() || m.cols() != self.dim() {
                return Err(Error::Shape(format!(
                    "layer {l} is {} x {}, header declares {} x {}",
                    m.rows(),
                    m.cols(),
                    h.item_count,
                    h.dim
                )));
            }
        }
        if self.items.len() != self.item_count() {
            return Err(Error::MetadataCountMismatch {
                declared: h.item_count,
                found: self.items.len(),
            });
        }
        Ok(())
    }

    /// Checks every format invariant: shapes, item ids, surfaces, finiteness.
    pub fn validate(&self) -> Result<()> {
        if self.header.format_version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(self.header.format_version));
        }
        self.check_shape()?;
        validate_items(&self.items)?;
        for (l, m) in self.layers.iter().enumerate() {
            if let Some(pos) = m.as_slice().iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite {
                    layer: l,
                    item: pos / m.cols(),
                    column: pos % m.cols(),
                });
            }
        }
        Ok(())
    }
}

fn validate_items(items: &[ItemRecord]) -> Result<()> {
    for (i, item) in items.iter().enumerate() {
        if item.id != i as u64 {
            return Err(Error::InvalidMetadata(format!(
                "item at position {i} has id {}; ids must run 0..item_count without gaps",
                item.id
            )));
        }
        if item.surface.is_empty() {
            return Err(Error::InvalidMetadata(format!("item {i} has an empty surface")));
        }
    }
    Ok(())
}

fn to_u32(n: usize, what: &str) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::Shape(format!("{what} {n} exceeds u32")))
}

fn encode_metadata(items: &[ItemRecord]) -> Result<Vec<u8>> {
    serde_json::to_vec(items).map_err(|e| Error::InvalidMetadata(e.to_string()))
}

/// Serializes `dump`, returning the number of bytes written.
///
/// The dump is validated in full before the first byte goes out.
pub fn write_dump<W: Write>(dump: &EmbeddingDump, mut sink: W) -> Result<u64> {
    dump.validate()?;
    let metadata = encode_metadata(&dump.items)?;
    if metadata.len() as u64 != dump.header.metadata_bytes {
        return Err(Error::InvalidMetadata(format!(
            "header declares {} metadata bytes, items encode to {}",
            dump.header.metadata_bytes,
            metadata.len()
        )));
    }
    let model_id = dump.header.model_id.as_bytes();
    let model_id_len = to_u32(model_id.len(), "model_id length")?;

    sink.write_all(&dump.header.encode_fixed())?;
    sink.write_all(&model_id_len.to_le_bytes())?;
    sink.write_all(model_id)?;
    sink.write_all(&metadata)?;
    let mut written = (FIXED_HEADER_LEN + 4 + model_id.len() + metadata.len()) as u64;

    let mut buf = Vec::with_capacity(dump.item_count() * dump.dim() * 4);
    for m in &dump.layers {
        buf.clear();
        for x in m.as_slice() {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        sink.write_all(&buf)?;
        written += buf.len() as u64;
    }
    sink.flush()?;
    Ok(written)
}

pub fn write_dump_file(dump: &EmbeddingDump, path: impl AsRef<Path>) -> Result<u64> {
    let file = File::create(path)?;
    write_dump(dump, BufWriter::new(file))
}

struct OffsetReader<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> OffsetReader<R> {
    /// Reads exactly `len` bytes, growing the buffer in bounded steps.
    fn take(&mut self, len: u64) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(len.min(READ_CHUNK as u64) as usize);
        let mut remaining = len;
        let mut chunk = [0u8; READ_CHUNK];
        while remaining > 0 {
            let want = remaining.min(READ_CHUNK as u64) as usize;
            let got = self.fill(&mut chunk[..want])?;
            out.extend_from_slice(&chunk[..got]);
            if got < want {
                return Err(Error::Truncated {
                    offset: self.offset,
                });
            }
            remaining -= got as u64;
        }
        Ok(out)
    }

    fn take_array<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        let got = self.fill(&mut buf)?;
        if got < N {
            return Err(Error::Truncated {
                offset: self.offset,
            });
        }
        Ok(buf)
    }

    /// Fills as much of `buf` as the stream allows; returns the count.
    fn fill(&mut self, buf: &mut [u8]) -> Result<usize> {
        let mut got = 0;
        while got < buf.len() {
            match self.inner.read(&mut buf[got..]) {
                Ok(0) => break,
                Ok(n) => {
                    got += n;
                    self.offset += n as u64;
                }
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        Ok(got)
    }
}

fn le_u32(b: &[u8]) -> u32 {
    u32::from_le_bytes(b.try_into().expect("4 bytes"))
}

fn le_u64(b: &[u8]) -> u64 {
    u64::from_le_bytes(b.try_into().expect("8 bytes"))
}

/// Parses and validates a dump. Never returns a partially-read value.
pub fn read_dump<R: Read>(source: R) -> Result<EmbeddingDump> {
    let mut r = OffsetReader {
        inner: source,
        offset: 0,
    };

    let magic: [u8; 4] = r.take_array()?;
    if magic != MAGIC {
        return Err(Error::NotLedf);
    }
    let fixed: [u8; FIXED_HEADER_LEN - 4] = r.take_array()?;
    let format_version = le_u32(&fixed[0..4]);
    if format_version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(format_version));
    }
    let layer_count = le_u32(&fixed[4..8]);
    let dim = le_u32(&fixed[8..12]);
    let item_count = le_u64(&fixed[12..20]);
    let kind_code = le_u32(&fixed[20..24]);
    let metadata_bytes = le_u64(&fixed[24..32]);
    let item_kind = ItemKind::from_code(kind_code)
        .ok_or_else(|| Error::InvalidMetadata(format!("unknown item kind code {kind_code}")))?;
    if layer_count == 0 || dim == 0 || item_count == 0 {
        return Err(Error::InvalidMetadata(format!(
            "layer_count, dim and item_count must be positive (got {layer_count}, {dim}, {item_count})"
        )));
    }
    let layer_bytes = item_count
        .checked_mul(dim as u64)
        .and_then(|n| n.checked_mul(4))
        .filter(|&n| usize::try_from(n).is_ok())
        .ok_or_else(|| Error::InvalidMetadata("declared matrix size overflows".into()))?;

    let id_len = le_u32(&r.take_array::<4>()?);
    let model_id = String::from_utf8(r.take(id_len as u64)?)
        .map_err(|_| Error::InvalidMetadata("model_id is not UTF-8".into()))?;

    let metadata = r.take(metadata_bytes)?;
    let items: Vec<ItemRecord> = serde_json::from_slice(&metadata)
        .map_err(|e| Error::InvalidMetadata(format!("metadata JSON: {e}")))?;
    if items.len() as u64 != item_count {
        return Err(Error::MetadataCountMismatch {
            declared: item_count,
            found: items.len(),
        });
    }
    validate_items(&items)?;

    let mut layers = Vec::with_capacity(layer_count.min(1024) as usize);
    for _ in 0..layer_count {
        let bytes = r.take(layer_bytes)?;
        let values = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect();
        layers.push(Matrix::new(item_count as usize, dim as usize, values)?);
    }
    let mut probe = [0u8; 1];
    if r.fill(&mut probe)? != 0 {
        return Err(Error::InvalidMetadata(format!(
            "trailing bytes after the last matrix at byte {}",
            r.offset - 1
        )));
    }

    let dump = EmbeddingDump {
        header: DumpHeader {
            format_version,
            model_id,
            layer_count,
            dim,
            item_count,
            item_kind,
            metadata_bytes,
        },
        items,
        layers,
    };
    dump.validate()?;
    Ok(dump)
}

pub fn read_dump_file(path: impl AsRef<Path>) -> Result<EmbeddingDump> {
    let file = File::open(path)?;
    read_dump(BufReader::new(file))
}
