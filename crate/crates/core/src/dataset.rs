//! Syndrome images on a 2d x 2d grid and the SEMD dataset file format.
//!
//! SEMD layout, all little-endian:
//!
//! | offset | size | field                                      |
//! |--------|------|--------------------------------------------|
//! | 0      | 4    | magic `SEMD`                               |
//! | 4      | 1    | version (1)                                |
//! | 5      | 1    | distance d                                 |
//! | 6      | 1    | noise kind (0 independent, 1 depolarizing) |
//! | 7      | 8    | p_eff, f64                                 |
//! | 15     | 8    | record count, u64                          |
//! | 23     | ...  | records                                    |
//!
//! Each record is the 4d² image cells (row 1 first, columns ascending, one
//! byte per cell) followed by one label byte.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;

use thiserror::Error;

use crate::bits::Mask;
use crate::noise::NoiseKind;
use crate::syndrome::SyndromeSample;

pub const MAGIC: &[u8; 4] = b"SEMD";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: u64 = 23;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("bad magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0}")]
    BadVersion(u8),
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("file truncated at byte {offset}")]
    TruncatedFile { offset: u64 },
    #[error("{extra} unexpected bytes after the last record")]
    TrailingBytes { extra: u64 },
    #[error("record {record}: label {label} out of range")]
    LabelOutOfRange { record: u64, label: u8 },
    #[error("record {record}: cell value {value} is not a bit")]
    InvalidCell { record: u64, value: u8 },
    #[error("expected {expected} values, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Grid cells in {0, 1}; row 1 is the bottom row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndromeImage {
    d: usize,
    cells: Vec<u8>,
}

impl SyndromeImage {
    pub fn zeros(d: usize) -> Self {
        SyndromeImage { d, cells: vec![0; 4 * d * d] }
    }

    pub fn from_cells(d: usize, cells: Vec<u8>) -> Result<Self, DatasetError> {
        if cells.len() != 4 * d * d {
            return Err(DatasetError::SizeMismatch { expected: 4 * d * d, got: cells.len() });
        }
        Ok(SyndromeImage { d, cells })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn side(&self) -> usize {
        2 * self.d
    }

    /// Cell `(i, j)`, both 1-based.
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.cells[(i - 1) * self.side() + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: u8) {
        let side = self.side();
        self.cells[(i - 1) * side + (j - 1)] = value;
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }
}

/// 1-based image position of vertex `v` (0-based).
pub fn vertex_cell(d: usize, v: usize) -> (usize, usize) {
    let row = (v / (2 * d)) as i64;
    let i = 2 * row + 1;
    let j = (v as i64 + (1 - 2 * d as i64) * row).rem_euclid(2 * d as i64) + 1;
    (i as usize, j as usize)
}

/// 1-based image position of plaquette `p` (0-based).
pub fn plaquette_cell(d: usize, p: usize) -> (usize, usize) {
    let row = (p / d) as i64;
    let i = 2 * row + 2;
    let j = (2 * (p as i64 + 1) + (1 - 4 * d as i64) * row).rem_euclid(2 * d as i64) + 1;
    (i as usize, j as usize)
}

pub fn syndrome_to_image(d: usize, vertex_bits: &Mask, plaquette_bits: &Mask) -> Result<SyndromeImage, DatasetError> {
    if vertex_bits.len() != 2 * d * d {
        return Err(DatasetError::SizeMismatch { expected: 2 * d * d, got: vertex_bits.len() });
    }
    if plaquette_bits.len() != d * d {
        return Err(DatasetError::SizeMismatch { expected: d * d, got: plaquette_bits.len() });
    }
    let mut img = SyndromeImage::zeros(d);
    for v in vertex_bits.iter_ones() {
        let (i, j) = vertex_cell(d, v);
        img.set(i, j, 1);
    }
    for p in plaquette_bits.iter_ones() {
        let (i, j) = plaquette_cell(d, p);
        img.set(i, j, 1);
    }
    Ok(img)
}

pub fn sample_to_image(d: usize, sample: &SyndromeSample) -> Result<SyndromeImage, DatasetError> {
    syndrome_to_image(d, &sample.vertex_bits, &sample.plaquette_bits)
}

/// Recover `(vertex_bits, plaquette_bits)` from an image.
pub fn image_to_syndrome(img: &SyndromeImage) -> (Mask, Mask) {
    let d = img.d;
    let vertices = Mask::from_indices(2 * d * d, (0..2 * d * d).filter(|&v| {
        let (i, j) = vertex_cell(d, v);
        img.get(i, j) == 1
    }));
    let plaquettes = Mask::from_indices(d * d, (0..d * d).filter(|&p| {
        let (i, j) = plaquette_cell(d, p);
        img.get(i, j) == 1
    }));
    (vertices, plaquettes)
}

/// Pad by `w` cells on every side following the torus. Moving 2d rows up
/// shifts columns by d, so the top and bottom bands are offset by d.
pub fn periodic_pad(img: &SyndromeImage, w: usize) -> Vec<Vec<u8>> {
    let side = img.side() as i64;
    let d = img.d as i64;
    let w = w as i64;
    (0..side + 2 * w)
        .map(|pi| {
            let i = pi - w;
            let k = i.div_euclid(side);
            let row = i - k * side;
            (0..side + 2 * w)
                .map(|pj| {
                    let col = (pj - w + k * d).rem_euclid(side);
                    img.cells[(row * side + col) as usize]
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetHeader {
    pub d: u8,
    pub noise: NoiseKind,
    pub p_eff: f64,
    pub record_count: u64,
}

impl DatasetHeader {
    pub fn record_len(&self) -> usize {
        4 * self.d as usize * self.d as usize + 1
    }

    pub fn file_len(&self) -> u64 {
        HEADER_LEN + self.record_count * self.record_len() as u64
    }

    fn to_bytes(self) -> [u8; HEADER_LEN as usize] {
        let mut b = [0u8; HEADER_LEN as usize];
        b[..4].copy_from_slice(MAGIC);
        b[4] = VERSION;
        b[5] = self.d;
        b[6] = self.noise.code();
        b[7..15].copy_from_slice(&self.p_eff.to_le_bytes());
        b[15..23].copy_from_slice(&self.record_count.to_le_bytes());
        b
    }

    fn parse(b: &[u8]) -> Result<Self, DatasetError> {
        if b.len() < HEADER_LEN as usize {
            return Err(DatasetError::TruncatedFile { offset: b.len() as u64 });
        }
        let magic: [u8; 4] = b[..4].try_into().unwrap();
        if &magic != MAGIC {
            return Err(DatasetError::BadMagic(magic));
        }
        if b[4] != VERSION {
            return Err(DatasetError::BadVersion(b[4]));
        }
        if b[5] < 2 {
            return Err(DatasetError::BadHeader(format!("distance {}", b[5])));
        }
        let noise = NoiseKind::from_code(b[6]).ok_or_else(|| DatasetError::BadHeader(format!("noise kind {}", b[6])))?;
        Ok(DatasetHeader {
            d: b[5],
            noise,
            p_eff: f64::from_le_bytes(b[7..15].try_into().unwrap()),
            record_count: u64::from_le_bytes(b[15..23].try_into().unwrap()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetRecord {
    pub image: SyndromeImage,
    pub label: u8,
}

fn check_record(record: &DatasetRecord, index: u64) -> Result<(), DatasetError> {
    if record.label >= 16 {
        return Err(DatasetError::LabelOutOfRange { record: index, label: record.label });
    }
    if let Some(&value) = record.image.cells.iter().find(|&&c| c > 1) {
        return Err(DatasetError::InvalidCell { record: index, value });
    }
    Ok(())
}

/// Streaming writer; the record count is patched on `finish`.
pub struct DatasetWriter {
    out: BufWriter<File>,
    header: DatasetHeader,
}

impl DatasetWriter {
    pub fn create(path: &Path, d: u8, noise: NoiseKind, p_eff: f64) -> Result<Self, DatasetError> {
        let header = DatasetHeader { d, noise, p_eff, record_count: 0 };
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(&header.to_bytes())?;
        Ok(DatasetWriter { out, header })
    }

    pub fn push(&mut self, record: &DatasetRecord) -> Result<(), DatasetError> {
        if record.image.d != self.header.d as usize {
            return Err(DatasetError::SizeMismatch { expected: self.header.record_len() - 1, got: record.image.cells.len() });
        }
        check_record(record, self.header.record_count)?;
        self.out.write_all(&record.image.cells)?;
        self.out.write_all(&[record.label])?;
        self.header.record_count += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<DatasetHeader, DatasetError> {
        self.out.seek(SeekFrom::Start(0))?;
        self.out.write_all(&self.header.to_bytes())?;
        self.out.flush()?;
        Ok(self.header)
    }
}

pub fn write_dataset<'a>(
    path: &Path,
    d: u8,
    noise: NoiseKind,
    p_eff: f64,
    records: impl IntoIterator<Item = &'a DatasetRecord>,
) -> Result<DatasetHeader, DatasetError> {
    let mut w = DatasetWriter::create(path, d, noise, p_eff)?;
    for r in records {
        w.push(r)?;
    }
    w.finish()
}

/// Streaming reader that validates the length arithmetic up front.
pub struct DatasetReader {
    input: BufReader<File>,
    header: DatasetHeader,
    next: u64,
}

impl DatasetReader {
    pub fn open(path: &Path) -> Result<Self, DatasetError> {
        let file = File::open(path)?;
        let actual = file.metadata()?.len();
        let mut input = BufReader::new(file);
        let mut head = Vec::with_capacity(HEADER_LEN as usize);
        input.by_ref().take(HEADER_LEN).read_to_end(&mut head)?;
        let header = DatasetHeader::parse(&head)?;
        let expected = header.file_len();
        if actual < expected {
            let rl = header.record_len() as u64;
            let whole = (actual - HEADER_LEN) / rl;
            return Err(DatasetError::TruncatedFile { offset: HEADER_LEN + whole * rl });
        }
        if actual > expected {
            return Err(DatasetError::TrailingBytes { extra: actual - expected });
        }
        Ok(DatasetReader { input, header, next: 0 })
    }

    pub fn header(&self) -> &DatasetHeader {
        &self.header
    }

    fn read_one(&mut self) -> Result<DatasetRecord, DatasetError> {
        let mut buf = vec![0u8; self.header.record_len()];
        let offset = HEADER_LEN + self.next * buf.len() as u64;
        self.input.read_exact(&mut buf).map_err(|e| match e.kind() {
            io::ErrorKind::UnexpectedEof => DatasetError::TruncatedFile { offset },
            _ => DatasetError::Io(e),
        })?;
        let label = buf.pop().unwrap();
        let record = DatasetRecord { image: SyndromeImage { d: self.header.d as usize, cells: buf }, label };
        check_record(&record, self.next)?;
        self.next += 1;
        Ok(record)
    }
}

impl Iterator for DatasetReader {
    type Item = Result<DatasetRecord, DatasetError>;

    fn next(&mut self) -> Option<Self::Item> {
        (self.next < self.header.record_count).then(|| self.read_one())
    }
}

pub fn read_dataset(path: &Path) -> Result<(DatasetHeader, Vec<DatasetRecord>), DatasetError> {
    let reader = DatasetReader::open(path)?;
    let header = *reader.header();
    let records = reader.collect::<Result<Vec<_>, _>>()?;
    Ok((header, records))
}

/// One row per record: cells `c0..c{4d²-1}` then `label`.
pub fn export_csv<'a>(d: usize, records: impl IntoIterator<Item = &'a DatasetRecord>, path: &Path) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_path(path)?;
    let mut head: Vec<String> = (0..4 * d * d).map(|c| format!("c{c}")).collect();
    head.push("label".into());
    w.write_record(&head)?;
    for r in records {
        let mut row: Vec<String> = r.image.cells.iter().map(|c| c.to_string()).collect();
        row.push(r.label.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_round_trip() {
        let h = DatasetHeader { d: 7, noise: NoiseKind::Depolarizing, p_eff: 0.0875, record_count: 12 };
        assert_eq!(DatasetHeader::parse(&h.to_bytes()).unwrap(), h);
        assert_eq!(h.file_len(), HEADER_LEN + 12 * 197);
    }
}
