//! CSV and PNG artifacts. Every CSV starts with `#` comment lines naming
//! the tool version, the configuration hash and the seed, followed by a
//! header row.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::image::ImageMap;
use crate::linalg::C64;
use crate::synth::FieldSamples;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// What produced an artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(config_hash: impl Into<String>, seed: u64) -> Self {
        Self {
            config_hash: config_hash.into(),
            seed,
        }
    }

    fn header_lines(&self) -> String {
        format!(
            "# waveguide-imaging {VERSION}\n# config-hash: {}\n# seed: {}\n",
            self.config_hash, self.seed
        )
    }
}

/// Writes a commented header, a column row, and one record per row.
pub fn write_csv<I, R>(path: &Path, prov: &Provenance, columns: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut file = BufWriter::new(File::create(path)?);
    file.write_all(prov.header_lines().as_bytes())?;
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(columns)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Parsed CSV artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r.get(idx)?.parse().ok()).collect()
    }

    /// Value of a `# key: value` comment line.
    pub fn comment(&self, key: &str) -> Option<&str> {
        self.comments
            .iter()
            .find_map(|c| c.strip_prefix(key)?.strip_prefix(':').map(str::trim))
    }
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let text = std::fs::read_to_string(path)?;
    let comments = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.trim_start_matches('#').trim().to_string())
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let columns = reader.headers()?.iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(String::from).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok(CsvTable {
        comments,
        columns,
        rows,
    })
}

fn num(v: f64) -> String {
    v.to_string()
}

/// `index,value`, one-based.
pub fn write_spectrum(path: &Path, prov: &Provenance, spectrum: &[f64]) -> Result<()> {
    write_csv(
        path,
        prov,
        &["index", "value"],
        spectrum
            .iter()
            .enumerate()
            .map(|(i, v)| vec![(i + 1).to_string(), num(*v)]),
    )
}

/// `x,z,re,im` per sample.
pub fn write_field(path: &Path, prov: &Provenance, fs: &FieldSamples) -> Result<()> {
    write_csv(
        path,
        prov,
        &["x", "z", "re", "im"],
        fs.points
            .iter()
            .zip(fs.values.iter())
            .map(|(p, v)| vec![num(p.x), num(p.z), num(v.re), num(v.im)]),
    )
}

/// `row,col,re,im` per entry, row-major.
pub fn write_matrix(path: &Path, prov: &Provenance, m: &DMatrix<C64>) -> Result<()> {
    let (r, c) = m.shape();
    write_csv(
        path,
        prov,
        &["row", "col", "re", "im"],
        (0..r).flat_map(|i| {
            (0..c).map(move |j| vec![i.to_string(), j.to_string(), num(m[(i, j)].re), num(m[(i, j)].im)])
        }),
    )
}

/// `x,z,value` with `|I|` normalized by its maximum.
pub fn write_image(path: &Path, prov: &Provenance, im: &ImageMap) -> Result<()> {
    let norm = im.normalized_modulus();
    write_csv(
        path,
        prov,
        &["x", "z", "value"],
        im.xs.iter().enumerate().flat_map(|(ix, &x)| {
            let norm = &norm;
            im.zs
                .iter()
                .enumerate()
                .map(move |(iz, &z)| vec![num(x), num(z), num(norm[(ix, iz)])])
        }),
    )
}

/// Color stops of the heatmap palette, from 0 (dark blue) through teal and
/// green to 1 (yellow), interpolated linearly in RGB.
pub const COLORMAP: [[u8; 3]; 5] = [
    [68, 1, 84],
    [59, 82, 139],
    [33, 145, 140],
    [94, 201, 98],
    [253, 231, 37],
];

pub fn colormap(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0) * (COLORMAP.len() - 1) as f64;
    let i = (t.floor() as usize).min(COLORMAP.len() - 2);
    let f = t - i as f64;
    let mut out = [0u8; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let (a, b) = (COLORMAP[i][c] as f64, COLORMAP[i + 1][c] as f64);
        *o = (a + (b - a) * f).round() as u8;
    }
    out
}

/// Heatmap of the normalized modulus: range along the horizontal axis,
/// depth increasing downwards.
pub fn write_png(path: &Path, im: &ImageMap) -> Result<()> {
    let norm = im.normalized_modulus();
    let (nx, nz) = norm.shape();
    let img = image::RgbImage::from_fn(nx as u32, nz as u32, |px, py| {
        image::Rgb(colormap(norm[(px as usize, py as usize)]))
    });
    img.save(path)
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}
