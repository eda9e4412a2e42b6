//! On-disk formats.
//!
//! Catalogs and datasets are JSON Lines, one record per line; blank lines are
//! skipped. Chains are a single JSON document. Level tables can be cached next
//! to a chain under a content hash of the chain.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use packseq_core::levels::{build_level_table, LevelTable};
use packseq_core::{BBox, Demonstration, MarkovChain, ObjectCatalog, ObjectId, ObjectSpec, StateId};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{io, Error, Result};

/// One catalog line: `{"id": "mug", "name": "Mug", "bbox": [w, d, h]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogRecord {
    pub id: ObjectId,
    pub name: String,
    pub bbox: [f64; 3],
}

impl From<&ObjectSpec> for CatalogRecord {
    fn from(o: &ObjectSpec) -> Self {
        CatalogRecord { id: o.id.clone(), name: o.name.clone(), bbox: [o.bbox.width, o.bbox.depth, o.bbox.height] }
    }
}

impl From<CatalogRecord> for ObjectSpec {
    fn from(r: CatalogRecord) -> Self {
        let [w, d, h] = r.bbox;
        ObjectSpec { id: r.id, name: r.name, bbox: BBox::new(w, d, h) }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(io(path))
}

/// Parses non-blank lines, tagging failures with their 1-based line number.
fn json_lines<T, R>(reader: R, path: &Path) -> Result<Vec<(usize, T)>>
where
    T: for<'de> Deserialize<'de>,
    R: BufRead,
{
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|source| Error::Parse { line: i + 1, source })?;
        out.push((i + 1, record));
    }
    Ok(out)
}

pub fn parse_catalog(reader: impl BufRead) -> Result<ObjectCatalog> {
    let records: Vec<(usize, CatalogRecord)> = json_lines(reader, Path::new("<catalog>"))?;
    Ok(ObjectCatalog::new(records.into_iter().map(|(_, r)| r.into()).collect())?)
}

pub fn load_catalog(path: &Path) -> Result<ObjectCatalog> {
    let records: Vec<(usize, CatalogRecord)> = json_lines(open(path)?, path)?;
    Ok(ObjectCatalog::new(records.into_iter().map(|(_, r)| r.into()).collect())?)
}

pub fn write_catalog(mut w: impl Write, catalog: &ObjectCatalog) -> io::Result<()> {
    for o in catalog.objects() {
        serde_json::to_writer(&mut w, &CatalogRecord::from(o))?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn parse_dataset(reader: impl BufRead, catalog: &ObjectCatalog) -> Result<Vec<Demonstration>> {
    read_dataset(reader, Path::new("<dataset>"), catalog)
}

/// Reads a dataset and validates every record against `catalog`.
pub fn load_dataset(path: &Path, catalog: &ObjectCatalog) -> Result<Vec<Demonstration>> {
    read_dataset(open(path)?, path, catalog)
}

fn read_dataset(reader: impl BufRead, path: &Path, catalog: &ObjectCatalog) -> Result<Vec<Demonstration>> {
    json_lines::<Demonstration, _>(reader, path)?
        .into_iter()
        .map(|(line, demo)| match demo.validate(catalog) {
            Ok(()) => Ok(demo),
            Err(source) => Err(Error::Invalid { line, source }),
        })
        .collect()
}

pub fn write_dataset(mut w: impl Write, demos: &[Demonstration]) -> io::Result<()> {
    for d in demos {
        serde_json::to_writer(&mut w, d)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn save_dataset(path: &Path, demos: &[Demonstration]) -> Result<()> {
    let file = File::create(path).map_err(io(path))?;
    write_dataset(BufWriter::new(file), demos).map_err(io(path))
}

pub const CHAIN_FORMAT: &str = "packseq-chain/1";

#[derive(Debug, Serialize, Deserialize)]
struct ChainDocument {
    format: String,
    states: Vec<StateId>,
    edges: Vec<EdgeRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeRecord {
    from: StateId,
    to: ObjectId,
    prob: f64,
}

/// Pretty JSON with states and edges in sorted order, so equal chains give
/// byte-identical documents.
pub fn chain_to_json(chain: &MarkovChain) -> String {
    let doc = ChainDocument {
        format: CHAIN_FORMAT.into(),
        states: chain.states().iter().cloned().collect(),
        edges: chain
            .edges()
            .map(|(from, to, prob)| EdgeRecord { from: from.clone(), to: to.clone(), prob })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("chain serializes")
}

pub fn chain_from_json(text: &str) -> Result<MarkovChain> {
    let doc: ChainDocument = serde_json::from_str(text).map_err(|source| Error::Document { what: "chain", source })?;
    if doc.format != CHAIN_FORMAT {
        return Err(Error::Version { what: "chain", found: doc.format });
    }
    let chain = MarkovChain::from_edges(doc.edges.into_iter().map(|e| (e.from, e.to, e.prob)))?;
    Ok(chain.with_states(doc.states))
}

pub fn load_chain(path: &Path) -> Result<MarkovChain> {
    chain_from_json(&fs::read_to_string(path).map_err(io(path))?)
}

pub fn save_chain(path: &Path, chain: &MarkovChain) -> Result<()> {
    fs::write(path, chain_to_json(chain) + "\n").map_err(io(path))
}

/// Hex SHA-256 of the chain's canonical document.
pub fn chain_digest(chain: &MarkovChain) -> String {
    hex::encode(Sha256::digest(chain_to_json(chain).as_bytes()))
}

pub fn table_cache_path(dir: &Path, chain: &MarkovChain) -> PathBuf {
    dir.join(format!("levels-{}.json", chain_digest(chain)))
}

/// Loads the chain's level table from `dir`, building and storing it when
/// missing or unreadable.
pub fn cached_level_table(chain: &MarkovChain, dir: &Path) -> Result<LevelTable> {
    let path = table_cache_path(dir, chain);
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(table) = serde_json::from_str(&text) {
            return Ok(table);
        }
    }
    let table = build_level_table(chain, None);
    fs::create_dir_all(dir).map_err(io(dir))?;
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_vec(&table).expect("table serializes")).map_err(io(&tmp))?;
    fs::rename(&tmp, &path).map_err(io(&path))?;
    Ok(table)
}
