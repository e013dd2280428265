//! Downloads benchmark networks and converts them to the `<name>.edges` /
//! `<name>.labels` layout read by the core crate.
//!
//! Each archive is hashed and the digest recorded in `MANIFEST.tsv` next to
//! the converted files, so later runs can tell which file variant they used.

use std::collections::BTreeSet;
use std::io::{Cursor, Read};
use std::path::{Path, PathBuf};

use hsbm_core::datasets::{edges_path, labels_path};
use hsbm_core::graph::{format_edge_list, format_labels, read_labels};
use hsbm_core::Graph;
use sha2::{Digest, Sha256};

use crate::gml;
use crate::CliError;

const NETDATA: &str = "https://websites.umich.edu/~mejn/netdata";

/// Where a dataset comes from and how to read its ground truth.
#[derive(Debug, Clone, Copy)]
pub struct Source {
    pub name: &'static str,
    pub url: Option<&'static str>,
    /// Node attribute holding the community label, if the file has one.
    pub label_key: Option<&'static str>,
    /// Keep only the largest connected component.
    pub largest_component: bool,
}

pub const SOURCES: &[Source] = &[
    Source {
        name: "karate",
        url: Some("karate.zip"),
        label_key: None,
        largest_component: false,
    },
    Source {
        name: "dolphins",
        url: Some("dolphins.zip"),
        label_key: None,
        largest_component: false,
    },
    Source {
        name: "football",
        url: Some("football.zip"),
        label_key: Some("value"),
        largest_component: false,
    },
    Source {
        name: "polbooks",
        url: Some("polbooks.zip"),
        label_key: Some("value"),
        largest_component: false,
    },
    Source {
        name: "polblogs",
        url: Some("polblogs.zip"),
        label_key: Some("value"),
        largest_component: true,
    },
    Source {
        name: "ukfaculty",
        url: None,
        label_key: Some("value"),
        largest_component: false,
    },
];

pub fn source(name: &str) -> Option<&'static Source> {
    SOURCES.iter().find(|s| s.name == name)
}

impl Source {
    pub fn default_url(&self) -> Option<String> {
        self.url.map(|file| format!("{NETDATA}/{file}"))
    }
}

#[derive(Debug, Clone)]
pub struct FetchRequest {
    pub name: String,
    pub url: Option<String>,
    /// Local `.gml` or `.zip` used instead of downloading.
    pub file: Option<PathBuf>,
    pub data_dir: PathBuf,
    /// Expected SHA-256 of the raw download, hex.
    pub sha256: Option<String>,
    /// Label file (`vertex label`, file order of the GML nodes) overriding
    /// the labels stored in the GML.
    pub labels: Option<PathBuf>,
    pub label_key: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchReport {
    pub name: String,
    pub origin: String,
    pub sha256: String,
    pub n: usize,
    pub edges: usize,
    pub dropped_self_loops: usize,
    pub dropped_vertices: usize,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn download(url: &str) -> Result<Vec<u8>, CliError> {
    let response = ureq::get(url)
        .call()
        .map_err(|e| CliError::Data(format!("download of {url} failed: {e}")))?;
    let mut bytes = Vec::new();
    response
        .into_reader()
        .read_to_end(&mut bytes)
        .map_err(|e| CliError::Data(format!("reading {url}: {e}")))?;
    Ok(bytes)
}

/// Returns the GML text of a raw download: either the file itself or the
/// first `.gml` member of a zip archive.
pub fn gml_text(bytes: &[u8]) -> Result<String, CliError> {
    if !bytes.starts_with(b"PK") {
        return String::from_utf8(bytes.to_vec())
            .map_err(|_| CliError::Data("GML file is not UTF-8".into()));
    }
    let mut archive = zip::ZipArchive::new(Cursor::new(bytes))
        .map_err(|e| CliError::Data(format!("bad zip archive: {e}")))?;
    let index = (0..archive.len())
        .find(|&i| {
            archive
                .by_index(i)
                .is_ok_and(|f| f.name().ends_with(".gml"))
        })
        .ok_or_else(|| CliError::Data("archive contains no .gml file".into()))?;
    let mut member = archive
        .by_index(index)
        .map_err(|e| CliError::Data(format!("bad zip member: {e}")))?;
    let mut raw = Vec::new();
    member.read_to_end(&mut raw)?;
    // Some of the classic files are Latin-1; labels are ASCII either way.
    Ok(String::from_utf8(raw.clone()).unwrap_or_else(|_| raw.iter().map(|&b| b as char).collect()))
}

/// Converted network: undirected simple graph plus one label per vertex.
#[derive(Debug, Clone)]
pub struct Converted {
    pub graph: Graph,
    pub labels: Vec<String>,
    pub dropped_self_loops: usize,
    pub dropped_vertices: usize,
}

/// Symmetrizes, collapses multi-edges and drops self-loops. Labels come from
/// `labels` when given, else from the node attribute `label_key`.
pub fn convert(
    parsed: &gml::GmlGraph,
    label_key: Option<&str>,
    labels: Option<Vec<String>>,
    largest_component: bool,
) -> Result<Converted, CliError> {
    let index = parsed.index();
    if index.len() != parsed.nodes.len() {
        return Err(CliError::Data("GML node ids are not unique".into()));
    }
    let mut pairs = BTreeSet::new();
    let mut dropped_self_loops = 0;
    for &(s, t) in &parsed.edges {
        let (Some(&a), Some(&b)) = (index.get(&s), index.get(&t)) else {
            return Err(CliError::Data(format!(
                "edge ({s}, {t}) refers to an unknown node"
            )));
        };
        if a == b {
            dropped_self_loops += 1;
        } else {
            pairs.insert((a.min(b), a.max(b)));
        }
    }
    let n = parsed.nodes.len();
    let graph = Graph::from_edges(n, pairs)?;

    let labels = match (labels, label_key) {
        (Some(l), _) => l,
        (None, Some(key)) => parsed
            .nodes
            .iter()
            .map(|node| {
                node.attr(key)
                    .map(|v| v.split_whitespace().collect::<Vec<_>>().join("_"))
                    .ok_or_else(|| {
                        CliError::Data(format!("node {} has no `{key}` attribute", node.id))
                    })
            })
            .collect::<Result<_, _>>()?,
        (None, None) => {
            return Err(CliError::Data(
                "this file carries no community labels; pass --labels <file>".into(),
            ))
        }
    };
    if labels.len() != n {
        return Err(CliError::Data(format!(
            "{} labels for {n} vertices",
            labels.len()
        )));
    }

    if !largest_component {
        return Ok(Converted {
            graph,
            labels,
            dropped_self_loops,
            dropped_vertices: 0,
        });
    }
    let (sub, kept) = graph.largest_component();
    Ok(Converted {
        graph: sub,
        labels: kept.iter().map(|&v| labels[v].clone()).collect(),
        dropped_self_loops,
        dropped_vertices: n - kept.len(),
    })
}

fn update_manifest(dir: &Path, report: &FetchReport) -> Result<(), CliError> {
    let path = dir.join("MANIFEST.tsv");
    let header = "name\tsha256\tn\tedges\torigin";
    let mut rows: Vec<String> = match std::fs::read_to_string(&path) {
        Ok(text) => text
            .lines()
            .skip(1)
            .filter(|l| !l.is_empty() && l.split('\t').next() != Some(report.name.as_str()))
            .map(str::to_string)
            .collect(),
        Err(_) => Vec::new(),
    };
    rows.push(format!(
        "{}\t{}\t{}\t{}\t{}",
        report.name, report.sha256, report.n, report.edges, report.origin
    ));
    rows.sort();
    let mut out = String::from(header);
    for r in rows {
        out.push('\n');
        out.push_str(&r);
    }
    out.push('\n');
    std::fs::write(path, out)?;
    Ok(())
}

pub fn fetch(req: &FetchRequest) -> Result<FetchReport, CliError> {
    let known = source(&req.name);
    let (bytes, origin) = match (&req.file, &req.url) {
        (Some(file), _) => (std::fs::read(file)?, file.display().to_string()),
        (None, Some(url)) => (download(url)?, url.clone()),
        (None, None) => {
            let url = known.and_then(Source::default_url).ok_or_else(|| {
                CliError::Usage(format!(
                    "no default source for `{}`; pass --url or --file",
                    req.name
                ))
            })?;
            (download(&url)?, url)
        }
    };
    let digest = sha256_hex(&bytes);
    if let Some(expected) = &req.sha256 {
        if !expected.eq_ignore_ascii_case(&digest) {
            return Err(CliError::Data(format!(
                "checksum mismatch: expected {expected}, got {digest}"
            )));
        }
    }

    let parsed = gml::parse(&gml_text(&bytes)?).map_err(|e| CliError::Data(format!("GML: {e}")))?;
    let labels = match &req.labels {
        Some(p) => Some(read_labels(p)?),
        None => None,
    };
    let label_key = req.label_key.as_deref().or(known.and_then(|s| s.label_key));
    let converted = convert(
        &parsed,
        label_key,
        labels,
        known.is_some_and(|s| s.largest_component),
    )?;

    std::fs::create_dir_all(&req.data_dir)?;
    std::fs::write(
        edges_path(&req.data_dir, &req.name),
        format_edge_list(&converted.graph),
    )?;
    std::fs::write(
        labels_path(&req.data_dir, &req.name),
        format_labels(&converted.labels),
    )?;
    let report = FetchReport {
        name: req.name.clone(),
        origin,
        sha256: digest,
        n: converted.graph.n(),
        edges: converted.graph.edge_count(),
        dropped_self_loops: converted.dropped_self_loops,
        dropped_vertices: converted.dropped_vertices,
    };
    update_manifest(&req.data_dir, &report)?;
    Ok(report)
}
