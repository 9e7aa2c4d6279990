//! Text formats: TAB-separated edge lists, similarity datasets, judgments,
//! sense inventories and WSD instances, plus word2vec text embeddings.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use path2vec_core::{
    EmbeddingMatrix, Graph, GraphBuilder, JudgmentPair, LabelTable, PathSample, SenseInventory,
    SimilarityDataset, SimilarityRecord, WsdInstance, WsdToken,
};

use crate::error::{Error, Result};

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| Error::File {
            path: path.to_path_buf(),
            source,
        })
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::File {
            path: path.to_path_buf(),
            source,
        })
}

/// Yields `(line_number, line)` with line endings stripped.
fn numbered_lines<R: BufRead>(r: R) -> impl Iterator<Item = Result<(usize, String)>> {
    r.lines().enumerate().map(|(i, l)| {
        let mut l = l?;
        if l.ends_with('\r') {
            l.pop();
        }
        Ok((i + 1, l))
    })
}

/// Blank lines and `#` comments.
fn skip(line: &str) -> bool {
    line.trim().is_empty() || line.starts_with('#')
}

fn parse_f64(line: usize, field: &str, what: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::parse(line, format!("{what} `{field}` is not a number")))
}

/// Reads `a<TAB>b[<TAB>weight]` lines; `#root<TAB>label` names the root.
pub fn read_graph<R: BufRead>(r: R) -> Result<Graph> {
    let mut b = GraphBuilder::new();
    let mut root: Option<String> = None;
    for item in numbered_lines(r) {
        let (no, line) = item?;
        if let Some(rest) = line.strip_prefix("#root\t") {
            let label = rest.trim();
            if label.is_empty() {
                return Err(Error::parse(no, "root directive without a label"));
            }
            if root.is_some() {
                return Err(Error::parse(no, "root declared twice"));
            }
            root = Some(label.to_string());
            continue;
        }
        if skip(&line) {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let weight = match fields.len() {
            2 => None,
            3 => Some(parse_f64(no, fields[2], "weight")?),
            n => {
                return Err(Error::parse(
                    no,
                    format!("expected 2 or 3 TAB-separated fields, found {n}"),
                ))
            }
        };
        b.add_edge(fields[0], fields[1], weight)
            .map_err(|e| Error::parse(no, e.to_string()))?;
    }
    if let Some(label) = &root {
        b.set_root(label);
    }
    Ok(b.build()?)
}

pub fn load_graph(path: &Path) -> Result<Graph> {
    read_graph(open(path)?)
}

/// Writes `#metric<TAB>name` then `u<TAB>v<TAB>s`; `s` uses the shortest
/// decimal that parses back to the same value.
pub fn write_dataset<W: Write>(d: &SimilarityDataset, mut w: W) -> Result<()> {
    let labels = d.labels();
    writeln!(w, "#metric\t{}", d.metric_name())?;
    for r in d.records() {
        writeln!(w, "{}\t{}\t{}", labels.label(r.u), labels.label(r.v), r.s)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dataset<R: BufRead>(r: R, labels: &LabelTable) -> Result<SimilarityDataset> {
    let mut metric = String::from("custom");
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for item in numbered_lines(r) {
        let (no, line) = item?;
        if let Some(name) = line.strip_prefix("#metric\t") {
            metric = name.trim().to_string();
            continue;
        }
        if skip(&line) {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                no,
                format!("expected 3 TAB-separated fields, found {}", fields.len()),
            ));
        }
        let resolve = |s: &str| {
            labels
                .resolve(s)
                .map_err(|e| Error::parse(no, e.to_string()))
        };
        let (u, v) = (resolve(fields[0])?, resolve(fields[1])?);
        let s = parse_f64(no, fields[2], "similarity")?;
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::parse(
                no,
                format!("similarity must be positive, got {s}"),
            ));
        }
        if u == v {
            return Err(Error::parse(no, "record pairs a node with itself"));
        }
        let rec = SimilarityRecord { u, v, s };
        if !seen.insert(rec.unordered()) {
            return Err(Error::parse(no, "duplicate pair"));
        }
        records.push(rec);
    }
    Ok(SimilarityDataset::new(labels.clone(), metric, records)?)
}

pub fn load_dataset(path: &Path, labels: &LabelTable) -> Result<SimilarityDataset> {
    read_dataset(open(path)?, labels)
}

/// `%g`-style rendering with 6 significant digits.
pub fn format_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    } else {
        trim_fraction(&format!("{x:.*}", (5 - exp) as usize)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// word2vec text format: `count dim`, then `label v1 ... vd`.
pub fn write_embeddings<W: Write>(e: &EmbeddingMatrix, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", e.node_count(), e.dim())?;
    for (id, label) in e.labels().iter() {
        w.write_all(label.as_bytes())?;
        for &x in e.row(id) {
            write!(w, " {}", format_g6(x))?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Labels may contain spaces: the last `dim` fields of a row are the vector.
pub fn read_embeddings<R: BufRead>(r: R) -> Result<EmbeddingMatrix> {
    let mut lines = numbered_lines(r);
    let (no, header) = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::parse(1, "missing `count dim` header"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let parse_usize = |s: &str| s.parse::<usize>().ok();
    let (count, dim) = match dims.as_slice() {
        [c, d] => match (parse_usize(c), parse_usize(d)) {
            (Some(c), Some(d)) if d > 0 => (c, d),
            _ => return Err(Error::parse(no, "header must be `count dim` with dim > 0")),
        },
        _ => return Err(Error::parse(no, "header must be `count dim`")),
    };
    let mut labels = LabelTable::new();
    let mut data = Vec::with_capacity(count * dim);
    for item in lines {
        let (no, line) = item?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if labels.len() == count {
            return Err(Error::parse(
                no,
                format!("header declares {count} rows, body has more"),
            ));
        }
        let mut parts: Vec<&str> = line.rsplitn(dim + 1, ' ').collect();
        if parts.len() != dim + 1 || parts[dim].is_empty() {
            return Err(Error::parse(
                no,
                format!("expected a label and {dim} components"),
            ));
        }
        parts.reverse();
        let label = parts[0];
        if labels.get(label).is_some() {
            return Err(Error::parse(no, format!("duplicate label `{label}`")));
        }
        for p in &parts[1..] {
            let x = parse_f64(no, p, "component")?;
            if !x.is_finite() {
                return Err(Error::parse(no, format!("component `{p}` is not finite")));
            }
            data.push(x);
        }
        labels.intern(label.to_string());
    }
    if labels.len() != count {
        return Err(Error::Invalid(format!(
            "header declares {count} rows, body has {}",
            labels.len()
        )));
    }
    Ok(EmbeddingMatrix::new(labels, dim, data)?)
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingMatrix> {
    read_embeddings(open(path)?)
}

/// Reorders rows to follow `labels`; both must hold the same label set.
pub fn align_embeddings(e: &EmbeddingMatrix, labels: &LabelTable) -> Result<EmbeddingMatrix> {
    if e.labels() == labels {
        return Ok(e.clone());
    }
    if e.node_count() != labels.len() {
        return Err(Error::Invalid(format!(
            "embeddings cover {} nodes, graph has {}",
            e.node_count(),
            labels.len()
        )));
    }
    let mut data = Vec::with_capacity(e.as_slice().len());
    for (_, label) in labels.iter() {
        let id = e.labels().resolve(label)?;
        data.extend_from_slice(e.row(id));
    }
    Ok(EmbeddingMatrix::new(labels.clone(), e.dim(), data)?)
}

/// `lemmaA<TAB>lemmaB<TAB>score` lines.
pub fn read_judgments<R: BufRead>(r: R) -> Result<Vec<JudgmentPair>> {
    let mut out = Vec::new();
    for item in numbered_lines(r) {
        let (no, line) = item?;
        if skip(&line) {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 || fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::parse(no, "expected `lemmaA<TAB>lemmaB<TAB>score`"));
        }
        let score = parse_f64(no, fields[2], "score")?;
        if !score.is_finite() {
            return Err(Error::parse(no, "score is not finite"));
        }
        out.push(JudgmentPair {
            lemma_a: fields[0].to_string(),
            lemma_b: fields[1].to_string(),
            score,
        });
    }
    Ok(out)
}

/// `lemma<TAB>label1,label2,...` lines, labels resolved against `labels`.
pub fn read_inventory<R: BufRead>(r: R, labels: &LabelTable) -> Result<SenseInventory> {
    let mut inv = SenseInventory::new();
    for item in numbered_lines(r) {
        let (no, line) = item?;
        if skip(&line) {
            continue;
        }
        let Some((lemma, senses)) = line.split_once('\t') else {
            return Err(Error::parse(no, "expected `lemma<TAB>label1,label2,...`"));
        };
        let ids = senses
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| labels.resolve(s))
            .collect::<path2vec_core::Result<Vec<_>>>()
            .map_err(|e| Error::parse(no, e.to_string()))?;
        inv.insert(lemma, ids)
            .map_err(|e| Error::parse(no, e.to_string()))?;
    }
    Ok(inv)
}

/// Blank-line separated blocks of `lemma<TAB>gold_label_or_->` lines.
/// Instance ids are block numbers from 0.
pub fn read_instances<R: BufRead>(r: R) -> Result<Vec<WsdInstance>> {
    let mut out: Vec<WsdInstance> = Vec::new();
    let mut cur: Vec<WsdToken> = Vec::new();
    let flush = |cur: &mut Vec<WsdToken>, out: &mut Vec<WsdInstance>| {
        if !cur.is_empty() {
            out.push(WsdInstance {
                id: out.len().to_string(),
                tokens: std::mem::take(cur),
            });
        }
    };
    for item in numbered_lines(r) {
        let (no, line) = item?;
        if line.trim().is_empty() {
            flush(&mut cur, &mut out);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let (lemma, gold) = match fields.as_slice() {
            [l] => (*l, None),
            [l, "-"] => (*l, None),
            [l, g] => (*l, Some(g.to_string())),
            _ => return Err(Error::parse(no, "expected `lemma<TAB>gold_or_-`")),
        };
        if lemma.is_empty() {
            return Err(Error::parse(no, "empty lemma"));
        }
        cur.push(WsdToken {
            lemma: lemma.to_string(),
            gold,
        });
    }
    flush(&mut cur, &mut out);
    Ok(out)
}

/// `u<TAB>v<TAB>length` lines.
pub fn write_samples<W: Write>(
    samples: &[PathSample],
    labels: &LabelTable,
    mut w: W,
) -> Result<()> {
    for p in samples {
        writeln!(
            w,
            "{}\t{}\t{}",
            labels.label(p.u),
            labels.label(p.v),
            p.length
        )?;
    }
    w.flush()?;
    Ok(())
}
