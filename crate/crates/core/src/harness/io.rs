//! Edge-list, covariate and label file formats.

use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Result, SbmError};
use crate::logit::{Covariate, CovariateTable};
use crate::netcore::{ClassAssignment, Graph};

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(SbmError::Parse { line, message: message.into() })
}

/// Reads whitespace-separated `i j` pairs, one per line; blank lines and
/// lines starting with `#` are skipped. The node count is `n_nodes` when
/// given, otherwise one more than the largest id.
pub fn parse_edge_list(reader: impl Read, n_nodes: Option<usize>) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut max_id = None;
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        if fields.len() != 2 {
            return parse_err(lineno, format!("expected two node ids, found {} fields", fields.len()));
        }
        let mut ids = [0usize; 2];
        for (slot, f) in ids.iter_mut().zip(&fields) {
            *slot = match f.parse() {
                Ok(v) => v,
                Err(_) => return parse_err(lineno, format!("invalid node id {f:?}")),
            };
        }
        let (i, j) = (ids[0], ids[1]);
        if i == j {
            return parse_err(lineno, format!("self-loop at node {i}"));
        }
        if let Some(n) = n_nodes {
            if i.max(j) >= n {
                return parse_err(lineno, format!("node id {} out of range for {n} nodes", i.max(j)));
            }
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return parse_err(lineno, format!("duplicate edge ({i}, {j})"));
        }
        max_id = max_id.max(Some(i.max(j)));
        edges.push((i, j));
    }
    let n = n_nodes.unwrap_or(max_id.map_or(0, |m| m + 1));
    Graph::from_edges(n, edges)
}

pub fn read_edge_list(path: impl AsRef<Path>, n_nodes: Option<usize>) -> Result<Graph> {
    parse_edge_list(File::open(path)?, n_nodes)
}

pub fn write_edge_list(g: &Graph, mut w: impl Write) -> Result<()> {
    for (i, j) in g.edges() {
        writeln!(w, "{i} {j}")?;
    }
    Ok(())
}

/// Rows of a `node,<col1>,...` CSV as `(node, values)`, checking that every
/// node in `0..rows` appears exactly once. Returns the column names and the
/// values ordered by node.
fn read_node_table(reader: impl Read) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.get(0) != Some("node") {
        return parse_err(1, "first column must be named `node`");
    }
    if headers.len() < 2 {
        return parse_err(1, "need at least one column after `node`");
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_owned).collect();
    let mut rows: Vec<(usize, usize, Vec<String>)> = Vec::new();
    for rec in rdr.records() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line() as usize);
                return parse_err(line, e.to_string());
            }
        };
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let node: usize = match rec[0].parse() {
            Ok(v) => v,
            Err(_) => return parse_err(line, format!("invalid node id {:?}", &rec[0])),
        };
        rows.push((node, line, rec.iter().skip(1).map(str::to_owned).collect()));
    }
    let n = rows.len();
    let mut by_node: Vec<Option<Vec<String>>> = vec![None; n];
    for (node, line, vals) in rows {
        if node >= n {
            return parse_err(line, format!("node id {node} out of range for {n} rows"));
        }
        if by_node[node].is_some() {
            return parse_err(line, format!("node {node} listed twice"));
        }
        by_node[node] = Some(vals);
    }
    Ok((names, by_node.into_iter().map(|v| v.expect("every slot filled")).collect()))
}

/// String levels mapped to indices in sorted order.
fn encode_levels(values: impl Iterator<Item = String> + Clone) -> (Vec<usize>, Vec<String>) {
    let names: Vec<String> = values.clone().collect::<BTreeSet<_>>().into_iter().collect();
    let levels = values.map(|v| names.binary_search(&v).expect("level present")).collect();
    (levels, names)
}

/// Covariate CSV: header `node,<name1>,...`, one row per node, string levels.
pub fn parse_covariates(reader: impl Read) -> Result<CovariateTable> {
    let (names, rows) = read_node_table(reader)?;
    let n = rows.len();
    let covs = names
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let (levels, level_names) = encode_levels(rows.iter().map(|r| r[c].clone()));
            Covariate::new(name.clone(), levels, level_names)
        })
        .collect::<Result<Vec<_>>>()?;
    CovariateTable::new(n, covs)
}

pub fn read_covariates(path: impl AsRef<Path>) -> Result<CovariateTable> {
    parse_covariates(File::open(path)?)
}

/// Class labels in the covariate format with a single column; labels are
/// strings mapped to classes in sorted order.
pub fn parse_labels(reader: impl Read) -> Result<ClassAssignment> {
    let (names, rows) = read_node_table(reader)?;
    if names.len() != 1 {
        return parse_err(1, "label file must have exactly the columns `node,<label>`");
    }
    let (levels, level_names) = encode_levels(rows.into_iter().map(|mut r| r.remove(0)));
    ClassAssignment::new(levels, level_names.len().max(1))
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<ClassAssignment> {
    parse_labels(File::open(path)?)
}

pub fn write_labels(z: &ClassAssignment, w: impl Write) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["node", "class"])?;
    for (i, l) in z.labels().iter().enumerate() {
        wr.write_record([i.to_string(), l.to_string()])?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(e: SbmError) -> usize {
        match e {
            SbmError::Parse { line, .. } => line,
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn edge_list_comments_and_errors() {
        let g = parse_edge_list("# header\n0 1\n\n2 1\n".as_bytes(), None).unwrap();
        assert_eq!(g.n_nodes(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(line_of(parse_edge_list("0 1\n1 0\n".as_bytes(), None).unwrap_err()), 2);
        assert_eq!(line_of(parse_edge_list("# c\n0 1\n3 3\n".as_bytes(), None).unwrap_err()), 3);
        assert_eq!(line_of(parse_edge_list("0 x\n".as_bytes(), None).unwrap_err()), 1);
        assert_eq!(line_of(parse_edge_list("0 1 2\n".as_bytes(), None).unwrap_err()), 1);
        assert_eq!(line_of(parse_edge_list("0 1\n0 5\n".as_bytes(), Some(4)).unwrap_err()), 2);
        assert_eq!(parse_edge_list("".as_bytes(), Some(3)).unwrap().n_nodes(), 3);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::from_edges(5, [(0, 4), (1, 2), (2, 3)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        assert_eq!(parse_edge_list(buf.as_slice(), Some(5)).unwrap(), g);
    }

    #[test]
    fn covariates_parse() {
        let t = parse_covariates("node,house,year\n1,b,2008\n0,a,2009\n2,a,2008\n".as_bytes()).unwrap();
        assert_eq!(t.n_nodes(), 3);
        let house = &t.covariates()[0];
        assert_eq!(house.levels, vec![0, 1, 0]);
        assert_eq!(house.level_names, vec!["a", "b"]);
        assert_eq!(t.covariates()[1].levels, vec![1, 0, 0]);
    }

    #[test]
    fn covariate_errors_name_lines() {
        assert!(parse_covariates("id,x\n0,a\n".as_bytes()).is_err());
        assert_eq!(line_of(parse_covariates("node,x\n0,a\n0,b\n".as_bytes()).unwrap_err()), 3);
        assert_eq!(line_of(parse_covariates("node,x\n0,a\n5,b\n".as_bytes()).unwrap_err()), 3);
        assert_eq!(line_of(parse_covariates("node,x\n0,a\nq,b\n".as_bytes()).unwrap_err()), 3);
        assert_eq!(line_of(parse_covariates("node,x\n0,a\n1\n".as_bytes()).unwrap_err()), 3);
    }

    #[test]
    fn labels_round_trip() {
        let z = ClassAssignment::new(vec![1, 0, 2, 1], 3).unwrap();
        let mut buf = Vec::new();
        write_labels(&z, &mut buf).unwrap();
        assert_eq!(parse_labels(buf.as_slice()).unwrap(), z);
    }
}
