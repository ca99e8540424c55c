//! Plain-text edge lists:
//!
//! ```text
//! n 5
//! tier1 0 1
//! cluster 1
//! 0 1 peer11
//! 1 3 transit12
//! ```
//!
//! `tier1` marks a tiered graph (all other nodes are tier-2); edges then
//! carry a kind. `#` starts a comment.

use std::io::{BufRead, Write};

use super::{EdgeKind, Graph, Tier};
use crate::error::{Error, Result};

pub fn write_edge_list(graph: &Graph, mut out: impl Write) -> Result<()> {
    writeln!(out, "n {}", graph.node_count())?;
    if graph.is_tiered() {
        write!(out, "tier1")?;
        for u in (0..graph.node_count()).filter(|&u| graph.tier(u) == Tier::Tier1) {
            write!(out, " {u}")?;
        }
        writeln!(out)?;
    }
    write!(out, "cluster")?;
    for u in graph.cluster() {
        write!(out, " {u}")?;
    }
    writeln!(out)?;
    for (u, v, kind) in graph.edges() {
        match kind {
            Some(kind) => writeln!(out, "{u} {v} {kind}")?,
            None => writeln!(out, "{u} {v}")?,
        }
    }
    Ok(())
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_ids<'a>(line: usize, fields: impl Iterator<Item = &'a str>) -> Result<Vec<usize>> {
    fields
        .map(|f| f.parse().map_err(|_| parse_err(line, format!("bad node id `{f}`"))))
        .collect()
}

pub fn read_edge_list(input: impl BufRead) -> Result<Graph> {
    let mut n = None;
    let mut tier1 = None;
    let mut cluster = Vec::new();
    let mut edges = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        let head = fields.next().expect("nonempty line");
        match head {
            "n" => {
                let count = fields
                    .next()
                    .and_then(|f| f.parse::<usize>().ok())
                    .ok_or_else(|| parse_err(line_no, "expected `n <count>`"))?;
                if n.replace(count).is_some() {
                    return Err(parse_err(line_no, "duplicate `n` line"));
                }
            }
            "tier1" => tier1 = Some(parse_ids(line_no, fields)?),
            "cluster" => cluster = parse_ids(line_no, fields)?,
            _ => {
                if n.is_none() {
                    return Err(parse_err(line_no, "edge before the `n <count>` header"));
                }
                let u = parse_ids(line_no, std::iter::once(head))?[0];
                let v = parse_ids(line_no, fields.next().into_iter())?;
                let v = *v
                    .first()
                    .ok_or_else(|| parse_err(line_no, "edge needs two endpoints"))?;
                let kind = match fields.next() {
                    Some(k) => Some(k.parse::<EdgeKind>().map_err(|e| parse_err(line_no, e))?),
                    None => None,
                };
                if fields.next().is_some() {
                    return Err(parse_err(line_no, "trailing fields after edge"));
                }
                edges.push((u, v, kind));
            }
        }
    }
    let n = n.ok_or_else(|| parse_err(0, "missing `n <count>` header"))?;
    let roles = match tier1 {
        Some(ids) => {
            let mut roles = vec![Tier::Tier2; n];
            for u in ids {
                *roles
                    .get_mut(u)
                    .ok_or_else(|| parse_err(0, format!("tier1 node {u} out of range")))? = Tier::Tier1;
            }
            roles
        }
        None => vec![Tier::Flat; n],
    };
    Graph::from_edges(n, edges, roles)?.with_cluster(cluster)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_poisson, gen_tiered_core};
    use crate::model::TieredCoreSpec;

    fn round_trip(g: &Graph) -> Graph {
        let mut buf = Vec::new();
        write_edge_list(g, &mut buf).unwrap();
        read_edge_list(buf.as_slice()).unwrap()
    }

    #[test]
    fn flat_round_trip() {
        let g = gen_poisson(40, 0.1, 2).unwrap().with_cluster([3, 7, 9]).unwrap();
        assert_eq!(round_trip(&g), g);
    }

    #[test]
    fn tiered_round_trip() {
        let spec = TieredCoreSpec {
            n1: 5,
            n2: 12,
            k1: 2,
            p11: 0.5,
            p12: 0.4,
            p22: 0.3,
            lambda: 1.0,
        };
        let g = gen_tiered_core(&spec, 4).unwrap();
        assert_eq!(round_trip(&g), g);
    }

    #[test]
    fn tolerates_comments_and_blank_lines() {
        let text = "# topology\n\nn 3\ncluster 2\n0 1  # first\n1 2\n";
        let g = read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.cluster(), &[2]);
    }

    #[test]
    fn reports_line_numbers() {
        let err = read_edge_list("n 3\n0 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = read_edge_list("0 1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(read_edge_list("n 3\n0 1 sideways\n".as_bytes()).is_err());
        assert!(read_edge_list("n 2\n0 5\n".as_bytes()).is_err());
        assert!(read_edge_list("".as_bytes()).is_err());
    }
}
