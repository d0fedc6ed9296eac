//! Reader for the SteinLib STP text format.
//!
//! Only undirected, edge-weighted graphs are accepted. Sections other than
//! `Graph` and `Terminals` (Comment, Coordinates, ...) are skipped.

use super::{Edge, Instance, InstanceError};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ParseStpError {
    #[error("line {line}: malformed section header `{text}`")]
    BadSection { line: usize, text: String },
    #[error("line {line}: unexpected `{text}`")]
    Unexpected { line: usize, text: String },
    #[error("line {line}: expected a number, found `{text}`")]
    BadNumber { line: usize, text: String },
    #[error("line {line}: node {node} out of range 1..={nodes}")]
    NodeOutOfRange {
        line: usize,
        node: usize,
        nodes: usize,
    },
    #[error("line {line}: negative cost {cost}")]
    NegativeCost { line: usize, cost: f64 },
    #[error("line {line}: arcs are not supported, only undirected edges")]
    Directed { line: usize },
    #[error("{what}: declared {declared}, listed {listed}")]
    CountMismatch {
        what: &'static str,
        declared: usize,
        listed: usize,
    },
    #[error("missing `{0}`")]
    Missing(&'static str),
    #[error("invalid instance: {0}")]
    Invalid(#[from] InstanceError),
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum Section {
    None,
    Graph,
    Terminals,
    Skipped,
}

/// Parses an STP document into a validated [`Instance`].
///
/// Declared counts (`Nodes`, `Edges`, `Terminals`) are cross-checked against
/// the listed lines. Instances whose terminals are not connected are
/// rejected here rather than surfacing later as infeasible subproblems.
pub fn parse_stp(text: &str) -> Result<Instance, ParseStpError> {
    let mut section = Section::None;
    let mut name = None;
    let mut nodes: Option<usize> = None;
    let mut declared_edges: Option<usize> = None;
    let mut declared_terminals: Option<usize> = None;
    let mut edges = Vec::new();
    let mut terminals = Vec::new();
    let mut saw_graph = false;
    let mut saw_terminals = false;
    let mut saw_eof = false;
    let mut first = true;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut words = trimmed.split_whitespace();
        let keyword = words.next().unwrap().to_ascii_lowercase();
        let unexpected = || ParseStpError::Unexpected {
            line,
            text: trimmed.to_owned(),
        };

        if std::mem::replace(&mut first, false) && keyword == "33d32945" {
            continue;
        }

        match (section, keyword.as_str()) {
            (Section::None, "section") => {
                let header = words.next().map(str::to_ascii_lowercase);
                if header.is_none() || words.next().is_some() {
                    return Err(ParseStpError::BadSection {
                        line,
                        text: trimmed.to_owned(),
                    });
                }
                section = match header.as_deref() {
                    Some("graph") => {
                        saw_graph = true;
                        Section::Graph
                    }
                    Some("terminals") => {
                        saw_terminals = true;
                        Section::Terminals
                    }
                    _ => Section::Skipped,
                };
            }
            (Section::None, "eof") => {
                saw_eof = true;
                break;
            }
            (Section::None, _) => return Err(unexpected()),
            (_, "section") => {
                return Err(ParseStpError::BadSection {
                    line,
                    text: trimmed.to_owned(),
                })
            }
            (_, "end") => section = Section::None,
            (Section::Skipped, "name") => {
                let rest = trimmed[4..].trim().trim_matches('"');
                name = Some(rest.to_owned());
            }
            (Section::Skipped, _) => {}
            (Section::Graph, "nodes") => nodes = Some(number(words.next(), line)?),
            (Section::Graph, "edges") => declared_edges = Some(number(words.next(), line)?),
            (Section::Graph, "arcs" | "a") => return Err(ParseStpError::Directed { line }),
            (Section::Graph, "e") => {
                let n = nodes.ok_or(ParseStpError::Missing("Nodes before edge list"))?;
                let u = node(words.next(), n, line)?;
                let v = node(words.next(), n, line)?;
                let cost: f64 = number(words.next(), line)?;
                if cost < 0.0 {
                    return Err(ParseStpError::NegativeCost { line, cost });
                }
                if words.next().is_some() {
                    return Err(unexpected());
                }
                edges.push(Edge { u, v, cost });
            }
            (Section::Terminals, "terminals") => {
                declared_terminals = Some(number(words.next(), line)?)
            }
            (Section::Terminals, "t") => {
                let n = nodes.ok_or(ParseStpError::Missing("Graph section before Terminals"))?;
                terminals.push(node(words.next(), n, line)?);
                if words.next().is_some() {
                    return Err(unexpected());
                }
            }
            _ => return Err(unexpected()),
        }
    }

    if section != Section::None {
        return Err(ParseStpError::Missing("END"));
    }
    if !saw_eof {
        return Err(ParseStpError::Missing("EOF"));
    }
    if !saw_graph {
        return Err(ParseStpError::Missing("SECTION Graph"));
    }
    if !saw_terminals {
        return Err(ParseStpError::Missing("SECTION Terminals"));
    }
    let nodes = nodes.ok_or(ParseStpError::Missing("Nodes"))?;
    let declared_edges = declared_edges.ok_or(ParseStpError::Missing("Edges"))?;
    if declared_edges != edges.len() {
        return Err(ParseStpError::CountMismatch {
            what: "edges",
            declared: declared_edges,
            listed: edges.len(),
        });
    }
    let declared_terminals = declared_terminals.ok_or(ParseStpError::Missing("Terminals"))?;
    if declared_terminals != terminals.len() {
        return Err(ParseStpError::CountMismatch {
            what: "terminals",
            declared: declared_terminals,
            listed: terminals.len(),
        });
    }

    let instance = Instance::new(nodes, edges, terminals)?;
    Ok(match name {
        Some(name) => instance.with_name(name),
        None => instance,
    })
}

fn number<T: std::str::FromStr>(word: Option<&str>, line: usize) -> Result<T, ParseStpError> {
    let word = word.unwrap_or("");
    word.parse().map_err(|_| ParseStpError::BadNumber {
        line,
        text: word.to_owned(),
    })
}

fn node(word: Option<&str>, nodes: usize, line: usize) -> Result<usize, ParseStpError> {
    let id: usize = number(word, line)?;
    if id == 0 || id > nodes {
        return Err(ParseStpError::NodeOutOfRange {
            line,
            node: id,
            nodes,
        });
    }
    Ok(id - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
33D32945 STP File, STP Format Version 1.0
SECTION Comment
Name \"tiny\"
END
SECTION Graph
Nodes 2
Edges 1
E 1 2 5
END
SECTION Terminals
Terminals 2
T 1
T 2
END
EOF
";

    #[test]
    fn smallest_valid_instance() {
        let g = parse_stp(MINIMAL).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(
            g.edges(),
            &[Edge {
                u: 0,
                v: 1,
                cost: 5.0
            }]
        );
        assert_eq!(g.terminals(), &[0, 1]);
        assert_eq!(g.name(), Some("tiny"));
    }

    #[test]
    fn keywords_are_case_insensitive_and_comments_skipped() {
        let text = MINIMAL
            .replace("SECTION Graph", "# a comment\nsection GRAPH")
            .replace("Nodes", "NODES");
        assert_eq!(parse_stp(&text).unwrap().node_count(), 2);
    }

    #[test]
    fn edge_count_mismatch() {
        let text = "SECTION Graph\nNodes 3\nEdges 3\nE 1 2 1\nE 2 3 1\nEND\n\
                    SECTION Terminals\nTerminals 2\nT 1\nT 3\nEND\nEOF\n";
        assert_eq!(
            parse_stp(text),
            Err(ParseStpError::CountMismatch {
                what: "edges",
                declared: 3,
                listed: 2
            })
        );
    }

    #[test]
    fn node_out_of_range() {
        let text = MINIMAL.replace("E 1 2 5", "E 1 3 5");
        assert_eq!(
            parse_stp(&text),
            Err(ParseStpError::NodeOutOfRange {
                line: 8,
                node: 3,
                nodes: 2
            })
        );
    }

    #[test]
    fn negative_cost() {
        let text = MINIMAL.replace("E 1 2 5", "E 1 2 -5");
        assert!(matches!(
            parse_stp(&text),
            Err(ParseStpError::NegativeCost { line: 8, .. })
        ));
    }

    #[test]
    fn malformed_section_header() {
        let text = MINIMAL.replace("SECTION Graph", "SECTION");
        assert!(matches!(
            parse_stp(&text),
            Err(ParseStpError::BadSection { line: 5, .. })
        ));
        let text = MINIMAL.replace("E 1 2 5\nEND", "E 1 2 5\nSECTION Terminals");
        assert!(matches!(
            parse_stp(&text),
            Err(ParseStpError::BadSection { .. })
        ));
    }

    #[test]
    fn disconnected_terminals() {
        let text = "SECTION Graph\nNodes 3\nEdges 1\nE 1 2 1\nEND\n\
                    SECTION Terminals\nTerminals 2\nT 1\nT 3\nEND\nEOF\n";
        assert_eq!(
            parse_stp(text),
            Err(ParseStpError::Invalid(InstanceError::Disconnected(1, 3)))
        );
    }

    #[test]
    fn missing_eof_and_arcs() {
        let text = MINIMAL.replace("EOF", "");
        assert_eq!(parse_stp(&text), Err(ParseStpError::Missing("EOF")));
        let text = MINIMAL.replace("E 1 2 5", "A 1 2 5");
        assert_eq!(parse_stp(&text), Err(ParseStpError::Directed { line: 8 }));
    }

    #[test]
    fn skips_coordinates() {
        let text = MINIMAL.replace("EOF", "SECTION Coordinates\nDD 1 0 0\nDD 2 1 0\nEND\nEOF");
        assert!(parse_stp(&text).is_ok());
    }
}
