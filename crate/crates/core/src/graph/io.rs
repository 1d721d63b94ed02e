use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Edge, NodeIds, NodeLabeling, PreferenceProfile, SocialGraph};
use crate::error::{Error, Result};

pub const FIXTURE_HEADER: &str = "electoengine-graph v1";

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_owned(),
        line,
        message: message.into(),
    }
}

fn is_comment(line: &str) -> bool {
    line.starts_with('%') || line.starts_with('#')
}

/// Tracks numeric identifiers so that `7` and `007` are not silently treated
/// as two different voters.
#[derive(Default)]
struct CollisionGuard {
    numeric: HashMap<u64, String>,
}

impl CollisionGuard {
    fn check(&mut self, token: &str) -> Result<()> {
        if let Ok(value) = token.parse::<u64>() {
            match self.numeric.get(&value) {
                Some(first) if first != token => {
                    return Err(Error::IdentifierCollision {
                        first: first.clone(),
                        second: token.to_owned(),
                    })
                }
                Some(_) => {}
                None => {
                    self.numeric.insert(value, token.to_owned());
                }
            }
        }
        Ok(())
    }
}

/// Reads a whitespace-separated edge list into an unweighted skeleton.
///
/// Lines starting with `%` or `#` are comments. An optional third numeric
/// column is accepted and ignored. For MatrixMarket files (a `%%MatrixMarket`
/// banner) the size line following the banner is skipped. Identifiers are
/// remapped to dense indices in order of first appearance.
pub fn load_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<SocialGraph> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let mut ids = NodeIds::default();
    let mut guard = CollisionGuard::default();
    let mut pairs = Vec::new();
    let mut skip_size_line = false;

    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if is_comment(line) {
            if index == 0 && line.starts_with("%%MatrixMarket") {
                skip_size_line = true;
            }
            continue;
        }
        if skip_size_line {
            skip_size_line = false;
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.len() {
            2 => {}
            3 if tokens[2].parse::<f64>().is_ok() => {}
            _ => {
                return Err(parse_error(
                    path,
                    index + 1,
                    format!("expected `<src> <dst>`, got {line:?}"),
                ))
            }
        }
        guard.check(tokens[0])?;
        guard.check(tokens[1])?;
        let u = ids.intern(tokens[0]);
        let v = ids.intern(tokens[1]);
        pairs.push((u, v));
        if !directed {
            pairs.push((v, u));
        }
    }

    Ok(SocialGraph::from_pairs(ids.len(), pairs).with_ids(ids))
}

/// Reads `<node> <label>` lines; categories are numbered by first appearance.
pub fn load_labels(path: impl AsRef<Path>, graph: &SocialGraph) -> Result<NodeLabeling> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let mut labels: Vec<Option<usize>> = vec![None; graph.node_count()];
    let mut categories: Vec<String> = Vec::new();

    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || is_comment(line) {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(node), Some(label)) = (tokens.next(), tokens.next()) else {
            return Err(parse_error(
                path,
                index + 1,
                format!("expected `<node> <label>`, got {line:?}"),
            ));
        };
        if tokens.next().is_some() {
            return Err(parse_error(path, index + 1, "trailing tokens after label"));
        }
        let v = match graph.ids() {
            Some(ids) => ids.get(node),
            None => node.parse::<usize>().ok().filter(|&v| v < graph.node_count()),
        }
        .ok_or_else(|| Error::UnknownNode(node.to_owned()))?;

        let category = match categories.iter().position(|c| c == label) {
            Some(c) => c,
            None => {
                categories.push(label.to_owned());
                categories.len() - 1
            }
        };
        match labels[v] {
            Some(previous) if previous != category => {
                return Err(parse_error(
                    path,
                    index + 1,
                    format!("node {node:?} labeled both {:?} and {label:?}", categories[previous]),
                ))
            }
            _ => labels[v] = Some(category),
        }
    }

    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(v, l)| l.ok_or_else(|| Error::MissingLabel(graph.node_name(v))))
        .collect::<Result<Vec<_>>>()?;
    NodeLabeling::new(labels, categories)
}

/// A graph plus optional preference profile, as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub graph: SocialGraph,
    pub profile: Option<PreferenceProfile>,
}

impl Fixture {
    /// Plain-text form: header, `<nodes> <candidates> <edges>`, one
    /// `<src> <dst> <weight>` line per edge, then one probability row per node.
    pub fn render(&self) -> String {
        let g = &self.graph;
        let m = self.profile.as_ref().map_or(0, |p| p.candidates());
        let mut out = String::new();
        let _ = writeln!(out, "{FIXTURE_HEADER}");
        let _ = writeln!(out, "{} {} {}", g.node_count(), m, g.edge_count());
        for e in g.edges() {
            let _ = writeln!(out, "{} {} {}", e.source, e.target, e.weight);
        }
        if let Some(profile) = &self.profile {
            for row in profile.rows() {
                let row: Vec<String> = row.iter().map(f64::to_string).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
        out
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        match lines.next() {
            Some((_, FIXTURE_HEADER)) => {}
            Some((n, other)) => {
                return Err(parse_error(
                    path,
                    n,
                    format!("expected header {FIXTURE_HEADER:?}, got {other:?}"),
                ))
            }
            None => return Err(parse_error(path, 1, "empty fixture")),
        }

        let (line, sizes) = lines.next().ok_or_else(|| parse_error(path, 2, "missing size line"))?;
        let sizes = parse_numbers::<usize>(sizes, path, line)?;
        let [nodes, candidates, edge_count] = sizes[..] else {
            return Err(parse_error(
                path,
                line,
                "size line needs `<nodes> <candidates> <edges>`",
            ));
        };

        let mut edges = Vec::with_capacity(edge_count);
        for _ in 0..edge_count {
            let (line, text) = lines
                .next()
                .ok_or_else(|| parse_error(path, 0, "unexpected end of edge section"))?;
            let mut tokens = text.split_whitespace();
            let mut next = || {
                tokens
                    .next()
                    .ok_or_else(|| parse_error(path, line, "edge needs 3 fields"))
            };
            let source = parse_one::<usize>(next()?, path, line)?;
            let target = parse_one::<usize>(next()?, path, line)?;
            let weight = parse_one::<f64>(next()?, path, line)?;
            edges.push(Edge { source, target, weight });
        }
        let graph = SocialGraph::from_edges(nodes, edges, None);
        graph.validate()?;

        let profile = if candidates > 0 {
            let mut probs = Vec::with_capacity(nodes * candidates);
            for _ in 0..nodes {
                let (line, text) = lines
                    .next()
                    .ok_or_else(|| parse_error(path, 0, "unexpected end of probability section"))?;
                let row = parse_numbers::<f64>(text, path, line)?;
                if row.len() != candidates {
                    return Err(parse_error(path, line, format!("expected {candidates} probabilities")));
                }
                probs.extend(row);
            }
            let profile = PreferenceProfile::from_flat(candidates, probs);
            profile.validate()?;
            Some(profile)
        } else {
            None
        };

        if let Some((line, _)) = lines.next() {
            return Err(parse_error(path, line, "trailing content"));
        }
        Ok(Fixture { graph, profile })
    }
}

fn parse_one<T: std::str::FromStr>(token: &str, path: &Path, line: usize) -> Result<T> {
    token
        .parse()
        .map_err(|_| parse_error(path, line, format!("cannot parse {token:?}")))
}

fn parse_numbers<T: std::str::FromStr>(text: &str, path: &Path, line: usize) -> Result<Vec<T>> {
    text.split_whitespace().map(|t| parse_one(t, path, line)).collect()
}

pub fn write_fixture(path: impl AsRef<Path>, graph: &SocialGraph, profile: Option<&PreferenceProfile>) -> Result<()> {
    let path = path.as_ref();
    let fixture = Fixture {
        graph: graph.clone(),
        profile: profile.cloned(),
    };
    fs::write(path, fixture.render()).map_err(|e| Error::io(path, e))
}

pub fn read_fixture(path: impl AsRef<Path>) -> Result<Fixture> {
    let path = path.as_ref();
    Fixture::parse(&read_text(path)?, path)
}
