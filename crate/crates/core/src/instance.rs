//! Set-cover instances, hypergraphs, and their line-based text formats.
//!
//! Set-cover files:
//!
//! ```text
//! p sc <num_sets> <num_elements> <num_edges>
//! e <set_id> <element_id>        (num_edges times, 0-based ids)
//! ```
//!
//! Hypergraph files:
//!
//! ```text
//! p hg <num_vertices> <num_edges>
//! <v> <v> ...                    (one line per edge)
//! ```
//!
//! Lines starting with `c` are comments in both formats. Blank lines are
//! ignored in set-cover files; in hypergraph files a blank line is an empty
//! edge and therefore an error.

use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("line {line}: malformed header: {msg}")]
    MalformedHeader { line: usize, msg: String },
    #[error("line {line}: malformed line: {msg}")]
    MalformedLine { line: usize, msg: String },
    #[error("missing header line")]
    MissingHeader,
    #[error("line {line}: id {id} out of range (limit {limit})")]
    IdOutOfRange { line: usize, id: usize, limit: usize },
    #[error("duplicate edge (set {set}, element {element})")]
    DuplicateEdge { set: usize, element: usize },
    #[error("header declares {declared} edges but {found} were read")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("InfeasibleInstance: element {element} is in no set")]
    InfeasibleInstance { element: usize },
    #[error("EmptyEdge: edge {edge} has no vertices")]
    EmptyEdge { edge: usize },
    #[error("edge {edge} lists vertex {vertex} twice")]
    DuplicateVertex { edge: usize, vertex: usize },
    #[error("element degree {degree} exceeds the number of sets {num_sets}")]
    DegreeTooLarge { degree: usize, num_sets: usize },
    #[error("edge size {rank} exceeds the number of vertices {num_vertices}")]
    RankTooLarge { rank: usize, num_vertices: usize },
}

/// Bipartite set/element incidence. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetCoverInstance {
    set_neighbors: Vec<Vec<usize>>,
    element_neighbors: Vec<Vec<usize>>,
    delta: usize,
    freq: usize,
    m: usize,
}

impl SetCoverInstance {
    /// Builds an instance from `(set, element)` pairs.
    pub fn from_edges(
        num_sets: usize,
        num_elements: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, InstanceError> {
        let mut set_neighbors = vec![Vec::new(); num_sets];
        for (s, t) in edges {
            if s >= num_sets {
                return Err(InstanceError::IdOutOfRange { line: 0, id: s, limit: num_sets });
            }
            if t >= num_elements {
                return Err(InstanceError::IdOutOfRange { line: 0, id: t, limit: num_elements });
            }
            set_neighbors[s].push(t);
        }
        Self::from_sets(num_elements, set_neighbors)
    }

    /// Builds an instance from per-set element lists.
    pub fn from_sets(num_elements: usize, mut set_neighbors: Vec<Vec<usize>>) -> Result<Self, InstanceError> {
        let mut element_neighbors = vec![Vec::new(); num_elements];
        for (s, elems) in set_neighbors.iter_mut().enumerate() {
            elems.sort_unstable();
            for w in elems.windows(2) {
                if w[0] == w[1] {
                    return Err(InstanceError::DuplicateEdge { set: s, element: w[0] });
                }
            }
            for &t in elems.iter() {
                if t >= num_elements {
                    return Err(InstanceError::IdOutOfRange { line: 0, id: t, limit: num_elements });
                }
                element_neighbors[t].push(s);
            }
        }
        if let Some(t) = element_neighbors.iter().position(Vec::is_empty) {
            return Err(InstanceError::InfeasibleInstance { element: t });
        }
        let delta = set_neighbors.iter().map(Vec::len).max().unwrap_or(0);
        let freq = element_neighbors.iter().map(Vec::len).max().unwrap_or(0);
        let m = set_neighbors.iter().map(Vec::len).sum();
        Ok(SetCoverInstance { set_neighbors, element_neighbors, delta, freq, m })
    }

    pub fn num_sets(&self) -> usize {
        self.set_neighbors.len()
    }

    pub fn num_elements(&self) -> usize {
        self.element_neighbors.len()
    }

    /// Maximum set size.
    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Maximum number of sets containing one element.
    pub fn freq(&self) -> usize {
        self.freq
    }

    /// Number of (set, element) incidences.
    pub fn num_edges(&self) -> usize {
        self.m
    }

    /// Vertices of the bipartite graph: sets plus elements.
    pub fn num_vertices(&self) -> usize {
        self.num_sets() + self.num_elements()
    }

    /// Elements of set `s`, ascending.
    #[inline]
    pub fn set(&self, s: usize) -> &[usize] {
        &self.set_neighbors[s]
    }

    /// Sets containing element `t`, ascending.
    #[inline]
    pub fn element(&self, t: usize) -> &[usize] {
        &self.element_neighbors[t]
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.set_neighbors
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.element_neighbors
    }

    pub fn is_empty(&self) -> bool {
        self.num_elements() == 0
    }

    /// Writes the instance in the `p sc` format, edges sorted by (set, element).
    pub fn serialize(&self) -> String {
        let mut out = String::with_capacity(16 + self.m * 12);
        let _ = writeln!(out, "p sc {} {} {}", self.num_sets(), self.num_elements(), self.m);
        for (s, elems) in self.set_neighbors.iter().enumerate() {
            for t in elems {
                let _ = writeln!(out, "e {s} {t}");
            }
        }
        out
    }
}

fn parse_count(tok: Option<&str>, line: usize, what: &str) -> Result<usize, InstanceError> {
    tok.ok_or_else(|| InstanceError::MalformedHeader { line, msg: format!("missing {what}") })?
        .parse()
        .map_err(|_| InstanceError::MalformedHeader { line, msg: format!("bad {what}") })
}

fn is_comment(line: &str) -> bool {
    line.starts_with('c') && (line.len() == 1 || line[1..].starts_with(char::is_whitespace))
}

/// Parses the `p sc` format.
pub fn parse_instance(text: &str) -> Result<SetCoverInstance, InstanceError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !is_comment(l));

    let (hline, header) = lines.next().ok_or(InstanceError::MissingHeader)?;
    let mut tok = header.split_whitespace();
    if tok.next() != Some("p") || tok.next() != Some("sc") {
        return Err(InstanceError::MalformedHeader { line: hline, msg: "expected `p sc`".into() });
    }
    let num_sets = parse_count(tok.next(), hline, "num_sets")?;
    let num_elements = parse_count(tok.next(), hline, "num_elements")?;
    let num_edges = parse_count(tok.next(), hline, "num_edges")?;
    if tok.next().is_some() {
        return Err(InstanceError::MalformedHeader { line: hline, msg: "trailing tokens".into() });
    }

    let mut edges = Vec::with_capacity(num_edges);
    for (line, l) in lines {
        let mut tok = l.split_whitespace();
        if tok.next() != Some("e") {
            return Err(InstanceError::MalformedLine { line, msg: "expected `e <set> <element>`".into() });
        }
        let mut id = |what: &str| -> Result<usize, InstanceError> {
            tok.next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| InstanceError::MalformedLine { line, msg: format!("bad {what} id") })
        };
        let (s, t) = (id("set")?, id("element")?);
        if tok.next().is_some() {
            return Err(InstanceError::MalformedLine { line, msg: "trailing tokens".into() });
        }
        if s >= num_sets {
            return Err(InstanceError::IdOutOfRange { line, id: s, limit: num_sets });
        }
        if t >= num_elements {
            return Err(InstanceError::IdOutOfRange { line, id: t, limit: num_elements });
        }
        edges.push((s, t));
    }
    if edges.len() != num_edges {
        return Err(InstanceError::EdgeCountMismatch { declared: num_edges, found: edges.len() });
    }
    SetCoverInstance::from_edges(num_sets, num_elements, edges)
}

/// Hypergraph with sorted, duplicate-free, nonempty edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    num_vertices: usize,
    edges: Vec<Vec<usize>>,
    rank: usize,
    avg_rank: f64,
}

impl Hypergraph {
    pub fn new(num_vertices: usize, mut edges: Vec<Vec<usize>>) -> Result<Self, InstanceError> {
        for (i, e) in edges.iter_mut().enumerate() {
            if e.is_empty() {
                return Err(InstanceError::EmptyEdge { edge: i });
            }
            e.sort_unstable();
            if let Some(&v) = e.iter().find(|&&v| v >= num_vertices) {
                return Err(InstanceError::IdOutOfRange { line: 0, id: v, limit: num_vertices });
            }
            if let Some(w) = e.windows(2).find(|w| w[0] == w[1]) {
                return Err(InstanceError::DuplicateVertex { edge: i, vertex: w[0] });
            }
        }
        let rank = edges.iter().map(Vec::len).max().unwrap_or(0);
        let total: usize = edges.iter().map(Vec::len).sum();
        let avg_rank = if edges.is_empty() { 0.0 } else { total as f64 / edges.len() as f64 };
        Ok(Hypergraph { num_vertices, edges, rank, avg_rank })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, e: usize) -> &[usize] {
        &self.edges[e]
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn avg_rank(&self) -> f64 {
        self.avg_rank
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_vertices];
        for e in &self.edges {
            for &v in e {
                deg[v] += 1;
            }
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn serialize(&self) -> String {
        let mut out = format!("p hg {} {}\n", self.num_vertices, self.edges.len());
        for e in &self.edges {
            let line: Vec<String> = e.iter().map(ToString::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Parses the `p hg` format.
pub fn parse_hypergraph(text: &str) -> Result<Hypergraph, InstanceError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !is_comment(l));

    let (hline, header) = loop {
        match lines.next() {
            Some((_, "")) => continue,
            Some(h) => break h,
            None => return Err(InstanceError::MissingHeader),
        }
    };
    let mut tok = header.split_whitespace();
    if tok.next() != Some("p") || tok.next() != Some("hg") {
        return Err(InstanceError::MalformedHeader { line: hline, msg: "expected `p hg`".into() });
    }
    let num_vertices = parse_count(tok.next(), hline, "num_vertices")?;
    let num_edges = parse_count(tok.next(), hline, "num_edges")?;
    if tok.next().is_some() {
        return Err(InstanceError::MalformedHeader { line: hline, msg: "trailing tokens".into() });
    }

    let mut edges = Vec::with_capacity(num_edges);
    for (line, l) in lines.by_ref() {
        if edges.len() == num_edges {
            if l.is_empty() {
                continue;
            }
            return Err(InstanceError::EdgeCountMismatch { declared: num_edges, found: num_edges + 1 });
        }
        if l.is_empty() {
            return Err(InstanceError::EmptyEdge { edge: edges.len() });
        }
        let mut e = Vec::new();
        for v in l.split_whitespace() {
            let v: usize = v
                .parse()
                .map_err(|_| InstanceError::MalformedLine { line, msg: format!("bad vertex id `{v}`") })?;
            if v >= num_vertices {
                return Err(InstanceError::IdOutOfRange { line, id: v, limit: num_vertices });
            }
            e.push(v);
        }
        edges.push(e);
    }
    if edges.len() != num_edges {
        return Err(InstanceError::EdgeCountMismatch { declared: num_edges, found: edges.len() });
    }
    Hypergraph::new(num_vertices, edges)
}

/// Random instance in which every element lies in exactly `element_degree`
/// distinct sets chosen uniformly at random.
pub fn generate_random_instance(
    num_sets: usize,
    num_elements: usize,
    element_degree: usize,
    seed: u64,
) -> Result<SetCoverInstance, InstanceError> {
    if element_degree > num_sets || (element_degree == 0 && num_elements > 0) {
        return Err(InstanceError::DegreeTooLarge { degree: element_degree, num_sets });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets = vec![Vec::new(); num_sets];
    for t in 0..num_elements {
        for s in sample(&mut rng, num_sets, element_degree) {
            sets[s].push(t);
        }
    }
    SetCoverInstance::from_sets(num_elements, sets)
}

/// Random hypergraph whose edges each have exactly `rank` distinct vertices.
pub fn generate_random_hypergraph(
    num_vertices: usize,
    num_edges: usize,
    rank: usize,
    seed: u64,
) -> Result<Hypergraph, InstanceError> {
    if rank > num_vertices {
        return Err(InstanceError::RankTooLarge { rank, num_vertices });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = (0..num_edges).map(|_| sample(&mut rng, num_vertices, rank).into_vec()).collect();
    Hypergraph::new(num_vertices, edges)
}

/// Sets become vertices; each element becomes the hyperedge of its sets.
pub fn to_hypergraph(instance: &SetCoverInstance) -> Hypergraph {
    Hypergraph::new(instance.num_sets(), instance.elements().to_vec())
        .expect("feasible instances have nonempty, duplicate-free element lists")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let i = parse_instance("p sc 1 2 2\ne 0 0\ne 0 1\n").unwrap();
        assert_eq!((i.delta(), i.freq()), (2, 1));
        let i = parse_instance("p sc 2 1 2\ne 0 0\ne 1 0\n").unwrap();
        assert_eq!((i.delta(), i.freq()), (1, 2));
        // An empty set is allowed; only uncovered elements are rejected.
        let i = parse_instance("p sc 2 2 2\ne 0 0\ne 0 1\n").unwrap();
        assert!(i.set(1).is_empty());
    }

    #[test]
    fn parse_infeasible_reports_uncovered_element() {
        let err = parse_instance("p sc 2 2 2\ne 0 0\ne 1 0\n").unwrap_err();
        assert_eq!(err, InstanceError::InfeasibleInstance { element: 1 });
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_instance(""), Err(InstanceError::MissingHeader)));
        assert!(matches!(parse_instance("p xx 1 1 1"), Err(InstanceError::MalformedHeader { .. })));
        assert!(matches!(parse_instance("p sc 1 1 1\ne 0"), Err(InstanceError::MalformedLine { .. })));
        assert!(matches!(parse_instance("p sc 1 1 1\ne 1 0"), Err(InstanceError::IdOutOfRange { id: 1, .. })));
        assert!(matches!(parse_instance("p sc 1 1 2\ne 0 0\ne 0 0"), Err(InstanceError::DuplicateEdge { .. })));
        assert!(matches!(
            parse_instance("p sc 1 1 2\ne 0 0"),
            Err(InstanceError::EdgeCountMismatch { declared: 2, found: 1 })
        ));
    }

    #[test]
    fn empty_instance_is_valid() {
        let i = parse_instance("p sc 0 0 0\n").unwrap();
        assert!(i.is_empty());
        assert_eq!((i.delta(), i.freq(), i.num_edges()), (0, 0, 0));
    }

    #[test]
    fn comments_and_blanks_in_set_cover_files() {
        let i = parse_instance("c hello\n\np sc 1 1 1\n\ne 0 0\n").unwrap();
        assert_eq!(i.num_edges(), 1);
    }

    #[test]
    fn hypergraph_examples() {
        let h = parse_hypergraph("p hg 2 1\n0 1\n").unwrap();
        assert_eq!((h.rank(), h.num_edges()), (2, 1));
        let h = parse_hypergraph("p hg 3 2\n0 1 2\n1 2\n").unwrap();
        assert_eq!(h.rank(), 3);
        assert!((h.avg_rank() - 2.5).abs() < 1e-12);
        assert_eq!(parse_hypergraph("p hg 2 1\n\n").unwrap_err(), InstanceError::EmptyEdge { edge: 0 });
    }

    #[test]
    fn hypergraph_errors() {
        assert!(matches!(parse_hypergraph("p hg 2 1\n0 2\n"), Err(InstanceError::IdOutOfRange { id: 2, .. })));
        assert!(matches!(
            parse_hypergraph("p hg 2 1\n1 1\n"),
            Err(InstanceError::DuplicateVertex { edge: 0, vertex: 1 })
        ));
        assert!(matches!(parse_hypergraph("p hg 2 2\n0 1\n"), Err(InstanceError::EdgeCountMismatch { .. })));
        let h = parse_hypergraph("p hg 3 0\n").unwrap();
        assert_eq!((h.rank(), h.avg_rank()), (0, 0.0));
    }

    #[test]
    fn generator_extremes() {
        let i = generate_random_instance(4, 10, 1, 7).unwrap();
        assert_eq!(i.freq(), 1);
        assert!(i.elements().iter().all(|e| e.len() == 1));
        let i = generate_random_instance(4, 10, 4, 7).unwrap();
        assert_eq!(i.delta(), 10);
        assert!(matches!(generate_random_instance(3, 10, 4, 7), Err(InstanceError::DegreeTooLarge { .. })));
    }

    #[test]
    fn generator_edge_count() {
        let i = generate_random_instance(20, 100, 3, 1).unwrap();
        assert_eq!(i.freq(), 3);
        assert_eq!(i.sets().iter().map(Vec::len).sum::<usize>(), 300);
        assert_eq!(i.num_edges(), 300);
    }

    #[test]
    fn generator_is_deterministic() {
        assert_eq!(generate_random_instance(20, 100, 3, 5), generate_random_instance(20, 100, 3, 5));
        assert_ne!(generate_random_instance(20, 100, 3, 5), generate_random_instance(20, 100, 3, 6));
    }

    #[test]
    fn hypergraph_conversion() {
        let i = parse_instance("p sc 1 2 2\ne 0 0\ne 0 1\n").unwrap();
        let h = to_hypergraph(&i);
        assert_eq!((h.num_vertices(), h.num_edges()), (1, 2));
        assert!(h.edges().iter().all(|e| e == &vec![0]));

        let vc = parse_instance("p sc 3 3 6\ne 0 0\ne 1 0\ne 1 1\ne 2 1\ne 2 2\ne 0 2\n").unwrap();
        assert_eq!(to_hypergraph(&vc).rank(), 2);

        let r = generate_random_instance(20, 100, 3, 1).unwrap();
        let h = to_hypergraph(&r);
        assert_eq!(h.num_edges(), 100);
        assert!(h.edges().iter().all(|e| e.len() == 3));
        assert!((h.avg_rank() - 3.0).abs() < 1e-12);
        for t in 0..100 {
            assert_eq!(h.edge(t), r.element(t));
        }
    }
}
