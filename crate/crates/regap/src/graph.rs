//! Attributed graphs and regular graph patterns.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::{json, Map, Value};

use crate::constraints::{attrs_from_json, attrs_to_json, Attrs, Constraint, PairConstraint};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    In,
    Out,
}

/// Simple directed graph with attributed nodes and edges.
///
/// Nodes are indexed densely in sorted id order, edges in sorted
/// `(src, dst)` index order.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    node_attrs: Vec<Attrs>,
    edges: Vec<(usize, usize)>,
    edge_attrs: Vec<Attrs>,
    edge_index: HashMap<(usize, usize), usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    nodes: Vec<(String, Attrs)>,
    edges: Vec<(String, String, Attrs)>,
}

impl GraphBuilder {
    pub fn node(mut self, id: impl Into<String>, attrs: Attrs) -> Self {
        self.nodes.push((id.into(), attrs));
        self
    }

    pub fn edge(mut self, src: impl Into<String>, dst: impl Into<String>, attrs: Attrs) -> Self {
        self.edges.push((src.into(), dst.into(), attrs));
        self
    }

    pub fn add_node(&mut self, id: impl Into<String>, attrs: Attrs) {
        self.nodes.push((id.into(), attrs));
    }

    pub fn add_edge(&mut self, src: impl Into<String>, dst: impl Into<String>, attrs: Attrs) {
        self.edges.push((src.into(), dst.into(), attrs));
    }

    pub fn build(self) -> Result<Graph> {
        let mut sorted: BTreeMap<String, Attrs> = BTreeMap::new();
        for (id, attrs) in self.nodes {
            if sorted.contains_key(&id) {
                return Err(Error::DuplicateNode(id));
            }
            sorted.insert(id, attrs);
        }
        let ids: Vec<String> = sorted.keys().cloned().collect();
        let index: HashMap<String, usize> = ids.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let node_attrs: Vec<Attrs> = sorted.into_values().collect();

        let mut edge_map: BTreeMap<(usize, usize), Attrs> = BTreeMap::new();
        for (src, dst, attrs) in self.edges {
            let lookup = |id: &str| {
                index.get(id).copied().ok_or_else(|| Error::DanglingEndpoint {
                    src: src.clone(),
                    dst: dst.clone(),
                    missing: id.to_string(),
                })
            };
            let key = (lookup(&src)?, lookup(&dst)?);
            if edge_map.insert(key, attrs).is_some() {
                return Err(Error::DuplicateEdge(src, dst));
            }
        }
        Ok(Graph::assemble(ids, index, node_attrs, edge_map))
    }
}

impl Graph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    fn assemble(
        ids: Vec<String>,
        index: HashMap<String, usize>,
        node_attrs: Vec<Attrs>,
        edge_map: BTreeMap<(usize, usize), Attrs>,
    ) -> Graph {
        let n = ids.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(edge_map.len());
        let mut edge_attrs = Vec::with_capacity(edge_map.len());
        let mut edge_index = HashMap::with_capacity(edge_map.len());
        for ((s, d), a) in edge_map {
            edge_index.insert((s, d), edges.len());
            edges.push((s, d));
            edge_attrs.push(a);
            succ[s].push(d);
            pred[d].push(s);
        }
        for p in &mut pred {
            p.sort_unstable();
        }
        Graph { ids, index, node_attrs, edges, edge_attrs, edge_index, succ, pred }
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node_attrs(&self, v: usize) -> &Attrs {
        &self.node_attrs[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_attrs(&self, e: usize) -> &Attrs {
        &self.edge_attrs[e]
    }

    pub fn edge_id(&self, src: usize, dst: usize) -> Option<usize> {
        self.edge_index.get(&(src, dst)).copied()
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.edge_index.contains_key(&(src, dst))
    }

    pub fn succ(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn pred(&self, v: usize) -> &[usize] {
        &self.pred[v]
    }

    /// Rebuilds a graph from index-level parts; node ids stay as given.
    pub(crate) fn from_parts(nodes: Vec<(String, Attrs)>, edges: Vec<(String, String, Attrs)>) -> Graph {
        GraphBuilder { nodes, edges }.build().expect("parts of a valid graph")
    }

    pub fn from_json_value(v: &Value) -> Result<Graph> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Malformed("graph document must be an object".into()))?;
        let mut b = GraphBuilder::default();
        for n in array(obj, "nodes")? {
            let n = n.as_object().ok_or_else(|| Error::Malformed("node must be an object".into()))?;
            b.add_node(string(n, "id")?, attrs_from_json(n.get("attrs"))?);
        }
        for e in array(obj, "edges")? {
            let e = e.as_object().ok_or_else(|| Error::Malformed("edge must be an object".into()))?;
            b.add_edge(string(e, "src")?, string(e, "dst")?, attrs_from_json(e.get("attrs"))?);
        }
        b.build()
    }

    pub fn to_json_value(&self) -> Value {
        let nodes: Vec<Value> = (0..self.node_count())
            .map(|v| json!({"id": self.ids[v], "attrs": attrs_to_json(&self.node_attrs[v])}))
            .collect();
        let edges: Vec<Value> = self
            .edges
            .iter()
            .zip(&self.edge_attrs)
            .map(|(&(s, d), a)| json!({"src": self.ids[s], "dst": self.ids[d], "attrs": attrs_to_json(a)}))
            .collect();
        json!({"nodes": nodes, "edges": edges})
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("graph serializes")
    }
}

pub fn load_graph(bytes: &[u8]) -> Result<Graph> {
    let v: Value = serde_json::from_slice(bytes).map_err(|e| Error::Malformed(e.to_string()))?;
    Graph::from_json_value(&v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WildcardKind {
    /// `S*`
    Seq0Plus,
    /// `S+`
    Seq1Plus,
    /// `G*`
    Sub0Plus,
    /// `G+`
    Sub1Plus,
}

impl WildcardKind {
    pub const ALL: [WildcardKind; 4] =
        [WildcardKind::Seq0Plus, WildcardKind::Seq1Plus, WildcardKind::Sub0Plus, WildcardKind::Sub1Plus];

    pub fn is_seq(self) -> bool {
        matches!(self, WildcardKind::Seq0Plus | WildcardKind::Seq1Plus)
    }

    pub fn is_zero_plus(self) -> bool {
        matches!(self, WildcardKind::Seq0Plus | WildcardKind::Sub0Plus)
    }

    pub fn name(self) -> &'static str {
        match self {
            WildcardKind::Seq0Plus => "seq0plus",
            WildcardKind::Seq1Plus => "seq1plus",
            WildcardKind::Sub0Plus => "sub0plus",
            WildcardKind::Sub1Plus => "sub1plus",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            WildcardKind::Seq0Plus => "S*",
            WildcardKind::Seq1Plus => "S+",
            WildcardKind::Sub0Plus => "G*",
            WildcardKind::Sub1Plus => "G+",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Concrete,
    Wildcard(WildcardKind),
}

impl NodeKind {
    pub fn parse(s: &str) -> Result<NodeKind> {
        if s == "concrete" {
            return Ok(NodeKind::Concrete);
        }
        WildcardKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .map(NodeKind::Wildcard)
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Concrete => "concrete",
            NodeKind::Wildcard(w) => w.name(),
        }
    }

    pub fn wildcard(self) -> Option<WildcardKind> {
        match self {
            NodeKind::Concrete => None,
            NodeKind::Wildcard(w) => Some(w),
        }
    }

    pub fn is_wildcard(self) -> bool {
        matches!(self, NodeKind::Wildcard(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairEntry {
    pub u: usize,
    pub v: usize,
    pub constraint: PairConstraint,
}

/// A regular graph pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    kinds: Vec<NodeKind>,
    node_constraints: Vec<Constraint>,
    edges: Vec<(usize, usize)>,
    edge_constraints: Vec<Constraint>,
    edge_index: HashMap<(usize, usize), usize>,
    pairs: Vec<PairEntry>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    has_wildcard_edge: bool,
}

#[derive(Debug, Default, Clone)]
pub struct PatternBuilder {
    nodes: Vec<(String, NodeKind, Option<Constraint>)>,
    edges: Vec<(String, String, Constraint)>,
    pairs: Vec<(String, String, PairConstraint)>,
}

impl PatternBuilder {
    pub fn concrete(mut self, id: impl Into<String>, c: Constraint) -> Self {
        let c = if c.is_true() { None } else { Some(c) };
        self.nodes.push((id.into(), NodeKind::Concrete, c));
        self
    }

    pub fn wildcard(mut self, id: impl Into<String>, kind: WildcardKind) -> Self {
        self.nodes.push((id.into(), NodeKind::Wildcard(kind), None));
        self
    }

    pub fn edge(mut self, src: impl Into<String>, dst: impl Into<String>) -> Self {
        self.edges.push((src.into(), dst.into(), Constraint::True));
        self
    }

    pub fn edge_with(mut self, src: impl Into<String>, dst: impl Into<String>, c: Constraint) -> Self {
        self.edges.push((src.into(), dst.into(), c));
        self
    }

    pub fn pair(mut self, u: impl Into<String>, v: impl Into<String>, c: PairConstraint) -> Self {
        self.pairs.push((u.into(), v.into(), c));
        self
    }

    pub fn add_node(&mut self, id: impl Into<String>, kind: NodeKind, c: Option<Constraint>) {
        self.nodes.push((id.into(), kind, c));
    }

    pub fn add_edge(&mut self, src: impl Into<String>, dst: impl Into<String>, c: Constraint) {
        self.edges.push((src.into(), dst.into(), c));
    }

    pub fn add_pair(&mut self, u: impl Into<String>, v: impl Into<String>, c: PairConstraint) {
        self.pairs.push((u.into(), v.into(), c));
    }

    pub fn build(self) -> Result<Pattern> {
        let mut sorted: BTreeMap<String, (NodeKind, Option<Constraint>)> = BTreeMap::new();
        for (id, kind, c) in self.nodes {
            if kind.is_wildcard() && c.is_some() {
                return Err(Error::WildcardConstraint(id));
            }
            if sorted.contains_key(&id) {
                return Err(Error::DuplicateNode(id));
            }
            sorted.insert(id, (kind, c));
        }
        let ids: Vec<String> = sorted.keys().cloned().collect();
        let index: HashMap<String, usize> = ids.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut kinds = Vec::with_capacity(ids.len());
        let mut node_constraints = Vec::with_capacity(ids.len());
        for (kind, c) in sorted.into_values() {
            kinds.push(kind);
            node_constraints.push(c.unwrap_or(Constraint::True));
        }

        let mut edge_map: BTreeMap<(usize, usize), Constraint> = BTreeMap::new();
        for (src, dst, c) in self.edges {
            let lookup = |id: &str| {
                index.get(id).copied().ok_or_else(|| Error::DanglingEndpoint {
                    src: src.clone(),
                    dst: dst.clone(),
                    missing: id.to_string(),
                })
            };
            let key = (lookup(&src)?, lookup(&dst)?);
            if key.0 == key.1 && kinds[key.0].is_wildcard() {
                return Err(Error::WildcardSelfLoop(src));
            }
            if edge_map.insert(key, c).is_some() {
                return Err(Error::DuplicateEdge(src, dst));
            }
        }

        let mut pairs: Vec<PairEntry> = Vec::new();
        for (u, v, c) in self.pairs {
            let iu = *index.get(&u).ok_or_else(|| Error::UnknownNode(u.clone()))?;
            let iv = *index.get(&v).ok_or_else(|| Error::UnknownNode(v.clone()))?;
            if kinds[iu].is_wildcard() || kinds[iv].is_wildcard() {
                return Err(Error::WildcardPair(u, v));
            }
            if iu == iv {
                return Err(Error::PairSameNode(u));
            }
            if pairs.iter().any(|p| p.u == iu && p.v == iv) {
                return Err(Error::DuplicatePair(u, v));
            }
            pairs.push(PairEntry { u: iu, v: iv, constraint: c });
        }
        pairs.sort_by_key(|p| (p.u, p.v));

        let n = ids.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        let mut edges = Vec::new();
        let mut edge_constraints = Vec::new();
        let mut edge_index = HashMap::new();
        for ((s, d), c) in edge_map {
            edge_index.insert((s, d), edges.len());
            edges.push((s, d));
            edge_constraints.push(c);
            succ[s].push(d);
            pred[d].push(s);
        }
        for p in &mut pred {
            p.sort_unstable();
        }
        let has_wildcard_edge = edges
            .iter()
            .any(|&(s, d)| kinds[s].is_wildcard() && kinds[d].is_wildcard());
        Ok(Pattern {
            ids,
            index,
            kinds,
            node_constraints,
            edges,
            edge_constraints,
            edge_index,
            pairs,
            succ,
            pred,
            has_wildcard_edge,
        })
    }
}

impl Pattern {
    pub fn builder() -> PatternBuilder {
        PatternBuilder::default()
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn kind(&self, v: usize) -> NodeKind {
        self.kinds[v]
    }

    pub fn wildcard(&self, v: usize) -> Option<WildcardKind> {
        self.kinds[v].wildcard()
    }

    pub fn is_wildcard(&self, v: usize) -> bool {
        self.kinds[v].is_wildcard()
    }

    pub fn node_constraint(&self, v: usize) -> &Constraint {
        &self.node_constraints[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_constraint(&self, e: usize) -> &Constraint {
        &self.edge_constraints[e]
    }

    pub fn edge_id(&self, src: usize, dst: usize) -> Option<usize> {
        self.edge_index.get(&(src, dst)).copied()
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.edge_index.contains_key(&(src, dst))
    }

    pub fn pairs(&self) -> &[PairEntry] {
        &self.pairs
    }

    pub fn succ(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn pred(&self, v: usize) -> &[usize] {
        &self.pred[v]
    }

    pub fn has_wildcard_edge(&self) -> bool {
        self.has_wildcard_edge
    }

    pub fn wildcards(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(|&v| self.is_wildcard(v))
    }

    pub fn concretes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(|&v| !self.is_wildcard(v))
    }

    pub fn from_json_value(v: &Value) -> Result<Pattern> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Malformed("pattern document must be an object".into()))?;
        let mut b = PatternBuilder::default();
        for n in array(obj, "nodes")? {
            let n = n.as_object().ok_or_else(|| Error::Malformed("node must be an object".into()))?;
            let id = string(n, "id")?;
            let kind = match n.get("kind") {
                None => NodeKind::Concrete,
                Some(Value::String(s)) => NodeKind::parse(s)?,
                Some(other) => return Err(Error::Malformed(format!("node kind must be a string, got {other}"))),
            };
            let c = n.get("constraint").map(Constraint::from_json).transpose()?;
            b.add_node(id, kind, c);
        }
        for e in array(obj, "edges")? {
            let e = e.as_object().ok_or_else(|| Error::Malformed("edge must be an object".into()))?;
            let c = e.get("constraint").map(Constraint::from_json).transpose()?.unwrap_or(Constraint::True);
            b.add_edge(string(e, "src")?, string(e, "dst")?, c);
        }
        if let Some(pairs) = obj.get("pair_constraints") {
            let pairs = pairs
                .as_array()
                .ok_or_else(|| Error::Malformed("\"pair_constraints\" must be an array".into()))?;
            for p in pairs {
                let p = p.as_object().ok_or_else(|| Error::Malformed("pair constraint must be an object".into()))?;
                let c = PairConstraint::from_json(
                    p.get("constraint").ok_or_else(|| Error::Malformed("pair without constraint".into()))?,
                )?;
                b.add_pair(string(p, "u")?, string(p, "v")?, c);
            }
        }
        b.build()
    }

    pub fn to_json_value(&self) -> Value {
        let nodes: Vec<Value> = (0..self.node_count())
            .map(|v| {
                let mut m = Map::new();
                m.insert("id".into(), json!(self.ids[v]));
                m.insert("kind".into(), json!(self.kinds[v].name()));
                if !self.node_constraints[v].is_true() {
                    m.insert("constraint".into(), self.node_constraints[v].to_json());
                }
                Value::Object(m)
            })
            .collect();
        let edges: Vec<Value> = self
            .edges
            .iter()
            .zip(&self.edge_constraints)
            .map(|(&(s, d), c)| {
                let mut m = Map::new();
                m.insert("src".into(), json!(self.ids[s]));
                m.insert("dst".into(), json!(self.ids[d]));
                if !c.is_true() {
                    m.insert("constraint".into(), c.to_json());
                }
                Value::Object(m)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("nodes".into(), Value::Array(nodes));
        doc.insert("edges".into(), Value::Array(edges));
        if !self.pairs.is_empty() {
            let pairs: Vec<Value> = self
                .pairs
                .iter()
                .map(|p| json!({"u": self.ids[p.u], "v": self.ids[p.v], "constraint": p.constraint.to_json()}))
                .collect();
            doc.insert("pair_constraints".into(), Value::Array(pairs));
        }
        Value::Object(doc)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("pattern serializes")
    }
}

pub fn load_pattern(bytes: &[u8]) -> Result<Pattern> {
    let v: Value = serde_json::from_slice(bytes).map_err(|e| Error::Malformed(e.to_string()))?;
    Pattern::from_json_value(&v)
}

/// Adjacency queries shared by graphs and patterns.
pub trait Adjacency {
    fn lookup(&self, id: &str) -> Option<usize>;
    fn name(&self, v: usize) -> &str;
    fn out_of(&self, v: usize) -> &[usize];
    fn in_of(&self, v: usize) -> &[usize];

    fn neighbors(&self, id: &str, dir: Direction) -> Result<BTreeSet<String>> {
        let v = self.lookup(id).ok_or_else(|| Error::UnknownNode(id.to_string()))?;
        let adj = match dir {
            Direction::In => self.in_of(v),
            Direction::Out => self.out_of(v),
        };
        Ok(adj.iter().map(|&u| self.name(u).to_string()).collect())
    }
}

impl Adjacency for Graph {
    fn lookup(&self, id: &str) -> Option<usize> {
        self.index_of(id)
    }
    fn name(&self, v: usize) -> &str {
        self.id(v)
    }
    fn out_of(&self, v: usize) -> &[usize] {
        self.succ(v)
    }
    fn in_of(&self, v: usize) -> &[usize] {
        self.pred(v)
    }
}

impl Adjacency for Pattern {
    fn lookup(&self, id: &str) -> Option<usize> {
        self.index_of(id)
    }
    fn name(&self, v: usize) -> &str {
        self.id(v)
    }
    fn out_of(&self, v: usize) -> &[usize] {
        self.succ(v)
    }
    fn in_of(&self, v: usize) -> &[usize] {
        self.pred(v)
    }
}

pub fn neighbors<G: Adjacency>(g: &G, id: &str, dir: Direction) -> Result<BTreeSet<String>> {
    g.neighbors(id, dir)
}

fn array<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Vec<Value>> {
    match obj.get(name) {
        Some(Value::Array(a)) => Ok(a),
        Some(_) => Err(Error::Malformed(format!("{name:?} must be an array"))),
        None => Err(Error::Malformed(format!("missing {name:?}"))),
    }
}

fn string(obj: &Map<String, Value>, name: &str) -> Result<String> {
    match obj.get(name) {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(Error::Malformed(format!("{name:?} must be a string"))),
        None => Err(Error::Malformed(format!("missing {name:?}"))),
    }
}
