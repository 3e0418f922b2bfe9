//! Seeded instance generators: CFG-like corpora for benchmarking and small
//! random (pattern, graph) pairs for cross-checking.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use crate::constraints::{AttrValue, Attrs, CmpOp, Constraint, Operand, PairConstraint};
use crate::error::Error;
use crate::expand::expand;
use crate::graph::{Graph, NodeKind, Pattern, WildcardKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const CFG_KINDS: [&str; 5] = ["assign", "call", "branch", "loop-head", "return"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfgParams {
    /// median node count
    pub median_nodes: f64,
    /// spread of the log-normal size distribution
    pub sigma: f64,
    pub min_nodes: usize,
    pub max_nodes: usize,
}

impl Default for CfgParams {
    fn default() -> Self {
        CfgParams { median_nodes: 21.0, sigma: 0.55, min_nodes: 4, max_nodes: 200 }
    }
}

enum Stmt {
    Simple(&'static str),
    If(Vec<Stmt>, Vec<Stmt>),
    While(Vec<Stmt>),
}

fn gen_block(rng: &mut ChaCha8Rng, budget: &mut isize, depth: usize) -> Vec<Stmt> {
    let mut out = Vec::new();
    let len = rng.gen_range(1..=4);
    for _ in 0..len {
        if *budget <= 0 {
            break;
        }
        let roll: f64 = rng.gen();
        if depth < 3 && roll < 0.2 && *budget >= 3 {
            *budget -= 1;
            let then = gen_block(rng, budget, depth + 1);
            let els = if rng.gen_bool(0.5) { gen_block(rng, budget, depth + 1) } else { Vec::new() };
            out.push(Stmt::If(then, els));
        } else if depth < 3 && roll < 0.32 && *budget >= 2 {
            *budget -= 1;
            out.push(Stmt::While(gen_block(rng, budget, depth + 1)));
        } else {
            *budget -= 1;
            out.push(Stmt::Simple(if rng.gen_bool(0.6) { "assign" } else { "call" }));
        }
    }
    if out.is_empty() {
        *budget -= 1;
        out.push(Stmt::Simple("assign"));
    }
    out
}

struct Lowering {
    kinds: Vec<&'static str>,
    edges: Vec<(usize, usize, Option<bool>)>,
}

impl Lowering {
    fn node(&mut self, kind: &'static str) -> usize {
        self.kinds.push(kind);
        self.kinds.len() - 1
    }

    /// Lowers `block` so that it falls through to `next`; returns its entry.
    fn block(&mut self, block: &[Stmt], next: usize) -> usize {
        let mut succ = next;
        for s in block.iter().rev() {
            succ = match s {
                Stmt::Simple(k) => {
                    let n = self.node(k);
                    self.edges.push((n, succ, None));
                    n
                }
                Stmt::If(then, els) => {
                    let b = self.node("branch");
                    let t = self.block(then, succ);
                    let e = if els.is_empty() { succ } else { self.block(els, succ) };
                    self.edges.push((b, t, Some(true)));
                    self.edges.push((b, e, Some(false)));
                    b
                }
                Stmt::While(body) => {
                    let h = self.node("loop-head");
                    let entry = self.block(body, h);
                    self.edges.push((h, entry, Some(true)));
                    self.edges.push((h, succ, Some(false)));
                    h
                }
            };
        }
        succ
    }
}

/// One CFG-like graph: single entry, a `return` exit, sequence, if/else and
/// loop motifs. Nodes carry `kind` and `line`; branch edges carry `cond`.
pub fn cfg_graph(rng: &mut ChaCha8Rng, target_nodes: usize) -> Graph {
    let mut budget = target_nodes.saturating_sub(1).max(1) as isize;
    let mut body = Vec::new();
    while budget > 0 {
        body.extend(gen_block(rng, &mut budget, 0));
    }
    let mut low = Lowering { kinds: Vec::new(), edges: Vec::new() };
    let ret = low.node("return");
    let entry = low.block(&body, ret);

    // number nodes in a depth-first order from the entry
    let n = low.kinds.len();
    let mut order = vec![usize::MAX; n];
    let mut stack = vec![entry];
    let mut next = 0;
    let mut succs = vec![Vec::new(); n];
    for &(a, b, _) in &low.edges {
        succs[a].push(b);
    }
    while let Some(v) = stack.pop() {
        if order[v] != usize::MAX {
            continue;
        }
        order[v] = next;
        next += 1;
        for &s in succs[v].iter().rev() {
            stack.push(s);
        }
    }
    let width = n.to_string().len();
    let id = |v: usize| format!("n{:0width$}", order[v], width = width);
    let mut b = Graph::builder();
    for v in 0..n {
        let mut a = Attrs::new();
        a.insert("kind".into(), AttrValue::Str(low.kinds[v].into()));
        a.insert("line".into(), AttrValue::Int(order[v] as i64 + 1));
        b.add_node(id(v), a);
    }
    let mut seen = std::collections::HashSet::new();
    for &(x, y, cond) in &low.edges {
        if !seen.insert((x, y)) {
            continue;
        }
        let mut a = Attrs::new();
        if let Some(c) = cond {
            a.insert("cond".into(), AttrValue::Bool(c));
        }
        b.add_edge(id(x), id(y), a);
    }
    b.build().expect("generated CFG is well formed")
}

/// `count` graphs whose sizes follow a log-normal around `median_nodes`.
pub fn cfg_corpus(seed: u64, count: usize, params: CfgParams) -> Vec<Graph> {
    let mut r = rng(seed);
    let dist = LogNormal::new(params.median_nodes.ln(), params.sigma).expect("valid log-normal");
    (0..count)
        .map(|_| {
            let target = (dist.sample(&mut r).round() as usize).clamp(params.min_nodes, params.max_nodes);
            cfg_graph(&mut r, target)
        })
        .collect()
}

/// `head -> c1 -> ... -> c_len -> tail` where only `head` and `tail` carry a
/// `kind` that the chain patterns constrain.
pub fn chain_graph(interior: usize) -> Graph {
    let mut b = Graph::builder();
    let width = (interior + 2).to_string().len();
    let ids: Vec<String> = (0..interior + 2).map(|i| format!("c{:0width$}", i, width = width)).collect();
    for (i, id) in ids.iter().enumerate() {
        let kind = if i == 0 {
            "branch"
        } else if i == interior + 1 {
            "return"
        } else {
            "assign"
        };
        let mut a = Attrs::new();
        a.insert("kind".into(), AttrValue::Str(kind.into()));
        b.add_node(id.clone(), a);
    }
    for w in ids.windows(2) {
        b.add_edge(w[0].clone(), w[1].clone(), Attrs::new());
    }
    b.build().unwrap()
}

fn kind_is(k: &str) -> Constraint {
    Constraint::cmp("kind", CmpOp::Eq, AttrValue::Str(k.into()))
}

/// Bench patterns with `w` wildcards (1 to 5): a chain
/// `branch -> W1 -> assign -> W2 -> ...` ending in `return`.
pub fn wildcard_pattern(w: usize) -> Pattern {
    let kinds = [WildcardKind::Seq0Plus, WildcardKind::Sub0Plus, WildcardKind::Seq1Plus, WildcardKind::Seq0Plus, WildcardKind::Sub0Plus];
    let mut b = Pattern::builder();
    b.add_node("c0", NodeKind::Concrete, Some(kind_is("branch")));
    let mut prev = "c0".to_string();
    for i in 0..w {
        let wid = format!("w{}", i + 1);
        b.add_node(wid.clone(), NodeKind::Wildcard(kinds[i % kinds.len()]), None);
        let cid = format!("c{}", i + 1);
        let ck = if i + 1 == w { "return" } else { "assign" };
        b.add_node(cid.clone(), NodeKind::Concrete, Some(kind_is(ck)));
        b.add_edge(prev.clone(), wid.clone(), Constraint::True);
        b.add_edge(wid, cid.clone(), Constraint::True);
        prev = cid;
    }
    b.build().unwrap()
}

/// Patterns used by `bench` when none are given.
pub fn default_bench_patterns() -> Vec<(String, Pattern)> {
    let mut out: Vec<(String, Pattern)> = (1..=5).map(|w| (format!("chain-w{w}"), wildcard_pattern(w))).collect();
    let loop_pat = Pattern::builder()
        .concrete("H", kind_is("loop-head"))
        .wildcard("B", WildcardKind::Sub1Plus)
        .concrete("X", Constraint::True)
        .edge("H", "B")
        .edge("B", "H")
        .edge("H", "X")
        .build()
        .unwrap();
    out.push(("loop-body".into(), loop_pat));
    out
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub pattern: Pattern,
    pub graph: Graph,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallParams {
    pub max_graph_nodes: usize,
    pub max_pattern_nodes: usize,
    pub max_wildcards: usize,
    /// probability that a concrete node or edge gets a non-trivial constraint
    pub constraint_density: f64,
    pub allow_wildcards: bool,
}

impl Default for SmallParams {
    fn default() -> Self {
        SmallParams { max_graph_nodes: 6, max_pattern_nodes: 5, max_wildcards: 2, constraint_density: 0.3, allow_wildcards: true }
    }
}

fn random_attrs(rng: &mut ChaCha8Rng) -> Attrs {
    let mut a = Attrs::new();
    if rng.gen_bool(0.9) {
        a.insert("x".into(), AttrValue::Int(rng.gen_range(-2..=2)));
    }
    if rng.gen_bool(0.3) {
        a.insert("y".into(), AttrValue::Bool(rng.gen()));
    }
    a
}

fn random_edge_attrs(rng: &mut ChaCha8Rng) -> Attrs {
    let mut a = Attrs::new();
    if rng.gen_bool(0.5) {
        a.insert("w".into(), AttrValue::Int(rng.gen_range(0..=2)));
    }
    a
}

/// Weakly connected random graph on `n` nodes `g0..`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let mut edges = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.insert(if rng.gen_bool(0.5) { (u, v) } else { (v, u) });
    }
    for u in 0..n {
        for v in 0..n {
            let p = if u == v { 0.05 } else { 0.15 };
            if rng.gen_bool(p) {
                edges.insert((u, v));
            }
        }
    }
    let mut b = Graph::builder();
    for v in 0..n {
        b.add_node(format!("g{v}"), random_attrs(rng));
    }
    for (u, v) in edges {
        b.add_edge(format!("g{u}"), format!("g{v}"), random_edge_attrs(rng));
    }
    b.build().unwrap()
}

fn random_node_constraint(rng: &mut ChaCha8Rng, truth: Option<&Attrs>) -> Constraint {
    // with a reference node, bias towards constraints it satisfies
    if let Some(a) = truth {
        if rng.gen_bool(0.7) {
            if let Some(v) = a.get("x") {
                let op = *[CmpOp::Eq, CmpOp::Le, CmpOp::Ge].choose(rng).unwrap();
                return Constraint::cmp("x", op, v.clone());
            }
        }
    }
    match rng.gen_range(0..4) {
        0 => Constraint::cmp("x", *CmpOp::ALL.choose(rng).unwrap(), AttrValue::Int(rng.gen_range(-2..=2))),
        1 => Constraint::Has("y".into()),
        2 => Constraint::Not(Box::new(Constraint::cmp("x", CmpOp::Lt, AttrValue::Int(0)))),
        _ => Constraint::Or(vec![
            Constraint::cmp("x", CmpOp::Eq, AttrValue::Int(rng.gen_range(-2..=2))),
            Constraint::cmp("y", CmpOp::Eq, AttrValue::Bool(true)),
        ]),
    }
}

fn random_edge_constraint(rng: &mut ChaCha8Rng) -> Constraint {
    if rng.gen_bool(0.5) {
        Constraint::cmp("w", *CmpOp::ALL.choose(rng).unwrap(), AttrValue::Int(rng.gen_range(0..=2)))
    } else {
        Constraint::Not(Box::new(Constraint::Has("w".into())))
    }
}

fn random_pair_constraint(rng: &mut ChaCha8Rng) -> PairConstraint {
    PairConstraint::cmp(Operand::u("x"), *CmpOp::ALL.choose(rng).unwrap(), Operand::v("x"))
}

fn wildcard_kind(rng: &mut ChaCha8Rng) -> WildcardKind {
    *WildcardKind::ALL.choose(rng).unwrap()
}

/// The pattern is accepted by the loader and the encoder.
fn supported(p: &Pattern) -> bool {
    let one = Graph::builder().node("z", Attrs::new()).build().unwrap();
    !matches!(expand(p, &one, 1), Err(Error::Unsupported(_)))
}

struct Draft {
    kinds: Vec<NodeKind>,
    edges: std::collections::BTreeSet<(usize, usize)>,
    /// graph node a concrete was derived from, if any
    origin: Vec<Option<usize>>,
}

impl Draft {
    fn build(&self, rng: &mut ChaCha8Rng, g: &Graph, density: f64) -> Option<Pattern> {
        let n = self.kinds.len();
        let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let mut b = Pattern::builder();
        for i in 0..n {
            let c = match self.kinds[i] {
                NodeKind::Concrete if rng.gen_bool(density) => {
                    Some(random_node_constraint(rng, self.origin[i].map(|v| g.node_attrs(v))))
                }
                _ => None,
            };
            b.add_node(names[i].clone(), self.kinds[i], c);
        }
        for &(u, v) in &self.edges {
            let c = if rng.gen_bool(density / 2.0) { random_edge_constraint(rng) } else { Constraint::True };
            b.add_edge(names[u].clone(), names[v].clone(), c);
        }
        let concretes: Vec<usize> = (0..n).filter(|&i| self.kinds[i] == NodeKind::Concrete).collect();
        if concretes.len() >= 2 && rng.gen_bool(density / 2.0) {
            let mut pick = concretes.clone();
            pick.shuffle(rng);
            b.add_pair(names[pick[0]].clone(), names[pick[1]].clone(), random_pair_constraint(rng));
        }
        let p = b.build().ok()?;
        supported(&p).then_some(p)
    }

    fn weakly_connected(&self) -> bool {
        let n = self.kinds.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for &(u, v) in &self.edges {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (0..n).all(|x| find(&mut parent, x) == root)
    }
}

fn random_draft(rng: &mut ChaCha8Rng, params: &SmallParams) -> Draft {
    let n = rng.gen_range(1..=params.max_pattern_nodes);
    let w = if params.allow_wildcards { rng.gen_range(0..=params.max_wildcards.min(n)) } else { 0 };
    let mut kinds = vec![NodeKind::Concrete; n];
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    for &i in &idx[..w] {
        kinds[i] = NodeKind::Wildcard(wildcard_kind(rng));
    }
    let mut edges = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.insert(if rng.gen_bool(0.5) { (u, v) } else { (v, u) });
    }
    for u in 0..n {
        for v in 0..n {
            if u == v {
                if kinds[u] == NodeKind::Concrete && rng.gen_bool(0.05) {
                    edges.insert((u, u));
                }
            } else if rng.gen_bool(0.12) {
                edges.insert((u, v));
            }
        }
    }
    Draft { kinds, edges, origin: vec![None; n] }
}

/// Pattern read off `g` by collapsing up to two regions into wildcards, so
/// that a good share of instances match.
fn derived_draft(rng: &mut ChaCha8Rng, g: &Graph, params: &SmallParams) -> Option<Draft> {
    let n = g.node_count();
    let mut group: Vec<Option<usize>> = vec![None; n];
    let mut kinds: Vec<NodeKind> = Vec::new();
    let w = if params.allow_wildcards { rng.gen_range(0..=params.max_wildcards) } else { 0 };
    let mut inserted: Vec<(usize, (usize, usize))> = Vec::new();
    for _ in 0..w {
        let kind = wildcard_kind(rng);
        let free: Vec<usize> = (0..n).filter(|&v| group[v].is_none()).collect();
        if kind.is_zero_plus() && rng.gen_bool(0.4) {
            // empty occurrence: sits on an edge
            let cands: Vec<(usize, usize)> = g.edges().iter().copied().filter(|&(a, b)| a != b).collect();
            if let Some(&e) = cands.choose(rng) {
                kinds.push(NodeKind::Wildcard(kind));
                inserted.push((kinds.len() - 1, e));
            }
            continue;
        }
        let Some(&start) = free.choose(rng) else { break };
        let size = rng.gen_range(1..=3);
        let mut members = vec![start];
        if kind.is_seq() {
            let mut cur = start;
            while members.len() < size {
                let next: Vec<usize> =
                    g.succ(cur).iter().copied().filter(|&s| group[s].is_none() && !members.contains(&s)).collect();
                let Some(&s) = next.choose(rng) else { break };
                members.push(s);
                cur = s;
            }
        } else {
            let mut pool: Vec<usize> = free.iter().copied().filter(|&v| v != start).collect();
            pool.shuffle(rng);
            members.extend(pool.into_iter().take(size - 1));
        }
        kinds.push(NodeKind::Wildcard(kind));
        for &m in &members {
            group[m] = Some(kinds.len() - 1);
        }
    }
    let mut origin = vec![None; kinds.len()];
    for v in 0..n {
        if group[v].is_none() {
            kinds.push(NodeKind::Concrete);
            origin.push(Some(v));
            group[v] = Some(kinds.len() - 1);
        }
    }
    if kinds.len() > params.max_pattern_nodes || kinds.is_empty() {
        return None;
    }
    let mut edges = std::collections::BTreeSet::new();
    for &(u, v) in g.edges() {
        let (a, b) = (group[u].unwrap(), group[v].unwrap());
        if a != b || kinds[a] == NodeKind::Concrete {
            edges.insert((a, b));
        }
    }
    for (w, (u, v)) in inserted {
        let (a, b) = (group[u].unwrap(), group[v].unwrap());
        edges.remove(&(a, b));
        if a != w && b != w {
            edges.insert((a, w));
            edges.insert((w, b));
        }
    }
    // occasional perturbation
    if rng.gen_bool(0.2) && kinds.len() >= 2 {
        let u = rng.gen_range(0..kinds.len());
        let v = rng.gen_range(0..kinds.len());
        if u != v && !edges.remove(&(u, v)) {
            edges.insert((u, v));
        }
    }
    Some(Draft { kinds, edges, origin })
}

/// One random instance; `None` when the drawn pattern was rejected.
pub fn small_instance_attempt(rng: &mut ChaCha8Rng, params: &SmallParams) -> Option<(Pattern, Graph)> {
    let gn = rng.gen_range(1..=params.max_graph_nodes);
    let g = random_graph(rng, gn);
    let draft = if rng.gen_bool(0.5) { derived_draft(rng, &g, params)? } else { random_draft(rng, params) };
    let nw = draft.kinds.iter().filter(|k| k.is_wildcard()).count();
    if nw > params.max_wildcards || !draft.weakly_connected() {
        return None;
    }
    let p = draft.build(rng, &g, params.constraint_density)?;
    Some((p, g))
}

/// `count` seeded instances for the cross-checking suites. Constraint
/// density cycles through 0, 0.3 and 0.7.
pub fn small_suite(seed: u64, count: usize, params: SmallParams) -> Vec<Instance> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    let densities = [0.0, 0.3, 0.7];
    while out.len() < count {
        let params = SmallParams { constraint_density: densities[out.len() % 3] * params.constraint_density / 0.3, ..params };
        if let Some((pattern, graph)) = small_instance_attempt(&mut r, &params) {
            out.push(Instance { id: format!("s{seed}-{}", out.len()), pattern, graph });
        }
    }
    out
}

/// Wildcard-free, constraint-free instance: the pattern is a relabelled
/// copy of the graph, possibly with one edge toggled.
pub fn isomorphism_instance(rng: &mut ChaCha8Rng, max_nodes: usize) -> (Pattern, Graph) {
    let n = rng.gen_range(1..=max_nodes);
    let g = random_graph(rng, n);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut edges: std::collections::BTreeSet<(usize, usize)> =
        g.edges().iter().map(|&(u, v)| (perm[u], perm[v])).collect();
    if rng.gen_bool(0.5) {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if !edges.remove(&(u, v)) {
            edges.insert((u, v));
        }
    }
    let mut b = Pattern::builder();
    for i in 0..n {
        b.add_node(format!("q{i}"), NodeKind::Concrete, None);
    }
    for (u, v) in edges {
        b.add_edge(format!("q{u}"), format!("q{v}"), Constraint::True);
    }
    (b.build().unwrap(), g)
}
