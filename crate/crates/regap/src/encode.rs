//! CNF encoding of ReGaP matching and model decoding.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expand::{choose_k, expand, ExpandedPattern};
use crate::graph::{Graph, NodeKind, Pattern, WildcardKind};
use crate::preprocess::{merge_fixpoint, MergeReport};
use crate::sat::{amo, AmoStrategy, CnfFormula, Model};
use crate::witness::{check_assignment, Assignment, MatchWitness};

const MAX_VARS: u64 = (1 << 31) - 1;

/// Variable numbering: inclusion, then mapping, then control-flow, then
/// auxiliary variables, each a contiguous range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarMap {
    pub num_pattern_nodes: usize,
    pub num_graph_nodes: usize,
    pub num_edges: usize,
    /// first auxiliary variable; aux variables run to the formula's `num_vars`
    pub aux_start: u32,
}

impl VarMap {
    pub fn o(&self, x: usize) -> i32 {
        (1 + x) as i32
    }

    pub fn m(&self, x: usize, v: usize) -> i32 {
        (1 + self.num_pattern_nodes + x * self.num_graph_nodes + v) as i32
    }

    pub fn c(&self, e: usize) -> i32 {
        (1 + self.num_pattern_nodes * (1 + self.num_graph_nodes) + e) as i32
    }

    pub fn core_vars(&self) -> u32 {
        self.aux_start - 1
    }

    pub fn o_count(&self) -> usize {
        self.num_pattern_nodes
    }

    pub fn m_count(&self) -> usize {
        self.num_pattern_nodes * self.num_graph_nodes
    }

    pub fn c_count(&self) -> usize {
        self.num_edges
    }

    /// `{"o":{node:var},"m":{"node|gnode":var},"c":{"src>dst":var}}`
    pub fn to_json(&self, ep: &ExpandedPattern, g: &Graph) -> Value {
        let o: serde_json::Map<String, Value> =
            (0..ep.node_count()).map(|x| (ep.nodes[x].id.clone(), json!(self.o(x)))).collect();
        let mut m = serde_json::Map::new();
        for x in 0..ep.node_count() {
            for v in 0..g.node_count() {
                m.insert(format!("{}|{}", ep.nodes[x].id, g.id(v)), json!(self.m(x, v)));
            }
        }
        let c: serde_json::Map<String, Value> = ep
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| (format!("{}>{}", ep.nodes[e.src].id, ep.nodes[e.dst].id), json!(self.c(i))))
            .collect();
        json!({"o": o, "m": m, "c": c})
    }
}

pub fn allocate_vars(ep: &ExpandedPattern, g: &Graph) -> Result<VarMap> {
    let x = ep.node_count() as u64;
    let n = g.node_count() as u64;
    let e = ep.edge_count() as u64;
    let total = x + x * n + e;
    if total > MAX_VARS {
        return Err(Error::TooManyVars(total));
    }
    Ok(VarMap {
        num_pattern_nodes: ep.node_count(),
        num_graph_nodes: g.node_count(),
        num_edges: ep.edge_count(),
        aux_start: total as u32 + 1,
    })
}

/// Clause sink that lowers at-most-one constraints and empty disjunctions.
struct Sink {
    f: CnfFormula,
    falsum: Option<i32>,
}

impl Sink {
    fn clause(&mut self, c: Vec<i32>) {
        if c.is_empty() {
            let fv = match self.falsum {
                Some(v) => v,
                None => {
                    let v = self.f.fresh_var();
                    self.f.add_clause(vec![-v]);
                    self.falsum = Some(v);
                    v
                }
            };
            self.f.add_clause(vec![fv]);
        } else {
            self.f.add_clause(c);
        }
    }

    fn at_most_one(&mut self, lits: &[i32]) {
        let f = &mut self.f;
        let mut next = f.num_vars;
        let clauses = amo(lits, AmoStrategy::for_len(lits.len()), &mut || {
            next += 1;
            next as i32
        });
        f.num_vars = next;
        for c in clauses {
            f.add_clause(c);
        }
    }
}

/// Constraint evaluations shared by the clause families.
struct Tables {
    /// node_ok[x][v]: expanded node `x` accepts graph node `v`
    node_ok: Vec<Vec<bool>>,
    /// edge_ok[e][ge]: expanded edge `e` accepts graph edge `ge`
    edge_ok: Vec<Vec<bool>>,
    /// pattern edges that belong to some wildcard expansion
    optional_edge: Vec<bool>,
}

impl Tables {
    fn new(ep: &ExpandedPattern, g: &Graph) -> Tables {
        let rp = ep.pattern();
        let per_pattern_edge: Vec<Vec<bool>> = (0..rp.edge_count())
            .map(|pe| (0..g.edge_count()).map(|ge| rp.edge_constraint(pe).eval(g.edge_attrs(ge))).collect())
            .collect();
        let per_node: Vec<Vec<bool>> = (0..rp.node_count())
            .map(|pv| (0..g.node_count()).map(|v| rp.node_constraint(pv).eval(g.node_attrs(v))).collect())
            .collect();
        let node_ok = (0..ep.node_count())
            .map(|x| if ep.is_optional(x) { vec![true; g.node_count()] } else { per_node[ep.nodes[x].origin].clone() })
            .collect();
        let edge_ok = (0..ep.edge_count())
            .map(|e| {
                let srcs = ep.edge_sources(e);
                (0..g.edge_count()).map(|ge| srcs.iter().all(|&pe| per_pattern_edge[pe][ge])).collect()
            })
            .collect();
        let mut optional_edge = vec![false; ep.edge_count()];
        for w in &ep.wildcards {
            for e in w.all_in().chain(w.all_out()).chain(w.all_skip()).chain(w.mid_edges.iter().copied()) {
                optional_edge[e] = true;
            }
        }
        Tables { node_ok, edge_ok, optional_edge }
    }
}

/// Inclusion, one-to-one, control-flow consistency, no-spurious-edge,
/// node/edge isomorphism and control-flow ensurance clauses.
fn emit_base(ep: &ExpandedPattern, g: &Graph, vm: &VarMap, t: &Tables, s: &mut Sink) {
    let nx = ep.node_count();
    let n = g.node_count();

    for x in 0..nx {
        let mut c = vec![-vm.o(x)];
        c.extend((0..n).map(|v| vm.m(x, v)));
        s.clause(c);
        for v in 0..n {
            s.clause(vec![-vm.m(x, v), vm.o(x)]);
        }
    }

    for x in 0..nx {
        let lits: Vec<i32> = (0..n).map(|v| vm.m(x, v)).collect();
        s.at_most_one(&lits);
    }
    for v in 0..n {
        let lits: Vec<i32> = (0..nx).map(|x| vm.m(x, v)).collect();
        s.at_most_one(&lits);
    }

    for (e, pe) in ep.edges.iter().enumerate() {
        for u in 0..n {
            for v in 0..n {
                let ok = g.edge_id(u, v).is_some_and(|ge| t.edge_ok[e][ge]);
                if !ok {
                    s.clause(vec![-vm.m(pe.src, u), -vm.m(pe.dst, v), -vm.c(e)]);
                }
            }
        }
    }

    for (e, pe) in ep.edges.iter().enumerate() {
        s.clause(vec![-vm.c(e), vm.o(pe.src)]);
        s.clause(vec![-vm.c(e), vm.o(pe.dst)]);
    }

    for x in 0..nx {
        if !ep.is_optional(x) {
            s.clause(vec![vm.o(x)]);
        }
    }
    for v in 0..n {
        s.clause((0..nx).map(|x| vm.m(x, v)).collect());
    }

    for e in 0..ep.edge_count() {
        if !t.optional_edge[e] {
            s.clause(vec![vm.c(e)]);
        }
    }
    for (ge, &(u, v)) in g.edges().iter().enumerate() {
        for a in 0..nx {
            for b in 0..nx {
                let ok = ep.edge_id(a, b).is_some_and(|e| t.edge_ok[e][ge]);
                if !ok {
                    s.clause(vec![-vm.m(a, u), -vm.m(b, v)]);
                }
            }
        }
    }

    for (e, pe) in ep.edges.iter().enumerate() {
        for &(u, v) in g.edges() {
            s.clause(vec![-vm.m(pe.src, u), -vm.m(pe.dst, v), vm.c(e)]);
        }
    }
}

/// Literals that are true exactly when rewritten node `p` is present;
/// empty for nodes that are always present.
fn presence(ep: &ExpandedPattern, p: usize) -> Vec<i32> {
    match ep.pattern().kind(p) {
        NodeKind::Wildcard(WildcardKind::Seq0Plus) => vec![1 + ep.members[p][0] as i32],
        NodeKind::Wildcard(WildcardKind::Sub0Plus) => ep.members[p].iter().map(|&x| 1 + x as i32).collect(),
        _ => vec![],
    }
}

fn cs(vm: &VarMap, es: &[usize]) -> Vec<i32> {
    es.iter().map(|&e| vm.c(e)).collect()
}

/// Clauses for `S*` wildcards (including the tails of rewritten `S+`).
fn emit_sequence(ep: &ExpandedPattern, vm: &VarMap, s: &mut Sink) {
    let rp = ep.pattern();
    for w in &ep.wildcards {
        if rp.wildcard(w.node) != Some(WildcardKind::Seq0Plus) {
            continue;
        }
        let xs = &w.exp_nodes;
        let k = xs.len();
        let o1 = vm.o(xs[0]);

        for i in 1..k {
            s.clause(vec![-vm.o(xs[i]), vm.o(xs[i - 1])]);
        }
        // A later sequence node is only used when the path edge leading to it is.
        for i in 1..k {
            s.clause(vec![-vm.o(xs[i]), vm.c(w.mid_edges[i - 1])]);
        }
        for (_, es) in &w.in_edges {
            let mut c = vec![-o1];
            c.extend(cs(vm, es));
            s.clause(c);
        }
        for (_, es) in &w.out_edges {
            let mut c = vec![-o1];
            c.extend(cs(vm, es));
            s.clause(c);
        }
        for (_, es) in &w.out_edges {
            for &e in es {
                let i = ep.nodes[ep.edges[e].src].pos;
                if i + 1 < k {
                    s.clause(vec![-vm.o(xs[i + 1]), -vm.c(e)]);
                }
            }
        }
        if !w.out_edges.is_empty() {
            for (_, es) in &w.skip_from {
                let mut c = vec![o1];
                c.extend(cs(vm, es));
                s.clause(c);
            }
        }
        if !w.in_edges.is_empty() {
            for (_, es) in &w.skip_to {
                let mut c = vec![o1];
                c.extend(cs(vm, es));
                s.clause(c);
            }
        }
        for e in w.all_skip() {
            s.clause(vec![-o1, -vm.c(e)]);
        }
    }
}

/// Clauses for `G+` and `G*` wildcards.
fn emit_subgraph(ep: &ExpandedPattern, vm: &VarMap, s: &mut Sink) {
    let rp = ep.pattern();
    for w in &ep.wildcards {
        let os: Vec<i32> = w.exp_nodes.iter().map(|&x| vm.o(x)).collect();
        match rp.wildcard(w.node) {
            Some(WildcardKind::Sub1Plus) => {
                s.clause(os.clone());
                let groups = w.in_edges.iter().chain(&w.out_edges);
                for (nb, es) in groups {
                    let pres = presence(ep, *nb);
                    if pres.is_empty() {
                        s.clause(cs(vm, es));
                    } else {
                        for lit in pres {
                            let mut c = vec![-lit];
                            c.extend(cs(vm, es));
                            s.clause(c);
                        }
                    }
                }
            }
            Some(WildcardKind::Sub0Plus) => {
                for (side, skips) in [(&w.in_edges, &w.skip_from), (&w.out_edges, &w.skip_to)] {
                    for ((nb, es), (nb2, sk)) in side.iter().zip(skips) {
                        debug_assert_eq!(nb, nb2);
                        for &o in &os {
                            let mut c = vec![-o];
                            c.extend(cs(vm, es));
                            c.extend(cs(vm, sk));
                            s.clause(c);
                        }
                    }
                    if !side.is_empty() {
                        let all: Vec<usize> = side.iter().flat_map(|(_, es)| es.iter().copied()).collect();
                        for &o in &os {
                            let mut c = vec![-o];
                            c.extend(cs(vm, &all));
                            s.clause(c);
                        }
                    }
                }
                if !w.out_edges.is_empty() {
                    for (_, sk) in &w.skip_from {
                        let mut c = os.clone();
                        c.extend(cs(vm, sk));
                        s.clause(c);
                    }
                }
                if !w.in_edges.is_empty() {
                    for (_, sk) in &w.skip_to {
                        let mut c = os.clone();
                        c.extend(cs(vm, sk));
                        s.clause(c);
                    }
                }
            }
            _ => {}
        }
    }
}

/// Node constraint and pair relation constraint clauses.
fn emit_attribute(ep: &ExpandedPattern, g: &Graph, vm: &VarMap, t: &Tables, s: &mut Sink) {
    let n = g.node_count();
    for x in 0..ep.node_count() {
        for v in 0..n {
            if !t.node_ok[x][v] {
                s.clause(vec![-vm.m(x, v)]);
            }
        }
    }
    let rp = ep.pattern();
    for pc in rp.pairs() {
        let a = ep.members[pc.u][0];
        let b = ep.members[pc.v][0];
        for u in 0..n {
            let mut c = vec![-vm.m(a, u)];
            for v in 0..n {
                if v != u && pc.constraint.eval(g.node_attrs(u), g.node_attrs(v)) {
                    c.push(vm.m(b, v));
                }
            }
            s.clause(c);
        }
    }
}

/// Builds the formula for an already expanded pattern.
pub fn encode_expanded(ep: &ExpandedPattern, g: &Graph) -> Result<(CnfFormula, VarMap)> {
    let vm = allocate_vars(ep, g)?;
    let t = Tables::new(ep, g);
    let mut s = Sink { f: CnfFormula { num_vars: vm.core_vars(), clauses: Vec::new() }, falsum: None };
    emit_base(ep, g, &vm, &t, &mut s);
    emit_sequence(ep, &vm, &mut s);
    emit_subgraph(ep, &vm, &mut s);
    emit_attribute(ep, g, &vm, &t, &mut s);
    Ok((s.f, vm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeOptions {
    pub merge: bool,
    pub k: Option<usize>,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions { merge: true, k: None }
    }
}

/// Everything produced by [`encode`]: the (possibly merged) graph the
/// formula talks about, the expansion, the formula and its variable map.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub graph: Graph,
    pub merge: MergeReport,
    pub expanded: ExpandedPattern,
    pub formula: CnfFormula,
    pub vars: VarMap,
}

pub fn encode(p: &Pattern, g: &Graph, opts: EncodeOptions) -> Result<Encoding> {
    let (graph, merge) = if opts.merge {
        merge_fixpoint(g, p)
    } else {
        (g.clone(), MergeReport { nodes_before: g.node_count(), nodes_after: g.node_count(), ..Default::default() })
    };
    let (k, _) = choose_k(&graph, opts.k)?;
    let expanded = expand(p, &graph, k)?;
    let (formula, vars) = encode_expanded(&expanded, &graph)?;
    Ok(Encoding { graph, merge, expanded, formula, vars })
}

/// Reads the mapping out of a model and checks it against the pattern.
/// `g` is the graph the formula was built for.
pub fn decode_model(model: &Model, vm: &VarMap, ep: &ExpandedPattern, p: &Pattern, g: &Graph) -> Result<Assignment> {
    let rw = &ep.rewritten;
    let mut f = vec![usize::MAX; g.node_count()];
    let mut slots: BTreeMap<usize, Vec<((usize, usize), usize)>> = BTreeMap::new();
    for v in 0..g.node_count() {
        let hits: Vec<usize> = (0..ep.node_count()).filter(|&x| model.var(vm.m(x, v) as u32)).collect();
        let [x] = hits[..] else {
            return Err(Error::EncoderBug(format!("graph node {} mapped to {} pattern nodes", g.id(v), hits.len())));
        };
        let orig = ep.original(x);
        f[v] = orig;
        let node = &ep.nodes[x];
        // heads of rewritten S+ come before their tails
        let is_tail = rw.pattern.kind(node.origin).is_wildcard() as usize;
        slots.entry(orig).or_default().push(((is_tail, node.pos), v));
    }
    let mut seq = BTreeMap::new();
    for w in p.wildcards() {
        if p.wildcard(w).unwrap().is_seq() {
            let mut s = slots.remove(&w).unwrap_or_default();
            s.sort();
            seq.insert(w, s.into_iter().map(|(_, v)| v).collect());
        }
    }
    let a = Assignment { f, seq };
    check_assignment(p, g, &a).map_err(Error::EncoderBug)?;
    Ok(a)
}

/// Lifts a witness on a merged graph back to the original graph: each
/// removed node `u` joins the pattern node of the `v` it was merged into,
/// directly before it in sequence order.
pub fn unmerge(a: &Assignment, merged: &Graph, original: &Graph, report: &MergeReport) -> Assignment {
    let mut by_id: BTreeMap<String, usize> =
        (0..merged.node_count()).map(|v| (merged.id(v).to_string(), a.f[v])).collect();
    let mut seq_ids: BTreeMap<usize, Vec<String>> =
        a.seq.iter().map(|(&w, vs)| (w, vs.iter().map(|&v| merged.id(v).to_string()).collect())).collect();
    for (u, v) in report.merged_pairs.iter().rev() {
        let x = by_id[v];
        by_id.insert(u.clone(), x);
        if let Some(order) = seq_ids.get_mut(&x) {
            let i = order.iter().position(|id| id == v).expect("merged node sits in its sequence");
            order.insert(i, u.clone());
        }
    }
    let f = (0..original.node_count()).map(|v| by_id[original.id(v)]).collect();
    let seq = seq_ids
        .into_iter()
        .map(|(w, ids)| (w, ids.iter().map(|id| original.index_of(id).unwrap()).collect()))
        .collect();
    Assignment { f, seq }
}

pub fn witness(p: &Pattern, g: &Graph, a: &Assignment) -> MatchWitness {
    MatchWitness::from_assignment(p, g, a)
}
