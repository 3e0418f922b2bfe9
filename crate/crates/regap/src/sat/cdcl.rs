//! Conflict-driven clause learning solver.
//!
//! Two watched literals, first-UIP learning with local minimization, VSIDS,
//! phase saving, Luby restarts and LBD-based learnt clause reduction.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Budget, CnfFormula, Model, SolveOutcome};

const NO_REASON: u32 = u32::MAX;
const RESTART_UNIT: u64 = 100;
const VAR_DECAY: f64 = 0.95;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Lit(u32);

impl Lit {
    fn from_dimacs(l: i32) -> Lit {
        let v = l.unsigned_abs() - 1;
        Lit(v << 1 | (l < 0) as u32)
    }
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }
    fn neg(self) -> bool {
        self.0 & 1 == 1
    }
    fn idx(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Val {
    True,
    False,
    Undef,
}

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    lbd: u32,
    deleted: bool,
}

#[derive(Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: Lit,
}

struct Heap {
    items: Vec<usize>,
    pos: Vec<usize>,
}

const NOT_IN_HEAP: usize = usize::MAX;

impl Heap {
    fn new(n: usize) -> Heap {
        Heap { items: Vec::with_capacity(n), pos: vec![NOT_IN_HEAP; n] }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != NOT_IN_HEAP
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = self.items.len();
        self.items.push(v);
        self.up(self.items.len() - 1, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.items.first()?;
        let last = self.items.pop().unwrap();
        self.pos[top] = NOT_IN_HEAP;
        if !self.items.is_empty() {
            self.items[0] = last;
            self.pos[last] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn bumped(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v], act);
        }
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.items[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.items[parent];
            if act[p] >= act[v] {
                break;
            }
            self.items[i] = p;
            self.pos[p] = i;
            i = parent;
        }
        self.items[i] = v;
        self.pos[v] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.items[i];
        let n = self.items.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && act[self.items[r]] > act[self.items[l]] { r } else { l };
            if act[self.items[c]] <= act[v] {
                break;
            }
            self.items[i] = self.items[c];
            self.pos[self.items[i]] = i;
            i = c;
        }
        self.items[i] = v;
        self.pos[v] = i;
    }
}

/// Statistics from the last call to [`Solver::run`].
#[derive(Debug, Default, Clone, Copy)]
pub struct Stats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learnts_removed: u64,
}

pub struct Solver {
    num_vars: usize,
    clauses: Vec<Clause>,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watch>>,
    assigns: Vec<Val>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    heap: Heap,
    polarity: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    max_learnts: f64,
    pub stats: Stats,
}

impl Solver {
    pub fn new(f: &CnfFormula, seed: u64) -> Solver {
        let n = f.num_vars as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let activity: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 1e-5).collect();
        let mut s = Solver {
            num_vars: n,
            clauses: Vec::with_capacity(f.clauses.len()),
            learnts: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            assigns: vec![Val::Undef; n],
            level: vec![0; n],
            reason: vec![NO_REASON; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity,
            var_inc: 1.0,
            heap: Heap::new(n),
            polarity: vec![true; n],
            seen: vec![false; n],
            ok: true,
            max_learnts: (f.clauses.len() as f64 / 3.0).max(2000.0),
            stats: Stats::default(),
        };
        for v in 0..n {
            s.heap.insert(v, &s.activity);
        }
        for c in &f.clauses {
            if !s.add_input(c) {
                s.ok = false;
                break;
            }
        }
        s
    }

    fn value(&self, l: Lit) -> Val {
        match self.assigns[l.var()] {
            Val::Undef => Val::Undef,
            Val::True if l.neg() => Val::False,
            Val::False if l.neg() => Val::True,
            v => v,
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn add_input(&mut self, c: &[i32]) -> bool {
        let mut lits: Vec<Lit> = c.iter().map(|&l| Lit::from_dimacs(l)).collect();
        lits.sort_by_key(|l| l.0);
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return true;
        }
        lits.retain(|&l| self.value(l) != Val::False);
        if lits.iter().any(|&l| self.value(l) == Val::True) {
            return true;
        }
        match lits.len() {
            0 => false,
            1 => {
                self.enqueue(lits[0], NO_REASON);
                self.propagate().is_none()
            }
            _ => {
                self.attach(lits, false, 0);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[(!lits[0]).idx()].push(Watch { cref, blocker: lits[1] });
        self.watches[(!lits[1]).idx()].push(Watch { cref, blocker: lits[0] });
        self.clauses.push(Clause { lits, learnt, lbd, deleted: false });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var();
        self.assigns[v] = if l.neg() { Val::False } else { Val::True };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Returns the conflicting clause, if any.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.idx()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == Val::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                let lits = &mut self.clauses[cref].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                if first != w.blocker && self.value(first) == Val::True {
                    ws[j] = Watch { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..self.clauses[cref].lits.len() {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != Val::False {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[(!l).idx()].push(Watch { cref: w.cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watch { cref: w.cref, blocker: first };
                j += 1;
                if self.value(first) == Val::False {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[p.idx()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let current = self.decision_level();
        loop {
            let start = usize::from(p.is_some());
            let n = self.clauses[confl as usize].lits.len();
            for k in start..n {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            confl = self.reason[lit.var()];
            self.seen[lit.var()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
        }
        learnt[0] = !p.unwrap();

        let before = learnt.clone();
        let mut keep = vec![learnt[0]];
        for &l in &learnt[1..] {
            let r = self.reason[l.var()];
            let redundant = r != NO_REASON
                && self.clauses[r as usize].lits[1..]
                    .iter()
                    .all(|q| self.seen[q.var()] || self.level[q.var()] == 0);
            if !redundant {
                keep.push(l);
            }
        }
        for l in &before {
            self.seen[l.var()] = false;
        }
        let mut learnt = keep;

        let mut bt = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var()] > self.level[learnt[max_i].var()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            bt = self.level[learnt[1].var()];
        }
        (learnt, bt)
    }

    fn lbd(&self, lits: &[Lit]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var()]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.polarity[v] = l.neg();
            self.assigns[v] = Val::Undef;
            self.reason[v] = NO_REASON;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v] == Val::Undef {
                return Some(Lit((v as u32) << 1 | self.polarity[v] as u32));
            }
        }
        None
    }

    fn locked(&self, cref: u32) -> bool {
        let l = self.clauses[cref as usize].lits[0];
        self.value(l) == Val::True && self.reason[l.var()] == cref
    }

    fn reduce(&mut self) {
        let mut cands: Vec<u32> = self
            .learnts
            .iter()
            .copied()
            .filter(|&c| {
                let cl = &self.clauses[c as usize];
                cl.learnt && cl.lbd > 2 && !self.locked(c)
            })
            .collect();
        cands.sort_by_key(|&c| (std::cmp::Reverse(self.clauses[c as usize].lbd), c));
        let drop: Vec<u32> = cands[..cands.len() / 2].to_vec();
        for &c in &drop {
            let cl = &mut self.clauses[c as usize];
            cl.deleted = true;
            cl.lits = Vec::new();
        }
        self.stats.learnts_removed += drop.len() as u64;
        self.learnts.retain(|&c| !self.clauses[c as usize].deleted);
        for ws in &mut self.watches {
            ws.retain(|w| !self.clauses[w.cref as usize].deleted);
        }
    }

    fn model(&self) -> Model {
        Model::new(self.assigns.iter().map(|&v| v == Val::True).collect())
    }

    /// Runs the search. The returned model is not certified here; see [`solve`].
    pub fn run(&mut self, budget: Budget) -> SolveOutcome {
        if !self.ok {
            return SolveOutcome::Unsat;
        }
        if self.propagate().is_some() {
            self.ok = false;
            return SolveOutcome::Unsat;
        }
        let started = Instant::now();
        let mut restart_idx = 0u64;
        let mut restart_limit = luby(restart_idx) * RESTART_UNIT;
        let mut since_restart = 0u64;
        let mut ticks = 0u64;
        loop {
            ticks += 1;
            if ticks.is_multiple_of(1024) {
                if let Some(t) = budget.time {
                    if started.elapsed() >= t {
                        self.cancel_until(0);
                        return SolveOutcome::Unknown("time limit".into());
                    }
                }
            }
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                since_restart += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SolveOutcome::Unsat;
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let lbd = self.lbd(&learnt);
                    let first = learnt[0];
                    let cref = self.attach(learnt, true, lbd);
                    self.enqueue(first, cref);
                }
                self.var_inc /= VAR_DECAY;
                if let Some(limit) = budget.conflicts {
                    if self.stats.conflicts >= limit {
                        self.cancel_until(0);
                        return SolveOutcome::Unknown("conflict limit".into());
                    }
                }
                if since_restart >= restart_limit {
                    self.stats.restarts += 1;
                    restart_idx += 1;
                    restart_limit = luby(restart_idx) * RESTART_UNIT;
                    since_restart = 0;
                    self.cancel_until(0);
                }
                if self.learnts.len() as f64 >= self.max_learnts + self.trail.len() as f64 {
                    self.reduce();
                    self.max_learnts *= 1.1;
                }
            } else {
                match self.pick_branch() {
                    None => return SolveOutcome::Sat(self.model()),
                    Some(l) => {
                        self.stats.decisions += 1;
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(l, NO_REASON);
                    }
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }
}

/// `luby(i)` for `i = 0, 1, 2, ...` is 1 1 2 1 1 2 4 1 1 2 ...
pub fn luby(i: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = i;
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

/// Solves `f` and certifies any model against every clause before returning.
pub fn solve(f: &CnfFormula, budget: Budget, seed: u64) -> SolveOutcome {
    let mut s = Solver::new(f, seed);
    let out = s.run(budget);
    if let SolveOutcome::Sat(m) = &out {
        if let Some(i) = f.first_violated(m) {
            panic!("solver returned a model violating clause {i}: {:?}", f.clauses[i]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luby_prefix() {
        let got: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(got, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn unit_chain() {
        let f = CnfFormula { num_vars: 2, clauses: vec![vec![1], vec![-1, 2]] };
        match solve(&f, Budget::unlimited(), 0) {
            SolveOutcome::Sat(m) => assert!(m.var(1) && m.var(2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn contradiction() {
        let f = CnfFormula { num_vars: 1, clauses: vec![vec![1], vec![-1]] };
        assert_eq!(solve(&f, Budget::unlimited(), 0), SolveOutcome::Unsat);
    }

    #[test]
    fn pigeonhole_4_3_unsat() {
        let mut f = CnfFormula::new();
        let p = |i: i32, h: i32| i * 3 + h + 1;
        f.num_vars = 12;
        for i in 0..4 {
            f.clauses.push((0..3).map(|h| p(i, h)).collect());
        }
        for h in 0..3 {
            for i in 0..4 {
                for j in i + 1..4 {
                    f.clauses.push(vec![-p(i, h), -p(j, h)]);
                }
            }
        }
        assert_eq!(solve(&f, Budget::unlimited(), 3), SolveOutcome::Unsat);
    }
}
