//! Finite pointed-set semantics: an independent oracle for the symbolic
//! engine.
//!
//! A [`SetModel`] assigns every generic leaf a finite size (element `0` is
//! the basepoint) and every abstract map symbol a concrete pointed function
//! table. Each shape then denotes a finite pointed set built the honest way:
//! the raw points (basepoint plus all constructor tuples over the child
//! sets) are quotiented by a union-find that collapses every tuple with a
//! basepoint coordinate into the basepoint class. Cardinalities are computed,
//! not assumed, so the closed formula `|L ^ R| = (|L|-1)(|R|-1) + 1` is a
//! checkable consequence.
//!
//! Maps compile to plain `Vec<usize>` tables over class indices by running
//! their point clauses on canonical representatives; only point rows matter
//! here, which makes the model a genuinely independent cross-check of the
//! path-level engine. Diagram checking compares the two routes' tables
//! pointwise, and for diagrams mentioning abstract symbols the checker can
//! sweep every pointed function assignment exhaustively.

use std::collections::BTreeMap;

use crate::maps::DiagramSides;
use crate::term::{basepoint, cartesian, eval_point, pair, triple_pt, AbstractSym, Leaf, MapDef, Shape, Term};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Union-find
// ---------------------------------------------------------------------------

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller index as the root so class numbering follows
            // first appearance in raw order.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

// ---------------------------------------------------------------------------
// Spaces: finite quotients per shape
// ---------------------------------------------------------------------------

/// The finite pointed set denoted by a shape under some size assignment.
/// Class `0` is the collapsed basepoint; `reps[i]` is the canonical term of
/// class `i` (the first raw point of the class in enumeration order).
#[derive(Debug, Clone)]
pub struct Space {
    pub shape: Shape,
    pub card: usize,
    pub reps: Vec<Term>,
    kind: SpaceKind,
}

#[derive(Debug, Clone)]
enum SpaceKind {
    Leaf,
    Smash { left: Box<Space>, right: Box<Space>, raw_to_class: Vec<usize> },
    Triple { a: Box<Space>, b: Box<Space>, c: Box<Space>, raw_to_class: Vec<usize> },
}

/// A finite interpretation: sizes for generic leaves (counting the
/// basepoint) and pointed function tables for abstract map symbols.
#[derive(Debug, Clone, Default)]
pub struct SetModel {
    pub leaf_sizes: BTreeMap<String, usize>,
    /// Symbol name -> table over domain classes; entry `0` must be `0`.
    pub syms: BTreeMap<String, Vec<usize>>,
}

impl SetModel {
    pub fn new(leaf_sizes: BTreeMap<String, usize>) -> SetModel {
        SetModel { leaf_sizes, syms: BTreeMap::new() }
    }

    pub fn with_sym(mut self, name: &str, table: Vec<usize>) -> SetModel {
        self.syms.insert(name.to_string(), table);
        self
    }

    fn leaf_card(&self, leaf: &Leaf) -> Result<usize> {
        match &leaf.elements {
            Some(els) => Ok(1 + els.len()),
            None => {
                let k = self.leaf_sizes.get(&leaf.name).copied().ok_or_else(|| {
                    Error::Invalid(format!("no finite size assigned to leaf `{}`", leaf.name))
                })?;
                if k == 0 {
                    return Err(Error::Invalid(format!(
                        "leaf `{}` needs size >= 1 (the basepoint)",
                        leaf.name
                    )));
                }
                Ok(k)
            }
        }
    }

    /// Build the finite pointed set for a shape: enumerate raw points and
    /// quotient every tuple with a basepoint coordinate into class 0.
    pub fn space(&self, shape: &Shape) -> Result<Space> {
        match shape {
            Shape::Leaf { leaf } => {
                let card = self.leaf_card(leaf)?;
                let mut reps = vec![basepoint(shape)];
                match &leaf.elements {
                    Some(els) => {
                        for e in els {
                            reps.push(Term::Element { name: e.clone(), sort: leaf.clone() });
                        }
                    }
                    None => {
                        for i in 1..card {
                            reps.push(Term::Element {
                                name: format!("{}{}", leaf.name.to_lowercase(), i),
                                sort: leaf.clone(),
                            });
                        }
                    }
                }
                Ok(Space { shape: shape.clone(), card, reps, kind: SpaceKind::Leaf })
            }
            Shape::Smash { left, right } => {
                let l = self.space(left)?;
                let r = self.space(right)?;
                let raw_card = 1 + l.card * r.card;
                let raw = |i: usize, j: usize| 1 + i * r.card + j;
                let mut uf = UnionFind::new(raw_card);
                for i in 0..l.card {
                    uf.union(0, raw(i, 0));
                }
                for j in 0..r.card {
                    uf.union(0, raw(0, j));
                }
                let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
                let mut raw_to_class = vec![0usize; raw_card];
                let mut reps = Vec::new();
                for p in 0..raw_card {
                    let root = uf.find(p);
                    let class = *class_of_root.entry(root).or_insert_with(|| {
                        let rep = if p == 0 {
                            basepoint(shape)
                        } else {
                            let (i, j) = ((p - 1) / r.card, (p - 1) % r.card);
                            pair(l.reps[i].clone(), r.reps[j].clone())
                        };
                        reps.push(rep);
                        reps.len() - 1
                    });
                    raw_to_class[p] = class;
                }
                Ok(Space {
                    shape: shape.clone(),
                    card: reps.len(),
                    reps,
                    kind: SpaceKind::Smash { left: Box::new(l), right: Box::new(r), raw_to_class },
                })
            }
            Shape::Triple { a, b, c } => {
                let sa = self.space(a)?;
                let sb = self.space(b)?;
                let sc = self.space(c)?;
                let raw_card = 1 + sa.card * sb.card * sc.card;
                let raw = |i: usize, j: usize, k: usize| 1 + (i * sb.card + j) * sc.card + k;
                let mut uf = UnionFind::new(raw_card);
                for i in 0..sa.card {
                    for j in 0..sb.card {
                        for k in 0..sc.card {
                            if i == 0 || j == 0 || k == 0 {
                                uf.union(0, raw(i, j, k));
                            }
                        }
                    }
                }
                let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
                let mut raw_to_class = vec![0usize; raw_card];
                let mut reps = Vec::new();
                for p in 0..raw_card {
                    let root = uf.find(p);
                    let class = *class_of_root.entry(root).or_insert_with(|| {
                        let rep = if p == 0 {
                            basepoint(shape)
                        } else {
                            let q = p - 1;
                            let (i, rest) = (q / (sb.card * sc.card), q % (sb.card * sc.card));
                            let (j, k) = (rest / sc.card, rest % sc.card);
                            triple_pt(sa.reps[i].clone(), sb.reps[j].clone(), sc.reps[k].clone())
                        };
                        reps.push(rep);
                        reps.len() - 1
                    });
                    raw_to_class[p] = class;
                }
                Ok(Space {
                    shape: shape.clone(),
                    card: reps.len(),
                    reps,
                    kind: SpaceKind::Triple {
                        a: Box::new(sa),
                        b: Box::new(sb),
                        c: Box::new(sc),
                        raw_to_class,
                    },
                })
            }
        }
    }

    /// The class of a closed point term in a space. Abstract applications
    /// resolve through the model's symbol tables.
    pub fn class_of(&self, sp: &Space, t: &Term) -> Result<usize> {
        let t = t.reduce();
        if let Term::AbstractApp { map, arg } = &t {
            if map.codomain != sp.shape {
                return Err(Error::SortMismatch(format!(
                    "`{}` lands in `{}`, not `{}`",
                    map.name, map.codomain, sp.shape
                )));
            }
            let dsp = self.space(&map.domain)?;
            let ic = self.class_of(&dsp, arg)?;
            let table = self.sym_table(&map.name, dsp.card, sp.card)?;
            return Ok(table[ic]);
        }
        if t == basepoint(&sp.shape) {
            return Ok(0);
        }
        match (&sp.kind, &t) {
            (SpaceKind::Leaf, _) => sp
                .reps
                .iter()
                .position(|r| *r == t)
                .ok_or_else(|| Error::Invalid(format!("`{}` is not a point of `{}`", t, sp.shape))),
            (SpaceKind::Smash { left, right, raw_to_class }, Term::Pair { l, r }) => {
                let i = self.class_of(left, l)?;
                let j = self.class_of(right, r)?;
                Ok(raw_to_class[1 + i * right.card + j])
            }
            (SpaceKind::Triple { a, b, c, raw_to_class }, Term::TriplePt { a: ta, b: tb, c: tc }) => {
                let i = self.class_of(a, ta)?;
                let j = self.class_of(b, tb)?;
                let k = self.class_of(c, tc)?;
                Ok(raw_to_class[1 + (i * b.card + j) * c.card + k])
            }
            _ => Err(Error::SortMismatch(format!("`{}` does not fit shape `{}`", t, sp.shape))),
        }
    }

    fn sym_table(&self, name: &str, dom_card: usize, cod_card: usize) -> Result<&Vec<usize>> {
        let table = self.syms.get(name).ok_or_else(|| {
            Error::Invalid(format!("no finite table assigned to abstract map `{}`", name))
        })?;
        if table.len() != dom_card {
            return Err(Error::Invalid(format!(
                "table for `{}` has {} entries, want {}",
                name,
                table.len(),
                dom_card
            )));
        }
        if table.first() != Some(&0) {
            return Err(Error::Invalid(format!("table for `{}` must send the basepoint to 0", name)));
        }
        if let Some(&v) = table.iter().find(|&&v| v >= cod_card) {
            return Err(Error::Invalid(format!(
                "table for `{}` hits class {} outside a codomain of size {}",
                name, v, cod_card
            )));
        }
        Ok(table)
    }

    /// Compile a map to a class table over the domain space. Only point
    /// clauses are consulted, so the result is independent of the path-level
    /// engine.
    pub fn compile(&self, m: &MapDef) -> Result<Vec<usize>> {
        match m {
            MapDef::Identity { shape } => Ok((0..self.space(shape)?.card).collect()),
            MapDef::Abstract { sym } => {
                let d = self.space(&sym.domain)?;
                let c = self.space(&sym.codomain)?;
                Ok(self.sym_table(&sym.name, d.card, c.card)?.clone())
            }
            MapDef::Composite { stages } => {
                let mut it = stages.iter();
                let first = it
                    .next()
                    .ok_or_else(|| Error::Invalid("empty composite has no finite table".into()))?;
                let mut acc = self.compile(first)?;
                for s in it {
                    let next = self.compile(s)?;
                    for v in &mut acc {
                        if *v >= next.len() {
                            return Err(Error::Invalid(format!(
                                "stage `{}` table too small for class {}",
                                s.name(),
                                v
                            )));
                        }
                        *v = next[*v];
                    }
                }
                Ok(acc)
            }
            MapDef::Table { .. } => {
                let dsp = self.space(&m.domain())?;
                let csp = self.space(&m.codomain())?;
                dsp.reps
                    .iter()
                    .map(|rep| {
                        let v = eval_point(m, rep)?;
                        self.class_of(&csp, &v)
                    })
                    .collect()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Diagram checking
// ---------------------------------------------------------------------------

/// Abstract symbols reachable from a map: direct symbols, symbols inside
/// composite stages, and symbols applied inside table point values.
pub fn collect_abstract_syms(m: &MapDef) -> Vec<AbstractSym> {
    fn walk_term(t: &Term, out: &mut BTreeMap<String, AbstractSym>) {
        match t {
            Term::AbstractApp { map, arg } => {
                out.entry(map.name.clone()).or_insert_with(|| map.clone());
                walk_term(arg, out);
            }
            Term::Pair { l, r } => {
                walk_term(l, out);
                walk_term(r, out);
            }
            Term::TriplePt { a, b, c } => {
                walk_term(a, out);
                walk_term(b, out);
                walk_term(c, out);
            }
            Term::Basepoint { .. } | Term::Var { .. } | Term::Element { .. } => {}
        }
    }
    fn walk(m: &MapDef, out: &mut BTreeMap<String, AbstractSym>) {
        match m {
            MapDef::Identity { .. } => {}
            MapDef::Abstract { sym } => {
                out.entry(sym.name.clone()).or_insert_with(|| sym.clone());
            }
            MapDef::Composite { stages } => {
                for s in stages {
                    walk(s, out);
                }
            }
            MapDef::Table { table } => {
                for row in &table.points {
                    walk_term(&row.value, out);
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(m, &mut out);
    out.into_values().collect()
}

/// The generic leaves a diagram mentions, domain first, then codomain, then
/// any remaining stage boundaries, in first-appearance order. Enumerated
/// leaves have fixed size and are excluded.
pub fn diagram_generic_leaves(d: &DiagramSides) -> Vec<String> {
    let mut seen = Vec::new();
    let add_shape = |s: &Shape, seen: &mut Vec<String>| {
        for lf in s.leaves() {
            if lf.elements.is_none() && !seen.iter().any(|n| n == &lf.name) {
                seen.push(lf.name.clone());
            }
        }
    };
    add_shape(&d.domain(), &mut seen);
    add_shape(&d.codomain(), &mut seen);
    for stage in d.lhs.iter().chain(d.rhs.iter()) {
        add_shape(&stage.domain(), &mut seen);
        add_shape(&stage.codomain(), &mut seen);
    }
    seen
}

/// Assign sizes to a diagram's generic leaves from a list: positional in
/// first-appearance order, with the last entry reused when the list is
/// shorter than the leaf count.
pub fn assign_sizes(d: &DiagramSides, sizes: &[usize]) -> Result<BTreeMap<String, usize>> {
    let names = diagram_generic_leaves(d);
    if sizes.is_empty() {
        return Err(Error::Invalid("need at least one size".into()));
    }
    if sizes.len() > names.len() {
        return Err(Error::Invalid(format!(
            "{} sizes given but the diagram has only {} generic leaves ({})",
            sizes.len(),
            names.len(),
            names.join(", ")
        )));
    }
    let last = *sizes.last().expect("nonempty");
    Ok(names
        .into_iter()
        .enumerate()
        .map(|(i, n)| (n, sizes.get(i).copied().unwrap_or(last)))
        .collect())
}

/// Compare the two routes of a diagram pointwise on classes under one model.
pub fn check_diagram(model: &SetModel, d: &DiagramSides) -> Result<()> {
    let lhs = model.compile(&d.lhs_map())?;
    let rhs = model.compile(&d.rhs_map())?;
    if lhs.len() != rhs.len() {
        return Err(Error::Invalid(format!(
            "routes of `{}` compiled to tables of different sizes {} and {}",
            d.name,
            lhs.len(),
            rhs.len()
        )));
    }
    let dsp = model.space(&d.domain())?;
    for (i, (a, b)) in lhs.iter().zip(rhs.iter()).enumerate() {
        if a != b {
            return Err(Error::ObligationFailed {
                tag: format!("model[{}]", d.name),
                detail: format!(
                    "routes disagree at `{}`: left lands in class {}, right in class {} (syms: {})",
                    dsp.reps[i],
                    a,
                    b,
                    describe_syms(model)
                ),
            });
        }
    }
    Ok(())
}

fn describe_syms(model: &SetModel) -> String {
    if model.syms.is_empty() {
        return "none".into();
    }
    model
        .syms
        .iter()
        .map(|(n, t)| format!("{}={:?}", n, t))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Every pointed function table between finite pointed sets of the given
/// cardinalities (entry 0 pinned to 0).
pub fn pointed_maps(dom_card: usize, cod_card: usize) -> Vec<Vec<usize>> {
    let choices: Vec<Vec<usize>> = (1..dom_card).map(|_| (0..cod_card).collect()).collect();
    cartesian(&choices)
        .into_iter()
        .map(|rest| {
            let mut t = Vec::with_capacity(dom_card);
            t.push(0);
            t.extend(rest);
            t
        })
        .collect()
}

/// Check a diagram under every pointed-function assignment for its abstract
/// symbols (a single empty assignment when there are none). Returns the
/// number of assignments checked.
pub fn check_diagram_all_envs(leaf_sizes: &BTreeMap<String, usize>, d: &DiagramSides) -> Result<usize> {
    let base = SetModel::new(leaf_sizes.clone());
    let mut syms = BTreeMap::new();
    for m in [d.lhs_map(), d.rhs_map()] {
        for sym in collect_abstract_syms(&m) {
            syms.entry(sym.name.clone()).or_insert(sym);
        }
    }
    let syms: Vec<AbstractSym> = syms.into_values().collect();
    let mut tables_per_sym = Vec::new();
    for sym in &syms {
        let d_card = base.space(&sym.domain)?.card;
        let c_card = base.space(&sym.codomain)?.card;
        tables_per_sym.push(pointed_maps(d_card, c_card));
    }
    let mut checked = 0usize;
    for assignment in cartesian(&tables_per_sym) {
        let mut model = base.clone();
        for (sym, table) in syms.iter().zip(assignment) {
            model.syms.insert(sym.name.clone(), table);
        }
        check_diagram(&model, d)?;
        checked += 1;
    }
    Ok(checked)
}

/// Check that a map compiles to a bijection on classes.
pub fn check_bijection(model: &SetModel, m: &MapDef) -> Result<()> {
    let table = model.compile(m)?;
    let cod = model.space(&m.codomain())?;
    if table.len() != cod.card {
        return Err(Error::ObligationFailed {
            tag: format!("bijection[{}]", m.name()),
            detail: format!("domain has {} classes, codomain {}", table.len(), cod.card),
        });
    }
    let mut seen = vec![false; cod.card];
    for (i, &v) in table.iter().enumerate() {
        if seen[v] {
            return Err(Error::ObligationFailed {
                tag: format!("bijection[{}]", m.name()),
                detail: format!("class {} is hit twice (second time from class {})", v, i),
            });
        }
        seen[v] = true;
    }
    Ok(())
}
