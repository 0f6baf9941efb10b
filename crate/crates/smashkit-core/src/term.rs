//! Shapes, terms, one-hole contexts, path expressions, and clause-table maps.
//!
//! Design notes:
//! - A `Shape` is a binary/ternary smash tree over named pointed leaves. Leaf
//!   names within one shape are pairwise distinct, so a variable's sort
//!   determines its slot.
//! - `Term`s are symbolic points built from constructors, sorted variables,
//!   named elements of enumerated leaves, and applications of abstract maps.
//!   The only computation on terms is basepoint absorption through
//!   basepoint-preserving-by-refl abstract maps.
//! - Path generators come in families indexed by a node path into the shape
//!   plus a glue kind; the surrounding one-hole context is reconstructed from
//!   slot terms. `shape_generators` enumerates families in a fixed pre-order.
//! - A `TableMap` gives one clause per point pattern and per generator-family
//!   instance; validation checks totality, non-overlap, and that every
//!   path clause has the endpoints forced by the point clauses.

use crate::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

// ---------------------------------------------------------------------------
// Shapes
// ---------------------------------------------------------------------------

/// A pointed leaf type. `elements` is `None` for a generic leaf (elements
/// unknown; variables range over it) and `Some(names)` for an enumerated leaf
/// whose non-basepoint elements are exactly the named ones.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Leaf {
    pub name: String,
    pub elements: Option<Vec<String>>,
}

impl Leaf {
    pub fn generic(name: &str) -> Leaf {
        Leaf { name: name.to_string(), elements: None }
    }
    pub fn enumerated(name: &str, elements: &[&str]) -> Leaf {
        Leaf { name: name.to_string(), elements: Some(elements.iter().map(|s| s.to_string()).collect()) }
    }
}

/// The shape of an iterated smash product.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Shape {
    Leaf { leaf: Leaf },
    Smash { left: Box<Shape>, right: Box<Shape> },
    /// Unbiased three-fold smash; slots may themselves be compound.
    Triple { a: Box<Shape>, b: Box<Shape>, c: Box<Shape> },
}

pub fn leaf(name: &str) -> Shape {
    Shape::Leaf { leaf: Leaf::generic(name) }
}

pub fn smash(l: Shape, r: Shape) -> Shape {
    Shape::Smash { left: Box::new(l), right: Box::new(r) }
}

pub fn triple(a: Shape, b: Shape, c: Shape) -> Shape {
    Shape::Triple { a: Box::new(a), b: Box::new(b), c: Box::new(c) }
}

impl Shape {
    pub fn is_leaf(&self) -> bool {
        matches!(self, Shape::Leaf { .. })
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&Leaf> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Leaf>) {
        match self {
            Shape::Leaf { leaf } => out.push(leaf),
            Shape::Smash { left, right } => {
                left.collect_leaves(out);
                right.collect_leaves(out);
            }
            Shape::Triple { a, b, c } => {
                a.collect_leaves(out);
                b.collect_leaves(out);
                c.collect_leaves(out);
            }
        }
    }

    /// Child shapes in slot order.
    pub fn children(&self) -> Vec<&Shape> {
        match self {
            Shape::Leaf { .. } => vec![],
            Shape::Smash { left, right } => vec![left, right],
            Shape::Triple { a, b, c } => vec![a, b, c],
        }
    }

    /// The subshape at a node path.
    pub fn at(&self, node: &NodePath) -> Result<&Shape> {
        let mut cur = self;
        for step in &node.0 {
            cur = match (cur, step) {
                (Shape::Smash { left, .. }, Step::L) => left,
                (Shape::Smash { right, .. }, Step::R) => right,
                (Shape::Triple { a, .. }, Step::T(0)) => a,
                (Shape::Triple { b, .. }, Step::T(1)) => b,
                (Shape::Triple { c, .. }, Step::T(2)) => c,
                _ => {
                    return Err(Error::ShapeMismatch(format!(
                        "node path {} does not exist in shape {}",
                        node, self
                    )))
                }
            };
        }
        Ok(cur)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Leaf { leaf } => write!(f, "{}", leaf.name),
            Shape::Smash { left, right } => write!(f, "({} ^ {})", left, right),
            Shape::Triple { a, b, c } => write!(f, "^({}, {}, {})", a, b, c),
        }
    }
}

// ---------------------------------------------------------------------------
// Abstract map symbols
// ---------------------------------------------------------------------------

/// An opaque pointed map, known only by name, endpoints, and whether its
/// basepoint path is definitionally refl.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct AbstractSym {
    pub name: String,
    pub domain: Shape,
    pub codomain: Shape,
    /// When true, applying the symbol to a basepoint reduces to a basepoint
    /// and the symbol's pointedness path is refl.
    pub refl_pointed: bool,
}

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

/// A symbolic point of some shape.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Term {
    Basepoint { at: Shape },
    Pair { l: Box<Term>, r: Box<Term> },
    TriplePt { a: Box<Term>, b: Box<Term>, c: Box<Term> },
    Var { name: String, sort: Leaf },
    /// A named non-basepoint element of an enumerated leaf.
    Element { name: String, sort: Leaf },
    AbstractApp { map: AbstractSym, arg: Box<Term> },
}

pub fn pair(l: Term, r: Term) -> Term {
    Term::Pair { l: Box::new(l), r: Box::new(r) }
}

pub fn triple_pt(a: Term, b: Term, c: Term) -> Term {
    Term::TriplePt { a: Box::new(a), b: Box::new(b), c: Box::new(c) }
}

pub fn var(name: &str, sort: &Leaf) -> Term {
    Term::Var { name: name.to_string(), sort: sort.clone() }
}

pub fn basepoint(at: &Shape) -> Term {
    Term::Basepoint { at: at.clone() }
}

impl Term {
    pub fn shape(&self) -> Shape {
        match self {
            Term::Basepoint { at } => at.clone(),
            Term::Pair { l, r } => smash(l.shape(), r.shape()),
            Term::TriplePt { a, b, c } => triple(a.shape(), b.shape(), c.shape()),
            Term::Var { sort, .. } | Term::Element { sort, .. } => Shape::Leaf { leaf: sort.clone() },
            Term::AbstractApp { map, .. } => map.codomain.clone(),
        }
    }

    /// Absorb basepoints through refl-pointed abstract maps, recursively.
    /// This is the only computation rule on terms; in particular a pair with
    /// one basepoint coordinate is *not* collapsed (that identification is a
    /// path, not a definitional equality).
    pub fn reduce(&self) -> Term {
        match self {
            Term::Basepoint { .. } | Term::Var { .. } | Term::Element { .. } => self.clone(),
            Term::Pair { l, r } => pair(l.reduce(), r.reduce()),
            Term::TriplePt { a, b, c } => triple_pt(a.reduce(), b.reduce(), c.reduce()),
            Term::AbstractApp { map, arg } => {
                let arg = arg.reduce();
                if map.refl_pointed && arg == (Term::Basepoint { at: map.domain.clone() }) {
                    Term::Basepoint { at: map.codomain.clone() }
                } else {
                    Term::AbstractApp { map: map.clone(), arg: Box::new(arg) }
                }
            }
        }
    }

    /// Free variables, name -> sort.
    pub fn free_vars(&self, out: &mut BTreeMap<String, Leaf>) {
        match self {
            Term::Basepoint { .. } | Term::Element { .. } => {}
            Term::Var { name, sort } => {
                out.insert(name.clone(), sort.clone());
            }
            Term::Pair { l, r } => {
                l.free_vars(out);
                r.free_vars(out);
            }
            Term::TriplePt { a, b, c } => {
                a.free_vars(out);
                b.free_vars(out);
                c.free_vars(out);
            }
            Term::AbstractApp { arg, .. } => arg.free_vars(out),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Basepoint { at } => {
                if at.is_leaf() {
                    write!(f, "*{}", at)
                } else {
                    write!(f, "*")
                }
            }
            Term::Pair { l, r } => write!(f, "<{}, {}>", l, r),
            Term::TriplePt { a, b, c } => write!(f, "<{}, {}, {}>", a, b, c),
            Term::Var { name, .. } => write!(f, "{}", name),
            Term::Element { name, .. } => write!(f, "{}", name),
            Term::AbstractApp { map, arg } => write!(f, "{}({})", map.name, arg),
        }
    }
}

/// Capture-free substitution of terms for variables (by name).
pub fn substitute_term(t: &Term, env: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Basepoint { .. } | Term::Element { .. } => t.clone(),
        Term::Var { name, .. } => env.get(name).cloned().unwrap_or_else(|| t.clone()),
        Term::Pair { l, r } => pair(substitute_term(l, env), substitute_term(r, env)),
        Term::TriplePt { a, b, c } => triple_pt(
            substitute_term(a, env),
            substitute_term(b, env),
            substitute_term(c, env),
        ),
        Term::AbstractApp { map, arg } => Term::AbstractApp {
            map: map.clone(),
            arg: Box::new(substitute_term(arg, env)),
        },
    }
}

// ---------------------------------------------------------------------------
// Node paths and one-hole contexts
// ---------------------------------------------------------------------------

/// One step into a shape: left/right of a binary node, or a slot of a
/// ternary node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Step {
    L,
    R,
    T(usize),
}

/// A path from the root of a shape to one of its nodes.
#[derive(Debug, Clone, PartialEq, Eq, Default, PartialOrd, Ord, Serialize)]
pub struct NodePath(pub Vec<Step>);

impl NodePath {
    pub fn root() -> NodePath {
        NodePath(Vec::new())
    }
    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "[]");
        }
        let steps: Vec<String> = self
            .0
            .iter()
            .map(|s| match s {
                Step::L => "L".to_string(),
                Step::R => "R".to_string(),
                Step::T(i) => format!("T{}", i),
            })
            .collect();
        write!(f, "[{}]", steps.join(","))
    }
}

/// A one-hole context over shapes. `Under` post-composes an abstract map
/// around the context; normalization rewrites it away, so normal-form letters
/// only carry pure constructor contexts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Ctx {
    Hole { expected: Shape },
    PairL { ctx: Box<Ctx>, right: Term },
    PairR { left: Term, ctx: Box<Ctx> },
    Tri0 { ctx: Box<Ctx>, b: Term, c: Term },
    Tri1 { a: Term, ctx: Box<Ctx>, c: Term },
    Tri2 { a: Term, b: Term, ctx: Box<Ctx> },
    Under { map: AbstractSym, ctx: Box<Ctx> },
}

impl Ctx {
    pub fn hole(expected: &Shape) -> Ctx {
        Ctx::Hole { expected: expected.clone() }
    }

    /// Shape expected in the hole.
    pub fn hole_shape(&self) -> &Shape {
        match self {
            Ctx::Hole { expected } => expected,
            Ctx::PairL { ctx, .. }
            | Ctx::PairR { ctx, .. }
            | Ctx::Tri0 { ctx, .. }
            | Ctx::Tri1 { ctx, .. }
            | Ctx::Tri2 { ctx, .. }
            | Ctx::Under { ctx, .. } => ctx.hole_shape(),
        }
    }

    /// Shape of the whole plugged term.
    pub fn outer_shape(&self) -> Shape {
        match self {
            Ctx::Hole { expected } => expected.clone(),
            Ctx::PairL { ctx, right } => smash(ctx.outer_shape(), right.shape()),
            Ctx::PairR { left, ctx } => smash(left.shape(), ctx.outer_shape()),
            Ctx::Tri0 { ctx, b, c } => triple(ctx.outer_shape(), b.shape(), c.shape()),
            Ctx::Tri1 { a, ctx, c } => triple(a.shape(), ctx.outer_shape(), c.shape()),
            Ctx::Tri2 { a, b, ctx } => triple(a.shape(), b.shape(), ctx.outer_shape()),
            Ctx::Under { map, .. } => map.codomain.clone(),
        }
    }

    /// Plug a term into the hole.
    pub fn plug(&self, t: &Term) -> Term {
        match self {
            Ctx::Hole { .. } => t.clone(),
            Ctx::PairL { ctx, right } => pair(ctx.plug(t), right.clone()),
            Ctx::PairR { left, ctx } => pair(left.clone(), ctx.plug(t)),
            Ctx::Tri0 { ctx, b, c } => triple_pt(ctx.plug(t), b.clone(), c.clone()),
            Ctx::Tri1 { a, ctx, c } => triple_pt(a.clone(), ctx.plug(t), c.clone()),
            Ctx::Tri2 { a, b, ctx } => triple_pt(a.clone(), b.clone(), ctx.plug(t)),
            Ctx::Under { map, ctx } => Term::AbstractApp {
                map: map.clone(),
                arg: Box::new(ctx.plug(t)),
            },
        }
    }

    /// Compose: replace the hole of `self` by `inner`.
    pub fn compose(&self, inner: &Ctx) -> Ctx {
        match self {
            Ctx::Hole { .. } => inner.clone(),
            Ctx::PairL { ctx, right } => Ctx::PairL { ctx: Box::new(ctx.compose(inner)), right: right.clone() },
            Ctx::PairR { left, ctx } => Ctx::PairR { left: left.clone(), ctx: Box::new(ctx.compose(inner)) },
            Ctx::Tri0 { ctx, b, c } => Ctx::Tri0 { ctx: Box::new(ctx.compose(inner)), b: b.clone(), c: c.clone() },
            Ctx::Tri1 { a, ctx, c } => Ctx::Tri1 { a: a.clone(), ctx: Box::new(ctx.compose(inner)), c: c.clone() },
            Ctx::Tri2 { a, b, ctx } => Ctx::Tri2 { a: a.clone(), b: b.clone(), ctx: Box::new(ctx.compose(inner)) },
            Ctx::Under { map, ctx } => Ctx::Under { map: map.clone(), ctx: Box::new(ctx.compose(inner)) },
        }
    }

    pub fn is_hole(&self) -> bool {
        matches!(self, Ctx::Hole { .. })
    }

    /// True when the context contains no `Under` layer.
    pub fn is_pure(&self) -> bool {
        match self {
            Ctx::Hole { .. } => true,
            Ctx::PairL { ctx, .. }
            | Ctx::PairR { ctx, .. }
            | Ctx::Tri0 { ctx, .. }
            | Ctx::Tri1 { ctx, .. }
            | Ctx::Tri2 { ctx, .. } => ctx.is_pure(),
            Ctx::Under { .. } => false,
        }
    }

    /// Reduce all terms inside the context.
    pub fn reduce(&self) -> Ctx {
        match self {
            Ctx::Hole { .. } => self.clone(),
            Ctx::PairL { ctx, right } => Ctx::PairL { ctx: Box::new(ctx.reduce()), right: right.reduce() },
            Ctx::PairR { left, ctx } => Ctx::PairR { left: left.reduce(), ctx: Box::new(ctx.reduce()) },
            Ctx::Tri0 { ctx, b, c } => Ctx::Tri0 { ctx: Box::new(ctx.reduce()), b: b.reduce(), c: c.reduce() },
            Ctx::Tri1 { a, ctx, c } => Ctx::Tri1 { a: a.reduce(), ctx: Box::new(ctx.reduce()), c: c.reduce() },
            Ctx::Tri2 { a, b, ctx } => Ctx::Tri2 { a: a.reduce(), b: b.reduce(), ctx: Box::new(ctx.reduce()) },
            Ctx::Under { map, ctx } => Ctx::Under { map: map.clone(), ctx: Box::new(ctx.reduce()) },
        }
    }

    /// Decompose a *pure* context into (node path, slot terms innermost-first,
    /// hole shape). Inverse of `ctx_of`.
    pub fn decompose(&self) -> Result<(NodePath, Vec<Term>)> {
        let mut steps = Vec::new();
        // Collect per-level slot groups from the outside in.
        let mut level_slots: Vec<Vec<Term>> = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Ctx::Hole { .. } => break,
                Ctx::PairL { ctx, right } => {
                    steps.push(Step::L);
                    level_slots.push(vec![right.clone()]);
                    cur = ctx;
                }
                Ctx::PairR { left, ctx } => {
                    steps.push(Step::R);
                    level_slots.push(vec![left.clone()]);
                    cur = ctx;
                }
                Ctx::Tri0 { ctx, b, c } => {
                    steps.push(Step::T(0));
                    level_slots.push(vec![b.clone(), c.clone()]);
                    cur = ctx;
                }
                Ctx::Tri1 { a, ctx, c } => {
                    steps.push(Step::T(1));
                    level_slots.push(vec![a.clone(), c.clone()]);
                    cur = ctx;
                }
                Ctx::Tri2 { a, b, ctx } => {
                    steps.push(Step::T(2));
                    level_slots.push(vec![a.clone(), b.clone()]);
                    cur = ctx;
                }
                Ctx::Under { .. } => {
                    return Err(Error::NonConstructorInput(
                        "cannot decompose a context with a map layer".to_string(),
                    ))
                }
            }
        }
        // Slots are stored innermost level first.
        let mut slots = Vec::new();
        for group in level_slots.into_iter().rev() {
            slots.extend(group);
        }
        Ok((NodePath(steps), slots))
    }
}

impl fmt::Display for Ctx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ctx::Hole { .. } => write!(f, "-"),
            Ctx::PairL { ctx, right } => write!(f, "<{}, {}>", ctx, right),
            Ctx::PairR { left, ctx } => write!(f, "<{}, {}>", left, ctx),
            Ctx::Tri0 { ctx, b, c } => write!(f, "<{}, {}, {}>", ctx, b, c),
            Ctx::Tri1 { a, ctx, c } => write!(f, "<{}, {}, {}>", a, ctx, c),
            Ctx::Tri2 { a, b, ctx } => write!(f, "<{}, {}, {}>", a, b, ctx),
            Ctx::Under { map, ctx } => write!(f, "{}({})", map.name, ctx),
        }
    }
}

/// Rebuild the pure context determined by a node path and slot terms
/// (innermost level first; ternary levels contribute their two bystander
/// slots in ascending slot order).
pub fn ctx_of(shape: &Shape, node: &NodePath, slots: &[Term]) -> Result<Ctx> {
    if node.is_root() {
        if !slots.is_empty() {
            return Err(Error::ShapeMismatch("root context takes no slot terms".to_string()));
        }
        return Ok(Ctx::hole(shape));
    }
    let step = node.0[0];
    let rest = NodePath(node.0[1..].to_vec());
    match (shape, step) {
        (Shape::Smash { left, right: _ }, Step::L) => {
            let (outer, inner) = slots.split_last().ok_or_else(|| {
                Error::ShapeMismatch("missing slot term for binary level".to_string())
            })?;
            Ok(Ctx::PairL { ctx: Box::new(ctx_of(left, &rest, inner)?), right: outer.clone() })
        }
        (Shape::Smash { left: _, right }, Step::R) => {
            let (outer, inner) = slots.split_last().ok_or_else(|| {
                Error::ShapeMismatch("missing slot term for binary level".to_string())
            })?;
            Ok(Ctx::PairR { left: outer.clone(), ctx: Box::new(ctx_of(right, &rest, inner)?) })
        }
        (Shape::Triple { a, b, c }, Step::T(i)) if i < 3 => {
            if slots.len() < 2 {
                return Err(Error::ShapeMismatch("missing slot terms for ternary level".to_string()));
            }
            // A ternary level's two bystander terms sit at the end, in
            // ascending bystander-slot order.
            let inner = &slots[..slots.len() - 2];
            let u = slots[slots.len() - 2].clone();
            let v = slots[slots.len() - 1].clone();
            match i {
                0 => Ok(Ctx::Tri0 { ctx: Box::new(ctx_of(a, &rest, inner)?), b: u, c: v }),
                1 => Ok(Ctx::Tri1 { a: u, ctx: Box::new(ctx_of(b, &rest, inner)?), c: v }),
                2 => Ok(Ctx::Tri2 { a: u, b: v, ctx: Box::new(ctx_of(c, &rest, inner)?) }),
                _ => unreachable!(),
            }
        }
        _ => Err(Error::ShapeMismatch(format!(
            "node path step does not match shape {}",
            shape
        ))),
    }
}

// ---------------------------------------------------------------------------
// Generator families
// ---------------------------------------------------------------------------

/// Which glue path of a node: binary left/right, or ternary slot i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum PushKind {
    PushL,
    PushR,
    Push0,
    Push1,
    Push2,
}

impl PushKind {
    pub fn label(&self) -> &'static str {
        match self {
            PushKind::PushL => "pl",
            PushKind::PushR => "pr",
            PushKind::Push0 => "p0",
            PushKind::Push1 => "p1",
            PushKind::Push2 => "p2",
        }
    }
}

/// A family of 1-path generators of a shape: all glue paths of the node at
/// `node` of kind `kind`, parameterized by the push arguments and by the
/// bystander slot terms of the surrounding context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorFamily {
    pub shape: Shape,
    pub node: NodePath,
    pub kind: PushKind,
    /// Shapes of the generator's own arguments (the non-basepointed slots of
    /// the node), in slot order.
    pub arg_shapes: Vec<Shape>,
    /// Shapes of the context slots, innermost level first.
    pub slot_shapes: Vec<Shape>,
}

/// Source point of a root glue path with the given arguments.
pub fn push_source(node_shape: &Shape, kind: PushKind, args: &[Term]) -> Result<Term> {
    match (node_shape, kind) {
        (Shape::Smash { left: _, right }, PushKind::PushL) => {
            Ok(pair(args[0].clone(), basepoint(right)))
        }
        (Shape::Smash { left, right: _ }, PushKind::PushR) => {
            Ok(pair(basepoint(left), args[0].clone()))
        }
        (Shape::Triple { a, .. }, PushKind::Push0) => {
            Ok(triple_pt(basepoint(a), args[0].clone(), args[1].clone()))
        }
        (Shape::Triple { b, .. }, PushKind::Push1) => {
            Ok(triple_pt(args[0].clone(), basepoint(b), args[1].clone()))
        }
        (Shape::Triple { c, .. }, PushKind::Push2) => {
            Ok(triple_pt(args[0].clone(), args[1].clone(), basepoint(c)))
        }
        _ => Err(Error::ShapeMismatch(format!(
            "push kind {} does not fit shape {}",
            kind.label(),
            node_shape
        ))),
    }
}

/// Argument shapes of a push kind at a node shape.
pub fn push_arg_shapes(node_shape: &Shape, kind: PushKind) -> Result<Vec<Shape>> {
    match (node_shape, kind) {
        (Shape::Smash { left, .. }, PushKind::PushL) => Ok(vec![(**left).clone()]),
        (Shape::Smash { right, .. }, PushKind::PushR) => Ok(vec![(**right).clone()]),
        (Shape::Triple { b, c, .. }, PushKind::Push0) => Ok(vec![(**b).clone(), (**c).clone()]),
        (Shape::Triple { a, c, .. }, PushKind::Push1) => Ok(vec![(**a).clone(), (**c).clone()]),
        (Shape::Triple { a, b, .. }, PushKind::Push2) => Ok(vec![(**a).clone(), (**b).clone()]),
        _ => Err(Error::ShapeMismatch(format!(
            "push kind {} does not fit shape {}",
            kind.label(),
            node_shape
        ))),
    }
}

/// Enumerate all generator families of a shape: nodes in pre-order, and at
/// each node the glue kinds in slot order.
pub fn shape_generators(shape: &Shape) -> Vec<GeneratorFamily> {
    let mut out = Vec::new();
    collect_generators(shape, shape, &mut Vec::new(), &mut out);
    out
}

fn collect_generators(root: &Shape, cur: &Shape, path: &mut Vec<Step>, out: &mut Vec<GeneratorFamily>) {
    let kinds: &[PushKind] = match cur {
        Shape::Leaf { .. } => &[],
        Shape::Smash { .. } => &[PushKind::PushL, PushKind::PushR],
        Shape::Triple { .. } => &[PushKind::Push0, PushKind::Push1, PushKind::Push2],
    };
    for &kind in kinds {
        let node = NodePath(path.clone());
        out.push(GeneratorFamily {
            shape: root.clone(),
            slot_shapes: family_slot_shapes(root, &node).expect("path exists"),
            node,
            kind,
            arg_shapes: push_arg_shapes(cur, kind).expect("kind fits node"),
        });
    }
    match cur {
        Shape::Leaf { .. } => {}
        Shape::Smash { left, right } => {
            path.push(Step::L);
            collect_generators(root, left, path, out);
            path.pop();
            path.push(Step::R);
            collect_generators(root, right, path, out);
            path.pop();
        }
        Shape::Triple { a, b, c } => {
            for (i, child) in [&**a, &**b, &**c].into_iter().enumerate() {
                path.push(Step::T(i));
                collect_generators(root, child, path, out);
                path.pop();
            }
        }
    }
}

/// Slot shapes (innermost level first) for the context around `node`.
pub fn family_slot_shapes(shape: &Shape, node: &NodePath) -> Result<Vec<Shape>> {
    // Walk from the root collecting per-level bystander groups (outermost
    // first), then reverse the level order.
    let mut groups: Vec<Vec<Shape>> = Vec::new();
    let mut cur = shape;
    for step in &node.0 {
        match (cur, step) {
            (Shape::Smash { left, right }, Step::L) => {
                groups.push(vec![(**right).clone()]);
                cur = left;
            }
            (Shape::Smash { left, right }, Step::R) => {
                groups.push(vec![(**left).clone()]);
                cur = right;
            }
            (Shape::Triple { a, b, c }, Step::T(i)) if *i < 3 => {
                let slots = [&**a, &**b, &**c];
                let mut g = Vec::new();
                for (j, s) in slots.iter().enumerate() {
                    if j != *i {
                        g.push((*s).clone());
                    }
                }
                groups.push(g);
                cur = slots[*i];
            }
            _ => {
                return Err(Error::ShapeMismatch(format!(
                    "node path {} does not exist in shape {}",
                    node, shape
                )))
            }
        }
    }
    let mut out = Vec::new();
    for g in groups.into_iter().rev() {
        out.extend(g);
    }
    Ok(out)
}

impl GeneratorFamily {
    /// Display tag like `pl@[L]` used in obligation tags and reports.
    pub fn tag(&self) -> String {
        format!("{}@{}", self.kind.label(), self.node)
    }
}

// ---------------------------------------------------------------------------
// Patterns
// ---------------------------------------------------------------------------

/// A constructor pattern over a shape, used for clause-table rows and for
/// enumerating case splits. `Any` binds one variable of a generic leaf sort;
/// basepoints and enumerated elements are matched literally.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Pattern {
    Any { name: String, sort: Leaf },
    Basepoint { at: Shape },
    Element { name: String, sort: Leaf },
    Pair { l: Box<Pattern>, r: Box<Pattern> },
    TriplePt { a: Box<Pattern>, b: Box<Pattern>, c: Box<Pattern> },
}

impl Pattern {
    pub fn shape(&self) -> Shape {
        match self {
            Pattern::Any { sort, .. } | Pattern::Element { sort, .. } => Shape::Leaf { leaf: sort.clone() },
            Pattern::Basepoint { at } => at.clone(),
            Pattern::Pair { l, r } => smash(l.shape(), r.shape()),
            Pattern::TriplePt { a, b, c } => triple(a.shape(), b.shape(), c.shape()),
        }
    }

    /// The pattern read back as a term (variables stay variables).
    pub fn to_term(&self) -> Term {
        match self {
            Pattern::Any { name, sort } => var(name, sort),
            Pattern::Basepoint { at } => Term::Basepoint { at: at.clone() },
            Pattern::Element { name, sort } => Term::Element { name: name.clone(), sort: sort.clone() },
            Pattern::Pair { l, r } => pair(l.to_term(), r.to_term()),
            Pattern::TriplePt { a, b, c } => triple_pt(a.to_term(), b.to_term(), c.to_term()),
        }
    }

    /// Match a (reduced) term, extending `binds`. `Any` matches any term of
    /// the right sort, including basepoints and abstract applications;
    /// compound patterns require constructor terms.
    pub fn matches(&self, t: &Term, binds: &mut BTreeMap<String, Term>) -> Result<bool> {
        match self {
            Pattern::Any { name, sort } => {
                let tshape = t.shape();
                if tshape != (Shape::Leaf { leaf: sort.clone() }) {
                    return Ok(false);
                }
                if let Some(prev) = binds.get(name) {
                    if prev != t {
                        // A pattern variable may bind only once; a second,
                        // different bind means two leaves share a name.
                        return Err(Error::Invalid(format!(
                            "pattern variable `{}` bound to both `{}` and `{}`; \
                             leaf names within a shape must be pairwise distinct",
                            name, prev, t
                        )));
                    }
                }
                binds.insert(name.clone(), t.clone());
                Ok(true)
            }
            Pattern::Basepoint { at } => Ok(*t == Term::Basepoint { at: at.clone() }),
            Pattern::Element { name, sort } => {
                Ok(*t == Term::Element { name: name.clone(), sort: sort.clone() })
            }
            Pattern::Pair { l, r } => match t {
                Term::Pair { l: tl, r: tr } => Ok(l.matches(tl, binds)? && r.matches(tr, binds)?),
                Term::Basepoint { .. } => Ok(false),
                _ => Err(Error::NonConstructorInput(format!(
                    "pair pattern cannot inspect non-constructor term `{}`",
                    t
                ))),
            },
            Pattern::TriplePt { a, b, c } => match t {
                Term::TriplePt { a: ta, b: tb, c: tc } => {
                    Ok(a.matches(ta, binds)? && b.matches(tb, binds)? && c.matches(tc, binds)?)
                }
                Term::Basepoint { .. } => Ok(false),
                _ => Err(Error::NonConstructorInput(format!(
                    "triple pattern cannot inspect non-constructor term `{}`",
                    t
                ))),
            },
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Pattern::Any { name, .. } => out.push(name.clone()),
            Pattern::Basepoint { .. } | Pattern::Element { .. } => {}
            Pattern::Pair { l, r } => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Pattern::TriplePt { a, b, c } => {
                a.collect_vars(out);
                b.collect_vars(out);
                c.collect_vars(out);
            }
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

/// The canonical case split of a shape: a generic leaf is a single variable
/// (named after the leaf, lowercased); an enumerated leaf splits into its
/// basepoint and elements; a compound shape splits into its basepoint and all
/// pairs/triples of child patterns.
pub fn patterns(shape: &Shape) -> Vec<Pattern> {
    match shape {
        Shape::Leaf { leaf } => match &leaf.elements {
            None => vec![Pattern::Any { name: leaf.name.to_lowercase(), sort: leaf.clone() }],
            Some(els) => {
                let mut out = vec![Pattern::Basepoint { at: shape.clone() }];
                for e in els {
                    out.push(Pattern::Element { name: e.clone(), sort: leaf.clone() });
                }
                out
            }
        },
        Shape::Smash { left, right } => {
            let mut out = vec![Pattern::Basepoint { at: shape.clone() }];
            for l in patterns(left) {
                for r in patterns(right) {
                    out.push(Pattern::Pair { l: Box::new(l.clone()), r: Box::new(r.clone()) });
                }
            }
            out
        }
        Shape::Triple { a, b, c } => {
            let mut out = vec![Pattern::Basepoint { at: shape.clone() }];
            for pa in patterns(a) {
                for pb in patterns(b) {
                    for pc in patterns(c) {
                        out.push(Pattern::TriplePt {
                            a: Box::new(pa.clone()),
                            b: Box::new(pb.clone()),
                            c: Box::new(pc.clone()),
                        });
                    }
                }
            }
            out
        }
    }
}

/// Non-basepoint patterns of a shape.
pub fn proper_patterns(shape: &Shape) -> Vec<Pattern> {
    patterns(shape)
        .into_iter()
        .filter(|p| !matches!(p, Pattern::Basepoint { .. }))
        .collect()
}

// ---------------------------------------------------------------------------
// Path expressions
// ---------------------------------------------------------------------------

/// A formal path expression in the free groupoid over glue generators,
/// pointedness cells of abstract maps, and opaque 2-cell symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PathExpr {
    Refl { at: Term },
    /// An instance of a generator family: glue path of kind `kind` at `node`
    /// with arguments `args`, inside the context with bystander slots `slots`.
    Gen {
        shape: Shape,
        node: NodePath,
        kind: PushKind,
        args: Vec<Term>,
        slots: Vec<Term>,
    },
    /// The pointedness path `f(*) = *` of an abstract map symbol.
    Pointedness { map: AbstractSym },
    /// An opaque 2-cell name. Never evaluated; reaching one is an error.
    TwoCellSymbol { name: String },
    Inv { inner: Box<PathExpr> },
    Comp { segments: Vec<PathExpr> },
    Ap { map: Box<MapDef>, path: Box<PathExpr> },
    ApCtx { ctx: Ctx, path: Box<PathExpr> },
}

pub fn refl(at: Term) -> PathExpr {
    PathExpr::Refl { at }
}

pub fn gen(shape: &Shape, node: NodePath, kind: PushKind, args: Vec<Term>, slots: Vec<Term>) -> PathExpr {
    PathExpr::Gen { shape: shape.clone(), node, kind, args, slots }
}

/// Root glue path of a binary or ternary shape.
pub fn root_gen(shape: &Shape, kind: PushKind, args: Vec<Term>) -> PathExpr {
    gen(shape, NodePath::root(), kind, args, vec![])
}

pub fn inv(p: PathExpr) -> PathExpr {
    PathExpr::Inv { inner: Box::new(p) }
}

pub fn comp(segments: Vec<PathExpr>) -> PathExpr {
    PathExpr::Comp { segments }
}

pub fn ap(map: &MapDef, p: PathExpr) -> PathExpr {
    PathExpr::Ap { map: Box::new(map.clone()), path: Box::new(p) }
}

pub fn ap_ctx(ctx: Ctx, p: PathExpr) -> PathExpr {
    PathExpr::ApCtx { ctx, path: Box::new(p) }
}

impl fmt::Display for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathExpr::Refl { at } => write!(f, "refl({})", at),
            PathExpr::Gen { node, kind, args, slots, .. } => {
                let args_s: Vec<String> = args.iter().map(|t| t.to_string()).collect();
                write!(f, "{}({})", kind.label(), args_s.join(", "))?;
                if !node.is_root() {
                    write!(f, "@{}", node)?;
                }
                if !slots.is_empty() {
                    let ss: Vec<String> = slots.iter().map(|t| t.to_string()).collect();
                    write!(f, "{{{}}}", ss.join(", "))?;
                }
                Ok(())
            }
            PathExpr::Pointedness { map } => write!(f, "pt[{}]", map.name),
            PathExpr::TwoCellSymbol { name } => write!(f, "cell[{}]", name),
            PathExpr::Inv { inner } => write!(f, "({})^-1", inner),
            PathExpr::Comp { segments } => {
                let ss: Vec<String> = segments.iter().map(|p| p.to_string()).collect();
                write!(f, "({})", ss.join(" . "))
            }
            PathExpr::Ap { map, path } => write!(f, "ap[{}]({})", map.name(), path),
            PathExpr::ApCtx { ctx, path } => write!(f, "ap{{{}}}({})", ctx, path),
        }
    }
}

/// Substitute terms for variables throughout a path expression. Map tables
/// are closed, so substitution does not descend into `MapDef`s.
pub fn substitute_path(p: &PathExpr, env: &BTreeMap<String, Term>) -> PathExpr {
    match p {
        PathExpr::Refl { at } => PathExpr::Refl { at: substitute_term(at, env) },
        PathExpr::Gen { shape, node, kind, args, slots } => PathExpr::Gen {
            shape: shape.clone(),
            node: node.clone(),
            kind: *kind,
            args: args.iter().map(|t| substitute_term(t, env)).collect(),
            slots: slots.iter().map(|t| substitute_term(t, env)).collect(),
        },
        PathExpr::Pointedness { .. } | PathExpr::TwoCellSymbol { .. } => p.clone(),
        PathExpr::Inv { inner } => inv(substitute_path(inner, env)),
        PathExpr::Comp { segments } => comp(segments.iter().map(|q| substitute_path(q, env)).collect()),
        PathExpr::Ap { map, path } => PathExpr::Ap {
            map: map.clone(),
            path: Box::new(substitute_path(path, env)),
        },
        PathExpr::ApCtx { ctx, path } => PathExpr::ApCtx {
            ctx: substitute_ctx(ctx, env),
            path: Box::new(substitute_path(path, env)),
        },
    }
}

fn substitute_ctx(c: &Ctx, env: &BTreeMap<String, Term>) -> Ctx {
    match c {
        Ctx::Hole { .. } => c.clone(),
        Ctx::PairL { ctx, right } => Ctx::PairL {
            ctx: Box::new(substitute_ctx(ctx, env)),
            right: substitute_term(right, env),
        },
        Ctx::PairR { left, ctx } => Ctx::PairR {
            left: substitute_term(left, env),
            ctx: Box::new(substitute_ctx(ctx, env)),
        },
        Ctx::Tri0 { ctx, b, c } => Ctx::Tri0 {
            ctx: Box::new(substitute_ctx(ctx, env)),
            b: substitute_term(b, env),
            c: substitute_term(c, env),
        },
        Ctx::Tri1 { a, ctx, c } => Ctx::Tri1 {
            a: substitute_term(a, env),
            ctx: Box::new(substitute_ctx(ctx, env)),
            c: substitute_term(c, env),
        },
        Ctx::Tri2 { a, b, ctx } => Ctx::Tri2 {
            a: substitute_term(a, env),
            b: substitute_term(b, env),
            ctx: Box::new(substitute_ctx(ctx, env)),
        },
        Ctx::Under { map, ctx } => Ctx::Under {
            map: map.clone(),
            ctx: Box::new(substitute_ctx(ctx, env)),
        },
    }
}

// ---------------------------------------------------------------------------
// Map definitions
// ---------------------------------------------------------------------------

/// A point clause: pattern over the domain's case split, and its value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointRow {
    pub pattern: Pattern,
    pub value: Term,
}

/// A path clause: one generator-family instance of the domain (arguments and
/// context slots given by patterns) and the image path expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathRow {
    pub node: NodePath,
    pub kind: PushKind,
    pub args: Vec<Pattern>,
    pub slots: Vec<Pattern>,
    pub value: PathExpr,
}

/// A named, never-evaluated 2-cell filler carried by a table for the record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoCellRow {
    pub name: String,
    pub value: PathExpr,
}

/// A map defined by clause tables over its domain's constructors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableMap {
    pub name: String,
    pub domain: Shape,
    pub codomain: Shape,
    pub points: Vec<PointRow>,
    pub paths: Vec<PathRow>,
    pub two_cells: Vec<TwoCellRow>,
    /// Path witnessing `self(*) = *` in the codomain.
    pub pointedness: PathExpr,
}

/// A pointed map between shapes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum MapDef {
    Identity { shape: Shape },
    Abstract { sym: AbstractSym },
    Table { table: Box<TableMap> },
    /// Stages applied left to right.
    Composite { stages: Vec<MapDef> },
}

impl MapDef {
    pub fn identity(shape: &Shape) -> MapDef {
        MapDef::Identity { shape: shape.clone() }
    }

    pub fn abstract_sym(sym: AbstractSym) -> MapDef {
        MapDef::Abstract { sym }
    }

    pub fn table(t: TableMap) -> MapDef {
        MapDef::Table { table: Box::new(t) }
    }

    pub fn composite(stages: Vec<MapDef>) -> MapDef {
        MapDef::Composite { stages }
    }

    pub fn domain(&self) -> Shape {
        match self {
            MapDef::Identity { shape } => shape.clone(),
            MapDef::Abstract { sym } => sym.domain.clone(),
            MapDef::Table { table } => table.domain.clone(),
            MapDef::Composite { stages } => stages.first().expect("nonempty composite").domain(),
        }
    }

    pub fn codomain(&self) -> Shape {
        match self {
            MapDef::Identity { shape } => shape.clone(),
            MapDef::Abstract { sym } => sym.codomain.clone(),
            MapDef::Table { table } => table.codomain.clone(),
            MapDef::Composite { stages } => stages.last().expect("nonempty composite").codomain(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            MapDef::Identity { shape } => format!("1[{}]", shape),
            MapDef::Abstract { sym } => sym.name.clone(),
            MapDef::Table { table } => table.name.clone(),
            MapDef::Composite { stages } => {
                let names: Vec<String> = stages.iter().map(|s| s.name()).collect();
                format!("({})", names.join(" ; "))
            }
        }
    }
}

/// Evaluate a map on a point term. The term is reduced first; clause lookup
/// requires constructor form wherever a compound pattern must inspect it.
pub fn eval_point(m: &MapDef, t: &Term) -> Result<Term> {
    let t = t.reduce();
    match m {
        MapDef::Identity { shape } => {
            check_shape(&t, shape)?;
            Ok(t)
        }
        MapDef::Abstract { sym } => {
            check_shape(&t, &sym.domain)?;
            Ok(Term::AbstractApp { map: sym.clone(), arg: Box::new(t) }.reduce())
        }
        MapDef::Composite { stages } => {
            let mut cur = t;
            for s in stages {
                cur = eval_point(s, &cur)?;
            }
            Ok(cur)
        }
        MapDef::Table { table } => {
            check_shape(&t, &table.domain)?;
            let mut matched: Option<Term> = None;
            for row in &table.points {
                let mut binds = BTreeMap::new();
                if row.pattern.matches(&t, &mut binds)? {
                    if matched.is_some() {
                        return Err(Error::Invalid(format!(
                            "{}: overlapping point clauses at `{}`",
                            table.name, t
                        )));
                    }
                    matched = Some(substitute_term(&row.value, &binds).reduce());
                }
            }
            matched.ok_or_else(|| {
                Error::UnknownClause(format!("{}: no point clause matches `{}`", table.name, t))
            })
        }
    }
}

fn check_shape(t: &Term, expected: &Shape) -> Result<()> {
    let got = t.shape();
    if got != *expected {
        return Err(Error::SortMismatch(format!(
            "term `{}` has shape {}, expected {}",
            t, got, expected
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Endpoints
// ---------------------------------------------------------------------------

/// Source and target of a path expression, with chaining of composites
/// checked. Terms are returned in reduced form.
pub fn endpoints(p: &PathExpr) -> Result<(Term, Term)> {
    match p {
        PathExpr::Refl { at } => {
            let t = at.reduce();
            Ok((t.clone(), t))
        }
        PathExpr::Gen { shape, node, kind, args, slots } => {
            let node_shape = shape.at(node)?;
            let src_core = push_source(node_shape, *kind, args)?;
            let ctx = ctx_of(shape, node, slots)?;
            Ok((ctx.plug(&src_core).reduce(), ctx.plug(&basepoint(node_shape)).reduce()))
        }
        PathExpr::Pointedness { map } => {
            let src = Term::AbstractApp {
                map: map.clone(),
                arg: Box::new(basepoint(&map.domain)),
            }
            .reduce();
            Ok((src, basepoint(&map.codomain)))
        }
        PathExpr::TwoCellSymbol { name } => Err(Error::TwoCellEncountered(name.clone())),
        PathExpr::Inv { inner } => {
            let (s, t) = endpoints(inner)?;
            Ok((t, s))
        }
        PathExpr::Comp { segments } => {
            if segments.is_empty() {
                return Err(Error::Invalid("empty composite has no endpoints".to_string()));
            }
            let (src, mut cur) = endpoints(&segments[0])?;
            for seg in &segments[1..] {
                let (s, t) = endpoints(seg)?;
                if s != cur {
                    return Err(Error::IllChained { at: cur.to_string(), next: s.to_string() });
                }
                cur = t;
            }
            Ok((src, cur))
        }
        PathExpr::Ap { map, path } => {
            let (s, t) = endpoints(path)?;
            Ok((eval_point(map, &s)?, eval_point(map, &t)?))
        }
        PathExpr::ApCtx { ctx, path } => {
            let (s, t) = endpoints(path)?;
            if s.shape() != *ctx.hole_shape() {
                return Err(Error::SortMismatch(format!(
                    "path endpoint `{}` does not fit hole of `{}`",
                    s, ctx
                )));
            }
            Ok((ctx.plug(&s).reduce(), ctx.plug(&t).reduce()))
        }
    }
}

// ---------------------------------------------------------------------------
// Squares
// ---------------------------------------------------------------------------

/// A square of paths: `top` and `bottom` run left to right, `left` and
/// `right` run top to bottom. Corners must chain:
/// top: TL -> TR, bottom: BL -> BR, left: TL -> BL, right: TR -> BR.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Square {
    pub top: PathExpr,
    pub bottom: PathExpr,
    pub left: PathExpr,
    pub right: PathExpr,
}

impl Square {
    /// Check the four corners chain; returns (TL, TR, BL, BR).
    pub fn corners(&self) -> Result<(Term, Term, Term, Term)> {
        let (tl, tr) = endpoints(&self.top)?;
        let (bl, br) = endpoints(&self.bottom)?;
        let (lt, lb) = endpoints(&self.left)?;
        let (rt, rb) = endpoints(&self.right)?;
        if lt != tl || rt != tr {
            return Err(Error::IllChained { at: tl.to_string(), next: lt.to_string() });
        }
        if lb != bl || rb != br {
            return Err(Error::IllChained { at: bl.to_string(), next: lb.to_string() });
        }
        Ok((tl, tr, bl, br))
    }
}

// ---------------------------------------------------------------------------
// Table validation
// ---------------------------------------------------------------------------

/// Validate a map definition: clause tables must be total and non-overlapping
/// over the domain's case split, and every path clause must have exactly the
/// endpoints forced by the point clauses. Composites must chain.
pub fn validate_map(m: &MapDef) -> Result<()> {
    match m {
        MapDef::Identity { .. } | MapDef::Abstract { .. } => Ok(()),
        MapDef::Composite { stages } => {
            if stages.is_empty() {
                return Err(Error::Invalid("empty composite".to_string()));
            }
            let mut cur = stages[0].domain();
            for s in stages {
                if s.domain() != cur {
                    return Err(Error::ShapeMismatch(format!(
                        "composite stage {} expects domain {}, got {}",
                        s.name(),
                        s.domain(),
                        cur
                    )));
                }
                validate_map(s)?;
                cur = s.codomain();
            }
            Ok(())
        }
        MapDef::Table { table } => validate_table(table),
    }
}

/// Leaf names within one shape must be pairwise distinct; pattern variables
/// are derived from them, so a repeat would alias two unrelated coordinates.
pub fn check_distinct_leaves(shape: &Shape) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for leaf in shape.leaves() {
        if !seen.insert(leaf.name.clone()) {
            return Err(Error::ShapeMismatch(format!(
                "leaf `{}` occurs more than once in shape {}",
                leaf.name, shape
            )));
        }
    }
    Ok(())
}

fn validate_table(t: &TableMap) -> Result<()> {
    check_distinct_leaves(&t.domain)?;
    check_distinct_leaves(&t.codomain)?;
    // Point clauses: total and non-overlapping on the case split.
    for pat in patterns(&t.domain) {
        let probe = pat.to_term();
        let mut hits = 0;
        for row in &t.points {
            let mut binds = BTreeMap::new();
            if row.pattern.matches(&probe, &mut binds)? {
                hits += 1;
                // Check value shape under the binding.
                let val = substitute_term(&row.value, &binds);
                if val.shape() != t.codomain {
                    return Err(Error::Invalid(format!(
                        "{}: point clause `{}` lands in {}, expected {}",
                        t.name,
                        row.pattern,
                        val.shape(),
                        t.codomain
                    )));
                }
            }
        }
        if hits == 0 {
            return Err(Error::Invalid(format!(
                "{}: point clauses miss case `{}`",
                t.name, pat
            )));
        }
        if hits > 1 {
            return Err(Error::Invalid(format!(
                "{}: point clauses overlap on case `{}`",
                t.name, pat
            )));
        }
    }

    // Path clauses: total, non-overlapping, endpoint-correct on every
    // generator-family instance.
    let m = MapDef::Table { table: Box::new(t.clone()) };
    for fam in shape_generators(&t.domain) {
        for (args, slots) in family_instances(&fam)? {
            let gen_expr = gen(&t.domain, fam.node.clone(), fam.kind, args.clone(), slots.clone());
            let (src, tgt) = endpoints(&gen_expr)?;
            let want_src = eval_point(&m, &src)?;
            let want_tgt = eval_point(&m, &tgt)?;

            let mut hit: Option<PathExpr> = None;
            for row in &t.paths {
                if row.node != fam.node || row.kind != fam.kind {
                    continue;
                }
                let mut binds = BTreeMap::new();
                if !match_all(&row.args, &args, &mut binds)? || !match_all(&row.slots, &slots, &mut binds)? {
                    continue;
                }
                if hit.is_some() {
                    return Err(Error::Invalid(format!(
                        "{}: overlapping path clauses for {} with args ({})",
                        t.name,
                        fam.tag(),
                        display_terms(&args)
                    )));
                }
                hit = Some(substitute_path(&row.value, &binds));
            }
            let value = hit.ok_or_else(|| {
                Error::UnknownClause(format!(
                    "{}: no path clause for {} with args ({}) slots ({})",
                    t.name,
                    fam.tag(),
                    display_terms(&args),
                    display_terms(&slots)
                ))
            })?;
            let (vs, vt) = endpoints(&value)?;
            if vs != want_src || vt != want_tgt {
                return Err(Error::Invalid(format!(
                    "{}: path clause for {} maps `{}` -> `{}` but endpoints force `{}` -> `{}`",
                    t.name,
                    fam.tag(),
                    vs,
                    vt,
                    want_src,
                    want_tgt
                )));
            }
        }
    }

    // Pointedness clause.
    let (ps, pt) = endpoints(&t.pointedness)?;
    let want_src = eval_point(&m, &basepoint(&t.domain))?;
    if ps != want_src || pt != basepoint(&t.codomain) {
        return Err(Error::Invalid(format!(
            "{}: pointedness path runs `{}` -> `{}`, expected `{}` -> `{}`",
            t.name,
            ps,
            pt,
            want_src,
            basepoint(&t.codomain)
        )));
    }
    Ok(())
}

fn display_terms(ts: &[Term]) -> String {
    ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
}

fn match_all(pats: &[Pattern], terms: &[Term], binds: &mut BTreeMap<String, Term>) -> Result<bool> {
    if pats.len() != terms.len() {
        return Ok(false);
    }
    for (p, t) in pats.iter().zip(terms) {
        if !p.matches(t, binds)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All pattern-term instances of a generator family: the cartesian product of
/// the case splits of its argument and slot shapes. Variables are suffixed by
/// position so distinct slots of equal sorts stay distinct.
pub fn family_instances(fam: &GeneratorFamily) -> Result<Vec<(Vec<Term>, Vec<Term>)>> {
    let arg_choices: Vec<Vec<Term>> = fam
        .arg_shapes
        .iter()
        .enumerate()
        .map(|(i, s)| {
            patterns(s)
                .into_iter()
                .map(|p| rename_pattern_vars(&p, &format!("x{}", i)).to_term())
                .collect()
        })
        .collect();
    let slot_choices: Vec<Vec<Term>> = fam
        .slot_shapes
        .iter()
        .enumerate()
        .map(|(i, s)| {
            patterns(s)
                .into_iter()
                .map(|p| rename_pattern_vars(&p, &format!("s{}", i)).to_term())
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for args in cartesian(&arg_choices) {
        for slots in cartesian(&slot_choices) {
            out.push((args.clone(), slots));
        }
    }
    Ok(out)
}

/// Rename pattern variables with a position prefix to guarantee freshness
/// across a multi-slot instance.
pub fn rename_pattern_vars(p: &Pattern, prefix: &str) -> Pattern {
    match p {
        Pattern::Any { name, sort } => Pattern::Any { name: format!("{}_{}", prefix, name), sort: sort.clone() },
        Pattern::Basepoint { .. } | Pattern::Element { .. } => p.clone(),
        Pattern::Pair { l, r } => Pattern::Pair {
            l: Box::new(rename_pattern_vars(l, prefix)),
            r: Box::new(rename_pattern_vars(r, prefix)),
        },
        Pattern::TriplePt { a, b, c } => Pattern::TriplePt {
            a: Box::new(rename_pattern_vars(a, prefix)),
            b: Box::new(rename_pattern_vars(b, prefix)),
            c: Box::new(rename_pattern_vars(c, prefix)),
        },
    }
}

pub fn cartesian<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for c in choices {
        let mut next = Vec::new();
        for prefix in &out {
            for item in c {
                let mut row = prefix.clone();
                row.push(item.clone());
                next.push(row);
            }
        }
        out = next;
    }
    out
}
