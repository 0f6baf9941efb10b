//! Free-groupoid normalization of path expressions.
//!
//! Design notes:
//! - A normal form is a freely reduced word of signed letters. A letter is a
//!   glue generator, a pointedness cell of an abstract map, or an application
//!   of an abstract map to another letter — each under an optional pure
//!   constructor context. Everything else (`refl`, inverses, composites,
//!   `ap` through identities, composites and clause tables, contexts around
//!   words) is evaluated away.
//! - Applying a clause table to a glue letter is row lookup plus recursive
//!   normalization of the substituted right-hand side. Applying it to an
//!   opaque letter (pointedness or abstract application) uses the one-hole
//!   rule: plug a fresh variable into the letter's context, evaluate the
//!   table on the resulting point, and read off how the image factors through
//!   the variable — the image occurs zero times (letter vanishes) or once
//!   (letter is re-dressed in the image's context and map layers).
//! - Word equality is syntactic equality of reduced words; no equations
//!   between distinct letters are ever assumed.

use crate::term::{
    self, ap, basepoint, comp, ctx_of, endpoints, eval_point, gen, inv, push_source, refl,
    AbstractSym, Ctx, MapDef, PathExpr, PushKind, Shape, TableMap, Term,
};
use crate::{Error, Result};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

// ---------------------------------------------------------------------------
// Letters and normal words
// ---------------------------------------------------------------------------

/// Orientation of a letter occurrence in a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+"),
            Sign::Minus => write!(f, "-"),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// The irreducible core of a letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LetterCore {
    /// A glue generator at the root of `shape`.
    Push { shape: Shape, kind: PushKind, args: Vec<Term> },
    /// The pointedness cell of a (non-refl-pointed) abstract map.
    Point { map: AbstractSym },
    /// An abstract map applied to another letter.
    MapApp { map: AbstractSym, inner: Box<Letter> },
}

/// A normal-form letter: a core under an optional pure constructor context.
/// `ctx: None` means the core sits at the root of its ambient shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Letter {
    pub ctx: Option<Ctx>,
    pub core: LetterCore,
}

impl Letter {
    /// Shape of the points this letter connects.
    pub fn outer_shape(&self) -> Shape {
        match &self.ctx {
            Some(c) => c.outer_shape(),
            None => self.core_shape(),
        }
    }

    /// Shape of the core itself (the letter's context hole).
    pub fn core_shape(&self) -> Shape {
        match &self.core {
            LetterCore::Push { shape, .. } => shape.clone(),
            LetterCore::Point { map } => map.codomain.clone(),
            LetterCore::MapApp { map, .. } => map.codomain.clone(),
        }
    }

    /// Source and target points of the letter (positively oriented).
    pub fn letter_endpoints(&self) -> Result<(Term, Term)> {
        let (s, t) = match &self.core {
            LetterCore::Push { shape, kind, args } => {
                (push_source(shape, *kind, args)?, basepoint(shape))
            }
            LetterCore::Point { map } => (
                Term::AbstractApp { map: map.clone(), arg: Box::new(basepoint(&map.domain)) }.reduce(),
                basepoint(&map.codomain),
            ),
            LetterCore::MapApp { map, inner } => {
                let (s, t) = inner.letter_endpoints()?;
                (
                    Term::AbstractApp { map: map.clone(), arg: Box::new(s) }.reduce(),
                    Term::AbstractApp { map: map.clone(), arg: Box::new(t) }.reduce(),
                )
            }
        };
        match &self.ctx {
            Some(c) => Ok((c.plug(&s).reduce(), c.plug(&t).reduce())),
            None => Ok((s, t)),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let core = match &self.core {
            LetterCore::Push { kind, args, .. } => {
                let args_s: Vec<String> = args.iter().map(|t| t.to_string()).collect();
                format!("{}({})", kind.label(), args_s.join(", "))
            }
            LetterCore::Point { map } => format!("pt[{}]", map.name),
            LetterCore::MapApp { map, inner } => format!("ap[{}]({})", map.name, inner),
        };
        match &self.ctx {
            Some(c) => write!(f, "ap{{{}}}({})", c, core),
            None => write!(f, "{}", core),
        }
    }
}

/// A signed letter occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedLetter {
    pub letter: Letter,
    pub sign: Sign,
}

impl fmt::Display for SignedLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Plus => write!(f, "{}", self.letter),
            Sign::Minus => write!(f, "{}^-1", self.letter),
        }
    }
}

impl Serialize for SignedLetter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("letter", &self.letter.to_string())?;
        m.serialize_entry("sign", &self.sign)?;
        m.end()
    }
}

/// A freely reduced word of signed letters with its endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalWord {
    pub source: Term,
    pub target: Term,
    pub letters: Vec<SignedLetter>,
}

impl NormalWord {
    pub fn is_refl(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Display for NormalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "refl");
        }
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" . "))
    }
}

impl Serialize for NormalWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            source: String,
            target: String,
            letters: &'a [SignedLetter],
        }
        Repr {
            source: self.source.to_string(),
            target: self.target.to_string(),
            letters: &self.letters,
        }
        .serialize(s)
    }
}

// Helper so a plain Vec of words serializes as a JSON list.
pub fn serialize_words<S: Serializer>(words: &[NormalWord], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(words.len()))?;
    for w in words {
        seq.serialize_element(w)?;
    }
    seq.end()
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

/// Normalize a path expression to a freely reduced word. The expression's
/// endpoints are computed and checked along the way.
pub fn normalize(p: &PathExpr) -> Result<NormalWord> {
    let (source, target) = endpoints(p)?;
    let mut letters = Vec::new();
    walk(p, Sign::Plus, &mut letters)?;
    Ok(NormalWord {
        source,
        target,
        letters: letters.into_iter().map(|(letter, sign)| SignedLetter { letter, sign }).collect(),
    })
}

fn push_reduced(out: &mut Vec<(Letter, Sign)>, letter: Letter, sign: Sign) {
    if let Some((last, last_sign)) = out.last() {
        if *last == letter && *last_sign == sign.flip() {
            out.pop();
            return;
        }
    }
    out.push((letter, sign));
}

fn append_word(out: &mut Vec<(Letter, Sign)>, word: Vec<(Letter, Sign)>, sign: Sign) {
    match sign {
        Sign::Plus => {
            for (l, s) in word {
                push_reduced(out, l, s);
            }
        }
        Sign::Minus => {
            for (l, s) in word.into_iter().rev() {
                push_reduced(out, l, s.flip());
            }
        }
    }
}

fn walk(p: &PathExpr, sign: Sign, out: &mut Vec<(Letter, Sign)>) -> Result<()> {
    match p {
        PathExpr::Refl { .. } => Ok(()),
        PathExpr::TwoCellSymbol { name } => Err(Error::TwoCellEncountered(name.clone())),
        PathExpr::Gen { shape, node, kind, args, slots } => {
            let args: Vec<Term> = args.iter().map(|t| t.reduce()).collect();
            let slots: Vec<Term> = slots.iter().map(|t| t.reduce()).collect();
            let node_shape = shape.at(node)?.clone();
            let ctx = if node.is_root() {
                None
            } else {
                Some(ctx_of(shape, node, &slots)?)
            };
            push_reduced(
                out,
                Letter { ctx, core: LetterCore::Push { shape: node_shape, kind: *kind, args } },
                sign,
            );
            Ok(())
        }
        PathExpr::Pointedness { map } => {
            if map.refl_pointed {
                return Ok(());
            }
            push_reduced(out, Letter { ctx: None, core: LetterCore::Point { map: map.clone() } }, sign);
            Ok(())
        }
        PathExpr::Inv { inner } => walk(inner, sign.flip(), out),
        PathExpr::Comp { segments } => {
            // Endpoint chaining is checked by `normalize` via `endpoints`.
            match sign {
                Sign::Plus => {
                    for s in segments {
                        walk(s, sign, out)?;
                    }
                }
                Sign::Minus => {
                    for s in segments.iter().rev() {
                        walk(s, sign, out)?;
                    }
                }
            }
            Ok(())
        }
        PathExpr::Ap { map, path } => walk_ap(map, path, sign, out),
        PathExpr::ApCtx { ctx, path } => {
            if ctx.is_pure() {
                let ctx = ctx.reduce();
                let mut tmp = Vec::new();
                walk(path, Sign::Plus, &mut tmp)?;
                let dressed = tmp
                    .into_iter()
                    .map(|(l, s)| (compose_ctx_letter(&ctx, l), s))
                    .collect();
                append_word(out, dressed, sign);
                Ok(())
            } else {
                walk(&expand_under(ctx, path), sign, out)
            }
        }
    }
}

/// Rewrite a context containing `Under` layers into nested `ap`s around pure
/// contexts, outside in.
fn expand_under(ctx: &Ctx, path: &PathExpr) -> PathExpr {
    // Find the outermost Under layer; everything above it is pure.
    fn split(ctx: &Ctx) -> Option<(Ctx, AbstractSym, Ctx)> {
        // Returns (pure outer part with hole where the Under sat, map, inner ctx).
        match ctx {
            Ctx::Hole { .. } => None,
            Ctx::Under { map, ctx: inner } => {
                Some((Ctx::hole(&map.codomain), map.clone(), (**inner).clone()))
            }
            Ctx::PairL { ctx: c, right } => split(c).map(|(outer, m, inner)| {
                (Ctx::PairL { ctx: Box::new(outer), right: right.clone() }, m, inner)
            }),
            Ctx::PairR { left, ctx: c } => split(c).map(|(outer, m, inner)| {
                (Ctx::PairR { left: left.clone(), ctx: Box::new(outer) }, m, inner)
            }),
            Ctx::Tri0 { ctx: c, b, c: cc } => split(c).map(|(outer, m, inner)| {
                (Ctx::Tri0 { ctx: Box::new(outer), b: b.clone(), c: cc.clone() }, m, inner)
            }),
            Ctx::Tri1 { a, ctx: c, c: cc } => split(c).map(|(outer, m, inner)| {
                (Ctx::Tri1 { a: a.clone(), ctx: Box::new(outer), c: cc.clone() }, m, inner)
            }),
            Ctx::Tri2 { a, b, ctx: c } => split(c).map(|(outer, m, inner)| {
                (Ctx::Tri2 { a: a.clone(), b: b.clone(), ctx: Box::new(outer) }, m, inner)
            }),
        }
    }
    match split(ctx) {
        None => term::ap_ctx(ctx.clone(), path.clone()),
        Some((outer, map, inner)) => {
            let inner_expr = term::ap_ctx(inner, path.clone());
            let mapped = ap(&MapDef::Abstract { sym: map }, inner_expr);
            term::ap_ctx(outer, mapped)
        }
    }
}

/// Dress a letter in an additional outer pure context.
fn compose_ctx_letter(outer: &Ctx, letter: Letter) -> Letter {
    if outer.is_hole() {
        return letter;
    }
    let ctx = match letter.ctx {
        Some(inner) => outer.compose(&inner),
        None => outer.clone(),
    };
    Letter { ctx: Some(ctx), core: letter.core }
}

fn walk_ap(map: &MapDef, path: &PathExpr, sign: Sign, out: &mut Vec<(Letter, Sign)>) -> Result<()> {
    match map {
        MapDef::Identity { .. } => walk(path, sign, out),
        MapDef::Composite { stages } => {
            let mut expr = path.clone();
            for s in stages {
                expr = ap(s, expr);
            }
            walk(&expr, sign, out)
        }
        MapDef::Abstract { sym } => {
            let mut tmp = Vec::new();
            walk(path, Sign::Plus, &mut tmp)?;
            let wrapped = tmp
                .into_iter()
                .map(|(l, s)| {
                    (
                        Letter {
                            ctx: None,
                            core: LetterCore::MapApp { map: sym.clone(), inner: Box::new(l) },
                        },
                        s,
                    )
                })
                .collect();
            append_word(out, wrapped, sign);
            Ok(())
        }
        MapDef::Table { table } => {
            let mut tmp = Vec::new();
            walk(path, Sign::Plus, &mut tmp)?;
            let mut mapped: Vec<(Letter, Sign)> = Vec::new();
            for (l, s) in tmp {
                let word = apply_table_letter(table, &l)?;
                append_word(&mut mapped, word, s);
            }
            append_word(out, mapped, sign);
            Ok(())
        }
    }
}

/// Image of a single letter under a clause table, as a reduced word.
fn apply_table_letter(table: &TableMap, letter: &Letter) -> Result<Vec<(Letter, Sign)>> {
    let outer = letter.outer_shape();
    if outer != table.domain {
        return Err(Error::SortMismatch(format!(
            "letter `{}` lives in {}, but table {} expects {}",
            letter, outer, table.name, table.domain
        )));
    }
    match &letter.core {
        LetterCore::Push { kind, args, .. } => {
            let (node, slots) = match &letter.ctx {
                Some(c) => c.decompose()?,
                None => (term::NodePath::root(), Vec::new()),
            };
            let mut hit: Option<PathExpr> = None;
            for row in &table.paths {
                if row.node != node || row.kind != *kind {
                    continue;
                }
                let mut binds = BTreeMap::new();
                if !match_patterns(&row.args, args, &mut binds)?
                    || !match_patterns(&row.slots, &slots, &mut binds)?
                {
                    continue;
                }
                hit = Some(term::substitute_path(&row.value, &binds));
                break;
            }
            let value = hit.ok_or_else(|| {
                Error::UnknownClause(format!(
                    "{}: no path clause for letter `{}`",
                    table.name, letter
                ))
            })?;
            let mut word = Vec::new();
            walk(&value, Sign::Plus, &mut word)?;
            Ok(word)
        }
        LetterCore::Point { .. } | LetterCore::MapApp { .. } => {
            apply_table_opaque(table, letter)
        }
    }
}

fn match_patterns(
    pats: &[term::Pattern],
    terms: &[Term],
    binds: &mut BTreeMap<String, Term>,
) -> Result<bool> {
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

/// The one-hole rule: how a table acts on an opaque letter is read off from
/// its action on a fresh point plugged into the letter's context.
fn apply_table_opaque(table: &TableMap, letter: &Letter) -> Result<Vec<(Letter, Sign)>> {
    let hole_shape = letter.core_shape();
    let hole_leaf = match &hole_shape {
        Shape::Leaf { leaf } => leaf.clone(),
        _ => {
            return Err(Error::NonConstructorInput(format!(
                "table {} cannot act on opaque letter `{}` whose hole has compound shape {}",
                table.name, letter, hole_shape
            )))
        }
    };
    let fresh = Term::Var { name: "#hole".to_string(), sort: hole_leaf };
    let probe = match &letter.ctx {
        Some(c) => c.plug(&fresh),
        None => fresh.clone(),
    };
    let image = eval_point(&MapDef::Table { table: Box::new(table.clone()) }, &probe)?;
    let occurrences = count_var(&image, "#hole");
    match occurrences {
        0 => Ok(Vec::new()),
        1 => {
            let core_letter = Letter { ctx: None, core: letter.core.clone() };
            let rebuilt = rebuild_around_var(&image, "#hole", &core_letter)?;
            Ok(vec![(rebuilt, Sign::Plus)])
        }
        _ => Err(Error::NonConstructorInput(format!(
            "table {} duplicates the hole of letter `{}`; cannot transport an opaque cell",
            table.name, letter
        ))),
    }
}

fn count_var(t: &Term, name: &str) -> usize {
    match t {
        Term::Basepoint { .. } | Term::Element { .. } => 0,
        Term::Var { name: n, .. } => usize::from(n == name),
        Term::Pair { l, r } => count_var(l, name) + count_var(r, name),
        Term::TriplePt { a, b, c } => count_var(a, name) + count_var(b, name) + count_var(c, name),
        Term::AbstractApp { arg, .. } => count_var(arg, name),
    }
}

/// Rebuild the letter context/map layers along the unique path to `name`
/// inside `image`, around `inner`.
fn rebuild_around_var(image: &Term, name: &str, inner: &Letter) -> Result<Letter> {
    if let Term::Var { name: n, .. } = image {
        if n == name {
            return Ok(inner.clone());
        }
    }
    match image {
        Term::Pair { l, r } => {
            if count_var(l, name) == 1 {
                let sub = rebuild_around_var(l, name, inner)?;
                Ok(prepend_layer(sub, |hole| Ctx::PairL { ctx: Box::new(hole), right: (**r).clone() }))
            } else {
                let sub = rebuild_around_var(r, name, inner)?;
                Ok(prepend_layer(sub, |hole| Ctx::PairR { left: (**l).clone(), ctx: Box::new(hole) }))
            }
        }
        Term::TriplePt { a, b, c } => {
            if count_var(a, name) == 1 {
                let sub = rebuild_around_var(a, name, inner)?;
                Ok(prepend_layer(sub, |hole| Ctx::Tri0 {
                    ctx: Box::new(hole),
                    b: (**b).clone(),
                    c: (**c).clone(),
                }))
            } else if count_var(b, name) == 1 {
                let sub = rebuild_around_var(b, name, inner)?;
                Ok(prepend_layer(sub, |hole| Ctx::Tri1 {
                    a: (**a).clone(),
                    ctx: Box::new(hole),
                    c: (**c).clone(),
                }))
            } else {
                let sub = rebuild_around_var(c, name, inner)?;
                Ok(prepend_layer(sub, |hole| Ctx::Tri2 {
                    a: (**a).clone(),
                    b: (**b).clone(),
                    ctx: Box::new(hole),
                }))
            }
        }
        Term::AbstractApp { map, arg } => {
            let sub = rebuild_around_var(arg, name, inner)?;
            Ok(Letter { ctx: None, core: LetterCore::MapApp { map: map.clone(), inner: Box::new(sub) } })
        }
        _ => Err(Error::NonConstructorInput(format!(
            "cannot locate transported cell inside `{}`",
            image
        ))),
    }
}

fn prepend_layer<F: FnOnce(Ctx) -> Ctx>(letter: Letter, layer: F) -> Letter {
    let inner_ctx = match letter.ctx {
        Some(c) => c,
        None => Ctx::hole(&letter_core_shape(&letter.core)),
    };
    Letter { ctx: Some(layer(inner_ctx)), core: letter.core }
}

fn letter_core_shape(core: &LetterCore) -> Shape {
    match core {
        LetterCore::Push { shape, .. } => shape.clone(),
        LetterCore::Point { map } => map.codomain.clone(),
        LetterCore::MapApp { map, .. } => map.codomain.clone(),
    }
}

// ---------------------------------------------------------------------------
// Embedding back into expressions
// ---------------------------------------------------------------------------

/// Read a normal word back as a path expression. Normalizing the result
/// reproduces the word (normalization is idempotent through `embed`).
pub fn embed(word: &NormalWord) -> PathExpr {
    if word.letters.is_empty() {
        return refl(word.source.clone());
    }
    let exprs: Vec<PathExpr> = word
        .letters
        .iter()
        .map(|sl| {
            let e = letter_expr(&sl.letter);
            match sl.sign {
                Sign::Plus => e,
                Sign::Minus => inv(e),
            }
        })
        .collect();
    if exprs.len() == 1 {
        exprs.into_iter().next().unwrap()
    } else {
        comp(exprs)
    }
}

fn letter_expr(l: &Letter) -> PathExpr {
    let core = match &l.core {
        LetterCore::Push { shape, kind, args } => {
            gen(shape, term::NodePath::root(), *kind, args.clone(), vec![])
        }
        LetterCore::Point { map } => PathExpr::Pointedness { map: map.clone() },
        LetterCore::MapApp { map, inner } => ap(
            &MapDef::Abstract { sym: map.clone() },
            letter_expr(inner),
        ),
    };
    match &l.ctx {
        Some(c) => term::ap_ctx(c.clone(), core),
        None => core,
    }
}

/// Evaluate `ap` of a map on a path and return the result as an expression.
pub fn ap_eval(m: &MapDef, p: &PathExpr) -> Result<PathExpr> {
    Ok(embed(&normalize(&ap(m, p.clone()))?))
}

/// Evaluate a context application on a path and return an expression.
pub fn ap_eval_ctx(c: &Ctx, p: &PathExpr) -> Result<PathExpr> {
    Ok(embed(&normalize(&term::ap_ctx(c.clone(), p.clone()))?))
}

// ---------------------------------------------------------------------------
// Squares
// ---------------------------------------------------------------------------

/// Decide whether a square commutes in the free groupoid: corners must
/// chain, and `left^-1 . top . right` must reduce to the same word as
/// `bottom`, letter for letter.
pub fn refl_fillable(sq: &term::Square) -> Result<bool> {
    sq.corners()?;
    let lhs = normalize(&comp(vec![inv(sq.left.clone()), sq.top.clone(), sq.right.clone()]))?;
    let rhs = normalize(&sq.bottom)?;
    Ok(lhs.letters == rhs.letters)
}

/// The two boundary words compared by `refl_fillable`, for reporting.
pub fn boundary_words(sq: &term::Square) -> Result<(NormalWord, NormalWord)> {
    let lhs = normalize(&comp(vec![inv(sq.left.clone()), sq.top.clone(), sq.right.clone()]))?;
    let rhs = normalize(&sq.bottom)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{leaf, pair, smash, var, Leaf, NodePath, Square, Step};

    fn ab() -> Shape {
        smash(leaf("A"), leaf("B"))
    }

    fn a_var() -> Term {
        var("a", &Leaf::generic("A"))
    }

    #[test]
    fn refl_normalizes_to_empty_word() {
        let w = normalize(&refl(basepoint(&ab()))).unwrap();
        assert!(w.is_refl());
        assert_eq!(w.source, basepoint(&ab()));
    }

    #[test]
    fn adjacent_inverses_cancel() {
        let p = term::root_gen(&ab(), PushKind::PushL, vec![a_var()]);
        let w = normalize(&comp(vec![p.clone(), inv(p.clone())])).unwrap();
        assert!(w.is_refl());
        // And the doubled word does not cancel.
        let w2 = normalize(&comp(vec![p.clone(), inv(p.clone()), p])).unwrap();
        assert_eq!(w2.letters.len(), 1);
    }

    #[test]
    fn inverse_of_composite_reverses_letters() {
        let pl = term::root_gen(&ab(), PushKind::PushL, vec![a_var()]);
        let pr = term::root_gen(&ab(), PushKind::PushR, vec![var("b", &Leaf::generic("B"))]);
        let p = comp(vec![pl, inv(pr)]);
        let w = normalize(&inv(p)).unwrap();
        assert_eq!(w.letters.len(), 2);
        assert_eq!(w.letters[0].sign, Sign::Plus); // pr first
        assert_eq!(w.letters[1].sign, Sign::Minus); // then pl^-1
        assert!(w.letters[0].letter.to_string().starts_with("pr"));
    }

    #[test]
    fn ap_identity_is_transparent() {
        let p = term::root_gen(&ab(), PushKind::PushL, vec![a_var()]);
        let w1 = normalize(&p).unwrap();
        let w2 = normalize(&ap(&MapDef::identity(&ab()), p)).unwrap();
        assert_eq!(w1, w2);
    }

    #[test]
    fn ap_abstract_wraps_letters() {
        let f = AbstractSym {
            name: "f".to_string(),
            domain: ab(),
            codomain: leaf("X"),
            refl_pointed: true,
        };
        let p = term::root_gen(&ab(), PushKind::PushL, vec![a_var()]);
        let w = normalize(&ap(&MapDef::Abstract { sym: f }, p)).unwrap();
        assert_eq!(w.letters.len(), 1);
        assert_eq!(w.letters[0].letter.to_string(), "ap[f](pl(a))");
    }

    #[test]
    fn ap_ctx_dresses_letters() {
        let sh = smash(ab(), leaf("C"));
        let c = var("c", &Leaf::generic("C"));
        let ctx = Ctx::PairL { ctx: Box::new(Ctx::hole(&ab())), right: c.clone() };
        let p = term::root_gen(&ab(), PushKind::PushL, vec![a_var()]);
        let w = normalize(&term::ap_ctx(ctx, p)).unwrap();
        assert_eq!(w.letters.len(), 1);
        let l = &w.letters[0].letter;
        assert_eq!(l.to_string(), "ap{<-, c>}(pl(a))");
        let (s, t) = l.letter_endpoints().unwrap();
        assert_eq!(s, pair(pair(a_var(), basepoint(&leaf("B"))), c.clone()));
        assert_eq!(t, pair(basepoint(&ab()), c));
        let _ = sh;
    }

    #[test]
    fn gen_with_slots_equals_ap_ctx_of_root_gen() {
        let sh = smash(ab(), leaf("C"));
        let c = var("c", &Leaf::generic("C"));
        let nested = term::gen(&sh, NodePath(vec![Step::L]), PushKind::PushL, vec![a_var()], vec![c.clone()]);
        let ctx = Ctx::PairL { ctx: Box::new(Ctx::hole(&ab())), right: c };
        let dressed = term::ap_ctx(ctx, term::root_gen(&ab(), PushKind::PushL, vec![a_var()]));
        assert_eq!(normalize(&nested).unwrap(), normalize(&dressed).unwrap());
    }

    #[test]
    fn under_context_becomes_map_application() {
        let f = AbstractSym {
            name: "f".to_string(),
            domain: ab(),
            codomain: leaf("X"),
            refl_pointed: true,
        };
        let sh = smash(leaf("X"), leaf("C"));
        let ctx = Ctx::PairL {
            ctx: Box::new(Ctx::Under { map: f, ctx: Box::new(Ctx::hole(&ab())) }),
            right: var("c", &Leaf::generic("C")),
        };
        let p = term::root_gen(&ab(), PushKind::PushL, vec![a_var()]);
        let w = normalize(&term::ap_ctx(ctx, p)).unwrap();
        assert_eq!(w.letters.len(), 1);
        assert_eq!(w.letters[0].letter.to_string(), "ap{<-, c>}(ap[f](pl(a)))");
        let _ = sh;
    }

    #[test]
    fn two_cells_are_opaque() {
        let p = PathExpr::TwoCellSymbol { name: "glue2".to_string() };
        assert!(matches!(normalize(&p), Err(Error::TwoCellEncountered(_))));
    }

    #[test]
    fn embed_roundtrips() {
        let pl = term::root_gen(&ab(), PushKind::PushL, vec![a_var()]);
        let pr = term::root_gen(&ab(), PushKind::PushR, vec![var("b", &Leaf::generic("B"))]);
        let p = comp(vec![pl, inv(pr)]);
        let w = normalize(&p).unwrap();
        let w2 = normalize(&embed(&w)).unwrap();
        assert_eq!(w, w2);
    }

    #[test]
    fn degenerate_square_with_refl_sides_is_fillable() {
        let p = term::root_gen(&ab(), PushKind::PushL, vec![a_var()]);
        let (s, t) = endpoints(&p).unwrap();
        let sq = Square {
            top: p.clone(),
            bottom: p.clone(),
            left: refl(s),
            right: refl(t),
        };
        assert!(refl_fillable(&sq).unwrap());
    }

    #[test]
    fn mismatched_square_is_not_fillable() {
        let p = term::root_gen(&ab(), PushKind::PushL, vec![a_var()]);
        let q = comp(vec![
            p.clone(),
            inv(term::root_gen(&ab(), PushKind::PushR, vec![var("b", &Leaf::generic("B"))])),
            term::root_gen(&ab(), PushKind::PushR, vec![var("b", &Leaf::generic("B"))]),
        ]);
        // q normalizes to the same word as p, so this *is* fillable...
        let (s, t) = endpoints(&p).unwrap();
        let sq = Square { top: p.clone(), bottom: q, left: refl(s.clone()), right: refl(t.clone()) };
        assert!(refl_fillable(&sq).unwrap());
        // ...whereas swapping bottom for a genuinely different word is not.
        let other = term::root_gen(&ab(), PushKind::PushL, vec![basepoint(&leaf("A"))]);
        let sq2 = Square {
            top: term::root_gen(&ab(), PushKind::PushL, vec![a_var()]),
            bottom: comp(vec![
                term::root_gen(&ab(), PushKind::PushL, vec![a_var()]),
                inv(other.clone()),
                other,
            ]),
            left: refl(s),
            right: refl(t),
        };
        // bottom reduces to pl(a) as well; build an honest mismatch instead:
        assert!(refl_fillable(&sq2).unwrap());
        // pl(*A) and pr(*B) share endpoints but are distinct letters, so a
        // square with refl verticals between them must not fill.
        let sq3 = Square {
            top: term::root_gen(&ab(), PushKind::PushL, vec![basepoint(&leaf("A"))]),
            bottom: term::root_gen(&ab(), PushKind::PushR, vec![basepoint(&leaf("B"))]),
            left: refl(pair(basepoint(&leaf("A")), basepoint(&leaf("B")))),
            right: refl(basepoint(&ab())),
        };
        assert!(!refl_fillable(&sq3).unwrap());
    }
}
