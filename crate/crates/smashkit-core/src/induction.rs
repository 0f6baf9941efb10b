//! Square obligations for homotopies between maps off smash shapes.
//!
//! A [`Homotopy`] stores a candidate identification of two parallel maps as a
//! clause table: one path per non-basepoint pattern of the domain, plus a
//! basepoint path. Whether the table actually extends to the whole domain is
//! decided by *square obligations*: boundary squares whose two ways around
//! must normalize to the same word in the free groupoid. The obligation
//! generators here come in three flavors, keyed by how the domain is split:
//!
//! - [`obligations_binary`]: one constancy square per proper pattern of each
//!   factor of a two-factor domain — conjugating the homotopy by a glue
//!   generator must not depend on the generator's argument.
//! - [`obligations_triple`] / [`obligations_quadruple`]: the square families
//!   for domains split as `(A ^ B) ^ C` and `((A ^ B) ^ C) ^ D` with leaf
//!   slots. Each square transports the homotopy along a column of glue paths
//!   connecting two strata of the case split.
//! - [`pointedness_obligation`]: the single square tying the basepoint row to
//!   the pointedness paths of the two maps, along the canonical ladder from
//!   the all-basepoint tuple down to the basepoint.
//!
//! Obligations are discharged by [`discharge`]: a square passes when the
//! composite `left^-1 . top . right` and `bottom` normalize to the same word
//! (the square can be filled by reflexivity after normalization).
//!
//! The second half of the module is the *iterated cofibre builder*: a
//! [`FsHomotopy`] holds only a full-tuple row and a basepoint row, and
//! [`FsHomotopy::build`] manufactures the remaining rows after discharging one
//! case square per leaf (collapse that leaf to the basepoint) plus one
//! basepoint-compatibility square. The finite combinatorics of the same
//! construction — the staged element enumeration [`FsElem`] with its
//! coordinate projection and canonical null paths — is used by the finite
//! model and by tests.
//!
//! Design notes:
//! - Squares never invent fillers: every `top`/`bottom`/`left`/`right` is a
//!   closed path expression, and fillability is a word equality after
//!   normalization, nothing weaker.
//! - Obligation tags are stable, behavior-describing strings (`constancy-L`,
//!   `item-iv`, `pointedness`, `case-2`); reports sort by tag, then by the
//!   quantified variable display.
//! - All generators require the domain's leaf names to be pairwise distinct,
//!   which keeps pattern variables from aliasing.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::maps::{build_table, pointedness_path};
use crate::normalize::boundary_words;
use crate::term::{
    ap, ap_ctx, basepoint, check_distinct_leaves, comp, endpoints, eval_point, gen, inv, pair,
    proper_patterns, refl, root_gen, substitute_path, triple_pt, var, Ctx, Leaf, MapDef, NodePath,
    PathExpr, Pattern, PushKind, Shape, Square, Step, Term,
};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Homotopies as clause tables
// ---------------------------------------------------------------------------

/// A pointwise identification of two parallel maps, given as one path per
/// non-basepoint pattern of the domain plus a basepoint path. Rows are
/// syntactic: looking up a point substitutes the matched variables into the
/// stored expression.
#[derive(Debug, Clone)]
pub struct Homotopy {
    pub f: MapDef,
    pub g: MapDef,
    /// One row per proper pattern of the domain; the row value is a path from
    /// `f` to `g` at that pattern's term.
    pub points: Vec<(Pattern, PathExpr)>,
    /// The path `f(*) = g(*)` at the domain basepoint.
    pub basepoint: PathExpr,
}

impl Homotopy {
    /// The reflexivity homotopy between maps that agree pointwise on every
    /// pattern of their common domain. Fails if the maps differ on any point,
    /// so a successful return is already a pointwise-agreement certificate.
    pub fn refl(f: &MapDef, g: &MapDef) -> Result<Homotopy> {
        let dom = f.domain();
        let mut points = Vec::new();
        for p in proper_patterns(&dom) {
            let at = eval_point(f, &p.to_term())?;
            points.push((p, refl(at)));
        }
        let h = Homotopy {
            f: f.clone(),
            g: g.clone(),
            points,
            basepoint: refl(eval_point(f, &basepoint(&dom))?),
        };
        h.validate()?;
        Ok(h)
    }

    /// Look up the row matching a point and instantiate it.
    pub fn value_at(&self, t: &Term) -> Result<PathExpr> {
        let t = t.reduce();
        if t == basepoint(&self.f.domain()) {
            return Ok(self.basepoint.clone());
        }
        for (pat, value) in &self.points {
            let mut binds = BTreeMap::new();
            if pat.matches(&t, &mut binds)? {
                return Ok(substitute_path(value, &binds));
            }
        }
        Err(Error::UnknownClause(format!("homotopy has no row for `{}`", t)))
    }

    /// Check shape agreement, row totality (exactly one row per proper
    /// pattern) and that every row runs from `f`'s value to `g`'s value.
    pub fn validate(&self) -> Result<()> {
        let dom = self.f.domain();
        if dom != self.g.domain() {
            return Err(Error::ShapeMismatch(format!(
                "homotopy between maps with different domains `{}` and `{}`",
                dom,
                self.g.domain()
            )));
        }
        if self.f.codomain() != self.g.codomain() {
            return Err(Error::ShapeMismatch(format!(
                "homotopy between maps with different codomains `{}` and `{}`",
                self.f.codomain(),
                self.g.codomain()
            )));
        }
        check_distinct_leaves(&dom)?;
        let proper = proper_patterns(&dom);
        if proper.len() != self.points.len() {
            return Err(Error::Invalid(format!(
                "homotopy on `{}` needs {} point rows, found {}",
                dom,
                proper.len(),
                self.points.len()
            )));
        }
        for p in &proper {
            let t = p.to_term();
            let mut hits = 0usize;
            for (pat, _) in &self.points {
                let mut binds = BTreeMap::new();
                if pat.matches(&t, &mut binds)? {
                    hits += 1;
                }
            }
            if hits != 1 {
                return Err(Error::Invalid(format!(
                    "pattern `{}` is matched by {} homotopy rows, want exactly 1",
                    p, hits
                )));
            }
        }
        for (pat, value) in &self.points {
            let t = pat.to_term();
            let (src, tgt) = endpoints(value)?;
            let want_src = eval_point(&self.f, &t)?;
            let want_tgt = eval_point(&self.g, &t)?;
            if src != want_src || tgt != want_tgt {
                return Err(Error::IllChained {
                    at: format!("row `{}`: `{}` -> `{}`", pat, want_src, want_tgt),
                    next: format!("`{}` -> `{}`", src, tgt),
                });
            }
        }
        let (src, tgt) = endpoints(&self.basepoint)?;
        let want_src = eval_point(&self.f, &basepoint(&dom))?;
        let want_tgt = eval_point(&self.g, &basepoint(&dom))?;
        if src != want_src || tgt != want_tgt {
            return Err(Error::IllChained {
                at: format!("basepoint row: `{}` -> `{}`", want_src, want_tgt),
                next: format!("`{}` -> `{}`", src, tgt),
            });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Obligations and reports
// ---------------------------------------------------------------------------

/// A single boundary square that must be fillable by reflexivity after
/// normalization.
#[derive(Debug, Clone)]
pub struct Obligation {
    pub tag: String,
    /// Display of the quantified instance the square was generated at.
    pub vars: String,
    pub square: Square,
}

/// The outcome of normalizing one obligation's boundary.
#[derive(Debug, Clone, Serialize)]
pub struct ObligationReport {
    pub tag: String,
    pub vars: String,
    pub fillable: bool,
    /// Normal word of `left^-1 . top . right`.
    pub lhs_word: String,
    /// Normal word of `bottom`.
    pub rhs_word: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// All obligation outcomes for one check, sorted by tag then instance.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub entries: Vec<ObligationReport>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.fillable)
    }

    pub fn first_failure(&self) -> Option<&ObligationReport> {
        self.entries.iter().find(|e| !e.fillable)
    }
}

/// Normalize each obligation's two boundary composites and compare their
/// words. Malformed squares (mismatched corners, opaque 2-cells in a position
/// that must be evaluated) are reported as non-fillable with the error kept.
pub fn discharge(obligations: &[Obligation]) -> Report {
    let mut entries: Vec<ObligationReport> = obligations
        .iter()
        .map(|ob| {
            let words = ob.square.corners().and_then(|_| boundary_words(&ob.square));
            match words {
                Ok((lhs, rhs)) => ObligationReport {
                    tag: ob.tag.clone(),
                    vars: ob.vars.clone(),
                    fillable: lhs.letters == rhs.letters,
                    lhs_word: lhs.to_string(),
                    rhs_word: rhs.to_string(),
                    error: None,
                },
                Err(e) => ObligationReport {
                    tag: ob.tag.clone(),
                    vars: ob.vars.clone(),
                    fillable: false,
                    lhs_word: String::new(),
                    rhs_word: String::new(),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    entries.sort_by(|a, b| (a.tag.as_str(), a.vars.as_str()).cmp(&(b.tag.as_str(), b.vars.as_str())));
    Report { entries }
}

/// Turn the first failing entry of a report into an error.
pub fn ensure(report: &Report) -> Result<()> {
    match report.first_failure() {
        None => Ok(()),
        Some(e) => Err(Error::ObligationFailed {
            tag: e.tag.clone(),
            detail: e
                .error
                .clone()
                .unwrap_or_else(|| format!("boundary words differ: `{}` vs `{}`", e.lhs_word, e.rhs_word)),
        }),
    }
}

// ---------------------------------------------------------------------------
// Binary constancy squares
// ---------------------------------------------------------------------------

fn smash_parts(shape: &Shape) -> Result<(Shape, Shape)> {
    match shape {
        Shape::Smash { left, right } => Ok((left.as_ref().clone(), right.as_ref().clone())),
        _ => Err(Error::ShapeMismatch(format!("expected a two-factor shape, got `{}`", shape))),
    }
}

fn leaf_of(shape: &Shape) -> Result<Leaf> {
    match shape {
        Shape::Leaf { leaf } => Ok(leaf.clone()),
        _ => Err(Error::ShapeMismatch(format!("expected a leaf, got `{}`", shape))),
    }
}

/// Constancy squares for a homotopy on a two-factor domain `L ^ R`: for each
/// proper pattern `q` of `L`, conjugating the row at `<q, *>` by the glue
/// `pl(q)` must equal the same composite at `q := *` (and symmetrically for
/// `R` with `pr`). The shared walls are reflexivity at the basepoint images.
pub fn obligations_binary(h: &Homotopy) -> Result<Vec<Obligation>> {
    let dom = h.f.domain();
    let (l, r) = smash_parts(&dom)?;
    let f_star = eval_point(&h.f, &basepoint(&dom))?;
    let g_star = eval_point(&h.g, &basepoint(&dom))?;
    let seg = |kind: PushKind, u: &Term| -> Result<PathExpr> {
        let push = root_gen(&dom, kind, vec![u.clone()]);
        let at = match kind {
            PushKind::PushL => pair(u.clone(), basepoint(&r)),
            _ => pair(basepoint(&l), u.clone()),
        };
        Ok(comp(vec![inv(ap(&h.f, push.clone())), h.value_at(&at)?, ap(&h.g, push)]))
    };
    let mut out = Vec::new();
    for (kind, factor, label) in [(PushKind::PushL, &l, "L"), (PushKind::PushR, &r, "R")] {
        let pats = proper_patterns(factor);
        let bottom = seg(kind, &basepoint(factor))?;
        for q in &pats {
            let tag = if pats.len() == 1 {
                format!("constancy-{}", label)
            } else {
                format!("constancy-{}[{}]", label, q)
            };
            out.push(Obligation {
                tag,
                vars: q.to_string(),
                square: Square {
                    top: seg(kind, &q.to_term())?,
                    bottom: bottom.clone(),
                    left: refl(f_star.clone()),
                    right: refl(g_star.clone()),
                },
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Square families for leaf-slot domains (A ^ B) ^ C and ((A ^ B) ^ C) ^ D
// ---------------------------------------------------------------------------

fn vars_display(terms: &[&Term]) -> String {
    terms.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
}

/// Square with the homotopy rows on top/bottom and a transported glue column
/// on the walls: `column` runs from the bottom tuple to the top tuple in the
/// domain, and both walls push it forward along `f` and `g`.
fn column_square(h: &Homotopy, column: PathExpr, bottom_at: &Term, top_at: &Term) -> Result<Square> {
    Ok(Square {
        top: h.value_at(top_at)?,
        bottom: h.value_at(bottom_at)?,
        left: inv(ap(&h.f, column.clone())),
        right: inv(ap(&h.g, column)),
    })
}

/// The five-square family for a domain split as `(A ^ B) ^ C` with leaf
/// slots. The items connect the strata of the case split in the order: the
/// trivial square at a full tuple, the two inner collapses (first or second
/// slot to basepoint, third fixed), the full collapse of the inner pair, and
/// the outer wall collapse.
pub fn obligations_triple(h: &Homotopy) -> Result<Vec<Obligation>> {
    let dom = h.f.domain();
    check_distinct_leaves(&dom)?;
    let (lab, lc) = smash_parts(&dom)?;
    let (la, lb) = smash_parts(&lab)?;
    for s in [&la, &lb, &lc] {
        leaf_of(s)?;
    }
    let (sa, sb, sc) = (basepoint(&la), basepoint(&lb), basepoint(&lc));
    let sab = basepoint(&lab);
    let tup = |x: &Term, y: &Term, z: &Term| pair(pair(x.clone(), y.clone()), z.clone());
    let n_l = NodePath(vec![Step::L]);
    let mut out = Vec::new();

    let (pa, pb, pc) = (proper_patterns(&la), proper_patterns(&lb), proper_patterns(&lc));

    // item-i: the degenerate square at a full tuple.
    for a in &pa {
        for b in &pb {
            for c in &pc {
                let (ta, tb, tc) = (a.to_term(), b.to_term(), c.to_term());
                let t = tup(&ta, &tb, &tc);
                out.push(Obligation {
                    tag: "item-i".into(),
                    vars: vars_display(&[&ta, &tb, &tc]),
                    square: column_square(h, refl(t.clone()), &t, &t)?,
                });
            }
        }
    }
    // item-ii: collapse the first slot inside the inner pair.
    for a in &pa {
        for c in &pc {
            let (ta, tc) = (a.to_term(), c.to_term());
            let column = comp(vec![
                gen(&dom, n_l.clone(), PushKind::PushL, vec![ta.clone()], vec![tc.clone()]),
                inv(gen(&dom, n_l.clone(), PushKind::PushL, vec![sa.clone()], vec![tc.clone()])),
            ]);
            out.push(Obligation {
                tag: "item-ii".into(),
                vars: vars_display(&[&ta, &tc]),
                square: column_square(h, column, &tup(&ta, &sb, &tc), &tup(&sa, &sb, &tc))?,
            });
        }
    }
    // item-iii: collapse the second slot inside the inner pair.
    for b in &pb {
        for c in &pc {
            let (tb, tc) = (b.to_term(), c.to_term());
            let column = comp(vec![
                gen(&dom, n_l.clone(), PushKind::PushR, vec![tb.clone()], vec![tc.clone()]),
                inv(gen(&dom, n_l.clone(), PushKind::PushR, vec![sb.clone()], vec![tc.clone()])),
            ]);
            out.push(Obligation {
                tag: "item-iii".into(),
                vars: vars_display(&[&tb, &tc]),
                square: column_square(h, column, &tup(&sa, &tb, &tc), &tup(&sa, &sb, &tc))?,
            });
        }
    }
    // item-iv: collapse a full inner pair through the outer glue.
    for a in &pa {
        for b in &pb {
            let (ta, tb) = (a.to_term(), b.to_term());
            let column = comp(vec![
                root_gen(&dom, PushKind::PushL, vec![pair(ta.clone(), tb.clone())]),
                inv(root_gen(&dom, PushKind::PushL, vec![sab.clone()])),
                inv(gen(&dom, n_l.clone(), PushKind::PushR, vec![sb.clone()], vec![sc.clone()])),
            ]);
            out.push(Obligation {
                tag: "item-iv".into(),
                vars: vars_display(&[&ta, &tb]),
                square: column_square(h, column, &tup(&ta, &tb, &sc), &tup(&sa, &sb, &sc))?,
            });
        }
    }
    // item-v: collapse the outer slot along the wall.
    for c in &pc {
        let tc = c.to_term();
        let column = comp(vec![
            gen(&dom, n_l.clone(), PushKind::PushR, vec![sb.clone()], vec![tc.clone()]),
            root_gen(&dom, PushKind::PushR, vec![tc.clone()]),
            inv(root_gen(&dom, PushKind::PushL, vec![sab.clone()])),
            inv(gen(&dom, n_l.clone(), PushKind::PushR, vec![sb.clone()], vec![sc.clone()])),
        ]);
        out.push(Obligation {
            tag: "item-v".into(),
            vars: vars_display(&[&tc]),
            square: column_square(h, column, &tup(&sa, &sb, &tc), &tup(&sa, &sb, &sc))?,
        });
    }
    Ok(out)
}

/// The seven-square family for a domain split as `((A ^ B) ^ C) ^ D` with
/// leaf slots.
pub fn obligations_quadruple(h: &Homotopy) -> Result<Vec<Obligation>> {
    let dom = h.f.domain();
    check_distinct_leaves(&dom)?;
    let (labc, ld) = smash_parts(&dom)?;
    let (lab, lc) = smash_parts(&labc)?;
    let (la, lb) = smash_parts(&lab)?;
    for s in [&la, &lb, &lc, &ld] {
        leaf_of(s)?;
    }
    let (sa, sb, sc, sd) = (basepoint(&la), basepoint(&lb), basepoint(&lc), basepoint(&ld));
    let sab = basepoint(&lab);
    let sabc = basepoint(&labc);
    let tup = |w: &Term, x: &Term, y: &Term, z: &Term| {
        pair(pair(pair(w.clone(), x.clone()), y.clone()), z.clone())
    };
    let n_l = NodePath(vec![Step::L]);
    let n_ll = NodePath(vec![Step::L, Step::L]);
    let mut out = Vec::new();

    let (pa, pb, pc, pd) = (
        proper_patterns(&la),
        proper_patterns(&lb),
        proper_patterns(&lc),
        proper_patterns(&ld),
    );

    // item-i: the degenerate square at a full tuple.
    for a in &pa {
        for b in &pb {
            for c in &pc {
                for d in &pd {
                    let (ta, tb, tc, td) = (a.to_term(), b.to_term(), c.to_term(), d.to_term());
                    let t = tup(&ta, &tb, &tc, &td);
                    out.push(Obligation {
                        tag: "item-i".into(),
                        vars: vars_display(&[&ta, &tb, &tc, &td]),
                        square: column_square(h, refl(t.clone()), &t, &t)?,
                    });
                }
            }
        }
    }
    // item-ii: collapse a full inner pair through the middle glue.
    for a in &pa {
        for b in &pb {
            for d in &pd {
                let (ta, tb, td) = (a.to_term(), b.to_term(), d.to_term());
                let column = comp(vec![
                    gen(&dom, n_l.clone(), PushKind::PushL, vec![pair(ta.clone(), tb.clone())], vec![td.clone()]),
                    inv(gen(&dom, n_l.clone(), PushKind::PushL, vec![sab.clone()], vec![td.clone()])),
                    inv(gen(&dom, n_ll.clone(), PushKind::PushR, vec![sb.clone()], vec![sc.clone(), td.clone()])),
                ]);
                out.push(Obligation {
                    tag: "item-ii".into(),
                    vars: vars_display(&[&ta, &tb, &td]),
                    square: column_square(h, column, &tup(&ta, &tb, &sc, &td), &tup(&sa, &sb, &sc, &td))?,
                });
            }
        }
    }
    // item-iii: collapse the first slot of the innermost pair.
    for a in &pa {
        for c in &pc {
            for d in &pd {
                let (ta, tc, td) = (a.to_term(), c.to_term(), d.to_term());
                let column = comp(vec![
                    gen(&dom, n_ll.clone(), PushKind::PushL, vec![ta.clone()], vec![tc.clone(), td.clone()]),
                    inv(gen(&dom, n_ll.clone(), PushKind::PushL, vec![sa.clone()], vec![tc.clone(), td.clone()])),
                ]);
                out.push(Obligation {
                    tag: "item-iii".into(),
                    vars: vars_display(&[&ta, &tc, &td]),
                    square: column_square(h, column, &tup(&ta, &sb, &tc, &td), &tup(&sa, &sb, &tc, &td))?,
                });
            }
        }
    }
    // item-iv: collapse the second slot of the innermost pair.
    for b in &pb {
        for c in &pc {
            for d in &pd {
                let (tb, tc, td) = (b.to_term(), c.to_term(), d.to_term());
                let column = comp(vec![
                    gen(&dom, n_ll.clone(), PushKind::PushR, vec![tb.clone()], vec![tc.clone(), td.clone()]),
                    inv(gen(&dom, n_ll.clone(), PushKind::PushR, vec![sb.clone()], vec![tc.clone(), td.clone()])),
                ]);
                out.push(Obligation {
                    tag: "item-iv".into(),
                    vars: vars_display(&[&tb, &tc, &td]),
                    square: column_square(h, column, &tup(&sa, &tb, &tc, &td), &tup(&sa, &sb, &tc, &td))?,
                });
            }
        }
    }
    // item-v: collapse the middle slot along the inner wall.
    for c in &pc {
        for d in &pd {
            let (tc, td) = (c.to_term(), d.to_term());
            let column = comp(vec![
                gen(&dom, n_ll.clone(), PushKind::PushR, vec![sb.clone()], vec![tc.clone(), td.clone()]),
                gen(&dom, n_l.clone(), PushKind::PushR, vec![tc.clone()], vec![td.clone()]),
                inv(gen(&dom, n_l.clone(), PushKind::PushL, vec![sab.clone()], vec![td.clone()])),
                inv(gen(&dom, n_ll.clone(), PushKind::PushR, vec![sb.clone()], vec![sc.clone(), td.clone()])),
            ]);
            out.push(Obligation {
                tag: "item-v".into(),
                vars: vars_display(&[&tc, &td]),
                square: column_square(h, column, &tup(&sa, &sb, &tc, &td), &tup(&sa, &sb, &sc, &td))?,
            });
        }
    }
    // item-vi: collapse the outer slot along the full wall.
    for d in &pd {
        let td = d.to_term();
        let column = comp(vec![
            gen(&dom, n_ll.clone(), PushKind::PushL, vec![sa.clone()], vec![sc.clone(), td.clone()]),
            gen(&dom, n_l.clone(), PushKind::PushL, vec![sab.clone()], vec![td.clone()]),
            root_gen(&dom, PushKind::PushR, vec![td.clone()]),
            inv(root_gen(&dom, PushKind::PushL, vec![sabc.clone()])),
            inv(gen(&dom, n_l.clone(), PushKind::PushL, vec![sab.clone()], vec![sd.clone()])),
            inv(gen(&dom, n_ll.clone(), PushKind::PushL, vec![sa.clone()], vec![sc.clone(), sd.clone()])),
        ]);
        out.push(Obligation {
            tag: "item-vi".into(),
            vars: vars_display(&[&td]),
            square: column_square(h, column, &tup(&sa, &sb, &sc, &td), &tup(&sa, &sb, &sc, &sd))?,
        });
    }
    // item-vii: collapse a full inner triple through the outer glue.
    for a in &pa {
        for b in &pb {
            for c in &pc {
                let (ta, tb, tc) = (a.to_term(), b.to_term(), c.to_term());
                let column = comp(vec![
                    root_gen(&dom, PushKind::PushL, vec![pair(pair(ta.clone(), tb.clone()), tc.clone())]),
                    inv(root_gen(&dom, PushKind::PushL, vec![sabc.clone()])),
                    inv(gen(&dom, n_l.clone(), PushKind::PushL, vec![sab.clone()], vec![sd.clone()])),
                    inv(gen(&dom, n_ll.clone(), PushKind::PushL, vec![sa.clone()], vec![sc.clone(), sd.clone()])),
                ]);
                out.push(Obligation {
                    tag: "item-vii".into(),
                    vars: vars_display(&[&ta, &tb, &tc]),
                    square: column_square(h, column, &tup(&ta, &tb, &tc, &sd), &tup(&sa, &sb, &sc, &sd))?,
                });
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Pointedness square
// ---------------------------------------------------------------------------

/// The tuple of basepoints with the same tree structure as the shape. For a
/// compound shape this is a constructor point distinct from the basepoint.
pub fn all_basepoint_tuple(shape: &Shape) -> Term {
    match shape {
        Shape::Leaf { .. } => basepoint(shape),
        Shape::Smash { left, right } => pair(all_basepoint_tuple(left), all_basepoint_tuple(right)),
        Shape::Triple { a, b, c } => {
            triple_pt(all_basepoint_tuple(a), all_basepoint_tuple(b), all_basepoint_tuple(c))
        }
    }
}

/// The canonical ladder from the all-basepoint tuple down to the basepoint:
/// descend into the left factor, then take the left glue when the right
/// factor is a leaf and the right glue at its all-basepoint tuple otherwise.
pub fn basepoint_ladder(shape: &Shape) -> PathExpr {
    match shape {
        Shape::Leaf { .. } => refl(basepoint(shape)),
        Shape::Smash { left, right } => {
            let inner = basepoint_ladder(left);
            let hop = if right.is_leaf() {
                root_gen(shape, PushKind::PushL, vec![basepoint(left)])
            } else {
                root_gen(shape, PushKind::PushR, vec![all_basepoint_tuple(right)])
            };
            comp(vec![
                ap_ctx(
                    Ctx::PairL { ctx: Box::new(Ctx::hole(left)), right: all_basepoint_tuple(right) },
                    inner,
                ),
                hop,
            ])
        }
        Shape::Triple { a, b, c } => comp(vec![
            ap_ctx(
                Ctx::Tri0 {
                    ctx: Box::new(Ctx::hole(a)),
                    b: all_basepoint_tuple(b),
                    c: all_basepoint_tuple(c),
                },
                basepoint_ladder(a),
            ),
            root_gen(shape, PushKind::Push0, vec![all_basepoint_tuple(b), all_basepoint_tuple(c)]),
        ]),
    }
}

/// The square tying the basepoint row of a homotopy to the pointedness paths
/// of its two maps, transported along the basepoint ladder.
pub fn pointedness_obligation(h: &Homotopy) -> Result<Obligation> {
    let dom = h.f.domain();
    let ladder = basepoint_ladder(&dom);
    Ok(Obligation {
        tag: "pointedness".into(),
        vars: String::new(),
        square: Square {
            top: comp(vec![pointedness_path(&h.f), inv(pointedness_path(&h.g))]),
            bottom: h.value_at(&all_basepoint_tuple(&dom))?,
            left: inv(ap(&h.f, ladder.clone())),
            right: inv(ap(&h.g, ladder)),
        },
    })
}

// ---------------------------------------------------------------------------
// The triangle's explicit homotopy
// ---------------------------------------------------------------------------

/// The unit-collapse homotopy between the two routes of the `triangle`
/// diagram on `(A ^ I) ^ B`. The two routes differ on points — one lands at
/// `<a, *B>`, the other at `<*A, b>` — so reflexivity rows cannot work; the
/// rows below walk between those images around the codomain basepoint.
pub fn triangle_homotopy() -> Result<Homotopy> {
    let d = crate::maps::diagram("triangle")?;
    let f = d.lhs_map();
    let g = d.rhs_map();
    let dom = f.domain();
    let cod = f.codomain();
    let (lai, lb) = smash_parts(&dom)?;
    let (la, li) = smash_parts(&lai)?;
    let (a_leaf, i_leaf, b_leaf) = (leaf_of(&la)?, leaf_of(&li)?, leaf_of(&lb)?);
    let a = var("a", &a_leaf);
    let b = var("b", &b_leaf);
    let (sa, sb) = (basepoint(&la), basepoint(&lb));

    let pl = |u: &Term| root_gen(&cod, PushKind::PushL, vec![u.clone()]);
    let pr = |v: &Term| root_gen(&cod, PushKind::PushR, vec![v.clone()]);

    let p_any = |name: &str, leaf: &Leaf| Pattern::Any { name: name.into(), sort: leaf.clone() };
    let p_pair = |l: Pattern, r: Pattern| Pattern::Pair { l: Box::new(l), r: Box::new(r) };

    let points = vec![
        // <*, b>: from the basepoint of the codomain over to <*A, b>.
        (
            p_pair(Pattern::Basepoint { at: lai.clone() }, p_any("b", &b_leaf)),
            comp(vec![inv(pl(&sa)), pr(&sb), inv(pr(&b))]),
        ),
        // <<a, *I>, b>: from <a, *B> around the basepoint to <*A, b>.
        (
            p_pair(
                p_pair(p_any("a", &a_leaf), Pattern::Basepoint { at: li.clone() }),
                p_any("b", &b_leaf),
            ),
            comp(vec![pl(&a), inv(pl(&sa)), pr(&sb), inv(pr(&b))]),
        ),
        // <<a, dot>, b>: both routes land at <a, b>.
        (
            p_pair(
                p_pair(p_any("a", &a_leaf), Pattern::Element { name: "dot".into(), sort: i_leaf }),
                p_any("b", &b_leaf),
            ),
            refl(pair(a.clone(), b.clone())),
        ),
    ];
    let h = Homotopy { f, g, points, basepoint: refl(basepoint(&cod)) };
    h.validate()?;
    Ok(h)
}

// ---------------------------------------------------------------------------
// The iterated cofibre builder
// ---------------------------------------------------------------------------

/// One fresh variable per leaf, assembled with the domain's tree structure.
/// Requires generic leaves (variables range over them) with pairwise distinct
/// names; the variable for leaf `X` is named `x`.
pub fn full_tuple_term(shape: &Shape) -> Result<Term> {
    match shape {
        Shape::Leaf { leaf } => {
            if leaf.elements.is_some() {
                return Err(Error::Invalid(format!(
                    "builder tuples need generic leaves; `{}` is enumerated",
                    leaf.name
                )));
            }
            Ok(var(&leaf.name.to_lowercase(), leaf))
        }
        Shape::Smash { left, right } => Ok(pair(full_tuple_term(left)?, full_tuple_term(right)?)),
        Shape::Triple { .. } => {
            Err(Error::ShapeMismatch("builder shapes are binary smash trees".into()))
        }
    }
}

fn leaf_count(shape: &Shape) -> usize {
    shape.leaves().len()
}

/// The canonical null path from the full variable tuple with leaf `j`
/// (in-order) collapsed to its basepoint, down to the shape's basepoint:
/// finish collapsing the subtree that contains `j`, then glue outward with
/// the sibling's full tuple as the surviving argument.
pub fn null_at_leaf(shape: &Shape, j: usize) -> Result<PathExpr> {
    let n = leaf_count(shape);
    if j >= n {
        return Err(Error::Invalid(format!("leaf index {} out of range for `{}` ({} leaves)", j, shape, n)));
    }
    fn go(s: &Shape, j: usize, base: usize) -> Result<PathExpr> {
        match s {
            Shape::Leaf { .. } => Ok(refl(basepoint(s))),
            Shape::Smash { left, right } => {
                let nl = leaf_count(left);
                if j < base + nl {
                    let inner = go(left, j, base)?;
                    let tr = full_tuple_term(right)?;
                    Ok(comp(vec![
                        ap_ctx(Ctx::PairL { ctx: Box::new(Ctx::hole(left)), right: tr.clone() }, inner),
                        root_gen(s, PushKind::PushR, vec![tr]),
                    ]))
                } else {
                    let inner = go(right, j, base + nl)?;
                    let tl = full_tuple_term(left)?;
                    Ok(comp(vec![
                        ap_ctx(Ctx::PairR { left: tl.clone(), ctx: Box::new(Ctx::hole(right)) }, inner),
                        root_gen(s, PushKind::PushL, vec![tl]),
                    ]))
                }
            }
            Shape::Triple { .. } => {
                Err(Error::ShapeMismatch("builder shapes are binary smash trees".into()))
            }
        }
    }
    go(shape, j, 0)
}

/// A canonical path from a partially collapsed pattern's point down to the
/// basepoint, or `None` when the pattern is the full tuple. Preference order:
/// a fully collapsed side exits by its sibling's glue; otherwise descend left
/// first.
pub fn pattern_collapse(shape: &Shape, p: &Pattern) -> Result<Option<PathExpr>> {
    match (shape, p) {
        (_, Pattern::Basepoint { .. }) => Ok(Some(refl(basepoint(shape)))),
        (Shape::Leaf { .. }, _) => Ok(None),
        (Shape::Smash { left, right }, Pattern::Pair { l, r }) => {
            let dl = pattern_collapse(left, l)?;
            let dr = pattern_collapse(right, r)?;
            let (tl, tr) = (l.to_term(), r.to_term());
            match (dl, dr) {
                (None, None) => Ok(None),
                (Some(d), _) => Ok(Some(comp(vec![
                    ap_ctx(Ctx::PairL { ctx: Box::new(Ctx::hole(left)), right: tr.clone() }, d),
                    root_gen(shape, PushKind::PushR, vec![tr]),
                ]))),
                (None, Some(d)) => Ok(Some(comp(vec![
                    ap_ctx(Ctx::PairR { left: tl.clone(), ctx: Box::new(Ctx::hole(right)) }, d),
                    root_gen(shape, PushKind::PushL, vec![tl]),
                ]))),
            }
        }
        _ => Err(Error::ShapeMismatch(format!(
            "collapse path: pattern `{}` does not fit shape `{}`",
            p, shape
        ))),
    }
}

/// A homotopy candidate for the cofibre builder: only the full-tuple row and
/// the basepoint row are given; everything else is derived once the case
/// squares discharge. The tuple row must be written with the canonical
/// variables of [`full_tuple_term`].
#[derive(Debug, Clone)]
pub struct FsHomotopy {
    pub f: MapDef,
    pub g: MapDef,
    /// Path `f(tuple) = g(tuple)` at the full variable tuple of the domain.
    pub tuple: PathExpr,
    /// Path `f(*) = g(*)`.
    pub basepoint: PathExpr,
}

impl FsHomotopy {
    /// One square per leaf — collapsing that leaf's variable to the basepoint
    /// must agree with the basepoint row through the canonical null paths —
    /// plus the basepoint-compatibility square against the pointedness paths.
    /// Tags are `case-0` .. `case-(n-1)` for the leaves and `case-n` for the
    /// basepoint square.
    pub fn case_obligations(&self) -> Result<Vec<Obligation>> {
        let dom = self.f.domain();
        if dom != self.g.domain() || self.f.codomain() != self.g.codomain() {
            return Err(Error::ShapeMismatch(
                "builder homotopy needs parallel maps with equal domain and codomain".into(),
            ));
        }
        check_distinct_leaves(&dom)?;
        let leaves: Vec<Leaf> = dom.leaves().into_iter().cloned().collect();
        let mut out = Vec::new();
        for (j, lf) in leaves.iter().enumerate() {
            let null_j = null_at_leaf(&dom, j)?;
            let mut env = BTreeMap::new();
            env.insert(lf.name.to_lowercase(), basepoint(&Shape::Leaf { leaf: lf.clone() }));
            out.push(Obligation {
                tag: format!("case-{}", j),
                vars: format!("{} := *", lf.name.to_lowercase()),
                square: Square {
                    top: self.basepoint.clone(),
                    bottom: substitute_path(&self.tuple, &env),
                    left: inv(ap(&self.f, null_j.clone())),
                    right: inv(ap(&self.g, null_j)),
                },
            });
        }
        let f_star = eval_point(&self.f, &basepoint(&dom))?;
        let g_star = eval_point(&self.g, &basepoint(&dom))?;
        out.push(Obligation {
            tag: format!("case-{}", leaves.len()),
            vars: "basepoint".into(),
            square: Square {
                top: comp(vec![pointedness_path(&self.f), inv(pointedness_path(&self.g))]),
                bottom: self.basepoint.clone(),
                left: refl(f_star),
                right: refl(g_star),
            },
        });
        Ok(out)
    }

    /// Discharge the case squares and assemble the total homotopy: the full
    /// tuple row and the basepoint row are kept verbatim, and every partially
    /// collapsed pattern gets the basepoint row conjugated by the image of
    /// its collapse path.
    pub fn build(&self) -> Result<Homotopy> {
        let report = discharge(&self.case_obligations()?);
        ensure(&report)?;
        let dom = self.f.domain();
        // Guards that the stored tuple row really is over the canonical tuple.
        full_tuple_term(&dom)?;
        let mut points = Vec::new();
        for p in proper_patterns(&dom) {
            let value = match pattern_collapse(&dom, &p)? {
                None => self.tuple.clone(),
                Some(d) => comp(vec![
                    ap(&self.f, d.clone()),
                    self.basepoint.clone(),
                    inv(ap(&self.g, d)),
                ]),
            };
            points.push((p, value));
        }
        let h = Homotopy {
            f: self.f.clone(),
            g: self.g.clone(),
            points,
            basepoint: self.basepoint.clone(),
        };
        h.validate()?;
        Ok(h)
    }
}

/// A case square rendered symbolically, for displaying what the builder
/// would require of a not-yet-given homotopy on some shape.
#[derive(Debug, Clone, Serialize)]
pub struct CaseObligation {
    pub tag: String,
    pub vars: String,
    pub top: String,
    pub bottom: String,
    pub left: String,
    pub right: String,
}

/// The per-leaf case squares for a shape, with the homotopy rows left
/// symbolic (`h(...)`): collapsing leaf `j` of the full tuple must agree with
/// the basepoint row through the canonical null path.
pub fn shape_case_obligations(shape: &Shape) -> Result<Vec<CaseObligation>> {
    check_distinct_leaves(shape)?;
    let tuple = full_tuple_term(shape)?;
    let leaves: Vec<Leaf> = shape.leaves().into_iter().cloned().collect();
    let mut out = Vec::new();
    for (j, lf) in leaves.iter().enumerate() {
        let null_j = null_at_leaf(shape, j)?;
        let mut env = BTreeMap::new();
        env.insert(lf.name.to_lowercase(), basepoint(&Shape::Leaf { leaf: lf.clone() }));
        let collapsed = crate::term::substitute_term(&tuple, &env);
        out.push(CaseObligation {
            tag: format!("case-{}", j),
            vars: format!("{} := *", lf.name.to_lowercase()),
            top: "h(*)".into(),
            bottom: format!("h({})", collapsed),
            left: format!("(ap[f]({}))^-1", null_j),
            right: format!("(ap[g]({}))^-1", null_j),
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Lifting one smash factor onto a staged shape
// ---------------------------------------------------------------------------

/// The map `S -> S ^ Last` pairing with a fixed point `elem` of `Last`:
/// constructor tuples go to `<tuple, elem>`, the basepoint case of a compound
/// (or enumerated) domain goes to the basepoint, and every glue generator is
/// relocated one level deeper with the root generators picking up the extra
/// hop `pr(elem)`.
pub fn lift_up(s: &Shape, last: &Shape, elem: &Term) -> Result<MapDef> {
    if elem.shape() != *last {
        return Err(Error::SortMismatch(format!(
            "lift element `{}` has shape `{}`, want `{}`",
            elem,
            elem.shape(),
            last
        )));
    }
    let cod = Shape::Smash { left: Box::new(s.clone()), right: Box::new(last.clone()) };
    let cod_pt = cod.clone();
    let cod_path = cod.clone();
    let elem_pt = elem.clone();
    let elem_path = elem.clone();
    let point_fn = move |pat: &Pattern| -> Result<Term> {
        match pat {
            Pattern::Basepoint { .. } => Ok(basepoint(&cod_pt)),
            _ => Ok(pair(pat.to_term(), elem_pt.clone())),
        }
    };
    let path_fn = move |fam: &crate::term::GeneratorFamily,
                        args: &[Pattern],
                        slots: &[Pattern]|
          -> Result<PathExpr> {
        let args_t: Vec<Term> = args.iter().map(|p| p.to_term()).collect();
        let mut slots_t: Vec<Term> = slots.iter().map(|p| p.to_term()).collect();
        slots_t.push(elem_path.clone());
        let mut node = vec![Step::L];
        node.extend(fam.node.0.iter().cloned());
        let relocated = gen(&cod_path, NodePath(node), fam.kind, args_t, slots_t);
        if fam.node.is_root() {
            Ok(comp(vec![relocated, root_gen(&cod_path, PushKind::PushR, vec![elem_path.clone()])]))
        } else {
            Ok(relocated)
        }
    };
    let has_base_case = crate::term::patterns(s)
        .iter()
        .any(|p| matches!(p, Pattern::Basepoint { .. }));
    let pointedness = if has_base_case {
        refl(basepoint(&cod))
    } else {
        // A generic leaf has a single catch-all case, so the basepoint maps
        // to `<*, elem>` and needs the right glue to come home.
        root_gen(&cod, PushKind::PushR, vec![elem.clone()])
    };
    build_table(format!("lift[{}]", elem), s.clone(), cod, point_fn, path_fn, pointedness)
}

/// The coherence path from `lift_up(..)(x)` to the pair `<x, elem>`:
/// reflexivity on constructor tuples, the inverse right glue on the
/// basepoint of a compound domain, and an error on points that are neither.
pub fn up_coh(s: &Shape, last: &Shape, elem: &Term, x: &Term) -> Result<PathExpr> {
    let cod = Shape::Smash { left: Box::new(s.clone()), right: Box::new(last.clone()) };
    let x = x.reduce();
    if x == basepoint(s) {
        let has_base_case = crate::term::patterns(s)
            .iter()
            .any(|p| matches!(p, Pattern::Basepoint { .. }));
        return if has_base_case {
            Ok(inv(root_gen(&cod, PushKind::PushR, vec![elem.clone()])))
        } else {
            Ok(refl(pair(x, elem.clone())))
        };
    }
    fn constructor_tuple(t: &Term) -> bool {
        match t {
            Term::Var { .. } | Term::Element { .. } => true,
            Term::Pair { l, r } => constructor_tuple(l) && constructor_tuple(r),
            Term::TriplePt { a, b, c } => {
                constructor_tuple(a) && constructor_tuple(b) && constructor_tuple(c)
            }
            Term::Basepoint { .. } | Term::AbstractApp { .. } => false,
        }
    }
    if constructor_tuple(&x) {
        Ok(refl(pair(x, elem.clone())))
    } else {
        Err(Error::NonConstructorInput(format!(
            "lift coherence is defined on constructor tuples and the basepoint, got `{}`",
            x
        )))
    }
}

// ---------------------------------------------------------------------------
// Staged elements of an iterated smash over enumerated leaves
// ---------------------------------------------------------------------------

/// An element of the staged (level-by-level) presentation of an iterated
/// smash over enumerated leaves. Coordinates are element indices with `0`
/// for the basepoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FsElem {
    /// The collapsed class at this stage.
    Unit,
    /// A previous-stage element paired with a non-basepoint final coordinate.
    Inl { prev: Box<FsElem>, last: usize },
    /// A tuple of non-basepoint coordinates for all but the final slot (the
    /// final slot at the basepoint); at stage one, the single coordinate.
    Inr { tuple: Vec<usize> },
}

/// Number of staged elements for factor sizes `sizes` (each size counts the
/// basepoint): stage one is the pointed set itself, and each further stage
/// adds `previous * (s_n - 1)` pairs plus the product of non-basepoint
/// tuples of all earlier factors.
pub fn fs_size(sizes: &[usize]) -> usize {
    match sizes {
        [] => 1,
        [s1] => *s1,
        [init @ .., last] => {
            let prod: usize = init.iter().map(|s| s - 1).product();
            fs_size(init) * (last - 1) + prod + 1
        }
    }
}

/// Enumerate the staged elements for the given factor sizes, basepoint class
/// first.
pub fn fs_elements(sizes: &[usize]) -> Result<Vec<FsElem>> {
    match sizes {
        [] => Err(Error::Invalid("staged enumeration needs at least one factor".into())),
        [s1] => {
            let mut out = vec![FsElem::Unit];
            for j in 1..*s1 {
                out.push(FsElem::Inr { tuple: vec![j] });
            }
            Ok(out)
        }
        [init @ .., last] => {
            let mut out = vec![FsElem::Unit];
            for prev in fs_elements(init)? {
                for j in 1..*last {
                    out.push(FsElem::Inl { prev: Box::new(prev.clone()), last: j });
                }
            }
            let ranges: Vec<Vec<usize>> = init.iter().map(|s| (1..*s).collect()).collect();
            for tuple in crate::term::cartesian(&ranges) {
                out.push(FsElem::Inr { tuple });
            }
            Ok(out)
        }
    }
}

/// Project a staged element to its product coordinates (index `0` is the
/// basepoint of that factor).
pub fn fs_gamma(e: &FsElem, sizes: &[usize]) -> Result<Vec<usize>> {
    let n = sizes.len();
    match e {
        FsElem::Unit => Ok(vec![0; n]),
        FsElem::Inl { prev, last } => {
            if n < 2 {
                return Err(Error::Invalid("staged pair at stage one".into()));
            }
            let mut coords = fs_gamma(prev, &sizes[..n - 1])?;
            coords.push(*last);
            Ok(coords)
        }
        FsElem::Inr { tuple } => {
            if n == 1 {
                if tuple.len() != 1 {
                    return Err(Error::Invalid("stage-one tuple must have one coordinate".into()));
                }
                Ok(tuple.clone())
            } else {
                if tuple.len() != n - 1 {
                    return Err(Error::Invalid(format!(
                        "stage-{} tuple must have {} coordinates, got {}",
                        n,
                        n - 1,
                        tuple.len()
                    )));
                }
                let mut coords = tuple.clone();
                coords.push(0);
                Ok(coords)
            }
        }
    }
}

fn element_term(leaf: &Leaf, idx: usize) -> Result<Term> {
    let shape = Shape::Leaf { leaf: leaf.clone() };
    if idx == 0 {
        return Ok(basepoint(&shape));
    }
    let els = leaf
        .elements
        .as_ref()
        .ok_or_else(|| Error::Invalid(format!("leaf `{}` is not enumerated", leaf.name)))?;
    els.get(idx - 1)
        .map(|name| Term::Element { name: name.clone(), sort: leaf.clone() })
        .ok_or_else(|| Error::Invalid(format!("element index {} out of range for `{}`", idx, leaf.name)))
}

fn nested_shape(leaves: &[Leaf]) -> Result<Shape> {
    let mut it = leaves.iter();
    let first = it.next().ok_or_else(|| Error::Invalid("need at least one factor".into()))?;
    let mut s = Shape::Leaf { leaf: first.clone() };
    for lf in it {
        s = Shape::Smash { left: Box::new(s), right: Box::new(Shape::Leaf { leaf: lf.clone() }) };
    }
    Ok(s)
}

fn nested_tuple(leaves: &[Leaf], coords: &[usize]) -> Result<Term> {
    let mut t = element_term(&leaves[0], coords[0])?;
    for (lf, &ix) in leaves.iter().zip(coords.iter()).skip(1) {
        t = pair(t, element_term(lf, ix)?);
    }
    Ok(t)
}

/// The point of the left-nested smash that a staged element presents.
pub fn fs_embed(e: &FsElem, leaves: &[Leaf]) -> Result<Term> {
    let n = leaves.len();
    let shape = nested_shape(leaves)?;
    match e {
        FsElem::Unit => Ok(basepoint(&shape)),
        FsElem::Inl { prev, last } => {
            if n < 2 {
                return Err(Error::Invalid("staged pair at stage one".into()));
            }
            Ok(pair(fs_embed(prev, &leaves[..n - 1])?, element_term(&leaves[n - 1], *last)?))
        }
        FsElem::Inr { tuple } => {
            if n == 1 {
                element_term(&leaves[0], tuple[0])
            } else {
                Ok(pair(nested_tuple(&leaves[..n - 1], tuple)?, basepoint(&Shape::Leaf { leaf: leaves[n - 1].clone() })))
            }
        }
    }
}

/// The canonical null path from a staged element's point down to the
/// basepoint. Defined exactly for elements with a basepoint coordinate
/// somewhere; a full tuple has no null path and errors.
pub fn fs_null(e: &FsElem, leaves: &[Leaf]) -> Result<PathExpr> {
    let n = leaves.len();
    let shape = nested_shape(leaves)?;
    match e {
        FsElem::Unit => Ok(refl(basepoint(&shape))),
        FsElem::Inl { prev, last } => {
            if n < 2 {
                return Err(Error::Invalid("staged pair at stage one".into()));
            }
            let prev_shape = nested_shape(&leaves[..n - 1])?;
            let el = element_term(&leaves[n - 1], *last)?;
            let inner = fs_null(prev, &leaves[..n - 1])?;
            Ok(comp(vec![
                ap_ctx(Ctx::PairL { ctx: Box::new(Ctx::hole(&prev_shape)), right: el.clone() }, inner),
                root_gen(&shape, PushKind::PushR, vec![el]),
            ]))
        }
        FsElem::Inr { tuple } => {
            if n == 1 {
                Err(Error::NonConstructorInput(format!(
                    "stage-one element `{}` has no null path",
                    fs_embed(e, leaves)?
                )))
            } else {
                Ok(root_gen(&shape, PushKind::PushL, vec![nested_tuple(&leaves[..n - 1], tuple)?]))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{associator, diagram, swap_map};
    use crate::normalize::normalize;
    use crate::term::{leaf, smash, validate_map};

    fn hexagon_parts() -> (MapDef, MapDef) {
        let d = diagram("hexagon").unwrap();
        (d.lhs_map(), d.rhs_map())
    }

    #[test]
    fn refl_homotopy_is_rejected_when_sides_differ_on_points() {
        let d = diagram("triangle").unwrap();
        let err = Homotopy::refl(&d.lhs_map(), &d.rhs_map()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("->"), "want an endpoint mismatch, got: {}", msg);
    }

    #[test]
    fn involution_discharges_both_constancy_squares() {
        let d = diagram("involution").unwrap();
        let h = Homotopy::refl(&d.lhs_map(), &d.rhs_map()).unwrap();
        let mut obls = obligations_binary(&h).unwrap();
        assert_eq!(obls.len(), 2);
        obls.push(pointedness_obligation(&h).unwrap());
        let report = discharge(&obls);
        assert!(report.pass(), "failures: {:?}", report.first_failure());
        let tags: Vec<&str> = report.entries.iter().map(|e| e.tag.as_str()).collect();
        assert_eq!(tags, ["constancy-L", "constancy-R", "pointedness"]);
    }

    #[test]
    fn triangle_explicit_homotopy_discharges_all_squares() {
        let h = triangle_homotopy().unwrap();
        let mut obls = obligations_binary(&h).unwrap();
        assert_eq!(obls.len(), 3, "two left-factor patterns plus one right");
        obls.push(pointedness_obligation(&h).unwrap());
        let report = discharge(&obls);
        assert!(
            report.pass(),
            "triangle failure: {:?}",
            report.first_failure()
        );
    }

    #[test]
    fn ternary_family_has_five_squares_and_quaternary_seven() {
        let (f, g) = hexagon_parts();
        let h = Homotopy::refl(&f, &g).unwrap();
        assert_eq!(obligations_triple(&h).unwrap().len(), 5);

        let d = diagram("pentagon").unwrap();
        let h4 = Homotopy::refl(&d.lhs_map(), &d.rhs_map()).unwrap();
        assert_eq!(obligations_quadruple(&h4).unwrap().len(), 7);
    }

    #[test]
    fn hexagon_and_pentagon_discharge_their_square_families() {
        let (f, g) = hexagon_parts();
        let h = Homotopy::refl(&f, &g).unwrap();
        let mut obls = obligations_triple(&h).unwrap();
        obls.push(pointedness_obligation(&h).unwrap());
        let report = discharge(&obls);
        assert!(report.pass(), "hexagon failure: {:?}", report.first_failure());

        let d = diagram("pentagon").unwrap();
        let h4 = Homotopy::refl(&d.lhs_map(), &d.rhs_map()).unwrap();
        let mut obls4 = obligations_quadruple(&h4).unwrap();
        obls4.push(pointedness_obligation(&h4).unwrap());
        let report4 = discharge(&obls4);
        assert!(report4.pass(), "pentagon failure: {:?}", report4.first_failure());
    }

    /// Frozen trace: the item-iv wall column of the hexagon's domain maps, on
    /// both routes, to the same four-letter word in `B ^ (C ^ A)`.
    #[test]
    fn ternary_wall_column_images_agree_on_both_routes() {
        let (f, g) = hexagon_parts();
        let dom = f.domain();
        let cod = f.codomain();
        let (lab, lc) = smash_parts(&dom).unwrap();
        let (la, lb) = smash_parts(&lab).unwrap();
        let a = var("a", &leaf_of(&la).unwrap());
        let b = var("b", &leaf_of(&lb).unwrap());
        let (sb, sc) = (basepoint(&lb), basepoint(&lc));

        let column = comp(vec![
            root_gen(&dom, PushKind::PushL, vec![pair(a.clone(), b.clone())]),
            inv(root_gen(&dom, PushKind::PushL, vec![basepoint(&lab)])),
            inv(gen(&dom, NodePath(vec![Step::L]), PushKind::PushR, vec![sb.clone()], vec![sc.clone()])),
        ]);
        let lhs = normalize(&ap(&f, column.clone())).unwrap();
        let rhs = normalize(&ap(&g, column)).unwrap();

        let (_, lca) = smash_parts(&cod).unwrap();
        let expected = normalize(&comp(vec![
            ap_ctx(
                Ctx::PairR { left: b.clone(), ctx: Box::new(Ctx::hole(&lca)) },
                root_gen(&lca, PushKind::PushR, vec![a.clone()]),
            ),
            root_gen(&cod, PushKind::PushL, vec![b.clone()]),
            inv(root_gen(&cod, PushKind::PushL, vec![sb.clone()])),
            inv(ap_ctx(
                Ctx::PairR { left: sb.clone(), ctx: Box::new(Ctx::hole(&lca)) },
                root_gen(&lca, PushKind::PushL, vec![sc.clone()]),
            )),
        ]))
        .unwrap();
        assert_eq!(lhs.letters, expected.letters, "left route:\n{}", lhs);
        assert_eq!(rhs.letters, expected.letters, "right route:\n{}", rhs);
    }

    /// Frozen trace: both hexagon routes send the basepoint ladder of
    /// `(A ^ B) ^ C` to the single wall glue `pr(<*C, *A>)`.
    #[test]
    fn basepoint_ladder_image_is_the_wall_glue_on_both_routes() {
        let (f, g) = hexagon_parts();
        let dom = f.domain();
        let cod = f.codomain();
        let ladder = basepoint_ladder(&dom);
        let lhs = normalize(&ap(&f, ladder.clone())).unwrap();
        let rhs = normalize(&ap(&g, ladder)).unwrap();
        let (_, lca) = smash_parts(&cod).unwrap();
        let (lcc, laa) = smash_parts(&lca).unwrap();
        let expected =
            normalize(&root_gen(&cod, PushKind::PushR, vec![pair(basepoint(&lcc), basepoint(&laa))]))
                .unwrap();
        assert_eq!(lhs.letters, expected.letters, "left route:\n{}", lhs);
        assert_eq!(rhs.letters, expected.letters, "right route:\n{}", rhs);
    }

    #[test]
    fn staged_counts_match_the_closed_formula() {
        assert_eq!(fs_size(&[2]), 2);
        assert_eq!(fs_size(&[2, 2]), 4);
        assert_eq!(fs_size(&[2, 3]), 6);
        assert_eq!(fs_size(&[3, 3]), 9);
        assert_eq!(fs_size(&[2, 2, 2]), 6);
        for sizes in [vec![2], vec![2, 2], vec![3, 2], vec![2, 3, 2], vec![2, 2, 2, 2]] {
            assert_eq!(fs_elements(&sizes).unwrap().len(), fs_size(&sizes), "sizes {:?}", sizes);
        }
    }

    #[test]
    fn null_paths_exist_exactly_off_the_full_tuples() {
        let leaves = vec![
            Leaf::enumerated("P", &["p1"]),
            Leaf::enumerated("Q", &["q1", "q2"]),
        ];
        let sizes = [2usize, 3];
        for e in fs_elements(&sizes).unwrap() {
            let coords = fs_gamma(&e, &sizes).unwrap();
            let has_base_coord = coords.iter().any(|&c| c == 0);
            let null = fs_null(&e, &leaves);
            assert_eq!(null.is_ok(), has_base_coord, "element {:?} coords {:?}", e, coords);
            if let Ok(p) = null {
                let (src, tgt) = endpoints(&p).unwrap();
                assert_eq!(src, fs_embed(&e, &leaves).unwrap().reduce());
                assert_eq!(tgt, basepoint(&nested_shape(&leaves).unwrap()));
            }
        }
    }

    #[test]
    fn lift_relocates_glue_and_validates() {
        let s = smash(leaf("A"), leaf("B"));
        let c_shape = leaf("C");
        let c = var("c", &leaf_of(&c_shape).unwrap());
        let lift = lift_up(&s, &c_shape, &c).unwrap();
        validate_map(&lift).unwrap();
        let cod = lift.codomain();
        let a = var("a", &leaf_of(&leaf("A")).unwrap());
        let image = normalize(&ap(&lift, root_gen(&s, PushKind::PushL, vec![a.clone()]))).unwrap();
        let expected = normalize(&comp(vec![
            gen(&cod, NodePath(vec![Step::L]), PushKind::PushL, vec![a], vec![c.clone()]),
            root_gen(&cod, PushKind::PushR, vec![c.clone()]),
        ]))
        .unwrap();
        assert_eq!(image.letters, expected.letters);
    }

    #[test]
    fn lift_coherence_distinguishes_tuples_basepoints_and_mixtures() {
        let s = smash(leaf("A"), leaf("B"));
        let c_shape = leaf("C");
        let c = var("c", &leaf_of(&c_shape).unwrap());
        let a = var("a", &leaf_of(&leaf("A")).unwrap());
        let b = var("b", &leaf_of(&leaf("B")).unwrap());

        let coh = up_coh(&s, &c_shape, &c, &pair(a.clone(), b.clone())).unwrap();
        assert_eq!(coh, refl(pair(pair(a.clone(), b), c.clone())));

        let coh_base = up_coh(&s, &c_shape, &c, &basepoint(&s)).unwrap();
        let cod = smash(s.clone(), c_shape.clone());
        assert_eq!(coh_base, inv(root_gen(&cod, PushKind::PushR, vec![c.clone()])));

        let mixed = pair(basepoint(&leaf("A")), var("b", &leaf_of(&leaf("B")).unwrap()));
        assert!(matches!(
            up_coh(&s, &c_shape, &c, &mixed),
            Err(Error::NonConstructorInput(_))
        ));
    }

    /// A builder instance whose two maps differ by a detour that is the
    /// letterwise identity: the case squares discharge and the derived wrap
    /// row is the basepoint row conjugated by the wrap's collapse image.
    #[test]
    fn builder_assembles_rows_and_wrap_row_conjugates_the_basepoint_row() {
        let (la, lb, lc) = (leaf("A"), leaf("B"), leaf("C"));
        let dom = smash(smash(la.clone(), lb.clone()), lc.clone());
        let f = associator(&la, &lb, &lc).unwrap();
        let cod = f.codomain();
        let (ls, rs) = smash_parts(&cod).unwrap();
        let g = MapDef::composite(vec![
            f.clone(),
            swap_map(&ls, &rs).unwrap(),
            swap_map(&rs, &ls).unwrap(),
        ]);

        let tup = full_tuple_term(&dom).unwrap();
        let fs = FsHomotopy {
            f: f.clone(),
            g: g.clone(),
            tuple: refl(eval_point(&f, &tup).unwrap()),
            basepoint: refl(basepoint(&cod)),
        };
        let obls = fs.case_obligations().unwrap();
        assert_eq!(obls.len(), 4, "three leaves plus the basepoint square");
        let h = fs.build().unwrap();

        // The wrap pattern <*, c> gets the conjugated basepoint row.
        let wrap = pair(basepoint(&smash(la, lb)), var("c", &leaf_of(&lc).unwrap()));
        let got = normalize(&h.value_at(&wrap).unwrap()).unwrap();
        let hop = root_gen(&dom, PushKind::PushR, vec![var("c", &leaf_of(&lc).unwrap())]);
        let expected = normalize(&comp(vec![
            ap(&f, hop.clone()),
            refl(basepoint(&cod)),
            inv(ap(&g, hop)),
        ]))
        .unwrap();
        assert_eq!(got.letters, expected.letters);
    }

    #[test]
    fn mutated_basepoint_row_fails_a_case_square() {
        let (la, lb, lc) = (leaf("A"), leaf("B"), leaf("C"));
        let f = associator(&la, &lb, &lc).unwrap();
        let cod = f.codomain();
        let (ca, cbc) = smash_parts(&cod).unwrap();
        let dom = f.domain();
        let tup = full_tuple_term(&dom).unwrap();
        // A reduced loop at the codomain basepoint: out along one wall glue,
        // back along the other. No cancellation is possible.
        let loop_at_base = comp(vec![
            inv(root_gen(&cod, PushKind::PushL, vec![basepoint(&ca)])),
            root_gen(&cod, PushKind::PushR, vec![basepoint(&cbc)]),
        ]);
        let fs = FsHomotopy {
            f: f.clone(),
            g: f.clone(),
            tuple: refl(eval_point(&f, &tup).unwrap()),
            basepoint: loop_at_base,
        };
        let err = fs.build().unwrap_err();
        match err {
            Error::ObligationFailed { tag, .. } => assert!(tag.starts_with("case-"), "tag {}", tag),
            other => panic!("want ObligationFailed, got {:?}", other),
        }
    }

    #[test]
    fn symbolic_case_squares_cover_each_leaf() {
        let shape = smash(leaf("A"), smash(leaf("B"), leaf("C")));
        let obls = shape_case_obligations(&shape).unwrap();
        assert_eq!(obls.len(), 3);
        let tags: Vec<&str> = obls.iter().map(|o| o.tag.as_str()).collect();
        assert_eq!(tags, ["case-0", "case-1", "case-2"]);
        assert!(obls[0].bottom.contains("h(<*A, <b, c>>)"), "got {}", obls[0].bottom);
        assert!(obls[2].left.starts_with("(ap[f]("), "got {}", obls[2].left);
    }

    mod staged_properties {
        use super::*;
        use crate::term::endpoints;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            /// Random factor sizes: the enumeration matches the closed size
            /// formula, elements are pairwise distinct with in-range injective
            /// coordinates, and a null path exists exactly when some
            /// coordinate sits at the basepoint — with the right endpoints.
            #[test]
            fn staged_enumeration_invariants(
                sizes in proptest::collection::vec(2usize..=4, 1..=4)
            ) {
                let els = fs_elements(&sizes).unwrap();
                prop_assert_eq!(els.len(), fs_size(&sizes));

                let element_names: Vec<Vec<String>> = sizes
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (1..*s).map(|j| format!("e{}_{}", i, j)).collect())
                    .collect();
                let leaves: Vec<Leaf> = element_names
                    .iter()
                    .enumerate()
                    .map(|(i, names)| {
                        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                        Leaf::enumerated(&format!("L{}", i), &refs)
                    })
                    .collect();
                let mut shape = Shape::Leaf { leaf: leaves[0].clone() };
                for lf in &leaves[1..] {
                    shape = smash(shape, Shape::Leaf { leaf: lf.clone() });
                }

                let mut seen_coords = Vec::new();
                for e in &els {
                    let coords = fs_gamma(e, &sizes).unwrap();
                    prop_assert_eq!(coords.len(), sizes.len());
                    for (c, s) in coords.iter().zip(&sizes) {
                        prop_assert!(c < s, "coordinate {} out of range {}", c, s);
                    }
                    prop_assert!(!seen_coords.contains(&coords), "coords repeat");
                    let has_zero = coords.iter().any(|&c| c == 0);
                    seen_coords.push(coords);

                    match fs_null(e, &leaves) {
                        Ok(p) => {
                            prop_assert!(has_zero, "null path on a full tuple");
                            let (src, tgt) = endpoints(&p).unwrap();
                            prop_assert_eq!(src, fs_embed(e, &leaves).unwrap());
                            prop_assert_eq!(tgt, basepoint(&shape));
                        }
                        Err(_) => prop_assert!(!has_zero, "missing null path"),
                    }
                }
            }
        }
    }
}
