//! The structure-map zoo: clause tables for the symmetric monoidal structure.
//!
//! Design notes:
//! - Every map here is a total clause table (or a composite of such): one
//!   point clause per case of the domain's case split, one path clause per
//!   generator-family instance. Builders are generic over compound factors,
//!   so e.g. a swap or associator over `(A ^ B)` works the same as over a
//!   leaf; inner generator families relocate structurally.
//! - The associator is deliberately a composite through the unbiased
//!   three-fold smash — curry, rotate the slots, un-curry, swap — so its
//!   action on letters is computed, never hand-declared.
//! - The 2-cell glue of binary and ternary smash nodes never appears in any
//!   evaluated clause; coherence at that level is exactly what the square
//!   obligations check, so the tables stay honest.

use crate::term::{
    self, ap, ap_ctx, basepoint, comp, eval_point, gen, pair, patterns, refl, root_gen,
    shape_generators, smash, triple, triple_pt, AbstractSym, Ctx, GeneratorFamily, Leaf, MapDef,
    NodePath, PathExpr, PathRow, Pattern, PointRow, PushKind, Shape, Step, TableMap, Term,
};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Leaves and abstract maps
// ---------------------------------------------------------------------------

/// The two-point unit: basepoint plus one marked element.
pub fn unit_shape() -> Shape {
    Shape::Leaf { leaf: Leaf::enumerated("I", &["dot"]) }
}

/// The unit's non-basepoint element as a term.
pub fn unit_dot() -> Term {
    Term::Element { name: "dot".to_string(), sort: Leaf::enumerated("I", &["dot"]) }
}

/// An opaque pointed map whose basepoint path is refl.
pub fn abstract_map(name: &str, domain: &Shape, codomain: &Shape) -> MapDef {
    MapDef::Abstract {
        sym: AbstractSym {
            name: name.to_string(),
            domain: domain.clone(),
            codomain: codomain.clone(),
            refl_pointed: true,
        },
    }
}

/// An opaque pointed map with a nontrivial basepoint cell.
pub fn abstract_map_general(name: &str, domain: &Shape, codomain: &Shape) -> MapDef {
    MapDef::Abstract {
        sym: AbstractSym {
            name: name.to_string(),
            domain: domain.clone(),
            codomain: codomain.clone(),
            refl_pointed: false,
        },
    }
}

/// Path witnessing `m(*) = *`, assembled structurally for composites.
pub fn pointedness_path(m: &MapDef) -> PathExpr {
    match m {
        MapDef::Identity { shape } => refl(basepoint(shape)),
        MapDef::Abstract { sym } => {
            if sym.refl_pointed {
                refl(basepoint(&sym.codomain))
            } else {
                PathExpr::Pointedness { map: sym.clone() }
            }
        }
        MapDef::Table { table } => table.pointedness.clone(),
        MapDef::Composite { stages } => {
            let mut p = refl(basepoint(&m.domain()));
            for s in stages {
                p = comp(vec![ap(s, p), pointedness_path(s)]);
            }
            p
        }
    }
}

// ---------------------------------------------------------------------------
// Table builder plumbing
// ---------------------------------------------------------------------------

/// Build a clause table from a point rule and a path rule. Rows are emitted
/// per case-split instance, so the rules only ever see constructor patterns.
pub(crate) fn build_table<PF, QF>(
    name: String,
    domain: Shape,
    codomain: Shape,
    point_fn: PF,
    path_fn: QF,
    pointedness: PathExpr,
) -> Result<MapDef>
where
    PF: Fn(&Pattern) -> Result<Term>,
    QF: Fn(&GeneratorFamily, &[Pattern], &[Pattern]) -> Result<PathExpr>,
{
    let mut points = Vec::new();
    for pat in patterns(&domain) {
        let value = point_fn(&pat)?;
        points.push(PointRow { pattern: pat, value });
    }
    let mut paths = Vec::new();
    for fam in shape_generators(&domain) {
        let arg_choices: Vec<Vec<Pattern>> = fam
            .arg_shapes
            .iter()
            .enumerate()
            .map(|(i, s)| {
                patterns(s)
                    .into_iter()
                    .map(|p| term::rename_pattern_vars(&p, &format!("x{}", i)))
                    .collect()
            })
            .collect();
        let slot_choices: Vec<Vec<Pattern>> = fam
            .slot_shapes
            .iter()
            .enumerate()
            .map(|(i, s)| {
                patterns(s)
                    .into_iter()
                    .map(|p| term::rename_pattern_vars(&p, &format!("s{}", i)))
                    .collect()
            })
            .collect();
        for args in term::cartesian(&arg_choices) {
            for slots in term::cartesian(&slot_choices) {
                let value = path_fn(&fam, &args, &slots)?;
                paths.push(PathRow {
                    node: fam.node.clone(),
                    kind: fam.kind,
                    args: args.clone(),
                    slots,
                    value,
                });
            }
        }
    }
    Ok(MapDef::table(TableMap {
        name,
        domain,
        codomain,
        points,
        paths,
        two_cells: Vec::new(),
        pointedness,
    }))
}

fn pats_to_terms(pats: &[Pattern]) -> Vec<Term> {
    pats.iter().map(|p| p.to_term()).collect()
}

// ---------------------------------------------------------------------------
// Swap
// ---------------------------------------------------------------------------

/// The braiding `L ^ R -> R ^ L`.
pub fn swap_map(l: &Shape, r: &Shape) -> Result<MapDef> {
    let domain = smash(l.clone(), r.clone());
    let codomain = smash(r.clone(), l.clone());
    let cod = codomain.clone();
    let cod2 = codomain.clone();
    build_table(
        format!("beta[{}, {}]", l, r),
        domain,
        codomain.clone(),
        move |pat| match pat {
            Pattern::Basepoint { .. } => Ok(basepoint(&cod)),
            Pattern::Pair { l, r } => Ok(pair(r.to_term(), l.to_term())),
            _ => Err(Error::ShapeMismatch("swap expects a binary domain".to_string())),
        },
        move |fam, args, slots| {
            let args_t = pats_to_terms(args);
            let slots_t = pats_to_terms(slots);
            if fam.node.is_root() {
                let kind = match fam.kind {
                    PushKind::PushL => PushKind::PushR,
                    PushKind::PushR => PushKind::PushL,
                    _ => return Err(Error::ShapeMismatch("binary glue expected".to_string())),
                };
                return Ok(root_gen(&cod2, kind, args_t));
            }
            // Inside a factor: mirror the outermost step, keep everything else.
            let mut node = fam.node.0.clone();
            node[0] = match node[0] {
                Step::L => Step::R,
                Step::R => Step::L,
                s => s,
            };
            Ok(gen(&cod2, NodePath(node), fam.kind, args_t, slots_t))
        },
        refl(basepoint(&codomain)),
    )
}

// ---------------------------------------------------------------------------
// Currying into and out of the ternary smash
// ---------------------------------------------------------------------------

/// `(X ^ Y) ^ Z -> ^(X, Y, Z)`.
pub fn to_triple(x: &Shape, y: &Shape, z: &Shape) -> Result<MapDef> {
    let domain = smash(smash(x.clone(), y.clone()), z.clone());
    let codomain = triple(x.clone(), y.clone(), z.clone());
    let cod = codomain.clone();
    let cod2 = codomain.clone();
    build_table(
        format!("curry3[{}, {}, {}]", x, y, z),
        domain,
        codomain.clone(),
        move |pat| match pat {
            Pattern::Basepoint { .. } => Ok(basepoint(&cod)),
            Pattern::Pair { l, r } => match &**l {
                Pattern::Basepoint { .. } => Ok(basepoint(&cod)),
                Pattern::Pair { l: p, r: q } => {
                    Ok(triple_pt(p.to_term(), q.to_term(), r.to_term()))
                }
                _ => Err(Error::ShapeMismatch("left-nested domain expected".to_string())),
            },
            _ => Err(Error::ShapeMismatch("binary domain expected".to_string())),
        },
        move |fam, args, slots| {
            let args_t = pats_to_terms(args);
            let slots_t = pats_to_terms(slots);
            match (fam.node.0.as_slice(), fam.kind) {
                // Glue of the outer smash: collapse, or become the slot-2 glue.
                ([], PushKind::PushL) => match &args[0] {
                    Pattern::Basepoint { .. } => Ok(refl(basepoint(&cod2))),
                    Pattern::Pair { l, r } => Ok(root_gen(
                        &cod2,
                        PushKind::Push2,
                        vec![l.to_term(), r.to_term()],
                    )),
                    _ => Err(Error::ShapeMismatch("pair pattern expected".to_string())),
                },
                ([], PushKind::PushR) => Ok(refl(basepoint(&cod2))),
                // Glue of the inner smash, seen under the context `<-, z>`.
                ([Step::L], PushKind::PushL) => Ok(root_gen(
                    &cod2,
                    PushKind::Push1,
                    vec![args_t[0].clone(), slots_t[0].clone()],
                )),
                ([Step::L], PushKind::PushR) => Ok(root_gen(
                    &cod2,
                    PushKind::Push0,
                    vec![args_t[0].clone(), slots_t[0].clone()],
                )),
                // Deeper families relocate into the matching ternary slot.
                ([Step::L, Step::L, ..], _) => {
                    let mut node = vec![Step::T(0)];
                    node.extend(fam.node.0[2..].to_vec());
                    Ok(gen(&cod2, NodePath(node), fam.kind, args_t, slots_t))
                }
                ([Step::L, Step::R, ..], _) => {
                    let mut node = vec![Step::T(1)];
                    node.extend(fam.node.0[2..].to_vec());
                    Ok(gen(&cod2, NodePath(node), fam.kind, args_t, slots_t))
                }
                ([Step::R, ..], _) => {
                    // Inside Z; the outermost slot holds a point of `X ^ Y`.
                    match slots.last().expect("outer slot") {
                        Pattern::Basepoint { .. } => Ok(refl(basepoint(&cod2))),
                        Pattern::Pair { l, r } => {
                            let mut node = vec![Step::T(2)];
                            node.extend(fam.node.0[1..].to_vec());
                            let mut new_slots = slots_t[..slots_t.len() - 1].to_vec();
                            new_slots.push(l.to_term());
                            new_slots.push(r.to_term());
                            Ok(gen(&cod2, NodePath(node), fam.kind, args_t, new_slots))
                        }
                        _ => Err(Error::ShapeMismatch("pair pattern expected".to_string())),
                    }
                }
                _ => Err(Error::ShapeMismatch(format!(
                    "unexpected generator family {} for curry3",
                    fam.tag()
                ))),
            }
        },
        refl(basepoint(&codomain)),
    )
}

/// `^(X, Y, Z) -> (X ^ Y) ^ Z`.
pub fn from_triple(x: &Shape, y: &Shape, z: &Shape) -> Result<MapDef> {
    let domain = triple(x.clone(), y.clone(), z.clone());
    let codomain = smash(smash(x.clone(), y.clone()), z.clone());
    let cod = codomain.clone();
    let cod2 = codomain.clone();
    build_table(
        format!("uncurry3[{}, {}, {}]", x, y, z),
        domain,
        codomain.clone(),
        move |pat| match pat {
            Pattern::Basepoint { .. } => Ok(basepoint(&cod)),
            Pattern::TriplePt { a, b, c } => {
                Ok(pair(pair(a.to_term(), b.to_term()), c.to_term()))
            }
            _ => Err(Error::ShapeMismatch("ternary domain expected".to_string())),
        },
        move |fam, args, slots| {
            let args_t = pats_to_terms(args);
            let slots_t = pats_to_terms(slots);
            match (fam.node.0.as_slice(), fam.kind) {
                // Slot-0 glue `<*, y, z> = *` becomes the two-hop wall
                // `<<*, y>, z> = <*, z> = *`.
                ([], PushKind::Push0) => Ok(comp(vec![
                    gen(
                        &cod2,
                        NodePath(vec![Step::L]),
                        PushKind::PushR,
                        vec![args_t[0].clone()],
                        vec![args_t[1].clone()],
                    ),
                    root_gen(&cod2, PushKind::PushR, vec![args_t[1].clone()]),
                ])),
                ([], PushKind::Push1) => Ok(comp(vec![
                    gen(
                        &cod2,
                        NodePath(vec![Step::L]),
                        PushKind::PushL,
                        vec![args_t[0].clone()],
                        vec![args_t[1].clone()],
                    ),
                    root_gen(&cod2, PushKind::PushR, vec![args_t[1].clone()]),
                ])),
                ([], PushKind::Push2) => Ok(root_gen(
                    &cod2,
                    PushKind::PushL,
                    vec![pair(args_t[0].clone(), args_t[1].clone())],
                )),
                // Families inside a slot relocate under the matching context.
                ([Step::T(0), ..], _) => {
                    let mut node = vec![Step::L, Step::L];
                    node.extend(fam.node.0[1..].to_vec());
                    Ok(gen(&cod2, NodePath(node), fam.kind, args_t, slots_t))
                }
                ([Step::T(1), ..], _) => {
                    let mut node = vec![Step::L, Step::R];
                    node.extend(fam.node.0[1..].to_vec());
                    Ok(gen(&cod2, NodePath(node), fam.kind, args_t, slots_t))
                }
                ([Step::T(2), ..], _) => {
                    let mut node = vec![Step::R];
                    node.extend(fam.node.0[1..].to_vec());
                    // The two bystander slots merge into one pair term.
                    let n = slots_t.len();
                    let mut new_slots = slots_t[..n - 2].to_vec();
                    new_slots.push(pair(slots_t[n - 2].clone(), slots_t[n - 1].clone()));
                    Ok(gen(&cod2, NodePath(node), fam.kind, args_t, new_slots))
                }
                _ => Err(Error::ShapeMismatch(format!(
                    "unexpected generator family {} for uncurry3",
                    fam.tag()
                ))),
            }
        },
        refl(basepoint(&codomain)),
    )
}

// ---------------------------------------------------------------------------
// Ternary slot permutation
// ---------------------------------------------------------------------------

/// Permute the slots of a ternary smash: `<t0, t1, t2>` maps to
/// `<t_perm[0], t_perm[1], t_perm[2]>`.
pub fn permute_triple(slots3: [&Shape; 3], perm: [usize; 3]) -> Result<MapDef> {
    let domain = triple(slots3[0].clone(), slots3[1].clone(), slots3[2].clone());
    let codomain = triple(
        slots3[perm[0]].clone(),
        slots3[perm[1]].clone(),
        slots3[perm[2]].clone(),
    );
    let cod = codomain.clone();
    let cod2 = codomain.clone();
    build_table(
        format!("rotate3[{}{}{}]", perm[0], perm[1], perm[2]),
        domain,
        codomain.clone(),
        move |pat| match pat {
            Pattern::Basepoint { .. } => Ok(basepoint(&cod)),
            Pattern::TriplePt { a, b, c } => {
                let ts = [a.to_term(), b.to_term(), c.to_term()];
                Ok(triple_pt(ts[perm[0]].clone(), ts[perm[1]].clone(), ts[perm[2]].clone()))
            }
            _ => Err(Error::ShapeMismatch("ternary domain expected".to_string())),
        },
        move |fam, args, slots| {
            let args_t = pats_to_terms(args);
            let slots_t = pats_to_terms(slots);
            let old_i = if fam.node.is_root() {
                match fam.kind {
                    PushKind::Push0 => 0,
                    PushKind::Push1 => 1,
                    PushKind::Push2 => 2,
                    _ => return Err(Error::ShapeMismatch("ternary glue expected".to_string())),
                }
            } else {
                match fam.node.0[0] {
                    Step::T(i) => i,
                    _ => return Err(Error::ShapeMismatch("ternary step expected".to_string())),
                }
            };
            let new_i = perm.iter().position(|&p| p == old_i).expect("permutation");
            let old_others: Vec<usize> = (0..3).filter(|&j| j != old_i).collect();
            let new_others: Vec<usize> = (0..3).filter(|&m| m != new_i).collect();
            // Bystander contents: the root glue carries them as arguments,
            // deeper families as the last two context slots.
            let pool: Vec<Term> = if fam.node.is_root() {
                args_t.clone()
            } else {
                slots_t[slots_t.len() - 2..].to_vec()
            };
            let content = |old_j: usize| -> Term {
                let idx = old_others.iter().position(|&j| j == old_j).expect("bystander");
                pool[idx].clone()
            };
            let reseated: Vec<Term> = new_others.iter().map(|&m| content(perm[m])).collect();
            if fam.node.is_root() {
                let kind = [PushKind::Push0, PushKind::Push1, PushKind::Push2][new_i];
                Ok(root_gen(&cod2, kind, reseated))
            } else {
                let mut node = vec![Step::T(new_i)];
                node.extend(fam.node.0[1..].to_vec());
                let mut new_slots = slots_t[..slots_t.len() - 2].to_vec();
                new_slots.extend(reseated);
                Ok(gen(&cod2, NodePath(node), fam.kind, args_t, new_slots))
            }
        },
        refl(basepoint(&codomain)),
    )
}

// ---------------------------------------------------------------------------
// Smash functor
// ---------------------------------------------------------------------------

/// `f ^ g : A ^ B -> X ^ Y` for pointed maps `f : A -> X`, `g : B -> Y`.
pub fn smash_functor(f: &MapDef, g: &MapDef) -> Result<MapDef> {
    let (a, b) = (f.domain(), g.domain());
    let (x, y) = (f.codomain(), g.codomain());
    let domain = smash(a.clone(), b.clone());
    let codomain = smash(x.clone(), y.clone());
    let cod = codomain.clone();
    let cod2 = codomain.clone();
    let (fc, gc) = (f.clone(), g.clone());
    let (fc2, gc2) = (f.clone(), g.clone());
    let (xc, yc) = (x.clone(), y.clone());
    build_table(
        format!("({} ^ {})", f.name(), g.name()),
        domain,
        codomain.clone(),
        move |pat| match pat {
            Pattern::Basepoint { .. } => Ok(basepoint(&cod)),
            Pattern::Pair { l, r } => Ok(pair(
                eval_point(&fc, &l.to_term())?,
                eval_point(&gc, &r.to_term())?,
            )),
            _ => Err(Error::ShapeMismatch("binary domain expected".to_string())),
        },
        move |fam, args, slots| {
            let args_t = pats_to_terms(args);
            let slots_t = pats_to_terms(slots);
            match (fam.node.0.as_slice(), fam.kind) {
                ([], PushKind::PushL) => {
                    let fa = eval_point(&fc2, &args_t[0])?;
                    Ok(comp(vec![
                        ap_ctx(
                            Ctx::PairR { left: fa.clone(), ctx: Box::new(Ctx::hole(&yc)) },
                            pointedness_path(&gc2),
                        ),
                        root_gen(&cod2, PushKind::PushL, vec![fa]),
                    ]))
                }
                ([], PushKind::PushR) => {
                    let gb = eval_point(&gc2, &args_t[0])?;
                    Ok(comp(vec![
                        ap_ctx(
                            Ctx::PairL { ctx: Box::new(Ctx::hole(&xc)), right: gb.clone() },
                            pointedness_path(&fc2),
                        ),
                        root_gen(&cod2, PushKind::PushR, vec![gb]),
                    ]))
                }
                ([Step::L, ..], _) => {
                    let inner = gen(
                        &fc2.domain(),
                        NodePath(fam.node.0[1..].to_vec()),
                        fam.kind,
                        args_t,
                        slots_t[..slots_t.len() - 1].to_vec(),
                    );
                    let gb = eval_point(&gc2, &slots_t[slots_t.len() - 1])?;
                    Ok(ap_ctx(
                        Ctx::PairL { ctx: Box::new(Ctx::hole(&xc)), right: gb },
                        ap(&fc2, inner),
                    ))
                }
                ([Step::R, ..], _) => {
                    let inner = gen(
                        &gc2.domain(),
                        NodePath(fam.node.0[1..].to_vec()),
                        fam.kind,
                        args_t,
                        slots_t[..slots_t.len() - 1].to_vec(),
                    );
                    let fa = eval_point(&fc2, &slots_t[slots_t.len() - 1])?;
                    Ok(ap_ctx(
                        Ctx::PairR { left: fa, ctx: Box::new(Ctx::hole(&yc)) },
                        ap(&gc2, inner),
                    ))
                }
                _ => Err(Error::ShapeMismatch(format!(
                    "unexpected generator family {} for smash functor",
                    fam.tag()
                ))),
            }
        },
        refl(basepoint(&codomain)),
    )
}

// ---------------------------------------------------------------------------
// Unitors
// ---------------------------------------------------------------------------

/// `I ^ B -> B`: collapse the unit on the left.
pub fn left_unitor(b: &Shape) -> Result<MapDef> {
    let domain = smash(unit_shape(), b.clone());
    let codomain = b.clone();
    let cod = codomain.clone();
    let cod2 = codomain.clone();
    build_table(
        format!("lambda[{}]", b),
        domain,
        codomain.clone(),
        move |pat| match pat {
            Pattern::Basepoint { .. } => Ok(basepoint(&cod)),
            Pattern::Pair { l, r } => match &**l {
                Pattern::Basepoint { .. } => Ok(basepoint(&cod)),
                Pattern::Element { .. } => Ok(r.to_term()),
                _ => Err(Error::ShapeMismatch("unit pattern expected".to_string())),
            },
            _ => Err(Error::ShapeMismatch("binary domain expected".to_string())),
        },
        move |fam, args, slots| match (fam.node.0.as_slice(), fam.kind) {
            ([], _) => Ok(refl(basepoint(&cod2))),
            ([Step::R, ..], _) => {
                // Inside B; the outermost slot is the unit coordinate.
                let slots_t = pats_to_terms(slots);
                match slots.last().expect("unit slot") {
                    Pattern::Basepoint { .. } => Ok(refl(basepoint(&cod2))),
                    Pattern::Element { .. } => Ok(gen(
                        &cod2,
                        NodePath(fam.node.0[1..].to_vec()),
                        fam.kind,
                        pats_to_terms(args),
                        slots_t[..slots_t.len() - 1].to_vec(),
                    )),
                    _ => Err(Error::ShapeMismatch("unit pattern expected".to_string())),
                }
            }
            _ => Err(Error::ShapeMismatch(format!(
                "unexpected generator family {} for unitor",
                fam.tag()
            ))),
        },
        refl(basepoint(&codomain)),
    )
}

/// `A ^ I -> A`: collapse the unit on the right.
pub fn right_unitor(a: &Shape) -> Result<MapDef> {
    let domain = smash(a.clone(), unit_shape());
    let codomain = a.clone();
    let cod = codomain.clone();
    let cod2 = codomain.clone();
    build_table(
        format!("rho[{}]", a),
        domain,
        codomain.clone(),
        move |pat| match pat {
            Pattern::Basepoint { .. } => Ok(basepoint(&cod)),
            Pattern::Pair { l, r } => match &**r {
                Pattern::Basepoint { .. } => Ok(basepoint(&cod)),
                Pattern::Element { .. } => Ok(l.to_term()),
                _ => Err(Error::ShapeMismatch("unit pattern expected".to_string())),
            },
            _ => Err(Error::ShapeMismatch("binary domain expected".to_string())),
        },
        move |fam, args, slots| match (fam.node.0.as_slice(), fam.kind) {
            ([], _) => Ok(refl(basepoint(&cod2))),
            ([Step::L, ..], _) => {
                let slots_t = pats_to_terms(slots);
                match slots.last().expect("unit slot") {
                    Pattern::Basepoint { .. } => Ok(refl(basepoint(&cod2))),
                    Pattern::Element { .. } => Ok(gen(
                        &cod2,
                        NodePath(fam.node.0[1..].to_vec()),
                        fam.kind,
                        pats_to_terms(args),
                        slots_t[..slots_t.len() - 1].to_vec(),
                    )),
                    _ => Err(Error::ShapeMismatch("unit pattern expected".to_string())),
                }
            }
            _ => Err(Error::ShapeMismatch(format!(
                "unexpected generator family {} for unitor",
                fam.tag()
            ))),
        },
        refl(basepoint(&codomain)),
    )
}

/// `B -> I ^ B`: section of the left unitor.
pub fn left_unitor_inv(b: &Shape) -> Result<MapDef> {
    let domain = b.clone();
    let codomain = smash(unit_shape(), b.clone());
    let cod2 = codomain.clone();
    let pointedness = root_gen(&codomain, PushKind::PushL, vec![unit_dot()]);
    build_table(
        format!("lambda_inv[{}]", b),
        domain,
        codomain.clone(),
        move |pat| Ok(pair(unit_dot(), pat.to_term())),
        move |fam, args, slots| {
            let mut node = vec![Step::R];
            node.extend(fam.node.0.clone());
            let mut new_slots = pats_to_terms(slots);
            new_slots.push(unit_dot());
            Ok(gen(&cod2, NodePath(node), fam.kind, pats_to_terms(args), new_slots))
        },
        pointedness,
    )
}

/// `A -> A ^ I`: section of the right unitor.
pub fn right_unitor_inv(a: &Shape) -> Result<MapDef> {
    let domain = a.clone();
    let codomain = smash(a.clone(), unit_shape());
    let cod2 = codomain.clone();
    let pointedness = root_gen(&codomain, PushKind::PushR, vec![unit_dot()]);
    build_table(
        format!("rho_inv[{}]", a),
        domain,
        codomain.clone(),
        move |pat| Ok(pair(pat.to_term(), unit_dot())),
        move |fam, args, slots| {
            let mut node = vec![Step::L];
            node.extend(fam.node.0.clone());
            let mut new_slots = pats_to_terms(slots);
            new_slots.push(unit_dot());
            Ok(gen(&cod2, NodePath(node), fam.kind, pats_to_terms(args), new_slots))
        },
        pointedness,
    )
}

// ---------------------------------------------------------------------------
// Associator
// ---------------------------------------------------------------------------

/// `(X ^ Y) ^ Z -> X ^ (Y ^ Z)`, computed through the ternary smash:
/// curry, rotate the slots, un-curry, swap.
pub fn associator(x: &Shape, y: &Shape, z: &Shape) -> Result<MapDef> {
    Ok(MapDef::composite(vec![
        to_triple(x, y, z)?,
        permute_triple([x, y, z], [1, 2, 0])?,
        from_triple(y, z, x)?,
        swap_map(&smash(y.clone(), z.clone()), x)?,
    ]))
}

/// `X ^ (Y ^ Z) -> (X ^ Y) ^ Z`, by the inverse route.
pub fn associator_inv(x: &Shape, y: &Shape, z: &Shape) -> Result<MapDef> {
    Ok(MapDef::composite(vec![
        swap_map(x, &smash(y.clone(), z.clone()))?,
        to_triple(y, z, x)?,
        permute_triple([y, z, x], [2, 0, 1])?,
        from_triple(x, y, z)?,
    ]))
}

// ---------------------------------------------------------------------------
// Named diagrams
// ---------------------------------------------------------------------------

/// Two parallel composites asserted homotopic.
#[derive(Debug, Clone)]
pub struct DiagramSides {
    pub name: String,
    pub lhs: Vec<MapDef>,
    pub rhs: Vec<MapDef>,
    pub lhs_labels: Vec<String>,
    pub rhs_labels: Vec<String>,
}

impl DiagramSides {
    pub fn lhs_map(&self) -> MapDef {
        side_map(&self.lhs)
    }
    pub fn rhs_map(&self) -> MapDef {
        side_map(&self.rhs)
    }
    pub fn domain(&self) -> Shape {
        self.lhs_map().domain()
    }
    pub fn codomain(&self) -> Shape {
        self.lhs_map().codomain()
    }
}

fn side_map(stages: &[MapDef]) -> MapDef {
    if stages.len() == 1 {
        stages[0].clone()
    } else {
        MapDef::composite(stages.to_vec())
    }
}

pub fn diagram_names() -> &'static [&'static str] {
    &[
        "pentagon",
        "hexagon",
        "triangle",
        "involution",
        "naturality-alpha",
        "naturality-beta",
        "unit-naturality-lambda",
        "unit-naturality-rho",
        "unitor-roundtrip-lambda",
        "unitor-roundtrip-rho",
    ]
}

/// Build a named coherence diagram over generic leaves (and the fixed unit).
pub fn diagram(name: &str) -> Result<DiagramSides> {
    let (a, b, c, d) = (term::leaf("A"), term::leaf("B"), term::leaf("C"), term::leaf("D"));
    let (x, y, z) = (term::leaf("X"), term::leaf("Y"), term::leaf("Z"));
    match name {
        "pentagon" => Ok(DiagramSides {
            name: name.to_string(),
            lhs: vec![
                associator(&smash(a.clone(), b.clone()), &c, &d)?,
                associator(&a, &b, &smash(c.clone(), d.clone()))?,
            ],
            lhs_labels: vec!["alpha[A^B, C, D]".into(), "alpha[A, B, C^D]".into()],
            rhs: vec![
                smash_functor(&associator(&a, &b, &c)?, &MapDef::identity(&d))?,
                associator(&a, &smash(b.clone(), c.clone()), &d)?,
                smash_functor(&MapDef::identity(&a), &associator(&b, &c, &d)?)?,
            ],
            rhs_labels: vec![
                "alpha[A, B, C] ^ 1[D]".into(),
                "alpha[A, B^C, D]".into(),
                "1[A] ^ alpha[B, C, D]".into(),
            ],
        }),
        "hexagon" => Ok(DiagramSides {
            name: name.to_string(),
            lhs: vec![
                associator(&a, &b, &c)?,
                swap_map(&a, &smash(b.clone(), c.clone()))?,
                associator(&b, &c, &a)?,
            ],
            lhs_labels: vec![
                "alpha[A, B, C]".into(),
                "beta[A, B^C]".into(),
                "alpha[B, C, A]".into(),
            ],
            rhs: vec![
                smash_functor(&swap_map(&a, &b)?, &MapDef::identity(&c))?,
                associator(&b, &a, &c)?,
                smash_functor(&MapDef::identity(&b), &swap_map(&a, &c)?)?,
            ],
            rhs_labels: vec![
                "beta[A, B] ^ 1[C]".into(),
                "alpha[B, A, C]".into(),
                "1[B] ^ beta[A, C]".into(),
            ],
        }),
        "triangle" => {
            let i = unit_shape();
            Ok(DiagramSides {
                name: name.to_string(),
                lhs: vec![
                    associator(&a, &i, &b)?,
                    smash_functor(&MapDef::identity(&a), &left_unitor(&b)?)?,
                ],
                lhs_labels: vec!["alpha[A, I, B]".into(), "1[A] ^ lambda[B]".into()],
                rhs: vec![smash_functor(&right_unitor(&a)?, &MapDef::identity(&b))?],
                rhs_labels: vec!["rho[A] ^ 1[B]".into()],
            })
        }
        "involution" => Ok(DiagramSides {
            name: name.to_string(),
            lhs: vec![swap_map(&a, &b)?, swap_map(&b, &a)?],
            lhs_labels: vec!["beta[A, B]".into(), "beta[B, A]".into()],
            rhs: vec![MapDef::identity(&smash(a.clone(), b.clone()))],
            rhs_labels: vec!["1[A^B]".into()],
        }),
        "naturality-alpha" => {
            let f = abstract_map("f", &a, &x);
            let g = abstract_map("g", &b, &y);
            let h = abstract_map("h", &c, &z);
            Ok(DiagramSides {
                name: name.to_string(),
                lhs: vec![
                    smash_functor(&smash_functor(&f, &g)?, &h)?,
                    associator(&x, &y, &z)?,
                ],
                lhs_labels: vec!["(f ^ g) ^ h".into(), "alpha[X, Y, Z]".into()],
                rhs: vec![
                    associator(&a, &b, &c)?,
                    smash_functor(&f, &smash_functor(&g, &h)?)?,
                ],
                rhs_labels: vec!["alpha[A, B, C]".into(), "f ^ (g ^ h)".into()],
            })
        }
        "naturality-beta" => {
            let f = abstract_map("f", &a, &x);
            let g = abstract_map("g", &b, &y);
            Ok(DiagramSides {
                name: name.to_string(),
                lhs: vec![smash_functor(&f, &g)?, swap_map(&x, &y)?],
                lhs_labels: vec!["f ^ g".into(), "beta[X, Y]".into()],
                rhs: vec![swap_map(&a, &b)?, smash_functor(&g, &f)?],
                rhs_labels: vec!["beta[A, B]".into(), "g ^ f".into()],
            })
        }
        "unit-naturality-lambda" => {
            let i = unit_shape();
            let f = abstract_map("f", &a, &x);
            Ok(DiagramSides {
                name: name.to_string(),
                lhs: vec![left_unitor(&a)?, f.clone()],
                lhs_labels: vec!["lambda[A]".into(), "f".into()],
                rhs: vec![smash_functor(&MapDef::identity(&i), &f)?, left_unitor(&x)?],
                rhs_labels: vec!["1[I] ^ f".into(), "lambda[X]".into()],
            })
        }
        "unit-naturality-rho" => {
            let i = unit_shape();
            let f = abstract_map("f", &a, &x);
            Ok(DiagramSides {
                name: name.to_string(),
                lhs: vec![right_unitor(&a)?, f.clone()],
                lhs_labels: vec!["rho[A]".into(), "f".into()],
                rhs: vec![smash_functor(&f, &MapDef::identity(&i))?, right_unitor(&x)?],
                rhs_labels: vec!["f ^ 1[I]".into(), "rho[X]".into()],
            })
        }
        "unitor-roundtrip-lambda" => Ok(DiagramSides {
            name: name.to_string(),
            lhs: vec![left_unitor_inv(&b)?, left_unitor(&b)?],
            lhs_labels: vec!["lambda_inv[B]".into(), "lambda[B]".into()],
            rhs: vec![MapDef::identity(&b)],
            rhs_labels: vec!["1[B]".into()],
        }),
        "unitor-roundtrip-rho" => Ok(DiagramSides {
            name: name.to_string(),
            lhs: vec![right_unitor_inv(&a)?, right_unitor(&a)?],
            lhs_labels: vec!["rho_inv[A]".into(), "rho[A]".into()],
            rhs: vec![MapDef::identity(&a)],
            rhs_labels: vec!["1[A]".into()],
        }),
        _ => Err(Error::UnknownDiagram(name.to_string())),
    }
}

/// Render a diagram as a DOT digraph: two chains of labeled edges between a
/// shared source and target node.
pub fn dot_export(d: &DiagramSides) -> String {
    let mut out = String::new();
    out.push_str(&format!("digraph \"{}\" {{\n", d.name));
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=box, fontname=\"monospace\"];\n");
    out.push_str(&format!("  s [label=\"{}\"];\n", d.domain()));
    out.push_str(&format!("  t [label=\"{}\"];\n", d.codomain()));
    let mut emit_side = |stages: &[MapDef], labels: &[String], prefix: &str| {
        let mut prev = "s".to_string();
        for (i, stage) in stages.iter().enumerate() {
            let next = if i + 1 == stages.len() {
                "t".to_string()
            } else {
                let id = format!("{}{}", prefix, i);
                out.push_str(&format!("  {} [label=\"{}\"];\n", id, stage.codomain()));
                id
            };
            let label = labels.get(i).cloned().unwrap_or_else(|| stage.name());
            out.push_str(&format!("  {} -> {} [label=\"{}\"];\n", prev, next, label));
            prev = next;
        }
    };
    emit_side(&d.lhs, &d.lhs_labels, "l");
    emit_side(&d.rhs, &d.rhs_labels, "r");
    out.push_str("}\n");
    out
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::{ap_eval, normalize};
    use crate::term::{validate_map, var};

    fn lv(name: &str) -> Term {
        var(&name.to_lowercase(), &Leaf::generic(name))
    }

    #[test]
    fn every_diagram_stage_validates_and_chains() {
        for name in diagram_names() {
            let d = diagram(name).unwrap();
            for m in d.lhs.iter().chain(d.rhs.iter()) {
                validate_map(m).unwrap_or_else(|e| panic!("{name}: {e}"));
            }
            assert_eq!(d.lhs_map().domain(), d.rhs_map().domain(), "{name} domain");
            assert_eq!(d.lhs_map().codomain(), d.rhs_map().codomain(), "{name} codomain");
        }
    }

    #[test]
    fn inverse_routes_validate_over_compound_factors() {
        let (a, b, c, d) = (term::leaf("A"), term::leaf("B"), term::leaf("C"), term::leaf("D"));
        let ab = smash(a.clone(), b.clone());
        validate_map(&associator_inv(&a, &b, &c).unwrap()).unwrap();
        validate_map(&associator_inv(&ab, &c, &d).unwrap()).unwrap();
        validate_map(&swap_map(&ab, &c).unwrap()).unwrap();
        validate_map(&left_unitor(&ab).unwrap()).unwrap();
        validate_map(&right_unitor(&ab).unwrap()).unwrap();
        validate_map(&left_unitor_inv(&ab).unwrap()).unwrap();
        validate_map(&right_unitor_inv(&ab).unwrap()).unwrap();
    }

    #[test]
    fn repeated_leaf_names_are_rejected() {
        let a = term::leaf("A");
        let ab = smash(a.clone(), term::leaf("B"));
        // `(A ^ B) ^ (C ^ A)` repeats A, which would alias pattern variables.
        let bad = swap_map(&ab, &smash(term::leaf("C"), a.clone())).unwrap();
        assert!(matches!(validate_map(&bad), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn swap_sends_left_glue_to_right_glue() {
        let (a, b) = (term::leaf("A"), term::leaf("B"));
        let sw = swap_map(&a, &b).unwrap();
        let dom = smash(a.clone(), b.clone());
        let cod = smash(b.clone(), a.clone());
        let image = ap_eval(&sw, &root_gen(&dom, PushKind::PushL, vec![lv("A")])).unwrap();
        assert_eq!(
            normalize(&image).unwrap(),
            normalize(&root_gen(&cod, PushKind::PushR, vec![lv("A")])).unwrap()
        );
    }

    #[test]
    fn curry3_relocates_contextual_glue() {
        let (a, b, c) = (term::leaf("A"), term::leaf("B"), term::leaf("C"));
        let tt = to_triple(&a, &b, &c).unwrap();
        let dom = smash(smash(a.clone(), b.clone()), c.clone());
        let contextual = gen(
            &dom,
            NodePath(vec![Step::L]),
            PushKind::PushL,
            vec![lv("A")],
            vec![lv("C")],
        );
        let image = ap_eval(&tt, &contextual).unwrap();
        let expected = root_gen(
            &triple(a.clone(), b.clone(), c.clone()),
            PushKind::Push1,
            vec![lv("A"), lv("C")],
        );
        assert_eq!(normalize(&image).unwrap(), normalize(&expected).unwrap());
    }

    #[test]
    fn associator_matches_hand_computed_letters() {
        let (a, b, c) = (term::leaf("A"), term::leaf("B"), term::leaf("C"));
        let al = associator(&a, &b, &c).unwrap();
        let dom = smash(smash(a.clone(), b.clone()), c.clone());
        let bc = smash(b.clone(), c.clone());
        let cod = smash(a.clone(), bc.clone());

        // pl(<a, b>) maps to ap_{<a, ->}(pl(b)) . pl(a).
        let img =
            normalize(&ap(&al, root_gen(&dom, PushKind::PushL, vec![pair(lv("A"), lv("B"))])))
                .unwrap();
        let want = normalize(&comp(vec![
            ap_ctx(
                Ctx::PairR { left: lv("A"), ctx: Box::new(Ctx::hole(&bc)) },
                root_gen(&bc, PushKind::PushL, vec![lv("B")]),
            ),
            root_gen(&cod, PushKind::PushL, vec![lv("A")]),
        ]))
        .unwrap();
        assert_eq!(img, want);

        // ap_{<-, c>}(pl(a)) maps to ap_{<a, ->}(pr(c)) . pl(a).
        let img = normalize(&ap(
            &al,
            gen(&dom, NodePath(vec![Step::L]), PushKind::PushL, vec![lv("A")], vec![lv("C")]),
        ))
        .unwrap();
        let want = normalize(&comp(vec![
            ap_ctx(
                Ctx::PairR { left: lv("A"), ctx: Box::new(Ctx::hole(&bc)) },
                root_gen(&bc, PushKind::PushR, vec![lv("C")]),
            ),
            root_gen(&cod, PushKind::PushL, vec![lv("A")]),
        ]))
        .unwrap();
        assert_eq!(img, want);

        // ap_{<-, c>}(pr(b)) maps to pr(<b, c>).
        let img = normalize(&ap(
            &al,
            gen(&dom, NodePath(vec![Step::L]), PushKind::PushR, vec![lv("B")], vec![lv("C")]),
        ))
        .unwrap();
        let want =
            normalize(&root_gen(&cod, PushKind::PushR, vec![pair(lv("B"), lv("C"))])).unwrap();
        assert_eq!(img, want);

        // The walls pl(*) and pr(c) both collapse.
        let img = normalize(&ap(
            &al,
            root_gen(&dom, PushKind::PushL, vec![basepoint(&smash(a.clone(), b.clone()))]),
        ))
        .unwrap();
        assert!(img.is_refl());
        let img = normalize(&ap(&al, root_gen(&dom, PushKind::PushR, vec![lv("C")]))).unwrap();
        assert!(img.is_refl());
    }

    #[test]
    fn pentagon_sides_agree_on_hand_computed_deep_letter() {
        let d = diagram("pentagon").unwrap();
        let dom = d.domain();
        let cod = d.codomain();
        // ap_{<<-, c>, d>}(pl(a)) maps to ap_{<a, ->}(pr(<c, d>)) . pl(a),
        // where pr(<c, d>) lives at the root of B ^ (C ^ D).
        let deep = gen(
            &dom,
            NodePath(vec![Step::L, Step::L]),
            PushKind::PushL,
            vec![lv("A")],
            vec![lv("C"), lv("D")],
        );
        let bcd = match &cod {
            Shape::Smash { right, .. } => (**right).clone(),
            _ => unreachable!(),
        };
        let want = normalize(&comp(vec![
            ap_ctx(
                Ctx::PairR { left: lv("A"), ctx: Box::new(Ctx::hole(&bcd)) },
                root_gen(&bcd, PushKind::PushR, vec![pair(lv("C"), lv("D"))]),
            ),
            root_gen(&cod, PushKind::PushL, vec![lv("A")]),
        ]))
        .unwrap();
        let lhs = normalize(&ap(&d.lhs_map(), deep.clone())).unwrap();
        let rhs = normalize(&ap(&d.rhs_map(), deep)).unwrap();
        assert_eq!(lhs, want);
        assert_eq!(rhs, want);
    }

    #[test]
    fn involution_composite_is_letterwise_identity() {
        let d = diagram("involution").unwrap();
        let dom = d.domain();
        for p in [
            root_gen(&dom, PushKind::PushL, vec![lv("A")]),
            root_gen(&dom, PushKind::PushR, vec![lv("B")]),
        ] {
            let img = normalize(&ap(&d.lhs_map(), p.clone())).unwrap();
            assert_eq!(img, normalize(&p).unwrap());
        }
    }

    #[test]
    fn hexagon_sides_agree_on_points_and_letters() {
        let d = diagram("hexagon").unwrap();
        let p = pair(pair(lv("A"), lv("B")), lv("C"));
        let lp = eval_point(&d.lhs_map(), &p).unwrap();
        let rp = eval_point(&d.rhs_map(), &p).unwrap();
        assert_eq!(lp, pair(lv("B"), pair(lv("C"), lv("A"))));
        assert_eq!(lp, rp);
        let dom = d.domain();
        let glue = root_gen(&dom, PushKind::PushL, vec![pair(lv("A"), lv("B"))]);
        let lw = normalize(&ap(&d.lhs_map(), glue.clone())).unwrap();
        let rw = normalize(&ap(&d.rhs_map(), glue)).unwrap();
        assert_eq!(lw, rw);
        assert!(!lw.is_refl());
    }

    #[test]
    fn unitors_collapse_the_unit_coordinate() {
        let b = term::leaf("B");
        let lu = left_unitor(&b).unwrap();
        assert_eq!(eval_point(&lu, &pair(unit_dot(), lv("B"))).unwrap(), lv("B"));
        assert_eq!(
            eval_point(&lu, &pair(basepoint(&unit_shape()), lv("B"))).unwrap(),
            basepoint(&b)
        );
        // Round trip on points is the identity.
        let lui = left_unitor_inv(&b).unwrap();
        let back = eval_point(&lu, &eval_point(&lui, &lv("B")).unwrap()).unwrap();
        assert_eq!(back, lv("B"));
    }

    #[test]
    fn unitor_inverse_relocates_glue_of_compound_factor() {
        let (a, b) = (term::leaf("A"), term::leaf("B"));
        let ab = smash(a.clone(), b.clone());
        let lui = left_unitor_inv(&ab).unwrap();
        let img = ap_eval(&lui, &root_gen(&ab, PushKind::PushL, vec![lv("A")])).unwrap();
        let iab = smash(unit_shape(), ab.clone());
        let want = gen(
            &iab,
            NodePath(vec![Step::R]),
            PushKind::PushL,
            vec![lv("A")],
            vec![unit_dot()],
        );
        assert_eq!(normalize(&img).unwrap(), normalize(&want).unwrap());
    }

    #[test]
    fn pointedness_of_structure_composites_is_trivial() {
        let (a, b, c) = (term::leaf("A"), term::leaf("B"), term::leaf("C"));
        let al = associator(&a, &b, &c).unwrap();
        assert!(normalize(&pointedness_path(&al)).unwrap().is_refl());
        let lui = left_unitor_inv(&b).unwrap();
        let w = normalize(&pointedness_path(&lui)).unwrap();
        assert_eq!(w.letters.len(), 1);
    }

    #[test]
    fn unknown_diagram_is_reported() {
        assert!(matches!(diagram("heptagon"), Err(Error::UnknownDiagram(_))));
    }

    #[test]
    fn dot_export_contains_both_chains() {
        let d = diagram("pentagon").unwrap();
        let dot = dot_export(&d);
        assert!(dot.starts_with("digraph \"pentagon\""));
        assert!(dot.contains("alpha[A, B^C, D]"));
        assert!(dot.contains("s ->"));
        assert!(dot.contains("-> t"));
        // Identity-sided diagrams still render a single edge.
        let inv = dot_export(&diagram("involution").unwrap());
        assert!(inv.contains("s -> t [label=\"1[A^B]\"]"));
    }
}
