//! Shared machinery for the acceptance suite: deterministic RNG, the
//! pass/fail reporter, random structure-map walks for builder instances, and
//! a random sampler for the free groupoid of a shape's glue generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use smashkit_core::maps::{
    abstract_map, associator, associator_inv, from_triple, permute_triple, swap_map, to_triple,
};
use smashkit_core::term::{
    basepoint, comp, endpoints, eval_point, family_instances, gen, inv, leaf, refl, root_gen,
    shape_generators, smash, triple, Leaf, MapDef, PathExpr, PushKind, Shape, Term,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Print the single pass/fail line for an acceptance criterion, then panic on
/// failure so the test target reports it too.
pub fn report(n: u32, what: &str, r: Result<(), String>) {
    match &r {
        Ok(()) => println!("criterion {} ({}): pass", n, what),
        Err(e) => println!("criterion {} ({}): FAIL - {}", n, what, e),
    }
    if let Err(e) = r {
        panic!("criterion {} failed: {}", n, e);
    }
}

pub fn expect(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

// ---------------------------------------------------------------------------
// Random builder instances (criterion 5)
// ---------------------------------------------------------------------------

/// A parallel pair of maps out of a binary smash tree, equal up to
/// letterwise-identity detours, ready for the cofibre builder.
pub struct BuilderInstance {
    pub f: MapDef,
    pub g: MapDef,
    pub domain: Shape,
}

/// Random binary smash tree over the given distinct leaf names.
fn random_tree(r: &mut ChaCha8Rng, names: &[&str]) -> Shape {
    if names.len() == 1 {
        return leaf(names[0]);
    }
    let cut = r.gen_range(1..names.len());
    smash(random_tree(r, &names[..cut]), random_tree(r, &names[cut..]))
}

/// The structure maps applicable at a shape, each one walk step.
fn moves(s: &Shape) -> Vec<MapDef> {
    let mut out = Vec::new();
    match s {
        Shape::Smash { left, right } => {
            out.push(swap_map(left, right).unwrap());
            if let Shape::Smash { left: l1, right: l2 } = left.as_ref() {
                out.push(associator(l1, l2, right).unwrap());
                out.push(to_triple(l1, l2, right).unwrap());
            }
            if let Shape::Smash { left: r1, right: r2 } = right.as_ref() {
                out.push(associator_inv(left, r1, r2).unwrap());
            }
        }
        Shape::Triple { a, b, c } => {
            out.push(permute_triple([a, b, c], [1, 2, 0]).unwrap());
            out.push(permute_triple([a, b, c], [2, 0, 1]).unwrap());
            out.push(from_triple(a, b, c).unwrap());
        }
        Shape::Leaf { .. } => {}
    }
    out
}

/// A two-stage letterwise-identity detour at a shape: swap out and back for a
/// smash node, rotate and rotate back for an unbiased triple. (Reassociating
/// out and back is deliberately not used: it relocates letters.)
fn detour(s: &Shape) -> Vec<MapDef> {
    match s {
        Shape::Smash { left, right } => vec![
            swap_map(left, right).unwrap(),
            swap_map(right, left).unwrap(),
        ],
        Shape::Triple { a, b, c } => vec![
            permute_triple([a, b, c], [1, 2, 0]).unwrap(),
            permute_triple([b, c, a], [2, 0, 1]).unwrap(),
        ],
        Shape::Leaf { .. } => unreachable!("walk boundaries are compound"),
    }
}

/// Build a random instance with `k` leaves: `k = 1` exercises an abstract map
/// out of a bare leaf; `k >= 2` walks random structure maps and plants one
/// detour into `g`.
pub fn random_instance(r: &mut ChaCha8Rng, k: usize) -> BuilderInstance {
    let names = ["A", "B", "C", "D"];
    if k == 1 {
        let domain = leaf("A");
        let codomain = if r.gen_bool(0.5) {
            smash(leaf("X"), leaf("Y"))
        } else {
            smash(leaf("X"), smash(leaf("Y"), leaf("Z")))
        };
        let f = abstract_map("f", &domain, &codomain);
        return BuilderInstance { g: f.clone(), f, domain };
    }
    let domain = random_tree(r, &names[..k]);
    let steps = r.gen_range(1..=3);
    let mut stages = Vec::new();
    let mut cur = domain.clone();
    for _ in 0..steps {
        let options = moves(&cur);
        let stage = options.choose(r).expect("compound shapes always move").clone();
        cur = stage.codomain();
        stages.push(stage);
    }
    let f = MapDef::composite(stages.clone());
    let at = r.gen_range(0..=stages.len());
    let boundary = if at == 0 { domain.clone() } else { stages[at - 1].codomain() };
    let mut g_stages = stages[..at].to_vec();
    g_stages.extend(detour(&boundary));
    g_stages.extend(stages[at..].iter().cloned());
    let g = MapDef::composite(g_stages);
    BuilderInstance { f, g, domain }
}

/// A freely reduced loop at the basepoint of a compound shape: out along one
/// root glue at fully collapsed arguments, back along a different one.
pub fn codomain_loop(s: &Shape) -> PathExpr {
    match s {
        Shape::Smash { left, right } => comp(vec![
            inv(root_gen(s, PushKind::PushL, vec![basepoint(left)])),
            root_gen(s, PushKind::PushR, vec![basepoint(right)]),
        ]),
        Shape::Triple { a, b, c } => comp(vec![
            inv(root_gen(s, PushKind::Push0, vec![basepoint(b), basepoint(c)])),
            root_gen(s, PushKind::Push1, vec![basepoint(a), basepoint(c)]),
        ]),
        Shape::Leaf { .. } => unreachable!("codomains of builder instances are compound"),
    }
}

// ---------------------------------------------------------------------------
// Free-groupoid sampling (criterion 7)
// ---------------------------------------------------------------------------

/// All glue generator instances of a shape over enumerated leaves, with their
/// endpoints, plus a structure map on the shape for functoriality laws.
pub struct GroupoidArena {
    pub shape: Shape,
    pub map: MapDef,
    gens: Vec<(Term, Term, PathExpr)>,
}

impl GroupoidArena {
    pub fn new(shape: Shape, map: MapDef) -> GroupoidArena {
        let mut gens = Vec::new();
        for fam in shape_generators(&shape) {
            for (args, slots) in family_instances(&fam).expect("enumerated instances") {
                let g = gen(&shape, fam.node.clone(), fam.kind, args, slots);
                let (src, tgt) = endpoints(&g).expect("generator endpoints");
                gens.push((src, tgt, g));
            }
        }
        GroupoidArena { shape, map, gens }
    }

    /// A random composable chain of `steps` signed generators starting at the
    /// source of a random generator. Returns the composite with its endpoints.
    pub fn random_path(&self, r: &mut ChaCha8Rng, steps: usize) -> (PathExpr, Term, Term) {
        let start = {
            let (src, _, _) = self.gens.choose(r).expect("shape has generators");
            src.clone()
        };
        let mut cur = start.clone();
        let mut segs = Vec::new();
        for _ in 0..steps {
            let mut candidates: Vec<(PathExpr, Term)> = Vec::new();
            for (src, tgt, g) in &self.gens {
                if *src == cur {
                    candidates.push((g.clone(), tgt.clone()));
                }
                if *tgt == cur {
                    candidates.push((inv(g.clone()), src.clone()));
                }
            }
            if candidates.is_empty() {
                break;
            }
            let (seg, next) = candidates.choose(r).expect("nonempty").clone();
            segs.push(seg);
            cur = next;
        }
        if segs.is_empty() {
            segs.push(refl(start.clone()));
        }
        (comp(segs), start, cur)
    }

    /// Extend a chain from a given point.
    pub fn random_path_from(
        &self,
        r: &mut ChaCha8Rng,
        from: &Term,
        steps: usize,
    ) -> (PathExpr, Term) {
        let mut cur = from.clone();
        let mut segs = Vec::new();
        for _ in 0..steps {
            let mut candidates: Vec<(PathExpr, Term)> = Vec::new();
            for (src, tgt, g) in &self.gens {
                if *src == cur {
                    candidates.push((g.clone(), tgt.clone()));
                }
                if *tgt == cur {
                    candidates.push((inv(g.clone()), src.clone()));
                }
            }
            if candidates.is_empty() {
                break;
            }
            let (seg, next) = candidates.choose(r).expect("nonempty").clone();
            segs.push(seg);
            cur = next;
        }
        if segs.is_empty() {
            segs.push(refl(from.clone()));
        }
        (comp(segs), cur)
    }
}

/// Three arenas over small enumerated leaves: a binary smash with its swap, a
/// nested ternary with its reassociation, and an unbiased triple with a
/// rotation.
pub fn arenas() -> Vec<GroupoidArena> {
    let a = Shape::Leaf { leaf: Leaf::enumerated("A", &["a1"]) };
    let b = Shape::Leaf { leaf: Leaf::enumerated("B", &["b1", "b2"]) };
    let c = Shape::Leaf { leaf: Leaf::enumerated("C", &["c1"]) };
    vec![
        GroupoidArena::new(smash(a.clone(), b.clone()), swap_map(&a, &b).unwrap()),
        GroupoidArena::new(
            smash(smash(a.clone(), b.clone()), c.clone()),
            associator(&a, &b, &c).unwrap(),
        ),
        GroupoidArena::new(
            triple(a.clone(), b.clone(), c.clone()),
            permute_triple([&a, &b, &c], [1, 2, 0]).unwrap(),
        ),
    ]
}

/// Evaluate `f` on the canonical full variable tuple of its domain.
pub fn image_of_tuple(f: &MapDef) -> Term {
    let tup = smashkit_core::induction::full_tuple_term(&f.domain()).expect("generic domain");
    eval_point(f, &tup).expect("tuple evaluates")
}
