//! Acceptance suite: one test per acceptance criterion, each printing a
//! single pass/fail line (run with `--nocapture` to see them on success).

mod common;

use common::{arenas, codomain_loop, expect, image_of_tuple, random_instance, report, rng};
use rand::Rng;
use smashkit_core::check::run_check;
use smashkit_core::induction::{
    obligations_quadruple, obligations_triple, pattern_collapse, FsHomotopy, Homotopy,
};
use smashkit_core::maps::{associator, diagram, left_unitor, right_unitor, swap_map, to_triple};
use smashkit_core::model::{assign_sizes, check_bijection, check_diagram_all_envs, SetModel};
use smashkit_core::normalize::normalize;
use smashkit_core::term::{
    ap, basepoint, comp, inv, leaf, refl, smash, triple, MapDef, PathExpr,
};
use smashkit_core::Error;

use std::collections::BTreeMap;

fn sizes_map(entries: &[(&str, usize)]) -> BTreeMap<String, usize> {
    entries.iter().map(|(n, s)| (n.to_string(), *s)).collect()
}

#[test]
fn criterion_1_pentagon_squares_discharge_within_budget() {
    report(1, "pentagon discharges in time", (|| {
        let out = run_check("pentagon").map_err(|e| e.to_string())?;
        expect(out.pass(), "pentagon check failed")?;
        expect(
            out.obligations.len() == 8,
            format!("expected 7 squares + pointedness, got {}", out.obligations.len()),
        )?;
        expect(
            out.obligations.iter().all(|o| o.fillable),
            "a pentagon square is not fillable",
        )?;
        expect(
            out.wall_time_ms < 10_000,
            format!("took {} ms, budget is 10s", out.wall_time_ms),
        )
    })());
}

#[test]
fn criterion_2_hexagon_squares_and_wall_columns_agree() {
    report(2, "hexagon squares and wall columns", (|| {
        let out = run_check("hexagon").map_err(|e| e.to_string())?;
        expect(out.pass(), "hexagon check failed")?;
        expect(
            out.obligations.len() == 6,
            format!("expected 5 squares + pointedness, got {}", out.obligations.len()),
        )?;

        // The wall-collapse column of item (iv) must have the same image
        // under both composites of the diagram, letter for letter.
        let d = diagram("hexagon").map_err(|e| e.to_string())?;
        let h = Homotopy::refl(&d.lhs_map(), &d.rhs_map()).map_err(|e| e.to_string())?;
        let obls = obligations_triple(&h).map_err(|e| e.to_string())?;
        let walls: Vec<_> = obls.iter().filter(|o| o.tag == "item-iv").collect();
        expect(!walls.is_empty(), "no item-iv obligation generated")?;
        for o in walls {
            let lhs = normalize(&o.square.left).map_err(|e| e.to_string())?;
            let rhs = normalize(&o.square.right).map_err(|e| e.to_string())?;
            expect(
                lhs == rhs,
                format!("column images differ:\n  lhs {}\n  rhs {}", lhs, rhs),
            )?;
        }
        Ok(())
    })());
}

#[test]
fn criterion_3_involution_and_triangle_pass() {
    report(3, "involution and triangle", (|| {
        let inv_out = run_check("involution").map_err(|e| e.to_string())?;
        expect(inv_out.pass(), "involution check failed")?;
        expect(
            inv_out.obligations.len() == 3,
            format!("involution: expected 3 obligations, got {}", inv_out.obligations.len()),
        )?;
        let tri_out = run_check("triangle").map_err(|e| e.to_string())?;
        expect(tri_out.pass(), "triangle check failed")?;
        expect(
            tri_out.obligations.len() == 4,
            format!("triangle: expected 4 obligations, got {}", tri_out.obligations.len()),
        )
    })());
}

#[test]
fn criterion_4_naturality_symbolic_and_exhaustive_in_models() {
    report(4, "naturality symbolic + finite sweep", (|| {
        for name in ["naturality-alpha", "naturality-beta", "unit-naturality"] {
            let out = run_check(name).map_err(|e| e.to_string())?;
            expect(out.pass(), format!("{} check failed", name))?;
        }
        // Finite sweep at size 3 covers every pointed assignment of every
        // abstract symbol; the counts prove the sweep was fully general.
        let expected = [
            ("naturality-alpha", 729usize), // three symbols, 9 pointed maps each
            ("naturality-beta", 81),        // two symbols
            ("unit-naturality-lambda", 9),  // one symbol
            ("unit-naturality-rho", 9),
        ];
        for (name, want) in expected {
            let d = diagram(name).map_err(|e| e.to_string())?;
            let leaf_sizes = assign_sizes(&d, &[3]).map_err(|e| e.to_string())?;
            let got = check_diagram_all_envs(&leaf_sizes, &d).map_err(|e| e.to_string())?;
            expect(
                got == want,
                format!("{}: expected {} assignments, swept {}", name, want, got),
            )?;
        }
        Ok(())
    })());
}

#[test]
fn criterion_5_random_builder_instances_assemble_and_catch_mutations() {
    report(5, "random cofibre-builder instances", (|| {
        let mut r = rng(0xB17D_CAFE);
        let mut abstract_seen = false;
        for i in 0..20 {
            let k = [1, 2, 3, 4][i % 4];
            abstract_seen |= k == 1;
            let inst = random_instance(&mut r, k);
            let dom = inst.domain.clone();
            let cod = inst.f.codomain();
            let tuple: PathExpr = refl(image_of_tuple(&inst.f));
            let base: PathExpr = refl(basepoint(&cod));
            let fsh = FsHomotopy {
                f: inst.f.clone(),
                g: inst.g.clone(),
                tuple: tuple.clone(),
                basepoint: base.clone(),
            };
            let cases = fsh.case_obligations().map_err(|e| e.to_string())?;
            expect(
                cases.len() == dom.leaves().len() + 1,
                format!("instance {}: expected one case per leaf plus basepoint", i),
            )?;
            let h = fsh
                .build()
                .map_err(|e| format!("instance {} (k={}) failed to build: {}", i, k, e))?;

            expect(
                format!("{}", h.basepoint) == format!("{}", base),
                format!("instance {}: basepoint row not kept verbatim", i),
            )?;
            for (p, v) in &h.points {
                match pattern_collapse(&dom, p).map_err(|e| e.to_string())? {
                    None => expect(
                        format!("{}", v) == format!("{}", tuple),
                        format!("instance {}: tuple row not kept verbatim", i),
                    )?,
                    Some(d) => {
                        let conj = comp(vec![
                            ap(&inst.f, d.clone()),
                            base.clone(),
                            inv(ap(&inst.g, d)),
                        ]);
                        let got = normalize(v).map_err(|e| e.to_string())?;
                        let want = normalize(&conj).map_err(|e| e.to_string())?;
                        expect(
                            got == want,
                            format!(
                                "instance {}: wrap row at `{}` is not the conjugated basepoint row",
                                i, p
                            ),
                        )?;
                    }
                }
            }

            // Sensitivity: a freely reduced loop appended to the basepoint
            // row must fail a case square, never slip through.
            let mutated = FsHomotopy {
                f: inst.f.clone(),
                g: inst.g.clone(),
                tuple,
                basepoint: comp(vec![base, codomain_loop(&cod)]),
            };
            match mutated.build() {
                Err(Error::ObligationFailed { tag, .. }) => expect(
                    tag.starts_with("case-"),
                    format!("instance {}: mutation failed under tag `{}`", i, tag),
                )?,
                Err(other) => {
                    return Err(format!(
                        "instance {}: mutation raised {:?} instead of a failed obligation",
                        i, other
                    ))
                }
                Ok(_) => return Err(format!("instance {}: mutated row passed", i)),
            }
        }
        expect(abstract_seen, "no single-leaf abstract instance was generated")
    })());
}

#[test]
fn criterion_6_finite_models_validate_cardinalities_routes_and_bijections() {
    report(6, "finite pointed-set oracle", (|| {
        // Cardinality formula for every size up to 5, binary and ternary.
        for a in 1usize..=5 {
            for b in 1usize..=5 {
                let m = SetModel::new(sizes_map(&[("A", a), ("B", b)]));
                let sp = m.space(&smash(leaf("A"), leaf("B"))).map_err(|e| e.to_string())?;
                expect(
                    sp.card == (a - 1) * (b - 1) + 1,
                    format!("|A^B| at sizes ({}, {}) was {}", a, b, sp.card),
                )?;
                for c in 1usize..=5 {
                    let m =
                        SetModel::new(sizes_map(&[("A", a), ("B", b), ("C", c)]));
                    let want = (a - 1) * (b - 1) * (c - 1) + 1;
                    let tri =
                        m.space(&triple(leaf("A"), leaf("B"), leaf("C"))).map_err(|e| e.to_string())?;
                    let nested = m
                        .space(&smash(smash(leaf("A"), leaf("B")), leaf("C")))
                        .map_err(|e| e.to_string())?;
                    expect(
                        tri.card == want && nested.card == want,
                        format!(
                            "ternary cards at ({}, {}, {}): triple {}, nested {}, want {}",
                            a, b, c, tri.card, nested.card, want
                        ),
                    )?;
                }
            }
        }

        // Structure maps are bijections at every size up to 4.
        let (la, lb, lc) = (leaf("A"), leaf("B"), leaf("C"));
        for a in 1usize..=4 {
            for b in 1usize..=4 {
                for c in 1usize..=4 {
                    let m = SetModel::new(sizes_map(&[("A", a), ("B", b), ("C", c)]));
                    for map in [
                        associator(&la, &lb, &lc).map_err(|e| e.to_string())?,
                        swap_map(&la, &lb).map_err(|e| e.to_string())?,
                        left_unitor(&lb).map_err(|e| e.to_string())?,
                        right_unitor(&la).map_err(|e| e.to_string())?,
                        to_triple(&la, &lb, &lc).map_err(|e| e.to_string())?,
                    ] {
                        check_bijection(&m, &map).map_err(|e| {
                            format!("{} at sizes ({}, {}, {}): {}", map.name(), a, b, c, e)
                        })?;
                    }
                }
            }
        }

        // Pentagon, hexagon, and triangle routes agree pointwise up to 3.
        for s in 1usize..=3 {
            for name in ["pentagon", "hexagon", "triangle"] {
                let d = diagram(name).map_err(|e| e.to_string())?;
                let leaf_sizes = assign_sizes(&d, &[s]).map_err(|e| e.to_string())?;
                check_diagram_all_envs(&leaf_sizes, &d)
                    .map_err(|e| format!("{} at uniform size {}: {}", name, s, e))?;
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_7_normalizer_laws_hold_on_seeded_random_samples() {
    report(7, "free-groupoid laws, 1000 samples", (|| {
        let arenas = arenas();
        let mut r = rng(0x0E57_AB1E);
        let mut failures: Vec<String> = Vec::new();
        for i in 0..1000 {
            let arena = &arenas[i % arenas.len()];
            let steps = r.gen_range(1..=3);
            let (x, p, q) = arena.random_path(&mut r, steps);
            let steps_y = r.gen_range(1..=3);
            let (y, s) = arena.random_path_from(&mut r, &q, steps_y);
            let steps_z = r.gen_range(1..=2);
            let (z, _) = arena.random_path_from(&mut r, &s, steps_z);

            let mut law = |name: &str, lhs: &PathExpr, rhs: &PathExpr| {
                match (normalize(lhs), normalize(rhs)) {
                    (Ok(a), Ok(b)) => {
                        if a != b {
                            failures.push(format!("sample {}: {} ({} vs {})", i, name, a, b));
                        }
                    }
                    (Err(e), _) | (_, Err(e)) => {
                        failures.push(format!("sample {}: {} errored: {}", i, name, e))
                    }
                }
            };

            law(
                "associativity",
                &comp(vec![comp(vec![x.clone(), y.clone()]), z.clone()]),
                &comp(vec![x.clone(), comp(vec![y.clone(), z.clone()])]),
            );
            law("left unit", &comp(vec![refl(p.clone()), x.clone()]), &x);
            law("right unit", &comp(vec![x.clone(), refl(q.clone())]), &x);
            law("double inverse", &inv(inv(x.clone())), &x);
            law(
                "inverse antihomomorphism",
                &inv(comp(vec![x.clone(), y.clone()])),
                &comp(vec![inv(y.clone()), inv(x.clone())]),
            );
            law(
                "cancellation",
                &comp(vec![x.clone(), inv(x.clone())]),
                &refl(p.clone()),
            );

            let id = MapDef::identity(&arena.shape);
            law("identity map transparency", &ap(&id, x.clone()), &x);
            law(
                "map application distributes over composition",
                &ap(&arena.map, comp(vec![x.clone(), y.clone()])),
                &comp(vec![ap(&arena.map, x.clone()), ap(&arena.map, y.clone())]),
            );
            law(
                "map application commutes with inverse",
                &ap(&arena.map, inv(x.clone())),
                &inv(ap(&arena.map, x.clone())),
            );
        }
        expect(
            failures.is_empty(),
            format!("{} law failures; first: {}", failures.len(), failures.first().cloned().unwrap_or_default()),
        )
    })());
}

#[test]
fn criterion_8_square_family_counts_differ_by_two() {
    report(8, "square family counts", (|| {
        let hexagon = diagram("hexagon").map_err(|e| e.to_string())?;
        let h3 = Homotopy::refl(&hexagon.lhs_map(), &hexagon.rhs_map()).map_err(|e| e.to_string())?;
        let ternary = obligations_triple(&h3).map_err(|e| e.to_string())?.len();

        let pentagon = diagram("pentagon").map_err(|e| e.to_string())?;
        let h4 = Homotopy::refl(&pentagon.lhs_map(), &pentagon.rhs_map()).map_err(|e| e.to_string())?;
        let quaternary = obligations_quadruple(&h4).map_err(|e| e.to_string())?.len();

        expect(
            ternary == 5,
            format!("ternary family has {} squares, want 5", ternary),
        )?;
        expect(
            quaternary == 7,
            format!("quaternary family has {} squares, want 7", quaternary),
        )?;
        expect(
            quaternary - ternary == 2,
            "families should differ by exactly two squares",
        )
    })());
}
