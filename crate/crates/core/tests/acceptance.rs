//! Acceptance gate: one test per criterion, each driving a full pipeline at
//! its stated size and printing a single PASS line on success.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tdlc_core::field::newton::scale_from_charpoly;
use tdlc_core::flat::{flat_factor, FlatOptions};
use tdlc_core::lattice::mat::Mat;
use tdlc_core::lattice::{Lattice, LatticeModel};
use tdlc_core::relprof::{
    completion_fingerprint, integer_mod_two_transfer, lamp_quotient_projection,
    nested_pinned_projection, pinned_orbit_index, symmetric_three_transfer, ArithmeticPair,
    LampElem,
};
use tdlc_core::scale::{scale_report, triangle_holds, word_displacement_bound};
use tdlc_core::shift::{
    conjugation_index_table, shift_invariant_code_scan, AnnihilatorCode, BitVec, ShiftModel,
    TailVerdict, Window,
};
use tdlc_core::tree::{
    classify, elliptic_product_scales, unipotent_displacement_probe, MotionKind, TreeModel,
};
use tdlc_core::{Error, FieldElem, GroupModel, IndexValue, LocalFieldSpec};

fn parse_mat(spec: LocalFieldSpec, rows: &[&[&str]]) -> Mat {
    Mat::parse(
        spec,
        &rows
            .iter()
            .map(|r| r.iter().map(|s| s.to_string()).collect())
            .collect::<Vec<_>>(),
    )
    .unwrap()
}

fn rand_entry(
    rng: &mut ChaCha8Rng,
    spec: LocalFieldSpec,
    n_abs: i64,
    e_lo: i64,
    e_hi: i64,
) -> FieldElem {
    let n = rng.gen_range(-n_abs..=n_abs);
    let e = rng.gen_range(e_lo..=e_hi);
    spec.mul(&spec.from_i64(n), &spec.uniformizer_pow(e))
}

fn rand_invertible(
    rng: &mut ChaCha8Rng,
    spec: LocalFieldSpec,
    dim: usize,
    n_abs: i64,
    e_lo: i64,
    e_hi: i64,
) -> Mat {
    loop {
        let rows: Vec<Vec<FieldElem>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| rand_entry(rng, spec, n_abs, e_lo, e_hi))
                    .collect()
            })
            .collect();
        let m = Mat::from_rows(spec, rows);
        if !m.det().is_zero() {
            return m;
        }
    }
}

#[test]
fn c1_tidy_scale_matches_polygon_scale_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    for case in 0..200usize {
        let p = [2u64, 3, 5][case % 3];
        let dim = 2 + case % 2;
        let spec = LocalFieldSpec::padic(p, 32).unwrap();
        let model = LatticeModel::new(spec, dim).unwrap();
        let g = rand_invertible(&mut rng, spec, dim, 9, -1, 1);
        let tidy_route = model.scale(&g).unwrap();
        let polygon_route = scale_from_charpoly(&spec, &g.charpoly()).unwrap();
        assert_eq!(tidy_route, polygon_route, "p={p} dim={dim} case={case}");
    }
    println!("PASS c1: tidy-chain scale equals polygon scale on 200 random matrices");
}

fn ratio_from_det(p: u64, d: i64) -> (IndexValue, IndexValue) {
    if d >= 0 {
        (IndexValue::one(), IndexValue::prime_power(p, d as u64))
    } else {
        (IndexValue::prime_power(p, (-d) as u64), IndexValue::one())
    }
}

#[test]
fn c2_power_law_conjugation_and_modular_ratio() {
    let samples: [(u64, &[&[&str]]); 4] = [
        (3, &[&["3", "0"], &["0", "1/3"]]),
        (3, &[&["9", "1"], &["0", "1"]]),
        (2, &[&["1/2", "0"], &["1", "1/2"]]),
        (5, &[&["5", "2"], &["0", "25"]]),
    ];
    for (p, rows) in samples {
        let spec = LocalFieldSpec::padic(p, 256).unwrap();
        let model = LatticeModel::new(spec, 2).unwrap();
        let g = parse_mat(spec, rows);
        let conjugators = [
            parse_mat(spec, &[&["1", "1"], &["0", "1"]]),
            parse_mat(spec, &[&["2", "1"], &["1", "1"]]),
        ];
        let report = scale_report(&model, &g, 5, &conjugators, None).unwrap();
        assert!(report.power_law_holds, "p={p}");
        assert!(report.conjugation_invariant, "p={p}");
        assert!(report.all_hold, "p={p}");
        let d = spec.valuation(&g.det()).unwrap();
        assert_eq!(report.modular_ratio, ratio_from_det(p, d), "p={p}");

        // the square admits g itself as a certified root
        let g2 = g.mul(&g);
        let square = scale_report(&model, &g2, 3, &[], Some((&g, 2))).unwrap();
        assert_eq!(square.root_power_matches, Some(true), "p={p}");
        assert!(square.all_hold, "p={p}");
    }

    // a unit-eigenvalue element is uniscalar and fixes a witness subgroup
    let spec = LocalFieldSpec::padic(3, 256).unwrap();
    let model = LatticeModel::new(spec, 2).unwrap();
    let u = parse_mat(spec, &[&["2", "1"], &["3", "5"]]);
    let report = scale_report(&model, &u, 5, &[], None).unwrap();
    assert!(report.uniscalar && report.stabilized_witness.is_some());
    println!("PASS c2: power law, conjugation invariance, and modular ratio verified to the fifth power");
}

#[test]
fn c3_flat_family_of_rank_two_in_dimension_three() {
    let spec = LocalFieldSpec::padic(2, 64).unwrap();
    let model = LatticeModel::new(spec, 3).unwrap();
    let g1 = parse_mat(
        spec,
        &[&["2", "0", "0"], &["0", "1", "0"], &["0", "0", "1/2"]],
    );
    let g2 = parse_mat(
        spec,
        &[&["1", "0", "0"], &["0", "2", "0"], &["0", "0", "2"]],
    );
    let f = flat_factor(&model, &[g1, g2], &FlatOptions::default()).unwrap();
    assert_eq!(f.q, 3);
    assert_eq!(f.flat_rank, 2);
    assert!(f.uniscalar_part.is_none());
    assert_eq!(f.uniscalar_flags, vec![false, false]);
    let mut rhos: Vec<Vec<i64>> = f.factors.iter().map(|x| x.rho.clone()).collect();
    rhos.sort();
    assert_eq!(rhos, vec![vec![-1, 0], vec![0, -1], vec![1, -1]]);
    assert!(f.factors.iter().all(|x| x.base == 2));
    assert!(f.words_checked > 0);

    // adjoining a rotation breaks commutation modulo the uniscalar part
    let spec3 = LocalFieldSpec::padic(3, 32).unwrap();
    let m2 = LatticeModel::new(spec3, 2).unwrap();
    let split = parse_mat(spec3, &[&["3", "0"], &["0", "1/3"]]);
    let rot = parse_mat(spec3, &[&["0", "1"], &["-1", "0"]]);
    let err = flat_factor(&m2, &[split, rot], &FlatOptions::default()).unwrap_err();
    assert!(matches!(err, Error::NotFlat { .. }));
    println!("PASS c3: commuting family factors with rank 2 over 3 directions; non-flat family refused");
}

#[test]
fn c4_tree_motion_classification_matches_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC4);
    let mut hyperbolic = 0usize;
    let mut elliptic = 0usize;
    let mut inversions = 0usize;
    for case in 0..50usize {
        let p = [2u64, 3][case % 2];
        let spec = LocalFieldSpec::padic(p, 32).unwrap();
        let model = TreeModel::new(spec);
        let g = rand_invertible(&mut rng, spec, 2, 5, 0, 1);
        let auto = model.auto(&render_rows(&spec, &g)).unwrap();
        let (kind, ell, vdisp) = classify(spec, &g).unwrap();
        let s = model.scale(&auto).unwrap();
        match kind {
            MotionKind::Hyperbolic => {
                assert!(ell >= 1 && ell == vdisp, "case={case}");
                assert_eq!(s, IndexValue::prime_power(p, ell), "case={case}");
                hyperbolic += 1;
            }
            MotionKind::Elliptic => {
                assert_eq!((ell, vdisp), (0, 0), "case={case}");
                assert!(s.is_one(), "case={case}");
                if elliptic < 5 {
                    let report = scale_report(&model, &auto, 2, &[], None).unwrap();
                    assert!(report.uniscalar && report.stabilized_witness.is_some());
                }
                elliptic += 1;
            }
            MotionKind::Inversion => {
                assert_eq!((ell, vdisp), (0, 1), "case={case}");
                assert!(s.is_one(), "case={case}");
                inversions += 1;
            }
        }
    }
    assert_eq!(hyperbolic + elliptic + inversions, 50);
    assert!(hyperbolic >= 8, "hyperbolic={hyperbolic}");
    assert!(elliptic >= 8, "elliptic={elliptic}");
    println!(
        "PASS c4: 50 random tree isometries classified ({hyperbolic} hyperbolic, {elliptic} elliptic, {inversions} inversions) with matching scales"
    );
}

fn render_rows(spec: &LocalFieldSpec, g: &Mat) -> Vec<Vec<String>> {
    (0..g.rows)
        .map(|i| (0..g.cols).map(|j| spec.render(&g.get(i, j))).collect())
        .collect()
}

#[test]
fn c5_vertex_fixing_product_translates_with_scale_q_squared() {
    for p in [2u64, 3, 5] {
        let spec = LocalFieldSpec::padic(p, 32).unwrap();
        let (sx, sy, sxy) = elliptic_product_scales(spec).unwrap();
        assert!(sx.is_one() && sy.is_one());
        assert_eq!(sxy, IndexValue::prime_power(p, 2));
    }
    println!("PASS c5: two scale-one isometries compose to scale q^2 for q in {{2, 3, 5}}");
}

#[test]
fn c6_shift_window_codes_conjugation_and_invariance_scan() {
    let mut last_gap = 0u32;
    for n in [4i64, 6, 8] {
        let window = Window::new(n).unwrap();

        // one-sided conjugation indices of the standard half-line code
        for (k, fwd, bwd) in conjugation_index_table(window, n).unwrap() {
            if k >= 0 {
                assert_eq!((fwd, bwd), (k as u32, 0), "n={n} k={k}");
            } else {
                assert_eq!((fwd, bwd), (0, (-k) as u32), "n={n} k={k}");
            }
        }

        // the mirror conjugate displaces by the full half-line dimension
        let std = AnnihilatorCode::right_half(window);
        assert_eq!(
            std.index_over(&std.mirror_conjugate()).unwrap(),
            IndexValue::prime_power(2, n as u64)
        );

        // small-pattern invariant codes stay finite dimensional with a gap
        // that grows with the window
        let entries = shift_invariant_code_scan(window).unwrap();
        let dims: Vec<u32> = entries.iter().map(|e| e.dim).collect();
        assert_eq!(dims, vec![0, 1, 2, 2], "n={n}");
        for e in &entries {
            assert!(
                matches!(e.verdict, TailVerdict::FiniteDimensional { .. }),
                "n={n}"
            );
        }
        let gap = entries[1].gap.0;
        assert_eq!(gap, n as u32 + 1, "n={n}");
        assert!(gap > last_gap);
        last_gap = gap;
    }
    println!("PASS c6: half-line code conjugation one-sided and invariant-code gaps grow across windows 4, 6, 8");
}

#[test]
fn c7_lamp_completion_fingerprints_and_projections() {
    for (m, order) in [(1i64, 24u64), (2, 160), (3, 896)] {
        let fp = completion_fingerprint(m).unwrap();
        assert_eq!(fp.order, order);
        assert_eq!(fp.order, fp.closed_form);
        assert_eq!(fp.points, 2 * (2 * m as usize + 1));
    }
    for m in 1..=3i64 {
        let nested = nested_pinned_projection(m).unwrap();
        assert!(nested.equivariant && nested.kernel_trivial);
        assert_eq!(nested.fiber_size, 2);
        assert_eq!(nested.coarse_trivial_count, 1);
        assert_eq!(nested.swapped_spurious_count, 3);
        let lamp = lamp_quotient_projection(m).unwrap();
        assert!(lamp.coarse_translation && lamp.kernel_is_lamp_part && lamp.kernel_bit_action);
        assert_eq!(lamp.fiber_size, 2);
    }
    let two = IndexValue::prime_power(2, 1);
    assert_eq!(pinned_orbit_index(&LampElem::translation(3), 4).unwrap(), two);
    assert_eq!(
        pinned_orbit_index(&LampElem::identity(), 4).unwrap(),
        IndexValue::one()
    );
    println!("PASS c7: lamp completion fingerprints 24/160/896 with compatible nested projections");
}

#[test]
fn c8_arithmetic_orbit_index_agrees_on_three_routes() {
    let p3 = ArithmeticPair::new(3, 64).unwrap();
    let (orbit, congruence, sphere) = p3.diagonal_index_routes(1, 4096).unwrap();
    assert_eq!(orbit, IndexValue::from_u64(12).unwrap());
    assert_eq!((congruence, sphere), (12, 12));
    let (orbit2, congruence2, sphere2) = p3.diagonal_index_routes(2, 4096).unwrap();
    assert_eq!(orbit2, IndexValue::from_u64(108).unwrap());
    assert_eq!((congruence2, sphere2), (108, 108));

    // a shear with one denominator lands in the same double coset
    let shear = p3.upper_over_p();
    assert_eq!(
        p3.marked_orbit_index(&shear, 4096).unwrap(),
        IndexValue::from_u64(12).unwrap()
    );

    let p2 = ArithmeticPair::new(2, 64).unwrap();
    let (orbit_two, congruence_two, sphere_two) = p2.diagonal_index_routes(1, 4096).unwrap();
    assert_eq!(orbit_two, IndexValue::from_u64(6).unwrap());
    assert_eq!((congruence_two, sphere_two), (6, 6));

    assert_eq!(p3.coset_ball(3, 100_000).unwrap(), vec![1, 3, 7, 19]);
    println!("PASS c8: marked orbit, congruence count, and sphere count agree (12, 108, 6 cases)");
}

#[test]
fn c9_unipotent_displacement_grows_while_scale_stays_one() {
    let spec = LocalFieldSpec::padic(3, 32).unwrap();
    let probe = unipotent_displacement_probe(spec, 6).unwrap();
    assert_eq!(probe.len(), 7);
    let mut last = IndexValue::one();
    for (i, step) in probe.iter().enumerate() {
        assert_eq!(step.k, i as u64);
        assert!(step.scale.is_one(), "k={i}");
        if i > 0 {
            assert!(step.displacement.product > last, "k={i}");
        }
        last = step.displacement.product.clone();
    }
    println!("PASS c9: unipotent family keeps scale 1 while displacement grows strictly through k = 6");
}

#[test]
fn c10_triangle_inequality_and_word_bounds_on_random_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC10);
    let mut checked = 0usize;

    // lattice triangles
    let spec = LocalFieldSpec::padic(3, 32).unwrap();
    let lmodel = LatticeModel::new(spec, 2).unwrap();
    for _ in 0..100 {
        let u = Lattice::standard(spec, 2)
            .apply(&rand_invertible(&mut rng, spec, 2, 5, 0, 1))
            .unwrap();
        let v = Lattice::standard(spec, 2)
            .apply(&rand_invertible(&mut rng, spec, 2, 5, 0, 1))
            .unwrap();
        let w = Lattice::standard(spec, 2)
            .apply(&rand_invertible(&mut rng, spec, 2, 5, 0, 1))
            .unwrap();
        assert!(triangle_holds(&lmodel, &u, &v, &w).unwrap());
        checked += 1;
    }

    // lattice words against the per-letter bound
    for _ in 0..100 {
        let gens = [
            rand_invertible(&mut rng, spec, 2, 5, -1, 1),
            rand_invertible(&mut rng, spec, 2, 5, -1, 1),
        ];
        let len = rng.gen_range(1..=3usize);
        let word: Vec<i64> = (0..len)
            .map(|_| {
                let letter = rng.gen_range(1..=2i64);
                if rng.gen_bool(0.5) {
                    letter
                } else {
                    -letter
                }
            })
            .collect();
        let wb = word_displacement_bound(&lmodel, &gens, &word, &lmodel.base()).unwrap();
        assert!(wb.measured <= wb.bound);
        checked += 1;
    }

    // tree triangles and words on vertex stabilizers
    for case in 0..100usize {
        let p = [2u64, 3][case % 2];
        let tspec = LocalFieldSpec::padic(p, 32).unwrap();
        let tmodel = TreeModel::new(tspec);
        let g1 = tmodel
            .auto(&render_rows(
                &tspec,
                &rand_invertible(&mut rng, tspec, 2, 3, 0, 1),
            ))
            .unwrap();
        let g2 = tmodel
            .auto(&render_rows(
                &tspec,
                &rand_invertible(&mut rng, tspec, 2, 3, 0, 1),
            ))
            .unwrap();
        if case < 70 {
            let u = tmodel.apply(&g1, &tmodel.base()).unwrap();
            let w = tmodel.apply(&g2, &tmodel.base()).unwrap();
            assert!(triangle_holds(&tmodel, &u, &tmodel.base(), &w).unwrap());
        } else {
            let len = rng.gen_range(1..=3usize);
            let word: Vec<i64> = (0..len)
                .map(|_| {
                    let letter = rng.gen_range(1..=2i64);
                    if rng.gen_bool(0.5) {
                        letter
                    } else {
                        -letter
                    }
                })
                .collect();
            let wb =
                word_displacement_bound(&tmodel, &[g1, g2], &word, &tmodel.base()).unwrap();
            assert!(wb.measured <= wb.bound);
        }
        checked += 1;
    }

    // window code triangles and small shift words
    let window = Window::new(6).unwrap();
    let smodel = ShiftModel::new(window);
    let rand_code = |rng: &mut ChaCha8Rng, reach: i64| {
        let rows = (0..rng.gen_range(1..=2usize))
            .map(|_| {
                let mut positions = vec![];
                for pos in -reach..=reach {
                    if rng.gen_bool(0.4) {
                        positions.push(pos);
                    }
                }
                BitVec::from_positions(window, &positions).unwrap()
            })
            .collect();
        AnnihilatorCode::from_dual_rows(window, rows).unwrap()
    };
    for _ in 0..100 {
        let u = rand_code(&mut rng, 6);
        let v = rand_code(&mut rng, 6);
        let w = rand_code(&mut rng, 6);
        assert!(triangle_holds(&smodel, &u, &v, &w).unwrap());
        checked += 1;
    }
    for _ in 0..100 {
        let gens = [
            smodel.elem(rng.gen_range(-1..=1), &[rng.gen_range(-2..=2)]).unwrap(),
            smodel.elem(rng.gen_range(-1..=1), &[rng.gen_range(-2..=2)]).unwrap(),
        ];
        let len = rng.gen_range(1..=3usize);
        let word: Vec<i64> = (0..len)
            .map(|_| {
                let letter = rng.gen_range(1..=2i64);
                if rng.gen_bool(0.5) {
                    letter
                } else {
                    -letter
                }
            })
            .collect();
        // cutoff codes near the center stay exactly shiftable for |k| <= 3
        let base = AnnihilatorCode::vanishing_below(window, rng.gen_range(-2..=2)).unwrap();
        let wb = word_displacement_bound(&smodel, &gens, &word, &base).unwrap();
        assert!(wb.measured <= wb.bound);
        checked += 1;
    }

    assert_eq!(checked, 500);
    println!("PASS c10: displacement triangle inequality and word bounds hold on 500 random cases");
}

#[test]
fn c11_wreath_transfer_maps_verify_end_to_end() {
    let integers = integer_mod_two_transfer().unwrap();
    assert!(integers.transversal_held && integers.homomorphism_held);
    assert!(integers.cocycle_held && integers.projection_held);
    assert_eq!(integers.image_order, integers.kernel_index);

    let symmetric = symmetric_three_transfer().unwrap();
    assert!(symmetric.transversal_held && symmetric.homomorphism_held);
    assert!(symmetric.cocycle_held && symmetric.projection_held);
    assert_eq!(symmetric.image_order, symmetric.kernel_index);
    println!("PASS c11: both wreath transfer maps are homomorphisms with matching image and kernel data");
}
