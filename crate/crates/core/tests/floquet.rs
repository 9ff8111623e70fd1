use alp_core::floquet::{
    chart_row, count_nodes, discriminant, extrapolate_linear, find_band_edges, find_midband, gap_count_check,
    oscillation_ordering_holds, track_level, BandEdge, ChartRow, EdgeType, FloquetConfig,
};
use alp_core::model::PotentialParams;
use alp_core::qes::{closure_at, qes_energies, Family, OperatorSpec, Sector};
use alp_core::Modulus;
use num_rational::Rational64;

const GAP_TOL: f64 = 1e-6;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn params(a: Rational64, b: Rational64, m: f64) -> PotentialParams {
    PotentialParams::new(a, b, Modulus::new(m).unwrap()).unwrap()
}

fn int_params(a: i64, b: i64, m: f64) -> PotentialParams {
    params(r(a, 1), r(b, 1), m)
}

fn energies(edges: &[BandEdge]) -> Vec<f64> {
    edges.iter().map(|e| e.energy).collect()
}

fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    assert!((got - want).abs() <= tol, "{what}: got {got}, want {want}");
}

/// Number of edges within `tol` of `e`.
fn hits(edges: &[BandEdge], e: f64, tol: f64) -> usize {
    edges.iter().filter(|x| (x.energy - e).abs() <= tol).count()
}

fn row(p: &PotentialParams, emax: f64) -> ChartRow {
    chart_row(p, emax, FloquetConfig::default()).unwrap()
}

#[test]
fn free_particle_limit() {
    for (a, b) in [(r(3, 1), r(2, 1)), (r(1, 1), r(0, 1)), (r(5, 2), r(1, 2))] {
        let p = params(a, b, 1e-12);
        let edges = find_band_edges(&p, 37.0).unwrap();
        let want: Vec<f64> = (0..=6).flat_map(|n| if n == 0 { vec![0.0] } else { vec![(n * n) as f64; 2] }).collect();
        let got = energies(&edges);
        assert_eq!(got.len(), want.len(), "({a},{b}): {got:?}");
        for (g, w) in got.iter().zip(&want) {
            assert_close(*g, *w, 1e-5, "edge");
        }
        let mid = find_midband(&p, -1.0, 43.0).unwrap();
        assert_eq!(mid.len(), 7, "({a},{b}): {mid:?}");
        for (n, e) in mid.iter().enumerate() {
            assert_close(*e, (n as f64 + 0.5).powi(2), 1e-5, "mid-band");
        }
    }
}

#[test]
fn twelve_six_ground_state() {
    for m in [0.1, 0.5, 0.9] {
        let edges = find_band_edges(&int_params(3, 2, m), 10.0).unwrap();
        assert_close(edges[0].energy, 9.0 * m, 1e-9, "E0");
        assert_eq!((edges[0].nodes, edges[0].edge_type), (0, EdgeType::Periodic));
    }
}

#[test]
fn twelve_six_antiperiodic_edges_match_cubics() {
    let op = OperatorSpec::band_edge(r(3, 1), r(2, 1));
    for m in [0.1, 0.5, 0.9] {
        let mut want = Vec::new();
        for bits in [0b010, 0b100] {
            let prob = closure_at(&op, &Family::single(Sector::from_bits(bits)), 2).unwrap();
            want.extend(qes_energies(&prob, Modulus::new(m).unwrap()).unwrap());
        }
        want.sort_by(f64::total_cmp);
        let p = int_params(3, 2, m);
        let edges = find_band_edges(&p, want[5] + 1.0).unwrap();
        let anti: Vec<f64> = edges.iter().filter(|e| e.edge_type == EdgeType::Antiperiodic).map(|e| e.energy).collect();
        assert_eq!(anti.len(), 6, "m={m}: {anti:?}");
        for (g, w) in anti.iter().zip(&want) {
            assert_close(*g, *w, 1e-7, "4K edge");
            assert!((discriminant(*w, &p).unwrap() + 2.0).abs() < 1e-7);
        }
    }
}

#[test]
fn twelve_six_zero_gaps_and_limits() {
    let p = int_params(3, 2, 0.5);
    let row = row(&p, 40.0);
    let closed = row.closed_gaps(GAP_TOL);
    assert_eq!(closed.iter().map(|g| g.index).collect::<Vec<_>>(), [3, 7]);
    for (g, nodes) in closed.iter().zip([2, 4]) {
        assert_eq!(g.edge_type, EdgeType::Periodic);
        assert!(g.width < GAP_TOL);
        assert_eq!((row.edges[g.index].nodes, row.edges[g.index + 1].nodes), (nodes, nodes));
        assert_eq!(row.edges[g.index].degenerate_with, Some(g.index + 1));
    }

    let cfg = FloquetConfig::default();
    let near_one = [0.995, 0.9975, 0.999];
    let near_zero = [0.005, 0.0025, 0.001];
    for (g, lo, hi) in [(&closed[0], 4.0, 14.0), (&closed[1], 16.0, 17.0)] {
        for label in [row.edges[g.index].label, row.edges[g.index + 1].label] {
            let ys = track_level(&p, label, &near_one, cfg).unwrap();
            let xs: Vec<f64> = near_one.iter().map(|m| 1.0 - m).collect();
            assert_close(extrapolate_linear(&xs, &ys, 0.0), hi, 0.05, "m -> 1");
            let ys = track_level(&p, label, &near_zero, cfg).unwrap();
            assert_close(extrapolate_linear(&near_zero, &ys, 0.0), lo, 0.05, "m -> 0");
        }
    }
}

#[test]
fn twelve_six_node_counts() {
    let p = int_params(3, 2, 0.5);
    let edges = find_band_edges(&p, 18.0).unwrap();
    let nodes: Vec<u32> = edges.iter().map(|e| e.nodes).collect();
    assert_eq!(nodes, [0, 1, 1, 2, 2, 3, 3, 4, 4]);
    for e in &edges {
        assert_eq!(count_nodes(e.energy, &p, e.edge_type).unwrap(), e.nodes, "E={}", e.energy);
    }
}

#[test]
fn twelve_two_closed_forms() {
    let op = OperatorSpec::band_edge(r(3, 1), r(1, 1));
    let cubic = closure_at(&op, &Family::single(Sector::from_bits(0)), 2).unwrap();
    for m in [0.1, 0.5, 0.9] {
        let p = int_params(3, 1, m);
        let edges = find_band_edges(&p, 25.0).unwrap();
        let e = energies(&edges);
        let delta = (9.0 - 9.0 * m + m * m).sqrt();
        let roots = qes_energies(&cubic, Modulus::new(m).unwrap()).unwrap();
        let want = [
            (0, roots[0]),
            (1, 1.0 + 4.0 * m),
            (2, 1.0 + 9.0 * m),
            (3, 10.0 + 2.0 * m - 2.0 * delta),
            (4, roots[1]),
            (7, roots[2]),
            (8, 10.0 + 2.0 * m + 2.0 * delta),
        ];
        for (i, w) in want {
            assert_close(e[i], w, 1e-7, &format!("m={m} E{i}"));
        }
        assert!(oscillation_ordering_holds(&edges));
    }
}

#[test]
fn twelve_two_zero_gap_and_limits() {
    let p = int_params(3, 1, 0.5);
    let row = row(&p, 30.0);
    let closed = row.closed_gaps(GAP_TOL);
    assert_eq!(closed.len(), 1, "{:?}", row.gaps());
    let g = closed[0];
    assert_eq!((g.index, g.edge_type), (5, EdgeType::Antiperiodic));
    assert_eq!((row.edges[5].nodes, row.edges[6].nodes), (3, 3));

    let cfg = FloquetConfig::default();
    let near_one = [0.995, 0.9975, 0.999];
    let near_zero = [0.005, 0.0025, 0.001];
    let label = row.edges[5].label;
    let ys = track_level(&p, label, &near_one, cfg).unwrap();
    let xs: Vec<f64> = near_one.iter().map(|m| 1.0 - m).collect();
    assert_close(extrapolate_linear(&xs, &ys, 0.0), 13.0, 0.05, "m -> 1");
    let ys = track_level(&p, label, &near_zero, cfg).unwrap();
    assert_close(extrapolate_linear(&near_zero, &ys, 0.0), 9.0, 0.05, "m -> 0");
}

#[test]
fn half_integer_families() {
    for m in [0.1, 0.5, 0.9] {
        let p = params(r(3, 2), r(1, 2), m);
        let edges = find_band_edges(&p, 12.0).unwrap();
        assert_close(edges[0].energy, 9.0 * m / 4.0, 1e-7, "dn^{3/2}");
        assert_eq!(hits(&edges, 4.0 + m / 4.0, 1e-7), 2, "m={m}: {:?}", energies(&edges));

        let p = params(r(5, 2), r(1, 2), m);
        let edges = find_band_edges(&p, 15.0).unwrap();
        assert_eq!(hits(&edges, 1.0 + 9.0 * m / 4.0, 1e-7), 1);
        assert_eq!(hits(&edges, 1.0 + 25.0 * m / 4.0, 1e-7), 1);
        assert_eq!(hits(&edges, 9.0 + m / 4.0, 1e-7), 2, "m={m}: {:?}", energies(&edges));
    }
}

#[test]
fn half_integer_ladders_are_degenerate_edges() {
    let m = 0.5;
    for n in 0..=2i64 {
        let e = ((2 * n + 2).pow(2)) as f64 + m / 4.0;
        let edges = find_band_edges(&params(r(4 * n + 3, 2), r(1, 2), m), e + 1.0).unwrap();
        assert_eq!(hits(&edges, e, 1e-7), 2, "a={}/2", 4 * n + 3);
        let e = ((2 * n + 3).pow(2)) as f64 + m / 4.0;
        let edges = find_band_edges(&params(r(4 * n + 5, 2), r(1, 2), m), e + 1.0).unwrap();
        assert_eq!(hits(&edges, e, 1e-7), 2, "a={}/2", 4 * n + 5);
    }
}

/// Mid-band energies with their closed forms at modulus `m`.
fn midband_cases(m: f64) -> Vec<(Rational64, Rational64, f64)> {
    let s = |x: f64| x.sqrt();
    let mut out = vec![
        (r(1, 2), r(0, 1), (1.0 + m) / 4.0),
        (r(3, 2), r(0, 1), 1.25 * (1.0 + m) - s(1.0 - m + m * m)),
        (r(3, 2), r(0, 1), 1.25 * (1.0 + m) + s(1.0 - m + m * m)),
        (r(1, 2), r(1, 1), (9.0 + m) / 4.0),
        (r(3, 2), r(2, 1), (29.0 + 5.0 * m) / 4.0 - s(25.0 - 25.0 * m + m * m)),
        (r(3, 2), r(2, 1), (29.0 + 5.0 * m) / 4.0 + s(25.0 - 25.0 * m + m * m)),
        (r(1, 2), r(3, 1), (49.0 + m) / 4.0),
        (r(3, 2), r(1, 1), (13.0 + 5.0 * m) / 4.0 - s(9.0 - 9.0 * m + m * m)),
        (r(3, 2), r(1, 1), (13.0 + 5.0 * m) / 4.0 + s(9.0 - 9.0 * m + m * m)),
        (r(1, 2), r(2, 1), (25.0 + m) / 4.0),
    ];
    let mk = Modulus::new(m).unwrap();
    for (a, b, fam) in [
        (r(7, 2), r(0, 1), Family::odd_midband()),
        (r(5, 2), r(1, 1), Family::odd_midband()),
        (r(5, 2), r(0, 1), Family::even_midband()),
    ] {
        let prob = closure_at(&OperatorSpec::mid_band(a, b), &fam, 1).unwrap();
        out.extend(qes_energies(&prob, mk).unwrap().into_iter().map(|e| (a, b, e)));
    }
    out
}

#[test]
fn midband_energies_zero_the_discriminant() {
    for m in [0.1, 0.5, 0.9] {
        for (a, b, e) in midband_cases(m) {
            let d = discriminant(e, &params(a, b, m)).unwrap();
            assert!(d.abs() < 1e-7, "({a},{b}) m={m} E={e}: D={d}");
        }
    }
}

#[test]
fn midband_search_finds_closed_forms() {
    let m = 0.5;
    let p = params(r(3, 2), r(0, 1), m);
    let mid = find_midband(&p, -1.0, 3.0).unwrap();
    let want = [1.008_974_596_215_561_4, 2.741_025_403_784_438_4];
    assert_eq!(mid.len(), 2, "{mid:?}");
    for (g, w) in mid.iter().zip(want) {
        assert_close(*g, w, 1e-7, "mid-band");
    }
    for (a, b, e) in [(r(1, 2), r(2, 1), (25.0 + m) / 4.0), (r(1, 2), r(3, 1), (49.0 + m) / 4.0)] {
        let mid = find_midband(&params(a, b, m), e - 0.5, e + 0.5).unwrap();
        assert!(mid.iter().any(|x| (x - e).abs() < 1e-7), "({a},{b}): {mid:?}");
    }
}

/// Integer pairs whose narrowest open gap at `m = 0.5` lies below the default
/// gap tolerance, with that width.
const NARROW_TOP_GAP: [(i64, i64, f64); 4] = [(4, 4, 3.1e-7), (5, 3, 4.0e-7), (5, 4, 3.4e-8), (5, 5, 3.1e-9)];

#[test]
fn integer_pairs_have_a_open_gaps() {
    let m = 0.5;
    // Closed gaps resolve to ~1e-11 at this tolerance.
    let fine = FloquetConfig {
        tol: alp_core::ode::Tolerance { abs: 1e-13, rel: 1e-13 },
        ..FloquetConfig::default()
    };
    let resolved = 1e-9;
    for a in 0..=5i64 {
        for b in 0..=a {
            let p = int_params(a, b, m);
            let emax = ((a + b + 3) * (a + b + 3)) as f64;
            let row = chart_row(&p, emax, fine).unwrap();
            assert!(oscillation_ordering_holds(&row.edges), "({a},{b})");
            assert_eq!(row.open_gaps(resolved), a as usize, "({a},{b}): {:?}", row.gaps());
            let check = gap_count_check(&p, &row, resolved);
            assert!(check.within_bounds(), "({a},{b}): {check:?}");
            // Past the last open gap the spectrum is one band.
            if let Some(top) = row.continuum_threshold(resolved) {
                for i in 1..=8 {
                    let e = top + (emax - top) * i as f64 / 9.0;
                    let d = discriminant(e, &p).unwrap();
                    let at_edge = row.edges.iter().any(|x| (x.energy - e).abs() < 1e-6);
                    assert!(at_edge || d.abs() <= 2.0 + 1e-9, "({a},{b}) E={e}: D={d}");
                }
            }

            let coarse = row.open_gaps(GAP_TOL);
            match NARROW_TOP_GAP.iter().find(|x| (x.0, x.1) == (a, b)) {
                Some(&(_, _, width)) => {
                    assert_eq!(coarse, a as usize - 1, "({a},{b})");
                    let narrow = row.gaps().into_iter().filter(|g| g.is_open(resolved)).next_back().unwrap();
                    assert!((narrow.width / width - 1.0).abs() < 0.1, "({a},{b}): {narrow:?}");
                }
                None => assert_eq!(coarse, a as usize, "({a},{b})"),
            }
        }
    }
}

#[test]
fn equal_indices_have_period_k_and_no_zero_gaps() {
    for a in 1..=3i64 {
        let p = int_params(a, a, 0.5);
        assert!(p.has_half_period());
        assert!((p.period() - alp_core::complete_k(p.modulus())).abs() < 1e-14);
        let emax = ((2 * a + 3) * (2 * a + 3)) as f64;
        let row = row(&p, emax);
        assert!(oscillation_ordering_holds(&row.edges), "a={a}");
        assert!(row.closed_gaps(GAP_TOL).is_empty(), "a={a}: {:?}", row.gaps());
    }
}
