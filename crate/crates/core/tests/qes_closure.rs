use alp_core::poly::{q, MPoly, Poly, Ring};
use alp_core::qes::{closure_at, detect_closure, find_closures, Family, OperatorSpec, QesEigenproblem, Sector};
use alp_core::Error;
use num_rational::Rational64;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn m_poly(cs: &[(i64, i64)]) -> MPoly {
    MPoly::new(cs.iter().map(|&(n, d)| q(n, d)).collect())
}

fn ints(cs: &[i64]) -> MPoly {
    MPoly::from_ints(cs)
}

/// Monic polynomial in the spectral variable from ascending coefficients.
fn spectral(cs: Vec<MPoly>) -> Poly<MPoly> {
    Poly::new(cs)
}

fn sector(bits: u8) -> Family {
    Family::single(Sector::from_bits(bits))
}

fn closed(op: OperatorSpec, family: &Family, degree: u32) -> QesEigenproblem {
    let prob = closure_at(&op, family, degree).unwrap_or_else(|| panic!("{op} does not close on {family} at {degree}"));
    assert!(prob.verify_certificate(), "certificate failed for {op} on {family}");
    prob
}

fn rem_by_monic(p: &Poly<MPoly>, f: &Poly<MPoly>) -> Poly<MPoly> {
    let df = f.degree().unwrap();
    let mut c = p.coeffs().to_vec();
    while c.len() > df {
        let lead = c.last().unwrap().clone();
        let shift = c.len() - 1 - df;
        for (i, fi) in f.coeffs().iter().enumerate() {
            c[shift + i] = c[shift + i].minus(&lead.times(fi));
        }
        c.pop();
    }
    Poly::new(c)
}

fn divides(factor: &Poly<MPoly>, p: &Poly<MPoly>) -> bool {
    rem_by_monic(p, factor).is_zero()
}

/// `(E − c)² − d`.
fn surd_pair(c: MPoly, d: MPoly) -> Poly<MPoly> {
    spectral(vec![c.times(&c).minus(&d), c.scale(&q(-2, 1)), MPoly::one()])
}

fn linear(c: MPoly) -> Poly<MPoly> {
    spectral(vec![c.negate(), MPoly::one()])
}

/// Published cubic in `λ` re-expressed in `E` through `E = λ + shift`.
fn in_energy(lambda_poly: Poly<MPoly>, shift: MPoly) -> Poly<MPoly> {
    lambda_poly.shift(&shift.negate())
}

#[test]
fn twelve_six_cn_cubic() {
    let prob = closed(OperatorSpec::band_edge(r(3, 1), r(2, 1)), &sector(0b010), 2);
    assert!(prob.is_full());
    let printed = spectral(vec![ints(&[0, -576]), ints(&[192, 48]), ints(&[-32, 4]), ints(&[1])]);
    assert_eq!(prob.charpoly_in_energy(), in_energy(printed, ints(&[1, 4])));
}

#[test]
fn twelve_six_sn_cubic() {
    let prob = closed(OperatorSpec::band_edge(r(3, 1), r(2, 1)), &sector(0b100), 2);
    let printed = spectral(vec![ints(&[0, -1728, -576]), ints(&[192, 336]), ints(&[-32, -8]), ints(&[1])]);
    assert_eq!(prob.charpoly_in_energy(), in_energy(printed, ints(&[1, 1])));
}

#[test]
fn twelve_six_ground_state_on_either_branch() {
    let nine_m = linear(ints(&[0, 9]));
    let a = detect_closure(&OperatorSpec::band_edge(r(3, 1), r(-3, 1)), &sector(0), 4).unwrap();
    assert_eq!((a.degree(), a.dim()), (0, 1));
    assert_eq!(a.charpoly_in_energy(), nine_m);
    let b = detect_closure(&OperatorSpec::band_edge(r(3, 1), r(2, 1)), &sector(0b001), 4).unwrap();
    assert_eq!(b.charpoly_in_energy(), nine_m);
}

#[test]
fn twelve_two_closed_forms() {
    let op = OperatorSpec::band_edge(r(3, 1), r(1, 1));
    let cubic = closed(op, &sector(0), 2);
    let printed = spectral(vec![ints(&[0, -384, -192]), ints(&[64, 176]), ints(&[-20, -8]), ints(&[1])]);
    assert_eq!(cubic.charpoly_in_energy(), in_energy(printed, ints(&[0, 1])));

    let pair = closed(op, &sector(0b110), 1);
    assert_eq!(pair.charpoly_in_energy(), surd_pair(ints(&[10, 2]), ints(&[36, -36, 4])));

    // ψ₁ = cn·dn², ψ₂ = sn·dn² sit in the constant-offset sectors of b → −b−1.
    let other = OperatorSpec::band_edge(r(3, 1), r(-2, 1));
    assert_eq!(closed(other, &sector(0b010), 0).charpoly_in_energy(), linear(ints(&[1, 4])));
    assert_eq!(closed(other, &sector(0b100), 0).charpoly_in_energy(), linear(ints(&[1, 9])));
}

#[test]
fn half_integer_examples() {
    let op = OperatorSpec::band_edge(r(3, 2), r(1, 2));
    let p = closed(op, &sector(0), 1);
    assert!(divides(&linear(m_poly(&[(0, 1), (9, 4)])), &p.charpoly_in_energy()));
    assert!(divides(&linear(m_poly(&[(4, 1), (1, 4)])), &p.charpoly_in_energy()));
    let p = closed(op, &sector(0b110), 0);
    assert_eq!(p.charpoly_in_energy(), linear(m_poly(&[(4, 1), (1, 4)])));

    let op = OperatorSpec::band_edge(r(5, 2), r(1, 2));
    let nine = linear(m_poly(&[(9, 1), (1, 4)]));
    let cn = closed(op, &sector(0b010), 1).charpoly_in_energy();
    assert!(divides(&linear(m_poly(&[(1, 1), (9, 4)])), &cn) && divides(&nine, &cn));
    let sn = closed(op, &sector(0b100), 1).charpoly_in_energy();
    assert!(divides(&linear(m_poly(&[(1, 1), (25, 4)])), &sn) && divides(&nine, &sn));
}

#[test]
fn ladders_with_b_one_half() {
    for n in 0..=4i64 {
        let even = linear(m_poly(&[((2 * n + 2).pow(2), 1), (1, 4)]));
        let op = OperatorSpec::band_edge(r(4 * n + 3, 2), r(1, 2));
        for (bits, deg) in [(0b000, n + 1), (0b110, n)] {
            let p = closed(op, &sector(bits), deg as u32);
            assert!(divides(&even, &p.charpoly_in_energy()), "N={n} sector {bits:03b}");
        }
        let odd = linear(m_poly(&[((2 * n + 3).pow(2), 1), (1, 4)]));
        let op = OperatorSpec::band_edge(r(4 * n + 5, 2), r(1, 2));
        for bits in [0b100, 0b010] {
            let p = closed(op, &sector(bits), n as u32 + 1);
            assert!(divides(&odd, &p.charpoly_in_energy()), "N={n} sector {bits:03b}");
        }
    }
}

#[test]
fn ladders_with_b_three_halves() {
    for n in 0..=3i64 {
        let k = 4 * n + 6;
        let pair = surd_pair(
            m_poly(&[(4 * n * n + 12 * n + 10, 1), (5, 4)]),
            ints(&[k * k, -k * k, 1]),
        );
        let op = OperatorSpec::band_edge(r(4 * n + 5, 2), r(3, 2));
        for (bits, deg) in [(0b000, n + 2), (0b110, n + 1)] {
            let p = closed(op, &sector(bits), deg as u32);
            assert!(divides(&pair, &p.charpoly_in_energy()), "N={n} sector {bits:03b}");
        }
        let k = 4 * (n + 2);
        let pair = surd_pair(
            m_poly(&[(4 * n * n + 16 * n + 17, 1), (5, 4)]),
            ints(&[k * k, -k * k, 1]),
        );
        let op = OperatorSpec::band_edge(r(4 * n + 7, 2), r(3, 2));
        for bits in [0b100, 0b010] {
            let p = closed(op, &sector(bits), n as u32 + 2);
            assert!(divides(&pair, &p.charpoly_in_energy()), "N={n} sector {bits:03b}");
        }
    }
}

fn mid_band(a: Rational64, b: Rational64, family: &Family, degree: u32) -> QesEigenproblem {
    let op = OperatorSpec::mid_band(a, b);
    let prob = closed(op, family, degree);
    let partner = closed(op.reflect(), family, degree);
    assert_eq!(prob.charpoly(), partner.charpoly(), "partner spectrum differs for {op}");
    prob
}

#[test]
fn mid_band_lowest_ansatz() {
    let p = mid_band(r(1, 2), r(0, 1), &sector(0), 0);
    // z = const gives √(dn + cn) → √2·cos(x/2) at m = 0, so E(0) = 1/4.
    assert_eq!(p.charpoly_in_energy(), linear(m_poly(&[(1, 4), (1, 4)])));
    let p = mid_band(r(3, 2), r(0, 1), &Family::odd_midband(), 0);
    assert_eq!(p.charpoly_in_energy(), surd_pair(m_poly(&[(5, 4), (5, 4)]), ints(&[1, -1, 1])));
    let p = mid_band(r(1, 2), r(1, 1), &Family::odd_midband(), 0);
    assert_eq!(p.charpoly_in_energy(), linear(m_poly(&[(9, 4), (1, 4)])));
}

#[test]
fn mid_band_odd_ansatz_first_order() {
    let fam = Family::odd_midband();
    let quartic = spectral(vec![
        ints(&[0, 1080, 3105, 1080]),
        ints(&[-144, -1404, -1404, -144]),
        ints(&[108, 342, 108]),
        ints(&[-20, -20]),
        ints(&[1]),
    ]);
    assert_eq!(mid_band(r(7, 2), r(0, 1), &fam, 1).charpoly(), &quartic);
    let cubic = spectral(vec![ints(&[0, -96, -98, 5]), ints(&[24, 88, -1]), ints(&[-14, -5]), ints(&[1])]);
    assert_eq!(mid_band(r(5, 2), r(1, 1), &fam, 1).charpoly(), &cubic);
    let p = mid_band(r(3, 2), r(2, 1), &fam, 1);
    assert_eq!(p.charpoly_in_energy(), surd_pair(m_poly(&[(29, 4), (5, 4)]), ints(&[25, -25, 1])));
    let p = mid_band(r(1, 2), r(3, 1), &fam, 1);
    assert_eq!(p.charpoly_in_energy(), linear(m_poly(&[(49, 4), (1, 4)])));
}

#[test]
fn mid_band_even_ansatz_first_order() {
    let fam = Family::even_midband();
    let cubic = spectral(vec![ints(&[0, -48, -48]), ints(&[12, 52, 12]), ints(&[-8, -8]), ints(&[1])]);
    assert_eq!(mid_band(r(5, 2), r(0, 1), &fam, 1).charpoly(), &cubic);
    let p = mid_band(r(3, 2), r(1, 1), &fam, 1);
    assert_eq!(p.charpoly_in_energy(), surd_pair(m_poly(&[(13, 4), (5, 4)]), ints(&[9, -9, 1])));
    let p = mid_band(r(1, 2), r(2, 1), &fam, 1);
    assert_eq!(p.charpoly_in_energy(), linear(m_poly(&[(25, 4), (1, 4)])));
}

#[test]
fn smallest_closure_is_found_first() {
    let p = detect_closure(&OperatorSpec::mid_band(r(3, 2), r(0, 1)), &Family::odd_midband(), 8).unwrap();
    assert_eq!((p.degree(), p.dim()), (0, 2));
    let all = find_closures(&OperatorSpec::band_edge(r(3, 1), r(2, 1)), 4);
    assert!(all.windows(2).all(|w| w[0].dim() <= w[1].dim()));
    assert!(all.iter().all(|p| p.verify_certificate()));
}

#[test]
fn generic_parameters_do_not_close() {
    let op = OperatorSpec::band_edge(r(355, 113), r(0, 1));
    for fam in Family::standard() {
        match detect_closure(&op, &fam, 64) {
            Err(Error::NotClosed { max_k }) => assert_eq!(max_k, 64),
            other => panic!("{fam}: expected NotClosed, got {other:?}"),
        }
    }
    assert!(detect_closure(&op, &sector(0), 65).is_err());
}

#[test]
fn mid_band_polynomials_stay_real_and_reach_free_limits() {
    use alp_core::poly::real_roots;
    use alp_core::qes::qes_energies;
    use alp_core::Modulus;
    let cases = [
        (r(7, 2), r(0, 1), Family::odd_midband(), vec![1, 9, 25, 49]),
        (r(5, 2), r(1, 1), Family::odd_midband(), vec![1, 9, 49]),
        (r(5, 2), r(0, 1), Family::even_midband(), vec![1, 9, 25]),
        (r(3, 2), r(2, 1), Family::odd_midband(), vec![9, 49]),
        (r(3, 2), r(1, 1), Family::even_midband(), vec![1, 25]),
    ];
    for (a, b, fam, limits) in cases {
        let p = mid_band(a, b, &fam, 1);
        let charpoly = p.charpoly_in_energy();
        for i in 0..=1000 {
            let at = MPoly::new(charpoly.coeffs().iter().map(|c| c.eval(&q(i, 1000))).collect());
            let e = real_roots(&at, 1e-3).unwrap_or_else(|err| panic!("({a},{b}) m={i}/1000: {err:?}"));
            assert_eq!(e.len(), limits.len());
        }
        let e0 = qes_energies(&p, Modulus::new(0.0).unwrap()).unwrap();
        for (e, n) in e0.iter().zip(&limits) {
            assert!((e - *n as f64 / 4.0).abs() < 1e-12, "({a},{b}): {e0:?}");
        }
    }
}
