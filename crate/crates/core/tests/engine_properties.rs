mod common;

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI, TAU};

use ac_bell::engine::*;
use ac_bell::geometry::{
    winding_number, LineCharge, MagneticMoment, Orientation, Point2, Polyline,
};
use common::*;
use rand::Rng;

fn dist_close(a: &JointDistribution, b: &JointDistribution, tol: f64) -> bool {
    [
        (a.p11, b.p11),
        (a.p00, b.p00),
        (a.p10, b.p10),
        (a.p01, b.p01),
        (a.residual, b.residual),
    ]
    .iter()
    .all(|(x, y)| (x - y).abs() < tol)
}

#[test]
fn pipeline_matches_closed_form_correlation_on_random_layouts() {
    let mut rng = rng(1);
    for _ in 0..1000 {
        let layout = random_layout(&mut rng);
        let p = compute_phases(&layout).unwrap();
        let (e, dist) = evaluate(&p).unwrap();
        let expected = closed_form_correlation(p.phi_a().radians(), p.phi_b().radians());
        assert!((e - expected).abs() < 1e-9);
        assert!((dist.residual - 0.5).abs() < 1e-12);
        assert!((dist.p11 - dist.p00).abs() < 1e-12 && (dist.p10 - dist.p01).abs() < 1e-12);
    }
}

#[test]
fn total_state_matches_closed_form_amplitudes() {
    let mut rng = rng(2);
    for _ in 0..500 {
        let phi: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-PI..PI));
        let p = PhaseQuadruple::from_radians(phi).unwrap();
        let pipeline = meeting_amplitudes(&assemble_total_state(&p));
        let closed = closed_form_meeting_amplitudes(&p);
        for i in 0..4 {
            for j in 0..4 {
                assert!((pipeline[i][j] - closed[i][j]).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn only_the_phase_difference_matters() {
    let mut rng = rng(3);
    for _ in 0..200 {
        let (pa, pb, shift) = (
            rng.gen_range(-PI..PI),
            rng.gen_range(-PI..PI),
            rng.gen_range(-5.0..5.0),
        );
        let base = evaluate(&PhaseQuadruple::from_station_phases(pa, pb).unwrap())
            .unwrap()
            .1;
        let shifted =
            evaluate(&PhaseQuadruple::from_station_phases(pa + shift, pb + shift).unwrap())
                .unwrap()
                .1;
        assert!(dist_close(&base, &shifted, 1e-12));
        // a different split of the same station phases between particles
        let p = PhaseQuadruple::from_radians([pa + 0.3, pb - 1.1, -1.1, 0.3]).unwrap();
        assert!(dist_close(&base, &evaluate(&p).unwrap().1, 1e-12));
    }
}

#[test]
fn homotopic_substitution_keeps_probabilities() {
    let mut rng = rng(4);
    let mut done = 0;
    while done < 200 {
        let layout = random_layout(&mut rng);
        let base =
            joint_probabilities(&assemble_total_state(&compute_phases(&layout).unwrap())).unwrap();
        let paths: [Polyline; 4] = Contour::ALL.map(|c| {
            let (a, b) = layout.endpoints(c);
            homotopic_detour(&mut rng, a, b, layout.charge.puncture)
        });
        let mut deformed = layout.clone();
        deformed.paths = Some(paths);
        if deformed.validate().is_err() {
            continue;
        }
        let p = compute_phases(&deformed).unwrap();
        let dist = joint_probabilities(&assemble_total_state(&p)).unwrap();
        assert!(dist_close(&base, &dist, 1e-9));
        done += 1;
    }
}

/// CHSH by direct cosines on a grid, independent of the state pipeline.
fn cosine_grid_max(n: usize) -> f64 {
    let grid: Vec<f64> = (0..n).map(|k| PI * k as f64 / n as f64).collect();
    let e = |a: f64, b: f64| (2.0 * (a - b)).cos();
    let mut best: f64 = 0.0;
    for &a in &grid {
        for &ap in &grid {
            for &b in &grid {
                for &bp in &grid {
                    let s = e(a, b) - e(a, bp) + e(ap, b) + e(ap, bp);
                    best = best.max(s.abs());
                }
            }
        }
    }
    best
}

#[test]
fn optimal_direct_settings_reach_the_grid_maximum() {
    let oracle = cosine_grid_max(24);
    assert!((oracle - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    let r = chsh_value(
        &ChshSettings::Direct {
            phi_a: 0.0,
            phi_a_prime: FRAC_PI_4,
            phi_b: FRAC_PI_8,
            phi_b_prime: 3.0 * FRAC_PI_8,
        },
        None,
    )
    .unwrap();
    assert!((r.s - oracle).abs() < 1e-12);
}

#[test]
fn scans_respect_tsirelson() {
    let mut rng = rng(5);
    for _ in 0..20 {
        let layout = random_layout(&mut rng);
        let locus_a: Vec<Point2> = (0..4).map(|_| random_point(&mut rng, 3.0)).collect();
        let locus_b: Vec<Point2> = (0..4).map(|_| random_point(&mut rng, 3.0)).collect();
        if let Ok(out) =
            scan_chsh_over_locations(&layout, &locus_a, &locus_b, ScanOptions::default())
        {
            for row in &out.table {
                assert!(row.s.abs() <= TSIRELSON_BOUND + 1e-9);
            }
        }
    }
}

fn engineered_layout() -> ExperimentLayout {
    let strong = MagneticMoment::parallel(1.0).unwrap();
    let weak = MagneticMoment::parallel(0.3).unwrap();
    ExperimentLayout::straight(
        Point2::new(2.0, 0.3),
        Point2::new(2.0, -0.3),
        Point2::new(0.0, 1.5),
        Point2::new(0.0, -1.5),
        [strong, strong, weak, weak],
        LineCharge::new(TAU, Point2::ORIGIN, Orientation::Parallel).unwrap(),
    )
}

/// Station phase of meeting point `p` for station A (`a = true`) or B.
fn station_phase(layout: &ExperimentLayout, p: Point2, a: bool) -> Option<f64> {
    let l = layout.with_meetings(p, p);
    let (c1, c2) = if a {
        (Contour::CToA, Contour::DToA)
    } else {
        (Contour::CToB, Contour::DToB)
    };
    Some(l.contour_phase(c1).ok()?.radians() - l.contour_phase(c2).ok()?.radians())
}

/// Point on the circle of radius 1.5 about the charge whose station phase
/// equals `target`: bracket on a fine angular grid, then bisect.
fn place(layout: &ExperimentLayout, target: f64, a: bool) -> Point2 {
    let at = |t: f64| Point2::from_polar(1.5, t);
    let f = |t: f64| station_phase(layout, at(t), a).map(|v| v - target);
    let n = 2000;
    for k in 0..n {
        let (t0, t1) = (TAU * k as f64 / n as f64, TAU * (k + 1) as f64 / n as f64);
        let (Some(f0), Some(f1)) = (f(t0), f(t1)) else {
            continue;
        };
        if f0.signum() == f1.signum() || (f1 - f0).abs() > 0.1 {
            continue;
        }
        let (mut lo, mut hi, mut flo) = (t0, t1, f0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid).unwrap();
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return at(0.5 * (lo + hi));
    }
    panic!("no placement for {target}");
}

#[test]
fn engineered_loci_reach_tsirelson() {
    let layout = engineered_layout();
    let locus_a = [place(&layout, 0.0, true), place(&layout, FRAC_PI_4, true)];
    let locus_b = [
        place(&layout, FRAC_PI_8, false),
        place(&layout, 3.0 * FRAC_PI_8, false),
    ];
    for (p, target) in locus_a.iter().zip([0.0, FRAC_PI_4]) {
        assert!((station_phase(&layout, *p, true).unwrap() - target).abs() < 1e-12);
    }
    let out =
        scan_chsh_over_locations(&layout, &locus_a, &locus_b, ScanOptions::default()).unwrap();
    assert_eq!(out.table.len(), 4);
    assert!(
        (out.best.s.abs() - TSIRELSON_BOUND).abs() < 1e-6,
        "{}",
        out.best.s
    );
    assert!((out.best_record.s - out.best.s).abs() < 1e-12);
}

#[test]
fn equal_phase_loci_stay_at_two() {
    // charge far outside the layout, equal moments: every station phase is the
    // same closed-loop value, zero
    let m = MagneticMoment::parallel(1.0).unwrap();
    let layout = ExperimentLayout::straight(
        Point2::new(-1.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(0.0, 1.0),
        Point2::new(0.0, -1.0),
        [m; 4],
        LineCharge::new(3.0, Point2::new(40.0, 30.0), Orientation::Parallel).unwrap(),
    );
    let locus_a: Vec<Point2> = (0..5)
        .map(|k| Point2::new(-1.0 + 0.5 * k as f64, 1.0))
        .collect();
    let locus_b: Vec<Point2> = (0..4)
        .map(|k| Point2::new(-1.0 + 0.6 * k as f64, -1.2))
        .collect();
    let out =
        scan_chsh_over_locations(&layout, &locus_a, &locus_b, ScanOptions::default()).unwrap();
    assert_eq!(out.table.len(), 5 * 4 * 4 * 3);
    assert!((out.best.s.abs() - 2.0).abs() < 1e-9);
    assert_eq!((out.best.a_index, out.best.a_prime_index), (0, 1));
}

#[test]
fn single_winding_circuit_gives_cos_two_mu_lambda() {
    let mut rng = rng(6);
    for _ in 0..20 {
        let (mu, lambda) = (rng.gen_range(0.0..2.0), rng.gen_range(-3.0..3.0));
        let m = MagneticMoment::parallel(mu).unwrap();
        let layout = ExperimentLayout::straight(
            Point2::new(-1.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, -1.0),
            Point2::new(0.0, 1.0),
            [m; 4],
            LineCharge::new(lambda, random_point(&mut rng, 0.3), Orientation::Parallel).unwrap(),
        );
        let circuit = Polyline::new(vec![
            layout.source_c,
            layout.meeting_a,
            layout.source_d,
            layout.meeting_b,
            layout.source_c,
        ])
        .unwrap();
        assert_eq!(winding_number(&circuit, layout.charge.puncture).unwrap(), 1);
        let (e, _) = evaluate(&compute_phases(&layout).unwrap()).unwrap();
        assert!((e - (2.0 * mu * lambda).cos()).abs() < 1e-9);
    }
}

#[test]
fn quadrature_cross_check_on_random_layouts() {
    let mut rng = rng(7);
    let mut checked = 0;
    while checked < 100 {
        let layout = random_layout(&mut rng);
        // keep to the regime where 64 nodes resolve the integrand
        if Contour::ALL.iter().any(|c| {
            let (a, b) = layout.endpoints(*c);
            let path = Polyline::segment(a, b).unwrap();
            min_distance(&path, layout.charge.puncture) < 0.1 * a.distance(b)
        }) {
            continue;
        }
        let p = compute_phases(&layout).unwrap();
        let q = compute_phases_quadrature(&layout, 64).unwrap();
        for (i, phi) in q.iter().enumerate() {
            assert!((phi.radians() - p.phi(i + 1).radians()).abs() < 1e-6);
        }
        checked += 1;
    }
}

#[test]
fn lhv_sampling_never_beats_two() {
    assert_eq!(exhaustive_lhv_max(), 2.0);
    for seed in 0..20 {
        assert!(lhv_reference_bound(10_000, seed).unwrap() <= 2.0 + 1e-12);
    }
}
