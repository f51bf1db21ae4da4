//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Timed criteria serialize on a global lock so they never compete for cores.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ris_emf::{
    bo_closed_form, boresight_peaks, builtin_profiles, efield_at, field_map, field_regions,
    limit_lookup, min_height, oracle::oracle_efield, peak_efield, vpm_to_dbvpm, Authority,
    EirpPreset, Error, GainPattern, Interpolation, LinkBudget, Mode, Point3, RisArray, Scenario,
};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn report(id: u32, name: &str, pass: bool, details: &str) {
    println!(
        "criterion {id:02} {}: {name} — {details}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id:02} {name}: {details}");
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let denom = a.abs().max(b.abs());
    if denom == 0.0 {
        0.0
    } else {
        (a - b).abs() / denom
    }
}

/// Random scenario with the evaluation point and target kept clear of the
/// array surface.
fn random_scenario(rng: &mut ChaCha8Rng, max_n: usize, force_bo: bool) -> (Scenario, Point3) {
    let n = rng.gen_range(1..=max_n);
    let freq = rng.gen_range(1.0e9..30.0e9);
    let p_max = rng.gen_range(0.01..2000.0);
    let d_br = rng.gen_range(1.0..100.0);
    let h_ris = rng.gen_range(1.0..6.0);
    let spacing_frac = rng.gen_range(0.3..0.7);
    let exponent = rng.gen_range(0.0..6.0);
    let azimuth = rng.gen_bool(0.5);

    let link = LinkBudget::new(freq, p_max, d_br).unwrap();
    let array = RisArray::new(n, spacing_frac * link.wavelength(), h_ris).unwrap();
    let pattern = GainPattern::new(exponent, azimuth).unwrap();
    let point = Point3::new(
        rng.gen_range(-4.0..4.0),
        rng.gen_range(0.3..9.0),
        rng.gen_range(0.1..5.0),
    )
    .unwrap();
    let mode = if force_bo || rng.gen_bool(0.5) {
        Mode::Bo {
            target: Point3::new(
                rng.gen_range(-4.0..4.0),
                rng.gen_range(0.3..9.0),
                rng.gen_range(0.1..5.0),
            )
            .unwrap(),
        }
    } else {
        Mode::Ro
    };
    let s = Scenario::new(link, array, pattern, mode, 1.5).unwrap();
    (s, point)
}

fn fig6_scenario(n: usize) -> Scenario {
    let link = LinkBudget::new(3.5e9, EirpPreset::Fcc.watts(), 20.0).unwrap();
    let array = RisArray::new(n, link.wavelength() / 2.0, 1.5).unwrap();
    Scenario::new(link, array, GainPattern::isotropic(), Mode::Ro, 1.5).unwrap()
}

#[test]
fn criterion_01_closed_form_equivalence() {
    let _guard = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let started = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (s, _) = random_scenario(&mut rng, 16, true);
        let target = match s.mode() {
            Mode::Bo { target } => target,
            Mode::Ro => unreachable!(),
        };
        let direct = efield_at(&s, &target).unwrap();
        let closed = bo_closed_form(&s).unwrap();
        worst = worst.max(rel_diff(direct, closed));
    }
    let elapsed = started.elapsed();
    report(
        1,
        "closed-form equivalence at the focus",
        worst < 1e-12 && elapsed < Duration::from_secs(10),
        &format!("1000 scenarios, worst rel err {worst:.2e}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_02_oracle_equivalence() {
    let _guard = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let started = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (s, point) = random_scenario(&mut rng, 16, false);
        let engine = efield_at(&s, &point).unwrap();
        let reference = oracle_efield(&s, &point).unwrap().magnitude;
        worst = worst.max(rel_diff(engine, reference));
    }
    let elapsed = started.elapsed();
    report(
        2,
        "engine matches brute-force oracle",
        worst < 1e-9 && elapsed < Duration::from_secs(30),
        &format!("1000 scenarios, worst rel err {worst:.2e}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_03_published_4x4_peak() {
    let _guard = serial();
    // 4x4 isotropic elements, 1 mW total at the surface; boresight sampled at
    // the published 0.05 m evaluation resolution out to 10 m.
    let link = LinkBudget::with_ris_power(3.5e9, 1e-3).unwrap();
    let array = RisArray::new(4, link.wavelength() / 2.0, 1.5).unwrap();
    let s = Scenario::new(link, array, GainPattern::isotropic(), Mode::Ro, 1.5).unwrap();

    let h = s.array().center().h;
    let mut best = (0.0f64, f64::NEG_INFINITY);
    for k in 1..=200 {
        let y = k as f64 * 0.05;
        let e = efield_at(&s, &Point3::new(0.0, y, h).unwrap()).unwrap();
        if e > best.1 {
            best = (y, e);
        }
    }
    let peak_db = vpm_to_dbvpm(best.1);

    // The 27.61 dBV/m ray-tracing figure needs a commercial simulator; the
    // engine/oracle gap stands in for that cross-check.
    let at_peak = Point3::new(0.0, best.0, h).unwrap();
    let oracle_db = vpm_to_dbvpm(oracle_efield(&s, &at_peak).unwrap().magnitude);
    let gap_db = (peak_db - oracle_db).abs();

    report(
        3,
        "4x4 sampled boresight peak 27.38 dBV/m",
        (peak_db - 27.38).abs() <= 0.1 && gap_db < 0.25,
        &format!(
            "peak {peak_db:.4} dBV/m at y = {:.2} m, engine/oracle gap {gap_db:.2e} dB",
            best.0
        ),
    );
}

#[test]
fn criterion_04_near_field_peak_locations() {
    let _guard = serial();
    let started = Instant::now();
    let expected: [(usize, usize, f64); 4] =
        [(4, 1, 0.085), (8, 2, 0.432), (16, 4, 1.842), (32, 8, 7.455)];
    // One log step at 200 samples/decade is ~1.2%, below the 5% floor.
    let tolerance = 0.05;
    let mut pass = true;
    let mut details = Vec::new();
    for (n, count, final_y) in expected {
        let reportd = boresight_peaks(&fig6_scenario(n), 20.0).unwrap();
        let got_count = reportd.peaks.len();
        let got_final = reportd.peaks.last().map(|p| p.location.y).unwrap_or(0.0);
        let loc_ok = (got_final - final_y).abs() / final_y <= tolerance;
        pass &= got_count == count && loc_ok;
        details.push(format!("N={n}: {got_count} peaks, final {got_final:.4} m"));
    }
    let elapsed = started.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    report(
        4,
        "boresight peak counts N/4 and final locations",
        pass,
        &format!("{} ({elapsed:.2?})", details.join("; ")),
    );
}

#[test]
fn criterion_05_final_peak_between_region_bounds() {
    let _guard = serial();
    let s = fig6_scenario(32);
    let regions = field_regions(32, s.link().wavelength()).unwrap();
    let final_peak = boresight_peaks(&s, 20.0)
        .unwrap()
        .peaks
        .last()
        .unwrap()
        .location
        .y;
    let bounds_ok =
        rel_diff(regions.near_bound, 5.716) < 5e-3 && rel_diff(regions.far_bound, 87.71) < 5e-3;
    report(
        5,
        "N=32 final peak inside the Fresnel region",
        bounds_ok && regions.near_bound < final_peak && final_peak < regions.far_bound,
        &format!(
            "d_N {:.3} m < peak {final_peak:.3} m < d_F {:.2} m",
            regions.near_bound, regions.far_bound
        ),
    );
}

#[test]
fn criterion_06_minimum_heights() {
    let _guard = serial();
    let started = Instant::now();
    // The published height study applies the cos^3 element taper to the wave
    // amplitude, which in this engine's power-gain convention is exponent 6.
    let pattern = GainPattern::new(6.0, false).unwrap();
    let link = LinkBudget::new(3.5e9, EirpPreset::Fcc.watts(), 20.0).unwrap();
    let array = RisArray::new(16, link.wavelength() / 2.0, 3.0).unwrap();
    let limit_vpm = 10.0; // 20 dBV/m

    let ro = Scenario::new(link, array.clone(), pattern, Mode::Ro, 1.5).unwrap();
    let ro_result = min_height(&ro, limit_vpm, (1.5, 8.0), 10.0, 0.05).unwrap();

    let bo = Scenario::new(
        link,
        array,
        pattern,
        Mode::Bo {
            target: Point3::new(0.0, 1.0, 1.5).unwrap(),
        },
        1.5,
    )
    .unwrap();
    let bo_result = min_height(&bo, limit_vpm, (1.5, 8.0), 10.0, 0.05).unwrap();

    let elapsed = started.elapsed();
    let pass = ro_result.converged
        && bo_result.converged
        && (ro_result.value - 2.05).abs() <= 0.05
        && (bo_result.value - 3.19).abs() <= 0.05
        && elapsed < Duration::from_secs(300);
    report(
        6,
        "16x16 minimum mounting heights",
        pass,
        &format!(
            "RO {:.3} m (target 2.05±0.05), BO {:.3} m (target 3.19±0.05), {elapsed:.2?}",
            ro_result.value, bo_result.value
        ),
    );
}

#[test]
fn criterion_07_ro_frequency_independence() {
    let _guard = serial();
    // Fixed physical aperture: element count scales with frequency.
    let configs = [(8usize, 3.5e9), (32, 14.0e9), (64, 28.0e9)];
    let mut peaks_db = Vec::new();
    for (n, freq) in configs {
        let link = LinkBudget::new(freq, EirpPreset::Fcc.watts(), 20.0).unwrap();
        let array = RisArray::new(n, link.wavelength() / 2.0, 3.0).unwrap();
        let s = Scenario::new(link, array, GainPattern::default(), Mode::Ro, 1.5).unwrap();
        let peak = peak_efield(&s, 10.0, 0.05).unwrap().global_max.e_vpm;
        peaks_db.push(vpm_to_dbvpm(peak));
    }
    let spread = peaks_db.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - peaks_db.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    report(
        7,
        "reflective peak independent of frequency at fixed aperture",
        spread < 1.0,
        &format!(
            "peaks {:.3} / {:.3} / {:.3} dBV/m, spread {spread:.3} dB",
            peaks_db[0], peaks_db[1], peaks_db[2]
        ),
    );
}

#[test]
fn criterion_08_property_suite() {
    let _guard = serial();
    let mut pass = true;
    let mut details = Vec::new();

    // Focusing at the evaluation point dominates plain reflection.
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut violations = 0u32;
    for _ in 0..1000 {
        let (ro, point) = random_scenario(&mut rng, 12, false);
        let ro = Scenario::new(
            *ro.link(),
            ro.array().clone(),
            *ro.pattern(),
            Mode::Ro,
            ro.user_height(),
        )
        .unwrap();
        let focused = Scenario::new(
            *ro.link(),
            ro.array().clone(),
            *ro.pattern(),
            Mode::Bo { target: point },
            ro.user_height(),
        )
        .unwrap();
        let e_ro = efield_at(&ro, &point).unwrap();
        let e_bo = efield_at(&focused, &point).unwrap();
        if e_ro > e_bo * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    pass &= violations == 0;
    details.push(format!("focus dominance violations {violations}/1000"));

    // Exact peak shifts under distance doubling and power doubling.
    let link = LinkBudget::new(3.5e9, EirpPreset::Fcc.watts(), 20.0).unwrap();
    let array = RisArray::new(8, link.wavelength() / 2.0, 3.0).unwrap();
    let s = Scenario::new(link, array.clone(), GainPattern::default(), Mode::Ro, 1.5).unwrap();
    let base = peak_efield(&s, 6.0, 0.05).unwrap().global_max.e_vpm;
    let far = peak_efield(&s.at_distance(40.0).unwrap(), 6.0, 0.05)
        .unwrap()
        .global_max
        .e_vpm;
    let dist_shift_db = vpm_to_dbvpm(far) - vpm_to_dbvpm(base);
    pass &= rel_diff(far, base / 2.0) < 1e-12 && (dist_shift_db + 6.0206).abs() < 1e-3;
    details.push(format!("d_BR doubling shift {dist_shift_db:.4} dB"));

    let boosted_link = LinkBudget::new(3.5e9, 2.0 * EirpPreset::Fcc.watts(), 20.0).unwrap();
    let boosted =
        Scenario::new(boosted_link, array, GainPattern::default(), Mode::Ro, 1.5).unwrap();
    let boosted_peak = peak_efield(&boosted, 6.0, 0.05).unwrap().global_max.e_vpm;
    let power_shift_db = vpm_to_dbvpm(boosted_peak) - vpm_to_dbvpm(base);
    pass &= rel_diff(boosted_peak, base * 2f64.sqrt()) < 1e-12
        && (power_shift_db - 3.0103).abs() < 1e-3;
    details.push(format!("P_max doubling shift {power_shift_db:.4} dB"));

    // Mirror symmetry of a centered-target map.
    let sym = Scenario::new(
        *s.link(),
        s.array().clone(),
        *s.pattern(),
        Mode::Bo {
            target: Point3::new(0.0, 1.0, 1.5).unwrap(),
        },
        1.5,
    )
    .unwrap();
    let map = field_map(&sym, 4.0, 0.1).unwrap();
    let mut worst_mirror = 0.0f64;
    for row in 0..map.ny {
        for col in 0..map.nx {
            let mirrored = map.sample(row, map.nx - 1 - col);
            worst_mirror = worst_mirror.max(rel_diff(map.sample(row, col), mirrored));
        }
    }
    pass &= worst_mirror < 1e-9;
    details.push(format!("mirror asymmetry {worst_mirror:.2e}"));

    // Peak value stability under 2x grid refinement.
    let mut worst_refine = 0.0f64;
    for scenario in [&s, &sym] {
        let coarse = peak_efield(scenario, 10.0, 0.05).unwrap().global_max.e_vpm;
        let fine = peak_efield(scenario, 10.0, 0.025).unwrap().global_max.e_vpm;
        worst_refine = worst_refine.max((vpm_to_dbvpm(coarse) - vpm_to_dbvpm(fine)).abs());
    }
    pass &= worst_refine < 0.1;
    details.push(format!("refinement shift {worst_refine:.4} dB"));

    report(
        8,
        "scaling and symmetry properties",
        pass,
        &details.join("; "),
    );
}

#[test]
fn criterion_09_limits_database() {
    let _guard = serial();
    let mut pass = true;
    let mut details = Vec::new();

    // Band endpoints reproduce the published table: anchors exactly, derived
    // upper edges to the table's printed precision (sqrt-law bands are
    // anchored at their lower edge, so the upper edge carries the table's
    // rounding).
    let mut worst_endpoint = 0.0f64;
    for profile in builtin_profiles() {
        for band in &profile.bands {
            pass &= band.limit_at(band.f_low_hz) == band.limit_low_vpm;
            let err = rel_diff(band.limit_at(band.f_high_hz), band.limit_high_vpm);
            worst_endpoint = worst_endpoint.max(err);
            pass &= match band.interpolation {
                Interpolation::SqrtF => err < 2.5e-3,
                _ => err == 0.0,
            };
            // Interior frequencies dispatch to this band through the profile.
            let interior = 0.5 * (band.f_low_hz + band.f_high_hz);
            pass &= profile.limit_at(interior).unwrap() == band.limit_at(interior);
        }
    }
    details.push(format!("worst endpoint deviation {worst_endpoint:.2e}"));

    // Published reference points.
    let spot_checks = [
        (Authority::Itu, 9.0e8, 41.25),
        (Authority::Itu, 28.0e9, 61.0),
        (Authority::Who, 3.5e9, 41.25),
        (Authority::Usa, 28.0e9, 61.4),
        (Authority::Flanders, 3.5e9, 30.7),
        (Authority::China, 3.5e9, 12.625),
        (Authority::China, 2.0e8, 12.0),
        (Authority::Icnirp, 9.0e8, 41.25),
    ];
    for (authority, f, expected) in spot_checks {
        let got = limit_lookup(authority, f).unwrap();
        if rel_diff(got, expected) > 1e-12 {
            pass = false;
            details.push(format!("{authority} at {f} Hz: {got} != {expected}"));
        }
    }

    // Power-density-only region stays undefined rather than silently
    // defaulting.
    let undefined = matches!(
        limit_lookup(Authority::Icnirp, 28.0e9),
        Err(Error::NoLimitDefined { .. })
    );
    pass &= undefined;
    details.push(format!("icnirp 28 GHz undefined: {undefined}"));

    report(
        9,
        "regulatory table reproduction",
        pass,
        &details.join("; "),
    );
}

#[test]
fn criterion_10_performance() {
    let _guard = serial();
    let link = LinkBudget::new(28.0e9, EirpPreset::Fcc.watts(), 20.0).unwrap();
    let array = RisArray::new(64, link.wavelength() / 2.0, 3.0).unwrap();
    let s = Scenario::new(link, array, GainPattern::default(), Mode::Ro, 1.5).unwrap();

    let started = Instant::now();
    let map = field_map(&s, 10.0, 0.05).unwrap();
    let elapsed = started.elapsed();
    report(
        10,
        "64x64 map over 201x201 grid under 30 s",
        map.nx == 201 && map.ny == 201 && elapsed < Duration::from_secs(30),
        &format!("grid {}x{}, {elapsed:.2?}", map.nx, map.ny),
    );
}
