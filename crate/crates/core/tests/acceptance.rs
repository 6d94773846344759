//! End-to-end acceptance run: prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};
use std::process::ExitCode;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rapoly::bounds::{
    compact_bounds_atkinson, compact_upper_improved, ideal_bounds_atkinson, ideal_upper_improved,
};
use rapoly::combinatorics::{canonical_code, check_compact_identity, check_ideal_identity, shapes, Class, CombPolyhedron};
use rapoly::enumeration::{enumerate_candidates, EnumerationBudget};
use rapoly::gluing::{double_compact, double_ideal};
use rapoly::lobachevsky::{cross_ratio_volume, lobachevsky, orthoscheme_volume, v3, v8};
use rapoly::pipeline::{census_csv, members_csv, run_census, Census, CensusOptions};
use rapoly::realization::{realize_compact, realize_ideal, realize_polyhedron};
use rapoly::volume::{compact_decomposition, default_interior_point, ideal_decomposition, volume, FaceTriangulation};

mod common;
use common::{gauss_legendre, lobachevsky_by_quadrature, orthoscheme_by_integration};

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, name: &str, ok: bool, detail: impl AsRef<str>) {
        println!("{} {name}: {}", if ok { "PASS" } else { "FAIL" }, detail.as_ref());
        if !ok {
            self.failures += 1;
        }
    }
}

fn census(klass: Class, max: usize, parallelism: usize) -> Census {
    let mut opts = CensusOptions::new(klass, max);
    opts.parallelism = parallelism;
    run_census(&opts).expect("census runs")
}

fn close(a: Option<f64>, b: f64, tol: f64) -> bool {
    a.is_some_and(|a| (a - b).abs() <= tol)
}

/// Compares rows `vertices → (count, distinct, min, max)` against a reference.
fn rows_match(c: &Census, expected: &[(usize, usize, usize, f64, f64)], tol: f64) -> (bool, String) {
    let mut ok = true;
    let mut detail = Vec::new();
    for &(v, n, d, lo, hi) in expected {
        let Some(row) = c.rows.iter().find(|r| r.vertices == v) else {
            return (false, format!("row V={v} missing"));
        };
        let good = row.polyhedra_count == n
            && row.distinct_volume_count == d
            && (n == 0 || (close(row.min_volume, lo, tol) && close(row.max_volume, hi, tol)));
        ok &= good;
        detail.push(format!(
            "V={v}:{}/{}{}",
            row.polyhedra_count,
            row.distinct_volume_count,
            match (row.min_volume, row.max_volume) {
                (Some(a), Some(b)) => format!("[{a:.6},{b:.6}]"),
                _ => String::new(),
            }
        ));
    }
    (ok, detail.join(" "))
}

fn lobachevsky_criteria(r: &mut Report) {
    let (a, b) = (v8(), v3());
    r.line(
        "1 constants",
        (a - 3.663862376708876).abs() <= 1e-12 && (b - 1.014941606409653).abs() <= 1e-12,
        format!("v8 = {a:.15}, v3 = {b:.15}"),
    );
}

fn ideal_criteria(r: &mut Report, ideal: &Census) {
    let table = [
        (6, 1, 1, 3.663863, 3.663863),
        (7, 0, 0, 0.0, 0.0),
        (8, 1, 1, 6.023046, 6.023046),
        (9, 1, 1, 7.327725, 7.327725),
        (10, 2, 2, 8.137885, 8.612415),
        (11, 2, 2, 9.686908, 10.149416),
        (12, 9, 7, 10.149416, 12.046092),
        (13, 11, 7, 11.801747, 13.350771),
    ];
    let (ok, detail) = rows_match(ideal, &table, 1e-5);
    r.line("2 ideal census V=6..13", ok, detail);
    let stretch = [(14, 37, 17, 12.106298, 14.832681), (15, 79, 31, 13.813278, 16.331571)];
    let (ok, detail) = rows_match(ideal, &stretch, 1e-5);
    r.line("2 ideal census V=14,15 (stretch)", ok, detail);
}

fn compact_criteria(r: &mut Report, compact: &Census) {
    let table = [
        (20, 1, 1, 4.306208, 4.306208),
        (22, 0, 0, 0.0, 0.0),
        (24, 1, 1, 6.023046, 6.023046),
        (26, 1, 1, 6.967011, 6.967011),
        (28, 3, 3, 7.563249, 8.000234),
    ];
    let (ok, detail) = rows_match(compact, &table, 1e-4);
    r.line("3 compact census V=20..28", ok, detail);
    let stretch = [(30, 4, 4, 8.612415, 8.946606), (32, 12, 12, 9.019053, 9.977170)];
    let (ok, detail) = rows_match(compact, &stretch, 1e-4);
    r.line("3 compact census V=30,32 (stretch)", ok, detail);
}

fn sandwich_criteria(r: &mut Report, ideal: &Census, compact: &Census) {
    let mut bad = Vec::new();
    let mut checked = 0;
    for m in &ideal.members {
        let (lo, hi) = ideal_bounds_atkinson(m.vertices).unwrap();
        let mut ok = lo.value - 1e-9 <= m.volume && m.volume <= hi.value + 1e-9;
        if m.vertices >= 9 {
            ok &= m.volume <= ideal_upper_improved(m.vertices).unwrap().value + 1e-9;
        }
        if !ok {
            bad.push(format!("ideal V={} {:.6}", m.vertices, m.volume));
        }
        checked += 1;
    }
    for m in &compact.members {
        let (lo, hi) = compact_bounds_atkinson(m.vertices).unwrap();
        let mut ok = lo.value < m.volume && m.volume < hi.value;
        if m.vertices >= 24 {
            ok &= m.volume <= compact_upper_improved(m.vertices).unwrap().value + 1e-9;
        }
        if !ok {
            bad.push(format!("compact V={} {:.6}", m.vertices, m.volume));
        }
        checked += 1;
    }
    let flagged = ideal.violations().count() + compact.violations().count();
    r.line(
        "4 bound sandwich",
        bad.is_empty() && flagged == 0,
        format!("{checked} polyhedra, {} outside, {flagged} flagged by the pipeline {bad:?}", bad.len()),
    );
}

fn equality_criteria(r: &mut Report, ideal: &Census) {
    let oct = volume(&realize_ideal(&shapes::octahedron()).unwrap()).unwrap();
    let (lo, hi) = ideal_bounds_atkinson(6).unwrap();
    r.line(
        "5 octahedron attains both ideal bounds",
        (oct - lo.value).abs() <= 1e-9 && (oct - hi.value).abs() <= 1e-9,
        format!("volume {oct:.12}, lower {:.12}, upper {:.12}", lo.value, hi.value),
    );
    // (V - 5) v8 / 2, written out independently of the bounds module
    let improved = |v: usize| (v as f64 - 5.0) * v8() / 2.0;
    let nine: Vec<f64> = ideal.members.iter().filter(|m| m.vertices == 9).map(|m| m.volume).collect();
    r.line(
        "5 V=9 attains the improved ideal bound",
        nine.len() == 1
            && (nine[0] - improved(9)).abs() <= 1e-9
            && (ideal_upper_improved(9).unwrap().value - improved(9)).abs() <= 1e-12,
        format!("{nine:?} vs {:.12}", improved(9)),
    );
    let gap = ideal
        .members
        .iter()
        .filter(|m| m.vertices >= 10)
        .map(|m| improved(m.vertices) - m.volume)
        .fold(f64::INFINITY, f64::min);
    r.line("5 ideal V>=10 strictly below the improved bound", gap >= 1e-3, format!("smallest gap {gap:.6}"));
}

fn gluing_criteria(r: &mut Report) {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, p, n, expected) in [
        ("octahedron", shapes::octahedron(), 3, 7.327725),
        ("square antiprism", shapes::antiprism(4), 4, 12.046092),
        ("dodecahedron", shapes::dodecahedron(), 5, 8.612415),
    ] {
        let f = p.faces().iter().position(|f| f.len() == n).unwrap();
        let glued = match p.klass() {
            Class::Ideal => double_ideal(&p, f),
            Class::Compact => double_compact(&p, f),
        }
        .unwrap();
        let parent = volume(&realize_polyhedron(&p).unwrap()).unwrap();
        let child = volume(&realize_polyhedron(&glued.polyhedron).unwrap()).unwrap();
        ok &= (child - 2.0 * parent).abs() <= 1e-8 && (child - expected).abs() <= 5e-7;
        detail.push(format!("{name} {child:.6} (2x{parent:.6})"));
    }
    r.line("6 doubling along a face", ok, detail.join(", "));
}

fn mobius(z: Complex64, m: [Complex64; 4]) -> Complex64 {
    (m[0] * z + m[1]) / (m[2] * z + m[3])
}

fn cross_ratio(z: [Complex64; 4]) -> Complex64 {
    (z[3] - z[1]) * (z[2] - z[0]) / ((z[2] - z[1]) * (z[3] - z[0]))
}

fn property_criteria(r: &mut Report, ideal: &Census) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x = rng.gen_range(1e-4..PI - 1e-4);
        worst = worst.max((lobachevsky(x) - lobachevsky_by_quadrature(x)).abs());
        // odd, π-periodic, duplication formula
        worst = worst.max((lobachevsky(-x) + lobachevsky(x)).abs());
        worst = worst.max((lobachevsky(x + PI) - lobachevsky(x)).abs());
        let y = x / 2.0;
        worst = worst.max((lobachevsky(2.0 * y) - 2.0 * (lobachevsky(y) + lobachevsky(y + FRAC_PI_2))).abs());
    }
    r.line("7 Lobachevsky function", worst <= 1e-13, format!("max deviation {worst:.2e}"));

    let mut worst = 0.0f64;
    for _ in 0..200 {
        let mut c = || Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let z = [c(), c(), c(), c()];
        let m = [c(), c(), c(), c()];
        if (m[0] * m[3] - m[1] * m[2]).norm() < 0.1 || z.iter().any(|&p| (m[2] * p + m[3]).norm() < 0.1) {
            continue;
        }
        let before = cross_ratio_volume(cross_ratio(z)).unwrap();
        let after = cross_ratio_volume(cross_ratio(z.map(|p| mobius(p, m)))).unwrap();
        worst = worst.max((before - after).abs());
    }
    r.line("7 Moebius invariance", worst <= 1e-12, format!("max deviation {worst:.2e}"));

    let mut worst = 0.0f64;
    let small_ideal: Vec<CombPolyhedron> = enumerate_candidates(&EnumerationBudget::new(Class::Ideal, 12, 0).unwrap())
        .unwrap()
        .into_iter()
        .map(|c| c.polyhedron)
        .collect();
    for p in &small_ideal {
        let real = realize_ideal(p).unwrap();
        let reference = ideal_decomposition(&real, 0, FaceTriangulation::Fan).unwrap().total.abs();
        for base in 0..p.vertex_count() {
            for how in [FaceTriangulation::Fan, FaceTriangulation::Zigzag] {
                let v = ideal_decomposition(&real, base, how).unwrap().total.abs();
                worst = worst.max((v - reference).abs());
            }
        }
    }
    r.line(
        "7 ideal base-vertex and triangulation independence",
        worst <= 1e-9,
        format!("{} polyhedra, max spread {worst:.2e}", small_ideal.len()),
    );

    let mut worst = 0.0f64;
    let small_compact: Vec<CombPolyhedron> =
        enumerate_candidates(&EnumerationBudget::new(Class::Compact, 28, 0).unwrap())
            .unwrap()
            .into_iter()
            .map(|c| c.polyhedron)
            .collect();
    for p in &small_compact {
        let real = realize_compact(p).unwrap();
        let center = default_interior_point(&real);
        let reference = compact_decomposition(&real, &center).unwrap().total;
        let mut tried = 0;
        while tried < 5 {
            let a = real.vertices[rng.gen_range(0..p.vertex_count())];
            let b = real.vertices[rng.gen_range(0..p.vertex_count())];
            let mid = a + b + center * 0.5;
            let o = mid * (1.0 / (-mid.norm2()).sqrt());
            if real.normals.iter().any(|n| o.dot(n) > -1e-6) {
                continue;
            }
            worst = worst.max((compact_decomposition(&real, &o).unwrap().total - reference).abs());
            tried += 1;
        }
    }
    r.line(
        "7 compact interior-point independence",
        worst <= 1e-8,
        format!("{} polyhedra, max spread {worst:.2e}", small_compact.len()),
    );

    let mut ok = true;
    let mut count = 0;
    for p in small_ideal.iter().chain(&small_compact) {
        let (v, e, f) = (p.vertex_count(), p.edge_count(), p.face_count());
        ok &= v + f == e + 2;
        let sides: usize = p.face_vector().iter().map(|(k, n)| k * n).sum();
        ok &= sides == 2 * e && p.face_vector().values().sum::<usize>() == f;
        ok &= match p.klass() {
            Class::Ideal => check_ideal_identity(p).unwrap() && e == 2 * v && f == v + 2,
            Class::Compact => check_compact_identity(p).unwrap() && 2 * e == 3 * v && 2 * f == v + 4,
        };
        count += 1;
    }
    r.line("7 Euler and face-vector identities", ok, format!("{count} polyhedra"));

    let mut ok = true;
    for p in small_ideal.iter().chain(&small_compact) {
        let code = canonical_code(p);
        ok &= canonical_code(&p.mirror()) == code;
        for _ in 0..5 {
            let mut perm: Vec<usize> = (0..p.vertex_count()).collect();
            for i in (1..perm.len()).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            ok &= canonical_code(&p.relabel(&perm)) == code;
        }
    }
    r.line("7 canonical code invariance", ok, "relabelings and mirror images");

    let serial = census(Class::Ideal, 13, 1);
    let parallel = census(Class::Ideal, 13, 4);
    let again = census(Class::Ideal, 13, 4);
    let ok = census_csv(&serial) == census_csv(&parallel)
        && census_csv(&parallel) == census_csv(&again)
        && members_csv(&serial) == members_csv(&parallel)
        && census_csv(&serial).as_bytes() == census_csv(&ideal.clone_rows_up_to(13)).as_bytes();
    r.line("7 deterministic CSV", ok, "parallelism 1 and 4, repeated runs");
}

trait RowsUpTo {
    fn clone_rows_up_to(&self, max: usize) -> Census;
}

impl RowsUpTo for Census {
    fn clone_rows_up_to(&self, max: usize) -> Census {
        Census {
            klass: self.klass,
            members: self.members.iter().filter(|m| m.vertices <= max).cloned().collect(),
            rows: self.rows.iter().filter(|r| r.vertices <= max).cloned().collect(),
            volume_matches: self.volume_matches.iter().filter(|m| m.vertices <= max).cloned().collect(),
        }
    }
}

fn orthoscheme_criteria(r: &mut Report) {
    let rule = gauss_legendre(40);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut checked = 0;
    while checked < 100 {
        let (a, b, c) = (rng.gen_range(0.1..1.55), rng.gen_range(0.1..1.55), rng.gen_range(0.1..1.55));
        let admissible = a + b > FRAC_PI_2 + 0.15
            && b + c > FRAC_PI_2 + 0.15
            && b.cos().powi(2) - (a.sin() * c.sin()).powi(2) > 0.02;
        if !admissible {
            continue;
        }
        worst = worst.max((orthoscheme_volume(a, b, c).unwrap() - orthoscheme_by_integration(a, b, c, &rule)).abs());
        checked += 1;
    }
    r.line("8 orthoscheme formula vs integration", worst <= 1e-8, format!("{checked} triples, max deviation {worst:.2e}"));
    let dodeca = 120.0 * orthoscheme_volume(PI / 5.0, FRAC_PI_3, FRAC_PI_4).unwrap();
    r.line("8 dodecahedron from 120 orthoschemes", (dodeca - 4.306208).abs() <= 1e-6, format!("{dodeca:.9}"));
}

fn main() -> ExitCode {
    let mut r = Report { failures: 0 };
    lobachevsky_criteria(&mut r);
    let ideal = census(Class::Ideal, 15, 0);
    ideal_criteria(&mut r, &ideal);
    let compact = census(Class::Compact, 32, 0);
    compact_criteria(&mut r, &compact);
    sandwich_criteria(&mut r, &ideal, &compact);
    equality_criteria(&mut r, &ideal);
    gluing_criteria(&mut r);
    property_criteria(&mut r, &ideal);
    orthoscheme_criteria(&mut r);
    println!("acceptance: {} failed", r.failures);
    if r.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
