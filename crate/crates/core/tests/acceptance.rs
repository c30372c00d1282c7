//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use num_complex::Complex64 as C;
use periodic_nls::closedform::{self, classify, family_be_triple, ExponentialTriple, Family, FamilyD, Verdict};
use periodic_nls::dressing::{self, linspace, DressedSolution};
use periodic_nls::monodromy::{self, DEFAULT_TOL};
use periodic_nls::pipeline::{self, Build, Outcome, PipelineOptions};
use periodic_nls::scalar_rh::PoleData;
use periodic_nls::verify;
use periodic_nls::{Mode, PeriodicPair};
use std::time::Instant;

const I: C = C::new(0.0, 1.0);
const TRIPLES: [(f64, f64); 3] = [(1.0, 1.0), (0.5, 2.0), (2.0, 0.3)];

struct Outcome_ {
    pass: bool,
    detail: String,
}

fn report(n: u32, o: &Outcome_) {
    println!("criterion {n:>2}: {}  {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
}

/// Low-discrepancy point in [0, 1).
fn frac(i: usize, a: f64) -> f64 {
    (i as f64 * a).fract()
}

fn builds() -> (Vec<(f64, f64, Build)>, f64) {
    // single-threaded, as the runtime bound requires
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let out = pool.install(|| {
        TRIPLES
            .iter()
            .map(|&(a, w)| {
                let pair = PeriodicPair::family_d(a, w).unwrap();
                match pipeline::build(&pair, &PipelineOptions::default()).unwrap() {
                    Outcome::Built(b) => (a, w, *b),
                    Outcome::Rejected(r) => panic!("family D ({a}, {w}) rejected: {:?}", r.verdict),
                }
            })
            .collect::<Vec<_>>()
    });
    (out, start.elapsed().as_secs_f64())
}

fn c1(builds: &[(f64, f64, Build)], secs: f64) -> Outcome_ {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let mut parts = Vec::new();
    let mut pass = true;
    let mut total = secs;
    for (a, w, b) in builds {
        let d = FamilyD::new(*a, *w).unwrap();
        let tau = 2.0 * std::f64::consts::PI / w;
        let xs = linspace(0.0, 5.0, 51);
        let ts = linspace(0.0, 2.0 * tau, 41);
        let start = Instant::now();
        let pts = pool.install(|| b.solution.eval_grid(&xs, &ts)).unwrap();
        total += start.elapsed().as_secs_f64();
        let err = pts.iter().map(|p| (p.u - d.u(p.x, p.t)).norm() / d.u(p.x, p.t).norm()).fold(0.0, f64::max);
        // a(k) comes from the quadrature path, so the 1e-6 bound applies
        pass &= err <= 1e-6;
        parts.push(format!("({a},{w}) rel err {err:.1e}{}", if err <= 1e-8 { " (also <= 1e-8)" } else { "" }));
    }
    pass &= total <= 60.0;
    Outcome_ { pass, detail: format!("{}; pipeline + grids {total:.1} s single-threaded (limit 60 s)", parts.join(", ")) }
}

fn c2(builds: &[(f64, f64, Build)]) -> Outcome_ {
    let mut pass = true;
    let mut parts = Vec::new();
    for (a, w, b) in builds {
        let want = -I * a * w.sqrt() / (w.sqrt() + (a * a + w).sqrt());
        let pd = b.pole_data();
        let ok = pd.len() == 1 && (pd.residues[0] - want).norm() <= 1e-8;
        let err = if pd.len() == 1 { (pd.residues[0] - want).norm() } else { f64::INFINITY };
        pass &= ok;
        parts.push(format!("({a},{w}) |h1 - exact| = {err:.1e}"));
    }
    Outcome_ { pass, detail: parts.join(", ") }
}

fn two_pole_error(pd: PoleData) -> (f64, usize) {
    let sol = DressedSolution::new(pd).unwrap();
    let mut worst: f64 = 0.0;
    let mut singular = 0;
    for x in linspace(0.0, 3.0, 41) {
        for t in linspace(0.0, 2.0 * std::f64::consts::PI, 41) {
            let e = closedform::u_section5(x, t).unwrap();
            match sol.u(x, t) {
                Ok(u) => worst = worst.max((u - e).norm() / e.norm()),
                Err(_) => singular += 1,
            }
        }
    }
    (worst, singular)
}

fn c3() -> (Outcome_, Vec<String>) {
    // literal reading: poles i/2, i with residues 1, 1+i
    let literal = PoleData::new(1.0, vec![I / 2.0, I], vec![C::new(1.0, 0.0), C::new(1.0, 1.0)]).unwrap();
    let (err, singular) = two_pole_error(literal.clone());
    let golden = err <= 1e-9 && singular == 0;
    let roots = closedform::section5_singular_abscissae(-3.0, 1.0);
    let found = |target: f64| roots.iter().any(|r| (r - target).abs() <= 5e-3);
    let abscissae = found(-1.47) && found(-0.0908);
    let mut notes = Vec::new();
    let rescaled = PoleData::new(4.0, vec![I, 2.0 * I], vec![C::new(-1.0, 0.0), C::new(-1.0, -1.0)]).unwrap();
    let (err2, _) = two_pole_error(rescaled);
    notes.push(format!("poles {{i, 2i}} with residues {{-1, -1-i}} reproduce the printed form to rel {err2:.1e}"));
    let sol = DressedSolution::new(literal.clone()).unwrap();
    let peak = linspace(0.0, 3.0, 301)
        .iter()
        .flat_map(|&x| linspace(0.0, 2.0 * std::f64::consts::PI, 201).into_iter().map(move |t| (x, t)))
        .filter_map(|(x, t)| sol.u(x, t).ok().map(|u| (u.norm(), x, t)))
        .fold((0.0, 0.0, 0.0), |m, v| if v.0 > m.0 { v } else { m });
    notes.push(format!(
        "literal data: max |u| = {:.2e} at (x, t) = ({:.3}, {:.3}) inside the quarter plane",
        peak.0, peak.1, peak.2
    ));
    let mut reversed = literal.clone();
    reversed.poles.reverse();
    reversed.residues.reverse();
    let given = DressedSolution::with_order(reversed).unwrap();
    let mut inv: f64 = 0.0;
    for x in linspace(0.5, 3.0, 6) {
        for t in linspace(0.0, 6.0, 7) {
            if let (Ok(u), Ok(v)) = (sol.u(x, t), given.u(x, t)) {
                inv = inv.max((u - v).norm() / u.norm().max(1e-300));
            }
        }
    }
    notes.push(format!("pole-order invariance on the literal data: rel {inv:.1e} (tolerance 1e-9)"));
    (
        Outcome_ {
            pass: golden && abscissae,
            detail: format!(
                "literal data vs printed u1/u2: rel err {err:.2e}, {singular} singular grid points (need <= 1e-9); \
                 singular abscissae of u2 at t=0: {roots:.4?} (need -1.47, -0.0908 within 5e-3: {})",
                if abscissae { "ok" } else { "missing" }
            ),
        },
        notes,
    )
}

fn c4() -> Outcome_ {
    let mut counts = std::collections::BTreeMap::<&str, (usize, usize)>::new();
    let mut check = |name: &'static str, t: ExponentialTriple, fam: Family, admissible: bool| {
        let c = classify(&t);
        let ok = c.family == fam && (c.verdict == Verdict::EventuallyAdmissible) == admissible;
        let e = counts.entry(name).or_default();
        e.0 += 1;
        if !ok {
            e.1 += 1;
        }
    };
    let phi = 0.618_033_988_749_894_9;
    let sq = std::f64::consts::SQRT_2 - 1.0;
    for i in 1..=8 {
        let a = 0.3 + 2.0 * frac(i, phi);
        let u = frac(i, sq);
        // A: -3 a^2 <= omega < 0
        let w = -3.0 * a * a * (0.05 + 0.9 * u);
        let re = ((w + 3.0 * a * a).powi(3) / (27.0 * a * a)).sqrt();
        let im = w.abs().powf(1.5) / (3.0 * 3f64.sqrt() * a);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        check("A", ExponentialTriple::new(a, w, C::new(sign * re, im)).unwrap(), Family::FamilyA, false);
        // C: omega < -3 a^2
        let w = -3.0 * a * a * (1.1 + u);
        check("C", ExponentialTriple::new(a, w, C::new(0.0, a * (-2.0 * a * a - w).sqrt())).unwrap(), Family::FamilyC, false);
        // D+ for any omega >= -a^2, D- with -a^2 <= omega <= 0
        let w = -a * a + 3.0 * u;
        check("D+", ExponentialTriple::new(a, w, C::new(a * (w + a * a).sqrt(), 0.0)).unwrap(), Family::FamilyDPlus, false);
        let w = -a * a * u;
        check("D- (omega <= 0)", ExponentialTriple::family_d_minus(a, w).unwrap(), Family::FamilyDMinus, false);
    }
    // B and E from their parameters (K, omega, c2)
    let mut b_found = 0;
    let mut e_found = 0;
    for i in 1..=400 {
        let k = 0.3 + 1.5 * frac(i, phi);
        let u = frac(i, sq);
        let v = frac(i, 0.754_877_666_246_692_7);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        if b_found < 8 {
            let w = -k * k * (4.0 + 8.0 * (0.05 + 0.9 * u));
            let c2 = -(4.0 * k * k + w) / 2.0 * (0.05 + 0.95 * v);
            if let Ok(t) = family_be_triple(k, w, c2, sign) {
                check("B", t, Family::FamilyB, false);
                b_found += 1;
            }
        }
        if e_found < 8 {
            let w = -k * k * (3.0 + (0.05 + 0.95 * u));
            let c2 = -(4.0 * k * k + w) / 2.0 * (0.05 + 0.95 * v);
            if let Ok(t) = family_be_triple(k, w, c2, sign) {
                check("E", t, Family::FamilyE, false);
                e_found += 1;
            }
        }
    }
    for i in 1..=24 {
        let a = 0.2 + 3.0 * frac(i, phi);
        let w = 0.05 + 4.0 * frac(i, sq);
        check("D- (omega > 0)", ExponentialTriple::family_d_minus(a, w).unwrap(), Family::FamilyDMinus, true);
    }
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, (n, bad)) in &counts {
        let need = if *name == "D- (omega > 0)" { 20 } else { 5 };
        pass &= *n >= need && *bad == 0;
        parts.push(format!("{name}: {n} sampled, {bad} wrong"));
    }
    pass &= counts.len() == 7;
    Outcome_ { pass, detail: parts.join("; ") }
}

fn c5() -> Outcome_ {
    let h = 1e-3;
    let d = FamilyD::new(1.0, 1.0).unwrap();
    let ud = |x: f64, t: f64| Ok(d.u(x, t));
    let tau = 2.0 * std::f64::consts::PI;
    let (xs, ts) = (linspace(0.0, 5.0, 21), linspace(0.0, 2.0 * tau, 17));
    let r1 = verify::nls_residual(&ud, &xs, &ts, h, h).unwrap();
    let r0 = verify::nls_residual(&ud, &xs, &ts, 2.0 * h, 2.0 * h).unwrap();
    let o1 = (r0 / r1).log2();
    let us = |x: f64, t: f64| closedform::u_section5(x, t);
    let (xs, ts) = (linspace(0.0, 3.0, 41), linspace(0.0, 2.0 * std::f64::consts::PI, 41));
    let s1 = verify::nls_residual(&us, &xs, &ts, h, h).unwrap();
    let s0 = verify::nls_residual(&us, &xs, &ts, 2.0 * h, 2.0 * h).unwrap();
    let o2 = (s0 / s1).log2();
    let (a, w) = (1.0, 1.0);
    let pw = move |_: f64, t: f64| Ok(a * C::new(0.0, w * t).exp());
    let rp = verify::nls_residual(&pw, &linspace(0.0, 1.0, 5), &linspace(0.0, 1.0, 5), h, h).unwrap();
    let want = (w + 2.0 * a * a) * a;
    let pw_ok = (rp - want).abs() <= 0.01 * want;
    let pass = r1 <= 1e-5 && o1 >= 1.9 && s1 <= 1e-5 && o2 >= 1.9 && pw_ok;
    Outcome_ {
        pass,
        detail: format!(
            "single-pole form: residual {r1:.2e}, order {o1:.2}; two-pole form: residual {s1:.2e}, order {o2:.2}; \
             plane wave: {rp:.6} vs {want:.6}"
        ),
    }
}

fn c6() -> Outcome_ {
    let mut pairs: Vec<(String, PeriodicPair)> =
        TRIPLES.iter().map(|&(a, w)| (format!("D({a},{w})"), PeriodicPair::family_d(a, w).unwrap())).collect();
    pairs.push(("D+(1,1)".into(), PeriodicPair::exponential(1.0, 1.0, C::new(2f64.sqrt(), 0.0)).unwrap()));
    pairs.push((
        "fourier".into(),
        PeriodicPair::fourier(
            3.0,
            vec![Mode { n: 0, coeff: C::new(0.2, 0.0) }, Mode { n: 1, coeff: C::new(0.0, 0.1) }],
            vec![Mode { n: -1, coeff: C::new(-0.05, 0.02) }],
        )
        .unwrap(),
    ));
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, pair) in &pairs {
        // 150 real points and 50 complex points with 2|Im k^2| tau <= 1
        let mut ks: Vec<C> = linspace(-6.0, 6.0, 150).into_iter().map(C::from).collect();
        for j in 0..50 {
            let re = 0.2 + 5.0 * frac(j + 1, 0.618_033_988_749_894_9);
            let im = (1.0 / (4.0 * re * pair.tau())) * frac(j + 1, 0.414_213_562_373_095);
            ks.push(C::new(re, im));
        }
        let ms = monodromy::monodromy_grid(pair, &ks, DEFAULT_TOL);
        let mut det: f64 = 0.0;
        let mut unit: f64 = 0.0;
        for (k, m) in ks.iter().zip(ms) {
            let m = m.unwrap();
            det = det.max((m.det() - 1.0).norm());
            if k.im == 0.0 {
                let z = m.z();
                unit = unit.max((z[(0, 0)].norm_sqr() - z[(0, 1)].norm_sqr() - 1.0).abs());
            }
        }
        pass &= det <= 1e-10 && unit <= 1e-9;
        parts.push(format!("{name}: det {det:.1e}, unitarity {unit:.1e}"));
    }
    let zero = PeriodicPair::zero(2.0 * std::f64::consts::PI).unwrap();
    let mut zerr: f64 = 0.0;
    for k in [C::new(0.3, 0.0), C::new(1.7, 0.0), C::new(0.5, 0.2), C::new(-2.0, 0.01)] {
        let z = monodromy::monodromy(&zero, k, DEFAULT_TOL).unwrap().z();
        let e = (-2.0 * I * k * k * zero.tau()).exp();
        let want = [e, C::new(0.0, 0.0), C::new(0.0, 0.0), 1.0 / e];
        let got = [z[(0, 0)], z[(0, 1)], z[(1, 0)], z[(1, 1)]];
        zerr = zerr.max(got.iter().zip(&want).map(|(g, w)| (g - w).norm()).fold(0.0, f64::max));
    }
    pass &= zerr <= 1e-10;
    parts.push(format!("zero pair {zerr:.1e}"));
    Outcome_ { pass, detail: parts.join("; ") }
}

fn c7(builds: &[(f64, f64, Build)]) -> Outcome_ {
    let mut pass = true;
    let mut parts = Vec::new();
    for (a, w, b) in builds {
        let d = FamilyD::new(*a, *w).unwrap();
        let sf = b.scalar.as_ref().unwrap();
        let mut e1: f64 = 0.0;
        let mut e2: f64 = 0.0;
        for x in linspace(-6.0, 6.0, 100) {
            let av = sf.a_boundary(x);
            let bv = sf.b_boundary(x).unwrap();
            let q = sf.qb(C::from(x)).unwrap();
            e1 = e1.max((av.norm_sqr() - bv.norm_sqr() - 1.0).abs());
            e2 = e2.max((av.norm_sqr() * (1.0 - q.norm_sqr()) - 1.0).abs());
        }
        let mut e3: f64 = 0.0;
        for j in 1..=100 {
            let k = C::new(-6.0 + 12.0 * frac(j, 0.618_033_988_749_894_9), 0.1 + 3.9 * frac(j, 0.414_213_562_373_095));
            e3 = e3.max((sf.a(k).unwrap() - d.a(k)).norm());
        }
        pass &= e1 <= 1e-6 && e2 <= 1e-6 && e3 <= 1e-6;
        parts.push(format!("({a},{w}) |a|^2-|b|^2-1 {e1:.1e}, |a|^2(1-|Q|^2)-1 {e2:.1e}, a vs rational {e3:.1e}"));
    }
    Outcome_ { pass, detail: parts.join("; ") }
}

fn c8(builds: &[(f64, f64, Build)]) -> Outcome_ {
    let mut sols: Vec<(String, DressedSolution)> =
        builds.iter().map(|(a, w, b)| (format!("D({a},{w})"), b.solution.clone())).collect();
    sols.push((
        "two-pole {i, 2i}".into(),
        DressedSolution::new(PoleData::new(4.0, vec![I, 2.0 * I], vec![C::new(-1.0, 0.0), C::new(-1.0, -1.0)]).unwrap())
            .unwrap(),
    ));
    sols.push((
        "two-pole {i/2, i}".into(),
        DressedSolution::new(PoleData::new(1.0, vec![I / 2.0, I], vec![C::new(1.0, 0.0), C::new(1.0, 1.0)]).unwrap())
            .unwrap(),
    ));
    let (mut res, mut lim, mut per, mut sym): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for (_, s) in &sols {
        let tau = s.pole_data.tau();
        for &x in &[0.0, 0.6, 1.7, 3.0] {
            for &t in &[0.0, 0.45, 1.3, 2.9] {
                res = res.max(s.residue_condition_error(x, t).unwrap());
                let u = s.u(x, t).unwrap();
                let k = C::new(0.0, 1e6);
                let l = 2.0 * I * k * s.mhat(x, t, k).unwrap()[(0, 1)];
                lim = lim.max((l - u).norm() / u.norm());
                per = per.max((s.u(x, t + tau).unwrap() - u).norm());
                for b in s.b_matrices(x, t).unwrap() {
                    sym = sym.max((b[(1, 0)] - b[(0, 1)].conj()).norm()).max((b[(1, 1)] - b[(0, 0)].conj()).norm());
                }
            }
        }
    }
    let pass = res <= 1e-9 && lim <= 1e-5 && per <= 1e-12 && sym <= 1e-9;
    Outcome_ {
        pass,
        detail: format!(
            "{} solutions: residue conditions {res:.1e}, kM12 limit rel {lim:.1e}, t-periodicity {per:.1e}, \
             symmetry B21 = conj B12, B22 = conj B11: {sym:.1e}",
            sols.len()
        ),
    }
}

fn c9(builds: &[(f64, f64, Build)]) -> Outcome_ {
    let mut pass = true;
    let mut parts = Vec::new();
    for (a, w, b) in builds {
        let s = &b.solution;
        let u = |x: f64, t: f64| s.u(x, t);
        let tau = 2.0 * std::f64::consts::PI / w;
        let mut e0: f64 = 0.0;
        let mut e1: f64 = 0.0;
        for t in linspace(0.0, 2.0 * tau, 81) {
            let g0 = a * C::new(0.0, w * t).exp();
            let g1 = -a * (w + a * a).sqrt() * C::new(0.0, w * t).exp();
            e0 = e0.max((s.u(0.0, t).unwrap() - g0).norm());
            e1 = e1.max((verify::ux_at_zero(&u, t, 1e-3).unwrap() - g1).norm());
        }
        pass &= e0 <= 1e-10 && e1 <= 1e-6;
        parts.push(format!("({a},{w}) u(0,t) {e0:.1e}, u_x(0,t) {e1:.1e}"));
    }
    Outcome_ { pass, detail: parts.join("; ") }
}

fn c10(builds: &[(f64, f64, Build)]) -> Outcome_ {
    let b = &builds.iter().find(|(a, w, _)| *a == 1.0 && *w == 1.0).unwrap().2;
    let pd = b.pole_data();
    // for one pole the stage determinant is real: 1 - |d1|^2
    let f = |x: f64| dressing::stage_determinants(pd, x, 0.0).unwrap()[0].re;
    let roots = closedform::bisect_all(f, -5.0, 50.0, 5500, 1e-14);
    let want = -(3.0 + 2.0 * 2f64.sqrt()).ln() / 2.0;
    let pass = roots.len() == 1 && (roots[0] - want).abs() <= 1e-8 && roots[0] < 0.0;
    Outcome_ {
        pass,
        detail: format!("zeros of the dressing denominator on [-5, 50]: {roots:.12?}, expected {want:.12} (none in [0, inf))"),
    }
}

fn main() {
    let mut all = true;
    let (builds, secs) = builds();
    let mut run = |n: u32, o: Outcome_| {
        report(n, &o);
        all &= o.pass;
    };
    run(1, c1(&builds, secs));
    run(2, c2(&builds));
    let (o3, notes) = c3();
    run(3, o3);
    for n in notes {
        println!("              note: {n}");
    }
    run(4, c4());
    run(5, c5());
    run(6, c6());
    run(7, c7(&builds));
    run(8, c8(&builds));
    run(9, c9(&builds));
    run(10, c10(&builds));
    if !all {
        std::process::exit(1);
    }
}
