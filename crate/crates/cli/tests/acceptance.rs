//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::Parser;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rpifs_cli::{run, Cli};
use rpifs_core::quant::{
    delta_n, dn_bound, error_exact_r2, error_monte_carlo, lloyd, oracle_table, quantize_discrete, scaling_check,
    voronoi, voronoi_equivariance_check, Atom,
};
use rpifs_core::rpifs::refine;
use rpifs_core::{cantor, Mat2, Method, Quantizer};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn hausdorff_dimension() -> Outcome {
    let start = Instant::now();
    let cli = Cli::try_parse_from(["rpifs", "dimension", "--depth", "12"]).map_err(|e| e.to_string())?;
    let artifact = run(&cli).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let report: serde_json::Value = serde_json::from_str(&artifact.text).map_err(|e| e.to_string())?;
    let xi = report["xi_estimate"].as_f64().ok_or("missing xi_estimate")?;
    let want = 2f64.ln() / 3f64.ln();
    ensure((xi - want).abs() < 1e-4, || format!("xi = {xi}, expected {want}"))?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("xi = {xi:.12}, |xi - log2/log3| = {:.1e}, {elapsed:.2?}", (xi - want).abs()))
}

fn second_moment() -> Outcome {
    let m = cantor::measure();
    let mo = m.solve_moments().map_err(|e| e.to_string())?;
    ensure(mo.mean == 0.0 && mo.second_moment == 0.5, || format!("moments {mo:?}"))?;
    let origin = Quantizer::new(vec![0.0]).unwrap();
    let mc = error_monte_carlo(&m, &origin, 2.0, 100_000, 2024).map_err(|e| e.to_string())?;
    ensure((mc.value - 0.5).abs() < 0.01, || format!("Monte Carlo {}", mc.value))?;
    Ok(format!("(mean, second) = ({}, {}), Monte Carlo 1e5 = {:.6}", mo.mean, mo.second_moment, mc.value))
}

fn dn_achievement() -> Outcome {
    let start = Instant::now();
    let m = cantor::measure();
    let mut worst = 0.0f64;
    for n in 1..=64 {
        let q = delta_n(n).map_err(|e| e.to_string())?;
        let e = error_exact_r2(&m, &q, 1e-14).map_err(|e| e.to_string())?;
        let d = dn_bound(n).unwrap();
        ensure((e.value - d).abs() < 1e-12, || format!("n = {n}: {} vs D_n = {d}", e.value))?;
        worst = worst.max((e.value - d).abs());
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("max |error - D_n| = {worst:.1e} over n = 1..64, {elapsed:.2?}"))
}

fn upper_bound() -> Outcome {
    let m = cantor::measure();
    let table = oracle_table(&m, 32, 14).map_err(|e| e.to_string())?;
    let mut margin = f64::INFINITY;
    for out in &table {
        let n = out.report.n;
        let d = dn_bound(n).unwrap();
        let low = out.report.value - out.report.bound;
        ensure(low <= d, || format!("n = {n}: oracle {} - bound {} > D_n = {d}", out.report.value, out.report.bound))?;
        margin = margin.min(d - low);
    }
    Ok(format!("smallest D_n - (oracle - bound) = {margin:.3e} over n = 1..32"))
}

fn tightness_n1() -> Outcome {
    let m = cantor::measure();
    let mut best = f64::INFINITY;
    for start in [0.0, -0.8, 0.35] {
        let init = Quantizer::new(vec![start]).unwrap();
        let out = lloyd(&m, 1, &init, 100, 1e-15).map_err(|e| e.to_string())?;
        best = best.min(out.report.value);
    }
    ensure((best - 0.5).abs() < 1e-9, || format!("V_1 = {best}"))?;
    Ok(format!("V_1 = {best}"))
}

fn scaling_law() -> Outcome {
    let m = cantor::measure();
    let t = Mat2::new(3.0, 0.0, 0.0, 1.0).unwrap();
    let mut worst = 0.0f64;
    for n in [1, 2, 4] {
        let out = scaling_check(&m, &t, n, 2.0, Method::ExactR2).map_err(|e| e.to_string())?;
        ensure(out.rel_err < 1e-9, || format!("n = {n}: {out:?}"))?;
        worst = worst.max(out.rel_err);
    }
    Ok(format!("max rel_err = {worst:.1e} for n in {{1, 2, 4}}"))
}

fn equivariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..20 {
        let size = 1 + (rng.next_u64() % 10) as usize;
        let mut sites: Vec<f64> = (0..size).map(|_| uniform(&mut rng, -3.0, 3.0)).collect();
        sites.sort_by(f64::total_cmp);
        sites.dedup();
        let q = Quantizer::new(sites).unwrap();
        let sign = if rng.next_u64() % 2 == 0 { 1.0 } else { -1.0 };
        let a = sign * uniform(&mut rng, 0.1, 5.0);
        let t = Mat2::new(a, uniform(&mut rng, -5.0, 5.0), 0.0, 1.0).unwrap();
        let out = voronoi_equivariance_check(&q, &t, 10_000, 100 + k).map_err(|e| e.to_string())?;
        ensure(out.holds, || format!("counterexample {:?} for {t:?}", out.witness))?;
    }
    let pair = Quantizer::new(vec![-2.0 / 3.0, 2.0 / 3.0]).unwrap();
    let t = Mat2::new(1.0, 0.0, 1.0, 1.0).unwrap();
    let out = voronoi_equivariance_check(&pair, &t, 10_000, 1).map_err(|e| e.to_string())?;
    let x = out.witness.and_then(|w| w.x()).ok_or("no witness for T = [[1,0],[1,1]]")?;
    // nearest site of x versus nearest image site of T(x)
    let before = voronoi(&pair).locate(x);
    let images = [t.apply_chart(-2.0 / 3.0).unwrap(), t.apply_chart(2.0 / 3.0).unwrap()];
    let after = t.apply_chart(x).map(|y| if (y - images[0]).abs() < (y - images[1]).abs() { 0 } else { 1 });
    ensure(after != Some(before), || format!("witness {x} does not break the cells"))?;
    Ok(format!("20 affine maps hold over 1e4 samples each; witness x = {x:.6} for v = 1"))
}

/// Minimum error over all partitions of the atoms into at most `n` blocks.
fn exhaustive(atoms: &[Atom], n: usize) -> f64 {
    let len = atoms.len();
    let mut labels = vec![0usize; len];
    let mut best = f64::INFINITY;
    loop {
        let mut w = vec![0.0; n];
        let mut s = vec![0.0; n];
        let mut q = vec![0.0; n];
        for (a, &l) in atoms.iter().zip(&labels) {
            w[l] += a.w;
            s[l] += a.w * a.x;
        }
        for (a, &l) in atoms.iter().zip(&labels) {
            q[l] += a.w * (a.x - s[l] / w[l]).powi(2);
        }
        best = best.min(q.iter().sum());
        // next restricted growth string with labels < n
        let mut i = len;
        loop {
            if i <= 1 {
                return best;
            }
            i -= 1;
            let max_before = labels[..i].iter().copied().max().unwrap_or(0);
            if labels[i] + 1 < n && labels[i] <= max_before {
                labels[i] += 1;
                labels[i + 1..].iter_mut().for_each(|l| *l = 0);
                break;
            }
        }
    }
}

fn oracle_consistency() -> Outcome {
    let m = cantor::measure();
    let table = oracle_table(&m, 8, 14).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for out in &table {
        let n = out.report.n;
        let l = lloyd(&m, n, &delta_n(n).unwrap(), 1000, 1e-12).map_err(|e| e.to_string())?;
        let gap = (l.report.value - out.report.value).abs();
        ensure(gap <= out.report.bound, || {
            format!("n = {n}: Lloyd {} vs oracle {} (bound {})", l.report.value, out.report.value, out.report.bound)
        })?;
        worst = worst.max(gap / out.report.bound);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut instances = 0;
    for len in 1..=12usize {
        for _ in 0..4 {
            let mut atoms: Vec<Atom> =
                (0..len).map(|_| Atom { x: uniform(&mut rng, -5.0, 5.0), w: uniform(&mut rng, 0.05, 1.0) }).collect();
            atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
            let n_max = len.min(4);
            let sols = quantize_discrete(&atoms, n_max).map_err(|e| e.to_string())?;
            for n in 1..=n_max {
                let want = exhaustive(&atoms, n);
                let got = sols[n - 1].cost;
                ensure((got - want).abs() <= 1e-12 * (1.0 + want), || {
                    format!("{len} atoms, n = {n}: DP {got} vs exhaustive {want}")
                })?;
            }
            instances += 1;
        }
    }
    Ok(format!("max |Lloyd - oracle| / bound = {worst:.1e} for n <= 8; DP = exhaustive on {instances} instances"))
}

fn geometry() -> Outcome {
    let spec = cantor::system();
    let base = cantor::base_cone();
    let mut parents = refine(&spec, &base, 0).map_err(|e| e.to_string())?;
    for l in 1..=8usize {
        let cones = refine(&spec, &base, l).map_err(|e| e.to_string())?;
        ensure(cones.len() == 1 << l, || format!("level {l}: {} cones", cones.len()))?;
        let want = 2.0 * 3f64.powi(-(l as i32));
        for (i, (_, c)) in cones.iter().enumerate() {
            ensure((c.diameter() - want).abs() < 1e-12, || format!("level {l}: diameter {}", c.diameter()))?;
            let p = &parents[i / 2].1;
            ensure(p.lo() - 1e-12 <= c.lo() && c.hi() <= p.hi() + 1e-12, || format!("level {l}: cone {i} not nested"))?;
        }
        for pair in cones.windows(2) {
            let gap = pair[1].1.lo() - pair[0].1.hi();
            ensure(gap >= pair[0].1.diameter() - 1e-12, || format!("level {l}: gap {gap}"))?;
        }
        parents = cones;
    }
    Ok("levels 1..8: 2^l cones of diameter 2*3^-l, nested and separated".to_string())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("Hausdorff dimension", hausdorff_dimension),
        ("second moment", second_moment),
        ("D_n achievement", dn_achievement),
        ("upper bound", upper_bound),
        ("tightness at n = 1", tightness_n1),
        ("scaling law", scaling_law),
        ("Voronoi equivariance", equivariance),
        ("oracle consistency", oracle_consistency),
        ("geometry", geometry),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail} [{:.2?}]", i + 1, start.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
