//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.
//!
//! Two criteria have documented, mathematically forced deviations; the test
//! only passes if every failure is exactly of that documented shape.

use std::time::Instant;

use eisenzero::eisenstein::{self, EvalMode, EvalParams};
use eisenzero::moebius::{gamma_for_lambda, in_fundamental_domain};
use eisenzero::winding::CountOptions;
use eisenzero::zerofinder::figure_dataset;
use eisenzero::{Complex64, ExtRational, HalfPlanePoint, SeriesKind, UniModularMatrix};
use eisenzero_cli::verify::{self, odd, Cell, Deviation, GG_GRID, GRID, SEED};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(PartialEq)]
enum Status {
    Pass,
    /// fails only in the documented way
    Documented,
    Fail,
}

struct Outcome {
    id: u32,
    name: &'static str,
    status: Status,
    detail: String,
}

fn report(o: &Outcome) {
    let s = match o.status {
        Status::Pass => "PASS",
        Status::Documented => "FAIL (documented deviation)",
        Status::Fail => "FAIL",
    };
    println!("[{}] {}: {} - {}", o.id, o.name, s, o.detail);
}

fn lam(s: &str) -> ExtRational {
    s.parse().unwrap()
}

/// Folds cells into one outcome; failures carrying `allowed` are documented.
fn outcome(id: u32, name: &'static str, cells: &[Cell], allowed: Option<Deviation>) -> Outcome {
    let failed: Vec<&Cell> = cells.iter().filter(|c| !c.pass).collect();
    let hard: Vec<&&Cell> = failed.iter().filter(|c| allowed.is_none() || c.deviation != allowed).collect();
    let status = if !hard.is_empty() {
        Status::Fail
    } else if !failed.is_empty() {
        Status::Documented
    } else {
        Status::Pass
    };
    let list = |cs: &mut dyn Iterator<Item = &Cell>| cs.map(|c| format!("{}: {}", c.case, c.detail)).collect::<Vec<_>>().join("; ");
    let detail = match status {
        Status::Pass => format!("{} cells", cells.len()),
        Status::Documented => format!(
            "{} cells, {} deviate ({}): {}",
            cells.len(),
            failed.len(),
            allowed.expect("documented"),
            list(&mut failed.iter().copied())
        ),
        Status::Fail => format!("{} unexpected failures: {}", hard.len(), list(&mut hard.iter().map(|c| **c))),
    };
    Outcome { id, name, status, detail }
}

fn figure() -> Outcome {
    let opts = CountOptions::default();
    let lams: Vec<ExtRational> = ["0", "1/2", "-1/2", "1", "-1", "inf"].iter().map(|s| lam(s)).collect();
    let mut bad = Vec::new();
    match figure_dataset(SeriesKind::E, 23, &lams, &[0], &opts) {
        Ok(rows) => {
            if rows.len() != 12 {
                bad.push(format!("E_23 rows: {}", rows.len()));
            }
            for l in &lams {
                let m = rows.iter().filter(|r| &r.zero.lambda == l).count();
                if m != 2 {
                    bad.push(format!("E_23 λ={l}: {m} zeros"));
                }
            }
            let width = 4f64.powf(1.0 / 23.0) - 1.0;
            for r in &rows {
                let w = r.zero.reduced.as_complex().unwrap();
                if !(w.norm() - 1.0 > 0.0 && w.norm() - 1.0 < width && width < 0.0622) {
                    bad.push(format!("E_23 zero {w} off the arc band"));
                }
            }
        }
        Err(e) => bad.push(format!("E_23: {e}")),
    }
    match figure_dataset(SeriesKind::GG, 23, &[ExtRational::Infinity], &[0], &opts) {
        Ok(rows) => {
            let cusp = rows.iter().filter(|r| r.zero.is_cusp).count();
            let finite = rows.iter().filter(|r| !r.zero.is_cusp && r.location().unwrap().re == 0.5).count();
            if cusp != 1 || finite != 3 || rows.len() != 4 {
                bad.push(format!("GG_23: {finite} vertical zeros, {cusp} cusp rows"));
            }
        }
        Err(e) => bad.push(format!("GG_23: {e}")),
    }
    Outcome {
        id: 8,
        name: "zero dataset for weight 23",
        status: if bad.is_empty() { Status::Pass } else { Status::Fail },
        detail: if bad.is_empty() { "12 E_23 rows, 3 GG_23 vertical zeros + cusp".to_string() } else { bad.join("; ") },
    }
}

fn cross_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut bad = Vec::new();
    let mut n = 0;
    for k in odd(5, 31) {
        let q = EvalParams::default().with_mode(EvalMode::QExpansion).lenient();
        let l = EvalParams::default().with_mode(EvalMode::Lattice).lenient();
        for _ in 0..50 {
            let tau = loop {
                let z = Complex64::new(rng.gen_range(-0.5..=0.5), rng.gen_range(0.86..2.5));
                if in_fundamental_domain(z, 0.0) {
                    break HalfPlanePoint::Finite(z);
                }
            };
            let a = eisenstein::eval_series(SeriesKind::E, k, &tau, &q).unwrap();
            let b = eisenstein::eval_lattice(SeriesKind::E, k, &tau, &l).unwrap();
            n += 1;
            if (a.value - b.value).norm() > a.abs_err + b.abs_err {
                bad.push(format!("k={k} τ={tau:?}: {} vs {}", a.value, b.value));
            }
        }
    }
    let mut nd = 0;
    let params = EvalParams::default().lenient();
    for _ in 0..20 {
        let k = 2 * rng.gen_range(2..16u32) + 1;
        let g = if rng.gen_bool(0.5) {
            UniModularMatrix::identity()
        } else {
            gamma_for_lambda(&ExtRational::from_ratio(rng.gen_range(-9..9), rng.gen_range(1..7)))
        };
        let z = Complex64::new(rng.gen_range(-0.5..=0.5), rng.gen_range(1.0..2.0));
        let kind = if rng.gen_bool(0.5) { SeriesKind::E } else { SeriesKind::GG };
        let h = 1e-5;
        let at = |w: Complex64| eisenstein::eval_slashed(kind, k, &g, &HalfPlanePoint::Finite(w), &params).unwrap().value;
        let fdv = (at(z + h) - at(z - h)) / (2.0 * h);
        let d = eisenstein::derivative(kind, k, &g, &HalfPlanePoint::Finite(z), &params).unwrap().value;
        nd += 1;
        if (d - fdv).norm() > 1e-4 * d.norm() {
            bad.push(format!("derivative {kind}_{k} at {z}: {d} vs {fdv}"));
        }
    }
    Outcome {
        id: 9,
        name: "q-expansion vs lattice, derivative vs differences",
        status: if bad.is_empty() { Status::Pass } else { Status::Fail },
        detail: if bad.is_empty() { format!("{n} value pairs, {nd} derivatives") } else { bad.join("; ") },
    }
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let opts = CountOptions::default();
    let all = odd(3, 51);
    let e = verify::counts(SeriesKind::E, &all, &GRID, &opts);
    let steps: Vec<Box<dyn Fn() -> Outcome + '_>> = vec![
        Box::new(|| outcome(1, "odd-weight E_k counts", &verify::table1_cells(&all, &e, opts.snap_tol), Some(Deviation::ClassEdge))),
        Box::new(|| outcome(2, "GG_k counts in F (shortcut, sign changes, contour)", &verify::thm4_count_cells(&all, &opts), None)),
        Box::new(|| {
            let gg = verify::counts(SeriesKind::GG, &all, &GG_GRID, &opts);
            outcome(3, "GG_k and E_k counts agree off {0, ±1, ±1/2, ∞}", &verify::thm3_cells(&all, &gg, &e), None)
        }),
        Box::new(|| outcome(4, "E_k zeros in F hug the unit circle", &verify::thm2_cells(&odd(7, 51), &opts), Some(Deviation::ThinMargin))),
        Box::new(|| outcome(5, "even weights satisfy the valence formula", &verify::valence_cells(SEED, &opts), None)),
        Box::new(|| outcome(6, "sign of GG_k at z_ℓ alternates", &verify::thm4_sign_cells(&odd(7, 51)), None)),
        Box::new(|| outcome(7, "inequality suites", &verify::bounds_cells(51, SEED), None)),
        Box::new(figure),
        Box::new(cross_oracle),
    ];
    let mut outcomes = Vec::new();
    for step in steps {
        let t = Instant::now();
        let o = step();
        report(&o);
        println!("    ({:.1} s)", t.elapsed().as_secs_f64());
        outcomes.push(o);
    }
    println!("total {:.1} s", start.elapsed().as_secs_f64());
    let failed: Vec<u32> = outcomes.iter().filter(|o| o.status == Status::Fail).map(|o| o.id).collect();
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
