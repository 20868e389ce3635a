//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weyl_core::synth::{random_triple, selfadjoint_toy};
use weyl_core::{Extension, FiniteTriple};
use weyl_models::firstorder::{fo_m, fo_resolvent_norm, fo_t_density_residual, nested_mus, FoModel};
use weyl_models::friedrichs::{
    fr_example1, fr_example2, fr_example3, fr_m, fr_m_direct, hardy_unit, FriedrichsModel, RationalH2,
};
use weyl_models::hainlust::{
    hl_bordered_jump, hl_discrete_eig_near, hl_discretize, hl_eigenvalues, hl_m_matrix, HlModel, Rectangle,
    DEFAULT_SCAN_EPSILON, DEFAULT_SCAN_NODES,
};
use weyl_numerics::Complex64;
use weyl_scope::check::{
    green_suite, hidden_block_extension, krein_suite, m_suite, morera_suite, rand_mat, space_suite, GREEN_PAIRS,
    KREIN_DRAWS, M_PAIRS,
};
use weyl_scope::example::random_nonreal;
use weyl_scope::{execute, Command, Invocation};

type Outcome = Result<(bool, String), String>;

/// Name, check, and time limit in seconds.
type Criterion = (&'static str, fn() -> Outcome, Option<f64>);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn synthetic_triples(rng: &mut ChaCha8Rng) -> Result<Vec<Arc<FiniteTriple>>, String> {
    let e = |x: weyl_core::CoreError| x.to_string();
    Ok(vec![
        Arc::new(random_triple(rng, 8, 2, 2).map_err(e)?),
        Arc::new(random_triple(rng, 16, 3, 2).map_err(e)?),
    ])
}

fn green() -> Outcome {
    let mut r = rng(1);
    let mut triples = synthetic_triples(&mut r)?;
    triples.push(hidden_block_extension(&mut r).map_err(|e| e.to_string())?.triple_arc().clone());
    triples.push(Arc::new(selfadjoint_toy(&mut r, 6, 2, false).map_err(|e| e.to_string())?));
    let mut worst: f64 = 0.0;
    for tr in &triples {
        worst = worst.max(green_suite(tr, &mut r, GREEN_PAIRS).map_err(|e| e.to_string())?.0);
    }
    Ok((worst < 1e-12, format!("max residual {worst:.3e} < 1e-12 over {} triples", triples.len())))
}

fn hilbert_krein() -> Outcome {
    let mut r = rng(2);
    let (mut hi, mut kr): (f64, f64) = (0.0, 0.0);
    for tr in synthetic_triples(&mut r)? {
        let (h, k) = krein_suite(&tr, &mut r, KREIN_DRAWS).map_err(|e| e.to_string())?;
        hi = hi.max(h);
        kr = kr.max(k);
    }
    Ok((hi < 1e-9 && kr < 1e-9, format!("hilbert {hi:.3e}, krein {kr:.3e} < 1e-9")))
}

fn m_consistency() -> Outcome {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for tr in synthetic_triples(&mut r)? {
        worst = worst.max(m_suite(&tr, &mut r, M_PAIRS).map_err(|e| e.to_string())?);
    }
    Ok((worst < 1e-9, format!("max entry difference {worst:.3e} < 1e-9")))
}

fn closures() -> Outcome {
    let mut r = rng(4);
    let hidden = hidden_block_extension(&mut r).map_err(|e| e.to_string())?;
    let tr = synthetic_triples(&mut r)?.remove(0);
    let plain = Extension::new(tr, rand_mat(&mut r, 2, 2)).map_err(|e| e.to_string())?;
    let (mut angle, mut mu0): (f64, f64) = (0.0, 0.0);
    for ext in [&hidden, &plain] {
        let s = space_suite(ext, &mut r).map_err(|e| e.to_string())?;
        angle = angle.max(s.s_equals_t).max(s.s_adjoint_equals_t_adjoint);
        mu0 = mu0.max(s.s_independent_of_mu0);
    }
    Ok((angle < 1e-8 && mu0 < 1e-8, format!("max angle S/T {angle:.3e}, across μ0 {mu0:.3e} < 1e-8")))
}

fn morera() -> Outcome {
    let ext = hidden_block_extension(&mut rng(5)).map_err(|e| e.to_string())?;
    let m = morera_suite(&ext).map_err(|e| e.to_string())?;
    let rel = (m.outcome.full - m.oracle).abs() / m.oracle;
    let ok = m.outcome.bordered < 1e-8 && m.outcome.full > 0.1 && rel < 1e-8 && m.outcome.enclosed.len() == 1;
    Ok((
        ok,
        format!(
            "bordered {:.3e} < 1e-8, full {:.4} > 0.1, vs 2π‖P‖ rel {rel:.3e} < 1e-8",
            m.outcome.bordered, m.outcome.full
        ),
    ))
}

fn first_order() -> Outcome {
    let e = |x: weyl_models::ModelError| x.to_string();
    let model = FoModel::default();
    let mut r = rng(6);
    let zero = (0..100).all(|_| fo_m(&model, c(r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0))) == c(0.0, 0.0));
    let norms: Vec<f64> =
        (1..=12).map(|j| fo_resolvent_norm(c(1.0, -(2f64.powi(-j))), 4096)).collect::<Result<_, _>>().map_err(e)?;
    let ratio = norms[11] / norms[0];
    let f = model.grid.sample(|x| c(x * (-x).exp(), 0.0));
    let mus = nested_mus(30);
    let mut needed = None;
    for k in 1..=30 {
        if fo_t_density_residual(&model, &f, &mus[..k]).map_err(e)? < 1e-3 {
            needed = Some(k);
            break;
        }
    }
    Ok((
        zero && ratio > 1e2 && needed.is_some(),
        format!("M ≡ 0: {zero}; norm ratio {ratio:.4e} > 1e2; density < 1e-3 with {needed:?} exponentials (≤ 30)"),
    ))
}

fn hain_lust_closed_forms() -> Outcome {
    let e = |x: weyl_models::ModelError| x.to_string();
    let model = HlModel::decoupled_neumann(5.0);
    let m11 = hl_m_matrix(&model, c(-1.0, 0.0)).map_err(e)?[(0, 0)];
    let coth_err = (m11 + 1.0 / 1f64.tanh()).norm();
    let found = hl_eigenvalues(&model, &Rectangle::new(0.5, 50.0, -1.0, 1.0).map_err(e)?).map_err(e)?;
    let mut fd_err: f64 = 0.0;
    let mut exact_err: f64 = 0.0;
    for (k, &z) in found.iter().enumerate() {
        let fd = hl_discrete_eig_near(&model, 512, z).map_err(e)?;
        fd_err = fd_err.max((fd - z).norm());
        exact_err = exact_err.max((z - ((k + 1) as f64 * PI).powi(2)).norm());
    }
    let ok = coth_err < 1e-6 && found.len() == 2 && fd_err < 5e-3 && exact_err < 1e-6;
    Ok((
        ok,
        format!(
            "|m11(−1) + coth 1| {coth_err:.3e} < 1e-6; {} eigenvalues, vs finite differences {fd_err:.3e} < 5e-3",
            found.len()
        ),
    ))
}

fn step_dichotomy() -> Outcome {
    let e = |x: weyl_models::ModelError| x.to_string();
    let disc = hl_discretize(&HlModel::step(), DEFAULT_SCAN_NODES).map_err(e)?;
    let (full3, bordered3) = hl_bordered_jump(&disc, c(3.0, DEFAULT_SCAN_EPSILON)).map_err(e)?;
    let (_, bordered2) = hl_bordered_jump(&disc, c(2.0, DEFAULT_SCAN_EPSILON)).map_err(e)?;
    Ok((
        bordered3 < 1e-4 && bordered2 > 1e-1 && full3 > 1e-1,
        format!("bordered at 3: {bordered3:.3e} < 1e-4, at 2: {bordered2:.3e} > 0.1; full at 3: {full3:.3e} > 0.1"),
    ))
}

fn random_hardy(r: &mut ChaCha8Rng) -> RationalH2 {
    let n = r.gen_range(1..=3);
    let poles: Vec<Complex64> = (0..n).map(|_| c(r.gen_range(-3.0..3.0), -r.gen_range(0.3..3.0))).collect();
    let residues: Vec<Complex64> = (0..n).map(|_| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
    RationalH2::new(&poles, &residues).expect("nonreal poles")
}

fn hardy_formula() -> Outcome {
    let e = |x: weyl_models::ModelError| x.to_string();
    let mut r = rng(9);
    let lambdas = random_nonreal(&mut r, 100);
    let mut worst: f64 = 0.0;
    for (j, chunk) in lambdas.chunks(10).enumerate() {
        let b = if j == 0 { c(0.0, 0.0) } else { c(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)) };
        let model = FriedrichsModel::new(random_hardy(&mut r), random_hardy(&mut r), b).map_err(e)?;
        worst = worst.max(fr_example1(&model, chunk).map_err(e)?.max_error);
        for &l in chunk {
            let formula = 1.0 / (c(0.0, PI * l.im.signum()) - b);
            worst = worst.max((fr_m_direct(&model, l).map_err(e)? - formula).norm());
            worst = worst.max((fr_m(&model, l).map_err(e)? - formula).norm());
        }
    }
    Ok((worst < 1e-9, format!("max |M − (sign(Im λ)πi − B)^-1| {worst:.3e} < 1e-9 at 100 λ")))
}

fn not_a_pole() -> Outcome {
    let e = |x: weyl_models::ModelError| x.to_string();
    let lower = fr_example2(&hardy_unit(), c(0.0, -1.0), None).map_err(e)?;
    let upper = fr_example2(&hardy_unit(), c(0.0, 2.0), None).map_err(e)?;
    let mut ok = lower.gamma1_u.norm() < 1e-9;
    let mut worst_eigen: f64 = 0.0;
    for r in [&lower, &upper] {
        ok &= r.d_at_lambda0 < 1e-12
            && (r.u_phi + 1.0).norm() < 1e-9
            && r.gamma2_u.norm() < 1e-9
            && r.eigen_residual < 1e-7
            && r.m_cauchy_integral < 1e-10;
        worst_eigen = worst_eigen.max(r.eigen_residual);
    }
    let obstruction = upper.obstruction.as_ref().map_or(0.0, |o| o.min_residual);
    ok &= obstruction >= 1e-2;
    Ok((
        ok,
        format!(
            "D(λ0) {:.1e}/{:.1e}; eigen {worst_eigen:.3e} < 1e-7; ∮M {:.1e}/{:.1e} < 1e-10; obstruction {obstruction:.3e} ≥ 1e-2",
            lower.d_at_lambda0, upper.d_at_lambda0, lower.m_cauchy_integral, upper.m_cauchy_integral
        ),
    ))
}

fn embedded() -> Outcome {
    let e = |x: weyl_models::ModelError| x.to_string();
    let g = RationalH2::pole_term(c(0.0, -1.0), 2, c(1.0, 0.0)).map_err(e)?;
    let r = fr_example3(&g, 1.0, c(0.0, 0.0), 1e-6).map_err(e)?;
    Ok((
        r.eigen_residual < 1e-7 && r.jump_error < 1e-9,
        format!("eigen residual {:.3e} < 1e-7; jump error {:.3e} < 1e-9", r.eigen_residual, r.jump_error),
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut same = true;
    let mut runs = 0;
    let configs = [
        (Command::Check, "{}"),
        (Command::Scan, r#"{"model_type": "friedrichs"}"#),
        (Command::Scan, r#"{"model_type": "firstorder"}"#),
        (Command::Scan, r#"{"model_type": "hainlust", "grid": {"re_min": 0.5, "re_max": 4.5, "re_count": 20, "im": [1.0, 1e-6]}}"#),
    ];
    for (j, (command, text)) in configs.iter().enumerate() {
        let path = dir.path().join(format!("c{j}.json"));
        std::fs::write(&path, text).map_err(|e| e.to_string())?;
        let inv = Invocation { command: *command, config: Some(path), out: None, seed: None, tol: None };
        let a = execute(&inv).map_err(|e| e.to_string())?;
        let b = execute(&inv).map_err(|e| e.to_string())?;
        same &= a == b && !a.output.is_empty();
        runs += 1;
    }
    Ok((same, format!("{runs} configs run twice, outputs byte-identical: {same}")))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("green identity", green, Some(5.0)),
        ("hilbert identity and krein formula", hilbert_krein, Some(10.0)),
        ("M-function consistency", m_consistency, None),
        ("closures of S and T", closures, None),
        ("hidden eigenvalue dichotomy", morera, Some(5.0)),
        ("first-order counterexample", first_order, None),
        ("hain-lust closed forms", hain_lust_closed_forms, Some(30.0)),
        ("step model jump dichotomy", step_dichotomy, None),
        ("friedrichs hardy formula", hardy_formula, None),
        ("friedrichs eigenvalue not a pole", not_a_pole, None),
        ("friedrichs embedded eigenvalue", embedded, None),
        ("determinism", determinism, None),
    ];
    let mut failures = 0;
    for (k, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        let in_time = limit.is_none_or(|l| secs < l);
        let (ok, detail) = match outcome {
            Ok((ok, d)) => (ok && in_time, d),
            Err(e) => (false, format!("error: {e}")),
        };
        let budget = limit.map_or(String::new(), |l| format!(" (limit {l} s)"));
        println!("{} {:>2} {name}: {detail}; {secs:.2} s{budget}", if ok { "PASS" } else { "FAIL" }, k + 1);
        failures += usize::from(!ok);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
