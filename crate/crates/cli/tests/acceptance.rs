//! Acceptance criteria, one PASS/FAIL line each.
//!
//! A criterion fails the run unless it is listed in `KNOWN_GAPS`: sub-checks that
//! contradict another requirement and are reported as FAIL without being relaxed.

use std::process::Command;
use std::time::{Duration, Instant};

use bimode_core::coupled::{ground_state_coherence, ground_state_covariance, ModelParams};
use bimode_core::dynamics::{
    dissipative_evolution, local_extrema, BathParams, DynamicsModel, FullLocalDissipator,
    InitialCondition, ReduceThenDissipate, TimeGrid,
};
use bimode_core::gaussian::{coherence, GaussianState};
use bimode_core::quadrature::GaussHermite;
use bimode_core::thermal::{
    coherence_infinite_t, steady_coherence, steady_state_covariance, wigner_steady, Temperature,
};
use bimode_fock::lindblad::amplitudes;
use bimode_fock::{coherent_state, ground_state_fock, DensityOperator, FockConfig, LindbladStepper};
use nalgebra::{Matrix2, Vector2, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `(criterion, sub-check)` pairs that cannot hold together with the rest of the
/// requirements.
const KNOWN_GAPS: &[(u32, &str)] = &[
    // 2λ < ω is strict, so λ = 0.5ω is not a valid parameter point.
    (2, "lambda=0.5"),
    // Gibbs states of the exact normal modes: coherence rises with T when λ > 0.
    (5, "monotone lambda=0.4 mu=0.3"),
];

struct Check {
    name: String,
    ok: bool,
    detail: String,
}

impl Check {
    fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ok,
            detail: detail.into(),
        }
    }
}

struct Report {
    unexpected: usize,
}

impl Report {
    fn criterion(&mut self, id: u32, title: &str, budget: Option<Duration>, run: impl FnOnce() -> Vec<Check>) {
        let start = Instant::now();
        let checks = run();
        let elapsed = start.elapsed();
        let timely = budget.is_none_or(|b| elapsed <= b);
        let failed: Vec<&Check> = checks.iter().filter(|c| !c.ok).collect();
        let ok = failed.is_empty() && timely;
        let budget = budget.map_or(String::new(), |b| format!(", budget {} s", b.as_secs()));
        println!(
            "{} {:>2} {title} [{:.2} s{budget}]",
            if ok { "PASS" } else { "FAIL" },
            id,
            elapsed.as_secs_f64(),
        );
        for c in &checks {
            let known = !c.ok && KNOWN_GAPS.contains(&(id, c.name.as_str()));
            let tag = match (c.ok, known) {
                (true, _) => "ok  ",
                (false, true) => "FAIL (known)",
                (false, false) => "FAIL",
            };
            println!("       {tag} {}: {}", c.name, c.detail);
            if !c.ok && !known {
                self.unexpected += 1;
            }
        }
        if !timely {
            println!("       FAIL runtime over budget");
            self.unexpected += 1;
        }
    }
}

fn params(l: f64, m: f64) -> ModelParams {
    ModelParams::new(1.0, l, m).unwrap()
}

fn bath(g: f64, t: f64) -> BathParams {
    BathParams::new(g, Temperature::new(t).unwrap()).unwrap()
}

fn temp(t: f64) -> Temperature {
    Temperature::new(t).unwrap()
}

fn zero_squeezing_null() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let worst = (0..200)
        .map(|_| {
            let l = rng.random_range(0.0..0.5);
            ground_state_coherence(&params(l, 0.0)).unwrap().abs()
        })
        .fold(0.0, f64::max);
    vec![Check::new("mu=0", worst <= 1e-12, format!("max |C| = {worst:.2e} over 200 λ (tol 1e-12)"))]
}

fn monotone_in_mu() -> Vec<Check> {
    [0.0, 0.3, 0.5]
        .iter()
        .map(|&l| {
            let name = format!("lambda={l}");
            let grid: Vec<f64> = (0..50).map(|k| (1.0 - l) * k as f64 / 50.0).collect();
            let values: Result<Vec<f64>, String> = grid
                .iter()
                .map(|&m| {
                    let p = ModelParams::new(1.0, l, m).map_err(|e| e.to_string())?;
                    ground_state_coherence(&p).map_err(|e| e.to_string())
                })
                .collect();
            match values {
                Err(e) => Check::new(name, false, format!("grid rejected: {e}")),
                Ok(c) => {
                    let bad = c.windows(2).filter(|w| w[1] <= w[0]).count();
                    Check::new(name, bad == 0, format!("{bad} non-increasing steps over 50 μ points"))
                }
            }
        })
        .collect()
}

fn ground_purity() -> Vec<Check> {
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let l = 0.49 * i as f64 / 19.0;
        for j in 0..20 {
            let m = 0.98 * (1.0 - l) * j as f64 / 19.0;
            let g = ground_state_covariance(&params(l, m)).unwrap();
            for nu in g.spectrum().unwrap().values() {
                worst = worst.max((nu - 1.0).abs());
            }
        }
    }
    vec![Check::new("20x20 grid", worst <= 1e-9, format!("max |ν − 1| = {worst:.2e} (tol 1e-9)"))]
}

fn static_oracle() -> Vec<Check> {
    let cfg = FockConfig::statics();
    let grid = [0.0, 0.1, 0.2, 0.3, 0.4];
    let (mut dc, mut dm, mut leak): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for &l in &grid {
        for &m in &grid {
            let p = params(l, m);
            let o = ground_state_fock(&p, &cfg).unwrap();
            let c = o.rho.thermal_reference_coherence(&o.basis).unwrap();
            dc = dc.max((c - ground_state_coherence(&p).unwrap()).abs());
            let sigma = o.rho.gaussian_moments(&o.basis).sigma;
            dm = dm.max((sigma - ground_state_covariance(&p).unwrap().sigma).abs().max());
            leak = leak.max(o.leakage);
        }
    }
    vec![
        Check::new("coherence", dc <= 1e-4, format!("max |ΔC| = {dc:.2e} on 5x5 grid, cutoff 40 (tol 1e-4)")),
        Check::new("moments", dm <= 1e-4, format!("max |Δσ| = {dm:.2e} (tol 1e-4), leakage ≤ {leak:.1e}")),
    ]
}

fn thermal_limits() -> Vec<Check> {
    let points = [(0.0, 0.5), (0.0, 0.3), (0.4, 0.3)];
    let temps: Vec<f64> = (0..=40).map(|k| 0.5 * k as f64).collect();
    let mut checks = Vec::new();

    let d0 = points
        .iter()
        .map(|&(l, m)| {
            let p = params(l, m);
            (steady_coherence(&p, Temperature::ZERO).unwrap() - ground_state_coherence(&p).unwrap()).abs()
        })
        .fold(0.0, f64::max);
    checks.push(Check::new("T=0", d0 <= 1e-10, format!("max deviation from ground {d0:.2e} (tol 1e-10)")));

    let dinf = points
        .iter()
        .map(|&(l, m)| {
            let p = params(l, m);
            (steady_coherence(&p, temp(1e4)).unwrap() - coherence_infinite_t(&p).unwrap()).abs()
        })
        .fold(0.0, f64::max);
    checks.push(Check::new("T=1e4", dinf <= 1e-3, format!("max deviation from closed form {dinf:.2e} (tol 1e-3)")));

    for &(l, m) in &points {
        let p = params(l, m);
        let c: Vec<f64> = temps.iter().map(|&t| steady_coherence(&p, temp(t)).unwrap()).collect();
        let rises = c.windows(2).filter(|w| w[1] > w[0] + 1e-12).count();
        checks.push(Check::new(
            format!("monotone lambda={l} mu={m}"),
            rises == 0,
            format!("{rises} increasing steps over T ∈ [0, 20], C(0) = {:.4}, C(20) = {:.4}", c[0], c[c.len() - 1]),
        ));
    }

    let below = temps
        .iter()
        .filter(|&&t| steady_coherence(&params(0.4, 0.3), temp(t)).unwrap() < steady_coherence(&params(0.0, 0.3), temp(t)).unwrap())
        .count();
    checks.push(Check::new("ordering", below == 0, format!("C(λ=0.4) < C(λ=0) at {below} of {} temperatures", temps.len())));
    checks
}

/// `∫ W f` with Gauss–Hermite nodes along the rotated axes `(x_a ± x_b)/√2`, each
/// scaled to its Gaussian width.
fn wigner_integral(p: &ModelParams, t: Temperature, f: impl Fn(&Vector4<f64>) -> f64) -> f64 {
    let s = steady_state_covariance(p, t).unwrap().sigma;
    let (xx, xaxb, pp, papb) = (s[(0, 0)] / 2.0, s[(0, 2)] / 2.0, s[(1, 1)] / 2.0, s[(1, 3)] / 2.0);
    let w = [(xx + xaxb).sqrt(), (pp + papb).sqrt(), (xx - xaxb).sqrt(), (pp - papb).sqrt()];
    let gh = GaussHermite::new(10);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    gh.integrate_scaled(w[0], |ux| {
        gh.integrate_scaled(w[1], |up| {
            gh.integrate_scaled(w[2], |vx| {
                gh.integrate_scaled(w[3], |vp| {
                    let r = Vector4::new(h * (ux + vx), h * (up + vp), h * (ux - vx), h * (up - vp));
                    let g = (0.5 * ((ux / w[0]).powi(2) + (up / w[1]).powi(2) + (vx / w[2]).powi(2) + (vp / w[3]).powi(2))).exp();
                    wigner_steady(p, t, &r).unwrap() * f(&r) * g
                })
            })
        })
    })
}

fn wigner_consistency() -> Vec<Check> {
    let (mut dn, mut dm): (f64, f64) = (0.0, 0.0);
    for (l, m, t) in [(0.2, 0.2, 1.0), (0.4, 0.3, 0.5), (0.0, 0.5, 2.0)] {
        let p = params(l, m);
        let t = temp(t);
        dn = dn.max((wigner_integral(&p, t, |_| 1.0) - 1.0).abs());
        let s = steady_state_covariance(&p, t).unwrap().sigma;
        let want = [s[(0, 0)] / 2.0, s[(0, 2)] / 2.0, s[(1, 1)] / 2.0, s[(1, 3)] / 2.0];
        let got = [
            wigner_integral(&p, t, |r| r[0] * r[0]),
            wigner_integral(&p, t, |r| r[0] * r[2]),
            wigner_integral(&p, t, |r| r[1] * r[1]),
            wigner_integral(&p, t, |r| r[1] * r[3]),
        ];
        for (g, w) in got.iter().zip(want) {
            dm = dm.max((g - w).abs());
        }
    }
    vec![
        Check::new("normalisation", dn <= 1e-6, format!("max |∫W − 1| = {dn:.2e} (tol 1e-6)")),
        Check::new("second moments", dm <= 1e-8, format!("max deviation {dm:.2e} (tol 1e-8)")),
    ]
}

fn decoupled_error(dt: f64, t_max: f64) -> f64 {
    let p = params(0.0, 0.0);
    let b = bath(0.1, 1.0);
    let init = InitialCondition::default();
    let s0 = init.state(&p).unwrap();
    let series = FullLocalDissipator.evolve(&p, &b, &init, &TimeGrid::new(t_max, dt, 1).unwrap()).unwrap();
    let thermal = 2.0 * b.n_bar(1.0) + 1.0;
    series
        .times
        .iter()
        .zip(&series.states)
        .map(|(&t, s)| {
            let (sn, cs) = t.sin_cos();
            let keep = (-0.1 * t).exp();
            let d = nalgebra::Matrix2::new(cs, sn, -sn, cs) * Vector2::new(s0.d[0], s0.d[1]) * keep.sqrt();
            let sigma = Matrix2::identity() * (keep + (1.0 - keep) * thermal);
            (s.d - d).abs().max().max((s.sigma - sigma).abs().max())
        })
        .fold(0.0, f64::max)
}

fn dynamics_closed_forms() -> Vec<Check> {
    let err = decoupled_error(1e-3, 60.0);
    let ratio = decoupled_error(0.1, 20.0) / decoupled_error(0.05, 20.0);
    vec![
        Check::new("relaxation", err <= 1e-8, format!("max deviation {err:.2e} over t ≤ 60 (tol 1e-8)")),
        Check::new("RK4 order", ratio >= 8.0, format!("error ratio {ratio:.2} on dt halving (need ≥ 8)")),
    ]
}

fn dynamics_oracle() -> Vec<Check> {
    let p = params(0.3, 0.2);
    let b = bath(0.1, 1.0);
    let init = InitialCondition::default();
    let dt = 5e-3;
    let (steps, stride) = (1000, 50);
    let basis = FockConfig::dynamics().basis();
    let s0 = init.state(&p).unwrap();
    let (aa, ab) = amplitudes(&s0.d);
    let stepper = LindbladStepper::new(&p, &b, basis, dt).unwrap();
    let mut fock = Vec::new();
    let mut leak: f64 = 0.0;
    let run = stepper.run(&DensityOperator::pure(&coherent_state(&basis, aa, ab)), steps, stride, |_, rho| {
        leak = leak.max(basis.leakage(&rho.populations()));
        fock.push(rho.gaussian_moments(&basis));
        Ok(())
    });
    if let Err(e) = run {
        return vec![Check::new("lindblad", false, e.to_string())];
    }
    let grid = TimeGrid::new(steps as f64 * dt, dt, stride).unwrap();
    let series = FullLocalDissipator.evolve(&p, &b, &init, &grid).unwrap();
    let global = series.global.unwrap();
    let dev = fock
        .iter()
        .zip(&global)
        .map(|(f, g)| (f.d - g.d).abs().max().max((f.sigma - g.sigma).abs().max()))
        .fold(0.0, f64::max);
    let matched = fock.len() == global.len();
    vec![Check::new(
        "moments",
        matched && dev <= 1e-4 && leak < 1e-6,
        format!("max deviation {dev:.2e} over {} samples, t ≤ 5, cutoff 30 (tol 1e-4), leakage {leak:.1e}", fock.len()),
    )]
}

fn kind(values: &[f64], i: usize) -> i8 {
    let prev = values[i.saturating_sub(1)];
    let next = values[(i + 1).min(values.len() - 1)];
    if values[i] >= prev && values[i] >= next {
        1
    } else {
        -1
    }
}

fn qualitative_dynamics() -> Vec<Check> {
    let model = ReduceThenDissipate;
    let b = bath(0.1, 1.0);
    let init = InitialCondition::default();
    let c0 = |l, m| coherence(&init.state(&params(l, m)).unwrap().mode_a()).unwrap();
    let mut checks = Vec::new();

    let base = c0(0.0, 0.0);
    let spread = [0.1, 0.3, 0.45].iter().map(|&l| (c0(l, 0.0) - base).abs()).fold(0.0, f64::max);
    let ladder: Vec<f64> = [0.0, 0.1, 0.3, 0.5].iter().map(|&m| c0(0.0, m)).collect();
    let increasing = ladder.windows(2).all(|w| w[1] > w[0]);
    checks.push(Check::new(
        "(a) initial coherence",
        spread < 1e-12 && increasing,
        format!("spread across λ {spread:.1e}; μ ladder {:?}", ladder.iter().map(|c| format!("{c:.3}")).collect::<Vec<_>>()),
    ));

    let grid = TimeGrid::new(60.0, 1e-3, 100).unwrap();
    let run = |l, m| dissipative_evolution(&model, &params(l, m), &b, &init, &grid).unwrap();
    let decoupled = run(0.0, 0.0);
    let monotone = decoupled.fidelity.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let coupled = local_extrema(&run(0.45, 0.0).fidelity, 1e-9).len();
    checks.push(Check::new(
        "(b) fidelity shape",
        monotone && coupled >= 3,
        format!("decoupled monotone: {monotone}; λ = 0.45 extrema: {coupled} (need ≥ 3)"),
    ));

    let long = dissipative_evolution(&model, &params(0.45, 0.5), &b, &init, &TimeGrid::new(500.0, 1e-3, 1000).unwrap()).unwrap();
    let (c_end, f_end) = (*long.coherence.last().unwrap(), *long.fidelity.last().unwrap());
    let t = run(0.45, 0.5);
    let ce = local_extrema(&t.coherence, 1e-9);
    let fe = local_extrema(&t.fidelity, 1e-9);
    let paired = ce
        .iter()
        .filter(|&&i| fe.iter().any(|&j| i.abs_diff(j) <= 2 && kind(&t.coherence, i) == -kind(&t.fidelity, j)))
        .count();
    checks.push(Check::new(
        "(c) asymptote and antiphase",
        c_end.abs() <= 1e-3 && (f_end - 1.0).abs() <= 1e-3 && paired >= 3 && paired * 5 >= ce.len() * 4,
        format!(
            "C(50/Γ) = {c_end:.1e}, 1 − F(50/Γ) = {:.1e}; {paired} of {} coherence extrema paired with opposite fidelity extrema",
            1.0 - f_end,
            ce.len()
        ),
    ));
    checks
}

fn determinism() -> Vec<Check> {
    let bin = env!("CARGO_BIN_EXE_bimode");
    let commands: &[&[&str]] = &[
        &["validate", "--lambda", "0.3", "--mu", "0.2"],
        &["ground", "--lambda", "0.3", "--sweep", "mu:0:0.69:50"],
        &["ground", "--mu", "0.3", "--sweep", "lambda:0:0.6:13"],
        &["steady", "--mu", "0.5", "--sweep", "T:0:20:41", "--format", "json"],
        &["dynamics", "--lambda", "0.45", "--mu", "0.5", "--t-max", "60"],
        &["dynamics", "--lambda", "0.3", "--mu", "0.2", "--t-max", "20", "--mode", "full", "--format", "json"],
        &["dynamics", "--lambda", "0.3", "--mu", "0.2", "--t-max", "5", "--verify"],
    ];
    commands
        .iter()
        .map(|args| {
            let out = || Command::new(bin).args(*args).output().expect("run bimode");
            let (a, b) = (out(), out());
            let same = a.stdout == b.stdout && a.status == b.status;
            let rows = String::from_utf8_lossy(&a.stdout).lines().count();
            Check::new(
                args.join(" "),
                same && !a.stdout.is_empty(),
                format!("{rows} lines, exit {}, identical: {same}", a.status.code().unwrap_or(-1)),
            )
        })
        .collect()
}

fn main() {
    let mut report = Report { unexpected: 0 };
    let s = |n| Some(Duration::from_secs(n));
    report.criterion(1, "zero-squeezing null", s(1), zero_squeezing_null);
    report.criterion(2, "coherence strictly increasing in mu", s(1), monotone_in_mu);
    report.criterion(3, "ground-state purity", s(1), ground_purity);
    report.criterion(4, "static Fock-oracle equivalence", s(120), static_oracle);
    report.criterion(5, "thermal limits and ordering", s(5), thermal_limits);
    report.criterion(6, "steady Wigner function", s(30), wigner_consistency);
    report.criterion(7, "dynamics closed forms", s(10), dynamics_closed_forms);
    report.criterion(8, "dynamics Fock-oracle (Lindblad)", s(300), dynamics_oracle);
    report.criterion(9, "qualitative dynamics", s(60), qualitative_dynamics);
    report.criterion(10, "CLI determinism", None, determinism);
    if report.unexpected > 0 {
        println!("{} unexpected failure(s)", report.unexpected);
        std::process::exit(1);
    }
}
