//! One driver per experiment. Drivers write their data files into the output
//! directory and return metrics plus the pass flag.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use qwlimits_core::coin::{compose_zyz, decompose_zyz, CoinSeries, CoinZYZ, PauliAxis, Unitary2};
use qwlimits_core::convergence::{brillouin_samples, ConvergenceReport, Coupling, LimitSchedule, Verdict};
use qwlimits_core::hamiltonian::{ct_generator, ct_hamiltonian};
use qwlimits_core::lattice::total_norm;
use qwlimits_core::limits::{
    ct_limit_check, ctcs_limit_check, dirac_limit_check, dirac_type_limit_check, divergence_check, CTCS_VIOLATION,
};
use qwlimits_core::propagators::{bessel_propagate, spectral_evolve, BesselKernelSpec};
use qwlimits_core::walk::evolve;
use qwlimits_core::{Grid, Mat2, Spinor, SpinorField};

use crate::config::{opt, req, Experiment, ExperimentConfig, ParamSpec, Params};
use crate::error::{CliError, Result};
use crate::output::{
    convergence_series, distribution_series, emit_csv, emit_plotdata, field_table, report_table, Cell, Table,
};

pub struct Outcome {
    pub metrics: BTreeMap<String, Value>,
    pub pass: bool,
}

struct Ctx<'a> {
    p: &'a Params,
    out: &'a Path,
    seed: u64,
    metrics: BTreeMap<String, Value>,
}

impl Ctx<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn metric(&mut self, key: &str, v: impl serde::Serialize) {
        self.metrics.insert(key.to_string(), json!(v));
    }

    fn rng(&self) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(self.seed)
    }

    fn finish(self, pass: bool) -> Outcome {
        Outcome { metrics: self.metrics, pass }
    }
}

const SERIES: [ParamSpec; 8] = [
    opt("series", "strauch", "coin series: strauch | admissible"),
    opt("gamma", "1.0", "hopping rate for the strauch preset"),
    opt("p", "1", "admissible series: delta = -p*pi/2, theta0 = p*pi"),
    opt("psi0", "0.0", "admissible series angle"),
    opt("psi1", "0.0", "admissible series angle slope"),
    opt("theta1", "1.0", "admissible series angle slope"),
    opt("phi0", "0.0", "admissible series angle"),
    opt("phi1", "0.0", "admissible series angle slope"),
];

const SCHEDULE: [ParamSpec; 2] = [
    opt("dt_exp_lo", "4", "coarsest step is 2^-dt_exp_lo"),
    opt("dt_exp_hi", "14", "finest step is 2^-dt_exp_hi"),
];

pub fn param_specs(e: Experiment) -> Vec<ParamSpec> {
    let mut v: Vec<ParamSpec> = match e {
        Experiment::Simulate => vec![
            req("coin", "hadamard | identity | sigma_x | sigma_y | sigma_z | zyz"),
            opt("delta", "0.0", "zyz coin angle"),
            opt("psi", "0.0", "zyz coin angle"),
            opt("theta", "0.0", "zyz coin angle"),
            opt("phi", "0.0", "zyz coin angle"),
            req("n_sites", "lattice sites (even)"),
            req("steps", "walk steps"),
            opt("dx", "1.0", "lattice spacing"),
            opt("start_site", "center", "initial site index or `center`"),
            opt("init", "symmetric", "initial coin state: symmetric | left | right"),
            opt("norm_tol", "1e-10", "allowed total-norm drift"),
        ],
        Experiment::GeneratorLimit => {
            let mut v = SERIES.to_vec();
            v.extend(SCHEDULE);
            v.extend([
                opt("n", "2", "skipped steps per generator (even)"),
                opt("dx", "1.0", "fixed lattice spacing"),
                opt("k_points", "16", "cell-centred Brillouin-zone samples"),
                opt("expected_slope", "1.0", "expected log-log order"),
                opt("slope_tol", "0.1", "allowed slope error"),
                opt("residual_tol", "1e-4", "allowed extrapolated-limit residual"),
            ]);
            v
        }
        Experiment::Divergence => {
            let mut v = SERIES.to_vec();
            v.extend(SCHEDULE);
            v.extend([
                opt("n", "1", "skipped steps per generator (odd)"),
                opt("k", "0.5", "wavenumber"),
                opt("dx", "1.0", "fixed lattice spacing"),
                opt("expected_slope", "-1.0", "expected generator-norm slope"),
                opt("slope_tol", "0.1", "allowed slope error"),
                opt("sweep", "0", "random series with theta0 pushed off p*pi, each must diverge at n = 2"),
                opt("min_offset", "0.2", "smallest theta0 offset from p*pi in the sweep"),
            ]);
            v
        }
        Experiment::BesselCheck => vec![
            opt("theta1", "1.0", "coupling"),
            opt("phi0", "0.3", "coin angle"),
            opt("psi0", "-0.7", "coin angle"),
            opt("t", "1.0", "evolution time"),
            opt("n_sites", "64", "lattice sites (even)"),
            opt("dx", "1.0", "lattice spacing"),
            opt("site", "center", "site of the initial delta or `center`"),
            opt("component", "left", "spin of the initial delta: left | right"),
            opt("random", "0", "additional random (theta1, phi0, psi0) draws"),
            opt("tol", "1e-9", "allowed kernel vs spectral deviation"),
            opt("parity_tol", "1e-14", "allowed amplitude on parity-forbidden sites"),
        ],
        Experiment::DecomposeCheck => vec![
            opt("count", "200", "random unitaries on top of the degenerate cases"),
            opt("tol", "1e-10", "allowed recomposition error"),
        ],
        Experiment::DiracLimit => {
            let mut v = vec![
                opt("l", "1", "root-of-unity numerator"),
                opt("m", "2", "root-of-unity order and skip count"),
                opt("nx", "0.0", "coin axis (normalized on input)"),
                opt("ny", "0.0", "coin axis"),
                opt("nz", "1.0", "coin axis"),
                opt("v", "1.0", "dx = v*dt"),
                opt("k_points", "9", "wavenumbers on [-k_max, k_max], plus k = 0"),
                opt("k_max", "2.0", "largest wavenumber"),
                opt("residual_tol", "1e-6", "allowed extrapolated-limit residual"),
                opt("mass_tol", "1e-10", "allowed |limit(0)| relative to the limit scale"),
            ];
            v.extend(SCHEDULE);
            v
        }
        Experiment::CtcsLimit => vec![
            opt("alpha", "2.0", "theta1 = alpha/dx"),
            opt("psi0", "0.3", "coin angle; phi0 = pi - psi0"),
            opt("k_points", "7", "wavenumbers on [-k_max, k_max]"),
            opt("k_max", "1.5", "largest wavenumber"),
            opt("dx_exp_lo", "4", "coarsest spacing is 2^-dx_exp_lo"),
            opt("dx_exp_hi", "14", "finest spacing is 2^-dx_exp_hi"),
            opt("slope_tol", "0.1", "allowed error on the +1 and -1 slopes"),
        ],
        Experiment::DiracType => {
            let mut v = vec![
                opt("a0", "0.0", "shift generator A, identity part"),
                opt("ax", "0.0", "A, sigma_x part"),
                opt("ay", "0.0", "A, sigma_y part"),
                opt("az", "1.0", "A, sigma_z part"),
                opt("b0", "0.0", "coin generator B, identity part"),
                opt("bx", "0.5", "B, sigma_x part"),
                opt("by", "0.0", "B, sigma_y part"),
                opt("bz", "0.0", "B, sigma_z part"),
                opt("v", "1.0", "dx = v*dt"),
                opt("k_points", "16", "wavenumbers on [-k_max, k_max], plus k = 0"),
                opt("k_max", "2.0", "largest wavenumber"),
                opt("tol", "1e-6", "allowed residual and dispersion error"),
            ];
            v.extend(SCHEDULE);
            v
        }
        Experiment::Spectrum => vec![
            opt("theta1", "1.3", "coupling"),
            opt("phi0", "0.4", "coin angle"),
            opt("psi0", "-1.1", "coin angle"),
            opt("dx", "1.0", "lattice spacing"),
            opt("k_points", "64", "samples over the Brillouin zone"),
            opt("random", "0", "additional random (theta1, phi0, psi0) draws"),
            opt("tol", "1e-12", "allowed eigenvalue error"),
        ],
    };
    v.sort_by_key(|s| s.key);
    v
}

pub fn describe(e: Experiment) -> &'static str {
    match e {
        Experiment::Simulate => {
            "Runs the discrete-time walk Psi <- S C Psi from a localized state and dumps the final \
             field and position distribution. Passes when the total norm drifts by at most norm_tol."
        }
        Experiment::GeneratorLimit => {
            "Continuous-time limit at fixed dx: the generator i[(S C)^n - I]/(n dt) of an admissible \
             coin series (theta0 = p*pi, delta = -p*pi/2, angles linear in dt) against the closed-form \
             lattice Hamiltonian -(theta1/4)(e^{i phi0 sz} + e^{2ik dx sz} e^{-i psi0 sz}) sy, up to a \
             fitted unit sign. Passes on a converged verdict with the expected log-log order and a \
             small extrapolated residual."
        }
        Experiment::Divergence => {
            "Necessity of the admissibility conditions: the generator of an odd skip count, and of \
             series whose theta0 is off every multiple of pi, grows like 1/dt. Passes when the \
             generator-norm slope matches and every sweep member diverges."
        }
        Experiment::BesselCheck => {
            "Closed-form propagator of the continuous-time lattice Hamiltonian as a sum of integer \
             Bessel functions, compared site by site against exact spectral evolution. A localized \
             state stays on sites of its own parity."
        }
        Experiment::DecomposeCheck => {
            "Every 2x2 unitary is e^{i delta} Rz(psi) Ry(theta) Rz(phi): decompose random and \
             degenerate unitaries and recompose them."
        }
        Experiment::DiracLimit => {
            "Coins that are m-th roots of the identity, e^{i pi l/m (n.s)}, skipped m steps with \
             dx = v dt: the generator tends to a massless Dirac-like operator proportional to \
             k v n_z (n.s), and to zero when n_z = 0."
        }
        Experiment::CtcsLimit => {
            "Joint space limit: theta1 = alpha/dx with phi0 + psi0 = pi; the lattice Hamiltonian \
             tends to -(alpha/2) e^{-i psi0 sz} k sx with an O(dx) error, and diverges like 1/dx \
             once the constraint is broken."
        }
        Experiment::DiracType => {
            "Walk with coin e^{i dt B} and shift e^{ik dx A}, dx = v dt: the generator tends to a \
             Dirac-type operator (up to fitted signs) -k v A - B, massive when B does not commute \
             with A; checks the k = 0 gap and the dispersion."
        }
        Experiment::Spectrum => {
            "Eigenvalues of the continuous-time lattice Hamiltonian against the closed form \
             +-(theta1/2) cos(k dx - alpha), alpha = (phi0 + psi0)/2."
        }
    }
}

pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    let ctx = Ctx { p: &cfg.params, out: &cfg.output_dir, seed: cfg.seed, metrics: BTreeMap::new() };
    match cfg.experiment {
        Experiment::Simulate => simulate(ctx),
        Experiment::GeneratorLimit => generator_limit(ctx),
        Experiment::Divergence => divergence(ctx),
        Experiment::BesselCheck => bessel_check(ctx),
        Experiment::DecomposeCheck => decompose_check(ctx),
        Experiment::DiracLimit => dirac_limit(ctx),
        Experiment::CtcsLimit => ctcs_limit(ctx),
        Experiment::DiracType => dirac_type(ctx),
        Experiment::Spectrum => spectrum(ctx),
    }
}

fn site_param(p: &Params, key: &str, n: usize) -> Result<usize> {
    if p.raw(key)? == "center" {
        return Ok(n / 2);
    }
    let s: usize = p.int(key)?;
    if s >= n {
        return Err(CliError::config(format!("`{key}` = {s} is outside a lattice of {n} sites")));
    }
    Ok(s)
}

fn series(p: &Params) -> Result<CoinSeries> {
    Ok(match p.choice("series", &["strauch", "admissible"])? {
        "strauch" => CoinSeries::strauch(p.f64("gamma")?),
        _ => CoinSeries::admissible(
            p.int("p")?,
            p.f64("psi0")?,
            p.f64("psi1")?,
            p.f64("theta1")?,
            p.f64("phi0")?,
            p.f64("phi1")?,
        ),
    })
}

fn schedule(p: &Params, coupling: Coupling) -> Result<LimitSchedule> {
    Ok(LimitSchedule::geometric_pow2(p.int("dt_exp_lo")?, p.int("dt_exp_hi")?, coupling)?)
}

/// `count` points on `[−k_max, k_max]`, optionally with `k = 0` appended.
fn k_grid(p: &Params, with_zero: bool) -> Result<Vec<f64>> {
    let count: usize = p.int("k_points")?;
    let k_max = p.f64("k_max")?;
    if count == 0 {
        return Err(CliError::config("`k_points` must be positive"));
    }
    let mut ks: Vec<f64> = if count == 1 {
        vec![k_max]
    } else {
        (0..count).map(|j| -k_max + 2.0 * k_max * j as f64 / (count - 1) as f64).collect()
    };
    if with_zero && !ks.contains(&0.0) {
        ks.push(0.0);
    }
    Ok(ks)
}

fn emit_report(c: &Ctx, stem: &str, r: &ConvergenceReport) -> Result<()> {
    emit_csv(&c.path(&format!("{stem}.csv")), &report_table(r))?;
    let s = convergence_series(r);
    if !s.is_empty() {
        let x = if r.probe_points.first().is_some_and(|p| p.dt > 0.0) { "log10_dt" } else { "log10_dx" };
        emit_plotdata(&c.path(&format!("{stem}.dat")), (x, "log10_distance"), &s)?;
    }
    Ok(())
}

/// `(k, λ₊)` of the extrapolated limit, sorted by `k`.
fn emit_dispersion(c: &Ctx, r: &ConvergenceReport) -> Result<()> {
    let mut s: Vec<(f64, f64)> =
        r.limit_estimate.iter().map(|l| (l.k, l.matrix.hermitian_eigenvalues().1)).collect();
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    emit_plotdata(&c.path("dispersion.dat"), ("k", "lambda_plus"), &s)
}

fn close(x: Option<f64>, target: f64, tol: f64) -> bool {
    x.is_some_and(|x| (x - target).abs() <= tol)
}

fn le(x: Option<f64>, tol: f64) -> bool {
    x.is_some_and(|x| x <= tol)
}

fn random_triple(rng: &mut ChaCha20Rng) -> (f64, f64, f64) {
    (rng.gen_range(0.5..4.0), rng.gen_range(-PI..PI), rng.gen_range(-PI..PI))
}

fn simulate(mut c: Ctx) -> Result<Outcome> {
    let p = c.p;
    let coin = match p.choice("coin", &["hadamard", "identity", "sigma_x", "sigma_y", "sigma_z", "zyz"])? {
        "hadamard" => Unitary2::hadamard(),
        "identity" => Unitary2::identity(),
        "sigma_x" => Unitary2::sigma_x(),
        "sigma_y" => Unitary2::sigma_y(),
        "sigma_z" => Unitary2::sigma_z(),
        _ => compose_zyz(&CoinZYZ::new(p.f64("delta")?, p.f64("psi")?, p.f64("theta")?, p.f64("phi")?)),
    };
    let grid = Grid::new(p.int("n_sites")?, p.f64("dx")?)?;
    let site = site_param(p, "start_site", grid.n_sites())?;
    let spin = match p.choice("init", &["symmetric", "left", "right"])? {
        "symmetric" => Spinor::new(Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, FRAC_1_SQRT_2)),
        "left" => Spinor::left(),
        _ => Spinor::right(),
    };
    let steps: usize = p.int("steps")?;
    let f0 = SpinorField::delta(grid, site, spin);
    let f = evolve(&f0, &coin, steps);
    let drift = (total_norm(&f) - total_norm(&f0)).abs();

    let probs = f.probabilities();
    let mut dist = Table::new(&["site", "x", "probability"]);
    for (j, &pr) in probs.iter().enumerate() {
        dist.push(vec![j.into(), grid.x(j).into(), pr.into()]);
    }
    emit_csv(&c.path("field.csv"), &field_table(&f))?;
    emit_csv(&c.path("distribution.csv"), &dist)?;
    emit_plotdata(&c.path("distribution.dat"), ("x", "probability"), &distribution_series(&f))?;

    let total: f64 = probs.iter().sum();
    let mean = probs.iter().enumerate().map(|(j, pr)| pr * grid.x(j)).sum::<f64>() / total;
    let var = probs.iter().enumerate().map(|(j, pr)| pr * (grid.x(j) - mean).powi(2)).sum::<f64>() / total;
    c.metric("norm_drift", drift);
    c.metric("mean_x", mean);
    c.metric("std_x", var.sqrt());
    let pass = drift <= p.f64("norm_tol")?;
    Ok(c.finish(pass))
}

fn generator_limit(mut c: Ctx) -> Result<Outcome> {
    let p = c.p;
    let dx = p.f64("dx")?;
    let ks = brillouin_samples(p.int("k_points")?, dx);
    let r = ct_limit_check(&series(p)?, p.int("n")?, &ks, &schedule(p, Coupling::FixedDx(dx))?)?;
    emit_report(&c, "convergence", &r)?;
    emit_dispersion(&c, &r)?;
    c.metric("verdict", r.verdict);
    c.metric("fitted_slope", r.fitted_slope);
    c.metric("last_distance", r.last_distance());
    c.metric("residual", r.residual);
    c.metric("sign", r.sign("s"));
    let pass = r.verdict == Verdict::Converged
        && close(r.fitted_slope, p.f64("expected_slope")?, p.f64("slope_tol")?)
        && le(r.residual, p.f64("residual_tol")?);
    Ok(c.finish(pass))
}

fn divergence(mut c: Ctx) -> Result<Outcome> {
    let p = c.p;
    let (k, dx) = (p.f64("k")?, p.f64("dx")?);
    let sched = schedule(p, Coupling::FixedDx(dx))?;
    let r = divergence_check(&series(p)?, p.int("n")?, k, &sched)?;
    emit_report(&c, "divergence", &r)?;
    let mut pass = r.verdict == Verdict::Diverged && close(r.norm_slope, p.f64("expected_slope")?, p.f64("slope_tol")?);
    c.metric("verdict", r.verdict);
    c.metric("norm_slope", r.norm_slope);

    let count: usize = p.int("sweep")?;
    let min_offset = p.f64("min_offset")?;
    if !(min_offset > 0.0 && min_offset < PI) {
        return Err(CliError::config(format!("`min_offset` must lie in (0, pi), got {min_offset}")));
    }
    let mut rng = c.rng();
    let mut table = Table::new(&["index", "p", "theta0_offset", "psi0", "theta1", "phi0", "norm_slope", "verdict"]);
    let mut diverged = 0;
    for i in 0..count {
        let pp = if i % 2 == 0 { 1 } else { 3 };
        let (psi0, psi1, theta1, phi0, phi1) = (
            rng.gen_range(-PI..PI),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-4.0..4.0),
            rng.gen_range(-PI..PI),
            rng.gen_range(-2.0..2.0),
        );
        let mut s = CoinSeries::admissible(pp, psi0, psi1, theta1, phi0, phi1);
        let offset = rng.gen_range(min_offset..2.0 * PI - min_offset);
        s.theta0 += offset;
        let sr = ct_limit_check(&s, 2, &[k], &sched)?;
        if sr.verdict == Verdict::Diverged {
            diverged += 1;
        }
        let slope = sr.norm_slope.map_or(Cell::Text(String::new()), Cell::Float);
        let verdict = json!(sr.verdict).as_str().unwrap_or_default().to_string();
        table.push(vec![i.into(), Cell::Int(pp as i64), offset.into(), psi0.into(), theta1.into(), phi0.into(), slope, Cell::Text(verdict)]);
    }
    if count > 0 {
        emit_csv(&c.path("sweep.csv"), &table)?;
    }
    pass &= diverged == count;
    c.metric("sweep_count", count);
    c.metric("sweep_diverged", diverged);
    Ok(c.finish(pass))
}

fn bessel_check(mut c: Ctx) -> Result<Outcome> {
    let p = c.p;
    let grid = Grid::new(p.int("n_sites")?, p.f64("dx")?)?;
    let site = site_param(p, "site", grid.n_sites())?;
    let spin = match p.choice("component", &["left", "right"])? {
        "left" => Spinor::left(),
        _ => Spinor::right(),
    };
    let t = p.f64("t")?;
    let mut triples = vec![(p.f64("theta1")?, p.f64("phi0")?, p.f64("psi0")?)];
    let mut rng = c.rng();
    for _ in 0..p.int::<usize>("random")? {
        triples.push(random_triple(&mut rng));
    }
    let f0 = SpinorField::delta(grid, site, spin);
    let mut table = Table::new(&["index", "theta1", "phi0", "psi0", "deviation", "parity_amplitude"]);
    let (mut worst, mut parity): (f64, f64) = (0.0, 0.0);
    for (i, &(theta1, phi0, psi0)) in triples.iter().enumerate() {
        let kernel = bessel_propagate(&f0, &BesselKernelSpec::new(theta1, phi0, psi0, t))?;
        let exact = spectral_evolve(&f0, &ct_generator(theta1, phi0, psi0, grid.dx())?, t)?;
        let dev = kernel.max_abs_diff(&exact);
        let odd = kernel
            .data()
            .iter()
            .enumerate()
            .filter(|(j, _)| (j + site) % 2 == 1)
            .map(|(_, s)| s.l.norm().max(s.r.norm()))
            .fold(0.0, f64::max);
        worst = worst.max(dev);
        parity = parity.max(odd);
        table.push(vec![i.into(), theta1.into(), phi0.into(), psi0.into(), dev.into(), odd.into()]);
        if i == 0 {
            emit_csv(&c.path("field.csv"), &field_table(&kernel))?;
            emit_plotdata(&c.path("distribution.dat"), ("x", "probability"), &distribution_series(&kernel))?;
        }
    }
    emit_csv(&c.path("triples.csv"), &table)?;
    c.metric("max_deviation", worst);
    c.metric("parity_amplitude", parity);
    let pass = worst <= p.f64("tol")? && parity <= p.f64("parity_tol")?;
    Ok(c.finish(pass))
}

fn decompose_check(mut c: Ctx) -> Result<Outcome> {
    let p = c.p;
    let mut coins = vec![
        Unitary2::identity(),
        Unitary2::hadamard(),
        Unitary2::sigma_x(),
        Unitary2::sigma_y(),
        compose_zyz(&CoinZYZ::new(0.3, 1.1, 0.0, -0.4)),
        compose_zyz(&CoinZYZ::new(-2.0, 0.7, PI, 2.9)),
    ];
    let mut rng = c.rng();
    for _ in 0..p.int::<usize>("count")? {
        coins.push(compose_zyz(&CoinZYZ::new(
            rng.gen_range(-PI..PI),
            rng.gen_range(-PI..PI),
            rng.gen_range(0.0..=PI),
            rng.gen_range(-PI..PI),
        )));
    }
    let mut table = Table::new(&["index", "delta", "psi", "theta", "phi", "error"]);
    let mut worst: f64 = 0.0;
    for (i, u) in coins.iter().enumerate() {
        let z = decompose_zyz(u.mat())?;
        let err = compose_zyz(&z).mat().max_abs_diff(u.mat());
        worst = worst.max(err);
        table.push(vec![i.into(), z.delta.into(), z.psi.into(), z.theta.into(), z.phi.into(), err.into()]);
    }
    emit_csv(&c.path("decompose.csv"), &table)?;
    c.metric("cases", coins.len());
    c.metric("max_error", worst);
    let pass = worst <= p.f64("tol")?;
    Ok(c.finish(pass))
}

fn dirac_limit(mut c: Ctx) -> Result<Outcome> {
    let p = c.p;
    let (l, m): (u32, u32) = (p.int("l")?, p.int("m")?);
    let axis = PauliAxis::normalized(p.f64("nx")?, p.f64("ny")?, p.f64("nz")?)?;
    let v = p.f64("v")?;
    let ks = k_grid(p, true)?;
    let r = dirac_limit_check(l, m, &axis, v, &ks, &schedule(p, Coupling::Ratio(v))?)?;
    emit_report(&c, "convergence", &r)?;
    emit_dispersion(&c, &r)?;
    let scale = r.limit_estimate.iter().map(|x| x.matrix.op_norm()).fold(0.0, f64::max);
    let mass = r.limit_at(0.0).map_or(f64::NAN, Mat2::op_norm);
    let identity = r.extras.get("identity_coin") == Some(&1.0);
    let residual_tol = p.f64("residual_tol")?;
    let massless = axis.nz() == 0.0 && !identity;
    let pass = r.verdict == Verdict::Converged
        && le(r.residual, residual_tol)
        && if massless { scale <= residual_tol } else { mass <= p.f64("mass_tol")? * scale };
    c.metric("verdict", r.verdict);
    c.metric("fitted_slope", r.fitted_slope);
    c.metric("residual", r.residual);
    c.metric("sign", r.sign("s"));
    c.metric("n_z", axis.nz());
    c.metric("identity_coin", identity);
    c.metric("limit_scale", scale);
    c.metric("limit_at_zero", mass);
    Ok(c.finish(pass))
}

fn ctcs_limit(mut c: Ctx) -> Result<Outcome> {
    let p = c.p;
    let (lo, hi): (i32, i32) = (p.int("dx_exp_lo")?, p.int("dx_exp_hi")?);
    let dxs: Vec<f64> = (lo..=hi).map(|e| 2f64.powi(-e)).collect();
    let r = ctcs_limit_check(p.f64("alpha")?, p.f64("psi0")?, &k_grid(p, false)?, &dxs)?;
    emit_report(&c, "constrained", &r.constrained)?;
    emit_report(&c, "violated", &r.violated)?;
    let tol = p.f64("slope_tol")?;
    let pass = r.constrained.verdict == Verdict::Converged
        && close(r.constrained.fitted_slope, 1.0, tol)
        && r.violated.verdict == Verdict::Diverged
        && close(r.violated.fitted_slope, -1.0, tol);
    c.metric("constrained_verdict", r.constrained.verdict);
    c.metric("constrained_slope", r.constrained.fitted_slope);
    c.metric("constrained_last_distance", r.constrained.last_distance());
    c.metric("violation", CTCS_VIOLATION);
    c.metric("violated_verdict", r.violated.verdict);
    c.metric("violated_slope", r.violated.fitted_slope);
    Ok(c.finish(pass))
}

fn pauli(p: &Params, prefix: char) -> Result<Mat2> {
    let g = |s: &str| p.f64(&format!("{prefix}{s}")).map(Complex64::from);
    Ok(Mat2::from_pauli(g("0")?, g("x")?, g("y")?, g("z")?))
}

fn dirac_type(mut c: Ctx) -> Result<Outcome> {
    let p = c.p;
    let (a, b, v) = (pauli(p, 'a')?, pauli(p, 'b')?, p.f64("v")?);
    let r = dirac_type_limit_check(&a, &b, v, &k_grid(p, true)?, &schedule(p, Coupling::Ratio(v))?)?;
    emit_report(&c, "convergence", &r)?;
    emit_dispersion(&c, &r)?;
    let (sa, sb) = (r.sign("s_a").unwrap_or(f64::NAN), r.sign("s_b").unwrap_or(f64::NAN));
    let disp = r
        .limit_estimate
        .iter()
        .map(|l| {
            let (lo, hi) = l.matrix.hermitian_eigenvalues();
            let (clo, chi) = (a.scale_real(sa * l.k * v) + b.scale_real(sb)).hermitian_eigenvalues();
            (lo - clo).abs().max((hi - chi).abs())
        })
        .fold(0.0, f64::max);
    let (lo0, hi0) = r.limit_at(0.0).map_or((f64::NAN, f64::NAN), Mat2::hermitian_eigenvalues);
    let tol = p.f64("tol")?;
    let pass = r.verdict == Verdict::Converged && le(r.residual, tol) && disp <= tol;
    c.metric("verdict", r.verdict);
    c.metric("fitted_slope", r.fitted_slope);
    c.metric("residual", r.residual);
    c.metric("sign_a", sa);
    c.metric("sign_b", sb);
    c.metric("dispersion_error", disp);
    c.metric("k0_eigenvalues", [lo0, hi0]);
    Ok(c.finish(pass))
}

fn spectrum(mut c: Ctx) -> Result<Outcome> {
    let p = c.p;
    let dx = p.f64("dx")?;
    let count: usize = p.int("k_points")?;
    if count == 0 {
        return Err(CliError::config("`k_points` must be positive"));
    }
    let ks: Vec<f64> = (0..count).map(|j| -PI / dx + 2.0 * PI * j as f64 / (count as f64 * dx)).collect();
    let mut triples = vec![(p.f64("theta1")?, p.f64("phi0")?, p.f64("psi0")?)];
    let mut rng = c.rng();
    for _ in 0..p.int::<usize>("random")? {
        triples.push(random_triple(&mut rng));
    }
    let mut worst: f64 = 0.0;
    let mut table = Table::new(&["k", "lambda_minus", "lambda_plus", "closed_form"]);
    let mut series = Vec::new();
    for (i, &(theta1, phi0, psi0)) in triples.iter().enumerate() {
        let h = ct_hamiltonian(theta1, phi0, psi0, dx)?;
        let alpha = 0.5 * (phi0 + psi0);
        for &k in &ks {
            let closed = 0.5 * theta1 * (k * dx - alpha).cos();
            let (lo, hi) = h.evaluate(k).hermitian_eigenvalues();
            worst = worst.max((hi - closed.abs()).abs()).max((lo + closed.abs()).abs());
            if i == 0 {
                table.push(vec![k.into(), lo.into(), hi.into(), closed.into()]);
                series.push((k, hi));
            }
        }
    }
    emit_csv(&c.path("spectrum.csv"), &table)?;
    emit_plotdata(&c.path("dispersion.dat"), ("k", "lambda_plus"), &series)?;
    c.metric("triples", triples.len());
    c.metric("max_error", worst);
    let pass = worst <= p.f64("tol")?;
    Ok(c.finish(pass))
}
