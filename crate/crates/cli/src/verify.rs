//! The invariant suite behind the `verify` command.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use timeop_core::{
    apply_l, apply_t, decay_window, density_expectation, embed_density, embed_pure, evolve, hardy_decompose,
    hilbert_survival, inner, kernel_expectation, lambda_to_nue, nue_to_lambda, pole_state, project_p,
    projected_norm_sqr, resonance_state, survival, time_stats, to_tau, w_apply, from_tau, HSState, LambdaKernel,
    Profile, PureState, ResonanceSpec, SpectralGrid, UNCERTAINTY_BOUND,
};

use crate::config::{ScenarioConfig, Tolerances};
use crate::error::CliResult;
use crate::output::Check;
use crate::sampling::{
    admissible_widths, bump_state, general_state, hardy_state, physical_state, random_complex, random_family,
    random_profile,
};

struct Suite {
    grid: SpectralGrid,
    physical: SpectralGrid,
    samples: usize,
    seed: u64,
    tol: Tolerances,
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

fn relative(a: &HSState, b: &HSState) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

impl Suite {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn states(&self, stream: u64) -> CliResult<Vec<HSState>> {
        let mut rng = self.rng(stream);
        (0..self.samples).map(|_| general_state(&mut rng, &self.grid)).collect()
    }

    fn hardy_states(&self, stream: u64) -> CliResult<Vec<HSState>> {
        let mut rng = self.rng(stream);
        (0..self.samples).map(|_| hardy_state(&mut rng, &self.grid)).collect()
    }

    fn lattice_time(&self, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
        self.grid.snap_time(rng.random_range(lo..hi))
    }

    /// Poles `-0.5i`, `1 - 0.2i`, `2 - i` where the grid resolves them,
    /// otherwise the middle of the admissible band.
    fn poles(&self) -> CliResult<Vec<Complex64>> {
        let (lo, hi) = admissible_widths(&self.grid)?;
        let fixed: Vec<Complex64> = [(0.0, -0.5), (1.0, -0.2), (2.0, -1.0)]
            .iter()
            .map(|&(re, im)| Complex64::new(re, im))
            .filter(|xi| (lo..=hi).contains(&-xi.im))
            .collect();
        Ok(if fixed.is_empty() { vec![Complex64::new(0.0, -(lo * hi).sqrt())] } else { fixed })
    }

    fn g1(&self) -> CliResult<Check> {
        let n = 64;
        let small = SpectralGrid::new(4.0, 2 * n, 4.0, n)?;
        let mut rng = self.rng(1);
        let mut defect: f64 = 0.0;
        for _ in 0..self.samples {
            let values = ndarray::Array2::from_shape_fn((n, n), |_| random_complex(&mut rng));
            let kernel = LambdaKernel::from_values(small, values)?;
            let s = lambda_to_nue(&kernel);
            let back = nue_to_lambda(&s)?;
            let norm_error = (s.norm() - kernel.norm()).abs() / kernel.norm();
            let round_trip = worst((back.values() - kernel.values()).iter().map(|z| z.norm()));
            defect = defect.max(norm_error).max(round_trip);
        }
        Ok(Check::within("G1", "coordinate change is a norm-preserving bijection", defect, self.tol.exact))
    }

    fn g2(&self) -> Check {
        let mut defect: f64 = 0.0;
        for g in [self.grid, self.physical] {
            defect = defect.max(g.nu(g.nu_zero()).abs());
            defect = defect.max(worst((0..g.n_e()).map(|m| (g.energy(m) - m as f64 * g.spacing()).abs())));
            defect = defect.max((g.dnu() - g.de()).abs() / g.dnu());
        }
        Check::within("G2", "nu = 0 is a sample and the energy grids coincide", defect, self.tol.exact)
    }

    fn l1(&self) -> CliResult<Check> {
        let mut rng = self.rng(3);
        let mut defect: f64 = 0.0;
        for s in self.states(3)? {
            let t1 = rng.random_range(-5.0..5.0);
            let t2 = rng.random_range(-5.0..5.0);
            let moved = evolve(&s, t1);
            defect = defect.max((moved.norm() - s.norm()).abs());
            defect = defect.max(relative(&evolve(&moved, t2), &evolve(&s, t1 + t2)));
            defect = defect.max(relative(&evolve(&s, 0.0), &s));
        }
        Ok(Check::within("L1", "U_t is a unitary group", defect, self.tol.exact))
    }

    fn l2_l4(&self) -> CliResult<[Check; 2]> {
        let states = self.states(4)?;
        let mut rng = self.rng(4);
        let mut adjoint: f64 = 0.0;
        let mut commute: f64 = 0.0;
        for pair in states.chunks(2) {
            let (a, b) = (&pair[0], pair.last().unwrap_or(&pair[0]));
            let lhs = inner(a, &apply_l(b))?;
            let rhs = inner(&apply_l(a), b)?;
            adjoint = adjoint.max((lhs - rhs).norm() / (a.norm() * apply_l(b).norm()));
            let t = rng.random_range(-5.0..5.0);
            commute = commute.max(relative(&evolve(&apply_l(a), t), &apply_l(&evolve(a, t))));
        }
        Ok([
            Check::within("L2", "L is self-adjoint", adjoint, self.tol.exact),
            Check::within("L4", "U_t commutes with L", commute, self.tol.exact),
        ])
    }

    fn l3(&self) -> CliResult<Check> {
        let mut rng = self.rng(5);
        let mut defect: f64 = 0.0;
        let observables: [fn(f64) -> f64; 2] = [|l| l, |l| l * l];
        for i in 0..self.samples {
            let (_, m) = physical_state(&mut rng, &self.physical, i % 2 == 1)?;
            let rho = embed_density(&m)?;
            for a in observables {
                let exact = density_expectation(&m, a);
                defect = defect.max((kernel_expectation(&rho, a) - exact).abs() / exact.abs());
            }
            let profile = random_family(&mut rng, self.physical.e_max());
            let psi = PureState::new(self.physical, profile.sample(&self.physical))?;
            let pure = embed_pure(&psi);
            for a in observables {
                let exact = psi.expectation(a);
                defect = defect.max((kernel_expectation(&pure, a) - exact).abs() / exact.abs());
            }
        }
        Ok(Check::within("L3", "embeddings preserve expectations", defect, self.tol.expectation))
    }

    fn t1(&self) -> CliResult<Check> {
        let states = self.states(6)?;
        let mut rng = self.rng(6);
        let mut defect: f64 = 0.0;
        for pair in states.chunks(2) {
            let (a, b) = (&pair[0], pair.last().unwrap_or(&pair[0]));
            let tau = rng.random_range(-0.1 * self.grid.tau_max()..0.1 * self.grid.tau_max());
            let pa = project_p(a, tau);
            defect = defect.max((&project_p(&pa, tau) - &pa).norm());
            defect = defect.max((inner(&pa, b)? - inner(a, &project_p(b, tau))?).norm());
            defect = defect.max(pa.norm() - a.norm());
        }
        Ok(Check::within("T1", "P_tau is an orthogonal projection", defect, self.tol.exact))
    }

    fn t2_t4(&self) -> CliResult<[Check; 3]> {
        let mut rng = self.rng(7);
        let mut nested: f64 = 0.0;
        let mut intertwined: f64 = 0.0;
        let mut monotone: f64 = 0.0;
        let span = 0.1 * self.grid.tau_max();
        for s in self.states(7)? {
            let (x, y) = (rng.random_range(-span..span), rng.random_range(-span..span));
            let (lo, hi) = (x.min(y), x.max(y));
            nested = nested.max((&project_p(&project_p(&s, hi), lo) - &project_p(&s, lo)).norm());
            let t = self.lattice_time(&mut rng, -4.0, 4.0);
            let moved = evolve(&project_p(&evolve(&s, -t), lo), t);
            intertwined = intertwined.max((&moved - &project_p(&s, lo + t)).norm());
            let mut previous = 0.0;
            for i in 0..=40 {
                let n = projected_norm_sqr(&s, -span + 2.0 * span * i as f64 / 40.0);
                monotone = monotone.max(previous - n);
                previous = n;
            }
        }
        Ok([
            Check::within("T2", "projections are nested", nested, self.tol.exact),
            Check::within("T3", "U_t intertwines P_tau and P_(tau+t)", intertwined, self.tol.exact),
            Check::within("T4", "||P_tau s|| is nondecreasing in tau", monotone, self.tol.exact),
        ])
    }

    fn t5_t6(&self) -> CliResult<[Check; 2]> {
        let mut parseval: f64 = 0.0;
        let mut split: f64 = 0.0;
        for s in self.states(8)? {
            let ts = to_tau(&s);
            parseval = parseval.max((ts.norm_sqr() - s.norm_sqr()).abs() / s.norm_sqr());
            parseval = parseval.max(relative(&from_tau(&ts), &s));
            let (plus, minus) = hardy_decompose(&s);
            let total = s.norm_sqr();
            split = split.max(inner(&plus, &minus)?.norm() / total);
            split = split.max((total - plus.norm_sqr() - minus.norm_sqr()).abs() / total);
            split = split.max(relative(&(&plus + &minus), &s));
        }
        Ok([
            Check::within("T5", "time transform is unitary", parseval, self.tol.exact),
            Check::within("T6", "Hardy split is an orthogonal direct sum", split, self.tol.exact),
        ])
    }

    fn t7_t8(&self) -> CliResult<[Check; 2]> {
        let mut rng = self.rng(9);
        let mut commutator: f64 = 0.0;
        let mut weyl: f64 = 0.0;
        let scale = self.grid.nu_max();
        for _ in 0..self.samples.max(2) {
            let profile = random_profile(&mut rng, self.grid.n_e());
            let center = rng.random_range(-0.1 * scale..0.1 * scale);
            let s = bump_state(&self.grid, center, rng.random_range(0.06 * scale..0.16 * scale), &profile);
            let bracket = &apply_l(&apply_t(&s)) - &apply_t(&apply_l(&s));
            commutator = commutator.max((&bracket + &s.scaled(Complex64::i())).norm() / s.norm());
            let t = self.lattice_time(&mut rng, -2.0, 2.0);
            let lhs = evolve(&apply_t(&evolve(&s, t)), -t);
            let rhs = &apply_t(&s) + &s.scaled(Complex64::new(t, 0.0));
            weyl = weyl.max((&lhs - &rhs).norm() / s.norm());
        }
        Ok([
            Check::within("T7", "[T, L] = i on smooth states", commutator, self.tol.commutator),
            Check::within("T8", "Weyl relation U_-t T U_t = T + t", weyl, self.tol.commutator),
        ])
    }

    fn s1_s2(&self) -> CliResult<[Check; 2]> {
        let mut rng = self.rng(10);
        let mut law: f64 = 0.0;
        for s in self.hardy_states(10)? {
            let t1 = self.lattice_time(&mut rng, 0.05, 2.0);
            let t2 = self.lattice_time(&mut rng, 0.05, 2.0);
            let composed = w_apply(&w_apply(&s, t2)?, t1)?;
            law = law.max(relative(&composed, &w_apply(&s, self.grid.snap_time(t1 + t2))?));
        }
        let mut growth: f64 = 0.0;
        for s in self.states(11)? {
            let mut previous = s.norm();
            for i in 0..=10 {
                let n = w_apply(&s, self.grid.snap_time(0.4 * i as f64))?.norm();
                growth = growth.max(n - previous);
                previous = n;
            }
        }
        Ok([
            Check::within("S1", "W_t W_s = W_(t+s) on Hardy states", law, self.tol.semigroup),
            Check::within("S2", "W_t is a contraction, nonincreasing in t", growth, self.tol.exact),
        ])
    }

    fn s3_s6(&self) -> CliResult<[Check; 2]> {
        let mut rng = self.rng(12);
        let mut residual: f64 = 0.0;
        let mut exponential: f64 = 0.0;
        for xi in self.poles()? {
            let b = -xi.im;
            let spec = ResonanceSpec::new(&self.grid, xi, random_profile(&mut rng, self.grid.n_e()))?;
            let rho = resonance_state(&spec, &self.grid)?;
            for f in [0.1, 0.5, 1.0, 2.0] {
                let t = self.grid.snap_time(f / b);
                let expected = rho.scaled(spec.eigenvalue(t));
                residual = residual.max((&w_apply(&rho, t)? - &expected).norm() / rho.norm());
            }
            let mut zeta = xi.conj();
            zeta.re += rng.random_range(-1.0..1.0);
            let anti = pole_state(&self.grid, zeta, &random_profile(&mut rng, self.grid.n_e()))?;
            let mixed = &rho + &anti.scaled(random_complex(&mut rng) * (rho.norm() / anti.norm()));
            let times: Vec<f64> = (0..=10).map(|i| self.grid.snap_time(i as f64 / (4.0 * b))).collect();
            let p = survival(&mixed, &times)?;
            let p0 = p.values()[0];
            for (t, v) in p.iter() {
                let exact = (-2.0 * b * t).exp();
                exponential = exponential.max((v / p0 - exact).abs() / exact);
            }
        }
        Ok([
            Check::within("S3", "W_t rho_xi = exp(-it xi) rho_xi", residual, self.tol.eigen),
            Check::within("S6", "survival of an unstable resonance part is exponential", exponential, self.tol.survival),
        ])
    }

    fn s4_s5_s7(&self) -> CliResult<[Check; 3]> {
        let mut rng = self.rng(13);
        let mut complement: f64 = 0.0;
        let mut negative: f64 = 0.0;
        for s in self.hardy_states(13)? {
            let times: Vec<f64> = (1..=10).map(|i| self.grid.snap_time(0.5 * i as f64)).collect();
            let p = survival(&s, &times)?;
            for (t, v) in p.iter() {
                complement = complement.max((decay_window(&s, 0.0, t)? + v - 1.0).abs());
            }
            let t1 = rng.random_range(-5.0..-0.5);
            negative = negative.max(decay_window(&s, t1, rng.random_range(t1 + 0.1..=0.0))?.abs());
        }
        let mut reduction: f64 = 0.0;
        for s in self.states(14)? {
            let t = self.lattice_time(&mut rng, 0.0, 4.0);
            let direct = project_p(&evolve(&s, t), 0.0);
            let reduced = project_p(&evolve(&project_p(&s, 0.0), t), 0.0);
            reduction = reduction.max((&direct - &reduced).norm() / s.norm());
        }
        Ok([
            Check::within("S4", "decay window plus survival equals 1", complement, self.tol.complementarity),
            Check::within("S5", "P_0 U_t = P_0 U_t P_0", reduction, self.tol.exact),
            Check::within("S7", "no decay during negative times", negative, self.tol.exact),
        ])
    }

    fn u1(&self) -> CliResult<Check> {
        let mut rng = self.rng(15);
        let mut smallest = f64::INFINITY;
        for i in 0..self.samples {
            let (s, m) = physical_state(&mut rng, &self.physical, i % 2 == 1)?;
            smallest = smallest.min(time_stats(&s, Some(&m))?.product);
        }
        Ok(Check::at_least(
            "U1",
            "Delta E * Delta T >= 1/(2 sqrt 2)",
            smallest,
            UNCERTAINTY_BOUND - self.tol.uncertainty,
        ))
    }

    fn h1_p1(&self) -> CliResult<[Check; 3]> {
        let g = self.physical;
        let e = g.e_max();
        let width = e / 80.0;
        let first = e / 4.0;
        let profile = Profile::TwoBump { first, second: 2.0 * first, width };
        let psi = PureState::new(g, profile.sample(&g))?;
        let period = 2.0 * std::f64::consts::PI / first;
        let times: Vec<f64> = (0..=200).map(|i| 1.5 * period * i as f64 / 200.0).collect();
        let hilbert = hilbert_survival(&psi, &times)?;
        let mut lattice: Vec<f64> = times.iter().map(|&t| g.snap_time(t)).collect();
        lattice.dedup();
        let state = lambda_to_nue(&embed_pure(&psi));
        let liouville = survival(&state, &lattice)?;
        let mut excess: f64 = 0.0;
        for s in self.states(16)? {
            let times: Vec<f64> = (0..=10).map(|i| self.grid.snap_time(0.5 * i as f64)).collect();
            let values = survival(&s, &times)?;
            let dw = decay_window(&s, 0.0, 2.0)?;
            excess = excess.max(worst(values.values().iter().chain([&dw]).map(|&p| (p - 1.0).max(-p))));
        }
        Ok([
            Check::at_least("H1", "Hilbert survival of a two-bump state revives", hilbert.max_increase(), 0.1),
            Check::within("H2", "its Liouville survival stays monotone", liouville.max_increase(), self.tol.exact),
            Check::within("P1", "probabilities lie in [0, 1]", excess, self.tol.probability),
        ])
    }
}

/// Runs the full invariant suite on the configured grids.
pub fn run_suite(config: &ScenarioConfig, seed: u64) -> CliResult<Vec<Check>> {
    let suite = Suite {
        grid: config.grid.build()?,
        physical: config.physical.build()?,
        samples: config.samples.max(1),
        seed,
        tol: config.tolerances,
    };
    let mut checks = vec![suite.g1()?, suite.g2(), suite.l1()?];
    let [l2, l4] = suite.l2_l4()?;
    checks.extend([l2, suite.l3()?, l4, suite.t1()?]);
    checks.extend(suite.t2_t4()?);
    checks.extend(suite.t5_t6()?);
    checks.extend(suite.t7_t8()?);
    checks.extend(suite.s1_s2()?);
    let [s3, s6] = suite.s3_s6()?;
    let [s4, s5, s7] = suite.s4_s5_s7()?;
    checks.extend([s3, s4, s5, s6, s7, suite.u1()?]);
    checks.extend(suite.h1_p1()?);
    Ok(checks)
}
