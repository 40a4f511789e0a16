use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::unravel::{jump_sum, UnravelingSpec};
use crate::classical::{DuffingParams, PhasePoint, SectionCloud, StrobeClock};
use crate::error::{Error, Result};
use crate::numerics::integrate::rk4_unchecked;
use crate::numerics::{complex_wiener_increment, inner, norm_sqr, BandMatrix, ComplexMatrix, RngStream, C64};
use crate::oscillator::{BasisSpec, DrivenHamiltonian, DuffingOperators, FrameCenter, QuantumState};

/// Default bound on `|psi_{N-1}|^2 + |psi_{N-2}|^2`. Anharmonic evolution
/// leaks weight into high Fock levels even for well-localized states, so the
/// default is loose; tighten it together with a larger basis.
pub const DEFAULT_TRUNCATION_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    /// `|psi|^2 - 1` before renormalization.
    pub norm_drift: f64,
    pub tail_weight: f64,
}

/// RK4 is stable on the imaginary axis up to `2 sqrt 2`. The Gershgorin
/// bound it is compared with already overestimates the spectral radius.
const RK4_STABILITY: f64 = 2.0 * core::f64::consts::SQRT_2;

/// QSD equation in one fixed frame:
///
/// ```text
/// d psi = -(i/hbar) H psi dt
///       + sum_k (<L_k^dagger> L_k - L_k^dagger L_k / 2 - |<L_k>|^2 / 2) psi dt
///       + sum_k (L_k - <L_k>) psi d xi_k
/// ```
///
/// The drift is advanced with RK4 and the noise with one Euler-Maruyama
/// increment evaluated at the start of the step.
#[derive(Debug, Clone)]
pub struct QsdEquation {
    /// `-(i/hbar) H_0 - sum L^dagger L / 2`
    linear: BandMatrix,
    /// `-(i/hbar) H_1` and its frequency.
    drive: Option<(BandMatrix, f64)>,
    jumps: Vec<BandMatrix>,
    jump_norm: f64,
    stiffness: f64,
    truncation_tolerance: f64,
}

impl QsdEquation {
    pub fn new(h: DrivenHamiltonian, jumps: Vec<ComplexMatrix>, hbar: f64) -> Result<Self> {
        let n = h.dim();
        if !(hbar > 0.0) {
            return Err(Error::invalid(alloc::format!("hbar must be > 0, got {hbar}")));
        }
        if jumps.iter().any(|l| l.rows() != n || l.cols() != n) {
            return Err(Error::invalid("jump operator shape differs from Hamiltonian"));
        }
        let sum = jump_sum(&jumps, n);
        let mut linear = h.static_part.scale(C64::new(0.0, -1.0 / hbar));
        linear.axpy_real(-0.5, &sum);
        let linear = BandMatrix::from_dense(&linear);
        let drive = h.drive.as_ref().map(|(op, w)| (BandMatrix::from_dense(&op.scale(C64::new(0.0, -1.0 / hbar))), *w));
        let stiffness = linear.gershgorin_radius() + drive.as_ref().map_or(0.0, |(d, _)| d.gershgorin_radius());
        Ok(Self {
            linear,
            drive,
            jumps: jumps.iter().map(BandMatrix::from_dense).collect(),
            jump_norm: sum.max_abs(),
            stiffness,
            truncation_tolerance: DEFAULT_TRUNCATION_TOLERANCE,
        })
    }

    /// `h` must already be expressed in the frame at `center`.
    pub fn for_frame(h: DrivenHamiltonian, spec: &UnravelingSpec, basis: &BasisSpec, center: FrameCenter) -> Result<Self> {
        if h.dim() != basis.dim {
            return Err(Error::invalid("Hamiltonian dimension differs from basis"));
        }
        let jumps = spec.lindblad_operators(basis, center)?;
        Self::new(h, jumps, spec.hbar)
    }

    pub fn with_truncation_tolerance(mut self, tol: f64) -> Self {
        self.truncation_tolerance = tol;
        self
    }

    /// `max |sum_k L_k^dagger L_k|`, the scale of the noise terms.
    pub fn jump_norm(&self) -> f64 {
        self.jump_norm
    }

    /// Largest step the RK4 drift integration accepts in this frame.
    pub fn max_stable_dt(&self) -> f64 {
        RK4_STABILITY / self.stiffness
    }

    fn drift(&self, t: f64, psi: &Vec<C64>) -> Vec<C64> {
        let n = psi.len();
        let one = C64::new(1.0, 0.0);
        let inv_norm = 1.0 / norm_sqr(psi);
        let mut out = vec![C64::new(0.0, 0.0); n];
        self.linear.matvec_acc(psi, one, &mut out);
        if let Some((g, w)) = &self.drive {
            let c = (w * t).cos();
            if c != 0.0 {
                g.matvec_acc(psi, C64::new(c, 0.0), &mut out);
            }
        }
        let mut lpsi = vec![C64::new(0.0, 0.0); n];
        for l in &self.jumps {
            lpsi.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            l.matvec_acc(psi, one, &mut lpsi);
            let mean = inner(psi, &lpsi) * inv_norm;
            let shift = -0.5 * mean.norm_sqr();
            let conj = mean.conj();
            for ((o, lp), p) in out.iter_mut().zip(&lpsi).zip(psi) {
                *o += conj * lp + p * shift;
            }
        }
        out
    }

    /// Advances `psi` (normalized, in this equation's frame) by one step.
    pub fn step(&self, psi: &mut QuantumState, t: f64, dt: f64, rng: &mut RngStream) -> Result<StepReport> {
        let n = psi.dim();
        if n != self.linear.dim() {
            return Err(Error::invalid("state dimension differs from the equation"));
        }
        if dt > self.max_stable_dt() {
            return Err(Error::invalid(alloc::format!(
                "time step {dt} exceeds the RK4 stability limit {} of this frame",
                self.max_stable_dt()
            )));
        }
        // Noise directions (L - <L>) psi at the start of the step.
        let mut kicks: Vec<Vec<C64>> = Vec::with_capacity(self.jumps.len());
        for l in &self.jumps {
            let mut lpsi = vec![C64::new(0.0, 0.0); n];
            l.matvec_acc(&psi.amplitudes, C64::new(1.0, 0.0), &mut lpsi);
            let mean = inner(&psi.amplitudes, &lpsi) / psi.norm_sqr();
            for (lp, p) in lpsi.iter_mut().zip(&psi.amplitudes) {
                *lp -= mean * p;
            }
            kicks.push(lpsi);
        }
        let mut f = |t: f64, y: &Vec<C64>| self.drift(t, y);
        let mut next = rk4_unchecked(&mut f, &psi.amplitudes, t, dt);
        for kick in &kicks {
            let dxi = complex_wiener_increment(rng, dt)?;
            for (y, k) in next.iter_mut().zip(kick) {
                *y += k * dxi;
            }
        }
        let n2 = norm_sqr(&next);
        if !n2.is_finite() || n2 == 0.0 {
            return Err(Error::overflow(alloc::format!("QSD state diverged at t = {t}")));
        }
        psi.amplitudes = next;
        psi.normalize()?;
        let tail = psi.tail_weight();
        if tail > self.truncation_tolerance {
            return Err(Error::TruncationOverflow { tail, tolerance: self.truncation_tolerance });
        }
        Ok(StepReport { norm_drift: n2 - 1.0, tail_weight: tail })
    }
}

/// One QSD step with `h` given in the frame of `psi`.
pub fn qsd_step(
    psi: &QuantumState,
    h: &DrivenHamiltonian,
    spec: &UnravelingSpec,
    t: f64,
    dt: f64,
    rng: &mut RngStream,
) -> Result<QuantumState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid(alloc::format!("time step must be > 0, got {dt}")));
    }
    let eq = QsdEquation::for_frame(h.clone(), spec, &psi.basis, psi.center)?;
    let mut out = psi.clone();
    out.normalize()?;
    eq.step(&mut out, t, dt, rng)?;
    Ok(out)
}

/// Moves the frame onto `(<x>, <p>)`; physical expectations are unchanged.
pub fn recenter(psi: &QuantumState) -> Result<QuantumState> {
    let (q, p) = psi.mean_phase_point();
    psi.reframe(FrameCenter::new(q, p)).map_err(|e| match e {
        Error::TruncationUnsafe { norm_sqr, bound } => Error::TruncationOverflow { tail: norm_sqr, tolerance: bound },
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionOptions {
    /// Recenter when `|<a>| > threshold * sqrt(N)`; `None` keeps the
    /// initial frame.
    pub recenter_threshold: Option<f64>,
    pub truncation_tolerance: f64,
}

impl Default for SectionOptions {
    fn default() -> Self {
        Self { recenter_threshold: Some(0.1), truncation_tolerance: DEFAULT_TRUNCATION_TOLERANCE }
    }
}

/// A QSD trajectory of the driven Duffing oscillator in a moving frame.
#[derive(Debug, Clone)]
pub struct DuffingTrajectory {
    ops: DuffingOperators,
    params: DuffingParams,
    spec: UnravelingSpec,
    options: SectionOptions,
    clock: StrobeClock,
    eq: QsdEquation,
    pub state: QuantumState,
    step: usize,
    recenterings: usize,
}

impl DuffingTrajectory {
    pub fn new(
        psi0: &QuantumState,
        params: &DuffingParams,
        spec: &UnravelingSpec,
        dt: f64,
        options: SectionOptions,
    ) -> Result<Self> {
        params.validate()?;
        spec.check_basis(&psi0.basis)?;
        let ops = DuffingOperators::new(&psi0.basis);
        let clock = StrobeClock::new(params, 0.0, dt)?;
        let mut state = psi0.clone();
        state.normalize()?;
        let eq = Self::frame_equation(&ops, params, spec, &options, state.center)?;
        Ok(Self { ops, params: *params, spec: *spec, options, clock, eq, state, step: 0, recenterings: 0 })
    }

    fn frame_equation(
        ops: &DuffingOperators,
        params: &DuffingParams,
        spec: &UnravelingSpec,
        options: &SectionOptions,
        center: FrameCenter,
    ) -> Result<QsdEquation> {
        let h = spec.duffing_hamiltonian(ops, params, center);
        Ok(QsdEquation::for_frame(h, spec, ops.basis(), center)?.with_truncation_tolerance(options.truncation_tolerance))
    }

    pub fn clock(&self) -> &StrobeClock {
        &self.clock
    }

    pub fn time(&self) -> f64 {
        self.clock.time(self.step)
    }

    pub fn recenterings(&self) -> usize {
        self.recenterings
    }

    pub fn step(&mut self, rng: &mut RngStream) -> Result<StepReport> {
        let report = self.eq.step(&mut self.state, self.clock.time(self.step), self.clock.dt, rng)?;
        self.step += 1;
        if let Some(threshold) = self.options.recenter_threshold {
            if self.state.mean_alpha().norm() > threshold * (self.state.dim() as f64).sqrt() {
                self.state = recenter(&self.state)?;
                self.eq = Self::frame_equation(&self.ops, &self.params, &self.spec, &self.options, self.state.center)?;
                self.recenterings += 1;
            }
        }
        Ok(report)
    }

    /// Runs to the next strobe time.
    pub fn advance_period(&mut self, rng: &mut RngStream) -> Result<()> {
        let s = self.clock.steps_per_period;
        let target = (self.step / s + 1) * s;
        while self.step < target {
            self.step(rng)?;
        }
        Ok(())
    }

    pub fn phase_point(&self) -> PhasePoint {
        let (x, p) = self.state.mean_phase_point();
        PhasePoint::new(x, p, self.time())
    }
}

/// Strobe samples `(<x>, <p>)` of one QSD trajectory, with the default
/// moving-frame policy.
pub fn qsd_section(
    psi0: &QuantumState,
    params: &DuffingParams,
    spec: &UnravelingSpec,
    n_points: usize,
    skip: usize,
    dt: f64,
    rng: &mut RngStream,
) -> Result<SectionCloud> {
    qsd_section_with(psi0, params, spec, n_points, skip, dt, rng, SectionOptions::default())
}

#[allow(clippy::too_many_arguments)]
pub fn qsd_section_with(
    psi0: &QuantumState,
    params: &DuffingParams,
    spec: &UnravelingSpec,
    n_points: usize,
    skip: usize,
    dt: f64,
    rng: &mut RngStream,
    options: SectionOptions,
) -> Result<SectionCloud> {
    if n_points == 0 {
        return Err(Error::invalid("n_points must be >= 1"));
    }
    let mut traj = DuffingTrajectory::new(psi0, params, spec, dt, options)?;
    let mut points = Vec::with_capacity(n_points);
    for period in 0..skip + n_points {
        traj.advance_period(rng)?;
        if period >= skip {
            points.push(traj.phase_point());
        }
    }
    Ok(SectionCloud { points, params: *params, transient_skip: skip })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::{coherent_amplitudes, coherent_state, number_op};
    use core::f64::consts::PI;

    fn harmonic(b: &BasisSpec) -> DrivenHamiltonian {
        let mut h = number_op(b);
        h.add_identity(C64::new(0.5, 0.0));
        DrivenHamiltonian::constant(h.scale_real(b.hbar * b.omega_ref))
    }

    #[test]
    fn closed_harmonic_motion_rotates_coherent_state() {
        let b = BasisSpec::new(30, 0.1).unwrap();
        let spec = UnravelingSpec::zero_temperature(0.0, 0.1);
        let eq = QsdEquation::for_frame(harmonic(&b), &spec, &b, FrameCenter::ORIGIN).unwrap();
        let alpha0 = C64::new(1.2, 0.4);
        let mut psi = QuantumState::new(coherent_amplitudes(&b, alpha0).unwrap(), b, FrameCenter::ORIGIN).unwrap();
        let mut rng = RngStream::new(1, 0);
        let steps = 1000;
        let dt = 2.0 * PI / steps as f64;
        for period in 1..=3 {
            for k in 0..steps {
                eq.step(&mut psi, k as f64 * dt, dt, &mut rng).unwrap();
            }
            let expected = QuantumState::new(coherent_amplitudes(&b, alpha0).unwrap(), b, FrameCenter::ORIGIN).unwrap();
            let f = psi.fidelity(&expected).unwrap();
            assert!(f > 1.0 - 1e-6 * period as f64, "period {period}: {f}");
        }
    }

    #[test]
    fn damped_coherent_state_follows_exponential_decay() {
        let b = BasisSpec::new(16, 0.1).unwrap();
        let gamma = 0.125;
        let spec = UnravelingSpec::zero_temperature(gamma, 0.1);
        let alpha0 = C64::new(0.8, -0.6);
        let dt = 2.0 * PI / 1000.0;
        for seed in 0..3 {
            let mut rng = RngStream::new(seed, 0);
            let mut psi = QuantumState::new(coherent_amplitudes(&b, alpha0).unwrap(), b, FrameCenter::ORIGIN).unwrap();
            let h = DrivenHamiltonian::zero(16);
            let mut t = 0.0;
            while t < 5.0 {
                psi = qsd_step(&psi, &h, &spec, t, dt, &mut rng).unwrap();
                t += dt;
                let err = (psi.mean_alpha() - alpha0 * (-gamma * t).exp()).norm();
                assert!(err < 1e-3, "seed {seed} t {t}: {err}");
            }
        }
    }

    #[test]
    fn mean_norm_drift_is_second_order() {
        let b = BasisSpec::new(40, 0.1).unwrap();
        let spec = UnravelingSpec::finite_temperature(0.2, 0.05, 0.1);
        let eq = QsdEquation::for_frame(harmonic(&b), &spec, &b, FrameCenter::ORIGIN).unwrap();
        let mut psi = QuantumState::fock(&b, 2).unwrap();
        let mut rng = RngStream::new(5, 0);
        let dt = 1e-3;
        let steps = 20000;
        let mut drift = 0.0;
        for k in 0..steps {
            drift += eq.step(&mut psi, k as f64 * dt, dt, &mut rng).unwrap().norm_drift;
        }
        let bound = 10.0 * dt * dt * eq.jump_norm();
        let mean = drift / steps as f64;
        assert!(mean.abs() < bound, "{mean} vs {bound}");
    }

    #[test]
    fn recentering_preserves_expectations() {
        let b = BasisSpec::new(40, 0.05).unwrap();
        let params = DuffingParams::default();
        let ops = DuffingOperators::new(&b);
        let centred = coherent_state(&b, 0.0, 0.0).unwrap();
        assert_eq!(recenter(&centred).unwrap(), centred);

        let psi = coherent_state(&b, 0.35, -0.2).unwrap();
        let moved = recenter(&psi).unwrap();
        assert!((moved.center.q - 0.35).abs() < 1e-12 && (moved.center.p + 0.2).abs() < 1e-12);
        assert!(moved.amplitudes[0].norm_sqr() > 1.0 - 1e-8);

        // Squeezed-ish superposition so <H> is not trivial.
        let mut amps = psi.amplitudes.clone();
        amps[1] += C64::new(0.3, 0.1);
        let mut odd = QuantumState::new(amps, b, FrameCenter::ORIGIN).unwrap();
        odd.normalize().unwrap();
        let after = recenter(&odd).unwrap();
        let (x0, p0) = odd.mean_phase_point();
        let (x1, p1) = after.mean_phase_point();
        assert!((x0 - x1).abs() < 1e-8 && (p0 - p1).abs() < 1e-8);
        let e0 = odd.expect(&ops.hamiltonian(&params, odd.center).at(0.0)).unwrap().re;
        let e1 = after.expect(&ops.hamiltonian(&params, after.center).at(0.0)).unwrap().re;
        assert!((e0 - e1).abs() < 1e-8, "{e0} vs {e1}");
    }

    #[test]
    fn truncation_overflow_is_reported() {
        let b = BasisSpec::new(6, 0.1).unwrap();
        let spec = UnravelingSpec::zero_temperature(0.0, 0.1);
        let eq = QsdEquation::for_frame(harmonic(&b), &spec, &b, FrameCenter::ORIGIN).unwrap();
        let mut psi = QuantumState::fock(&b, 5).unwrap();
        let mut rng = RngStream::new(0, 0);
        assert!(matches!(eq.step(&mut psi, 0.0, 1e-3, &mut rng), Err(Error::TruncationOverflow { .. })));
        let strict = eq.clone().with_truncation_tolerance(1e-12);
        let mut near = QuantumState::fock(&b, 3).unwrap();
        near.amplitudes[4] = C64::new(1e-3, 0.0);
        assert!(strict.step(&mut near, 0.0, 1e-3, &mut rng).is_err());
    }

    #[test]
    fn section_is_reproducible_and_stays_in_well() {
        let b = BasisSpec::new(32, 0.05).unwrap();
        let params = DuffingParams { damping: 0.0, drive_amplitude: 0.0, hbar: 0.05, ..DuffingParams::default() };
        let spec = UnravelingSpec::zero_temperature(0.0, 0.05);
        // Harmonic ground state of the right well: curvature 2, so a
        // coherent state squeezed by 2^(1/4) in x; approximated here by the
        // frame vacuum at x = 1.
        let psi0 = QuantumState { center: FrameCenter::new(1.0, 0.0), ..QuantumState::fock(&b, 0).unwrap() };
        let run = |seed| {
            let mut rng = RngStream::new(seed, 0);
            qsd_section(&psi0, &params, &spec, 5, 0, 2.0 * PI / 1000.0, &mut rng).unwrap()
        };
        let a = run(7);
        assert_eq!(a, run(7));
        for pt in &a.points {
            assert!((pt.x - 1.0).abs() < 3.0 * 0.05f64.sqrt() && pt.p.abs() < 3.0 * 0.05f64.sqrt(), "{pt:?}");
        }
    }

    #[test]
    fn noisy_section_is_deterministic_per_seed() {
        let b = BasisSpec::new(40, 0.05).unwrap();
        let params = DuffingParams { hbar: 0.05, ..DuffingParams::default() };
        let spec = UnravelingSpec::from_params(&params, super::super::UnravelingMode::ZeroTemperature);
        let psi0 = coherent_state(&b, 0.5, 0.0).unwrap();
        let run = |seed| {
            let mut rng = RngStream::new(seed, 3);
            qsd_section(&psi0, &params, &spec, 3, 0, 2.0 * PI / 2000.0, &mut rng).unwrap()
        };
        assert_eq!(run(11), run(11));
        assert_ne!(run(11), run(12));
    }
}
