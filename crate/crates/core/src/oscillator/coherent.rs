use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::BasisSpec;
use crate::error::{Error, Result};
use crate::numerics::{inner, norm_sqr, ComplexMatrix, C64};

/// Phase-space point the basis frame is displaced to.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameCenter {
    pub q: f64,
    pub p: f64,
}

impl FrameCenter {
    pub const ORIGIN: Self = Self { q: 0.0, p: 0.0 };

    pub fn new(q: f64, p: f64) -> Self {
        Self { q, p }
    }
}

/// Pure state: amplitudes on the Fock states `D(center)|n>`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub amplitudes: Vec<C64>,
    pub basis: BasisSpec,
    pub center: FrameCenter,
}

impl QuantumState {
    pub fn new(amplitudes: Vec<C64>, basis: BasisSpec, center: FrameCenter) -> Result<Self> {
        basis.validate()?;
        if amplitudes.len() != basis.dim {
            return Err(Error::invalid(alloc::format!(
                "{} amplitudes for a basis of dimension {}",
                amplitudes.len(),
                basis.dim
            )));
        }
        if !amplitudes.iter().all(|z| z.is_finite()) || norm_sqr(&amplitudes) == 0.0 {
            return Err(Error::invalid("state must be finite and nonzero"));
        }
        Ok(Self { amplitudes, basis, center })
    }

    /// Fock state `|n>` of the fixed frame.
    pub fn fock(basis: &BasisSpec, n: usize) -> Result<Self> {
        basis.validate()?;
        if n >= basis.dim {
            return Err(Error::invalid(alloc::format!("Fock level {n} outside dimension {}", basis.dim)));
        }
        let mut amps = vec![C64::new(0.0, 0.0); basis.dim];
        amps[n] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes: amps, basis: *basis, center: FrameCenter::ORIGIN })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::overflow(alloc::format!("cannot normalize state with norm {n}")));
        }
        let inv = 1.0 / n;
        self.amplitudes.iter_mut().for_each(|z| *z *= inv);
        Ok(())
    }

    /// `|psi_{N-1}|^2 + |psi_{N-2}|^2` relative to the norm.
    pub fn tail_weight(&self) -> f64 {
        let n = self.dim();
        (self.amplitudes[n - 1].norm_sqr() + self.amplitudes[n - 2].norm_sqr()) / self.norm_sqr()
    }

    /// Expectation of an operator given in the current frame.
    pub fn expect(&self, op: &ComplexMatrix) -> Result<C64> {
        op.expectation(&self.amplitudes)
    }

    /// `<a>` in the current frame.
    pub fn mean_alpha(&self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for k in 1..self.dim() {
            acc += self.amplitudes[k - 1].conj() * self.amplitudes[k] * (k as f64).sqrt();
        }
        acc / self.norm_sqr()
    }

    /// Lab-frame `(<x>, <p>)`.
    pub fn mean_phase_point(&self) -> (f64, f64) {
        let (dq, dp) = self.basis.phase_point(self.mean_alpha());
        (self.center.q + dq, self.center.p + dp)
    }

    /// `|<self|other>|^2` for normalized states in the same frame.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() || self.center != other.center || self.basis != other.basis {
            return Err(Error::invalid("fidelity needs states in the same basis and frame"));
        }
        Ok(inner(&self.amplitudes, &other.amplitudes).norm_sqr() / (self.norm_sqr() * other.norm_sqr()))
    }

    /// `|psi><psi|` normalized to unit trace.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes).scale_real(1.0 / self.norm_sqr())
    }

    /// Moves the frame to `center` by applying `D(old - new)`. Global phases
    /// from composing displacements are dropped.
    pub fn reframe(&self, center: FrameCenter) -> Result<Self> {
        let shift = self.basis.alpha(self.center.q - center.q, self.center.p - center.p);
        if shift == C64::new(0.0, 0.0) {
            return Ok(Self { center, ..self.clone() });
        }
        let d = displacement_alpha(&self.basis, shift)?;
        let amplitudes = d.matvec(&self.amplitudes)?;
        let mut out = Self { amplitudes, basis: self.basis, center };
        out.normalize()?;
        Ok(out)
    }

    pub fn to_fixed_frame(&self) -> Result<Self> {
        self.reframe(FrameCenter::ORIGIN)
    }
}

/// Truncated coherent-state amplitudes, normalized within the basis.
pub fn coherent_amplitudes(basis: &BasisSpec, alpha: C64) -> Result<Vec<C64>> {
    basis.check_alpha(alpha)?;
    let mut c = Vec::with_capacity(basis.dim);
    c.push(C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0));
    for n in 1..basis.dim {
        let prev = c[n - 1];
        c.push(prev * alpha / (n as f64).sqrt());
    }
    let inv = 1.0 / norm_sqr(&c).sqrt();
    c.iter_mut().for_each(|z| *z *= inv);
    Ok(c)
}

/// Coherent state `|q, p>` in the fixed frame.
pub fn coherent_state(basis: &BasisSpec, q: f64, p: f64) -> Result<QuantumState> {
    basis.validate()?;
    let amplitudes = coherent_amplitudes(basis, basis.alpha(q, p))?;
    Ok(QuantumState { amplitudes, basis: *basis, center: FrameCenter::ORIGIN })
}

/// Displacement operator `D(q, p) = exp(alpha a^dagger - alpha* a)`,
/// projected onto the basis: entries are the exact infinite-dimensional
/// matrix elements, so it is unitary up to truncation.
pub fn displacement(basis: &BasisSpec, q: f64, p: f64) -> Result<ComplexMatrix> {
    basis.validate()?;
    displacement_alpha(basis, basis.alpha(q, p))
}

/// [`displacement`] by a ladder amplitude.
///
/// For `m >= n`, `<m|D|n> = sqrt(n!/m!) alpha^(m-n) e^(-|alpha|^2/2)
/// L_n^(m-n)(|alpha|^2)`; the other triangle uses `-alpha*`.
pub fn displacement_alpha(basis: &BasisSpec, alpha: C64) -> Result<ComplexMatrix> {
    basis.check_alpha(alpha)?;
    let n = basis.dim;
    if alpha == C64::new(0.0, 0.0) {
        return Ok(ComplexMatrix::identity(n));
    }
    let x = alpha.norm_sqr();
    let (r, theta) = alpha.to_polar();
    let ln_r = r.ln();
    let mut ln_fact = vec![0.0; n];
    for k in 1..n {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let mut d = ComplexMatrix::zeros(n, n);
    let mut lag = vec![0.0; n];
    for k in 0..n {
        laguerre_column(k, x, &mut lag[..n - k]);
        // Lower triangle phase e^{ik theta}; upper triangle (-alpha*)^k.
        let lower = C64::from_polar(1.0, k as f64 * theta);
        let upper = C64::from_polar(1.0, k as f64 * (core::f64::consts::PI - theta));
        for j in 0..n - k {
            let mag = (0.5 * (ln_fact[j] - ln_fact[j + k]) + k as f64 * ln_r - 0.5 * x).exp() * lag[j];
            d[(j + k, j)] = lower * mag;
            if k > 0 {
                d[(j, j + k)] = upper * mag;
            }
        }
    }
    if !d.is_finite() {
        return Err(Error::overflow("displacement matrix elements overflowed"));
    }
    Ok(d)
}

/// `out[j] = L_j^(k)(x)` by forward recurrence.
fn laguerre_column(k: usize, x: f64, out: &mut [f64]) {
    let kf = k as f64;
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = 1.0 + kf - x;
    }
    for j in 1..out.len().saturating_sub(1) {
        let jf = j as f64;
        out[j + 1] = ((2.0 * jf + 1.0 + kf - x) * out[j] - (jf + kf) * out[j - 1]) / (jf + 1.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::HermitianEigen;
    use crate::oscillator::{ladder, position_op};

    /// exp(alpha a^dagger - alpha* a) by diagonalizing the generator in a
    /// larger basis, then cutting out the leading block.
    fn displacement_oracle(basis: &BasisSpec, alpha: C64, enlarge: usize) -> ComplexMatrix {
        let big = BasisSpec { dim: basis.dim * enlarge, ..*basis };
        let a = ladder(&big);
        // G = alpha a^dag - alpha* a is anti-Hermitian; -iG is Hermitian.
        let mut g = a.dagger().scale(alpha);
        g.axpy(-alpha.conj(), &a);
        let h = g.scale(C64::new(0.0, -1.0));
        let eig = HermitianEigen::new(&h).unwrap();
        let v = &eig.vectors;
        let phases: Vec<C64> = eig.values.iter().map(|&l| C64::from_polar(1.0, l)).collect();
        let mut vd = v.clone();
        for i in 0..vd.rows() {
            for j in 0..vd.cols() {
                vd[(i, j)] *= phases[j];
            }
        }
        (&vd * &v.dagger()).leading_block(basis.dim)
    }

    #[test]
    fn origin_is_vacuum_and_identity() {
        let b = BasisSpec::new(16, 0.05).unwrap();
        let s = coherent_state(&b, 0.0, 0.0).unwrap();
        assert_eq!(s, QuantumState::fock(&b, 0).unwrap());
        assert_eq!(displacement(&b, 0.0, 0.0).unwrap(), ComplexMatrix::identity(16));
    }

    #[test]
    fn coherent_means() {
        let b = BasisSpec::new(40, 0.05).unwrap();
        let s = coherent_state(&b, 0.7, -0.4).unwrap();
        let (q, p) = s.mean_phase_point();
        assert!((q - 0.7).abs() < 1e-10 && (p + 0.4).abs() < 1e-10, "{q} {p}");
        assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
        let x = position_op(&b);
        assert!((s.expect(&x).unwrap().re - 0.7).abs() < 1e-10);
    }

    #[test]
    fn truncation_guard() {
        let b = BasisSpec::new(8, 0.05).unwrap();
        // |alpha|^2 = q^2 / (2 hbar) = 2 = N/4.
        let q = (2.0f64 * 2.0 * 0.05).sqrt();
        assert!(matches!(coherent_state(&b, 1.0001 * q, 0.0), Err(Error::TruncationUnsafe { .. })));
        assert!(matches!(displacement(&b, 1.0001 * q, 0.0), Err(Error::TruncationUnsafe { .. })));
        assert!(coherent_state(&b, 0.99 * q, 0.0).is_ok());
        assert!(coherent_state(&b, 1.0001 * q, 0.0).is_err());
    }

    #[test]
    fn displacement_matches_exponential_oracle() {
        let b = BasisSpec::new(24, 0.1).unwrap();
        for &(q, p) in &[(0.3, 0.0), (-0.5, 0.6), (0.7, -0.6)] {
            let alpha = b.alpha(q, p);
            let d = displacement(&b, q, p).unwrap();
            let oracle = displacement_oracle(&b, alpha, 4);
            assert!(d.max_abs_diff(&oracle) < 1e-10, "({q},{p}): {}", d.max_abs_diff(&oracle));
        }
    }

    #[test]
    fn displaced_vacuum_is_coherent_state() {
        let b = BasisSpec::new(40, 0.05).unwrap();
        let d = displacement(&b, 0.5, 0.3).unwrap();
        let col = d.column(0);
        let s = coherent_state(&b, 0.5, 0.3).unwrap();
        let diff = col.iter().zip(&s.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-10);
    }

    #[test]
    fn group_inverse_and_shift_on_inner_block() {
        let b = BasisSpec::new(48, 0.05).unwrap();
        let (q, p) = (0.3, -0.2);
        let d = displacement(&b, q, p).unwrap();
        let dinv = displacement(&b, -q, -p).unwrap();
        let half = b.dim / 2;
        let prod = (&d * &dinv).leading_block(half);
        assert!(prod.max_abs_diff(&ComplexMatrix::identity(half)) < 1e-8);

        let x = position_op(&b);
        let shifted = (&(&d.dagger() * &x) * &d).leading_block(half);
        let mut expected = x.leading_block(half);
        expected.add_identity(C64::new(q, 0.0));
        assert!(shifted.max_abs_diff(&expected) < 1e-6, "{}", shifted.max_abs_diff(&expected));
    }

    #[test]
    fn reframe_round_trip() {
        let b = BasisSpec::new(40, 0.05).unwrap();
        let s = coherent_state(&b, 0.4, 0.2).unwrap();
        let moved = s.reframe(FrameCenter::new(0.4, 0.2)).unwrap();
        assert!(moved.fidelity(&QuantumState { center: FrameCenter::new(0.4, 0.2), ..QuantumState::fock(&b, 0).unwrap() }).unwrap() > 1.0 - 1e-10);
        let back = moved.to_fixed_frame().unwrap();
        assert!(back.fidelity(&s).unwrap() > 1.0 - 1e-10);
        let (q, p) = moved.mean_phase_point();
        assert!((q - 0.4).abs() < 1e-10 && (p - 0.2).abs() < 1e-10);
    }
}
