//! Figures of merit: state fidelity, the closed-form two-qubit state of the
//! flip-flop dynamics, its reduced-matrix entries, and two concurrence
//! definitions (Wootters and the closed-form expression, which is
//! the squared concurrence on this state family).

use nalgebra::SymmetricEigen;
#[allow(unused_imports)] // float math without std
use num_traits::Float;

use crate::qcore::{DensityMatrix, StateVector};
use crate::{CMatrix, Error, Result, C64};

/// Hermiticity tolerance of a [`QubitRho`].
pub const QUBIT_HERMITIAN_TOL: f64 = 1e-9;
/// Largest trace deficit accepted by [`concurrence_wootters`].
pub const WOOTTERS_DEFICIT_LIMIT: f64 = 1e-6;
/// Largest trace deficit that [`QubitRho::renormalized`] will hide.
pub const RENORMALIZE_DEFICIT_LIMIT: f64 = 1e-3;

/// Two-qubit density matrix over `{|gg>, |gf>, |fg>, |ff>}` plus the
/// population that did not land in that block.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitRho {
    matrix: CMatrix,
    trace_deficit: f64,
}

impl QubitRho {
    pub(crate) fn from_block(matrix: CMatrix, total_trace: f64) -> Self {
        let tr: f64 = matrix.diagonal().iter().map(|z| z.re).sum();
        QubitRho {
            matrix,
            trace_deficit: total_trace - tr,
        }
    }

    /// A normalized two-qubit matrix; rejects non-Hermitian or off-trace input.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != 4 || matrix.ncols() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: matrix.nrows(),
            });
        }
        let herm = crate::qcore::state_hermiticity(&matrix);
        if !(herm <= QUBIT_HERMITIAN_TOL) {
            return Err(Error::NotHermitian { deviation: herm });
        }
        let tr: f64 = matrix.diagonal().iter().map(|z| z.re).sum();
        if !((tr - 1.0).abs() <= crate::qcore::TRACE_TOL) {
            return Err(Error::InvalidDensity {
                reason: "trace differs from 1",
                value: tr,
            });
        }
        Ok(QubitRho {
            matrix,
            trace_deficit: 1.0 - tr,
        })
    }

    /// `|k><k|` for a two-qubit ket over `{gg, gf, fg, ff}`.
    pub fn from_ket(ket: &[C64; 4]) -> Self {
        let mut m = CMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = ket[i] * ket[j].conj();
            }
        }
        let tr: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        QubitRho {
            matrix: m,
            trace_deficit: 1.0 - tr,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// Rescales to unit trace when the deficit is at most `1e-3`.
    pub fn renormalized(&self) -> Result<Self> {
        if !(self.trace_deficit.abs() <= RENORMALIZE_DEFICIT_LIMIT) {
            return Err(Error::ExcessLeakage {
                deficit: self.trace_deficit,
                limit: RENORMALIZE_DEFICIT_LIMIT,
            });
        }
        Ok(QubitRho {
            matrix: self.matrix.unscale(self.trace()),
            trace_deficit: 0.0,
        })
    }

    /// The `{gf, fg}` block scaled by 4, i.e. the entries `(a, b, c, d)` of
    /// `rho = (1/4) [[0,0,0,0],[0,a,b,0],[0,c,d,0],[0,0,0,0]]`.
    pub fn flip_flop_entries(&self) -> FlipFlopEntries {
        FlipFlopEntries {
            a: self.matrix[(1, 1)] * 4.0,
            b: self.matrix[(1, 2)] * 4.0,
            c: self.matrix[(2, 1)] * 4.0,
            d: self.matrix[(2, 2)] * 4.0,
        }
    }
}

/// Initial weights `alpha |gf> + beta |fg>` and flip-flop rate `lambda = Omega^2 / Delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EntanglementParams {
    pub alpha: C64,
    pub beta: C64,
    pub lambda: f64,
}

impl EntanglementParams {
    pub fn new(alpha: C64, beta: C64, lambda: f64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(Error::NotNormalized { norm: norm.sqrt() });
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
            });
        }
        Ok(EntanglementParams { alpha, beta, lambda })
    }

    /// Real weights with `alpha / beta = r`.
    pub fn from_ratio(r: f64, lambda: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidParameter { name: "r", value: r });
        }
        let n = (1.0 + r * r).sqrt();
        Self::new(C64::new(r / n, 0.0), C64::new(1.0 / n, 0.0), lambda)
    }

    /// `alpha / beta`, undefined when `beta = 0`.
    pub fn ratio(&self) -> Option<C64> {
        (self.beta.norm() > 0.0).then(|| self.alpha / self.beta)
    }

    fn real_weights(&self) -> Result<(f64, f64)> {
        if self.alpha.im.abs() > 1e-12 || self.beta.im.abs() > 1e-12 {
            return Err(Error::ComplexWeights);
        }
        Ok((self.alpha.re, self.beta.re))
    }
}

/// Reduced-matrix entries `(a, b, c, d)`; see [`QubitRho::flip_flop_entries`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipFlopEntries {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

/// `<target|rho|target>`, clamped into `[0, 1]`.
pub fn fidelity(target: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    let f = rho.expectation_in(target)?;
    Ok(f.re.clamp(0.0, 1.0))
}

/// `|<target|psi>|^2`.
pub fn fidelity_pure(target: &StateVector, psi: &StateVector) -> Result<f64> {
    Ok(target.inner(psi)?.norm_sqr().clamp(0.0, 1.0))
}

/// Flip-flop evolved state
/// `e^{-i lambda t / 2} [(alpha cos + i beta sin)|gf> + (i alpha sin + beta cos)|fg>]`
/// with both trig functions at `lambda t / 2`, over `{gg, gf, fg, ff}`.
pub fn flip_flop_state(p: &EntanglementParams, t: f64) -> [C64; 4] {
    let half = 0.5 * p.lambda * t;
    let (s, c) = half.sin_cos();
    let i = C64::i();
    let global = C64::from_polar(1.0, -half);
    let zero = C64::new(0.0, 0.0);
    [
        zero,
        global * (p.alpha * c + i * p.beta * s),
        global * (i * p.alpha * s + p.beta * c),
        zero,
    ]
}

/// Entries computed from the evolved state itself. With real weights
/// `b = 4 alpha beta - 2 i (alpha^2 - beta^2) sin(lambda t)`.
pub fn flip_flop_block(p: &EntanglementParams, t: f64) -> Result<FlipFlopEntries> {
    p.real_weights()?;
    Ok(QubitRho::from_ket(&flip_flop_state(p, t)).flip_flop_entries())
}

/// The entries as printed in closed form, with `+2i` in `b` and `-2i` in `c`.
///
/// Complex conjugate of [`flip_flop_block`] in the off-diagonals; both
/// concurrence definitions are unaffected.
pub fn flip_flop_block_conjugate(p: &EntanglementParams, t: f64) -> Result<FlipFlopEntries> {
    let (alpha, beta) = p.real_weights()?;
    let lt = p.lambda * t;
    let sum = alpha * alpha + beta * beta;
    let diff = alpha * alpha - beta * beta;
    Ok(FlipFlopEntries {
        a: C64::new(2.0 * sum + 2.0 * diff * lt.cos(), 0.0),
        b: C64::new(4.0 * alpha * beta, 2.0 * diff * lt.sin()),
        c: C64::new(4.0 * alpha * beta, -2.0 * diff * lt.sin()),
        d: C64::new(2.0 * sum - 2.0 * diff * lt.cos(), 0.0),
    })
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)`.
///
/// With `rho = W W^dag` (`W = V sqrt(P)` from the eigendecomposition), the
/// `l_k` are the singular values of `W^T (sy x sy) W`; this equals the usual
/// square roots of the spectrum of `sqrt(rho) rho~ sqrt(rho)` but keeps full
/// precision on rank-deficient states. Eigenvalues below `1e-13` of the
/// largest are treated as zero.
pub fn concurrence_wootters(rho: &QubitRho) -> Result<f64> {
    if !(rho.trace_deficit.abs() <= WOOTTERS_DEFICIT_LIMIT) {
        return Err(Error::ExcessLeakage {
            deficit: rho.trace_deficit,
            limit: WOOTTERS_DEFICIT_LIMIT,
        });
    }
    let m = (&rho.matrix + rho.matrix.adjoint()).unscale(2.0);
    let eig = SymmetricEigen::new(m);
    let p_max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let mut w = eig.eigenvectors.clone();
    for (mut col, &p) in w.column_iter_mut().zip(eig.eigenvalues.iter()) {
        let keep = if p > RANK_CUTOFF * p_max { p.sqrt() } else { 0.0 };
        col *= C64::new(keep, 0.0);
    }

    // sy x sy over {gg, gf, fg, ff}
    let mut yy = CMatrix::zeros(4, 4);
    yy[(0, 3)] = C64::new(-1.0, 0.0);
    yy[(1, 2)] = C64::new(1.0, 0.0);
    yy[(2, 1)] = C64::new(1.0, 0.0);
    yy[(3, 0)] = C64::new(-1.0, 0.0);
    let tau = w.transpose() * yy * &w;
    let mut l: [f64; 4] = [0.0; 4];
    for (dst, x) in l.iter_mut().zip(tau.singular_values().iter()) {
        *dst = *x;
    }
    l.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

const RANK_CUTOFF: f64 = 1e-13;

/// `sqrt((a c* + a* b)(c d* + b* d)) / 8`, the modulus of the complex root.
pub fn concurrence_closed_form(e: &FlipFlopEntries) -> f64 {
    let prod = (e.a * e.c.conj() + e.a.conj() * e.b) * (e.c * e.d.conj() + e.b.conj() * e.d);
    prod.sqrt().norm() / 8.0
}
