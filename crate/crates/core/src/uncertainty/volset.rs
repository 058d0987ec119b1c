use alloc::vec::Vec;

use super::UncertaintyError;
use crate::linalg::{Mat, Point};

/// A bounded closed set `Γ` of volatility matrices.
#[derive(Clone, Debug, PartialEq)]
pub enum VolSet<const D: usize> {
    /// Diagonal matrices with `lo_i ≤ q_ii ≤ hi_i`; in one dimension the
    /// interval `[σ_low, σ_high]`.
    DiagBox { lo: [f64; D], hi: [f64; D] },
    /// An explicit list.
    Finite(Vec<Mat<D>>),
}

const MEMBER_TOL: f64 = 1e-12;

impl VolSet<1> {
    pub fn interval(low: f64, high: f64) -> Result<Self, UncertaintyError> {
        Self::diag_box([low], [high])
    }

    /// `(σ_low, σ_high)` for the interval representation.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        match self {
            VolSet::DiagBox { lo, hi } => Some((lo[0], hi[0])),
            VolSet::Finite(_) => None,
        }
    }
}

impl<const D: usize> VolSet<D> {
    pub fn diag_box(lo: [f64; D], hi: [f64; D]) -> Result<Self, UncertaintyError> {
        if (0..D).any(|i| !(lo[i] >= 0.0 && lo[i] <= hi[i] && hi[i].is_finite())) {
            return Err(UncertaintyError::InvalidVolSet("need 0 <= lo <= hi, finite"));
        }
        Ok(VolSet::DiagBox { lo, hi })
    }

    pub fn finite(list: Vec<Mat<D>>) -> Result<Self, UncertaintyError> {
        if list.is_empty() {
            return Err(UncertaintyError::InvalidVolSet("empty matrix list"));
        }
        if list.iter().any(|q| !q.is_finite()) {
            return Err(UncertaintyError::InvalidVolSet("non-finite matrix"));
        }
        Ok(VolSet::Finite(list))
    }

    /// Every matrix multiplied by `c ≥ 0`.
    pub fn scaled(&self, c: f64) -> Self {
        match self {
            VolSet::DiagBox { lo, hi } => VolSet::DiagBox { lo: lo.map(|v| v * c), hi: hi.map(|v| v * c) },
            VolSet::Finite(l) => VolSet::Finite(l.iter().map(|q| q.scale(c)).collect()),
        }
    }

    pub fn contains(&self, q: &Mat<D>) -> bool {
        match self {
            VolSet::DiagBox { lo, hi } => {
                q.is_diagonal()
                    && (0..D).all(|i| q.0[i][i] >= lo[i] - MEMBER_TOL && q.0[i][i] <= hi[i] + MEMBER_TOL)
            }
            VolSet::Finite(l) => l.iter().any(|m| m.sub(q).0.iter().flatten().all(|v| v.abs() <= MEMBER_TOL)),
        }
    }

    /// The matrix maximising `tr(QQᵀ)`.
    pub fn high(&self) -> Mat<D> {
        match self {
            VolSet::DiagBox { hi, .. } => Mat::diag(hi),
            VolSet::Finite(l) => *l.iter().max_by(|a, b| a.gram().trace().total_cmp(&b.gram().trace())).unwrap(),
        }
    }

    /// The matrix minimising `tr(QQᵀ)`.
    pub fn low(&self) -> Mat<D> {
        match self {
            VolSet::DiagBox { lo, .. } => Mat::diag(lo),
            VolSet::Finite(l) => *l.iter().min_by(|a, b| a.gram().trace().total_cmp(&b.gram().trace())).unwrap(),
        }
    }
}

/// `G(A) = sup_{Q∈Γ} ½ tr(A QQᵀ)`, exact for both representations.
pub fn g_function<const D: usize>(gamma: &VolSet<D>, a: &Mat<D>) -> Result<f64, UncertaintyError> {
    if !a.is_symmetric(1e-12) {
        return Err(UncertaintyError::NotSymmetric);
    }
    Ok(match gamma {
        VolSet::DiagBox { lo, hi } => {
            0.5 * (0..D)
                .map(|i| {
                    let s = if a.0[i][i] >= 0.0 { hi[i] } else { lo[i] };
                    a.0[i][i] * s * s
                })
                .sum::<f64>()
        }
        VolSet::Finite(l) => l.iter().map(|q| 0.5 * a.matmul(&q.gram()).trace()).fold(f64::NEG_INFINITY, f64::max),
    })
}

/// [`g_function`] for a matrix given as rows of unknown size.
pub fn g_function_rows<const D: usize>(gamma: &VolSet<D>, rows: &[Vec<f64>]) -> Result<f64, UncertaintyError> {
    if rows.len() != D {
        return Err(UncertaintyError::DimensionMismatch { expected: D, got: rows.len() });
    }
    let mut a = Mat::zero();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != D {
            return Err(UncertaintyError::DimensionMismatch { expected: D, got: r.len() });
        }
        a.0[i].copy_from_slice(r);
    }
    g_function(gamma, &a)
}

/// `σ_{aaᵀ} = sup_{Q∈Γ} |Qᵀ a|²`.
pub fn sigma_aa<const D: usize>(gamma: &VolSet<D>, a: &Point<D>) -> Result<f64, UncertaintyError> {
    if a.norm_sq() == 0.0 {
        return Err(UncertaintyError::ZeroProbe);
    }
    Ok(match gamma {
        VolSet::DiagBox { hi, .. } => (0..D).map(|i| a[i] * a[i] * hi[i] * hi[i]).sum(),
        VolSet::Finite(l) => l.iter().map(|q| q.gram().quad(a)).fold(f64::NEG_INFINITY, f64::max),
    })
}
