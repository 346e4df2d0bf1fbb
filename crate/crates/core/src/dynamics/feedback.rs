use std::fmt;
use std::sync::Arc;

use nalgebra::SVD;

use crate::{Error, Matrix, Result, Vector};

/// Arguments handed to a custom feedback map.
#[derive(Debug, Clone, Copy)]
pub struct FeedbackArgs<'a> {
    pub u_free: &'a Vector,
    /// `[φ, φ̇, φ̈, …]` up to the game's jet order.
    pub phi_jet: &'a [Vector],
    pub xi: &'a Vector,
    pub epsilon: &'a Vector,
}

pub type FeedbackMap = Arc<dyn Fn(&FeedbackArgs<'_>) -> Vector + Send + Sync>;

/// The known part of an ε-represented feedback `uᵢ(u°ᵢ, φ-jet, ξ; εᵢ)`.
#[derive(Clone)]
pub enum FeedbackFamily {
    Affine(AffineFeedback),
    Custom(CustomFeedback),
}

/// `u = u° + P·φ + Q·ξ + R·ε`.
#[derive(Debug, Clone)]
pub struct AffineFeedback {
    p: Matrix,
    q: Matrix,
    r: Matrix,
    recovery_supported: bool,
}

impl AffineFeedback {
    pub fn new(p: Matrix, q: Matrix, r: Matrix) -> Result<Self> {
        let rows = p.nrows();
        if rows == 0 {
            return Err(Error::InvalidInput(
                "feedback control dimension must be >= 1".into(),
            ));
        }
        if q.nrows() != rows {
            return Err(Error::dims("feedback gain Q rows", rows, q.nrows()));
        }
        if r.nrows() != rows {
            return Err(Error::dims("feedback gain R rows", rows, r.nrows()));
        }
        if p.ncols() == 0 || q.ncols() == 0 || r.ncols() == 0 {
            return Err(Error::InvalidInput(
                "feedback gain matrices must be non-empty".into(),
            ));
        }
        let recovery_supported = has_full_column_rank(&r);
        Ok(Self {
            p,
            q,
            r,
            recovery_supported,
        })
    }

    /// Scalar convenience constructor for single-state, single-control games.
    pub fn scalar(p: f64, q: f64, r: f64) -> Self {
        Self::new(
            Matrix::from_element(1, 1, p),
            Matrix::from_element(1, 1, q),
            Matrix::from_element(1, 1, r),
        )
        .expect("1x1 gains are always consistent")
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    /// Whether `RᵀR` is invertible, i.e. ε is identifiable from `u`.
    pub fn recovery_supported(&self) -> bool {
        self.recovery_supported
    }

    pub fn control_dim(&self) -> usize {
        self.p.nrows()
    }

    pub fn epsilon_dim(&self) -> usize {
        self.r.ncols()
    }

    /// The feedback value with everything except the ε term: `u° + P·φ + Q·ξ`.
    pub fn known_part(&self, u_free: &Vector, phi: &Vector, xi: &Vector) -> Vector {
        u_free + &self.p * phi + &self.q * xi
    }

    pub(crate) fn eval(
        &self,
        u_free: &Vector,
        phi: &Vector,
        xi: &Vector,
        epsilon: &Vector,
    ) -> Vector {
        self.known_part(u_free, phi, xi) + &self.r * epsilon
    }
}

/// Rank test on `RᵀR`: every singular value above a relative floor.
fn has_full_column_rank(r: &Matrix) -> bool {
    let gram = r.transpose() * r;
    let sv = SVD::new(gram, false, false).singular_values;
    let max = sv.max();
    if !(max > 0.0) || !max.is_finite() {
        return false;
    }
    let floor = max * sv.len() as f64 * f64::EPSILON * 16.0;
    sv.iter().all(|&s| s > floor)
}

/// A user-supplied feedback map with declared dimensions.
#[derive(Clone)]
pub struct CustomFeedback {
    control_dim: usize,
    epsilon_dim: usize,
    map: FeedbackMap,
}

impl CustomFeedback {
    pub fn new(
        control_dim: usize,
        epsilon_dim: usize,
        map: impl Fn(&FeedbackArgs<'_>) -> Vector + Send + Sync + 'static,
    ) -> Self {
        Self {
            control_dim,
            epsilon_dim,
            map: Arc::new(map),
        }
    }

    pub fn control_dim(&self) -> usize {
        self.control_dim
    }

    pub fn epsilon_dim(&self) -> usize {
        self.epsilon_dim
    }
}

impl fmt::Debug for CustomFeedback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFeedback")
            .field("control_dim", &self.control_dim)
            .field("epsilon_dim", &self.epsilon_dim)
            .finish_non_exhaustive()
    }
}

impl fmt::Debug for FeedbackFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeedbackFamily::Affine(a) => a.fmt(f),
            FeedbackFamily::Custom(c) => c.fmt(f),
        }
    }
}

impl From<AffineFeedback> for FeedbackFamily {
    fn from(a: AffineFeedback) -> Self {
        FeedbackFamily::Affine(a)
    }
}

impl From<CustomFeedback> for FeedbackFamily {
    fn from(c: CustomFeedback) -> Self {
        FeedbackFamily::Custom(c)
    }
}

impl FeedbackFamily {
    pub fn control_dim(&self) -> usize {
        match self {
            FeedbackFamily::Affine(a) => a.control_dim(),
            FeedbackFamily::Custom(c) => c.control_dim,
        }
    }

    pub fn epsilon_dim(&self) -> usize {
        match self {
            FeedbackFamily::Affine(a) => a.epsilon_dim(),
            FeedbackFamily::Custom(c) => c.epsilon_dim,
        }
    }

    pub fn as_affine(&self) -> Option<&AffineFeedback> {
        match self {
            FeedbackFamily::Affine(a) => Some(a),
            FeedbackFamily::Custom(_) => None,
        }
    }
}

/// Evaluates a feedback family, returning the realized control `uᵢ`.
///
/// Affine families read only the 0-th jet entry.
pub fn eval_feedback(
    family: &FeedbackFamily,
    u_free: &Vector,
    phi_jet: &[Vector],
    xi: &Vector,
    epsilon: &Vector,
) -> Result<Vector> {
    if u_free.len() != family.control_dim() {
        return Err(Error::dims(
            "free control u°",
            family.control_dim(),
            u_free.len(),
        ));
    }
    if epsilon.len() != family.epsilon_dim() {
        return Err(Error::dims("ε", family.epsilon_dim(), epsilon.len()));
    }
    let phi = phi_jet
        .first()
        .ok_or_else(|| Error::InvalidInput("φ-jet must contain at least φ itself".into()))?;
    match family {
        FeedbackFamily::Affine(a) => {
            if phi.len() != a.p.ncols() {
                return Err(Error::dims(
                    "φ (feedback gain P columns)",
                    a.p.ncols(),
                    phi.len(),
                ));
            }
            if xi.len() != a.q.ncols() {
                return Err(Error::dims(
                    "ξ (feedback gain Q columns)",
                    a.q.ncols(),
                    xi.len(),
                ));
            }
            Ok(a.eval(u_free, phi, xi, epsilon))
        }
        FeedbackFamily::Custom(c) => {
            let u = (c.map)(&FeedbackArgs {
                u_free,
                phi_jet,
                xi,
                epsilon,
            });
            if u.len() != c.control_dim {
                return Err(Error::dims(
                    "custom feedback output",
                    c.control_dim,
                    u.len(),
                ));
            }
            Ok(u)
        }
    }
}
