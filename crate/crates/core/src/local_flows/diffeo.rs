use std::fmt;
use std::sync::Arc;

use crate::{SquareMatrix, Vector};

/// Step of the central finite differences used for Jacobians.
pub const FD_STEP: f64 = 1e-5;

type Forward = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
type Jacobian = Arc<dyn Fn(&Vector) -> SquareMatrix + Send + Sync>;

/// A black-box map on (a ball of) ℝⁿ with an optional closed-form Jacobian.
#[derive(Clone)]
pub struct NumericDiffeo {
    n: usize,
    forward: Forward,
    jacobian: Option<Jacobian>,
    identity_near_boundary: bool,
    label: String,
}

impl fmt::Debug for NumericDiffeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumericDiffeo")
            .field("n", &self.n)
            .field("label", &self.label)
            .field("closed_form_jacobian", &self.jacobian.is_some())
            .field("identity_near_boundary", &self.identity_near_boundary)
            .finish()
    }
}

impl NumericDiffeo {
    pub fn new(n: usize, label: impl Into<String>, forward: impl Fn(&Vector) -> Vector + Send + Sync + 'static) -> Self {
        Self {
            n,
            forward: Arc::new(forward),
            jacobian: None,
            identity_near_boundary: false,
            label: label.into(),
        }
    }

    pub fn with_jacobian(mut self, jac: impl Fn(&Vector) -> SquareMatrix + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(jac));
        self
    }

    /// Tags the map as the identity on `1 ≤ |v| ≤ 2`.
    pub fn identity_near_boundary(mut self) -> Self {
        self.identity_near_boundary = true;
        self
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, "id", |v| v.clone()).with_jacobian(move |_| SquareMatrix::identity(n, n))
    }

    pub fn linear(m: SquareMatrix) -> Self {
        let n = m.nrows();
        let m2 = m.clone();
        Self::new(n, "linear", move |v| &m * v).with_jacobian(move |_| m2.clone())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_identity_near_boundary(&self) -> bool {
        self.identity_near_boundary
    }

    pub fn eval(&self, v: &Vector) -> Vector {
        (self.forward)(v)
    }

    /// Closed-form Jacobian when available, central differences otherwise.
    pub fn jacobian_at(&self, v: &Vector) -> SquareMatrix {
        match &self.jacobian {
            Some(j) => j(v),
            None => self.fd_jacobian(v, FD_STEP),
        }
    }

    /// Central-difference Jacobian with step `h`, ignoring any closed form.
    pub fn fd_jacobian(&self, v: &Vector, h: f64) -> SquareMatrix {
        fd_jacobian(self.n, v, h, |x| self.eval(x))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &NumericDiffeo) -> NumericDiffeo {
        let (f, g) = (self.clone(), other.clone());
        let label = format!("{}∘{}", self.label, other.label);
        let mut out = NumericDiffeo::new(self.n, label, move |v| f.eval(&g.eval(v)));
        if self.jacobian.is_some() && other.jacobian.is_some() {
            let (f, g) = (self.clone(), other.clone());
            out = out.with_jacobian(move |v| f.jacobian_at(&g.eval(v)) * g.jacobian_at(v));
        }
        out.identity_near_boundary = self.identity_near_boundary && other.identity_near_boundary;
        out
    }

    /// Max of `|f(v) − v|` over the given points.
    pub fn max_displacement<'a>(&self, points: impl IntoIterator<Item = &'a Vector>) -> f64 {
        points.into_iter().map(|v| (self.eval(v) - v).norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn fd_jacobian(n: usize, v: &Vector, h: f64, mut f: impl FnMut(&Vector) -> Vector) -> SquareMatrix {
    let mut jac = SquareMatrix::zeros(n, n);
    for j in 0..n {
        let mut plus = v.clone();
        let mut minus = v.clone();
        plus[j] += h;
        minus[j] -= h;
        let col = (f(&plus) - f(&minus)) / (2.0 * h);
        jac.set_column(j, &col);
    }
    jac
}
