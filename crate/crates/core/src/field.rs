//! Evaluable vector fields `x ↦ ∂x`.

/// An autonomous vector field over named state components.
pub trait VectorField {
    fn names(&self) -> &[String];

    fn dim(&self) -> usize {
        self.names().len()
    }

    /// Writes the derivative at `state` into `deriv` (both of length `dim()`).
    fn eval(&self, state: &[f64], deriv: &mut [f64]);

    fn eval_vec(&self, state: &[f64]) -> Vec<f64> {
        let mut d = vec![0.0; self.dim()];
        self.eval(state, &mut d);
        d
    }
}

/// Wraps a closure as a [`VectorField`].
pub struct FnField<F> {
    names: Vec<String>,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&[f64], &mut [f64]),
{
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>, f: F) -> Self {
        FnField {
            names: names.into_iter().map(Into::into).collect(),
            f,
        }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(&[f64], &mut [f64]),
{
    fn names(&self) -> &[String] {
        &self.names
    }

    fn eval(&self, state: &[f64], deriv: &mut [f64]) {
        (self.f)(state, deriv)
    }
}
