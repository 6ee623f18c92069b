use super::poly::Polynomial;
use crate::error::{Error, Result};

/// Autonomous vector field on ℝᵈ, `d ≤ 3`.
#[derive(Clone, Debug, PartialEq)]
pub enum VectorField {
    /// `ẋ = A x`.
    Linear { matrix: Vec<Vec<f64>> },
    /// `ẋ = −∇h(x)`; the gradient is kept alongside the height.
    GradientDescent { height: Polynomial, dim: usize, gradient: Vec<Polynomial> },
    /// Planar field with `ṙ = r(1 − r)`, `θ̇ = 1`.
    RadialCycle,
    /// Explicit polynomial components.
    Custom { components: Vec<Polynomial> },
}

impl VectorField {
    pub fn linear(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let d = matrix.len();
        if d == 0 || d > 3 || matrix.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidMap("linear field needs a square matrix of size 1 to 3".into()));
        }
        if matrix.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(matrix.concat()));
        }
        Ok(VectorField::Linear { matrix })
    }

    pub fn gradient_descent(height: Polynomial, dim: usize) -> Result<Self> {
        if dim == 0 || dim > 3 || height.arity() > dim {
            return Err(Error::InvalidMap(format!("height uses more variables than dimension {dim}")));
        }
        if !height.is_finite() {
            return Err(Error::InvalidMap("height has non-finite coefficients".into()));
        }
        let gradient = (0..dim).map(|a| height.derivative(a).scale(-1.0)).collect();
        Ok(VectorField::GradientDescent { height, dim, gradient })
    }

    pub fn custom(components: Vec<Polynomial>) -> Result<Self> {
        let d = components.len();
        if d == 0 || d > 3 || components.iter().any(|p| p.arity() > d) {
            return Err(Error::InvalidMap("custom field needs 1 to 3 components in x, y, z".into()));
        }
        if components.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidMap("custom field has non-finite coefficients".into()));
        }
        Ok(VectorField::Custom { components })
    }

    pub fn dim(&self) -> usize {
        match self {
            VectorField::Linear { matrix } => matrix.len(),
            VectorField::GradientDescent { dim, .. } => *dim,
            VectorField::RadialCycle => 2,
            VectorField::Custom { components } => components.len(),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            VectorField::Linear { .. } => "linear",
            VectorField::GradientDescent { .. } => "gradient_descent",
            VectorField::RadialCycle => "radial_cycle",
            VectorField::Custom { .. } => "custom",
        }
    }

    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        match self {
            VectorField::Linear { matrix } => {
                for (o, row) in out.iter_mut().zip(matrix) {
                    *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
            VectorField::GradientDescent { gradient, .. } => {
                for (o, p) in out.iter_mut().zip(gradient) {
                    *o = p.eval(x);
                }
            }
            VectorField::RadialCycle => {
                let r = x[0].hypot(x[1]);
                out[0] = x[0] * (1.0 - r) - x[1];
                out[1] = x[1] * (1.0 - r) + x[0];
            }
            VectorField::Custom { components } => {
                for (o, p) in out.iter_mut().zip(components) {
                    *o = p.eval(x);
                }
            }
        }
    }
}

/// Integration parameters of the time-τ map and its outer approximation.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxParams {
    pub tau: f64,
    pub substeps: usize,
    /// Padding radius; `None` selects one tenth of the cell diagonal.
    pub bloat: Option<f64>,
}

impl ApproxParams {
    pub fn new(tau: f64, substeps: usize) -> Self {
        ApproxParams { tau, substeps, bloat: None }
    }

    pub fn with_bloat(mut self, bloat: f64) -> Self {
        self.bloat = Some(bloat);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::config("approx.tau", "must be a positive number"));
        }
        if self.substeps == 0 {
            return Err(Error::config("approx.substeps", "must be at least 1"));
        }
        if let Some(b) = self.bloat {
            if !(b.is_finite() && b >= 0.0) {
                return Err(Error::config("approx.bloat", "must be a nonnegative number"));
            }
        }
        Ok(())
    }
}

/// Fixed-step classical Runge–Kutta flow for time `tau`.
pub fn time_tau_map(field: &VectorField, params: &ApproxParams, point: &[f64]) -> Result<Vec<f64>> {
    let d = point.len();
    let h = params.tau / params.substeps as f64;
    let mut x = point.to_vec();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    for _ in 0..params.substeps {
        field.eval(&x, &mut k1);
        for i in 0..d {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        field.eval(&tmp, &mut k2);
        for i in 0..d {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        field.eval(&tmp, &mut k3);
        for i in 0..d {
            tmp[i] = x[i] + h * k3[i];
        }
        field.eval(&tmp, &mut k4);
        for i in 0..d {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(x));
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_matches_closed_form() {
        let f = VectorField::linear(vec![vec![-1.0]]).unwrap();
        let p = ApproxParams::new(std::f64::consts::LN_2, 20);
        let y = time_tau_map(&f, &p, &[1.0]).unwrap();
        assert!((y[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn zero_field_is_identity() {
        let f = VectorField::linear(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let p = ApproxParams::new(3.0, 7);
        assert_eq!(time_tau_map(&f, &p, &[0.3, -1.2]).unwrap(), vec![0.3, -1.2]);
    }

    #[test]
    fn rotation_preserves_norm() {
        let f = VectorField::linear(vec![vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let p = ApproxParams::new(2.7, 200);
        for &(x, y) in &[(1.0, 0.0), (0.3, -0.4), (-1.5, 2.0)] {
            let out = time_tau_map(&f, &p, &[x, y]).unwrap();
            let n0: f64 = (x * x + y * y).sqrt();
            assert!((out[0].hypot(out[1]) - n0).abs() < 1e-6);
        }
    }

    #[test]
    fn blow_up_is_reported() {
        let f = VectorField::custom(vec![Polynomial::parse("x^6").unwrap()]).unwrap();
        let p = ApproxParams::new(10.0, 10);
        assert!(matches!(time_tau_map(&f, &p, &[10.0]), Err(Error::NonFinite(_))));
    }

    #[test]
    fn gradient_descent_points_downhill() {
        let h = Polynomial::parse("(x^2 - 1)^2 + y^2").unwrap();
        let f = VectorField::gradient_descent(h, 2).unwrap();
        let mut v = [0.0; 2];
        f.eval(&[2.0, 1.0], &mut v);
        assert_eq!(v, [-24.0, -2.0]);
    }
}
