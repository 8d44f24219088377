use serde::Serialize;

use super::GameError;

/// Polynomial latency with nonnegative coefficients, constant term first.
/// Nonnegative coefficients make it nonnegative and nondecreasing on `x >= 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LatencyFunction {
    coeffs: Vec<f64>,
}

impl LatencyFunction {
    pub fn new(coeffs: Vec<f64>) -> Result<Self, GameError> {
        if let Some(&c) = coeffs.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(GameError::BadLatency(c));
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Ok(Self { coeffs })
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn affine(constant: f64, slope: f64) -> Result<Self, GameError> {
        Self::new(vec![constant, slope])
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_affine(&self) -> bool {
        self.coeffs.len() <= 2
    }

    /// `(constant, slope)` when affine.
    pub fn affine_parts(&self) -> Option<(f64, f64)> {
        self.is_affine()
            .then(|| (self.coeffs[0], self.coeffs.get(1).copied().unwrap_or(0.0)))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * x + k as f64 * c)
    }

    /// `∫₀ˣ ℓ(t) dt`.
    pub fn integral(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * x + c / (k as f64 + 1.0))
            * x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation() {
        let l = LatencyFunction::new(vec![22.0, 1.0]).unwrap();
        assert_eq!(l.eval(5.0), 27.0);
        assert_eq!(l.derivative(5.0), 1.0);
        let q = LatencyFunction::new(vec![1.0, 0.0, 3.0]).unwrap();
        assert_eq!(q.eval(2.0), 13.0);
        assert_eq!(q.derivative(2.0), 12.0);
        assert_eq!(q.integral(2.0), 2.0 + 8.0);
        assert!(!q.is_affine());
    }

    #[test]
    fn rejects_negative_and_trims_zeros() {
        assert!(LatencyFunction::new(vec![1.0, -1.0]).is_err());
        assert!(LatencyFunction::new(vec![f64::NAN]).is_err());
        let l = LatencyFunction::new(vec![3.0, 0.0, 0.0]).unwrap();
        assert_eq!(l.degree(), 0);
        assert_eq!(
            LatencyFunction::new(vec![]).unwrap(),
            LatencyFunction::zero()
        );
    }
}
