//! Small-x (Baker) and large-x (Coulson-March) series for χ(x).

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Baker series `χ = 1 − a x + (4/3)x^{3/2} − (2/5)a x^{5/2} + (1/3)x³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BakerCoefficients {
    pub a: f64,
}

impl BakerCoefficients {
    pub fn new(a: f64) -> Result<Self> {
        if !a.is_finite() || a > 1.588072 {
            return domain(format!("Baker slope must be finite and <= 1.588072, got {a}"));
        }
        Ok(Self { a })
    }

    /// `(exponent, coefficient)` pairs in ascending powers of x.
    pub fn terms(&self) -> [(f64, f64); 5] {
        [
            (0.0, 1.0),
            (1.0, -self.a),
            (1.5, 4.0 / 3.0),
            (2.5, -0.4 * self.a),
            (3.0, 1.0 / 3.0),
        ]
    }
}

/// Truncated Baker series for χ.
pub fn baker_chi(x: f64, a: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return domain(format!("baker_chi requires x >= 0, got {x}"));
    }
    let s = x.sqrt();
    Ok(1.0 - a * x + 4.0 / 3.0 * x * s - 0.4 * a * x * x * s + x * x * x / 3.0)
}

/// dχ/dx of the truncated Baker series; equals `−a` at the origin.
pub fn baker_dchi(x: f64, a: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return domain(format!("baker_dchi requires x >= 0, got {x}"));
    }
    let s = x.sqrt();
    Ok(-a + 2.0 * s - a * x * s + x * x)
}

/// Coulson-March large-x expansion `(144/x³) Σ c_k (F x^λ)^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoulsonMarchParams {
    pub f: f64,
    pub lambda: f64,
    pub coefficients: [f64; 4],
}

impl Default for CoulsonMarchParams {
    fn default() -> Self {
        Self {
            f: 13.270,
            lambda: -0.7720,
            coefficients: [1.0, -1.0, 0.6256, -0.3133],
        }
    }
}

impl CoulsonMarchParams {
    pub fn new(f: f64, lambda: f64) -> Result<Self> {
        if !(f > 0.0) || !(lambda < 0.0) {
            return domain(format!("Coulson-March needs F > 0 and λ < 0, got ({f}, {lambda})"));
        }
        Ok(Self {
            f,
            lambda,
            ..Self::default()
        })
    }

    /// Radius beyond which `|F x^λ| < 1`.
    pub fn convergence_radius(&self) -> f64 {
        self.f.powf(-1.0 / self.lambda)
    }

    fn expansion_variable(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return domain(format!("Coulson-March series requires x > 0, got {x}"));
        }
        let u = self.f * x.powf(self.lambda);
        if u.abs() >= 1.0 {
            return Err(Error::Divergence(format!(
                "Coulson-March series diverges at x = {x} (F x^λ = {u})"
            )));
        }
        Ok(u)
    }

    fn check_terms(n_terms: usize) -> Result<()> {
        if !(1..=4).contains(&n_terms) {
            return domain(format!("n_terms must be in 1..=4, got {n_terms}"));
        }
        Ok(())
    }

    /// dχ/dx of the truncated series.
    pub fn dchi(&self, x: f64, n_terms: usize) -> Result<f64> {
        Self::check_terms(n_terms)?;
        let u = self.expansion_variable(x)?;
        // d/dx [x^{-3} u^k] = x^{-4} u^k (kλ − 3)
        let mut sum = 0.0;
        let mut uk = 1.0;
        for (k, c) in self.coefficients.iter().take(n_terms).enumerate() {
            sum += c * uk * (k as f64 * self.lambda - 3.0);
            uk *= u;
        }
        Ok(144.0 * sum / (x * x * x * x))
    }
}

/// Truncated Coulson-March series with `n_terms` in `1..=4`.
pub fn coulson_march_chi(x: f64, params: &CoulsonMarchParams, n_terms: usize) -> Result<f64> {
    CoulsonMarchParams::check_terms(n_terms)?;
    let u = params.expansion_variable(x)?;
    let mut sum = 0.0;
    let mut uk = 1.0;
    for c in params.coefficients.iter().take(n_terms) {
        sum += c * uk;
        uk *= u;
    }
    Ok(144.0 / (x * x * x) * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: f64 = 1.588072;

    #[test]
    fn baker_at_origin() {
        assert_eq!(baker_chi(0.0, A).unwrap(), 1.0);
        assert_eq!(baker_chi(0.0, 0.3).unwrap(), 1.0);
        assert_eq!(baker_dchi(0.0, A).unwrap(), -A);
    }

    #[test]
    fn baker_explicit_polynomial() {
        // 1 − 0.01588072 + 0.00133333… − 0.0000063523 + 0.000000333…
        let v = baker_chi(0.01, A).unwrap();
        assert!((v - 0.985_446_594_378_666_7).abs() < 1e-15);
        let d = baker_dchi(0.01, A).unwrap();
        assert!((d + 1.389_560_072).abs() < 1e-14);
    }

    #[test]
    fn baker_derivative_matches_finite_difference() {
        let h = 1e-7;
        let x = 0.01;
        let fd = (baker_chi(x + h, A).unwrap() - baker_chi(x - h, A).unwrap()) / (2.0 * h);
        assert!((fd - baker_dchi(x, A).unwrap()).abs() < 1e-6);
        // a-free terms only
        let d0 = baker_dchi(x, 0.0).unwrap();
        assert!((d0 - (2.0 * x.sqrt() + x * x)).abs() < 1e-15);
    }

    #[test]
    fn baker_three_halves_coefficient() {
        // (χ − 1 + a x)/x^{3/2} → 4/3 as x → 0
        let x: f64 = 1e-6;
        let c = (baker_chi(x, A).unwrap() - 1.0 + A * x) / x.powf(1.5);
        assert!((c - 4.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn baker_rejects_negative_radius() {
        assert!(baker_chi(-1e-3, A).is_err());
        assert!(baker_dchi(-1e-3, A).is_err());
        assert!(BakerCoefficients::new(1.7).is_err());
        let c = BakerCoefficients::new(A).unwrap();
        assert_eq!(c.terms()[0], (0.0, 1.0));
        assert_eq!(c.terms()[4], (3.0, 1.0 / 3.0));
    }

    #[test]
    fn coulson_march_values() {
        let p = CoulsonMarchParams::default();
        assert!((coulson_march_chi(100.0, &p, 1).unwrap() - 1.44e-4).abs() < 1e-18);
        let v50 = coulson_march_chi(50.0, &p, 4).unwrap();
        assert!((v50 - 6.102_290_892_924_47e-4).abs() < 1e-15);
        assert!((p.convergence_radius() - 28.477_116_639_388).abs() < 1e-9);
    }

    #[test]
    fn coulson_march_truncation_bound() {
        let p = CoulsonMarchParams::default();
        let x: f64 = 1000.0;
        let u = p.f * x.powf(p.lambda);
        let fourth = 144.0 / x.powi(3) * 0.3133 * u.powi(3);
        let d = (coulson_march_chi(x, &p, 4).unwrap() - coulson_march_chi(x, &p, 3).unwrap()).abs();
        assert!(d <= fourth * (1.0 + 1e-12));
    }

    #[test]
    fn coulson_march_derivative_matches_finite_difference() {
        let p = CoulsonMarchParams::default();
        let x = 300.0;
        let h = 1e-3;
        let fd = (coulson_march_chi(x + h, &p, 4).unwrap() - coulson_march_chi(x - h, &p, 4).unwrap()) / (2.0 * h);
        let d = p.dchi(x, 4).unwrap();
        assert!(((fd - d) / d).abs() < 1e-7);
    }

    #[test]
    fn coulson_march_errors() {
        let p = CoulsonMarchParams::default();
        assert!(matches!(coulson_march_chi(10.0, &p, 4), Err(Error::Divergence(_))));
        assert!(coulson_march_chi(100.0, &p, 0).is_err());
        assert!(coulson_march_chi(100.0, &p, 5).is_err());
        assert!(CoulsonMarchParams::new(-1.0, -0.5).is_err());
    }

    #[test]
    fn both_series_positive_on_validity_domains() {
        let p = CoulsonMarchParams::default();
        for i in 0..=50 {
            let x = 0.05 * i as f64 / 50.0;
            assert!(baker_chi(x, A).unwrap() > 0.0);
            let xl = 200.0 * 10f64.powf(i as f64 / 10.0);
            assert!(coulson_march_chi(xl, &p, 4).unwrap() > 0.0);
        }
    }
}
