//! Strain-limiting constitutive maps.
//!
//! Two scalar response functions appear throughout:
//!
//! * `phi(s) = 1 / (1 - (beta s)^alpha)^(1/alpha)` — the stress-from-strain
//!   multiplier. It blows up as `beta * s -> 1`, which encodes the limiting
//!   strain: no admissible strain state may reach `1/beta`.
//! * `bounded_phi(s) = 1 / (1 + (beta s)^alpha)^(1/alpha)` — the inverse
//!   (strain-from-stress) multiplier. It is total and keeps every output
//!   below `1/beta`.
//!
//! The two are exact inverses of one another when applied with matching
//! exponents, which the round-trip tests pin down.

use crate::error::{Error, Result};

/// Parameters of the strain-limiting response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainLimitParams {
    /// Exponent; must be positive.
    pub alpha: f64,
    /// Inverse limiting strain; non-negative. Zero recovers linear elasticity.
    pub beta: f64,
}

impl StrainLimitParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::Config(format!("alpha must be positive, got {alpha}")));
        }
        if !(beta >= 0.0) {
            return Err(Error::Config(format!("beta must be non-negative, got {beta}")));
        }
        Ok(Self { alpha, beta })
    }
}

impl Default for StrainLimitParams {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 1.0 }
    }
}

/// Symmetric 2x2 tensor stored by its three independent components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor2 {
    pub t11: f64,
    pub t12: f64,
    pub t22: f64,
}

impl SymTensor2 {
    pub fn new(t11: f64, t12: f64, t22: f64) -> Self {
        Self { t11, t12, t22 }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Frobenius norm; the off-diagonal component counts twice.
    pub fn norm(&self) -> f64 {
        (self.t11 * self.t11 + 2.0 * self.t12 * self.t12 + self.t22 * self.t22).sqrt()
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(k * self.t11, k * self.t12, k * self.t22)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.t11 - other.t11, self.t12 - other.t12, self.t22 - other.t22)
    }

    /// Full contraction `self : other`.
    pub fn dot(&self, other: &Self) -> f64 {
        self.t11 * other.t11 + 2.0 * self.t12 * other.t12 + self.t22 * other.t22
    }
}

/// Stress-from-strain multiplier. Errors once `beta * s >= 1`: the argument
/// has reached the limiting strain and the caller must damp its iterate.
pub fn phi(s: f64, p: &StrainLimitParams) -> Result<f64> {
    let bs = p.beta * s;
    if bs >= 1.0 {
        return Err(Error::StrainLimitScalar(bs));
    }
    Ok((1.0 - bs.powf(p.alpha)).powf(-1.0 / p.alpha))
}

/// Strain-from-stress multiplier `1 / (1 + (beta s)^alpha)^(1/alpha)`;
/// total for any `s >= 0`.
pub fn bounded_phi(s: f64, p: &StrainLimitParams) -> f64 {
    (1.0 + (p.beta * s).powf(p.alpha)).powf(-1.0 / p.alpha)
}

/// The bounded map `F(T) = T / (1 + (beta |T|)^alpha)^(1/alpha)`.
///
/// For `beta > 0` the output norm stays strictly below `1/beta` no matter
/// how large the stress.
pub fn strain_from_stress(t: &SymTensor2, p: &StrainLimitParams) -> SymTensor2 {
    t.scale(bounded_phi(t.norm(), p))
}

/// The inverse map `T = phi(|e|) e`. Errors at or beyond the limiting strain.
pub fn stress_from_strain(e: &SymTensor2, p: &StrainLimitParams) -> Result<SymTensor2> {
    Ok(e.scale(phi(e.norm(), p)?))
}

/// Anti-plane strain state produced by a displacement gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntiPlaneStrain {
    /// epsilon_13 = w_x / 2
    pub e13: f64,
    /// epsilon_23 = w_y / 2
    pub e23: f64,
    /// Frobenius norm |grad w| / sqrt(2); both off-diagonal pairs count.
    pub norm: f64,
}

/// Strain components of the out-of-plane displacement field: for
/// `u = (0, 0, w)` the only nonzero entries are the 13 and 23 shears.
pub fn anti_plane_strain(grad_w: [f64; 2]) -> AntiPlaneStrain {
    let e13 = 0.5 * grad_w[0];
    let e23 = 0.5 * grad_w[1];
    AntiPlaneStrain {
        e13,
        e23,
        norm: (2.0 * (e13 * e13 + e23 * e23)).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn params(alpha: f64, beta: f64) -> StrainLimitParams {
        StrainLimitParams::new(alpha, beta).unwrap()
    }

    #[test]
    fn phi_at_zero_is_one() {
        for (a, b) in [(1.0, 1.0), (2.0, 0.5), (0.7, 3.0)] {
            assert_eq!(phi(0.0, &params(a, b)).unwrap(), 1.0);
        }
    }

    #[test]
    fn phi_alpha_one_closed_form() {
        let p = params(1.0, 1.0);
        assert!((phi(0.5, &p).unwrap() - 2.0).abs() <= 1e-15);
        for s in [0.1, 0.3, 0.77, 0.99] {
            assert!((phi(s, &p).unwrap() - 1.0 / (1.0 - s)).abs() <= 1e-13);
        }
    }

    #[test]
    fn phi_alpha_two_value() {
        // 1 / sqrt(1 - 0.25)
        let v = phi(0.5, &params(2.0, 1.0)).unwrap();
        assert!((v - 1.154_700_538_379_251_5).abs() <= 1e-14);
    }

    #[test]
    fn phi_rejects_the_strain_limit() {
        let p = params(1.0, 1.0);
        assert!(matches!(phi(1.0, &p), Err(Error::StrainLimitScalar(_))));
        assert!(matches!(phi(1.5, &p), Err(Error::StrainLimitScalar(_))));
        // beta scales the admissible range
        assert!(phi(1.5, &params(1.0, 0.5)).is_ok());
        assert!(matches!(
            phi(2.0, &params(1.0, 0.5)),
            Err(Error::StrainLimitScalar(_))
        ));
    }

    #[test]
    fn phi_is_strictly_increasing() {
        let mut rng = StdRng::seed_from_u64(7);
        for &(a, b) in &[(1.0, 1.0), (2.0, 1.0), (1.0, 2.0), (3.0, 0.5)] {
            let p = params(a, b);
            for _ in 0..500 {
                let s1: f64 = rng.gen_range(0.0..0.99 / b);
                let s2: f64 = rng.gen_range(s1..0.999 / b);
                if s2 > s1 {
                    assert!(phi(s2, &p).unwrap() > phi(s1, &p).unwrap());
                }
            }
        }
    }

    #[test]
    fn bounded_map_fixes_zero_and_identity_at_beta_zero() {
        let t = SymTensor2::new(3.0, -1.0, 2.0);
        let f = strain_from_stress(&t, &params(1.5, 0.0));
        assert_eq!(f, t);
        assert_eq!(strain_from_stress(&SymTensor2::zero(), &params(1.0, 1.0)), SymTensor2::zero());
    }

    #[test]
    fn bounded_map_diagonal_example() {
        // |T| = 3, F(T) = T / (1 + 3) = diag(3/4, 0)
        let t = SymTensor2::new(3.0, 0.0, 0.0);
        let f = strain_from_stress(&t, &params(1.0, 1.0));
        assert!((f.t11 - 0.75).abs() <= 1e-15);
        assert_eq!(f.t12, 0.0);
        assert_eq!(f.t22, 0.0);
    }

    #[test]
    fn uniform_boundedness() {
        let mut rng = StdRng::seed_from_u64(11);
        for &beta in &[0.5, 1.0, 2.0] {
            for &alpha in &[1.0, 2.0] {
                let p = params(alpha, beta);
                for _ in 0..10_000 {
                    let scale = 10f64.powf(rng.gen_range(-3.0..6.0));
                    let t = SymTensor2::new(
                        scale * rng.gen_range(-1.0..1.0),
                        scale * rng.gen_range(-1.0..1.0),
                        scale * rng.gen_range(-1.0..1.0),
                    );
                    let norm = strain_from_stress(&t, &p).norm();
                    assert!(norm <= 1.0 / beta + 1e-12, "norm {} beta {}", norm, beta);
                }
            }
        }
    }

    #[test]
    fn monotonicity_and_lipschitz() {
        let mut rng = StdRng::seed_from_u64(13);
        for &beta in &[0.5, 1.0, 2.0] {
            for &alpha in &[1.0, 2.0] {
                let p = params(alpha, beta);
                for _ in 0..10_000 {
                    let mut t = [SymTensor2::zero(); 2];
                    for tt in t.iter_mut() {
                        let scale = 10f64.powf(rng.gen_range(-2.0..3.0));
                        *tt = SymTensor2::new(
                            scale * rng.gen_range(-1.0..1.0),
                            scale * rng.gen_range(-1.0..1.0),
                            scale * rng.gen_range(-1.0..1.0),
                        );
                    }
                    let df = strain_from_stress(&t[0], &p).sub(&strain_from_stress(&t[1], &p));
                    let dt = t[0].sub(&t[1]);
                    let inner = df.dot(&dt);
                    assert!(inner >= -1e-12, "monotonicity violated: {}", inner);
                    let denom = dt.dot(&dt);
                    if denom > 1e-20 {
                        assert!(inner / denom <= 1.0 + 1e-12, "lipschitz ratio {}", inner / denom);
                    }
                }
            }
        }
    }

    #[test]
    fn stress_strain_round_trip() {
        let mut rng = StdRng::seed_from_u64(17);
        for &alpha in &[1.0, 2.0] {
            let p = params(alpha, 1.0);
            for _ in 0..100 {
                let dir = SymTensor2::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                let n = dir.norm();
                if n < 1e-3 {
                    continue;
                }
                let e = dir.scale(rng.gen_range(0.01..0.9) / n);
                let t = stress_from_strain(&e, &p).unwrap();
                let back = strain_from_stress(&t, &p);
                assert!(back.sub(&e).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn round_trip_alpha_one_by_hand() {
        let p = params(1.0, 1.0);
        let e = SymTensor2::new(0.3, 0.2, -0.1);
        let e = e.scale(0.5 / e.norm());
        let t = stress_from_strain(&e, &p).unwrap();
        assert!((t.norm() - 1.0).abs() <= 1e-14);
        assert!((t.t11 - 2.0 * e.t11).abs() <= 1e-14);
        let back = strain_from_stress(&t, &p);
        assert!(back.sub(&e).norm() <= 1e-15);
    }

    #[test]
    fn stress_from_strain_is_isotropic() {
        // Rotating the strain rotates the stress by the same angle: check
        // through the invariant scalar representation |T| = phi(|e|) |e|.
        let p = params(2.0, 1.0);
        let e = SymTensor2::new(0.4, 0.1, -0.2);
        let t = stress_from_strain(&e, &p).unwrap();
        assert!((t.norm() - phi(e.norm(), &p).unwrap() * e.norm()).abs() <= 1e-14);
        // components are a pure scaling of the input
        let k = t.t11 / e.t11;
        assert!((t.t12 - k * e.t12).abs() <= 1e-14);
        assert!((t.t22 - k * e.t22).abs() <= 1e-14);
    }

    #[test]
    fn anti_plane_strain_components() {
        let z = anti_plane_strain([0.0, 0.0]);
        assert_eq!((z.e13, z.e23, z.norm), (0.0, 0.0, 0.0));

        let s = anti_plane_strain([1.0, 0.0]);
        assert!((s.e13 - 0.5).abs() <= 1e-15);
        assert!((s.norm - 1.0 / 2f64.sqrt()).abs() <= 1e-15);

        let t = anti_plane_strain([3.0, 4.0]);
        assert!((t.norm - 5.0 / 2f64.sqrt()).abs() <= 1e-14);
    }
}
