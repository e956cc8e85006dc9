//! Symmetric Gauss quadrature rules on the unit right triangle.
//!
//! Rules are tabulated in barycentric orbits at exactness degrees
//! 1, 2, 4, 5, 8 and 12; weights sum to the triangle area 1/2 and are
//! all positive. Requesting a degree between tabulated values returns
//! the next rule up.

use crate::error::{Error, Result};

/// Quadrature points (xi, eta) and weights on the unit right triangle.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    /// Smallest polynomial degree the rule integrates exactly.
    pub degree: usize,
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; 2], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Returns the smallest tabulated rule with exactness >= `min_degree`.
pub fn quadrature_rule(min_degree: usize) -> Result<QuadratureRule> {
    let degree = match min_degree {
        0 | 1 => 1,
        2 => 2,
        3 | 4 => 4,
        5 => 5,
        6..=8 => 8,
        9..=12 => 12,
        d => return Err(Error::QuadratureDegree(d)),
    };
    let mut b = OrbitBuilder::default();
    match degree {
        1 => b.centroid(1.0),
        2 => b.s21(1.0 / 6.0, 1.0 / 3.0),
        4 => {
            b.s21(0.445948490915965, 0.223381589678011);
            b.s21(0.091576213509771, 0.109951743655322);
        }
        5 => {
            b.centroid(0.225);
            b.s21(0.470142064105115, 0.132394152788506);
            b.s21(0.101286507323456, 0.125939180544827);
        }
        8 => {
            b.centroid(0.14431560767778717);
            b.s21(0.45929258829272316, 0.09509163426728462);
            b.s21(0.17056930775176020, 0.10321737053471825);
            b.s21(0.05054722831703098, 0.03245849762319808);
            b.s111(0.26311282963463811, 0.00839477740995761, 0.02723031417443499);
        }
        12 => {
            b.s21(0.48821738977380488, 0.02573106644045534);
            b.s21(0.43972439229446027, 0.04369254453803840);
            b.s21(0.27121038501211592, 0.06285822421788510);
            b.s21(0.12757614554158592, 0.03479611293070894);
            b.s21(0.02131735045321037, 0.00616626105155902);
            b.s111(0.27571326968551419, 0.11534349453469800, 0.04037155776638093);
            b.s111(0.28132558098993955, 0.02283833222225703, 0.02235677320230345);
            b.s111(0.11625191590759714, 0.02573405054833023, 0.01731623110865889);
        }
        _ => unreachable!(),
    }
    Ok(QuadratureRule {
        degree,
        points: b.points,
        weights: b.weights,
    })
}

/// Expands symmetric barycentric orbits into (xi, eta) points. Published
/// weights are normalised to a unit-area triangle and scaled by 1/2 here.
#[derive(Default)]
struct OrbitBuilder {
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl OrbitBuilder {
    fn push(&mut self, b: [f64; 3], w: f64) {
        self.points.push([b[0], b[1]]);
        self.weights.push(0.5 * w);
    }

    fn centroid(&mut self, w: f64) {
        self.push([1.0 / 3.0; 3], w);
    }

    fn s21(&mut self, a: f64, w: f64) {
        let c = 1.0 - 2.0 * a;
        self.push([c, a, a], w);
        self.push([a, c, a], w);
        self.push([a, a, c], w);
    }

    fn s111(&mut self, a: f64, b: f64, w: f64) {
        let c = 1.0 - a - b;
        self.push([c, a, b], w);
        self.push([a, b, c], w);
        self.push([b, c, a], w);
        self.push([c, b, a], w);
        self.push([b, a, c], w);
        self.push([a, c, b], w);
    }
}

/// Exact integral of xi^a * eta^b over the unit right triangle.
pub fn monomial_integral(a: u32, b: u32) -> f64 {
    // a! b! / (a + b + 2)!
    let mut v = 1.0;
    for k in 1..=(a + b + 2) {
        v *= f64::from(k);
        if k <= a {
            v /= f64::from(k);
        }
    }
    let mut fb = 1.0;
    for k in 1..=b {
        fb *= f64::from(k);
    }
    fb / v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centroid_rule() {
        let r = quadrature_rule(1).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.points[0][0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.points[0][1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.weights[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn weights_are_positive_and_sum_to_half() {
        for d in [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12] {
            let r = quadrature_rule(d).unwrap();
            assert!(r.weights.iter().all(|&w| w > 0.0), "degree {}", d);
            let sum: f64 = r.weights.iter().sum();
            assert!((sum - 0.5).abs() <= 1e-13, "degree {}: weight sum {}", d, sum);
        }
    }

    #[test]
    fn points_lie_inside_the_triangle() {
        for d in [1, 2, 4, 5, 8, 12] {
            let r = quadrature_rule(d).unwrap();
            for p in &r.points {
                assert!(p[0] > 0.0 && p[1] > 0.0 && p[0] + p[1] < 1.0);
            }
        }
    }

    #[test]
    fn rules_integrate_monomials_exactly() {
        for d in [1usize, 2, 4, 5, 8, 12] {
            let r = quadrature_rule(d).unwrap();
            for a in 0..=d as u32 {
                for b in 0..=(d as u32 - a) {
                    let num: f64 = r
                        .iter()
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    let exact = monomial_integral(a, b);
                    assert!(
                        (num - exact).abs() <= 1e-14,
                        "degree {} rule, monomial xi^{} eta^{}: {} vs {}",
                        d,
                        a,
                        b,
                        num,
                        exact
                    );
                }
            }
        }
    }

    #[test]
    fn named_monomials_at_degree_8() {
        let r = quadrature_rule(8).unwrap();
        let q = |a: i32, b: i32| -> f64 {
            r.iter().map(|(p, w)| w * p[0].powi(a) * p[1].powi(b)).sum()
        };
        // 2! 3! / 7! = 1/420 and 4! 4! / 10!
        assert!((q(2, 3) - 1.0 / 420.0).abs() <= 1e-14);
        assert!((q(4, 4) - 24.0 * 24.0 / 3_628_800.0).abs() <= 1e-14);
    }

    #[test]
    fn unavailable_degree_is_an_error() {
        assert!(matches!(quadrature_rule(13), Err(Error::QuadratureDegree(13))));
    }
}
