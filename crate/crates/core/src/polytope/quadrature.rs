//! Exact polynomial quadrature on intervals, segments, triangles and fans.

use crate::linalg::GAUSS5;

/// Degree-5 seven-point rule on the reference triangle (barycentric
/// coordinates, weights summing to one).
const TRI7: [([f64; 3], f64); 7] = {
    const A1: f64 = 0.059_715_871_789_769_81;
    const B1: f64 = 0.470_142_064_105_115_05;
    const W1: f64 = 0.132_394_152_788_506_16;
    const A2: f64 = 0.797_426_985_353_087_2;
    const B2: f64 = 0.101_286_507_323_456_33;
    const W2: f64 = 0.125_939_180_544_827_17;
    const C: f64 = 1.0 / 3.0;
    [
        ([C, C, C], 0.225),
        ([A1, B1, B1], W1),
        ([B1, A1, B1], W1),
        ([B1, B1, A1], W1),
        ([A2, B2, B2], W2),
        ([B2, A2, B2], W2),
        ([B2, B2, A2], W2),
    ]
};

/// `int_a^b f`, exact for polynomials of degree <= 9.
pub fn interval(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    r * GAUSS5.iter().map(|(x, w)| w * f(m + r * x)).sum::<f64>()
}

/// Line integral `int_[a,b] f ds`, exact for polynomials of degree <= 9
/// along the segment.
pub fn segment(a: [f64; 2], b: [f64; 2], f: impl Fn([f64; 2]) -> f64) -> f64 {
    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
    0.5 * len
        * GAUSS5
            .iter()
            .map(|(x, w)| {
                let t = 0.5 * (1.0 + x);
                w * f([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])])
            })
            .sum::<f64>()
}

/// `int_T f`, exact for polynomials of total degree <= 5.
pub fn triangle(a: [f64; 2], b: [f64; 2], c: [f64; 2], f: impl Fn([f64; 2]) -> f64) -> f64 {
    let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
    area * TRI7
        .iter()
        .map(|(l, w)| {
            let p = [
                l[0] * a[0] + l[1] * b[0] + l[2] * c[0],
                l[0] * a[1] + l[1] * b[1] + l[2] * c[1],
            ];
            w * f(p)
        })
        .sum::<f64>()
}

/// `int_poly f` over a convex polygon by fan triangulation (signed by
/// orientation).
pub fn polygon(poly: &[[f64; 2]], f: impl Fn([f64; 2]) -> f64) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for k in 1..poly.len() - 1 {
        acc += triangle(poly[0], poly[k], poly[k + 1], &f);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_rule_is_exact_to_degree_five() {
        // int over the unit simplex of x^a y^b = a! b! / (a + b + 2)!
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        for a in 0..=5u32 {
            for b in 0..=(5 - a) {
                let q = triangle([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], |p| {
                    p[0].powi(a as i32) * p[1].powi(b as i32)
                });
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                assert!((q - exact).abs() < 1e-15, "x^{a} y^{b}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn fan_over_square() {
        let sq = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]];
        let q = polygon(&sq, |p| p[0] * p[0] * p[1]);
        assert!((q - 4.0 / 3.0).abs() < 1e-14);
    }
}
