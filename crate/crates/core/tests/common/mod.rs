#![allow(dead_code)]

use linefib::gallery::example_gallery;
use linefib::standardizer::random_points;
use linefib::{Mat3, Point3, Vec3, VectorFieldSpec};

/// A profile `θ` in `z` and its derivative.
pub type ThetaCase = (&'static str, fn(f64) -> f64);

pub const THETAS: [ThetaCase; 3] = [
    ("z", |_| 1.0),
    ("2*z", |_| 2.0),
    ("z+z^3/3", |z| 1.0 + z * z),
];

pub fn field(text: &str, normalize: bool) -> VectorFieldSpec {
    VectorFieldSpec::parse(text, normalize).expect("test field parses")
}

/// `(cos θ(z), -sin θ(z), 0)` for a closed-form `θ`.
pub fn theta_field(theta: &str) -> VectorFieldSpec {
    field(&format!("cos({theta}),-sin({theta}),0"), false)
}

pub fn gallery_fields() -> Vec<(&'static str, VectorFieldSpec)> {
    example_gallery()
        .iter()
        .map(|e| (e.name, e.field()))
        .collect()
}

pub fn points(seed: u64, count: usize, half_width: f64) -> Vec<Point3<f64>> {
    random_points(seed, count, half_width)
}

/// Central differences, row `i` column `j` = `∂Vᵢ/∂xⱼ`.
pub fn fd_jacobian(f: &VectorFieldSpec, p: &Point3<f64>, h: f64) -> Mat3<f64> {
    let mut m = Mat3::zero();
    for j in 0..3 {
        let e = Vec3::<f64>::axis(j) * h;
        let plus = f.evaluate(&(*p + e)).unwrap();
        let minus = f.evaluate(&(*p - e)).unwrap();
        for i in 0..3 {
            m.0[i][j] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    m
}

/// Fixed rotation used for the pre-rotated checks.
pub fn fixed_rotation() -> Mat3<f64> {
    Mat3::rotation(Vec3::new(1.0, 2.0, -0.5), 0.7)
}
