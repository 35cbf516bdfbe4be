//! Seeded random draws of disc points, `G` points, tangents and automorphisms.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::disc::MoebiusMap;
use crate::symdisc::{GPoint, GTangent};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_circle<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..TAU))
}

/// Uniform (by area) in the disc of radius `r`.
pub fn disc_point<R: Rng + ?Sized>(rng: &mut R, r: f64) -> Complex64 {
    Complex64::from_polar(r * rng.random::<f64>().sqrt(), rng.random_range(0.0..TAU))
}

/// Independent real and imaginary parts uniform in `[-a, a]`.
pub fn complex_box<R: Rng + ?Sized>(rng: &mut R, a: f64) -> Complex64 {
    Complex64::new(rng.random_range(-a..a), rng.random_range(-a..a))
}

/// `π(z, w)` with `z, w` drawn from the disc of radius `r`.
pub fn g_point<R: Rng + ?Sized>(rng: &mut R, r: f64) -> GPoint {
    let (z, w) = (disc_point(rng, r), disc_point(rng, r));
    GPoint::new_unchecked(z + w, z * w)
}

/// A nonzero direction in `C^2` with entries in the unit box.
pub fn direction<R: Rng + ?Sized>(rng: &mut R) -> [Complex64; 2] {
    loop {
        let v = [complex_box(rng, 1.0), complex_box(rng, 1.0)];
        if v[0].norm() + v[1].norm() > 1e-3 {
            return v;
        }
    }
}

pub fn tangent<R: Rng + ?Sized>(rng: &mut R, r: f64) -> GTangent {
    GTangent::new(g_point(rng, r), direction(rng))
}

pub fn automorphism<R: Rng + ?Sized>(rng: &mut R, r: f64) -> MoebiusMap {
    MoebiusMap::new(unit_circle(rng), disc_point(rng, r)).expect("center inside the disc")
}
