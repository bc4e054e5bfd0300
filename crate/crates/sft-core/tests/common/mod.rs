#![allow(dead_code)]

use proptest::prelude::*;
use sft_core::Complex64;

/// `Σ x_l` over `l ≡ h (mod u)`, `l ∈ [0, N)`, leaving out index `skip`.
pub fn row_sum_except(u: u64, h: u64, x: &[Complex64], skip: Option<usize>) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut l = h as usize;
    while l < x.len() {
        if Some(l) != skip {
            acc += x[l];
        }
        l += u as usize;
    }
    acc
}

/// `Σ |x_l|` over the same index set as [`row_sum_except`].
pub fn row_mass_except(u: u64, h: u64, x: &[Complex64], skip: Option<usize>) -> f64 {
    let mut acc = 0.0;
    let mut l = h as usize;
    while l < x.len() {
        if Some(l) != skip {
            acc += x[l].norm();
        }
        l += u as usize;
    }
    acc
}

pub fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

/// Dense vectors and vectors with a handful of spikes over a small floor.
pub fn test_vector(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    let dense = proptest::collection::vec(complex(), n);
    let sparse = (
        proptest::collection::vec((0..n, complex()), 1..8),
        proptest::collection::vec(complex(), n),
        prop_oneof![Just(0.0), 1e-6f64..1e-2],
    )
        .prop_map(move |(spikes, floor, scale)| {
            let mut v: Vec<Complex64> = floor.into_iter().map(|c| c * scale).collect();
            for (i, c) in spikes {
                v[i] = c * 10.0;
            }
            v
        });
    prop_oneof![dense, sparse]
}
