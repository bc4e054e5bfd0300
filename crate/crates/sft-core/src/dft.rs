//! Forward DFT of arbitrary length.
//!
//! Powers of two use an iterative radix-2 FFT. Every other length goes
//! through Bluestein's chirp-z reduction to a power-of-two convolution. All
//! twiddles are generated from exactly reduced integer phases.
//!
//! With the `rustfft` feature, plans delegate to `rustfft` instead; plans are
//! cached per thread so sub-transforms are shared across lengths. The cache
//! is dropped once its distinct lengths add up to a few million points.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// `exp(-2πi·num/den)` with `num` already reduced modulo `den`.
pub(crate) fn unit_root(num: u64, den: u64) -> Complex64 {
    let (s, c) = libm::sincos(2.0 * PI * (num as f64) / (den as f64));
    Complex64::new(c, -s)
}

/// Radix-2 plan for a power-of-two length.
#[derive(Debug, Clone)]
struct Radix2 {
    n: usize,
    /// `exp(-2πi·j/n)` for `j < n/2`.
    twiddles: Vec<Complex64>,
}

impl Radix2 {
    fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two());
        let twiddles = (0..n / 2).map(|j| unit_root(j as u64, n as u64)).collect();
        Self { n, twiddles }
    }

    fn bit_reverse(&self, data: &mut [Complex64]) {
        let n = self.n;
        let mut j = 0;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                data.swap(i, j);
            }
        }
    }

    /// Unnormalized transform; `inverse` flips the exponent sign.
    fn process(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        if n <= 1 {
            return;
        }
        self.bit_reverse(data);
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for block in data.chunks_exact_mut(len) {
                let (lo, hi) = block.split_at_mut(half);
                for (j, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let w = self.twiddles[j * stride];
                    let w = if inverse { w.conj() } else { w };
                    let t = *b * w;
                    *b = *a - t;
                    *a += t;
                }
            }
            len <<= 1;
        }
    }
}

#[derive(Clone)]
enum Kind {
    #[cfg(feature = "rustfft")]
    External(std::sync::Arc<dyn rustfft::Fft<f64>>),
    Radix2(Radix2),
    Bluestein {
        inner: Radix2,
        /// `exp(-πi·l²/u)` for `l < u`.
        chirp: Vec<Complex64>,
        /// Forward transform of the conjugate chirp filter.
        filter: Vec<Complex64>,
    },
}

/// A reusable forward DFT plan of fixed length.
#[derive(Clone)]
pub struct DftPlan {
    len: usize,
    kind: Kind,
}

impl core::fmt::Debug for DftPlan {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("DftPlan").field("len", &self.len).finish_non_exhaustive()
    }
}

#[cfg(feature = "rustfft")]
const CACHE_POINTS: usize = 1 << 24;

#[cfg(feature = "rustfft")]
struct Planner {
    inner: rustfft::FftPlanner<f64>,
    lengths: std::collections::HashSet<usize>,
    points: usize,
}

#[cfg(feature = "rustfft")]
impl Default for Planner {
    fn default() -> Self {
        Self { inner: rustfft::FftPlanner::new(), lengths: Default::default(), points: 0 }
    }
}

#[cfg(feature = "rustfft")]
std::thread_local! {
    static PLANNER: core::cell::RefCell<Planner> = core::cell::RefCell::new(Planner::default());
}

impl DftPlan {
    pub fn new(len: usize) -> Self {
        assert!(len >= 1, "DFT length must be positive");
        Self::planned(len)
    }

    #[cfg(not(feature = "rustfft"))]
    fn planned(len: usize) -> Self {
        Self::native(len)
    }

    #[cfg(feature = "rustfft")]
    fn planned(len: usize) -> Self {
        let fft = PLANNER.with(|cell| {
            let planner = &mut *cell.borrow_mut();
            // Tensor plans touch millions of distinct lengths; keep the cache bounded.
            if !planner.lengths.contains(&len) {
                if planner.points + len > CACHE_POINTS {
                    *planner = Planner::default();
                }
                planner.lengths.insert(len);
                planner.points += len;
            }
            planner.inner.plan_fft_forward(len)
        });
        Self { len, kind: Kind::External(fft) }
    }

    /// Plan using the built-in radix-2 and Bluestein transforms.
    pub fn native(len: usize) -> Self {
        assert!(len >= 1, "DFT length must be positive");
        if len.is_power_of_two() {
            return Self { len, kind: Kind::Radix2(Radix2::new(len)) };
        }
        let padded = (2 * len - 1).next_power_of_two();
        let inner = Radix2::new(padded);
        let two_len = 2 * len as u64;
        let chirp: Vec<Complex64> = (0..len as u64)
            .map(|l| unit_root(((l as u128 * l as u128) % two_len as u128) as u64, two_len))
            .collect();
        let mut filter = vec![Complex64::new(0.0, 0.0); padded];
        filter[0] = chirp[0].conj();
        for l in 1..len {
            filter[l] = chirp[l].conj();
            filter[padded - l] = chirp[l].conj();
        }
        inner.process(&mut filter, false);
        Self { len, kind: Kind::Bluestein { inner, chirp, filter } }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place `1/u`-normalized forward transform.
    pub fn forward(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.len, "buffer length does not match the plan");
        let scale = 1.0 / self.len as f64;
        match &self.kind {
            #[cfg(feature = "rustfft")]
            Kind::External(fft) => {
                fft.process(data);
                data.iter_mut().for_each(|x| *x *= scale);
            }
            Kind::Radix2(plan) => {
                plan.process(data, false);
                data.iter_mut().for_each(|x| *x *= scale);
            }
            Kind::Bluestein { inner, chirp, filter } => {
                let padded = inner.n;
                let mut work = vec![Complex64::new(0.0, 0.0); padded];
                for ((w, &x), &c) in work.iter_mut().zip(data.iter()).zip(chirp) {
                    *w = x * c;
                }
                inner.process(&mut work, false);
                for (w, &f) in work.iter_mut().zip(filter) {
                    *w *= f;
                }
                inner.process(&mut work, true);
                let scale = scale / padded as f64;
                for ((x, &w), &c) in data.iter_mut().zip(work.iter()).zip(chirp) {
                    *x = w * c * scale;
                }
            }
        }
    }
}

/// `1/u`-normalized forward DFT of `samples`.
pub fn dft_any_length(samples: &[Complex64]) -> Vec<Complex64> {
    let mut out = samples.to_vec();
    if !out.is_empty() {
        DftPlan::new(out.len()).forward(&mut out);
    }
    out
}

/// Direct `O(u²)` summation, used as a reference.
pub fn dft_direct(samples: &[Complex64]) -> Vec<Complex64> {
    let u = samples.len() as u64;
    (0..u)
        .map(|h| {
            let sum: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(l, &x)| x * unit_root(((h as u128 * l as u128) % u as u128) as u64, u))
                .sum();
            sum / u as f64
        })
        .collect()
}
