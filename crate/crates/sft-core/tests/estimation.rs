//! Brute-force checks of the row-estimation guarantees on small bands.

mod common;

use common::{row_sum_except, test_vector};
use proptest::prelude::*;
use sft_core::oracle::optimal_terms;
use sft_core::primes::{first_primes, floor_log, select_s_moduli, SModuli};
use sft_core::Complex64;

const BANDS: [u64; 3] = [32, 64, 128];

fn setup() -> impl Strategy<Value = (u64, u64, u64, Vec<Complex64>)> {
    (prop::sample::select(BANDS.to_vec()), prop::sample::select(vec![1u64, 2, 4]), prop::sample::select(vec![4u64, 14]))
        .prop_flat_map(|(n, k, c)| (Just(n), Just(k), Just(c), test_vector(n as usize)))
}

fn moduli(n: u64, k: u64, c: u64) -> SModuli {
    select_s_moduli(k, 2, n, c).unwrap()
}

#[test]
fn column_weight_is_at_most_log() {
    for n in BANDS {
        for k in [1, 2, 4] {
            let s = moduli(n, k, 4);
            let bound = floor_log(s.s1(), n);
            for col in 0..n {
                for other in 0..n {
                    if other == col {
                        continue;
                    }
                    let hits = s.values().iter().filter(|&&v| (col as i64 - other as i64).rem_euclid(v as i64) == 0).count();
                    assert!(hits as u32 <= bound, "N={n} k={k}: columns {col},{other} share {hits} rows");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn large_entries_are_few((n, k, c, x) in setup()) {
        let s = moduli(n, k, c);
        let log = floor_log(s.s1(), n) as usize;
        for idx in 0..n as usize {
            let y_l1: f64 = x.iter().enumerate().filter(|&(i, _)| i != idx).map(|(_, v)| v.norm()).sum();
            // With y = 0 the threshold is 0 and every entry qualifies.
            if y_l1 == 0.0 {
                continue;
            }
            let mut mags: Vec<f64> = s
                .values()
                .iter()
                .map(|&u| row_sum_except(u, idx as u64 % u, &x, Some(idx)).norm())
                .collect();
            mags.sort_by(f64::total_cmp);
            for kbar in 1..n as usize {
                let threshold = y_l1 / kbar as f64;
                let large = mags.len() - mags.partition_point(|&m| m < threshold);
                prop_assert!(large <= kbar * log, "n={idx} k̄={kbar}: {large} entries");
            }
        }
    }

    #[test]
    fn zeroing_a_set_changes_few_entries(
        (n, k, c, x) in setup(),
        picks in proptest::collection::vec(0usize..128, 0..10),
    ) {
        let s = moduli(n, k, c);
        let log = floor_log(s.s1(), n) as usize;
        let mut support: Vec<usize> = picks.into_iter().map(|p| p % n as usize).collect();
        support.sort_unstable();
        support.dedup();
        let mut zeroed = x.clone();
        for &i in &support {
            zeroed[i] = Complex64::new(0.0, 0.0);
        }
        for idx in 0..n as usize {
            let size = support.iter().filter(|&&i| i != idx).count();
            let changed = s
                .values()
                .iter()
                .filter(|&&u| {
                    let h = idx as u64 % u;
                    row_sum_except(u, h, &x, Some(idx)) != row_sum_except(u, h, &zeroed, Some(idx))
                })
                .count();
            prop_assert!(changed <= size * log, "n={idx}: {changed} entries changed for |S|={size}");
        }
    }

    #[test]
    fn most_rows_estimate_each_entry((n, k, c, x) in setup()) {
        let s = moduli(n, k, c);
        let ratio = s.ratio() as usize;
        let delta = optimal_terms(&x, ratio).residual_l1 / ratio as f64;
        let big_k = s.count() as u64;
        for idx in 0..n as usize {
            let good = s
                .values()
                .iter()
                .filter(|&&u| row_sum_except(u, idx as u64 % u, &x, Some(idx)).norm() <= delta)
                .count() as u64;
            prop_assert!(c * good > (c - 2) * big_k, "n={idx}: {good} of {big_k} rows within {delta}");
        }
    }

    #[test]
    fn good_rows_keep_their_tensor_properties(
        (n, k, x) in (prop::sample::select(BANDS.to_vec()), prop::sample::select(vec![2u64, 4]))
            .prop_flat_map(|(n, k)| (Just(n), Just(k), test_vector(n as usize))),
    ) {
        let s = moduli(n, k, 4);
        let t: Vec<u64> = first_primes(16).into_iter().take_while(|&p| p < s.s1()).collect();
        prop_assert!(t.len() >= 2);
        let ratio = s.ratio() as usize;
        let delta = optimal_terms(&x, ratio).residual_l1 / ratio as f64;
        for idx in 0..n as usize {
            let good = s
                .values()
                .iter()
                .filter(|&&u| {
                    let flat = row_sum_except(u, idx as u64 % u, &x, Some(idx)).norm() <= delta;
                    let own = t.iter().all(|&ti| {
                        let w = ti * u;
                        row_sum_except(w, idx as u64 % w, &x, Some(idx)).norm() <= delta
                    });
                    // Sibling classes: same residue mod u, different residue mod t_i.
                    let siblings = t.iter().all(|&ti| {
                        let w = ti * u;
                        (0..ti).map(|b| idx as u64 % u + b * u).filter(|&h| h != idx as u64 % w).all(|h| {
                            row_sum_except(w, h, &x, None).norm() <= delta
                        })
                    });
                    flat && own && siblings
                })
                .count();
            prop_assert!(2 * good > s.count(), "n={idx}: {good} of {} rows", s.count());
        }
    }
}
