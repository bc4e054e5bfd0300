use proptest::prelude::*;
use sft_core::band;
use sft_core::crt::{crt_reconstruct, mod_inverse, residue, Garner, ResidueVector};
use sft_core::measurement::MeasurementPlan;
use sft_core::multidim::{partition_primes, select_dimension_moduli, FrequencyMap};
use sft_core::primes::*;

fn pow(base: u64, e: u32) -> u128 {
    (base as u128).pow(e)
}

#[test]
fn primality_agrees_with_sieve() {
    let primes = sieve(100_000);
    let mut expected = vec![false; 100_000];
    for &p in &primes {
        expected[p as usize] = true;
    }
    for (n, &want) in expected.iter().enumerate() {
        assert_eq!(is_prime(n as u64), want, "{n}");
    }
    assert_eq!(first_primes(primes.len()), primes);
}

#[test]
fn exhaustive_crt_round_trip() {
    // Every band up to 10^4 against a few coprime families covering it.
    let families: [&[u64]; 4] = [&[101, 103], &[5, 7, 11, 13, 17], &[2, 3, 5, 7, 11, 13], &[9973, 2]];
    for moduli in families {
        let garner = Garner::new(moduli).unwrap();
        for n in [1u64, 2, 3, 10, 97, 1000, 4096, 10_000] {
            if garner.product() < n as u128 {
                continue;
            }
            for w in band::frequencies(n) {
                let r: Vec<u64> = moduli.iter().map(|&m| residue(w, m)).collect();
                assert_eq!(garner.reconstruct(&r, n), Some(w), "ω={w} N={n} {moduli:?}");
            }
        }
    }
}

#[test]
fn exhaustive_g_bijection() {
    for (m, d) in [(1, 1), (2, 1), (2, 2), (3, 2), (4, 2), (8, 2), (2, 3), (1, 4)] {
        let map = select_dimension_moduli(m, d).unwrap();
        let n = map.n_tilde();
        if n > 10_000 {
            continue;
        }
        let p = map.moduli().to_vec();
        let mut seen = vec![false; n as usize];
        for idx in 0..n {
            let mut rest = idx;
            let x: Vec<i64> = p
                .iter()
                .map(|&pd| {
                    let r = rest % pd;
                    rest /= pd;
                    band::band_frequency(r as usize, pd)
                })
                .collect();
            let w = map.g_map(&x).unwrap();
            assert!(band::in_band(w, n));
            let slot = band::band_index(w, n);
            assert!(!seen[slot], "g is not injective at {x:?}");
            seen[slot] = true;
            assert_eq!(map.g_inverse(w), x);
        }
    }
}

#[test]
fn sample_bounds_cover_built_plans() {
    for n in [64u64, 256, 4096, 1 << 16, 1 << 20] {
        for k in 1..=5 {
            for e in [1u64, 2, 4] {
                if k * e < 2 || k * e >= n {
                    continue;
                }
                let flat = MeasurementPlan::flat(k, e, n, 4).unwrap().sample_budget() as f64;
                assert!(flat <= flat_sample_bound(k, e, n).unwrap(), "flat N={n} k={k} e={e}");
                let drawn = MeasurementPlan::flat_randomized(k, e, n, 0.9, 7).unwrap().sample_budget() as f64;
                assert!(drawn <= randomized_flat_sample_bound(k, e, n, 0.9).unwrap(), "rand N={n} k={k} e={e}");
                if let Ok(plan) = MeasurementPlan::tensor(k, e, n, 4) {
                    let tensor = plan.sample_budget() as f64;
                    assert!(tensor <= tensor_sample_bound(k, e, n).unwrap(), "tensor N={n} k={k} e={e}");
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn floor_log_brackets(base in 2u64..1000, n in 1u64..u64::MAX) {
        let l = floor_log(base, n);
        prop_assert!(pow(base, l) <= n as u128);
        prop_assert!(pow(base, l + 1) > n as u128);
    }

    #[test]
    fn s_moduli_shape(k in 1u64..6, e in 1u64..5, log_n in 4u32..20, c in 2u64..15) {
        let n = 1u64 << log_n;
        prop_assume!(k * e >= 2 && k * e < n);
        let s = select_s_moduli(k, e, n, c).unwrap();
        let ratio = k * e;
        prop_assert_eq!(s.count() as u64, c * ratio * floor_log(ratio, n) as u64 + 1);
        prop_assert!(pairwise_coprime(s.values()));
        prop_assert!(s.values().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(s.s1() >= ratio);
        prop_assert!(s.values().iter().all(|&v| is_prime(v)));
        prop_assert!(s.row_sum() <= predicted_row_bound(k, e, n, c).unwrap());
    }

    #[test]
    fn t_moduli_cover_the_band(k in 1u64..6, e in 1u64..5, log_n in 8u32..40) {
        let n = 1u64 << log_n;
        prop_assume!(k * e >= 2);
        if let Ok(floor) = tensor_s1_floor(k, e, n) {
            let s = select_s_moduli_from(k, e, n, 4, floor).unwrap();
            let t = select_t_moduli(n, &s).unwrap();
            let product: u128 = t.values().iter().map(|&v| v as u128).product();
            prop_assert!(product * s.s1() as u128 >= n as u128);
            prop_assert!(*t.values().last().unwrap() < s.s1());
            prop_assert!(pairwise_coprime(t.values()));
            prop_assert_eq!(t.row_count(), 1 + t.values().iter().sum::<u64>());
        }
    }

    #[test]
    fn inverse_is_inverse(m in 2u64..1_000_000_007, a in 1u64..u64::MAX) {
        let a = a % m;
        match mod_inverse(a, m) {
            Ok(inv) => prop_assert_eq!((a as u128 * inv as u128 % m as u128) as u64, 1),
            Err(_) => prop_assert_ne!(gcd(a, m), 1),
        }
    }

    #[test]
    fn crt_round_trip_wide(k in 1u64..8, log_n in 10u32..62, seed in any::<u64>()) {
        let n = 1u64 << log_n;
        let s = select_s_moduli(k, 2, n, 4).unwrap();
        let w = band::band_min(n) + (seed % n) as i64;
        let rv = ResidueVector::of(w, s.values()).unwrap();
        prop_assert_eq!(crt_reconstruct(&rv, n).unwrap(), Some(w));
    }

    #[test]
    fn crt_rejects_inconsistent_residues(a in 0u64..7, b in 0u64..11) {
        // With N = 30 < 77 some residue pairs name no in-band frequency.
        let rv = ResidueVector::new(vec![a, b], vec![7, 11]).unwrap();
        let got = crt_reconstruct(&rv, 30).unwrap();
        let direct = band::frequencies(30).find(|&w| residue(w, 7) == a && residue(w, 11) == b);
        prop_assert_eq!(got, direct);
    }

    #[test]
    fn partition_prefixes_agree(threshold in 1u64..10_000, d in 1usize..6) {
        let long = partition_primes(threshold, 6);
        let p = partition_primes(threshold, d);
        prop_assert_eq!(&p[..], &long[..d]);
        prop_assert!(p.iter().all(|&v| v > threshold));
        prop_assert!(pairwise_coprime(&p));
    }

    #[test]
    fn g_round_trip(m in 1u64..20, d in 1usize..4, seed in any::<u64>()) {
        let map = select_dimension_moduli(m, d).unwrap();
        let mut rest = seed;
        let x: Vec<i64> = map.moduli().iter().map(|&p| {
            let r = rest % p;
            rest /= p;
            band::band_frequency(r as usize, p)
        }).collect();
        let w = map.g_map(&x).unwrap();
        prop_assert_eq!(map.g_inverse(w), x);
        let again = FrequencyMap::new(map.moduli().to_vec(), m).unwrap();
        prop_assert_eq!(again, map);
    }
}
