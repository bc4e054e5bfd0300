//! The centered frequency window `(-ceil(N/2), floor(N/2)]`.

/// Smallest frequency in the band of width `n`.
pub fn band_min(n: u64) -> i64 {
    -(n.div_ceil(2) as i64) + 1
}

/// Largest frequency in the band of width `n`.
pub fn band_max(n: u64) -> i64 {
    (n / 2) as i64
}

pub fn in_band(omega: i64, n: u64) -> bool {
    omega >= band_min(n) && omega <= band_max(n)
}

/// Position of `omega` in a band-ordered vector.
pub fn band_index(omega: i64, n: u64) -> usize {
    (omega - band_min(n)) as usize
}

/// Frequency stored at position `index` of a band-ordered vector.
pub fn band_frequency(index: usize, n: u64) -> i64 {
    band_min(n) + index as i64
}

/// Iterator over the band in increasing frequency order.
pub fn frequencies(n: u64) -> core::ops::RangeInclusive<i64> {
    band_min(n)..=band_max(n)
}
