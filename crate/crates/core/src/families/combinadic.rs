//! Colexicographic ranking of fixed-weight bitmasks, used to give middle
//! layer and odd graph vertices dense indices without a lookup table.

use std::sync::OnceLock;

fn table() -> &'static [[u64; 65]; 65] {
    static TABLE: OnceLock<[[u64; 65]; 65]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[0u64; 65]; 65];
        for a in 0..65 {
            t[a][0] = 1;
            for b in 1..=a {
                t[a][b] = t[a - 1][b - 1].saturating_add(t[a - 1][b]);
            }
        }
        t
    })
}

/// `C(a, b)`, saturating at `u64::MAX`; zero when `b > a`.
pub fn binomial(a: u32, b: u32) -> u64 {
    if b > a || a > 64 {
        return 0;
    }
    table()[a as usize][b as usize]
}

/// Rank of `mask` among all masks of the same popcount, in ascending
/// numeric order.
pub fn rank(mask: u64) -> u64 {
    let mut r = 0;
    let mut m = mask;
    let mut i = 1;
    while m != 0 {
        let c = m.trailing_zeros();
        r += binomial(c, i);
        i += 1;
        m &= m - 1;
    }
    r
}

/// Inverse of [`rank`] for masks of popcount `weight`.
pub fn unrank(mut r: u64, weight: u32) -> u64 {
    let mut mask = 0u64;
    for i in (1..=weight).rev() {
        // largest c with C(c, i) <= r
        let mut c = i - 1;
        while binomial(c + 1, i) <= r {
            c += 1;
        }
        r -= binomial(c, i);
        mask |= 1 << c;
    }
    mask
}

/// The `count` lowest set bits of `mask`.
pub fn lowest_bits(mask: u64, count: u32) -> u64 {
    let mut out = 0;
    let mut m = mask;
    for _ in 0..count {
        if m == 0 {
            break;
        }
        out |= m & m.wrapping_neg();
        m &= m - 1;
    }
    out
}
