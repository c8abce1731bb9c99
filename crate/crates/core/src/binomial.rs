/// Exact binomial coefficient with the combinatorial convention that
/// `C(n, k) = 0` whenever `k < 0`, `n < 0` or `k > n`.
///
/// Arithmetic is done in `u128`; every intermediate value is
/// `C(n - k + i, i) * (n - k + i + 1)`, which stays far below `u128::MAX`
/// for the `n <= 62` universes this crate supports. Larger arguments panic on
/// overflow instead of wrapping.
pub fn binom(n: i64, k: i64) -> u128 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc
            .checked_mul(n - k + i)
            .expect("binomial coefficient overflows u128")
            / i;
    }
    acc
}

/// `binom` for `usize` arguments.
pub fn choose(n: usize, k: usize) -> u128 {
    binom(n as i64, k as i64)
}
