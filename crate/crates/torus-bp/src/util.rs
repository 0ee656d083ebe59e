//! Data-parallel helpers. With the `parallel` feature (the default) these
//! fan out over rayon; without it they run sequentially with identical
//! results, since all workloads here are pure functions of their index.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `0..n` and collect in index order.
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential twin of [`map_indexed`], kept unconditionally for baseline
/// comparisons in benchmarks.
pub fn map_indexed_seq<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Visit all `k`-element index combinations of `0..n` in lexicographic
/// order. The visitor returns `false` to stop early; the function returns
/// whether the enumeration ran to completion.
pub fn for_each_combination<F>(n: usize, k: usize, mut visit: F) -> bool
where
    F: FnMut(&[usize]) -> bool,
{
    if k == 0 {
        return visit(&[]);
    }
    if k > n {
        return true;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !visit(&idx) {
            return false;
        }
        // Advance to the next combination.
        let mut j = k;
        loop {
            if j == 0 {
                return true;
            }
            j -= 1;
            if idx[j] != j + n - k {
                break;
            }
            if j == 0 {
                return true;
            }
        }
        idx[j] += 1;
        for i in j + 1..k {
            idx[i] = idx[i - 1] + 1;
        }
    }
}

/// Number of `k`-element combinations of `n`, saturating.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}
