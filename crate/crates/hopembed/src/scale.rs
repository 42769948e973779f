//! Small numeric helpers shared by the hierarchical constructions.

/// `2^i` for a possibly negative scale index.
pub(crate) fn pow2(i: i32) -> f64 {
    2f64.powi(i)
}

/// Smallest `phi >= 0` with `2^phi >= diam`.
pub(crate) fn top_scale(diam: f64) -> i32 {
    let mut phi = 0;
    while pow2(phi) < diam {
        phi += 1;
    }
    phi
}

/// Smallest `L >= 1` with `2^(2^(L-1)) >= mu`, i.e. `ceil(1 + log2 log2 mu)` for `mu > 2`.
pub(crate) fn ceil_loglog(mu: f64) -> usize {
    let mut l = 1usize;
    while 2f64.powf(2f64.powi(l as i32 - 1)) < mu {
        l += 1;
    }
    l
}

/// Sorted difference `a \ b` of two sorted slices.
pub(crate) fn minus(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter()
        .copied()
        .filter(|x| b.binary_search(x).is_err())
        .collect()
}

/// Sorted intersection of two sorted slices.
pub(crate) fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter()
        .copied()
        .filter(|x| b.binary_search(x).is_ok())
        .collect()
}
