//! Permutation enumeration in lexicographic order.
//!
//! Permutations are addressed by their rank in lexicographic order via the
//! factorial number system, so enumeration can be split across threads while
//! keeping a schedule-independent ordering for deterministic tie-breaks.

/// n! for n <= 20 (fits in usize on 64-bit targets).
pub fn factorial(n: usize) -> usize {
    assert!(n <= 20, "factorial({n}) overflows usize");
    (1..=n).product()
}

/// The identity permutation of length `n`.
pub fn identity(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Unranks `index` into the lexicographically `index`-th permutation of
/// {0, .., n-1}. `index` must be below n!.
pub fn permutation_from_index(index: usize, n: usize) -> Vec<usize> {
    assert!(index < factorial(n), "permutation index {index} out of range for n = {n}");
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut perm = Vec::with_capacity(n);
    let mut k = index;
    for pos in (1..=n).rev() {
        let f = factorial(pos - 1);
        let digit = k / f;
        k %= f;
        perm.push(remaining.remove(digit));
    }
    perm
}

/// True when `p` contains each of 0..p.len() exactly once.
pub fn is_permutation(p: &[usize]) -> bool {
    let n = p.len();
    let mut seen = vec![false; n];
    for &i in p {
        if i >= n || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}
