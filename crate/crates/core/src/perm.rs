//! Permutations restricted to blocks of interchangeable positions.

/// Calls `visit` with every permutation `p` of `0..len` that maps each block
/// onto itself. Blocks are given as a label per position; positions with equal
/// labels may be exchanged.
pub(crate) fn for_each_block_permutation(labels: &[usize], mut visit: impl FnMut(&[usize])) {
    let len = labels.len();
    let mut perm: Vec<usize> = (0..len).collect();
    let mut used = vec![false; len];
    fn rec(
        pos: usize,
        labels: &[usize],
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if pos == labels.len() {
            visit(perm);
            return;
        }
        for target in 0..labels.len() {
            if !used[target] && labels[target] == labels[pos] {
                used[target] = true;
                perm[pos] = target;
                rec(pos + 1, labels, perm, used, visit);
                used[target] = false;
            }
        }
    }
    rec(0, labels, &mut perm, &mut used, &mut visit);
}

/// Number of block-preserving permutations, saturating.
pub(crate) fn block_permutation_count(labels: &[usize]) -> u128 {
    let mut counts = std::collections::BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0u128) += 1;
    }
    counts
        .values()
        .map(|&c| (1..=c).product::<u128>())
        .fold(1u128, |acc, f| acc.saturating_mul(f))
}
