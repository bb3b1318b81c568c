//! Bitmask subset utilities shared by the learning-graph, adversary and walk
//! modules. Subsets of `[n]` are `u32` masks with bit `i` standing for index
//! `i` (0-based internally; formatted 1-based for display to match the usual
//! `[n] = {1,…,n}` convention).

/// Binomial coefficient as f64. Exact for every value that fits a f64 mantissa
/// (all uses in this crate stay far below 2^53).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Binomial coefficient as u64, saturating on overflow. Used for counts that
/// must be exact integers (state-space sizes, binomial tails).
pub fn binomial_u64(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).unwrap_or(u64::MAX)
}

/// Iterator over all subsets of `ground` (a bitmask) with exactly `k` bits,
/// in lexicographic order of the chosen index tuples.
pub fn k_subsets_of(ground: u32, k: usize) -> Vec<u32> {
    let idx: Vec<u32> = (0..32).filter(|i| ground >> i & 1 == 1).collect();
    let mut out = Vec::new();
    if k > idx.len() {
        return out;
    }
    let mut choose = vec![0usize; k];
    // standard combination enumeration over positions in idx
    fn rec(idx: &[u32], k: usize, start: usize, choose: &mut Vec<usize>, depth: usize, out: &mut Vec<u32>) {
        if depth == k {
            let mask = choose[..k].iter().fold(0u32, |m, &i| m | 1 << idx[i]);
            out.push(mask);
            return;
        }
        for i in start..=idx.len() - (k - depth) {
            choose[depth] = i;
            rec(idx, k, i + 1, choose, depth + 1, out);
        }
    }
    if k == 0 {
        out.push(0);
    } else {
        rec(&idx, k, 0, &mut choose, 0, &mut out);
    }
    out
}

/// All subsets of `[n]` with exactly `k` elements.
pub fn k_subsets(n: usize, k: usize) -> Vec<u32> {
    k_subsets_of(((1u64 << n) - 1) as u32, k)
}

/// All nonempty subsets of `ground` with at most `max_size` bits.
pub fn subsets_up_to(ground: u32, max_size: usize) -> Vec<u32> {
    let mut out = Vec::new();
    for k in 1..=max_size.min(ground.count_ones() as usize) {
        out.extend(k_subsets_of(ground, k));
    }
    out
}

/// Indices set in `mask`, ascending.
pub fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// Formats a mask as a sorted 1-based index list, e.g. `{1,3}`; `{}` for the
/// empty set. Used in edge keys and diagnostics.
pub fn format_mask(mask: u32) -> String {
    let inner: Vec<String> = mask_indices(mask).iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// Parses the `format_mask` form back to a mask. Accepts `{}`, `{2}`, `{1,3}`.
pub fn parse_mask(s: &str) -> Option<u32> {
    let s = s.trim();
    let inner = s.strip_prefix('{')?.strip_suffix('}')?;
    let mut mask = 0u32;
    for part in inner.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let i: u32 = part.parse().ok()?;
        if i == 0 || i > 32 {
            return None;
        }
        mask |= 1 << (i - 1);
    }
    Some(mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_table() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(8, 2), 28.0);
        assert_eq!(binomial(10, 3), 120.0);
        assert_eq!(binomial(3, 5), 0.0);
        assert_eq!(binomial(5, 0), 1.0);
        assert_eq!(binomial_u64(20, 10), 184756);
    }

    #[test]
    fn k_subsets_counts_and_order() {
        let s = k_subsets(4, 2);
        assert_eq!(s.len(), 6);
        // lexicographic on index tuples: {1,2},{1,3},{1,4},{2,3},{2,4},{3,4}
        assert_eq!(s[0], 0b0011);
        assert_eq!(s[1], 0b0101);
        assert_eq!(s[5], 0b1100);
        assert_eq!(k_subsets(6, 3).len(), 20);
        assert_eq!(k_subsets(5, 0), vec![0]);
    }

    #[test]
    fn k_subsets_of_restricted_ground() {
        let ground = 0b1101u32; // {1,3,4}
        let s = k_subsets_of(ground, 2);
        assert_eq!(s, vec![0b0101, 0b1001, 0b1100]);
    }

    #[test]
    fn mask_formatting_round_trip() {
        assert_eq!(format_mask(0), "{}");
        assert_eq!(format_mask(0b101), "{1,3}");
        assert_eq!(parse_mask("{1,3}"), Some(0b101));
        assert_eq!(parse_mask("{}"), Some(0));
        assert_eq!(parse_mask("{0}"), None);
    }

    #[test]
    fn subsets_up_to_sizes() {
        let all = subsets_up_to(0b111, 2);
        assert_eq!(all.len(), 3 + 3);
        let all3 = subsets_up_to(0b111, 3);
        assert_eq!(all3.len(), 7);
    }
}
