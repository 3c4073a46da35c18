//! Cardinality-capped 0-1 knapsack over integer-scaled players.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnapsackItem {
    pub player_id: String,
    /// Integer-scaled valuation, 1..=100.
    pub value: u32,
    /// Integer-scaled release cost, 1..=100.
    pub weight: u32,
}

impl KnapsackItem {
    pub fn new(player_id: impl Into<String>, value: u32, weight: u32) -> Self {
        Self {
            player_id: player_id.into(),
            value,
            weight,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Selection {
    /// Indices into the solved item slice, in ascending player-id order.
    pub indices: Vec<usize>,
    pub total_value: u64,
    pub total_weight: u64,
}

impl Selection {
    pub fn player_ids<'a>(&self, items: &'a [KnapsackItem]) -> Vec<&'a str> {
        self.indices.iter().map(|&i| items[i].player_id.as_str()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Scales a fraction onto the 1..=100 integer grid by ceiling.
///
/// Non-positive and NaN inputs map to 1 (a rostered player always carries
/// some value and cost). A 1e-9 slack absorbs binary rounding such as
/// `0.07 * 100 = 7.000000000000001`.
pub fn integer_scale(v: f64) -> u32 {
    if !(v > 0.0) {
        return 1;
    }
    let scaled = (v * 100.0 - 1e-9).ceil();
    scaled.clamp(1.0, 100.0) as u32
}

/// Exact maximum-value subset with total weight at most `capacity` and at
/// most `max_items` members.
///
/// Among optimal subsets the solver prefers fewer items, then the
/// lexicographically smallest list of player ids.
pub fn knapsack_01(items: &[KnapsackItem], capacity: u64, max_items: usize) -> Selection {
    let n = items.len();
    let total_weight: u64 = items.iter().map(|it| u64::from(it.weight)).sum();
    let cap = capacity.min(total_weight) as usize;
    let max_k = max_items.min(n);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| items[a].player_id.cmp(&items[b].player_id).then(a.cmp(&b)));

    // best[i][c][k]: best value from order[i..] with weight <= c and at most k items.
    let stride_k = max_k + 1;
    let stride_c = (cap + 1) * stride_k;
    let idx = |i: usize, c: usize, k: usize| i * stride_c + c * stride_k + k;
    let mut best = vec![0u64; (n + 1) * stride_c];
    for i in (0..n).rev() {
        let item = &items[order[i]];
        let w = item.weight as usize;
        let v = u64::from(item.value);
        for c in 0..=cap {
            for k in 0..=max_k {
                let skip = best[idx(i + 1, c, k)];
                let take = if k > 0 && w <= c {
                    v + best[idx(i + 1, c - w, k - 1)]
                } else {
                    0
                };
                best[idx(i, c, k)] = skip.max(take);
            }
        }
    }

    let optimum = best[idx(0, cap, max_k)];
    if optimum == 0 {
        return Selection::default();
    }
    let fewest = (0..=max_k)
        .find(|&k| best[idx(0, cap, k)] == optimum)
        .unwrap_or(max_k);

    let (mut c, mut k, mut remaining) = (cap, fewest, optimum);
    let mut picked = Vec::with_capacity(fewest);
    for (i, &item_index) in order.iter().enumerate() {
        if k == 0 || remaining == 0 {
            break;
        }
        let item = &items[item_index];
        let w = item.weight as usize;
        let v = u64::from(item.value);
        if w <= c && v <= remaining && v + best[idx(i + 1, c - w, k - 1)] == remaining {
            picked.push(item_index);
            c -= w;
            k -= 1;
            remaining -= v;
        }
    }
    debug_assert_eq!(remaining, 0);

    let total_weight = picked.iter().map(|&i| u64::from(items[i].weight)).sum();
    Selection {
        indices: picked,
        total_value: optimum,
        total_weight,
    }
}
