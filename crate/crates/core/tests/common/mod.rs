//! Brute-force reference formulas, written without touching the library's
//! metric code. Distributions are plain `[f64; 10]` arrays indexed by digit.

#![allow(dead_code, clippy::needless_range_loop)]

pub fn benford() -> [f64; 10] {
    let mut p = [0.0; 10];
    for d in 1..10 {
        p[d] = (1.0 + 1.0 / d as f64).log10();
    }
    p
}

/// Leading decimal digit read off the printed number.
pub fn leading_digit(n: u64) -> usize {
    n.to_string().as_bytes()[0] as usize - b'0' as usize
}

/// Digit frequencies of `values`; zeros land on digit 0 only when counted.
pub fn histogram(values: &[u64], count_zeros: bool) -> Option<[f64; 10]> {
    let mut counts = [0usize; 10];
    for &v in values {
        if v == 0 && !count_zeros {
            continue;
        }
        counts[leading_digit(v)] += 1;
    }
    let total: usize = counts.iter().sum();
    if total == 0 {
        return None;
    }
    let mut p = [0.0; 10];
    for d in 0..10 {
        p[d] = counts[d] as f64 / total as f64;
    }
    Some(p)
}

pub fn chi2(o: &[f64; 10]) -> f64 {
    let p = benford();
    let mut s = 0.0;
    for d in 1..10 {
        s += (o[d] - p[d]).powi(2) / p[d];
    }
    s
}

pub fn euclidean(o: &[f64; 10]) -> f64 {
    let p = benford();
    (1..10).map(|d| (o[d] - p[d]).powi(2)).sum::<f64>().sqrt()
}

pub fn manhattan(o: &[f64; 10]) -> f64 {
    let p = benford();
    (1..10).map(|d| (o[d] - p[d]).abs()).sum()
}

pub fn canberra(o: &[f64; 10]) -> f64 {
    let p = benford();
    (1..10).map(|d| (o[d] - p[d]).abs() / (o[d] + p[d])).sum()
}

pub fn pearson(o: &[f64; 10]) -> f64 {
    let p = benford();
    let mo = o[1..].iter().sum::<f64>() / 9.0;
    let mp = p[1..].iter().sum::<f64>() / 9.0;
    let num: f64 = (1..10).map(|d| (o[d] - mo) * (p[d] - mp)).sum();
    let vo: f64 = (1..10).map(|d| (o[d] - mo).powi(2)).sum();
    let vp: f64 = (1..10).map(|d| (p[d] - mp).powi(2)).sum();
    if vo == 0.0 {
        return 0.0;
    }
    num / (vo * vp).sqrt()
}

pub fn cosine(o: &[f64; 10]) -> f64 {
    let p = benford();
    let dot: f64 = (1..10).map(|d| o[d] * p[d]).sum();
    let no: f64 = (1..10).map(|d| o[d] * o[d]).sum::<f64>().sqrt();
    let np: f64 = (1..10).map(|d| p[d] * p[d]).sum::<f64>().sqrt();
    if no == 0.0 {
        return 0.0;
    }
    dot / (no * np)
}

pub fn theta() -> f64 {
    2.0 * (1.0 / benford()[9]).log2()
}

pub fn mkld(o: &[f64; 10]) -> f64 {
    let p = benford();
    let mut s = 0.0;
    for d in 1..10 {
        if o[d] > 0.0 {
            s += o[d] * (o[d] / p[d]).log2();
        }
    }
    o[0] * theta() + if s > 0.0 { s.sqrt() } else { 0.0 }
}

/// Mann-Whitney statistic: share of (positive, negative) pairs ranked
/// correctly, ties counting one half.
pub fn pairwise_auc(scores: &[(f64, bool)]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for &(sp, lp) in scores {
        if !lp {
            continue;
        }
        for &(sn, ln) in scores {
            if ln {
                continue;
            }
            pairs += 1.0;
            if sp > sn {
                wins += 1.0;
            } else if sp == sn {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// `sign(count - t_l)` with `sign(0) = 1`.
pub fn brute_label(labels: &[bool], start: usize, end: usize, t_l: u32) -> bool {
    let mut count: i64 = 0;
    for i in start..end {
        if labels[i] {
            count += 1;
        }
    }
    let diff = count - t_l as i64;
    let sign = if diff >= 0 { 1 } else { -1 };
    sign == 1
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[idx[k]] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation (Pearson correlation of average ranks).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
